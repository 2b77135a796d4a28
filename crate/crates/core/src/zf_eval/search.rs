//! Exhaustive search engines shared by `best_plans` and the oracle.
//!
//! Uplink: depth-first over users `1..=K`, each either decoded at a base
//! station strictly to the right of the previous decoder or skipped. Prefixes
//! that are already infeasible are cut, since removing a pair never breaks a
//! feasible plan. Leaves are visited in lexicographic order of the per-user
//! decoder vector (skip sorts last), and only strictly better leaves replace
//! the incumbent, so the first optimum found is the canonical one.
//!
//! Downlink: active sets in decreasing size, lexicographic within a size,
//! with each user's feasibility memoized on the part of the active set its
//! candidate transmitters can reach.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use crate::exec::Exec;
use crate::model::{CellAssociation, NetworkConfig};

use super::downlink::{heard_mask, nulling_feasible_mask, range_mask};

/// How uplink associations are obtained.
#[derive(Debug, Clone, Copy)]
pub(crate) enum AssocPolicy<'a> {
    /// Pairs must fit an existing association.
    Fixed(&'a CellAssociation),
    /// Each decoded user is associated with exactly the decoders it reaches,
    /// subject to the budget. Undecoded users get nothing.
    Derived,
}

/// Partial uplink assignment for users `1..next`.
#[derive(Debug, Clone)]
pub(crate) struct UplinkState {
    next: usize,
    decoder: Vec<Option<usize>>,
    decoded: u64,
    decoders: u64,
    /// Transitive prerequisites of each decoded user, as a mask of users.
    prerequisites: Vec<u64>,
    last_decoder: usize,
    count: usize,
}

impl UplinkState {
    fn root(k: usize) -> Self {
        Self {
            next: 1,
            decoder: vec![None; k],
            decoded: 0,
            decoders: 0,
            prerequisites: vec![0; k],
            last_decoder: 0,
            count: 0,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.decoder.iter().enumerate().filter_map(|(i, d)| d.map(|d| (i + 1, d))).collect()
    }

    /// Minimal association implied by the pairs: `C_m = D ∩ N(m)` for decoded `m`.
    pub fn derived_masks(&self, cfg: &NetworkConfig) -> Vec<u64> {
        (1..=cfg.k()).map(|m| if self.decoded & bit(m) != 0 { self.decoders & heard_mask(cfg, m) } else { 0 }).collect()
    }
}

/// Best leaf of a search.
#[derive(Debug, Clone)]
pub(crate) struct Found<T> {
    pub score: usize,
    pub extra: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SearchStats {
    pub nodes: u64,
    pub aborted: bool,
}

pub(crate) struct UplinkSearch<'a> {
    pub cfg: &'a NetworkConfig,
    pub policy: AssocPolicy<'a>,
    /// Upper bound on whatever the leaf scorer adds on top of the pair count.
    pub bonus: usize,
    /// Leaves scoring below this are ignored.
    pub floor: usize,
    /// Users decided before the tree is split into independent tasks.
    pub split_depth: usize,
    pub max_nodes: Option<u64>,
}

fn bit(i: usize) -> u64 {
    1u64 << (i - 1)
}

impl UplinkSearch<'_> {
    /// Run the search. `make_leaf` is called once per task; the scorer it
    /// returns gets a complete assignment and the score it must reach, and
    /// returns the score plus any payload.
    pub fn run<T, L, M>(&self, exec: Exec, make_leaf: M) -> (Option<Found<T>>, SearchStats)
    where
        T: Send,
        L: FnMut(&UplinkState, usize) -> Option<(usize, T)>,
        M: Fn() -> L + Sync + Send,
    {
        let counter = AtomicU64::new(0);
        let abort = AtomicBool::new(false);
        let mut tasks = Vec::new();
        let depth = self.split_depth.min(self.cfg.k());
        self.collect_prefixes(UplinkState::root(self.cfg.k()), depth, &mut tasks, &counter);

        let results = exec.map(tasks, |state| {
            let mut leaf = make_leaf();
            let mut best: Option<Found<T>> = None;
            self.dfs(state, &mut leaf, &mut best, &counter, &abort);
            best
        });
        let stats = SearchStats { nodes: counter.load(Ordering::Relaxed), aborted: abort.load(Ordering::Relaxed) };
        if stats.aborted {
            return (None, stats);
        }
        let mut winner: Option<Found<T>> = None;
        for found in results.into_iter().flatten() {
            if winner.as_ref().is_none_or(|w| found.score > w.score) {
                winner = Some(found);
            }
        }
        (winner, stats)
    }

    fn collect_prefixes(&self, state: UplinkState, depth: usize, out: &mut Vec<UplinkState>, counter: &AtomicU64) {
        counter.fetch_add(1, Ordering::Relaxed);
        if state.next > depth {
            out.push(state);
            return;
        }
        for child in self.children(&state) {
            self.collect_prefixes(child, depth, out, counter);
        }
    }

    fn upper_bound(&self, state: &UplinkState) -> usize {
        let k = self.cfg.k();
        let remaining = (k + 1 - state.next).min(k - state.last_decoder);
        state.count + remaining + self.bonus
    }

    fn dfs<T, L>(
        &self,
        state: UplinkState,
        leaf: &mut L,
        best: &mut Option<Found<T>>,
        counter: &AtomicU64,
        abort: &AtomicBool,
    ) where
        L: FnMut(&UplinkState, usize) -> Option<(usize, T)>,
    {
        let n = counter.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.max_nodes {
            if n > limit {
                abort.store(true, Ordering::Relaxed);
            }
        }
        if abort.load(Ordering::Relaxed) {
            return;
        }
        let threshold = best.as_ref().map_or(self.floor, |b| b.score + 1);
        if self.upper_bound(&state) < threshold {
            return;
        }
        if state.next > self.cfg.k() {
            if let Some((score, extra)) = leaf(&state, threshold) {
                if score >= threshold {
                    *best = Some(Found { score, extra });
                }
            }
            return;
        }
        for child in self.children(&state) {
            self.dfs(child, leaf, best, counter, abort);
        }
    }

    /// Children in canonical order: decoders ascending, then skip.
    fn children(&self, state: &UplinkState) -> Vec<UplinkState> {
        let cfg = self.cfg;
        let m = state.next;
        let mut out = Vec::new();
        for d in cfg.first_bs(m).max(state.last_decoder + 1)..=m {
            if let Some(child) = self.decode(state, m, d) {
                out.push(child);
            }
        }
        let mut skip = state.clone();
        skip.next += 1;
        out.push(skip);
        out
    }

    fn decode(&self, state: &UplinkState, n: usize, d: usize) -> Option<UplinkState> {
        let cfg = self.cfg;
        let reach = range_mask(d, cfg.last_mt(d));
        let direct = state.decoded & reach;
        let dependents = self.dependents(state, n);

        match self.policy {
            AssocPolicy::Fixed(assoc) => {
                let c_n = assoc.get(n);
                if !c_n.contains(d) || !ones(direct).all(|y| assoc.get(y).contains(d)) {
                    return None;
                }
                if !ones(dependents).all(|x| c_n.contains(state.decoder[x - 1].expect("decoded"))) {
                    return None;
                }
            }
            AssocPolicy::Derived => {
                let decoders = state.decoders | bit(d);
                let affected = (state.decoded | bit(n)) & reach;
                if ones(affected).any(|m| (decoders & heard_mask(cfg, m)).count_ones() as usize > cfg.nc()) {
                    return None;
                }
            }
        }

        let mut closure = direct;
        for y in ones(direct) {
            closure |= state.prerequisites[y - 1];
        }
        if closure & dependents != 0 {
            return None;
        }

        let mut child = state.clone();
        child.decoder[n - 1] = Some(d);
        child.prerequisites[n - 1] = closure;
        for z in ones(state.decoded) {
            if dependents & bit(z) != 0 || state.prerequisites[z - 1] & dependents != 0 {
                child.prerequisites[z - 1] |= bit(n) | closure;
            }
        }
        child.decoded |= bit(n);
        child.decoders |= bit(d);
        child.last_decoder = d;
        child.count += 1;
        child.next += 1;
        Some(child)
    }

    /// Decoded users whose decoder hears `n`.
    fn dependents(&self, state: &UplinkState, n: usize) -> u64 {
        let mut out = 0;
        for x in ones(state.decoded) {
            if self.cfg.connected(n, state.decoder[x - 1].expect("decoded")) {
                out |= bit(x);
            }
        }
        out
    }
}

/// 1-based indices of set bits, ascending.
pub(crate) fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize + 1;
        mask &= mask - 1;
        Some(i)
    })
}

/// Downlink active-set search. Every user `m` may transmit from
/// `base[m] ∪ X` with `X ⊆ helpers[m]` and total size at most `Nc`.
pub(crate) struct DownlinkSearch<'a> {
    cfg: &'a NetworkConfig,
    base: Vec<u64>,
    helpers: Vec<u64>,
    relevant: Vec<u64>,
    memo: HashMap<(usize, u64, u64), bool>,
    pub nodes: u64,
}

impl<'a> DownlinkSearch<'a> {
    /// `base[m-1]` must already fit the budget. Later bases passed to
    /// [`Self::set_base`] must stay inside `helpers` or the initial base.
    pub fn new(cfg: &'a NetworkConfig, base: Vec<u64>, helpers: Vec<u64>) -> Self {
        let relevant = (0..cfg.k())
            .map(|i| {
                let all = base[i] | helpers[i];
                if all == 0 {
                    return 0;
                }
                let lo = all.trailing_zeros() as usize + 1;
                let hi = 64 - all.leading_zeros() as usize;
                range_mask(lo, cfg.last_mt(hi))
            })
            .collect();
        Self { cfg, base, helpers, relevant, memo: HashMap::new(), nodes: 0 }
    }

    /// Replace the per-user base sets, keeping the memo.
    pub fn set_base(&mut self, base: Vec<u64>) {
        self.base = base;
    }

    /// Transmit sets for a fixed association: `T_m = C_m`.
    pub fn fixed(cfg: &'a NetworkConfig, assoc: &CellAssociation) -> Self {
        let base: Vec<u64> = (1..=cfg.k()).map(|m| assoc.get(m).to_mask()).collect();
        Self::new(cfg, base, vec![0; cfg.k()])
    }

    /// Candidate transmit sets of maximal size. Feasibility only improves as
    /// the transmit set grows, so smaller sets need not be tried.
    fn maximal_sets(&self, m: usize) -> Vec<u64> {
        let base = self.base[m - 1];
        let free = self.helpers[m - 1] & !base;
        let room = self.cfg.nc().saturating_sub(base.count_ones() as usize);
        let take = room.min(free.count_ones() as usize);
        subsets_of_size(free, take).map(|x| base | x).collect()
    }

    pub fn user_feasible(&mut self, m: usize, active: u64) -> bool {
        let key = (m, self.base[m - 1], active & self.relevant[m - 1]);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        self.nodes += 1;
        let v = self.maximal_sets(m).into_iter().any(|t| nulling_feasible_mask(self.cfg, m, t, active));
        self.memo.insert(key, v);
        v
    }

    /// Largest feasible active set of size at least `min_size`, first in
    /// lexicographic order among those of that size.
    pub fn best_active(&mut self, min_size: usize) -> Option<u64> {
        let eligible: Vec<usize> = (1..=self.cfg.k()).filter(|&m| self.user_feasible(m, bit(m))).collect();
        for size in (min_size.max(1)..=eligible.len()).rev() {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let active = idx.iter().fold(0u64, |a, &p| a | bit(eligible[p]));
                if idx.iter().all(|&p| self.user_feasible(eligible[p], active)) {
                    return Some(active);
                }
                if !next_combination(&mut idx, eligible.len()) {
                    break;
                }
            }
        }
        (min_size == 0).then_some(0)
    }

    /// Shortlex-smallest feasible transmit set for `m` under `active`, among
    /// sets that fit the budget together with `base[m]`.
    pub fn canonical_transmit(&self, m: usize, active: u64) -> Option<u64> {
        let base = self.base[m - 1];
        let pool = base | self.helpers[m - 1];
        let nc = self.cfg.nc();
        for size in 1..=pool.count_ones() as usize {
            let mut found: Option<u64> = None;
            for t in subsets_of_size(pool, size) {
                if (base | t).count_ones() as usize > nc || !nulling_feasible_mask(self.cfg, m, t, active) {
                    continue;
                }
                if found.is_none_or(|f| lex_less(t, f)) {
                    found = Some(t);
                }
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Compare equal-size masks by their sorted index lists.
fn lex_less(a: u64, b: u64) -> bool {
    ones(a).lt(ones(b))
}

/// Advance to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All submasks of `pool` with exactly `size` bits.
pub(crate) fn subsets_of_size(pool: u64, size: usize) -> impl Iterator<Item = u64> {
    let members: Vec<usize> = ones(pool).collect();
    let n = members.len();
    let mut idx: Option<Vec<usize>> = (size <= n).then(|| (0..size).collect());
    std::iter::from_fn(move || {
        let cur = idx.as_mut()?;
        let mask = cur.iter().fold(0u64, |a, &p| a | bit(members[p]));
        if !next_combination(cur, n) {
            idx = None;
        }
        Some(mask)
    })
}
