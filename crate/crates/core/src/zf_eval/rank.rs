//! Term rank of sparsity patterns via augmenting paths.
//!
//! For a matrix whose nonzero entries are independent draws from a
//! continuous distribution, the rank equals the size of a maximum matching
//! between rows and their nonzero columns, with probability one.

/// Incremental matching over columns `0..ncols`.
pub(crate) struct Matching<'a> {
    rows: Vec<&'a [usize]>,
    owner: Vec<Option<usize>>,
    size: usize,
}

impl<'a> Matching<'a> {
    pub fn new(ncols: usize) -> Self {
        Self { rows: Vec::new(), owner: vec![None; ncols], size: 0 }
    }

    /// Add a row; returns whether the rank grew.
    pub fn push(&mut self, row: &'a [usize]) -> bool {
        self.rows.push(row);
        let r = self.rows.len() - 1;
        let mut seen = vec![false; self.owner.len()];
        if self.augment(r, &mut seen) {
            self.size += 1;
            true
        } else {
            false
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn augment(&mut self, r: usize, seen: &mut [bool]) -> bool {
        for &c in self.rows[r] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            let free = match self.owner[c] {
                None => true,
                Some(o) => self.augment(o, seen),
            };
            if free {
                self.owner[c] = Some(r);
                return true;
            }
        }
        false
    }
}

/// Whether `dest` is outside the generic row span of `rows` (all masks over
/// the same ≤64 columns). Returns `(independent, rank_of_rows)`.
pub(crate) fn mask_row_independent(rows: &[u64], dest: u64) -> (bool, usize) {
    let mut owner = [u8::MAX; 64];
    let mut rank = 0;
    for r in 0..rows.len() {
        let mut seen = 0u64;
        if augment_mask(r, rows, dest, &mut owner, &mut seen) {
            rank += 1;
        }
    }
    let mut seen = 0u64;
    let independent = augment_mask(rows.len(), rows, dest, &mut owner, &mut seen);
    (independent, rank)
}

fn augment_mask(r: usize, rows: &[u64], dest: u64, owner: &mut [u8; 64], seen: &mut u64) -> bool {
    let row = if r == rows.len() { dest } else { rows[r] };
    let mut cand = row & !*seen;
    while cand != 0 {
        let c = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        *seen |= 1 << c;
        let free = owner[c] == u8::MAX || augment_mask(owner[c] as usize, rows, dest, owner, seen);
        if free {
            owner[c] = r as u8;
            return true;
        }
    }
    false
}
