//! Small dense real linear algebra for beamformer construction.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal basis of a row space, built by modified Gram-Schmidt with
/// one re-orthogonalization pass.
#[derive(Debug, Default)]
pub(crate) struct RowBasis {
    q: Vec<Vec<f64>>,
}

impl RowBasis {
    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// Component of `v` orthogonal to the basis.
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in &self.q {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        w
    }

    /// Add `row` if it is independent relative to `rel_tol`; returns whether it was.
    pub fn push(&mut self, row: &[f64], rel_tol: f64) -> bool {
        let scale = norm(row);
        if scale == 0.0 {
            return false;
        }
        let w = self.residual(row);
        let n = norm(&w);
        if n <= rel_tol * scale {
            return false;
        }
        self.q.push(w.into_iter().map(|x| x / n).collect());
        true
    }
}
