//! Complex sparse matrices (CSR) sized for truncated Fock spaces, plus the
//! exponential actions the state constructions need.
//!
//! Two exponential routes are provided. `exp_apply` is plain scaling +
//! Taylor action on a vector, used where the exponent mixes raising and
//! lowering (displacement operators). Pure-raising exponents terminate
//! exactly in a graded truncated space, so the same series is exact there
//! with no scaling step.

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl SparseOperator {
    pub fn zero(dim: usize) -> Self {
        SparseOperator {
            dim,
            indptr: vec![0; dim + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseOperator {
            dim,
            indptr: (0..=dim).collect(),
            indices: (0..dim).collect(),
            data: vec![C64::ONE; dim],
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        SparseOperator {
            dim,
            indptr: (0..=dim).collect(),
            indices: (0..dim).collect(),
            data: diag.to_vec(),
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        let mut op = SparseOperator {
            dim,
            indptr,
            indices,
            data,
        };
        op.prune();
        op
    }

    fn prune(&mut self) {
        let mut indptr = vec![0usize; self.dim + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut data = Vec::with_capacity(self.data.len());
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.data[k] != C64::ZERO {
                    indices.push(self.indices[k]);
                    data.push(self.data[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.data = data;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        match self.indices[lo..hi].binary_search(&c) {
            Ok(k) => self.data[lo + k],
            Err(_) => C64::ZERO,
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![C64::ZERO; self.dim];
        for r in 0..self.dim {
            let mut acc = C64::ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * v[self.indices[k]];
            }
            out[r] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                triplets.push((self.indices[k], r, self.data[k].conj()));
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for d in &mut out.data {
            *d *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for (op, sign) in [(self, C64::ONE), (other, C64::ONE)] {
            for r in 0..op.dim {
                for k in op.indptr[r]..op.indptr[r + 1] {
                    triplets.push((r, op.indices[k], op.data[k] * sign));
                }
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-C64::ONE))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut acc = vec![C64::ZERO; dim];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let a = self.data[k];
                let m = self.indices[k];
                for l in other.indptr[m]..other.indptr[m + 1] {
                    let c = other.indices[l];
                    if acc[c] == C64::ZERO {
                        touched.push(c);
                    }
                    acc[c] += a * other.data[l];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != C64::ZERO {
                    indices.push(c);
                    data.push(acc[c]);
                }
                acc[c] = C64::ZERO;
            }
            touched.clear();
            indptr[r + 1] = indices.len();
        }
        SparseOperator {
            dim,
            indptr,
            indices,
            data,
        }
    }

    /// [A, B] = AB - BA.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Largest |entry| over rows < `row_end` and cols < `col_end`.
    pub fn max_abs_on_block(&self, row_end: usize, col_end: usize) -> f64 {
        let mut m = 0.0f64;
        for r in 0..row_end.min(self.dim) {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.indices[k] < col_end {
                    m = m.max(self.data[k].norm());
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    /// Max absolute row sum (operator infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.indptr[r]..self.indptr[r + 1]
            })
            .map(|range| range.map(|k| self.data[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|r| self.entry(r, r)).sum()
    }

    pub fn row_iter(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.data[k]))
    }
}

/// exp(A) v by scaling and Taylor-series action. The series for each scaled
/// factor is summed until the term norm falls below `tol` relative to the
/// accumulated result; nilpotent (graded-raising) exponents terminate
/// exactly.
pub fn exp_apply(op: &SparseOperator, v: &[C64], tol: f64) -> Vec<C64> {
    let norm = op.norm_inf();
    let squarings = if norm > 1.0 {
        (norm.log2().ceil() as u32).min(40)
    } else {
        0
    };
    let scale = 1.0 / f64::powi(2.0, squarings as i32);
    let scaled = op.scale(C64::new(scale, 0.0));
    let mut current = v.to_vec();
    for _ in 0..(1u64 << squarings) {
        current = exp_apply_series(&scaled, &current, tol);
    }
    current
}

fn exp_apply_series(op: &SparseOperator, v: &[C64], tol: f64) -> Vec<C64> {
    let mut sum = v.to_vec();
    let mut term = v.to_vec();
    for k in 1..=200usize {
        term = op.apply(&term);
        let inv = 1.0 / k as f64;
        for t in &mut term {
            *t *= inv;
        }
        let mut tnorm = 0.0f64;
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
            tnorm += t.norm_sqr();
        }
        let snorm: f64 = sum.iter().map(|s| s.norm_sqr()).sum();
        if tnorm.sqrt() <= tol * snorm.sqrt().max(1e-300) {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn triplets_sum_duplicates() {
        let op = SparseOperator::from_triplets(
            2,
            vec![(0, 1, c64(1.0, 0.0)), (0, 1, c64(0.5, 0.0))],
        );
        assert_eq!(op.nnz(), 1);
        assert!((op.entry(0, 1) - c64(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let op = SparseOperator::from_triplets(
            2,
            vec![(0, 1, c64(1.0, 2.0)), (1, 0, c64(-0.5, 0.25))],
        );
        let adj = op.adjoint();
        assert!((adj.entry(1, 0) - c64(1.0, -2.0)).norm() < 1e-15);
        assert!((adj.entry(0, 1) - c64(-0.5, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseOperator::from_triplets(
            3,
            vec![
                (0, 0, c64(1.0, 0.0)),
                (0, 2, c64(0.0, 1.0)),
                (1, 1, c64(2.0, 0.0)),
                (2, 0, c64(1.0, -1.0)),
            ],
        );
        let b = SparseOperator::from_triplets(
            3,
            vec![
                (0, 1, c64(3.0, 0.0)),
                (1, 2, c64(0.0, -2.0)),
                (2, 1, c64(1.0, 1.0)),
            ],
        );
        let ab = a.matmul(&b);
        for r in 0..3 {
            for c in 0..3 {
                let mut expect = C64::ZERO;
                for m in 0..3 {
                    expect += a.entry(r, m) * b.entry(m, c);
                }
                assert!((ab.entry(r, c) - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn exp_of_nilpotent_matches_hand_expansion() {
        // N = [[0,1],[0,0]], exp(N) = I + N.
        let n = SparseOperator::from_triplets(2, vec![(0, 1, C64::ONE)]);
        let v = vec![c64(0.3, 0.0), c64(1.0, -2.0)];
        let out = exp_apply(&n, &v, 1e-14);
        assert!((out[0] - (v[0] + v[1])).norm() < 1e-13);
        assert!((out[1] - v[1]).norm() < 1e-13);
    }

    #[test]
    fn exp_of_diagonal() {
        let d = SparseOperator::from_diagonal(&[c64(0.7, 0.0), c64(-1.3, 0.5)]);
        let v = vec![C64::ONE, C64::ONE];
        let out = exp_apply(&d, &v, 1e-14);
        assert!((out[0] - c64(0.7, 0.0).exp()).norm() < 1e-12);
        assert!((out[1] - c64(-1.3, 0.5).exp()).norm() < 1e-12);
    }
}
