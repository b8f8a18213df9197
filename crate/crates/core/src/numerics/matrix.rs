use serde::{Deserialize, Serialize};

/// Dense real symmetric matrix stored as a packed lower triangle.
///
/// Only `(i, j)` with `j <= i` is stored, so `get(i, j) == get(j, i)` holds by
/// construction and writes through either index pair land in the same slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    dim: usize,
    lower: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, lower: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds the matrix from a function evaluated on the lower triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut lower = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                lower.push(f(i, j));
            }
        }
        Self { dim, lower }
    }

    /// Symmetrizes a dense row-major square matrix as `(A + Aᵀ)/2`.
    pub fn from_dense(dim: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim, "dense input must be dim x dim");
        Self::from_fn(dim, |i, j| 0.5 * (rows[i * dim + j] + rows[j * dim + i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.lower[packed(i, j)] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.lower[packed(i, j)] += v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s
    }

    /// `I - A`.
    pub fn identity_minus(&self) -> Self {
        Self::from_fn(self.dim, |i, j| if i == j { 1.0 - self.get(i, j) } else { -self.get(i, j) })
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// Full row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j);
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    /// Largest absolute entry; cheap upper proxy for the spectral radius scale.
    pub fn max_abs(&self) -> f64 {
        self.lower.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        let n = self.dim;
        let mut rows = vec![0.0; n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j).abs();
                rows[i] += v;
                if i != j {
                    rows[j] += v;
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}
