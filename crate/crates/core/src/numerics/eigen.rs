//! Dense real symmetric eigensolvers.
//!
//! [`sym_eigen`] reduces to tridiagonal form by Householder reflections and
//! finishes with implicit symmetric QR (via `nalgebra`). [`jacobi_eigen`] is a
//! slower cyclic Jacobi solver kept as an independent cross-check. Threshold cyclic-by-row sweeps in the Rutishauser formulation: rotations
//! are accumulated into the diagonal through a correction vector, which keeps
//! small eigenvalues of nearly diagonal matrices accurate in absolute terms.

use super::matrix::SymmetricMatrix;
use crate::error::{Error, Result};

/// Eigenvalues (descending), optional orthonormal eigenvectors and the
/// measured residual of the decomposition.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `i` (stored as `eigenvectors[i]`) pairs with `eigenvalues[i]`.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// `max |A v - λ v|` over the computed pairs, or the final off-diagonal
    /// Frobenius mass when vectors were not requested.
    pub residual: f64,
    /// Jacobi sweeps; zero for the tridiagonal solver.
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("dimension >= 1")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Computes all eigenvalues, and optionally eigenvectors, of `m`.
///
/// Non-convergence of the QR iteration is reported as [`Error::NoConvergence`].
pub fn sym_eigen(m: &SymmetricMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::pre("sym_eigen", "dimension must be at least 1"));
    }
    let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    const MAX_ITER: usize = 100_000;
    if !want_vectors {
        let ev = nalgebra::SymmetricEigen::try_new(dense, f64::EPSILON, MAX_ITER)
            .ok_or(Error::NoConvergence { op: "sym_eigen", iterations: MAX_ITER })?;
        let mut eigenvalues: Vec<f64> = ev.eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        return Ok(EigenDecomposition { eigenvalues, eigenvectors: None, residual: 0.0, sweeps: 0 });
    }
    let ev = nalgebra::SymmetricEigen::try_new(dense, f64::EPSILON, MAX_ITER)
        .ok_or(Error::NoConvergence { op: "sym_eigen", iterations: MAX_ITER })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| ev.eigenvalues[j].partial_cmp(&ev.eigenvalues[i]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| ev.eigenvalues[i]).collect();
    let vecs: Vec<Vec<f64>> = order.iter().map(|&i| ev.eigenvectors.column(i).iter().copied().collect()).collect();
    let residual = pair_residual(m, &eigenvalues, &vecs);
    Ok(EigenDecomposition { eigenvalues, eigenvectors: Some(vecs), residual, sweeps: 0 })
}

fn pair_residual(m: &SymmetricMatrix, values: &[f64], vecs: &[Vec<f64>]) -> f64 {
    let mut res = 0.0_f64;
    for (lam, vec) in values.iter().zip(vecs) {
        let av = m.mul_vec(vec);
        for k in 0..vec.len() {
            res = res.max((av[k] - lam * vec[k]).abs());
        }
    }
    res
}

/// Cyclic Jacobi solver with the same contract as [`sym_eigen`].
///
/// When vectors are not requested the residual is the final off-diagonal
/// Frobenius mass. The sweep cap is `64 * dim`.
pub fn jacobi_eigen(m: &SymmetricMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::pre("jacobi_eigen", "dimension must be at least 1"));
    }
    let mut a = m.to_dense();
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };

    let cap = 64 * n;
    let mut sweeps = 0;
    let n2 = (n * n) as f64;
    loop {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        if sweeps >= cap {
            return Err(Error::NoConvergence { op: "jacobi_eigen", iterations: sweeps });
        }
        sweeps += 1;
        let tresh = if sweeps < 4 { 0.2 * off / n2 } else { 0.0 };

        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweeps > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= tresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let hh = t * apq;
                z[p] -= hh;
                z[q] += hh;
                d[p] -= hh;
                d[q] += hh;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                rotate_rows(&mut a, n, p, q, s, tau);
                if let Some(v) = v.as_mut() {
                    // eigenvectors are stored as rows of `v` (v[i*n + k] = component k of vector i)
                    let (lo, hi) = v.split_at_mut(q * n);
                    let rp = &mut lo[p * n..p * n + n];
                    let rq = &mut hi[..n];
                    for k in 0..n {
                        let g = rp[k];
                        let h = rq[k];
                        rp[k] = g - s * (h + g * tau);
                        rq[k] = h + s * (g - h * tau);
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let (eigenvectors, residual) = match v {
        Some(v) => {
            let vecs: Vec<Vec<f64>> = order.iter().map(|&i| v[i * n..i * n + n].to_vec()).collect();
            let res = pair_residual(m, &eigenvalues, &vecs);
            (Some(vecs), res)
        }
        None => {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += 2.0 * a[p * n + q] * a[p * n + q];
                }
            }
            (None, off.sqrt())
        }
    };

    Ok(EigenDecomposition { eigenvalues, eigenvectors, residual, sweeps })
}

/// Applies the (p, q) rotation to rows p and q of the full symmetric working
/// matrix, then mirrors the two rows into columns p and q.
#[inline]
fn rotate_rows(a: &mut [f64], n: usize, p: usize, q: usize, s: f64, tau: f64) {
    debug_assert!(p < q);
    let (lo, hi) = a.split_at_mut(q * n);
    let rp = &mut lo[p * n..p * n + n];
    let rq = &mut hi[..n];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let g = rp[k];
        let h = rq[k];
        rp[k] = g - s * (h + g * tau);
        rq[k] = h + s * (g - h * tau);
    }
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        a[k * n + p] = a[p * n + k];
        a[k * n + q] = a[q * n + k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eigen(&SymmetricMatrix::identity(3), false).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        let e = sym_eigen(&SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0]), false).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn rejects_empty() {
        assert!(sym_eigen(&SymmetricMatrix::zeros(0), false).is_err());
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = SymmetricMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => 2.0,
            (1, 1) => -1.0,
            _ => 0.5,
        });
        let e = sym_eigen(&m, true).unwrap();
        let disc = (1.5_f64 * 1.5 + 0.25).sqrt();
        assert!((e.eigenvalues[0] - (0.5 + disc)).abs() < 1e-15);
        assert!((e.eigenvalues[1] - (0.5 - disc)).abs() < 1e-15);
        assert!(e.residual < 1e-14);
    }

    #[test]
    fn similarity_invariants_random_20() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let m = random_symmetric(20, &mut rng);
        let e = sym_eigen(&m, false).unwrap();
        let tr: f64 = e.eigenvalues.iter().sum();
        let fro: f64 = e.eigenvalues.iter().map(|l| l * l).sum();
        assert!((tr - m.trace()).abs() <= 1e-10 * m.trace().abs().max(1.0));
        assert!((fro - m.frobenius_sq()).abs() <= 1e-10 * m.frobenius_sq());
    }

    #[test]
    fn vectors_orthonormal_and_residual_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_symmetric(40, &mut rng);
        let e = sym_eigen(&m, true).unwrap();
        let vecs = e.eigenvectors.as_ref().unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "({i},{j}) {dot}");
            }
        }
        let scale = m.gershgorin_radius();
        assert!(e.residual <= 1e-10 * scale, "{} vs {}", e.residual, scale);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_symmetric(25, &mut rng);
        let a = sym_eigen(&m, false).unwrap();
        let b = sym_eigen(&m, false).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn similarity_invariants_sweep() {
        // 100 random matrices with dimensions spread up to 200.
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for trial in 0..100 {
            let n = 1 + (trial * 37) % 200;
            let m = random_symmetric(n, &mut rng);
            let e = sym_eigen(&m, false).unwrap();
            let tr: f64 = e.eigenvalues.iter().sum();
            let fro: f64 = e.eigenvalues.iter().map(|l| l * l).sum();
            let fro_ref = m.frobenius_sq();
            assert!((tr - m.trace()).abs() <= 1e-10 * fro_ref.sqrt().max(1.0), "trial {trial}");
            assert!((fro - fro_ref).abs() <= 1e-10 * fro_ref, "trial {trial}");
        }
    }

    #[test]
    fn solvers_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 30, 90] {
            let m = random_symmetric(n, &mut rng);
            let a = sym_eigen(&m, false).unwrap();
            let b = jacobi_eigen(&m, true).unwrap();
            let scale = m.frobenius_sq().sqrt().max(1.0);
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() <= 1e-12 * scale, "n={n}");
            }
            assert!(b.residual <= 1e-12 * scale);
            let j = jacobi_eigen(&m, false).unwrap();
            assert!(j.residual <= 1e-12 * scale);
        }
    }
}
