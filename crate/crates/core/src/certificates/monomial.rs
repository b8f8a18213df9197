//! Displaced-monomial trial families for the square.

use super::packing::ScaledDisks;
use crate::error::{Error, Result};
use crate::fock::{complement_concentration, displacement_overlap, overlap_magnitude, DisplacedMonomial};
use num_complex::Complex64;
use crate::numerics::{sym_eigen, SymmetricMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `T_{w_m} e_k` for `0 ≤ k ≤ π R_m²`, one group per disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialFamily {
    pub c: f64,
    /// Chosen members, grouped by disk and ordered by degree within a disk.
    pub members: Vec<DisplacedMonomial>,
    /// Disk index of each member.
    pub disk_of: Vec<usize>,
    /// Mass of each member outside the square of side `√c`.
    pub leakage: Vec<f64>,
    /// `Σ_m (⌊π R_m²⌋ + 1)`.
    pub capacity: usize,
}

impl MonomialFamily {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// `Σ_a d_a`.
    pub fn concentration_sum(&self) -> f64 {
        self.leakage.iter().sum()
    }

    /// Real symmetric embedding `[[Re G, -Im G], [Im G, Re G]]` of the
    /// Hermitian Gram matrix `G_ab = ⟨F_b, F_a⟩`; its eigenvalues are those of
    /// `G`, each twice.
    pub fn gram_embedding(&self) -> SymmetricMatrix {
        let n = self.size();
        let g: Vec<Vec<Complex64>> = (0..n)
            .map(|a| {
                (0..=a)
                    .map(|b| {
                        if a == b {
                            Complex64::new(1.0, 0.0)
                        } else if self.disk_of[a] == self.disk_of[b] {
                            Complex64::new(0.0, 0.0)
                        } else {
                            displacement_overlap(&self.members[b], &self.members[a])
                        }
                    })
                    .collect()
            })
            .collect();
        let at = |a: usize, b: usize| if b <= a { g[a][b] } else { g[b][a].conj() };
        SymmetricMatrix::from_fn(2 * n, |i, j| {
            let (a, pa) = (i % n, i / n);
            let (b, pb) = (j % n, j / n);
            let z = at(a, b);
            match (pa, pb) {
                (0, 0) | (1, 1) => z.re,
                (1, 0) => z.im,
                _ => -z.im,
            }
        })
    }

    /// Conservative Gram matrix: unit diagonal, exact zeros within a disk and
    /// `-|⟨F_a, F_b⟩|` across disks.
    ///
    /// For any coefficients `c`, `‖Σ c_a F_a‖² ≥ |c|ᵀ G' |c|`, so
    /// `λ_min(G') ≤ λ_min` of the true Gram matrix.
    pub fn conservative_gram(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.size(), |i, j| {
            if i == j {
                1.0
            } else if self.disk_of[i] == self.disk_of[j] {
                0.0
            } else {
                -overlap_magnitude(&self.members[i], &self.members[j])
            }
        })
    }
}

/// Candidates whose squared distance to the chosen span falls below this are
/// never selected.
pub const MIN_RESIDUAL: f64 = 1e-3;

fn gram_min(cand: &[(usize, DisplacedMonomial, f64)], idx: &[usize]) -> Result<f64> {
    let fam = MonomialFamily {
        c: 0.0,
        members: idx.iter().map(|&i| cand[i].1).collect(),
        disk_of: idx.iter().map(|&i| cand[i].0).collect(),
        leakage: Vec::new(),
        capacity: 0,
    };
    Ok(sym_eigen(&fam.gram_embedding(), false)?.min())
}

const LOOKAHEAD: usize = 12;

/// Greedy selection of `n` candidates. Candidates are ranked by
/// `(Σ d + d_a) / min(λ, r_a)`, with `λ` the current smallest Gram eigenvalue
/// and `r_a` the squared distance of candidate `a` to the chosen span (from an
/// incremental Cholesky factor); the exact ratio `(Σ d + d_a) / λ_min` is then
/// computed for the leading [`LOOKAHEAD`] and the best is taken.
fn greedy_select(cand: &[(usize, DisplacedMonomial, f64)], n: usize) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut chol: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    // y[a] solves L y = v_a against the chosen members
    let mut y: Vec<Vec<Complex64>> = vec![Vec::new(); cand.len()];
    let mut resid: Vec<f64> = vec![1.0; cand.len()];
    let mut taken = vec![false; cand.len()];
    let (mut sum, mut lam) = (0.0, 1.0f64);
    while chosen.len() < n {
        let mut ranked: Vec<(f64, usize)> = (0..cand.len())
            .filter(|&a| !taken[a] && resid[a] >= MIN_RESIDUAL)
            .map(|a| ((sum + cand[a].2) / lam.min(resid[a]), a))
            .collect();
        if ranked.is_empty() {
            return Err(Error::Capacity { capacity: chosen.len(), requested: n });
        }
        ranked.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        // exact smallest eigenvalue for the leading few
        let mut best = (f64::INFINITY, ranked[0].1, lam);
        for &(_, a) in ranked.iter().take(LOOKAHEAD) {
            let l = if chosen.is_empty() {
                1.0
            } else {
                let mut idx = chosen.clone();
                idx.push(a);
                gram_min(cand, &idx)?
            };
            let score = (sum + cand[a].2) / l;
            if l > 0.0 && score < best.0 {
                best = (score, a, l);
            }
        }
        let (_, pick, lam_new) = best;
        taken[pick] = true;
        let mut row: Vec<Complex64> = y[pick].iter().map(|z| z.conj()).collect();
        let pivot = resid[pick].sqrt();
        row.push(Complex64::new(pivot, 0.0));
        lam = lam_new;
        sum += cand[pick].2;
        let (mp, fp, _) = cand[pick];
        for a in 0..cand.len() {
            if taken[a] {
                continue;
            }
            let (ma, fa, _) = cand[a];
            let v = if ma == mp { Complex64::new(0.0, 0.0) } else { displacement_overlap(&fp, &fa) };
            let acc = y[a].iter().zip(&row).fold(v, |acc, (ya, l)| acc - l * ya);
            let ynew = acc / pivot;
            resid[a] -= ynew.norm_sqr();
            y[a].push(ynew);
        }
        chol.push(row);
        chosen.push(pick);
    }
    Ok(chosen)
}

/// Builds the family on `sd` and selects `n` members.
///
/// Members are chosen greedily to keep `Σ d_a / λ_min(G)` small; candidates
/// closer than [`MIN_RESIDUAL`] (squared distance) to the chosen span are
/// skipped. The capacity error reports how many could be chosen.
pub fn build_monomial_family(sd: &ScaledDisks, n: usize) -> Result<MonomialFamily> {
    let degrees: Vec<u32> = sd.disks.iter().map(|d| (PI * d.radius * d.radius).floor() as u32).collect();
    let capacity: usize = degrees.iter().map(|&k| k as usize + 1).sum();
    if capacity < n {
        return Err(Error::Capacity { capacity, requested: n });
    }
    let side = sd.c.sqrt();
    let mut cand = Vec::with_capacity(capacity);
    for (m, (d, &top)) in sd.disks.iter().zip(&degrees).enumerate() {
        for k in 0..=top {
            let f = DisplacedMonomial::new(d.center, k);
            if f.degree_radius() > d.radius * (1.0 + 1e-12) {
                return Err(Error::Geometry(format!("degree {k} overflows disk {m} of radius {}", d.radius)));
            }
            cand.push((m, f, complement_concentration(&f, side)?));
        }
    }
    cand.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.k.cmp(&b.1.k)));
    let chosen = greedy_select(&cand, n)?;
    let mut cand: Vec<(usize, DisplacedMonomial, f64)> = chosen.into_iter().map(|i| cand[i]).collect();
    cand.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.k.cmp(&b.1.k)));
    Ok(MonomialFamily {
        c: sd.c,
        disk_of: cand.iter().map(|t| t.0).collect(),
        members: cand.iter().map(|t| t.1).collect(),
        leakage: cand.iter().map(|t| t.2).collect(),
        capacity,
    })
}
