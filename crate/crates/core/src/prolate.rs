//! Spectrum of the time-frequency localization operator for an interval pair.
//!
//! Time is normalized to `I = [-1/2, 1/2]` and frequency to `J = [-c/2, c/2]`;
//! the eigenvalues depend on the product `c = |I||J|` only. On `I` the operator
//! is the integral operator with kernel `sin(πc(x-y))/(π(x-y))`, discretized
//! by the symmetric Nyström method on a Gauss–Legendre rule.

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, sym_eigen, QuadratureRule, SymmetricMatrix};
use crate::spectrum::{Spectrum, SpectrumKind};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `c` accepted by [`prolate_spectrum`].
pub const MAX_C: f64 = 400.0;

/// Top-eigenvalue movement allowed by the doubling test.
pub const DOUBLING_TOL: f64 = 1e-10;

/// `sin(πc(x-y))/(π(x-y))`, equal to `c` on the diagonal.
pub fn sinc_kernel(c: f64, x: f64, y: f64) -> f64 {
    let d = x - y;
    if d.abs() <= 1e-14 {
        c
    } else {
        (PI * c * d).sin() / (PI * d)
    }
}

/// Smallest admissible Nyström order for `c`.
pub fn min_order(c: f64) -> usize {
    32usize.max((4.0 * c).ceil() as usize)
}

/// Default Nyström order for `c`: `max(256, ⌈6c⌉)`.
pub fn auto_order(c: f64) -> usize {
    256usize.max((6.0 * c).ceil() as usize)
}

fn check_order(c: f64, m: usize) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::pre("assemble_nystrom", format!("c must be positive, got {c}")));
    }
    let floor = min_order(c);
    if m < floor {
        return Err(Error::pre(
            "assemble_nystrom",
            format!("order {m} is below the floor max(32, ceil(4c)) = {floor} for c = {c}"),
        ));
    }
    Ok(())
}

fn rule(m: usize) -> QuadratureRule {
    gauss_legendre(m, -0.5, 0.5).expect("order >= 32 on a proper interval")
}

/// Symmetric Nyström matrix `√(w_i w_j) K(x_i, x_j)` of order `m`.
pub fn assemble_nystrom(c: f64, m: usize) -> Result<SymmetricMatrix> {
    check_order(c, m)?;
    let q = rule(m);
    let sw: Vec<f64> = q.weights.iter().map(|w| w.sqrt()).collect();
    Ok(SymmetricMatrix::from_fn(m, |i, j| sw[i] * sw[j] * sinc_kernel(c, q.nodes[i], q.nodes[j])))
}

/// The even and odd blocks of `I - A`.
///
/// The Gauss–Legendre nodes are symmetric about 0 and the kernel satisfies
/// `K(-x, -y) = K(x, y)`, so `A` commutes with the reflection and splits into
/// blocks acting on `(e_i ± e_{i'})/√2`. A central node (odd `m`) joins the
/// even block.
fn parity_blocks(c: f64, m: usize) -> (SymmetricMatrix, SymmetricMatrix) {
    let q = rule(m);
    let half = m / 2;
    // positive nodes, ascending index into the rule
    let pos: Vec<usize> = (m - half..m).collect();
    let x: Vec<f64> = pos.iter().map(|&i| q.nodes[i]).collect();
    let sw: Vec<f64> = pos.iter().map(|&i| q.weights[i].sqrt()).collect();
    let odd = SymmetricMatrix::from_fn(half, |i, j| {
        let a = sw[i] * sw[j] * (sinc_kernel(c, x[i], x[j]) - sinc_kernel(c, x[i], -x[j]));
        if i == j {
            1.0 - a
        } else {
            -a
        }
    });
    let central = m % 2 == 1;
    let ne = half + usize::from(central);
    let w_mid = if central { q.weights[half] } else { 0.0 };
    let even = SymmetricMatrix::from_fn(ne, |i, j| {
        let a = if i == half {
            // central row: i == j == half here since j <= i
            if j == half {
                w_mid * c
            } else {
                std::f64::consts::SQRT_2 * (w_mid.sqrt()) * sw[j] * sinc_kernel(c, 0.0, x[j])
            }
        } else {
            sw[i] * sw[j] * (sinc_kernel(c, x[i], x[j]) + sinc_kernel(c, x[i], -x[j]))
        };
        if i == j {
            1.0 - a
        } else {
            -a
        }
    });
    (even, odd)
}

/// All eigenvalues of `I - A` at order `m`, ascending.
fn nystrom_complements(c: f64, m: usize) -> Result<Vec<f64>> {
    check_order(c, m)?;
    let (even, odd) = parity_blocks(c, m);
    let mut d = sym_eigen(&even, false)?.eigenvalues;
    if odd.dim() > 0 {
        d.extend(sym_eigen(&odd, false)?.eigenvalues);
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Eigenvalues `λ_n(c)` at Nyström order `m` (default [`auto_order`]).
///
/// The converged flag comes from re-solving at `2m`: the top `⌈2c⌉`
/// eigenvalues must move by at most [`DOUBLING_TOL`]. A failed test is
/// reported through the flag, never hidden.
pub fn prolate_spectrum(c: f64, m: Option<usize>) -> Result<Spectrum> {
    if !(c > 0.0 && c <= MAX_C) {
        return Err(Error::pre("prolate_spectrum", format!("c must lie in (0, {MAX_C}], got {c}")));
    }
    let m = m.unwrap_or_else(|| auto_order(c));
    let base = nystrom_complements(c, m)?;
    let fine = nystrom_complements(c, 2 * m)?;
    let top = ((2.0 * c).ceil() as usize).clamp(1, m);
    let gap = base.iter().zip(&fine).take(top).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Spectrum::from_complements(SpectrumKind::Prolate, c, base, m, gap <= DOUBLING_TOL, gap))
}

/// Eigenvalues at order `m` without the doubling test (`converged` is false).
pub fn prolate_spectrum_unchecked(c: f64, m: usize) -> Result<Spectrum> {
    let base = nystrom_complements(c, m)?;
    Ok(Spectrum::from_complements(SpectrumKind::Prolate, c, base, m, false, f64::NAN))
}

/// The plunge set `{n : ε < λ_n < 1 - ε}` of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlungeCount {
    pub c: f64,
    pub eps: f64,
    pub count: usize,
    /// 1-based index range; both zero when the set is empty.
    pub first_index: usize,
    pub last_index: usize,
}

/// Counts eigenvalues strictly inside `(ε, 1 - ε)`.
pub fn plunge_count(s: &Spectrum, eps: f64) -> Result<PlungeCount> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::pre("plunge_count", format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if !s.converged {
        return Err(Error::pre("plunge_count", "spectrum did not pass its convergence test"));
    }
    let inside: Vec<usize> = (1..=s.len())
        .filter(|&n| s.eigenvalues[n - 1] > eps && s.complements[n - 1] > eps)
        .collect();
    let (first_index, last_index) = match (inside.first(), inside.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0, 0),
    };
    debug_assert!(inside.is_empty() || inside.len() == last_index - first_index + 1);
    Ok(PlungeCount { c: s.c, eps, count: inside.len(), first_index, last_index })
}
