//! Numerical checks of the inequalities used inside the proofs.

use crate::error::{Error, Result};
use crate::fock::{fock_spectrum, Domain, SampledFunction};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Both sides of an inequality `lhs ≤ rhs` and `slack = rhs - lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Inequality {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Inequality { lhs, rhs, slack: rhs - lhs }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol
    }
}

/// `|f(t)| ≤ 3^{1/3} ‖f‖^{2/3} sup|f'|^{1/3}` on the ray `[t, ∞)`, with the
/// samples at and beyond `t` standing in for the ray.
///
/// The norm is the trapezoid rule and `sup|f'|` the largest slope between
/// neighbouring samples, both exact for the piecewise-linear interpolant.
/// `t` must be a sample point and the spacing at most `1e-3` of the ray's
/// sampled length.
pub fn kolm_check(f: &SampledFunction, t: f64) -> Result<Inequality> {
    let h = f.h;
    if !(h > 0.0) || f.values.len() < 2 {
        return Err(Error::pre("kolm_check", "need at least two samples with positive spacing"));
    }
    let pos = (t - f.t0) / h;
    let i0 = pos.round();
    if (pos - i0).abs() > 1e-9 || i0 < 0.0 || i0 as usize >= f.values.len() - 1 {
        return Err(Error::pre("kolm_check", format!("t = {t} is not an interior sample point")));
    }
    let v = &f.values[i0 as usize..];
    let span = h * (v.len() - 1) as f64;
    if h > 1e-3 * span {
        return Err(Error::pre("kolm_check", format!("spacing {h} exceeds 1e-3 of the sampled ray length {span}")));
    }
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let norm_sq = h * (sq.iter().sum::<f64>() - 0.5 * (sq[0] + sq[sq.len() - 1]));
    let sup_d = v.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
    let rhs = 3f64.cbrt() * norm_sq.cbrt() * sup_d.cbrt();
    Ok(Inequality::new(v[0].abs(), rhs))
}

/// Roots of `Σ a_k z^k` (ascending coefficients) as eigenvalues of the
/// companion matrix, each polished by two Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.iter().rposition(|a| a.norm() > 0.0).unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let ev = m.schur().eigenvalues().ok_or(Error::NoConvergence { op: "poly_roots", iterations: 0 })?;
    let p = &coeffs[..=deg];
    Ok(ev
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..2 {
                let (v, d) = horner_with_derivative(p, z);
                if d.norm() > 0.0 {
                    z -= v / d;
                }
            }
            z
        })
        .collect())
}

fn horner_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in p.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// Trapezoid nodes on the circle in [`jensen_residual`].
pub const JENSEN_NODES: usize = 4096;

/// `|log|g(x₀)| - ∫₀¹ log|g(x₀ + R e^{2πit})| dt - Σ_{|x₀-z|<R} log(|x₀-z|/R)|`.
///
/// A root within `1e-9 R` of the circle moves `R` by `1e-9 R`, up to five
/// times.
pub fn jensen_residual(coeffs: &[Complex64], x0: Complex64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::pre("jensen_residual", format!("R must be positive, got {r}")));
    }
    let g = |z: Complex64| horner_with_derivative(coeffs, z).0;
    let at = g(x0);
    if at.norm() == 0.0 {
        return Err(Error::pre("jensen_residual", "the polynomial vanishes at the centre"));
    }
    let roots = poly_roots(coeffs)?;
    let mut rad = r;
    for _ in 0..5 {
        if roots.iter().all(|z| ((z - x0).norm() - rad).abs() > 1e-9 * rad) {
            let mean = (0..JENSEN_NODES)
                .map(|j| g(x0 + Complex64::from_polar(rad, TAU * j as f64 / JENSEN_NODES as f64)).norm().ln())
                .sum::<f64>()
                / JENSEN_NODES as f64;
            let inside: f64 = roots.iter().map(|z| (z - x0).norm()).filter(|&d| d < rad).map(|d| (d / rad).ln()).sum();
            return Ok((at.norm().ln() - mean - inside).abs());
        }
        rad *= 1.0 + 1e-9;
    }
    Err(Error::NoConvergence { op: "jensen_residual", iterations: 5 })
}

/// `(1/π)∫_{c/2}^∞ y/((t-x)² + y²) dt`, the Poisson mass of `[c/2, ∞)` seen
/// from `x + iy`.
pub fn poisson_tail(x: f64, y: f64, c: f64) -> f64 {
    y.atan2(0.5 * c - x) / PI
}

/// `μ_n ≤ (n-1)/n` for the square of area `n - 1`.
pub fn trace_bound_check(n: usize) -> Result<Inequality> {
    if n < 2 {
        return Err(Error::pre("trace_bound_check", format!("need n >= 2, got {n}")));
    }
    let area = (n - 1) as f64;
    let s = fock_spectrum(Domain::square_with_area(area), None)?;
    let mu = s.eigenvalue(n).ok_or_else(|| Error::pre("trace_bound_check", "spectrum shorter than n"))?;
    Ok(Inequality::new(mu, area / n as f64))
}
