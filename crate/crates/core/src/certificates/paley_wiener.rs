//! Band-limited trial functions built on a Whitney grid.

use super::whitney::{GridVariant, WhitneyGrid};
use crate::error::{Error, Result};
use crate::numerics::{composite_gauss, erf, gauss_legendre, integrate_adaptive, QuadratureRule, SymmetricMatrix};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Half-width added around `[-c/2, c/2]` for the Gram quadrature.
pub const GRAM_MARGIN: f64 = 40.0;

thread_local! {
    static HALF_RULES: RefCell<HashMap<usize, QuadratureRule>> = RefCell::new(HashMap::new());
}

/// Gauss–Legendre rule of `order` on `[0, 1]`, cached per thread.
fn with_unit_rule<R>(order: usize, f: impl FnOnce(&QuadratureRule) -> R) -> R {
    HALF_RULES.with(|cache| {
        let mut cache = cache.borrow_mut();
        let rule = cache.entry(order).or_insert_with(|| gauss_legendre(order, 0.0, 1.0).expect("order >= 1"));
        f(rule)
    })
}

/// Nodes on the full interval `[-T/2, T/2]`: 64 plus 16 per period of
/// `e^{-2πixt}`, plus enough to resolve the Gaussian when `TW` is large.
fn ftw_order(t_len: f64, w: f64, t: f64) -> usize {
    let periods = (t_len * t.abs()).ceil() as usize;
    let gauss = (t_len * w).sqrt().ceil() as usize;
    let full = 64 + 16 * periods + 8 * gauss;
    full.div_ceil(32) * 16
}

/// `f_{T,W}(t) = ∫_{-T/2}^{T/2} e^{-πx²W/T} e^{-2πixt} dx`.
///
/// The transform of an even function is real, so only the cosine half
/// `2∫_0^{T/2}` is integrated.
pub fn f_tw(t_len: f64, w: f64, t: f64) -> Result<f64> {
    if !(t_len > 0.0 && w > 0.0) || t_len * w < 1.0 {
        return Err(Error::pre("f_tw", format!("need T, W > 0 and TW >= 1, got T = {t_len}, W = {w}")));
    }
    Ok(ftw_raw(t_len, w, t))
}

fn ftw_raw(t_len: f64, w: f64, t: f64) -> f64 {
    let a = PI * w / t_len;
    let h = 0.5 * t_len;
    with_unit_rule(ftw_order(t_len, w, t), |q| {
        let mut s = 0.0;
        for (u, wt) in q.nodes.iter().zip(&q.weights) {
            let x = h * u;
            s += wt * (-a * x * x).exp() * (2.0 * PI * x * t).cos();
        }
        2.0 * h * s
    })
}

/// `f_{T,W}(0) = √(T/W) erf(√(πTW)/2)`.
pub fn f_tw_at_zero(t_len: f64, w: f64) -> f64 {
    (t_len / w).sqrt() * erf(0.5 * (PI * t_len * w).sqrt())
}

/// `∫ |f_{T,W}|² = √(T/(2W)) erf(√(πTW/2))` by Plancherel.
pub fn f_tw_mass(t_len: f64, w: f64) -> f64 {
    (0.5 * t_len / w).sqrt() * erf((0.5 * PI * t_len * w).sqrt())
}

/// The four inequalities for `f_{T,W}` with measured left-hand sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtwChecks {
    pub t_len: f64,
    pub w: f64,
    /// `∫_{|t|>W/2} |f|²` and its bound `√(T/W) 10 e^{-πTW/2}`.
    pub tail_mass: f64,
    pub tail_bound: f64,
    /// `∫ |f|²` and its bound `√(T/W)`.
    pub total_mass: f64,
    pub total_bound: f64,
    /// `f(0)` and its bound `√(T/W)/10`.
    pub value_at_zero: f64,
    pub zero_bound: f64,
    /// `max |f(t)| / f(0)` over a uniform grid.
    pub sup_ratio: f64,
    pub grid_points: usize,
}

impl FtwChecks {
    pub fn tail_ok(&self) -> bool {
        self.tail_mass <= self.tail_bound
    }
    pub fn total_ok(&self) -> bool {
        self.total_mass <= self.total_bound
    }
    pub fn zero_ok(&self) -> bool {
        self.value_at_zero >= self.zero_bound
    }
    pub fn sup_ok(&self) -> bool {
        self.sup_ratio <= 1.0 + 1e-12
    }
    pub fn all_hold(&self) -> bool {
        self.tail_ok() && self.total_ok() && self.zero_ok() && self.sup_ok()
    }
}

/// Measures both sides of the four `f_{T,W}` inequalities.
///
/// The tail mass is the closed-form total minus `∫_{-W/2}^{W/2} |f|²`; the
/// supremum is taken on `grid_points` uniform points of `[-5W, 5W]`.
pub fn ftw_checks(t_len: f64, w: f64, grid_points: usize) -> Result<FtwChecks> {
    f_tw(t_len, w, 0.0)?;
    let total = f_tw_mass(t_len, w);
    // f is band-limited to |ξ| ≤ T/2, so |f|² has period ≥ 1/T: 16 nodes per unit of T·t
    let panels = ((t_len * w).ceil() as usize).max(4) * 2;
    let inner = composite_gauss(16, -0.5 * w, 0.5 * w, panels)?.integrate(|t| ftw_raw(t_len, w, t).powi(2));
    let f0 = ftw_raw(t_len, w, 0.0);
    let m = grid_points.max(2);
    let mut sup: f64 = 0.0;
    for i in 0..m {
        let t = -5.0 * w + 10.0 * w * i as f64 / (m - 1) as f64;
        sup = sup.max(ftw_raw(t_len, w, t).abs());
    }
    let s = (t_len / w).sqrt();
    Ok(FtwChecks {
        t_len,
        w,
        tail_mass: (total - inner).max(0.0),
        tail_bound: s * 10.0 * (-0.5 * PI * t_len * w).exp(),
        total_mass: total,
        total_bound: s,
        value_at_zero: f0,
        zero_bound: 0.1 * s,
        sup_ratio: sup / f0,
        grid_points: m,
    })
}

/// `f_p(x) = sinc(π(x-p)/γ) g(x-p) h(x-p)` with `g = f_{δ,W_g}/f_{δ,W_g}(0)`
/// and `h = f_{δ,W_h}/f_{δ,W_h}(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PWFunction {
    pub p: f64,
    /// Signed band index.
    pub k: i32,
    pub gamma: f64,
    /// `(1 - 1/γ)/2`.
    pub delta: f64,
    pub c: f64,
    /// Concentration scale of `g` (the trim scale, at least `1/δ`).
    pub w_g: f64,
    /// Concentration scale of `h`: `c/2^|k|`.
    pub w_h: f64,
}

impl PWFunction {
    pub fn new(p: f64, k: i32, gamma: f64, c: f64, trim: f64) -> Self {
        let delta = 0.5 * (1.0 - 1.0 / gamma);
        let w_g = trim.max(1.0 / delta);
        let w_h = (c / 2f64.powi(k.abs())).max(1.0 / delta);
        PWFunction { p, k, gamma, delta, c, w_g, w_h }
    }

    fn g0(&self) -> f64 {
        f_tw_at_zero(self.delta, self.w_g)
    }

    fn h0(&self) -> f64 {
        f_tw_at_zero(self.delta, self.w_h)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.p;
        let s = PI * u / self.gamma;
        let sinc = if s.abs() < 1e-12 { 1.0 } else { s.sin() / s };
        sinc * ftw_raw(self.delta, self.w_g, u) / self.g0() * ftw_raw(self.delta, self.w_h, u) / self.h0()
    }

    /// Half-width of the Fourier support: `1/(2γ) + δ/2 + δ/2`.
    pub fn support_radius(&self) -> f64 {
        0.5 / self.gamma + self.delta
    }

    /// `‖f_p‖²` from the Fourier side.
    ///
    /// `f̂_p = γ χ_{[-b,b]} * φ_g * φ_h / (g(0) h(0))` with `b = 1/(2γ)` and
    /// `φ(x) = e^{-πx²W/δ}` on `[-δ/2, δ/2]`. The Gaussian convolution
    /// `u = φ_g * φ_h` has an erf closed form; the box convolution `U` is
    /// constant on `|ξ| ≤ b - δ` and vanishes beyond `b + δ`.
    pub fn norm_sq(&self) -> f64 {
        let d = self.delta;
        let (al, be) = (PI * self.w_g / d, PI * self.w_h / d);
        let s = al + be;
        let rs = s.sqrt();
        let u = |eta: f64| {
            let (lo, hi) = if eta >= 0.0 { (eta - 0.5 * d, 0.5 * d) } else { (-0.5 * d, eta + 0.5 * d) };
            if hi <= lo {
                return 0.0;
            }
            // φ_g(y) φ_h(η - y) = e^{-αβη²/s} e^{-s(y - m)²}, m = βη/s
            let m = be * eta / s;
            (-al * be * eta * eta / s).exp() * 0.5 * (PI / s).sqrt() * (erf(rs * (hi - m)) - erf(rs * (lo - m)))
        };
        let tol = 1e-15;
        let half_total = integrate_adaptive(u, 0.0, d, 1e-300, tol);
        let total = 2.0 * half_total;
        let b = 0.5 / self.gamma;
        // U(ξ) on the transition ξ ∈ [b - δ, b + δ] is ∫_{ξ-b}^{δ} u
        let big_u = |xi: f64| {
            let a = xi - b;
            if a >= 0.0 {
                integrate_adaptive(u, a, d, 1e-300, tol)
            } else {
                integrate_adaptive(u, a, 0.0, 1e-300, tol) + half_total
            }
        };
        let flat = 2.0 * (b - d) * total * total;
        let edge = 2.0
            * (integrate_adaptive(|xi| big_u(xi).powi(2), b - d, b, 1e-300, tol)
                + integrate_adaptive(|xi| big_u(xi).powi(2), b, b + d, 1e-300, tol));
        let scale = self.gamma / (self.g0() * self.h0());
        scale * scale * (flat + edge)
    }
}

/// The trial family of a lower-variant grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PWFamily {
    pub c: f64,
    pub n: usize,
    pub members: Vec<PWFunction>,
    /// Largest `|f_p(q)|` over chosen `p ≠ q` in different bands.
    pub max_cross_band: f64,
    /// Largest `|f_p(q)|` over chosen `p ≠ q` in the same band.
    pub max_same_band: f64,
    /// Largest Fourier support radius over the members.
    pub max_support: f64,
}

/// One function per grid point, keeping the `n` points nearest the centre.
pub fn build_pw_family(g: &WhitneyGrid) -> Result<PWFamily> {
    if g.params.variant != GridVariant::Lower {
        return Err(Error::pre("build_pw_family", "needs a lower-variant grid"));
    }
    if g.count() < g.n {
        return Err(Error::Capacity { capacity: g.count(), requested: g.n });
    }
    let mut pts = g.points.clone();
    pts.sort_by(|a, b| a.x.abs().total_cmp(&b.x.abs()).then(a.x.total_cmp(&b.x)));
    pts.truncate(g.n);
    pts.sort_by(|a, b| a.x.total_cmp(&b.x));
    let members: Vec<PWFunction> = pts
        .iter()
        .map(|pt| PWFunction::new(pt.x, pt.band, g.gammas[pt.band.unsigned_abs() as usize - 1], g.c, g.trim))
        .collect();
    let max_support = members.iter().map(PWFunction::support_radius).fold(0.0, f64::max);
    if max_support > 0.5 + 1e-12 {
        return Err(Error::Geometry(format!("Fourier support radius {max_support} exceeds 1/2")));
    }
    let (mut cross, mut same) = (0.0f64, 0.0f64);
    for a in &members {
        for b in &members {
            if a.p == b.p {
                continue;
            }
            let v = a.eval(b.p).abs();
            if a.k == b.k {
                same = same.max(v);
            } else {
                cross = cross.max(v);
            }
        }
    }
    Ok(PWFamily { c: g.c, n: g.n, members, max_cross_band: cross, max_same_band: same, max_support })
}

/// Gram matrix and leaked masses of a PW family.
#[derive(Debug, Clone, PartialEq)]
pub struct PWGram {
    /// `∫_{|x| ≤ c/2 + GRAM_MARGIN} f_a f_b / (‖f_a‖ ‖f_b‖)`.
    pub gram: SymmetricMatrix,
    /// `‖f_a‖²`.
    pub norms_sq: Vec<f64>,
    /// `∫_{|x| > c/2} |f_a|² / ‖f_a‖²`.
    pub leakage: Vec<f64>,
}

/// Quadrature Gram matrix of the normalized family.
///
/// Panels of unit length with 16 Gauss nodes integrate `f_a f_b`, whose
/// spectrum lies in `[-1, 1]`, to rounding level. The part of the Gram
/// integral beyond the margin is a Gram matrix itself, hence positive
/// semidefinite, so truncating it can only lower the smallest eigenvalue.
pub fn pw_gram(fam: &PWFamily) -> Result<PWGram> {
    let c = fam.c;
    let h = 0.5 * c;
    let m = GRAM_MARGIN;
    let inside = composite_gauss(16, -h, h, c.ceil() as usize)?;
    let left = composite_gauss(16, -h - m, -h, m.ceil() as usize)?;
    let right = composite_gauss(16, h, h + m, m.ceil() as usize)?;
    let nodes: Vec<(f64, f64, bool)> = inside
        .nodes
        .iter()
        .zip(&inside.weights)
        .map(|(&x, &w)| (x, w, true))
        .chain(left.nodes.iter().zip(&left.weights).map(|(&x, &w)| (x, w, false)))
        .chain(right.nodes.iter().zip(&right.weights).map(|(&x, &w)| (x, w, false)))
        .collect();
    let k = fam.members.len();
    let norms_sq: Vec<f64> = fam.members.iter().map(PWFunction::norm_sq).collect();
    let mut rows = nalgebra::DMatrix::<f64>::zeros(k, nodes.len());
    let mut leakage = Vec::with_capacity(k);
    for (a, f) in fam.members.iter().enumerate() {
        let inv = 1.0 / norms_sq[a].sqrt();
        let mut inner = 0.0;
        for (i, &(x, w, is_in)) in nodes.iter().enumerate() {
            let v = f.eval(x) * inv;
            rows[(a, i)] = v * w.sqrt();
            if is_in {
                inner += w * v * v;
            }
        }
        leakage.push((1.0 - inner).max(0.0));
    }
    let g = &rows * rows.transpose();
    let gram = SymmetricMatrix::from_fn(k, |i, j| g[(i, j)]);
    Ok(PWGram { gram, norms_sq, leakage })
}
