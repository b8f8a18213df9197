//! Bargmann–Fock space machinery for the Gaussian localization operator.
//!
//! Functions live in the Fock space with weight `e^{-π|z|²}`, orthonormal basis
//! `√(π^k/k!) z^k`. Everything here is evaluated on the *weighted* functions
//! `F(z) e^{-π|z|²/2}`, whose squared modulus is the mass density of `F`.
//! The localization operator `L_Q` becomes the Gram matrix of the weighted
//! monomials over `Q`.

use crate::error::{Error, Result};
use crate::numerics::{
    gauss_legendre, integrate_adaptive, ln_factorial, regularized_lower_gamma, regularized_upper_gamma, sym_eigen,
    SymmetricMatrix,
};
use crate::spectrum::{Spectrum, SpectrumKind};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Largest area accepted by [`fock_spectrum`] and [`square_matrix`].
pub const MAX_AREA: f64 = 300.0;

/// Tail test threshold on the mass of the last basis function inside `Q`.
pub const TAIL_TOL: f64 = 1e-14;

/// A phase-space region centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// Axis-aligned square `(-side/2, side/2)²`.
    Square { side: f64 },
    Disk { radius: f64 },
}

impl Domain {
    pub fn square_with_area(area: f64) -> Self {
        Domain::Square { side: area.sqrt() }
    }

    pub fn disk_with_area(area: f64) -> Self {
        Domain::Disk { radius: (area / PI).sqrt() }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Domain::Square { side } => side * side,
            Domain::Disk { radius } => PI * radius * radius,
        }
    }

    fn validate(&self, op: &'static str) -> Result<()> {
        let a = self.area();
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::pre(op, format!("domain area must be positive, got {a}")));
        }
        if a > MAX_AREA {
            return Err(Error::pre(op, format!("domain area {a} exceeds the cap {MAX_AREA}")));
        }
        Ok(())
    }
}

/// The function `T_w (√(π^k/k!) z^k)`: a weighted monomial moved to `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacedMonomial {
    pub w: Complex64,
    pub k: u32,
}

impl DisplacedMonomial {
    pub fn new(w: Complex64, k: u32) -> Self {
        DisplacedMonomial { w, k }
    }

    /// Radius `√(k/π)` of the disk where the mass of `e_k` peaks.
    pub fn degree_radius(&self) -> f64 {
        (self.k as f64 / PI).sqrt()
    }

    /// Weighted value `T_w e_k(z) e^{-π|z|²/2} = e_k(z - w) e^{iπ Im(z w̄)}`,
    /// with `e_k` the weighted monomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let phase = PI * (z * self.w.conj()).im;
        weighted_monomial(self.k, z - self.w) * Complex64::from_polar(1.0, phase)
    }
}

/// Basis size rule `⌈c + 8√(c log c)⌉ + 16`.
pub fn auto_basis_size(area: f64) -> usize {
    let l = area.ln().max(0.0);
    (area + 8.0 * (area * l).sqrt()).ceil() as usize + 16
}

/// `√(π^k/k!) z^k e^{-π|z|²/2}` through its log-modulus and phase.
pub fn weighted_monomial(k: u32, z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    let kf = k as f64;
    let ln_mod = 0.5 * kf * PI.ln() - 0.5 * ln_factorial(k as u64) + kf * r.ln() - 0.5 * PI * r * r;
    Complex64::from_polar(ln_mod.exp(), kf * z.arg())
}

/// Values of `e_0(z), …, e_n(z)` by the recurrence `e_k = e_{k-1} z √(π/k)`,
/// falling back to the log path when `e_0` underflows.
fn monomial_column(n: usize, z: Complex64, out: &mut [Complex64]) {
    let v0 = (-0.5 * PI * z.norm_sqr()).exp();
    if v0 < 1e-280 {
        for (k, o) in out.iter_mut().enumerate().take(n + 1) {
            *o = weighted_monomial(k as u32, z);
        }
        return;
    }
    let mut v = Complex64::new(v0, 0.0);
    out[0] = v;
    for (k, o) in out.iter_mut().enumerate().take(n + 1).skip(1) {
        v = v * z * (PI / k as f64).sqrt();
        *o = v;
    }
}

/// A point set with positive weights approximating integration over a
/// region of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneQuadrature {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl PlaneQuadrature {
    /// Tensor Gauss–Legendre rule of `order` per axis on `[-side/2, side/2]²`.
    pub fn square(side: f64, order: usize) -> Result<Self> {
        let g = gauss_legendre(order, -0.5 * side, 0.5 * side)?;
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (x, wx) in g.nodes.iter().zip(&g.weights) {
            for (y, wy) in g.nodes.iter().zip(&g.weights) {
                points.push(Complex64::new(*x, *y));
                weights.push(wx * wy);
            }
        }
        Ok(PlaneQuadrature { points, weights })
    }

    /// Gauss–Legendre in `r` times the trapezoid rule in angle on the disk of
    /// the given radius; exact in angle for frequencies below `angles`.
    pub fn disk(radius: f64, radial_order: usize, angles: usize) -> Result<Self> {
        if angles == 0 {
            return Err(Error::pre("PlaneQuadrature::disk", "need at least one angle"));
        }
        let g = gauss_legendre(radial_order, 0.0, radius)?;
        let dth = TAU / angles as f64;
        let mut points = Vec::with_capacity(radial_order * angles);
        let mut weights = Vec::with_capacity(radial_order * angles);
        for (r, wr) in g.nodes.iter().zip(&g.weights) {
            for m in 0..angles {
                points.push(Complex64::from_polar(*r, m as f64 * dth));
                weights.push(wr * r * dth);
            }
        }
        Ok(PlaneQuadrature { points, weights })
    }

    pub fn integrate(&self, mut f: impl FnMut(Complex64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}

const CHUNK: usize = 2048;

/// Accumulates `Σ_p w_p Re(v_p v_pᴴ)` restricted to each index set in
/// `blocks`, where `v_p` holds `e_0(z_p), …, e_n(z_p)`.
///
/// Each point contributes two real rank-1 terms (real and imaginary parts),
/// batched into matrix products.
fn accumulate_real_gram(points: &[Complex64], weights: &[f64], n: usize, blocks: &[Vec<usize>]) -> Vec<DMatrix<f64>> {
    let mut out: Vec<DMatrix<f64>> = blocks.iter().map(|b| DMatrix::zeros(b.len(), b.len())).collect();
    let mut col = vec![Complex64::new(0.0, 0.0); n + 1];
    for (pts, wts) in points.chunks(CHUNK).zip(weights.chunks(CHUNK)) {
        let rows = 2 * pts.len();
        let mut mats: Vec<DMatrix<f64>> = blocks.iter().map(|b| DMatrix::zeros(rows, b.len())).collect();
        for (p, (z, w)) in pts.iter().zip(wts).enumerate() {
            monomial_column(n, *z, &mut col);
            let sw = w.sqrt();
            for (mat, idx) in mats.iter_mut().zip(blocks) {
                for (c, &k) in idx.iter().enumerate() {
                    mat[(2 * p, c)] = sw * col[k].re;
                    mat[(2 * p + 1, c)] = sw * col[k].im;
                }
            }
        }
        for (acc, mat) in out.iter_mut().zip(&mats) {
            let t = mat.transpose();
            acc.gemm(1.0, &t, mat, 1.0);
        }
    }
    out
}

fn to_symmetric(m: &DMatrix<f64>) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// `Re ∫ e_j conj(e_k)` for `j, k ≤ n` under a plane quadrature rule.
///
/// For regions symmetric under `z ↦ z̄` the imaginary part vanishes and this
/// is the Galerkin matrix of `L_Q` on the first `n + 1` basis functions.
pub fn galerkin_matrix(rule: &PlaneQuadrature, n: usize) -> SymmetricMatrix {
    let all: Vec<usize> = (0..=n).collect();
    let m = accumulate_real_gram(&rule.points, &rule.weights, n, &[all]);
    to_symmetric(&m[0])
}

/// Galerkin matrix of `L_Q` for a square together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    pub matrix: SymmetricMatrix,
    pub c: f64,
    /// Highest basis degree; the matrix has dimension `n + 1`.
    pub n: usize,
    pub quadrature_order: usize,
    /// Whether `n` meets the truncation rule [`auto_basis_size`].
    pub adequate: bool,
}

impl SquareMatrix {
    /// Largest `|M(j, k)|` with `j - k ≢ 0 (mod 4)`.
    pub fn max_off_block(&self) -> f64 {
        let d = self.matrix.dim();
        let mut worst = 0.0_f64;
        for j in 0..d {
            for k in 0..j {
                if (j - k) % 4 != 0 {
                    worst = worst.max(self.matrix.get(j, k).abs());
                }
            }
        }
        worst
    }
}

fn square_order(n: usize) -> usize {
    n + 32
}

/// Full Galerkin matrix of `L_Q` on the square of area `c`, basis degrees
/// `0..=n`, by rank-1 accumulation over a tensor Gauss–Legendre grid of order
/// `n + 32` per axis.
///
/// Nothing about the block structure is assumed here, so the mod-4 sparsity
/// of the result is a genuine check. `adequate` records whether `n` meets the
/// truncation rule; the spectrum routine refuses inadequate sizes.
pub fn square_matrix(c: f64, n: usize) -> Result<SquareMatrix> {
    Domain::square_with_area(c).validate("square_matrix")?;
    let q = square_order(n);
    let rule = PlaneQuadrature::square(c.sqrt(), q)?;
    Ok(SquareMatrix {
        matrix: galerkin_matrix(&rule, n),
        c,
        n,
        quadrature_order: q,
        adequate: n >= auto_basis_size(c),
    })
}

/// The four blocks `{k ≡ r (mod 4)}` of the square Galerkin matrix.
///
/// Rotation by `i` maps the square to itself, so only entries with
/// `j ≡ k (mod 4)` survive and each equals four times its integral over the
/// quadrant `[0, s/2]²`; the swap `x ↔ y` halves the quadrant once more.
#[cfg(test)]
fn square_blocks(c: f64, n: usize) -> Result<Vec<(Vec<usize>, SymmetricMatrix)>> {
    square_blocks_with_order(c, n, square_order(n))
}

fn square_blocks_with_order(c: f64, n: usize, order: usize) -> Result<Vec<(Vec<usize>, SymmetricMatrix)>> {
    let half = 0.5 * c.sqrt();
    let g = gauss_legendre(order, 0.0, half)?;
    let q = g.len();
    let mut points = Vec::with_capacity(q * (q + 1) / 2);
    let mut weights = Vec::with_capacity(q * (q + 1) / 2);
    for a in 0..q {
        for b in a..q {
            points.push(Complex64::new(g.nodes[a], g.nodes[b]));
            let sym = if a == b { 1.0 } else { 2.0 };
            weights.push(4.0 * sym * g.weights[a] * g.weights[b]);
        }
    }
    let blocks: Vec<Vec<usize>> = (0..4).map(|r| (r..=n).step_by(4).collect()).collect();
    let mats = accumulate_real_gram(&points, &weights, n, &blocks);
    Ok(blocks.into_iter().zip(mats.iter().map(to_symmetric)).filter(|(b, _)| !b.is_empty()).collect())
}

/// Spectrum of `L_Q` for a square or disk centred at the origin.
///
/// Squares: the four mod-4 blocks of the Galerkin matrix are solved
/// independently (as `I - M`, for accuracy near 1) and merged. The
/// convergence flag is the tail test: the mass of the last basis function
/// inside the square must be at most [`TAIL_TOL`].
///
/// Disks: the Hermite functions are the eigenfunctions, so the values are
/// `P(k+1, πR²)` with complements `Q(k+1, πR²)` in closed form.
pub fn fock_spectrum(domain: Domain, n: Option<usize>) -> Result<Spectrum> {
    fock_spectrum_impl(domain, n, None)
}

#[doc(hidden)]
pub fn fock_spectrum_impl(domain: Domain, n: Option<usize>, order: Option<usize>) -> Result<Spectrum> {
    domain.validate("fock_spectrum")?;
    let area = domain.area();
    let n = n.unwrap_or_else(|| auto_basis_size(area));
    match domain {
        Domain::Disk { radius } => {
            let x = PI * radius * radius;
            let comps = (0..=n)
                .map(|k| regularized_upper_gamma(k as f64 + 1.0, x))
                .collect::<Result<Vec<f64>>>()?;
            let tail = regularized_lower_gamma(n as f64 + 1.0, x)?;
            Ok(Spectrum::from_complements(SpectrumKind::FockDisk, area, comps, n, tail <= TAIL_TOL, tail))
        }
        Domain::Square { .. } => {
            let need = auto_basis_size(area);
            if n < need {
                return Err(Error::pre(
                    "fock_spectrum",
                    format!("basis size {n} is below the truncation rule {need} for area {area}"),
                ));
            }
            let blocks = square_blocks_with_order(area, n, order.unwrap_or_else(|| square_order(n)))?;
            let mut comps = Vec::with_capacity(n + 1);
            let mut tail = 0.0;
            for (idx, m) in &blocks {
                if idx.last() == Some(&n) {
                    tail = m.get(idx.len() - 1, idx.len() - 1);
                }
                comps.extend(sym_eigen(&m.identity_minus(), false)?.eigenvalues);
            }
            Ok(Spectrum::from_complements(SpectrumKind::FockSquare, area, comps, n, tail <= TAIL_TOL, tail))
        }
    }
}

/// `⟨T_{w_a} e_{k_a}, T_{w_b} e_{k_b}⟩` in the Fock space.
///
/// With `β = w_b - w_a`, `T_{-a} T_b = e^{iπ Im(a b̄)} T_β`, and the Taylor
/// coefficients of `T_β e_s` give, for `k ≤ s`,
/// `⟨T_β e_s, e_k⟩ = √(k!/s!) (-√π β)^{s-k} e^{-π|β|²/2} L_k^{(s-k)}(π|β|²)`
/// and, for `k ≥ s`, `√(s!/k!) (√π β̄)^{k-s} e^{-π|β|²/2} L_s^{(k-s)}(π|β|²)`.
/// The modulus is computed in logarithms.
pub fn displacement_overlap(a: &DisplacedMonomial, b: &DisplacedMonomial) -> Complex64 {
    let beta = b.w - a.w;
    let x = PI * beta.norm_sqr();
    let (k, s) = (a.k, b.k);
    let (lo, hi) = (k.min(s), k.max(s));
    let lag = crate::numerics::laguerre_assoc(lo, hi - lo, x);
    if lag == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let d = (hi - lo) as f64;
    let ln_mod = 0.5 * (ln_factorial(lo as u64) - ln_factorial(hi as u64))
        + if d > 0.0 { d * (0.5 * PI.ln() + beta.norm().ln()) } else { 0.0 }
        - 0.5 * x
        + lag.abs().ln();
    // phase of ⟨T_β e_s, e_k⟩
    let base = if k <= s { -beta } else { beta.conj() };
    let mut phase = if d > 0.0 { d * base.arg() } else { 0.0 };
    if lag < 0.0 {
        phase += PI;
    }
    let c_k = Complex64::from_polar(ln_mod.exp(), phase);
    let pre = Complex64::from_polar(1.0, -PI * (a.w * b.w.conj()).im);
    pre * c_k.conj()
}

/// `|⟨T_{w_a} e_{k_a}, T_{w_b} e_{k_b}⟩|`.
pub fn overlap_magnitude(a: &DisplacedMonomial, b: &DisplacedMonomial) -> f64 {
    displacement_overlap(a, b).norm()
}

/// `∫_{|z| > √(k/π)+R} √(π^k/k!) |z|^k e^{-π|z|²/2} dz` by adaptive radial
/// quadrature in `t = r - √(k/π) - R`.
pub fn tail_amplitude_integral(k: u32, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::pre("tail_amplitude_integral", format!("R must be at least 1, got {r}")));
    }
    let kf = k as f64;
    let r0 = (kf / PI).sqrt() + r;
    let c0 = 0.5 * kf * PI.ln() - 0.5 * ln_factorial(k as u64) + TAU.ln();
    let f = |t: f64| {
        let rr = r0 + t;
        (c0 + (kf + 1.0) * rr.ln() - 0.5 * PI * rr * rr).exp()
    };
    // the integrand is below e^{-700} relative beyond this span
    let span = 40.0_f64.max(2.0 * r0);
    Ok(integrate_adaptive(f, 0.0, span, 1e-300, 1e-14))
}

/// The tail bound `(2 + 2√k) e^{-πR²/2}`.
pub fn tail_amplitude_bound(k: u32, r: f64) -> f64 {
    (2.0 + 2.0 * (k as f64).sqrt()) * (-0.5 * PI * r * r).exp()
}

/// Distance from `w` to the boundary of `(-h, h)²` along direction `phi`.
fn exit_distance(w: Complex64, h: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let tx = if c > 0.0 {
        (h - w.re) / c
    } else if c < 0.0 {
        (-h - w.re) / c
    } else {
        f64::INFINITY
    };
    let ty = if s > 0.0 {
        (h - w.im) / s
    } else if s < 0.0 {
        (-h - w.im) / s
    } else {
        f64::INFINITY
    };
    tx.min(ty).max(0.0)
}

/// Mass of `T_w e_k` outside the square of side `side`.
///
/// In polar coordinates about `w` the mass density is radial with
/// cumulative profile `P(k+1, πρ²)`, so the outside mass is
/// `(1/2π) ∫ Q(k+1, π ρ(φ)²) dφ` with `ρ(φ)` the exit distance along `φ`.
/// The angle integral is split at the four corner directions, where `ρ` has
/// kinks. No subtraction from 1 takes place.
pub fn complement_concentration(a: &DisplacedMonomial, side: f64) -> Result<f64> {
    if !(side > 0.0) {
        return Err(Error::pre("complement_concentration", "side must be positive"));
    }
    let h = 0.5 * side;
    let rk = a.degree_radius();
    let slack = 1e-12 * side;
    let (x, y) = (a.w.re, a.w.im);
    if x.abs() + rk > h + slack || y.abs() + rk > h + slack {
        return Err(Error::Geometry(format!(
            "degree disk of radius {rk:.6} at ({x:.6}, {y:.6}) leaves the square of side {side:.6}"
        )));
    }
    let s = a.k as f64 + 1.0;
    let mut cuts: Vec<f64> = [(h, h), (-h, h), (-h, -h), (h, -h)]
        .iter()
        .map(|&(cx, cy)| (cy - y).atan2(cx - x).rem_euclid(TAU))
        .collect();
    cuts.push(0.0);
    cuts.push(TAU);
    cuts.sort_by(|p, q| p.total_cmp(q));
    let mut total = 0.0;
    for win in cuts.windows(2) {
        if win[1] - win[0] <= 0.0 {
            continue;
        }
        total += integrate_adaptive(
            |phi| {
                let rho = exit_distance(a.w, h, phi);
                regularized_upper_gamma(s, PI * rho * rho).expect("positive shape")
            },
            win[0],
            win[1],
            1e-17,
            1e-13,
        );
    }
    Ok((total / TAU).clamp(0.0, 1.0))
}

/// A real-line function sampled on a uniform grid `t0 + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn from_fn(t0: f64, t1: f64, h: f64, f: impl Fn(f64) -> f64) -> Self {
        let n = ((t1 - t0) / h).round() as usize + 1;
        SampledFunction { t0, h, values: (0..n).map(|i| f(t0 + i as f64 * h)).collect() }
    }

    pub fn norm(&self) -> f64 {
        (self.h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// Value of a Bargmann transform plus the truncation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargmannValue {
    pub value: Complex64,
    /// Squared samples at the two grid ends; large values mean the grid cuts
    /// off mass.
    pub truncation_mass: f64,
    pub truncated: bool,
}

/// `Bf(z) = 2^{1/4} ∫ f(t) e^{2πtz - πz²/2 - πt²} dt` by the trapezoid rule,
/// which is spectrally accurate for the Gaussian-damped integrand.
pub fn bargmann_transform(f: &SampledFunction, z: Complex64) -> Result<BargmannValue> {
    if !(f.h > 0.0 && f.h <= 0.01) {
        return Err(Error::pre("bargmann_transform", format!("grid spacing must lie in (0, 0.01], got {}", f.h)));
    }
    if f.values.len() < 2 {
        return Err(Error::pre("bargmann_transform", "need at least two samples"));
    }
    let last = f.values.len() - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in f.values.iter().enumerate() {
        let t = f.t0 + i as f64 * f.h;
        let w = if i == 0 || i == last { 0.5 } else { 1.0 };
        let e = (2.0 * PI * t * z - 0.5 * PI * z * z - Complex64::new(PI * t * t, 0.0)).exp();
        acc += w * v * e;
    }
    let truncation_mass = f.values[0].powi(2) + f.values[last].powi(2);
    Ok(BargmannValue {
        value: 2f64.powf(0.25) * f.h * acc,
        truncation_mass,
        truncated: truncation_mass > 1e-10,
    })
}
