//! Min-max certificates and the inequality gadgets of the constructive proofs.
//!
//! A certificate is a trial family `F_1..F_n` together with the Gram matrix
//! `G_ab = ⟨F_b, F_a⟩` and the masses `d_a` of the normalized members outside
//! the localization region. For `f = Σ c_a F_a` the outside mass is at most
//! `(Σ|c_a|√d_a)² ≤ |c|² Σd_a`, while `‖f‖² ≥ λ_min(G)|c|²`. The concentration
//! of every `f` in the span is therefore at least `1 - Σd_a/λ_min(G)`, and the
//! min-max principle makes this a lower bound on the `n`-th eigenvalue.
//!
//! Rescaling the members does not change the span, so the bound
//! `1 - Σ(d_a/s_a²)/λ_min(S⁻¹GS⁻¹)` is valid for every positive `s`; the
//! builders try a small grid of scalings and keep the best.

pub mod gadgets;
pub mod monomial;
pub mod packing;
pub mod paley_wiener;
pub mod whitney;

pub use gadgets::{jensen_residual, kolm_check, poisson_tail, poly_roots, trace_bound_check, Inequality};
pub use monomial::{build_monomial_family, MonomialFamily};
pub use packing::{pack_disks, scale_packing, Disk, DiskPacking, ScaledDisks};
pub use paley_wiener::{build_pw_family, f_tw, ftw_checks, pw_gram, FtwChecks, PWFamily, PWFunction, PWGram};
pub use whitney::{whitney_grid, whitney_grid_with, Band, GridPoint, GridVariant, Trim, WhitneyGrid, WhitneyParams};

use crate::error::{Error, Result};
use crate::fock::{fock_spectrum, Domain};
use crate::numerics::{sym_eigen, SymmetricMatrix};
use crate::prolate::prolate_spectrum;
use crate::spectrum::Spectrum;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Largest family accepted by [`gram_matrix`].
pub const MAX_FAMILY: usize = 1500;

/// Soundness tolerance: `certified_bound ≤ eigenvalue + SOUNDNESS_TOL`.
pub const SOUNDNESS_TOL: f64 = 1e-10;

/// Largest `c` accepted by [`coherent_certificate`].
pub const MAX_COHERENT_C: f64 = 200.0;

/// Largest `c` accepted by [`time_certificate`].
pub const MAX_TIME_C: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Lower bound on `μ_n(c)` for the square of area `c`.
    MuLower,
    /// Lower bound on `λ_n(c)` for the interval pair.
    LambdaLower,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::MuLower => "mu-lower",
            Target::LambdaLower => "lambda-lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub target: Target,
    pub c: f64,
    pub n: usize,
    /// Smallest eigenvalue of the (rescaled) Gram matrix, less its residual.
    pub gram_min_eig: f64,
    /// `max |G v - λ v|` of the computed eigenpairs.
    pub gram_residual: f64,
    /// `Σ d_a / s_a²` for the chosen scaling.
    pub concentration_sum: f64,
    /// `1 - concentration_sum / gram_min_eig`.
    pub certified_bound: f64,
    pub direct_eigenvalue: Option<f64>,
    /// `certified_bound ≤ direct_eigenvalue + SOUNDNESS_TOL`, when compared.
    pub sound: Option<bool>,
    /// Diagnostics of the construction.
    pub metrics: BTreeMap<String, f64>,
}

impl Certificate {
    /// Compares against `λ_n` (or `μ_n`) of `s` and records the outcome.
    pub fn check(&mut self, s: &Spectrum) -> Option<bool> {
        let eig = s.eigenvalue(self.n)?;
        self.direct_eigenvalue = Some(eig);
        self.sound = Some(self.certified_bound <= eig + SOUNDNESS_TOL);
        self.sound
    }
}

/// Gram matrix and leaked masses of a trial family.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    /// Real symmetric; a complex Gram matrix is stored as its `2n` real
    /// embedding.
    pub matrix: SymmetricMatrix,
    /// `d_a` for the `n` normalized members.
    pub leakage: Vec<f64>,
}

impl GramData {
    fn copies(&self) -> usize {
        self.matrix.dim() / self.leakage.len().max(1)
    }
}

/// A family of unit-norm trial functions.
pub trait TrialFamily {
    fn size(&self) -> usize;
    fn gram(&self) -> Result<GramData>;
}

impl TrialFamily for MonomialFamily {
    fn size(&self) -> usize {
        self.members.len()
    }

    fn gram(&self) -> Result<GramData> {
        Ok(GramData { matrix: self.gram_embedding(), leakage: self.leakage.clone() })
    }
}

impl TrialFamily for PWFamily {
    fn size(&self) -> usize {
        self.members.len()
    }

    fn gram(&self) -> Result<GramData> {
        let g = pw_gram(self)?;
        Ok(GramData { matrix: g.gram, leakage: g.leakage })
    }
}

/// The Gram matrix of `fam`, for families of at most [`MAX_FAMILY`] members.
pub fn gram_matrix(fam: &impl TrialFamily) -> Result<SymmetricMatrix> {
    if fam.size() > MAX_FAMILY {
        return Err(Error::pre("gram_matrix", format!("family size {} exceeds {MAX_FAMILY}", fam.size())));
    }
    Ok(fam.gram()?.matrix)
}

/// Result of the scaling search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBound {
    pub bound: f64,
    pub min_eig: f64,
    pub residual: f64,
    pub sum: f64,
    /// Exponent `p` and floor of the weights `s_a² = max((d_a/d_max)^p, floor)`.
    pub power: f64,
    pub floor: f64,
}

const POWERS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const FLOORS: [f64; 5] = [1e-4, 1e-3, 1e-2, 0.1, 0.3];

/// Best bound over the scalings `s_a² = max((d_a/d_max)^p, floor)`.
///
/// The winner's smallest eigenvalue is recomputed with eigenvectors and
/// lowered by the pair residual before it enters the bound.
pub fn best_scaling(data: &GramData) -> Result<ScaledBound> {
    let n = data.leakage.len();
    if n == 0 || data.matrix.dim() != n * data.copies() {
        return Err(Error::pre("best_scaling", "Gram matrix and leakage sizes disagree"));
    }
    let dmax = data.leakage.iter().cloned().fold(0.0, f64::max);
    let scaled = |p: f64, floor: f64| -> (Vec<f64>, SymmetricMatrix) {
        let w: Vec<f64> = data
            .leakage
            .iter()
            .map(|&d| if p == 0.0 || dmax == 0.0 { 1.0 } else { (d / dmax).powf(p).max(floor) })
            .collect();
        let m = SymmetricMatrix::from_fn(data.matrix.dim(), |i, j| data.matrix.get(i, j) / (w[i % n] * w[j % n]).sqrt());
        (w, m)
    };
    let mut best: Option<(f64, f64, f64)> = None;
    for &p in &POWERS {
        for &floor in &FLOORS {
            if p == 0.0 && floor != FLOORS[0] {
                continue;
            }
            let (w, m) = scaled(p, floor);
            let lam = sym_eigen(&m, false)?.min();
            if !(lam > 0.0) {
                continue;
            }
            let sum: f64 = data.leakage.iter().zip(&w).map(|(d, w)| d / w).sum();
            let b = 1.0 - sum / lam;
            if best.is_none_or(|(bb, _, _)| b > bb) {
                best = Some((b, p, floor));
            }
        }
    }
    let (_, power, floor) =
        best.ok_or_else(|| Error::Geometry("Gram matrix is singular under every scaling".into()))?;
    let (w, m) = scaled(power, floor);
    let ev = sym_eigen(&m, true)?;
    let min_eig = ev.min() - ev.residual;
    if !(min_eig > 0.0) {
        return Err(Error::Geometry(format!("Gram matrix is not positive definite (λ_min = {:e})", ev.min())));
    }
    let sum: f64 = data.leakage.iter().zip(&w).map(|(d, w)| d / w).sum();
    Ok(ScaledBound { bound: 1.0 - sum / min_eig, min_eig, residual: ev.residual, sum, power, floor })
}

fn assemble(target: Target, c: f64, n: usize, data: &GramData, mut metrics: BTreeMap<String, f64>) -> Result<Certificate> {
    let plain = sym_eigen(&data.matrix, false).map_err(|e| e.in_stage("gram"))?.min();
    let s = best_scaling(data).map_err(|e| e.in_stage("concentration"))?;
    let raw_sum: f64 = data.leakage.iter().sum();
    metrics.insert("unscaled_min_eig".into(), plain);
    metrics.insert("unscaled_leakage_sum".into(), raw_sum);
    metrics.insert("unscaled_bound".into(), 1.0 - raw_sum / plain);
    metrics.insert("max_leakage".into(), data.leakage.iter().cloned().fold(0.0, f64::max));
    metrics.insert("scaling_power".into(), s.power);
    metrics.insert("scaling_floor".into(), s.floor);
    Ok(Certificate {
        target,
        c,
        n,
        gram_min_eig: s.min_eig,
        gram_residual: s.residual,
        concentration_sum: s.sum,
        certified_bound: s.bound,
        direct_eigenvalue: None,
        sound: None,
        metrics,
    })
}

/// Lower bound on `μ_n(c)` from displaced monomials in a scaled disk packing.
///
/// The packing deficiency is `1 - (n/c)^{1/5}`, so `n` must leave it at least
/// [`packing::MIN_EPS`]. The bound is compared against the square spectrum.
pub fn coherent_certificate(c: f64, n: usize) -> Result<Certificate> {
    if n == 0 || !(c > n as f64) || c > MAX_COHERENT_C {
        return Err(Error::pre("coherent_certificate", format!("need 1 <= n < c <= {MAX_COHERENT_C}, got n = {n}, c = {c}")));
    }
    let eps = 1.0 - (n as f64 / c).powf(0.2);
    if eps < packing::MIN_EPS {
        return Err(Error::pre(
            "coherent_certificate",
            format!("packing deficiency 1 - (n/c)^(1/5) = {eps:.4} is below {}", packing::MIN_EPS),
        ));
    }
    let p = pack_disks(eps).map_err(|e| e.in_stage("packing"))?;
    let sd = scale_packing(&p, c, n).map_err(|e| e.in_stage("scaling"))?;
    let fam = build_monomial_family(&sd, n).map_err(|e| e.in_stage("family"))?;
    let data = fam.gram().map_err(|e| e.in_stage("gram"))?;
    let conservative = sym_eigen(&fam.conservative_gram(), false).map_err(|e| e.in_stage("gram"))?.min();
    let metrics = BTreeMap::from([
        ("packing_eps".to_string(), eps),
        ("packing_disks".to_string(), p.disks.len() as f64),
        ("packing_coverage".to_string(), p.coverage),
        ("theta".to_string(), sd.theta),
        ("scaled_area".to_string(), sd.total_area),
        ("min_gap".to_string(), sd.min_gap),
        ("gap_bound".to_string(), sd.gap_bound),
        ("family_capacity".to_string(), fam.capacity as f64),
        ("disks_used".to_string(), {
            let mut d = fam.disk_of.clone();
            d.dedup();
            d.len() as f64
        }),
        ("conservative_min_eig".to_string(), conservative),
    ]);
    let mut cert = assemble(Target::MuLower, c, n, &data, metrics)?;
    if let Ok(s) = fock_spectrum(Domain::square_with_area(c), None) {
        cert.check(&s);
    }
    Ok(cert)
}

/// Lower bound on `λ_n(c)` from band-limited functions on a lower Whitney
/// grid. The bound is compared against the prolate spectrum.
pub fn time_certificate(c: f64, n: usize) -> Result<Certificate> {
    if n == 0 || !(c > n as f64) || c > MAX_TIME_C {
        return Err(Error::pre("time_certificate", format!("need 1 <= n < c <= {MAX_TIME_C}, got n = {n}, c = {c}")));
    }
    let g = whitney_grid(c, n, GridVariant::Lower).map_err(|e| e.in_stage("grid"))?;
    let fam = build_pw_family(&g).map_err(|e| e.in_stage("family"))?;
    let data = fam.gram().map_err(|e| e.in_stage("gram"))?;
    let metrics = BTreeMap::from([
        ("grid_r".to_string(), g.r),
        ("grid_depth".to_string(), g.l as f64),
        ("grid_points".to_string(), g.count() as f64),
        ("max_cross_band".to_string(), fam.max_cross_band),
        ("max_same_band".to_string(), fam.max_same_band),
        ("max_support".to_string(), fam.max_support),
    ]);
    let mut cert = assemble(Target::LambdaLower, c, n, &data, metrics)?;
    if let Ok(s) = prolate_spectrum(c, None) {
        cert.check(&s);
    }
    Ok(cert)
}
