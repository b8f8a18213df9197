//! Closed-form eigenvalue asymptotics and bounds, and empirical fits of the
//! constants in the envelope theorems.

use crate::error::{Error, Result};
use crate::numerics::{elliptic_e, integrate_adaptive, ln_factorial, phi_inverse};
use crate::spectrum::Spectrum;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lower end of the admissible `1 - eig` window for fits (the validity floor).
pub const FIT_WINDOW_LO: f64 = 1e-12;
/// Upper end of the admissible window; keeps samples out of the plunge region.
pub const FIT_WINDOW_HI: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    BonamiKaroui,
    LandauWidom,
    Karnik,
    Fuchs,
    LowerTime,
    UpperTime,
    LowerCoherent,
    UpperCoherent,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::BonamiKaroui,
        Theorem::LandauWidom,
        Theorem::Karnik,
        Theorem::Fuchs,
        Theorem::LowerTime,
        Theorem::UpperTime,
        Theorem::LowerCoherent,
        Theorem::UpperCoherent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::BonamiKaroui => "bonami-karoui",
            Theorem::LandauWidom => "landau-widom",
            Theorem::Karnik => "karnik",
            Theorem::Fuchs => "fuchs",
            Theorem::LowerTime => "lower-time",
            Theorem::UpperTime => "upper-time",
            Theorem::LowerCoherent => "lower-coherent",
            Theorem::UpperCoherent => "upper-coherent",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown theorem `{s}`"))
    }
}

/// One bound formula evaluated at `(n, c)`.
///
/// `value` is on the scale the theorem speaks about: an eigenvalue for
/// Bonami–Karoui and Landau–Widom, `1 - λ` for Fuchs, a count for Karnik,
/// and the envelope `E(n, c)` for the four envelope theorems (which state
/// `-log(1 - λ_n) ≍ E(n, c)` up to unknown constants). `log_scale_value` is
/// `-log λ` for the first two, `-log(1 - λ)` for Fuchs and the envelope itself
/// for the envelope theorems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub theorem: Theorem,
    pub n: usize,
    pub c: f64,
    pub value: f64,
    pub log_scale_value: f64,
    pub regime_ok: bool,
    pub reason: String,
}

/// Main term of the Bonami–Karoui approximation for the 0-based index `n`:
/// `exp(-π²(n+½)/2 ∫_{Φ(c/(n+½))}^1 dt/(t E(t)²))`.
///
/// The `O(log n)` correction is dropped. Defined for `n + ½ ≥ c`; the
/// theorem's regime is `n ≥ c ≥ 10`.
pub fn bonami_karoui(n: usize, c: f64) -> Result<BoundEvaluation> {
    if !(c > 0.0) {
        return Err(Error::pre("bonami_karoui", "c must be positive"));
    }
    let nh = n as f64 + 0.5;
    let u = c / nh;
    if u > 1.0 {
        return Err(Error::pre("bonami_karoui", format!("need n + 1/2 >= c, got n = {n}, c = {c}")));
    }
    let t0 = phi_inverse(u)?;
    let integral = if t0 >= 1.0 {
        0.0
    } else {
        integrate_adaptive(|t| 1.0 / (t * elliptic_e(t).expect("t in (0,1]").powi(2)), t0, 1.0, 1e-15, 1e-13)
    };
    let minus_log = 0.5 * PI * PI * nh * integral;
    let regime_ok = (n as f64) >= c && c >= 10.0;
    Ok(BoundEvaluation {
        theorem: Theorem::BonamiKaroui,
        n,
        c,
        value: (-minus_log).exp(),
        log_scale_value: minus_log,
        regime_ok,
        reason: if regime_ok { "n >= c >= 10".into() } else { "outside n >= c >= 10".into() },
    })
}

/// Landau–Widom limit `1/(1 + e^b)` with `b = π²(n - c)/log c`, 1-based `n`.
pub fn landau_widom(n: usize, c: f64) -> Result<BoundEvaluation> {
    if !(c > std::f64::consts::E) {
        return Err(Error::pre("landau_widom", format!("need c > e, got {c}")));
    }
    let b = PI * PI * (n as f64 - c) / c.ln();
    // 1/(1+e^b) and its negative log, both without overflow
    let minus_log = if b > 0.0 { b + (-b).exp().ln_1p() } else { b.exp().ln_1p() };
    Ok(BoundEvaluation {
        theorem: Theorem::LandauWidom,
        n,
        c,
        value: (-minus_log).exp(),
        log_scale_value: minus_log,
        regime_ok: true,
        reason: format!("b = {b:.6}"),
    })
}

/// Karnik's plunge bound `(2/π²) log(50c+25) log(5/(ε(1-ε))) + 7`.
pub fn karnik_bound(c: f64, eps: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::pre("karnik_bound", "c must be positive"));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::pre("karnik_bound", format!("eps must lie in (0, 1/2), got {eps}")));
    }
    Ok(2.0 / (PI * PI) * (50.0 * c + 25.0).ln() * (5.0 / (eps * (1.0 - eps))).ln() + 7.0)
}

/// Fuchs' asymptotic `4√2 (4π)^n/n! c^{n-½} e^{-πc}` for `1 - λ` at the
/// 0-based index `n0`, evaluated in log space.
pub fn fuchs(n0: usize, c: f64) -> f64 {
    fuchs_ln(n0, c).exp()
}

/// Natural log of [`fuchs`].
pub fn fuchs_ln(n0: usize, c: f64) -> f64 {
    let n = n0 as f64;
    (4.0 * 2f64.sqrt()).ln() + n * (4.0 * PI).ln() - ln_factorial(n0 as u64) + (n - 0.5) * c.ln() - PI * c
}

fn envelope_pre(op: &'static str, n: usize, c: f64) -> Result<()> {
    if n < 1 || !((n as f64) < c) {
        return Err(Error::pre(op, format!("need 1 <= n < c, got n = {n}, c = {c}")));
    }
    Ok(())
}

/// `(c - n)/log(2c/(c - n))`.
pub fn time_envelope(n: usize, c: f64) -> Result<f64> {
    envelope_pre("time_envelope", n, c)?;
    let g = c - n as f64;
    Ok(g / (2.0 * c / g).ln())
}

/// `(√c - √n)²`.
pub fn coherent_envelope(n: usize, c: f64) -> Result<f64> {
    envelope_pre("coherent_envelope", n, c)?;
    Ok((c.sqrt() - (n as f64).sqrt()).powi(2))
}

/// Hypothesis of each envelope theorem at `(n, c)`, with its cap.
pub fn regime(theorem: Theorem, n: usize, c: f64) -> (bool, String) {
    let nf = n as f64;
    let (cap, text) = match theorem {
        Theorem::LowerTime => (c, "n < c".to_string()),
        Theorem::UpperTime => (c - c.ln().powi(2), "n < c - log²c".to_string()),
        Theorem::LowerCoherent => (c - c.powf(0.99), "n < c - c^0.99".to_string()),
        Theorem::UpperCoherent => (c - (c * c.ln()).sqrt(), "n < c - √(c log c)".to_string()),
        _ => return (true, String::new()),
    };
    let ok = nf >= 1.0 && nf < cap;
    (ok, format!("{} ({text}, cap {cap:.3})", if ok { "holds" } else { "fails" }))
}

/// Envelope value for one of the four envelope theorems, with its regime flag.
pub fn envelope_bound(theorem: Theorem, n: usize, c: f64) -> Result<BoundEvaluation> {
    let value = match theorem {
        Theorem::LowerTime | Theorem::UpperTime => time_envelope(n, c)?,
        Theorem::LowerCoherent | Theorem::UpperCoherent => coherent_envelope(n, c)?,
        other => return Err(Error::pre("envelope_bound", format!("{} is not an envelope theorem", other.name()))),
    };
    let (regime_ok, reason) = regime(theorem, n, c);
    Ok(BoundEvaluation { theorem, n, c, value, log_scale_value: value, regime_ok, reason })
}

/// Fuchs as a [`BoundEvaluation`] for the 1-based index `n`.
pub fn fuchs_bound(n: usize, c: f64) -> Result<BoundEvaluation> {
    if n < 1 {
        return Err(Error::pre("fuchs", "n is 1-based"));
    }
    let l = fuchs_ln(n - 1, c);
    let regime_ok = c >= 3.0;
    Ok(BoundEvaluation {
        theorem: Theorem::Fuchs,
        n,
        c,
        value: l.exp(),
        log_scale_value: -l,
        regime_ok,
        reason: if regime_ok { "c >= 3, fixed n".into() } else { "c < 3".into() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    Time,
    Coherent,
}

impl Envelope {
    pub fn eval(self, n: usize, c: f64) -> Result<f64> {
        match self {
            Envelope::Time => time_envelope(n, c),
            Envelope::Coherent => coherent_envelope(n, c),
        }
    }

    /// Regime used to admit fit samples. For the coherent envelope the
    /// `n < c - c^0.99` cap of the lower theorem is empty at desk scale, so
    /// the upper theorem's `n < c - √(c log c)` is used.
    fn admits(self, n: usize, c: f64) -> bool {
        match self {
            Envelope::Time => regime(Theorem::LowerTime, n, c).0,
            Envelope::Coherent => regime(Theorem::UpperCoherent, n, c).0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSample {
    pub c: f64,
    pub n: usize,
    pub minus_log_one_minus_eig: f64,
    pub ratio: f64,
}

/// Empirical bracket `[η̂, κ̂]` of `-log(1 - eig)/envelope(n, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub envelope: Envelope,
    pub samples: Vec<FitSample>,
    pub eta_hat: f64,
    pub kappa_hat: f64,
    pub spread: f64,
}

/// Ratios `-log(1 - eig_n)/envelope(n, c)` over every admissible sample.
///
/// A sample is admitted when `1e-12 ≤ 1 - eig ≤ 1e-2` and the envelope's
/// regime holds.
pub fn fit_constants(spectra: &[Spectrum], envelope: Envelope) -> Result<FitResult> {
    if spectra.len() < 2 {
        return Err(Error::pre("fit_constants", "need at least two spectra"));
    }
    let mut samples = Vec::new();
    for s in spectra {
        for n in 1..=s.len() {
            let d = s.complements[n - 1];
            if !(FIT_WINDOW_LO..=FIT_WINDOW_HI).contains(&d) || !envelope.admits(n, s.c) {
                continue;
            }
            let e = envelope.eval(n, s.c)?;
            let m = -d.ln();
            samples.push(FitSample { c: s.c, n, minus_log_one_minus_eig: m, ratio: m / e });
        }
    }
    if samples.is_empty() {
        return Err(Error::pre("fit_constants", "no admissible samples"));
    }
    let eta_hat = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let kappa_hat = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(FitResult { envelope, samples, eta_hat, kappa_hat, spread: kappa_hat / eta_hat })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: usize,
    pub one_minus_lambda: f64,
    pub one_minus_mu: f64,
    /// `(1 - μ_n)/(1 - λ_n)`.
    pub ratio: f64,
    /// Both values at or above the validity floor.
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub c: f64,
    pub rows: Vec<SeparationRow>,
    /// `1 - λ_n ≤ 1 - μ_n` on every trusted row, and at least one trusted row.
    pub holds: bool,
}

/// Side-by-side `1 - λ_n` (interval pair) and `1 - μ_n` (square) at the same `c`.
pub fn separation_report(prolate: &Spectrum, fock: &Spectrum, n_list: &[usize]) -> Result<SeparationReport> {
    if (prolate.c - fock.c).abs() > 1e-12 * prolate.c {
        return Err(Error::pre("separation_report", "spectra must share c"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (Some(l), Some(m)) = (prolate.one_minus(n), fock.one_minus(n)) else {
            return Err(Error::pre("separation_report", format!("index {n} outside the spectra")));
        };
        let trusted = prolate.is_trusted(n) && fock.is_trusted(n);
        rows.push(SeparationRow { n, one_minus_lambda: l, one_minus_mu: m, ratio: m / l, trusted });
    }
    let trusted: Vec<&SeparationRow> = rows.iter().filter(|r| r.trusted).collect();
    let holds = !trusted.is_empty() && trusted.iter().all(|r| r.one_minus_lambda <= r.one_minus_mu);
    Ok(SeparationReport { c: prolate.c, rows, holds })
}
