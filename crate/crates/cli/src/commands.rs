use crate::args::{BoundsArgs, CertifyArgs, SpectrumArgs};
use crate::cache::{Cache, CacheKey, Lookup};
use crate::error::{CliError, CliResult};
use crate::output::{flag, json, num, Csv};
use crate::plot::{self, Series};
use crate::Report;
use locspec::bounds::{bonami_karoui, envelope_bound, fuchs_bound, karnik_bound, landau_widom, BoundEvaluation, Theorem};
use locspec::certificates::{coherent_certificate, time_certificate, Target};
use locspec::fock::{fock_spectrum, Domain};
use locspec::prolate::prolate_spectrum;
use locspec::{Spectrum, SpectrumKind};
use serde::Serialize;

pub fn precondition(op: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Core(locspec::Error::Precondition { op, reason: reason.into() })
}

/// Converged spectrum through the cache; an unconverged one is an error
/// naming the failed test.
pub fn load_spectrum(cache: &Cache, kind: SpectrumKind, c: f64, disc: Option<usize>) -> CliResult<Spectrum> {
    let key = CacheKey::new(kind, c, disc);
    let (lookup, s) = cache.get_or_compute(&key, || {
        Ok(match kind {
            SpectrumKind::Prolate => prolate_spectrum(c, disc)?,
            SpectrumKind::FockSquare => fock_spectrum(Domain::square_with_area(c), disc)?,
            SpectrumKind::FockDisk => fock_spectrum(Domain::disk_with_area(c), disc)?,
        })
    })?;
    match lookup {
        Lookup::Hit => eprintln!("cache hit: {} c = {c}", kind.name()),
        Lookup::Miss => eprintln!("computed: {} c = {c}", kind.name()),
        Lookup::Invalid => eprintln!("cache entry invalid, recomputed: {} c = {c}", kind.name()),
    }
    if !s.converged {
        let test = match kind {
            SpectrumKind::Prolate => format!(
                "doubling test failed: top eigenvalues moved by {:e} between orders {} and {}",
                s.convergence_gap,
                s.discretization,
                2 * s.discretization
            ),
            _ => format!(
                "tail test failed: the last basis function keeps {:e} of its mass inside the domain (N = {})",
                s.convergence_gap, s.discretization
            ),
        };
        return Err(CliError::Convergence(test));
    }
    Ok(s)
}

/// Number of leading eigenvalues reported for `c`.
pub fn report_rows(c: f64) -> usize {
    (c.ceil() as usize + 8).next_power_of_two()
}

#[derive(Serialize)]
struct SpectrumRow {
    n: usize,
    eigenvalue: f64,
    one_minus: f64,
    trusted: bool,
}

#[derive(Serialize)]
struct SpectrumBody<'a> {
    kind: &'a str,
    c: f64,
    discretization: usize,
    validity_floor: f64,
    converged: bool,
    convergence_gap: f64,
    trace: f64,
    rows: Vec<SpectrumRow>,
}

pub fn spectrum(a: &SpectrumArgs, cache: &Cache, json_out: bool) -> CliResult<Report> {
    let disc = match a.kind {
        SpectrumKind::Prolate => {
            if a.basis.is_some() {
                return Err(precondition("spectrum", "--N applies to Fock domains; use --m for prolate"));
            }
            a.m
        }
        _ => {
            if a.m.is_some() {
                return Err(precondition("spectrum", "--m applies to prolate; use --N for Fock domains"));
            }
            a.basis
        }
    };
    let s = load_spectrum(cache, a.kind, a.c, disc)?;
    let k = report_rows(a.c).min(s.len());
    let rows: Vec<SpectrumRow> = (1..=k)
        .map(|n| SpectrumRow {
            n,
            eigenvalue: s.eigenvalue(n).unwrap(),
            one_minus: s.one_minus(n).unwrap(),
            trusted: s.is_trusted(n),
        })
        .collect();
    let series = vec![Series::new("1 - eigenvalue", rows.iter().map(|r| (r.n as f64, r.one_minus)).collect())];
    let svg = plot::render(&format!("{} spectrum, c = {}", a.kind.name(), a.c), "n", "1 - eigenvalue", &series);
    let text = if json_out {
        json(
            "spectrum",
            &SpectrumBody {
                kind: a.kind.name(),
                c: s.c,
                discretization: s.discretization,
                validity_floor: s.validity_floor,
                converged: s.converged,
                convergence_gap: s.convergence_gap,
                trace: s.trace(),
                rows,
            },
        )?
    } else {
        let mut t = Csv::new(&["n", "eigenvalue", "one_minus", "trusted", "converged"]);
        t.meta("kind", a.kind.name())
            .meta("c", num(s.c))
            .meta("discretization", s.discretization)
            .meta("validity_floor", num(s.validity_floor))
            .meta("convergence_gap", num(s.convergence_gap))
            .meta("trace", num(s.trace()))
            .meta("units", "n is a 1-based index; eigenvalue and one_minus are dimensionless")
            .meta("flags", "one_minus is computed directly; trusted = 0 marks values below the validity floor");
        for r in &rows {
            t.row(vec![r.n.to_string(), num(r.eigenvalue), num(r.one_minus), flag(r.trusted), flag(s.converged)]);
        }
        t.render()
    };
    Ok(Report { text, svg: Some(svg), failure: None })
}

#[derive(Serialize)]
struct BoundRow {
    theorem: Theorem,
    n: Option<usize>,
    c: f64,
    eps: Option<f64>,
    value: f64,
    log_scale_value: Option<f64>,
    regime_ok: bool,
    reason: String,
}

impl From<BoundEvaluation> for BoundRow {
    fn from(b: BoundEvaluation) -> Self {
        BoundRow {
            theorem: b.theorem,
            n: Some(b.n),
            c: b.c,
            eps: None,
            value: b.value,
            log_scale_value: Some(b.log_scale_value),
            regime_ok: b.regime_ok,
            reason: b.reason,
        }
    }
}

#[derive(Serialize)]
struct BoundsBody {
    rows: Vec<BoundRow>,
}

fn bound_rows(a: &BoundsArgs) -> CliResult<Vec<BoundRow>> {
    if a.theorem == Theorem::Karnik {
        let eps = a.eps.ok_or_else(|| precondition("bounds", "karnik needs --eps"))?;
        let value = karnik_bound(a.c, eps)?;
        return Ok(vec![BoundRow {
            theorem: Theorem::Karnik,
            n: None,
            c: a.c,
            eps: Some(eps),
            value,
            log_scale_value: None,
            regime_ok: true,
            reason: "count of eigenvalues in (eps, 1 - eps)".into(),
        }]);
    }
    let range = a.n.ok_or_else(|| precondition("bounds", format!("{} needs --n", a.theorem.name())))?;
    range
        .iter()
        .map(|n| {
            let b = match a.theorem {
                Theorem::BonamiKaroui => {
                    let mut b = bonami_karoui(n - 1, a.c)?;
                    b.n = n;
                    b.reason = format!("{}; 0-based index {}", b.reason, n - 1);
                    b
                }
                Theorem::LandauWidom => landau_widom(n, a.c)?,
                Theorem::Fuchs => fuchs_bound(n, a.c)?,
                t => envelope_bound(t, n, a.c)?,
            };
            Ok(b.into())
        })
        .collect()
}

pub fn bounds(a: &BoundsArgs, json_out: bool) -> CliResult<Report> {
    let rows = bound_rows(a)?;
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.n.map(|n| (n as f64, r.value))).collect();
    let svg = (!pts.is_empty())
        .then(|| plot::render(&format!("{}, c = {}", a.theorem.name(), a.c), "n", "value", &[Series::new(a.theorem.name(), pts)]));
    let text = if json_out {
        json("bounds", &BoundsBody { rows })?
    } else {
        let mut t = Csv::new(&["theorem", "n", "c", "eps", "value", "log_scale_value", "regime_ok", "reason"]);
        t.meta("units", "value is an eigenvalue (bonami-karoui, landau-widom), 1 - eigenvalue (fuchs), a count (karnik) or an envelope")
            .meta("flags", "regime_ok = 1 when the theorem's hypotheses hold at (n, c)");
        for r in &rows {
            t.row(vec![
                r.theorem.name().to_string(),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                num(r.c),
                r.eps.map(num).unwrap_or_default(),
                num(r.value),
                r.log_scale_value.map(num).unwrap_or_default(),
                flag(r.regime_ok),
                r.reason.clone(),
            ]);
        }
        t.render()
    };
    Ok(Report { text, svg, failure: None })
}

pub fn certify(a: &CertifyArgs, json_out: bool) -> CliResult<Report> {
    let cert = match a.target {
        Target::MuLower => coherent_certificate(a.c, a.n)?,
        Target::LambdaLower => time_certificate(a.c, a.n)?,
    };
    let failure = (cert.sound == Some(false)).then(|| {
        CliError::Soundness(format!(
            "certified bound {} exceeds the computed eigenvalue {}",
            cert.certified_bound,
            cert.direct_eigenvalue.unwrap_or(f64::NAN)
        ))
    });
    let text = if json_out {
        #[derive(Serialize)]
        struct Body<'a> {
            certificate: &'a locspec::certificates::Certificate,
        }
        json("certify", &Body { certificate: &cert })?
    } else {
        let mut t = Csv::new(&["field", "value"]);
        t.meta("target", cert.target.name()).meta("c", num(cert.c)).meta("n", cert.n);
        let mut put = |k: &str, v: String| t.row(vec![k.to_string(), v]);
        put("certified_bound", num(cert.certified_bound));
        put("gram_min_eig", num(cert.gram_min_eig));
        put("gram_residual", num(cert.gram_residual));
        put("concentration_sum", num(cert.concentration_sum));
        put("direct_eigenvalue", cert.direct_eigenvalue.map(num).unwrap_or_default());
        put("sound", cert.sound.map(flag).unwrap_or_default());
        for (k, v) in &cert.metrics {
            put(k, num(*v));
        }
        t.render()
    };
    Ok(Report { text, svg: None, failure })
}
