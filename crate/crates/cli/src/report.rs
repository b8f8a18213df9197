use crate::args::{Experiment, ReportArgs, Variant};
use crate::cache::Cache;
use crate::commands::{load_spectrum, precondition};
use crate::error::CliResult;
use crate::output::{flag, json, num, Csv};
use crate::plot::{self, Series};
use crate::Report;
use locspec::bounds::{fit_constants, karnik_bound, separation_report, Envelope, FitResult, SeparationReport};
use locspec::certificates::{
    ftw_checks, jensen_residual, kolm_check, poisson_tail, trace_bound_check, whitney_grid_with, GridVariant,
    WhitneyParams,
};
use locspec::fock::{tail_amplitude_bound, tail_amplitude_integral, SampledFunction};
use locspec::prolate::plunge_count;
use locspec::{Spectrum, SpectrumKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Maps `f` over `items` on a bounded pool of scoped threads, keeping order.
pub fn pool_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                out.lock().unwrap()[i] = Some(r);
            });
        }
    });
    out.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect()
}

fn spectra(cache: &Cache, kind: SpectrumKind, cs: &[f64]) -> CliResult<Vec<Spectrum>> {
    pool_map(cs, |&c| load_spectrum(cache, kind, c, None)).into_iter().collect()
}

fn or_default(v: &[f64], d: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        d.to_vec()
    } else {
        v.to_vec()
    }
}

pub fn run(a: &ReportArgs, cache: &Cache, json_out: bool) -> CliResult<Report> {
    match a.experiment {
        Experiment::FitTime => fit(a, cache, json_out, SpectrumKind::Prolate, Envelope::Time),
        Experiment::FitCoherent => fit(a, cache, json_out, SpectrumKind::FockSquare, Envelope::Coherent),
        Experiment::Separation => separation(a, cache, json_out),
        Experiment::Plunge => plunge(a, cache, json_out),
        Experiment::Gadgets => gadgets(a, json_out),
    }
}

fn fit(a: &ReportArgs, cache: &Cache, json_out: bool, kind: SpectrumKind, env: Envelope) -> CliResult<Report> {
    let cs = or_default(&a.c, &[60.0, 120.0, 240.0]);
    let ss = spectra(cache, kind, &cs)?;
    let fit = fit_constants(&ss, env)?;
    let mut series = Vec::new();
    for s in &ss {
        let pts = (1..=s.len())
            .filter(|&n| s.is_trusted(n) && (n as f64) < s.c)
            .map(|n| (n as f64, -s.one_minus(n).unwrap().ln()))
            .collect();
        series.push(Series::new(format!("c = {}", s.c), pts));
    }
    for s in &ss {
        for (label, k) in [("eta", fit.eta_hat), ("kappa", fit.kappa_hat)] {
            let pts = (1..s.c.ceil() as usize).filter_map(|n| env.eval(n, s.c).ok().map(|e| (n as f64, k * e))).collect();
            series.push(Series::new(format!("{label} E, c = {}", s.c), pts).dashed());
        }
    }
    let name = a.experiment.name();
    let svg = plot::render(name, "n", "-log(1 - eigenvalue)", &series);
    let text = if json_out {
        #[derive(Serialize)]
        struct Body<'a> {
            experiment: &'a str,
            fit: &'a FitResult,
        }
        json("report", &Body { experiment: name, fit: &fit })?
    } else {
        let mut t = Csv::new(&["c", "n", "minus_log_one_minus_eig", "envelope", "ratio"]);
        t.meta("experiment", name)
            .meta("spectra", kind.name())
            .meta("eta_hat", num(fit.eta_hat))
            .meta("kappa_hat", num(fit.kappa_hat))
            .meta("spread", num(fit.spread))
            .meta("units", "ratio = -log(1 - eigenvalue) / envelope(n, c)");
        for s in &fit.samples {
            t.row(vec![num(s.c), s.n.to_string(), num(s.minus_log_one_minus_eig), num(s.minus_log_one_minus_eig / s.ratio), num(s.ratio)]);
        }
        t.render()
    };
    Ok(Report { text, svg: Some(svg), failure: None })
}

fn separation(a: &ReportArgs, cache: &Cache, json_out: bool) -> CliResult<Report> {
    let cs = or_default(&a.c, &[144.0]);
    let [c] = cs[..] else {
        return Err(precondition("report separation", "takes a single --c"));
    };
    let ss = spectra(cache, SpectrumKind::Prolate, &[c])?;
    let fs = spectra(cache, SpectrumKind::FockSquare, &[c])?;
    let hi = (c.floor() as usize).max(1);
    let ns: Vec<usize> = match a.n {
        Some(r) => r.iter().collect(),
        None => (1..=hi).collect(),
    };
    let rep = separation_report(&ss[0], &fs[0], &ns)?;
    let series = vec![
        Series::new("1 - lambda (interval pair)", rep.rows.iter().map(|r| (r.n as f64, r.one_minus_lambda)).collect()),
        Series::new("1 - mu (square)", rep.rows.iter().map(|r| (r.n as f64, r.one_minus_mu)).collect()),
    ];
    let svg = plot::render(&format!("separation, c = {c}"), "n", "1 - eigenvalue", &series);
    let text = if json_out {
        #[derive(Serialize)]
        struct Body<'a> {
            experiment: &'a str,
            separation: &'a SeparationReport,
        }
        json("report", &Body { experiment: "separation", separation: &rep })?
    } else {
        let mut t = Csv::new(&["n", "one_minus_lambda", "one_minus_mu", "ratio", "trusted", "holds"]);
        t.meta("experiment", "separation")
            .meta("c", num(c))
            .meta("holds", flag(rep.holds))
            .meta("flags", "trusted = 0 when either value is below the validity floor; holds = 1 - lambda <= 1 - mu");
        for r in &rep.rows {
            t.row(vec![
                r.n.to_string(),
                num(r.one_minus_lambda),
                num(r.one_minus_mu),
                num(r.ratio),
                flag(r.trusted),
                flag(r.one_minus_lambda <= r.one_minus_mu),
            ]);
        }
        t.render()
    };
    Ok(Report { text, svg: Some(svg), failure: None })
}

#[derive(Serialize)]
struct PlungeRow {
    c: f64,
    eps: f64,
    count: usize,
    first_index: usize,
    last_index: usize,
    karnik_bound: f64,
    holds: bool,
}

fn plunge(a: &ReportArgs, cache: &Cache, json_out: bool) -> CliResult<Report> {
    let cs = or_default(&a.c, &[20.0, 100.0]);
    let eps = or_default(&a.eps, &[0.1, 0.01]);
    let ss = spectra(cache, SpectrumKind::Prolate, &cs)?;
    let mut rows = Vec::new();
    for s in &ss {
        for &e in &eps {
            let p = plunge_count(s, e)?;
            let k = karnik_bound(s.c, e)?;
            rows.push(PlungeRow {
                c: s.c,
                eps: e,
                count: p.count,
                first_index: p.first_index,
                last_index: p.last_index,
                karnik_bound: k,
                holds: p.count as f64 <= k,
            });
        }
    }
    let text = if json_out {
        #[derive(Serialize)]
        struct Body<'a> {
            experiment: &'a str,
            rows: &'a [PlungeRow],
        }
        json("report", &Body { experiment: "plunge", rows: &rows })?
    } else {
        let mut t = Csv::new(&["c", "eps", "count", "first_index", "last_index", "karnik_bound", "holds"]);
        t.meta("experiment", "plunge").meta("units", "count = #{n : eps < lambda_n < 1 - eps}; indices are 1-based");
        for r in &rows {
            t.row(vec![
                num(r.c),
                num(r.eps),
                r.count.to_string(),
                r.first_index.to_string(),
                r.last_index.to_string(),
                num(r.karnik_bound),
                flag(r.holds),
            ]);
        }
        t.render()
    };
    Ok(Report { text, svg: None, failure: None })
}

#[derive(Serialize)]
struct GadgetRow {
    gadget: &'static str,
    case: String,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

impl GadgetRow {
    /// `lhs ≤ rhs` up to a relative tolerance.
    fn le(gadget: &'static str, case: String, lhs: f64, rhs: f64, rel: f64) -> Self {
        GadgetRow { gadget, case, lhs, rhs, holds: lhs <= rhs + rel * rhs.abs() }
    }
}

fn gadget_rows(variant: Option<Variant>) -> CliResult<Vec<GadgetRow>> {
    let mut rows = Vec::new();
    for k in [0u32, 1, 2, 5, 10, 20, 40] {
        for r in [1.0, 1.5, 2.0, 3.0] {
            let lhs = tail_amplitude_integral(k, r)?;
            rows.push(GadgetRow::le("tail-amplitude", format!("k={k} R={r}"), lhs, tail_amplitude_bound(k, r), 1e-12));
        }
    }
    for (t, w) in [(1.0, 1.0), (4.0, 1.0), (1.0, 9.0), (3.0, 3.0)] {
        let q = ftw_checks(t, w, 10_000)?;
        let case = format!("T={t} W={w}");
        rows.push(GadgetRow::le("ftw-tail", case.clone(), q.tail_mass, q.tail_bound, 0.0));
        rows.push(GadgetRow::le("ftw-mass", case.clone(), q.total_mass, q.total_bound, 0.0));
        rows.push(GadgetRow::le("ftw-zero", case.clone(), q.zero_bound, q.value_at_zero, 0.0));
        rows.push(GadgetRow::le("ftw-sup", case, q.sup_ratio, 1.0, 1e-12));
    }
    let fs: [(&str, SampledFunction); 3] = [
        ("exp(-x)", SampledFunction::from_fn(0.0, 40.0, 1e-3, |x| (-x).exp())),
        ("zero", SampledFunction::from_fn(0.0, 1.0, 1e-4, |_| 0.0)),
        ("max(0,1-2x)", SampledFunction::from_fn(0.0, 2.0, 1e-4, |x| (1.0 - 2.0 * x).max(0.0))),
    ];
    for (name, f) in &fs {
        let q = kolm_check(f, 0.0)?;
        rows.push(GadgetRow { gadget: "kolmogorov", case: name.to_string(), lhs: q.lhs, rhs: q.rhs, holds: q.slack >= -1e-12 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..20 {
        let p: Vec<Complex64> = (0..7).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let x0 = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let r = rng.gen_range(0.5..2.0);
        let res = jensen_residual(&p, x0, r)?;
        rows.push(GadgetRow::le("jensen", format!("poly {i} r={r:.3}"), res, 1e-8, 0.0));
    }
    for c in [10.0, 100.0, 1000.0] {
        for y in [0.01, 0.1, 1.0, 10.0] {
            let worst = (0..=40)
                .map(|i| poisson_tail(0.5 * c + (-9.99 + 19.98 * i as f64 / 40.0) * y, y, c))
                .fold(f64::INFINITY, f64::min);
            rows.push(GadgetRow::le("poisson", format!("c={c} y={y}"), 1e-10, worst, 0.0));
        }
    }
    for n in [5usize, 20, 60] {
        let q = trace_bound_check(n)?;
        rows.push(GadgetRow { gadget: "trace-bound", case: format!("n={n}"), lhs: q.lhs, rhs: q.rhs, holds: q.slack >= -1e-9 });
    }
    for c in [512.0f64, 1024.0] {
        for gap in [c / 8.0, c / 16.0] {
            let n = (c - gap) as usize;
            if variant != Some(Variant::Upper) {
                let g = whitney_grid_with(c, n, WhitneyParams::desk(GridVariant::Lower))?;
                rows.push(GadgetRow::le("counting-lower", format!("c={c} n={n}"), n as f64, g.count() as f64, 0.0));
            }
            if variant != Some(Variant::Lower) {
                let g = whitney_grid_with(c, n, WhitneyParams::upper_with(2.0))?;
                let count = g.count() as f64;
                rows.push(GadgetRow { gadget: "counting-upper", case: format!("c={c} n={n}"), lhs: count, rhs: n as f64, holds: count < n as f64 });
            }
        }
    }
    Ok(rows)
}

fn gadgets(a: &ReportArgs, json_out: bool) -> CliResult<Report> {
    let rows = gadget_rows(a.variant)?;
    let all = rows.iter().all(|r| r.holds);
    let text = if json_out {
        #[derive(Serialize)]
        struct Body<'a> {
            experiment: &'a str,
            all_hold: bool,
            rows: &'a [GadgetRow],
        }
        json("report", &Body { experiment: "gadgets", all_hold: all, rows: &rows })?
    } else {
        let mut t = Csv::new(&["gadget", "case", "lhs", "rhs", "status"]);
        t.meta("experiment", "gadgets")
            .meta("all_hold", flag(all))
            .meta("units", "each row asserts lhs <= rhs (counting-upper asserts lhs < rhs)");
        for r in &rows {
            t.row(vec![r.gadget.into(), r.case.clone(), num(r.lhs), num(r.rhs), if r.holds { "PASS" } else { "FAIL" }.into()]);
        }
        t.render()
    };
    Ok(Report { text, svg: None, failure: None })
}
