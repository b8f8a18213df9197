use locspec::bounds::{
    bonami_karoui, coherent_envelope, fit_constants, fuchs_bound, karnik_bound, landau_widom, separation_report,
    time_envelope, Envelope,
};
use locspec::fock::{fock_spectrum, Domain};
use locspec::prolate::{plunge_count, prolate_spectrum};
use locspec::{Spectrum, SpectrumKind};

fn planted(c: f64, eta: f64, env: Envelope) -> Spectrum {
    let complements: Vec<f64> = (1..c as usize).map(|n| (-eta * env.eval(n, c).unwrap()).exp()).collect();
    Spectrum {
        kind: SpectrumKind::Prolate,
        c,
        eigenvalues: complements.iter().map(|d| 1.0 - d).collect(),
        complements,
        discretization: 0,
        validity_floor: 1e-12,
        converged: true,
        convergence_gap: 0.0,
    }
}

#[test]
fn planted_constant_recovered() {
    for env in [Envelope::Time, Envelope::Coherent] {
        let spectra = [planted(200.0, 2.0, env), planted(400.0, 2.0, env)];
        let fit = fit_constants(&spectra, env).unwrap();
        assert!(!fit.samples.is_empty());
        assert!((fit.eta_hat - 2.0).abs() < 1e-12 && (fit.kappa_hat - 2.0).abs() < 1e-12);
        assert!((fit.spread - 1.0).abs() < 1e-12);
    }
    assert!(fit_constants(&[planted(200.0, 2.0, Envelope::Time)], Envelope::Time).is_err());
}

#[test]
fn bonami_karoui_tracks_computed_tail() {
    let s = prolate_spectrum(10.0, None).unwrap();
    for n0 in [12, 15, 20] {
        let got = s.eigenvalue(n0 + 1).unwrap();
        let want = bonami_karoui(n0, 10.0).unwrap();
        assert!(want.regime_ok);
        assert!((got.ln() + want.log_scale_value).abs() <= 2.0 * ((n0 + 1) as f64).ln());
    }
}

#[test]
fn karnik_dominates_plunge() {
    for c in [20.0, 100.0] {
        let s = prolate_spectrum(c, None).unwrap();
        for eps in [0.1, 0.01] {
            assert!((plunge_count(&s, eps).unwrap().count as f64) <= karnik_bound(c, eps).unwrap());
        }
    }
}

#[test]
fn landau_widom_near_half() {
    let s = prolate_spectrum(100.0, None).unwrap();
    let lw = landau_widom(100, 100.0).unwrap();
    assert!((lw.value - 0.5).abs() < 1e-15);
    assert!((s.eigenvalue(100).unwrap() - lw.value).abs() < 0.15);
}

#[test]
fn fuchs_order_of_magnitude() {
    // within one decimal order of magnitude of the computed top complement
    let s = prolate_spectrum(6.0, None).unwrap();
    let f = fuchs_bound(1, 6.0).unwrap();
    let r = s.one_minus(1).unwrap() / f.value;
    assert!(r > 1.0 && r < 20.0, "{r}");
}

#[test]
fn envelope_identities() {
    for c in [50.0, 300.0] {
        for n in [1usize, 10, 40] {
            let e = coherent_envelope(n, c).unwrap();
            let nf = n as f64;
            assert!((e - (c - nf).powi(2) / (c.sqrt() + nf.sqrt()).powi(2)).abs() < 1e-10 * e);
            assert!(time_envelope(n, c).unwrap() > 0.0);
        }
    }
}

#[test]
fn separation_at_thirty() {
    let p = prolate_spectrum(30.0, None).unwrap();
    let q = fock_spectrum(Domain::square_with_area(30.0), None).unwrap();
    let rep = separation_report(&p, &q, &[5, 10, 15, 20, 25, 30]).unwrap();
    assert!(rep.holds);
    assert!(rep.rows.iter().filter(|r| r.trusted).all(|r| r.ratio >= 1.0));
    assert!(separation_report(&p, &q, &[10_000]).is_err());
}
