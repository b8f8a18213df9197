use locspec::certificates::paley_wiener::PWFunction;
use locspec::certificates::{
    build_monomial_family, build_pw_family, coherent_certificate, f_tw, gram_matrix, jensen_residual, kolm_check,
    pack_disks, poisson_tail, scale_packing, whitney_grid, GridVariant, MonomialFamily, Target,
};
use locspec::fock::{displacement_overlap, DisplacedMonomial, SampledFunction};
use locspec::numerics::{erf, integrate_adaptive};
use locspec::Error;
use num_complex::Complex64;
use std::f64::consts::PI;

#[test]
fn monomial_family_geometry() {
    let p = pack_disks(1.0 - 0.6f64.powf(0.2)).unwrap();
    let sd = scale_packing(&p, 100.0, 60).unwrap();
    let fam = build_monomial_family(&sd, 60).unwrap();
    assert_eq!(fam.size(), 60);
    assert!(fam.capacity as f64 >= sd.total_area);
    for (f, &m) in fam.members.iter().zip(&fam.disk_of) {
        let d = &sd.disks[m];
        assert!(f.degree_radius() <= d.radius + 1e-12);
        assert!((f.w - d.center).norm() < 1e-12);
    }
}

#[test]
fn monomial_capacity_error() {
    let p = pack_disks(0.25).unwrap();
    let sd = scale_packing(&p, 10.0, 2).unwrap();
    let single = (PI * sd.disks[0].radius.powi(2)).floor() as usize + 1;
    match build_monomial_family(&sd, single + 1) {
        Err(Error::Capacity { capacity, requested }) => assert_eq!((capacity, requested), (single, single + 1)),
        other => panic!("expected a capacity error, got {other:?}"),
    }
}

#[test]
fn same_disk_entries_are_kronecker() {
    let p = pack_disks(1.0 - 0.5f64.powf(0.2)).unwrap();
    let sd = scale_packing(&p, 100.0, 50).unwrap();
    let fam: MonomialFamily = build_monomial_family(&sd, 50).unwrap();
    let g = gram_matrix(&fam).unwrap();
    let n = fam.size();
    for a in 0..n {
        assert_eq!(g.get(a, a), 1.0);
        for b in 0..n {
            if a != b && fam.disk_of[a] == fam.disk_of[b] {
                assert_eq!(g.get(a, b), 0.0);
                // the closed form agrees
                assert!(displacement_overlap(&fam.members[a], &fam.members[b]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn vacuum_overlap_oracle() {
    let a = DisplacedMonomial::new(Complex64::new(0.0, 0.0), 0);
    let b = DisplacedMonomial::new(Complex64::new(0.6, 0.8), 0);
    assert!((displacement_overlap(&a, &b).norm() - (-PI / 2.0).exp()).abs() < 1e-14);
}

#[test]
fn coherent_certificate_tags_stage() {
    let cert = coherent_certificate(60.0, 20).unwrap();
    assert_eq!(cert.target, Target::MuLower);
    assert!(cert.certified_bound <= cert.direct_eigenvalue.unwrap() + 1e-10);
    assert!(cert.gram_min_eig > 0.0);
    let json = serde_json::to_string(&cert).unwrap();
    assert!(json.contains("\"target\":\"mu-lower\""));
}

#[test]
fn pw_family_same_band_zeros() {
    let g = whitney_grid(200.0, 150, GridVariant::Lower).unwrap();
    let fam = build_pw_family(&g).unwrap();
    assert_eq!(fam.members.len(), 150);
    assert!(fam.members.iter().all(|f| (f.eval(f.p) - 1.0).abs() < 1e-14));
    assert!(fam.max_same_band <= 1e-10);
    assert!(fam.max_support <= 0.5 + 1e-12);
}

#[test]
fn pw_leakage_matches_quadrature() {
    let f = PWFunction::new(45.0, 2, 1.06, 100.0, 0.5);
    let n = f.norm_sq();
    let inside = integrate_adaptive(|x| f.eval(x).powi(2), -50.0, 50.0, 1e-14, 1e-12);
    let outside: f64 = (0..400).map(|i| integrate_adaptive(|x| f.eval(x).powi(2), 50.0 + i as f64, 51.0 + i as f64, 1e-18, 1e-10)).sum();
    // the remaining tail beyond 450 is O(1/x²) and tiny relative to the checked quantity
    assert!(((n - inside) - outside).abs() < 1e-4 * outside.max(1e-12) + 1e-9, "{} vs {outside}", n - inside);
}

#[test]
fn ftw_closed_form_at_zero() {
    assert!((f_tw(1.0, 1.0, 0.0).unwrap() - erf(PI.sqrt() / 2.0)).abs() < 1e-14);
    assert!(f_tw(1.0, 1.0, 0.0).unwrap() >= 0.1);
    assert!(f_tw(0.2, 2.0, 0.0).is_err());
}

#[test]
fn kolm_examples() {
    let e = SampledFunction::from_fn(0.0, 40.0, 1e-3, |x| (-x).exp());
    let q = kolm_check(&e, 0.0).unwrap();
    assert_eq!(q.lhs, 1.0);
    assert!((q.rhs - 3f64.cbrt() * 0.5f64.cbrt()).abs() < 1e-3);
    let z = SampledFunction::from_fn(0.0, 1.0, 1e-4, |_| 0.0);
    let q = kolm_check(&z, 0.0).unwrap();
    assert_eq!((q.lhs, q.rhs), (0.0, 0.0));
    // max(0, 1 - Cx): ‖f‖² = 1/(3C), sup|f'| = C, both sides equal 1
    let t = SampledFunction::from_fn(0.0, 2.0, 1e-4, |x| (1.0 - 3.0 * x).max(0.0));
    let q = kolm_check(&t, 0.0).unwrap();
    assert!(q.slack >= -1e-12 && q.slack <= 0.05 * q.rhs);
}

#[test]
fn jensen_examples() {
    let z = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    assert!(jensen_residual(&z, Complex64::new(1.0, 0.0), 2.0).unwrap() < 1e-14);
    // 3 + z has no zero in |z| < 1
    let p = [Complex64::new(3.0, 0.0), Complex64::new(1.0, 0.0)];
    assert!(jensen_residual(&p, Complex64::new(0.0, 0.0), 1.0).unwrap() < 1e-8);
    assert!(jensen_residual(&z, Complex64::new(0.0, 0.0), 1.0).is_err());
}

#[test]
fn poisson_examples() {
    let c = 40.0;
    assert!((poisson_tail(20.0, 3.0, c) - 0.5).abs() < 1e-15);
    let v = poisson_tail(20.0 - 10.0 * 0.7, 0.7, c);
    assert!((v - (0.5 * PI - 10f64.atan()) / PI).abs() < 1e-15);
    assert!((v - 0.0317).abs() < 1e-4);
}

#[test]
fn gram_eigen_residual_recorded() {
    let cert = locspec::certificates::time_certificate(100.0, 60).unwrap();
    assert!(cert.gram_residual < 1e-10);
    assert!(cert.metrics["max_same_band"] <= 1e-10);
}
