use locspec::bounds::{coherent_envelope, karnik_bound, landau_widom, time_envelope};
use locspec::certificates::paley_wiener::PWFunction;
use locspec::certificates::{
    best_scaling, jensen_residual, kolm_check, pack_disks, poisson_tail, GramData, GridVariant, WhitneyGrid,
    WhitneyParams,
};
use locspec::fock::{displacement_overlap, weighted_monomial, DisplacedMonomial, SampledFunction};
use locspec::numerics::{
    elliptic_e, erf, gauss_legendre, jacobi_eigen, phi_inverse, regularized_lower_gamma, regularized_upper_gamma,
    sym_eigen, SymmetricMatrix,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn symmetric(dim: usize, seed: &[f64]) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(dim, |i, j| {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        seed[(a * (a + 1) / 2 + b) % seed.len()] * (1.0 + ((a * 7 + b * 3) % 11) as f64 / 11.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_legendre_exact_on_monomials(order in 1usize..40, a in -3.0f64..0.0, len in 0.1f64..4.0, frac in 0.0f64..1.0) {
        let b = a + len;
        let d = ((2 * order - 1) as f64 * frac).floor() as i32;
        let rule = gauss_legendre(order, a, b).unwrap();
        let got = rule.integrate(|x| x.powi(d));
        let want = (b.powi(d + 1) - a.powi(d + 1)) / (d + 1) as f64;
        let scale = (a.abs().max(b.abs())).powi(d) * len;
        prop_assert!((got - want).abs() <= 1e-12 * scale.max(want.abs()), "order {order} degree {d}: {got} vs {want}");
        prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn eigen_similarity_invariants(dim in 1usize..200, seed in prop::collection::vec(-1.0f64..1.0, 1..64)) {
        let m = symmetric(dim, &seed);
        let e = sym_eigen(&m, false).unwrap();
        let tr = m.trace();
        let fro = m.frobenius_sq();
        let s1: f64 = e.eigenvalues.iter().sum();
        let s2: f64 = e.eigenvalues.iter().map(|x| x * x).sum();
        prop_assert!((s1 - tr).abs() <= 1e-10 * fro.sqrt().max(1.0) * (dim as f64).sqrt());
        prop_assert!((s2 - fro).abs() <= 1e-10 * fro.max(1e-300));
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn jacobi_agrees_with_tridiagonal(dim in 1usize..30, seed in prop::collection::vec(-1.0f64..1.0, 1..32)) {
        let m = symmetric(dim, &seed);
        let a = sym_eigen(&m, false).unwrap();
        let b = jacobi_eigen(&m, true).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-12 * a.max().abs().max(a.min().abs()).max(1.0));
        }
    }

    #[test]
    fn erf_is_odd(x in -8.0f64..8.0) {
        prop_assert_eq!(erf(-x), -erf(x));
        prop_assert!(erf(x).abs() <= 1.0);
    }

    #[test]
    fn incomplete_gamma_complementary(s in 0.1f64..80.0, x in 0.0f64..120.0) {
        let p = regularized_lower_gamma(s, x).unwrap();
        let q = regularized_upper_gamma(s, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p + q - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn phi_inverse_round_trip(u in 1e-3f64..=1.0) {
        let t = phi_inverse(u).unwrap();
        prop_assert!((t / elliptic_e(t).unwrap() - u).abs() <= 1e-11);
    }

    #[test]
    fn elliptic_e_decreasing(t in 0.0f64..0.999) {
        prop_assert!(elliptic_e(t).unwrap() > elliptic_e(t + 1e-3).unwrap());
    }

    #[test]
    fn overlap_magnitude_symmetric(k in 0u32..40, s in 0u32..40, re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let a = DisplacedMonomial::new(Complex64::new(0.0, 0.0), k);
        let b = DisplacedMonomial::new(Complex64::new(re, im), s);
        let ab = displacement_overlap(&a, &b);
        let ba = displacement_overlap(&b, &a);
        prop_assert!((ab - ba.conj()).norm() <= 1e-12);
        prop_assert!(ab.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn weighted_monomial_bounded(k in 0u32..2000, r in 0.0f64..50.0, th in 0.0f64..6.3) {
        // sup_z |e_k(z)| is attained on |z|² = k/π
        let v = weighted_monomial(k, Complex64::from_polar(r, th));
        prop_assert!(v.norm().is_finite() && v.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn envelopes_decrease_in_n(c in 10.0f64..400.0, frac in 0.01f64..0.98) {
        let n = ((c - 1.0) * frac).floor().max(1.0) as usize;
        if ((n + 1) as f64) < c {
            prop_assert!(time_envelope(n + 1, c).unwrap() < time_envelope(n, c).unwrap());
            prop_assert!(coherent_envelope(n + 1, c).unwrap() < coherent_envelope(n, c).unwrap());
        }
    }

    #[test]
    fn karnik_at_least_seven(c in 0.01f64..1000.0, eps in 1e-6f64..0.4999) {
        prop_assert!(karnik_bound(c, eps).unwrap() >= 7.0);
    }

    #[test]
    fn landau_widom_decreasing(c in 3.0f64..400.0, n in 1usize..500) {
        prop_assert!(landau_widom(n + 1, c).unwrap().log_scale_value > landau_widom(n, c).unwrap().log_scale_value);
    }

    #[test]
    fn poisson_tail_monotone(x in -50.0f64..50.0, dx in 1e-3f64..5.0, y in 0.01f64..10.0, c in 1.0f64..100.0) {
        let (a, b) = (poisson_tail(x, y, c), poisson_tail(x + dx, y, c));
        prop_assert!(a > 0.0 && b < 1.0 && a <= b);
    }

    #[test]
    fn scaling_never_hurts(seed in prop::collection::vec(-0.3f64..0.3, 1..40), logd in prop::collection::vec(-30.0f64..-2.0, 2..12)) {
        let n = logd.len();
        let raw = symmetric(n, &seed);
        // diagonally dominant, unit diagonal
        let m = SymmetricMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { raw.get(i, j) / n as f64 });
        let d: Vec<f64> = logd.iter().map(|x| x.exp()).collect();
        let plain = 1.0 - d.iter().sum::<f64>() / sym_eigen(&m, false).unwrap().min();
        let s = best_scaling(&GramData { matrix: m, leakage: d }).unwrap();
        prop_assert!(s.bound >= plain - 1e-12);
        prop_assert!(s.bound < 1.0);
    }

    #[test]
    fn jensen_on_random_polynomials(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..9), r in 0.3f64..3.0) {
        let p: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let x0 = Complex64::new(0.05, -0.02);
        prop_assume!(p.iter().map(|c| c.norm()).fold(0.0, f64::max) > 1e-3);
        if let Ok(res) = jensen_residual(&p, x0, r) {
            // a root close to the circle slows the trapezoid rule; skip those draws
            let roots = locspec::certificates::poly_roots(&p).unwrap();
            let near = roots.iter().map(|z| ((z - x0).norm() - r).abs() / r).fold(f64::INFINITY, f64::min);
            prop_assume!(near > 0.02);
            prop_assert!(res <= 1e-8, "residual {res}");
        }
    }

    #[test]
    fn kolm_on_gaussians(a in 0.1f64..3.0, b in 0.05f64..4.0) {
        let f = SampledFunction::from_fn(0.0, 12.0 / b.sqrt(), 1e-3 / b.sqrt(), |x| a * (-b * x * x).exp());
        let q = kolm_check(&f, 0.0).unwrap();
        prop_assert!(q.slack >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn packing_invariants(eps in 0.08f64..0.6) {
        let p = pack_disks(eps).unwrap();
        prop_assert!(p.coverage >= 1.0 - eps);
        prop_assert!(p.min_gap() >= -1e-12);
        prop_assert!(p.boundary_excess() <= 1e-12);
        prop_assert!(p.min_radius >= eps.powi(22));
        prop_assert!((p.monte_carlo.fraction - p.coverage).abs() <= 3.0 * p.monte_carlo.std_error + 1e-12);
    }

    #[test]
    fn whitney_structure(c in 100.0f64..1200.0, frac in 0.05f64..0.3, upper in any::<bool>()) {
        let n = (c * (1.0 - frac)).floor() as usize;
        let params = if upper { WhitneyParams::desk(GridVariant::Upper) } else { WhitneyParams::desk(GridVariant::Lower) };
        let g = WhitneyGrid::build(c, n, params).unwrap();
        prop_assert!(g.gammas.iter().all(|&x| x > 1.0));
        prop_assert!(g.gammas.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(2f64.powi(g.l as i32) * g.r <= c && c < 2f64.powi(g.l as i32 + 1) * g.r);
        if !upper {
            // trimmed bands keep neighbours from different bands apart
            prop_assert!(g.points.windows(2).all(|w| w[1].x - w[0].x >= 1.0 - 1e-9));
        }
        prop_assert!(g.points.iter().all(|p| p.x.abs() <= 0.5 * c));
    }

    #[test]
    fn pw_members_respect_paley_wiener(k in 1i32..4, gamma in 1.02f64..1.3, p in -20.0f64..20.0) {
        let f = PWFunction::new(p, k, gamma, 200.0, 0.5);
        prop_assert!((f.eval(p) - 1.0).abs() <= 1e-12);
        prop_assert!(f.support_radius() <= 0.5 + 1e-12);
        for m in 1..6 {
            prop_assert!(f.eval(p + m as f64 * gamma).abs() <= 1e-10);
        }
        let norm = f.norm_sq().sqrt();
        let h = 1e-3;
        let mut sup_f: f64 = 0.0;
        let mut sup_d: f64 = 0.0;
        for i in 0..=2000 {
            let x = p - 10.0 + i as f64 * 0.01;
            sup_f = sup_f.max(f.eval(x).abs());
            if i % 50 == 0 {
                sup_d = sup_d.max((f.eval(x + h) - f.eval(x - h)).abs() / (2.0 * h));
            }
        }
        prop_assert!(sup_f <= norm * (1.0 + 1e-6));
        prop_assert!(sup_d <= 2.0 * norm * (1.0 + 1e-6));
    }
}
