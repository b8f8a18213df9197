//! Special functions in double precision.

use super::roots::brent_root;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Error function. Odd symmetry holds bit-for-bit.
pub fn erf(x: f64) -> f64 {
    libm::erf(x.abs()).copysign(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x)/Γ(s)`.
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64> {
    let (p, _) = gamma_pq(s, x, "regularized_lower_gamma")?;
    Ok(p)
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`, computed
/// without cancellation when `Q` is small.
pub fn regularized_upper_gamma(s: f64, x: f64) -> Result<f64> {
    let (_, q) = gamma_pq(s, x, "regularized_upper_gamma")?;
    Ok(q)
}

fn gamma_pq(s: f64, x: f64, op: &'static str) -> Result<(f64, f64)> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::pre(op, format!("shape must be positive, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(Error::pre(op, format!("argument must be nonnegative, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    // D = x^s e^{-x} / Γ(s+1)
    let ln_d = ln_power_exp_over_gamma(s, x);
    if x < s + 1.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= x / (s + k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            k += 1.0;
            if k > 1e6 {
                return Err(Error::NoConvergence { op, iterations: 1_000_000 });
            }
        }
        let p = (ln_d + sum.ln()).exp().min(1.0);
        Ok((p, 1.0 - p))
    } else {
        // modified Lentz on the continued fraction for Γ(s, x) e^x x^{-s}
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        let mut i = 1.0;
        loop {
            let an = -i * (i - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
            i += 1.0;
            if i > 1e6 {
                return Err(Error::NoConvergence { op, iterations: 1_000_000 });
            }
        }
        // Q = s * D * h
        let q = (ln_d + s.ln() + h.ln()).exp().min(1.0);
        Ok((1.0 - q, q))
    }
}

/// `ln(x^s e^{-x} / Γ(s+1))`, with a Stirling form for large `s` that avoids
/// subtracting two large logarithms.
fn ln_power_exp_over_gamma(s: f64, x: f64) -> f64 {
    if s < 10.0 {
        s * x.ln() - x - ln_gamma(s + 1.0)
    } else {
        let t = (x - s) / s;
        s * (t.ln_1p() - t) - 0.5 * (2.0 * PI * s).ln() - stirling_correction(s)
    }
}

/// `ln Γ(s+1) - (s ln s - s + ½ ln 2πs)` by its asymptotic series (s ≥ 10).
fn stirling_correction(s: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / s;
    let inv2 = inv * inv;
    let mut p = inv;
    let mut sum = 0.0;
    for c in C {
        sum += c * p;
        p *= inv2;
    }
    sum
}

/// Carlson's symmetric integral `R_F(x, y, z)`.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    for _ in 0..200 {
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    unreachable!("Carlson duplication converges geometrically")
}

/// Carlson's degenerate integral `R_D(x, y, z)`.
fn carlson_rd(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    let mut sum = 0.0;
    let mut fac = 1.0;
    for _ in 0..200 {
        let mu = (x + y + 3.0 * z) / 5.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            let s2 = ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee);
            let s3 = dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 1.5 / 26.0 * ea));
            return 3.0 * sum + fac * (1.0 + s2 + s3) / (mu * mu.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    unreachable!("Carlson duplication converges geometrically")
}

/// Complete elliptic integral of the second kind with modulus `t`:
/// `E(t) = ∫₀¹ √((1 - t²x²)/(1 - x²)) dx`.
pub fn elliptic_e(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::pre("elliptic_E", format!("modulus must lie in [0, 1], got {t}")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let kc2 = (1.0 - t) * (1.0 + t);
    Ok(carlson_rf(0.0, kc2, 1.0) - t * t / 3.0 * carlson_rd(0.0, kc2, 1.0))
}

/// Inverse of `t ↦ t/E(t)` on `(0, 1]`.
pub fn phi_inverse(u: f64) -> Result<f64> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::pre("phi_inverse", format!("argument must lie in (0, 1], got {u}")));
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    brent_root(|t| t / elliptic_e(t).expect("t in [0,1]") - u, 0.0, 1.0, 1e-15)
}

/// Generalized Laguerre polynomial `L_k^{(alpha)}(x)` by the three-term recurrence.
pub fn laguerre_assoc(k: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if k == 0 {
        return 1.0;
    }
    let mut l0 = 1.0;
    let mut l1 = 1.0 + a - x;
    for j in 1..k {
        let jf = j as f64;
        let l2 = ((2.0 * jf + 1.0 + a - x) * l1 - (jf + a) * l0) / (jf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate_adaptive;

    /// Maclaurin series of erf, summed in extended steps; fine for |x| <= 3.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() < 1e-15);
        assert!((erf(1.0) - 0.842_700_792_9).abs() < 1e-10);
        for x in [0.1, 0.5, 1.0, 1.7, 2.5] {
            assert!((erf(x) - erf_series(x)).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn erf_is_odd_bitwise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-6.0..6.0);
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn lower_gamma_closed_forms() {
        assert_eq!(regularized_lower_gamma(1.0, 0.0).unwrap(), 0.0);
        let v = regularized_lower_gamma(1.0, 1.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(regularized_lower_gamma(0.0, 1.0).is_err());
        assert!(regularized_lower_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn lower_gamma_against_quadrature() {
        // P(3, 2.5) = (1/2) ∫₀^2.5 t² e^{-t} dt
        let q = 0.5 * integrate_adaptive(|t| t * t * (-t).exp(), 0.0, 2.5, 1e-16, 1e-15);
        assert!((regularized_lower_gamma(3.0, 2.5).unwrap() - q).abs() < 1e-12);
        // integer shape: P(k+1, x) = 1 - e^{-x} Σ_{j<=k} x^j/j!
        for k in [0u32, 1, 4, 9, 30, 80] {
            for x in [0.5, 5.0, 20.0, 60.0, 100.0] {
                let mut term = 1.0;
                let mut sum = 0.0;
                for j in 0..=k {
                    if j > 0 {
                        term *= x / j as f64;
                    }
                    sum += term;
                }
                let q_direct = (-x).exp() * sum;
                let q = regularized_upper_gamma(k as f64 + 1.0, x).unwrap();
                let p = regularized_lower_gamma(k as f64 + 1.0, x).unwrap();
                assert!((q - q_direct).abs() <= 1e-13 + 1e-12 * q_direct, "k={k} x={x}");
                assert!((p + q - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lower_gamma_monotone_in_x() {
        for s in [0.5, 3.0, 40.0, 300.0] {
            let mut prev = 0.0;
            for i in 0..400 {
                let x = i as f64 * s / 100.0;
                let p = regularized_lower_gamma(s, x).unwrap();
                assert!(p >= prev - 1e-15, "s={s} x={x}");
                assert!((0.0..=1.0).contains(&p));
                prev = p;
            }
        }
    }

    /// E(t) by x = sin θ and a 64-point Gauss rule in θ, plus an adaptive pass.
    fn elliptic_e_oracle(t: f64) -> f64 {
        integrate_adaptive(|th: f64| (1.0 - t * t * th.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-15, 1e-15)
    }

    #[test]
    fn elliptic_e_values() {
        assert!((elliptic_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
        let v = elliptic_e(0.5f64.sqrt()).unwrap();
        assert!((v - 1.350_643_881_047_675_5).abs() < 1e-12);
        assert!((v - elliptic_e_oracle(0.5f64.sqrt())).abs() < 1e-12);
        for t in [0.05, 0.3, 0.6, 0.9, 0.99, 0.999] {
            assert!((elliptic_e(t).unwrap() - elliptic_e_oracle(t)).abs() < 1e-12, "t={t}");
        }
        assert!(elliptic_e(-0.1).is_err() && elliptic_e(1.1).is_err());
    }

    #[test]
    fn elliptic_e_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let v = elliptic_e(i as f64 / 1000.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn phi_inverse_round_trip() {
        assert_eq!(phi_inverse(1.0).unwrap(), 1.0);
        for i in 1..=100 {
            let u = i as f64 / 100.0;
            let t = phi_inverse(u).unwrap();
            assert!((t / elliptic_e(t).unwrap() - u).abs() <= 1e-11, "u={u}");
        }
        let mut prev = 0.0;
        for i in 1..=50 {
            let t = phi_inverse(i as f64 / 50.0).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(phi_inverse(0.0).is_err() && phi_inverse(1.5).is_err());
    }

    #[test]
    fn phi_inverse_small_argument() {
        // t/E(t) = 2t/π (1 + t²/4 + O(t⁴)) near 0
        let u = 1e-4;
        let t = phi_inverse(u).unwrap();
        let t0 = PI * u / 2.0;
        assert!((t - t0).abs() < 1e-9 * t0 + t0.powi(3));
    }

    #[test]
    fn brent_agrees_with_phi_inverse() {
        let t = brent_root(|t| t / elliptic_e(t).unwrap() - 0.5, 1e-9, 1.0, 1e-14).unwrap();
        assert!((t - phi_inverse(0.5).unwrap()).abs() < 1e-12);
    }

    /// Direct coefficient sum L_k^{(a)}(x) = Σ_i (-1)^i C(k+a, k-i) x^i / i!.
    fn laguerre_coeffs(k: u32, a: u32, x: f64) -> f64 {
        let binom = |n: u32, r: u32| -> f64 {
            (0..r).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
        };
        let mut s = 0.0;
        let mut fact = 1.0;
        for i in 0..=k {
            if i > 0 {
                fact *= i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom(k + a, k - i) * x.powi(i as i32) / fact;
        }
        s
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre_assoc(0, 3, 2.7), 1.0);
        assert!((laguerre_assoc(1, 0, 0.4) - 0.6).abs() < 1e-15);
        let got = laguerre_assoc(5, 2, 3.7);
        let want = laguerre_coeffs(5, 2, 3.7);
        assert!((got - want).abs() <= 1e-10 * want.abs());
        for (k, a, x) in [(3, 0, 1.5), (7, 4, 0.3), (10, 1, 9.0)] {
            let w = laguerre_coeffs(k, a, x);
            assert!((laguerre_assoc(k, a, x) - w).abs() <= 1e-10 * w.abs().max(1.0));
        }
    }
}
