mod common;

use approx::assert_abs_diff_eq;
use wkw_core::classical::hbar_of_p;
use wkw_core::expansion::build_expansion;
use wkw_core::Potential64;

use common::gauss_kronrod;

fn pendulum_level() -> wkw_core::ClassicalLevel64 {
    hbar_of_p(&Potential64::pendulum(1.0), 1.6, 1e-13).unwrap()
}

#[test]
fn second_coefficient_matches_compatibility_integral() {
    let level = pendulum_level();
    let series = build_expansion(&level, 2).unwrap();
    let v = *level.potential();
    // v₁ = ½ ln p⁺, so v₁' = q'/(2q) and v₁'' = q''/(2q) - q'²/(2q²).
    let integrand = |x: f64| {
        let q = level.p_plus(x);
        let q1 = -v.d1(x) / q;
        let q2 = (-v.d2(x) - q1 * q1) / q;
        let v1 = q1 / (2.0 * q);
        let v2 = q2 / (2.0 * q) - q1 * q1 / (2.0 * q * q);
        (-0.5 * v2 + 0.5 * v1 * v1) * level.mather_density(x)
    };
    let oracle = gauss_kronrod(integrand, -0.5, 0.5, 1e-14);
    assert_abs_diff_eq!(series.hbar_coefficient(2), oracle, epsilon = 1e-10);
    assert_abs_diff_eq!(oracle, -0.62773, epsilon = 1e-5);
    assert!(series.hbar_coefficient(1).abs() < 1e-11);
}

#[test]
fn first_corrector_is_half_log_momentum() {
    let level = pendulum_level();
    let series = build_expansion(&level, 2).unwrap();
    assert_abs_diff_eq!(series.v(1, 0.0), 0.5 * (2.0 * level.hbar()).sqrt().ln(), epsilon = 1e-12);
    for x in [-0.4, -0.1, 0.25] {
        assert_abs_diff_eq!(series.v(1, x), 0.5 * level.p_plus(x).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(series.v(0, x), level.phi(x), epsilon = 1e-11);
    }
    let h = 0.07;
    let a = series.assemble(h, false);
    assert_abs_diff_eq!(a.hbar() - level.hbar(), h * h * series.hbar_coefficient(2), epsilon = 1e-14);
    assert_abs_diff_eq!(series.assemble(0.0, false).value(0.3), series.v(0, 0.3), epsilon = 1e-14);
}

#[test]
fn residual_is_third_order_for_n_two() {
    let series = build_expansion(&pendulum_level(), 2).unwrap();
    for star in [false, true] {
        let r: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&h| series.residual(h, 512, star)).collect();
        for w in r.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!((2.6..=3.4).contains(&rate), "star={star}: {r:?}");
        }
    }
}

#[test]
fn residual_order_grows_with_n() {
    let level = pendulum_level();
    for n in 1..=4 {
        let series = build_expansion(&level, n).unwrap();
        let rate = (series.residual(0.02, 512, false) / series.residual(0.01, 512, false)).log2();
        assert!((rate - (n + 1) as f64).abs() < 0.4, "N={n}: {rate}");
    }
}

#[test]
fn zeroth_order_residual_is_the_classical_one_in_the_limit() {
    let series = build_expansion(&pendulum_level(), 0).unwrap();
    assert!(series.residual(1e-12, 512, false) < 1e-9);
}

#[test]
fn odd_coefficients_vanish() {
    let series = build_expansion(&pendulum_level(), 5).unwrap();
    for k in [1, 3, 5] {
        assert!(series.hbar_coefficient(k).abs() < 1e-9, "H{k} = {}", series.hbar_coefficient(k));
    }
}

#[test]
fn zero_potential_series_is_trivial() {
    let level = hbar_of_p(&Potential64::Zero, 1.3, 1e-14).unwrap();
    let series = build_expansion(&level, 3).unwrap();
    for x in [-0.3, 0.0, 0.2] {
        assert_abs_diff_eq!(series.v(1, x), 0.5 * 1.3f64.ln(), epsilon = 1e-13);
        for j in 2..=3 {
            assert_abs_diff_eq!(series.v(j, x), 0.0, epsilon = 1e-13);
        }
    }
    for k in 1..=3 {
        assert_abs_diff_eq!(series.hbar_coefficient(k), 0.0, epsilon = 1e-13);
    }
    assert!(series.residual(0.1, 64, false) < 1e-12);
}
