mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use wkw_core::classical::{hbar_of_p, mather_limit_functional, p_crit, Factor, TestSymbol};
use wkw_core::potential::{Hypothesis, Potential};
use wkw_core::{Error, Potential64};

use common::gauss_kronrod;

#[test]
fn critical_momentum_scales_with_sqrt_kappa() {
    let one = p_crit(&Potential64::pendulum(1.0)).unwrap();
    let four = p_crit(&Potential64::pendulum(4.0)).unwrap();
    assert_abs_diff_eq!(one, 4.0 / PI, epsilon = 1e-12);
    assert_abs_diff_eq!(four, 8.0 / PI, epsilon = 1e-11);
    let oracle = gauss_kronrod(|x| (2.0 * (2.0 - (1.0 - (2.0 * PI * x).cos()))).sqrt(), -0.5, 0.5, 1e-14);
    assert_abs_diff_eq!(one, oracle, epsilon = 1e-9);
    assert_eq!(p_crit(&Potential64::Zero).unwrap(), 0.0);
}

#[test]
fn two_harmonic_with_large_beta_is_rejected() {
    let bad = Potential::TwoHarmonic { kappa: 1.0, beta: 0.6 };
    let report = bad.validate(4096);
    assert!(report.violations.contains(&Hypothesis::UniqueMinimum), "{:?}", report.violations);
    // Oracle: count sign changes of V' from - to + on a fine, offset scan
    // (one minimum sits on the wrap point x = ±1/2).
    let n = 20000;
    let minima = (0..n)
        .filter(|&i| {
            let x0 = -0.5 + (i as f64 + 0.5) / n as f64;
            let x1 = x0 + 1.0 / n as f64;
            bad.d1(x0) < 0.0 && bad.d1(x1) >= 0.0
        })
        .count();
    assert!(minima > 1);
    assert!(Potential64::two_harmonic(1.0).validate(4096).passed());
}

#[test]
fn derivatives_match_finite_differences() {
    let d = 1e-5;
    for v in [Potential64::pendulum(1.3), Potential64::two_harmonic(0.7)] {
        for i in 0..50 {
            let x = -0.5 + i as f64 / 50.0;
            for n in 0..3 {
                let fd = (v.derivative(x + d, n) - v.derivative(x - d, n)) / (2.0 * d);
                let scale = 1.0 + v.derivative(x, n + 1).abs();
                assert!((fd - v.derivative(x, n + 1)).abs() < 1e-6 * scale * 100.0_f64.powi(n as i32), "{n} {x}");
            }
        }
    }
}

#[test]
fn level_matches_oracle_and_finite_difference_slope() {
    let v = Potential64::pendulum(1.0);
    let level = hbar_of_p(&v, 1.6, 1e-13).unwrap();
    assert_abs_diff_eq!(level.hbar(), common::pendulum_hbar(1.6), epsilon = 1e-10);
    let d = 1e-4;
    let fd = (hbar_of_p(&v, 1.6 + d, 1e-14).unwrap().hbar() - hbar_of_p(&v, 1.6 - d, 1e-14).unwrap().hbar()) / (2.0 * d);
    assert_abs_diff_eq!(level.dhdp(), fd, epsilon = 1e-6);
    assert!(hbar_of_p(&v, 1.8, 1e-13).unwrap().hbar() > level.hbar());
    let mass = gauss_kronrod(|x| level.mather_density(x), -0.5, 0.5, 1e-14);
    assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
    assert!(level.classical_residual(512) < 1e-9);
    assert_abs_diff_eq!(level.phi(0.5), 0.0, epsilon = 1e-10);
    assert!(matches!(hbar_of_p(&v, 1.2, 1e-13), Err(Error::BelowCritical { .. })));
}

#[test]
fn zero_potential_level() {
    let level = hbar_of_p(&Potential64::Zero, 1.3, 1e-14).unwrap();
    assert_abs_diff_eq!(level.hbar(), 0.845, epsilon = 1e-13);
    assert_abs_diff_eq!(level.dhdp(), 1.3, epsilon = 1e-12);
    for x in [-0.4, 0.0, 0.3] {
        assert_abs_diff_eq!(level.p_plus(x), 1.3, epsilon = 1e-13);
        assert_abs_diff_eq!(level.phi(x), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(level.mather_density(x), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn limit_functional_equals_configuration_side_integral() {
    let level = hbar_of_p(&Potential64::pendulum(1.0), 1.6, 1e-13).unwrap();
    let (lo, hi) = (level.p_min(), level.p_max());
    let mid = 0.5 * (lo + hi);
    let f = TestSymbol::new(
        Factor::Bump { center: 0.2, half_width: 0.35 },
        Factor::Bump { center: mid, half_width: 0.45 * (hi - lo) },
    );
    let got = mather_limit_functional(&level, &f).unwrap();
    let want = gauss_kronrod(|x| f.eval(x, level.p_plus(x)) * level.mather_density(x), -0.5, 0.5, 1e-14);
    assert_abs_diff_eq!(got, want, epsilon = 1e-8);
    let off = TestSymbol::momentum_bump(hi + 0.5, 0.2);
    assert_eq!(mather_limit_functional(&level, &off).unwrap(), 0.0);
    let crossing = TestSymbol::momentum_bump(hi, 0.2);
    assert!(matches!(mather_limit_functional(&level, &crossing), Err(Error::SupportCrossesLevelBounds { .. })));
}

#[test]
fn limit_functional_tends_to_one_as_the_cut_widens() {
    let level = hbar_of_p(&Potential64::pendulum(1.0), 1.6, 1e-13).unwrap();
    let (lo, hi) = (level.p_min(), level.p_max());
    let mut last = f64::INFINITY;
    for margin in [1e-2, 1e-3, 1e-4] {
        let d = margin * (hi - lo);
        let f = TestSymbol::new(Factor::Constant(1.0), Factor::Plateau { lo: lo + 2.0 * d, hi: hi - 2.0 * d, ramp: 0.9 * d });
        let gap = (1.0 - mather_limit_functional(&level, &f).unwrap()).abs();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 0.03, "{last}");
}

#[test]
fn endpoints_are_refused() {
    let level = hbar_of_p(&Potential64::pendulum(1.0), 1.6, 1e-13).unwrap();
    assert!(level.branches(level.p_max()).is_err());
    assert!(level.branches(level.p_min()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn branches_are_antisymmetric(t in 0.01f64..0.99) {
        let level = hbar_of_p(&Potential64::pendulum(1.0), 1.6, 1e-13).unwrap();
        let s = level.p_min() + t * (level.p_max() - level.p_min());
        let b = level.branches(s).unwrap();
        prop_assert!(b.x1 > -0.5 && b.x1 < 0.0 && b.x2 > 0.0 && b.x2 < 0.5);
        prop_assert!((b.x1 + b.x2).abs() < 1e-10);
        prop_assert!((level.p_plus(b.x1) - s).abs() < 1e-10);
        prop_assert!((level.p_plus(b.x2) - s).abs() < 1e-10);
    }

    #[test]
    fn profile_is_even_and_bounded(x in -0.5f64..0.5, p in 1.3f64..3.0) {
        let level = hbar_of_p(&Potential64::pendulum(1.0), p, 1e-13).unwrap();
        prop_assert!((level.p_plus(x) - level.p_plus(-x)).abs() < 1e-13);
        prop_assert!(level.p_plus(x) >= level.p_min() - 1e-14);
        prop_assert!((level.mather_density(x) - level.mather_density(-x)).abs() < 1e-12);
        prop_assert!(level.mather_density(x) <= level.mather_density(0.5) + 1e-12);
    }
}
