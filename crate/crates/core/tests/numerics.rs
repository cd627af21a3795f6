mod common;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use wkw_core::classical::hbar_of_p;
use wkw_core::numerics::{
    fft_coefficients, find_root_monotone, inverse_fft_coefficients, principal_eigenpair, quad_periodic, BandedSystem,
    EigenOptions, PeriodicGrid,
};
use wkw_core::Potential64;

use common::{gauss_kronrod, pendulum_p_plus};

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[test]
fn trapezoid_matches_adaptive_oracle() {
    let f = |x: f64| (2.0 * (1.5 + (TAU * x).cos())).sqrt();
    let grid = PeriodicGrid::new(256).unwrap();
    let got = quad_periodic(&grid.sample(f)).unwrap();
    let want = gauss_kronrod(f, -0.5, 0.5, 1e-15);
    assert_abs_diff_eq!(got, want, epsilon = 1e-10);
}

#[test]
fn root_of_the_action_constraint() {
    let grid = PeriodicGrid::new(1024).unwrap();
    let g = |e: f64| quad_periodic(&grid.sample(|x| pendulum_p_plus(e, x))).unwrap() - 1.6;
    let root = find_root_monotone(g, 2.0, 4.0, 1e-13).unwrap();
    let oracle = common::pendulum_hbar(1.6);
    assert_abs_diff_eq!(root, oracle, epsilon = 1e-10);
    let level = hbar_of_p(&Potential64::pendulum(1.0), 1.6, 1e-13).unwrap();
    assert_abs_diff_eq!(level.hbar(), oracle, epsilon = 1e-10);
    assert_abs_diff_eq!(oracle, 2.383116, epsilon = 1e-6);
}

fn drift_diffusion(m: usize, h: f64, p: f64) -> BandedSystem<f64> {
    let dx = 1.0 / m as f64;
    let v = |i: usize| 1.0 - (TAU * (-0.5 + i as f64 * dx)).cos();
    BandedSystem::periodic(m, 1, 0, |i, off| match off {
        -1 => 0.5 * h * h / (dx * dx) + h * p / (2.0 * dx),
        0 => -h * h / (dx * dx) + v(i) + 0.5 * p * p,
        _ => 0.5 * h * h / (dx * dx) - h * p / (2.0 * dx),
    })
    .unwrap()
}

#[test]
fn principal_eigenvalue_matches_dense_spectrum() {
    let m = 64;
    let sys = drift_diffusion(m, 0.2, 1.6);
    let pair = principal_eigenpair(&sys, None, &EigenOptions::default()).unwrap();
    let dense = DMatrix::from_fn(m, m, |i, j| sys.get(i, j));
    let top = dense.complex_eigenvalues().iter().map(|z| z.re).fold(f64::MIN, f64::max);
    assert_abs_diff_eq!(pair.value, top, epsilon = 1e-9);
    assert!(pair.vector.iter().all(|u| *u > 0.0));
    let au = sys.apply(&pair.vector);
    let res = au.iter().zip(&pair.vector).map(|(a, u)| (a - pair.value * u).abs()).fold(0.0, f64::max);
    assert!(res < 1e-9, "{res}");
}

#[test]
fn laplacian_has_zero_principal_eigenvalue() {
    let m = 32;
    let dx = 1.0 / m as f64;
    let c = 0.5 * 0.01 / (dx * dx);
    let sys = BandedSystem::periodic(m, 1, 0, |_, off| if off == 0 { -2.0 * c } else { c }).unwrap();
    let pair = principal_eigenpair(&sys, None, &EigenOptions::default()).unwrap();
    assert_abs_diff_eq!(pair.value, 0.0, epsilon = 1e-10);
    assert!(pair.vector.iter().all(|u| (u - 1.0).abs() < 1e-9));
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_round_trip_and_parseval(x in complex_vec(64)) {
        let c = fft_coefficients(&x).unwrap();
        let back = inverse_fft_coefficients(&c).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-13);
        }
        let e_x: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>() / 64.0;
        let e_c: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((e_x - e_c).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_exact_below_nyquist(a in prop::collection::vec(-1.0f64..1.0, 31), b in prop::collection::vec(-1.0f64..1.0, 31), c0 in -1.0f64..1.0) {
        let grid = PeriodicGrid::new(64).unwrap();
        let f = |x: f64| c0 + (1..32).map(|k| a[k - 1] * (TAU * k as f64 * x).cos() + b[k - 1] * (TAU * k as f64 * x).sin()).sum::<f64>();
        prop_assert!((quad_periodic(&grid.sample(f)).unwrap() - c0).abs() < 1e-13);
    }

    #[test]
    fn banded_solve_matches_dense(entries in prop::collection::vec(-1.0f64..1.0, 5 * 40), rhs in prop::collection::vec(-1.0f64..1.0, 40)) {
        let m = 40;
        let sys = BandedSystem::periodic(m, 2, 0, |i, off| {
            let v = entries[i * 5 + (off + 2) as usize];
            if off == 0 { 6.0 + v } else { v }
        }).unwrap();
        let x = sys.solve(&rhs).unwrap();
        let ax = sys.apply(&x);
        let res = ax.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-10 * scale.max(1e-300));
        let dense = DMatrix::from_fn(m, m, |i, j| sys.get(i, j));
        let y = dense.lu().solve(&nalgebra::DVector::from_vec(rhs.clone())).unwrap();
        for (a, b) in x.iter().zip(y.iter()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(sys.condition_estimate().unwrap() >= 1.0);
    }
}
