use approx::assert_abs_diff_eq;
use wkw_core::cell::{
    cole_hopf_hbar, normalize_pair, solve_cell, Branch, CellOptions, Discretization,
};
use wkw_core::numerics::{PeriodicGrid, TrigSeries};
use wkw_core::potential::Potential;
use wkw_core::{Error, Potential64};

fn fd_options() -> CellOptions<f64> {
    CellOptions { discretization: Discretization::FiniteDifference, ..CellOptions::default() }
}

#[test]
fn two_harmonic_paths_agree() {
    let v = Potential64::two_harmonic(1.0);
    let grid = PeriodicGrid::new(256).unwrap();
    let h = 0.1;
    let sol = solve_cell(&v, 1.7, h, grid, &CellOptions::default()).unwrap();
    let ch = cole_hopf_hbar(&v, 1.7, h, grid, Branch::Forward, Discretization::Spectral).unwrap();
    assert_abs_diff_eq!(sol.hbar, ch.hbar, epsilon = 1e-8);
    assert_abs_diff_eq!(sol.hbar, sol.hbar_star, epsilon = 1e-9);
    let (r1, r2) = sol.interpolated_residuals(512).unwrap();
    assert!(r1 < 1e-9 && r2 < 1e-9, "{r1} {r2}");
    assert!(sol.reflection_defect() < 1e-9, "{}", sol.reflection_defect());
}

#[test]
fn finite_differences_agree_with_their_eigenproblem_and_converge() {
    let v = Potential64::pendulum(1.0);
    let h = 0.1;
    let exact = solve_cell(&v, 1.6, h, PeriodicGrid::new(256).unwrap(), &CellOptions::default()).unwrap().hbar;
    // The two finite-difference paths are different second-order schemes.
    let mut errs = Vec::new();
    let mut errs_ch = Vec::new();
    for m in [128, 256, 512] {
        let grid = PeriodicGrid::new(m).unwrap();
        let sol = solve_cell(&v, 1.6, h, grid, &fd_options()).unwrap();
        let ch = cole_hopf_hbar(&v, 1.6, h, grid, Branch::Backward, Discretization::FiniteDifference).unwrap();
        assert_abs_diff_eq!(sol.hbar, sol.hbar_star, epsilon = 1e-9);
        errs.push((sol.hbar - exact).abs());
        errs_ch.push((ch.hbar - exact).abs());
    }
    for e in [&errs, &errs_ch] {
        for w in e.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!((1.7..=2.3).contains(&rate), "{e:?}");
        }
    }
}

#[test]
fn normalization_and_crossing_point() {
    let v = Potential64::pendulum(1.0);
    let sol = solve_cell(&v, 1.6, 0.08, PeriodicGrid::new(256).unwrap(), &CellOptions::default()).unwrap();
    assert_abs_diff_eq!(sol.mass(), 1.0, epsilon = 1e-12);
    let again = normalize_pair(sol.clone());
    assert_abs_diff_eq!(again.shift, sol.shift, epsilon = 1e-13);
    assert_eq!(again.v, sol.v);
    assert!(sol.x_h >= -0.5 && sol.x_h <= 0.0);
    let d: Vec<f64> = sol.v_star.iter().zip(&sol.v).map(|(a, b)| a - b).collect();
    let series = TrigSeries::from_samples(&d).unwrap();
    assert!(series.eval(sol.x_h).abs() < 1e-10);
    // d is even, so zeros come in pairs ±x.
    for z in &sol.zeros {
        assert!(sol.zeros.iter().any(|w| (w + z).abs() < 1e-8 || (w + z + 1.0).abs() < 1e-8), "{:?}", sol.zeros);
    }
}

#[test]
fn effective_hamiltonian_increases_with_p() {
    let v = Potential64::pendulum(1.0);
    let grid = PeriodicGrid::new(128).unwrap();
    let hb: Vec<f64> = [1.5, 1.7, 1.9, 2.4]
        .iter()
        .map(|&p| solve_cell(&v, p, 0.1, grid, &CellOptions::default()).unwrap().hbar)
        .collect();
    assert!(hb.windows(2).all(|w| w[1] > w[0]), "{hb:?}");
}

#[test]
fn coarse_grid_is_rejected() {
    let v = Potential64::pendulum(1.0);
    let err = solve_cell(&v, 1.6, 0.01, PeriodicGrid::new(64).unwrap(), &CellOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter(_)));
    assert!(solve_cell(&v, 1.6, 0.6, PeriodicGrid::new(64).unwrap(), &CellOptions::default()).is_err());
}

#[test]
fn single_precision_solve() {
    let grid = PeriodicGrid::new(64).unwrap();
    let opts = CellOptions::<f32> { tol: 1e-4, ..CellOptions::default() };
    let single = solve_cell(&Potential::<f32>::pendulum(1.0), 1.6, 0.2, grid, &opts).unwrap();
    let double = solve_cell(&Potential64::pendulum(1.0), 1.6, 0.2, grid, &CellOptions::default()).unwrap();
    assert!((single.hbar as f64 - double.hbar).abs() < 1e-4, "{} {}", single.hbar, double.hbar);
    assert!((single.x_h as f64 - double.x_h).abs() < 1e-3);
}
