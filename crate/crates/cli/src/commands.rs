use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use wkw_core::cell::{cole_hopf_hbar, expansion_error, solve_cell_at_level, Branch, CellOptions, Discretization};
use wkw_core::classical::{hbar_of_p, mather_limit_functional, p_crit, Factor, TestSymbol};
use wkw_core::expansion::build_expansion;
use wkw_core::numerics::{fit_order, integrate_interval, PeriodicGrid, TrigSeries};
use wkw_core::oscillatory::{
    lattice_integral, stationary_phase_estimate, CriticalKind, DirectOptions, PhaseFamily, XBar,
};
use wkw_core::wigner::{
    convergence_sweep, integrate_symbol, momentum_density, wigner_transform, SweepOptions, WignerOptions,
};
use wkw_core::{CellSolution64, ClassicalLevel64, Potential64};

use crate::config::{RunConfig, SymbolSpec};
use crate::fail::Failure;
use crate::output::{fmt17, Sink, Table};
use crate::plot;

const GRID_FACTOR: f64 = 8.0;
const MIN_GRID: usize = 512;

fn level(cfg: &RunConfig) -> Result<ClassicalLevel64, Failure> {
    Ok(hbar_of_p(&cfg.potential.build(), cfg.p(), 1e-13)?)
}

fn grid_for(cfg: &RunConfig, h: f64) -> Result<PeriodicGrid, Failure> {
    match cfg.grid {
        Some(m) => Ok(PeriodicGrid::new(m)?),
        None => Ok(PeriodicGrid::for_resolution(h, GRID_FACTOR, MIN_GRID)?),
    }
}

fn cell_options(cfg: &RunConfig) -> CellOptions<f64> {
    CellOptions { tol: cfg.tolerances.cell, ..CellOptions::default() }
}

fn wigner_options(cfg: &RunConfig) -> WignerOptions<f64> {
    WignerOptions { window_factor: cfg.window_factor(), tail_tol: cfg.tolerances.tail }
}

fn potential_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg.potential).unwrap_or(Value::Null)
}

pub fn classical(cfg: &RunConfig, sink: &Sink) -> Result<(), Failure> {
    let l = level(cfg)?;
    let grid = grid_for(cfg, cfg.h())?;
    let mut table = Table::new(vec!["x", "p_plus", "phi", "b"]);
    for x in grid.nodes::<f64>() {
        table.push(vec![fmt17(x), fmt17(l.p_plus(x)), fmt17(l.phi(x)), fmt17(l.mather_density(x))]);
    }
    let summary = json!({
        "potential": potential_json(cfg),
        "P": l.p(),
        "P_crit": l.p_crit(),
        "H_bar": l.hbar(),
        "dHdP": l.dhdp(),
        "p_min": l.p_min(),
        "p_max": l.p_max(),
        "classical_residual": l.classical_residual(grid.size()),
    });
    sink.emit("classical", summary, Some(&table))
}

pub fn expand(cfg: &RunConfig, sink: &Sink) -> Result<(), Failure> {
    let l = level(cfg)?;
    let n = cfg.order();
    let series = build_expansion(&l, n)?;
    let grid = grid_for(cfg, cfg.h())?;
    let m = grid.size();
    let cols: Vec<Vec<f64>> = (0..=n).map(|j| series.sample_v(j, m)).collect();
    let names = ["x", "v0", "v1", "v2", "v3", "v4", "v5", "v6"];
    let mut table = Table::new(names[..n + 2].to_vec());
    for (i, x) in grid.nodes::<f64>().into_iter().enumerate() {
        let mut row = vec![fmt17(x)];
        row.extend(cols.iter().map(|c| fmt17(c[i])));
        table.push(row);
    }
    let residuals: Vec<Value> = cfg
        .h_list()
        .iter()
        .map(|&h| json!({ "h": h, "residual": series.residual(h, m, false), "residual_star": series.residual(h, m, true) }))
        .collect();
    let summary = json!({
        "potential": potential_json(cfg),
        "P": l.p(),
        "order": n,
        "H": series.hbar_coefficients(),
        "residuals": residuals,
    });
    sink.emit("expand", summary, Some(&table))
}

fn pointwise_residual(sol: &CellSolution64, v: &[f64], hbar: f64, sign: f64) -> Result<Vec<f64>, Failure> {
    let s = TrigSeries::from_samples(v)?;
    let d1 = s.derivative_exact();
    let m = v.len();
    let (a, b) = (d1.sample(m), d1.derivative_exact().sample(m));
    Ok(sol
        .grid
        .nodes::<f64>()
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let g = sol.p + a[j];
            -sign * 0.5 * sol.h * b[j] + 0.5 * g * g + sol.potential.value(*x) - hbar
        })
        .collect())
}

pub fn cell(cfg: &RunConfig, sink: &Sink) -> Result<(), Failure> {
    let l = level(cfg)?;
    let h = cfg.h();
    let sol = solve_cell_at_level(&l, h, grid_for(cfg, h)?, &cell_options(cfg))?;
    let m = sol.grid.size();
    let (i1, i2) = sol.interpolated_residuals(2 * m)?;
    let r1 = pointwise_residual(&sol, &sol.v, sol.hbar, 1.0)?;
    let r2 = pointwise_residual(&sol, &sol.v_star, sol.hbar_star, -1.0)?;
    let a2: Vec<f64> = sol.v.iter().zip(&sol.v_star).map(|(v, s)| ((s - v) / h).exp()).collect();
    let mut table = Table::new(vec!["x", "v", "v_star", "a2", "residual_b1", "residual_b2"]);
    for (j, x) in sol.grid.nodes::<f64>().into_iter().enumerate() {
        table.push(vec![fmt17(x), fmt17(sol.v[j]), fmt17(sol.v_star[j]), fmt17(a2[j]), fmt17(r1[j]), fmt17(r2[j])]);
    }
    let series = build_expansion(&l, cfg.order())?;
    let e = expansion_error(&sol, &series, h)?;
    let errors = json!({
        "order": cfg.order(),
        "hbar": e.hbar,
        "c0_seminorm": e.c0_seminorm,
        "l2_derivative": e.l2_derivative,
        "c0_seminorm_star": e.c0_seminorm_star,
        "l2_derivative_star": e.l2_derivative_star,
    });
    let summary = json!({
        "potential": potential_json(cfg),
        "P": sol.p,
        "h": h,
        "grid": m,
        "H_bar": sol.hbar,
        "H_bar_star": sol.hbar_star,
        "x_h": sol.x_h,
        "zeros": sol.zeros,
        "mass": sol.mass(),
        "p_plus_at_x_h": l.p_plus(sol.x_h),
        "dHdP": l.dhdp(),
        "residuals": {
            "b1": sol.residual_b1,
            "b2": sol.residual_b2,
            "interpolated_b1": i1,
            "interpolated_b2": i2,
        },
        "iterations": [sol.iterations.0, sol.iterations.1],
        "errors": errors,
    });
    sink.emit("cell", summary, Some(&table))
}

pub fn wigner(cfg: &RunConfig, sink: &Sink) -> Result<(), Failure> {
    let l = level(cfg)?;
    let h = cfg.h();
    let sol = solve_cell_at_level(&l, h, grid_for(cfg, h)?, &cell_options(cfg))?;
    let state = sol.evans_state()?;
    let t = wigner_transform(&state, l.p_max() - l.p_min(), &wigner_options(cfg))?;
    let nodes: Vec<f64> = t.grid.nodes();
    let mut table = Table::new(vec!["x", "p", "two_pi_p", "re_w", "im_w"]);
    for (j, x) in nodes.iter().enumerate() {
        for m in t.lattice.indices() {
            let w = t.value(j, m);
            table.push(vec![
                fmt17(*x),
                fmt17(t.lattice.point(m)),
                fmt17(t.lattice.momentum(m)),
                fmt17(w.re),
                fmt17(w.im),
            ]);
        }
    }
    let direct = momentum_density(&state);
    let a2 = state.density();
    let xm = t.x_marginal.iter().zip(&a2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pm = t.p_marginal.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (lo, hi) = t.lattice.span();
    let summary = json!({
        "potential": potential_json(cfg),
        "P": sol.p,
        "h": h,
        "grid": t.size(),
        "window": { "m_lo": t.lattice.m_lo, "m_hi": t.lattice.m_hi, "momentum_lo": lo, "momentum_hi": hi },
        "mass": t.mass,
        "window_mass": t.window_mass(),
        "tail": t.tail,
        "max_imag": t.max_imag,
        "x_marginal_error": xm,
        "p_marginal_error": pm,
    });
    sink.emit("wigner", summary, Some(&table))?;
    sink.svg("wigner", || {
        let stride = (nodes.len() / 128).max(1);
        let xs: Vec<f64> = nodes.iter().step_by(stride).copied().collect();
        let ms: Vec<i64> = t.lattice.indices().collect();
        let ys: Vec<f64> = ms.iter().map(|m| t.lattice.momentum(*m)).collect();
        let z: Vec<Vec<f64>> =
            (0..nodes.len()).step_by(stride).map(|j| ms.iter().map(|m| t.value(j, *m).re).collect()).collect();
        plot::heatmap(&format!("Re W, P = {}, h = {h}", sol.p), &xs, &ys, &z, "x", "2πp")
    })
}

fn default_symbols(l: &ClassicalLevel64) -> Vec<SymbolSpec> {
    use crate::config::FactorSpec;
    vec![
        SymbolSpec {
            name: Some("on-level".into()),
            x: FactorSpec::Bump { center: -0.25, half_width: 0.25 },
            p: FactorSpec::Bump { center: l.p_plus(-0.25), half_width: 0.45 },
        },
        SymbolSpec {
            name: Some("off-level".into()),
            x: FactorSpec::Constant(1.0),
            p: FactorSpec::Bump { center: l.p_max() + 0.4, half_width: 0.2 },
        },
    ]
}

pub fn sweep(cfg: &RunConfig, sink: &Sink) -> Result<(), Failure> {
    let l = level(cfg)?;
    let hs = cfg.h_list();
    let symbols = if cfg.symbols.is_empty() { default_symbols(&l) } else { cfg.symbols.clone() };
    let opts = SweepOptions {
        cell: cell_options(cfg),
        wigner: wigner_options(cfg),
        min_grid: cfg.grid.unwrap_or(MIN_GRID),
    };
    let mut table = Table::new(vec!["symbol", "h", "grid", "metric", "value", "reference", "abs_error", "tail", "max_imag"]);
    let mut reports = Vec::new();
    let mut plot_series = Vec::new();
    for (i, spec) in symbols.iter().enumerate() {
        let name = spec.label(i);
        let rep = convergence_sweep(&cfg.potential.build(), cfg.p(), &spec.build(), &hs, &opts)?;
        for r in &rep.rows {
            table.push(vec![
                name.clone(),
                fmt17(r.h),
                r.grid_size.to_string(),
                "I_f".into(),
                fmt17(r.value),
                fmt17(r.limit),
                fmt17(r.error),
                fmt17(r.tail),
                fmt17(r.max_imag),
            ]);
        }
        let fit = rep.fit.filter(|f| f.points >= 3);
        plot_series.push((name.clone(), rep.rows.iter().map(|r| (r.h, r.error)).collect::<Vec<_>>(), fit.map(|f| f.order)));
        reports.push(json!({
            "symbol": name,
            "spec": spec,
            "limit": rep.limit,
            "straddles_level_bounds": rep.straddles,
            "rows": rep.rows.iter().map(|r| json!({
                "h": r.h, "metric": "I_f", "value": r.value, "reference": r.limit, "abs_error": r.error,
            })).collect::<Vec<_>>(),
            "fit": fit.map(|f| json!({
                "order": f.order,
                "half_width_95": f.half_width_95,
                "residual": f.residual,
                "points": f.points,
            })),
        }));
    }
    let summary = json!({
        "potential": potential_json(cfg),
        "P": cfg.p(),
        "h_list": hs,
        "reports": reports,
    });
    sink.emit("sweep", summary, Some(&table))?;
    sink.svg("sweep", || plot::loglog(&format!("|I_f(h) - limit|, P = {}", cfg.p()), &plot_series))
}

struct PhaseRow {
    m: i64,
    p_hat: f64,
    s: f64,
    j1: f64,
    j2: Complex64,
    direct: Complex64,
    direct_error: f64,
}

pub fn phase(cfg: &RunConfig, sink: &Sink, target: Option<f64>) -> Result<(), Failure> {
    let l = level(cfg)?;
    let h = cfg.h();
    let f = cfg.symbols.first().map_or_else(|| TestSymbol::constant(1.0), SymbolSpec::build);
    let step = 2.0 * std::f64::consts::PI * h;
    let margin = 0.05 * (l.p_max() - l.p_min());
    let (lo, hi) = (l.p_min() + margin, l.p_max() - margin);
    let ms: Vec<i64> = match target {
        Some(s) => {
            if !(s > lo && s < hi) {
                return Err(Failure::validation(format!("s = {s} not inside ({lo}, {hi})")));
            }
            vec![((s - l.p()) / step).round() as i64]
        }
        None => (((lo - l.p()) / step).ceil() as i64..=((hi - l.p()) / step).floor() as i64).collect(),
    };
    let opts = DirectOptions { tol: cfg.tolerances.direct, ..DirectOptions::default() };
    let rows: Vec<PhaseRow> = ms
        .par_iter()
        .map(|&m| -> Result<PhaseRow, Failure> {
            let fam = PhaseFamily::lattice(&l, h, m);
            let sp = stationary_phase_estimate(&fam, &f, XBar::Rotation, h, None)?;
            let d = lattice_integral(&fam, &f, XBar::Rotation, h, None, &opts)?;
            Ok(PhaseRow {
                m,
                p_hat: fam.s() / (2.0 * std::f64::consts::PI),
                s: fam.s(),
                j1: sp.j1,
                j2: sp.j2,
                direct: d.value,
                direct_error: d.error,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(vec!["m", "p_hat", "two_pi_p_hat", "j1", "j2_re", "j2_im", "direct_re", "direct_im", "rel_error"]);
    let mut out = Vec::new();
    for r in &rows {
        let total = Complex64::new(r.j1, 0.0) + r.j2;
        let rel = (r.direct - total).norm() / r.direct.norm();
        table.push(vec![
            r.m.to_string(),
            fmt17(r.p_hat),
            fmt17(r.s),
            fmt17(r.j1),
            fmt17(r.j2.re),
            fmt17(r.j2.im),
            fmt17(r.direct.re),
            fmt17(r.direct.im),
            fmt17(rel),
        ]);
        out.push(json!({ "m": r.m, "two_pi_p_hat": r.s, "rel_error": rel, "direct_error": r.direct_error }));
    }
    let summary = json!({ "potential": potential_json(cfg), "P": l.p(), "h": h, "points": out });
    sink.emit("phase", summary, Some(&table))?;
    let Some(mid) = rows.get(rows.len() / 2) else { return Ok(()) };
    let fam = PhaseFamily::new(&l, mid.s);
    let marks: Vec<(f64, f64, String)> = fam
        .critical_points()?
        .iter()
        .map(|c| {
            let tag = match c.kind {
                CriticalKind::Diagonal => "diag",
                CriticalKind::Antidiagonal => "anti",
            };
            (c.representative.0, c.representative.1, format!("{tag} σ={}", c.hessian.signature()))
        })
        .collect();
    sink.svg("phase", || {
        plot::contour(&format!("S(x, y), 2πp̂ = {:.4}", mid.s), |x, y| fam.phase(x, y), (-0.5, 0.5), (-0.5, 0.5), 14, &marks)
    })
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn zero_potential_checks(out: &mut Vec<Check>) -> Result<(), Failure> {
    let p = 1.3;
    let l = hbar_of_p(&Potential64::Zero, p, 1e-14)?;
    out.push(Check {
        name: "zero: P_crit = 0",
        pass: p_crit(&Potential64::Zero)? == 0.0,
        detail: String::new(),
    });
    let f = TestSymbol::new(Factor::Bump { center: 0.1, half_width: 0.3 }, Factor::Bump { center: 1.25, half_width: 0.2 });
    let exact = integrate_interval(|x| f.eval_x(x), -0.5, 0.5, 1e-14)? * f.eval_p(p);
    for h in [0.2, 0.1] {
        let sol = solve_cell_at_level(&l, h, PeriodicGrid::for_resolution(h, GRID_FACTOR, MIN_GRID)?, &CellOptions::default())?;
        let err = (sol.hbar - p * p / 2.0).abs();
        out.push(Check { name: "zero: H_bar = P^2/2", pass: err <= 1e-11, detail: format!("h = {h}: {err:.1e}") });
        let spread = sol.v.iter().chain(&sol.v_star).fold(0.0f64, |m, v| m.max(v.abs()));
        out.push(Check { name: "zero: v = v* = const", pass: spread <= 1e-11, detail: format!("h = {h}: {spread:.1e}") });
        let t = wigner_transform(&sol.evans_state()?, 0.0, &WignerOptions::default())?;
        let mut dev = 0.0f64;
        for j in 0..t.size() {
            for m in t.m_min()..=t.m_max() {
                dev = dev.max((t.value(j, m) - Complex64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0)).norm());
            }
        }
        out.push(Check { name: "zero: Wigner table is a delta", pass: dev <= 1e-11, detail: format!("h = {h}: {dev:.1e}") });
        let i = integrate_symbol(&t, &f)?.value;
        out.push(Check {
            name: "zero: I_f exact",
            pass: (i - exact).abs() <= 1e-11,
            detail: format!("h = {h}: {:.1e}", (i - exact).abs()),
        });
    }
    Ok(())
}

fn pendulum_checks(out: &mut Vec<Check>) -> Result<(), Failure> {
    let v = Potential64::pendulum(1.0);
    let pc = p_crit(&v)?;
    out.push(Check {
        name: "pendulum: P_crit = 4/pi",
        pass: (pc - 4.0 / std::f64::consts::PI).abs() <= 1e-8,
        detail: format!("{pc:.15}"),
    });
    let l = hbar_of_p(&v, 1.6, 1e-13)?;
    let series = build_expansion(&l, 3)?;
    out.push(Check {
        name: "pendulum: H_1 = 0",
        pass: series.hbar_coefficient(1).abs() <= 1e-11,
        detail: format!("{:.1e}; H_3 = {:.2e}", series.hbar_coefficient(1), series.hbar_coefficient(3)),
    });
    let h = 0.1;
    let grid = PeriodicGrid::new(256)?;
    let sol = solve_cell_at_level(&l, h, grid, &CellOptions::default())?;
    let ch = cole_hopf_hbar(&v, 1.6, h, grid, Branch::Forward, Discretization::Spectral)?;
    let d = (sol.hbar - ch.hbar).abs();
    out.push(Check { name: "pendulum: Newton = Cole-Hopf", pass: d <= 1e-8, detail: format!("{d:.1e}") });
    let state = sol.evans_state()?;
    let t = wigner_transform(&state, l.p_max() - l.p_min(), &WignerOptions::default())?;
    let pm = t.p_marginal.iter().zip(momentum_density(&state)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(Check {
        name: "pendulum: Wigner marginals",
        pass: (t.mass - 1.0).abs() <= 1e-6 && pm <= 1e-8 && t.max_imag <= 1e-10,
        detail: format!("mass - 1 = {:.1e}, p-marginal {pm:.1e}", t.mass - 1.0),
    });
    let fsym = TestSymbol::new(Factor::Bump { center: 0.2, half_width: 0.35 }, Factor::Bump { center: 1.5, half_width: 0.5 });
    let limit = mather_limit_functional(&l, &fsym)?;
    let avg = wkw_core::classical::mather_average(&l, &fsym)?;
    out.push(Check {
        name: "pendulum: limit functional, two sides",
        pass: (limit - avg).abs() <= 1e-8,
        detail: format!("{:.1e}", (limit - avg).abs()),
    });
    let hs = [0.2, 0.1, 0.05];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let sol = solve_cell_at_level(&l, h, PeriodicGrid::new(256)?, &CellOptions::default())?;
            Ok((sol.hbar - l.hbar() - h * h * series.hbar_coefficient(2)).abs())
        })
        .collect::<Result<_, Failure>>()?;
    let order = fit_order(&hs, &errs).map_or(f64::NAN, |f| f.order);
    out.push(Check { name: "pendulum: H_bar expansion order", pass: order >= 2.6, detail: format!("{order:.2}") });
    Ok(())
}

pub fn selftest(sink: &Sink, quick: bool) -> Result<(), Failure> {
    let mut checks = Vec::new();
    zero_potential_checks(&mut checks)?;
    if !quick {
        pendulum_checks(&mut checks)?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let mut table = Table::new(vec!["check", "pass", "detail"]);
    for c in &checks {
        table.push(vec![c.name.into(), c.pass.to_string(), c.detail.clone()]);
    }
    let summary = json!({
        "quick": quick,
        "passed": failed.is_empty(),
        "checks": checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect::<Vec<_>>(),
    });
    sink.emit("selftest", summary, Some(&table))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::acceptance(format!("failed checks: {}", failed.join(", "))))
    }
}
