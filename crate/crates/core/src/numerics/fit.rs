use statrs::distribution::{ContinuousCDF, StudentsT};

/// Least-squares fit `log e = order · log h + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub order: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval for `order`; infinite with
    /// only two points.
    pub half_width_95: f64,
    pub points: usize,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

impl OrderFit {
    pub fn interval(&self) -> (f64, f64) {
        (self.order - self.half_width_95, self.order + self.half_width_95)
    }
}

/// Fits the convergence order from pairs `(h, error)`. Pairs with a
/// non-positive or non-finite entry are skipped; returns `None` when fewer
/// than two remain or all `h` coincide.
pub fn fit_order(hs: &[f64], errs: &[f64]) -> Option<OrderFit> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|(h, e)| h.is_finite() && e.is_finite() && **h > 0.0 && **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - order * p.0).powi(2)).sum();
    let half_width_95 = if n > 2 {
        let se = (sse / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0).ok()?.inverse_cdf(0.975);
        t * se
    } else {
        f64::INFINITY
    };
    Some(OrderFit { order, intercept, half_width_95, points: n, residual: (sse / nf).sqrt() })
}
