//! Self-contained SVG diagnostics.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", W / 2.0, H - 12.0, escape(xlabel));
        let _ = writeln!(
            out,
            "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>",
            H / 2.0,
            H / 2.0,
            escape(ylabel)
        );
        for (v, at) in [(self.x.0, self.px(self.x.0)), (self.x.1, self.px(self.x.1))] {
            let _ = writeln!(out, "<text x=\"{at:.1}\" y=\"{}\" text-anchor=\"middle\">{v:.3}</text>", H - PAD + 16.0);
        }
        for (v, at) in [(self.y.0, self.py(self.y.0)), (self.y.1, self.py(self.y.1))] {
            let _ = writeln!(out, "<text x=\"{}\" y=\"{at:.1}\" text-anchor=\"end\">{v:.3}</text>", PAD - 6.0);
        }
    }
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}

/// `(label, [(h, error)], fitted slope)`.
pub type Series = (String, Vec<(f64, f64)>, Option<f64>);

/// Log-log convergence plot.
pub fn loglog(title: &str, series: &[Series]) -> String {
    let pts = |s: &Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        s.iter().filter(|(h, e)| *h > 0.0 && *e > 0.0).map(|(h, e)| (h.log10(), e.log10())).collect()
    };
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| pts(&s.1)).collect();
    let frame = Frame { x: bounds(all.iter().map(|p| p.0)), y: bounds(all.iter().map(|p| p.1)) };
    let mut out = header(title);
    frame.axes(&mut out, "log10 h", "log10 error");
    for (i, (label, data, slope)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let p = pts(data);
        let path: Vec<String> = p.iter().map(|(x, y)| format!("{:.2},{:.2}", frame.px(*x), frame.py(*y))).collect();
        let _ = writeln!(out, "<polyline fill=\"none\" stroke=\"{c}\" stroke-width=\"1.5\" points=\"{}\"/>", path.join(" "));
        for (x, y) in &p {
            let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{c}\"/>", frame.px(*x), frame.py(*y));
        }
        let text = match slope {
            Some(s) => format!("{label} (slope {s:.2})"),
            None => label.clone(),
        };
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" fill=\"{c}\">{}</text>", PAD + 8.0, PAD + 16.0 * (i + 1) as f64, escape(&text));
    }
    out.push_str("</svg>\n");
    out
}

/// Level lines of `s(x, y)` on `[x0, x1] × [y0, y1]` by marching squares,
/// with `marks` drawn on top.
pub fn contour(
    title: &str,
    s: impl Fn(f64, f64) -> f64,
    xr: (f64, f64),
    yr: (f64, f64),
    levels: usize,
    marks: &[(f64, f64, String)],
) -> String {
    let n = 96;
    let at = |i: usize, r: (f64, f64)| r.0 + (r.1 - r.0) * i as f64 / n as f64;
    let vals: Vec<Vec<f64>> = (0..=n).map(|i| (0..=n).map(|k| s(at(i, xr), at(k, yr))).collect()).collect();
    let (lo, hi) = bounds(vals.iter().flatten().copied());
    let frame = Frame { x: xr, y: yr };
    let mut out = header(title);
    frame.axes(&mut out, "x", "y");
    for l in 1..=levels {
        let c = lo + (hi - lo) * l as f64 / (levels + 1) as f64;
        let mut d = String::new();
        for i in 0..n {
            for k in 0..n {
                let corners = [
                    (at(i, xr), at(k, yr), vals[i][k]),
                    (at(i + 1, xr), at(k, yr), vals[i + 1][k]),
                    (at(i + 1, xr), at(k + 1, yr), vals[i + 1][k + 1]),
                    (at(i, xr), at(k + 1, yr), vals[i][k + 1]),
                ];
                let mut cross = Vec::with_capacity(4);
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    if (a.2 - c) * (b.2 - c) < 0.0 {
                        let t = (c - a.2) / (b.2 - a.2);
                        cross.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
                    }
                }
                for pair in cross.chunks_exact(2) {
                    let _ = write!(
                        d,
                        "M{:.1},{:.1}L{:.1},{:.1}",
                        frame.px(pair[0].0),
                        frame.py(pair[0].1),
                        frame.px(pair[1].0),
                        frame.py(pair[1].1)
                    );
                }
            }
        }
        let shade = (40.0 + 160.0 * l as f64 / levels as f64) as u8;
        let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"rgb({shade},{shade},{shade})\" stroke-width=\"0.8\"/>");
    }
    for (x, y, label) in marks {
        let (px, py) = (frame.px(*x), frame.py(*y));
        let _ = writeln!(out, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#d62728\"/>");
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"#d62728\">{}</text>", px + 6.0, py - 6.0, escape(label));
    }
    out.push_str("</svg>\n");
    out
}

/// Heat map of `z[i][k]` over cell centres `xs × ys`, blue (negative) to
/// red (positive).
pub fn heatmap(title: &str, xs: &[f64], ys: &[f64], z: &[Vec<f64>], xlabel: &str, ylabel: &str) -> String {
    let frame = Frame { x: bounds(xs.iter().copied()), y: bounds(ys.iter().copied()) };
    let scale = z.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut out = header(title);
    let cw = (W - 2.0 * PAD) / xs.len().max(1) as f64;
    let ch = (H - 2.0 * PAD) / ys.len().max(1) as f64;
    for (i, x) in xs.iter().enumerate() {
        for (k, y) in ys.iter().enumerate() {
            let t = (z[i][k] / scale).clamp(-1.0, 1.0);
            let (r, g, b) = if t >= 0.0 {
                (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
            } else {
                (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
            };
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({},{},{})\"/>",
                frame.px(*x) - cw / 2.0,
                frame.py(*y) - ch / 2.0,
                cw + 0.3,
                ch + 0.3,
                r as u8,
                g as u8,
                b as u8
            );
        }
    }
    frame.axes(&mut out, xlabel, ylabel);
    out.push_str("</svg>\n");
    out
}
