//! Minimal self-contained SVG line plots for spectrum curves. Plots are
//! diagnostics only; nothing downstream parses them back.

use crate::spectrum::SpectrumCurve;
use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 480.0;
const ML: f64 = 72.0;
const MR: f64 = 24.0;
const MT: f64 = 42.0;
const MB: f64 = 54.0;

fn pad_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.06 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = lo.abs().max(0.5) * 0.2;
        (lo - pad, lo + pad)
    }
}

fn fnum(v: f64) -> String {
    format!("{v:.4}")
}

/// Render one curve (x versus headline value) as a standalone SVG document.
pub fn render_curve(curve: &SpectrumCurve, title: &str) -> String {
    let mut s = String::with_capacity(4096);
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        title
    );

    if curve.points.is_empty() {
        let _ = write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" \
             text-anchor=\"middle\">no samples</text>\n</svg>\n",
            W / 2.0,
            H / 2.0
        );
        return s;
    }

    let xs: Vec<f64> = curve.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = curve.points.iter().map(|p| p.value).collect();
    let (x0, x1) = pad_range(
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = pad_range(
        ys.iter().cloned().fold(f64::INFINITY, f64::min),
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    // Frame and ticks.
    let _ = write!(
        s,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>\n",
        W - ML - MR,
        H - MT - MB
    );
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let xp = px(xv);
        let yp = py(yv);
        let _ = write!(
            s,
            "<line x1=\"{xp:.2}\" y1=\"{}\" x2=\"{xp:.2}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{xp:.2}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            H - MB,
            H - MB + 5.0,
            H - MB + 18.0,
            fnum(xv)
        );
        let _ = write!(
            s,
            "<line x1=\"{}\" y1=\"{yp:.2}\" x2=\"{ML}\" y2=\"{yp:.2}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            ML - 5.0,
            ML - 8.0,
            yp + 4.0,
            fnum(yv)
        );
    }
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 12.0,
        curve.axis
    );

    // Polyline through the samples plus point markers.
    if curve.points.len() > 1 {
        let mut pts = String::new();
        for p in &curve.points {
            let _ = write!(pts, "{:.2},{:.2} ", px(p.x), py(p.value));
        }
        let _ = write!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.6\"/>\n",
            pts.trim_end()
        );
    }
    for p in &curve.points {
        let _ = write!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.4\" fill=\"#1f77b4\"/>\n",
            px(p.x),
            py(p.value)
        );
    }
    if curve.resolution_flagged {
        let _ = write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             fill=\"#b30000\" text-anchor=\"end\">window below resolution floor</text>\n",
            W - MR - 4.0,
            MT + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}
