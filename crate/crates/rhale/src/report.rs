//! Hand-rolled SVG rendering: effect figures (curve with a shaded deviation
//! band over per-bin effect bars), baseline comparison plots, and benchmark
//! metric-vs-K charts. No plotting dependency; output is plain SVG 1.1.

use std::fmt::Write as _;

use crate::estimator::EffectResult;
use crate::evaluation::{BenchmarkReport, Metric};

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Short tick label: three decimals, trailing zeros trimmed.
fn tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    let mut s = if a >= 1e4 || a < 1e-3 {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    };
    if s.contains('.') && !s.contains('e') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Maps a data rectangle onto a pixel rectangle (y grows downward).
#[derive(Clone, Copy)]
struct Frame {
    px0: f64,
    py0: f64,
    pw: f64,
    ph: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn new(px0: f64, py0: f64, pw: f64, ph: f64, xr: (f64, f64), yr: (f64, f64)) -> Self {
        let pad = |lo: f64, hi: f64| {
            let span = (hi - lo).abs();
            let margin = if span > 0.0 { 0.05 * span } else { 1.0 };
            (lo - margin, hi + margin)
        };
        let (xmin, xmax) = pad(xr.0, xr.1);
        let (ymin, ymax) = pad(yr.0, yr.1);
        Frame {
            px0,
            py0,
            pw,
            ph,
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    fn x(&self, v: f64) -> f64 {
        self.px0 + (v - self.xmin) / (self.xmax - self.xmin) * self.pw
    }

    fn y(&self, v: f64) -> f64 {
        self.py0 + self.ph - (v - self.ymin) / (self.ymax - self.ymin) * self.ph
    }

    fn polyline(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.x(x), self.y(y)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Frame border, tick marks, and labels.
    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        let _ = write!(
            out,
            "<rect x='{:.2}' y='{:.2}' width='{:.2}' height='{:.2}' fill='none' stroke='#444' stroke-width='1'/>",
            self.px0, self.py0, self.pw, self.ph
        );
        for i in 0..=4 {
            let fx = self.xmin + (self.xmax - self.xmin) * i as f64 / 4.0;
            let px = self.x(fx);
            let _ = write!(
                out,
                "<line x1='{px:.2}' y1='{:.2}' x2='{px:.2}' y2='{:.2}' stroke='#444' stroke-width='1'/>\
                 <text x='{px:.2}' y='{:.2}' font-size='11' text-anchor='middle' fill='#333'>{}</text>",
                self.py0 + self.ph,
                self.py0 + self.ph + 5.0,
                self.py0 + self.ph + 18.0,
                tick(fx)
            );
            let fy = self.ymin + (self.ymax - self.ymin) * i as f64 / 4.0;
            let py = self.y(fy);
            let _ = write!(
                out,
                "<line x1='{:.2}' y1='{py:.2}' x2='{:.2}' y2='{py:.2}' stroke='#444' stroke-width='1'/>\
                 <text x='{:.2}' y='{:.2}' font-size='11' text-anchor='end' fill='#333'>{}</text>",
                self.px0 - 5.0,
                self.px0,
                self.px0 - 8.0,
                py + 4.0,
                tick(fy)
            );
        }
        let _ = write!(
            out,
            "<text x='{:.2}' y='{:.2}' font-size='12' text-anchor='middle' fill='#111'>{}</text>",
            self.px0 + self.pw / 2.0,
            self.py0 + self.ph + 34.0,
            esc(x_label)
        );
        let _ = write!(
            out,
            "<text x='{:.2}' y='{:.2}' font-size='12' text-anchor='middle' fill='#111' transform='rotate(-90 {:.2} {:.2})'>{}</text>",
            self.px0 - 42.0,
            self.py0 + self.ph / 2.0,
            self.px0 - 42.0,
            self.py0 + self.ph / 2.0,
            esc(y_label)
        );
    }
}

fn svg_open(out: &mut String, w: u32, h: u32, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns='http://www.w3.org/2000/svg' width='{w}' height='{h}' viewBox='0 0 {w} {h}'>\
         <rect width='{w}' height='{h}' fill='white'/>\
         <text x='{:.1}' y='22' font-size='15' text-anchor='middle' fill='#111' font-weight='bold'>{}</text>",
        w as f64 / 2.0,
        esc(title)
    );
}

/// Samples the curve and envelope densely enough to show the envelope's
/// within-bin curvature (it is sqrt-quadratic between knots).
fn sampled_curves(result: &EffectResult) -> (Vec<(f64, f64)>, Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let limits = result.partition.limits();
    let mut xs = Vec::new();
    for w in limits.windows(2) {
        for i in 0..8 {
            xs.push(w[0] + (w[1] - w[0]) * i as f64 / 8.0);
        }
    }
    xs.push(*limits.last().unwrap());
    let mut curve = Vec::with_capacity(xs.len());
    let mut upper = Vec::with_capacity(xs.len());
    let mut lower = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = result.value_at(x).unwrap();
        let s = result.std_at(x).unwrap();
        curve.push((x, v));
        upper.push((x, v + s));
        lower.push((x, v - s));
    }
    (curve, upper, lower)
}

/// Two-panel effect figure: accumulated curve with its ±STD band on top,
/// per-bin effect bars with deviation whiskers and histogram glyphs below.
pub fn effect_svg(result: &EffectResult, feature_name: &str, title: &str) -> String {
    let (curve, upper, lower) = sampled_curves(result);
    let ymin = lower.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ymax = upper.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let xr = (result.partition.lower(), result.partition.upper());

    let mut out = String::new();
    svg_open(&mut out, 840, 640, title);
    let top = Frame::new(70.0, 40.0, 730.0, 250.0, xr, (ymin, ymax));

    // Shaded band: upper edge left-to-right, lower edge back.
    let mut band: Vec<(f64, f64)> = upper.clone();
    band.extend(lower.iter().rev());
    let _ = write!(
        out,
        "<polygon points='{}' fill='#4a90d9' fill-opacity='0.25' stroke='none'/>",
        top.polyline(&band)
    );
    let _ = write!(
        out,
        "<polyline points='{}' fill='none' stroke='#1f5fa8' stroke-width='2'/>",
        top.polyline(&curve)
    );
    top.axes(
        &mut out,
        feature_name,
        &format!("effect on the output"),
    );

    // Bottom panel: bin means as bars, ±sigma whiskers, histogram glyphs.
    let mut bmin = 0.0f64;
    let mut bmax = 0.0f64;
    for b in &result.bins {
        let s = b.sigma.unwrap_or(0.0);
        bmin = bmin.min(b.mu - s).min(b.histogram.min);
        bmax = bmax.max(b.mu + s).max(b.histogram.max);
    }
    let bot = Frame::new(70.0, 360.0, 730.0, 220.0, xr, (bmin, bmax));
    let zero = bot.y(0.0);
    for b in &result.bins {
        let x0 = bot.x(b.lower);
        let x1 = bot.x(b.upper);
        let ym = bot.y(b.mu);
        let (ry0, ry1) = if ym < zero { (ym, zero) } else { (zero, ym) };
        let _ = write!(
            out,
            "<rect x='{:.2}' y='{:.2}' width='{:.2}' height='{:.2}' fill='#74a9cf' fill-opacity='0.7' stroke='#2b6ca3' stroke-width='0.8'/>",
            x0,
            ry0,
            (x1 - x0).max(0.5),
            (ry1 - ry0).max(0.5)
        );
        // Histogram glyph: horizontal extents proportional to bucket counts.
        let h = &b.histogram;
        if h.max > h.min {
            let peak = h.buckets.iter().copied().max().unwrap_or(1).max(1) as f64;
            let cx = 0.5 * (x0 + x1);
            let half_w = 0.4 * (x1 - x0);
            let nb = h.buckets.len();
            for (bi, &c) in h.buckets.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let v0 = h.min + (h.max - h.min) * bi as f64 / nb as f64;
                let v1 = h.min + (h.max - h.min) * (bi + 1) as f64 / nb as f64;
                let w = half_w * c as f64 / peak;
                let gy0 = bot.y(v1);
                let gy1 = bot.y(v0);
                let _ = write!(
                    out,
                    "<rect x='{:.2}' y='{:.2}' width='{:.2}' height='{:.2}' fill='#d95f02' fill-opacity='0.35'/>",
                    cx - w,
                    gy0,
                    2.0 * w,
                    (gy1 - gy0).max(0.3)
                );
            }
        }
        if let Some(s) = b.sigma {
            let cx = 0.5 * (x0 + x1);
            let _ = write!(
                out,
                "<line x1='{cx:.2}' y1='{:.2}' x2='{cx:.2}' y2='{:.2}' stroke='#7a1f05' stroke-width='1.5'/>",
                bot.y(b.mu + s),
                bot.y(b.mu - s)
            );
        }
    }
    bot.axes(&mut out, feature_name, "bin effect");
    out.push_str("</svg>");
    out
}

/// ICE spaghetti with the PDP overlaid. At most 150 instance curves are
/// drawn (deterministically the first 150) to keep files small.
pub fn pdp_ice_svg(
    grid: &[f64],
    pdp: &[f64],
    ice: &[Vec<f64>],
    feature_name: &str,
    title: &str,
) -> String {
    let shown = ice.iter().take(150).collect::<Vec<_>>();
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for row in &shown {
        for &v in row.iter() {
            ymin = ymin.min(v);
            ymax = ymax.max(v);
        }
    }
    for &v in pdp {
        ymin = ymin.min(v);
        ymax = ymax.max(v);
    }
    let mut out = String::new();
    svg_open(&mut out, 840, 520, title);
    let frame = Frame::new(
        70.0,
        40.0,
        730.0,
        400.0,
        (grid[0], *grid.last().unwrap()),
        (ymin, ymax),
    );
    for row in &shown {
        let pts: Vec<(f64, f64)> = grid.iter().copied().zip(row.iter().copied()).collect();
        let _ = write!(
            out,
            "<polyline points='{}' fill='none' stroke='#999' stroke-width='0.6' stroke-opacity='0.5'/>",
            frame.polyline(&pts)
        );
    }
    let pts: Vec<(f64, f64)> = grid.iter().copied().zip(pdp.iter().copied()).collect();
    let _ = write!(
        out,
        "<polyline points='{}' fill='none' stroke='#c0392b' stroke-width='2.5'/>",
        frame.polyline(&pts)
    );
    frame.axes(&mut out, feature_name, "model output");
    let _ = write!(
        out,
        "<text x='740' y='50' font-size='11' text-anchor='end' fill='#c0392b'>PDP</text>\
         <text x='740' y='64' font-size='11' text-anchor='end' fill='#777'>ICE ({} shown)</text>",
        shown.len()
    );
    out.push_str("</svg>");
    out
}

/// Metric-vs-K chart: one point per fixed K (means over feasible trials,
/// gaps where a K was infeasible) with the auto-binning mean as a horizontal
/// reference line.
pub fn bench_svg(report: &BenchmarkReport, metric: Metric, title: &str) -> String {
    let metric_name = match metric {
        Metric::Mu => "L_mu",
        Metric::Sigma => "L_sigma",
        Metric::Rho => "L_rho",
    };
    let fixed: Vec<(f64, f64)> = report
        .aggregates
        .iter()
        .filter(|a| a.method == "fixed")
        .filter_map(|a| a.mean_of(metric).map(|m| (a.k.unwrap() as f64, m)))
        .collect();
    let auto = report
        .aggregate("auto", None)
        .and_then(|a| a.mean_of(metric));
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &(_, v) in &fixed {
        ymin = ymin.min(v);
        ymax = ymax.max(v);
    }
    if let Some(v) = auto {
        ymin = ymin.min(v);
        ymax = ymax.max(v);
    }
    if !ymin.is_finite() {
        ymin = 0.0;
        ymax = 1.0;
    }
    ymin = ymin.min(0.0);
    let kmax = fixed.iter().map(|p| p.0).fold(1.0, f64::max);
    let mut out = String::new();
    svg_open(&mut out, 720, 480, title);
    let frame = Frame::new(80.0, 40.0, 590.0, 360.0, (0.0, kmax), (ymin, ymax));
    if let Some(v) = auto {
        let y = frame.y(v);
        let _ = write!(
            out,
            "<line x1='{:.2}' y1='{y:.2}' x2='{:.2}' y2='{y:.2}' stroke='#c0392b' stroke-width='1.8' stroke-dasharray='7,4'/>\
             <text x='{:.2}' y='{:.2}' font-size='11' fill='#c0392b'>auto</text>",
            frame.px0,
            frame.px0 + frame.pw,
            frame.px0 + frame.pw - 34.0,
            y - 6.0
        );
    }
    if fixed.len() > 1 {
        let _ = write!(
            out,
            "<polyline points='{}' fill='none' stroke='#2b6ca3' stroke-width='1.5'/>",
            frame.polyline(&fixed)
        );
    }
    for &(k, v) in &fixed {
        let _ = write!(
            out,
            "<circle cx='{:.2}' cy='{:.2}' r='2.6' fill='#2b6ca3'/>",
            frame.x(k),
            frame.y(v)
        );
    }
    frame.axes(&mut out, "fixed bin count K", metric_name);
    out.push_str("</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::BinningConfig;
    use crate::estimator::{rhale_from_effects, Binning};
    use crate::evaluation::{run_benchmark, BenchmarkConfig};
    use crate::model::{EffectSource, LocalEffects};
    use crate::synthetic::Example;

    /// Minimal well-formedness check: tags balance and attributes quote.
    fn assert_well_formed_xml(svg: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = svg;
        while let Some(open) = rest.find('<') {
            let tail = &rest[open + 1..];
            let close = tail.find('>').expect("unclosed tag");
            let tag = &tail[..close];
            if let Some(name) = tag.strip_prefix('/') {
                let top = stack.pop().expect("closing tag with empty stack");
                assert_eq!(top, name.trim(), "mismatched closing tag");
            } else if !tag.ends_with('/') && !tag.starts_with('!') && !tag.starts_with('?') {
                let name: String = tag
                    .chars()
                    .take_while(|c| !c.is_whitespace() && *c != '>')
                    .collect();
                stack.push(name);
            }
            assert_eq!(tag.matches('\'').count() % 2, 0, "unbalanced quotes");
            rest = &tail[close + 1..];
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    fn toy_result() -> crate::estimator::EffectResult {
        let xs: Vec<f64> = (0..60).map(|i| i as f64 / 59.0).collect();
        let effects: Vec<f64> = xs.iter().map(|&x| if x < 0.5 { 2.0 } else { -1.0 }).collect();
        let e = LocalEffects::new(0, xs, effects, EffectSource::Analytic).unwrap();
        rhale_from_effects(&e, &BinningConfig::default(), &Binning::Fixed(4)).unwrap()
    }

    #[test]
    fn effect_svg_is_well_formed() {
        let svg = effect_svg(&toy_result(), "x1", "effect of x1");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert_well_formed_xml(&svg);
        assert!(svg.contains("polygon"));
        assert!(svg.contains("polyline"));
    }

    #[test]
    fn pdp_ice_svg_is_well_formed() {
        let grid = vec![0.0, 0.5, 1.0];
        let pdp = vec![0.0, 0.25, 1.0];
        let ice = vec![vec![0.0, 0.2, 0.9], vec![0.1, 0.3, 1.1]];
        let svg = pdp_ice_svg(&grid, &pdp, &ice, "x1", "PDP & ICE");
        assert_well_formed_xml(&svg);
        assert!(svg.contains("PDP"));
    }

    #[test]
    fn bench_svg_is_well_formed() {
        let mut config = BenchmarkConfig::new(Example::Piecewise, 0);
        config.n_per_trial = 200;
        config.trials = 1;
        config.k_list = vec![2, 4];
        config.n_dense = 10_000;
        config.k_dense = 40;
        let report = run_benchmark(&config).unwrap();
        for metric in [Metric::Mu, Metric::Sigma, Metric::Rho] {
            let svg = bench_svg(&report, metric, "benchmark");
            assert_well_formed_xml(&svg);
            assert!(svg.contains("auto"));
        }
    }

    #[test]
    fn titles_are_escaped() {
        let svg = effect_svg(&toy_result(), "x<1>", "a & b");
        assert!(svg.contains("a &amp; b"));
        assert!(svg.contains("x&lt;1&gt;"));
        assert_well_formed_xml(&svg);
    }
}
