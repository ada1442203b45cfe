//! SVG plots for DISPLAY OF. Output is plain text built from fixed-precision
//! numbers, so identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::error::{MqlError, Result};
use crate::learn::Outputs;
use crate::result::{class_counts, Actuals, ResultSet};
use crate::table::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Cluster colors; cluster `c` uses entry `c % 12`.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#393b79", "#637939",
];

/// Which plot DISPLAY OF produces for a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Bar,
    Scatter,
    Clusters,
}

impl PlotKind {
    pub fn for_result(r: &ResultSet) -> PlotKind {
        match &r.outputs {
            Outputs::Cluster(_) => PlotKind::Clusters,
            Outputs::Real(_) if !r.over => PlotKind::Scatter,
            _ => PlotKind::Bar,
        }
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::Bar => "bar",
            PlotKind::Scatter => "scatter",
            PlotKind::Clusters => "clusters",
        }
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

/// Tick label with at most 4 significant decimals and no trailing zeros.
fn tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// A step from {1, 2, 5}·10^e giving about `n` intervals over `span`.
fn nice_step(span: f64, n: f64) -> f64 {
    let raw = if span > 0.0 { span / n } else { 1.0 };
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Axis range widened to whole steps, with its ticks.
fn axis(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
    let step = nice_step(hi - lo, 5.0);
    let a = (lo / step).floor() * step;
    let b = (hi / step).ceil() * step;
    let n = ((b - a) / step).round() as usize;
    let ticks = (0..=n).map(|i| a + i as f64 * step).collect();
    (a, b, ticks)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        LEFT + (v - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

struct Svg(String);

impl Svg {
    fn new(title: &str) -> Svg {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            esc(title)
        );
        Svg(s)
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.0,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{extra}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, body: &str) {
        let _ = writeln!(
            self.0,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#,
            esc(body)
        );
    }

    fn y_axis(&mut self, f: &Frame, ticks: &[f64], label: &str) {
        self.line(LEFT, TOP, LEFT, HEIGHT - BOTTOM, "black", "");
        for &t in ticks {
            let y = f.py(t);
            self.line(LEFT - 4.0, y, LEFT, y, "black", "");
            self.text(LEFT - 7.0, y + 4.0, "end", &tick(t));
        }
        let _ = writeln!(
            self.0,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (TOP + HEIGHT - BOTTOM) / 2.0,
            (TOP + HEIGHT - BOTTOM) / 2.0,
            esc(label)
        );
    }

    fn x_axis(&mut self, f: &Frame, ticks: &[f64], label: &str) {
        let base = HEIGHT - BOTTOM;
        self.line(LEFT, base, WIDTH - RIGHT, base, "black", "");
        for &t in ticks {
            let x = f.px(t);
            self.line(x, base, x, base + 4.0, "black", "");
            self.text(x, base + 16.0, "middle", &tick(t));
        }
        self.x_title(label);
    }

    fn x_title(&mut self, label: &str) {
        self.text((LEFT + WIDTH - RIGHT) / 2.0, HEIGHT - 16.0, "middle", label);
    }

    fn finish(mut self) -> String {
        self.0.push_str("</svg>\n");
        self.0
    }
}

fn bars(title: &str, y_label: &str, x_label: &str, items: &[(String, f64)]) -> Result<String> {
    if items.is_empty() {
        return Err(MqlError::EmptyResult);
    }
    let lo = items.iter().map(|i| i.1).fold(0.0, f64::min);
    let hi = items.iter().map(|i| i.1).fold(0.0, f64::max);
    let (a, b, ticks) = axis(lo, hi);
    let f = Frame { x: (0.0, items.len() as f64), y: (a, b) };
    let mut svg = Svg::new(title);
    svg.y_axis(&f, &ticks, y_label);
    let slot = f.px(1.0) - f.px(0.0);
    let zero = f.py(0.0);
    for (i, (label, v)) in items.iter().enumerate() {
        let x = f.px(i as f64) + slot * 0.1;
        let y = f.py(*v);
        let _ = writeln!(
            svg.0,
            r##"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4c72b0"><title>{}: {}</title></rect>"##,
            y.min(zero),
            slot * 0.8,
            (zero - y).abs(),
            esc(label),
            tick(*v)
        );
        svg.text(x + slot * 0.4, HEIGHT - BOTTOM + 16.0, "middle", label);
    }
    svg.line(LEFT, zero, WIDTH - RIGHT, zero, "black", "");
    svg.x_title(x_label);
    Ok(svg.finish())
}

/// One bar per row; class results plot one bar per class count.
pub fn render_bar(r: &ResultSet) -> Result<String> {
    if r.is_empty() {
        return Err(MqlError::EmptyResult);
    }
    let x_label = r.labels.first().map_or("row", |l| l.0.as_str());
    match &r.outputs {
        Outputs::Real(v) => {
            let items: Vec<(String, f64)> = r.row_labels().into_iter().zip(v.iter().copied()).collect();
            bars(&format!("Predicted {}", r.target_name), &r.target_name, x_label, &items)
        }
        Outputs::Class(_) => {
            let items: Vec<(String, f64)> = class_counts(r).into_iter().map(|(c, n)| (c, n as f64)).collect();
            bars(&format!("Predicted {} classes", r.target_name), "count", "class", &items)
        }
        Outputs::Cluster(v) => {
            let k = v.iter().max().map_or(0, |m| m + 1);
            let items: Vec<(String, f64)> = (0..k)
                .map(|c| (c.to_string(), v.iter().filter(|&&x| x == c).count() as f64))
                .collect();
            bars("Cluster sizes", "count", "cluster", &items)
        }
    }
}

/// Points (actual, predicted) with the y = x reference line.
pub fn render_scatter(r: &ResultSet) -> Result<String> {
    let (Outputs::Real(pred), Some(Actuals::Real(actual))) = (&r.outputs, &r.actuals) else {
        return Err(MqlError::MissingActuals);
    };
    if pred.is_empty() {
        return Err(MqlError::EmptyResult);
    }
    let all = pred.iter().chain(actual);
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let (a, b, ticks) = axis(lo, hi);
    let f = Frame { x: (a, b), y: (a, b) };
    let mut svg = Svg::new(&format!("Predicted vs actual {}", r.target_name));
    svg.y_axis(&f, &ticks, "predicted");
    svg.x_axis(&f, &ticks, "actual");
    svg.line(f.px(a), f.py(a), f.px(b), f.py(b), "#999999", r#" stroke-dasharray="4 3""#);
    for (p, y) in pred.iter().zip(actual) {
        let _ = writeln!(
            svg.0,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#4c72b0" fill-opacity="0.7"/>"##,
            f.px(*y),
            f.py(*p)
        );
    }
    Ok(svg.finish())
}

/// First two `features` of `t` colored by cluster; centroids drawn as crosses.
pub fn render_clusters(r: &ResultSet, t: &Table, features: &[String], centroids: &[Vec<f64>]) -> Result<String> {
    let Outputs::Cluster(ids) = &r.outputs else {
        return Err(MqlError::EmptyResult);
    };
    if features.len() < 2 {
        return Err(MqlError::TooFewFeatures);
    }
    if ids.is_empty() {
        return Err(MqlError::EmptyResult);
    }
    let col = |name: &str| -> Result<Vec<Option<f64>>> {
        t.column(name)?
            .as_numeric()
            .map(<[_]>::to_vec)
            .ok_or(MqlError::TooFewFeatures)
    };
    let (xs, ys) = (col(&features[0])?, col(&features[1])?);
    let range = |v: &[Option<f64>], c: usize| {
        let vals = v.iter().flatten().copied().chain(centroids.iter().map(|p| p[c]));
        let lo = vals.clone().fold(f64::INFINITY, f64::min);
        let hi = vals.fold(f64::NEG_INFINITY, f64::max);
        axis(lo, hi)
    };
    let (xa, xb, xt) = range(&xs, 0);
    let (ya, yb, yt) = range(&ys, 1);
    let f = Frame { x: (xa, xb), y: (ya, yb) };
    let mut svg = Svg::new(&format!("{} clusters", centroids.len()));
    svg.y_axis(&f, &yt, &features[1]);
    svg.x_axis(&f, &xt, &features[0]);
    for ((x, y), &c) in xs.iter().zip(&ys).zip(ids) {
        if let (Some(x), Some(y)) = (x, y) {
            let _ = writeln!(
                svg.0,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.75"/>"#,
                f.px(*x),
                f.py(*y),
                PALETTE[c % PALETTE.len()]
            );
        }
    }
    for (c, p) in centroids.iter().enumerate() {
        let (cx, cy) = (f.px(p[0]), f.py(p[1]));
        let color = PALETTE[c % PALETTE.len()];
        svg.line(cx - 7.0, cy - 7.0, cx + 7.0, cy + 7.0, color, r#" stroke-width="3""#);
        svg.line(cx - 7.0, cy + 7.0, cx + 7.0, cy - 7.0, color, r#" stroke-width="3""#);
    }
    Ok(svg.finish())
}
