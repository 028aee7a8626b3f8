//! Static SVG documents: a line chart and a categorical heatmap.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (1.0, 2.0);
        }
        if lo == hi {
            let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
            (lo, hi) = (lo - pad, hi + pad);
            if log && lo <= 0.0 {
                lo = hi / 10.0;
            }
        }
        Self { lo, hi, log }
    }

    fn fraction(&self, v: f64) -> f64 {
        if self.log {
            (v.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4)
            .map(|i| {
                let f = i as f64 / 4.0;
                if self.log {
                    (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line chart with markers; `reference` draws a dashed horizontal line.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_x: bool,
    reference: Option<(f64, &str)>,
) -> String {
    let xs = Axis::new(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), log_x);
    let ys = Axis::new(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(reference.map(|r| r.0)),
        false,
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xs.fraction(x) * pw;
    let py = |y: f64| TOP + (1.0 - ys.fraction(y)) * ph;

    let mut s = header(title);
    axes(&mut s, x_label, y_label);
    for t in xs.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(t),
            HEIGHT - BOTTOM + 16.0,
            tick_label(t)
        );
    }
    for t in ys.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(t) + 4.0,
            tick_label(t)
        );
    }
    if let Some((y, label)) = reference {
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}" stroke="gray" stroke-dasharray="5,4"/>"#,
            py(y),
            WIDTH - RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" fill="gray">{}</text>"#,
            WIDTH - RIGHT - 4.0,
            py(y) - 4.0,
            escape(label)
        );
    }
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    for (i, series) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        for p in &pts {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            LEFT + 8.0,
            TOP + 14.0 + 14.0 * i as f64,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn axes(s: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let cy = TOP + (HEIGHT - TOP - BOTTOM) / 2.0;
    let _ = writeln!(
        s,
        r#"<text x="18" y="{cy:.1}" text-anchor="middle" transform="rotate(-90 18 {cy:.1})">{}</text>"#,
        escape(y_label)
    );
}

/// Grid of categorical cells; `cells[j][i]` sits at `(xs[i], ys[j])`.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    cells: &[Vec<usize>],
    legend: &[(&str, &str)],
) -> String {
    let pw = WIDTH - LEFT - RIGHT - 120.0;
    let ph = HEIGHT - TOP - BOTTOM;
    let cw = pw / xs.len().max(1) as f64;
    let ch = ph / ys.len().max(1) as f64;
    let mut s = header(title);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let cy = TOP + ph / 2.0;
    let _ = writeln!(
        s,
        r#"<text x="18" y="{cy:.1}" text-anchor="middle" transform="rotate(-90 18 {cy:.1})">{}</text>"#,
        escape(y_label)
    );
    for (j, row) in cells.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            let color = legend.get(c).map_or("black", |l| l.1);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" stroke="white" stroke-width="0.5"/>"#,
                LEFT + i as f64 * cw,
                TOP + ph - (j + 1) as f64 * ch,
                cw,
                ch
            );
        }
    }
    let stride = (xs.len() / 5).max(1);
    for (i, x) in xs.iter().enumerate().step_by(stride) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + (i as f64 + 0.5) * cw,
            HEIGHT - BOTTOM + 16.0,
            tick_label(*x)
        );
    }
    let stride = (ys.len() / 5).max(1);
    for (j, y) in ys.iter().enumerate().step_by(stride) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            TOP + ph - (j as f64 + 0.5) * ch + 4.0,
            tick_label(*y)
        );
    }
    for (k, (label, color)) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * k as f64;
        let x = WIDTH - RIGHT - 110.0;
        let _ = writeln!(s, r#"<rect x="{x:.1}" y="{y:.1}" width="14" height="14" fill="{color}"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 20.0,
            y + 11.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
