//! Static SVG charts: convergence curves and paired value/time bar charts.
//!
//! Output depends only on the input data, so identical data gives identical bytes.

use std::fmt::Write as _;

use crate::error::{HarnessError, Result};
use crate::plan::Algorithm;
use crate::runner::RunRecord;
use crate::summary::SummaryRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// Color of the proposed optimizer's bars and curves.
pub const PROPOSED_COLOR: &str = "#2ca02c";
/// Color of every comparison optimizer's bars.
pub const BASELINE_COLOR: &str = "#1f77b4";

fn line_color(algo: Algorithm) -> &'static str {
    match algo {
        Algorithm::So => PROPOSED_COLOR,
        Algorithm::Pso => "#1f77b4",
        Algorithm::De => "#ff7f0e",
        Algorithm::Bfgs => "#9467bd",
        Algorithm::Sa => "#d62728",
        Algorithm::Shc => "#8c564b",
        Algorithm::Adam => "#7f7f7f",
    }
}

/// A log axis is used when every finite value is strictly positive.
pub fn use_log_scale(values: &[f64]) -> bool {
    let mut finite = values.iter().filter(|v| v.is_finite()).peekable();
    finite.peek().is_some() && finite.all(|v| *v > 0.0)
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Fixed-precision coordinate formatting keeps files small and stable.
fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Maps data values onto a vertical pixel range.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: &[f64], log: bool, include_zero: bool) -> Self {
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        if finite.is_empty() {
            return Self { lo: 0.0, hi: 1.0, log: false };
        }
        let (mut lo, mut hi) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        if log {
            lo = lo.log10().floor();
            hi = hi.log10().ceil();
            if hi <= lo {
                hi = lo + 1.0;
            }
        } else {
            if include_zero {
                lo = lo.min(0.0);
                hi = hi.max(0.0);
            }
            if hi <= lo {
                hi = lo + 1.0;
            }
        }
        Self { lo, hi, log }
    }

    fn fraction(&self, v: f64) -> f64 {
        let x = if self.log { v.max(1e-300).log10() } else { v };
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut e = self.lo;
            while e <= self.hi + 1e-9 {
                out.push(10f64.powf(e));
                e += step;
            }
            out
        } else {
            (0..=4).map(|i| self.lo + (self.hi - self.lo) * f64::from(i) / 4.0).collect()
        }
    }
}

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Panel {
    fn y(&self, axis: &Axis, v: f64) -> f64 {
        self.y0 + self.h * (1.0 - axis.fraction(v))
    }

    fn frame(&self, svg: &mut String, axis: &Axis, title: &str, x_label: &str, y_label: &str) {
        let (x0, y0, w, h) = (self.x0, self.y0, self.w, self.h);
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            c(x0),
            c(y0),
            c(w),
            c(h)
        );
        for t in axis.ticks() {
            let y = self.y(axis, t);
            let _ = writeln!(svg, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, c(x0 - 5.0), c(y), c(x0), c(y));
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
                c(x0 - 8.0),
                c(y + 4.0),
                escape(&tick_label(t))
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
            c(x0 + w / 2.0),
            c(y0 - 12.0),
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            c(x0 + w / 2.0),
            c(y0 + h + 40.0),
            escape(x_label)
        );
        let (lx, ly) = (x0 - 62.0, y0 + h / 2.0);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
            c(lx),
            c(ly),
            c(lx),
            c(ly),
            escape(y_label)
        );
    }
}

fn open(width: f64, height: f64) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif">"#,
        width, height, width, height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg
}

/// Best value against iteration, one polyline per record. Non-finite values are
/// skipped and split the line.
pub fn convergence_svg(records: &[RunRecord], title: &str) -> Result<String> {
    let traced: Vec<&RunRecord> = records.iter().filter(|r| !r.trace.is_empty()).collect();
    if traced.is_empty() {
        return Err(HarnessError::Invalid("convergence plot needs at least one non-empty trace".into()));
    }
    let values: Vec<f64> = traced.iter().flat_map(|r| r.trace.iter().map(|i| i.best_value)).collect();
    let log = use_log_scale(&values);
    let axis = Axis::fit(&values, log, false);
    let max_iter = traced.iter().flat_map(|r| r.trace.iter().map(|i| i.iteration)).max().unwrap_or(0).max(1) as f64;
    let panel = Panel {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    };
    let mut svg = open(WIDTH, HEIGHT);
    let y_label = if log { "objective value (log scale)" } else { "objective value" };
    panel.frame(&mut svg, &axis, title, "iteration", y_label);
    for i in 0..=4 {
        let it = max_iter * f64::from(i) / 4.0;
        let x = panel.x0 + panel.w * it / max_iter;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            c(x),
            c(panel.y0 + panel.h + 16.0),
            it.round()
        );
    }
    for r in &traced {
        let mut segments: Vec<Vec<String>> = vec![Vec::new()];
        for it in &r.trace {
            if it.best_value.is_finite() {
                let x = panel.x0 + panel.w * it.iteration as f64 / max_iter;
                segments.last_mut().unwrap().push(format!("{},{}", c(x), c(panel.y(&axis, it.best_value))));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"><title>{} trial {}</title></polyline>"#,
                line_color(r.algo),
                seg.join(" "),
                r.algo,
                r.trial
            );
        }
    }
    let mut algos: Vec<Algorithm> = Vec::new();
    for r in &traced {
        if !algos.contains(&r.algo) {
            algos.push(r.algo);
        }
    }
    for (k, a) in algos.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 18.0 * k as f64;
        let x = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/>"#,
            c(x),
            c(y),
            c(x + 20.0),
            c(y),
            line_color(*a)
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12">{}</text>"#, c(x + 26.0), c(y + 4.0), a);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Orders rows for the bar chart: comparison optimizers first, the proposed optimizer last.
pub fn bar_order(rows: &[SummaryRow]) -> Vec<&SummaryRow> {
    let mut out: Vec<&SummaryRow> = rows.iter().filter(|r| r.algo != Algorithm::So).collect();
    out.extend(rows.iter().filter(|r| r.algo == Algorithm::So));
    out
}

pub fn bar_color(algo: Algorithm) -> &'static str {
    if algo == Algorithm::So {
        PROPOSED_COLOR
    } else {
        BASELINE_COLOR
    }
}

fn bar_panel(svg: &mut String, panel: &Panel, rows: &[&SummaryRow], values: &[f64], spreads: Option<&[f64]>, title: &str, y_label: &str) {
    let mut extent: Vec<f64> = values.to_vec();
    if let Some(s) = spreads {
        extent.extend(values.iter().zip(s).map(|(v, s)| v + s));
    }
    let log = use_log_scale(values);
    let axis = Axis::fit(&extent, log, !log);
    let y_label = if log { format!("{y_label} (log scale)") } else { y_label.to_string() };
    panel.frame(svg, &axis, title, "algorithm", &y_label);
    let slot = panel.w / rows.len() as f64;
    let base = panel.y0 + panel.h;
    for (k, (row, v)) in rows.iter().zip(values).enumerate() {
        let xc = panel.x0 + slot * (k as f64 + 0.5);
        if v.is_finite() {
            let top = panel.y(&axis, *v);
            let _ = writeln!(
                svg,
                r#"<rect class="bar" x="{}" y="{}" width="{}" height="{}" fill="{}"><title>{} {}</title></rect>"#,
                c(xc - slot * 0.35),
                c(top),
                c(slot * 0.7),
                c((base - top).max(0.0)),
                bar_color(row.algo),
                row.algo,
                v
            );
            if let Some(s) = spreads {
                let s = s[k];
                if s.is_finite() && s > 0.0 {
                    let (y1, y2) = (panel.y(&axis, v - s), panel.y(&axis, v + s));
                    let _ = writeln!(
                        svg,
                        r#"<line class="std" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="2"/>"#,
                        c(xc),
                        c(y1),
                        c(xc),
                        c(y2)
                    );
                }
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            c(xc),
            c(base + 16.0),
            row.algo
        );
    }
}

/// Two panels: mean final best value with a black standard deviation line, and mean
/// wall time. All rows are drawn in the order of [`bar_order`].
pub fn comparison_svg(rows: &[SummaryRow], title: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Invalid("comparison plot needs at least one summary row".into()));
    }
    let ordered = bar_order(rows);
    let values: Vec<f64> = ordered.iter().map(|r| r.mean_best).collect();
    let spreads: Vec<f64> = ordered.iter().map(|r| r.std_best).collect();
    let times: Vec<f64> = ordered.iter().map(|r| r.mean_elapsed_ms).collect();
    let width = 2.0 * WIDTH - MARGIN_RIGHT;
    let panel_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT / 2.0;
    let h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM - 20.0;
    let mut svg = open(width, HEIGHT);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-size="15" text-anchor="middle">{}</text>"#,
        c(width / 2.0),
        escape(title)
    );
    let left = Panel { x0: MARGIN_LEFT, y0: MARGIN_TOP + 20.0, w: panel_w, h };
    let right = Panel { x0: MARGIN_LEFT + panel_w + MARGIN_LEFT, y0: MARGIN_TOP + 20.0, w: panel_w, h };
    bar_panel(&mut svg, &left, &ordered, &values, Some(&spreads), "mean final best value", "objective value");
    bar_panel(&mut svg, &right, &ordered, &times, None, "mean wall time", "milliseconds");
    svg.push_str("</svg>\n");
    Ok(svg)
}
