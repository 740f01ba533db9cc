//! Self-contained SVG charts for spectra, reconstructions and correlograms.
//!
//! The charts are deliberately small: fixed canvas, one axis pair, a few
//! traces with automatic ticks and a legend. They exist so pipeline results
//! can be inspected without pulling in a plotting stack.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::adaptive::KzpResult;
use crate::error::{KzpError, Result};
use crate::series::TimeSeries;
use crate::spectrum::Periodogram;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 74.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 54.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#7f7f7f",
];

/// How a trace is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStyle {
    /// Connected polyline.
    Line,
    /// Small filled circles.
    Points,
    /// Vertical stems from zero plus a marker.
    Stems,
}

/// One named data series on a chart.
#[derive(Debug, Clone)]
pub struct Trace {
    /// Legend label.
    pub label: String,
    /// Data in axis coordinates.
    pub points: Vec<(f64, f64)>,
    /// Drawing style.
    pub style: TraceStyle,
    /// Explicit color; a palette color is chosen when absent.
    pub color: Option<String>,
    /// For lines, break the polyline when consecutive x values are farther
    /// apart than this, so gaps in the data stay visible.
    pub gap_break: Option<f64>,
}

impl Trace {
    /// Connected line trace.
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            style: TraceStyle::Line,
            color: None,
            gap_break: None,
        }
    }

    /// Scatter trace.
    pub fn points(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            style: TraceStyle::Points,
            ..Self::line(label, points)
        }
    }

    /// Stem trace, useful for correlograms.
    pub fn stems(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            style: TraceStyle::Stems,
            ..Self::line(label, points)
        }
    }

    /// Overrides the palette color.
    pub fn with_color(mut self, color: impl Into<String>) -> Self {
        self.color = Some(color.into());
        self
    }

    /// Breaks line segments across x gaps wider than `width`.
    pub fn with_gap_break(mut self, width: f64) -> Self {
        self.gap_break = Some(width);
        self
    }
}

/// A complete chart ready to render.
#[derive(Debug, Clone)]
pub struct Chart {
    /// Headline above the plot.
    pub title: String,
    /// X axis caption.
    pub x_label: String,
    /// Y axis caption.
    pub y_label: String,
    /// Use a logarithmic y axis with decade ticks.
    pub log_y: bool,
    /// Traces drawn in order.
    pub traces: Vec<Trace>,
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let normalized = raw / magnitude;
    let nice = if normalized < 1.5 {
        1.0
    } else if normalized < 3.5 {
        2.0
    } else if normalized < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn linear_ticks(min: f64, max: f64) -> Vec<f64> {
    let step = nice_step(max - min, 5);
    let mut ticks = Vec::new();
    let mut v = (min / step).ceil() * step;
    while v <= max + 1e-9 * step {
        ticks.push(if v.abs() < 1e-12 * step { 0.0 } else { v });
        v += step;
    }
    ticks
}

fn tick_label(value: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).clamp(0.0, 12.0) as usize;
    format!("{value:.decimals$}")
}

impl Chart {
    /// Renders the chart and writes it as a standalone SVG file.
    ///
    /// On a logarithmic axis, nonpositive values are clamped to a floor nine
    /// decades below the largest value so they stay on the canvas.
    pub fn save_svg<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_svg()).map_err(|source| KzpError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    fn transformed(&self) -> Vec<Vec<(f64, f64)>> {
        if !self.log_y {
            return self.traces.iter().map(|t| t.points.clone()).collect();
        }
        let top = self
            .traces
            .iter()
            .flat_map(|t| t.points.iter().map(|&(_, y)| y))
            .fold(f64::MIN_POSITIVE, f64::max);
        let floor = top * 1e-9;
        self.traces
            .iter()
            .map(|t| {
                t.points
                    .iter()
                    .map(|&(x, y)| (x, y.max(floor).log10()))
                    .collect()
            })
            .collect()
    }

    fn to_svg(&self) -> String {
        let transformed = self.transformed();
        let xs = transformed.iter().flatten().map(|&(x, _)| x);
        let ys = transformed.iter().flatten().map(|&(_, y)| y);
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !x_min.is_finite() {
            (x_min, x_max) = (0.0, 1.0);
        }
        if !y_min.is_finite() {
            (y_min, y_max) = (0.0, 1.0);
        }
        let stems = self.traces.iter().any(|t| t.style == TraceStyle::Stems);
        if stems && !self.log_y {
            y_min = y_min.min(0.0);
            y_max = y_max.max(0.0);
        }
        if x_max == x_min {
            x_min -= 1.0;
            x_max += 1.0;
        }
        if y_max == y_min {
            y_min -= 1.0;
            y_max += 1.0;
        }
        let y_pad = 0.05 * (y_max - y_min);
        y_min -= y_pad;
        y_max += y_pad;

        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let py = |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

        let mut svg = String::with_capacity(16 * 1024);
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
        );
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"26\" font-size=\"17\" text-anchor=\"middle\" fill=\"#222\">{}</text>",
            WIDTH / 2.0,
            escape_xml(&self.title)
        );

        let x_ticks = linear_ticks(x_min, x_max);
        let x_step = nice_step(x_max - x_min, 5);
        for &t in &x_ticks {
            let x = px(t);
            let _ = writeln!(
                svg,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>",
                MARGIN_TOP,
                MARGIN_TOP + plot_h
            );
            let _ = writeln!(
                svg,
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#444\">{}</text>",
                MARGIN_TOP + plot_h + 18.0,
                tick_label(t, x_step)
            );
        }
        let y_ticks: Vec<f64> = if self.log_y {
            let lo = y_min.ceil() as i64;
            let hi = y_max.floor() as i64;
            (lo..=hi).map(|d| d as f64).collect()
        } else {
            linear_ticks(y_min, y_max)
        };
        let y_step = nice_step(y_max - y_min, 5);
        for &t in &y_ticks {
            let y = py(t);
            let _ = writeln!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>",
                MARGIN_LEFT,
                MARGIN_LEFT + plot_w
            );
            let label = if self.log_y {
                format!("1e{}", t as i64)
            } else {
                tick_label(t, y_step)
            };
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" fill=\"#444\">{label}</text>",
                MARGIN_LEFT - 8.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            svg,
            "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
             fill=\"none\" stroke=\"#999\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222\">{}</text>",
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            escape_xml(&self.x_label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"20\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222\" \
             transform=\"rotate(-90 20 {:.1})\">{}</text>",
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape_xml(&self.y_label)
        );

        let zero_y = py(if self.log_y { y_min } else { 0.0 });
        for (index, (trace, points)) in self.traces.iter().zip(&transformed).enumerate() {
            let color = trace
                .color
                .clone()
                .unwrap_or_else(|| PALETTE[index % PALETTE.len()].to_string());
            match trace.style {
                TraceStyle::Line => {
                    let mut segment: Vec<String> = Vec::new();
                    let mut previous_x = f64::NEG_INFINITY;
                    let flush = |segment: &mut Vec<String>, svg: &mut String| {
                        if segment.len() > 1 {
                            let _ = writeln!(
                                svg,
                                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\"/>",
                                segment.join(" ")
                            );
                        }
                        segment.clear();
                    };
                    for &(x, y) in points {
                        if let Some(gap) = trace.gap_break {
                            if !segment.is_empty() && x - previous_x > gap {
                                flush(&mut segment, &mut svg);
                            }
                        }
                        segment.push(format!("{:.2},{:.2}", px(x), py(y)));
                        previous_x = x;
                    }
                    flush(&mut segment, &mut svg);
                }
                TraceStyle::Points => {
                    for &(x, y) in points {
                        let _ = writeln!(
                            svg,
                            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{color}\"/>",
                            px(x),
                            py(y)
                        );
                    }
                }
                TraceStyle::Stems => {
                    for &(x, y) in points {
                        let _ = writeln!(
                            svg,
                            "<line x1=\"{0:.2}\" y1=\"{zero_y:.2}\" x2=\"{0:.2}\" y2=\"{1:.2}\" \
                             stroke=\"{color}\" stroke-width=\"1.2\"/>\
                             <circle cx=\"{0:.2}\" cy=\"{1:.2}\" r=\"2.2\" fill=\"{color}\"/>",
                            px(x),
                            py(y)
                        );
                    }
                }
            }
        }

        for (index, trace) in self.traces.iter().enumerate() {
            let color = trace
                .color
                .clone()
                .unwrap_or_else(|| PALETTE[index % PALETTE.len()].to_string());
            let y = MARGIN_TOP + 16.0 + 18.0 * index as f64;
            let x = WIDTH - MARGIN_RIGHT - 170.0;
            let _ = writeln!(
                svg,
                "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>\
                 <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"#222\">{}</text>",
                y - 4.0,
                x + 22.0,
                y - 4.0,
                x + 28.0,
                y,
                escape_xml(&trace.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn grid_points(values: &[f64], grid: &crate::spectrum::FrequencyGrid) -> Vec<(f64, f64)> {
    grid.points().zip(values.iter().copied()).collect()
}

/// Plots a single spectrum on a linear axis.
pub fn plot_periodogram<P: AsRef<Path>>(path: P, pg: &Periodogram, title: &str) -> Result<()> {
    Chart {
        title: title.to_string(),
        x_label: "frequency (cycles per sample)".into(),
        y_label: "intensity".into(),
        log_y: false,
        traces: vec![Trace::line(
            "periodogram",
            grid_points(&pg.intensity, &pg.grid),
        )],
    }
    .save_svg(path)
}

/// Plots the raw and adaptively smoothed spectra of a pipeline result.
pub fn plot_kzp<P: AsRef<Path>>(
    path: P,
    result: &KzpResult,
    title: &str,
    log_y: bool,
) -> Result<()> {
    Chart {
        title: title.to_string(),
        x_label: "frequency (cycles per sample)".into(),
        y_label: if log_y {
            "intensity (log)"
        } else {
            "intensity"
        }
        .into(),
        log_y,
        traces: vec![
            Trace::line("raw", grid_points(&result.raw.intensity, &result.raw.grid)),
            Trace::line(
                "smoothed",
                grid_points(&result.smoothed.smoothed, &result.smoothed.grid),
            ),
        ],
    }
    .save_svg(path)
}

fn observed_points(ts: &TimeSeries, range: Option<(i64, i64)>) -> Vec<(f64, f64)> {
    ts.observed_pairs()
        .filter(|&(t, _)| range.is_none_or(|(lo, hi)| t >= lo && t <= hi))
        .map(|(t, v)| (t as f64, v))
        .collect()
}

/// Plots truth, observations and estimate over an optional time range.
pub fn plot_reconstruction<P: AsRef<Path>>(
    path: P,
    truth: &TimeSeries,
    observed: &TimeSeries,
    estimate: &TimeSeries,
    range: Option<(i64, i64)>,
    title: &str,
) -> Result<()> {
    Chart {
        title: title.to_string(),
        x_label: "time".into(),
        y_label: "value".into(),
        log_y: false,
        traces: vec![
            Trace::line("truth", observed_points(truth, range)).with_gap_break(1.5),
            Trace::points("observed", observed_points(observed, range)).with_color("#7f7f7f"),
            Trace::line("estimate", observed_points(estimate, range))
                .with_color("#d62728")
                .with_gap_break(1.5),
        ],
    }
    .save_svg(path)
}

/// Plots an autocorrelation function as stems over the lag axis.
pub fn plot_correlogram<P: AsRef<Path>>(path: P, correlations: &[f64], title: &str) -> Result<()> {
    let points = correlations
        .iter()
        .enumerate()
        .map(|(lag, &r)| (lag as f64, r))
        .collect();
    Chart {
        title: title.to_string(),
        x_label: "lag".into(),
        y_label: "correlation".into(),
        log_y: false,
        traces: vec![Trace::stems("acf", points)],
    }
    .save_svg(path)
}
