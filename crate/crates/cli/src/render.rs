//! Deterministic SVG rendering for trajectory and boxplot figures.
//!
//! The output contains no timestamps and all numbers are formatted with
//! fixed precision, so identical inputs produce identical bytes.

use exchtest_core::experiments::{BoxplotStats, Trajectory};
use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 45.0;

const PALETTE: [&str; 8] = [
    "#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    )
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (frame.x(frame.x_min), frame.x(frame.x_max));
    let (y0, y1) = (frame.y(frame.y_min), frame.y(frame.y_max));
    let _ = write!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         <text x=\"{x0}\" y=\"{ybot}\" font-size=\"12\">{xmin}</text>\n\
         <text x=\"{x1}\" y=\"{ybot}\" font-size=\"12\" text-anchor=\"end\">{xmax}</text>\n\
         <text x=\"{xlab}\" y=\"{ybot}\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>\n\
         <text x=\"5\" y=\"{y0}\" font-size=\"12\">{ymin}</text>\n\
         <text x=\"5\" y=\"{y1n}\" font-size=\"12\">{ymax}</text>\n\
         <text x=\"5\" y=\"{ylab}\" font-size=\"12\">{y_label}</text>\n",
        ybot = HEIGHT - MARGIN_BOTTOM + 20.0,
        xmin = fmt(frame.x_min),
        xmax = fmt(frame.x_max),
        xlab = (x0 + x1) / 2.0,
        ymin = fmt(frame.y_min),
        y1n = y1 + 12.0,
        ymax = fmt(frame.y_max),
        ylab = (y0 + y1) / 2.0,
    );
}

/// Log10-capital-vs-step line chart, one polyline per trajectory.
pub fn trajectory_svg(trajectories: &[Trajectory], first_step: usize) -> String {
    let y_min = trajectories
        .iter()
        .flat_map(|t| t.values.iter().copied())
        .fold(f64::INFINITY, f64::min)
        .min(0.0);
    let y_max = trajectories
        .iter()
        .flat_map(|t| t.values.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(y_min + 1.0);
    let n = trajectories.first().map_or(1, |t| t.values.len());
    let frame = Frame {
        x_min: first_step as f64,
        x_max: (first_step + n - 1) as f64,
        y_min,
        y_max,
    };

    let mut out = header();
    axes(&mut out, &frame, "step", "log10 capital");
    for (i, traj) in trajectories.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = traj
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| format!("{},{}", fmt(frame.x((first_step + j) as f64)), fmt(frame.y(*v))))
            .collect();
        let _ = write!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>\n\
             <text x=\"{lx}\" y=\"{ly}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            points.join(" "),
            traj.process,
            lx = WIDTH - MARGIN_RIGHT - 60.0,
            ly = MARGIN_TOP + 15.0 * (i + 1) as f64,
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Notched boxplots of final log10 values, one box per process.
pub fn boxplot_svg(stats: &[(String, BoxplotStats)]) -> String {
    let y_min = stats
        .iter()
        .map(|(_, s)| s.whisker_low)
        .fold(f64::INFINITY, f64::min);
    let y_max = stats
        .iter()
        .map(|(_, s)| s.whisker_high)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(y_min + 1.0);
    let frame = Frame {
        x_min: 0.0,
        x_max: stats.len() as f64,
        y_min,
        y_max,
    };

    let mut out = header();
    axes(&mut out, &frame, "", "final log10 capital");
    for (i, (label, s)) in stats.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let cx = frame.x(i as f64 + 0.5);
        let half = 25.0;
        let (bq1, bq3) = (frame.y(s.q1), frame.y(s.q3));
        let (wl, wh) = (frame.y(s.whisker_low), frame.y(s.whisker_high));
        let med = frame.y(s.median);
        let (nl, nh) = (frame.y(s.notch_low), frame.y(s.notch_high));
        let _ = write!(
            out,
            "<line x1=\"{cx}\" y1=\"{wl}\" x2=\"{cx}\" y2=\"{bq1}\" stroke=\"{color}\"/>\n\
             <line x1=\"{cx}\" y1=\"{bq3}\" x2=\"{cx}\" y2=\"{wh}\" stroke=\"{color}\"/>\n\
             <rect x=\"{rx}\" y=\"{bq3}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"{color}\"/>\n\
             <line x1=\"{rx}\" y1=\"{med}\" x2=\"{rx2}\" y2=\"{med}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <line x1=\"{nx}\" y1=\"{nl}\" x2=\"{nx2}\" y2=\"{nl}\" stroke=\"{color}\" stroke-dasharray=\"3 2\"/>\n\
             <line x1=\"{nx}\" y1=\"{nh}\" x2=\"{nx2}\" y2=\"{nh}\" stroke=\"{color}\" stroke-dasharray=\"3 2\"/>\n\
             <text x=\"{cx}\" y=\"{ty}\" font-size=\"12\" text-anchor=\"middle\">{label}</text>\n",
            rx = cx - half,
            rx2 = cx + half,
            w = 2.0 * half,
            h = bq1 - bq3,
            nx = cx - half * 0.6,
            nx2 = cx + half * 0.6,
            ty = HEIGHT - MARGIN_BOTTOM + 20.0,
        );
    }
    out.push_str("</svg>\n");
    out
}
