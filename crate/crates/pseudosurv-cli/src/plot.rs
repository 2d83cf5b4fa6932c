//! Static SVG survival-curve plots.
//!
//! The SVG is a convenience view over the prediction CSV, never the primary
//! output: one mean curve per group with its 95 percent band, plain axes,
//! and a legend. Generated by hand so the output is deterministic and free
//! of plotting dependencies.

use std::fmt::Write as _;

/// One plotted group: a mean survival curve with its interval band.
#[derive(Debug, Clone)]
pub struct CurveGroup {
    /// Legend label.
    pub label: String,
    /// Strictly increasing evaluation times.
    pub grid: Vec<f64>,
    /// Mean survival per time.
    pub mean: Vec<f64>,
    /// Lower interval bound per time.
    pub lower: Vec<f64>,
    /// Upper interval bound per time.
    pub upper: Vec<f64>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders survival curves with bands into an SVG document.
///
/// The x axis spans `[0, max time]`, the y axis `[0, 1]`. Groups cycle
/// through a fixed six-color palette.
pub fn survival_svg(groups: &[CurveGroup]) -> String {
    let x_max = groups
        .iter()
        .flat_map(|g| g.grid.iter().copied())
        .fold(1e-12, f64::max);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |t: f64| MARGIN_LEFT + t / x_max * plot_w;
    let y = |s: f64| MARGIN_TOP + (1.0 - s.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        "  <line class=\"axis\" x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line class=\"axis\" x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    for i in 0..=4 {
        let s = i as f64 / 4.0;
        let yy = y(s);
        let _ = writeln!(
            svg,
            "  <line class=\"tick\" x1=\"{}\" y1=\"{yy}\" x2=\"{x0}\" y2=\"{yy}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            yy + 4.0,
            fmt(s)
        );
        let t = s * x_max;
        let xx = x(t);
        let _ = writeln!(
            svg,
            "  <line class=\"tick\" x1=\"{xx}\" y1=\"{y0}\" x2=\"{xx}\" y2=\"{}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{xx}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            y0 + 20.0,
            fmt(t)
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">time</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"16\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {})\">survival probability</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    // Bands first so curves draw on top.
    for (gi, g) in groups.iter().enumerate() {
        let color = PALETTE[gi % PALETTE.len()];
        let mut d = String::new();
        for (k, &t) in g.grid.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{},{} ", fmt(x(t)), fmt(y(g.upper[k])));
        }
        for (k, &t) in g.grid.iter().enumerate().rev() {
            let _ = write!(d, "L{},{} ", fmt(x(t)), fmt(y(g.lower[k])));
        }
        d.push('Z');
        let _ = writeln!(
            svg,
            "  <path class=\"band\" d=\"{d}\" fill=\"{color}\" fill-opacity=\"0.2\" stroke=\"none\"/>"
        );
    }
    for (gi, g) in groups.iter().enumerate() {
        let color = PALETTE[gi % PALETTE.len()];
        let pts: Vec<String> = g
            .grid
            .iter()
            .zip(&g.mean)
            .map(|(&t, &s)| format!("{},{}", fmt(x(t)), fmt(y(s))))
            .collect();
        let _ = writeln!(
            svg,
            "  <polyline class=\"curve\" points=\"{}\" fill=\"none\" stroke=\"{color}\" \
             stroke-width=\"2\"/>",
            pts.join(" ")
        );
    }

    // Legend, top right inside the plot area.
    for (gi, g) in groups.iter().enumerate() {
        let color = PALETTE[gi % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 + 18.0 * gi as f64;
        let lx = x1 - 150.0;
        let _ = writeln!(
            svg,
            "  <line class=\"legend\" x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            lx + 30.0,
            ly + 4.0,
            escape(&g.label)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
