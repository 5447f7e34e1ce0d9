//! Self-contained SVG plots with no plotting dependency.
//!
//! Three kinds: `loglog` (both axes log10, with optional fitted and
//! reference slope lines), `profile` (linear axes), `frontier` (log10 axes,
//! markers emphasized). All coordinates are written with three decimals and
//! nothing time- or environment-dependent enters the output, so a fixed
//! report renders to identical bytes.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    LogLog,
    Profile,
    Frontier,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// A straight guide line `y' = slope·x' + intercept` in *transformed*
/// coordinates (log10 space for the log kinds).
#[derive(Debug, Clone)]
pub struct GuideLine {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub guides: Vec<GuideLine>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

fn is_log(kind: PlotKind) -> bool {
    matches!(kind, PlotKind::LogLog | PlotKind::Frontier)
}

fn transform(kind: PlotKind, p: (f64, f64)) -> Option<(f64, f64)> {
    if is_log(kind) {
        if p.0 > 0.0 && p.1 > 0.0 {
            Some((p.0.log10(), p.1.log10()))
        } else {
            None
        }
    } else {
        Some(p)
    }
}

/// Renders the plot; an empty report (no drawable point) is rejected.
pub fn render(plot: &Plot) -> Result<String, String> {
    let transformed: Vec<Vec<(f64, f64)>> = plot
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&p| transform(plot.kind, p))
                .collect()
        })
        .collect();
    let all: Vec<(f64, f64)> = transformed.iter().flatten().copied().collect();
    if all.is_empty() {
        return Err("nothing to plot: no drawable data point".to_string());
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad_x = 0.04 * (x1 - x0);
    let pad_y = 0.06 * (y1 - y0);
    let (x0, x1, y0, y1) = (x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y);
    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.3}\" y=\"24\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(&plot.title)
    );

    // Axes box.
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    );

    // Ticks: five per axis in transformed space.
    for t in 0..5 {
        let fx = x0 + (x1 - x0) * t as f64 / 4.0;
        let fy = y0 + (y1 - y0) * t as f64 / 4.0;
        let label_x = tick_label(plot.kind, fx);
        let label_y = tick_label(plot.kind, fy);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#cccccc\"/>",
            px(fx),
            py(y0),
            px(fx),
            py(y1)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{label_x}</text>",
            px(fx),
            HEIGHT - MARGIN_B + 18.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{label_y}</text>",
            MARGIN_L - 6.0,
            py(fy) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.3})\">{}</text>",
        MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0,
        MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0,
        escape(&plot.y_label)
    );

    // Guide lines first so data sits on top.
    for (gi, guide) in plot.guides.iter().enumerate() {
        let ya = guide.slope * x0 + guide.intercept;
        let yb = guide.slope * x1 + guide.intercept;
        let _ = writeln!(
            svg,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#555555\" stroke-dasharray=\"{}\"/>",
            px(x0),
            py(ya),
            px(x1),
            py(yb),
            if gi % 2 == 0 { "6,3" } else { "2,3" }
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"11\" fill=\"#555555\">{}</text>",
            px(x0) + 6.0,
            py(ya) - 6.0,
            escape(&guide.name)
        );
    }

    for (si, points) in transformed.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        if points.len() > 1 && plot.kind != PlotKind::Frontier {
            let mut d = String::new();
            for (i, (x, y)) in points.iter().enumerate() {
                let _ = write!(d, "{}{:.3} {:.3}", if i == 0 { "M" } else { " L" }, px(*x), py(*y));
            }
            let _ = writeln!(svg, "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>");
        }
        for (x, y) in points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2.5\" fill=\"{color}\"/>",
                px(*x),
                py(*y)
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>",
            WIDTH - MARGIN_R - 180.0,
            MARGIN_T + 16.0 + 15.0 * si as f64,
            escape(&plot.series[si].name)
        );
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn tick_label(kind: PlotKind, transformed: f64) -> String {
    if is_log(kind) {
        format!("1e{transformed:.2}")
    } else {
        format!("{transformed:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_plot() -> Plot {
        Plot {
            kind: PlotKind::LogLog,
            title: "demo".into(),
            x_label: "q".into(),
            y_label: "err".into(),
            series: vec![Series {
                name: "err".into(),
                points: (1..=32).map(|q| (q as f64, 1.0 / q as f64)).collect(),
            }],
            guides: vec![GuideLine {
                name: "slope -1".into(),
                slope: -1.0,
                intercept: 0.0,
            }],
        }
    }

    #[test]
    fn deterministic_bytes() {
        let a = render(&demo_plot()).unwrap();
        let b = render(&demo_plot()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_report_rejected() {
        let mut p = demo_plot();
        p.series[0].points.clear();
        assert!(render(&p).is_err());
        // All-nonpositive data is undrawable on log axes.
        let mut p = demo_plot();
        p.series[0].points = vec![(1.0, -2.0)];
        assert!(render(&p).is_err());
    }

    #[test]
    fn profile_kind_accepts_negatives() {
        let p = Plot {
            kind: PlotKind::Profile,
            title: "p".into(),
            x_label: "s".into(),
            y_label: "y'".into(),
            series: vec![Series {
                name: "values".into(),
                points: vec![(0.0, -1.0), (0.5, 0.0), (1.0, 1.0)],
            }],
            guides: vec![],
        };
        assert!(render(&p).is_ok());
    }
}
