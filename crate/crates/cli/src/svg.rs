//! Minimal line plots rendered as standalone SVG.

use std::fmt::Write as _;

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 48.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn with(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }

    /// Bounds over finite points, widened when degenerate.
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let finite = self
            .series
            .iter()
            .flat_map(|s| &s.points)
            .filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 <= 0.0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 <= 0.0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        (x0, x1, y0, y1)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_panel(out: &mut String, panel: &Panel, ox: f64) {
    let (x0, x1, y0, y1) = panel.bounds();
    let plot_w = PANEL_W - 2.0 * MARGIN;
    let plot_h = PANEL_H - 2.0 * MARGIN;
    let sx = |x: f64| ox + MARGIN + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| PANEL_H - MARGIN - (y - y0) / (y1 - y0) * plot_h;

    writeln!(
        out,
        r##"<rect x="{:.2}" y="{MARGIN:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444"/>"##,
        ox + MARGIN
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="24.00" text-anchor="middle">{}</text>"#,
        ox + PANEL_W / 2.0,
        escape(&panel.title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        ox + PANEL_W / 2.0,
        PANEL_H - 12.0,
        escape(&panel.x_label)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ox + 14.0,
        PANEL_H / 2.0,
        ox + 14.0,
        PANEL_H / 2.0,
        escape(&panel.y_label)
    )
    .unwrap();
    for (value, y) in [(y0, PANEL_H - MARGIN), (y1, MARGIN)] {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="10">{value:.3e}</text>"#,
            ox + MARGIN - 4.0
        )
        .unwrap();
    }
    for (value, x) in [(x0, ox + MARGIN), (x1, ox + PANEL_W - MARGIN)] {
        writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{value:.3}</text>"#,
            PANEL_H - MARGIN + 14.0
        )
        .unwrap();
    }

    for (i, series) in panel.series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        // non-finite points split the curve into separate polylines
        for run in series
            .points
            .split(|(x, y)| !(x.is_finite() && y.is_finite()))
            .filter(|r| !r.is_empty())
        {
            let coords: Vec<String> = run
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            )
            .unwrap();
        }
        let ly = MARGIN + 14.0 + 14.0 * i as f64;
        writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="11" fill="{colour}">{}</text>"#,
            ox + MARGIN + 6.0,
            escape(&series.label)
        )
        .unwrap();
    }
}

/// Panels laid out left to right.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}" font-family="sans-serif">"#
    )
    .unwrap();
    for (i, panel) in panels.iter().enumerate() {
        writeln!(out, "<g>").unwrap();
        render_panel(&mut out, panel, PANEL_W * i as f64);
        writeln!(out, "</g>").unwrap();
    }
    out.push_str("</svg>\n");
    out
}
