//! Grouped bar chart of the entropy table as a standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use crate::pipeline::RunManifest;
use crate::report::{write_atomic, ReportError};

const SERIES: [(&str, &str); 5] = [
    ("E", "#4e79a7"),
    ("d", "#f28e2b"),
    ("W", "#e15759"),
    ("lambda", "#76b7b2"),
    ("W'", "#59a14f"),
];

const BAR_WIDTH: f64 = 9.0;
const GROUP_GAP: f64 = 14.0;
const PLOT_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 50.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 40.0;

/// Renders one bar group per indicator with bars for E, d, W, λ and W'.
/// Output bytes depend only on the manifest's entropy table.
pub fn render_chart(m: &RunManifest) -> String {
    let rows = &m.entropy.rows;
    let values: Vec<[f64; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.entropy,
                r.divergence,
                r.weight,
                r.lambda.unwrap_or(0.0),
                r.adjusted.unwrap_or(0.0),
            ]
        })
        .collect();
    let y_max = values.iter().flatten().fold(1.0f64, |a, b| a.max(*b));
    let group_width = BAR_WIDTH * SERIES.len() as f64 + GROUP_GAP;
    let width = MARGIN_LEFT + group_width * rows.len() as f64 + 20.0;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let baseline = MARGIN_TOP + PLOT_HEIGHT;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="16" text-anchor="middle" font-size="12">Indicator entropy, divergence and weights</text>"#,
        width / 2.0
    );
    for tick in 0..=4 {
        let v = y_max * tick as f64 / 4.0;
        let y = baseline - PLOT_HEIGHT * tick as f64 / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#ddd"/><text x="{:.1}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            width - 20.0,
            MARGIN_LEFT - 4.0,
            y + 3.0
        );
    }
    for (g, (row, vals)) in rows.iter().zip(&values).enumerate() {
        let x0 = MARGIN_LEFT + GROUP_GAP / 2.0 + group_width * g as f64;
        let _ = writeln!(s, r#"<g class="indicator" data-indicator="{}">"#, row.indicator);
        for (k, ((name, color), v)) in SERIES.iter().zip(vals).enumerate() {
            let h = PLOT_HEIGHT * v / y_max;
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-series="{name}" x="{:.2}" y="{:.2}" width="{BAR_WIDTH:.2}" height="{h:.2}" fill="{color}"><title>{} {name} = {v:.4}</title></rect>"#,
                x0 + BAR_WIDTH * k as f64,
                baseline - h,
                row.indicator
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text></g>"#,
            x0 + BAR_WIDTH * SERIES.len() as f64 / 2.0,
            baseline + 14.0,
            row.indicator
        );
    }
    for (k, (name, color)) in SERIES.iter().enumerate() {
        let x = MARGIN_LEFT + 70.0 * k as f64;
        let y = height - 14.0;
        let _ = writeln!(
            s,
            r#"<rect class="legend-swatch" x="{x:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{y:.1}">{name}</text>"#,
            y - 9.0,
            x + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_chart(m: &RunManifest, path: &Path) -> Result<(), ReportError> {
    write_atomic(path, render_chart(m).as_bytes())
}
