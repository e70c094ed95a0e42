//! Radar chart SVG for average ranks: one axis per loss criterion, one
//! polygon per variant. Rank 1 sits next to the center, the worst
//! possible rank on the rim. Output is a pure function of the input.

use std::fmt::Write as _;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const SIZE: f64 = 460.0;
const CX: f64 = 230.0;
const CY: f64 = 210.0;
const RIM: f64 = 150.0;
const INNER_FRAC: f64 = 0.12;

/// Radius for a rank in [1, max_rank].
fn radial(rank: f64, max_rank: f64) -> f64 {
    if max_rank <= 1.0 {
        return RIM * (INNER_FRAC + 0.5 * (1.0 - INNER_FRAC));
    }
    RIM * (INNER_FRAC + (1.0 - INNER_FRAC) * (rank - 1.0) / (max_rank - 1.0))
}

fn vertex(axis: usize, n_axes: usize, r: f64) -> (f64, f64) {
    let angle = -std::f64::consts::FRAC_PI_2
        + 2.0 * std::f64::consts::PI * axis as f64 / n_axes as f64;
    (CX + r * angle.cos(), CY + r * angle.sin())
}

/// Render the chart. Each series pairs a legend name with one rank per
/// axis; ranks range from 1 to the number of series.
pub fn radar_svg(title: &str, axes: &[&str], series: &[(String, Vec<f64>)]) -> String {
    assert!(axes.len() >= 3, "need at least 3 axes");
    for (_, ranks) in series {
        assert_eq!(ranks.len(), axes.len(), "one rank per axis");
    }
    let n = axes.len();
    let max_rank = series.len().max(2) as f64;
    let legend_h = 22.0 * series.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = SIZE,
        h = SIZE + legend_h
    );
    let _ = writeln!(
        svg,
        r#"<rect width="100%" height="100%" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        CX, title
    );
    // guide rings at whole ranks
    let mut rank = 1.0;
    while rank <= max_rank + 1e-9 {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#dddddd"/>"##,
            CX,
            CY,
            radial(rank, max_rank)
        );
        rank += 1.0;
    }
    for (a, name) in axes.iter().enumerate() {
        let (x, y) = vertex(a, n, RIM);
        let (lx, ly) = vertex(a, n, RIM + 18.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbbbbb"/>"##,
            CX, CY, x, y
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            lx,
            ly + 4.0,
            name
        );
    }
    for (s, (name, ranks)) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let mut points = String::new();
        for (a, &rank) in ranks.iter().enumerate() {
            let (x, y) = vertex(a, n, radial(rank, max_rank));
            let _ = write!(points, "{:.2},{:.2} ", x, y);
        }
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{}" fill-opacity="0.12" stroke="{}" stroke-width="2"/>"#,
            points.trim_end(),
            color,
            color
        );
        let ly = SIZE + 16.0 + 22.0 * s as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="24" y="{:.2}" width="14" height="14" fill="{}"/>"#,
            ly - 11.0,
            color
        );
        let _ = writeln!(
            svg,
            r#"<text x="46" y="{:.2}" font-family="sans-serif" font-size="13">{}</text>"#,
            ly,
            name
        );
    }
    svg.push_str("</svg>\n");
    svg
}
