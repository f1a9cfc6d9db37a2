//! Minimal SVG heatmaps drawn as rectangle grids.

use std::fmt::Write;

const CELL: f64 = 4.0;
const MARGIN: f64 = 40.0;

/// Blue-white-red colour for `v` in `[-1, 1]`.
fn colour(v: f64) -> String {
    let t = v.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `values[row][col]` (top row first) over `[-extent, extent]^2`.
pub(crate) fn heatmap(values: &[Vec<f64>], extent: f64, title: &str) -> String {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    let (w, h) = (cols as f64 * CELL, rows as f64 * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
                MARGIN + j as f64 * CELL,
                MARGIN + i as f64 * CELL,
                colour(v)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    let label_y = MARGIN + h + 16.0;
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{label_y}" font-size="12">x = -{extent}</text>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{label_y}" font-size="12" text-anchor="end">x = {extent}</text>"#,
        MARGIN + w
    );
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="14">{}</text>"#, MARGIN - 12.0, escape(title));
    s.push_str("</svg>\n");
    s
}
