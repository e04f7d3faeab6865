//! Static SVG pictures of the carpet and a codebook.

use std::fmt::Write;

use carpet_quant::measure::GridCell;
use carpet_quant::Codebook;

pub const CANVAS: f64 = 900.0;
pub const MAX_CARPET_DEPTH: u32 = 7;

fn cells(depth: u32) -> Vec<GridCell> {
    let mut level = vec![GridCell::root()];
    for _ in 0..depth {
        level = level.iter().flat_map(|c| c.children()).collect();
    }
    level
}

/// Unit square mapped to a 900×900 canvas, y pointing up.
pub fn render_svg(codebook: &Codebook, carpet_depth: u32) -> String {
    assert!(carpet_depth <= MAX_CARPET_DEPTH);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="900" height="900" viewBox="0 0 900 900">"#
    )
    .unwrap();
    writeln!(s, r##"<rect x="0" y="0" width="900" height="900" fill="#ffffff" stroke="#000000" stroke-width="1"/>"##).unwrap();
    writeln!(s, r##"<g fill="#b0b0b0" stroke="none">"##).unwrap();
    for cell in cells(carpet_depth) {
        let (x, y) = cell.corners_f64()[0];
        let side = 1.0 / 3f64.powi(carpet_depth as i32);
        writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
            x * CANVAS,
            (1.0 - y - side) * CANVAS,
            side * CANVAS,
            side * CANVAS
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    let radius = (12.0 / (codebook.len() as f64).sqrt()).clamp(2.0, 8.0);
    writeln!(s, r##"<g fill="#c00000" stroke="#000000" stroke-width="0.5">"##).unwrap();
    for p in codebook.points() {
        let (x, y) = p.to_f64();
        writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{radius:.3}"/>"#, x * CANVAS, (1.0 - y) * CANVAS).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use carpet_quant::Point;

    #[test]
    fn single_center_point() {
        let svg = render_svg(&Codebook::new(vec![Point::center()]).unwrap(), 2);
        assert_eq!(svg.matches("<rect").count(), 1 + 16);
        assert!(svg.contains(r#"<circle cx="450.000" cy="450.000""#));
        assert_eq!(svg, render_svg(&Codebook::new(vec![Point::center()]).unwrap(), 2));
    }

    #[test]
    fn origin_is_bottom_left() {
        let svg = render_svg(&Codebook::new(vec![Point::frac(1, 6, 1, 6)]).unwrap(), 1);
        assert!(svg.contains(r#"<circle cx="150.000" cy="750.000""#));
        assert!(svg.contains(r#"<rect x="0.000" y="600.000" width="300.000" height="300.000"/>"#));
    }
}
