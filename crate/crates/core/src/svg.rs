//! SVG drawing of a run report.

use std::fmt::Write;

use crate::error::PackError;
use crate::harness::RunReport;
use crate::packer::OverlayKind;

#[derive(Clone, Copy, Debug, Default)]
pub struct SvgOptions {
    /// Draw bricks, boxes and shelves from the algorithm trace.
    pub overlays: bool,
}

/// Coordinates rounded to 1e-9 with trailing zeros dropped.
fn num(v: f64) -> String {
    let s = format!("{:.9}", (v * 1e9).round() / 1e9);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn render_svg(report: &RunReport, options: SvgOptions) -> Result<String, PackError> {
    if report.placements.is_empty() {
        return Err(PackError::EmptyPacking);
    }
    let [x0, y0, x1, y1] = report.bounding_box;
    let (w, h) = (x1 - x0, y1 - y0);
    let margin = 0.05 * w.max(h);
    // SVG's y axis points down; mirror around the box so that y0 maps to the bottom.
    let flip = |y: f64, height: f64| y0 + y1 - y - height;
    let stroke = w.max(h) / 400.0;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        num(x0 - margin),
        num(y0 - margin),
        num(w + 2.0 * margin),
        num(h + 2.0 * margin)
    )
    .unwrap();
    writeln!(
        out,
        r#"<title>{} {} ratio {}</title>"#,
        report.algorithm, report.objective, report.ratio
    )
    .unwrap();

    if options.overlays {
        writeln!(out, r#"<g class="overlays" fill="none">"#).unwrap();
        for o in &report.overlays {
            let [a, b, c, d] = o.rect;
            let (color, width) = match o.kind {
                OverlayKind::Brick => ("#444444", 2.0 * stroke),
                OverlayKind::Box => ("#1f5fbf", 2.0 * stroke),
                OverlayKind::Shelf => ("#9ab", stroke),
            };
            let top = d.min(y1.max(b));
            writeln!(
                out,
                r#"<rect class="{:?}" x="{}" y="{}" width="{}" height="{}" stroke="{}" stroke-width="{}"><title>{}</title></rect>"#,
                o.kind,
                num(a),
                num(flip(b, top - b)),
                num(c - a),
                num(top - b),
                color,
                num(width),
                o.label
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }

    writeln!(out, r##"<g class="pieces" fill="#c8c8c8" stroke="#000000" stroke-width="{}">"##, num(stroke)).unwrap();
    for p in &report.placements {
        writeln!(
            out,
            r#"<rect class="piece" x="{}" y="{}" width="{}" height="{}"/>"#,
            num(p.x),
            num(flip(p.y, p.height)),
            num(p.width),
            num(p.height)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(
        out,
        r##"<rect class="bounding-box" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#d02020" stroke-width="{}"/>"##,
        num(x0),
        num(y0),
        num(w),
        num(h),
        num(stroke)
    )
    .unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Length, Piece};
    use crate::harness::{run, RunOptions};
    use crate::packer::{Algorithm, Objective};

    #[test]
    fn single_piece() {
        let s = vec![Piece::square(Length::one()).unwrap()];
        let r = run(&s, Algorithm::BrickTranslation, Objective::Perimeter, RunOptions::default()).unwrap();
        let svg = render_svg(&r, SvgOptions::default()).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let rects: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("rect")).collect();
        assert_eq!(rects.iter().filter(|n| n.attribute("class") == Some("piece")).count(), 1);
        assert_eq!(rects.iter().filter(|n| n.attribute("class") == Some("bounding-box")).count(), 1);
    }

    #[test]
    fn overlays_are_drawn() {
        let s: Vec<Piece> = (1..20).map(|i| Piece::ratio((i, 17), (20 - i, 19)).unwrap()).collect();
        for alg in [Algorithm::BrickTranslation, Algorithm::DynBoxTrans] {
            let obj = if alg.is_brick() { Objective::Perimeter } else { Objective::Area };
            let r = run(&s, alg, obj, RunOptions::default()).unwrap();
            let svg = render_svg(&r, SvgOptions { overlays: true }).unwrap();
            let doc = roxmltree::Document::parse(&svg).unwrap();
            let overlays = doc
                .descendants()
                .filter(|n| n.has_tag_name("rect") && n.parent().and_then(|p| p.attribute("class")) == Some("overlays"))
                .count();
            assert_eq!(overlays, r.overlays.len());
            assert!(overlays > 0);
            assert_eq!(svg, render_svg(&r, SvgOptions { overlays: true }).unwrap());
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.1234567891234), "0.123456789");
        assert_eq!(num(-0.0000000001), "0");
    }
}
