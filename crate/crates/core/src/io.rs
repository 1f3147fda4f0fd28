//! Polygon files and CSV/SVG exports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::freeboundary::IterationTrace;
use crate::geometry::{BBox, Label, Point, Polygon, Polyline, RegionMask, DIRS};
use crate::pde::ScalarField;

/// Parses "x y" lines; blank lines and text after `#` are ignored. The vertices are
/// reoriented counter-clockwise.
pub fn parse_polygon(text: &str) -> Result<Polygon> {
    let mut pts = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: n + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!("expected two numbers, found {}", fields.len())));
        }
        let x: f64 = fields[0].parse().map_err(|_| err(format!("bad number {:?}", fields[0])))?;
        let y: f64 = fields[1].parse().map_err(|_| err(format!("bad number {:?}", fields[1])))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(err("coordinates must be finite".into()));
        }
        pts.push(Point::new(x, y));
    }
    Polygon::new(pts)
}

pub fn read_polygon(path: &Path) -> Result<Polygon> {
    parse_polygon(&fs::read_to_string(path)?)
}

pub fn format_polygon(poly: &Polygon) -> String {
    let mut s = String::new();
    for v in poly.vertices() {
        let _ = writeln!(s, "{:.16e} {:.16e}", v.x, v.y);
    }
    s
}

pub fn write_polygon(poly: &Polygon, path: &Path) -> Result<()> {
    Ok(fs::write(path, format_polygon(poly))?)
}

/// "x,y,ring_id" rows, rings numbered from 0 in order.
pub fn format_polyline_csv(curve: &Polyline) -> String {
    let mut s = String::from("x,y,ring_id\n");
    for (id, ring) in curve.rings.iter().enumerate() {
        for p in &ring.points {
            let _ = writeln!(s, "{:.16e},{:.16e},{id}", p.x, p.y);
        }
    }
    s
}

/// "x,y,u" rows for annulus nodes and the Dirichlet nodes next to them, in grid order.
pub fn format_field_csv(field: &ScalarField, mask: &RegionMask) -> String {
    let g = field.grid;
    let mut s = String::from("x,y,u\n");
    for idx in 0..g.len() {
        let keep = match mask.label(idx) {
            Label::Annulus => true,
            _ => (0..DIRS.len()).any(|d| g.neighbor(idx, d).is_some_and(|n| mask.label(n) == Label::Annulus)),
        };
        let u = field.values[idx];
        if keep && !u.is_nan() {
            let x = g.node_point(idx);
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", x.x, x.y, u);
        }
    }
    s
}

pub fn format_trace_csv(trace: &IterationTrace) -> String {
    let mut s = String::from("iter,hausdorff_step,condition_residual,pde_residual,annulus_nodes\n");
    for r in &trace.rows {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{}",
            r.iter, r.hausdorff_step, r.condition_residual, r.pde_residual, r.annulus_nodes
        );
    }
    s
}

/// Generic table: a header row and rows of preformatted cells.
pub fn format_table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// Stroke class of an SVG layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Inner,
    Level,
    FreeBoundary,
}

impl Layer {
    pub fn class(self) -> &'static str {
        match self {
            Layer::Inner => "inner",
            Layer::Level => "level",
            Layer::FreeBoundary => "free-boundary",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Layer::Inner => "fixed body",
            Layer::Level => "level set",
            Layer::FreeBoundary => "free boundary",
        }
    }
}

/// One drawn object: closed or open point chains under a stroke class.
#[derive(Clone, Debug)]
pub struct SvgItem {
    pub layer: Layer,
    pub chains: Vec<(Vec<Point>, bool)>,
}

impl SvgItem {
    pub fn polygon(layer: Layer, p: &Polygon) -> Self {
        Self { layer, chains: vec![(p.vertices().to_vec(), true)] }
    }

    pub fn polyline(layer: Layer, c: &Polyline) -> Self {
        Self { layer, chains: c.rings.iter().map(|r| (r.points.clone(), r.closed)).collect() }
    }
}

const SVG_SIZE: f64 = 800.0;

/// Renders the items over the fixed viewBox `0 0 800 800` mapped from `bbox` (y up), with a
/// legend listing the layers present.
pub fn format_svg(items: &[SvgItem], bbox: &BBox) -> String {
    let w = (bbox.max.x - bbox.min.x).max(bbox.max.y - bbox.min.y).max(1e-12);
    let scale = SVG_SIZE / w;
    let map = |p: Point| ((p.x - bbox.min.x) * scale, SVG_SIZE - (p.y - bbox.min.y) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_SIZE} {SVG_SIZE}\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\">"
    );
    s.push_str(
        "<style>polyline,polygon{fill:none;stroke-width:1.5}.inner{stroke:#1f4e9c}.level{stroke:#c47a00;stroke-dasharray:4 3}.free-boundary{stroke:#b3202a}text{font:14px sans-serif}</style>\n",
    );
    for item in items {
        let _ = writeln!(s, "<g class=\"{}\">", item.layer.class());
        for (pts, closed) in &item.chains {
            let coords: Vec<String> = pts
                .iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let tag = if *closed { "polygon" } else { "polyline" };
            let _ = writeln!(s, "<{tag} class=\"{}\" points=\"{}\"/>", item.layer.class(), coords.join(" "));
        }
        s.push_str("</g>\n");
    }
    let mut layers: Vec<Layer> = Vec::new();
    for item in items {
        if !layers.contains(&item.layer) {
            layers.push(item.layer);
        }
    }
    s.push_str("<g class=\"legend\">\n");
    for (k, layer) in layers.iter().enumerate() {
        let y = 24.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            "<polyline class=\"{}\" points=\"12,{:.0} 40,{:.0}\"/><text x=\"48\" y=\"{:.0}\">{}</text>",
            layer.class(),
            y - 5.0,
            y - 5.0,
            y,
            layer.label()
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    Ok(fs::write(path, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexPolygon;

    #[test]
    fn polygon_round_trip_is_exact() {
        let p = ConvexPolygon::regular(Point::new(0.1, -0.2), 0.7, 9).unwrap();
        let back = parse_polygon(&format_polygon(&p)).unwrap();
        assert_eq!(back.vertices(), p.vertices());
    }

    #[test]
    fn parser_skips_comments_and_reorients() {
        let text = "# unit square, clockwise\n0 0\n0 1  # top left\n\n1 1\n1 0\n";
        let p = parse_polygon(text).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.area() > 0.0);
    }

    #[test]
    fn parser_reports_line_numbers() {
        match parse_polygon("0 0\n1 0\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polygon("0 0 0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn svg_has_classes_and_legend() {
        let p = ConvexPolygon::square(Point::default(), 1.0).unwrap();
        let items = [SvgItem::polygon(Layer::Inner, &p), SvgItem::polygon(Layer::FreeBoundary, &p)];
        let svg = format_svg(&items, &p.bbox());
        assert!(svg.contains("class=\"inner\""));
        assert!(svg.contains("class=\"free-boundary\""));
        assert!(svg.contains("class=\"legend\""));
        assert!(!svg.contains("class=\"level\""));
    }
}
