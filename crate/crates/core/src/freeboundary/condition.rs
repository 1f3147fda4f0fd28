use super::DistanceSpec;
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, extract_level_curve, Point, Polygon, Polyline, SegmentIndex};
use crate::pde::ScalarField;

/// Distance from every node to `level`, negated on nodes where `field >= l` (or, with
/// `high_is_inside = false`, where `field <= l`). Undefined nodes stay undefined.
pub fn signed_level_distance(field: &ScalarField, level: &Polyline, l: f64, high_is_inside: bool) -> ScalarField {
    capped_level_distance(field, level, l, high_is_inside, |_| f64::INFINITY)
}

/// As [`signed_level_distance`] with magnitudes clamped to `cap(x)`.
pub(crate) fn capped_level_distance(
    field: &ScalarField,
    level: &Polyline,
    l: f64,
    high_is_inside: bool,
    cap: impl Fn(Point) -> f64,
) -> ScalarField {
    let index = SegmentIndex::new(level.segments());
    let g = field.grid;
    let values = (0..g.len())
        .map(|k| {
            let v = field.values[k];
            if v.is_nan() {
                return f64::NAN;
            }
            let x = g.node_point(k);
            let d = index.distance_within(x, cap(x));
            let inside = if high_is_inside { v >= l } else { v <= l };
            if inside {
                -d
            } else {
                d
            }
        })
        .collect();
    ScalarField::new(g, values)
}

/// Samples the boundary at pitch `h/2` and returns `max |dist(x, {u = l}) - λ(x)|` together with
/// the per-sample values.
pub fn check_distance_condition(
    field: &ScalarField,
    boundary: &Polygon,
    spec: &DistanceSpec,
) -> Result<(f64, Vec<f64>)> {
    let level = extract_level_curve(field, spec.l)?;
    Ok(distance_residuals(&level, boundary, spec, field.grid.h))
}

pub(crate) fn distance_residuals(level: &Polyline, boundary: &Polygon, spec: &DistanceSpec, h: f64) -> (f64, Vec<f64>) {
    let index = SegmentIndex::new(level.segments());
    let per: Vec<f64> = boundary
        .sample_boundary(0.5 * h)
        .into_iter()
        .map(|x| (index.distance(x) - spec.lambda_at(x)).abs())
        .collect();
    let max = per.iter().copied().fold(0.0, f64::max);
    (max, per)
}

/// Boundary of `{phi >= 0}`: the largest closed zero contour, convexified if requested.
/// `None` when the set has no closed boundary component.
pub(crate) fn boundary_of_superlevel(phi: &ScalarField, convexify: bool) -> Result<Option<Polygon>> {
    let curve = match extract_level_curve(phi, 0.0) {
        Ok(c) => c,
        Err(Error::LevelNotPresent { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let Some(ring) = curve.largest_ring() else { return Ok(None) };
    if ring.points.iter().any(|&p| phi.grid.is_border(nearest_node(phi, p))) {
        return Err(Error::DegenerateGeometry(
            "free boundary reached the edge of the grid; enlarge the grid".into(),
        ));
    }
    let poly = if convexify {
        convex_hull(&ring.points).map(Polygon::from)
    } else {
        Polygon::new(ring.points.clone())
    };
    match poly {
        Ok(p) => Ok(Some(p)),
        Err(Error::DegenerateGeometry(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn nearest_node(f: &ScalarField, p: Point) -> usize {
    let g = f.grid;
    let i = ((p.x - g.origin.x) / g.h).round().clamp(0.0, (g.nx - 1) as f64) as usize;
    let j = ((p.y - g.origin.y) / g.h).round().clamp(0.0, (g.ny - 1) as f64) as usize;
    g.index(i, j)
}
