use std::collections::HashMap;

use super::point::Point;
use crate::error::{Error, Result};
use crate::pde::ScalarField;

/// A connected chain of points; closed rings repeat no point (the closing edge is implicit).
#[derive(Clone, Debug, PartialEq)]
pub struct Ring {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Ring {
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let m = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..m).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    /// Unsigned enclosed area (shoelace); zero for open chains.
    pub fn area(&self) -> f64 {
        if !self.closed {
            return 0.0;
        }
        super::polygon::signed_area(&self.points).abs()
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }
}

/// A set of polygonal chains, typically one level set of a field.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polyline {
    pub rings: Vec<Ring>,
}

impl Polyline {
    pub fn is_empty(&self) -> bool {
        self.rings.iter().all(|r| r.points.is_empty())
    }

    pub fn segments(&self) -> Vec<(Point, Point)> {
        self.rings.iter().flat_map(|r| r.segments()).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.rings.iter().flat_map(|r| r.points.iter().copied())
    }

    /// Closed ring enclosing the largest area.
    pub fn largest_ring(&self) -> Option<&Ring> {
        self.rings
            .iter()
            .filter(|r| r.closed && r.points.len() >= 3)
            .max_by(|a, b| a.area().total_cmp(&b.area()))
    }
}

/// Extracts `{field = l}` by marching squares with linear interpolation along cell edges.
///
/// Nodes whose value equals `l` exactly are nudged upward by `1e-12` times the value range.
/// Cells touching an undefined (`NaN`) node are skipped, which can leave open chains.
pub fn extract_level_curve(field: &ScalarField, l: f64) -> Result<Polyline> {
    let g = field.grid;
    let (lo, hi) = field.range().ok_or(Error::LevelNotPresent { level: l, min: f64::NAN, max: f64::NAN })?;
    let bump = 1e-12 * (hi - lo).max(f64::MIN_POSITIVE);
    let val = |i: usize, j: usize| {
        let v = field.at(i, j);
        if v == l {
            v + bump
        } else {
            v
        }
    };
    // crossing on the edge leaving node (i, j) along +x (axis 0) or +y (axis 1)
    let edge_id = |i: usize, j: usize, axis: usize| 2 * g.index(i, j) + axis;
    let crossing = |id: usize| {
        let node = id / 2;
        let (i, j) = g.coords(node);
        let (i2, j2) = if id.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (va, vb) = (val(i, j), val(i2, j2));
        let t = (l - va) / (vb - va);
        g.point(i, j).lerp(g.point(i2, j2), t)
    };

    // segments run from an exit edge to an entry edge so the region above l lies on the left
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let v = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            let above = v.map(|x| x > l);
            if above.iter().all(|&a| a) || above.iter().all(|&a| !a) {
                continue;
            }
            // counterclockwise cell edges: bottom, right, top, left
            let ids = [edge_id(i, j, 0), edge_id(i + 1, j, 1), edge_id(i, j + 1, 0), edge_id(i, j, 1)];
            let exits: Vec<usize> = (0..4).filter(|&k| above[k] && !above[(k + 1) % 4]).collect();
            let centre_above = 0.25 * v.iter().sum::<f64>() > l;
            for &k in &exits {
                let entry = if centre_above {
                    (1..4).map(|s| (k + s) % 4).find(|&m| !above[m] && above[(m + 1) % 4])
                } else {
                    (1..4).map(|s| (k + 4 - s) % 4).find(|&m| !above[m] && above[(m + 1) % 4])
                };
                let m = entry.expect("every exit edge has a matching entry edge");
                segs.push((ids[k], ids[m]));
            }
        }
    }
    if segs.is_empty() {
        return Err(Error::LevelNotPresent { level: l, min: lo, max: hi });
    }

    let by_start: HashMap<usize, usize> = segs.iter().enumerate().map(|(k, s)| (s.0, k)).collect();
    let ends: std::collections::HashSet<usize> = segs.iter().map(|s| s.1).collect();
    let mut used = vec![false; segs.len()];
    let mut rings = Vec::new();
    let trace = |first: usize, used: &mut Vec<bool>| {
        let mut ids = vec![segs[first].0];
        let mut cur = first;
        let closed = loop {
            used[cur] = true;
            let next_edge = segs[cur].1;
            if next_edge == ids[0] {
                break true;
            }
            ids.push(next_edge);
            match by_start.get(&next_edge) {
                Some(&n) if !used[n] => cur = n,
                _ => break false,
            }
        };
        Ring { points: ids.into_iter().map(crossing).collect(), closed }
    };
    // open chains first, starting where no segment ends
    for k in 0..segs.len() {
        if !used[k] && !ends.contains(&segs[k].0) {
            rings.push(trace(k, &mut used));
        }
    }
    for k in 0..segs.len() {
        if !used[k] {
            rings.push(trace(k, &mut used));
        }
    }
    Ok(Polyline { rings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid2D;

    #[test]
    fn linear_field_gives_vertical_line() {
        let g = Grid2D::new(Point::default(), 1.0 / 16.0, 17, 17).unwrap();
        let f = ScalarField::from_fn(g, |p| p.x);
        let pl = extract_level_curve(&f, 0.5).unwrap();
        assert_eq!(pl.rings.len(), 1);
        assert!(!pl.rings[0].closed);
        assert_eq!(pl.rings[0].points.len(), 17);
        for p in pl.points() {
            assert!((p.x - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn log_potential_ring_is_near_sqrt_e() {
        let e = std::f64::consts::E;
        let h = 1.0 / 32.0;
        let g = Grid2D::covering(
            &crate::geometry::BBox { min: Point::new(-e, -e), max: Point::new(e, e) },
            h,
            2,
        )
        .unwrap();
        let f = ScalarField::from_fn(g, |p| {
            let r = p.norm().clamp(1.0, e);
            (e / r).ln()
        });
        let pl = extract_level_curve(&f, 0.5).unwrap();
        assert_eq!(pl.rings.len(), 1);
        assert!(pl.rings[0].closed);
        for p in pl.points() {
            assert!((p.norm() - e.sqrt()).abs() <= h);
        }
    }

    #[test]
    fn out_of_range_level() {
        let g = Grid2D::new(Point::default(), 0.1, 10, 10).unwrap();
        let f = ScalarField::from_fn(g, |p| p.x.min(1.0));
        assert!(matches!(extract_level_curve(&f, 1.5), Err(Error::LevelNotPresent { .. })));
    }

    #[test]
    fn saddle_and_multiple_rings() {
        // two bumps produce two closed rings
        let g = Grid2D::new(Point::new(-2.0, -1.0), 0.05, 81, 41).unwrap();
        let f = ScalarField::from_fn(g, |p| {
            let a = (-(p - Point::new(-0.8, 0.0)).dot(p - Point::new(-0.8, 0.0)) * 4.0).exp();
            let b = (-(p - Point::new(0.8, 0.0)).dot(p - Point::new(0.8, 0.0)) * 4.0).exp();
            a + b
        });
        let pl = extract_level_curve(&f, 0.5).unwrap();
        assert_eq!(pl.rings.len(), 2);
        assert!(pl.rings.iter().all(|r| r.closed));
    }

    #[test]
    fn exact_level_nodes_are_nudged() {
        let g = Grid2D::new(Point::default(), 1.0, 9, 9).unwrap();
        let f = ScalarField::from_fn(g, |p| (p.x - 4.0).abs() + (p.y - 4.0).abs());
        // level hits many nodes exactly
        let pl = extract_level_curve(&f, 2.0).unwrap();
        assert_eq!(pl.rings.len(), 1);
        assert!(pl.rings[0].closed);
    }
}
