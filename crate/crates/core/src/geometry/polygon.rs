use std::ops::Deref;

use super::point::{point_segment_distance, BBox, Point};
use crate::error::{Error, Result};

/// Relative geometric tolerance; the absolute value is this times the bounding-box diameter.
pub const TOL_GEO_REL: f64 = 1e-9;

/// A simple polygon with counterclockwise vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Builds a polygon, reorienting clockwise input and dropping repeated vertices.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let bbox = BBox::from_points(&vertices)
            .ok_or_else(|| Error::DegenerateGeometry("empty vertex list".into()))?;
        let tol = TOL_GEO_REL * bbox.diameter().max(f64::MIN_POSITIVE);
        let mut v: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::DegenerateGeometry("non-finite vertex".into()));
            }
            if v.last().is_none_or(|q| q.dist(p) > tol) {
                v.push(p);
            }
        }
        while v.len() > 1 && v[0].dist(*v.last().unwrap()) <= tol {
            v.pop();
        }
        if v.len() < 3 {
            return Err(Error::DegenerateGeometry(format!(
                "polygon needs at least 3 distinct vertices, got {}",
                v.len()
            )));
        }
        let a = signed_area(&v);
        if a.abs() <= tol * tol {
            return Err(Error::DegenerateGeometry("polygon has zero area".into()));
        }
        if a < 0.0 {
            v.reverse();
        }
        Ok(Self { vertices: v })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` pairs, closing back to the first vertex.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(&self.vertices).expect("polygon is non-empty")
    }

    pub fn tol_geo(&self) -> f64 {
        TOL_GEO_REL * self.bbox().diameter()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point {
        let mut c = Point::default();
        let mut a2 = 0.0;
        for (p, q) in self.edges() {
            let w = p.cross(q);
            a2 += w;
            c += (p + q) * w;
        }
        c * (1.0 / (3.0 * a2))
    }

    /// Even-odd point-in-polygon test (boundary points are unspecified).
    pub fn contains_point(&self, x: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > x.y) != (b.y > x.y) {
                let t = (x.y - a.y) / (b.y - a.y);
                if x.x < a.x + t * (b.x - a.x) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Unsigned distance from `x` to the polygon boundary.
    pub fn boundary_distance(&self, x: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(x, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance to the boundary, negative inside.
    pub fn signed_distance(&self, x: Point) -> f64 {
        let d = self.boundary_distance(x);
        if self.contains_point(x) {
            -d
        } else {
            d
        }
    }

    /// Boundary points containing every vertex, with each edge split so that
    /// consecutive samples are at most `pitch` apart.
    pub fn sample_boundary(&self, pitch: f64) -> Vec<Point> {
        assert!(pitch > 0.0);
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            let n = (a.dist(b) / pitch).ceil().max(1.0) as usize;
            for k in 0..n {
                out.push(a.lerp(b, k as f64 / n as f64));
            }
        }
        out
    }

    /// Points spaced uniformly in arc length (closed curve), at most `pitch` apart.
    pub fn resample_uniform(&self, pitch: f64) -> Vec<Point> {
        let per = self.perimeter();
        let n = ((per / pitch).ceil() as usize).max(8);
        let step = per / n as f64;
        let mut out = Vec::with_capacity(n);
        let edges: Vec<(Point, Point, f64)> = self.edges().map(|(a, b)| (a, b, a.dist(b))).collect();
        let mut e = 0;
        let mut acc = 0.0;
        for k in 0..n {
            let s = k as f64 * step;
            while e + 1 < edges.len() && acc + edges[e].2 < s {
                acc += edges[e].2;
                e += 1;
            }
            let (a, b, len) = edges[e];
            let t = if len > 0.0 { ((s - acc) / len).clamp(0.0, 1.0) } else { 0.0 };
            out.push(a.lerp(b, t));
        }
        out
    }

    pub fn translated(&self, d: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| p + d).collect(),
        }
    }

    /// Convexity test: every turn is left-handed up to `tol` (length units).
    pub fn is_convex(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let e1 = b - a;
            let e2 = c - b;
            e1.cross(e2) >= -tol * (e1.norm() + e2.norm())
        })
    }
}

pub(crate) fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

/// A convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon(Polygon);

impl Deref for ConvexPolygon {
    type Target = Polygon;
    fn deref(&self) -> &Polygon {
        &self.0
    }
}

impl AsRef<Polygon> for ConvexPolygon {
    fn as_ref(&self) -> &Polygon {
        &self.0
    }
}

impl From<ConvexPolygon> for Polygon {
    fn from(p: ConvexPolygon) -> Polygon {
        p.0
    }
}

impl ConvexPolygon {
    /// Validates convexity (up to `tol_geo`) of a vertex list.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let poly = Polygon::new(vertices)?;
        let tol = poly.tol_geo();
        if !poly.is_convex(tol) {
            return Err(Error::DegenerateGeometry("polygon is not convex".into()));
        }
        Ok(Self(poly))
    }

    /// Regular `n`-gon inscribed in the circle of radius `radius`.
    pub fn regular(center: Point, radius: f64, n: usize) -> Result<Self> {
        if n < 3 || !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "regular polygon needs n >= 3 and radius > 0 (n={n}, radius={radius})"
            )));
        }
        let v = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + Point::new(radius * a.cos(), radius * a.sin())
            })
            .collect();
        Self::new(v)
    }

    /// Axis-aligned rectangle.
    pub fn rectangle(min: Point, max: Point) -> Result<Self> {
        Self::new(vec![min, Point::new(max.x, min.y), max, Point::new(min.x, max.y)])
    }

    /// Axis-aligned square centred at `center`.
    pub fn square(center: Point, side: f64) -> Result<Self> {
        let h = Point::new(side / 2.0, side / 2.0);
        Self::rectangle(center - h, center + h)
    }

    pub fn polygon(&self) -> &Polygon {
        &self.0
    }

    pub fn translated(&self, d: Point) -> ConvexPolygon {
        ConvexPolygon(self.0.translated(d))
    }

    /// Homothety about the origin.
    pub fn scaled(&self, s: f64) -> Result<ConvexPolygon> {
        Self::new(self.vertices().iter().map(|&p| p * s).collect())
    }

    /// True iff `x` lies inside the polygon or within `tol` of its boundary.
    pub fn contains(&self, x: Point, tol: f64) -> bool {
        let mut inside = true;
        for (a, b) in self.edges() {
            let e = b - a;
            let len = e.norm();
            // positive on the inner side of a CCW edge
            let s = e.cross(x - a) / len;
            if s < -tol {
                return false;
            }
            if s < 0.0 {
                inside = false;
            }
        }
        inside || self.boundary_distance(x) <= tol
    }

    /// Distance to the boundary, negative inside (half-plane form inside is exact for convex sets).
    pub fn signed_distance(&self, x: Point) -> f64 {
        let mut inner = f64::INFINITY;
        let mut outside = false;
        for (a, b) in self.edges() {
            let e = b - a;
            let s = e.cross(x - a) / e.norm();
            if s < 0.0 {
                outside = true;
            }
            inner = inner.min(s);
        }
        if outside {
            self.boundary_distance(x)
        } else {
            -inner
        }
    }

    /// Inner parallel body `{x : dist(x, complement) >= d}` by half-plane clipping;
    /// `None` when it is empty or degenerate.
    pub fn eroded(&self, d: f64) -> Option<ConvexPolygon> {
        let mut pts: Vec<Point> = self.vertices().to_vec();
        for (a, b) in self.edges() {
            let e = b - a;
            let n_in = Point::new(-e.y, e.x).normalized();
            let a2 = a + n_in * d;
            pts = clip_half_plane(&pts, a2, e);
            if pts.len() < 3 {
                return None;
            }
        }
        ConvexPolygon::new(pts).ok()
    }

    /// Largest inscribed disk `(center, radius)`.
    pub fn inradius(&self) -> (Point, f64) {
        let mut lo = 0.0;
        let mut hi = 0.5 * self.bbox().diameter();
        let mut center = self.centroid();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match self.eroded(mid) {
                Some(k) => {
                    lo = mid;
                    center = k.centroid();
                }
                None => hi = mid,
            }
            if hi - lo <= 1e-13 * (1.0 + hi) {
                break;
            }
        }
        (center, lo)
    }

    /// Smallest enclosing circle of the vertices `(center, radius)`.
    pub fn circumradius(&self) -> (Point, f64) {
        min_enclosing_circle(self.vertices())
    }
}

/// Sutherland–Hodgman clip of a convex vertex loop against the left side of the
/// directed line through `a` with direction `e`.
fn clip_half_plane(pts: &[Point], a: Point, e: Point) -> Vec<Point> {
    let side = |p: Point| e.cross(p - a);
    let n = pts.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let sp = side(p);
        let sq = side(q);
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

fn circle_two(a: Point, b: Point) -> (Point, f64) {
    let c = (a + b) * 0.5;
    (c, c.dist(a))
}

fn circle_three(a: Point, b: Point, c: Point) -> (Point, f64) {
    let bx = b - a;
    let cx = c - a;
    let d = 2.0 * bx.cross(cx);
    if d.abs() < 1e-300 {
        // collinear: widest pair
        let cands = [circle_two(a, b), circle_two(a, c), circle_two(b, c)];
        return cands
            .into_iter()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
    }
    let b2 = bx.dot(bx);
    let c2 = cx.dot(cx);
    let ux = (cx.y * b2 - bx.y * c2) / d;
    let uy = (bx.x * c2 - cx.x * b2) / d;
    let center = a + Point::new(ux, uy);
    (center, center.dist(a))
}

/// Incremental minimal enclosing circle (deterministic input order).
pub fn min_enclosing_circle(pts: &[Point]) -> (Point, f64) {
    let eps = |r: f64| r * (1.0 + 1e-12) + 1e-15;
    let inside = |c: &(Point, f64), p: Point| c.0.dist(p) <= eps(c.1);
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(&c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, pts[j]) {
                continue;
            }
            c = circle_two(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&c, pts[k]) {
                    c = circle_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    c
}

/// Convex hull (counterclockwise, collinear points dropped) by the monotone chain.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon> {
    let mut pts: Vec<Point> = points
        .iter()
        .copied()
        .filter(|p| p.x.is_finite() && p.y.is_finite())
        .collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "convex hull needs at least 3 points, got {}",
            pts.len()
        )));
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    let scale = BBox::from_points(&pts).unwrap().diameter();
    let tol = TOL_GEO_REL * scale * scale;
    let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::DegenerateGeometry("points are collinear".into()));
    }
    ConvexPolygon::new(hull)
}

/// Minkowski combination `(1 - t) P0 + t P1` by merging the edge sequences in angular order.
pub fn minkowski_combine(p0: &ConvexPolygon, p1: &ConvexPolygon, t: f64) -> Result<ConvexPolygon> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange { value: t, lo: 0.0, hi: 1.0 });
    }
    let a: Vec<Point> = p0.vertices().iter().map(|&p| p * (1.0 - t)).collect();
    let b: Vec<Point> = p1.vertices().iter().map(|&p| p * t).collect();
    let start = |v: &[Point]| {
        (0..v.len())
            .min_by(|&i, &j| v[i].y.total_cmp(&v[j].y).then(v[i].x.total_cmp(&v[j].x)))
            .unwrap()
    };
    let edges = |v: &[Point], s: usize| -> Vec<Point> {
        let n = v.len();
        (0..n)
            .map(|k| v[(s + k + 1) % n] - v[(s + k) % n])
            .filter(|e| e.norm() > 0.0)
            .collect()
    };
    let (sa, sb) = (start(&a), start(&b));
    let ea = edges(&a, sa);
    let eb = edges(&b, sb);
    // angle in [0, 2pi) measured from +x; starting at the lowest vertex keeps each sequence sorted
    let ang = |e: Point| {
        let t = e.y.atan2(e.x);
        if t < 0.0 {
            t + 2.0 * std::f64::consts::PI
        } else {
            t
        }
    };
    let mut merged: Vec<Point> = Vec::with_capacity(ea.len() + eb.len());
    let (mut i, mut j) = (0, 0);
    while i < ea.len() || j < eb.len() {
        let take_a = if i == ea.len() {
            false
        } else if j == eb.len() {
            true
        } else {
            ang(ea[i]) <= ang(eb[j])
        };
        let e = if take_a {
            i += 1;
            ea[i - 1]
        } else {
            j += 1;
            eb[j - 1]
        };
        // fold parallel edges together
        if let Some(last) = merged.last_mut() {
            if last.cross(e).abs() <= 1e-12 * last.norm() * e.norm() && last.dot(e) > 0.0 {
                *last += e;
                continue;
            }
        }
        merged.push(e);
    }
    if merged.len() >= 2 {
        let (f, l) = (merged[0], merged[merged.len() - 1]);
        if f.cross(l).abs() <= 1e-12 * f.norm() * l.norm() && f.dot(l) > 0.0 {
            let l = merged.pop().unwrap();
            merged[0] += l;
        }
    }
    if merged.len() < 3 {
        return Err(Error::DegenerateGeometry(
            "Minkowski combination has fewer than 3 distinct edge normals".into(),
        ));
    }
    let mut v = Vec::with_capacity(merged.len());
    let mut cur = a[sa] + b[sb];
    for e in &merged[..merged.len() - 1] {
        v.push(cur);
        cur += *e;
    }
    v.push(cur);
    ConvexPolygon::new(v)
}

/// Smallest distance between the boundaries of two disjoint polygons
/// (attained at a vertex of one of them).
pub fn boundary_gap(a: &Polygon, b: &Polygon) -> f64 {
    let ab = a
        .vertices()
        .iter()
        .map(|&p| b.boundary_distance(p))
        .fold(f64::INFINITY, f64::min);
    let ba = b
        .vertices()
        .iter()
        .map(|&p| a.boundary_distance(p))
        .fold(f64::INFINITY, f64::min);
    ab.min(ba)
}

/// Largest distance from any point of `points` to the boundary of their convex hull,
/// i.e. how far the polyline through them is from being convex.
pub fn convexity_defect(points: &[Point]) -> Result<f64> {
    let hull = convex_hull(points)?;
    Ok(points
        .iter()
        .map(|&p| hull.boundary_distance(p))
        .fold(0.0, f64::max))
}
