use super::contour::Polyline;
use super::index::SegmentIndex;
use super::point::{point_segment_distance, Point};
use super::polygon::{ConvexPolygon, Polygon};

/// Anything made of straight segments.
pub trait Segments {
    fn segment_list(&self) -> Vec<(Point, Point)>;
}

impl Segments for Polyline {
    fn segment_list(&self) -> Vec<(Point, Point)> {
        self.segments()
    }
}

impl Segments for Polygon {
    fn segment_list(&self) -> Vec<(Point, Point)> {
        self.edges().collect()
    }
}

impl Segments for ConvexPolygon {
    fn segment_list(&self) -> Vec<(Point, Point)> {
        self.edges().collect()
    }
}

impl Segments for [(Point, Point)] {
    fn segment_list(&self) -> Vec<(Point, Point)> {
        self.to_vec()
    }
}

/// Exact minimum distance from `x` to the union of the curve's segments.
pub fn distance_to_polyline(x: Point, curve: &Polyline) -> f64 {
    let mut best = f64::INFINITY;
    for ring in &curve.rings {
        if ring.points.len() == 1 {
            best = best.min(x.dist(ring.points[0]));
        }
        for (a, b) in ring.segments() {
            best = best.min(point_segment_distance(x, a, b));
        }
    }
    best
}

/// Points along every segment, consecutive samples at most `pitch` apart.
pub fn sample_segments(segs: &[(Point, Point)], pitch: f64) -> Vec<Point> {
    assert!(pitch > 0.0);
    let mut out = Vec::new();
    for &(a, b) in segs {
        let n = (a.dist(b) / pitch).ceil().max(1.0) as usize;
        for k in 0..=n {
            out.push(a.lerp(b, k as f64 / n as f64));
        }
    }
    out
}

/// One-sided distance `max_{a in A} dist(a, B)` with `A` sampled at `pitch`.
pub fn directed_hausdorff<A: Segments + ?Sized, B: Segments + ?Sized>(a: &A, b: &B, pitch: f64) -> f64 {
    let index = SegmentIndex::new(b.segment_list());
    sample_segments(&a.segment_list(), pitch)
        .into_iter()
        .map(|p| index.distance(p))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two segment sets, sampling edges at `pitch`.
/// Underestimates the exact value by at most `pitch / 2`.
pub fn hausdorff<A: Segments + ?Sized, B: Segments + ?Sized>(a: &A, b: &B, pitch: f64) -> f64 {
    directed_hausdorff(a, b, pitch).max(directed_hausdorff(b, a, pitch))
}
