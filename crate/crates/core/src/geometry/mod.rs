//! Planar geometry: convex polygons, grids, rasterization, level curves and distances.

mod contour;
mod distance;
mod grid;
mod index;
mod point;
mod polygon;
mod raster;

pub use contour::{extract_level_curve, Polyline, Ring};
pub use distance::{directed_hausdorff, distance_to_polyline, hausdorff, sample_segments, Segments};
pub use grid::{Grid2D, DIRS, OPPOSITE};
pub use index::SegmentIndex;
pub use point::{point_segment_distance, BBox, Point};
pub use polygon::{
    boundary_gap, convex_hull, convexity_defect, min_enclosing_circle, minkowski_combine, ConvexPolygon, Polygon,
    TOL_GEO_REL,
};
pub use raster::{rasterize, Label, RegionMask, MIN_ARM};

/// Whether `x` lies in `p` or within `tol` of its boundary.
pub fn contains(p: &ConvexPolygon, x: Point, tol: f64) -> bool {
    p.contains(x, tol)
}
