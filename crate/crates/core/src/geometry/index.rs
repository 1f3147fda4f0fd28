use super::point::{point_segment_distance, BBox, Point};

/// Uniform bucket grid over a set of segments for nearest-distance queries.
#[derive(Clone, Debug)]
pub struct SegmentIndex {
    segs: Vec<(Point, Point)>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    pub fn new(segs: Vec<(Point, Point)>) -> Self {
        let pts: Vec<Point> = segs.iter().flat_map(|&(a, b)| [a, b]).collect();
        let bbox = BBox::from_points(&pts).unwrap_or(BBox { min: Point::default(), max: Point::default() });
        let total: f64 = segs.iter().map(|(a, b)| a.dist(*b)).sum();
        let mean = if segs.is_empty() { 1.0 } else { total / segs.len() as f64 };
        let span = (bbox.max.x - bbox.min.x).max(bbox.max.y - bbox.min.y).max(1e-12);
        // a few segments per bucket, capped to keep memory linear in the input
        let cell = (2.0 * mean).max(span / 512.0).max(1e-12);
        let nx = ((bbox.max.x - bbox.min.x) / cell).floor() as usize + 1;
        let ny = ((bbox.max.y - bbox.min.y) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        let cell_of = |v: f64, o: f64, n: usize| (((v - o) / cell).floor().max(0.0) as usize).min(n - 1);
        for (k, &(a, b)) in segs.iter().enumerate() {
            let (i0, i1) = (cell_of(a.x.min(b.x), bbox.min.x, nx), cell_of(a.x.max(b.x), bbox.min.x, nx));
            let (j0, j1) = (cell_of(a.y.min(b.y), bbox.min.y, ny), cell_of(a.y.max(b.y), bbox.min.y, ny));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(k as u32);
                }
            }
        }
        Self { segs, origin: bbox.min, cell, nx, ny, buckets }
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segments(&self) -> &[(Point, Point)] {
        &self.segs
    }

    /// Exact distance from `x` to the nearest segment (`inf` when empty).
    pub fn distance(&self, x: Point) -> f64 {
        self.distance_within(x, f64::INFINITY)
    }

    /// `min(distance(x), cap)`, stopping the search once everything left is farther than `cap`.
    pub fn distance_within(&self, x: Point, cap: f64) -> f64 {
        if self.segs.is_empty() {
            return cap;
        }
        let ci = ((x.x - self.origin.x) / self.cell).floor() as i64;
        let cj = ((x.y - self.origin.y) / self.cell).floor() as i64;
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        // farthest ring that still touches the bucket grid
        let kmax = [ci, nx - 1 - ci, cj, ny - 1 - cj].iter().map(|v| v.abs()).max().unwrap() + 1;
        let mut best = f64::INFINITY;
        for k in 0..=kmax {
            for j in (cj - k)..=(cj + k) {
                if j < 0 || j >= ny {
                    continue;
                }
                let edge_row = j == cj - k || j == cj + k;
                let step = if edge_row { 1 } else { (2 * k).max(1) };
                let mut i = ci - k;
                while i <= ci + k {
                    if i >= 0 && i < nx {
                        for &s in &self.buckets[(j * nx + i) as usize] {
                            let (a, b) = self.segs[s as usize];
                            best = best.min(point_segment_distance(x, a, b));
                        }
                    }
                    i += step;
                }
            }
            // every bucket outside ring k is at least k cells away
            if best <= k as f64 * self.cell || k as f64 * self.cell >= cap {
                break;
            }
        }
        best.min(cap)
    }
}
