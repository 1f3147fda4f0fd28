use super::point::{BBox, Point};
use crate::error::{Error, Result};

/// Uniform node-centred grid; node `(i, j)` sits at `origin + h * (i, j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Neighbour directions: +x, -x, +y, -y.
pub const DIRS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Index of the opposite direction in [`DIRS`].
pub const OPPOSITE: [usize; 4] = [1, 0, 3, 2];

impl Grid2D {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
        }
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 8 nodes per axis, got {nx}x{ny}"
            )));
        }
        Ok(Self { origin, h, nx, ny })
    }

    /// Smallest grid of spacing `h` covering `bbox` with `pad` extra nodes on every side.
    /// The origin is snapped to a multiple of `h` so grids built from nearby boxes share nodes.
    pub fn covering(bbox: &BBox, h: f64, pad: usize) -> Result<Self> {
        let i0 = (bbox.min.x / h).floor() as i64 - pad as i64;
        let j0 = (bbox.min.y / h).floor() as i64 - pad as i64;
        let i1 = (bbox.max.x / h).ceil() as i64 + pad as i64;
        let j1 = (bbox.max.y / h).ceil() as i64 + pad as i64;
        let nx = ((i1 - i0 + 1).max(8)) as usize;
        let ny = ((j1 - j0 + 1).max(8)) as usize;
        Self::new(Point::new(i0 as f64 * h, j0 as f64 * h), h, nx, ny)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        Point::new(self.origin.x + self.h * i as f64, self.origin.y + self.h * j as f64)
    }

    #[inline]
    pub fn node_point(&self, idx: usize) -> Point {
        let (i, j) = self.coords(idx);
        self.point(i, j)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin.x + self.h * i as f64
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin.y + self.h * j as f64
    }

    /// Neighbour of `idx` in direction `d` (see [`DIRS`]), if inside the grid.
    #[inline]
    pub fn neighbor(&self, idx: usize, d: usize) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let (di, dj) = DIRS[d];
        let ni = i as isize + di;
        let nj = j as isize + dj;
        if ni < 0 || nj < 0 || ni >= self.nx as isize || nj >= self.ny as isize {
            None
        } else {
            Some(self.index(ni as usize, nj as usize))
        }
    }

    pub fn is_border(&self, idx: usize) -> bool {
        let (i, j) = self.coords(idx);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    pub fn bbox(&self) -> BBox {
        BBox {
            min: self.origin,
            max: self.point(self.nx - 1, self.ny - 1),
        }
    }

    /// Bilinear weights of the cell containing `x`: `(i, j, fx, fy)`, or `None` outside.
    pub fn locate(&self, x: Point) -> Option<(usize, usize, f64, f64)> {
        let gx = (x.x - self.origin.x) / self.h;
        let gy = (x.y - self.origin.y) / self.h;
        if !(gx >= 0.0 && gy >= 0.0) {
            return None;
        }
        let i = (gx.floor() as usize).min(self.nx - 2);
        let j = (gy.floor() as usize).min(self.ny - 2);
        let fx = gx - i as f64;
        let fy = gy - j as f64;
        if fx > 1.0 || fy > 1.0 {
            return None;
        }
        Some((i, j, fx, fy))
    }
}
