use crate::geometry::{Grid2D, Point};

/// Nodal values on a grid; `NaN` marks nodes where the field is undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "field size must match the grid");
        Self { grid, values }
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.node_point(k))).collect();
        Self { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Range of the defined values, `None` if nothing is defined.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied().filter(|v| !v.is_nan());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Bilinear interpolation; `None` outside the grid or next to an undefined node.
    pub fn interpolate(&self, x: Point) -> Option<f64> {
        let (i, j, fx, fy) = self.grid.locate(x)?;
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        let v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
        (!v.is_nan()).then_some(v)
    }

    /// Bilinear interpolation over the defined corners only, with the weights renormalized.
    /// `None` outside the grid or when no corner is defined.
    pub fn interpolate_defined(&self, x: Point) -> Option<f64> {
        let (i, j, fx, fy) = self.grid.locate(x)?;
        let corners = [
            (self.at(i, j), (1.0 - fx) * (1.0 - fy)),
            (self.at(i + 1, j), fx * (1.0 - fy)),
            (self.at(i, j + 1), (1.0 - fx) * fy),
            (self.at(i + 1, j + 1), fx * fy),
        ];
        let (mut num, mut den) = (0.0, 0.0);
        for (v, w) in corners {
            if !v.is_nan() {
                num += w * v;
                den += w;
            }
        }
        (den > 0.0).then(|| num / den)
    }
}
