use std::collections::VecDeque;

use super::grid::{Grid2D, DIRS};
use super::point::Point;
use super::polygon::{boundary_gap, Polygon};
use crate::error::{Error, Result};

/// Node classification of a ring-shaped region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Inner,
    Annulus,
    Outer,
}

/// Smallest arm fraction kept for a cut edge; keeps the stencil weights bounded.
pub const MIN_ARM: f64 = 1e-2;

/// Per-node labels with Dirichlet data, plus the fractional distance (in units of `h`)
/// from every annulus node to the boundary along each grid direction.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMask {
    pub grid: Grid2D,
    labels: Vec<Label>,
    arms: Vec<[f64; 4]>,
    pub dirichlet_inner: f64,
    pub dirichlet_outer: f64,
}

impl RegionMask {
    /// Mask from labels alone: every arm is a full grid step.
    pub fn from_labels(grid: Grid2D, labels: Vec<Label>, v_in: f64, v_out: f64) -> Result<Self> {
        if labels.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "label count {} does not match grid size {}",
                labels.len(),
                grid.len()
            )));
        }
        let mask = Self {
            grid,
            arms: vec![[1.0; 4]; labels.len()],
            labels,
            dirichlet_inner: v_in,
            dirichlet_outer: v_out,
        };
        mask.validate()?;
        Ok(mask)
    }

    #[inline]
    pub fn label(&self, idx: usize) -> Label {
        self.labels[idx]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Arm fractions in `(0, 1]` for the four directions of [`DIRS`].
    #[inline]
    pub fn arms(&self, idx: usize) -> [f64; 4] {
        self.arms[idx]
    }

    pub fn dirichlet(&self, label: Label) -> Option<f64> {
        match label {
            Label::Inner => Some(self.dirichlet_inner),
            Label::Outer => Some(self.dirichlet_outer),
            Label::Annulus => None,
        }
    }

    pub fn annulus_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Annulus).count()
    }

    pub fn annulus_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == Label::Annulus)
            .map(|(i, _)| i)
    }

    /// Checks that the annulus is non-empty, away from the grid border, touches
    /// both boundary components and is edge-connected.
    fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let mut start = None;
        let mut count = 0;
        let mut any_inner = false;
        for (idx, &l) in self.labels.iter().enumerate() {
            match l {
                Label::Annulus => {
                    if g.is_border(idx) {
                        return Err(Error::DegenerateGeometry(
                            "annulus reaches the grid border; enlarge the grid".into(),
                        ));
                    }
                    start.get_or_insert(idx);
                    count += 1;
                }
                Label::Inner => {
                    if g.is_border(idx) {
                        return Err(Error::DegenerateGeometry(
                            "inner body reaches the grid border".into(),
                        ));
                    }
                    any_inner = true;
                }
                Label::Outer => {}
            }
        }
        let Some(start) = start else {
            return Err(Error::EmptyAnnulus { gap: 0.0, required: 3.0 * g.h });
        };
        if !any_inner {
            return Err(Error::DegenerateGeometry(
                "inner body contains no grid node; refine the grid".into(),
            ));
        }
        let mut seen = vec![false; self.labels.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 1;
        let (mut touches_in, mut touches_out) = (false, false);
        while let Some(idx) = queue.pop_front() {
            for d in 0..4 {
                let Some(n) = g.neighbor(idx, d) else { continue };
                match self.labels[n] {
                    Label::Annulus if !seen[n] => {
                        seen[n] = true;
                        reached += 1;
                        queue.push_back(n);
                    }
                    Label::Inner => touches_in = true,
                    Label::Outer => touches_out = true,
                    _ => {}
                }
            }
        }
        if reached != count {
            return Err(Error::DegenerateGeometry(format!(
                "annulus splits into several components ({reached} of {count} nodes reachable)"
            )));
        }
        if !(touches_in && touches_out) {
            return Err(Error::DegenerateGeometry(
                "annulus does not separate the inner body from the exterior".into(),
            ));
        }
        Ok(())
    }
}

/// Sorted abscissae where the horizontal line `y` crosses the polygon boundary
/// (half-open rule on vertices, so every crossing is counted once).
fn line_crossings(poly: &Polygon, y: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    for (a, b) in poly.edges() {
        if (a.y > y) != (b.y > y) {
            let t = (y - a.y) / (b.y - a.y);
            xs.push(a.x + t * (b.x - a.x));
        }
    }
    xs.sort_by(f64::total_cmp);
    xs
}

#[inline]
fn inside_by_crossings(xs: &[f64], x: f64) -> bool {
    xs.partition_point(|&c| c < x) % 2 == 1
}

/// Fraction of the segment `x -> x + step` before it first meets the boundary of `poly`
/// (1 if it never does).
fn arm_fraction(poly: &Polygon, x: Point, step: Point) -> f64 {
    let mut best: f64 = 1.0;
    for (a, b) in poly.edges() {
        let e = b - a;
        let denom = step.cross(e);
        if denom == 0.0 {
            continue;
        }
        let d = a - x;
        let t = d.cross(e) / denom;
        let s = d.cross(step) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
            best = best.min(t);
        }
    }
    best.clamp(MIN_ARM, 1.0)
}

/// Labels the grid against `inner ⊂ outer` and records cut-edge arm fractions.
pub fn rasterize(
    inner: &Polygon,
    outer: &Polygon,
    grid: &Grid2D,
    v_in: f64,
    v_out: f64,
) -> Result<RegionMask> {
    let tol = outer.tol_geo().max(inner.tol_geo());
    if let Some(v) = inner.vertices().iter().find(|&&v| outer.signed_distance(v) > tol) {
        return Err(Error::DegenerateGeometry(format!(
            "inner polygon vertex ({}, {}) lies outside the outer polygon",
            v.x, v.y
        )));
    }
    let gap = boundary_gap(inner, outer);
    let required = 3.0 * grid.h;
    if gap < required {
        return Err(Error::EmptyAnnulus { gap, required });
    }

    let h = grid.h;
    let rows_in: Vec<Vec<f64>> = (0..grid.ny).map(|j| line_crossings(inner, grid.y(j))).collect();
    let rows_out: Vec<Vec<f64>> = (0..grid.ny).map(|j| line_crossings(outer, grid.y(j))).collect();

    let mut labels = vec![Label::Outer; grid.len()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let x = grid.x(i);
            labels[grid.index(i, j)] = if inside_by_crossings(&rows_in[j], x) {
                Label::Inner
            } else if inside_by_crossings(&rows_out[j], x) {
                Label::Annulus
            } else {
                Label::Outer
            };
        }
    }

    let mut arms = vec![[1.0; 4]; grid.len()];
    for idx in 0..grid.len() {
        if labels[idx] != Label::Annulus {
            continue;
        }
        let x = grid.node_point(idx);
        for (d, &(di, dj)) in DIRS.iter().enumerate() {
            let Some(n) = grid.neighbor(idx, d) else { continue };
            let poly = match labels[n] {
                Label::Annulus => continue,
                Label::Inner => inner,
                Label::Outer => outer,
            };
            arms[idx][d] = arm_fraction(poly, x, Point::new(di as f64 * h, dj as f64 * h));
        }
    }

    let mask = RegionMask {
        grid: *grid,
        labels,
        arms,
        dirichlet_inner: v_in,
        dirichlet_outer: v_out,
    };
    mask.validate()?;
    Ok(mask)
}
