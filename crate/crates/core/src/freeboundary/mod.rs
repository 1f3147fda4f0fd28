//! Fixed-point shape iterations for the exterior, interior and two-phase problems.

mod condition;
mod exterior;
mod interior;
mod lambda_max;
mod two_phase;

use std::fmt;
use std::sync::Arc;

pub use condition::{check_distance_condition, signed_level_distance};
pub use exterior::{exterior_update, iterate_exterior};
pub use interior::iterate_interior;
pub use lambda_max::estimate_lambda_max;
pub use two_phase::{two_phase_iterate, HypothesisReport, JoiningFunction, TwoPhaseOptions, TwoPhaseSolution};

use crate::error::{Error, Result};
use crate::geometry::{Grid2D, Point, Polygon, Polyline, RegionMask};
use crate::pde::{PLaplaceConfig, ScalarField};

/// Target distance `λ` between the free boundary and the level set, constant or position dependent.
#[derive(Clone)]
pub enum LambdaField {
    Constant(f64),
    /// A positive function with declared bounds `c0 <= λ(x) <= c1`.
    Function {
        f: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
        c0: f64,
        c1: f64,
    },
}

impl fmt::Debug for LambdaField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaField::Constant(c) => write!(f, "Constant({c})"),
            LambdaField::Function { c0, c1, .. } => write!(f, "Function {{ c0: {c0}, c1: {c1} }}"),
        }
    }
}

/// The level `l` and distance `λ` of the boundary condition.
#[derive(Clone, Debug)]
pub struct DistanceSpec {
    pub l: f64,
    pub lambda: LambdaField,
    /// Set when `l = ωλ` was derived from a gradient target `ω`.
    pub omega: Option<f64>,
}

impl DistanceSpec {
    pub fn constant(l: f64, lambda: f64) -> Result<Self> {
        let s = Self { l, lambda: LambdaField::Constant(lambda), omega: None };
        s.validate()?;
        Ok(s)
    }

    pub fn variable(l: f64, f: impl Fn(Point) -> f64 + Send + Sync + 'static, c0: f64, c1: f64) -> Result<Self> {
        let s = Self { l, lambda: LambdaField::Function { f: Arc::new(f), c0, c1 }, omega: None };
        s.validate()?;
        Ok(s)
    }

    /// Bernoulli-limit preset `l = ωλ`.
    pub fn bernoulli(omega: f64, lambda: f64) -> Result<Self> {
        let s = Self { l: omega * lambda, lambda: LambdaField::Constant(lambda), omega: Some(omega) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l < 1.0) {
            return Err(Error::OutOfRange { value: self.l, lo: 0.0, hi: 1.0 });
        }
        match &self.lambda {
            LambdaField::Constant(c) if !(*c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidParameter(format!("lambda must be positive, got {c}")))
            }
            LambdaField::Function { c0, c1, .. } if !(*c0 > 0.0 && c0 <= c1 && c1.is_finite()) => Err(
                Error::InvalidParameter(format!("lambda bounds must satisfy 0 < c0 <= c1, got [{c0}, {c1}]")),
            ),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn lambda_at(&self, x: Point) -> f64 {
        match &self.lambda {
            LambdaField::Constant(c) => *c,
            LambdaField::Function { f, .. } => f(x),
        }
    }

    /// Lower bound of `λ`.
    pub fn lambda_min(&self) -> f64 {
        match &self.lambda {
            LambdaField::Constant(c) => *c,
            LambdaField::Function { c0, .. } => *c0,
        }
    }

    /// The constant `λ`, if any.
    pub fn constant_lambda(&self) -> Option<f64> {
        match &self.lambda {
            LambdaField::Constant(c) => Some(*c),
            LambdaField::Function { .. } => None,
        }
    }
}

/// Grid, PDE settings and outer stopping rule of a shape iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeBoundaryConfig {
    pub grid: Grid2D,
    pub pde: PLaplaceConfig,
    /// Hausdorff step below which the iteration may stop.
    pub outer_tol: f64,
    pub outer_max: usize,
    /// Replace each updated set by its convex hull.
    pub convexify: bool,
}

impl FreeBoundaryConfig {
    /// Defaults: `outer_tol = 1.5 h`, at most 200 outer iterations, convexification on.
    pub fn new(grid: Grid2D, pde: PLaplaceConfig) -> Self {
        Self { grid, pde, outer_tol: 1.5 * grid.h, outer_max: 200, convexify: true }
    }

    /// Same settings on a grid of the same spacing covering `bbox` with `pad` spare nodes.
    pub fn regridded(&self, bbox: &crate::geometry::BBox, pad: usize) -> Result<Self> {
        Ok(Self { grid: Grid2D::covering(bbox, self.grid.h, pad)?, ..*self })
    }

    pub fn validate(&self) -> Result<()> {
        self.pde.validate()?;
        if !(self.outer_tol >= self.grid.h) {
            return Err(Error::InvalidParameter(format!(
                "outer_tol {} must be at least h = {}",
                self.outer_tol, self.grid.h
            )));
        }
        if self.outer_max == 0 {
            return Err(Error::InvalidParameter("outer_max must be positive".into()));
        }
        Ok(())
    }

    /// `GridTooCoarse` unless `λ >= 2h`.
    pub fn check_lambda(&self, lambda_min: f64) -> Result<()> {
        if lambda_min < 2.0 * self.grid.h {
            return Err(Error::GridTooCoarse { lambda: lambda_min, h: self.grid.h });
        }
        Ok(())
    }
}

/// Diagnostics of one outer iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub hausdorff_step: f64,
    pub condition_residual: f64,
    pub pde_residual: f64,
    pub annulus_nodes: usize,
}

/// Per-iteration diagnostics of a shape iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
}

/// Result of the exterior or interior iteration.
#[derive(Clone, Debug)]
pub struct FreeBoundarySolution {
    /// Potential solved on the returned ring.
    pub field: ScalarField,
    pub mask: RegionMask,
    /// The free boundary (convex when convexification is on).
    pub boundary: Polygon,
    /// The `l`-level set of `field`.
    pub level: Polyline,
    pub trace: IterationTrace,
}

/// Outer stopping rule. A step below `tol / 10` always stops; a step below `tol` stops once the
/// remaining distance to the fixed point, extrapolated from the observed contraction, is also
/// below `tol`.
pub(crate) fn outer_converged(steps: &[f64], tol: f64) -> bool {
    let Some(&s) = steps.last() else { return false };
    if s < 0.1 * tol {
        return true;
    }
    if s >= tol || steps.len() < 2 {
        return false;
    }
    let prev = steps[steps.len() - 2];
    let c = s / prev;
    c < 1.0 && s * c / (1.0 - c) < tol
}
