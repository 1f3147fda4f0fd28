//! Discrete Bernoulli free boundary problems for the p-Laplacian.
//!
//! Given a convex body `K` and constants `(l, λ)`, the solvers look for a boundary on which
//! every point lies at distance `λ` from the `l`-level set of the p-capacitary potential of
//! the ring between `K` and that boundary.
//!
//! * [`geometry`]: convex polygons, grids, rasterization, marching squares, Hausdorff distance.
//! * [`pde`]: the regularized p-Laplace Dirichlet solver (Picard outer loop, CG inner solves).
//! * [`radial`]: closed forms for balls, used as oracles and for initial guesses.
//! * [`freeboundary`]: the exterior, interior and two-phase shape iterations.
//! * [`experiments`]: the Bernoulli-limit and Brunn–Minkowski drivers.
//! * [`io`]: polygon files and CSV/SVG exports.

pub mod error;
pub mod geometry;
pub mod pde;
pub mod freeboundary;
pub mod radial;
pub mod experiments;
pub mod io;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Grid2D, Point, Polygon, Polyline, RegionMask};
pub use pde::{PLaplaceConfig, ScalarField};
pub use radial::RadialProblem;
