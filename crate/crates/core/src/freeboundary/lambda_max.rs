use super::{iterate_interior, DistanceSpec, FreeBoundaryConfig};
use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::radial::{interior_extremum, RadialProblem};

/// Bisection estimate of the largest `λ` for which the interior problem on `Ω` is solvable.
///
/// The bracket starts at the ball values for the inradius and circumradius of `Ω`; each probe
/// runs [`iterate_interior`] and counts `LambdaTooLarge` as infeasible. Returns the bracket
/// midpoint once its width is at most `2h`.
pub fn estimate_lambda_max(omega: &ConvexPolygon, l: f64, p: f64, cfg: &FreeBoundaryConfig) -> Result<f64> {
    let ball = |radius: f64| interior_extremum(&RadialProblem::interior(p, 2, 0.5 * radius, radius, l)).lambda_max;
    let (_, r_in) = omega.inradius();
    let (_, r_out) = omega.circumradius();
    let (mut lo, mut hi) = (ball(r_in), ball(r_out));
    let cfg = FreeBoundaryConfig { pde: crate::pde::PLaplaceConfig { p, ..cfg.pde }, ..*cfg };
    while hi - lo > 2.0 * cfg.grid.h {
        let mid = 0.5 * (lo + hi);
        let spec = DistanceSpec::constant(l, mid)?;
        match iterate_interior(omega, &spec, &cfg) {
            Ok(_) => lo = mid,
            Err(Error::LambdaTooLarge { .. }) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(0.5 * (lo + hi))
}
