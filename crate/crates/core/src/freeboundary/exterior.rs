use super::condition::{boundary_of_superlevel, capped_level_distance, distance_residuals};
use super::{outer_converged, DistanceSpec, FreeBoundaryConfig, FreeBoundarySolution, IterationTrace, TraceRow};
use crate::error::{Error, Result};
use crate::geometry::{extract_level_curve, hausdorff, rasterize, ConvexPolygon, Polygon, Polyline};
use crate::pde::{solve_p_capacitary, ScalarField};

/// `{u >= l} ∪ {x : dist(x, Γ_l) <= λ(x)}`, as the superlevel set of
/// `phi = λ(x) - signed distance` (negative on `{u >= l}`).
fn update(u: &ScalarField, level: &Polyline, spec: &DistanceSpec, convexify: bool) -> Result<Polygon> {
    let grid = u.grid;
    let mut phi = capped_level_distance(u, level, spec.l, true, |x| spec.lambda_at(x) + 3.0 * grid.h);
    for (idx, v) in phi.values.iter_mut().enumerate() {
        *v = spec.lambda_at(grid.node_point(idx)) - *v;
    }
    boundary_of_superlevel(&phi, convexify)?
        .ok_or_else(|| Error::DegenerateGeometry("updated domain has no closed boundary".into()))
}

/// One exterior update from `omega` (cold start): solve, extract `Γ_l`, rebuild the domain.
pub fn exterior_update(
    k: &ConvexPolygon,
    spec: &DistanceSpec,
    cfg: &FreeBoundaryConfig,
    omega: &Polygon,
) -> Result<Polygon> {
    spec.validate()?;
    cfg.validate()?;
    let mask = rasterize(k, omega, &cfg.grid, 1.0, 0.0)?;
    let (u, _) = solve_p_capacitary(&mask, &cfg.pde, None)?;
    let level = extract_level_curve(&u, spec.l)?;
    update(&u, &level, spec, cfg.convexify)
}

/// Exterior problem: finds `Ω ⊃ K` whose boundary lies at distance `λ(x)` from the `l`-level set
/// of the capacitary potential (`u = 1` on `K`, `u = 0` on `∂Ω`).
///
/// Each step solves on the current ring, extracts `Γ_l`, and replaces `Ω` by
/// `{u >= l} ∪ {x : dist(x, Γ_l) <= λ(x)}` (convexified if configured). Starting from a
/// supersolution the sets decrease. Returns the last solved pair `(u, Ω)`.
pub fn iterate_exterior(
    k: &ConvexPolygon,
    spec: &DistanceSpec,
    cfg: &FreeBoundaryConfig,
    omega0: &Polygon,
) -> Result<FreeBoundarySolution> {
    spec.validate()?;
    cfg.validate()?;
    cfg.check_lambda(spec.lambda_min())?;
    let grid = cfg.grid;
    let h = grid.h;
    let mut omega = omega0.clone();
    let mut warm: Option<ScalarField> = None;
    let mut trace = IterationTrace::default();
    let mut steps = Vec::new();
    for iter in 1..=cfg.outer_max {
        let mask = rasterize(k, &omega, &grid, 1.0, 0.0)?;
        let (u, stats) = solve_p_capacitary(&mask, &cfg.pde, warm.as_ref())?;
        let level = extract_level_curve(&u, spec.l)?;
        let (cond, _) = distance_residuals(&level, &omega, spec, h);
        let next = update(&u, &level, spec, cfg.convexify)?;
        let step = hausdorff(&next, &omega, 0.25 * h);
        steps.push(step);
        trace.rows.push(TraceRow {
            iter,
            hausdorff_step: step,
            condition_residual: cond,
            pde_residual: stats.residual,
            annulus_nodes: mask.annulus_count(),
        });
        if outer_converged(&steps, cfg.outer_tol) {
            return Ok(FreeBoundarySolution { field: u, mask, boundary: omega, level, trace });
        }
        omega = next;
        warm = Some(u);
    }
    Err(Error::NonConvergence {
        iterations: cfg.outer_max,
        residual: steps.last().copied().unwrap_or(f64::NAN),
    })
}
