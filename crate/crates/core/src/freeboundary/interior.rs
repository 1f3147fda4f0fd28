use super::condition::{boundary_of_superlevel, capped_level_distance, distance_residuals};
use super::{outer_converged, DistanceSpec, FreeBoundaryConfig, FreeBoundarySolution, IterationTrace, TraceRow};
use crate::error::{Error, Result};
use crate::geometry::{extract_level_curve, hausdorff, rasterize, ConvexPolygon, Polygon};
use crate::pde::{solve_p_capacitary, ScalarField};

/// Fewest grid nodes a shrinking inner set may keep before it counts as collapsed.
const MIN_INNER_NODES: usize = 9;

/// Interior problem: finds `K ⊂ Ω` such that `∂K` lies at distance `λ` from the `l`-level set of
/// the potential with `u = 0` on `K` and `u = 1` on `∂Ω`, targeting the largest such `K`.
///
/// Starts from `{x : dist(x, ∂Ω) >= λ}` and repeatedly replaces `K` by the convex hull of
/// `{u <= l} ∖ {x : dist(x, Γ_l) < λ}`. Collapse of `K` is reported as `LambdaTooLarge`.
pub fn iterate_interior(
    omega: &ConvexPolygon,
    spec: &DistanceSpec,
    cfg: &FreeBoundaryConfig,
) -> Result<FreeBoundarySolution> {
    spec.validate()?;
    cfg.validate()?;
    let lambda = spec
        .constant_lambda()
        .ok_or_else(|| Error::InvalidParameter("the interior iteration needs a constant lambda".into()))?;
    cfg.check_lambda(lambda)?;
    let grid = cfg.grid;
    let h = grid.h;
    let too_large = || Error::LambdaTooLarge { lambda, lambda_max: None };
    let mut k: Polygon = omega.eroded(lambda).ok_or_else(too_large)?.into();
    let mut warm: Option<ScalarField> = None;
    let mut trace = IterationTrace::default();
    let mut steps = Vec::new();
    for iter in 1..=cfg.outer_max {
        let inside = (0..grid.len()).filter(|&i| k.contains_point(grid.node_point(i))).count();
        if inside < MIN_INNER_NODES {
            return Err(too_large());
        }
        let mask = rasterize(&k, omega, &grid, 0.0, 1.0)?;
        let (u, stats) = solve_p_capacitary(&mask, &cfg.pde, warm.as_ref())?;
        let level = extract_level_curve(&u, spec.l)?;
        let (cond, _) = distance_residuals(&level, &k, spec, h);

        // phi > 0 on {u <= l} farther than λ from the level set
        let mut phi = capped_level_distance(&u, &level, spec.l, false, |_| lambda + 3.0 * h);
        for v in phi.values.iter_mut() {
            *v = -*v - lambda;
        }
        let kept = phi.values.iter().filter(|&&v| v >= 0.0).count();
        if kept < MIN_INNER_NODES {
            return Err(too_large());
        }
        let next = boundary_of_superlevel(&phi, cfg.convexify)?.ok_or_else(too_large)?;
        let step = hausdorff(&next, &k, 0.25 * h);
        steps.push(step);
        trace.rows.push(TraceRow {
            iter,
            hausdorff_step: step,
            condition_residual: cond,
            pde_residual: stats.residual,
            annulus_nodes: mask.annulus_count(),
        });
        if outer_converged(&steps, cfg.outer_tol) {
            return Ok(FreeBoundarySolution { field: u, mask, boundary: k, level, trace });
        }
        k = next;
        warm = Some(u);
    }
    Err(Error::NonConvergence {
        iterations: cfg.outer_max,
        residual: steps.last().copied().unwrap_or(f64::NAN),
    })
}
