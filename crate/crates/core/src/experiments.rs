//! Experiment drivers: the small-λ limit of the exterior problem and the Brunn–Minkowski
//! inequality for the interior Bernoulli constant.

use crate::error::{Error, Result};
use crate::freeboundary::{
    estimate_lambda_max, iterate_exterior, iterate_interior, DistanceSpec, FreeBoundaryConfig, FreeBoundarySolution,
};
use crate::geometry::{hausdorff, minkowski_combine, ConvexPolygon, Polygon};
use crate::pde::gradient_magnitude_with_mask;
use crate::radial::solve_exterior_radius;

/// One `λ_n` of [`run_converge_bernoulli`].
#[derive(Clone, Debug)]
pub struct BernoulliRow {
    pub n: usize,
    pub lambda: f64,
    pub level: f64,
    pub boundary: Polygon,
    /// Hausdorff distance to the previous boundary (`None` for the first row).
    pub hausdorff_prev: Option<f64>,
    /// How far the boundary leaves the previous one: `max dist` of its samples outside
    /// `Ω_{n-1}`, zero when nested.
    pub nesting_excess: Option<f64>,
    /// Median `|∇u|` sampled one grid step inside the boundary.
    pub g_hat: f64,
    pub outer_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct BernoulliReport {
    pub omega: f64,
    pub rows: Vec<BernoulliRow>,
    /// Requested `λ_n` dropped for being below `2h`.
    pub truncated: Vec<f64>,
}

impl BernoulliReport {
    /// Every boundary lies inside its predecessor dilated by `slack`.
    pub fn nested(&self, slack: f64) -> bool {
        self.rows.iter().filter_map(|r| r.nesting_excess).all(|e| e <= slack)
    }

    /// `|ĝ - ω|` at the smallest `λ`.
    pub fn final_gradient_error(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| (r.g_hat - self.omega).abs())
    }
}

/// Median of `|∇u|` at points one grid step inside `∂Ω` along the inward normal.
pub fn near_boundary_gradient(sol: &FreeBoundarySolution) -> f64 {
    let h = sol.mask.grid.h;
    let grad = gradient_magnitude_with_mask(&sol.field, &sol.mask);
    let pts = sol.boundary.resample_uniform(h);
    let n = pts.len();
    let mut vals: Vec<f64> = (0..n)
        .filter_map(|i| {
            let outward = (pts[(i + 1) % n] - pts[(i + n - 1) % n]).perp_cw().normalized();
            grad.interpolate_defined(pts[i] - outward * h)
        })
        .collect();
    median(&mut vals)
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Solves the exterior problem with `l_n = ω λ_n`, `λ_n = λ0 2^-n`, `n < n_steps`, each from
/// a radial supersolution around the circumscribed disk of `K`.
///
/// Values of `λ_n` below `2h` are dropped and listed in `truncated`; at least one must remain.
pub fn run_converge_bernoulli(
    k: &ConvexPolygon,
    omega: f64,
    lambda0: f64,
    n_steps: usize,
    cfg: &FreeBoundaryConfig,
) -> Result<BernoulliReport> {
    if n_steps < 3 {
        return Err(Error::InvalidParameter(format!("n_steps must be at least 3, got {n_steps}")));
    }
    if !(omega > 0.0 && lambda0 > 0.0) {
        return Err(Error::InvalidParameter("omega and lambda0 must be positive".into()));
    }
    let h = cfg.grid.h;
    let (lambdas, truncated): (Vec<f64>, Vec<f64>) =
        (0..n_steps).map(|n| lambda0 * 0.5f64.powi(n as i32)).partition(|&lam| lam >= 2.0 * h);
    if lambdas.is_empty() {
        return Err(Error::GridTooCoarse { lambda: lambda0, h });
    }
    let (center, rho) = k.circumradius();
    let mut rows: Vec<BernoulliRow> = Vec::with_capacity(lambdas.len());
    for (n, &lambda) in lambdas.iter().enumerate() {
        let spec = DistanceSpec::bernoulli(omega, lambda)?;
        let r0 = solve_exterior_radius(cfg.pde.p, 2, rho, spec.l, 1.5 * lambda)? + 2.0 * h;
        let omega0 = ConvexPolygon::regular(center, r0, 256)?;
        let run_cfg = cfg.regridded(&omega0.bbox(), 4)?;
        let sol = iterate_exterior(k, &spec, &run_cfg, &omega0)?;
        let (hausdorff_prev, nesting_excess) = match rows.last() {
            Some(prev) => {
                let excess = sol
                    .boundary
                    .sample_boundary(0.5 * h)
                    .into_iter()
                    .map(|x| prev.boundary.signed_distance(x))
                    .fold(0.0, f64::max);
                (Some(hausdorff(&sol.boundary, &prev.boundary, 0.25 * h)), Some(excess))
            }
            None => (None, None),
        };
        rows.push(BernoulliRow {
            n,
            lambda,
            level: spec.l,
            g_hat: near_boundary_gradient(&sol),
            outer_iterations: sol.trace.len(),
            boundary: sol.boundary,
            hausdorff_prev,
            nesting_excess,
        });
    }
    Ok(BernoulliReport { omega, rows, truncated })
}

/// One `t` of [`run_brunn_minkowski`].
#[derive(Clone, Debug)]
pub struct BrunnMinkowskiRow {
    pub t: f64,
    /// Estimated Bernoulli constant of `Ω_t`.
    pub lambda_max: f64,
    /// `Λ̂(Ω_t) - [(1-t) Λ̂(Ω_0) + t Λ̂(Ω_1)]`; the inequality predicts `>= 0`.
    pub deficit: f64,
    /// The `λ` the interior problem on `Ω_t` was solved with.
    pub lambda: f64,
    pub k: Polygon,
    /// `min` over the vertices of `(1-t) K_0 + t K_1` of their depth inside `K_t`
    /// (negative when the combination sticks out).
    pub inclusion_margin: f64,
}

#[derive(Clone, Debug)]
pub struct BrunnMinkowskiReport {
    pub lambda_max0: f64,
    pub lambda_max1: f64,
    /// `λ_0`, `λ_1` used for the end bodies.
    pub lambdas: (f64, f64),
    pub rows: Vec<BrunnMinkowskiRow>,
}

/// Fraction of the estimated Bernoulli constant at which the end bodies are solved.
pub const LAMBDA_FRACTION: f64 = 0.8;

/// Bernoulli constant and interior solution for one body, on its own grid.
fn interior_pair(
    omega: &ConvexPolygon,
    l: f64,
    lambda: Option<f64>,
    cfg: &FreeBoundaryConfig,
) -> Result<(f64, f64, FreeBoundarySolution)> {
    let run_cfg = cfg.regridded(&omega.bbox(), 4)?;
    let lmax = estimate_lambda_max(omega, l, cfg.pde.p, &run_cfg)?;
    let lambda = lambda.unwrap_or(LAMBDA_FRACTION * lmax);
    let sol = iterate_interior(omega, &DistanceSpec::constant(l, lambda)?, &run_cfg)?;
    Ok((lmax, lambda, sol))
}

fn as_convex(poly: &Polygon) -> Result<ConvexPolygon> {
    ConvexPolygon::new(poly.vertices().to_vec())
}

/// For each `t`, compares `Λ̂(Ω_t)` with the linear interpolation of the end values and checks
/// that `(1-t) K_0 + t K_1 ⊂ K_t`, where `K_t` solves the interior problem on `Ω_t` with
/// `λ_t = (1-t) λ_0 + t λ_1` and `λ_i` is a fixed fraction of `Λ̂(Ω_i)`.
pub fn run_brunn_minkowski(
    omega0: &ConvexPolygon,
    omega1: &ConvexPolygon,
    l: f64,
    p: f64,
    t_grid: &[f64],
    cfg: &FreeBoundaryConfig,
) -> Result<BrunnMinkowskiReport> {
    if let Some(&t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::OutOfRange { value: t, lo: 0.0, hi: 1.0 });
    }
    let cfg = FreeBoundaryConfig { pde: crate::pde::PLaplaceConfig { p, ..cfg.pde }, ..*cfg };
    let (lmax0, lam0, sol0) = interior_pair(omega0, l, None, &cfg)?;
    let (lmax1, lam1, sol1) = interior_pair(omega1, l, None, &cfg)?;
    let k0 = as_convex(&sol0.boundary)?;
    let k1 = as_convex(&sol1.boundary)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let omega_t = minkowski_combine(omega0, omega1, t)?;
        let lambda = (1.0 - t) * lam0 + t * lam1;
        let (lmax, _, sol) = interior_pair(&omega_t, l, Some(lambda), &cfg)?;
        let kt = as_convex(&sol.boundary)?;
        let combo = minkowski_combine(&k0, &k1, t)?;
        let inclusion_margin =
            combo.vertices().iter().map(|&v| -kt.signed_distance(v)).fold(f64::INFINITY, f64::min);
        rows.push(BrunnMinkowskiRow {
            t,
            lambda_max: lmax,
            deficit: lmax - ((1.0 - t) * lmax0 + t * lmax1),
            lambda,
            k: sol.boundary,
            inclusion_margin,
        });
    }
    Ok(BrunnMinkowskiReport { lambda_max0: lmax0, lambda_max1: lmax1, lambdas: (lam0, lam1), rows })
}
