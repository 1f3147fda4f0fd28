use std::fmt;
use std::sync::Arc;

use super::{FreeBoundaryConfig, IterationTrace, TraceRow};
use crate::error::{Error, Result};
use crate::geometry::{
    boundary_gap, convex_hull, extract_level_curve, hausdorff, rasterize, ConvexPolygon, Grid2D, Point, Polygon,
    RegionMask, SegmentIndex,
};
use crate::pde::{solve_p_capacitary, ScalarField};

/// Joining function `g(x, q)` coupling the distances to the two level sets, with declared
/// growth bounds `c1 <= g(x, q)/q <= c2` for `q >= q0`.
#[derive(Clone)]
pub struct JoiningFunction {
    eval: Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>,
    pub c1: f64,
    pub c2: f64,
    pub q0: f64,
}

impl fmt::Debug for JoiningFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JoiningFunction {{ c1: {}, c2: {}, q0: {} }}", self.c1, self.c2, self.q0)
    }
}

/// Outcome of [`JoiningFunction::check_hypotheses`] on a set of probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub positive: bool,
    pub nondecreasing: bool,
    pub growth_bounds: bool,
}

impl JoiningFunction {
    pub fn new(g: impl Fn(Point, f64) -> f64 + Send + Sync + 'static, c1: f64, c2: f64, q0: f64) -> Self {
        Self { eval: Arc::new(g), c1, c2, q0 }
    }

    /// `g(x, q) = q`.
    pub fn symmetric() -> Self {
        Self::new(|_, q| q, 1.0, 1.0, 0.0)
    }

    /// `g(x, q) = (a^α + q^α)^(-1/α)` with constant `a`.
    pub fn classical(a: f64, alpha: f64) -> Self {
        Self::new(move |_, q| (a.powf(alpha) + q.powf(alpha)).powf(-1.0 / alpha), 0.0, f64::INFINITY, 0.0)
    }

    #[inline]
    pub fn eval(&self, x: Point, q: f64) -> f64 {
        (self.eval)(x, q)
    }

    /// Checks positivity, monotonicity in `q` and the declared growth bounds on a sample of
    /// points and a geometric ladder of `q` values. Diagnostic only.
    pub fn check_hypotheses(&self, points: &[Point]) -> HypothesisReport {
        let qs: Vec<f64> = (0..40).map(|k| 1e-3 * 1.3f64.powi(k)).collect();
        let mut rep = HypothesisReport { positive: true, nondecreasing: true, growth_bounds: true };
        for &x in points {
            let mut prev = f64::NEG_INFINITY;
            for &q in &qs {
                let v = self.eval(x, q);
                rep.positive &= v > 0.0 && v.is_finite();
                rep.nondecreasing &= v >= prev;
                prev = v;
                if q >= self.q0 {
                    let ratio = v / q;
                    rep.growth_bounds &= ratio >= self.c1 * (1.0 - 1e-12) && ratio <= self.c2 * (1.0 + 1e-12);
                }
            }
        }
        rep
    }
}

/// Tuning of the interface relaxation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPhaseOptions {
    /// Initial vertex step gain.
    pub eta: f64,
    /// Stop once `max |G|` falls below this (length).
    pub joining_tol: f64,
    /// Pitch at which the interface is resampled each step.
    pub pitch: f64,
}

impl TwoPhaseOptions {
    /// `eta = 0.5`, `joining_tol = h/4`, `pitch = h`.
    pub fn for_grid(grid: &Grid2D) -> Self {
        Self { eta: 0.5, joining_tol: 0.25 * grid.h, pitch: grid.h }
    }
}

/// Result of [`two_phase_iterate`].
#[derive(Clone, Debug)]
pub struct TwoPhaseSolution {
    pub k2: ConvexPolygon,
    /// `u1` on `K2 ∖ K1` (1 on `K1`, 0 on `∂K2`) and `u2` on `K3 ∖ K2` (0 on `∂K2`, -1 on `∂K3`).
    pub fields: (ScalarField, ScalarField),
    pub trace: IterationTrace,
    pub max_joining_residual: f64,
    /// `dist(∂K1, ∂K2) / dist(∂K1, ∂K3)`.
    pub separation_ratio: f64,
}

struct PhaseFields {
    u1: ScalarField,
    u2: ScalarField,
    samples: Vec<Point>,
    g: Vec<f64>,
    pde_residual: f64,
    annulus_nodes: usize,
}

fn as_degenerate(e: Error) -> Error {
    match e {
        Error::EmptyAnnulus { gap, required } => Error::DegenerateGeometry(format!(
            "interface collapsed onto a fixed body (gap {gap:.4} < {required:.4})"
        )),
        e => e,
    }
}

/// Solves both phases for the interface `k2` and evaluates the joining defect
/// `G(x) = dist(x, {u1 = l}) - g(x, dist(x, {u2 = -l}))` on a resampling of `∂K2`.
#[allow(clippy::too_many_arguments)]
fn evaluate(
    k1: &ConvexPolygon,
    k2: &Polygon,
    k3: &ConvexPolygon,
    g: &JoiningFunction,
    l: f64,
    cfg: &FreeBoundaryConfig,
    pitch: f64,
    warm: Option<(&ScalarField, &ScalarField)>,
) -> Result<PhaseFields> {
    let grid = cfg.grid;
    let m1: RegionMask = rasterize(k1, k2, &grid, 1.0, 0.0).map_err(as_degenerate)?;
    let m2: RegionMask = rasterize(k2, k3, &grid, 0.0, -1.0).map_err(as_degenerate)?;
    let (u1, s1) = solve_p_capacitary(&m1, &cfg.pde, warm.map(|w| w.0))?;
    let (u2, s2) = solve_p_capacitary(&m2, &cfg.pde, warm.map(|w| w.1))?;
    let i1 = SegmentIndex::new(extract_level_curve(&u1, l)?.segments());
    let i2 = SegmentIndex::new(extract_level_curve(&u2, -l)?.segments());
    let samples = k2.resample_uniform(pitch);
    let gvals = samples.iter().map(|&x| i1.distance(x) - g.eval(x, i2.distance(x))).collect();
    Ok(PhaseFields {
        u1,
        u2,
        samples,
        g: gvals,
        pde_residual: s1.residual.max(s2.residual),
        annulus_nodes: m1.annulus_count() + m2.annulus_count(),
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

/// Two-phase problem: finds a convex interface `K2` between `K1 ⊂ K3` satisfying the joining
/// condition `dist(x, {u1 = l}) = g(x, dist(x, {u2 = -l}))` on `∂K2`.
///
/// `K2` starts as a superlevel set `{U >= ε}` of the three-body potential (`U = 1` on `K1`,
/// `-1` on `∂K3`) with `ε` near -1, chosen so the joining defect `G` is non-negative. Each step
/// moves every interface sample inward by `clamp(η G, -h, h)` and takes the convex hull; `η` is
/// halved when the sign of the extreme defect flips twice in a row.
pub fn two_phase_iterate(
    k1: &ConvexPolygon,
    k3: &ConvexPolygon,
    g: &JoiningFunction,
    l: f64,
    p: f64,
    cfg: &FreeBoundaryConfig,
    opts: &TwoPhaseOptions,
) -> Result<TwoPhaseSolution> {
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::OutOfRange { value: l, lo: 0.0, hi: 1.0 });
    }
    let cfg = FreeBoundaryConfig { pde: crate::pde::PLaplaceConfig { p, ..cfg.pde }, ..*cfg };
    cfg.validate()?;
    let grid = cfg.grid;
    let h = grid.h;
    let gap13 = boundary_gap(k1, k3);
    if gap13 < 6.0 * h {
        return Err(Error::EmptyAnnulus { gap: gap13, required: 6.0 * h });
    }

    // deep superlevel set of the three-body potential
    let full = rasterize(k1, k3, &grid, 1.0, -1.0)?;
    let (big_u, _) = solve_p_capacitary(&full, &cfg.pde, None)?;
    let candidate = |eps: f64| -> Result<Option<Polygon>> {
        let cand = extract_level_curve(&big_u, eps)?
            .largest_ring()
            .and_then(|r| convex_hull(&r.points).ok())
            .map(Polygon::from);
        Ok(cand.filter(|c| boundary_gap(c, k3) >= 3.0 * h && boundary_gap(k1, c) >= 3.0 * h))
    };
    // on coarse grids the level -0.9 may hug K3; back off toward 0 until it clears
    let mut eps = -0.9;
    let mut first = candidate(eps)?;
    while first.is_none() && eps < -0.15 {
        eps += 0.1;
        first = candidate(eps)?;
    }
    let mut k2: Option<Polygon> = None;
    let mut current = None;
    let mut next = first;
    for _ in 0..12 {
        let Some(cand) = next else { break };
        let ev = evaluate(k1, &cand, k3, g, l, &cfg, opts.pitch, None)?;
        let ok = ev.g.iter().all(|&v| v >= 0.0);
        k2 = Some(cand);
        current = Some(ev);
        if ok {
            break;
        }
        eps = -1.0 + 0.5 * (eps + 1.0);
        next = candidate(eps)?;
    }
    let (mut k2, mut cur) = match (k2, current) {
        (Some(k), Some(c)) => (k, c),
        _ => {
            return Err(Error::DegenerateGeometry(
                "no initial interface fits between the bodies at this resolution".into(),
            ))
        }
    };

    let mut eta = opts.eta;
    let mut trace = IterationTrace::default();
    let mut last_sign = 0.0;
    let mut flips = 0;
    for iter in 1..=cfg.outer_max {
        let gmax = max_abs(&cur.g);
        if gmax < opts.joining_tol {
            let k2c = ConvexPolygon::new(k2.vertices().to_vec())?;
            let separation_ratio = boundary_gap(k1, &k2c) / gap13;
            return Ok(TwoPhaseSolution {
                k2: k2c,
                fields: (cur.u1, cur.u2),
                trace,
                max_joining_residual: gmax,
                separation_ratio,
            });
        }
        let extreme = cur.g.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m });
        let sign = extreme.signum();
        if last_sign != 0.0 && sign != last_sign {
            flips += 1;
            if flips >= 2 {
                eta *= 0.5;
                flips = 0;
            }
        } else {
            flips = 0;
        }
        last_sign = sign;

        let n = cur.samples.len();
        let moved: Vec<Point> = (0..n)
            .map(|i| {
                let t = cur.samples[(i + 1) % n] - cur.samples[(i + n - 1) % n];
                let outward = t.perp_cw().normalized();
                let step = (eta * cur.g[i]).clamp(-h, h);
                cur.samples[i] - outward * step
            })
            .collect();
        let next: Polygon = convex_hull(&moved)?.into();
        let step = hausdorff(&next, &k2, 0.25 * h);
        let ev = evaluate(k1, &next, k3, g, l, &cfg, opts.pitch, Some((&cur.u1, &cur.u2)))?;
        trace.rows.push(TraceRow {
            iter,
            hausdorff_step: step,
            condition_residual: max_abs(&ev.g),
            pde_residual: ev.pde_residual,
            annulus_nodes: ev.annulus_nodes,
        });
        k2 = next;
        cur = ev;
    }
    Err(Error::NonConvergence { iterations: cfg.outer_max, residual: max_abs(&cur.g) })
}
