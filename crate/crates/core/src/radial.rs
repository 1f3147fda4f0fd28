//! Closed forms for concentric balls: p-capacitary potentials, level radii, the interior gap
//! function and its extremum, the exterior gap equation and Bernoulli-constant limits.

use crate::error::{Error, Result};

/// `|p - N|` below which the logarithmic branch is used.
pub const LOG_BRANCH_TOL: f64 = 1e-9;

/// Concentric annulus `r < |x| < R` in dimension `n` with `u = v_in` on `|x| = r`,
/// `u = v_out` on `|x| = R`, and a level `l` strictly between the two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialProblem {
    pub p: f64,
    pub n: u32,
    pub r: f64,
    pub big_r: f64,
    pub l: f64,
    pub v_in: f64,
    pub v_out: f64,
}

/// Roots of `Λ(r) = λ`: the hyperbolic (small) root, absent when `λ < λ_min`, and the elliptic one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorRadii {
    pub r1: Option<f64>,
    pub r2: f64,
}

/// Location and value of the maximum of `Λ`, plus its limit at `r → 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorExtremum {
    pub r_max: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl RadialProblem {
    /// `u = 0` on the inner ball, `u = 1` on the outer sphere.
    pub fn interior(p: f64, n: u32, r: f64, big_r: f64, l: f64) -> Self {
        Self { p, n, r, big_r, l, v_in: 0.0, v_out: 1.0 }
    }

    /// `u = 1` on the inner ball, `u = 0` on the outer sphere.
    pub fn exterior(p: f64, n: u32, r: f64, big_r: f64, l: f64) -> Self {
        Self { p, n, r, big_r, l, v_in: 1.0, v_out: 0.0 }
    }

    pub fn with_radii(self, r: f64, big_r: f64) -> Self {
        Self { r, big_r, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got {}", self.p)));
        }
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {}", self.n)));
        }
        if !(self.r >= 0.0 && self.r < self.big_r && self.big_r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radii must satisfy 0 <= r < R, got r={} R={}",
                self.r, self.big_r
            )));
        }
        let (lo, hi) = (self.v_in.min(self.v_out), self.v_in.max(self.v_out));
        if !(self.l > lo && self.l < hi) {
            return Err(Error::OutOfRange { value: self.l, lo, hi });
        }
        Ok(())
    }

    /// Exponent `(p - N)/(p - 1)`, or `None` on the logarithmic branch.
    fn exponent(&self) -> Option<f64> {
        let nf = self.n as f64;
        if (self.p - nf).abs() < LOG_BRANCH_TOL {
            None
        } else {
            Some((self.p - nf) / (self.p - 1.0))
        }
    }

    /// Normalized level `(l - v_out)/(v_in - v_out)`.
    fn w_level(&self) -> f64 {
        (self.l - self.v_out) / (self.v_in - self.v_out)
    }

    /// Fraction `w(ρ) ∈ [0, 1]` of the way from the outer to the inner value.
    fn weight(&self, rho: f64) -> f64 {
        let lr = (self.r / self.big_r).ln();
        let lrho = (rho / self.big_r).ln();
        match self.exponent() {
            None => lrho / lr,
            Some(a) => (a * lrho).exp_m1() / (a * lr).exp_m1(),
        }
    }

    /// Radius where the normalized potential equals `w`.
    fn radius_of_weight(&self, w: f64) -> f64 {
        let lr = (self.r / self.big_r).ln();
        let lrho = match self.exponent() {
            None => w * lr,
            Some(a) => (w * (a * lr).exp_m1()).ln_1p() / a,
        };
        self.big_r * lrho.exp()
    }
}

/// Value of the radial p-capacitary potential at radius `rho`.
pub fn radial_potential(prob: &RadialProblem, rho: f64) -> Result<f64> {
    let slack = 1e-12 * prob.big_r;
    if !(rho >= prob.r - slack && rho <= prob.big_r + slack) {
        return Err(Error::OutOfRange { value: rho, lo: prob.r, hi: prob.big_r });
    }
    let rho = rho.clamp(prob.r, prob.big_r);
    Ok(prob.v_out + (prob.v_in - prob.v_out) * prob.weight(rho))
}

/// `|du/dρ|` of the radial potential at `rho`.
pub fn radial_gradient(prob: &RadialProblem, rho: f64) -> f64 {
    let lr = (prob.r / prob.big_r).ln();
    let dw = match prob.exponent() {
        None => 1.0 / (rho * lr),
        Some(a) => a * (rho / prob.big_r).powf(a) / (rho * (a * lr).exp_m1()),
    };
    ((prob.v_in - prob.v_out) * dw).abs()
}

/// Radius of the level set `{u = l}`.
pub fn level_radius(prob: &RadialProblem) -> f64 {
    prob.radius_of_weight(prob.w_level())
}

/// Distance from the inner sphere `|x| = r` to the level set, with the outer radius of `prob`
/// fixed. At `r = 0` the limit is returned: zero unless `p > N`.
pub fn interior_gap(prob: &RadialProblem, r: f64) -> f64 {
    if r <= 0.0 {
        return match prob.exponent() {
            Some(a) if a > 0.0 => (1.0 - prob.w_level()).powf(1.0 / a) * prob.big_r,
            _ => 0.0,
        };
    }
    if r >= prob.big_r {
        return 0.0;
    }
    level_radius(&prob.with_radii(r, prob.big_r)) - r
}

/// Closed-form maximiser and maximum of `Λ`, and `λ_min = Λ(0)`.
pub fn interior_extremum(prob: &RadialProblem) -> InteriorExtremum {
    // level measured from the inner value, so the interior orientation reads l directly
    let l = 1.0 - prob.w_level();
    let big_r = prob.big_r;
    let nf = prob.n as f64;
    let p = prob.p;
    match prob.exponent() {
        None => {
            let r_max = big_r * (1.0 - l).powf(1.0 / l);
            InteriorExtremum { r_max, lambda_max: r_max / (1.0 / l - 1.0), lambda_min: 0.0 }
        }
        Some(a) => {
            let e = 1.0 / a;
            let base_r = l / ((1.0 - l).powf((nf - p) / (nf - 1.0)) - (1.0 - l));
            let base_rho = l / (1.0 - (1.0 - l).powf((p - 1.0) / (nf - 1.0)));
            let r_max = big_r * base_r.powf(e);
            let lambda_max = big_r * (base_rho.powf(e) - base_r.powf(e));
            let lambda_min = if a > 0.0 { l.powf(e) * big_r } else { 0.0 };
            InteriorExtremum { r_max, lambda_max, lambda_min }
        }
    }
}

/// Bisection for a root of a monotone function on `[lo, hi]`, `rising` telling its direction.
/// Runs until the bracket no longer shrinks.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, rising: bool, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Both radii with `Λ(r) = λ`.
pub fn solve_interior_radii(prob: &RadialProblem, lambda: f64) -> Result<InteriorRadii> {
    prob.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let ext = interior_extremum(prob);
    let rel = (lambda - ext.lambda_max) / ext.lambda_max;
    if rel > 1e-14 {
        return Err(Error::LambdaTooLarge { lambda, lambda_max: Some(ext.lambda_max) });
    }
    if rel.abs() <= 1e-14 {
        return Ok(InteriorRadii { r1: Some(ext.r_max), r2: ext.r_max });
    }
    let gap = |r: f64| interior_gap(prob, r) - lambda;
    let r2 = bisect(ext.r_max, prob.big_r, false, gap);
    let r1 = (lambda > ext.lambda_min).then(|| bisect(0.0, ext.r_max, true, gap));
    Ok(InteriorRadii { r1, r2 })
}

/// Outer radius `R* > r` at which the level set of the exterior potential lies `lambda`
/// inside the outer sphere.
pub fn solve_exterior_radius(p: f64, n: u32, r: f64, l: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need lambda > 0 and r > 0, got lambda={lambda} r={r}"
        )));
    }
    let base = RadialProblem::exterior(p, n, r, 2.0 * r, l);
    base.validate()?;
    let gap = |big_r: f64| big_r - level_radius(&base.with_radii(r, big_r)) - lambda;
    let mut hi = 2.0 * r;
    while gap(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergence { iterations: 0, residual: lambda });
        }
    }
    Ok(bisect(r, hi, true, gap))
}

/// Limit of `l / λ_max(l)` as `l → 0` for the ball of radius `big_r`.
pub fn bernoulli_limit(p: f64, n: u32, big_r: f64) -> f64 {
    let nf = n as f64;
    if (p - nf).abs() < LOG_BRANCH_TOL {
        std::f64::consts::E / big_r
    } else {
        ((p - 1.0) / (nf - 1.0)).powf((nf - 1.0) / (p - nf)) / big_r
    }
}

/// Outer radius of the annulus around `B_r` on which the exterior capacitary potential has
/// boundary gradient `omega` (classical exterior Bernoulli problem for a ball).
pub fn exterior_bernoulli_radius(p: f64, n: u32, r: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && r > 0.0) {
        return Err(Error::InvalidParameter("need omega > 0 and r > 0".into()));
    }
    let base = RadialProblem::exterior(p, n, r, 2.0 * r, 0.5);
    base.validate()?;
    let excess = |big_r: f64| radial_gradient(&base.with_radii(r, big_r), big_r) - omega;
    let mut hi = 2.0 * r;
    while excess(hi) >= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergence { iterations: 0, residual: omega });
        }
    }
    Ok(bisect(r, hi, false, excess))
}

/// Interface radius `s` of the two-phase ball configuration: `u1` runs from 1 on `|x| = r1`
/// to 0 on `|x| = s`, `u2` from 0 on `|x| = s` to -1 on `|x| = r3`, and
/// `dist(x, {u1 = l}) = g(dist(x, {u2 = -l}))` on `|x| = s`.
/// Returns the first sign change of the joining defect scanning outward, refined by bisection.
pub fn two_phase_interface_radius(p: f64, n: u32, r1: f64, r3: f64, l: f64, g: impl Fn(f64) -> f64) -> Option<f64> {
    let defect = |s: f64| {
        let inner = RadialProblem { p, n, r: r1, big_r: s, l, v_in: 1.0, v_out: 0.0 };
        let outer = RadialProblem { p, n, r: s, big_r: r3, l: -l, v_in: 0.0, v_out: -1.0 };
        let d1 = s - level_radius(&inner);
        let d2 = level_radius(&outer) - s;
        d1 - g(d2)
    };
    let m = 4000;
    let at = |k: usize| r1 + (r3 - r1) * k as f64 / m as f64;
    let mut prev = defect(at(1));
    for k in 2..m {
        let cur = defect(at(k));
        if prev.signum() != cur.signum() {
            let rising = cur > prev;
            return Some(bisect(at(k - 1), at(k), rising, defect));
        }
        prev = cur;
    }
    None
}
