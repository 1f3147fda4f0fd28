use super::cg::pcg;
use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::{Label, RegionMask};

/// Settings for the regularized p-Laplacian solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PLaplaceConfig {
    pub p: f64,
    /// Gradient regularization: coefficients use `(|∇u|² + eps_reg²)^((p-2)/2)`.
    pub eps_reg: f64,
    /// Stop when the max-norm of the discrete divergence falls below this.
    pub picard_tol: f64,
    pub picard_max: usize,
    /// Relative reduction of the 2-norm residual at which an inner linear solve may stop early.
    pub linear_tol: f64,
    pub linear_max: usize,
    /// Initial Picard relaxation factor.
    pub damping: f64,
}

impl Default for PLaplaceConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            eps_reg: 1e-6,
            picard_tol: 1e-6,
            picard_max: 500,
            linear_tol: 1e-10,
            linear_max: 50_000,
            damping: 1.0,
        }
    }
}

impl PLaplaceConfig {
    pub fn with_p(p: f64) -> Self {
        Self { p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::InvalidParameter("picard_tol must be positive".into()));
        }
        if !(self.eps_reg >= 0.0) {
            return Err(Error::InvalidParameter("eps_reg must be non-negative".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::OutOfRange { value: self.damping, lo: 0.0, hi: 1.0 });
        }
        if self.picard_max == 0 || self.linear_max == 0 {
            return Err(Error::InvalidParameter("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Diagnostics of a completed solve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub picard_iterations: usize,
    pub linear_iterations: usize,
    pub residual: f64,
}

const DIRICHLET: u32 = u32::MAX;

/// Each inner solve reduces the max-norm residual of its own system by this factor
/// (or reaches the Picard tolerance); tighter solves buy nothing while coefficients lag.
const INNER_FORCING: f64 = 1e-2;

/// The first solve fixes the overall shape of the iterate, so it is done accurately; so is
/// every solve when p = 2, where the coefficients never change.
const FIRST_FORCING: f64 = 1e-8;

/// Annulus stencil: per unknown, the four neighbours (unknown index or Dirichlet value)
/// and the arm fractions.
struct Stencil {
    h: f64,
    nodes: Vec<usize>,
    nbr: Vec<[u32; 4]>,
    dval: Vec<[f64; 4]>,
    theta: Vec<[f64; 4]>,
}

impl Stencil {
    fn new(mask: &RegionMask) -> Self {
        let g = &mask.grid;
        let nodes: Vec<usize> = mask.annulus_nodes().collect();
        let mut unknown = vec![DIRICHLET; g.len()];
        for (k, &idx) in nodes.iter().enumerate() {
            unknown[idx] = k as u32;
        }
        let mut nbr = Vec::with_capacity(nodes.len());
        let mut dval = Vec::with_capacity(nodes.len());
        let mut theta = Vec::with_capacity(nodes.len());
        for &idx in &nodes {
            let arms = mask.arms(idx);
            let mut nb = [DIRICHLET; 4];
            let mut dv = [0.0; 4];
            let mut th = [1.0; 4];
            for d in 0..4 {
                let n = g.neighbor(idx, d).expect("annulus nodes are off the grid border");
                match mask.label(n) {
                    Label::Annulus => nb[d] = unknown[n],
                    l => {
                        dv[d] = mask.dirichlet(l).unwrap();
                        th[d] = arms[d];
                    }
                }
            }
            nbr.push(nb);
            dval.push(dv);
            theta.push(th);
        }
        Self { h: g.h, nodes, nbr, dval, theta }
    }

    #[inline]
    fn neighbor_value(&self, x: &[f64], k: usize, d: usize) -> f64 {
        let n = self.nbr[k][d];
        if n == DIRICHLET {
            self.dval[k][d]
        } else {
            x[n as usize]
        }
    }

    /// Node gradients from non-uniform central differences.
    fn node_gradients(&self, x: &[f64]) -> Vec<[f64; 2]> {
        (0..self.nodes.len())
            .map(|k| {
                let th = self.theta[k];
                let f0 = x[k];
                let diff = |plus: usize, minus: usize| {
                    let (a, b) = (th[minus], th[plus]);
                    let fp = self.neighbor_value(x, k, plus);
                    let fm = self.neighbor_value(x, k, minus);
                    (a * a * fp - b * b * fm + (b * b - a * a) * f0) / (a * b * (a + b) * self.h)
                };
                [diff(0, 1), diff(2, 3)]
            })
            .collect()
    }

    /// Edge weights `k_d / theta_d` for the current iterate.
    fn weights(&self, x: &[f64], p: f64, eps: f64) -> Vec<[f64; 4]> {
        let grads = self.node_gradients(x);
        let expo = 0.5 * (p - 2.0);
        let eps2 = eps * eps;
        (0..self.nodes.len())
            .map(|k| {
                let mut w = [0.0; 4];
                for d in 0..4 {
                    let th = self.theta[k][d];
                    let normal = (self.neighbor_value(x, k, d) - x[k]) / (th * self.h);
                    let axis_t = if d < 2 { 1 } else { 0 };
                    let n = self.nbr[k][d];
                    let tang = if n == DIRICHLET {
                        grads[k][axis_t]
                    } else {
                        0.5 * (grads[k][axis_t] + grads[n as usize][axis_t])
                    };
                    let coef = if expo == 0.0 {
                        1.0
                    } else {
                        (normal * normal + tang * tang + eps2).powf(expo)
                    };
                    w[d] = coef / th;
                }
                w
            })
            .collect()
    }

    fn unit_weights(&self) -> Vec<[f64; 4]> {
        self.theta.iter().map(|th| th.map(|t| 1.0 / t)).collect()
    }

    fn apply(&self, w: &[[f64; 4]], x: &[f64], y: &mut [f64]) {
        for k in 0..self.nodes.len() {
            let mut s = 0.0;
            for d in 0..4 {
                let n = self.nbr[k][d];
                s += w[k][d] * x[k];
                if n != DIRICHLET {
                    s -= w[k][d] * x[n as usize];
                }
            }
            y[k] = s;
        }
    }

    fn rhs(&self, w: &[[f64; 4]]) -> Vec<f64> {
        (0..self.nodes.len())
            .map(|k| {
                (0..4)
                    .filter(|&d| self.nbr[k][d] == DIRICHLET)
                    .map(|d| w[k][d] * self.dval[k][d])
                    .sum()
            })
            .collect()
    }

    /// Max-norm of the flux divergence `(1/h²) Σ w_d (u_d - u)`.
    fn residual(&self, x: &[f64], p: f64, eps: f64) -> f64 {
        let w = self.weights(x, p, eps);
        let h2 = self.h * self.h;
        (0..self.nodes.len())
            .map(|k| {
                let s: f64 = (0..4).map(|d| w[k][d] * (self.neighbor_value(x, k, d) - x[k])).sum();
                (s / h2).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn assemble_field(mask: &RegionMask, st: &Stencil, x: &[f64]) -> ScalarField {
    let g = mask.grid;
    let mut values: Vec<f64> = mask.labels().iter().map(|&l| mask.dirichlet(l).unwrap_or(f64::NAN)).collect();
    for (k, &idx) in st.nodes.iter().enumerate() {
        values[idx] = x[k];
    }
    ScalarField::new(g, values)
}

/// Solves `div((|∇u|² + eps²)^((p-2)/2) ∇u) = 0` on the annulus of `mask` with its Dirichlet data.
///
/// Edge-flux finite volumes on the 4-neighbour stencil with cut-cell arms at the boundary;
/// coefficients are lagged (Picard) and each linear system is solved by preconditioned CG.
/// `warm_start` supplies the initial iterate on annulus nodes (clamped into the Dirichlet range).
pub fn solve_p_capacitary(
    mask: &RegionMask,
    cfg: &PLaplaceConfig,
    warm_start: Option<&ScalarField>,
) -> Result<(ScalarField, SolveStats)> {
    cfg.validate()?;
    let st = Stencil::new(mask);
    let n = st.nodes.len();
    let (lo, hi) = {
        let (a, b) = (mask.dirichlet_inner, mask.dirichlet_outer);
        (a.min(b), a.max(b))
    };
    let mut x: Vec<f64> = match warm_start {
        Some(ws) => {
            if ws.grid != mask.grid {
                return Err(Error::InvalidParameter("warm start lives on a different grid".into()));
            }
            st.nodes
                .iter()
                .map(|&idx| {
                    let v = ws.values[idx];
                    if v.is_nan() {
                        0.5 * (lo + hi)
                    } else {
                        v.clamp(lo, hi)
                    }
                })
                .collect()
        }
        None => vec![0.5 * (lo + hi); n],
    };
    let h2 = st.h * st.h;
    let mut stats = SolveStats::default();
    // the lagged-coefficient map overshoots by up to a factor p - 1 when p > 2; relaxing by
    // 2/p balances the extreme error modes
    let mut damping = if cfg.p > 2.0 { cfg.damping.min(2.0 / cfg.p) } else { cfg.damping };
    let mut increases = 0;
    let mut res = st.residual(&x, cfg.p, cfg.eps_reg);
    let mut y = vec![0.0; n];
    for it in 1..=cfg.picard_max {
        let w = if it == 1 && warm_start.is_none() {
            st.unit_weights()
        } else {
            st.weights(&x, cfg.p, cfg.eps_reg)
        };
        let diag: Vec<f64> = w.iter().map(|wk| wk.iter().sum()).collect();
        let b = st.rhs(&w);
        y.copy_from_slice(&x);
        let out = pcg(
            |v, o| st.apply(&w, v, o),
            &diag,
            &b,
            &mut y,
            0.1 * cfg.picard_tol * h2,
            if it == 1 || cfg.p == 2.0 { FIRST_FORCING } else { INNER_FORCING },
            cfg.linear_tol,
            cfg.linear_max,
        );
        stats.linear_iterations += out.iterations;
        if !out.residual_inf.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual: out.residual_inf });
        }
        for k in 0..n {
            x[k] += damping * (y[k] - x[k]);
        }
        let new_res = st.residual(&x, cfg.p, cfg.eps_reg);
        stats.picard_iterations = it;
        stats.residual = new_res;
        if new_res < cfg.picard_tol {
            return Ok((assemble_field(mask, &st, &x), stats));
        }
        if new_res > res {
            increases += 1;
            if increases >= 2 {
                damping *= 0.5;
                increases = 0;
            }
        } else {
            increases = 0;
        }
        res = new_res;
    }
    Err(Error::NonConvergence { iterations: cfg.picard_max, residual: res })
}

/// Max-norm over annulus nodes of the discrete p-Laplacian divergence of `field`.
pub fn nonlinear_residual(field: &ScalarField, mask: &RegionMask, p: f64, eps_reg: f64) -> f64 {
    let st = Stencil::new(mask);
    let x: Vec<f64> = st.nodes.iter().map(|&idx| field.values[idx]).collect();
    st.residual(&x, p, eps_reg)
}

/// `|∇u|` by central differences where both neighbours are defined, one-sided where only
/// one is; `NaN` at undefined nodes or nodes with no defined neighbour along an axis.
pub fn gradient_magnitude(field: &ScalarField) -> ScalarField {
    let g = field.grid;
    let h = g.h;
    let v = &field.values;
    let values = (0..g.len())
        .map(|idx| {
            let f0 = v[idx];
            if f0.is_nan() {
                return f64::NAN;
            }
            let axis = |plus: usize, minus: usize| {
                let fp = g.neighbor(idx, plus).map(|n| v[n]).filter(|x| !x.is_nan());
                let fm = g.neighbor(idx, minus).map(|n| v[n]).filter(|x| !x.is_nan());
                match (fp, fm) {
                    (Some(a), Some(b)) => (a - b) / (2.0 * h),
                    (Some(a), None) => (a - f0) / h,
                    (None, Some(b)) => (f0 - b) / h,
                    (None, None) => f64::NAN,
                }
            };
            axis(0, 1).hypot(axis(2, 3))
        })
        .collect();
    ScalarField::new(g, values)
}

/// `|∇u|` on annulus nodes using the mask's arm fractions and Dirichlet data; `NaN` elsewhere.
pub fn gradient_magnitude_with_mask(field: &ScalarField, mask: &RegionMask) -> ScalarField {
    let st = Stencil::new(mask);
    let x: Vec<f64> = st.nodes.iter().map(|&idx| field.values[idx]).collect();
    let grads = st.node_gradients(&x);
    let mut values = vec![f64::NAN; mask.grid.len()];
    for (k, &idx) in st.nodes.iter().enumerate() {
        values[idx] = grads[k][0].hypot(grads[k][1]);
    }
    ScalarField::new(mask.grid, values)
}
