//! Subcommand drivers: read a [`RunConfig`], validate everything, run, write outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bernoulli_core::experiments::{run_brunn_minkowski, run_converge_bernoulli};
use bernoulli_core::freeboundary::{
    estimate_lambda_max, iterate_exterior, iterate_interior, two_phase_iterate, DistanceSpec, FreeBoundaryConfig,
    FreeBoundarySolution, JoiningFunction, TwoPhaseOptions,
};
use bernoulli_core::geometry::{BBox, ConvexPolygon, Grid2D, Polygon};
use bernoulli_core::io::{
    format_field_csv, format_polygon, format_polyline_csv, format_svg, format_table_csv, format_trace_csv, Layer,
    SvgItem,
};
use bernoulli_core::pde::PLaplaceConfig;
use bernoulli_core::radial::{interior_extremum, interior_gap, solve_exterior_radius, RadialProblem};

use crate::config::{ConfigError, RunConfig};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

/// Range of `p` accepted on the command line.
pub const P_RANGE: (f64, f64) = (1.2, 8.0);

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] bernoulli_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bernoulli_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::NonConvergence { .. } => EXIT_NONCONVERGENCE,
                E::LambdaTooLarge { .. } | E::EmptyAnnulus { .. } => EXIT_INFEASIBLE,
                E::InvalidParameter(_) | E::OutOfRange { .. } | E::GridTooCoarse { .. } | E::Parse { .. } => {
                    EXIT_CONFIG
                }
                _ => EXIT_OTHER,
            },
            CliError::Io { .. } => EXIT_OTHER,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Radial,
    SolveExterior,
    SolveInterior,
    LambdaMax,
    ConvergeBernoulli,
    TwoPhase,
    BrunnMinkowski,
}

/// Settings shared by every grid-based command.
struct Common {
    p: f64,
    h: f64,
    pad: usize,
    grid_bbox: Option<BBox>,
    fb: FreeBoundaryTuning,
    out: PathBuf,
}

struct FreeBoundaryTuning {
    outer_tol: Option<f64>,
    outer_max: usize,
    convexify: bool,
    picard_tol: f64,
    picard_max: usize,
    eps_reg: f64,
}

impl Common {
    fn read(cfg: &RunConfig) -> std::result::Result<Self, ConfigError> {
        let defaults = PLaplaceConfig::default();
        Ok(Self {
            p: cfg.f64_in("p", Some(2.0), P_RANGE.0, P_RANGE.1)?,
            h: cfg.f64_in("h", Some(1.0 / 64.0), 1e-4, 0.5)?,
            pad: cfg.usize_or("grid_pad", 4)?,
            grid_bbox: cfg.grid_bbox()?,
            fb: FreeBoundaryTuning {
                outer_tol: cfg.f64_opt("outer_tol")?,
                outer_max: cfg.usize_or("outer_max", 200)?,
                convexify: cfg.bool_or("convexify", true)?,
                picard_tol: cfg.f64_in("picard_tol", Some(defaults.picard_tol), 1e-14, 1.0)?,
                picard_max: cfg.usize_or("picard_max", defaults.picard_max)?,
                eps_reg: cfg.f64_in("eps_reg", Some(defaults.eps_reg), 0.0, 1.0)?,
            },
            out: cfg.path_or("out", "."),
        })
    }

    /// Grid covering `bbox` (or the configured box) and the solver settings on it.
    fn solver(&self, bbox: &BBox) -> Result<FreeBoundaryConfig> {
        let grid = match &self.grid_bbox {
            Some(b) => Grid2D::covering(b, self.h, 0)?,
            None => Grid2D::covering(bbox, self.h, self.pad)?,
        };
        let pde = PLaplaceConfig {
            p: self.p,
            eps_reg: self.fb.eps_reg,
            picard_tol: self.fb.picard_tol,
            picard_max: self.fb.picard_max,
            ..PLaplaceConfig::default()
        };
        let mut fb = FreeBoundaryConfig::new(grid, pde);
        if let Some(t) = self.fb.outer_tol {
            fb.outer_tol = t;
        }
        fb.outer_max = self.fb.outer_max;
        fb.convexify = self.fb.convexify;
        fb.validate()?;
        Ok(fb)
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        std::fs::create_dir_all(&self.out).map_err(|source| CliError::Io { path: self.out.clone(), source })?;
        let path = self.out.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })
    }
}

fn level(cfg: &RunConfig) -> std::result::Result<f64, ConfigError> {
    let l = cfg.f64_req("level")?;
    if !(l > 0.0 && l < 1.0) {
        return Err(ConfigError { line: None, key: Some("level".into()), message: format!("{l} is outside (0, 1)") });
    }
    Ok(l)
}

fn constant_lambda(cfg: &RunConfig, bbox: &BBox) -> Result<f64> {
    let e = cfg.lambda(bbox)?;
    if !e.is_constant() {
        return Err(ConfigError {
            line: None,
            key: Some("lambda".into()),
            message: "this command needs a constant lambda".into(),
        }
        .into());
    }
    Ok(e.a)
}

pub fn run(cmd: Command, cfg: &RunConfig, stdout: &mut String) -> Result<()> {
    match cmd {
        Command::Radial => radial(cfg, stdout),
        Command::SolveExterior => solve_exterior(cfg, stdout),
        Command::SolveInterior => solve_interior(cfg, stdout),
        Command::LambdaMax => lambda_max(cfg, stdout),
        Command::ConvergeBernoulli => converge_bernoulli(cfg, stdout),
        Command::TwoPhase => two_phase(cfg, stdout),
        Command::BrunnMinkowski => brunn_minkowski(cfg, stdout),
    }
}

fn radial(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let p = cfg.f64_in("p", Some(2.0), P_RANGE.0, P_RANGE.1)?;
    let big_r = cfg.f64_in("radius", Some(1.0), 1e-9, f64::MAX)?;
    let n = cfg.usize_or("dimension", 2)?;
    if !(2..=16).contains(&n) {
        return Err(ConfigError::new(format!("dimension must be in 2..=16, got {n}")).into());
    }
    let l = level(cfg)?;
    let samples = cfg.usize_or("samples", 64)?.max(1);
    let prob = RadialProblem::interior(p, n as u32, 0.5 * big_r, big_r, l);
    prob.validate()?;
    let ext = interior_extremum(&prob);
    let _ = writeln!(out, "# r_max,lambda_max,lambda_min");
    let _ = writeln!(out, "# {:.16e},{:.16e},{:.16e}", ext.r_max, ext.lambda_max, ext.lambda_min);
    let _ = writeln!(out, "r,lambda");
    for k in 1..=samples {
        let r = big_r * k as f64 / (samples + 1) as f64;
        let _ = writeln!(out, "{:.16e},{:.16e}", r, interior_gap(&prob, r));
    }
    Ok(())
}

fn solution_outputs(c: &Common, fixed: &Polygon, sol: &FreeBoundarySolution, bbox: &BBox) -> Result<()> {
    c.write("trace.csv", &format_trace_csv(&sol.trace))?;
    c.write("boundary.txt", &format_polygon(&sol.boundary))?;
    c.write("level.csv", &format_polyline_csv(&sol.level))?;
    c.write("field.csv", &format_field_csv(&sol.field, &sol.mask))?;
    let items = [
        SvgItem::polygon(Layer::Inner, fixed),
        SvgItem::polyline(Layer::Level, &sol.level),
        SvgItem::polygon(Layer::FreeBoundary, &sol.boundary),
    ];
    c.write("overlay.svg", &format_svg(&items, bbox))
}

fn summary(out: &mut String, sol: &FreeBoundarySolution) {
    if let Some(r) = sol.trace.rows.last() {
        let _ = writeln!(
            out,
            "converged after {} iterations: hausdorff_step={:.6e} condition_residual={:.6e} area={:.6e}",
            r.iter,
            r.hausdorff_step,
            r.condition_residual,
            sol.boundary.area()
        );
    }
}

fn solve_exterior(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let c = Common::read(cfg)?;
    let k = cfg.convex_shape("inner")?;
    let expr = crate::config::LambdaExpr::parse(cfg.require("lambda")?)
        .map_err(|m| ConfigError { line: None, key: Some("lambda".into()), message: m })?;
    let bernoulli = cfg.f64_opt("bernoulli_omega")?;

    // the grid must cover the initial domain, whose default size depends on λ over the grid
    let (initial, bbox) = match cfg.raw("initial") {
        Some(_) => {
            let o = cfg.shape("initial")?;
            let b = o.bbox();
            (o, b)
        }
        None => {
            let (center, rho) = k.circumradius();
            let mut bbox = k.bbox().expanded(c.h);
            let mut disk = None;
            for _ in 0..4 {
                let (lo, hi) = expr.bounds(&bbox);
                if !(lo > 0.0) {
                    break;
                }
                let l = match bernoulli {
                    Some(w) => w * expr.a,
                    None => level(cfg)?,
                };
                if !(l > 0.0 && l < 1.0) {
                    break;
                }
                let r0 = solve_exterior_radius(c.p, 2, rho, l, 1.5 * hi)? + 2.0 * c.h;
                let d = ConvexPolygon::regular(center, r0, 256)?;
                bbox = d.bbox();
                disk = Some(d);
            }
            match disk {
                Some(d) => (Polygon::from(d), bbox),
                None => (k.polygon().clone(), bbox),
            }
        }
    };
    let fb = c.solver(&bbox)?;
    let lam = cfg.lambda(&fb.grid.bbox())?;
    let spec = match bernoulli {
        Some(w) => {
            if !lam.is_constant() {
                return Err(ConfigError::new("bernoulli_omega needs a constant lambda").into());
            }
            DistanceSpec::bernoulli(w, lam.a)?
        }
        None if lam.is_constant() => DistanceSpec::constant(level(cfg)?, lam.a)?,
        None => {
            let (lo, hi) = lam.bounds(&fb.grid.bbox());
            DistanceSpec::variable(level(cfg)?, move |x| lam.eval(x), lo, hi)?
        }
    };
    if !k.polygon().vertices().iter().all(|&v| initial.contains_point(v)) {
        return Err(ConfigError { line: None, key: Some("initial".into()), message: "must contain the inner body".into() }
            .into());
    }
    fb.check_lambda(spec.lambda_min())?;
    let sol = iterate_exterior(&k, &spec, &fb, &initial)?;
    summary(out, &sol);
    solution_outputs(&c, k.polygon(), &sol, &fb.grid.bbox())
}

fn solve_interior(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let c = Common::read(cfg)?;
    let omega = cfg.convex_shape("omega")?;
    let l = level(cfg)?;
    let fb = c.solver(&omega.bbox())?;
    let lambda = constant_lambda(cfg, &fb.grid.bbox())?;
    let spec = DistanceSpec::constant(l, lambda)?;
    fb.check_lambda(lambda)?;
    let sol = iterate_interior(&omega, &spec, &fb)?;
    summary(out, &sol);
    solution_outputs(&c, omega.polygon(), &sol, &fb.grid.bbox())
}

fn lambda_max(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let c = Common::read(cfg)?;
    let omega = cfg.convex_shape("omega")?;
    let l = level(cfg)?;
    let fb = c.solver(&omega.bbox())?;
    let v = estimate_lambda_max(&omega, l, c.p, &fb)?;
    let text = format_table_csv(&["level", "p", "h", "lambda_max"], &[vec![
        format!("{l:.16e}"),
        format!("{:.16e}", c.p),
        format!("{:.16e}", c.h),
        format!("{v:.16e}"),
    ]]);
    out.push_str(&text);
    c.write("lambda_max.csv", &text)
}

fn converge_bernoulli(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let c = Common::read(cfg)?;
    let k = cfg.convex_shape("inner")?;
    let w = cfg.f64_in("bernoulli_omega", None, 1e-9, f64::MAX)?;
    let steps = cfg.usize_or("steps", 3)?;
    if steps < 3 {
        return Err(ConfigError { line: None, key: Some("steps".into()), message: "need at least 3 steps".into() }.into());
    }
    let fb = c.solver(&k.bbox())?;
    let lambda0 = constant_lambda(cfg, &fb.grid.bbox())?;
    if !(w * lambda0 < 1.0) {
        return Err(ConfigError::new(format!("bernoulli_omega * lambda = {} must be below 1", w * lambda0)).into());
    }
    let rep = run_converge_bernoulli(&k, w, lambda0, steps, &fb)?;
    for lam in &rep.truncated {
        eprintln!("warning: lambda {lam} is below 2h and was skipped");
    }
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.16e}"));
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                format!("{:.16e}", r.lambda),
                format!("{:.16e}", r.level),
                format!("{:.16e}", r.g_hat),
                opt(r.hausdorff_prev),
                opt(r.nesting_excess),
                r.outer_iterations.to_string(),
            ]
        })
        .collect();
    let text = format_table_csv(
        &["n", "lambda", "level", "g_hat", "hausdorff_prev", "nesting_excess", "outer_iterations"],
        &rows,
    );
    out.push_str(&text);
    let _ = writeln!(out, "nested within h: {}; |g_hat - omega| at smallest lambda: {:.6e}", rep.nested(c.h), rep.final_gradient_error());
    c.write("bernoulli.csv", &text)?;
    let mut items = vec![SvgItem::polygon(Layer::Inner, k.polygon())];
    let mut bbox = k.bbox();
    for r in &rep.rows {
        c.write(&format!("boundary_{}.txt", r.n), &format_polygon(&r.boundary))?;
        items.push(SvgItem::polygon(Layer::FreeBoundary, &r.boundary));
        bbox = bbox.union(&r.boundary.bbox());
    }
    c.write("overlay.svg", &format_svg(&items, &bbox.expanded(c.h)))
}

fn joining(cfg: &RunConfig) -> std::result::Result<JoiningFunction, ConfigError> {
    let v = cfg.raw("joining").unwrap_or("symmetric");
    let bad = |m: String| ConfigError { line: None, key: Some("joining".into()), message: m };
    if v == "symmetric" {
        return Ok(JoiningFunction::symmetric());
    }
    if let Some(args) = v.strip_prefix("classical:") {
        let nums: Vec<f64> = args
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number {s:?}"))))
            .collect::<std::result::Result<_, _>>()?;
        if let [a, alpha] = nums[..] {
            if a > 0.0 && alpha > 0.0 {
                return Ok(JoiningFunction::classical(a, alpha));
            }
        }
        return Err(bad("expected classical:a,alpha with a, alpha > 0".into()));
    }
    Err(bad(format!("unknown joining function {v:?}; use symmetric or classical:a,alpha")))
}

fn two_phase(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let c = Common::read(cfg)?;
    let k1 = cfg.convex_shape("inner")?;
    let k3 = cfg.convex_shape("outer")?;
    let l = level(cfg)?;
    let g = joining(cfg)?;
    let fb = c.solver(&k3.bbox())?;
    let sol = two_phase_iterate(&k1, &k3, &g, l, c.p, &fb, &TwoPhaseOptions::for_grid(&fb.grid))?;
    let _ = writeln!(
        out,
        "converged after {} iterations: max_joining_residual={:.6e} separation_ratio={:.6e}",
        sol.trace.len(),
        sol.max_joining_residual,
        sol.separation_ratio
    );
    c.write("trace.csv", &format_trace_csv(&sol.trace))?;
    c.write("interface.txt", &format_polygon(sol.k2.polygon()))?;
    let items = [
        SvgItem::polygon(Layer::Inner, k1.polygon()),
        SvgItem::polygon(Layer::FreeBoundary, sol.k2.polygon()),
        SvgItem::polygon(Layer::Inner, k3.polygon()),
    ];
    c.write("overlay.svg", &format_svg(&items, &fb.grid.bbox()))
}

fn brunn_minkowski(cfg: &RunConfig, out: &mut String) -> Result<()> {
    let c = Common::read(cfg)?;
    let o0 = cfg.convex_shape("omega")?;
    let o1 = cfg.convex_shape("omega1")?;
    let l = level(cfg)?;
    let ts = cfg.list_f64("t_grid")?.unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(ConfigError { line: None, key: Some("t_grid".into()), message: format!("{t} is outside [0, 1]") }
            .into());
    }
    let fb = c.solver(&o0.bbox().union(&o1.bbox()))?;
    let rep = run_brunn_minkowski(&o0, &o1, l, c.p, &ts, &fb)?;
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                format!("{:.16e}", r.t),
                format!("{:.16e}", r.lambda_max),
                format!("{:.16e}", r.deficit),
                format!("{:.16e}", r.lambda),
                format!("{:.16e}", r.inclusion_margin),
            ]
        })
        .collect();
    let text = format_table_csv(&["t", "lambda_max", "deficit", "lambda", "inclusion_margin"], &rows);
    out.push_str(&text);
    c.write("brunn_minkowski.csv", &text)
}

/// Resolves the config file, if any, and applies overrides in order.
pub fn assemble(config: Option<&Path>, overrides: &[(String, String)]) -> std::result::Result<RunConfig, ConfigError> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for (k, v) in overrides {
        cfg.set(k, v.clone())?;
    }
    Ok(cfg)
}
