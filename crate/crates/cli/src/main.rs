use std::path::PathBuf;
use std::process::ExitCode;

use bernoulli_cli::commands::{assemble, run, Command, EXIT_CONFIG};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bernoulli", version, about = "Discrete Bernoulli free boundary solver for the p-Laplacian")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the ball gap Λ(r) and its extremum as CSV.
    Radial(Shared),
    /// Exterior problem around the body `inner`.
    SolveExterior(Shared),
    /// Interior problem inside the body `omega`.
    SolveInterior(Shared),
    /// Estimate the interior Bernoulli constant of `omega`.
    LambdaMax(Shared),
    /// Exterior runs with l = ω λ for halving λ.
    ConvergeBernoulli(Shared),
    /// Two-phase interface between `inner` and `outer`.
    TwoPhase(Shared),
    /// Brunn–Minkowski check between `omega` and `omega1`.
    BrunnMinkowski(Shared),
}

#[derive(Args)]
struct Shared {
    /// key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid_h: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    level: Option<String>,
    /// Constant or affine "a+b*x+c*y".
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Body Ω: a polygon file, disk:cx,cy,r[,n] or square:cx,cy,side.
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    no_convexify: bool,
    /// Gradient target ω; sets l = ω λ.
    #[arg(long)]
    bernoulli_omega: Option<String>,
    /// Any other configuration entry.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, shared) = match cli.cmd {
        Cmd::Radial(s) => (Command::Radial, s),
        Cmd::SolveExterior(s) => (Command::SolveExterior, s),
        Cmd::SolveInterior(s) => (Command::SolveInterior, s),
        Cmd::LambdaMax(s) => (Command::LambdaMax, s),
        Cmd::ConvergeBernoulli(s) => (Command::ConvergeBernoulli, s),
        Cmd::TwoPhase(s) => (Command::TwoPhase, s),
        Cmd::BrunnMinkowski(s) => (Command::BrunnMinkowski, s),
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    for kv in &shared.set {
        match kv.split_once('=') {
            Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
            None => {
                eprintln!("error: --set expects KEY=VALUE, got {kv:?}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    let flags = [
        ("h", &shared.grid_h),
        ("p", &shared.p),
        ("level", &shared.level),
        ("lambda", &shared.lambda),
        ("omega", &shared.omega),
        ("out", &shared.out),
        ("bernoulli_omega", &shared.bernoulli_omega),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            overrides.push((k.to_string(), v.clone()));
        }
    }
    if shared.no_convexify {
        overrides.push(("convexify".into(), "false".into()));
    }
    let cfg = match assemble(shared.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let mut stdout = String::new();
    let result = run(cmd, &cfg, &mut stdout);
    print!("{stdout}");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
