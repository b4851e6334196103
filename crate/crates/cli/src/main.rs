//! Command-line front end: evaluate incomplete triple hypergeometric matrix
//! functions at points or over grids, and run the identity verification suite.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 invalid input,
//! 3 a series or quadrature did not converge.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use triplehyp::harness::{run_suite, IdentityKind, SuiteFilter, Summary};
use triplehyp::{triple, Error, TriplePoint};

use config::{AxisJson, GridJson, JobConfig, ScalarJson};
use output::{EvalRecord, EvalSink, Format};

#[derive(Parser)]
#[command(name = "triplehyp", version, about = "Incomplete triple hypergeometric matrix functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate at one point (or at the points listed in a config).
    Eval(EvalArgs),
    /// Evaluate over a rectangular grid; z3 varies fastest.
    Grid(EvalArgs),
    /// Run the identity verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// JSON job configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Series relative tolerance (eval, grid) or uniform identity tolerance (verify).
    #[arg(long)]
    tol: Option<f64>,
    /// Cap on layers summed per series.
    #[arg(long)]
    max_terms: Option<usize>,
    /// Output format: json (one object per line) or csv.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// HA, HB or HC.
    #[arg(long)]
    family: Option<String>,
    /// lower, upper or complete.
    #[arg(long)]
    variant: Option<String>,
    /// Truncation point, x >= 0.
    #[arg(long)]
    x: Option<f64>,
    /// A number, a JSON pair [re, im], or (grid only) start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    z1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z3: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Restrict to one family (family-free checks still run).
    #[arg(long)]
    family: Option<String>,
    /// Identity groups to run, comma-separated or repeated; "all" for every group.
    #[arg(long, value_delimiter = ',')]
    identity: Vec<String>,
}

fn load(common: &Common, command: &str) -> Result<JobConfig> {
    let mut cfg = match &common.config {
        Some(path) => JobConfig::load(path)?,
        None => JobConfig::default(),
    };
    cfg.check_command(command)?;
    if let Some(f) = &common.format {
        cfg.format = Some(f.clone());
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    if let Some(m) = common.max_terms {
        cfg.series.get_or_insert_with(Default::default).max_terms_per_index = Some(m);
    }
    Ok(cfg)
}

fn format_of(cfg: &JobConfig) -> Result<Format> {
    Format::parse(cfg.format.as_deref().unwrap_or("json"))
}

fn apply_eval_flags(cfg: &mut JobConfig, args: &EvalArgs) {
    if let Some(f) = &args.family {
        cfg.family = Some(f.clone());
    }
    if let Some(v) = &args.variant {
        cfg.variant = Some(v.clone());
    }
    if let Some(x) = args.x {
        cfg.x = Some(x);
    }
    if let Some(t) = args.common.tol {
        cfg.series.get_or_insert_with(Default::default).rel_tol = Some(t);
    }
}

fn evaluate_all(cfg: &JobConfig, points: &[TriplePoint]) -> Result<()> {
    let p = cfg.param_set()?;
    let variant = cfg.variant()?;
    let ctl = cfg.series_control()?;
    let mut sink = EvalSink::open(format_of(cfg)?, cfg.out.as_deref())?;
    for z in points {
        let r = triple::evaluate(&p, variant, z, &ctl)?;
        sink.write(&EvalRecord::new(&p, variant, z, &r))?;
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let mut cfg = load(&args.common, "eval")?;
    apply_eval_flags(&mut cfg, &args);
    let flags = [&args.z1, &args.z2, &args.z3];
    let points = if flags.iter().any(|f| f.is_some()) || (cfg.z.is_none() && cfg.points.is_none()) {
        // missing components come from the config point, else zero
        let base = cfg.z.unwrap_or([ScalarJson::Real(0.0); 3]);
        let mut z = [base[0].value(), base[1].value(), base[2].value()];
        for (slot, flag) in z.iter_mut().zip(flags) {
            if let Some(s) = flag {
                *slot = ScalarJson::parse(s)?.value();
            }
        }
        vec![TriplePoint::from_array(z)]
    } else {
        cfg.points()?
    };
    evaluate_all(&cfg, &points)
}

fn grid(args: EvalArgs) -> Result<()> {
    let mut cfg = load(&args.common, "grid")?;
    apply_eval_flags(&mut cfg, &args);
    let zero = AxisJson::Fixed(ScalarJson::Real(0.0));
    let mut g = cfg.grid.clone().unwrap_or(GridJson { z1: zero, z2: zero, z3: zero });
    for (axis, flag) in [(&mut g.z1, &args.z1), (&mut g.z2, &args.z2), (&mut g.z3, &args.z3)] {
        if let Some(s) = flag {
            *axis = AxisJson::parse(s)?;
        }
    }
    let points = g.points()?;
    evaluate_all(&cfg, &points)
}

/// Returns whether every report passed.
fn verify(args: VerifyArgs) -> Result<bool> {
    let mut cfg = load(&args.common, "verify")?;
    if let Some(t) = args.common.tol {
        cfg.tolerance = Some(t);
        cfg.tolerances = None;
    }
    if let Some(f) = &args.family {
        cfg.family = Some(f.clone());
    }
    if !args.identity.is_empty() {
        cfg.identities = Some(args.identity.clone());
    }
    let family = cfg.family.is_some().then(|| cfg.family()).transpose()?;
    let kinds = match &cfg.identities {
        Some(names) if !names.iter().any(|n| n == "all") => Some(
            names
                .iter()
                .map(|n| IdentityKind::parse(n).with_context(|| format!("unknown identity group {n:?}")))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let filter = SuiteFilter { kinds, family, tolerances: cfg.tolerances()?, integrals: cfg.integral_options() };
    let reports = run_suite(&filter, &cfg.series_control()?)?;
    output::write_reports(format_of(&cfg)?, cfg.out.as_deref(), &reports)?;
    let s = Summary::of(&reports);
    eprintln!("{} reports, {} passed, {} failed", s.total, s.passed, s.failed);
    for r in reports.iter().filter(|r| !r.passed) {
        eprintln!("{r}");
    }
    Ok(s.all_passed())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Convergence { .. }) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Eval(a) => eval(a).map(|_| true),
        Command::Grid(a) => grid(a).map(|_| true),
        Command::Verify(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

