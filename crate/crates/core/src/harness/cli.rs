use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::contour::{build_rule, ContourRegion, RuleKind};
use crate::error::{Error, Result};
use crate::forge::JordanSpec;
use crate::solvers::solve;

use super::config::ExperimentConfig;
use super::experiment::{effective_m, load, run_experiment};
use super::filter::{filter_csv, Axis};
use super::problem_file::write_problem;
use super::verify::{verify_suite, VerifyConfig};

/// Exit code for configuration and input errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit code for solver failures and failed `verify --strict` runs.
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "contour-eigs", version, about = "Contour-integral eigensolvers for interior eigenvalues of Ax = λBx")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem with one method and print the eigenpairs.
    Solve {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Also print pairs outside the region.
        #[arg(long)]
        all: bool,
    },
    /// Run an (L, M) sweep and write a CSV report.
    Bench {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Run the verification checks.
    Verify(VerifyArgs),
    /// Sample the quadrature filter |f(λ)| along a line as CSV.
    Filter(FilterArgs),
    /// Write a generated problem to a file.
    Gen {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
}

/// Flags overriding config-file values; each maps to the config key of the
/// same name.
#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `jordan:<blocks>`, `symmetric:n,m[,lo,hi,out_lo,out_hi]` or `file:<path>`.
    #[arg(long)]
    problem: Option<String>,
    /// `circle:cx,cy,r` or `ellipse:cx,cy,a,b`.
    #[arg(long)]
    region: Option<String>,
    /// trapezoidal, trapezoidal-unshifted or gauss-legendre.
    #[arg(long)]
    rule: Option<String>,
    /// Quadrature points.
    #[arg(long = "N")]
    n: Option<String>,
    /// Block width; with --M replaces the sweep by one cell.
    #[arg(long = "L")]
    l: Option<usize>,
    /// Moment degree.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Cells such as `64x1,32x2`.
    #[arg(long)]
    sweep: Option<String>,
    /// Comma-separated method names.
    #[arg(long, alias = "method")]
    methods: Option<String>,
    /// Relative singular value cutoff.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    output: Option<String>,
    /// Factor only upper-half-plane points for real pencils.
    #[arg(long)]
    half_contour: Option<String>,
    /// `wall` or `off`.
    #[arg(long)]
    timing: Option<String>,
    /// Transform condition number for jordan problems, or `identity`.
    #[arg(long)]
    conditioning: Option<String>,
}

impl ExperimentArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Config {
                line: 0,
                field: "config".into(),
                message: format!("{}: {e}", path.display()),
            })?;
            cfg.apply_text(&text)?;
        }
        let pairs = [
            ("problem", &self.problem),
            ("region", &self.region),
            ("rule", &self.rule),
            ("N", &self.n),
            ("sweep", &self.sweep),
            ("methods", &self.methods),
            ("delta", &self.delta),
            ("seed", &self.seed),
            ("output", &self.output),
            ("half_contour", &self.half_contour),
            ("timing", &self.timing),
            ("conditioning", &self.conditioning),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v, 0)?;
            }
        }
        if self.l.is_some() || self.m.is_some() {
            let (l0, m0) = cfg.sweep[0];
            let (l, m) = (self.l.unwrap_or(l0), self.m.unwrap_or(m0));
            if l == 0 || m == 0 {
                return Err(Error::Config {
                    line: 0,
                    field: "L/M".into(),
                    message: "must be positive".into(),
                });
            }
            cfg.sweep = vec![(l, m)];
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated seeds.
    #[arg(long, default_value = "1,2,3")]
    seeds: String,
    #[arg(long = "N", default_value_t = 32)]
    n: usize,
    #[arg(long, default_value = "trapezoidal")]
    rule: String,
    /// Pencil for the moment recurrence check.
    #[arg(long)]
    jordan: Option<String>,
    /// Zero one quadrature weight (fault injection).
    #[arg(long)]
    zero_weight: Option<usize>,
    /// Exit nonzero unless every check passes.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long, default_value = "circle:0,0,1")]
    region: String,
    #[arg(long, default_value = "trapezoidal")]
    rule: String,
    #[arg(long = "N", default_value_t = 32)]
    n: usize,
    /// `real:a:b:n` or `imag:a:b:n`.
    #[arg(long, default_value = "real:-2:2:401")]
    axis: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cli_err(field: &str, e: impl std::fmt::Display) -> Error {
    Error::Config {
        line: 0,
        field: field.into(),
        message: e.to_string(),
    }
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the subcommand, writing
/// results to `out`. Returns the process exit code.
pub fn run_with_output<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_FAILURE
            }
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_output(args, &mut std::io::stdout().lock())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve { exp, all } => {
            let cfg = exp.into_config()?;
            let &method = cfg.methods.first().ok_or_else(|| cli_err("methods", "no method given"))?;
            let (l, m) = cfg.sweep[0];
            let (pencil, _) = load(&cfg)?;
            let r = solve(&pencil, &cfg.region, &cfg.solver_config(method, l, effective_m(method, m)))?;
            let mut text = format!(
                "# {} L={l} M={} N={} mhat={} iterations={} t_total={:.6}s\nre,im,residual,inside\n",
                r.method,
                effective_m(method, m),
                cfg.n,
                r.rank,
                r.iterations,
                r.timing.t_total.as_secs_f64()
            );
            for p in r.pairs.iter().filter(|p| all || p.inside) {
                text.push_str(&format!("{:e},{:e},{:e},{}\n", p.value.re, p.value.im, p.residual, p.inside));
            }
            emit(out, cfg.output.as_ref(), &text)?;
            Ok(0)
        }
        Command::Bench { exp } => {
            let cfg = exp.into_config()?;
            let rep = run_experiment(&cfg)?;
            let failed = rep.rows.iter().filter(|r| r.error.is_some()).count();
            info!("{} rows, {} failed, {} oracle eigenvalues", rep.rows.len(), failed, rep.oracle.len());
            emit(out, cfg.output.as_ref(), &rep.csv(cfg.timing))?;
            Ok(0)
        }
        Command::Verify(v) => {
            let seeds = v
                .seeds
                .split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|e| cli_err("seeds", e)))
                .collect::<Result<Vec<_>>>()?;
            let mut cfg = VerifyConfig {
                seeds,
                n: v.n,
                rule: v.rule.parse::<RuleKind>().map_err(|e| cli_err("rule", e))?,
                zero_weight: v.zero_weight,
                ..VerifyConfig::default()
            };
            if let Some(j) = &v.jordan {
                cfg.jordan = j.parse::<JordanSpec>().map_err(|e| cli_err("jordan", e))?;
            }
            let rep = verify_suite(&cfg);
            write!(out, "{rep}")?;
            Ok(if v.strict && !rep.all_passed() { EXIT_FAILURE } else { 0 })
        }
        Command::Filter(fa) => {
            let region: ContourRegion = fa.region.parse().map_err(|e| cli_err("region", e))?;
            let kind: RuleKind = fa.rule.parse().map_err(|e| cli_err("rule", e))?;
            let axis: Axis = fa.axis.parse().map_err(|e| cli_err("axis", e))?;
            let rule = build_rule(region, kind, fa.n)?;
            emit(out, fa.output.as_ref(), &filter_csv(&rule, &axis)?)?;
            Ok(0)
        }
        Command::Gen { exp } => {
            let cfg = exp.into_config()?;
            let (pencil, truth) = load(&cfg)?;
            let mut buf = Vec::new();
            write_problem(&mut buf, &pencil, truth.as_ref())?;
            emit(out, cfg.output.as_ref(), &String::from_utf8_lossy(&buf))?;
            Ok(0)
        }
    }
}
