//! Command-line front end. `main` only calls [`main_with_args`].

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::asymptotics::{default_grid, doubling_grid, geometric_grid};
use crate::error::{Error, Result};
use crate::lattice::DiskNormalization;
use crate::report::{run, ExperimentConfig, ExperimentKind, ModelRef, Outcome};
use crate::toric::{ToricModel, BUILTIN_NAMES};
use crate::VERSION;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "szasz-lab", version = VERSION, about = "Generalized Szasz operators on toric Kähler models")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SZASZ_LAB_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the built-in models.
    Models,
    /// Evaluate the operator: CSV of (x, N, value, tail_bound).
    Eval(ExpArgs),
    /// Monomial norm tables by quadrature, one CSV per N.
    Norms(ExpArgs),
    /// Bergman kernel diagonal and its ratio to N^m.
    Kernel(ExpArgs),
    /// Fit S_N f(x) = c0 + c1/N + … and compare c1 with the Hessian term.
    Voronovskaya(ExpArgs),
    /// Corner scaling toward the Szasz operator and the first-order coefficient.
    Corner(ExpArgs),
    /// Wall scaling on a product model.
    Wall(ExpArgs),
    /// Binomial(N, x/N) against Poisson(x).
    PoissonLimit(ExpArgs),
    /// Operator/expectation identities, Monte Carlo and the Pascal check.
    ProbCheck(ExpArgs),
    /// Run a batch of config files in parallel.
    Report {
        /// JSON config files; each names its own experiment kind.
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

/// Flags shared by the experiment subcommands. Flags override fields of `--config`.
#[derive(Args, Debug, Default)]
pub struct ExpArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model name (see `models`) [default: bargmann-fock].
    #[arg(long)]
    pub model: Option<String>,
    /// Custom model JSON document.
    #[arg(long, conflicts_with = "model")]
    pub model_file: Option<PathBuf>,
    /// Test function: expression in t (or s,t / t1,t2,…) or a tag such as gaussian-bump:1:0.5 [default: t^2].
    #[arg(long = "f")]
    pub function: Option<String>,
    /// N values: `4`, `8,16,32`, `32..2048` (geometric), `8..1024:double`, `2..64:all`.
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Points: `0.5`, `0.1,0.2,0.3`; coordinates of one point joined by `:` (`0.2:0.3`).
    #[arg(long)]
    pub x: Option<String>,
    /// Kept coordinates for `wall`, joined by `:`.
    #[arg(long)]
    pub x_kept: Option<String>,
    /// Truncation tail bound [default: 1e-14].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Disk normalization.
    #[arg(long, value_enum)]
    pub normalization: Option<DiskNormalization>,
    /// Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count (0 skips sampling) [default: 1000000].
    #[arg(long)]
    pub count: Option<usize>,
    /// Largest k in the Poisson-limit sup [default: 12].
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Largest |alpha| tabulated by `norms` [default: 4N].
    #[arg(long)]
    pub max_abs: Option<i64>,
    /// Gauss–Legendre nodes per axis (multiple of 16) [default: 64].
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Quadrature relative tolerance [default: 1e-10].
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Also write the tidy CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Directory for multi-file outputs.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    pub dry_run: bool,
}

/// Parses an `N` list.
pub fn parse_n_grid(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::invalid(format!("bad N list '{s}'"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, how) = rest.split_once(':').unwrap_or((rest, "geometric"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        return match how {
            "geometric" => Ok(geometric_grid(lo, hi)),
            "double" => Ok(doubling_grid(lo, hi)),
            "all" => Ok((lo..=hi).collect()),
            _ => Err(bad()),
        };
    }
    let v: Vec<u32> = s.split(',').map(num).collect::<Result<_>>()?;
    if v.is_empty() || v.contains(&0) || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!("N list '{s}' must be positive and increasing")));
    }
    Ok(v)
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(':').map(|t| t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad coordinate '{t}'")))).collect()
}

/// Parses an `x` list.
pub fn parse_x_grid(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(',').map(parse_point).collect()
}

impl ExpArgs {
    /// The config after applying flags on top of `--config` (or the defaults).
    pub fn resolve(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        c.kind = kind;
        if kind == ExperimentKind::Wall && self.config.is_none() {
            c.model = ModelRef::Name("product:fubini-study-cp1xfubini-study-cp1".into());
        }
        if let Some(m) = &self.model {
            c.model = ModelRef::Name(m.clone());
        }
        if let Some(p) = &self.model_file {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::invalid(format!("cannot read model file {}: {e}", p.display())))?;
            c.model = ModelRef::Custom(serde_json::from_str(&text)?);
        }
        if let Some(f) = &self.function {
            c.function = f.clone();
        }
        if let Some(n) = &self.n {
            c.n_grid = parse_n_grid(n)?;
        } else if self.config.is_none() {
            c.n_grid = match kind {
                ExperimentKind::Eval | ExperimentKind::Kernel | ExperimentKind::Norms => vec![8, 16, 32],
                ExperimentKind::Wall => doubling_grid(8, 1024),
                ExperimentKind::ProbCheck => vec![16, 32, 64, 128, 256],
                _ => default_grid(),
            };
        }
        if let Some(x) = &self.x {
            c.x_grid = parse_x_grid(x)?;
        } else if self.config.is_none() {
            let model = c.model.build()?;
            c.x_grid = vec![model.reference_point()];
            if kind == ExperimentKind::Wall {
                c.x_grid = vec![vec![1.0]];
            }
            if matches!(kind, ExperimentKind::PoissonLimit | ExperimentKind::Corner) {
                c.x_grid = vec![vec![1.0; model.dimension()]];
            }
        }
        if let Some(k) = &self.x_kept {
            c.x_kept = parse_point(k)?;
        } else if kind == ExperimentKind::Wall && self.config.is_none() {
            c.x_kept = vec![0.3];
        }
        if kind == ExperimentKind::Wall && self.function.is_none() && self.config.is_none() {
            c.function = "cosine-window:1:2".into();
        }
        macro_rules! set {
            ($field:ident, $target:expr) => {
                if let Some(v) = self.$field.clone() {
                    $target = v;
                }
            };
        }
        set!(epsilon, c.epsilon);
        set!(normalization, c.normalization);
        set!(seed, c.seed);
        set!(count, c.count);
        set!(k_max, c.k_max);
        set!(max_abs, c.max_abs);
        set!(nodes, c.quadrature.nodes_per_axis);
        set!(rel_tol, c.quadrature.rel_tol);
        if self.json.is_some() {
            c.output.json = self.json.clone();
        }
        if self.csv.is_some() {
            c.output.csv = self.csv.clone();
        }
        if self.out_dir.is_some() {
            c.output.dir = self.out_dir.clone();
        }
        Ok(c)
    }
}

fn error_exit(e: &Error) -> ExitCode {
    let obj = json!({ "error": e.kind(), "message": e.to_string(), "version": VERSION });
    eprintln!("{obj}");
    ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERICAL })
}

fn emit(outcome: &Outcome, out: &mut dyn Write) -> Result<()> {
    outcome.write_outputs()?;
    if outcome.config.output.json.is_none() {
        if outcome.config.kind == ExperimentKind::Eval {
            outcome.table.write(&mut *out, &outcome.config_hash)?;
        } else {
            writeln!(out, "{}", serde_json::to_string_pretty(outcome)?)?;
        }
    }
    Ok(())
}

fn models(out: &mut dyn Write) -> Result<()> {
    writeln!(out, "name,dimension,unbounded,closed_form_norms,stated_kernel_differs")?;
    for name in BUILTIN_NAMES {
        let m = ToricModel::from_name(name)?;
        let n = m.min_power().max(4);
        let closed = m.closed_form_log_kernel_diag(n).is_some();
        let differs = m.stated_log_kernel_diag(n).is_some_and(|s| Some(s) != m.closed_form_log_kernel_diag(n));
        writeln!(out, "{name},{},{},{closed},{differs}", m.dimension(), m.polytope().is_unbounded())?;
    }
    writeln!(out, "# also: bargmann-fock-<m>, fubini-study-cp<m>, bergman-ball-<m>, product:<a>x<b>, --model-file")?;
    Ok(())
}

/// Runs the CLI on explicit arguments, writing reports to `out`.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return error_exit(&Error::invalid(format!("thread pool: {e}"))),
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut buf));
    let flushed = out.write_all(&buf).and_then(|_| out.flush());
    match result.and(flushed.map_err(Error::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => error_exit(&e),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    let (args, kind) = match command {
        Command::Models => return models(out),
        Command::Report { configs } => {
            let loaded: Vec<ExperimentConfig> =
                configs.iter().map(|p| ExperimentConfig::load(p)).collect::<Result<_>>()?;
            let outcomes: Vec<Outcome> = loaded.par_iter().map(run).collect::<Result<_>>()?;
            let mut summary = Vec::new();
            for (o, path) in outcomes.iter().zip(&configs) {
                let written = o.write_outputs()?;
                summary.push(json!({
                    "config": path,
                    "experiment": o.experiment,
                    "config_hash": o.config_hash,
                    "passed": o.passed,
                    "written": written,
                    "result": if o.config.output.json.is_none() { Some(&o.result) } else { None },
                }));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "version": VERSION, "runs": summary }))?)?;
            return Ok(());
        }
        Command::Eval(a) => (a, ExperimentKind::Eval),
        Command::Norms(a) => (a, ExperimentKind::Norms),
        Command::Kernel(a) => (a, ExperimentKind::Kernel),
        Command::Voronovskaya(a) => (a, ExperimentKind::Voronovskaya),
        Command::Corner(a) => (a, ExperimentKind::Corner),
        Command::Wall(a) => (a, ExperimentKind::Wall),
        Command::PoissonLimit(a) => (a, ExperimentKind::PoissonLimit),
        Command::ProbCheck(a) => (a, ExperimentKind::ProbCheck),
    };
    let config = args.resolve(kind)?;
    if args.dry_run {
        writeln!(out, "{}", config.to_json())?;
        return Ok(());
    }
    let outcome = run(&config)?;
    emit(&outcome, out)
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    main_with_args(std::env::args_os(), &mut lock)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (ExitCode, String) {
        let mut buf = Vec::new();
        let code = main_with_args(std::iter::once("szasz-lab").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn grids_parse() {
        assert_eq!(parse_n_grid("4").unwrap(), vec![4]);
        assert_eq!(parse_n_grid("8..64:double").unwrap(), vec![8, 16, 32, 64]);
        assert_eq!(parse_n_grid("2..5:all").unwrap(), vec![2, 3, 4, 5]);
        assert!(parse_n_grid("8,4").is_err());
        assert_eq!(parse_x_grid("0.2:0.3,0.1:0.1").unwrap(), vec![vec![0.2, 0.3], vec![0.1, 0.1]]);
    }

    #[test]
    fn eval_prints_csv() {
        let (code, out) = run_cli(&["eval", "--model", "fubini-study-cp1", "--f", "t^2", "--N", "4", "--x", "0.5"]);
        assert_eq!(code, ExitCode::SUCCESS);
        assert!(out.lines().next().unwrap().contains("config_hash="));
        assert_eq!(out.lines().nth(2).unwrap().split(',').nth(2).unwrap(), "0.3125");
    }

    #[test]
    fn usage_and_numerical_exit_codes() {
        let (code, _) = run_cli(&["eval", "--model", "no-such-model"]);
        assert_eq!(code, ExitCode::from(EXIT_USAGE));
        let (code, _) = run_cli(&["eval", "--bogus-flag"]);
        assert_eq!(code, ExitCode::from(EXIT_USAGE));
        let (code, _) = run_cli(&["eval", "--model", "fubini-study-cp1", "--x", "1.5", "--N", "4"]);
        assert_eq!(code, ExitCode::from(EXIT_NUMERICAL));
    }
}
