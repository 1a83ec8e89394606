//! `bellman-riesz`: runs the Bellman-function and Gauss-space verification
//! suites and writes self-describing reports.
//!
//! Exit status is 0 when every asserted check passes, 1 when some check
//! failed and 2 on usage, configuration or evaluation errors.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bellman_riesz::estimates::WeightFamily;
use bellman_riesz::gauss::WeightSpec;
use bellman_riesz::verify::VerdictRecording;
use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{Format, GridConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "bellman-riesz", version, about = "Bellman function and Gauss-space verification suites")]
struct Cli {
    /// TOML file overriding built-in defaults; flags override the file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `csv` is only available for `sweep`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Size, sign and Hessian checks of B_Q on sampled points, plus auxiliary and mollified checks.
    VerifyBellman(VerifyArgs),
    /// Size and Hessian bounds of the five auxiliary functions on an (r, s) grid.
    AuxBounds(AuxArgs),
    /// Grid lower bound of the Poisson-A2 characteristic of a weight.
    A2(A2Args),
    /// Weighted Riesz-transform norm on span{h_1..h_N} against 80 q2.
    RieszNorm(NormArgs),
    /// Bilinear space-time embedding for one (f, g, weight) triple.
    Embedding(EmbeddingArgs),
    /// Both sides of the Poisson representation of <Rf, g> for f = h_n.
    ReprCheck(ReprArgs),
    /// q2, Riesz norm and truncation ladder over a weight family.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    x_step: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long)]
    subordination_nodes: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Values of Q, repeated or comma separated.
    #[arg(long = "q", value_delimiter = ',', num_args = 1..)]
    q: Option<Vec<f64>>,
    /// Sampled points per Q.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta_dim: Option<usize>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    pi_exclusion: Option<f64>,
    /// Random test directions per point.
    #[arg(long)]
    directions: Option<usize>,
    /// Mollifier radius; 0 disables the mollified checks.
    #[arg(long)]
    mollify_eps: Option<f64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    mollify_points: Option<usize>,
    #[arg(long)]
    aux_grid: Option<usize>,
    #[arg(long, value_parser = parse_recording)]
    record: Option<VerdictRecording>,
}

#[derive(Debug, Args)]
struct AuxArgs {
    #[arg(long = "q", value_delimiter = ',', num_args = 1..)]
    q: Option<Vec<f64>>,
    /// Side length of the (rs, r/s) grid.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    fd_step: Option<f64>,
}

#[derive(Debug, Args)]
struct A2Args {
    /// `const:c=<v>`, `exp:a=<v>` or `trunc:n=<k>:<inner>`.
    #[arg(long)]
    weight: Option<WeightSpec>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long)]
    weight: Option<WeightSpec>,
    /// Subspace dimension N.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct EmbeddingArgs {
    /// Hermite coefficients of f, comma separated; the first must be 0.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    f: Option<Vec<f64>>,
    /// Hermite coefficients of the one-form g, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    g: Option<Vec<f64>>,
    #[arg(long)]
    weight: Option<WeightSpec>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct ReprArgs {
    /// Hermite degrees, repeated or comma separated.
    #[arg(long = "n", value_delimiter = ',', num_args = 1..)]
    n: Option<Vec<usize>>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// `exp` or `const`.
    #[arg(long)]
    family: Option<WeightFamily>,
    /// Family parameters in ascending order, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    params: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    /// Truncation levels in ascending order, comma separated.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<u32>>,
    #[arg(long)]
    ladder_tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

fn parse_recording(s: &str) -> Result<VerdictRecording, String> {
    match s {
        "all" => Ok(VerdictRecording::All),
        "failures" | "failures_only" => Ok(VerdictRecording::FailuresOnly),
        "none" => Ok(VerdictRecording::None),
        other => Err(format!("expected all, failures or none, got `{other}`")),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl GridArgs {
    fn apply(self, g: &mut GridConfig) {
        set(&mut g.x_max, self.x_max);
        set(&mut g.x_step, self.x_step);
        set(&mut g.t_min, self.t_min);
        set(&mut g.t_max, self.t_max);
        set(&mut g.t_count, self.t_count);
        set(&mut g.subordination_nodes, self.subordination_nodes);
    }
}

/// Applies the subcommand flags on top of `cfg`.
fn resolve(command: Command, cfg: &mut RunConfig) -> fn(&RunConfig) -> Result<Outcome> {
    match command {
        Command::VerifyBellman(a) => {
            let s = &mut cfg.verify_bellman;
            set(&mut s.q_list, a.q);
            set(&mut s.samples_per_q, a.samples);
            set(&mut s.seed, a.seed);
            set(&mut s.eta_dim, a.eta_dim);
            set(&mut s.fd_step, a.fd_step);
            set(&mut s.pi_exclusion, a.pi_exclusion);
            set(&mut s.directions_per_point, a.directions);
            set(&mut s.mollify_eps, a.mollify_eps);
            set(&mut s.mc_samples, a.mc_samples);
            set(&mut s.mollify_points, a.mollify_points);
            set(&mut s.aux_grid, a.aux_grid);
            set(&mut s.record_verdicts, a.record);
            commands::verify_bellman
        }
        Command::AuxBounds(a) => {
            let s = &mut cfg.aux_bounds;
            set(&mut s.q_list, a.q);
            set(&mut s.grid, a.grid);
            set(&mut s.fd_step, a.fd_step);
            commands::aux_bounds
        }
        Command::A2(a) => {
            set(&mut cfg.a2.weight, a.weight);
            a.grid.apply(&mut cfg.grid);
            commands::a2
        }
        Command::RieszNorm(a) => {
            set(&mut cfg.riesz_norm.weight, a.weight);
            set(&mut cfg.riesz_norm.n, a.n);
            a.grid.apply(&mut cfg.grid);
            commands::riesz_norm
        }
        Command::Embedding(a) => {
            set(&mut cfg.embedding.f, a.f);
            set(&mut cfg.embedding.g, a.g);
            set(&mut cfg.embedding.weight, a.weight);
            a.grid.apply(&mut cfg.grid);
            commands::embedding_cmd
        }
        Command::ReprCheck(a) => {
            set(&mut cfg.repr_check.n_list, a.n);
            set(&mut cfg.repr_check.tol, a.tol);
            commands::repr_check
        }
        Command::Sweep(a) => {
            let s = &mut cfg.sweep;
            set(&mut s.family, a.family);
            set(&mut s.params, a.params);
            set(&mut s.n, a.n);
            set(&mut s.ladder, a.ladder);
            set(&mut s.ladder_tol, a.ladder_tol);
            a.grid.apply(&mut cfg.grid);
            commands::sweep
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Returns whether every asserted check passed.
fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.out, cli.out.map(Some));
    set(&mut cfg.format, cli.format);
    let is_sweep = matches!(cli.command, Command::Sweep(_));
    if cfg.format == Format::Csv && !is_sweep {
        bail!("csv output is only available for the sweep subcommand");
    }
    let exec = resolve(cli.command, &mut cfg);
    let outcome = exec(&cfg)?;
    let passed = outcome.report.passed();
    let body = match (cfg.format, outcome.csv) {
        (Format::Csv, Some(csv)) => csv.into_bytes(),
        _ => {
            let mut json = serde_json::to_vec_pretty(&outcome.report)?;
            json.push(b'\n');
            json
        }
    };
    match &cfg.out {
        Some(path) => write_atomic(path, &body)?,
        None => std::io::stdout().lock().write_all(&body)?,
    }
    for check in outcome.report.checks.iter().filter(|c| c.asserted && !c.passed()) {
        eprintln!("check `{}` failed at {} of {} points", check.name, check.failures, check.count);
    }
    Ok(passed)
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
            ExitCode::from(2)
        }
    }
}
