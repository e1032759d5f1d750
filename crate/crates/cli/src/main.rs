//! `iptlab`: verification campaigns, tightness search, replay and direct
//! Chebyshev radius solves.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iptlab::campaign::{self, CampaignConfig, RunOptions};
use iptlab::chebyshev::{chebyshev_radius, Refinement, SolverOptions};
use iptlab::exec::Execution;
use iptlab::{Error, GaugeSpec, Mode, OperatorField};

#[derive(Parser)]
#[command(name = "iptlab", version, about = "Landau and Grüss inequalities for inner product type transformers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured checker over its grid and trials.
    Verify(CampaignArgs),
    /// Hill-climb lhs/rhs for every grid point.
    Tightness {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Restarts per grid point.
        #[arg(long)]
        restarts: Option<usize>,
        /// Steps per restart.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Recompute a stored instance file.
    Replay {
        file: PathBuf,
        /// Gauge override, e.g. `schatten:2`, `ky_fan:1` or a JSON gauge object.
        #[arg(long)]
        gauge: Option<String>,
        /// Report hypothesis violations instead of refusing.
        #[arg(long)]
        no_assert: bool,
        /// Print only the JSON report line.
        #[arg(long)]
        json_only: bool,
    },
    /// Chebyshev radius of a field file.
    Radius {
        file: PathBuf,
        /// Target duality gap.
        #[arg(long)]
        tol: Option<f64>,
        /// Use the smoothing solver instead of the barrier method.
        #[arg(long)]
        smoothing: bool,
    },
}

#[derive(Args)]
struct CampaignArgs {
    /// Campaign config (JSON); the built-in suite when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Campaign seed; overrides IPTLAB_SEED and the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Explore mode: record hypothesis violations instead of refusing.
    #[arg(long)]
    no_assert: bool,
    /// Print only the JSON summary line.
    #[arg(long)]
    json_only: bool,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

impl CampaignArgs {
    fn config(&self) -> Result<CampaignConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::load(path)?,
            None => CampaignConfig::default_suite(),
        };
        cfg.apply_env()?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_path = out.display().to_string();
        }
        Ok(cfg)
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            mode: if self.no_assert { Mode::Explore } else { Mode::Assert },
            exec: Execution::from_jobs(self.jobs),
        }
    }
}

fn parse_gauge(text: &str) -> Result<GaugeSpec, Error> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::InvalidGauge(e.to_string()))
    } else {
        text.parse()
    }
}

fn last_line(path: &Path) -> Result<String, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(text.lines().last().unwrap_or_default().to_string())
}

fn verify(args: &CampaignArgs) -> Result<u8, Error> {
    let cfg = args.config()?;
    let out = campaign::run_verify(&cfg, &args.run_options())?;
    if args.json_only {
        println!("{}", last_line(&out.report_path)?);
    } else {
        let s = &out.summary;
        for (name, c) in &s.per_checker {
            println!(
                "{name:<20} {:>6} trials  {:>6} pass  {:>4} fail  {:>4} error  {:>4} unasserted",
                c.count, c.passed, c.failed, c.errors, c.unasserted
            );
        }
        println!(
            "total {} trials: {} pass, {} fail, {} error, {} unasserted; report {}",
            s.total,
            s.passed,
            s.failed,
            s.errors,
            s.unasserted,
            out.report_path.display()
        );
        if !out.failure_files.is_empty() {
            println!("{} instance files under {}", out.failure_files.len(), campaign::sidecar_dir(&out.report_path, "failures").display());
        }
    }
    Ok(out.exit_code as u8)
}

fn tightness(args: &CampaignArgs, restarts: Option<usize>, steps: Option<usize>) -> Result<u8, Error> {
    let mut cfg = args.config()?;
    if let Some(r) = restarts {
        cfg.tightness.restarts = r;
    }
    if let Some(s) = steps {
        cfg.tightness.steps = s;
    }
    let out = campaign::run_tightness(&cfg, &args.run_options())?;
    if args.json_only {
        println!("{}", last_line(&out.report_path)?);
    } else {
        for r in &out.results {
            let gauge = r.grid_point.gauge.as_ref().map(|g| g.label()).unwrap_or_default();
            println!("{:<20} grid {:>3} {gauge:<16} best ratio {:.12}", r.name, r.grid, r.best_ratio);
        }
        println!("report {}", out.report_path.display());
    }
    Ok(0)
}

fn replay(file: &Path, gauge: Option<&str>, no_assert: bool, json_only: bool) -> Result<u8, Error> {
    let gauge = gauge.map(parse_gauge).transpose()?;
    let mode = no_assert.then_some(Mode::Explore);
    let out = campaign::replay(file, gauge, mode)?;
    println!("{}", serde_json::to_string(&out.report)?);
    if !json_only {
        let r = &out.report;
        let verdict = if r.pass { "pass" } else { "FAIL" };
        let reproduced = match out.reproduced {
            Some(true) => "reproduced bit for bit",
            Some(false) => "DIFFERS from the stored report",
            None if out.modified => "modified",
            None => "no stored report",
        };
        println!("{} {verdict}: lhs {:e} rhs {:e} ratio {:.12} ({reproduced})", r.name, r.lhs, r.rhs, r.ratio);
    }
    Ok(if out.report.asserted_pass() { 0 } else { 1 })
}

fn radius(file: &Path, tol: Option<f64>, smoothing: bool) -> Result<u8, Error> {
    let text = std::fs::read_to_string(file)?;
    let field: OperatorField = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    let mut opts = SolverOptions::default();
    if let Some(t) = tol {
        opts.tol = t;
    }
    if smoothing {
        opts.refinement = Refinement::Smoothing;
    }
    let result = chebyshev_radius(&field, &opts)?;
    println!("{}", serde_json::to_string(&result)?);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(args) => verify(args),
        Command::Tightness { campaign, restarts, steps } => tightness(campaign, *restarts, *steps),
        Command::Replay { file, gauge, no_assert, json_only } => replay(file, gauge.as_deref(), *no_assert, *json_only),
        Command::Radius { file, tol, smoothing } => radius(file, *tol, *smoothing),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("iptlab: {e}");
            match e {
                Error::Config(_) | Error::Schema(_) | Error::Io(_) | Error::Json(_) | Error::InvalidGauge(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
