//! Batch driver: construct measurements, run inequality sweeps, emit CSV.
//!
//! Exit codes: 0 success, 1 internal error, 2 input error, 3 inequality
//! violation (a numerical falsification of a proved bound, treated as a bug
//! detector). `GPGM_LOG` controls verbosity (`error`, `info`, `debug`).

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use gpgm_core::gpgm::{build_finite_pgm, validate_povm};
use gpgm_core::io::{load_ensemble, load_sweep_config, save_povm, SweepConfig};
use gpgm_core::selftest::run_all;
use gpgm_core::sweep::{
    build_corpus, evaluate_bk_instance, evaluate_mse_instance, split_seed, BkRow,
    MseInstanceResult,
};
use gpgm_core::Error;

const BK_SLACK_FLOOR: f64 = -1e-8;
const MSE_BOUND_SLACK: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "gpgm",
    about = "Pretty good measurements: construction, gain and MSE evaluation, inequality sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the pretty good measurement of an ensemble file and validate it.
    Pgm {
        /// Ensemble JSON file (explicit or generator stanza).
        ensemble_file: PathBuf,
        /// Write the serialized POVM here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Square-root-bound sweep: candidate gains against sqrt of the PGM gain.
    BkSweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the sweep.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// MSE sweep: factor-2 and second-moment bounds for the PGM.
    MseSweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the built-in verification suites.
    Selftest {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("GPGM_LOG", "error"))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            let code = classify(&err);
            eprintln!(
                "{}: {err}",
                if code == 2 { "input error" } else { "error" }
            );
            ExitCode::from(code)
        }
    }
}

/// Maps library errors onto the exit-code contract.
fn classify(err: &Error) -> u8 {
    match err {
        Error::Io(_)
        | Error::Json(_)
        | Error::InvalidEnsemble { .. }
        | Error::InvalidEnsembleGlobal { .. }
        | Error::InvalidConfig { .. }
        | Error::InvalidPartition { .. }
        | Error::InvalidTSequence { .. }
        | Error::GridTooLarge { .. }
        | Error::TruncationLoss { .. }
        | Error::ScoreOutOfRange { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::EmptyCell => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Pgm { ensemble_file, out } => cmd_pgm(&ensemble_file, out.as_deref()),
        Command::BkSweep {
            config,
            seed,
            out,
            jobs,
        } => {
            let cfg = override_config(load_sweep_config(&config)?, seed, &out);
            configure_jobs(jobs);
            cmd_bk_sweep(&cfg)
        }
        Command::MseSweep {
            config,
            seed,
            out,
            jobs,
        } => {
            let cfg = override_config(load_sweep_config(&config)?, seed, &out);
            configure_jobs(jobs);
            cmd_mse_sweep(&cfg)
        }
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn override_config(mut cfg: SweepConfig, seed: Option<u64>, out: &Option<PathBuf>) -> SweepConfig {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out = Some(o.display().to_string());
    }
    cfg
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // ignore failure: the global pool can only be set once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn cmd_pgm(ensemble_file: &std::path::Path, out: Option<&std::path::Path>) -> Result<ExitCode, Error> {
    let ensemble = load_ensemble(ensemble_file)?;
    log::info!(
        "loaded ensemble '{}': d = {}, r = {}, N = {}",
        ensemble.label(),
        ensemble.dim(),
        ensemble.len(),
        ensemble.param_dim()
    );
    let pgm = build_finite_pgm(&ensemble)?;
    let report = validate_povm(&pgm, 1e-9);
    println!(
        "pgm: {} elements, dim {}, min eigenvalue {:.3e}, completeness residual {:.3e} -> {}",
        pgm.len(),
        pgm.dim(),
        report.min_eigenvalue(),
        report.completeness_residual,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if let Some(path) = out {
        save_povm(path, &pgm)?;
        println!("povm written to {}", path.display());
    }
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        // a constructed measurement failing its own axioms is an internal bug
        Ok(ExitCode::from(1))
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn open_output(cfg: &SweepConfig, default_name: &str) -> Result<(PathBuf, File), Error> {
    let path = PathBuf::from(
        cfg.out
            .clone()
            .unwrap_or_else(|| default_name.to_string()),
    );
    Ok((path.clone(), File::create(path)?))
}

fn cmd_bk_sweep(cfg: &SweepConfig) -> Result<ExitCode, Error> {
    let corpus = build_corpus(cfg)?;
    log::info!("bk-sweep over {} instances", corpus.len());
    let solver = cfg.solver.into();
    let rows: Vec<BkRow> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            evaluate_bk_instance(
                inst,
                &cfg.score,
                &solver,
                cfg.num_random_povms,
                split_seed(cfg.seed, 0xB000 + i as u64),
            )
        })
        .collect::<Result<_, _>>()?;

    let (path, mut file) = open_output(cfg, "bk_sweep.csv")?;
    writeln!(file, "# gpgm bk-sweep")?;
    writeln!(file, "# seed={}", cfg.seed)?;
    writeln!(file, "# score={}", cfg.score.label())?;
    writeln!(file, "# num_instances={}", corpus.len())?;
    writeln!(file, "# num_random_povms={}", cfg.num_random_povms)?;
    writeln!(file, "# timestamp={}", timestamp())?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "instance_id",
        "d",
        "r",
        "param_dim",
        "score_kind",
        "g_pgm",
        "sqrt_g_pgm",
        "g_best_candidate",
        "best_candidate",
        "slack",
        "solver_converged",
        "solver_residual",
    ])
    .map_err(csv_err)?;
    for row in &rows {
        w.write_record([
            row.instance_id.clone(),
            row.d.to_string(),
            row.r.to_string(),
            row.param_dim.to_string(),
            row.score_kind.clone(),
            fmt(row.g_pgm),
            fmt(row.sqrt_g_pgm),
            fmt(row.g_best_candidate),
            row.best_candidate.clone(),
            fmt(row.slack),
            row.solver_converged.to_string(),
            fmt(row.solver_residual),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.slack < BK_SLACK_FLOOR).count();
    println!(
        "bk-sweep: {} rows -> {}; min slack = {:.6e}; violations = {violations}",
        rows.len(),
        path.display(),
        min_slack
    );
    if violations > 0 {
        println!("square-root bound violated: this falsifies a proved inequality; treat as a bug");
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn cmd_mse_sweep(cfg: &SweepConfig) -> Result<ExitCode, Error> {
    let corpus = build_corpus(cfg)?;
    log::info!("mse-sweep over {} instances", corpus.len());
    let results: Vec<MseInstanceResult> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            evaluate_mse_instance(
                inst,
                cfg.num_random_povms,
                cfg.t_sequence.as_deref(),
                split_seed(cfg.seed, 0x3E00 + i as u64),
            )
        })
        .collect::<Result<_, _>>()?;

    let (path, mut file) = open_output(cfg, "mse_sweep.csv")?;
    writeln!(file, "# gpgm mse-sweep")?;
    writeln!(file, "# seed={}", cfg.seed)?;
    writeln!(file, "# num_instances={}", corpus.len())?;
    writeln!(file, "# num_random_povms={}", cfg.num_random_povms)?;
    writeln!(file, "# displacement_convention=alpha=(x1+i*x2)/sqrt(2)")?;
    writeln!(file, "# timestamp={}", timestamp())?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "instance_id",
        "d",
        "r",
        "param_dim",
        "candidate",
        "mse_pgm",
        "mse_candidate",
        "ratio",
        "bound_4e",
        "limit_final",
        "limit_min_slack",
        "limit_curve",
    ])
    .map_err(csv_err)?;

    let mut violations = 0usize;
    let mut max_ratio = 0.0f64;
    for result in &results {
        let curve = result
            .limit_curve
            .iter()
            .map(|(t, v)| format!("{t:.3e}:{v:.6e}"))
            .collect::<Vec<_>>()
            .join(";");
        let limit_final = result.limit_curve.last().map(|&(_, v)| v).unwrap_or(0.0);
        for row in &result.rows {
            if row.mse_pgm > 2.0 * row.mse_candidate + MSE_BOUND_SLACK {
                violations += 1;
            }
            if row.mse_candidate > 0.0 {
                max_ratio = max_ratio.max(row.ratio);
            }
            w.write_record([
                row.instance_id.clone(),
                row.d.to_string(),
                row.r.to_string(),
                row.param_dim.to_string(),
                row.candidate.clone(),
                fmt(row.mse_pgm),
                fmt(row.mse_candidate),
                fmt(row.ratio),
                fmt(row.bound_4e),
                fmt(limit_final),
                fmt(result.limit_min_slack),
                curve.clone(),
            ])
            .map_err(csv_err)?;
        }
        if result.mse_pgm > result.bound_4e + MSE_BOUND_SLACK {
            violations += 1;
        }
    }
    w.flush()?;

    let rows: usize = results.iter().map(|r| r.rows.len()).sum();
    println!(
        "mse-sweep: {rows} rows -> {}; max mse_pgm/mse_candidate = {max_ratio:.4}; violations = {violations}",
        path.display()
    );
    if violations > 0 {
        println!("an MSE bound was violated: this falsifies a proved inequality; treat as a bug");
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_selftest(seed: u64) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let reports = run_all(seed)?;
    let mut all_pass = true;
    for r in &reports {
        println!(
            "suite {}: {} ({} checks; {})",
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.checks,
            r.detail
        );
        all_pass &= r.pass;
    }
    println!(
        "selftest: {} in {:.2}s",
        if all_pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
