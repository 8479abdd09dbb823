//! The experiment pipeline: degrade, solve or compress, score, and record.
//!
//! Every run appends one row to `results.csv` (stable header, dot-decimal
//! numbers) and rewrites `trace.csv` with the per-iteration residuals of the
//! solver it ran. All randomness flows from the single experiment seed through
//! stage-tagged sub-seeds, so identical configs reproduce identical rows
//! except for the timing column.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use tenrec_core::degrade::{observe, DegradeError};
use tenrec_core::metrics::{mpsnr, MetricsError};
use tenrec_core::rng::derive_seed;
use tenrec_core::solvers::{solve_gnqrtc, solve_gnqtc, solve_gnrtc, solve_gntc, SolverError};
use tenrec_core::{rcompress, DenseTensor, SolverReport};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Task};
use crate::io::{read_tensor, write_tensor, IoError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("input tensor not found: {0}")]
    MissingInput(PathBuf),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Degrade(#[from] DegradeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("compression: {0}")]
    Compress(#[from] rcompress::CompressError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("io: {0}")]
    Fs(#[from] std::io::Error),
}

/// One results row; everything except `seconds` is seed-deterministic.
#[derive(Debug, Clone)]
pub struct RunRow {
    pub task: String,
    pub dataset: String,
    pub sr: f64,
    pub nr: f64,
    pub sigma: f64,
    pub delta: Option<f64>,
    pub backend: String,
    pub mpsnr: f64,
    pub mssim: f64,
    pub mrse: f64,
    pub seconds: f64,
    pub seed: u64,
}

impl RunRow {
    pub const HEADER: &'static str =
        "task,dataset,SR,NR,sigma,delta,backend,mpsnr,mssim,mrse,seconds,seed";

    pub fn to_csv(&self) -> String {
        let delta = self.delta.map(|d| d.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:.4},{}",
            self.task,
            self.dataset,
            self.sr,
            self.nr,
            self.sigma,
            delta,
            self.backend,
            self.mpsnr,
            self.mssim,
            self.mrse,
            self.seconds,
            self.seed
        )
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub rows: Vec<RunRow>,
    pub recovered_path: PathBuf,
}

fn append_rows(path: &Path, rows: &[RunRow]) -> Result<(), std::io::Error> {
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{}", RunRow::HEADER)?;
    }
    for r in rows {
        writeln!(f, "{}", r.to_csv())?;
    }
    Ok(())
}

fn write_trace(path: &Path, report: Option<&SolverReport>) -> Result<(), std::io::Error> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "iteration,primal,dual,objective")?;
    if let Some(r) = report {
        for i in 0..r.iterations {
            writeln!(
                f,
                "{},{},{},{}",
                i + 1,
                r.primal_residuals[i],
                r.dual_residuals[i],
                r.objective[i]
            )?;
        }
    }
    Ok(())
}

fn score(
    recovered: &DenseTensor,
    truth: &DenseTensor,
) -> Result<(f64, f64, f64), ExperimentError> {
    Ok((
        mpsnr(recovered, truth, 1.0)?,
        tenrec_core::metrics::mssim(recovered, truth)?,
        tenrec_core::metrics::rse(recovered, truth)?,
    ))
}

/// Runs the configured experiment end to end and records the outputs under
/// `cfg.output_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    if !cfg.input.exists() {
        return Err(ExperimentError::MissingInput(cfg.input.clone()));
    }
    let truth = read_tensor(&cfg.input)?;
    fs::create_dir_all(&cfg.output_dir)?;
    let dataset = cfg.dataset_label();
    let d = &cfg.degrade;
    let recovered_path = cfg.output_dir.join("recovered.tnsr");
    let results_path = cfg.output_dir.join("results.csv");
    let trace_path = cfg.output_dir.join("trace.csv");

    let observe_seed = derive_seed(cfg.seed, "observe", 0);
    let mut rows = Vec::new();
    let mut report_opt: Option<SolverReport> = None;

    let row_base = |task: &Task, backend: String, metrics: (f64, f64, f64), secs: f64| RunRow {
        task: task.name().to_string(),
        dataset: dataset.clone(),
        sr: d.sr,
        nr: d.nr,
        sigma: d.sigma,
        delta: d.delta,
        backend,
        mpsnr: metrics.0,
        mssim: metrics.1,
        mrse: metrics.2,
        seconds: secs,
        seed: cfg.seed,
    };

    match cfg.task {
        Task::Compress => {
            let start = Instant::now();
            let (recon, backend) = match cfg.compress.mode.as_str() {
                "fixed-rank" => {
                    let ccfg = cfg.compress.build_fixed_rank(cfg.seed)?;
                    let approx = rcompress::compress_fixed_rank(&truth, &ccfg)?;
                    (approx.reconstruct(), "fixed-rank".to_string())
                }
                "fixed-accuracy" => {
                    let ccfg = cfg.compress.build_fixed_accuracy(cfg.seed)?;
                    let (approx, _) = rcompress::compress_fixed_accuracy(&truth, &ccfg)?;
                    (approx.reconstruct(), "fixed-accuracy".to_string())
                }
                other => {
                    return Err(ConfigError::BadCompressionMode(other.to_string()).into());
                }
            };
            let secs = start.elapsed().as_secs_f64();
            write_tensor(&recon, &recovered_path)?;
            rows.push(row_base(&cfg.task, backend, score(&recon, &truth)?, secs));
        }
        Task::Bench => {
            // deterministic baseline vs the sketched compressor on one input
            let ccfg = cfg.compress.build_fixed_rank(cfg.seed)?;
            let start = Instant::now();
            let base = rcompress::sthosvd(&truth, &ccfg.rank, ccfg.order.clone())?;
            let secs_base = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let fast = rcompress::compress_fixed_rank(&truth, &ccfg)?;
            let secs_fast = start.elapsed().as_secs_f64();
            let base_recon = base.reconstruct();
            let fast_recon = fast.reconstruct();
            write_tensor(&fast_recon, &recovered_path)?;
            rows.push(row_base(
                &cfg.task,
                "sthosvd".into(),
                score(&base_recon, &truth)?,
                secs_base,
            ));
            rows.push(row_base(
                &cfg.task,
                "randomized".into(),
                score(&fast_recon, &truth)?,
                secs_fast,
            ));
        }
        Task::Complete | Task::Robust | Task::QComplete | Task::QRobust => {
            let quantized = matches!(cfg.task, Task::QComplete | Task::QRobust);
            if quantized && d.delta.is_none() && !d.one_bit {
                return Err(ConfigError::MissingParameter("qcomplete/qrobust", "degrade.delta").into());
            }
            let obs = observe(
                &truth,
                d.sr,
                d.nr,
                d.sigma,
                if quantized { d.delta } else { None },
                if quantized { d.one_bit } else { false },
                observe_seed,
            )?;
            let solver_cfg = cfg.solver.build(truth.order(), cfg.seed)?;
            let backend = solver_cfg.backend.name().to_string();
            let start = Instant::now();
            let (l, noise, report) = match cfg.task {
                Task::Complete => {
                    let (l, r) = solve_gntc(&obs, &solver_cfg)?;
                    (l, None, r)
                }
                Task::Robust => {
                    let (l, e, r) = solve_gnrtc(&obs, &solver_cfg)?;
                    (l, Some(e), r)
                }
                Task::QComplete => {
                    let (l, r) = solve_gnqtc(&obs, &solver_cfg)?;
                    (l, None, r)
                }
                Task::QRobust => {
                    let (l, e, r) = solve_gnqrtc(&obs, &solver_cfg)?;
                    (l, Some(e), r)
                }
                _ => unreachable!(),
            };
            let secs = start.elapsed().as_secs_f64();
            write_tensor(&l, &recovered_path)?;
            if let Some(e) = noise {
                write_tensor(&e, &cfg.output_dir.join("noise.tnsr"))?;
            }
            rows.push(row_base(&cfg.task, backend, score(&l, &truth)?, secs));
            report_opt = Some(report);
        }
    }

    append_rows(&results_path, &rows)?;
    write_trace(&trace_path, report_opt.as_ref())?;
    Ok(RunSummary {
        rows,
        recovered_path,
    })
}

/// Exit-code wrapper: 0 on success, 2 when the input file is missing, 1 for
/// any other failure. Diagnostics go to stderr.
pub fn run_experiment(cfg: &ExperimentConfig) -> i32 {
    match run(cfg) {
        Ok(summary) => {
            for row in &summary.rows {
                println!("{}", row.to_csv());
            }
            0
        }
        Err(ExperimentError::MissingInput(p)) => {
            eprintln!("error: input tensor not found: {}", p.display());
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
