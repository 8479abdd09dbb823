//! `tenrec`: tensor compression and completion experiments.
//!
//! Subcommands mirror the experiment tasks (`compress`, `complete`, `robust`,
//! `qcomplete`, `qrobust`, `bench`); each accepts `--config <toml>` and flag
//! overrides for every field. `ingest` converts raster images into the tensor
//! file format. The `TENREC_THREADS` environment variable sets the worker
//! count for the parallel subproblem loops (default 1; results are identical
//! for any value).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tenrec_cli::config::{ExperimentConfig, Task};
use tenrec_cli::experiment::run_experiment;
use tenrec_cli::io::{ingest_image_stack, write_tensor, StackLayout};

#[derive(Parser)]
#[command(name = "tenrec", about = "Tensor compression and completion experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input tensor file (overrides the config).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dataset label written to results.csv.
    #[arg(long)]
    dataset: Option<String>,
    /// Master seed; every stage derives its own sub-seed from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Sampling ratio in [0, 1].
    #[arg(long)]
    sr: Option<f64>,
    /// Impulsive-noise corruption rate in [0, 1].
    #[arg(long)]
    nr: Option<f64>,
    /// Gaussian noise level.
    #[arg(long)]
    sigma: Option<f64>,
    /// Quantizer resolution (quantized tasks).
    #[arg(long)]
    delta: Option<f64>,
    /// Sign quantization instead of a uniform quantizer.
    #[arg(long)]
    one_bit: bool,
    /// Spectral penalty, e.g. l1, scad:3.7, lq:0.5.
    #[arg(long)]
    penalty: Option<String>,
    /// Noise penalty, same syntax as --penalty.
    #[arg(long)]
    noise_penalty: Option<String>,
    /// Noise structure: entrywise | tube.
    #[arg(long)]
    noise_structure: Option<String>,
    /// Robust trade-off weight (unquantized model).
    #[arg(long)]
    lambda: Option<f64>,
    /// Regularizer weight (quantized models).
    #[arg(long)]
    lambda1: Option<f64>,
    /// Noise weight (quantized models).
    #[arg(long)]
    lambda2: Option<f64>,
    /// Box bound on the recovered tensor (quantized models).
    #[arg(long)]
    alpha_box: Option<f64>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    rho_growth: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    /// Relative-change stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// SVD backend: exact | randomized.
    #[arg(long)]
    backend: Option<String>,
    /// Compression mode: fixed-rank | fixed-accuracy.
    #[arg(long)]
    mode: Option<String>,
    /// Target multilinear rank, comma separated (e.g. 10,10,10).
    #[arg(long, value_delimiter = ',')]
    rank: Option<Vec<usize>>,
    /// Per-mode sketch widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    sketch_size: Option<Vec<usize>>,
    /// Relative error target for fixed-accuracy compression.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Block size for fixed-accuracy compression.
    #[arg(long)]
    block: Option<usize>,
    /// Sketch oversampling columns.
    #[arg(long)]
    oversample: Option<usize>,
    /// Power iterations for the sketched subspaces.
    #[arg(long)]
    power_iters: Option<usize>,
    /// Mode processing order, comma separated.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// Per-mode rank cap for fixed-accuracy compression.
    #[arg(long, value_delimiter = ',')]
    max_rank: Option<Vec<usize>>,
    /// Sketch family: gaussian | uniform | kr-gaussian | kr-uniform | kronecker-srft.
    #[arg(long)]
    sketch_family: Option<String>,
    /// Compute the compressed core exactly instead of reusing the sketches.
    #[arg(long)]
    exact_core: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized Tucker compression of a tensor file.
    Compress(CommonArgs),
    /// Completion from exact partial observations.
    Complete(CommonArgs),
    /// Robust completion (impulsive noise absorbed by a sparse term).
    Robust(CommonArgs),
    /// Completion from dithered quantized measurements.
    Qcomplete(CommonArgs),
    /// Robust completion from dithered quantized measurements.
    Qrobust(CommonArgs),
    /// Deterministic-vs-randomized compression timing comparison.
    Bench(CommonArgs),
    /// Stack raster images into a tensor file.
    Ingest {
        /// Output tensor file.
        #[arg(long)]
        out: PathBuf,
        /// Treat frames as grayscale instead of RGB.
        #[arg(long)]
        grayscale: bool,
        /// Image files, equal sizes.
        images: Vec<PathBuf>,
    },
}

fn load_config(task: Task, args: &CommonArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?
        }
        None => {
            let input = args
                .input
                .clone()
                .ok_or_else(|| "either --config or --input is required".to_string())?;
            ExperimentConfig {
                task,
                input,
                dataset: None,
                output_dir: PathBuf::from("out"),
                seed: 0,
                degrade: Default::default(),
                solver: Default::default(),
                compress: Default::default(),
            }
        }
    };
    cfg.task = task;
    macro_rules! set {
        ($field:expr, $value:expr) => {
            if let Some(v) = $value.clone() {
                $field = v;
            }
        };
    }
    set!(cfg.input, args.input);
    set!(cfg.output_dir, args.out);
    if args.dataset.is_some() {
        cfg.dataset = args.dataset.clone();
    }
    set!(cfg.seed, args.seed);
    set!(cfg.degrade.sr, args.sr);
    set!(cfg.degrade.nr, args.nr);
    set!(cfg.degrade.sigma, args.sigma);
    if args.delta.is_some() {
        cfg.degrade.delta = args.delta;
    }
    if args.one_bit {
        cfg.degrade.one_bit = true;
    }
    set!(cfg.solver.penalty, args.penalty);
    set!(cfg.solver.noise_penalty, args.noise_penalty);
    set!(cfg.solver.noise_structure, args.noise_structure);
    if args.lambda.is_some() {
        cfg.solver.lambda = args.lambda;
    }
    set!(cfg.solver.lambda1, args.lambda1);
    set!(cfg.solver.lambda2, args.lambda2);
    set!(cfg.solver.alpha_box, args.alpha_box);
    set!(cfg.solver.rho0, args.rho0);
    set!(cfg.solver.rho_growth, args.rho_growth);
    set!(cfg.solver.rho_max, args.rho_max);
    set!(cfg.solver.tol, args.tol);
    set!(cfg.solver.max_iters, args.max_iters);
    set!(cfg.solver.backend, args.backend);
    set!(cfg.compress.mode, args.mode);
    if args.rank.is_some() {
        cfg.compress.rank = args.rank.clone();
    }
    if args.sketch_size.is_some() {
        cfg.compress.sketch_size = args.sketch_size.clone();
    }
    if args.epsilon.is_some() {
        cfg.compress.epsilon = args.epsilon;
    }
    set!(cfg.compress.block, args.block);
    set!(cfg.compress.oversample, args.oversample);
    set!(cfg.compress.power_iters, args.power_iters);
    if args.order.is_some() {
        cfg.compress.order = args.order.clone();
    }
    if args.max_rank.is_some() {
        cfg.compress.max_rank = args.max_rank.clone();
    }
    set!(cfg.compress.sketch_family, args.sketch_family);
    if args.exact_core {
        cfg.compress.exact_core = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("TENREC_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) => tenrec_core::par::set_thread_count(n),
            Err(_) => eprintln!("warning: ignoring non-numeric TENREC_THREADS={threads}"),
        }
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Compress(a) => dispatch(Task::Compress, a),
        Command::Complete(a) => dispatch(Task::Complete, a),
        Command::Robust(a) => dispatch(Task::Robust, a),
        Command::Qcomplete(a) => dispatch(Task::QComplete, a),
        Command::Qrobust(a) => dispatch(Task::QRobust, a),
        Command::Bench(a) => dispatch(Task::Bench, a),
        Command::Ingest {
            out,
            grayscale,
            images,
        } => {
            let layout = if grayscale {
                StackLayout::Grayscale
            } else {
                StackLayout::Rgb
            };
            match ingest_image_stack(&images, layout)
                .and_then(|t| write_tensor(&t, &out).map(|_| t))
            {
                Ok(t) => {
                    println!("wrote {} with shape {:?}", out.display(), t.shape());
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(task: Task, args: CommonArgs) -> i32 {
    match load_config(task, &args) {
        Ok(cfg) => run_experiment(&cfg),
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
