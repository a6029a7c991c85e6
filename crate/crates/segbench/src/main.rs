use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use segbench::config::RunConfig;
use segbench::dataset::{write_dataset, SyntheticSpec};
use segbench::error::{BenchError, Result};
use segbench::harness::{run_matrix, threads_from_env};
use segbench::io::read_json;
use segbench::report::{evaluate_dirs, format_table, write_eval_csv, write_results};
use segbench::service::{serve, ServiceConfig};

#[derive(Parser)]
#[command(name = "segbench", version, about = "Interactive segmentation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset.
    Gen {
        /// Synthetic dataset spec (JSON).
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        spec: Option<PathBuf>,
        /// Named preset: bimodal_disk, noisy_disk, colored_disk, disk_64, default.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment matrix.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to SEGBENCH_THREADS or the CPU count.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Score prediction masks against ground truth masks matched by file name.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Start the session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory with external masks (`external/manifest.json`) and UI files (`ui/`).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Snapshot sessions to this directory after every change.
        #[arg(long)]
        persist: Option<PathBuf>,
        #[arg(long)]
        cors_origin: Option<String>,
        /// Minutes before an idle session leaves memory.
        #[arg(long, default_value_t = 60)]
        ttl_minutes: u64,
    },
}

fn gen(spec: Option<PathBuf>, preset: Option<String>, out: &Path) -> Result<()> {
    let spec: SyntheticSpec = match (spec, preset) {
        (Some(path), _) => read_json(path)?,
        (None, Some(name)) => {
            SyntheticSpec::preset(&name).ok_or_else(|| BenchError::Config(format!("unknown preset {name:?}")))?
        }
        (None, None) => SyntheticSpec::default(),
    };
    let manifest = write_dataset(&spec, out)?;
    println!("wrote {} images to {}", manifest.images.len(), out.display());
    Ok(())
}

fn run(config: &Path, out: &Path, threads: Option<usize>) -> ExitCode {
    let prepared = match RunConfig::load(config).and_then(|c| c.prepare(config.parent().unwrap_or(Path::new(".")))) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = run_matrix(&prepared, threads.unwrap_or_else(threads_from_env));
    print!("{}", format_table(&result.summary));
    if let Err(e) = write_results(&result, out) {
        eprintln!("error: {e}");
        return ExitCode::from(if result.summary.failed_cells.is_empty() { 1 } else { 2 });
    }
    if result.summary.failed_cells.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{} cells failed", result.summary.failed_cells.len());
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen { spec, preset, out } => gen(spec, preset, &out),
        Command::Run { config, out, threads } => return run(&config, &out, threads),
        Command::Eval { gt, pred, out } => evaluate_dirs(&gt, &pred).and_then(|rows| {
            write_eval_csv(&rows, &out)?;
            let mean = rows.iter().map(|r| r.iou).sum::<f64>() / rows.len() as f64;
            println!("{} masks, mean IoU {mean:.4}", rows.len());
            Ok(())
        }),
        Command::Serve {
            port,
            data,
            persist,
            cors_origin,
            ttl_minutes,
        } => {
            let config = ServiceConfig {
                data_dir: data,
                persist_dir: persist,
                cors_origin,
                ttl: Duration::from_secs(ttl_minutes * 60),
            };
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
            rt.block_on(serve(config, port)).map_err(|e| BenchError::io("listener", e))
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
