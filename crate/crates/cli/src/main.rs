//! `compana`: command-line front end for the compressive analysis toolkit.
//!
//! Exit status is 0 on success, 1 when a command fails at runtime and 2 for
//! usage errors.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use compana_core::harness::{run_tradeoff_with_workers, ExperimentConfig};
use compana_core::hashing::hash;
use compana_core::io::{
    format_vector, load_pgm, read_csmx, read_dataset, read_regression, read_templates, read_vector,
    write_csmx, write_templates,
};
use compana_core::reconstruction::{evaluate_reconstruction, ista, omp};
use compana_core::regression::{masked_ols, ols, relative_coefficient_error};
use compana_core::sensing::{acquire_noisy, Ensemble, Measurement, SensingMatrix, Signal};
use compana_core::smashed::{build_templates, classify};
use compana_core::HashKind;

#[derive(Parser)]
#[command(
    name = "compana",
    version,
    about = "Inference and leakage on compressed measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded sensing matrix in CSMX format.
    GenMatrix {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "gaussian")]
        ensemble: Ensemble,
        /// Write only the header; readers regenerate the entries from the seed.
        #[arg(long)]
        header_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compress a signal vector: y = Φx (+ gaussian noise).
    Acquire {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Noise seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover a sparse estimate from measurements; prints a JSON summary.
    Reconstruct {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Sparsity for OMP.
        #[arg(long)]
        k: Option<usize>,
        /// Regularisation weight for ISTA.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Ground-truth vector; adds error metrics to the summary.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Peak value for PSNR.
        #[arg(long)]
        peak: Option<f64>,
        /// Where to write the estimate as a vector file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build class-mean templates from a labelled dataset.
    Templates {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify measurements against templates without reconstruction.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        templates: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Perceptual hashes of PGM images.
    Hash {
        #[arg(long, value_enum, default_value = "dhash")]
        kind: Kind,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Least squares on a randomly masked copy of a regression dataset.
    RegressMask {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        mask_rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "gaussian")]
        ensemble: Ensemble,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the compression ratio and report utility against leakage.
    Tradeoff {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Omp,
    Ista,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ahash,
    Dhash,
    Phash,
}

impl From<Kind> for HashKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ahash => HashKind::AHash,
            Kind::Dhash => HashKind::DHash,
            Kind::Phash => HashKind::PHash,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenMatrix {
            seed,
            m,
            n,
            ensemble,
            header_only,
            out,
        } => {
            let matrix = SensingMatrix::generate(seed, m, n, ensemble)?;
            let mut buf = Vec::new();
            write_csmx(&matrix, &mut buf, !header_only)?;
            emit_bytes(out.as_deref(), &buf)
        }
        Command::Acquire {
            matrix,
            input,
            sigma,
            seed,
            out,
        } => {
            let matrix = load_matrix(&matrix)?;
            let x = Signal::new(read_vector(&input).with_context(|| path_ctx(&input))?)?;
            let y = acquire_noisy(&matrix, &x, sigma, seed)?;
            emit(out.as_deref(), &format_vector(&y.values))
        }
        Command::Reconstruct {
            matrix,
            input,
            algo,
            k,
            lambda,
            max_iters,
            tol,
            truth,
            peak,
            out,
        } => {
            let matrix = load_matrix(&matrix)?;
            let y = load_measurement(&matrix, &input)?;
            let (est, attack) = match algo {
                Algo::Omp => {
                    let Some(k) = k else {
                        bail!("--algo omp needs --k")
                    };
                    (omp(&matrix, &y, k)?, json!({ "algo": "omp", "k": k }))
                }
                Algo::Ista => {
                    let Some(lambda) = lambda else {
                        bail!("--algo ista needs --lambda")
                    };
                    (
                        ista(&matrix, &y, lambda, max_iters, tol)?,
                        json!({ "algo": "ista", "lambda": lambda, "max_iters": max_iters, "tol": tol }),
                    )
                }
            };
            let metrics = match truth {
                Some(path) => {
                    let x = Signal::new(read_vector(&path).with_context(|| path_ctx(&path))?)?;
                    Some(evaluate_reconstruction(&x, &est, peak)?)
                }
                None => None,
            };
            if let Some(path) = out.as_deref() {
                fs::write(path, format_vector(&est.values)).with_context(|| path_ctx(path))?;
            }
            let summary = json!({
                "attack": attack,
                "iterations": est.iterations,
                "residual_norm": est.residual_norm,
                "support": est.support,
                "metrics": metrics,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Templates { input, out } => {
            let dataset = read_dataset(&input).with_context(|| path_ctx(&input))?;
            let templates = build_templates(&dataset)?;
            match out {
                Some(path) => write_templates(&path, &templates).with_context(|| path_ctx(&path)),
                None => emit(None, &compana_core::io::format_templates(&templates)),
            }
        }
        Command::Classify {
            matrix,
            templates,
            input,
        } => {
            let matrix = load_matrix(&matrix)?;
            let templates = read_templates(&templates).with_context(|| path_ctx(&templates))?;
            let y = load_measurement(&matrix, &input)?;
            let result = classify(&y, &matrix, &templates)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(())
        }
        Command::Hash { kind, images } => {
            let single = images.len() == 1;
            let mut lines = String::new();
            for path in &images {
                let image = load_pgm(path).with_context(|| path_ctx(path))?;
                let h = hash(&image, kind.into());
                if single {
                    lines.push_str(&format!("{h}\n"));
                } else {
                    lines.push_str(&format!("{h}  {}\n", path.display()));
                }
            }
            emit(None, &lines)
        }
        Command::RegressMask {
            input,
            mask_rows,
            seed,
            ensemble,
            out,
        } => {
            let problem = read_regression(&input).with_context(|| path_ctx(&input))?;
            let mask = SensingMatrix::generate(seed, mask_rows, problem.observations(), ensemble)?;
            let raw = ols(&problem)?;
            let masked = masked_ols(&problem, &mask)?;
            let report = json!({
                "raw": raw,
                "masked": masked,
                "relative_coefficient_error": relative_coefficient_error(&masked.beta, &raw.beta),
            });
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&report)? + "\n"),
            )
        }
        Command::Tradeoff {
            config,
            seed,
            workers,
            out,
            csv,
        } => {
            let text = fs::read_to_string(&config).with_context(|| path_ctx(&config))?;
            let mut config = ExperimentConfig::parse(&text)?;
            if let Some(seed) = seed {
                config.master_seed = seed;
            }
            let report = run_tradeoff_with_workers(&config, workers)?;
            if let Some(path) = csv.as_deref() {
                fs::write(path, report.to_csv()).with_context(|| path_ctx(path))?;
            }
            emit(out.as_deref(), &report.to_json())
        }
    }
}

fn path_ctx(path: &Path) -> String {
    format!("reading {}", path.display())
}

fn load_matrix(path: &Path) -> Result<SensingMatrix> {
    let file = File::open(path).with_context(|| path_ctx(path))?;
    Ok(read_csmx(io::BufReader::new(file)).with_context(|| path_ctx(path))?)
}

fn load_measurement(matrix: &SensingMatrix, path: &Path) -> Result<Measurement> {
    let values = read_vector(path).with_context(|| path_ctx(path))?;
    Ok(Measurement::from_values(matrix, values, 0.0)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    emit_bytes(out, text.as_bytes())
}

fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}
