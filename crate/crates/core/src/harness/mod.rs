//! Utility-versus-leakage sweep over the number of measurements.
//!
//! For every `m` and trial `t`, the analyser classifies noisy compressed
//! acquisitions with the smashed filter while an attacker who knows `Φ`
//! reconstructs one of the acquired signals. Every random draw comes from a
//! seed derived from `(master_seed, stream, m, trial, …)`, and per-trial
//! outcomes are joined in trial order, so reports do not depend on how many
//! workers ran them.

mod config;
mod report;

use std::borrow::Cow;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{
    logspace, AttackSpec, ExperimentConfig, IstaSettings, NoiseModel, OmpSparsity, TaskSpec,
};
pub use report::{TradeoffReport, TradeoffRow};

use crate::datasets::{gen_sparse, PrintTask, PrintTaskParams};
use crate::error::{Error, Result};
use crate::io::{load_pgm_dir, read_dataset};
use crate::linalg::{median, norm2};
use crate::privacy::laplace_perturb;
use crate::reconstruction::{evaluate_reconstruction, ista_path, omp, SparseEstimate};
use crate::rng::derive_seed;
use crate::sensing::{add_gaussian_noise, Measurement, SensingMatrix, Signal};
use crate::smashed::{build_templates, ClassTemplates};

const MATRIX_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const DP_STREAM: u64 = 3;
const TASK_STREAM: u64 = 4;

enum PreparedTask {
    Fixed {
        templates: ClassTemplates,
        instances: Vec<Signal>,
        peak: Option<f64>,
    },
    Print(PrintTask),
}

impl PreparedTask {
    fn prepare(config: &ExperimentConfig) -> Result<Self> {
        let fixed = |instances: Vec<Signal>, peak| -> Result<Self> {
            if let Some(bad) = instances.iter().find(|s| s.len() != config.n) {
                return Err(Error::Config(format!(
                    "dataset dimension {} != n = {}",
                    bad.len(),
                    config.n
                )));
            }
            let templates = build_templates(&instances)?;
            Ok(PreparedTask::Fixed {
                templates,
                instances,
                peak,
            })
        };
        match &config.task {
            TaskSpec::SparseSynthetic { k, amplitude, seed } => {
                let instances = (0..2u64)
                    .map(|c| {
                        Ok(
                            gen_sparse(config.n, *k, *amplitude, derive_seed(*seed, &[c]))?
                                .with_label(format!("class{c}")),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                fixed(instances, Some(*amplitude))
            }
            TaskSpec::TwoClassPrint {
                defect_size,
                defect_amplitude,
                seed,
            } => Ok(PreparedTask::Print(PrintTask::new(PrintTaskParams {
                n: config.n,
                defect_size: *defect_size,
                defect_amplitude: *defect_amplitude,
                seed: *seed,
            })?)),
            TaskSpec::PgmDir { dir, labels_csv } => {
                fixed(load_pgm_dir(dir, labels_csv)?, Some(1.0))
            }
            TaskSpec::Csv { path } => fixed(read_dataset(path)?, None),
        }
    }

    fn trial(
        &self,
        seed: u64,
    ) -> Result<(Cow<'_, ClassTemplates>, Cow<'_, [Signal]>, Option<f64>)> {
        match self {
            PreparedTask::Fixed {
                templates,
                instances,
                peak,
            } => Ok((
                Cow::Borrowed(templates),
                Cow::Borrowed(instances.as_slice()),
                *peak,
            )),
            PreparedTask::Print(task) => {
                let t = task.trial(seed)?;
                Ok((Cow::Owned(t.templates), Cow::Owned(t.instances), Some(1.0)))
            }
        }
    }
}

struct TrialOutcome {
    accuracy: f64,
    leakage: Option<(f64, Option<f64>)>,
}

fn run_trial(
    config: &ExperimentConfig,
    task: &PreparedTask,
    m: usize,
    t: usize,
    attack: bool,
) -> Result<TrialOutcome> {
    let (master, mu, tu) = (config.master_seed, m as u64, t as u64);
    let matrix = SensingMatrix::generate(
        derive_seed(master, &[MATRIX_STREAM, mu, tu]),
        m,
        config.n,
        config.ensemble,
    )?;
    let (templates, instances, peak) = task.trial(derive_seed(master, &[TASK_STREAM, tu]))?;
    let compressed = templates.compress(&matrix)?;

    let mut correct = 0usize;
    let mut measurements = Vec::with_capacity(instances.len());
    for (i, x) in instances.iter().enumerate() {
        let iu = i as u64;
        let mut y = matrix.apply(&x.values);
        let sigma = match config.noise {
            NoiseModel::Sigma(s) => s,
            NoiseModel::SnrDb(snr) => norm2(&y) / ((m as f64).sqrt() * 10f64.powf(snr / 20.0)),
        };
        if sigma > 0.0 {
            add_gaussian_noise(
                &mut y,
                sigma,
                derive_seed(master, &[NOISE_STREAM, mu, tu, iu]),
            );
        }
        if let Some(dp) = &config.dp {
            y = laplace_perturb(&y, dp, derive_seed(master, &[DP_STREAM, mu, tu, iu]));
        }
        let label = x.label.as_deref().expect("task instances are labelled");
        if compressed.classify_values(&y)?.label == label {
            correct += 1;
        }
        measurements.push(Measurement::from_values(&matrix, y, sigma)?);
    }
    let accuracy = correct as f64 / instances.len() as f64;

    let leakage = if attack {
        let target = t % instances.len();
        let est = run_attack(
            &config.attack,
            &matrix,
            &measurements[target],
            &instances[target],
        )?;
        let metrics = evaluate_reconstruction(&instances[target], &est, peak)?;
        Some((metrics.relative_l2, metrics.psnr_db))
    } else {
        None
    };
    Ok(TrialOutcome { accuracy, leakage })
}

/// The attacker's estimate: for grids and `best`, the candidate with the
/// smallest relative error against the truth (an upper bound on what a real
/// attacker could select).
fn run_attack(
    attack: &AttackSpec,
    matrix: &SensingMatrix,
    y: &Measurement,
    truth: &Signal,
) -> Result<SparseEstimate> {
    let mut candidates = Vec::new();
    if let Some(k) = attack.omp_k() {
        candidates.push(omp(matrix, y, k.resolve(matrix.rows()))?);
    }
    if let AttackSpec::Ista(s) | AttackSpec::Best { ista: s, .. } = attack {
        candidates.extend(ista_path(matrix, y, &s.lambdas, s.max_iters, s.tol)?);
    }
    let err = |e: &SparseEstimate| {
        e.values
            .iter()
            .zip(&truth.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    };
    let mut best = candidates.remove(0);
    let mut best_err = err(&best);
    for c in candidates {
        let e = err(&c);
        if e < best_err {
            best = c;
            best_err = e;
        }
    }
    Ok(best)
}

fn describe_attack(attack: &AttackSpec, m: usize) -> String {
    let ista =
        |s: &IstaSettings| format!("ista({} lambdas, {} iters)", s.lambdas.len(), s.max_iters);
    match attack {
        AttackSpec::Omp { k } => format!("omp(k={})", k.resolve(m)),
        AttackSpec::Ista(s) => ista(s),
        AttackSpec::Best { k, ista: s } => format!("best(omp(k={}), {})", k.resolve(m), ista(s)),
    }
}

fn sweep_point(config: &ExperimentConfig, task: &PreparedTask, m: usize) -> Result<TradeoffRow> {
    let start = Instant::now();
    let attack_trials = config.attack_trials();
    let ratio = m as f64 / config.n as f64;
    let mut row = TradeoffRow {
        m,
        ratio,
        utility_accuracy_mean: None,
        utility_accuracy_std: None,
        leakage_relative_l2_median: None,
        leakage_psnr_median: None,
        attack_used: None,
        wall_time_s: None,
        skipped: None,
    };
    if attack_trials > 0 {
        if let Some(k) = config.attack.omp_k() {
            let k = k.resolve(m);
            if k > m {
                row.skipped = Some(format!("omp_k = {k} exceeds m = {m}"));
                return Ok(row);
            }
        }
        row.attack_used = Some(describe_attack(&config.attack, m));
    }

    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, task, m, t, t < attack_trials))
        .collect::<Result<Vec<_>>>()?;

    let n = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.accuracy).sum::<f64>() / n;
    let std = if outcomes.len() > 1 {
        (outcomes
            .iter()
            .map(|o| (o.accuracy - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    row.utility_accuracy_mean = Some(mean);
    row.utility_accuracy_std = Some(std);
    let rel: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.leakage.map(|l| l.0))
        .collect();
    let psnr: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.leakage.and_then(|l| l.1))
        .collect();
    row.leakage_relative_l2_median = median(&rel);
    row.leakage_psnr_median = median(&psnr);
    if config.record_timing {
        row.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(row)
}

/// Runs the sweep on the current rayon pool.
pub fn run_tradeoff(config: &ExperimentConfig) -> Result<TradeoffReport> {
    config.validate()?;
    let task = PreparedTask::prepare(config)?;
    let rows = config
        .m_sweep
        .iter()
        .map(|&m| sweep_point(config, &task, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffReport {
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        rows,
    })
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_tradeoff_with_workers(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<TradeoffReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_tradeoff(config))
}

/// Smallest `m` in the sweep whose mean accuracy reaches `target`.
pub fn min_components(config: &ExperimentConfig, target_accuracy: f64) -> Result<Option<usize>> {
    if !(target_accuracy > 0.0 && target_accuracy <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target accuracy {target_accuracy} outside (0, 1]"
        )));
    }
    Ok(run_tradeoff(config)?.min_components(target_accuracy))
}
