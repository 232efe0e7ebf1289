//! Experiment configuration and its flat `key = value` file format.
//!
//! Blank lines and `#` comments are ignored. Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `n` | signal dimension | required |
//! | `m_sweep` | comma list of measurement counts, strictly increasing | required |
//! | `ensemble` | `gaussian`, `bernoulli`, `identity`, `orthonormal` | `gaussian` |
//! | `sigma` | measurement noise std | `0` |
//! | `snr_db` | per-acquisition measurement SNR (replaces `sigma`) | unset |
//! | `trials` | Monte-Carlo trials per sweep point | `1` |
//! | `attack_trials` | trials (from the first) that also run the attack | `trials` |
//! | `master_seed` | root of every derived seed | `0` |
//! | `attack` | `omp`, `ista` or `best` (both, keep the better) | `best` |
//! | `omp_k` | integer or `m/2` | `m/2` |
//! | `ista_lambdas` | comma list of λ | unset |
//! | `ista_lambda_logspace` | `lo,hi,count` | `0.001,10,9` |
//! | `ista_max_iters` | ISTA iteration cap | `500` |
//! | `ista_tol` | ISTA max-norm step tolerance | `1e-6` |
//! | `task` | `sparse_synthetic`, `two_class_print`, `pgm_dir`, `csv` | required |
//! | `task_seed` | generator seed for synthetic tasks | `0` |
//! | `sparse_k`, `sparse_amplitude` | sparse task parameters | `5`, `1` |
//! | `defect_size`, `defect_amplitude` | print task parameters | `24`, `0.5` |
//! | `pgm_dir`, `labels_csv` | image-directory task inputs | required for `pgm_dir` |
//! | `csv_path` | dataset CSV for the `csv` task | required for `csv` |
//! | `dp_epsilon`, `dp_sensitivity` | Laplace noise on measurements | unset |
//! | `record_timing` | store per-row wall time (breaks byte-identical reports) | `false` |

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::privacy::DpParams;
use crate::sensing::Ensemble;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    Sigma(f64),
    /// `σ = ‖Φx‖₂ / (√m · 10^(snr/20))`, evaluated per acquisition.
    SnrDb(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmpSparsity {
    Fixed(usize),
    HalfM,
}

impl OmpSparsity {
    pub fn resolve(self, m: usize) -> usize {
        match self {
            OmpSparsity::Fixed(k) => k,
            OmpSparsity::HalfM => (m / 2).max(1),
        }
    }
}

impl Serialize for OmpSparsity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OmpSparsity::Fixed(k) => s.serialize_u64(*k as u64),
            OmpSparsity::HalfM => s.serialize_str("m/2"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IstaSettings {
    pub lambdas: Vec<f64>,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for IstaSettings {
    fn default() -> Self {
        Self {
            lambdas: logspace(1e-3, 1e1, 9),
            max_iters: 500,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackSpec {
    Omp {
        k: OmpSparsity,
    },
    Ista(IstaSettings),
    /// Run both and keep whichever reconstruction is closer to the truth.
    Best {
        k: OmpSparsity,
        ista: IstaSettings,
    },
}

impl AttackSpec {
    pub fn omp_k(&self) -> Option<OmpSparsity> {
        match self {
            AttackSpec::Omp { k } | AttackSpec::Best { k, .. } => Some(*k),
            AttackSpec::Ista(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskSpec {
    /// Two classes, each a seeded k-sparse ±amplitude template.
    SparseSynthetic {
        k: usize,
        amplitude: f64,
        seed: u64,
    },
    TwoClassPrint {
        defect_size: usize,
        defect_amplitude: f64,
        seed: u64,
    },
    PgmDir {
        dir: PathBuf,
        labels_csv: PathBuf,
    },
    Csv {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m_sweep: Vec<usize>,
    pub ensemble: Ensemble,
    pub noise: NoiseModel,
    pub trials: usize,
    pub attack_trials: Option<usize>,
    pub master_seed: u64,
    pub attack: AttackSpec,
    pub task: TaskSpec,
    pub dp: Option<DpParams>,
    pub record_timing: bool,
}

/// `count` points from `lo` to `hi` evenly spaced in log10.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect()
        }
    }
}

impl ExperimentConfig {
    /// The print-inspection surrogate at n = 16384 (128×128), m = 160,
    /// gaussian Φ, 20 dB measurement SNR, best-of OMP(m/2) and a 9-point
    /// ISTA λ grid.
    pub fn print_error_default() -> Self {
        Self {
            n: 16384,
            m_sweep: vec![160],
            ensemble: Ensemble::Gaussian,
            noise: NoiseModel::SnrDb(20.0),
            trials: 500,
            attack_trials: None,
            master_seed: 2024,
            attack: AttackSpec::Best {
                k: OmpSparsity::HalfM,
                ista: IstaSettings::default(),
            },
            task: TaskSpec::TwoClassPrint {
                defect_size: 24,
                defect_amplitude: 0.5,
                seed: 7,
            },
            dp: None,
            record_timing: false,
        }
    }

    pub fn attack_trials(&self) -> usize {
        self.attack_trials.unwrap_or(self.trials).min(self.trials)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if self.m_sweep.is_empty() {
            return bad("m_sweep is empty".into());
        }
        if self.m_sweep.windows(2).any(|w| w[0] >= w[1]) {
            return bad("m_sweep must be strictly increasing".into());
        }
        if let Some(&m) = self.m_sweep.iter().find(|&&m| m == 0 || m > self.n) {
            return bad(format!("m = {m} outside 1..={}", self.n));
        }
        if self.ensemble == Ensemble::Identity && self.m_sweep.iter().any(|&m| m != self.n) {
            return bad("identity ensemble only supports m = n".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        match self.noise {
            NoiseModel::Sigma(s) if !(s >= 0.0) || !s.is_finite() => {
                return bad(format!("sigma {s} < 0"))
            }
            NoiseModel::SnrDb(s) if !s.is_finite() => return bad("snr_db must be finite".into()),
            _ => {}
        }
        if let Some(OmpSparsity::Fixed(0)) = self.attack.omp_k() {
            return bad("omp_k must be >= 1".into());
        }
        if let AttackSpec::Ista(s) | AttackSpec::Best { ista: s, .. } = &self.attack {
            if s.lambdas.is_empty() || s.lambdas.iter().any(|l| !(*l > 0.0)) {
                return bad("ISTA lambdas must be non-empty and positive".into());
            }
            if s.max_iters == 0 || !(s.tol > 0.0) {
                return bad("ista_max_iters and ista_tol must be positive".into());
            }
        }
        match &self.task {
            TaskSpec::SparseSynthetic { k, amplitude, .. } => {
                if *k == 0 || *k > self.n || !(*amplitude > 0.0) {
                    return bad(
                        "sparse task needs 1 <= sparse_k <= n and sparse_amplitude > 0".into(),
                    );
                }
            }
            TaskSpec::TwoClassPrint {
                defect_size,
                defect_amplitude,
                ..
            } => {
                let side = (self.n as f64).sqrt().round() as usize;
                if side * side != self.n {
                    return bad(format!("two_class_print needs a square n, got {}", self.n));
                }
                if *defect_size == 0 || *defect_size > side || !(*defect_amplitude >= 0.0) {
                    return bad(
                        "print task needs 1 <= defect_size <= sqrt(n), defect_amplitude >= 0"
                            .into(),
                    );
                }
            }
            TaskSpec::PgmDir { .. } | TaskSpec::Csv { .. } => {}
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "line {}: unknown key {key:?}",
                    i + 1
                )));
            }
            if kv.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key {key:?}",
                    i + 1
                )));
            }
        }
        let cfg = Parsed(kv).build()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "n",
    "m_sweep",
    "ensemble",
    "sigma",
    "snr_db",
    "trials",
    "attack_trials",
    "master_seed",
    "attack",
    "omp_k",
    "ista_lambdas",
    "ista_lambda_logspace",
    "ista_max_iters",
    "ista_tol",
    "task",
    "task_seed",
    "sparse_k",
    "sparse_amplitude",
    "defect_size",
    "defect_amplitude",
    "pgm_dir",
    "labels_csv",
    "csv_path",
    "dp_epsilon",
    "dp_sensitivity",
    "record_timing",
];

struct Parsed(BTreeMap<String, String>);

impl Parsed {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("bad value for {key}: {v:?}")))
            })
            .transpose()
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Config(format!("missing required key {key}")))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<T>()
                            .map_err(|_| Error::Config(format!("bad entry in {key}: {p:?}")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn build(&self) -> Result<ExperimentConfig> {
        let n: usize = self.require("n")?;
        let m_sweep = self
            .list("m_sweep")?
            .ok_or_else(|| Error::Config("missing required key m_sweep".into()))?;
        let ensemble: Ensemble = self.get("ensemble")?.unwrap_or(Ensemble::Gaussian);
        let noise = match (self.get::<f64>("sigma")?, self.get::<f64>("snr_db")?) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("set either sigma or snr_db, not both".into()))
            }
            (_, Some(snr)) => NoiseModel::SnrDb(snr),
            (s, None) => NoiseModel::Sigma(s.unwrap_or(0.0)),
        };
        let omp_k = match self.raw("omp_k") {
            None | Some("m/2") => OmpSparsity::HalfM,
            Some(_) => OmpSparsity::Fixed(self.require("omp_k")?),
        };
        let lambdas = match (
            self.list::<f64>("ista_lambdas")?,
            self.list::<f64>("ista_lambda_logspace")?,
        ) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set either ista_lambdas or ista_lambda_logspace".into(),
                ))
            }
            (Some(l), None) => l,
            (None, Some(spec)) => match spec.as_slice() {
                [lo, hi, count] if *count >= 1.0 && count.fract() == 0.0 => {
                    logspace(*lo, *hi, *count as usize)
                }
                _ => return Err(Error::Config("ista_lambda_logspace is lo,hi,count".into())),
            },
            (None, None) => IstaSettings::default().lambdas,
        };
        let ista = IstaSettings {
            lambdas,
            max_iters: self.get("ista_max_iters")?.unwrap_or(500),
            tol: self.get("ista_tol")?.unwrap_or(1e-6),
        };
        let attack = match self.raw("attack").unwrap_or("best") {
            "omp" => AttackSpec::Omp { k: omp_k },
            "ista" => AttackSpec::Ista(ista),
            "best" => AttackSpec::Best { k: omp_k, ista },
            other => return Err(Error::Config(format!("unknown attack {other:?}"))),
        };
        let task_seed: u64 = self.get("task_seed")?.unwrap_or(0);
        let task = match self
            .raw("task")
            .ok_or_else(|| Error::Config("missing required key task".into()))?
        {
            "sparse_synthetic" => TaskSpec::SparseSynthetic {
                k: self.get("sparse_k")?.unwrap_or(5),
                amplitude: self.get("sparse_amplitude")?.unwrap_or(1.0),
                seed: task_seed,
            },
            "two_class_print" => TaskSpec::TwoClassPrint {
                defect_size: self.get("defect_size")?.unwrap_or(24),
                defect_amplitude: self.get("defect_amplitude")?.unwrap_or(0.5),
                seed: task_seed,
            },
            "pgm_dir" => TaskSpec::PgmDir {
                dir: self.require::<String>("pgm_dir")?.into(),
                labels_csv: self.require::<String>("labels_csv")?.into(),
            },
            "csv" => TaskSpec::Csv {
                path: self.require::<String>("csv_path")?.into(),
            },
            other => return Err(Error::Config(format!("unknown task {other:?}"))),
        };
        let dp = match (
            self.get::<f64>("dp_epsilon")?,
            self.get::<f64>("dp_sensitivity")?,
        ) {
            (Some(e), Some(s)) => {
                Some(DpParams::new(e, s).map_err(|e| Error::Config(e.to_string()))?)
            }
            (None, None) => None,
            _ => {
                return Err(Error::Config(
                    "dp_epsilon and dp_sensitivity go together".into(),
                ))
            }
        };
        Ok(ExperimentConfig {
            n,
            m_sweep,
            ensemble,
            noise,
            trials: self.get("trials")?.unwrap_or(1),
            attack_trials: self.get("attack_trials")?,
            master_seed: self.get("master_seed")?.unwrap_or(0),
            attack,
            task,
            dp,
            record_timing: self.get("record_timing")?.unwrap_or(false),
        })
    }
}
