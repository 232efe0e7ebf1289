//! Classification directly on measurements ("smashed filter"): pick the
//! class whose compressed template `Φt_c` is nearest to `y`. Under
//! isotropic gaussian measurement noise with known templates this is the
//! maximum-likelihood decision.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rng::Stream;
use crate::sensing::{Measurement, SensingMatrix, Signal};

/// One template (class mean) per class, in a fixed class order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTemplates {
    classes: Vec<String>,
    templates: Vec<Vec<f64>>,
}

impl ClassTemplates {
    pub fn new(classes: Vec<String>, templates: Vec<Vec<f64>>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "need >= 2 classes, got {}",
                classes.len()
            )));
        }
        check_len(classes.len(), templates.len())?;
        let n = templates[0].len();
        if n == 0 {
            return Err(Error::InvalidDataset("templates must be non-empty".into()));
        }
        for t in &templates {
            check_len(n, t.len())?;
        }
        for (i, c) in classes.iter().enumerate() {
            if classes[..i].contains(c) {
                return Err(Error::InvalidDataset(format!("duplicate class id {c:?}")));
            }
        }
        Ok(Self { classes, templates })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn templates(&self) -> &[Vec<f64>] {
        &self.templates
    }

    pub fn dim(&self) -> usize {
        self.templates[0].len()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    pub fn template(&self, class: &str) -> Option<&[f64]> {
        self.index_of(class).map(|i| self.templates[i].as_slice())
    }

    /// `Φt_c` for every class.
    pub fn compress(&self, matrix: &SensingMatrix) -> Result<CompressedTemplates> {
        check_len(matrix.cols(), self.dim())?;
        let refs: Vec<&[f64]> = self.templates.iter().map(|t| t.as_slice()).collect();
        Ok(CompressedTemplates {
            classes: self.classes.clone(),
            vectors: matrix.apply_many(&refs),
        })
    }
}

/// Class means, in order of first appearance of each label.
pub fn build_templates(dataset: &[Signal]) -> Result<ClassTemplates> {
    let first = dataset
        .first()
        .ok_or_else(|| Error::InvalidDataset("empty dataset".into()))?;
    let n = first.len();
    let mut classes: Vec<String> = Vec::new();
    let mut sums: Vec<Vec<f64>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for (i, s) in dataset.iter().enumerate() {
        check_len(n, s.len())?;
        let label = s
            .label
            .as_deref()
            .ok_or_else(|| Error::InvalidDataset(format!("sample {i} has no label")))?;
        let c = match classes.iter().position(|c| c == label) {
            Some(c) => c,
            None => {
                classes.push(label.to_string());
                sums.push(vec![0.0; n]);
                counts.push(0);
                classes.len() - 1
            }
        };
        for (a, v) in sums[c].iter_mut().zip(&s.values) {
            *a += v;
        }
        counts[c] += 1;
    }
    if classes.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need samples from >= 2 classes, got {}",
            classes.len()
        )));
    }
    let templates = sums
        .into_iter()
        .zip(counts)
        .map(|(s, k)| s.into_iter().map(|v| v / k as f64).collect())
        .collect();
    ClassTemplates::new(classes, templates)
}

/// Templates already pushed through a sensing matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedTemplates {
    classes: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl CompressedTemplates {
    pub fn new(classes: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        check_len(classes.len(), vectors.len())?;
        if classes.len() < 2 {
            return Err(Error::InvalidDataset("need >= 2 classes".into()));
        }
        let m = vectors[0].len();
        for v in &vectors {
            check_len(m, v.len())?;
        }
        Ok(Self { classes, vectors })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Nearest compressed template; ties go to the lowest class index.
    pub fn classify_values(&self, y: &[f64]) -> Result<ClassificationResult> {
        check_len(self.vectors[0].len(), y.len())?;
        let scores: Vec<f64> = self
            .vectors
            .iter()
            .map(|t| {
                t.iter()
                    .zip(y)
                    .map(|(a, b)| (b - a) * (b - a))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            if s < scores[best] {
                best = c;
            }
        }
        let runner_up = scores
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != best)
            .map(|(_, &s)| s)
            .fold(f64::INFINITY, f64::min);
        Ok(ClassificationResult {
            label: self.classes[best].clone(),
            index: best,
            margin: runner_up - scores[best],
            scores,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub label: String,
    pub index: usize,
    /// `‖y − Φt_c‖₂` per class, in template order.
    pub scores: Vec<f64>,
    /// Runner-up distance minus winning distance.
    pub margin: f64,
}

pub fn classify(
    y: &Measurement,
    matrix: &SensingMatrix,
    templates: &ClassTemplates,
) -> Result<ClassificationResult> {
    check_len(matrix.rows(), y.len())?;
    templates.compress(matrix)?.classify_values(&y.values)
}

/// Fraction of correct labels over `trials` noisy acquisitions of every
/// dataset sample. Trial `t` draws its noise, sample by sample, from
/// `Stream::new(seed + t)`, so the result does not depend on how trials are
/// scheduled.
pub fn evaluate_accuracy(
    dataset: &[Signal],
    matrix: &SensingMatrix,
    templates: &ClassTemplates,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::InvalidDataset("empty dataset".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    let compressed = templates.compress(matrix)?;
    let mut truth = Vec::with_capacity(dataset.len());
    let mut clean = Vec::with_capacity(dataset.len());
    for (i, s) in dataset.iter().enumerate() {
        check_len(matrix.cols(), s.len())?;
        let label = s
            .label
            .as_deref()
            .ok_or_else(|| Error::InvalidDataset(format!("sample {i} has no label")))?;
        let c = templates
            .index_of(label)
            .ok_or_else(|| Error::InvalidDataset(format!("label {label:?} has no template")))?;
        truth.push(c);
        clean.push(matrix.apply(&s.values));
    }
    let mut correct = 0usize;
    for t in 0..trials {
        let mut noise = Stream::new(seed.wrapping_add(t as u64));
        for (y0, &c) in clean.iter().zip(&truth) {
            let y: Vec<f64> = y0.iter().map(|v| v + sigma * noise.gaussian()).collect();
            if compressed.classify_values(&y)?.index == c {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / (trials * dataset.len()) as f64)
}
