//! Synthetic signals: k-sparse vectors, smooth random textures, and the
//! two-class print-inspection surrogate (a reference print versus the same
//! print with a square defect).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::sensing::Signal;
use crate::smashed::ClassTemplates;

/// `k` distinct positions chosen by a partial Fisher–Yates shuffle, each set
/// to `±amplitude` with a fair sign.
pub fn gen_sparse(n: usize, k: usize, amplitude: f64, seed: u64) -> Result<Signal> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be > 0, got {amplitude}"
        )));
    }
    let mut s = Stream::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut values = vec![0.0; n];
    for i in 0..k {
        let j = i + s.below((n - i) as u64) as usize;
        idx.swap(i, j);
        values[idx[i]] = if s.coin() { -amplitude } else { amplitude };
    }
    Signal::new(values)
}

const TEXTURE_WAVES: usize = 16;
const TEXTURE_MAX_FREQ: f64 = 4.0;

/// Smooth random texture: 16 plane waves with frequencies up to 4 cycles
/// per image side and `1/(1+|f|)` amplitudes, affinely mapped onto
/// `[lo, hi]`. Row-major `h × w`.
pub fn texture(h: usize, w: usize, seed: u64, lo: f64, hi: f64) -> Vec<f64> {
    let mut s = Stream::new(seed);
    let waves: Vec<(f64, f64, f64, f64)> = (0..TEXTURE_WAVES)
        .map(|_| {
            let fy = (2.0 * s.uniform() - 1.0) * TEXTURE_MAX_FREQ;
            let fx = (2.0 * s.uniform() - 1.0) * TEXTURE_MAX_FREQ;
            let phase = std::f64::consts::TAU * s.uniform();
            let amp = 1.0 / (1.0 + fy.hypot(fx));
            (fy, fx, phase, amp)
        })
        .collect();
    let raw: Vec<f64> = (0..h * w)
        .map(|i| {
            let (r, c) = ((i / w) as f64 / h as f64, (i % w) as f64 / w as f64);
            waves
                .iter()
                .map(|&(fy, fx, ph, a)| a * (std::f64::consts::TAU * (fy * r + fx * c) + ph).cos())
                .sum()
        })
        .collect();
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    raw.into_iter()
        .map(|v| lo + (hi - lo) * (v - min) / span)
        .collect()
}

pub const OK_CLASS: &str = "ok";
pub const DEFECT_CLASS: &str = "defect";

/// Parameters of the print-inspection surrogate, echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintTaskParams {
    pub n: usize,
    pub defect_size: usize,
    pub defect_amplitude: f64,
    pub seed: u64,
}

impl Default for PrintTaskParams {
    fn default() -> Self {
        Self {
            n: 16384,
            defect_size: 24,
            defect_amplitude: 0.5,
            seed: 0,
        }
    }
}

/// Reference print (class `ok`) and a defective copy (class `defect`) with
/// a constant square patch added at some location. The defect template from
/// [`gen_print_task`] sits at a seeded location; [`PrintTask::trial`] draws a
/// fresh location per trial and returns the templates an inspector looking
/// for that defect would use.
#[derive(Clone, Debug)]
pub struct PrintTask {
    params: PrintTaskParams,
    side: usize,
    reference: Vec<f64>,
    location: (usize, usize),
    templates: ClassTemplates,
}

/// One trial's class templates and the clean instances to acquire.
#[derive(Clone, Debug)]
pub struct PrintTrial {
    pub location: (usize, usize),
    pub templates: ClassTemplates,
    pub instances: Vec<Signal>,
}

const TEXTURE_STREAM: u64 = 1;
const LOCATION_STREAM: u64 = 2;
const PRINT_LO: f64 = 0.1;
const PRINT_HI: f64 = 0.9;

pub fn gen_print_task(
    n: usize,
    defect_size: usize,
    defect_amplitude: f64,
    seed: u64,
) -> Result<PrintTask> {
    PrintTask::new(PrintTaskParams {
        n,
        defect_size,
        defect_amplitude,
        seed,
    })
}

impl PrintTask {
    pub fn new(params: PrintTaskParams) -> Result<Self> {
        let side = (params.n as f64).sqrt().round() as usize;
        if params.n == 0 || side * side != params.n {
            return Err(Error::InvalidParameter(format!(
                "n = {} is not a perfect square",
                params.n
            )));
        }
        if params.defect_size == 0 || params.defect_size > side {
            return Err(Error::InvalidParameter(format!(
                "defect_size must be in 1..={side}, got {}",
                params.defect_size
            )));
        }
        if !(params.defect_amplitude >= 0.0) || !params.defect_amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "defect_amplitude must be >= 0, got {}",
                params.defect_amplitude
            )));
        }
        let reference = texture(
            side,
            side,
            crate::rng::derive_seed(params.seed, &[TEXTURE_STREAM]),
            PRINT_LO,
            PRINT_HI,
        );
        let mut task = Self {
            side,
            location: (0, 0),
            templates: ClassTemplates::new(
                vec![OK_CLASS.into(), DEFECT_CLASS.into()],
                vec![reference.clone(), reference.clone()],
            )?,
            reference,
            params,
        };
        task.location = task.draw_location(crate::rng::derive_seed(
            task.params.seed,
            &[LOCATION_STREAM],
        ));
        task.templates = task.templates_at(task.location)?;
        Ok(task)
    }

    pub fn params(&self) -> &PrintTaskParams {
        &self.params
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    /// Top-left corner of the seeded defect.
    pub fn location(&self) -> (usize, usize) {
        self.location
    }

    pub fn templates(&self) -> &ClassTemplates {
        &self.templates
    }

    /// Uniform top-left corner with the patch fully inside the image.
    pub fn draw_location(&self, seed: u64) -> (usize, usize) {
        let span = (self.side - self.params.defect_size + 1) as u64;
        let mut s = Stream::new(seed);
        let r = s.below(span) as usize;
        let c = s.below(span) as usize;
        (r, c)
    }

    /// Reference plus the defect patch with top-left corner `(row, col)`.
    pub fn defective_at(&self, (row, col): (usize, usize)) -> Vec<f64> {
        let mut x = self.reference.clone();
        let d = self.params.defect_size;
        for r in row..(row + d).min(self.side) {
            for c in col..(col + d).min(self.side) {
                x[r * self.side + c] += self.params.defect_amplitude;
            }
        }
        x
    }

    fn templates_at(&self, location: (usize, usize)) -> Result<ClassTemplates> {
        ClassTemplates::new(
            vec![OK_CLASS.into(), DEFECT_CLASS.into()],
            vec![self.reference.clone(), self.defective_at(location)],
        )
    }

    /// A trial with a fresh defect location drawn from `seed`.
    pub fn trial(&self, seed: u64) -> Result<PrintTrial> {
        let location = self.draw_location(seed);
        let templates = self.templates_at(location)?;
        let instances = templates
            .classes()
            .iter()
            .zip(templates.templates())
            .map(|(c, t)| Ok(Signal::image(self.side, self.side, t.clone())?.with_label(c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(PrintTrial {
            location,
            templates,
            instances,
        })
    }
}
