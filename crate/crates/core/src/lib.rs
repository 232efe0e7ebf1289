//! Compressive analysis toolkit.
//!
//! Draws inferences from compressed or encoded data without reconstructing
//! it, and measures how much a reconstruction attacker still recovers:
//!
//! * [`sensing`]: seeded random sensing matrices and acquisition `y = Φx + e`.
//! * [`reconstruction`]: OMP and ISTA attacks plus recovery metrics.
//! * [`smashed`]: nearest-template (maximum-likelihood) classification in
//!   measurement space.
//! * [`hashing`]: aHash, dHash and DCT pHash with Hamming comparisons.
//! * [`regression`]: least squares on raw and matrix-masked data.
//! * [`privacy`]: the Laplace mechanism.
//! * [`harness`]: utility-versus-leakage sweeps over the number of
//!   measurements.
//! * [`datasets`] and [`io`]: synthetic tasks and file formats.

pub mod datasets;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod io;
pub mod linalg;
pub mod privacy;
pub mod reconstruction;
pub mod regression;
pub mod rng;
pub mod sensing;
pub mod smashed;

pub use error::{Error, Result};
pub use harness::{run_tradeoff, ExperimentConfig, TradeoffReport};
pub use hashing::{GrayImage, HashKind, PerceptualHash};
pub use privacy::DpParams;
pub use reconstruction::{ReconMetrics, SparseEstimate};
pub use regression::{RegressionFit, RegressionProblem};
pub use sensing::{Ensemble, MatrixId, Measurement, SensingMatrix, Signal};
pub use smashed::{ClassTemplates, ClassificationResult};
