//! Fixtures shared by the criterion benchmarks.

use compana_core::datasets::{gen_print_task, gen_sparse, texture};
use compana_core::sensing::{acquire, Ensemble, Measurement, SensingMatrix, Signal};
use compana_core::GrayImage;

/// Gaussian matrix and the noiseless measurement of a k-sparse signal.
pub fn sparse_instance(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
) -> (SensingMatrix, Signal, Measurement) {
    let matrix = SensingMatrix::generate(seed, m, n, Ensemble::Gaussian).expect("valid dims");
    let x = gen_sparse(n, k, 1.0, seed ^ 0xA5A5).expect("valid sparsity");
    let y = acquire(&matrix, &x).expect("matching dims");
    (matrix, x, y)
}

/// The print-inspection reference image as a signal of length `side²`.
pub fn print_reference(side: usize) -> Signal {
    let task = gen_print_task(side * side, side / 5, 0.5, 1).expect("square task");
    Signal::new(task.reference().to_vec()).expect("finite")
}

pub fn texture_image(side: usize, seed: u64) -> GrayImage {
    GrayImage::new(side, side, texture(side, side, seed, 0.1, 0.9)).expect("valid image")
}
