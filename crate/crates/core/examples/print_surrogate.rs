//! Runs the print-inspection surrogate at a reduced trial count and prints
//! the JSON report.
//!
//! cargo run --release -p compana-core --example print_surrogate -- [trials] [attack_trials]

use compana_core::harness::{run_tradeoff, ExperimentConfig};

fn main() -> compana_core::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let mut config = ExperimentConfig::print_error_default();
    config.trials = args.next().unwrap_or(4);
    config.attack_trials = Some(args.next().unwrap_or(config.trials));
    config.record_timing = true;
    print!("{}", run_tradeoff(&config)?.to_json());
    Ok(())
}
