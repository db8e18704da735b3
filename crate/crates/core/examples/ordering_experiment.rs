//! Random-ordering experiment with CSV output.
//!
//! cargo run --release --example ordering_experiment -- out.csv

use std::path::PathBuf;

use sadd_bdd::harness::{self, ExperimentConfig, Target};

fn main() -> anyhow::Result<()> {
    env_logger::init();
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sadd_orderings.csv"));

    for target in [Target::MsbOnly, Target::AllOutputs] {
        let config = ExperimentConfig::new(vec![2, 4, 6, 8], 20, 42, target);
        let result = harness::run_experiment(&config)?;
        println!("{target}");
        print!("{}", harness::summary_csv(&result.summary));
        if target == Target::AllOutputs {
            harness::emit_csv(&result.records, &out)?;
            println!("wrote {} rows to {}", result.records.len(), out.display());
        }
    }
    Ok(())
}
