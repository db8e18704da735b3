//! Compare sampled minima with the reference plot and print the
//! counting-convention diagnostic where they disagree.
//!
//! cargo run --release --example figure_comparison -- 8

use sadd_bdd::harness::{self, ExperimentConfig, Target};

fn main() -> anyhow::Result<()> {
    let max_n: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(8);
    let n_values = [2, 4, 8, 16].into_iter().filter(|&n| n <= max_n).collect();
    let result =
        harness::run_experiment(&ExperimentConfig::new(n_values, 50, 0, Target::AllOutputs))?;
    for c in harness::compare_with_figure(&result)? {
        println!(
            "n={:<2} width {:>6} vs {:<5} size {:>7} vs {:<6} above bound {} within x2 {}",
            c.n,
            c.min_width,
            c.reference_width,
            c.min_size,
            c.reference_size,
            c.exceeds_bound,
            c.within_factor_two
        );
        if let Some(d) = c.diagnostic {
            println!("     {d}");
        }
    }
    Ok(())
}
