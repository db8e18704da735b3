//! The proven width bound next to the plotted series, and the exact
//! minimum over every order at n = 2.
//!
//! cargo run --release --example lower_bounds

use sadd_bdd::harness::{self, exhaustive_minimum, Target};

fn main() -> anyhow::Result<()> {
    println!("n  ceil(2^(n/4))  plotted  2^(n/2-1)");
    for b in harness::lower_bound_curve(&[2, 4, 8, 16, 32]) {
        let plotted = b.figure.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{:<2} {:<14} {:<8} {}",
            b.n, b.proven, plotted, b.half_exponent
        );
    }
    for target in [Target::MsbOnly, Target::AllOutputs] {
        let m = exhaustive_minimum(2, target)?;
        println!(
            "n=2 {target}: best of all orders size {} width {}",
            m.size, m.width
        );
    }
    Ok(())
}
