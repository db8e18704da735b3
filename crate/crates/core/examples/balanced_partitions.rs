//! Enumerate balanced partitions and show how each shift splits the
//! aligned bit pairs.
//!
//! cargo run --example balanced_partitions

use sadd_bdd::fooling::{
    self, choose_p, enumerate_partitions, half, split_pairs, BalancedPartition,
};

fn main() -> anyhow::Result<()> {
    let n = 4;
    let all: Vec<_> = enumerate_partitions(n, half())?.collect();
    println!(
        "{} balanced partitions of the 2n = {} operand bits",
        all.len(),
        2 * n
    );

    let part = BalancedPartition::from_spec(n, "L=a3,a2,b1,b0", half())?;
    for p in 0..n {
        print!("{}", split_pairs(&part, p)?.to_text());
    }
    let choice = choose_p(&part);
    println!(
        "best shift p = {} splits {} pairs (n/4 met: {})",
        choice.p,
        choice.report.split_len(),
        choice.meets_bound
    );

    let worst = all
        .iter()
        .min_by_key(|p| fooling::sum_split_lower_bound(p).sum)
        .expect("non-empty");
    let sum = fooling::sum_split_lower_bound(worst);
    println!(
        "smallest split sum {} at {} (n^2/4 = {})",
        sum.sum,
        worst.to_spec(),
        sum.bound
    );

    let skewed = fooling::parse_omega("1/4")?;
    println!(
        "{} partitions with |L| near a quarter",
        enumerate_partitions(n, skewed)?.count()
    );
    Ok(())
}
