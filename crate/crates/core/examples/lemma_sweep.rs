//! Sweep the fooling-set construction over balanced partitions.
//!
//! cargo run --release --example lemma_sweep -- 10 200

use sadd_bdd::harness::{verify_lemma, Claim, LemmaMode, EXHAUSTIVE_LEMMA_LIMIT};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let mode = if n <= EXHAUSTIVE_LEMMA_LIMIT {
        LemmaMode::Exhaustive
    } else {
        LemmaMode::Sample
    };

    let report = verify_lemma(n, mode, samples, 0)?;
    print!("{report}");
    let construction_ok = [
        Claim::ShiftBound,
        Claim::MemberCount,
        Claim::FoolingProperty,
    ]
    .into_iter()
    .all(|c| report.failures_of(c).next().is_none());
    println!("construction holds on every partition: {construction_ok}");
    Ok(())
}
