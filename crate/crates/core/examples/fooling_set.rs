//! Construct the fooling set for one partition, verify it against the
//! MSB of the shifted addition and count distinct subfunctions.
//!
//! cargo run --example fooling_set

use sadd_bdd::bdd::Manager;
use sadd_bdd::fooling::{
    build_fooling_set, half, subfunction_count, verify_fooling_set, BalancedPartition, BddFunction,
    SaddMsbOracle,
};
use sadd_bdd::sadd::{build_sadd, SaddParams};

fn main() -> anyhow::Result<()> {
    let n = 2;
    let part = BalancedPartition::from_spec(n, "L=a1,b1", half())?;
    let fs = build_fooling_set(&part)?;
    print!("{}", fs.to_text());

    let oracle = SaddMsbOracle { n };
    let verdict = verify_fooling_set(&oracle, &fs)?;
    println!(
        "oracle: valid {} diagonal {:?}",
        verdict.valid, verdict.diagonal
    );

    let params = SaddParams::minimal(n)?;
    let mut mgr = Manager::new(params.canonical_order());
    let f = build_sadd(&mut mgr, &params)?;
    let msb = BddFunction {
        manager: &mgr,
        root: f.output_bit(n as usize - 1)?,
    };
    println!("diagram: valid {}", verify_fooling_set(&msb, &fs)?.valid);
    println!(
        "distinct subfunctions after fixing L: {}",
        subfunction_count(&oracle, &part, &fs)?
    );

    // a wider example, sub-sampled
    let n = 12;
    let part = BalancedPartition::from_spec(n, "L=a11,a10,a9,a8,a7,a6,b5,b4,b3,b2,b1,b0", half())?;
    let fs = build_fooling_set(&part)?;
    let v = sadd_bdd::fooling::verify_fooling_set_sampled(&SaddMsbOracle { n }, &fs, 256, 3)?;
    println!(
        "n = {n}: {} members, valid {} ({} checked, subsampled {})",
        fs.len(),
        v.valid,
        v.members_checked,
        v.subsampled
    );
    Ok(())
}
