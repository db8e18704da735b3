//! Build A + (B >> D) for a small width, check it against integer
//! arithmetic and compare two variable orders.
//!
//! cargo run --example shifted_adder -- 4

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sadd_bdd::bdd::Manager;
use sadd_bdd::sadd::{self, build_sadd, SaddParams};

fn main() -> anyhow::Result<()> {
    let n: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(4);
    let params = SaddParams::minimal(n)?;
    println!(
        "n = {n}, shift bits = {}, variables = {}",
        params.d_width(),
        params.num_vars()
    );

    let mut mgr = Manager::new(params.canonical_order());
    let f = build_sadd(&mut mgr, &params)?;
    let (a, b, d) = (0b1011 % (1 << n), (1 << n) - 1, 1);
    let x = params.input(a, b, d)?;
    println!(
        "{a} + ({b} >> {d}) = {} (diagram) = {} (integers)",
        f.eval_value(&mgr, x)?,
        sadd::oracle_sadd(&params, a, b, d)?
    );

    for (m, &bit) in f.bits().iter().enumerate() {
        println!("  bit {m}: {} nodes", mgr.dag_size(&[bit])?);
    }
    println!(
        "canonical order: size {} width {}",
        mgr.dag_size(f.bits())?,
        mgr.max_width(f.bits())?
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let order = params.random_order(&mut rng);
    println!("random order {order}");
    let mut mgr = Manager::new(order);
    let f = build_sadd(&mut mgr, &params)?;
    println!(
        "random order: size {} width {}",
        mgr.dag_size(f.bits())?,
        mgr.max_width(f.bits())?
    );
    Ok(())
}
