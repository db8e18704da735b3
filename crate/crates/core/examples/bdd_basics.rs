//! Build a few small diagrams by hand and inspect them.
//!
//! cargo run --example bdd_basics

use sadd_bdd::bdd::{Assignment, BinOp, Manager, VarId, VarOrder};

fn main() -> anyhow::Result<()> {
    let (x, y, z) = (VarId::a(0), VarId::a(1), VarId::a(2));
    let mut mgr = Manager::new(VarOrder::new(vec![x, y, z])?);
    let (fx, fy, fz) = (mgr.var(x)?, mgr.var(y)?, mgr.var(z)?);

    let parity = mgr.xor(fx, fy)?;
    println!(
        "x ^ y: size {} widths {:?}",
        mgr.dag_size(&[parity])?,
        mgr.level_widths(&[parity])?
    );

    // majority two ways: as a formula and as an ITE
    let xy = mgr.and(fx, fy)?;
    let x_or_y = mgr.or(fx, fy)?;
    let z_and = mgr.and(fz, x_or_y)?;
    let maj = mgr.or(xy, z_and)?;
    let x_and_y_or_z = mgr.ite(fz, x_or_y, xy)?;
    println!(
        "majority size {}, same node as ite form: {}",
        mgr.dag_size(&[maj])?,
        maj == x_and_y_or_z
    );

    let nand = mgr.apply(BinOp::Nand, fx, fz)?;
    let point = Assignment::new().with(x, true).with(y, false).with(z, true);
    println!("maj(1,0,1) = {}", mgr.eval(maj, &point)?);
    println!("nand(x,z)(1,0,1) = {}", mgr.eval(nand, &point)?);

    // two roots share the x node
    println!(
        "shared size of parity and majority: {}",
        mgr.dag_size(&[parity, maj])?
    );
    print!("{}", mgr.to_dot(&[maj])?);
    Ok(())
}
