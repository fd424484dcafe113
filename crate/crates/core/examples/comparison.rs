//! Ordering of mean first-passage times when one Bernstein function dominates another.
use jacobi_fpt::fpt::compare_mean_fpt;
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let ctrl = SeriesControl::default();
    // a smaller alpha means larger jumps, a smaller phi and a longer wait
    let big = BernsteinPhi::new(m, JumpMeasure::exponential(1.5)?)?;
    let small = BernsteinPhi::new(m, JumpMeasure::exponential(6.0)?)?;
    let c = compare_mean_fpt(&big, &small, &ctrl)?;
    println!(
        "phi <= phi1 on the grid: {}; E[T] = {:.8} >= {:.8}",
        c.hypothesis_holds, c.mean_phi, c.mean_phi1
    );
    let plain = BernsteinPhi::new(m, JumpMeasure::None)?;
    let c = compare_mean_fpt(&small, &plain, &ctrl)?;
    println!("jumps vs none: holds {}, {:.8} >= {:.8}", c.hypothesis_holds, c.mean_phi, c.mean_phi1);
    Ok(())
}
