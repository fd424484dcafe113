//! Jump sizes from a tabulated density, plus a superposition of two exponential laws.
use jacobi_fpt::fpt::mean_fpt_series;
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams, SeriesControl, TabulatedDensity};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let ctrl = SeriesControl::default();

    // an exponential density on a fine grid should reproduce the exponential law
    let pts: Vec<(f64, f64)> = (0..=2000).map(|k| {
        let r = k as f64 * 0.005;
        (r, 3.0 * (-3.0 * r).exp())
    }).collect();
    let table = JumpMeasure::Tabulated(TabulatedDensity::new(pts)?);
    let exact = JumpMeasure::exponential(3.0)?;
    for (name, j) in [("tabulated", table), ("exponential", exact)] {
        let phi = BernsteinPhi::new(m, j)?;
        println!("{name:>12}: phi(1) = {:.8}, E[T] = {:.10}", phi.phi(1.0), mean_fpt_series(&phi, &ctrl)?.value);
    }

    let both = JumpMeasure::Superposition(vec![JumpMeasure::exponential(4.0)?, JumpMeasure::exponential(8.0)?]);
    println!("superposition: mass {}, hbar {:.4}", both.mass(), both.hbar());
    match BernsteinPhi::new(m, both) {
        Ok(phi) => println!("E[T] = {:.10}", mean_fpt_series(&phi, &ctrl)?.value),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
