//! Stationary moments from W_phi against a long time average.
use jacobi_fpt::fpt::{stationary_moment, stationary_variance};
use jacobi_fpt::sim::{stationary_time_average, PathConfig};
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let j = JumpMeasure::exponential(3.0)?;
    let phi = BernsteinPhi::new(m, j.clone())?;
    let (m1, m2) = (stationary_moment(&phi, 1), stationary_moment(&phi, 2));
    println!("E[Y] = {m1:.8}, E[Y^2] = {m2:.8}, Var = {:.8}", stationary_variance(&phi));

    let cfg = PathConfig { horizon: 200.0, paths: 64, seed: 9, ..PathConfig::default() };
    let est = stationary_time_average(&m, &j, &cfg)?;
    println!("time average: E[Y] = {:.5} +- {:.5}, E[Y^2] = {:.5}", est.m1, est.m1_stderr, est.m2);
    Ok(())
}
