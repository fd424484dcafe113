//! Laplace transform of the first-passage time, on both sides of the branch point.
use jacobi_fpt::fpt::{classical_laplace, laplace_fpt, solve_kappa_theta, KappaTheta};
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let phi = BernsteinPhi::new(m, JumpMeasure::exponential(3.0)?)?;
    let ctrl = SeriesControl::default();
    let qb = KappaTheta::branch_point(&m);
    println!("branch point q_b = {qb:.6} 1/ms");
    for q in [0.0, 0.5 * qb, qb, 2.0 * qb, 10.0] {
        let kt = solve_kappa_theta(&m, q)?;
        let jump = laplace_fpt(&phi, q, &ctrl)?;
        let plain = classical_laplace(&m, q, &ctrl)?;
        println!(
            "q = {q:>10.4}: kappa = {:.4}, {} branch, E[exp(-qT)] = {:.10} (no jumps {:.10})",
            kt.kappa, jump.branch, jump.value, plain.value
        );
    }
    Ok(())
}
