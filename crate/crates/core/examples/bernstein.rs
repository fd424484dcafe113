//! The Bernstein function phi and the products W_phi(n) = phi(1) ... phi(n - 1).
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let phi = BernsteinPhi::new(m, JumpMeasure::exponential(3.0)?)?;
    println!("{:>6} {:>16} {:>16}", "u", "closed form", "integral form");
    for u in [0.0, 0.5, 1.0, 5.0, 20.0] {
        println!("{u:>6} {:>16.12} {:>16.12}", phi.phi(u), phi.phi_integral_form(u));
    }
    for n in [1, 5, 10, 20] {
        println!("W_phi({n}) = {:.6e}, ln = {:.6}", phi.wphi(n)?, phi.log_wphi(n));
    }
    Ok(())
}
