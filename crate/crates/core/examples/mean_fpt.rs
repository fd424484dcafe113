//! Mean first-passage time: series, closed form for exponential jumps, and the no-jump model.
use jacobi_fpt::fpt::{
    k_pair, mean_fpt_classical, mean_fpt_classical_3f2, mean_fpt_exponential, mean_fpt_series,
};
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let ctrl = SeriesControl::default();

    let plain = mean_fpt_classical(&m, &ctrl)?;
    let plain3 = mean_fpt_classical_3f2(&m, &ctrl)?;
    println!("no jumps: {:.12} ms (3F2 form {:.12})", plain.value, plain3.value);

    for alpha in [1.0, 2.0, 3.0, 5.0, 10.0] {
        let phi = BernsteinPhi::new(m, JumpMeasure::exponential(alpha)?)?;
        let s = mean_fpt_series(&phi, &ctrl)?;
        let c = mean_fpt_exponential(&m, alpha, &ctrl)?;
        let k = k_pair(&m, alpha);
        println!(
            "alpha = {alpha:>4}: series {:.12} ({} terms), closed {:.12}, k = ({:.4}, {:.4})",
            s.value, s.terms_used, c.value, k.k_plus, k.k_minus
        );
    }
    Ok(())
}
