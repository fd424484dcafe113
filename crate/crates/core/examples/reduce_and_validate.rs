//! Map membrane parameters onto the unit interval and check the entrance condition.
use jacobi_fpt::fpt::classify_regime;
use jacobi_fpt::{entrance_check, reduce, JumpMeasure, PhysiologicalParams};

fn main() -> jacobi_fpt::Result<()> {
    let p = PhysiologicalParams::fig_alpha();
    let m = reduce(&p)?;
    println!("lambda = {:.6} 1/ms, mu = {:.6} 1/ms", m.lambda, m.mu);
    println!("reset y = {:.6}, threshold a = {:.6}", m.y, m.a);

    for alpha in [1.0, 3.0, 10.0] {
        let j = JumpMeasure::exponential(alpha)?;
        let report = entrance_check(&m, &j);
        println!(
            "alpha = {alpha:>4}: entrance {}, regime {}, need nu_e > {:.4}",
            if report.holds { "ok" } else { "fails" },
            classify_regime(&m, &j).regime,
            p.nu_e_entrance_bound(Some(alpha)),
        );
    }

    // too little excitation
    let weak = reduce(&PhysiologicalParams { nu_e: 1.0, ..p })?;
    println!("nu_e = 1: {}", entrance_check(&weak, &JumpMeasure::exponential(3.0)?));
    Ok(())
}
