//! Pochhammer symbols, generalised pFq, and the phi-weighted 2F1.
use jacobi_fpt::hyper::{gauss_2f1, hyp2f1_phi_real, hyp_pfq, pochhammer_real};
use jacobi_fpt::{reduce, BernsteinPhi, ComplexParam, JumpMeasure, PhysiologicalParams, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let ctrl = SeriesControl::default();
    println!("(0.5)_4 = {}", pochhammer_real(0.5, 4));

    // 2F1(1, 1; 2; z) = -ln(1 - z) / z
    let z = 0.5;
    let g = gauss_2f1(ComplexParam::new(1.0, 0.0), ComplexParam::new(1.0, 0.0), 2.0, z, &ctrl)?;
    println!("2F1(1,1;2;0.5) = {:.15} (exact {:.15})", g.value.re, -(1.0 - z as f64).ln() / z);

    let f = hyp_pfq(&[1.0, 1.0, 1.0], &[2.0, 2.0], 0.9, &ctrl)?;
    println!("3F2(1,1,1;2,2;0.9) = {:.15} after {} terms", f.value, f.terms_used);

    // with no jumps and sigma^2 = 2, phi(n) = n + mu - 1 and the phi-series is Gauss 2F1 with c = mu
    let m = reduce(&PhysiologicalParams { sigma2: 2.0, ..PhysiologicalParams::fig_alpha() })?;
    let phi = BernsteinPhi::new(m, JumpMeasure::None)?;
    let a = hyp2f1_phi_real(0.3, 0.7, &phi, 0.4, &ctrl)?;
    let b = gauss_2f1(ComplexParam::new(0.3, 0.0), ComplexParam::new(0.7, 0.0), m.mu, 0.4, &ctrl)?;
    println!("phi-weighted {:.15} vs Gauss {:.15}", a.value, b.value.re);
    Ok(())
}
