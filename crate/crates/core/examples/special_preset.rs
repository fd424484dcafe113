//! The input-dependent exponential law with sigma^2 = 2, where phi is rational.
use jacobi_fpt::fpt::{mean_fpt_exponential, mean_fpt_series};
use jacobi_fpt::{special_preset, BernsteinPhi, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let ctrl = SeriesControl::default();
    for mu in [2.5, 4.0, 8.0] {
        let (m, j) = special_preset(mu, mu + 1.0, 0.1, 0.5)?;
        let alpha = j.alpha().unwrap_or(f64::NAN);
        let phi = BernsteinPhi::new(m, j)?;
        println!(
            "mu = {mu}: phi(0) = {:.6} (= mu(mu-2)/(mu-1) = {:.6}), E[T] = {:.10} / {:.10}",
            phi.phi0(),
            mu * (mu - 2.0) / (mu - 1.0),
            mean_fpt_series(&phi, &ctrl)?.value,
            mean_fpt_exponential(&m, alpha, &ctrl)?.value,
        );
    }
    println!("{:?}", special_preset(1.5, 2.0, 0.1, 0.5).err());
    Ok(())
}
