//! Monte Carlo first-passage times against the series.
use jacobi_fpt::fpt::{laplace_fpt, mean_fpt_series};
use jacobi_fpt::sim::{estimate_fpt, laplace_mc, PathConfig};
use jacobi_fpt::{reduce, BernsteinPhi, JumpMeasure, PhysiologicalParams, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let m = reduce(&PhysiologicalParams::fig_alpha())?;
    let j = JumpMeasure::exponential(3.0)?;
    let phi = BernsteinPhi::new(m, j.clone())?;
    let ctrl = SeriesControl::default();
    let exact = mean_fpt_series(&phi, &ctrl)?.value;

    // a discrete walk misses crossings between grid points, so MC runs long; the gap shrinks like sqrt(dt)
    for dt in [5e-4, 1e-4] {
        let cfg = PathConfig { dt, horizon: 100.0, paths: 10_000, seed: 1, ..PathConfig::default() };
        let e = estimate_fpt(&m, &j, &cfg)?;
        println!(
            "dt = {dt:e}: {:.5} +- {:.5} ms (series {exact:.5}), censored {:.3}",
            e.mean, e.stderr, e.censor_rate
        );
    }

    let q = 2.0;
    let cfg = PathConfig { dt: 1e-4, horizon: 100.0, paths: 10_000, seed: 2, ..PathConfig::default() };
    let (mc, se) = laplace_mc(&m, &j, q, &cfg)?;
    println!("E[exp(-2T)]: mc {mc:.5} +- {se:.5}, series {:.5}", laplace_fpt(&phi, q, &ctrl)?.value);
    Ok(())
}
