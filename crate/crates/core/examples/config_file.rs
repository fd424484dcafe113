//! Parse a model file, override an entry and write it back.
use jacobi_fpt::config::parse_str;
use jacobi_fpt::fpt::mean_fpt_series;
use jacobi_fpt::{BernsteinPhi, SeriesControl};

const TEXT: &str = "\
V_I = -10
V_E = 100
tau = 15
nu_e = 2.8
nu_i = 1
e_amp = 0.5
i_amp = -1
sigma2 = 0.5
S = 10
x0 = 0
jump = exponential
alpha = 3
";

fn main() -> jacobi_fpt::Result<()> {
    let mut cfg = parse_str(TEXT)?;
    let ctrl = SeriesControl::default();
    for alpha in ["3", "6"] {
        cfg.set("alpha", alpha)?;
        let phi = BernsteinPhi::new(cfg.reduced()?, cfg.jumps.clone())?;
        println!("alpha = {alpha}: E[T] = {:.10} ms", mean_fpt_series(&phi, &ctrl)?.value);
    }
    print!("{}", cfg.to_config_string());

    match parse_str("V_I = -10\nV_E = oops\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
