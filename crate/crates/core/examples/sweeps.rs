//! Alpha sweep and firing-rate sweep as CSV tables.
use jacobi_fpt::config::ModelConfig;
use jacobi_fpt::tables::{
    alpha_table, default_rate_spec, firing_rate_sweep, rate_table, sweep_alpha, AlphaSweepOptions,
    SweepParam, SweepSpec,
};
use jacobi_fpt::{JumpMeasure, PhysiologicalParams, SeriesControl};

fn main() -> jacobi_fpt::Result<()> {
    let cfg = ModelConfig::new(PhysiologicalParams::fig_alpha(), JumpMeasure::exponential(3.0)?);
    let spec = SweepSpec::new(SweepParam::Alpha, 1.0, 10.0, 10)?;
    let rows = sweep_alpha(&cfg, &spec, &AlphaSweepOptions::default())?;
    print!("{}", alpha_table(&rows).to_csv_string());

    let cfg = ModelConfig::new(PhysiologicalParams::fig_comparison(), JumpMeasure::exponential(3.0)?);
    let spec = default_rate_spec(&cfg, 12)?;
    let rows = firing_rate_sweep(&cfg, &spec, &SeriesControl::default())?;
    print!("{}", rate_table(&rows).to_csv_string());
    Ok(())
}
