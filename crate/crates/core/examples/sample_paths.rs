//! One sample path with its jumps, written as CSV to stdout.
use jacobi_fpt::sim::{simulate_path, write_path_dump, PathConfig};
use jacobi_fpt::{reduce, JumpMeasure, PhysiologicalParams};

fn main() -> jacobi_fpt::Result<()> {
    let p = PhysiologicalParams::fig_alpha();
    let m = reduce(&p)?;
    let j = JumpMeasure::exponential(3.0)?;
    let cfg = PathConfig { horizon: 2.0, sample_every: 40, record_jumps: true, seed: 5, ..PathConfig::default() };
    let rec = simulate_path(&m, &j, &cfg, 0)?;
    for e in &rec.jump_events {
        eprintln!("jump at t = {:.4} ms: {:.4} -> {:.4}", e.time, e.pre, e.post);
    }
    write_path_dump(std::io::stdout().lock(), &rec.to_voltage(&p))
}
