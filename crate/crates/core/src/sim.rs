//! Monte Carlo paths of the jump-Jacobi process on `[0, 1]`.
//!
//! Every step first tests for a jump with probability `1 - exp(-m dt / y)`,
//! moving `y -> exp(-r) y` with `r ~ Pi / m`, and then takes a Milstein step
//! of `dY = (mu - lambda Y) dt + sigma sqrt(Y (1 - Y)) dW`. Crossing is
//! detected on the grid only, which biases hitting times upwards.
//!
//! Path `k` draws from a ChaCha8 stream keyed by `(seed, k)`, so results do
//! not depend on how rayon schedules the work.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jumps::JumpMeasure;
use crate::params::{PhysiologicalParams, ReducedModel};
use crate::tables::fmt_num;

/// Lower clamp for the state; the jump rate `m / y` blows up at 0.
pub const Y_FLOOR: f64 = 1e-12;

/// Censoring fraction above which a mean-FPT estimate carries a warning.
pub const CENSOR_WARN: f64 = 0.10;

/// Fraction of the horizon discarded before time averages are taken.
pub const BURN_IN: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    /// ms
    pub dt: f64,
    /// ms
    pub horizon: f64,
    pub seed: u64,
    pub paths: usize,
    pub record_jumps: bool,
    /// Keep every `sample_every`-th grid point in a [`PathRecord`].
    pub sample_every: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            dt: 5e-4,
            horizon: 1e4,
            seed: 0,
            paths: 20_000,
            record_jumps: false,
            sample_every: 1,
        }
    }
}

impl PathConfig {
    pub fn validate(&self, m: &ReducedModel, j: &JumpMeasure) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", self.dt, "dt > 0"));
        }
        if !(self.horizon > self.dt && self.horizon.is_finite()) {
            return Err(Error::invalid("horizon", self.horizon, format!("horizon > dt = {}", self.dt)));
        }
        if self.paths == 0 {
            return Err(Error::invalid("paths", 0.0, "paths >= 1"));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", 0.0, "sample_every >= 1"));
        }
        // jump-probability saturation guard, taken at the starting state
        if m.y > 0.0 {
            let load = j.mass() * self.dt / m.y.max(Y_FLOOR);
            if load >= 50.0 {
                return Err(Error::invalid(
                    "dt",
                    self.dt,
                    format!("m dt / y0 < 50 (currently {load})"),
                ));
            }
        }
        Ok(())
    }

    fn steps(&self) -> u64 {
        (self.horizon / self.dt).ceil() as u64
    }
}

/// A jump at `time` from `pre` to `post < pre`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub pre: f64,
    pub post: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Whether a jump happened since the previous sample.
    pub jumped: Vec<bool>,
    pub jump_events: Vec<JumpEvent>,
    /// Steps whose result had to be clamped into `[Y_FLOOR, 1]`.
    pub clamp_events: usize,
}

impl PathRecord {
    /// The same path in mV.
    pub fn to_voltage(&self, p: &PhysiologicalParams) -> PathRecord {
        PathRecord {
            times: self.times.clone(),
            values: self.values.iter().map(|&y| p.to_voltage(y)).collect(),
            jumped: self.jumped.clone(),
            jump_events: self
                .jump_events
                .iter()
                .map(|e| JumpEvent {
                    time: e.time,
                    pre: p.to_voltage(e.pre),
                    post: p.to_voltage(e.post),
                })
                .collect(),
            clamp_events: self.clamp_events,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FptSample {
    /// ms; equals the horizon when censored
    pub hit_time: f64,
    pub crossed: bool,
}

fn clamp(y: f64) -> (f64, bool) {
    if y < Y_FLOOR {
        (Y_FLOOR, true)
    } else if y > 1.0 {
        (1.0, true)
    } else if y.is_nan() {
        (Y_FLOOR, true)
    } else {
        (y, false)
    }
}

/// One Milstein step for `dY = (mu - lambda Y) dt + sigma sqrt(Y (1 - Y)) dW`.
pub fn milstein_step(m: &ReducedModel, y: f64, dw: f64, dt: f64) -> f64 {
    milstein_raw(m, y, dw, dt).0
}

fn milstein_raw(m: &ReducedModel, y: f64, dw: f64, dt: f64) -> (f64, bool) {
    let b = (m.sigma2 * y * (1.0 - y)).max(0.0).sqrt();
    let next = y + (m.mu - m.lambda * y) * dt
        + b * dw
        + 0.25 * m.sigma2 * (1.0 - 2.0 * y) * (dw * dw - dt);
    clamp(next)
}

/// Jump test for one step of length `dt` from `y`. Returns `(r, exp(-r) y)` on a jump.
pub fn maybe_jump<R: Rng + ?Sized>(
    j: &JumpMeasure,
    y: f64,
    dt: f64,
    rng: &mut R,
) -> Option<(f64, f64)> {
    let mass = j.mass();
    if mass == 0.0 {
        return None;
    }
    let p = -(-mass * dt / y.max(Y_FLOOR)).exp_m1();
    if rng.random::<f64>() >= p {
        return None;
    }
    let r = j.sample_amplitude(rng);
    let post = ((-r).exp() * y).max(Y_FLOOR);
    (post < y).then_some((r, post))
}

/// Random stream of path `index` under `seed`.
pub fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct Stepper<'a> {
    m: &'a ReducedModel,
    j: &'a JumpMeasure,
    dt: f64,
    sqrt_dt: f64,
    rng: ChaCha8Rng,
}

struct StepOutcome {
    y: f64,
    jump: Option<(f64, f64)>,
    clamped: bool,
}

impl<'a> Stepper<'a> {
    fn new(m: &'a ReducedModel, j: &'a JumpMeasure, cfg: &PathConfig, index: usize) -> Self {
        Self {
            m,
            j,
            dt: cfg.dt,
            sqrt_dt: cfg.dt.sqrt(),
            rng: path_rng(cfg.seed, index),
        }
    }

    fn step(&mut self, y: f64) -> StepOutcome {
        let jump = maybe_jump(self.j, y, self.dt, &mut self.rng).map(|(_, post)| (y, post));
        let from = jump.map_or(y, |(_, post)| post);
        let z: f64 = self.rng.sample(StandardNormal);
        let (y, clamped) = milstein_raw(self.m, from, z * self.sqrt_dt, self.dt);
        StepOutcome { y, jump, clamped }
    }
}

/// Path `index` from `m.y` over the whole horizon.
pub fn simulate_path(m: &ReducedModel, j: &JumpMeasure, cfg: &PathConfig, index: usize) -> Result<PathRecord> {
    cfg.validate(m, j)?;
    let mut st = Stepper::new(m, j, cfg, index);
    let mut rec = PathRecord::default();
    let mut y = m.y.max(Y_FLOOR);
    rec.times.push(0.0);
    rec.values.push(y);
    rec.jumped.push(false);
    let mut jumped_since = false;
    for k in 0..cfg.steps() {
        let t = (k + 1) as f64 * cfg.dt;
        let out = st.step(y);
        if let Some((pre, post)) = out.jump {
            jumped_since = true;
            if cfg.record_jumps {
                rec.jump_events.push(JumpEvent { time: k as f64 * cfg.dt, pre, post });
            }
        }
        rec.clamp_events += out.clamped as usize;
        y = out.y;
        if (k + 1) % cfg.sample_every as u64 == 0 {
            rec.times.push(t);
            rec.values.push(y);
            rec.jumped.push(jumped_since);
            jumped_since = false;
        }
    }
    Ok(rec)
}

/// Runs paths `0..cfg.paths` in parallel and returns them in index order.
pub fn simulate_paths(m: &ReducedModel, j: &JumpMeasure, cfg: &PathConfig) -> Result<Vec<PathRecord>> {
    cfg.validate(m, j)?;
    (0..cfg.paths)
        .into_par_iter()
        .map(|k| simulate_path(m, j, cfg, k))
        .collect()
}

fn first_hit<F: Fn(f64) -> bool>(
    m: &ReducedModel,
    j: &JumpMeasure,
    cfg: &PathConfig,
    index: usize,
    hit: &F,
) -> FptSample {
    let mut y = m.y.max(Y_FLOOR);
    if hit(y) {
        return FptSample { hit_time: 0.0, crossed: true };
    }
    let mut st = Stepper::new(m, j, cfg, index);
    for k in 0..cfg.steps() {
        y = st.step(y).y;
        if hit(y) {
            return FptSample {
                hit_time: (k + 1) as f64 * cfg.dt,
                crossed: true,
            };
        }
    }
    FptSample {
        hit_time: cfg.horizon,
        crossed: false,
    }
}

fn fpt_with<F: Fn(f64) -> bool + Sync>(
    m: &ReducedModel,
    j: &JumpMeasure,
    cfg: &PathConfig,
    hit: F,
) -> Result<Vec<FptSample>> {
    cfg.validate(m, j)?;
    Ok((0..cfg.paths)
        .into_par_iter()
        .map(|k| first_hit(m, j, cfg, k, &hit))
        .collect())
}

/// First grid time with `Y >= a`, one sample per path.
pub fn fpt_samples(m: &ReducedModel, j: &JumpMeasure, cfg: &PathConfig) -> Result<Vec<FptSample>> {
    let a = m.a;
    fpt_with(m, j, cfg, move |y| y >= a)
}

/// First grid time with `X = g(Y) >= g(a)`, simulated on the same streams as [`fpt_samples`].
pub fn fpt_samples_voltage(
    p: &PhysiologicalParams,
    m: &ReducedModel,
    j: &JumpMeasure,
    cfg: &PathConfig,
) -> Result<Vec<FptSample>> {
    let s = p.to_voltage(m.a);
    let p = *p;
    fpt_with(m, j, cfg, move |y| p.to_voltage(y) >= s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FptEstimate {
    /// ms, over crossed paths
    pub mean: f64,
    pub stderr: f64,
    pub censor_rate: f64,
    pub paths: usize,
    pub warning: Option<String>,
}

/// Summarises samples in index order.
pub fn summarize_fpt(samples: &[FptSample]) -> FptEstimate {
    let crossed: Vec<f64> = samples.iter().filter(|s| s.crossed).map(|s| s.hit_time).collect();
    let n = crossed.len();
    let censor_rate = if samples.is_empty() {
        0.0
    } else {
        1.0 - n as f64 / samples.len() as f64
    };
    let (mean, stderr) = mean_and_stderr(&crossed);
    let warning = (censor_rate > CENSOR_WARN).then(|| {
        format!(
            "{:.1}% of paths censored at the horizon; the mean is biased low",
            100.0 * censor_rate
        )
    });
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    FptEstimate {
        mean,
        stderr,
        censor_rate,
        paths: samples.len(),
        warning,
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Monte Carlo mean first-passage time.
///
/// Grid-only crossing detection misses excursions above `a` between grid
/// points, so the estimate sits above the true mean by an amount that
/// shrinks with `dt`.
pub fn estimate_fpt(m: &ReducedModel, j: &JumpMeasure, cfg: &PathConfig) -> Result<FptEstimate> {
    Ok(summarize_fpt(&fpt_samples(m, j, cfg)?))
}

/// Monte Carlo `E[exp(-q T_a)]`; censored paths contribute 0.
pub fn laplace_mc(m: &ReducedModel, j: &JumpMeasure, q: f64, cfg: &PathConfig) -> Result<(f64, f64)> {
    if !(q >= 0.0) {
        return Err(Error::invalid("q", q, "q >= 0"));
    }
    let xs: Vec<f64> = fpt_samples(m, j, cfg)?
        .iter()
        .map(|s| if s.crossed { (-q * s.hit_time).exp() } else { 0.0 })
        .collect();
    Ok(mean_and_stderr(&xs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryEstimate {
    pub m1: f64,
    pub m2: f64,
    /// Spread of the per-path averages of `Y` (NaN for a single path).
    pub m1_stderr: f64,
}

/// Time averages of `Y` and `Y^2` after discarding the first 10% of the horizon.
pub fn stationary_time_average(m: &ReducedModel, j: &JumpMeasure, cfg: &PathConfig) -> Result<StationaryEstimate> {
    cfg.validate(m, j)?;
    let steps = cfg.steps();
    let skip = (BURN_IN * steps as f64).floor() as u64;
    let per_path: Vec<(f64, f64)> = (0..cfg.paths)
        .into_par_iter()
        .map(|k| {
            let mut st = Stepper::new(m, j, cfg, k);
            let mut y = m.y.max(Y_FLOOR);
            let (mut s1, mut s2) = (0.0, 0.0);
            for i in 0..steps {
                y = st.step(y).y;
                if i >= skip {
                    s1 += y;
                    s2 += y * y;
                }
            }
            let n = (steps - skip) as f64;
            (s1 / n, s2 / n)
        })
        .collect();
    let n = per_path.len() as f64;
    let m1s: Vec<f64> = per_path.iter().map(|p| p.0).collect();
    let (m1, m1_stderr) = mean_and_stderr(&m1s);
    let m2 = per_path.iter().map(|p| p.1).sum::<f64>() / n;
    Ok(StationaryEstimate { m1, m2, m1_stderr })
}

/// `t,y,jumped` rows, one per recorded sample.
pub fn write_path_dump<W: Write>(mut w: W, rec: &PathRecord) -> Result<()> {
    writeln!(w, "t,y,jumped")?;
    for ((t, y), jumped) in rec.times.iter().zip(&rec.values).zip(&rec.jumped) {
        writeln!(w, "{},{},{}", fmt_num(*t), fmt_num(*y), *jumped as u8)?;
    }
    Ok(())
}

/// `hit_time,crossed` rows; censored paths carry the horizon and `crossed = 0`.
pub fn write_fpt_dump<W: Write>(mut w: W, samples: &[FptSample]) -> Result<()> {
    writeln!(w, "hit_time,crossed")?;
    for s in samples {
        writeln!(w, "{},{}", fmt_num(s.hit_time), s.crossed as u8)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> ReducedModel {
        ReducedModel::new(2.0, 1.2, 0.5, 0.1, 0.5).unwrap()
    }

    #[test]
    fn milstein_symmetry_point_is_euler() {
        let m = model();
        let (dt, dw) = (5e-4, 0.013);
        let euler = 0.5 + (m.mu - m.lambda * 0.5) * dt + (m.sigma2 * 0.25f64).sqrt() * dw;
        assert_eq!(milstein_step(&m, 0.5, dw, dt), euler);
    }

    #[test]
    fn milstein_at_drift_zero() {
        let m = model();
        let ys = m.mu / m.lambda;
        let dt = 1e-3;
        let got = milstein_step(&m, ys, 0.0, dt);
        let corr = -0.25 * m.sigma2 * (1.0 - 2.0 * ys) * dt;
        assert!((got - (ys + corr)).abs() < 1e-15);
    }

    #[test]
    fn clamping() {
        assert_eq!(clamp(1.2), (1.0, true));
        assert_eq!(clamp(-0.2), (Y_FLOOR, true));
        assert_eq!(clamp(f64::NAN), (Y_FLOOR, true));
        assert_eq!(clamp(0.4), (0.4, false));
    }

    #[test]
    fn single_step_moments() {
        let m = model();
        let (y, dt) = (0.3, 5e-4f64);
        let mut rng = path_rng(7, 0);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let d = milstein_step(&m, y, z * dt.sqrt(), dt) - y;
            s1 += d;
            s2 += d * d;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        let b2 = m.sigma2 * y * (1.0 - y);
        assert!((var / (b2 * dt) - 1.0).abs() < 0.01, "var {var}");
        // the drift is small against the noise; compare within a few standard errors
        let se = (b2 * dt / n as f64).sqrt();
        assert!((mean - (m.mu - m.lambda * y) * dt).abs() < 4.0 * se);
    }

    #[test]
    fn no_jumps_without_mass() {
        let mut rng = path_rng(1, 0);
        for _ in 0..1000 {
            assert!(maybe_jump(&JumpMeasure::None, 1e-9, 1.0, &mut rng).is_none());
        }
    }

    #[test]
    fn jump_frequency() {
        let j = JumpMeasure::exponential(3.0).unwrap();
        let (y, dt) = (0.5, 5e-4);
        let mut rng = path_rng(11, 3);
        let n = 2_000_000;
        let hits = (0..n).filter(|_| maybe_jump(&j, y, dt, &mut rng).is_some()).count();
        let p = -(-dt / y).exp_m1();
        let rel = (hits as f64 / n as f64) / p - 1.0;
        assert!(rel.abs() < 0.05, "rel {rel}");
    }

    #[test]
    fn jump_frequency_high_rate() {
        // p ~ 0.39: a million trials pin the frequency to well under 1%
        let j = JumpMeasure::exponential(3.0).unwrap();
        let mut rng = path_rng(5, 0);
        let n = 1_000_000;
        let (y, dt) = (0.01, 5e-3);
        let hits = (0..n).filter(|_| maybe_jump(&j, y, dt, &mut rng).is_some()).count();
        let p = -(-dt / y).exp_m1();
        assert!(((hits as f64 / n as f64) / p - 1.0).abs() < 0.01);
    }

    #[test]
    fn small_states_jump_small() {
        let j = JumpMeasure::exponential(3.0).unwrap();
        let mut rng = path_rng(2, 0);
        for _ in 0..10_000 {
            if let Some((r, post)) = maybe_jump(&j, 1e-4, 5e-4, &mut rng) {
                assert!(r > 0.0 && post < 1e-4 && 1e-4 - post <= 1e-4);
            }
        }
    }

    #[test]
    fn deterministic_fixed_point() {
        let m = ReducedModel::new(2.0, 1.0, 1e-14, 0.5, 0.9).unwrap();
        let cfg = PathConfig { horizon: 1.0, paths: 1, ..Default::default() };
        let rec = simulate_path(&m, &JumpMeasure::None, &cfg, 0).unwrap();
        assert!(rec.values.iter().all(|v| (v - 0.5).abs() < cfg.dt));
    }

    #[test]
    fn start_at_threshold() {
        let m = ReducedModel::new(2.0, 1.2, 0.5, 0.2, 0.5).unwrap();
        let m = ReducedModel { y: 0.5, ..m };
        let cfg = PathConfig { horizon: 1.0, paths: 8, ..Default::default() };
        let est = estimate_fpt(&m, &JumpMeasure::None, &cfg).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.censor_rate, 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let m = model();
        let j = JumpMeasure::exponential(2.0).unwrap();
        let bad = [
            PathConfig { dt: 0.0, ..Default::default() },
            PathConfig { horizon: 1e-4, ..Default::default() },
            PathConfig { paths: 0, ..Default::default() },
            PathConfig { dt: 6.0, horizon: 100.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate(&m, &j).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn reproducible_and_dumped() {
        let m = model();
        let j = JumpMeasure::exponential(3.0).unwrap();
        let cfg = PathConfig { horizon: 50.0, paths: 64, seed: 9, ..Default::default() };
        let a = fpt_samples(&m, &j, &cfg).unwrap();
        let b = fpt_samples(&m, &j, &cfg).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_fpt_dump(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 65);

        let rec = simulate_path(&m, &j, &PathConfig { horizon: 0.01, sample_every: 2, ..cfg }, 0).unwrap();
        assert_eq!(rec.times.len(), 11);
        let mut buf = Vec::new();
        write_path_dump(&mut buf, &rec).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,y,jumped\n0,"));
    }

    #[test]
    fn censoring_warning() {
        let m = ReducedModel::new(2.0, 0.2, 0.1, 0.05, 0.9).unwrap();
        let cfg = PathConfig { horizon: 0.5, paths: 32, ..Default::default() };
        let est = estimate_fpt(&m, &JumpMeasure::None, &cfg).unwrap();
        assert!(est.censor_rate > CENSOR_WARN && est.warning.is_some());
    }
}
