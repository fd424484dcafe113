//! Parameter sweeps and their CSV form.
//!
//! Every grid point yields exactly one row. Points where the model is not
//! admissible are kept with the flag `invalid`; points where the numerics
//! gave up are flagged `failed`. Missing numbers print as `nan`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bernstein::BernsteinPhi;
use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::fpt::{
    classify_regime, laplace_fpt, mean_fpt_classical, mean_fpt_series, rate_from_mean,
    regime_transition_nu_e, stationary_variance, Branch, Regime,
};
use crate::hyper::SeriesControl;
use crate::jumps::JumpMeasure;
use crate::params::{reduce, PhysiologicalParams, ReducedModel};
use crate::sim::{estimate_fpt, FptEstimate, PathConfig};

/// Significant digits of every number written to a table.
pub const SIG_DIGITS: usize = 12;

/// `x` rounded to 12 significant digits, printed in the shortest form that round-trips.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
    let a = rounded.abs();
    if rounded == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt_num(x.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    NuE,
    NuI,
    Sigma2,
    Q,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Alpha => "alpha",
            SweepParam::NuE => "nu_e",
            SweepParam::NuI => "nu_i",
            SweepParam::Sigma2 => "sigma2",
            SweepParam::Q => "q",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "alpha" => SweepParam::Alpha,
            "nu_e" => SweepParam::NuE,
            "nu_i" => SweepParam::NuI,
            "sigma2" => SweepParam::Sigma2,
            "q" => SweepParam::Q,
            _ => return Err(Error::Usage(format!("unknown sweep parameter `{s}`"))),
        })
    }
}

/// Linear grid `from, ..., to` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, from: f64, to: f64, steps: usize) -> Result<Self> {
        let s = Self { param, from, to, steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Usage(format!("{} grid needs at least one point", self.param)));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::Usage(format!("{} grid bounds must be finite", self.param)));
        }
        if self.steps > 1 && !(self.from < self.to) {
            return Err(Error::Usage(format!(
                "{} grid needs from < to, got {} .. {}",
                self.param, self.from, self.to
            )));
        }
        Ok(())
    }

    /// Parses `from:to:steps`.
    pub fn parse(param: SweepParam, s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Usage(format!("{param} grid must look like from:to:steps, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let from = parts[0].trim().parse().map_err(|_| bad())?;
        let to = parts[1].trim().parse().map_err(|_| bad())?;
        let steps = parts[2].trim().parse().map_err(|_| bad())?;
        Self::new(param, from, to, steps)
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| if k + 1 == self.steps { self.to } else { self.from + k as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    Invalid,
    Failed,
}

impl fmt::Display for RowFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowFlag::Ok => "ok",
            RowFlag::Invalid => "invalid",
            RowFlag::Failed => "failed",
        })
    }
}

impl RowFlag {
    fn from_error(e: &Error) -> Self {
        if e.is_numerical() {
            RowFlag::Failed
        } else {
            RowFlag::Invalid
        }
    }
}

/// Header, `#` comment lines and rectangular rows of preformatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    /// Adds every line of `cfg` as a comment.
    pub fn provenance(&mut self, cfg: &ModelConfig) {
        for line in cfg.to_config_string().lines() {
            self.comments.push(line.trim_start_matches("# ").to_string());
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("tables are ASCII")
    }
}

fn ctrl_or_fixed(ctrl: &SeriesControl, fixed: Option<usize>) -> SeriesControl {
    match fixed {
        Some(n) => SeriesControl { fixed_terms: Some(n), ..*ctrl },
        None => *ctrl,
    }
}

fn nonlocal_mean(p: &PhysiologicalParams, j: &JumpMeasure, ctrl: &SeriesControl) -> Result<(f64, usize)> {
    let m = reduce(p)?;
    let phi = BernsteinPhi::new(m, j.clone())?;
    let r = mean_fpt_series(&phi, ctrl)?;
    Ok((r.value, r.terms_used))
}

fn classical_mean(p: &PhysiologicalParams, ctrl: &SeriesControl) -> Result<f64> {
    Ok(mean_fpt_classical(&reduce(p)?, ctrl)?.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRow {
    pub alpha: f64,
    /// ms
    pub analytic: Option<f64>,
    pub terms: Option<usize>,
    pub mc: Option<FptEstimate>,
    pub flag: RowFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlphaSweepOptions {
    pub ctrl: SeriesControl,
    /// Sum exactly this many terms instead of stopping adaptively.
    pub fixed_terms: Option<usize>,
    /// Monte Carlo overlay; grid point `k` uses seed `seed + k`.
    pub mc: Option<PathConfig>,
}

/// Mean FPT along an `alpha` grid with the other parameters of `cfg` fixed.
pub fn sweep_alpha(cfg: &ModelConfig, spec: &SweepSpec, opts: &AlphaSweepOptions) -> Result<Vec<AlphaRow>> {
    spec.validate()?;
    let ctrl = ctrl_or_fixed(&opts.ctrl, opts.fixed_terms);
    let m = cfg.reduced()?;
    let grid = spec.grid();
    let analytic: Vec<(f64, Result<(f64, usize)>)> = grid
        .par_iter()
        .map(|&alpha| {
            let r = JumpMeasure::exponential(alpha).and_then(|j| nonlocal_mean(&cfg.params, &j, &ctrl));
            (alpha, r)
        })
        .collect();
    let mut rows = Vec::with_capacity(grid.len());
    for (k, (alpha, r)) in analytic.into_iter().enumerate() {
        let (analytic, terms, mut flag) = match r {
            Ok((v, n)) => (Some(v), Some(n), RowFlag::Ok),
            Err(e) => (None, None, RowFlag::from_error(&e)),
        };
        let mc = match (&opts.mc, flag) {
            (Some(pc), RowFlag::Ok) => {
                let pc = PathConfig { seed: pc.seed.wrapping_add(k as u64), ..*pc };
                let j = JumpMeasure::exponential(alpha)?;
                match estimate_fpt(&m, &j, &pc) {
                    Ok(e) => Some(e),
                    Err(e) => {
                        flag = RowFlag::from_error(&e);
                        None
                    }
                }
            }
            _ => None,
        };
        rows.push(AlphaRow { alpha, analytic, terms, mc, flag });
    }
    Ok(rows)
}

pub fn alpha_table(rows: &[AlphaRow]) -> CsvTable {
    let mut t = CsvTable::new([
        "alpha",
        "mean_analytic_ms",
        "mean_mc_ms",
        "mc_stderr_ms",
        "mc_censor_rate",
        "terms",
        "flag",
    ]);
    for r in rows {
        t.push(vec![
            fmt_num(r.alpha),
            fmt_opt(r.analytic),
            fmt_opt(r.mc.as_ref().map(|e| e.mean)),
            fmt_opt(r.mc.as_ref().map(|e| e.stderr)),
            fmt_opt(r.mc.as_ref().map(|e| e.censor_rate)),
            r.terms.map_or("nan".into(), |n| n.to_string()),
            r.flag.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Nonlocal,
    Classical,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Nonlocal => "nonlocal",
            ModelKind::Classical => "classical",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonlocal" => Ok(ModelKind::Nonlocal),
            "classical" => Ok(ModelKind::Classical),
            _ => Err(Error::Usage(format!("model must be nonlocal or classical, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCell {
    pub nu_e: f64,
    pub nu_i: f64,
    /// ms
    pub mean: Option<f64>,
    pub flag: RowFlag,
}

/// Default `nu_e` extent: from 5% above the entrance bound to 1.5 times the configured rate.
pub fn default_nu_e_spec(cfg: &ModelConfig, steps: usize) -> Result<SweepSpec> {
    let lo = 1.05 * cfg.params.nu_e_entrance_bound(cfg.jumps.alpha()).max(0.0);
    let lo = if lo > 0.0 { lo } else { 0.05 * cfg.params.nu_e };
    SweepSpec::new(SweepParam::NuE, lo, (1.5 * cfg.params.nu_e).max(1.5 * lo), steps)
}

/// Default `nu_i` extent: 0.5 to 1.5 times the configured rate.
pub fn default_nu_i_spec(cfg: &ModelConfig, steps: usize) -> Result<SweepSpec> {
    SweepSpec::new(SweepParam::NuI, 0.5 * cfg.params.nu_i, 1.5 * cfg.params.nu_i, steps)
}

/// Mean FPT on the `nu_e x nu_i` grid, `nu_i` varying fastest.
pub fn heatmap(
    cfg: &ModelConfig,
    nu_e: &SweepSpec,
    nu_i: &SweepSpec,
    model: ModelKind,
    ctrl: &SeriesControl,
) -> Result<Vec<HeatCell>> {
    nu_e.validate()?;
    nu_i.validate()?;
    let cells: Vec<(f64, f64)> = nu_e
        .grid()
        .into_iter()
        .flat_map(|e| nu_i.grid().into_iter().map(move |i| (e, i)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(e, i)| {
            let p = PhysiologicalParams { nu_e: e, nu_i: i, ..cfg.params };
            let r = match model {
                ModelKind::Nonlocal => nonlocal_mean(&p, &cfg.jumps, ctrl).map(|x| x.0),
                ModelKind::Classical => classical_mean(&p, ctrl),
            };
            match r {
                Ok(v) => HeatCell { nu_e: e, nu_i: i, mean: Some(v), flag: RowFlag::Ok },
                Err(err) => HeatCell { nu_e: e, nu_i: i, mean: None, flag: RowFlag::from_error(&err) },
            }
        })
        .collect())
}

pub fn heatmap_table(cells: &[HeatCell], model: ModelKind) -> CsvTable {
    let mut t = CsvTable::new(["nu_e_per_ms", "nu_i_per_ms", "mean_ms", "model", "flag"]);
    for c in cells {
        t.push(vec![
            fmt_num(c.nu_e),
            fmt_num(c.nu_i),
            fmt_opt(c.mean),
            model.to_string(),
            c.flag.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    /// `grid`, `transition_nonlocal` or `transition_classical`
    pub kind: &'static str,
    pub nu_e: f64,
    /// 1/ms
    pub rate_nonlocal: Option<f64>,
    pub rate_classical: Option<f64>,
    pub regime_nonlocal: Option<Regime>,
    pub regime_classical: Option<Regime>,
    pub flag: RowFlag,
}

/// Default `nu_e` grid for the rate comparison: 5% above the entrance bound
/// up to 1.5 times the non-local regime transition.
pub fn default_rate_spec(cfg: &ModelConfig, steps: usize) -> Result<SweepSpec> {
    let lo = 1.05 * cfg.params.nu_e_entrance_bound(cfg.jumps.alpha()).max(1e-3);
    let hi = regime_transition_nu_e(&cfg.params, &cfg.jumps)
        .map(|r| 1.5 * r)
        .unwrap_or(1.5 * cfg.params.nu_e)
        .max(2.0 * lo);
    SweepSpec::new(SweepParam::NuE, lo, hi, steps)
}

fn rate_row(cfg: &ModelConfig, nu_e: f64, kind: &'static str, ctrl: &SeriesControl) -> RateRow {
    let p = PhysiologicalParams { nu_e, ..cfg.params };
    let nonlocal = nonlocal_mean(&p, &cfg.jumps, ctrl).and_then(|(m, _)| rate_from_mean(m));
    let classical = classical_mean(&p, ctrl).and_then(rate_from_mean);
    let m = reduce(&p).ok();
    let flag = match (&nonlocal, &classical) {
        (Ok(_), Ok(_)) => RowFlag::Ok,
        (Err(e), _) | (_, Err(e)) => RowFlag::from_error(e),
    };
    RateRow {
        kind,
        nu_e,
        rate_nonlocal: nonlocal.ok(),
        rate_classical: classical.ok(),
        regime_nonlocal: m.map(|m| classify_regime(&m, &cfg.jumps).regime),
        regime_classical: m.map(|m| classify_regime(&m, &JumpMeasure::None).regime),
        flag,
    }
}

/// Non-local and classical firing rates along `spec`, then one row per regime transition.
pub fn firing_rate_sweep(cfg: &ModelConfig, spec: &SweepSpec, ctrl: &SeriesControl) -> Result<Vec<RateRow>> {
    spec.validate()?;
    let mut rows: Vec<RateRow> = spec
        .grid()
        .par_iter()
        .map(|&e| rate_row(cfg, e, "grid", ctrl))
        .collect();
    if let Some(r) = regime_transition_nu_e(&cfg.params, &cfg.jumps) {
        rows.push(rate_row(cfg, r, "transition_nonlocal", ctrl));
    }
    if let Some(r) = regime_transition_nu_e(&cfg.params, &JumpMeasure::None) {
        rows.push(rate_row(cfg, r, "transition_classical", ctrl));
    }
    Ok(rows)
}

fn regime_str(r: Option<Regime>) -> String {
    r.map_or("nan".into(), |r| r.to_string())
}

pub fn rate_table(rows: &[RateRow]) -> CsvTable {
    let mut t = CsvTable::new([
        "kind",
        "nu_e_per_ms",
        "rate_nonlocal_per_ms",
        "rate_classical_per_ms",
        "regime_nonlocal",
        "regime_classical",
        "flag",
    ]);
    for r in rows {
        t.push(vec![
            r.kind.to_string(),
            fmt_num(r.nu_e),
            fmt_opt(r.rate_nonlocal),
            fmt_opt(r.rate_classical),
            regime_str(r.regime_nonlocal),
            regime_str(r.regime_classical),
            r.flag.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRow {
    pub sigma2: f64,
    /// `lambda / mu`
    pub ratio: f64,
    pub nu_i: f64,
    /// ms
    pub mean: Option<f64>,
    /// Stationary variance of `Y`.
    pub variance: Option<f64>,
    pub flag: RowFlag,
}

/// `lambda / mu` of `cfg` at inhibitory rate `nu_i`.
pub fn ratio_for_nu_i(p: &PhysiologicalParams, nu_i: f64) -> f64 {
    let q = PhysiologicalParams { nu_i, ..*p };
    let lambda = 1.0 / q.tau + q.mu_e() - q.mu_i();
    let mu = q.mu_e() - q.v_i / (q.tau * (q.v_e - q.v_i));
    lambda / mu
}

/// The `nu_i` giving `lambda / mu = ratio`; only `lambda` depends on `nu_i`.
pub fn nu_i_for_ratio(p: &PhysiologicalParams, ratio: f64) -> f64 {
    let mu = p.mu_e() - p.v_i / (p.tau * (p.v_e - p.v_i));
    (ratio * mu - 1.0 / p.tau - p.mu_e()) / (-p.i_amp)
}

/// Mean FPT and stationary variance along a `sigma^2` grid, one curve per ratio.
pub fn sigma_curves(
    cfg: &ModelConfig,
    spec: &SweepSpec,
    ratios: &[f64],
    ctrl: &SeriesControl,
) -> Result<Vec<SigmaRow>> {
    spec.validate()?;
    let cells: Vec<(f64, f64)> = ratios
        .iter()
        .flat_map(|&r| spec.grid().into_iter().map(move |s| (r, s)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(ratio, sigma2)| {
            let nu_i = nu_i_for_ratio(&cfg.params, ratio);
            let p = PhysiologicalParams { nu_i, sigma2, ..cfg.params };
            let r = reduce(&p)
                .and_then(|m| BernsteinPhi::new(m, cfg.jumps.clone()))
                .and_then(|phi| Ok((mean_fpt_series(&phi, ctrl)?.value, stationary_variance(&phi))));
            match r {
                Ok((mean, var)) => SigmaRow {
                    sigma2,
                    ratio,
                    nu_i,
                    mean: Some(mean),
                    variance: Some(var),
                    flag: RowFlag::Ok,
                },
                Err(e) => SigmaRow {
                    sigma2,
                    ratio,
                    nu_i,
                    mean: None,
                    variance: None,
                    flag: RowFlag::from_error(&e),
                },
            }
        })
        .collect())
}

pub fn sigma_table(rows: &[SigmaRow]) -> CsvTable {
    let mut t = CsvTable::new(["sigma2_per_ms", "ratio", "nu_i_per_ms", "mean_ms", "variance", "flag"]);
    for r in rows {
        t.push(vec![
            fmt_num(r.sigma2),
            fmt_num(r.ratio),
            fmt_num(r.nu_i),
            fmt_opt(r.mean),
            fmt_opt(r.variance),
            r.flag.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceRow {
    /// 1/ms
    pub q: f64,
    pub value: Option<f64>,
    pub branch: Option<Branch>,
    pub terms: Option<usize>,
    pub flag: RowFlag,
}

/// `E_y[exp(-q T_a)]` along a `q` grid.
pub fn laplace_sweep(m: &ReducedModel, j: &JumpMeasure, spec: &SweepSpec, ctrl: &SeriesControl) -> Result<Vec<LaplaceRow>> {
    spec.validate()?;
    let phi = BernsteinPhi::new(*m, j.clone())?;
    Ok(spec
        .grid()
        .par_iter()
        .map(|&q| match laplace_fpt(&phi, q, ctrl) {
            Ok(v) => LaplaceRow {
                q,
                value: Some(v.value),
                branch: Some(v.branch),
                terms: Some(v.terms_used),
                flag: RowFlag::Ok,
            },
            Err(e) => LaplaceRow { q, value: None, branch: None, terms: None, flag: RowFlag::from_error(&e) },
        })
        .collect())
}

pub fn laplace_table(rows: &[LaplaceRow]) -> CsvTable {
    let mut t = CsvTable::new(["q_per_ms", "laplace", "branch", "terms", "flag"]);
    for r in rows {
        t.push(vec![
            fmt_num(r.q),
            fmt_opt(r.value),
            r.branch.map_or("nan".into(), |b| b.to_string()),
            r.terms.map_or("nan".into(), |n| n.to_string()),
            r.flag.to_string(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(fmt_num(123456789.123456789), "123456789.123");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(-2.5), "-2.5");
    }

    #[test]
    fn grids() {
        let s = SweepSpec::parse(SweepParam::Alpha, "1:10:100").unwrap();
        let g = s.grid();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[99], 10.0);
        assert_eq!(SweepSpec::new(SweepParam::Q, 2.0, 2.0, 1).unwrap().grid(), vec![2.0]);
        assert!(SweepSpec::parse(SweepParam::Q, "3:1:5").is_err());
        assert!(SweepSpec::parse(SweepParam::Q, "1:3").is_err());
        assert!(SweepSpec::new(SweepParam::Q, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn table_output() {
        let mut t = CsvTable::new(["x", "y"]);
        t.comment("hello");
        t.push(vec![fmt_num(1.0), fmt_num(f64::NAN)]);
        assert_eq!(t.to_csv_string(), "# hello\nx,y\n1,nan\n");
    }

    #[test]
    fn ratio_round_trip() {
        let p = PhysiologicalParams::fig_sigma();
        for nu_i in [0.1, 1.5, 1.9] {
            let r = ratio_for_nu_i(&p, nu_i);
            assert!((nu_i_for_ratio(&p, r) - nu_i).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_points_are_kept() {
        let cfg = ModelConfig::new(PhysiologicalParams::fig_sigma(), JumpMeasure::exponential(3.0).unwrap());
        let spec = SweepSpec::new(SweepParam::Sigma2, 0.5, 2.0, 7).unwrap();
        let rows = sigma_curves(&cfg, &spec, &[2.5], &SeriesControl::default()).unwrap();
        assert_eq!(rows.len(), 7);
        assert!(rows.iter().any(|r| r.flag == RowFlag::Invalid));
        assert_eq!(rows[0].flag, RowFlag::Ok);
        let t = sigma_table(&rows);
        assert_eq!(t.rows.len(), 7);
    }
}
