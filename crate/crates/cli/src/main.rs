use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_fpt::config::ModelConfig;
use jacobi_fpt::fpt::{
    classify_regime, mean_fpt_classical, mean_fpt_exponential, mean_fpt_series, KappaTheta,
};
use jacobi_fpt::sim::{
    estimate_fpt, fpt_samples, fpt_samples_voltage, simulate_path, write_fpt_dump,
    write_path_dump, PathConfig,
};
use jacobi_fpt::tables::{self as tables, fmt_num, CsvTable, ModelKind, SweepParam, SweepSpec};
use jacobi_fpt::{entrance_check, BernsteinPhi, Error, SeriesControl};

/// Mean first-passage times of a Jacobi neuron model with downward jumps.
///
/// Voltages are in mV, times in ms and rates in 1/ms. Numbers are printed
/// with 12 significant digits. Exit status: 0 on success, 1 for bad input or
/// configuration, 2 when a required series or simulation fails.
#[derive(Parser, Debug)]
#[command(name = "jacobi-fpt", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Model file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a config entry, e.g. `--set alpha=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Sum exactly this many series terms instead of stopping adaptively.
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Relative tolerance of the adaptive series stop rule.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Number of Monte Carlo paths.
    #[arg(long, global = true, default_value_t = 20_000)]
    paths: usize,
    /// Monte Carlo time step (ms).
    #[arg(long, global = true, default_value_t = 5e-4)]
    dt: f64,
    /// Monte Carlo horizon (ms); paths still below threshold are censored.
    #[arg(long, global = true, default_value_t = 1000.0)]
    horizon: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the reduced parameters, the entrance check and the firing regime.
    Validate,
    /// Mean first-passage time from the reset to the threshold.
    MeanFpt {
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
        /// Allow `--method classical` when jumps are configured (they are ignored).
        #[arg(long)]
        force_classical: bool,
    },
    /// Laplace transform E[exp(-q T)] on a grid of q (1/ms).
    ///
    /// The default grid runs from 0 to twice the branch point sigma^2 lambda_bar^2 / 2.
    Laplace {
        /// `from:to:steps`
        #[arg(long)]
        q: Option<String>,
    },
    /// Monte Carlo hitting times, or one sample path with `--path`.
    Simulate {
        /// Dump path number N as `t,y,jumped` rows instead of hitting times.
        #[arg(long, value_name = "N")]
        path: Option<usize>,
        /// Report states in mV rather than on [0, 1].
        #[arg(long)]
        voltage: bool,
        /// Keep every K-th step of a dumped path.
        #[arg(long, default_value_t = 1)]
        sample_every: usize,
    },
    /// Mean first-passage time along a grid of alpha (exponential jumps).
    SweepAlpha {
        /// `from:to:steps`
        #[arg(long, default_value = "1:10:100")]
        alpha: String,
        /// Add a Monte Carlo column (grid point k uses seed + k).
        #[arg(long)]
        mc: bool,
    },
    /// Mean first-passage time on a nu_e x nu_i grid.
    ///
    /// Defaults: nu_e from 1.05 times the entrance bound to 1.5 times the
    /// configured nu_e; nu_i from 0.5 to 1.5 times the configured nu_i;
    /// 20 points each.
    Heatmap {
        #[arg(long)]
        nu_e: Option<String>,
        #[arg(long)]
        nu_i: Option<String>,
        #[arg(long, value_enum, default_value_t = Model::Nonlocal)]
        model: Model,
    },
    /// Classical and non-local firing rates along nu_e, plus regime transitions.
    ///
    /// Default grid: 50 points from 1.05 times the entrance bound to 1.5
    /// times the non-local regime transition.
    FiringRate {
        #[arg(long)]
        nu_e: Option<String>,
    },
    /// Mean first-passage time and stationary variance along sigma^2.
    ///
    /// One curve per lambda/mu ratio; give `--ratios` directly or `--nu-i`
    /// rates to derive them from.
    SigmaCurves {
        #[arg(long, default_value = "0.05:2:40")]
        sigma2: String,
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,1.5,1.9")]
        nu_i: Vec<f64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Series,
    Closed,
    Classical,
    Mc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Nonlocal,
    Classical,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Nonlocal => ModelKind::Nonlocal,
            Model::Classical => ModelKind::Classical,
        }
    }
}

impl Common {
    fn model(&self) -> Result<ModelConfig> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Error::Usage("--config <path> is required".into()))?;
        let mut cfg = ModelConfig::load(path)?;
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    fn ctrl(&self) -> Result<SeriesControl> {
        let mut c = SeriesControl::with_tol(self.tol);
        c.fixed_terms = self.terms;
        c.validate()?;
        Ok(c)
    }

    fn paths(&self) -> PathConfig {
        PathConfig {
            dt: self.dt,
            horizon: self.horizon,
            seed: self.seed,
            paths: self.paths,
            ..PathConfig::default()
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit(&self, mut t: CsvTable, command: &str, cfg: &ModelConfig) -> Result<()> {
        let mut head = vec![format!("jacobi-fpt {command}")];
        if let Some(src) = &cfg.source {
            head.push(format!("config: {}", src.display()));
        }
        head.push(format!("tol = {:e}, terms = {}", self.tol, self.terms.map_or("adaptive".into(), |n| n.to_string())));
        let mut prov = CsvTable::default();
        prov.provenance(cfg);
        head.extend(prov.comments);
        head.append(&mut t.comments);
        t.comments = head;
        let mut w = self.output()?;
        t.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn spec(param: SweepParam, s: &str) -> Result<SweepSpec> {
    Ok(SweepSpec::parse(param, s)?)
}

fn line(w: &mut dyn Write, key: &str, value: impl AsRef<str>) -> io::Result<()> {
    writeln!(w, "{key} = {}", value.as_ref())
}

fn validate(c: &Common) -> Result<()> {
    let cfg = c.model()?;
    let p = &cfg.params;
    let m = cfg.reduced()?;
    let report = entrance_check(&m, &cfg.jumps);
    let regime = classify_regime(&m, &cfg.jumps);
    let mut w = c.output()?;
    line(&mut w, "lambda_per_ms", fmt_num(m.lambda))?;
    line(&mut w, "mu_per_ms", fmt_num(m.mu))?;
    line(&mut w, "y", fmt_num(m.y))?;
    line(&mut w, "a", fmt_num(m.a))?;
    line(&mut w, "jumps", cfg.jumps.describe())?;
    line(&mut w, "hbar", fmt_num(report.hbar))?;
    line(&mut w, "phi0", fmt_num(report.phi0))?;
    line(&mut w, "entrance", if report.holds { "valid" } else { "invalid" })?;
    line(&mut w, "entrance_detail", report.to_string())?;
    line(&mut w, "regime", regime.regime.to_string())?;
    line(&mut w, "regime_margin_per_ms", fmt_num(regime.margin))?;
    let alpha = cfg.jumps.alpha();
    let bound = p.nu_e_entrance_bound(alpha);
    line(&mut w, "nu_e_bound_per_ms", fmt_num(bound))?;
    if alpha.is_none() && !cfg.jumps.is_none() {
        line(&mut w, "nu_e_bound_note", "bound shown without the jump term hbar; see entrance_detail")?;
    }
    w.flush()?;
    if !report.holds {
        return Err(Error::Entrance(format!(
            "need nu_e > {} 1/ms (configured {})",
            fmt_num(bound),
            fmt_num(p.nu_e)
        ))
        .into());
    }
    Ok(())
}

fn mean_fpt(c: &Common, method: Method, force: bool) -> Result<()> {
    let cfg = c.model()?;
    let m = cfg.reduced()?;
    let ctrl = c.ctrl()?;
    let mut w = c.output()?;
    match method {
        Method::Series => {
            let phi = BernsteinPhi::new(m, cfg.jumps.clone())?;
            let r = mean_fpt_series(&phi, &ctrl)?;
            line(&mut w, "method", "series")?;
            line(&mut w, "mean_fpt_ms", fmt_num(r.value))?;
            line(&mut w, "terms", r.terms_used.to_string())?;
            line(&mut w, "truncation_estimate_ms", fmt_num(r.truncation_estimate))?;
        }
        Method::Closed => {
            let alpha = cfg
                .jumps
                .alpha()
                .ok_or_else(|| Error::Usage("--method closed needs `jump = exponential`".into()))?;
            let r = mean_fpt_exponential(&m, alpha, &ctrl)?;
            line(&mut w, "method", "closed")?;
            line(&mut w, "mean_fpt_ms", fmt_num(r.value))?;
            line(&mut w, "terms", r.terms_used.to_string())?;
            line(&mut w, "truncation_estimate_ms", fmt_num(r.truncation_estimate))?;
        }
        Method::Classical => {
            if !cfg.jumps.is_none() && !force {
                return Err(Error::Usage(
                    "--method classical ignores the configured jumps; pass --force-classical to proceed".into(),
                )
                .into());
            }
            let r = mean_fpt_classical(&m, &ctrl)?;
            line(&mut w, "method", "classical")?;
            line(&mut w, "mean_fpt_ms", fmt_num(r.value))?;
            line(&mut w, "terms", r.terms_used.to_string())?;
            line(&mut w, "truncation_estimate_ms", fmt_num(r.truncation_estimate))?;
        }
        Method::Mc => {
            let pc = c.paths();
            let e = estimate_fpt(&m, &cfg.jumps, &pc)?;
            line(&mut w, "method", "mc")?;
            line(&mut w, "mean_fpt_ms", fmt_num(e.mean))?;
            line(&mut w, "stderr_ms", fmt_num(e.stderr))?;
            line(&mut w, "paths", e.paths.to_string())?;
            line(&mut w, "censor_rate", fmt_num(e.censor_rate))?;
            line(&mut w, "dt_ms", fmt_num(pc.dt))?;
            line(&mut w, "seed", pc.seed.to_string())?;
            if let Some(msg) = &e.warning {
                line(&mut w, "warning", msg)?;
            }
            if !e.mean.is_finite() {
                w.flush()?;
                return Err(Error::Range(format!(
                    "no path crossed before the horizon of {} ms",
                    fmt_num(pc.horizon)
                ))
                .into());
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn laplace(c: &Common, q: Option<&str>) -> Result<()> {
    let cfg = c.model()?;
    let m = cfg.reduced()?;
    let qb = KappaTheta::branch_point(&m);
    let s = match q {
        Some(s) => spec(SweepParam::Q, s)?,
        None => SweepSpec::new(SweepParam::Q, 0.0, 2.0 * qb.max(1e-3), 21)?,
    };
    let rows = tables::laplace_sweep(&m, &cfg.jumps, &s, &c.ctrl()?)?;
    let mut t = tables::laplace_table(&rows);
    t.comment(format!("branch point q = {}", fmt_num(qb)));
    c.emit(t, "laplace", &cfg)
}

fn simulate(c: &Common, path: Option<usize>, voltage: bool, sample_every: usize) -> Result<()> {
    let cfg = c.model()?;
    let m = cfg.reduced()?;
    let pc = PathConfig { sample_every, record_jumps: true, ..c.paths() };
    let mut w = c.output()?;
    writeln!(w, "# jacobi-fpt simulate, seed = {}, dt = {}, horizon = {}", pc.seed, pc.dt, pc.horizon)?;
    match path {
        Some(k) => {
            let rec = simulate_path(&m, &cfg.jumps, &pc, k)?;
            let rec = if voltage { rec.to_voltage(&cfg.params) } else { rec };
            writeln!(w, "# path {k}, {} jumps, {} clamped steps", rec.jump_events.len(), rec.clamp_events)?;
            write_path_dump(&mut w, &rec)?;
        }
        None => {
            let samples = if voltage {
                fpt_samples_voltage(&cfg.params, &m, &cfg.jumps, &pc)?
            } else {
                fpt_samples(&m, &cfg.jumps, &pc)?
            };
            let est = jacobi_fpt::sim::summarize_fpt(&samples);
            writeln!(
                w,
                "# paths = {}, mean = {} ms, stderr = {} ms, censored = {}",
                est.paths,
                fmt_num(est.mean),
                fmt_num(est.stderr),
                fmt_num(est.censor_rate)
            )?;
            write_fpt_dump(&mut w, &samples)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sweep_alpha(c: &Common, alpha: &str, mc: bool) -> Result<()> {
    let cfg = c.model()?;
    let s = spec(SweepParam::Alpha, alpha)?;
    let opts = tables::AlphaSweepOptions {
        ctrl: c.ctrl()?,
        fixed_terms: None,
        mc: mc.then(|| c.paths()),
    };
    let rows = tables::sweep_alpha(&cfg, &s, &opts)?;
    let mut t = tables::alpha_table(&rows);
    if mc {
        t.comment(format!("mc: paths = {}, dt = {}, seed = {} + grid index", c.paths, c.dt, c.seed));
    }
    c.emit(t, "sweep-alpha", &cfg)
}

fn heatmap(c: &Common, nu_e: Option<&str>, nu_i: Option<&str>, model: Model) -> Result<()> {
    let cfg = c.model()?;
    let se = match nu_e {
        Some(s) => spec(SweepParam::NuE, s)?,
        None => tables::default_nu_e_spec(&cfg, 20)?,
    };
    let si = match nu_i {
        Some(s) => spec(SweepParam::NuI, s)?,
        None => tables::default_nu_i_spec(&cfg, 20)?,
    };
    let cells = tables::heatmap(&cfg, &se, &si, model.into(), &c.ctrl()?)?;
    c.emit(tables::heatmap_table(&cells, model.into()), "heatmap", &cfg)
}

fn firing_rate(c: &Common, nu_e: Option<&str>) -> Result<()> {
    let cfg = c.model()?;
    let s = match nu_e {
        Some(s) => spec(SweepParam::NuE, s)?,
        None => tables::default_rate_spec(&cfg, 50)?,
    };
    let rows = tables::firing_rate_sweep(&cfg, &s, &c.ctrl()?)?;
    c.emit(tables::rate_table(&rows), "firing-rate", &cfg)
}

fn sigma_curves(c: &Common, sigma2: &str, ratios: &[f64], nu_i: &[f64]) -> Result<()> {
    let cfg = c.model()?;
    let s = spec(SweepParam::Sigma2, sigma2)?;
    let ratios: Vec<f64> = if ratios.is_empty() {
        nu_i.iter().map(|&v| tables::ratio_for_nu_i(&cfg.params, v)).collect()
    } else {
        ratios.to_vec()
    };
    if ratios.is_empty() {
        bail!(Error::Usage("no ratios given".into()));
    }
    let rows = tables::sigma_curves(&cfg, &s, &ratios, &c.ctrl()?)?;
    c.emit(tables::sigma_table(&rows), "sigma-curves", &cfg)
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate => validate(c),
        Command::MeanFpt { method, force_classical } => mean_fpt(c, *method, *force_classical),
        Command::Laplace { q } => laplace(c, q.as_deref()),
        Command::Simulate { path, voltage, sample_every } => simulate(c, *path, *voltage, *sample_every),
        Command::SweepAlpha { alpha, mc } => sweep_alpha(c, alpha, *mc),
        Command::Heatmap { nu_e, nu_i, model } => heatmap(c, nu_e.as_deref(), nu_i.as_deref(), *model),
        Command::FiringRate { nu_e } => firing_rate(c, nu_e.as_deref()),
        Command::SigmaCurves { sigma2, ratios, nu_i } => sigma_curves(c, sigma2, ratios, nu_i),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_numerical() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::anyhow;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn numerical_errors_exit_two() {
        let e = anyhow!(Error::NonConvergence { partial: 1.0, terms: 3 });
        assert_eq!(exit_code(&e), 2);
        let e = anyhow!(Error::Usage("x".into()));
        assert_eq!(exit_code(&e), 1);
    }
}
