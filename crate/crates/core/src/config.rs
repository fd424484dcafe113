//! `key = value` model files.
//!
//! ```text
//! # voltages in mV, times in ms, rates in 1/ms
//! V_I = -10
//! V_E = 100
//! tau = 15
//! nu_e = 2.8
//! nu_i = 1
//! e_amp = 0.5
//! i_amp = -1
//! sigma2 = 0.5
//! S = 10
//! x0 = 0
//! jump = exponential      # none | exponential | tabulated
//! alpha = 3
//! ```
//!
//! `jump_table` names a two-column `r density` file, relative to the config
//! file's directory. Without a `jump` line the model has no jumps.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::jumps::{JumpMeasure, TabulatedDensity};
use crate::params::{reduce, PhysiologicalParams, ReducedModel};

const PARAM_KEYS: [&str; 10] = [
    "V_I", "V_E", "tau", "nu_e", "nu_i", "e_amp", "i_amp", "sigma2", "S", "x0",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    None,
    Exponential,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub params: PhysiologicalParams,
    pub jumps: JumpMeasure,
    /// Where the config was read from, if anywhere.
    pub source: Option<PathBuf>,
    /// Resolved path of the jump table, if one was used.
    pub jump_table: Option<PathBuf>,
}

impl ModelConfig {
    pub fn new(params: PhysiologicalParams, jumps: JumpMeasure) -> Self {
        Self {
            params,
            jumps,
            source: None,
            jump_table: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = parse(BufReader::new(file), path, &base)?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn reduced(&self) -> Result<ReducedModel> {
        reduce(&self.params)
    }

    /// Applies a `key=value` override, e.g. from the command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let origin = PathBuf::from("<override>");
        let mut raw = RawConfig::from_existing(self);
        raw.assign(key.trim(), value.trim(), &origin, 0)?;
        let base = std::env::current_dir().unwrap_or_default();
        let rebuilt = raw.finish(&origin, &base)?;
        self.params = rebuilt.params;
        self.jumps = rebuilt.jumps;
        if rebuilt.jump_table.is_some() || !matches!(self.jumps, JumpMeasure::Tabulated(_)) {
            self.jump_table = rebuilt.jump_table;
        }
        Ok(())
    }

    /// The configuration in the same file format, with unit comments.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let lines: [(&str, f64, &str); 10] = [
            ("V_I", p.v_i, "inhibitory reversal potential (mV)"),
            ("V_E", p.v_e, "excitatory reversal potential (mV)"),
            ("tau", p.tau, "membrane time constant (ms)"),
            ("nu_e", p.nu_e, "excitatory input rate (1/ms)"),
            ("nu_i", p.nu_i, "inhibitory input rate (1/ms)"),
            ("e_amp", p.e_amp, "excitatory amplitude (dimensionless)"),
            ("i_amp", p.i_amp, "inhibitory amplitude (dimensionless)"),
            ("sigma2", p.sigma2, "noise intensity (1/ms)"),
            ("S", p.threshold, "firing threshold (mV)"),
            ("x0", p.reset, "reset / start voltage (mV)"),
        ];
        for (k, v, unit) in lines {
            let _ = writeln!(s, "# {unit}");
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "# jump law: none | exponential | tabulated");
        match &self.jumps {
            JumpMeasure::None => {
                let _ = writeln!(s, "jump = none");
            }
            JumpMeasure::Exponential { alpha } => {
                let _ = writeln!(s, "jump = exponential");
                let _ = writeln!(s, "# exponential rate of the log-amplitude r (dimensionless)");
                let _ = writeln!(s, "alpha = {alpha}");
            }
            JumpMeasure::Tabulated(_) => {
                let _ = writeln!(s, "jump = tabulated");
                if let Some(t) = &self.jump_table {
                    let _ = writeln!(s, "jump_table = {}", t.display());
                }
            }
            other => {
                let _ = writeln!(s, "# {} (not expressible in this format)", other.describe());
            }
        }
        s
    }
}

#[derive(Default)]
struct RawConfig {
    values: [Option<f64>; 10],
    jump: Option<JumpKind>,
    alpha: Option<f64>,
    table: Option<PathBuf>,
    table_line: usize,
    jump_line: usize,
    preset_jumps: Option<JumpMeasure>,
}

fn config_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

impl RawConfig {
    fn from_existing(c: &ModelConfig) -> Self {
        let p = &c.params;
        let mut raw = RawConfig {
            values: [
                Some(p.v_i),
                Some(p.v_e),
                Some(p.tau),
                Some(p.nu_e),
                Some(p.nu_i),
                Some(p.e_amp),
                Some(p.i_amp),
                Some(p.sigma2),
                Some(p.threshold),
                Some(p.reset),
            ],
            ..Default::default()
        };
        match &c.jumps {
            JumpMeasure::None => raw.jump = Some(JumpKind::None),
            JumpMeasure::Exponential { alpha } => {
                raw.jump = Some(JumpKind::Exponential);
                raw.alpha = Some(*alpha);
            }
            JumpMeasure::Tabulated(_) => {
                raw.jump = Some(JumpKind::Tabulated);
                raw.preset_jumps = Some(c.jumps.clone());
            }
            other => raw.preset_jumps = Some(other.clone()),
        }
        raw
    }

    fn assign(&mut self, key: &str, value: &str, path: &Path, line: usize) -> Result<()> {
        let number = || {
            value
                .parse::<f64>()
                .map_err(|_| config_err(path, line, format!("`{key}` expects a number, got `{value}`")))
        };
        if let Some(k) = PARAM_KEYS.iter().position(|&p| p == key) {
            self.values[k] = Some(number()?);
            return Ok(());
        }
        match key {
            "jump" => {
                self.jump = Some(match value {
                    "none" | "" => JumpKind::None,
                    "exponential" => JumpKind::Exponential,
                    "tabulated" => JumpKind::Tabulated,
                    _ => {
                        return Err(config_err(
                            path,
                            line,
                            format!("`jump` must be none, exponential or tabulated, got `{value}`"),
                        ))
                    }
                });
                self.jump_line = line;
                self.preset_jumps = None;
            }
            "alpha" => {
                self.alpha = Some(number()?);
                if self.jump.is_none() {
                    self.jump = Some(JumpKind::Exponential);
                    self.jump_line = line;
                }
                self.preset_jumps = None;
            }
            "jump_table" => {
                self.table = Some(PathBuf::from(value));
                self.table_line = line;
                self.preset_jumps = None;
            }
            _ => return Err(config_err(path, line, format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn finish(self, path: &Path, base: &Path) -> Result<ModelConfig> {
        let mut v = [0.0; 10];
        for (k, slot) in self.values.iter().enumerate() {
            v[k] = slot.ok_or_else(|| config_err(path, 0, format!("missing key `{}`", PARAM_KEYS[k])))?;
        }
        let params = PhysiologicalParams {
            v_i: v[0],
            v_e: v[1],
            tau: v[2],
            nu_e: v[3],
            nu_i: v[4],
            e_amp: v[5],
            i_amp: v[6],
            sigma2: v[7],
            threshold: v[8],
            reset: v[9],
        };
        if let Some(j) = self.preset_jumps {
            return Ok(ModelConfig::new(params, j));
        }
        let mut jump_table = None;
        let jumps = match self.jump.unwrap_or(JumpKind::None) {
            JumpKind::None => JumpMeasure::None,
            JumpKind::Exponential => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| config_err(path, self.jump_line, "exponential jumps need `alpha`"))?;
                JumpMeasure::exponential(alpha).map_err(|e| config_err(path, self.jump_line, e.to_string()))?
            }
            JumpKind::Tabulated => {
                let rel = self
                    .table
                    .ok_or_else(|| config_err(path, self.jump_line, "tabulated jumps need `jump_table`"))?;
                let full = if rel.is_absolute() { rel } else { base.join(rel) };
                let file = File::open(&full)
                    .map_err(|e| config_err(path, self.table_line, format!("{}: {e}", full.display())))?;
                let t = TabulatedDensity::from_reader(BufReader::new(file))
                    .map_err(|e| config_err(path, self.table_line, format!("{}: {e}", full.display())))?;
                jump_table = Some(full);
                JumpMeasure::Tabulated(t)
            }
        };
        Ok(ModelConfig {
            params,
            jumps,
            source: None,
            jump_table,
        })
    }
}

/// Parses a config from `reader`; `path` labels errors and `base` resolves `jump_table`.
pub fn parse<R: BufRead>(reader: R, path: &Path, base: &Path) -> Result<ModelConfig> {
    let mut raw = RawConfig::default();
    let mut seen: Vec<(String, usize)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| config_err(path, lineno, e.to_string()))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| config_err(path, lineno, format!("expected `key = value`, got `{body}`")))?;
        let key = key.trim();
        if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
            return Err(config_err(
                path,
                lineno,
                format!("duplicate key `{key}` (first set on line {first})"),
            ));
        }
        seen.push((key.to_string(), lineno));
        raw.assign(key, value.trim(), path, lineno)?;
    }
    raw.finish(path, base)
}

/// Parses config text; `jump_table` paths resolve against the working directory.
pub fn parse_str(text: &str) -> Result<ModelConfig> {
    let base = std::env::current_dir().unwrap_or_default();
    parse(text.as_bytes(), Path::new("<string>"), &base)
}
