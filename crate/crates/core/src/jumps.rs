//! Finite jump measures `Pi` on `(0, inf)`.
//!
//! In unit coordinates a jump moves the state from `y` to `exp(-r) y`, with
//! `r` drawn from `Pi / m` at total rate `m / y`. Everything the analytic
//! layer needs from `Pi` goes through the tail `Pi_bar(r) = Pi((r, inf))`:
//! the mass `m`, the mean `hbar = int r Pi(dr) = int Pi_bar`, and the
//! transform `int exp(-u r) Pi_bar(r) dr`.

use std::io::BufRead;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};

/// Downward jump law.
///
/// `Exponential(alpha)` is normalised as `Pi(dr) = alpha exp(-alpha r) dr`,
/// so `m = 1`, `Pi_bar(r) = exp(-alpha r)` and `hbar = 1 / alpha`.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpMeasure {
    None,
    Exponential { alpha: f64 },
    Tabulated(TabulatedDensity),
    /// Sum of measures; tails add.
    Superposition(Vec<JumpMeasure>),
}

impl JumpMeasure {
    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", alpha, "alpha >= 1"));
        }
        Ok(JumpMeasure::Exponential { alpha })
    }

    /// Exponential rate when this is an exponential law.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            JumpMeasure::Exponential { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn is_none(&self) -> bool {
        match self {
            JumpMeasure::None => true,
            JumpMeasure::Superposition(parts) => parts.iter().all(JumpMeasure::is_none),
            _ => false,
        }
    }

    /// Total mass `m = Pi((0, inf))`.
    pub fn mass(&self) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Exponential { .. } => 1.0,
            JumpMeasure::Tabulated(t) => t.mass,
            JumpMeasure::Superposition(parts) => parts.iter().map(JumpMeasure::mass).sum(),
        }
    }

    /// `hbar = int_0^inf r Pi(dr) = int_0^inf Pi_bar(r) dr`.
    pub fn hbar(&self) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Exponential { alpha } => 1.0 / alpha,
            JumpMeasure::Tabulated(t) => t.hbar,
            JumpMeasure::Superposition(parts) => parts.iter().map(JumpMeasure::hbar).sum(),
        }
    }

    /// Tail `Pi_bar(r)`.
    pub fn tail(&self, r: f64) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Exponential { alpha } => (-alpha * r).exp(),
            JumpMeasure::Tabulated(t) => t.tail(r),
            JumpMeasure::Superposition(parts) => parts.iter().map(|p| p.tail(r)).sum(),
        }
    }

    /// `int_0^inf exp(-u r) Pi_bar(r) dr` for `u >= 0`.
    pub fn tail_laplace(&self, u: f64) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Exponential { alpha } => 1.0 / (u + alpha),
            JumpMeasure::Tabulated(t) => t.tail_laplace(u),
            JumpMeasure::Superposition(parts) => parts.iter().map(|p| p.tail_laplace(u)).sum(),
        }
    }

    /// `int_0^inf (1 - exp(-u r)) Pi_bar(r) dr`, the jump part of `phi`.
    pub fn tail_complement(&self, u: f64) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Exponential { alpha } => u / (alpha * (u + alpha)),
            JumpMeasure::Tabulated(t) => t.tail_complement(u),
            JumpMeasure::Superposition(parts) => {
                parts.iter().map(|p| p.tail_complement(u)).sum()
            }
        }
    }

    /// `int_0^inf exp(-r) Pi_bar(r) dr`; the jump correction to the stationary mean.
    pub fn exp_tail_moment(&self) -> f64 {
        self.tail_laplace(1.0)
    }

    /// Draws `r` from the normalised measure `Pi / m`. Must not be called when `m = 0`.
    pub fn sample_amplitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpMeasure::None => unreachable!("sampling from the zero measure"),
            JumpMeasure::Exponential { alpha } => Exp::new(*alpha)
                .expect("alpha validated at construction")
                .sample(rng),
            JumpMeasure::Tabulated(t) => t.sample(rng.random::<f64>()),
            JumpMeasure::Superposition(parts) => {
                let total = self.mass();
                let mut pick = rng.random::<f64>() * total;
                let live: Vec<&JumpMeasure> = parts.iter().filter(|p| p.mass() > 0.0).collect();
                for (k, part) in live.iter().enumerate() {
                    let m = part.mass();
                    if pick < m || k + 1 == live.len() {
                        return part.sample_amplitude(rng);
                    }
                    pick -= m;
                }
                unreachable!("superposition with zero mass")
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            JumpMeasure::None => "none".to_string(),
            JumpMeasure::Exponential { alpha } => format!("exponential(alpha={alpha})"),
            JumpMeasure::Tabulated(t) => format!("tabulated({} points)", t.r.len()),
            JumpMeasure::Superposition(parts) => {
                let inner: Vec<String> = parts.iter().map(JumpMeasure::describe).collect();
                format!("sum[{}]", inner.join(" + "))
            }
        }
    }
}

/// Jump density given on a grid, interpolated linearly between nodes.
///
/// The density is zero below the first node and beyond the last one. The
/// mass, the tail at the nodes and the inverse CDF are exact for the
/// piecewise-linear interpolant. Functionals of the tail (`hbar`, the
/// Laplace transform) use the trapezoidal rule on the same grid, so they
/// depend on the grid resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    r: Vec<f64>,
    density: Vec<f64>,
    /// Mass to the left of each node.
    cum: Vec<f64>,
    /// `Pi_bar` at each node.
    tail_at: Vec<f64>,
    /// Trapezoid weights.
    weights: Vec<f64>,
    mass: f64,
    hbar: f64,
}

impl TabulatedDensity {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(
                "a tabulated jump density needs at least two grid points".into(),
            ));
        }
        let (r, density): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        for (k, (&rk, &dk)) in r.iter().zip(&density).enumerate() {
            if !(rk.is_finite() && dk.is_finite()) {
                return Err(Error::Domain(format!("non-finite entry at grid row {}", k + 1)));
            }
            if rk <= 0.0 && !(k == 0 && rk == 0.0) {
                return Err(Error::Domain(format!("grid row {}: r = {rk} must be > 0", k + 1)));
            }
            if dk < 0.0 {
                return Err(Error::Domain(format!(
                    "grid row {}: density {dk} is negative",
                    k + 1
                )));
            }
            if k > 0 && rk <= r[k - 1] {
                return Err(Error::Domain(format!(
                    "grid row {}: r = {rk} is not strictly increasing",
                    k + 1
                )));
            }
        }

        let n = r.len();
        let mut cum = vec![0.0; n];
        for k in 1..n {
            cum[k] = cum[k - 1] + 0.5 * (density[k] + density[k - 1]) * (r[k] - r[k - 1]);
        }
        let mass = cum[n - 1];
        if mass <= 0.0 {
            return Err(Error::Domain("tabulated jump density has zero mass".into()));
        }
        let tail_at: Vec<f64> = cum.iter().map(|c| (mass - c).max(0.0)).collect();

        let mut weights = vec![0.0; n];
        for k in 0..n - 1 {
            let h = r[k + 1] - r[k];
            weights[k] += 0.5 * h;
            weights[k + 1] += 0.5 * h;
        }
        let hbar =
            mass * r[0] + weights.iter().zip(&tail_at).map(|(w, t)| w * t).sum::<f64>();

        Ok(Self {
            r,
            density,
            cum,
            tail_at,
            weights,
            mass,
            hbar,
        })
    }

    /// Reads whitespace-separated `(r, density)` rows; `#` starts a comment.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut points = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let cols: Vec<&str> = body.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Domain(format!(
                    "jump table line {}: expected two columns, found {}",
                    k + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Domain(format!("jump table line {}: `{s}` is not a number", k + 1))
                })
            };
            points.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::new(points)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().copied().zip(self.density.iter().copied())
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    fn tail(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            return self.mass;
        }
        if x >= self.r[n - 1] {
            return 0.0;
        }
        let k = self.r.partition_point(|&rk| rk <= x) - 1;
        let s = x - self.r[k];
        let h = self.r[k + 1] - self.r[k];
        let slope = (self.density[k + 1] - self.density[k]) / h;
        let left_of_x = self.cum[k] + self.density[k] * s + 0.5 * slope * s * s;
        (self.mass - left_of_x).max(0.0)
    }

    fn tail_laplace(&self, u: f64) -> f64 {
        let r0 = self.r[0];
        // Pi_bar = m on (0, r0)
        let head = if u == 0.0 {
            self.mass * r0
        } else {
            self.mass * -(-u * r0).exp_m1() / u
        };
        let grid: f64 = self
            .weights
            .iter()
            .zip(&self.tail_at)
            .zip(&self.r)
            .map(|((w, t), r)| w * t * (-u * r).exp())
            .sum();
        head + grid
    }

    fn tail_complement(&self, u: f64) -> f64 {
        let r0 = self.r[0];
        let head = if u == 0.0 {
            0.0
        } else {
            self.mass * (r0 + (-u * r0).exp_m1() / u)
        };
        let grid: f64 = self
            .weights
            .iter()
            .zip(&self.tail_at)
            .zip(&self.r)
            .map(|((w, t), r)| -w * t * (-u * r).exp_m1())
            .sum();
        head + grid
    }

    /// Inverse CDF of the normalised density at `p` in `[0, 1)`.
    fn sample(&self, p: f64) -> f64 {
        let target = p * self.mass;
        let n = self.r.len();
        let k = (self.cum.partition_point(|&c| c <= target).max(1) - 1).min(n - 2);
        let t = target - self.cum[k];
        let h = self.r[k + 1] - self.r[k];
        let f0 = self.density[k];
        let slope = (self.density[k + 1] - f0) / h;
        // f0 s + slope s^2 / 2 = t, in the cancellation-free form
        let disc = (f0 * f0 + 2.0 * slope * t).max(0.0);
        let denom = f0 + disc.sqrt();
        let s = if denom > 0.0 { 2.0 * t / denom } else { 0.0 };
        self.r[k] + s.clamp(0.0, h)
    }
}
