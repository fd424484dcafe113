//! Membrane-level parameters and their reduction to the unit interval.
//!
//! The voltage process lives on `[V_I, V_E]`. The affine map
//! `h(x) = (x - V_I) / (V_E - V_I)` carries it onto `[0, 1]`, where the
//! generator takes the Jacobi form with drift `mu - lambda * y` and
//! diffusion `sigma^2 / 2 * y (1 - y)`. Units: voltages in mV, times in ms,
//! rates in 1/ms.

use crate::error::{Error, Result};

/// Leaky integrate-and-fire inputs with reversal potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysiologicalParams {
    /// Inhibitory reversal potential (mV, < 0).
    pub v_i: f64,
    /// Excitatory reversal potential (mV, > 0).
    pub v_e: f64,
    /// Membrane time constant (ms).
    pub tau: f64,
    /// Excitatory input rate (1/ms).
    pub nu_e: f64,
    /// Inhibitory input rate (1/ms).
    pub nu_i: f64,
    /// Excitatory amplitude, in (0, 1).
    pub e_amp: f64,
    /// Inhibitory amplitude, in [-1, 0).
    pub i_amp: f64,
    /// Noise intensity (1/ms).
    pub sigma2: f64,
    /// Firing threshold (mV).
    pub threshold: f64,
    /// Reset / starting voltage (mV).
    pub reset: f64,
}

impl PhysiologicalParams {
    /// Parameter set used for the mean-FPT-versus-alpha experiment.
    pub fn fig_alpha() -> Self {
        Self {
            v_i: -10.0,
            v_e: 100.0,
            tau: 15.0,
            nu_e: 2.8,
            nu_i: 1.0,
            e_amp: 0.5,
            i_amp: -1.0,
            sigma2: 0.5,
            threshold: 10.0,
            reset: 0.0,
        }
    }

    /// Parameter set used for the classical versus non-local firing-rate comparison.
    ///
    /// The threshold is placed so that `a = 0.75` and the reset so that `y = 0.09`.
    pub fn fig_comparison() -> Self {
        let (v_i, v_e) = (-10.0, 100.0);
        Self {
            v_i,
            v_e,
            tau: 5.0,
            nu_e: 5.0,
            nu_i: 0.2,
            e_amp: 0.2,
            i_amp: -0.2,
            sigma2: 0.1,
            threshold: v_i + 0.75 * (v_e - v_i),
            reset: v_i + 0.09 * (v_e - v_i),
        }
    }

    /// Parameter set used for the mean-FPT-versus-sigma^2 curves (`nu_i` is varied per curve).
    pub fn fig_sigma() -> Self {
        Self {
            nu_e: 2.1,
            nu_i: 1.5,
            ..Self::fig_alpha()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("V_I", self.v_i),
            ("V_E", self.v_e),
            ("tau", self.tau),
            ("nu_e", self.nu_e),
            ("nu_i", self.nu_i),
            ("e_amp", self.e_amp),
            ("i_amp", self.i_amp),
            ("sigma2", self.sigma2),
            ("S", self.threshold),
            ("x0", self.reset),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, v, "a finite number"));
            }
        }
        if self.v_i >= 0.0 {
            return Err(Error::invalid("V_I", self.v_i, "V_I < 0"));
        }
        if self.v_e <= 0.0 {
            return Err(Error::invalid("V_E", self.v_e, "V_E > 0"));
        }
        if self.tau <= 0.0 {
            return Err(Error::invalid("tau", self.tau, "tau > 0"));
        }
        if self.nu_e <= 0.0 {
            return Err(Error::invalid("nu_e", self.nu_e, "nu_e > 0"));
        }
        if self.nu_i <= 0.0 {
            return Err(Error::invalid("nu_i", self.nu_i, "nu_i > 0"));
        }
        if !(self.e_amp > 0.0 && self.e_amp < 1.0) {
            return Err(Error::invalid("e_amp", self.e_amp, "0 < e_amp < 1"));
        }
        if !(self.i_amp >= -1.0 && self.i_amp < 0.0) {
            return Err(Error::invalid("i_amp", self.i_amp, "-1 <= i_amp < 0"));
        }
        if self.sigma2 <= 0.0 {
            return Err(Error::invalid("sigma2", self.sigma2, "sigma2 > 0"));
        }
        if !(self.threshold > self.v_i && self.threshold < self.v_e) {
            return Err(Error::invalid("S", self.threshold, "V_I < S < V_E"));
        }
        if !(self.reset >= self.v_i && self.reset < self.threshold) {
            return Err(Error::invalid("x0", self.reset, "V_I <= x0 < S"));
        }
        Ok(())
    }

    /// Excitatory drift input `mu_e = e * nu_e`.
    pub fn mu_e(&self) -> f64 {
        self.e_amp * self.nu_e
    }

    /// Inhibitory drift input `mu_i = i * nu_i` (negative).
    pub fn mu_i(&self) -> f64 {
        self.i_amp * self.nu_i
    }

    /// `h(x) = (x - V_I) / (V_E - V_I)`.
    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.v_i) / (self.v_e - self.v_i)
    }

    /// `g(y) = (V_E - V_I) y + V_I`, the inverse of [`to_unit`](Self::to_unit).
    pub fn to_voltage(&self, y: f64) -> f64 {
        (self.v_e - self.v_i) * y + self.v_i
    }

    /// Lower bound on `nu_e` for exponential jumps of parameter `alpha`:
    /// `nu_e > (V_I / (tau (V_E - V_I)) + sigma^2 / 2 + 1 / alpha) / e`.
    pub fn nu_e_entrance_bound(&self, alpha: Option<f64>) -> f64 {
        let hbar = alpha.map_or(0.0, |a| 1.0 / a);
        (self.v_i / (self.tau * (self.v_e - self.v_i)) + self.sigma2 / 2.0 + hbar) / self.e_amp
    }
}

/// The model on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedModel {
    pub lambda: f64,
    pub mu: f64,
    pub sigma2: f64,
    /// Starting point.
    pub y: f64,
    /// Threshold.
    pub a: f64,
}

impl ReducedModel {
    pub fn new(lambda: f64, mu: f64, sigma2: f64, y: f64, a: f64) -> Result<Self> {
        let m = Self {
            lambda,
            mu,
            sigma2,
            y,
            a,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::invalid("sigma2", self.sigma2, "sigma2 > 0"));
        }
        if !self.mu.is_finite() {
            return Err(Error::invalid("mu", self.mu, "a finite number"));
        }
        if !(self.lambda > self.mu && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", self.lambda, format!("lambda > mu = {}", self.mu)));
        }
        if !(0.0..1.0).contains(&self.y) {
            return Err(Error::invalid("y", self.y, "0 <= y < 1"));
        }
        if !(self.a > self.y && self.a <= 1.0) {
            return Err(Error::invalid("a", self.a, format!("y = {} < a <= 1", self.y)));
        }
        Ok(())
    }

    /// `2 lambda / sigma^2`.
    pub fn two_lambda_over_sigma2(&self) -> f64 {
        2.0 * self.lambda / self.sigma2
    }

    /// `lambda / sigma^2 - 1/2`.
    pub fn lambda_bar(&self) -> f64 {
        self.lambda / self.sigma2 - 0.5
    }

    /// Same drift and noise, different start and threshold.
    pub fn with_geometry(&self, y: f64, a: f64) -> Result<Self> {
        Self::new(self.lambda, self.mu, self.sigma2, y, a)
    }
}

/// Maps membrane parameters to the unit-interval model.
///
/// `lambda = 1/tau + mu_e - mu_i`, `mu = mu_e - V_I / (tau (V_E - V_I))`,
/// `y = h(x0)`, `a = h(S)`.
pub fn reduce(p: &PhysiologicalParams) -> Result<ReducedModel> {
    p.validate()?;
    let lambda = 1.0 / p.tau + p.mu_e() - p.mu_i();
    let mu = p.mu_e() - p.v_i / (p.tau * (p.v_e - p.v_i));
    ReducedModel::new(lambda, mu, p.sigma2, p.to_unit(p.reset), p.to_unit(p.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig_alpha_geometry() {
        let m = reduce(&PhysiologicalParams::fig_alpha()).unwrap();
        assert!((m.a - 20.0 / 110.0).abs() < 1e-15);
        assert!((m.y - 10.0 / 110.0).abs() < 1e-15);
        // rounded reference values
        assert!((m.a - 0.18).abs() < 0.005);
        assert!((m.y - 0.09).abs() < 0.005);
    }

    #[test]
    fn fig_alpha_rates_by_hand() {
        // mu_e = 0.5 * 2.8 = 1.4, mu_i = -1 * 1 = -1
        // lambda = 1/15 + 1.4 + 1 = 37/15
        // mu = 1.4 + 10 / (15 * 110) = 1.4 + 1/165
        let m = reduce(&PhysiologicalParams::fig_alpha()).unwrap();
        assert!((m.lambda - 37.0 / 15.0).abs() < 1e-14);
        assert!((m.mu - (1.4 + 1.0 / 165.0)).abs() < 1e-14);
    }

    #[test]
    fn zero_input_limit() {
        // nu -> 0 is outside the validated domain, so check the formula on a tiny input.
        let p = PhysiologicalParams {
            tau: 1.0,
            nu_e: 1e-300,
            nu_i: 1e-300,
            ..PhysiologicalParams::fig_alpha()
        };
        let m = reduce(&p).unwrap();
        assert!((m.lambda - 1.0).abs() < 1e-15);
        assert!((m.mu - 10.0 / 110.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_bounds_by_name() {
        let bad = [
            (
                PhysiologicalParams {
                    v_i: 1.0,
                    ..PhysiologicalParams::fig_alpha()
                },
                "V_I",
            ),
            (
                PhysiologicalParams {
                    e_amp: 1.0,
                    ..PhysiologicalParams::fig_alpha()
                },
                "e_amp",
            ),
            (
                PhysiologicalParams {
                    i_amp: -1.5,
                    ..PhysiologicalParams::fig_alpha()
                },
                "i_amp",
            ),
            (
                PhysiologicalParams {
                    threshold: 150.0,
                    ..PhysiologicalParams::fig_alpha()
                },
                "S",
            ),
            (
                PhysiologicalParams {
                    reset: 10.0,
                    ..PhysiologicalParams::fig_alpha()
                },
                "x0",
            ),
        ];
        for (p, name) in bad {
            match reduce(&p) {
                Err(Error::InvalidParameter { name: n, .. }) => assert_eq!(n, name),
                other => panic!("expected rejection of {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn comparison_preset_geometry() {
        let m = reduce(&PhysiologicalParams::fig_comparison()).unwrap();
        assert!((m.a - 0.75).abs() < 1e-14);
        assert!((m.y - 0.09).abs() < 1e-14);
    }

    #[test]
    fn affine_round_trip() {
        let p = PhysiologicalParams::fig_alpha();
        for k in 0..=1000 {
            let y = k as f64 / 1000.0;
            let back = p.to_unit(p.to_voltage(y));
            assert!((back - y).abs() <= 4.0 * f64::EPSILON, "y={y} back={back}");
        }
        assert_eq!(p.to_voltage(0.0), p.v_i);
        assert_eq!(p.to_voltage(1.0), p.v_e);
    }
}
