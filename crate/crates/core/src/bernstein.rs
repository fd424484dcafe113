//! The Bernstein function attached to a jump-diffusion and its product `W_phi`.
//!
//! ```text
//! phi(u) = u + (2 / sigma^2) (mu - hbar - sigma^2 / 2 + int_0^inf (1 - e^{-u r}) Pi_bar(r) dr)
//! W_phi(1) = 1,  W_phi(n + 1) = phi(n) W_phi(n)
//! ```
//!
//! `W_phi` plays the role of the gamma function in the generalised
//! hypergeometric series; for `Pi = 0` it reduces to a Pochhammer symbol.

use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::jumps::JumpMeasure;
use crate::params::ReducedModel;

/// `phi(0)` below this is accepted but logged: every `W_phi(n)` carries it as a factor.
pub const BORDERLINE_PHI0: f64 = 1e-12;

/// `W_phi(n)` above this is past the point where linear-scale products are trusted.
pub const WPHI_LINEAR_LIMIT: f64 = 1e300;

/// Outcome of the entrance-boundary test `mu > hbar + sigma^2 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntranceReport {
    pub holds: bool,
    pub mu: f64,
    pub hbar: f64,
    pub half_sigma2: f64,
    pub phi0: f64,
    /// For exponential jumps: `(sigma^2 / 2, mu - 1 / alpha)`.
    pub exponential_form: Option<(f64, f64)>,
    pub borderline: bool,
}

impl fmt::Display for EntranceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu = {} {} hbar + sigma^2/2 = {} + {} (phi(0) = {})",
            self.mu,
            if self.holds { ">" } else { "<=" },
            self.hbar,
            self.half_sigma2,
            self.phi0
        )?;
        if let Some((lhs, rhs)) = self.exponential_form {
            write!(
                f,
                "; exponential form sigma^2/2 = {lhs} {} mu - 1/alpha = {rhs}",
                if lhs < rhs { "<" } else { ">=" }
            )?;
        }
        if self.borderline {
            write!(f, "; warning: phi(0) is within {BORDERLINE_PHI0:e} of zero")?;
        }
        Ok(())
    }
}

/// Checks that 0 is an entrance boundary, i.e. `phi(0) > 0`.
pub fn entrance_check(m: &ReducedModel, j: &JumpMeasure) -> EntranceReport {
    let hbar = j.hbar();
    let half_sigma2 = m.sigma2 / 2.0;
    let phi0 = 2.0 / m.sigma2 * (m.mu - hbar - half_sigma2);
    let holds = m.mu > hbar + half_sigma2;
    EntranceReport {
        holds,
        mu: m.mu,
        hbar,
        half_sigma2,
        phi0,
        exponential_form: j.alpha().map(|alpha| (half_sigma2, m.mu - 1.0 / alpha)),
        borderline: holds && phi0 < BORDERLINE_PHI0,
    }
}

#[derive(Debug, Default)]
struct WCache {
    /// `log W_phi(n)` at index `n - 1`.
    log_w: Vec<f64>,
    /// `W_phi(n)` at index `n - 1`; may be `inf` past the linear range.
    w: Vec<f64>,
    /// `phi(k)` at index `k`.
    phi_at: Vec<f64>,
}

/// `phi` for a fixed model and jump law, with a growable `W_phi` table.
///
/// The table is behind a lock so the evaluator can be shared across threads.
#[derive(Debug)]
pub struct BernsteinPhi {
    reduced: ReducedModel,
    jumps: JumpMeasure,
    phi0: f64,
    cache: RwLock<WCache>,
}

impl Clone for BernsteinPhi {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("W_phi cache poisoned");
        Self {
            reduced: self.reduced,
            jumps: self.jumps.clone(),
            phi0: self.phi0,
            cache: RwLock::new(WCache {
                log_w: cache.log_w.clone(),
                w: cache.w.clone(),
                phi_at: cache.phi_at.clone(),
            }),
        }
    }
}

impl BernsteinPhi {
    /// Fails unless `mu > hbar + sigma^2 / 2`.
    pub fn new(reduced: ReducedModel, jumps: JumpMeasure) -> Result<Self> {
        let report = entrance_check(&reduced, &jumps);
        if !report.holds {
            return Err(Error::Entrance(report.to_string()));
        }
        if report.borderline {
            log::warn!("{report}");
        }
        let b = Self {
            reduced,
            jumps,
            phi0: report.phi0,
            cache: RwLock::new(WCache::default()),
        };
        let phi_zero = b.phi(0.0);
        *b.cache.write().expect("W_phi cache poisoned") = WCache {
            log_w: vec![0.0],
            w: vec![1.0],
            phi_at: vec![phi_zero],
        };
        Ok(b)
    }

    pub fn reduced(&self) -> &ReducedModel {
        &self.reduced
    }

    pub fn jumps(&self) -> &JumpMeasure {
        &self.jumps
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// `phi(u)` for `u >= 0`. Exponential jumps use the rational closed form.
    pub fn phi(&self, u: f64) -> f64 {
        let m = &self.reduced;
        match &self.jumps {
            JumpMeasure::None => u + 2.0 * m.mu / m.sigma2 - 1.0,
            JumpMeasure::Exponential { alpha } => {
                u + 2.0 / m.sigma2 * (m.mu - 1.0 / (u + alpha)) - 1.0
            }
            _ => self.phi_integral_form(u),
        }
    }

    /// `phi(u)` assembled term by term from `hbar` and the tail integral.
    pub fn phi_integral_form(&self, u: f64) -> f64 {
        let m = &self.reduced;
        let j = &self.jumps;
        u + 2.0 / m.sigma2 * (m.mu - j.hbar() - m.sigma2 / 2.0 + j.tail_complement(u))
    }

    fn extend_to(&self, n: usize) {
        {
            let cache = self.cache.read().expect("W_phi cache poisoned");
            if cache.log_w.len() >= n {
                return;
            }
        }
        let mut cache = self.cache.write().expect("W_phi cache poisoned");
        while cache.log_w.len() < n {
            let k = cache.log_w.len(); // next entry is W_phi(k + 1) = phi(k) W_phi(k)
            let f = self.phi(k as f64);
            let log_next = cache.log_w[k - 1] + f.ln();
            let next = cache.w[k - 1] * f;
            cache.log_w.push(log_next);
            cache.w.push(next);
            cache.phi_at.push(f);
        }
    }

    /// `phi(k)` at a nonnegative integer, served from the table.
    pub fn phi_int(&self, k: usize) -> f64 {
        self.extend_to(k + 1);
        self.cache.read().expect("W_phi cache poisoned").phi_at[k]
    }

    /// `W_phi(n)` for `n >= 1`.
    ///
    /// Values past [`WPHI_LINEAR_LIMIT`] are reported as a range error;
    /// [`log_wphi`](Self::log_wphi) stays available there.
    pub fn wphi(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("W_phi is indexed from n = 1".into()));
        }
        self.extend_to(n);
        let cache = self.cache.read().expect("W_phi cache poisoned");
        let w = cache.w[n - 1];
        if !w.is_finite() || w > WPHI_LINEAR_LIMIT {
            return Err(Error::Range(format!(
                "W_phi({n}) = exp({}) exceeds the linear range",
                cache.log_w[n - 1]
            )));
        }
        Ok(w)
    }

    /// `ln W_phi(n)` for `n >= 1`.
    pub fn log_wphi(&self, n: usize) -> f64 {
        assert!(n >= 1, "W_phi is indexed from n = 1");
        self.extend_to(n);
        self.cache.read().expect("W_phi cache poisoned").log_w[n - 1]
    }

    /// Number of cached `W_phi` entries.
    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("W_phi cache poisoned").log_w.len()
    }
}

/// The input-dependent exponential law with `alpha = mu - 1`, for `mu > 2`.
///
/// Uses `sigma^2 = 2`, for which `phi(u) = (u + mu)(u + mu - 2) / (u + mu - 1)`
/// and `phi(0) = mu (mu - 2) / (mu - 1)`.
pub fn special_preset(mu: f64, lambda: f64, y: f64, a: f64) -> Result<(ReducedModel, JumpMeasure)> {
    if !(mu > 2.0 && mu.is_finite()) {
        return Err(Error::invalid(
            "mu",
            mu,
            "mu > 2 (otherwise phi(0) = mu (mu - 2) / (mu - 1) <= 0)",
        ));
    }
    let model = ReducedModel::new(lambda, mu, 2.0, y, a)?;
    Ok((model, JumpMeasure::exponential(mu - 1.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(mu: f64, sigma2: f64) -> ReducedModel {
        ReducedModel::new(mu + 1.0, mu, sigma2, 0.1, 0.5).unwrap()
    }

    #[test]
    fn entrance_examples() {
        let r = entrance_check(&model(2.0, 2.0), &JumpMeasure::None);
        assert!(r.holds);
        assert_eq!(r.phi0, 1.0);

        let r = entrance_check(&model(1.0, 1.0), &JumpMeasure::exponential(1.0).unwrap());
        assert!(!r.holds);
        let (lhs, rhs) = r.exponential_form.unwrap();
        assert_eq!(rhs - lhs, -0.5);
        assert!(r.to_string().contains("mu - 1/alpha"));
    }

    #[test]
    fn entrance_is_strict() {
        // mu = hbar + sigma^2/2 exactly
        let r = entrance_check(&model(1.5, 2.0), &JumpMeasure::exponential(2.0).unwrap());
        assert!(!r.holds);
        assert!(BernsteinPhi::new(model(1.5, 2.0), JumpMeasure::exponential(2.0).unwrap()).is_err());
    }

    #[test]
    fn borderline_flagged() {
        let m = model(1.0 + 1e-14, 2.0);
        let r = entrance_check(&m, &JumpMeasure::None);
        assert!(r.holds && r.borderline);
    }

    #[test]
    fn phi_examples() {
        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::None).unwrap();
        for u in [0.0, 1.0, 7.5] {
            assert_eq!(b.phi(u), u + 1.0);
        }
        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::exponential(2.0).unwrap()).unwrap();
        assert!((b.phi(0.0) - 0.5).abs() < 1e-15);

        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::exponential(3.0).unwrap()).unwrap();
        let s2 = 2f64.sqrt();
        for u in [0.0, 0.5, 1.0, 4.0, 50.0] {
            let factored = (u + 2.0 + s2) * (u + 2.0 - s2) / (u + 3.0);
            let poly = (u * u + 4.0 * u + 2.0) / (u + 3.0);
            assert!((b.phi(u) - factored).abs() < 1e-13 * factored.max(1.0));
            assert!((b.phi(u) - poly).abs() < 1e-13 * poly.max(1.0));
        }
    }

    #[test]
    fn phi_requires_entrance() {
        assert!(matches!(
            BernsteinPhi::new(model(1.0, 1.0), JumpMeasure::exponential(1.0).unwrap()),
            Err(Error::Entrance(_))
        ));
    }

    #[test]
    fn wphi_examples() {
        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::None).unwrap();
        assert_eq!(b.wphi(1).unwrap(), 1.0);
        // phi(u) = u + 1 => W(n + 1) = (n + 1)! = (2)_n
        let mut fact = 1.0;
        for n in 1..20usize {
            fact *= (n + 1) as f64;
            assert!((b.wphi(n + 1).unwrap() - fact).abs() <= 1e-15 * fact);
        }
        assert!(b.wphi(0).is_err());

        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::exponential(3.0).unwrap()).unwrap();
        let phi = |u: f64| (u * u + 4.0 * u + 2.0) / (u + 3.0);
        let direct = phi(1.0) * phi(2.0) * phi(3.0);
        // (k+ + 1)_3 (k- + 1)_3 / (alpha + 1)_3 with k = 2 +- sqrt 2
        let s2 = 2f64.sqrt();
        let poch = |x: f64, n: usize| (0..n).map(|k| x + k as f64).product::<f64>();
        let ratio = poch(3.0 + s2, 3) * poch(3.0 - s2, 3) / poch(4.0, 3);
        assert!((b.wphi(4).unwrap() - direct).abs() < 1e-13 * direct);
        assert!((b.wphi(4).unwrap() - ratio).abs() < 1e-13 * direct);
    }

    #[test]
    fn wphi_overflow_is_a_range_error() {
        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::None).unwrap();
        // 171! overflows
        assert!(matches!(b.wphi(400), Err(Error::Range(_))));
        let ln_400_fact: f64 = (1..=400).map(|k| (k as f64).ln()).sum();
        assert!((b.log_wphi(400) - ln_400_fact).abs() < 1e-9 * ln_400_fact);
    }

    #[test]
    fn special_preset_examples() {
        let (m, j) = special_preset(3.0, 4.0, 0.1, 0.5).unwrap();
        let b = BernsteinPhi::new(m, j).unwrap();
        assert!((b.phi0() - 1.5).abs() < 1e-15);
        assert!((b.phi(0.0) - 1.5).abs() < 1e-15);

        let (m, j) = special_preset(2.5, 4.0, 0.1, 0.5).unwrap();
        let b = BernsteinPhi::new(m, j).unwrap();
        for u in [0.0, 1.0, 3.0, 20.0] {
            let f = (u + 2.5) * (u + 0.5) / (u + 1.5);
            assert!((b.phi(u) - f).abs() < 1e-13 * f);
        }
        assert!(special_preset(2.0, 4.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn shared_across_threads() {
        let b = BernsteinPhi::new(model(2.0, 2.0), JumpMeasure::exponential(3.0).unwrap()).unwrap();
        std::thread::scope(|s| {
            for t in 0..4 {
                let b = &b;
                s.spawn(move || {
                    for n in (1..=150).rev().skip(t) {
                        let _ = b.log_wphi(n);
                    }
                });
            }
        });
        assert_eq!(b.cached_len(), 150);
        for n in 1..150 {
            let lhs = b.log_wphi(n + 1);
            let rhs = b.log_wphi(n) + b.phi(n as f64).ln();
            assert_eq!(lhs, rhs);
        }
    }
}
