//! Pochhammer symbols and hypergeometric-type power series.
//!
//! Every series here is summed from its term ratio,
//! `t_{n+1} = t_n * ratio(n)`, with Neumaier-compensated accumulation and a
//! running power-of-two rescale so large intermediate terms do not overflow.
//! The generalised `2F1(a, b; phi; z)` replaces the `(c)_n` of the Gauss
//! series by `W_phi(n + 1)`, so its ratio is
//! `(a + n)(b + n) z / ((n + 1) phi(n + 1))`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::bernstein::BernsteinPhi;
use crate::error::{Error, Result};

/// Series parameter; complex values arise as conjugate pairs on the Laplace branch.
pub type ComplexParam = Complex64;

/// Largest `z` accepted by the series evaluators.
pub const Z_MAX: f64 = 0.999;

/// Truncation policy for every series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once `streak` consecutive terms are below `rel_tol * |partial sum|`.
    pub rel_tol: f64,
    pub streak: usize,
    pub max_terms: usize,
    /// Sum exactly this many terms instead.
    pub fixed_terms: Option<usize>,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            streak: 3,
            max_terms: 100_000,
            fixed_terms: None,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, streak: usize, max_terms: usize) -> Result<Self> {
        let c = Self {
            rel_tol,
            streak,
            max_terms,
            fixed_terms: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn fixed(terms: usize) -> Self {
        Self {
            fixed_terms: Some(terms),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", self.rel_tol, "rel_tol > 0"));
        }
        if self.streak < 1 {
            return Err(Error::invalid("streak", self.streak as f64, "streak >= 1"));
        }
        if self.max_terms < self.streak {
            return Err(Error::invalid(
                "max_terms",
                self.max_terms as f64,
                format!("max_terms >= streak = {}", self.streak),
            ));
        }
        if self.fixed_terms == Some(0) {
            return Err(Error::invalid("fixed_terms", 0.0, "at least one term"));
        }
        Ok(())
    }
}

/// A summed series and how it was truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    pub converged: bool,
    /// Geometric bound on the discarded tail (`inf` if the terms were not shrinking).
    pub truncation_estimate: f64,
}

impl<T> SeriesResult<T> {
    fn map<U>(self, f: impl FnOnce(T) -> U) -> SeriesResult<U> {
        SeriesResult {
            value: f(self.value),
            terms_used: self.terms_used,
            converged: self.converged,
            truncation_estimate: self.truncation_estimate,
        }
    }
}

/// Field the series driver can sum over.
pub trait SeriesScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn real_part(self) -> f64;
}

impl SeriesScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn real_part(self) -> f64 {
        self
    }
}

impl SeriesScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn real_part(self) -> f64 {
        self.re
    }
}

/// Neumaier sum, one component at a time.
#[derive(Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }
}

/// Accumulator for real or complex terms.
trait Accumulate: SeriesScalar {
    type Acc: Copy;
    fn acc_new() -> Self::Acc;
    fn acc_add(acc: &mut Self::Acc, x: Self);
    fn acc_value(acc: &Self::Acc) -> Self;
    fn acc_scale(acc: &mut Self::Acc, f: f64);
}

impl Accumulate for f64 {
    type Acc = Compensated;
    fn acc_new() -> Compensated {
        Compensated::new()
    }
    fn acc_add(acc: &mut Compensated, x: f64) {
        acc.add(x);
    }
    fn acc_value(acc: &Compensated) -> f64 {
        acc.value()
    }
    fn acc_scale(acc: &mut Compensated, f: f64) {
        acc.scale(f);
    }
}

impl Accumulate for Complex64 {
    type Acc = (Compensated, Compensated);
    fn acc_new() -> Self::Acc {
        (Compensated::new(), Compensated::new())
    }
    fn acc_add(acc: &mut Self::Acc, x: Complex64) {
        acc.0.add(x.re);
        acc.1.add(x.im);
    }
    fn acc_value(acc: &Self::Acc) -> Complex64 {
        Complex64::new(acc.0.value(), acc.1.value())
    }
    fn acc_scale(acc: &mut Self::Acc, f: f64) {
        acc.0.scale(f);
        acc.1.scale(f);
    }
}

/// Rescale threshold and factor (powers of two keep the rescale exact).
const RESCALE_AT: f64 = 1e250;
const RESCALE_EXP: i32 = 800;

/// Sums `first * prod ratio(k)` over `n = 0, 1, ...` under `ctrl`.
#[allow(private_bounds)]
pub(crate) fn sum_by_ratio<T, F>(first: T, ratio: F, ctrl: &SeriesControl) -> Result<SeriesResult<T>>
where
    T: Accumulate,
    F: FnMut(usize) -> T,
{
    sum_by_ratio_weighted(first, ratio, |_| 1.0, ctrl)
}

/// Sums `t_n * weight(n)` where `t_n = first * prod_{k<n} ratio(k)`.
///
/// Truncation is judged on the weighted terms.
#[allow(private_bounds)]
pub(crate) fn sum_by_ratio_weighted<T, F, W>(
    first: T,
    mut ratio: F,
    mut weight: W,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<T>>
where
    T: Accumulate,
    F: FnMut(usize) -> T,
    W: FnMut(usize) -> f64,
{
    ctrl.validate()?;
    let down = 2f64.powi(-RESCALE_EXP);
    let mut acc = T::acc_new();
    let mut scale_exp: i32 = 0;
    let mut term = first;
    let mut prev_mag = f64::NAN;
    let mut small = 0usize;
    let limit = ctrl.fixed_terms.unwrap_or(ctrl.max_terms);

    let tail_bound = |mag: f64, prev: f64| -> f64 {
        if mag == 0.0 {
            0.0
        } else if prev.is_finite() && prev > 0.0 && mag < prev {
            let r = mag / prev;
            mag * r / (1.0 - r)
        } else {
            f64::INFINITY
        }
    };

    let finish = |acc: &T::Acc, scale_exp: i32| -> Result<T> {
        let v = T::acc_value(acc);
        if scale_exp == 0 {
            return Ok(v);
        }
        let f = 2f64.powi(scale_exp);
        let out = v * f;
        if !out.magnitude().is_finite() {
            return Err(Error::Range(format!(
                "series value exceeds the floating-point range (2^{scale_exp} scale)"
            )));
        }
        Ok(out)
    };

    for n in 0..limit {
        let weighted = term * weight(n);
        T::acc_add(&mut acc, weighted);
        let mag = weighted.magnitude();
        if !mag.is_finite() {
            return Err(Error::Range(format!("non-finite series term at n = {n}")));
        }
        let sum_mag = T::acc_value(&acc).magnitude();
        let est = tail_bound(mag, prev_mag);

        if ctrl.fixed_terms.is_none() {
            if mag <= ctrl.rel_tol * sum_mag {
                small += 1;
            } else {
                small = 0;
            }
            if small >= ctrl.streak && est <= ctrl.rel_tol * sum_mag {
                let value = finish(&acc, scale_exp)?;
                return Ok(SeriesResult {
                    value,
                    terms_used: n + 1,
                    converged: true,
                    truncation_estimate: est * 2f64.powi(scale_exp),
                });
            }
        }

        if n + 1 == limit {
            let value = finish(&acc, scale_exp)?;
            let est_abs = est * 2f64.powi(scale_exp);
            if ctrl.fixed_terms.is_some() {
                return Ok(SeriesResult {
                    value,
                    terms_used: limit,
                    converged: est_abs <= ctrl.rel_tol * value.magnitude(),
                    truncation_estimate: est_abs,
                });
            }
            return Err(Error::NonConvergence {
                partial: value.real_part(),
                terms: limit,
            });
        }

        prev_mag = mag;
        term = term * ratio(n);
        if term.magnitude() > RESCALE_AT {
            term = term * down;
            T::acc_scale(&mut acc, down);
            prev_mag *= down;
            scale_exp += RESCALE_EXP;
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// `(a)_n = a (a + 1) ... (a + n - 1)` by running product.
pub fn pochhammer(a: ComplexParam, n: usize) -> ComplexParam {
    (0..n).fold(Complex64::new(1.0, 0.0), |p, k| p * (a + k as f64))
}

/// Real Pochhammer symbol.
pub fn pochhammer_real(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |p, k| p * (a + k as f64))
}

fn check_z(z: f64) -> Result<()> {
    if !z.is_finite() || z.abs() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not inside the unit disc", z.abs())));
    }
    if z > Z_MAX {
        return Err(Error::Domain(format!(
            "z = {z} is too close to 1 (limit {Z_MAX}); no analytic continuation is attempted"
        )));
    }
    Ok(())
}

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// `sum_n (a)_n (b)_n / n! * z^n / W_phi(n + 1)`.
///
/// When `b = conj(a)` the terms are real; the imaginary rounding residue is
/// checked against `rel_tol * |value|` and dropped.
pub fn hyp2f1_phi(
    a: ComplexParam,
    b: ComplexParam,
    phi: &BernsteinPhi,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<Complex64>> {
    check_z(z)?;
    let res = sum_by_ratio(
        Complex64::new(1.0, 0.0),
        |n| {
            let k = n as f64;
            (a + k) * (b + k) * (z / ((k + 1.0) * phi.phi_int(n + 1)))
        },
        ctrl,
    )?;
    conjugate_reality(a, b, res, ctrl)
}

fn conjugate_reality(
    a: ComplexParam,
    b: ComplexParam,
    res: SeriesResult<Complex64>,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<Complex64>> {
    if b == a.conj() {
        let v = res.value;
        if v.im.abs() > ctrl.rel_tol * v.re.abs() {
            return Err(Error::ImaginaryResidue { re: v.re, im: v.im });
        }
        return Ok(res.map(|v| Complex64::new(v.re, 0.0)));
    }
    Ok(res)
}

/// [`hyp2f1_phi`] for real parameters.
pub fn hyp2f1_phi_real(
    a: f64,
    b: f64,
    phi: &BernsteinPhi,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<f64>> {
    check_z(z)?;
    sum_by_ratio(
        1.0,
        |n| {
            let k = n as f64;
            (a + k) * (b + k) * z / ((k + 1.0) * phi.phi_int(n + 1))
        },
        ctrl,
    )
}

/// Gauss `2F1(a, b; c; z)` by its defining series.
pub fn gauss_2f1(
    a: ComplexParam,
    b: ComplexParam,
    c: f64,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<Complex64>> {
    check_z(z)?;
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("c = {c} is a nonpositive integer")));
    }
    let res = sum_by_ratio(
        Complex64::new(1.0, 0.0),
        |n| {
            let k = n as f64;
            (a + k) * (b + k) * (z / ((c + k) * (k + 1.0)))
        },
        ctrl,
    )?;
    conjugate_reality(a, b, res, ctrl)
}

/// `pFq(num; den; z) = sum_n prod (num_i)_n / prod (den_j)_n * z^n / n!`.
pub fn hyp_pfq(num: &[f64], den: &[f64], z: f64, ctrl: &SeriesControl) -> Result<SeriesResult<f64>> {
    check_z(z)?;
    if let Some(c) = den.iter().find(|&&c| is_nonpositive_integer(c)) {
        return Err(Error::Domain(format!(
            "denominator parameter {c} is a nonpositive integer"
        )));
    }
    sum_by_ratio(
        1.0,
        |n| {
            let k = n as f64;
            let up: f64 = num.iter().map(|p| p + k).product();
            let down: f64 = den.iter().map(|p| p + k).product();
            up / down * z / (k + 1.0)
        },
        ctrl,
    )
}

/// `d/da 2F1(a, b; phi; z)` at `a = 0`:
/// `b * sum_n (b + 1)_n / (n + 1) * z^(n+1) / W_phi(n + 2)`.
pub fn d2f1_da_at_zero(b: f64, phi: &BernsteinPhi, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_z(z)?;
    if z == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    let first = z / phi.phi_int(1);
    let s = sum_by_ratio(
        first,
        |n| {
            let k = n as f64;
            (b + 1.0 + k) * z * (k + 1.0) / ((k + 2.0) * phi.phi_int(n + 2))
        },
        ctrl,
    )?;
    Ok(b * s.value)
}

/// `d/db 2F1(a, b; phi; z)` at `a = 0`. Every term of the `b`-derivative
/// carries the factor `a`, so this vanishes identically.
pub fn d2f1_db_at_zero(_b: f64, _phi: &BernsteinPhi, z: f64) -> Result<f64> {
    check_z(z)?;
    Ok(0.0)
}
