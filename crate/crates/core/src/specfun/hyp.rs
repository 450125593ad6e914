//! Gauss hypergeometric function `2F1(a, b; c; z)` for real arguments with
//! `z < 1`.
//!
//! Negative arguments are brought into `[0, 1)` with the Pfaff transformation
//! `2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))` (and its mirror in `b`).
//! Chaining both Pfaff steps gives the Euler form
//! `(1-z)^(c-a-b) 2F1(c-a, c-b; c; z)`, which keeps `z` but can turn a
//! non-terminating series into a terminating one. When several
//! representations terminate, the one whose finite sum cancels least is used.

use super::lognum::LogNumber;
use crate::error::{domain, Error, Result};

/// Parameters closer than this to a non-positive integer are treated as one.
pub const TERMINATION_SLACK: f64 = 1e-9;
/// Relative truncation tolerance for non-terminating series.
pub const SERIES_TOLERANCE: f64 = 1e-13;
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// Arithmetic needed to accumulate a hypergeometric series in some number
/// type. `scale(num, den)` multiplies by `num / den`, where both are small
/// integers or half-integers and therefore exact in `f64`.
pub trait SeriesScalar: Clone {
    fn scale(&self, num: f64, den: f64) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn abs(&self) -> Self;
    fn ln_abs(&self) -> f64;
}

impl SeriesScalar for LogNumber {
    fn scale(&self, num: f64, den: f64) -> Self {
        *self * LogNumber::from_f64(num) / LogNumber::from_f64(den)
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn add(&self, other: &Self) -> Self {
        *self + *other
    }
    fn abs(&self) -> Self {
        LogNumber::abs(*self)
    }
    fn ln_abs(&self) -> f64 {
        self.log_magnitude()
    }
}

/// `Some(p)` if `x` is within [`TERMINATION_SLACK`] of `-p`, `p >= 0`.
pub fn nonpositive_integer(x: f64) -> Option<u64> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= TERMINATION_SLACK {
        Some((-r) as u64)
    } else {
        None
    }
}

/// One way of writing `2F1(a,b;c;z)`: `(1-z)^prefactor_exponent * 2F1(a,b;c;w)`
/// with `w = z` or `w = z/(z-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representation {
    pub kind: RepresentationKind,
    pub prefactor_exponent: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentationKind {
    Direct,
    PfaffA,
    PfaffB,
    Euler,
}

impl RepresentationKind {
    pub fn transforms_argument(self) -> bool {
        matches!(self, RepresentationKind::PfaffA | RepresentationKind::PfaffB)
    }
}

impl Representation {
    /// Number of non-trivial terms if the series terminates.
    pub fn degree(&self) -> Option<u64> {
        match (nonpositive_integer(self.a), nonpositive_integer(self.b)) {
            (Some(p), Some(q)) => Some(p.min(q)),
            (Some(p), None) | (None, Some(p)) => Some(p),
            (None, None) => None,
        }
    }

    /// Parameters with the terminating one snapped to its exact integer.
    pub fn terminating_parameters(&self) -> (f64, f64) {
        let snap = |x: f64| nonpositive_integer(x).map_or(x, |p| -(p as f64));
        (snap(self.a), snap(self.b))
    }
}

fn representations(a: f64, b: f64, c: f64) -> [Representation; 4] {
    use RepresentationKind::*;
    [
        Representation { kind: Direct, prefactor_exponent: 0.0, a, b, c },
        Representation { kind: PfaffA, prefactor_exponent: -a, a, b: c - b, c },
        Representation { kind: PfaffB, prefactor_exponent: -b, a: b, b: c - a, c },
        Representation { kind: Euler, prefactor_exponent: c - a - b, a: c - a, b: c - b, c },
    ]
}

/// Finite sum `sum_{k=0}^{degree} (a)_k (b)_k / ((c)_k k!) w^k`, together with
/// `sum |t_k|` for conditioning.
pub fn terminating_sum<T: SeriesScalar>(
    a: f64,
    b: f64,
    c: f64,
    w: &T,
    degree: u64,
    one: &T,
) -> (T, T) {
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut abs_sum = one.clone();
    for k in 0..degree {
        let k = k as f64;
        term = term.scale((a + k) * (b + k), (c + k) * (k + 1.0)).mul(w);
        sum = sum.add(&term);
        abs_sum = abs_sum.add(&term.abs());
    }
    (sum, abs_sum)
}

fn check_parameters(a: f64, b: f64, c: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(domain(format!("non-finite 2F1 parameter ({a}, {b}, {c})")));
    }
    if let Some(q) = nonpositive_integer(c) {
        let direct = representations(a, b, c)[0];
        match direct.degree() {
            Some(p) if p <= q => {}
            _ => {
                return Err(domain(format!(
                    "2F1 undefined: c = {c} is a non-positive integer and the series does not terminate before it"
                )))
            }
        }
    }
    Ok(())
}

/// The best-conditioned terminating representation for argument `z`
/// (given in log form so that `z = -e^x` never overflows), or `None` when no
/// representation terminates.
pub fn plan_terminating(a: f64, b: f64, c: f64, z: LogNumber) -> Result<Option<Representation>> {
    check_parameters(a, b, c)?;
    let c_is_pole = nonpositive_integer(c).is_some();
    let below_one = z.to_f64() < 1.0;
    let transformed = z / (z - LogNumber::ONE);
    let mut best: Option<(f64, Representation)> = None;
    for rep in representations(a, b, c) {
        if rep.kind != RepresentationKind::Direct && (c_is_pole || !below_one) {
            continue;
        }
        let Some(degree) = rep.degree() else { continue };
        let w = if rep.kind.transforms_argument() { transformed } else { z };
        let (a2, b2) = rep.terminating_parameters();
        let (sum, abs_sum) = terminating_sum(a2, b2, rep.c, &w, degree, &LogNumber::ONE);
        let cancellation = if sum.is_zero() {
            f64::INFINITY
        } else {
            abs_sum.log_magnitude() - sum.log_magnitude()
        };
        if best.map_or(true, |(c0, _)| cancellation < c0) {
            best = Some((cancellation, rep));
        }
    }
    Ok(best.map(|(_, rep)| rep))
}

fn evaluate_plan(rep: &Representation, z: LogNumber) -> LogNumber {
    let w = if rep.kind.transforms_argument() {
        z / (z - LogNumber::ONE)
    } else {
        z
    };
    let (a, b) = rep.terminating_parameters();
    let degree = rep.degree().expect("plan must terminate");
    let (sum, _) = terminating_sum(a, b, rep.c, &w, degree, &LogNumber::ONE);
    if rep.prefactor_exponent == 0.0 {
        sum
    } else {
        (LogNumber::ONE - z).powf(rep.prefactor_exponent) * sum
    }
}

/// `2F1(a, b; c; z)` in log form.
pub fn hyp2f1_log(a: f64, b: f64, c: f64, z: LogNumber) -> Result<LogNumber> {
    if z.is_zero() {
        check_parameters(a, b, c)?;
        return Ok(LogNumber::ONE);
    }
    if let Some(rep) = plan_terminating(a, b, c, z)? {
        return Ok(evaluate_plan(&rep, z));
    }
    let zf = z.to_f64();
    if zf >= 1.0 {
        return Err(domain(format!(
            "2F1 argument z = {zf} outside the supported domain z < 1"
        )));
    }
    if zf < 0.0 {
        // Pfaff in `a`: argument moves into (0, 1).
        let w = zf / (zf - 1.0);
        let s = series(a, c - b, c, w)?;
        Ok(LogNumber::from_f64(s) * (LogNumber::ONE - z).powf(-a))
    } else {
        Ok(LogNumber::from_f64(series(a, b, c, zf)?))
    }
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z < 1`.
///
/// Terminating cases (a or b a non-positive integer) are summed exactly as
/// finite sums in log-compensated arithmetic; the other cases use the Pfaff
/// transformation for `z < 0` and the defining series for `0 <= z < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(domain(format!("non-finite 2F1 argument {z}")));
    }
    hyp2f1_log(a, b, c, LogNumber::from_f64(z)).map(LogNumber::to_f64)
}

/// The defining power series summed as-is; requires `|z| < 1`.
pub fn hyp2f1_direct(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    check_parameters(a, b, c)?;
    if !(z.abs() < 1.0) {
        return Err(domain(format!("direct 2F1 series needs |z| < 1, got {z}")));
    }
    series(a, b, c, z)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if let Some(degree) = representations(a, b, c)[0].degree() {
        let (sum, _) = terminating_sum(a, b, c, &LogNumber::from_f64(z), degree, &LogNumber::ONE);
        return Ok(sum.to_f64());
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut compensation = 0.0_f64;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        term *= ratio;
        // Kahan summation
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        let rho = ratio.abs().max(z.abs());
        if rho < 1.0 && term.abs() * rho / (1.0 - rho) <= SERIES_TOLERANCE * sum.abs() {
            return Ok(sum);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_SERIES_TERMS,
        partial_sum: sum,
        last_term: term,
    })
}
