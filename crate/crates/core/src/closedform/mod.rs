//! Analytic expressions for the work statistics: the infinite-temperature
//! limits, their large-n asymptotes, the continuum (large-n) approximation
//! for the collective engine, and exact finite-temperature closed forms for
//! both couplings and both parities of n.
//!
//! The finite-temperature closed forms are sums of large terms that cancel
//! down to values as small as `e^{-beta omega n / 2}`; they are evaluated in
//! arbitrary-precision arithmetic and rounded once to f64.

pub mod precise;

use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{log_binomial, plan_terminating, terminating_sum, LogNumber};
use crate::statmech::{ComputationPath, CouplingMode, EngineSpec, WorkStatistics};
use precise::{evaluate_adaptive, Ctx, Mp};

/// `r_max`: the largest `r = n/2 - m` with `m >= 0`.
pub fn r_max(n: u32) -> u32 {
    if n % 2 == 0 {
        n / 2
    } else {
        (n - 1) / 2
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        Err(domain("qubit count n must be at least 1"))
    } else {
        Ok(())
    }
}

/// `<W_col>` as beta -> 0.
pub fn mean_work_hot_collective(n: u32, omega: f64) -> Result<f64> {
    check_n(n)?;
    let nf = f64::from(n);
    Ok(if n % 2 == 1 {
        (nf + 1.0) * omega / 4.0
    } else {
        nf * (nf + 2.0) * omega / (4.0 * (nf + 1.0))
    })
}

/// `<W_ind>` as beta -> 0, via the central binomial coefficient.
pub fn mean_work_hot_independent(n: u32, omega: f64) -> Result<f64> {
    check_n(n)?;
    let nf = f64::from(n);
    let n64 = u64::from(n);
    let log_pow = (nf + 1.0) * LN_2;
    Ok(if n % 2 == 1 {
        (log_binomial(n64, (n64 + 1) / 2)? - log_pow).exp() * (nf + 1.0) * omega
    } else {
        (log_binomial(n64, n64 / 2)? - log_pow).exp() * nf * omega
    })
}

/// `var(W)` as beta -> 0, from the explicit sums over `r = 0..=r_max`.
pub fn variance_hot(n: u32, mode: CouplingMode, omega: f64) -> Result<f64> {
    check_n(n)?;
    let nf = f64::from(n);
    let weight = |r: u32| -> Result<f64> {
        Ok(match mode {
            CouplingMode::Collective => 1.0 / (nf + 1.0),
            CouplingMode::Independent => {
                (log_binomial(u64::from(n), u64::from(r))? - nf * LN_2).exp()
            }
        })
    };
    let mut first = 0.0;
    let mut square = 0.0;
    for r in 0..=r_max(n) {
        let w = nf - 2.0 * f64::from(r);
        let p = weight(r)?;
        first += p * w;
        square += p * w * w;
    }
    Ok(omega * omega * (square - first * first))
}

/// Large-n, beta -> 0 limit of the noise-to-signal ratio.
pub fn nsr_hot_asymptote(mode: CouplingMode) -> f64 {
    match mode {
        CouplingMode::Collective => 5.0 / 3.0,
        CouplingMode::Independent => PI - 1.0,
    }
}

/// Which moment a finite-temperature closed form yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Moment {
    Mean,
    Variance,
}

/// The eight finite-temperature closed forms, one per coupling, moment and
/// parity of n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteTemperatureFormula {
    IndependentMeanEven,
    IndependentMeanOdd,
    CollectiveMeanEven,
    CollectiveMeanOdd,
    IndependentVarianceEven,
    CollectiveVarianceEven,
    IndependentVarianceOdd,
    CollectiveVarianceOdd,
}

impl FiniteTemperatureFormula {
    pub const ALL: [FiniteTemperatureFormula; 8] = [
        FiniteTemperatureFormula::IndependentMeanEven,
        FiniteTemperatureFormula::IndependentMeanOdd,
        FiniteTemperatureFormula::CollectiveMeanEven,
        FiniteTemperatureFormula::CollectiveMeanOdd,
        FiniteTemperatureFormula::IndependentVarianceEven,
        FiniteTemperatureFormula::CollectiveVarianceEven,
        FiniteTemperatureFormula::IndependentVarianceOdd,
        FiniteTemperatureFormula::CollectiveVarianceOdd,
    ];

    pub fn select(mode: CouplingMode, moment: Moment, n: u32) -> Self {
        use CouplingMode::*;
        use FiniteTemperatureFormula::*;
        use Moment::*;
        let even = n % 2 == 0;
        match (mode, moment, even) {
            (Independent, Mean, true) => IndependentMeanEven,
            (Independent, Mean, false) => IndependentMeanOdd,
            (Collective, Mean, true) => CollectiveMeanEven,
            (Collective, Mean, false) => CollectiveMeanOdd,
            (Independent, Variance, true) => IndependentVarianceEven,
            (Independent, Variance, false) => IndependentVarianceOdd,
            (Collective, Variance, true) => CollectiveVarianceEven,
            (Collective, Variance, false) => CollectiveVarianceOdd,
        }
    }

    pub fn id(self) -> &'static str {
        use FiniteTemperatureFormula::*;
        match self {
            IndependentMeanEven => "independent_mean_even",
            IndependentMeanOdd => "independent_mean_odd",
            CollectiveMeanEven => "collective_mean_even",
            CollectiveMeanOdd => "collective_mean_odd",
            IndependentVarianceEven => "independent_variance_even",
            CollectiveVarianceEven => "collective_variance_even",
            IndependentVarianceOdd => "independent_variance_odd",
            CollectiveVarianceOdd => "collective_variance_odd",
        }
    }

    pub fn mode(self) -> CouplingMode {
        use FiniteTemperatureFormula::*;
        match self {
            IndependentMeanEven | IndependentMeanOdd | IndependentVarianceEven
            | IndependentVarianceOdd => CouplingMode::Independent,
            _ => CouplingMode::Collective,
        }
    }

    pub fn moment(self) -> Moment {
        use FiniteTemperatureFormula::*;
        match self {
            IndependentMeanEven | IndependentMeanOdd | CollectiveMeanEven | CollectiveMeanOdd => {
                Moment::Mean
            }
            _ => Moment::Variance,
        }
    }

    pub fn for_even_n(self) -> bool {
        use FiniteTemperatureFormula::*;
        matches!(
            self,
            IndependentMeanEven | CollectiveMeanEven | IndependentVarianceEven | CollectiveVarianceEven
        )
    }
}

impl fmt::Display for FiniteTemperatureFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Shared high-precision quantities for one `(n, beta omega)` point.
struct Point {
    ctx: Ctx,
    n: f64,
    x: Mp,
    e: Mp,
    bw: f64,
}

impl Point {
    fn new(ctx: Ctx, n: u32, bw: f64) -> Point {
        let x = ctx.num(bw);
        let e = x.exp();
        Point { ctx, n: f64::from(n), x, e, bw }
    }

    /// `e^{k beta omega}`
    fn ex(&self, k: f64) -> Mp {
        (&self.x * k).exp()
    }

    fn gamma_half(&self, twice: f64) -> Mp {
        self.ctx.gamma_half(twice as u64)
    }

    /// `2F1(a, b; c; -e^{beta omega})`, which must reduce to a finite sum.
    fn hyp(&self, a: f64, b: f64, c: f64) -> Result<Mp> {
        let z_log = -LogNumber::from_ln(self.bw);
        let rep = plan_terminating(a, b, c, z_log)?.ok_or_else(|| {
            Error::Numerical(format!("2F1({a}, {b}; {c}; z) has no terminating form"))
        })?;
        let z = -&self.e;
        let w = if rep.kind.transforms_argument() {
            &z / (&z - 1.0)
        } else {
            z.clone()
        };
        let (ta, tb) = rep.terminating_parameters();
        let degree = rep.degree().expect("planned representation terminates");
        let (sum, _) = terminating_sum(ta, tb, rep.c, &w, degree, &self.ctx.num(1.0));
        let p = rep.prefactor_exponent;
        Ok(if p == 0.0 {
            sum
        } else if p.fract() == 0.0 {
            (1.0 - &z).powi(p as i64) * sum
        } else {
            ((1.0 - &z).ln() * p).exp() * sum
        })
    }

    fn tanh_half(&self) -> Mp {
        (&self.e - 1.0) / (&self.e + 1.0)
    }

    fn independent_mean_even(&self) -> Result<Mp> {
        let n = self.n;
        let f1 = self.hyp(n / 2.0, n + 1.0, n / 2.0 + 2.0)?;
        let bracket = self.ctx.num(2.0).powi(n as i64)
            * self.gamma_half(n + 1.0)
            * self.ex((n + 2.0) / 2.0)
            * f1
            / (self.ctx.pi().sqrt() * (&self.e + 1.0) * self.gamma_half(n + 4.0));
        Ok((bracket - self.tanh_half()) * n)
    }

    fn independent_mean_odd(&self) -> Result<Mp> {
        let n = self.n;
        let a = (1.0 - n) / 2.0;
        let c = (n + 3.0) / 2.0;
        let combo = self.hyp(2.0, a, c)? * 2.0 - self.hyp(1.0, a, c)?;
        let first = self.ctx.num(2.0).powi(n as i64)
            * self.gamma_half(n + 2.0)
            * self.ex((n + 1.0) / 2.0)
            * combo
            / (self.ctx.pi().sqrt() * self.gamma_half(n + 3.0) * (&self.e + 1.0).powi(n as i64));
        Ok(first - self.tanh_half() * n)
    }

    fn collective_denominator(&self) -> Mp {
        (&self.e - 1.0) * (self.ex(self.n + 1.0) - 1.0)
    }

    fn collective_mean_even(&self) -> Result<Mp> {
        let n = self.n;
        let num = self.ex((n + 2.0) / 2.0) * 2.0 - &self.e * (n + 2.0) + n;
        Ok(num / self.collective_denominator())
    }

    fn collective_mean_odd(&self) -> Result<Mp> {
        let n = self.n;
        let num = self.ex((n + 1.0) / 2.0) + self.ex((n + 3.0) / 2.0) - &self.e * (n + 2.0) + n;
        Ok(num / self.collective_denominator())
    }

    fn independent_variance_even(&self) -> Result<Mp> {
        let n = self.n;
        let e = &self.e;
        let f1 = self.hyp(n / 2.0, n + 1.0, n / 2.0 + 2.0)?;
        let f2 = self.hyp(1.0, 1.0 - n / 2.0, n / 2.0 + 2.0)?;
        let sech2 = e * 4.0 / (e + 1.0).square();
        let g = self.gamma_half(2.0 * n + 2.0) * 2.0 * self.ex(n / 2.0)
            / (self.gamma_half(n + 4.0) * self.gamma_half(n));
        let h = self.ctx.num(2.0).powi(n as i64)
            * n
            * self.gamma_half(n + 1.0)
            * self.ex((n + 2.0) / 2.0)
            * &f1
            / (self.ctx.pi().sqrt() * self.gamma_half(n + 4.0));
        let inner = -h + (e - 1.0) * n - 2.0;
        let brace = self.ctx.num(4.0 * n) + &g * &f1 * inner
            - &g * n * (e + 1.0).powi(1 - n as i64) * f2;
        Ok(sech2 * brace / 4.0)
    }

    fn collective_variance_even(&self) -> Result<Mp> {
        let n = self.n;
        let ex = |k: f64| self.ex(k);
        let brace = -(ex(n) * (n * n)) + ex(1.0 + 1.5 * n) * 4.0 + ex((3.0 * n + 4.0) / 2.0) * 4.0
            - ex(n + 2.0) * ((n + 2.0) * (n + 2.0))
            - ex(n / 2.0) * (4.0 * (n + 1.0))
            + ex((n + 2.0) / 2.0) * (4.0 * (n + 1.0))
            + ex(n + 1.0) * (2.0 * (n * (n + 2.0) - 4.0))
            + 4.0;
        Ok(&self.e * brace / self.collective_denominator().square())
    }

    fn independent_variance_odd(&self) -> Result<Mp> {
        let n = self.n;
        let e = &self.e;
        let pi = self.ctx.pi();
        let f = self.hyp(1.0, (1.0 - n) / 2.0, (n + 3.0) / 2.0)?;
        let cosh = (e + e.recip()) / 2.0;
        let first = self.ctx.num(2.0).powi(2 * n as i64 + 1)
            * self.gamma_half(n + 2.0).square()
            * self.ex(n + 1.0)
            * ((e - 1.0) * n * &f + (n + 1.0)).square();
        let second = &pi
            * (n + 1.0)
            * self.gamma_half(2.0 * n + 2.0)
            * self.ex((n + 1.0) / 2.0)
            * (e + 1.0).powi(n as i64)
            * (-(e * (2.0 * n)) * (cosh * n - n - 2.0) * &f - (e - 1.0) * ((n + 1.0) * (n + 1.0)));
        let inner = (e + 1.0).powi(-2 * n as i64) / (self.gamma_half(n + 3.0).square() * 2.0)
            * (first + second);
        let brace = &pi * 4.0 * n * e - inner;
        Ok(brace / (pi * (e + 1.0).square()))
    }

    fn collective_variance_odd(&self) -> Result<Mp> {
        let n = self.n;
        let ex = |k: f64| self.ex(k);
        let brace = ex(0.5) * 4.0 - ex(0.5 + n) * (n * n + 1.0)
            + ex(1.5 + n) * (2.0 * (n - 1.0) * (n + 3.0))
            + ex(1.0 + 1.5 * n)
            - ex((n + 2.0) / 2.0) * 2.0
            + ex(1.5 * (n + 2.0))
            + ex((3.0 * n + 4.0) / 2.0) * 6.0
            - ex(n / 2.0) * (2.0 * n + 1.0)
            + ex((n + 4.0) / 2.0) * (2.0 * n + 3.0)
            - ex(2.5 + n) * (n * (n + 4.0) + 5.0);
        Ok(ex(0.5) * brace / self.collective_denominator().square())
    }

    /// Formula value in units where omega = 1.
    fn evaluate(&self, formula: FiniteTemperatureFormula) -> Result<Mp> {
        use FiniteTemperatureFormula::*;
        match formula {
            IndependentMeanEven => self.independent_mean_even(),
            IndependentMeanOdd => self.independent_mean_odd(),
            CollectiveMeanEven => self.collective_mean_even(),
            CollectiveMeanOdd => self.collective_mean_odd(),
            IndependentVarianceEven => self.independent_variance_even(),
            CollectiveVarianceEven => self.collective_variance_even(),
            IndependentVarianceOdd => self.independent_variance_odd(),
            CollectiveVarianceOdd => self.collective_variance_odd(),
        }
    }
}

/// Starting precision: enough bits to absorb the expected cancellation
/// (`~ beta omega n` at low temperature, `~ (beta omega)^-4` near beta = 0).
fn starting_bits(n: u32, bw: f64) -> usize {
    let growth = bw * (f64::from(n) + 4.0) / LN_2;
    let small = if bw < 1.0 { 8.0 * (1.0 / bw).log2() } else { 0.0 };
    let size = 4.0 * f64::from(n + 1).log2();
    (128.0 + growth + small + size).ceil() as usize
}

/// Evaluates one finite-temperature closed form at `beta > 0`.
pub fn evaluate_formula(
    formula: FiniteTemperatureFormula,
    n: u32,
    beta: f64,
    omega: f64,
) -> Result<f64> {
    check_n(n)?;
    if formula.for_even_n() != (n % 2 == 0) {
        return Err(domain(format!("formula {formula} does not apply to n = {n}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain(format!(
            "finite-temperature closed forms need 0 < beta < inf, got {beta}"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(domain(format!("omega must be positive, got {omega}")));
    }
    let bw = beta * omega;
    let scaled = evaluate_adaptive(starting_bits(n, bw), |ctx| {
        Point::new(ctx, n, bw).evaluate(formula)
    })?;
    Ok(match formula.moment() {
        Moment::Mean => scaled * omega,
        Moment::Variance => scaled * omega * omega,
    })
}

/// `<W>` at finite temperature from the closed form matching `mode` and the
/// parity of `n`.
pub fn mean_work_finite_t(n: u32, beta: f64, omega: f64, mode: CouplingMode) -> Result<f64> {
    evaluate_formula(FiniteTemperatureFormula::select(mode, Moment::Mean, n), n, beta, omega)
}

/// `var(W)` at finite temperature from the closed form matching `mode` and
/// the parity of `n`.
pub fn variance_finite_t(n: u32, beta: f64, omega: f64, mode: CouplingMode) -> Result<f64> {
    evaluate_formula(FiniteTemperatureFormula::select(mode, Moment::Variance, n), n, beta, omega)
}

/// Work statistics from the analytic route: the hot-limit forms at
/// `beta = 0`, the finite-temperature closed forms otherwise.
pub fn work_statistics_closed_form(spec: &EngineSpec, mode: CouplingMode) -> Result<WorkStatistics> {
    spec.validate()?;
    let (n, omega) = (spec.n, spec.omega);
    let (mean, variance) = if spec.is_hot_limit() {
        let mean = match mode {
            CouplingMode::Collective => mean_work_hot_collective(n, omega)?,
            CouplingMode::Independent => mean_work_hot_independent(n, omega)?,
        };
        (mean, variance_hot(n, mode, omega)?)
    } else {
        (
            mean_work_finite_t(n, spec.beta, omega, mode)?,
            variance_finite_t(n, spec.beta, omega, mode)?,
        )
    };
    Ok(WorkStatistics::new(
        mean,
        variance + mean * mean,
        variance,
        ComputationPath::ClosedForm,
    ))
}

/// Below this `beta n omega` the continuum forms switch to their Taylor
/// expansion around the removable singularity at beta = 0.
pub const LARGE_N_TAYLOR_THRESHOLD: f64 = 1e-6;

/// `e^c - 1 - c`, without cancellation.
fn exp_remainder_2(c: f64) -> f64 {
    if c.abs() < 1.0 {
        series_tail(c, 2)
    } else {
        c.exp_m1() - c
    }
}

/// `e^c - 1 - c - c^2/2`, without cancellation.
fn exp_remainder_3(c: f64) -> f64 {
    if c.abs() < 1.0 {
        series_tail(c, 3)
    } else {
        c.exp_m1() - c - c * c / 2.0
    }
}

fn series_tail(c: f64, from: i32) -> f64 {
    let mut term = (1..=from).fold(1.0, |t, k| t * c / f64::from(k));
    let mut sum = 0.0f64;
    let mut k = from;
    while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
        sum += term;
        k += 1;
        term *= c / f64::from(k);
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// Continuum shape parameters `(r, d)` with `n = 2r + d`.
fn continuum_parameters(n: u32) -> (f64, f64) {
    let r = f64::from(r_max(n));
    (r, f64::from(n) - 2.0 * r)
}

/// Large-n (continuum) approximation of `<W_col>` at inverse temperature
/// `beta`, with `r_max` chosen by the parity of `n`.
pub fn mean_work_large_n(n: u32, beta: f64, omega: f64) -> Result<f64> {
    check_n(n)?;
    if !(beta >= 0.0 && beta.is_finite()) || !(omega > 0.0) {
        return Err(domain(format!("need beta >= 0 and omega > 0 (beta = {beta}, omega = {omega})")));
    }
    let nf = f64::from(n);
    let (r, d) = continuum_parameters(n);
    let x = beta * omega;
    let a = x * nf;
    if a < LARGE_N_TAYLOR_THRESHOLD {
        let num = (d * r + r * r) + x * (d * r * r / 2.0 + r * r * r / 3.0)
            + x * x * (d * r * r * r / 6.0 + r.powi(4) / 12.0);
        let den = nf + x * nf * nf / 2.0 + x * x * nf.powi(3) / 6.0;
        return Ok(omega * num / den);
    }
    let b = x * d;
    let c = x * r;
    // (b + 2) e^c - a - 2 == (b + 2)(e^c - 1 - c) + b c
    if a > 600.0 {
        // e^{c-a} [(b + 2) - (a + 2) e^{-c}] / (beta (1 - e^{-a}))
        let inner = (b + 2.0) - (a + 2.0) * (-c).exp();
        return Ok((c - a + inner.ln() - beta.ln() - (-(-a).exp()).ln_1p()).exp());
    }
    let num = (b + 2.0) * exp_remainder_2(c) + b * c;
    Ok(num / (beta * a.exp_m1()))
}

/// Large-n (continuum) approximation of `<W_col^2>`.
pub fn second_moment_large_n(n: u32, beta: f64, omega: f64) -> Result<f64> {
    check_n(n)?;
    if !(beta >= 0.0 && beta.is_finite()) || !(omega > 0.0) {
        return Err(domain(format!("need beta >= 0 and omega > 0 (beta = {beta}, omega = {omega})")));
    }
    let nf = f64::from(n);
    let (r, d) = continuum_parameters(n);
    let x = beta * omega;
    let a = x * nf;
    if a < LARGE_N_TAYLOR_THRESHOLD {
        let q0 = 4.0 / 3.0 * r.powi(3) + 2.0 * d * r * r + d * d * r;
        let q1 = r.powi(4) / 3.0 + 2.0 / 3.0 * d * r.powi(3) + d * d * r * r / 2.0;
        let q2 = r.powi(5) / 15.0 + d * r.powi(4) / 6.0 + d * d * r.powi(3) / 6.0;
        let den = nf + x * nf * nf / 2.0 + x * x * nf.powi(3) / 6.0;
        return Ok(omega * omega * (q0 + x * q1 + x * x * q2) / den);
    }
    let b = x * d;
    let c = x * r;
    let big_a = a * (a + 4.0) + 8.0;
    let big_b = b * (b + 4.0) + 8.0;
    if a > 600.0 {
        let inner = big_b - big_a * (-c).exp();
        return Ok((c - a + inner.ln() - 2.0 * beta.ln() - (-(-a).exp()).ln_1p()).exp());
    }
    // e^c B - A == B (e^c - 1 - c - c^2/2) + b^2 c + b^2 c^2 / 2 + 2 b c^2
    let num = big_b * exp_remainder_3(c) + b * b * c + b * b * c * c / 2.0 + 2.0 * b * c * c;
    Ok(num / (beta * beta * a.exp_m1()))
}

/// Continuum approximation of the collective work statistics.
pub fn work_statistics_large_n(spec: &EngineSpec) -> Result<WorkStatistics> {
    spec.validate()?;
    let mean = mean_work_large_n(spec.n, spec.beta, spec.omega)?;
    let second = second_moment_large_n(spec.n, spec.beta, spec.omega)?;
    Ok(WorkStatistics::from_moments(mean, second, ComputationPath::LargeNIntegral))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn hot_collective_parities() {
        assert!(rel(mean_work_hot_collective(3, 1.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(mean_work_hot_collective(2, 1.0).unwrap(), 2.0 / 3.0) < 1e-15);
        assert!(rel(mean_work_hot_collective(1000, 1.0).unwrap(), 250.0) < 1e-3);
    }

    #[test]
    fn hot_independent_values() {
        assert!(rel(mean_work_hot_independent(1, 1.0).unwrap(), 0.5) < 1e-15);
        assert!(rel(mean_work_hot_independent(2, 1.0).unwrap(), 0.5) < 1e-15);
        let n = 10_000.0;
        let asymptote = (n / (2.0 * PI)).sqrt();
        assert!(rel(mean_work_hot_independent(10_000, 1.0).unwrap(), asymptote) < 5e-3);
    }

    #[test]
    fn hot_variance_single_qubit() {
        for mode in CouplingMode::ALL {
            assert!(rel(variance_hot(1, mode, 1.0).unwrap(), 0.25) < 1e-15);
        }
    }

    #[test]
    fn asymptote_ordering() {
        assert!(nsr_hot_asymptote(CouplingMode::Collective) < nsr_hot_asymptote(CouplingMode::Independent));
    }

    #[test]
    fn collective_even_explicit_form() {
        // n = 2, beta omega = 1: omega (2e^2 - 4e + 2) / ((e - 1)(e^3 - 1))
        let e = 1f64.exp();
        let expected = (2.0 * e * e - 4.0 * e + 2.0) / ((e - 1.0) * (e.powi(3) - 1.0));
        let got = mean_work_finite_t(2, 1.0, 1.0, CouplingMode::Collective).unwrap();
        assert!(rel(got, expected) < 1e-14);
    }

    #[test]
    fn approaches_hot_limit() {
        let got = mean_work_finite_t(2, 1e-9, 1.0, CouplingMode::Collective).unwrap();
        assert!(rel(got, 2.0 / 3.0) < 1e-8);
        let v = variance_finite_t(4, 1e-9, 1.0, CouplingMode::Collective).unwrap();
        assert!(rel(v, variance_hot(4, CouplingMode::Collective, 1.0).unwrap()) < 1e-8);
    }

    #[test]
    fn parity_mismatch_rejected() {
        assert!(evaluate_formula(FiniteTemperatureFormula::CollectiveMeanEven, 3, 1.0, 1.0).is_err());
        assert!(evaluate_formula(FiniteTemperatureFormula::CollectiveMeanOdd, 3, 0.0, 1.0).is_err());
    }

    #[test]
    fn omega_scaling() {
        let a = mean_work_finite_t(5, 0.5, 2.0, CouplingMode::Independent).unwrap();
        let b = mean_work_finite_t(5, 1.0, 1.0, CouplingMode::Independent).unwrap();
        assert!(rel(a, 2.0 * b) < 1e-14);
    }

    #[test]
    fn large_n_forms_are_continuous_across_the_taylor_switch() {
        for n in [200, 201] {
            let below = LARGE_N_TAYLOR_THRESHOLD * 0.999 / f64::from(n);
            let above = LARGE_N_TAYLOR_THRESHOLD * 1.001 / f64::from(n);
            let m = (mean_work_large_n(n, below, 1.0).unwrap(), mean_work_large_n(n, above, 1.0).unwrap());
            assert!(rel(m.0, m.1) < 1e-9, "{m:?}");
            let s = (second_moment_large_n(n, below, 1.0).unwrap(), second_moment_large_n(n, above, 1.0).unwrap());
            assert!(rel(s.0, s.1) < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn large_n_hot_limits() {
        assert!(rel(mean_work_large_n(200, 0.0, 1.0).unwrap(), 50.0) < 1e-15);
        assert!(rel(second_moment_large_n(200, 0.0, 1.0).unwrap(), 200.0 * 200.0 / 6.0) < 1e-15);
        assert!(rel(mean_work_large_n(200, 0.001 / 200.0, 1.0).unwrap(), 50.0) < 0.02);
    }

    #[test]
    fn large_n_survives_low_temperature() {
        // n = 201, beta omega = 4: a = 804, value ~ e^{c - a} (b + 2) / beta
        let w = mean_work_large_n(201, 4.0, 1.0).unwrap();
        let expected = (-404.0f64).exp() * 6.0 / 4.0;
        assert!(rel(w, expected) < 1e-12, "{w} vs {expected}");
        let s = second_moment_large_n(201, 4.0, 1.0).unwrap();
        assert!(rel(s, (-404.0f64).exp() * 40.0 / 16.0) < 1e-12, "{s}");
        assert_eq!(mean_work_large_n(400, 5.0, 1.0).unwrap(), 0.0);
    }
}
