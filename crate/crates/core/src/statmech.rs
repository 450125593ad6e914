//! Exact steady-state statistics of the engine's magnetization and the work
//! it yields, by direct summation over the n+1 magnetization values.
//!
//! This is the reference path the closed forms and the simulator are checked
//! against.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{log_binomial, log_sum_exp};

/// How the qubits couple to the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    Collective,
    Independent,
}

impl CouplingMode {
    pub const ALL: [CouplingMode; 2] = [CouplingMode::Collective, CouplingMode::Independent];

    pub fn as_str(self) -> &'static str {
        match self {
            CouplingMode::Collective => "collective",
            CouplingMode::Independent => "independent",
        }
    }
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CouplingMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "collective" | "col" => Ok(CouplingMode::Collective),
            "independent" | "ind" => Ok(CouplingMode::Independent),
            other => Err(domain(format!("unknown coupling mode '{other}'"))),
        }
    }
}

/// Physical configuration, in units with hbar = k_B = 1.
///
/// `beta == 0.0` is the exact infinite-temperature limit and
/// `beta == f64::INFINITY` the zero-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    pub n: u32,
    pub omega: f64,
    pub beta: f64,
}

impl EngineSpec {
    pub fn new(n: u32, omega: f64, beta: f64) -> Result<Self> {
        let spec = EngineSpec { n, omega, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("qubit count n must be at least 1"));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(domain(format!("omega must be positive and finite, got {}", self.omega)));
        }
        if !(self.beta >= 0.0) {
            return Err(domain(format!("beta must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn is_hot_limit(&self) -> bool {
        self.beta == 0.0
    }

    pub fn beta_omega(&self) -> f64 {
        self.beta * self.omega
    }
}

/// A magnetization eigenvalue `m`, stored as the integer `2m` so that odd `n`
/// (half-integer `m`) indexes exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Magnetization(i64);

impl Magnetization {
    pub fn from_twice(twice_m: i64) -> Self {
        Magnetization(twice_m)
    }

    /// Panics unless `m` is an integer or half-integer.
    pub fn from_value(m: f64) -> Self {
        let twice = 2.0 * m;
        assert!(twice.fract() == 0.0, "magnetization {m} is not a half-integer");
        Magnetization(twice as i64)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Work `2 m omega` released by flipping `m -> -m`.
    pub fn flip_work(self, omega: f64) -> f64 {
        self.0 as f64 * omega
    }

    /// Number of down spins `r = n/2 - m`.
    fn down_spins(self, n: u32) -> u64 {
        ((i64::from(n) - self.0) / 2) as u64
    }
}

impl fmt::Display for Magnetization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// All `n+1` magnetization values of an `n`-qubit medium, ascending.
pub fn magnetizations(n: u32) -> impl DoubleEndedIterator<Item = Magnetization> + Clone {
    (0..=i64::from(n)).map(move |i| Magnetization(2 * i - i64::from(n)))
}

/// Steady-state distribution of `m` over `{-n/2, ..., n/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationDistribution {
    pub spec: EngineSpec,
    pub mode: CouplingMode,
    /// `ln p_m`, indexed by `m + n/2` (ascending `m`).
    log_probs: Vec<f64>,
    pub log_partition: f64,
}

impl MagnetizationDistribution {
    pub fn n(&self) -> u32 {
        self.spec.n
    }

    fn index(&self, m: Magnetization) -> Option<usize> {
        let n = i64::from(self.spec.n);
        let t = m.twice();
        if t.abs() > n || (t + n) % 2 != 0 {
            None
        } else {
            Some(((t + n) / 2) as usize)
        }
    }

    pub fn contains(&self, m: Magnetization) -> bool {
        self.index(m).is_some()
    }

    pub fn log_prob(&self, m: Magnetization) -> Result<f64> {
        self.index(m)
            .map(|i| self.log_probs[i])
            .ok_or_else(|| domain(format!("m = {m} is not a magnetization of n = {}", self.spec.n)))
    }

    pub fn prob(&self, m: Magnetization) -> Result<f64> {
        self.log_prob(m).map(f64::exp)
    }

    /// `(m, ln p_m)` pairs in ascending `m`.
    pub fn iter(&self) -> impl Iterator<Item = (Magnetization, f64)> + '_ {
        magnetizations(self.spec.n).zip(self.log_probs.iter().copied())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    /// Probability that the sign measurement reads "positive" (`m > 0`).
    pub fn positive_probability(&self) -> f64 {
        self.iter()
            .filter(|(m, _)| m.is_positive())
            .map(|(_, l)| l.exp())
            .sum()
    }
}

/// Log-probabilities and `ln Z` from unnormalized log-weights.
///
/// The weights are shifted by their maximum before `ln sum` is subtracted;
/// subtracting a large `ln Z` directly would round away the low bits of
/// every log-probability once `|ln Z|` reaches ~1e4.
fn normalize(weights: Vec<f64>) -> (Vec<f64>, f64) {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = weights.iter().map(|w| w - max).collect();
    let ln_s = log_sum_exp(&shifted).expect("finite weights");
    (shifted.iter().map(|w| w - ln_s).collect(), max + ln_s)
}

/// Gibbs populations of the steady state for the given coupling.
pub fn magnetization_distribution(
    spec: &EngineSpec,
    mode: CouplingMode,
) -> Result<MagnetizationDistribution> {
    spec.validate()?;
    let n = spec.n;
    let degeneracy = |m: Magnetization| -> f64 {
        match mode {
            CouplingMode::Collective => 0.0,
            CouplingMode::Independent => {
                log_binomial(u64::from(n), m.down_spins(n)).expect("r within 0..=n")
            }
        }
    };

    let (log_probs, log_partition) = if spec.beta == f64::INFINITY {
        // ground state m = -n/2 is non-degenerate in both modes
        let mut lp = vec![f64::NEG_INFINITY; n as usize + 1];
        lp[0] = 0.0;
        (lp, f64::INFINITY)
    } else if spec.is_hot_limit() {
        match mode {
            CouplingMode::Collective => {
                let log_z = f64::from(n + 1).ln();
                (vec![-log_z; n as usize + 1], log_z)
            }
            // n ln 2 up to the rounding of the lgamma route for huge n
            CouplingMode::Independent => normalize(magnetizations(n).map(degeneracy).collect()),
        }
    } else {
        let bw = spec.beta_omega();
        normalize(magnetizations(n).map(|m| degeneracy(m) - bw * m.value()).collect())
    };

    Ok(MagnetizationDistribution {
        spec: *spec,
        mode,
        log_probs,
        log_partition,
    })
}

/// Which route produced a set of work statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputationPath {
    DirectSum,
    ClosedForm,
    MonteCarlo,
    LargeNIntegral,
}

impl ComputationPath {
    pub fn as_str(self) -> &'static str {
        match self {
            ComputationPath::DirectSum => "direct_sum",
            ComputationPath::ClosedForm => "closed_form",
            ComputationPath::MonteCarlo => "monte_carlo",
            ComputationPath::LargeNIntegral => "large_n_integral",
        }
    }
}

/// Mean and fluctuations of the work extracted per cycle, in units of
/// energy (`omega` with hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkStatistics {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    /// `variance / mean^2`; `None` when no work is extracted on average.
    pub nsr: Option<f64>,
    pub path: ComputationPath,
}

impl WorkStatistics {
    pub fn new(mean: f64, second_moment: f64, variance: f64, path: ComputationPath) -> Self {
        let nsr = (mean > 0.0).then(|| variance / (mean * mean));
        WorkStatistics {
            mean,
            second_moment,
            variance,
            nsr,
            path,
        }
    }

    pub fn from_moments(mean: f64, second_moment: f64, path: ComputationPath) -> Self {
        Self::new(mean, second_moment, second_moment - mean * mean, path)
    }
}

/// Work statistics of a distribution: `m > 0` pays `2 m omega`, everything
/// else pays nothing.
pub fn work_statistics_of(dist: &MagnetizationDistribution) -> WorkStatistics {
    let omega = dist.spec.omega;
    let mut mean = 0.0;
    let mut second = 0.0;
    // Sum over m >= 0 only; m = 0 enters with zero work.
    for (m, lp) in dist.iter().filter(|(m, _)| m.twice() >= 0) {
        let w = m.flip_work(omega);
        let p = lp.exp();
        mean += w * p;
        second += w * w * p;
    }
    // Two-pass variance over every outcome, including the zero-work ones.
    let variance: f64 = dist
        .iter()
        .map(|(m, lp)| {
            let w = if m.is_positive() { m.flip_work(omega) } else { 0.0 };
            lp.exp() * (w - mean) * (w - mean)
        })
        .sum();
    WorkStatistics::new(mean, second, variance, ComputationPath::DirectSum)
}

/// Mean work and variance by direct summation over the steady state.
pub fn work_statistics_direct(spec: &EngineSpec, mode: CouplingMode) -> Result<WorkStatistics> {
    Ok(work_statistics_of(&magnetization_distribution(spec, mode)?))
}

/// Occupation ratio `p_m^col / p_m^ind`.
pub fn probability_ratio(spec: &EngineSpec, m: Magnetization) -> Result<f64> {
    let col = magnetization_distribution(spec, CouplingMode::Collective)?;
    let ind = magnetization_distribution(spec, CouplingMode::Independent)?;
    Ok((col.log_prob(m)? - ind.log_prob(m)?).exp())
}

/// `<W_col> / <W_ind>`; `None` when the independent engine extracts nothing
/// (zero temperature).
pub fn collective_advantage_ratio(spec: &EngineSpec) -> Result<Option<f64>> {
    let col = work_statistics_direct(spec, CouplingMode::Collective)?;
    let ind = work_statistics_direct(spec, CouplingMode::Independent)?;
    Ok((ind.mean > 0.0).then(|| col.mean / ind.mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, beta: f64) -> EngineSpec {
        EngineSpec::new(n, 1.0, beta).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() <= tol
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(EngineSpec::new(0, 1.0, 1.0).is_err());
        assert!(EngineSpec::new(2, 0.0, 1.0).is_err());
        assert!(EngineSpec::new(2, 1.0, -0.1).is_err());
        assert!(EngineSpec::new(2, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn hot_limit_populations() {
        let col = magnetization_distribution(&spec(2, 0.0), CouplingMode::Collective).unwrap();
        for p in col.probabilities() {
            assert!(close(p, 1.0 / 3.0, 1e-15));
        }
        let ind = magnetization_distribution(&spec(2, 0.0), CouplingMode::Independent).unwrap();
        let p = ind.probabilities();
        assert!(close(p[0], 0.25, 1e-15) && close(p[1], 0.5, 1e-15) && close(p[2], 0.25, 1e-15));
    }

    #[test]
    fn finite_temperature_population() {
        let s = spec(2, 2f64.ln());
        let col = magnetization_distribution(&s, CouplingMode::Collective).unwrap();
        assert!(close(col.prob(Magnetization::from_twice(2)).unwrap(), 1.0 / 7.0, 1e-14));
    }

    #[test]
    fn hot_limit_means() {
        for mode in CouplingMode::ALL {
            let w = work_statistics_direct(&spec(1, 0.0), mode).unwrap();
            assert!(close(w.mean, 0.5, 1e-15));
        }
        let w3 = work_statistics_direct(&spec(3, 0.0), CouplingMode::Collective).unwrap();
        assert!(close(w3.mean, 1.0, 1e-15));
        let w2 = work_statistics_direct(&spec(2, 0.0), CouplingMode::Collective).unwrap();
        assert!(close(w2.mean, 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn ratios_at_infinite_temperature() {
        let s = spec(6, 0.0);
        let r = |m| probability_ratio(&s, Magnetization::from_twice(m)).unwrap();
        assert!(close(r(6), 64.0 / 7.0, 1e-14));
        assert!(close(r(0), 32.0 / 70.0, 1e-14));
        assert!(close(r(4), 64.0 / 42.0, 1e-14));
        assert!(close(r(2), 64.0 / 105.0, 1e-14));
        for beta in [0.0, 0.3, 4.0] {
            assert!(close(probability_ratio(&spec(1, beta), Magnetization::from_twice(1)).unwrap(), 1.0, 1e-14));
        }
        assert!(probability_ratio(&s, Magnetization::from_twice(1)).is_err());
    }

    #[test]
    fn advantage_ratio() {
        for beta in [0.0, 0.7, 3.0] {
            assert!(close(collective_advantage_ratio(&spec(1, beta)).unwrap().unwrap(), 1.0, 1e-14));
        }
        let lw = collective_advantage_ratio(&spec(400, 0.0)).unwrap().unwrap();
        let asymptote = (2.0 * std::f64::consts::PI * 400.0).sqrt() / 4.0;
        assert!(close(lw, asymptote, 0.02));
        assert!(collective_advantage_ratio(&spec(10, 2.0)).unwrap().unwrap() < 1.0);
        assert_eq!(collective_advantage_ratio(&spec(10, f64::INFINITY)).unwrap(), None);
    }

    #[test]
    fn zero_temperature() {
        let s = spec(5, f64::INFINITY);
        let col = magnetization_distribution(&s, CouplingMode::Collective).unwrap();
        assert_eq!(col.prob(Magnetization::from_twice(-5)).unwrap(), 1.0);
        let w = work_statistics_of(&col);
        assert_eq!(w.mean, 0.0);
        assert_eq!(w.nsr, None);
    }

    #[test]
    fn magnetization_display() {
        assert_eq!(Magnetization::from_twice(3).to_string(), "3/2");
        assert_eq!(Magnetization::from_twice(-4).to_string(), "-2");
        assert_eq!(Magnetization::from_value(-1.5).twice(), -3);
    }
}
