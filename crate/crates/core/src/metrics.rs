//! Entropy production, thermodynamic uncertainty and the collective versus
//! independent comparison, all with k_B = 1.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::statmech::{work_statistics_direct, CouplingMode, EngineSpec, WorkStatistics};

/// Standard thermodynamic uncertainty relation bound `Q >= 2`.
pub const TUR_BOUND: f64 = 2.0;

/// Minimal erasure entropy, `ln 2`.
pub const MIN_ERASURE_ENTROPY: f64 = LN_2;

const SECOND_LAW_SLACK: f64 = 1e-12;

fn check_inputs(beta: f64, erasure_entropy: f64) -> Result<()> {
    if !(beta >= 0.0) {
        return Err(domain(format!("beta must be non-negative, got {beta}")));
    }
    if !(erasure_entropy >= MIN_ERASURE_ENTROPY * (1.0 - 1e-15)) || !erasure_entropy.is_finite() {
        return Err(domain(format!(
            "erasure entropy must be at least ln 2, got {erasure_entropy}"
        )));
    }
    Ok(())
}

/// `Sigma = -beta <W> + dS_era`.
pub fn entropy_production(stats: &WorkStatistics, beta: f64, erasure_entropy: f64) -> Result<f64> {
    check_inputs(beta, erasure_entropy)?;
    // beta -> inf drives <W> to zero faster than beta grows
    let heat = if stats.mean == 0.0 { 0.0 } else { beta * stats.mean };
    let sigma = erasure_entropy - heat;
    if sigma < -SECOND_LAW_SLACK {
        return Err(Error::Consistency(format!(
            "negative entropy production {sigma:e} (beta = {beta}, <W> = {})",
            stats.mean
        )));
    }
    Ok(sigma)
}

/// `Q = nsr * Sigma`; `None` when the mean work vanishes.
pub fn thermodynamic_uncertainty(
    stats: &WorkStatistics,
    beta: f64,
    erasure_entropy: f64,
) -> Result<Option<f64>> {
    let sigma = entropy_production(stats, beta, erasure_entropy)?;
    Ok(stats.nsr.map(|nsr| nsr * sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoMetrics {
    pub mode: CouplingMode,
    pub mean_work: f64,
    pub nsr: Option<f64>,
    pub entropy_production: f64,
    pub tur_q: Option<f64>,
    pub erasure_entropy: f64,
}

impl ThermoMetrics {
    pub fn from_stats(
        stats: &WorkStatistics,
        mode: CouplingMode,
        beta: f64,
        erasure_entropy: f64,
    ) -> Result<ThermoMetrics> {
        let sigma = entropy_production(stats, beta, erasure_entropy)?;
        Ok(ThermoMetrics {
            mode,
            mean_work: stats.mean,
            nsr: stats.nsr,
            entropy_production: sigma,
            tur_q: stats.nsr.map(|nsr| nsr * sigma),
            erasure_entropy,
        })
    }

    pub fn violates_tur(&self) -> bool {
        self.tur_q.is_some_and(|q| q < TUR_BOUND)
    }
}

/// Both couplings side by side at one engine point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeComparison {
    pub spec: EngineSpec,
    /// `<W_col> / <W_ind>`
    pub lambda_w: Option<f64>,
    pub collective: ThermoMetrics,
    pub independent: ThermoMetrics,
    pub variance_col: f64,
    pub variance_ind: f64,
}

impl ModeComparison {
    pub fn nsr_col(&self) -> Option<f64> {
        self.collective.nsr
    }
    pub fn nsr_ind(&self) -> Option<f64> {
        self.independent.nsr
    }
    pub fn sigma_col(&self) -> f64 {
        self.collective.entropy_production
    }
    pub fn sigma_ind(&self) -> f64 {
        self.independent.entropy_production
    }
    pub fn q_col(&self) -> Option<f64> {
        self.collective.tur_q
    }
    pub fn q_ind(&self) -> Option<f64> {
        self.independent.tur_q
    }
    pub fn tur_violated_col(&self) -> bool {
        self.collective.violates_tur()
    }
    pub fn tur_violated_ind(&self) -> bool {
        self.independent.violates_tur()
    }
}

pub fn mode_comparison(spec: &EngineSpec, erasure_entropy: f64) -> Result<ModeComparison> {
    let col = work_statistics_direct(spec, CouplingMode::Collective)?;
    let ind = work_statistics_direct(spec, CouplingMode::Independent)?;
    compare(spec, &col, &ind, erasure_entropy)
}

/// Comparison from precomputed statistics (any computation path).
pub fn compare(
    spec: &EngineSpec,
    col: &WorkStatistics,
    ind: &WorkStatistics,
    erasure_entropy: f64,
) -> Result<ModeComparison> {
    Ok(ModeComparison {
        spec: *spec,
        lambda_w: (ind.mean > 0.0).then(|| col.mean / ind.mean),
        collective: ThermoMetrics::from_stats(col, CouplingMode::Collective, spec.beta, erasure_entropy)?,
        independent: ThermoMetrics::from_stats(ind, CouplingMode::Independent, spec.beta, erasure_entropy)?,
        variance_col: col.variance,
        variance_ind: ind.variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statmech::ComputationPath;

    fn spec(n: u32, beta: f64) -> EngineSpec {
        EngineSpec::new(n, 1.0, beta).unwrap()
    }

    #[test]
    fn hot_limit_is_pure_erasure() {
        let stats = work_statistics_direct(&spec(7, 0.0), CouplingMode::Collective).unwrap();
        assert_eq!(entropy_production(&stats, 0.0, LN_2).unwrap(), LN_2);
    }

    #[test]
    fn composes_with_direct_sum() {
        let s = spec(25, 0.05);
        let stats = work_statistics_direct(&s, CouplingMode::Collective).unwrap();
        let sigma = entropy_production(&stats, 0.05, LN_2).unwrap();
        assert!(sigma > 0.0);
        assert_eq!(sigma, LN_2 - 0.05 * stats.mean);
    }

    #[test]
    fn cold_limit_returns_erasure_entropy() {
        let stats = work_statistics_direct(&spec(4, f64::INFINITY), CouplingMode::Independent).unwrap();
        assert_eq!(entropy_production(&stats, f64::INFINITY, LN_2).unwrap(), LN_2);
        assert_eq!(thermodynamic_uncertainty(&stats, f64::INFINITY, LN_2).unwrap(), None);
    }

    #[test]
    fn single_qubit_uncertainty_is_ln2() {
        let stats = work_statistics_direct(&spec(1, 0.0), CouplingMode::Collective).unwrap();
        let q = thermodynamic_uncertainty(&stats, 0.0, LN_2).unwrap().unwrap();
        assert!((q - LN_2).abs() < 1e-15);
    }

    #[test]
    fn negative_sigma_is_a_consistency_error() {
        let fake = WorkStatistics::from_moments(10.0, 101.0, ComputationPath::DirectSum);
        assert!(matches!(entropy_production(&fake, 1.0, LN_2), Err(Error::Consistency(_))));
    }

    #[test]
    fn erasure_entropy_below_ln2_rejected() {
        let stats = work_statistics_direct(&spec(2, 0.0), CouplingMode::Collective).unwrap();
        assert!(entropy_production(&stats, 0.0, 0.5).is_err());
    }

    #[test]
    fn high_temperature_ordering() {
        let c = mode_comparison(&spec(25, 0.01), LN_2).unwrap();
        let (qc, qi) = (c.q_col().unwrap(), c.q_ind().unwrap());
        assert!(qc < qi && qi < TUR_BOUND, "{qc} {qi}");
        assert!(c.tur_violated_col() && c.tur_violated_ind());
        let q = c.nsr_col().unwrap() * c.sigma_col();
        assert!(((qc - q) / q).abs() < 1e-13);
    }

    #[test]
    fn single_qubit_modes_coincide() {
        for beta in [0.0, 0.3, 2.0] {
            let c = mode_comparison(&spec(1, beta), LN_2).unwrap();
            assert!((c.lambda_w.unwrap() - 1.0).abs() < 1e-15);
            assert!((c.collective.mean_work - c.independent.mean_work).abs() < 1e-15);
            assert!((c.sigma_col() - c.sigma_ind()).abs() < 1e-15);
        }
    }

    #[test]
    fn collective_loses_at_low_temperature() {
        let c = mode_comparison(&spec(10, 2.0), LN_2).unwrap();
        assert!(c.lambda_w.unwrap() < 1.0);
    }
}
