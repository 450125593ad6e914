//! Cross-validation matrix behind `qie validate`.
//!
//! Every check compares two independent routes to the same quantity and
//! records its worst discrepancy. The closed-form evaluator is injectable so
//! a deliberately broken formula can be shown to be caught and localized.

use std::time::Instant;

use qie_core::closedform::{
    evaluate_formula, mean_work_hot_collective, mean_work_hot_independent, mean_work_large_n,
    second_moment_large_n, variance_hot, FiniteTemperatureFormula, Moment,
};
use qie_core::dynamics::{
    build_collective_operators, evolve_to_steady_state_with, BathSpec, DickeState, EvolveOptions,
    DEFAULT_STEADY_TOL, POSITIVITY_TOL,
};
use qie_core::engine::run_cycles;
use qie_core::{
    collective_advantage_ratio, magnetization_distribution, work_statistics_direct, CouplingMode, EngineSpec,
    MagnetizationDistribution,
};
use qie_oracles::independent_enumeration;
use rayon::prelude::*;
use serde::Serialize;

use crate::sweep::relative_discrepancy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

pub type Evaluator = dyn Fn(FiniteTemperatureFormula, u32, f64, f64) -> qie_core::Result<f64> + Sync;

/// Worst case of one sub-check (one formula, one mode, ...).
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub id: String,
    pub passed: bool,
    pub worst_discrepancy: f64,
    pub worst_at: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    pub worst_discrepancy: f64,
    pub entries: Vec<Entry>,
    pub elapsed_seconds: f64,
}

impl CheckResult {
    pub fn failing_ids(&self) -> Vec<&str> {
        self.entries.iter().filter(|e| !e.passed).map(|e| e.id.as_str()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub elapsed_seconds: f64,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates the worst discrepancy per entry id, in first-seen order.
struct Tally {
    tolerance: f64,
    entries: Vec<Entry>,
}

impl Tally {
    fn new(tolerance: f64) -> Tally {
        Tally {
            tolerance,
            entries: Vec::new(),
        }
    }

    fn record(&mut self, id: &str, discrepancy: f64, at: impl FnOnce() -> String) {
        let idx = match self.entries.iter().position(|e| e.id == id) {
            Some(i) => i,
            None => {
                self.entries.push(Entry {
                    id: id.to_string(),
                    passed: true,
                    worst_discrepancy: 0.0,
                    worst_at: String::new(),
                });
                self.entries.len() - 1
            }
        };
        let e = &mut self.entries[idx];
        // NaN counts as worst possible
        let d = if discrepancy.is_nan() { f64::INFINITY } else { discrepancy };
        if d > e.worst_discrepancy || e.worst_at.is_empty() {
            e.worst_discrepancy = e.worst_discrepancy.max(d);
            e.worst_at = at();
        }
        if !(d <= self.tolerance) {
            e.passed = false;
        }
    }

    fn fail(&mut self, id: &str, at: String) {
        self.record(id, f64::INFINITY, || at);
    }

    fn finish(self, name: &str, started: Instant) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed: self.entries.iter().all(|e| e.passed),
            tolerance: self.tolerance,
            worst_discrepancy: self.entries.iter().map(|e| e.worst_discrepancy).fold(0.0, f64::max),
            entries: self.entries,
            elapsed_seconds: started.elapsed().as_secs_f64(),
        }
    }
}

fn spec(n: u32, beta: f64) -> EngineSpec {
    EngineSpec::new(n, 1.0, beta).expect("valid grid point")
}

pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const CLOSED_FORM_BETAS: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0];

fn check_closed_forms(level: Level, eval: &Evaluator) -> CheckResult {
    let started = Instant::now();
    let n_max = if level == Level::Full { 30 } else { 20 };
    let mut betas = CLOSED_FORM_BETAS.to_vec();
    if level == Level::Full {
        betas.extend([0.02, 0.05, 0.2, 3.0]);
    }
    let points: Vec<(u32, f64)> = (1..=n_max).flat_map(|n| betas.iter().map(move |b| (n, *b))).collect();
    let results: Vec<Vec<(FiniteTemperatureFormula, u32, f64, Result<f64, String>, f64)>> = points
        .par_iter()
        .map(|&(n, b)| {
            let mut out = Vec::new();
            for mode in CouplingMode::ALL {
                let direct = work_statistics_direct(&spec(n, b), mode).expect("direct sum");
                for moment in [Moment::Mean, Moment::Variance] {
                    let f = FiniteTemperatureFormula::select(mode, moment, n);
                    let reference = match moment {
                        Moment::Mean => direct.mean,
                        Moment::Variance => direct.variance,
                    };
                    out.push((f, n, b, eval(f, n, b, 1.0).map_err(|e| e.to_string()), reference));
                }
            }
            out
        })
        .collect();
    let mut tally = Tally::new(CLOSED_FORM_TOL);
    for f in FiniteTemperatureFormula::ALL {
        tally.record(f.id(), 0.0, String::new);
    }
    for (f, n, b, got, reference) in results.into_iter().flatten() {
        match got {
            Ok(v) => tally.record(f.id(), relative_discrepancy(v, reference), || format!("n={n} beta_omega={b}")),
            Err(e) => tally.fail(f.id(), format!("n={n} beta_omega={b}: {e}")),
        }
    }
    tally.finish("closed_form_vs_direct_sum", started)
}

pub const HOT_LIMIT_TOL: f64 = 1e-13;

fn check_hot_limits() -> CheckResult {
    let started = Instant::now();
    let mut tally = Tally::new(HOT_LIMIT_TOL);
    for n in 1..=50u32 {
        for mode in CouplingMode::ALL {
            let direct = work_statistics_direct(&spec(n, 0.0), mode).expect("direct sum");
            let mean = match mode {
                CouplingMode::Collective => mean_work_hot_collective(n, 1.0),
                CouplingMode::Independent => mean_work_hot_independent(n, 1.0),
            };
            let at = || format!("n={n}");
            match (mean, variance_hot(n, mode, 1.0)) {
                (Ok(m), Ok(v)) => {
                    tally.record(&format!("{mode}_mean"), relative_discrepancy(m, direct.mean), at);
                    tally.record(&format!("{mode}_variance"), relative_discrepancy(v, direct.variance), at);
                }
                (Err(e), _) | (_, Err(e)) => tally.fail(&format!("{mode}_mean"), format!("n={n}: {e}")),
            }
        }
    }
    tally.finish("hot_limit_closed_forms", started)
}

pub const ENUMERATION_TOL: f64 = 1e-12;

fn check_enumeration(level: Level) -> CheckResult {
    let started = Instant::now();
    let n_max = if level == Level::Full { 14 } else { 10 };
    let mut tally = Tally::new(ENUMERATION_TOL);
    for n in 1..=n_max {
        for b in [0.0, 0.1, 1.0, 5.0] {
            let got = work_statistics_direct(&spec(n, b), CouplingMode::Independent).expect("direct sum");
            let oracle = independent_enumeration(n, b, 1.0);
            let at = || format!("n={n} beta_omega={b}");
            tally.record("mean", relative_discrepancy(got.mean, oracle.mean), at);
            tally.record("second_moment", relative_discrepancy(got.second_moment, oracle.second_moment), at);
            tally.record("variance", relative_discrepancy(got.variance, oracle.variance), at);
        }
    }
    tally.finish("independent_vs_enumeration", started)
}

pub const STEADY_STATE_TOL: f64 = 1e-8;

fn check_lindblad(level: Level) -> CheckResult {
    let started = Instant::now();
    let ns: &[u32] = if level == Level::Full { &[1, 2, 4, 8, 12] } else { &[1, 2, 4] };
    let points: Vec<(u32, f64)> = ns.iter().flat_map(|&n| [0.1, 1.0, 3.0].map(|b| (n, b))).collect();
    let results: Vec<(u32, f64, Result<(f64, bool, f64, f64), String>)> = points
        .par_iter()
        .map(|&(n, b)| {
            let run = || -> qie_core::Result<(f64, bool, f64, f64)> {
                let ops = build_collective_operators(n)?;
                let bath = BathSpec::new(b, 1.0, 1.0)?;
                let opts = EvolveOptions {
                    monitor_positivity: true,
                    ..Default::default()
                };
                let out = evolve_to_steady_state_with(
                    &DickeState::maximally_mixed(n),
                    &ops,
                    &bath,
                    DEFAULT_STEADY_TOL,
                    1e4,
                    &opts,
                )?;
                let d = out.rho_ss.trace_distance(&DickeState::gibbs(n, b, 1.0))?;
                let min_eig = out.diagnostics.min_eigenvalue.unwrap_or(0.0);
                Ok((d, out.converged, min_eig, out.diagnostics.max_trace_drift))
            };
            (n, b, run().map_err(|e| e.to_string()))
        })
        .collect();
    let mut tally = Tally::new(STEADY_STATE_TOL);
    for (n, b, r) in results {
        let id = format!("n{n}");
        match r {
            Ok((d, converged, min_eig, drift)) => {
                let ok = converged && min_eig >= -POSITIVITY_TOL && drift < 1e-12;
                let value = if ok { d } else { f64::INFINITY };
                tally.record(&id, value, || {
                    format!("beta_omega={b} converged={converged} min_eigenvalue={min_eig:e} trace_drift={drift:e}")
                });
            }
            Err(e) => tally.fail(&id, format!("beta_omega={b}: {e}")),
        }
    }
    tally.finish("lindblad_steady_state_vs_gibbs", started)
}

/// `E[(W - <W>)^k]` under a magnetization distribution.
pub fn work_central_moment(dist: &MagnetizationDistribution, omega: f64, mean: f64, k: i32) -> f64 {
    dist.iter()
        .map(|(m, lp)| {
            let w = if m.is_positive() { m.flip_work(omega) } else { 0.0 };
            lp.exp() * (w - mean).powi(k)
        })
        .sum()
}

/// `(z_mean, z_variance)` of one Monte Carlo run against the exact law.
pub fn monte_carlo_z_scores(n: u32, beta: f64, mode: CouplingMode, cycles: u64, seed: u64) -> qie_core::Result<(f64, f64)> {
    let s = spec(n, beta);
    let dist = magnetization_distribution(&s, mode)?;
    let exact = work_statistics_direct(&s, mode)?;
    let r = run_cycles(&s, mode, cycles, seed)?;
    let z_mean = (r.empirical_mean - exact.mean) / r.standard_error;
    // large-sample standard error of the sample variance
    let mu4 = work_central_moment(&dist, 1.0, exact.mean, 4);
    let se_var = ((mu4 - exact.variance * exact.variance) / cycles as f64).sqrt();
    let z_var = (r.empirical_variance - exact.variance) / se_var;
    Ok((z_mean, z_var))
}

pub const MC_SIGMAS: f64 = 4.0;

fn check_monte_carlo(level: Level) -> CheckResult {
    let started = Instant::now();
    let (cycles, seeds) = if level == Level::Full { (1_000_000, 5u64) } else { (200_000, 1) };
    let mut tally = Tally::new(MC_SIGMAS);
    for b in [0.0, 0.5] {
        for mode in CouplingMode::ALL {
            for seed in 0..seeds {
                let at = || format!("n=10 beta_omega={b} seed={seed} cycles={cycles}");
                match monte_carlo_z_scores(10, b, mode, cycles, seed) {
                    Ok((zm, zv)) => {
                        tally.record(&format!("{mode}_mean"), zm.abs(), at);
                        tally.record(&format!("{mode}_variance"), zv.abs(), at);
                    }
                    Err(e) => tally.fail(&format!("{mode}_mean"), format!("{}: {e}", at())),
                }
            }
        }
    }
    tally.finish("monte_carlo_vs_analytic_z_score", started)
}

fn check_asymptotes() -> CheckResult {
    let started = Instant::now();
    // one tolerance per entry, so failures compare against the scaled value
    let mut tally = Tally::new(1.0);
    for (n, tol) in [(400u32, 0.02), (2000, 0.01)] {
        let lw = collective_advantage_ratio(&spec(n, 0.0)).ok().flatten().unwrap_or(f64::NAN);
        let dev = (lw * 4.0 / (2.0 * std::f64::consts::PI * f64::from(n)).sqrt() - 1.0).abs();
        tally.record("lambda_w_hot_asymptote", dev / tol, || format!("n={n}: lambda_w={lw} (tolerance {tol})"));
    }
    for mode in CouplingMode::ALL {
        let limit = qie_core::closedform::nsr_hot_asymptote(mode);
        let nsr = work_statistics_direct(&spec(100_000, 0.0), mode)
            .ok()
            .and_then(|s| s.nsr)
            .unwrap_or(f64::NAN);
        let dev = relative_discrepancy(nsr, limit);
        tally.record(&format!("{mode}_nsr_hot_asymptote"), dev / 5e-3, || {
            format!("n=100000: nsr={nsr}, limit {limit} (tolerance 0.5%)")
        });
    }
    for bnw in [0.01, 0.1, 0.2] {
        for n in [200u32, 201] {
            let b = bnw / f64::from(n);
            let direct = work_statistics_direct(&spec(n, b), CouplingMode::Collective).expect("direct sum");
            let at = || format!("n={n} beta_n_omega={bnw} (tolerance 2%)");
            match (mean_work_large_n(n, b, 1.0), second_moment_large_n(n, b, 1.0)) {
                (Ok(m), Ok(m2)) => {
                    tally.record("large_n_mean", relative_discrepancy(m, direct.mean) / 0.02, at);
                    tally.record("large_n_second_moment", relative_discrepancy(m2, direct.second_moment) / 0.02, at);
                }
                (Err(e), _) | (_, Err(e)) => tally.fail("large_n_mean", format!("n={n}: {e}")),
            }
        }
    }
    let mut r = tally.finish("asymptotes", started);
    // scaled discrepancies: 1.0 is the per-entry tolerance
    r.tolerance = 1.0;
    r
}

pub fn run(level: Level) -> ValidationReport {
    run_with(level, &|f, n, b, w| evaluate_formula(f, n, b, w))
}

pub fn run_with(level: Level, eval: &Evaluator) -> ValidationReport {
    let started = Instant::now();
    let checks = vec![
        check_closed_forms(level, eval),
        check_hot_limits(),
        check_enumeration(level),
        check_lindblad(level),
        check_monte_carlo(level),
        check_asymptotes(),
    ];
    ValidationReport {
        level,
        passed: checks.iter().all(|c| c.passed),
        checks,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    }
}
