//! Monte Carlo simulation of the three-stroke cycle: thermalize, read the
//! sign of `m`, flip `m -> -m` when it is positive.
//!
//! Cycles are grouped into fixed blocks of [`BLOCK_CYCLES`]; block `b` draws
//! from ChaCha8 stream `b` of the run seed. Blocks are histogrammed over `m`
//! and merged with exact integer counts, so a report depends only on
//! `(spec, mode, n_cycles, seed)` and never on the number of worker threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{build_collective_operators, evolve_for, BathSpec, DickeState};
use crate::error::{domain, Result};
use crate::statmech::{magnetization_distribution, CouplingMode, EngineSpec, Magnetization};

pub const BLOCK_CYCLES: u64 = 1 << 16;

/// Recorded in every report.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), stream b for cycle block b, 65536 cycles per block";

/// One pass through the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRecord {
    pub cycle_index: u64,
    pub m_sampled: f64,
    pub measured_positive: bool,
    pub work_extracted: f64,
}

impl CycleRecord {
    fn new(cycle_index: u64, m: Magnetization, omega: f64) -> CycleRecord {
        let positive = m.is_positive();
        CycleRecord {
            cycle_index,
            m_sampled: m.value(),
            measured_positive: positive,
            work_extracted: if positive { m.flip_work(omega) } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub spec: EngineSpec,
    pub mode: CouplingMode,
    pub n_cycles: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub empirical_mean: f64,
    /// Unbiased sample variance of the per-cycle work.
    pub empirical_variance: f64,
    pub standard_error: f64,
    pub positive_fraction: f64,
    /// Cycle counts per magnetization, ascending from `m = -n/2`.
    pub histogram: Vec<u64>,
}

impl SimulationReport {
    fn from_histogram(spec: &EngineSpec, mode: CouplingMode, seed: u64, histogram: Vec<u64>) -> Self {
        let n_cycles: u64 = histogram.iter().sum();
        let nf = n_cycles as f64;
        let work = |i: usize| -> f64 {
            let m = Magnetization::from_twice(2 * i as i64 - i64::from(spec.n));
            if m.is_positive() {
                m.flip_work(spec.omega)
            } else {
                0.0
            }
        };
        let mean = histogram.iter().enumerate().map(|(i, c)| *c as f64 * work(i)).sum::<f64>() / nf;
        let ss: f64 = histogram
            .iter()
            .enumerate()
            .map(|(i, c)| *c as f64 * (work(i) - mean).powi(2))
            .sum();
        let variance = if n_cycles > 1 { ss / (nf - 1.0) } else { 0.0 };
        let positive: u64 = histogram
            .iter()
            .enumerate()
            .filter(|(i, _)| 2 * *i as i64 > i64::from(spec.n))
            .map(|(_, c)| *c)
            .sum();
        SimulationReport {
            spec: *spec,
            mode,
            n_cycles,
            seed,
            rng: RNG_ALGORITHM,
            empirical_mean: mean,
            empirical_variance: variance,
            standard_error: (variance / nf).sqrt(),
            positive_fraction: positive as f64 / nf,
            histogram,
        }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn blocks(n_cycles: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let count = n_cycles.div_ceil(BLOCK_CYCLES);
    (0..count).into_par_iter().map(move |b| {
        let start = b * BLOCK_CYCLES;
        (b, (n_cycles - start).min(BLOCK_CYCLES))
    })
}

/// Draws the index `i` (for `m = i - n/2`) of one cycle.
enum Sampler {
    Cumulative(Vec<f64>),
    Qubits { n: u32, p_up: f64 },
}

impl Sampler {
    fn new(spec: &EngineSpec, mode: CouplingMode) -> Result<Sampler> {
        Ok(match mode {
            CouplingMode::Collective => {
                let probs = magnetization_distribution(spec, mode)?.probabilities();
                Sampler::Cumulative(cumulative(&probs))
            }
            CouplingMode::Independent => {
                let x = spec.beta_omega();
                // excited (m = +1/2) population of one qubit
                let p_up = if x == f64::INFINITY { 0.0 } else { 1.0 / (1.0 + x.exp()) };
                Sampler::Qubits { n: spec.n, p_up }
            }
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Sampler::Cumulative(cdf) => draw_cumulative(cdf, rng),
            Sampler::Qubits { n, p_up } => (0..*n).filter(|_| rng.random::<f64>() < *p_up).count(),
        }
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    // guard against the last entry rounding below 1
    if let Some(last) = cdf.last_mut() {
        *last = f64::INFINITY;
    }
    cdf
}

fn draw_cumulative(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    cdf.partition_point(|c| *c <= u).min(cdf.len() - 1)
}

fn check_run(spec: &EngineSpec, n_cycles: u64) -> Result<()> {
    spec.validate()?;
    if n_cycles == 0 {
        return Err(domain("n_cycles must be at least 1"));
    }
    Ok(())
}

fn merge(dim: usize, parts: Vec<Vec<u64>>) -> Vec<u64> {
    let mut total = vec![0u64; dim];
    for part in parts {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    total
}

/// Independent cycles, each starting from the steady state.
pub fn run_cycles(spec: &EngineSpec, mode: CouplingMode, n_cycles: u64, seed: u64) -> Result<SimulationReport> {
    check_run(spec, n_cycles)?;
    let sampler = Sampler::new(spec, mode)?;
    let dim = spec.n as usize + 1;
    let parts: Vec<Vec<u64>> = blocks(n_cycles)
        .map(|(b, len)| {
            let mut rng = block_rng(seed, b);
            let mut hist = vec![0u64; dim];
            for _ in 0..len {
                hist[sampler.draw(&mut rng)] += 1;
            }
            hist
        })
        .collect();
    Ok(SimulationReport::from_histogram(spec, mode, seed, merge(dim, parts)))
}

/// As [`run_cycles`], also returning every cycle in order.
pub fn run_cycles_recorded(
    spec: &EngineSpec,
    mode: CouplingMode,
    n_cycles: u64,
    seed: u64,
) -> Result<(SimulationReport, Vec<CycleRecord>)> {
    check_run(spec, n_cycles)?;
    let sampler = Sampler::new(spec, mode)?;
    let n = i64::from(spec.n);
    let blocks: Vec<Vec<CycleRecord>> = blocks(n_cycles)
        .map(|(b, len)| {
            let mut rng = block_rng(seed, b);
            (0..len)
                .map(|k| {
                    let i = sampler.draw(&mut rng) as i64;
                    CycleRecord::new(b * BLOCK_CYCLES + k, Magnetization::from_twice(2 * i - n), spec.omega)
                })
                .collect()
        })
        .collect();
    let records: Vec<CycleRecord> = blocks.into_iter().flatten().collect();
    let mut hist = vec![0u64; spec.n as usize + 1];
    for r in &records {
        hist[((2.0 * r.m_sampled) as i64 + n) as usize / 2] += 1;
    }
    Ok((SimulationReport::from_histogram(spec, mode, seed, hist), records))
}

/// Result of the finite-thermalization variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicalReport {
    pub report: SimulationReport,
    pub thermalization_time: f64,
    /// `max |d rho/dt|` after propagating each basis state, ascending in `m`.
    pub thermalization_residuals: Vec<f64>,
    /// Cycles whose pre-measurement state came from a propagation that had
    /// not settled (residual above [`SETTLED_RESIDUAL`]).
    pub unsettled_cycles: u64,
}

pub const SETTLED_RESIDUAL: f64 = 1e-8;

/// Concatenated cycles with a finite thermalization stroke.
///
/// Every block of [`BLOCK_CYCLES`] cycles is one chain that starts in the
/// collective steady state; after each cycle the post-flip state `|n/2, -m>`
/// (or the unflipped `|n/2, m>`) is evolved under the master equation for
/// `thermalization_time` before the next measurement. The evolution of each
/// of the `n + 1` basis states is computed once up front.
pub fn run_cycles_dynamical(
    spec: &EngineSpec,
    bath: &BathSpec,
    n_cycles: u64,
    thermalization_time: f64,
    seed: u64,
) -> Result<DynamicalReport> {
    run_dynamical(spec, bath, n_cycles, thermalization_time, seed, false).map(|(r, _)| r)
}

pub fn run_cycles_dynamical_recorded(
    spec: &EngineSpec,
    bath: &BathSpec,
    n_cycles: u64,
    thermalization_time: f64,
    seed: u64,
) -> Result<(DynamicalReport, Vec<CycleRecord>)> {
    run_dynamical(spec, bath, n_cycles, thermalization_time, seed, true)
}

/// Largest `n` accepted by the dense dynamical variant.
pub const MAX_DYNAMICAL_QUBITS: u32 = 12;

fn run_dynamical(
    spec: &EngineSpec,
    bath: &BathSpec,
    n_cycles: u64,
    thermalization_time: f64,
    seed: u64,
    keep_records: bool,
) -> Result<(DynamicalReport, Vec<CycleRecord>)> {
    check_run(spec, n_cycles)?;
    if spec.n > MAX_DYNAMICAL_QUBITS {
        return Err(domain(format!(
            "dynamical cycles support n <= {MAX_DYNAMICAL_QUBITS}, got {}",
            spec.n
        )));
    }
    if (bath.beta - spec.beta).abs() > 1e-12 * spec.beta.max(1.0) || bath.omega != spec.omega {
        return Err(domain("bath beta and omega must match the engine spec"));
    }
    let n = spec.n;
    let ops = build_collective_operators(n)?;
    let propagated: Vec<(Vec<f64>, f64)> = (0..=n)
        .into_par_iter()
        .map(|i| -> Result<(Vec<f64>, f64)> {
            let start = DickeState::basis(n, Magnetization::from_twice(2 * i64::from(i) - i64::from(n)))?;
            let out = evolve_for(&start, &ops, bath, thermalization_time)?;
            let pops: Vec<f64> = out.rho_ss.populations().iter().map(|p| p.max(0.0)).collect();
            Ok((pops, out.residual))
        })
        .collect::<Result<_>>()?;
    let transitions: Vec<Vec<f64>> = propagated.iter().map(|(p, _)| normalized_cumulative(p)).collect();
    let residuals: Vec<f64> = propagated.iter().map(|(_, r)| *r).collect();
    let initial = normalized_cumulative(&magnetization_distribution(spec, CouplingMode::Collective)?.probabilities());

    let dim = n as usize + 1;
    let ni = i64::from(n);
    let parts: Vec<(Vec<u64>, u64, Vec<CycleRecord>)> = blocks(n_cycles)
        .map(|(b, len)| {
            let mut rng = block_rng(seed, b);
            let mut hist = vec![0u64; dim];
            let mut unsettled = 0u64;
            let mut records = Vec::new();
            let mut cdf = &initial;
            for k in 0..len {
                let i = draw_cumulative(cdf, &mut rng);
                hist[i] += 1;
                let m = Magnetization::from_twice(2 * i as i64 - ni);
                if keep_records {
                    records.push(CycleRecord::new(b * BLOCK_CYCLES + k, m, spec.omega));
                }
                // flip m -> -m when positive, then thermalize
                let post = if m.is_positive() { dim - 1 - i } else { i };
                if residuals[post] > SETTLED_RESIDUAL && k + 1 < len {
                    unsettled += 1;
                }
                cdf = &transitions[post];
            }
            (hist, unsettled, records)
        })
        .collect();
    let mut unsettled = 0;
    let mut records = Vec::new();
    let mut hists = Vec::with_capacity(parts.len());
    for (h, u, r) in parts {
        hists.push(h);
        unsettled += u;
        records.extend(r);
    }
    let report = SimulationReport::from_histogram(spec, CouplingMode::Collective, seed, merge(dim, hists));
    Ok((
        DynamicalReport {
            report,
            thermalization_time,
            thermalization_residuals: residuals,
            unsettled_cycles: unsettled,
        },
        records,
    ))
}

fn normalized_cumulative(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    let scaled: Vec<f64> = p.iter().map(|x| x / total).collect();
    cumulative(&scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, beta: f64) -> EngineSpec {
        EngineSpec::new(n, 1.0, beta).unwrap()
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = run_cycles(&spec(6, 0.3), CouplingMode::Independent, 200_000, 7).unwrap();
        let b = run_cycles(&spec(6, 0.3), CouplingMode::Independent, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = run_cycles(&spec(6, 0.3), CouplingMode::Independent, 200_000, 8).unwrap();
        assert_ne!(a.histogram, c.histogram);
    }

    #[test]
    fn independent_of_thread_count() {
        let s = spec(5, 0.5);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_cycles(&s, CouplingMode::Collective, 300_000, 11).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn records_agree_with_histogram() {
        let (report, records) = run_cycles_recorded(&spec(3, 0.2), CouplingMode::Collective, 70_000, 3).unwrap();
        assert_eq!(report, run_cycles(&spec(3, 0.2), CouplingMode::Collective, 70_000, 3).unwrap());
        assert_eq!(records.len(), 70_000);
        for (k, r) in records.iter().enumerate() {
            assert_eq!(r.cycle_index, k as u64);
            assert_eq!(r.measured_positive, r.m_sampled > 0.0);
            let expected = if r.m_sampled > 0.0 { 2.0 * r.m_sampled } else { 0.0 };
            assert_eq!(r.work_extracted, expected);
        }
    }

    #[test]
    fn zero_temperature_extracts_nothing() {
        let r = run_cycles(&spec(4, f64::INFINITY), CouplingMode::Independent, 1000, 1).unwrap();
        assert_eq!(r.empirical_mean, 0.0);
        assert_eq!(r.histogram[0], 1000);
    }

    #[test]
    fn single_qubit_bernoulli_payoff() {
        let r = run_cycles(&spec(1, 0.0), CouplingMode::Collective, 1_000_000, 5).unwrap();
        assert!((r.empirical_mean - 0.5).abs() < 4.0 * r.standard_error);
        assert!((r.standard_error - (r.empirical_variance / 1e6).sqrt()).abs() < 1e-18);
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(run_cycles(&spec(2, 1.0), CouplingMode::Collective, 0, 1).is_err());
    }

    #[test]
    fn instant_cycles_remember_the_flip() {
        // with no thermalization every post-flip state has m <= 0, so only
        // the first cycle of each chain can pay out
        let s = spec(4, 1.0);
        let bath = BathSpec::new(1.0, 1.0, 1.0).unwrap();
        let (rep, records) = run_cycles_dynamical_recorded(&s, &bath, 1000, 0.0, 2).unwrap();
        assert!(records[1..].iter().all(|r| r.work_extracted == 0.0));
        assert!(rep.report.empirical_mean < 0.01);
    }

    #[test]
    fn single_qubit_partial_relaxation() {
        let s = spec(1, 1.0);
        let bath = BathSpec::new(1.0, 1.0, 1.0).unwrap();
        let t = 0.4;
        let rep = run_cycles_dynamical(&s, &bath, 400_000, t, 9).unwrap();
        let rate = bath.rate_down() + bath.rate_up();
        let p_eq = bath.rate_up() / rate;
        // the post-cycle state is always m = -1/2
        let expected = p_eq * (1.0 - (-rate * t).exp());
        let r = &rep.report;
        assert!((r.empirical_mean - expected).abs() < 4.0 * r.standard_error, "{} vs {expected}", r.empirical_mean);
    }
}
