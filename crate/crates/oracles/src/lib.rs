//! Brute-force reference values for the test suites.
//!
//! Nothing here shares code with `qie-core`: probabilities come from plain
//! exponentials over explicit configurations, and the hypergeometric oracle is
//! exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Mean, second moment and variance of the extracted work.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl Moments {
    fn from_outcomes(outcomes: &[(f64, f64)]) -> Moments {
        // (probability, work)
        let mean: f64 = outcomes.iter().map(|(p, w)| p * w).sum();
        let second_moment: f64 = outcomes.iter().map(|(p, w)| p * w * w).sum();
        let variance: f64 = outcomes.iter().map(|(p, w)| p * (w - mean).powi(2)).sum();
        Moments { mean, second_moment, variance }
    }

    pub fn nsr(&self) -> f64 {
        self.variance / (self.mean * self.mean)
    }
}

/// Enumerates all 2^n spin strings of independent qubits, Boltzmann-weights
/// each string by `exp(-beta * omega * m)` and bins by magnetization.
/// Returns probabilities indexed by the number of up spins.
pub fn independent_populations(n: u32, beta: f64, omega: f64) -> Vec<f64> {
    assert!(n <= 24, "enumeration oracle is for small n");
    let mut bins = vec![0.0f64; n as usize + 1];
    let shift = beta * omega * f64::from(n) / 2.0;
    for config in 0u64..(1u64 << n) {
        let up = config.count_ones();
        let m = f64::from(up) - f64::from(n) / 2.0;
        bins[up as usize] += (-beta * omega * m - shift).exp();
    }
    let z: f64 = bins.iter().sum();
    bins.iter().map(|w| w / z).collect()
}

/// Work moments of the independent engine by exhaustive enumeration.
pub fn independent_enumeration(n: u32, beta: f64, omega: f64) -> Moments {
    let pops = independent_populations(n, beta, omega);
    let outcomes: Vec<(f64, f64)> = pops
        .iter()
        .enumerate()
        .map(|(up, p)| {
            let m = up as f64 - f64::from(n) / 2.0;
            (*p, if m > 0.0 { 2.0 * m * omega } else { 0.0 })
        })
        .collect();
    Moments::from_outcomes(&outcomes)
}

/// Work moments of the collective engine from the explicit Dicke-ladder Gibbs
/// weights.
pub fn collective_plain(n: u32, beta: f64, omega: f64) -> Moments {
    let ms: Vec<f64> = (0..=n).map(|i| f64::from(i) - f64::from(n) / 2.0).collect();
    let shift = beta * omega * f64::from(n) / 2.0;
    let weights: Vec<f64> = ms.iter().map(|m| (-beta * omega * m - shift).exp()).collect();
    let z: f64 = weights.iter().sum();
    let outcomes: Vec<(f64, f64)> = ms
        .iter()
        .zip(&weights)
        .map(|(m, w)| (w / z, if *m > 0.0 { 2.0 * m * omega } else { 0.0 }))
        .collect();
    Moments::from_outcomes(&outcomes)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Terminating `2F1(a, b; c; z)` from the rising-factorial definition in exact
/// rational arithmetic; `a` must be a non-positive integer. Inputs are taken
/// as the exact binary values of the given doubles.
pub fn hyp2f1_terminating_exact(a: i64, b: f64, c: f64, z: f64) -> f64 {
    assert!(a <= 0);
    let (ar, br, cr, zr) = (BigRational::from_integer(BigInt::from(a)), rational(b), rational(c), rational(z));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 0..(-a) {
        let kr = BigRational::from_integer(BigInt::from(k));
        let den = (&cr + &kr) * (&kr + BigRational::one());
        assert!(!den.is_zero());
        term = term * (&ar + &kr) * (&br + &kr) / den * &zr;
        sum += &term;
    }
    sum.to_f64().expect("representable")
}
