//! Log-domain combinatorics, stable sums and the Gauss hypergeometric
//! function.
//!
//! Combinatorial factors stay in log form end to end; callers exponentiate
//! only when assembling a final probability or ratio.

mod hyp;
mod lognum;

pub use hyp::{
    hyp2f1, hyp2f1_direct, hyp2f1_log, nonpositive_integer, plan_terminating, terminating_sum,
    Representation, RepresentationKind, SeriesScalar, MAX_SERIES_TERMS, SERIES_TOLERANCE,
    TERMINATION_SLACK,
};
pub use lognum::LogNumber;

use crate::error::{domain, Result};

fn exact_binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(c)
}

/// `ln C(n, k)`.
///
/// Exact (one rounding) while the coefficient fits in 128 bits, log-gamma
/// beyond that.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(domain(format!("binomial C({n}, {k}) needs k <= n")));
    }
    if let Some(c) = exact_binomial(n, k) {
        return Ok((c as f64).ln());
    }
    let (n, k) = (n as f64, k as f64);
    Ok(libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0))
}

/// `ln sum_i exp(t_i)` with the maximum factored out.
pub fn log_sum_exp(terms: &[f64]) -> Result<f64> {
    if terms.is_empty() {
        return Err(domain("log_sum_exp of an empty list"));
    }
    if let Some(bad) = terms.iter().find(|t| t.is_nan() || **t == f64::INFINITY) {
        return Err(domain(format!("log_sum_exp term {bad} is not finite or -inf")));
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(max);
    }
    let s: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok(max + s.ln())
}

/// `ln` of the r-th Catalan number `C(2r, r) / (r + 1)`.
pub fn catalan_log(r: u64) -> f64 {
    log_binomial(2 * r, r).expect("r <= 2r") - ((r + 1) as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_binomials() {
        assert_eq!(log_binomial(6, 2).unwrap(), 15f64.ln());
        assert_eq!(log_binomial(0, 0).unwrap(), 0.0);
        assert!(log_binomial(3, 4).is_err());
    }

    #[test]
    fn large_binomial_matches_accumulated_logs() {
        let oracle: f64 = (0..150).map(|i| ((300.0 - i as f64) / (i as f64 + 1.0)).ln()).sum();
        let got = log_binomial(300, 150).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-12);
    }

    #[test]
    fn lgamma_route_for_huge_rows() {
        let oracle: f64 = (0..5000).map(|i| ((20000.0 - i as f64) / (i as f64 + 1.0)).ln()).sum();
        let got = log_binomial(20000, 5000).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-12);
    }

    #[test]
    fn exact_integers_up_to_thirty() {
        for n in 0..=30u64 {
            let mut row = vec![1u64];
            for _ in 0..n {
                let mut next = vec![1u64; row.len() + 1];
                for i in 1..row.len() {
                    next[i] = row[i - 1] + row[i];
                }
                row = next;
            }
            for (k, c) in row.iter().enumerate() {
                let approx = log_binomial(n, k as u64).unwrap().exp();
                assert!((approx - *c as f64).abs() < 0.5, "C({n},{k})");
            }
        }
    }

    #[test]
    fn lse_examples() {
        assert!((log_sum_exp(&[0.0, 0.0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 3.0]).unwrap(), 3.0);
        let v = log_sum_exp(&[700.0, 700.0, 700.0]).unwrap();
        assert!((v - (700.0 + 3f64.ln())).abs() < 1e-12);
        assert!(log_sum_exp(&[]).is_err());
        assert!(log_sum_exp(&[f64::NAN]).is_err());
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan_log(0), 0.0);
        assert!((catalan_log(4) - 14f64.ln()).abs() < 1e-14);
        let r = 200.0_f64;
        let asymptotic = r * 4f64.ln() - (r * (r * std::f64::consts::PI).sqrt()).ln();
        let exact = catalan_log(200);
        assert!(((exact - asymptotic) / exact).abs() < 4e-3);
    }

    proptest! {
        #[test]
        fn lse_permutation_and_translation(
            mut t in prop::collection::vec(-50.0f64..50.0, 1..20),
            shift in -1e3f64..1e3,
        ) {
            let base = log_sum_exp(&t).unwrap();
            let shifted: Vec<f64> = t.iter().map(|x| x + shift).collect();
            prop_assert!((log_sum_exp(&shifted).unwrap() - (base + shift)).abs() < 1e-9);
            t.reverse();
            prop_assert!((log_sum_exp(&t).unwrap() - base).abs() < 1e-12);
        }
    }
}
