//! Thin arbitrary-precision float wrapper used to evaluate the finite-
//! temperature closed forms, whose terms cancel far below f64 resolution.

use std::cell::RefCell;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::error::{Error, Result};
use crate::specfun::SeriesScalar;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

#[derive(Clone, Debug)]
pub struct Mp {
    v: BigFloat,
    prec: usize,
}

impl Mp {
    fn wrap(v: BigFloat, prec: usize) -> Mp {
        Mp { v, prec }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }

    pub fn exp(&self) -> Mp {
        Mp::wrap(with_consts(|cc| self.v.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Mp {
        Mp::wrap(with_consts(|cc| self.v.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn sqrt(&self) -> Mp {
        Mp::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn abs(&self) -> Mp {
        Mp::wrap(self.v.abs(), self.prec)
    }

    pub fn recip(&self) -> Mp {
        Mp::wrap(self.v.reciprocal(self.prec, RM), self.prec)
    }

    pub fn powi(&self, k: i64) -> Mp {
        let p = Mp::wrap(self.v.powi(k.unsigned_abs() as usize, self.prec, RM), self.prec);
        if k < 0 {
            p.recip()
        } else {
            p
        }
    }

    pub fn square(&self) -> Mp {
        self * self
    }

    /// Nearest f64 (truncation of the mantissa below 64 bits before rounding).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if self.v.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, exponent, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        let top = *words.last().expect("normalized mantissa") as f64;
        // value = 0.mantissa * 2^exponent, top word holds the leading 64 bits
        let e = i64::from(exponent) - 64;
        let magnitude = if e > 2000 {
            f64::INFINITY
        } else if e < -2200 {
            0.0
        } else {
            let half = (e / 2) as i32;
            top * 2f64.powi(half) * 2f64.powi(e as i32 - half)
        };
        if sign == Sign::Neg {
            -magnitude
        } else {
            magnitude
        }
    }

    pub fn ln_abs_f64(&self) -> f64 {
        if self.v.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.v.as_raw_parts() {
            Some((words, _, _, exponent, _)) => {
                let top = *words.last().expect("normalized mantissa") as f64;
                top.ln() + (f64::from(exponent) - 64.0) * std::f64::consts::LN_2
            }
            None => f64::NAN,
        }
    }
}

/// Working precision plus constructors.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub prec: usize,
}

impl Ctx {
    pub fn new(prec: usize) -> Ctx {
        Ctx { prec }
    }

    pub fn num(&self, x: f64) -> Mp {
        Mp::wrap(BigFloat::from_f64(x, self.prec), self.prec)
    }

    pub fn pi(&self) -> Mp {
        Mp::wrap(with_consts(|cc| cc.pi(self.prec, RM)), self.prec)
    }

    /// `Gamma(k / 2)` for `k >= 1`, exactly up to the final roundings.
    pub fn gamma_half(&self, k: u64) -> Mp {
        assert!(k >= 1);
        if k % 2 == 0 {
            // (k/2 - 1)!
            (1..k / 2).fold(self.num(1.0), |acc, i| acc * i as f64)
        } else {
            // sqrt(pi) * prod_{i=0}^{(k-3)/2} (i + 1/2)
            let mut acc = self.pi().sqrt();
            let mut x = 0.5;
            while x < k as f64 / 2.0 - 0.25 {
                acc = acc * x;
                x += 1.0;
            }
            acc
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Mp> for &Mp {
            type Output = Mp;
            fn $method(self, rhs: &Mp) -> Mp {
                let p = self.prec.max(rhs.prec);
                Mp::wrap(BigFloat::$method(&self.v, &rhs.v, p, RM), p)
            }
        }
        impl $trait<Mp> for Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Mp> for Mp {
            type Output = Mp;
            fn $method(self, rhs: &Mp) -> Mp {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<Mp> for &Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                $trait::$method(self, &rhs)
            }
        }
        impl $trait<f64> for &Mp {
            type Output = Mp;
            fn $method(self, rhs: f64) -> Mp {
                let r = Mp::wrap(BigFloat::from_f64(rhs, self.prec), self.prec);
                $trait::$method(self, &r)
            }
        }
        impl $trait<f64> for Mp {
            type Output = Mp;
            fn $method(self, rhs: f64) -> Mp {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<&Mp> for f64 {
            type Output = Mp;
            fn $method(self, rhs: &Mp) -> Mp {
                let l = Mp::wrap(BigFloat::from_f64(self, rhs.prec), rhs.prec);
                $trait::$method(&l, rhs)
            }
        }
        impl $trait<Mp> for f64 {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                $trait::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp::wrap(self.v.neg(), self.prec)
    }
}

impl Neg for &Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp::wrap(self.v.clone().neg(), self.prec)
    }
}

impl SeriesScalar for Mp {
    fn scale(&self, num: f64, den: f64) -> Self {
        Div::div(Mul::mul(self, num), den)
    }
    fn mul(&self, other: &Self) -> Self {
        Mul::mul(self, other)
    }
    fn add(&self, other: &Self) -> Self {
        Add::add(self, other)
    }
    fn abs(&self) -> Self {
        Mp::abs(self)
    }
    fn ln_abs(&self) -> f64 {
        self.ln_abs_f64()
    }
}

/// Largest working precision tried before giving up.
pub const MAX_PRECISION_BITS: usize = 1 << 16;

/// Evaluates `f` at increasing precision until two successive precisions
/// (`p` and `p + 64` bits) agree to 2^-60 relative, starting from `start_bits`.
pub fn evaluate_adaptive(start_bits: usize, f: impl Fn(Ctx) -> Result<Mp>) -> Result<f64> {
    let mut p = start_bits.max(128).next_multiple_of(64);
    while p <= MAX_PRECISION_BITS {
        let lo = f(Ctx::new(p))?;
        let hi = f(Ctx::new(p + 64))?;
        if !hi.is_finite() || !lo.is_finite() {
            return Err(Error::Numerical("closed form evaluated to a non-finite value".into()));
        }
        if hi.is_zero() && lo.is_zero() {
            return Ok(0.0);
        }
        let diff = ((&hi - &lo) / &hi).abs().to_f64();
        if diff <= 2f64.powi(-60) {
            return Ok(hi.to_f64());
        }
        p *= 2;
    }
    Err(Error::Numerical(format!(
        "closed form did not stabilise below {MAX_PRECISION_BITS} bits"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_round_trips() {
        let ctx = Ctx::new(256);
        for x in [1.0, 1.5, -3.0, 0.1, -1e-200, 6.02e23, 1e300] {
            assert_eq!(ctx.num(x).to_f64(), x);
        }
        assert_eq!(ctx.num(0.0).to_f64(), 0.0);
    }

    #[test]
    fn transcendental_values() {
        let ctx = Ctx::new(256);
        assert!((ctx.num(1.0).exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!((ctx.num(2.0).ln().to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
        assert_eq!(ctx.gamma_half(10).to_f64(), 24.0);
        let g = ctx.gamma_half(7).to_f64(); // Gamma(3.5) = 15 sqrt(pi) / 8
        assert!((g - 15.0 * std::f64::consts::PI.sqrt() / 8.0).abs() < 1e-14);
        assert_eq!(ctx.num(3.0).powi(-2).to_f64(), 1.0 / 9.0);
    }

    #[test]
    fn resolves_cancellation_beyond_f64() {
        // (1 + 1e-30) - 1
        let v = evaluate_adaptive(128, |ctx| {
            let tiny = ctx.num(1e-30);
            Ok((ctx.num(1.0) + &tiny) - ctx.num(1.0))
        })
        .unwrap();
        assert!((v - 1e-30).abs() < 1e-45);
    }

    #[test]
    fn huge_exponents_do_not_overflow() {
        let ctx = Ctx::new(192);
        let big = ctx.num(2000.0).exp();
        let back = (&big * ctx.num(-2000.0).exp()).to_f64();
        assert!((back - 1.0).abs() < 1e-15);
        assert!((big.ln_abs_f64() - 2000.0).abs() < 1e-12);
    }
}
