use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A signed real stored as `sign * exp(log_magnitude)`.
///
/// Zero is represented by `log_magnitude = -inf` and sign 0.
#[derive(Clone, Copy, PartialEq)]
pub struct LogNumber {
    log_magnitude: f64,
    sign: i8,
}

impl LogNumber {
    pub const ZERO: LogNumber = LogNumber { log_magnitude: f64::NEG_INFINITY, sign: 0 };
    pub const ONE: LogNumber = LogNumber { log_magnitude: 0.0, sign: 1 };

    pub fn new(log_magnitude: f64, sign: i8) -> LogNumber {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            LogNumber::ZERO
        } else {
            LogNumber { log_magnitude, sign: sign.signum() }
        }
    }

    /// `exp(l)`, positive.
    pub fn from_ln(l: f64) -> LogNumber {
        LogNumber::new(l, 1)
    }

    pub fn from_f64(x: f64) -> LogNumber {
        if x == 0.0 {
            LogNumber::ZERO
        } else {
            LogNumber::new(x.abs().ln(), if x < 0.0 { -1 } else { 1 })
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.log_magnitude.exp()
    }

    pub fn log_magnitude(self) -> f64 {
        self.log_magnitude
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> LogNumber {
        LogNumber::new(self.log_magnitude, self.sign.abs())
    }

    pub fn recip(self) -> LogNumber {
        if self.is_zero() {
            LogNumber { log_magnitude: f64::INFINITY, sign: 1 }
        } else {
            LogNumber::new(-self.log_magnitude, self.sign)
        }
    }

    /// `self^p` for positive `self`.
    pub fn powf(self, p: f64) -> LogNumber {
        debug_assert!(self.sign >= 0, "powf of a negative LogNumber");
        if p == 0.0 {
            return LogNumber::ONE;
        }
        LogNumber::from_ln(self.log_magnitude * p)
    }
}

impl Mul for LogNumber {
    type Output = LogNumber;
    fn mul(self, rhs: LogNumber) -> LogNumber {
        LogNumber::new(self.log_magnitude + rhs.log_magnitude, self.sign * rhs.sign)
    }
}

impl Div for LogNumber {
    type Output = LogNumber;
    fn div(self, rhs: LogNumber) -> LogNumber {
        self * rhs.recip()
    }
}

impl Add for LogNumber {
    type Output = LogNumber;
    fn add(self, rhs: LogNumber) -> LogNumber {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_magnitude >= rhs.log_magnitude { (self, rhs) } else { (rhs, self) };
        let d = small.log_magnitude - big.log_magnitude;
        if big.sign == small.sign {
            LogNumber::new(big.log_magnitude + d.exp().ln_1p(), big.sign)
        } else if d == 0.0 {
            LogNumber::ZERO
        } else {
            LogNumber::new(big.log_magnitude + (-d.exp()).ln_1p(), big.sign)
        }
    }
}

impl Sub for LogNumber {
    type Output = LogNumber;
    fn sub(self, rhs: LogNumber) -> LogNumber {
        self + (-rhs)
    }
}

impl Neg for LogNumber {
    type Output = LogNumber;
    fn neg(self) -> LogNumber {
        LogNumber { log_magnitude: self.log_magnitude, sign: -self.sign }
    }
}

impl From<f64> for LogNumber {
    fn from(x: f64) -> LogNumber {
        LogNumber::from_f64(x)
    }
}

impl fmt::Debug for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            1 => "+",
            -1 => "-",
            _ => return f.write_str("0"),
        };
        write!(f, "{s}exp({})", self.log_magnitude)
    }
}
