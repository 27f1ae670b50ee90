use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::numeric::{round_sig15, CompensatedSum};

/// A real number stored as a sign and the natural log of its magnitude.
///
/// Expectations in this crate range over `e^{±10⁴}` and beyond, far outside
/// `f64`'s exponent range, so all of that arithmetic happens here.
#[derive(Clone, Copy, Debug)]
pub struct LogReal {
    sign: i8,
    logmag: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { sign: 0, logmag: f64::NEG_INFINITY };
    pub const ONE: LogReal = LogReal { sign: 1, logmag: 0.0 };

    /// `e^{ln_value}`; `-inf` maps to zero.
    pub fn from_ln(ln_value: f64) -> Self {
        if ln_value == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogReal { sign: 1, logmag: ln_value }
        }
    }

    pub fn from_parts(sign: i8, logmag: f64) -> Self {
        if sign == 0 || logmag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogReal { sign: sign.signum(), logmag }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal { sign: if x > 0.0 { 1 } else { -1 }, logmag: x.abs().ln() }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Value as `f64`, saturating to `±inf` or `0` outside its range.
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.logmag.exp()
    }

    /// `self^e` for a nonnegative base.
    pub fn powf(self, e: f64) -> Self {
        debug_assert!(self.sign >= 0);
        match self.sign {
            0 if e > 0.0 => Self::ZERO,
            0 => Self::ONE,
            _ => Self::from_ln(self.logmag * e),
        }
    }

    pub fn abs(self) -> Self {
        LogReal { sign: self.sign.abs(), ..self }
    }

    /// Sum of nonnegative terms given by their logs, accumulated in
    /// descending order of magnitude so the result does not depend on the
    /// order of the input.
    pub fn sum_ln_terms(mut ln_terms: Vec<f64>) -> Self {
        ln_terms.retain(|t| *t != f64::NEG_INFINITY);
        if ln_terms.is_empty() {
            return Self::ZERO;
        }
        ln_terms.sort_unstable_by(|a, b| b.total_cmp(a));
        let top = ln_terms[0];
        let acc: CompensatedSum = ln_terms.iter().map(|t| (t - top).exp()).collect();
        Self::from_ln(top + acc.value().ln())
    }
}

/// `ln(1 + s·e^{d})` for `d <= 0`, `s = ±1`, with `s = -1, d = 0` giving `-inf`.
fn ln1p_signed_exp(d: f64, s: i8) -> f64 {
    if s > 0 {
        (d.exp()).ln_1p()
    } else if d > -std::f64::consts::LN_2 {
        (-d.exp_m1()).ln()
    } else {
        (-d.exp()).ln_1p()
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.logmag >= rhs.logmag { (self, rhs) } else { (rhs, self) };
        if big.sign != small.sign && big.logmag == small.logmag {
            return Self::ZERO;
        }
        let d = small.logmag - big.logmag;
        let s = big.sign * small.sign;
        LogReal::from_parts(big.sign, big.logmag + ln1p_signed_exp(d, s))
    }
}

impl Neg for LogReal {
    type Output = LogReal;

    fn neg(self) -> LogReal {
        LogReal { sign: -self.sign, ..self }
    }
}

impl Sub for LogReal {
    type Output = LogReal;

    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogReal { sign: self.sign * rhs.sign, logmag: self.logmag + rhs.logmag }
    }
}

impl Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: LogReal) -> LogReal {
        assert!(rhs.sign != 0, "division of LogReal by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        LogReal { sign: self.sign * rhs.sign, logmag: self.logmag - rhs.logmag }
    }
}

impl PartialEq for LogReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.logmag.partial_cmp(&other.logmag),
                _ => other.logmag.partial_cmp(&self.logmag),
            },
            ord => Some(ord),
        }
    }
}

impl Serialize for LogReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LogReal", 2)?;
        st.serialize_field("sign", &self.sign)?;
        let logmag = if self.sign == 0 { None } else { Some(round_sig15(self.logmag)) };
        st.serialize_field("logmag", &logmag)?;
        st.end()
    }
}
