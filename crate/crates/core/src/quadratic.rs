use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prime::Prime;

/// `f(n) = a n^2 + b n + c` together with the odd prime whose valuations we study.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quadratic {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    p: Prime,
}

impl Quadratic {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, p: Prime) -> Result<Self> {
        let a = a.into();
        if a.is_zero() {
            return Err(Error::InvalidQuadratic);
        }
        Ok(Quadratic { a, b: b.into(), c: c.into(), p })
    }

    /// Validates `p` and the coefficients in one step.
    pub fn from_parts(p: u64, a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let p = Prime::new(p)?;
        Quadratic::new(a, b, c, p)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        (&self.a * n + &self.b) * n + &self.c
    }

    pub fn derivative_at(&self, n: &BigInt) -> BigInt {
        BigInt::from(2) * &self.a * n + &self.b
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// The polynomial `n -> f(n - s)`.
    pub fn translate(&self, s: &BigInt) -> Quadratic {
        let b = &self.b - BigInt::from(2) * &self.a * s;
        let c = (&self.a * s - &self.b) * s + &self.c;
        Quadratic { a: self.a.clone(), b, c, p: self.p }
    }

    /// Multiplies every coefficient by `p^k`.
    pub fn scale_by_prime_power(&self, k: u32) -> Quadratic {
        let factor = self.p.pow(k);
        Quadratic {
            a: &self.a * &factor,
            b: &self.b * &factor,
            c: &self.c * &factor,
            p: self.p,
        }
    }

    /// Divides every coefficient by `p^k`; the caller guarantees exactness.
    pub(crate) fn divide_by_prime_power(&self, k: u32) -> Quadratic {
        let factor = self.p.pow(k);
        Quadratic {
            a: &self.a / &factor,
            b: &self.b / &factor,
            c: &self.c / &factor,
            p: self.p,
        }
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, coeff: &BigInt, var: &str, first: bool) -> fmt::Result {
    if coeff.is_zero() {
        return Ok(());
    }
    let sign = if coeff.is_negative() { "-" } else { "+" };
    match (first, coeff.is_negative()) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, _) => write!(f, " {sign} ")?,
    }
    let mag = coeff.abs();
    if mag.is_one() && !var.is_empty() {
        write!(f, "{var}")
    } else {
        write!(f, "{mag}{var}")
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, &self.a, "n^2", true)?;
        write_term(f, &self.b, "n", false)?;
        write_term(f, &self.c, "", false)
    }
}
