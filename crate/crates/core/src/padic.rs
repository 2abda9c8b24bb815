//! Exact p-adic primitives over arbitrary-precision integers: valuations,
//! Legendre symbols, modular square roots, and Hensel lifting.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::prime::{pow_mod_u64, Prime};
use crate::quadratic::Quadratic;

/// A p-adic valuation: a nonnegative integer, or infinity for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }

    /// Adds a content shift `k`; infinity absorbs it.
    pub fn shifted(self, k: u32) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + k),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    /// True when the valuation is at least `k`.
    pub fn at_least(self, k: u32) -> bool {
        self >= Valuation::Finite(k)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x + y),
            _ => Valuation::Infinity,
        }
    }
}

impl From<u32> for Valuation {
    fn from(v: u32) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// A p-adic integer known modulo `p^precision`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    residue: BigInt,
    precision: u32,
    prime: Prime,
}

impl PadicApprox {
    /// Reduces `value` into `[0, p^precision)`.
    pub fn new(value: &BigInt, precision: u32, prime: Prime) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let residue = value.mod_floor(&prime.pow(precision));
        Ok(PadicApprox { residue, precision, prime })
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn modulus(&self) -> BigInt {
        self.prime.pow(self.precision)
    }

    /// The same p-adic integer truncated to a lower precision.
    ///
    /// Panics if `precision` is zero or exceeds the known precision.
    pub fn truncate(&self, precision: u32) -> PadicApprox {
        assert!(
            precision >= 1 && precision <= self.precision,
            "cannot truncate precision {} to {precision}",
            self.precision
        );
        PadicApprox {
            residue: self.residue.mod_floor(&self.prime.pow(precision)),
            precision,
            prime: self.prime,
        }
    }

    /// Base-p digits, least significant first, `precision` of them.
    pub fn digits(&self) -> Vec<u64> {
        let p = self.prime.to_bigint();
        let mut rest = self.residue.clone();
        (0..self.precision)
            .map(|_| {
                let (q, r) = rest.div_mod_floor(&p);
                rest = q;
                r.to_u64().expect("digit below p")
            })
            .collect()
    }

    /// Left-to-right order of the corresponding tree branches: compare the
    /// least significant digit first.
    pub fn branch_order(&self, other: &PadicApprox) -> Ordering {
        self.digits().cmp(&other.digits())
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.prime, self.precision)
    }
}

/// The square root of `p^(2 shift) * d` is `p^shift * unit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicSqrt {
    pub unit: PadicApprox,
    pub shift: u32,
}

/// The exponent of the highest power of `p` dividing `x`, with `ν(0) = ∞`.
/// Negative inputs are valued through `|x|`.
pub fn padic_valuation(x: &BigInt, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let p = p.to_bigint();
    let mut rest = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        rest = q;
        v += 1;
    }
}

/// Inverse of `x` modulo `modulus`, in `[0, modulus)`.
pub fn mod_inverse(x: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    let not_invertible = || Error::NotInvertible {
        value: x.to_string(),
        modulus: modulus.to_string(),
    };
    if !modulus.is_positive() {
        return Err(not_invertible());
    }
    let ext = x.mod_floor(modulus).extended_gcd(modulus);
    if !ext.gcd.is_one() {
        return Err(not_invertible());
    }
    Ok(ext.x.mod_floor(modulus))
}

fn residue_u64(a: &BigInt, p: Prime) -> u64 {
    a.mod_floor(&p.to_bigint()).to_u64().expect("residue below p")
}

/// Legendre symbol `(a / p)` by Euler's criterion.
pub fn legendre_symbol(a: &BigInt, p: Prime) -> i8 {
    let r = residue_u64(a, p);
    if r == 0 {
        0
    } else if pow_mod_u64(r, (p.get() - 1) / 2, p.get()) == 1 {
        1
    } else {
        -1
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Tonelli–Shanks for a nonzero quadratic residue `n` modulo `p`.
fn tonelli_shanks(n: u64, p: u64) -> u64 {
    if p % 4 == 3 {
        return pow_mod_u64(n, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p)
        .find(|&z| pow_mod_u64(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(n, q, p);
    let mut r = pow_mod_u64(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mul_mod(b, b, p);
        }
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// The smaller of the two square roots of `a` modulo `p`.
pub fn sqrt_mod_p(a: &BigInt, p: Prime) -> Result<u64> {
    if legendre_symbol(a, p) != 1 {
        return Err(Error::NotAResidue {
            value: a.to_string(),
            prime: p.get(),
        });
    }
    let x = tonelli_shanks(residue_u64(a, p), p.get());
    Ok(x.min(p.get() - x))
}

/// Newton iteration for a simple root: each step doubles the precision.
fn newton_lift<G, D>(g: G, dg: D, seed: BigInt, p: Prime, target: u32) -> Result<BigInt>
where
    G: Fn(&BigInt) -> BigInt,
    D: Fn(&BigInt) -> BigInt,
{
    let mut precision = 1;
    let mut x = seed.mod_floor(&p.to_bigint());
    while precision < target {
        precision = (precision * 2).min(target);
        let modulus = p.pow(precision);
        let step = g(&x) * mod_inverse(&dg(&x), &modulus)?;
        x = (x - step).mod_floor(&modulus);
    }
    Ok(x)
}

/// Lifts the canonical square root of `a` mod `p` to a root mod `p^target`.
pub fn hensel_lift_sqrt(a: &BigInt, p: Prime, target: u32) -> Result<PadicApprox> {
    if target == 0 {
        return Err(Error::ZeroPrecision);
    }
    let seed = BigInt::from(sqrt_mod_p(a, p)?);
    let root = newton_lift(|x| x * x - a, |x| BigInt::from(2) * x, seed, p, target)?;
    PadicApprox::new(&root, target, p)
}

/// Square root of a nonzero integer in the p-adic integers, split as
/// `p^shift * unit`. Zero has no unit part and is reported as `NoSquareRoot`.
pub fn padic_sqrt(a: &BigInt, p: Prime, target: u32) -> Result<PadicSqrt> {
    let no_root = || Error::NoSquareRoot {
        value: a.to_string(),
        prime: p.get(),
    };
    let v = padic_valuation(a, p).finite().ok_or_else(no_root)?;
    if v % 2 == 1 {
        return Err(no_root());
    }
    let unit_part = a / p.pow(v);
    if legendre_symbol(&unit_part, p) != 1 {
        return Err(no_root());
    }
    Ok(PadicSqrt {
        unit: hensel_lift_sqrt(&unit_part, p, target)?,
        shift: v / 2,
    })
}

/// Lifts a simple root `x0` of `f` modulo `p` to the unique root modulo `p^target`.
pub fn hensel_lift_quadratic_root(f: &Quadratic, x0: &BigInt, target: u32) -> Result<PadicApprox> {
    if target == 0 {
        return Err(Error::ZeroPrecision);
    }
    let p = f.prime();
    let pb = p.to_bigint();
    let simple = f.eval(x0).mod_floor(&pb).is_zero() && !f.derivative_at(x0).mod_floor(&pb).is_zero();
    if !simple {
        return Err(Error::NotASimpleRoot {
            seed: x0.to_string(),
            prime: p.get(),
        });
    }
    let root = newton_lift(|x| f.eval(x), |x| f.derivative_at(x), x0.clone(), p, target)?;
    PadicApprox::new(&root, target, p)
}
