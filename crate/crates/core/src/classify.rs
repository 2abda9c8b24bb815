//! Five-way classification of valuation trees and the closed-form valuation
//! formula for finite trees.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::padic::{
    hensel_lift_quadratic_root, legendre_symbol, mod_inverse, padic_sqrt, padic_valuation, PadicApprox,
    Valuation,
};
use crate::quadratic::Quadratic;

/// Precision of the roots carried in a classification unless overridden.
pub const DEFAULT_ROOT_PRECISION: u32 = 8;

/// `D = b^2 - 4ac` split as `p^ν · Δ` with `p ∤ Δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminant {
    pub value: BigInt,
    pub valuation: Valuation,
    /// Unit part `Δ`; absent when `D = 0`.
    pub delta: Option<BigInt>,
    /// Legendre symbol of `Δ`, or 0 when `D = 0`.
    pub delta_legendre: i8,
}

impl Discriminant {
    pub fn of(f: &Quadratic) -> Self {
        let p = f.prime();
        let value = f.discriminant();
        let valuation = padic_valuation(&value, p);
        let delta = valuation.finite().map(|v| &value / p.pow(v));
        let delta_legendre = delta.as_ref().map_or(0, |d| legendre_symbol(d, p));
        Discriminant {
            value,
            valuation,
            delta,
            delta_legendre,
        }
    }

    pub fn delta_is_qr(&self) -> bool {
        self.delta_legendre == 1
    }

    /// Whether `D` has a square root in the p-adic integers (`D = 0` included).
    pub fn has_padic_sqrt(&self) -> bool {
        match self.valuation {
            Valuation::Infinity => true,
            Valuation::Finite(v) => v % 2 == 0 && self.delta_is_qr(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassKind {
    /// `a ≡ b ≡ 0 (mod p)`: a single node.
    DotTree,
    /// `a ≡ 0`, `b ≢ 0 (mod p)`: one infinite branch, terminals at `m - 1`.
    OneInfiniteBranchLinearCase { root: PadicApprox },
    /// `D = 0`: one infinite branch through the double root, terminals at `2(m - 1)`.
    OneInfiniteBranchDoubleRoot { root: PadicApprox },
    /// `D` is a nonzero p-adic square: two infinite branches, in left-to-right order.
    TwoInfiniteBranches { roots: [PadicApprox; 2] },
    /// No p-adic root: the tree ends after `levels` levels.
    Finite {
        levels: u32,
        s_ell: BigInt,
        max_valuation: u32,
        /// The source polynomial translated by `S_ℓ`, `n -> f(n - S_ℓ)`.
        translated: Quadratic,
    },
}

impl ClassKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassKind::DotTree => "DotTree",
            ClassKind::OneInfiniteBranchLinearCase { .. } => "OneInfiniteBranchLinearCase",
            ClassKind::OneInfiniteBranchDoubleRoot { .. } => "OneInfiniteBranchDoubleRoot",
            ClassKind::TwoInfiniteBranches { .. } => "TwoInfiniteBranches",
            ClassKind::Finite { .. } => "Finite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// The polynomial as given.
    pub source: Quadratic,
    /// `source / p^shift`, with `p ∤ gcd(a, b, c)`.
    pub reduced: Quadratic,
    pub shift: u32,
    /// Discriminant of the reduced polynomial.
    pub discriminant: Discriminant,
    pub kind: ClassKind,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Roots in the p-adic integers, one per infinite branch.
    pub fn roots(&self) -> &[PadicApprox] {
        match &self.kind {
            ClassKind::OneInfiniteBranchLinearCase { root } | ClassKind::OneInfiniteBranchDoubleRoot { root } => {
                std::slice::from_ref(root)
            }
            ClassKind::TwoInfiniteBranches { roots } => roots,
            ClassKind::DotTree | ClassKind::Finite { .. } => &[],
        }
    }

    pub fn infinite_branch_count(&self) -> usize {
        self.roots().len()
    }

    /// Number of levels of a finite tree; a dot tree has zero.
    pub fn levels(&self) -> Option<u32> {
        match &self.kind {
            ClassKind::DotTree => Some(0),
            ClassKind::Finite { levels, .. } => Some(*levels),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.levels().is_some()
    }

    /// `ν_p(D)` of the reduced polynomial, when `D ≠ 0`.
    pub fn discriminant_valuation(&self) -> Option<u32> {
        self.discriminant.valuation.finite()
    }
}

/// Divides out the largest power of `p` common to all three coefficients.
pub fn reduce_content(f: &Quadratic) -> (Quadratic, u32) {
    let p = f.prime();
    let shift = [f.a(), f.b(), f.c()]
        .into_iter()
        .map(|x| padic_valuation(x, p))
        .min()
        .and_then(Valuation::finite)
        .expect("a is nonzero");
    (f.divide_by_prime_power(shift), shift)
}

pub fn classify(f: &Quadratic) -> Result<Classification> {
    classify_with_precision(f, DEFAULT_ROOT_PRECISION)
}

pub fn classify_with_precision(f: &Quadratic, precision: u32) -> Result<Classification> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let (reduced, shift) = reduce_content(f);
    let p = reduced.prime().to_bigint();
    let discriminant = Discriminant::of(&reduced);
    let a_unit = !reduced.a().is_multiple_of(&p);
    let b_unit = !reduced.b().is_multiple_of(&p);

    let kind = if !a_unit && !b_unit {
        ClassKind::DotTree
    } else if !a_unit {
        ClassKind::OneInfiniteBranchLinearCase {
            root: linear_case_root(&reduced, precision)?,
        }
    } else if discriminant.valuation.is_infinite() {
        ClassKind::OneInfiniteBranchDoubleRoot {
            root: double_root(&reduced, precision)?,
        }
    } else if discriminant.has_padic_sqrt() {
        ClassKind::TwoInfiniteBranches {
            roots: split_roots(&reduced, precision)?,
        }
    } else {
        let nu_d = discriminant.valuation.finite().expect("D is nonzero");
        let levels = nu_d.div_ceil(2);
        let s_ell = compute_s_ell(&reduced, levels)?;
        ClassKind::Finite {
            levels,
            translated: f.translate(&s_ell),
            s_ell,
            max_valuation: nu_d + shift,
        }
    };

    Ok(Classification {
        source: f.clone(),
        reduced,
        shift,
        discriminant,
        kind,
    })
}

/// Seeds Hensel lifting with `x0 = -c b^(p-2) mod p`.
fn linear_case_root(f: &Quadratic, precision: u32) -> Result<PadicApprox> {
    let p = f.prime().to_bigint();
    let seed = (-f.c() * f.b().modpow(&(&p - 2u32), &p)).mod_floor(&p);
    hensel_lift_quadratic_root(f, &seed, precision)
}

fn double_root(f: &Quadratic, precision: u32) -> Result<PadicApprox> {
    let prime = f.prime();
    let modulus = prime.pow(precision);
    let inv = mod_inverse(&(BigInt::from(2) * f.a()), &modulus)?;
    PadicApprox::new(&(-f.b() * inv), precision, prime)
}

/// `(-b ± √D) / 2a`, sorted into left-to-right tree order.
fn split_roots(f: &Quadratic, precision: u32) -> Result<[PadicApprox; 2]> {
    let prime = f.prime();
    let modulus = prime.pow(precision);
    let sqrt = padic_sqrt(&f.discriminant(), prime, precision)?;
    let sqrt_d = sqrt.unit.residue() * prime.pow(sqrt.shift);
    let inv = mod_inverse(&(BigInt::from(2) * f.a()), &modulus)?;
    let plus = PadicApprox::new(&((-f.b() + &sqrt_d) * &inv), precision, prime)?;
    let minus = PadicApprox::new(&((-f.b() - &sqrt_d) * &inv), precision, prime)?;
    let mut roots = [plus, minus];
    roots.sort_by(|x, y| x.branch_order(y));
    Ok(roots)
}

/// `S_ℓ = b (2a)^(-1) mod p^ℓ`, the representative in `[0, p^ℓ)` of the
/// truncated expansion of `b / 2a`.
pub fn compute_s_ell(f: &Quadratic, ell: u32) -> Result<BigInt> {
    let modulus = f.prime().pow(ell);
    let inv = mod_inverse(&(BigInt::from(2) * f.a()), &modulus)?;
    Ok((f.b() * inv).mod_floor(&modulus))
}

/// Closed-form `ν_p(f(n))` for a finite classification.
pub fn predict_valuation(cls: &Classification, n: &BigInt) -> Result<Valuation> {
    let ClassKind::Finite {
        levels,
        s_ell,
        max_valuation,
        ..
    } = &cls.kind
    else {
        return Err(Error::WrongClassification {
            expected: "Finite",
            found: cls.name(),
        });
    };
    let spine = padic_valuation(&(n + s_ell), cls.source.prime());
    Ok(match spine {
        Valuation::Finite(m) if m < *levels => Valuation::Finite(2 * m + cls.shift),
        _ => Valuation::Finite(*max_valuation),
    })
}

/// Roots of the classification recomputed at an arbitrary precision.
pub fn branch_roots(cls: &Classification, precision: u32) -> Result<Vec<PadicApprox>> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let f = &cls.reduced;
    match &cls.kind {
        ClassKind::OneInfiniteBranchLinearCase { .. } => Ok(vec![linear_case_root(f, precision)?]),
        ClassKind::OneInfiniteBranchDoubleRoot { .. } => Ok(vec![double_root(f, precision)?]),
        ClassKind::TwoInfiniteBranches { .. } => Ok(split_roots(f, precision)?.to_vec()),
        ClassKind::DotTree | ClassKind::Finite { .. } => Err(Error::WrongClassification {
            expected: "infinite-branch",
            found: cls.name(),
        }),
    }
}

/// For each infinite branch, the node `(m, ξ mod p^m)` at every level `1..=depth`.
pub fn infinite_branch_residues(cls: &Classification, depth: u32) -> Result<Vec<Vec<(u32, BigInt)>>> {
    let roots = branch_roots(cls, depth)?;
    Ok(roots
        .iter()
        .map(|root| (1..=depth).map(|m| (m, root.truncate(m).residue().clone())).collect())
        .collect())
}

/// Level at which the two branches of a split classification first differ.
pub fn separation_level(roots: &[PadicApprox]) -> Option<u32> {
    let [x, y] = roots else { return None };
    x.digits()
        .iter()
        .zip(y.digits())
        .position(|(dx, dy)| *dx != dy)
        .map(|i| i as u32 + 1)
}
