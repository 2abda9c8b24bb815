//! Brute-force ground truth: valuations by direct evaluation, period
//! detection, and a cross-check tying classifier and tree output to both.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::check::CheckReport;
use crate::classify::{branch_roots, classify_with_precision, predict_valuation, ClassKind, Classification};
use crate::error::{Error, Result};
use crate::padic::{padic_valuation, Valuation};
use crate::quadratic::Quadratic;
use crate::tree::{build_tree, check_structure};

/// Largest number of terms `cross_check` evaluates for one comparison.
pub const ORACLE_WINDOW_LIMIT: u64 = 1 << 20;

/// Levels over which `cross_check` hunts for unboundedness witnesses.
const WITNESS_LEVELS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationSequence {
    pub quadratic: Quadratic,
    /// `ν_p(f(n))` for `n = 0, 1, ...`
    pub terms: Vec<Valuation>,
    pub detected_period: Option<u64>,
}

impl ValuationSequence {
    /// Runs [`detect_period`] and stores the result.
    pub fn with_detected_period(mut self, max_exponent: u32) -> Result<Self> {
        self.detected_period = detect_period(&self, max_exponent)?;
        Ok(self)
    }
}

pub fn valuation_sequence(f: &Quadratic, count: usize) -> ValuationSequence {
    let p = f.prime();
    let terms = (0..count)
        .map(|n| padic_valuation(&f.eval(&BigInt::from(n)), p))
        .collect();
    ValuationSequence {
        quadratic: f.clone(),
        terms,
        detected_period: None,
    }
}

fn is_period(terms: &[Valuation], period: usize) -> bool {
    terms.iter().zip(&terms[period..]).all(|(x, y)| x == y)
}

/// Least `p^e` with `e ≤ max_exponent` that is a period of the whole window.
///
/// Only powers of `p` are tried, smallest first, so every smaller power has
/// been refuted before one is accepted.
pub fn detect_period(seq: &ValuationSequence, max_exponent: u32) -> Result<Option<u64>> {
    let p = seq.quadratic.prime().get();
    let largest = p
        .checked_pow(max_exponent)
        .and_then(|x| x.to_usize())
        .filter(|x| x.checked_mul(2).is_some())
        .ok_or(Error::InsufficientData {
            have: seq.terms.len(),
            need: usize::MAX,
        })?;
    if seq.terms.len() < 2 * largest {
        return Err(Error::InsufficientData {
            have: seq.terms.len(),
            need: 2 * largest,
        });
    }
    let mut period = 1usize;
    for _ in 0..=max_exponent {
        if is_period(&seq.terms, period) {
            return Ok(Some(period as u64));
        }
        period = period.saturating_mul(p as usize);
    }
    Ok(None)
}

/// All residues `r mod p^k` with `p^k | f(r)`, found by lifting the
/// solutions mod `p^j` one digit at a time from an exhaustive search mod `p`.
pub fn high_valuation_residues(f: &Quadratic, k: u32) -> Vec<BigInt> {
    let p = f.prime();
    let mut current = vec![BigInt::zero()];
    for j in 1..=k {
        let step = &p.pow(j - 1);
        let modulus = p.pow(j);
        current = current
            .iter()
            .flat_map(|r| (0..p.get()).map(move |t| r + step * t))
            .filter(|r| f.eval(r).is_multiple_of(&modulus))
            .collect();
        if current.is_empty() {
            break;
        }
    }
    current.sort();
    current
}

/// Runs every check that applies to `f` and reports each outcome.
pub fn cross_check(f: &Quadratic, depth: u32) -> CheckReport {
    let mut report = CheckReport::new();
    let depth = depth.max(1);
    let cls = match classify_with_precision(f, depth) {
        Ok(cls) => cls,
        Err(e) => {
            report.record("classify", false, e.to_string());
            return report;
        }
    };
    report.record("classify", true, cls.name());

    match build_tree(f, depth).and_then(|tree| check_structure(&tree, &cls)) {
        Ok(structure) => report.extend(structure),
        Err(e) => report.record("tree structure", false, e.to_string()),
    }

    if cls.is_finite() {
        check_finite(&cls, &mut report);
    } else {
        check_infinite(&cls, depth, &mut report);
    }
    report
}

fn window(cls: &Classification, levels: u32) -> Option<usize> {
    let p = cls.source.prime().get();
    p.checked_pow(levels)
        .and_then(|x| x.checked_mul(2))
        .filter(|&x| x <= ORACLE_WINDOW_LIMIT)
        .map(|x| x as usize)
}

fn check_finite(cls: &Classification, report: &mut CheckReport) {
    let levels = cls.levels().expect("finite classification");
    let f = &cls.source;

    let Some(count) = window(cls, levels) else {
        report.record(
            "oracle window",
            true,
            format!("2 p^{levels} exceeds {ORACLE_WINDOW_LIMIT} terms; sequence checks skipped"),
        );
        return;
    };
    let seq = valuation_sequence(f, count);

    if let ClassKind::Finite { .. } = cls.kind {
        let mismatch = seq.terms.iter().enumerate().find_map(|(n, &actual)| {
            let predicted = predict_valuation(cls, &BigInt::from(n)).ok()?;
            (predicted != actual).then(|| format!("n = {n}: predicted {predicted}, oracle {actual}"))
        });
        report.record(
            "closed-form valuations",
            mismatch.is_none(),
            mismatch.unwrap_or_else(|| format!("all {count} terms agree")),
        );
    } else {
        let constant = seq.terms.iter().all(|&v| v == Valuation::Finite(cls.shift));
        report.record("constant sequence", constant, format!("every term equals {}", cls.shift));
    }

    let expected = cls.source.prime().get().pow(levels);
    match detect_period(&seq, levels) {
        Ok(found) => report.record(
            "period",
            found == Some(expected),
            format!("detected {found:?}, expected {expected}"),
        ),
        Err(e) => report.record("period", false, e.to_string()),
    }

    // ν(f(n)) > max for some n would need a residue mod p^(max + 1) killing f
    let max = cls.discriminant_valuation().filter(|_| !matches!(cls.kind, ClassKind::DotTree));
    let bound = max.unwrap_or(0) + 1;
    let escapes = high_valuation_residues(&cls.reduced, bound);
    report.record(
        "bounded valuations",
        escapes.is_empty(),
        format!("{} residues mod p^{bound} reach valuation {bound}", escapes.len()),
    );
}

fn check_infinite(cls: &Classification, depth: u32, report: &mut CheckReport) {
    let roots = match branch_roots(cls, depth) {
        Ok(r) => r,
        Err(e) => {
            report.record("roots", false, e.to_string());
            return;
        }
    };
    let p = cls.source.prime();
    let mut residual_ok = true;
    let mut detail = format!("{} root(s) to precision {depth}", roots.len());
    for root in &roots {
        for k in 1..=depth {
            let approx = root.truncate(k);
            let v = padic_valuation(&cls.reduced.eval(approx.residue()), p);
            let coherent = k == 1 || root.truncate(k - 1).residue() == &approx.residue().mod_floor(&p.pow(k - 1));
            if !(v.at_least(k) && coherent) && residual_ok {
                residual_ok = false;
                detail = format!("root {} at precision {k}: valuation {v}", approx.residue());
            }
        }
    }
    report.record("root residuals", residual_ok, detail);

    let mut witness_ok = true;
    let mut detail = String::from("every level has a witness on each branch");
    for k in 1..=depth.min(WITNESS_LEVELS) {
        let witnesses = high_valuation_residues(&cls.reduced, k);
        let covered = roots
            .iter()
            .all(|r| witnesses.binary_search(r.truncate(k).residue()).is_ok());
        if witnesses.is_empty() || !covered {
            witness_ok = false;
            detail = format!("level {k}: {} witnesses, branches covered: {covered}", witnesses.len());
            break;
        }
    }
    report.record("unbounded valuations", witness_ok, detail);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64, a: i64, b: i64, c: i64) -> Quadratic {
        Quadratic::from_parts(p, a, b, c).unwrap()
    }

    fn finite_terms(seq: &ValuationSequence) -> Vec<u32> {
        seq.terms.iter().map(|v| v.finite().unwrap()).collect()
    }

    #[test]
    fn known_valuation_tables() {
        let seq = valuation_sequence(&q(3, 12, 16, 7), 20);
        assert_eq!(
            finite_terms(&seq),
            vec![0, 0, 1, 0, 0, 2, 0, 0, 1, 0, 0, 1, 0, 0, 2, 0, 0, 1, 0, 0]
        );
        let seq = valuation_sequence(&q(3, 4, 160, -587), 11);
        assert_eq!(finite_terms(&seq), vec![0, 2, 0, 0, 2, 0, 0, 6, 0, 0, 2]);
        assert_eq!(finite_terms(&valuation_sequence(&q(3, 1, 0, 1), 1)), vec![0]);
    }

    #[test]
    fn exact_zero_is_infinite() {
        let seq = valuation_sequence(&q(5, 1, 0, -4), 3);
        assert_eq!(seq.terms[2], Valuation::Infinity);
    }

    #[test]
    fn periods() {
        let seq = valuation_sequence(&q(3, 1, 0, 27), 18);
        assert_eq!(detect_period(&seq, 2).unwrap(), Some(9));
        let seq = valuation_sequence(&q(3, 4, 160, -587), 162);
        assert_eq!(detect_period(&seq, 4).unwrap(), Some(81));
        let seq = valuation_sequence(&q(3, 3, 3, 1), 2).with_detected_period(0).unwrap();
        assert_eq!(seq.detected_period, Some(1));
    }

    #[test]
    fn period_brute_force_agrees() {
        // smallest period of any length, not just powers of p
        let seq = valuation_sequence(&q(3, 4, 160, -587), 486);
        let smallest = (1..=243).find(|&t| is_period(&seq.terms, t)).unwrap();
        assert_eq!(smallest, 81);
    }

    #[test]
    fn unbounded_sequence_has_no_period() {
        let seq = valuation_sequence(&q(5, 1, 0, 1), 250);
        assert_eq!(detect_period(&seq, 3).unwrap(), None);
    }

    #[test]
    fn short_window_rejected() {
        let seq = valuation_sequence(&q(3, 1, 0, 27), 17);
        assert_eq!(
            detect_period(&seq, 2),
            Err(Error::InsufficientData { have: 17, need: 18 })
        );
    }

    #[test]
    fn high_valuation_residues_match_exhaustive_scan() {
        for (p, a, b, c) in [(3u64, 1i64, 0i64, 27i64), (5, 1, 0, 1), (3, 1, 0, 0), (7, 3, 5, -2)] {
            let f = q(p, a, b, c);
            for k in 1..=4u32 {
                let modulus = (p as i64).pow(k);
                let scan: Vec<BigInt> = (0..modulus)
                    .map(BigInt::from)
                    .filter(|r| padic_valuation(&f.eval(r), f.prime()).at_least(k))
                    .collect();
                assert_eq!(high_valuation_residues(&f, k), scan, "{f}, k = {k}");
            }
        }
    }

    #[test]
    fn cross_check_examples() {
        let report = cross_check(&q(3, 1, 0, 27), 4);
        assert!(report.all_passed(), "{report}");
        assert!(report.get("closed-form valuations").is_some());

        let report = cross_check(&q(5, 1, 0, 1), 4);
        assert!(report.all_passed(), "{report}");
        assert!(report.get("closed-form valuations").is_none());
        assert!(report.get("root residuals").is_some());

        // D = -3: a residue mod 7, so two branches
        let report = cross_check(&q(7, 1, 1, 1), 4);
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.get("classify").unwrap().detail, "TwoInfiniteBranches");
    }

    #[test]
    fn cross_check_dot_and_shifted() {
        for f in [q(3, 3, 3, 1), q(3, 27, 27, 9), q(5, 25, 50, 125), q(3, 9, 0, 81)] {
            let report = cross_check(&f, 5);
            assert!(report.all_passed(), "{f}\n{report}");
        }
    }
}
