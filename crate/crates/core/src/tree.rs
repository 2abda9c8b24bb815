//! Explicit construction of valuation trees by residue-class expansion, and
//! structural checks of built trees against their classification.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::check::CheckReport;
use crate::classify::{branch_roots, separation_level, ClassKind, Classification};
use crate::error::{Error, Result};
use crate::padic::{legendre_symbol, padic_valuation, Valuation};
use crate::prime::Prime;
use crate::quadratic::Quadratic;

/// Default depth cap. A pruned tree of a quadratic holds at most two
/// non-terminating nodes per level, so a build touches roughly `2 p · cap`
/// nodes; very large primes still make every split expensive.
pub const DEFAULT_DEPTH_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeStatus {
    /// `ν_p(f(n))` equals `valuation` on the whole class.
    Terminating { valuation: u32 },
    /// The valuation varies on the class; it is at least `lower_bound` everywhere.
    Splitting { lower_bound: u32, children: Vec<TreeNode> },
    /// Would split, but sits at the depth cap.
    DepthCapped { lower_bound: u32 },
}

/// The residue class `n ≡ residue (mod p^level)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub level: u32,
    pub residue: BigInt,
    /// `f(residue) = 0` exactly.
    pub exact_root: bool,
    pub status: NodeStatus,
}

impl TreeNode {
    pub fn is_terminating(&self) -> bool {
        matches!(self.status, NodeStatus::Terminating { .. })
    }

    pub fn terminal_valuation(&self) -> Option<u32> {
        match self.status {
            NodeStatus::Terminating { valuation } => Some(valuation),
            _ => None,
        }
    }

    pub fn children(&self) -> &[TreeNode] {
        match &self.status {
            NodeStatus::Splitting { children, .. } => children,
            _ => &[],
        }
    }

    /// Pre-order traversal, children left to right.
    pub fn descendants(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children().iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationTree {
    pub root: TreeNode,
    pub quadratic: Quadratic,
    pub depth_cap: u32,
    /// Least level made only of terminating nodes; `None` if the cap was hit.
    pub levels: Option<u32>,
}

impl ValuationTree {
    pub fn prime(&self) -> Prime {
        self.quadratic.prime()
    }

    pub fn is_finite(&self) -> bool {
        self.levels.is_some()
    }

    pub fn nodes(&self) -> Vec<&TreeNode> {
        self.root.descendants()
    }

    pub fn nodes_at_level(&self, level: u32) -> Vec<&TreeNode> {
        self.nodes().into_iter().filter(|n| n.level == level).collect()
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        self.nodes().into_iter().filter(|n| n.is_terminating()).collect()
    }

    pub fn capped(&self) -> Vec<&TreeNode> {
        self.nodes()
            .into_iter()
            .filter(|n| matches!(n.status, NodeStatus::DepthCapped { .. }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expansion {
    Terminates { valuation: u32 },
    Splits { lower_bound: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeExpansion {
    pub exact_root: bool,
    pub expansion: Expansion,
}

/// Decides whether `ν_p(f(p^m q + r))` is constant in `q`.
///
/// Writes `f(p^m q + r) = f(r) + f'(r) p^m q + a p^(2m) q^2`. With `v = ν(f(r))`
/// and `w` the least valuation of the two `q`-terms: `v < w` pins the
/// valuation at `v`; `v > w` lets it drop to `w` for some `q`; at `v = w` it
/// rises above `w` exactly when `u + αt + βt^2 ≡ 0 (mod p)` is solvable, where
/// `u, α, β` are the three terms divided by `p^w`.
pub fn expand_node(f: &Quadratic, level: u32, residue: &BigInt) -> NodeExpansion {
    let p = f.prime();
    let value = f.eval(residue);
    let exact_root = value.is_zero();
    let v = padic_valuation(&value, p);

    let linear = padic_valuation(&f.derivative_at(residue), p).shifted(level);
    let quadratic = padic_valuation(f.a(), p).shifted(2 * level);
    let w = linear.min(quadratic).finite().expect("a is nonzero");

    let expansion = match v {
        Valuation::Finite(v) if v < w => Expansion::Terminates { valuation: v },
        Valuation::Finite(v) if v == w => {
            let pb = p.to_bigint();
            let derivative = f.derivative_at(residue);
            let u = (&value / p.pow(w)).mod_floor(&pb);
            let alpha = if linear == Valuation::Finite(w) {
                (&derivative / p.pow(w - level)).mod_floor(&pb)
            } else {
                BigInt::zero()
            };
            let beta = if quadratic == Valuation::Finite(w) {
                (f.a() / p.pow(w - 2 * level)).mod_floor(&pb)
            } else {
                BigInt::zero()
            };
            let rises = if beta.is_zero() {
                !alpha.is_zero()
            } else {
                legendre_symbol(&(&alpha * &alpha - BigInt::from(4) * &beta * &u), p) != -1
            };
            if rises {
                Expansion::Splits { lower_bound: w }
            } else {
                Expansion::Terminates { valuation: v }
            }
        }
        _ => Expansion::Splits { lower_bound: w },
    };
    NodeExpansion { exact_root, expansion }
}

/// Builds the pruned valuation tree down to `depth_cap`.
pub fn build_tree(f: &Quadratic, depth_cap: u32) -> Result<ValuationTree> {
    if depth_cap == 0 {
        return Err(Error::ZeroPrecision);
    }
    let mut deepest_split: Option<u32> = None;
    let mut capped = false;
    let root = build_node(f, 0, BigInt::zero(), depth_cap, &mut deepest_split, &mut capped);
    let levels = if capped {
        None
    } else {
        Some(deepest_split.map_or(0, |m| m + 1))
    };
    Ok(ValuationTree {
        root,
        quadratic: f.clone(),
        depth_cap,
        levels,
    })
}

fn build_node(
    f: &Quadratic,
    level: u32,
    residue: BigInt,
    cap: u32,
    deepest_split: &mut Option<u32>,
    capped: &mut bool,
) -> TreeNode {
    let NodeExpansion { exact_root, expansion } = expand_node(f, level, &residue);
    let status = match expansion {
        Expansion::Terminates { valuation } => NodeStatus::Terminating { valuation },
        Expansion::Splits { lower_bound } if level >= cap => {
            *capped = true;
            NodeStatus::DepthCapped { lower_bound }
        }
        Expansion::Splits { lower_bound } => {
            *deepest_split = Some(deepest_split.map_or(level, |d| d.max(level)));
            let step = f.prime().pow(level);
            let children = (0..f.prime().get())
                .map(|t| {
                    let child = &residue + &step * t;
                    build_node(f, level + 1, child, cap, deepest_split, capped)
                })
                .collect();
            NodeStatus::Splitting { lower_bound, children }
        }
    };
    TreeNode {
        level,
        residue,
        exact_root,
        status,
    }
}

/// Per-level view of the non-terminating residues and the terminal nodes.
struct Level<'a> {
    open: BTreeSet<BigInt>,
    terminals: Vec<&'a TreeNode>,
}

fn level_view(tree: &ValuationTree, m: u32) -> Level<'_> {
    let nodes = tree.nodes_at_level(m);
    Level {
        open: nodes
            .iter()
            .filter(|n| !n.is_terminating())
            .map(|n| n.residue.clone())
            .collect(),
        terminals: nodes.into_iter().filter(|n| n.is_terminating()).collect(),
    }
}

fn fmt_set(set: &BTreeSet<BigInt>) -> String {
    let items: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(","))
}

/// Checks the built tree against the shape its classification predicts.
pub fn check_structure(tree: &ValuationTree, cls: &Classification) -> Result<CheckReport> {
    if tree.quadratic != cls.source {
        return Err(Error::MismatchedInput);
    }
    let mut report = CheckReport::new();
    check_node_soundness(tree, &mut report);

    let p = tree.prime();
    let shift = cls.shift;
    let cap = tree.depth_cap;
    match &cls.kind {
        ClassKind::DotTree => {
            let ok = tree.levels == Some(0) && tree.root.terminal_valuation() == Some(shift);
            report.record(
                "dot tree",
                ok,
                format!("single node with valuation {shift}"),
            );
        }
        ClassKind::OneInfiniteBranchLinearCase { .. } | ClassKind::OneInfiniteBranchDoubleRoot { .. } => {
            let double = matches!(cls.kind, ClassKind::OneInfiniteBranchDoubleRoot { .. });
            let root = &branch_roots(cls, cap)?[0];
            report.record("infinite", !tree.is_finite(), "tree never closes before the cap");
            for m in 1..=cap {
                let view = level_view(tree, m);
                let expected_open: BTreeSet<BigInt> = [root.truncate(m).residue().clone()].into();
                let expected_val = if double { 2 * (m - 1) } else { m - 1 } + shift;
                let vals: Vec<u32> = view.terminals.iter().filter_map(|n| n.terminal_valuation()).collect();
                let ok = view.open == expected_open
                    && vals.len() as u64 == p.get() - 1
                    && vals.iter().all(|&v| v == expected_val);
                report.record(
                    format!("level {m}"),
                    ok,
                    format!(
                        "non-terminating {} (expected {}), {} terminals at valuation {expected_val}",
                        fmt_set(&view.open),
                        fmt_set(&expected_open),
                        vals.len()
                    ),
                );
            }
        }
        ClassKind::TwoInfiniteBranches { .. } => {
            let roots = branch_roots(cls, cap)?;
            let sep = separation_level(&roots);
            report.record("infinite", !tree.is_finite(), "tree never closes before the cap");
            for m in 1..=cap {
                let view = level_view(tree, m);
                let expected_open: BTreeSet<BigInt> =
                    roots.iter().map(|r| r.truncate(m).residue().clone()).collect();
                let expected_count = if sep.is_some_and(|s| m >= s) { 2 } else { 1 };
                let ok = view.open == expected_open && view.open.len() == expected_count;
                report.record(
                    format!("level {m}"),
                    ok,
                    format!(
                        "non-terminating {} (expected {} with {expected_count} branch(es))",
                        fmt_set(&view.open),
                        fmt_set(&expected_open)
                    ),
                );
            }
        }
        ClassKind::Finite {
            levels,
            s_ell,
            max_valuation,
            ..
        } => {
            let ell = *levels;
            if ell == 0 {
                let ok = tree.levels == Some(0) && tree.root.terminal_valuation() == Some(*max_valuation);
                report.record("dot tree", ok, format!("single node with valuation {max_valuation}"));
                return Ok(report);
            }
            if ell <= cap {
                report.record(
                    "level count",
                    tree.levels == Some(ell),
                    format!("built {:?}, predicted {ell}", tree.levels),
                );
            } else {
                report.record(
                    "level count",
                    !tree.is_finite() && tree.capped().len() == 1,
                    format!("predicted {ell} levels exceed the cap {cap}"),
                );
            }
            let spine = |m: u32| (-s_ell).mod_floor(&p.pow(m));
            for m in 1..=ell.min(cap) {
                let view = level_view(tree, m);
                let spine_residue = spine(m);
                let mut ok = view.terminals.len() as u64 == if m < ell { p.get() - 1 } else { p.get() };
                for node in &view.terminals {
                    let expected = if m == ell && node.residue == spine_residue {
                        *max_valuation
                    } else {
                        2 * (m - 1) + shift
                    };
                    ok &= node.terminal_valuation() == Some(expected);
                }
                let expected_open: BTreeSet<BigInt> = if m < ell {
                    [spine_residue].into()
                } else {
                    BTreeSet::new()
                };
                ok &= view.open == expected_open;
                report.record(
                    format!("level {m}"),
                    ok,
                    format!(
                        "{} terminals, non-terminating {} (expected {})",
                        view.terminals.len(),
                        fmt_set(&view.open),
                        fmt_set(&expected_open)
                    ),
                );
            }
            if ell <= cap {
                let maxima: Vec<&TreeNode> = tree
                    .leaves()
                    .into_iter()
                    .filter(|n| n.terminal_valuation() == Some(*max_valuation))
                    .collect();
                let top = tree.leaves().iter().filter_map(|n| n.terminal_valuation()).max();
                let ok = top == Some(*max_valuation) && maxima.len() == 1 && maxima[0].level == ell;
                report.record(
                    "maximum valuation",
                    ok,
                    format!("largest terminal {top:?}, expected {max_valuation} at one level-{ell} node"),
                );
            }
        }
    }
    Ok(report)
}

/// Re-evaluates `f` at every node residue.
fn check_node_soundness(tree: &ValuationTree, report: &mut CheckReport) {
    let f = &tree.quadratic;
    let p = tree.prime();
    let mut bad: Option<String> = None;
    for node in tree.nodes() {
        let v = padic_valuation(&f.eval(&node.residue), p);
        let ok = match &node.status {
            NodeStatus::Terminating { valuation } => v == Valuation::Finite(*valuation),
            NodeStatus::DepthCapped { lower_bound } => v.at_least(node.level) && v.at_least(*lower_bound),
            NodeStatus::Splitting { lower_bound, children } => {
                let step = p.pow(node.level);
                v.at_least(node.level)
                    && v.at_least(*lower_bound)
                    && children.len() as u64 == p.get()
                    && children.iter().enumerate().all(|(t, c)| {
                        c.level == node.level + 1 && c.residue == &node.residue + &step * t
                    })
            }
        };
        if !ok && bad.is_none() {
            bad = Some(format!("node {} mod {}^{}", node.residue, p, node.level));
        }
    }
    let count = tree.nodes().len();
    report.record(
        "node soundness",
        bad.is_none(),
        bad.unwrap_or_else(|| format!("{count} nodes re-evaluated")),
    );
}
