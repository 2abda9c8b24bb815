//! Text, DOT, and JSON renderings of trees, sequences, and reports.
//!
//! JSON tree schema (one object per node, children left to right):
//!
//! ```text
//! { "prime": 3, "a": "1", "b": "0", "c": "27", "depth_cap": 8,
//!   "is_finite": true, "levels": 2,
//!   "root": { "level": 0, "residue": "0", "status": "splitting",
//!             "valuation": 2, "exact_root": false, "children": [ ... ] } }
//! ```
//!
//! `status` is one of `terminating`, `splitting`, `depth_capped`. For a
//! terminating node `valuation` is the constant valuation of its class;
//! otherwise it is the least valuation attained on the class. Integers that
//! may exceed 64 bits are written as decimal strings.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::check::CheckReport;
use crate::classify::{ClassKind, Classification};
use crate::error::{Error, Result};
use crate::oracle::ValuationSequence;
use crate::prime::Prime;
use crate::quadratic::Quadratic;
use crate::tree::{NodeStatus, TreeNode, ValuationTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Ascii,
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelStyle {
    /// `9q+5`
    #[default]
    Residue,
    /// `n≡5 mod 9`
    Congruence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    pub label_style: LabelStyle,
    pub show_boxed_valuations: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: Format::Ascii,
            label_style: LabelStyle::Residue,
            show_boxed_valuations: true,
        }
    }
}

impl RenderOptions {
    pub fn with_format(format: Format) -> Self {
        RenderOptions {
            format,
            ..Default::default()
        }
    }
}

/// Label of the class `n ≡ r (mod p^m)`.
pub fn node_label(node: &TreeNode, p: Prime, style: LabelStyle) -> String {
    let modulus = p.pow(node.level);
    let r = &node.residue;
    match style {
        LabelStyle::Residue => {
            let head = if node.level == 0 { "q".to_string() } else { format!("{modulus}q") };
            if r.is_zero() {
                head
            } else {
                format!("{head}+{r}")
            }
        }
        LabelStyle::Congruence if node.level == 0 => "all n".to_string(),
        LabelStyle::Congruence => format!("n≡{r} mod {modulus}"),
    }
}

fn status_label(node: &TreeNode, boxed: bool) -> String {
    let mut s = match &node.status {
        NodeStatus::Terminating { valuation } if boxed => format!("[{valuation}]"),
        NodeStatus::Terminating { valuation } => format!("ν={valuation}"),
        NodeStatus::Splitting { lower_bound, .. } => format!("ν≥{lower_bound}"),
        NodeStatus::DepthCapped { lower_bound } => format!("ν≥{lower_bound} …"),
    };
    if node.exact_root {
        s.push_str(" (exact root)");
    }
    s
}

pub fn render_tree(tree: &ValuationTree, opts: &RenderOptions) -> String {
    match opts.format {
        Format::Ascii => render_ascii(tree, opts),
        Format::Dot => render_dot(tree, opts),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&TreeDoc::from(tree)).expect("tree document serializes");
            s.push('\n');
            s
        }
    }
}

fn render_ascii(tree: &ValuationTree, opts: &RenderOptions) -> String {
    fn walk(out: &mut String, node: &TreeNode, prefix: &str, last: bool, p: Prime, opts: &RenderOptions) {
        let (branch, extend) = if node.level == 0 {
            ("", "")
        } else if last {
            ("└── ", "    ")
        } else {
            ("├── ", "│   ")
        };
        let _ = writeln!(
            out,
            "{prefix}{branch}{}: {}",
            node_label(node, p, opts.label_style),
            status_label(node, opts.show_boxed_valuations)
        );
        let child_prefix = format!("{prefix}{extend}");
        let children = node.children();
        for (i, child) in children.iter().enumerate() {
            walk(out, child, &child_prefix, i + 1 == children.len(), p, opts);
        }
    }
    let mut out = String::new();
    walk(&mut out, &tree.root, "", true, tree.prime(), opts);
    out
}

fn render_dot(tree: &ValuationTree, opts: &RenderOptions) -> String {
    let p = tree.prime();
    let mut out = String::new();
    let _ = writeln!(out, "digraph valuation_tree {{");
    let _ = writeln!(
        out,
        "  label=\"{p}-adic valuation tree of f(n) = {}\";",
        tree.quadratic
    );
    let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
    let mut next_id = 0usize;
    fn walk(out: &mut String, node: &TreeNode, id: usize, next_id: &mut usize, p: Prime, opts: &RenderOptions) {
        let shape = if node.is_terminating() { "box" } else { "ellipse" };
        let label = match &node.status {
            NodeStatus::Terminating { valuation } if opts.show_boxed_valuations => valuation.to_string(),
            _ => status_label(node, false),
        };
        let _ = writeln!(out, "  n{id} [label=\"{label}\", shape={shape}];");
        for child in node.children() {
            *next_id += 1;
            let child_id = *next_id;
            walk(out, child, child_id, next_id, p, opts);
            let _ = writeln!(
                out,
                "  n{id} -> n{child_id} [label=\"{}\"];",
                node_label(child, p, opts.label_style)
            );
        }
    }
    walk(&mut out, &tree.root, 0, &mut next_id, p, opts);
    let _ = writeln!(out, "}}");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub level: u32,
    pub residue: String,
    pub status: String,
    pub valuation: u32,
    #[serde(default)]
    pub exact_root: bool,
    #[serde(default)]
    pub children: Vec<NodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub prime: u64,
    pub a: String,
    pub b: String,
    pub c: String,
    pub depth_cap: u32,
    pub is_finite: bool,
    pub levels: Option<u32>,
    pub root: NodeDoc,
}

impl From<&TreeNode> for NodeDoc {
    fn from(node: &TreeNode) -> Self {
        let (status, valuation) = match &node.status {
            NodeStatus::Terminating { valuation } => ("terminating", *valuation),
            NodeStatus::Splitting { lower_bound, .. } => ("splitting", *lower_bound),
            NodeStatus::DepthCapped { lower_bound } => ("depth_capped", *lower_bound),
        };
        NodeDoc {
            level: node.level,
            residue: node.residue.to_string(),
            status: status.to_string(),
            valuation,
            exact_root: node.exact_root,
            children: node.children().iter().map(NodeDoc::from).collect(),
        }
    }
}

impl From<&ValuationTree> for TreeDoc {
    fn from(tree: &ValuationTree) -> Self {
        let f = &tree.quadratic;
        TreeDoc {
            prime: f.prime().get(),
            a: f.a().to_string(),
            b: f.b().to_string(),
            c: f.c().to_string(),
            depth_cap: tree.depth_cap,
            is_finite: tree.is_finite(),
            levels: tree.levels,
            root: NodeDoc::from(&tree.root),
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| Error::MalformedDocument(format!("bad integer {s:?}")))
}

impl TryFrom<&NodeDoc> for TreeNode {
    type Error = Error;

    fn try_from(doc: &NodeDoc) -> Result<Self> {
        let status = match doc.status.as_str() {
            "terminating" => NodeStatus::Terminating { valuation: doc.valuation },
            "splitting" => NodeStatus::Splitting {
                lower_bound: doc.valuation,
                children: doc.children.iter().map(TreeNode::try_from).collect::<Result<_>>()?,
            },
            "depth_capped" => NodeStatus::DepthCapped { lower_bound: doc.valuation },
            other => return Err(Error::MalformedDocument(format!("unknown status {other:?}"))),
        };
        Ok(TreeNode {
            level: doc.level,
            residue: parse_int(&doc.residue)?,
            exact_root: doc.exact_root,
            status,
        })
    }
}

impl TryFrom<&TreeDoc> for ValuationTree {
    type Error = Error;

    fn try_from(doc: &TreeDoc) -> Result<Self> {
        let quadratic = Quadratic::new(parse_int(&doc.a)?, parse_int(&doc.b)?, parse_int(&doc.c)?, Prime::new(doc.prime)?)?;
        Ok(ValuationTree {
            root: TreeNode::try_from(&doc.root)?,
            quadratic,
            depth_cap: doc.depth_cap,
            levels: doc.levels,
        })
    }
}

/// Reads a tree back from its JSON document.
pub fn parse_tree_json(text: &str) -> Result<ValuationTree> {
    let doc: TreeDoc = serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    ValuationTree::try_from(&doc)
}

/// One-line description of the classification.
pub fn summary_line(cls: &Classification) -> String {
    let name = cls.name();
    match &cls.kind {
        ClassKind::DotTree => format!("{name}, single node, valuation {}", cls.shift),
        ClassKind::OneInfiniteBranchLinearCase { .. } | ClassKind::OneInfiniteBranchDoubleRoot { .. } => {
            format!("{name}, one infinite branch")
        }
        ClassKind::TwoInfiniteBranches { .. } => format!("{name}, two infinite branches"),
        ClassKind::Finite {
            levels, max_valuation, ..
        } => format!("{name}, levels {levels}, max valuation {max_valuation}"),
    }
}

fn branch_residues(cls: &Classification) -> Vec<String> {
    cls.roots()
        .iter()
        .map(|root| {
            let mut items: Vec<String> = (1..=root.precision())
                .map(|m| root.truncate(m).residue().to_string())
                .collect();
            items.push("...".into());
            items.join(",")
        })
        .collect()
}

/// Ordered `(key, value)` fields of a classification report.
fn report_fields(cls: &Classification) -> Vec<(String, String)> {
    let d = &cls.discriminant;
    let mut fields = vec![
        ("variant".to_string(), cls.name().to_string()),
        ("polynomial".into(), cls.source.to_string()),
        ("prime".into(), cls.source.prime().to_string()),
        ("shift_k".into(), cls.shift.to_string()),
        ("reduced".into(), cls.reduced.to_string()),
        ("discriminant".into(), d.value.to_string()),
        ("nu_p(D)".into(), d.valuation.to_string()),
    ];
    if let Some(delta) = &d.delta {
        fields.push(("Delta".into(), delta.to_string()));
        fields.push(("legendre(Delta)".into(), d.delta_legendre.to_string()));
    }
    match &cls.kind {
        ClassKind::DotTree => fields.push(("valuation".into(), cls.shift.to_string())),
        ClassKind::Finite {
            levels,
            s_ell,
            max_valuation,
            translated,
        } => {
            fields.push(("levels".into(), levels.to_string()));
            fields.push(("max_valuation".into(), max_valuation.to_string()));
            fields.push(("S_ell".into(), s_ell.to_string()));
            fields.push(("translated".into(), translated.to_string()));
        }
        _ => {
            fields.push(("infinite_branches".into(), cls.infinite_branch_count().to_string()));
            for (i, residues) in branch_residues(cls).into_iter().enumerate() {
                fields.push((format!("branch_{}", i + 1), residues));
            }
        }
    }
    fields
}

/// Human-readable classification report, optionally followed by check results.
pub fn render_report(cls: &Classification, checks: Option<&CheckReport>) -> String {
    let mut out = summary_line(cls);
    out.push('\n');
    for (key, value) in report_fields(cls) {
        let _ = writeln!(out, "{key}: {value}");
    }
    if let Some(checks) = checks {
        let verdict = if checks.all_passed() { "all checks passed" } else { "CHECK FAILURE" };
        let _ = writeln!(out, "checks: {verdict}");
        out.push_str(&checks.to_string());
    }
    out
}

/// The same report as a JSON object with the same field order.
pub fn report_json(cls: &Classification, checks: Option<&CheckReport>) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("summary".into(), Value::String(summary_line(cls)));
    for (key, value) in report_fields(cls) {
        map.insert(key, Value::String(value));
    }
    if let Some(checks) = checks {
        map.insert("all_passed".into(), Value::Bool(checks.all_passed()));
        map.insert("checks".into(), json!(checks.checks));
    }
    Value::Object(map)
}

/// Table of `n`, `f(n)`, and `ν_p(f(n))`, ten columns per block.
pub fn render_sequence(seq: &ValuationSequence) -> String {
    let f = &seq.quadratic;
    let p = f.prime();
    let mut out = String::new();
    let rows: Vec<[String; 3]> = seq
        .terms
        .iter()
        .enumerate()
        .map(|(n, v)| [n.to_string(), f.eval(&BigInt::from(n)).to_string(), v.to_string()])
        .collect();
    let heads = ["n".to_string(), "f(n)".to_string(), format!("nu_{p}(f(n))")];
    let head_width = heads.iter().map(|h| h.chars().count()).max().unwrap_or(0);
    for (block_index, block) in rows.chunks(10).enumerate() {
        if block_index > 0 {
            out.push('\n');
        }
        let widths: Vec<usize> = block
            .iter()
            .map(|col| col.iter().map(String::len).max().unwrap_or(0))
            .collect();
        for (row, head) in heads.iter().enumerate() {
            let _ = write!(out, "{head:<head_width$} |");
            for (col, width) in block.iter().zip(&widths) {
                let _ = write!(out, " {:>width$}", col[row]);
            }
            out.push('\n');
        }
    }
    if let Some(period) = seq.detected_period {
        let _ = writeln!(out, "period: {period} (verified over the first {} terms)", seq.terms.len());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::tree::build_tree;

    fn q(p: u64, a: i64, b: i64, c: i64) -> Quadratic {
        Quadratic::from_parts(p, a, b, c).unwrap()
    }

    #[test]
    fn n2_plus_27_ascii() {
        let tree = build_tree(&q(3, 1, 0, 27), 8).unwrap();
        let text = render_tree(&tree, &RenderOptions::default());
        let expected = "\
q: ν≥0
├── 3q: ν≥2
│   ├── 9q: [3]
│   ├── 9q+3: [2]
│   └── 9q+6: [2]
├── 3q+1: [0]
└── 3q+2: [0]
";
        assert_eq!(text, expected);
    }

    #[test]
    fn dot_tree_ascii_is_one_line() {
        let tree = build_tree(&q(3, 3, 3, 1), 8).unwrap();
        assert_eq!(render_tree(&tree, &RenderOptions::default()), "q: [0]\n");
    }

    #[test]
    fn congruence_labels() {
        let tree = build_tree(&q(3, 12, 16, 7), 2).unwrap();
        let opts = RenderOptions {
            label_style: LabelStyle::Congruence,
            show_boxed_valuations: false,
            ..Default::default()
        };
        let text = render_tree(&tree, &opts);
        assert!(text.contains("n≡5 mod 9: ν≥2 …"), "{text}");
        assert!(text.contains("n≡0 mod 3: ν=0"), "{text}");
        assert!(text.starts_with("all n: "));
    }

    #[test]
    fn finite_example_dot() {
        let tree = build_tree(&q(3, 4, 160, -587), 8).unwrap();
        let dot = render_tree(&tree, &RenderOptions::with_format(Format::Dot));
        let boxes: Vec<&str> = dot.lines().filter(|l| l.contains("shape=box")).collect();
        let ellipses = dot.lines().filter(|l| l.contains("shape=ellipse")).count();
        assert_eq!((boxes.len(), ellipses), (9, 4));
        let mut vals: Vec<u32> = boxes
            .iter()
            .map(|l| l.split('"').nth(1).unwrap().parse().unwrap())
            .collect();
        vals.sort();
        assert_eq!(vals, vec![0, 0, 2, 2, 4, 4, 6, 6, 7]);
        assert!(dot.contains("[label=\"81q+7\"]"));
        assert_eq!(dot.matches("->").count(), 12);
    }

    #[test]
    fn json_round_trip_n2_plus_1() {
        let tree = build_tree(&q(5, 1, 0, 1), 4).unwrap();
        let text = render_tree(&tree, &RenderOptions::with_format(Format::Json));
        assert_eq!(parse_tree_json(&text).unwrap(), tree);
        assert!(matches!(parse_tree_json("{}"), Err(Error::MalformedDocument(_))));
    }

    #[test]
    fn finite_report_fields() {
        let report = render_report(&classify(&q(3, 4, 160, -587)).unwrap(), None);
        assert!(report.starts_with("Finite, levels 4, max valuation 7\n"));
        for needle in ["levels: 4", "max_valuation: 7", "S_ell: 20", "translated: 4n^2 - 2187", "Delta: 16"] {
            assert!(report.contains(needle), "missing {needle} in\n{report}");
        }
    }

    #[test]
    fn two_branch_report_lists_residues() {
        let report = render_report(&classify(&q(5, 1, 0, 1)).unwrap(), None);
        assert!(report.contains("branch_1: 2,7,57,"), "{report}");
        assert!(report.contains("branch_2: 3,18,68,"), "{report}");
    }

    #[test]
    fn dot_report() {
        let report = render_report(&classify(&q(3, 3, 3, 1)).unwrap(), None);
        assert!(report.contains("single node, valuation 0"));
    }

    #[test]
    fn json_report_keeps_field_order() {
        let value = report_json(&classify(&q(3, 4, 160, -587)).unwrap(), None);
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        assert_eq!(keys[0], "summary");
        assert_eq!(value["S_ell"], "20");
    }
}
