//! Command-line front end. Every subcommand parses its flags, calls into
//! `padic_tree`, and formats the result; no arithmetic happens here.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use padic_tree::classify::{classify, classify_with_precision, DEFAULT_ROOT_PRECISION};
use padic_tree::oracle::{cross_check, detect_period, valuation_sequence};
use padic_tree::render::{
    render_report, render_sequence, render_tree, report_json, Format, LabelStyle, RenderOptions,
};
use padic_tree::tree::{build_tree, DEFAULT_DEPTH_CAP};
use padic_tree::{Error, Prime, Quadratic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

const DEFAULT_COUNT: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "padic-tree", version, about = "p-adic valuation trees of integer quadratics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the tree of a n^2 + b n + c from its coefficients.
    Classify {
        #[command(flatten)]
        poly: PolyArgs,
        /// Precision of reported p-adic roots.
        #[arg(long, default_value_t = DEFAULT_ROOT_PRECISION)]
        precision: u32,
        #[arg(long)]
        json: bool,
    },
    /// Build and render the valuation tree.
    Tree {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = TreeFormat::Ascii)]
        format: TreeFormat,
        #[arg(long, value_enum, default_value_t = Labels::Residue)]
        labels: Labels,
        /// Print terminal valuations as `ν=v` instead of `[v]`.
        #[arg(long)]
        no_boxes: bool,
        /// Write to this file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate the valuation sequence by direct evaluation.
    Seq {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        /// Also detect the least power-of-p period within the table.
        #[arg(long)]
        period: bool,
    },
    /// Cross-check classification, tree, and brute force; exit 1 on any failure.
    Verify {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
        depth: u32,
        #[arg(long)]
        json: bool,
    },
    /// Verify one `p a b c [depth]` job per input line, writing JSON lines.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Odd prime (at most 64 bits)
    #[arg(short = 'p', allow_negative_numbers = true)]
    pub p: BigInt,
    /// Leading coefficient, nonzero
    #[arg(short = 'a', allow_negative_numbers = true)]
    pub a: BigInt,
    /// Linear coefficient
    #[arg(short = 'b', allow_negative_numbers = true)]
    pub b: BigInt,
    /// Constant term
    #[arg(short = 'c', allow_negative_numbers = true)]
    pub c: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Ascii,
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Labels {
    Residue,
    Congruence,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn invalid(mut message: String) -> Self {
        if !message.ends_with('\n') {
            message.push('\n');
        }
        Outcome {
            code: EXIT_INVALID_INPUT,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Validates the prime and leading coefficient, each with its own message.
pub fn job_quadratic(p: &BigInt, a: &BigInt, b: &BigInt, c: &BigInt) -> Result<Quadratic, String> {
    let prime = Prime::from_bigint(p).map_err(|e| format!("invalid prime: {e}"))?;
    Quadratic::new(a.clone(), b.clone(), c.clone(), prime).map_err(|e| match e {
        Error::InvalidQuadratic => format!("invalid quadratic: {e}"),
        other => other.to_string(),
    })
}

impl PolyArgs {
    fn quadratic(&self) -> Result<Quadratic, String> {
        job_quadratic(&self.p, &self.a, &self.b, &self.c)
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::invalid(text)
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

pub fn execute(command: Command) -> Outcome {
    let result = match command {
        Command::Classify { poly, precision, json } => classify_cmd(&poly, precision, json),
        Command::Tree {
            poly,
            depth,
            format,
            labels,
            no_boxes,
            output,
        } => {
            let opts = RenderOptions {
                format: match format {
                    TreeFormat::Ascii => Format::Ascii,
                    TreeFormat::Dot => Format::Dot,
                    TreeFormat::Json => Format::Json,
                },
                label_style: match labels {
                    Labels::Residue => LabelStyle::Residue,
                    Labels::Congruence => LabelStyle::Congruence,
                },
                show_boxed_valuations: !no_boxes,
            };
            tree_cmd(&poly, depth, &opts, output)
        }
        Command::Seq { poly, count, period } => seq_cmd(&poly, count, period),
        Command::Verify { poly, depth, json } => verify_cmd(&poly, depth, json),
        Command::Batch { input, output } => batch_cmd(&input, &output),
    };
    result.unwrap_or_else(Outcome::invalid)
}

fn classify_cmd(poly: &PolyArgs, precision: u32, as_json: bool) -> Result<Outcome, String> {
    let f = poly.quadratic()?;
    let cls = classify_with_precision(&f, precision).map_err(|e| e.to_string())?;
    Ok(Outcome::ok(if as_json {
        format!("{}\n", report_json(&cls, None))
    } else {
        render_report(&cls, None)
    }))
}

fn tree_cmd(poly: &PolyArgs, depth: u32, opts: &RenderOptions, output: Option<PathBuf>) -> Result<Outcome, String> {
    let f = poly.quadratic()?;
    let tree = build_tree(&f, depth).map_err(|e| e.to_string())?;
    let text = render_tree(&tree, opts);
    match output {
        Some(path) => {
            fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

/// Largest `e` with `2 p^e <= count`, if any.
fn period_exponent(p: u64, count: usize) -> Option<u32> {
    let mut e = None;
    let mut span = 1u128;
    let mut exp = 0;
    while 2 * span <= count as u128 {
        e = Some(exp);
        span *= p as u128;
        exp += 1;
    }
    e
}

fn seq_cmd(poly: &PolyArgs, count: usize, period: bool) -> Result<Outcome, String> {
    let f = poly.quadratic()?;
    let mut seq = valuation_sequence(&f, count);
    let mut note = String::new();
    if period {
        match period_exponent(f.prime().get(), count) {
            Some(e) => {
                seq.detected_period = detect_period(&seq, e).map_err(|e| e.to_string())?;
                if seq.detected_period.is_none() {
                    note = format!("period: none up to {}^{e}\n", f.prime());
                }
            }
            None => note = "period: need at least 2 terms\n".to_string(),
        }
        let cls = classify(&f).map_err(|e| e.to_string())?;
        note += &match cls.levels() {
            Some(ell) => format!("exact period: {}^{ell} (finite tree)\n", f.prime()),
            None => "exact period: none (infinite tree, valuations unbounded)\n".to_string(),
        };
    }
    Ok(Outcome::ok(render_sequence(&seq) + &note))
}

fn verify_cmd(poly: &PolyArgs, depth: u32, as_json: bool) -> Result<Outcome, String> {
    let f = poly.quadratic()?;
    let cls = classify_with_precision(&f, depth.max(1)).map_err(|e| e.to_string())?;
    let checks = cross_check(&f, depth);
    let stdout = if as_json {
        format!("{}\n", report_json(&cls, Some(&checks)))
    } else {
        render_report(&cls, Some(&checks))
    };
    let (code, stderr) = match checks.first_failure() {
        None => (EXIT_OK, String::new()),
        Some(failed) => (EXIT_CHECK_FAILED, format!("check failed: {}: {}\n", failed.name, failed.detail)),
    };
    Ok(Outcome { code, stdout, stderr })
}

/// One line of a batch file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BatchLine {
    Skip,
    Job { f: Quadratic, depth: u32 },
    Invalid(String),
}

pub fn parse_batch_line(line: &str) -> BatchLine {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return BatchLine::Skip;
    }
    let fields: Vec<&str> = content.split_whitespace().collect();
    if !(4..=5).contains(&fields.len()) {
        return BatchLine::Invalid(format!("expected `p a b c [depth]`, got {} fields", fields.len()));
    }
    let ints: Result<Vec<BigInt>, String> = fields[..4]
        .iter()
        .map(|s| s.parse::<BigInt>().map_err(|_| format!("not an integer: {s:?}")))
        .collect();
    let ints = match ints {
        Ok(v) => v,
        Err(e) => return BatchLine::Invalid(e),
    };
    let depth = match fields.get(4).map(|s| s.parse::<u32>()) {
        None => DEFAULT_DEPTH_CAP,
        Some(Ok(d)) if d >= 1 => d,
        Some(_) => return BatchLine::Invalid(format!("bad depth {:?}", fields[4])),
    };
    match job_quadratic(&ints[0], &ints[1], &ints[2], &ints[3]) {
        Ok(f) => BatchLine::Job { f, depth },
        Err(e) => BatchLine::Invalid(e),
    }
}

/// The JSON result document for line `index` (1-based) of a batch file.
pub fn batch_document(index: usize, line: &str) -> (Value, i32) {
    match parse_batch_line(line) {
        BatchLine::Skip => (json!({ "line": index, "skipped": true }), EXIT_OK),
        BatchLine::Invalid(error) => (
            json!({ "line": index, "input": line.trim(), "error": error }),
            EXIT_INVALID_INPUT,
        ),
        BatchLine::Job { f, depth } => {
            let checks = cross_check(&f, depth);
            let code = if checks.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
            let report = match classify_with_precision(&f, depth) {
                Ok(cls) => report_json(&cls, Some(&checks)),
                Err(e) => json!({ "error": e.to_string() }),
            };
            (json!({ "line": index, "input": line.trim(), "result": report }), code)
        }
    }
}

fn batch_cmd(input: &PathBuf, output: &PathBuf) -> Result<Outcome, String> {
    let text = fs::read_to_string(input).map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let results: Vec<(Value, i32)> = text
        .lines()
        .collect::<Vec<_>>()
        .par_iter()
        .enumerate()
        .map(|(i, line)| batch_document(i + 1, line))
        .collect();
    let mut body = String::new();
    for (doc, _) in &results {
        body.push_str(&doc.to_string());
        body.push('\n');
    }
    fs::write(output, body).map_err(|e| format!("cannot write {}: {e}", output.display()))?;
    let codes: Vec<i32> = results.iter().map(|(_, c)| *c).collect();
    let code = if codes.contains(&EXIT_INVALID_INPUT) {
        EXIT_INVALID_INPUT
    } else if codes.contains(&EXIT_CHECK_FAILED) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    };
    let failed = codes.iter().filter(|&&c| c != EXIT_OK).count();
    Ok(Outcome {
        code,
        stdout: format!("{} lines processed, {failed} with failures or errors\n", results.len()),
        stderr: String::new(),
    })
}
