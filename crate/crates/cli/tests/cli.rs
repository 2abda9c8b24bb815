use std::fs;
use std::process::Command;

use padic_tree::classify::classify;
use padic_tree::render::{render_report, render_tree, Format, RenderOptions};
use padic_tree::tree::build_tree;
use padic_tree::Quadratic;
use padic_tree_cli::{batch_document, run, EXIT_CHECK_FAILED, EXIT_INVALID_INPUT, EXIT_OK};

fn cli(args: &str) -> padic_tree_cli::Outcome {
    run(std::iter::once("padic-tree").chain(args.split_whitespace()))
}

#[test]
fn seq_prints_linear_case_table() {
    let out = cli("seq -p 3 -a 12 -b 16 -c 7 --count 20");
    assert_eq!(out.code, EXIT_OK);
    let vals: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("nu_3"))
        .flat_map(|l| l.split('|').nth(1).unwrap().split_whitespace())
        .collect();
    assert_eq!(vals.join(","), "0,0,1,0,0,2,0,0,1,0,0,1,0,0,2,0,0,1,0,0");
}

#[test]
fn classify_finite_example() {
    let out = cli("classify -p 3 -a 4 -b 160 -c -587");
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("Finite, levels 4, max valuation 7"), "{}", out.stdout);
}

#[test]
fn verify_two_branches_passes() {
    let out = cli("verify -p 5 -a 1 -b 0 -c 1 --depth 4");
    assert_eq!(out.code, EXIT_OK, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("all checks passed"));
}

#[test]
fn invalid_inputs_have_distinct_messages() {
    let bad_prime = cli("classify -p 9 -a 1 -b 0 -c 1");
    let bad_a = cli("classify -p 3 -a 0 -b 1 -c 1");
    let even = cli("tree -p 2 -a 1 -b 0 -c 1");
    assert_eq!((bad_prime.code, bad_a.code, even.code), (EXIT_INVALID_INPUT, EXIT_INVALID_INPUT, EXIT_INVALID_INPUT));
    assert!(bad_prime.stderr.starts_with("invalid prime"));
    assert!(even.stderr.starts_with("invalid prime"));
    assert!(bad_a.stderr.starts_with("invalid quadratic"));
    let huge = cli("classify -p 36893488147419103363 -a 1 -b 0 -c 1");
    assert_eq!(huge.code, EXIT_INVALID_INPUT);
    assert!(huge.stderr.contains("64-bit"), "{}", huge.stderr);
}

#[test]
fn bad_flags_print_usage() {
    let out = cli("tree -p 3 -a 1 -b 0");
    assert_eq!(out.code, EXIT_INVALID_INPUT);
    assert!(out.stderr.contains("Usage"), "{}", out.stderr);
    let out = cli("tree -p 3 -a 1 -b 0 -c 1 --format png");
    assert_eq!(out.code, EXIT_INVALID_INPUT);
}

#[test]
fn subcommands_are_thin_adapters() {
    let f = Quadratic::from_parts(3, 4, 160, -587).unwrap();
    let tree = build_tree(&f, 5).unwrap();
    for (flag, format) in [("ascii", Format::Ascii), ("dot", Format::Dot), ("json", Format::Json)] {
        let out = cli(&format!("tree -p 3 -a 4 -b 160 -c -587 --depth 5 --format {flag}"));
        assert_eq!(out.stdout, render_tree(&tree, &RenderOptions::with_format(format)));
    }
    let out = cli("classify -p 3 -a 4 -b 160 -c -587");
    assert_eq!(out.stdout, render_report(&classify(&f).unwrap(), None));
}

#[test]
fn tree_writes_to_file() {
    let dir = std::env::temp_dir().join(format!("padic-tree-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig1.dot");
    let out = cli(&format!("tree -p 3 -a 1 -b 0 -c 27 --format dot --output {}", path.display()));
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("digraph"));
}

#[test]
fn batch_lines_correspond_to_input_lines() {
    let dir = std::env::temp_dir().join(format!("padic-tree-batch-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let input = dir.join("jobs.txt");
    let output = dir.join("out.jsonl");
    let lines = [
        "# sample jobs",
        "3 12 16 7",
        "5 1 0 1 4",
        "",
        "3 4 160 -587",
        "13 -7 900 -31 3  # trailing comment",
        "7 1 1 1",
    ];
    fs::write(&input, lines.join("\n")).unwrap();
    let out = cli(&format!("batch --input {} --output {}", input.display(), output.display()));
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let written = fs::read_to_string(&output).unwrap();
    let docs: Vec<&str> = written.lines().collect();
    assert_eq!(docs.len(), lines.len());
    for (i, (line, doc)) in lines.iter().zip(&docs).enumerate() {
        assert_eq!(*doc, batch_document(i + 1, line).0.to_string());
    }
    // rerun is byte-identical
    cli(&format!("batch --input {} --output {}", input.display(), output.display()));
    assert_eq!(fs::read_to_string(&output).unwrap(), written);

    fs::write(&input, "3 1 0 27\n3 0 0 1\n").unwrap();
    let out = cli(&format!("batch --input {} --output {}", input.display(), output.display()));
    assert_eq!(out.code, EXIT_INVALID_INPUT);
    let missing = cli(&format!("batch --input {} --output {}", dir.join("nope").display(), output.display()));
    assert_eq!(missing.code, EXIT_INVALID_INPUT);
}

#[test]
fn check_failure_constant_is_one() {
    assert_eq!(EXIT_CHECK_FAILED, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_padic-tree");
    let status = Command::new(bin)
        .args(["verify", "-p", "3", "-a", "4", "-b", "160", "-c", "-587"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).contains("closed-form valuations"));
    let status = Command::new(bin)
        .args(["classify", "-p", "15", "-a", "1", "-b", "0", "-c", "1"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn seq_period_states_exact_period() {
    let finite = cli("seq -p 3 -a 4 -b 160 -c -587 --count 200 --period");
    assert!(finite.stdout.contains("period: 81 (verified over the first 200 terms)"));
    assert!(finite.stdout.ends_with("exact period: 3^4 (finite tree)\n"));
    let infinite = cli("seq -p 3 -a 12 -b 16 -c 7 --count 20 --period");
    assert!(infinite.stdout.contains("exact period: none"));
}
