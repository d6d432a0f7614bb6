//! Command-line front end: document parsing, task dispatch and JSON
//! reports.

pub mod document;
pub mod expr;
pub mod lexer;
pub mod tasks;

use std::io::Read;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

pub use document::{parse_input, InputDocument};
pub use tasks::{run_document, Options, Outcome, TaskResult};

use crate::error::InputError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    CheckSubspace,
    Kform,
    CheckIdeal,
    CheckMorphism,
    DeformCheck,
    FixedRing,
    Apply,
    Describe,
    /// Every task of the document, in order.
    Run,
}

impl Command {
    pub fn task_kind(self) -> Option<&'static str> {
        Some(match self {
            Command::Validate => "validate",
            Command::CheckSubspace => "check-subspace",
            Command::Kform => "kform",
            Command::CheckIdeal => "check-ideal",
            Command::CheckMorphism => "check-morphism",
            Command::DeformCheck => "deform-check",
            Command::FixedRing => "fixed-ring",
            Command::Apply => "apply",
            Command::Describe => "describe",
            Command::Run => return None,
        })
    }
}

/// Decide whether objects over a modular field extension descend to the
/// base field.
#[derive(Debug, Parser)]
#[command(name = "descent-kit", version)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Input document; standard input when absent.
    #[arg(long)]
    pub input: Option<std::path::PathBuf>,
    /// Also run the independent oracle and fail with exit code 3 on
    /// disagreement.
    #[arg(long)]
    pub oracle: bool,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Accept separable minimal polynomials whose irreducibility cannot be
    /// verified.
    #[arg(long)]
    pub trust_irreducible: bool,
    /// One compact JSON object per line (default).
    #[arg(long, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON.
    #[arg(long)]
    pub pretty: bool,
}

fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("values serialize")
    } else {
        serde_json::to_string(v).expect("values serialize")
    }
}

fn input_error_json(e: &InputError) -> Value {
    match e {
        InputError::Syntax { line, col, .. }
        | InputError::Resolution { line, col, .. }
        | InputError::Invalid { line, col, .. } => json!({
            "error": e.to_string(),
            "line": line.to_string(),
            "col": col.to_string(),
        }),
    }
}

/// Runs one command on a document's text; returns the output and the
/// exit code.
pub fn execute(command: Command, text: &str, opts: &Options, pretty: bool) -> (String, i32) {
    let doc = match parse_input(text) {
        Ok(d) => d,
        Err(e) => return (render(&input_error_json(&e), pretty) + "\n", Outcome::InputError as i32),
    };
    let results = run_document(&doc, command.task_kind(), opts);
    let mut out = String::new();
    let mut worst = Outcome::Positive;
    for r in &results {
        out.push_str(&render(&r.json, pretty));
        out.push('\n');
        worst = worst.max(r.outcome);
    }
    (out, worst as i32)
}

/// Entry point used by the binary.
pub fn main_with(args: Args) -> i32 {
    let text = match &args.input {
        Some(path) => std::fs::read_to_string(path),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            println!("{}", json!({"error": format!("cannot read input: {}", e)}));
            return Outcome::InputError as i32;
        }
    };
    let opts = Options {
        oracle: args.oracle,
        seed: args.seed,
        trust_irreducible: args.trust_irreducible,
    };
    let (out, code) = execute(args.command, &text, &opts, args.pretty);
    print!("{}", out);
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: &str = "tower { p 2 base t insep a1 { n 1 value \"t\" } }\n";

    fn run(cmd: Command, body: &str) -> (String, i32) {
        execute(cmd, &format!("{}{}", T1, body), &Options::default(), false)
    }

    #[test]
    fn subspace_report() {
        let (out, code) = run(Command::CheckSubspace, "task check-subspace { dim 2 vector (\"a1\", \"1\") }");
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["verdict"], "not_defined_over_K");
        assert_eq!(v["witness"]["image"], "(1, 0)");
        assert!(v.get("k_form").is_none());
    }

    #[test]
    fn apply_generator() {
        let (out, code) = run(Command::Apply, "task apply { gen phi1 element \"a1\" }");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["result"], "a1 + X");
        let (out, _) = run(Command::Apply, "task apply { gen \"D1^(1)\" vector (\"a1\", \"t*a1\") }");
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["result"], "(1, t)");
    }

    #[test]
    fn describe_two_generator_tower() {
        let doc = "tower { p 2 base s t insep a1 { n 1 value \"s\" } insep a2 { n 2 value \"t\" } }";
        let (out, code) = execute(Command::Describe, doc, &Options::default(), false);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["degree"], "8");
        assert_eq!(v["exponent"], "2");
        assert_eq!(v["truncation"], "4");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(execute(Command::Describe, "tower { p 4 }", &Options::default(), false).1, 2);
        assert_eq!(execute(Command::Describe, "tower {", &Options::default(), false).1, 2);
        let (_, code) = run(Command::Validate, "");
        assert_eq!(code, 0);
        let (_, code) = run(Command::Kform, "task kform { dim 1 matrix phi1 { row (\"X\") } }");
        assert_eq!(code, 2);
        let (_, code) = run(Command::CheckSubspace, "task check-subspace { dim 1 vector (\"zz\") }");
        assert_eq!(code, 2);
    }

    #[test]
    fn oracle_mode_agrees() {
        let (out, code) = execute(
            Command::CheckSubspace,
            &format!("{}task check-subspace {{ dim 2 vector (\"a1\", \"a1\") }}", T1),
            &Options {
                oracle: true,
                ..Options::default()
            },
            false,
        );
        assert_eq!(code, 0);
        assert!(out.contains("oracle agrees"));
    }
}
