//! The Space Traders family of MOMDPs, plus loading environments from JSON.
//!
//! All four variants share the two-leg structure: fly from planet A to
//! planet B, then back. Each state offers Indirect, Direct and Teleport
//! actions in that order, so action index 0 is always Indirect. Objective 1
//! records mission success, objective 2 is a (negative) time penalty.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::momdp::{
    validate_spec, DynamicsEntry, EnvironmentSpec, OutcomeEntry, SpecDocument, FAILURE_SENTINEL,
    SUCCESS_SENTINEL,
};

/// Names of the built-in variants, in catalog order.
pub const VARIANTS: [&str; 4] = ["original", "mr", "3st", "id"];

const OBJECTIVES: [&str; 2] = ["mission_success", "time_penalty"];

/// Builds a named variant.
pub fn build(name: &str) -> Result<EnvironmentSpec> {
    match name {
        "original" => Ok(build_original()),
        "mr" => Ok(build_mr()),
        "3st" => Ok(build_3st()),
        "id" => Ok(build_id()),
        other => Err(Error::UnknownEnvironment(other.to_string())),
    }
}

/// TLO threshold on mission success used with each variant.
///
/// The variants whose failure transitions carry -1 on the success objective
/// (`mr` and `3st`) use `0.88 * 1 + 0.12 * -1 = 0.76`.
pub fn default_threshold(name: &str) -> f64 {
    match name {
        "mr" | "3st" => 0.76,
        _ => 0.88,
    }
}

/// `(probability, next, reward)` triples of one state-action pair.
type Row<'a> = (&'a str, &'a str, &'a [(f64, &'a str, [f64; 2])]);

fn assemble(name: &str, states: &[&str], rows: &[(&str, Row<'_>)]) -> EnvironmentSpec {
    let horizon = 2;
    let dynamics = rows
        .iter()
        .map(|(state, (action, initial, outcomes))| DynamicsEntry {
            state: state.to_string(),
            action: action.to_string(),
            initial: initial.to_string(),
            outcomes: outcomes
                .iter()
                .map(|(p, next, reward)| OutcomeEntry {
                    p: *p,
                    next: next.to_string(),
                    reward: (*reward).into(),
                })
                .collect(),
        })
        .collect();
    let doc = SpecDocument {
        name: name.to_string(),
        states: states.iter().map(|s| s.to_string()).collect(),
        start_state: "A".to_string(),
        horizon,
        objectives: OBJECTIVES.iter().map(|s| s.to_string()).collect(),
        dynamics,
    };
    validate_spec(&doc).expect("built-in environments are valid")
}

const OK: &str = SUCCESS_SENTINEL;
const FAIL: &str = FAILURE_SENTINEL;

pub fn build_original() -> EnvironmentSpec {
    assemble(
        "original",
        &["A", "B"],
        &[
            ("A", ("Indirect", "I", &[(1.0, "B", [0.0, -12.0])])),
            (
                "A",
                (
                    "Direct",
                    "D",
                    &[(0.9, "B", [0.0, -6.0]), (0.1, FAIL, [0.0, -1.0])],
                ),
            ),
            (
                "A",
                (
                    "Teleport",
                    "T",
                    &[(0.85, "B", [0.0, 0.0]), (0.15, FAIL, [0.0, 0.0])],
                ),
            ),
            ("B", ("Indirect", "I", &[(1.0, OK, [1.0, -10.0])])),
            (
                "B",
                (
                    "Direct",
                    "D",
                    &[(0.9, OK, [1.0, -8.0]), (0.1, FAIL, [0.0, -7.0])],
                ),
            ),
            (
                "B",
                (
                    "Teleport",
                    "T",
                    &[(0.85, OK, [1.0, 0.0]), (0.15, FAIL, [0.0, 0.0])],
                ),
            ),
        ],
    )
}

/// Original dynamics; every transition into a failure terminal pays -1 on
/// the success objective.
pub fn build_mr() -> EnvironmentSpec {
    assemble(
        "mr",
        &["A", "B"],
        &[
            ("A", ("Indirect", "I", &[(1.0, "B", [0.0, -12.0])])),
            (
                "A",
                (
                    "Direct",
                    "D",
                    &[(0.9, "B", [0.0, -6.0]), (0.1, FAIL, [-1.0, -1.0])],
                ),
            ),
            (
                "A",
                (
                    "Teleport",
                    "T",
                    &[(0.85, "B", [0.0, 0.0]), (0.15, FAIL, [-1.0, 0.0])],
                ),
            ),
            ("B", ("Indirect", "I", &[(1.0, OK, [1.0, -10.0])])),
            (
                "B",
                (
                    "Direct",
                    "D",
                    &[(0.9, OK, [1.0, -8.0]), (0.1, FAIL, [-1.0, -7.0])],
                ),
            ),
            (
                "B",
                (
                    "Teleport",
                    "T",
                    &[(0.85, OK, [1.0, 0.0]), (0.15, FAIL, [-1.0, 0.0])],
                ),
            ),
        ],
    )
}

/// The reward-engineered variant with an extra state C on the failure
/// branch of Direct at A.
///
/// A failed Direct jump now lands in C (time cost -1) and only the step out
/// of C into the failure terminal pays the -1 success penalty. The expected
/// immediate success reward of Direct at A is therefore zero, exactly as in
/// the original environment, while the totals along every path equal those
/// of `mr`. All three actions in C lead to failure. States are ordered
/// A, B, C so the first two letters of a policy identifier keep their usual
/// meaning.
pub fn build_3st() -> EnvironmentSpec {
    assemble(
        "3st",
        &["A", "B", "C"],
        &[
            ("A", ("Indirect", "I", &[(1.0, "B", [0.0, -12.0])])),
            (
                "A",
                (
                    "Direct",
                    "D",
                    &[(0.9, "B", [0.0, -6.0]), (0.1, "C", [0.0, -1.0])],
                ),
            ),
            (
                "A",
                (
                    "Teleport",
                    "T",
                    &[(0.85, "B", [0.0, 0.0]), (0.15, FAIL, [-1.0, 0.0])],
                ),
            ),
            ("B", ("Indirect", "I", &[(1.0, OK, [1.0, -10.0])])),
            (
                "B",
                (
                    "Direct",
                    "D",
                    &[(0.9, OK, [1.0, -8.0]), (0.1, FAIL, [-1.0, -7.0])],
                ),
            ),
            (
                "B",
                (
                    "Teleport",
                    "T",
                    &[(0.85, OK, [1.0, 0.0]), (0.15, FAIL, [-1.0, 0.0])],
                ),
            ),
            ("C", ("Indirect", "I", &[(1.0, FAIL, [-1.0, 0.0])])),
            ("C", ("Direct", "D", &[(1.0, FAIL, [-1.0, 0.0])])),
            ("C", ("Teleport", "T", &[(1.0, FAIL, [-1.0, 0.0])])),
        ],
    )
}

/// Original dynamics with the time penalties of A and B swapped, which makes
/// ID the SER-optimal policy at threshold 0.88.
pub fn build_id() -> EnvironmentSpec {
    assemble(
        "id",
        &["A", "B"],
        &[
            ("A", ("Indirect", "I", &[(1.0, "B", [0.0, -10.0])])),
            (
                "A",
                (
                    "Direct",
                    "D",
                    &[(0.9, "B", [0.0, -8.0]), (0.1, FAIL, [0.0, -7.0])],
                ),
            ),
            (
                "A",
                (
                    "Teleport",
                    "T",
                    &[(0.85, "B", [0.0, 0.0]), (0.15, FAIL, [0.0, 0.0])],
                ),
            ),
            ("B", ("Indirect", "I", &[(1.0, OK, [1.0, -12.0])])),
            (
                "B",
                (
                    "Direct",
                    "D",
                    &[(0.9, OK, [1.0, -6.0]), (0.1, FAIL, [0.0, -1.0])],
                ),
            ),
            (
                "B",
                (
                    "Teleport",
                    "T",
                    &[(0.85, OK, [1.0, 0.0]), (0.15, FAIL, [0.0, 0.0])],
                ),
            ),
        ],
    )
}

/// Parses and validates an environment from JSON text.
pub fn parse_spec(json: &str) -> Result<EnvironmentSpec> {
    let doc: SpecDocument = serde_json::from_str(json).map_err(|e| Error::parse(&e))?;
    Ok(validate_spec(&doc)?)
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<EnvironmentSpec> {
    parse_spec(&fs::read_to_string(path)?)
}

/// Directory holding the shipped JSON copies of the built-in variants.
pub fn shipped_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("environments")
}

/// Accepts either a built-in variant name or a path to a JSON spec.
pub fn resolve(name_or_path: &str) -> Result<EnvironmentSpec> {
    if VARIANTS.contains(&name_or_path) {
        build(name_or_path)
    } else if Path::new(name_or_path).exists() {
        load_spec(name_or_path)
    } else {
        Err(Error::UnknownEnvironment(name_or_path.to_string()))
    }
}
