//! Scenario files: a line-oriented description of models, named classes,
//! checks and a verdict, plus the evaluator and report behind the CLI.

pub mod eval;
pub mod load;
pub mod report;
pub mod syntax;

use thiserror::Error;

pub use eval::{eval_str, Value};
pub use load::{load_file, load_str, Scenario};
pub use report::{verify, Options, Report};
pub use syntax::{parse_expr, parse_scenario, Pos};

/// A positioned diagnostic from parsing, loading or evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ScenarioError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ScenarioError {
    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        ScenarioError { line: pos.line, col: pos.col, message: message.into() }
    }
}

impl From<syntax::ParseError> for ScenarioError {
    fn from(e: syntax::ParseError) -> Self {
        ScenarioError { line: e.line, col: e.col, message: e.message }
    }
}
