//! Regular expressions compiled to ε-free automata over bytes other than
//! the newline delimiter.

pub mod parse;
pub mod thompson;

mod fsa;
mod search;

pub use fsa::{compile, compile_bytes, Fsa, NewlineInInput, PatternError, StateId};
pub use parse::{Ast, ByteSet, SyntaxError};
pub use search::SearchAutomaton;
pub use thompson::ThompsonNfa;

/// Whole-string membership of `u` in the language of `fsa`.
pub fn nfa_accepts(fsa: &Fsa, u: &[u8]) -> Result<bool, NewlineInInput> {
    fsa.accepts(u)
}

/// The raw Thompson automaton for `pattern`, before ε-removal.
pub fn thompson(pattern: &str) -> Result<ThompsonNfa, PatternError> {
    let parsed = parse::parse(pattern.as_bytes()).map_err(PatternError::Syntax)?;
    Ok(ThompsonNfa::build(&parsed.ast))
}
