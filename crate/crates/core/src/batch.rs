//! Counting many patterns over one grammar.
//!
//! Each pattern gets its own engine; the grammar is shared read-only.

use crate::automaton::Fsa;
use crate::engine::Search;
use crate::par;
use crate::slp::{Slp, SlpError};

/// Matching-line counts for every automaton, in input order. Patterns run
/// concurrently when the `parallel` feature is on.
pub fn count_many(slp: &Slp, fsas: &[Fsa]) -> Result<Vec<u64>, SlpError> {
    slp.check()?;
    Ok(par::map(fsas, |fsa| count_checked(slp, fsa)))
}

/// As [`count_many`], one pattern after another on the calling thread.
pub fn count_many_sequential(slp: &Slp, fsas: &[Fsa]) -> Result<Vec<u64>, SlpError> {
    slp.check()?;
    Ok(fsas.iter().map(|fsa| count_checked(slp, fsa)).collect())
}

fn count_checked(slp: &Slp, fsa: &Fsa) -> u64 {
    let mut search = Search::new(fsa);
    for rule in &slp.rules {
        search.process_rule(rule);
    }
    search.count(&slp.axiom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::compile;
    use crate::slp::example_grammar;

    #[test]
    fn batch_matches_single_counts() {
        let slp = example_grammar();
        let fsas: Vec<Fsa> = ["ab|ba", "a", "zz", "b*", "aba"]
            .iter()
            .map(|p| compile(p).unwrap())
            .collect();
        let expected = vec![3, 3, 0, 3, 1];
        assert_eq!(count_many(&slp, &fsas).unwrap(), expected);
        assert_eq!(count_many_sequential(&slp, &fsas).unwrap(), expected);
    }
}
