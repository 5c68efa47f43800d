//! Emitting the matching lines by lazy top-down decompression.
//!
//! After the counting pass every symbol carries its counting information and
//! edge list. The grammar is then walked from the axiom down, and a subtree
//! `Y` whose expansion contains a newline is skipped without expanding it
//! when it provably contributes no output:
//!
//! * none of its lines match on their own (`count = 0`, `left = right = false`),
//! * the line in progress has not matched yet, and
//! * no state reachable on the line in progress reaches a final state while
//!   reading a prefix of `Y`.
//!
//! The line in progress is then dropped, and only the last line of `Y`
//! (after its final newline) is materialised, since a later match may still
//! extend it. This is one sound pruning rule; it does not skip every subtree
//! that could be skipped.

use std::io::{self, Write};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::automaton::{Fsa, SearchAutomaton};
use crate::engine::{Engine, EngineOptions, SymbolEntry};
use crate::slp::{Slp, SlpError, SymbolId};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Slp(#[from] SlpError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Writes every matching line of `slp`'s text to `sink`, each followed by a
/// newline, and returns how many were written.
pub fn report_matching_lines<W: Write>(slp: &Slp, fsa: &Fsa, sink: W) -> Result<u64, ReportError> {
    report_matching_lines_with(slp, fsa, sink, true)
}

/// As [`report_matching_lines`], with subtree pruning switchable.
pub fn report_matching_lines_with<W: Write>(
    slp: &Slp,
    fsa: &Fsa,
    mut sink: W,
    prune: bool,
) -> Result<u64, ReportError> {
    slp.check()?;
    if fsa.matches_empty() {
        return emit_all_lines(slp, &mut sink);
    }
    let mut engine = Engine::new(fsa, EngineOptions::default());
    for rule in &slp.rules {
        engine.process_rule(rule);
    }
    let mut walker = Walker::new(slp, &engine);
    let mut stack: Vec<SymbolId> = slp.axiom.iter().rev().copied().collect();
    while let Some(sym) = stack.pop() {
        match sym.as_byte() {
            Some(b) => walker.feed(b, &mut sink)?,
            None if prune && walker.can_skip(sym) => walker.skip(sym),
            None => {
                let rule = &slp.rules[sym.rule_index().unwrap()];
                stack.push(rule.second);
                stack.push(rule.first);
            }
        }
    }
    walker.finish(&mut sink)?;
    sink.flush()?;
    Ok(walker.emitted)
}

/// Per-line state of the walk.
struct Walker<'a> {
    slp: &'a Slp,
    entries: &'a [SymbolEntry],
    automaton: &'a SearchAutomaton,
    line: Vec<u8>,
    reach: FixedBitSet,
    next: FixedBitSet,
    matched: bool,
    emitted: u64,
}

impl<'a> Walker<'a> {
    fn new(slp: &'a Slp, engine: &'a Engine) -> Self {
        let s = engine.automaton().state_count();
        Walker {
            slp,
            entries: engine.entries(),
            automaton: engine.automaton(),
            line: Vec::new(),
            reach: FixedBitSet::with_capacity(s),
            next: FixedBitSet::with_capacity(s),
            matched: false,
            emitted: 0,
        }
    }

    fn feed<W: Write>(&mut self, b: u8, sink: &mut W) -> io::Result<()> {
        if b == b'\n' {
            if self.matched {
                self.line.push(b'\n');
                sink.write_all(&self.line)?;
                self.emitted += 1;
            }
            self.line.clear();
            self.reach.clear();
            self.matched = false;
        } else {
            self.line.push(b);
            self.matched |= self
                .automaton
                .advance_suffixes(&self.reach, b, &mut self.next);
            std::mem::swap(&mut self.reach, &mut self.next);
        }
        Ok(())
    }

    fn can_skip(&self, sym: SymbolId) -> bool {
        let entry = &self.entries[sym.index()];
        let info = entry.info;
        info.nl
            && info.count == 0
            && !info.left
            && !info.right
            && !self.matched
            && !entry
                .edges
                .iter()
                .any(|&(q, q2)| self.reach.contains(q as usize) && self.automaton.is_final(q2))
    }

    fn skip(&mut self, sym: SymbolId) {
        let entry = &self.entries[sym.index()];
        self.reach.clear();
        for &(q1, q2) in &entry.edges {
            if self.automaton.is_initial(q1) {
                self.reach.insert(q2 as usize);
            }
        }
        self.matched = false;
        self.line.clear();
        self.last_line(sym);
    }

    /// Appends the bytes of `sym` after its last newline to the line buffer.
    fn last_line(&mut self, sym: SymbolId) {
        let mut pieces = Vec::new();
        let mut cur = sym;
        while let Some(rule) = self.slp.rule(cur) {
            if self.entries[rule.second.index()].info.nl {
                cur = rule.second;
            } else {
                pieces.push(rule.second);
                cur = rule.first;
            }
        }
        // `cur` is the newline terminal itself
        debug_assert_eq!(cur.as_byte(), Some(b'\n'));
        for piece in pieces.into_iter().rev() {
            self.slp
                .expand_into(piece, &mut self.line)
                .expect("grammar validated before the walk");
        }
    }

    fn finish<W: Write>(&mut self, sink: &mut W) -> io::Result<()> {
        if self.matched && !self.line.is_empty() {
            self.line.push(b'\n');
            sink.write_all(&self.line)?;
            self.emitted += 1;
        }
        Ok(())
    }
}

/// Every line matches: plain streaming decompression, adding a final
/// newline when the text lacks one.
fn emit_all_lines<W: Write>(slp: &Slp, sink: &mut W) -> Result<u64, ReportError> {
    let mut lines = 0u64;
    let mut chunk = Vec::new();
    let mut ends_with_newline = true;
    for &sym in &slp.axiom {
        chunk.clear();
        slp.expand_into(sym, &mut chunk)?;
        lines += chunk.iter().filter(|&&b| b == b'\n').count() as u64;
        if let Some(&last) = chunk.last() {
            ends_with_newline = last == b'\n';
        }
        sink.write_all(&chunk)?;
    }
    if !ends_with_newline {
        sink.write_all(b"\n")?;
        lines += 1;
    }
    sink.flush()?;
    Ok(lines)
}
