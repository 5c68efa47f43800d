//! Line counting over a straight-line program without decompression.
//!
//! Every symbol gets its counting information ⟨nl, left, right, count⟩ and
//! the list of state pairs `(q1, q2)` such that the automaton moves from
//! `q1` to `q2` reading a non-empty factor of the symbol's expansion, where
//! the factor may start late only if `q1` is initial and may stop early only
//! if `q2` is final. Terminals take these from the transition relation;
//! each rule `X -> a b` composes the lists of `a` and `b`. The axiom, which
//! may be long, is folded left to right keeping only the set of states
//! reachable from an initial state.
//!
//! Working storage per rule is the pair of `s x s` scratch matrices: `M`
//! records the last rule that inserted each pair (so inserting is a single
//! probe and the matrix is never cleared) and `N` holds, row by row, the
//! successors of every non-initial state under the rule's right child.
//! Pairs of the right child that start at an initial state are read from its
//! edge list directly, so with a deterministic automaton no row of `N` ever
//! holds more than one state.

use std::io::BufRead;

use fixedbitset::FixedBitSet;

use crate::automaton::{Fsa, SearchAutomaton, StateId};
use crate::format::{FormatError, SlpReader};
use crate::slp::{Rule, Slp, SlpError, SymbolId, TERMINALS};

/// ⟨nl, left, right, count⟩ for one symbol.
///
/// `left` / `right`: the first / last line of the expansion holds a match
/// (they coincide when there is no newline); `count`: number of matching
/// lines enclosed by newlines on both sides.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CountInfo {
    pub nl: bool,
    pub left: bool,
    pub right: bool,
    pub count: u64,
}

impl CountInfo {
    pub const fn new(nl: bool, left: bool, right: bool, count: u64) -> Self {
        CountInfo {
            nl,
            left,
            right,
            count,
        }
    }

    /// Matching lines in the whole expansion.
    pub fn matching_lines(&self) -> u64 {
        self.count
            + if self.nl {
                self.left as u64 + self.right as u64
            } else {
                self.left as u64
            }
    }

    pub fn any_match(&self) -> bool {
        self.left || self.right || self.count > 0
    }
}

/// Counting information of `a b` given that of `a` and `b` and whether a
/// match spans their boundary.
pub fn count_combine(a: CountInfo, b: CountInfo, boundary_match: bool) -> CountInfo {
    let m = boundary_match;
    CountInfo {
        nl: a.nl || b.nl,
        left: if !a.nl { a.left || b.left || m } else { a.left },
        right: if !b.nl {
            a.right || b.right || m
        } else {
            b.right
        },
        count: a.count + b.count + (a.nl && b.nl && (a.right || b.left || m)) as u64,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolEntry {
    pub info: CountInfo,
    pub edges: Vec<(StateId, StateId)>,
}

/// Counting information and edges for all 256 bytes.
pub fn init_terminals(automaton: &SearchAutomaton) -> Vec<SymbolEntry> {
    (0..=255u8)
        .map(|a| {
            let edges = automaton.edges_on(a).to_vec();
            let hit = edges
                .iter()
                .any(|&(p, t)| automaton.is_initial(p) && automaton.is_final(t));
            SymbolEntry {
                info: CountInfo::new(a == b'\n', hit, hit, 0),
                edges,
            }
        })
        .collect()
}

const NO_WRITER: u32 = u32::MAX;
const END_OF_ROW: StateId = StateId::MAX;

/// The `M` and `N` working matrices, reused across rules.
#[derive(Clone, Debug)]
pub struct ScratchMatrices {
    s: usize,
    last_writer: Vec<u32>,
    rows: Vec<StateId>,
    row_len: Vec<u32>,
    touched: Vec<StateId>,
}

impl ScratchMatrices {
    pub fn new(s: usize) -> Self {
        ScratchMatrices {
            s,
            last_writer: vec![NO_WRITER; s * s],
            rows: vec![END_OF_ROW; s * (s + 1)],
            row_len: vec![0; s],
            touched: Vec::new(),
        }
    }

    /// Loads the successor rows of `edges` for non-initial states. Returns
    /// the number of writes.
    fn load(&mut self, edges: &[(StateId, StateId)], is_initial: impl Fn(StateId) -> bool) -> u64 {
        let width = self.s + 1;
        let mut writes = 0;
        for &q in &self.touched {
            self.rows[q as usize * width] = END_OF_ROW;
            self.row_len[q as usize] = 0;
            writes += 1;
        }
        self.touched.clear();
        for &(q, t) in edges {
            if is_initial(q) {
                continue;
            }
            let len = &mut self.row_len[q as usize];
            if *len == 0 {
                self.touched.push(q);
            }
            self.rows[q as usize * width + *len as usize] = t;
            *len += 1;
            writes += 1;
        }
        for &q in &self.touched {
            self.rows[q as usize * width + self.row_len[q as usize] as usize] = END_OF_ROW;
            writes += 1;
        }
        writes
    }

    /// Row `q` of `N`, up to its sentinel.
    pub fn row(&self, q: StateId) -> impl Iterator<Item = StateId> + '_ {
        let start = q as usize * (self.s + 1);
        self.rows[start..start + self.s + 1]
            .iter()
            .copied()
            .take_while(|&t| t != END_OF_ROW)
    }

    fn row_len(&self, q: StateId) -> usize {
        self.row_len[q as usize] as usize
    }

    /// Inserts `(q1, q2)` for writer `id` unless already present.
    fn claim(&mut self, q1: StateId, q2: StateId, id: u32) -> bool {
        let cell = &mut self.last_writer[q1 as usize * self.s + q2 as usize];
        if *cell == id {
            false
        } else {
            *cell = id;
            true
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineOptions {
    /// Check the dedup and row-occupancy invariants while running.
    pub verify: bool,
    /// Record the per-rule and per-axiom-symbol operation bounds.
    pub record_costs: bool,
}

/// Observations collected when [`EngineOptions::verify`] is set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct InvariantReport {
    /// Largest `N` row. Only non-initial states have rows.
    pub max_row: usize,
    /// Largest reachable set during the axiom fold.
    pub max_reach: usize,
    /// Duplicate pairs found in any edge list.
    pub duplicate_edges: usize,
}

/// The saturating counter. One instance per search.
pub struct Engine {
    automaton: SearchAutomaton,
    entries: Vec<SymbolEntry>,
    scratch: ScratchMatrices,
    options: EngineOptions,
    operations: u64,
    rule_costs: Vec<u64>,
    axiom_costs: Vec<u64>,
    report: InvariantReport,
}

impl Engine {
    pub fn new(fsa: &Fsa, options: EngineOptions) -> Self {
        Self::with_automaton(SearchAutomaton::new(fsa), options)
    }

    pub fn with_automaton(automaton: SearchAutomaton, options: EngineOptions) -> Self {
        let entries = init_terminals(&automaton);
        let scratch = ScratchMatrices::new(automaton.state_count());
        Engine {
            automaton,
            entries,
            scratch,
            options,
            operations: 0,
            rule_costs: Vec::new(),
            axiom_costs: Vec::new(),
            report: InvariantReport::default(),
        }
    }

    pub fn automaton(&self) -> &SearchAutomaton {
        &self.automaton
    }

    pub fn entry(&self, sym: SymbolId) -> &SymbolEntry {
        &self.entries[sym.index()]
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }

    pub fn rule_count(&self) -> usize {
        self.entries.len() - TERMINALS as usize
    }

    /// Elementary operations performed so far.
    pub fn operations(&self) -> u64 {
        self.operations
    }

    pub fn rule_costs(&self) -> &[u64] {
        &self.rule_costs
    }

    pub fn axiom_costs(&self) -> &[u64] {
        &self.axiom_costs
    }

    pub fn invariant_report(&self) -> InvariantReport {
        self.report
    }

    pub fn scratch(&self) -> &ScratchMatrices {
        &self.scratch
    }

    /// Saturates one rule. Rules must arrive in definition order.
    pub fn process_rule(&mut self, rule: &Rule) {
        assert_eq!(
            rule.left.index(),
            self.entries.len(),
            "rules must be processed in order"
        );
        let id = rule.left.0;
        let (first, second) = (rule.first.index(), rule.second.index());
        let a = &self.automaton;
        let s = a.state_count();

        self.operations += self
            .scratch
            .load(&self.entries[second].edges, |q| a.is_initial(q));
        if self.options.verify {
            for &q in &self.scratch.touched {
                self.report.max_row = self.report.max_row.max(self.scratch.row_len(q));
            }
        }

        let mut edges = Vec::new();
        let mut boundary_match = false;
        let mut cost = (self.entries[second].edges.len() + s) as u64;
        // `mid` is never initial: no transition enters an initial state
        for &(q1, mid) in &self.entries[first].edges {
            self.operations += 1;
            cost += 1 + self.scratch.row_len(mid) as u64;
            let start = mid as usize * (s + 1);
            let mut j = start;
            while self.scratch.rows[j] != END_OF_ROW {
                let q2 = self.scratch.rows[j];
                self.operations += 1;
                if self.scratch.claim(q1, q2, id) {
                    edges.push((q1, q2));
                }
                boundary_match |= a.is_initial(q1) && !a.is_final(mid) && a.is_final(q2);
                j += 1;
            }
            if a.is_final(mid) {
                self.operations += 1;
                if self.scratch.claim(q1, mid, id) {
                    edges.push((q1, mid));
                }
            }
        }
        // suffixes of the right child, read from an initial state
        for &(q1, q2) in &self.entries[second].edges {
            self.operations += 1;
            if a.is_initial(q1) && self.scratch.claim(q1, q2, id) {
                edges.push((q1, q2));
            }
        }

        if self.options.verify {
            let mut sorted = edges.clone();
            sorted.sort_unstable();
            sorted.dedup();
            self.report.duplicate_edges += edges.len() - sorted.len();
        }
        if self.options.record_costs {
            self.rule_costs.push(cost);
        }

        let info = count_combine(
            self.entries[first].info,
            self.entries[second].info,
            boundary_match,
        );
        log::trace!(
            "rule {} -> {} {}: info {:?} (children {:?}, {:?}), {} edges",
            rule.left,
            rule.first,
            rule.second,
            info,
            self.entries[first].info,
            self.entries[second].info,
            edges.len()
        );
        self.entries.push(SymbolEntry { info, edges });
    }

    /// Counting information of the axiom sequence.
    pub fn process_axiom(&mut self, axiom: &[SymbolId]) -> CountInfo {
        self.fold_axiom(axiom, false)
    }

    /// Whether any line holds a match; may stop reading the axiom early.
    pub fn axiom_contains_match(&mut self, axiom: &[SymbolId]) -> bool {
        self.fold_axiom(axiom, true).any_match()
    }

    fn fold_axiom(&mut self, axiom: &[SymbolId], stop_at_match: bool) -> CountInfo {
        let a = &self.automaton;
        let s = a.state_count();
        let Some((&head, rest)) = axiom.split_first() else {
            return CountInfo::default();
        };
        let head_entry = &self.entries[head.index()];
        let mut info = head_entry.info;
        if self.options.record_costs {
            self.axiom_costs.push(head_entry.edges.len() as u64);
        }
        let mut reach = FixedBitSet::with_capacity(s);
        let mut next = FixedBitSet::with_capacity(s);
        for &(q1, q2) in &head_entry.edges {
            self.operations += 1;
            if a.is_initial(q1) {
                reach.insert(q2 as usize);
            }
        }
        for &sym in rest {
            if stop_at_match && info.any_match() {
                break;
            }
            let entry = &self.entries[sym.index()];
            next.clear();
            let mut boundary_match = false;
            for &(mid, q2) in &entry.edges {
                self.operations += 1;
                let reached = reach.contains(mid as usize);
                if reached || a.is_initial(mid) {
                    next.insert(q2 as usize);
                }
                boundary_match |= reached && !a.is_final(mid) && a.is_final(q2);
            }
            for q in reach.ones() {
                if a.is_final(q as StateId) {
                    next.insert(q);
                }
            }
            self.operations += 1;
            if self.options.record_costs {
                self.axiom_costs.push(entry.edges.len() as u64);
            }
            if self.options.verify {
                self.report.max_reach = self.report.max_reach.max(next.count_ones(..));
            }
            let before = info;
            info = count_combine(info, entry.info, boundary_match);
            log::trace!(
                "axiom {sym}: {before:?} + {:?} (boundary {boundary_match}) = {info:?}",
                entry.info
            );
            std::mem::swap(&mut reach, &mut next);
        }
        info
    }
}

/// Per-symbol newline bookkeeping for patterns that match the empty string,
/// where every line matches.
#[derive(Clone, Debug)]
pub struct LineTally {
    newlines: Vec<u64>,
    ends_with_newline: Vec<bool>,
}

impl Default for LineTally {
    fn default() -> Self {
        LineTally {
            newlines: (0..=255u8).map(|b| (b == b'\n') as u64).collect(),
            ends_with_newline: (0..=255u8).map(|b| b == b'\n').collect(),
        }
    }
}

impl LineTally {
    pub fn process_rule(&mut self, rule: &Rule) {
        assert_eq!(rule.left.index(), self.newlines.len());
        let (a, b) = (rule.first.index(), rule.second.index());
        self.newlines.push(self.newlines[a] + self.newlines[b]);
        self.ends_with_newline.push(self.ends_with_newline[b]);
    }

    /// Number of lines: newline-terminated segments plus an unterminated tail.
    pub fn lines(&self, axiom: &[SymbolId]) -> u64 {
        let newlines: u64 = axiom.iter().map(|s| self.newlines[s.index()]).sum();
        let tail = axiom
            .last()
            .is_some_and(|s| !self.ends_with_newline[s.index()]);
        newlines + tail as u64
    }
}

/// A search over a rule stream, dispatching on whether the pattern accepts
/// the empty string.
pub enum Search {
    Saturating(Box<Engine>),
    AllLines(LineTally),
}

impl Search {
    pub fn new(fsa: &Fsa) -> Self {
        Self::with_options(fsa, EngineOptions::default())
    }

    pub fn with_options(fsa: &Fsa, options: EngineOptions) -> Self {
        if fsa.matches_empty() {
            Search::AllLines(LineTally::default())
        } else {
            Search::Saturating(Box::new(Engine::new(fsa, options)))
        }
    }

    pub fn process_rule(&mut self, rule: &Rule) {
        match self {
            Search::Saturating(e) => e.process_rule(rule),
            Search::AllLines(t) => t.process_rule(rule),
        }
    }

    pub fn count(&mut self, axiom: &[SymbolId]) -> u64 {
        match self {
            Search::Saturating(e) => e.process_axiom(axiom).matching_lines(),
            Search::AllLines(t) => t.lines(axiom),
        }
    }

    pub fn contains(&mut self, axiom: &[SymbolId]) -> bool {
        match self {
            Search::Saturating(e) => e.axiom_contains_match(axiom),
            Search::AllLines(t) => t.lines(axiom) > 0,
        }
    }

    pub fn engine(&self) -> Option<&Engine> {
        match self {
            Search::Saturating(e) => Some(e),
            Search::AllLines(_) => None,
        }
    }
}

/// Number of lines of `slp`'s text that contain a match.
pub fn count_matching_lines(slp: &Slp, fsa: &Fsa) -> Result<u64, SlpError> {
    slp.check()?;
    let mut search = Search::new(fsa);
    for rule in &slp.rules {
        search.process_rule(rule);
    }
    Ok(search.count(&slp.axiom))
}

/// Whether any line of `slp`'s text contains a match.
pub fn contains_match(slp: &Slp, fsa: &Fsa) -> Result<bool, SlpError> {
    slp.check()?;
    let mut search = Search::new(fsa);
    for rule in &slp.rules {
        search.process_rule(rule);
    }
    Ok(search.contains(&slp.axiom))
}

/// Counts matching lines while reading rules straight from a ZSLP stream.
pub fn count_stream<R: BufRead>(mut reader: SlpReader<R>, fsa: &Fsa) -> Result<u64, FormatError> {
    let mut search = Search::new(fsa);
    while let Some(rule) = reader.next_rule()? {
        search.process_rule(&rule);
    }
    let axiom = reader.read_axiom()?;
    Ok(search.count(&axiom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::compile;
    use crate::repair::compress;
    use crate::slp::example_grammar;

    const T: bool = true;
    const F: bool = false;

    fn ab_ba() -> Engine {
        Engine::new(
            &compile("ab|ba").unwrap(),
            EngineOptions {
                verify: true,
                record_costs: true,
            },
        )
    }

    #[test]
    fn combine_examples() {
        assert_eq!(
            count_combine(CountInfo::new(T, T, F, 0), CountInfo::new(T, F, T, 0), true),
            CountInfo::new(T, T, T, 1)
        );
        assert_eq!(
            count_combine(
                CountInfo::new(F, F, F, 0),
                CountInfo::new(F, F, F, 0),
                false
            ),
            CountInfo::new(F, F, F, 0)
        );
        assert_eq!(
            count_combine(
                CountInfo::new(F, T, T, 0),
                CountInfo::new(T, F, F, 0),
                false
            ),
            CountInfo::new(T, T, F, 0)
        );
    }

    #[test]
    fn terminal_entries() {
        let e = ab_ba();
        let a = e.automaton();
        assert_eq!(e.entry(SymbolId(10)).info, CountInfo::new(T, F, F, 0));
        assert!(e.entry(SymbolId(10)).edges.is_empty());
        let on_a = e.entry(SymbolId(97));
        assert_eq!(on_a.info, CountInfo::new(F, F, F, 0));
        assert_eq!(on_a.edges.len(), 2);
        assert_eq!(
            on_a.edges.iter().filter(|&&(p, _)| a.is_initial(p)).count(),
            1
        );

        let single = Engine::new(&compile("a").unwrap(), EngineOptions::default());
        assert_eq!(single.entry(SymbolId(97)).info, CountInfo::new(F, T, T, 0));
    }

    #[test]
    fn rule_a_b() {
        let mut e = ab_ba();
        e.process_rule(&Rule::new(SymbolId(256), SymbolId(97), SymbolId(98)));
        let a = e.automaton();
        let q0 = a.initials()[0];
        let entry = e.entry(SymbolId(256));
        assert_eq!(entry.info, CountInfo::new(F, T, T, 0));
        // (q0, qf) reads "ab", (q0, qb) the suffix "b", (qb, qf) the prefix "a"
        let mut got = entry.edges.clone();
        got.sort_unstable();
        let qf = a.finals().next().unwrap();
        let qb = a
            .edges_on(b'b')
            .iter()
            .find(|&&(p, t)| p == q0 && !a.is_final(t))
            .unwrap()
            .1;
        let mut want = vec![(q0, qf), (q0, qb), (qb, qf)];
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn rule_without_transitions() {
        let mut e = ab_ba();
        e.process_rule(&Rule::new(
            SymbolId(256),
            SymbolId(b'x' as u32),
            SymbolId(b'y' as u32),
        ));
        let entry = e.entry(SymbolId(256));
        assert!(entry.edges.is_empty());
        assert_eq!(entry.info, CountInfo::default());
    }

    #[test]
    fn example_grammar_counts_three() {
        let slp = example_grammar();
        let fsa = compile("ab|ba").unwrap();
        let mut e = Engine::new(&fsa, EngineOptions::default());
        for r in &slp.rules {
            e.process_rule(r);
        }
        assert_eq!(e.entry(SymbolId(258)).info, CountInfo::new(T, T, F, 0));
        assert_eq!(e.entry(SymbolId(262)).info, CountInfo::new(T, F, T, 0));
        let info = e.process_axiom(&slp.axiom);
        assert_eq!(info, CountInfo::new(T, T, T, 1));
        assert_eq!(info.matching_lines(), 3);
        assert_eq!(count_matching_lines(&slp, &fsa), Ok(3));
        assert_eq!(contains_match(&slp, &fsa), Ok(true));
    }

    #[test]
    fn axiom_folds() {
        let mut e = ab_ba();
        assert_eq!(
            e.process_axiom(&[SymbolId(97), SymbolId(98)]),
            CountInfo::new(F, T, T, 0)
        );
        let mut e = ab_ba();
        assert_eq!(
            e.process_axiom(&[SymbolId(10), SymbolId(10)]),
            CountInfo::new(T, F, F, 0)
        );
        let mut e = ab_ba();
        assert_eq!(e.process_axiom(&[SymbolId(98)]), CountInfo::default());
    }

    #[test]
    fn empty_pattern_counts_lines() {
        let fsa = compile("a*").unwrap();
        for (text, lines) in [
            (&b"x\ny"[..], 2),
            (b"x\ny\n", 2),
            (b"\n", 1),
            (b"\n\n\n", 3),
            (b"abc", 1),
        ] {
            let slp = compress(text).unwrap();
            assert_eq!(count_matching_lines(&slp, &fsa), Ok(lines), "{text:?}");
        }
    }

    #[test]
    fn decision_variant() {
        let b = compile("b").unwrap();
        assert_eq!(contains_match(&compress(b"aaa").unwrap(), &b), Ok(false));
        let ab = compile("ab").unwrap();
        assert_eq!(contains_match(&compress(b"xxabxx").unwrap(), &ab), Ok(true));
    }

    #[test]
    fn no_match_counts_zero() {
        let slp = compress(b"abab\nbaba\n").unwrap();
        assert_eq!(count_matching_lines(&slp, &compile("zz").unwrap()), Ok(0));
    }

    #[test]
    fn scratch_rows_end_in_sentinels() {
        let mut m = ScratchMatrices::new(3);
        m.load(&[(0, 1), (0, 2), (2, 0), (1, 2)], |q| q == 1);
        assert_eq!(m.row(0).collect::<Vec<_>>(), [1, 2]);
        assert_eq!(m.row(1).count(), 0);
        m.load(&[(1, 1)], |_| false);
        assert_eq!(m.row(0).count(), 0);
        assert_eq!(m.row(1).collect::<Vec<_>>(), [1]);
        assert_eq!(m.row(2).count(), 0);
    }
}
