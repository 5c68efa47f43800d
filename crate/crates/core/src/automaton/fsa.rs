use fixedbitset::FixedBitSet;
use thiserror::Error;

use super::parse::{parse, ByteSet, SyntaxError};
use super::thompson::ThompsonNfa;

pub type StateId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("syntax error {0}")]
    Syntax(SyntaxError),
    #[error("newline in pattern: no match is possible within a line")]
    NewlineInPattern,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("input contains a newline")]
pub struct NewlineInInput;

/// An ε-free automaton over bytes other than `\n`.
///
/// Initial and final states are disjoint. Whether the source pattern
/// accepts the empty string is kept in `matches_empty` instead of making an
/// initial state final.
#[derive(Clone, Debug)]
pub struct Fsa {
    transitions: Vec<Vec<(ByteSet, StateId)>>,
    initials: Vec<StateId>,
    finals: FixedBitSet,
    matches_empty: bool,
}

impl Fsa {
    /// Assembles an automaton from parts, dropping newline labels and final
    /// marks on initial states.
    pub fn from_parts(
        state_count: usize,
        transitions: impl IntoIterator<Item = (StateId, ByteSet, StateId)>,
        initials: &[StateId],
        finals: &[StateId],
        matches_empty: bool,
    ) -> Self {
        let mut table = vec![Vec::new(); state_count];
        for (q, mut set, t) in transitions {
            set.remove(b'\n');
            if !set.is_empty() {
                table[q as usize].push((set, t));
            }
        }
        let mut fin = FixedBitSet::with_capacity(state_count);
        for &f in finals {
            fin.insert(f as usize);
        }
        let mut init = initials.to_vec();
        init.sort_unstable();
        init.dedup();
        for &i in &init {
            fin.set(i as usize, false);
        }
        Fsa {
            transitions: table,
            initials: init,
            finals: fin,
            matches_empty,
        }
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn initials(&self) -> &[StateId] {
        &self.initials
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initials.binary_search(&q).is_ok()
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(q as usize)
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals.ones().map(|q| q as StateId)
    }

    pub fn matches_empty(&self) -> bool {
        self.matches_empty
    }

    /// Labelled transitions leaving `q`.
    pub fn transitions_from(&self, q: StateId) -> &[(ByteSet, StateId)] {
        &self.transitions[q as usize]
    }

    pub fn successors(&self, q: StateId, b: u8) -> impl Iterator<Item = StateId> + '_ {
        self.transitions[q as usize]
            .iter()
            .filter(move |(set, _)| set.contains(b))
            .map(|&(_, t)| t)
    }

    /// Every `(q, b, q')` triple.
    pub fn triples(&self) -> impl Iterator<Item = (StateId, u8, StateId)> + '_ {
        self.transitions.iter().enumerate().flat_map(|(q, list)| {
            list.iter()
                .flat_map(move |(set, t)| set.iter().map(move |b| (q as StateId, b, *t)))
        })
    }

    /// At most one initial state and one successor per state and byte.
    pub fn is_deterministic(&self) -> bool {
        self.initials.len() <= 1
            && self.transitions.iter().all(|list| {
                let mut seen = ByteSet::empty();
                list.iter().all(|(set, _)| {
                    let disjoint = set.is_disjoint(&seen);
                    seen = seen.union(set);
                    disjoint
                })
            })
    }

    /// One step of subset simulation.
    pub fn step(&self, from: &FixedBitSet, b: u8, into: &mut FixedBitSet) {
        into.clear();
        for q in from.ones() {
            for (set, t) in &self.transitions[q] {
                if set.contains(b) {
                    into.insert(*t as usize);
                }
            }
        }
    }

    pub fn initial_set(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.state_count());
        for &q in &self.initials {
            set.insert(q as usize);
        }
        set
    }

    pub fn any_final(&self, set: &FixedBitSet) -> bool {
        !set.is_disjoint(&self.finals)
    }

    /// Whole-string membership by subset simulation.
    pub fn accepts(&self, input: &[u8]) -> Result<bool, NewlineInInput> {
        if input.contains(&b'\n') {
            return Err(NewlineInInput);
        }
        if input.is_empty() {
            return Ok(self.matches_empty);
        }
        let mut cur = self.initial_set();
        let mut next = FixedBitSet::with_capacity(self.state_count());
        for &b in input {
            self.step(&cur, b, &mut next);
            std::mem::swap(&mut cur, &mut next);
            if cur.is_clear() {
                return Ok(false);
            }
        }
        Ok(self.any_final(&cur))
    }

    /// Removes states that are unreachable from an initial state or cannot
    /// reach a final state, renumbering the rest in order. Initial states are
    /// always kept.
    pub fn trimmed(&self) -> Fsa {
        let n = self.state_count();
        let mut forward = FixedBitSet::with_capacity(n);
        let mut stack: Vec<usize> = self.initials.iter().map(|&q| q as usize).collect();
        for &q in &stack {
            forward.insert(q);
        }
        while let Some(q) = stack.pop() {
            for &(_, t) in &self.transitions[q] {
                if !forward.put(t as usize) {
                    stack.push(t as usize);
                }
            }
        }
        let mut reverse = vec![Vec::new(); n];
        for (q, list) in self.transitions.iter().enumerate() {
            for &(_, t) in list {
                reverse[t as usize].push(q);
            }
        }
        let mut backward = self.finals.clone();
        let mut stack: Vec<usize> = backward.ones().collect();
        while let Some(q) = stack.pop() {
            for &p in &reverse[q] {
                if !backward.put(p) {
                    stack.push(p);
                }
            }
        }
        let mut keep = forward;
        keep.intersect_with(&backward);
        for &q in &self.initials {
            keep.insert(q as usize);
        }
        let mut map = vec![StateId::MAX; n];
        for (new, old) in keep.ones().enumerate() {
            map[old] = new as StateId;
        }
        let transitions = keep.ones().flat_map(|q| {
            let map = &map;
            self.transitions[q]
                .iter()
                .filter(move |(_, t)| map[*t as usize] != StateId::MAX)
                .map(move |&(set, t)| (map[q], set, map[t as usize]))
        });
        let transitions: Vec<_> = transitions.collect();
        let initials: Vec<StateId> = self.initials.iter().map(|&q| map[q as usize]).collect();
        let finals: Vec<StateId> = self
            .finals
            .ones()
            .filter(|&q| keep.contains(q))
            .map(|q| map[q])
            .collect();
        Fsa::from_parts(
            keep.count_ones(..),
            transitions,
            &initials,
            &finals,
            self.matches_empty,
        )
    }
}

/// Thompson construction followed by ε-removal.
///
/// The ε-free states are the Thompson start state plus every target of a
/// byte edge; a state is final when its ε-closure reaches the accepting
/// state. The start state is never marked final: acceptance of the empty
/// string is recorded in `matches_empty`.
pub fn compile(pattern: &str) -> Result<Fsa, PatternError> {
    compile_bytes(pattern.as_bytes())
}

pub fn compile_bytes(pattern: &[u8]) -> Result<Fsa, PatternError> {
    let parsed = parse(pattern).map_err(PatternError::Syntax)?;
    let nfa = ThompsonNfa::build(&parsed.ast);
    let fsa = remove_epsilons(&nfa);
    if parsed.mentions_newline && !fsa.matches_empty() && fsa.finals().next().is_none() {
        return Err(PatternError::NewlineInPattern);
    }
    Ok(fsa)
}

fn remove_epsilons(nfa: &ThompsonNfa) -> Fsa {
    let n = nfa.states.len();
    let mut important = vec![nfa.start];
    let mut is_important = FixedBitSet::with_capacity(n);
    is_important.insert(nfa.start);
    for st in &nfa.states {
        for &(_, t) in &st.trans {
            if !is_important.put(t) {
                important.push(t);
            }
        }
    }
    let mut id = vec![StateId::MAX; n];
    for (new, &old) in important.iter().enumerate() {
        id[old] = new as StateId;
    }

    let mut transitions = Vec::new();
    let mut finals = Vec::new();
    let mut matches_empty = false;
    for (new, &old) in important.iter().enumerate() {
        let mut closure = FixedBitSet::with_capacity(n);
        closure.insert(old);
        nfa.closure(&mut closure);
        if closure.contains(nfa.accept) {
            if old == nfa.start {
                matches_empty = true;
            } else {
                finals.push(new as StateId);
            }
        }
        // merge labels per target
        let mut by_target: Vec<(StateId, ByteSet)> = Vec::new();
        for p in closure.ones() {
            for &(set, t) in &nfa.states[p].trans {
                let t = id[t];
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, s)) => *s = s.union(&set),
                    None => by_target.push((t, set)),
                }
            }
        }
        transitions.extend(
            by_target
                .into_iter()
                .map(|(t, set)| (new as StateId, set, t)),
        );
    }
    Fsa::from_parts(important.len(), transitions, &[0], &finals, matches_empty).trimmed()
}
