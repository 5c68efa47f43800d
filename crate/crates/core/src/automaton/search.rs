//! The automaton the counting engine runs.
//!
//! Derived from an [`Fsa`] by removing transitions that enter an initial
//! state or leave a final state, merging all final states into one and
//! trimming useless states. Every accepted string of the source automaton
//! has a factor accepted by this one (cut the run at its last visit to an
//! initial state before its first visit to a final state), so a line holds
//! a match for one iff it holds a match for the other. With initial states
//! that have no predecessors and final states that have no successors,
//! composing two saturated edges always reads a contiguous factor.

use fixedbitset::FixedBitSet;

use super::fsa::{Fsa, StateId};

#[derive(Clone, Debug)]
pub struct SearchAutomaton {
    state_count: usize,
    initials: Vec<StateId>,
    is_initial: Vec<bool>,
    is_final: Vec<bool>,
    by_byte: Vec<Vec<(StateId, StateId)>>,
    succ_offsets: Vec<u32>,
    succ_targets: Vec<StateId>,
    deterministic: bool,
}

impl SearchAutomaton {
    pub fn new(fsa: &Fsa) -> Self {
        let n = fsa.state_count() as StateId;
        let merged_final = n;
        let transitions: Vec<_> = (0..n)
            .filter(|&q| !fsa.is_final(q))
            .flat_map(|q| {
                fsa.transitions_from(q)
                    .iter()
                    .filter(|&&(_, t)| !fsa.is_initial(t))
                    .map(move |&(set, t)| {
                        let t = if fsa.is_final(t) { merged_final } else { t };
                        (q, set, t)
                    })
            })
            .collect();
        let normalized = Fsa::from_parts(
            n as usize + 1,
            transitions,
            fsa.initials(),
            &[merged_final],
            fsa.matches_empty(),
        )
        .trimmed();
        Self::from_normalized(&normalized)
    }

    fn from_normalized(fsa: &Fsa) -> Self {
        let s = fsa.state_count();
        let mut by_byte = vec![Vec::new(); 256];
        let mut per_state_byte: Vec<Vec<StateId>> = vec![Vec::new(); s * 256];
        for (q, b, t) in fsa.triples() {
            by_byte[b as usize].push((q, t));
            per_state_byte[q as usize * 256 + b as usize].push(t);
        }
        let mut succ_offsets = Vec::with_capacity(s * 256 + 1);
        let mut succ_targets = Vec::new();
        succ_offsets.push(0);
        for list in &per_state_byte {
            succ_targets.extend_from_slice(list);
            succ_offsets.push(succ_targets.len() as u32);
        }
        let mut is_initial = vec![false; s];
        for &q in fsa.initials() {
            is_initial[q as usize] = true;
        }
        SearchAutomaton {
            state_count: s,
            initials: fsa.initials().to_vec(),
            is_initial,
            is_final: (0..s as StateId).map(|q| fsa.is_final(q)).collect(),
            by_byte,
            succ_offsets,
            succ_targets,
            deterministic: fsa.is_deterministic(),
        }
    }

    /// Number of states, `s`.
    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn initials(&self) -> &[StateId] {
        &self.initials
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.is_initial[q as usize]
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.is_final[q as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_count as StateId).filter(|&q| self.is_final(q))
    }

    /// All `(q, q')` with a transition `q --b--> q'`.
    pub fn edges_on(&self, b: u8) -> &[(StateId, StateId)] {
        &self.by_byte[b as usize]
    }

    pub fn successors(&self, q: StateId, b: u8) -> &[StateId] {
        let i = q as usize * 256 + b as usize;
        &self.succ_targets[self.succ_offsets[i] as usize..self.succ_offsets[i + 1] as usize]
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// `R' = δ(R ∪ I, b)`: states reached by reading a non-empty suffix
    /// ending with `b`. Returns whether a final state was reached.
    pub fn advance_suffixes(&self, from: &FixedBitSet, b: u8, into: &mut FixedBitSet) -> bool {
        into.clear();
        let mut hit = false;
        for q in from.ones().chain(self.initials.iter().map(|&q| q as usize)) {
            for &t in self.successors(q as StateId, b) {
                into.insert(t as usize);
                hit |= self.is_final[t as usize];
            }
        }
        hit
    }
}
