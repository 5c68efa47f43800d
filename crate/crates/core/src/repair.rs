//! RePair grammar compression.
//!
//! The most frequent adjacent pair is replaced by a fresh variable until no
//! pair occurs twice; what remains becomes the axiom. Counts are
//! non-overlapping, scanned left to right, and ties go to the pair whose
//! first occurrence is leftmost.
//!
//! The working sequence is a doubly linked list over the original positions,
//! so "leftmost" is simply the smallest position. Each pair keeps a sorted
//! list of candidate positions that is validated lazily. A pair that does not
//! involve the newest variable can only lose occurrences, so the priority
//! stored in the heap is an upper bound and stale entries are re-keyed when
//! they surface.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::format;
use crate::slp::{Slp, SymbolId, TERMINALS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompressError {
    #[error("empty input")]
    EmptyInput,
    #[error("input too large")]
    TooLarge,
}

const NONE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX;

type Pair = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Priority {
    count: u32,
    first: Reverse<u32>,
}

struct Sequence {
    sym: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
}

impl Sequence {
    fn pair_at(&self, i: u32) -> Option<Pair> {
        let a = self.sym[i as usize];
        if a == DEAD {
            return None;
        }
        let j = self.next[i as usize];
        (j != NONE).then(|| (a, self.sym[j as usize]))
    }

    /// Re-validates `positions` for `pair`, dropping stale entries, and
    /// returns the greedy non-overlapping count and first occurrence.
    fn recount(&self, pair: Pair, positions: &mut Vec<u32>) -> Priority {
        positions.retain(|&i| self.pair_at(i) == Some(pair));
        let mut count = 0;
        let mut last: Option<u32> = None;
        for &i in positions.iter() {
            if pair.0 == pair.1 && last.is_some_and(|t| self.next[t as usize] == i) {
                continue;
            }
            count += 1;
            last = Some(i);
        }
        Priority {
            count,
            first: Reverse(positions.first().copied().unwrap_or(NONE)),
        }
    }
}

/// Compresses `text` into a straight-line program.
pub fn compress(text: &[u8]) -> Result<Slp, CompressError> {
    if text.is_empty() {
        return Err(CompressError::EmptyInput);
    }
    if text.len() >= NONE as usize {
        return Err(CompressError::TooLarge);
    }
    let n = text.len();
    let mut seq = Sequence {
        sym: text.iter().map(|&b| b as u32).collect(),
        next: (1..=n as u32)
            .map(|i| if i as usize == n { NONE } else { i })
            .collect(),
        prev: (0..n as u32)
            .map(|i| if i == 0 { NONE } else { i - 1 })
            .collect(),
    };

    let mut occurrences: HashMap<Pair, Vec<u32>> = HashMap::new();
    for i in 0..n.saturating_sub(1) {
        occurrences
            .entry((seq.sym[i], seq.sym[i + 1]))
            .or_default()
            .push(i as u32);
    }
    let mut heap: BinaryHeap<(Priority, Reverse<Pair>)> = BinaryHeap::new();
    for (&pair, positions) in occurrences.iter_mut() {
        let prio = seq.recount(pair, positions);
        if prio.count >= 2 {
            heap.push((prio, Reverse(pair)));
        }
    }

    let mut pairs: Vec<Pair> = Vec::new();
    while let Some((stored, Reverse(pair))) = heap.pop() {
        let Some(positions) = occurrences.get_mut(&pair) else {
            continue;
        };
        let current = seq.recount(pair, positions);
        if current != stored {
            if current.count >= 2 {
                heap.push((current, Reverse(pair)));
            }
            continue;
        }
        let positions = occurrences.remove(&pair).unwrap_or_default();
        let z = TERMINALS + pairs.len() as u32;
        pairs.push(pair);

        let mut touched: Vec<Pair> = Vec::new();
        for i in positions {
            // earlier replacements in this pass may have consumed `i`
            if seq.pair_at(i) != Some(pair) {
                continue;
            }
            let j = seq.next[i as usize];
            let after = seq.next[j as usize];
            let before = seq.prev[i as usize];
            seq.sym[i as usize] = z;
            seq.sym[j as usize] = DEAD;
            seq.next[i as usize] = after;
            if after != NONE {
                seq.prev[after as usize] = i;
            }
            if before != NONE {
                let new_pair = (seq.sym[before as usize], z);
                record(&mut occurrences, &mut touched, new_pair, before);
            }
            if after != NONE {
                let new_pair = (z, seq.sym[after as usize]);
                record(&mut occurrences, &mut touched, new_pair, i);
            }
        }
        for new_pair in touched {
            if let Some(list) = occurrences.get_mut(&new_pair) {
                let prio = seq.recount(new_pair, list);
                if prio.count >= 2 {
                    heap.push((prio, Reverse(new_pair)));
                }
            }
        }
    }

    let mut axiom = Vec::new();
    let mut i = 0u32;
    while i != NONE {
        axiom.push(seq.sym[i as usize]);
        i = seq.next[i as usize];
    }
    Ok(Slp::from_pairs(&pairs, &axiom))
}

fn record(
    occurrences: &mut HashMap<Pair, Vec<u32>>,
    touched: &mut Vec<Pair>,
    pair: Pair,
    pos: u32,
) {
    let list = occurrences.entry(pair).or_default();
    if list.is_empty() {
        touched.push(pair);
    }
    list.push(pos);
}

/// Size summary of a compressed grammar.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CompressionReport {
    pub rules: usize,
    pub axiom_len: usize,
    pub original_len: usize,
    pub encoded_len: usize,
    /// `original_len / encoded_len`.
    pub ratio: f64,
}

pub fn compression_report(
    slp: &Slp,
    original_len: usize,
) -> Result<CompressionReport, format::FormatError> {
    let encoded_len = format::encode_slp(slp)?.len();
    Ok(CompressionReport {
        rules: slp.rules.len(),
        axiom_len: slp.axiom.len(),
        original_len,
        encoded_len,
        ratio: original_len as f64 / encoded_len as f64,
    })
}

/// Greedy left-to-right non-overlapping occurrence count of `pair` in `seq`.
pub fn non_overlapping_count(seq: &[SymbolId], pair: (SymbolId, SymbolId)) -> usize {
    let mut count = 0;
    let mut i = 0;
    while i + 1 < seq.len() {
        if (seq[i], seq[i + 1]) == pair {
            count += 1;
            i += 2;
        } else {
            i += 1;
        }
    }
    count
}
