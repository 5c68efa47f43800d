//! Shared generators and brute-force references for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slpgrep::automaton::{Fsa, SearchAutomaton, StateId};
use slpgrep::oracle::line_matches;
use slpgrep::{CountInfo, Rule, Slp, SymbolId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Printable ASCII plus newline.
pub fn printable() -> Vec<u8> {
    let mut v: Vec<u8> = (0x20..=0x7e).collect();
    v.push(b'\n');
    v
}

pub fn random_text(rng: &mut impl Rng, alphabet: &[u8], max_len: usize) -> Vec<u8> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

/// Printable text with newlines at roughly `1 / line` of positions.
pub fn random_lines(rng: &mut impl Rng, max_len: usize, line: u32) -> Vec<u8> {
    let len = rng.random_range(1..=max_len);
    let letters = b"abcdefgh xyz.*(";
    (0..len)
        .map(|_| {
            if rng.random_ratio(1, line) {
                b'\n'
            } else if rng.random_ratio(1, 4) {
                rng.random_range(0x20..=0x7e)
            } else {
                letters[rng.random_range(0..letters.len())]
            }
        })
        .collect()
}

fn literal(b: u8, out: &mut String) {
    // escaping any non-alphanumeric byte is valid inside and outside classes
    if !b.is_ascii_alphanumeric() && b != b' ' {
        out.push('\\');
    }
    out.push(b as char);
}

/// A random pattern of the supported dialect over literal bytes `letters`
/// (which must not contain a newline).
pub fn random_pattern(rng: &mut impl Rng, letters: &[u8], depth: u32) -> String {
    let mut out = String::new();
    pattern_into(rng, letters, depth, &mut out);
    out
}

fn pattern_into(rng: &mut impl Rng, letters: &[u8], depth: u32, out: &mut String) {
    let pick = |rng: &mut dyn rand::RngCore| letters[rng.random_range(0..letters.len())];
    let choice = if depth == 0 {
        rng.random_range(0..4)
    } else {
        rng.random_range(0..10)
    };
    match choice {
        0 | 1 => literal(pick(rng), out),
        2 => out.push('.'),
        3 => {
            out.push('[');
            if rng.random_ratio(1, 3) {
                out.push('^');
            }
            for _ in 0..rng.random_range(1..=3) {
                literal(pick(rng), out);
            }
            out.push(']');
        }
        4 | 5 => {
            for _ in 0..rng.random_range(2..=3) {
                pattern_into(rng, letters, depth - 1, out);
            }
        }
        6 => {
            out.push('(');
            pattern_into(rng, letters, depth - 1, out);
            out.push('|');
            pattern_into(rng, letters, depth - 1, out);
            out.push(')');
        }
        _ => {
            out.push('(');
            pattern_into(rng, letters, depth - 1, out);
            out.push(')');
            let ops = ["*", "+", "?", "{2}", "{1,2}", "{0,3}", "{2,}"];
            out.push_str(ops[rng.random_range(0..ops.len())]);
        }
    }
}

/// A grammar over `alphabet` with up to `max_rules` rules whose symbols
/// expand to at most `max_len` bytes.
pub fn random_grammar(rng: &mut impl Rng, alphabet: &[u8], max_rules: usize, max_len: u64) -> Slp {
    let mut symbols: Vec<(SymbolId, u64)> =
        alphabet.iter().map(|&b| (SymbolId(b as u32), 1)).collect();
    let mut rules = Vec::new();
    let target = rng.random_range(1..=max_rules);
    let mut attempts = 0;
    while rules.len() < target && attempts < 50 * max_rules {
        attempts += 1;
        let (a, la) = symbols[rng.random_range(0..symbols.len())];
        let (b, lb) = symbols[rng.random_range(0..symbols.len())];
        if la + lb > max_len {
            continue;
        }
        let left = SymbolId(256 + rules.len() as u32);
        rules.push(Rule::new(left, a, b));
        symbols.push((left, la + lb));
    }
    let axiom_len = rng.random_range(1..=5);
    let axiom = (0..axiom_len)
        .map(|_| {
            // favour variables so rules are exercised
            if !rules.is_empty() && rng.random_ratio(3, 4) {
                SymbolId(256 + rng.random_range(0..rules.len()) as u32)
            } else {
                symbols[rng.random_range(0..symbols.len())].0
            }
        })
        .collect();
    Slp::new(rules, axiom)
}

/// Every `(q1, q2)` such that some non-empty factor `x[i..j]` takes `q1` to
/// `q2`, where `i > 0` requires `q1` initial and `j < |x|` requires `q2` final.
pub fn brute_edges(a: &SearchAutomaton, x: &[u8]) -> BTreeSet<(StateId, StateId)> {
    let s = a.state_count();
    let mut out = BTreeSet::new();
    for i in 0..x.len() {
        for q1 in 0..s as StateId {
            if i > 0 && !a.is_initial(q1) {
                continue;
            }
            let mut cur = FixedBitSet::with_capacity(s);
            cur.insert(q1 as usize);
            for j in i..x.len() {
                let mut next = FixedBitSet::with_capacity(s);
                for q in cur.ones() {
                    for &t in a.successors(q as StateId, x[j]) {
                        next.insert(t as usize);
                    }
                }
                cur = next;
                let whole_tail = j + 1 == x.len();
                for q2 in cur.ones() {
                    if whole_tail || a.is_final(q2 as StateId) {
                        out.insert((q1, q2 as StateId));
                    }
                }
                if cur.is_clear() {
                    break;
                }
            }
        }
    }
    out
}

/// ⟨nl, left, right, count⟩ straight from the line structure of `x`.
pub fn definitional_info(fsa: &Fsa, x: &[u8]) -> CountInfo {
    let segments: Vec<&[u8]> = x.split(|&b| b == b'\n').collect();
    let matches = |seg: &[u8]| !seg.is_empty() && line_matches(fsa, seg);
    if segments.len() == 1 {
        let m = matches(x);
        return CountInfo::new(false, m, m, 0);
    }
    let closed = &segments[1..segments.len() - 1];
    CountInfo::new(
        true,
        matches(segments[0]),
        matches(segments[segments.len() - 1]),
        closed.iter().filter(|seg| line_matches(fsa, seg)).count() as u64,
    )
}

/// Log-like lines from a small vocabulary.
pub fn log_text(rng: &mut impl Rng, bytes: usize) -> Vec<u8> {
    const LEVELS: [&str; 4] = ["INFO", "INFO", "WARN", "ERROR"];
    const SERVICES: [&str; 5] = ["auth", "db", "cache", "api", "worker"];
    const EVENTS: [&str; 6] = [
        "request completed",
        "connection opened",
        "connection closed",
        "cache miss",
        "retrying after timeout",
        "job finished",
    ];
    let mut out = Vec::with_capacity(bytes + 128);
    let mut second = 0u32;
    while out.len() < bytes {
        second += rng.random_range(0..3);
        let line = format!(
            "2024-03-{:02} {:02}:{:02}:{:02} {} [{}] {} id={}\n",
            1 + (second / 86400) % 28,
            (second / 3600) % 24,
            (second / 60) % 60,
            second % 60,
            LEVELS[rng.random_range(0..LEVELS.len())],
            SERVICES[rng.random_range(0..SERVICES.len())],
            EVENTS[rng.random_range(0..EVENTS.len())],
            rng.random_range(0..64),
        );
        out.extend_from_slice(line.as_bytes());
    }
    out
}

/// English-like prose: lines of words drawn with a skewed distribution.
pub fn english_text(rng: &mut impl Rng, bytes: usize) -> Vec<u8> {
    const WORDS: [&str; 60] = [
        "the",
        "of",
        "and",
        "to",
        "a",
        "in",
        "I",
        "you",
        "that",
        "it",
        "was",
        "he",
        "for",
        "on",
        "is",
        "with",
        "as",
        "his",
        "her",
        "she",
        "be",
        "at",
        "by",
        "had",
        "not",
        "but",
        "from",
        "have",
        "my",
        "me",
        "they",
        "we",
        "said",
        "what",
        "would",
        "there",
        "all",
        "so",
        "one",
        "when",
        "love",
        "know",
        "think",
        "never",
        "always",
        "tell",
        "heart",
        "night",
        "house",
        "letter",
        "morning",
        "little",
        "long",
        "could",
        "should",
        "again",
        "before",
        "after",
        "nothing",
        "something",
    ];
    let mut out = Vec::with_capacity(bytes + 128);
    while out.len() < bytes {
        let words = rng.random_range(4..14);
        for w in 0..words {
            // squaring a uniform variate favours the front of the list
            let u: f64 = rng.random();
            let word = WORDS[((u * u) * WORDS.len() as f64) as usize];
            if w > 0 {
                out.push(b' ');
            }
            if w == 0 {
                let mut chars = word.chars();
                let first = chars.next().unwrap().to_ascii_uppercase();
                out.push(first as u8);
                out.extend_from_slice(chars.as_str().as_bytes());
            } else {
                out.extend_from_slice(word.as_bytes());
            }
        }
        out.extend_from_slice(if rng.random_ratio(1, 5) {
            b",\n"
        } else {
            b".\n"
        });
    }
    out
}
