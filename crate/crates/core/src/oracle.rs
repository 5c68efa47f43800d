//! Brute-force reference answers on uncompressed text.
//!
//! Nothing here touches the counting engine: lines are tested by subset
//! simulation of the compiled automaton directly, and [`Backtracker`] is a
//! separate matcher with its own parser for cross-checking the compiler.

use fixedbitset::FixedBitSet;

use crate::automaton::{compile, Fsa, PatternError};
use crate::par;

/// Splits text into lines the way `grep` does: a trailing newline does not
/// start another line, and empty text has no lines.
pub fn split_lines(text: &[u8]) -> Vec<&[u8]> {
    let body = text.strip_suffix(b"\n").unwrap_or(text);
    if text.is_empty() {
        return Vec::new();
    }
    body.split(|&b| b == b'\n').collect()
}

/// Whether some factor of `line` is in the language, trying every start
/// position. `line` must not contain a newline.
pub fn line_matches(fsa: &Fsa, line: &[u8]) -> bool {
    if fsa.matches_empty() {
        return true;
    }
    let mut cur = FixedBitSet::with_capacity(fsa.state_count());
    let mut next = cur.clone();
    for start in 0..line.len() {
        cur.clone_from(&fsa.initial_set());
        for &b in &line[start..] {
            fsa.step(&cur, b, &mut next);
            std::mem::swap(&mut cur, &mut next);
            if fsa.any_final(&cur) {
                return true;
            }
            if cur.is_clear() {
                break;
            }
        }
    }
    false
}

/// Single left-to-right pass of the automaton for `Σ̂* L Σ̂*`: the initial
/// states are re-entered before every byte.
pub fn line_matches_wrapped(fsa: &Fsa, line: &[u8]) -> bool {
    if fsa.matches_empty() {
        return true;
    }
    let initial = fsa.initial_set();
    let mut cur = FixedBitSet::with_capacity(fsa.state_count());
    let mut next = cur.clone();
    for &b in line {
        cur.union_with(&initial);
        fsa.step(&cur, b, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if fsa.any_final(&cur) {
            return true;
        }
    }
    false
}

/// The matching lines of `text`, in order, without their newlines.
pub fn oracle_lines(text: &[u8], pattern: &str) -> Result<Vec<Vec<u8>>, PatternError> {
    let fsa = compile(pattern)?;
    Ok(matching_lines(text, &fsa)
        .into_iter()
        .map(<[u8]>::to_vec)
        .collect())
}

pub fn oracle_count(text: &[u8], pattern: &str) -> Result<u64, PatternError> {
    let fsa = compile(pattern)?;
    Ok(matching_lines(text, &fsa).len() as u64)
}

/// Lines of `text` containing a match of `fsa`; lines are tested in
/// parallel when the `parallel` feature is on.
pub fn matching_lines<'t>(text: &'t [u8], fsa: &Fsa) -> Vec<&'t [u8]> {
    let lines = split_lines(text);
    let keep = par::map(&lines, |line| line_matches(fsa, line));
    lines
        .into_iter()
        .zip(keep)
        .filter_map(|(line, k)| k.then_some(line))
        .collect()
}

/// The text a line reporter should produce: every matching line followed
/// by a newline.
pub fn oracle_report(text: &[u8], fsa: &Fsa) -> Vec<u8> {
    let mut out = Vec::new();
    for line in matching_lines(text, fsa) {
        out.extend_from_slice(line);
        out.push(b'\n');
    }
    out
}

/// A naive backtracking matcher for the same pattern dialect.
#[derive(Clone, Debug)]
pub struct Backtracker {
    root: Node,
}

#[derive(Clone, Debug)]
enum Node {
    Bytes(Box<[bool; 256]>),
    Seq(Vec<Node>),
    Either(Vec<Node>),
    Loop(Box<Node>, u32, Option<u32>),
}

impl Backtracker {
    /// Parses `pattern`; errors carry only a reason.
    pub fn new(pattern: &str) -> Result<Self, String> {
        let mut r = Reader {
            s: pattern.as_bytes(),
            i: 0,
        };
        let root = r.alt()?;
        if r.i != r.s.len() {
            return Err("trailing input".into());
        }
        Ok(Backtracker { root })
    }

    /// Whole-string match.
    pub fn is_match(&self, u: &[u8]) -> bool {
        go(&self.root, u, 0, &mut |j| j == u.len())
    }
}

fn go(node: &Node, u: &[u8], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
    match node {
        Node::Bytes(set) => i < u.len() && set[u[i] as usize] && k(i + 1),
        Node::Seq(items) => seq(items, u, i, k),
        Node::Either(branches) => branches.iter().any(|b| go(b, u, i, k)),
        Node::Loop(body, min, max) => repeat(body, *min, *max, 0, u, i, k),
    }
}

fn seq(items: &[Node], u: &[u8], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
    match items.split_first() {
        None => k(i),
        Some((head, rest)) => go(head, u, i, &mut |j| seq(rest, u, j, k)),
    }
}

fn repeat(
    body: &Node,
    min: u32,
    max: Option<u32>,
    done: u32,
    u: &[u8],
    i: usize,
    k: &mut dyn FnMut(usize) -> bool,
) -> bool {
    if done >= min && k(i) {
        return true;
    }
    if max.is_some_and(|m| done >= m) {
        return false;
    }
    // beyond the minimum an iteration must consume input
    go(body, u, i, &mut |j| {
        (done < min || j > i) && repeat(body, min, max, done + 1, u, j, k)
    })
}

struct Reader<'a> {
    s: &'a [u8],
    i: usize,
}

impl Reader<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn next(&mut self) -> Result<u8, String> {
        let b = self.peek().ok_or("unexpected end")?;
        self.i += 1;
        Ok(b)
    }

    fn alt(&mut self) -> Result<Node, String> {
        let mut branches = vec![self.seq()?];
        while self.peek() == Some(b'|') {
            self.i += 1;
            branches.push(self.seq()?);
        }
        Ok(Node::Either(branches))
    }

    fn seq(&mut self) -> Result<Node, String> {
        let mut items = Vec::new();
        while !matches!(self.peek(), None | Some(b'|') | Some(b')')) {
            let mut atom = self.atom()?;
            loop {
                let op = self.peek();
                let (min, max) = match op {
                    Some(b'*') => (0, None),
                    Some(b'+') => (1, None),
                    Some(b'?') => (0, Some(1)),
                    Some(b'{') => self.braces()?,
                    _ => break,
                };
                if op != Some(b'{') {
                    self.i += 1;
                }
                atom = Node::Loop(Box::new(atom), min, max);
            }
            items.push(atom);
        }
        Ok(Node::Seq(items))
    }

    fn int(&mut self) -> Option<u32> {
        let start = self.i;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .ok()?
            .parse()
            .ok()
    }

    /// Leaves the cursor just past the closing brace.
    fn braces(&mut self) -> Result<(u32, Option<u32>), String> {
        self.i += 1;
        let min = self.int().ok_or("bad repetition")?;
        let max = match self.next()? {
            b'}' => return Ok((min, Some(min))),
            b',' => self.int(),
            _ => return Err("bad repetition".into()),
        };
        if self.next()? != b'}' {
            return Err("bad repetition".into());
        }
        Ok((min, max))
    }

    fn atom(&mut self) -> Result<Node, String> {
        let b = self.next()?;
        let mut set = Box::new([false; 256]);
        match b {
            b'(' => {
                let inner = self.alt()?;
                if self.next()? != b')' {
                    return Err("missing )".into());
                }
                return Ok(inner);
            }
            b'.' => {
                set.fill(true);
                set[b'\n' as usize] = false;
            }
            b'[' => {
                let negate = self.peek() == Some(b'^');
                if negate {
                    self.i += 1;
                }
                let mut first = true;
                while first || self.peek() != Some(b']') {
                    first = false;
                    let lo = self.member()?;
                    let hi = if self.peek() == Some(b'-') && self.s.get(self.i + 1) != Some(&b']') {
                        self.i += 1;
                        self.member()?
                    } else {
                        lo
                    };
                    for c in lo..=hi {
                        set[c as usize] = true;
                    }
                }
                self.i += 1;
                if negate {
                    for v in set.iter_mut() {
                        *v = !*v;
                    }
                    set[b'\n' as usize] = false;
                }
            }
            b'*' | b'+' | b'?' | b'{' | b')' => return Err("misplaced operator".into()),
            b'\\' => set[self.escaped()? as usize] = true,
            _ => set[b as usize] = true,
        }
        Ok(Node::Bytes(set))
    }

    fn member(&mut self) -> Result<u8, String> {
        match self.next()? {
            b'\\' => self.escaped(),
            b => Ok(b),
        }
    }

    fn escaped(&mut self) -> Result<u8, String> {
        Ok(match self.next()? {
            b'n' => b'\n',
            b't' => b'\t',
            b'r' => b'\r',
            b'x' => {
                let hi = (self.next()? as char).to_digit(16).ok_or("bad hex")?;
                let lo = (self.next()? as char).to_digit(16).ok_or("bad hex")?;
                (hi * 16 + lo) as u8
            }
            b if b.is_ascii_alphanumeric() => return Err("unknown escape".into()),
            b => b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_text() {
        let lines = oracle_lines(b"ba\nab\naba", "ab|ba").unwrap();
        assert_eq!(lines, vec![b"ba".to_vec(), b"ab".to_vec(), b"aba".to_vec()]);
        assert_eq!(oracle_count(b"ba\nab\naba", "ab|ba").unwrap(), 3);
    }

    #[test]
    fn empty_pattern_matches_every_line() {
        assert_eq!(oracle_count(b"x\ny", "a*").unwrap(), 2);
        assert_eq!(oracle_count(b"x\n\n", "a*").unwrap(), 2);
        assert_eq!(oracle_count(b"", "a*").unwrap(), 0);
    }

    #[test]
    fn no_match() {
        assert_eq!(oracle_count(b"aaa", "b").unwrap(), 0);
        assert!(oracle_lines(b"aaa", "b").unwrap().is_empty());
    }

    #[test]
    fn line_splitting() {
        assert!(split_lines(b"").is_empty());
        assert_eq!(split_lines(b"\n"), vec![&b""[..]]);
        assert_eq!(split_lines(b"a\n\nb"), vec![&b"a"[..], b"", b"b"]);
        assert_eq!(split_lines(b"a\nb\n"), vec![&b"a"[..], b"b"]);
    }

    #[test]
    fn both_line_tests_agree() {
        let fsa = compile("a(b|c)*d").unwrap();
        for line in [&b"xxabcbd"[..], b"abc", b"ad", b"dda", b""] {
            assert_eq!(line_matches(&fsa, line), line_matches_wrapped(&fsa, line));
        }
    }

    #[test]
    fn backtracker_basics() {
        let re = Backtracker::new("(a|b)*c{2,3}[^x]").unwrap();
        assert!(re.is_match(b"abcc."));
        assert!(re.is_match(b"ccc\t"));
        assert!(!re.is_match(b"abcx"));
        assert!(!re.is_match(b"acccc\n"));
        let re = Backtracker::new("(a*)*b").unwrap();
        assert!(re.is_match(b"aaab"));
        assert!(!re.is_match(b"aaaa"));
        assert!(Backtracker::new("\\x4").is_err());
        let re = Backtracker::new("\\x41\\.x?").unwrap();
        assert!(re.is_match(b"A."));
    }
}
