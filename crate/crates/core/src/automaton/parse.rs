//! Pattern syntax.
//!
//! Literals, backslash escapes, `.`, bracket classes (`[a-z]`, `[^...]`),
//! groups, alternation, `*`, `+`, `?` and bounded repetition `{m}`, `{m,}`,
//! `{m,n}`. `^` and `$` are ordinary bytes. `.` and negated classes never
//! match a newline.

use std::fmt;

/// Largest accepted repetition bound.
pub const MAX_REPEAT: u32 = 1000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ByteSet([u64; 4]);

impl ByteSet {
    pub const fn empty() -> Self {
        ByteSet([0; 4])
    }

    pub const fn full() -> Self {
        ByteSet([u64::MAX; 4])
    }

    pub fn single(b: u8) -> Self {
        let mut s = Self::empty();
        s.insert(b);
        s
    }

    pub fn range(lo: u8, hi: u8) -> Self {
        let mut s = Self::empty();
        for b in lo..=hi {
            s.insert(b);
        }
        s
    }

    pub fn insert(&mut self, b: u8) {
        self.0[(b >> 6) as usize] |= 1 << (b & 63);
    }

    pub fn remove(&mut self, b: u8) {
        self.0[(b >> 6) as usize] &= !(1 << (b & 63));
    }

    pub fn contains(&self, b: u8) -> bool {
        self.0[(b >> 6) as usize] & (1 << (b & 63)) != 0
    }

    pub fn union(&self, other: &ByteSet) -> ByteSet {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a |= b;
        }
        out
    }

    pub fn is_disjoint(&self, other: &ByteSet) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| a & b == 0)
    }

    pub fn complement(&self) -> ByteSet {
        ByteSet(self.0.map(|w| !w))
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&b| self.contains(b))
    }
}

impl fmt::Debug for ByteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for b in self.iter() {
            write!(f, "{}", std::ascii::escape_default(b))?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Empty,
    Class(ByteSet),
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Repeat {
        node: Box<Ast>,
        min: u32,
        max: Option<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: usize,
    pub reason: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.pos, self.reason)
    }
}

/// A parsed pattern plus whether it spelled out a newline anywhere.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub ast: Ast,
    pub mentions_newline: bool,
}

pub fn parse(pattern: &[u8]) -> Result<Parsed, SyntaxError> {
    let mut p = Parser {
        src: pattern,
        pos: 0,
        depth: 0,
        mentions_newline: false,
    };
    let ast = p.alternation()?;
    if p.pos < p.src.len() {
        // only an unmatched ')' stops the top-level alternation early
        return Err(p.error("unmatched ')'"));
    }
    Ok(Parsed {
        ast,
        mentions_newline: p.mentions_newline,
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
    mentions_newline: bool,
}

impl Parser<'_> {
    fn error(&self, reason: &str) -> SyntaxError {
        SyntaxError {
            pos: self.pos,
            reason: reason.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn alternation(&mut self) -> Result<Ast, SyntaxError> {
        let mut branches = vec![self.concat()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Ast::Alt(branches)
        })
    }

    fn concat(&mut self) -> Result<Ast, SyntaxError> {
        let mut items = Vec::new();
        while let Some(b) = self.peek() {
            match b {
                b'|' => break,
                b')' if self.depth > 0 => break,
                b')' => return Err(self.error("unmatched ')'")),
                _ => items.push(self.repeat()?),
            }
        }
        Ok(match items.len() {
            0 => Ast::Empty,
            1 => items.pop().unwrap(),
            _ => Ast::Concat(items),
        })
    }

    fn repeat(&mut self) -> Result<Ast, SyntaxError> {
        let mut node = self.atom()?;
        loop {
            let (min, max) = match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    (0, None)
                }
                Some(b'+') => {
                    self.pos += 1;
                    (1, None)
                }
                Some(b'?') => {
                    self.pos += 1;
                    (0, Some(1))
                }
                Some(b'{') => self.bounds()?,
                _ => return Ok(node),
            };
            node = Ast::Repeat {
                node: Box::new(node),
                min,
                max,
            };
        }
    }

    fn number(&mut self) -> Result<Option<u32>, SyntaxError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match digits.parse::<u32>() {
            Ok(n) if n <= MAX_REPEAT => Ok(Some(n)),
            _ => Err(SyntaxError {
                pos: start,
                reason: "repetition count too large".into(),
            }),
        }
    }

    fn bounds(&mut self) -> Result<(u32, Option<u32>), SyntaxError> {
        let open = self.pos;
        self.pos += 1;
        let bad = |_| SyntaxError {
            pos: open,
            reason: "invalid repetition".into(),
        };
        let min = self.number()?.ok_or(()).map_err(bad)?;
        let max = match self.bump() {
            Some(b'}') => return Ok((min, Some(min))),
            Some(b',') => self.number()?,
            _ => return Err(bad(())),
        };
        if self.bump() != Some(b'}') {
            return Err(bad(()));
        }
        if max.is_some_and(|m| m < min) {
            return Err(SyntaxError {
                pos: open,
                reason: "repetition bounds out of order".into(),
            });
        }
        Ok((min, max))
    }

    fn atom(&mut self) -> Result<Ast, SyntaxError> {
        let b = self.peek().ok_or_else(|| self.error("unexpected end"))?;
        match b {
            b'(' => {
                self.pos += 1;
                self.depth += 1;
                let inner = self.alternation()?;
                if self.bump() != Some(b')') {
                    return Err(self.error("missing ')'"));
                }
                self.depth -= 1;
                Ok(inner)
            }
            b'[' => self.class(),
            b'.' => {
                self.pos += 1;
                let mut set = ByteSet::full();
                set.remove(b'\n');
                Ok(Ast::Class(set))
            }
            b'*' | b'+' | b'?' => Err(self.error("nothing to repeat")),
            b'{' => Err(self.error("nothing to repeat")),
            b'\\' => {
                let b = self.escape()?;
                Ok(Ast::Class(self.literal(b)))
            }
            _ => {
                self.pos += 1;
                Ok(Ast::Class(self.literal(b)))
            }
        }
    }

    fn literal(&mut self, b: u8) -> ByteSet {
        if b == b'\n' {
            self.mentions_newline = true;
        }
        ByteSet::single(b)
    }

    /// Consumes a backslash escape and returns the byte it denotes.
    fn escape(&mut self) -> Result<u8, SyntaxError> {
        let start = self.pos;
        self.pos += 1;
        let b = self.bump().ok_or_else(|| SyntaxError {
            pos: start,
            reason: "trailing backslash".into(),
        })?;
        Ok(match b {
            b'n' => b'\n',
            b't' => b'\t',
            b'r' => b'\r',
            b'x' => {
                let hex = self
                    .src
                    .get(self.pos..self.pos + 2)
                    .and_then(|h| std::str::from_utf8(h).ok())
                    .and_then(|h| u8::from_str_radix(h, 16).ok())
                    .ok_or(SyntaxError {
                        pos: start,
                        reason: "invalid hex escape".into(),
                    })?;
                self.pos += 2;
                hex
            }
            b if b.is_ascii_alphanumeric() => {
                return Err(SyntaxError {
                    pos: start,
                    reason: format!("unknown escape '\\{}'", b as char),
                })
            }
            b => b,
        })
    }

    fn class_byte(&mut self) -> Result<u8, SyntaxError> {
        match self.peek() {
            None => Err(self.error("missing ']'")),
            Some(b'\\') => self.escape(),
            Some(b) => {
                self.pos += 1;
                Ok(b)
            }
        }
    }

    fn class(&mut self) -> Result<Ast, SyntaxError> {
        let open = self.pos;
        self.pos += 1;
        let negated = self.peek() == Some(b'^');
        if negated {
            self.pos += 1;
        }
        let mut set = ByteSet::empty();
        let mut first = true;
        loop {
            match self.peek() {
                None => {
                    return Err(SyntaxError {
                        pos: open,
                        reason: "missing ']'".into(),
                    })
                }
                Some(b']') if !first => {
                    self.pos += 1;
                    break;
                }
                _ => {}
            }
            first = false;
            let lo = self.class_byte()?;
            let is_range =
                self.peek() == Some(b'-') && self.src.get(self.pos + 1).is_some_and(|&b| b != b']');
            if is_range {
                self.pos += 1;
                let hi = self.class_byte()?;
                if hi < lo {
                    return Err(self.error("class range out of order"));
                }
                set = set.union(&ByteSet::range(lo, hi));
            } else {
                set.insert(lo);
            }
        }
        if negated {
            set = set.complement();
            set.remove(b'\n');
        } else if set.contains(b'\n') {
            self.mentions_newline = true;
        }
        Ok(Ast::Class(set))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(b: u8) -> Ast {
        Ast::Class(ByteSet::single(b))
    }

    #[test]
    fn alternation_of_literals() {
        let p = parse(b"ab|ba").unwrap();
        assert_eq!(
            p.ast,
            Ast::Alt(vec![
                Ast::Concat(vec![lit(b'a'), lit(b'b')]),
                Ast::Concat(vec![lit(b'b'), lit(b'a')]),
            ])
        );
        assert!(!p.mentions_newline);
    }

    #[test]
    fn repetitions() {
        let p = parse(b"a{2,3}b{4}c{1,}").unwrap();
        let Ast::Concat(items) = p.ast else { panic!() };
        assert!(matches!(
            items[0],
            Ast::Repeat {
                min: 2,
                max: Some(3),
                ..
            }
        ));
        assert!(matches!(
            items[1],
            Ast::Repeat {
                min: 4,
                max: Some(4),
                ..
            }
        ));
        assert!(matches!(
            items[2],
            Ast::Repeat {
                min: 1,
                max: None,
                ..
            }
        ));
    }

    #[test]
    fn classes() {
        let Ast::Class(set) = parse(b"[a-c_]").unwrap().ast else {
            panic!()
        };
        assert_eq!(set.len(), 4);
        let Ast::Class(set) = parse(b"[^a]").unwrap().ast else {
            panic!()
        };
        assert_eq!(set.len(), 254);
        assert!(!set.contains(b'\n'));
        let Ast::Class(set) = parse(b"[]a]").unwrap().ast else {
            panic!()
        };
        assert!(set.contains(b']') && set.contains(b'a'));
        let Ast::Class(set) = parse(b"[a-]").unwrap().ast else {
            panic!()
        };
        assert!(set.contains(b'-'));
        let Ast::Class(set) = parse(b".").unwrap().ast else {
            panic!()
        };
        assert_eq!(set.len(), 255);
    }

    #[test]
    fn anchors_are_literals() {
        assert_eq!(parse(b"^").unwrap().ast, lit(b'^'));
        assert_eq!(parse(b"$").unwrap().ast, lit(b'$'));
    }

    #[test]
    fn escapes() {
        assert_eq!(parse(br"\*").unwrap().ast, lit(b'*'));
        assert_eq!(parse(br"\x41").unwrap().ast, lit(b'A'));
        assert!(parse(br"\n").unwrap().mentions_newline);
        assert!(parse(b"[\n]").unwrap().mentions_newline);
        assert!(!parse(b"[^\n]").unwrap().mentions_newline);
    }

    #[test]
    fn syntax_errors() {
        for (pat, pos) in [
            (&b"ab("[..], 3),
            (b"a)", 1),
            (b"*a", 0),
            (b"a{", 1),
            (b"a{3,1}", 1),
            (b"[ab", 0),
            (b"\\", 0),
            (br"\q", 0),
            (b"a{1001}", 2),
        ] {
            let err = parse(pat).unwrap_err();
            assert_eq!(err.pos, pos, "{:?}: {err}", String::from_utf8_lossy(pat));
        }
    }

    #[test]
    fn empty_branches() {
        assert_eq!(parse(b"").unwrap().ast, Ast::Empty);
        assert_eq!(
            parse(b"a|").unwrap().ast,
            Ast::Alt(vec![lit(b'a'), Ast::Empty])
        );
        assert_eq!(parse(b"()").unwrap().ast, Ast::Empty);
    }
}
