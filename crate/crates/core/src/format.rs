//! The ZSLP container.
//!
//! ```text
//! "ZSLP"  version:u8  p:varint  (first:varint second:varint){p}  n:varint  axiom:varint{n}
//! ```
//!
//! Varints are unsigned LEB128. Rules precede the axiom and appear in
//! definition order, so a reader can hand them to the search engine one at a
//! time without buffering the grammar.

use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

use crate::slp::{Rule, Slp, SlpError, SymbolId, TERMINALS};

pub const MAGIC: &[u8; 4] = b"ZSLP";
pub const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated stream")]
    Truncated,
    #[error("varint overflow")]
    Overflow,
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("trailing data after axiom")]
    TrailingData,
    #[error(transparent)]
    Io(io::Error),
}

impl FormatError {
    fn from_io(err: io::Error) -> Self {
        if err.kind() == io::ErrorKind::UnexpectedEof {
            FormatError::Truncated
        } else {
            FormatError::Io(err)
        }
    }
}

impl From<SlpError> for FormatError {
    fn from(err: SlpError) -> Self {
        FormatError::Invariant(err.to_string())
    }
}

fn read_varint<R: Read>(reader: &mut R) -> Result<u64, FormatError> {
    leb128::read::unsigned(reader).map_err(|e| match e {
        leb128::read::Error::IoError(io) => FormatError::from_io(io),
        leb128::read::Error::Overflow => FormatError::Overflow,
    })
}

fn read_symbol<R: Read>(reader: &mut R) -> Result<SymbolId, FormatError> {
    let v = read_varint(reader)?;
    u32::try_from(v)
        .map(SymbolId)
        .map_err(|_| FormatError::Invariant(format!("symbol {v} out of range")))
}

/// Writes `slp` in ZSLP form. The grammar must be valid.
pub fn write_slp<W: Write>(slp: &Slp, mut writer: W) -> Result<(), FormatError> {
    slp.check()?;
    writer.write_all(MAGIC).map_err(FormatError::Io)?;
    writer.write_all(&[VERSION]).map_err(FormatError::Io)?;
    let mut put = |v: u64| leb128::write::unsigned(&mut writer, v).map(|_| ());
    put(slp.rules.len() as u64).map_err(FormatError::Io)?;
    for rule in &slp.rules {
        put(rule.first.0 as u64).map_err(FormatError::Io)?;
        put(rule.second.0 as u64).map_err(FormatError::Io)?;
    }
    put(slp.axiom.len() as u64).map_err(FormatError::Io)?;
    for sym in &slp.axiom {
        put(sym.0 as u64).map_err(FormatError::Io)?;
    }
    Ok(())
}

pub fn encode_slp(slp: &Slp) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::new();
    write_slp(slp, &mut out)?;
    Ok(out)
}

pub fn decode_slp(bytes: &[u8]) -> Result<Slp, FormatError> {
    read_slp(bytes)
}

/// Reads a complete grammar, rejecting trailing bytes.
pub fn read_slp<R: BufRead>(reader: R) -> Result<Slp, FormatError> {
    let mut reader = SlpReader::new(reader)?;
    let mut rules = Vec::with_capacity(reader.rule_count().min(1 << 20));
    while let Some(rule) = reader.next_rule()? {
        rules.push(rule);
    }
    let axiom = reader.read_axiom()?;
    Ok(Slp { rules, axiom })
}

/// Incremental ZSLP reader: rules are yielded in order, then the axiom.
pub struct SlpReader<R> {
    inner: R,
    rule_count: usize,
    next_rule: usize,
}

impl<R: BufRead> SlpReader<R> {
    pub fn new(mut inner: R) -> Result<Self, FormatError> {
        // a wrong byte is reported before a short read
        for &expected in MAGIC.iter() {
            let mut byte = [0u8; 1];
            inner.read_exact(&mut byte).map_err(FormatError::from_io)?;
            if byte[0] != expected {
                return Err(FormatError::BadMagic);
            }
        }
        let mut version = [0u8; 1];
        inner
            .read_exact(&mut version)
            .map_err(FormatError::from_io)?;
        if version[0] != VERSION {
            return Err(FormatError::UnsupportedVersion(version[0]));
        }
        let p = read_varint(&mut inner)?;
        let rule_count = usize::try_from(p)
            .ok()
            .filter(|&p| p <= (u32::MAX - TERMINALS) as usize)
            .ok_or_else(|| FormatError::Invariant(format!("rule count {p} out of range")))?;
        Ok(SlpReader {
            inner,
            rule_count,
            next_rule: 0,
        })
    }

    pub fn rule_count(&self) -> usize {
        self.rule_count
    }

    /// The next rule, or `None` once all rules have been read.
    pub fn next_rule(&mut self) -> Result<Option<Rule>, FormatError> {
        if self.next_rule == self.rule_count {
            return Ok(None);
        }
        let left = SymbolId::variable(self.next_rule);
        let first = read_symbol(&mut self.inner)?;
        let second = read_symbol(&mut self.inner)?;
        for sym in [first, second] {
            if sym >= left {
                return Err(FormatError::Invariant(format!(
                    "rule {} references undefined/later symbol {sym}",
                    self.next_rule + 1
                )));
            }
        }
        self.next_rule += 1;
        Ok(Some(Rule::new(left, first, second)))
    }

    /// Reads the axiom. Any rules not yet consumed are an error.
    pub fn read_axiom(mut self) -> Result<Vec<SymbolId>, FormatError> {
        if self.next_rule != self.rule_count {
            return Err(FormatError::Invariant(
                "axiom requested before all rules were read".into(),
            ));
        }
        let len = read_varint(&mut self.inner)?;
        if len == 0 {
            return Err(FormatError::Invariant("empty axiom".into()));
        }
        let limit = SymbolId::variable(self.rule_count);
        let mut axiom = Vec::with_capacity((len as usize).min(1 << 20));
        for _ in 0..len {
            let sym = read_symbol(&mut self.inner)?;
            if sym >= limit {
                return Err(FormatError::Invariant(format!(
                    "axiom references undefined symbol {sym}"
                )));
            }
            axiom.push(sym);
        }
        let at_end = self.inner.fill_buf().map_err(FormatError::Io)?.is_empty();
        if !at_end {
            return Err(FormatError::TrailingData);
        }
        Ok(axiom)
    }
}
