//! Straight-line programs with multi-symbol axioms.
//!
//! Symbols `0..=255` are terminal bytes. Symbol `256 + k` is the variable
//! defined by the `k`-th rule (zero based), so the symbol table used by the
//! search engine is directly index-addressable.

use std::fmt;

use thiserror::Error;

/// Number of terminal symbols (one per byte value).
pub const TERMINALS: u32 = 256;

/// A terminal byte or a grammar variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub const fn terminal(byte: u8) -> Self {
        SymbolId(byte as u32)
    }

    /// The variable defined by rule `index` (zero based).
    pub const fn variable(index: usize) -> Self {
        SymbolId(TERMINALS + index as u32)
    }

    pub fn is_terminal(self) -> bool {
        self.0 < TERMINALS
    }

    /// The byte of a terminal symbol.
    pub fn as_byte(self) -> Option<u8> {
        u8::try_from(self.0).ok()
    }

    /// Zero-based rule index of a variable.
    pub fn rule_index(self) -> Option<usize> {
        self.0.checked_sub(TERMINALS).map(|i| i as usize)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A binary rule `left -> first second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub left: SymbolId,
    pub first: SymbolId,
    pub second: SymbolId,
}

impl Rule {
    pub fn new(left: SymbolId, first: SymbolId, second: SymbolId) -> Self {
        Rule {
            left,
            first,
            second,
        }
    }
}

/// A straight-line program: ordered binary rules plus the axiom sequence.
///
/// Fields are public so that malformed grammars can be represented and
/// reported by [`Slp::validate`]; every consumer validates before use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Slp {
    pub rules: Vec<Rule>,
    pub axiom: Vec<SymbolId>,
}

/// What is wrong with one part of a grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Rule `i` does not define symbol `255 + i`.
    NonDenseLeft {
        expected: SymbolId,
        found: SymbolId,
    },
    /// A right-hand side references a symbol that is not defined before the rule.
    ForwardReference(SymbolId),
    /// The axiom references an undefined symbol.
    UndefinedInAxiom(SymbolId),
    EmptyAxiom,
}

/// A single invariant violation. `rule` is one based, `None` for the axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, self.rule) {
            (ViolationKind::NonDenseLeft { expected, found }, Some(r)) => {
                write!(f, "rule {r} defines symbol {found}, expected {expected}")
            }
            (ViolationKind::ForwardReference(sym), Some(r)) => {
                write!(f, "rule {r} references undefined/later symbol {sym}")
            }
            (ViolationKind::UndefinedInAxiom(sym), _) => {
                write!(f, "axiom references undefined symbol {sym}")
            }
            (ViolationKind::EmptyAxiom, _) => write!(f, "empty axiom"),
            (kind, None) => write!(f, "{kind:?}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlpError {
    #[error("invalid grammar: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("undefined symbol {0}")]
    UndefinedSymbol(SymbolId),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Slp {
    pub fn new(rules: Vec<Rule>, axiom: Vec<SymbolId>) -> Self {
        Slp { rules, axiom }
    }

    /// Builds a grammar from `(first, second)` pairs, numbering the rules densely.
    pub fn from_pairs(pairs: &[(u32, u32)], axiom: &[u32]) -> Self {
        let rules = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Rule::new(SymbolId::variable(i), SymbolId(a), SymbolId(b)))
            .collect();
        Slp {
            rules,
            axiom: axiom.iter().map(|&s| SymbolId(s)).collect(),
        }
    }

    /// Number of symbols in the symbol table (terminals plus variables).
    pub fn symbol_count(&self) -> usize {
        TERMINALS as usize + self.rules.len()
    }

    pub fn is_defined(&self, sym: SymbolId) -> bool {
        sym.index() < self.symbol_count()
    }

    pub fn rule(&self, sym: SymbolId) -> Option<&Rule> {
        sym.rule_index().and_then(|i| self.rules.get(i))
    }

    /// Checks every structural invariant, collecting all violations.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            let expected = SymbolId::variable(i);
            if rule.left != expected {
                violations.push(Violation {
                    rule: Some(i + 1),
                    kind: ViolationKind::NonDenseLeft {
                        expected,
                        found: rule.left,
                    },
                });
            }
            for sym in [rule.first, rule.second] {
                if sym >= expected {
                    violations.push(Violation {
                        rule: Some(i + 1),
                        kind: ViolationKind::ForwardReference(sym),
                    });
                }
            }
        }
        if self.axiom.is_empty() {
            violations.push(Violation {
                rule: None,
                kind: ViolationKind::EmptyAxiom,
            });
        }
        for &sym in &self.axiom {
            if !self.is_defined(sym) {
                violations.push(Violation {
                    rule: None,
                    kind: ViolationKind::UndefinedInAxiom(sym),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn check(&self) -> Result<(), SlpError> {
        self.validate().map_err(SlpError::Invalid)
    }

    /// Appends the expansion of `sym` to `out`.
    ///
    /// Assumes the rules are well ordered; use [`Slp::expand_symbol`] for a
    /// checked entry point.
    pub fn expand_into(&self, sym: SymbolId, out: &mut Vec<u8>) -> Result<(), SlpError> {
        let mut stack = vec![sym];
        while let Some(top) = stack.pop() {
            match top.as_byte() {
                Some(b) => out.push(b),
                None => {
                    let rule = self.rule(top).ok_or(SlpError::UndefinedSymbol(top))?;
                    if rule.first >= top || rule.second >= top {
                        return Err(SlpError::UndefinedSymbol(rule.first.max(rule.second)));
                    }
                    stack.push(rule.second);
                    stack.push(rule.first);
                }
            }
        }
        Ok(())
    }

    /// The unique byte string derived from `sym`.
    pub fn expand_symbol(&self, sym: SymbolId) -> Result<Vec<u8>, SlpError> {
        if !self.is_defined(sym) {
            return Err(SlpError::UndefinedSymbol(sym));
        }
        let mut out = Vec::new();
        self.expand_into(sym, &mut out)?;
        Ok(out)
    }

    /// Full decompression: the axiom symbols expanded left to right.
    pub fn expand(&self) -> Result<Vec<u8>, SlpError> {
        self.check()?;
        let mut out = Vec::new();
        for &sym in &self.axiom {
            self.expand_into(sym, &mut out)?;
        }
        Ok(out)
    }

    /// Length of every symbol's expansion, indexed by symbol id.
    pub fn expansion_lengths(&self) -> Vec<u64> {
        let mut lens = vec![1u64; self.symbol_count()];
        for rule in &self.rules {
            lens[rule.left.index()] =
                lens[rule.first.index()].saturating_add(lens[rule.second.index()]);
        }
        lens
    }
}

/// The grammar used throughout the tests: it derives `"ba\nab\naba"` with
/// `X3 => "ba\na"` and `X7 => "b\naba"`.
pub fn example_grammar() -> Slp {
    let (a, b, nl) = (b'a' as u32, b'b' as u32, b'\n' as u32);
    let x = |i: u32| TERMINALS + i - 1;
    Slp::from_pairs(
        &[
            (b, a),       // X1 -> b a
            (nl, a),      // X2 -> \n a
            (x(1), x(2)), // X3 -> X1 X2
            (b, nl),      // X4 -> b \n
            (a, b),       // X5 -> a b
            (x(5), a),    // X6 -> X5 a
            (x(4), x(6)), // X7 -> X4 X6
        ],
        &[x(3), x(7)],
    )
}
