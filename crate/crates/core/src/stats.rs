//! Operation-count instrumentation.
//!
//! For rule `X -> a b` the engine's work is bounded by
//! `|edges(b)| + s + Σ_{(q1,q') ∈ edges(a)} (1 + |N[q']|)`, and for the
//! `i`-th axiom symbol by the size of its edge list.

use serde::Serialize;

use crate::automaton::Fsa;
use crate::engine::{Engine, EngineOptions, InvariantReport};
use crate::slp::{Slp, SlpError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Percentiles {
    pub p50: u64,
    pub p75: u64,
    pub p95: u64,
    pub p98: u64,
    pub p100: u64,
}

impl Percentiles {
    /// Nearest-rank percentiles; an empty sequence reports zeros.
    pub fn of(values: &[u64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        Percentiles {
            p50: nearest_rank(&sorted, 50),
            p75: nearest_rank(&sorted, 75),
            p95: nearest_rank(&sorted, 95),
            p98: nearest_rank(&sorted, 98),
            p100: nearest_rank(&sorted, 100),
        }
    }
}

/// Nearest-rank percentile of an ascending slice.
pub fn nearest_rank(sorted: &[u64], pct: u32) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let n = sorted.len();
    let rank = (pct as usize * n).div_ceil(100).max(1);
    sorted[rank.min(n) - 1]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStats {
    /// States of the automaton the engine ran.
    pub s: usize,
    pub p: usize,
    pub axiom_len: usize,
    pub deterministic: bool,
    pub per_rule: Vec<u64>,
    pub per_axiom_symbol: Vec<u64>,
    pub rule_percentiles: Percentiles,
    pub axiom_percentiles: Percentiles,
    /// Operations the engine actually performed.
    pub measured_operations: u64,
    pub invariants: InvariantReport,
}

impl SearchStats {
    pub fn rule_bound_total(&self) -> u64 {
        self.per_rule.iter().sum()
    }

    pub fn axiom_bound_total(&self) -> u64 {
        self.per_axiom_symbol.iter().sum()
    }

    pub fn s_cubed(&self) -> u64 {
        (self.s as u64).pow(3)
    }

    pub fn s_squared(&self) -> u64 {
        (self.s as u64).pow(2)
    }
}

/// Runs the saturating engine with instrumentation enabled.
///
/// The engine runs even for patterns that accept the empty string, since
/// the counts describe the automaton's work rather than the answer.
pub fn collect_stats(slp: &Slp, fsa: &Fsa) -> Result<SearchStats, SlpError> {
    slp.check()?;
    let mut engine = Engine::new(
        fsa,
        EngineOptions {
            verify: true,
            record_costs: true,
        },
    );
    for rule in &slp.rules {
        engine.process_rule(rule);
    }
    engine.process_axiom(&slp.axiom);
    Ok(stats_of(&engine, slp.axiom.len()))
}

pub fn stats_of(engine: &Engine, axiom_len: usize) -> SearchStats {
    SearchStats {
        s: engine.automaton().state_count(),
        p: engine.rule_count(),
        axiom_len,
        deterministic: engine.automaton().is_deterministic(),
        per_rule: engine.rule_costs().to_vec(),
        per_axiom_symbol: engine.axiom_costs().to_vec(),
        rule_percentiles: Percentiles::of(engine.rule_costs()),
        axiom_percentiles: Percentiles::of(engine.axiom_costs()),
        measured_operations: engine.operations(),
        invariants: engine.invariant_report(),
    }
}
