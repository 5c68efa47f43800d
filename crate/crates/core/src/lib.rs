//! Regular-expression search over grammar-compressed text.
//!
//! Text is compressed into a straight-line program ([`Slp`]) whose rules are
//! binary and whose axiom is a sequence of symbols. A pattern is compiled to
//! an ε-free automaton ([`Fsa`]); the engine then derives, for every symbol
//! in rule order, the state pairs its expansion connects and a four-field
//! summary of how lines inside it match. The number of matching lines falls
//! out of the axiom without decompressing anything.
//!
//! ```
//! use slpgrep::{compile, compress, count_matching_lines};
//!
//! let slp = compress(b"ba\nab\naba").unwrap();
//! let fsa = compile("ab|ba").unwrap();
//! assert_eq!(count_matching_lines(&slp, &fsa).unwrap(), 3);
//! ```

pub mod automaton;
pub mod batch;
pub mod engine;
pub mod format;
pub mod oracle;
pub mod par;
pub mod repair;
pub mod report;
pub mod slp;
pub mod stats;

pub use automaton::{compile, nfa_accepts, Fsa, PatternError};
pub use batch::{count_many, count_many_sequential};
pub use engine::{contains_match, count_matching_lines, count_stream, CountInfo, Engine};
pub use format::{decode_slp, encode_slp, read_slp, write_slp, FormatError, SlpReader};
pub use repair::{compress, compression_report, CompressError, CompressionReport};
pub use report::{report_matching_lines, report_matching_lines_with, ReportError};
pub use slp::{Rule, Slp, SlpError, SymbolId};
pub use stats::{collect_stats, SearchStats};
