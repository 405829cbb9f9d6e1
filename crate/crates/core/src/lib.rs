//! Compiler for decomposable combinatorial class specifications.
//!
//! A specification is a system of mutually recursive class definitions built
//! from `Epsilon`, `Atom`, `Union`, `Prod`, `Seq`, `MSet`, `PSet` and `Cycle`.
//! From an accepted system this crate derives exact counts, canonical
//! enumeration, ranking and unranking, uniform random generation and
//! recurrence guessing.
//!
//! ```
//! use specc::{parse_system, count, Mode};
//!
//! let sys = parse_system("T = Prod(Atom, Seq(T))", None, Mode::Unlabeled).unwrap().system;
//! assert_eq!(count(&sys, "T", 6).unwrap(), 42u32.into());
//! ```

pub mod analyzer;
pub mod cli;
pub mod counter;
pub mod dsl;
pub mod enumerator;
pub mod error;
pub mod grammar;
pub mod recurrence;
pub mod term;

pub use analyzer::{check_well_founded, compute_valuation, AnalysisReport, Diagnostic, DiagnosticKind, Level, Valuation};
pub use counter::{count, count_labeled, series, to_u64_series, CollectionSite, Counter, LabeledCounter, DEFAULT_TABLE_LIMIT_MB};
pub use dsl::{parse_system, render_expr, render_system, Parsed, Severity, SourceDiagnostic};
pub use enumerator::{list, random, rank, unrank, Enumerator, RANDOM_ENGINE_VERSION};
pub use error::{Error, Result, ValidationIssue};
pub use grammar::{build_system, member_of, size_of, CollectionKind, Expr, Mode, Restriction, SpecSystem, Structure};

pub use recurrence::{guess_recurrence, recurrence_for, verify, Recurrence};
pub use term::{from_json, to_json};
