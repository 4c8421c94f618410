//! Analogical modeling over a supracontext lattice.
//!
//! The engine reads occurrences one at a time and applies the same
//! operator sequence to every one of the `2^n` supracontexts of a given
//! context, tracking per supracontext the occurrence count, first and
//! plurality registers for outcome and intersect, heterogeneity and
//! amplitude. Prediction then counts pointers (amplitude squared) over the
//! occurring homogeneous supracontexts, with exact rational results.
//!
//! ```
//! use qam_core::{analyze, fixtures, rational::ratio, EngineConfig};
//!
//! let a = analyze(&fixtures::dataset_312(), &fixtures::given_312(), &EngineConfig::default()).unwrap();
//! assert_eq!(a.distribution.get_str("e"), ratio(4, 13));
//! assert_eq!(a.distribution.get_str("r"), ratio(9, 13));
//! ```

pub mod bitmask;
pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod natstat;
pub mod oracle;
pub mod predict;
pub mod rational;
pub mod revgate;

pub use bitmask::BitMask;
pub use dataset::{
    compute_intersect, enumerate_supracontexts, ensure_valid, mask_includes, validate, Dataset,
    EngineConfig, GivenContext, Occurrence, Outcome, LATTICE_MAX_VARS,
};
pub use error::{Error, Result, Violation};
pub use lattice::{
    apply_contain, derive_include, evaluate, init_lattice, read_occurrence, reverse_contain,
    trace, Cell, LatticeState, OutcomeId, TraceSnapshot,
};
pub use oracle::{classify_by_disagreement, classify_direct, cross_check, Classification, CrossCheckReport};
pub use predict::{
    agreement, analyze, build_analogical_set, disagreement, outcome_distribution, pointer_table,
    select_pointer, wave_report, Analysis, AnalogicalSet, Distribution, PointerTable, Prediction,
    WaveReport,
};
pub use rational::Rational;
