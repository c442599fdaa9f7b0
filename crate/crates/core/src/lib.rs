//! Quantum measures on finite history spaces.
//!
//! The pipeline runs from a system (initial state, unitaries, projector
//! families) or an amplitude table to a [`DecoherenceMatrix`], then to the
//! precluded events of the quantum measure, the coevents they leave as
//! potential realities, the finest classical partition, and predictions for
//! events declared in advance.
//!
//! ```
//! use coevent_core::{from_amplitudes, solve_coevents, AmplitudeTable, SampleSpace, C64};
//!
//! // three paths to one screen point, slits A/B and B/C interfering destructively
//! let space = SampleSpace::numbered(3).unwrap();
//! let amps = [1.0, -1.0, 1.0].map(|x| C64::new(x, 0.0)).to_vec();
//! let d = from_amplitudes(&AmplitudeTable::single_class(space.clone(), amps)).unwrap();
//! let r = solve_coevents(&d, 1e-9).unwrap();
//! let supports: Vec<_> = r.supports().map(|s| space.labels_of(s)).collect();
//! assert_eq!(supports, vec![vec!["h1", "h3"]]);
//! ```

pub mod classical;
pub mod coevent;
pub mod error;
pub mod event;
pub mod measure;
pub mod preclusion;
pub mod prediction;
pub mod random;
pub mod system;
pub mod valuation;

pub use classical::{
    is_classical_partition, is_consistent_partition, is_consistent_partition_with, principle_classical_partition,
    verify_finest, ClassicalityReport, Consistency, Placement,
};
pub use coevent::{
    brute_force_coevents, coevent_sets_disjoint, coevents_from_family, is_non_preclusive, solve_coevents, Coevent,
    CoeventSet,
};
pub use error::{Error, Result};
pub use event::{coarse_grained_algebra, is_partition, Event, Partition, SampleSpace, DEFAULT_ENUMERATION_CAP};
pub use measure::{
    decoherence_matrix, from_amplitudes, from_singletons_and_pairs, is_classical, reconstruct_measure,
    sum_rule_residual, AmplitudeTable, DecoherenceMatrix, QuantumMeasure, DEFAULT_PRECLUSION_EPSILON,
};
pub use preclusion::{enumerate_precluded, find_zero_cover, singleton_covered, PrecludedFamily, ZeroCover};
pub use prediction::{
    approximately_precluded, cournot_report, frequency_deviation_event, frequency_deviation_measure,
    product_system, CournotReport, DeclaredEvent, PredictionConfig, ProductMeasure, ProductSpace,
    DEFAULT_COURNOT_EPSILON, REPORT_NOTE,
};
pub use system::{
    amplitude, class_operator, induced_sample_space, validate_system, CMatrix, CVector, HistoriesSystem, History,
    InitialState, Outcome, TimeStep, ValidationReport, DEFAULT_VALIDATION_TOLERANCE, C64,
};
pub use valuation::{
    answer, check_inference, characterize_multiplicative, dominates, evaluate, is_additive, is_multiplicative,
    is_preclusive, is_primitive, primitive_preclusive_valuations, Answer, InferenceCheck, TruthTable, Valuation,
};
