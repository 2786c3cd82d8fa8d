//! Finite-dimensional quantum mechanics in two formulations.
//!
//! States can be unit vectors up to phase ([`states::UnitState`]) or nonzero
//! vectors up to any complex scale ([`states::RawState`]). Both give the same
//! measurement statistics under unitary evolution. Relaxing evolution to any
//! invertible linear map separates them: on unit vectors manual
//! renormalization is nonlinear, and on raw vectors it lets a local gate on
//! one half of an entangled pair change the statistics of the other half.
//!
//! Modules:
//!
//! * [`linalg`]: dense complex arithmetic, Hermitian eigensolver, operator
//!   classification.
//! * [`states`]: representations, canonical rays, equivalence predicates.
//! * [`measurement`]: observables, Born rules, collapse, seeded sampling.
//! * [`evolution`]: unitary, general-linear and manual-norm engines, and the
//!   unitarity laboratory.
//! * [`composite`]: tensor products, local embedding, partial trace.
//! * [`signaling`]: the Bell-pair signaling protocol and its unitary control.
//! * [`cli`]: the `qaxioms` command-line front end.

pub mod cli;
pub mod composite;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod measurement;
pub mod random;
pub mod signaling;
pub mod states;

pub use error::{Error, Result};
pub use evolution::{
    evolve_linear_b, evolve_manual_norm_a, evolve_unitary, linearity_defect, theorem1_lab, EvolutionOperator,
    TheoremReport,
};
pub use linalg::{ComplexMatrix, ComplexScalar, ComplexVector, OperatorClass};
pub use measurement::{
    born_probabilities_a, born_probabilities_b, collapse, make_observable, sample_measurement, MeasurementRecord,
    Observable, OutcomeDistribution,
};
pub use states::{canonicalize, equivalent_a, equivalent_b, normalize, CanonicalRay, RawState, UnitState};
