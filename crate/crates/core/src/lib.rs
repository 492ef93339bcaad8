//! Entropic temporal Bell inequality for unstructured search.
//!
//! A deterministic classical search that finds one marked item among `2^n`
//! must accumulate `n` bits in its oracle answers `A_1, ..., A_L`, and the
//! chain rule then forces
//!
//! ```text
//! n <= H(A_L | A_{L-1}) + ... + H(A_1 | A_0)
//! ```
//!
//! Grover's search with the oracle output kept in its own qubit, measured
//! only at two successive iterations per run, violates this bound once
//! `L ~ sqrt(2^n)`.
//!
//! * [`entropy`]: Shannon, joint and conditional entropies over validated tables.
//! * [`classical`]: query schedules and exact output distributions by enumeration.
//! * [`qsim`]: the measured Grover iteration on a 4-amplitude subspace engine
//!   and a dense state-vector engine.
//! * [`experiment`]: measured pairs (closed form, branch enumeration, Monte-Carlo),
//!   inequality reports and sweeps.
//! * [`report`]: CSV/JSON report files.
//! * [`validate`] and [`cli`]: the self-check suites and the `tbell` command line.
//!
//! ```
//! use temporal_bell::experiment::{quantum_rhs_sum, ExperimentConfig};
//!
//! let rhs = quantum_rhs_sum(&ExperimentConfig::new(10, 32)).unwrap();
//! assert!(rhs < 10.0);
//! ```

pub mod classical;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod qsim;
pub mod report;
pub mod validate;

pub use classical::{OracleSpec, QuerySchedule};
pub use entropy::{FullJoint, PairJoint, ProbDist};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, InequalityReport, Method, PairDistribution, Variant};
pub use qsim::{FullStateVector, GroverEngine, GroverParams, SubspaceState};
