//! Sector lengths of multi-qubit quantum states.
//!
//! The crate computes the sector lengths `A_k` (sums of squared Pauli
//! expectation values of weight `k`) of dense density matrices, translates
//! them into linear-entropy coordinates, and derives upper bounds on them with
//! an exact rational simplex over the MacWilliams identities and the shadow
//! inequalities. It also ships the complete two- and three-qubit sector
//! polytopes and numerical checks for the constructions used to establish
//! them (anticommuting sets, the partial-inversion Choi matrix and its
//! projector representation).

pub mod combinatorics;
pub mod entanglement;
pub mod error;
pub mod hull;
pub mod identities;
pub mod linalg;
pub mod lp;
pub mod pauli;
pub mod polytope;
pub mod proofs;
pub mod report;
pub mod rng;
pub mod sectors;
pub mod sssa;
pub mod state;
pub mod zoo;

pub use error::{Error, Result};
pub use identities::{FormKind, LinearForm};
pub use lp::{Assumption, BoundCertificate, LinearProgram, LpOutcome};
pub use pauli::{Pauli, PauliString};
pub use report::{CheckResult, VerificationReport};
pub use sectors::{EntropyVector, MutualVector, SectorVector};
pub use state::{BlochCoefficients, DensityMatrix};
pub use zoo::{StateKind, StateRecipe};
