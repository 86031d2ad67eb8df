//! Simulation laboratory for a (t,n) threshold d-level quantum secret
//! sharing protocol built on the quantum Fourier transform.
//!
//! The crate is organised in five layers:
//!
//! - [`field`] — exact modular arithmetic over Z_d for a prime d.
//! - [`shamir`] — classical (t,n) threshold sharing: polynomial sampling,
//!   share distribution, Lagrange coefficients and shadows.
//! - [`qudit`] — dense state-vector simulation of k qudits of dimension d
//!   with QFT, generalized Pauli operators and projective measurement.
//! - [`protocol`] — the full three-phase secret sharing protocol with decoy
//!   sequences, eavesdropping checks, hash verification and transcripts.
//! - [`adversary`] — attack models (intercept-resend, entangle-and-measure,
//!   dishonest participants) and the flawed predecessor scheme they are
//!   measured against.
//! - [`trials`] — a reproducible Monte Carlo runner with Wilson score
//!   confidence intervals.
//!
//! Every random draw flows from an explicit 64-bit seed, so any run, attack
//! batch or transcript can be reproduced bit-for-bit.

pub mod adversary;
pub mod field;
pub mod protocol;
pub mod qudit;
pub mod shamir;
pub mod transcript;
pub mod trials;

pub use field::{select_prime, FieldElement, PrimeModulus};
pub use protocol::{ProtocolConfig, ReconstructionResult};
pub use qudit::{BasisKind, BasisLabel, MeasurementOutcome, QuditState};
pub use shamir::{Polynomial, Shadow, Share};
pub use transcript::Transcript;
