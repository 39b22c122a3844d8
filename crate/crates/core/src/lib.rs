//! Bounds on the error probability of telling an uncorrelated two-mode thermal
//! state apart from the maximally correlated separable Gaussian state with the
//! same local energy.
//!
//! Two detectors are compared:
//!
//! * a global (coherent) detector acting jointly on both modes, bounded above by
//!   the quantum Chernoff bound and below by the Bhattacharyya bound
//!   ([`chernoff`]);
//! * a local detector that measures mode B with a Gaussian POVM and then
//!   discriminates the conditional states of mode A, bounded above by the
//!   averaged Chernoff bound and below by the averaged fidelity bound
//!   ([`local`]).
//!
//! [`asymptotics`] turns the single-copy overlaps into multi-copy error
//! exponents, [`correlations`] provides the entropic quantities that label the
//! states, and [`fock`] is a brute-force truncated Fock-space oracle used to
//! validate the closed forms.
//!
//! Covariance matrices use the convention in which the vacuum has the identity
//! covariance matrix, and quadratures are ordered `(x_A, p_A, x_B, p_B)`.

pub mod asymptotics;
pub mod chernoff;
pub mod correlations;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod local;
pub mod numeric;
pub mod report;

pub use error::{Error, Result};
