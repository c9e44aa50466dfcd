//! Quantum topological invariants of 3-manifolds presented by framed links.
//!
//! Every invariant computed here reduces to a quadratic exponential sum over
//! the linking matrix of a surgery link:
//!
//! * the Abelian Chern-Simons invariant `tau_A`, a product of Gauss sums once
//!   the linking matrix is diagonalized modulo `k = p^e`,
//! * the SU(2) Reshetikhin-Turaev invariant at level `k = 3`, a Gaussian sum
//!   over `{1, 2}^m` with a signature correction,
//! * the `Z_k` Dijkgraaf-Witten invariant.
//!
//! The [`qsim`] module simulates, on a dense qudit statevector, the quantum
//! procedure that encodes the phase of a Gauss sum into a Legendre-symbol
//! state and estimates it by sampling.
//!
//! Floating-point code is generic over [`Scalar`] (`f32` or `f64`); exact
//! linear algebra uses integers, `BigInt` and `BigRational`. The aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI uses.

// index loops mirror the matrix algebra they implement
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod invariants;
pub mod linkalg;
pub mod linkgeom;
pub mod numtheory;
pub mod qsim;
pub mod scalar;
pub mod schema;
pub mod summation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use invariants::{
    check_kirby_invariance, multivariate_gauss_sum, tau_abelian, tau_dw, tau_su2_k3, DwRange,
    Guard, InvariantKind, InvariantResult, KirbyReport, Method, PhaseScale, SumRange,
};
pub use linkalg::{
    diagonalize_mod_k, signature, DiagonalizationResult, FramedLinkMatrix, KirbyMove, Sign,
};
pub use linkgeom::{linking_matrix, linking_number, self_linking, ClosedCurve, FramedCurve, PolyLink, Vec3};
pub use numtheory::{
    discrete_log, gauss_sum_brute, gauss_sum_closed, kirby_phase, legendre_chi, primitive_root,
    Character, GaussValue, ModK,
};
pub use qsim::{gauss_phase_encode, phase_estimate, prepare_legendre_state, qft_mod_k, PhaseEstimate, StateVector};

/// Double-precision Gauss sum / invariant value.
pub type GaussValue64 = GaussValue<f64>;
/// Single-precision Gauss sum / invariant value.
pub type GaussValue32 = GaussValue<f32>;
/// Double-precision invariant result.
pub type InvariantResult64 = InvariantResult<f64>;
/// Double-precision polygonal link.
pub type PolyLink64 = PolyLink<f64>;
/// Double-precision closed polygonal curve.
pub type ClosedCurve64 = ClosedCurve<f64>;
/// Double-precision qudit statevector.
pub type StateVector64 = StateVector<f64>;
/// Double-precision phase estimate.
pub type PhaseEstimate64 = PhaseEstimate<f64>;
