//! Sequential entanglement witnessing on a shared two-qubit state.
//!
//! One observer (Alice) keeps half of a Bell-diagonal two-qubit state while
//! a chain of independent observers (Bobs) measures the other half with
//! unsharp POVMs, each passing the disturbed qubit on. The crate models the
//! state algebra exactly in the Pauli picture, evaluates the standard
//! detection criteria (partial transpose, CHSH locality, witness
//! expectations), and iterates the per-Bob sharpness rule that keeps every
//! detection strict while the state stays CHSH-local throughout.
//!
//! Layout:
//! - [`pauli`] — two-qubit states as Pauli coefficients and as dense 4x4
//!   Hermitian matrices, with conversions, eigenvalues, and the partial
//!   transpose;
//! - [`criteria`] — PPT test, CHSH value, witness operators, and the
//!   seeded samplers behind the Monte-Carlo checks;
//! - [`protocol`] — initial states, the measurement channel (two
//!   independent implementations), the sharpness iterations, Bob counting,
//!   and the monotonicity/bounding verifiers;
//! - [`tol`] — every numeric tolerance in one place.

// Negated comparisons are kept where NaN has to fail a validation gate
// (`!(x <= tol)` rejects NaN, `x > tol` lets it through), and the fixed-size
// matrix arithmetic reads better with explicit index loops.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod criteria;
pub mod error;
pub mod pauli;
pub mod protocol;
pub mod tol;

pub use criteria::{
    chsh_value, ppt_min_eigenvalue, sample_density_matrix, sample_product_state,
    sample_two_qubit_state, ChshReport, ProductState, Witness,
};
pub use error::{Error, Result};
pub use pauli::{
    identity2, kron2, partial_transpose_bob_dense, sigma, DenseHermitian4, Mat2, Mat4, PauliAxis,
    TwoQubitState,
};
pub use protocol::{
    apply_bob_channel, apply_bob_channel_dense, count_bobs, entanglement_bound, find_theta_for_n,
    gamma_sequence, lambda_sequence, make_initial_state, make_initial_state_asymmetric,
    sequence_trace, verify_lemma1, verify_lemma2, BobStep, LemmaReport, PovmEffect, ProtocolParams,
    SequenceTrace, SharpnessSequence, Termination,
};
