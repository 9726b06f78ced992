//! Numerical tolerances used across the crate.
//!
//! All inputs to this crate are analytically exact, so tolerances only have
//! to absorb f64 rounding noise, never model error.

/// Positive-semidefiniteness slack: eigenvalues above `-PSD_TOL` count as
/// nonnegative.
pub const PSD_TOL: f64 = 1e-10;

/// Maximum entrywise deviation from Hermiticity.
pub const HERM_TOL: f64 = 1e-12;

/// Maximum deviation of a density-matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi eigensolver stops.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

/// Hard cap on Jacobi sweeps; 4x4 matrices converge in a handful.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Locality slack on the CHSH bound `u0 + u1 <= 1`. The boundary state at
/// (theta = pi/4, alpha = 1) evaluates to 1 + O(1e-16) in f64 and is local.
pub const CHSH_LOCAL_TOL: f64 = 1e-12;

/// Agreement required between the dense (Kraus) and tensor-coefficient
/// implementations of the measurement channel.
pub const CHANNEL_EQUIV_TOL: f64 = 1e-10;

/// Round-trip accuracy of the Pauli-coefficient <-> dense-matrix conversions.
pub const ROUNDTRIP_TOL: f64 = 1e-12;

/// Relative divergence between the running sharpness-sequence accumulators
/// and the independent log-space recomputation that flags a bug.
pub const SEQUENCE_DIAG_TOL: f64 = 1e-9;

/// Below this |discriminant| the closed-form symmetric 3x3 eigenvalue cubic
/// is considered degenerate and the Jacobi fallback is used.
pub const CUBIC_DEGENERATE_DISC: f64 = 1e-24;

/// Scale-relative version of the degeneracy test: |discriminant| below this
/// fraction of p2^3 (the discriminant's natural scale) also falls back.
/// Repeated eigenvalues cancel the discriminant only to rounding level, and
/// the trig closed form loses half its digits exactly there.
pub const CUBIC_DEGENERATE_REL: f64 = 1e-12;

/// Unit-norm slack for Bloch vectors of pure product states.
pub const UNIT_NORM_TOL: f64 = 1e-12;
