//! Entanglement and locality detectors.
//!
//! Three independent verdicts on a two-qubit state:
//! - the PPT test (negative partial-transpose eigenvalue iff entangled),
//! - the CHSH locality bound `u0 + u1 <= 1` on the two largest eigenvalues
//!   of `T^T T`,
//! - witness expectations `<W> = 1/4 (1 + sum_i lambda_i t_ii)`, negative
//!   only on entangled states.
//!
//! The module also provides the seeded samplers used by the Monte-Carlo
//! nonnegativity checks.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{kron2, sigma, DenseHermitian4, PauliAxis, TwoQubitState};
use crate::tol::{CHSH_LOCAL_TOL, CUBIC_DEGENERATE_DISC, CUBIC_DEGENERATE_REL, UNIT_NORM_TOL};

/// The lambda-parametrized witness `W = 1/4 [I(x)I + sum_i lambda_i sigma_i (x) sigma_i]`.
///
/// Every component lies in [0, 1]; `lambda = (1,1,1)` is the sharp
/// projector-based witness, smaller components model unsharp settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    lambda: [f64; 3],
}

impl Witness {
    pub fn new(lambda: [f64; 3]) -> Result<Self> {
        for l in lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidSharpness(l));
            }
        }
        Ok(Self { lambda })
    }

    /// The per-Bob witness of the protocol: axis 1 sharp, axes 2 and 3 at
    /// the common sharpness `lam`.
    pub fn protocol_step(lam: f64) -> Result<Self> {
        Self::new([1.0, lam, lam])
    }

    pub fn lambda(&self) -> [f64; 3] {
        self.lambda
    }

    /// The explicit 4x4 matrix; Hermitian with trace 1 (not a state — its
    /// spectrum dips negative, which is what makes it a witness).
    pub fn matrix(&self) -> DenseHermitian4 {
        let id = crate::pauli::identity2();
        let mut m = kron2(&id, &id);
        for axis in PauliAxis::ALL {
            let s = sigma(axis);
            let k = kron2(&s, &s);
            let w = self.lambda[axis.index()];
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] += w * k[i][j];
                }
            }
        }
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e *= 0.25;
            }
        }
        DenseHermitian4::new(m).expect("witness construction is Hermitian")
    }

    /// `Tr[W rho] = 1/4 (1 + sum_i lambda_i t_ii)`; a negative value
    /// certifies entanglement. Agrees with the matrix-trace route to
    /// rounding, which the tests enforce.
    pub fn expectation(&self, state: &TwoQubitState) -> f64 {
        let mut acc = 1.0;
        for i in 0..3 {
            acc += self.lambda[i] * state.t[i][i];
        }
        0.25 * acc
    }

    /// Expectation on a pure product state:
    /// `1/4 (1 + sum_i lambda_i rA_i rB_i)`. Nonnegative for every product
    /// state and every lambda in \[0,1\]^3 (Cauchy-Schwarz on rA . sB with
    /// sB_i = lambda_i rB_i).
    pub fn expectation_product(&self, p: &ProductState) -> f64 {
        let mut acc = 1.0;
        for i in 0..3 {
            acc += self.lambda[i] * p.r_a[i] * p.r_b[i];
        }
        0.25 * acc
    }
}

/// Outcome of the CHSH locality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshReport {
    /// Largest eigenvalue of `T^T T`.
    pub u0: f64,
    /// Second-largest eigenvalue of `T^T T`.
    pub u1: f64,
    /// `u0 + u1`; the state violates a CHSH inequality iff this exceeds 1.
    pub value: f64,
    /// `value <= 1 + CHSH_LOCAL_TOL` (the bound is non-strict; the slack
    /// absorbs rounding at the exact boundary).
    pub is_local: bool,
}

/// Computes the two largest eigenvalues of `T^T T` (T is real, so this is
/// `T^dagger T`) and the locality verdict.
pub fn chsh_value(state: &TwoQubitState) -> ChshReport {
    let t = &state.t;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += t[k][i] * t[k][j];
            }
            m[i][j] = acc;
        }
    }
    let mut eigs = symmetric_eigenvalues_3(&m);
    // T^T T is PSD; clamp rounding-level negatives.
    for e in eigs.iter_mut() {
        *e = e.max(0.0);
    }
    let (u0, u1) = (eigs[2], eigs[1]);
    let value = u0 + u1;
    ChshReport {
        u0,
        u1,
        value,
        is_local: value <= 1.0 + CHSH_LOCAL_TOL,
    }
}

/// Minimum eigenvalue of the partial transpose on the Bob slot. The state
/// is entangled iff this is negative (strictly below `-PSD_TOL` once
/// rounding slack is granted).
pub fn ppt_min_eigenvalue(state: &TwoQubitState) -> Result<f64> {
    state.partial_transpose_bob().min_eigenvalue()
}

/// A pure product state given by two unit Bloch vectors,
/// `rho = (I + rA.sigma)/2 (x) (I + rB.sigma)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductState {
    r_a: [f64; 3],
    r_b: [f64; 3],
}

impl ProductState {
    pub fn new(r_a: [f64; 3], r_b: [f64; 3]) -> Result<Self> {
        for r in [&r_a, &r_b] {
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !((norm - 1.0).abs() <= UNIT_NORM_TOL) {
                return Err(Error::InvalidParams(format!(
                    "product-state Bloch vector has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self { r_a, r_b })
    }

    pub fn r_a(&self) -> [f64; 3] {
        self.r_a
    }

    pub fn r_b(&self) -> [f64; 3] {
        self.r_b
    }

    /// Pauli-picture coefficients: `alice = rA`, `bob = rB`,
    /// `t_ij = rA_i rB_j`.
    pub fn to_state(&self) -> TwoQubitState {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = self.r_a[i] * self.r_b[j];
            }
        }
        TwoQubitState::new(self.r_a, self.r_b, t)
    }
}

/// One point uniform on the unit sphere: cos(polar) uniform in [-1, 1],
/// azimuth uniform in [0, 2 pi).
fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    [rho * phi.cos(), rho * phi.sin(), z]
}

/// Two independent sphere-uniform Bloch vectors; reproducible for a fixed
/// generator state.
pub fn sample_product_state<R: Rng + ?Sized>(rng: &mut R) -> ProductState {
    ProductState {
        r_a: sample_unit_vector(rng),
        r_b: sample_unit_vector(rng),
    }
}

/// A random density matrix `G G^H / Tr[G G^H]` with uniform complex entries
/// in G. Not a named ensemble; it just covers the state space for
/// cross-checks and property tests.
pub fn sample_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DenseHermitian4 {
    use num_complex::Complex64;
    let zero = Complex64::new(0.0, 0.0);
    let mut g = [[zero; 4]; 4];
    for row in g.iter_mut() {
        for e in row.iter_mut() {
            *e = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut rho = [[zero; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                rho[i][j] += g[i][k] * g[j][k].conj();
            }
        }
    }
    let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
    for row in rho.iter_mut() {
        for e in row.iter_mut() {
            *e /= tr;
        }
    }
    DenseHermitian4::new(rho).expect("G G^H is Hermitian")
}

/// Random valid two-qubit state in the Pauli picture.
pub fn sample_two_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    sample_density_matrix(rng)
        .decompose()
        .expect("sampled density matrix has unit trace")
}

/// Eigenvalues of a real symmetric 3x3 matrix, ascending.
///
/// Closed form via the characteristic cubic (trigonometric solution); when
/// the cubic discriminant is nearly degenerate the Jacobi fallback takes
/// over, since the toolkit's inputs (diagonal-dominant `T^T T`) otherwise
/// keep the cubic stable.
fn symmetric_eigenvalues_3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let mut b = *m;
    for i in 0..3 {
        b[i][i] -= q;
    }
    let mut p2 = 0.0;
    for row in &b {
        for e in row {
            p2 += e * e;
        }
    }
    let det_b = det3(&b);
    // Shifted eigenvalues solve y^3 - (p2/2) y - det(B) = 0; its
    // discriminant is p2^3/2 - 27 det(B)^2, which vanishes exactly on
    // repeated eigenvalues — where acos saturates and the closed form
    // keeps only half its digits. Both an absolute and a scale-relative
    // floor route those cases to Jacobi.
    let disc = 0.5 * p2 * p2 * p2 - 27.0 * det_b * det_b;
    let scale = p2 * p2 * p2;
    if disc.abs() < CUBIC_DEGENERATE_DISC || disc.abs() < CUBIC_DEGENERATE_REL * scale {
        return jacobi_eigenvalues_3(m);
    }
    let p = (p2 / 6.0).sqrt();
    let r = (det_b / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e_hi = q + 2.0 * p * phi.cos();
    let e_lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    // The middle one follows from the trace.
    let e_mid = 3.0 * q - e_hi - e_lo;
    let mut eigs = [e_lo, e_mid, e_hi];
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    eigs
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cyclic Jacobi on a real symmetric 3x3; the degenerate-spectrum fallback.
fn jacobi_eigenvalues_3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut a = *m;
    for _ in 0..crate::tol::JACOBI_MAX_SWEEPS {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        if off < crate::tol::JACOBI_OFF_TOL {
            break;
        }
        for p in 0..2 {
            for q in (p + 1)..3 {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- R^T A R with R the (p, q) rotation: columns first,
                // then rows.
                let mut next = a;
                for k in 0..3 {
                    next[k][p] = c * a[k][p] - s * a[k][q];
                    next[k][q] = s * a[k][p] + c * a[k][q];
                }
                let cols = next;
                for k in 0..3 {
                    next[p][k] = c * cols[p][k] - s * cols[q][k];
                    next[q][k] = s * cols[p][k] + c * cols[q][k];
                }
                next[p][q] = 0.0;
                next[q][p] = 0.0;
                a = next;
            }
        }
    }
    let mut eigs = [a[0][0], a[1][1], a[2][2]];
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    eigs
}
