//! Exact two-qubit state algebra in two pictures.
//!
//! A two-qubit density operator is either a [`TwoQubitState`] — the real
//! Pauli coefficients (local Bloch vectors plus the 3x3 correlation tensor
//! `t[i][j] = Tr[rho sigma_i (x) sigma_j]`) — or a [`DenseHermitian4`], the
//! explicit 4x4 complex matrix. Conversions between the two are exact up to
//! rounding and serve as each other's oracle.
//!
//! Slot convention, fixed crate-wide: index 0 = Alice, index 1 = Bob, and
//! every Kronecker product is ordered (Alice (x) Bob). The measurement
//! channel and the partial transpose both act on the Bob slot.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::{HERM_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL, TRACE_TOL};

/// A 2x2 complex matrix in row-major form.
pub type Mat2 = [[Complex64; 2]; 2];

/// A 4x4 complex matrix in row-major form.
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One of the three Pauli operators, indexed 1..=3 in formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Zero-based index into coefficient arrays.
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }
}

/// The 2x2 identity.
pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// The Pauli matrix on the given axis.
pub fn sigma(axis: PauliAxis) -> Mat2 {
    match axis {
        PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
        PauliAxis::Y => [
            [ZERO, Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), ZERO],
        ],
        PauliAxis::Z => [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]],
    }
}

/// Kronecker product with Alice in the first slot and Bob in the second.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub(crate) fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat4_adjoint(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

/// A 4x4 complex Hermitian matrix: the dense picture of states and
/// witness operators, and the oracle side of every cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseHermitian4 {
    entries: Mat4,
}

impl DenseHermitian4 {
    /// Wraps a raw matrix, rejecting anything that deviates from
    /// Hermiticity by more than [`HERM_TOL`] in any entry.
    pub fn new(entries: Mat4) -> Result<Self> {
        let dev = hermiticity_error(&entries);
        if !(dev <= HERM_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { entries })
    }

    pub fn identity() -> Self {
        let mut entries = [[ZERO; 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j]
    }

    /// Trace; real for Hermitian input.
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i].re).sum()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                max = max.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        max
    }

    /// `Tr[self * other]`, real for a Hermitian pair.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for k in 0..4 {
                acc += self.entries[i][k] * other.entries[k][i];
            }
        }
        acc.re
    }

    /// The four real eigenvalues in ascending order, by cyclic Jacobi
    /// rotations. Converges when the off-diagonal Frobenius norm drops
    /// below [`JACOBI_OFF_TOL`], hard-capped at [`JACOBI_MAX_SWEEPS`]
    /// sweeps; the dimension is fixed and tiny, so robustness wins over
    /// asymptotics.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        let dev = self.hermiticity_error();
        if !(dev <= HERM_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        // Symmetrize to strip rounding-level asymmetry before rotating.
        let mut a = self.entries;
        for i in 0..4 {
            a[i][i] = Complex64::new(a[i][i].re, 0.0);
            for j in (i + 1)..4 {
                let avg = 0.5 * (a[i][j] + a[j][i].conj());
                a[i][j] = avg;
                a[j][i] = avg.conj();
            }
        }
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) < JACOBI_OFF_TOL {
                break;
            }
            for p in 0..3 {
                for q in (p + 1)..4 {
                    jacobi_rotate(&mut a, p, q);
                }
            }
        }
        let mut eigs = [a[0][0].re, a[1][1].re, a[2][2].re, a[3][3].re];
        eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        Ok(eigs)
    }

    /// Inverts the Pauli parametrization: `bob_i = Tr[rho (I (x) sigma_i)]`,
    /// `alice_i = Tr[rho (sigma_i (x) I)]`, `t_ij = Tr[rho (sigma_i (x) sigma_j)]`.
    /// Requires unit trace within [`TRACE_TOL`].
    pub fn decompose(&self) -> Result<TwoQubitState> {
        let tr = self.trace();
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::NonUnitTrace(tr));
        }
        let id = identity2();
        let mut alice = [0.0; 3];
        let mut bob = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        for ai in PauliAxis::ALL {
            let sa = sigma(ai);
            alice[ai.index()] = self.trace_with_kron(&sa, &id);
            bob[ai.index()] = self.trace_with_kron(&id, &sa);
            for bj in PauliAxis::ALL {
                t[ai.index()][bj.index()] = self.trace_with_kron(&sa, &sigma(bj));
            }
        }
        Ok(TwoQubitState { alice, bob, t })
    }

    fn trace_with_kron(&self, a: &Mat2, b: &Mat2) -> f64 {
        let k = kron2(a, b);
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.entries[i][j] * k[j][i];
            }
        }
        acc.re
    }
}

fn hermiticity_error(m: &Mat4) -> f64 {
    let mut max = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            max = max.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    max
}

fn off_diagonal_norm(a: &Mat4) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                acc += a[i][j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One cyclic Jacobi step: a complex rotation on the (p, q) plane chosen to
/// zero `a[p][q]`. The phase of the pivot is absorbed first so the core
/// rotation is the textbook real one.
fn jacobi_rotate(a: &mut Mat4, p: usize, q: usize) {
    let apq = a[p][q];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let phase = apq / mag;
    let tau = (a[q][q].re - a[p][p].re) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = I with the (p, q) block replaced by [[c, s], [-s u*, c u*]],
    // where u is the pivot phase; then A <- U^H A U.
    let mut u = [[ZERO; 4]; 4];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = ONE;
    }
    u[p][p] = Complex64::new(c, 0.0);
    u[p][q] = Complex64::new(s, 0.0);
    u[q][p] = -s * phase.conj();
    u[q][q] = c * phase.conj();

    *a = mat4_mul(&mat4_adjoint(&u), &mat4_mul(a, &u));
    // The pivot is zero by construction; pin it to kill residue.
    a[p][q] = ZERO;
    a[q][p] = ZERO;
}

/// A two-qubit operator in the Pauli-coefficient picture.
///
/// `alice` multiplies `sigma_i (x) I` (Alice's local Bloch vector), `bob`
/// multiplies `I (x) sigma_i` (Bob's), and `t[i][j]` multiplies
/// `sigma_i (x) sigma_j` with the Alice axis first. For a density operator
/// every coefficient lies in [-1, 1] and the reconstructed matrix is PSD;
/// positivity is a checked property, not a structural one — partial
/// transposes of entangled states legitimately fail it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub alice: [f64; 3],
    pub bob: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl TwoQubitState {
    pub fn new(alice: [f64; 3], bob: [f64; 3], t: [[f64; 3]; 3]) -> Self {
        Self { alice, bob, t }
    }

    /// The maximally mixed state I/4.
    pub fn maximally_mixed() -> Self {
        Self::new([0.0; 3], [0.0; 3], [[0.0; 3]; 3])
    }

    /// Vanishing local vectors and a diagonal correlation tensor.
    pub fn bell_diagonal(diag: [f64; 3]) -> Self {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            t[i][i] = diag[i];
        }
        Self::new([0.0; 3], [0.0; 3], t)
    }

    /// Builds the dense matrix
    /// `1/4 [I(x)I + sum_i alice_i sigma_i(x)I + sum_i bob_i I(x)sigma_i
    ///      + sum_ij t_ij sigma_i(x)sigma_j]`.
    /// Trace 1 and Hermiticity hold by construction.
    pub fn reconstruct(&self) -> DenseHermitian4 {
        let id = identity2();
        let mut m = kron2(&id, &id);
        for ai in PauliAxis::ALL {
            let sa = sigma(ai);
            accumulate(&mut m, &kron2(&sa, &id), self.alice[ai.index()]);
            accumulate(&mut m, &kron2(&id, &sa), self.bob[ai.index()]);
            for bj in PauliAxis::ALL {
                accumulate(
                    &mut m,
                    &kron2(&sa, &sigma(bj)),
                    self.t[ai.index()][bj.index()],
                );
            }
        }
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e *= 0.25;
            }
        }
        DenseHermitian4::new(m).expect("Pauli reconstruction is Hermitian by construction")
    }

    /// Transposition on the Bob slot. In the Pauli picture only sigma_2 is
    /// imaginary, so the transpose flips its sign on that slot: `bob[1]`
    /// and the middle column `t[i][1]` negate, everything else unchanged.
    /// An involution; preserves trace and Hermiticity.
    pub fn partial_transpose_bob(&self) -> Self {
        let mut out = *self;
        out.bob[1] = -out.bob[1];
        for i in 0..3 {
            out.t[i][1] = -out.t[i][1];
        }
        out
    }

    /// Closed-form spectrum for the Bell-diagonal subfamily (the entire
    /// protocol lives there): `1/4 (1 +- t1 +- t2 +- t3)` over the four
    /// sign patterns with an even number of minus signs matching the Bell
    /// basis. Returns `None` off the subfamily.
    pub fn bell_diagonal_eigenvalues(&self) -> Option<[f64; 4]> {
        let local_zero = self.alice.iter().chain(&self.bob).all(|&x| x == 0.0);
        let off_zero = (0..3).all(|i| (0..3).all(|j| i == j || self.t[i][j] == 0.0));
        if !(local_zero && off_zero) {
            return None;
        }
        let (t1, t2, t3) = (self.t[0][0], self.t[1][1], self.t[2][2]);
        let mut eigs = [
            0.25 * (1.0 - t1 - t2 - t3),
            0.25 * (1.0 - t1 + t2 + t3),
            0.25 * (1.0 + t1 - t2 + t3),
            0.25 * (1.0 + t1 + t2 - t3),
        ];
        eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        Some(eigs)
    }

    /// Minimum eigenvalue of the reconstructed matrix, via the closed form
    /// on the Bell-diagonal subfamily and the Jacobi solver elsewhere.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if let Some(eigs) = self.bell_diagonal_eigenvalues() {
            return Ok(eigs[0]);
        }
        Ok(self.reconstruct().eigenvalues()?[0])
    }

    /// Largest absolute coefficient difference to another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..3 {
            max = max.max((self.alice[i] - other.alice[i]).abs());
            max = max.max((self.bob[i] - other.bob[i]).abs());
            for j in 0..3 {
                max = max.max((self.t[i][j] - other.t[i][j]).abs());
            }
        }
        max
    }
}

fn accumulate(target: &mut Mat4, term: &Mat4, weight: f64) {
    if weight == 0.0 {
        return;
    }
    for i in 0..4 {
        for j in 0..4 {
            target[i][j] += weight * term[i][j];
        }
    }
}

/// Explicit partial transpose of a dense matrix on the Bob slot:
/// `rho'[2i+a][2j+b] = rho[2i+b][2j+a]`. Oracle for the Pauli-picture rule.
pub fn partial_transpose_bob_dense(rho: &DenseHermitian4) -> DenseHermitian4 {
    let src = rho.entries();
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    out[2 * i + a][2 * j + b] = src[2 * i + b][2 * j + a];
                }
            }
        }
    }
    DenseHermitian4::new(out).expect("partial transpose preserves Hermiticity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::sample_density_matrix as random_density;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn pauli_matrices_satisfy_their_algebra() {
        let id = identity2();
        for axis in PauliAxis::ALL {
            let s = sigma(axis);
            // Hermitian and traceless.
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(s[i][j], s[j][i].conj());
                }
            }
            assert_eq!(s[0][0] + s[1][1], ZERO);
            // Squares to the identity.
            let sq = mat2_mul(&s, &s);
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!((sq[i][j] - id[i][j]).norm(), 0.0, epsilon = 1e-15);
                }
            }
        }
        // sigma_1 sigma_2 = i sigma_3 and cyclic.
        let cases = [
            (PauliAxis::X, PauliAxis::Y, PauliAxis::Z),
            (PauliAxis::Y, PauliAxis::Z, PauliAxis::X),
            (PauliAxis::Z, PauliAxis::X, PauliAxis::Y),
        ];
        for (a, b, c) in cases {
            let prod = mat2_mul(&sigma(a), &sigma(b));
            let expect = sigma(c);
            for i in 0..2 {
                for j in 0..2 {
                    let want = Complex64::new(0.0, 1.0) * expect[i][j];
                    assert_abs_diff_eq!((prod[i][j] - want).norm(), 0.0, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn reconstruct_maximally_mixed() {
        let rho = TwoQubitState::maximally_mixed().reconstruct();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(rho.get(i, j).re, want, epsilon = 1e-15);
                assert_abs_diff_eq!(rho.get(i, j).im, 0.0, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reconstruct_matches_initial_state_matrix_at_pi_over_4() {
        // T = diag(-cos t, -sin t, -sin t) at t = pi/4 gives the dense form
        //   diag entries (1 -+ c)/4 and the central +-c/2 off-diagonal block.
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let state = TwoQubitState::bell_diagonal([-c, -c, -c]);
        let rho = state.reconstruct();
        let d_small = 0.25 * (1.0 - c);
        let d_big = 0.25 * (1.0 + c);
        let expected: [[f64; 4]; 4] = [
            [d_small, 0.0, 0.0, 0.0],
            [0.0, d_big, -0.5 * c, 0.0],
            [0.0, -0.5 * c, d_big, 0.0],
            [0.0, 0.0, 0.0, d_small],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(rho.get(i, j).re, expected[i][j], epsilon = 1e-15);
                assert_abs_diff_eq!(rho.get(i, j).im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn reconstruct_pure_product_zz() {
        // alice = bob = z-hat, T = diag(0, 0, 1) is |00><00|.
        let state = TwoQubitState::new([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], {
            let mut t = [[0.0; 3]; 3];
            t[2][2] = 1.0;
            t
        });
        let rho = state.reconstruct();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(rho.get(i, j).re, want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn decompose_rejects_non_unit_trace() {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(0.5, 0.0);
        }
        let err = DenseHermitian4::new(m).unwrap().decompose().unwrap_err();
        assert!(matches!(err, Error::NonUnitTrace(t) if (t - 2.0).abs() < 1e-12));
    }

    #[test]
    fn decompose_maximally_mixed_is_zero_coefficients() {
        let state = TwoQubitState::maximally_mixed()
            .reconstruct()
            .decompose()
            .unwrap();
        assert_eq!(state.max_abs_diff(&TwoQubitState::maximally_mixed()), 0.0);
    }

    #[test]
    fn decompose_recovers_initial_state_coefficients() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let state = TwoQubitState::bell_diagonal([-c, -c, -c]);
        let back = state.reconstruct().decompose().unwrap();
        assert!(state.max_abs_diff(&back) < 1e-15);
        assert_abs_diff_eq!(
            back.t[0][0],
            -std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn roundtrip_on_random_density_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let rho = random_density(&mut rng);
            let back = rho.decompose().unwrap().reconstruct();
            assert!(
                rho.max_abs_diff(&back) < 1e-12,
                "round-trip deviation {}",
                rho.max_abs_diff(&back)
            );
        }
    }

    #[test]
    fn eigenvalues_of_identity() {
        let eigs = DenseHermitian4::identity().eigenvalues().unwrap();
        for e in eigs {
            assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_diagonal_matrix() {
        let mut m = [[ZERO; 4]; 4];
        for (i, v) in [0.4, 0.3, 0.2, 0.1].iter().enumerate() {
            m[i][i] = Complex64::new(*v, 0.0);
        }
        let eigs = DenseHermitian4::new(m).unwrap().eigenvalues().unwrap();
        let expect = [0.1, 0.2, 0.3, 0.4];
        for (e, w) in eigs.iter().zip(expect) {
            assert_abs_diff_eq!(*e, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenvalues_match_bell_diagonal_closed_form() {
        // Frozen from the closed form 1/4 (1 +- t1 +- t2 +- t3) at
        // t = (-1/sqrt2, -1/sqrt2, -1/sqrt2).
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let state = TwoQubitState::bell_diagonal([-c, -c, -c]);
        let fast = state.bell_diagonal_eigenvalues().unwrap();
        let general = state.reconstruct().eigenvalues().unwrap();
        let expect = [
            0.07322330470336312,
            0.07322330470336312,
            0.07322330470336312,
            0.7803300858899106,
        ];
        for i in 0..4 {
            assert_abs_diff_eq!(fast[i], expect[i], epsilon = 1e-12);
            assert_abs_diff_eq!(general[i], expect[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let mut m = [[ZERO; 4]; 4];
        m[0][1] = Complex64::new(1.0, 0.0);
        // Missing the conjugate partner entirely.
        let dev = hermiticity_error(&m);
        assert!(dev > HERM_TOL);
        assert!(matches!(
            DenseHermitian4::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eigenvalue_sum_matches_trace_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rho = random_density(&mut rng);
            let eigs = rho.eigenvalues().unwrap();
            let sum: f64 = eigs.iter().sum();
            assert_abs_diff_eq!(sum, rho.trace(), epsilon = 1e-10);
            // Density matrices stay PSD with spectrum inside [0, 1].
            assert!(eigs[0] >= -1e-10 && eigs[3] <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn eigenvalues_match_spectral_moments() {
        // Independent check: sum of k-th powers equals Tr[A^k] for k = 2, 3.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let rho = random_density(&mut rng);
            let eigs = rho.eigenvalues().unwrap();
            let a2 = mat4_mul(rho.entries(), rho.entries());
            let a3 = mat4_mul(&a2, rho.entries());
            let tr2: f64 = (0..4).map(|i| a2[i][i].re).sum();
            let tr3: f64 = (0..4).map(|i| a3[i][i].re).sum();
            let m2: f64 = eigs.iter().map(|e| e * e).sum();
            let m3: f64 = eigs.iter().map(|e| e * e * e).sum();
            assert_abs_diff_eq!(m2, tr2, epsilon = 1e-10);
            assert_abs_diff_eq!(m3, tr3, epsilon = 1e-10);
        }
    }

    #[test]
    fn eigenvalues_of_product_states_match_analytic_spectrum() {
        // rho_A (x) rho_B has spectrum {(1 +- |ra|)(1 +- |rb|)/4}.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let ra: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.6..0.6));
            let rb: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.6..0.6));
            let na = (ra.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let nb = (rb.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let mut t = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    t[i][j] = ra[i] * rb[j];
                }
            }
            let state = TwoQubitState::new(ra, rb, t);
            let eigs = state.reconstruct().eigenvalues().unwrap();
            let mut expect = [
                0.25 * (1.0 + na) * (1.0 + nb),
                0.25 * (1.0 + na) * (1.0 - nb),
                0.25 * (1.0 - na) * (1.0 + nb),
                0.25 * (1.0 - na) * (1.0 - nb),
            ];
            expect.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for i in 0..4 {
                assert_abs_diff_eq!(eigs[i], expect[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn partial_transpose_of_pure_product_is_itself() {
        let state = TwoQubitState::new([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], {
            let mut t = [[0.0; 3]; 3];
            t[2][2] = 1.0;
            t
        });
        let pt = state.partial_transpose_bob();
        assert_eq!(state.max_abs_diff(&pt), 0.0);
        assert_abs_diff_eq!(pt.min_eigenvalue().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_transpose_flips_middle_column_sign() {
        let theta: f64 = 0.7;
        let alpha = 0.9;
        let state = TwoQubitState::bell_diagonal([
            -theta.cos(),
            -alpha * theta.sin(),
            -alpha * theta.sin(),
        ]);
        let pt = state.partial_transpose_bob();
        assert_abs_diff_eq!(pt.t[0][0], -theta.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(pt.t[1][1], alpha * theta.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(pt.t[2][2], -alpha * theta.sin(), epsilon = 1e-15);
    }

    #[test]
    fn partial_transpose_rule_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let rho = random_density(&mut rng);
            let state = rho.decompose().unwrap();
            let via_rule = state.partial_transpose_bob().reconstruct();
            let via_dense = partial_transpose_bob_dense(&rho);
            assert!(
                via_rule.max_abs_diff(&via_dense) < 1e-12,
                "deviation {}",
                via_rule.max_abs_diff(&via_dense)
            );
        }
    }
}
