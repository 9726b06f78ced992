//! The sequential Alice-Bobs protocol.
//!
//! Alice shares a Bell-diagonal two-qubit state with a chain of independent
//! Bobs. Each Bob measures one of three unsharp POVM settings with equal
//! probability (axis 1 sharp, axes 2 and 3 at a common sharpness lambda_k),
//! evaluates the step witness with Alice, and forwards his qubit through the
//! outcome-averaged Lueders channel. The sharpness iteration picks each
//! lambda_k just past the detection threshold, with a relative margin
//! epsilon, so every Bob up to the escape point certifies entanglement.
//!
//! Everything here is closed-form in the Pauli picture; the dense Kraus
//! route exists purely as an independent cross-check.

use std::f64::consts::FRAC_PI_4;

use crate::criteria::{chsh_value, ppt_min_eigenvalue, Witness};
use crate::error::{Error, Result};
use crate::pauli::{
    identity2, kron2, mat4_mul, sigma, DenseHermitian4, Mat2, PauliAxis, TwoQubitState,
};
use crate::tol::{PSD_TOL, SEQUENCE_DIAG_TOL};

/// Smallest theta probed by [`find_theta_for_n`]; guards the search range.
pub const THETA_SEARCH_FLOOR: f64 = 1e-6;

/// Bisection iteration cap for [`find_theta_for_n`].
pub const THETA_SEARCH_MAX_ITERS: usize = 60;

/// Default cap on the number of Bobs per run.
pub const DEFAULT_MAX_BOBS: usize = 1_000_000;

/// `(1 - cos theta) / (2 sin theta)`, the alpha threshold above which the
/// initial state is entangled. Evaluated as `tan(theta/2) / 2`, which is
/// exact in the theta -> 0 limit where the naive form cancels.
pub fn entanglement_bound(theta: f64) -> f64 {
    (theta / 2.0).tan() / 2.0
}

/// Parameters of a protocol run.
///
/// `theta` in (0, pi/4] and `alpha` in (entanglement_bound(theta), 1] pin an
/// initial state that is entangled yet CHSH-local. `epsilon >= 0` is the
/// relative detection margin (strictly positive for detection runs; zero is
/// admitted for the bare sequence bounds). `beta`, when present, selects the
/// asymmetric initial-state variant and must satisfy 0 < beta < alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub theta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub beta: Option<f64>,
    pub max_bobs: usize,
}

impl ProtocolParams {
    pub fn new(theta: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            theta,
            alpha,
            epsilon,
            beta: None,
            max_bobs: DEFAULT_MAX_BOBS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = Some(beta);
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_bobs(mut self, max_bobs: usize) -> Self {
        self.max_bobs = max_bobs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || self.theta <= 0.0 || self.theta > FRAC_PI_4 {
            return Err(Error::InvalidParams(format!(
                "theta = {} outside (0, pi/4]",
                self.theta
            )));
        }
        let bound = entanglement_bound(self.theta);
        if !self.alpha.is_finite() || self.alpha <= bound || self.alpha > 1.0 {
            return Err(Error::InvalidParams(format!(
                "alpha = {} outside the entanglement window ({bound}, 1] at theta = {}",
                self.alpha, self.theta
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon = {} must be >= 0",
                self.epsilon
            )));
        }
        if let Some(beta) = self.beta {
            if !beta.is_finite() || beta <= 0.0 || beta >= self.alpha {
                return Err(Error::InvalidParams(format!(
                    "beta = {beta} outside (0, alpha = {})",
                    self.alpha
                )));
            }
        }
        if self.max_bobs == 0 {
            return Err(Error::InvalidParams("max_bobs must be >= 1".into()));
        }
        Ok(())
    }
}

/// One unsharp POVM effect `E = (I + lambda sigma_axis)/2`; together with
/// `I - E` it forms a valid two-outcome measurement for lambda in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmEffect {
    pub axis: PauliAxis,
    pub sharpness: f64,
}

impl PovmEffect {
    pub fn new(axis: PauliAxis, sharpness: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sharpness) {
            return Err(Error::InvalidSharpness(sharpness));
        }
        Ok(Self { axis, sharpness })
    }

    /// The effect matrix `(I + lambda sigma)/2`.
    pub fn matrix(&self) -> Mat2 {
        self.combination(0.5, 0.5 * self.sharpness)
    }

    /// Closed-form square root `sqrt((I + lambda sigma)/2) = a I + b sigma`
    /// with `a = (sqrt(1+lambda) + sqrt(1-lambda)) / (2 sqrt 2)` and
    /// `b = (sqrt(1+lambda) - sqrt(1-lambda)) / (2 sqrt 2)`. Exact at
    /// lambda = 1, where the effect is a rank-1 projector.
    pub fn sqrt_matrix(&self) -> Mat2 {
        let (a, b) = self.sqrt_coefficients();
        self.combination(a, b)
    }

    /// Square root of the complementary effect `I - E`, which is
    /// `a I - b sigma`.
    pub fn complement_sqrt_matrix(&self) -> Mat2 {
        let (a, b) = self.sqrt_coefficients();
        self.combination(a, -b)
    }

    fn sqrt_coefficients(&self) -> (f64, f64) {
        let sp = (1.0 + self.sharpness).sqrt();
        let sm = (1.0 - self.sharpness).sqrt();
        let norm = 2.0 * std::f64::consts::SQRT_2;
        ((sp + sm) / norm, (sp - sm) / norm)
    }

    fn combination(&self, id_coeff: f64, sigma_coeff: f64) -> Mat2 {
        let id = identity2();
        let s = sigma(self.axis);
        let mut out = id;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = id_coeff * id[i][j] + sigma_coeff * s[i][j];
            }
        }
        out
    }
}

fn checked_bell_state(diag: [f64; 3]) -> Result<TwoQubitState> {
    let state = TwoQubitState::bell_diagonal(diag);
    let min = state
        .bell_diagonal_eigenvalues()
        .expect("constructed Bell-diagonal")[0];
    if min < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    Ok(state)
}

/// The shared initial state: `T = diag(-cos t, -a sin t, -a sin t)` with
/// vanishing local vectors. Inside the parameter window it is PSD,
/// PPT-entangled, and CHSH-local.
pub fn make_initial_state(p: &ProtocolParams) -> Result<TwoQubitState> {
    p.validate()?;
    checked_bell_state([
        -p.theta.cos(),
        -p.alpha * p.theta.sin(),
        -p.alpha * p.theta.sin(),
    ])
}

/// The asymmetric variant `T = diag(-cos t, -a sin t, -b sin t)` with
/// 0 < beta < alpha. Positivity is genuinely at stake here (large
/// alpha - beta gaps at small theta are not states), so the PSD check is a
/// real error path; entanglement and locality are reported by the criteria
/// functions, not enforced.
pub fn make_initial_state_asymmetric(p: &ProtocolParams) -> Result<TwoQubitState> {
    p.validate()?;
    let beta = p
        .beta
        .ok_or_else(|| Error::InvalidParams("asymmetric initial state requires beta".into()))?;
    checked_bell_state([
        -p.theta.cos(),
        -p.alpha * p.theta.sin(),
        -beta * p.theta.sin(),
    ])
}

fn check_channel_sharpness(lam: f64) -> Result<()> {
    if !lam.is_finite() || lam <= 0.0 || lam > 1.0 {
        return Err(Error::InvalidSharpness(lam));
    }
    Ok(())
}

/// One Bob's outcome-averaged measurement channel in the Pauli picture.
///
/// With `c = sqrt(1 - lambda^2)`, the Bob-slot components contract by
/// `(1 + 2c)/3` on axis 1 and `(1 + c)/3` on axes 2 and 3: Bob's local
/// vector componentwise, and the correlation tensor along its Bob (second)
/// index. Alice's local vector is untouched — the channel is unital and
/// acts on the Bob slot only. Even in the lambda -> 0 limit axes 2 and 3
/// keep a residual 2/3 contraction, inflicted by the always-sharp axis-1
/// setting.
pub fn apply_bob_channel(state: &TwoQubitState, lam: f64) -> Result<TwoQubitState> {
    check_channel_sharpness(lam)?;
    let c = ((1.0 - lam) * (1.0 + lam)).sqrt();
    let f = [(1.0 + 2.0 * c) / 3.0, (1.0 + c) / 3.0, (1.0 + c) / 3.0];
    let mut out = *state;
    for j in 0..3 {
        out.bob[j] *= f[j];
        for i in 0..3 {
            out.t[i][j] *= f[j];
        }
    }
    Ok(out)
}

/// The same channel as explicit Kraus conjugation on the dense matrix:
/// `1/3 sum_i [ (I (x) sqrt(E_i)) rho (I (x) sqrt(E_i))
///            + (I (x) sqrt(I-E_i)) rho (I (x) sqrt(I-E_i)) ]`
/// with axis 1 at sharpness 1 and axes 2, 3 at `lam`. Kept deliberately
/// independent of the coefficient route; the two must agree to 1e-10.
pub fn apply_bob_channel_dense(rho: &DenseHermitian4, lam: f64) -> Result<DenseHermitian4> {
    check_channel_sharpness(lam)?;
    let id = identity2();
    let zero = num_complex::Complex64::new(0.0, 0.0);
    let mut acc = [[zero; 4]; 4];
    for axis in PauliAxis::ALL {
        let sharpness = if axis == PauliAxis::X { 1.0 } else { lam };
        let effect = PovmEffect::new(axis, sharpness)?;
        for root in [effect.sqrt_matrix(), effect.complement_sqrt_matrix()] {
            let k = kron2(&id, &root);
            let sandwich = mat4_mul(&k, &mat4_mul(rho.entries(), &k));
            for i in 0..4 {
                for j in 0..4 {
                    acc[i][j] += sandwich[i][j] / 3.0;
                }
            }
        }
    }
    DenseHermitian4::new(acc)
}

/// Why a sharpness iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Every term up to the cap stayed inside (0, 1).
    ReachedCap,
    /// A term left (0, 1); exact 1.0 counts as escape (the strategy needs
    /// the open interval).
    EscapedUnitInterval,
}

/// An iteratively defined sharpness sequence with its validity bookkeeping.
///
/// `values` holds every computed term including, on escape, the first
/// invalid one; `values[..valid_len]` lie strictly in (0, 1) and are
/// strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessSequence {
    pub values: Vec<f64>,
    pub valid_len: usize,
    pub termination: Termination,
}

impl SharpnessSequence {
    pub fn valid_values(&self) -> &[f64] {
        &self.values[..self.valid_len]
    }
}

/// The lambda iteration:
/// `lambda_k = (1+eps) (1 - cos t prod_i (1+2c_i)/3) / (2 a sin t prod_i (1+c_i)/3)`
/// over the previous terms' `c_i = sqrt(1 - lambda_i^2)`, stopping when a
/// term leaves (0, 1) or the cap is reached.
///
/// The numerator is tracked as the complement `d = 1 - cos t * prod`,
/// updated as `d += (1 - d) delta` with `delta = 2(1 - c)/3`; the naive
/// difference loses every digit once theta drops below ~1e-8, while the
/// complement form is cancellation-free. Every 64 terms, and once more at
/// termination, `d` is recomputed through an independent expm1/ln1p
/// log-space route and a relative divergence beyond 1e-9 is a hard error.
pub fn lambda_sequence(p: &ProtocolParams) -> Result<SharpnessSequence> {
    p.validate()?;
    let half_sin = (0.5 * p.theta).sin();
    let one_minus_cos = 2.0 * half_sin * half_sin;
    let log_cos = (-one_minus_cos).ln_1p();
    let denom = 2.0 * p.alpha * p.theta.sin();
    let mut d = one_minus_cos; // 1 - cos(theta) * prod (1+2c_i)/3
    let mut log_prod = 0.0; // sum of ln((1+2c_i)/3)
    let mut p2 = 1.0; // prod (1+c_i)/3
    let seq = iterate_sequence(p, |k| {
        let lam = (1.0 + p.epsilon) * d / (denom * p2);
        let step = StepUpdate { value: lam };
        if step.is_valid() {
            // 1 - c without cancellation near lambda = 0.
            let one_minus_c = lam * lam / (1.0 + ((1.0 - lam) * (1.0 + lam)).sqrt());
            let delta = 2.0 * one_minus_c / 3.0;
            d += (1.0 - d) * delta;
            log_prod += (-delta).ln_1p();
            p2 *= (2.0 - one_minus_c) / 3.0;
            if k % 64 == 0 {
                let check = -(log_cos + log_prod).exp_m1();
                diagnostic_check(d, check, k)?;
            }
        }
        Ok(step)
    })?;
    let check = -(log_cos + log_prod).exp_m1();
    diagnostic_check(d, check, seq.values.len())?;
    Ok(seq)
}

/// The gamma iteration bounding lambda from above:
/// `gamma_k = (1+eps) (1 - (1 - t^2/2) prod_i (1 - 2 g_i^2/3)) / (a t prod_i (2 - g_i^2)/3)`,
/// `gamma_1 = (1+eps) t / (2a)`. The closed form's `3^(k-1)` prefactor is
/// absorbed by keeping the denominator product as `(2 - g^2)/3` per term,
/// which also keeps it far from overflow. Same complement/diagnostic
/// treatment as [`lambda_sequence`].
pub fn gamma_sequence(p: &ProtocolParams) -> Result<SharpnessSequence> {
    p.validate()?;
    let half_theta_sq = 0.5 * p.theta * p.theta;
    let log_base = (-half_theta_sq).ln_1p();
    let denom = p.alpha * p.theta;
    let mut d = half_theta_sq; // 1 - (1 - t^2/2) * prod (1 - 2 g_i^2/3)
    let mut log_prod = 0.0;
    let mut q = 1.0; // prod (2 - g_i^2)/3
    let seq = iterate_sequence(p, |k| {
        let gam = (1.0 + p.epsilon) * d / (denom * q);
        let step = StepUpdate { value: gam };
        if step.is_valid() {
            let delta = 2.0 * gam * gam / 3.0;
            d += (1.0 - d) * delta;
            log_prod += (-delta).ln_1p();
            q *= (2.0 - gam * gam) / 3.0;
            if k % 64 == 0 {
                let check = -(log_base + log_prod).exp_m1();
                diagnostic_check(d, check, k)?;
            }
        }
        Ok(step)
    })?;
    let check = -(log_base + log_prod).exp_m1();
    diagnostic_check(d, check, seq.values.len())?;
    Ok(seq)
}

struct StepUpdate {
    value: f64,
}

impl StepUpdate {
    fn is_valid(&self) -> bool {
        self.value > 0.0 && self.value < 1.0
    }
}

fn iterate_sequence(
    p: &ProtocolParams,
    mut step: impl FnMut(usize) -> Result<StepUpdate>,
) -> Result<SharpnessSequence> {
    let mut values = Vec::new();
    let mut termination = Termination::ReachedCap;
    for k in 1..=p.max_bobs {
        let update = step(k)?;
        values.push(update.value);
        if !update.is_valid() {
            termination = Termination::EscapedUnitInterval;
            break;
        }
    }
    let valid_len = match termination {
        Termination::ReachedCap => values.len(),
        Termination::EscapedUnitInterval => values.len() - 1,
    };
    Ok(SharpnessSequence {
        values,
        valid_len,
        termination,
    })
}

fn diagnostic_check(running: f64, recomputed: f64, k: usize) -> Result<()> {
    let scale = recomputed.abs().max(f64::MIN_POSITIVE);
    if (running - recomputed).abs() > SEQUENCE_DIAG_TOL * scale {
        return Err(Error::InternalInconsistency(format!(
            "sequence accumulator drifted from log-space recomputation at term {k}: \
             {running:e} vs {recomputed:e}"
        )));
    }
    Ok(())
}

/// Per-Bob diagnostics of a simulated run, taken on the pre-measurement
/// state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobStep {
    /// 1-based Bob index.
    pub index: usize,
    /// The sharpness lambda_k this Bob uses on axes 2 and 3.
    pub sharpness: f64,
    /// Witness expectation; negative on every counted step.
    pub witness_expectation: f64,
    /// Minimum partial-transpose eigenvalue; negative (entangled) on every
    /// counted step.
    pub ppt_min_before: f64,
    /// CHSH value u0 + u1; never exceeds 1 along a protocol run.
    pub chsh_before: f64,
}

/// A full dynamically simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceTrace {
    pub steps: Vec<BobStep>,
    pub sharpness: SharpnessSequence,
    pub final_state: TwoQubitState,
}

/// Simulates the run step by step: for each analytically valid lambda_k,
/// evaluates the witness and the PPT criterion on the current state, then
/// applies the measurement channel. A nonnegative witness value or a
/// nonnegative PPT minimum on any counted step means the analytic and
/// simulated routes disagree — a hard internal error, never a data error.
///
/// Requires a strictly positive epsilon; with a zero margin the witness
/// expectation sits exactly on the threshold and detection is undefined.
pub fn sequence_trace(p: &ProtocolParams) -> Result<SequenceTrace> {
    p.validate()?;
    if p.epsilon <= 0.0 {
        return Err(Error::InvalidParams(
            "detection runs require epsilon > 0".into(),
        ));
    }
    let sharpness = lambda_sequence(p)?;
    let mut state = make_initial_state(p)?;
    let mut steps = Vec::with_capacity(sharpness.valid_len);
    for (i, &lam) in sharpness.valid_values().iter().enumerate() {
        let witness = Witness::protocol_step(lam)?;
        let expectation = witness.expectation(&state);
        let ppt_min = ppt_min_eigenvalue(&state)?;
        let chsh = chsh_value(&state);
        if !(expectation < 0.0) {
            return Err(Error::InternalInconsistency(format!(
                "Bob {} has analytic sharpness {lam} but simulated <W> = {expectation:e} >= 0",
                i + 1
            )));
        }
        if !(ppt_min < 0.0) {
            return Err(Error::InternalInconsistency(format!(
                "Bob {} detects but the pre-measurement state is not PPT-entangled \
                 (min eigenvalue {ppt_min:e})",
                i + 1
            )));
        }
        steps.push(BobStep {
            index: i + 1,
            sharpness: lam,
            witness_expectation: expectation,
            ppt_min_before: ppt_min,
            chsh_before: chsh.value,
        });
        state = apply_bob_channel(&state, lam)?;
    }
    Ok(SequenceTrace {
        steps,
        sharpness,
        final_state: state,
    })
}

/// Number of Bobs who can witness entanglement: the valid length of the
/// lambda iteration, re-verified by the dynamic simulation. The two routes
/// agreeing exactly is part of the contract.
pub fn count_bobs(p: &ProtocolParams) -> Result<usize> {
    let trace = sequence_trace(p)?;
    let analytic = trace.sharpness.valid_len;
    let simulated = trace.steps.len();
    if analytic != simulated {
        return Err(Error::InternalInconsistency(format!(
            "analytic count {analytic} != simulated count {simulated}"
        )));
    }
    Ok(analytic)
}

/// Searches for a theta whose run yields at least `n` detections, by
/// bisection on ln(theta) over [THETA_SEARCH_FLOOR, pi/4]. Counts are
/// nonincreasing in theta; every probe is a fully verified [`count_bobs`]
/// run, so the returned theta carries its own certificate. Within the f64
/// search range the achievable counts are small — the sequences grow at
/// ratio > 3/2 and accelerate, so each extra Bob costs roughly a squaring
/// of theta — and the search reports the best reachable count when `n`
/// is beyond range rather than looping forever.
pub fn find_theta_for_n(n: usize, alpha: f64, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let count_at = |theta: f64| -> Result<usize> {
        let p = ProtocolParams::new(theta, alpha, epsilon)?.with_max_bobs(n);
        count_bobs(&p)
    };
    if count_at(FRAC_PI_4)? >= n {
        return Ok(FRAC_PI_4);
    }
    let best = count_at(THETA_SEARCH_FLOOR)?;
    if best < n {
        return Err(Error::ThetaNotFound {
            requested: n,
            best_count: best,
            floor: THETA_SEARCH_FLOOR,
        });
    }
    let mut lo = THETA_SEARCH_FLOOR; // succeeds
    let mut hi = FRAC_PI_4; // fails
    for _ in 0..THETA_SEARCH_MAX_ITERS {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        if !(mid > lo && mid < hi) {
            break;
        }
        if count_at(mid)? >= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Outcome of a lemma check over a sequence's valid range.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub passed: bool,
    /// Number of comparisons made; zero makes the check vacuous.
    pub comparisons: usize,
    pub first_violation: Option<String>,
}

impl LemmaReport {
    fn pass(comparisons: usize) -> Self {
        Self {
            passed: true,
            comparisons,
            first_violation: None,
        }
    }

    fn fail(comparisons: usize, detail: String) -> Self {
        Self {
            passed: false,
            comparisons,
            first_violation: Some(detail),
        }
    }
}

/// Checks that the gamma sequence is strictly increasing with consecutive
/// ratio above 3/2 throughout its valid range. An empty or single-term
/// range passes vacuously.
pub fn verify_lemma1(p: &ProtocolParams) -> Result<LemmaReport> {
    let seq = gamma_sequence(p)?;
    let vals = seq.valid_values();
    let mut comparisons = 0;
    for k in 1..vals.len() {
        comparisons += 1;
        let (prev, curr) = (vals[k - 1], vals[k]);
        if !(curr > prev) {
            return Ok(LemmaReport::fail(
                comparisons,
                format!("gamma_{} = {curr} not above gamma_{} = {prev}", k + 1, k),
            ));
        }
        if !(curr / prev > 1.5) {
            return Ok(LemmaReport::fail(
                comparisons,
                format!(
                    "ratio gamma_{}/gamma_{} = {} not above 3/2",
                    k + 1,
                    k,
                    curr / prev
                ),
            ));
        }
    }
    Ok(LemmaReport::pass(comparisons))
}

/// Checks gamma_k >= lambda_k on the overlap of the two valid ranges.
pub fn verify_lemma2(p: &ProtocolParams) -> Result<LemmaReport> {
    let lam = lambda_sequence(p)?;
    let gam = gamma_sequence(p)?;
    let overlap = lam.valid_len.min(gam.valid_len);
    for k in 0..overlap {
        let (l, g) = (lam.values[k], gam.values[k]);
        if !(g >= l) {
            return Ok(LemmaReport::fail(
                k + 1,
                format!("gamma_{} = {g} below lambda_{} = {l}", k + 1, k + 1),
            ));
        }
    }
    Ok(LemmaReport::pass(overlap))
}
