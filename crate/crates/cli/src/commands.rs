//! The four subcommands.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seqwit::{
    apply_bob_channel, apply_bob_channel_dense, chsh_value, count_bobs, lambda_sequence,
    make_initial_state, make_initial_state_asymmetric, ppt_min_eigenvalue, sample_product_state,
    sample_two_qubit_state, sequence_trace, tol, verify_lemma1, verify_lemma2, ProtocolParams,
    Termination, Witness,
};

use crate::output::{emit, g17, g17_json};
use crate::{Format, SequenceArgs, StateInfoArgs, SweepArgs, VerifyArgs};

/// A failure with the process exit code it maps to: 1 for runtime/IO, 2 for
/// usage and parameter errors, 3 for internal inconsistencies.
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl From<seqwit::Error> for CliError {
    fn from(err: seqwit::Error) -> Self {
        let exit_code = match err {
            seqwit::Error::InternalInconsistency(_) => 3,
            _ => 2,
        };
        CliError {
            exit_code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError {
            exit_code: 1,
            message: err.to_string(),
        }
    }
}

type CmdResult = Result<i32, CliError>;

fn params_for_state(theta: f64, alpha: f64, beta: Option<f64>) -> Result<ProtocolParams, CliError> {
    // epsilon is a sequence parameter, irrelevant for one-state diagnostics.
    let p = ProtocolParams::new(theta, alpha, 0.0)?;
    Ok(match beta {
        Some(b) => p.with_beta(b)?,
        None => p,
    })
}

pub fn state_info(args: StateInfoArgs) -> CmdResult {
    let p = params_for_state(args.theta, args.alpha, args.beta)?;
    let state = match args.beta {
        Some(_) => make_initial_state_asymmetric(&p)?,
        None => make_initial_state(&p)?,
    };
    let min_eig = state.min_eigenvalue()?;
    let is_psd = min_eig >= -tol::PSD_TOL;
    let ppt_min = ppt_min_eigenvalue(&state)?;
    let entangled = ppt_min < -tol::PSD_TOL;
    let chsh = chsh_value(&state);
    let diag = [state.t[0][0], state.t[1][1], state.t[2][2]];

    let mut out = String::new();
    match args.format {
        None => {
            writeln!(out, "theta            = {}", g17(args.theta)).unwrap();
            writeln!(out, "alpha            = {}", g17(args.alpha)).unwrap();
            if let Some(beta) = args.beta {
                writeln!(out, "beta             = {}", g17(beta)).unwrap();
            }
            writeln!(
                out,
                "T diagonal       = ({}, {}, {})",
                g17(diag[0]),
                g17(diag[1]),
                g17(diag[2])
            )
            .unwrap();
            writeln!(
                out,
                "min eigenvalue   = {} (psd: {})",
                g17(min_eig),
                yes_no(is_psd)
            )
            .unwrap();
            writeln!(
                out,
                "ppt min eigenval = {} (entangled: {})",
                g17(ppt_min),
                yes_no(entangled)
            )
            .unwrap();
            writeln!(
                out,
                "chsh value       = {} (u0 = {}, u1 = {}, local: {})",
                g17(chsh.value),
                g17(chsh.u0),
                g17(chsh.u1),
                yes_no(chsh.is_local)
            )
            .unwrap();
        }
        Some(Format::Csv) => {
            out.push_str(
                "theta,alpha,beta,t11,t22,t33,min_eigenvalue,is_psd,ppt_min,is_entangled,\
                 chsh_value,chsh_u0,chsh_u1,is_local\n",
            );
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                g17(args.theta),
                g17(args.alpha),
                args.beta.map_or("NaN".to_string(), g17),
                g17(diag[0]),
                g17(diag[1]),
                g17(diag[2]),
                g17(min_eig),
                is_psd,
                g17(ppt_min),
                entangled,
                g17(chsh.value),
                g17(chsh.u0),
                g17(chsh.u1),
                chsh.is_local
            )
            .unwrap();
        }
        Some(Format::Json) => {
            writeln!(
                out,
                "{{\"theta\": {}, \"alpha\": {}, \"beta\": {}, \"t_diag\": [{}, {}, {}], \
                 \"min_eigenvalue\": {}, \"is_psd\": {}, \"ppt_min\": {}, \"is_entangled\": {}, \
                 \"chsh_value\": {}, \"chsh_u0\": {}, \"chsh_u1\": {}, \"is_local\": {}}}",
                g17_json(args.theta),
                g17_json(args.alpha),
                args.beta.map_or("null".to_string(), g17_json),
                g17_json(diag[0]),
                g17_json(diag[1]),
                g17_json(diag[2]),
                g17_json(min_eig),
                is_psd,
                g17_json(ppt_min),
                entangled,
                g17_json(chsh.value),
                g17_json(chsh.u0),
                g17_json(chsh.u1),
                chsh.is_local
            )
            .unwrap();
        }
    }
    emit(args.output.as_deref(), &out)?;
    Ok(0)
}

pub fn sequence(args: SequenceArgs) -> CmdResult {
    let p = ProtocolParams::new(args.theta, args.alpha, args.epsilon)?.with_max_bobs(args.max_bobs);
    let trace = sequence_trace(&p)?;
    let n_bobs = trace.steps.len();
    let termination = match trace.sharpness.termination {
        Termination::ReachedCap => "reached_cap",
        Termination::EscapedUnitInterval => "escaped_unit_interval",
    };

    let mut out = String::new();
    match args.format {
        None => {
            writeln!(
                out,
                "{:>4}  {:>24}  {:>24}  {:>24}  {:>24}",
                "k", "lambda_k", "witness_expectation", "ppt_min_before", "chsh_before"
            )
            .unwrap();
            for s in &trace.steps {
                writeln!(
                    out,
                    "{:>4}  {:>24}  {:>24}  {:>24}  {:>24}",
                    s.index,
                    g17(s.sharpness),
                    g17(s.witness_expectation),
                    g17(s.ppt_min_before),
                    g17(s.chsh_before)
                )
                .unwrap();
            }
            writeln!(out, "n_bobs = {n_bobs} (termination: {termination})").unwrap();
        }
        Some(Format::Csv) => {
            out.push_str("k,lambda,witness_expectation,ppt_min_before,chsh_before\n");
            for s in &trace.steps {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    s.index,
                    g17(s.sharpness),
                    g17(s.witness_expectation),
                    g17(s.ppt_min_before),
                    g17(s.chsh_before)
                )
                .unwrap();
            }
        }
        Some(Format::Json) => {
            writeln!(
                out,
                "{{\"n_bobs\": {n_bobs}, \"termination\": \"{termination}\", \"steps\": ["
            )
            .unwrap();
            for (i, s) in trace.steps.iter().enumerate() {
                let comma = if i + 1 < n_bobs { "," } else { "" };
                writeln!(
                    out,
                    "  {{\"k\": {}, \"lambda\": {}, \"witness_expectation\": {}, \
                     \"ppt_min_before\": {}, \"chsh_before\": {}}}{comma}",
                    s.index,
                    g17_json(s.sharpness),
                    g17_json(s.witness_expectation),
                    g17_json(s.ppt_min_before),
                    g17_json(s.chsh_before)
                )
                .unwrap();
            }
            writeln!(out, "]}}").unwrap();
        }
    }
    emit(args.output.as_deref(), &out)?;
    Ok(0)
}

struct SweepRecord {
    theta: f64,
    alpha: f64,
    epsilon: f64,
    n_bobs: usize,
    lambda_first: f64,
    lambda_last: f64,
    chsh_initial: f64,
    ppt_min_initial: f64,
    ok: bool,
}

pub fn sweep(args: SweepArgs) -> CmdResult {
    if args.theta_steps == 0 {
        return Err(CliError {
            exit_code: 2,
            message: "theta-steps must be >= 1".into(),
        });
    }
    if !(args.theta_min > 0.0 && args.theta_min <= args.theta_max) {
        return Err(CliError {
            exit_code: 2,
            message: "need 0 < theta-min <= theta-max".into(),
        });
    }
    if args.epsilons.is_empty() {
        return Err(CliError {
            exit_code: 2,
            message: "epsilons list must be nonempty".into(),
        });
    }

    let thetas = theta_grid(
        args.theta_min,
        args.theta_max,
        args.theta_steps,
        args.theta_scale,
    );
    let mut epsilons = args.epsilons.clone();
    epsilons.sort_by(|a, b| a.partial_cmp(b).expect("finite epsilon"));

    // Rows ordered by (epsilon, theta), both ascending; each grid point is
    // self-contained, so the output is independent of evaluation order.
    let mut records = Vec::with_capacity(epsilons.len() * thetas.len());
    for &epsilon in &epsilons {
        for &theta in &thetas {
            records.push(sweep_point(theta, args.alpha, epsilon, args.max_bobs)?);
        }
    }

    let mut out = String::new();
    match args.format {
        Format::Csv => {
            out.push_str(
                "theta,alpha,epsilon,n_bobs,lambda_first,lambda_last,chsh_initial,\
                 ppt_min_initial,status\n",
            );
            for r in &records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    g17(r.theta),
                    g17(r.alpha),
                    g17(r.epsilon),
                    r.n_bobs,
                    g17(r.lambda_first),
                    g17(r.lambda_last),
                    g17(r.chsh_initial),
                    g17(r.ppt_min_initial),
                    status(r.ok)
                )
                .unwrap();
            }
        }
        Format::Json => {
            out.push_str("{\"records\": [\n");
            for (i, r) in records.iter().enumerate() {
                let comma = if i + 1 < records.len() { "," } else { "" };
                writeln!(
                    out,
                    "  {{\"theta\": {}, \"alpha\": {}, \"epsilon\": {}, \"n_bobs\": {}, \
                     \"lambda_first\": {}, \"lambda_last\": {}, \"chsh_initial\": {}, \
                     \"ppt_min_initial\": {}, \"status\": \"{}\"}}{comma}",
                    g17_json(r.theta),
                    g17_json(r.alpha),
                    g17_json(r.epsilon),
                    r.n_bobs,
                    g17_json(r.lambda_first),
                    g17_json(r.lambda_last),
                    g17_json(r.chsh_initial),
                    g17_json(r.ppt_min_initial),
                    status(r.ok)
                )
                .unwrap();
            }
            out.push_str("]}\n");
        }
    }
    emit(args.output.as_deref(), &out)?;
    Ok(0)
}

fn sweep_point(
    theta: f64,
    alpha: f64,
    epsilon: f64,
    max_bobs: usize,
) -> Result<SweepRecord, CliError> {
    let invalid = SweepRecord {
        theta,
        alpha,
        epsilon,
        n_bobs: 0,
        lambda_first: f64::NAN,
        lambda_last: f64::NAN,
        chsh_initial: f64::NAN,
        ppt_min_initial: f64::NAN,
        ok: false,
    };
    let p = match ProtocolParams::new(theta, alpha, epsilon) {
        Ok(p) => p.with_max_bobs(max_bobs),
        // Out-of-window grid points become status rows, not failures.
        Err(seqwit::Error::InvalidParams(_)) => return Ok(invalid),
        Err(e) => return Err(e.into()),
    };
    if epsilon <= 0.0 {
        return Ok(invalid);
    }
    let state = make_initial_state(&p)?;
    // count_bobs re-verifies the analytic count against the simulated run;
    // disagreement surfaces as exit code 3.
    let n_bobs = count_bobs(&p)?;
    let seq = lambda_sequence(&p)?;
    let valid = seq.valid_values();
    Ok(SweepRecord {
        theta,
        alpha,
        epsilon,
        n_bobs,
        lambda_first: valid.first().copied().unwrap_or(f64::NAN),
        lambda_last: valid.last().copied().unwrap_or(f64::NAN),
        chsh_initial: chsh_value(&state).value,
        ppt_min_initial: ppt_min_eigenvalue(&state)?,
        ok: true,
    })
}

fn theta_grid(min: f64, max: f64, steps: usize, scale: crate::ThetaScale) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    let n = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            // Endpoints are pinned exactly; exp(ln x) can land 1 ulp above
            // x and push the top of the grid out of the valid window.
            if i == 0 {
                return min;
            }
            if i == steps - 1 {
                return max;
            }
            let f = i as f64 / n;
            match scale {
                crate::ThetaScale::Log => (min.ln() + f * (max.ln() - min.ln())).exp(),
                crate::ThetaScale::Linear => min + f * (max - min),
            }
        })
        .collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "invalid_params"
    }
}

struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let mut suites = Vec::new();
    if args.samples == 0 {
        println!("warning: samples = 0, Monte-Carlo suites pass vacuously");
    }
    suites.push(pauli_roundtrip_suite(args.seed));
    suites.push(product_nonnegativity_suite(args.seed, args.samples));
    suites.push(channel_equivalence_suite(args.seed));
    suites.push(lemma_suite());
    suites.push(locality_suite());

    let mut all_passed = true;
    for s in &suites {
        let verdict = if s.passed { "pass" } else { "FAIL" };
        println!("{:<28} {} ({})", s.name, verdict, s.detail);
        all_passed &= s.passed;
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn pauli_roundtrip_suite(seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let rho = seqwit::sample_density_matrix(&mut rng);
        match rho.decompose() {
            Ok(state) => worst = worst.max(rho.max_abs_diff(&state.reconstruct())),
            Err(_) => worst = f64::INFINITY,
        }
    }
    Suite {
        name: "pauli-roundtrip",
        passed: worst < tol::ROUNDTRIP_TOL,
        detail: format!("1000 states, max deviation {worst:.2e}"),
    }
}

fn product_nonnegativity_suite(seed: u64, samples: usize) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut min = f64::INFINITY;
    let mut worst_gap = 0.0f64;
    for _ in 0..samples {
        let p = sample_product_state(&mut rng);
        let w = Witness::new([
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
        ])
        .expect("sharpness in range");
        let direct = w.expectation_product(&p);
        let oracle = w.matrix().trace_product(&p.to_state().reconstruct());
        min = min.min(direct);
        worst_gap = worst_gap.max((direct - oracle).abs());
    }
    let passed = samples == 0 || (min >= -1e-12 && worst_gap < 1e-12);
    Suite {
        name: "product-nonnegativity",
        passed,
        detail: if samples == 0 {
            "vacuous (0 samples)".to_string()
        } else {
            format!("{samples} draws, min {min:.2e}, trace-route gap {worst_gap:.2e}")
        },
    }
}

fn channel_equivalence_suite(seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut worst = 0.0f64;
    let mut trace_drift = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for _ in 0..1000 {
        let state = sample_two_qubit_state(&mut rng);
        let lam: f64 = rng.gen_range(f64::EPSILON..=1.0);
        let tensor = apply_bob_channel(&state, lam).expect("lambda in range");
        let dense = apply_bob_channel_dense(&state.reconstruct(), lam).expect("lambda in range");
        worst = worst.max(tensor.reconstruct().max_abs_diff(&dense));
        trace_drift = trace_drift.max((dense.trace() - 1.0).abs());
        min_eig = min_eig.min(dense.eigenvalues().expect("hermitian")[0]);
    }
    Suite {
        name: "channel-equivalence",
        passed: worst < tol::CHANNEL_EQUIV_TOL && trace_drift < 1e-12 && min_eig >= -tol::PSD_TOL,
        detail: format!(
            "1000 pairs, max route gap {worst:.2e}, trace drift {trace_drift:.2e}, \
             min eigenvalue {min_eig:.2e}"
        ),
    }
}

fn lemma_suite() -> Suite {
    let thetas = log_grid(1e-3, std::f64::consts::FRAC_PI_4, 50);
    let mut checked = 0usize;
    for &theta in &thetas {
        for epsilon in [0.0, 0.01] {
            let p = match ProtocolParams::new(theta, 1.0, epsilon) {
                Ok(p) => p,
                Err(e) => {
                    return Suite {
                        name: "lemma-checks",
                        passed: false,
                        detail: format!("parameter construction failed: {e}"),
                    }
                }
            };
            for report in [verify_lemma1(&p), verify_lemma2(&p)] {
                match report {
                    Ok(r) if r.passed => checked += r.comparisons,
                    Ok(r) => {
                        return Suite {
                            name: "lemma-checks",
                            passed: false,
                            detail: r
                                .first_violation
                                .unwrap_or_else(|| "unknown violation".into()),
                        }
                    }
                    Err(e) => {
                        return Suite {
                            name: "lemma-checks",
                            passed: false,
                            detail: e.to_string(),
                        }
                    }
                }
            }
        }
    }
    Suite {
        name: "lemma-checks",
        passed: true,
        detail: format!("50 log-spaced thetas x 2 epsilons, {checked} comparisons"),
    }
}

fn locality_suite() -> Suite {
    let mut worst = 0.0f64;
    let mut runs = 0usize;
    for theta in [0.01, 0.1, std::f64::consts::FRAC_PI_4] {
        for epsilon in [0.1, 0.01, 0.001] {
            let p = match ProtocolParams::new(theta, 1.0, epsilon) {
                Ok(p) => p,
                Err(e) => {
                    return Suite {
                        name: "locality-preservation",
                        passed: false,
                        detail: e.to_string(),
                    }
                }
            };
            match sequence_trace(&p) {
                Ok(trace) => {
                    runs += 1;
                    for step in &trace.steps {
                        worst = worst.max(step.chsh_before);
                    }
                    worst = worst.max(chsh_value(&trace.final_state).value);
                }
                Err(e) => {
                    return Suite {
                        name: "locality-preservation",
                        passed: false,
                        detail: e.to_string(),
                    }
                }
            }
        }
    }
    Suite {
        name: "locality-preservation",
        passed: worst <= 1.0 + tol::CHSH_LOCAL_TOL,
        detail: format!("{runs} runs, max CHSH value {worst:.15}"),
    }
}

fn log_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    theta_grid(min, max, steps, crate::ThetaScale::Log)
}

pub fn run(command: crate::Command) -> i32 {
    let result = match command {
        crate::Command::StateInfo(args) => state_info(args),
        crate::Command::Sequence(args) => sequence(args),
        crate::Command::Sweep(args) => sweep(args),
        crate::Command::Verify(args) => verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code
        }
    }
}
