//! `stateid`: identification solves, direct-product checks, counterexample
//! reproductions, protocol simulation, and the RAC bound calculator.
//!
//! Exit codes: 0 success, 1 invariant violation (the report is still
//! emitted), 2 input error.

mod input;

use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

use stateid::classical::{conditional_error_classical, lp_oracle, optimal_classical, ClassicalPair};
use stateid::ident::{
    check_corollary_mixed, check_direct_product_pure, conditional_error, d_eps_parity, d_eps_quad,
    d_eps_single, dual_lift, lift_z, parity_counterexample_measurement,
    quad_counterexample_measurement, tilted_pair, IdentPair, IdentQuad, PredictorMeasurement,
};
use stateid::linmat::DensityMatrix;
use stateid::smp::{
    estimate_success, gen_matching, p1_private_sqrt, p1_pub_protocol, p2_entangled_exact,
    p2_entangled_sample, p2_sublinear, rac_bound, P1Input, P2Input, PredictorSpec, RefereeOutput,
};

#[derive(Parser)]
#[command(name = "stateid", version, about = "Bounded-error state identification toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Duality-gap tolerance echoed into the report and used for checks.
    #[arg(long, default_value_t = 1e-5)]
    tol_gap: f64,
    /// Feasibility tolerance echoed into the report and used for checks.
    #[arg(long, default_value_t = 1e-8)]
    tol_feas: f64,
    /// Also write the report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Identification values and certificates.
    Ident {
        #[command(subcommand)]
        sub: IdentCmd,
    },
    /// The diagonal (classical) case.
    Classical {
        #[command(subcommand)]
        sub: ClassicalCmd,
    },
    /// Protocol simulation.
    Sim {
        #[command(subcommand)]
        sub: SimCmd,
    },
    /// Counterexample reproductions.
    Counterexample {
        #[command(subcommand)]
        sub: CounterCmd,
    },
    /// Random-access-code bound calculator.
    Rac {
        #[command(subcommand)]
        sub: RacCmd,
    },
}

#[derive(Subcommand)]
enum IdentCmd {
    /// Single-register value and dual certificate.
    Single {
        /// Pair file with fields alpha0, alpha1.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Two-register (both bits) value and dual certificate.
    Quad {
        /// Quad file with fields alpha0, alpha1, beta0, beta1.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Parity-of-both-bits value.
    Parity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Direct product bound check (pure alphas, or --mixed for the
    /// trace-distance corollary).
    DirectProduct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        mixed: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Lifts the single-register certificate on the betas to a
    /// two-register certificate at eps/2.
    DualLift {
        /// Quad file; alpha0/alpha1 must be amplitude vectors.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ClassicalCmd {
    /// Greedy solution with the LP oracle cross-check.
    Solve {
        /// Comma-separated probabilities of the first distribution.
        #[arg(long)]
        p: String,
        /// Comma-separated probabilities of the second distribution.
        #[arg(long)]
        q: String,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Shared-randomness protocol for P1.
    P1Pub {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Instance size when generating a random instance.
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Shared random indices per run.
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Private-randomness sqrt(n) protocol for P1.
    P1Sqrt {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Entanglement protocol for P2.
    P2Ent {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Enumerate the exact outcome distribution instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Required unless --exact with an input file.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sublinear subset protocol for P2.
    P2Sub {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        s_size: usize,
        #[arg(long, default_value_t = 3)]
        copies: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum CounterCmd {
    /// Tilted-pair parity instance: parity value of order delta^2 while
    /// both single registers are also of order delta^2.
    Parity {
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.49)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// The explicit 0.251-predictor with conditional error near 1/4.
    Quarter {
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 0.251)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum RacCmd {
    /// Evaluates sum lambda_i (1 - H(eps_i)) against the qubit budget.
    Check {
        /// Comma-separated answer probabilities.
        #[arg(long)]
        lambda: String,
        /// Comma-separated conditional errors.
        #[arg(long)]
        eps: String,
        /// Qubit budget q.
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        common: Common,
    },
}

enum CliError {
    Input(String),
}

type CResult<T> = Result<T, CliError>;

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// A finished run: the report body plus any invariant violations.
struct Outcome {
    config: Value,
    results: Value,
    violations: Vec<String>,
    out: Option<PathBuf>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own help/version output exits 0; argument errors are
            // input errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let outcome = match dispatch(cli.cmd) {
        Ok(o) => o,
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            return 2;
        }
    };
    let report = json!({
        "config": outcome.config,
        "results": outcome.results,
        "violations": outcome.violations,
        "timing": { "seconds": started.elapsed().as_secs_f64() },
    });
    let text = serde_json::to_string_pretty(&report).expect("report serialization");
    println!("{text}");
    if let Some(path) = outcome.out {
        if let Err(e) = std::fs::write(&path, text + "\n") {
            eprintln!("input error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if outcome.violations.is_empty() {
        0
    } else {
        for v in &outcome.violations {
            eprintln!("violation: {v}");
        }
        1
    }
}

fn dispatch(cmd: Cmd) -> CResult<Outcome> {
    match cmd {
        Cmd::Ident { sub } => ident_cmd(sub),
        Cmd::Classical { sub } => classical_cmd(sub),
        Cmd::Sim { sub } => sim_cmd(sub),
        Cmd::Counterexample { sub } => counter_cmd(sub),
        Cmd::Rac { sub } => rac_cmd(sub),
    }
}

fn common_config(c: &Common) -> Value {
    json!({ "tol_gap": c.tol_gap, "tol_feas": c.tol_feas })
}

fn measurement_summary(m: &PredictorMeasurement) -> Value {
    let names: &[&str] = match m {
        PredictorMeasurement::Binary { .. } => &["e0", "e1"],
        PredictorMeasurement::Quad { .. } => &["e00", "e01", "e10", "e11"],
    };
    let traces: Vec<f64> = m.elements().iter().map(|e| e.trace()).collect();
    json!({
        "outcomes": names,
        "element_traces": traces,
        "abstain_trace": m.abstain().trace(),
    })
}

fn ident_cmd(sub: IdentCmd) -> CResult<Outcome> {
    match sub {
        IdentCmd::Single { input, eps, common } => {
            let (a0, a1) = input::load_pair(&input).map_err(CliError::Input)?;
            let pair = IdentPair::new(a0.clone(), a1.clone(), eps).map_err(input_err)?;
            let (value, m, cert) = d_eps_single(&pair).map_err(input_err)?;
            let min_slack = cert.min_slack(&a0, &a1, eps);
            let gap = (cert.value - value).abs();
            let mut violations = Vec::new();
            if min_slack < -common.tol_feas {
                violations.push(format!("dual certificate slack {min_slack} below tolerance"));
            }
            if gap > common.tol_gap {
                violations.push(format!("duality gap {gap} above tolerance"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "ident single",
                    "input": input.display().to_string(),
                    "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "value": value,
                    "certificate": {
                        "trace": cert.value,
                        "z_b": cert.z_b,
                        "min_slack_eigenvalue": min_slack,
                    },
                    "gap": gap,
                    "measurement": measurement_summary(&m),
                }),
                violations,
                out: common.out,
            })
        }
        IdentCmd::Quad { input, eps, common } => {
            let f = input::load_quad(&input).map_err(CliError::Input)?;
            let quad = IdentQuad::new(f.alpha0, f.alpha1, f.beta0, f.beta1, eps)
                .map_err(input_err)?;
            let (value, m, cert) = d_eps_quad(&quad).map_err(input_err)?;
            let min_slack = cert.min_slack(&quad);
            let gap = (cert.value - value).abs();
            let mut violations = Vec::new();
            if min_slack < -common.tol_feas {
                violations.push(format!("dual certificate slack {min_slack} below tolerance"));
            }
            if gap > common.tol_gap {
                violations.push(format!("duality gap {gap} above tolerance"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "ident quad",
                    "input": input.display().to_string(),
                    "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "value": value,
                    "certificate": {
                        "trace": cert.value,
                        "z": cert.z,
                        "min_slack_eigenvalue": min_slack,
                    },
                    "gap": gap,
                    "measurement": measurement_summary(&m),
                }),
                violations,
                out: common.out,
            })
        }
        IdentCmd::Parity { input, eps, common } => {
            let f = input::load_quad(&input).map_err(CliError::Input)?;
            let quad = IdentQuad::new(f.alpha0, f.alpha1, f.beta0, f.beta1, eps)
                .map_err(input_err)?;
            let (value, m) = d_eps_parity(&quad).map_err(input_err)?;
            Ok(Outcome {
                config: json!({
                    "subcommand": "ident parity",
                    "input": input.display().to_string(),
                    "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "value": value,
                    "measurement": measurement_summary(&m),
                }),
                violations: Vec::new(),
                out: common.out,
            })
        }
        IdentCmd::DirectProduct {
            input,
            eps,
            mixed,
            common,
        } => {
            let f = input::load_quad(&input).map_err(CliError::Input)?;
            let quad = IdentQuad::new(f.alpha0, f.alpha1, f.beta0, f.beta1, eps)
                .map_err(input_err)?;
            let report = if mixed {
                check_corollary_mixed(&quad).map_err(input_err)?
            } else {
                check_direct_product_pure(&quad).map_err(input_err)?
            };
            let mut violations = Vec::new();
            if !report.satisfied {
                violations.push(format!(
                    "direct product bound violated: p {} > bound {}",
                    report.p, report.bound
                ));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "ident direct-product",
                    "input": input.display().to_string(),
                    "eps": eps,
                    "mixed": mixed,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "a_lower": report.a_lower,
                    "b": report.b,
                    "p": report.p,
                    "bound": report.bound,
                    "satisfied": report.satisfied,
                    "margin": report.margin,
                }),
                violations,
                out: common.out,
            })
        }
        IdentCmd::DualLift { input, eps, common } => {
            let f = input::load_quad(&input).map_err(CliError::Input)?;
            let (pa0, pa1) = f.pure_alphas.ok_or_else(|| {
                CliError::Input("dual-lift needs alpha0/alpha1 as amplitude vectors".into())
            })?;
            let pair = IdentPair::new(f.beta0.clone(), f.beta1.clone(), eps)
                .map_err(input_err)?;
            let (_, _, cert_b) = d_eps_single(&pair).map_err(input_err)?;
            let lifted = dual_lift(&pa0, &pa1, &f.beta0, &f.beta1, eps, &cert_b)
                .map_err(input_err)?;
            let overlap = pa1.inner(&pa0).norm();
            let delta_sq = (1.0 - overlap * overlap).max(0.0);
            let half = IdentQuad::new(
                DensityMatrix::from_pure(&pa0),
                DensityMatrix::from_pure(&pa1),
                f.beta0.clone(),
                f.beta1.clone(),
                eps / 2.0,
            )
            .map_err(input_err)?;
            let min_slack = lifted.min_slack(&half);
            let trace_bound = 16.0 * delta_sq * cert_b.value;
            let mut violations = Vec::new();
            if min_slack < -common.tol_feas {
                violations.push(format!("lifted certificate slack {min_slack} below tolerance"));
            }
            if lifted.value > trace_bound + common.tol_feas {
                violations.push(format!(
                    "lifted trace {} exceeds 16 delta^2 Tr[X_b] = {trace_bound}",
                    lifted.value
                ));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "ident dual-lift",
                    "input": input.display().to_string(),
                    "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "single_certificate": { "trace": cert_b.value, "z_b": cert_b.z_b },
                    "lifted_certificate": {
                        "trace": lifted.value,
                        "z": lifted.z,
                        "expected_z": lift_z(eps, cert_b.z_b),
                        "min_slack_eigenvalue": min_slack,
                    },
                    "delta_sq": delta_sq,
                    "trace_bound": trace_bound,
                }),
                violations,
                out: common.out,
            })
        }
    }
}

fn classical_cmd(sub: ClassicalCmd) -> CResult<Outcome> {
    match sub {
        ClassicalCmd::Solve { p, q, eps, common } => {
            let pv = input::parse_reals(&p, "--p").map_err(CliError::Input)?;
            let qv = input::parse_reals(&q, "--q").map_err(CliError::Input)?;
            let pair = ClassicalPair::new(pv, qv, eps).map_err(input_err)?;
            let (value, m) = optimal_classical(&pair);
            let err = conditional_error_classical(&pair, &m);
            let lp = lp_oracle(&pair).map_err(input_err)?;
            let mut violations = Vec::new();
            if (value - lp).abs() > 1e-9 {
                violations.push(format!("greedy {value} and LP oracle {lp} disagree"));
            }
            if err > eps + 1e-12 {
                violations.push(format!("measurement error {err} exceeds eps"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "classical solve",
                    "p": p,
                    "q": q,
                    "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "value": value,
                    "lp_oracle": lp,
                    "conditional_error": err,
                    "measurement": { "guesses": m.guesses, "fractions": m.fractions },
                }),
                violations,
                out: common.out,
            })
        }
    }
}

fn random_p1(n: usize, rng: &mut ChaCha8Rng) -> CResult<P1Input> {
    let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let y: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let mut s = vec![0u8; n];
    for &i in idx.iter().take(n / 2) {
        s[i] = 1;
    }
    P1Input::new(x, s, y).map_err(input_err)
}

fn random_p2(n: usize, rng: &mut ChaCha8Rng) -> CResult<P2Input> {
    let k = rng.gen_range(0..n / 2);
    let matching = gen_matching(k, n).map_err(input_err)?;
    let edge_bits: Vec<u8> = (0..n / 2).map(|_| rng.gen_range(0..2u8)).collect();
    let y: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    P2Input::new(matching, edge_bits, y).map_err(input_err)
}

fn sim_cmd(sub: SimCmd) -> CResult<Outcome> {
    match sub {
        SimCmd::P1Pub {
            input,
            n,
            r,
            trials,
            seed,
            common,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = match &input {
                Some(path) => input::load_p1(path).map_err(CliError::Input)?,
                None => random_p1(n, &mut rng)?,
            };
            let cost = p1_pub_protocol(&inst, r, &mut rng)
                .map_err(input_err)?
                .cost;
            let (rate, stderr) = estimate_success(trials, &mut rng, |g| {
                p1_pub_protocol(&inst, r, g).expect("validated input").valid
            });
            let expected = 1.0 - 0.5f64.powi(r as i32);
            let consistent = (rate - expected).abs() <= 3.0 * stderr.max(1e-4);
            let mut violations = Vec::new();
            if !consistent {
                violations.push(format!(
                    "success rate {rate} not within 3 sigma of {expected}"
                ));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "sim p1-pub",
                    "input": input.as_ref().map(|p| p.display().to_string()),
                    "n": inst.n, "r": r, "trials": trials, "seed": seed,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "success_rate": rate,
                    "stderr": stderr,
                    "expected": expected,
                    "consistent": consistent,
                    "cost": cost_json(&cost),
                }),
                violations,
                out: common.out,
            })
        }
        SimCmd::P1Sqrt {
            input,
            n,
            reps,
            trials,
            seed,
            common,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = match &input {
                Some(path) => input::load_p1(path).map_err(CliError::Input)?,
                None => random_p1(n, &mut rng)?,
            };
            let cost = p1_private_sqrt(&inst, reps, &mut rng)
                .map_err(input_err)?
                .cost;
            let (rate, stderr) = estimate_success(trials, &mut rng, |g| {
                p1_private_sqrt(&inst, reps, g).expect("validated input").valid
            });
            let expected = 1.0 - 0.5f64.powi(reps as i32);
            let consistent = (rate - expected).abs() <= 3.0 * stderr.max(1e-4);
            let mut violations = Vec::new();
            if !consistent {
                violations.push(format!(
                    "success rate {rate} not within 3 sigma of {expected}"
                ));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "sim p1-sqrt",
                    "input": input.as_ref().map(|p| p.display().to_string()),
                    "n": inst.n, "reps": reps, "trials": trials, "seed": seed,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "success_rate": rate,
                    "stderr": stderr,
                    "expected": expected,
                    "consistent": consistent,
                    "cost": cost_json(&cost),
                }),
                violations,
                out: common.out,
            })
        }
        SimCmd::P2Ent {
            input,
            n,
            exact,
            trials,
            seed,
            common,
        } => {
            let inst = match (&input, seed) {
                (Some(path), _) => input::load_p2(path).map_err(CliError::Input)?,
                (None, Some(s)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    random_p2(n, &mut rng)?
                }
                (None, None) => {
                    return Err(CliError::Input(
                        "--seed is required when no input file is given".into(),
                    ))
                }
            };
            if exact {
                let dist = p2_entangled_exact(&inst).map_err(input_err)?;
                let total: f64 = dist.points.iter().map(|p| p.probability).sum();
                let mut violations = Vec::new();
                if (dist.success - 1.0).abs() > 1e-12 {
                    violations.push(format!("exact success {} is not 1", dist.success));
                }
                if (total - 1.0).abs() > 1e-12 {
                    violations.push(format!("distribution mass {total} is not 1"));
                }
                Ok(Outcome {
                    config: json!({
                        "subcommand": "sim p2-ent",
                        "input": input.as_ref().map(|p| p.display().to_string()),
                        "n": inst.n, "exact": true, "seed": seed,
                        "tolerances": common_config(&common),
                    }),
                    results: json!({
                        "success": dist.success,
                        "support_points": dist.points.len(),
                        "distribution_mass": total,
                        "cost": cost_json(&dist.cost),
                    }),
                    violations,
                    out: common.out,
                })
            } else {
                let s = seed.ok_or_else(|| {
                    CliError::Input("--seed is required for sampling mode".into())
                })?;
                let mut rng = ChaCha8Rng::seed_from_u64(s.wrapping_add(1));
                let (rate, stderr) = estimate_success(trials, &mut rng, |g| {
                    p2_entangled_sample(&inst, g).expect("validated input").valid
                });
                let mut violations = Vec::new();
                if rate != 1.0 {
                    violations.push(format!("sampled success rate {rate} is not 1"));
                }
                Ok(Outcome {
                    config: json!({
                        "subcommand": "sim p2-ent",
                        "input": input.as_ref().map(|p| p.display().to_string()),
                        "n": inst.n, "exact": false, "trials": trials, "seed": s,
                        "tolerances": common_config(&common),
                    }),
                    results: json!({ "success_rate": rate, "stderr": stderr }),
                    violations,
                    out: common.out,
                })
            }
        }
        SimCmd::P2Sub {
            input,
            n,
            s_size,
            copies,
            trials,
            seed,
            common,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = match &input {
                Some(path) => input::load_p2(path).map_err(CliError::Input)?,
                None => random_p2(n, &mut rng)?,
            };
            let mut answered = 0usize;
            let mut wrong = 0usize;
            for _ in 0..trials {
                let t = p2_sublinear(&inst, s_size, copies, &mut rng).map_err(input_err)?;
                match t.output {
                    RefereeOutput::Answer(_) => {
                        answered += 1;
                        if !t.valid {
                            wrong += 1;
                        }
                    }
                    _ => {}
                }
            }
            let mut violations = Vec::new();
            if wrong > 0 {
                violations.push(format!("{wrong} answered runs were invalid"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "sim p2-sub",
                    "input": input.as_ref().map(|p| p.display().to_string()),
                    "n": inst.n, "s_size": s_size, "copies": copies,
                    "trials": trials, "seed": seed,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "answer_rate": answered as f64 / trials as f64,
                    "answered": answered,
                    "invalid_answers": wrong,
                }),
                violations,
                out: common.out,
            })
        }
    }
}

fn cost_json(c: &stateid::smp::MessageCost) -> Value {
    json!({
        "alice_bits": c.alice_bits,
        "bob_bits": c.bob_bits,
        "alice_qubits": c.alice_qubits,
        "bob_qubits": c.bob_qubits,
        "shared_random_bits": c.shared_random_bits,
        "epr_pairs": c.epr_pairs,
    })
}

fn counter_cmd(sub: CounterCmd) -> CResult<Outcome> {
    match sub {
        CounterCmd::Parity { delta, eps, common } => {
            let (s0, s1) = tilted_pair(delta).map_err(input_err)?;
            let a0 = DensityMatrix::from_pure(&s0);
            let a1 = DensityMatrix::from_pure(&s1);
            let quad = IdentQuad::new(a0.clone(), a1.clone(), a0, a1, eps)
                .map_err(input_err)?;
            let (value, _) = d_eps_parity(&quad).map_err(input_err)?;
            let m = parity_counterexample_measurement(delta).map_err(input_err)?;
            let states = quad.product_states();
            let d2 = delta * delta;
            let (p00, p01) = match &m {
                PredictorMeasurement::Binary { e0, .. } => {
                    (e0.expectation(&states[0]), e0.expectation(&states[1]))
                }
                _ => unreachable!("parity measurement is binary"),
            };
            let want00 = d2 / (2.0 + d2);
            let want01 = d2 * ((1.0 - d2).sqrt() - 1.0).powi(2) / (2.0 + d2);
            let mut violations = Vec::new();
            if (p00 - want00).abs() > 1e-12 || (p01 - want01).abs() > 1e-12 {
                violations.push("closed-form probabilities do not match".into());
            }
            if value < d2 / 5.0 {
                violations.push(format!("parity value {value} below delta^2/5"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "counterexample parity",
                    "delta": delta, "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "parity_value": value,
                    "delta_sq": d2,
                    "explicit_measurement": {
                        "p_even_on_00": p00,
                        "p_even_on_01": p01,
                        "closed_form_00": want00,
                        "closed_form_01": want01,
                    },
                }),
                violations,
                out: common.out,
            })
        }
        CounterCmd::Quarter { delta, eps, common } => {
            let (s0, s1) = tilted_pair(delta).map_err(input_err)?;
            let a0 = DensityMatrix::from_pure(&s0);
            let a1 = DensityMatrix::from_pure(&s1);
            let quad = IdentQuad::new(a0.clone(), a1.clone(), a0, a1, eps)
                .map_err(input_err)?;
            let m = quad_counterexample_measurement(delta).map_err(input_err)?;
            let err = conditional_error(&m, &quad.product_states()).map_err(input_err)?;
            let (value, _, _) = d_eps_quad(&quad).map_err(input_err)?;
            let d2 = delta * delta;
            let mut violations = Vec::new();
            if err > eps {
                violations.push(format!("explicit measurement error {err} exceeds eps"));
            }
            if value < d2 / 3.0 {
                violations.push(format!("quad value {value} below delta^2/3"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "counterexample quarter",
                    "delta": delta, "eps": eps,
                    "tolerances": common_config(&common),
                }),
                results: json!({
                    "conditional_error": err,
                    "quad_value": value,
                    "delta_sq": d2,
                }),
                violations,
                out: common.out,
            })
        }
    }
}

fn rac_cmd(sub: RacCmd) -> CResult<Outcome> {
    match sub {
        RacCmd::Check { lambda, eps, q, common } => {
            let lambdas = input::parse_reals(&lambda, "--lambda").map_err(CliError::Input)?;
            let epss = input::parse_reals(&eps, "--eps").map_err(CliError::Input)?;
            if lambdas.len() != epss.len() {
                return Err(CliError::Input(
                    "--lambda and --eps must have the same length".into(),
                ));
            }
            let preds: Result<Vec<PredictorSpec>, _> = lambdas
                .iter()
                .zip(&epss)
                .map(|(&l, &e)| PredictorSpec::new(l, e))
                .collect();
            let preds = preds.map_err(input_err)?;
            let (lhs, satisfied) = rac_bound(&preds, q).map_err(input_err)?;
            let mut violations = Vec::new();
            if !satisfied {
                violations.push(format!("RAC bound violated: lhs {lhs} > q {q}"));
            }
            Ok(Outcome {
                config: json!({
                    "subcommand": "rac check",
                    "lambda": lambda, "eps": eps, "q": q,
                    "tolerances": common_config(&common),
                }),
                results: json!({ "lhs": lhs, "q": q, "satisfied": satisfied }),
                violations,
                out: common.out,
            })
        }
    }
}
