//! Exact solution of the diagonal (classical) identification problem: the
//! sorted-posterior greedy rule with a fractional boundary outcome, plus an
//! independent linear-programming oracle built on the [`crate::sdp`] solver
//! with 1x1 blocks.

use thiserror::Error;

use crate::sdp::{
    solve, Constraint, Relation, SdpProblem, SolveStatus, SolverOptions,
};
use crate::linmat::HermitianMatrix;
use crate::sdp::SdpError;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("sdp error: {0}")]
    Sdp(#[from] SdpError),
    #[error("solver did not converge: {0:?}")]
    SolverFailure(SolveStatus),
}

pub type Result<T> = std::result::Result<T, ClassicalError>;

/// Two distributions over the same outcome set, with the allowed
/// conditional-error budget.
#[derive(Debug, Clone)]
pub struct ClassicalPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub eps: f64,
}

impl ClassicalPair {
    pub fn new(p: Vec<f64>, q: Vec<f64>, eps: f64) -> Result<Self> {
        if p.len() != q.len() || p.is_empty() {
            return Err(ClassicalError::InvalidInput(
                "p and q must be nonempty and the same length".into(),
            ));
        }
        for v in p.iter().chain(q.iter()) {
            if !v.is_finite() || *v < 0.0 {
                return Err(ClassicalError::InvalidInput(
                    "probabilities must be finite and nonnegative".into(),
                ));
            }
        }
        for (name, vec) in [("p", &p), ("q", &q)] {
            let s: f64 = vec.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(ClassicalError::InvalidInput(format!(
                    "{name} sums to {s}, expected 1"
                )));
            }
        }
        if !(0.0..0.5).contains(&eps) {
            return Err(ClassicalError::InvalidInput(format!(
                "eps must be in [0, 1/2), got {eps}"
            )));
        }
        Ok(ClassicalPair { p, q, eps })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Per outcome: which hypothesis to guess and what fraction of the outcome's
/// mass to answer on.
#[derive(Debug, Clone)]
pub struct ClassicalMeasurement {
    pub guesses: Vec<u8>,
    pub fractions: Vec<f64>,
}

/// Conditional error of a measurement on a pair: wrong mass over answer
/// mass under the uniform prior, or 0 when nothing is answered.
pub fn conditional_error_classical(c: &ClassicalPair, m: &ClassicalMeasurement) -> f64 {
    let mut wrong = 0.0;
    let mut mass = 0.0;
    for i in 0..c.len() {
        let t = m.fractions[i];
        wrong += 0.5 * t * if m.guesses[i] == 0 { c.q[i] } else { c.p[i] };
        mass += 0.5 * t * (c.p[i] + c.q[i]);
    }
    if mass == 0.0 {
        0.0
    } else {
        wrong / mass
    }
}

/// Optimal answer probability and an attaining measurement, by the greedy
/// rule: sort outcomes by non-increasing posterior of the better guess,
/// answer fully while the cumulative conditional error stays within `eps`,
/// and answer the breaking outcome with the largest feasible fraction.
pub fn optimal_classical(c: &ClassicalPair) -> (f64, ClassicalMeasurement) {
    let n = c.len();
    let mut guesses = vec![0u8; n];
    let mut fractions = vec![0.0f64; n];
    // Per outcome: mass, wrong mass of the better guess.
    let mut order: Vec<usize> = Vec::new();
    let mut mass = vec![0.0f64; n];
    let mut wrong = vec![0.0f64; n];
    for i in 0..n {
        mass[i] = c.p[i] + c.q[i];
        guesses[i] = if c.p[i] >= c.q[i] { 0 } else { 1 };
        wrong[i] = c.p[i].min(c.q[i]);
        if mass[i] > 0.0 {
            order.push(i);
        }
    }
    // Non-increasing posterior = non-decreasing error ratio; stable by index.
    order.sort_by(|&a, &b| {
        (wrong[a] * mass[b])
            .partial_cmp(&(wrong[b] * mass[a]))
            .unwrap()
            .then(a.cmp(&b))
    });

    if c.eps == 0.0 {
        // Only error-free outcomes can be answered at all.
        for &i in &order {
            if wrong[i] == 0.0 {
                fractions[i] = 1.0;
            }
        }
    } else {
        let mut acc_wrong = 0.0;
        let mut acc_mass = 0.0;
        for &i in &order {
            if acc_wrong + wrong[i] <= c.eps * (acc_mass + mass[i]) {
                fractions[i] = 1.0;
                acc_wrong += wrong[i];
                acc_mass += mass[i];
            } else {
                // Largest t with acc_wrong + t*wrong <= eps*(acc_mass + t*mass);
                // the denominator is positive exactly when full answering fails.
                let denom = wrong[i] - c.eps * mass[i];
                if denom > 0.0 {
                    let t = (c.eps * acc_mass - acc_wrong) / denom;
                    fractions[i] = t.clamp(0.0, 1.0);
                }
                break;
            }
        }
    }

    let a = 0.5
        * fractions
            .iter()
            .zip(&mass)
            .map(|(&t, &m)| t * m)
            .sum::<f64>();
    (a, ClassicalMeasurement { guesses, fractions })
}

/// Independent oracle: the primal restricted to diagonal operators, as a
/// linear program over per-outcome answer variables `e0_i, e1_i`, solved
/// through the sdp module with 1x1 blocks.
///
/// When no variable can be answered with conditional error strictly below
/// `eps` the feasible region degenerates to the variables whose error is
/// exactly `eps` (every other variable is forced to zero by the aggregate
/// constraint), and the program is solved on that face; this also covers
/// `eps = 0`. Without the restriction the feasible set has no interior and
/// the interior-point method has no central path.
pub fn lp_oracle(c: &ClassicalPair) -> Result<f64> {
    let n = c.len();
    // Variable list: (outcome, wrong coefficient, mass coefficient).
    let mut vars: Vec<(usize, f64, f64)> = Vec::new();
    for i in 0..n {
        let m = c.p[i] + c.q[i];
        if m > 0.0 {
            vars.push((i, c.q[i], m));
            vars.push((i, c.p[i], m));
        }
    }
    let interior = vars.iter().any(|&(_, w, m)| w < c.eps * m);
    let kept: Vec<(usize, f64, f64)> = if interior {
        vars
    } else {
        vars.into_iter()
            .filter(|&(_, w, m)| (w - c.eps * m).abs() <= 1e-12)
            .collect()
    };
    if kept.is_empty() {
        return Ok(0.0);
    }

    let k = kept.len();
    let scalar = |v: f64| HermitianMatrix::from_diag(&[v]);
    let objective: Vec<HermitianMatrix> = kept.iter().map(|&(_, _, m)| scalar(0.5 * m)).collect();
    let mut constraints: Vec<Constraint> = Vec::new();
    // Per-outcome cap: the answer variables of one outcome sum to at most 1.
    for i in 0..n {
        if kept.iter().any(|&(j, _, _)| j == i) {
            constraints.push(Constraint {
                coeffs: kept
                    .iter()
                    .map(|&(j, _, _)| scalar(if j == i { 1.0 } else { 0.0 }))
                    .collect(),
                relation: Relation::Le,
                rhs: 1.0,
            });
        }
    }
    if interior {
        constraints.push(Constraint {
            coeffs: kept
                .iter()
                .map(|&(_, w, m)| scalar(0.5 * (w - c.eps * m)))
                .collect(),
            relation: Relation::Le,
            rhs: 0.0,
        });
    }
    let problem = SdpProblem {
        blocks: vec![1usize; k],
        objective,
        constraints,
        sense: crate::sdp::Sense::Maximize,
    };
    // Tighter than the defaults: the greedy cross-check asserts agreement
    // to 1e-9, which the interior-point method reaches comfortably on
    // these small linear programs.
    let opts = SolverOptions {
        gap_tol: 1e-11,
        feas_tol: 1e-11,
        ..SolverOptions::default()
    };
    let sol = solve(&problem, &opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(ClassicalError::SolverFailure(sol.status));
    }
    Ok(sol.primal_value)
}

#[cfg(test)]
mod tests;
