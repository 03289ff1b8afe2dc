//! Bounded-error state identification values, dual certificates, the
//! dual-lift construction behind the direct product theorem, and the
//! counterexample reproductions.
//!
//! All optimization goes through the [`crate::sdp`] solver; matrix
//! inequalities are encoded with explicit slack blocks over an
//! orthonormal Hermitian basis.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linmat::{
    eig_hermitian, pos_part, trace_norm, ComplexMatrix, DensityMatrix, HermitianMatrix,
    LinmatError, PureState,
};
use crate::sdp::{
    check_primal_feasibility, hermitian_basis, solve, Constraint, Relation, SdpProblem,
    SdpSolution, Sense, SolveStatus, SolverOptions,
};

#[derive(Debug, Error)]
pub enum IdentError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear algebra error: {0}")]
    Linmat(#[from] LinmatError),
    #[error("SDP error: {0}")]
    Sdp(#[from] crate::sdp::SdpError),
    #[error("solver finished with status {0:?}")]
    SolverFailure(SolveStatus),
    #[error("state is not pure (top eigenvalue {0})")]
    NotPure(f64),
    #[error("dual certificate infeasible (worst slack eigenvalue {0})")]
    InfeasibleCertificate(f64),
}

pub type Result<T> = std::result::Result<T, IdentError>;

/// A single-register instance `(alpha_0, alpha_1, eps)`.
#[derive(Debug, Clone)]
pub struct IdentPair {
    pub alpha0: DensityMatrix,
    pub alpha1: DensityMatrix,
    pub eps: f64,
}

impl IdentPair {
    pub fn new(alpha0: DensityMatrix, alpha1: DensityMatrix, eps: f64) -> Result<Self> {
        if alpha0.dim() != alpha1.dim() {
            return Err(IdentError::InvalidInput("state dims differ".into()));
        }
        check_eps(eps)?;
        Ok(IdentPair { alpha0, alpha1, eps })
    }
}

/// A two-register instance: four product states `alpha_x (x) beta_y`.
#[derive(Debug, Clone)]
pub struct IdentQuad {
    pub alpha0: DensityMatrix,
    pub alpha1: DensityMatrix,
    pub beta0: DensityMatrix,
    pub beta1: DensityMatrix,
    pub eps: f64,
}

impl IdentQuad {
    pub fn new(
        alpha0: DensityMatrix,
        alpha1: DensityMatrix,
        beta0: DensityMatrix,
        beta1: DensityMatrix,
        eps: f64,
    ) -> Result<Self> {
        if alpha0.dim() != alpha1.dim() || beta0.dim() != beta1.dim() {
            return Err(IdentError::InvalidInput("state dims differ".into()));
        }
        check_eps(eps)?;
        Ok(IdentQuad {
            alpha0,
            alpha1,
            beta0,
            beta1,
            eps,
        })
    }

    /// The four product states in the order 00, 01, 10, 11.
    pub fn product_states(&self) -> [DensityMatrix; 4] {
        [
            self.alpha0.kron(&self.beta0),
            self.alpha0.kron(&self.beta1),
            self.alpha1.kron(&self.beta0),
            self.alpha1.kron(&self.beta1),
        ]
    }

    /// Same instance at a different error parameter.
    pub fn with_eps(&self, eps: f64) -> Result<IdentQuad> {
        check_eps(eps)?;
        let mut q = self.clone();
        q.eps = eps;
        Ok(q)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eps) {
        return Err(IdentError::InvalidInput(format!(
            "eps must lie in [0, 1/2), got {eps}"
        )));
    }
    Ok(())
}

/// Measurement with an implicit abstain element `I - sum of elements`.
#[derive(Debug, Clone)]
pub enum PredictorMeasurement {
    Binary {
        e0: HermitianMatrix,
        e1: HermitianMatrix,
    },
    Quad {
        e00: HermitianMatrix,
        e01: HermitianMatrix,
        e10: HermitianMatrix,
        e11: HermitianMatrix,
    },
}

impl PredictorMeasurement {
    pub fn elements(&self) -> Vec<&HermitianMatrix> {
        match self {
            PredictorMeasurement::Binary { e0, e1 } => vec![e0, e1],
            PredictorMeasurement::Quad { e00, e01, e10, e11 } => vec![e00, e01, e10, e11],
        }
    }

    pub fn dim(&self) -> usize {
        self.elements()[0].dim()
    }

    /// The implicit abstain element.
    pub fn abstain(&self) -> HermitianMatrix {
        let mut s = HermitianMatrix::identity(self.dim());
        for e in self.elements() {
            s = s.sub(e);
        }
        s
    }

    /// Elements PSD and summing to at most the identity, within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for e in self.elements() {
            let min = e.min_eigenvalue();
            if min < -tol {
                return Err(IdentError::InvalidInput(format!(
                    "measurement element has eigenvalue {min}"
                )));
            }
        }
        let min = self.abstain().min_eigenvalue();
        if min < -tol {
            return Err(IdentError::InvalidInput(format!(
                "element sum exceeds identity by {min} in eigenvalue"
            )));
        }
        Ok(())
    }
}

/// Probability mass of answering (not abstaining) under a uniform prior
/// over `states`.
pub fn answer_mass(m: &PredictorMeasurement, states: &[DensityMatrix]) -> Result<f64> {
    check_arity(m, states)?;
    let n = states.len() as f64;
    let mut mass = 0.0;
    for e in m.elements() {
        for s in states {
            mass += e.expectation(s) / n;
        }
    }
    Ok(mass)
}

/// Conditional error probability `Pr[wrong guess | guess]` under a uniform
/// prior; 0 when the answer mass is 0. A binary measurement paired with
/// two states reads them as the class states of outcomes 0 and 1; a quad
/// measurement requires four states ordered 00, 01, 10, 11.
pub fn conditional_error(m: &PredictorMeasurement, states: &[DensityMatrix]) -> Result<f64> {
    check_arity(m, states)?;
    let n = states.len() as f64;
    let mut wrong = 0.0;
    match m {
        PredictorMeasurement::Binary { e0, e1 } => {
            wrong += e0.expectation(&states[1]) / n;
            wrong += e1.expectation(&states[0]) / n;
        }
        PredictorMeasurement::Quad { .. } => {
            for (i, e) in m.elements().into_iter().enumerate() {
                for (j, s) in states.iter().enumerate() {
                    if i != j {
                        wrong += e.expectation(s) / n;
                    }
                }
            }
        }
    }
    let mass = answer_mass(m, states)?;
    if mass <= 0.0 {
        return Ok(0.0);
    }
    Ok((wrong / mass).max(0.0))
}

fn check_arity(m: &PredictorMeasurement, states: &[DensityMatrix]) -> Result<()> {
    let want = match m {
        PredictorMeasurement::Binary { .. } => 2,
        PredictorMeasurement::Quad { .. } => 4,
    };
    if states.len() != want {
        return Err(IdentError::InvalidInput(format!(
            "measurement arity {want} but {} states given",
            states.len()
        )));
    }
    for s in states {
        if s.dim() != m.dim() {
            return Err(IdentError::InvalidInput(
                "state and measurement dims differ".into(),
            ));
        }
    }
    Ok(())
}

/// Optimal zero-abstain discrimination: success `1/2 + ||a0 - a1||_tr / 2`,
/// achieved by the projector onto the support of the positive part of the
/// difference.
pub fn helstrom(
    alpha0: &DensityMatrix,
    alpha1: &DensityMatrix,
) -> Result<(f64, PredictorMeasurement)> {
    if alpha0.dim() != alpha1.dim() {
        return Err(IdentError::InvalidInput("state dims differ".into()));
    }
    let diff = alpha0.hermitian().sub(alpha1.hermitian());
    let success = 0.5 + trace_norm(&diff) / 2.0;
    let eig = crate::linmat::eig_hermitian(&diff);
    let ones: Vec<f64> = eig
        .eigenvalues()
        .iter()
        .map(|&l| if l > 0.0 { 1.0 } else { 0.0 })
        .collect();
    let e0 = eig.reconstruct_with(&ones);
    let e1 = HermitianMatrix::identity(alpha0.dim()).sub(&e0);
    Ok((success, PredictorMeasurement::Binary { e0, e1 }))
}

/// Dual certificate for the single-register problem: `Tr[X_b]` upper
/// bounds the identification value whenever `X_b` dominates both
/// mixtures `X_1`, `X_2` and `z_b >= 0`.
#[derive(Debug, Clone)]
pub struct DualCertificateSingle {
    pub x_b: HermitianMatrix,
    pub z_b: f64,
    pub value: f64,
}

/// The two dominated mixtures of the single-register dual at `(eps, z_b)`.
pub fn single_dual_targets(
    beta0: &DensityMatrix,
    beta1: &DensityMatrix,
    eps: f64,
    z_b: f64,
) -> [HermitianMatrix; 2] {
    let cp = 0.5 * (1.0 + eps * z_b);
    let cm = 0.5 * (1.0 - (1.0 - eps) * z_b);
    [
        beta0.hermitian().scale(cp).add(&beta1.hermitian().scale(cm)),
        beta1.hermitian().scale(cp).add(&beta0.hermitian().scale(cm)),
    ]
}

impl DualCertificateSingle {
    /// Worst slack eigenvalue over `{X_b >= 0, X_b >= X_1, X_b >= X_2}`;
    /// nonnegative (within tolerance) means feasible.
    pub fn min_slack(&self, beta0: &DensityMatrix, beta1: &DensityMatrix, eps: f64) -> f64 {
        let mut worst = self.x_b.min_eigenvalue();
        for t in single_dual_targets(beta0, beta1, eps, self.z_b) {
            worst = worst.min(self.x_b.sub(&t).min_eigenvalue());
        }
        worst
    }
}

/// Dual certificate for the two-register problem.
#[derive(Debug, Clone)]
pub struct DualCertificateQuad {
    pub x: HermitianMatrix,
    pub z: f64,
    pub value: f64,
}

/// The four dominated mixtures `X'_1..X'_4` of the two-register dual at
/// error parameter `eps` (the quad instance's own), in outcome order
/// 00, 01, 10, 11.
pub fn quad_dual_targets(q: &IdentQuad, z: f64) -> [HermitianMatrix; 4] {
    let states = q.product_states();
    let cp = 0.25 * (1.0 + q.eps * z);
    let cm = 0.25 * (1.0 - (1.0 - q.eps) * z);
    std::array::from_fn(|k| {
        let mut t = HermitianMatrix::zeros(states[0].dim());
        for (j, s) in states.iter().enumerate() {
            t = t.add(&s.hermitian().scale(if j == k { cp } else { cm }));
        }
        t
    })
}

impl DualCertificateQuad {
    /// Worst slack eigenvalue over `{X >= 0, X >= X'_i}` for the given
    /// quad instance (at the quad's own eps).
    pub fn min_slack(&self, q: &IdentQuad) -> f64 {
        let mut worst = self.x.min_eigenvalue();
        for t in quad_dual_targets(q, self.z) {
            worst = worst.min(self.x.sub(&t).min_eigenvalue());
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// SDP constructions
// ---------------------------------------------------------------------------

/// Outcome elements plus a slack block capped by the identity, with the
/// conditional-error constraint `wrong <= eps * answer mass`.
fn predictor_problem(
    dim: usize,
    // Per outcome: (objective state, wrong-mass state), both already
    // carrying their prior weights.
    outcomes: &[(HermitianMatrix, HermitianMatrix)],
    eps: f64,
) -> SdpProblem {
    let k = outcomes.len();
    let basis = hermitian_basis(dim);
    let id = HermitianMatrix::identity(dim);
    let zero = HermitianMatrix::zeros(dim);

    let mut constraints: Vec<Constraint> = basis
        .iter()
        .map(|bk| Constraint {
            coeffs: (0..=k).map(|_| bk.clone()).collect(),
            relation: Relation::Eq,
            rhs: bk.inner(&id),
        })
        .collect();
    // wrong - eps * answer <= 0.
    let mut err_coeffs: Vec<HermitianMatrix> = outcomes
        .iter()
        .map(|(obj, wrong)| wrong.sub(&obj.scale(eps)))
        .collect();
    err_coeffs.push(zero.clone());
    constraints.push(Constraint {
        coeffs: err_coeffs,
        relation: Relation::Le,
        rhs: 0.0,
    });

    let mut objective: Vec<HermitianMatrix> =
        outcomes.iter().map(|(obj, _)| obj.clone()).collect();
    objective.push(zero);

    SdpProblem {
        blocks: vec![dim; k + 1],
        objective,
        constraints,
        sense: Sense::Maximize,
    }
}

/// Orthonormal basis (as matrix columns) for the kernel of a PSD matrix;
/// `None` when the matrix has full rank.
fn kernel_basis(w: &HermitianMatrix) -> Option<ComplexMatrix> {
    let eig = eig_hermitian(w);
    let scale = eig
        .eigenvalues()
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    let tol = 1e-10 * scale.max(1.0);
    let cols: Vec<usize> = (0..w.dim())
        .filter(|&k| eig.eigenvalues()[k].abs() <= tol)
        .collect();
    if cols.is_empty() {
        return None;
    }
    let mut v = ComplexMatrix::zeros(w.dim(), cols.len());
    for (j, &k) in cols.iter().enumerate() {
        let vec = eig.eigenvector(k);
        for (i, &a) in vec.iter().enumerate() {
            v.set(i, j, a);
        }
    }
    Some(v)
}

/// `V^* M V` for an isometry `V` with orthonormal columns.
fn compress(v: &ComplexMatrix, m: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_exact(v.adjoint().mul(m.matrix()).mul(v))
}

/// `V F V^*`, embedding a reduced block back into the full space.
fn expand(v: &ComplexMatrix, f: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_exact(v.mul(f.matrix()).mul(&v.adjoint()))
}

/// At `eps = 0` the error constraint forces every outcome element onto the
/// kernel of its wrong-state mixture, so the constraint's slack variable has
/// no interior point and the interior-point method has no central path to
/// follow. Restricting each element to that kernel up front satisfies the
/// constraint identically and leaves a problem that is strictly feasible on
/// both sides. Returns the value, the outcome elements in the full space,
/// and the dual matrix assembled from the basis-equality multipliers.
fn solve_zero_eps(
    dim: usize,
    outcomes: &[(HermitianMatrix, HermitianMatrix)],
) -> Result<(f64, Vec<HermitianMatrix>, HermitianMatrix)> {
    let isometries: Vec<Option<ComplexMatrix>> =
        outcomes.iter().map(|(_, wrong)| kernel_basis(wrong)).collect();
    let active: Vec<(usize, &ComplexMatrix)> = isometries
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect();
    let basis = hermitian_basis(dim);
    let id = HermitianMatrix::identity(dim);

    let mut blocks: Vec<usize> = active.iter().map(|&(_, v)| v.cols()).collect();
    blocks.push(dim);
    let mut objective: Vec<HermitianMatrix> = active
        .iter()
        .map(|&(k, v)| compress(v, &outcomes[k].0))
        .collect();
    objective.push(HermitianMatrix::zeros(dim));
    let constraints: Vec<Constraint> = basis
        .iter()
        .map(|bm| Constraint {
            coeffs: active
                .iter()
                .map(|&(_, v)| compress(v, bm))
                .chain(std::iter::once(bm.clone()))
                .collect(),
            relation: Relation::Eq,
            rhs: bm.inner(&id),
        })
        .collect();
    let problem = SdpProblem {
        blocks,
        objective,
        constraints,
        sense: Sense::Maximize,
    };
    let sol = run(&problem)?;

    let mut elements = vec![HermitianMatrix::zeros(dim); outcomes.len()];
    for (slot, &(k, v)) in active.iter().enumerate() {
        elements[k] = expand(v, &sol.primal_blocks[slot]);
    }
    let mut x = HermitianMatrix::zeros(dim);
    for (bm, &y) in basis.iter().zip(&sol.dual_multipliers) {
        x = x.add(&bm.scale(y));
    }
    Ok((sol.primal_value, elements, x))
}

/// Completes a zero-eps dual certificate by choosing the error multiplier.
/// The reduced problem pins the dual matrix down only on the wrong-state
/// kernels; off those kernels any sufficiently large multiplier makes the
/// dominated mixtures harmless, and the slack is monotone in it, so a
/// doubling search finds one. A final identity shift clears residual
/// roundoff-level negativity.
fn fit_z(
    x: HermitianMatrix,
    targets: impl Fn(f64) -> Vec<HermitianMatrix>,
) -> (HermitianMatrix, f64) {
    let worst_at = |z: f64| {
        let mut worst = x.min_eigenvalue();
        for t in targets(z) {
            worst = worst.min(x.sub(&t).min_eigenvalue());
        }
        worst
    };
    let mut z = 0.0;
    let mut worst = worst_at(0.0);
    let mut cand = 1.0;
    while worst < -1e-9 && cand <= 1e18 {
        let w = worst_at(cand);
        if w > worst {
            worst = w;
            z = cand;
        }
        cand *= 2.0;
    }
    let x = if worst < 0.0 {
        x.add(&HermitianMatrix::identity(x.dim()).scale(-worst + 1e-14))
    } else {
        x
    };
    (x, z)
}

fn run(problem: &SdpProblem) -> Result<SdpSolution> {
    let sol = solve(problem, &SolverOptions::default())?;
    if sol.status != SolveStatus::Optimal {
        return Err(IdentError::SolverFailure(sol.status));
    }
    Ok(sol)
}

/// Reassembles the dual matrix `sum_k y_k B_k` from the basis-equality
/// multipliers (the first `dim^2` constraints), and reads the error
/// multiplier from the last one. Small negative slack is repaired by an
/// identity shift so the certificate is feasible outright.
fn extract_dual(
    sol: &SdpSolution,
    dim: usize,
    targets: &[HermitianMatrix],
) -> (HermitianMatrix, f64, f64) {
    let basis = hermitian_basis(dim);
    let mut x = HermitianMatrix::zeros(dim);
    for (bk, &y) in basis.iter().zip(&sol.dual_multipliers) {
        x = x.add(&bk.scale(y));
    }
    let z = sol.dual_multipliers[dim * dim].max(0.0);
    let mut worst = x.min_eigenvalue();
    for t in targets {
        worst = worst.min(x.sub(t).min_eigenvalue());
    }
    if worst < 0.0 {
        x = x.add(&HermitianMatrix::identity(dim).scale(-worst + 1e-14));
    }
    let value = x.trace();
    (x, z, value)
}

/// D_eps for a single-register pair: value, optimal measurement, and a
/// feasible dual certificate (strong duality holds; gap within 1e-5).
pub fn d_eps_single(
    p: &IdentPair,
) -> Result<(f64, PredictorMeasurement, DualCertificateSingle)> {
    let avg = DensityMatrix::average(&p.alpha0, &p.alpha1);
    let outcomes = [
        (avg.hermitian().clone(), p.alpha1.hermitian().scale(0.5)),
        (avg.hermitian().clone(), p.alpha0.hermitian().scale(0.5)),
    ];
    if p.eps == 0.0 {
        let (value, els, x_raw) = solve_zero_eps(p.alpha0.dim(), &outcomes)?;
        let m = PredictorMeasurement::Binary {
            e0: els[0].clone(),
            e1: els[1].clone(),
        };
        let (x_b, z_b) =
            fit_z(x_raw, |z| single_dual_targets(&p.alpha0, &p.alpha1, 0.0, z).to_vec());
        let value_cert = x_b.trace();
        return Ok((
            value,
            m,
            DualCertificateSingle {
                x_b,
                z_b,
                value: value_cert,
            },
        ));
    }
    let problem = predictor_problem(p.alpha0.dim(), &outcomes, p.eps);
    let sol = run(&problem)?;
    let m = PredictorMeasurement::Binary {
        e0: sol.primal_blocks[0].clone(),
        e1: sol.primal_blocks[1].clone(),
    };
    let z_guess = sol.dual_multipliers[p.alpha0.dim() * p.alpha0.dim()].max(0.0);
    let targets = single_dual_targets(&p.alpha0, &p.alpha1, p.eps, z_guess);
    let (x_b, z_b, value) = extract_dual(&sol, p.alpha0.dim(), &targets);
    Ok((
        sol.primal_value,
        m,
        DualCertificateSingle { x_b, z_b, value },
    ))
}

/// D_eps for the four product states of a quad.
pub fn d_eps_quad(q: &IdentQuad) -> Result<(f64, PredictorMeasurement, DualCertificateQuad)> {
    let states = q.product_states();
    let dim = states[0].dim();
    let avg: HermitianMatrix = states
        .iter()
        .fold(HermitianMatrix::zeros(dim), |acc, s| {
            acc.add(&s.hermitian().scale(0.25))
        });
    let outcomes: Vec<(HermitianMatrix, HermitianMatrix)> = (0..4)
        .map(|k| {
            let wrong = states
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(HermitianMatrix::zeros(dim), |acc, (_, s)| {
                    acc.add(&s.hermitian().scale(0.25))
                });
            (avg.clone(), wrong)
        })
        .collect();
    if q.eps == 0.0 {
        let (value, els, x_raw) = solve_zero_eps(dim, &outcomes)?;
        let m = PredictorMeasurement::Quad {
            e00: els[0].clone(),
            e01: els[1].clone(),
            e10: els[2].clone(),
            e11: els[3].clone(),
        };
        let (x, z) = fit_z(x_raw, |z| quad_dual_targets(q, z).to_vec());
        let value_cert = x.trace();
        return Ok((
            value,
            m,
            DualCertificateQuad {
                x,
                z,
                value: value_cert,
            },
        ));
    }
    let problem = predictor_problem(dim, &outcomes, q.eps);
    let sol = run(&problem)?;
    let m = PredictorMeasurement::Quad {
        e00: sol.primal_blocks[0].clone(),
        e01: sol.primal_blocks[1].clone(),
        e10: sol.primal_blocks[2].clone(),
        e11: sol.primal_blocks[3].clone(),
    };
    let z_guess = sol.dual_multipliers[dim * dim].max(0.0);
    let targets = quad_dual_targets(q, z_guess);
    let (x, z, value) = extract_dual(&sol, dim, &targets);
    Ok((sol.primal_value, m, DualCertificateQuad { x, z, value }))
}

/// D_eps for predicting the parity of the two bits: outcomes (even, odd)
/// plus abstain, with the four states grouped by parity at weight 1/4.
pub fn d_eps_parity(q: &IdentQuad) -> Result<(f64, PredictorMeasurement)> {
    let states = q.product_states();
    let dim = states[0].dim();
    let avg: HermitianMatrix = states
        .iter()
        .fold(HermitianMatrix::zeros(dim), |acc, s| {
            acc.add(&s.hermitian().scale(0.25))
        });
    let even = states[0].hermitian().scale(0.25).add(&states[3].hermitian().scale(0.25));
    let odd = states[1].hermitian().scale(0.25).add(&states[2].hermitian().scale(0.25));
    let outcomes = [(avg.clone(), odd), (avg, even)];
    if q.eps == 0.0 {
        let (value, els, _) = solve_zero_eps(dim, &outcomes)?;
        let m = PredictorMeasurement::Binary {
            e0: els[0].clone(),
            e1: els[1].clone(),
        };
        return Ok((value, m));
    }
    let problem = predictor_problem(dim, &outcomes, q.eps);
    let sol = run(&problem)?;
    let m = PredictorMeasurement::Binary {
        e0: sol.primal_blocks[0].clone(),
        e1: sol.primal_blocks[1].clone(),
    };
    Ok((sol.primal_value, m))
}

/// Solves the single-register problem and returns its dual certificate.
pub fn dual_single(
    beta0: &DensityMatrix,
    beta1: &DensityMatrix,
    eps: f64,
) -> Result<DualCertificateSingle> {
    let p = IdentPair::new(beta0.clone(), beta1.clone(), eps)?;
    let (_, _, cert) = d_eps_single(&p)?;
    Ok(cert)
}

// ---------------------------------------------------------------------------
// dual lift (direct product theorem machinery)
// ---------------------------------------------------------------------------

/// Two-dimensional reduction of a pure pair: overlap magnitude `c`,
/// `delta = sqrt(1 - c^2)`, and (when delta > 0) orthonormal vectors
/// perpendicular to each state inside their common span, with the global
/// phase fixed so the overlap is real nonnegative.
struct PureGeometry {
    c: f64,
    delta_sq: f64,
    /// `|a1_perp>` such that `|a0> = c|a1> + delta|a1_perp>`.
    perp1: Option<Vec<Complex64>>,
    /// `|a0_perp>` such that `|a1> = c|a0> + delta|a0_perp>` (phase-fixed).
    perp0: Option<Vec<Complex64>>,
}

fn pure_geometry(alpha0: &PureState, alpha1: &PureState) -> PureGeometry {
    let ip = alpha1.inner(alpha0); // <a1|a0>
    let c = ip.norm();
    let delta_sq = (1.0 - c * c).max(0.0);
    if delta_sq == 0.0 {
        return PureGeometry {
            c,
            delta_sq,
            perp1: None,
            perp0: None,
        };
    }
    let delta = delta_sq.sqrt();
    // Phase-fixed |a0'> with <a1|a0'> = c real.
    let phase = if c > 0.0 {
        ip.conj() / c
    } else {
        Complex64::new(1.0, 0.0)
    };
    let a0: Vec<Complex64> = alpha0.amplitudes().iter().map(|&v| v * phase).collect();
    let a1 = alpha1.amplitudes();
    let perp1: Vec<Complex64> = a0
        .iter()
        .zip(a1)
        .map(|(&v0, &v1)| (v0 - v1 * c) / delta)
        .collect();
    let perp0: Vec<Complex64> = a1
        .iter()
        .zip(&a0)
        .map(|(&v1, &v0)| (v1 - v0 * c) / delta)
        .collect();
    PureGeometry {
        c,
        delta_sq,
        perp1: Some(perp1),
        perp0: Some(perp0),
    }
}

/// The direct product theorem's lift: turns a feasible single-register
/// certificate at `eps` into a feasible two-register certificate at
/// `eps/2` with `Tr[X] <= 16 delta^2 Tr[X_b]`, following the published
/// construction `X = sum_i Pos(Y_i)` verbatim. Deterministic.
pub fn dual_lift(
    alpha0: &PureState,
    alpha1: &PureState,
    beta0: &DensityMatrix,
    beta1: &DensityMatrix,
    eps: f64,
    cert: &DualCertificateSingle,
) -> Result<DualCertificateQuad> {
    check_eps(eps)?;
    if alpha0.dim() != alpha1.dim() {
        return Err(IdentError::InvalidInput("alpha dims differ".into()));
    }
    let worst = cert.min_slack(beta0, beta1, eps);
    if worst < -1e-8 {
        return Err(IdentError::InfeasibleCertificate(worst));
    }
    let z = lift_z(eps, cert.z_b);
    let geo = pure_geometry(alpha0, alpha1);
    let dim = alpha0.dim() * beta0.dim();
    if geo.delta_sq == 0.0 {
        return Ok(DualCertificateQuad {
            x: HermitianMatrix::zeros(dim),
            z,
            value: 0.0,
        });
    }
    let perp1 = HermitianMatrix::outer(geo.perp1.as_ref().unwrap());
    let perp0 = HermitianMatrix::outer(geo.perp0.as_ref().unwrap());
    let [x1, x2] = single_dual_targets(beta0, beta1, eps, cert.z_b);
    // Pos(a_perp (x) X_i) = a_perp (x) Pos(X_i) since a_perp >= 0.
    let pos1 = pos_part(&x1);
    let pos2 = pos_part(&x2);
    let scale = 4.0 * geo.delta_sq;
    let mut x = HermitianMatrix::zeros(dim);
    for (left, right) in [(&perp1, &pos1), (&perp1, &pos2), (&perp0, &pos1), (&perp0, &pos2)] {
        x = x.add(&left.kron(right).scale(scale));
    }
    let value = x.trace();
    Ok(DualCertificateQuad { x, z, value })
}

/// The lift's multiplier `z = 16 (1-eps)/(1-eps/2) z_b + 4/(1-eps)`.
pub fn lift_z(eps: f64, z_b: f64) -> f64 {
    16.0 * (1.0 - eps) / (1.0 - eps / 2.0) * z_b + 4.0 / (1.0 - eps)
}

/// Numerical check of the lift's key technical claim.
#[derive(Debug, Clone, Serialize)]
pub struct Claim2Report {
    pub z: f64,
    pub delta_sq: f64,
    /// Min eigenvalue of the first reduced 2x2 matrix inequality.
    pub first_min_eig: f64,
    /// Min eigenvalue of the second reduced 2x2 matrix inequality.
    pub second_min_eig: f64,
    /// Value of the first scalar determinant condition (must be > 0).
    pub first_scalar: f64,
    /// Value of the second scalar determinant condition (must be > 0).
    pub second_scalar: f64,
    /// Min eigenvalue of the full tensor inequality slack with the given
    /// sigma states.
    pub tensor_min_eig: f64,
    pub all_pass: bool,
}

/// Verifies, for pure `rho` and the canonical `z(eps, z_b)`, the two
/// reduced 2x2 matrix inequalities, the two scalar determinant
/// conditions, and the full tensor inequality against the provided
/// sigma states.
pub fn verify_claim2(
    rho0: &PureState,
    rho1: &PureState,
    sigma0: &DensityMatrix,
    sigma1: &DensityMatrix,
    eps: f64,
    z_b: f64,
) -> Result<Claim2Report> {
    check_eps(eps)?;
    if z_b < 0.0 {
        return Err(IdentError::InvalidInput("z_b must be nonnegative".into()));
    }
    if rho0.dim() != rho1.dim() {
        return Err(IdentError::InvalidInput("rho dims differ".into()));
    }
    let z = lift_z(eps, z_b);
    let geo = pure_geometry(rho0, rho1);
    let d2 = geo.delta_sq;
    let dr = (d2 * (1.0 - d2)).max(0.0).sqrt(); // delta * sqrt(1 - delta^2)
    let he = eps / 2.0;

    // First reduced matrix in the {|rho_1>, |rho_1_perp>} basis.
    let first = HermitianMatrix::new(crate::linmat::ComplexMatrix::from_rows(vec![
        vec![
            Complex64::new(z * (1.0 - eps + d2 * he) + d2 - 2.0, 0.0),
            Complex64::new(-dr * (1.0 + he * z), 0.0),
        ],
        vec![
            Complex64::new(-dr * (1.0 + he * z), 0.0),
            Complex64::new(d2 * (7.0 + 8.0 * eps * z_b - he * z), 0.0),
        ],
    ]))?;
    let second = HermitianMatrix::new(crate::linmat::ComplexMatrix::from_rows(vec![
        vec![
            Complex64::new(((1.0 - he) * z - 1.0) * (2.0 - d2), 0.0),
            Complex64::new(dr * ((1.0 - he) * z - 1.0), 0.0),
        ],
        vec![
            Complex64::new(dr * ((1.0 - he) * z - 1.0), 0.0),
            Complex64::new(d2 * (7.0 - 8.0 * (1.0 - eps) * z_b + (1.0 - he) * z), 0.0),
        ],
    ]))?;
    let first_min_eig = first.min_eigenvalue();
    let second_min_eig = second.min_eigenvalue();

    let first_scalar =
        (z * (1.0 - eps) - 2.0) * (7.0 + 8.0 * eps * z_b - he * z) - (1.0 + he * z).powi(2);
    let second_scalar = (2.0 - d2) * ((1.0 - he) * z - 1.0)
        * (7.0 - 8.0 * (1.0 - eps) * z_b + (1.0 - he) * z)
        - (1.0 - d2) * ((1.0 - he) * z - 1.0).powi(2);

    // Full tensor inequality: reduced rho matrices in the span basis
    // {|rho_1>, |rho_1_perp>}, tensored with the sigma mixtures.
    let rho1_red = HermitianMatrix::from_diag(&[1.0, 0.0]);
    let c = geo.c;
    let rho0_red = HermitianMatrix::new(crate::linmat::ComplexMatrix::from_rows(vec![
        vec![Complex64::new(c * c, 0.0), Complex64::new(c * d2.sqrt(), 0.0)],
        vec![Complex64::new(c * d2.sqrt(), 0.0), Complex64::new(d2, 0.0)],
    ]))?;
    let perp1_red = HermitianMatrix::from_diag(&[0.0, 1.0]);
    let lhs_inner = sigma0
        .hermitian()
        .scale(0.5 * (1.0 + eps * z_b))
        .add(&sigma1.hermitian().scale(0.5 * (1.0 - (1.0 - eps) * z_b)));
    let lhs = perp1_red.kron(&lhs_inner).scale(4.0 * d2);
    let mix = rho0_red
        .scale(1.0 + he * z)
        .add(&rho1_red.scale(1.0 - (1.0 - he) * z));
    let rhs = mix
        .kron(sigma0.hermitian())
        .add(
            &rho0_red
                .add(&rho1_red)
                .scale(1.0 - (1.0 - he) * z)
                .kron(sigma1.hermitian()),
        )
        .scale(0.25);
    let tensor_min_eig = lhs.sub(&rhs).min_eigenvalue();

    let scale = 1.0 + first.max_abs().max(second.max_abs());
    let tol = 1e-9 * scale;
    let all_pass = first_min_eig >= -tol
        && second_min_eig >= -tol
        && (d2 == 0.0 || (first_scalar > 0.0 && second_scalar > 0.0))
        && tensor_min_eig >= -tol;
    Ok(Claim2Report {
        z,
        delta_sq: d2,
        first_min_eig,
        second_min_eig,
        first_scalar,
        second_scalar,
        tensor_min_eig,
        all_pass,
    })
}

// ---------------------------------------------------------------------------
// direct product checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DirectProductReport {
    /// Lower bound on the first-register value: `(1 - overlap^2)/2` for
    /// pure alphas, the trace distance for the mixed corollary.
    pub a_lower: f64,
    pub b: f64,
    pub p: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub margin: f64,
}

fn pure_from_density(d: &DensityMatrix) -> Result<PureState> {
    let eig = crate::linmat::eig_hermitian(d.hermitian());
    let top = eig.eigenvalues()[0];
    if (top - 1.0).abs() > 1e-8 {
        return Err(IdentError::NotPure(top));
    }
    Ok(PureState::normalized(eig.eigenvector(0))?)
}

/// Direct product theorem check: `p <= 16 (1 - |<a0|a1>|^2) b` with `b`
/// at `q.eps` and `p` at `q.eps/2`. Requires pure alphas.
pub fn check_direct_product_pure(q: &IdentQuad) -> Result<DirectProductReport> {
    let a0 = pure_from_density(&q.alpha0)?;
    let a1 = pure_from_density(&q.alpha1)?;
    let ov = a1.inner(&a0).norm_sqr();
    let delta_sq = (1.0 - ov).max(0.0);
    let b = d_eps_single(&IdentPair::new(q.beta0.clone(), q.beta1.clone(), q.eps)?)?.0;
    let p = d_eps_quad(&q.with_eps(q.eps / 2.0)?)?.0;
    let bound = 16.0 * delta_sq * b;
    Ok(report(delta_sq / 2.0, b, p, bound))
}

/// Corollary check for mixed alphas: `p <= 32 a b` with
/// `a = ||alpha0 - alpha1||_tr`.
pub fn check_corollary_mixed(q: &IdentQuad) -> Result<DirectProductReport> {
    let a = trace_norm(&q.alpha0.hermitian().sub(q.alpha1.hermitian()));
    let b = d_eps_single(&IdentPair::new(q.beta0.clone(), q.beta1.clone(), q.eps)?)?.0;
    let p = d_eps_quad(&q.with_eps(q.eps / 2.0)?)?.0;
    let bound = 32.0 * a * b;
    Ok(report(a, b, p, bound))
}

fn report(a_lower: f64, b: f64, p: f64, bound: f64) -> DirectProductReport {
    let satisfied = p <= bound + 1e-6;
    DirectProductReport {
        a_lower,
        b,
        p,
        bound,
        satisfied,
        margin: bound - p,
    }
}

// ---------------------------------------------------------------------------
// counterexample states
// ---------------------------------------------------------------------------

/// The nearly-parallel qubit pair `|0>` and `sqrt(1-d^2)|0> + d|1>`.
pub fn tilted_pair(delta: f64) -> Result<(PureState, PureState)> {
    let s0 = PureState::from_reals(&[1.0, 0.0])?;
    let s1 = PureState::from_reals(&[(1.0 - delta * delta).max(0.0).sqrt(), delta])?;
    Ok((s0, s1))
}

/// The rank-1 parity measurement `(d|00> - |01> - |10>)/sqrt(2 + d^2)`
/// with an empty odd outcome.
pub fn parity_counterexample_measurement(delta: f64) -> Result<PredictorMeasurement> {
    let n = (2.0 + delta * delta).sqrt();
    let v: Vec<Complex64> = [delta / n, -1.0 / n, -1.0 / n, 0.0]
        .iter()
        .map(|&r| Complex64::new(r, 0.0))
        .collect();
    Ok(PredictorMeasurement::Binary {
        e0: HermitianMatrix::outer(&v),
        e1: HermitianMatrix::zeros(4),
    })
}

/// The rank-1 quad measurement `(d|00> - (2/3)|01> - (2/3)|10>)` normalized,
/// answering only 00.
pub fn quad_counterexample_measurement(delta: f64) -> Result<PredictorMeasurement> {
    let n = (8.0 / 9.0 + delta * delta).sqrt();
    let v: Vec<Complex64> = [delta / n, -2.0 / (3.0 * n), -2.0 / (3.0 * n), 0.0]
        .iter()
        .map(|&r| Complex64::new(r, 0.0))
        .collect();
    Ok(PredictorMeasurement::Quad {
        e00: HermitianMatrix::outer(&v),
        e01: HermitianMatrix::zeros(4),
        e10: HermitianMatrix::zeros(4),
        e11: HermitianMatrix::zeros(4),
    })
}

/// Sanity helper: primal feasibility of a measurement's SDP encoding
/// (used by tests and the CLI to double-check returned measurements).
pub fn measurement_residual(m: &PredictorMeasurement) -> f64 {
    let dim = m.dim();
    let k = m.elements().len();
    let basis = hermitian_basis(dim);
    let id = HermitianMatrix::identity(dim);
    let constraints = basis
        .iter()
        .map(|bk| Constraint {
            coeffs: (0..=k).map(|_| bk.clone()).collect(),
            relation: Relation::Eq,
            rhs: bk.inner(&id),
        })
        .collect();
    let problem = SdpProblem {
        blocks: vec![dim; k + 1],
        objective: (0..=k).map(|_| HermitianMatrix::zeros(dim)).collect(),
        constraints,
        sense: Sense::Maximize,
    };
    let mut blocks: Vec<HermitianMatrix> = m.elements().into_iter().cloned().collect();
    blocks.push(m.abstain());
    let rep = check_primal_feasibility(&problem, &blocks).expect("well-formed");
    rep.max_violation.max((-rep.min_block_eigenvalue).max(0.0))
}

#[cfg(test)]
mod tests;
