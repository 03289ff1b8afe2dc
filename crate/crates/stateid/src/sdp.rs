//! Dense semidefinite programming over complex Hermitian blocks.
//!
//! Problems are stated as trace-linear constraints over a list of PSD
//! blocks. Inequalities receive nonnegative scalar slacks (1x1 blocks)
//! internally so the core solver only sees equality form:
//!
//! ```text
//!   min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0 (blockwise)
//! ```
//!
//! solved by an infeasible-start primal-dual path-following method with
//! Mehrotra predictor-corrector steps (HKM scaling). Complex Hermitian
//! blocks are handled natively. Everything is deterministic: identical
//! problem and options give bitwise-identical output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linmat::{ComplexMatrix, HermitianMatrix, MatrixFile};

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, SdpError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One trace-linear constraint `sum_b <coeffs[b], X_b>  rel  rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<HermitianMatrix>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Block-structured semidefinite program.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<HermitianMatrix>,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(SdpError::Malformed("at least one block required".into()));
        }
        if self.objective.len() != self.blocks.len() {
            return Err(SdpError::Malformed(
                "objective must have one matrix per block".into(),
            ));
        }
        for (b, (&d, o)) in self.blocks.iter().zip(&self.objective).enumerate() {
            if o.dim() != d {
                return Err(SdpError::DimensionMismatch(format!(
                    "objective block {b} has dim {} but block dim is {d}",
                    o.dim()
                )));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != self.blocks.len() {
                return Err(SdpError::Malformed(format!(
                    "constraint {i} must have one coefficient matrix per block"
                )));
            }
            for (b, (&d, a)) in self.blocks.iter().zip(&con.coeffs).enumerate() {
                if a.dim() != d {
                    return Err(SdpError::DimensionMismatch(format!(
                        "constraint {i}, block {b}: dim {} vs block dim {d}",
                        a.dim()
                    )));
                }
            }
            if !con.rhs.is_finite() {
                return Err(SdpError::Malformed(format!("constraint {i} rhs not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_blocks: Vec<HermitianMatrix>,
    pub dual_multipliers: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub max_residual: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

/// Primal feasibility report: pure re-evaluation, no solving.
#[derive(Debug, Clone)]
pub struct PrimalReport {
    pub max_violation: f64,
    pub min_block_eigenvalue: f64,
}

/// Dual feasibility report for a candidate multiplier vector.
#[derive(Debug, Clone)]
pub struct DualReport {
    /// Min eigenvalue of the dual slack matrix, per block.
    pub slack_min_eigenvalues: Vec<f64>,
    /// Multipliers whose sign contradicts their constraint relation.
    pub sign_violations: Vec<usize>,
    /// The bound `sum_i y_i b_i` the multipliers imply on the optimum
    /// (an upper bound for maximization, lower for minimization).
    pub implied_bound: f64,
}

impl DualReport {
    pub fn min_slack_eigenvalue(&self) -> f64 {
        self.slack_min_eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.sign_violations.is_empty() && self.min_slack_eigenvalue() >= -tol
    }
}

/// Evaluates a candidate primal point against the problem's constraints.
pub fn check_primal_feasibility(p: &SdpProblem, candidate: &[HermitianMatrix]) -> Result<PrimalReport> {
    p.validate()?;
    if candidate.len() != p.blocks.len() {
        return Err(SdpError::DimensionMismatch(
            "candidate must have one matrix per block".into(),
        ));
    }
    for (b, (&d, x)) in p.blocks.iter().zip(candidate).enumerate() {
        if x.dim() != d {
            return Err(SdpError::DimensionMismatch(format!(
                "candidate block {b}: dim {} vs block dim {d}",
                x.dim()
            )));
        }
    }
    let mut max_violation = 0.0f64;
    for con in &p.constraints {
        let lhs: f64 = con
            .coeffs
            .iter()
            .zip(candidate)
            .map(|(a, x)| a.inner(x))
            .sum();
        let v = match con.relation {
            Relation::Eq => (lhs - con.rhs).abs(),
            Relation::Le => (lhs - con.rhs).max(0.0),
            Relation::Ge => (con.rhs - lhs).max(0.0),
        };
        max_violation = max_violation.max(v);
    }
    let min_block_eigenvalue = candidate
        .iter()
        .map(|x| x.min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    Ok(PrimalReport {
        max_violation,
        min_block_eigenvalue,
    })
}

/// Evaluates a candidate dual multiplier vector. Sign violations are
/// reported, not raised. The dual slack is `sum_i y_i A_i - C` for a
/// maximization problem and `C - sum_i y_i A_i` for minimization; either
/// way, slack PSD plus consistent signs make `sum_i y_i b_i` a valid
/// bound on the optimum.
pub fn check_dual_feasibility(p: &SdpProblem, multipliers: &[f64]) -> Result<DualReport> {
    p.validate()?;
    if multipliers.len() != p.constraints.len() {
        return Err(SdpError::DimensionMismatch(
            "one multiplier per constraint required".into(),
        ));
    }
    let mut sign_violations = Vec::new();
    for (i, (con, &y)) in p.constraints.iter().zip(multipliers).enumerate() {
        // For maximize: <= wants y >= 0, >= wants y <= 0; flipped for minimize.
        let want_nonneg = match (p.sense, con.relation) {
            (_, Relation::Eq) => None,
            (Sense::Maximize, Relation::Le) | (Sense::Minimize, Relation::Ge) => Some(true),
            (Sense::Maximize, Relation::Ge) | (Sense::Minimize, Relation::Le) => Some(false),
        };
        // Roundoff-level slips past zero are not flagged.
        match want_nonneg {
            Some(true) if y < -1e-12 => sign_violations.push(i),
            Some(false) if y > 1e-12 => sign_violations.push(i),
            _ => {}
        }
    }
    let sgn = match p.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut slack_min_eigenvalues = Vec::with_capacity(p.blocks.len());
    for b in 0..p.blocks.len() {
        let mut slack = self_scale(&p.objective[b], -sgn);
        for (con, &y) in p.constraints.iter().zip(multipliers) {
            slack = slack.add(&self_scale(&con.coeffs[b], sgn * y));
        }
        slack_min_eigenvalues.push(slack.min_eigenvalue());
    }
    let implied_bound = p
        .constraints
        .iter()
        .zip(multipliers)
        .map(|(con, &y)| y * con.rhs)
        .sum();
    Ok(DualReport {
        slack_min_eigenvalues,
        sign_violations,
        implied_bound,
    })
}

fn self_scale(m: &HermitianMatrix, c: f64) -> HermitianMatrix {
    m.scale(c)
}

/// Orthonormal basis of d-dimensional Hermitian matrices under the real
/// Hilbert-Schmidt inner product. Used to express matrix (in)equalities
/// as trace-linear constraints.
pub fn hermitian_basis(dim: usize) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m.set(i, i, Complex64::new(1.0, 0.0));
        out.push(HermitianMatrix::from_exact(m));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut s = ComplexMatrix::zeros(dim, dim);
            s.set(i, j, Complex64::new(r, 0.0));
            s.set(j, i, Complex64::new(r, 0.0));
            out.push(HermitianMatrix::from_exact(s));
            let mut k = ComplexMatrix::zeros(dim, dim);
            k.set(i, j, Complex64::new(0.0, r));
            k.set(j, i, Complex64::new(0.0, -r));
            out.push(HermitianMatrix::from_exact(k));
        }
    }
    out
}

/// Solves the problem. On `Optimal`, the reported gap and residual meet
/// the option tolerances.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    let internal = InternalForm::build(p);
    let raw = internal.solve(opts);
    Ok(internal.map_back(p, opts, raw))
}

// ---------------------------------------------------------------------------
// internal equality form
// ---------------------------------------------------------------------------

struct InternalForm {
    blocks: Vec<usize>,
    /// Internal objective (min sense), prescaled.
    c: Vec<HermitianMatrix>,
    /// a[i][b]: constraint i, block b, prescaled.
    a: Vec<Vec<HermitianMatrix>>,
    b: Vec<f64>,
    n_user_blocks: usize,
    obj_scale: f64,
    con_scale: Vec<f64>,
    /// +1 if user sense is minimize, -1 if maximize.
    sign: f64,
}

struct RawSolution {
    x: Vec<HermitianMatrix>,
    y: Vec<f64>,
    status: SolveStatus,
    iterations: usize,
}

impl InternalForm {
    fn build(p: &SdpProblem) -> InternalForm {
        let sign = match p.sense {
            Sense::Maximize => -1.0,
            Sense::Minimize => 1.0,
        };
        let mut blocks = p.blocks.clone();
        let n_user_blocks = blocks.len();
        let m = p.constraints.len();

        // Prescale: objective and each constraint row to unit max norm.
        let obj_scale = p
            .objective
            .iter()
            .map(|o| o.max_abs())
            .fold(0.0, f64::max)
            .max(1e-12);
        let con_scale: Vec<f64> = p
            .constraints
            .iter()
            .map(|con| {
                con.coeffs
                    .iter()
                    .map(|a| a.max_abs())
                    .fold(con.rhs.abs(), f64::max)
                    .max(1e-12)
            })
            .collect();

        // One 1x1 slack block per inequality.
        let mut slack_block_of: Vec<Option<usize>> = vec![None; m];
        for (i, con) in p.constraints.iter().enumerate() {
            if con.relation != Relation::Eq {
                slack_block_of[i] = Some(blocks.len());
                blocks.push(1);
            }
        }

        let mut c: Vec<HermitianMatrix> = p
            .objective
            .iter()
            .map(|o| o.scale(sign / obj_scale))
            .collect();
        c.extend((n_user_blocks..blocks.len()).map(|_| HermitianMatrix::zeros(1)));

        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for (i, con) in p.constraints.iter().enumerate() {
            let s = con_scale[i];
            let mut row: Vec<HermitianMatrix> =
                con.coeffs.iter().map(|m| m.scale(1.0 / s)).collect();
            for (bi, &d) in blocks.iter().enumerate().skip(n_user_blocks) {
                debug_assert_eq!(d, 1);
                let coeff = if slack_block_of[i] == Some(bi) {
                    match con.relation {
                        Relation::Le => 1.0,
                        Relation::Ge => -1.0,
                        Relation::Eq => unreachable!(),
                    }
                } else {
                    0.0
                };
                row.push(HermitianMatrix::from_diag(&[coeff]));
            }
            a.push(row);
            b.push(con.rhs / s);
        }

        InternalForm {
            blocks,
            c,
            a,
            b,
            n_user_blocks,
            obj_scale,
            con_scale,
            sign,
        }
    }

    fn map_back(&self, p: &SdpProblem, opts: &SolverOptions, raw: RawSolution) -> SdpSolution {
        let primal_blocks: Vec<HermitianMatrix> = raw.x[..self.n_user_blocks].to_vec();
        let mut dual_multipliers: Vec<f64> = raw
            .y
            .iter()
            .zip(&self.con_scale)
            .map(|(&y, &s)| self.sign * y * self.obj_scale / s)
            .collect();
        // Multipliers of inactive inequality constraints converge to zero
        // and may land a hair on the wrong side; snap those to zero so the
        // returned certificate is feasible outright.
        let y_scale = 1.0
            + dual_multipliers
                .iter()
                .fold(0.0f64, |a, &v| a.max(v.abs()));
        for (con, y) in p.constraints.iter().zip(dual_multipliers.iter_mut()) {
            let want_nonneg = match (p.sense, con.relation) {
                (_, Relation::Eq) => continue,
                (Sense::Maximize, Relation::Le) | (Sense::Minimize, Relation::Ge) => true,
                (Sense::Maximize, Relation::Ge) | (Sense::Minimize, Relation::Le) => false,
            };
            let wrong_side = if want_nonneg { *y < 0.0 } else { *y > 0.0 };
            if wrong_side && y.abs() <= 10.0 * opts.feas_tol * y_scale {
                *y = 0.0;
            }
        }
        let dual_multipliers = dual_multipliers;
        let primal_value: f64 = p
            .objective
            .iter()
            .zip(&primal_blocks)
            .map(|(o, x)| o.inner(x))
            .sum();
        let dual_value: f64 = p
            .constraints
            .iter()
            .zip(&dual_multipliers)
            .map(|(con, &y)| y * con.rhs)
            .sum();
        let gap = (primal_value - dual_value).abs();
        let report = check_primal_feasibility(p, &primal_blocks).expect("validated problem");
        let max_residual = report
            .max_violation
            .max((-report.min_block_eigenvalue).max(0.0));
        // Final status is judged on the mapped-back solution: whatever the
        // iteration reported, the returned point either meets the
        // tolerances (Optimal) or it does not.
        let dual_report =
            check_dual_feasibility(p, &dual_multipliers).expect("validated problem");
        let converged = gap <= opts.gap_tol * (1.0 + primal_value.abs() + dual_value.abs())
            && max_residual <= opts.feas_tol * 10.0
            && dual_report.min_slack_eigenvalue() >= -opts.feas_tol * 10.0
            && dual_report.sign_violations.is_empty();
        let status = match raw.status {
            SolveStatus::Optimal | SolveStatus::MaxIter | SolveStatus::NumericalFailure => {
                if converged {
                    SolveStatus::Optimal
                } else if raw.status == SolveStatus::Optimal {
                    SolveStatus::MaxIter
                } else {
                    raw.status
                }
            }
            other => other,
        };
        SdpSolution {
            primal_blocks,
            dual_multipliers,
            primal_value,
            dual_value,
            gap,
            max_residual,
            status,
            iterations: raw.iterations,
        }
    }

    fn total_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    fn apply_a(&self, x: &[HermitianMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, xb)| a.inner(xb)).sum())
            .collect()
    }

    fn apply_at(&self, y: &[f64]) -> Vec<HermitianMatrix> {
        (0..self.blocks.len())
            .map(|bi| {
                let mut acc = HermitianMatrix::zeros(self.blocks[bi]);
                for (row, &yi) in self.a.iter().zip(y) {
                    if yi != 0.0 {
                        acc = acc.add(&row[bi].scale(yi));
                    }
                }
                acc
            })
            .collect()
    }

    fn solve(&self, opts: &SolverOptions) -> RawSolution {
        let m = self.a.len();
        let nt = self.total_dim() as f64;
        let mut x: Vec<HermitianMatrix> =
            self.blocks.iter().map(|&d| HermitianMatrix::identity(d)).collect();
        let mut z = x.clone();
        let mut y = vec![0.0f64; m];

        let b_norm = self.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let c_norm = self.c.iter().map(|c| c.max_abs()).fold(0.0, f64::max);

        let mut status = SolveStatus::MaxIter;
        let mut iterations = 0usize;
        for iter in 0..opts.max_iter {
            iterations = iter;
            // Residuals.
            let ax = self.apply_a(&x);
            let rp: Vec<f64> = self.b.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
            let aty = self.apply_at(&y);
            let rd: Vec<HermitianMatrix> = (0..self.blocks.len())
                .map(|bi| self.c[bi].sub(&z[bi]).sub(&aty[bi]))
                .collect();
            let mu: f64 = x.iter().zip(&z).map(|(xb, zb)| xb.inner(zb)).sum::<f64>() / nt;

            let rp_norm = rp.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            let rd_norm = rd.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
            let pv: f64 = self.c.iter().zip(&x).map(|(c, xb)| c.inner(xb)).sum();
            let dv: f64 = self.b.iter().zip(&y).map(|(&b, &yi)| b * yi).sum();
            let gap = (pv - dv).abs();

            if rp_norm <= opts.feas_tol * (1.0 + b_norm)
                && rd_norm <= opts.feas_tol * (1.0 + c_norm)
                && gap <= opts.gap_tol * (1.0 + pv.abs() + dv.abs())
            {
                status = SolveStatus::Optimal;
                break;
            }

            // Divergence checks: normalized infeasibility certificates.
            let x_norm = x.iter().map(|b| b.max_abs()).fold(0.0, f64::max);
            let y_norm = y.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            if y_norm > 1e8 {
                let yn: Vec<f64> = y.iter().map(|&v| v / y_norm).collect();
                let atyn = self.apply_at(&yn);
                let max_eig = atyn
                    .iter()
                    .map(|m| -(m.scale(-1.0).min_eigenvalue()))
                    .fold(f64::NEG_INFINITY, f64::max);
                let byn: f64 = self.b.iter().zip(&yn).map(|(&b, &v)| b * v).sum();
                if max_eig <= 1e-8 && byn > 1e-8 {
                    status = SolveStatus::Infeasible;
                    break;
                }
                status = SolveStatus::NumericalFailure;
                break;
            }
            if x_norm > 1e8 {
                let xn: Vec<HermitianMatrix> =
                    x.iter().map(|b| b.scale(1.0 / x_norm)).collect();
                let axn = self.apply_a(&xn);
                let axn_norm = axn.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
                let cxn: f64 = self.c.iter().zip(&xn).map(|(c, xb)| c.inner(xb)).sum();
                if axn_norm <= 1e-8 && cxn < -1e-8 {
                    status = SolveStatus::Unbounded;
                    break;
                }
                status = SolveStatus::NumericalFailure;
                break;
            }

            // Factor the iterates.
            let lx: Option<Vec<ComplexMatrix>> =
                x.iter().map(|b| cholesky(b.matrix())).collect();
            let lz: Option<Vec<ComplexMatrix>> =
                z.iter().map(|b| cholesky(b.matrix())).collect();
            let (lx, lz) = match (lx, lz) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    status = SolveStatus::NumericalFailure;
                    break;
                }
            };
            let zinv: Vec<ComplexMatrix> = lz.iter().map(inverse_from_cholesky).collect();

            // Schur complement M_ij = sum_b Re Tr[A_i X A_j Z^-1].
            let mut t: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(m);
            for row in &self.a {
                let tj: Vec<ComplexMatrix> = (0..self.blocks.len())
                    .map(|bi| x[bi].matrix().mul(row[bi].matrix()).mul(&zinv[bi]))
                    .collect();
                t.push(tj);
            }
            let mut schur = vec![vec![0.0f64; m]; m];
            for i in 0..m {
                for j in 0..m {
                    let mut acc = 0.0;
                    for bi in 0..self.blocks.len() {
                        acc += trace_prod_re(self.a[i][bi].matrix(), &t[j][bi]);
                    }
                    schur[i][j] = acc;
                }
            }
            for i in 0..m {
                for j in (i + 1)..m {
                    let avg = 0.5 * (schur[i][j] + schur[j][i]);
                    schur[i][j] = avg;
                    schur[j][i] = avg;
                }
            }
            // Factor the Schur complement, escalating a diagonal ridge if
            // ill-conditioning defeats the plain factorization.
            let diag_scale =
                1.0 + (0..m).map(|i| schur[i][i]).sum::<f64>() / m.max(1) as f64;
            let mut schur_l = None;
            for ridge_factor in [0.0, 1e-12, 1e-9, 1e-6] {
                let mut s2 = schur.clone();
                for i in 0..m {
                    s2[i][i] += ridge_factor * diag_scale;
                }
                if let Some(l) = cholesky_real(&s2) {
                    schur_l = Some(l);
                    break;
                }
            }
            let schur_l = match schur_l {
                Some(l) => l,
                None => {
                    status = SolveStatus::NumericalFailure;
                    break;
                }
            };

            let newton = |rc: &[ComplexMatrix]| -> (Vec<HermitianMatrix>, Vec<f64>, Vec<HermitianMatrix>) {
                // dX = sym(Rc Z^-1 - X (Rd - A*(dy)) Z^-1), dZ = Rd - A*(dy),
                // M dy = rp - <A_i, Rc Z^-1> + <A_i, X Rd Z^-1>.
                let mut rhs = vec![0.0f64; m];
                for i in 0..m {
                    let mut acc = rp[i];
                    for bi in 0..self.blocks.len() {
                        let rc_zinv = rc[bi].mul(&zinv[bi]);
                        acc -= trace_prod_re(self.a[i][bi].matrix(), &rc_zinv);
                        let x_rd_zinv = x[bi].matrix().mul(rd[bi].matrix()).mul(&zinv[bi]);
                        acc += trace_prod_re(self.a[i][bi].matrix(), &x_rd_zinv);
                    }
                    rhs[i] = acc;
                }
                let mut dy = cholesky_solve_real(&schur_l, &rhs);
                // Two rounds of iterative refinement against the un-ridged
                // Schur matrix; the system grows ill-conditioned as the
                // barrier parameter vanishes.
                for _ in 0..2 {
                    let mut resid = rhs.clone();
                    for i in 0..m {
                        for j in 0..m {
                            resid[i] -= schur[i][j] * dy[j];
                        }
                    }
                    let corr = cholesky_solve_real(&schur_l, &resid);
                    for (d, c) in dy.iter_mut().zip(&corr) {
                        *d += c;
                    }
                }
                let atdy = self.apply_at(&dy);
                let dz: Vec<HermitianMatrix> = (0..self.blocks.len())
                    .map(|bi| rd[bi].sub(&atdy[bi]))
                    .collect();
                let dx: Vec<HermitianMatrix> = (0..self.blocks.len())
                    .map(|bi| {
                        let raw = rc[bi]
                            .mul(&zinv[bi])
                            .sub(&x[bi].matrix().mul(dz[bi].matrix()).mul(&zinv[bi]));
                        HermitianMatrix::from_exact(raw)
                    })
                    .collect();
                (dx, dy, dz)
            };

            // Predictor (affine scaling): Rc = -XZ.
            let neg_xz: Vec<ComplexMatrix> = (0..self.blocks.len())
                .map(|bi| x[bi].matrix().mul(z[bi].matrix()).scale(Complex64::new(-1.0, 0.0)))
                .collect();
            let (dx_aff, _dy_aff, dz_aff) = newton(&neg_xz);
            let ap_aff = max_step(&lx, &dx_aff);
            let ad_aff = max_step(&lz, &dz_aff);
            let mu_aff: f64 = (0..self.blocks.len())
                .map(|bi| {
                    let xa = x[bi].add(&dx_aff[bi].scale(ap_aff.min(1.0)));
                    let za = z[bi].add(&dz_aff[bi].scale(ad_aff.min(1.0)));
                    xa.inner(&za)
                })
                .sum::<f64>()
                / nt;
            let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

            // Corrector: Rc = sigma*mu*I - XZ - dXaff dZaff.
            let rc: Vec<ComplexMatrix> = (0..self.blocks.len())
                .map(|bi| {
                    let d = self.blocks[bi];
                    let mut m = neg_xz[bi].clone();
                    for k in 0..d {
                        *m.get_mut(k, k) += Complex64::new(sigma * mu, 0.0);
                    }
                    m.sub(&dx_aff[bi].matrix().mul(dz_aff[bi].matrix()))
                })
                .collect();
            let (dx, dy, dz) = newton(&rc);

            // Push closer to the boundary as the barrier parameter drops.
            let tau = if mu < 1e-5 { 0.999 } else { 0.98 };
            let ap = (tau * max_step(&lx, &dx)).min(1.0);
            let ad = (tau * max_step(&lz, &dz)).min(1.0);
            if ap < 1e-10 && ad < 1e-10 {
                status = SolveStatus::NumericalFailure;
                break;
            }
            for bi in 0..self.blocks.len() {
                x[bi] = x[bi].add(&dx[bi].scale(ap));
                z[bi] = z[bi].add(&dz[bi].scale(ad));
            }
            for (yi, &dyi) in y.iter_mut().zip(&dy) {
                *yi += ad * dyi;
            }
        }

        RawSolution {
            x,
            y,
            status,
            iterations,
        }
    }
}

// ---------------------------------------------------------------------------
// numerical helpers
// ---------------------------------------------------------------------------

/// `Re Tr[A B]` for square complex matrices.
fn trace_prod_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.rows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a.get(i, j) * b.get(j, i)).re;
        }
    }
    acc
}

/// Cholesky factor (lower triangular L with L L† = A) of a Hermitian
/// positive definite matrix; None if A is not numerically PD.
fn cholesky(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let d = a.rows();
    let mut l = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut diag = a.get(j, j).re;
        for k in 0..j {
            diag -= l.get(j, k).norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return None;
        }
        let dj = diag.sqrt();
        l.set(j, j, Complex64::new(dj, 0.0));
        for i in (j + 1)..d {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, v / dj);
        }
    }
    Some(l)
}

/// Inverse of `L L†` given its Cholesky factor.
fn inverse_from_cholesky(l: &ComplexMatrix) -> ComplexMatrix {
    let d = l.rows();
    // Solve L W = I (forward), then L† V = W (backward).
    let mut w = ComplexMatrix::identity(d);
    for col in 0..d {
        for i in 0..d {
            let mut v = w.get(i, col);
            for k in 0..i {
                v -= l.get(i, k) * w.get(k, col);
            }
            w.set(i, col, v / l.get(i, i));
        }
        for i in (0..d).rev() {
            let mut v = w.get(i, col);
            for k in (i + 1)..d {
                v -= l.get(k, i).conj() * w.get(k, col);
            }
            w.set(i, col, v / l.get(i, i));
        }
    }
    w
}

/// Largest alpha with `S + alpha D >= 0`, given the Cholesky factors of S.
/// Returns a value > 1 when unconstrained within a unit step.
fn max_step(ls: &[ComplexMatrix], d: &[HermitianMatrix]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (l, db) in ls.iter().zip(d) {
        let w = congruence_inverse(l, db.matrix());
        let herm = HermitianMatrix::from_exact(w);
        let lam = herm.min_eigenvalue();
        if lam < -1e-14 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha.min(1e6)
}

/// `L^{-1} D L^{-†}`.
fn congruence_inverse(l: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    // Forward solve L W = D.
    let mut w = d.clone();
    for col in 0..n {
        for i in 0..n {
            let mut v = w.get(i, col);
            for k in 0..i {
                v -= l.get(i, k) * w.get(k, col);
            }
            w.set(i, col, v / l.get(i, i));
        }
    }
    // Solve V L† = W, i.e. L V† = W† (forward on the adjoint).
    let wh = w.adjoint();
    let mut vh = wh.clone();
    for col in 0..n {
        for i in 0..n {
            let mut v = vh.get(i, col);
            for k in 0..i {
                v -= l.get(i, k) * vh.get(k, col);
            }
            vh.set(i, col, v / l.get(i, i));
        }
    }
    vh.adjoint()
}

/// Cholesky of a real symmetric PD matrix in nested-Vec form.
fn cholesky_real(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        let mut diag = a[j][j];
        for k in 0..j {
            diag -= l[j][k] * l[j][k];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return None;
        }
        l[j][j] = diag.sqrt();
        for i in (j + 1)..n {
            let mut v = a[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k];
            }
            l[i][j] = v / l[j][j];
        }
    }
    Some(l)
}

fn cholesky_solve_real(l: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut x = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[i][k] * x[k];
        }
        x[i] /= l[i][i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l[k][i] * x[k];
        }
        x[i] /= l[i][i];
    }
    x
}

// ---------------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------------

/// On-disk problem encoding (same matrix encoding as the matrix files).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpProblemFile {
    pub blocks: Vec<usize>,
    pub objective: Vec<MatrixFile>,
    pub constraints: Vec<ConstraintFile>,
    pub sense: Sense,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub coeffs: Vec<MatrixFile>,
    pub relation: Relation,
    pub rhs: f64,
}

impl SdpProblemFile {
    pub fn to_problem(&self) -> std::result::Result<SdpProblem, crate::linmat::LinmatError> {
        let objective = self
            .objective
            .iter()
            .map(|m| m.to_hermitian())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                Ok(Constraint {
                    coeffs: c
                        .coeffs
                        .iter()
                        .map(|m| m.to_hermitian())
                        .collect::<std::result::Result<Vec<_>, _>>()?,
                    relation: c.relation,
                    rhs: c.rhs,
                })
            })
            .collect::<std::result::Result<Vec<_>, crate::linmat::LinmatError>>()?;
        Ok(SdpProblem {
            blocks: self.blocks.clone(),
            objective,
            constraints,
            sense: self.sense,
        })
    }

    pub fn from_problem(p: &SdpProblem) -> Self {
        SdpProblemFile {
            blocks: p.blocks.clone(),
            objective: p.objective.iter().map(|m| MatrixFile::from_matrix(m.matrix())).collect(),
            constraints: p
                .constraints
                .iter()
                .map(|c| ConstraintFile {
                    coeffs: c.coeffs.iter().map(|m| MatrixFile::from_matrix(m.matrix())).collect(),
                    relation: c.relation,
                    rhs: c.rhs,
                })
                .collect(),
            sense: p.sense,
        }
    }
}
