//! Robust beamformer core: worst-case objective evaluators, the quadratic
//! form / ratio form equivalence transforms, and the inner-approximation
//! algorithm that solves a sequence of SOCP restrictions.
//!
//! Two scale-equivalent problem forms appear throughout, labeled 13 and 14:
//!
//! * form 14 (quadratic): minimize wᴴR̂w + γ‖w‖² subject to ‖Qw‖ − η‖w‖ ≥ 1,
//!   with optimal value `v14`;
//! * form 13 (ratio): maximize (‖Qw‖ − η‖w‖)/√(wᴴ(R̂+γI)w), with optimal
//!   value `val13`.
//!
//! An optimum of one maps to an optimum of the other by a positive rescale
//! (`rescale_14_to_13` / `rescale_13_to_14`).

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{
    embed_matrix, embed_vector, eig_hermitian, psd_power, unembed_vector, CMat, HermitianMatrix,
};
use crate::linalg::Mat;
use crate::socp::{solve_conic, ConeBlock, ConeSpec, ConicProblem, SolveStatus};

/// Default relative rank tolerance for the signal-covariance factorization.
pub const DEFAULT_RANK_TOL_REL: f64 = 1e-10;
/// Feasibility margin of the constructed initial point.
const INITIAL_POINT_MARGIN: f64 = 1e-3;
/// Guard against linearizing at a direction annihilated by Q.
const LINEARIZATION_FLOOR: f64 = 1e-14;
/// Subproblem solver settings.
const SUBPROBLEM_TOL: f64 = 1e-9;
const SUBPROBLEM_MAX_ITER: usize = 200;

/// Factor Q with QᴴQ equal to the presumed signal covariance; M ≤ N rows.
#[derive(Debug, Clone)]
pub struct FactorQ {
    pub entries: CMat,
}

impl FactorQ {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.rows == 0 || entries.cols == 0 {
            return Err(Error::InvalidArgument("factor Q must be nonempty".into()));
        }
        if entries.rows > entries.cols {
            return Err(Error::DimensionMismatch(format!(
                "factor Q has {} rows > {} columns",
                entries.rows, entries.cols
            )));
        }
        Ok(FactorQ { entries })
    }

    /// Number of rows M (numerical rank of the factored covariance).
    pub fn m(&self) -> usize {
        self.entries.rows
    }

    /// Number of sensors N.
    pub fn n(&self) -> usize {
        self.entries.cols
    }

    /// Q w.
    pub fn apply(&self, w: &[Complex64]) -> Vec<Complex64> {
        self.entries.matvec(w)
    }

    /// ‖Q w‖.
    pub fn applied_norm(&self, w: &[Complex64]) -> f64 {
        self.apply(w).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// QᴴQ as a Hermitian matrix.
    pub fn gram(&self) -> HermitianMatrix {
        let g = self.entries.herm_transpose().matmul(&self.entries);
        HermitianMatrix::new(g).expect("QᴴQ is Hermitian by construction")
    }
}

/// Tuning knobs of the robust problem and its outer iteration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RobustParams {
    pub gamma: f64,
    pub eta: f64,
    pub xi: f64,
    pub max_outer: usize,
}

impl RobustParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !(self.eta >= 0.0) {
            return Err(Error::InvalidArgument(
                "gamma and eta must be nonnegative".into(),
            ));
        }
        if !(self.xi > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "termination threshold xi must be positive, got {}",
                self.xi
            )));
        }
        if self.max_outer < 1 {
            return Err(Error::InvalidArgument("max_outer must be >= 1".into()));
        }
        Ok(())
    }
}

/// One outer iteration: objective value, auxiliary t, constraint margins of
/// the iterate, and the subproblem's solver report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub v: f64,
    pub t: f64,
    /// ‖Q w_k‖ of the recorded iterate.
    pub qw_norm: f64,
    /// ‖Q w_k‖ − η‖w_k‖ of the recorded iterate.
    pub margin: f64,
    pub gap: f64,
    pub primal_res: f64,
    pub dual_res: f64,
    pub status: SolveStatus,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn outer_iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn total_ms(&self) -> f64 {
        self.records.iter().map(|r| r.ms).sum()
    }
}

/// Converged weights in both problem forms plus the iteration trace.
#[derive(Debug, Clone)]
pub struct BeamformerResult {
    pub w14: Vec<Complex64>,
    pub v14: f64,
    pub w13: Vec<Complex64>,
    pub val13: f64,
    pub trace: IterationTrace,
    pub converged: bool,
}

impl BeamformerResult {
    /// JSON form: complex vectors as paired real arrays, trace as records.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "w14": complex_json(&self.w14),
            "v14": self.v14,
            "w13": complex_json(&self.w13),
            "val13": self.val13,
            "converged": self.converged,
            "trace": self.trace.records,
        })
    }
}

fn complex_json(w: &[Complex64]) -> serde_json::Value {
    let re: Vec<f64> = w.iter().map(|c| c.re).collect();
    let im: Vec<f64> = w.iter().map(|c| c.im).collect();
    serde_json::json!({ "re": re, "im": im })
}

/// Default parameter rule: gamma = 0.1 ‖R̂‖_F, eta = 0.5 √trace(R̂_s),
/// xi = 1e-8, outer-iteration cap 500.
pub fn derive_params(rhat: &HermitianMatrix, rs_presumed: &HermitianMatrix) -> RobustParams {
    RobustParams {
        gamma: 0.1 * rhat.frobenius_norm(),
        eta: 0.5 * rs_presumed.trace().max(0.0).sqrt(),
        xi: 1e-8,
        max_outer: 500,
    }
}

/// Spectral factorization of a PSD covariance: Q = Λ_M^{1/2} U_Mᴴ over the
/// eigenvalues above `rank_tol` (default 1e-10 · λ_max), so QᴴQ = R̂_s.
pub fn factorize_presumed(rs_presumed: &HermitianMatrix, rank_tol: Option<f64>) -> Result<FactorQ> {
    let n = rs_presumed.dim();
    let (vals, vecs) = eig_hermitian(rs_presumed);
    let lmax = vals.first().copied().unwrap_or(0.0);
    if lmax <= 0.0 {
        return Err(Error::InvalidArgument(
            "cannot factor a zero covariance: no signal subspace".into(),
        ));
    }
    let tol = rank_tol.unwrap_or(DEFAULT_RANK_TOL_REL * lmax);
    let m = vals.iter().take_while(|&&l| l > tol).count();
    if m == 0 {
        return Err(Error::InvalidArgument(format!(
            "all eigenvalues at or below rank tolerance {tol:.3e}"
        )));
    }
    let mut q = CMat::zeros(m, n);
    for r in 0..m {
        let scale = vals[r].sqrt();
        for j in 0..n {
            q[(r, j)] = scale * vecs[(j, r)].conj();
        }
    }
    FactorQ::new(q)
}

/// Closed-form worst case of the data-covariance uncertainty: wᴴ(R̂ + γI)w.
pub fn worst_case_denominator(w: &[Complex64], rhat: &HermitianMatrix, gamma: f64) -> f64 {
    let norm_sq: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    rhat.quadratic_form(w) + gamma * norm_sq
}

/// Closed-form worst case of the factor uncertainty:
/// (max{‖Qw‖ − η‖w‖, 0})².
pub fn worst_case_signal_power(w: &[Complex64], q: &FactorQ, eta: f64) -> f64 {
    let norm: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let margin = q.applied_norm(w) - eta * norm;
    margin.max(0.0).powi(2)
}

/// Signed ratio-form objective (‖Qw‖ − η‖w‖)/√(wᴴ(R̂+γI)w); scale-invariant.
pub fn worst_case_objective_13(
    w: &[Complex64],
    q: &FactorQ,
    eta: f64,
    rhat: &HermitianMatrix,
    gamma: f64,
) -> Result<f64> {
    let norm_sq: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(Error::InvalidArgument(
            "ratio objective undefined at w = 0".into(),
        ));
    }
    let den = worst_case_denominator(w, rhat, gamma);
    if den <= 0.0 {
        return Err(Error::InvalidArgument(
            "denominator quadratic form vanishes; R̂ + γI must be positive definite".into(),
        ));
    }
    Ok((q.applied_norm(w) - eta * norm_sq.sqrt()) / den.sqrt())
}

/// Deterministic feasible start: the principal eigendirection of QᴴQ scaled
/// to clear the constraint with margin 1e-3.
pub fn initial_point(q: &FactorQ, eta: f64) -> Result<Vec<Complex64>> {
    let (vals, vecs) = eig_hermitian(&q.gram());
    let sigma_max = vals.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if sigma_max <= eta {
        return Err(Error::InfeasibleFactorBound { sigma_max, eta });
    }
    let c = (1.0 + INITIAL_POINT_MARGIN) / (sigma_max - eta);
    let n = q.n();
    Ok((0..n).map(|i| c * vecs[(i, 0)]).collect())
}

/// Quadratic-form objective of form 14 evaluated in complex arithmetic.
pub fn objective_14(w: &[Complex64], rhat: &HermitianMatrix, gamma: f64) -> f64 {
    worst_case_denominator(w, rhat, gamma)
}

/// Rescale an optimum of the quadratic form to the ratio form:
/// w13 = w14/√v14, val13 = 1/√v14.
pub fn rescale_14_to_13(w14: &[Complex64], v14: f64) -> Result<(Vec<Complex64>, f64)> {
    if !(v14 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rescale requires a positive objective value, got {v14}"
        )));
    }
    let root = v14.sqrt();
    Ok((w14.iter().map(|c| c / root).collect(), 1.0 / root))
}

/// Inverse rescale: w14 = w13/val13, v14 = 1/val13².
pub fn rescale_13_to_14(w13: &[Complex64], val13: f64) -> Result<(Vec<Complex64>, f64)> {
    if !(val13 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rescale requires a positive ratio value, got {val13}"
        )));
    }
    Ok((
        w13.iter().map(|c| c / val13).collect(),
        1.0 / (val13 * val13),
    ))
}

/// A built SOCP restriction together with the layout needed to map the
/// solver's real variable vector back to complex beamformer weights.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub problem: ConicProblem,
    layout: SubproblemLayout,
}

#[derive(Debug, Clone)]
enum SubproblemLayout {
    /// Variables [u1, x(nr) | g0, gz(nr), gl | p]; x sits at offset 1.
    FactorBound { nr: usize },
    /// η = 0: the embedded weight vector is recovered from the cone tail
    /// at offset 1 as x = scale · S⁻¹ z.
    NoFactorBound { nr: usize, sinv: Mat, scale: f64 },
}

impl Subproblem {
    /// Complex weights from the solver's primal vector.
    pub fn extract_weights(&self, x: &[f64]) -> Vec<Complex64> {
        match &self.layout {
            SubproblemLayout::FactorBound { nr } => unembed_vector(&x[1..1 + nr]),
            SubproblemLayout::NoFactorBound { nr, sinv, scale } => {
                let z = &x[1..1 + nr];
                let mut real = sinv.matvec(z);
                for v in real.iter_mut() {
                    *v *= scale;
                }
                unembed_vector(&real)
            }
        }
    }
}

/// Precomputed factor data shared by every subproblem of one solve.
struct SubproblemBuilder {
    /// Real embedding of (R̂+γI)^{1/2}.
    f: Mat,
    /// Real embedding of (R̂+γI)^{-1/2}; only needed when η = 0.
    sinv: Option<Mat>,
    gram: HermitianMatrix,
    eta: f64,
    nr: usize,
}

impl SubproblemBuilder {
    fn new(rhat: &HermitianMatrix, gamma: f64, q: &FactorQ, eta: f64) -> Result<Self> {
        if q.n() != rhat.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Q has {} columns but R̂ is {}x{}",
                q.n(),
                rhat.dim(),
                rhat.dim()
            )));
        }
        if !(gamma >= 0.0) || !(eta >= 0.0) {
            return Err(Error::InvalidArgument(
                "gamma and eta must be nonnegative".into(),
            ));
        }
        let loaded = rhat.add_scaled_identity(gamma);
        let f = embed_matrix(psd_power(&loaded, 0.5)?.as_cmat());
        let sinv = if eta == 0.0 {
            Some(embed_matrix(psd_power(&loaded, -0.5)?.as_cmat()))
        } else {
            None
        };
        Ok(SubproblemBuilder {
            f,
            sinv,
            gram: q.gram(),
            eta,
            nr: 2 * rhat.dim(),
        })
    }

    /// Linearization direction ã = embed(QᴴQ w_k / ‖Q w_k‖).
    fn linearization(&self, w_k: &[Complex64], q: &FactorQ) -> Result<Vec<f64>> {
        let qn = q.applied_norm(w_k);
        if qn <= LINEARIZATION_FLOOR {
            return Err(Error::DegenerateLinearization { norm: qn });
        }
        let mut a = self.gram.matvec(w_k);
        for c in a.iter_mut() {
            *c /= qn;
        }
        Ok(embed_vector(&a))
    }

    /// Restriction subproblem at the iterate w_k:
    ///
    ///   minimize  wᴴR̂w + γ‖w‖²
    ///   s.t.      ãᵀx ≥ t,  t − 1 ≥ η‖x‖      (x = embedded w)
    ///
    /// with t eliminated (ãᵀx − η‖x‖ ≥ 1) and the quadratic objective
    /// epigraphed through a rotated cone mapped to a standard SOC.
    fn build(&self, w_k: &[Complex64], q: &FactorQ) -> Result<Subproblem> {
        let atilde = self.linearization(w_k, q)?;
        let nr = self.nr;
        let sqrt2 = std::f64::consts::SQRT_2;
        if self.eta > 0.0 {
            // variables: [u1, x] ∈ SOC(nr+1), [g0, gz, gl] ∈ SOC(nr+2), p ≥ 0
            let n = 2 * nr + 4;
            let m = nr + 2;
            let (off_x, off_g0, off_gz, off_gl, off_p) = (1, nr + 1, nr + 2, 2 * nr + 2, 2 * nr + 3);
            let mut a = Mat::zeros(m, n);
            let mut b = vec![0.0; m];
            // gz − √2 F x = 0
            for r in 0..nr {
                a[(r, off_gz + r)] = 1.0;
                for j in 0..nr {
                    a[(r, off_x + j)] = -sqrt2 * self.f[(r, j)];
                }
            }
            // g0 − gl = 1 (rotated-cone second leg fixed to 1/2 each side)
            a[(nr, off_g0)] = 1.0;
            a[(nr, off_gl)] = -1.0;
            b[nr] = 1.0;
            // ãᵀx − η u1 − p = 1
            a[(nr + 1, 0)] = -self.eta;
            for j in 0..nr {
                a[(nr + 1, off_x + j)] = atilde[j];
            }
            a[(nr + 1, off_p)] = -1.0;
            b[nr + 1] = 1.0;
            let mut c = vec![0.0; n];
            c[off_g0] = 1.0;
            let cones = ConeSpec::new(vec![
                ConeBlock::SecondOrder { dim: nr + 1 },
                ConeBlock::SecondOrder { dim: nr + 2 },
                ConeBlock::NonNeg { dim: 1 },
            ])?;
            Ok(Subproblem {
                problem: ConicProblem::new(c, a, b, cones)?,
                layout: SubproblemLayout::FactorBound { nr },
            })
        } else {
            // η = 0: the norm-bound cone would have no dual interior, so x
            // is eliminated through x = S⁻¹gz/√2 (S = (R̂+γI)^{1/2} ≻ 0).
            let sinv = self.sinv.as_ref().expect("built with eta = 0");
            let n = nr + 3;
            let m = 2;
            let (off_g0, off_gz, off_gl, off_p) = (0, 1, nr + 1, nr + 2);
            let mut a = Mat::zeros(m, n);
            let mut b = vec![0.0; m];
            a[(0, off_g0)] = 1.0;
            a[(0, off_gl)] = -1.0;
            b[0] = 1.0;
            // ãᵀ S⁻¹ gz / √2 − p = 1
            let ghat = sinv.matvec(&atilde);
            for j in 0..nr {
                a[(1, off_gz + j)] = ghat[j] / sqrt2;
            }
            a[(1, off_p)] = -1.0;
            b[1] = 1.0;
            let mut c = vec![0.0; n];
            c[off_g0] = 1.0;
            let cones = ConeSpec::new(vec![
                ConeBlock::SecondOrder { dim: nr + 2 },
                ConeBlock::NonNeg { dim: 1 },
            ])?;
            Ok(Subproblem {
                problem: ConicProblem::new(c, a, b, cones)?,
                layout: SubproblemLayout::NoFactorBound {
                    nr,
                    sinv: sinv.clone(),
                    scale: std::f64::consts::FRAC_1_SQRT_2,
                },
            })
        }
    }

    /// Direct ratio-form subproblem at the iterate w_k:
    ///
    ///   maximize  s
    ///   s.t.      t − η‖x‖ ≥ s,  ãᵀx ≥ t,  ‖F x‖ ≤ 1
    ///
    /// with s and t eliminated: minimize η·u1 − ãᵀx over u1 ≥ ‖x‖, ‖Fx‖ ≤ 1.
    fn build_direct(&self, w_k: &[Complex64], q: &FactorQ) -> Result<Subproblem> {
        let atilde = self.linearization(w_k, q)?;
        let nr = self.nr;
        if self.eta > 0.0 {
            // variables: [u1, x] ∈ SOC(nr+1), [h0, hz] ∈ SOC(nr+1)
            let n = 2 * nr + 2;
            let m = nr + 1;
            let (off_x, off_h0, off_hz) = (1, nr + 1, nr + 2);
            let mut a = Mat::zeros(m, n);
            let mut b = vec![0.0; m];
            a[(0, off_h0)] = 1.0;
            b[0] = 1.0;
            for r in 0..nr {
                a[(1 + r, off_hz + r)] = 1.0;
                for j in 0..nr {
                    a[(1 + r, off_x + j)] = -self.f[(r, j)];
                }
            }
            let mut c = vec![0.0; n];
            c[0] = self.eta;
            for j in 0..nr {
                c[off_x + j] = -atilde[j];
            }
            let cones = ConeSpec::new(vec![
                ConeBlock::SecondOrder { dim: nr + 1 },
                ConeBlock::SecondOrder { dim: nr + 1 },
            ])?;
            Ok(Subproblem {
                problem: ConicProblem::new(c, a, b, cones)?,
                layout: SubproblemLayout::FactorBound { nr },
            })
        } else {
            // η = 0 with x eliminated: minimize −(S⁻¹ã)ᵀ hz over ‖hz‖ ≤ h0 = 1
            let sinv = self.sinv.as_ref().expect("built with eta = 0");
            let n = nr + 1;
            let mut a = Mat::zeros(1, n);
            a[(0, 0)] = 1.0;
            let b = vec![1.0];
            let ghat = sinv.matvec(&atilde);
            let mut c = vec![0.0; n];
            for j in 0..nr {
                c[1 + j] = -ghat[j];
            }
            let cones = ConeSpec::new(vec![ConeBlock::SecondOrder { dim: nr + 1 }])?;
            Ok(Subproblem {
                problem: ConicProblem::new(c, a, b, cones)?,
                layout: SubproblemLayout::NoFactorBound {
                    nr,
                    sinv: sinv.clone(),
                    scale: 1.0,
                },
            })
        }
    }
}

/// Build one restriction subproblem in isolation (the solver loop reuses a
/// shared factorization instead of calling this).
pub fn build_subproblem(
    w_k: &[Complex64],
    rhat: &HermitianMatrix,
    gamma: f64,
    q: &FactorQ,
    eta: f64,
) -> Result<Subproblem> {
    SubproblemBuilder::new(rhat, gamma, q, eta)?.build(w_k, q)
}

/// Feasibility margin of w for the quadratic form: ‖Qw‖ − η‖w‖ − 1.
pub fn feasibility_margin_14(w: &[Complex64], q: &FactorQ, eta: f64) -> f64 {
    let norm: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    q.applied_norm(w) - eta * norm - 1.0
}

/// Inner-approximation loop for the quadratic form: solve the SOCP
/// restriction at the current iterate, move to its optimum, and stop when
/// the objective decrease falls to `xi` or below. The value sequence is
/// nonincreasing because each iterate stays feasible for the next
/// restriction.
pub fn solve_inner_socp(
    rhat: &HermitianMatrix,
    q: &FactorQ,
    params: &RobustParams,
    w0: &[Complex64],
) -> Result<BeamformerResult> {
    params.validate()?;
    if feasibility_margin_14(w0, q, params.eta) < -1e-9 {
        return Err(Error::InvalidArgument(
            "w0 violates ||Qw|| - eta*||w|| >= 1".into(),
        ));
    }
    let builder = SubproblemBuilder::new(rhat, params.gamma, q, params.eta)?;
    let mut w = w0.to_vec();
    let mut v_prev = objective_14(&w, rhat, params.gamma);
    let mut trace = IterationTrace::default();
    let margin0 = feasibility_margin_14(&w, q, params.eta) + 1.0;
    trace.records.push(IterationRecord {
        k: 0,
        v: v_prev,
        t: t_value(&w, params.eta),
        qw_norm: q.applied_norm(&w),
        margin: margin0,
        gap: 0.0,
        primal_res: 0.0,
        dual_res: 0.0,
        status: SolveStatus::Optimal,
        ms: 0.0,
    });
    let mut converged = false;
    for k in 1..=params.max_outer {
        let start = Instant::now();
        let sub = builder.build(&w, q)?;
        let sol = solve_conic(&sub.problem, SUBPROBLEM_TOL, SUBPROBLEM_MAX_ITER);
        if sol.status != SolveStatus::Optimal {
            return Err(Error::SubproblemFailed {
                iter: k,
                status: sol.status,
            });
        }
        w = sub.extract_weights(&sol.x);
        // the restriction is scale-invariant in the linearization point, so
        // rescaling the iterate onto the active constraint surface
        // (||Qw|| - eta*||w|| = 1) changes only the bookkeeping, keeping
        // every recorded iterate exactly feasible
        let margin = feasibility_margin_14(&w, q, params.eta) + 1.0;
        if !(margin > 0.0) {
            return Err(Error::SubproblemFailed {
                iter: k,
                status: sol.status,
            });
        }
        for c in w.iter_mut() {
            *c /= margin;
        }
        let v = objective_14(&w, rhat, params.gamma);
        trace.records.push(IterationRecord {
            k,
            v,
            t: t_value(&w, params.eta),
            qw_norm: q.applied_norm(&w),
            margin: feasibility_margin_14(&w, q, params.eta) + 1.0,
            gap: sol.gap,
            primal_res: sol.primal_res,
            dual_res: sol.dual_res,
            status: sol.status,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        if v_prev - v <= params.xi {
            converged = true;
            break;
        }
        v_prev = v;
    }
    let v14 = objective_14(&w, rhat, params.gamma);
    let (w13, val13) = rescale_14_to_13(&w, v14)?;
    Ok(BeamformerResult {
        w14: w,
        v14,
        w13,
        val13,
        trace,
        converged,
    })
}

/// The eliminated epigraph variable of the restriction: t = η‖w‖ + 1 (both
/// norm constraints are active at any nondegenerate subproblem optimum).
fn t_value(w: &[Complex64], eta: f64) -> f64 {
    let norm: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    eta * norm + 1.0
}

/// Direct iteration on the ratio form: maximize the linearized ratio over
/// the unit ellipsoid wᴴ(R̂+γI)w ≤ 1, relinearizing at each solution. The
/// value sequence s_k is nondecreasing; at a fixed point val13 = s_final.
pub fn solve_direct_form(
    rhat: &HermitianMatrix,
    q: &FactorQ,
    params: &RobustParams,
    w0: &[Complex64],
) -> Result<BeamformerResult> {
    params.validate()?;
    if q.applied_norm(w0) <= LINEARIZATION_FLOOR {
        return Err(Error::DegenerateLinearization {
            norm: q.applied_norm(w0),
        });
    }
    if worst_case_denominator(w0, rhat, params.gamma) > 1.0 + 1e-9 {
        return Err(Error::InvalidArgument(
            "w0 violates the unit-ellipsoid constraint of the ratio form".into(),
        ));
    }
    let builder = SubproblemBuilder::new(rhat, params.gamma, q, params.eta)?;
    let mut w = w0.to_vec();
    let norm0: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut s_prev = q.applied_norm(&w) - params.eta * norm0;
    let mut trace = IterationTrace::default();
    trace.records.push(IterationRecord {
        k: 0,
        v: s_prev,
        t: q.applied_norm(&w),
        qw_norm: q.applied_norm(&w),
        margin: s_prev,
        gap: 0.0,
        primal_res: 0.0,
        dual_res: 0.0,
        status: SolveStatus::Optimal,
        ms: 0.0,
    });
    let mut converged = false;
    for k in 1..=params.max_outer {
        let start = Instant::now();
        let sub = builder.build_direct(&w, q)?;
        let sol = solve_conic(&sub.problem, SUBPROBLEM_TOL, SUBPROBLEM_MAX_ITER);
        if sol.status != SolveStatus::Optimal {
            return Err(Error::SubproblemFailed {
                iter: k,
                status: sol.status,
            });
        }
        let w_prev = w.clone();
        w = sub.extract_weights(&sol.x);
        // s_k recomputed in complex arithmetic under the k-th linearization
        let qn_prev = q.applied_norm(&w_prev);
        let lin = herm_inner(&q.gram().matvec(&w_prev), &w).re / qn_prev;
        let norm_k: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let s = lin - params.eta * norm_k;
        trace.records.push(IterationRecord {
            k,
            v: s,
            t: lin,
            qw_norm: q.applied_norm(&w),
            margin: q.applied_norm(&w) - params.eta * norm_k,
            gap: sol.gap,
            primal_res: sol.primal_res,
            dual_res: sol.dual_res,
            status: sol.status,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        if s - s_prev <= params.xi {
            converged = true;
            break;
        }
        s_prev = s;
    }
    let val13 = worst_case_objective_13(&w, q, params.eta, rhat, params.gamma)?;
    if !(val13 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "direct iteration ended at a nonpositive ratio value {val13}"
        )));
    }
    let den = worst_case_denominator(&w, rhat, params.gamma).sqrt();
    let w13: Vec<Complex64> = w.iter().map(|c| c / den).collect();
    let (w14, v14) = rescale_13_to_14(&w13, val13)?;
    Ok(BeamformerResult {
        w14,
        v14,
        w13,
        val13,
        trace,
        converged,
    })
}

fn herm_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn cnorm(w: &[Complex64]) -> f64 {
        w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn random_unit(n: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
        let mut w: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
            })
            .collect();
        let nn = cnorm(&w);
        for c in w.iter_mut() {
            *c /= nn;
        }
        w
    }

    /// Random PSD matrix with geometrically decaying spectrum so that the
    /// top eigenvalue dominates the trace and the robust problem stays
    /// feasible under the default eta rule.
    fn random_decaying_psd(n: usize, rng: &mut ChaCha20Rng) -> HermitianMatrix {
        let mut g = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] =
                    Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
            }
        }
        // orthonormalize columns by Gram-Schmidt
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| (0..n).map(|i| g[(i, j)]).collect())
            .collect();
        for j in 0..n {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for i in 0..n {
                    let sub = proj * cols[k][i];
                    cols[j][i] -= sub;
                }
            }
            let nn = cnorm(&cols[j]);
            for c in cols[j].iter_mut() {
                *c /= nn;
            }
        }
        let mut m = CMat::zeros(n, n);
        for (k, col) in cols.iter().enumerate() {
            let lam = 0.5f64.powi(k as i32);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += lam * col[i] * col[j].conj();
                }
            }
        }
        HermitianMatrix::new(m).unwrap()
    }

    fn random_instance(
        n: usize,
        seed: u64,
    ) -> (HermitianMatrix, FactorQ, RobustParams, Vec<Complex64>) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let rs = random_decaying_psd(n, &mut rng);
        let rhat = random_decaying_psd(n, &mut rng).add_scaled_identity(0.1);
        let q = factorize_presumed(&rs, None).unwrap();
        let params = derive_params(&rhat, &rs);
        let w0 = initial_point(&q, params.eta).unwrap();
        (rhat, q, params, w0)
    }

    #[test]
    fn derive_params_identity() {
        let eye = HermitianMatrix::identity(10);
        let p = derive_params(&eye, &eye);
        assert!((p.gamma - 0.1 * 10f64.sqrt()).abs() < 1e-14);
        assert!((p.eta - 0.5 * 10f64.sqrt()).abs() < 1e-14);
        assert_eq!(p.xi, 1e-8);
        assert_eq!(p.max_outer, 500);
    }

    #[test]
    fn derive_params_zero_matrix() {
        let z = HermitianMatrix::zeros(4);
        let p = derive_params(&z, &z);
        assert_eq!(p.gamma, 0.0);
        assert_eq!(p.eta, 0.0);
    }

    #[test]
    fn factorize_identity_is_unitary() {
        let q = factorize_presumed(&HermitianMatrix::identity(3), None).unwrap();
        assert_eq!(q.m(), 3);
        let g = q.gram();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g.as_cmat()[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn factorize_rank_one() {
        let v = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        let mut m = CMat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        let rs = HermitianMatrix::new(m).unwrap();
        let q = factorize_presumed(&rs, None).unwrap();
        assert_eq!(q.m(), 1);
        let g = q.gram();
        let diff = g.as_cmat().sub(rs.as_cmat());
        assert!(diff.frobenius_norm() < 1e-12);
    }

    #[test]
    fn factorize_rejects_zero() {
        assert!(factorize_presumed(&HermitianMatrix::zeros(3), None).is_err());
    }

    #[test]
    fn factorize_reconstructs_random_covariances() {
        for seed in 0..20u64 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let rs = random_decaying_psd(5, &mut rng);
            let q = factorize_presumed(&rs, None).unwrap();
            let diff = q.gram().as_cmat().sub(rs.as_cmat());
            assert!(
                diff.frobenius_norm() <= 1e-9 * rs.frobenius_norm(),
                "seed {seed}: {}",
                diff.frobenius_norm()
            );
        }
    }

    #[test]
    fn denominator_identity_and_zero() {
        let eye = HermitianMatrix::identity(3);
        let w = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 0.0),
        ];
        let nsq: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        assert!((worst_case_denominator(&w, &eye, 0.0) - nsq).abs() < 1e-12);
        let zero = vec![Complex64::new(0.0, 0.0); 3];
        assert_eq!(worst_case_denominator(&zero, &eye, 2.0), 0.0);
    }

    #[test]
    fn denominator_analytic_maximizer_attains() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let rhat = random_decaying_psd(4, &mut rng);
        let w = random_unit(4, &mut rng);
        let gamma = 0.3;
        // Delta1 = gamma w w^H / ||w||^2 has spectral and Frobenius norm gamma
        let nsq: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        let mut pert = rhat.as_cmat().clone();
        for i in 0..4 {
            for j in 0..4 {
                pert[(i, j)] += gamma * w[i] * w[j].conj() / nsq;
            }
        }
        let attained = HermitianMatrix::new(pert).unwrap().quadratic_form(&w);
        let bound = worst_case_denominator(&w, &rhat, gamma);
        assert!((attained - bound).abs() < 1e-12);
    }

    #[test]
    fn signal_power_limits() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let rs = random_decaying_psd(4, &mut rng);
        let q = factorize_presumed(&rs, None).unwrap();
        let w = random_unit(4, &mut rng);
        let qw = q.applied_norm(&w);
        assert!((worst_case_signal_power(&w, &q, 0.0) - qw * qw).abs() < 1e-12);
        // clamp regime: eta larger than ||Qw||/||w||
        assert_eq!(worst_case_signal_power(&w, &q, qw + 1.0), 0.0);
    }

    #[test]
    fn signal_power_analytic_minimizer_attains() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let rs = random_decaying_psd(4, &mut rng);
        let q = factorize_presumed(&rs, None).unwrap();
        let w = random_unit(4, &mut rng);
        let qw_vec = q.apply(&w);
        let qw = cnorm(&qw_vec);
        let wn = cnorm(&w);
        let eta = 0.25 * qw / wn;
        // Delta* = -eta Q w w^H / (||Qw|| ||w||), Frobenius norm exactly eta
        let m = q.m();
        let n = q.n();
        let mut delta = CMat::zeros(m, n);
        let mut fro = 0.0;
        for i in 0..m {
            for j in 0..n {
                delta[(i, j)] = -eta * qw_vec[i] * w[j].conj() / (qw * wn);
                fro += delta[(i, j)].norm_sqr();
            }
        }
        assert!((fro.sqrt() - eta).abs() < 1e-12);
        let perturbed = q.entries.add(&delta);
        let attained: f64 = perturbed
            .matvec(&w)
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        let bound = worst_case_signal_power(&w, &q, eta);
        assert!((attained - bound).abs() < 1e-10, "{attained} vs {bound}");
    }

    #[test]
    fn objective_13_scale_invariant() {
        let (rhat, q, params, w0) = random_instance(5, 9);
        let base = worst_case_objective_13(&w0, &q, params.eta, &rhat, params.gamma).unwrap();
        for c in [0.1, 7.0, 1e3] {
            let scaled: Vec<Complex64> = w0.iter().map(|v| c * v).collect();
            let val =
                worst_case_objective_13(&scaled, &q, params.eta, &rhat, params.gamma).unwrap();
            assert!((val - base).abs() <= 1e-12 * base.abs().max(1.0), "c = {c}");
        }
    }

    #[test]
    fn objective_13_identity_instance() {
        // Q = I and R_hat + gamma I = I: value 1 for any nonzero w
        let q = FactorQ::new(CMat::identity(3)).unwrap();
        let rhat = HermitianMatrix::identity(3).scale(0.5);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let w = random_unit(3, &mut rng);
        let val = worst_case_objective_13(&w, &q, 0.0, &rhat, 0.5).unwrap();
        assert!((val - 1.0).abs() < 1e-12);
    }

    #[test]
    fn objective_13_rejects_zero() {
        let q = FactorQ::new(CMat::identity(2)).unwrap();
        let rhat = HermitianMatrix::identity(2);
        let zero = vec![Complex64::new(0.0, 0.0); 2];
        assert!(worst_case_objective_13(&zero, &q, 0.0, &rhat, 0.0).is_err());
    }

    #[test]
    fn initial_point_identity() {
        let q = FactorQ::new(CMat::identity(2)).unwrap();
        let w0 = initial_point(&q, 0.0).unwrap();
        assert!((cnorm(&w0) - 1.001).abs() < 1e-12);
        assert!(feasibility_margin_14(&w0, &q, 0.0) >= 0.0);
    }

    #[test]
    fn initial_point_diagonal_margin() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        let q = FactorQ::new(m).unwrap();
        let w0 = initial_point(&q, 1.0).unwrap();
        assert!(w0[1].norm() < 1e-10, "w0 should align with e1");
        let margin = feasibility_margin_14(&w0, &q, 1.0);
        assert!((margin - 1e-3).abs() < 1e-9, "margin {margin}");
    }

    #[test]
    fn initial_point_infeasible_boundary() {
        let q = FactorQ::new(CMat::identity(2)).unwrap();
        match initial_point(&q, 1.0) {
            Err(Error::InfeasibleFactorBound { .. }) => {}
            other => panic!("expected infeasibility error, got {other:?}"),
        }
    }

    #[test]
    fn subproblem_solution_feasible_in_complex_arithmetic() {
        let (rhat, q, params, w0) = random_instance(5, 21);
        let sub = build_subproblem(&w0, &rhat, params.gamma, &q, params.eta).unwrap();
        let sol = solve_conic(&sub.problem, 1e-9, 200);
        assert_eq!(sol.status, SolveStatus::Optimal);
        let w = sub.extract_weights(&sol.x);
        // constraints of the restriction evaluated on the complex side
        let qn0 = q.applied_norm(&w0);
        let a = q.gram().matvec(&w0);
        let lin = herm_inner(&a, &w).re / qn0;
        let wn = cnorm(&w);
        assert!(
            lin >= 1.0 + params.eta * wn - 1e-8,
            "linearized constraint: {lin} vs {}",
            1.0 + params.eta * wn
        );
    }

    #[test]
    fn subproblem_constraints_tight_at_optimum() {
        let (rhat, q, params, w0) = random_instance(4, 33);
        let sub = build_subproblem(&w0, &rhat, params.gamma, &q, params.eta).unwrap();
        let sol = solve_conic(&sub.problem, 1e-9, 200);
        assert_eq!(sol.status, SolveStatus::Optimal);
        let w = sub.extract_weights(&sol.x);
        let qn0 = q.applied_norm(&w0);
        let a = q.gram().matvec(&w0);
        let lin = herm_inner(&a, &w).re / qn0;
        let slack = lin - 1.0 - params.eta * cnorm(&w);
        assert!(slack.abs() <= 1e-8, "active-constraint slack {slack}");
    }

    #[test]
    fn subproblem_eta_zero_matches_closed_form() {
        let (rhat, q, params, w0) = random_instance(5, 44);
        let gamma = params.gamma;
        let sub = build_subproblem(&w0, &rhat, gamma, &q, 0.0).unwrap();
        let sol = solve_conic(&sub.problem, 1e-9, 200);
        assert_eq!(sol.status, SolveStatus::Optimal);
        let w = sub.extract_weights(&sol.x);
        let v = objective_14(&w, &rhat, gamma);
        // closed form: min w'(R+gI)w s.t. Re(a'w) >= 1 is 1/(a'(R+gI)^{-1}a)
        let qn0 = q.applied_norm(&w0);
        let mut a = q.gram().matvec(&w0);
        for c in a.iter_mut() {
            *c /= qn0;
        }
        let loaded_inv = psd_power(&rhat.add_scaled_identity(gamma), -1.0).unwrap();
        let inv_a = loaded_inv.matvec(&a);
        let quad = herm_inner(&a, &inv_a).re;
        let expected = 1.0 / quad;
        assert!(
            (v - expected).abs() <= 1e-8 * expected,
            "value {v} vs closed form {expected}"
        );
        // minimizer matches (R+gI)^{-1}a / quad
        for i in 0..5 {
            let wi_expected = inv_a[i] / quad;
            assert!((w[i] - wi_expected).norm() < 1e-6, "component {i}");
        }
    }

    #[test]
    fn subproblem_rejects_degenerate_linearization() {
        let mut m = CMat::zeros(1, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        let q = FactorQ::new(m).unwrap();
        let rhat = HermitianMatrix::identity(2);
        // w in the null space of Q
        let w = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        match build_subproblem(&w, &rhat, 0.1, &q, 0.5) {
            Err(Error::DegenerateLinearization { .. }) => {}
            other => panic!("expected degenerate linearization, got {other:?}"),
        }
    }

    #[test]
    fn inner_socp_monotone_and_feasible() {
        for seed in [1u64, 2, 3] {
            let (rhat, q, params, w0) = random_instance(5, seed);
            let res = solve_inner_socp(&rhat, &q, &params, &w0).unwrap();
            assert!(res.converged, "seed {seed}");
            let vs: Vec<f64> = res.trace.records.iter().map(|r| r.v).collect();
            for pair in vs.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9, "seed {seed}: {vs:?}");
            }
            assert!(
                feasibility_margin_14(&res.w14, &q, params.eta) >= -1e-7,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn inner_socp_rank_one_closed_form() {
        // M = 1: the restriction is exact, so the optimum lands in <= 2 steps
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let rhat = random_decaying_psd(4, &mut rng).add_scaled_identity(0.1);
        let qv = random_unit(4, &mut rng);
        let mut qm = CMat::zeros(1, 4);
        for j in 0..4 {
            qm[(0, j)] = 2.0 * qv[j].conj();
        }
        let q = FactorQ::new(qm).unwrap();
        let gamma = 0.2;
        let params = RobustParams {
            gamma,
            eta: 0.0,
            xi: 1e-8,
            max_outer: 500,
        };
        let w0 = initial_point(&q, 0.0).unwrap();
        let res = solve_inner_socp(&rhat, &q, &params, &w0).unwrap();
        // ratio optimum: sqrt(q'(R+gI)^{-1}q) with q the single factor row
        let row: Vec<Complex64> = (0..4).map(|j| qm_row(&q, j)).collect();
        let inv = psd_power(&rhat.add_scaled_identity(gamma), -1.0).unwrap();
        let inv_row = inv.matvec(&row);
        let expected = herm_inner(&row, &inv_row).re.sqrt();
        assert!(
            (res.val13 - expected).abs() <= 1e-8 * expected,
            "val13 {} vs {expected}",
            res.val13
        );
        assert!(res.trace.outer_iterations() <= 2);
    }

    fn qm_row(q: &FactorQ, j: usize) -> Complex64 {
        q.entries[(0, j)].conj()
    }

    #[test]
    fn inner_socp_eta_zero_generalized_eigenvalue() {
        for seed in [11u64, 12, 13, 14] {
            let (rhat, q, params, _) = random_instance(5, seed);
            let gamma = params.gamma;
            let p0 = RobustParams {
                gamma,
                eta: 0.0,
                xi: 1e-10,
                max_outer: 500,
            };
            let w0 = initial_point(&q, 0.0).unwrap();
            let res = solve_inner_socp(&rhat, &q, &p0, &w0).unwrap();
            let expected = eta_zero_optimum(&rhat, gamma, &q);
            assert!(
                (res.val13 - expected).abs() <= 1e-6 * expected,
                "seed {seed}: val13 {} vs {expected}",
                res.val13
            );
        }
    }

    /// sqrt of the largest eigenvalue of (R+gI)^{-1/2} Q'Q (R+gI)^{-1/2}.
    fn eta_zero_optimum(rhat: &HermitianMatrix, gamma: f64, q: &FactorQ) -> f64 {
        let half = psd_power(&rhat.add_scaled_identity(gamma), -0.5).unwrap();
        let inner = half
            .as_cmat()
            .matmul(q.gram().as_cmat())
            .matmul(half.as_cmat());
        let (vals, _) = eig_hermitian(&HermitianMatrix::new(inner).unwrap());
        vals[0].sqrt()
    }

    #[test]
    fn rescale_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let w = random_unit(4, &mut rng);
        let v14 = 3.7;
        let (w13, val13) = rescale_14_to_13(&w, v14).unwrap();
        assert!((val13 - 1.0 / v14.sqrt()).abs() < 1e-15);
        let (w_back, v_back) = rescale_13_to_14(&w13, val13).unwrap();
        assert!((v_back - v14).abs() <= 1e-12 * v14);
        for i in 0..4 {
            assert!((w_back[i] - w[i]).norm() <= 1e-12);
        }
    }

    #[test]
    fn rescale_arithmetic_cases() {
        let w = vec![Complex64::new(2.0, -1.0)];
        let (w13, val13) = rescale_14_to_13(&w, 4.0).unwrap();
        assert!((w13[0] - w[0] / 2.0).norm() < 1e-15);
        assert!((val13 - 0.5).abs() < 1e-15);
        let (w14, v14) = rescale_13_to_14(&w13, 0.5).unwrap();
        assert!((w14[0] - w[0]).norm() < 1e-15);
        assert!((v14 - 4.0).abs() < 1e-15);
        assert!(rescale_14_to_13(&w, 0.0).is_err());
        assert!(rescale_13_to_14(&w, -1.0).is_err());
    }

    #[test]
    fn rescale_cross_evaluation_at_optimum() {
        let (rhat, q, params, w0) = random_instance(5, 16);
        let res = solve_inner_socp(&rhat, &q, &params, &w0).unwrap();
        let val =
            worst_case_objective_13(&res.w13, &q, params.eta, &rhat, params.gamma).unwrap();
        assert!(
            (val - res.val13).abs() <= 1e-7 * res.val13.abs().max(1.0),
            "{val} vs {}",
            res.val13
        );
        // unit denominator at the rescaled point
        let den = worst_case_denominator(&res.w13, &rhat, params.gamma);
        assert!((den - 1.0).abs() <= 1e-8, "denominator {den}");
    }

    #[test]
    fn direct_form_identity_instance() {
        // Q = I, R_hat + gamma I = I, eta 0: optimum of the ratio form is 1
        let q = FactorQ::new(CMat::identity(3)).unwrap();
        let rhat = HermitianMatrix::identity(3).scale(0.5);
        let params = RobustParams {
            gamma: 0.5,
            eta: 0.0,
            xi: 1e-10,
            max_outer: 100,
        };
        let mut rng = ChaCha20Rng::seed_from_u64(18);
        let w0 = random_unit(3, &mut rng);
        let res = solve_direct_form(&rhat, &q, &params, &w0).unwrap();
        assert!(res.converged);
        assert!((res.val13 - 1.0).abs() < 1e-8, "val13 {}", res.val13);
    }

    #[test]
    fn direct_form_agrees_with_inner_route() {
        for seed in [25u64, 26, 27] {
            let (rhat, q, params, w0) = random_instance(5, seed);
            let inner = solve_inner_socp(&rhat, &q, &params, &w0).unwrap();
            let den = worst_case_denominator(&w0, &rhat, params.gamma).sqrt();
            let w0_direct: Vec<Complex64> = w0.iter().map(|c| c / den).collect();
            let direct = solve_direct_form(&rhat, &q, &params, &w0_direct).unwrap();
            let rel = (direct.val13 - inner.val13).abs() / inner.val13;
            assert!(rel <= 1e-5, "seed {seed}: {} vs {}", direct.val13, inner.val13);
            // s_k nondecreasing
            let ss: Vec<f64> = direct.trace.records.iter().map(|r| r.v).collect();
            for pair in ss.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-9, "seed {seed}: {ss:?}");
            }
        }
    }

    #[test]
    fn result_json_shape() {
        let (rhat, q, params, w0) = random_instance(4, 31);
        let res = solve_inner_socp(&rhat, &q, &params, &w0).unwrap();
        let j = res.to_json();
        assert!(j["w14"]["re"].as_array().unwrap().len() == 4);
        assert!(j["w13"]["im"].as_array().unwrap().len() == 4);
        assert!(j["v14"].is_f64());
        let trace = j["trace"].as_array().unwrap();
        assert_eq!(trace.len(), res.trace.records.len());
        assert!(trace[0]["k"].is_u64() || trace[0]["k"].is_i64());
        assert!(trace[0]["v"].is_f64());
    }
}
