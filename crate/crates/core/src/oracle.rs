//! Brute-force validation of the beamformer output: a multi-start local
//! search on the scale-invariant ratio objective, independent of the SOCP
//! machinery, plus sampled worst-case perturbation checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::beamformer::FactorQ;
use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, embed_vector, unembed_vector, HermitianMatrix};
use crate::linalg::{dot, norm2};

/// Relative decrease threshold that counts a start as converged.
const DESCENT_TOL: f64 = 1e-10;
/// Central-difference step relative to the iterate norm (unit here).
const FD_STEP: f64 = 1e-6;
/// Histogram clustering tolerance (relative).
const CLUSTER_TOL: f64 = 1e-6;
const MAX_DESCENT_ITERS: usize = 400;

/// Outcome of a multi-start search.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub best_value: f64,
    pub best_w: Vec<Complex64>,
    pub n_starts: usize,
    pub n_converged: usize,
    /// Distinct local-minimum values, ascending, clustered at 1e-6 relative.
    pub value_histogram: Vec<f64>,
}

impl OracleReport {
    pub fn to_json(&self) -> serde_json::Value {
        let re: Vec<f64> = self.best_w.iter().map(|c| c.re).collect();
        let im: Vec<f64> = self.best_w.iter().map(|c| c.im).collect();
        serde_json::json!({
            "best_value": self.best_value,
            "best_w": { "re": re, "im": im },
            "n_starts": self.n_starts,
            "n_converged": self.n_converged,
            "value_histogram": self.value_histogram,
        })
    }
}

/// Scale-invariant ratio objective f(u) = uᴴ(R̂+γI)u / (‖Qu‖ − η‖u‖)²,
/// with +infinity for directions where the constraint margin is nonpositive.
pub fn ratio_objective(
    u: &[Complex64],
    rhat: &HermitianMatrix,
    gamma: f64,
    q: &FactorQ,
    eta: f64,
) -> f64 {
    let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let margin = q.applied_norm(u) - eta * norm;
    if margin <= 0.0 {
        return f64::INFINITY;
    }
    let num = rhat.quadratic_form(u) + gamma * norm * norm;
    num / (margin * margin)
}

/// Splitmix-style 64-bit mix for deriving independent sub-seeds.
pub fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9e3779b97f4a7c15))
        .wrapping_add(b.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Multi-start projected-gradient descent of the ratio objective over the
/// unit sphere. Gradients come from central differences on the real
/// embedding so the oracle shares no code path with the conic solver.
pub fn multistart_minimize(
    rhat: &HermitianMatrix,
    gamma: f64,
    q: &FactorQ,
    eta: f64,
    n_starts: usize,
    seed: u64,
) -> Result<OracleReport> {
    if n_starts < 1 {
        return Err(Error::InvalidArgument("n_starts must be >= 1".into()));
    }
    let n = rhat.dim();
    if q.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "Q has {} columns but R̂ is {n}x{n}",
            q.n()
        )));
    }
    // Principal direction of QᴴQ: feasible whenever sigma_max(Q) > eta, so
    // blending toward it rescues starts that land outside the margin region.
    let (_, vecs) = eig_hermitian(&q.gram());
    let principal: Vec<Complex64> = (0..n).map(|i| vecs[(i, 0)]).collect();
    let principal = embed_vector(&principal);
    let outcomes: Vec<Option<(f64, Vec<f64>)>> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(mix_seed(seed, i as u64, 0));
            let x0 = random_sphere_point(2 * n, &mut rng);
            let x0 = pull_feasible(&x0, &principal, q, eta)?;
            descend(&x0, rhat, gamma, q, eta)
        })
        .collect();

    let mut converged: Vec<(f64, Vec<f64>)> = outcomes.into_iter().flatten().collect();
    let n_converged = converged.len();
    if n_converged == 0 {
        return Err(Error::InvalidArgument(
            "no oracle start found a feasible direction".into(),
        ));
    }
    converged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (best_value, best_x) = converged[0].clone();

    let mut value_histogram = Vec::new();
    for (v, _) in &converged {
        match value_histogram.last() {
            Some(&rep) if *v <= rep * (1.0 + CLUSTER_TOL) => {}
            _ => value_histogram.push(*v),
        }
    }

    Ok(OracleReport {
        best_value,
        best_w: unembed_vector(&best_x),
        n_starts,
        n_converged,
        value_histogram,
    })
}

/// Blend a unit start toward the principal direction until the constraint
/// margin is comfortably positive. Returns None when even the principal
/// direction is infeasible (sigma_max(Q) <= eta).
fn pull_feasible(x0: &[f64], principal: &[f64], q: &FactorQ, eta: f64) -> Option<Vec<f64>> {
    let margin = |x: &[f64]| {
        let u = unembed_vector(x);
        let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        q.applied_norm(&u) - eta * norm
    };
    if margin(x0) > 1e-8 {
        return Some(x0.to_vec());
    }
    // keep the sign of the overlap so the blend moves away from -principal
    let sign = if dot(x0, principal) >= 0.0 { 1.0 } else { -1.0 };
    let mut c = 0.25;
    for _ in 0..40 {
        let mut x: Vec<f64> = x0
            .iter()
            .zip(principal)
            .map(|(a, b)| a + sign * c * b)
            .collect();
        let nn = norm2(&x);
        for v in x.iter_mut() {
            *v /= nn;
        }
        if margin(&x) > 1e-8 {
            return Some(x);
        }
        c *= 1.5;
    }
    None
}

fn random_sphere_point(dim: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let nn = norm2(&x);
    for v in x.iter_mut() {
        *v /= nn;
    }
    x
}

/// Projected gradient descent of f over the unit sphere in the real
/// embedding. Returns the local value and minimizer when the run converges
/// to relative decrease <= 1e-10, None when the start is stuck infeasible.
fn descend(
    x0: &[f64],
    rhat: &HermitianMatrix,
    gamma: f64,
    q: &FactorQ,
    eta: f64,
) -> Option<(f64, Vec<f64>)> {
    let eval = |x: &[f64]| ratio_objective(&unembed_vector(x), rhat, gamma, q, eta);
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut f = eval(&x);
    if !f.is_finite() {
        return None;
    }
    for _ in 0..MAX_DESCENT_ITERS {
        // central-difference gradient
        let mut g = vec![0.0; dim];
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += FD_STEP;
            xm[i] -= FD_STEP;
            let (fp, fm) = (eval(&xp), eval(&xm));
            if !fp.is_finite() || !fm.is_finite() {
                return None; // too close to the feasibility boundary
            }
            g[i] = (fp - fm) / (2.0 * FD_STEP);
        }
        // tangential component on the sphere
        let radial = dot(&g, &x);
        for i in 0..dim {
            g[i] -= radial * x[i];
        }
        let gn = norm2(&g);
        if gn <= 1e-14 * (1.0 + f.abs()) {
            return Some((f, x));
        }
        // backtracking line search along the projected direction
        let mut alpha = 1.0 / gn.max(1.0);
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand: Vec<f64> = (0..dim).map(|i| x[i] - alpha * g[i]).collect();
            let cn = norm2(&cand);
            for v in cand.iter_mut() {
                *v /= cn;
            }
            let fc = eval(&cand);
            if fc.is_finite() && fc < f - 1e-4 * alpha * gn * gn {
                let decrease = (f - fc) / f.abs().max(1e-300);
                x = cand;
                f = fc;
                accepted = true;
                if decrease <= DESCENT_TOL {
                    return Some((f, x));
                }
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // no admissible decrease left: declare the point locally optimal
            return Some((f, x));
        }
    }
    Some((f, x))
}

/// Sampled worst case of the factor perturbation: minimum of ‖(Q+Δ)w‖² over
/// `n_samples` random Δ in the Frobenius ball of radius η plus the analytic
/// candidate Δ* = −η Q w wᴴ/(‖Qw‖‖w‖).
pub fn sampled_worst_case(
    w: &[Complex64],
    q: &FactorQ,
    eta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples < 1 {
        return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
    }
    if w.len() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "w has length {} but Q has {} columns",
            w.len(),
            q.n()
        )));
    }
    let qw = q.apply(w);
    let qw_norm: f64 = qw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let w_norm: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut best: f64 = qw.iter().map(|c| c.norm_sqr()).sum();
    if eta == 0.0 {
        return Ok(best);
    }
    // analytic candidate (always on the Frobenius sphere of radius eta)
    if qw_norm > 0.0 && w_norm > 0.0 {
        let margin = qw_norm - eta * w_norm;
        // (Q + Delta*) w = Qw (1 - eta ||w|| / ||Qw||), squared norm margin^2
        best = best.min(margin * margin);
    }
    let (m, n) = (q.m(), q.n());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..n_samples {
        // uniform direction on the complex Frobenius sphere, radius U(0, eta)
        let mut entries: Vec<Complex64> = (0..m * n)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let fro: f64 = entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let radius = eta * rng.gen::<f64>();
        for c in entries.iter_mut() {
            *c *= radius / fro;
        }
        // (Q + Delta) w = Qw + Delta w
        let mut val = 0.0;
        for r in 0..m {
            let mut acc = qw[r];
            for j in 0..n {
                acc += entries[r * n + j] * w[j];
            }
            val += acc.norm_sqr();
        }
        best = best.min(val);
    }
    Ok(best)
}

/// Feasible random direction helper shared by tests: unit vector with
/// positive constraint margin, drawn from the seeded stream.
pub fn feasible_direction(
    q: &FactorQ,
    eta: f64,
    seed: u64,
    max_tries: usize,
) -> Option<Vec<Complex64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let x = random_sphere_point(2 * q.n(), &mut rng);
        let u = unembed_vector(&x);
        let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if q.applied_norm(&u) - eta * norm > 1e-6 {
            return Some(u);
        }
    }
    None
}
