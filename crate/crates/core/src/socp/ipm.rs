//! The path-following iteration. One `solve_conic` call is single-threaded
//! and fully deterministic: fixed iteration schedule, no randomized pivoting.

use crate::linalg::{cholesky, cholesky_solve, dot, lu_factor, norm2, Mat};
use crate::socp::{ConeBlock, ConicProblem, ConicSolution, SolveStatus};

/// Fraction-to-boundary factor.
const STEP_FRACTION: f64 = 0.99;
/// Rank tolerance for the presolve full-row-rank check on A.
const RANK_TOL: f64 = 1e-12;
/// Cholesky pivot floor, relative to the largest diagonal entry. A pivot
/// below this signals conditioning beyond ~1e14 and triggers the
/// symmetric-indefinite KKT fallback.
const CHOL_PIVOT_FLOOR: f64 = 1e-14;

pub fn solve_conic(p: &ConicProblem, tol: f64, max_iter: usize) -> ConicSolution {
    assert!(tol > 0.0, "tol must be positive");
    assert!(max_iter >= 1, "max_iter must be >= 1");

    // Row equilibration: scale each equality row to unit 2-norm. This leaves
    // x and the cone geometry untouched, rescales y, and keeps the normal
    // equations well conditioned when the data rows span orders of magnitude.
    let m = p.m();
    let mut d = vec![1.0; m];
    let mut needs_scaling = false;
    for i in 0..m {
        let row_norm = (0..p.n())
            .map(|j| p.a[(i, j)] * p.a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if row_norm > 0.0 && (row_norm < 0.5 || row_norm > 2.0) {
            d[i] = 1.0 / row_norm;
            needs_scaling = true;
        }
    }
    if !needs_scaling {
        return solve_core(p, tol, max_iter);
    }
    let mut a = p.a.clone();
    let mut b = p.b.clone();
    for i in 0..m {
        for j in 0..p.n() {
            a[(i, j)] *= d[i];
        }
        b[i] *= d[i];
    }
    let scaled = ConicProblem::new(p.c.clone(), a, b, p.cones.clone())
        .expect("scaling preserves problem validity");
    let mut sol = solve_core(&scaled, tol, max_iter);
    for i in 0..m {
        sol.y[i] *= d[i];
    }
    sol
}

fn solve_core(p: &ConicProblem, tol: f64, max_iter: usize) -> ConicSolution {
    let n = p.n();
    let m = p.m();

    if m > 0 && p.a.rank(RANK_TOL) < m {
        return ConicSolution {
            x: vec![0.0; n],
            y: vec![0.0; m],
            s: vec![0.0; n],
            status: SolveStatus::Degenerate,
            gap: f64::INFINITY,
            primal_res: f64::INFINITY,
            dual_res: f64::INFINITY,
            iterations: 0,
        };
    }

    let nu = p.cones.degree() as f64;
    let e = central_ray(p);
    let norm_b = norm2(&p.b);
    let norm_c = norm2(&p.c);

    // big-M-free start: central ray scaled by the problem norms
    let tau_x = (1.0 + norm_b).sqrt();
    let tau_s = (1.0 + norm_c).sqrt();
    let mut x: Vec<f64> = e.iter().map(|v| v * tau_x).collect();
    let mut s: Vec<f64> = e.iter().map(|v| v * tau_s).collect();
    let mut y = vec![0.0; m];

    let mut status = SolveStatus::MaxIter;
    let mut iterations = max_iter;
    let (mut rel_p, mut rel_d, mut rel_g) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);

    // best iterate seen, by the worst of the three scaled KKT measures;
    // returned instead of the last iterate if the tail of the run degrades
    let mut best_metric = f64::INFINITY;
    let mut best: Option<(Vec<f64>, Vec<f64>, Vec<f64>, f64, f64, f64)> = None;

    for iter in 0..max_iter {
        // residuals
        let ax = p.a.matvec(&x);
        let rp: Vec<f64> = ax.iter().zip(&p.b).map(|(u, v)| u - v).collect();
        let aty = p.a.tr_matvec(&y);
        let rd: Vec<f64> = (0..n).map(|i| aty[i] + s[i] - p.c[i]).collect();
        let ctx = dot(&p.c, &x);
        let xts = dot(&x, &s);
        rel_p = norm2(&rp) / (1.0 + norm_b);
        rel_d = norm2(&rd) / (1.0 + norm_c);
        rel_g = xts / (1.0 + ctx.abs());

        if rel_p <= tol && rel_d <= tol && rel_g <= tol {
            status = SolveStatus::Optimal;
            iterations = iter;
            best = None;
            break;
        }
        let metric = rel_p.max(rel_d).max(rel_g);
        if metric < best_metric {
            best_metric = metric;
            best = Some((x.clone(), y.clone(), s.clone(), rel_p, rel_d, rel_g));
        }

        // infeasibility certificates
        let bty = dot(&p.b, &y);
        if bty > tol.max(1e-12) {
            // primal infeasible if -A'y is (approximately) in the dual cone
            let q: Vec<f64> = aty.iter().map(|v| -v).collect();
            let proj = p.cones.project(&q);
            let dist = q
                .iter()
                .zip(&proj)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist <= tol * bty {
                let scale = 1.0 / bty;
                let ray_y: Vec<f64> = y.iter().map(|v| v * scale).collect();
                let ray_s: Vec<f64> = proj.iter().map(|v| v * scale).collect();
                status = SolveStatus::PrimalInfeasible;
                iterations = iter;
                return ConicSolution {
                    x: vec![0.0; n],
                    y: ray_y,
                    s: ray_s,
                    status,
                    gap: rel_g,
                    primal_res: rel_p,
                    dual_res: rel_d,
                    iterations,
                };
            }
        }
        if -ctx > tol.max(1e-12) {
            let axn = norm2(&ax);
            let margin = p.cones.feasibility_margin(&x);
            if axn <= tol * (-ctx) && margin >= -tol * norm2(&x) {
                let scale = -1.0 / ctx;
                let ray_x: Vec<f64> = x.iter().map(|v| v * scale).collect();
                status = SolveStatus::DualInfeasible;
                iterations = iter;
                return ConicSolution {
                    x: ray_x,
                    y: vec![0.0; m],
                    s: vec![0.0; n],
                    status,
                    gap: rel_g,
                    primal_res: rel_p,
                    dual_res: rel_d,
                    iterations,
                };
            }
        }

        let mu = xts / nu;

        // Nesterov-Todd scaling
        let scaling = match Scaling::compute(p, &x, &s) {
            Some(sc) => sc,
            None => {
                iterations = iter;
                break; // iterate left the interior; report best effort
            }
        };
        // late-stage iterations switch to the augmented KKT form, whose
        // conditioning degrades like 1/mu rather than 1/mu^2
        let prefer_augmented = rel_g <= 1e-4;
        let kkt = match KktSolver::build(p, &scaling, prefer_augmented) {
            Some(k) => k,
            None => {
                iterations = iter;
                break;
            }
        };

        // predictor (affine scaling direction)
        let lam_sq = scaling.jordan_square_lambda(p);
        let d_aff: Vec<f64> = lam_sq.iter().map(|v| -v).collect();
        let (dx_a, _dy_a, ds_a) = kkt.solve(p, &scaling, &rp, &rd, &d_aff);
        let alpha_x_aff = max_step(p, &x, &dx_a);
        let alpha_s_aff = max_step(p, &s, &ds_a);
        let alpha_aff = alpha_x_aff.min(alpha_s_aff).min(1.0);
        let gap_aff: f64 = (0..n)
            .map(|i| (x[i] + alpha_aff * dx_a[i]) * (s[i] + alpha_aff * ds_a[i]))
            .sum();
        let sigma = ((gap_aff / xts).max(0.0)).powi(3).clamp(0.0, 1.0);

        // corrector with Mehrotra second-order term
        let wdx = scaling.apply_w(p, &dx_a);
        let winv_ds = scaling.apply_w_inv(p, &ds_a);
        let second_order = jordan_product(p, &wdx, &winv_ds);
        let mut d_cor = vec![0.0; n];
        for (off, blk) in p.cones.iter_offsets() {
            match blk {
                ConeBlock::NonNeg { dim } => {
                    for i in off..off + dim {
                        d_cor[i] = -lam_sq[i] + sigma * mu - second_order[i];
                    }
                }
                ConeBlock::SecondOrder { dim } => {
                    d_cor[off] = -lam_sq[off] + sigma * mu - second_order[off];
                    for i in off + 1..off + dim {
                        d_cor[i] = -lam_sq[i] - second_order[i];
                    }
                }
            }
        }
        let (dx, dy, ds) = kkt.solve(p, &scaling, &rp, &rd, &d_cor);

        let alpha_x = max_step(p, &x, &dx);
        let alpha_s = max_step(p, &s, &ds);
        let alpha = (STEP_FRACTION * alpha_x.min(alpha_s)).min(1.0);

        if std::env::var("IPM_DEBUG").is_ok() {
            eprintln!("it {iter}: rp {rel_p:.2e} rd {rel_d:.2e} g {rel_g:.2e} mu {mu:.2e} sigma {sigma:.2e} a_aff {alpha_aff:.3} a {alpha:.4}");
        }
        for i in 0..n {
            x[i] += alpha * dx[i];
            s[i] += alpha * ds[i];
        }
        for j in 0..m {
            y[j] += alpha * dy[j];
        }
    }

    if status == SolveStatus::MaxIter {
        if let Some((bx, by, bs, bp, bd, bg)) = best {
            if best_metric < rel_p.max(rel_d).max(rel_g) {
                x = bx;
                y = by;
                s = bs;
                rel_p = bp;
                rel_d = bd;
                rel_g = bg;
            }
        }
        if rel_p <= tol && rel_d <= tol && rel_g <= tol {
            status = SolveStatus::Optimal;
        }
    }

    ConicSolution {
        x,
        y,
        s,
        status,
        gap: rel_g,
        primal_res: rel_p,
        dual_res: rel_d,
        iterations,
    }
}

fn central_ray(p: &ConicProblem) -> Vec<f64> {
    let mut e = vec![0.0; p.n()];
    for (off, blk) in p.cones.iter_offsets() {
        match blk {
            ConeBlock::NonNeg { dim } => {
                for i in off..off + dim {
                    e[i] = 1.0;
                }
            }
            ConeBlock::SecondOrder { .. } => e[off] = 1.0,
        }
    }
    e
}

/// Largest alpha in (0, inf] with x + alpha*dx remaining in the cone.
fn max_step(p: &ConicProblem, x: &[f64], dx: &[f64]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (off, blk) in p.cones.iter_offsets() {
        match blk {
            ConeBlock::NonNeg { dim } => {
                for i in off..off + dim {
                    if dx[i] < 0.0 {
                        alpha = alpha.min(-x[i] / dx[i]);
                    }
                }
            }
            ConeBlock::SecondOrder { dim } => {
                let (x0, z) = (x[off], &x[off + 1..off + dim]);
                let (d0, dz) = (dx[off], &dx[off + 1..off + dim]);
                // boundary: (x0 + a d0)^2 = ||z + a dz||^2
                let qa = d0 * d0 - dot(dz, dz);
                let qb = 2.0 * (x0 * d0 - dot(z, dz));
                let qc = x0 * x0 - dot(z, z); // > 0 in the interior
                let mut best = f64::INFINITY;
                if qa.abs() < 1e-300 {
                    if qb < 0.0 {
                        best = -qc / qb;
                    }
                } else {
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc >= 0.0 {
                        let sq = disc.sqrt();
                        for r in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                            if r > 0.0 && x0 + r * d0 >= 0.0 {
                                best = best.min(r);
                            }
                        }
                    }
                }
                alpha = alpha.min(best);
            }
        }
    }
    alpha.max(0.0)
}

/// u ∘ v, blockwise Jordan product.
fn jordan_product(p: &ConicProblem, u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.n()];
    for (off, blk) in p.cones.iter_offsets() {
        match blk {
            ConeBlock::NonNeg { dim } => {
                for i in off..off + dim {
                    out[i] = u[i] * v[i];
                }
            }
            ConeBlock::SecondOrder { dim } => {
                let (u0, uz) = (u[off], &u[off + 1..off + dim]);
                let (v0, vz) = (v[off], &v[off + 1..off + dim]);
                out[off] = u0 * v0 + dot(uz, vz);
                for i in 1..dim {
                    out[off + i] = u0 * v[off + i] + v0 * u[off + i];
                }
            }
        }
    }
    out
}

/// Per-block NT scaling data: the symmetric W with λ = Wx = W⁻¹s.
enum BlockScaling {
    NonNeg { w: Vec<f64> },
    Soc { eta: f64, u: Vec<f64> },
}

struct Scaling {
    blocks: Vec<BlockScaling>,
    lambda: Vec<f64>,
}

impl Scaling {
    fn compute(p: &ConicProblem, x: &[f64], s: &[f64]) -> Option<Scaling> {
        let mut blocks = Vec::with_capacity(p.cones.blocks.len());
        let mut lambda = vec![0.0; p.n()];
        for (off, blk) in p.cones.iter_offsets() {
            match blk {
                ConeBlock::NonNeg { dim } => {
                    let mut w = vec![0.0; dim];
                    for i in 0..dim {
                        if x[off + i] <= 0.0 || s[off + i] <= 0.0 {
                            return None;
                        }
                        w[i] = (s[off + i] / x[off + i]).sqrt();
                        lambda[off + i] = (x[off + i] * s[off + i]).sqrt();
                    }
                    blocks.push(BlockScaling::NonNeg { w });
                }
                ConeBlock::SecondOrder { dim } => {
                    let xb = &x[off..off + dim];
                    let sb = &s[off..off + dim];
                    let jx = jnorm_sq(xb);
                    let js = jnorm_sq(sb);
                    if jx <= 0.0 || js <= 0.0 || xb[0] <= 0.0 || sb[0] <= 0.0 {
                        return None;
                    }
                    let res_x = jx.sqrt();
                    let res_s = js.sqrt();
                    let xbar: Vec<f64> = xb.iter().map(|v| v / res_x).collect();
                    let sbar: Vec<f64> = sb.iter().map(|v| v / res_s).collect();
                    let gamma = ((1.0 + dot(&xbar, &sbar)) * 0.5).sqrt();
                    // wbar = (sbar + J xbar) / (2 gamma), a unit hyperbolic
                    // vector with T_wbar xbar = sbar
                    let mut wbar = vec![0.0; dim];
                    wbar[0] = (sbar[0] + xbar[0]) / (2.0 * gamma);
                    for i in 1..dim {
                        wbar[i] = (sbar[i] - xbar[i]) / (2.0 * gamma);
                    }
                    // u = (wbar + e) / sqrt(2 (1 + wbar0)); then
                    // (2uu' - J)^2 = 2 wbar wbar' - J, giving W = eta (2uu'-J)
                    let denom = (2.0 * (1.0 + wbar[0])).sqrt();
                    let mut u = wbar.clone();
                    u[0] += 1.0;
                    for v in u.iter_mut() {
                        *v /= denom;
                    }
                    let eta = (res_s / res_x).sqrt();
                    let sc = BlockScaling::Soc { eta, u };
                    let lam = apply_soc_w(&sc, xb, false);
                    lambda[off..off + dim].copy_from_slice(&lam);
                    blocks.push(sc);
                }
            }
        }
        Some(Scaling { blocks, lambda })
    }

    fn apply_w(&self, p: &ConicProblem, v: &[f64]) -> Vec<f64> {
        self.apply(p, v, false)
    }

    fn apply_w_inv(&self, p: &ConicProblem, v: &[f64]) -> Vec<f64> {
        self.apply(p, v, true)
    }

    fn apply(&self, p: &ConicProblem, v: &[f64], inverse: bool) -> Vec<f64> {
        let mut out = vec![0.0; p.n()];
        for ((off, blk), sc) in p.cones.iter_offsets().zip(&self.blocks) {
            match (blk, sc) {
                (ConeBlock::NonNeg { dim }, BlockScaling::NonNeg { w }) => {
                    for i in 0..dim {
                        out[off + i] = if inverse {
                            v[off + i] / w[i]
                        } else {
                            v[off + i] * w[i]
                        };
                    }
                }
                (ConeBlock::SecondOrder { dim }, sc @ BlockScaling::Soc { .. }) => {
                    let res = apply_soc_w(sc, &v[off..off + dim], inverse);
                    out[off..off + dim].copy_from_slice(&res);
                }
                _ => unreachable!("cone/scaling blocks out of sync"),
            }
        }
        out
    }

    /// λ ∘ λ.
    fn jordan_square_lambda(&self, p: &ConicProblem) -> Vec<f64> {
        jordan_product(p, &self.lambda, &self.lambda)
    }

    /// Solve Arw(λ) z = r blockwise.
    fn arrow_solve(&self, p: &ConicProblem, r: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; p.n()];
        for (off, blk) in p.cones.iter_offsets() {
            match blk {
                ConeBlock::NonNeg { dim } => {
                    for i in off..off + dim {
                        z[i] = r[i] / self.lambda[i];
                    }
                }
                ConeBlock::SecondOrder { dim } => {
                    let l0 = self.lambda[off];
                    let lz = &self.lambda[off + 1..off + dim];
                    let r0 = r[off];
                    let rz = &r[off + 1..off + dim];
                    let det = l0 * l0 - dot(lz, lz);
                    let z0 = (l0 * r0 - dot(lz, rz)) / det;
                    z[off] = z0;
                    for i in 1..dim {
                        z[off + i] = (rz[i - 1] - z0 * lz[i - 1]) / l0;
                    }
                }
            }
        }
        z
    }
}

fn jnorm_sq(v: &[f64]) -> f64 {
    v[0] * v[0] - dot(&v[1..], &v[1..])
}

/// Apply W = eta (2uu' - J) or its inverse W⁻¹ = eta⁻¹ (2(Ju)(Ju)' - J).
fn apply_soc_w(sc: &BlockScaling, v: &[f64], inverse: bool) -> Vec<f64> {
    let (eta, u) = match sc {
        BlockScaling::Soc { eta, u } => (*eta, u),
        _ => unreachable!(),
    };
    let dim = v.len();
    let mut uv = u.clone();
    let factor;
    if inverse {
        // Ju
        for x in uv.iter_mut().skip(1) {
            *x = -*x;
        }
        factor = 1.0 / eta;
    } else {
        factor = eta;
    }
    let uvt_v = dot(&uv, v);
    let mut out = vec![0.0; dim];
    out[0] = factor * (2.0 * uv[0] * uvt_v - v[0]);
    for i in 1..dim {
        out[i] = factor * (2.0 * uv[i] * uvt_v + v[i]);
    }
    out
}

/// Factorized Newton system. Primary path: Cholesky of the normal matrix
/// A H⁻¹ Aᵀ with H = W². Fallback when ill-conditioned: LU of the full
/// symmetric indefinite KKT matrix [[H, Aᵀ], [A, 0]].
enum KktSolver {
    Normal { chol: Mat },
    Augmented { lu: crate::linalg::Lu },
}

impl KktSolver {
    fn build(p: &ConicProblem, sc: &Scaling, prefer_augmented: bool) -> Option<KktSolver> {
        let m = p.m();
        let n = p.n();
        if m == 0 {
            // no equalities; dx comes straight from H
            return Some(KktSolver::Normal {
                chol: Mat::zeros(0, 0),
            });
        }
        if !prefer_augmented {
            // normal matrix A H^{-1} A'
            let mut normal = Mat::zeros(m, m);
            let mut hinv_at = Vec::with_capacity(m); // columns H^{-1} a_j
            for j in 0..m {
                let row_j: Vec<f64> = (0..n).map(|i| p.a[(j, i)]).collect();
                let hv = sc.apply_w_inv(p, &sc.apply_w_inv(p, &row_j));
                hinv_at.push(hv);
            }
            for i in 0..m {
                let row_i: Vec<f64> = (0..n).map(|k| p.a[(i, k)]).collect();
                for j in 0..m {
                    normal[(i, j)] = dot(&row_i, &hinv_at[j]);
                }
            }
            if let Some(chol) = cholesky(&normal, CHOL_PIVOT_FLOOR) {
                return Some(KktSolver::Normal { chol });
            }
        }
        // augmented KKT path: roughly the square root of the normal
        // equations' condition number, at the cost of an (n+m) LU
        let mut kkt = Mat::zeros(n + m, n + m);
        let h = build_h_dense(p, sc);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = h[(i, j)];
            }
        }
        for r in 0..m {
            for i in 0..n {
                kkt[(n + r, i)] = p.a[(r, i)];
                kkt[(i, n + r)] = p.a[(r, i)];
            }
        }
        lu_factor(&kkt).map(|lu| KktSolver::Augmented { lu })
    }

    /// Solve the Newton system
    ///   A dx = -rp,  Aᵀ dy + ds = -rd,  λ∘(W dx + W⁻¹ ds) = d,
    /// with iterative refinement to keep the directions accurate when the
    /// scaled system is ill-conditioned near the cone boundary.
    fn solve(
        &self,
        p: &ConicProblem,
        sc: &Scaling,
        rp: &[f64],
        rd: &[f64],
        d: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = p.n();
        let m = p.m();
        let (mut dx, mut dy, mut ds) = self.solve_once(p, sc, rp, rd, d);
        let mut prev_err = f64::INFINITY;
        for _ in 0..4 {
            let a_dx = p.a.matvec(&dx);
            let e1: Vec<f64> = (0..m).map(|j| -rp[j] - a_dx[j]).collect();
            let at_dy = p.a.tr_matvec(&dy);
            let e2: Vec<f64> = (0..n).map(|i| -rd[i] - at_dy[i] - ds[i]).collect();
            let wdx = sc.apply_w(p, &dx);
            let winv_ds = sc.apply_w_inv(p, &ds);
            let sum: Vec<f64> = (0..n).map(|i| wdx[i] + winv_ds[i]).collect();
            let lam_term = jordan_product(p, &sc.lambda, &sum);
            let e3: Vec<f64> = (0..n).map(|i| d[i] - lam_term[i]).collect();
            let err = norm2(&e1).max(norm2(&e2)).max(norm2(&e3));
            if err <= 1e-14 * (1.0 + norm2(rp).max(norm2(rd)).max(norm2(d)))
                || err >= 0.5 * prev_err
            {
                break;
            }
            prev_err = err;
            let neg_e1: Vec<f64> = e1.iter().map(|v| -v).collect();
            let neg_e2: Vec<f64> = e2.iter().map(|v| -v).collect();
            let (cx, cy, cs) = self.solve_once(p, sc, &neg_e1, &neg_e2, &e3);
            for i in 0..n {
                dx[i] += cx[i];
                ds[i] += cs[i];
            }
            for j in 0..m {
                dy[j] += cy[j];
            }
        }
        (dx, dy, ds)
    }

    fn solve_once(
        &self,
        p: &ConicProblem,
        sc: &Scaling,
        rp: &[f64],
        rd: &[f64],
        d: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = p.n();
        let m = p.m();
        let v = sc.arrow_solve(p, d);
        let wv = sc.apply_w(p, &v);
        // g = W v + rd
        let g: Vec<f64> = (0..n).map(|i| wv[i] + rd[i]).collect();
        match self {
            KktSolver::Normal { chol } => {
                let dy = if m > 0 {
                    let hinv_g = sc.apply_w_inv(p, &sc.apply_w_inv(p, &g));
                    let a_hinv_g = p.a.matvec(&hinv_g);
                    let rhs: Vec<f64> = (0..m).map(|j| -rp[j] - a_hinv_g[j]).collect();
                    cholesky_solve(chol, &rhs)
                } else {
                    Vec::new()
                };
                let at_dy = p.a.tr_matvec(&dy);
                let pre: Vec<f64> = (0..n).map(|i| at_dy[i] + g[i]).collect();
                let dx = sc.apply_w_inv(p, &sc.apply_w_inv(p, &pre));
                let ds: Vec<f64> = (0..n).map(|i| -rd[i] - at_dy[i]).collect();
                (dx, dy, ds)
            }
            KktSolver::Augmented { lu } => {
                // [[H, A'], [A, 0]] [dx; dy] = [g; -rp]
                let mut rhs = vec![0.0; n + m];
                rhs[..n].copy_from_slice(&g);
                for j in 0..m {
                    rhs[n + j] = -rp[j];
                }
                let sol = lu.solve(&rhs);
                let dx = sol[..n].to_vec();
                // sign: H dx - A' dy_aug = g with our stacking uses +A';
                // recover dy with the convention A'dy + ds = -rd
                let dy: Vec<f64> = sol[n..].iter().map(|v| -v).collect();
                let at_dy = p.a.tr_matvec(&dy);
                let ds: Vec<f64> = (0..n).map(|i| -rd[i] - at_dy[i]).collect();
                (dx, dy, ds)
            }
        }
    }
}

fn build_h_dense(p: &ConicProblem, sc: &Scaling) -> Mat {
    let n = p.n();
    let mut h = Mat::zeros(n, n);
    for j in 0..n {
        let mut ej = vec![0.0; n];
        ej[j] = 1.0;
        let col = sc.apply_w(p, &sc.apply_w(p, &ej));
        for i in 0..n {
            h[(i, j)] = col[i];
        }
    }
    h
}
