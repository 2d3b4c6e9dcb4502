//! Dense primal-dual interior-point solver for standard-form second-order
//! cone programs:
//!
//! ```text
//!     minimize    cᵀx
//!     subject to  A x = b,   x ∈ K
//! ```
//!
//! where `K` is a product of nonnegative orthants and second-order cones
//! `{(u, z) : u ≥ ‖z‖}`. Path-following with Nesterov-Todd scaling and a
//! Mehrotra predictor-corrector step; dense normal equations with a symmetric
//! indefinite KKT fallback. Sized for desk-scale problems (tens of unknowns).

mod ipm;

pub use ipm::solve_conic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, Mat};

/// One cone block of the product cone K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConeBlock {
    NonNeg { dim: usize },
    SecondOrder { dim: usize },
}

impl ConeBlock {
    pub fn dim(&self) -> usize {
        match *self {
            ConeBlock::NonNeg { dim } => dim,
            ConeBlock::SecondOrder { dim } => dim,
        }
    }
}

/// Ordered cone blocks covering the whole variable vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub blocks: Vec<ConeBlock>,
}

impl ConeSpec {
    pub fn new(blocks: Vec<ConeBlock>) -> Result<Self> {
        for b in &blocks {
            match *b {
                ConeBlock::NonNeg { dim } => {
                    if dim < 1 {
                        return Err(Error::InvalidArgument("NonNeg block needs dim >= 1".into()));
                    }
                }
                ConeBlock::SecondOrder { dim } => {
                    if dim < 2 {
                        return Err(Error::InvalidArgument(
                            "SecondOrder block needs dim >= 2".into(),
                        ));
                    }
                }
            }
        }
        Ok(ConeSpec { blocks })
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    /// Barrier degree: one per nonnegative entry, one per SOC block.
    pub fn degree(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match *b {
                ConeBlock::NonNeg { dim } => dim,
                ConeBlock::SecondOrder { .. } => 1,
            })
            .sum()
    }

    /// Iterate (offset, block) pairs.
    pub fn iter_offsets(&self) -> impl Iterator<Item = (usize, ConeBlock)> + '_ {
        let mut off = 0;
        self.blocks.iter().map(move |&b| {
            let o = off;
            off += b.dim();
            (o, b)
        })
    }

    /// Signed distance-like feasibility margin: smallest slack across blocks
    /// (nonneg entries, or `u - ‖z‖` for SOC). Nonnegative iff x ∈ K.
    pub fn feasibility_margin(&self, x: &[f64]) -> f64 {
        let mut margin = f64::INFINITY;
        for (off, b) in self.iter_offsets() {
            match b {
                ConeBlock::NonNeg { dim } => {
                    for i in 0..dim {
                        margin = margin.min(x[off + i]);
                    }
                }
                ConeBlock::SecondOrder { dim } => {
                    let u = x[off];
                    let z = &x[off + 1..off + dim];
                    margin = margin.min(u - norm2(z));
                }
            }
        }
        margin
    }

    /// Euclidean projection onto K (used by test oracles and infeasibility
    /// checks).
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (off, b) in self.iter_offsets() {
            match b {
                ConeBlock::NonNeg { dim } => {
                    for i in 0..dim {
                        out[off + i] = out[off + i].max(0.0);
                    }
                }
                ConeBlock::SecondOrder { dim } => {
                    let u = x[off];
                    let z = &x[off + 1..off + dim];
                    let zn = norm2(z);
                    if u >= zn {
                        // inside
                    } else if u <= -zn {
                        for i in 0..dim {
                            out[off + i] = 0.0;
                        }
                    } else {
                        let alpha = 0.5 * (u + zn);
                        out[off] = alpha;
                        for i in 1..dim {
                            out[off + i] = x[off + i] * alpha / zn;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Map a rotated-cone point `(u, v, z)` with `2uv ≥ ‖z‖², u, v ≥ 0` to the
/// standard-SOC point `(u + v, √2·z, u − v)`. Membership is preserved:
/// `(u+v)² − (u−v)² = 4uv`, so `‖(√2 z, u−v)‖ ≤ u+v ⇔ 2uv ≥ ‖z‖²`.
pub fn rotated_point_to_soc(u: f64, v: f64, z: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(z.len() + 2);
    out.push(u + v);
    for &zi in z {
        out.push(std::f64::consts::SQRT_2 * zi);
    }
    out.push(u - v);
    out
}

/// Standard-form conic program: minimize cᵀx subject to Ax = b, x ∈ K.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub c: Vec<f64>,
    pub a: Mat,
    pub b: Vec<f64>,
    pub cones: ConeSpec,
}

impl ConicProblem {
    pub fn new(c: Vec<f64>, a: Mat, b: Vec<f64>, cones: ConeSpec) -> Result<Self> {
        let n = cones.total_dim();
        if c.len() != n || a.cols != n {
            return Err(Error::DimensionMismatch(format!(
                "cone dimension {n} does not match c ({}) / A cols ({})",
                c.len(),
                a.cols
            )));
        }
        if a.rows != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has length {}",
                a.rows,
                b.len()
            )));
        }
        Ok(ConicProblem { c, a, b, cones })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// Debug dump for desk inspection; layout is not a stability contract.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = (0..self.a.rows)
            .map(|i| self.a.data[i * self.a.cols..(i + 1) * self.a.cols].to_vec())
            .collect();
        serde_json::json!({
            "c": self.c,
            "A": rows,
            "b": self.b,
            "cones": self.cones.blocks,
        })
    }
}

/// Solver exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    Degenerate,
}

/// Primal-dual answer. On `Optimal` the KKT residuals in `primal_res`,
/// `dual_res`, `gap` are all at or below the requested tolerance. On an
/// infeasibility status, `x` or `y` carries the Farkas-type certificate ray.
#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub status: SolveStatus,
    pub gap: f64,
    pub primal_res: f64,
    pub dual_res: f64,
    pub iterations: usize,
}

impl ConicSolution {
    pub fn objective(&self, p: &ConicProblem) -> f64 {
        crate::linalg::dot(&p.c, &self.x)
    }
}

/// Scaled KKT residuals of a candidate primal-dual pair:
/// `(‖Ax−b‖/(1+‖b‖), ‖Aᵀy+s−c‖/(1+‖c‖), xᵀs/(1+|cᵀx|))`.
pub fn check_kkt(p: &ConicProblem, sol: &ConicSolution) -> Result<(f64, f64, f64)> {
    if sol.x.len() != p.n() || sol.y.len() != p.m() || sol.s.len() != p.n() {
        return Err(Error::DimensionMismatch(
            "solution dimensions do not match problem".into(),
        ));
    }
    let ax = p.a.matvec(&sol.x);
    let rp: Vec<f64> = ax.iter().zip(&p.b).map(|(u, v)| u - v).collect();
    let aty = p.a.tr_matvec(&sol.y);
    let rd: Vec<f64> = (0..p.n()).map(|i| aty[i] + sol.s[i] - p.c[i]).collect();
    let ctx = crate::linalg::dot(&p.c, &sol.x);
    let xts = crate::linalg::dot(&sol.x, &sol.s);
    Ok((
        norm2(&rp) / (1.0 + norm2(&p.b)),
        norm2(&rd) / (1.0 + norm2(&p.c)),
        xts / (1.0 + ctx.abs()),
    ))
}
