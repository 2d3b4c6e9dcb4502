//! Dense complex Hermitian linear algebra and the complex-to-real embedding
//! used by the conic subproblem builders.
//!
//! Eigendecomposition is a cyclic complex Jacobi iteration: at N ≤ 64 the
//! O(N³)-per-sweep cost is irrelevant and the method is deterministic, which
//! keeps everything downstream bit-reproducible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// PSD clamp: eigenvalues above `-1e-10 * lambda_max` are treated as zero.
pub const PSD_CLAMP_REL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// y = Aᴴ x.
    pub fn herm_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![Complex64::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (yj, aij) in y.iter_mut().zip(row) {
                *yj += aij.conj() * xi;
            }
        }
        y
    }

    pub fn herm_transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// N×N complex Hermitian matrix. Symmetrized as `(M + Mᴴ)/2` on construction
/// so floating-point asymmetry is killed once, upstream of all consumers.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMat,
}

impl HermitianMatrix {
    /// Validates Hermitian symmetry within [`HERMITIAN_TOL`] relative
    /// Frobenius, then symmetrizes.
    pub fn new(m: CMat) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch(format!(
                "hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let mh = m.herm_transpose();
        let asym = m.sub(&mh).frobenius_norm();
        let scale = m.frobenius_norm().max(1e-300);
        let rel = 0.5 * asym / scale;
        if rel > HERMITIAN_TOL && asym > 1e-300 {
            return Err(Error::NotHermitian(rel));
        }
        let sym = m.add(&mh).scale(Complex64::new(0.5, 0.0));
        Ok(HermitianMatrix { m: sym })
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix { m: CMat::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix { m: CMat::identity(n) }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(d[i], 0.0);
        }
        HermitianMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.rows
    }

    pub fn as_cmat(&self) -> &CMat {
        &self.m
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.m.matvec(x)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    /// wᴴ M w; real because M is Hermitian.
    pub fn quadratic_form(&self, w: &[Complex64]) -> f64 {
        let mw = self.matvec(w);
        w.iter().zip(&mw).map(|(wi, mi)| (wi.conj() * mi).re).sum()
    }

    /// M + c·I.
    pub fn add_scaled_identity(&self, c: f64) -> HermitianMatrix {
        let mut m = self.m.clone();
        for i in 0..m.rows {
            m[(i, i)] += Complex64::new(c, 0.0);
        }
        HermitianMatrix { m }
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: self.m.add(&other.m) }
    }

    pub fn scale(&self, c: f64) -> HermitianMatrix {
        HermitianMatrix { m: self.m.scale(Complex64::new(c, 0.0)) }
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues sorted descending and the matching unitary eigenvector
/// columns. Eigenvector phases are fixed (largest-modulus entry made real
/// positive) so the decomposition is deterministic.
pub fn eig_hermitian(m: &HermitianMatrix) -> (Vec<f64>, CMat) {
    let n = m.dim();
    let mut a = m.as_cmat().clone();
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 || n == 1 {
        let evals = (0..n).map(|i| a[(i, i)].re).collect();
        return sort_eig(evals, v);
    }
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let bmod = apq.norm();
                if bmod <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase that makes the off-diagonal entry real positive
                let phase = apq / bmod;
                // real Jacobi rotation on [[app, bmod], [bmod, aqq]]
                let tau = (aqq - app) / (2.0 * bmod);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // 2x2 unitary U = [[c, s*phase], [-s*conj(phase)... ]] acting
                // on columns (p, q); chosen so that (Uᴴ A U)[p][q] = 0.
                let upp = Complex64::new(c, 0.0);
                let upq = phase * s;
                let uqp = -Complex64::new(s, 0.0) * phase.conj();
                let uqq = Complex64::new(c, 0.0);
                // column update A <- A U
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * upp + aiq * uqp;
                    a[(i, q)] = aip * upq + aiq * uqq;
                }
                // row update A <- Uᴴ A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = upp.conj() * apj + uqp.conj() * aqj;
                    a[(q, j)] = upq.conj() * apj + uqq.conj() * aqj;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // accumulate V <- V U
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * upp + viq * uqp;
                    v[(i, q)] = vip * upq + viq * uqq;
                }
            }
        }
    }
    let evals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    sort_eig(evals, v)
}

fn sort_eig(evals: Vec<f64>, v: CMat) -> (Vec<f64>, CMat) {
    let n = evals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| evals[j].partial_cmp(&evals[i]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut vs = CMat::zeros(n, n);
    for (newc, &oldc) in order.iter().enumerate() {
        // phase convention: largest-modulus entry real positive
        let mut best = 0;
        let mut best_mod = 0.0;
        for i in 0..n {
            let m = v[(i, oldc)].norm();
            if m > best_mod + 1e-15 {
                best_mod = m;
                best = i;
            }
        }
        let pivot = v[(best, oldc)];
        let phase = if pivot.norm() > 1e-300 {
            pivot.conj() / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            vs[(i, newc)] = v[(i, oldc)] * phase;
        }
    }
    (sorted, vs)
}

/// Hermitian PSD square root via eigendecomposition. Eigenvalues in
/// `[-1e-10*lambda_max, 0)` are clamped to zero; anything lower is rejected.
pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    psd_power(m, 0.5)
}

/// (M)^p for PSD M with real p (used for M^{1/2} and M^{-1/2}).
pub fn psd_power(m: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let n = m.dim();
    let (evals, v) = eig_hermitian(m);
    let lmax = evals.first().copied().unwrap_or(0.0).max(0.0);
    let clamp = -PSD_CLAMP_REL * lmax;
    let mut powered = vec![0.0; n];
    for (i, &l) in evals.iter().enumerate() {
        if l < clamp {
            return Err(Error::NotPsd { lambda: l });
        }
        let lc = l.max(0.0);
        powered[i] = if lc == 0.0 {
            if p < 0.0 {
                return Err(Error::NotPsd { lambda: 0.0 });
            }
            0.0
        } else {
            lc.powf(p)
        };
    }
    // S = V diag(powered) Vᴴ
    let mut s = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += v[(i, k)] * powered[k] * v[(j, k)].conj();
            }
            s[(i, j)] = acc;
        }
    }
    HermitianMatrix::new(s)
}

/// Real embedding of a complex triple: w ∈ Cᴺ ↦ x = [Re w; Im w] ∈ R²ᴺ,
/// Hermitian B ↦ B̃ = [[Re B, −Im B], [Im B, Re B]], and likewise for a
/// rectangular factor Q. Identities: xᵀB̃x = wᴴBw and ‖Q̃x‖ = ‖Qw‖.
#[derive(Debug, Clone)]
pub struct RealEmbedding {
    pub x: Vec<f64>,
    pub b_tilde: Mat,
    pub q_tilde: Mat,
}

pub fn embed_vector(w: &[Complex64]) -> Vec<f64> {
    let n = w.len();
    let mut x = vec![0.0; 2 * n];
    for (i, wi) in w.iter().enumerate() {
        x[i] = wi.re;
        x[n + i] = wi.im;
    }
    x
}

pub fn unembed_vector(x: &[f64]) -> Vec<Complex64> {
    assert!(x.len() % 2 == 0);
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

pub fn embed_matrix(q: &CMat) -> Mat {
    let (m, n) = (q.rows, q.cols);
    let mut out = Mat::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let v = q[(i, j)];
            out[(i, j)] = v.re;
            out[(i, n + j)] = -v.im;
            out[(m + i, j)] = v.im;
            out[(m + i, n + j)] = v.re;
        }
    }
    out
}

pub fn real_embed(b: &HermitianMatrix, q: &CMat, a: &[Complex64]) -> Result<RealEmbedding> {
    if q.cols != b.dim() || a.len() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "real_embed: B is {n}x{n}, Q has {qc} cols, a has length {al}",
            n = b.dim(),
            qc = q.cols,
            al = a.len()
        )));
    }
    Ok(RealEmbedding {
        x: embed_vector(a),
        b_tilde: embed_matrix(b.as_cmat()),
        q_tilde: embed_matrix(q),
    })
}

/// JSON form of a complex matrix: separate real and imaginary 2-d arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        let re = (0..m.rows)
            .map(|i| (0..m.cols).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..m.rows)
            .map(|i| (0..m.cols).map(|j| m[(i, j)].im).collect())
            .collect();
        ComplexMatrixJson { re, im }
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        let rows = self.re.len();
        if rows == 0 || self.im.len() != rows {
            return Err(Error::DimensionMismatch(
                "re/im arrays must be nonempty with equal shape".into(),
            ));
        }
        let cols = self.re[0].len();
        for r in self.re.iter().chain(self.im.iter()) {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged re/im arrays".into()));
            }
        }
        Ok(CMat::from_fn(rows, cols, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let h = m.add(&m.herm_transpose()).scale(Complex64::new(0.5, 0.0));
        HermitianMatrix::new(h).unwrap()
    }

    fn random_psd(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        HermitianMatrix::new(a.matmul(&a.herm_transpose())).unwrap()
    }

    fn random_unitary(n: usize, seed: u64) -> CMat {
        // eigenvectors of a random Hermitian matrix are unitary
        let (_, v) = eig_hermitian(&random_hermitian(n, seed));
        v
    }

    #[test]
    fn eig_identity() {
        let (evals, v) = eig_hermitian(&HermitianMatrix::identity(3));
        for e in &evals {
            assert!((e - 1.0).abs() < 1e-14);
        }
        // columns orthonormal
        let vh_v = v.herm_transpose().matmul(&v);
        assert!(vh_v.sub(&CMat::identity(3)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn eig_diagonal() {
        let m = HermitianMatrix::from_diagonal(&[5.0, 2.0, -1.0]);
        let (evals, _) = eig_hermitian(&m);
        assert!((evals[0] - 5.0).abs() < 1e-14);
        assert!((evals[1] - 2.0).abs() < 1e-14);
        assert!((evals[2] + 1.0).abs() < 1e-14);
    }

    /// Independent oracle: real roots of the characteristic polynomial,
    /// coefficients via Faddeev–LeVerrier, roots by sign-change bisection.
    fn charpoly_roots(m: &HermitianMatrix) -> Vec<f64> {
        let n = m.dim();
        // Faddeev–LeVerrier: M_1 = A, c_1 = -tr(M_1);
        // M_k = A (M_{k-1} + c_{k-1} I), c_k = -tr(M_k)/k.
        let a = m.as_cmat().clone();
        let mut coeffs = vec![1.0]; // p(x) = x^n + c_1 x^{n-1} + ... + c_n
        let mut mk = a.clone();
        for k in 1..=n {
            let ck = -(0..n).map(|i| mk[(i, i)].re).sum::<f64>() / k as f64;
            coeffs.push(ck);
            if k < n {
                let mut shifted = mk.clone();
                for i in 0..n {
                    shifted[(i, i)] += Complex64::new(ck, 0.0);
                }
                mk = a.matmul(&shifted);
            }
        }
        let eval = |x: f64| -> f64 {
            let mut v = 0.0;
            for c in &coeffs {
                v = v * x + c;
            }
            v
        };
        // all eigenvalues lie in [-r, r], r = Frobenius norm
        let r = m.frobenius_norm() + 1.0;
        let grid = 200_000;
        let mut roots = Vec::new();
        let mut prev_x = -r;
        let mut prev_f = eval(prev_x);
        for i in 1..=grid {
            let x = -r + 2.0 * r * (i as f64) / (grid as f64);
            let f = eval(x);
            if prev_f == 0.0 {
                roots.push(prev_x);
            } else if prev_f * f < 0.0 {
                // bisection
                let (mut lo, mut hi, mut flo) = (prev_x, x, prev_f);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let fm = eval(mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev_f = f;
        }
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots
    }

    #[test]
    fn eig_matches_charpoly_oracle() {
        let m = random_hermitian(4, 42);
        let (evals, v) = eig_hermitian(&m);
        let roots = charpoly_roots(&m);
        assert_eq!(roots.len(), 4, "oracle found {} roots", roots.len());
        for (e, r) in evals.iter().zip(&roots) {
            assert!((e - r).abs() < 1e-8, "eig {e} vs charpoly root {r}");
        }
        // residual check M v = lambda v
        let scale = m.frobenius_norm();
        for k in 0..4 {
            let col: Vec<Complex64> = (0..4).map(|i| v[(i, k)]).collect();
            let mv = m.matvec(&col);
            for i in 0..4 {
                assert!((mv[i] - evals[k] * col[i]).norm() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn eig_invariant_under_unitary_similarity() {
        for seed in 0..5u64 {
            let m = random_hermitian(6, 100 + seed);
            let u = random_unitary(6, 200 + seed);
            let rotated =
                HermitianMatrix::new(u.herm_transpose().matmul(m.as_cmat()).matmul(&u)).unwrap();
            let (e1, _) = eig_hermitian(&m);
            let (e2, _) = eig_hermitian(&rotated);
            for (a, b) in e1.iter().zip(&e2) {
                assert!((a - b).abs() < 1e-9 * m.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn sqrt_identity_and_diagonal() {
        let s = psd_sqrt(&HermitianMatrix::identity(4)).unwrap();
        assert!(s.as_cmat().sub(&CMat::identity(4)).frobenius_norm() < 1e-12);
        let s = psd_sqrt(&HermitianMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((s.as_cmat()[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!((s.as_cmat()[(1, 1)].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_reconstructs_random_psd() {
        for seed in 0..100u64 {
            let n = 2 + (seed % 15) as usize; // N <= 16
            let m = random_psd(n, 1000 + seed);
            let s = psd_sqrt(&m).unwrap();
            let ss = s.as_cmat().matmul(s.as_cmat());
            let err = ss.sub(m.as_cmat()).frobenius_norm() / m.frobenius_norm().max(1e-300);
            assert!(err <= 1e-9, "seed {seed}: relative error {err}");
        }
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = HermitianMatrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMat::identity(3);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn embed_real_symmetric_block_structure() {
        let b = HermitianMatrix::from_diagonal(&[1.0, 2.0]);
        let bt = embed_matrix(b.as_cmat());
        assert_eq!(bt[(0, 0)], 1.0);
        assert_eq!(bt[(2, 2)], 1.0);
        assert_eq!(bt[(1, 1)], 2.0);
        assert_eq!(bt[(3, 3)], 2.0);
        assert_eq!(bt[(0, 2)], 0.0);
    }

    #[test]
    fn embed_preserves_norm_of_imaginary_vector() {
        let w = vec![Complex64::new(0.0, 1.0)];
        let b = HermitianMatrix::identity(1);
        let x = embed_vector(&w);
        let bt = embed_matrix(b.as_cmat());
        let bx = bt.matvec(&x);
        let val: f64 = x.iter().zip(&bx).map(|(a, b)| a * b).sum();
        assert!((val - 1.0).abs() < 1e-15);
    }

    #[test]
    fn embed_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 3 + (rng.gen::<u64>() % 6) as usize;
            let m_rows = 1 + (rng.gen::<u64>() % n as u64) as usize;
            let b = random_psd(n, rng.gen());
            let q = CMat::from_fn(m_rows, n, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let w: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let a: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let emb = real_embed(&b, &q, &a).unwrap();
            let x = embed_vector(&w);

            // quadratic form identity
            let bx = emb.b_tilde.matvec(&x);
            let real_side: f64 = x.iter().zip(&bx).map(|(u, v)| u * v).sum();
            let complex_side = b.quadratic_form(&w);
            assert!(
                (real_side - complex_side).abs() <= 1e-12 * complex_side.abs().max(1.0),
                "quadratic form mismatch"
            );

            // norm identity
            let qx = emb.q_tilde.matvec(&x);
            let real_norm = qx.iter().map(|v| v * v).sum::<f64>().sqrt();
            let qw = q.matvec(&w);
            let complex_norm = qw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!((real_norm - complex_norm).abs() <= 1e-12 * complex_norm.max(1.0));

            // inner product identity: Re(a^H w) = ã'x
            let ahw: Complex64 = a.iter().zip(&w).map(|(ai, wi)| ai.conj() * wi).sum();
            let at_x: f64 = emb.x.iter().zip(&x).map(|(u, v)| u * v).sum();
            assert!((ahw.re - at_x).abs() <= 1e-14);
        }
    }

    #[test]
    fn embed_dimension_mismatch() {
        let b = HermitianMatrix::identity(3);
        let q = CMat::zeros(2, 4);
        let a = vec![Complex64::new(1.0, 0.0); 3];
        assert!(real_embed(&b, &q, &a).is_err());
    }

    #[test]
    fn complex_matrix_json_round_trip() {
        let m = random_hermitian(3, 9).as_cmat().clone();
        let js = ComplexMatrixJson::from_cmat(&m);
        let text = serde_json::to_string(&js).unwrap();
        let back: ComplexMatrixJson = serde_json::from_str(&text).unwrap();
        let m2 = back.to_cmat().unwrap();
        assert!(m.sub(&m2).frobenius_norm() < 1e-15);
    }
}
