//! Dense real matrices and factorizations. Everything here is sized for
//! desk-scale problems (a few dozen unknowns); no attempt at sparsity.

use serde::{Deserialize, Serialize};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// y = Aᵀ x.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (yj, aij) in y.iter_mut().zip(row) {
                *yj += aij * xi;
            }
        }
        y
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Rank via Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol_rel: f64) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        let mut max_entry: f64 = a.data.iter().fold(0.0, |m, v| m.max(v.abs()));
        if max_entry == 0.0 {
            return 0;
        }
        max_entry = max_entry.max(1.0);
        let mut row = 0;
        for col in 0..a.cols {
            if row >= a.rows {
                break;
            }
            // pivot search in this column
            let (mut piv, mut piv_val) = (row, a[(row, col)].abs());
            for r in row + 1..a.rows {
                let v = a[(r, col)].abs();
                if v > piv_val {
                    piv = r;
                    piv_val = v;
                }
            }
            if piv_val <= tol_rel * max_entry {
                continue;
            }
            if piv != row {
                for c in 0..a.cols {
                    let t = a[(row, c)];
                    a[(row, c)] = a[(piv, c)];
                    a[(piv, c)] = t;
                }
            }
            for r in row + 1..a.rows {
                let factor = a[(r, col)] / a[(row, col)];
                for c in col..a.cols {
                    let v = a[(row, c)];
                    a[(r, c)] -= factor * v;
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factorization of a symmetric positive definite matrix.
/// Returns the lower factor, or `None` if a pivot falls below
/// `pivot_floor` times the largest diagonal entry.
pub fn cholesky(a: &Mat, pivot_floor: f64) -> Option<Mat> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut l = Mat::zeros(n, n);
    let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0f64, f64::max).max(1e-300);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= pivot_floor * max_diag {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / dj;
        }
    }
    Some(l)
}

/// Solve L Lᵀ x = b given the lower Cholesky factor.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = b.to_vec();
    // forward
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[(i, k)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    // backward with Lᵀ
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= l[(k, i)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// LU factorization with partial pivoting; stores L and U packed, plus the
/// row permutation. Returns `None` on exact singularity.
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
}

pub fn lu_factor(a: &Mat) -> Option<Lu> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (mut piv, mut piv_val) = (col, lu[(col, col)].abs());
        for r in col + 1..n {
            let v = lu[(r, col)].abs();
            if v > piv_val {
                piv = r;
                piv_val = v;
            }
        }
        if piv_val == 0.0 {
            return None;
        }
        if piv != col {
            perm.swap(piv, col);
            for c in 0..n {
                let t = lu[(col, c)];
                lu[(col, c)] = lu[(piv, c)];
                lu[(piv, c)] = t;
            }
        }
        let d = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / d;
            lu[(r, col)] = factor;
            for c in col + 1..n {
                let v = lu[(col, c)];
                lu[(r, c)] -= factor * v;
            }
        }
    }
    Some(Lu { lu, perm })
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
