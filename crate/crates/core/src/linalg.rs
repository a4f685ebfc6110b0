//! Dense complex matrices and Hermitian eigensolvers.
//!
//! Two solvers are provided. [`hermitian_eigen`] is a cyclic complex Jacobi
//! method returning eigenvalues and eigenvectors; it is used for small
//! problems such as the reduced spike matrix. [`hermitian_eigenvalues`]
//! reduces to a real symmetric tridiagonal matrix with Householder
//! reflections and runs implicit QL, which is what the Monte Carlo harness
//! calls once per trial.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOLERANCE: f64 = 1e-12;
const QL_MAX_ITERATIONS: usize = 60;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest |A - Aᴴ| entry relative to the Frobenius norm.
    pub fn hermitian_defect(&self) -> f64 {
        let norm = self.frobenius_norm().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst / norm
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// Eigen-decomposition of a Hermitian matrix: `A = V diag(values) Vᴴ`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |r, c| self.vectors[(r, c)] * self.values[c]);
        &scaled * &self.vectors.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-12 * ‖A‖_F`.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm();
    let target = JACOBI_TOLERANCE * norm;

    let mut converged = n <= 1 || norm == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&m) < target;
    }
    if !converged {
        return Err(Error::numeric(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += m[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p][q]` with the unitary `U = diag(1, conj(e)) · G(θ)` acting
/// on coordinates `p, q`, where `e` is the phase of `m[p][q]`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let e = apq / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -e.conj() * s;
    let u_qq = e.conj() * c;

    let n = m.rows();
    // A <- A U
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * u_pp + akq * u_qp;
        m[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- Uᴴ A
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::domain(format!(
            "matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let defect = a.hermitian_defect();
    if defect > 1e-10 {
        return Err(Error::numeric(format!(
            "matrix is not Hermitian (relative defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Eigenvalues (descending) of a Hermitian matrix via Householder
/// tridiagonalisation followed by implicit QL.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let (mut d, mut e) = tridiagonalize(a.clone());
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

/// Reduces a Hermitian matrix to a real symmetric tridiagonal one with the
/// same spectrum. Returns `(diagonal, subdiagonal)`; the subdiagonal has length
/// `n` with the last entry zero.
pub fn tridiagonalize(mut a: CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut sub = vec![0.0; n];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let xnorm = (lo..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            sub[k] = 0.0;
            continue;
        }
        let x0 = a[(lo, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] -= alpha;
        let vnorm = (lo..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            sub[k] = xnorm;
            continue;
        }
        for vi in &mut v[lo..n] {
            *vi /= vnorm;
        }
        // w = A v on the trailing block, then r = w - (vᴴw) v.
        for (i, wi) in w.iter_mut().enumerate().take(n).skip(lo) {
            let row = &a.data[i * n + lo..i * n + n];
            *wi = row.iter().zip(&v[lo..n]).map(|(aij, vj)| aij * vj).sum();
        }
        let kappa: Complex64 = (lo..n).map(|i| v[i].conj() * w[i]).sum();
        for i in lo..n {
            w[i] -= v[i] * kappa.re;
        }
        // A <- A - 2 v rᴴ - 2 r vᴴ
        for i in lo..n {
            let vi2 = v[i] * 2.0;
            let wi2 = w[i] * 2.0;
            let row = &mut a.data[i * n + lo..i * n + n];
            for (j, aij) in row.iter_mut().enumerate() {
                let j = j + lo;
                *aij -= vi2 * w[j].conj() + wi2 * v[j].conj();
            }
        }
        sub[k] = alpha.norm();
        // Column k below the subdiagonal is annihilated by construction.
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)].norm();
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, sub)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (eigenvalues only).
/// `e[i]` couples `d[i]` and `d[i + 1]`; on return `d` holds the eigenvalues.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERATIONS {
                return Err(Error::numeric("tridiagonal QL did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
