//! Dense complex matrices in double precision, sized for space-time code
//! work (nothing here exceeds 8×8, plus tall stacks of such blocks).
//!
//! Spectral routines are Jacobi-based: cyclic two-sided Jacobi for Hermitian
//! eigenvalues and one-sided (Hestenes) Jacobi for singular values. At these
//! sizes they are simple, and they resolve tiny singular values to machine
//! precision, which the rank tolerance of `tol::RANK_REL` relies on.

use crate::{tol, Complex64, Error, Result};
use alloc::vec;
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// # Panics
    /// Panics if `entries.len() != rows * cols` or either dimension is zero.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        CMatrix { rows, cols, entries }
    }

    /// Builds a matrix by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        CMatrix::from_vec(rows, cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix::from_vec(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// # Panics
    /// Panics if out of range.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j]
    }

    /// # Panics
    /// Panics if out of range.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map(|z| k * z)
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.map(|z| z * k)
    }

    /// Elementwise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// # Panics
    /// Panics on dimension mismatch.
    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "dimension mismatch in add"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// # Panics
    /// Panics on dimension mismatch.
    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "dimension mismatch in sub"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Stacks `self` on top of `other`.
    ///
    /// # Panics
    /// Panics if column counts differ.
    pub fn vstack(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        CMatrix::from_vec(self.rows + other.rows, self.cols, entries)
    }

    /// Rows `r0..r1` as a new matrix.
    ///
    /// # Panics
    /// Panics if the range is empty or out of bounds.
    pub fn row_block(&self, r0: usize, r1: usize) -> Self {
        assert!(r0 < r1 && r1 <= self.rows, "row range out of bounds");
        CMatrix::from_vec(
            r1 - r0,
            self.cols,
            self.entries[r0 * self.cols..r1 * self.cols].to_vec(),
        )
    }

    /// Assembles [[a, b], [c, d]] from equally sized blocks.
    ///
    /// # Panics
    /// Panics if the blocks do not share one shape.
    pub fn block2x2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Self {
        let (r, co) = (a.rows, a.cols);
        for m in [b, c, d] {
            assert_eq!((m.rows, m.cols), (r, co), "blocks must share one shape");
        }
        CMatrix::from_fn(2 * r, 2 * co, |i, j| match (i < r, j < co) {
            (true, true) => a.get(i, j),
            (true, false) => b.get(i, j - co),
            (false, true) => c.get(i - r, j),
            (false, false) => d.get(i - r, j - co),
        })
    }

    /// Maximum absolute difference between entries.
    ///
    /// # Panics
    /// Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "dimension mismatch in max_abs_diff"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tolerance: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.max_abs_diff(other) <= tolerance
    }

    /// Matrix-vector product.
    ///
    /// # Panics
    /// Panics if `v.len() != self.cols`.
    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.frob_norm().max(1.0);
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tolerance * scale {
                    return false;
                }
            }
        }
        true
    }

    fn frob_norm(&self) -> f64 {
        frobenius_norm_sq(self).sqrt()
    }
}

/// Standard complex matrix product.
///
/// # Panics
/// Panics if `a.cols != b.rows`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.cols, b.rows, "dimension mismatch in matmul");
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..b.cols {
                let v = out.get(i, j) + aik * b.get(k, j);
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn hermitian(a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.cols, a.rows, |i, j| a.get(j, i).conj())
}

/// Sum of the main diagonal.
///
/// # Panics
/// Panics if `a` is not square.
pub fn trace(a: &CMatrix) -> Complex64 {
    assert!(a.is_square(), "trace requires a square matrix");
    (0..a.rows).map(|i| a.get(i, i)).sum()
}

/// Squared Frobenius norm, Σ|entry|².
pub fn frobenius_norm_sq(a: &CMatrix) -> f64 {
    a.entries.iter().map(|z| z.norm_sqr()).sum()
}

/// Determinant via LU decomposition with partial pivoting.
///
/// # Panics
/// Panics if `a` is not square.
pub fn determinant(a: &CMatrix) -> Complex64 {
    assert!(a.is_square(), "determinant requires a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = m.get(k, k).norm();
        for i in k + 1..n {
            let mag = m.get(i, k).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = m.get(k, j);
                m.set(k, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            det = -det;
        }
        let pivot = m.get(k, k);
        det *= pivot;
        for i in k + 1..n {
            let factor = m.get(i, k) / pivot;
            for j in k..n {
                let v = m.get(i, j) - factor * m.get(k, j);
                m.set(i, j, v);
            }
        }
    }
    det
}

/// Count of singular values exceeding `tolerance · σ_max`.
pub fn rank(a: &CMatrix, tolerance: f64) -> usize {
    assert!(tolerance >= 0.0, "rank tolerance must be nonnegative");
    let sv = singular_values(a);
    let smax = sv[0];
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tolerance * smax).count()
}

/// Eigenvalues of a Hermitian matrix, descending, by cyclic two-sided
/// Jacobi rotations. Values only; the design criteria never need vectors.
pub fn eig_hermitian(a: &CMatrix) -> Result<Vec<f64>> {
    if !a.is_square() || !a.is_hermitian(tol::HERMITIAN_CHECK) {
        return Err(Error::NotHermitian);
    }
    let n = a.rows;
    let mut m = a.clone();
    let norm = m.frob_norm();
    if norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m.get(i, j).norm_sqr();
                }
            }
        }
        if off.sqrt() <= tol::JACOBI_OFF * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m.get(p, q);
                if g.norm() <= tol::JACOBI_OFF * norm {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(m.get(p, p).re, m.get(q, q).re, g);
                // m ← R† m R with R = I except R[p][p]=c, R[p][q]=s·e^{jφ},
                // R[q][p]=−s·e^{−jφ}, R[q][q]=c. Applied as explicit row and
                // column updates.
                let e_pos = Complex64::from_polar(1.0, phase);
                let e_neg = e_pos.conj();
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, mkp * c - mkq * (e_neg * s));
                    m.set(k, q, mkp * (e_pos * s) + mkq * c);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, mpk * c - mqk * (e_pos * s));
                    m.set(q, k, mpk * (e_neg * s) + mqk * c);
                }
            }
        }
        // Re-symmetrize to stop round-off drift across sweeps.
        for i in 0..n {
            for j in i + 1..n {
                let avg = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                m.set(i, j, avg);
                m.set(j, i, avg.conj());
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    Ok(eigs)
}

/// Rotation parameters (c, s, φ) zeroing the (p,q) entry of the Hermitian
/// 2×2 block [[app, g], [g*, aqq]] where g = |g|·e^{jφ}.
fn jacobi_rotation(app: f64, aqq: f64, g: Complex64) -> (f64, f64, f64) {
    let phase = g.im.atan2(g.re);
    let mag = g.norm();
    let zeta = (aqq - app) / (2.0 * mag);
    let t = {
        let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
        sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Singular values, descending, by one-sided (Hestenes) Jacobi
/// orthogonalization of the columns. Exactly `min(rows, cols)` values.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    // Work on the tall orientation; σ(A) = σ(A†).
    let work = if a.rows >= a.cols { a.clone() } else { hermitian(a) };
    let (m, n) = (work.rows, work.cols);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| work.get(i, j)).collect())
        .collect();
    let scale: f64 = frobenius_norm_sq(&work).sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n {
            for q in p + 1..n {
                let app: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let apq: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(&u, &v)| u.conj() * v)
                    .sum();
                if apq.norm() <= tol::JACOBI_OFF * app.sqrt() * aqq.sqrt()
                    || app == 0.0
                    || aqq == 0.0
                {
                    continue;
                }
                converged = false;
                let phase = apq.im.atan2(apq.re);
                let e_neg = Complex64::from_polar(1.0, -phase);
                let mag = apq.norm();
                let zeta = (aqq - app) / (2.0 * mag);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..m {
                    let u = cols[p][i];
                    let v = cols[q][i] * e_neg;
                    cols[p][i] = u * c - v * s;
                    cols[q][i] = u * s + v * c;
                }
            }
        }
        if converged {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    sv
}

/// Inverse via LU with partial pivoting, guarded by a condition estimate.
///
/// # Panics
/// Panics if `a` is not square.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    assert!(a.is_square(), "inverse requires a square matrix");
    let sv = singular_values(a);
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    if smin == 0.0 || smax / smin >= tol::CONDITION_MAX {
        return Err(Error::IllConditioned);
    }
    let n = a.rows;
    // Gauss-Jordan on [a | I] with partial pivoting.
    let mut m = a.clone();
    let mut inv = CMatrix::identity(n);
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = m.get(k, k).norm();
        for i in k + 1..n {
            let mag = m.get(i, k).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::IllConditioned);
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = m.get(k, j);
                m.set(k, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
                let tmp = inv.get(k, j);
                inv.set(k, j, inv.get(pivot_row, j));
                inv.set(pivot_row, j, tmp);
            }
        }
        let pivot = m.get(k, k);
        for j in 0..n {
            m.set(k, j, m.get(k, j) / pivot);
            inv.set(k, j, inv.get(k, j) / pivot);
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = m.get(i, k);
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            for j in 0..n {
                let v = m.get(i, j) - factor * m.get(k, j);
                m.set(i, j, v);
                let v = inv.get(i, j) - factor * inv.get(k, j);
                inv.set(i, j, v);
            }
        }
    }
    Ok(inv)
}

/// Cholesky factor L with A = L·L†, for Hermitian positive-definite A.
/// A degenerate pivot gets one retry with `tol::CHOLESKY_JITTER` added to
/// the diagonal, which covers covariance matrices that are PSD up to
/// round-off (e.g. heavily correlated fading).
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || !a.is_hermitian(tol::HERMITIAN_CHECK) {
        return Err(Error::NotHermitian);
    }
    match cholesky_attempt(a) {
        Ok(l) => Ok(l),
        Err(_) => {
            let scale = a.frob_norm().max(1.0);
            let jittered = CMatrix::from_fn(a.rows, a.cols, |i, j| {
                if i == j {
                    a.get(i, j) + Complex64::new(tol::CHOLESKY_JITTER * scale, 0.0)
                } else {
                    a.get(i, j)
                }
            });
            cholesky_attempt(&jittered)
        }
    }
}

fn cholesky_attempt(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows;
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k).conj();
            }
            if i == j {
                if sum.re <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                l.set(i, j, Complex64::new(sum.re.sqrt(), 0.0));
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_identity_preserves() {
        let a = CMatrix::from_vec(2, 2, vec![c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(0.0, 4.0)]);
        assert!(matmul(&CMatrix::identity(2), &a).approx_eq(&a, 0.0));
    }

    #[test]
    fn matmul_permutation_involution() {
        let p = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matmul(&p, &p).approx_eq(&CMatrix::identity(2), 0.0));
    }

    #[test]
    #[should_panic(expected = "dimension mismatch in matmul")]
    fn matmul_rejects_mismatched_shapes() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(2, 2);
        let _ = matmul(&a, &b);
    }

    #[test]
    fn hermitian_flips_sign_of_imaginary() {
        let a = CMatrix::from_vec(1, 1, vec![c(0.0, 1.0)]);
        assert_eq!(hermitian(&a).get(0, 0), c(0.0, -1.0));
        assert!(hermitian(&CMatrix::identity(3)).approx_eq(&CMatrix::identity(3), 0.0));
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(trace(&CMatrix::identity(3)), c(3.0, 0.0));
    }

    #[test]
    #[should_panic(expected = "trace requires a square matrix")]
    fn trace_rejects_rectangular() {
        let _ = trace(&CMatrix::zeros(2, 3));
    }

    #[test]
    fn frobenius_of_identity_and_zero() {
        assert_eq!(frobenius_norm_sq(&CMatrix::identity(2)), 2.0);
        assert_eq!(frobenius_norm_sq(&CMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn determinant_of_diagonal() {
        let d = CMatrix::diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((determinant(&d) - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rank_of_simple_cases() {
        let d = CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(rank(&d, tol::RANK_REL), 1);
        assert_eq!(rank(&CMatrix::zeros(2, 2), tol::RANK_REL), 0);
        assert_eq!(rank(&CMatrix::identity(4), tol::RANK_REL), 4);
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let d = CMatrix::diagonal(&[c(1.0, 0.0), c(4.0, 0.0)]);
        let e = eig_hermitian(&d).unwrap();
        assert_eq!(e, vec![4.0, 1.0]);
        let e = eig_hermitian(&CMatrix::identity(3)).unwrap();
        assert_eq!(e, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = CMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(eig_hermitian(&a), Err(Error::NotHermitian));
    }

    #[test]
    fn eig_of_dense_hermitian_matches_char_poly() {
        // [[2, 1-j], [1+j, 3]] has eigenvalues (5 ± √(1+8))/2 = (5±3)/2.
        let a = CMatrix::from_vec(2, 2, vec![c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)]);
        let e = eig_hermitian(&a).unwrap();
        assert!((e[0] - 4.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_diagonal() {
        assert_eq!(singular_values(&CMatrix::identity(2)), vec![1.0, 1.0]);
        let d = CMatrix::diagonal(&[c(3.0, 0.0), c(0.0, 0.0)]);
        let sv = singular_values(&d);
        assert!((sv[0] - 3.0).abs() < 1e-14 && sv[1].abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_rectangular_count() {
        let a = CMatrix::zeros(4, 2);
        assert_eq!(singular_values(&a).len(), 2);
        let a = CMatrix::zeros(2, 4);
        assert_eq!(singular_values(&a).len(), 2);
    }

    #[test]
    fn inverse_of_diagonal() {
        let d = CMatrix::diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let want = CMatrix::diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert!(inverse(&d).unwrap().approx_eq(&want, 1e-14));
        assert!(inverse(&CMatrix::identity(4)).unwrap().approx_eq(&CMatrix::identity(4), 1e-14));
    }

    #[test]
    fn inverse_refuses_singular() {
        let d = CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(inverse(&d), Err(Error::IllConditioned));
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = CMatrix::from_vec(2, 2, vec![c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]);
        let l = cholesky(&a).unwrap();
        assert!(matmul(&l, &hermitian(&l)).approx_eq(&a, 1e-12));
    }

    #[test]
    fn block2x2_lays_out_quadrants() {
        let a = CMatrix::identity(1);
        let z = CMatrix::zeros(1, 1);
        let m = CMatrix::block2x2(&a, &z, &z, &a);
        assert!(m.approx_eq(&CMatrix::identity(2), 0.0));
    }

    #[test]
    fn row_block_splits() {
        let m = CMatrix::from_fn(4, 2, |i, j| c((i * 2 + j) as f64, 0.0));
        let top = m.row_block(0, 2);
        let bottom = m.row_block(2, 4);
        assert_eq!(top.get(1, 1), c(3.0, 0.0));
        assert_eq!(bottom.get(0, 0), c(4.0, 0.0));
        assert!(top.vstack(&bottom).approx_eq(&m, 0.0));
    }
}
