//! Dense complex matrices and the Hermitian eigensolver everything else is
//! built on.
//!
//! Storage is row-major. Dimensions here never exceed a few dozen, so the
//! routines favour clarity and determinism over blocking or SIMD.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Elementwise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// (relative to `max(1, ||M||_F)`).
pub const JACOBI_OFF_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-14;
/// Most negative eigenvalue tolerated for a positive semidefinite input.
pub const PSD_TOL: f64 = 1e-12;

const PHASE_FIX_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must be a square.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let dim = cols.len();
        if let Some(bad) = cols.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| cols[j][i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, k)]).collect()
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Real part of the diagonal.
    pub fn diag_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    /// Keeps only the diagonal.
    pub fn diagonal_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            m[(i, i)] = self[(i, i)];
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "distance between different dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul of different dims");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U M U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// `<v|M|v>`.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut mv = C64::new(0.0, 0.0);
            for (m, x) in row.iter().zip(v) {
                mv += m * x;
            }
            acc += v[i].conj() * mv;
        }
        acc
    }

    /// `<v|M|v>` for Hermitian `M`, reading only the upper triangle.
    pub fn hermitian_form(&self, v: &[C64]) -> f64 {
        let n = self.dim;
        let mut diag = 0.0;
        let mut off = C64::new(0.0, 0.0);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            diag += row[i].re * v[i].norm_sqr();
            let mut acc = C64::new(0.0, 0.0);
            for k in i + 1..n {
                acc += row[k] * v[k];
            }
            off += v[i].conj() * acc;
        }
        diag + 2.0 * off.re
    }

    /// Real part of `tr(self * other)`.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.data[i * n + k] * other.data[k * n + i]).re;
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; entry `(i*db + k, j*db + l)` is `a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors, same index convention as [`kron`].
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V f(diag(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    /// Descending copy of the eigenvalues.
    pub fn descending(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.reverse();
        v
    }
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come out ascending. Each eigenvector has its first component
/// of magnitude above 1e-10 rotated to be real and positive; ties keep the
/// order the rotations produced.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let n = m.dim();
    let deviation = m.hermiticity_error();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) < JACOBI_OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off >= JACOBI_OFF_TOL * scale {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let mut vecs = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > PHASE_FIX_TOL)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(C64::new(1.0, 0.0));
        for i in 0..n {
            vecs[(i, dst)] = col[i] * phase;
        }
    }
    Ok(HermitianEig {
        eigenvalues: order.iter().map(|&i| diag[i]).collect(),
        eigenvectors: vecs,
    })
}

/// One unitary 2x2 elimination of `a[p,q]`: `a <- G^dagger a G`, `v <- v G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in f64.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph = phase.conj();
    // G restricted to the (p, q) plane.
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -ph * s;
    let gqq = ph * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Logarithm of a PSD matrix restricted to its support.
#[derive(Clone, Debug)]
pub struct SupportLog {
    /// `sum_{lambda_k > cutoff} ln(lambda_k) |v_k><v_k|`.
    pub log: ComplexMatrix,
    /// Projector onto the span of eigenvectors with `lambda_k > cutoff`.
    pub support: ComplexMatrix,
}

pub fn matrix_log_on_support(m: &ComplexMatrix) -> Result<SupportLog> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NegativeEigenvalue { value: min });
    }
    Ok(SupportLog {
        log: eig.map_spectrum(|l| if l > SUPPORT_CUTOFF { l.ln() } else { 0.0 }),
        support: eig.map_spectrum(|l| if l > SUPPORT_CUTOFF { 1.0 } else { 0.0 }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn hermitian_from(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i..n {
                let &(re, im) = it.next().unwrap();
                if i == j {
                    m[(i, i)] = c64(re, 0.0);
                } else {
                    m[(i, j)] = c64(re, im);
                    m[(j, i)] = c64(re, -im);
                }
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    fn det_oracle(m: &ComplexMatrix) -> C64 {
        let n = m.dim();
        let mut a: Vec<Vec<C64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let mut det = c64(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
                .unwrap();
            if a[piv][col].norm() == 0.0 {
                return c64(0.0, 0.0);
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    let sub = f * a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }

    #[test]
    fn eig_identity() {
        let e = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        let vtv = e.eigenvectors.adjoint().matmul(&e.eigenvectors);
        assert!(vtv.distance(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn eig_diagonal_sorted() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        assert!((e.eigenvectors[(1, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_pauli_x() {
        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Phase convention makes the first component real positive.
        let v0 = e.vector(0);
        assert!((v0[0] - c64(s, 0.0)).norm() < 1e-14);
        assert!((v0[1] - c64(-s, 0.0)).norm() < 1e-14);
        let v1 = e.vector(1);
        assert!((v1[0] - c64(s, 0.0)).norm() < 1e-14);
        assert!((v1[1] - c64(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_complex_off_diagonal() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = ComplexMatrix::from_rows(&[
            vec![c64(1.0, 0.0), c64(0.0, 1.0)],
            vec![c64(0.0, -1.0), c64(1.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert!(e.eigenvalues[0].abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!(e.reconstruct().distance(&m) < 1e-13);
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let a = ComplexMatrix::from_real_diag(&[2.0, 3.0]);
        let b = ComplexMatrix::from_real_diag(&[5.0, 7.0]);
        assert_eq!(kron(&a, &b), ComplexMatrix::from_real_diag(&[10.0, 14.0, 15.0, 21.0]));

        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let k = kron(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c64(expected, 0.0));
            }
        }
    }

    #[test]
    fn log_on_support_examples() {
        let l = matrix_log_on_support(&ComplexMatrix::identity(2)).unwrap();
        assert!(l.log.max_abs() < 1e-15);

        let e = std::f64::consts::E;
        let l = matrix_log_on_support(&ComplexMatrix::from_real_diag(&[e, 1.0])).unwrap();
        assert!(l.log.distance(&ComplexMatrix::from_real_diag(&[1.0, 0.0])) < 1e-14);

        let l = matrix_log_on_support(&ComplexMatrix::from_real_diag(&[0.5, 0.5])).unwrap();
        let ln_half = 0.5_f64.ln();
        assert!((ln_half + 0.6931).abs() < 1e-4);
        assert!(l.log.distance(&ComplexMatrix::from_real_diag(&[ln_half, ln_half])) < 1e-14);
    }

    #[test]
    fn log_on_support_records_kernel() {
        let l = matrix_log_on_support(&ComplexMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert!(l.support.distance(&ComplexMatrix::from_real_diag(&[1.0, 0.0])) < 1e-15);
        assert!(l.log.max_abs() < 1e-15);
    }

    #[test]
    fn log_rejects_negative() {
        let m = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(
            matrix_log_on_support(&m),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    fn entries_strategy(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * (n + 1) / 2)
    }

    fn sized_hermitian(max: usize) -> impl Strategy<Value = ComplexMatrix> {
        (1..=max).prop_flat_map(|n| entries_strategy(n).prop_map(move |e| hermitian_from(n, &e)))
    }

    proptest! {
        #[test]
        fn eig_reconstructs(m in sized_hermitian(16)) {
            let e = hermitian_eig(&m).unwrap();
            prop_assert!(e.reconstruct().distance(&m) <= 1e-9);
            let n = m.dim();
            let vtv = e.eigenvectors.adjoint().matmul(&e.eigenvectors);
            prop_assert!(vtv.distance(&ComplexMatrix::identity(n)) <= 1e-10);
            for w in e.eigenvalues.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for k in 0..n {
                let v = e.vector(k);
                let mv = m.mul_vec(&v);
                let err: f64 = mv.iter().zip(&v)
                    .map(|(a, b)| (a - b * e.eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(err <= 1e-10);
            }
            let tr: f64 = e.eigenvalues.iter().sum();
            prop_assert!((tr - m.trace().re).abs() <= 1e-10);
        }

        #[test]
        fn eig_product_matches_determinant(m in sized_hermitian(6)) {
            let e = hermitian_eig(&m).unwrap();
            let prod: f64 = e.eigenvalues.iter().product();
            let det = det_oracle(&m);
            prop_assert!((prod - det.re).abs() <= 1e-8);
            prop_assert!(det.im.abs() <= 1e-8);
        }

        #[test]
        fn kron_is_associative(
            a in sized_hermitian(2), b in sized_hermitian(3), c in sized_hermitian(2)
        ) {
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            prop_assert!(left.distance(&right) <= 1e-12);
            // Mixed product property.
            let ab = kron(&a, &b);
            let sq = ab.matmul(&ab);
            let sq2 = kron(&a.matmul(&a), &b.matmul(&b));
            prop_assert!(sq.distance(&sq2) <= 1e-12 * (1.0 + sq.frobenius_norm()));
        }
    }
}
