//! Dense complex matrices, Hermitian forms and multi-index bookkeeping for
//! `V^{⊗d}`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used when validating Hermitian data supplied by callers.
pub const SYM_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, got: data.len() });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(pos));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Squared Frobenius norm `Σ |m_ij|²`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension { expected: self.cols, got: rhs.rows });
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; block `(i, j)` of the result is `self[i][j] * rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let (r, c) = (rhs.rows, rhs.cols);
        ComplexMatrix::from_fn(self.rows * r, self.cols * c, |i, j| {
            self[(i / r, j / c)] * rhs[(i % r, j % c)]
        })
    }

    /// Largest `|m_ij - conj(m_ji)|` together with its position.
    pub fn hermitian_residual(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let r = (self[(i, j)] - self[(j, i)].conj()).norm();
                if r > worst.0 {
                    worst = (r, i, j);
                }
            }
        }
        worst
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::Dimension { expected: self.rows, got: other.rows });
        }
        if self.cols != other.cols {
            return Err(Error::Dimension { expected: self.cols, got: other.cols });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Frobenius inner product `Σ conj(a_ij) b_ij`, conjugate-linear in `a`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `(M + M†)/2`.
pub fn hermitize(m: &ComplexMatrix) -> Result<HermitianForm> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: m.rows, got: m.cols });
    }
    let n = m.rows;
    let mut out = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    for i in 0..n {
        out[(i, i)].im = 0.0;
    }
    Ok(HermitianForm(out))
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm(ComplexMatrix);

impl HermitianForm {
    /// Validates within [`SYM_TOL`] and then stores the exactly Hermitian
    /// average of `m` and `m†`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension { expected: m.rows, got: m.cols });
        }
        let (residual, row, col) = m.hermitian_residual();
        if residual > SYM_TOL {
            return Err(Error::NotHermitian { row, col, residual });
        }
        hermitize(&m)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianForm(ComplexMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `h(u, v̄) = Σ u_i h_ij conj(v_j)`.
    pub fn eval(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += u[i] * self.0[(i, j)] * v[j].conj();
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for HermitianForm {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// Cholesky factor `L` (lower triangular, positive real diagonal) of a
/// positive-definite Hermitian matrix, `h = L L†`.
pub fn cholesky(h: &HermitianForm) -> Result<ComplexMatrix> {
    let n = h.dim();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::invalid("Gram matrix is not positive definite"));
        }
        let d = libm::sqrt(d);
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_triangular_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        inv[(col, col)] = ONE / l[(col, col)];
        for i in (col + 1)..n {
            let mut s = ZERO;
            for k in col..i {
                s += l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Big-endian multi-index into `V^{⊗d}`: the first slot is the most
/// significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    n: usize,
    digits: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: usize, digits: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&x| x >= n) {
            return Err(Error::Range { value: bad, bound: n });
        }
        Ok(MultiIndex { n, digits })
    }

    pub fn degree(&self) -> usize {
        self.digits.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn encode(&self) -> usize {
        encode_unchecked(&self.digits, self.n)
    }

    pub fn decode(flat: usize, n: usize, d: usize) -> Result<Self> {
        let bound = checked_pow(n, d).ok_or(Error::Resource { needed: u128::MAX, cap: usize::MAX as u128 })?;
        if flat >= bound {
            return Err(Error::Range { value: flat, bound });
        }
        let mut digits = vec![0; d];
        decode_into(flat, n, &mut digits);
        Ok(MultiIndex { n, digits })
    }
}

/// Checked base-`n` encoding of `digits`.
pub fn multi_index_encode(digits: &[usize], n: usize) -> Result<usize> {
    Ok(MultiIndex::new(n, digits.to_vec())?.encode())
}

/// Checked base-`n` decoding of `flat` into `d` digits.
pub fn multi_index_decode(flat: usize, n: usize, d: usize) -> Result<Vec<usize>> {
    Ok(MultiIndex::decode(flat, n, d)?.digits)
}

#[inline]
pub(crate) fn encode_unchecked(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * n + x)
}

#[inline]
pub(crate) fn decode_into(mut flat: usize, n: usize, digits: &mut [usize]) {
    for slot in digits.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

pub(crate) fn checked_pow(n: usize, d: usize) -> Option<usize> {
    (0..d).try_fold(1usize, |acc, _| acc.checked_mul(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn frobenius_examples() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(frobenius_inner(&id, &id).unwrap(), c(3.0, 0.0));
        let zero = ComplexMatrix::zeros(3, 3);
        assert_eq!(frobenius_inner(&zero, &id).unwrap(), ZERO);
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)])
            .unwrap();
        assert_eq!(frobenius_inner(&a, &a).unwrap(), c(7.0, 0.0));
    }

    #[test]
    fn frobenius_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(frobenius_inner(&a, &b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        let err = ComplexMatrix::from_row_major(1, 2, vec![ONE, c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFinite(1));
    }

    #[test]
    fn multi_index_examples() {
        assert_eq!(multi_index_encode(&[0, 0, 0, 0], 3).unwrap(), 0);
        assert_eq!(multi_index_encode(&[1, 0], 2).unwrap(), 2);
        assert_eq!(multi_index_decode(5, 2, 3).unwrap(), vec![1, 0, 1]);
        assert!(matches!(multi_index_encode(&[2, 0], 2), Err(Error::Range { .. })));
        assert!(matches!(multi_index_decode(8, 2, 3), Err(Error::Range { .. })));
    }

    #[test]
    fn hermitize_examples() {
        let h = ComplexMatrix::from_row_major(2, 2, vec![ONE, c(0.0, 3.0), c(0.0, -3.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(hermitize(&h).unwrap().matrix(), &h);
        let m = ComplexMatrix::from_row_major(2, 2, vec![ZERO, c(2.0, 0.0), ZERO, ZERO]).unwrap();
        let expect = ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        assert_eq!(hermitize(&m).unwrap().matrix(), &expect);
        let ii = ComplexMatrix::identity(3).scale(c(0.0, 1.0));
        assert_eq!(hermitize(&ii).unwrap().matrix().max_abs(), 0.0);
        assert!(hermitize(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn hermitian_validation() {
        let bad = ComplexMatrix::from_row_major(2, 2, vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(HermitianForm::new(bad), Err(Error::NotHermitian { row: 0, col: 1, .. })));
        let imag_diag = ComplexMatrix::from_row_major(1, 1, vec![c(1.0, 1e-3)]).unwrap();
        assert!(HermitianForm::new(imag_diag).is_err());
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = ComplexMatrix::from_row_major(
            3,
            3,
            vec![c(1.0, 0.5), c(0.2, 0.0), c(0.0, 0.3), c(0.1, 0.0), c(2.0, 0.0), ZERO, ZERO, c(0.4, -0.1), c(1.5, 0.0)],
        )
        .unwrap();
        let gram = HermitianForm::new(&m.adjoint() * &m).unwrap();
        let l = cholesky(&gram).unwrap();
        let back = &l * &l.adjoint();
        assert!((&back - gram.matrix()).max_abs() < 1e-13);
        let inv = lower_triangular_inverse(&l);
        assert!((&(&inv * &l) - &ComplexMatrix::identity(3)).max_abs() < 1e-13);
        let not_pd = HermitianForm::new(ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert!(cholesky(&not_pd).is_err());
    }

    fn matrix_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |v| {
            ComplexMatrix::from_row_major(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn frobenius_sesquilinear(a in matrix_strategy(3), b in matrix_strategy(3), c2 in matrix_strategy(3),
                                  lr in -2.0f64..2.0, li in -2.0f64..2.0) {
            let lambda = c(lr, li);
            let lhs = frobenius_inner(&(&a.scale(lambda) + &c2), &b).unwrap();
            let rhs = lambda.conj() * frobenius_inner(&a, &b).unwrap() + frobenius_inner(&c2, &b).unwrap();
            let scale = 1.0 + lhs.norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
            let lhs = frobenius_inner(&a, &(&b.scale(lambda) + &c2)).unwrap();
            let rhs = lambda * frobenius_inner(&a, &b).unwrap() + frobenius_inner(&a, &c2).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
            let self_inner = frobenius_inner(&a, &a).unwrap();
            prop_assert!(self_inner.im == 0.0 || self_inner.im.abs() < 1e-14);
            assert_relative_eq!(self_inner.re, a.norm_sq(), max_relative = 1e-14);
        }

        #[test]
        fn hermitize_idempotent(m in matrix_strategy(4)) {
            let once = hermitize(&m).unwrap();
            let twice = hermitize(once.matrix()).unwrap();
            prop_assert_eq!(once.matrix(), twice.matrix());
            prop_assert_eq!(once.matrix().hermitian_residual().0, 0.0);
        }

        #[test]
        fn multi_index_bijection(n in 1usize..8, d in 1usize..7, seed in any::<u64>()) {
            let bound = checked_pow(n, d).unwrap();
            prop_assume!(bound <= 1_000_000);
            let flat = (seed as usize) % bound;
            let digits = multi_index_decode(flat, n, d).unwrap();
            prop_assert_eq!(multi_index_encode(&digits, n).unwrap(), flat);
        }
    }

    #[test]
    fn multi_index_exhaustive_small() {
        for n in 1..=4 {
            for d in 1..=4 {
                let bound = checked_pow(n, d).unwrap();
                for flat in 0..bound {
                    let m = MultiIndex::decode(flat, n, d).unwrap();
                    assert_eq!(m.encode(), flat);
                }
            }
        }
    }
}
