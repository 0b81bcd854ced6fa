//! Algebraic Hermitian and Kähler curvature tensors.
//!
//! A tensor is stored as the coefficient array `R[i][j][k][l] = R(e_i, ē_j, e_k, ē_l)`
//! in an orthonormal frame, flattened big-endian. Equivalently it is the
//! Hermitian form `q` on `V ⊗ V` with `q[(i,k)][(j,l)] = R[i][j][k][l]`; since
//! the frame is orthonormal this is also the matrix of the endomorphism `f`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, hermitize, lower_triangular_inverse, ComplexMatrix, HermitianForm, SYM_TOL, ZERO};
use crate::sphere::standard_complex_normal;

/// Tolerance for the reality and pairing checks on derived quantities.
pub const DERIVED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<Complex64>,
}

impl CurvatureTensor {
    /// Validates the Hermitian-pair symmetry `R[i][j][k][l] = conj(R[j][i][l][k])`
    /// within [`SYM_TOL`] and stores the exact average of each conjugate pair.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let expected = n.pow(4);
        if entries.len() != expected {
            return Err(Error::Dimension { expected, got: entries.len() });
        }
        if let Some(pos) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(pos));
        }
        let raw = CurvatureTensor { n, data: entries };
        let (residual, index) = raw.pair_residual();
        if residual > SYM_TOL {
            return Err(Error::InvalidTensor { index, residual });
        }
        Ok(raw.pair_symmetrized())
    }

    /// Like [`from_entries`](Self::from_entries), but the entries are taken in
    /// a frame whose Gram matrix is `gram[i][j] = h(e_i, ē_j)`. The tensor is
    /// moved to the orthonormal frame `ε = e · L^{-T}` where `gram = L L†`.
    pub fn from_entries_in_frame(n: usize, entries: Vec<Complex64>, gram: &HermitianForm) -> Result<Self> {
        if gram.dim() != n {
            return Err(Error::Dimension { expected: n, got: gram.dim() });
        }
        let raw = Self::from_entries(n, entries)?;
        let l = cholesky(gram)?;
        // change[a][i] = M_{ia}, the coefficient of e_i in ε_a
        let change = lower_triangular_inverse(&l);
        Ok(raw.change_frame(&change).pair_symmetrized())
    }

    /// Builds a tensor from a Hermitian form on `V ⊗ V` (dimension `n²`).
    pub fn from_form(n: usize, q: &HermitianForm) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if q.dim() != n * n {
            return Err(Error::Dimension { expected: n * n, got: q.dim() });
        }
        let mut data = vec![ZERO; n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data[flat(n, i, j, k, l)] = q[(i * n + k, j * n + l)];
                    }
                }
            }
        }
        Ok(CurvatureTensor { n, data })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_form(n, &HermitianForm::zeros(n * n))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.data[flat(self.n, i, j, k, l)]
    }

    /// Entries in big-endian `(i, j, k, l)` order.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// The matrix `f[(i,k)][(j,l)] = R[i][j][k][l]` of the curvature
    /// endomorphism of `V ⊗ V`.
    pub fn form(&self) -> HermitianForm {
        let n = self.n;
        let m = ComplexMatrix::from_fn(n * n, n * n, |row, col| {
            self.get(row / n, col / n, row % n, col % n)
        });
        // exact by construction
        HermitianForm::new(m).expect("stored tensor is pair-symmetric")
    }

    /// `Σ R[i][j][k][l] x_i conj(y_j) z_k conj(w_l)`.
    pub fn contract(&self, x: &[Complex64], y: &[Complex64], z: &[Complex64], w: &[Complex64]) -> Complex64 {
        let n = self.n;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j].conj();
                if xy == ZERO {
                    continue;
                }
                for k in 0..n {
                    let base = flat(n, i, j, k, 0);
                    let mut inner = ZERO;
                    for l in 0..n {
                        inner += self.data[base + l] * w[l].conj();
                    }
                    acc += xy * z[k] * inner;
                }
            }
        }
        acc
    }

    /// Holomorphic sectional curvature `R(v, v̄, v, v̄)/|v|⁴`.
    pub fn hsc(&self, v: &[Complex64]) -> Result<f64> {
        let norm_sq = self.check_vector(v)?;
        let value = self.contract(v, v, v, v);
        debug_assert!(value.im.abs() <= 1e-10 * (1.0 + value.re.abs()), "H(v) not real: {value}");
        Ok(value.re / (norm_sq * norm_sq))
    }

    /// Holomorphic bisectional curvature `R(u, ū, v, v̄)/(|u|²|v|²)`. Real for
    /// Kähler tensors, complex in general.
    pub fn bisectional(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        let nu = self.check_vector(u)?;
        let nv = self.check_vector(v)?;
        Ok(self.contract(u, u, v, v) / (nu * nv))
    }

    /// Largest `|R[i][j][k][l] - R[k][j][i][l]|` and where it occurs.
    pub fn kahler_residual(&self) -> (f64, [usize; 4]) {
        let n = self.n;
        let mut worst = (0.0, [0; 4]);
        for_each_index(n, |i, j, k, l| {
            let r = (self.get(i, j, k, l) - self.get(k, j, i, l)).norm();
            if r > worst.0 {
                worst = (r, [i, j, k, l]);
            }
        });
        worst
    }

    /// `true` iff the Kähler symmetry holds within `tol`; also returns the
    /// worst residual.
    pub fn is_kahler(&self, tol: f64) -> (bool, f64) {
        let (residual, _) = self.kahler_residual();
        (residual <= tol, residual)
    }

    /// The four Ricci contractions and two scalar curvatures.
    pub fn ricci_set(&self) -> RicciSet {
        let n = self.n;
        let mut r1 = ComplexMatrix::zeros(n, n);
        let mut r2 = ComplexMatrix::zeros(n, n);
        let mut r3 = ComplexMatrix::zeros(n, n);
        let mut r4 = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                for j in 0..n {
                    r1[(k, l)] += self.get(j, j, k, l);
                    r2[(k, l)] += self.get(j, l, k, j);
                    r3[(k, l)] += self.get(k, l, j, j);
                    r4[(k, l)] += self.get(k, j, j, l);
                }
            }
        }
        let mut s1 = ZERO;
        let mut s2 = ZERO;
        for j in 0..n {
            for k in 0..n {
                s1 += self.get(j, j, k, k);
                s2 += self.get(j, k, k, j);
            }
        }
        debug_assert!(s1.im.abs() <= DERIVED_TOL * (1.0 + s1.re.abs()));
        debug_assert!(s2.im.abs() <= DERIVED_TOL * (1.0 + s2.re.abs()));
        RicciSet {
            r1: HermitianForm::new(r1).expect("r1 of a pair-symmetric tensor is Hermitian"),
            r2,
            r3: HermitianForm::new(r3).expect("r3 of a pair-symmetric tensor is Hermitian"),
            r4,
            s1: s1.re,
            s2: s2.re,
        }
    }

    /// Expresses `q` in the orthonormal basis `Sym²V ⊕ ⋀²V` of `V ⊗ V`.
    pub fn block_decomposition(&self) -> BlockDecomposition {
        let n = self.n;
        let f = self.form();
        let bs = sym2_basis(n);
        let bw = wedge_basis(n);
        let f_bs = f.matrix() * &bs;
        let f_bw = f.matrix() * &bw;
        let q_sym = &bs.transpose() * &f_bs;
        let q_wedge = &bw.transpose() * &f_bw;
        let q_cross = &bs.transpose() * &f_bw;
        BlockDecomposition {
            n,
            q_sym: hermitize(&q_sym).expect("square"),
            q_wedge: hermitize(&q_wedge).expect("square"),
            q_cross,
        }
    }

    pub fn norms(&self) -> TensorNorms {
        let ricci = self.ricci_set();
        let sum = &(&(ricci.r1.matrix() + &ricci.r2) + ricci.r3.matrix()) + &ricci.r4;
        TensorNorms {
            norm_r_sq: self.data.iter().map(|z| z.norm_sqr()).sum(),
            norm_r1_sq: ricci.r1.matrix().norm_sq(),
            s1: ricci.s1,
            s2: ricci.s2,
            norm_rsym_sq: self.block_decomposition().q_sym.matrix().norm_sq(),
            norm_ricci_sum_sq: sum.norm_sq(),
        }
    }

    /// `q = hermitize(G)` with `G` i.i.d. standard complex Gaussian on `V ⊗ V`.
    pub fn random_hermitian(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = n * n;
        let g = ComplexMatrix::from_fn(m, m, |_, _| standard_complex_normal(&mut rng));
        Self::from_form(n, &hermitize(&g)?)
    }

    fn check_vector(&self, v: &[Complex64]) -> Result<f64> {
        if v.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: v.len() });
        }
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::invalid("zero vector"));
        }
        Ok(norm_sq)
    }

    fn pair_residual(&self) -> (f64, [usize; 4]) {
        let mut worst = (0.0, [0; 4]);
        for_each_index(self.n, |i, j, k, l| {
            let r = (self.get(i, j, k, l) - self.get(j, i, l, k).conj()).norm();
            if r > worst.0 {
                worst = (r, [i, j, k, l]);
            }
        });
        worst
    }

    fn pair_symmetrized(&self) -> Self {
        let n = self.n;
        let mut data = vec![ZERO; self.data.len()];
        for_each_index(n, |i, j, k, l| {
            data[flat(n, i, j, k, l)] = (self.get(i, j, k, l) + self.get(j, i, l, k).conj()) * 0.5;
        });
        CurvatureTensor { n, data }
    }

    /// `R'[a][b][c][d] = Σ M_{ia} conj(M_{jb}) M_{kc} conj(M_{ld}) R[i][j][k][l]`
    /// with `change[a][i] = M_{ia}`.
    fn change_frame(&self, change: &ComplexMatrix) -> Self {
        let n = self.n;
        let mut cur = self.data.clone();
        for slot in 0..4 {
            let conj = slot % 2 == 1;
            let stride = n.pow(3 - slot as u32);
            let mut next = vec![ZERO; cur.len()];
            for (pos, out) in next.iter_mut().enumerate() {
                let a = (pos / stride) % n;
                let base = pos - a * stride;
                let mut acc = ZERO;
                for i in 0..n {
                    let coeff = if conj { change[(a, i)].conj() } else { change[(a, i)] };
                    acc += coeff * cur[base + i * stride];
                }
                *out = acc;
            }
            cur = next;
        }
        CurvatureTensor { n, data: cur }
    }
}

/// A curvature tensor with the extra symmetry `R[i][j][k][l] = R[k][j][i][l]`
/// (and its conjugate partner `R[i][j][k][l] = R[i][l][k][j]`).
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerTensor(CurvatureTensor);

impl KahlerTensor {
    /// Checks the Kähler symmetry within `tol`, then averages over it exactly.
    pub fn new(tensor: CurvatureTensor, tol: f64) -> Result<Self> {
        let (residual, index) = tensor.kahler_residual();
        if residual > tol {
            return Err(Error::InvalidTensor { index, residual });
        }
        let n = tensor.n;
        let mut data = vec![ZERO; tensor.data.len()];
        for_each_index(n, |i, j, k, l| {
            data[flat(n, i, j, k, l)] =
                (tensor.get(i, j, k, l) + tensor.get(k, j, i, l) + tensor.get(i, l, k, j) + tensor.get(k, l, i, j))
                    * 0.25;
        });
        Ok(KahlerTensor(CurvatureTensor { n, data }))
    }

    /// The pullback `R = Π₂* Ĥ` of a Hermitian form on `Sym²V`, written in the
    /// orthonormal basis returned by [`sym2_basis`].
    pub fn from_sym2(n: usize, h_hat: &HermitianForm) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let m = sym2_dim(n);
        if h_hat.dim() != m {
            return Err(Error::Dimension { expected: m, got: h_hat.dim() });
        }
        let bs = sym2_basis(n);
        let f = &(&bs * h_hat.matrix()) * &bs.transpose();
        let tensor = CurvatureTensor::from_form(n, &hermitize(&f)?)?;
        Ok(KahlerTensor(tensor))
    }

    /// Reads `Ĥ` back off the tensor: `Ĥ_{αβ} = b_αᵀ f b_β`.
    pub fn sym2_quotient(&self) -> HermitianForm {
        self.0.block_decomposition().q_sym
    }

    /// Constant holomorphic sectional curvature `c`:
    /// `R[i][j][k][l] = (c/2)(δ_ij δ_kl + δ_il δ_kj)`.
    pub fn constant_hsc(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let mut data = vec![ZERO; n.pow(4)];
        for_each_index(n, |i, j, k, l| {
            let delta = (i == j && k == l) as u8 + (i == l && k == j) as u8;
            data[flat(n, i, j, k, l)] = Complex64::new(0.5 * c * delta as f64, 0.0);
        });
        Ok(KahlerTensor(CurvatureTensor { n, data }))
    }

    /// `R[i][i][i][i] = values[i]`, all other entries zero.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite diagonal value"));
        }
        let mut data = vec![ZERO; n.pow(4)];
        for (i, &a) in values.iter().enumerate() {
            data[flat(n, i, i, i, i)] = Complex64::new(a, 0.0);
        }
        Ok(KahlerTensor(CurvatureTensor { n, data }))
    }

    /// `Ĥ = hermitize(G)` on `Sym²V` with `G` i.i.d. standard complex Gaussian.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = sym2_dim(n);
        let g = ComplexMatrix::from_fn(m, m, |_, _| standard_complex_normal(&mut rng));
        Self::from_sym2(n, &hermitize(&g)?)
    }

    pub fn tensor(&self) -> &CurvatureTensor {
        &self.0
    }

    pub fn into_tensor(self) -> CurvatureTensor {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }

    /// Bisectional curvature; real for Kähler tensors.
    pub fn bisectional(&self, u: &[Complex64], v: &[Complex64]) -> Result<f64> {
        let b = self.0.bisectional(u, v)?;
        debug_assert!(b.im.abs() <= 1e-10 * (1.0 + b.re.abs()));
        Ok(b.re)
    }

    /// The Ricci form `r = r1 = r2 = r3 = r4`.
    pub fn ricci(&self) -> HermitianForm {
        self.0.ricci_set().r1
    }
}

impl AsRef<CurvatureTensor> for KahlerTensor {
    fn as_ref(&self) -> &CurvatureTensor {
        &self.0
    }
}

/// `R[i][j][k][l] = w[i][k]·conj(w[j][l])` for antisymmetric `w`: a rank-one
/// positive form supported on `⋀²V`, with vanishing holomorphic sectional
/// curvature.
pub fn wedge_rank_one(n: usize, w: &ComplexMatrix) -> Result<CurvatureTensor> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if w.rows() != n || w.cols() != n {
        return Err(Error::Dimension { expected: n, got: w.rows().max(w.cols()) });
    }
    for i in 0..n {
        for k in 0..n {
            if (w[(i, k)] + w[(k, i)]).norm() > SYM_TOL {
                return Err(Error::invalid("w is not antisymmetric"));
            }
        }
    }
    let mut data = vec![ZERO; n.pow(4)];
    for_each_index(n, |i, j, k, l| {
        data[flat(n, i, j, k, l)] = w[(i, k)] * w[(j, l)].conj();
    });
    Ok(CurvatureTensor { n, data })
}

/// Random antisymmetric `w` with standard complex Gaussian upper entries.
pub fn random_antisymmetric(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for k in (i + 1)..n {
            let z = standard_complex_normal(&mut rng);
            w[(i, k)] = z;
            w[(k, i)] = -z;
        }
    }
    w
}

/// The four Ricci contractions of a curvature tensor:
/// `r1[k][l] = Σ_j R[j][j][k][l]`, `r2[k][l] = Σ_j R[j][l][k][j]`,
/// `r3[k][l] = Σ_j R[k][l][j][j]`, `r4[k][l] = Σ_j R[k][j][j][l]`,
/// and the scalar curvatures `s1 = Σ R[j][j][k][k]`, `s2 = Σ R[j][k][k][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciSet {
    pub r1: HermitianForm,
    pub r2: ComplexMatrix,
    pub r3: HermitianForm,
    pub r4: ComplexMatrix,
    pub s1: f64,
    pub s2: f64,
}

impl RicciSet {
    pub fn sum(&self) -> ComplexMatrix {
        &(&(self.r1.matrix() + &self.r2) + self.r3.matrix()) + &self.r4
    }
}

/// `q` written in the block basis `Sym²V ⊕ ⋀²V`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    n: usize,
    pub q_sym: HermitianForm,
    pub q_wedge: HermitianForm,
    /// Rows indexed by the `Sym²V` basis, columns by the `⋀²V` basis.
    pub q_cross: ComplexMatrix,
}

impl BlockDecomposition {
    /// Reassembles `f` in the standard basis of `V ⊗ V`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let bs = sym2_basis(self.n);
        let bw = wedge_basis(self.n);
        let sym = &(&bs * self.q_sym.matrix()) * &bs.transpose();
        let wedge = &(&bw * self.q_wedge.matrix()) * &bw.transpose();
        let cross = &(&bs * &self.q_cross) * &bw.transpose();
        &(&(&sym + &wedge) + &cross) + &cross.adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorNorms {
    /// `|R|² = Σ |R[i][j][k][l]|²`
    pub norm_r_sq: f64,
    pub norm_r1_sq: f64,
    pub s1: f64,
    pub s2: f64,
    /// `|R_{Sym²V}|²`
    pub norm_rsym_sq: f64,
    /// `|r1 + r2 + r3 + r4|²`
    pub norm_ricci_sum_sq: f64,
}

pub fn sym2_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

pub fn wedge_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Columns are the orthonormal basis `e_i⊗e_i` and `(e_i⊗e_j + e_j⊗e_i)/√2`
/// of `Sym²V`, pairs `i ≤ j` in lexicographic order.
pub fn sym2_basis(n: usize) -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(n * n, sym2_dim(n));
    let mut col = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                b[(i * n + i, col)] = Complex64::new(1.0, 0.0);
            } else {
                b[(i * n + j, col)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
                b[(j * n + i, col)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            }
            col += 1;
        }
    }
    b
}

/// Columns are the orthonormal basis `(e_i⊗e_j − e_j⊗e_i)/√2`, `i < j`, of `⋀²V`.
pub fn wedge_basis(n: usize) -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(n * n, wedge_dim(n));
    let mut col = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            b[(i * n + j, col)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            b[(j * n + i, col)] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
            col += 1;
        }
    }
    b
}

#[inline]
fn flat(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

fn for_each_index(n: usize, mut f: impl FnMut(usize, usize, usize, usize)) {
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    f(i, j, k, l);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_example() -> KahlerTensor {
        KahlerTensor::diagonal(&[1.0, 2.0]).unwrap()
    }

    fn unit_wedge() -> CurvatureTensor {
        let mut w = ComplexMatrix::zeros(2, 2);
        w[(0, 1)] = c(1.0, 0.0);
        w[(1, 0)] = c(-1.0, 0.0);
        wedge_rank_one(2, &w).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn from_entries_examples() {
        let r = CurvatureTensor::from_entries(1, vec![c(3.0, 0.0)]).unwrap();
        assert_eq!(r.hsc(&[c(0.0, 1.0)]).unwrap(), 3.0);

        let mut entries = vec![ZERO; 16];
        entries[0] = c(1.0, 0.0);
        entries[15] = c(2.0, 0.0);
        let r = CurvatureTensor::from_entries(2, entries).unwrap();
        assert!(r.is_kahler(0.0).0);
        assert_eq!(&r, diag_example().tensor());

        let mut entries = vec![ZERO; 16];
        entries[flat(2, 0, 1, 0, 0)] = c(1.0, 0.0);
        match CurvatureTensor::from_entries(2, entries) {
            Err(Error::InvalidTensor { residual, .. }) => assert_eq!(residual, 1.0),
            other => panic!("expected invalid tensor, got {other:?}"),
        }
        assert!(CurvatureTensor::from_entries(0, vec![]).is_err());
        assert!(matches!(CurvatureTensor::from_entries(2, vec![ZERO; 15]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn from_entries_symmetrizes_within_tolerance() {
        let mut entries = vec![ZERO; 16];
        entries[flat(2, 0, 1, 0, 1)] = c(1.0, 1e-11);
        entries[flat(2, 1, 0, 1, 0)] = c(1.0, 0.0);
        let r = CurvatureTensor::from_entries(2, entries).unwrap();
        assert_eq!(r.get(0, 1, 0, 1), r.get(1, 0, 1, 0).conj());
    }

    #[test]
    fn kahler_from_sym2_examples() {
        let zero = KahlerTensor::from_sym2(3, &HermitianForm::zeros(6)).unwrap();
        assert!(zero.tensor().entries().iter().all(|z| *z == ZERO));

        let h = HermitianForm::new(ComplexMatrix::from_real_diagonal(&[4.5])).unwrap();
        let r = KahlerTensor::from_sym2(1, &h).unwrap();
        assert_eq!(r.tensor().get(0, 0, 0, 0), c(4.5, 0.0));

        let h = HermitianForm::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 2.0])).unwrap();
        let r = KahlerTensor::from_sym2(2, &h).unwrap();
        assert!(max_diff(r.tensor().form().matrix(), diag_example().tensor().form().matrix()) < 1e-15);
        let v = [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)];
        assert_relative_eq!(r.tensor().hsc(&v).unwrap(), 0.25 + 0.5, max_relative = 1e-14);

        assert!(matches!(KahlerTensor::from_sym2(2, &HermitianForm::zeros(4)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn is_kahler_examples() {
        for seed in 0..5 {
            assert!(KahlerTensor::random(3, seed).unwrap().tensor().is_kahler(1e-14).0);
        }
        assert!(KahlerTensor::constant_hsc(3, 1.5).unwrap().tensor().is_kahler(0.0).0);
        let (ok, residual) = unit_wedge().is_kahler(1e-12);
        assert!(!ok);
        assert_eq!(residual, 2.0);
        assert!(KahlerTensor::new(unit_wedge(), 1e-10).is_err());
    }

    #[test]
    fn constant_hsc_examples() {
        let r = KahlerTensor::constant_hsc(1, 2.0).unwrap();
        assert_eq!(r.tensor().get(0, 0, 0, 0), c(2.0, 0.0));
        let r = KahlerTensor::constant_hsc(3, 2.0).unwrap();
        assert_eq!(r.tensor().ricci_set().s1, 12.0);
        let r = KahlerTensor::constant_hsc(2, 1.0).unwrap();
        assert_eq!(r.tensor().norms().norm_r_sq, 3.0);

        let r = KahlerTensor::constant_hsc(3, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let v = random_vec(&mut rng, 3);
            assert_relative_eq!(r.tensor().hsc(&v).unwrap(), 5.0, max_relative = 1e-13);
            assert_relative_eq!(r.bisectional(&v, &v).unwrap(), 5.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn wedge_examples() {
        let r = unit_wedge();
        let ricci = r.ricci_set();
        let id = ComplexMatrix::identity(2);
        let neg = id.scale(c(-1.0, 0.0));
        assert_eq!(ricci.r1.matrix(), &id);
        assert_eq!(ricci.r3.matrix(), &id);
        assert_eq!(ricci.r2, neg);
        assert_eq!(ricci.r4, neg);
        assert_eq!((ricci.s1, ricci.s2), (2.0, -2.0));
        assert_eq!(ricci.sum().max_abs(), 0.0);

        let zero = wedge_rank_one(3, &ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(zero.entries().iter().all(|z| *z == ZERO));
        assert!(wedge_rank_one(2, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn wedge_hsc_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=4 {
            let r = wedge_rank_one(n, &random_antisymmetric(n, n as u64)).unwrap();
            for _ in 0..100 {
                let v = random_vec(&mut rng, n);
                assert!(r.hsc(&v).unwrap().abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn hsc_examples() {
        let r = diag_example();
        assert_eq!(r.tensor().hsc(&[c(1.0, 0.0), ZERO]).unwrap(), 1.0);
        let s = FRAC_1_SQRT_2;
        assert_relative_eq!(r.tensor().hsc(&[c(s, 0.0), c(s, 0.0)]).unwrap(), 0.75, max_relative = 1e-14);
        assert!(r.tensor().hsc(&[ZERO, ZERO]).is_err());
        assert!(matches!(r.tensor().hsc(&[ZERO]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn bisectional_examples() {
        let r = diag_example();
        assert_eq!(r.bisectional(&[c(1.0, 0.0), ZERO], &[ZERO, c(1.0, 0.0)]).unwrap(), 0.0);
        assert!(r.bisectional(&[ZERO, ZERO], &[ZERO, c(1.0, 0.0)]).is_err());

        let h = CurvatureTensor::random_hermitian(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_vec(&mut rng, 3);
        let v = random_vec(&mut rng, 3);
        let lambda = c(-1.7, 0.3);
        let scaled: Vec<_> = u.iter().map(|z| z * lambda).collect();
        let b = h.bisectional(&u, &v).unwrap();
        assert!((h.bisectional(&scaled, &v).unwrap() - b).norm() <= 1e-13 * (1.0 + b.norm()));
    }

    #[test]
    fn hsc_is_real_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let r = CurvatureTensor::random_hermitian(n, 100 + n as u64).unwrap();
            for _ in 0..50 {
                let v = random_vec(&mut rng, n);
                let z = r.contract(&v, &v, &v, &v);
                assert!(z.im.abs() <= 1e-10 * (1.0 + z.re.abs()));
            }
        }
    }

    #[test]
    fn ricci_examples() {
        for n in 1..=4 {
            let c0 = 3.0;
            let ricci = KahlerTensor::constant_hsc(n, c0).unwrap().tensor().ricci_set();
            let expect = ComplexMatrix::identity(n).scale(c(c0 * (n as f64 + 1.0) / 2.0, 0.0));
            assert!(max_diff(ricci.r1.matrix(), &expect) < 1e-14);
        }
        let zero = CurvatureTensor::zero(3).unwrap().ricci_set();
        assert_eq!(zero.r1.matrix().max_abs() + zero.r2.max_abs() + zero.s1.abs() + zero.s2.abs(), 0.0);
    }

    #[test]
    fn ricci_invariants_random() {
        for n in 1..=4 {
            for seed in 0..5 {
                let ricci = CurvatureTensor::random_hermitian(n, seed).unwrap().ricci_set();
                assert!(max_diff(&ricci.r2, &ricci.r4.adjoint()) < 1e-12);
                assert!((ricci.r1.matrix().trace().re - ricci.s1).abs() < 1e-12);
                assert!((ricci.r3.matrix().trace().re - ricci.s1).abs() < 1e-12);
                assert!((ricci.r2.trace() - c(ricci.s2, 0.0)).norm() < 1e-12);
                assert!((ricci.r4.trace() - c(ricci.s2, 0.0)).norm() < 1e-12);

                let k = KahlerTensor::random(n, seed).unwrap().tensor().ricci_set();
                assert!(max_diff(k.r1.matrix(), &k.r2) < 1e-12);
                assert!(max_diff(k.r1.matrix(), k.r3.matrix()) < 1e-12);
                assert!(max_diff(k.r1.matrix(), &k.r4) < 1e-12);
                assert!((k.s1 - k.s2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_decomposition_examples() {
        for n in 1..=4 {
            let k = KahlerTensor::random(n, 11).unwrap();
            let blocks = k.tensor().block_decomposition();
            assert!(blocks.q_wedge.matrix().max_abs() < 1e-14);
            assert!(blocks.q_cross.max_abs() < 1e-14);
            let norms = k.tensor().norms();
            assert_relative_eq!(norms.norm_rsym_sq, norms.norm_r_sq, max_relative = 1e-10);
        }
        let wedge = unit_wedge().block_decomposition();
        assert_eq!(wedge.q_sym.matrix().max_abs(), 0.0);
        assert_eq!(wedge.q_cross.max_abs(), 0.0);
        let diag = diag_example().tensor().block_decomposition();
        assert_relative_eq!(diag.q_sym.matrix().norm_sq(), 5.0, max_relative = 1e-15);
    }

    #[test]
    fn block_decomposition_preserves_norm_and_reassembles() {
        for n in 1..=4 {
            for seed in 0..4 {
                let r = CurvatureTensor::random_hermitian(n, seed).unwrap();
                let blocks = r.block_decomposition();
                let total = blocks.q_sym.matrix().norm_sq()
                    + blocks.q_wedge.matrix().norm_sq()
                    + 2.0 * blocks.q_cross.norm_sq();
                let norm = r.form().matrix().norm_sq();
                assert_relative_eq!(total, norm, max_relative = 1e-12);
                assert!(max_diff(&blocks.reassemble(), r.form().matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn sym2_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            let m = sym2_dim(n);
            let g = ComplexMatrix::from_fn(m, m, |_, _| standard_complex_normal(&mut rng));
            let h = hermitize(&g).unwrap();
            let back = KahlerTensor::from_sym2(n, &h).unwrap().sym2_quotient();
            assert!(max_diff(back.matrix(), h.matrix()) < 1e-12);
        }
    }

    #[test]
    fn norms_examples() {
        let norms = diag_example().tensor().norms();
        assert_eq!((norms.norm_r_sq, norms.norm_r1_sq, norms.s1), (5.0, 5.0, 3.0));
        let norms = KahlerTensor::constant_hsc(2, 1.0).unwrap().tensor().norms();
        assert_eq!((norms.norm_r_sq, norms.norm_r1_sq, norms.s1), (3.0, 4.5, 3.0));
        let norms = CurvatureTensor::zero(2).unwrap().norms();
        assert_eq!(norms, TensorNorms {
            norm_r_sq: 0.0,
            norm_r1_sq: 0.0,
            s1: 0.0,
            s2: 0.0,
            norm_rsym_sq: 0.0,
            norm_ricci_sum_sq: 0.0
        });
    }

    #[test]
    fn random_generators_are_deterministic() {
        assert_eq!(CurvatureTensor::random_hermitian(3, 7).unwrap(), CurvatureTensor::random_hermitian(3, 7).unwrap());
        assert_ne!(CurvatureTensor::random_hermitian(3, 7).unwrap(), CurvatureTensor::random_hermitian(3, 8).unwrap());
        assert_eq!(KahlerTensor::random(3, 7).unwrap(), KahlerTensor::random(3, 7).unwrap());
        let r = CurvatureTensor::random_hermitian(3, 7).unwrap();
        assert!(CurvatureTensor::from_entries(3, r.entries().to_vec()).is_ok());
        assert_eq!(r.pair_residual().0, 0.0);
    }

    #[test]
    fn frame_change_preserves_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            let r = CurvatureTensor::random_hermitian(n, 30 + n as u64).unwrap();
            // e_i = Σ_a ε_a A[a][i]
            let a = ComplexMatrix::from_fn(n, n, |i, j| {
                standard_complex_normal(&mut rng) * 0.2 + if i == j { c(1.0, 0.0) } else { ZERO }
            });
            let gram = HermitianForm::new(&a.transpose() * &a.adjoint().transpose()).unwrap();
            let mut entries = vec![ZERO; n.pow(4)];
            for_each_index(n, |i, j, k, l| {
                let mut acc = ZERO;
                for_each_index(n, |p, q, s, t| {
                    acc += a[(p, i)] * a[(q, j)].conj() * a[(s, k)] * a[(t, l)].conj() * r.get(p, q, s, t);
                });
                entries[flat(n, i, j, k, l)] = acc;
            });
            let back = CurvatureTensor::from_entries_in_frame(n, entries, &gram).unwrap();
            let (x, y) = (r.norms(), back.norms());
            assert_relative_eq!(x.norm_r_sq, y.norm_r_sq, max_relative = 1e-10);
            assert_relative_eq!(x.norm_r1_sq, y.norm_r1_sq, max_relative = 1e-10);
            assert_relative_eq!(x.s1, y.s1, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(x.s2, y.s2, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(x.norm_ricci_sum_sq, y.norm_ricci_sum_sq, max_relative = 1e-10);
        }
    }
}
