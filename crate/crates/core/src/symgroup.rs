//! Slot permutations `W_σ` of `V^{⊗d}`, the symmetrizer `Π_d`, partial traces
//! on `End(V ⊗ V)`, and the 24 traces `tr(f ⊗ f ∘ W_σ)` for `σ ∈ S₄`.
//!
//! `W_σ` puts the content of input slot `σ(p)` into output slot `p`:
//! `W_σ(v_0 ⊗ ⋯ ⊗ v_{d−1}) = v_{σ(0)} ⊗ ⋯ ⊗ v_{σ(d−1)}`. With composition
//! `(σ∘τ)(p) = σ(τ(p))` this gives `W_σ W_τ = W_{τ∘σ}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::linalg::{checked_pow, decode_into, encode_unchecked, frobenius_inner, ComplexMatrix, SYM_TOL, ONE, ZERO};

/// Cap on the number of entries of any dense operator built here.
pub const DENSE_CAP: usize = 1 << 26;

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if x >= d {
                return Err(Error::Range { value: x, bound: d });
            }
            if core::mem::replace(&mut seen[x], true) {
                return Err(Error::invalid("permutation images are not distinct"));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(d: usize) -> Self {
        Permutation { images: (0..d).collect() }
    }

    /// Swaps slots `a` and `b`.
    pub fn transposition(d: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..d).collect();
        if a >= d || b >= d {
            return Err(Error::Range { value: a.max(b), bound: d });
        }
        images.swap(a, b);
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.images[p]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (p, &x) in self.images.iter().enumerate() {
            inv[x] = p;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. `p ↦ self(other(p))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::Dimension { expected: self.degree(), got: other.degree() });
        }
        Ok(Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() })
    }

    /// All `d!` permutations in lexicographic order of their image lists.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..d).collect();
        loop {
            out.push(Permutation { images: current.clone() });
            // next lexicographic permutation
            let Some(i) = (1..d).rev().find(|&i| current[i - 1] < current[i]) else {
                return out;
            };
            let j = (i..d).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
            current.swap(i - 1, j);
            current[i..].reverse();
        }
    }

    /// Dense matrix of `W_σ` on `V^{⊗d}`, `dim V = n`.
    pub fn matrix(&self, n: usize) -> Result<ComplexMatrix> {
        let d = self.degree();
        let dim = dense_dim(n, d)?;
        let mut w = ComplexMatrix::zeros(dim, dim);
        let mut input = vec![0; d];
        let mut output = vec![0; d];
        for col in 0..dim {
            decode_into(col, n, &mut input);
            self.permute_digits(&input, &mut output);
            w[(encode_unchecked(&output, n), col)] = ONE;
        }
        Ok(w)
    }

    #[inline]
    fn permute_digits(&self, input: &[usize], output: &mut [usize]) {
        for (p, out) in output.iter_mut().enumerate() {
            *out = input[self.images[p]];
        }
    }
}

/// Applies `W_σ` to a tensor in `V^{⊗d}` given by its big-endian coordinates.
pub fn apply_permutation(sigma: &Permutation, n: usize, tensor: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = sigma.degree();
    let dim = checked_pow(n, d).ok_or(Error::Resource { needed: u128::MAX, cap: DENSE_CAP as u128 })?;
    if tensor.len() != dim {
        return Err(Error::Dimension { expected: dim, got: tensor.len() });
    }
    let mut out = vec![ZERO; dim];
    let mut input = vec![0; d];
    let mut output = vec![0; d];
    for (flat, &value) in tensor.iter().enumerate() {
        decode_into(flat, n, &mut input);
        sigma.permute_digits(&input, &mut output);
        out[encode_unchecked(&output, n)] = value;
    }
    Ok(out)
}

/// An endomorphism of `V^{⊗d}` as an `n^d × n^d` matrix indexed by
/// big-endian multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorEndomorphism {
    n: usize,
    d: usize,
    matrix: ComplexMatrix,
}

impl TensorEndomorphism {
    pub fn new(n: usize, d: usize, matrix: ComplexMatrix) -> Result<Self> {
        let dim = checked_pow(n, d).ok_or(Error::Resource { needed: u128::MAX, cap: DENSE_CAP as u128 })?;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Dimension { expected: dim, got: matrix.rows().max(matrix.cols()) });
        }
        Ok(TensorEndomorphism { n, d, matrix })
    }

    /// `f[(i,k)][(j,l)] = R[i][j][k][l]`.
    pub fn from_curvature(r: &CurvatureTensor) -> Self {
        TensorEndomorphism { n: r.dim(), d: 2, matrix: r.form().into_matrix() }
    }

    pub fn identity(n: usize, d: usize) -> Result<Self> {
        let dim = dense_dim(n, d)?;
        Ok(TensorEndomorphism { n, d, matrix: ComplexMatrix::identity(dim) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// `Π_d = (1/d!) Σ_σ W_σ` as a dense matrix.
pub fn projector_sym(n: usize, d: usize) -> Result<TensorEndomorphism> {
    let dim = dense_dim(n, d)?;
    let perms = Permutation::all(d);
    let order = perms.len() as f64;
    let mut counts = vec![0u32; dim * dim];
    let mut input = vec![0; d];
    let mut output = vec![0; d];
    for col in 0..dim {
        decode_into(col, n, &mut input);
        for sigma in &perms {
            sigma.permute_digits(&input, &mut output);
            counts[encode_unchecked(&output, n) * dim + col] += 1;
        }
    }
    let m = ComplexMatrix::from_fn(dim, dim, |row, col| Complex64::new(counts[row * dim + col] as f64 / order, 0.0));
    Ok(TensorEndomorphism { n, d, matrix: m })
}

/// `Π_d x` without forming the dense matrix.
pub fn apply_projector(n: usize, d: usize, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let perms = Permutation::all(d);
    let mut out: Option<Vec<Complex64>> = None;
    for sigma in &perms {
        let y = apply_permutation(sigma, n, x)?;
        match out.as_mut() {
            None => out = Some(y),
            Some(acc) => acc.iter_mut().zip(&y).for_each(|(a, b)| *a += b),
        }
    }
    let scale = 1.0 / perms.len() as f64;
    Ok(out.unwrap_or_default().into_iter().map(|z| z * scale).collect())
}

/// Which pair of slots of `f[(a,b)][(c,d)]` is contracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartialTrace {
    /// `tr13[k][l] = Σ_j f[(j,k)][(j,l)]`
    T13,
    /// `tr14[k][l] = Σ_j f[(j,k)][(l,j)]`
    T14,
    /// `tr23[k][l] = Σ_j f[(k,j)][(j,l)]`
    T23,
    /// `tr24[k][l] = Σ_j f[(k,j)][(l,j)]`
    T24,
}

pub fn partial_trace(f: &TensorEndomorphism, which: PartialTrace) -> Result<ComplexMatrix> {
    if f.d != 2 {
        return Err(Error::Dimension { expected: 2, got: f.d });
    }
    let n = f.n;
    let at = |a: usize, b: usize, c: usize, d: usize| f.matrix[(a * n + b, c * n + d)];
    Ok(ComplexMatrix::from_fn(n, n, |k, l| {
        (0..n)
            .map(|j| match which {
                PartialTrace::T13 => at(j, k, j, l),
                PartialTrace::T14 => at(j, k, l, j),
                PartialTrace::T23 => at(k, j, j, l),
                PartialTrace::T24 => at(k, j, l, j),
            })
            .sum()
    }))
}

/// The 24 rows of the trace table, keyed by the image of the letters
/// `(jklm)`. In row `(abcd)` the summand is `f_{ab,jk} f_{cd,lm}` with
/// `f_{xy,zw} = f[(x,y)][(z,w)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceRow(usize);

const ROW_KEYS: [&str; 24] = [
    "(jklm)", "(jkml)", "(jlkm)", "(jlmk)", "(jmkl)", "(jmlk)", "(kjlm)", "(kjml)", "(kljm)", "(klmj)", "(kmjl)",
    "(kmlj)", "(ljkm)", "(ljmk)", "(lkjm)", "(lkmj)", "(lmjk)", "(lmkj)", "(mjkl)", "(mjlk)", "(mkjl)", "(mklj)",
    "(mljk)", "(mlkj)",
];

impl TraceRow {
    pub fn all() -> impl Iterator<Item = TraceRow> {
        (0..24).map(TraceRow)
    }

    pub fn key(self) -> &'static str {
        ROW_KEYS[self.0]
    }

    pub fn from_key(key: &str) -> Option<TraceRow> {
        ROW_KEYS.iter().position(|k| *k == key).map(TraceRow)
    }

    /// Positions in `jklm` of the row's letters: the row reads the summation
    /// indices in this order.
    pub fn word(self) -> [usize; 4] {
        let bytes = &ROW_KEYS[self.0].as_bytes()[1..5];
        let mut out = [0; 4];
        for (slot, b) in out.iter_mut().zip(bytes) {
            *slot = match b {
                b'j' => 0,
                b'k' => 1,
                b'l' => 2,
                _ => 3,
            };
        }
        out
    }

    /// The `σ` for which the row equals `tr((f ⊗ f) · W_σ)`.
    ///
    /// The row pairs row multi-index `Q∘word` of `f ⊗ f` with column `Q`, so
    /// `W_σ` must send `e_{Q∘word}` to `e_Q`; with the slot convention of this
    /// module that is `σ = word⁻¹`.
    pub fn permutation(self) -> Permutation {
        Permutation { images: self.word().to_vec() }.inverse()
    }
}

/// Closed-form evaluation of every row from partial traces and Frobenius
/// pairings; `f` must be Hermitian.
#[derive(Debug, Clone)]
pub struct TraceTable {
    f: ComplexMatrix,
    f_swap: ComplexMatrix,
    swap_f: ComplexMatrix,
    trace_f: Complex64,
    tr13: ComplexMatrix,
    tr14: ComplexMatrix,
    tr23: ComplexMatrix,
    tr24: ComplexMatrix,
}

impl TraceTable {
    pub fn new(f: &TensorEndomorphism) -> Result<Self> {
        if f.d != 2 {
            return Err(Error::Dimension { expected: 2, got: f.d });
        }
        let (residual, row, col) = f.matrix.hermitian_residual();
        if residual > SYM_TOL {
            return Err(Error::NotHermitian { row, col, residual });
        }
        let swap = Permutation::transposition(2, 0, 1)?.matrix(f.n)?;
        Ok(TraceTable {
            f: f.matrix.clone(),
            f_swap: &f.matrix * &swap,
            swap_f: &swap * &f.matrix,
            trace_f: f.trace(),
            tr13: partial_trace(f, PartialTrace::T13)?,
            tr14: partial_trace(f, PartialTrace::T14)?,
            tr23: partial_trace(f, PartialTrace::T23)?,
            tr24: partial_trace(f, PartialTrace::T24)?,
        })
    }

    /// `⟨a, b̄⟩ = Σ conj(b_xy) a_xy`.
    fn pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
        frobenius_inner(b, a).expect("same shape")
    }

    pub fn row(&self, row: TraceRow) -> Complex64 {
        let (t13, t14, t23, t24) = (&self.tr13, &self.tr14, &self.tr23, &self.tr24);
        let tr_f = self.trace_f;
        let tr_t14 = t14.trace();
        let pair = Self::pair;
        match row.key() {
            "(jklm)" => tr_f * tr_f,
            "(jkml)" => tr_t14 * tr_f,
            "(jlkm)" => pair(t24, t13),
            "(jlmk)" => pair(t14, t13),
            "(jmkl)" => pair(t23, t13),
            "(jmlk)" => pair(t13, t13),
            "(kjlm)" => tr_t14 * tr_f,
            "(kjml)" => tr_t14 * tr_t14,
            "(kljm)" => pair(t24, t23),
            "(klmj)" => pair(t14, t23),
            "(kmjl)" => pair(t23, t23),
            "(kmlj)" => pair(t13, t23),
            "(ljkm)" => pair(t24, t14),
            "(ljmk)" => pair(t14, t14),
            "(lkjm)" => pair(t24, t24),
            "(lkmj)" => pair(t14, t24),
            "(lmjk)" => pair(&self.f, &self.f),
            "(lmkj)" => pair(&self.f_swap, &self.f),
            "(mjkl)" => pair(t23, t14),
            "(mjlk)" => pair(t13, t14),
            "(mkjl)" => pair(t23, t24),
            "(mklj)" => pair(t13, t24),
            "(mljk)" => pair(&self.f, &self.swap_f),
            "(mlkj)" => pair(&self.f_swap, &self.swap_f),
            other => unreachable!("unknown trace row {other}"),
        }
    }

    /// `tr(f ⊗ f ∘ Π₄)`: the average of the 24 rows.
    pub fn trace_pi4(&self) -> Complex64 {
        TraceRow::all().map(|r| self.row(r)).sum::<Complex64>() / 24.0
    }
}

/// Closed-form route for one row of the table.
pub fn trace_f_tensor_f_sigma(f: &TensorEndomorphism, row: TraceRow) -> Result<Complex64> {
    Ok(TraceTable::new(f)?.row(row))
}

/// Brute-force route: builds `f ⊗ f` and `W_σ` densely on `V^{⊗4}` and
/// returns `tr((f ⊗ f) · W_σ)`.
#[derive(Debug, Clone)]
pub struct TraceOracle {
    n: usize,
    ff: ComplexMatrix,
}

impl TraceOracle {
    pub fn new(f: &TensorEndomorphism) -> Result<Self> {
        if f.d != 2 {
            return Err(Error::Dimension { expected: 2, got: f.d });
        }
        dense_dim(f.n, 4)?;
        Ok(TraceOracle { n: f.n, ff: f.matrix.kron(&f.matrix) })
    }

    pub fn trace_with(&self, sigma: &Permutation) -> Result<Complex64> {
        if sigma.degree() != 4 {
            return Err(Error::Dimension { expected: 4, got: sigma.degree() });
        }
        let w = sigma.matrix(self.n)?;
        let dim = w.rows();
        // tr(A W) = Σ_{P,Q} A[P][Q] W[Q][P]
        let mut acc = ZERO;
        for q in 0..dim {
            for p in 0..dim {
                let wqp = w[(q, p)];
                if wqp != ZERO {
                    acc += self.ff[(p, q)] * wqp;
                }
            }
        }
        Ok(acc)
    }

    pub fn row(&self, row: TraceRow) -> Result<Complex64> {
        self.trace_with(&row.permutation())
    }
}

pub fn trace_f_tensor_f_sigma_oracle(f: &TensorEndomorphism, row: TraceRow) -> Result<Complex64> {
    TraceOracle::new(f)?.row(row)
}

/// `tr(f ⊗ f ∘ Π₄)` via the closed-form rows; real for Hermitian `f`.
pub fn trace_f_pi4(f: &TensorEndomorphism) -> Result<f64> {
    let value = TraceTable::new(f)?.trace_pi4();
    debug_assert!(value.im.abs() <= 1e-10 * (1.0 + value.re.abs()));
    Ok(value.re)
}

fn dense_dim(n: usize, d: usize) -> Result<usize> {
    let dim = checked_pow(n, d).ok_or(Error::Resource { needed: u128::MAX, cap: DENSE_CAP as u128 })?;
    let entries = dim as u128 * dim as u128;
    if entries > DENSE_CAP as u128 {
        return Err(Error::Resource { needed: entries, cap: DENSE_CAP as u128 });
    }
    Ok(dim)
}
