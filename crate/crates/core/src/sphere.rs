//! Uniform sampling on the unit sphere of `Cⁿ`, Monte Carlo sphere averages,
//! and exact monomial moments.
//!
//! All integrals are normalized averages over the sphere; absolute volumes
//! never appear.
//!
//! The exact oracles below expand each integrand into monomials `v^α v̄^β`
//! and integrate term by term with
//! `E[v^α v̄^β] = δ_{αβ} α! (n−1)! / (n−1+|α|)!`. They never go through the
//! symmetrizer, so they are independent of the closed forms they check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::linalg::{checked_pow, decode_into, encode_unchecked, ComplexMatrix, ZERO};
use crate::symgroup::{binomial, projector_sym, DENSE_CAP};

/// Largest dimension the exact oracles accept.
pub const MAX_ORACLE_DIM: usize = 6;

/// Standard complex Gaussian, `E|z|² = 1`.
pub(crate) fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// A point drawn from the unitarily invariant measure on the unit sphere:
/// a normalized standard complex Gaussian vector.
pub fn sample_unit_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    assert!(n >= 1, "sphere dimension must be at least 1");
    loop {
        let mut v: Vec<Complex64> = (0..n).map(|_| standard_complex_normal(rng)).collect();
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm > 0.0 {
            v.iter_mut().for_each(|z| *z /= norm);
            return v;
        }
    }
}

/// The RNG stream for sample `index` under `seed`: ChaCha8 keyed by the seed
/// with the sample index as stream number.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Mean and standard error of `values`, summed pairwise in index order.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let samples = values.len();
        if samples < 2 {
            return Err(Error::invalid("a Monte Carlo estimate needs at least 2 samples"));
        }
        let mean = pairwise_sum(values) / samples as f64;
        let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
        let variance = pairwise_sum(&sq) / (samples - 1) as f64;
        Ok(McEstimate { mean, std_error: libm::sqrt(variance / samples as f64), samples, seed })
    }

    /// `|mean − target|` measured in standard errors (0 when both are exact).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if self.std_error == 0.0 {
            if diff == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            diff / self.std_error
        }
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Integrand values for sample indices `range`. Each sample draws `points`
/// independent unit vectors of `Cⁿ` from its own stream and hands them to
/// `integrand` concatenated.
pub fn mc_values<F>(n: usize, points: usize, seed: u64, range: core::ops::Range<usize>, integrand: F) -> Vec<f64>
where
    F: Fn(&[Complex64]) -> f64,
{
    let mut buf = Vec::with_capacity(n * points);
    range
        .map(|s| {
            let mut rng = sample_stream(seed, s as u64);
            buf.clear();
            for _ in 0..points {
                buf.extend(sample_unit_sphere(n, &mut rng));
            }
            integrand(&buf)
        })
        .collect()
}

/// Monte Carlo average of `integrand` over the unit sphere of `Cⁿ`.
pub fn mc_expectation<F>(integrand: F, n: usize, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&[Complex64]) -> f64,
{
    mc_expectation_product(integrand, n, 1, samples, seed)
}

/// Monte Carlo average over a product of `points` unit spheres of `Cⁿ`.
pub fn mc_expectation_product<F>(integrand: F, n: usize, points: usize, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&[Complex64]) -> f64,
{
    if samples < 2 {
        return Err(Error::invalid("a Monte Carlo estimate needs at least 2 samples"));
    }
    McEstimate::from_values(&mc_values(n, points, seed, 0..samples, integrand), seed)
}

/// Exponent vectors of a monomial `v^α v̄^β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSpec {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl MomentSpec {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::Dimension { expected: alpha.len(), got: beta.len() });
        }
        Ok(MomentSpec { alpha, beta })
    }

    /// Multiplicity vectors of the index lists `holo` (for `v`) and `anti`
    /// (for `v̄`).
    pub fn from_indices(n: usize, holo: &[usize], anti: &[usize]) -> Self {
        let mut alpha = vec![0; n];
        let mut beta = vec![0; n];
        holo.iter().for_each(|&i| alpha[i] += 1);
        anti.iter().for_each(|&j| beta[j] += 1);
        MomentSpec { alpha, beta }
    }
}

/// `(1/Vol S) ∫ v^α v̄^β dμ = δ_{αβ} α! (n−1)! / (n−1+|α|)!`.
pub fn exact_moment(n: usize, spec: &MomentSpec) -> f64 {
    if spec.alpha != spec.beta {
        return 0.0;
    }
    debug_assert_eq!(spec.alpha.len(), n);
    moment_from_counts(n, &spec.alpha)
}

fn moment_from_counts(n: usize, counts: &[u32]) -> f64 {
    let degree: u32 = counts.iter().sum();
    let numerator: u128 = counts.iter().map(|&a| factorial(a)).product();
    // (n−1+|α|)!/(n−1)! = n (n+1) ⋯ (n−1+|α|)
    let denominator: u128 = (0..degree as u128).map(|k| n as u128 + k).product();
    numerator as f64 / denominator as f64
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

/// Moments `E[Π_p v_{P_p} conj(v_{Q_p})]` of degree `d`, looked up by the
/// sorted holomorphic index tuple.
struct MomentTable {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl MomentTable {
    fn new(n: usize, d: usize) -> Self {
        let size = n.pow(d as u32);
        let mut values = vec![0.0; size];
        let mut digits = vec![0; d];
        for (flat, slot) in values.iter_mut().enumerate() {
            decode_into(flat, n, &mut digits);
            if digits.windows(2).all(|w| w[0] <= w[1]) {
                let mut counts = vec![0u32; n];
                digits.iter().for_each(|&i| counts[i] += 1);
                *slot = moment_from_counts(n, &counts);
            }
        }
        MomentTable { n, d, values }
    }

    #[inline]
    fn get(&self, holo: &mut [usize], anti: &mut [usize]) -> f64 {
        debug_assert_eq!(holo.len(), self.d);
        holo.sort_unstable();
        anti.sort_unstable();
        if holo != anti {
            return 0.0;
        }
        self.values[encode_unchecked(holo, self.n)]
    }
}

fn check_oracle_dim(n: usize) -> Result<()> {
    if n > MAX_ORACLE_DIM {
        return Err(Error::Resource { needed: (n as u128).pow(8), cap: (MAX_ORACLE_DIM as u128).pow(8) });
    }
    Ok(())
}

/// Exact `E[H(v)]` over the unit sphere.
pub fn exact_expectation_h(r: &CurvatureTensor) -> Result<f64> {
    let n = r.dim();
    check_oracle_dim(n)?;
    let table = MomentTable::new(n, 2);
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let m = table.get(&mut [i, k], &mut [j, l]);
                    if m != 0.0 {
                        acc += r.get(i, j, k, l) * m;
                    }
                }
            }
        }
    }
    Ok(acc.re)
}

/// Exact `E[H(v)²]`, summing all `n⁸` index tuples.
pub fn exact_expectation_h2(r: &CurvatureTensor) -> Result<f64> {
    let n = r.dim();
    check_oracle_dim(n)?;
    let table = MomentTable::new(n, 4);
    let entries = r.entries();
    let n4 = n.pow(4);
    let mut acc = ZERO;
    let mut a = [0usize; 4];
    let mut b = [0usize; 4];
    for x in 0..n4 {
        decode_into(x, n, &mut a);
        let rx = entries[x];
        if rx == ZERO {
            continue;
        }
        for y in 0..n4 {
            decode_into(y, n, &mut b);
            // R[i j k l]·R[i' j' k' l']: v-slots i, k, i', k'; v̄-slots j, l, j', l'
            let m = table.get(&mut [a[0], a[2], b[0], b[2]], &mut [a[1], a[3], b[1], b[3]]);
            if m != 0.0 {
                acc += rx * entries[y] * m;
            }
        }
    }
    Ok(acc.re)
}

/// Exact `E_{u,v}[B(u, v)²]` over a product of two independent spheres; the
/// moment factors into one degree-2 moment per sphere.
pub fn exact_expectation_b2(r: &CurvatureTensor) -> Result<f64> {
    let n = r.dim();
    check_oracle_dim(n)?;
    let table = MomentTable::new(n, 2);
    let entries = r.entries();
    let n4 = n.pow(4);
    let mut acc = ZERO;
    let mut a = [0usize; 4];
    let mut b = [0usize; 4];
    for x in 0..n4 {
        decode_into(x, n, &mut a);
        let rx = entries[x];
        if rx == ZERO {
            continue;
        }
        for y in 0..n4 {
            decode_into(y, n, &mut b);
            let mu = table.get(&mut [a[0], b[0]], &mut [a[1], b[1]]);
            if mu == 0.0 {
                continue;
            }
            let mv = table.get(&mut [a[2], b[2]], &mut [a[3], b[3]]);
            if mv != 0.0 {
                acc += rx * entries[y] * (mu * mv);
            }
        }
    }
    Ok(acc.re)
}

/// Exact `E_ξ[B(ξ, η)]` for a fixed direction `η`.
pub fn exact_expectation_b_mean(r: &CurvatureTensor, eta: &[Complex64]) -> Result<f64> {
    let n = r.dim();
    check_oracle_dim(n)?;
    if eta.len() != n {
        return Err(Error::Dimension { expected: n, got: eta.len() });
    }
    let eta_sq: f64 = eta.iter().map(|z| z.norm_sqr()).sum();
    if eta_sq == 0.0 {
        return Err(Error::invalid("zero vector"));
    }
    let table = MomentTable::new(n, 1);
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            let m = table.get(&mut [i], &mut [j]);
            if m == 0.0 {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    acc += r.get(i, j, k, l) * eta[k] * eta[l].conj() * m;
                }
            }
        }
    }
    Ok(acc.re / eta_sq)
}

/// `(1/Vol S) ∫ (v v*)^{⊗d} dμ` assembled entrywise from exact moments.
pub fn exact_projection_average(n: usize, d: usize) -> Result<ComplexMatrix> {
    let dim = dense_dim(n, d)?;
    let table = MomentTable::new(n, d);
    let mut p = vec![0; d];
    let mut q = vec![0; d];
    Ok(ComplexMatrix::from_fn(dim, dim, |row, col| {
        decode_into(row, n, &mut p);
        decode_into(col, n, &mut q);
        Complex64::new(table.get(&mut p, &mut q), 0.0)
    }))
}

/// Monte Carlo estimate of `(1/Vol S) ∫ (v v*)^{⊗d} dμ`.
pub fn mc_projection_average(n: usize, d: usize, samples: usize, seed: u64) -> Result<ComplexMatrix> {
    let dim = dense_dim(n, d)?;
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut acc = ComplexMatrix::zeros(dim, dim);
    let mut power = vec![ZERO; dim];
    let mut digits = vec![0; d];
    for s in 0..samples {
        let v = sample_unit_sphere(n, &mut sample_stream(seed, s as u64));
        for (flat, slot) in power.iter_mut().enumerate() {
            decode_into(flat, n, &mut digits);
            *slot = digits.iter().map(|&i| v[i]).product();
        }
        for row in 0..dim {
            for col in 0..dim {
                acc[(row, col)] += power[row] * power[col].conj();
            }
        }
    }
    Ok(acc.scale(Complex64::new(1.0 / samples as f64, 0.0)))
}

/// Frobenius norm of `average − Π_d / C(n+d−1, d)`.
pub fn projection_residual(n: usize, d: usize, average: &ComplexMatrix) -> Result<f64> {
    let pi = projector_sym(n, d)?;
    let scale = 1.0 / binomial(n + d - 1, d) as f64;
    let target = pi.matrix().scale(Complex64::new(scale, 0.0));
    if average.rows() != target.rows() {
        return Err(Error::Dimension { expected: target.rows(), got: average.rows() });
    }
    Ok(libm::sqrt((average - &target).norm_sq()))
}

/// Residual of the projection formula with the left side taken from exact
/// moments.
pub fn exact_projection_residual(n: usize, d: usize) -> Result<f64> {
    projection_residual(n, d, &exact_projection_average(n, d)?)
}

/// Residual of the projection formula with the left side estimated by Monte
/// Carlo.
pub fn mc_projection_residual(n: usize, d: usize, samples: usize, seed: u64) -> Result<f64> {
    projection_residual(n, d, &mc_projection_average(n, d, samples, seed)?)
}

fn dense_dim(n: usize, d: usize) -> Result<usize> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("n and d must be at least 1"));
    }
    let dim = checked_pow(n, d).ok_or(Error::Resource { needed: u128::MAX, cap: DENSE_CAP as u128 })?;
    let entries = (dim as u128) * (dim as u128);
    if entries > DENSE_CAP as u128 {
        return Err(Error::Resource { needed: entries, cap: DENSE_CAP as u128 });
    }
    Ok(dim)
}
