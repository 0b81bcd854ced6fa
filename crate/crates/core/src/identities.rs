//! Closed-form right-hand sides of the sphere-average identities for
//! holomorphic sectional and bisectional curvature, plus comparison records
//! for pairing them with an oracle.

use alloc::string::String;

use num_complex::Complex64;

use crate::curvature::{CurvatureTensor, KahlerTensor};
use crate::error::{Error, Result};
use crate::sphere::McEstimate;
use crate::symgroup::{binomial, trace_f_pi4, TensorEndomorphism};

/// Below this magnitude comparisons switch from relative to absolute.
pub const NEAR_ZERO: f64 = 1e-12;

/// One closed form checked against an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResult {
    pub name: String,
    pub closed_form: f64,
    pub exact_oracle: f64,
    pub mc: Option<McEstimate>,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub pass: bool,
}

impl IdentityResult {
    pub fn compare(name: &str, closed_form: f64, exact_oracle: f64, rel_tol: f64) -> Self {
        let (abs_diff, rel_diff, pass) = compare_values(closed_form, exact_oracle, rel_tol);
        IdentityResult { name: String::from(name), closed_form, exact_oracle, mc: None, abs_diff, rel_diff, pass }
    }

    pub fn with_mc(mut self, mc: McEstimate) -> Self {
        self.mc = Some(mc);
        self
    }
}

/// `(abs_diff, rel_diff, pass)`. When both values are below [`NEAR_ZERO`] the
/// pass decision uses `abs_diff ≤ NEAR_ZERO` instead of the relative test.
pub fn compare_values(a: f64, b: f64, rel_tol: f64) -> (f64, f64, bool) {
    let abs_diff = (a - b).abs();
    let scale = a.abs().max(b.abs());
    let rel_diff = if scale > 0.0 { abs_diff / scale } else { 0.0 };
    let pass = if scale < NEAR_ZERO { abs_diff <= NEAR_ZERO } else { rel_diff <= rel_tol };
    (abs_diff, rel_diff, pass && abs_diff.is_finite())
}

/// Complex variant of [`compare_values`].
pub fn compare_complex(a: Complex64, b: Complex64, rel_tol: f64) -> (f64, f64, bool) {
    let abs_diff = (a - b).norm();
    let scale = a.norm().max(b.norm());
    let rel_diff = if scale > 0.0 { abs_diff / scale } else { 0.0 };
    let pass = if scale < NEAR_ZERO { abs_diff <= NEAR_ZERO } else { rel_diff <= rel_tol };
    (abs_diff, rel_diff, pass && abs_diff.is_finite())
}

fn binom(n: usize, k: usize) -> f64 {
    binomial(n, k) as f64
}

/// `E[H] = s / C(n+1, 2)`.
pub fn berger_mean_kahler(r: &KahlerTensor) -> f64 {
    r.tensor().ricci_set().s1 / binom(r.dim() + 1, 2)
}

/// `E[H²] = (|R|² + 4|r|² + s²) / (C(n+1,2) C(n+3,2))`.
pub fn l2_hsc_kahler(r: &KahlerTensor) -> f64 {
    let n = r.dim();
    let norms = r.tensor().norms();
    (norms.norm_r_sq + 4.0 * norms.norm_r1_sq + norms.s1 * norms.s1) / (binom(n + 1, 2) * binom(n + 3, 2))
}

/// The intermediate route `tr(f ⊗ f ∘ Π₄) / C(n+3, 4)` through the 24-row
/// table, for Kähler `f`; also checks `6 C(n+3,4) = C(n+1,2) C(n+3,2)`.
pub fn l2_hsc_kahler_trace_route(r: &KahlerTensor) -> Result<f64> {
    let n = r.dim();
    debug_assert_eq!(6 * binomial(n + 3, 4), binomial(n + 1, 2) * binomial(n + 3, 2));
    let f = TensorEndomorphism::from_curvature(r.tensor());
    Ok(trace_f_pi4(&f)? / binom(n + 3, 4))
}

/// `(4|R|² + 16|r|² + 4s²)/24`, the Kähler value of `tr(f ⊗ f ∘ Π₄)`.
pub fn trace_f_pi4_kahler(r: &KahlerTensor) -> f64 {
    let norms = r.tensor().norms();
    (4.0 * norms.norm_r_sq + 16.0 * norms.norm_r1_sq + 4.0 * norms.s1 * norms.s1) / 24.0
}

/// `E[H] = (s1 + s2) / (2 C(n+1, 2))` for any Hermitian curvature tensor.
pub fn mean_hsc_hermitian(r: &CurvatureTensor) -> f64 {
    let ricci = r.ricci_set();
    (ricci.s1 + ricci.s2) / (2.0 * binom(r.dim() + 1, 2))
}

/// `E[H²] = (4|R_Sym|² + |r1+r2+r3+r4|² + (s1+s2)²) / (4! C(n+3, 4))`.
pub fn l2_hsc_hermitian(r: &CurvatureTensor) -> f64 {
    let norms = r.norms();
    let s = norms.s1 + norms.s2;
    (4.0 * norms.norm_rsym_sq + norms.norm_ricci_sum_sq + s * s) / (24.0 * binom(r.dim() + 3, 4))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroHscConsequences {
    /// `R_{Sym²V} = 0`
    pub sym_block_zero: bool,
    /// `s1 + s2 = 0`
    pub scalar_sum_zero: bool,
    /// `r1 + r2 + r3 + r4 = 0`
    pub ricci_sum_zero: bool,
    /// Frobenius norm of the `Sym²V` block.
    pub sym_block_residual: f64,
    pub scalar_sum_residual: f64,
    /// Frobenius norm of `r1 + r2 + r3 + r4`.
    pub ricci_sum_residual: f64,
}

impl ZeroHscConsequences {
    pub fn all(&self) -> bool {
        self.sym_block_zero && self.scalar_sum_zero && self.ricci_sum_zero
    }
}

/// The three structural consequences of vanishing holomorphic sectional
/// curvature, each tested against `tol`.
pub fn zero_hsc_consequences(r: &CurvatureTensor, tol: f64) -> ZeroHscConsequences {
    let norms = r.norms();
    let sym_block_residual = libm::sqrt(norms.norm_rsym_sq);
    let scalar_sum_residual = (norms.s1 + norms.s2).abs();
    let ricci_sum_residual = libm::sqrt(norms.norm_ricci_sum_sq);
    ZeroHscConsequences {
        sym_block_zero: sym_block_residual <= tol,
        scalar_sum_zero: scalar_sum_residual <= tol,
        ricci_sum_zero: ricci_sum_residual <= tol,
        sym_block_residual,
        scalar_sum_residual,
        ricci_sum_residual,
    }
}

/// `Var H = E[H²] − E[H]²`.
pub fn variance_hsc(r: &KahlerTensor) -> f64 {
    let mean = berger_mean_kahler(r);
    l2_hsc_kahler(r) - mean * mean
}

/// `E_ξ[B(ξ, η)] = r(η, η̄) / (n |η|²)`.
pub fn bisectional_mean(r: &KahlerTensor, eta: &[Complex64]) -> Result<f64> {
    let n = r.dim();
    if eta.len() != n {
        return Err(Error::Dimension { expected: n, got: eta.len() });
    }
    let eta_sq: f64 = eta.iter().map(|z| z.norm_sqr()).sum();
    if eta_sq == 0.0 {
        return Err(Error::invalid("zero vector"));
    }
    Ok(r.ricci().eval(eta, eta).re / (n as f64 * eta_sq))
}

/// The published constant: `(|R|² + (n+2)|r|²) / (4 C(n+1,2)²)`.
pub fn l2_bisectional_published(r: &KahlerTensor) -> f64 {
    let n = r.dim();
    let norms = r.tensor().norms();
    let c = binom(n + 1, 2);
    (norms.norm_r_sq + (n as f64 + 2.0) * norms.norm_r1_sq) / (4.0 * c * c)
}

/// Same derivation with `E[r(v,v̄)²] = (s² + |r|²)/(n(n+1))` taken from the
/// degree-2 projection formula: `(|R|² + 2|r|² + s²) / (n²(n+1)²)`.
pub fn l2_bisectional_derived(r: &KahlerTensor) -> f64 {
    let n = r.dim() as f64;
    let norms = r.tensor().norms();
    (norms.norm_r_sq + 2.0 * norms.norm_r1_sq + norms.s1 * norms.s1) / (n * n * (n + 1.0) * (n + 1.0))
}

/// Which bisectional closed form agrees with the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMatch {
    Published,
    Derived,
    Both,
    Neither,
}

impl OracleMatch {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMatch::Published => "paper",
            OracleMatch::Derived => "derived",
            OracleMatch::Both => "both",
            OracleMatch::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionalAdjudication {
    pub closed_form_published: f64,
    pub closed_form_derived: f64,
    pub exact_oracle: f64,
    pub published_rel_diff: f64,
    pub derived_rel_diff: f64,
    pub oracle_match: OracleMatch,
}

/// Evaluates both bisectional L² closed forms and records which one the
/// oracle value agrees with.
pub fn adjudicate_bisectional(r: &KahlerTensor, exact_oracle: f64, rel_tol: f64) -> BisectionalAdjudication {
    let published = l2_bisectional_published(r);
    let derived = l2_bisectional_derived(r);
    let (_, published_rel_diff, published_ok) = compare_values(published, exact_oracle, rel_tol);
    let (_, derived_rel_diff, derived_ok) = compare_values(derived, exact_oracle, rel_tol);
    let oracle_match = match (published_ok, derived_ok) {
        (true, true) => OracleMatch::Both,
        (true, false) => OracleMatch::Published,
        (false, true) => OracleMatch::Derived,
        (false, false) => OracleMatch::Neither,
    };
    BisectionalAdjudication {
        closed_form_published: published,
        closed_form_derived: derived,
        exact_oracle,
        published_rel_diff,
        derived_rel_diff,
        oracle_match,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{random_antisymmetric, wedge_rank_one};
    use crate::linalg::ComplexMatrix;
    use crate::sphere::{exact_expectation_b2, exact_expectation_b_mean, exact_expectation_h, exact_expectation_h2};
    use approx::assert_relative_eq;

    fn diag() -> KahlerTensor {
        KahlerTensor::diagonal(&[1.0, 2.0]).unwrap()
    }

    fn unit_wedge() -> CurvatureTensor {
        let mut w = ComplexMatrix::zeros(2, 2);
        w[(0, 1)] = Complex64::new(1.0, 0.0);
        w[(1, 0)] = Complex64::new(-1.0, 0.0);
        wedge_rank_one(2, &w).unwrap()
    }

    #[test]
    fn compare_rules() {
        assert!(compare_values(1.0, 1.0 + 1e-11, 1e-10).2);
        assert!(!compare_values(1.0, 1.0 + 1e-9, 1e-10).2);
        assert!(compare_values(0.0, 1e-16, 1e-10).2);
        assert!(!compare_values(0.0, 2e-12, 1e-10).2);
        assert!(!compare_values(f64::NAN, 1.0, 1e-10).2);
        assert_eq!(compare_values(0.0, 0.0, 1e-10), (0.0, 0.0, true));
    }

    #[test]
    fn berger_examples() {
        assert_relative_eq!(berger_mean_kahler(&KahlerTensor::constant_hsc(3, -1.5).unwrap()), -1.5, max_relative = 1e-14);
        assert_relative_eq!(berger_mean_kahler(&diag()), 1.0, max_relative = 1e-15);
        assert_eq!(berger_mean_kahler(&KahlerTensor::constant_hsc(2, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn l2_kahler_examples() {
        for n in 1..=4 {
            for c in [-1.0, 2.0] {
                assert_relative_eq!(l2_hsc_kahler(&KahlerTensor::constant_hsc(n, c).unwrap()), c * c, max_relative = 1e-14);
            }
        }
        assert_relative_eq!(l2_hsc_kahler(&diag()), 17.0 / 15.0, max_relative = 1e-15);
        assert_eq!(l2_hsc_kahler(&KahlerTensor::constant_hsc(2, 0.0).unwrap()), 0.0);
        assert_relative_eq!(l2_hsc_kahler_trace_route(&diag()).unwrap(), 17.0 / 15.0, max_relative = 1e-14);
        assert_relative_eq!(trace_f_pi4_kahler(&diag()), 17.0 / 3.0, max_relative = 1e-15);
        for n in 1..=6 {
            assert_eq!(6 * binomial(n + 3, 4), binomial(n + 1, 2) * binomial(n + 3, 2));
        }
    }

    #[test]
    fn kahler_trace_route_agrees() {
        for n in 1..=3 {
            for seed in 0..5 {
                let r = KahlerTensor::random(n, seed).unwrap();
                assert_relative_eq!(l2_hsc_kahler_trace_route(&r).unwrap(), l2_hsc_kahler(&r), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_mean_examples() {
        assert!(mean_hsc_hermitian(&unit_wedge()).abs() < 1e-16);
        assert_relative_eq!(mean_hsc_hermitian(diag().tensor()), 1.0, max_relative = 1e-15);
        assert_eq!(mean_hsc_hermitian(&CurvatureTensor::zero(3).unwrap()), 0.0);
    }

    #[test]
    fn hermitian_l2_examples() {
        assert_relative_eq!(l2_hsc_hermitian(diag().tensor()), 17.0 / 15.0, max_relative = 1e-14);
        assert!(l2_hsc_hermitian(&unit_wedge()).abs() < 1e-15);
        assert_eq!(l2_hsc_hermitian(&CurvatureTensor::zero(3).unwrap()), 0.0);
    }

    #[test]
    fn hermitian_forms_reduce_to_kahler() {
        for n in 1..=4 {
            for seed in 0..10 {
                let r = KahlerTensor::random(n, seed).unwrap();
                assert_relative_eq!(l2_hsc_hermitian(r.tensor()), l2_hsc_kahler(&r), max_relative = 1e-10);
                assert_relative_eq!(mean_hsc_hermitian(r.tensor()), berger_mean_kahler(&r), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn oracle_agreement_small_population() {
        for n in 1..=3 {
            for seed in 0..10 {
                let k = KahlerTensor::random(n, seed).unwrap();
                assert_relative_eq!(berger_mean_kahler(&k), exact_expectation_h(k.tensor()).unwrap(), max_relative = 1e-10);
                assert_relative_eq!(l2_hsc_kahler(&k), exact_expectation_h2(k.tensor()).unwrap(), max_relative = 1e-10);
                let h = CurvatureTensor::random_hermitian(n, seed).unwrap();
                assert_relative_eq!(mean_hsc_hermitian(&h), exact_expectation_h(&h).unwrap(), max_relative = 1e-10);
                assert_relative_eq!(l2_hsc_hermitian(&h), exact_expectation_h2(&h).unwrap(), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn zero_hsc_examples() {
        for n in 2..=4 {
            let w = wedge_rank_one(n, &random_antisymmetric(n, 3)).unwrap();
            assert!(zero_hsc_consequences(&w, 1e-12).all());
        }
        let c = zero_hsc_consequences(KahlerTensor::constant_hsc(3, 1.0).unwrap().tensor(), 1e-12);
        assert!(!c.sym_block_zero && !c.scalar_sum_zero && !c.ricci_sum_zero);
        assert!(zero_hsc_consequences(&CurvatureTensor::zero(2).unwrap(), 1e-12).all());
    }

    #[test]
    fn variance_examples() {
        assert!(variance_hsc(&KahlerTensor::constant_hsc(3, 2.0).unwrap()).abs() < 1e-12);
        assert_relative_eq!(variance_hsc(&diag()), 2.0 / 15.0, max_relative = 1e-13);
        assert_eq!(variance_hsc(&KahlerTensor::constant_hsc(3, 0.0).unwrap()), 0.0);
        for n in 1..=4 {
            for seed in 0..10 {
                assert!(variance_hsc(&KahlerTensor::random(n, seed).unwrap()) >= -1e-12);
            }
        }
    }

    #[test]
    fn bisectional_mean_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for n in 1..=4 {
            let c = 3.0;
            let r = KahlerTensor::constant_hsc(n, c).unwrap();
            let mut eta = alloc::vec![zero; n];
            eta[0] = Complex64::new(0.6, 0.8);
            let expect = c * (n as f64 + 1.0) / (2.0 * n as f64);
            assert_relative_eq!(bisectional_mean(&r, &eta).unwrap(), expect, max_relative = 1e-14);
        }
        assert_relative_eq!(bisectional_mean(&diag(), &[one, zero]).unwrap(), 0.5, max_relative = 1e-15);
        let z = KahlerTensor::constant_hsc(2, 0.0).unwrap();
        assert_eq!(bisectional_mean(&z, &[one, zero]).unwrap(), 0.0);
        assert!(bisectional_mean(&diag(), &[zero, zero]).is_err());

        let r = KahlerTensor::random(3, 2).unwrap();
        let eta = [Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.0), Complex64::new(0.0, 0.7)];
        assert_relative_eq!(
            bisectional_mean(&r, &eta).unwrap(),
            exact_expectation_b_mean(r.tensor(), &eta).unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn bisectional_l2_examples() {
        for c in [1.0, -2.5] {
            let r = KahlerTensor::constant_hsc(1, c).unwrap();
            assert_relative_eq!(l2_bisectional_published(&r), c * c, max_relative = 1e-15);
            assert_relative_eq!(l2_bisectional_derived(&r), c * c, max_relative = 1e-15);
            let adj = adjudicate_bisectional(&r, exact_expectation_b2(r.tensor()).unwrap(), 1e-10);
            assert_eq!(adj.oracle_match, OracleMatch::Both);
        }
        let d = diag();
        assert_relative_eq!(l2_bisectional_published(&d), 25.0 / 36.0, max_relative = 1e-15);
        assert_relative_eq!(l2_bisectional_derived(&d), 2.0 / 3.0, max_relative = 1e-15);
        let adj = adjudicate_bisectional(&d, exact_expectation_b2(d.tensor()).unwrap(), 1e-10);
        assert_eq!(adj.oracle_match, OracleMatch::Derived);
        let z = KahlerTensor::constant_hsc(2, 0.0).unwrap();
        assert_eq!((l2_bisectional_published(&z), l2_bisectional_derived(&z)), (0.0, 0.0));
    }
}
