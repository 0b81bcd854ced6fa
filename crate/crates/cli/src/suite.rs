//! Suite runners. Each `(suite, n, trial)` task owns a ChaCha8 stream keyed
//! by the run seed and the task coordinates; tasks run on a rayon pool and
//! their cases are collected in task order.

use curvlab_core::curvature::{random_antisymmetric, wedge_rank_one};
use curvlab_core::identities::{
    adjudicate_bisectional, berger_mean_kahler, bisectional_mean, compare_complex, l2_hsc_hermitian, l2_hsc_kahler,
    mean_hsc_hermitian, variance_hsc, zero_hsc_consequences, NEAR_ZERO,
};
use curvlab_core::linalg::SYM_TOL;
use curvlab_core::sphere::{
    exact_expectation_b2, exact_expectation_b_mean, exact_expectation_h, exact_expectation_h2, exact_projection_residual,
    mc_projection_residual, mc_values, sample_unit_sphere,
};
use curvlab_core::symgroup::{TraceOracle, TraceTable};
use curvlab_core::{
    Complex64, CurvatureTensor, IdentityResult, KahlerTensor, McEstimate, TensorEndomorphism, TraceRow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, Suite, SuiteConfig};
use crate::fixture::{FixtureError, TensorFile};
use crate::report::{Case, Detail, VerificationReport};

/// Samples per parallel Monte Carlo chunk.
const MC_CHUNK: usize = 4096;

/// Random directions on which the zero-HSC suite evaluates `H`.
pub const ZERO_HSC_DIRECTIONS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("suite {suite} needs a Kähler tensor: {source}")]
    NotKahler { suite: Suite, source: curvlab_core::Error },
    #[error("{suite} n={n} trial={trial}: {source}")]
    Case { suite: Suite, n: usize, trial: usize, source: curvlab_core::Error },
    #[error("invalid {var}: {value:?}", var = crate::THREADS_ENV)]
    Threads { value: String },
    #[error("cannot build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Thread cap from [`crate::THREADS_ENV`]; `0` means the rayon default.
pub fn threads_from_env() -> Result<usize, RunError> {
    match std::env::var(crate::THREADS_ENV) {
        Ok(value) if value.trim().is_empty() => Ok(0),
        Ok(value) => value.trim().parse().map_err(|_| RunError::Threads { value }),
        Err(_) => Ok(0),
    }
}

/// Runs `config` with the thread cap taken from the environment.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport, RunError> {
    run_suite_with_threads(config, threads_from_env()?)
}

pub fn run_suite_with_threads(config: &SuiteConfig, threads: usize) -> Result<VerificationReport, RunError> {
    config.validate()?;
    let source = match &config.fixture {
        Some(path) => Source::fixture(TensorFile::load(path)?),
        None => Source::Random,
    };
    let mut effective = config.clone();
    if let Source::Fixture { tensor, .. } = &source {
        effective.n_list = vec![tensor.dim()];
        effective.trials = 1;
    } else {
        effective.n_list = config.dimensions();
    }
    let suites = source.suites(config.suite)?;

    let mut tasks = Vec::new();
    for &suite in &suites {
        let trials = if suite == Suite::Projection { 1 } else { effective.trials };
        for &n in &effective.n_list {
            tasks.extend((0..trials).map(|trial| Task { suite, n, trial }));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let per_task: Vec<Vec<Case>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|task| {
                task.run(&source, &effective)
                    .map_err(|source| RunError::Case { suite: task.suite, n: task.n, trial: task.trial, source })
            })
            .collect::<Result<_, _>>()
    })?;
    Ok(VerificationReport::new(effective, per_task.into_iter().flatten().collect()))
}

enum Source {
    Random,
    Fixture { tensor: CurvatureTensor, kahler: Option<KahlerTensor> },
}

impl Source {
    fn fixture(tensor: CurvatureTensor) -> Self {
        let kahler = KahlerTensor::new(tensor.clone(), SYM_TOL).ok();
        Source::Fixture { tensor, kahler }
    }

    /// The suites to run. With a fixture, `all` keeps only the suites whose
    /// hypotheses the fixture satisfies; an explicitly requested Kähler suite
    /// on a non-Kähler fixture is an error.
    fn suites(&self, requested: Suite) -> Result<Vec<Suite>, RunError> {
        let Source::Fixture { tensor, kahler, .. } = self else {
            return Ok(requested.expand());
        };
        if requested != Suite::All {
            if requested.needs_kahler() && kahler.is_none() {
                let source = KahlerTensor::new(tensor.clone(), SYM_TOL).expect_err("fixture was classified non-Kähler");
                return Err(RunError::NotKahler { suite: requested, source });
            }
            return Ok(vec![requested]);
        }
        let vanishing_h = exact_expectation_h2(tensor).map(|m| m.abs() <= NEAR_ZERO).unwrap_or(false);
        Ok(requested
            .expand()
            .into_iter()
            .filter(|s| !s.needs_kahler() || kahler.is_some())
            .filter(|s| *s != Suite::ZeroHsc || vanishing_h)
            .collect())
    }

    fn hermitian(&self, n: usize, seed: u64) -> curvlab_core::Result<CurvatureTensor> {
        match self {
            Source::Random => CurvatureTensor::random_hermitian(n, seed),
            Source::Fixture { tensor, .. } => Ok(tensor.clone()),
        }
    }

    fn kahler(&self, n: usize, seed: u64) -> curvlab_core::Result<KahlerTensor> {
        match self {
            Source::Random => KahlerTensor::random(n, seed),
            Source::Fixture { kahler: Some(k), .. } => Ok(k.clone()),
            Source::Fixture { tensor, kahler: None, .. } => KahlerTensor::new(tensor.clone(), SYM_TOL),
        }
    }

    fn wedge(&self, n: usize, seed: u64) -> curvlab_core::Result<CurvatureTensor> {
        match self {
            Source::Random => wedge_rank_one(n, &random_antisymmetric(n, seed)),
            Source::Fixture { tensor, .. } => Ok(tensor.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Task {
    suite: Suite,
    n: usize,
    trial: usize,
}

impl Task {
    fn rng(&self, seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((self.suite.stream_index() << 48) | ((self.n as u64) << 32) | self.trial as u64);
        rng
    }

    fn case(&self, result: IdentityResult) -> Case {
        Case {
            suite: self.suite,
            n: self.n,
            trial: self.trial,
            name: result.name,
            closed_form: result.closed_form,
            exact_oracle: result.exact_oracle,
            mc: result.mc,
            abs_diff: result.abs_diff,
            rel_diff: result.rel_diff,
            pass: result.pass,
            detail: Detail::None,
        }
    }

    fn run(&self, source: &Source, config: &SuiteConfig) -> curvlab_core::Result<Vec<Case>> {
        let n = self.n;
        let tol = config.rel_tol;
        let mut rng = self.rng(config.seed);
        let tensor_seed: u64 = rng.random();
        let mc_seed: u64 = rng.random();
        let mc = |points: usize, integrand: &(dyn Fn(&[Complex64]) -> f64 + Sync)| -> curvlab_core::Result<Option<McEstimate>> {
            match config.mc_samples {
                0 => Ok(None),
                samples => monte_carlo(n, points, samples, mc_seed, integrand).map(Some),
            }
        };
        let with_mc = |result: IdentityResult, estimate: Option<McEstimate>| match estimate {
            Some(estimate) => result.with_mc(estimate),
            None => result,
        };

        let cases = match self.suite {
            Suite::Projection => (1..=4)
                .map(|d| {
                    let residual = exact_projection_residual(n, d)?;
                    let mut case = self.case(IdentityResult::compare(&format!("projection_d{d}"), 0.0, residual, tol));
                    if config.mc_samples > 0 {
                        let seed = mc_seed.wrapping_add(d as u64);
                        let mean = mc_projection_residual(n, d, config.mc_samples, seed)?;
                        case.mc = Some(McEstimate { mean, std_error: f64::NAN, samples: config.mc_samples, seed });
                    }
                    Ok(case)
                })
                .collect::<curvlab_core::Result<_>>()?,
            Suite::KahlerMean => {
                let k = source.kahler(n, tensor_seed)?;
                let result = IdentityResult::compare("berger_mean", berger_mean_kahler(&k), exact_expectation_h(k.tensor())?, tol);
                vec![self.case(with_mc(result, mc(1, &|v| hsc(k.tensor(), v))?))]
            }
            Suite::KahlerL2 => {
                let k = source.kahler(n, tensor_seed)?;
                let result = IdentityResult::compare("kahler_l2", l2_hsc_kahler(&k), exact_expectation_h2(k.tensor())?, tol);
                vec![self.case(with_mc(result, mc(1, &|v| hsc(k.tensor(), v).powi(2))?))]
            }
            Suite::HermitianMean => {
                let r = source.hermitian(n, tensor_seed)?;
                let result = IdentityResult::compare("hermitian_mean", mean_hsc_hermitian(&r), exact_expectation_h(&r)?, tol);
                vec![self.case(with_mc(result, mc(1, &|v| hsc(&r, v))?))]
            }
            Suite::HermitianL2 => {
                let r = source.hermitian(n, tensor_seed)?;
                let result = IdentityResult::compare("hermitian_l2", l2_hsc_hermitian(&r), exact_expectation_h2(&r)?, tol);
                vec![self.case(with_mc(result, mc(1, &|v| hsc(&r, v).powi(2))?))]
            }
            Suite::Bisectional => {
                let k = source.kahler(n, tensor_seed)?;
                let oracle = exact_expectation_b2(k.tensor())?;
                let adjudication = adjudicate_bisectional(&k, oracle, tol);
                let result = IdentityResult::compare("bisectional_l2", adjudication.closed_form_derived, oracle, tol);
                let estimate = mc(2, &|uv| {
                    let (u, v) = uv.split_at(n);
                    k.bisectional(u, v).map_or(f64::NAN, |b| b * b)
                })?;
                let mut case = self.case(with_mc(result, estimate));
                case.detail = Detail::Bisectional {
                    closed_form_paper: adjudication.closed_form_published,
                    closed_form_derived: adjudication.closed_form_derived,
                    oracle_match: adjudication.oracle_match,
                };
                vec![case]
            }
            Suite::BisectionalMean => {
                let k = source.kahler(n, tensor_seed)?;
                let eta = sample_unit_sphere(n, &mut rng);
                let result = IdentityResult::compare(
                    "bisectional_mean",
                    bisectional_mean(&k, &eta)?,
                    exact_expectation_b_mean(k.tensor(), &eta)?,
                    tol,
                );
                vec![self.case(with_mc(result, mc(1, &|xi| k.bisectional(xi, &eta).unwrap_or(f64::NAN))?))]
            }
            Suite::ZeroHsc => {
                let r = source.wedge(n, tensor_seed)?;
                let l2 = IdentityResult::compare("zero_hsc_l2", l2_hsc_hermitian(&r), exact_expectation_h2(&r)?, tol);
                let max_h = (0..ZERO_HSC_DIRECTIONS)
                    .map(|_| hsc(&r, &sample_unit_sphere(n, &mut rng)).abs())
                    .fold(0.0, f64::max);
                let z = zero_hsc_consequences(&r, NEAR_ZERO);
                vec![
                    self.case(with_mc(l2, mc(1, &|v| hsc(&r, v).powi(2))?)),
                    self.case(IdentityResult::compare("zero_hsc_max_abs_h", 0.0, max_h, tol)),
                    self.case(IdentityResult::compare("zero_hsc_sym_block", 0.0, z.sym_block_residual, tol)),
                    self.case(IdentityResult::compare("zero_hsc_scalar_sum", 0.0, z.scalar_sum_residual, tol)),
                    self.case(IdentityResult::compare("zero_hsc_ricci_sum", 0.0, z.ricci_sum_residual, tol)),
                ]
            }
            Suite::TraceTable => {
                let r = source.hermitian(n, tensor_seed)?;
                let f = TensorEndomorphism::from_curvature(&r);
                let table = TraceTable::new(&f)?;
                let oracle = TraceOracle::new(&f)?;
                TraceRow::all()
                    .map(|row| {
                        let closed = table.row(row);
                        let exact = oracle.row(row)?;
                        let (abs_diff, rel_diff, pass) = compare_complex(closed, exact, tol);
                        Ok(Case {
                            suite: self.suite,
                            n,
                            trial: self.trial,
                            name: format!("trace_{}", row.key()),
                            closed_form: closed.re,
                            exact_oracle: exact.re,
                            mc: None,
                            abs_diff,
                            rel_diff,
                            pass,
                            detail: Detail::Complex { closed_form_im: closed.im, exact_oracle_im: exact.im },
                        })
                    })
                    .collect::<curvlab_core::Result<_>>()?
            }
            Suite::Variance => {
                let k = source.kahler(n, tensor_seed)?;
                let mean = exact_expectation_h(k.tensor())?;
                let oracle = exact_expectation_h2(k.tensor())? - mean * mean;
                let closed = variance_hsc(&k);
                let mut result = IdentityResult::compare("variance", closed, oracle, tol);
                result.pass &= closed >= -NEAR_ZERO;
                vec![self.case(with_mc(result, mc(1, &|v| (hsc(k.tensor(), v) - mean).powi(2))?))]
            }
            Suite::All => unreachable!("`all` is expanded before tasks are built"),
        };
        Ok(cases)
    }
}

fn hsc(r: &CurvatureTensor, v: &[Complex64]) -> f64 {
    r.hsc(v).unwrap_or(f64::NAN)
}

/// Monte Carlo estimate over `points` independent spheres, computed in
/// fixed-size chunks in parallel. Each sample has its own RNG stream and the
/// chunks are concatenated in index order, so the estimate does not depend on
/// the thread count.
pub fn monte_carlo(
    n: usize,
    points: usize,
    samples: usize,
    seed: u64,
    integrand: &(dyn Fn(&[Complex64]) -> f64 + Sync),
) -> curvlab_core::Result<McEstimate> {
    let chunks: Vec<Vec<f64>> = (0..samples.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * MC_CHUNK;
            mc_values(n, points, seed, start..(start + MC_CHUNK).min(samples), integrand)
        })
        .collect();
    McEstimate::from_values(&chunks.concat(), seed)
}
