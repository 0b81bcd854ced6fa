//! Tensor files: `{"n": 2, "entries": [[re, im], ...]}` with the `n⁴` entries
//! of `R[i][j][k][l]` in big-endian multi-index order.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use curvlab_core::curvature::{random_antisymmetric, wedge_rank_one};
use curvlab_core::sphere::MAX_ORACLE_DIM;
use curvlab_core::{Complex64, CurvatureTensor, KahlerTensor};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed tensor file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tensor(#[from] curvlab_core::Error),
    #[error("bad fixture parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl TensorFile {
    pub fn from_tensor(r: &CurvatureTensor) -> Self {
        TensorFile { n: r.dim(), entries: r.entries().iter().map(|z| [z.re, z.im]).collect() }
    }

    /// Validates the entries through [`CurvatureTensor::from_entries`].
    pub fn to_tensor(&self) -> Result<CurvatureTensor, FixtureError> {
        let entries = self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(CurvatureTensor::from_entries(self.n, entries)?)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string(self).expect("tensor files always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<CurvatureTensor, FixtureError> {
        let text = fs::read_to_string(path).map_err(|source| FixtureError::Read { path: path.to_owned(), source })?;
        Self::from_json(&text)?.to_tensor()
    }

    pub fn save(r: &CurvatureTensor, path: &Path) -> Result<(), FixtureError> {
        fs::write(path, Self::from_tensor(r).to_json())
            .map_err(|source| FixtureError::Write { path: path.to_owned(), source })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    ConstantHsc,
    Diagonal,
    Wedge,
    RandomKahler,
    RandomHermitian,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixtureParams {
    pub n: Option<usize>,
    /// Holomorphic sectional curvature for `constant-hsc`.
    pub c: Option<f64>,
    /// Diagonal values for `diagonal`.
    pub diag: Vec<f64>,
    pub seed: u64,
}

fn params_error(msg: impl Into<String>) -> FixtureError {
    FixtureError::Params(msg.into())
}

fn require_n(params: &FixtureParams) -> Result<usize, FixtureError> {
    let n = params.n.ok_or_else(|| params_error("--n is required for this kind"))?;
    if n == 0 || n > MAX_ORACLE_DIM {
        return Err(params_error(format!("n = {n} is outside 1..={MAX_ORACLE_DIM}")));
    }
    Ok(n)
}

pub fn emit_fixture(kind: FixtureKind, params: &FixtureParams) -> Result<CurvatureTensor, FixtureError> {
    let tensor = match kind {
        FixtureKind::ConstantHsc => {
            let c = params.c.ok_or_else(|| params_error("--c is required for constant-hsc"))?;
            if !c.is_finite() {
                return Err(params_error("c must be finite"));
            }
            KahlerTensor::constant_hsc(require_n(params)?, c)?.into_tensor()
        }
        FixtureKind::Diagonal => {
            if params.diag.is_empty() {
                return Err(params_error("--diag is required for diagonal"));
            }
            if let Some(n) = params.n.filter(|&n| n != params.diag.len()) {
                return Err(params_error(format!("--n {n} disagrees with {} diagonal values", params.diag.len())));
            }
            if params.diag.len() > MAX_ORACLE_DIM {
                return Err(params_error(format!("at most {MAX_ORACLE_DIM} diagonal values")));
            }
            KahlerTensor::diagonal(&params.diag)?.into_tensor()
        }
        FixtureKind::Wedge => {
            let n = require_n(params)?;
            wedge_rank_one(n, &random_antisymmetric(n, params.seed))?
        }
        FixtureKind::RandomKahler => KahlerTensor::random(require_n(params)?, params.seed)?.into_tensor(),
        FixtureKind::RandomHermitian => CurvatureTensor::random_hermitian(require_n(params)?, params.seed)?,
    };
    Ok(tensor)
}
