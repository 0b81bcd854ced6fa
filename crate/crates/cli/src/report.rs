//! Verification reports and their JSON/CSV encodings.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips `f64` exactly. Non-finite values become `null` in JSON and an
//! empty cell in CSV.

use curvlab_core::identities::{OracleMatch, NEAR_ZERO};
use curvlab_core::McEstimate;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::{Suite, SuiteConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Float(f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match format_float(self.0) {
            Some(text) => RawValue::from_string(text).map_err(serde::ser::Error::custom)?.serialize(serializer),
            None => serializer.serialize_none(),
        }
    }
}

/// Suite-specific fields carried by a case.
#[derive(Debug, Clone, PartialEq)]
pub enum Detail {
    None,
    /// Imaginary parts of a complex comparison (trace table rows).
    Complex { closed_form_im: f64, exact_oracle_im: f64 },
    /// Both bisectional closed forms and which one the oracle agreed with.
    Bisectional { closed_form_paper: f64, closed_form_derived: f64, oracle_match: OracleMatch },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub suite: Suite,
    pub n: usize,
    pub trial: usize,
    pub name: String,
    pub closed_form: f64,
    pub exact_oracle: f64,
    pub mc: Option<McEstimate>,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub pass: bool,
    pub detail: Detail,
}

impl Case {
    /// `max(|closed_form|, |exact_oracle|)`, including imaginary parts.
    pub fn scale(&self) -> f64 {
        let (cf_im, ex_im) = match self.detail {
            Detail::Complex { closed_form_im, exact_oracle_im } => (closed_form_im, exact_oracle_im),
            _ => (0.0, 0.0),
        };
        self.closed_form.hypot(cf_im).max(self.exact_oracle.hypot(ex_im))
    }
}

fn worst(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc: f64, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub cases: usize,
    pub passes: usize,
    pub failures: usize,
    /// Failures in suites that decide the exit status.
    pub gating_failures: usize,
    /// Largest `rel_diff` among cases judged by the relative rule.
    pub worst_rel_diff: f64,
    /// Largest `abs_diff` among near-zero cases judged by the absolute rule.
    pub worst_abs_diff: f64,
}

impl Summary {
    pub fn tally(cases: &[Case]) -> Self {
        let passes = cases.iter().filter(|c| c.pass).count();
        let gating_failures = cases.iter().filter(|c| !c.pass && c.suite.gates_exit()).count();
        let (near_zero, relative): (Vec<&Case>, Vec<&Case>) = cases.iter().partition(|c| c.scale() < NEAR_ZERO);
        Summary {
            cases: cases.len(),
            passes,
            failures: cases.len() - passes,
            gating_failures,
            worst_rel_diff: worst(relative.iter().map(|c| c.rel_diff)),
            worst_abs_diff: worst(near_zero.iter().map(|c| c.abs_diff)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// The configuration as actually run (dimensions normalized, fixture
    /// mode applied).
    pub config: SuiteConfig,
    pub cases: Vec<Case>,
    pub summary: Summary,
    pub version: &'static str,
}

impl VerificationReport {
    pub fn new(config: SuiteConfig, cases: Vec<Case>) -> Self {
        let summary = Summary::tally(&cases);
        VerificationReport { config, cases, summary, version: VERSION }
    }

    pub fn exit_ok(&self) -> bool {
        self.summary.gating_failures == 0
    }

    pub fn render(&self) -> String {
        match self.config.format {
            crate::config::Format::Json => self.to_json(),
            crate::config::Format::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&ReportJson::from(self)).expect("reports always serialize");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for case in &self.cases {
            writer.write_record(csv_row(case)).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }
}

pub const CSV_HEADER: [&str; 18] = [
    "suite",
    "n",
    "trial",
    "name",
    "closed_form",
    "exact_oracle",
    "closed_form_im",
    "exact_oracle_im",
    "closed_form_paper",
    "closed_form_derived",
    "oracle_match",
    "mc_mean",
    "mc_std_error",
    "mc_samples",
    "mc_seed",
    "abs_diff",
    "rel_diff",
    "pass",
];

fn cell(x: f64) -> String {
    format_float(x).unwrap_or_default()
}

fn csv_row(case: &Case) -> Vec<String> {
    let blank = String::new;
    let (cf_im, ex_im, paper, derived, matched) = match &case.detail {
        Detail::None => (blank(), blank(), blank(), blank(), blank()),
        Detail::Complex { closed_form_im, exact_oracle_im } => {
            (cell(*closed_form_im), cell(*exact_oracle_im), blank(), blank(), blank())
        }
        Detail::Bisectional { closed_form_paper, closed_form_derived, oracle_match } => (
            blank(),
            blank(),
            cell(*closed_form_paper),
            cell(*closed_form_derived),
            oracle_match.as_str().to_owned(),
        ),
    };
    let (mc_mean, mc_se, mc_samples, mc_seed) = match &case.mc {
        Some(mc) => (cell(mc.mean), cell(mc.std_error), mc.samples.to_string(), mc.seed.to_string()),
        None => (blank(), blank(), blank(), blank()),
    };
    vec![
        case.suite.as_str().to_owned(),
        case.n.to_string(),
        case.trial.to_string(),
        case.name.clone(),
        cell(case.closed_form),
        cell(case.exact_oracle),
        cf_im,
        ex_im,
        paper,
        derived,
        matched,
        mc_mean,
        mc_se,
        mc_samples,
        mc_seed,
        cell(case.abs_diff),
        cell(case.rel_diff),
        case.pass.to_string(),
    ]
}

#[derive(serde::Serialize)]
struct ReportJson<'a> {
    config: ConfigJson<'a>,
    cases: Vec<CaseJson<'a>>,
    summary: SummaryJson,
    version: &'a str,
}

#[derive(serde::Serialize)]
struct ConfigJson<'a> {
    suite: &'a str,
    n_list: &'a [usize],
    trials: usize,
    mc_samples: usize,
    seed: u64,
    rel_tol: Float,
    format: &'a str,
    fixture: Option<String>,
}

#[derive(serde::Serialize)]
struct McJson {
    mean: Float,
    std_error: Float,
    samples: usize,
    seed: u64,
}

#[derive(serde::Serialize)]
struct CaseJson<'a> {
    suite: &'a str,
    n: usize,
    trial: usize,
    name: &'a str,
    closed_form: Float,
    exact_oracle: Float,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_im: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_oracle_im: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_paper: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_derived: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_match: Option<&'static str>,
    mc: Option<McJson>,
    abs_diff: Float,
    rel_diff: Float,
    pass: bool,
}

#[derive(serde::Serialize)]
struct SummaryJson {
    cases: usize,
    passes: usize,
    failures: usize,
    gating_failures: usize,
    worst_rel_diff: Float,
    worst_abs_diff: Float,
}

impl<'a> From<&'a Case> for CaseJson<'a> {
    fn from(case: &'a Case) -> Self {
        let mut json = CaseJson {
            suite: case.suite.as_str(),
            n: case.n,
            trial: case.trial,
            name: &case.name,
            closed_form: Float(case.closed_form),
            exact_oracle: Float(case.exact_oracle),
            closed_form_im: None,
            exact_oracle_im: None,
            closed_form_paper: None,
            closed_form_derived: None,
            oracle_match: None,
            mc: case.mc.map(|mc| McJson {
                mean: Float(mc.mean),
                std_error: Float(mc.std_error),
                samples: mc.samples,
                seed: mc.seed,
            }),
            abs_diff: Float(case.abs_diff),
            rel_diff: Float(case.rel_diff),
            pass: case.pass,
        };
        match case.detail {
            Detail::None => {}
            Detail::Complex { closed_form_im, exact_oracle_im } => {
                json.closed_form_im = Some(Float(closed_form_im));
                json.exact_oracle_im = Some(Float(exact_oracle_im));
            }
            Detail::Bisectional { closed_form_paper, closed_form_derived, oracle_match } => {
                json.closed_form_paper = Some(Float(closed_form_paper));
                json.closed_form_derived = Some(Float(closed_form_derived));
                json.oracle_match = Some(oracle_match.as_str());
            }
        }
        json
    }
}

impl<'a> From<&'a VerificationReport> for ReportJson<'a> {
    fn from(report: &'a VerificationReport) -> Self {
        let config = &report.config;
        let s = &report.summary;
        ReportJson {
            config: ConfigJson {
                suite: config.suite.as_str(),
                n_list: &config.n_list,
                trials: config.trials,
                mc_samples: config.mc_samples,
                seed: config.seed,
                rel_tol: Float(config.rel_tol),
                format: config.format.as_str(),
                fixture: config.fixture.as_ref().map(|p| p.display().to_string()),
            },
            cases: report.cases.iter().map(CaseJson::from).collect(),
            summary: SummaryJson {
                cases: s.cases,
                passes: s.passes,
                failures: s.failures,
                gating_failures: s.gating_failures,
                worst_rel_diff: Float(s.worst_rel_diff),
                worst_abs_diff: Float(s.worst_abs_diff),
            },
            version: report.version,
        }
    }
}
