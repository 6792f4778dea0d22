//! Necessary conditions on the least counterexample to Robin's inequality,
//! decided for a factored candidate.
//!
//! [`full_audit`] evaluates every check in a fixed order and summarizes the
//! result. A `Fail` means the candidate cannot be the least counterexample;
//! most conditions are only proved for huge `n`, so desk-scale candidates
//! routinely fail several of them. [`normalize`] applies the two reductions
//! that move a candidate toward the exponent window while increasing `G`.

mod bounds;
mod checks;
mod normalize;

pub use bounds::{compute_l, compute_m, compute_u, epsilon, floor_log_ratio, UContext};
pub use checks::{check_log_window_form1, check_size_floor_log, Subject};
pub use normalize::{normalize, window_distance, NormalizeOutcome, NormalizeStatus, Step, StepKind};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::factored::{CandidateFactorization, FactoredError};
use crate::numeric::{NumericError, DEFAULT_PRECISION};
use crate::primes::PrimeTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("{0}")]
    Domain(String),
    #[error("undecided at {precision} bits: {what}")]
    Indeterminate { what: String, precision: u32 },
    #[error("bracket index {bracket} and floor {floor} disagree at p = {p}")]
    BracketMismatch { p: u64, bracket: u64, floor: i64 },
    #[error(transparent)]
    Factored(#[from] FactoredError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Unknown,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CheckId {
    #[serde(rename = "size_floor_C")]
    SizeFloorC,
    #[serde(rename = "log_window_1")]
    LogWindow1,
    #[serde(rename = "log_window_2")]
    LogWindow2,
    #[serde(rename = "upper_window_3")]
    UpperWindow3,
    #[serde(rename = "lower_window_4")]
    LowerWindow4,
    #[serde(rename = "shape_B1")]
    ShapeB1,
    #[serde(rename = "shape_B2")]
    ShapeB2,
    #[serde(rename = "shape_B3")]
    ShapeB3,
    #[serde(rename = "shape_B4")]
    ShapeB4,
    #[serde(rename = "shape_B5")]
    ShapeB5,
    #[serde(rename = "density_B6")]
    DensityB6,
    #[serde(rename = "vojak_D1")]
    PrimeCountD1,
    #[serde(rename = "vojak_D2")]
    NonUnitD2,
    #[serde(rename = "vojak_D3")]
    LogRatioD3,
    #[serde(rename = "vojak_D4")]
    PowerBoundD4,
    #[serde(rename = "exponents_E")]
    ExponentsE,
    #[serde(rename = "two_squares_F")]
    TwoSquaresF,
    #[serde(rename = "s_window_56")]
    SWindow56,
}

impl CheckId {
    /// Every check, in report order.
    pub const ALL: [CheckId; 18] = [
        CheckId::SizeFloorC,
        CheckId::LogWindow1,
        CheckId::LogWindow2,
        CheckId::UpperWindow3,
        CheckId::LowerWindow4,
        CheckId::ShapeB1,
        CheckId::ShapeB2,
        CheckId::ShapeB3,
        CheckId::ShapeB4,
        CheckId::ShapeB5,
        CheckId::DensityB6,
        CheckId::PrimeCountD1,
        CheckId::NonUnitD2,
        CheckId::LogRatioD3,
        CheckId::PowerBoundD4,
        CheckId::ExponentsE,
        CheckId::TwoSquaresF,
        CheckId::SWindow56,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::SizeFloorC => "size_floor_C",
            CheckId::LogWindow1 => "log_window_1",
            CheckId::LogWindow2 => "log_window_2",
            CheckId::UpperWindow3 => "upper_window_3",
            CheckId::LowerWindow4 => "lower_window_4",
            CheckId::ShapeB1 => "shape_B1",
            CheckId::ShapeB2 => "shape_B2",
            CheckId::ShapeB3 => "shape_B3",
            CheckId::ShapeB4 => "shape_B4",
            CheckId::ShapeB5 => "shape_B5",
            CheckId::DensityB6 => "density_B6",
            CheckId::PrimeCountD1 => "vojak_D1",
            CheckId::NonUnitD2 => "vojak_D2",
            CheckId::LogRatioD3 => "vojak_D3",
            CheckId::PowerBoundD4 => "vojak_D4",
            CheckId::ExponentsE => "exponents_E",
            CheckId::TwoSquaresF => "two_squares_F",
            CheckId::SWindow56 => "s_window_56",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub precision_used: u32,
}

impl Verdict {
    pub fn new(status: Status, witness: Value, precision: u32) -> Self {
        Verdict {
            status,
            witness: Some(witness),
            precision_used: precision,
        }
    }

    pub fn unknown(reason: impl Into<String>, precision: u32) -> Self {
        Verdict::new(
            Status::Unknown,
            serde_json::json!({ "reason": reason.into() }),
            precision,
        )
    }

    pub fn not_applicable(reason: impl Into<String>, precision: u32) -> Self {
        Verdict::new(
            Status::NotApplicable,
            serde_json::json!({ "reason": reason.into() }),
            precision,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: CheckId,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryStatus {
    SurvivesAllChecks,
    Excluded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub status: SummaryStatus,
    pub excluded_by: Vec<CheckId>,
    pub unknown: Vec<CheckId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub candidate: CandidateFactorization,
    pub precision_bits: u32,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl AuditReport {
    pub fn verdict(&self, id: CheckId) -> &Verdict {
        &self
            .checks
            .iter()
            .find(|c| c.id == id)
            .expect("every check is reported")
            .verdict
    }

    pub fn status(&self, id: CheckId) -> Status {
        self.verdict(id).status
    }
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub precision: u32,
    /// Largest number of (run, run) pairs examined exactly by `shape_B2`;
    /// beyond it a deterministic sample is used.
    pub pair_budget: u64,
    /// Precision doublings tried for checks left Unknown.
    pub refinements: u32,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            precision: DEFAULT_PRECISION,
            pair_budget: 1_000_000,
            refinements: 2,
        }
    }
}

/// Runs every check in report order. Unknown verdicts are retried at
/// doubled precision up to `cfg.refinements` times.
pub fn full_audit(c: &CandidateFactorization, t: &PrimeTable, cfg: &AuditConfig) -> AuditReport {
    let subject = Subject::new(c, t, cfg.precision, cfg.pair_budget);
    let mut checks: Vec<CheckResult> = CheckId::ALL
        .iter()
        .map(|&id| CheckResult {
            id,
            verdict: subject.run(id),
        })
        .collect();
    let mut prec = cfg.precision;
    for _ in 0..cfg.refinements {
        if !checks.iter().any(|r| r.verdict.status == Status::Unknown) {
            break;
        }
        prec *= 2;
        let finer = Subject::new(c, t, prec, cfg.pair_budget);
        for r in checks.iter_mut().filter(|r| r.verdict.status == Status::Unknown) {
            let v = finer.run(r.id);
            if v.status != Status::Unknown {
                r.verdict = v;
            }
        }
    }
    let ids_with =
        |s: Status| -> Vec<CheckId> { checks.iter().filter(|r| r.verdict.status == s).map(|r| r.id).collect() };
    let excluded_by = ids_with(Status::Fail);
    let unknown = ids_with(Status::Unknown);
    let status = if !excluded_by.is_empty() {
        SummaryStatus::Excluded
    } else if !unknown.is_empty() {
        SummaryStatus::Inconclusive
    } else {
        SummaryStatus::SurvivesAllChecks
    };
    AuditReport {
        candidate: c.clone(),
        precision_bits: cfg.precision,
        checks,
        summary: Summary {
            status,
            excluded_by,
            unknown,
        },
    }
}
