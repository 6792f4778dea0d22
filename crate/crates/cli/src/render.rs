//! CSV and text renderings. JSON goes through serde directly.

use std::fmt::Write;

use robin_core::audit::{AuditReport, NormalizeOutcome};
use robin_core::factored::CandidateFactorization;
use robin_core::generators::{classify, AbundanceRecord, RangeReport, RiVerdict};
use robin_core::selftest::SelftestReport;

const CSV_HEADER: &str = "n,sigma,rho_num,rho_den,verdict\n";

fn verdict_name(v: Option<RiVerdict>) -> &'static str {
    match v {
        Some(RiVerdict::Holds) => "Holds",
        Some(RiVerdict::Fails) => "Fails",
        Some(RiVerdict::Unknown) => "Unknown",
        None => "NotApplicable",
    }
}

fn csv_row(out: &mut String, rec: &AbundanceRecord, verdict: Option<RiVerdict>) {
    let _ = writeln!(
        out,
        "{},{},{},{},{}",
        rec.n,
        rec.sigma,
        rec.rho_num,
        rec.rho_den,
        verdict_name(verdict)
    );
}

pub fn verification_csv(rep: &RangeReport) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in rep.violations.iter().chain(&rep.unknowns) {
        csv_row(&mut out, &AbundanceRecord::new(r.n, r.sigma), Some(r.verdict));
    }
    out
}

pub fn verification_text(rep: &RangeReport) -> String {
    let mut out = format!(
        "range {}..={} at {} bits: {} violations, {} undecided\n",
        rep.from,
        rep.to,
        rep.precision_bits,
        rep.violations.len(),
        rep.unknowns.len()
    );
    for r in rep.violations.iter().chain(&rep.unknowns) {
        let _ = writeln!(out, "  n = {}  sigma = {}  {:?}", r.n, r.sigma, r.verdict);
    }
    out
}

pub fn abundance_csv(records: &[AbundanceRecord], precision: u32) -> String {
    let mut out = String::from(CSV_HEADER);
    for rec in records {
        csv_row(&mut out, rec, classify(rec.n, rec.sigma, precision).map(|v| v.verdict));
    }
    out
}

pub fn abundance_text(records: &[AbundanceRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        let _ = writeln!(
            out,
            "{:>14}  sigma = {:<16} rho = {}/{}",
            rec.n, rec.sigma, rec.rho_num, rec.rho_den
        );
    }
    out
}

pub fn ca_text<'a>(
    entries: impl Iterator<Item = (&'a String, &'a CandidateFactorization, &'a Option<String>)>,
) -> String {
    let mut out = String::new();
    for (eps, c, value) in entries {
        let _ = write!(out, "eps = {eps}  {c}");
        if let Some(v) = value {
            let _ = write!(out, "  = {v}");
        }
        out.push('\n');
    }
    out
}

pub fn audit_text(rep: &AuditReport) -> String {
    let mut out = format!("candidate {}  ({} bits)\n", rep.candidate, rep.precision_bits);
    for c in &rep.checks {
        let _ = writeln!(out, "  {:<16} {:?}", c.id.as_str(), c.verdict.status);
    }
    let _ = writeln!(out, "summary: {:?}", rep.summary.status);
    if !rep.summary.excluded_by.is_empty() {
        let ids: Vec<&str> = rep.summary.excluded_by.iter().map(|i| i.as_str()).collect();
        let _ = writeln!(out, "excluded by: {}", ids.join(", "));
    }
    out
}

pub fn normalize_text(input: &CandidateFactorization, out: &NormalizeOutcome) -> String {
    let mut s = format!("input  {input}\n");
    for (k, step) in out.steps.iter().enumerate() {
        let _ = write!(s, "  {:>4}. {:?} at p = {}", k + 1, step.kind, step.prime);
        if let Some(p) = step.removed_prime {
            let _ = write!(s, " (drops {p})");
        }
        let ratio = step.ratio.as_ref().map(|r| format!("{:.9}", r.mid_f64()));
        let _ = writeln!(s, "  G ratio ~ {}", ratio.as_deref().unwrap_or("?"));
    }
    let _ = writeln!(s, "result {}  {:?}", out.candidate, out.status);
    s
}

pub fn selftest_text(rep: &SelftestReport) -> String {
    let mut out = String::new();
    for c in &rep.cases {
        let _ = writeln!(
            out,
            "{} {}: {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    out
}
