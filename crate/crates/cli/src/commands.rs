use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use robin_core::audit::{self, AuditConfig, NormalizeOutcome, NormalizeStatus, Status, SummaryStatus};
use robin_core::factored::{self, parse_candidate_json, CandidateFactorization, FactoredError};
use robin_core::generators::{self, GenError, VerifyConfig};
use robin_core::numeric::{parse_decimal, Constants, Interval};
use robin_core::primes::{PrimeError, PrimeTable};
use robin_core::selftest::run_selftest;
use serde::Serialize;
use serde_json::json;

use crate::render;
use crate::{exit, CliError, Format, Global, Outcome};

/// Candidates up to this many bits also carry their exact value.
const VALUE_BITS: u64 = 256;

fn json_out<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn prime_err(e: PrimeError) -> CliError {
    let code = match e {
        PrimeError::Budget { .. } | PrimeError::TableTooSmall { .. } => exit::RESOURCE,
        PrimeError::Io(_) | PrimeError::BadCache(_) => exit::INPUT,
        _ => exit::USAGE,
    };
    CliError::new(code, e.to_string())
}

fn gen_err(e: GenError) -> CliError {
    match e {
        GenError::Budget { .. } => CliError::new(exit::RESOURCE, e.to_string()),
        GenError::Indeterminate { .. } => CliError::new(exit::INCONCLUSIVE, e.to_string()),
        GenError::Prime(p) => prime_err(p),
        _ => CliError::new(exit::USAGE, e.to_string()),
    }
}

fn csv_unsupported(cmd: &str) -> CliError {
    CliError::new(
        exit::USAGE,
        format!("--format csv is only available for verify and sa, not {cmd}"),
    )
}

/// `p_r < r (ln r + ln ln r)` for `r >= 6`.
fn nth_prime_bound(r: u64) -> u64 {
    if r < 6 {
        return 13;
    }
    let x = r as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

fn table(g: &Global, at_least: u64) -> Result<PrimeTable, CliError> {
    PrimeTable::build(g.prime_limit.max(at_least)).map_err(prime_err)
}

fn table_for(g: &Global, c: &CandidateFactorization) -> Result<PrimeTable, CliError> {
    table(g, nth_prime_bound(c.r()))
}

fn read_candidate(path: &Path) -> Result<CandidateFactorization, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::new(exit::INPUT, format!("{}: {e}", path.display())))?;
    parse_candidate_json(&text).map_err(|e| CliError::new(exit::INPUT, format!("{}: {e}", path.display())))
}

fn parse_rational(flag: &str, s: &str) -> Result<BigRational, CliError> {
    let parsed = if s.contains('/') {
        BigRational::from_str(s).ok()
    } else {
        parse_decimal(s)
    };
    parsed.ok_or_else(|| {
        CliError::new(
            exit::USAGE,
            format!("{flag}: cannot parse `{s}` as a decimal or fraction"),
        )
    })
}

pub fn verify(g: &Global, from: u64, to: u64) -> Result<Outcome, CliError> {
    if from > to {
        return Err(CliError::new(exit::USAGE, format!("--from {from} exceeds --to {to}")));
    }
    if to < 3 {
        return Err(CliError::new(exit::USAGE, format!("--to must be at least 3, got {to}")));
    }
    let cfg = VerifyConfig {
        precision: g.precision,
        ..VerifyConfig::default()
    };
    let rep = generators::verify_range(from.max(3), to, &cfg).map_err(gen_err)?;
    let code = if !rep.violations.is_empty() {
        exit::NEGATIVE
    } else if !rep.unknowns.is_empty() {
        exit::INCONCLUSIVE
    } else {
        exit::OK
    };
    let stdout = match g.format {
        Format::Json => json_out(&rep),
        Format::Csv => render::verification_csv(&rep),
        Format::Text => render::verification_text(&rep),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code,
    })
}

pub fn sa(g: &Global, limit: u64) -> Result<Outcome, CliError> {
    let records = generators::superabundant_up_to(limit).map_err(gen_err)?;
    let stdout = match g.format {
        Format::Json => json_out(&json!({ "limit": limit, "records": records })),
        Format::Csv => render::abundance_csv(&records, g.precision),
        Format::Text => render::abundance_text(&records),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code: exit::OK,
    })
}

#[derive(Serialize)]
struct CaEntry {
    eps: String,
    candidate: CandidateFactorization,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

fn ca_entry(eps: &BigRational, c: CandidateFactorization, t: &PrimeTable) -> CaEntry {
    let value = factored::materialize(&c, t, VALUE_BITS).ok().map(|v| v.to_string());
    CaEntry {
        eps: eps.to_string(),
        candidate: c,
        value,
    }
}

/// Runs `f`, growing the prime table once if it reports the limit it needs.
fn with_grown_table<T>(
    g: &Global,
    f: impl Fn(&PrimeTable) -> Result<T, GenError>,
) -> Result<(T, PrimeTable), CliError> {
    let t = table(g, 0)?;
    match f(&t) {
        Ok(v) => Ok((v, t)),
        Err(GenError::Budget { requested, .. }) if requested > t.limit() => {
            let t = table(g, requested)?;
            Ok((f(&t).map_err(gen_err)?, t))
        }
        Err(e) => Err(gen_err(e)),
    }
}

pub fn ca_single(g: &Global, eps: &str) -> Result<Outcome, CliError> {
    if g.format == Format::Csv {
        return Err(csv_unsupported("ca"));
    }
    let e = parse_rational("--eps", eps)?;
    let (c, t) = with_grown_table(g, |t| generators::ca_candidate(&e, t, g.precision))?;
    let entry = ca_entry(&e, c, &t);
    let stdout = match g.format {
        Format::Text => render::ca_text(
            std::slice::from_ref(&entry)
                .iter()
                .map(|x| (&x.eps, &x.candidate, &x.value)),
        ),
        _ => json_out(&entry),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code: exit::OK,
    })
}

pub fn ca_sweep(g: &Global, eps0: &str, ratio: &str, count: usize) -> Result<Outcome, CliError> {
    if g.format == Format::Csv {
        return Err(csv_unsupported("ca"));
    }
    if count == 0 {
        return Err(CliError::new(exit::USAGE, "--sweep must be at least 1"));
    }
    let e0 = parse_rational("--eps0", eps0)?;
    let q = parse_rational("--ratio", ratio)?;
    let (list, t) = with_grown_table(g, |t| generators::ca_sweep(&e0, &q, count, t, g.precision))?;
    let entries: Vec<CaEntry> = list.into_iter().map(|(e, c)| ca_entry(&e, c, &t)).collect();
    let stdout = match g.format {
        Format::Text => render::ca_text(entries.iter().map(|x| (&x.eps, &x.candidate, &x.value))),
        _ => json_out(&json!({ "eps0": e0.to_string(), "ratio": q.to_string(), "candidates": entries })),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code: exit::OK,
    })
}

pub fn audit(g: &Global, input: &Path) -> Result<Outcome, CliError> {
    if g.format == Format::Csv {
        return Err(csv_unsupported("audit"));
    }
    let c = read_candidate(input)?;
    let t = table_for(g, &c)?;
    let cfg = AuditConfig {
        precision: g.precision,
        ..AuditConfig::default()
    };
    let rep = audit::full_audit(&c, &t, &cfg);
    let code = match rep.summary.status {
        SummaryStatus::SurvivesAllChecks => exit::OK,
        SummaryStatus::Excluded => exit::NEGATIVE,
        SummaryStatus::Inconclusive => exit::INCONCLUSIVE,
    };
    let stdout = match g.format {
        Format::Text => render::audit_text(&rep),
        _ => json_out(&rep),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code,
    })
}

#[derive(Serialize)]
struct NormalizeOutput<'a> {
    input: &'a CandidateFactorization,
    #[serde(flatten)]
    outcome: &'a NormalizeOutcome,
}

pub fn normalize(g: &Global, input: &Path) -> Result<Outcome, CliError> {
    if g.format == Format::Csv {
        return Err(csv_unsupported("normalize"));
    }
    let c = read_candidate(input)?;
    let t = table_for(g, &c)?;
    let out = audit::normalize(&c, &t, g.precision, g.step_limit).map_err(|e| match e {
        audit::AuditError::Factored(FactoredError::Budget { .. }) => CliError::new(exit::RESOURCE, e.to_string()),
        _ => CliError::new(exit::USAGE, e.to_string()),
    })?;
    let code = match out.status {
        NormalizeStatus::InWindow => exit::OK,
        NormalizeStatus::OutsideLogWindow | NormalizeStatus::SwapBlocked => exit::NEGATIVE,
        NormalizeStatus::StepLimit | NormalizeStatus::Undecided => exit::INCONCLUSIVE,
    };
    let stdout = match g.format {
        Format::Text => render::normalize_text(&c, &out),
        _ => json_out(&NormalizeOutput {
            input: &c,
            outcome: &out,
        }),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code,
    })
}

pub fn form1(g: &Global, input: &Path) -> Result<Outcome, CliError> {
    if g.format == Format::Csv {
        return Err(csv_unsupported("form1"));
    }
    let c = read_candidate(input)?;
    let t = table_for(g, &c)?;
    let v = audit::check_log_window_form1(&c, &t, g.precision);
    let code = match v.status {
        Status::Pass => exit::OK,
        Status::Fail => exit::NEGATIVE,
        Status::Unknown | Status::NotApplicable => exit::INCONCLUSIVE,
    };
    let stdout = match g.format {
        Format::Text => format!("log_window_form1: {:?}\n", v.status),
        _ => json_out(&json!({ "candidate": c, "id": "log_window_form1", "verdict": v })),
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code,
    })
}

pub fn selftest(g: &Global, gamma_override: Option<&str>) -> Result<Outcome, CliError> {
    if g.format == Format::Csv {
        return Err(csv_unsupported("selftest"));
    }
    let consts = match gamma_override {
        Some(s) => {
            let gamma = Interval::from_decimal(s, g.precision)
                .map_err(|e| CliError::new(exit::USAGE, format!("--gamma-override: {e}")))?;
            Constants::with_gamma(gamma)
        }
        None => Constants::new(g.precision),
    };
    let rep = run_selftest(&consts);
    let stdout = match g.format {
        Format::Json => json_out(&rep),
        _ => render::selftest_text(&rep),
    };
    let (code, stderr) = match rep.first_failure() {
        None => (exit::OK, None),
        Some(f) => (
            exit::NEGATIVE,
            Some(format!("selftest failed: {}: {}", f.name, f.detail)),
        ),
    };
    Ok(Outcome { stdout, stderr, code })
}
