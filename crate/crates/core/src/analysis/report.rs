use std::fmt;
use std::io::Write;

use serde::Serialize;

use super::stats::Estimate;
use crate::error::Result;
use crate::gf2::BitWord;
use crate::local::Symbol;
use crate::rational::{format_rational, Rational};

/// Exact CSV header for verification reports.
pub const REPORT_HEADER: &str =
    "kind,code,n,k,radius_num,radius_den,sweep_size,min_success_num,min_success_den,max_queries,exhaustive,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportKind {
    Completeness,
    Soundness,
    Testability,
}

impl ReportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::Completeness => "completeness",
            ReportKind::Soundness => "soundness",
            ReportKind::Testability => "testability",
        }
    }
}

/// The input on which a check failed, or the extremal input of a sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub word: BitWord,
    /// Codeword the word was derived from, when there is one.
    pub source: Option<BitWord>,
    pub index: Option<usize>,
    /// Randomness outcome of a failing run.
    pub outcome: Option<Vec<usize>>,
    pub output: Option<Symbol>,
    /// Exact success (or rejection) probability at this input.
    pub probability: Option<Rational>,
}

impl Counterexample {
    pub fn word(word: BitWord) -> Self {
        Counterexample { word, source: None, index: None, outcome: None, output: None, probability: None }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w={}", self.word)?;
        if let Some(c) = &self.source {
            write!(f, " c={c}")?;
        }
        if let Some(i) = self.index {
            write!(f, " i={i}")?;
        }
        if let Some(o) = &self.outcome {
            let parts: Vec<String> = o.iter().map(|x| x.to_string()).collect();
            write!(f, " outcome=[{}]", parts.join(","))?;
        }
        if let Some(s) = self.output {
            write!(f, " output={s}")?;
        }
        if let Some(p) = &self.probability {
            write!(f, " p={}", format_rational(p))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub kind: ReportKind,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub radius: Rational,
    /// Number of inputs examined: `(w, i)` pairs, runs, or words.
    pub sweep_size: u128,
    /// Minimum success probability; `κ̂` for testability reports. Exact when
    /// `exhaustive`, the empirical proportion otherwise.
    pub min_success: Rational,
    pub max_queries: usize,
    pub exhaustive: bool,
    pub seed: u64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub estimate: Option<Estimate>,
}

#[derive(Serialize)]
struct Row<'a> {
    kind: &'a str,
    code: &'a str,
    n: usize,
    k: usize,
    radius_num: String,
    radius_den: String,
    sweep_size: String,
    min_success_num: String,
    min_success_den: String,
    max_queries: usize,
    exhaustive: bool,
    seed: u64,
}

impl VerificationReport {
    fn row(&self) -> Row<'_> {
        Row {
            kind: self.kind.as_str(),
            code: &self.code,
            n: self.n,
            k: self.k,
            radius_num: self.radius.numer().to_string(),
            radius_den: self.radius.denom().to_string(),
            sweep_size: self.sweep_size.to_string(),
            min_success_num: self.min_success.numer().to_string(),
            min_success_den: self.min_success.denom().to_string(),
            max_queries: self.max_queries,
            exhaustive: self.exhaustive,
            seed: self.seed,
        }
    }
}

pub fn write_reports_csv<W: Write>(reports: &[VerificationReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(REPORT_HEADER.split(','))?;
    for r in reports {
        w.serialize(r.row())?;
    }
    w.flush()?;
    Ok(())
}

/// JSON array with the CSV fields, plus pass/fail, counterexample and interval.
pub fn write_reports_json<W: Write>(reports: &[VerificationReport], mut out: W) -> Result<()> {
    let values: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r.row()).expect("plain fields");
            let obj = v.as_object_mut().expect("row is an object");
            obj.insert("passed".into(), r.passed.into());
            obj.insert("counterexample".into(), r.counterexample.as_ref().map(|c| c.to_string()).into());
            obj.insert("estimate".into(), serde_json::to_value(r.estimate).expect("plain fields"));
            v
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &values)?;
    out.write_all(b"\n")?;
    Ok(())
}
