//! Text descriptors for nesting chains, one level per line:
//!
//! ```text
//! LEVEL 1 code=l1.pchk tester=full delta=2/3 kappa=1
//! LEVEL 2 code=l2.pchk tester=tensor delta=4/9 kappa=1
//! ```
//!
//! Paths are relative to the descriptor's directory. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::codes::{read_pchk, LinearCode};
use crate::error::{Error, Result};
use crate::local::{full_read_tester, parity_sample_tester, tensor_tester, Tester};
use crate::nesting::LevelSpec;
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TesterChoice {
    Full,
    Parity,
    Tensor,
}

impl std::str::FromStr for TesterChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(TesterChoice::Full),
            "parity" => Ok(TesterChoice::Parity),
            "tensor" => Ok(TesterChoice::Tensor),
            _ => Err(Error::invalid(format!("unknown tester {s:?}; expected full, parity or tensor"))),
        }
    }
}

/// One parsed descriptor line, before any file is read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLine {
    pub level: usize,
    pub code: PathBuf,
    pub tester: TesterChoice,
    pub delta: Rational,
    pub kappa: Rational,
}

pub fn parse_chain(text: &str) -> Result<Vec<LevelLine>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("LEVEL") {
            return Err(perr("expected a line starting with LEVEL".into()));
        }
        let level: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr("expected a level number after LEVEL".into()))?;
        if level != out.len() + 1 {
            return Err(perr(format!("expected LEVEL {}, found LEVEL {level}", out.len() + 1)));
        }
        let mut fields = BTreeMap::new();
        for t in tokens {
            let (k, v) = t.split_once('=').ok_or_else(|| perr(format!("expected key=value, found {t:?}")))?;
            if fields.insert(k, v).is_some() {
                return Err(perr(format!("duplicate key {k:?}")));
            }
        }
        let mut take = |k: &str| fields.remove(k).ok_or_else(|| perr(format!("missing {k}=")));
        let code = PathBuf::from(take("code")?);
        let tester = take("tester")?.parse().map_err(|e: Error| perr(e.to_string()))?;
        let delta = parse_rational(take("delta")?).map_err(|e| perr(e.to_string()))?;
        let kappa = parse_rational(take("kappa")?).map_err(|e| perr(e.to_string()))?;
        if let Some(k) = fields.keys().next() {
            return Err(perr(format!("unknown key {k:?}")));
        }
        out.push(LevelLine { level, code, tester, delta, kappa });
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 0, msg: "descriptor has no LEVEL lines".into() });
    }
    Ok(out)
}

pub fn load_code(path: &Path) -> Result<LinearCode> {
    read_pchk(BufReader::new(File::open(path)?))
}

/// Builds the tester a descriptor line asks for. A tensor tester needs the
/// grid layout, which is recovered from the parity-check rows.
pub fn make_tester(code: LinearCode, choice: TesterChoice) -> Result<Tester> {
    let code = match choice {
        TesterChoice::Tensor if code.tensor_layout().is_none() => {
            let layout = code
                .infer_tensor_layout()
                .ok_or_else(|| Error::Layout("code has no recognisable row/column structure".into()))?;
            code.with_tensor_layout(layout)
        }
        _ => code,
    };
    let code = Arc::new(code);
    match choice {
        TesterChoice::Full => Ok(full_read_tester(&code)),
        TesterChoice::Parity => parity_sample_tester(&code),
        TesterChoice::Tensor => tensor_tester(&code),
    }
}

/// Reads a descriptor and every code it references.
pub fn load_chain(path: &Path) -> Result<Vec<LevelSpec>> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_chain(&text)?
        .into_iter()
        .map(|l| {
            let code = load_code(&base.join(&l.code))?;
            Ok(LevelSpec { tester: make_tester(code, l.tester)?, delta_ltc: l.delta, kappa: l.kappa })
        })
        .collect()
}
