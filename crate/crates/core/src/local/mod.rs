//! Randomized local procedures: testers that accept or reject a word, and
//! correctors that recover one symbol or answer ⊥.
//!
//! Every procedure is nonadaptive by construction. Its randomness is an
//! explicit finite space, a plan maps `(index, outcome)` to a query list
//! before any symbol is read, and a separate decision step sees only the
//! answers to those queries. That split is what makes exact probabilities
//! computable by enumeration and lets a harness swap the input word while
//! holding the query set fixed.

mod corrector;
mod randomness;
mod tester;

pub use corrector::{
    enumerate_output_distribution, full_read_corrector, rldc_decoder_from_systematic, AlwaysBottomCorrector,
    Corrector, FullReadCorrector, RldcDecoder,
};
pub use randomness::{ProductSpace, RandomnessSpace};
pub use tester::{full_read_tester, parity_sample_tester, tensor_tester, Check, CheckRule, Tester, TesterKind};

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::rational::Rational;

/// A corrector's answer: a bit or the reject symbol ⊥.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Bit(bool),
    Bottom,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Bit(false) => "0",
            Symbol::Bit(true) => "1",
            Symbol::Bottom => "⊥",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tester verdict, ⊤ or ⊥.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
}

/// Exact distribution over `{0, 1, ⊥}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    pub zero: Rational,
    pub one: Rational,
    pub bottom: Rational,
}

impl Distribution {
    pub fn point(symbol: Symbol) -> Self {
        let mut d = Distribution { zero: Rational::zero(), one: Rational::zero(), bottom: Rational::zero() };
        *d.slot(symbol) = Rational::one();
        d
    }

    pub fn zeroed() -> Self {
        Distribution { zero: Rational::zero(), one: Rational::zero(), bottom: Rational::zero() }
    }

    pub fn prob(&self, symbol: Symbol) -> &Rational {
        match symbol {
            Symbol::Bit(false) => &self.zero,
            Symbol::Bit(true) => &self.one,
            Symbol::Bottom => &self.bottom,
        }
    }

    pub(crate) fn slot(&mut self, symbol: Symbol) -> &mut Rational {
        match symbol {
            Symbol::Bit(false) => &mut self.zero,
            Symbol::Bit(true) => &mut self.one,
            Symbol::Bottom => &mut self.bottom,
        }
    }

    pub fn total(&self) -> Rational {
        &self.zero + &self.one + &self.bottom
    }

    /// `Pr[output ∈ {correct, ⊥}]`.
    pub fn success(&self, correct: bool) -> Rational {
        self.prob(Symbol::Bit(correct)) + &self.bottom
    }

    pub fn is_point_mass(&self, symbol: Symbol) -> bool {
        self.prob(symbol).is_one()
    }
}

/// Queried positions and the total number of queries made.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryLog {
    pub positions: BTreeSet<usize>,
    pub count: usize,
}

impl QueryLog {
    pub fn record(&mut self, i: usize) {
        self.positions.insert(i);
        self.count += 1;
    }
}

/// What [`run_with_queries`] executes.
#[derive(Clone, Copy)]
pub enum Procedure<'a> {
    Tester(&'a Tester),
    /// A corrector asked for the symbol at a 1-indexed position.
    Corrector(&'a dyn Corrector, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutput {
    Verdict(Verdict),
    Symbol(Symbol),
}

/// Runs one sampled outcome of `procedure` on `w`, reading symbols only
/// through a logging oracle. Deterministic in `seed`.
pub fn run_with_queries(procedure: Procedure<'_>, w: &BitWord, seed: u64) -> Result<(RunOutput, QueryLog)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = QueryLog::default();
    let mut read = |positions: &[usize]| -> Result<Vec<bool>> {
        positions
            .iter()
            .map(|&p| {
                log.record(p);
                w.try_get(p)
            })
            .collect()
    };
    let output = match procedure {
        Procedure::Tester(t) => {
            if w.len() != t.code().n() {
                return Err(Error::DimensionMismatch { expected: t.code().n(), got: w.len() });
            }
            let outcome = t.randomness().sample(&mut rng);
            let answers = read(t.queries(outcome))?;
            RunOutput::Verdict(t.verdict(outcome, &answers))
        }
        Procedure::Corrector(m, i) => {
            if w.len() != m.code().n() {
                return Err(Error::DimensionMismatch { expected: m.code().n(), got: w.len() });
            }
            let outcome = m.randomness().sample(&mut rng);
            let queries = m.queries(i, &outcome)?;
            let answers = read(&queries)?;
            RunOutput::Symbol(m.decide(i, &outcome, &answers)?)
        }
    };
    Ok((output, log))
}

pub(crate) fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::IndexOutOfRange { index: i, len: n })
    } else {
        Ok(())
    }
}
