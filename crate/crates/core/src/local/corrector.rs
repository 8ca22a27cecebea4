use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{check_index, Distribution, ProductSpace, RandomnessSpace, Symbol};
use crate::codes::{LinearCode, SystematicCode};
use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::rational::Rational;

/// A nonadaptive randomized corrector for a code of block length `n`.
///
/// `queries` fixes the positions to read from `(i, outcome)` alone; `decide`
/// maps the answers, in query order, to a symbol. Outcomes are flattened
/// tuples drawn from [`Corrector::randomness`].
pub trait Corrector: Send + Sync + fmt::Debug {
    fn code(&self) -> &Arc<LinearCode>;

    /// Declared correcting radius, as a relative distance.
    fn radius(&self) -> &Rational;

    /// Declared upper bound on queries per run.
    fn query_bound(&self) -> usize;

    fn randomness(&self) -> ProductSpace;

    fn queries(&self, i: usize, outcome: &[usize]) -> Result<Vec<usize>>;

    fn decide(&self, i: usize, outcome: &[usize], answers: &[bool]) -> Result<Symbol>;

    /// Largest query count over all outcomes for target `i`.
    fn max_queries(&self, i: usize) -> Result<usize> {
        check_index(i, self.code().n())?;
        Ok(self.query_bound())
    }

    /// Exact distribution of the output on `(w, i)`.
    fn output_distribution(&self, w: &BitWord, i: usize, budget: u64) -> Result<Distribution> {
        enumerate_output_distribution(self, w, i, budget)
    }

    fn label(&self) -> String;
}

/// Output distribution by walking every outcome tuple of the product space.
pub fn enumerate_output_distribution<C: Corrector + ?Sized>(m: &C, w: &BitWord, i: usize, budget: u64) -> Result<Distribution> {
    let n = m.code().n();
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.len() });
    }
    check_index(i, n)?;
    let space = m.randomness();
    let mut dist = Distribution::zeroed();
    space.for_each(budget, |outcome| {
        let positions = m.queries(i, outcome)?;
        let answers = positions.iter().map(|&p| w.try_get(p)).collect::<Result<Vec<_>>>()?;
        let symbol = m.decide(i, outcome, &answers)?;
        *dist.slot(symbol) += space.probability(outcome);
        Ok(())
    })?;
    Ok(dist)
}

/// Reads the whole word; returns `w_i` for codewords and ⊥ otherwise.
#[derive(Clone, Debug)]
pub struct FullReadCorrector {
    code: Arc<LinearCode>,
    radius: Rational,
}

impl FullReadCorrector {
    /// Radius `(d-1)/n`, one step inside the exact minimum distance `d/n`.
    pub fn new(code: &Arc<LinearCode>, budget: u64) -> Result<Self> {
        let d = code.min_weight(budget)?;
        let radius = Rational::new(BigInt::from(d - 1), BigInt::from(code.n()));
        Ok(FullReadCorrector { code: Arc::clone(code), radius })
    }
}

pub fn full_read_corrector(code: &Arc<LinearCode>, budget: u64) -> Result<FullReadCorrector> {
    FullReadCorrector::new(code, budget)
}

impl Corrector for FullReadCorrector {
    fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    fn radius(&self) -> &Rational {
        &self.radius
    }

    fn query_bound(&self) -> usize {
        self.code.n()
    }

    fn randomness(&self) -> ProductSpace {
        ProductSpace::single(RandomnessSpace::deterministic())
    }

    fn queries(&self, i: usize, _outcome: &[usize]) -> Result<Vec<usize>> {
        check_index(i, self.code.n())?;
        Ok((1..=self.code.n()).collect())
    }

    fn decide(&self, i: usize, _outcome: &[usize], answers: &[bool]) -> Result<Symbol> {
        check_index(i, self.code.n())?;
        let w = BitWord::from_bools(answers);
        Ok(if self.code.contains(&w)? { Symbol::Bit(w.get(i)) } else { Symbol::Bottom })
    }

    fn output_distribution(&self, w: &BitWord, i: usize, _budget: u64) -> Result<Distribution> {
        check_index(i, self.code.n())?;
        Ok(Distribution::point(if self.code.contains(w)? { Symbol::Bit(w.get(i)) } else { Symbol::Bottom }))
    }

    fn label(&self) -> String {
        "full-read".into()
    }
}

/// Negative control that answers ⊥ on every input, codewords included.
#[derive(Clone, Debug)]
pub struct AlwaysBottomCorrector {
    code: Arc<LinearCode>,
    radius: Rational,
}

impl AlwaysBottomCorrector {
    pub fn new(code: &Arc<LinearCode>, radius: Rational) -> Self {
        AlwaysBottomCorrector { code: Arc::clone(code), radius }
    }
}

impl Corrector for AlwaysBottomCorrector {
    fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    fn radius(&self) -> &Rational {
        &self.radius
    }

    fn query_bound(&self) -> usize {
        0
    }

    fn randomness(&self) -> ProductSpace {
        ProductSpace::single(RandomnessSpace::deterministic())
    }

    fn queries(&self, i: usize, _outcome: &[usize]) -> Result<Vec<usize>> {
        check_index(i, self.code.n())?;
        Ok(Vec::new())
    }

    fn decide(&self, _i: usize, _outcome: &[usize], _answers: &[bool]) -> Result<Symbol> {
        Ok(Symbol::Bottom)
    }

    fn label(&self) -> String {
        "always-bottom".into()
    }
}

/// Relaxed local decoder for message symbols, obtained by correcting the
/// codeword position that carries each message symbol.
#[derive(Clone, Debug)]
pub struct RldcDecoder {
    systematic: SystematicCode,
    corrector: Arc<dyn Corrector>,
}

pub fn rldc_decoder_from_systematic(s: &SystematicCode, m: Arc<dyn Corrector>) -> Result<RldcDecoder> {
    let same = Arc::ptr_eq(s.code(), m.code()) || s.code().parity_check() == m.code().parity_check();
    if !same {
        return Err(Error::invalid("corrector belongs to a different code"));
    }
    Ok(RldcDecoder { systematic: s.clone(), corrector: m })
}

impl RldcDecoder {
    pub fn message_length(&self) -> usize {
        self.systematic.code().k()
    }

    pub fn radius(&self) -> &Rational {
        self.corrector.radius()
    }

    pub fn query_bound(&self) -> usize {
        self.corrector.query_bound()
    }

    pub fn randomness(&self) -> ProductSpace {
        self.corrector.randomness()
    }

    pub fn queries(&self, i: usize, outcome: &[usize]) -> Result<Vec<usize>> {
        self.corrector.queries(self.systematic.message_position(i)?, outcome)
    }

    pub fn decide(&self, i: usize, outcome: &[usize], answers: &[bool]) -> Result<Symbol> {
        self.corrector.decide(self.systematic.message_position(i)?, outcome, answers)
    }

    pub fn output_distribution(&self, w: &BitWord, i: usize, budget: u64) -> Result<Distribution> {
        self.corrector.output_distribution(w, self.systematic.message_position(i)?, budget)
    }

    pub fn encode(&self, m: &BitWord) -> Result<BitWord> {
        self.systematic.encode(m)
    }
}
