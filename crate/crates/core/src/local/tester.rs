use std::sync::Arc;

use num_bigint::BigInt;

use super::{RandomnessSpace, Verdict};
use crate::codes::LinearCode;
use crate::error::{check_budget, Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::rational::Rational;

/// Accept rule applied to the answers of one check, in query order.
#[derive(Clone, Debug)]
pub enum CheckRule {
    /// XOR of the queried symbols is 0.
    EvenParity,
    /// The queried symbols form a codeword of the given code.
    MemberOf(Arc<LinearCode>),
}

/// One outcome of a tester: where to look and how to judge what was read.
#[derive(Clone, Debug)]
pub struct Check {
    pub positions: Vec<usize>,
    pub rule: CheckRule,
}

impl Check {
    pub fn accepts(&self, answers: &[bool]) -> bool {
        match &self.rule {
            CheckRule::EvenParity => answers.iter().filter(|&&b| b).count() % 2 == 0,
            CheckRule::MemberOf(code) => code.contains(&BitWord::from_bools(answers)).unwrap_or(false),
        }
    }

    pub fn accepts_word(&self, w: &BitWord) -> bool {
        self.accepts(&w.gather(&self.positions))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TesterKind {
    FullRead,
    ParitySample,
    Tensor,
    Custom,
}

/// A nonadaptive tester: outcome `j` runs `checks[j]`.
#[derive(Clone, Debug)]
pub struct Tester {
    code: Arc<LinearCode>,
    kind: TesterKind,
    checks: Vec<Check>,
    space: RandomnessSpace,
}

impl Tester {
    /// Builds a tester from explicit checks and outcome weights.
    ///
    /// Both rules are linear, so a check passes every codeword iff it passes
    /// every generator row; construction fails otherwise.
    pub fn from_checks(code: &Arc<LinearCode>, kind: TesterKind, checks: Vec<Check>, space: RandomnessSpace) -> Result<Self> {
        if checks.is_empty() || checks.len() != space.len() {
            return Err(Error::invalid("a tester needs one check per randomness outcome"));
        }
        for (j, check) in checks.iter().enumerate() {
            if let Some(&bad) = check.positions.iter().find(|&&p| p == 0 || p > code.n()) {
                return Err(Error::IndexOutOfRange { index: bad, len: code.n() });
            }
            if let CheckRule::MemberOf(inner) = &check.rule {
                if inner.n() != check.positions.len() {
                    return Err(Error::DimensionMismatch { expected: inner.n(), got: check.positions.len() });
                }
            }
            if let Some(g) = code.generator().row_iter().find(|g| !check.accepts_word(g)) {
                return Err(Error::invalid(format!("check {} rejects codeword {g}; tester would not be complete", j + 1)));
            }
        }
        Ok(Tester { code: Arc::clone(code), kind, checks, space })
    }

    /// Uniform choice among the given parity rows, which must be checks of `code`.
    pub fn parity_rows(code: &Arc<LinearCode>, rows: &BitMatrix) -> Result<Self> {
        if rows.rows() == 0 {
            return Err(Error::invalid("parity-sample tester needs at least one parity-check row"));
        }
        if rows.cols() != code.n() {
            return Err(Error::DimensionMismatch { expected: code.n(), got: rows.cols() });
        }
        let checks = rows.row_iter().map(|r| Check { positions: r.support(), rule: CheckRule::EvenParity }).collect();
        Self::from_checks(code, TesterKind::ParitySample, checks, RandomnessSpace::uniform(rows.rows()))
    }

    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    pub fn kind(&self) -> TesterKind {
        self.kind
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn randomness(&self) -> &RandomnessSpace {
        &self.space
    }

    /// Declared query bound: the largest check.
    pub fn query_bound(&self) -> usize {
        self.checks.iter().map(|c| c.positions.len()).max().unwrap_or(0)
    }

    /// True when every outcome makes the same number of queries.
    pub fn fixed_query_count(&self) -> Option<usize> {
        let q = self.checks[0].positions.len();
        self.checks.iter().all(|c| c.positions.len() == q).then_some(q)
    }

    pub fn queries(&self, outcome: usize) -> &[usize] {
        &self.checks[outcome].positions
    }

    pub fn verdict(&self, outcome: usize, answers: &[bool]) -> Verdict {
        if self.checks[outcome].accepts(answers) {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    /// `Pr[T^w = ⊥]`, exactly.
    pub fn exact_reject_probability(&self, w: &BitWord, budget: u64) -> Result<Rational> {
        if w.len() != self.code.n() {
            return Err(Error::DimensionMismatch { expected: self.code.n(), got: w.len() });
        }
        check_budget("tester randomness", self.checks.len() as u128, budget)?;
        let rejected: u64 = self
            .checks
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.accepts_word(w))
            .map(|(j, _)| self.space.weight(j))
            .sum();
        Ok(Rational::new(BigInt::from(rejected), BigInt::from(self.space.total_weight())))
    }

    /// First outcome (0-based) whose check rejects `w`.
    pub fn first_rejecting_outcome(&self, w: &BitWord) -> Option<usize> {
        self.checks.iter().position(|c| !c.accepts_word(w))
    }
}

/// One outcome that reads all `n` symbols and accepts iff the word is a codeword.
pub fn full_read_tester(code: &Arc<LinearCode>) -> Tester {
    let check = Check { positions: (1..=code.n()).collect(), rule: CheckRule::MemberOf(Arc::clone(code)) };
    Tester::from_checks(code, TesterKind::FullRead, vec![check], RandomnessSpace::deterministic())
        .expect("membership check is complete")
}

/// Uniformly random parity-check row of `H`, redundant rows included.
pub fn parity_sample_tester(code: &Arc<LinearCode>) -> Result<Tester> {
    Tester::parity_rows(code, code.parity_check())
}

/// Uniform choice among the grid's row lines and column lines; a line passes
/// when it is a codeword of the corresponding factor.
pub fn tensor_tester(code: &Arc<LinearCode>) -> Result<Tester> {
    let layout = code.tensor_layout().ok_or_else(|| Error::invalid("code has no tensor layout"))?;
    let mut checks = Vec::with_capacity(layout.rows + layout.cols);
    for r in 1..=layout.rows {
        checks.push(Check { positions: layout.row_positions(r), rule: CheckRule::MemberOf(Arc::clone(&layout.row_code)) });
    }
    for s in 1..=layout.cols {
        checks.push(Check { positions: layout.col_positions(s), rule: CheckRule::MemberOf(Arc::clone(&layout.col_code)) });
    }
    let n_checks = checks.len();
    Tester::from_checks(code, TesterKind::Tensor, checks, RandomnessSpace::uniform(n_checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hamming_code, parity_code, tensor_product, DEFAULT_BUDGET};
    use crate::rational::ratio;

    fn stacked() -> Arc<LinearCode> {
        Arc::new(LinearCode::from_parity_check(BitMatrix::from_strs(&["111111", "111000", "000111"]).unwrap()).unwrap())
    }

    fn tensor9() -> Arc<LinearCode> {
        let p = parity_code(3).unwrap();
        Arc::new(tensor_product(&p, &p).unwrap())
    }

    #[test]
    fn full_read_rejects_every_noncodeword() {
        let code = Arc::new(hamming_code(3).unwrap());
        let t = full_read_tester(&code);
        assert_eq!(t.query_bound(), 7);
        for v in 0u64..128 {
            let w = BitWord::from_index(7, v);
            let p = t.exact_reject_probability(&w, DEFAULT_BUDGET).unwrap();
            let expected = if code.contains(&w).unwrap() { ratio(0, 1) } else { ratio(1, 1) };
            assert_eq!(p, expected);
        }
    }

    #[test]
    fn parity_sample_on_stacked_rows() {
        let code = stacked();
        let t = parity_sample_tester(&code).unwrap();
        assert_eq!(t.randomness().len(), 3);
        assert_eq!(t.query_bound(), 6);
        let e1 = BitWord::unit(6, 1);
        // Rows 111111 and 111000 see position 1; 000111 does not.
        assert_eq!(t.exact_reject_probability(&e1, DEFAULT_BUDGET).unwrap(), ratio(2, 3));
        for c in code.codewords(DEFAULT_BUDGET).unwrap() {
            assert_eq!(t.exact_reject_probability(&c, DEFAULT_BUDGET).unwrap(), ratio(0, 1));
        }
    }

    #[test]
    fn single_row_parity_tester_is_deterministic() {
        let code = Arc::new(parity_code(3).unwrap());
        let t = parity_sample_tester(&code).unwrap();
        assert_eq!(t.randomness().len(), 1);
        assert_eq!(t.exact_reject_probability(&"100".parse().unwrap(), DEFAULT_BUDGET).unwrap(), ratio(1, 1));
        let empty = Arc::new(LinearCode::from_parity_check(BitMatrix::empty(3)).unwrap());
        assert!(parity_sample_tester(&empty).is_err());
    }

    #[test]
    fn tensor_tester_examples() {
        let code = tensor9();
        let t = tensor_tester(&code).unwrap();
        assert_eq!(t.randomness().len(), 6);
        assert_eq!(t.query_bound(), 3);
        assert_eq!(t.fixed_query_count(), Some(3));
        let single = BitWord::unit(9, 5);
        assert_eq!(t.exact_reject_probability(&single, DEFAULT_BUDGET).unwrap(), ratio(1, 3));
        assert_eq!(t.exact_reject_probability(&BitWord::ones(9), DEFAULT_BUDGET).unwrap(), ratio(1, 1));
        assert_eq!(t.exact_reject_probability(&BitWord::zeros(9), DEFAULT_BUDGET).unwrap(), ratio(0, 1));
        let plain = Arc::new(hamming_code(3).unwrap());
        assert!(tensor_tester(&plain).is_err());
    }

    #[test]
    fn incomplete_checks_are_refused() {
        let code = Arc::new(parity_code(3).unwrap());
        let bad = Check { positions: vec![1], rule: CheckRule::EvenParity };
        assert!(Tester::from_checks(&code, TesterKind::Custom, vec![bad], RandomnessSpace::uniform(1)).is_err());
        let out_of_range = Check { positions: vec![4], rule: CheckRule::EvenParity };
        assert!(Tester::from_checks(&code, TesterKind::Custom, vec![out_of_range], RandomnessSpace::uniform(1)).is_err());
    }

    #[test]
    fn query_sets_ignore_the_input() {
        let code = tensor9();
        let t = tensor_tester(&code).unwrap();
        for outcome in 0..t.randomness().len() {
            let q = t.queries(outcome).to_vec();
            assert!(q.len() <= t.query_bound());
            // The plan is a function of the outcome only; nothing about w enters.
            assert_eq!(q, t.queries(outcome));
        }
    }
}
