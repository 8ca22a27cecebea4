//! Nesting a small code inside a large one, and the corrector that combines
//! a zoom-in on one block with repeated runs of the large code's tester.
//!
//! `nest(C₁, C₂)` keeps the words of `C₁` whose every aligned length-`n`
//! block, and the final length-`n` window when `n ∤ N`, lies in `C₂`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::analysis::measure_testability;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::local::{check_index, Corrector, Distribution, ProductSpace, Symbol, Tester, Verdict};
use crate::rational::{from_usize, pow, ratio, Rational};

/// 1-indexed inclusive interval of positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i <= self.end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}..{}}}", self.start, self.end)
    }
}

/// Block structure of `[N]` induced by nesting a length-`n` code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NestedLayout {
    outer_len: usize,
    inner_len: usize,
}

impl NestedLayout {
    pub fn new(outer_len: usize, inner_len: usize) -> Result<Self> {
        if inner_len == 0 || inner_len > outer_len {
            return Err(Error::Layout(format!("inner length {inner_len} must lie in 1..={outer_len}")));
        }
        Ok(NestedLayout { outer_len, inner_len })
    }

    pub fn outer_len(&self) -> usize {
        self.outer_len
    }

    pub fn inner_len(&self) -> usize {
        self.inner_len
    }

    /// `⌊N/n⌋`.
    pub fn aligned_count(&self) -> usize {
        self.outer_len / self.inner_len
    }

    pub fn has_tail(&self) -> bool {
        !self.outer_len.is_multiple_of(self.inner_len)
    }

    pub fn aligned_blocks(&self) -> impl Iterator<Item = Interval> + '_ {
        let n = self.inner_len;
        (0..self.aligned_count()).map(move |k| Interval { start: k * n + 1, end: k * n + n })
    }

    /// `{N-n+1, ..., N}` when `n ∤ N`.
    pub fn tail_block(&self) -> Option<Interval> {
        self.has_tail().then(|| Interval { start: self.outer_len - self.inner_len + 1, end: self.outer_len })
    }

    /// Every constrained block: aligned blocks, then the tail.
    pub fn blocks(&self) -> Vec<Interval> {
        self.aligned_blocks().chain(self.tail_block()).collect()
    }

    /// Block used to correct position `i`, and `i`'s offset inside it.
    ///
    /// Position `i` goes to aligned block `⌈i/n⌉` when that block exists and
    /// to the tail block otherwise, so `i ∈ I` always holds.
    pub fn block_for(&self, i: usize) -> Result<(Interval, usize)> {
        check_index(i, self.outer_len)?;
        let n = self.inner_len;
        let block = i.div_ceil(n);
        let interval = if block <= self.aligned_count() {
            Interval { start: (block - 1) * n + 1, end: block * n }
        } else {
            Interval { start: self.outer_len - n + 1, end: self.outer_len }
        };
        Ok((interval, i + 1 - interval.start))
    }
}

/// `(I, i*)` for position `i` of a length-`N` word nested with length-`n` blocks.
pub fn block_interval(i: usize, outer_len: usize, inner_len: usize) -> Result<(Interval, usize)> {
    NestedLayout::new(outer_len, inner_len)?.block_for(i)
}

/// Parity checks of `c1` followed by a copy of those of `c2` on every block.
pub fn nest(c1: &LinearCode, c2: &LinearCode) -> Result<LinearCode> {
    let layout = NestedLayout::new(c1.n(), c2.n())?;
    let big_n = c1.n();
    let mut h = c1.parity_check().clone();
    for block in layout.blocks() {
        for check in c2.parity_check().row_iter() {
            let support: Vec<usize> = check.support().iter().map(|&s| block.start - 1 + s).collect();
            h.push_row(BitWord::from_support(big_n, &support))?;
        }
    }
    LinearCode::from_parity_check(h)
}

/// `1 − ε₁ − (n/N)·⌈N/n⌉·ε₂`.
pub fn rate_lower_bound(eps1: &Rational, eps2: &Rational, outer_len: usize, inner_len: usize) -> Result<Rational> {
    let unit = Rational::zero()..=Rational::one();
    if !unit.contains(eps1) || !unit.contains(eps2) {
        return Err(Error::invalid("rate deficits must lie in [0, 1]"));
    }
    if inner_len == 0 || inner_len > outer_len {
        return Err(Error::Layout(format!("inner length {inner_len} must lie in 1..={outer_len}")));
    }
    let blocks = outer_len.div_ceil(inner_len);
    let factor = Rational::new(BigInt::from(inner_len * blocks), BigInt::from(outer_len));
    Ok(Rational::one() - eps1 - factor * eps2)
}

/// `ln 3` to 40 significant digits.
fn ln3() -> Rational {
    Rational::new(
        "1098612288668109691395245236922525704647".parse().unwrap(),
        num_traits::pow(BigInt::from(10), 39),
    )
}

/// Per-run rejection lower bound `κδn/(2N)` used by the repetition count.
pub fn per_run_detection(outer_len: usize, inner_len: usize, delta: &Rational, kappa: &Rational) -> Rational {
    kappa * delta * from_usize(inner_len) / from_usize(2 * outer_len)
}

/// Smallest `t` with `t ≥ 2·ln 3·N/(δκn)`, which forces
/// `(1 − κδn/(2N))^t ≤ e^{−ln 3} = 1/3`. The bound is re-checked exactly
/// for `t ≤ 100 000`; larger counts rest on `1 − x ≤ e^{−x}` alone.
pub fn repetitions(outer_len: usize, inner_len: usize, delta: &Rational, kappa: &Rational) -> Result<u64> {
    let unit = |x: &Rational| x.is_positive() && *x <= Rational::one();
    if !unit(delta) || !unit(kappa) {
        return Err(Error::invalid("delta and kappa must lie in (0, 1]"));
    }
    if inner_len == 0 || inner_len > outer_len {
        return Err(Error::Layout(format!("inner length {inner_len} must lie in 1..={outer_len}")));
    }
    let x = per_run_detection(outer_len, inner_len, delta, kappa);
    let t = (ln3() / &x).ceil().to_integer().to_u64().ok_or_else(|| Error::invalid("repetition count overflows u64"))?;
    if t <= 100_000 && repetition_failure_bound(outer_len, inner_len, delta, kappa, t) > ratio(1, 3) {
        return Err(Error::invalid(format!("repetition count {t} fails the 1/3 certificate")));
    }
    Ok(t)
}

/// `(1 − κδn/(2N))^t`, exactly.
pub fn repetition_failure_bound(outer_len: usize, inner_len: usize, delta: &Rational, kappa: &Rational, t: u64) -> Rational {
    pow(&(Rational::one() - per_run_detection(outer_len, inner_len, delta, kappa)), t)
}

/// A nested code with everything its corrector needs.
#[derive(Debug)]
pub struct NestedCode {
    code: Arc<LinearCode>,
    outer: Arc<LinearCode>,
    layout: NestedLayout,
    outer_tester: Tester,
    inner: Arc<dyn Corrector>,
    delta_ltc: Rational,
    kappa: Rational,
}

impl NestedCode {
    /// Nests `inner`'s code inside `outer_tester`'s code.
    ///
    /// `delta_ltc` must not exceed the outer code's distance and `kappa` must
    /// not exceed its tester's testability. Both are checked exactly whenever
    /// the check fits in `budget`; beyond that they are taken as certified.
    pub fn new(outer_tester: Tester, delta_ltc: Rational, kappa: Rational, inner: Arc<dyn Corrector>, budget: u64) -> Result<Self> {
        let outer = Arc::clone(outer_tester.code());
        let layout = NestedLayout::new(outer.n(), inner.code().n())?;
        if !inner.radius().is_positive() {
            return Err(Error::invalid("inner corrector must have a positive radius"));
        }
        let unit = |x: &Rational| x.is_positive() && *x <= Rational::one();
        if !unit(&delta_ltc) || !unit(&kappa) {
            return Err(Error::invalid("delta_ltc and kappa must lie in (0, 1]"));
        }
        match outer.min_distance(budget) {
            Ok(d) if delta_ltc > d => {
                return Err(Error::invalid(format!(
                    "delta_ltc {delta_ltc} exceeds the outer code's minimum distance {d}"
                )))
            }
            Err(e) if !e.is_budget() => return Err(e),
            _ => {}
        }
        let words = 1u128.checked_shl(outer.n() as u32).unwrap_or(u128::MAX);
        if words.saturating_mul(outer_tester.checks().len() as u128) <= budget as u128 {
            let measured = measure_testability(&outer_tester, budget)?;
            if kappa > measured.kappa {
                return Err(Error::invalid(format!(
                    "kappa {kappa} exceeds the tester's measured testability {}",
                    measured.kappa
                )));
            }
        }
        let code = Arc::new(nest(&outer, inner.code())?);
        Ok(NestedCode { code, outer, layout, outer_tester, inner, delta_ltc, kappa })
    }

    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    pub fn outer(&self) -> &Arc<LinearCode> {
        &self.outer
    }

    pub fn layout(&self) -> &NestedLayout {
        &self.layout
    }

    pub fn outer_tester(&self) -> &Tester {
        &self.outer_tester
    }

    pub fn inner(&self) -> &Arc<dyn Corrector> {
        &self.inner
    }

    pub fn delta_ltc(&self) -> &Rational {
        &self.delta_ltc
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    /// Declared radius `δ_LTC / 2`.
    pub fn radius(&self) -> Rational {
        &self.delta_ltc / from_usize(2)
    }

    /// Repetition count for the tester, from the inner corrector's radius.
    pub fn repetitions(&self) -> Result<u64> {
        repetitions(self.layout.outer_len(), self.layout.inner_len(), self.inner.radius(), &self.kappa)
    }
}

/// Corrector for a nested code: zoom into the block holding `i`, run the
/// inner corrector there, run the outer tester `t` times, and answer ⊥ if any
/// tester run rejects.
#[derive(Clone, Debug)]
pub struct NestedCorrector {
    nested: Arc<NestedCode>,
    repetitions: usize,
    radius: Rational,
    inner_arity: usize,
}

pub fn nested_corrector(nested: &Arc<NestedCode>) -> Result<NestedCorrector> {
    let t = nested.repetitions()?;
    let t = usize::try_from(t).map_err(|_| Error::invalid("repetition count does not fit in memory"))?;
    Ok(NestedCorrector::with_repetitions(nested, t))
}

impl NestedCorrector {
    /// Same procedure with an explicit tester repetition count.
    pub fn with_repetitions(nested: &Arc<NestedCode>, t: usize) -> Self {
        NestedCorrector {
            nested: Arc::clone(nested),
            repetitions: t,
            radius: nested.radius(),
            inner_arity: nested.inner.randomness().arity(),
        }
    }

    pub fn nested(&self) -> &Arc<NestedCode> {
        &self.nested
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    fn split<'a>(&self, outcome: &'a [usize]) -> Result<(&'a [usize], &'a [usize])> {
        let expected = self.inner_arity + self.repetitions;
        if outcome.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: outcome.len() });
        }
        Ok(outcome.split_at(self.inner_arity))
    }
}

impl Corrector for NestedCorrector {
    fn code(&self) -> &Arc<LinearCode> {
        &self.nested.code
    }

    fn radius(&self) -> &Rational {
        &self.radius
    }

    fn query_bound(&self) -> usize {
        self.nested.inner.query_bound() + self.repetitions * self.nested.outer_tester.query_bound()
    }

    fn randomness(&self) -> ProductSpace {
        let mut space = self.nested.inner.randomness();
        space = space.with_factor(self.nested.outer_tester.randomness().clone(), self.repetitions);
        space
    }

    fn queries(&self, i: usize, outcome: &[usize]) -> Result<Vec<usize>> {
        let (inner_outcome, runs) = self.split(outcome)?;
        let (block, local) = self.nested.layout.block_for(i)?;
        let mut out: Vec<usize> =
            self.nested.inner.queries(local, inner_outcome)?.into_iter().map(|p| block.start - 1 + p).collect();
        for &run in runs {
            out.extend_from_slice(self.nested.outer_tester.queries(run));
        }
        Ok(out)
    }

    fn decide(&self, i: usize, outcome: &[usize], answers: &[bool]) -> Result<Symbol> {
        let (inner_outcome, runs) = self.split(outcome)?;
        let (_, local) = self.nested.layout.block_for(i)?;
        let inner_len = self.nested.inner.queries(local, inner_outcome)?.len();
        if answers.len() < inner_len {
            return Err(Error::DimensionMismatch { expected: inner_len, got: answers.len() });
        }
        let (inner_answers, mut rest) = answers.split_at(inner_len);
        let inner_symbol = self.nested.inner.decide(local, inner_outcome, inner_answers)?;
        let tester = &self.nested.outer_tester;
        let mut rejected = false;
        for &run in runs {
            let q = tester.queries(run).len();
            if rest.len() < q {
                return Err(Error::DimensionMismatch { expected: q, got: rest.len() });
            }
            let (these, tail) = rest.split_at(q);
            rejected |= tester.verdict(run, these) == Verdict::Reject;
            rest = tail;
        }
        Ok(if rejected { Symbol::Bottom } else { inner_symbol })
    }

    fn max_queries(&self, i: usize) -> Result<usize> {
        let (_, local) = self.nested.layout.block_for(i)?;
        Ok(self.nested.inner.max_queries(local)? + self.repetitions * self.nested.outer_tester.query_bound())
    }

    /// Closed form: with `a = (1 − r)^t` the chance that every tester run
    /// accepts, the output is the inner output with probability `a` and ⊥
    /// otherwise. The `t` runs and the inner run use disjoint coordinates of
    /// the product space, hence are independent.
    fn output_distribution(&self, w: &BitWord, i: usize, budget: u64) -> Result<Distribution> {
        let n = self.nested.code.n();
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len() });
        }
        let (block, local) = self.nested.layout.block_for(i)?;
        let r = self.nested.outer_tester.exact_reject_probability(w, budget)?;
        let all_accept = pow(&(Rational::one() - r), self.repetitions as u64);
        let inner = self.nested.inner.output_distribution(&w.restrict(block.start, block.end), local, budget)?;
        Ok(Distribution {
            zero: &all_accept * &inner.zero,
            one: &all_accept * &inner.one,
            bottom: (Rational::one() - &all_accept) + &all_accept * &inner.bottom,
        })
    }

    fn label(&self) -> String {
        format!("nested[{}](t={})", self.nested.inner.label(), self.repetitions)
    }
}

/// One level of an iterated construction: a testable code, its tester, a
/// certified distance lower bound and a certified testability.
#[derive(Clone, Debug)]
pub struct LevelSpec {
    pub tester: Tester,
    pub delta_ltc: Rational,
    pub kappa: Rational,
}

impl LevelSpec {
    pub fn code(&self) -> &Arc<LinearCode> {
        self.tester.code()
    }
}

/// Per-level accounting of an iterated construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSummary {
    pub level: usize,
    pub n: usize,
    pub k: usize,
    pub radius: Rational,
    /// Tester repetitions `t_j` (absent for the base level).
    pub repetitions: Option<u64>,
    /// Tester query bound `q_j` (absent for the base level).
    pub tester_queries: Option<usize>,
    pub rate_bound: Rational,
    pub query_bound: usize,
}

/// A code with a relaxed local corrector and tracked bounds.
#[derive(Clone, Debug)]
pub struct Rlcc {
    pub code: Arc<LinearCode>,
    pub corrector: Arc<dyn Corrector>,
    pub rate_bound: Rational,
    pub query_bound: usize,
    pub levels: Vec<LevelSummary>,
}

impl Rlcc {
    /// The base of an iteration: a code with its full-read corrector.
    pub fn base(code: &Arc<LinearCode>, budget: u64) -> Result<Self> {
        let corrector = crate::local::full_read_corrector(code, budget)?;
        let radius = corrector.radius().clone();
        let rate_bound = code.rate();
        let summary = LevelSummary {
            level: 1,
            n: code.n(),
            k: code.k(),
            radius,
            repetitions: None,
            tester_queries: None,
            rate_bound: rate_bound.clone(),
            query_bound: code.n(),
        };
        Ok(Rlcc { code: Arc::clone(code), corrector: Arc::new(corrector), rate_bound, query_bound: code.n(), levels: vec![summary] })
    }
}

/// One more nesting step: `final_ltc ⋔ inner`, with the nested corrector.
pub fn boost(final_ltc: &LevelSpec, inner: &Rlcc, budget: u64) -> Result<(Arc<NestedCode>, Rlcc)> {
    let nested = Arc::new(NestedCode::new(
        final_ltc.tester.clone(),
        final_ltc.delta_ltc.clone(),
        final_ltc.kappa.clone(),
        Arc::clone(&inner.corrector),
        budget,
    )?);
    let corrector = nested_corrector(&nested)?;
    let t = corrector.repetitions();
    let q = final_ltc.tester.query_bound();
    let big_n = final_ltc.code().n();
    let inner_eps = Rational::one() - &inner.rate_bound;
    let rate_bound = rate_lower_bound(&final_ltc.code().epsilon(), &inner_eps.max(Rational::zero()).min(Rational::one()), big_n, inner.code.n())?;
    let query_bound = inner.query_bound + t * q;
    debug_assert_eq!(query_bound, corrector.query_bound());
    let mut levels = inner.levels.clone();
    levels.push(LevelSummary {
        level: levels.len() + 1,
        n: big_n,
        k: nested.code().k(),
        radius: corrector.radius().clone(),
        repetitions: Some(t as u64),
        tester_queries: Some(q),
        rate_bound: rate_bound.clone(),
        query_bound,
    });
    let code = Arc::clone(nested.code());
    Ok((nested, Rlcc { code, corrector: Arc::new(corrector), rate_bound, query_bound, levels }))
}

/// Result of [`iterate_nesting`].
#[derive(Clone, Debug)]
pub struct IteratedNesting {
    /// Nested codes for levels 2..=m, innermost first.
    pub chain: Vec<Arc<NestedCode>>,
    pub rlcc: Rlcc,
}

/// `LTC_m ⋔ (… (LTC_2 ⋔ LTC_1) …)`, starting from the full-read corrector of
/// `LTC_1` and applying [`boost`] once per further level.
pub fn iterate_nesting(family: &[LevelSpec], budget: u64) -> Result<IteratedNesting> {
    let first = family.first().ok_or_else(|| Error::invalid("a nesting family needs at least one level"))?;
    for pair in family.windows(2) {
        if pair[0].code().n() > pair[1].code().n() {
            return Err(Error::Layout(format!(
                "block lengths must be nondecreasing, found {} before {}",
                pair[0].code().n(),
                pair[1].code().n()
            )));
        }
    }
    let mut rlcc = Rlcc::base(first.code(), budget)?;
    let mut chain = Vec::with_capacity(family.len().saturating_sub(1));
    for level in &family[1..] {
        let (nested, next) = boost(level, &rlcc, budget)?;
        chain.push(nested);
        rlcc = next;
    }
    Ok(IteratedNesting { chain, rlcc })
}

/// The closed-form series `1 − ε(1 + Σ_{j=2}^m Π_{j'=2}^j (n_{j'−1}/n_{j'})⌈n_{j'}/n_{j'−1}⌉)`
/// for a family with uniform rate deficit `ε`.
///
/// Unrolling the one-step bound gives the products in the opposite order
/// (`Π_{j'=j}^m`); the two agree whenever every consecutive ratio factor is
/// the same, in particular when `n_j | n_{j+1}`. [`iterate_nesting`] uses the
/// one-step recursion.
pub fn series_rate_bound(eps: &Rational, lengths: &[usize]) -> Result<Rational> {
    if lengths.is_empty() || lengths.windows(2).any(|p| p[0] == 0 || p[0] > p[1]) {
        return Err(Error::Layout("block lengths must be positive and nondecreasing".into()));
    }
    let mut sum = Rational::one();
    let mut product = Rational::one();
    for pair in lengths.windows(2) {
        product *= Rational::new(BigInt::from(pair[0] * pair[1].div_ceil(pair[0])), BigInt::from(pair[1]));
        sum += &product;
    }
    Ok(Rational::one() - eps * sum)
}

/// Stacked parity checks for a whole chain, built independently of [`nest`]:
/// level `j`'s checks, plus every earlier level's checks copied onto each block.
pub fn stacked_checks(levels: &[Arc<LinearCode>]) -> Result<BitMatrix> {
    let mut current = levels.first().ok_or_else(|| Error::invalid("empty chain"))?.parity_check().clone();
    for outer in &levels[1..] {
        let layout = NestedLayout::new(outer.n(), current.cols())?;
        let mut h = outer.parity_check().clone();
        for block in layout.blocks() {
            for row in current.row_iter() {
                let mut wide = BitWord::zeros(outer.n());
                wide.embed(block.start, row);
                h.push_row(wide)?;
            }
        }
        current = h;
    }
    Ok(current)
}
