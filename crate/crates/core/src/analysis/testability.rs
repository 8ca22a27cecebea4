use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;

use super::report::{Counterexample, ReportKind, VerificationReport};
use super::verify::SweepOptions;
use crate::codes::{CosetTable, LinearCode};
use crate::error::{check_budget, Error, Result};
use crate::gf2::BitWord;
use crate::local::Tester;
use crate::rational::Rational;

/// Result of a testability measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Testability {
    /// `min_{w ∉ C} Pr[T^w = ⊥] / dist(w, C)`, unclamped. In Monte Carlo mode
    /// this is the minimum over the samples, an upper bound on the true value.
    pub kappa: Rational,
    /// `min(κ̂, 1)`.
    pub clamped: Rational,
    /// First word, in enumeration order, attaining `κ̂`.
    pub witness: BitWord,
    pub witness_reject: Rational,
    pub witness_distance: Rational,
    /// Words examined.
    pub words: u128,
    pub exhaustive: bool,
}

impl Testability {
    pub fn to_report(&self, tester: &Tester, opts: &SweepOptions, threshold: &Rational) -> VerificationReport {
        let passed = self.kappa >= *threshold;
        VerificationReport {
            kind: ReportKind::Testability,
            code: opts.label.clone(),
            n: tester.code().n(),
            k: tester.code().k(),
            radius: Rational::one(),
            sweep_size: self.words,
            min_success: self.kappa.clone(),
            max_queries: tester.query_bound(),
            exhaustive: self.exhaustive,
            seed: opts.seed,
            passed,
            counterexample: (!passed).then(|| Counterexample {
                probability: Some(self.witness_reject.clone()),
                ..Counterexample::word(self.witness.clone())
            }),
            estimate: None,
        }
    }
}

/// Rejected outcome weight, as a numerator over the space's total weight.
fn rejected_weight(tester: &Tester, w: &BitWord) -> u64 {
    let space = tester.randomness();
    tester
        .checks()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.accepts_word(w))
        .map(|(j, _)| space.weight(j))
        .sum()
}

fn distances(code: &LinearCode, budget: u64) -> Result<CosetTable> {
    code.coset_table(budget)
}

/// Exact `κ̂` over all `2^n` words. Ratios are compared as integer fractions
/// `rejected·n / (total·flips)`; the arg-min is the smallest word index.
pub fn measure_testability(tester: &Tester, budget: u64) -> Result<Testability> {
    let code = tester.code();
    let n = code.n();
    if code.k() == n {
        return Err(Error::invalid("every word is a codeword; testability is undefined"));
    }
    if n >= 64 {
        return Err(Error::BudgetExceeded { what: "testability sweep", needed: u128::MAX, budget });
    }
    let words = 1u128 << n;
    check_budget("testability sweep", words, budget)?;
    let table = distances(code, budget)?;
    let total = tester.randomness().total_weight() as u128;
    let best = (0..1u64 << n)
        .into_par_iter()
        .filter_map(|v| {
            let w = BitWord::from_index(n, v);
            let flips = table.errors(&w);
            (flips > 0).then(|| (rejected_weight(tester, &w) as u128 * n as u128, total * flips as u128, v))
        })
        .reduce_with(|a, b| {
            // a.0/a.1 < b.0/b.1, ties to the smaller index: associative and commutative.
            let (l, r) = (a.0 * b.1, b.0 * a.1);
            if l < r || (l == r && a.2 < b.2) {
                a
            } else {
                b
            }
        })
        .expect("a proper subspace has non-codewords");
    let witness = BitWord::from_index(n, best.2);
    Ok(finish(tester, &table, witness, words, true))
}

fn finish(tester: &Tester, table: &CosetTable, witness: BitWord, words: u128, exhaustive: bool) -> Testability {
    let space = tester.randomness();
    let witness_reject = Rational::new(BigInt::from(rejected_weight(tester, &witness)), BigInt::from(space.total_weight()));
    let witness_distance = table.distance(&witness);
    let kappa = &witness_reject / &witness_distance;
    let clamped = kappa.clone().min(Rational::one());
    Testability { kappa, clamped, witness, witness_reject, witness_distance, words, exhaustive }
}

/// Sampled `κ̂`: the minimum ratio over `samples` words, each a uniformly
/// random codeword with a uniformly random number of uniformly placed flips.
/// Sample `j` uses stream `j` of `seed`.
pub fn measure_testability_mc(tester: &Tester, samples: u64, seed: u64, budget: u64) -> Result<Testability> {
    let code = tester.code();
    let n = code.n();
    if code.k() == n {
        return Err(Error::invalid("every word is a codeword; testability is undefined"));
    }
    let table = distances(code, budget)?;
    let model = super::corruption::CorruptionModel::new(super::corruption::CorruptionKind::Uniform, 0, seed);
    let total = tester.randomness().total_weight() as u128;
    let best = (0..samples)
        .into_par_iter()
        .map(|t| -> Result<Option<(u128, u128, u64, BitWord)>> {
            let mut rng = model.rng(t);
            let flips = rng.gen_range(1..=n);
            let (w, _) = super::corruption::CorruptionModel { weight: flips, ..model }.sample_pair(code, &mut rng)?;
            let e = table.errors(&w);
            Ok((e > 0).then(|| (rejected_weight(tester, &w) as u128 * n as u128, total * e as u128, t, w)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)).then(a.2.cmp(&b.2)))
        .ok_or_else(|| Error::invalid("no sampled word lay outside the code"))?;
    Ok(finish(tester, &table, best.3, samples as u128, false))
}
