use std::io::Write;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::corruption::{error_patterns, patterns_up_to, CorruptionKind, CorruptionModel};
use super::report::{Counterexample, ReportKind, VerificationReport};
use super::stats::Estimate;
use crate::codes::LinearCode;
use crate::error::{check_budget, Error, Result};
use crate::gf2::BitWord;
use crate::local::{Corrector, Symbol};
use crate::nesting::NestedCorrector;
use crate::rational::{floor_to_u64, from_usize, pow, two_thirds, Rational};

/// Shared settings for verification runs.
#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub budget: u64,
    pub seed: u64,
    /// Sample count for a Monte Carlo fallback when the exact run exceeds the
    /// budget; `None` turns the overflow into an error.
    pub fallback_samples: Option<u64>,
    /// Value of the `code` column.
    pub label: String,
}

impl SweepOptions {
    pub fn new(budget: u64, seed: u64, label: impl Into<String>) -> Self {
        SweepOptions { budget, seed, fallback_samples: None, label: label.into() }
    }
}

fn base_report(kind: ReportKind, code: &LinearCode, radius: Rational, opts: &SweepOptions) -> VerificationReport {
    VerificationReport {
        kind,
        code: opts.label.clone(),
        n: code.n(),
        k: code.k(),
        radius,
        sweep_size: 0,
        min_success: Rational::one(),
        max_queries: 0,
        exhaustive: true,
        seed: opts.seed,
        passed: true,
        counterexample: None,
        estimate: None,
    }
}

fn codeword_count(code: &LinearCode) -> u128 {
    1u128.checked_shl(code.k() as u32).unwrap_or(u128::MAX)
}

/// Checks that every codeword, index and randomness outcome yields `c_i`.
///
/// When the full product of outcomes fits the budget every run is executed.
/// Otherwise the exact output distribution of each `(c, i)` is computed;
/// since every outcome has positive probability, "every run returns `c_i`" is
/// the same as "the distribution is a point mass on `c_i`". If neither fits,
/// the Monte Carlo fallback runs when allowed.
pub fn verify_completeness(m: &dyn Corrector, opts: &SweepOptions) -> Result<VerificationReport> {
    let code = m.code();
    let n = code.n();
    let mut report = base_report(ReportKind::Completeness, code, m.radius().clone(), opts);
    let pairs = codeword_count(code).saturating_mul(n as u128);
    let runs = pairs.saturating_mul(m.randomness().size());
    let pairs_fit = pairs <= opts.budget as u128;
    if !pairs_fit {
        return match opts.fallback_samples {
            Some(samples) => completeness_monte_carlo(m, samples, opts),
            None => Err(Error::BudgetExceeded { what: "completeness check", needed: pairs, budget: opts.budget }),
        };
    }
    let codewords = code.codewords(opts.budget)?;
    let tasks: Vec<(usize, usize)> = (0..codewords.len()).flat_map(|c| (1..=n).map(move |i| (c, i))).collect();
    let enumerate_runs = runs <= opts.budget as u128;
    let results: Vec<Result<(Option<Counterexample>, usize)>> = tasks
        .par_iter()
        .map(|&(ci, i)| {
            let c = &codewords[ci];
            let expected = Symbol::Bit(c.get(i));
            if enumerate_runs {
                let space = m.randomness();
                let mut bad = None;
                let mut max_q = 0;
                space.for_each(opts.budget, |outcome| {
                    let positions = m.queries(i, outcome)?;
                    max_q = max_q.max(positions.len());
                    if bad.is_none() {
                        let answers: Vec<bool> = positions.iter().map(|&p| c.get(p)).collect();
                        let out = m.decide(i, outcome, &answers)?;
                        if out != expected {
                            bad = Some(Counterexample {
                                word: c.clone(),
                                source: Some(c.clone()),
                                index: Some(i),
                                outcome: Some(outcome.to_vec()),
                                output: Some(out),
                                probability: None,
                            });
                        }
                    }
                    Ok(())
                })?;
                Ok((bad, max_q))
            } else {
                let d = m.output_distribution(c, i, opts.budget)?;
                let bad = (!d.is_point_mass(expected)).then(|| Counterexample {
                    word: c.clone(),
                    source: Some(c.clone()),
                    index: Some(i),
                    outcome: None,
                    output: None,
                    probability: Some(d.prob(expected).clone()),
                });
                Ok((bad, m.max_queries(i)?))
            }
        })
        .collect();
    for r in results {
        let (bad, q) = r?;
        report.max_queries = report.max_queries.max(q);
        if report.counterexample.is_none() {
            if let Some(b) = bad {
                report.min_success = b.probability.clone().unwrap_or_else(Rational::zero);
                report.counterexample = Some(b);
                report.passed = false;
            }
        }
    }
    report.sweep_size = if enumerate_runs { runs } else { pairs };
    Ok(report)
}

fn completeness_monte_carlo(m: &dyn Corrector, samples: u64, opts: &SweepOptions) -> Result<VerificationReport> {
    let model = CorruptionModel::new(CorruptionKind::Uniform, 0, opts.seed);
    let rows = simulate(m, &model, samples)?;
    let mut report = base_report(ReportKind::Completeness, m.code(), m.radius().clone(), opts);
    report.exhaustive = false;
    report.sweep_size = samples as u128;
    report.max_queries = rows.iter().map(|r| r.queries).max().unwrap_or(0);
    let correct = rows.iter().filter(|r| r.corrected).count() as u64;
    if let Some(bad) = rows.iter().find(|r| !r.corrected) {
        report.passed = false;
        report.counterexample = Some(Counterexample {
            word: bad.word.clone(),
            source: Some(bad.word.clone()),
            index: Some(bad.index),
            outcome: Some(bad.outcome.clone()),
            output: Some(bad.output),
            probability: None,
        });
    }
    report.min_success = Rational::new(correct.into(), samples.max(1).into());
    report.estimate = Some(Estimate::new(correct, samples));
    Ok(report)
}

/// Minimum exact success probability `Pr[M^w(i) ∈ {c_i, ⊥}]` over corrupted
/// words `w` of codewords `c` with `dist(w, c) ≤ radius`, and all `i`.
///
/// The exhaustive model walks every codeword and every error pattern of
/// weight at most `⌊radius·n⌋`. Random models draw `trials` words; their
/// probabilities are still exact, but the sweep is not exhaustive.
pub fn soundness_sweep(
    m: &dyn Corrector,
    radius: &Rational,
    model: &CorruptionModel,
    trials: u64,
    opts: &SweepOptions,
) -> Result<VerificationReport> {
    let code = m.code();
    let n = code.n();
    let max_flips = floor_to_u64(&(radius * from_usize(n))).unwrap_or(0) as usize;
    let mut report = base_report(ReportKind::Soundness, code, radius.clone(), opts);
    report.seed = model.seed;

    let pairs: Vec<(BitWord, BitWord)> = match model.kind {
        CorruptionKind::Exhaustive => {
            let words = codeword_count(code).saturating_mul(patterns_up_to(n, max_flips));
            if words > opts.budget as u128 {
                return match opts.fallback_samples {
                    Some(samples) => {
                        let fallback = CorruptionModel::new(CorruptionKind::Uniform, max_flips, model.seed);
                        monte_carlo_success(m, radius, &fallback, samples, opts)
                    }
                    None => Err(Error::BudgetExceeded { what: "soundness sweep", needed: words, budget: opts.budget }),
                };
            }
            let patterns = error_patterns(n, max_flips, opts.budget)?;
            let codewords = code.codewords(opts.budget)?;
            codewords.iter().flat_map(|c| patterns.iter().map(move |e| (c.xor(e), c.clone()))).collect()
        }
        _ => {
            if model.weight > max_flips {
                return Err(Error::invalid(format!(
                    "corruption weight {} lies outside radius {radius} (at most {max_flips} flips)",
                    model.weight
                )));
            }
            report.exhaustive = false;
            (0..trials).map(|t| model.sample_pair(code, &mut model.rng(t))).collect::<Result<_>>()?
        }
    };
    check_budget("soundness sweep", (pairs.len() as u128).saturating_mul(n as u128), opts.budget)?;

    let per_word: Vec<Result<(Rational, usize, usize)>> = pairs
        .par_iter()
        .map(|(w, c)| {
            let mut best: Option<(Rational, usize)> = None;
            let mut max_q = 0;
            for i in 1..=n {
                let p = m.output_distribution(w, i, opts.budget)?.success(c.get(i));
                if best.as_ref().is_none_or(|(b, _)| p < *b) {
                    best = Some((p, i));
                }
                max_q = max_q.max(m.max_queries(i)?);
            }
            let (p, i) = best.expect("n ≥ 1");
            Ok((p, i, max_q))
        })
        .collect();

    let mut arg: Option<(Rational, usize, usize)> = None;
    for (j, r) in per_word.into_iter().enumerate() {
        let (p, i, q) = r?;
        report.max_queries = report.max_queries.max(q);
        if arg.as_ref().is_none_or(|(b, _, _)| p < *b) {
            arg = Some((p, i, j));
        }
    }
    report.sweep_size = pairs.len() as u128 * n as u128;
    if let Some((p, i, j)) = arg {
        report.passed = p >= two_thirds();
        report.min_success = p.clone();
        let (w, c) = &pairs[j];
        report.counterexample = (!report.passed).then(|| Counterexample {
            word: w.clone(),
            source: Some(c.clone()),
            index: Some(i),
            outcome: None,
            output: None,
            probability: Some(p),
        });
    }
    Ok(report)
}

/// Runs one sampled execution per trial and counts outputs in `{c_i, ⊥}`.
/// Passes when the 99% Clopper–Pearson lower bound is at least 2/3.
pub fn monte_carlo_success(
    m: &dyn Corrector,
    radius: &Rational,
    model: &CorruptionModel,
    samples: u64,
    opts: &SweepOptions,
) -> Result<VerificationReport> {
    let rows = simulate(m, model, samples)?;
    let mut report = base_report(ReportKind::Soundness, m.code(), radius.clone(), opts);
    report.seed = model.seed;
    report.exhaustive = false;
    report.sweep_size = samples as u128;
    report.max_queries = rows.iter().map(|r| r.queries).max().unwrap_or(0);
    let ok = rows.iter().filter(|r| !r.wrong).count() as u64;
    let estimate = Estimate::new(ok, samples);
    report.min_success = Rational::new(ok.into(), samples.max(1).into());
    report.passed = samples > 0 && estimate.lower >= 2.0 / 3.0;
    if let Some(bad) = rows.iter().find(|r| r.wrong) {
        report.counterexample = Some(Counterexample {
            word: bad.word.clone(),
            source: None,
            index: Some(bad.index),
            outcome: Some(bad.outcome.clone()),
            output: Some(bad.output),
            probability: None,
        });
    }
    report.estimate = Some(estimate);
    Ok(report)
}

/// One sampled run of a corrector on a corrupted codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationRow {
    pub trial: u64,
    pub weight: usize,
    pub index: usize,
    pub output: Symbol,
    pub corrected: bool,
    pub bottom: bool,
    pub wrong: bool,
    pub queries: usize,
    pub word: BitWord,
    pub outcome: Vec<usize>,
}

/// Trial `t` draws its codeword, corruption, index and randomness from the
/// model's seed on stream `t`, so rows do not depend on scheduling.
pub fn simulate(m: &dyn Corrector, model: &CorruptionModel, trials: u64) -> Result<Vec<SimulationRow>> {
    let code = m.code();
    let n = code.n();
    let space = m.randomness();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = model.rng(t);
            let (w, c) = model.sample_pair(code, &mut rng)?;
            let i = rng.gen_range(1..=n);
            let outcome = space.sample(&mut rng);
            let positions = m.queries(i, &outcome)?;
            let answers: Vec<bool> = positions.iter().map(|&p| w.get(p)).collect();
            let output = m.decide(i, &outcome, &answers)?;
            let corrected = output == Symbol::Bit(c.get(i));
            let bottom = output == Symbol::Bottom;
            Ok(SimulationRow {
                trial: t,
                weight: w.hamming_distance(&c)?,
                index: i,
                output,
                corrected,
                bottom,
                wrong: !corrected && !bottom,
                queries: positions.len(),
                word: w,
                outcome,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct SimCsvRow<'a> {
    trial: u64,
    weight: usize,
    index: usize,
    output: &'a str,
    corrected: u8,
    bottom: u8,
    wrong: u8,
    queries: usize,
}

pub fn write_simulation_csv<W: Write>(rows: &[SimulationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(SimCsvRow {
            trial: r.trial,
            weight: r.weight,
            index: r.index,
            output: r.output.as_str(),
            corrected: r.corrected as u8,
            bottom: r.bottom as u8,
            wrong: r.wrong as u8,
            queries: r.queries,
        })?;
    }
    if rows.is_empty() {
        w.write_record(["trial", "weight", "index", "output", "corrected", "bottom", "wrong", "queries"])?;
    }
    w.flush()?;
    Ok(())
}

/// `1 − (1 − r)^t·(1 − s)` for the unique nearest codeword of `w`.
pub fn nested_success_probability(m: &NestedCorrector, w: &BitWord, i: usize, budget: u64) -> Result<Rational> {
    let nearest = m.nested().code().nearest_codeword(w, budget)?;
    if !nearest.unique {
        return Err(Error::NonUniqueDecoding { distance: nearest.distance.to_string() });
    }
    nested_success_probability_for(m, w, &nearest.codeword, i, budget)
}

/// `1 − (1 − r)^t·(1 − s)` measured against a given codeword `c`, where `r`
/// is the tester's rejection probability on `w` and `s` is the probability
/// that the inner corrector on `w|_I` outputs `(c|_I)_{i*}` or ⊥.
pub fn nested_success_probability_for(
    m: &NestedCorrector,
    w: &BitWord,
    c: &BitWord,
    i: usize,
    budget: u64,
) -> Result<Rational> {
    let nc = m.nested();
    let n = nc.code().n();
    if w.len() != n || c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: if w.len() != n { w.len() } else { c.len() } });
    }
    let (block, local) = nc.layout().block_for(i)?;
    let r = nc.outer_tester().exact_reject_probability(w, budget)?;
    let inner = nc.inner().output_distribution(&w.restrict(block.start, block.end), local, budget)?;
    let s = inner.success(c.get(i));
    let all_accept = pow(&(Rational::one() - r), m.repetitions() as u64);
    Ok(Rational::one() - all_accept * (Rational::one() - s))
}
