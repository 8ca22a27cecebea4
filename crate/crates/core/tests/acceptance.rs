//! Acceptance suite: one PASS/FAIL line per criterion, every value checked
//! against an oracle written here rather than against the library itself.
//!
//! Run with `cargo test -p loccode --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use loccode::analysis::params::{binary_entropy, consecutive_ratio, dellm_block_length, gv_epsilon};
use loccode::analysis::{
    measure_testability, monte_carlo_success, nested_success_probability, nested_success_probability_for, simulate,
    soundness_sweep, verify_completeness, write_reports_csv, write_simulation_csv, CorruptionKind, CorruptionModel,
    SweepOptions,
};
use loccode::codes::{hamming_code, parity_code, random_ldpc, tensor_product, LinearCode, DEFAULT_BUDGET};
use loccode::gf2::{BitMatrix, BitWord};
use loccode::local::{
    full_read_corrector, full_read_tester, run_with_queries, tensor_tester, Corrector, Procedure, Symbol,
    Tester,
};
use loccode::nesting::{
    iterate_nesting, nest, nested_corrector, rate_lower_bound, repetitions, LevelSpec, NestedCode, NestedCorrector,
};
use loccode::Rational;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rpow(base: &Rational, mut e: u64) -> Rational {
    let mut acc = Rational::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// Oracles over u64 bit masks; bit p-1 holds position p.

fn mask(w: &BitWord) -> u64 {
    w.support().iter().fold(0, |m, &p| m | 1 << (p - 1))
}

fn word(n: usize, m: u64) -> BitWord {
    BitWord::from_bools(&(0..n).map(|j| m >> j & 1 == 1).collect::<Vec<_>>())
}

fn rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut x = r;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Checks of `C1 ⋔ C2`: the rows of `H1`, then `H2` on each aligned block of
/// length `n`, and on the last `n` positions when `n ∤ N`.
fn stacked_oracle(h1: &[u64], h2: &[u64], big_n: usize, n: usize) -> Vec<u64> {
    let mut offsets: Vec<usize> = (0..big_n / n).map(|b| b * n).collect();
    if !big_n.is_multiple_of(n) {
        offsets.push(big_n - n);
    }
    let mut rows = h1.to_vec();
    for off in offsets {
        rows.extend(h2.iter().map(|r| r << off));
    }
    rows
}

fn rows_of(c: &LinearCode) -> Vec<u64> {
    c.parity_check().row_iter().map(mask).collect()
}

/// The 3×3 grid of a length-9 word, row-major.
fn grid(m: u64) -> [[bool; 3]; 3] {
    let mut g = [[false; 3]; 3];
    for (r, row) in g.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = m >> (3 * r + c) & 1 == 1;
        }
    }
    g
}

/// Odd rows and odd columns of the grid.
fn grid_violations(m: u64) -> usize {
    let g = grid(m);
    let rows = (0..3).filter(|&r| g[r].iter().filter(|&&b| b).count() % 2 == 1).count();
    let cols = (0..3).filter(|&c| (0..3).filter(|&r| g[r][c]).count() % 2 == 1).count();
    rows + cols
}

fn tensor_member(m: u64) -> bool {
    grid_violations(m) == 0
}

fn tensor_codewords() -> Vec<u64> {
    (0u64..512).filter(|&m| tensor_member(m)).collect()
}

/// Every mask of length `n` with weight at most `w`.
fn patterns(n: usize, w: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|m| m.count_ones() as usize <= w).collect()
}

// ---------------------------------------------------------------------------
// The two-level fixture: [3,2] parity with its full-read corrector, nested in
// the 3×3 tensor parity code with its row/column tester.

fn fixture() -> Arc<NestedCode> {
    let p = parity_code(3).unwrap();
    let outer = Arc::new(tensor_product(&p, &p).unwrap());
    let inner: Arc<dyn Corrector> = Arc::new(full_read_corrector(&Arc::new(p), DEFAULT_BUDGET).unwrap());
    let delta = outer.min_distance(DEFAULT_BUDGET).unwrap();
    Arc::new(NestedCode::new(tensor_tester(&outer).unwrap(), delta, ratio(1, 1), inner, DEFAULT_BUDGET).unwrap())
}

/// `1 − (1 − r)^t(1 − s)` for the fixture, from the grid alone: `r` is the
/// share of the six row/column checks that fail, and the full-read inner
/// corrector answers `w_i` on even blocks and ⊥ on odd ones.
fn fixture_success_oracle(w: u64, c: u64, i: usize, t: u64) -> Rational {
    let r = ratio(grid_violations(w) as i64, 6);
    let block = (w >> (3 * ((i - 1) / 3))) & 0b111;
    let s = if block.count_ones() % 2 == 1 || (w >> (i - 1) & 1) == (c >> (i - 1) & 1) {
        Rational::one()
    } else {
        Rational::zero()
    };
    Rational::one() - rpow(&(Rational::one() - r), t) * (Rational::one() - s)
}

/// Every outcome tuple of `m`'s randomness with its probability.
fn outcome_tuples(m: &dyn Corrector) -> Vec<(Vec<usize>, Rational)> {
    let space = m.randomness();
    let sizes: Vec<usize> = (0..space.arity()).map(|j| space.coordinate(j).len()).collect();
    let mut out = Vec::new();
    let mut cur = vec![0usize; sizes.len()];
    loop {
        let p = (0..cur.len()).fold(Rational::one(), |acc, j| acc * space.coordinate(j).probability(cur[j]));
        out.push((cur.clone(), p));
        let mut j = 0;
        loop {
            if j == cur.len() {
                return out;
            }
            cur[j] += 1;
            if cur[j] < sizes[j] {
                break;
            }
            cur[j] = 0;
            j += 1;
        }
    }
}

fn run_tuple(m: &dyn Corrector, w: &BitWord, i: usize, outcome: &[usize]) -> Symbol {
    let q = m.queries(i, outcome).unwrap();
    m.decide(i, outcome, &w.gather(&q)).unwrap()
}

// ---------------------------------------------------------------------------

fn c1_rate_bound() -> Outcome {
    for (big_n, dim, bound) in [(6usize, 4usize, ratio(1, 2)), (7, 3, ratio(3, 7))] {
        let c1 = parity_code(big_n).unwrap();
        let c2 = parity_code(3).unwrap();
        let nested = nest(&c1, &c2).unwrap();
        let oracle = big_n - rank(&stacked_oracle(&rows_of(&c1), &rows_of(&c2), big_n, 3));
        ensure(nested.k() == dim && oracle == dim, || format!("[{big_n},{}]⋔[3,2]: k={} oracle={oracle}", big_n - 1, nested.k()))?;
        let b = rate_lower_bound(&ratio(1, big_n as i64), &ratio(1, 3), big_n, 3).unwrap();
        ensure(b == bound, || format!("bound for N={big_n} is {b}, expected {bound}"))?;
        ensure(ratio(dim as i64, big_n as i64) >= b, || format!("N={big_n}: rate below bound"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let (mut divisible, mut tail) = (0, 0);
    for trial in 0..100u64 {
        let big_n = rng.gen_range(4..=64usize);
        let n = if trial % 2 == 0 {
            let divs: Vec<usize> = (2..=big_n).filter(|d| big_n % d == 0).collect();
            divs[rng.gen_range(0..divs.len())]
        } else {
            let non: Vec<usize> = (2..big_n).filter(|d| big_n % d != 0).collect();
            if non.is_empty() {
                big_n
            } else {
                non[rng.gen_range(0..non.len())]
            }
        };
        let c1 = random_ldpc(big_n, rng.gen_range(1..=big_n / 2), rng.gen_range(2..=6.min(big_n)), rng.gen()).unwrap();
        let c2 = random_ldpc(n, rng.gen_range(1..=(n / 2).max(1)), rng.gen_range(1..=4.min(n)), rng.gen()).unwrap();
        let (h1, h2) = (rows_of(&c1), rows_of(&c2));
        let k1 = big_n - rank(&h1);
        let k2 = n - rank(&h2);
        let eps1 = Rational::one() - ratio(k1 as i64, big_n as i64);
        let eps2 = Rational::one() - ratio(k2 as i64, n as i64);
        let nested = nest(&c1, &c2).unwrap();
        let oracle = big_n - rank(&stacked_oracle(&h1, &h2, big_n, n));
        ensure(nested.k() == oracle, || format!("trial {trial}: k={} oracle={oracle} (N={big_n}, n={n})", nested.k()))?;
        let bound = rate_lower_bound(&eps1, &eps2, big_n, n).unwrap();
        ensure(ratio(oracle as i64, big_n as i64) >= bound, || {
            format!("trial {trial}: rate {oracle}/{big_n} below bound {bound} (n={n})")
        })?;
        if big_n % n == 0 {
            divisible += 1;
        } else {
            tail += 1;
        }
    }
    Ok(format!("2 examples + 100 LDPC pairs ({divisible} with n | N, {tail} with a tail block)"))
}

fn c2_completeness() -> Outcome {
    let nc = fixture();
    let codewords = tensor_codewords();
    ensure(codewords.len() == 16, || format!("{} codewords", codewords.len()))?;
    let mut runs = 0u64;

    // Every outcome tuple, for small repetition counts.
    for t in 0..=3 {
        let m = NestedCorrector::with_repetitions(&nc, t);
        let tuples = outcome_tuples(&m);
        for &c in &codewords {
            let cw = word(9, c);
            for i in 1..=9 {
                for (o, _) in &tuples {
                    let out = run_tuple(&m, &cw, i, o);
                    ensure(out == Symbol::Bit(cw.get(i)), || format!("t={t} c={cw} i={i} outcome={o:?} gave {out}"))?;
                    runs += 1;
                }
            }
        }
    }

    // The certified count t = 20 has 6^20 tuples. Each run coordinate and
    // each inner outcome is enumerated on its own, tuples mixing them are
    // sampled, and the closed-form output distribution is a point mass.
    let m = nested_corrector(&nc).unwrap();
    let t = m.repetitions();
    let space = m.randomness();
    let inner_arity = space.arity() - t;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for &c in &codewords {
        let cw = word(9, c);
        for i in 1..=9 {
            let mut tuples: Vec<Vec<usize>> = Vec::new();
            for v in 0..6 {
                tuples.push(vec![0; inner_arity].into_iter().chain(std::iter::repeat_n(v, t)).collect());
                for j in 0..t {
                    let mut o = vec![0; inner_arity + t];
                    o[inner_arity + j] = v;
                    tuples.push(o);
                }
            }
            tuples.extend((0..200).map(|_| space.sample(&mut rng)));
            for o in &tuples {
                let out = run_tuple(&m, &cw, i, o);
                ensure(out == Symbol::Bit(cw.get(i)), || format!("t={t} c={cw} i={i} outcome={o:?} gave {out}"))?;
                runs += 1;
            }
            let d = m.output_distribution(&cw, i, DEFAULT_BUDGET).unwrap();
            ensure(d.is_point_mass(Symbol::Bit(cw.get(i))), || format!("t={t} c={cw} i={i}: {d:?}"))?;
        }
    }
    let report = verify_completeness(&m, &SweepOptions::new(DEFAULT_BUDGET, 0, "fixture")).unwrap();
    ensure(report.passed, || format!("library sweep failed: {:?}", report.counterexample))?;
    Ok(format!("0 violations in {runs} runs; full tuple space for t ≤ 3, t = {t} per coordinate plus samples"))
}

fn c3_soundness() -> Outcome {
    let nc = fixture();
    ensure(*nc.delta_ltc() == ratio(4, 9), || format!("delta_ltc = {}", nc.delta_ltc()))?;
    let radius = nc.radius();
    let flips = (&radius * ratio(9, 1)).floor().to_integer().to_usize().unwrap();
    ensure(flips == 2, || format!("⌊(δ/2)·N⌋ = {flips}"))?;
    let m = nested_corrector(&nc).unwrap();
    let t = m.repetitions() as u64;
    let errs = patterns(9, flips);
    ensure(errs.len() == 46, || format!("{} patterns", errs.len()))?;

    let mut min: Option<Rational> = None;
    let mut checked = 0;
    for &c in &tensor_codewords() {
        for &e in &errs {
            let w = c ^ e;
            let (ww, cw) = (word(9, w), word(9, c));
            for i in 1..=9 {
                let lib = nested_success_probability_for(&m, &ww, &cw, i, DEFAULT_BUDGET).unwrap();
                let oracle = fixture_success_oracle(w, c, i, t);
                ensure(lib == oracle, || format!("w={ww} c={cw} i={i}: library {lib}, oracle {oracle}"))?;
                ensure(oracle >= ratio(2, 3), || format!("w={ww} c={cw} i={i}: success {oracle} < 2/3"))?;
                if e.count_ones() <= 1 {
                    let unique = nested_success_probability(&m, &ww, i, DEFAULT_BUDGET).unwrap();
                    ensure(unique == oracle, || format!("w={ww} i={i}: nearest-codeword form {unique}"))?;
                }
                if min.as_ref().is_none_or(|b| oracle < *b) {
                    min = Some(oracle);
                }
                checked += 1;
            }
        }
    }
    let min = min.unwrap();
    let model = CorruptionModel::new(CorruptionKind::Exhaustive, flips, 0);
    let report = soundness_sweep(&m, &radius, &model, 0, &SweepOptions::new(DEFAULT_BUDGET, 0, "fixture")).unwrap();
    ensure(report.passed && report.min_success == min, || format!("library sweep min {} vs oracle {min}", report.min_success))?;
    Ok(format!("{checked} (w, i) pairs at radius {radius}, t = {t}, min success {:.6}", min.to_f64().unwrap()))
}

fn c4_oracle_cross_check() -> Outcome {
    let nc = fixture();
    let m = NestedCorrector::with_repetitions(&nc, 2);
    let outcomes = nc.outer_tester().randomness().len();
    ensure(outcomes <= 8, || format!("{outcomes} tester outcomes"))?;
    let tuples = outcome_tuples(&m);
    ensure(tuples.len() == outcomes * outcomes, || format!("{} tuples", tuples.len()))?;
    let mut pairs = 0;
    for &c in &tensor_codewords() {
        for &e in &patterns(9, 2) {
            let (w, cw) = (word(9, c ^ e), word(9, c));
            for i in 1..=9 {
                let (mut zero, mut one, mut bottom) = (Rational::zero(), Rational::zero(), Rational::zero());
                for (o, p) in &tuples {
                    match run_tuple(&m, &w, i, o) {
                        Symbol::Bit(false) => zero += p,
                        Symbol::Bit(true) => one += p,
                        Symbol::Bottom => bottom += p,
                    }
                }
                let enumerated = if cw.get(i) { &one } else { &zero } + &bottom;
                let closed = nested_success_probability_for(&m, &w, &cw, i, DEFAULT_BUDGET).unwrap();
                ensure(closed == enumerated, || format!("w={w} c={cw} i={i}: closed {closed}, enumerated {enumerated}"))?;
                let d = m.output_distribution(&w, i, DEFAULT_BUDGET).unwrap();
                ensure(d.zero == zero && d.one == one && d.bottom == bottom, || format!("w={w} i={i}: {d:?}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (w, i) pairs, {} tuples each, exact equality", tuples.len()))
}

fn c5_query_accounting() -> Outcome {
    let nc = fixture();
    let q_inner = nc.inner().query_bound();
    let q_outer = nc.outer_tester().fixed_query_count().ok_or("tensor tester is not fixed-count")?;

    let m2 = NestedCorrector::with_repetitions(&nc, 2);
    let mut checked = 0;
    for (o, _) in outcome_tuples(&m2) {
        for i in 1..=9 {
            let q = m2.queries(i, &o).unwrap().len();
            ensure(q == q_inner + 2 * q_outer && q <= m2.query_bound(), || format!("t=2 i={i} {o:?}: {q} queries"))?;
            checked += 1;
        }
    }

    let m = nested_corrector(&nc).unwrap();
    let expected = q_inner + m.repetitions() * q_outer;
    ensure(m.query_bound() == expected, || format!("query bound {} vs {expected}", m.query_bound()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..500u64 {
        let w = word(9, rng.gen_range(0..512));
        let i = rng.gen_range(1..=9);
        let (_, log) = run_with_queries(Procedure::Corrector(&m, i), &w, seed).unwrap();
        ensure(log.count == expected, || format!("run {seed}: {} queries, expected {expected}", log.count))?;
    }

    let p = parity_code(3).unwrap();
    let l1 = Arc::new(p.clone());
    let l2 = Arc::new(tensor_product(&p, &p).unwrap());
    let l3 = Arc::new(parity_code(12).unwrap());
    let two = vec![
        LevelSpec { tester: full_read_tester(&l1), delta_ltc: ratio(2, 3), kappa: ratio(1, 1) },
        LevelSpec { tester: tensor_tester(&l2).unwrap(), delta_ltc: ratio(4, 9), kappa: ratio(1, 1) },
    ];
    let mut three = two.clone();
    three.push(LevelSpec { tester: full_read_tester(&l3), delta_ltc: ratio(1, 6), kappa: ratio(1, 1) });
    let mut totals = Vec::new();
    for specs in [two, three] {
        let it = iterate_nesting(&specs, DEFAULT_BUDGET).unwrap();
        let rlcc = &it.rlcc;
        let levels = &rlcc.levels;
        let n1 = specs[0].code().n();
        let sum: usize = n1
            + levels[1..]
                .iter()
                .zip(&specs[1..])
                .map(|(l, s)| l.repetitions.unwrap() as usize * s.tester.fixed_query_count().unwrap())
                .sum::<usize>();
        ensure(rlcc.query_bound == sum, || format!("{} levels: total {} vs n1 + Σ t_j q_j = {sum}", specs.len(), rlcc.query_bound))?;
        ensure(rlcc.corrector.query_bound() == sum, || format!("corrector bound {}", rlcc.corrector.query_bound()))?;
        let n = rlcc.code.n();
        for i in 1..=n {
            ensure(rlcc.corrector.max_queries(i).unwrap() <= sum, || format!("max_queries({i}) exceeds {sum}"))?;
        }
        for seed in 0..200u64 {
            let w = word(n, rng.gen_range(0..1u64 << n));
            let i = rng.gen_range(1..=n);
            let (_, log) = run_with_queries(Procedure::Corrector(rlcc.corrector.as_ref(), i), &w, seed).unwrap();
            ensure(log.count == sum, || format!("{} levels, run {seed}: {} queries vs {sum}", specs.len(), log.count))?;
        }
        totals.push(sum);
    }
    Ok(format!("{checked} t=2 tuples, 500 runs at t={}, chain totals {totals:?}", m.repetitions()))
}

fn c6_testability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = parity_code(3).unwrap();
    let codes = [
        parity_code(3).unwrap(),
        hamming_code(3).unwrap(),
        tensor_product(&p, &p).unwrap(),
        random_ldpc(10, 4, 3, rng.gen()).unwrap(),
    ];
    for code in codes {
        let code = Arc::new(code);
        let t = measure_testability(&full_read_tester(&code), DEFAULT_BUDGET).unwrap();
        ensure(t.exhaustive && t.clamped == Rational::one() && t.kappa >= Rational::one(), || {
            format!("full-read on n={}: kappa {} clamped {}", code.n(), t.kappa, t.clamped)
        })?;
        ensure(!code.contains(&t.witness).unwrap(), || format!("witness {} is a codeword", t.witness))?;
        ensure(&t.witness_reject / &t.witness_distance == t.kappa, || "witness ratio differs from kappa".into())?;
    }

    let outer = Arc::new(tensor_product(&p, &p).unwrap());
    let tester = tensor_tester(&outer).unwrap();
    let t = measure_testability(&tester, DEFAULT_BUDGET).unwrap();
    let codewords = tensor_codewords();
    let mut oracle: Option<Rational> = None;
    for w in 0u64..512 {
        let d = codewords.iter().map(|c| (c ^ w).count_ones()).min().unwrap();
        if d == 0 {
            continue;
        }
        let r = ratio(grid_violations(w) as i64, 6) / ratio(d as i64, 9);
        if oracle.as_ref().is_none_or(|b| r < *b) {
            oracle = Some(r);
        }
    }
    let oracle = oracle.unwrap();
    ensure(t.kappa == oracle && t.words == 512, || format!("tensor tester: kappa {} vs oracle {oracle}", t.kappa))?;
    let w = mask(&t.witness);
    let d = codewords.iter().map(|c| (c ^ w).count_ones()).min().unwrap();
    ensure(ratio(grid_violations(w) as i64, 6) / ratio(d as i64, 9) == oracle, || format!("witness {} is not a minimiser", t.witness))?;
    Ok(format!("full-read clamped to 1 on 4 codes; 3×3 tensor tester kappa = {oracle} over 512 words"))
}

fn c7_repetitions() -> Outcome {
    let third = ratio(1, 3);
    for (big_n, n, d, k, want) in [(100usize, 10usize, ratio(1, 5), ratio(1, 2), 220u64), (12, 4, ratio(1, 2), ratio(1, 1), 14)] {
        let t = repetitions(big_n, n, &d, &k).unwrap();
        ensure(t == want, || format!("({big_n}, {n}, {d}, {k}): t = {t}, expected {want}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut largest = 0;
    for _ in 0..100 {
        let big_n = rng.gen_range(1..=100usize);
        let n = rng.gen_range(1..=big_n);
        let db = rng.gen_range(1..=8i64);
        let kb = rng.gen_range(1..=8i64);
        let d = ratio(rng.gen_range(1..=db), db);
        let k = ratio(rng.gen_range(1..=kb), kb);
        let t = repetitions(big_n, n, &d, &k).unwrap();
        let x = &k * &d * ratio(n as i64, 2 * big_n as i64);
        let fail = rpow(&(Rational::one() - &x), t);
        ensure(fail <= third, || format!("({big_n}, {n}, {d}, {k}): (1 − x)^{t} = {:.6} > 1/3", fail.to_f64().unwrap()))?;
        let real = 2.0 * 3f64.ln() * big_n as f64 / (d.to_f64().unwrap() * k.to_f64().unwrap() * n as f64);
        if (real - real.round()).abs() > 1e-9 {
            ensure(t == real.ceil() as u64, || format!("({big_n}, {n}, {d}, {k}): t = {t}, ⌈{real}⌉ expected"))?;
        }
        largest = largest.max(t);
    }
    Ok(format!("220 and 14 reproduced; 100 random certificates hold exactly (largest t = {largest})"))
}

fn c8_parameters() -> Outcome {
    let q = ratio(8, 1);
    let p = BigUint::from(3u32);
    let oracle = |j: u32| (3i64.pow(3 * j) - 3i64.pow(j)) * 8 / 8;
    let n1 = dellm_block_length(&q, &p, 1);
    let n2 = dellm_block_length(&q, &p, 2);
    ensure(n1 == ratio(24, 1) && n1 == ratio(oracle(1), 1), || format!("n1 = {n1}"))?;
    ensure(n2 == ratio(720, 1) && n2 == ratio(oracle(2), 1), || format!("n2 = {n2}"))?;
    let r = &n2 / &n1;
    ensure(r == ratio(30, 1) && r == ratio(3 * (9 + 1), 1), || format!("n2/n1 = {r}"))?;
    ensure(consecutive_ratio(&p, 1) == r, || format!("consecutive ratio {}", consecutive_ratio(&p, 1)))?;

    let g = gv_epsilon(&ratio(1, 1), &ratio(0, 1)).unwrap();
    ensure(g.epsilon == 0.0, || format!("gv(1, 0) = {}", g.epsilon))?;
    let g = gv_epsilon(&ratio(0, 1), &ratio(1, 2)).unwrap();
    ensure(g.epsilon == 0.0, || format!("gv(0, 1/2) = {}", g.epsilon))?;

    let entropy = |x: f64| if x == 0.0 || x == 1.0 { 0.0 } else { -x * x.log2() - (1.0 - x) * (1.0 - x).log2() };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let rate = ratio(rng.gen_range(0..=1000), 1000);
        let delta = ratio(rng.gen_range(0..=500), 1000);
        let g = gv_epsilon(&rate, &delta).unwrap();
        let (rf, df) = (rate.to_f64().unwrap(), delta.to_f64().unwrap());
        let err = (rf + entropy(df) + g.epsilon - 1.0).abs();
        ensure(err <= 1e-12, || format!("R={rate} δ={delta}: R + H(δ) + ε − 1 = {err:e}"))?;
        ensure((binary_entropy(df) - entropy(df)).abs() <= 1e-12, || format!("H({df}) disagrees"))?;
        worst = worst.max(err);
    }
    Ok(format!("n1 = 24, n2 = 720, ratio 30 = p(p²+1); gv identities exact; 1000 pairs within {worst:e}"))
}

fn c9_tensor() -> Outcome {
    let p = parity_code(3).unwrap();
    let t = tensor_product(&p, &p).unwrap();
    let d = t.min_distance(DEFAULT_BUDGET).unwrap();
    let dp = p.min_distance(DEFAULT_BUDGET).unwrap();
    ensure(d == ratio(4, 9) && d == &dp * &dp, || format!("distance {d}, factor {dp}"))?;
    let mut members = 0;
    for m in 0u64..512 {
        let lib = t.contains(&word(9, m)).unwrap();
        ensure(lib == tensor_member(m), || format!("word {m:09b}: library {lib}"))?;
        members += lib as usize;
    }
    let oracle_d = tensor_codewords().into_iter().filter(|&c| c != 0).map(|c| c.count_ones()).min().unwrap();
    ensure(oracle_d == 4, || format!("oracle distance {oracle_d}"))?;
    Ok(format!("distance 4/9 = (2/3)²; membership agrees on 512 words ({members} codewords)"))
}

/// Every CSV the fixture produces, under a pool of `threads` workers.
fn fixture_outputs(threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let nc = fixture();
        let m = nested_corrector(&nc).unwrap();
        let opts = SweepOptions::new(DEFAULT_BUDGET, 11, "fixture");
        let radius = nc.radius();
        let mut out = Vec::new();

        let burst = CorruptionModel::new(CorruptionKind::Burst, 2, 11);
        write_simulation_csv(&simulate(&m, &burst, 400).unwrap(), &mut out).unwrap();
        let block = CorruptionModel::new(CorruptionKind::BlockTargeted { block_len: 3 }, 2, 11);
        write_simulation_csv(&simulate(&NestedCorrector::with_repetitions(&nc, 0), &block, 400).unwrap(), &mut out).unwrap();

        let reports = vec![
            verify_completeness(&m, &opts).unwrap(),
            soundness_sweep(&m, &radius, &CorruptionModel::new(CorruptionKind::Exhaustive, 2, 11), 0, &opts).unwrap(),
            soundness_sweep(&m, &radius, &CorruptionModel::new(CorruptionKind::Uniform, 2, 11), 300, &opts).unwrap(),
            monte_carlo_success(&m, &radius, &burst, 500, &opts).unwrap(),
            measure_testability(nc.outer_tester(), DEFAULT_BUDGET).unwrap().to_report(nc.outer_tester(), &opts, &ratio(1, 1)),
        ];
        write_reports_csv(&reports, &mut out).unwrap();
        out
    })
}

fn c10_determinism() -> Outcome {
    let one = fixture_outputs(1);
    for threads in [4, 8] {
        let other = fixture_outputs(threads);
        ensure(other == one, || format!("{threads} threads: output differs from 1 thread"))?;
    }
    ensure(!one.is_empty(), || "no output".into())?;
    Ok(format!("{} bytes of simulation and report CSV identical for 1, 4, 8 threads", one.len()))
}

fn c11_negative_controls() -> Outcome {
    let nc = fixture();
    let m0 = NestedCorrector::with_repetitions(&nc, 0);
    let radius = nc.radius();
    let opts = SweepOptions::new(DEFAULT_BUDGET, 0, "t0");
    let model = CorruptionModel::new(CorruptionKind::BlockTargeted { block_len: 3 }, 2, 0);
    let report = soundness_sweep(&m0, &radius, &model, 200, &opts).unwrap();
    ensure(!report.passed, || format!("t = 0 passed with min {}", report.min_success))?;
    let cx = report.counterexample.ok_or("no counterexample reported")?;
    let (w, c, i) = (mask(&cx.word), mask(cx.source.as_ref().ok_or("no source codeword")?), cx.index.ok_or("no index")?);
    ensure((w ^ c).count_ones() <= 2 && tensor_member(c), || format!("counterexample {} is outside the radius", cx.word))?;
    let p = fixture_success_oracle(w, c, i, 0);
    ensure(p < ratio(2, 3) && Some(&p) == cx.probability.as_ref(), || format!("oracle success {p} for {cx}"))?;
    let exhaustive = soundness_sweep(&m0, &radius, &CorruptionModel::new(CorruptionKind::Exhaustive, 2, 0), 0, &opts).unwrap();
    ensure(!exhaustive.passed && exhaustive.counterexample.is_some(), || "exhaustive t = 0 sweep passed".into())?;

    let outer = nc.outer();
    let full = Tester::parity_rows(outer, outer.parity_check()).unwrap();
    let rows: Vec<BitWord> = outer.parity_check().row_iter().skip(1).cloned().collect();
    let missing = Tester::parity_rows(outer, &BitMatrix::from_rows(9, rows).unwrap()).unwrap();
    let tf = measure_testability(&full, DEFAULT_BUDGET).unwrap();
    let tm = measure_testability(&missing, DEFAULT_BUDGET).unwrap();
    ensure(tm.kappa < tf.kappa, || format!("dropping a row: {} vs {}", tm.kappa, tf.kappa))?;
    let rep = tm.to_report(&missing, &SweepOptions::new(DEFAULT_BUDGET, 0, "missing-row"), &tf.kappa);
    let tcx = rep.counterexample.as_ref().filter(|_| !rep.passed).ok_or("missing-row tester not reported")?;
    let wd = ratio(outer.nearest_codeword(&tcx.word, DEFAULT_BUDGET).unwrap().errors as i64, 9);
    let rej = missing.exact_reject_probability(&tcx.word, DEFAULT_BUDGET).unwrap();
    ensure(rej / wd == tm.kappa, || format!("witness {} does not attain {}", tcx.word, tm.kappa))?;

    let h = Arc::new(hamming_code(3).unwrap());
    let h_rows: Vec<BitWord> = h.parity_check().row_iter().skip(1).cloned().collect();
    let h_missing = Tester::parity_rows(&h, &BitMatrix::from_rows(7, h_rows).unwrap()).unwrap();
    let th = measure_testability(&h_missing, DEFAULT_BUDGET).unwrap();
    let th_full = measure_testability(&Tester::parity_rows(&h, h.parity_check()).unwrap(), DEFAULT_BUDGET).unwrap();
    ensure(th.kappa < th_full.kappa && h_missing.exact_reject_probability(&th.witness, DEFAULT_BUDGET).unwrap().is_zero(), || {
        format!("hamming: {} vs {}", th.kappa, th_full.kappa)
    })?;
    Ok(format!(
        "t = 0 fails at w={} i={i} (success {p}); missing row drops kappa {} → {} (witness {})",
        cx.word, tf.kappa, tm.kappa, tcx.word
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("rate bound of nested codes", c1_rate_bound, Duration::from_secs(5)),
        ("completeness of the nested corrector", c2_completeness, Duration::from_secs(10)),
        ("exact soundness at radius δ/2", c3_soundness, Duration::from_secs(60)),
        ("closed form equals enumeration", c4_oracle_cross_check, Duration::MAX),
        ("query accounting", c5_query_accounting, Duration::MAX),
        ("exact testability", c6_testability, Duration::MAX),
        ("repetition certificate", c7_repetitions, Duration::MAX),
        ("parameter arithmetic", c8_parameters, Duration::MAX),
        ("tensor distance and membership", c9_tensor, Duration::MAX),
        ("thread-count determinism", c10_determinism, Duration::MAX),
        ("negative controls", c11_negative_controls, Duration::MAX),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|s| {
            if elapsed > *limit {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            } else {
                Ok(s)
            }
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}]: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
