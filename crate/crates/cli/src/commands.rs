use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use loccode::analysis::params::{
    binary_entropy, dellm_params, family_params, gv_epsilon, headline_bounds, parse_big_n, Constants, HeadlineInputs,
};
use loccode::analysis::{
    measure_testability, measure_testability_mc, monte_carlo_success, simulate as run_simulation, soundness_sweep,
    verify_completeness, write_reports_csv, write_reports_json, write_simulation_csv, CorruptionKind, CorruptionModel,
    SweepOptions, VerificationReport,
};
use loccode::chain::{load_chain, load_code, make_tester};
use loccode::codes::{hamming_code, parity_code, random_ldpc, tensor_product, write_pchk, LinearCode};
use loccode::local::{full_read_corrector, AlwaysBottomCorrector, Corrector};
use loccode::nesting::{iterate_nesting, NestedCorrector};
use loccode::rational::{floor_to_u64, format_rational, from_usize, parse_rational, to_f64};
use loccode::{Error, Rational, Result};
use num_bigint::BigUint;
use num_traits::Zero;

use crate::{BuildArgs, Family, Format, GlobalOpts, MeasureArgs, NestArgs, ParamsArgs, Procedure, SimulateArgs, Source, VerifyArgs};

/// Writes `bytes` to `--out`, or stdout.
fn emit(global: &GlobalOpts, bytes: &[u8]) -> Result<()> {
    match &global.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn constants(global: &GlobalOpts) -> Result<Constants> {
    match &global.constants {
        Some(p) => Constants::load(p),
        None => Ok(Constants::default()),
    }
}

fn label_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

/// `parity<n>`, `hamming<r>`, or a .pchk path.
fn factor(spec: &str) -> Result<LinearCode> {
    if let Some(n) = spec.strip_prefix("parity").and_then(|s| s.parse().ok()) {
        return parity_code(n);
    }
    if let Some(r) = spec.strip_prefix("hamming").and_then(|s| s.parse().ok()) {
        return hamming_code(r);
    }
    load_code(Path::new(spec))
}

pub fn build(global: &GlobalOpts, a: &BuildArgs) -> Result<u8> {
    let code = match a.family {
        Family::Parity => parity_code(required(a.n, "n")?)?,
        Family::Hamming => hamming_code(required(a.r, "r")?)?,
        Family::Ldpc => random_ldpc(required(a.n, "n")?, required(a.rows, "rows")?, required(a.row_weight, "row-weight")?, global.seed)?,
        Family::Tensor => {
            let fa = factor(a.a.as_deref().ok_or_else(|| Error::InvalidParameter("missing --a".into()))?)?;
            let fb = factor(a.b.as_deref().ok_or_else(|| Error::InvalidParameter("missing --b".into()))?)?;
            tensor_product(&fa, &fb)?
        }
    };
    let mut summary = format!("n = {}\nk = {}\n", code.n(), code.k());
    match code.min_weight(global.budget) {
        Ok(d) => summary += &format!("distance = {} ({d} positions)\n", format_rational(&(from_usize(d) / from_usize(code.n())))),
        Err(e) if a.distance || !e.is_budget() => return Err(e),
        Err(_) => summary += "distance = not computed (exceeds budget)\n",
    }
    let mut pchk = Vec::new();
    write_pchk(&code, &mut pchk)?;
    emit(global, &pchk)?;
    if global.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(0)
}

pub fn nest(global: &GlobalOpts, a: &NestArgs) -> Result<u8> {
    let specs = load_chain(&a.descriptor)?;
    let it = iterate_nesting(&specs, global.budget)?;
    let rlcc = &it.rlcc;
    let mut out = String::new();
    for l in &rlcc.levels {
        out += &format!("level {}: n={} k={} radius={}", l.level, l.n, l.k, format_rational(&l.radius));
        if let (Some(t), Some(q)) = (l.repetitions, l.tester_queries) {
            out += &format!(" t={t} q={q}");
        }
        out += &format!(" rate_bound={} queries={}\n", format_rational(&l.rate_bound), l.query_bound);
    }
    let n = rlcc.code.n();
    out += &format!("dimension = {}\n", rlcc.code.k());
    out += &format!("rate = {}\n", format_rational(&rlcc.code.rate()));
    out += &format!("rate_bound = {}\n", format_rational(&rlcc.rate_bound));
    out += &format!("radius = {}\n", format_rational(rlcc.corrector.radius()));
    let n1 = rlcc.levels[0].n;
    let terms: Vec<String> = rlcc.levels[1..]
        .iter()
        .map(|l| format!("{}*{}", l.repetitions.unwrap_or(0), l.tester_queries.unwrap_or(0)))
        .collect();
    let expansion = std::iter::once(n1.to_string()).chain(terms).collect::<Vec<_>>().join(" + ");
    out += &format!("queries = n1 + Σ t_j*q_j = {expansion} = {}\n", rlcc.query_bound);
    if let Some(path) = &global.out {
        let mut f = BufWriter::new(File::create(path)?);
        write_pchk(&rlcc.code, &mut f)?;
        f.flush()?;
        out += &format!("wrote {} (n={n})\n", path.display());
    }
    print!("{out}");
    Ok(0)
}

/// The corrector a source defines, with its code and a label.
struct Loaded {
    label: String,
    corrector: Arc<dyn Corrector>,
}

fn load_corrector(global: &GlobalOpts, source: &Source, repetitions: Option<usize>) -> Result<Loaded> {
    if let Some(path) = &source.code {
        if repetitions.is_some() {
            return Err(Error::InvalidParameter("--repetitions needs --chain".into()));
        }
        let code = Arc::new(load_code(path)?);
        let corrector: Arc<dyn Corrector> = Arc::new(full_read_corrector(&code, global.budget)?);
        return Ok(Loaded { label: label_of(path), corrector });
    }
    let path = source.chain.as_ref().expect("clap enforces one source");
    let specs = load_chain(path)?;
    let it = iterate_nesting(&specs, global.budget)?;
    let corrector: Arc<dyn Corrector> = match (repetitions, it.chain.last()) {
        (Some(t), Some(outer)) => Arc::new(NestedCorrector::with_repetitions(outer, t)),
        (Some(_), None) => return Err(Error::InvalidParameter("--repetitions needs at least two levels".into())),
        (None, _) => it.rlcc.corrector,
    };
    Ok(Loaded { label: label_of(path), corrector })
}

fn report_diagnostics(r: &VerificationReport) {
    if let Some(e) = &r.estimate {
        eprintln!(
            "{}: {}/{} successes, {:.0}% Clopper–Pearson interval [{:.6}, {:.6}]",
            r.kind.as_str(),
            e.successes,
            e.samples,
            e.level * 100.0,
            e.lower,
            e.upper
        );
    }
    if !r.passed {
        match &r.counterexample {
            Some(c) => eprintln!("{} failed: {c}", r.kind.as_str()),
            None => eprintln!("{} failed", r.kind.as_str()),
        }
    }
}

fn write_reports(global: &GlobalOpts, format: Format, reports: &[VerificationReport]) -> Result<u8> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_reports_csv(reports, &mut buf)?,
        Format::Json => write_reports_json(reports, &mut buf)?,
    }
    emit(global, &buf)?;
    reports.iter().for_each(report_diagnostics);
    Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
}

pub fn verify(global: &GlobalOpts, a: &VerifyArgs) -> Result<u8> {
    if a.procedure == Procedure::Tester {
        let path = a.source.code.as_ref().ok_or_else(|| Error::InvalidParameter("--procedure tester needs --code".into()))?;
        let tester = make_tester(load_code(path)?, a.tester.parse()?)?;
        let t = match measure_testability(&tester, global.budget) {
            Err(e) if e.is_budget() && a.mc => measure_testability_mc(&tester, a.samples, global.seed, global.budget)?,
            other => other?,
        };
        let threshold = a.threshold.as_deref().map(parse_rational).transpose()?;
        let opts = SweepOptions::new(global.budget, global.seed, label_of(path));
        let mut report = t.to_report(&tester, &opts, threshold.as_ref().unwrap_or(&Rational::zero()));
        if threshold.is_none() && t.kappa.is_zero() {
            report.passed = false;
            report.counterexample = Some(loccode::analysis::Counterexample {
                probability: Some(t.witness_reject.clone()),
                ..loccode::analysis::Counterexample::word(t.witness.clone())
            });
        }
        return write_reports(global, a.format, &[report]);
    }

    let loaded = load_corrector(global, &a.source, a.repetitions)?;
    let corrector: Arc<dyn Corrector> = match a.procedure {
        Procedure::Bottom => Arc::new(AlwaysBottomCorrector::new(loaded.corrector.code(), loaded.corrector.radius().clone())),
        _ => loaded.corrector,
    };
    let n = corrector.code().n();
    let radius = match &a.radius {
        Some(r) => parse_rational(r)?,
        None => corrector.radius().clone(),
    };
    let mut opts = SweepOptions::new(global.budget, global.seed, loaded.label);
    if a.mc {
        opts.fallback_samples = Some(a.samples);
    }
    let kind: CorruptionKind = a.model.parse()?;
    let max_flips = floor_to_u64(&(&radius * from_usize(n))).unwrap_or(0) as usize;
    let model = CorruptionModel::new(kind, a.weight.unwrap_or(max_flips), global.seed);

    let completeness = verify_completeness(corrector.as_ref(), &opts)?;
    let soundness = match kind {
        CorruptionKind::Exhaustive => soundness_sweep(corrector.as_ref(), &radius, &model, a.trials, &opts)?,
        _ if a.mc => monte_carlo_success(corrector.as_ref(), &radius, &model, a.samples, &opts)?,
        _ => soundness_sweep(corrector.as_ref(), &radius, &model, a.trials, &opts)?,
    };
    write_reports(global, a.format, &[completeness, soundness])
}

pub fn measure(global: &GlobalOpts, a: &MeasureArgs) -> Result<u8> {
    let tester = make_tester(load_code(&a.code)?, a.tester.parse()?)?;
    let t = if a.mc {
        measure_testability_mc(&tester, a.samples, global.seed, global.budget)?
    } else {
        measure_testability(&tester, global.budget)?
    };
    let out = format!(
        "kappa = {}\nkappa_clamped = {}\nwitness = {}\nreject = {}\ndistance = {}\nwords = {}\nexhaustive = {}\n",
        format_rational(&t.kappa),
        format_rational(&t.clamped),
        t.witness,
        format_rational(&t.witness_reject),
        format_rational(&t.witness_distance),
        t.words,
        t.exhaustive
    );
    emit(global, out.as_bytes())?;
    Ok(0)
}

fn approx(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{:.6e}", to_f64(r))
    }
}

pub fn params(global: &GlobalOpts, a: &ParamsArgs) -> Result<u8> {
    let c = constants(global)?;
    let mut out = format!(
        "# asymptotic constants = config: {} (formula evaluation, log base 2)\n",
        c.describe()
    );
    let calc = &a.calculator;
    if let Some(eps) = &calc.dellm {
        let p = dellm_params(&parse_rational(eps)?, &c)?;
        out += &format!("epsilon = {}\n", format_rational(&p.epsilon));
        out += &format!("p = {}\n", p.p);
        out += &format!("delta = {}\n", format_rational(&p.delta));
        out += &format!("kappa = {}\n", format_rational(&p.kappa));
        out += &format!("q = {}\n", format_rational(&p.q));
        out += "j,n_j\n";
        for j in 1..=a.levels {
            out += &format!("{j},{}\n", format_rational(&p.block_length(j)));
        }
    } else if let Some(n) = &calc.family {
        let f = family_params(&parse_big_n(n)?, &c)?;
        let cube = &f.p * &f.p * &f.p + &f.p;
        out += &format!("log2_N = {}\n", approx(&f.log_n));
        out += &format!("p = {}\n", f.p);
        out += &format!("epsilon_ltc = {}\n", format_rational(&f.epsilon_ltc));
        out += &format!("delta_ltc = {}\n", format_rational(&f.delta_ltc));
        out += &format!("kappa_ltc = {}\n", format_rational(&f.kappa_ltc));
        out += &format!("q_ltc = {}\n", format_rational(&f.q_ltc));
        out += &format!("m = {}\n", f.m);
        out += &format!("m_bound = {:.6}\n", f.m_bound);
        out += &format!("n1_within_bound = {}\n", f.n1_within_bound);
        out += "j,n_j,ratio_to_next,p(p^2+1)\n";
        for (j, nj) in f.lengths.iter().enumerate() {
            let ratio = f.ratios.get(j).map(approx).unwrap_or_else(|| "-".into());
            out += &format!("{},{nj},{ratio},{cube}\n", j + 1);
        }
    } else if let Some(n) = &calc.headline {
        let big: BigUint = parse_big_n(n)?;
        let f = |s: &str| -> Result<f64> { Ok(to_f64(&parse_rational(s)?)) };
        let inputs = HeadlineInputs { q: f(&a.q)?, kappa: f(&a.kappa)?, rate: f(&a.rate)?, epsilon: f(&a.eps)? };
        let h = headline_bounds(&big, &inputs, &c)?;
        out += &format!("log2_N = {}\nlog2_log2_N = {}\n", h.log_n, h.log_log_n);
        out += &format!("queries = {:e}\n", h.queries);
        out += &format!("rate = {}\n", h.rate);
        out += &format!("radius = {:e}\n", h.radius);
        out += &format!("min_length = {:e}\n", h.min_length);
        out += &format!("boosted_queries = {:e}\n", h.boosted_queries);
        out += &format!("boosted_rate = {}\n", h.boosted_rate);
        out += &format!("explicit_queries = {:e}\n", h.explicit_queries);
        out += &format!("explicit_radius = {:e}\n", h.explicit_radius);
    } else if let Some(v) = &calc.gv {
        let (r, d) = (parse_rational(&v[0])?, parse_rational(&v[1])?);
        let g = gv_epsilon(&r, &d)?;
        out += &format!("H(delta) = {}\n", binary_entropy(to_f64(&d)));
        out += &format!("epsilon = {}\n", g.epsilon);
        out += if g.feasible { "feasible = true\n" } else { "feasible = false (infeasible pair)\n" };
    }
    emit(global, out.as_bytes())?;
    Ok(0)
}

pub fn simulate(global: &GlobalOpts, a: &SimulateArgs) -> Result<u8> {
    let loaded = load_corrector(global, &a.source, a.repetitions)?;
    let kind: CorruptionKind = a.model.parse()?;
    if kind == CorruptionKind::Exhaustive {
        return Err(Error::InvalidParameter("simulate needs a random model: uniform, burst or block:<len>".into()));
    }
    let n = loaded.corrector.code().n();
    if a.weight > n {
        return Err(Error::InvalidParameter(format!("weight {} exceeds block length {n}", a.weight)));
    }
    let model = CorruptionModel::new(kind, a.weight, global.seed);
    let rows = run_simulation(loaded.corrector.as_ref(), &model, a.trials)?;
    let mut buf = Vec::new();
    write_simulation_csv(&rows, &mut buf)?;
    emit(global, &buf)?;
    let ok = rows.iter().filter(|r| !r.wrong).count();
    let rate = if rows.is_empty() { 0.0 } else { ok as f64 / rows.len() as f64 };
    eprintln!("trials = {}, correct or ⊥ = {ok} ({:.4})", rows.len(), rate);
    Ok(0)
}
