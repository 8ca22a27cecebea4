//! Evaluations of the asymptotic parameter formulas. Every hidden `Θ/Ω/O`
//! constant is a field of [`Constants`], which defaults to 1. The outputs are
//! formula evaluations under those constants, not properties of real codes.

use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::rational::{big_log2, ceil_to_biguint, format_rational, parse_rational, pow, round_to_biguint, to_f64, Rational};

/// Multipliers for the asymptotic notation in the parameter formulas.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    /// Prime power size: `p ≥ c_p·(1/ε)^10`, or `c_p·log^10 N`.
    #[serde(deserialize_with = "de_rational")]
    pub c_p: Rational,
    #[serde(deserialize_with = "de_rational")]
    pub c_delta: Rational,
    #[serde(deserialize_with = "de_rational")]
    pub c_kappa: Rational,
    #[serde(deserialize_with = "de_rational")]
    pub c_q: Rational,
    /// Block-length multiplier in the family formula.
    #[serde(deserialize_with = "de_rational")]
    pub c_n: Rational,
    /// Multiplier on every headline query formula.
    #[serde(deserialize_with = "de_rational")]
    pub c_query: Rational,
    /// Multiplier on every `1/log log N` rate loss.
    #[serde(deserialize_with = "de_rational")]
    pub c_rate: Rational,
    /// Multiplier on every headline correcting radius.
    #[serde(deserialize_with = "de_rational")]
    pub c_radius: Rational,
}

impl Default for Constants {
    fn default() -> Self {
        let one = Rational::one();
        Constants {
            c_p: one.clone(),
            c_delta: one.clone(),
            c_kappa: one.clone(),
            c_q: one.clone(),
            c_n: one.clone(),
            c_query: one.clone(),
            c_rate: one.clone(),
            c_radius: one,
        }
    }
}

fn de_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Float(f64),
        Str(String),
    }
    let r = match Raw::deserialize(d)? {
        Raw::Int(i) => Ok(Rational::from_integer(i.into())),
        Raw::Float(f) => parse_rational(&format!("{f}")),
        Raw::Str(s) => parse_rational(&s),
    }
    .map_err(serde::de::Error::custom)?;
    if !r.is_positive() {
        return Err(serde::de::Error::custom("constants must be positive"));
    }
    Ok(r)
}

impl Constants {
    /// Parses a TOML table such as `c_p = 2` or `c_delta = "1/4"`.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn is_default(&self) -> bool {
        *self == Constants::default()
    }

    /// `name=value` pairs, for banners.
    pub fn describe(&self) -> String {
        [
            ("c_p", &self.c_p),
            ("c_delta", &self.c_delta),
            ("c_kappa", &self.c_kappa),
            ("c_q", &self.c_q),
            ("c_n", &self.c_n),
            ("c_query", &self.c_query),
            ("c_rate", &self.c_rate),
            ("c_radius", &self.c_radius),
        ]
        .iter()
        .map(|(k, v)| format!("{k}={}", format_rational(v)))
        .collect::<Vec<_>>()
        .join(" ")
    }
}

/// Parses a decimal integer or `b^e`, e.g. `2^1000`.
pub fn parse_big_n(s: &str) -> Result<BigUint> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a positive integer: {s:?}"));
    let v = match s.split_once('^') {
        Some((b, e)) => {
            let b: BigUint = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            num_traits::pow(b, e as usize)
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_zero() {
        return Err(bad());
    }
    Ok(v)
}

/// `log₂ N`, exact when `N` is a power of two and an f64-accurate rational otherwise.
pub fn log2_rational(n: &BigUint) -> Rational {
    if n.count_ones() == 1 {
        return Rational::from_integer(BigInt::from(n.trailing_zeros().expect("nonzero")));
    }
    Rational::from_float(big_log2(n)).expect("finite logarithm")
}

const SMALL_PRIMES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Miller–Rabin with the first 20 primes as bases. Deterministic below
/// `3.3·10^24`; beyond that a false positive needs a strong pseudoprime to all
/// 20 bases.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n1 >> s;
    'bases: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// True when `n = r^e` for a prime `r` and `e ≥ 1`.
pub fn is_prime_power(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for e in 1..=n.bits() as u32 {
        let r = n.nth_root(e);
        if r < BigUint::from(2u32) {
            break;
        }
        if num_traits::pow(r.clone(), e as usize) == *n && is_probable_prime(&r) {
            return true;
        }
    }
    false
}

/// Smallest odd prime power that is at least `x`.
pub fn smallest_odd_prime_power_at_least(x: &Rational) -> BigUint {
    let mut c = if x.is_positive() { ceil_to_biguint(x) } else { BigUint::zero() };
    if c < BigUint::from(3u32) {
        c = BigUint::from(3u32);
    }
    if c.is_even() {
        c += 1u32;
    }
    while !is_prime_power(&c) {
        c += 2u32;
    }
    c
}

/// `p^{3j} − p^j`.
pub fn block_length_core(p: &BigUint, j: u32) -> BigUint {
    num_traits::pow(p.clone(), 3 * j as usize) - num_traits::pow(p.clone(), j as usize)
}

/// `(q/8)·(p^{3j} − p^j)`.
pub fn dellm_block_length(q: &Rational, p: &BigUint, j: u32) -> Rational {
    q / Rational::from_integer(8.into()) * Rational::from_integer(BigInt::from(block_length_core(p, j)))
}

/// `(p^{3(j+1)} − p^{j+1}) / (p^{3j} − p^j)`, exactly.
pub fn consecutive_ratio(p: &BigUint, j: u32) -> Rational {
    Rational::new(BigInt::from(block_length_core(p, j + 1)), BigInt::from(block_length_core(p, j)))
}

/// Parameters for a rate-`1−ε` family of testable codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DellmParams {
    pub epsilon: Rational,
    pub p: BigUint,
    pub delta: Rational,
    pub kappa: Rational,
    pub q: Rational,
}

impl DellmParams {
    pub fn block_length(&self, j: u32) -> Rational {
        dellm_block_length(&self.q, &self.p, j)
    }
}

pub fn dellm_params(epsilon: &Rational, c: &Constants) -> Result<DellmParams> {
    if !epsilon.is_positive() || *epsilon > Rational::one() {
        return Err(Error::invalid("epsilon must lie in (0, 1]"));
    }
    let inv = epsilon.recip();
    Ok(DellmParams {
        epsilon: epsilon.clone(),
        p: smallest_odd_prime_power_at_least(&(&c.c_p * pow(&inv, 10))),
        delta: &c.c_delta * pow(epsilon, 3),
        kappa: &c.c_kappa * pow(epsilon, 15),
        q: &c.c_q * pow(&inv, 20),
    })
}

/// A concrete reading of the polylogarithmic family for target length `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDescriptor {
    pub big_n: BigUint,
    pub log_n: Rational,
    pub p: BigUint,
    pub epsilon_ltc: Rational,
    pub delta_ltc: Rational,
    pub kappa_ltc: Rational,
    pub q_ltc: Rational,
    /// `n_1, …, n_m`, all at most `N`.
    pub lengths: Vec<BigUint>,
    pub m: usize,
    /// Exact unrounded ratios `(p^{3(j+1)} − p^{j+1})/(p^{3j} − p^j)` for `j < m`.
    pub ratios: Vec<Rational>,
    /// `8·c_n·c_p³·log^50 N`, which bounds `n_1` because `p < 2·c_p·log^10 N`.
    pub n1_bound: Rational,
    pub n1_within_bound: bool,
    /// `log N / (3 log p) + 1`.
    pub m_bound: f64,
    pub constants: Constants,
}

pub fn family_params(big_n: &BigUint, c: &Constants) -> Result<FamilyDescriptor> {
    if *big_n < BigUint::from(4u32) {
        return Err(Error::invalid("N too small: need N ≥ 4 so that log log N > 0"));
    }
    let l = log2_rational(big_n);
    let p = smallest_odd_prime_power_at_least(&(&c.c_p * pow(&l, 10)));
    let l20 = pow(&l, 20);
    let big = Rational::from_integer(BigInt::from(big_n.clone()));
    let mut lengths = Vec::new();
    for j in 1u32.. {
        let nj = round_to_biguint(&(&c.c_n * Rational::from_integer(BigInt::from(block_length_core(&p, j))) * &l20));
        if Rational::from_integer(BigInt::from(nj.clone())) > big {
            break;
        }
        lengths.push(nj);
    }
    if lengths.is_empty() {
        return Err(Error::invalid(format!("N too small: n_1 exceeds N = {big_n}")));
    }
    let m = lengths.len();
    let ratios = (1..m as u32).map(|j| consecutive_ratio(&p, j)).collect();
    let n1_bound = Rational::from_integer(8.into()) * &c.c_n * pow(&c.c_p, 3) * pow(&l, 50);
    let n1_within_bound = Rational::from_integer(BigInt::from(lengths[0].clone())) <= n1_bound;
    let m_bound = to_f64(&l) / (3.0 * big_log2(&p)) + 1.0;
    Ok(FamilyDescriptor {
        big_n: big_n.clone(),
        epsilon_ltc: (Rational::from_integer(100.into()) * &l).recip(),
        delta_ltc: &c.c_delta / pow(&l, 3),
        kappa_ltc: &c.c_kappa / pow(&l, 15),
        q_ltc: &c.c_q * &l20,
        log_n: l,
        p,
        lengths,
        m,
        ratios,
        n1_bound,
        n1_within_bound,
        m_bound,
        constants: c.clone(),
    })
}

/// Inputs to the headline formulas besides `N`.
#[derive(Clone, Debug, Serialize)]
pub struct HeadlineInputs {
    /// Tester query complexity and testability of the final code.
    pub q: f64,
    pub kappa: f64,
    /// Rate of the final code.
    pub rate: f64,
    /// `ε` for the explicit instantiation.
    pub epsilon: f64,
}

impl Default for HeadlineInputs {
    fn default() -> Self {
        HeadlineInputs { q: 1.0, kappa: 1.0, rate: 1.0, epsilon: 0.5 }
    }
}

/// Numeric evaluations of the headline bounds with `L = log₂ N`.
#[derive(Clone, Debug, Serialize)]
pub struct HeadlineBounds {
    pub log_n: f64,
    pub log_log_n: f64,
    /// `c·L^69 / log L`.
    pub queries: f64,
    /// `1 − c/log L`.
    pub rate: f64,
    /// `c/L^3`.
    pub radius: f64,
    /// `N / L^30`.
    pub min_length: f64,
    /// `c·(q/κ)·L^33 + L^69/log L`.
    pub boosted_queries: f64,
    /// `R − c/log L`.
    pub boosted_rate: f64,
    /// `c·(1/ε)^35·L^33 + L^69/log L`.
    pub explicit_queries: f64,
    /// `c·ε^3`.
    pub explicit_radius: f64,
}

pub fn headline_bounds(big_n: &BigUint, inputs: &HeadlineInputs, c: &Constants) -> Result<HeadlineBounds> {
    if *big_n < BigUint::from(4u32) {
        return Err(Error::invalid("N must be at least 4 so that log log N > 0"));
    }
    let positive = [inputs.q, inputs.kappa, inputs.epsilon];
    if positive.iter().any(|&x| !(x > 0.0 && x.is_finite())) || !(0.0..=1.0).contains(&inputs.rate) {
        return Err(Error::invalid("q, kappa and epsilon must be positive and rate must lie in [0, 1]"));
    }
    let l = big_log2(big_n);
    let ll = l.log2();
    let (cq, cr, cd) = (to_f64(&c.c_query), to_f64(&c.c_rate), to_f64(&c.c_radius));
    let tail = l.powi(69) / ll;
    Ok(HeadlineBounds {
        log_n: l,
        log_log_n: ll,
        queries: cq * tail,
        rate: 1.0 - cr / ll,
        radius: cd / l.powi(3),
        min_length: (big_log2(big_n) - 30.0 * l.log2()).exp2(),
        boosted_queries: cq * (inputs.q / inputs.kappa * l.powi(33) + tail),
        boosted_rate: inputs.rate - cr / ll,
        explicit_queries: cq * ((1.0 / inputs.epsilon).powi(35) * l.powi(33) + tail),
        explicit_radius: cd * inputs.epsilon.powi(3),
    })
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GvPoint {
    /// `1 − R − H(δ)`; negative values are reported, not clamped.
    pub epsilon: f64,
    pub feasible: bool,
}

pub fn gv_epsilon(rate: &Rational, delta: &Rational) -> Result<GvPoint> {
    let unit = Rational::zero()..=Rational::one();
    if !unit.contains(rate) || !unit.contains(delta) {
        return Err(Error::invalid("R and delta must lie in [0, 1]"));
    }
    let epsilon = 1.0 - to_f64(rate) - binary_entropy(to_f64(delta));
    Ok(GvPoint { epsilon, feasible: epsilon >= 0.0 })
}

/// Rounds a rational down to `u64` for display, saturating.
pub fn saturating_u64(r: &Rational) -> u64 {
    r.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}
