use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codes::{next_combination, LinearCode};
use crate::error::{check_budget, Error, Result};
use crate::gf2::BitWord;
use crate::nesting::NestedLayout;

/// How a corrupted word is produced from a codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorruptionKind {
    /// `weight` distinct positions chosen uniformly.
    Uniform,
    /// `weight` consecutive positions starting at a uniform offset.
    Burst,
    /// `weight` distinct positions inside one uniformly chosen layout block
    /// of the given length, aligned or tail.
    BlockTargeted { block_len: usize },
    /// Every error pattern of weight at most `weight`.
    Exhaustive,
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorruptionKind::Uniform => f.write_str("uniform"),
            CorruptionKind::Burst => f.write_str("burst"),
            CorruptionKind::BlockTargeted { block_len } => write!(f, "block:{block_len}"),
            CorruptionKind::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

impl FromStr for CorruptionKind {
    type Err = Error;

    /// `uniform`, `burst`, `exhaustive`, or `block:<len>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(CorruptionKind::Uniform),
            "burst" => Ok(CorruptionKind::Burst),
            "exhaustive" => Ok(CorruptionKind::Exhaustive),
            _ => {
                let len = s
                    .strip_prefix("block:")
                    .and_then(|l| l.parse::<usize>().ok())
                    .filter(|&l| l > 0)
                    .ok_or_else(|| Error::invalid(format!("unknown corruption model {s:?}")))?;
                Ok(CorruptionKind::BlockTargeted { block_len: len })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorruptionModel {
    pub kind: CorruptionKind,
    /// Number of flipped positions (an upper bound for `Exhaustive`).
    pub weight: usize,
    pub seed: u64,
}

impl CorruptionModel {
    pub fn new(kind: CorruptionKind, weight: usize, seed: u64) -> Self {
        CorruptionModel { kind, weight, seed }
    }

    /// Generator for trial `trial`: the master seed with its own stream.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    /// Error pattern of length `n` for one random trial.
    pub fn sample_error<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<BitWord> {
        if self.weight > n {
            return Err(Error::invalid(format!("corruption weight {} exceeds block length {n}", self.weight)));
        }
        let w = self.weight;
        match self.kind {
            CorruptionKind::Uniform => {
                let picks: Vec<usize> = sample(rng, n, w).into_iter().map(|p| p + 1).collect();
                Ok(BitWord::from_support(n, &picks))
            }
            CorruptionKind::Burst => {
                let start = rng.gen_range(1..=n - w + 1);
                Ok(BitWord::from_support(n, &(start..start + w).collect::<Vec<_>>()))
            }
            CorruptionKind::BlockTargeted { block_len } => {
                if w > block_len {
                    return Err(Error::invalid(format!("corruption weight {w} exceeds block length {block_len}")));
                }
                let blocks = NestedLayout::new(n, block_len)?.blocks();
                let block = blocks[rng.gen_range(0..blocks.len())];
                let picks: Vec<usize> = sample(rng, block_len, w).into_iter().map(|p| block.start + p).collect();
                Ok(BitWord::from_support(n, &picks))
            }
            CorruptionKind::Exhaustive => Err(Error::invalid("the exhaustive model enumerates patterns; it does not sample")),
        }
    }

    /// One random trial: a uniformly random codeword and its corruption.
    pub fn sample_pair<R: Rng + ?Sized>(&self, code: &LinearCode, rng: &mut R) -> Result<(BitWord, BitWord)> {
        let bits: Vec<bool> = (0..code.k()).map(|_| rng.gen()).collect();
        let c = code.combine(&BitWord::from_bools(&bits))?;
        let e = self.sample_error(code.n(), rng)?;
        Ok((c.xor(&e), c))
    }
}

/// Every error pattern of length `n` and weight at most `max_weight`, by
/// weight and then in lexicographic order of supports.
pub fn error_patterns(n: usize, max_weight: usize, budget: u64) -> Result<Vec<BitWord>> {
    let max_weight = max_weight.min(n);
    check_budget("error-pattern enumeration", patterns_up_to(n, max_weight), budget)?;
    let mut out = Vec::new();
    for weight in 0..=max_weight {
        let mut positions: Vec<usize> = (1..=weight).collect();
        loop {
            out.push(BitWord::from_support(n, &positions));
            if !next_combination(&mut positions, n) {
                break;
            }
        }
    }
    Ok(out)
}

/// `Σ_{j ≤ w} C(n, j)`, saturating.
pub fn patterns_up_to(n: usize, w: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 0..=w.min(n) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((n - j) as u128) / (j as u128 + 1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::parity_code;

    #[test]
    fn pattern_counts() {
        assert_eq!(patterns_up_to(9, 2), 1 + 9 + 36);
        assert_eq!(patterns_up_to(4, 9), 16);
        let p = error_patterns(9, 2, 1 << 20).unwrap();
        assert_eq!(p.len(), 46);
        assert!(p.iter().all(|e| e.weight() <= 2));
        let distinct: std::collections::BTreeSet<_> = p.iter().cloned().collect();
        assert_eq!(distinct.len(), 46);
        assert!(error_patterns(30, 15, 1000).unwrap_err().is_budget());
    }

    #[test]
    fn sampled_errors_have_the_requested_shape() {
        for kind in [CorruptionKind::Uniform, CorruptionKind::Burst, CorruptionKind::BlockTargeted { block_len: 3 }] {
            let model = CorruptionModel::new(kind, 2, 5);
            for trial in 0..50 {
                let e = model.sample_error(10, &mut model.rng(trial)).unwrap();
                assert_eq!(e.weight(), 2);
                let s = e.support();
                match kind {
                    CorruptionKind::Burst => assert_eq!(s[1], s[0] + 1),
                    CorruptionKind::BlockTargeted { .. } => {
                        let blocks = NestedLayout::new(10, 3).unwrap().blocks();
                        assert!(blocks.iter().any(|b| s.iter().all(|&p| b.contains(p))));
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn trials_are_reproducible_and_distinct() {
        let code = parity_code(8).unwrap();
        let model = CorruptionModel::new(CorruptionKind::Uniform, 3, 42);
        let a = model.sample_pair(&code, &mut model.rng(7)).unwrap();
        let b = model.sample_pair(&code, &mut model.rng(7)).unwrap();
        assert_eq!(a, b);
        assert!(code.contains(&a.1).unwrap());
        assert_eq!(a.0.hamming_distance(&a.1).unwrap(), 3);
        let others: Vec<_> = (0..20).map(|t| model.sample_pair(&code, &mut model.rng(t)).unwrap()).collect();
        assert!(others.iter().any(|o| o != &a));
    }

    #[test]
    fn kind_parsing_round_trips() {
        for s in ["uniform", "burst", "exhaustive", "block:3"] {
            assert_eq!(s.parse::<CorruptionKind>().unwrap().to_string(), s);
        }
        assert!("block:0".parse::<CorruptionKind>().is_err());
        assert!("random".parse::<CorruptionKind>().is_err());
    }
}
