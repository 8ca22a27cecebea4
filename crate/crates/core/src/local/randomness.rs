use num_bigint::BigInt;
use rand::Rng;

use crate::error::{check_budget, Error, Result};
use crate::rational::Rational;

/// A finite probability space with integer weights; outcome `j` has
/// probability `weights[j] / total`. Weights are positive, so every outcome
/// is reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomnessSpace {
    weights: Vec<u64>,
    total: u64,
}

impl RandomnessSpace {
    pub fn uniform(outcomes: usize) -> Self {
        assert!(outcomes > 0, "a randomness space needs at least one outcome");
        RandomnessSpace { weights: vec![1; outcomes], total: outcomes as u64 }
    }

    pub fn deterministic() -> Self {
        Self::uniform(1)
    }

    pub fn weighted(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() || weights.contains(&0) {
            return Err(Error::invalid("weights must be positive and nonempty"));
        }
        let total = weights.iter().try_fold(0u64, |acc, &w| acc.checked_add(w));
        let total = total.ok_or_else(|| Error::invalid("weights overflow"))?;
        Ok(RandomnessSpace { weights, total })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn probability(&self, outcome: usize) -> Rational {
        Rational::new(BigInt::from(self.weights[outcome]), BigInt::from(self.total))
    }

    pub fn weight(&self, outcome: usize) -> u64 {
        self.weights[outcome]
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut x = rng.gen_range(0..self.total);
        for (j, &w) in self.weights.iter().enumerate() {
            if x < w {
                return j;
            }
            x -= w;
        }
        unreachable!("x < total")
    }
}

/// Independent product of spaces; `(space, copies)` contributes `copies`
/// consecutive coordinates to a flattened outcome vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpace {
    factors: Vec<(RandomnessSpace, usize)>,
}

impl ProductSpace {
    pub fn single(space: RandomnessSpace) -> Self {
        ProductSpace { factors: vec![(space, 1)] }
    }

    pub fn trivial() -> Self {
        ProductSpace { factors: Vec::new() }
    }

    /// `self × space^copies`.
    pub fn with_factor(mut self, space: RandomnessSpace, copies: usize) -> Self {
        if copies > 0 {
            self.factors.push((space, copies));
        }
        self
    }

    pub fn factors(&self) -> &[(RandomnessSpace, usize)] {
        &self.factors
    }

    /// Length of a flattened outcome vector.
    pub fn arity(&self) -> usize {
        self.factors.iter().map(|(_, c)| c).sum()
    }

    /// Number of outcome tuples, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        let mut size: u128 = 1;
        for (space, copies) in &self.factors {
            for _ in 0..*copies {
                size = size.saturating_mul(space.len() as u128);
            }
        }
        size
    }

    /// Sum of coordinate space sizes: the cost of checking each coordinate independently.
    pub fn coordinate_outcomes(&self) -> u128 {
        self.factors.iter().map(|(s, c)| s.len() as u128 * *c as u128).sum()
    }

    /// The space for coordinate `j` of a flattened outcome.
    pub fn coordinate(&self, j: usize) -> &RandomnessSpace {
        let mut j = j;
        for (space, copies) in &self.factors {
            if j < *copies {
                return space;
            }
            j -= copies;
        }
        panic!("coordinate out of range")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.arity());
        for (space, copies) in &self.factors {
            for _ in 0..*copies {
                out.push(space.sample(rng));
            }
        }
        out
    }

    pub fn probability(&self, outcome: &[usize]) -> Rational {
        let mut num = BigInt::from(1);
        let mut den = BigInt::from(1);
        for (j, &o) in outcome.iter().enumerate() {
            let s = self.coordinate(j);
            num *= s.weight(o);
            den *= s.total_weight();
        }
        Rational::new(num, den)
    }

    /// Calls `f` on every outcome tuple in odometer order (last coordinate fastest).
    pub fn for_each(&self, budget: u64, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
        check_budget("randomness enumeration", self.size(), budget)?;
        let sizes: Vec<usize> = (0..self.arity()).map(|j| self.coordinate(j).len()).collect();
        let mut outcome = vec![0usize; sizes.len()];
        loop {
            f(&outcome)?;
            let mut j = sizes.len();
            loop {
                if j == 0 {
                    return Ok(());
                }
                j -= 1;
                outcome[j] += 1;
                if outcome[j] < sizes[j] {
                    break;
                }
                outcome[j] = 0;
            }
        }
    }
}
