use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

/// Confidence level used for every Monte Carlo interval.
pub const CONFIDENCE: f64 = 0.99;

/// A binomial proportion with its exact Clopper–Pearson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub samples: u64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl Estimate {
    pub fn new(successes: u64, samples: u64) -> Self {
        let (lower, upper) = clopper_pearson(successes, samples, CONFIDENCE);
        Estimate { successes, samples, lower, upper, level: CONFIDENCE }
    }

    pub fn point(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.successes as f64 / self.samples as f64
        }
    }
}

/// Two-sided exact binomial interval at confidence `level`.
pub fn clopper_pearson(successes: u64, samples: u64, level: f64) -> (f64, f64) {
    assert!(successes <= samples, "more successes than samples");
    if samples == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - level;
    let (x, n) = (successes as f64, samples as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("positive shape").inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == samples {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}
