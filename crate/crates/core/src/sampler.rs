//! Random variates from the two generative descriptions of the distribution,
//! and goodness-of-fit statistics against the exact masses.
//!
//! # Generator
//!
//! [`GeneratorState`] is SplitMix64 written in counter form: the `i`-th output
//! (`i = 1, 2, ...`) is
//!
//! ```text
//! z = seed + i * 0x9E3779B97F4A7C15            (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9     (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB     (wrapping)
//! out = z ^ (z >> 31)
//! ```
//!
//! Uniforms on `[0, 1)` take the top 53 bits: `(out >> 11) * 2^-53`. Only
//! integer arithmetic is involved, so streams are identical on every platform.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::distribution::{Params, PmfTable};
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorState {
    seed: u64,
    counter: u64,
}

impl GeneratorState {
    pub fn new(seed: u64) -> Self {
        GeneratorState { seed, counter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of outputs drawn so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        let mut z = self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    /// Draw cards from two decks until one is empty.
    Deck,
    /// Run Bernoulli trials until `m` successes or `m` failures.
    Trials,
}

impl std::str::FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deck" => Ok(Mechanism::Deck),
            "trials" => Ok(Mechanism::Trials),
            _ => Err(Error::Parse(format!("unknown mechanism {s:?}, expected deck or trials"))),
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mechanism::Deck => "deck",
            Mechanism::Trials => "trials",
        })
    }
}

/// Histogram of `n` draws over the support `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleSummary {
    pub counts: Vec<u64>,
    pub n: u64,
    pub mechanism: Mechanism,
}

impl SampleSummary {
    pub fn empirical(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    /// Index of the largest count (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = k;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofStatistics {
    pub tv_distance: f64,
    pub chi_square: f64,
}

/// Takes from deck A with probability `p`, otherwise from deck B, until one
/// of the two `m`-card decks is empty; returns how many cards were taken from
/// the other one.
pub fn sample_deck(params: &Params, gen: &mut GeneratorState) -> usize {
    let m = params.m();
    let (mut left_a, mut left_b) = (m, m);
    loop {
        if gen.bernoulli(params.p()) {
            left_a -= 1;
            if left_a == 0 {
                return m - left_b;
            }
        } else {
            left_b -= 1;
            if left_b == 0 {
                return m - left_a;
            }
        }
    }
}

/// Runs Bernoulli(`p`) trials until `m` successes or `m` failures and returns
/// the trial count minus `m`.
pub fn sample_trials(params: &Params, gen: &mut GeneratorState) -> usize {
    let m = params.m();
    let (mut successes, mut failures, mut trials) = (0, 0, 0);
    while successes < m && failures < m {
        trials += 1;
        if gen.bernoulli(params.p()) {
            successes += 1;
        } else {
            failures += 1;
        }
    }
    trials - m
}

pub fn sample(params: &Params, gen: &mut GeneratorState, mechanism: Mechanism) -> usize {
    match mechanism {
        Mechanism::Deck => sample_deck(params, gen),
        Mechanism::Trials => sample_trials(params, gen),
    }
}

/// Histogram of `n` draws from a fresh generator seeded with `seed`.
pub fn empirical_pmf(params: &Params, n: u64, seed: u64, mechanism: Mechanism) -> Result<SampleSummary> {
    if n < 1 {
        return Err(Error::Domain("need at least one draw".into()));
    }
    let mut gen = GeneratorState::new(seed);
    let mut counts = vec![0u64; params.m()];
    for _ in 0..n {
        counts[sample(params, &mut gen, mechanism)] += 1;
    }
    Ok(SampleSummary { counts, n, mechanism })
}

/// Total-variation distance and Pearson chi-square of the histogram against `table`.
pub fn gof_statistics(summary: &SampleSummary, table: &PmfTable) -> Result<GofStatistics> {
    if summary.counts.len() != table.mass.len() {
        return Err(Error::DimensionMismatch {
            expected: table.mass.len(),
            actual: summary.counts.len(),
        });
    }
    let n = summary.n as f64;
    let mut tv = 0.0;
    let mut chi = 0.0;
    for (&c, &f) in summary.counts.iter().zip(&table.mass) {
        let c = c as f64;
        tv += (c / n - f).abs();
        let expected = n * f;
        chi += (c - expected).powi(2) / expected;
    }
    Ok(GofStatistics {
        tv_distance: 0.5 * tv,
        chi_square: chi,
    })
}

/// Two-sample chi-square homogeneity statistic for histograms over the same
/// bins. Bins empty in both samples are skipped.
pub fn two_sample_chi_square(a: &SampleSummary, b: &SampleSummary) -> Result<f64> {
    if a.counts.len() != b.counts.len() {
        return Err(Error::DimensionMismatch {
            expected: a.counts.len(),
            actual: b.counts.len(),
        });
    }
    let (na, nb) = (a.n as f64, b.n as f64);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    Ok(a.counts
        .iter()
        .zip(&b.counts)
        .filter(|(&x, &y)| x + y > 0)
        .map(|(&x, &y)| {
            let (x, y) = (x as f64, y as f64);
            (ka * x - kb * y).powi(2) / (x + y)
        })
        .sum())
}

/// Upper `level` quantile of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_critical(df: usize, level: f64) -> Result<f64> {
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(dist.inverse_cdf(level))
}
