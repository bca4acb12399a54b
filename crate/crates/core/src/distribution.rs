//! Floating-point evaluation of the riff-shuffle distribution.
//!
//! For a deck size `m >= 1` and `0 < p < 1` the mass function is
//!
//! ```text
//! f_k = C(m+k-1, k) * (p^m q^k + q^m p^k),   k = 0..m-1,  q = 1 - p.
//! ```
//!
//! Small decks are evaluated by direct products; above
//! [`DIRECT_EVAL_MAX_M`] every mass goes through [`Params::log_pmf`] and is
//! exponentiated, since `(pq)^m` underflows long before the masses do.

use std::cmp::Ordering;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::shape::{self, ShapeReport, ViolationReport};

/// Largest deck size evaluated by direct products.
pub const DIRECT_EVAL_MAX_M: usize = 50;

/// Relative tolerance under which a mass ratio counts as a tie with 1.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Validated distribution parameters. `q` is computed once, at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    p: f64,
    q: f64,
    m: usize,
}

/// Mass sequence `f_0..f_{m-1}` with running sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfTable {
    pub params: Params,
    pub mass: Vec<f64>,
    pub cumulative: Vec<f64>,
}

/// Argmax set of the mass function together with the first descent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeResult {
    /// One index, or two adjacent indices when the peak is a tie.
    pub modes: Vec<usize>,
    /// Smallest `k` with `f_{k+1} <= f_k`; `None` if the masses increase all the way to `m - 1`.
    pub first_descent: Option<usize>,
}

impl ModeResult {
    fn at_descent(k: usize, tie: bool) -> Self {
        ModeResult {
            modes: if tie { vec![k, k + 1] } else { vec![k] },
            first_descent: Some(k),
        }
    }

    fn increasing(m: usize) -> Self {
        ModeResult {
            modes: vec![m - 1],
            first_descent: None,
        }
    }
}

/// Shorthand for [`Params::new`].
pub fn make_params(p: f64, m: usize) -> Result<Params> {
    Params::new(p, m)
}

impl Params {
    pub fn new(p: f64, m: usize) -> Result<Self> {
        if !p.is_finite() || p <= 0.0 || p >= 1.0 {
            return Err(Error::Domain(format!("p must lie strictly between 0 and 1, got {p}")));
        }
        if m < 1 {
            return Err(Error::Domain(format!("m must be at least 1, got {m}")));
        }
        Ok(Params { p, q: 1.0 - p, m })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_support(&self, k: usize) -> Result<()> {
        if k >= self.m {
            return Err(Error::Range {
                index: k,
                lo: 0,
                hi: self.m - 1,
            });
        }
        Ok(())
    }

    fn check_ratio_domain(&self, k: usize) -> Result<()> {
        if self.m < 2 {
            return Err(Error::EmptyRange("ratio domain [0, m-2]", self.m));
        }
        if k > self.m - 2 {
            return Err(Error::Range {
                index: k,
                lo: 0,
                hi: self.m - 2,
            });
        }
        Ok(())
    }

    /// `f_k` for `k` in the support `0..m`.
    pub fn pmf(&self, k: usize) -> Result<f64> {
        self.check_support(k)?;
        Ok(self.extended_pmf(k))
    }

    /// The defining formula at any `k >= 0`.
    ///
    /// Coincides with [`pmf`](Self::pmf) on the support. For `k >= m` the value
    /// is positive but is not a probability; it is what the log-concavity
    /// condition at `k = m - 1` compares against.
    pub fn extended_pmf(&self, k: usize) -> f64 {
        if self.m <= DIRECT_EVAL_MAX_M {
            self.direct_formula(k)
        } else {
            self.log_formula(k).exp()
        }
    }

    /// `ln f_k`, always computed in log space.
    pub fn log_pmf(&self, k: usize) -> Result<f64> {
        self.check_support(k)?;
        Ok(self.log_formula(k))
    }

    fn direct_formula(&self, k: usize) -> f64 {
        let m = self.m as i32;
        let k_i = k as i32;
        let binom = (1..=k).fold(1.0f64, |c, i| c * (self.m - 1 + i) as f64 / i as f64);
        binom * (self.p.powi(m) * self.q.powi(k_i) + self.q.powi(m) * self.p.powi(k_i))
    }

    pub(crate) fn log_formula(&self, k: usize) -> f64 {
        let (m, kf) = (self.m as f64, k as f64);
        let (lp, lq) = (self.p.ln(), self.q.ln());
        ln_binomial(self.m + k - 1, k) + log_add_exp(m * lp + kf * lq, m * lq + kf * lp)
    }

    pub fn pmf_table(&self) -> PmfTable {
        let mass: Vec<f64> = (0..self.m).map(|k| self.extended_pmf(k)).collect();
        let cumulative = mass
            .iter()
            .scan(0.0, |acc, &f| {
                *acc += f;
                Some(*acc)
            })
            .collect();
        PmfTable {
            params: *self,
            mass,
            cumulative,
        }
    }

    pub fn cdf(&self, k: usize) -> Result<f64> {
        self.check_support(k)?;
        Ok((0..=k).map(|i| self.extended_pmf(i)).sum())
    }

    /// Mean and variance of the mass function.
    pub fn moments(&self) -> (f64, f64) {
        let (mut mean, mut second) = (0.0, 0.0);
        for k in 0..self.m {
            let f = self.extended_pmf(k);
            let kf = k as f64;
            mean += kf * f;
            second += kf * kf * f;
        }
        (mean, (second - mean * mean).max(0.0))
    }

    /// `h(x) = p^m q^x + q^m p^x`.
    pub fn h_func(&self, x: f64) -> f64 {
        let m = self.m as f64;
        let (lp, lq) = (self.p.ln(), self.q.ln());
        log_add_exp(m * lp + x * lq, m * lq + x * lp).exp()
    }

    /// `h(x) / h(x+1)`, evaluated without forming either power sum.
    ///
    /// With `s = min(p, q)`, `t = max(p, q)` and `r = (s/t)^(m-x)` the quotient
    /// is `(1 + r) / (s + t r)`; `h` is symmetric in `p` and `q`.
    pub fn h_ratio(&self, x: f64) -> f64 {
        let (s, t) = if self.p <= self.q {
            (self.p, self.q)
        } else {
            (self.q, self.p)
        };
        let r = ((self.m as f64 - x) * (s.ln() - t.ln())).exp();
        (1.0 + r) / (s + t * r)
    }

    /// `g(x) = h(x)/h(x+1) - (x+m)/(x+1)`. For integer `k` in `[0, m-2]`,
    /// `g(k) >= 0` exactly when `f_{k+1} <= f_k`.
    pub fn g_func(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("g is evaluated for finite x >= 0, got {x}")));
        }
        Ok(self.h_ratio(x) - (x + self.m as f64) / (x + 1.0))
    }

    /// `f_{k+1} / f_k` from the factored form `((k+m)/(k+1)) * h(k+1)/h(k)`.
    pub fn ratio(&self, k: usize) -> Result<f64> {
        self.check_ratio_domain(k)?;
        Ok(self.ratio_unchecked(k))
    }

    fn ratio_unchecked(&self, k: usize) -> f64 {
        let kf = k as f64;
        ((kf + self.m as f64) / (kf + 1.0)) / self.h_ratio(kf)
    }

    /// Mode by a linear scan of the mass ratios, stopping at the first descent.
    pub fn mode(&self) -> ModeResult {
        for k in 0..self.m - 1 {
            let r = self.ratio_unchecked(k);
            if r <= 1.0 + TIE_TOLERANCE {
                return ModeResult::at_descent(k, is_tie(r));
            }
        }
        ModeResult::increasing(self.m)
    }

    /// Mode by bisection on the sign of `g`.
    ///
    /// The descent indices `{k : g(k) >= 0}` form a suffix of `[0, m-2]`
    /// because `g` is concave there and `g(m-2) >= 0`, so the first descent
    /// can be found in `O(log m)` evaluations. Must agree with [`mode`](Self::mode).
    pub fn mode_bisect(&self) -> ModeResult {
        if self.m < 2 {
            return ModeResult::increasing(self.m);
        }
        // ratio(k) <= 1 + tol  <=>  g(k) >= -tol * h(k)/h(k+1)
        let is_descent = |k: usize| {
            let x = k as f64;
            let hr = self.h_ratio(x);
            hr - (x + self.m as f64) / (x + 1.0) >= -TIE_TOLERANCE * hr
        };
        let (mut lo, mut hi) = (0usize, self.m - 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if is_descent(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo == self.m - 1 {
            ModeResult::increasing(self.m)
        } else {
            ModeResult::at_descent(lo, is_tie(self.ratio_unchecked(lo)))
        }
    }

    /// Floating-point log-concavity scan, compared in log space.
    ///
    /// Checks `k` in `[1, m-2]`, plus `k = m-1` against the extended formula at
    /// index `m` when `include_extended` is set.
    pub fn log_concavity_scan(&self, include_extended: bool) -> Result<ViolationReport> {
        let hi = log_concavity_upper(self.m, include_extended)?;
        Ok(shape::scan_log_concavity(1..=hi, include_extended, |k| {
            2.0 * self.log_formula(k) >= self.log_formula(k - 1) + self.log_formula(k + 1)
        }))
    }
}

/// Upper end of the log-concavity range, or an error when the range is empty.
pub(crate) fn log_concavity_upper(m: usize, include_extended: bool) -> Result<usize> {
    if include_extended {
        if m < 2 {
            return Err(Error::Domain(format!("the extended log-concavity check needs m >= 2, got {m}")));
        }
        Ok(m - 1)
    } else {
        if m < 3 {
            return Err(Error::Domain(format!("the in-support log-concavity check needs m >= 3, got {m}")));
        }
        Ok(m - 2)
    }
}

fn is_tie(ratio: f64) -> bool {
    (ratio - 1.0).abs() <= TIE_TOLERANCE
}

/// Ordering of two masses with [`TIE_TOLERANCE`] folded in.
pub(crate) fn tolerant_cmp(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()) {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// `ln C(n, k)` via log-gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl PmfTable {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Unimodality classification of the table, ties within [`TIE_TOLERANCE`].
    pub fn shape(&self) -> ShapeReport {
        shape::classify(self.mass.len(), |i, j| tolerant_cmp(self.mass[i], self.mass[j]))
    }

    /// Argmax set of the table, ties within [`TIE_TOLERANCE`].
    pub fn argmax(&self) -> Vec<usize> {
        self.shape().modes
    }
}
