//! Exact rational evaluation of the distribution for rational `p = a/b`.
//!
//! Writing `c = b - a`, every mass is an integer over a power of `b`:
//!
//! ```text
//! f_k = N_k / b^(m+k),   N_k = C(m+k-1, k) * (a^m c^k + c^m a^k).
//! ```
//!
//! Comparisons and sums are carried out on these integer numerators, which
//! keeps the large scans cheap; [`Rational`] values in lowest terms are only
//! materialized for [`ExactPmfTable`].

use std::cmp::Ordering;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::distribution::{self, ModeResult, Params};
use crate::error::{Error, Result};
use crate::shape::{self, ShapeReport, ViolationReport};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Exact parameters with `p + q = 1` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactParams {
    p: Rational,
    q: Rational,
    m: usize,
}

/// Exact mass sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPmfTable {
    pub mass: Vec<Rational>,
}

/// Parses `"a/b"`, an integer, or a plain decimal literal such as `"0.3"` into
/// an exact rational. Decimal literals are read digit by digit, never through `f64`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| err())?;
        return Ok(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| err())?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Rounds an exact rational to the nearest `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl ExactParams {
    pub fn new(p: Rational, m: usize) -> Result<Self> {
        if !p.is_positive() || p >= Rational::one() {
            return Err(Error::Domain(format!("p must lie strictly between 0 and 1, got {p}")));
        }
        if m < 1 {
            return Err(Error::Domain(format!("m must be at least 1, got {m}")));
        }
        let q = Rational::one() - &p;
        Ok(ExactParams { p, q, m })
    }

    /// Builds parameters from a textual `p` (see [`parse_rational`]).
    pub fn parse(p: &str, m: usize) -> Result<Self> {
        Self::new(parse_rational(p)?, m)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Same deck size with `p` and `q` exchanged.
    pub fn swapped(&self) -> Self {
        ExactParams {
            p: self.q.clone(),
            q: self.p.clone(),
            m: self.m,
        }
    }

    /// Floating-point parameters with `p` rounded to the nearest double.
    pub fn to_float(&self) -> Result<Params> {
        Params::new(to_f64(&self.p), self.m)
    }

    pub(crate) fn numerators(&self) -> Numerators {
        Numerators::new(self)
    }
}

/// Integer numerators `N_k` of the masses, with `f_k = N_k / b^(m+k)`.
pub(crate) struct Numerators {
    a: BigInt,
    c: BigInt,
    b: BigInt,
    m: usize,
}

impl Numerators {
    fn new(ep: &ExactParams) -> Self {
        let a = ep.p.numer().clone();
        let b = ep.p.denom().clone();
        let c = &b - &a;
        Numerators { a, c, b, m: ep.m }
    }

    pub(crate) fn base(&self) -> &BigInt {
        &self.b
    }

    /// `N_0..N_{len-1}`; `len` may exceed `m` to reach the extended indices.
    pub(crate) fn sequence(&self, len: usize) -> Vec<BigInt> {
        let m = self.m as u32;
        let am = Pow::pow(&self.a, m);
        let cm = Pow::pow(&self.c, m);
        let mut binom = BigInt::one();
        let mut ak = BigInt::one();
        let mut ck = BigInt::one();
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            if k > 0 {
                // C(m+k-1, k) = C(m+k-2, k-1) * (m+k-1) / k, always exact
                binom = binom * BigInt::from(self.m + k - 1) / BigInt::from(k);
                ak *= &self.a;
                ck *= &self.c;
            }
            out.push(&binom * (&am * &ck + &cm * &ak));
        }
        out
    }

    /// `N_k` alone.
    pub(crate) fn at(&self, k: usize) -> BigInt {
        let m = self.m as u32;
        let binom = binomial(self.m + k - 1, k);
        let k = k as u32;
        binom * (Pow::pow(&self.a, m) * Pow::pow(&self.c, k) + Pow::pow(&self.c, m) * Pow::pow(&self.a, k))
    }

    /// Masses rescaled to the common denominator `b^(2m-1)`: `M_k = N_k * b^(m-1-k)`.
    pub(crate) fn common(&self) -> Vec<BigInt> {
        let n = self.sequence(self.m);
        let mut scale = BigInt::one();
        let mut out = vec![BigInt::zero(); self.m];
        for k in (0..self.m).rev() {
            out[k] = &n[k] * &scale;
            scale *= &self.b;
        }
        out
    }

    pub(crate) fn common_denominator(&self) -> BigInt {
        Pow::pow(&self.b, (2 * self.m - 1) as u32)
    }
}

/// `C(n, k)` by the multiplicative recurrence.
pub fn binomial(n: usize, k: usize) -> BigInt {
    assert!(k <= n, "C({n}, {k}) is undefined");
    let k = k.min(n - k);
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - k + i) / BigInt::from(i))
}

pub fn exact_pmf_table(ep: &ExactParams) -> ExactPmfTable {
    let num = ep.numerators();
    let mut denom = Pow::pow(num.base(), ep.m as u32);
    let mass = num
        .sequence(ep.m)
        .into_iter()
        .map(|n| {
            let r = Rational::new(n, denom.clone());
            denom *= num.base();
            r
        })
        .collect();
    ExactPmfTable { mass }
}

/// `true` iff the masses sum to exactly 1.
pub fn verify_normalization(ep: &ExactParams) -> bool {
    let num = ep.numerators();
    let total: BigInt = num.common().iter().sum();
    total == num.common_denominator()
}

/// Exact log-concavity scan over `[1, m-2]`, extended to `k = m-1` on request.
pub fn exact_log_concavity_scan(ep: &ExactParams, include_extended: bool) -> Result<ViolationReport> {
    let hi = distribution::log_concavity_upper(ep.m, include_extended)?;
    // f_k^2 and f_{k-1} f_{k+1} share the denominator b^(2m+2k)
    let n = ep.numerators().sequence(hi + 2);
    Ok(shape::scan_log_concavity(1..=hi, include_extended, |k| {
        &n[k] * &n[k] >= &n[k - 1] * &n[k + 1]
    }))
}

/// Whether `f_{m-1}^2 >= f_{m-2} * f_m`, with `f_m` from the defining formula.
pub fn extended_condition_holds(ep: &ExactParams) -> Result<bool> {
    if ep.m < 2 {
        return Err(Error::Domain(format!("the extended check needs m >= 2, got {}", ep.m)));
    }
    let num = ep.numerators();
    let (lo, mid, hi) = (num.at(ep.m - 2), num.at(ep.m - 1), num.at(ep.m));
    Ok(&mid * &mid >= lo * hi)
}

/// Sign of `f_{m-1}^2 - f_{m-2} * f_m`.
pub fn extended_condition_sign(ep: &ExactParams) -> Result<Ordering> {
    if ep.m < 2 {
        return Err(Error::Domain(format!("the extended check needs m >= 2, got {}", ep.m)));
    }
    let num = ep.numerators();
    let (lo, mid, hi) = (num.at(ep.m - 2), num.at(ep.m - 1), num.at(ep.m));
    Ok((&mid * &mid).cmp(&(lo * hi)))
}

/// Exact unimodality classification of the mass sequence.
pub fn exact_unimodality_check(ep: &ExactParams) -> ShapeReport {
    let common = ep.numerators().common();
    shape::classify(common.len(), |i, j| common[i].cmp(&common[j]))
}

/// Exact argmax set and first descent.
pub fn exact_mode(ep: &ExactParams) -> ModeResult {
    let common = ep.numerators().common();
    let first_descent = (0..ep.m.saturating_sub(1)).find(|&k| common[k + 1] <= common[k]);
    let max = common.iter().max().unwrap();
    let modes = (0..ep.m).filter(|&k| &common[k] == max).collect();
    ModeResult { modes, first_descent }
}

/// Largest absolute difference between the floating and the exact masses.
pub fn float_error(ep: &ExactParams) -> Result<f64> {
    let table = ep.to_float()?.pmf_table();
    let exact = exact_pmf_table(ep);
    Ok(table
        .mass
        .iter()
        .zip(&exact.mass)
        .map(|(f, e)| (f - to_f64(e)).abs())
        .fold(0.0, f64::max))
}

/// Strict increase on `0..=m-2` followed by an exact tie `f_{m-2} = f_{m-1}`.
pub fn rises_then_ties(ep: &ExactParams) -> bool {
    if ep.m < 2 {
        return false;
    }
    let c = ep.numerators().common();
    let m = ep.m;
    c[..m - 1].windows(2).all(|w| w[1] > w[0]) && c[m - 2] == c[m - 1]
}

/// Formats a rational as `num/den`, keeping a denominator of 1.
pub fn format_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Serialize for ExactPmfTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.mass.iter().map(format_fraction))
    }
}
