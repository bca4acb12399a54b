//! Numerical checks of the two shape results.
//!
//! * Log-concavity holds at `p = 1/2` and fails at `k = m - 1` once `m` is
//!   large enough for any other `p`. The failing comparison reduces to the
//!   inequality evaluated by [`prop1_sides`].
//! * Unimodality follows from `g(x) = h(x)/h(x+1) - (x+m)/(x+1)` being
//!   concave on `[0, m-2]` with `g(m-2) >= 0`: once a descent occurs it
//!   persists.

use std::cmp::Ordering;

use num_traits::{One, Pow};
use serde::Serialize;

use crate::distribution::{log_add_exp, Params};
use crate::error::{Error, Result};
use crate::exact::{self, ExactParams, Rational};

/// Largest second difference of `g` still accepted as concave.
pub const CONCAVITY_TOLERANCE: f64 = 1e-12;

/// The two sides of the `k = m - 1` log-concavity inequality,
///
/// ```text
/// lhs = 2(2m-1)(m-1)(pq)^(2m-1) + (m-1)(p^(2m) q^(2m-2) + 2(pq)^(2m-1) + p^(2m-2) q^(2m))
/// rhs = (2m-1)(m-1)(p/q + q/p)(pq)^(2m-1)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// [`Prop1Sides`] in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProp1Sides {
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

impl ExactProp1Sides {
    pub fn sign(&self) -> Ordering {
        self.lhs.cmp(&self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub grid: Vec<f64>,
    pub max_second_difference: f64,
    pub is_concave: bool,
}

fn need_two(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("needs m >= 2, got {m}")));
    }
    Ok(())
}

/// Second derivative of `h(x)/h(x+1)`:
///
/// ```text
/// (q-p)(ln p - ln q)^2 p^(m+x) q^(m+x) (p^m q^(x+1) - p^(x+1) q^m) / (p^m q^(x+1) + p^(x+1) q^m)^3
/// ```
///
/// With `A = p^m q^(x+1)`, `B = p^(x+1) q^m` and `u = A/B = (p/q)^(m-x-1)`, the
/// power factors collapse to `u(u-1) / (pq (1+u)^3)`, which is what gets
/// evaluated; the literal form underflows for moderate `m`.
pub fn d2_ratio_closed_form(params: &Params, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite and >= 0, got {x}")));
    }
    let (p, q) = (params.p(), params.q());
    let (lp, lq) = (p.ln(), q.ln());
    let ln_u = (params.m() as f64 - x - 1.0) * (lp - lq);
    let shape = if ln_u <= 0.0 {
        let u = ln_u.exp();
        u * (u - 1.0) / (1.0 + u).powi(3)
    } else {
        let w = (-ln_u).exp();
        w * (1.0 - w) / (1.0 + w).powi(3)
    };
    Ok((q - p) * (lp - lq).powi(2) / (p * q) * shape)
}

/// Second differences of `g` on `n_points` equispaced points of `[0, m-2]`.
pub fn check_g_concavity(params: &Params, n_points: usize) -> Result<ConcavityReport> {
    need_two(params.m())?;
    if n_points < 3 {
        return Err(Error::Domain(format!("needs at least 3 grid points, got {n_points}")));
    }
    let span = (params.m() - 2) as f64;
    let grid: Vec<f64> = (0..n_points)
        .map(|i| span * i as f64 / (n_points - 1) as f64)
        .collect();
    let values = grid
        .iter()
        .map(|&x| params.g_func(x))
        .collect::<Result<Vec<_>>>()?;
    let max_second_difference = values
        .windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ConcavityReport {
        grid,
        max_second_difference,
        is_concave: max_second_difference <= CONCAVITY_TOLERANCE,
    })
}

/// `g(m-2) = (1/p^2 + 1/q^2) / (1/p + 1/q) - 2`.
pub fn g_boundary(params: &Params) -> Result<f64> {
    need_two(params.m())?;
    let (ip, iq) = (1.0 / params.p(), 1.0 / params.q());
    Ok((ip * ip + iq * iq) / (ip + iq) - 2.0)
}

/// Both sides of the `k = m - 1` inequality in double precision.
///
/// Underflows to zero once `(pq)^(2m-1)` leaves the double range; use
/// [`asymptotic_scaled_sides`] or [`prop1_sides_exact`] there.
pub fn prop1_sides(params: &Params) -> Result<Prop1Sides> {
    need_two(params.m())?;
    let (p, q) = (params.p(), params.q());
    let m = params.m() as i32;
    let mf = m as f64;
    let x = (p * q).powi(2 * m - 1);
    let lhs = 2.0 * (2.0 * mf - 1.0) * (mf - 1.0) * x
        + (mf - 1.0) * (p.powi(2 * m) * q.powi(2 * m - 2) + 2.0 * x + p.powi(2 * m - 2) * q.powi(2 * m));
    let rhs = (2.0 * mf - 1.0) * (mf - 1.0) * (p / q + q / p) * x;
    Ok(Prop1Sides { lhs, rhs, holds: lhs >= rhs })
}

pub fn prop1_sides_exact(ep: &ExactParams) -> Result<ExactProp1Sides> {
    need_two(ep.m())?;
    let (p, q) = (ep.p(), ep.q());
    let m = ep.m() as i32;
    let int = |v: i64| Rational::from_integer(v.into());
    let mi = m as i64;
    let pq = p * q;
    let x: Rational = Pow::pow(&pq, 2 * m - 1);
    let inner = Pow::pow(p, 2 * m) * Pow::pow(q, 2 * m - 2)
        + int(2) * &x
        + Pow::pow(p, 2 * m - 2) * Pow::pow(q, 2 * m);
    let lhs = int(2 * (2 * mi - 1) * (mi - 1)) * &x + int(mi - 1) * inner;
    let rhs = int((2 * mi - 1) * (mi - 1)) * (p / q + q / p) * &x;
    let holds = lhs >= rhs;
    Ok(ExactProp1Sides { lhs, rhs, holds })
}

/// `lhs / (m^2 (pq)^(2m-1))` and `rhs / (m^2 (pq)^(2m-1))`, evaluated in log space.
///
/// As `m` grows these tend to `4` and `2(p/q + q/p)`.
pub fn asymptotic_scaled_sides(params: &Params) -> Result<(f64, f64)> {
    need_two(params.m())?;
    let (lp, lq) = (params.p().ln(), params.q().ln());
    let m = params.m() as f64;
    let l = lp + lq;
    let terms = [
        (2.0 * (2.0 * m - 1.0) * (m - 1.0)).ln() + (2.0 * m - 1.0) * l,
        (m - 1.0).ln() + 2.0 * m * lp + (2.0 * m - 2.0) * lq,
        (2.0 * (m - 1.0)).ln() + (2.0 * m - 1.0) * l,
        (m - 1.0).ln() + (2.0 * m - 2.0) * lp + 2.0 * m * lq,
    ];
    let ln_lhs = terms.iter().copied().reduce(log_add_exp).unwrap();
    let s = params.p() / params.q() + params.q() / params.p();
    let ln_rhs = ((2.0 * m - 1.0) * (m - 1.0)).ln() + s.ln() + (2.0 * m - 1.0) * l;
    let ln_scale = 2.0 * m.ln() + (2.0 * m - 1.0) * l;
    Ok(((ln_lhs - ln_scale).exp(), (ln_rhs - ln_scale).exp()))
}

fn check_half_range(m: usize, k: usize) -> Result<()> {
    need_two(m)?;
    if k < 1 || k > m - 1 {
        return Err(Error::Range { index: k, lo: 1, hi: m - 1 });
    }
    Ok(())
}

/// `k(m+k) / ((k+1)(m+k-1))`, the log-concavity condition at `p = 1/2` after the
/// power factors cancel. Never exceeds 1 on its range.
pub fn p_half_ratio_bound(m: usize, k: usize) -> Result<f64> {
    check_half_range(m, k)?;
    let (m, k) = (m as f64, k as f64);
    Ok(k * (m + k) / ((k + 1.0) * (m + k - 1.0)))
}

/// Integer cross-multiplied form of `p_half_ratio_bound(m, k) <= 1`.
pub fn p_half_bound_holds(m: usize, k: usize) -> Result<bool> {
    check_half_range(m, k)?;
    let (m, k) = (m as u128, k as u128);
    Ok(k * (m + k) <= (k + 1) * (m + k - 1))
}

fn validate_rational_p(p: &Rational, m_max: usize) -> Result<()> {
    ExactParams::new(p.clone(), 1)?;
    if m_max < 2 {
        return Err(Error::Domain(format!("m_max must be at least 2, got {m_max}")));
    }
    Ok(())
}

/// Smallest `m` in `[2, m_max]` where `f_{m-1}^2 >= f_{m-2} f_m` fails, exactly.
pub fn min_m_extended_violation(p: &Rational, m_max: usize) -> Result<Option<usize>> {
    validate_rational_p(p, m_max)?;
    for m in 2..=m_max {
        let ep = ExactParams::new(p.clone(), m)?;
        if !exact::extended_condition_holds(&ep)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Smallest `m` in `[3, m_max]` whose in-support masses (indices `1..=m-2`) are
/// not log-concave, exactly.
pub fn min_m_in_support_violation(p: &Rational, m_max: usize) -> Result<Option<usize>> {
    validate_rational_p(p, m_max)?;
    for m in 3..=m_max {
        let ep = ExactParams::new(p.clone(), m)?;
        if !exact::exact_log_concavity_scan(&ep, false)?.is_log_concave() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Floating-point counterpart of the two scans above, for decimal `p`.
pub fn min_m_violation_float(p: f64, m_max: usize, include_extended: bool) -> Result<Option<usize>> {
    Params::new(p, 1)?;
    if m_max < 2 {
        return Err(Error::Domain(format!("m_max must be at least 2, got {m_max}")));
    }
    let start = if include_extended { 2 } else { 3 };
    for m in start..=m_max {
        let params = Params::new(p, m)?;
        let violated = if include_extended {
            let f = |k| params.log_formula(k);
            2.0 * f(m - 1) < f(m - 2) + f(m)
        } else {
            !params.log_concavity_scan(false)?.is_log_concave()
        };
        if violated {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `p/q + q/p`; convex on `(0, 1)` with minimum 2 at `p = 1/2`.
pub fn odds_sum(p: f64) -> f64 {
    let q = 1.0 - p;
    p / q + q / p
}

/// `true` when `p` is exactly one half.
pub fn is_half(p: &Rational) -> bool {
    p * Rational::from_integer(2.into()) == Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn params(p: f64, m: usize) -> Params {
        Params::new(p, m).unwrap()
    }

    fn ep(p: &str, m: usize) -> ExactParams {
        ExactParams::parse(p, m).unwrap()
    }

    /// Relative error of the closed form against a 512-bit central second difference.
    fn fd_rel_err(pr: &Params, x: f64) -> f64 {
        let mut hp = crate::hp::Hp::new();
        let reference = hp.ratio_second_difference(pr.p(), pr.q(), pr.m(), x, 1e-4);
        hp.relative_error(d2_ratio_closed_form(pr, x).unwrap(), &reference)
    }

    #[test]
    fn second_derivative_values() {
        assert_eq!(d2_ratio_closed_form(&params(0.5, 7), 2.0).unwrap(), 0.0);
        let pr = params(1.0 / 3.0, 3);
        assert!(d2_ratio_closed_form(&pr, 0.0).unwrap() < 0.0);
        assert!(fd_rel_err(&pr, 0.0) <= 1e-6);
        assert!(fd_rel_err(&params(0.3, 10), 4.0) <= 1e-6);
        assert!(fd_rel_err(&params(0.7, 10), 4.0) <= 1e-6);
        assert!(d2_ratio_closed_form(&params(0.3, 10), -0.5).is_err());
    }

    #[test]
    fn second_derivative_literal_form() {
        // the literal formula, fine while nothing underflows
        for &(p, m, x) in &[(0.3f64, 10i32, 4.0f64), (0.7, 6, 1.5), (0.2, 4, 0.0)] {
            let q = 1.0 - p;
            let a = p.powi(m) * q.powf(x + 1.0);
            let b = p.powf(x + 1.0) * q.powi(m);
            let lit = (q - p) * (p.ln() - q.ln()).powi(2) * p.powf(m as f64 + x) * q.powf(m as f64 + x) * (a - b)
                / (a + b).powi(3);
            let v = d2_ratio_closed_form(&params(p, m as usize), x).unwrap();
            assert!((v - lit).abs() <= 1e-12 * lit.abs(), "{p} {m} {x}");
        }
    }

    #[test]
    fn concavity() {
        assert!(check_g_concavity(&params(0.3, 10), 100).unwrap().is_concave);
        assert!(check_g_concavity(&params(0.5, 10), 100).unwrap().is_concave);
        let rep = check_g_concavity(&params(0.05, 50), 200).unwrap();
        assert!(rep.is_concave);
        assert_eq!(rep.grid.len(), 200);
        assert_eq!(*rep.grid.last().unwrap(), 48.0);
        assert!(check_g_concavity(&params(0.3, 1), 10).is_err());
        assert!(check_g_concavity(&params(0.3, 5), 2).is_err());
    }

    #[test]
    fn boundary_values() {
        assert!((g_boundary(&params(1.0 / 3.0, 9)).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(g_boundary(&params(0.5, 9)).unwrap(), 0.0);
        assert!((g_boundary(&params(0.25, 2)).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!(g_boundary(&params(0.25, 1)).is_err());
        for &(p, m) in &[(0.1, 5), (0.37, 40), (0.8, 12)] {
            let pr = params(p, m);
            let b = g_boundary(&pr).unwrap();
            assert!(b > 0.0);
            let g = pr.g_func((m - 2) as f64).unwrap();
            assert!((b - g).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn prop1_values() {
        let s = prop1_sides(&params(0.1, 2)).unwrap();
        assert!((s.lhs - 0.012474).abs() < 5e-7 && (s.rhs - 0.019926).abs() < 5e-7);
        assert!(!s.holds);

        let s = prop1_sides(&params(0.5, 3)).unwrap();
        let x = 0.25f64.powi(5);
        assert!(s.holds);
        assert!(((s.lhs - s.rhs) - 4.0 * 2.0 * x).abs() < 1e-15);

        assert!(prop1_sides(&params(0.3, 3)).unwrap().holds);
        assert!(prop1_sides(&params(0.3, 1)).is_err());
    }

    #[test]
    fn prop1_exact_values() {
        let s = prop1_sides_exact(&ep("1/10", 2)).unwrap();
        // (m-1)(pq)^(2m-1)(4m-2+1/(pq)) and (2m-1)(m-1)(p/q+q/p)(pq)^(2m-1)
        assert_eq!(s.lhs, parse_rational("0.012474").unwrap());
        assert_eq!(s.rhs, parse_rational("0.019926").unwrap());
        assert!(!s.holds);
        let s = prop1_sides_exact(&ep("1/2", 3)).unwrap();
        let x: Rational = Pow::pow(parse_rational("1/4").unwrap(), 5i32);
        assert_eq!(&s.lhs - &s.rhs, Rational::from_integer(8.into()) * x);
        assert!(prop1_sides_exact(&ep("3/10", 3)).unwrap().holds);
    }

    #[test]
    fn asymptotics() {
        let (l, r) = asymptotic_scaled_sides(&params(0.3, 200)).unwrap();
        assert!((l / 4.0 - 1.0).abs() < 0.02);
        assert!((r / 5.52381 - 1.0).abs() < 0.02);
        let (_, r) = asymptotic_scaled_sides(&params(0.5, 200)).unwrap();
        assert!((r / 4.0 - 1.0).abs() < 0.02);
        let (l, r) = asymptotic_scaled_sides(&params(0.1, 400)).unwrap();
        assert!(l < r);
    }

    #[test]
    fn scaled_sides_match_direct_sides() {
        for &(p, m) in &[(0.1, 2), (0.3, 7), (0.5, 12), (0.8, 20)] {
            let pr = params(p, m);
            let s = prop1_sides(&pr).unwrap();
            let scale = (m * m) as f64 * (p * (1.0 - p)).powi(2 * m as i32 - 1);
            let (l, r) = asymptotic_scaled_sides(&pr).unwrap();
            assert!((l - s.lhs / scale).abs() <= 1e-12 * l);
            assert!((r - s.rhs / scale).abs() <= 1e-12 * r);
        }
    }

    #[test]
    fn half_bound() {
        assert!((p_half_ratio_bound(5, 1).unwrap() - 0.6).abs() < 1e-15);
        assert!((p_half_ratio_bound(5, 4).unwrap() - 0.9).abs() < 1e-15);
        assert!((p_half_ratio_bound(2, 1).unwrap() - 0.75).abs() < 1e-15);
        assert!(p_half_ratio_bound(5, 0).is_err());
        assert!(p_half_ratio_bound(5, 5).is_err());
        assert!(p_half_ratio_bound(1, 1).is_err());
        for m in 2..=2000 {
            for k in 1..m {
                assert!(p_half_bound_holds(m, k).unwrap());
            }
        }
    }

    #[test]
    fn extended_violation_threshold() {
        let r = |s| parse_rational(s).unwrap();
        assert_eq!(min_m_extended_violation(&r("1/10"), 50).unwrap(), Some(2));
        assert_eq!(min_m_extended_violation(&r("3/10"), 50).unwrap(), Some(4));
        assert_eq!(min_m_extended_violation(&r("1/2"), 200).unwrap(), None);
        assert!(min_m_extended_violation(&r("3/2"), 50).is_err());
        assert!(min_m_extended_violation(&r("1/3"), 1).is_err());
        assert_eq!(min_m_violation_float(0.1, 50, true).unwrap(), Some(2));
        assert_eq!(min_m_violation_float(0.3, 50, true).unwrap(), Some(4));
        assert_eq!(min_m_violation_float(0.5, 200, true).unwrap(), None);
    }

    #[test]
    fn odds_sum_minimum() {
        assert_eq!(odds_sum(0.5), 2.0);
        for i in 1..100 {
            assert!(odds_sum(i as f64 / 100.0) >= 2.0);
        }
        assert!(is_half(&parse_rational("2/4").unwrap()));
    }
}
