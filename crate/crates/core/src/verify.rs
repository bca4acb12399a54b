//! The verification suite: eleven numbered criteria covering normalization,
//! the shape results, the proof ingredients, the samplers and the
//! floating-point audit.
//!
//! Every criterion is a pure function of a [`VerifyConfig`]; the CLI `verify`
//! command and the `acceptance` test target both run them through
//! [`run_criterion`].

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::analysis;
use crate::distribution::{Params, PmfTable};
use crate::error::Result;
use crate::exact::{self, ExactParams, Rational};
use crate::hp::Hp;
use crate::sampler::{self, Mechanism};

pub const FINITE_DIFFERENCE_STEP: f64 = 1e-4;
pub const FINITE_DIFFERENCE_REL_TOL: f64 = 1e-5;
/// Closed-form second derivatives smaller than this are not compared.
pub const UNDERFLOW_EXCLUSION: f64 = 1e-250;
pub const BOUNDARY_REL_TOL: f64 = 1e-12;
pub const ASYMPTOTIC_REL_TOL: f64 = 0.02;
pub const TV_TOLERANCE: f64 = 0.005;
pub const CHI_SQUARE_LEVEL: f64 = 0.999;
pub const FLOAT_AUDIT_TOL: f64 = 1e-12;

/// Seeds for the sampler criterion: (deck, trials).
pub const SAMPLER_SEEDS: (u64, u64) = (7, 8);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Floating grid is `p = i / 100` for every `i` in `1..100` that is a multiple of this.
    pub float_p_stride: usize,
    /// Largest `m` on the shape, normalization and log-concavity grids.
    pub m_max: usize,
    /// Largest `m` for the two forms of the `k = m - 1` inequality.
    pub prop1_m_max: usize,
    /// Largest `m` for the floating-versus-exact audit.
    pub audit_m_max: usize,
    pub sample_draws: u64,
}

impl VerifyConfig {
    pub fn full() -> Self {
        VerifyConfig {
            float_p_stride: 1,
            m_max: 200,
            prop1_m_max: 100,
            audit_m_max: 100,
            sample_draws: 1_000_000,
        }
    }

    /// Reduced grids for a fast smoke run; tolerances are unchanged.
    pub fn quick() -> Self {
        VerifyConfig {
            float_p_stride: 5,
            m_max: 60,
            prop1_m_max: 40,
            audit_m_max: 40,
            sample_draws: 1_000_000,
        }
    }

    fn float_ps(&self) -> impl Iterator<Item = f64> + '_ {
        (1..100).filter(move |i| i % self.float_p_stride == 0).map(|i| i as f64 / 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

pub const CRITERIA: [(usize, &str); 11] = [
    (1, "exact normalization"),
    (2, "unimodality with at most two adjacent modes"),
    (3, "p = 1/2 strict rise and final tie"),
    (4, "log-concavity at p = 1/2"),
    (5, "log-concavity failure for p != 1/2"),
    (6, "equivalence of the k = m-1 inequality forms"),
    (7, "closed-form second derivative"),
    (8, "concavity of g and its boundary value"),
    (9, "asymptotic scaling of the inequality sides"),
    (10, "samplers against the exact pmf"),
    (11, "floating-point versus exact audit"),
];

type Check = (bool, String);

pub fn run_criterion(id: usize, cfg: &VerifyConfig) -> CriterionOutcome {
    let title = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| *t)
        .unwrap_or("unknown criterion");
    let start = Instant::now();
    let result = match id {
        1 => exact_normalization(cfg),
        2 => unimodality(cfg),
        3 => half_shape(cfg),
        4 => half_log_concavity(cfg),
        5 => log_concavity_failure(cfg),
        6 => inequality_forms(cfg),
        7 => second_derivative(cfg),
        8 => g_concavity_and_boundary(cfg),
        9 => asymptotic_scaling(cfg),
        10 => samplers(cfg),
        11 => float_audit(cfg),
        _ => Ok((false, format!("no criterion numbered {id}"))),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, cfg)).collect()
}

fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

fn tenths() -> impl Iterator<Item = Rational> {
    (1..10).map(|i| rational(i, 10))
}

fn verdict(failures: &[String], checked: usize, what: &str) -> Check {
    if failures.is_empty() {
        (true, format!("{checked} {what} checked, 0 failures"))
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        (
            false,
            format!("{} of {checked} {what} failed: {}", failures.len(), shown.join("; ")),
        )
    }
}

fn exact_normalization(cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in tenths() {
        for m in 1..=cfg.m_max {
            checked += 1;
            if !exact::verify_normalization(&ExactParams::new(p.clone(), m)?) {
                failures.push(format!("p={p} m={m}"));
            }
        }
    }
    Ok(verdict(&failures, checked, "exact tables"))
}

/// Float shape check plus the ratio form of descent persistence.
fn float_shape_ok(params: &Params) -> Result<bool> {
    let s = params.pmf_table().shape();
    if !(s.is_unimodal && s.descent_persistent) {
        return Ok(false);
    }
    if let Some(l) = params.mode().first_descent {
        for k in l + 1..params.m() - 1 {
            if params.ratio(k)? >= 1.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn unimodality(cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in cfg.float_ps() {
        for m in 1..=cfg.m_max {
            checked += 1;
            if !float_shape_ok(&Params::new(p, m)?)? {
                failures.push(format!("float p={p} m={m}"));
            }
        }
    }
    for p in tenths() {
        for m in 1..=cfg.m_max {
            checked += 1;
            let s = exact::exact_unimodality_check(&ExactParams::new(p.clone(), m)?);
            if !(s.is_unimodal && s.descent_persistent && s.modes.len() <= 2) {
                failures.push(format!("exact p={p} m={m}"));
            }
        }
    }
    Ok(verdict(&failures, checked, "(p, m) cells"))
}

fn half_shape(cfg: &VerifyConfig) -> Result<Check> {
    let half = rational(1, 2);
    let mut failures = Vec::new();
    for m in 2..=cfg.m_max {
        if !exact::rises_then_ties(&ExactParams::new(half.clone(), m)?) {
            failures.push(format!("m={m}"));
        }
    }
    Ok(verdict(&failures, cfg.m_max - 1, "exact tables at p = 1/2"))
}

fn half_log_concavity(cfg: &VerifyConfig) -> Result<Check> {
    let half = rational(1, 2);
    let mut failures = Vec::new();
    for m in 2..=cfg.m_max {
        let rep = exact::exact_log_concavity_scan(&ExactParams::new(half.clone(), m)?, true)?;
        if let Some(k) = rep.first_violation {
            failures.push(format!("m={m} k={k}"));
        }
    }
    Ok(verdict(&failures, cfg.m_max - 1, "extended scans at p = 1/2"))
}

/// Search bound for the first failing `m`; independent of the grid size so the
/// quick run still reaches the p = 9/20 threshold.
const VIOLATION_SEARCH_M: usize = 200;

fn log_concavity_failure(_cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut found = Vec::new();
    for (p, expected) in [(rational(1, 10), 2), (rational(3, 10), 4)] {
        let got = analysis::min_m_extended_violation(&p, 50)?;
        if got != Some(expected) {
            failures.push(format!("p={p}: first failing m {got:?}, expected {expected}"));
        }
    }
    for i in 1..10 {
        let p = rational(i, 20);
        match analysis::min_m_extended_violation(&p, VIOLATION_SEARCH_M)? {
            None => failures.push(format!("p={p}: no failure up to m={VIOLATION_SEARCH_M}")),
            Some(m_star) => {
                found.push(format!("{p}:{m_star}"));
                for m in [m_star + 10, m_star + 50] {
                    if exact::extended_condition_holds(&ExactParams::new(p.clone(), m)?)? {
                        failures.push(format!("p={p}: condition holds again at m={m}"));
                    }
                }
            }
        }
    }
    let (ok, mut detail) = verdict(&failures, 11, "thresholds");
    detail.push_str(&format!(" (first failing m: {})", found.join(", ")));
    Ok((ok, detail))
}

fn inequality_forms(cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in tenths() {
        for m in 2..=cfg.prop1_m_max {
            checked += 1;
            let ep = ExactParams::new(p.clone(), m)?;
            let sides = analysis::prop1_sides_exact(&ep)?;
            if sides.sign() != exact::extended_condition_sign(&ep)? {
                failures.push(format!("p={p} m={m}"));
            }
        }
    }
    Ok(verdict(&failures, checked, "(p, m) sign comparisons"))
}

fn second_derivative(_cfg: &VerifyConfig) -> Result<Check> {
    let mut hp = Hp::new();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut excluded = 0;
    let mut worst = 0.0f64;
    for p in [0.1, 0.3, 0.45] {
        for m in [5usize, 20, 50] {
            let params = Params::new(p, m)?;
            let span = (m - 2) as f64;
            for i in 0..20 {
                let x = span * i as f64 / 19.0;
                let closed = analysis::d2_ratio_closed_form(&params, x)?;
                if closed > 0.0 {
                    failures.push(format!("positive at p={p} m={m} x={x}"));
                }
                if closed.abs() < UNDERFLOW_EXCLUSION {
                    excluded += 1;
                    continue;
                }
                checked += 1;
                let reference =
                    hp.ratio_second_difference(params.p(), params.q(), m, x, FINITE_DIFFERENCE_STEP);
                let rel = hp.relative_error(closed, &reference);
                worst = worst.max(rel);
                if !(rel <= FINITE_DIFFERENCE_REL_TOL) {
                    failures.push(format!("p={p} m={m} x={x:.3}: rel err {rel:.2e}"));
                }
            }
        }
    }
    let (ok, mut detail) = verdict(&failures, checked, "grid points");
    detail.push_str(&format!(", {excluded} excluded, worst rel err {worst:.2e}"));
    Ok((ok, detail))
}

pub const CONCAVITY_PS: [f64; 13] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49, 0.5, 0.6, 0.75, 0.9, 0.99];
pub const CONCAVITY_MS: [usize; 8] = [2, 3, 5, 10, 20, 50, 100, 200];

fn g_concavity_and_boundary(_cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in CONCAVITY_PS {
        for m in CONCAVITY_MS {
            let params = Params::new(p, m)?;
            for n_points in [100, 200] {
                checked += 1;
                let rep = analysis::check_g_concavity(&params, n_points)?;
                if !rep.is_concave {
                    failures.push(format!(
                        "p={p} m={m} n={n_points}: second difference {:.2e}",
                        rep.max_second_difference
                    ));
                }
            }
            checked += 1;
            let b = analysis::g_boundary(&params)?;
            let g = params.g_func((m - 2) as f64)?;
            if (b - g).abs() > BOUNDARY_REL_TOL * b.abs().max(g.abs()) {
                failures.push(format!("p={p} m={m}: g_boundary {b:e} vs g {g:e}"));
            }
            let sign_ok = if p == 0.5 { b == 0.0 } else { b > 0.0 };
            if !sign_ok {
                failures.push(format!("p={p} m={m}: boundary value {b:e} has the wrong sign"));
            }
        }
    }
    Ok(verdict(&failures, checked, "concavity and boundary checks"))
}

fn asymptotic_scaling(_cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for p in [0.1, 0.3, 0.5] {
        let params = Params::new(p, 400)?;
        let (lhs, rhs) = analysis::asymptotic_scaled_sides(&params)?;
        let rhs_limit = 2.0 * analysis::odds_sum(p);
        values.push(format!("p={p}: {lhs:.4}/{rhs:.4}"));
        if (lhs / 4.0 - 1.0).abs() > ASYMPTOTIC_REL_TOL {
            failures.push(format!("p={p}: lhs_scaled {lhs} not within 2% of 4"));
        }
        if (rhs / rhs_limit - 1.0).abs() > ASYMPTOTIC_REL_TOL {
            failures.push(format!("p={p}: rhs_scaled {rhs} not within 2% of {rhs_limit}"));
        }
    }
    let (ok, mut detail) = verdict(&failures, 3, "values of p at m = 400");
    detail.push_str(&format!(" ({})", values.join(", ")));
    Ok((ok, detail))
}

/// Floating table holding the exact masses rounded to double.
fn exact_reference(ep: &ExactParams) -> Result<PmfTable> {
    let mass: Vec<f64> = exact::exact_pmf_table(ep).mass.iter().map(exact::to_f64).collect();
    let cumulative = mass
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f;
            Some(*acc)
        })
        .collect();
    Ok(PmfTable {
        params: ep.to_float()?,
        mass,
        cumulative,
    })
}

fn samplers(cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for (m, p) in [(5usize, rational(3, 10)), (10, rational(1, 2))] {
        let ep = ExactParams::new(p.clone(), m)?;
        let params = ep.to_float()?;
        let reference = exact_reference(&ep)?;
        let deck = sampler::empirical_pmf(&params, cfg.sample_draws, SAMPLER_SEEDS.0, Mechanism::Deck)?;
        let trials = sampler::empirical_pmf(&params, cfg.sample_draws, SAMPLER_SEEDS.1, Mechanism::Trials)?;
        for summary in [&deck, &trials] {
            let gof = sampler::gof_statistics(summary, &reference)?;
            values.push(format!("m={m} p={p} {}: tv {:.5}", summary.mechanism, gof.tv_distance));
            if gof.tv_distance > TV_TOLERANCE {
                failures.push(format!("m={m} p={p} {}: tv {}", summary.mechanism, gof.tv_distance));
            }
        }
        let chi = sampler::two_sample_chi_square(&deck, &trials)?;
        let critical = sampler::chi_square_critical(m - 1, CHI_SQUARE_LEVEL)?;
        values.push(format!("m={m} two-sample chi2 {chi:.2} < {critical:.2}"));
        if chi >= critical {
            failures.push(format!("m={m} p={p}: two-sample chi2 {chi} >= {critical}"));
        }
    }
    let (ok, mut detail) = verdict(&failures, 6, "sampler statistics");
    detail.push_str(&format!(" ({})", values.join(", ")));
    Ok((ok, detail))
}

/// Exact argmax of the mass formula evaluated at the binary values of the
/// stored `p` and `q`, that is, the best answer any double-precision
/// evaluation of `params` could give.
fn modes_at_binary_parameters(params: &Params) -> Vec<usize> {
    let to_rational = |x: f64| Rational::from_float(x).expect("finite parameter");
    let (p, q, m) = (to_rational(params.p()), to_rational(params.q()), params.m());
    let pm = num_traits::pow(p.clone(), m);
    let qm = num_traits::pow(q.clone(), m);
    let mass: Vec<Rational> = (0..m)
        .map(|k| {
            let c = Rational::from_integer(exact::binomial(m + k - 1, k));
            c * (&pm * num_traits::pow(q.clone(), k) + &qm * num_traits::pow(p.clone(), k))
        })
        .collect();
    let best = mass.iter().max().expect("non-empty support");
    (0..m).filter(|&k| &mass[k] == best).collect()
}

fn float_audit(cfg: &VerifyConfig) -> Result<Check> {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut worst = 0.0f64;
    let (mut tolerance_ties, mut representation, mut other) = (0, 0, 0);
    for p in tenths() {
        for m in 1..=cfg.audit_m_max {
            checked += 1;
            let ep = ExactParams::new(p.clone(), m)?;
            let err = exact::float_error(&ep)?;
            worst = worst.max(err);
            if err > FLOAT_AUDIT_TOL {
                failures.push(format!("p={p} m={m}: pmf error {err:e}"));
                other += 1;
            }
            let params = ep.to_float()?;
            let float_mode = params.mode();
            let exact_modes = exact::exact_mode(&ep).modes;
            if float_mode.modes != exact_modes {
                if modes_at_binary_parameters(&params) != exact_modes {
                    representation += 1;
                } else if float_mode.modes.len() == 2 && exact_modes.iter().all(|k| float_mode.modes.contains(k)) {
                    tolerance_ties += 1;
                } else {
                    other += 1;
                }
                failures.push(format!("p={p} m={m}: float modes {:?}, exact {:?}", float_mode.modes, exact_modes));
            }
            if params.mode_bisect() != float_mode {
                failures.push(format!("p={p} m={m}: bisection disagrees"));
                other += 1;
            }
        }
    }
    for p in cfg.float_ps() {
        for m in 1..=cfg.m_max {
            checked += 1;
            let params = Params::new(p, m)?;
            if params.mode_bisect() != params.mode() {
                failures.push(format!("p={p} m={m}: bisection disagrees"));
                other += 1;
            }
        }
    }
    let (ok, mut detail) = verdict(&failures, checked, "cells");
    detail.push_str(&format!(", worst pmf error {worst:.2e}"));
    if !ok {
        detail.push_str(&format!(
            "; {tolerance_ties} mode near-ties inside the tie tolerance, \
             {representation} where the binary value of p has a different exact mode, {other} other"
        ));
    }
    Ok((ok, detail))
}
