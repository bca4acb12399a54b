//! Shape classification shared by the floating-point and exact evaluators.
//!
//! Both flavors reduce to a sequence of masses and a three-way comparison
//! between two indices; the floating flavor folds its tie tolerance into the
//! comparison, the exact flavor compares integers.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use serde::Serialize;

/// Outcome of a unimodality check on a mass sequence.
///
/// A sequence counts as unimodal when it is non-decreasing up to its argmax
/// set, non-increasing after it, and the argmax set consists of at most two
/// adjacent indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    /// First index of the argmax set (the increase stops here).
    pub ascent_end: usize,
    pub modes: Vec<usize>,
    /// Last index of the argmax set (the decrease begins here).
    pub descent_start: usize,
    pub is_unimodal: bool,
    /// Once some `f[l+1] <= f[l]` occurs, every later step is a strict decrease.
    pub descent_persistent: bool,
}

/// Outcome of a log-concavity scan `f[k]^2 >= f[k-1] * f[k+1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub checked_range: RangeInclusive<usize>,
    pub first_violation: Option<usize>,
    /// Whether `k = m - 1` was checked using the defining formula at index `m`.
    pub used_extended: bool,
}

impl ViolationReport {
    pub fn is_log_concave(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Classifies a sequence of length `len` given `cmp(i, j)` ordering `f[i]` against `f[j]`.
pub fn classify<F>(len: usize, cmp: F) -> ShapeReport
where
    F: Fn(usize, usize) -> Ordering,
{
    assert!(len > 0, "cannot classify an empty sequence");

    let mut modes = vec![0];
    for i in 1..len {
        match cmp(i, modes[0]) {
            Ordering::Greater => {
                modes.clear();
                modes.push(i);
            }
            Ordering::Equal => modes.push(i),
            Ordering::Less => {}
        }
    }
    let first = modes[0];
    let last = *modes.last().unwrap();

    let adjacent = modes.len() <= 2 && last - first + 1 == modes.len();
    let rises = (0..first).all(|i| cmp(i + 1, i) != Ordering::Less);
    let falls = (last..len - 1).all(|i| cmp(i + 1, i) != Ordering::Greater);

    let descent_persistent = match (0..len - 1).find(|&i| cmp(i + 1, i) != Ordering::Greater) {
        Some(l) => (l + 1..len - 1).all(|k| cmp(k + 1, k) == Ordering::Less),
        None => true,
    };

    ShapeReport {
        ascent_end: first,
        descent_start: last,
        is_unimodal: adjacent && rises && falls,
        modes,
        descent_persistent,
    }
}

/// Scans `f[k]^2 >= f[k-1] * f[k+1]` over `range`, reporting the first `k` where
/// `holds(k)` is false.
pub(crate) fn scan_log_concavity<F>(
    range: RangeInclusive<usize>,
    used_extended: bool,
    holds: F,
) -> ViolationReport
where
    F: Fn(usize) -> bool,
{
    let first_violation = range.clone().find(|&k| !holds(k));
    ViolationReport {
        checked_range: range,
        first_violation,
        used_extended,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn of(values: &[i64]) -> ShapeReport {
        classify(values.len(), |i, j| values[i].cmp(&values[j]))
    }

    #[test]
    fn single_point() {
        let r = of(&[1]);
        assert_eq!(r.modes, vec![0]);
        assert!(r.is_unimodal && r.descent_persistent);
    }

    #[test]
    fn plateau_at_peak() {
        let r = of(&[1, 3, 5, 5]);
        assert_eq!(r.modes, vec![2, 3]);
        assert_eq!((r.ascent_end, r.descent_start), (2, 3));
        assert!(r.is_unimodal && r.descent_persistent);
    }

    #[test]
    fn flat_shoulder_is_unimodal_but_not_persistent() {
        let r = of(&[1, 1, 4, 2]);
        assert_eq!(r.modes, vec![2]);
        assert!(r.is_unimodal);
        assert!(!r.descent_persistent);
    }

    #[test]
    fn two_peaks() {
        let r = of(&[1, 5, 2, 5]);
        assert_eq!(r.modes, vec![1, 3]);
        assert!(!r.is_unimodal);
    }

    #[test]
    fn reascent_after_peak() {
        let r = of(&[1, 9, 2, 3]);
        assert_eq!(r.modes, vec![1]);
        assert!(!r.is_unimodal);
        assert!(!r.descent_persistent);
    }

    #[test]
    fn triple_tie_is_rejected() {
        let r = of(&[2, 2, 2]);
        assert_eq!(r.modes.len(), 3);
        assert!(!r.is_unimodal);
    }

    #[test]
    fn scan_reports_first_failure() {
        let v = [1.0f64, 2.0, 3.0, 5.0, 6.0];
        let rep = scan_log_concavity(1..=3, false, |k| v[k] * v[k] >= v[k - 1] * v[k + 1]);
        assert_eq!(rep.first_violation, Some(2));
        assert!(!rep.is_log_concave());
    }
}
