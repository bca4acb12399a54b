//! High-precision floating point used by the verification oracles.
//!
//! Nothing here is on the evaluation path: these routines recompute
//! quantities straight from their definitions at 512 bits so that
//! double-precision results can be audited.

use astro_float::{BigFloat, Consts, RoundingMode};

#[cfg(test)]
use crate::exact::Rational;

const PRECISION: usize = 512;
const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) struct Hp {
    cc: Consts,
}

impl Hp {
    pub(crate) fn new() -> Self {
        Hp {
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    fn lit(x: f64) -> BigFloat {
        BigFloat::from_f64(x, PRECISION)
    }

    fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(PRECISION, RM, &mut self.cc)
    }

    fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PRECISION, RM, &mut self.cc)
    }

    pub(crate) fn to_f64(&mut self, x: &BigFloat) -> f64 {
        x.to_string().parse().unwrap_or(f64::NAN)
    }

    /// `h(x) = p^m q^x + q^m p^x` with `p^y = exp(y ln p)`.
    fn h(&mut self, ln_p: &BigFloat, ln_q: &BigFloat, m: &BigFloat, x: &BigFloat) -> BigFloat {
        let a = m.mul(ln_p, PRECISION, RM).add(&x.mul(ln_q, PRECISION, RM), PRECISION, RM);
        let b = m.mul(ln_q, PRECISION, RM).add(&x.mul(ln_p, PRECISION, RM), PRECISION, RM);
        self.exp(&a).add(&self.exp(&b), PRECISION, RM)
    }

    /// Central second difference of `h(x)/h(x+1)` with the given step.
    pub(crate) fn ratio_second_difference(&mut self, p: f64, q: f64, m: usize, x: f64, step: f64) -> BigFloat {
        let ln_p = self.ln(&Self::lit(p));
        let ln_q = self.ln(&Self::lit(q));
        let m = Self::lit(m as f64);
        let one = Self::lit(1.0);
        let step = Self::lit(step);
        let x = Self::lit(x);

        let mut ratio_at = |y: &BigFloat| {
            let y1 = y.add(&one, PRECISION, RM);
            let num = self.h(&ln_p, &ln_q, &m, y);
            let den = self.h(&ln_p, &ln_q, &m, &y1);
            num.div(&den, PRECISION, RM)
        };
        let fwd = ratio_at(&x.add(&step, PRECISION, RM));
        let mid = ratio_at(&x);
        let bwd = ratio_at(&x.sub(&step, PRECISION, RM));
        let two_mid = mid.mul(&Self::lit(2.0), PRECISION, RM);
        let num = fwd.sub(&two_mid, PRECISION, RM).add(&bwd, PRECISION, RM);
        num.div(&step.mul(&step, PRECISION, RM), PRECISION, RM)
    }

    /// `|approx - reference| / |reference|`, with the subtraction done at full precision.
    pub(crate) fn relative_error(&mut self, approx: f64, reference: &BigFloat) -> f64 {
        let diff = Self::lit(approx).sub(reference, PRECISION, RM).abs();
        let rel = diff.div(&reference.abs(), PRECISION, RM);
        self.to_f64(&rel)
    }

    /// Natural logarithm of a positive rational.
    #[cfg(test)]
    pub(crate) fn ln_rational(&mut self, r: &Rational) -> f64 {
        let num = BigFloat::parse(&r.numer().to_string(), astro_float::Radix::Dec, PRECISION, RM, &mut self.cc);
        let den = BigFloat::parse(&r.denom().to_string(), astro_float::Radix::Dec, PRECISION, RM, &mut self.cc);
        let v = self.ln(&num).sub(&self.ln(&den), PRECISION, RM);
        self.to_f64(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    #[test]
    fn logarithm_of_rational() {
        let mut hp = Hp::new();
        let v = hp.ln_rational(&parse_rational("3/8").unwrap());
        assert!((v - 0.375f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn second_difference_of_constant_ratio_vanishes() {
        // p = 1/2: h(x)/h(x+1) = 2 identically
        let mut hp = Hp::new();
        let d = hp.ratio_second_difference(0.5, 0.5, 7, 2.0, 1e-4);
        assert!(hp.to_f64(&d).abs() < 1e-100);
    }
}
