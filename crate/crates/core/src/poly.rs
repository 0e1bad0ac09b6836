//! Real polynomials of low degree with robust real-root isolation.

use serde::{Deserialize, Serialize};

use crate::extreal::{ExtReal, Interval};

pub const MAX_DEGREE: usize = 4;

/// Coefficients in increasing degree order; trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly(Vec<f64>);

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Poly {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly(coeffs)
    }

    pub fn constant(c: f64) -> Poly {
        Poly(vec![c])
    }

    pub fn zero() -> Poly {
        Poly::constant(0.0)
    }

    /// `slope * x + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Poly {
        Poly::new(vec![intercept, slope])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.0.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.0.len() == 1 && self.0[0] == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() == 1 {
            return Poly::zero();
        }
        Poly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn scale(&self, w: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * w).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new(
            (0..n)
                .map(|k| self.0.get(k).copied().unwrap_or(0.0) + other.0.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    /// `self(x) - s * x`.
    pub fn tilt(&self, s: f64) -> Poly {
        self.sub(&Poly::linear(s, 0.0))
    }

    /// Limit as `x -> +inf` (`toward_plus`) or `x -> -inf`.
    pub fn limit_at_infinity(&self, toward_plus: bool) -> ExtReal {
        let d = self.degree();
        if d == 0 {
            return ExtReal::Finite(self.0[0]);
        }
        let sign = if toward_plus || d % 2 == 0 { self.leading() } else { -self.leading() };
        if sign > 0.0 {
            ExtReal::PosInf
        } else {
            ExtReal::NegInf
        }
    }

    /// Real roots in the open interval `]lo, hi[` (bounds may be infinite), sorted.
    ///
    /// Roots of even multiplicity are found when they coincide with a root of
    /// the derivative; otherwise sign changes are bracketed and bisected.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.degree() == 0 || lo >= hi {
            return Vec::new();
        }
        let (a, b) = self.clip_to_root_bound(lo, hi);
        let mut out = Vec::new();
        match self.degree() {
            1 => {
                let r = -self.0[0] / self.0[1];
                out.push(r);
            }
            2 => {
                let (c, b1, a2) = (self.0[0], self.0[1], self.0[2]);
                let disc = b1 * b1 - 4.0 * a2 * c;
                if disc == 0.0 {
                    out.push(-b1 / (2.0 * a2));
                } else if disc > 0.0 {
                    let sq = disc.sqrt();
                    // numerically stable pair
                    let q = -0.5 * (b1 + b1.signum() * sq);
                    if q != 0.0 {
                        out.push(q / a2);
                        out.push(c / q);
                    } else {
                        out.push(sq / (2.0 * a2));
                        out.push(-sq / (2.0 * a2));
                    }
                }
            }
            _ => {
                let mut knots = vec![a];
                knots.extend(self.derivative().roots_in(a, b));
                knots.push(b);
                for w in knots.windows(2) {
                    let (l, r) = (w[0], w[1]);
                    let (fl, fr) = (self.eval(l), self.eval(r));
                    if fl == 0.0 {
                        out.push(l);
                    }
                    if fl * fr < 0.0 {
                        out.push(bisect(|x| self.eval(x), l, r, fl));
                    }
                }
                if self.eval(b) == 0.0 {
                    out.push(b);
                }
                // touching roots: derivative roots where the value vanishes numerically
                for &k in &knots[1..knots.len() - 1] {
                    let scale = self.0.iter().map(|c| c.abs()).fold(0.0, f64::max) * (1.0 + k.abs()).powi(self.degree() as i32);
                    if self.eval(k).abs() <= 1e-14 * scale {
                        out.push(k);
                    }
                }
            }
        }
        out.retain(|r| r.is_finite() && *r > lo && *r < hi);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-13 * (1.0 + x.abs()));
        out
    }

    fn clip_to_root_bound(&self, lo: f64, hi: f64) -> (f64, f64) {
        let lead = self.leading().abs();
        let bound = 1.0 + self.0[..self.0.len() - 1].iter().map(|c| c.abs() / lead).fold(0.0, f64::max);
        (lo.max(-bound - 1.0), hi.min(bound + 1.0))
    }

    /// Infimum of the polynomial over an interval.
    ///
    /// Returns the value, the point where it is attained (if it is), and
    /// for non-attained finite values `None`. Open endpoints contribute their
    /// limit value without attainment.
    pub fn infimum_on(&self, dom: &Interval) -> PolyInf {
        if dom.is_empty() {
            return PolyInf { value: ExtReal::PosInf, argmin: None };
        }
        let mut best = PolyInf { value: ExtReal::PosInf, argmin: None };
        let mut offer = |v: ExtReal, at: Option<f64>| {
            if v < best.value || (v == best.value && best.argmin.is_none() && at.is_some()) {
                best = PolyInf { value: v, argmin: at };
            }
        };
        let (lo, hi) = (dom.lo(), dom.hi());
        if lo.is_finite() {
            offer(ExtReal::Finite(self.eval(lo)), dom.lo_closed().then_some(lo));
        } else {
            offer(self.limit_at_infinity(false), None);
        }
        if hi.is_finite() {
            offer(ExtReal::Finite(self.eval(hi)), dom.hi_closed().then_some(hi));
        } else {
            offer(self.limit_at_infinity(true), None);
        }
        if self.degree() >= 2 {
            for r in self.derivative().roots_in(lo, hi) {
                offer(ExtReal::Finite(self.eval(r)), Some(r));
            }
        }
        best
    }
}

/// Result of a one-dimensional minimisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyInf {
    pub value: ExtReal,
    pub argmin: Option<f64>,
}

pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut l: f64, mut r: f64, mut fl: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fl < 0.0) {
            l = m;
            fl = fm;
        } else {
            r = m;
        }
    }
    0.5 * (l + r)
}
