//! Extended reals and real intervals with explicit endpoint openness.
//!
//! Arithmetic on [`ExtReal`] follows the lower convention: whenever an
//! `inf - inf` clash occurs the result is `-inf`. Intervals keep closedness
//! flags for each endpoint so that strict and non-strict membership never
//! gets blurred by floating point.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `R ∪ {-inf, +inf}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtReal::{NegInf as MINUS_INF, PosInf as PLUS_INF};

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `f64` infinities onto the matching infinite element.
    pub fn from_f64(v: f64) -> Self {
        debug_assert!(!v.is_nan(), "NaN has no extended-real counterpart");
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// Addition where any `+inf`/`-inf` clash resolves to `-inf`.
    pub fn add_lower(self, other: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => ExtReal::from_f64(a + b),
        }
    }

    /// `self - other` under the same convention.
    pub fn sub_lower(self, other: ExtReal) -> ExtReal {
        self.add_lower(-other)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Equality with an absolute/relative tolerance on finite values.
    pub fn approx_eq(self, other: ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => approx_eq(a, b, tol),
            (a, b) => a == b,
        }
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = 1.0f64.max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Finite(v) => write!(f, "{}", fmt_scalar(*v)),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<ExtReal, D::Error> {
        let text = String::deserialize(d)?;
        parse_scalar(&text).map(ExtReal::from_f64).map_err(serde::de::Error::custom)
    }
}

/// A scalar written as a string literal (`"1/3"`, `"-inf"`, `"0.25"`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalar(pub f64);

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_scalar(self.0))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let text = String::deserialize(d)?;
        parse_scalar(&text).map(Scalar).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalRepr {
    lo: Scalar,
    lo_closed: bool,
    hi: Scalar,
    hi_closed: bool,
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> IntervalRepr {
        IntervalRepr { lo: Scalar(i.lo), lo_closed: i.lo_closed, hi: Scalar(i.hi), hi_closed: i.hi_closed }
    }
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = String;
    fn try_from(r: IntervalRepr) -> std::result::Result<Interval, String> {
        if r.lo.0 == f64::INFINITY && r.hi.0 == f64::NEG_INFINITY {
            return Ok(Interval::EMPTY);
        }
        if r.lo.0 > r.hi.0 {
            return Err(format!("interval endpoints out of order: {} > {}", fmt_scalar(r.lo.0), fmt_scalar(r.hi.0)));
        }
        Ok(Interval::new(r.lo.0, r.lo_closed, r.hi.0, r.hi_closed))
    }
}

/// Shortest round-trip decimal, with `-0` normalised to `0`.
pub fn fmt_scalar(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// Parses `inf`, `-inf`, `+inf`, decimals and `p/q` rationals.
pub fn parse_scalar(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| format!("bad rational literal `{s}`"))?;
        let q: f64 = q.trim().parse().map_err(|_| format!("bad rational literal `{s}`"))?;
        if q == 0.0 || !p.is_finite() || !q.is_finite() {
            return Err(format!("bad rational literal `{s}`"));
        }
        return Ok(p / q);
    }
    let v: f64 = t.parse().map_err(|_| format!("bad scalar literal `{s}`"))?;
    if v.is_nan() || v.is_infinite() {
        return Err(format!("bad scalar literal `{s}`"));
    }
    Ok(v)
}

/// A (possibly empty, possibly unbounded) interval of the real line.
///
/// Infinite endpoints are always open; a degenerate interval is a closed
/// singleton. Every constructor normalises, so structural equality is
/// set equality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "IntervalRepr", try_from = "IntervalRepr")]
pub struct Interval {
    lo: f64,
    lo_closed: bool,
    hi: f64,
    hi_closed: bool,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        lo_closed: false,
        hi: f64::NEG_INFINITY,
        hi_closed: false,
    };

    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        lo_closed: false,
        hi: f64::INFINITY,
        hi_closed: false,
    };

    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Interval {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Interval::EMPTY;
        }
        Interval { lo, lo_closed, hi, hi_closed }
    }

    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, true, hi, true)
    }

    pub fn open(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, false, hi, false)
    }

    pub fn point(x: f64) -> Interval {
        Interval::closed(x, x)
    }

    /// `[lo, +inf[` or `]lo, +inf[`.
    pub fn at_least(lo: f64, closed: bool) -> Interval {
        Interval::new(lo, closed, f64::INFINITY, false)
    }

    /// `]-inf, hi]` or `]-inf, hi[`.
    pub fn at_most(hi: f64, closed: bool) -> Interval {
        Interval::new(f64::NEG_INFINITY, false, hi, closed)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_singleton(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        !self.is_empty() && self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Whether `x` lies in the interior.
    pub fn contains_interior(&self, x: f64) -> bool {
        !self.is_empty() && x > self.lo && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        let (lo, lo_closed) = match self.lo.total_cmp(&other.lo) {
            Ordering::Greater => (self.lo, self.lo_closed),
            Ordering::Less => (other.lo, other.lo_closed),
            Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&other.hi) {
            Ordering::Less => (self.hi, self.hi_closed),
            Ordering::Greater => (other.hi, other.hi_closed),
            Ordering::Equal => (self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Minkowski sum `{a + b}`.
    pub fn minkowski_sum(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(
            self.lo + other.lo,
            self.lo_closed && other.lo_closed,
            self.hi + other.hi,
            self.hi_closed && other.hi_closed,
        )
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        let (lo, lo_closed) = match self.lo.total_cmp(&other.lo) {
            Ordering::Less => (self.lo, self.lo_closed),
            Ordering::Greater => (other.lo, other.lo_closed),
            Ordering::Equal => (self.lo, self.lo_closed || other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&other.hi) {
            Ordering::Greater => (self.hi, self.hi_closed),
            Ordering::Less => (other.hi, other.hi_closed),
            Ordering::Equal => (self.hi, self.hi_closed || other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Topological closure.
    pub fn closure(&self) -> Interval {
        if self.is_empty() {
            return *self;
        }
        Interval::new(self.lo, true, self.hi, true)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.is_empty() || self.intersect(other) == *self
    }

    /// `-I`.
    pub fn negate(&self) -> Interval {
        if self.is_empty() {
            return *self;
        }
        Interval::new(-self.hi, self.hi_closed, -self.lo, self.lo_closed)
    }

    /// `sup { x y : x in I }` together with whether the supremum is attained.
    pub fn strict_support(&self, y: f64) -> Result<(ExtReal, bool)> {
        if self.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(if y == 0.0 {
            (ExtReal::ZERO, true)
        } else if y > 0.0 {
            if self.hi.is_finite() {
                (ExtReal::Finite(self.hi * y), self.hi_closed)
            } else {
                (ExtReal::PosInf, false)
            }
        } else if self.lo.is_finite() {
            (ExtReal::Finite(self.lo * y), self.lo_closed)
        } else {
            (ExtReal::PosInf, false)
        })
    }

    /// Whether the interval is contained in the open half-line `{x : x y < alpha}`.
    pub fn inside_open_halfspace(&self, y: f64, alpha: f64) -> bool {
        match self.strict_support(y) {
            Ok((ExtReal::Finite(v), attained)) => v < alpha || (v == alpha && !attained),
            Ok(_) => false,
            Err(_) => true,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        if self.is_singleton() {
            return write!(f, "{{{}}}", fmt_scalar(self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { "[" } else { "]" },
            fmt_scalar(self.lo),
            fmt_scalar(self.hi),
            if self.hi_closed { "]" } else { "[" }
        )
    }
}
