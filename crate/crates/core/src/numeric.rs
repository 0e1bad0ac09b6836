//! One-dimensional search helpers for convex and concave objectives.

use crate::extreal::{ExtReal, Interval};
use crate::pwfn::Infimum;

/// Bracket radius used when a search interval is unbounded.
pub(crate) const SEARCH_CAP: f64 = 1e8;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of a unimodal `f` on `[a, b]` (endpoints not evaluated).
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..160 {
        if (b - a) <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Infimum of a convex `f` over `dom` (`f` is only evaluated inside `dom`).
///
/// Unbounded ends are explored by doubling up to [`SEARCH_CAP`]; a value
/// still decreasing at the cap is reported as `-inf`.
pub(crate) fn minimize_convex(f: &dyn Fn(f64) -> ExtReal, dom: &Interval) -> Infimum {
    if dom.is_empty() {
        return Infimum { value: ExtReal::PosInf, argmin: None };
    }
    if dom.is_singleton() {
        return Infimum { value: f(dom.lo()), argmin: Some(dom.lo()) };
    }
    let fin = |x: f64| match f(x) {
        ExtReal::Finite(v) => v,
        ExtReal::PosInf => f64::INFINITY,
        ExtReal::NegInf => f64::NEG_INFINITY,
    };
    let x0 = if dom.lo().is_finite() && dom.hi().is_finite() {
        0.5 * (dom.lo() + dom.hi())
    } else if dom.lo().is_finite() {
        dom.lo() + 1.0
    } else if dom.hi().is_finite() {
        dom.hi() - 1.0
    } else {
        0.0
    };
    let f0 = fin(x0);
    if f0 == f64::NEG_INFINITY {
        return Infimum { value: ExtReal::NegInf, argmin: Some(x0) };
    }
    let mut a = dom.lo();
    let mut b = dom.hi();
    if !a.is_finite() {
        match expand(&fin, x0, f0, -1.0) {
            Some(v) => a = v,
            None => return Infimum { value: ExtReal::NegInf, argmin: None },
        }
    }
    if !b.is_finite() {
        match expand(&fin, x0, f0, 1.0) {
            Some(v) => b = v,
            None => return Infimum { value: ExtReal::NegInf, argmin: None },
        }
    }
    let (xm, vm) = golden_min(&fin, a, b);
    let mut best = Infimum { value: ExtReal::from_f64(vm), argmin: Some(xm) };
    for (end, closed) in [(dom.lo(), dom.lo_closed()), (dom.hi(), dom.hi_closed())] {
        if closed {
            let v = f(end);
            if v <= best.value {
                best = Infimum { value: v, argmin: Some(end) };
            }
        }
    }
    let near_open = |end: f64, closed: bool| {
        end.is_finite() && !closed && (xm - end).abs() <= 1e-9 * (1.0 + end.abs())
    };
    if best.argmin == Some(xm) && (near_open(dom.lo(), dom.lo_closed()) || near_open(dom.hi(), dom.hi_closed())) {
        best.argmin = None;
    }
    best
}

/// Steps from `x0` in direction `dir` until the value stops decreasing; the
/// returned point brackets the minimum. `None` if still decreasing at the cap.
fn expand(f: &dyn Fn(f64) -> f64, x0: f64, f0: f64, dir: f64) -> Option<f64> {
    let mut step = 1.0;
    let mut prev = f0;
    loop {
        let x = x0 + dir * step;
        let v = f(x);
        if v > prev || v == f64::INFINITY {
            return Some(x);
        }
        if step >= SEARCH_CAP {
            return if v < prev - 1e-9 * (1.0 + prev.abs()) { None } else { Some(x) };
        }
        prev = v;
        step *= 2.0;
    }
}

/// Supremum of a concave `h` over `dom`.
pub(crate) fn maximize_concave(h: &dyn Fn(f64) -> ExtReal, dom: &Interval) -> ExtReal {
    let neg = |x: f64| -h(x);
    -minimize_convex(&neg, dom).value
}

/// Uniform grid of `n >= 2` nodes on `[lo, hi]`.
/// Global infimum of an arbitrary `f` over `dom ∩ [-window, window]` on a
/// grid of `nodes` points, refining every grid-local minimum by golden
/// section and probing unbounded ends geometrically up to [`SEARCH_CAP`].
pub(crate) fn minimize_sampled(f: &dyn Fn(f64) -> ExtReal, dom: &Interval, window: f64, nodes: usize) -> Infimum {
    if dom.is_empty() {
        return Infimum { value: ExtReal::PosInf, argmin: None };
    }
    if dom.is_singleton() {
        return Infimum { value: f(dom.lo()), argmin: Some(dom.lo()) };
    }
    let lo = dom.lo().max(-window);
    let hi = dom.hi().min(window);
    let mut xs = if lo < hi { linspace(lo, hi, nodes.max(3)) } else { vec![lo.max(hi).clamp(dom.lo(), dom.hi())] };
    // open ends are approached from inside
    let inward = |x: f64, toward: f64| x + (toward - x).signum() * 1e-12 * (1.0 + x.abs());
    for x in xs.iter_mut() {
        if !dom.contains(*x) {
            *x = inward(*x, 0.5 * (lo + hi));
        }
    }
    let vals: Vec<ExtReal> = xs.iter().map(|&x| f(x)).collect();
    let mut best = Infimum { value: ExtReal::PosInf, argmin: None };
    let take = |x: f64, v: ExtReal, best: &mut Infimum| {
        if v < best.value {
            *best = Infimum { value: v, argmin: Some(x) };
        }
    };
    for (&x, &v) in xs.iter().zip(&vals) {
        take(x, v, &mut best);
    }
    let fin = |x: f64| match f(x) {
        ExtReal::Finite(v) => v,
        ExtReal::PosInf => f64::INFINITY,
        ExtReal::NegInf => f64::NEG_INFINITY,
    };
    let mut local: Vec<usize> = (1..xs.len().saturating_sub(1))
        .filter(|&k| {
            vals[k].is_finite()
                && vals[k] <= vals[k - 1]
                && vals[k] <= vals[k + 1]
                && (vals[k] < vals[k - 1] || vals[k] < vals[k + 1])
        })
        .collect();
    local.sort_by(|&a, &b| vals[a].cmp(&vals[b]));
    for &k in local.iter().take(8) {
        let (x, v) = golden_min(&fin, xs[k - 1], xs[k + 1]);
        take(x, ExtReal::Finite(v), &mut best);
    }
    for (end, inside) in [(dom.hi(), hi), (dom.lo(), lo)] {
        if end.is_infinite() {
            let dir = end.signum();
            let mut last = f(inside);
            let mut step = window.max(1.0);
            let mut x = inside;
            while step <= SEARCH_CAP {
                x = dir * step;
                let v = f(x);
                take(x, v, &mut best);
                if v >= last {
                    break;
                }
                last = v;
                step *= 2.0;
            }
            if step > SEARCH_CAP && last.is_finite() && best.argmin == Some(x) {
                return Infimum { value: ExtReal::NegInf, argmin: None };
            }
        }
    }
    best
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}
