//! Derivative-free bracketing used across the crate.

/// Root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign (or
/// one of them zero). Stops once the bracket is narrower than `tol` or can no
/// longer be split in `f64`.
///
/// `f` may return `None` (undefined); an undefined midpoint shrinks the
/// bracket towards the side named by `undefined_side`.
pub fn bisect_partial<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, undefined_side: Side) -> Option<f64>
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        match f(mid) {
            Some(0.0) => return Some(mid),
            Some(v) if v.signum() == flo.signum() => {
                lo = mid;
                flo = v;
            }
            Some(_) => hi = mid,
            None => match undefined_side {
                Side::Lo => lo = mid,
                Side::Hi => hi = mid,
            },
        }
    }
    Some(0.5 * (lo + hi))
}

/// Which end of a bracket an undefined evaluation should replace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// Plain bisection for a total function.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    bisect_partial(|x| Some(f(x)), lo, hi, tol, Side::Lo)
}

/// Boundary of a predicate: `pred(lo) != pred(hi)`; returns the point where it
/// flips, to within `tol`. Returns the pair `(last point with pred(lo)'s
/// value, first point with pred(hi)'s value)`.
pub fn bisect_predicate<P>(mut pred: P, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    P: FnMut(f64) -> bool,
{
    let at_lo = pred(lo);
    debug_assert_ne!(at_lo, pred(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// `steps + 1` equally spaced points from `lo` to `hi`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![lo];
    }
    let h = (hi - lo) / steps as f64;
    (0..=steps)
        .map(|i| if i == steps { hi } else { lo + h * i as f64 })
        .collect()
}
