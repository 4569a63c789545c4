//! Misiurewicz parameters: the critical orbit is strictly preperiodic.
//!
//! `M_{h,T}` is a parameter where `P_h(t) = P_{h+T}(t)` with `h` the least
//! preperiod and `T` the prime period of the cycle the orbit of `0` lands
//! on. That cycle is repelling. The equation `P_h = P_{h+T}` also vanishes
//! at superstable and non-minimal parameters, so candidates are filtered.

use rayon::prelude::*;

use crate::bisect::{bisect, linspace};
use crate::error::{Error, Result};
use crate::quad::{critical_poly_eval, iterate, QuadParam};
use crate::superstable::REG_TOL;

/// Largest `h + 2T` accepted by [`find_misiurewicz`].
pub const MAX_DEPTH: usize = 40;

/// Separation required between curves that must not meet.
pub const SEPARATION_TOL: f64 = 1e-7;

/// Periodicity tolerance of [`verify_misiurewicz`].
pub const PERIODIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisiurewiczPoint {
    /// Preperiod `h`.
    pub h: usize,
    /// Period `T`.
    pub period: usize,
    pub t: f64,
}

/// `P_h(t) - P_{h+T}(t)` and its `t`-derivative.
fn gap_with_slope(h: usize, period: usize, t: f64) -> (f64, f64) {
    let (mut x, mut dx) = (0.0f64, 0.0f64);
    let (mut xh, mut dxh) = (0.0, 0.0);
    for k in 1..=h + period {
        dx = 1.0 - 2.0 * x * dx;
        x = t - x * x;
        if k == h {
            (xh, dxh) = (x, dx);
        }
    }
    (xh - x, dxh - dx)
}

fn gap(h: usize, period: usize, t: f64) -> f64 {
    critical_poly_eval(h, QuadParam::saturating(t)) - critical_poly_eval(h + period, QuadParam::saturating(t))
}

fn proper_divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..n).filter(move |d| n % d == 0)
}

/// Checks that `t` is a genuine `M_{h,T}` and not a superstable or
/// non-minimal solution of `P_h = P_{h+T}`.
fn is_genuine(h: usize, period: usize, t: f64) -> bool {
    if t <= 0.0 {
        return false;
    }
    let (d, slope) = gap_with_slope(h, period, t);
    if d.abs() > 1e-10_f64.max(8.0 * f64::EPSILON * t * slope.abs()) {
        return false;
    }
    let tp = QuadParam::saturating(t);
    let orbit = iterate(tp, 0.0, h + period);
    if orbit[1..].iter().any(|x| x.abs() <= REG_TOL) {
        return false;
    }
    if h >= 2 && gap(h - 1, period, t).abs() <= SEPARATION_TOL {
        return false;
    }
    proper_divisors(period).all(|d| gap(h, d, t).abs() > SEPARATION_TOL)
}

/// Zeros of `P_h - P_{h+T}` on `[t_lo, t_hi]` that are Misiurewicz points.
///
/// Sign changes on a uniform grid are bisected to `1e-12`; grid points where
/// the difference is exactly zero are taken as they are (this is how
/// `M_{2,1} = 2` is found at the end of the range).
pub fn find_misiurewicz(
    h: usize,
    period: usize,
    t_lo: QuadParam,
    t_hi: QuadParam,
    grid_step: f64,
) -> Result<Vec<MisiurewiczPoint>> {
    if h == 0 || period == 0 {
        return Err(Error::InvalidArgument("preperiod and period must be at least 1".into()));
    }
    if h + 2 * period > MAX_DEPTH {
        return Err(Error::TooLarge {
            what: "h + 2T",
            requested: h + 2 * period,
            max: MAX_DEPTH,
        });
    }
    let (lo, hi) = (t_lo.get(), t_hi.get());
    if !(lo < hi) || !(grid_step > 0.0) {
        return Err(Error::InvalidArgument("need t_lo < t_hi and a positive grid step".into()));
    }
    let steps = ((hi - lo) / grid_step).ceil().max(1.0) as usize;
    let grid = linspace(lo, hi, steps);
    let values: Vec<f64> = grid.par_iter().map(|&t| gap(h, period, t)).collect();
    let f = |t: f64| gap(h, period, t);
    let mut candidates = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v == 0.0 {
            candidates.push(grid[i]);
        } else if i > 0 && values[i - 1] != 0.0 && v.signum() != values[i - 1].signum() {
            if let Some(r) = bisect(f, grid[i - 1], grid[i], 1e-15) {
                candidates.push(r);
            }
        }
    }
    candidates.retain(|&t| is_genuine(h, period, t));
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    Ok(candidates
        .into_iter()
        .map(|t| MisiurewiczPoint { h, period, t })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisiurewiczReport {
    pub point: MisiurewiczPoint,
    /// Largest `|x_{k+T} - x_k|` for `h <= k <= h + 2T`.
    pub max_deviation: f64,
    pub tail_periodic: bool,
    /// `∏ q_t'(x_k)` over `k = h, ..., h + T - 1`.
    pub multiplier: f64,
    pub repelling: bool,
    /// Some orbit point after step 0 is within [`REG_TOL`] of `0`.
    pub hits_critical: bool,
    /// First step past the checked window where the floating-point orbit
    /// leaves the cycle, if it does within the horizon. Expected: the cycle
    /// is repelling, so rounding errors grow.
    pub drift_step: Option<usize>,
}

impl MisiurewiczReport {
    pub fn passed(&self) -> bool {
        self.tail_periodic && self.repelling && !self.hits_critical
    }
}

/// Iterates `0` for `horizon` steps and checks the eventual cycle.
pub fn verify_misiurewicz(point: &MisiurewiczPoint, horizon: usize) -> Result<MisiurewiczReport> {
    let (h, period) = (point.h, point.period);
    if horizon < h + 3 * period {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is shorter than h + 3T = {}",
            h + 3 * period
        )));
    }
    let t = QuadParam::new(point.t)?;
    let orbit = iterate(t, 0.0, horizon);
    let dev = |k: usize| (orbit[k + period] - orbit[k]).abs();
    let window = h..=h + 2 * period;
    let max_deviation = window.clone().map(dev).fold(0.0, f64::max);
    let drift_step = (h + 2 * period + 1..=horizon - period).find(|&k| dev(k) > PERIODIC_TOL);
    let multiplier: f64 = orbit[h..h + period].iter().map(|&x| -2.0 * x).product();
    let hits_critical = orbit[1..].iter().any(|x| x.abs() <= REG_TOL);
    Ok(MisiurewiczReport {
        point: *point,
        max_deviation,
        tail_periodic: max_deviation <= PERIODIC_TOL,
        multiplier,
        repelling: multiplier.abs() > 1.0,
        hits_critical,
        drift_step,
    })
}

/// `M_{3,1}`: the root in `(0, 2)` of `4 - 6t + 6t² - 4t³ + t⁴`.
///
/// The quartic is `(t - 2)(t³ - 2t² + 2t - 2)`; on `[0, 1.9]` it has a
/// single sign change.
pub fn m31_quartic() -> f64 {
    bisect(m31_quartic_value, 0.0, 1.9, 1e-15).expect("sign change on [0, 1.9]")
}

/// `4 - 6t + 6t² - 4t³ + t⁴`.
pub fn m31_quartic_value(t: f64) -> f64 {
    (((t - 4.0) * t + 6.0) * t - 6.0) * t + 4.0
}

/// `(t, n, P_n(t))` for `1 <= n <= max_n` on `steps + 1` parameters: the
/// curves whose meetings are the Misiurewicz points.
pub fn dark_lines(max_n: usize, t_lo: QuadParam, t_hi: QuadParam, steps: usize) -> Vec<(f64, usize, f64)> {
    linspace(t_lo.get(), t_hi.get(), steps)
        .par_iter()
        .flat_map_iter(|&t| {
            let orbit = iterate(QuadParam::saturating(t), 0.0, max_n);
            (1..=max_n).map(move |n| (t, n, orbit[n])).collect::<Vec<_>>()
        })
        .collect()
}
