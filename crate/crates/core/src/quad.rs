//! The quadratic family `q_t(x) = t - x²` for `0 <= t <= 2`.
//!
//! Everything here is a closed-form expression: the map, its orbits, the two
//! fixed points, the invariant interval `I_t` and the affine conjugacy with
//! the logistic family `f_mu(z) = 4 mu z (1 - z)`.

use crate::error::{Error, Result};

/// A parameter of the quadratic family, guaranteed to lie in `[0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuadParam(f64);

impl QuadParam {
    pub const MIN: f64 = 0.0;
    pub const MAX: f64 = 2.0;

    pub fn new(t: f64) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&t) {
            Ok(QuadParam(t))
        } else {
            Err(Error::ParamOutOfRange(t))
        }
    }

    /// Clamps `t` into `[0, 2]`. NaN maps to 0.
    pub fn saturating(t: f64) -> Self {
        if t.is_nan() {
            QuadParam(0.0)
        } else {
            QuadParam(t.clamp(Self::MIN, Self::MAX))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `sqrt(1 + 4t)`, the discriminant shared by the fixed points and `I_t`.
    #[inline]
    fn root_disc(self) -> f64 {
        (1.0 + 4.0 * self.0).sqrt()
    }
}

impl TryFrom<f64> for QuadParam {
    type Error = Error;

    fn try_from(t: f64) -> Result<Self> {
        QuadParam::new(t)
    }
}

impl From<QuadParam> for f64 {
    fn from(t: QuadParam) -> f64 {
        t.0
    }
}

impl std::fmt::Display for QuadParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The invariant interval `I_t = [x_fix1, -x_fix1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantInterval {
    pub lo: f64,
    pub hi: f64,
}

impl InvariantInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Membership in the open interval.
    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

#[inline]
pub fn eval_map(t: QuadParam, x: f64) -> f64 {
    t.0 - x * x
}

/// The orbit `(x0, q_t(x0), ..., q_t^n(x0))`, `n + 1` values in total.
pub fn iterate(t: QuadParam, x0: f64, n: usize) -> Vec<f64> {
    let mut orbit = Vec::with_capacity(n + 1);
    let mut x = x0;
    orbit.push(x);
    for _ in 0..n {
        x = eval_map(t, x);
        orbit.push(x);
    }
    orbit
}

/// `q_t^n(x)` without storing the orbit.
#[inline]
pub fn iterate_n(t: QuadParam, x0: f64, n: usize) -> f64 {
    (0..n).fold(x0, |x, _| eval_map(t, x))
}

pub fn invariant_interval(t: QuadParam) -> InvariantInterval {
    let half = 0.5 * (1.0 + t.root_disc());
    InvariantInterval { lo: -half, hi: half }
}

/// `(x_fix1, x_fix2)` with `x_fix1 <= -1` and `x_fix2 >= 0`.
pub fn fixed_points(t: QuadParam) -> (f64, f64) {
    let r = t.root_disc();
    (-0.5 * (1.0 + r), 0.5 * (-1.0 + r))
}

/// Affine conjugacy between `q_t` on `I_t` and the logistic map `f_mu` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConjugacy {
    pub mu: f64,
}

impl LogisticConjugacy {
    /// `x = 4 mu z - 2 mu`.
    #[inline]
    pub fn from_logistic(&self, z: f64) -> f64 {
        4.0 * self.mu * z - 2.0 * self.mu
    }

    /// `z = x / (4 mu) + 1/2`.
    #[inline]
    pub fn to_logistic(&self, x: f64) -> f64 {
        x / (4.0 * self.mu) + 0.5
    }

    #[inline]
    pub fn logistic(&self, z: f64) -> f64 {
        4.0 * self.mu * z * (1.0 - z)
    }

    /// The quadratic parameter conjugate to `mu`: `t = 2 mu (2 mu - 1)`.
    pub fn quad_param(&self) -> f64 {
        2.0 * self.mu * (2.0 * self.mu - 1.0)
    }
}

pub fn logistic_conjugacy(t: QuadParam) -> LogisticConjugacy {
    LogisticConjugacy {
        mu: 0.25 * (1.0 + t.root_disc()),
    }
}

/// `P_n(t) = q_t^n(0)` by the value recursion `P_k = t - P_{k-1}²`.
///
/// Agrees bit for bit with the last element of `iterate(t, 0.0, n)`.
#[inline]
pub fn critical_poly_eval(n: usize, t: QuadParam) -> f64 {
    iterate_n(t, 0.0, n)
}

/// `samples` points of the orbit of `0` after discarding `transient` steps.
/// Plotted against `t` these form the bifurcation diagram.
pub fn critical_orbit_tail(t: QuadParam, transient: usize, samples: usize) -> Vec<f64> {
    let mut x = iterate_n(t, 0.0, transient);
    (0..samples)
        .map(|_| {
            x = eval_map(t, x);
            x
        })
        .collect()
}

/// Derivative of `q_t` at `x`.
#[inline]
pub fn derivative(x: f64) -> f64 {
    -2.0 * x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64) -> QuadParam {
        QuadParam::new(t).unwrap()
    }

    #[test]
    fn param_range_is_closed() {
        assert!(QuadParam::new(0.0).is_ok());
        assert!(QuadParam::new(2.0).is_ok());
        assert_eq!(QuadParam::new(-1e-300), Err(Error::ParamOutOfRange(-1e-300)));
        assert!(QuadParam::new(2.0 + f64::EPSILON * 2.0).is_err());
        assert!(QuadParam::new(f64::NAN).is_err());
        assert_eq!(QuadParam::saturating(3.0).get(), 2.0);
    }

    #[test]
    fn map_values() {
        assert_eq!(eval_map(p(2.0), 0.0), 2.0);
        assert_eq!(eval_map(p(1.0), 1.0), 0.0);
        assert_eq!(eval_map(p(2.0), -2.0), -2.0);
    }

    #[test]
    fn orbits() {
        assert_eq!(iterate(p(2.0), 0.0, 3), vec![0.0, 2.0, -2.0, -2.0]);
        assert_eq!(iterate(p(0.0), 0.0, 2), vec![0.0, 0.0, 0.0]);
        assert_eq!(iterate(p(1.0), 0.0, 4), vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(iterate(p(1.3), 0.4, 0), vec![0.4]);
    }

    #[test]
    fn intervals_and_fixed_points() {
        assert_eq!(invariant_interval(p(0.0)), InvariantInterval { lo: -1.0, hi: 1.0 });
        assert_eq!(invariant_interval(p(2.0)), InvariantInterval { lo: -2.0, hi: 2.0 });
        assert_eq!(invariant_interval(p(0.75)), InvariantInterval { lo: -1.5, hi: 1.5 });
        assert_eq!(fixed_points(p(2.0)), (-2.0, 1.0));
        assert_eq!(fixed_points(p(0.0)), (-1.0, 0.0));
        assert_eq!(fixed_points(p(0.75)), (-1.5, 0.5));
    }

    #[test]
    fn conjugacy_parameters() {
        assert_eq!(logistic_conjugacy(p(2.0)).mu, 1.0);
        assert_eq!(logistic_conjugacy(p(0.0)).mu, 0.5);
        assert_eq!(logistic_conjugacy(p(0.75)).mu, 0.75);
        assert!((logistic_conjugacy(p(1.3)).quad_param() - 1.3).abs() < 1e-14);
    }

    #[test]
    fn critical_values() {
        assert_eq!(critical_poly_eval(5, p(2.0)), -2.0);
        assert_eq!(critical_poly_eval(7, p(0.0)), 0.0);
        assert_eq!(critical_poly_eval(2, p(1.0)), 0.0);
        assert_eq!(critical_poly_eval(0, p(1.7)), 0.0);
        for n in 0..12 {
            let t = p(1.234);
            assert_eq!(critical_poly_eval(n, t), *iterate(t, 0.0, n).last().unwrap());
        }
    }

    #[test]
    fn orbit_tail() {
        assert_eq!(critical_orbit_tail(p(1.0), 10, 4), vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(critical_orbit_tail(p(2.0), 0, 3), vec![2.0, -2.0, -2.0]);
        assert!(critical_orbit_tail(p(0.5), 5, 0).is_empty());
    }

    #[test]
    fn grid_properties() {
        for i in 0..=2000 {
            let t = p(i as f64 * 1e-3);
            let (a, b) = fixed_points(t);
            assert!((eval_map(t, a) - a).abs() <= 1e-12);
            assert!((eval_map(t, b) - b).abs() <= 1e-12);
            let iv = invariant_interval(t);
            assert!((eval_map(t, iv.lo) - iv.lo).abs() <= 1e-12);
            assert!((eval_map(t, iv.hi) - iv.lo).abs() <= 1e-12);
            assert!(iv.lo <= -1.0 && iv.hi >= 1.0 && iv.lo >= -2.0 && iv.hi <= 2.0);
            let c = logistic_conjugacy(t);
            for k in 0..=100 {
                let z = k as f64 / 100.0;
                let lhs = c.to_logistic(eval_map(t, c.from_logistic(z)));
                assert!((lhs - c.logistic(z)).abs() <= 1e-12, "t={} z={}", t, z);
            }
        }
    }
}
