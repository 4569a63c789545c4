//! Piecewise monotone interval maps with `l` turning points.
//!
//! A map `f: [a, b] → [a, b]` is `l`-modal when it is continuous and strictly
//! monotone on each of the `l + 1` laps cut out by its critical points
//! `c_1 < ... < c_l`. Its shape is positive when `c_1` is a maximum. The
//! extrema of `f^n` sit at the critical points and their preimages of order
//! below `n`, so counting minimal-order preimages of the `c_i` gives both the
//! lap numbers of the iterates and the topological entropy.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bisect::bisect;
use crate::error::{Error, Result};
use crate::quad::{invariant_interval, QuadParam};

/// Deepest preimage order the module computes.
pub const MAX_ORDER: usize = 14;

/// Band around a critical value inside which a preimage counts as tangential.
pub const TANGENT_TOL: f64 = 1e-12;

/// Bracket width for piece inversion.
pub const INVERT_TOL: f64 = 1e-12;

/// Distance from a critical point under which an orbit point is said to hit it.
pub const ORBIT_TOL: f64 = 1e-7;

const MONOTONE_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `f` increases on the first lap: `c_1` is a maximum.
    Positive,
    /// `f` decreases on the first lap: `c_1` is a minimum.
    Negative,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Positive => "positive",
            Shape::Negative => "negative",
        })
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An `l`-modal self-map of `[a, b]`.
#[derive(Clone)]
pub struct MultimodalMap {
    f: Evaluator,
    a: f64,
    b: f64,
    criticals: Vec<f64>,
    shape: Shape,
    /// Lap boundaries `a, c_1, ..., c_l, b`.
    knots: Vec<f64>,
    /// `f` at every knot.
    knot_values: Vec<f64>,
}

impl fmt::Debug for MultimodalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultimodalMap")
            .field("interval", &(self.a, self.b))
            .field("criticals", &self.criticals)
            .field("shape", &self.shape)
            .finish()
    }
}

impl MultimodalMap {
    /// Builds a map from an evaluator and its declared critical points.
    ///
    /// Monotonicity and invariance of `[a, b]` are spot-checked on
    /// 1000 samples per lap; the shape is read off the first lap.
    pub fn new<F>(f: F, a: f64, b: f64, criticals: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(a < b) {
            return Err(Error::InvalidMap(format!("empty interval [{a}, {b}]")));
        }
        if criticals.is_empty() {
            return Err(Error::InvalidMap("at least one critical point is required".into()));
        }
        if criticals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("critical points must be strictly increasing".into()));
        }
        if criticals.iter().any(|&c| !(a < c && c < b)) {
            return Err(Error::InvalidMap("critical points must be interior".into()));
        }
        let mut knots = Vec::with_capacity(criticals.len() + 2);
        knots.push(a);
        knots.extend_from_slice(&criticals);
        knots.push(b);
        let knot_values: Vec<f64> = knots.iter().map(|&x| f(x)).collect();

        let slack = 1e-12 * (b - a).max(1.0);
        let mut first_increasing = None;
        for (j, lap) in knots.windows(2).enumerate() {
            let increasing = knot_values[j + 1] > knot_values[j];
            first_increasing.get_or_insert(increasing);
            let expected = (first_increasing == Some(increasing)) == (j % 2 == 0);
            if !expected {
                return Err(Error::InvalidMap(format!(
                    "laps must alternate direction; lap {} on [{}, {}] does not",
                    j + 1,
                    lap[0],
                    lap[1]
                )));
            }
            let mut prev = knot_values[j];
            for k in 1..=MONOTONE_SAMPLES {
                let x = if k == MONOTONE_SAMPLES {
                    lap[1]
                } else {
                    lap[0] + (lap[1] - lap[0]) * k as f64 / MONOTONE_SAMPLES as f64
                };
                let y = f(x);
                if !(a - slack..=b + slack).contains(&y) {
                    return Err(Error::InvalidMap(format!("f({x}) = {y} leaves [{a}, {b}]")));
                }
                if (y > prev) != increasing || y == prev {
                    return Err(Error::InvalidMap(format!(
                        "f is not strictly monotone on [{}, {}] near x = {x}",
                        lap[0], lap[1]
                    )));
                }
                prev = y;
            }
        }
        let shape = if first_increasing == Some(true) {
            Shape::Positive
        } else {
            Shape::Negative
        };
        Ok(MultimodalMap {
            f: Arc::new(f),
            a,
            b,
            criticals,
            shape,
            knots,
            knot_values,
        })
    }

    /// Polynomial with ascending coefficients `c_0 + c_1 x + ...`.
    pub fn from_polynomial(coeffs: Vec<f64>, a: f64, b: f64, criticals: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidMap("polynomial has no coefficients".into()));
        }
        let eval = move |x: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        MultimodalMap::new(eval, a, b, criticals)
    }

    /// `q_t` on its invariant interval as a unimodal map. Needs `t > 0`.
    pub fn quadratic(t: QuadParam) -> Result<Self> {
        let iv = invariant_interval(t);
        let tv = t.get();
        if tv <= 0.0 {
            // q_0 = -x² maps 0 to itself and both laps collapse onto [-1, 0].
            return Err(Error::InvalidMap("q_0 is not unimodal on a nondegenerate image".into()));
        }
        MultimodalMap::new(move |x| tv - x * x, iv.lo, iv.hi, vec![0.0])
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn criticals(&self) -> &[f64] {
        &self.criticals
    }

    /// The modality `l`.
    pub fn modality(&self) -> usize {
        self.criticals.len()
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// `f^n(x)`.
    pub fn iterate(&self, x: f64, n: usize) -> f64 {
        (0..n).fold(x, |y, _| self.eval(y))
    }

    /// 1-based lap index of `x` (laps `I_1, ..., I_{l+1}`), ignoring ties.
    fn lap_of(&self, x: f64) -> usize {
        self.criticals.partition_point(|&c| c < x) + 1
    }

    fn increasing_on(&self, lap: usize) -> bool {
        (lap % 2 == 1) == (self.shape == Shape::Positive)
    }

    fn critical_near(&self, y: f64) -> Option<usize> {
        self.criticals.iter().position(|&c| (y - c).abs() <= ORBIT_TOL)
    }

    /// Preimages of `y` inside the open laps, plus whether `y` was within
    /// [`TANGENT_TOL`] of a critical value.
    fn invert(&self, y: f64) -> (Vec<f64>, bool) {
        let mut out = Vec::new();
        let mut tangent = false;
        for (j, lap) in self.knots.windows(2).enumerate() {
            let (fl, fr) = (self.knot_values[j], self.knot_values[j + 1]);
            let (lo, hi) = if fl < fr { (fl, fr) } else { (fr, fl) };
            let near = |v: f64| (y - v).abs() <= TANGENT_TOL;
            // Touching the value at a critical knot is a tangency; touching
            // f(a) or f(b) lands on the boundary, which is not interior.
            if near(fl) || near(fr) {
                let crit_l = j > 0 && near(fl);
                let crit_r = j + 1 < self.criticals.len() + 1 && near(fr);
                tangent |= crit_l || crit_r;
                continue;
            }
            if y <= lo || y >= hi {
                continue;
            }
            let g = |x: f64| self.eval(x) - y;
            if let Some(x) = bisect(g, lap[0], lap[1], INVERT_TOL) {
                out.push(x);
            }
        }
        (out, tangent)
    }
}

/// Minimal-order preimages of one order, tagged with the critical point they
/// lead to.
#[derive(Debug, Clone, PartialEq)]
pub struct PreimageSet {
    pub order: usize,
    /// `(x, i)`: `f^order(x) = c_i` (0-based `i`), sorted by `x`.
    pub points: Vec<(f64, usize)>,
    pub tangential_hits: usize,
}

impl PreimageSet {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::TooLarge {
            what: "preimage order",
            requested: n,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Orders `0..=n` of minimal-order critical preimages.
///
/// Order 0 holds the critical points; order `k + 1` holds the interior
/// solutions of `f(x) = z` for `z` of order `k`. A target within
/// [`TANGENT_TOL`] of a critical value is a tangential hit and has no simple
/// preimage near that critical point.
pub fn critical_preimages(f: &MultimodalMap, n: usize) -> Result<Vec<PreimageSet>> {
    check_order(n)?;
    let mut sets = Vec::with_capacity(n + 1);
    sets.push(PreimageSet {
        order: 0,
        points: f.criticals.iter().copied().zip(0..).collect(),
        tangential_hits: 0,
    });
    for order in 1..=n {
        let prev: &PreimageSet = sets.last().expect("order 0 present");
        let parts: Vec<(Vec<(f64, usize)>, bool)> = prev
            .points
            .par_iter()
            .map(|&(z, i)| {
                let (xs, tangent) = f.invert(z);
                (xs.into_iter().map(|x| (x, i)).collect(), tangent)
            })
            .collect();
        let tangential_hits = parts.iter().filter(|p| p.1).count();
        let mut points: Vec<(f64, usize)> = parts.into_iter().flat_map(|p| p.0).collect();
        points.sort_by(|p, q| p.0.total_cmp(&q.0));
        sets.push(PreimageSet {
            order,
            points,
            tangential_hits,
        });
    }
    Ok(sets)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingCount {
    pub n: usize,
    /// `s_{n,i}` for every critical point.
    pub per_critical: Vec<u64>,
    pub total: u64,
}

/// `s_0, ..., s_depth` with their split over the critical points.
pub fn crossing_counts(f: &MultimodalMap, depth: usize) -> Result<Vec<CrossingCount>> {
    let sets = critical_preimages(f, depth)?;
    Ok(sets
        .iter()
        .map(|set| {
            let mut per_critical = vec![0u64; f.modality()];
            for &(_, i) in &set.points {
                per_critical[i] += 1;
            }
            CrossingCount {
                n: set.order,
                total: per_critical.iter().sum(),
                per_critical,
            }
        })
        .collect())
}

/// Extremum and lap counts of the iterates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremaLedger {
    /// `e_0, ..., e_depth`: interior local extrema of `f^n`.
    pub extrema: Vec<u64>,
    /// `ℓ_n = e_n + 1`.
    pub laps: Vec<u64>,
}

/// `e_0 = 0` and `e_{n+1} = e_n + s_n`, for `n < depth`.
pub fn extrema_ledger(f: &MultimodalMap, depth: usize) -> Result<ExtremaLedger> {
    let counts = if depth == 0 {
        Vec::new()
    } else {
        crossing_counts(f, depth - 1)?
    };
    let mut extrema = vec![0u64];
    for c in &counts {
        extrema.push(extrema.last().unwrap() + c.total);
    }
    let laps = extrema.iter().map(|e| e + 1).collect();
    Ok(ExtremaLedger { extrema, laps })
}

/// `(1/depth) log ℓ_depth`; bounded by `log(l + 1)`.
pub fn entropy_multimodal(f: &MultimodalMap, depth: usize) -> Result<f64> {
    if depth == 0 {
        return Err(Error::InvalidArgument("entropy depth must be at least 1".into()));
    }
    let ledger = extrema_ledger(f, depth)?;
    Ok((*ledger.laps.last().unwrap() as f64).ln() / depth as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    fn flipped(self) -> Self {
        match self {
            Extremum::Max => Extremum::Min,
            Extremum::Min => Extremum::Max,
        }
    }
}

impl fmt::Display for Extremum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extremum::Max => "max",
            Extremum::Min => "min",
        })
    }
}

/// Type of the extremum of `f^n` at `x`, read off the orbit of `x`.
///
/// Let `m < n` be the first step with `f^m(x) = c_i`. Then `f^{m+1}` has at
/// `x` the extremum `f` has at `c_i` (a maximum for odd `i` in positive
/// shape), and each later step through a decreasing lap swaps max and min.
pub fn classify_extremum(f: &MultimodalMap, n: usize, x: f64) -> Result<Extremum> {
    if n == 0 {
        return Err(Error::InvalidArgument("f^0 has no extrema".into()));
    }
    let mut y = x;
    let mut hit = None;
    for m in 0..n {
        if let Some(i) = f.critical_near(y) {
            hit = Some((m, i));
            break;
        }
        y = f.eval(y);
    }
    let (m, i) = hit.ok_or_else(|| {
        Error::InvalidArgument(format!("x = {x} is not an extremum of f^{n}: its orbit misses every critical point"))
    })?;
    // c_i is the right end of lap i + 1 (1-based).
    let mut label = if f.increasing_on(i + 1) {
        Extremum::Max
    } else {
        Extremum::Min
    };
    let mut y = f.eval(f.criticals[i]);
    for step in m + 1..n {
        if let Some(k) = f.critical_near(y) {
            return Err(Error::AmbiguousExtremum {
                x,
                step,
                critical: f.criticals[k],
            });
        }
        if !f.increasing_on(f.lap_of(y)) {
            label = label.flipped();
        }
        y = f.eval(y);
    }
    Ok(label)
}

/// The cubic `9.375 x³ − 15.46875 x² + 6.75 x + 0.1` on `[0, 1]`, with
/// turning points `0.3` (maximum, value `0.9859375`) and `0.8` (minimum,
/// value `0.4`).
pub fn bimodal_demo() -> MultimodalMap {
    MultimodalMap::from_polynomial(vec![0.1, 6.75, -15.46875, 9.375], 0.0, 1.0, vec![0.3, 0.8])
        .expect("the demo cubic is a valid bimodal map")
}

/// Parses a map description:
///
/// ```text
/// # comment
/// interval 0 1
/// critical 0.3 0.8
/// poly 0.1 6.75 -15.46875 9.375
/// ```
///
/// Coefficients are ascending. Each keyword must appear exactly once.
pub fn parse_map(src: &str) -> Result<MultimodalMap> {
    let mut interval = None;
    let mut criticals = None;
    let mut poly = None;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let key = words.next().unwrap();
        let nums = words
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|_| Error::InvalidMap(format!("line {}: {w:?} is not a number", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        let slot = match key {
            "interval" => {
                if nums.len() != 2 {
                    return Err(Error::InvalidMap(format!("line {}: interval takes two numbers", lineno + 1)));
                }
                &mut interval
            }
            "critical" => &mut criticals,
            "poly" => &mut poly,
            other => {
                return Err(Error::InvalidMap(format!("line {}: unknown keyword {other:?}", lineno + 1)));
            }
        };
        if slot.replace(nums).is_some() {
            return Err(Error::InvalidMap(format!("line {}: duplicate {key:?}", lineno + 1)));
        }
    }
    let missing = |k: &str| Error::InvalidMap(format!("missing {k:?} line"));
    let interval = interval.ok_or_else(|| missing("interval"))?;
    let criticals = criticals.ok_or_else(|| missing("critical"))?;
    let poly = poly.ok_or_else(|| missing("poly"))?;
    MultimodalMap::from_polynomial(poly, interval[0], interval[1], criticals)
}
