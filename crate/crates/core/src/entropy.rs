//! Transverse-intersection counts `s_n(t)` and the topological entropy of `q_t`.
//!
//! `s_n(t)` is the number of simple zeros of `q_t^n`, which equals the number
//! of preimages of the critical point `0` of minimal order `n`. Those preimages
//! form a binary tree: level 0 is `{0}` and every point `z` of level `k` has
//! the two children `±sqrt(t - z)` when `t - z > 0`. A vanishing radicand is a
//! tangential hit (a multiple zero) and contributes nothing. The entropy
//! follows from the lap-number recursion `ℓ_{n+1} = ℓ_n + s_n`:
//!
//! ```text
//! h(q_t) = lim (1/n) log(1 + s_0 + ... + s_{n-1})
//! ```
//!
//! The finite-`n` estimate converges from below, slowly (`O(log n / n)`).

use rayon::prelude::*;

use crate::bisect::{bisect, bisect_predicate};
use crate::branch::TOL_ZERO;
use crate::error::{Error, Result};
use crate::quad::{invariant_interval, QuadParam};

/// Deepest preimage level that may be built (`2^24` points).
pub const MAX_DEPTH: usize = 24;

/// Default depth for entropy estimates.
pub const DEFAULT_ENTROPY_DEPTH: usize = 20;

/// Width of refined jump brackets in [`staircase`].
pub const JUMP_TOL: f64 = 1e-9;

/// Levels above this size are expanded in parallel.
const PAR_THRESHOLD: usize = 1 << 14;

/// Minimal-order-`depth` preimages of `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreimageLevel {
    pub depth: usize,
    pub points: Vec<f64>,
    /// Radicands of the previous level that fell in `[-tol, tol]`.
    pub tangential_hits: usize,
}

impl PreimageLevel {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::TooLarge {
            what: "preimage depth",
            requested: depth,
            max: MAX_DEPTH,
        });
    }
    Ok(())
}

/// Streams the levels of the preimage tree; at most two levels are alive.
#[derive(Debug, Clone)]
pub struct PreimageLevels {
    t: f64,
    current: Option<PreimageLevel>,
    remaining: usize,
}

impl PreimageLevels {
    pub fn new(t: QuadParam, depth: usize) -> Result<Self> {
        check_depth(depth)?;
        Ok(PreimageLevels {
            t: t.get(),
            current: None,
            remaining: depth + 1,
        })
    }
}

impl Iterator for PreimageLevels {
    type Item = PreimageLevel;

    fn next(&mut self) -> Option<PreimageLevel> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let next = match &self.current {
            None => PreimageLevel {
                depth: 0,
                points: vec![0.0],
                tangential_hits: 0,
            },
            Some(level) => expand(self.t, level),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

fn expand(t: f64, level: &PreimageLevel) -> PreimageLevel {
    let children = |z: &f64| -> ([f64; 2], usize, bool) {
        let r = t - z;
        if r > TOL_ZERO {
            let s = r.sqrt();
            ([s, -s], 2, false)
        } else {
            ([0.0; 2], 0, r >= -TOL_ZERO)
        }
    };
    let (points, tangential_hits) = if level.points.len() >= PAR_THRESHOLD {
        let parts: Vec<(Vec<f64>, usize)> = level
            .points
            .par_chunks(PAR_THRESHOLD)
            .map(|chunk| collect_children(chunk, &children))
            .collect();
        let total = parts.iter().map(|(p, _)| p.len()).sum();
        let mut points = Vec::with_capacity(total);
        let mut hits = 0;
        for (p, h) in parts {
            points.extend(p);
            hits += h;
        }
        (points, hits)
    } else {
        collect_children(&level.points, &children)
    };
    PreimageLevel {
        depth: level.depth + 1,
        points,
        tangential_hits,
    }
}

fn collect_children<F>(zs: &[f64], children: &F) -> (Vec<f64>, usize)
where
    F: Fn(&f64) -> ([f64; 2], usize, bool),
{
    let mut out = Vec::with_capacity(2 * zs.len());
    let mut hits = 0;
    for z in zs {
        let (pair, n, tangent) = children(z);
        out.extend_from_slice(&pair[..n]);
        hits += usize::from(tangent);
    }
    (out, hits)
}

/// Levels `0..=depth` of the preimage tree.
pub fn preimage_levels(t: QuadParam, depth: usize) -> Result<Vec<PreimageLevel>> {
    Ok(PreimageLevels::new(t, depth)?.collect())
}

/// `(s_0, ..., s_depth)` with `s_0 = 1`.
pub fn s_sequence(t: QuadParam, depth: usize) -> Result<Vec<u64>> {
    Ok(PreimageLevels::new(t, depth)?.map(|l| l.len() as u64).collect())
}

/// `s_n(t)` alone.
pub fn s_count(t: QuadParam, n: usize) -> Result<u64> {
    Ok(*s_sequence(t, n)?.last().expect("depth + 1 levels"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub t: f64,
    pub depth: usize,
    /// `(s_0, ..., s_{depth-1})`.
    pub s_seq: Vec<u64>,
    /// `(1/depth) log(1 + Σ s_k)`, natural log.
    pub h: f64,
}

impl EntropyEstimate {
    /// Lap numbers `ℓ_0, ..., ℓ_depth` via `ℓ_{n+1} = ℓ_n + s_n`, `ℓ_0 = 1`.
    pub fn lap_numbers(&self) -> Vec<u64> {
        lap_numbers(&self.s_seq)
    }
}

pub fn lap_numbers(s_seq: &[u64]) -> Vec<u64> {
    let mut laps = Vec::with_capacity(s_seq.len() + 1);
    let mut l = 1u64;
    laps.push(l);
    for &s in s_seq {
        l += s;
        laps.push(l);
    }
    laps
}

/// `(1/n) log(1 + Σ_{k<n} s_k)`.
pub fn entropy_from_counts(s_seq: &[u64]) -> f64 {
    let n = s_seq.len();
    assert!(n > 0, "need at least s_0");
    let total: u64 = 1 + s_seq.iter().sum::<u64>();
    (total as f64).ln() / n as f64
}

pub fn entropy_estimate(t: QuadParam, depth: usize) -> Result<EntropyEstimate> {
    if depth == 0 {
        return Err(Error::InvalidArgument("entropy depth must be at least 1".into()));
    }
    let mut s_seq = s_sequence(t, depth - 1)?;
    s_seq.truncate(depth);
    let h = entropy_from_counts(&s_seq);
    Ok(EntropyEstimate {
        t: t.get(),
        depth,
        s_seq,
        h,
    })
}

/// Aitken Δ² extrapolation of the estimates at depths `depth-2..=depth`.
/// Falls back to the plain estimate when the differences degenerate.
pub fn entropy_aitken(t: QuadParam, depth: usize) -> Result<f64> {
    if depth < 3 {
        return Err(Error::InvalidArgument("Aitken extrapolation needs depth >= 3".into()));
    }
    let s = s_sequence(t, depth - 1)?;
    let h = |n: usize| entropy_from_counts(&s[..n]);
    let (a, b, c) = (h(depth - 2), h(depth - 1), h(depth));
    let denom = c - 2.0 * b + a;
    if denom.abs() < 1e-15 {
        return Ok(c);
    }
    Ok((c - (c - b) * (c - b) / denom).clamp(0.0, std::f64::consts::LN_2))
}

/// A discontinuity of `s_n` located between two grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    /// Midpoint of the refined bracket.
    pub t: f64,
    /// Bracket `[lo, hi]`, `hi - lo <= JUMP_TOL`.
    pub bracket: (f64, f64),
    pub before: u64,
    pub after: u64,
}

impl Jump {
    pub fn increment(&self) -> i64 {
        self.after as i64 - self.before as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseSample {
    pub n: usize,
    pub grid: Vec<f64>,
    pub values: Vec<u64>,
    pub jumps: Vec<Jump>,
}

/// `s_n` on `steps + 1` equally spaced parameters and its refined jumps.
pub fn staircase(n: usize, t_lo: QuadParam, t_hi: QuadParam, steps: usize) -> Result<StaircaseSample> {
    staircase_with(n, t_lo, t_hi, steps, true)
}

pub fn staircase_with(
    n: usize,
    t_lo: QuadParam,
    t_hi: QuadParam,
    steps: usize,
    refine: bool,
) -> Result<StaircaseSample> {
    check_depth(n)?;
    if steps < 2 {
        return Err(Error::InvalidArgument("staircase needs at least 2 steps".into()));
    }
    if t_lo.get() >= t_hi.get() {
        return Err(Error::InvalidArgument("staircase needs t_lo < t_hi".into()));
    }
    let grid = crate::bisect::linspace(t_lo.get(), t_hi.get(), steps);
    let count = |t: f64| s_count(QuadParam::saturating(t), n).expect("depth checked");
    let values: Vec<u64> = grid.par_iter().map(|&t| count(t)).collect();
    let jumps = grid
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] != v[1])
        .map(|(g, v)| {
            let (lo, hi) = if refine {
                bisect_predicate(|t| count(t) == v[0], g[0], g[1], JUMP_TOL)
            } else {
                (g[0], g[1])
            };
            Jump {
                t: 0.5 * (lo + hi),
                bracket: (lo, hi),
                before: v[0],
                after: v[1],
            }
        })
        .collect();
    Ok(StaircaseSample { n, grid, values, jumps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub n: usize,
    pub t_left: f64,
    pub t_right: f64,
    pub s_left: u64,
    pub s_right: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub depth: usize,
    pub violations: Vec<Violation>,
    /// Entropy estimate at `depth` for every grid point.
    pub entropy: Vec<f64>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty() && self.entropy.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Checks `s_n(t_i) <= s_n(t_{i+1})` for all `1 <= n <= depth` along an
/// ascending grid.
pub fn monotonicity_audit(depth: usize, grid: &[f64]) -> Result<MonotonicityReport> {
    check_depth(depth)?;
    if depth == 0 {
        return Err(Error::InvalidArgument("audit depth must be at least 1".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("audit grid must be strictly ascending".into()));
    }
    let params = grid
        .iter()
        .map(|&t| QuadParam::new(t))
        .collect::<Result<Vec<_>>>()?;
    let seqs: Vec<Vec<u64>> = params
        .par_iter()
        .map(|&t| s_sequence(t, depth))
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    for (i, pair) in seqs.windows(2).enumerate() {
        for n in 1..=depth {
            if pair[0][n] > pair[1][n] {
                violations.push(Violation {
                    n,
                    t_left: grid[i],
                    t_right: grid[i + 1],
                    s_left: pair[0][n],
                    s_right: pair[1][n],
                });
            }
        }
    }
    let entropy = seqs.iter().map(|s| entropy_from_counts(&s[..depth])).collect();
    Ok(MonotonicityReport {
        depth,
        violations,
        entropy,
    })
}

/// Outcome of the dense-grid zero count.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceCount {
    /// Simple zeros of `q_t^n` in the open invariant interval.
    pub simple: u64,
    /// Zeros rejected because their orbit passes near `0` before step `n`.
    pub multiple: u64,
    /// Grid cells that held two zeros (found through an interior extremum).
    pub crowded_cells: u64,
}

/// Orbit distance from `0` below which a zero is classified as multiple.
pub const TOL_ORBIT: f64 = 1e-6;

/// Counts simple zeros of `x ↦ q_t^n(x)` by sign changes on a uniform grid
/// of the open invariant interval, independent of the preimage tree.
///
/// Cells whose endpoints agree in sign but whose derivative changes sign are
/// searched for a hidden pair of zeros; every such pair is counted and logged
/// as a warning because it means the grid is too coarse.
pub fn brute_force_zero_count(t: QuadParam, n: usize, grid_points: usize) -> Result<BruteForceCount> {
    if n == 0 || n > 12 {
        return Err(Error::InvalidArgument(format!("brute force needs 1 <= n <= 12, got {n}")));
    }
    if grid_points < 100_000 {
        return Err(Error::InvalidArgument(format!(
            "brute force needs at least 1e5 grid points, got {grid_points}"
        )));
    }
    let tv = t.get();
    let iv = invariant_interval(t);
    let h = iv.width() / grid_points as f64;
    let xs = |i: usize| iv.lo + h * (i as f64 + 0.5);
    let value = |x: f64| (0..n).fold(x, |y, _| tv - y * y);
    let slope = |x: f64| {
        let mut y = x;
        let mut d = 1.0;
        for _ in 0..n {
            d *= -2.0 * y;
            y = tv - y * y;
        }
        d
    };
    let simple = |x: f64| {
        let mut y = x;
        for _ in 0..n {
            if y.abs() < TOL_ORBIT {
                return false;
            }
            y = tv - y * y;
        }
        true
    };

    let cells = grid_points - 1;
    let chunk = 1 << 14;
    let partial: Vec<(u64, u64, u64)> = (0..cells.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let (mut simple_n, mut multiple_n, mut crowded) = (0, 0, 0);
            let mut classify = |x: f64| {
                if simple(x) {
                    simple_n += 1;
                } else {
                    multiple_n += 1;
                }
            };
            let start = c * chunk;
            let end = (start + chunk).min(cells);
            let mut a = xs(start);
            let mut fa = value(a);
            let mut da = slope(a);
            for i in start..end {
                let b = xs(i + 1);
                let fb = value(b);
                let db = slope(b);
                if fa == 0.0 {
                    classify(a);
                } else if fb != 0.0 && fa.signum() != fb.signum() {
                    if let Some(r) = bisect(value, a, b, 1e-15) {
                        classify(r);
                    }
                } else if fb != 0.0 && da.signum() != db.signum() {
                    // An extremum inside the cell may hide two zeros.
                    if let Some(e) = bisect(slope, a, b, 1e-15) {
                        let fe = value(e);
                        if fe.signum() != fa.signum() && fe != 0.0 {
                            crowded += 1;
                            log::warn!("two zeros of q_t^{n} in one grid cell near x = {e} (t = {tv})");
                            for (lo, hi) in [(a, e), (e, b)] {
                                if let Some(r) = bisect(value, lo, hi, 1e-15) {
                                    classify(r);
                                }
                            }
                        }
                    }
                }
                a = b;
                fa = fb;
                da = db;
            }
            if end == cells && fa == 0.0 {
                classify(a);
            }
            (simple_n, multiple_n, crowded)
        })
        .collect();
    let (simple, multiple, crowded_cells) = partial
        .into_iter()
        .fold((0, 0, 0), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
    Ok(BruteForceCount {
        simple,
        multiple,
        crowded_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64) -> QuadParam {
        QuadParam::new(t).unwrap()
    }

    fn sizes(t: f64, depth: usize) -> Vec<usize> {
        preimage_levels(p(t), depth).unwrap().iter().map(|l| l.len()).collect()
    }

    #[test]
    fn level_sizes() {
        assert_eq!(sizes(2.0, 4), vec![1, 2, 4, 8, 16]);
        assert_eq!(sizes(0.0, 3), vec![1, 0, 0, 0]);
        let levels = preimage_levels(p(0.0), 3).unwrap();
        assert_eq!(levels[1].tangential_hits, 1);
        assert_eq!(sizes(1.2, 4)[4], 8);
    }

    #[test]
    fn depth_limit() {
        assert!(matches!(preimage_levels(p(1.0), 25), Err(Error::TooLarge { .. })));
        assert!(s_sequence(p(1.0), 24).is_ok());
    }

    #[test]
    fn parallel_expansion_matches_serial() {
        // Level 15 at t = 2 has 32768 points, above the parallel threshold.
        let levels = preimage_levels(p(2.0), 15).unwrap();
        let last = &levels[15];
        let serial = collect_children(&levels[14].points, &|z: &f64| {
            let r = 2.0 - z;
            let s = r.sqrt();
            ([s, -s], 2, false)
        });
        assert_eq!(last.points, serial.0);
    }

    #[test]
    fn count_examples() {
        assert_eq!(s_sequence(p(0.5), 3).unwrap(), vec![1, 2, 2, 2]);
        assert_eq!(s_sequence(p(1.5), 3).unwrap(), vec![1, 2, 4, 6]);
        assert_eq!(s_sequence(p(2.0), 5).unwrap(), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(s_count(p(1.0), 2).unwrap(), 2);
    }

    #[test]
    fn entropy_anchors() {
        let e = entropy_estimate(p(2.0), 20).unwrap();
        assert!((e.h - std::f64::consts::LN_2).abs() <= 1e-12);
        assert_eq!(e.s_seq.len(), 20);
        assert_eq!(*e.lap_numbers().last().unwrap(), 1 << 20);

        let e = entropy_estimate(p(0.0), 20).unwrap();
        assert!((e.h - std::f64::consts::LN_2 / 20.0).abs() <= 1e-15);

        assert!(entropy_estimate(p(1.0), 0).is_err());
    }

    #[test]
    fn aitken_stays_in_range() {
        let h = entropy_aitken(p(1.9), 14).unwrap();
        assert!((0.0..=std::f64::consts::LN_2).contains(&h));
        assert!(entropy_aitken(p(1.9), 2).is_err());
    }

    #[test]
    fn staircase_small_orders() {
        let s = staircase(1, p(0.0), p(2.0), 100).unwrap();
        assert_eq!(s.jumps.len(), 1);
        assert!(s.jumps[0].t < 1e-9);
        assert_eq!(s.jumps[0].increment(), 2);
        assert!(s.values[1..].iter().all(|&v| v == 2));

        let s = staircase(2, p(0.0), p(2.0), 200).unwrap();
        let incs: Vec<i64> = s.jumps.iter().map(Jump::increment).collect();
        assert_eq!(incs, vec![2, 2]);
        assert!((s.jumps[1].t - 1.0).abs() < 1e-9);

        assert!(staircase(2, p(1.0), p(1.0), 10).is_err());
        assert!(staircase(2, p(0.0), p(1.0), 1).is_err());
    }

    #[test]
    fn audit_examples() {
        let grid = crate::bisect::linspace(0.0, 2.0, 499);
        let r = monotonicity_audit(12, &grid).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.is_monotone());
        let r = monotonicity_audit(1, &[0.1, 0.7, 1.9]).unwrap();
        assert!(r.violations.is_empty());
        let grid = crate::bisect::linspace(1.39, 1.41, 40);
        let r = monotonicity_audit(16, &grid).unwrap();
        assert!(r.is_monotone());
        assert!(monotonicity_audit(3, &[0.5, 0.2]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_zero_count(p(2.0), 4, 1_000_000).unwrap().simple, 16);
        let c = brute_force_zero_count(p(1.0), 2, 1_000_000).unwrap();
        assert_eq!(c.simple, 2);
        assert_eq!(brute_force_zero_count(p(0.5), 3, 1_000_000).unwrap().simple, 2);
        assert!(brute_force_zero_count(p(0.5), 3, 1000).is_err());
        assert!(brute_force_zero_count(p(0.5), 13, 1_000_000).is_err());
    }
}
