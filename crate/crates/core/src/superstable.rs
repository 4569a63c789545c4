//! Superstable cycles: parameters where the critical point `0` is periodic.
//!
//! A cycle of period `p` is written by the signs of its points after the
//! critical value: `(+, σ2, ..., σ_{p-1}, C)`, where `x_1 = t > 0` and `C`
//! marks the return to `0`. Unwinding `t - x_k² = x_{k+1}` from `x_p = 0`
//! shows that the parameter solves
//!
//! ```text
//! t = φ_{+, -σ2, ..., -σ_{p-1}}(t)
//! ```
//!
//! i.e. it is where the branch crosses the bisector. The solver runs the
//! fixed-point loop `t ← φ(t)` from `t = 2` and falls back to bisection.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bisect::{bisect_partial, Side};
use crate::branch::{branch_value, is_regular, Sign, Signature};
use crate::error::{Error, Result};

/// Minimal distance from `0` of the intermediate cycle points.
pub const REG_TOL: f64 = 1e-7;

/// Largest period handled by enumeration and the audits.
pub const MAX_PERIOD: usize = 16;

/// Base residual bound for a solved cycle.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Base residual bound used by [`verify_cycle`].
pub const VERIFY_TOL: f64 = 1e-9;

const LOOP_STEP_TOL: f64 = 1e-13;
const LOOP_MAX_ITER: usize = 10_000;
const SCAN_STEP: f64 = 1e-4;
const BISECT_TOL: f64 = 1e-15;

/// Symbolic form of a superstable cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicCycle {
    /// `σ1, ..., σ_{p-1}`; empty for the fixed point `C`.
    signs: Vec<Sign>,
}

impl SymbolicCycle {
    /// Cycle `(+, σ2, ..., σ_{p-1}, C)` from its inner signs.
    pub fn from_inner(inner: &[Sign]) -> Self {
        let mut signs = Vec::with_capacity(inner.len() + 1);
        signs.push(Sign::Plus);
        signs.extend_from_slice(inner);
        SymbolicCycle { signs }
    }

    /// The period-1 cycle `C` (`t = 0`).
    pub fn fixed() -> Self {
        SymbolicCycle { signs: Vec::new() }
    }

    pub fn period(&self) -> usize {
        self.signs.len() + 1
    }

    /// `σ1, ..., σ_{p-1}`.
    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// `(+, -σ2, ..., -σ_{p-1})`, whose bisector crossing is the parameter.
    /// `None` for `C`.
    pub fn bisector_branch(&self) -> Option<Signature> {
        let (first, rest) = self.signs.split_first()?;
        let mut v = vec![*first];
        v.extend(rest.iter().map(|s| s.flip()));
        Some(Signature::new(v).expect("non-empty"))
    }
}

impl FromStr for SymbolicCycle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidCycle(s.to_string());
        let body = s.strip_suffix('C').ok_or_else(bad)?;
        let signs = body
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        if signs.first().is_some_and(|&s| s != Sign::Plus) {
            return Err(bad());
        }
        Ok(SymbolicCycle { signs })
    }
}

impl fmt::Display for SymbolicCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.as_char())?;
        }
        f.write_str("C")
    }
}

/// A cycle together with its parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedCycle {
    pub cycle: SymbolicCycle,
    pub t0: f64,
    /// `x_1, ..., x_p` with `x_1 = t0` and `x_p ≈ 0`.
    pub orbit: Vec<f64>,
    /// `|q_{t0}^p(0)|`.
    pub residual: f64,
}

impl SolvedCycle {
    pub fn period(&self) -> usize {
        self.cycle.period()
    }

    /// The cycle as a set of points: `0, x_1, ..., x_{p-1}`.
    pub fn cycle_points(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        pts.extend_from_slice(&self.orbit[..self.orbit.len() - 1]);
        pts
    }

    /// `∏ q_t'(x)` over the cycle; zero because `0` is on it.
    pub fn multiplier(&self) -> f64 {
        self.cycle_points().iter().map(|&x| -2.0 * x).product()
    }
}

/// Outcome of solving one symbolic pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum CycleSolution {
    Solved(SolvedCycle),
    /// No parameter realizes the pattern with prime period `p`.
    NotAdmissible,
    /// A candidate whose orbit comes within [`REG_TOL`] of `0` early but not
    /// clearly back to it.
    Ambiguous { t: f64, step: usize },
}

impl CycleSolution {
    pub fn solved(self) -> Option<SolvedCycle> {
        match self {
            CycleSolution::Solved(c) => Some(c),
            _ => None,
        }
    }
}

/// `q_t^p(0)` and `d/dt q_t^p(0)`.
fn critical_orbit_with_slope(t: f64, p: usize) -> (Vec<f64>, f64) {
    let mut orbit = Vec::with_capacity(p);
    let (mut x, mut dx) = (0.0f64, 0.0f64);
    for _ in 0..p {
        dx = 1.0 - 2.0 * x * dx;
        x = t - x * x;
        orbit.push(x);
    }
    (orbit, dx)
}

/// Residual floor: rounding `t` alone moves `q_t^p(0)` by about
/// `ε |t| |dP_p/dt|`, which dwarfs the base tolerance near `t = 2`.
fn residual_bound(base: f64, t: f64, slope: f64) -> f64 {
    base.max(8.0 * f64::EPSILON * t.abs() * slope.abs())
}

enum Check {
    Ok(SolvedCycle),
    Reject,
    Ambiguous(usize),
}

/// Newton steps on `t ↦ q_t^p(0)`, kept only while the residual shrinks.
/// The fixed-point loop stalls when its contraction is weak.
fn polish(t: f64, p: usize) -> f64 {
    let mut best = t;
    let (orbit, mut slope) = critical_orbit_with_slope(t, p);
    let mut res = orbit[p - 1];
    for _ in 0..4 {
        if res == 0.0 || slope == 0.0 {
            break;
        }
        let next = best - res / slope;
        if !(0.0..=2.0).contains(&next) {
            break;
        }
        let (orbit, s) = critical_orbit_with_slope(next, p);
        if orbit[p - 1].abs() >= res.abs() {
            break;
        }
        best = next;
        res = orbit[p - 1];
        slope = s;
    }
    best
}

fn check_candidate(cycle: &SymbolicCycle, t: f64) -> Check {
    let p = cycle.period();
    let t = polish(t, p);
    let (orbit, slope) = critical_orbit_with_slope(t, p);
    let residual = orbit[p - 1].abs();
    if residual > residual_bound(RESIDUAL_TOL, t, slope) {
        return Check::Reject;
    }
    for (k, (&x, &s)) in orbit.iter().zip(cycle.signs()).enumerate() {
        if x.abs() <= REG_TOL {
            // An early exact return means a shorter period.
            return if x.abs() <= residual_bound(RESIDUAL_TOL, t, slope) {
                Check::Reject
            } else {
                Check::Ambiguous(k + 1)
            };
        }
        if (x > 0.0) != (s == Sign::Plus) {
            return Check::Reject;
        }
    }
    Check::Ok(SolvedCycle {
        cycle: cycle.clone(),
        t0: t,
        orbit,
        residual,
    })
}

/// The fixed-point loop `t ← φ(t)` from `t = 2`.
pub fn solve_by_loop(cycle: &SymbolicCycle) -> Option<f64> {
    let branch = cycle.bisector_branch()?;
    let signs = branch.signs();
    let mut t = 2.0;
    for _ in 0..LOOP_MAX_ITER {
        let next = branch_value(signs, t)?;
        if (next - t).abs() < LOOP_STEP_TOL {
            return Some(next);
        }
        t = next;
    }
    None
}

/// All roots of `φ(t) - t` bracketed by a scan of the branch's regular set.
pub fn solve_by_bisection(cycle: &SymbolicCycle) -> Vec<f64> {
    let Some(branch) = cycle.bisector_branch() else {
        return vec![0.0];
    };
    let signs = branch.signs();
    let g = |t: f64| -> Option<f64> { is_regular(signs, t).then(|| branch_value(signs, t).unwrap() - t) };
    let steps = (2.0 / SCAN_STEP).round() as usize;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let t = if i == steps { 2.0 } else { i as f64 * SCAN_STEP };
        let Some(v) = g(t) else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            roots.push(t);
        } else if let Some((tp, vp)) = prev {
            if vp != 0.0 && vp.signum() != v.signum() {
                if let Some(r) = bisect_partial(g, tp, t, BISECT_TOL, Side::Lo) {
                    roots.push(r);
                }
            }
        }
        prev = Some((t, v));
    }
    roots
}

/// Solves one pattern; returns the parameter if it is admissible.
pub fn solve_cycle(cycle: &SymbolicCycle) -> CycleSolution {
    if cycle.period() == 1 {
        return CycleSolution::Solved(SolvedCycle {
            cycle: cycle.clone(),
            t0: 0.0,
            orbit: vec![0.0],
            residual: 0.0,
        });
    }
    let mut ambiguous = None;
    let mut consider = |t: f64| match check_candidate(cycle, t) {
        Check::Ok(c) => Some(c),
        Check::Ambiguous(step) => {
            ambiguous.get_or_insert((t, step));
            None
        }
        Check::Reject => None,
    };
    if let Some(c) = solve_by_loop(cycle).and_then(&mut consider) {
        return CycleSolution::Solved(c);
    }
    for t in solve_by_bisection(cycle) {
        if let Some(c) = consider(t) {
            return CycleSolution::Solved(c);
        }
    }
    match ambiguous {
        Some((t, step)) => CycleSolution::Ambiguous { t, step },
        None => CycleSolution::NotAdmissible,
    }
}

fn check_period(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    if p > MAX_PERIOD {
        return Err(Error::TooLarge {
            what: "period",
            requested: p,
            max: MAX_PERIOD,
        });
    }
    Ok(())
}

/// Every pattern of period `p`: `C`, `+C`, or `+ σ2..σ_{p-1} C`.
pub fn patterns(p: usize) -> Vec<SymbolicCycle> {
    match p {
        0 => Vec::new(),
        1 => vec![SymbolicCycle::fixed()],
        _ => (0u64..1 << (p - 2))
            .map(|bits| {
                let inner: Vec<Sign> = (0..p - 2)
                    .map(|i| if bits >> (p - 3 - i) & 1 == 1 { Sign::Minus } else { Sign::Plus })
                    .collect();
                SymbolicCycle::from_inner(&inner)
            })
            .collect(),
    }
}

/// Admissible cycles of prime period `p`, sorted by parameter.
pub fn enumerate_cycles(p: usize) -> Result<Vec<SolvedCycle>> {
    check_period(p)?;
    let mut found: Vec<SolvedCycle> = patterns(p)
        .into_par_iter()
        .filter_map(|c| solve_cycle(&c).solved())
        .collect();
    found.sort_by(|a, b| a.t0.total_cmp(&b.t0));
    Ok(found)
}

/// Reads the cycle off the critical orbit at `t`.
///
/// Accepts iff `|q_t^p(0)| ≤ 1e-9` (or the rounding floor) and every earlier
/// orbit point stays farther than [`REG_TOL`] from `0`. The error names the
/// offending step.
pub fn verify_cycle(t: f64, p: usize) -> Result<SymbolicCycle> {
    if p == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let (orbit, slope) = critical_orbit_with_slope(t, p);
    for (k, &x) in orbit[..p - 1].iter().enumerate() {
        if x.abs() <= REG_TOL {
            return Err(Error::InvalidCycle(format!(
                "orbit of 0 at t = {t} returns near 0 at step {} < {p}",
                k + 1
            )));
        }
    }
    if orbit[p - 1].abs() > residual_bound(VERIFY_TOL, t, slope) {
        return Err(Error::InvalidCycle(format!(
            "orbit of 0 at t = {t} misses 0 at step {p} by {}",
            orbit[p - 1].abs()
        )));
    }
    let signs = orbit[..p - 1]
        .iter()
        .map(|&x| if x > 0.0 { Sign::Plus } else { Sign::Minus })
        .collect();
    Ok(SymbolicCycle { signs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub max_period: usize,
    /// `(period, cycle, t)` sorted by `t`.
    pub parameters: Vec<(usize, SymbolicCycle, f64)>,
    /// Adjacent parameters closer than `1e-8`.
    pub collisions: Vec<(SymbolicCycle, SymbolicCycle, f64)>,
    /// Cycles whose loop and bisection solutions differ by more than `1e-10`.
    pub mismatches: Vec<(SymbolicCycle, f64, f64)>,
    /// Cycles the fixed-point loop did not solve on its own.
    pub loop_failures: usize,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty() && self.mismatches.is_empty()
    }
}

/// Solves every period up to `max_p`, checks the parameters are pairwise
/// distinct and that two independent solvers agree.
pub fn uniqueness_audit(max_p: usize) -> Result<UniquenessReport> {
    check_period(max_p)?;
    let mut parameters = Vec::new();
    for p in 1..=max_p {
        for c in enumerate_cycles(p)? {
            parameters.push((p, c.cycle, c.t0));
        }
    }
    parameters.sort_by(|a, b| a.2.total_cmp(&b.2));
    let collisions = parameters
        .windows(2)
        .filter(|w| (w[1].2 - w[0].2).abs() <= 1e-8)
        .map(|w| (w[0].1.clone(), w[1].1.clone(), w[0].2))
        .collect();
    let checks: Vec<(Option<(SymbolicCycle, f64, f64)>, bool)> = parameters
        .par_iter()
        .filter(|(p, _, _)| *p >= 2)
        .map(|(_, cycle, t)| {
            let by_loop = solve_by_loop(cycle).filter(|&s| (s - t).abs() <= 1e-6);
            let by_bisect = solve_by_bisection(cycle)
                .into_iter()
                .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()));
            match (by_loop, by_bisect) {
                (Some(a), Some(b)) if (a - b).abs() > 1e-10 => (Some((cycle.clone(), a, b)), false),
                (Some(_), _) => (None, false),
                (None, _) => (None, true),
            }
        })
        .collect();
    let loop_failures = checks.iter().filter(|c| c.1).count();
    let mismatches = checks.into_iter().filter_map(|c| c.0).collect();
    Ok(UniquenessReport {
        max_period: max_p,
        parameters,
        collisions,
        mismatches,
        loop_failures,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    /// The interleaved chain of periods 2 to 5 with its parameters.
    pub chain: Vec<(SymbolicCycle, f64)>,
    pub chain_increasing: bool,
    /// `(p, t)` for the cycles `+-...-C`, `p = 2..=max_p`.
    pub all_minus: Vec<(usize, f64)>,
    /// Strictly increasing in `p` and below 2.
    pub all_minus_increasing: bool,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.chain_increasing && self.all_minus_increasing
    }
}

/// The low-period cycles in parameter order.
pub const CHAIN: [&str; 7] = ["+C", "+-+C", "+-++C", "+-C", "+--+C", "+--C", "+---C"];

/// Checks the ordering of the low-period parameters and that the cycles
/// `+-...-C` (bisector crossings of the all-plus branches) climb towards 2.
pub fn ordering_check(max_p: usize) -> Result<OrderingReport> {
    check_period(max_p.max(2))?;
    let solve = |c: &SymbolicCycle| -> Result<f64> {
        solve_cycle(c)
            .solved()
            .map(|s| s.t0)
            .ok_or_else(|| Error::InvalidCycle(format!("{c} is not admissible")))
    };
    let chain = CHAIN
        .iter()
        .map(|s| {
            let c: SymbolicCycle = s.parse()?;
            let t = solve(&c)?;
            Ok((c, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let chain_increasing = chain.windows(2).all(|w| w[0].1 < w[1].1);
    let all_minus = (2..=max_p)
        .map(|p| {
            let c = SymbolicCycle::from_inner(&vec![Sign::Minus; p - 2]);
            Ok((p, solve(&c)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let all_minus_increasing =
        all_minus.windows(2).all(|w| w[0].1 < w[1].1) && all_minus.iter().all(|&(_, t)| t < 2.0);
    Ok(OrderingReport {
        chain,
        chain_increasing,
        all_minus,
        all_minus_increasing,
    })
}
