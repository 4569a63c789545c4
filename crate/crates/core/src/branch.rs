//! Root branches of `q_t^n(x) = 0`.
//!
//! A signature `σ = (σ1, ..., σn)` picks one of the `2^n` nested radicals
//!
//! ```text
//! φ_σ(t) = σ1 sqrt(t + σ2 sqrt(t + ... + σn sqrt(t)))
//! ```
//!
//! which solve `q_t^n(φ_σ(t)) = 0`. A branch is *defined* at `t` when every
//! radicand is non-negative and *regular* when every radicand (the innermost
//! one being `t` itself) is strictly positive; regular points are exactly the
//! parameters where `φ_σ(t)` is a simple root. The regular set of every branch
//! is a half-interval `(t_σ, 2]` whose left end, the branching point `t_σ`, is
//! where some suffix branch `φ_(σ_{k+1}..σ_n)` vanishes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::bisect::{bisect_partial, bisect_predicate, linspace, Side};
use crate::error::{Error, Result};
use crate::quad::QuadParam;

/// Radicands within this band of zero are clamped to zero and make the
/// evaluation singular.
pub const TOL_ZERO: f64 = 1e-12;

/// Grid step for suffix-zero scans.
pub const DEFAULT_GRID_STEP: f64 = 1e-4;

/// Largest rank accepted by [`branching_point`].
pub const MAX_BRANCHING_RANK: usize = 20;

/// Bisection tolerance for suffix zeros.
const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// Product of two signs.
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A non-empty sign sequence indexing a root branch, `σ1` first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(Vec<Sign>);

impl Signature {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidSignature(String::new()));
        }
        Ok(Signature(signs))
    }

    /// `(+, +, ..., +)` of the given rank.
    pub fn all_plus(rank: usize) -> Result<Self> {
        Signature::new(vec![Sign::Plus; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// `(σ_{k+1}, ..., σ_n)`; `None` when `k >= rank`.
    pub fn suffix(&self, k: usize) -> Option<Signature> {
        (k < self.rank()).then(|| Signature(self.0[k..].to_vec()))
    }

    /// Same signature with `σ1` flipped.
    pub fn mirrored(&self) -> Signature {
        let mut s = self.0.clone();
        s[0] = s[0].flip();
        Signature(s)
    }

    /// `(s, σ1, ..., σn)`.
    pub fn prepend(&self, s: Sign) -> Signature {
        let mut v = Vec::with_capacity(self.rank() + 1);
        v.push(s);
        v.extend_from_slice(&self.0);
        Signature(v)
    }

    /// All `2^rank` signatures of a rank, in binary order with `+` as 0.
    pub fn enumerate(rank: usize) -> impl Iterator<Item = Signature> {
        assert!((1..64).contains(&rank));
        (0u64..1 << rank).map(move |bits| Signature::from_bits(bits, rank))
    }

    /// Bit `rank - 1 - i` of `bits` set means `σ_{i+1} = -`.
    pub fn from_bits(bits: u64, rank: usize) -> Signature {
        Signature(
            (0..rank)
                .map(|i| {
                    if bits >> (rank - 1 - i) & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                })
                .collect(),
        )
    }
}

impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::InvalidSignature(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Signature::new(signs).map_err(|_| Error::InvalidSignature(s.to_string()))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

/// Result of evaluating a root branch at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEval {
    pub value: Option<f64>,
    pub defined: bool,
    pub regular: bool,
    /// Length of the shortest suffix `φ_(σ_{k+1}..σ_n)` that vanishes at `t`,
    /// if any (`1` means `t = 0`).
    pub first_vanishing_suffix: Option<usize>,
}

/// Evaluates `φ_σ(t)` from the innermost radical outwards.
pub fn eval_branch(sigma: &Signature, t: QuadParam) -> BranchEval {
    let t = t.get();
    let signs = sigma.signs();
    let n = signs.len();
    let mut vanishing = None;
    let mut regular = true;

    let mut radicand = t;
    if radicand <= TOL_ZERO {
        radicand = 0.0;
        regular = false;
        vanishing = Some(1);
    }
    let mut v = signs[n - 1].value() * radicand.sqrt();
    for (depth, s) in signs[..n - 1].iter().rev().enumerate() {
        let mut r = t + v;
        if r < -TOL_ZERO {
            return BranchEval {
                value: None,
                defined: false,
                regular: false,
                first_vanishing_suffix: vanishing,
            };
        }
        if r <= TOL_ZERO {
            r = 0.0;
            regular = false;
            vanishing.get_or_insert(depth + 2);
        }
        v = s.value() * r.sqrt();
    }
    BranchEval {
        value: Some(v),
        defined: true,
        regular,
        first_vanishing_suffix: vanishing,
    }
}

/// Value of `φ_σ(t)` when defined, for hot loops over raw signs.
#[inline]
pub fn branch_value(signs: &[Sign], t: f64) -> Option<f64> {
    let mut v = 0.0;
    let mut first = true;
    for s in signs.iter().rev() {
        let r = if first { t } else { t + v };
        first = false;
        let r = if r < -TOL_ZERO {
            return None;
        } else if r <= TOL_ZERO {
            0.0
        } else {
            r
        };
        v = s.value() * r.sqrt();
    }
    Some(v)
}

/// True iff every radicand of `φ_σ(t)` exceeds [`TOL_ZERO`].
#[inline]
pub fn is_regular(signs: &[Sign], t: f64) -> bool {
    if t <= TOL_ZERO {
        return false;
    }
    let mut v = 0.0;
    let mut first = true;
    for s in signs.iter().rev() {
        let r = if first { t } else { t + v };
        first = false;
        if r <= TOL_ZERO {
            return false;
        }
        v = s.value() * r.sqrt();
    }
    true
}

/// The branch at `t = 2`: nested radical and trigonometric closed form.
pub fn branch_at_two(sigma: &Signature) -> (f64, f64) {
    let radical = branch_value(sigma.signs(), 2.0).expect("every branch is defined at t = 2");
    let mut sum = 0.0;
    let mut prod = Sign::Plus;
    let mut scale = 1.0;
    for &s in sigma.signs() {
        prod = prod.times(s);
        sum += prod.value() * scale;
        scale *= 0.5;
    }
    (radical, 2.0 * (std::f64::consts::FRAC_PI_4 * sum).sin())
}

/// Position of `φ_σ` relative to `φ_ρ` on their common smoothness domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchOrder {
    Below,
    Above,
}

impl BranchOrder {
    fn reversed(self) -> Self {
        match self {
            BranchOrder::Below => BranchOrder::Above,
            BranchOrder::Above => BranchOrder::Below,
        }
    }
}

/// Signed lexicographical order of root branches.
pub fn compare_signatures(sigma: &Signature, rho: &Signature) -> Result<BranchOrder> {
    if sigma.rank() < rho.rank() {
        return compare_signatures(rho, sigma).map(BranchOrder::reversed);
    }
    if sigma == rho {
        return Err(Error::IdenticalSignatures(sigma.to_string()));
    }
    let (s, r) = (sigma.signs(), rho.signs());
    // First index where the signatures differ, or the rank of the shorter.
    let k = s.iter().zip(r).take_while(|(a, b)| a == b).count();
    let prod = s[..=k].iter().fold(Sign::Plus, |acc, &x| acc.times(x));
    Ok(match prod {
        Sign::Plus => BranchOrder::Above,
        Sign::Minus => BranchOrder::Below,
    })
}

impl From<BranchOrder> for Ordering {
    fn from(o: BranchOrder) -> Ordering {
        match o {
            BranchOrder::Below => Ordering::Less,
            BranchOrder::Above => Ordering::Greater,
        }
    }
}

/// `(-u, u)` with `u = (1 + sqrt(1 + 4t)) / 2`: the optimal bounds of all
/// root branches, which coincide with the invariant interval.
pub fn envelope(t: QuadParam) -> (f64, f64) {
    let u = 0.5 * (1.0 + (1.0 + 4.0 * t.get()).sqrt());
    (-u, u)
}

/// Zeros of `φ_τ` in `(0, 2]`, found on a grid of the given step.
///
/// `φ_τ(t) = 0` exactly when `g(t) = t + φ_(τ2..)(t)` vanishes, so the scan
/// looks for sign changes of `g`, zeros at the left edge of the definition
/// set of `φ_(τ2..)`, and near-zero dips, then refines each by bisection.
pub fn suffix_zeros(tau: &Signature, grid_step: f64) -> Result<Vec<f64>> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {grid_step} must be in (0, 1]")));
    }
    if tau.rank() == 1 {
        return Ok(Vec::new());
    }
    let inner = &tau.signs()[1..];
    let g = |t: f64| branch_value(inner, t).map(|v| t + v);
    let steps = (2.0 / grid_step).round() as usize;
    let grid = linspace(0.0, 2.0, steps);
    let values: Vec<Option<f64>> = grid.iter().map(|&t| g(t)).collect();

    let mut zeros = Vec::new();
    for i in 0..grid.len() {
        let (t, gi) = (grid[i], values[i]);
        if gi == Some(0.0) {
            zeros.push(t);
        }
        if i + 1 == grid.len() {
            break;
        }
        let (t1, gj) = (grid[i + 1], values[i + 1]);
        match (gi, gj) {
            (Some(a), Some(b)) if a != 0.0 && b != 0.0 && a.signum() != b.signum() => {
                if let Some(z) = bisect_partial(g, t, t1, ZERO_TOL, Side::Hi) {
                    zeros.push(z);
                }
            }
            (None, Some(_)) => {
                // Left edge of the definition set.
                let (_, edge) = bisect_predicate(|s| g(s).is_some(), t, t1, ZERO_TOL);
                if let Some(v) = g(edge) {
                    if v.abs() <= 1e-9 {
                        zeros.push(edge);
                    }
                }
            }
            _ => {}
        }
        // Dips that touch zero without a sign change.
        if i > 0 {
            if let (Some(a), Some(b), Some(c)) = (values[i - 1], gi, values[i + 1]) {
                let same = a.signum() == b.signum() && b.signum() == c.signum();
                if same && b != 0.0 && b.abs() < a.abs() && b.abs() <= c.abs() && b.abs() < 10.0 * grid_step {
                    if let Some(z) = refine_dip(&g, grid[i - 1], grid[i + 1]) {
                        zeros.push(z);
                    }
                }
            }
        }
    }
    zeros.retain(|&z| z > TOL_ZERO && z <= 2.0);
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    Ok(zeros)
}

/// Golden-section minimisation of `|g|`; accepts the minimiser when `|g|`
/// essentially vanishes there.
fn refine_dip<G: Fn(f64) -> Option<f64>>(g: &G, mut lo: f64, mut hi: f64) -> Option<f64> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let abs = |t: f64| g(t).map_or(f64::INFINITY, f64::abs);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (abs(a), abs(b));
    for _ in 0..100 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = abs(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = abs(b);
        }
    }
    let t = 0.5 * (lo + hi);
    (abs(t) <= 1e-10).then_some(t)
}

/// A branching point `t_σ`, the left end of the smoothness domain `(t_σ, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingPoint {
    pub signature: Signature,
    pub t_sigma: f64,
}

/// `t_σ` as the largest zero in `[0, 2)` of any suffix branch of `σ`
/// (including `φ_σ` itself); `0` when no suffix vanishes on `(0, 2)`.
pub fn branching_point(sigma: &Signature) -> Result<BranchingPoint> {
    branching_point_with(sigma, DEFAULT_GRID_STEP, MAX_BRANCHING_RANK)
}

pub fn branching_point_with(sigma: &Signature, grid_step: f64, max_rank: usize) -> Result<BranchingPoint> {
    if sigma.rank() > max_rank {
        return Err(Error::TooLarge {
            what: "signature rank",
            requested: sigma.rank(),
            max: max_rank,
        });
    }
    let mut t_sigma = 0.0f64;
    for k in 0..sigma.rank() {
        let tau = sigma.suffix(k).expect("k < rank");
        for z in suffix_zeros(&tau, grid_step)? {
            if z < 2.0 {
                t_sigma = t_sigma.max(z);
            }
        }
    }
    Ok(BranchingPoint {
        signature: sigma.clone(),
        t_sigma,
    })
}

/// Parameters in `[0, 2)` where `φ_σ` is defined but singular, other than
/// its branching point: candidates are the branching points of proper
/// suffixes, checked pointwise. Not guaranteed exhaustive.
pub fn isolated_points(sigma: &Signature) -> Result<Vec<f64>> {
    let own = branching_point(sigma)?.t_sigma;
    let mut out = vec![0.0];
    for k in 1..sigma.rank() {
        let tau = sigma.suffix(k).expect("k < rank");
        let tb = branching_point(&tau)?.t_sigma;
        let e = eval_branch(sigma, QuadParam::saturating(tb));
        if tb < own - 1e-9 && e.defined && !e.regular {
            out.push(tb);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &str) -> Signature {
        s.parse().unwrap()
    }

    fn p(t: f64) -> QuadParam {
        QuadParam::new(t).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(sig("+-+").to_string(), "+-+");
        assert_eq!(sig("+-+").rank(), 3);
        assert!("".parse::<Signature>().is_err());
        assert!("+x".parse::<Signature>().is_err());
        assert_eq!(Signature::from_bits(0b01, 2), sig("+-"));
        assert_eq!(Signature::enumerate(3).count(), 8);
        assert_eq!(sig("+-").mirrored(), sig("--"));
        assert_eq!(sig("-+").prepend(Sign::Plus), sig("+-+"));
        assert_eq!(sig("+-+").suffix(1), Some(sig("-+")));
        assert_eq!(sig("+-+").suffix(3), None);
    }

    #[test]
    fn evaluation_examples() {
        let e = eval_branch(&sig("+"), p(1.0));
        assert_eq!(e.value, Some(1.0));
        assert!(e.regular);

        let e = eval_branch(&sig("+-"), p(0.5));
        assert!(!e.defined);
        assert_eq!(e.value, None);

        let e = eval_branch(&sig("+-"), p(0.0));
        assert_eq!(e.value, Some(0.0));
        assert!(e.defined && !e.regular);
        assert_eq!(e.first_vanishing_suffix, Some(1));

        let e = eval_branch(&sig("+-+-"), p(1.0));
        assert_eq!(e.value, Some(0.0));
        assert!(e.defined && !e.regular);
        // φ_{+-}(1) = 0 is the first suffix to vanish.
        assert_eq!(e.first_vanishing_suffix, Some(2));
    }

    #[test]
    fn definition_set_of_plus_minus() {
        for i in 1..1000 {
            let t = i as f64 * 1e-3;
            assert!(!eval_branch(&sig("+-"), p(t)).defined, "t={t}");
        }
        for i in 1001..=2000 {
            let t = i as f64 * 1e-3;
            assert!(eval_branch(&sig("+-"), p(t)).regular, "t={t}");
        }
    }

    #[test]
    fn values_at_two() {
        let (r, g) = branch_at_two(&sig("++"));
        assert!((r - (2.0 + 2f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!((g - 2.0 * (3.0 * std::f64::consts::PI / 8.0).sin()).abs() < 1e-15);
        assert!((r - 1.847759).abs() < 1e-6);
        let (r, g) = branch_at_two(&sig("+-"));
        assert!((r - 0.765367).abs() < 1e-6 && (r - g).abs() < 1e-12);
        let (r, g) = branch_at_two(&sig("-"));
        assert_eq!(r, -2f64.sqrt());
        assert!((g + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(compare_signatures(&sig("+"), &sig("-")).unwrap(), BranchOrder::Above);
        assert_eq!(compare_signatures(&sig("+-"), &sig("++")).unwrap(), BranchOrder::Below);
        assert_eq!(compare_signatures(&sig("++"), &sig("+")).unwrap(), BranchOrder::Above);
        assert_eq!(compare_signatures(&sig("+"), &sig("++")).unwrap(), BranchOrder::Below);
        assert_eq!(compare_signatures(&sig("-"), &sig("--")).unwrap(), BranchOrder::Below);
        assert!(matches!(
            compare_signatures(&sig("+-"), &sig("+-")),
            Err(Error::IdenticalSignatures(_))
        ));
    }

    #[test]
    fn envelopes() {
        assert_eq!(envelope(p(2.0)), (-2.0, 2.0));
        assert_eq!(envelope(p(0.0)), (-1.0, 1.0));
        assert_eq!(envelope(p(0.75)), (-1.5, 1.5));
    }

    #[test]
    fn suffix_zero_examples() {
        assert!(suffix_zeros(&sig("-"), DEFAULT_GRID_STEP).unwrap().is_empty());
        let z = suffix_zeros(&sig("+-"), DEFAULT_GRID_STEP).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - 1.0).abs() < 1e-12);
        assert!(suffix_zeros(&sig("-+"), DEFAULT_GRID_STEP).unwrap().is_empty());
        assert!(suffix_zeros(&sig("+-"), 0.0).is_err());
    }

    #[test]
    fn isolated_zero_at_domain_edge_is_found() {
        // φ_{+-+-} vanishes at the isolated point t = 1 and at t ≈ 1.3107.
        let z = suffix_zeros(&sig("+-+-"), DEFAULT_GRID_STEP).unwrap();
        assert_eq!(z.len(), 2, "{z:?}");
        assert!((z[0] - 1.0).abs() < 1e-9);
        assert!((z[1] - 1.3107).abs() < 1e-4);
    }

    #[test]
    fn branching_point_examples() {
        assert_eq!(branching_point(&sig("+++")).unwrap().t_sigma, 0.0);
        assert!((branching_point(&sig("+-")).unwrap().t_sigma - 1.0).abs() < 1e-12);
        assert!((branching_point(&sig("+-+")).unwrap().t_sigma - 1.7549).abs() < 1e-4);
        assert!((branching_point(&sig("+-++")).unwrap().t_sigma - 1.9408).abs() < 1e-4);
        let long = Signature::all_plus(21).unwrap();
        assert!(branching_point(&long).is_err());
    }

    #[test]
    fn isolated_points_of_plus_minus_plus_minus() {
        let pts = isolated_points(&sig("+-+-")).unwrap();
        assert!(pts.iter().any(|&t| (t - 1.0).abs() < 1e-9), "{pts:?}");
        assert_eq!(pts[0], 0.0);
    }
}
