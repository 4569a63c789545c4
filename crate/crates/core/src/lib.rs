//! Root branches, transverse-intersection counts and topological entropy of
//! the real quadratic family `q_t(x) = t - x²`, `0 <= t <= 2`.
//!
//! The zeros of `q_t^n` are nested radicals
//! `φ_σ(t) = σ1 sqrt(t + σ2 sqrt(t + ... + σn sqrt(t)))`, one per sign
//! sequence `σ`. Each is a simple zero on a half-interval `(t_σ, 2]`, so the
//! number `s_n(t)` of simple zeros is a nondecreasing staircase in `t`, and so
//! is the entropy `h(q_t) = lim (1/n) log(1 + s_0 + ... + s_{n-1})`.
//!
//! ```
//! use qel::{entropy, QuadParam, Signature};
//!
//! let t = QuadParam::new(1.5)?;
//! assert_eq!(entropy::s_sequence(t, 3)?, vec![1, 2, 4, 6]);
//!
//! let sigma: Signature = "+-+".parse()?;
//! let bp = qel::branch::branching_point(&sigma)?;
//! assert!((bp.t_sigma - 1.7549).abs() < 1e-4);
//! # Ok::<(), qel::Error>(())
//! ```
//!
//! Modules:
//!
//! - [`quad`]: the map, orbits, fixed points, invariant interval.
//! - [`poly`]: exact integer coefficients of `P_n(t) = q_t^n(0)`.
//! - [`branch`]: root branches, their ordering and branching points.
//! - [`entropy`]: the preimage tree, `s_n(t)`, staircases and entropy.
//! - [`multimodal`]: the same counting for general piecewise monotone maps.
//! - [`superstable`]: parameters with a periodic critical orbit.
//! - [`misiurewicz`]: parameters with a preperiodic critical orbit.

pub mod bisect;
pub mod branch;
pub mod entropy;
pub mod error;
pub mod misiurewicz;
pub mod multimodal;
pub mod poly;
pub mod quad;
pub mod superstable;

pub use branch::{BranchEval, BranchingPoint, Sign, Signature};
pub use entropy::{EntropyEstimate, PreimageLevel, StaircaseSample};
pub use error::{Error, Result};
pub use misiurewicz::MisiurewiczPoint;
pub use multimodal::MultimodalMap;
pub use poly::CriticalPolynomial;
pub use quad::{InvariantInterval, QuadParam};
pub use superstable::{SolvedCycle, SymbolicCycle};

/// The guide's code blocks, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quadratic.md")]
    mod quadratic {}
    #[doc = include_str!("../../../book/src/branches.md")]
    mod branches {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/multimodal.md")]
    mod multimodal {}
    #[doc = include_str!("../../../book/src/superstable.md")]
    mod superstable {}
    #[doc = include_str!("../../../book/src/misiurewicz.md")]
    mod misiurewicz {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
