//! Optimal box selection when some boxes are secretly empty.
//!
//! `n` boxes advertise values `v_1 >= ... >= v_n`; exactly `t` of them are
//! empty and an adversary who knows the selection strategy (but not its coin
//! flips) decides which. The selector opens `ell` boxes and wants the best
//! worst-case expected payoff. Deterministic choices are weak (the adversary
//! just empties the best opened boxes), so the crate computes optimal
//! randomized strategies:
//!
//! * [`ell1`]: closed form for opening one box.
//! * [`waterfill`]: linear-time breakpoint sweep for any `ell`.
//! * [`rounding`]: sampling and explicit decomposition into sets of `ell`
//!   boxes with the optimal marginals.
//! * [`oracle`]: brute-force and game-theoretic cross-checks.
//!
//! Everything is generic over [`Scalar`], so the same code runs on `f64`
//! and on exact [`Rational`] numbers.
//!
//! ```
//! use byzsel::{normalize, waterfill};
//!
//! let inst = normalize(&[8.0, 7.0, 5.0, 4.0], 1, 1).unwrap();
//! let best = waterfill::solve(&inst);
//! assert!((best.value - 560.0 / 131.0).abs() < 1e-12);
//! ```

pub mod ell1;
pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod rounding;
pub mod waterfill;

pub use error::{Error, Result};
pub use model::{
    adversary_best_response, normalize, payoff, value_of_marginals, AdversaryResponse, Instance, Marginals,
    NormalizationReport, SelectedSet,
};
pub use numeric::{Rational, Scalar};
