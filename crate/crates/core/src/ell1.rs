//! Closed-form solver for opening a single box.
//!
//! With `ell = 1` an optimal distribution spreads its mass over a prefix of
//! boxes `0..i` so that every box in the prefix has the same expected value
//! `v_j * p_j`, i.e. `p` is proportional to the reciprocals `1/v_j` on the
//! prefix. The prefix has at least `t + 1` boxes and its value is
//! `(i - t) / sum_{j < i} 1/v_j`; the solver scans all admissible prefixes.

use crate::error::{Error, Result};
use crate::model::{Instance, Marginals};
use crate::numeric::Scalar;

/// The equal-level distribution on a prefix of length `prefix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ell1Candidate<T> {
    /// Number of boxes carrying mass, `t + 1 <= prefix <= n`.
    pub prefix: usize,
    pub marginals: Marginals<T>,
    pub value: T,
}

fn require_single<T: Scalar>(inst: &Instance<T>) -> Result<()> {
    if inst.ell() != 1 {
        return Err(Error::UnsupportedEll { ell: inst.ell() });
    }
    Ok(())
}

fn build<T: Scalar>(inst: &Instance<T>, prefix: usize, reciprocal_sum: T) -> Ell1Candidate<T> {
    let level = T::one() / reciprocal_sum;
    let mut p = vec![T::zero(); inst.n()];
    for (pj, v) in p.iter_mut().zip(inst.values()).take(prefix) {
        *pj = level.clone() / v.clone();
    }
    if !T::EXACT {
        // Make the mass sum to one despite rounding in the divisions above.
        let total: T = p.iter().cloned().sum();
        for pj in p.iter_mut().take(prefix) {
            *pj = pj.clone() / total.clone();
        }
    }
    Ell1Candidate {
        prefix,
        marginals: Marginals::from_vec_unchecked(p),
        value: T::from_usize(prefix - inst.t()) * level,
    }
}

/// The candidate supported on the first `prefix` boxes.
pub fn candidate<T: Scalar>(inst: &Instance<T>, prefix: usize) -> Result<Ell1Candidate<T>> {
    require_single(inst)?;
    let (lo, hi) = (inst.t() + 1, inst.n());
    if prefix < lo || prefix > hi {
        return Err(Error::InvalidPrefix { i: prefix, lo, hi });
    }
    let reciprocal_sum: T = inst.values()[..prefix].iter().map(|v| T::one() / v.clone()).sum();
    Ok(build(inst, prefix, reciprocal_sum))
}

/// Best candidate over all admissible prefixes, found in one pass over the
/// running reciprocal sums. Ties go to the shorter prefix.
pub fn solve_ell1<T: Scalar>(inst: &Instance<T>) -> Result<Ell1Candidate<T>> {
    require_single(inst)?;
    let t = inst.t();
    let mut reciprocal_sum = T::zero();
    let mut best: Option<(usize, T, T)> = None;
    for (j, v) in inst.values().iter().enumerate() {
        reciprocal_sum = reciprocal_sum + T::one() / v.clone();
        let prefix = j + 1;
        if prefix <= t {
            continue;
        }
        let value = T::from_usize(prefix - t) / reciprocal_sum.clone();
        if best.as_ref().is_none_or(|(_, best_value, _)| value > *best_value) {
            best = Some((prefix, value, reciprocal_sum.clone()));
        }
    }
    // Instance validation guarantees t + 1 <= n, so some prefix qualifies.
    let (prefix, _, reciprocal_sum) = best.expect("t < n");
    Ok(build(inst, prefix, reciprocal_sum))
}
