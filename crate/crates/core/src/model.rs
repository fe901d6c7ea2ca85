//! Problem instances, pseudo-distributions and the adversary's best response.
//!
//! Boxes are indexed from zero in non-increasing value order. [`Instance`]
//! keeps the permutation back to the caller's original order so results can
//! be reported in the layout they were given.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// What [`normalize`] changed about the raw input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalizationReport {
    pub original_len: usize,
    /// Original positions of zero-valued boxes that were dropped.
    pub dropped_zeros: Vec<usize>,
}

/// A validated instance: `n` positive values sorted non-increasingly, `t`
/// empty boxes and `ell` boxes to open.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    values: Vec<T>,
    t: usize,
    ell: usize,
    perm: Vec<usize>,
    report: NormalizationReport,
}

impl<T: Scalar> Instance<T> {
    /// Builds an instance from values that are already positive and sorted.
    pub fn from_sorted(values: Vec<T>, t: usize, ell: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, v) in values.iter().enumerate() {
            check_finite(index, v)?;
            if *v <= T::zero() {
                return Err(Error::InvalidValue {
                    index,
                    value: v.to_string(),
                });
            }
        }
        if let Some(index) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::Unsorted { index: index + 1 });
        }
        check_thresholds(values.len(), t, ell)?;
        let n = values.len();
        Ok(Self {
            values,
            t,
            ell,
            perm: (0..n).collect(),
            report: NormalizationReport {
                original_len: n,
                dropped_zeros: Vec::new(),
            },
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `perm[i]` is the original position of sorted box `i`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn report(&self) -> &NormalizationReport {
        &self.report
    }

    /// Scatters per-box quantities back into the original input layout;
    /// dropped zero-valued boxes receive `fill`.
    pub fn to_original<U: Clone>(&self, sorted: &[U], fill: U) -> Vec<U> {
        let mut out = vec![fill; self.report.original_len];
        for (i, x) in sorted.iter().enumerate() {
            out[self.perm[i]] = x.clone();
        }
        out
    }

    /// Original positions of a set of sorted indices, in increasing order.
    pub fn indices_to_original(&self, indices: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = indices.iter().map(|&i| self.perm[i]).collect();
        out.sort_unstable();
        out
    }

    /// Same instance with every value multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &T) -> Self {
        Self {
            values: self.values.iter().map(|v| v.clone() * factor.clone()).collect(),
            ..self.clone()
        }
    }

    pub fn with_thresholds(&self, t: usize, ell: usize) -> Result<Self> {
        check_thresholds(self.n(), t, ell)?;
        Ok(Self { t, ell, ..self.clone() })
    }
}

fn check_finite<T: Scalar>(index: usize, v: &T) -> Result<()> {
    if !T::EXACT && !v.to_f64().is_finite() {
        return Err(Error::InvalidValue {
            index,
            value: v.to_string(),
        });
    }
    Ok(())
}

fn check_thresholds(n: usize, t: usize, ell: usize) -> Result<()> {
    if t >= n || ell < 1 || ell >= n {
        return Err(Error::InvalidThresholds { n, t, ell });
    }
    Ok(())
}

/// Validates raw box values, drops zeros and sorts the rest non-increasingly
/// (stable, so equal values keep their original relative order).
pub fn normalize<T: Scalar>(raw_values: &[T], t: usize, ell: usize) -> Result<Instance<T>> {
    if raw_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut kept = Vec::with_capacity(raw_values.len());
    let mut dropped_zeros = Vec::new();
    for (index, v) in raw_values.iter().enumerate() {
        check_finite(index, v)?;
        // NaN compares as None and is rejected too.
        if !matches!(v.partial_cmp(&T::zero()), Some(Ordering::Greater | Ordering::Equal)) {
            return Err(Error::InvalidValue {
                index,
                value: v.to_string(),
            });
        }
        if v.is_zero() {
            dropped_zeros.push(index);
        } else {
            kept.push(index);
        }
    }
    kept.sort_by(|&a, &b| raw_values[b].partial_cmp(&raw_values[a]).unwrap_or(Ordering::Equal));
    check_thresholds(kept.len(), t, ell)?;
    Ok(Instance {
        values: kept.iter().map(|&i| raw_values[i].clone()).collect(),
        t,
        ell,
        perm: kept,
        report: NormalizationReport {
            original_len: raw_values.len(),
            dropped_zeros,
        },
    })
}

/// Per-box selection probabilities in `[0, 1]` summing to at most `ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals<T> {
    p: Vec<T>,
}

impl<T: Scalar> Marginals<T> {
    /// Validates `p` against `inst`: right length, entries in `[0, 1]` and
    /// total at most `ell` (up to tolerance in float mode).
    pub fn new(p: Vec<T>, inst: &Instance<T>) -> Result<Self> {
        validate_pseudo(&p, inst.n(), inst.ell())?;
        Ok(Self { p })
    }

    /// Validates marginals given in the caller's original layout (including
    /// dropped zero-valued boxes) and reorders them to sorted order.
    pub fn from_original(p: &[T], inst: &Instance<T>) -> Result<Self> {
        validate_pseudo(p, inst.report().original_len, inst.ell())?;
        let sorted = inst.perm().iter().map(|&orig| p[orig].clone()).collect();
        Ok(Self { p: sorted })
    }

    pub(crate) fn from_vec_unchecked(p: Vec<T>) -> Self {
        Self { p }
    }

    pub fn zeros(n: usize) -> Self {
        Self { p: vec![T::zero(); n] }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<T> {
        self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn get(&self, i: usize) -> &T {
        &self.p[i]
    }

    pub fn sum(&self) -> T {
        self.p.iter().cloned().sum()
    }

    /// Water levels `v_i * p_i`.
    pub fn levels(&self, inst: &Instance<T>) -> Vec<T> {
        self.p
            .iter()
            .zip(inst.values())
            .map(|(p, v)| p.clone() * v.clone())
            .collect()
    }
}

fn validate_pseudo<T: Scalar>(p: &[T], n: usize, ell: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::LengthMismatch {
            got: p.len(),
            expected: n,
        });
    }
    let one = T::one();
    for (index, x) in p.iter().enumerate() {
        let finite = T::EXACT || x.to_f64().is_finite();
        let in_range = *x >= T::zero() && *x <= one;
        // Float marginals produced by the solver may overshoot 1 by rounding.
        let near_one = !T::EXACT && x.approx_eq(&one);
        if !finite || !(in_range || near_one) {
            return Err(Error::MarginalOutOfRange {
                index,
                value: x.to_string(),
            });
        }
    }
    let sum: T = p.iter().cloned().sum();
    if !sum.approx_le(&T::from_usize(ell)) {
        return Err(Error::MarginalsExceedBudget {
            sum: sum.to_string(),
            ell,
        });
    }
    Ok(())
}

/// Exactly `ell` distinct box indices, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SelectedSet {
    indices: Vec<usize>,
}

impl SelectedSet {
    pub fn new<T: Scalar>(mut indices: Vec<usize>, inst: &Instance<T>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != inst.ell() || indices.iter().any(|&i| i >= inst.n()) {
            return Err(Error::InvalidThresholds {
                n: inst.n(),
                t: inst.t(),
                ell: indices.len(),
            });
        }
        Ok(Self { indices })
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// The adversary's choice of empty boxes and the expected payoff it leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryResponse<T> {
    pub byz_set: Vec<usize>,
    pub inflicted_value: T,
}

/// Total value of the opened boxes that are not empty.
pub fn payoff<T: Scalar>(s: &SelectedSet, byzantine: &[usize], inst: &Instance<T>) -> T {
    s.indices()
        .iter()
        .filter(|i| !byzantine.contains(i))
        .fold(T::zero(), |acc, &i| acc + inst.value(i).clone())
}

/// Indices of the `t` largest entries, ties toward the smaller index, in
/// increasing index order. Linear time.
fn top_indices<T: Scalar>(xs: &[T], t: usize) -> Vec<usize> {
    if t == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    if t < xs.len() {
        order.select_nth_unstable_by(t - 1, |&a, &b| {
            xs[b].partial_cmp(&xs[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
        });
        order.truncate(t);
    }
    order.sort_unstable();
    order
}

/// Worst-case expected payoff of `p`: the total of `v_i * p_i` minus its `t`
/// largest terms.
pub fn value_of_marginals<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> T {
    let mut levels = p.levels(inst);
    let total: T = levels.iter().cloned().sum();
    let t = inst.t();
    if t == 0 {
        return total;
    }
    // Selecting on the values themselves keeps memory access sequential.
    if t < levels.len() {
        levels.select_nth_unstable_by(t - 1, |a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    }
    let removed: T = levels.iter().take(t).cloned().sum();
    total - removed
}

/// The adversary empties the `t` boxes with the largest expected
/// contribution `v_i * p_i`.
pub fn adversary_best_response<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> AdversaryResponse<T> {
    let levels = p.levels(inst);
    let byz_set = top_indices(&levels, inst.t());
    let total: T = levels.iter().cloned().sum();
    let removed: T = byz_set.iter().map(|&i| levels[i].clone()).sum();
    AdversaryResponse {
        byz_set,
        inflicted_value: total - removed,
    }
}
