//! General solver for opening `ell` boxes.
//!
//! Think of box `j` as a container of width `1/v_j` and height `v_j`, so that
//! pouring `p_j` units of water into it raises the water to `v_j * p_j`. For a
//! level `E`, the maximal `E`-nice pseudo-distribution fills the first `t + 1`
//! containers to height `E`, then walks right saturating each container (to
//! height `E`, or full when it is shorter than `E`) until the budget of `ell`
//! units runs out. The last partially filled container takes the leftover.
//!
//! An optimal pseudo-distribution is maximal `E`-nice for some
//! `E in [0, E_max]`, and the value of the maximal `E`-nice distribution is
//! piecewise linear in `E` with at most `2n` pieces. [`sweep`] walks the
//! breakpoints from `E_max` downward in linear time, updating the value by
//! the slope of each piece instead of re-evaluating it.
//!
//! All indices here are zero-based; `k` and `i` in [`Breakpoint`] are counts
//! of boxes.

use crate::error::{Error, Result};
use crate::model::{value_of_marginals, Instance, Marginals, SelectedSet};
use crate::numeric::{min_of, Scalar};

/// One vertex of the piecewise-linear value curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoint<T> {
    /// Water level `E`.
    pub level: T,
    /// Value of the maximal `E`-nice pseudo-distribution.
    pub value: T,
    /// Number of boxes with `v_j >= E` (always at least `t + 1`).
    pub k: usize,
    /// Number of saturated containers; container `i` (zero-based) holds the
    /// leftover water when `i < n`.
    pub i: usize,
}

/// Optimal marginals together with the level and breakpoint that produced
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub marginals: Marginals<T>,
    pub value: T,
    pub breakpoint: Breakpoint<T>,
}

impl<T: Scalar> Solution<T> {
    pub fn level(&self) -> &T {
        &self.breakpoint.level
    }
}

/// Running prefix sum `sum_{m < pos} 1/v_m` that only moves forward, so
/// monotone positions can share `values` without a stored array. The sum
/// one step back stays available.
struct PrefixCursor<'a, T> {
    values: &'a [T],
    pos: usize,
    sum: T,
    prev: T,
}

impl<'a, T: Scalar> PrefixCursor<'a, T> {
    fn new(values: &'a [T]) -> Self {
        PrefixCursor {
            values,
            pos: 0,
            sum: T::zero(),
            prev: T::zero(),
        }
    }

    fn at(&mut self, j: usize) -> T {
        debug_assert!(j + 1 >= self.pos && j <= self.values.len());
        if j + 1 == self.pos {
            return self.prev.clone();
        }
        while self.pos < j {
            let next = self.sum.clone() + T::one() / self.values[self.pos].clone();
            self.prev = std::mem::replace(&mut self.sum, next);
            self.pos += 1;
        }
        self.sum.clone()
    }
}

/// Largest feasible level: `min(v_t, ell / sum_{j <= t} 1/v_j)` (zero-based
/// `v_t` is the `(t+1)`-th largest value).
pub fn e_max<T: Scalar>(inst: &Instance<T>) -> T {
    let t = inst.t();
    let reciprocals: T = inst.values()[..=t].iter().map(|v| T::one() / v.clone()).sum();
    min_of(inst.value(t).clone(), T::from_usize(inst.ell()) / reciprocals)
}

fn check_level<T: Scalar>(inst: &Instance<T>, level: &T) -> Result<()> {
    let max = e_max(inst);
    if *level < T::zero() || !level.approx_le(&max) {
        return Err(Error::LevelOutOfRange {
            level: level.to_string(),
            max: max.to_string(),
        });
    }
    Ok(())
}

/// Walks the maximal `level`-nice pseudo-distribution, handing each nonzero
/// coordinate to `put`; returns the saturated count.
fn fill_with<T: Scalar>(inst: &Instance<T>, level: &T, mut put: impl FnMut(usize, T)) -> usize {
    let one = T::one();
    let mut budget = T::from_usize(inst.ell());
    for (j, v) in inst.values().iter().enumerate() {
        let need = if level >= v {
            one.clone()
        } else {
            level.clone() / v.clone()
        };
        // The first t + 1 containers always reach the level; `level <= E_max`
        // guarantees the budget covers them.
        if j > inst.t() && need > budget.clone() + T::guard() {
            if budget > T::zero() {
                put(j, budget);
            }
            return j;
        }
        budget = budget - need.clone();
        put(j, need);
    }
    inst.n()
}

/// The maximal `level`-nice pseudo-distribution and its saturated count.
fn fill<T: Scalar>(inst: &Instance<T>, level: &T) -> (Vec<T>, usize) {
    let mut p = vec![T::zero(); inst.n()];
    let saturated = fill_with(inst, level, |j, x| p[j] = x);
    (p, saturated)
}

/// Value of the maximal `level`-nice pseudo-distribution without building
/// it: the first `t + 1` boxes sit exactly at `level` and no box is above
/// it, so the adversary removes `t * level`.
fn nice_value<T: Scalar>(inst: &Instance<T>, level: &T) -> T {
    let mut total = T::zero();
    fill_with(inst, level, |j, x| total = total.clone() + inst.value(j).clone() * x);
    total - T::from_usize(inst.t()) * level.clone()
}

/// Maximal `level`-nice pseudo-distribution, for `0 <= level <= e_max(inst)`.
pub fn maximal_nice<T: Scalar>(inst: &Instance<T>, level: &T) -> Result<Marginals<T>> {
    check_level(inst, level)?;
    Ok(Marginals::from_vec_unchecked(fill(inst, level).0))
}

/// Sweep position: level `E`, boundary count `k` and saturated count `i`
/// with the water held by container `i`.
struct SweepState<'a, T> {
    values: &'a [T],
    // Prefix sums queried at i or i + 1, and at k.
    rs_i: PrefixCursor<'a, T>,
    rs_k: PrefixCursor<'a, T>,
    t: usize,
    ell: T,
    level: T,
    k: usize,
    i: usize,
    leftover: T,
}

impl<'a, T: Scalar> SweepState<'a, T> {
    fn n(&self) -> usize {
        self.values.len()
    }

    fn advance_k(&mut self) {
        while self.k < self.n() && self.values[self.k] >= self.level {
            self.k += 1;
        }
    }

    /// Recomputes `i` and the leftover for the current level. `i` only grows
    /// as the level drops, so the scan resumes from its previous position.
    fn resaturate(&mut self) {
        let n = self.n();
        let ell_slack = self.ell.clone() + T::guard();
        while self.i < self.k && self.i < n && self.level.clone() * self.rs_i.at(self.i + 1) <= ell_slack {
            self.i += 1;
        }
        if self.i < self.k {
            let used = self.level.clone() * self.rs_i.at(self.i);
            self.leftover = clamp_nonneg(self.ell.clone() - used);
            return;
        }
        // Past the level region every further container needs one full unit,
        // so the number of extra saturated containers is a floor.
        let remaining = clamp_nonneg(self.ell.clone() - self.level.clone() * self.rs_k.at(self.k));
        let (whole, frac) = remaining.split_floor();
        let i = self.k.saturating_add(whole).min(n);
        self.i = self.i.max(i);
        self.leftover = if self.i == i { frac } else { T::zero() };
        if self.i >= n {
            self.i = n;
            self.leftover = T::zero();
        }
    }

    /// Boxes currently sitting exactly at the water level.
    fn at_level(&self) -> usize {
        self.i.min(self.k)
    }

    /// Rate at which the value changes per unit decrease of the level.
    fn slope(&mut self) -> T {
        let a = self.at_level();
        // The `a` containers at the level each drop; container `i` receives
        // the water they release.
        let rs_a = if self.i <= self.k {
            self.rs_i.at(a)
        } else {
            self.rs_k.at(a)
        };
        self.values[self.i].clone() * rs_a - T::from_usize(a - self.t)
    }
}

fn clamp_nonneg<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        T::zero()
    } else {
        x
    }
}

/// Breakpoints of the value curve from `E_max` down to the first one at
/// which every container is saturated. Below that point the value can only
/// decrease, so the maximum is among the returned breakpoints.
pub fn sweep<T: Scalar>(inst: &Instance<T>) -> Vec<Breakpoint<T>> {
    let mut out = Vec::new();
    walk_breakpoints(inst, |bp| out.push(bp));
    out
}

/// Feeds each breakpoint to `visit` in order of strictly decreasing level.
fn walk_breakpoints<T: Scalar>(inst: &Instance<T>, mut visit: impl FnMut(Breakpoint<T>)) {
    let n = inst.n();
    let start = e_max(inst);
    let initial_value = nice_value(inst, &start);
    let mut state = SweepState {
        values: inst.values(),
        rs_i: PrefixCursor::new(inst.values()),
        rs_k: PrefixCursor::new(inst.values()),
        t: inst.t(),
        ell: T::from_usize(inst.ell()),
        level: start,
        k: inst.t() + 1,
        i: inst.t() + 1,
        leftover: T::zero(),
    };
    state.advance_k();
    state.resaturate();

    let mut value = initial_value;
    let mut current = Breakpoint {
        level: state.level.clone(),
        value: value.clone(),
        k: state.k,
        i: state.i,
    };
    while state.i < n {
        let i = state.i;
        let k = state.k;
        // Distance to the next box dropping below the level; the boundary
        // v_n := -1 is replaced by the level itself since it never goes negative.
        let until_k = if k < n {
            state.level.clone() - state.values[k].clone()
        } else {
            state.level.clone()
        };
        // Distance until container i becomes saturated.
        let until_i = if i < k {
            let target = state.level.clone() / state.values[i].clone();
            clamp_nonneg(target - state.leftover.clone()) / state.rs_i.at(i + 1)
        } else {
            clamp_nonneg(T::one() - state.leftover.clone()) / state.rs_k.at(k)
        };
        let k_event = until_k <= until_i;
        let i_event = until_i <= until_k;
        let step = min_of(until_k, until_i);
        let moved = step > T::zero();

        if moved {
            value = value + step.clone() * state.slope();
            state.level = if k_event && k < n {
                state.values[k].clone()
            } else {
                clamp_nonneg(state.level.clone() - step)
            };
        }
        if k_event && state.k < n {
            state.k += 1;
        }
        state.advance_k();
        if i_event {
            state.i = (state.i + 1).min(n);
        }
        state.resaturate();
        if moved {
            let next = Breakpoint {
                level: state.level.clone(),
                value: value.clone(),
                k: state.k,
                i: state.i,
            };
            visit(std::mem::replace(&mut current, next));
        } else {
            // Zero-length piece: same level, only the indices advance.
            current.k = state.k;
            current.i = state.i;
        }
    }
    visit(current);
}

/// Optimal marginals: the maximal nice pseudo-distribution at the best
/// breakpoint (ties toward the larger level). The returned value is
/// re-evaluated from the marginals.
pub fn solve<T: Scalar>(inst: &Instance<T>) -> Solution<T> {
    let mut best: Option<Breakpoint<T>> = None;
    walk_breakpoints(inst, |bp| {
        if best.as_ref().is_none_or(|b| bp.value > b.value) {
            best = Some(bp);
        }
    });
    let breakpoint = best.expect("sweep emits at least one breakpoint");
    let marginals = Marginals::from_vec_unchecked(fill(inst, &breakpoint.level).0);
    let value = value_of_marginals(&marginals, inst);
    Solution {
        marginals,
        value,
        breakpoint,
    }
}

/// Best deterministic choice: open the `ell` most valuable boxes; the
/// adversary empties the top `min(t, ell)` of them.
pub fn deterministic_baseline<T: Scalar>(inst: &Instance<T>) -> (SelectedSet, T) {
    let set = SelectedSet::from_sorted_unchecked((0..inst.ell()).collect());
    let value = if inst.t() < inst.ell() {
        inst.values()[inst.t()..inst.ell()].iter().cloned().sum()
    } else {
        T::zero()
    };
    (set, value)
}
