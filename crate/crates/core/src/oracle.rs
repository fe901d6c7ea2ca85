//! Independent verifiers: exhaustive enumeration, an approximate game solver
//! and a dense grid over water levels. None of these share code paths with
//! the solvers they check beyond the instance type and the payoff definition.

use crate::error::{Error, Result};
use crate::model::{payoff, Instance, Marginals, SelectedSet};
use crate::numeric::Scalar;
use crate::waterfill::{e_max, maximal_nice};

/// Largest `n` accepted by [`brute_value`].
pub const DEFAULT_MAX_BRUTE_N: usize = 25;
/// Largest number of `(S, B)` pairs accepted by [`brute_deterministic`].
pub const MAX_DETERMINISTIC_PAIRS: u128 = 10_000_000;
/// Largest row or column count accepted by [`GameMatrix::new`].
pub const MAX_GAME_SIDE: u128 = 10_000;

/// `n choose k`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = match acc.checked_mul((n - j) as u128) {
            Some(x) => x / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic enumeration of the `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let cur = self.current.as_mut().expect("checked above");
        let mut j = k;
        loop {
            if j == 0 {
                self.current = None;
                break;
            }
            j -= 1;
            if cur[j] < self.n - k + j {
                cur[j] += 1;
                for m in j + 1..k {
                    cur[m] = cur[m - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Exact worst case of `p` over every possible set of `t` empty boxes.
pub fn brute_value<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> Result<T> {
    brute_value_limited(p, inst, DEFAULT_MAX_BRUTE_N)
}

pub fn brute_value_limited<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>, max_n: usize) -> Result<T> {
    if inst.n() > max_n {
        return Err(Error::OracleTooLarge {
            what: format!("n = {} exceeds {max_n}", inst.n()),
        });
    }
    let mut best: Option<T> = None;
    for byz in Combinations::new(inst.n(), inst.t()) {
        let mut mask = vec![false; inst.n()];
        for &b in &byz {
            mask[b] = true;
        }
        let expected: T = (0..inst.n())
            .filter(|&i| !mask[i])
            .map(|i| inst.value(i).clone() * p.get(i).clone())
            .sum();
        if best.as_ref().is_none_or(|b| expected < *b) {
            best = Some(expected);
        }
    }
    Ok(best.unwrap_or_else(T::zero))
}

/// `max_S min_B payoff(S, B)` by enumerating every pair.
pub fn brute_deterministic<T: Scalar>(inst: &Instance<T>) -> Result<T> {
    let pairs = binomial(inst.n(), inst.ell()).saturating_mul(binomial(inst.n(), inst.t()));
    if pairs > MAX_DETERMINISTIC_PAIRS {
        return Err(Error::OracleTooLarge {
            what: format!("{pairs} set pairs"),
        });
    }
    let adversary: Vec<Vec<usize>> = Combinations::new(inst.n(), inst.t()).collect();
    let mut best: Option<T> = None;
    for s in Combinations::new(inst.n(), inst.ell()) {
        let s = SelectedSet::new(s, inst)?;
        let worst = adversary
            .iter()
            .map(|b| payoff(&s, b, inst))
            .reduce(|a, b| if b < a { b } else { a })
            .unwrap_or_else(T::zero);
        if best.as_ref().is_none_or(|b| worst > *b) {
            best = Some(worst);
        }
    }
    Ok(best.unwrap_or_else(T::zero))
}

/// The zero-sum game between the selector (rows: all `ell`-sets) and the
/// adversary (columns: all `t`-sets), with entries `payoff(S, B)`.
#[derive(Debug, Clone)]
pub struct GameMatrix {
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
    /// Row-major entries.
    pub entries: Vec<f64>,
}

impl GameMatrix {
    pub fn new<T: Scalar>(inst: &Instance<T>) -> Result<Self> {
        let (r, c) = (binomial(inst.n(), inst.ell()), binomial(inst.n(), inst.t()));
        if r > MAX_GAME_SIDE || c > MAX_GAME_SIDE {
            return Err(Error::OracleTooLarge {
                what: format!("{r} x {c} game matrix"),
            });
        }
        let rows: Vec<Vec<usize>> = Combinations::new(inst.n(), inst.ell()).collect();
        let cols: Vec<Vec<usize>> = Combinations::new(inst.n(), inst.t()).collect();
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for s in &rows {
            let s = SelectedSet::new(s.clone(), inst)?;
            for b in &cols {
                entries.push(payoff(&s, b, inst).to_f64());
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols.len() + col]
    }

    /// Largest entry minus smallest entry.
    pub fn payoff_range(&self) -> f64 {
        let max = self.entries.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.entries.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min).max(0.0)
    }
}

/// Result of multiplicative-weights self-play.
#[derive(Debug, Clone, PartialEq)]
pub struct GameValueEstimate {
    /// Midpoint of the certified interval.
    pub value: f64,
    /// Half-width of the certified interval `[lower, upper]`.
    pub error: f64,
    /// Worst case of the averaged selector strategy: a lower bound on the
    /// game value.
    pub lower: f64,
    /// Best response to the averaged adversary strategy: an upper bound.
    pub upper: f64,
    /// A-priori regret guarantee `range * sqrt(ln(rows) / iterations)`.
    pub regret_bound: f64,
    pub payoff_range: f64,
}

/// Approximates the game value by letting both players run Hedge against
/// each other with step `sqrt(ln(rows) / iterations)` on payoffs scaled to
/// `[0, 1]`. The averaged strategies certify `lower <= value <= upper`.
pub fn mwu_game_value<T: Scalar>(inst: &Instance<T>, iterations: usize) -> Result<GameValueEstimate> {
    let game = GameMatrix::new(inst)?;
    Ok(mwu_on_matrix(&game, iterations.max(1)))
}

pub fn mwu_on_matrix(game: &GameMatrix, iterations: usize) -> GameValueEstimate {
    let (nr, nc) = (game.rows.len(), game.cols.len());
    let range = game.payoff_range();
    let min_entry = game.entries.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = if range > 0.0 { 1.0 / range } else { 0.0 };
    let norm: Vec<f64> = game.entries.iter().map(|x| (x - min_entry) * scale).collect();
    let eta = ((nr.max(2) as f64).ln() / iterations as f64).sqrt();

    // Log-weights keep the exponentials bounded.
    let mut row_logw = vec![0.0f64; nr];
    let mut col_logw = vec![0.0f64; nc];
    let mut row_avg = vec![0.0f64; nr];
    let mut col_avg = vec![0.0f64; nc];
    let mut x = vec![0.0f64; nr];
    let mut y = vec![0.0f64; nc];
    let mut row_gain = vec![0.0f64; nr];
    let mut col_loss = vec![0.0f64; nc];

    for _ in 0..iterations {
        softmax(&row_logw, &mut x);
        softmax(&col_logw, &mut y);
        for (a, xi) in row_avg.iter_mut().zip(&x) {
            *a += xi;
        }
        for (a, yj) in col_avg.iter_mut().zip(&y) {
            *a += yj;
        }
        col_loss.iter_mut().for_each(|l| *l = 0.0);
        for r in 0..nr {
            let line = &norm[r * nc..(r + 1) * nc];
            row_gain[r] = line.iter().zip(&y).map(|(a, yj)| a * yj).sum();
            let xr = x[r];
            if xr > 0.0 {
                for (l, a) in col_loss.iter_mut().zip(line) {
                    *l += xr * a;
                }
            }
        }
        for (w, g) in row_logw.iter_mut().zip(&row_gain) {
            *w += eta * g;
        }
        for (w, l) in col_logw.iter_mut().zip(&col_loss) {
            *w -= eta * l;
        }
    }
    let total = iterations as f64;
    row_avg.iter_mut().for_each(|a| *a /= total);
    col_avg.iter_mut().for_each(|a| *a /= total);

    let lower = (0..nc)
        .map(|c| (0..nr).map(|r| row_avg[r] * game.entry(r, c)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let upper = (0..nr)
        .map(|r| (0..nc).map(|c| col_avg[c] * game.entry(r, c)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    GameValueEstimate {
        value: 0.5 * (lower + upper),
        error: 0.5 * (upper - lower).max(0.0),
        lower,
        upper,
        regret_bound: range * ((nr.max(2) as f64).ln() / total).sqrt(),
        payoff_range: range,
    }
}

fn softmax(logw: &[f64], out: &mut [f64]) {
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, w) in out.iter_mut().zip(logw) {
        *o = (w - max).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
}

/// Largest value of the maximal nice pseudo-distribution over `resolution`
/// evenly spaced levels in `[0, E_max]`.
pub fn grid_check<T: Scalar>(inst: &Instance<T>, resolution: usize) -> Result<T> {
    let resolution = resolution.max(2);
    let top = e_max(inst);
    let steps = T::from_usize(resolution - 1);
    let mut best: Option<T> = None;
    for j in 0..resolution {
        let level = if j == resolution - 1 {
            top.clone()
        } else {
            top.clone() * T::from_usize(j) / steps.clone()
        };
        let p = maximal_nice(inst, &level)?;
        let value = sorted_tail_value(&p, inst);
        if best.as_ref().is_none_or(|b| value > *b) {
            best = Some(value);
        }
    }
    Ok(best.expect("resolution >= 2"))
}

/// Worst-case value by fully sorting the expected contributions. Kept apart
/// from the solver's selection-based evaluation.
pub fn sorted_tail_value<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> T {
    let mut levels = p.levels(inst);
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    levels.into_iter().skip(inst.t()).sum()
}

/// Checks the four conditions for `p` to be `(level, i)`-nice for some
/// `i >= t + 1` (mass at most `ell`, the first `t + 1` containers at the
/// level, a saturated prefix, one unsaturated container after it, then
/// empties). Returns the saturated count `i`.
pub fn nice_index<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>, level: &T) -> std::result::Result<usize, String> {
    let n = inst.n();
    let t = inst.t();
    if !p.sum().approx_le(&T::from_usize(inst.ell())) {
        return Err(format!("mass {} exceeds {}", p.sum(), inst.ell()));
    }
    let saturation = |j: usize| -> T {
        if *level >= *inst.value(j) {
            T::one()
        } else {
            level.clone() / inst.value(j).clone()
        }
    };
    for j in 0..=t {
        let h = p.get(j).clone() * inst.value(j).clone();
        if !h.approx_eq(level) {
            return Err(format!("container {j} is at {h}, not at level {level}"));
        }
    }
    let mut i = t + 1;
    while i < n && p.get(i).approx_eq(&saturation(i)) {
        i += 1;
    }
    // Condition (3) holds by construction of `i`; (4) needs everything past
    // container `i` to be empty.
    if i < n {
        if let Some(j) = (i + 1..n).find(|&j| !p.get(j).approx_eq(&T::zero())) {
            return Err(format!("container {j} is not empty after unsaturated container {i}"));
        }
    }
    Ok(i)
}

/// Checks `v_0 p_0 = ... = v_t p_t >= v_{t+1} p_{t+1} >= ... >= v_{n-1} p_{n-1}`.
pub fn level_chain_holds<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> bool {
    let levels = p.levels(inst);
    let head_equal = levels[..=inst.t()].iter().all(|h| h.approx_eq(&levels[0]));
    let tail_sorted = levels.windows(2).all(|w| w[1].approx_le(&w[0]));
    head_equal && tail_sorted
}
