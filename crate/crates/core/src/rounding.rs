//! Turning marginals into actual selections of `ell` boxes.
//!
//! [`pad_marginals`] tops up a pseudo-distribution to total mass exactly
//! `ell`, [`sample`] draws one set in a single pass with one uniform number
//! (systematic sampling), and [`decompose`] writes the marginals as an
//! explicit mixture of at most `n` sets.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Marginals, SelectedSet};
use crate::numeric::{min_of, Scalar};

/// Absolute tolerance on the total mass of float marginals.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A distribution over sets of exactly `ell` boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetDistribution<T> {
    pub atoms: Vec<(SelectedSet, T)>,
}

impl<T: Scalar> SubsetDistribution<T> {
    /// Probability that each box is selected.
    pub fn induced_marginals(&self, n: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n];
        for (set, w) in &self.atoms {
            for &i in set.indices() {
                out[i] = out[i].clone() + w.clone();
            }
        }
        out
    }

    pub fn total_weight(&self) -> T {
        self.atoms.iter().map(|(_, w)| w.clone()).sum()
    }
}

/// Raises coordinates from the last box backward, each up to 1, until the
/// total mass is exactly `ell`. The value can only go up: every `v_i * p_i`
/// grows and the adversary's top-`t` sum grows by at most as much.
pub fn pad_marginals<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> Marginals<T> {
    let mut out = p.as_slice().to_vec();
    let mut deficit = T::from_usize(inst.ell()) - p.sum();
    for x in out.iter_mut().rev() {
        if deficit <= T::zero() {
            break;
        }
        let room = T::one() - x.clone();
        if room <= T::zero() {
            continue;
        }
        let add = min_of(room, deficit.clone());
        deficit = deficit - add.clone();
        *x = x.clone() + add;
    }
    Marginals::from_vec_unchecked(out)
}

/// Checks that `p` sums to `ell` and, in float mode, moves a residual of at
/// most [`MASS_TOLERANCE`] onto the last fractional coordinate.
fn normalized_mass<T: Scalar>(p: &Marginals<T>, ell: usize) -> Result<Vec<T>> {
    let target = T::from_usize(ell);
    let sum = p.sum();
    if T::EXACT {
        if sum != target {
            return Err(Error::UnnormalizedMarginals {
                sum: sum.to_string(),
                ell,
            });
        }
        return Ok(p.as_slice().to_vec());
    }
    let residual = target - sum.clone();
    if residual.to_f64().abs() > MASS_TOLERANCE {
        return Err(Error::UnnormalizedMarginals {
            sum: sum.to_string(),
            ell,
        });
    }
    let mut out = p.as_slice().to_vec();
    let last_fractional = out.iter().rposition(|x| *x > T::zero() && *x < T::one());
    if let Some(j) = last_fractional {
        let adjusted = out[j].clone() + residual;
        out[j] = if adjusted < T::zero() {
            T::zero()
        } else if adjusted > T::one() {
            T::one()
        } else {
            adjusted
        };
    }
    Ok(out)
}

/// Reusable systematic sampler for fixed marginals.
///
/// Lay the boxes out as consecutive intervals of length `p_i` on `[0, ell)`
/// and pick the boxes whose intervals contain the points `u, u + 1, ...,
/// u + ell - 1` for one uniform `u in [0, 1)`. Since every `p_i <= 1`, each
/// interval holds at most one point, so exactly `ell` distinct boxes are
/// chosen and box `i` is chosen with probability `p_i`.
#[derive(Debug, Clone)]
pub struct SystematicSampler<T> {
    /// Right end of each box's interval.
    upper: Vec<T>,
    ell: usize,
}

impl<T: Scalar> SystematicSampler<T> {
    pub fn new(p: &Marginals<T>, ell: usize) -> Result<Self> {
        let masses = normalized_mass(p, ell)?;
        let mut acc = T::zero();
        let upper = masses
            .into_iter()
            .map(|x| {
                acc = acc.clone() + x;
                acc.clone()
            })
            .collect();
        Ok(Self { upper, ell })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SelectedSet {
        let u: f64 = rng.random();
        self.sample_at(&T::from_f64(u).expect("uniform draw is finite"))
    }

    /// The set selected by offset `u in [0, 1)`.
    pub fn sample_at(&self, u: &T) -> SelectedSet {
        let n = self.upper.len();
        let mut chosen = Vec::with_capacity(self.ell);
        let mut point = u.clone();
        for (i, upper) in self.upper.iter().enumerate() {
            if chosen.len() == self.ell {
                break;
            }
            if point < *upper {
                chosen.push(i);
                point = point + T::one();
            }
        }
        // Rounding can leave the final point just past the last interval;
        // give it to the last boxes not yet chosen.
        let mut j = n;
        while chosen.len() < self.ell && j > 0 {
            j -= 1;
            if !chosen.contains(&j) {
                chosen.push(j);
            }
        }
        chosen.sort_unstable();
        SelectedSet::from_sorted_unchecked(chosen)
    }
}

/// Draws one set of `ell` boxes with inclusion probabilities `p`.
pub fn sample<T: Scalar, R: Rng + ?Sized>(p: &Marginals<T>, ell: usize, rng: &mut R) -> Result<SelectedSet> {
    Ok(SystematicSampler::new(p, ell)?.sample(rng))
}

/// Writes `p` (total mass exactly `ell`) as a mixture of at most `n` sets.
///
/// Each round takes the `ell` largest residual marginals (ties toward the
/// smaller index) and gives that set the largest weight that keeps the
/// residual decomposable: at most the smallest selected residual, and at
/// most the remaining mass minus the largest unselected residual. Every round
/// either empties a selected box or makes an unselected box tight (equal to
/// the remaining mass, hence forced into every later set).
pub fn decompose<T: Scalar>(p: &Marginals<T>, inst: &Instance<T>) -> Result<SubsetDistribution<T>> {
    let n = inst.n();
    let ell = inst.ell();
    let mut residual = normalized_mass(p, ell)?;
    let mut remaining = T::one();
    let mut atoms = Vec::new();
    let eps = if T::EXACT {
        T::zero()
    } else {
        T::from_f64(1e-12).expect("finite")
    };
    let mut order: Vec<usize> = (0..n).collect();

    while remaining > eps {
        if atoms.len() == n {
            return Err(Error::DecompositionDiverged { rounds: n });
        }
        order.select_nth_unstable_by(ell - 1, |&a, &b| {
            residual[b]
                .partial_cmp(&residual[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let (selected, rest) = order.split_at(ell);
        let smallest_selected = selected
            .iter()
            .map(|&i| residual[i].clone())
            .reduce(min_of)
            .expect("ell >= 1");
        let largest_rest = rest
            .iter()
            .map(|&i| residual[i].clone())
            .reduce(|a, b| if b > a { b } else { a })
            .unwrap_or_else(T::zero);
        let mut weight = min_of(smallest_selected, remaining.clone() - largest_rest);
        if weight <= eps {
            // Only reachable through float drift; finish with what is left.
            weight = remaining.clone();
        }
        let weight = min_of(weight, remaining.clone());
        for &i in selected {
            let r = residual[i].clone() - weight.clone();
            residual[i] = if r < eps { T::zero() } else { r };
        }
        remaining = remaining - weight.clone();
        let mut indices = selected.to_vec();
        indices.sort_unstable();
        atoms.push((SelectedSet::from_sorted_unchecked(indices), weight));
    }
    if !T::EXACT && remaining > T::zero() {
        if let Some((_, w)) = atoms.last_mut() {
            *w = w.clone() + remaining;
        }
    }
    Ok(SubsetDistribution { atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{parse_rational, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn qs(xs: &[&str]) -> Vec<Rational> {
        xs.iter().map(|s| q(s)).collect()
    }

    fn inst(n: usize, ell: usize) -> Instance<Rational> {
        Instance::from_sorted(vec![q("1"); n], 0, ell).unwrap()
    }

    fn marg(xs: &[&str], inst: &Instance<Rational>) -> Marginals<Rational> {
        Marginals::new(qs(xs), inst).unwrap()
    }

    #[test]
    fn padding_examples() {
        let i3 = inst(3, 2);
        assert_eq!(
            pad_marginals(&marg(&["1", "1", "0"], &i3), &i3).as_slice(),
            qs(&["1", "1", "0"]).as_slice()
        );
        let i4 = inst(4, 2);
        assert_eq!(
            pad_marginals(&marg(&["1/2", "1/2", "0", "0"], &i4), &i4).as_slice(),
            qs(&["1/2", "1/2", "0", "1"]).as_slice()
        );
        let i5 = inst(5, 3);
        assert_eq!(
            pad_marginals(&marg(&["1", "4/5", "7/10", "0", "0"], &i5), &i5).as_slice(),
            qs(&["1", "4/5", "7/10", "0", "1/2"]).as_slice()
        );
        // Deficit larger than one spills backward.
        assert_eq!(
            pad_marginals(&marg(&["1/2", "0", "1/2", "0", "0"], &i5), &i5).as_slice(),
            qs(&["1/2", "0", "1/2", "1", "1"]).as_slice()
        );
    }

    #[test]
    fn decompose_examples() {
        let i3 = inst(3, 2);
        let d = decompose(&marg(&["1", "1/2", "1/2"], &i3), &i3).unwrap();
        assert_eq!(
            d.atoms,
            vec![
                (SelectedSet::from_sorted_unchecked(vec![0, 1]), q("1/2")),
                (SelectedSet::from_sorted_unchecked(vec![0, 2]), q("1/2")),
            ]
        );
        let d = decompose(&marg(&["2/3", "2/3", "2/3"], &i3), &i3).unwrap();
        assert_eq!(d.atoms.len(), 3);
        assert!(d.atoms.iter().all(|(_, w)| *w == q("1/3")));
        assert_eq!(d.induced_marginals(3), qs(&["2/3", "2/3", "2/3"]));
        let d = decompose(&marg(&["1", "1", "0"], &i3), &i3).unwrap();
        assert_eq!(d.atoms, vec![(SelectedSet::from_sorted_unchecked(vec![0, 1]), q("1"))]);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let i3 = inst(3, 2);
        assert!(matches!(
            decompose(&marg(&["1", "1/2", "0"], &i3), &i3),
            Err(Error::UnnormalizedMarginals { .. })
        ));
        let f = Instance::from_sorted(vec![1.0; 3], 0, 2).unwrap();
        let p = Marginals::new(vec![0.9, 0.9, 0.1], &f).unwrap();
        assert!(matches!(
            SystematicSampler::new(&p, 2),
            Err(Error::UnnormalizedMarginals { .. })
        ));
        let close = Marginals::new(vec![0.9, 0.9, 0.2 - 1e-12], &f).unwrap();
        assert!(SystematicSampler::new(&close, 2).is_ok());
    }

    #[test]
    fn forced_marginals_always_give_the_same_set() {
        let i3 = inst(3, 2);
        let sampler = SystematicSampler::new(&marg(&["1", "1", "0"], &i3), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sampler.sample(&mut rng).indices(), &[0, 1]);
        }
    }

    #[test]
    fn sample_offsets_map_to_intervals() {
        let i4 = inst(4, 2);
        let sampler = SystematicSampler::new(&marg(&["1/2", "1/2", "1/2", "1/2"], &i4), 2).unwrap();
        assert_eq!(sampler.sample_at(&q("0")).indices(), &[0, 2]);
        assert_eq!(sampler.sample_at(&q("3/4")).indices(), &[1, 3]);
    }
}
