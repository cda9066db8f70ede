//! Exhaustive generation of BC_d and exhaustive search for Garden tuples
//! among signed permutation matrices.
//!
//! Element order is pinned: permutations in lexicographic order of their
//! image vectors, then sign vectors in lexicographic order with `+1`
//! before `-1` (leftmost position most significant). Tuple streams are
//! ordered lexicographically by element indices in that order, which makes
//! every enumeration reproducible run to run.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{decompose_sp, AlgebraError, GardenRep};
use crate::mat::Mat;
use crate::perm::{quartet_of, Permutation, QuartetId, SignedPermutation};

/// Hard cap on d for element enumeration.
pub const MAX_ELEMENT_DIM: usize = 8;
/// Hard cap on the element count for tuple searches; the pairwise
/// compatibility table is quadratic in it.
pub const MAX_TUPLE_POOL: u64 = 10_000;
/// Hard cap on tuple length.
pub const MAX_TUPLE_COLORS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("d must be between 1 and {MAX_ELEMENT_DIM}, got {0}")]
    DimOutOfRange(usize),
    #[error("tuple search over BC_{d} needs a pool of {pool} elements (cap {MAX_TUPLE_POOL})")]
    PoolTooLarge { d: usize, pool: u64 },
    #[error("tuple length must be between 1 and {MAX_TUPLE_COLORS}, got {0}")]
    TooManyColors(usize),
}

/// `|BC_d| = 2^d * d!`.
pub fn bc_order(d: usize) -> u64 {
    let fact: u64 = (1..=d as u64).product();
    (1u64 << d) * fact
}

/// All elements of BC_d in the documented deterministic order.
pub fn enumerate_bc(
    d: usize,
) -> Result<impl Iterator<Item = SignedPermutation>, EnumerationError> {
    if d == 0 || d > MAX_ELEMENT_DIM {
        return Err(EnumerationError::DimOutOfRange(d));
    }
    let perms = Permutation::all(d);
    let sign_count = 1usize << d;
    Ok(perms.into_iter().flat_map(move |perm| {
        (0..sign_count).map(move |bits| {
            let signs: Vec<i8> = (0..d)
                .map(|k| if bits >> (d - 1 - k) & 1 == 1 { -1 } else { 1 })
                .collect();
            SignedPermutation::new(perm.clone(), signs).expect("signs are +-1")
        })
    }))
}

/// Exact pairwise condition for two signed permutation matrices to be
/// able to share a Garden tuple (with `R = L^T`): both off-diagonal
/// relations must vanish identically.
fn pair_compatible(a: &Mat<i64>, b: &Mat<i64>) -> bool {
    let at = a.transpose();
    let bt = b.transpose();
    a.mul(&bt).add(&b.mul(&at)).is_zero() && at.mul(b).add(&bt.mul(a)).is_zero()
}

/// Shared search context: the element pool and its pairwise
/// compatibility table as bitsets.
struct Pool {
    elements: Vec<SignedPermutation>,
    mats: Vec<Mat<i64>>,
    compat: Vec<Vec<u64>>,
    words: usize,
}

impl Pool {
    fn build(n: usize, d: usize) -> Result<Pool, EnumerationError> {
        if n == 0 || n > MAX_TUPLE_COLORS {
            return Err(EnumerationError::TooManyColors(n));
        }
        let pool = bc_order(d);
        if d == 0 || d > MAX_ELEMENT_DIM || pool > MAX_TUPLE_POOL {
            return Err(EnumerationError::PoolTooLarge { d, pool });
        }
        let elements: Vec<SignedPermutation> = enumerate_bc(d)?.collect();
        let mats: Vec<Mat<i64>> = elements.iter().map(|e| e.to_matrix()).collect();
        let count = elements.len();
        let words = count.div_ceil(64);
        let compat: Vec<Vec<u64>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words];
                for j in 0..count {
                    if i != j && pair_compatible(&mats[i], &mats[j]) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        Ok(Pool {
            elements,
            mats,
            compat,
            words,
        })
    }

    fn intersect(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        (0..self.words).map(|w| a[w] & b[w]).collect()
    }

    fn rep_for(&self, indices: &[usize]) -> GardenRep<i64> {
        let sps: Vec<SignedPermutation> = indices
            .iter()
            .map(|&i| self.elements[i].clone())
            .collect();
        GardenRep::from_signed_perms(&sps).expect("pool matrices share one size")
    }
}

fn iter_bits(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            }
        })
    })
}

/// Depth-first search for all ordered n-tuples of mutually compatible
/// elements. `emit` receives the index tuple of every solution, in
/// lexicographic index order. Restricting the first index allows callers
/// to partition the search.
fn search(
    pool: &Pool,
    n: usize,
    first_range: std::ops::Range<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    let mut chosen = Vec::with_capacity(n);
    for first in first_range {
        chosen.push(first);
        if n == 1 {
            emit(&chosen);
        } else {
            extend(pool, n, &mut chosen, &pool.compat[first], emit);
        }
        chosen.pop();
    }
}

fn extend(
    pool: &Pool,
    n: usize,
    chosen: &mut Vec<usize>,
    allowed: &[u64],
    emit: &mut impl FnMut(&[usize]),
) {
    for candidate in iter_bits(allowed) {
        chosen.push(candidate);
        if chosen.len() == n {
            emit(chosen);
        } else {
            let narrowed = pool.intersect(allowed, &pool.compat[candidate]);
            extend(pool, n, chosen, &narrowed, emit);
        }
        chosen.pop();
    }
}

/// Streams every ordered N-tuple of BC_d matrices `L_I` whose Garden
/// representation (with `R_I = L_I^T`) has residual exactly zero.
///
/// The stream is computed lazily one first-element subtree at a time and
/// its order is deterministic.
pub fn enumerate_garden_tuples(
    n: usize,
    d: usize,
) -> Result<impl Iterator<Item = GardenRep<i64>>, EnumerationError> {
    let pool = Pool::build(n, d)?;
    let count = pool.elements.len();
    Ok((0..count).flat_map(move |first| {
        let mut batch = Vec::new();
        search(&pool, n, first..first + 1, &mut |indices| {
            batch.push(pool.rep_for(indices));
        });
        batch
    }))
}

/// Counts the tuples of [`enumerate_garden_tuples`] without materializing
/// them; the first index is partitioned across worker threads.
pub fn count_garden_tuples(n: usize, d: usize) -> Result<u64, EnumerationError> {
    let pool = Pool::build(n, d)?;
    let count = pool.elements.len();
    Ok((0..count)
        .into_par_iter()
        .map(|first| {
            let mut subtotal = 0u64;
            search(&pool, n, first..first + 1, &mut |_| subtotal += 1);
            subtotal
        })
        .sum())
}

/// Summary of an enumeration run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    /// Size of the candidate pool, `2^d * d!`.
    pub total_elements: u64,
    /// Ordered tuples passing the exact Garden check.
    pub valid_tuples: u64,
    /// Tuples counted up to reordering and per-color sign flips.
    pub orbit_classes: u64,
    /// Valid-tuple counts keyed by the quartet of the tuple's
    /// permutation parts (d = 4 only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quartet_histogram: Option<BTreeMap<u8, u64>>,
}

/// Runs the full tuple search and aggregates the report. The histogram is
/// only available for d = 4.
pub fn enumeration_report(
    n: usize,
    d: usize,
    with_histogram: bool,
) -> Result<EnumerationReport, EnumerationError> {
    let pool = Pool::build(n, d)?;
    let count = pool.elements.len();
    let per_first: Vec<(u64, BTreeMap<u8, u64>, HashSet<Vec<Mat<i64>>>)> = (0..count)
        .into_par_iter()
        .map(|first| {
            let mut subtotal = 0u64;
            let mut histogram = BTreeMap::new();
            let mut orbits = HashSet::new();
            search(&pool, n, first..first + 1, &mut |indices| {
                subtotal += 1;
                if with_histogram && d == 4 {
                    let q = quartet_of(pool.elements[indices[0]].perm())
                        .expect("pool is degree 4");
                    *histogram.entry(q.index()).or_insert(0) += 1;
                }
                orbits.insert(orbit_key(&pool.mats, indices));
            });
            (subtotal, histogram, orbits)
        })
        .collect();

    let mut valid_tuples = 0;
    let mut histogram = BTreeMap::new();
    let mut orbits = HashSet::new();
    for (subtotal, sub_hist, sub_orbits) in per_first {
        valid_tuples += subtotal;
        for (k, v) in sub_hist {
            *histogram.entry(k).or_insert(0) += v;
        }
        orbits.extend(sub_orbits);
    }
    Ok(EnumerationReport {
        total_elements: bc_order(d),
        valid_tuples,
        orbit_classes: orbits.len() as u64,
        quartet_histogram: (with_histogram && d == 4).then_some(histogram),
    })
}

/// Canonical form of a tuple modulo ordering and per-color sign flips:
/// flip each matrix so its first nonzero entry is positive, then sort.
fn orbit_key(mats: &[Mat<i64>], indices: &[usize]) -> Vec<Mat<i64>> {
    let mut key: Vec<Mat<i64>> = indices
        .iter()
        .map(|&i| {
            let m = &mats[i];
            let flip = m.iter().find(|&&x| x != 0).copied().unwrap_or(1) < 0;
            if flip {
                m.scale(&-1)
            } else {
                m.clone()
            }
        })
        .collect();
    key.sort_by(|a, b| a.to_rows().cmp(&b.to_rows()));
    key
}

/// Outcome of the quartet-closure check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuartetClosure {
    Holds,
    Counterexample(ClosureCounterexample),
}

impl QuartetClosure {
    pub fn holds(&self) -> bool {
        matches!(self, QuartetClosure::Holds)
    }
}

/// A tuple whose permutation parts fail to fill exactly one quartet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureCounterexample {
    /// Position in the input stream.
    pub index: usize,
    /// Cycle strings of the four permutation parts.
    pub perms: Vec<String>,
    /// Quartet of each part.
    pub quartets: Vec<QuartetId>,
}

impl std::fmt::Display for ClosureCounterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "tuple {}: permutation parts {:?} fall in quartets {:?}",
            self.index, self.perms, self.quartets
        )
    }
}

/// Checks that every tuple's permutation parts are exactly the four
/// elements of a single quartet. Returns the first counterexample
/// otherwise. An empty stream holds vacuously.
pub fn verify_quartet_closure<I>(reps: I) -> Result<QuartetClosure, AlgebraError>
where
    I: IntoIterator<Item = GardenRep<i64>>,
{
    for (index, rep) in reps.into_iter().enumerate() {
        let mut perms = Vec::with_capacity(rep.n_colors());
        for i in 0..rep.n_colors() {
            let sp = decompose_sp(rep.l(i), 0)?;
            perms.push(sp.perm().clone());
        }
        let quartets: Vec<QuartetId> = perms
            .iter()
            .map(|p| quartet_of(p).expect("closure check requires d = 4"))
            .collect();
        let uniform = quartets.windows(2).all(|w| w[0] == w[1]);
        let complete = uniform && {
            let mut got: Vec<Permutation> = perms.clone();
            let mut expected = quartets[0].members();
            got.sort();
            expected.sort();
            got == expected
        };
        if !complete {
            return Ok(QuartetClosure::Counterexample(ClosureCounterexample {
                index,
                perms: perms.iter().map(|p| p.to_cycle_string()).collect(),
                quartets,
            }));
        }
    }
    Ok(QuartetClosure::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{garden_residual, is_garden_rep};

    #[test]
    fn element_counts() {
        assert_eq!(enumerate_bc(1).unwrap().count(), 2);
        assert_eq!(enumerate_bc(2).unwrap().count(), 8);
        assert_eq!(bc_order(4), 384);
        assert!(enumerate_bc(0).is_err());
        assert!(enumerate_bc(9).is_err());
    }

    #[test]
    fn elements_are_distinct_as_matrices() {
        let mats: HashSet<Vec<Vec<i64>>> = enumerate_bc(3)
            .unwrap()
            .map(|sp| sp.to_matrix().to_rows())
            .collect();
        assert_eq!(mats.len() as u64, bc_order(3));
    }

    #[test]
    fn order_is_images_then_signs() {
        let first: Vec<SignedPermutation> = enumerate_bc(2).unwrap().collect();
        let images: Vec<Vec<usize>> = first
            .iter()
            .map(|sp| sp.perm().images_one_based())
            .collect();
        assert_eq!(images[0], vec![1, 2]);
        assert_eq!(images[3], vec![1, 2]);
        assert_eq!(images[4], vec![2, 1]);
        assert_eq!(first[0].signs(), &[1, 1]);
        assert_eq!(first[1].signs(), &[1, -1]);
        assert_eq!(first[2].signs(), &[-1, 1]);
        assert_eq!(first[3].signs(), &[-1, -1]);
    }

    #[test]
    fn singletons_are_always_valid() {
        let tuples: Vec<_> = enumerate_garden_tuples(1, 2).unwrap().collect();
        assert_eq!(tuples.len() as u64, bc_order(2));
        for t in &tuples {
            assert!(is_garden_rep(t, 0));
        }
    }

    #[test]
    fn no_pairs_exist_in_one_dimension() {
        // 1x1: L1 R2 + L2 R1 = 2 L1 L2 is never zero
        assert_eq!(count_garden_tuples(2, 1).unwrap(), 0);
    }

    #[test]
    fn streams_are_deterministic() {
        let a: Vec<_> = enumerate_garden_tuples(2, 2).unwrap().collect();
        let b: Vec<_> = enumerate_garden_tuples(2, 2).unwrap().collect();
        assert_eq!(a, b);
        assert_eq!(a.len() as u64, count_garden_tuples(2, 2).unwrap());
    }

    #[test]
    fn every_emitted_tuple_has_zero_residual() {
        for rep in enumerate_garden_tuples(2, 2).unwrap() {
            assert_eq!(garden_residual(&rep), 0);
        }
    }

    #[test]
    fn guards_reject_oversized_searches() {
        assert!(matches!(
            enumerate_garden_tuples(2, 6),
            Err(EnumerationError::PoolTooLarge { .. })
        ));
        assert!(matches!(
            enumerate_garden_tuples(0, 2),
            Err(EnumerationError::TooManyColors(0))
        ));
    }

    #[test]
    fn closure_holds_vacuously_on_empty_stream() {
        assert_eq!(
            verify_quartet_closure(Vec::new()).unwrap(),
            QuartetClosure::Holds
        );
    }

    #[test]
    fn closure_flags_mixed_quartets() {
        // (123) sits in quartet 1, (124) in quartet 2; gluing them with
        // plus signs is not a Garden tuple, and the closure check names it.
        let a = SignedPermutation::new(
            Permutation::parse_cycles("(123)", 4).unwrap(),
            vec![1; 4],
        )
        .unwrap();
        let b = SignedPermutation::new(
            Permutation::parse_cycles("(124)", 4).unwrap(),
            vec![1; 4],
        )
        .unwrap();
        let rep = GardenRep::from_signed_perms(&[a, b]).unwrap();
        assert_ne!(garden_residual(&rep), 0);
        match verify_quartet_closure([rep]).unwrap() {
            QuartetClosure::Counterexample(ce) => {
                assert_eq!(ce.index, 0);
                assert_eq!(ce.quartets.len(), 2);
                assert_ne!(ce.quartets[0], ce.quartets[1]);
            }
            QuartetClosure::Holds => panic!("expected a counterexample"),
        }
    }
}
