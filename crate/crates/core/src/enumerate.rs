//! Exhaustive enumeration of hypertrees at small `(n, d)`.
//!
//! Candidates are the `C(n-1,d)`-subsets of `d`-faces, streamed in
//! lexicographic order. A candidate that leaves some `(d-1)`-face uncovered
//! has a free summand in `H_{d-1}` and is skipped before any rank test.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{Pow, Zero};

use crate::binom::{binom, binom_checked, Combinations};
use crate::homology::{is_hypertree, torsion_record, TorsionRoute};
use crate::simplicial::{boundary_matrix, hypertree_boundary};
use crate::{Error, Result};

/// Largest candidate count enumerated.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedHypertree {
    /// Sorted ranks of the `d`-faces.
    pub faces: Vec<usize>,
    /// `|H_{d-1}|`.
    pub order: BigUint,
    /// `|H_{d-1}|²`, the unnormalized probability.
    pub weight: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    pub n: u32,
    pub d: usize,
    pub hypertrees: Vec<EnumeratedHypertree>,
    pub total_weight: BigUint,
    /// Candidates examined; `C(C(n,d+1), C(n-1,d))` for a full run.
    pub candidate_count: u128,
}

/// An exact probability `numerator / denominator`, not reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProbability {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl ExactProbability {
    pub fn to_f64(&self) -> f64 {
        let shift = self.denominator.bits().saturating_sub(60);
        let num = &self.numerator >> shift;
        let den = &self.denominator >> shift;
        big_to_f64(&num) / big_to_f64(&den)
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.iter_u64_digits().rev().fold(0.0, |acc, d| acc * 18446744073709551616.0 + d as f64)
}

/// `n^C(n-2,d)`, the total weight predicted by Kalai's formula.
pub fn kalai_total(n: u32, d: usize) -> BigUint {
    Pow::pow(BigUint::from(n), binom(n as usize - 2, d))
}

/// `C(C(n,d+1), C(n-1,d))`, or `None` on overflow.
pub fn candidate_total(n: u32, d: usize) -> Option<u128> {
    let m = binom_checked(n as u64, d as u64 + 1)?;
    let r = binom_checked(n as u64 - 1, d as u64)?;
    binom_checked(u64::try_from(m).ok()?, u64::try_from(r).ok()?)
}

fn check_params(n: u32, d: usize) -> Result<()> {
    if d == 0 || (n as usize) < d + 2 {
        return Err(Error::InvalidParameters(format!("need d >= 1 and n >= d+2, got n={n}, d={d}")));
    }
    Ok(())
}

/// Checks the enumeration envelope and returns the candidate count.
pub fn check_envelope(n: u32, d: usize) -> Result<u128> {
    check_params(n, d)?;
    match candidate_total(n, d) {
        Some(c) if c <= ENUMERATION_LIMIT => Ok(c),
        Some(c) => Err(Error::EnvelopeExceeded { what: "candidates", count: c, limit: ENUMERATION_LIMIT }),
        None => Err(Error::EnvelopeExceeded { what: "candidates", count: u128::MAX, limit: ENUMERATION_LIMIT }),
    }
}

/// All hypertrees on `[n]` of dimension `d` with their torsion orders.
pub fn enumerate_hypertrees(n: u32, d: usize) -> Result<EnumerationResult> {
    let total = check_envelope(n, d)?;
    enumerate_range(n, d, 0, total)
}

/// Enumerates the candidates with lexicographic rank in `[start, end)`.
/// Ranges partition the work; [`EnumerationResult::merge`] combines them.
pub fn enumerate_range(n: u32, d: usize, start: u128, end: u128) -> Result<EnumerationResult> {
    check_params(n, d)?;
    let total = candidate_total(n, d).ok_or(Error::EnvelopeExceeded {
        what: "candidates",
        count: u128::MAX,
        limit: ENUMERATION_LIMIT,
    })?;
    let end = end.min(total);
    let full = boundary_matrix(n, d)?;
    let m = full.cols();
    let r = binom(n as usize - 1, d);
    let words = full.rows().div_ceil(64);

    // coverage mask of each d-face over the (d-1)-faces
    let masks: Vec<Vec<u64>> = (0..m)
        .map(|c| {
            let mut w = vec![0u64; words];
            for &(row, _) in full.column(c) {
                w[row as usize / 64] |= 1 << (row % 64);
            }
            w
        })
        .collect();
    let last_mask: Vec<u64> = (0..words)
        .map(|i| {
            let bits = full.rows() - 64 * i;
            if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 }
        })
        .collect();

    let mut result = EnumerationResult {
        n,
        d,
        hypertrees: Vec::new(),
        total_weight: BigUint::zero(),
        candidate_count: 0,
    };
    if start >= end {
        return Ok(result);
    }
    let mut combos = Combinations::starting_at(m, r, start);
    // prefix[i] = union of the masks of current[0..=i]
    let mut prefix = vec![0u64; r * words];
    let mut changed = 0usize;
    let mut rank = start;
    while rank < end {
        let Some(cur) = combos.current() else { break };
        for i in changed..r {
            let (before, rest) = prefix.split_at_mut(i * words);
            let row = &mut rest[..words];
            let mask = &masks[cur[i]];
            if i == 0 {
                row.copy_from_slice(mask);
            } else {
                let prev = &before[(i - 1) * words..];
                for w in 0..words {
                    row[w] = prev[w] | mask[w];
                }
            }
        }
        result.candidate_count += 1;
        let covered = prefix[(r - 1) * words..].iter().zip(&last_mask).all(|(a, b)| a == b);
        if covered && is_hypertree(n, d, cur)? {
            let faces: Vec<usize> = cur.iter().map(|&c| full.column_faces()[c]).collect();
            let b = hypertree_boundary(n, d, &faces)?;
            let order = torsion_record(&b, TorsionRoute::Snf)?.order;
            let weight = &order * &order;
            result.total_weight += &weight;
            result.hypertrees.push(EnumeratedHypertree { faces, order, weight });
        }
        changed = combos.advance().unwrap_or(0);
        rank += 1;
    }
    Ok(result)
}

impl EnumerationResult {
    /// Appends a partial result from a later range.
    pub fn merge(&mut self, other: EnumerationResult) -> Result<()> {
        if (self.n, self.d) != (other.n, other.d) {
            return Err(Error::InvalidParameters("merging enumerations of different (n, d)".into()));
        }
        self.total_weight += other.total_weight;
        self.candidate_count += other.candidate_count;
        self.hypertrees.extend(other.hypertrees);
        self.hypertrees.sort_by(|a, b| a.faces.cmp(&b.faces));
        Ok(())
    }

    pub fn expected_total(&self) -> BigUint {
        kalai_total(self.n, self.d)
    }

    /// `Σ|H|² = n^C(n-2,d)`, exactly.
    pub fn kalai_holds(&self) -> bool {
        self.total_weight == self.expected_total()
    }

    /// Probability `|H|² / n^C(n-2,d)` of each hypertree, in enumeration
    /// order.
    pub fn exact_distribution(&self) -> Vec<(Vec<usize>, ExactProbability)> {
        let den = self.expected_total();
        self.hypertrees
            .iter()
            .map(|h| {
                (h.faces.clone(), ExactProbability { numerator: h.weight.clone(), denominator: den.clone() })
            })
            .collect()
    }

    /// Index of a face set in [`hypertrees`](Self::hypertrees), by binary
    /// search over the lexicographically sorted list.
    pub fn position(&self, faces: &[usize]) -> Option<usize> {
        self.hypertrees.binary_search_by(|h| h.faces.as_slice().cmp(faces)).ok()
    }
}
