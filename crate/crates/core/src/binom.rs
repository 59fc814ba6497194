//! Binomial coefficients and lexicographic combination streams.

use alloc::vec::Vec;
use num_bigint::BigUint;

/// `C(n, k)` in `u128`, `None` on overflow. `C(n, k) = 0` for `k > n`.
pub fn binom_checked(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(n, k)` as `usize`. Panics if the value does not fit; every caller
/// works inside a size envelope that has already been checked.
pub fn binom(n: usize, k: usize) -> usize {
    let v = binom_checked(n as u64, k as u64).expect("binomial overflow");
    usize::try_from(v).expect("binomial does not fit in usize")
}

pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Streams the `k`-subsets of `{0, .., m-1}` in lexicographic order without
/// materializing them.
#[derive(Debug, Clone)]
pub struct Combinations {
    m: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(m: usize, k: usize) -> Self {
        Combinations { m, current: (0..k).collect(), done: k > m }
    }

    /// Starts at the combination of the given lexicographic rank.
    pub fn starting_at(m: usize, k: usize, rank: u128) -> Self {
        match unrank_combination(m, k, rank) {
            Some(current) => Combinations { m, current, done: false },
            None => Combinations { m, current: Vec::new(), done: true },
        }
    }

    /// Current combination, or `None` once exhausted.
    pub fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(self.current.as_slice())
    }

    /// Moves to the lexicographic successor. Returns the smallest position
    /// that changed, which lets callers reuse prefix state.
    pub fn advance(&mut self) -> Option<usize> {
        if self.done {
            return None;
        }
        let k = self.current.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.m - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(i);
            }
        }
        self.done = true;
        None
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current()?.to_vec();
        self.advance();
        Some(out)
    }
}

/// Lexicographic rank of a strictly increasing `k`-subset of `{0, .., m-1}`.
pub fn rank_combination(m: usize, combo: &[usize]) -> u128 {
    let k = combo.len();
    let mut rank = 0u128;
    let mut prev = 0usize;
    for (i, &c) in combo.iter().enumerate() {
        for v in prev..c {
            rank += binom_checked((m - 1 - v) as u64, (k - 1 - i) as u64).unwrap();
        }
        prev = c + 1;
    }
    rank
}

/// Inverse of [`rank_combination`]; `None` if `rank >= C(m, k)`.
pub fn unrank_combination(m: usize, k: usize, mut rank: u128) -> Option<Vec<usize>> {
    if k > m || rank >= binom_checked(m as u64, k as u64)? {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    let mut v = 0usize;
    for i in 0..k {
        loop {
            let block = binom_checked((m - 1 - v) as u64, (k - 1 - i) as u64)?;
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        out.push(v);
        v += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binom(4, 2), 6);
        assert_eq!(binom(20, 10), 184_756);
        assert_eq!(binom(3, 5), 0);
        assert_eq!(binom_big(35, 15), BigUint::from(3_247_943_160u64));
        assert_eq!(binom_checked(200, 100), None);
    }

    #[test]
    fn stream_matches_rank() {
        let all: Vec<_> = Combinations::new(7, 3).collect();
        assert_eq!(all.len(), 35);
        for (r, c) in all.iter().enumerate() {
            assert_eq!(rank_combination(7, c), r as u128);
            assert_eq!(unrank_combination(7, 3, r as u128).as_ref(), Some(c));
        }
        let tail: Vec<_> = Combinations::starting_at(7, 3, 30).collect();
        assert_eq!(tail, all[30..].to_vec());
    }

    #[test]
    fn empty_and_full() {
        assert_eq!(Combinations::new(4, 0).count(), 1);
        assert_eq!(Combinations::new(4, 4).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
    }
}
