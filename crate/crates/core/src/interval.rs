//! Minimal inclusion-maximal k-free subsets of `[1, n]`.
//!
//! `[1, n]` splits into chains `i, ik, ik², …` (one per `i` not divisible
//! by `k`). A set is k-free and maximal exactly when its trace on each chain
//! of length `l` satisfies property (P): one of the first two positions, one
//! of the last two, no two adjacent, and every window of three hit. The
//! smallest such trace has `⌈l/3⌉` positions.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// The chain `start, start·k, …` restricted to `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalOrbit {
    pub start: u64,
    pub length: u32,
}

impl IntervalOrbit {
    /// Elements of the chain, ascending.
    pub fn elements(&self, k: u64) -> impl Iterator<Item = u64> {
        std::iter::successors(Some(self.start), move |&x| x.checked_mul(k))
            .take(self.length as usize)
    }
}

/// Length of the chain from `start`: the largest `t` with `start·k^(t-1) <= n`.
pub fn orbit_length(start: u64, k: u64, n: u64) -> u32 {
    let mut len = 0;
    let mut x = Some(start);
    while let Some(v) = x.filter(|&v| v <= n) {
        len += 1;
        x = v.checked_mul(k);
    }
    len
}

/// All chains of `[1, n]` ordered by start.
pub fn interval_orbits(k: u64, n: u64) -> Result<Vec<IntervalOrbit>> {
    require_k(k)?;
    Ok((1..=n)
        .filter(|i| i % k != 0)
        .map(|start| IntervalOrbit {
            start,
            length: orbit_length(start, k, n),
        })
        .collect())
}

fn require_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    Ok(())
}

pub fn h_value(l: u32) -> u32 {
    l.div_ceil(3)
}

/// Positions (1-based, ascending) of a smallest set with property (P) in a
/// chain of length `l`: `2, 5, 8, …` unless `l ≡ 1 mod 3`, then `1, 4, 7, …`.
pub fn min_pattern(l: u32) -> Vec<u32> {
    if l == 0 {
        return Vec::new();
    }
    let first = if l % 3 == 1 { 1 } else { 2 };
    (0..h_value(l)).map(|i| first + 3 * i).collect()
}

/// Property (P) for a position set in `[1, l]`. Positions outside `[1, l]`
/// make the set invalid.
pub fn satisfies_p(positions: &[u32], l: u32) -> bool {
    if l == 0 || positions.iter().any(|&p| p == 0 || p > l) {
        return false;
    }
    let mut member = vec![false; l as usize + 2];
    for &p in positions {
        member[p as usize] = true;
    }
    let has = |i: u32| member[i as usize];
    if !(has(1) || (l >= 2 && has(2))) {
        return false;
    }
    if !(has(l) || (l >= 2 && has(l - 1))) {
        return false;
    }
    if (1..l).any(|i| has(i) && has(i + 1)) {
        return false;
    }
    (2..l).all(|i| has(i - 1) || has(i) || has(i + 1))
}

/// Minimum size of an inclusion-maximal k-free subset of `[1, n]`.
///
/// Chains of length at least `t` start at the `i <= ⌊n/k^(t-1)⌋` not
/// divisible by `k`, so the sum over chains of `⌈l/3⌉` is assembled layer
/// by layer without enumerating starts.
pub fn tilde_rk(k: u64, n: u64) -> Result<u64> {
    require_k(k)?;
    let starts_up_to = |bound: u64| bound - bound / k;
    let mut total = 0u64;
    let mut bound = n;
    let mut t = 1u32;
    while bound > 0 {
        let next = bound / k;
        let exactly_t = starts_up_to(bound) - starts_up_to(next);
        total += exactly_t * u64::from(h_value(t));
        bound = next;
        t += 1;
    }
    Ok(total)
}

/// A k-free subset of `[1, n]` together with the chain positions used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSolution {
    pub n: u64,
    pub k: u64,
    /// Ascending.
    pub elements: Vec<u64>,
    /// For each chain, by start: `(start, positions taken)`.
    pub patterns: Vec<(u64, Vec<u32>)>,
}

pub fn construct_min_maximal(k: u64, n: u64) -> Result<IntervalSolution> {
    let orbits = interval_orbits(k, n)?;
    let mut elements = Vec::new();
    let mut patterns = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let positions = min_pattern(orbit.length);
        let chain: Vec<u64> = orbit.elements(k).collect();
        elements.extend(positions.iter().map(|&p| chain[p as usize - 1]));
        patterns.push((orbit.start, positions));
    }
    elements.sort_unstable();
    Ok(IntervalSolution {
        n,
        k,
        elements,
        patterns,
    })
}

/// Whether `set` is k-free in the integer sense (`x ≠ ky` for all
/// `x, y` in the set) and no element of `[1, n]` can be added.
pub fn is_maximal_kfree_interval(set: &[u64], k: u64, n: u64) -> Result<bool> {
    if let Some(&x) = set.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::OutOfRange { x, n });
    }
    let mut member = vec![false; n as usize + 1];
    for &x in set {
        member[x as usize] = true;
    }
    let in_set = |x: u64| x >= 1 && x <= n && member[x as usize];
    let times_k = |x: u64| x.checked_mul(k).filter(|&v| v <= n);
    let kfree = set.iter().all(|&y| times_k(y).is_none_or(|x| !in_set(x)));
    if !kfree {
        return Ok(false);
    }
    let blocked =
        |z: u64| times_k(z).is_some_and(in_set) || (k != 0 && z % k == 0 && in_set(z / k));
    Ok((1..=n).all(|z| in_set(z) || blocked(z)))
}

/// One row of the comparison of `tilde_rk` with `k²n/(k²+k+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRow {
    pub n: u64,
    pub exact: u64,
    pub main_term: Ratio<i128>,
    pub error: Ratio<i128>,
    /// `error / log_k(n)²`; `None` for `n = 1`.
    pub scaled_error: Option<f64>,
}

pub fn main_term(k: u64, n: u64) -> Ratio<i128> {
    let k = i128::from(k);
    Ratio::new(k * k * i128::from(n), k * k + k + 1)
}

/// Rows for each `n` of the grid, in grid order; `n = 0` is skipped.
pub fn asymptotic_report(k: u64, grid: &[u64]) -> Result<Vec<AsymptoticRow>> {
    require_k(k)?;
    grid.iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let exact = tilde_rk(k, n)?;
            let main = main_term(k, n);
            let error = Ratio::from_integer(i128::from(exact)) - main;
            let log = (n as f64).ln() / (k as f64).ln();
            let err_f = *error.numer() as f64 / *error.denom() as f64;
            Ok(AsymptoticRow {
                n,
                exact,
                main_term: main,
                error,
                scaled_error: (n > 1).then(|| err_f / (log * log)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_examples() {
        assert_eq!(h_value(3), 1);
        assert_eq!(h_value(1), 1);
        assert_eq!(h_value(7), 3);
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(min_pattern(6), vec![2, 5]);
        assert_eq!(min_pattern(1), vec![1]);
        assert_eq!(min_pattern(2), vec![2]);
        assert_eq!(min_pattern(4), vec![1, 4]);
        assert_eq!(min_pattern(3), vec![2]);
        for l in 1..=60 {
            assert!(satisfies_p(&min_pattern(l), l), "l={l}");
        }
    }

    #[test]
    fn property_p_rejects() {
        assert!(!satisfies_p(&[], 1));
        assert!(!satisfies_p(&[1, 2], 3));
        assert!(!satisfies_p(&[1], 4));
        assert!(!satisfies_p(&[1, 5], 5));
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde_rk(2, 10).unwrap(), 6);
        assert_eq!(tilde_rk(5, 4).unwrap(), 4);
        assert_eq!(tilde_rk(2, 4).unwrap(), 2);
        assert_eq!(tilde_rk(2, 0).unwrap(), 0);
        assert_eq!(tilde_rk(1, 10), Err(Error::KTooSmall { k: 1, min: 2 }));
    }

    #[test]
    fn tilde_matches_chain_sum() {
        for k in [2u64, 3, 5, 7] {
            for n in 0..=3000u64 {
                let direct: u64 = interval_orbits(k, n)
                    .unwrap()
                    .iter()
                    .map(|o| u64::from(h_value(o.length)))
                    .sum();
                assert_eq!(tilde_rk(k, n).unwrap(), direct, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn construct_examples() {
        let s = construct_min_maximal(2, 10).unwrap();
        assert_eq!(s.elements, vec![1, 6, 7, 8, 9, 10]);
        assert!(is_maximal_kfree_interval(&s.elements, 2, 10).unwrap());
        assert_eq!(construct_min_maximal(3, 2).unwrap().elements, vec![1, 2]);
        assert_eq!(construct_min_maximal(2, 4).unwrap().elements, vec![2, 3]);
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal_kfree_interval(&[2, 3], 2, 4).unwrap());
        assert!(!is_maximal_kfree_interval(&[], 2, 4).unwrap());
        assert!(!is_maximal_kfree_interval(&[1, 2], 2, 2).unwrap());
        assert!(!is_maximal_kfree_interval(&[2], 2, 4).unwrap());
        assert_eq!(
            is_maximal_kfree_interval(&[5], 2, 4),
            Err(Error::OutOfRange { x: 5, n: 4 })
        );
    }

    #[test]
    fn report_example() {
        let rows = asymptotic_report(2, &[0, 10]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].exact, 6);
        assert_eq!(rows[0].main_term, Ratio::new(40, 7));
        assert_eq!(rows[0].error, Ratio::new(2, 7));
    }
}
