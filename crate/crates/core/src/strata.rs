//! Stratification of `Z/nZ` by `gcd(x, n)` and the action of
//! multiplication by `k` on strata and residues.

use std::collections::HashSet;

use crate::arith::{self, Factorization};
use crate::error::{Error, Result};

/// A prime dividing both `n` and `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedPrime {
    pub p: u64,
    /// Exponent of `p` in `n`.
    pub n_exp: u32,
    /// Exponent of `p` in `k` (always at least one).
    pub k_exp: u32,
}

/// The modulus `n`, the multiplier `k` and their joint factorization data.
///
/// `k` is stored reduced modulo `n`. When `k ≡ 0 (mod n)` the shared-prime
/// data describes `k = n`, which induces the same map on residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusContext {
    n: u64,
    k: u64,
    n_fact: Factorization,
    /// Index into `n_fact` of each prime, `Some(j)` if it is `shared[j]`.
    shared_index: Vec<Option<usize>>,
    shared: Vec<SharedPrime>,
    unit: u64,
}

impl ModulusContext {
    pub fn new(k: u64, n: u64) -> Result<Self> {
        let n_fact = arith::factorize(n)?;
        Self::with_factorization(k, n, n_fact)
    }

    pub fn with_factorization(k: u64, n: u64, n_fact: Factorization) -> Result<Self> {
        if n == 0 {
            return Err(Error::Zero);
        }
        if n_fact.value()? != n {
            return Err(Error::Inconsistent(format!(
                "factorization {n_fact} does not match {n}"
            )));
        }
        let k = k % n;
        let k_eff = if k == 0 { n } else { k };
        let mut unit = k_eff;
        let mut shared = Vec::new();
        let mut shared_index = Vec::with_capacity(n_fact.len());
        for &(p, n_exp) in n_fact.factors() {
            let mut k_exp = 0;
            while unit % p == 0 {
                unit /= p;
                k_exp += 1;
            }
            if k_exp > 0 {
                shared_index.push(Some(shared.len()));
                shared.push(SharedPrime { p, n_exp, k_exp });
            } else {
                shared_index.push(None);
            }
        }
        Ok(Self {
            n,
            k,
            n_fact,
            shared_index,
            shared,
            unit,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The multiplier reduced modulo `n`.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n_factorization(&self) -> &Factorization {
        &self.n_fact
    }

    pub fn shared(&self) -> &[SharedPrime] {
        &self.shared
    }

    /// Part of `k` coprime to `n`.
    pub fn unit(&self) -> u64 {
        self.unit
    }

    /// Number of primes shared by `n` and `k`.
    pub fn r(&self) -> usize {
        self.shared.len()
    }

    /// Number of primes of `n`.
    pub fn s(&self) -> usize {
        self.n_fact.len()
    }

    pub fn is_coprime(&self) -> bool {
        self.shared.is_empty()
    }

    /// Whether index `i` of the prime list of `n` is a shared prime.
    pub fn shared_at(&self, i: usize) -> Option<&SharedPrime> {
        self.shared_index[i].map(|j| &self.shared[j])
    }

    /// Exponent vector of a divisor of `n`, aligned with the primes of `n`.
    pub fn exponents(&self, m: u64) -> Result<Vec<u32>> {
        if m == 0 || self.n % m != 0 {
            return Err(Error::NotDivisor { m, n: self.n });
        }
        let mut rest = m;
        Ok(self
            .n_fact
            .primes()
            .map(|p| {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                e
            })
            .collect())
    }

    /// Value of the divisor with the given exponent vector.
    pub fn value_of(&self, exps: &[u32]) -> u64 {
        self.n_fact
            .primes()
            .zip(exps)
            .map(|(p, &e)| p.pow(e))
            .product()
    }

    /// `k^j ⋆ m` at the exponent level: every shared prime gains
    /// `min(j·k_i, n_i - m_i)`.
    pub fn star_exponents(&self, exps: &[u32], j: u64) -> Vec<u32> {
        exps.iter()
            .enumerate()
            .map(|(i, &e)| match self.shared_at(i) {
                Some(sp) => {
                    let gain = j.saturating_mul(u64::from(sp.k_exp));
                    e + gain.min(u64::from(sp.n_exp - e)) as u32
                }
                None => e,
            })
            .collect()
    }

    /// A divisor is a root stratum iff `gcd(k, n/m) = 1`, i.e. every shared
    /// prime is saturated.
    pub fn is_root_exponents(&self, exps: &[u32]) -> bool {
        self.shared_index
            .iter()
            .zip(exps)
            .all(|(idx, &e)| idx.is_none_or(|j| e == self.shared[j].n_exp))
    }

    pub fn is_root(&self, m: u64) -> Result<bool> {
        Ok(self.is_root_exponents(&self.exponents(m)?))
    }

    pub fn stratum(&self, m: u64) -> Result<Stratum> {
        let exps = self.exponents(m)?;
        let co = self.cofactor_factorization(&exps);
        Ok(Stratum {
            m,
            is_root: self.is_root_exponents(&exps),
            size: arith::euler_phi(&co)?,
            exponents: exps,
        })
    }

    /// Factorization of `n/m` for the divisor with exponents `exps`.
    pub fn cofactor_factorization(&self, exps: &[u32]) -> Factorization {
        Factorization::from_pairs(
            self.n_fact
                .factors()
                .iter()
                .zip(exps)
                .map(|(&(p, n_exp), &e)| (p, n_exp - e)),
        )
    }

    /// All divisors of `n` as exponent vectors, ascending by value.
    pub fn divisor_exponents(&self) -> Vec<(u64, Vec<u32>)> {
        let mut out: Vec<(u64, Vec<u32>)> = vec![(1, Vec::with_capacity(self.s()))];
        for &(p, n_exp) in self.n_fact.factors() {
            let mut next = Vec::with_capacity(out.len() * (n_exp as usize + 1));
            for (v, exps) in &out {
                let mut value = *v;
                for e in 0..=n_exp {
                    let mut with = exps.clone();
                    with.push(e);
                    next.push((value, with));
                    if e < n_exp {
                        value *= p;
                    }
                }
            }
            out = next;
        }
        out.sort_unstable_by_key(|(v, _)| *v);
        out
    }
}

/// The stratum `{x in Z/nZ : gcd(x, n) = m}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub m: u64,
    pub exponents: Vec<u32>,
    /// `φ(n/m)`.
    pub size: u64,
    pub is_root: bool,
}

/// Image of stratum `m` under multiplication by `k^j`.
pub fn stratum_image(m: u64, j: u64, ctx: &ModulusContext) -> Result<u64> {
    let exps = ctx.exponents(m)?;
    Ok(ctx.value_of(&ctx.star_exponents(&exps, j)))
}

/// Residues `x` with `gcd(x, n) = m`, ascending.
pub fn stratum_elements(m: u64, ctx: &ModulusContext) -> Result<Vec<u64>> {
    ctx.exponents(m)?;
    let d = ctx.n / m;
    Ok((0..d)
        .filter(|&v| arith::gcd(v, d) == 1)
        .map(|v| m * v)
        .collect())
}

/// The trajectory `x, kx, k²x, …` up to (excluding) the first repeat.
pub fn orbit(x: u64, ctx: &ModulusContext) -> Result<Vec<u64>> {
    if x >= ctx.n {
        return Err(Error::OutOfRange { x, n: ctx.n });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut y = x;
    while seen.insert(y) {
        out.push(y);
        y = arith::mul_mod(y, ctx.k, ctx.n);
    }
    Ok(out)
}

/// Partition of a root stratum into cycles of `x ↦ kx`. Each cycle starts
/// at its smallest residue; cycles are ordered by that residue.
pub fn root_stratum_cycles(m: u64, ctx: &ModulusContext) -> Result<Vec<Vec<u64>>> {
    if !ctx.is_root(m)? {
        return Err(Error::NotRoot { m });
    }
    let d = ctx.n / m;
    let step = ctx.k % d;
    let mut visited = vec![false; d as usize];
    let mut cycles = Vec::new();
    for v in 0..d {
        if visited[v as usize] || arith::gcd(v, d) != 1 {
            continue;
        }
        let mut cycle = Vec::new();
        let mut w = v;
        while !visited[w as usize] {
            visited[w as usize] = true;
            cycle.push(m * w);
            w = arith::mul_mod(w, step, d);
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Whether `set` is k-free in `Z/nZ`: no `x` in the set has `kx mod n` in
/// the set. Duplicates are ignored.
pub fn is_kfree(set: &[u64], k: u64, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if let Some(&x) = set.iter().find(|&&x| x >= n) {
        return Err(Error::OutOfRange { x, n });
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let k = k % n;
    Ok(sorted
        .iter()
        .all(|&x| sorted.binary_search(&arith::mul_mod(k, x, n)).is_err()))
}

/// A residue set together with the map it is claimed to be free for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KFreeSet {
    pub n: u64,
    pub k: u64,
    /// Distinct residues, ascending.
    pub elements: Vec<u64>,
}

impl KFreeSet {
    pub fn new(k: u64, n: u64, mut elements: Vec<u64>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Self { n, k, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn verify(&self) -> Result<bool> {
        is_kfree(&self.elements, self.k, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(k: u64, n: u64) -> ModulusContext {
        ModulusContext::new(k, n).unwrap()
    }

    /// gcd of each element of k·A_m with n, by enumeration.
    fn image_by_enumeration(m: u64, c: &ModulusContext) -> HashSet<u64> {
        stratum_elements(m, c)
            .unwrap()
            .into_iter()
            .map(|x| arith::gcd(arith::mul_mod(c.k(), x, c.n()), c.n()))
            .map(|g| if g == 0 { c.n() } else { g })
            .collect()
    }

    #[test]
    fn context_split() {
        let c = ctx(15, 826875);
        assert_eq!(c.r(), 2);
        assert_eq!(c.s(), 3);
        assert_eq!(c.unit(), 1);
        assert_eq!(
            c.shared(),
            &[
                SharedPrime {
                    p: 3,
                    n_exp: 3,
                    k_exp: 1
                },
                SharedPrime {
                    p: 5,
                    n_exp: 4,
                    k_exp: 1
                }
            ]
        );
        let c = ctx(12 * 7, 16 * 9);
        assert_eq!(c.unit(), 7);
        assert_eq!(
            c.shared()[0],
            SharedPrime {
                p: 2,
                n_exp: 4,
                k_exp: 2
            }
        );
        assert_eq!(
            c.shared()[1],
            SharedPrime {
                p: 3,
                n_exp: 2,
                k_exp: 1
            }
        );
        assert_eq!(ctx(20, 8).k(), 4);
    }

    #[test]
    fn stratum_image_examples() {
        let c = ctx(15, 826875);
        assert_eq!(stratum_image(9 * 125 * 7, 1, &c).unwrap(), 27 * 625 * 7);
        assert_eq!(stratum_image(826875, 3, &c).unwrap(), 826875);
        assert_eq!(stratum_image(1, 1, &ctx(2, 12)).unwrap(), 2);
        assert_eq!(
            stratum_image(5, 1, &ctx(2, 12)),
            Err(Error::NotDivisor { m: 5, n: 12 })
        );
        let c = ctx(15, 826875);
        let image = image_by_enumeration(9 * 125 * 7, &c);
        assert_eq!(image, HashSet::from([27 * 625 * 7]));
    }

    #[test]
    fn stratum_elements_examples() {
        assert_eq!(stratum_elements(4, &ctx(2, 12)).unwrap(), vec![4, 8]);
        assert_eq!(stratum_elements(12, &ctx(2, 12)).unwrap(), vec![0]);
        assert_eq!(
            stratum_elements(1, &ctx(2, 7)).unwrap(),
            vec![1, 2, 3, 4, 5, 6]
        );
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit(1, &ctx(2, 7)).unwrap(), vec![1, 2, 4]);
        assert_eq!(orbit(0, &ctx(2, 7)).unwrap(), vec![0]);
        assert_eq!(orbit(1, &ctx(2, 12)).unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(
            orbit(12, &ctx(2, 12)),
            Err(Error::OutOfRange { x: 12, n: 12 })
        );
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(
            root_stratum_cycles(1, &ctx(2, 7)).unwrap(),
            vec![vec![1, 2, 4], vec![3, 6, 5]]
        );
        assert_eq!(root_stratum_cycles(12, &ctx(2, 12)).unwrap(), vec![vec![0]]);
        let cycles = root_stratum_cycles(1, &ctx(2, 15)).unwrap();
        assert_eq!(cycles.len(), 2);
        assert!(cycles.iter().all(|c| c.len() == 4));
        assert_eq!(
            root_stratum_cycles(1, &ctx(2, 12)),
            Err(Error::NotRoot { m: 1 })
        );
    }

    #[test]
    fn kfree_examples() {
        assert!(is_kfree(&[1, 5, 7, 11, 3, 9, 4], 2, 12).unwrap());
        assert!(is_kfree(&[], 2, 12).unwrap());
        assert!(!is_kfree(&[0], 5, 12).unwrap());
        assert!(!is_kfree(&[1, 2], 2, 12).unwrap());
        assert_eq!(
            is_kfree(&[12], 2, 12),
            Err(Error::OutOfRange { x: 12, n: 12 })
        );
    }

    #[test]
    fn strata_partition_residues() {
        for n in 1..=600u64 {
            let c = ctx(2, n);
            let mut all: Vec<u64> = c
                .divisor_exponents()
                .iter()
                .flat_map(|(m, _)| {
                    let s = c.stratum(*m).unwrap();
                    let elems = stratum_elements(*m, &c).unwrap();
                    assert_eq!(elems.len() as u64, s.size);
                    elems
                })
                .collect();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>(), "n={n}");
        }
    }

    #[test]
    fn dilation_maps_strata_onto_strata() {
        for n in 1..=300u64 {
            for k in 1..=30u64 {
                let c = ctx(k, n);
                for (m, _) in c.divisor_exponents() {
                    let target = stratum_image(m, 1, &c).unwrap();
                    let image: HashSet<u64> = stratum_elements(m, &c)
                        .unwrap()
                        .into_iter()
                        .map(|x| arith::mul_mod(k, x, n))
                        .collect();
                    let expected: HashSet<u64> =
                        stratum_elements(target, &c).unwrap().into_iter().collect();
                    assert_eq!(image, expected, "n={n} k={k} m={m}");
                    assert_eq!(c.is_root(m).unwrap(), target == m);
                }
            }
        }
    }

    #[test]
    fn root_orbits_have_order_length() {
        for n in 2..=400u64 {
            for k in [2u64, 3, 5, 6, 10] {
                let c = ctx(k, n);
                for (m, exps) in c.divisor_exponents() {
                    if !c.is_root_exponents(&exps) {
                        continue;
                    }
                    let l = arith::multiplicative_order(k, n / m).unwrap() as usize;
                    for x in stratum_elements(m, &c).unwrap() {
                        assert_eq!(orbit(x, &c).unwrap().len(), l);
                    }
                    let cycles = root_stratum_cycles(m, &c).unwrap();
                    assert!(cycles.iter().all(|cy| cy.len() == l));
                }
            }
        }
    }
}
