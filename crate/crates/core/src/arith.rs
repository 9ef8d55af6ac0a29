//! Integer plumbing: factorization, Euler's totient, divisors and
//! multiplicative orders on machine-width integers.
//!
//! Every product is overflow-checked; nothing here wraps silently.

use std::fmt;

use crate::error::{Error, Result};

/// Canonical prime factorization of a positive integer.
///
/// Primes are strictly increasing and every exponent is at least one. The
/// empty factorization represents 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from `(prime, exponent)` pairs. Pairs with a
    /// zero exponent are dropped and equal primes are merged. Primality of
    /// the bases is not checked.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Self {
        let mut factors: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Self { factors: merged }
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of distinct primes.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn value(&self) -> Result<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, e)| {
            checked_pow(p, e)
                .and_then(|q| acc.checked_mul(q))
                .ok_or(Error::Overflow("factorization value"))
        })
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(_, e)| u64::from(e) + 1)
            .product()
    }
}

impl fmt::Display for Factorization {
    /// Formats as `p1^e1·p2^e2`, omitting unit exponents; `1` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_BOUND: u64 = 1 << 12;

/// Factorizes `n` by trial division followed by Brent's variant of Pollard
/// rho. Seeds are fixed, so the output is deterministic.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut primes = Vec::new();
    let mut rest = n;
    while rest % 2 == 0 {
        primes.push(2);
        rest /= 2;
    }
    let mut d = 3u64;
    while d <= TRIAL_BOUND && d * d <= rest {
        while rest % d == 0 {
            primes.push(d);
            rest /= d;
        }
        d += 2;
    }
    if rest > 1 {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime(m) {
                primes.push(m);
                continue;
            }
            let f = pollard_brent(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    Ok(Factorization::from_pairs(
        primes.into_iter().map(|p| (p, 1)),
    ))
}

/// Returns a nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if let Some(r) = exact_sqrt(n) {
        return r;
    }
    let step = |y: u64, c: u64| (mul_mod(y, y, n) + c) % n;
    for c in 1u64.. {
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys, c);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho exhausted all seeds")
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&s| s.checked_mul(s) == Some(n))
}

/// φ(n) from the factorization of n.
pub fn euler_phi(f: &Factorization) -> Result<u64> {
    f.factors().iter().try_fold(1u64, |acc, &(p, e)| {
        checked_pow(p, e - 1)
            .and_then(|q| q.checked_mul(p - 1))
            .and_then(|t| acc.checked_mul(t))
            .ok_or(Error::Overflow("euler_phi"))
    })
}

/// All divisors of the factorized integer, ascending by value.
pub fn divisors(f: &Factorization) -> Result<Vec<Factorization>> {
    // value is checked once; every divisor is bounded by it
    f.value()?;
    let mut out: Vec<(u64, Vec<(u64, u32)>)> = vec![(1, Vec::new())];
    for &(p, e) in f.factors() {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for (v, pairs) in &out {
            let mut value = *v;
            next.push((value, pairs.clone()));
            for i in 1..=e {
                value *= p;
                let mut with = pairs.clone();
                with.push((p, i));
                next.push((value, with));
            }
        }
        out = next;
    }
    out.sort_unstable_by_key(|(v, _)| *v);
    Ok(out
        .into_iter()
        .map(|(_, factors)| Factorization { factors })
        .collect())
}

/// Multiplicative order of `k` in `(Z/dZ)^*`, with the convention that the
/// order modulo 1 is 1.
pub fn multiplicative_order(k: u64, d: u64) -> Result<u64> {
    let df = factorize(d)?;
    multiplicative_order_factored(k, d, &df)
}

/// As [`multiplicative_order`], reusing a known factorization of `d`.
///
/// Starts from φ(d) and strips each prime factor while the power stays 1.
pub fn multiplicative_order_factored(k: u64, d: u64, df: &Factorization) -> Result<u64> {
    if d == 0 {
        return Err(Error::Zero);
    }
    if gcd(k % d, d) != 1 {
        return Err(Error::NotCoprime { k, d });
    }
    if d == 1 {
        return Ok(1);
    }
    let phi = euler_phi(df)?;
    let mut order = phi;
    for &(q, _) in factorize(phi)?.factors() {
        while order % q == 0 && pow_mod(k, order / q, d) == 1 {
            order /= q;
        }
    }
    Ok(order)
}
