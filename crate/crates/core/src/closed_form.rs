//! Closed-form evaluators for `R_k(n)` on special shapes of `(k, n)`.
//!
//! These are fast paths. The divisor forest ([`crate::forest::rk_general`])
//! is the canonical answer; [`rk_auto`] evaluates every applicable formula
//! and reports an error on any disagreement.

use std::fmt;

use crate::arith::{self, Factorization};
use crate::error::{Error, Result};
use crate::forest;
use crate::strata::ModulusContext;

/// How an `R_k(n)` value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Coprime,
    Km,
    K2m,
    Thm5,
    Forest,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Coprime => "coprime",
            Method::Km => "km",
            Method::K2m => "k2m",
            Method::Thm5 => "thm5",
            Method::Forest => "forest",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RkValue {
    pub value: u64,
    pub method: Method,
}

impl RkValue {
    pub fn new(value: u64, method: Method) -> Self {
        Self { value, method }
    }
}

/// `R_k(n)` for `gcd(k, n) = 1`: half of every cycle, rounded down, over
/// all nonzero residues. Computed as `(n - 1 - S)/2` where `S` counts the
/// cycles of odd length; both divisions are checked to be exact.
pub fn rk_coprime(k: u64, n: u64) -> Result<RkValue> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if arith::gcd(k % n, n) != 1 {
        return Err(Error::NotCoprime { k, d: n });
    }
    let mut odd_cycles = 0u64;
    for d in arith::divisors(&arith::factorize(n)?)?.iter().skip(1) {
        let dv = d.value()?;
        let l = arith::multiplicative_order_factored(k % dv, dv, d)?;
        if l % 2 == 1 {
            let phi = arith::euler_phi(d)?;
            if phi % l != 0 {
                return Err(Error::NotIntegral("cycle count"));
            }
            odd_cycles += phi / l;
        }
    }
    let twice = (n - 1)
        .checked_sub(odd_cycles)
        .ok_or(Error::Inconsistent(format!(
            "odd cycle count {odd_cycles} exceeds n - 1"
        )))?;
    if twice % 2 != 0 {
        return Err(Error::NotIntegral("coprime formula"));
    }
    Ok(RkValue::new(twice / 2, Method::Coprime))
}

/// `R_k(km) = (k - 1)m` when `k` does not divide `m`.
pub fn rk_km(k: u64, m: u64) -> Result<RkValue> {
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    if m == 0 {
        return Err(Error::Zero);
    }
    if m % k == 0 {
        return Err(Error::NotApplicable(format!("{k} divides m = {m}")));
    }
    k.checked_mul(m).ok_or(Error::Overflow("k·m"))?;
    Ok(RkValue::new((k - 1) * m, Method::Km))
}

/// `R_k(k²m) = R_k(m) + (k² - k)m`, stripping `k²` factors until it no
/// longer divides the argument, then finishing with the forest.
pub fn rk_k2m(k: u64, m: u64) -> Result<RkValue> {
    if k == 0 || m == 0 {
        return Err(Error::Zero);
    }
    let k2 = k.checked_mul(k).ok_or(Error::Overflow("k²"))?;
    k2.checked_mul(m).ok_or(Error::Overflow("k²·m"))?;
    if k == 1 {
        return Ok(RkValue::new(0, Method::K2m));
    }
    let mut arg = m;
    let mut acc = (k2 - k) * m;
    while arg % k2 == 0 {
        arg /= k2;
        acc += (k2 - k) * arg;
    }
    let base = forest::rk_general(&ModulusContext::new(k, arg)?)?.value;
    Ok(RkValue::new(acc + base, Method::K2m))
}

/// Which special shape of `(k, n)` a prime-power formula was applied to.
/// In every case `k = u·p^v` with `gcd(u, p) = 1` (and `gcd(u, q) = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimePowerShape {
    /// `k = up`, `n = p^α`.
    LinearPrimePower { p: u64, u: u64, alpha: u32 },
    /// `k = up²`, `n = p^α`.
    SquarePrimePower { p: u64, u: u64, alpha: u32 },
    /// `k = up`, `n = p^α q^β`.
    LinearTwoPrimes {
        p: u64,
        q: u64,
        u: u64,
        alpha: u32,
        beta: u32,
    },
    /// `k = up²`, `n = p^α q^β`.
    SquareTwoPrimes {
        p: u64,
        q: u64,
        u: u64,
        alpha: u32,
        beta: u32,
    },
}

impl PrimePowerShape {
    /// 1-based index in the usual listing of the four formulas.
    pub fn index(&self) -> usize {
        match self {
            PrimePowerShape::LinearPrimePower { .. } => 1,
            PrimePowerShape::SquarePrimePower { .. } => 2,
            PrimePowerShape::LinearTwoPrimes { .. } => 3,
            PrimePowerShape::SquareTwoPrimes { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePowerEval {
    pub shape: PrimePowerShape,
    /// The sum of totients exactly as the closed formula states it.
    pub value: RkValue,
    /// The same sum with the root strata `m = p^α q^j` valued correctly:
    /// the `m = n` term (`A_n = {0}`) dropped and the roots that the
    /// greedy selection keeps added with their cycle valuation.
    pub corrected: u64,
}

fn phi_of(pairs: &[(u64, u32)]) -> Result<u64> {
    arith::euler_phi(&Factorization::from_pairs(pairs.iter().copied()))
}

/// Evaluates the four prime-power formulas for `k = up` / `k = up²` and
/// `n = p^α` / `n = p^α q^β`. `Ok(None)` when no shape matches.
pub fn rk_theorem5(k: u64, n: u64) -> Result<Option<PrimePowerEval>> {
    if k == 0 {
        return Err(Error::Zero);
    }
    let nf = arith::factorize(n)?;
    let ctx = ModulusContext::with_factorization(k, n, nf.clone())?;
    let mut found: Vec<PrimePowerEval> = Vec::new();

    let pairs = nf.factors();
    for (idx, &(p, alpha)) in pairs.iter().enumerate() {
        let mut v = 0u32;
        let mut u = k;
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        if v != 1 && v != 2 {
            continue;
        }
        let other = match pairs.len() {
            1 => None,
            2 => Some(pairs[1 - idx]),
            _ => continue,
        };
        if let Some((q, _)) = other {
            if u % q == 0 {
                continue;
            }
        }
        let beta = other.map_or(0, |(_, b)| b);
        let q = other.map_or(1, |(q, _)| q);
        let step = v; // exponent gained by p per multiplication
        let half = |a: u32| (a - 1) / (2 * step);

        let mut printed = 0u64;
        let mut dropped = 0u64;
        for j in 0..=beta {
            for i in 0..=half(alpha) {
                let e = alpha - 2 * step * i;
                printed += phi_of(&[(p, e), (q, beta - j)])?;
                if step == 2 {
                    // e - 1 may be 0: that vertex is the root p^α q^j
                    let t = phi_of(&[(p, e - 1), (q, beta - j)])?;
                    printed += t;
                    if e == 1 {
                        dropped += t;
                    }
                }
            }
        }

        // The root p^α q^j is kept iff none of its children is, which
        // happens for α even (k = up) or α ≡ 0 mod 4 (k = up²).
        let root_kept = if step == 1 {
            alpha % 2 == 0
        } else {
            alpha % 4 == 0
        };
        let mut roots = 0u64;
        if root_kept {
            for j in 0..=beta {
                let m = p.pow(alpha) * q.pow(j);
                roots += forest::root_valuation(m, &ctx)?;
            }
        }

        let shape = match (step, other) {
            (1, None) => PrimePowerShape::LinearPrimePower { p, u, alpha },
            (2, None) => PrimePowerShape::SquarePrimePower { p, u, alpha },
            (1, Some(_)) => PrimePowerShape::LinearTwoPrimes {
                p,
                q,
                u,
                alpha,
                beta,
            },
            _ => PrimePowerShape::SquareTwoPrimes {
                p,
                q,
                u,
                alpha,
                beta,
            },
        };
        found.push(PrimePowerEval {
            shape,
            value: RkValue::new(printed, Method::Thm5),
            corrected: printed - dropped + roots,
        });
    }

    // Only one prime of n can carry the shape; keep the check anyway.
    if let Some(first) = found.first() {
        if let Some(other) = found.iter().find(|e| e.value.value != first.value.value) {
            return Err(Error::Inconsistent(format!(
                "shapes {:?} and {:?} disagree",
                first.shape, other.shape
            )));
        }
    }
    Ok(found.into_iter().next())
}

fn mersenne_modulus(m: u32) -> Result<u64> {
    if !(2..=63).contains(&m) {
        return Err(Error::NotMersennePrime { m });
    }
    let n = (1u64 << m) - 1;
    if !arith::is_prime(n) {
        return Err(Error::NotMersennePrime { m });
    }
    Ok(n)
}

/// `R_2(2^m - 1)` for a Mersenne prime, using that the order of 2 is `m`:
/// `(n-1)/2 - (n-1)/(2m)`. For `m = 2` the order is even and nothing is
/// subtracted.
pub fn mersenne_rk(m: u32) -> Result<RkValue> {
    let n = mersenne_modulus(m)?;
    if m % 2 == 0 {
        return Ok(RkValue::new((n - 1) / 2, Method::Coprime));
    }
    let denom = 2 * u64::from(m);
    if (n - 1) % denom != 0 {
        return Err(Error::NotIntegral("mersenne formula"));
    }
    Ok(RkValue::new((n - 1) / 2 - (n - 1) / denom, Method::Coprime))
}

/// Upper bounds on a 2-fold Sidon set in `Z/nZ`, `n = 2^m - 1` prime.
///
/// `printed` evaluates `sqrt((n-1)/2 - (n-1)/log2(n-1) + 1/4) + 1/2` as
/// written; `exact` is `sqrt(R_2(n) + 1/4) + 1/2` with the exact value of
/// `R_2(n)`, i.e. the largest `a` with `a(a - 1) <= R_2(n)` after flooring.
#[derive(Debug, Clone, PartialEq)]
pub struct SidonBound {
    pub m: u32,
    pub n: u64,
    pub printed: Option<f64>,
    pub printed_floor: Option<u64>,
    pub exact: f64,
    pub exact_floor: u64,
    pub rk: u64,
    pub warnings: Vec<String>,
}

pub fn sidon_bound(m: u32) -> Result<SidonBound> {
    let n = mersenne_modulus(m)?;
    let rk = mersenne_rk(m)?.value;
    let mut warnings = Vec::new();

    let nm1 = (n - 1) as f64;
    let radicand = nm1 / 2.0 - nm1 / nm1.log2() + 0.25;
    let printed = if radicand >= 0.0 {
        Some(radicand.sqrt() + 0.5)
    } else {
        warnings.push(format!(
            "printed expression has a negative radicand ({radicand}) for n = {n}"
        ));
        None
    };
    if m <= 2 {
        warnings.push(format!("degenerate modulus n = {n}"));
    }

    let exact = (rk as f64 + 0.25).sqrt() + 0.5;
    // largest a with a(a-1) <= rk
    let mut a = exact.floor() as u64 + 1;
    while a * (a - 1) > rk {
        a -= 1;
    }
    let exact_floor = a;
    if let Some(p) = printed {
        if (p.floor() as u64) != exact_floor {
            warnings.push(format!(
                "printed bound floors to {} but the exact-order bound floors to {exact_floor}",
                p.floor()
            ));
        }
    }
    Ok(SidonBound {
        m,
        n,
        printed,
        printed_floor: printed.map(|p| p.floor() as u64),
        exact,
        exact_floor,
        rk,
        warnings,
    })
}

/// Checks `R_k(k^{2m}) = k(k^{2m} - 1)/(k + 1)` with the forest solver.
pub fn density_identity_check(k: u64, m: u32) -> Result<bool> {
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    let n = k.checked_pow(2 * m).ok_or(Error::Overflow("k^(2m)"))?;
    let expected = (n - 1) / (k + 1) * k;
    let got = forest::rk_general(&ModulusContext::new(k, n)?)?.value;
    Ok(got == expected)
}

/// Result of evaluating every applicable method on one `(k, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoReport {
    pub value: u64,
    /// Every method that applied, with its value; the forest comes first.
    pub evaluations: Vec<RkValue>,
}

/// Runs the forest and every applicable closed form on `(k, n)`, failing
/// with [`Error::Inconsistent`] if any two disagree.
pub fn rk_auto(ctx: &ModulusContext) -> Result<AutoReport> {
    let (k, n) = (ctx.k(), ctx.n());
    let canonical = forest::rk_general(ctx)?;
    let mut evaluations = vec![canonical];
    if k != 0 {
        if ctx.is_coprime() {
            evaluations.push(rk_coprime(k, n)?);
        }
        if k >= 2 && n % k == 0 && (n / k) % k != 0 {
            evaluations.push(rk_km(k, n / k)?);
        }
        if k >= 2 && n % (k * k) == 0 {
            evaluations.push(rk_k2m(k, n / (k * k))?);
        }
        if let Some(eval) = rk_theorem5(k, n)? {
            evaluations.push(eval.value);
        }
    }
    if let Some(bad) = evaluations.iter().find(|e| e.value != canonical.value) {
        return Err(Error::Inconsistent(format!(
            "R_{k}({n}): {} gives {} but forest gives {}",
            bad.method, bad.value, canonical.value
        )));
    }
    Ok(AutoReport {
        value: canonical.value,
        evaluations,
    })
}
