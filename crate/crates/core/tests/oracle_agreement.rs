use kfree_core::arith;
use kfree_core::closed_form::{rk_coprime, rk_k2m, rk_km, rk_theorem5};
use kfree_core::forest::{build_forest, construct_max_kfree, rk_general, root_valuation};
use kfree_core::oracle::{oracle_rk_exhaustive, oracle_rk_pseudoforest, PseudoforestGraph};
use kfree_core::strata::ModulusContext;

fn general(k: u64, n: u64) -> u64 {
    rk_general(&ModulusContext::new(k, n).unwrap())
        .unwrap()
        .value
}

#[test]
fn forest_matches_pseudoforest_oracle() {
    for k in [2u64, 3, 4, 6, 10, 12, 15] {
        for n in 1..=3000u64 {
            assert_eq!(
                general(k, n),
                oracle_rk_pseudoforest(k, n).unwrap(),
                "k={k} n={n}"
            );
        }
    }
}

#[test]
fn forest_matches_exhaustive_oracle() {
    for k in 0..=12u64 {
        for n in 1..=20u64 {
            assert_eq!(
                general(k, n),
                oracle_rk_exhaustive(k, n).unwrap(),
                "k={k} n={n}"
            );
        }
    }
}

#[test]
fn coprime_formula_matches_forest_and_oracle() {
    for k in [2u64, 3, 5, 7] {
        for n in 1..=2000u64 {
            if arith::gcd(k, n) != 1 {
                continue;
            }
            let closed = rk_coprime(k, n).unwrap().value;
            assert_eq!(closed, general(k, n), "k={k} n={n}");
            assert_eq!(closed, oracle_rk_pseudoforest(k, n).unwrap(), "k={k} n={n}");
        }
    }
}

#[test]
fn recursions_match_forest() {
    for k in 2..=12u64 {
        for m in 1..=200u64 {
            if m % k != 0 {
                assert_eq!(rk_km(k, m).unwrap().value, general(k, k * m), "k={k} m={m}");
            }
        }
    }
    for k in 1..=6u64 {
        for m in 1..=100u64 {
            assert_eq!(
                rk_k2m(k, m).unwrap().value,
                general(k, k * k * m),
                "k={k} m={m}"
            );
        }
    }
}

#[test]
fn corrected_prime_power_sums_match_forest_everywhere_it_applies() {
    let mut applied = 0;
    for k in 2..=60u64 {
        for n in 2..=4000u64 {
            if let Some(eval) = rk_theorem5(k, n).unwrap() {
                assert_eq!(
                    eval.corrected,
                    general(k, n),
                    "k={k} n={n} {:?}",
                    eval.shape
                );
                applied += 1;
            }
        }
    }
    assert!(applied > 1000);
}

#[test]
fn witnesses_are_kfree_and_optimal() {
    for k in [2u64, 3, 4, 6, 10, 12, 15] {
        for n in 1..=1500u64 {
            let ctx = ModulusContext::new(k, n).unwrap();
            let w = construct_max_kfree(&ctx).unwrap();
            assert!(w.verify().unwrap(), "k={k} n={n}");
            assert_eq!(
                w.len() as u64,
                rk_general(&ctx).unwrap().value,
                "k={k} n={n}"
            );
        }
    }
}

/// Cycles of `x ↦ kx` live in root strata, fixed points in root strata
/// where `k ≡ 1`.
#[test]
fn pseudoforest_census_matches_strata() {
    for k in [2u64, 3, 5, 6, 10] {
        for n in 1..=10_000u64 {
            let ctx = ModulusContext::new(k, n).unwrap();
            let f = build_forest(&ctx).unwrap();
            let (mut cycles, mut fixed) = (0u64, 0u64);
            for &r in f.roots() {
                let d = n / r;
                let phi = arith::euler_phi(&arith::factorize(d).unwrap()).unwrap();
                let l = arith::multiplicative_order(k % d, d).unwrap();
                cycles += phi / l;
                if l == 1 {
                    fixed += phi;
                }
            }
            let g = PseudoforestGraph::new(k, n).unwrap();
            assert_eq!(g.cycles().len() as u64, cycles, "k={k} n={n}");
            assert_eq!(g.forbidden_count(), fixed, "k={k} n={n}");
            assert_eq!(fixed, arith::gcd(k - 1, n));
        }
    }
}

#[test]
fn root_valuation_matches_cycle_halving() {
    for n in 2..=400u64 {
        for k in [2u64, 3, 7] {
            let ctx = ModulusContext::new(k, n).unwrap();
            for (m, exps) in ctx.divisor_exponents() {
                if !ctx.is_root_exponents(&exps) {
                    continue;
                }
                let cycles = kfree_core::strata::root_stratum_cycles(m, &ctx).unwrap();
                let halves: u64 = cycles.iter().map(|c| c.len() as u64 / 2).sum();
                assert_eq!(root_valuation(m, &ctx).unwrap(), halves);
            }
        }
    }
}

/// Numerical witness that `(n-1)/2 - R_2(n)` is `o(n)` over odd `n`:
/// the worst ratio over a late window is far below the early worst case.
#[test]
fn coprime_deficiency_shrinks() {
    let window_max = |lo: u64, hi: u64| -> f64 {
        (lo..=hi)
            .filter(|n| n % 2 == 1)
            .map(|n| {
                let r = rk_coprime(2, n).unwrap().value;
                ((n - 1) as f64 / 2.0 - r as f64) / n as f64
            })
            .fold(0.0, f64::max)
    };
    let first = window_max(3, 1000);
    let last = window_max(50_001, 100_000);
    assert!(last < 0.05, "window max {last}");
    assert!(last < first);
}
