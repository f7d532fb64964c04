use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use expsum::arith::{crt_exact_divisibility, exactly_divides, gcd, moebius, totient, FactorTable, PrimePowerList};
use expsum::characters::{conductor_and_primitive_part, enumerate_characters};
use expsum::complexsum::PhaseAngle;
use expsum::expsum::{char_partial_sum, sum_trajectory, Schedule};
use expsum::multfun::{construct_example1, construct_example2, MultiplicativeFunctionSpec, PrimeSelector};
use expsum::pretentious::{distance_squared, mean_value_f};

#[test]
fn factorizations_reconstruct() {
    let table = FactorTable::new(100_000).unwrap();
    for n in 1..=100_000u64 {
        let f = table.factorize(n).unwrap();
        assert_eq!(f.product(), Some(n as u128), "n = {n}");
    }
}

#[test]
fn moebius_sums_to_indicator() {
    for n in 1..=10_000u64 {
        let s: i64 = (1..=n).filter(|d| n % d == 0).map(|d| moebius(d).unwrap() as i64).sum();
        assert_eq!(s, (n == 1) as i64, "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn totient_is_multiplicative(m in 1u64..100_000, n in 1u64..100_000) {
        prop_assume!(gcd(m, n) == 1);
        prop_assert_eq!(totient(m * n).unwrap(), totient(m).unwrap() * totient(n).unwrap());
    }
}

fn crt_config() -> impl Strategy<Value = (u64, u64, Vec<(u64, u64, u32)>)> {
    (1u64..=5, 1u64..=1000).prop_flat_map(|(h, w)| {
        let primes: Vec<u64> = [7u64, 11, 13, 17, 19, 23].into_iter().filter(|p| w % p != 0).collect();
        let n = primes.len();
        (
            Just(h),
            Just(w),
            proptest::sample::subsequence(primes, 0..=n.min(4)).prop_flat_map(move |ps| {
                let len = ps.len();
                (Just(ps), proptest::collection::vec((1..=h, 1u32..=3), len))
                    .prop_map(|(ps, xs)| ps.into_iter().zip(xs).map(|(p, (j, a))| (j, p, a)).collect())
            }),
        )
    })
}

proptest! {
    #[test]
    fn crt_residues_divide_exactly((h, w, picks) in crt_config()) {
        let mut grouped: BTreeMap<u64, Vec<(u64, u32)>> = BTreeMap::new();
        for (j, p, a) in picks {
            grouped.entry(j).or_default().push((p, a));
        }
        let lists: BTreeMap<u64, PrimePowerList> = grouped
            .into_iter()
            .map(|(j, mut f)| {
                f.sort_unstable();
                (j, PrimePowerList::new(f).unwrap())
            })
            .collect();
        let sol = crt_exact_divisibility(h, &lists, w).unwrap();
        for n in [sol.residue, sol.residue + sol.modulus, sol.residue + 7 * sol.modulus] {
            for (&j, list) in &lists {
                prop_assert!(exactly_divides(list, w as u128 * n + j as u128));
            }
        }
    }

    #[test]
    fn character_products_close(m in 1u64..=60, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let chars = enumerate_characters(m).unwrap();
        let (a, b) = (&chars[i.index(chars.len())], &chars[j.index(chars.len())]);
        let product: Vec<Complex64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
        let found = chars.iter().any(|c| c.values().iter().zip(&product).all(|(x, y)| (x - y).norm() <= 1e-12));
        prop_assert!(found);
    }

    #[test]
    fn primitive_part_is_idempotent(m in 1u64..=200, i in any::<prop::sample::Index>()) {
        let chars = enumerate_characters(m).unwrap();
        let (m0, psi) = conductor_and_primitive_part(&chars[i.index(chars.len())]);
        let (m1, again) = conductor_and_primitive_part(&psi);
        prop_assert_eq!(m0, m1);
        prop_assert_eq!(psi.label(), again.label());
        prop_assert!(psi.is_primitive());
    }
}

#[test]
fn eval_at_is_multiplicative() {
    let table = FactorTable::new(1_000_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut coprime = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        let spec = MultiplicativeFunctionSpec::random(&mut rng);
        let mut tested = 0;
        while tested < 10_000 {
            let m = rand::Rng::gen_range(&mut coprime, 1..1000u64);
            let n = rand::Rng::gen_range(&mut coprime, 1..1000u64);
            if gcd(m, n) != 1 {
                continue;
            }
            let lhs = spec.eval_at(m * n, &table).unwrap();
            let rhs = spec.eval_at(m, &table).unwrap() * spec.eval_at(n, &table).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12, "{m} {n}");
            tested += 1;
        }
    }
}

#[test]
fn constructions_have_no_zero_support() {
    let ex1 = construct_example1(PhaseAngle::sqrt2_minus_1(), 5).unwrap();
    let ex2 = construct_example2(4, &PrimeSelector::Sparse).unwrap();
    for spec in [&ex1.spec, &ex2.spec] {
        assert!(spec.zero_support().is_empty());
        assert!(spec.zero_support_sum(1_000_000) < 1.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..20 {
        let spec = MultiplicativeFunctionSpec::random(&mut rng);
        let sums: Vec<f64> = [10, 100, 1_000, 1_000_000].iter().map(|&b| spec.zero_support_sum(b)).collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn character_sums_bounded_by_length(m in 1u64..=30, i in any::<prop::sample::Index>(), frac in any::<u128>(), x in 0u64..5000) {
        let chars = enumerate_characters(m).unwrap();
        let s = char_partial_sum(&chars[i.index(chars.len())], PhaseAngle::Fixed(frac), x).unwrap();
        prop_assert!(s.norm() <= x as f64 + 1e-9);
    }

    #[test]
    fn running_sup_is_monotone(seed in any::<u64>(), frac in any::<u128>(), t in -3.0f64..3.0) {
        let spec = MultiplicativeFunctionSpec::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let tr = sum_trajectory(&spec, PhaseAngle::Fixed(frac), t, 20_000, &Schedule::Linear { step: 97 }).unwrap();
        for w in tr.checkpoints.windows(2) {
            prop_assert!(w[0].running_sup <= w[1].running_sup);
        }
        for c in &tr.checkpoints {
            prop_assert!(c.value.norm() <= c.running_sup);
        }
    }

    #[test]
    fn distance_squared_is_additive(seed in any::<u64>(), y in 1u64..50_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = MultiplicativeFunctionSpec::random(&mut rng);
        let g = MultiplicativeFunctionSpec::random(&mut rng);
        let x = 50_000;
        let whole = distance_squared(&f, &g, 1, x).unwrap();
        let split = distance_squared(&f, &g, 1, y).unwrap() + distance_squared(&f, &g, y, x).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn mean_value_vanishes_for_characters(m in 1u64..=40, i in any::<prop::sample::Index>(), mult in 1u64..4, x in 1u64..20_000) {
        let chars = enumerate_characters(m).unwrap();
        let chi = &chars[i.index(chars.len())];
        let f = MultiplicativeFunctionSpec::character(chi.clone());
        prop_assert_eq!(mean_value_f(&f, chi, 0.0, m * mult, x).unwrap(), Complex64::new(0.0, 0.0));
    }
}
