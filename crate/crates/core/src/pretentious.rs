//! Pretentious distance `𝔻(f, g; y, x)`, the prime sum `F(Q)`, and the
//! logarithmic correlation estimator.
//!
//! Prime values are kept symbolically where possible (`e(a/q)` for
//! character values, times `p^{it}` for twists) so that `f·ḡ` is exactly
//! `1` whenever `f(p) = g(p)` by construction.

use std::ops::Add;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{gcd, primes_between};
use crate::characters::DirichletCharacter;
use crate::complexsum::{root_of_unity, twist_unchecked, CompensatedAccumulator, PhaseAngle, PhaseTable, ZERO};
use crate::error::{Error, Result};
use crate::multfun::{eval_range, Base, MultiplicativeFunctionSpec};
use crate::par::Exec;

/// Largest prime bound accepted.
pub const MAX_PRIME_BOUND: u64 = u32::MAX as u64;

const WINDOW: u64 = 1 << 20;

/// `f(p)` as an exact root of unity, optionally twisted, when known.
#[derive(Debug, Clone, Copy, PartialEq)]
enum PrimeValue {
    Zero,
    /// `e(num/den)·p^{it}`
    Root { num: u64, den: u64, t: f64 },
    General(Complex64),
}

impl PrimeValue {
    fn of(spec: &MultiplicativeFunctionSpec, p: u64) -> Self {
        if let Some(v) = spec.override_at_prime(p) {
            return if v == ZERO { PrimeValue::Zero } else { PrimeValue::General(v) };
        }
        let (chi, t) = match spec.base() {
            Base::One => return PrimeValue::Root { num: 0, den: 1, t: 0.0 },
            Base::Character(chi) => (chi, 0.0),
            Base::TwistedCharacter(chi, t) => (chi, *t),
        };
        match chi.turn(p) {
            None => PrimeValue::Zero,
            Some((num, den)) => PrimeValue::Root { num, den, t },
        }
    }

    fn twisted_character(chi: &DirichletCharacter, t: f64, p: u64) -> Self {
        match chi.turn(p) {
            None => PrimeValue::Zero,
            Some((num, den)) => PrimeValue::Root { num, den, t },
        }
    }

    fn value(self, p: u64) -> Complex64 {
        match self {
            PrimeValue::Zero => ZERO,
            PrimeValue::Root { num, den, t } => root_of_unity(num, den) * twist_unchecked(p, t),
            PrimeValue::General(v) => v,
        }
    }

    /// `a(p)·conj(b(p))`, exactly `1` for equal symbolic values.
    fn times_conj(a: Self, b: Self, p: u64) -> Complex64 {
        match (a, b) {
            (PrimeValue::Zero, _) | (_, PrimeValue::Zero) => ZERO,
            (
                PrimeValue::Root { num: a, den: q, t: s },
                PrimeValue::Root { num: b, den: r, t },
            ) => {
                let den = q as u128 * r as u128;
                let num = (a as u128 * r as u128 + den - b as u128 * q as u128 % den) % den;
                let g = crate::arith::gcd_u128(num, den);
                let (num, den) = ((num / g) as u64, (den / g) as u64);
                root_of_unity(num, den) * twist_unchecked(p, s - t)
            }
            (PrimeValue::General(v), PrimeValue::General(w)) if v == w => {
                // unimodular up to the validation slack counts as |v| = 1
                let n = v.norm_sqr();
                let n = if (n - 1.0).abs() <= 2.0 * crate::multfun::UNIT_SLACK { 1.0 } else { n };
                Complex64::new(n, 0.0)
            }
            (a, b) => a.value(p) * b.value(p).conj(),
        }
    }
}

/// Exact sum of non-negative `f64` terms on a `2^-100` grid; additions are
/// associative, so any split of a prime range adds back exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeSum(i128);

const SCALE: f64 = 1_267_650_600_228_229_401_496_703_205_376.0; // 2^100

impl PrimeSum {
    fn term(v: f64) -> Self {
        PrimeSum((v * SCALE) as i128)
    }

    pub fn raw(self) -> i128 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE
    }
}

impl Add for PrimeSum {
    type Output = PrimeSum;

    fn add(self, other: PrimeSum) -> PrimeSum {
        PrimeSum(self.0 + other.0)
    }
}

fn check_range(y: u64, x: u64) -> Result<()> {
    if y < 1 || y > x {
        return Err(Error::Domain(format!("need 1 <= y <= x, got y = {y}, x = {x}")));
    }
    if x > MAX_PRIME_BOUND {
        return Err(Error::Resource(format!("x = {x} exceeds {MAX_PRIME_BOUND}")));
    }
    Ok(())
}

/// Maps every window of primes in `(y, x]` and returns results in order.
fn over_primes<T: Send>(y: u64, x: u64, exec: Exec, f: impl Fn(&[u64]) -> T + Sync + Send) -> Result<Vec<T>> {
    let windows: Vec<(u64, u64)> = (y + 1..=x)
        .step_by(WINDOW as usize)
        .map(|lo| (lo, (lo + WINDOW).min(x + 1)))
        .collect();
    exec.map(&windows, |&(lo, hi)| primes_between(lo, hi).map(|ps| f(&ps)))
        .into_iter()
        .collect()
}

/// `𝔻²(f, g; y, x) = Σ_{y<p≤x} (1 − Re f(p)ḡ(p))/p` as an exact grid sum.
pub fn distance_squared(
    f: &MultiplicativeFunctionSpec,
    g: &MultiplicativeFunctionSpec,
    y: u64,
    x: u64,
) -> Result<PrimeSum> {
    check_range(y, x)?;
    let parts = over_primes(y, x, Exec::default(), |ps| {
        ps.iter()
            .map(|&p| {
                let prod = PrimeValue::times_conj(PrimeValue::of(f, p), PrimeValue::of(g, p), p);
                PrimeSum::term((1.0 - prod.re).max(0.0) / p as f64)
            })
            .fold(PrimeSum::default(), Add::add)
    })?;
    Ok(parts.into_iter().fold(PrimeSum::default(), Add::add))
}

/// `𝔻(f, g; y, x)`.
pub fn distance(f: &MultiplicativeFunctionSpec, g: &MultiplicativeFunctionSpec, y: u64, x: u64) -> Result<f64> {
    Ok(distance_squared(f, g, y, x)?.to_f64().sqrt())
}

/// `𝔻(f, χ(n)n^{it}; 1, x)`.
pub fn distance_to_twisted_character(
    f: &MultiplicativeFunctionSpec,
    chi: &DirichletCharacter,
    t: f64,
    x: u64,
) -> Result<f64> {
    let g = MultiplicativeFunctionSpec::twisted_character(chi.clone(), t)?;
    distance(f, &g, 1, x)
}

/// `F(Q) = Σ_{p≤x, p∤Q} (f(p) χ̄(p) p^{−it} − 1)/p`.
pub fn mean_value_f(
    f: &MultiplicativeFunctionSpec,
    chi: &DirichletCharacter,
    t: f64,
    q_big: u64,
    x: u64,
) -> Result<Complex64> {
    if q_big == 0 {
        return Err(Error::Domain("Q must be positive".into()));
    }
    if x == 0 {
        return Ok(ZERO);
    }
    check_range(1, x)?;
    let parts = over_primes(1, x, Exec::default(), |ps| {
        let mut acc = CompensatedAccumulator::new();
        for &p in ps.iter().filter(|&&p| gcd(p, q_big) == 1) {
            let prod = PrimeValue::times_conj(
                PrimeValue::of(f, p),
                PrimeValue::twisted_character(chi, t, p),
                p,
            );
            let term = (prod - 1.0) / p as f64;
            if term != ZERO {
                acc.add(term);
            }
        }
        acc
    })?;
    let mut total = CompensatedAccumulator::new();
    for part in &parts {
        total.merge(part);
    }
    Ok(total.value())
}

/// Both forms of the logarithmic correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    /// `(1/log x) Σ_{n≤x} f(n)e(nα) · conj(f(n+h)e((n+h)α)) / n`
    pub direct: Complex64,
    /// `e(−hα) · (1/log x) Σ_{n≤x} f(n) f̄(n+h) / n`
    pub factored: Complex64,
    pub deviation: f64,
}

/// Agreement required between the two forms.
pub const CORRELATION_TOLERANCE: f64 = 1e-10;

pub fn log_correlation(f: &MultiplicativeFunctionSpec, alpha: PhaseAngle, h: u64, x: u64) -> Result<Correlation> {
    if h == 0 {
        return Err(Error::Domain("h must be positive".into()));
    }
    if x < 2 {
        return Err(Error::Domain("x must be at least 2".into()));
    }
    let top = x.checked_add(h).ok_or_else(|| Error::Resource("x + h overflows".into()))?;
    let values = eval_range(f, top)?;
    let phases = PhaseTable::new(alpha)?;
    let mut direct = CompensatedAccumulator::new();
    let mut plain = CompensatedAccumulator::new();
    for n in 1..=x {
        let a = values[n as usize - 1];
        let b = values[(n + h) as usize - 1];
        if a == ZERO || b == ZERO {
            continue;
        }
        let w = 1.0 / n as f64;
        direct.add(a * phases.at(n) * (b * phases.at(n + h)).conj() * w);
        plain.add(a * b.conj() * w);
    }
    let log_x = (x as f64).ln();
    let direct = direct.value() / log_x;
    let factored = phases.at(h).conj() * plain.value() / log_x;
    let deviation = (direct - factored).norm();
    if deviation > CORRELATION_TOLERANCE {
        return Err(Error::Precondition(format!(
            "correlation forms disagree by {deviation:e}"
        )));
    }
    Ok(Correlation {
        direct,
        factored,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{character, enumerate_characters};
    use crate::multfun::OverrideKey;
    use crate::oracles::naive_eval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prime_sum(x: u64, mut w: impl FnMut(u64) -> f64) -> f64 {
        primes_between(2, x + 1).unwrap().into_iter().map(|p| w(p) / p as f64).sum()
    }

    fn random_unimodular(rng: &mut ChaCha8Rng) -> MultiplicativeFunctionSpec {
        MultiplicativeFunctionSpec::random_unimodular(rng)
    }

    #[test]
    fn self_distance_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let f = random_unimodular(&mut rng);
            assert_eq!(distance(&f, &f, 1, 10_000).unwrap(), 0.0);
        }
        // χ against itself: only the zeros at p | m are left, each giving 1/p
        for m in [1u64, 7, 12] {
            for chi in enumerate_characters(m).unwrap() {
                for t in [0.0, 1.3] {
                    let f = MultiplicativeFunctionSpec::twisted_character(chi.clone(), t).unwrap();
                    let d = distance_to_twisted_character(&f, &chi, t, 10_000).unwrap();
                    let zeros: f64 = crate::arith::factorize_trial(m).iter().map(|&(p, _)| 1.0 / p as f64).sum();
                    assert!((d * d - zeros).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn distance_to_chi4_grows() {
        let one = MultiplicativeFunctionSpec::one();
        let chi4 = MultiplicativeFunctionSpec::character(character(4, 1).unwrap());
        let ds: Vec<f64> = [100u64, 1_000, 10_000]
            .iter()
            .map(|&x| distance(&one, &chi4, 1, x).unwrap())
            .collect();
        assert!(ds[0] < ds[1] && ds[1] < ds[2]);
        // 1 − Re χ(p): 0 for p ≡ 1, 2 for p ≡ 3, 1 for p = 2
        let expected = prime_sum(10_000, |p| match p % 4 {
            1 => 0.0,
            3 => 2.0,
            _ => 1.0,
        });
        assert!((ds[2] * ds[2] - expected).abs() < 1e-12);
    }

    #[test]
    fn liouville_against_one() {
        // f(p) = −1 at every prime up to 10^4 via whole-prime overrides
        let primes = primes_between(2, 10_001).unwrap();
        let f = MultiplicativeFunctionSpec::new(
            Base::One,
            true,
            primes.iter().map(|&p| (p, OverrideKey::Whole, Complex64::new(-1.0, 0.0))),
        )
        .unwrap();
        let d = distance_to_twisted_character(&f, &character(1, 0).unwrap(), 0.0, 10_000).unwrap();
        let expected = prime_sum(10_000, |_| 2.0).sqrt();
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn distance_monotone_and_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let f = random_unimodular(&mut rng);
        let g = random_unimodular(&mut rng);
        let mut prev = 0.0;
        for x in [10u64, 100, 1_000, 10_000, 100_000] {
            let d = distance(&f, &g, 1, x).unwrap();
            assert!(d >= prev);
            prev = d;
        }
        for y in [1u64, 2, 97, 1_000, 50_000, 100_000] {
            let whole = distance_squared(&f, &g, 1, 100_000).unwrap();
            let parts = distance_squared(&f, &g, 1, y).unwrap() + distance_squared(&f, &g, y, 100_000).unwrap();
            assert_eq!(whole, parts, "y = {y}");
        }
        assert!(distance(&f, &g, 0, 10).is_err());
        assert!(distance(&f, &g, 11, 10).is_err());
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..40 {
            let (f, g, h) = (random_unimodular(&mut rng), random_unimodular(&mut rng), random_unimodular(&mut rng));
            let fh = distance(&f, &h, 1, 10_000).unwrap();
            let fg = distance(&f, &g, 1, 10_000).unwrap();
            let gh = distance(&g, &h, 1, 10_000).unwrap();
            assert!(fh <= fg + gh + 1e-9);
        }
    }

    #[test]
    fn zero_values_count_fully() {
        let chi = MultiplicativeFunctionSpec::character(character(6, 1).unwrap());
        let one = MultiplicativeFunctionSpec::one();
        // χ mod 6 is 0 at 2 and 3: each contributes 1/p
        let d2 = distance_squared(&chi, &one, 1, 3).unwrap().to_f64();
        assert!((d2 - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn mean_value_examples() {
        for chi in enumerate_characters(5).unwrap() {
            let f = MultiplicativeFunctionSpec::character(chi.clone());
            for x in [1u64, 10, 1_000, 10_000] {
                assert_eq!(mean_value_f(&f, &chi, 0.0, 5, x).unwrap(), ZERO);
                assert_eq!(mean_value_f(&f, &chi, 0.0, 10, x).unwrap(), ZERO);
            }
        }
        let chi = character(5, 1).unwrap();
        let f = MultiplicativeFunctionSpec::new(
            Base::One,
            true,
            primes_between(2, 10_001)
                .unwrap()
                .into_iter()
                .map(|p| (p, OverrideKey::Whole, -chi.value(p)))
                .filter(|o| o.2 != ZERO),
        )
        .unwrap();
        let value = mean_value_f(&f, &chi, 0.0, 5, 10_000).unwrap();
        let expected = -prime_sum(10_000, |p| if p == 5 { 0.0 } else { 2.0 });
        assert!((value - Complex64::new(expected, 0.0)).norm() < 1e-10);
        // Q₁ | Q₂ drops primes
        let g = MultiplicativeFunctionSpec::one();
        let a = mean_value_f(&g, &chi, 0.0, 5, 1_000).unwrap();
        let b = mean_value_f(&g, &chi, 0.0, 5 * 2 * 3, 1_000).unwrap();
        let dropped = (ZERO - chi.value(2).conj() + 1.0) / 2.0 + (ZERO - chi.value(3).conj() + 1.0) / 3.0;
        assert!((a - b + dropped).norm() < 1e-12);
    }

    #[test]
    fn correlation_examples() {
        let one = MultiplicativeFunctionSpec::one();
        let c = log_correlation(&one, PhaseAngle::ZERO, 3, 1_000_000).unwrap();
        let harmonic: f64 = (1..=1_000_000).map(|n| 1.0 / n as f64).sum::<f64>() / 1e6f64.ln();
        assert!((c.direct.re - harmonic).abs() < 0.01);

        let chi4 = MultiplicativeFunctionSpec::character(character(4, 1).unwrap());
        let c = log_correlation(&chi4, PhaseAngle::ZERO, 4, 10_000).unwrap();
        let oracle: f64 = (1..=10_000u64)
            .map(|n| (naive_eval(&chi4, n) * naive_eval(&chi4, n + 4).conj()).re / n as f64)
            .sum::<f64>()
            / 1e4f64.ln();
        assert!(c.direct.im.abs() < 1e-12);
        assert!((c.direct.re - oracle).abs() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let f = random_unimodular(&mut rng);
        for _ in 0..10 {
            let alpha = PhaseAngle::fixed(rng.gen());
            let h = rng.gen_range(1..50);
            let c = log_correlation(&f, alpha, h, 20_000).unwrap();
            assert!(c.deviation <= CORRELATION_TOLERANCE);
        }
        assert!(log_correlation(&one, PhaseAngle::ZERO, 0, 10).is_err());
        assert!(log_correlation(&one, PhaseAngle::ZERO, 1, 1).is_err());
    }
}
