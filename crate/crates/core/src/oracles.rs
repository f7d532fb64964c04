//! Brute-force references for the tests. Nothing here calls the sieve, the
//! phase tables or the compensated accumulator. `n^{it}` comes from
//! [`archimedean_twist`] so that bit-exact comparisons do not depend on how
//! the platform pairs `sin` and `cos`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::complexsum::{archimedean_twist, PhaseAngle};
use crate::multfun::{Base, MultiplicativeFunctionSpec, OverrideKey};

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

fn power_of_n(n: u64, t: f64) -> Complex64 {
    archimedean_twist(n, t).expect("n >= 1")
}

fn base_at(spec: &MultiplicativeFunctionSpec, n: u64) -> Complex64 {
    match spec.base() {
        Base::One => Complex64::new(1.0, 0.0),
        Base::Character(chi) => chi.values()[(n % chi.modulus()) as usize],
        Base::TwistedCharacter(chi, t) => chi.values()[(n % chi.modulus()) as usize] * power_of_n(n, *t),
    }
}

fn at_prime_power(spec: &MultiplicativeFunctionSpec, overrides: &[(u64, OverrideKey, Complex64)], p: u64, k: u32) -> Complex64 {
    let whole = overrides
        .iter()
        .find(|(q, key, _)| *q == p && *key == OverrideKey::Whole)
        .map(|o| o.2);
    if spec.is_completely_multiplicative() {
        let v = whole.unwrap_or_else(|| base_at(spec, p));
        let mut out = v;
        for _ in 1..k {
            out *= v;
        }
        return out;
    }
    if let Some(o) = overrides.iter().find(|(q, key, _)| *q == p && *key == OverrideKey::Exact(k)) {
        return o.2;
    }
    let mut best: Option<(u32, Complex64)> = None;
    for &(q, key, v) in overrides {
        if let OverrideKey::FromPower(j) = key {
            if q == p && j <= k && best.map_or(true, |(b, _)| j > b) {
                best = Some((j, v));
            }
        }
    }
    if let Some((_, v)) = best {
        return v;
    }
    if k == 1 {
        if let Some(v) = whole {
            return v;
        }
    }
    base_at(spec, p.pow(k))
}

/// `f(n)` by trial division.
pub fn naive_eval(spec: &MultiplicativeFunctionSpec, n: u64) -> Complex64 {
    assert!(n >= 1, "f(0) is undefined");
    let overrides = spec.overrides();
    let mut value: Option<Complex64> = None;
    let mut rest = n;
    let mut d = 2u64;
    while rest > 1 {
        if d.saturating_mul(d) > rest {
            d = rest;
        }
        if rest % d == 0 {
            let mut k = 0;
            while rest % d == 0 {
                rest /= d;
                k += 1;
            }
            let v = at_prime_power(spec, &overrides, d, k);
            value = Some(match value {
                None => v,
                Some(acc) => acc * v,
            });
        }
        d += 1;
    }
    value.unwrap_or(Complex64::new(1.0, 0.0))
}

fn turn_of(alpha: PhaseAngle, n: u64) -> f64 {
    match alpha {
        PhaseAngle::Rational { num, den } => {
            let k = (n as u128 * num as u128) % den as u128;
            k as f64 / den as f64
        }
        PhaseAngle::Fixed(f) => (f.wrapping_mul(n as u128) >> 64) as f64 / 2f64.powi(64),
    }
}

/// Kahan-summed `Σ_{n ≤ x} χ(n) e(nα) n^{it}`.
pub fn direct_char_sum(chi: &DirichletCharacter, alpha: PhaseAngle, t: f64, x: u64) -> Complex64 {
    direct_char_prefix_sums(chi, alpha, t, x).last().copied().unwrap_or_default()
}

/// Every prefix of [`direct_char_sum`]: entry `x` is the sum up to `x`.
pub fn direct_char_prefix_sums(chi: &DirichletCharacter, alpha: PhaseAngle, t: f64, x: u64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(x as usize + 1);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut carry = Complex64::new(0.0, 0.0);
    out.push(sum);
    for n in 1..=x {
        let c = chi.values()[(n % chi.modulus()) as usize];
        if c != Complex64::new(0.0, 0.0) {
            let term = c * cis(TAU * turn_of(alpha, n)) * power_of_n(n, t) - carry;
            let next = sum + term;
            carry = (next - sum) - term;
            sum = next;
        }
        out.push(sum);
    }
    out
}

/// `Σ_{0 ≤ n < m} χ(n) zⁿ` with each power taken separately.
pub fn naive_p(chi: &DirichletCharacter, z: Complex64) -> Complex64 {
    (0..chi.modulus())
        .map(|n| chi.values()[n as usize] * z.powu(n as u32))
        .sum()
}
