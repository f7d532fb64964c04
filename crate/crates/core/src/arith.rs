//! Integer primitives: smallest-prime-factor sieve, factorization, φ, μ,
//! p-adic valuation and the exact-divisibility CRT construction.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Largest table the linear sieve will build (32-bit entries).
pub const MAX_TABLE_LIMIT: u64 = u32::MAX as u64;

/// Smallest-prime-factor table for `0..=limit`.
///
/// Immutable after construction; share it freely between threads.
#[derive(Debug, Clone)]
pub struct FactorTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > MAX_TABLE_LIMIT {
            return Err(Error::Resource(format!(
                "factor table limit {limit} exceeds {MAX_TABLE_LIMIT}"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let ip = i as u64 * p as u64;
                if ip > limit {
                    break;
                }
                spf[ip as usize] = p;
            }
        }
        Ok(Self { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Smallest prime factor of `n` (`n >= 2`).
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                value: n,
                limit: self.limit,
            });
        }
        Ok(())
    }

    pub fn factorize(&self, n: u64) -> Result<PrimePowerList> {
        self.check(n)?;
        let mut factors = Vec::new();
        self.for_each_prime_power(n, |p, e| factors.push((p, e)));
        Ok(PrimePowerList { factors })
    }

    /// Visits the prime powers of `n` in increasing prime order without
    /// allocating. `n` must be within the table.
    #[inline]
    pub fn for_each_prime_power(&self, mut n: u64, mut visit: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            visit(p, e);
        }
    }
}

/// Ordered prime factorization `[(p, e)]`, primes strictly increasing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrimePowerList {
    factors: Vec<(u64, u32)>,
}

impl PrimePowerList {
    /// Builds a list, rejecting non-primes, zero exponents and unsorted input.
    pub fn new(factors: Vec<(u64, u32)>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidConfig(
                    "prime power list must have strictly increasing primes".into(),
                ));
            }
        }
        for &(p, e) in &factors {
            if !is_prime(p) {
                return Err(Error::InvalidConfig(format!("{p} is not prime")));
            }
            if e == 0 {
                return Err(Error::InvalidConfig(format!("zero exponent for {p}")));
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Product of the prime powers, `None` on u128 overflow.
    pub fn product(&self) -> Option<u128> {
        self.factors
            .iter()
            .try_fold(1u128, |acc, &(p, e)| acc.checked_mul(checked_pow(p as u128, e)?))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub(crate) fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
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

/// Inverse of `a` modulo `m` (`m < 2^127`), if `gcd(a, m) = 1`.
pub fn inverse_mod(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
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

/// Least prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Primes in `[lo, hi)` by a segmented sieve.
pub fn primes_between(lo: u64, hi: u64) -> Result<Vec<u64>> {
    let lo = lo.max(2);
    if hi <= lo {
        return Ok(Vec::new());
    }
    let root = ((hi - 1) as f64).sqrt() as u64 + 1;
    let base = FactorTable::new(root.max(2))?;
    let mut composite = vec![false; (hi - lo) as usize];
    for &p in base.primes() {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let mut n = (p * p).max(lo.div_ceil(p) * p);
        while n < hi {
            composite[(n - lo) as usize] = true;
            n += p;
        }
    }
    Ok(composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + i as u64)
        .collect())
}

/// Trial-division factorization for arbitrary `n >= 1`.
pub fn factorize_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while (p as u128) * (p as u128) <= n as u128 {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("totient(0) is undefined".into()));
    }
    Ok(factorize_trial(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1)))
}

pub fn moebius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::Domain("moebius(0) is undefined".into()));
    }
    let f = factorize_trial(n);
    if f.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.len() % 2 == 0 { 1 } else { -1 })
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize_trial(n).iter().all(|&(_, e)| e == 1)
}

/// Largest `e` with `p^e | n`.
pub fn valuation(n: i128, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("valuation of 0 is infinite".into()));
    }
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let mut n = n.unsigned_abs();
    let p = p as u128;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Solution of the exact-divisibility system: every `n ≡ residue (mod modulus)`
/// has `k_j ∥ W·n + j` for each `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtSolution {
    pub residue: u128,
    pub modulus: u128,
}

/// Largest modulus accepted by [`crt_exact_divisibility`].
pub const MAX_CRT_MODULUS: u128 = 1 << 63;

/// Finds `n₀` with `k_j ∥ W·n₀ + j` for every `1 <= j <= h`, where `k_j` is
/// the product of the prime powers assigned to `j`.
///
/// Each prime power `p^a` of `k_j` contributes the congruence
/// `W·n + j ≡ k_j (mod p^(a+1))`, which pins `p^a ∥ W·n + j`. Indices missing
/// from `assignments` have `k_j = 1`.
pub fn crt_exact_divisibility(
    h: u64,
    assignments: &BTreeMap<u64, PrimePowerList>,
    w: u64,
) -> Result<CrtSolution> {
    if h == 0 || w == 0 {
        return Err(Error::InvalidConfig("H and W must be positive".into()));
    }
    let mut seen = BTreeSet::new();
    for (&j, list) in assignments {
        if j == 0 || j > h {
            return Err(Error::InvalidConfig(format!("index {j} outside 1..={h}")));
        }
        for p in list.primes() {
            if !seen.insert(p) {
                return Err(Error::InvalidConfig(format!(
                    "prime {p} assigned to more than one index"
                )));
            }
            if p <= h {
                return Err(Error::InvalidConfig(format!("prime {p} does not exceed H = {h}")));
            }
            if w % p == 0 {
                return Err(Error::InvalidConfig(format!("prime {p} divides W = {w}")));
            }
        }
    }

    let mut residue: u128 = 0;
    let mut modulus: u128 = 1;
    for (&j, list) in assignments {
        let k_j = list
            .product()
            .ok_or_else(|| Error::Resource("k_j overflows 128 bits".into()))?;
        for &(p, a) in list.factors() {
            let pk = checked_pow(p as u128, a + 1)
                .filter(|&v| v <= MAX_CRT_MODULUS)
                .ok_or_else(|| Error::Resource(format!("{p}^{} exceeds 2^63", a + 1)))?;
            // W·n ≡ k_j − j (mod p^(a+1))
            let rhs = (k_j % pk + pk - (j as u128 % pk)) % pk;
            let w_inv = inverse_mod(w as u128 % pk, pk).expect("p does not divide W");
            let target = rhs * w_inv % pk;
            (residue, modulus) = combine(residue, modulus, target, pk)?;
        }
    }
    Ok(CrtSolution { residue, modulus })
}

/// Merges `x ≡ r1 (mod m1)` with `x ≡ r2 (mod m2)` for coprime moduli.
fn combine(r1: u128, m1: u128, r2: u128, m2: u128) -> Result<(u128, u128)> {
    let m = m1
        .checked_mul(m2)
        .filter(|&v| v <= MAX_CRT_MODULUS)
        .ok_or_else(|| Error::Resource("combined modulus exceeds 2^63".into()))?;
    let inv = inverse_mod(m1 % m2, m2).expect("moduli are coprime");
    // x = r1 + m1 · ((r2 − r1)·m1⁻¹ mod m2)
    let diff = (r2 + m2 - r1 % m2) % m2;
    let t = diff * inv % m2;
    Ok(((r1 + m1 * t) % m, m))
}

/// Exact check of `k ∥ value` for `k = ∏ p^a`: `k | value` and `p·k ∤ value`
/// for each prime `p | k`.
pub fn exactly_divides(list: &PrimePowerList, value: u128) -> bool {
    let Some(k) = list.product() else {
        return false;
    };
    if value % k != 0 {
        return false;
    }
    let q = value / k;
    list.primes().all(|p| q % p as u128 != 0)
}
