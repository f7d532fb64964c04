//! Multiplicative functions given by a base rule plus prime-power overrides,
//! modified characters, and the two counterexample constructions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, next_prime, FactorTable};
use crate::characters::{character_from_label, conductor_and_primitive_part, DirichletCharacter};
use crate::complexsum::{twist_unchecked, PhaseAngle, ONE, ZERO};
use crate::error::{Error, Result};
use crate::par::Exec;

/// Override values may exceed the unit disk by this much (rounding slack).
pub const UNIT_SLACK: f64 = 1e-12;

/// Largest `N` accepted by [`eval_range`].
pub const MAX_EVAL_RANGE: u64 = 1 << 25;

/// Largest `x` reachable by the segmented evaluator.
pub const MAX_SEGMENTED: u64 = u32::MAX as u64;

const CHUNK: usize = 1 << 14;

#[derive(Clone)]
pub enum Base {
    One,
    Character(Arc<DirichletCharacter>),
    TwistedCharacter(Arc<DirichletCharacter>, f64),
}

impl fmt::Debug for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::One => write!(f, "One"),
            Base::Character(chi) => write!(f, "Character({})", chi.label()),
            Base::TwistedCharacter(chi, t) => write!(f, "TwistedCharacter({}, {t})", chi.label()),
        }
    }
}

/// Which prime powers an override applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OverrideKey {
    /// `p^k` only
    Exact(u32),
    /// `p` itself; every power when completely multiplicative
    Whole,
    /// every `p^j` with `j ≥ k` not matched by an `Exact` key
    FromPower(u32),
}

impl fmt::Display for OverrideKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverrideKey::Exact(k) => write!(f, "{k}"),
            OverrideKey::Whole => write!(f, "*"),
            OverrideKey::FromPower(k) => write!(f, "{k}+"),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct PrimeRule {
    whole: Option<Complex64>,
    exact: BTreeMap<u32, Complex64>,
    from: BTreeMap<u32, Complex64>,
}

/// A validated multiplicative function.
#[derive(Debug, Clone)]
pub struct MultiplicativeFunctionSpec {
    base: Base,
    completely_multiplicative: bool,
    rules: BTreeMap<u64, PrimeRule>,
    certified_bound: Option<f64>,
}

fn check_value(v: Complex64, what: &str) -> Result<()> {
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::InvalidConfig(format!("{what}: value is not finite")));
    }
    if v.norm() > 1.0 + UNIT_SLACK {
        return Err(Error::InvalidConfig(format!(
            "{what}: |{v}| = {} exceeds 1",
            v.norm()
        )));
    }
    Ok(())
}

impl MultiplicativeFunctionSpec {
    pub fn new(
        base: Base,
        completely_multiplicative: bool,
        overrides: impl IntoIterator<Item = (u64, OverrideKey, Complex64)>,
    ) -> Result<Self> {
        if let Base::TwistedCharacter(_, t) = &base {
            if !t.is_finite() {
                return Err(Error::InvalidConfig("twist t must be finite".into()));
            }
        }
        let mut spec = Self {
            base,
            completely_multiplicative,
            rules: BTreeMap::new(),
            certified_bound: None,
        };
        for (p, key, v) in overrides {
            spec = spec.with_override(p, key, v)?;
        }
        Ok(spec)
    }

    pub fn one() -> Self {
        Self::new(Base::One, false, []).expect("no overrides")
    }

    /// `χ` as a multiplicative function.
    pub fn character(chi: DirichletCharacter) -> Self {
        Self::new(Base::Character(Arc::new(chi)), true, []).expect("no overrides")
    }

    /// `χ(n)·n^{it}`.
    pub fn twisted_character(chi: DirichletCharacter, t: f64) -> Result<Self> {
        Self::new(Base::TwistedCharacter(Arc::new(chi), t), true, [])
    }

    pub fn with_override(mut self, p: u64, key: OverrideKey, v: Complex64) -> Result<Self> {
        let what = format!("override f({p}^{key})");
        if !is_prime(p) {
            return Err(Error::InvalidConfig(format!("{what}: {p} is not prime")));
        }
        check_value(v, &what)?;
        if self.completely_multiplicative && key != OverrideKey::Whole {
            return Err(Error::InvalidConfig(format!(
                "{what}: completely multiplicative specs take whole-prime overrides only"
            )));
        }
        let rule = self.rules.entry(p).or_default();
        let slot = match key {
            OverrideKey::Whole => &mut rule.whole,
            OverrideKey::Exact(0) | OverrideKey::FromPower(0) => {
                return Err(Error::InvalidConfig(format!("{what}: exponent must be >= 1")));
            }
            OverrideKey::Exact(k) => {
                if rule.exact.contains_key(&k) {
                    return Err(Error::InvalidConfig(format!("{what}: duplicate")));
                }
                rule.exact.insert(k, v);
                return Ok(self);
            }
            OverrideKey::FromPower(k) => {
                if rule.from.contains_key(&k) {
                    return Err(Error::InvalidConfig(format!("{what}: duplicate")));
                }
                rule.from.insert(k, v);
                return Ok(self);
            }
        };
        if slot.is_some() {
            return Err(Error::InvalidConfig(format!("{what}: duplicate")));
        }
        *slot = Some(v);
        Ok(self)
    }

    pub fn with_certified_bound(mut self, bound: f64) -> Self {
        self.certified_bound = Some(bound);
        self
    }

    pub fn certified_bound(&self) -> Option<f64> {
        self.certified_bound
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        self.completely_multiplicative
    }

    pub fn base_character(&self) -> Option<&DirichletCharacter> {
        match &self.base {
            Base::One => None,
            Base::Character(chi) | Base::TwistedCharacter(chi, _) => Some(chi),
        }
    }

    pub fn base_t(&self) -> f64 {
        match self.base {
            Base::TwistedCharacter(_, t) => t,
            _ => 0.0,
        }
    }

    /// All overrides in `(p, key)` order.
    pub fn overrides(&self) -> Vec<(u64, OverrideKey, Complex64)> {
        let mut out = Vec::new();
        for (&p, rule) in &self.rules {
            for (&k, &v) in &rule.exact {
                out.push((p, OverrideKey::Exact(k), v));
            }
            if let Some(v) = rule.whole {
                out.push((p, OverrideKey::Whole, v));
            }
            for (&k, &v) in &rule.from {
                out.push((p, OverrideKey::FromPower(k), v));
            }
        }
        out
    }

    /// Base rule at `n = p^k`.
    #[inline]
    fn base_value(&self, pk: u64) -> Complex64 {
        match &self.base {
            Base::One => ONE,
            Base::Character(chi) => chi.value(pk),
            Base::TwistedCharacter(chi, t) => chi.value(pk) * twist_unchecked(pk, *t),
        }
    }

    /// The override that decides `f(p)`, if any.
    pub fn override_at_prime(&self, p: u64) -> Option<Complex64> {
        let rule = self.rules.get(&p)?;
        if self.completely_multiplicative {
            return rule.whole;
        }
        rule.exact
            .get(&1)
            .or_else(|| rule.from.get(&1))
            .copied()
            .or(rule.whole)
    }

    /// `f(p)`.
    pub fn prime_value(&self, p: u64) -> Complex64 {
        self.prime_power_value(p, 1)
    }

    /// `f(p^k)` for prime `p`, `k ≥ 1`, `p^k < 2^64`.
    pub fn prime_power_value(&self, p: u64, k: u32) -> Complex64 {
        let rule = self.rules.get(&p);
        if self.completely_multiplicative {
            let v = rule.and_then(|r| r.whole).unwrap_or_else(|| self.base_value(p));
            let mut acc = v;
            for _ in 1..k {
                acc *= v;
            }
            return acc;
        }
        if let Some(rule) = rule {
            if let Some(&v) = rule.exact.get(&k) {
                return v;
            }
            if let Some((_, &v)) = rule.from.range(..=k).next_back() {
                return v;
            }
            if k == 1 {
                if let Some(v) = rule.whole {
                    return v;
                }
            }
        }
        self.base_value(p.pow(k))
    }

    /// Product of the prime-power values in the given (increasing) order.
    #[inline]
    pub fn fold(&self, factors: impl IntoIterator<Item = (u64, u32)>) -> Complex64 {
        let mut acc: Option<Complex64> = None;
        for (p, k) in factors {
            let v = self.prime_power_value(p, k);
            acc = Some(match acc {
                None => v,
                Some(a) => a * v,
            });
        }
        acc.unwrap_or(ONE)
    }

    /// Whether `f(p^k) = 0` for some `k`.
    pub fn vanishes_at_some_power(&self, p: u64) -> bool {
        let base_zero = self.base_value(p) == ZERO;
        let rule = self.rules.get(&p);
        if self.completely_multiplicative {
            return self.prime_value(p) == ZERO;
        }
        let Some(rule) = rule else {
            return base_zero;
        };
        let any_zero = rule.whole == Some(ZERO)
            || rule.exact.values().any(|&v| v == ZERO)
            || rule.from.values().any(|&v| v == ZERO);
        if any_zero {
            return true;
        }
        if !base_zero {
            return false;
        }
        let covered = |k: u32| {
            rule.exact.contains_key(&k)
                || rule.from.range(..=k).next().is_some()
                || (k == 1 && rule.whole.is_some())
        };
        match rule.from.keys().next() {
            None => true,
            Some(&j0) => (1..j0).any(|k| !covered(k)),
        }
    }

    /// The primes of `T`, ascending. Only primes dividing the base modulus or
    /// carrying an override can belong to it.
    pub fn zero_support(&self) -> Vec<u64> {
        let mut candidates: Vec<u64> = self.rules.keys().copied().collect();
        if let Some(chi) = self.base_character() {
            candidates.extend(
                crate::arith::factorize_trial(chi.modulus())
                    .into_iter()
                    .map(|(p, _)| p),
            );
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|&p| self.vanishes_at_some_power(p));
        candidates
    }

    /// `Σ_{p ∈ T, p ≤ bound} 1/p`.
    pub fn zero_support_sum(&self, bound: u64) -> f64 {
        self.zero_support()
            .into_iter()
            .filter(|&p| p <= bound)
            .map(|p| 1.0 / p as f64)
            .sum()
    }

    /// `f(n)` using a factor table.
    pub fn eval_at(&self, n: u64, table: &FactorTable) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::Domain("f(0) is undefined".into()));
        }
        if n > table.limit() {
            return Err(Error::OutOfRange {
                value: n,
                limit: table.limit(),
            });
        }
        let mut factors = Vec::with_capacity(12);
        table.for_each_prime_power(n, |p, k| factors.push((p, k)));
        Ok(self.fold(factors))
    }

    pub fn to_document(&self) -> SpecDocument {
        let base = match &self.base {
            Base::One => "one".to_string(),
            Base::Character(chi) | Base::TwistedCharacter(chi, _) => chi.label(),
        };
        SpecDocument {
            base,
            t: self.base_t(),
            completely_multiplicative: self.completely_multiplicative,
            overrides: self
                .overrides()
                .into_iter()
                .map(|(p, key, v)| OverrideDocument {
                    p,
                    k: match key {
                        OverrideKey::Exact(k) => KeyDocument::Power(k),
                        other => KeyDocument::Tag(other.to_string()),
                    },
                    re: v.re,
                    im: v.im,
                })
                .collect(),
            certified_bound: self.certified_bound,
        }
    }

    pub fn from_document(doc: &SpecDocument) -> Result<Self> {
        let base = if doc.base.trim() == "one" {
            if doc.t != 0.0 {
                Base::TwistedCharacter(Arc::new(character_from_label("1.0")?), doc.t)
            } else {
                Base::One
            }
        } else {
            let chi = Arc::new(character_from_label(&doc.base)?);
            if doc.t != 0.0 {
                Base::TwistedCharacter(chi, doc.t)
            } else {
                Base::Character(chi)
            }
        };
        let overrides = doc
            .overrides
            .iter()
            .map(|o| Ok((o.p, o.k.key()?, Complex64::new(o.re, o.im))))
            .collect::<Result<Vec<_>>>()?;
        let spec = Self::new(base, doc.completely_multiplicative, overrides)?;
        Ok(match doc.certified_bound {
            Some(b) => spec.with_certified_bound(b),
            None => spec,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    /// A seeded random spec for property tests: mixed bases, overrides of
    /// every key type, zero and non-unimodular values included.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        let m = rng.gen_range(1..=30u64);
        let chi = Arc::new(
            crate::characters::character(m, rng.gen_range(0..crate::arith::totient(m).unwrap()))
                .expect("index in range"),
        );
        let base = match rng.gen_range(0..3) {
            0 => Base::One,
            1 => Base::Character(chi),
            _ => Base::TwistedCharacter(chi, rng.gen_range(-3.0..3.0)),
        };
        let cm = rng.gen_bool(0.3);
        let mut spec = Self::new(base, cm, []).expect("no overrides");
        for _ in 0..rng.gen_range(0..8) {
            let p = SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
            let key = if cm {
                OverrideKey::Whole
            } else {
                match rng.gen_range(0..3) {
                    0 => OverrideKey::Exact(rng.gen_range(1..5)),
                    1 => OverrideKey::Whole,
                    _ => OverrideKey::FromPower(rng.gen_range(1..4)),
                }
            };
            let v = match rng.gen_range(0..4) {
                0 => ZERO,
                1 => Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)),
                _ => Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
            };
            if let Ok(next) = spec.clone().with_override(p, key, v) {
                spec = next;
            }
        }
        spec
    }

    /// A seeded random twisted character with every `f(p)` unimodular:
    /// primes dividing the modulus, and a few small primes, get random
    /// unimodular overrides.
    pub fn random_unimodular<R: Rng>(rng: &mut R) -> Self {
        let m = rng.gen_range(1..=20u64);
        let chars = crate::characters::enumerate_characters(m).expect("small modulus");
        let chi = chars[rng.gen_range(0..chars.len())].clone();
        let mut spec = Self::twisted_character(chi, rng.gen_range(-2.0..2.0)).expect("finite t");
        for (p, _) in crate::arith::factorize_trial(m) {
            let v = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            spec = spec.with_override(p, OverrideKey::Whole, v).expect("unimodular");
        }
        for _ in 0..rng.gen_range(0..4) {
            let p = [2u64, 3, 5, 7, 11, 13][rng.gen_range(0..6)];
            let v = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            if let Ok(next) = spec.clone().with_override(p, OverrideKey::Whole, v) {
                spec = next;
            }
        }
        spec
    }
}

/// JSON form of a spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    /// `"one"` or a character label `"m.i"`
    pub base: String,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub completely_multiplicative: bool,
    #[serde(default)]
    pub overrides: Vec<OverrideDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideDocument {
    pub p: u64,
    pub k: KeyDocument,
    pub re: f64,
    pub im: f64,
}

/// `k` as an integer, `"*"`, or `"k+"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KeyDocument {
    Power(u32),
    Tag(String),
}

impl KeyDocument {
    pub fn key(&self) -> Result<OverrideKey> {
        match self {
            KeyDocument::Power(k) => Ok(OverrideKey::Exact(*k)),
            KeyDocument::Tag(s) => {
                let s = s.trim();
                if s == "*" {
                    return Ok(OverrideKey::Whole);
                }
                let parsed = match s.strip_suffix('+') {
                    Some(k) => k.parse().map(OverrideKey::FromPower),
                    None => s.parse().map(OverrideKey::Exact),
                };
                parsed.map_err(|_| Error::Parse(format!("override key {s:?}")))
            }
        }
    }
}

/// `f(1), …, f(n)` from one smallest-prime-factor table.
pub fn eval_range(spec: &MultiplicativeFunctionSpec, n: u64) -> Result<Vec<Complex64>> {
    eval_range_with(spec, n, Exec::default())
}

pub fn eval_range_with(spec: &MultiplicativeFunctionSpec, n: u64, exec: Exec) -> Result<Vec<Complex64>> {
    if n > MAX_EVAL_RANGE {
        return Err(Error::Resource(format!(
            "eval_range up to {n} exceeds {MAX_EVAL_RANGE}"
        )));
    }
    let table = FactorTable::new(n.max(1))?;
    Ok(exec.map_chunks(n as usize, CHUNK, |r| {
        let mut factors = Vec::with_capacity(12);
        r.map(|i| {
            factors.clear();
            table.for_each_prime_power(i as u64 + 1, |p, k| factors.push((p, k)));
            spec.fold(factors.iter().copied())
        })
        .collect()
    }))
}

/// Evaluates `f` on arbitrary windows `[lo, hi)` below a fixed limit by
/// sieving each window with the primes up to `√limit`.
#[derive(Debug, Clone)]
pub struct SegmentedEvaluator<'a> {
    spec: &'a MultiplicativeFunctionSpec,
    primes: Vec<u64>,
    limit: u64,
}

impl<'a> SegmentedEvaluator<'a> {
    pub fn new(spec: &'a MultiplicativeFunctionSpec, limit: u64) -> Result<Self> {
        if limit > MAX_SEGMENTED {
            return Err(Error::Resource(format!(
                "evaluation up to {limit} exceeds {MAX_SEGMENTED}"
            )));
        }
        let root = (limit as f64).sqrt() as u64 + 2;
        let table = FactorTable::new(root)?;
        Ok(Self {
            spec,
            primes: table.primes().iter().map(|&p| p as u64).collect(),
            limit,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `f(lo), …, f(hi − 1)` for `1 ≤ lo ≤ hi ≤ limit + 1`.
    pub fn window(&self, lo: u64, hi: u64) -> Result<Vec<Complex64>> {
        if lo == 0 || hi > self.limit + 1 || lo > hi {
            return Err(Error::OutOfRange {
                value: hi.saturating_sub(1),
                limit: self.limit,
            });
        }
        let len = (hi - lo) as usize;
        let mut rest: Vec<u64> = (lo..hi).collect();
        let mut acc: Vec<Option<Complex64>> = vec![None; len];
        for &p in &self.primes {
            if p * p >= hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut n = first;
            while n < hi {
                let i = (n - lo) as usize;
                let mut k = 0;
                while rest[i] % p == 0 {
                    rest[i] /= p;
                    k += 1;
                }
                let v = self.spec.prime_power_value(p, k);
                acc[i] = Some(match acc[i] {
                    None => v,
                    Some(a) => a * v,
                });
                n += p;
            }
        }
        Ok(rest
            .into_iter()
            .zip(acc)
            .map(|(r, a)| {
                if r > 1 {
                    let v = self.spec.prime_power_value(r, 1);
                    match a {
                        None => v,
                        Some(a) => a * v,
                    }
                } else {
                    a.unwrap_or(ONE)
                }
            })
            .collect())
    }
}

/// A character with prescribed values at some primes dividing its modulus.
#[derive(Debug, Clone)]
pub struct ModifiedCharacterSpec {
    chi: Arc<DirichletCharacter>,
    modifications: Vec<(u64, Complex64)>,
    non_unimodular: Vec<usize>,
}

impl ModifiedCharacterSpec {
    pub fn new(chi: DirichletCharacter, modifications: Vec<(u64, Complex64)>) -> Result<Self> {
        let m = chi.modulus();
        let (_, psi) = conductor_and_primitive_part(&chi);
        let mut seen = Vec::new();
        let mut non_unimodular = Vec::new();
        let k = modifications.len();
        for (i, &(p, eta)) in modifications.iter().enumerate() {
            let bad = |msg: String| Err(Error::InvalidModification(format!("p = {p}: {msg}")));
            if !is_prime(p) {
                return bad("not prime".into());
            }
            if m % p != 0 {
                return bad(format!("does not divide the modulus {m}"));
            }
            if seen.contains(&p) {
                return bad("listed twice".into());
            }
            seen.push(p);
            if !eta.re.is_finite() || !eta.im.is_finite() || eta.norm() > 1.0 + UNIT_SLACK {
                return bad(format!("|eta| = {} exceeds 1", eta.norm()));
            }
            let unimodular = (eta.norm() - 1.0).abs() <= UNIT_SLACK;
            if i + 1 == k && !unimodular {
                return bad("the last eta must be unimodular".into());
            }
            if !unimodular {
                non_unimodular.push(i);
            }
            if (eta - psi.value(p)).norm() < UNIT_SLACK {
                return bad("eta equals the primitive character's value".into());
            }
        }
        Ok(Self {
            chi: Arc::new(chi),
            modifications,
            non_unimodular,
        })
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn modifications(&self) -> &[(u64, Complex64)] {
        &self.modifications
    }

    pub fn k(&self) -> usize {
        self.modifications.len()
    }

    pub fn prime(&self, i: usize) -> u64 {
        self.modifications[i].0
    }

    pub fn eta(&self, i: usize) -> Complex64 {
        self.modifications[i].1
    }

    /// Indices `i < k` with `|η_i| < 1`; allowed, but reported.
    pub fn non_unimodular(&self) -> &[usize] {
        &self.non_unimodular
    }

    pub fn to_spec(&self) -> MultiplicativeFunctionSpec {
        modified_character(self)
    }
}

/// `χ̃`: completely multiplicative, `η_i` at `p_i`, `χ(p)` elsewhere.
pub fn modified_character(spec: &ModifiedCharacterSpec) -> MultiplicativeFunctionSpec {
    MultiplicativeFunctionSpec::new(
        Base::Character(spec.chi.clone()),
        true,
        spec.modifications
            .iter()
            .map(|&(p, eta)| (p, OverrideKey::Whole, eta)),
    )
    .expect("validated modifications")
}

/// Largest `K` for the first construction (`2^K` subsets).
pub const MAX_EXAMPLE1_K: usize = 20;

#[derive(Debug, Clone)]
pub struct Example1 {
    pub spec: MultiplicativeFunctionSpec,
    pub alpha: PhaseAngle,
    pub primes: Vec<u64>,
    pub z: Vec<Complex64>,
    /// `M_1, …, M_K`
    pub m_values: Vec<f64>,
    /// `M_1 + 1`, or `2/|1 − e(α)|` when `K = 0`
    pub bound: f64,
}

/// `M(z_1, …, z_i) = Σ_{S ⊆ {1..i}} |2E(S) / (e(αN(S)) − 1)|` with
/// `E(S) = ∏_{i∈S} (z_i − 1)` and `N(S) = ∏_{i∈S} p_i²`.
pub fn example1_m_value(alpha: PhaseAngle, primes: &[u64], z: &[Complex64]) -> Result<f64> {
    if primes.len() != z.len() {
        return Err(Error::InvalidConfig("primes and z differ in length".into()));
    }
    if primes.len() > MAX_EXAMPLE1_K {
        return Err(Error::Resource(format!("2^{} subsets", primes.len())));
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << primes.len()) {
        let mut e = ONE;
        let mut angle = alpha;
        for (i, (&p, &zi)) in primes.iter().zip(z).enumerate() {
            if mask >> i & 1 == 1 {
                e *= zi - ONE;
                angle = angle.dilate(p).dilate(p);
            }
        }
        if angle.is_integral() {
            return Err(Error::Precondition(format!(
                "alpha·N(S) is an integer for subset {mask:#b}"
            )));
        }
        total += 2.0 * e.norm() / angle.chord();
    }
    Ok(total)
}

/// `f(p) = 1` everywhere and `f(p_i^k) = z_i` for `k ≥ 2`, with each `z_i`
/// chosen so that `M_K` stays below `M_1 + 1`.
pub fn construct_example1(alpha: PhaseAngle, k: usize) -> Result<Example1> {
    if alpha.is_integral() {
        return Err(Error::Domain("alpha must not be an integer".into()));
    }
    if k > MAX_EXAMPLE1_K {
        return Err(Error::Resource(format!(
            "K = {k} exceeds {MAX_EXAMPLE1_K} (2^K subsets)"
        )));
    }
    let excluded = alpha.denominator().unwrap_or(1);
    let mut primes = Vec::with_capacity(k);
    let mut p = 2;
    while primes.len() < k {
        if gcd(p, excluded) == 1 {
            primes.push(p);
        }
        p = next_prime(p);
    }
    let mut z: Vec<Complex64> = Vec::with_capacity(k);
    let mut m_values = Vec::with_capacity(k);
    for i in 0..k {
        if i == 0 {
            z.push(Complex64::new(-1.0, 0.0));
        } else {
            // |M_{i+1} − M_i| = |z − 1| · Σ_{S ⊆ {1..i}} |2E(S)| / |e(αN(S)p²) − 1|
            let p2 = primes[i];
            let mut weight = 0.0;
            for mask in 0u32..(1 << i) {
                let mut e = ONE;
                let mut angle = alpha.dilate(p2).dilate(p2);
                for j in 0..i {
                    if mask >> j & 1 == 1 {
                        e *= z[j] - ONE;
                        angle = angle.dilate(primes[j]).dilate(primes[j]);
                    }
                }
                if angle.is_integral() {
                    return Err(Error::Precondition(format!(
                        "alpha·N(S) is an integer for subset {mask:#b} with p = {p2}"
                    )));
                }
                weight += 2.0 * e.norm() / angle.chord();
            }
            let tolerance = 0.5f64.powi(i as i32);
            // halve the arc from z = −1 toward 1 until the step is small
            let mut shift = 127;
            let zi = loop {
                let candidate = PhaseAngle::fixed(1u128 << shift).unit();
                if (candidate - ONE).norm() * weight < tolerance || shift == 0 {
                    break candidate;
                }
                shift -= 1;
            };
            z.push(zi);
        }
        m_values.push(example1_m_value(alpha, &primes[..=i], &z)?);
    }
    let bound = match m_values.first() {
        Some(m1) => m1 + 1.0,
        None => 2.0 / alpha.chord(),
    };
    let spec = MultiplicativeFunctionSpec::new(
        Base::One,
        false,
        primes
            .iter()
            .zip(&z)
            .map(|(&p, &zi)| (p, OverrideKey::FromPower(2), zi)),
    )?
    .with_certified_bound(bound);
    Ok(Example1 {
        spec,
        alpha,
        primes,
        z,
        m_values,
        bound,
    })
}

/// Prime selection for the second construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PrimeSelector {
    /// least prime above `2^{i+2}`
    #[default]
    Sparse,
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone)]
pub struct Example2 {
    pub spec: MultiplicativeFunctionSpec,
    pub primes: Vec<u64>,
    pub z: Vec<Complex64>,
}

/// `f(p) = 1` everywhere and `f(p_i^k) = z_i` for `k ≥ 2`, where `z_i` is
/// the point of the upper unit semicircle with `|1 − z_i| = 1/p_i²`.
pub fn construct_example2(k: usize, selector: &PrimeSelector) -> Result<Example2> {
    let primes: Vec<u64> = match selector {
        PrimeSelector::Sparse => (1..=k)
            .map(|i| {
                if i + 2 >= 63 {
                    return Err(Error::Resource(format!("2^{} overflows", i + 2)));
                }
                Ok(next_prime(1u64 << (i + 2)))
            })
            .collect::<Result<_>>()?,
        PrimeSelector::Explicit(list) => {
            if list.len() < k {
                return Err(Error::InvalidConfig(format!(
                    "{} primes given, {k} needed",
                    list.len()
                )));
            }
            let list = list[..k].to_vec();
            if let Some(&p) = list.iter().find(|&&p| !is_prime(p)) {
                return Err(Error::InvalidConfig(format!("{p} is not prime")));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig("primes must increase strictly".into()));
            }
            list
        }
    };
    let z: Vec<Complex64> = primes
        .iter()
        .map(|&p| {
            // z = e(θ) with sin(πθ) = h: z = (1 − 2h², 2h√(1 − h²))
            let h = 0.5 / (p as f64 * p as f64);
            Complex64::new(1.0 - 2.0 * h * h, 2.0 * h * (1.0 - h * h).sqrt())
        })
        .collect();
    let spec = MultiplicativeFunctionSpec::new(
        Base::One,
        false,
        primes
            .iter()
            .zip(&z)
            .map(|(&p, &zi)| (p, OverrideKey::FromPower(2), zi)),
    )?;
    Ok(Example2 { spec, primes, z })
}
