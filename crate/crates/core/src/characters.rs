//! Dirichlet characters as exact value tables, conductors and primitive
//! parts, and the Gauss-sum polynomial `P(z) = Σ_{0≤n<m} χ(n) zⁿ`.
//!
//! `(ℤ/mℤ)*` is split by CRT into cyclic components: a primitive root for
//! each odd prime power, `−1` for `4`, and the pair `{−1, 5}` for `2^k`,
//! `k ≥ 3`. A character is labelled by its exponent vector over these
//! generators; the canonical index orders labels lexicographically, first
//! component most significant, so index 0 is the principal character.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{factorize_trial, gcd, is_squarefree, lcm, moebius, pow_mod, totient};
use crate::complexsum::{root_of_unity, CompensatedAccumulator, ONE, ZERO};
use crate::error::{Error, Result};

/// Largest modulus the character machinery accepts.
pub const MAX_MODULUS: u64 = 1_000_000;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Component {
    /// prime power this component lives on (`2^k` for both 2-adic factors)
    modulus: u64,
    order: u64,
    /// generator lifted to `ℤ/mℤ`: `g` mod `modulus`, `1` mod the cofactor
    lifted: u64,
    /// discrete log of each residue mod `modulus`, `NO_LOG` for non-units
    logs: Arc<Vec<u32>>,
}

/// Cyclic decomposition of `(ℤ/mℤ)*` with discrete-log tables.
#[derive(Debug, Clone)]
struct Structure {
    modulus: u64,
    components: Vec<Component>,
    /// common order `L`: every character value is `e(k/L)`
    exponent: u64,
    size: u64,
}

fn primitive_root_mod_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors: Vec<u64> = factorize_trial(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// `x ≡ r (mod a)`, `x ≡ 1 (mod b)` for coprime `a, b`.
fn lift(r: u64, a: u64, b: u64) -> u64 {
    if b == 1 {
        return r % a;
    }
    let m = a * b;
    // x = 1 + b·t with b·t ≡ r − 1 (mod a)
    let inv_b = crate::arith::inverse_mod((b % a) as u128, a as u128).expect("coprime") as u64;
    let t = crate::arith::mul_mod((r % a + a - 1) % a, inv_b, a);
    (1 + b as u128 * t as u128) as u64 % m
}

impl Structure {
    fn new(m: u64) -> Self {
        let mut components = Vec::new();
        for (p, e) in factorize_trial(m) {
            let pe = p.pow(e);
            let cofactor = m / pe;
            if p == 2 {
                if e == 1 {
                    continue;
                }
                let half = if e == 2 { 1 } else { pe / 4 };
                let mut sign_logs = vec![NO_LOG; pe as usize];
                let mut five_logs = vec![NO_LOG; pe as usize];
                let mut x = 1u64;
                for k in 0..half {
                    sign_logs[x as usize] = 0;
                    sign_logs[(pe - x) as usize] = 1;
                    five_logs[x as usize] = k as u32;
                    five_logs[(pe - x) as usize] = k as u32;
                    x = x * 5 % pe;
                }
                components.push(Component {
                    modulus: pe,
                    order: 2,
                    lifted: lift(pe - 1, pe, cofactor),
                    logs: Arc::new(sign_logs),
                });
                if e >= 3 {
                    components.push(Component {
                        modulus: pe,
                        order: half,
                        lifted: lift(5, pe, cofactor),
                        logs: Arc::new(five_logs),
                    });
                }
            } else {
                let mut g = primitive_root_mod_prime(p);
                if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
                    g += p;
                }
                let order = pe / p * (p - 1);
                let mut logs = vec![NO_LOG; pe as usize];
                let mut x = 1u64;
                for k in 0..order {
                    logs[x as usize] = k as u32;
                    x = crate::arith::mul_mod(x, g, pe);
                }
                components.push(Component {
                    modulus: pe,
                    order,
                    lifted: lift(g, pe, cofactor),
                    logs: Arc::new(logs),
                });
            }
        }
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        let size = components.iter().map(|c| c.order).product();
        Self {
            modulus: m,
            components,
            exponent,
            size,
        }
    }

    fn exponents_of(&self, index: u64) -> Vec<u64> {
        let mut rest = index;
        let mut exps = vec![0; self.components.len()];
        for (slot, c) in exps.iter_mut().zip(&self.components).rev() {
            *slot = rest % c.order;
            rest /= c.order;
        }
        exps
    }

    fn index_of(&self, exps: &[u64]) -> u64 {
        exps.iter()
            .zip(&self.components)
            .fold(0, |acc, (&e, c)| acc * c.order + e)
    }

    /// Turn numerators (over `self.exponent`) for every residue.
    fn turn_table(&self, exps: &[u64]) -> Vec<u32> {
        let l = self.exponent;
        (0..self.modulus)
            .map(|n| {
                // the factor 2 of m ≡ 2 (mod 4) has no component
                if self.modulus % 2 == 0 && n % 2 == 0 {
                    return NO_LOG;
                }
                let mut turn = 0u64;
                for (c, &e) in self.components.iter().zip(exps) {
                    let log = c.logs[(n % c.modulus) as usize];
                    if log == NO_LOG {
                        return NO_LOG;
                    }
                    turn = (turn + e * log as u64 % c.order * (l / c.order)) % l;
                }
                turn as u32
            })
            .collect()
    }

    /// Exponent vector of the character whose value at each lifted
    /// generator is `e(num/den)`.
    fn identify(&self, mut turn_at: impl FnMut(u64) -> Option<(u64, u64)>) -> Result<Vec<u64>> {
        self.components
            .iter()
            .map(|c| {
                let (num, den) = turn_at(c.lifted).ok_or_else(|| {
                    Error::Domain(format!("character vanishes at unit {}", c.lifted))
                })?;
                let scaled = num as u128 * c.order as u128;
                if scaled % den as u128 != 0 {
                    return Err(Error::Domain("values are not a character".into()));
                }
                Ok((scaled / den as u128) as u64 % c.order)
            })
            .collect()
    }
}

/// A Dirichlet character mod `m` with its full value table.
///
/// Values are kept exactly as `e(k/order)`; the complex table is derived.
#[derive(Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    index: u64,
    exponents: Vec<u64>,
    order: u64,
    turns: Vec<u32>,
    values: Vec<Complex64>,
    conductor: u64,
    primitive_index: u64,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("label", &self.label())
            .field("exponents", &self.exponents)
            .field("conductor", &self.conductor)
            .field("primitive_index", &self.primitive_index)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.index == other.index
    }
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// `"m.i"`
    pub fn label(&self) -> String {
        format!("{}.{}", self.modulus, self.index)
    }

    /// Generator exponents.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// `χ(n)`, periodic in `n`.
    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn value_signed(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// `χ(n) = e(num/den)` exactly, `None` where `χ(n) = 0`.
    pub fn turn(&self, n: u64) -> Option<(u64, u64)> {
        match self.turns[(n % self.modulus) as usize] {
            NO_LOG => None,
            k => Some((k as u64, self.order)),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn primitive_index(&self) -> u64 {
        self.primitive_index
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_real(&self) -> bool {
        self.turns
            .iter()
            .all(|&k| k == NO_LOG || (2 * k as u64) % self.order == 0)
    }

    /// Multiplicative order of the character itself.
    pub fn character_order(&self) -> u64 {
        self.turns
            .iter()
            .filter(|&&k| k != NO_LOG)
            .fold(1, |acc, &k| lcm(acc, self.order / gcd(k as u64, self.order)))
    }
}

/// The full group of characters mod `m`.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    structure: Structure,
    divisors: BTreeMap<u64, Structure>,
}

impl CharacterGroup {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        if m > MAX_MODULUS {
            return Err(Error::Resource(format!("modulus {m} exceeds {MAX_MODULUS}")));
        }
        let divisors = (1..=m)
            .filter(|d| m % d == 0)
            .map(|d| (d, Structure::new(d)))
            .collect();
        Ok(Self {
            structure: Structure::new(m),
            divisors,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.structure.modulus
    }

    /// Number of characters, `φ(m)`.
    pub fn len(&self) -> u64 {
        self.structure.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Component orders in label order.
    pub fn component_orders(&self) -> Vec<u64> {
        self.structure.components.iter().map(|c| c.order).collect()
    }

    /// Generators (as residues mod `m`) in label order.
    pub fn generators(&self) -> Vec<u64> {
        self.structure.components.iter().map(|c| c.lifted).collect()
    }

    pub fn character(&self, index: u64) -> Result<DirichletCharacter> {
        if index >= self.len() {
            return Err(Error::Domain(format!(
                "character index {index} out of range (mod {} has {})",
                self.modulus(),
                self.len()
            )));
        }
        let exps = self.structure.exponents_of(index);
        Ok(self.build(index, exps))
    }

    pub fn from_exponents(&self, exps: &[u64]) -> Result<DirichletCharacter> {
        if exps.len() != self.structure.components.len()
            || exps.iter().zip(&self.structure.components).any(|(&e, c)| e >= c.order)
        {
            return Err(Error::Domain("exponent vector does not fit the group".into()));
        }
        Ok(self.build(self.structure.index_of(exps), exps.to_vec()))
    }

    pub fn iter(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(|i| self.character(i).expect("index in range"))
    }

    /// Identifies the character with the given exact values on units.
    pub fn identify(&self, turn_at: impl FnMut(u64) -> Option<(u64, u64)>) -> Result<DirichletCharacter> {
        let exps = self.structure.identify(turn_at)?;
        self.from_exponents(&exps)
    }

    fn build(&self, index: u64, exponents: Vec<u64>) -> DirichletCharacter {
        let s = &self.structure;
        let turns = s.turn_table(&exponents);
        let values = turns
            .iter()
            .map(|&k| if k == NO_LOG { ZERO } else { root_of_unity(k as u64, s.exponent) })
            .collect();
        let (conductor, primitive_index) = self.primitive_data(&turns);
        DirichletCharacter {
            modulus: s.modulus,
            index,
            exponents,
            order: s.exponent,
            turns,
            values,
            conductor,
            primitive_index,
        }
    }

    /// Least `d | m` such that `χ` is trivial on units `≡ 1 (mod d)`, and the
    /// index of the inducing character mod `d`.
    fn primitive_data(&self, turns: &[u32]) -> (u64, u64) {
        let m = self.modulus();
        let l = self.structure.exponent;
        for (&d, sub) in &self.divisors {
            let induced = (0..m / d)
                .map(|j| 1 + j * d)
                .filter(|&n| n < m || m == 1)
                .all(|n| {
                    let k = turns[(n % m) as usize];
                    k == NO_LOG || k == 0
                });
            if !induced {
                continue;
            }
            let exps = sub
                .identify(|r| {
                    // a unit mod m in the residue class r mod d
                    let n = (0..m / d).map(|j| r % d + j * d).find(|&n| gcd(n, m) == 1)?;
                    match turns[n as usize] {
                        NO_LOG => None,
                        k => Some((k as u64, l)),
                    }
                })
                .expect("restriction of a character is a character");
            return (d, sub.index_of(&exps));
        }
        unreachable!("d = m always induces")
    }
}

/// All `φ(m)` characters mod `m` in canonical order.
pub fn enumerate_characters(m: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(CharacterGroup::new(m)?.iter().collect())
}

/// Character `m.index`.
pub fn character(m: u64, index: u64) -> Result<DirichletCharacter> {
    CharacterGroup::new(m)?.character(index)
}

/// Parses `"m.i"`.
pub fn parse_label(label: &str) -> Result<(u64, u64)> {
    let bad = || Error::Parse(format!("character label {label:?} is not of the form m.i"));
    let (m, i) = label.trim().split_once('.').ok_or_else(bad)?;
    Ok((m.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?))
}

pub fn character_from_label(label: &str) -> Result<DirichletCharacter> {
    let (m, i) = parse_label(label)?;
    character(m, i)
}

/// `(m₀, ψ)` with `ψ` primitive mod `m₀` and `χ = ψ·𝟙_m`.
pub fn conductor_and_primitive_part(chi: &DirichletCharacter) -> (u64, DirichletCharacter) {
    let psi = character(chi.conductor(), chi.primitive_index())
        .expect("conductor divides a valid modulus");
    (chi.conductor(), psi)
}

/// `ψ·𝟙_m`: equals `ψ(n)` when `gcd(n, m) = 1`, else `0`.
pub fn induce(psi: &DirichletCharacter, m: u64) -> Result<DirichletCharacter> {
    let d = psi.conductor();
    if m == 0 || m % d != 0 {
        return Err(Error::Domain(format!("conductor {d} does not divide {m}")));
    }
    let group = CharacterGroup::new(m)?;
    let psi_modulus = psi.modulus();
    group.identify(|g| {
        // g is a unit mod m, hence mod d; move to a unit mod ψ's modulus in
        // the same class mod d
        let n = (0..psi_modulus / d)
            .map(|j| g % d + j * d)
            .find(|&n| gcd(n, psi_modulus) == 1)?;
        psi.turn(n)
    })
}

/// `P(z) = Σ_{0≤n<m} χ(n) zⁿ`, powers by iterated multiplication.
pub fn gauss_polynomial_p(chi: &DirichletCharacter, z: Complex64) -> Complex64 {
    let mut acc = CompensatedAccumulator::new();
    let mut power = ONE;
    for n in 0..chi.modulus() {
        acc.add(chi.value(n) * power);
        power *= z;
    }
    acc.value()
}

/// `τ(ψ) = Σ_{n mod m₀} ψ(n) e(n/m₀)` for primitive `ψ`.
pub fn gauss_tau(psi: &DirichletCharacter) -> Result<Complex64> {
    if !psi.is_primitive() {
        return Err(Error::Domain(format!("{} is not primitive", psi.label())));
    }
    let m0 = psi.modulus();
    let mut acc = CompensatedAccumulator::new();
    for n in 0..m0 {
        acc.add(psi.value(n) * root_of_unity(n, m0));
    }
    Ok(acc.value())
}

/// Whether `m/m₀` is squarefree and coprime to `m₀`.
pub fn gauss_hypothesis_holds(chi: &DirichletCharacter) -> bool {
    let m0 = chi.conductor();
    let q = chi.modulus() / m0;
    is_squarefree(q) && gcd(q, m0) == 1
}

/// Closed form of `P(e(a/m))`: with `r = m/(m, a)`, zero unless `m₀ | r`,
/// otherwise `φ(m)/φ(r) · ψ̄(a/(a,m)) · ψ(r/m₀) · μ(r/m₀) · τ(ψ)`.
pub fn gauss_p_formula(chi: &DirichletCharacter, a: i64) -> Result<Complex64> {
    if !gauss_hypothesis_holds(chi) {
        return Err(Error::Precondition(format!(
            "{}: m/m0 = {}/{} must be squarefree and coprime to m0",
            chi.label(),
            chi.modulus(),
            chi.conductor()
        )));
    }
    let m = chi.modulus();
    let (m0, psi) = conductor_and_primitive_part(chi);
    let g = gcd(m, a.unsigned_abs());
    let r = m / g;
    if r % m0 != 0 {
        return Ok(ZERO);
    }
    let a_reduced = a / g as i64;
    let ratio = totient(m)? as f64 / totient(r)? as f64;
    let mu = moebius(r / m0)? as f64;
    let tau = gauss_tau(&psi)?;
    Ok(psi.value_signed(a_reduced).conj() * psi.value(r / m0) * tau * (ratio * mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexsum::{unit_phase, PhaseAngle};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn check_invariants(chi: &DirichletCharacter) {
        let m = chi.modulus();
        let phi = totient(m).unwrap();
        for n in 0..m {
            let v = chi.value(n);
            assert_eq!(v == ZERO, gcd(n, m) != 1, "{} at {n}", chi.label());
            if v != ZERO {
                assert!((v.norm() - 1.0).abs() < 1e-12);
                let (k, l) = chi.turn(n).unwrap();
                // order divides φ(m)
                assert_eq!((k * phi) % l, 0);
            }
        }
        for j in 0..m {
            for k in 0..m {
                let lhs = chi.value(j * k % m);
                assert!(close(lhs, chi.value(j) * chi.value(k), 1e-12));
            }
        }
        assert_eq!(m % chi.conductor(), 0);
    }

    #[test]
    fn counts_and_invariants() {
        for m in 1..=40u64 {
            let chars = enumerate_characters(m).unwrap();
            assert_eq!(chars.len() as u64, totient(m).unwrap(), "m = {m}");
            assert!(chars[0].is_principal());
            for (i, chi) in chars.iter().enumerate() {
                assert_eq!(chi.index(), i as u64);
                check_invariants(chi);
            }
        }
    }

    #[test]
    fn small_examples() {
        let one = enumerate_characters(1).unwrap();
        assert_eq!(one.len(), 1);
        assert!((0..10).all(|n| one[0].value(n) == ONE));
        assert_eq!(enumerate_characters(5).unwrap().len(), 4);
        let twelve = enumerate_characters(12).unwrap();
        assert_eq!(twelve.len(), 4);
        assert!(twelve.iter().all(DirichletCharacter::is_real));
        assert!(enumerate_characters(0).is_err());
        assert!(matches!(enumerate_characters(1_000_001), Err(Error::Resource(_))));
    }

    #[test]
    fn conductor_examples() {
        let principal6 = character(6, 0).unwrap();
        let (m0, psi) = conductor_and_primitive_part(&principal6);
        assert_eq!(m0, 1);
        assert_eq!(psi.modulus(), 1);

        let chi4 = character(4, 1).unwrap();
        // no proper divisor d of 4 makes χ trivial on units ≡ 1 (mod d)
        for d in [1u64, 2] {
            assert!((1..4).filter(|n| n % 2 == 1 && n % d == 1 % d).any(|n| chi4.value(n) != ONE));
        }
        let (m0, psi) = conductor_and_primitive_part(&chi4);
        assert_eq!((m0, psi.index()), (4, 1));

        // the mod-12 character induced from the Legendre symbol mod 3
        let legendre3 = character(3, 1).unwrap();
        let chi = enumerate_characters(12)
            .unwrap()
            .into_iter()
            .find(|c| (0..12).all(|n| {
                let expected = if gcd(n, 12) == 1 { legendre3.value(n) } else { ZERO };
                close(c.value(n), expected, 1e-12)
            }))
            .unwrap();
        let (m0, psi) = conductor_and_primitive_part(&chi);
        assert_eq!(m0, 3);
        assert_eq!(psi, legendre3);
    }

    #[test]
    fn primitive_part_reconstructs_character() {
        for m in 1..=60u64 {
            for chi in enumerate_characters(m).unwrap() {
                let (m0, psi) = conductor_and_primitive_part(&chi);
                assert!(psi.is_primitive());
                for n in 0..m {
                    let expected = if gcd(n, m) == 1 { psi.value(n) } else { ZERO };
                    assert!(close(chi.value(n), expected, 1e-12), "{} n={n}", chi.label());
                }
                // idempotent
                let (m1, psi2) = conductor_and_primitive_part(&psi);
                assert_eq!((m1, psi2.index()), (m0, psi.index()));
                // least induced modulus, by exhaustion over divisors
                for d in (1..m0).filter(|d| m % d == 0) {
                    let induced = (1..m).filter(|&n| gcd(n, m) == 1 && n % d == 1 % d)
                        .all(|n| close(chi.value(n), ONE, 1e-12));
                    assert!(!induced, "{} is induced from mod {d}", chi.label());
                }
            }
        }
    }

    #[test]
    fn induce_examples() {
        let trivial = character(1, 0).unwrap();
        assert_eq!(induce(&trivial, 10).unwrap(), character(10, 0).unwrap());
        let psi = character(5, 2).unwrap();
        assert_eq!(induce(&psi, 5).unwrap(), psi);
        let legendre3 = character(3, 1).unwrap();
        let chi = induce(&legendre3, 12).unwrap();
        for n in 0..12 {
            let expected = if gcd(n, 12) == 1 { legendre3.value(n) } else { ZERO };
            assert!(close(chi.value(n), expected, 1e-12));
        }
        assert!(induce(&legendre3, 10).is_err());
    }

    #[test]
    fn group_is_closed_under_products() {
        for m in [8u64, 12, 15, 16, 21, 24] {
            let chars = enumerate_characters(m).unwrap();
            for a in &chars {
                for b in &chars {
                    let hit = chars.iter().any(|c| {
                        (0..m).all(|n| close(c.value(n), a.value(n) * b.value(n), 1e-12))
                    });
                    assert!(hit, "{} * {}", a.label(), b.label());
                }
            }
        }
    }

    #[test]
    fn polynomial_examples() {
        let chi5 = character(5, 1).unwrap();
        assert!(close(gauss_polynomial_p(&chi5, ONE), ZERO, 1e-12));
        assert_eq!(gauss_polynomial_p(&chi5, ZERO), ZERO);
        let legendre3 = character(3, 1).unwrap();
        let quarter = PhaseAngle::rational(1, 4).unwrap().unit();
        // χ(1)e(1/4) + χ(2)e(1/2) = i + 1
        assert!(close(gauss_polynomial_p(&legendre3, quarter), Complex64::new(1.0, 1.0), 1e-12));
    }

    #[test]
    fn tau_examples() {
        assert!(close(gauss_tau(&character(1, 0).unwrap()).unwrap(), ONE, 1e-12));
        let quad5 = enumerate_characters(5).unwrap().into_iter().find(|c| c.is_real() && !c.is_principal()).unwrap();
        assert!((gauss_tau(&quad5).unwrap().norm() - 5f64.sqrt()).abs() < 1e-9);
        let legendre3 = character(3, 1).unwrap();
        let direct = unit_phase(1, PhaseAngle::rational(1, 3).unwrap()).unwrap()
            - unit_phase(2, PhaseAngle::rational(1, 3).unwrap()).unwrap();
        let tau = gauss_tau(&legendre3).unwrap();
        assert!(close(tau, direct, 1e-9));
        assert!(close(tau, Complex64::new(0.0, 3f64.sqrt()), 1e-9));
        assert!(gauss_tau(&character(6, 0).unwrap()).is_err());
    }

    #[test]
    fn formula_examples() {
        let chi5 = character(5, 1).unwrap();
        let brute = gauss_polynomial_p(&chi5, PhaseAngle::rational(2, 5).unwrap().unit());
        let formula = gauss_p_formula(&chi5, 2).unwrap();
        assert!(close(formula, brute, 1e-9));
        assert!((formula.norm() - 5f64.sqrt()).abs() < 1e-9);
        let chi4 = character(4, 1).unwrap();
        assert_eq!(gauss_p_formula(&chi4, 2).unwrap(), ZERO);
        assert_eq!(gauss_p_formula(&chi5, 5).unwrap(), ZERO);
        // 12 = 4·3 with χ induced from mod 3 fails the hypothesis
        let chi12 = induce(&character(3, 1).unwrap(), 12).unwrap();
        assert!(matches!(gauss_p_formula(&chi12, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn labels() {
        assert_eq!(parse_label("5.2").unwrap(), (5, 2));
        assert!(parse_label("5").is_err());
        assert_eq!(character_from_label("7.1").unwrap().label(), "7.1");
        assert!(character_from_label("7.6").is_err());
    }
}
