//! Phase factors `e(nα)`, Archimedean twists `n^{it}` and compensated
//! accumulation of long unit-modulus sums.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest denominator for which a rational angle may be evaluated.
pub const MAX_RATIONAL_DENOMINATOR: u64 = 1 << 30;

/// Denominators up to this size get a materialized root-of-unity table.
const TABLE_MATERIALIZE_LIMIT: u64 = 1 << 20;

/// Fixed-point angles closer than this (in turns, as a 2^-128 fraction) to
/// an integer count as integral.
const NEAR_INTEGER: u128 = 1 << 64;

/// An angle `α mod 1`, either an exact reduced fraction or a 128-bit
/// fixed-point fraction of a turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PhaseAngle {
    /// `num/den` with `0 <= num < den` and `gcd(num, den) = 1`.
    Rational { num: u64, den: u64 },
    /// `frac / 2^128`.
    Fixed(u128),
}

impl PhaseAngle {
    pub const ZERO: PhaseAngle = PhaseAngle::Rational { num: 0, den: 1 };

    /// `a/q` reduced modulo 1.
    pub fn rational(a: i128, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        let num = a.rem_euclid(q as i128) as u64;
        let g = gcd(num, q);
        Ok(PhaseAngle::Rational {
            num: num / g,
            den: q / g,
        })
    }

    pub fn fixed(frac: u128) -> Self {
        PhaseAngle::Fixed(frac)
    }

    /// Exact conversion of a double (mod 1) to fixed point; every finite
    /// double has a terminating binary expansion.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite angle {x}")));
        }
        let frac = x - x.floor();
        // frac < 1 with at most 53 significant bits; scaling by 2^128 in
        // two steps keeps every intermediate exact.
        let hi = frac * 2f64.powi(64);
        let hi_int = hi.floor();
        let lo = (hi - hi_int) * 2f64.powi(64);
        let value = ((hi_int as u128) << 64) | (lo as u64 as u128);
        Ok(PhaseAngle::Fixed(value))
    }

    /// `√2 − 1`, truncated to 128 bits.
    pub fn sqrt2_minus_1() -> Self {
        let one = BigUint::from(1u8) << 128;
        let root = (BigUint::from(2u8) << 256usize).sqrt();
        PhaseAngle::Fixed(to_u128(&(root - one)))
    }

    /// `(√5 − 1)/2`, the golden ratio minus one, truncated to 128 bits.
    pub fn golden_minus_1() -> Self {
        let one = BigUint::from(1u8) << 128;
        let root = (BigUint::from(5u8) << 256usize).sqrt();
        PhaseAngle::Fixed(to_u128(&((root - one) >> 1)))
    }

    /// `√5 − 2`, truncated to 128 bits.
    pub fn sqrt5_minus_2() -> Self {
        let two = BigUint::from(2u8) << 128;
        let root = (BigUint::from(5u8) << 256usize).sqrt();
        PhaseAngle::Fixed(to_u128(&(root - two)))
    }

    /// 128-bit fraction of a turn; rationals are truncated.
    pub fn to_fixed(self) -> u128 {
        match self {
            PhaseAngle::Fixed(f) => f,
            PhaseAngle::Rational { num, den } => {
                let wide = (num as u128) << 64;
                let hi = wide / den as u128;
                let rem = wide % den as u128;
                let lo = (rem << 64) / den as u128;
                (hi << 64) | lo
            }
        }
    }

    pub fn as_fixed(self) -> PhaseAngle {
        PhaseAngle::Fixed(self.to_fixed())
    }

    /// `α` as a double in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        match self {
            PhaseAngle::Rational { num, den } => num as f64 / den as f64,
            PhaseAngle::Fixed(f) => (f >> 64) as u64 as f64 / 2f64.powi(64),
        }
    }

    /// `α` reduced to `[-1/2, 1/2)`.
    pub fn signed_turn(self) -> f64 {
        match self {
            PhaseAngle::Rational { num, den } => signed_rational_turn(num, den),
            PhaseAngle::Fixed(f) => signed_fixed_turn(f),
        }
    }

    /// `k·α mod 1`, exact in both modes.
    pub fn dilate(self, k: u64) -> Self {
        match self {
            PhaseAngle::Rational { num, den } => {
                let n = ((num as u128 * k as u128) % den as u128) as u64;
                let g = gcd(n, den);
                PhaseAngle::Rational {
                    num: n / g,
                    den: den / g,
                }
            }
            PhaseAngle::Fixed(f) => PhaseAngle::Fixed(f.wrapping_mul(k as u128)),
        }
    }

    /// `k·α mod 1` for a 128-bit multiplier.
    pub fn dilate_wide(self, k: u128) -> Self {
        match self {
            PhaseAngle::Rational { den, .. } => self.dilate((k % den as u128) as u64),
            PhaseAngle::Fixed(f) => PhaseAngle::Fixed(f.wrapping_mul(k)),
        }
    }

    /// `α ∈ ℤ`: exact for rationals; fixed-point angles within `2^-64` of an
    /// integer count as integral.
    pub fn is_integral(self) -> bool {
        match self {
            PhaseAngle::Rational { num, .. } => num == 0,
            PhaseAngle::Fixed(f) => f < NEAR_INTEGER || f.wrapping_neg() < NEAR_INTEGER,
        }
    }

    /// Whether `m·α ∈ ℤ` (same convention as [`is_integral`](Self::is_integral)).
    pub fn multiple_is_integral(self, m: u64) -> bool {
        self.dilate(m).is_integral()
    }

    pub fn is_rational(self) -> bool {
        matches!(self, PhaseAngle::Rational { .. })
    }

    /// Denominator in rational mode.
    pub fn denominator(self) -> Option<u64> {
        match self {
            PhaseAngle::Rational { den, .. } => Some(den),
            PhaseAngle::Fixed(_) => None,
        }
    }

    /// `e(α)`.
    pub fn unit(self) -> Complex64 {
        unit_from_signed_turn(self.signed_turn())
    }

    /// `|1 − e(α)| = 2|sin(πα)|`.
    pub fn chord(self) -> f64 {
        2.0 * (std::f64::consts::PI * self.signed_turn()).sin().abs()
    }
}

fn to_u128(v: &BigUint) -> u128 {
    let digits = v.to_u64_digits();
    let lo = digits.first().copied().unwrap_or(0) as u128;
    let hi = digits.get(1).copied().unwrap_or(0) as u128;
    (hi << 64) | lo
}

#[inline]
fn signed_rational_turn(k: u64, q: u64) -> f64 {
    if 2 * k as u128 >= q as u128 {
        -((q - k) as f64) / q as f64
    } else {
        k as f64 / q as f64
    }
}

#[inline]
fn signed_fixed_turn(f: u128) -> f64 {
    // two's-complement reading of the top 64 bits lands in [-1/2, 1/2)
    ((f >> 64) as u64 as i64) as f64 / 2f64.powi(64)
}

#[inline]
fn unit_from_signed_turn(turn: f64) -> Complex64 {
    // quarter turns are exact
    if turn == 0.0 {
        return ONE;
    } else if turn == -0.5 {
        return Complex64::new(-1.0, 0.0);
    } else if turn == 0.25 {
        return Complex64::new(0.0, 1.0);
    } else if turn == -0.25 {
        return Complex64::new(0.0, -1.0);
    }
    let (s, c) = (TAU * turn).sin_cos();
    Complex64::new(c, s)
}

/// `e(k/q)` for `0 <= k < q`.
#[inline]
pub(crate) fn root_of_unity(k: u64, q: u64) -> Complex64 {
    unit_from_signed_turn(signed_rational_turn(k, q))
}

/// `e(n·α)`.
///
/// Rational angles reduce `n·a mod q` exactly; fixed-point angles reduce
/// `n·frac mod 2^128` exactly (the low half of the 256-bit product).
pub fn unit_phase(n: u64, alpha: PhaseAngle) -> Result<Complex64> {
    match alpha {
        PhaseAngle::Rational { num, den } => {
            if den > MAX_RATIONAL_DENOMINATOR {
                return Err(Error::TableTooLarge(den));
            }
            let k = ((n % den) as u128 * num as u128 % den as u128) as u64;
            Ok(root_of_unity(k, den))
        }
        PhaseAngle::Fixed(f) => Ok(unit_from_signed_turn(signed_fixed_turn(
            f.wrapping_mul(n as u128),
        ))),
    }
}

/// Precomputed evaluator of `n ↦ e(nα)` for a fixed angle.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    alpha: PhaseAngle,
    roots: Option<Vec<Complex64>>,
}

impl PhaseTable {
    pub fn new(alpha: PhaseAngle) -> Result<Self> {
        let roots = match alpha {
            PhaseAngle::Rational { den, .. } if den > MAX_RATIONAL_DENOMINATOR => {
                return Err(Error::TableTooLarge(den));
            }
            PhaseAngle::Rational { den, .. } if den <= TABLE_MATERIALIZE_LIMIT => {
                Some((0..den).map(|k| root_of_unity(k, den)).collect())
            }
            _ => None,
        };
        Ok(Self { alpha, roots })
    }

    pub fn alpha(&self) -> PhaseAngle {
        self.alpha
    }

    #[inline]
    pub fn at(&self, n: u64) -> Complex64 {
        match self.alpha {
            PhaseAngle::Rational { num, den } => {
                let k = ((n % den) as u128 * num as u128 % den as u128) as u64;
                match &self.roots {
                    Some(t) => t[k as usize],
                    None => root_of_unity(k, den),
                }
            }
            PhaseAngle::Fixed(f) => {
                unit_from_signed_turn(signed_fixed_turn(f.wrapping_mul(n as u128)))
            }
        }
    }
}

impl fmt::Display for PhaseAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PhaseAngle::Rational { num, den } => write!(f, "{num}/{den}"),
            PhaseAngle::Fixed(v) => write!(f, "0x{v:032x}"),
        }
    }
}

impl From<PhaseAngle> for String {
    fn from(a: PhaseAngle) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for PhaseAngle {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Grammar: `a/q` (exact rational), `0x<hex>` (exact 128-bit fraction),
/// a decimal literal (fixed point), or one of the named constants
/// `sqrt2m1`, `phi-1`, `sqrt5m2`.
impl FromStr for PhaseAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sqrt2m1" => return Ok(Self::sqrt2_minus_1()),
            "phi-1" => return Ok(Self::golden_minus_1()),
            "sqrt5m2" => return Ok(Self::sqrt5_minus_2()),
            _ => {}
        }
        if let Some((a, q)) = s.split_once('/') {
            let a: i128 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return PhaseAngle::rational(a, q);
        }
        if let Some(hex) = s.strip_prefix("0x") {
            if hex.is_empty() || hex.len() > 32 {
                return Err(Error::Parse(format!("bad hex fraction {s:?}")));
            }
            let v = u128::from_str_radix(hex, 16)
                .map_err(|_| Error::Parse(format!("bad hex fraction {s:?}")))?;
            // shorter strings are left-aligned: "0x8" is 1/2
            return Ok(PhaseAngle::Fixed(v << (4 * (32 - hex.len()))));
        }
        parse_decimal(s)
    }
}

fn parse_decimal(s: &str) -> Result<PhaseAngle> {
    let bad = || Error::Parse(format!("cannot parse angle {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = if frac_part.is_empty() { "0" } else { frac_part };
    let numer = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    let denom = BigUint::from(10u8).pow(frac_part.len() as u32);
    let scaled = (numer << 128) / denom;
    let v = to_u128(&scaled);
    Ok(PhaseAngle::Fixed(if neg { v.wrapping_neg() } else { v }))
}

/// `n^{it} = exp(i·t·ln n)`; exactly `1` when `t = 0` or `n = 1`.
pub fn archimedean_twist(n: u64, t: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("n^{it} is undefined at n = 0".into()));
    }
    Ok(twist_unchecked(n, t))
}

#[inline]
pub(crate) fn twist_unchecked(n: u64, t: f64) -> Complex64 {
    if t == 0.0 || n == 1 {
        return ONE;
    }
    let (s, c) = (t * (n as f64).ln()).sin_cos();
    Complex64::new(c, s)
}

/// Neumaier-compensated complex accumulator.
///
/// Partial accumulators over disjoint ranges merge by adding sums and
/// compensations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedAccumulator {
    sum: Complex64,
    compensation: Complex64,
    count: u64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.sum.re, &mut self.compensation.re, z.re);
        neumaier(&mut self.sum.im, &mut self.compensation.im, z.im);
        self.count += 1;
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.sum + self.compensation
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn merge(&mut self, other: &CompensatedAccumulator) {
        neumaier(&mut self.sum.re, &mut self.compensation.re, other.sum.re);
        neumaier(&mut self.sum.im, &mut self.compensation.im, other.sum.im);
        self.compensation += other.compensation;
        self.count += other.count;
    }
}

/// Compensated sum of a sequence; the first non-finite term is reported.
pub fn stream_sum<I>(terms: I) -> Result<Complex64>
where
    I: IntoIterator<Item = Complex64>,
{
    let mut acc = CompensatedAccumulator::new();
    for (index, z) in terms.into_iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { index });
        }
        acc.add(z);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn unit_phase_examples() {
        assert_eq!(unit_phase(12345, PhaseAngle::ZERO).unwrap(), ONE);
        let half = PhaseAngle::rational(1, 2).unwrap();
        assert_eq!(unit_phase(1, half).unwrap(), Complex64::new(-1.0, 0.0));
        let big = PhaseAngle::rational(1, (1 << 30) + 1).unwrap();
        assert!(matches!(unit_phase(3, big), Err(Error::TableTooLarge(_))));
    }

    #[test]
    fn fixed_phase_matches_bigint_reduction() {
        // reference: n·frac mod 2^128 with arbitrary-precision integers
        let alpha = PhaseAngle::sqrt2_minus_1();
        let PhaseAngle::Fixed(frac) = alpha else { unreachable!() };
        let n = 1_000_000_000u64;
        let product = BigUint::from(frac) * BigUint::from(n);
        let reduced: BigUint = product % (BigUint::from(1u8) << 128usize);
        let turn: f64 = reduced.to_string().parse::<f64>().unwrap() / 2f64.powi(128);
        let expected = Complex64::new((TAU * turn).cos(), (TAU * turn).sin());
        let got = unit_phase(n, alpha).unwrap();
        assert!(close(got, expected, 1e-12), "{got} vs {expected}");
        // n·(√2−1) mod 1 from a 60-digit decimal value of √2
        let sqrt2 = "0.414213562373095048801688724209698078569671875376948073176679";
        let digits = BigUint::parse_bytes(&sqrt2.as_bytes()[2..], 10).unwrap();
        let scale = BigUint::from(10u8).pow(60);
        let frac_part = (digits * BigUint::from(n)) % &scale;
        let turn2: f64 = frac_part.to_string().parse::<f64>().unwrap() / 1e60;
        assert!((turn - turn2).abs() < 1e-15);
    }

    #[test]
    fn named_constants() {
        // decimal expansions, correctly rounded to f64
        assert!((PhaseAngle::sqrt2_minus_1().to_f64() - 0.414_213_562_373_095_048_8).abs() < 1e-16);
        assert!((PhaseAngle::golden_minus_1().to_f64() - 0.618_033_988_749_894_848_2).abs() < 1e-16);
        assert!((PhaseAngle::sqrt5_minus_2().to_f64() - 0.236_067_977_499_789_696_4).abs() < 1e-16);
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(
            "3/6".parse::<PhaseAngle>().unwrap(),
            PhaseAngle::Rational { num: 1, den: 2 }
        );
        assert_eq!(
            "-1/3".parse::<PhaseAngle>().unwrap(),
            PhaseAngle::Rational { num: 2, den: 3 }
        );
        assert_eq!("0.5".parse::<PhaseAngle>().unwrap(), PhaseAngle::Fixed(1 << 127));
        assert_eq!("1.25".parse::<PhaseAngle>().unwrap(), PhaseAngle::Fixed(1 << 126));
        assert_eq!("0x8".parse::<PhaseAngle>().unwrap(), PhaseAngle::Fixed(1 << 127));
        let a = PhaseAngle::sqrt2_minus_1();
        assert_eq!(a.to_string().parse::<PhaseAngle>().unwrap(), a);
        assert!("abc".parse::<PhaseAngle>().is_err());
        assert!("1/0".parse::<PhaseAngle>().is_err());
    }

    #[test]
    fn from_f64_is_exact() {
        assert_eq!(PhaseAngle::from_f64(0.25).unwrap(), PhaseAngle::Fixed(1 << 126));
        assert_eq!(PhaseAngle::from_f64(-0.25).unwrap(), PhaseAngle::Fixed(3 << 126));
        let x = 0.1234567890123;
        assert_eq!(PhaseAngle::from_f64(x).unwrap().to_f64(), x);
    }

    #[test]
    fn integrality() {
        let third = PhaseAngle::rational(1, 3).unwrap();
        assert!(third.multiple_is_integral(3));
        assert!(!third.multiple_is_integral(4));
        assert!(PhaseAngle::Fixed(1).is_integral());
        assert!(PhaseAngle::Fixed(u128::MAX).is_integral());
        assert!(!PhaseAngle::sqrt2_minus_1().multiple_is_integral(1_000_000));
    }

    #[test]
    fn twist_examples() {
        assert_eq!(archimedean_twist(17, 0.0).unwrap(), ONE);
        assert_eq!(archimedean_twist(1, 3.7).unwrap(), ONE);
        let t = TAU / 10f64.ln();
        assert!(close(archimedean_twist(10, t).unwrap(), ONE, 1e-12));
        assert!(archimedean_twist(0, 1.0).is_err());
    }

    #[test]
    fn stream_sum_examples() {
        assert_eq!(stream_sum(Vec::new()).unwrap(), ZERO);
        assert_eq!(
            stream_sum(vec![ONE, Complex64::new(-1.0, 0.0)]).unwrap(),
            ZERO
        );
        let err = stream_sum(vec![ONE, Complex64::new(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1 }));
    }

    #[test]
    fn long_sum_matches_geometric_closed_form() {
        // Σ_{n=1}^{N} e(nβ) = e(β)(e(Nβ) − 1)/(e(β) − 1), phases reduced exactly
        let beta = PhaseAngle::sqrt5_minus_2();
        let n = 1_000_000u64;
        let got = stream_sum((1..=n).map(|k| unit_phase(k, beta).unwrap())).unwrap();
        let eb = beta.unit();
        let enb = unit_phase(n, beta).unwrap();
        let expected = eb * (enb - ONE) / (eb - ONE);
        assert!(close(got, expected, 1e-10), "{got} vs {expected}");
    }

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let alpha = PhaseAngle::golden_minus_1();
        let mut whole = CompensatedAccumulator::new();
        let mut a = CompensatedAccumulator::new();
        let mut b = CompensatedAccumulator::new();
        for n in 1..=100_000u64 {
            let z = unit_phase(n, alpha).unwrap();
            whole.add(z);
            if n <= 40_000 { a.add(z) } else { b.add(z) }
        }
        a.merge(&b);
        assert_eq!(a.count(), whole.count());
        assert!(close(a.value(), whole.value(), 1e-12));
    }

    #[test]
    fn phase_table_agrees_with_unit_phase() {
        for alpha in [
            PhaseAngle::rational(3, 7).unwrap(),
            PhaseAngle::rational(5, (1 << 21) + 1).unwrap(),
            PhaseAngle::golden_minus_1(),
        ] {
            let table = PhaseTable::new(alpha).unwrap();
            for n in [0u64, 1, 2, 99, 12345, 10_000_000_019] {
                assert_eq!(table.at(n), unit_phase(n, alpha).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn phase_is_additive(m in 0u64..1_000_000_000, n in 0u64..1_000_000_000, frac in any::<u128>()) {
            let alpha = PhaseAngle::Fixed(frac);
            let lhs = unit_phase(m + n, alpha).unwrap();
            let rhs = unit_phase(m, alpha).unwrap() * unit_phase(n, alpha).unwrap();
            prop_assert!(close(lhs, rhs, 1e-12));
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn rational_and_fixed_modes_agree(q in 1u64..100_000, a in 0u64..100_000, n in 0u64..=1_000_000_000) {
            let alpha = PhaseAngle::rational(a as i128, q).unwrap();
            let exact = unit_phase(n, alpha).unwrap();
            let fixed = unit_phase(n, alpha.as_fixed()).unwrap();
            prop_assert!(close(exact, fixed, 1e-12));
        }

        #[test]
        fn twist_is_completely_multiplicative(m in 1u64..1_000_000, n in 1u64..1_000_000, t in -50.0f64..50.0) {
            let lhs = archimedean_twist(m * n, t).unwrap();
            let rhs = archimedean_twist(m, t).unwrap() * archimedean_twist(n, t).unwrap();
            prop_assert!(close(lhs, rhs, 1e-12));
        }
    }
}
