//! Partial sums `S_f(x; α) = Σ_{n≤x} f(n) e(nα) n^{it}` with running
//! suprema, the character-sum closed form and bounds, the `A`/`B_r`
//! machinery for modified characters, and `n^{it}`-twisted power sums.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::complexsum::{
    twist_unchecked, unit_phase, CompensatedAccumulator, PhaseAngle, PhaseTable, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::multfun::{
    eval_range, ModifiedCharacterSpec, MultiplicativeFunctionSpec, SegmentedEvaluator, SpecDocument,
};
use crate::par::Exec;

/// Terms evaluated per block before the sequential scan.
const BLOCK: u64 = 1 << 18;
const SUB_BLOCK: usize = 1 << 14;

/// Where checkpoints fall; `X` itself is always added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// `round(10^{j/per_decade})`
    Geometric { per_decade: u32 },
    Linear { step: u64 },
    Explicit(Vec<u64>),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Geometric { per_decade: 4 }
    }
}

impl Schedule {
    pub fn checkpoints(&self, limit: u64) -> Vec<u64> {
        let mut xs: Vec<u64> = match self {
            Schedule::Geometric { per_decade } => {
                let per = (*per_decade).max(1) as f64;
                let mut out = Vec::new();
                for j in 0.. {
                    let x = 10f64.powf(j as f64 / per).round();
                    if x > limit as f64 {
                        break;
                    }
                    out.push(x as u64);
                }
                out
            }
            Schedule::Linear { step } => {
                let step = (*step).max(1);
                (1..=limit / step).map(|j| j * step).collect()
            }
            Schedule::Explicit(list) => list.iter().copied().filter(|&x| x <= limit).collect(),
        };
        xs.push(limit);
        xs.sort_unstable();
        xs.dedup();
        xs
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Geometric { per_decade } => write!(f, "geometric:{per_decade}"),
            Schedule::Linear { step } => write!(f, "linear:{step}"),
            Schedule::Explicit(list) => {
                let parts: Vec<String> = list.iter().map(u64::to_string).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// `geometric[:k]`, `linear:step`, `list:x1,x2,...`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("schedule {s:?}"));
        let (kind, arg) = match s.trim().split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s.trim(), None),
        };
        match (kind, arg) {
            ("geometric", None) => Ok(Schedule::default()),
            ("geometric", Some(a)) => Ok(Schedule::Geometric {
                per_decade: a.parse().map_err(|_| bad())?,
            }),
            ("linear", Some(a)) => Ok(Schedule::Linear {
                step: a.parse().map_err(|_| bad())?,
            }),
            ("list", Some(a)) => Ok(Schedule::Explicit(
                a.split(',')
                    .map(|x| x.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?,
            )),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub x: u64,
    pub value: Complex64,
    /// `max_{n ≤ x} |S(n)|`
    pub running_sup: f64,
}

#[derive(Debug, Clone)]
pub struct SumTrajectory {
    pub spec: SpecDocument,
    pub alpha: PhaseAngle,
    pub t: f64,
    pub limit: u64,
    pub schedule: Schedule,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Serialize)]
struct TrajectoryMetadata<'a> {
    spec: &'a SpecDocument,
    alpha: String,
    t: f64,
    #[serde(rename = "X")]
    x: u64,
    schedule: String,
}

impl SumTrajectory {
    pub fn final_value(&self) -> Complex64 {
        self.checkpoints.last().map_or(ZERO, |c| c.value)
    }

    pub fn final_sup(&self) -> f64 {
        self.checkpoints.last().map_or(0.0, |c| c.running_sup)
    }

    /// Running sup at checkpoint `x`.
    pub fn sup_at(&self, x: u64) -> Option<f64> {
        self.checkpoints
            .iter()
            .find(|c| c.x == x)
            .map(|c| c.running_sup)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,re,im,abs,runsup")?;
        for c in &self.checkpoints {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                c.x,
                c.value.re,
                c.value.im,
                c.value.norm(),
                c.running_sup
            )?;
        }
        Ok(())
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&TrajectoryMetadata {
            spec: &self.spec,
            alpha: self.alpha.to_string(),
            t: self.t,
            x: self.limit,
            schedule: self.schedule.to_string(),
        })
        .expect("plain data serializes")
    }

    /// Writes the CSV to `path` and the metadata next to it as `.json`.
    pub fn write_files(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Resource(format!("{}: {e}", path.display()));
        let file = std::fs::File::create(path).map_err(io)?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(io)?;
        std::fs::write(path.with_extension("json"), self.metadata_json()).map_err(io)?;
        Ok(())
    }
}

/// Trajectory of `S(x) = Σ_{n≤x} f(n) e(nα) n^{it}` for `x ≤ limit`.
pub fn sum_trajectory(
    spec: &MultiplicativeFunctionSpec,
    alpha: PhaseAngle,
    t: f64,
    limit: u64,
    schedule: &Schedule,
) -> Result<SumTrajectory> {
    sum_trajectory_with(spec, alpha, t, limit, schedule, Exec::default())
}

pub fn sum_trajectory_with(
    spec: &MultiplicativeFunctionSpec,
    alpha: PhaseAngle,
    t: f64,
    limit: u64,
    schedule: &Schedule,
    exec: Exec,
) -> Result<SumTrajectory> {
    if !t.is_finite() {
        return Err(Error::InvalidConfig("t must be finite".into()));
    }
    let evaluator = SegmentedEvaluator::new(spec, limit)?;
    let phases = PhaseTable::new(alpha)?;
    let marks = schedule.checkpoints(limit);
    let mut next_mark = marks.iter().copied().peekable();
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut acc = CompensatedAccumulator::new();
    let mut sup = 0.0f64;
    while next_mark.peek() == Some(&0) {
        next_mark.next();
        checkpoints.push(Checkpoint {
            x: 0,
            value: ZERO,
            running_sup: 0.0,
        });
    }
    let mut lo = 1;
    while lo <= limit {
        let hi = (lo + BLOCK).min(limit + 1);
        let len = (hi - lo) as usize;
        let terms: Vec<Complex64> = exec
            .map_chunks(len, SUB_BLOCK, |r| {
                let start = lo + r.start as u64;
                let end = lo + r.end as u64;
                let values = evaluator.window(start, end).expect("window inside limit");
                values
                    .into_iter()
                    .zip(start..end)
                    .map(|(v, n)| {
                        if v == ZERO {
                            return ZERO;
                        }
                        let term = v * phases.at(n);
                        if t == 0.0 {
                            term
                        } else {
                            term * twist_unchecked(n, t)
                        }
                    })
                    .collect()
            });
        for (n, term) in (lo..hi).zip(terms) {
            if !term.re.is_finite() || !term.im.is_finite() {
                return Err(Error::NonFinite { index: n as usize });
            }
            acc.add(term);
            let value = acc.value();
            sup = sup.max(value.norm());
            if next_mark.peek() == Some(&n) {
                next_mark.next();
                checkpoints.push(Checkpoint {
                    x: n,
                    value,
                    running_sup: sup,
                });
            }
        }
        lo = hi;
    }
    Ok(SumTrajectory {
        spec: spec.to_document(),
        alpha,
        t,
        limit,
        schedule: schedule.clone(),
        checkpoints,
    })
}

/// `f(x, α) = Σ_{n≤x} χ(n) e(nα)`, compensated.
pub fn char_partial_sum(chi: &DirichletCharacter, alpha: PhaseAngle, x: u64) -> Result<Complex64> {
    let mut acc = CompensatedAccumulator::new();
    let m = chi.modulus();
    for n in 1..=x {
        let c = chi.value(n % m);
        if c != ZERO {
            acc.add(c * unit_phase(n, alpha)?);
        }
    }
    Ok(acc.value())
}

/// `P(e(α)) = Σ_{0≤j<m} χ(j) e(jα)` with exactly reduced phases.
fn p_at_phase(chi: &DirichletCharacter, alpha: PhaseAngle) -> Result<Complex64> {
    let mut acc = CompensatedAccumulator::new();
    for j in 0..chi.modulus() {
        let c = chi.value(j);
        if c != ZERO {
            acc.add(c * unit_phase(j, alpha)?);
        }
    }
    Ok(acc.value())
}

/// `f(n, α) = P(e(α))·(e(nα) − 1)/(e(mα) − 1)` for `m | n`, `mα ∉ ℤ`.
pub fn char_closed_form(chi: &DirichletCharacter, alpha: PhaseAngle, n: u64) -> Result<Complex64> {
    char_closed_form_wide(chi, alpha, n as u128)
}

/// [`char_closed_form`] for `n` up to `2^128`.
pub fn char_closed_form_wide(chi: &DirichletCharacter, alpha: PhaseAngle, n: u128) -> Result<Complex64> {
    let m = chi.modulus();
    if n % m as u128 != 0 {
        return Err(Error::Precondition(format!("{m} does not divide {n}")));
    }
    if alpha.multiple_is_integral(m) {
        return Err(Error::Precondition(format!("{m}·alpha is an integer")));
    }
    if n == 0 {
        return Ok(ZERO);
    }
    let p = p_at_phase(chi, alpha)?;
    let num = alpha.dilate_wide(n).unit() - ONE;
    let den = alpha.dilate(m).unit() - ONE;
    Ok(p * num / den)
}

/// The geometric bound `2/|1 − e(α)|` and the character bound
/// `2m/|e(mα) − 1| + m − 1`; `None` where the denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitBounds {
    pub geometric: Option<f64>,
    pub character: Option<f64>,
}

pub fn explicit_bounds(m: u64, alpha: PhaseAngle) -> Result<ExplicitBounds> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let geometric = (!alpha.is_integral()).then(|| 2.0 / alpha.chord());
    let character = (!alpha.multiple_is_integral(m)).then(|| {
        let mf = m as f64;
        2.0 * mf / alpha.dilate(m).chord() + mf - 1.0
    });
    Ok(ExplicitBounds {
        geometric,
        character,
    })
}

/// Tuple `(ℓ_1, …, ℓ_s)` of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TupleIndex(Vec<u32>);

impl TupleIndex {
    pub fn new(ells: Vec<u32>) -> Result<Self> {
        if ells.contains(&0) {
            return Err(Error::Domain("every l_i must be positive".into()));
        }
        Ok(Self(ells))
    }

    pub fn ells(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, spec: &ModifiedCharacterSpec) -> Result<()> {
        if self.len() > spec.k() {
            return Err(Error::Domain(format!(
                "{} indices for {} modified primes",
                self.len(),
                spec.k()
            )));
        }
        Ok(())
    }
}

fn floor_x(x: f64) -> Result<u64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} must be finite and >= 0")));
    }
    if x >= u64::MAX as f64 {
        return Err(Error::Resource(format!("x = {x} too large")));
    }
    Ok(x.floor() as u64)
}

/// `Σ_{n ≤ y} values[n−1] e(nβ)`.
fn weighted_sum(values: &[Complex64], y: u64, beta: PhaseAngle) -> Result<Complex64> {
    let mut acc = CompensatedAccumulator::new();
    for (i, &v) in values[..y as usize].iter().enumerate() {
        if v != ZERO {
            acc.add(v * unit_phase(i as u64 + 1, beta)?);
        }
    }
    Ok(acc.value())
}

/// `A_{(ℓ_1,…,ℓ_s)}(x, α)` by the recursion that peels off `p_s^{ℓ_s}`,
/// down to `A_{()}(x, α) = S(x, α) = Σ_{n≤x} χ̃(n) e(nα)`.
pub fn a_recursive(spec: &ModifiedCharacterSpec, ells: &TupleIndex, x: f64, alpha: PhaseAngle) -> Result<Complex64> {
    ells.check(spec)?;
    let top = floor_x(x)?;
    let values = eval_range(&spec.to_spec(), top)?;

    fn go(
        spec: &ModifiedCharacterSpec,
        ells: &[u32],
        values: &[Complex64],
        y: u64,
        alpha: PhaseAngle,
    ) -> Result<Complex64> {
        if y == 0 {
            return Ok(ZERO);
        }
        let Some((&last, rest)) = ells.split_last() else {
            return weighted_sum(values, y, alpha);
        };
        let s = rest.len();
        let p = spec.prime(s);
        let whole = go(spec, rest, values, y, alpha)?;
        let Some(pl) = p.checked_pow(last).filter(|&pl| pl <= y) else {
            return Ok(whole);
        };
        let mut shifted = alpha;
        for _ in 0..last {
            shifted = shifted.dilate(p);
        }
        let eta = spec.eta(s).powu(last);
        Ok(whole - eta * go(spec, rest, values, y / pl, shifted)?)
    }

    go(spec, ells.ells(), &values, top, alpha)
}

/// Visits every `β` with `β_i < bounds[i]` (`None` = unbounded) and
/// `∏ p_i^{β_i} ≤ y`, passing `(∏ p_i^{β_i}, ∏ η_i^{β_i}, α·∏ p_i^{β_i})`.
fn for_each_beta(
    spec: &ModifiedCharacterSpec,
    bounds: &[Option<u32>],
    y: u64,
    alpha: PhaseAngle,
    visit: &mut dyn FnMut(u64, Complex64, PhaseAngle) -> Result<()>,
) -> Result<()> {
    fn rec(
        spec: &ModifiedCharacterSpec,
        bounds: &[Option<u32>],
        i: usize,
        d: u64,
        eta: Complex64,
        angle: PhaseAngle,
        y: u64,
        visit: &mut dyn FnMut(u64, Complex64, PhaseAngle) -> Result<()>,
    ) -> Result<()> {
        if i == bounds.len() {
            return visit(d, eta, angle);
        }
        let p = spec.prime(i);
        let (mut d, mut eta, mut angle) = (d, eta, angle);
        let mut beta = 0u32;
        loop {
            rec(spec, bounds, i + 1, d, eta, angle, y, visit)?;
            beta += 1;
            if bounds[i].is_some_and(|b| beta >= b) {
                break;
            }
            // terms with d > y have an empty inner sum
            match d.checked_mul(p) {
                Some(next) if next <= y => d = next,
                _ => break,
            }
            eta *= spec.eta(i);
            angle = angle.dilate(p);
        }
        Ok(())
    }
    rec(spec, bounds, 0, 1, ONE, alpha, y, visit)
}

/// `A_{(ℓ_1,…,ℓ_s)}(x, α)` as the multi-sum over `β_i < ℓ_i` (`i ≤ s`) and
/// `β_i ≥ 0` (`i > s`) of `η^β f(x/p^β, α p^β)`.
pub fn a_expansion(spec: &ModifiedCharacterSpec, ells: &TupleIndex, x: f64, alpha: PhaseAngle) -> Result<Complex64> {
    ells.check(spec)?;
    let y = floor_x(x)?;
    if y == 0 {
        return Ok(ZERO);
    }
    let bounds: Vec<Option<u32>> = (0..spec.k())
        .map(|i| ells.ells().get(i).copied())
        .collect();
    let chi = spec.chi();
    let mut acc = CompensatedAccumulator::new();
    for_each_beta(spec, &bounds, y, alpha, &mut |d, eta, angle| {
        acc.add(eta * char_partial_sum(chi, angle, y / d)?);
        Ok(())
    })?;
    Ok(acc.value())
}

/// `S(x, α)` computed term by term from `χ̃`.
pub fn modified_direct_sum(spec: &ModifiedCharacterSpec, x: f64, alpha: PhaseAngle) -> Result<Complex64> {
    let y = floor_x(x)?;
    weighted_sum(&eval_range(&spec.to_spec(), y)?, y, alpha)
}

/// `S(x, α) = Σ_{β ≥ 0} η^β f(x/p^β, α p^β)`, truncated where `p^β > x`.
pub fn decomposition_sum(spec: &ModifiedCharacterSpec, x: f64, alpha: PhaseAngle) -> Result<Complex64> {
    a_expansion(spec, &TupleIndex::default(), x, alpha)
}

/// `f(n, α')` for `m | n`: the closed form, or `(n/m)·P(e(α'))` when
/// `mα' ∈ ℤ`.
fn char_sum_at_multiple(chi: &DirichletCharacter, alpha: PhaseAngle, n: u128) -> Result<Complex64> {
    let m = chi.modulus();
    if alpha.multiple_is_integral(m) && alpha.is_rational() {
        return Ok(p_at_phase(chi, alpha)? * (n / m as u128) as f64);
    }
    if alpha.multiple_is_integral(m) {
        // fixed-point angle with mα within 2^-64 of an integer: sum directly
        if n > 1 << 24 {
            return Err(Error::Precondition(format!(
                "{m}·alpha is numerically an integer and n = {n} is too large to sum directly"
            )));
        }
        return char_partial_sum(chi, alpha, n as u64);
    }
    char_closed_form_wide(chi, alpha, n)
}

/// `∏ p_i^{e_i}` times `m`, or a resource error past `2^128`.
fn checked_argument(m: u64, factors: impl IntoIterator<Item = (u64, u32)>) -> Result<u128> {
    let mut n = m as u128;
    for (p, e) in factors {
        for _ in 0..e {
            n = n
                .checked_mul(p as u128)
                .ok_or_else(|| Error::Resource("B_r argument exceeds 2^128".into()))?;
        }
    }
    Ok(n)
}

/// `B_r = Σ_{β_i<ℓ_i, β_k<r} η^β f(m ∏_{i<k} p_i^{ℓ_i−β_i−1} p_k^{r−β_k−1}, α p^β)`.
pub fn b_r(spec: &ModifiedCharacterSpec, ells: &TupleIndex, r: u32, alpha: PhaseAngle) -> Result<Complex64> {
    let k = spec.k();
    if k == 0 {
        return Err(Error::Domain("B_r needs at least one modification".into()));
    }
    if ells.len() != k - 1 {
        return Err(Error::Domain(format!("B_r takes {} indices, got {}", k - 1, ells.len())));
    }
    if r == 0 {
        return Err(Error::Domain("r must be positive".into()));
    }
    let mut tops: Vec<u32> = ells.ells().to_vec();
    tops.push(r);
    let chi = spec.chi();
    let mut acc = CompensatedAccumulator::new();
    let mut beta = vec![0u32; k];
    loop {
        let n = checked_argument(
            chi.modulus(),
            (0..k).map(|i| (spec.prime(i), tops[i] - beta[i] - 1)),
        )?;
        let mut angle = alpha;
        let mut eta = ONE;
        for i in 0..k {
            for _ in 0..beta[i] {
                angle = angle.dilate(spec.prime(i));
                eta *= spec.eta(i);
            }
        }
        acc.add(eta * char_sum_at_multiple(chi, angle, n)?);
        // odometer over β
        let mut i = 0;
        loop {
            if i == k {
                return Ok(acc.value());
            }
            beta[i] += 1;
            if beta[i] < tops[i] {
                break;
            }
            beta[i] = 0;
            i += 1;
        }
    }
}

/// `A_{(ℓ_1,…,ℓ_{k−1})}(x, α)` at `x = m ∏_{i<k} p_i^{ℓ_i−1} p_k^{r−1}`
/// against `B_r`; the difference is the `β_k ≥ r` tail, at most
/// `Σ_{β_i<ℓ_i} m ∏ p_i^{ℓ_i−β_i−1} / (p_k − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub x: u64,
    pub a: Complex64,
    pub b: Complex64,
    pub difference: f64,
    pub bound: f64,
}

pub fn b_r_tail_check(spec: &ModifiedCharacterSpec, ells: &TupleIndex, r: u32, alpha: PhaseAngle) -> Result<TailCheck> {
    let b = b_r(spec, ells, r, alpha)?;
    let k = spec.k();
    let mut factors: Vec<(u64, u32)> = ells
        .ells()
        .iter()
        .enumerate()
        .map(|(i, &l)| (spec.prime(i), l - 1))
        .collect();
    factors.push((spec.prime(k - 1), r - 1));
    let x = checked_argument(spec.chi().modulus(), factors)?;
    let x = u64::try_from(x)
        .ok()
        .filter(|&x| x <= crate::multfun::MAX_EVAL_RANGE)
        .ok_or_else(|| Error::Resource(format!("tail check at x = {x} is too large")))?;
    let a = a_recursive(spec, ells, x as f64, alpha)?;
    let mut head = 0.0;
    let mut beta = vec![0u32; k - 1];
    loop {
        let term: f64 = ells
            .ells()
            .iter()
            .zip(&beta)
            .enumerate()
            .map(|(i, (&l, &b))| (spec.prime(i) as f64).powi((l - b - 1) as i32))
            .product();
        head += spec.chi().modulus() as f64 * term;
        let mut i = 0;
        while i < k - 1 {
            beta[i] += 1;
            if beta[i] < ells.ells()[i] {
                break;
            }
            beta[i] = 0;
            i += 1;
        }
        if i == k - 1 {
            break;
        }
    }
    Ok(TailCheck {
        x,
        a,
        b,
        difference: (a - b).norm(),
        bound: head / (spec.prime(k - 1) as f64 - 1.0),
    })
}

/// `max_{r ≤ R} |B_r|` for `R = 1..=max_r`.
pub fn b_r_growth(spec: &ModifiedCharacterSpec, ells: &TupleIndex, max_r: u32, alpha: PhaseAngle) -> Result<Vec<(u32, Complex64, f64)>> {
    let mut sup = 0.0f64;
    (1..=max_r)
        .map(|r| {
            let v = b_r(spec, ells, r, alpha)?;
            sup = sup.max(v.norm());
            Ok((r, v, sup))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerCheckpoint {
    pub x: u64,
    pub harmonic: Complex64,
    pub plain: Complex64,
    pub harmonic_sup: f64,
    pub plain_sup: f64,
}

/// `a_N = Σ z^n n^{it}/n` and `b_N = Σ z^n n^{it}` with running sups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSums {
    pub harmonic: Complex64,
    pub plain: Complex64,
    pub harmonic_sup: f64,
    pub plain_sup: f64,
    /// `z = 1`: the sums are not expected to stay bounded
    pub divergent: bool,
    pub checkpoints: Vec<PowerCheckpoint>,
}

pub fn twisted_power_sums(z: Complex64, t: f64, n_max: u64) -> Result<PowerSums> {
    if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("|z| = {} is not 1", z.norm())));
    }
    if !t.is_finite() {
        return Err(Error::InvalidConfig("t must be finite".into()));
    }
    let angle = PhaseAngle::from_f64(z.arg() / std::f64::consts::TAU)?;
    let divergent = angle.is_integral();
    let marks = Schedule::default().checkpoints(n_max);
    let mut next_mark = marks.iter().copied().peekable();
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut harmonic = CompensatedAccumulator::new();
    let mut plain = CompensatedAccumulator::new();
    let (mut hs, mut ps) = (0.0f64, 0.0f64);
    if next_mark.peek() == Some(&0) {
        next_mark.next();
        checkpoints.push(PowerCheckpoint {
            x: 0,
            harmonic: ZERO,
            plain: ZERO,
            harmonic_sup: 0.0,
            plain_sup: 0.0,
        });
    }
    for n in 1..=n_max {
        let term = unit_phase(n, angle)? * twist_unchecked(n, t);
        plain.add(term);
        harmonic.add(term / n as f64);
        let (h, p) = (harmonic.value(), plain.value());
        hs = hs.max(h.norm());
        ps = ps.max(p.norm());
        if next_mark.peek() == Some(&n) {
            next_mark.next();
            checkpoints.push(PowerCheckpoint {
                x: n,
                harmonic: h,
                plain: p,
                harmonic_sup: hs,
                plain_sup: ps,
            });
        }
    }
    Ok(PowerSums {
        harmonic: harmonic.value(),
        plain: plain.value(),
        harmonic_sup: hs,
        plain_sup: ps,
        divergent,
        checkpoints,
    })
}
