//! Real sequence models and the majorization functionals `U_k` and `L_k`.
//!
//! A [`SequenceModel`] is an explicit head followed by an optional tail: no tail
//! (a finite vector), a constant, or a named generator. Generator tails carry
//! [`TailMeta`], declared up front and spot-checked against sampled entries,
//! which is what lets `U_k`/`L_k` of an infinite sequence be evaluated with a
//! certified error bound: the functionals split as
//! `U_k(a) = U_k(a⁺) + k·limsup a` with `a⁺_i = max(a_i − limsup a, 0)`, and
//! `U_k(a⁺)` only needs the entries whose deviation is not yet dominated by
//! the declared tail mass.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::Evidence;
use crate::tol;

/// Entries sampled when spot-validating declared tail metadata.
pub const VALIDATION_HORIZON: usize = 10_000;

/// Upper limit on generator entries scanned by any single certification.
pub const MAX_SCAN: usize = 5_000_000;

/// Default absolute accuracy for infinite-model evaluations.
pub const DEFAULT_ACCURACY: f64 = 1e-12;

/// A non-empty vector of finite reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVec(Vec<f64>);

impl RealVec {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one entry".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("entry {i} is not finite")));
        }
        Ok(RealVec(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for RealVec {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for RealVec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVec::new(v)
    }
}

impl From<RealVec> for Vec<f64> {
    fn from(v: RealVec) -> Self {
        v.0
    }
}

/// Indices of `values` ordered by non-increasing value; ties keep index order.
pub fn desc_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}

/// `b↓`: the entries rearranged in non-increasing order (stable on ties).
pub fn sort_desc(v: &RealVec) -> RealVec {
    RealVec(desc_order(v).into_iter().map(|i| v[i]).collect())
}

fn sorted_desc(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn sorted_asc(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Sum of the `k` largest entries, added largest first.
pub fn top_k_sum(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::KMismatch { k, len: values.len() });
    }
    Ok(sorted_desc(values).iter().take(k).sum())
}

/// Sum of the `k` smallest entries, added smallest first.
pub fn bottom_k_sum(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::KMismatch { k, len: values.len() });
    }
    Ok(sorted_asc(values).iter().take(k).sum())
}

/// Outcome of a majorization test, with the partial sums that decided it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationCheck {
    pub holds: bool,
    /// First failing `k` (1-based); `k = n` denotes the trace condition.
    pub first_violation: Option<usize>,
    /// `Σ_{i≤k} b↓_i` for `k = 1..=n`.
    pub b_partial: Vec<f64>,
    /// `Σ_{i≤k} c↓_i` for `k = 1..=n`.
    pub c_partial: Vec<f64>,
}

impl MajorizationCheck {
    pub fn evidence(&self, tag: &str, tol_: f64) -> Vec<Evidence> {
        let n = self.b_partial.len();
        let mut out = Vec::with_capacity(n);
        for k in 1..n {
            let (l, r) = (self.b_partial[k - 1], self.c_partial[k - 1]);
            out.push(Evidence::new("partial-sum", tag, tol::ge(l, r, tol_), Some(k), l, r));
        }
        let (l, r) = (self.b_partial[n - 1], self.c_partial[n - 1]);
        out.push(Evidence::new("trace", tag, tol::eq(l, r, tol_), Some(n), l, r));
        out
    }
}

fn partial_sums(sorted: &[f64]) -> Vec<f64> {
    sorted
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Full majorization report for `c ≺ b`.
pub fn majorization_check(b: &[f64], c: &[f64], tol_: f64) -> Result<MajorizationCheck> {
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: c.len() });
    }
    if b.is_empty() {
        return Err(Error::InvalidInput("majorization of empty vectors".into()));
    }
    let n = b.len();
    let b_partial = partial_sums(&sorted_desc(b));
    let c_partial = partial_sums(&sorted_desc(c));
    let mut first_violation = None;
    for k in 1..n {
        if !tol::ge(b_partial[k - 1], c_partial[k - 1], tol_) {
            first_violation = Some(k);
            break;
        }
    }
    if first_violation.is_none() && !tol::eq(b_partial[n - 1], c_partial[n - 1], tol_) {
        first_violation = Some(n);
    }
    Ok(MajorizationCheck { holds: first_violation.is_none(), first_violation, b_partial, c_partial })
}

/// `c ≺ b`: sorted partial sums of `b` dominate those of `c`, with equal totals.
pub fn majorizes(b: &RealVec, c: &RealVec, tol_: f64) -> Result<bool> {
    Ok(majorization_check(b, c, tol_)?.holds)
}

// ---------------------------------------------------------------------------
// Tail metadata
// ---------------------------------------------------------------------------

/// Certified bound on `Σ_{i>N}` of one-sided deviations, as a function of the
/// rule index `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassBound {
    /// Deviations vanish identically.
    Zero,
    /// `Σ_{i>N} ≤ scale·ratio^N / (1 − ratio)`.
    Geometric { scale: f64, ratio: f64 },
    /// Deviations are not summable.
    Divergent,
}

impl MassBound {
    /// Bound on the deviation mass strictly beyond rule index `n`.
    pub fn beyond(&self, n: usize) -> Option<f64> {
        match *self {
            MassBound::Zero => Some(0.0),
            MassBound::Geometric { scale, ratio } => Some(scale.abs() * ratio.powi(n.min(i32::MAX as usize) as i32) / (1.0 - ratio)),
            MassBound::Divergent => None,
        }
    }

    pub fn is_summable(&self) -> bool {
        !matches!(self, MassBound::Divergent)
    }

    /// Smallest rule index `N ≥ from` with `beyond(N) ≤ accuracy`.
    fn certify_from(&self, from: usize, accuracy: f64) -> Option<usize> {
        match *self {
            MassBound::Zero => Some(from),
            MassBound::Divergent => None,
            MassBound::Geometric { scale, ratio } => {
                if self.beyond(from)? <= accuracy {
                    return Some(from);
                }
                if ratio <= 0.0 {
                    return Some(from.max(1));
                }
                let target = accuracy * (1.0 - ratio) / scale.abs();
                let est = (target.ln() / ratio.ln()).ceil().max(0.0) as usize;
                let mut n = est.max(from);
                while self.beyond(n)? > accuracy {
                    n += 1;
                }
                Some(n)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let MassBound::Geometric { scale, ratio } = *self {
            if !(scale.is_finite() && (0.0..1.0).contains(&ratio)) {
                return Err(Error::InvalidInput(format!("geometric mass bound needs finite scale and ratio in [0,1), got ({scale}, {ratio})")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalSum {
    Finite(f64),
    Divergent,
    Unknown,
}

/// Whether tail entries reach the limsup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hits {
    /// Every tail entry lies strictly below the limsup.
    None,
    /// Infinitely many tail entries are at or above the limsup.
    Infinite,
    Unknown,
}

/// Declared asymptotics of a generator tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailMeta {
    pub limsup: f64,
    pub liminf: f64,
    /// Uniform bound on `|a_i|` over the tail.
    pub bound: f64,
    /// Uniform lower bound on `a_i` over the tail.
    pub floor: f64,
    /// Mass of `max(a_i − limsup, 0)`.
    pub above: MassBound,
    /// Mass of `|min(a_i − liminf, 0)|`.
    pub below: MassBound,
    /// Sum of the tail entries from the first governed rule index on.
    pub total_sum: TotalSum,
    pub limsup_hits: Hits,
}

impl TailMeta {
    fn check_shape(&self) -> Result<()> {
        let vals = [self.limsup, self.liminf, self.bound, self.floor];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("tail metadata must be finite".into()));
        }
        let t = tol::DEFAULT_TOL;
        if !(tol::le(self.liminf, self.limsup, t) && tol::le(self.limsup.abs(), self.bound, t) && tol::le(self.liminf.abs(), self.bound, t)) {
            return Err(Error::InvalidInput(format!(
                "tail metadata needs liminf ≤ limsup ≤ bound, got liminf {}, limsup {}, bound {}",
                self.liminf, self.limsup, self.bound
            )));
        }
        if !tol::le(self.floor, self.liminf, t) {
            return Err(Error::InvalidInput(format!("floor {} exceeds liminf {}", self.floor, self.liminf)));
        }
        self.above.validate()?;
        self.below.validate()?;
        match self.total_sum {
            TotalSum::Finite(s) => {
                if !s.is_finite() || self.limsup != 0.0 || self.liminf != 0.0 {
                    return Err(Error::InvalidInput("a finite total sum requires limsup = liminf = 0".into()));
                }
            }
            TotalSum::Divergent => {
                if self.limsup == 0.0 && self.liminf == 0.0 && self.above.is_summable() && self.below.is_summable() {
                    return Err(Error::InvalidInput("tail is absolutely summable but declared divergent".into()));
                }
            }
            TotalSum::Unknown => {}
        }
        Ok(())
    }
}

/// Named closed-form tails. Rule indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum NamedGenerator {
    /// `v1` at odd indices, `v2` at even indices.
    Alternating { v1: f64, v2: f64 },
    /// `g·rho^(i−1)`.
    Geometric { g: f64, rho: f64 },
    /// `c_1 = p`, `c_i = a^i` for odd `i ≠ 1`, `c_i = 1 − a^i` for even `i`.
    #[serde(rename = "example61")]
    Example61 { p: f64, a: f64 },
    /// `1 − 1/(i+1)`.
    HarmonicGap,
}

impl NamedGenerator {
    pub fn name(&self) -> &'static str {
        match self {
            NamedGenerator::Alternating { .. } => "alternating",
            NamedGenerator::Geometric { .. } => "geometric",
            NamedGenerator::Example61 { .. } => "example61",
            NamedGenerator::HarmonicGap => "harmonic_gap",
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        match *self {
            NamedGenerator::Alternating { v1, v2 } => {
                if i % 2 == 1 {
                    v1
                } else {
                    v2
                }
            }
            NamedGenerator::Geometric { g, rho } => g * powu(rho, i - 1),
            NamedGenerator::Example61 { p, a } => {
                if i == 1 {
                    p
                } else if i % 2 == 1 {
                    powu(a, i)
                } else {
                    1.0 - powu(a, i)
                }
            }
            NamedGenerator::HarmonicGap => 1.0 - 1.0 / (i as f64 + 1.0),
        }
    }

    fn check_params(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        match *self {
            NamedGenerator::Alternating { v1, v2 } if !(v1.is_finite() && v2.is_finite()) => bad("alternating values must be finite".into()),
            NamedGenerator::Geometric { g, rho } if !(g.is_finite() && (0.0..1.0).contains(&rho)) => {
                bad(format!("geometric needs finite g and rho in [0,1), got ({g}, {rho})"))
            }
            NamedGenerator::Example61 { p, a } if !(p > 0.0 && p < 1.0 && a > 0.0 && a < 1.0) => {
                bad(format!("example61 needs p, a in (0,1), got ({p}, {a})"))
            }
            _ => Ok(()),
        }
    }

    /// Metadata for the tail made of rule indices `> skip`.
    pub fn default_meta(&self, skip: usize) -> TailMeta {
        let first = skip + 1;
        match *self {
            NamedGenerator::Alternating { v1, v2 } => {
                let (hi, lo) = (v1.max(v2), v1.min(v2));
                TailMeta {
                    limsup: hi,
                    liminf: lo,
                    bound: v1.abs().max(v2.abs()),
                    floor: lo,
                    above: MassBound::Zero,
                    below: MassBound::Zero,
                    total_sum: if v1 == 0.0 && v2 == 0.0 { TotalSum::Finite(0.0) } else { TotalSum::Divergent },
                    limsup_hits: Hits::Infinite,
                }
            }
            NamedGenerator::Geometric { g, rho } => {
                let lead = g * powu(rho, first - 1);
                let mass = MassBound::Geometric { scale: g.abs(), ratio: rho };
                let (above, below) = if g >= 0.0 { (mass, MassBound::Zero) } else { (MassBound::Zero, mass) };
                let hits = if g < 0.0 && rho > 0.0 { Hits::None } else { Hits::Infinite };
                TailMeta {
                    limsup: 0.0,
                    liminf: 0.0,
                    bound: lead.abs(),
                    floor: lead.min(0.0),
                    above,
                    below,
                    total_sum: TotalSum::Finite(lead / (1.0 - rho)),
                    limsup_hits: hits,
                }
            }
            NamedGenerator::Example61 { p, .. } => TailMeta {
                limsup: 1.0,
                liminf: 0.0,
                bound: 1.0,
                floor: 0.0,
                above: MassBound::Zero,
                below: MassBound::Zero,
                total_sum: TotalSum::Divergent,
                limsup_hits: if first == 1 && p >= 1.0 { Hits::Unknown } else { Hits::None },
            },
            NamedGenerator::HarmonicGap => TailMeta {
                limsup: 1.0,
                liminf: 1.0,
                bound: 1.0,
                floor: self.value(first),
                above: MassBound::Zero,
                below: MassBound::Divergent,
                total_sum: TotalSum::Divergent,
                limsup_hits: Hits::None,
            },
        }
    }
}

fn powu(x: f64, n: usize) -> f64 {
    if n <= i32::MAX as usize {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

/// Entrywise transform layered over a named rule.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Named(NamedGenerator),
    /// `max(base_i − level, 0)`.
    PlusPart(Box<Rule>, f64),
    /// `min(base_i − level, 0)`.
    MinusPart(Box<Rule>, f64),
    Negated(Box<Rule>),
}

impl Rule {
    pub fn value(&self, i: usize) -> f64 {
        match self {
            Rule::Named(g) => g.value(i),
            Rule::PlusPart(base, level) => (base.value(i) - level).max(0.0),
            Rule::MinusPart(base, level) => (base.value(i) - level).min(0.0),
            Rule::Negated(base) => -base.value(i),
        }
    }
}

/// A generator tail: tail position `j ≥ 1` holds `rule(skip + j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    rule: Rule,
    meta: TailMeta,
    /// Rule index after which `meta.total_sum` was declared.
    declared_skip: usize,
    skip: usize,
}

impl Generator {
    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn meta(&self) -> &TailMeta {
        &self.meta
    }

    pub fn skip(&self) -> usize {
        self.skip
    }

    /// Value at tail position `j` (1-based).
    pub fn tail_value(&self, j: usize) -> f64 {
        self.rule.value(self.skip + j)
    }

    /// Sum of the rule over indices `> skip`, adjusted for entries materialized
    /// since the metadata was declared.
    pub fn remaining_sum(&self) -> TotalSum {
        match self.meta.total_sum {
            TotalSum::Finite(s) => {
                let consumed: f64 = (self.declared_skip + 1..=self.skip).map(|i| self.rule.value(i)).sum();
                TotalSum::Finite(s - consumed)
            }
            other => other,
        }
    }

    fn spot_validate(&self, horizon: usize, tol_: f64) -> Result<()> {
        let m = &self.meta;
        let vals: Vec<f64> = (1..=horizon).map(|j| self.tail_value(j)).collect();
        for (j, v) in vals.iter().enumerate() {
            let index = self.skip + j + 1;
            if !v.is_finite() {
                return Err(Error::MetadataContradiction { index, detail: "entry is not finite".into() });
            }
            if !tol::le(v.abs(), m.bound, tol_) {
                return Err(Error::MetadataContradiction { index, detail: format!("|{v}| exceeds bound {}", m.bound) });
            }
            if !tol::ge(*v, m.floor, tol_) {
                return Err(Error::MetadataContradiction { index, detail: format!("{v} is below floor {}", m.floor) });
            }
        }
        // Suffix sums of one-sided deviations within the window never exceed the declared mass.
        let check_mass = |mass: &MassBound, dev: &dyn Fn(f64) -> f64, what: &str| -> Result<()> {
            if !mass.is_summable() {
                return Ok(());
            }
            let mut suffix = 0.0;
            for j in (0..vals.len()).rev() {
                let index = self.skip + j;
                suffix += dev(vals[j]);
                let allowed = mass.beyond(index).unwrap_or(f64::INFINITY);
                if !tol::le(suffix, allowed, tol_) {
                    return Err(Error::MetadataContradiction {
                        index: index + 1,
                        detail: format!("{what} deviation mass {suffix} exceeds declared bound {allowed}"),
                    });
                }
            }
            Ok(())
        };
        check_mass(&m.above, &|v| (v - m.limsup).max(0.0), "upper")?;
        check_mass(&m.below, &|v| (m.liminf - v).max(0.0), "lower")?;
        if let TotalSum::Finite(total) = self.remaining_sum() {
            let window: f64 = vals.iter().sum();
            let last = self.skip + vals.len();
            let up = m.above.beyond(last).unwrap_or(f64::INFINITY);
            let down = m.below.beyond(last).unwrap_or(f64::INFINITY);
            let rest = total - window;
            if !(tol::le(rest, up, tol_) && tol::ge(rest, -down, tol_)) {
                return Err(Error::MetadataContradiction {
                    index: last,
                    detail: format!("declared total {total} inconsistent with sampled partial sum {window}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    None,
    Constant(f64),
    Generator(Generator),
}

/// A bounded real sequence: explicit head followed by a tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceModel {
    head: Vec<f64>,
    tail: Tail,
}

/// A value together with a certified absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluated {
    pub value: f64,
    pub error: f64,
}

impl Evaluated {
    pub fn exact(value: f64) -> Self {
        Evaluated { value, error: 0.0 }
    }
}

/// Entries whose one-sided deviation from the limsup (or liminf) is non-zero,
/// found by a certified scan.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationScan {
    /// `(position, |deviation|)`, sorted by decreasing deviation then position.
    pub entries: Vec<(usize, f64)>,
    /// Bound on the deviation mass of all positions not scanned.
    pub residual: f64,
    /// Number of leading positions inspected.
    pub scanned: usize,
}

impl DeviationScan {
    /// Sum of the `k` largest deviations (zeros pad when fewer are present).
    pub fn top_sum(&self, k: usize) -> f64 {
        self.entries.iter().take(k).map(|e| e.1).sum()
    }
}

fn check_finite_values(values: &[f64]) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("entry {i} is not finite")));
    }
    Ok(())
}

impl SequenceModel {
    /// A finite sequence.
    pub fn finite(values: Vec<f64>) -> Result<Self> {
        let v = RealVec::new(values)?;
        Ok(SequenceModel { head: v.into_vec(), tail: Tail::None })
    }

    /// `head` followed by `κ, κ, …`.
    pub fn constant_tail(head: Vec<f64>, kappa: f64) -> Result<Self> {
        check_finite_values(&head)?;
        if !kappa.is_finite() {
            return Err(Error::InvalidInput("constant tail must be finite".into()));
        }
        Ok(SequenceModel { head, tail: Tail::Constant(kappa) })
    }

    /// `head` followed by a named generator continuing at rule index `head.len() + 1`,
    /// with the generator's own metadata.
    pub fn with_generator(head: Vec<f64>, rule: NamedGenerator) -> Result<Self> {
        Self::with_generator_meta(head, rule, None)
    }

    /// As [`with_generator`](Self::with_generator) with caller-declared metadata,
    /// which is spot-validated over [`VALIDATION_HORIZON`] entries.
    pub fn with_generator_meta(head: Vec<f64>, rule: NamedGenerator, meta: Option<TailMeta>) -> Result<Self> {
        check_finite_values(&head)?;
        rule.check_params()?;
        let skip = head.len();
        let meta = meta.unwrap_or_else(|| rule.default_meta(skip));
        meta.check_shape()?;
        let generator = Generator { rule: Rule::Named(rule), meta, declared_skip: skip, skip };
        generator.spot_validate(VALIDATION_HORIZON, tol::DEFAULT_TOL)?;
        Ok(SequenceModel { head, tail: Tail::Generator(generator) })
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.tail, Tail::None)
    }

    /// Length for finite sequences.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.head.len())
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.head.is_empty()
    }

    /// Entry at 0-based position `i`.
    pub fn get(&self, i: usize) -> Option<f64> {
        if i < self.head.len() {
            return Some(self.head[i]);
        }
        let j = i - self.head.len() + 1;
        match &self.tail {
            Tail::None => None,
            Tail::Constant(k) => Some(*k),
            Tail::Generator(g) => Some(g.tail_value(j)),
        }
    }

    /// The first `n` entries (fewer for a shorter finite sequence).
    pub fn truncate(&self, n: usize) -> Vec<f64> {
        (0..n).map_while(|i| self.get(i)).collect()
    }

    pub fn limsup(&self) -> Option<f64> {
        match &self.tail {
            Tail::None => None,
            Tail::Constant(k) => Some(*k),
            Tail::Generator(g) => Some(g.meta.limsup),
        }
    }

    pub fn liminf(&self) -> Option<f64> {
        match &self.tail {
            Tail::None => None,
            Tail::Constant(k) => Some(*k),
            Tail::Generator(g) => Some(g.meta.liminf),
        }
    }

    fn require_limsup(&self) -> Result<f64> {
        self.limsup().ok_or_else(|| Error::InvalidInput("a finite sequence has no limsup".into()))
    }

    fn require_liminf(&self) -> Result<f64> {
        self.liminf().ok_or_else(|| Error::InvalidInput("a finite sequence has no liminf".into()))
    }

    /// Uniform bound on `|a_i|`.
    pub fn bound(&self) -> f64 {
        let h = self.head.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        match &self.tail {
            Tail::None => h,
            Tail::Constant(k) => h.max(k.abs()),
            Tail::Generator(g) => h.max(g.meta.bound),
        }
    }

    /// Uniform lower bound on the entries (exact infimum for finite and constant tails).
    pub fn floor(&self) -> f64 {
        let h = self.head.iter().copied().fold(f64::INFINITY, f64::min);
        match &self.tail {
            Tail::None => h,
            Tail::Constant(k) => h.min(*k),
            Tail::Generator(g) => h.min(g.meta.floor),
        }
    }

    /// Whether the tail reaches its limsup infinitely often.
    pub fn limsup_hits(&self) -> Hits {
        match &self.tail {
            Tail::None => Hits::None,
            Tail::Constant(_) => Hits::Infinite,
            Tail::Generator(g) => g.meta.limsup_hits,
        }
    }

    /// Sum of all entries.
    pub fn total_sum(&self) -> TotalSum {
        let h: f64 = self.head.iter().sum();
        match &self.tail {
            Tail::None => TotalSum::Finite(h),
            Tail::Constant(k) => {
                if *k == 0.0 {
                    TotalSum::Finite(h)
                } else {
                    TotalSum::Divergent
                }
            }
            Tail::Generator(g) => match g.remaining_sum() {
                TotalSum::Finite(s) => TotalSum::Finite(h + s),
                other => other,
            },
        }
    }

    /// Sum of entries at positions `≥ start` (0-based).
    pub fn sum_from(&self, start: usize) -> TotalSum {
        let prefix: f64 = self.truncate(start).iter().sum();
        match self.total_sum() {
            TotalSum::Finite(t) => {
                if let Tail::None = self.tail {
                    TotalSum::Finite(self.head.iter().skip(start).sum())
                } else if start >= self.head.len() {
                    match &self.tail {
                        Tail::Generator(g) => match g.remaining_sum() {
                            TotalSum::Finite(s) => {
                                let skipped: f64 = (1..=start - self.head.len()).map(|j| g.tail_value(j)).sum();
                                TotalSum::Finite(s - skipped)
                            }
                            other => other,
                        },
                        _ => TotalSum::Finite(0.0),
                    }
                } else {
                    TotalSum::Finite(t - prefix)
                }
            }
            other => other,
        }
    }

    /// Moves tail entries into the head until the head has at least `n` entries.
    pub fn materialize(&self, n: usize) -> SequenceModel {
        let mut out = self.clone();
        if out.head.len() >= n {
            return out;
        }
        match &mut out.tail {
            Tail::None => {}
            Tail::Constant(k) => {
                let k = *k;
                out.head.resize(n, k);
            }
            Tail::Generator(g) => {
                let extra = n - out.head.len();
                out.head.extend((1..=extra).map(|j| g.tail_value(j)));
                g.skip += extra;
            }
        }
        out
    }

    /// Drops the first `n` entries.
    pub fn drop_front(&self, n: usize) -> SequenceModel {
        let mut out = self.materialize(n);
        let cut = n.min(out.head.len());
        out.head.drain(..cut);
        out
    }

    /// Replaces the head entry at position `i`; the position must already be materialized.
    pub fn set(&mut self, i: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidInput("entry must be finite".into()));
        }
        let slot = self.head.get_mut(i).ok_or_else(|| Error::InvalidInput(format!("position {i} is not materialized")))?;
        *slot = value;
        Ok(())
    }

    /// Removes the given head positions, keeping the tail.
    pub fn without_head_positions(&self, positions: &[usize]) -> SequenceModel {
        let mut out = self.clone();
        out.head = self.head.iter().enumerate().filter(|(i, _)| !positions.contains(i)).map(|(_, v)| *v).collect();
        out
    }

    /// `−a`.
    pub fn negated(&self) -> SequenceModel {
        let head = self.head.iter().map(|v| -v).collect();
        let tail = match &self.tail {
            Tail::None => Tail::None,
            Tail::Constant(k) => Tail::Constant(-k),
            Tail::Generator(g) => {
                let m = g.meta;
                Tail::Generator(Generator {
                    rule: Rule::Negated(Box::new(g.rule.clone())),
                    meta: TailMeta {
                        limsup: -m.liminf,
                        liminf: -m.limsup,
                        bound: m.bound,
                        floor: -m.bound,
                        above: m.below,
                        below: m.above,
                        total_sum: match m.total_sum {
                            TotalSum::Finite(s) => TotalSum::Finite(-s),
                            other => other,
                        },
                        limsup_hits: Hits::Unknown,
                    },
                    declared_skip: g.declared_skip,
                    skip: g.skip,
                })
            }
        };
        SequenceModel { head, tail }
    }

    /// Scans positions until the deviation mass of the unscanned remainder is
    /// at most `accuracy`; `upper` selects `max(a − limsup, 0)`, otherwise
    /// `|min(a − liminf, 0)|`.
    fn deviation_scan(&self, upper: bool, accuracy: f64) -> Result<DeviationScan> {
        let level = if upper { self.require_limsup()? } else { self.require_liminf()? };
        let dev = |v: f64| if upper { (v - level).max(0.0) } else { (level - v).max(0.0) };
        let mut entries: Vec<(usize, f64)> = self
            .head
            .iter()
            .enumerate()
            .map(|(i, v)| (i, dev(*v)))
            .filter(|e| e.1 > 0.0)
            .collect();
        let mut scanned = self.head.len();
        let mut residual = 0.0;
        if let Tail::Generator(g) = &self.tail {
            let mass = if upper { g.meta.above } else { g.meta.below };
            let what = if upper { "positive deviations above the limsup" } else { "negative deviations below the liminf" };
            let n = mass.certify_from(g.skip, accuracy).ok_or_else(|| Error::HorizonExceeded {
                what: format!("{what} (declared not summable)"),
                limit: MAX_SCAN,
            })?;
            let count = n - g.skip;
            if count > MAX_SCAN {
                return Err(Error::HorizonExceeded { what: what.into(), limit: MAX_SCAN });
            }
            for j in 1..=count {
                let d = dev(g.tail_value(j));
                if d > 0.0 {
                    entries.push((self.head.len() + j - 1, d));
                }
            }
            scanned += count;
            residual = mass.beyond(n).unwrap_or(f64::INFINITY);
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(DeviationScan { entries, residual, scanned })
    }

    /// Certified scan of the entries strictly above the limsup.
    pub fn upper_deviations(&self, accuracy: f64) -> Result<DeviationScan> {
        self.deviation_scan(true, accuracy)
    }

    /// Certified scan of the entries strictly below the liminf (magnitudes).
    pub fn lower_deviations(&self, accuracy: f64) -> Result<DeviationScan> {
        self.deviation_scan(false, accuracy)
    }

    /// Supremum of the entries, within the returned error.
    pub fn sup(&self, accuracy: f64) -> Result<Evaluated> {
        match &self.tail {
            Tail::None => Ok(Evaluated::exact(self.head.iter().copied().fold(f64::NEG_INFINITY, f64::max))),
            _ => {
                let ls = self.require_limsup()?;
                let scan = self.upper_deviations(accuracy)?;
                let top = scan.entries.first().map_or(0.0, |e| e.1);
                Ok(Evaluated { value: ls + top, error: scan.residual })
            }
        }
    }

    /// Infimum of the entries, within the returned error.
    pub fn inf(&self, accuracy: f64) -> Result<Evaluated> {
        match &self.tail {
            Tail::None => Ok(Evaluated::exact(self.head.iter().copied().fold(f64::INFINITY, f64::min))),
            _ => {
                let li = self.require_liminf()?;
                let scan = self.lower_deviations(accuracy)?;
                let bottom = scan.entries.first().map_or(0.0, |e| e.1);
                Ok(Evaluated { value: li - bottom, error: scan.residual })
            }
        }
    }

    /// First `count` positions (in order) whose entries satisfy `pred`,
    /// scanning head then tail up to [`MAX_SCAN`] tail entries.
    pub fn find_positions(&self, count: usize, exclude: &[usize], pred: impl Fn(f64) -> bool) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return Ok(out);
        }
        let limit = match self.tail {
            Tail::None => self.head.len(),
            _ => self.head.len() + MAX_SCAN,
        };
        for i in 0..limit {
            let v = self.get(i).expect("position within model");
            if pred(v) && !exclude.contains(&i) {
                out.push(i);
                if out.len() == count {
                    return Ok(out);
                }
            }
            if let Tail::Constant(_) = self.tail {
                if i >= self.head.len() && !pred(v) {
                    break;
                }
            }
        }
        Err(Error::HorizonExceeded { what: format!("{count} entries with the requested property"), limit: MAX_SCAN })
    }
}

/// `a⁺_i = max(a_i − limsup a, 0)`.
pub fn plus_part(a: &SequenceModel) -> Result<SequenceModel> {
    let ls = a.require_limsup()?;
    let head = a.head.iter().map(|v| (v - ls).max(0.0)).collect();
    let tail = match &a.tail {
        Tail::None => unreachable!("limsup exists"),
        Tail::Constant(_) => Tail::Constant(0.0),
        Tail::Generator(g) => {
            let m = g.meta;
            let zero = matches!(m.above, MassBound::Zero);
            Tail::Generator(Generator {
                rule: Rule::PlusPart(Box::new(g.rule.clone()), ls),
                meta: TailMeta {
                    limsup: 0.0,
                    liminf: 0.0,
                    bound: (m.bound - ls).max(0.0),
                    floor: 0.0,
                    above: m.above,
                    below: MassBound::Zero,
                    total_sum: if zero { TotalSum::Finite(0.0) } else { TotalSum::Unknown },
                    limsup_hits: Hits::Infinite,
                },
                declared_skip: g.skip,
                skip: g.skip,
            })
        }
    };
    Ok(SequenceModel { head, tail })
}

/// `a⁻_i = min(a_i − liminf a, 0)`.
pub fn minus_part(a: &SequenceModel) -> Result<SequenceModel> {
    let li = a.require_liminf()?;
    let head = a.head.iter().map(|v| (v - li).min(0.0)).collect();
    let tail = match &a.tail {
        Tail::None => unreachable!("liminf exists"),
        Tail::Constant(_) => Tail::Constant(0.0),
        Tail::Generator(g) => {
            let m = g.meta;
            let zero = matches!(m.below, MassBound::Zero);
            Tail::Generator(Generator {
                rule: Rule::MinusPart(Box::new(g.rule.clone()), li),
                meta: TailMeta {
                    limsup: 0.0,
                    liminf: 0.0,
                    bound: (li - m.floor).max(0.0),
                    floor: (m.floor - li).min(0.0),
                    above: MassBound::Zero,
                    below: m.below,
                    total_sum: if zero { TotalSum::Finite(0.0) } else { TotalSum::Unknown },
                    limsup_hits: Hits::Infinite,
                },
                declared_skip: g.skip,
                skip: g.skip,
            })
        }
    };
    Ok(SequenceModel { head, tail })
}

/// `U_k(a)`: the largest sum of `k` entries.
///
/// Finite sequences are exact (sorted partial sum). Constant tails are exact
/// via the multiset `head ∪ {κ × k}`. Generator tails use
/// `U_k(a⁺) + k·limsup a` with the error bounded by the unscanned tail mass.
pub fn u_k_seq(a: &SequenceModel, k: usize) -> Result<Evaluated> {
    u_k_seq_with(a, k, DEFAULT_ACCURACY)
}

pub fn u_k_seq_with(a: &SequenceModel, k: usize, accuracy: f64) -> Result<Evaluated> {
    if k == 0 {
        return Err(Error::KMismatch { k, len: 0 });
    }
    match &a.tail {
        Tail::None => Ok(Evaluated::exact(top_k_sum(&a.head, k)?)),
        Tail::Constant(kappa) => {
            let mut pool = a.head.clone();
            pool.extend(std::iter::repeat_n(*kappa, k));
            Ok(Evaluated::exact(top_k_sum(&pool, k)?))
        }
        Tail::Generator(g) => {
            let scan = a.upper_deviations(accuracy)?;
            Ok(Evaluated { value: scan.top_sum(k) + k as f64 * g.meta.limsup, error: scan.residual })
        }
    }
}

/// `L_k(a)`: the smallest sum of `k` entries.
pub fn l_k_seq(a: &SequenceModel, k: usize) -> Result<Evaluated> {
    l_k_seq_with(a, k, DEFAULT_ACCURACY)
}

pub fn l_k_seq_with(a: &SequenceModel, k: usize, accuracy: f64) -> Result<Evaluated> {
    if k == 0 {
        return Err(Error::KMismatch { k, len: 0 });
    }
    match &a.tail {
        Tail::None => Ok(Evaluated::exact(bottom_k_sum(&a.head, k)?)),
        Tail::Constant(kappa) => {
            let mut pool = a.head.clone();
            pool.extend(std::iter::repeat_n(*kappa, k));
            Ok(Evaluated::exact(bottom_k_sum(&pool, k)?))
        }
        Tail::Generator(g) => {
            let scan = a.lower_deviations(accuracy)?;
            Ok(Evaluated { value: k as f64 * g.meta.liminf - scan.top_sum(k), error: scan.residual })
        }
    }
}

/// Result of the ℓ¹ orbit-closure membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitMembership {
    pub member: bool,
    /// The `k`-indexed checks were shown to extend past the horizon.
    pub certified_beyond_horizon: bool,
    pub evidence: Vec<Evidence>,
}

const ORBIT_TAG: &str = "l1-orbit-closure";

/// Whether `b` lies in the ℓ¹-closure of the convex hull of the permutation
/// orbit of `a`: equal sums, `U_k(a) ≥ U_k(b)` and `L_k(a) ≤ L_k(b)`.
///
/// The `k`-families are checked for `k = 1..=horizon`. When both sequences have
/// finitely supported deviations (all deviations sit in the scanned prefix),
/// the inequalities past the support are implied and the result is certified.
pub fn ell1_orbit_closure_member(b: &SequenceModel, a: &SequenceModel, horizon: usize, tol_: f64) -> Result<OrbitMembership> {
    let sum_of = |s: &SequenceModel, name: &str| match s.total_sum() {
        TotalSum::Finite(v) => Ok(v),
        _ => Err(Error::NotSummable(format!("{name} has no finite total sum"))),
    };
    let (sb, sa) = (sum_of(b, "b")?, sum_of(a, "a")?);
    let mut evidence = vec![Evidence::new("equal-sums", ORBIT_TAG, tol::eq(sa, sb, tol_), None, sa, sb)];

    let horizon_for = |s: &SequenceModel| s.len().map_or(horizon, |n| horizon.min(n));
    let kmax = horizon_for(a).min(horizon_for(b));
    let upper = crate::evidence::k_family(
        "upper-functional",
        ORBIT_TAG,
        1..=kmax,
        |k| {
            let ua = u_k_seq(a, k)?;
            let ub = u_k_seq(b, k)?;
            Ok((ua.value + ua.error, ub.value - ub.error))
        },
        |l, r| tol::ge(l, r, tol_),
    )?;
    let lower = crate::evidence::k_family(
        "lower-functional",
        ORBIT_TAG,
        1..=kmax,
        |k| {
            let la = l_k_seq(a, k)?;
            let lb = l_k_seq(b, k)?;
            Ok((lb.value + lb.error, la.value - la.error))
        },
        |l, r| tol::ge(l, r, tol_),
    )?;
    evidence.push(upper);
    evidence.push(lower);

    let support = |s: &SequenceModel| -> Option<usize> {
        if s.is_finite() {
            return Some(s.head.len());
        }
        let up = s.upper_deviations(DEFAULT_ACCURACY).ok()?;
        let down = s.lower_deviations(DEFAULT_ACCURACY).ok()?;
        let exact = up.residual == 0.0 && down.residual == 0.0;
        exact.then(|| up.entries.iter().chain(down.entries.iter()).map(|e| e.0 + 1).max().unwrap_or(0))
    };
    let certified = match (support(a), support(b)) {
        (Some(x), Some(y)) => x.max(y) <= kmax || (a.is_finite() && b.is_finite()),
        _ => false,
    };
    let member = evidence.iter().all(|e| e.pass);
    Ok(OrbitMembership { member, certified_beyond_horizon: certified, evidence })
}
