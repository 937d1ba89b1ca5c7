//! Frame admissibility of a pair `(S, c)`: decisive tests in finite dimension
//! and the necessary / sufficient trichotomy for diagonal operators.
//!
//! Every verdict carries the evidence that produced it. `NotAdmissible` is only
//! reported when a necessary condition provably fails (error bounds are
//! applied against the failure claim), `Admissible` only when a decisive or
//! sufficient test passes, and `Undetermined` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{k_family, Evidence};
use crate::operators::{self, DiagonalOperator, FiniteHermitian, OperatorModel, Rank};
use crate::sequences::{self, RealVec, SequenceModel, Tail, TotalSum};
use crate::tol;

/// Default number of `k` values checked by the `k`-indexed families.
pub const DEFAULT_HORIZON: usize = 200;

/// Largest horizon the sufficiency certificate may extend to.
pub const MAX_CERTIFIED_HORIZON: usize = 100_000;

pub const TAG_FINITE: &str = "finite-majorization";
pub const TAG_SUMMABLE: &str = "summable-tail-majorization";
pub const TAG_NECESSARY: &str = "necessary";
pub const TAG_CASE_1: &str = "sufficient-case-1";
pub const TAG_CASE_2: &str = "sufficient-case-2";
pub const TAG_TIGHT: &str = "tight";
pub const TAG_DIMENSION: &str = "dimension";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Admissible,
    NotAdmissible,
    Undetermined,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Admissible => "admissible",
            Status::NotAdmissible => "not admissible",
            Status::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    pub status: Status,
    pub evidence: Vec<Evidence>,
}

impl AdmissibilityVerdict {
    /// First failing evidence item, if any.
    pub fn first_failure(&self) -> Option<&Evidence> {
        self.evidence.iter().find(|e| !e.pass)
    }

    /// Evidence items with the given condition id.
    pub fn find<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a Evidence> + 'a {
        self.evidence.iter().filter(move |e| e.condition == condition)
    }
}

/// Pass/fail of a family of conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub pass: bool,
    pub evidence: Vec<Evidence>,
}

impl ConditionCheck {
    fn from_evidence(evidence: Vec<Evidence>) -> Self {
        ConditionCheck { pass: evidence.iter().all(|e| e.pass), evidence }
    }
}

/// Outcome of the sufficiency test, with the case it selected.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SufficiencyCheck {
    pub pass: bool,
    /// 1 when the top spectral projection has infinite rank, 2 otherwise.
    pub case_id: u8,
    pub p2_rank: Rank,
    /// Last `k` checked explicitly; larger `k` are covered by the tail certificate.
    pub effective_horizon: usize,
    pub evidence: Vec<Evidence>,
}

fn require_nonnegative_finite(c: &RealVec, tol_: f64) -> Result<()> {
    if let Some(i) = c.iter().position(|v| *v < -tol_) {
        return Err(Error::InvalidInput(format!("norm sequence entry {i} is negative ({})", c[i])));
    }
    Ok(())
}

fn require_nonnegative(c: &SequenceModel, tol_: f64) -> Result<()> {
    if c.floor() < -tol_ {
        return Err(Error::InvalidInput(format!("norm sequence has negative entries (lower bound {})", c.floor())));
    }
    Ok(())
}

/// Finite `S`, finite `c`: admissible iff `c ≺ (b_1, …, b_n, 0, …, 0) ∈ ℝᵐ`.
pub fn check_finite_finite(s: &FiniteHermitian, c: &RealVec, tol_: f64) -> Result<AdmissibilityVerdict> {
    s.require_positive_definite(tol_)?;
    require_nonnegative_finite(c, tol_)?;
    let (n, m) = (s.dim(), c.len());
    if m < n {
        let ev = Evidence::new("frame-count", TAG_FINITE, false, None, m as f64, n as f64);
        return Ok(AdmissibilityVerdict { status: Status::NotAdmissible, evidence: vec![ev] });
    }
    let mut b = s.eigenvalues().to_vec();
    b.resize(m, 0.0);
    let chk = sequences::majorization_check(&b, c, tol_)?;
    let status = if chk.holds { Status::Admissible } else { Status::NotAdmissible };
    Ok(AdmissibilityVerdict { status, evidence: chk.evidence(TAG_FINITE, tol_) })
}

/// Finite `S`, summable infinite `c`: admissible iff
/// `Σ_{i≤k} b_i ≥ U_k(c)` for `k < n` and `tr S = Σ c`.
pub fn check_finite_infinite(s: &FiniteHermitian, c: &SequenceModel, tol_: f64) -> Result<AdmissibilityVerdict> {
    s.require_positive_definite(tol_)?;
    require_nonnegative(c, tol_)?;
    let total = match c.total_sum() {
        TotalSum::Finite(t) => t,
        _ => return Err(Error::NotSummable("the norm sequence has no finite total sum".into())),
    };
    let b = s.eigenvalues();
    let n = b.len();
    let upper = k_family(
        "upper-functional",
        TAG_SUMMABLE,
        1..n,
        |k| {
            let u = sequences::u_k_seq(c, k)?;
            Ok((b[..k].iter().sum(), u.value - u.error))
        },
        |l, r| tol::ge(l, r, tol_),
    )?;
    let trace: f64 = b.iter().sum();
    let trace_ev = Evidence::new("trace", TAG_SUMMABLE, tol::eq(trace, total, tol_), Some(n), trace, total);
    let evidence = vec![upper, trace_ev];
    let status = if evidence.iter().all(|e| e.pass) { Status::Admissible } else { Status::NotAdmissible };
    Ok(AdmissibilityVerdict { status, evidence })
}

fn divergence_evidence(c: &SequenceModel, horizon: usize, tag: &str) -> Result<Evidence> {
    let partial: f64 = c.truncate(horizon).iter().sum();
    match c.total_sum() {
        TotalSum::Divergent => Ok(Evidence::new("divergent-sum", tag, true, None, partial, 0.0)),
        TotalSum::Finite(t) => Ok(Evidence::new("divergent-sum", tag, false, None, t, t)),
        TotalSum::Unknown => Err(Error::InvalidInput("the total sum of the norm sequence is not declared".into())),
    }
}

fn require_infinite(c: &SequenceModel) -> Result<()> {
    if c.is_finite() {
        return Err(Error::InvalidInput("an infinite-dimensional operator needs an infinite norm sequence".into()));
    }
    Ok(())
}

/// Weak upper-functional family `U_k(S) ≥ U_k(c)`. With `certify_pass` the
/// sides are the lower bound of `U_k(S)` and the upper bound of `U_k(c)`, so a
/// pass is certain; otherwise the roles flip and a failure is certain.
fn weak_family(s: &OperatorModel, c: &SequenceModel, ks: std::ops::RangeInclusive<usize>, tag: &str, certify_pass: bool, tol_: f64) -> Result<Evidence> {
    let sign = if certify_pass { -1.0 } else { 1.0 };
    k_family(
        "upper-functional",
        tag,
        ks,
        |k| {
            let us = operators::u_k_op(s, k)?;
            let uc = sequences::u_k_seq(c, k)?;
            Ok((us.value + sign * us.error, uc.value - sign * uc.error))
        },
        |l, r| tol::ge(l, r, tol_),
    )
}

/// Diagonal `S` with `inf > 0`: `Σ c = ∞`, `U_k(S) ≥ U_k(c)` for `k ≤ horizon`
/// and `limsup c ≤ α⁺(S)`. The `L_k` side always holds after extending `S`
/// by a zero summand and is not checked.
pub fn check_necessary(s: &DiagonalOperator, c: &SequenceModel, horizon: usize, tol_: f64) -> Result<ConditionCheck> {
    s.require_positive_definite(tol_)?;
    require_infinite(c)?;
    require_nonnegative(c, tol_)?;
    let op = OperatorModel::Diagonal(s.clone());
    let alpha = s.diag().limsup().expect("infinite diagonal");
    let ls = c.limsup().expect("infinite sequence");
    let evidence = vec![
        divergence_evidence(c, horizon, TAG_NECESSARY)?,
        weak_family(&op, c, 1..=horizon.max(1), TAG_NECESSARY, false, tol_)?,
        Evidence::new("essential-norm-bound", TAG_NECESSARY, tol::le(ls, alpha, tol_), None, alpha, ls),
    ];
    Ok(ConditionCheck::from_evidence(evidence))
}

/// Upper bound for every entry of `c⁺` beyond the `h` largest, from a certified scan.
fn plus_part_bound_after(c: &SequenceModel, h: usize) -> Result<f64> {
    let scan = c.upper_deviations(sequences::DEFAULT_ACCURACY)?;
    Ok(scan.entries.get(h).map_or(0.0, |e| e.1).max(scan.residual))
}

/// Smallest `h ≥ from` for which every entry of `c⁺` past the `h` largest is at most `level`.
fn horizon_with_plus_bound(c: &SequenceModel, from: usize, level: f64) -> Result<Option<usize>> {
    let scan = c.upper_deviations(sequences::DEFAULT_ACCURACY)?;
    if scan.residual > level {
        return Ok(None);
    }
    let above = scan.entries.iter().filter(|e| e.1 > level).count();
    Ok(Some(from.max(above)))
}

/// Diagonal `S` with `inf > 0` and divergent `Σ c`.
///
/// Case 1 (`tr P₂ = ∞`): `U_k(S) ≥ U_k(c)` for all `k` and `α⁺(S) > limsup c`.
/// Case 2 (`tr P₂ = r < ∞`): weak inequalities for `k ≤ r`, strict for `k > r`,
/// and `α⁺(S) > limsup c`.
///
/// The inequalities are checked explicitly up to an effective horizon at least
/// `horizon` (and `r + 1` in case 2). Past it, the gap `U_k(S) − U_k(c)` grows by
/// at least `α⁺(S) − limsup c − c⁺_{(h+1)}` per step, where `c⁺_{(h+1)}` bounds
/// the remaining positive deviations; the horizon is pushed out until that
/// growth is at least half the essential gap, which certifies every larger `k`.
pub fn check_sufficient(s: &DiagonalOperator, c: &SequenceModel, horizon: usize, tol_: f64) -> Result<SufficiencyCheck> {
    s.require_positive_definite(tol_)?;
    require_infinite(c)?;
    require_nonnegative(c, tol_)?;
    let op = OperatorModel::Diagonal(s.clone());
    let summary = operators::spectral_summary(&op, sequences::DEFAULT_ACCURACY)?;
    let alpha = summary.alpha_plus.expect("infinite diagonal");
    let r = summary.p2_rank.expect("infinite diagonal");
    let (case_id, tag) = match r {
        Rank::Infinite => (1u8, TAG_CASE_1),
        Rank::Finite(_) => (2u8, TAG_CASE_2),
    };
    let ls = c.limsup().expect("infinite sequence");
    let gap = alpha - ls;
    let mut evidence = vec![
        divergence_evidence(c, horizon, tag)?,
        Evidence::new("essential-norm-gap", tag, tol::gt_strict(alpha, ls, tol_), None, alpha, ls),
    ];
    let min_horizon = match r {
        Rank::Finite(r) => horizon.max(r + 1),
        Rank::Infinite => horizon,
    }
    .max(1);
    let growth_ok = evidence[1].pass;
    let effective = if growth_ok { horizon_with_plus_bound(c, min_horizon, gap / 2.0)? } else { None };
    let checked = effective.unwrap_or(min_horizon);
    if checked > MAX_CERTIFIED_HORIZON {
        return Err(Error::HorizonExceeded { what: "sufficiency certificate".into(), limit: MAX_CERTIFIED_HORIZON });
    }
    match r {
        Rank::Infinite => evidence.push(weak_family(&op, c, 1..=checked, tag, true, tol_)?),
        Rank::Finite(r) => {
            if r >= 1 {
                evidence.push(weak_family(&op, c, 1..=r, tag, true, tol_)?);
            }
            evidence.push(k_family(
                "upper-functional-strict",
                tag,
                r + 1..=checked,
                |k| {
                    let us = operators::u_k_op(&op, k)?;
                    let uc = sequences::u_k_seq(c, k)?;
                    Ok((us.value - us.error, uc.value + uc.error))
                },
                |l, rr| tol::gt_strict(l, rr, tol_),
            )?);
        }
    }
    // Tail certificate: per-step growth of the gap past the effective horizon.
    let tail = match effective {
        Some(h) => {
            let growth = gap - plus_part_bound_after(c, h)?;
            Evidence::new("tail-certificate", tag, growth > tol_ * tol::scale(gap, 0.0), Some(h), growth, 0.0)
        }
        None => Evidence::new("tail-certificate", tag, false, Some(checked), gap, 0.0),
    };
    evidence.push(tail);
    let pass = evidence.iter().all(|e| e.pass);
    Ok(SufficiencyCheck { pass, case_id, p2_rank: r, effective_horizon: checked, evidence })
}

/// Dispatches to the decisive finite tests or the infinite trichotomy.
pub fn classify(s: &OperatorModel, c: &SequenceModel, horizon: usize, tol_: f64) -> Result<AdmissibilityVerdict> {
    match s {
        OperatorModel::Finite(m) => match c.len() {
            Some(_) => check_finite_finite(m, &RealVec::new(c.head().to_vec())?, tol_),
            None => match c.total_sum() {
                TotalSum::Finite(_) => check_finite_infinite(m, c, tol_),
                TotalSum::Divergent => {
                    let partial: f64 = c.truncate(horizon).iter().sum();
                    let ev = Evidence::new("trace", TAG_SUMMABLE, false, None, m.trace(), partial);
                    Ok(AdmissibilityVerdict { status: Status::NotAdmissible, evidence: vec![ev] })
                }
                TotalSum::Unknown => Err(Error::InvalidInput("the total sum of the norm sequence is not declared".into())),
            },
        },
        OperatorModel::Diagonal(d) => {
            if let Some(len) = c.len() {
                let ev = Evidence::new("frame-count", TAG_DIMENSION, false, None, len as f64, f64::MAX);
                return Ok(AdmissibilityVerdict { status: Status::NotAdmissible, evidence: vec![ev] });
            }
            let necessary = check_necessary(d, c, horizon, tol_)?;
            if !necessary.pass {
                return Ok(AdmissibilityVerdict { status: Status::NotAdmissible, evidence: necessary.evidence });
            }
            let sufficient = check_sufficient(d, c, horizon, tol_)?;
            let status = if sufficient.pass { Status::Admissible } else { Status::Undetermined };
            let mut evidence = necessary.evidence;
            evidence.extend(sufficient.evidence);
            Ok(AdmissibilityVerdict { status, evidence })
        }
    }
}

/// Which positions of `c` equal `A` exactly.
#[derive(Clone, Debug, PartialEq)]
struct JSet {
    head: Vec<usize>,
    /// The whole tail lies in `J`.
    tail_in_j: bool,
}

fn structural_j(a: f64, c: &SequenceModel) -> Option<JSet> {
    let head: Vec<usize> = c.head().iter().enumerate().filter(|(_, v)| **v == a).map(|(i, _)| i).collect();
    match c.tail() {
        Tail::None => Some(JSet { head, tail_in_j: false }),
        Tail::Constant(k) => Some(JSet { head, tail_in_j: *k == a }),
        Tail::Generator(_) => {
            let tail = c.drop_front(c.head().len());
            let sup = tail.sup(sequences::DEFAULT_ACCURACY).ok()?;
            (sup.value + sup.error < a).then_some(JSet { head, tail_in_j: false })
        }
    }
}

/// Tight frames with bound `A`: with `J = {i : c_i = A}`, admissible when
/// `Σ_{i∉J} c_i = ∞` and `limsup_{i∉J} c_i < A`. Otherwise, or when `J`
/// cannot be read off structurally, the pair `(A·I, c)` is classified.
pub fn tight_admissible(a: f64, c: &SequenceModel, horizon: usize, tol_: f64) -> Result<AdmissibilityVerdict> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("tight frame bound must be positive, got {a}")));
    }
    let fallback = || {
        let s = DiagonalOperator::new(SequenceModel::constant_tail(vec![], a)?)?;
        classify(&OperatorModel::Diagonal(s), c, horizon, tol_)
    };
    if c.is_finite() {
        return fallback();
    }
    let within = c.floor() >= 0.0 && c.sup(sequences::DEFAULT_ACCURACY).is_ok_and(|s| s.value - s.error <= a);
    let Some(j) = structural_j(a, c).filter(|_| within) else {
        return fallback();
    };
    let (divergent, ls) = if j.tail_in_j {
        (false, f64::NEG_INFINITY)
    } else {
        (matches!(c.total_sum(), TotalSum::Divergent), c.limsup().expect("infinite sequence"))
    };
    let partial: f64 = c.truncate(horizon).iter().enumerate().filter(|(i, _)| !j.head.contains(i)).map(|(_, v)| v).sum();
    let evidence = vec![
        Evidence::new("divergent-sum-off-j", TAG_TIGHT, divergent, None, partial, 0.0),
        Evidence::new("limsup-off-j", TAG_TIGHT, j.tail_in_j || tol::gt_strict(a, ls, tol_), None, a, if j.tail_in_j { a } else { ls }),
    ];
    if evidence.iter().all(|e| e.pass) && !j.tail_in_j {
        return Ok(AdmissibilityVerdict { status: Status::Admissible, evidence });
    }
    let mut v = fallback()?;
    let mut all = evidence;
    all.append(&mut v.evidence);
    v.evidence = all;
    Ok(v)
}

/// `liminf c < α₋(S)`: every frame in `F(S, c)` then has infinite excess.
pub fn excess_forced_infinite(s: &DiagonalOperator, c: &SequenceModel, tol_: f64) -> bool {
    match (c.liminf(), s.diag().liminf()) {
        (Some(ci), Some(am)) => !tol::ge(ci, am, tol_),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::NamedGenerator;

    const T: f64 = tol::DEFAULT_TOL;

    fn rv(v: &[f64]) -> RealVec {
        RealVec::new(v.to_vec()).unwrap()
    }

    fn diag(m: SequenceModel) -> DiagonalOperator {
        DiagonalOperator::new(m).unwrap()
    }

    fn constant(k: f64) -> SequenceModel {
        SequenceModel::constant_tail(vec![], k).unwrap()
    }

    fn gen(head: Vec<f64>, g: NamedGenerator) -> SequenceModel {
        SequenceModel::with_generator(head, g).unwrap()
    }

    #[test]
    fn finite_finite_examples() {
        let s = FiniteHermitian::scaled_identity(2, 2.0).unwrap();
        assert_eq!(check_finite_finite(&s, &rv(&[1.0; 4]), T).unwrap().status, Status::Admissible);
        let s = FiniteHermitian::scaled_identity(3, 2.0).unwrap();
        assert_eq!(check_finite_finite(&s, &rv(&[1.5; 4]), T).unwrap().status, Status::Admissible);
        let s = FiniteHermitian::scaled_identity(2, 1.0).unwrap();
        let v = check_finite_finite(&s, &rv(&[2.0, 0.5]), T).unwrap();
        assert_eq!(v.status, Status::NotAdmissible);
        assert_eq!(v.first_failure().unwrap().witness_k, Some(1));
        let v = check_finite_finite(&s, &rv(&[1.0]), T).unwrap();
        assert_eq!(v.status, Status::NotAdmissible);
        let singular = FiniteHermitian::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(check_finite_finite(&singular, &rv(&[0.5, 0.5]), T), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn finite_infinite_examples() {
        let i2 = FiniteHermitian::scaled_identity(2, 1.0).unwrap();
        let geo = gen(vec![], NamedGenerator::Geometric { g: 1.0, rho: 0.5 });
        assert_eq!(check_finite_infinite(&i2, &geo, T).unwrap().status, Status::Admissible);
        let big = gen(vec![1.5], NamedGenerator::Geometric { g: 0.25, rho: 0.5 });
        let v = check_finite_infinite(&i2, &big, T).unwrap();
        assert_eq!(v.status, Status::NotAdmissible);
        assert_eq!(v.first_failure().unwrap().witness_k, Some(1));
        let i1 = FiniteHermitian::scaled_identity(1, 1.0).unwrap();
        let halves = gen(vec![], NamedGenerator::Geometric { g: 0.5, rho: 0.5 });
        assert_eq!(check_finite_infinite(&i1, &halves, T).unwrap().status, Status::Admissible);
        assert!(matches!(check_finite_infinite(&i1, &constant(1.0), T), Err(Error::NotSummable(_))));
    }

    #[test]
    fn necessary_examples() {
        let c61 = gen(vec![], NamedGenerator::Example61 { p: 0.5, a: 0.2 });
        assert!(check_necessary(&diag(constant(1.0)), &c61, 100, T).unwrap().pass);

        let s62 = diag(gen(vec![], NamedGenerator::HarmonicGap));
        let c62 = SequenceModel::constant_tail(vec![1.0], 0.5).unwrap();
        assert!(check_necessary(&s62, &c62, 200, T).unwrap().pass);

        let chk = check_necessary(&diag(constant(1.0)), &constant(2.0), 50, T).unwrap();
        assert!(!chk.pass);
        let fam = chk.evidence.iter().find(|e| e.condition == "upper-functional").unwrap();
        assert_eq!((fam.pass, fam.witness_k), (false, Some(1)));
        assert!(!chk.evidence.iter().find(|e| e.condition == "essential-norm-bound").unwrap().pass);
    }

    #[test]
    fn sufficient_examples() {
        let s66 = diag(gen(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 2.0 }));
        let chk = check_sufficient(&s66, &constant(1.5), 200, T).unwrap();
        assert!(chk.pass, "{:?}", chk.evidence);
        assert_eq!(chk.case_id, 1);

        let s62 = diag(gen(vec![], NamedGenerator::HarmonicGap));
        let c62 = SequenceModel::constant_tail(vec![1.0], 0.5).unwrap();
        let chk = check_sufficient(&s62, &c62, 200, T).unwrap();
        assert!(!chk.pass);
        assert_eq!(chk.case_id, 2);
        let strict = chk.evidence.iter().find(|e| e.condition == "upper-functional-strict").unwrap();
        assert_eq!((strict.pass, strict.witness_k, strict.lhs, strict.rhs), (false, Some(1), 1.0, 1.0));

        let a63 = gen(vec![], NamedGenerator::Alternating { v1: 0.5, v2: 1.0 });
        let chk = check_sufficient(&diag(a63.clone()), &a63, 200, T).unwrap();
        assert!(!chk.pass);
        assert!(!chk.evidence.iter().find(|e| e.condition == "essential-norm-gap").unwrap().pass);
    }

    #[test]
    fn sufficient_case_two_with_certified_tail() {
        // S = (3, harmonic gap …), c = (2.5, 1/2, 1/2, …): r = 1.
        let s = diag(gen(vec![3.0], NamedGenerator::HarmonicGap));
        let c = SequenceModel::constant_tail(vec![2.5], 0.5).unwrap();
        let chk = check_sufficient(&s, &c, 10, T).unwrap();
        assert!(chk.pass, "{:?}", chk.evidence);
        assert_eq!((chk.case_id, chk.p2_rank), (2, Rank::Finite(1)));
    }

    #[test]
    fn tail_certificate_pushes_horizon_past_large_deviations() {
        // c has 30 entries far above its limsup; horizon 5 must be extended.
        let mut head = vec![1.9; 30];
        head.push(0.1);
        let c = SequenceModel::constant_tail(head, 0.5).unwrap();
        let s = diag(SequenceModel::constant_tail(vec![], 2.0).unwrap());
        let chk = check_sufficient(&s, &c, 5, T).unwrap();
        assert!(chk.pass);
        assert!(chk.effective_horizon >= 30);
    }

    #[test]
    fn sufficient_implies_necessary() {
        let pairs = [
            (diag(gen(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 2.0 })), constant(1.5)),
            (diag(gen(vec![3.0], NamedGenerator::HarmonicGap)), SequenceModel::constant_tail(vec![2.5], 0.5).unwrap()),
            (diag(constant(1.0)), constant(0.5)),
        ];
        for (s, c) in &pairs {
            if check_sufficient(s, c, 100, T).unwrap().pass {
                assert!(check_necessary(s, c, 100, T).unwrap().pass);
            }
        }
    }

    #[test]
    fn classify_table() {
        let identity: OperatorModel = diag(constant(1.0)).into();
        let c61 = gen(vec![], NamedGenerator::Example61 { p: 0.5, a: 0.2 });
        assert_eq!(classify(&identity, &c61, 100, T).unwrap().status, Status::Undetermined);

        let s62: OperatorModel = diag(gen(vec![], NamedGenerator::HarmonicGap)).into();
        let c62 = SequenceModel::constant_tail(vec![1.0], 0.5).unwrap();
        assert_eq!(classify(&s62, &c62, 200, T).unwrap().status, Status::Undetermined);

        let s66: OperatorModel = diag(gen(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 2.0 })).into();
        assert_eq!(classify(&s66, &constant(1.5), 200, T).unwrap().status, Status::Admissible);

        let v = classify(&identity, &constant(2.0), 10, T).unwrap();
        assert_eq!(v.status, Status::NotAdmissible);

        let two: OperatorModel = FiniteHermitian::scaled_identity(2, 2.0).unwrap().into();
        let ones = SequenceModel::finite(vec![1.0; 4]).unwrap();
        assert_eq!(classify(&two, &ones, 10, T).unwrap().status, Status::Admissible);
        assert_eq!(classify(&two, &constant(1.0), 10, T).unwrap().status, Status::NotAdmissible);
    }

    #[test]
    fn verdict_json_shape() {
        let s = FiniteHermitian::scaled_identity(2, 1.0).unwrap();
        let v = check_finite_finite(&s, &rv(&[2.0, 0.5]), T).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["status"], "not_admissible");
        let e = &j["evidence"][0];
        for key in ["condition", "family", "pass", "witness_k", "lhs", "rhs"] {
            assert!(e.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn tight_examples() {
        assert_eq!(tight_admissible(1.0, &constant(0.5), 100, T).unwrap().status, Status::Admissible);
        assert_eq!(tight_admissible(2.0, &constant(1.5), 100, T).unwrap().status, Status::Admissible);
        let ones = tight_admissible(1.0, &constant(1.0), 100, T).unwrap();
        assert!(!ones.evidence[0].pass);
        assert_eq!(ones.status, Status::Undetermined);
        // Agreement with classify on the pack example.
        let s: OperatorModel = diag(constant(2.0)).into();
        assert_eq!(classify(&s, &constant(1.5), 100, T).unwrap().status, Status::Admissible);
        let with_j = SequenceModel::constant_tail(vec![1.0, 1.0], 0.25).unwrap();
        assert_eq!(tight_admissible(1.0, &with_j, 100, T).unwrap().status, Status::Admissible);
    }

    #[test]
    fn forced_infinite_excess() {
        let identity = diag(constant(1.0));
        let half = SequenceModel::with_generator(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 0.5 }).unwrap();
        assert!(excess_forced_infinite(&identity, &half, T));
        let a63 = gen(vec![], NamedGenerator::Alternating { v1: 0.5, v2: 1.0 });
        assert!(!excess_forced_infinite(&diag(a63.clone()), &a63, T));
        let s66 = diag(gen(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 2.0 }));
        assert!(!excess_forced_infinite(&s66, &constant(1.5), T));
    }
}
