//! Frame construction.
//!
//! * [`synthesize_finite`]: for `S = QΛQᵀ` and `c ≺ (λ, 0, …, 0)`, an orthogonal
//!   `V` with `diag(Vᵀ M_λ V) = c` gives the synthesis matrix
//!   `T = Q · diag(√λ) · V[0..n, :]`, so `TTᵀ = S` and `‖T e_k‖² = c_k`.
//! * [`synthesize_truncated_summable`]: a summable `c` is cut at `N` and the
//!   tail mass is carried by the last vector.
//! * [`head_decompose`] and [`greedy_extend`]: for a diagonal `S` satisfying
//!   the sufficient conditions, a finite block `S₁ ≤ S` is split off and
//!   realized by the first `n₀` norms; the construction is then repeated on
//!   the residual `S − S₁` with the remaining norms.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::admissibility::{self, Status};
use crate::error::{Error, Result};
use crate::frames::{self, Frame, VerificationReport};
use crate::operators::{DiagonalOperator, FiniteHermitian, Rank, BOUNDARY_TOL};
use crate::schur_horn;
use crate::sequences::{self, RealVec, SequenceModel, TotalSum, MAX_SCAN};

/// Frame with `TTᵀ = Q diag(eigs) Qᵀ` and norms `c`, for `eigs ≥ 0` with
/// `c ≺ (eigs, 0, …, 0)`. The columns of `q` must be orthonormal.
pub fn synthesize_from_spectrum(eigs: &[f64], q: &DMatrix<f64>, c: &RealVec, tol_: f64) -> Result<Frame> {
    let (n, m) = (eigs.len(), c.len());
    if q.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.ncols() });
    }
    if m < n {
        return Err(Error::NotAdmissible { condition: format!("frame-count: {m} vectors cannot span dimension {n}") });
    }
    let mut b = eigs.to_vec();
    b.resize(m, 0.0);
    let v = schur_horn::construct_diagonal_unitary(&RealVec::new(b)?, c, tol_)?;
    let roots = DVector::from_iterator(n, eigs.iter().map(|x| x.max(0.0).sqrt()));
    let top = v.matrix().rows(0, n);
    let t = q * DMatrix::from_diagonal(&roots) * top;
    Frame::from_synthesis(&t)
}

/// An exact frame for an admissible finite pair, with excess `m − n`.
pub fn synthesize_finite(s: &FiniteHermitian, c: &RealVec, tol_: f64) -> Result<Frame> {
    let verdict = admissibility::check_finite_finite(s, c, tol_)?;
    if verdict.status != Status::Admissible {
        let f = verdict.first_failure().expect("non-admissible verdicts carry a failing condition");
        let at = f.witness_k.map(|k| format!(" at k = {k}")).unwrap_or_default();
        return Err(Error::NotAdmissible { condition: format!("{}{at}", f.condition) });
    }
    let frame = synthesize_from_spectrum(s.eigenvalues(), s.eigenvectors(), c, tol_)?;
    let report = frames::verify_pair(&frame, s, c, tol_.max(1e-12))?;
    if !report.pass {
        return Err(Error::NumericalFailure(format!(
            "synthesized frame deviates (operator {:e}, norms {:e})",
            report.operator_deviation, report.max_norm_deviation
        )));
    }
    Ok(frame)
}

/// Output of [`synthesize_truncated_summable`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedSynthesis {
    pub frame: Frame,
    /// `(c_1, …, c_{N−1}, Σ_{i≥N} c_i)`.
    pub norms: Vec<f64>,
    /// `Σ_{i≥N} c_i`, also the ℓ¹ distance between the norm profile and `c`
    /// up to the entries `c_N, c_{N+1}, …` it replaces.
    pub tail_mass: f64,
    pub report: VerificationReport,
}

/// `N` vectors with norms `(c_1, …, c_{N−1}, Σ_{i≥N} c_i)` and frame operator `S`.
pub fn synthesize_truncated_summable(s: &FiniteHermitian, c: &SequenceModel, n_cut: usize, tol_: f64) -> Result<TruncatedSynthesis> {
    let verdict = admissibility::check_finite_infinite(s, c, tol_)?;
    if verdict.status != Status::Admissible {
        let f = verdict.first_failure().expect("non-admissible verdicts carry a failing condition");
        return Err(Error::NotAdmissible { condition: f.condition.clone() });
    }
    if n_cut < s.dim() + 1 {
        return Err(Error::TruncationInadmissible { n: n_cut, hint: format!("N must be at least {}", s.dim() + 1) });
    }
    let tail_mass = match c.sum_from(n_cut - 1) {
        TotalSum::Finite(t) => t,
        _ => return Err(Error::NotSummable("the norm sequence has no finite total sum".into())),
    };
    let mut norms = c.truncate(n_cut - 1);
    norms.push(tail_mass.max(0.0));
    let cv = RealVec::new(norms.clone())?;
    let check = admissibility::check_finite_finite(s, &cv, tol_)?;
    if check.status != Status::Admissible {
        return Err(Error::TruncationInadmissible {
            n: n_cut,
            hint: "the absorbed tail breaks majorization; increase N".into(),
        });
    }
    let frame = synthesize_finite(s, &cv, tol_)?;
    let report = frames::verify_pair(&frame, s, &cv, tol_)?;
    Ok(TruncatedSynthesis { frame, norms, tail_mass, report })
}

/// A finite block `S₁ ≤ S` split off a diagonal operator together with unit
/// vectors realizing it from the first `n₀` norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeadDecomposition {
    pub case_id: u8,
    /// `ε` in case 1, `δ` in case 2.
    pub eps_or_delta: f64,
    /// Index past which `c_m ≤ α⁺ − ε` (resp. `α⁺ − δ`).
    pub m0: usize,
    /// `m₀` in case 1, `m₁ = max(m₀, r + 1)` in case 2.
    pub m_index: usize,
    /// Rank of the top spectral projection (`None` when infinite).
    pub r: Option<usize>,
    pub alpha_plus: f64,
    /// `λ_1 ≥ … ≥ λ_{m+1}`: the levels placed on the support coordinates.
    pub lambdas: Vec<f64>,
    pub n0: usize,
    pub h: f64,
    pub c0: Vec<f64>,
    /// Coordinates (0-based diagonal positions) of `y_1, …, y_{m+1}`.
    pub support: Vec<usize>,
    /// `x_1, …, x_{n₀}` in support coordinates.
    pub head_vectors: Vec<Vec<f64>>,
    /// Diagonal of `S − S₁`.
    #[serde(skip)]
    pub residual_diag: SequenceModel,
    /// Diagonal of `S` on the support, for invariant checks.
    pub support_diag: Vec<f64>,
}

/// Numerical status of the [`HeadDecomposition`] invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeadInvariants {
    /// `h − c_{n₀}` (should be ≤ 0).
    pub h_minus_c_n0: f64,
    /// `h − λ_{m+1}` (should be ≤ 0).
    pub h_minus_lambda_next: f64,
    pub c0_majorized: bool,
    /// `max |Σ c_i x_i x_iᵀ − S₁|` on the support block.
    pub rank_one_residual: f64,
    /// `|tr S₁ − Σ c0|`.
    pub trace_residual: f64,
    /// Smallest materialized entry of the residual diagonal.
    pub residual_min: f64,
    pub limsup_preserved: bool,
    /// `max |x_i| − 1` over the head vectors.
    pub unit_deviation: f64,
}

impl HeadInvariants {
    pub fn hold(&self, tol_: f64) -> bool {
        self.h_minus_c_n0 <= tol_
            && self.h_minus_lambda_next <= tol_
            && self.c0_majorized
            && self.rank_one_residual <= 1e-9
            && self.trace_residual <= 1e-9
            && self.residual_min >= -1e-10
            && self.limsup_preserved
            && self.unit_deviation <= 1e-9
    }
}

impl HeadDecomposition {
    /// `S₁ = Σ_{i≤m} λ_i y_i y_iᵀ + h y_{m+1} y_{m+1}ᵀ` on the support.
    pub fn block(&self) -> Vec<f64> {
        let m = self.m_index;
        let mut b = self.lambdas[..m].to_vec();
        b.push(self.h);
        b
    }

    /// `√c_i · x_i` in support coordinates.
    pub fn head_frame(&self) -> Result<Frame> {
        let vectors = self.head_vectors.iter().zip(&self.c0).map(|(x, ci)| x.iter().map(|v| v * ci.sqrt()).collect());
        Frame::new(self.support.len(), vectors.collect())
    }

    pub fn invariants(&self, tol_: f64) -> Result<HeadInvariants> {
        let block = self.block();
        let n = block.len();
        let c_n0 = *self.c0.last().expect("n0 ≥ 1");
        let mut majorant = block.clone();
        majorant.resize(self.n0, 0.0);
        let c0_majorized = sequences::majorization_check(&majorant, &self.c0, tol_)?.holds;
        let s1 = frames::frame_operator_matrix(&self.head_frame()?);
        let target = DMatrix::from_diagonal(&DVector::from_column_slice(&block));
        let rank_one_residual = (&s1 - &target).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let trace_residual = (s1.trace() - self.c0.iter().sum::<f64>()).abs();
        let residual_min = self.residual_diag.head().iter().copied().fold(f64::INFINITY, f64::min);
        let limsup_preserved = self.residual_diag.limsup() == Some(self.alpha_plus);
        let unit_deviation = self
            .head_vectors
            .iter()
            .map(|x| (x.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        debug_assert_eq!(n, self.m_index + 1);
        Ok(HeadInvariants {
            h_minus_c_n0: self.h - c_n0,
            h_minus_lambda_next: self.h - self.lambdas[self.m_index],
            c0_majorized,
            rank_one_residual,
            trace_residual,
            residual_min,
            limsup_preserved,
            unit_deviation,
        })
    }
}

fn describe_failure(evidence: &[crate::evidence::Evidence]) -> String {
    match evidence.iter().find(|e| !e.pass) {
        Some(e) => match e.witness_k {
            Some(k) => format!("{} at k = {k} ({} vs {})", e.condition, e.lhs, e.rhs),
            None => format!("{} ({} vs {})", e.condition, e.lhs, e.rhs),
        },
        None => "unknown".into(),
    }
}

/// Smallest `m ≥ 1` (1-based) such that `c_i ≤ level` for all `i ≥ m`.
fn last_exceedance(c: &SequenceModel, level: f64) -> Result<usize> {
    let ls = c.limsup().expect("infinite sequence");
    let scan = c.upper_deviations(sequences::DEFAULT_ACCURACY)?;
    if scan.residual > level - ls {
        return Err(Error::HorizonExceeded { what: "tail of the norm sequence".into(), limit: MAX_SCAN });
    }
    let last = scan.entries.iter().filter(|e| ls + e.1 > level).map(|e| e.0 + 1).max();
    Ok(last.map_or(1, |p| p + 1))
}

/// Positions of the top spectral part of `S`: entries above `α⁺` by decreasing
/// value, then entries at `α⁺` by position.
fn top_positions(a: &SequenceModel, alpha: f64, count: usize) -> Result<Vec<usize>> {
    let scan = a.upper_deviations(sequences::DEFAULT_ACCURACY)?;
    let boundary = BOUNDARY_TOL * (1.0 + alpha.abs());
    let mut pos: Vec<usize> = scan.entries.iter().filter(|e| e.1 > boundary).map(|e| e.0).take(count).collect();
    if pos.len() < count {
        let exclude = pos.clone();
        let more = a.find_positions(count - pos.len(), &exclude, |v| v >= alpha - boundary)?;
        pos.extend(more);
    }
    Ok(pos)
}

/// Splits off the finite block used by the sufficiency argument.
///
/// Case 1 (`tr P₂ = ∞`): `ε = (α⁺ − limsup c)/2`, `m₀` is the first index past
/// which `c ≤ α⁺ − ε`, `λ` are the top diagonal entries, `n₀` is the first
/// index with `Σ_{i≤n₀} c_i > Σ_{i≤m₀} λ_i`, and `h` is the excess, placed on
/// `y_{m₀+1}`.
///
/// Case 2 (`tr P₂ = r < ∞`): `δ` is half the smaller of `min_{k>r}(U_k(S) − U_k(c))`
/// and `α⁺ − limsup c`; `m₁ = max(m₀, r + 1)`; `λ_i` are the `r` top entries
/// followed by the level `α⁺ − δ/(2m₁)` on entries strictly between that level
/// and `α⁺`; `h` is placed on `y_{m₁+1}`.
pub fn head_decompose(s: &DiagonalOperator, c: &SequenceModel, horizon: usize, tol_: f64) -> Result<HeadDecomposition> {
    let suff = admissibility::check_sufficient(s, c, horizon, tol_)?;
    if !suff.pass {
        return Err(Error::SufficiencyFailed { condition: describe_failure(&suff.evidence) });
    }
    let a = s.diag();
    let alpha = a.limsup().expect("infinite diagonal");
    let ls = c.limsup().expect("infinite sequence");
    let boundary = BOUNDARY_TOL * (1.0 + alpha.abs());

    let (case_id, eps_or_delta, m0, m, r, support, lambdas) = match suff.p2_rank {
        Rank::Infinite => {
            let eps = (alpha - ls) / 2.0;
            let m0 = last_exceedance(c, alpha - eps)?;
            let support = top_positions(a, alpha, m0 + 1)?;
            let lambdas: Vec<f64> = support.iter().map(|&p| a.get(p).expect("infinite diagonal")).collect();
            (1u8, eps, m0, m0, None, support, lambdas)
        }
        Rank::Finite(r) => {
            let mut min_gap = alpha - ls;
            for k in r + 1..=suff.effective_horizon {
                let us = sequences::u_k_seq(a, k)?;
                let uc = sequences::u_k_seq(c, k)?;
                min_gap = min_gap.min((us.value - us.error) - (uc.value + uc.error));
            }
            let delta = min_gap / 2.0;
            let m0 = last_exceedance(c, alpha - delta)?;
            let m1 = m0.max(r + 1);
            let level = alpha - delta / (2.0 * m1 as f64);
            let mut support = top_positions(a, alpha, r)?;
            let surrogate = a.find_positions(m1 + 1 - r, &support, |v| v > level && v < alpha - boundary)?;
            support.extend(surrogate);
            let mut lambdas: Vec<f64> = support[..r].iter().map(|&p| a.get(p).expect("infinite diagonal")).collect();
            lambdas.extend(std::iter::repeat_n(level, m1 + 1 - r));
            (2u8, delta, m0, m1, Some(r), support, lambdas)
        }
    };

    let target: f64 = lambdas[..m].iter().sum();
    let mut acc = 0.0;
    let mut n0 = 0;
    while acc <= target {
        if n0 >= MAX_SCAN {
            return Err(Error::HorizonExceeded { what: "first index n0 with Σc > Σλ".into(), limit: MAX_SCAN });
        }
        acc += c.get(n0).expect("infinite sequence");
        n0 += 1;
    }
    if n0 < m + 1 {
        return Err(Error::NumericalFailure(format!("n0 = {n0} is smaller than the block dimension {}", m + 1)));
    }
    let h = acc - target;
    let c0 = c.truncate(n0);

    let mut block = lambdas[..m].to_vec();
    block.push(h);
    let identity = DMatrix::identity(m + 1, m + 1);
    let frame = synthesize_from_spectrum(&block, &identity, &RealVec::new(c0.clone())?, tol_)?;
    let head_vectors = frame
        .vectors()
        .iter()
        .zip(&c0)
        .map(|(f, ci)| {
            if *ci > 0.0 {
                f.iter().map(|v| v / ci.sqrt()).collect()
            } else {
                let mut e = vec![0.0; m + 1];
                e[0] = 1.0;
                e
            }
        })
        .collect();

    let max_pos = *support.iter().max().expect("non-empty support");
    let mut residual = a.materialize(max_pos + 1);
    let support_diag: Vec<f64> = support.iter().map(|&p| a.get(p).expect("infinite diagonal")).collect();
    for (j, &p) in support.iter().enumerate() {
        residual.set(p, support_diag[j] - block[j])?;
    }

    Ok(HeadDecomposition {
        case_id,
        eps_or_delta,
        m0,
        m_index: m,
        r,
        alpha_plus: alpha,
        lambdas,
        n0,
        h,
        c0,
        support,
        head_vectors,
        residual_diag: residual,
        support_diag,
    })
}

/// Result of [`greedy_extend`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyExtension {
    /// Vectors `f_1, …, f_n` with `‖f_i‖² = c_i`, in coordinates of the original diagonal basis.
    pub frame: Frame,
    /// Decomposition steps carried out, counting the initial one.
    pub steps_completed: usize,
    /// Reason the iteration stopped before the requested number of steps.
    pub stopped_early: Option<String>,
    /// Diagonal of `S − Σ f_i f_iᵀ` on the materialized coordinates.
    #[serde(skip)]
    pub residual: SequenceModel,
    /// Coordinates whose residual vanished.
    pub consumed_coordinates: Vec<usize>,
}

impl GreedyExtension {
    /// Number of norms realized so far.
    pub fn consumed_norms(&self) -> usize {
        self.frame.len()
    }
}

/// Entries of the residual at most this large (relative to `1 + α⁺`) are treated as exhausted.
const EXHAUSTED_TOL: f64 = 1e-12;

/// Repeats the head decomposition on the residual with the remaining norms.
///
/// `steps` counts decomposition rounds including `dec` itself (so `0` and `1`
/// both return just the head of `dec`). Before every round, exhausted
/// coordinates are dropped from the residual and sufficiency is re-checked on
/// the compressed operator; a failing check ends the iteration with a
/// `stopped_early` reason.
pub fn greedy_extend(dec: &HeadDecomposition, c: &SequenceModel, steps: usize, horizon: usize, tol_: f64) -> Result<GreedyExtension> {
    let rounds = steps.max(1);
    let alpha = dec.alpha_plus;
    let exhausted = EXHAUSTED_TOL * (1.0 + alpha.abs());
    let mut residual = dec.residual_diag.clone();
    let mut vectors: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    let mut push_round = |d: &HeadDecomposition, map: &dyn Fn(usize) -> usize| {
        let coords: Vec<usize> = d.support.iter().map(|&p| map(p)).collect();
        for (x, ci) in d.head_vectors.iter().zip(&d.c0) {
            vectors.push((coords.clone(), x.iter().map(|v| v * ci.sqrt()).collect()));
        }
        coords
    };
    push_round(dec, &|p| p);
    let mut consumed = dec.n0;
    let mut completed = 1;
    let mut stopped_early = None;

    while completed < rounds {
        // Compress: keep head positions with positive residual; the tail shifts uniformly.
        let kept: Vec<usize> = (0..residual.head().len()).filter(|&i| residual.head()[i] > exhausted).collect();
        let removed: Vec<usize> = (0..residual.head().len()).filter(|i| !kept.contains(i)).collect();
        let compressed = residual.without_head_positions(&removed);
        let head_len = residual.head().len();
        let kept_len = kept.len();
        let map = |p: usize| if p < kept_len { kept[p] } else { p - kept_len + head_len };
        let c_rest = c.drop_front(consumed);
        let op = match DiagonalOperator::new(compressed) {
            Ok(op) => op,
            Err(e) => {
                stopped_early = Some(e.to_string());
                break;
            }
        };
        let next = match head_decompose(&op, &c_rest, horizon, tol_) {
            Ok(d) => d,
            Err(e) => {
                stopped_early = Some(e.to_string());
                break;
            }
        };
        let coords = push_round(&next, &map);
        let far = *coords.iter().max().expect("non-empty support");
        residual = residual.materialize(far + 1);
        let block = next.block();
        for (j, &p) in coords.iter().enumerate() {
            let cur = residual.get(p).expect("materialized");
            residual.set(p, cur - block[j])?;
        }
        consumed += next.n0;
        completed += 1;
    }

    let dim = vectors.iter().flat_map(|(coords, _)| coords.iter()).max().map_or(1, |m| m + 1);
    let ambient: Vec<Vec<f64>> = vectors
        .iter()
        .map(|(coords, x)| {
            let mut v = vec![0.0; dim];
            for (p, val) in coords.iter().zip(x) {
                v[*p] = *val;
            }
            v
        })
        .collect();
    let consumed_coordinates = (0..residual.head().len()).filter(|&i| residual.head()[i] <= exhausted).collect();
    Ok(GreedyExtension { frame: Frame::new(dim, ambient)?, steps_completed: completed, stopped_early, residual, consumed_coordinates })
}

/// Deviation of `Σ f_i f_iᵀ` from `S − residual` over the frame's coordinates.
pub fn greedy_operator_deviation(ext: &GreedyExtension, s: &DiagonalOperator) -> f64 {
    let dim = ext.frame.dim();
    let op = frames::frame_operator_matrix(&ext.frame);
    let mut worst = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { s.diag().get(i).expect("infinite") - ext.residual.get(i).expect("infinite") } else { 0.0 };
            worst = worst.max((op[(i, j)] - target).abs());
        }
    }
    worst
}

/// Whether the frame operator stays below `S` on the diagonal within `tol`.
pub fn greedy_never_overshoots(ext: &GreedyExtension, s: &DiagonalOperator, tol_: f64) -> bool {
    let op = frames::frame_operator_matrix(&ext.frame);
    (0..ext.frame.dim()).all(|i| op[(i, i)] <= s.diag().get(i).expect("infinite") + tol_)
}

/// Sum of the realized norms equals the trace removed from `S`.
pub fn greedy_trace_balance(ext: &GreedyExtension, s: &DiagonalOperator) -> f64 {
    let removed: f64 = (0..ext.frame.dim()).map(|i| s.diag().get(i).expect("infinite") - ext.residual.get(i).expect("infinite")).sum();
    let norms: f64 = frames::norms_squared(&ext.frame).iter().sum();
    (removed - norms).abs()
}
