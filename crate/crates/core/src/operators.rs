//! Positive operator models and the operator functionals `U_k(S)`, `L_k(S)`.
//!
//! Two representations are supported: dense real symmetric matrices
//! ([`FiniteHermitian`]) and diagonal operators on an infinite orthonormal
//! basis ([`DiagonalOperator`]) whose diagonal is a [`SequenceModel`]. For a
//! diagonal operator the essential spectrum extremes are the limsup and
//! liminf of the diagonal and `S⁺` is the diagonal operator of
//! `max(a_i − limsup a, 0)`, so every operator functional reduces to the
//! corresponding sequence functional.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{k_family, Evidence};
use crate::sequences::{self, bottom_k_sum, top_k_sum, Evaluated, Hits, RealVec, SequenceModel, Tail};
use crate::tol;

/// Absolute tolerance, after scaling by `1 + |α⁺|`, within which a diagonal
/// entry counts as lying in `[α⁺, ‖S‖]`.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Relative tolerance for eigendecomposition reconstruction checks.
const EIGEN_TOL: f64 = 1e-9;

/// A real symmetric matrix with its eigendecomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteHermitian {
    matrix: DMatrix<f64>,
    /// Non-increasing.
    eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    eigenvectors: DMatrix<f64>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

impl FiniteHermitian {
    /// Validates symmetry at [`tol::DEFAULT_TOL`] and diagonalizes.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tol(matrix, tol::DEFAULT_TOL)
    }

    pub fn with_tol(matrix: DMatrix<f64>, tol_: f64) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        let asym = max_abs(&(&matrix - matrix.transpose()));
        if asym > tol_ * (1.0 + max_abs(&matrix)) {
            return Err(Error::InvalidInput(format!("matrix is not symmetric (residual {asym:e})")));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || sym[(i, j)] == 0.0));
        let (eigenvalues, eigenvectors) = if is_diagonal {
            let d: Vec<f64> = (0..n).map(|i| sym[(i, i)]).collect();
            let order = sequences::desc_order(&d);
            let mut q = DMatrix::zeros(n, n);
            for (col, &i) in order.iter().enumerate() {
                q[(i, col)] = 1.0;
            }
            (order.iter().map(|&i| d[i]).collect(), q)
        } else {
            let eig = SymmetricEigen::new(sym.clone());
            let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let order = sequences::desc_order(&vals);
            let mut q = DMatrix::zeros(n, n);
            for (col, &i) in order.iter().enumerate() {
                q.set_column(col, &eig.eigenvectors.column(i));
            }
            (order.iter().map(|&i| vals[i]).collect(), q)
        };
        let out = FiniteHermitian { matrix: sym, eigenvalues, eigenvectors };
        out.check_decomposition()?;
        Ok(out)
    }

    /// `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let v = RealVec::new(values.to_vec())?;
        Self::new(DMatrix::from_diagonal(&DVector::from_vec(v.into_vec())))
    }

    /// `κ·I_n`.
    pub fn scaled_identity(n: usize, kappa: f64) -> Result<Self> {
        Self::diagonal(&vec![kappa; n])
    }

    /// Row-major construction from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    fn check_decomposition(&self) -> Result<()> {
        let n = self.dim();
        let q = &self.eigenvectors;
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        let recon = max_abs(&(q * lambda * q.transpose() - &self.matrix));
        let norm = self.operator_norm();
        let orth = max_abs(&(q.transpose() * q - DMatrix::identity(n, n)));
        if recon > EIGEN_TOL * (1.0 + norm) || orth > EIGEN_TOL * n as f64 {
            return Err(Error::NumericalFailure(format!(
                "eigendecomposition residual {recon:e}, orthogonality residual {orth:e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn operator_norm(&self) -> f64 {
        let first = self.eigenvalues[0].abs();
        let last = self.eigenvalues[self.dim() - 1].abs();
        first.max(last)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn is_positive_definite(&self, tol_: f64) -> bool {
        self.min_eigenvalue() > tol_ * (1.0 + self.operator_norm())
    }

    /// Requires `λ_min > tol·(1 + ‖S‖)`.
    pub fn require_positive_definite(&self, tol_: f64) -> Result<()> {
        if self.is_positive_definite(tol_) {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite { min: self.min_eigenvalue() })
        }
    }

    /// The rows-of-rows form of the matrix.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.matrix.row(i).iter().copied().collect()).collect()
    }
}

/// Descending eigenvalues of `S`.
pub fn eigenvalues_desc(s: &FiniteHermitian) -> RealVec {
    RealVec::new(s.eigenvalues.clone()).expect("non-empty finite spectrum")
}

/// The diagonal operator `M_a e_i = a_i e_i` on an infinite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    diag: SequenceModel,
}

impl DiagonalOperator {
    pub fn new(diag: SequenceModel) -> Result<Self> {
        if diag.is_finite() {
            return Err(Error::InvalidInput("a diagonal operator needs an infinite diagonal; use a matrix for finite dimension".into()));
        }
        Ok(DiagonalOperator { diag })
    }

    pub fn diag(&self) -> &SequenceModel {
        &self.diag
    }

    /// Certified lower bound for the diagonal infimum.
    pub fn lower_bound(&self) -> f64 {
        match self.diag.inf(sequences::DEFAULT_ACCURACY) {
            Ok(e) => e.value - e.error,
            Err(_) => self.diag.floor(),
        }
    }

    /// Positivity with a bounded inverse: the diagonal stays above `tol`.
    pub fn is_positive_definite(&self, tol_: f64) -> bool {
        self.lower_bound() > tol_
    }

    pub fn require_positive_definite(&self, tol_: f64) -> Result<()> {
        if self.is_positive_definite(tol_) {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite { min: self.lower_bound() })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorModel {
    Finite(FiniteHermitian),
    Diagonal(DiagonalOperator),
}

impl From<FiniteHermitian> for OperatorModel {
    fn from(s: FiniteHermitian) -> Self {
        OperatorModel::Finite(s)
    }
}

impl From<DiagonalOperator> for OperatorModel {
    fn from(s: DiagonalOperator) -> Self {
        OperatorModel::Diagonal(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for Rank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rank::Finite(r) => write!(f, "{r}"),
            Rank::Infinite => write!(f, "infinite"),
        }
    }
}

/// Essential bounds, compact spectral parts and the rank of the top spectral projection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub finite_dimensional: bool,
    /// `α⁺(S) = max σₑ(S)`; unset in finite dimension.
    pub alpha_plus: Option<f64>,
    /// `α₋(S) = min σₑ(S)`; unset in finite dimension.
    pub alpha_minus: Option<f64>,
    pub operator_norm: f64,
    /// Rank of the spectral projection onto `[α⁺, ‖S‖]`.
    pub p2_rank: Option<Rank>,
    /// Positive eigenvalues of `S⁺`, non-increasing.
    pub splus_eigs: Vec<f64>,
    /// Bound on the trace of the part of `S⁺` not listed.
    pub splus_residual: f64,
    /// Negative eigenvalues of `S₋`, non-decreasing; `None` when the deviations
    /// below the liminf are not summable.
    pub sminus_eigs: Option<Vec<f64>>,
    pub sminus_residual: Option<f64>,
}

/// Spectral data of `S`. For finite matrices the essential quantities are left unset.
pub fn spectral_summary(s: &OperatorModel, accuracy: f64) -> Result<SpectralSummary> {
    match s {
        OperatorModel::Finite(m) => Ok(SpectralSummary {
            finite_dimensional: true,
            alpha_plus: None,
            alpha_minus: None,
            operator_norm: m.operator_norm(),
            p2_rank: None,
            splus_eigs: Vec::new(),
            splus_residual: 0.0,
            sminus_eigs: None,
            sminus_residual: None,
        }),
        OperatorModel::Diagonal(d) => {
            let a = &d.diag;
            let alpha_plus = a.limsup().expect("infinite diagonal");
            let alpha_minus = a.liminf().expect("infinite diagonal");
            let up = a.upper_deviations(accuracy)?;
            let down = a.lower_deviations(accuracy).ok();
            let sup = alpha_plus + up.entries.first().map_or(0.0, |e| e.1);
            let inf = match &down {
                Some(scan) => alpha_minus - scan.entries.first().map_or(0.0, |e| e.1),
                None => a.floor(),
            };
            Ok(SpectralSummary {
                finite_dimensional: false,
                alpha_plus: Some(alpha_plus),
                alpha_minus: Some(alpha_minus),
                operator_norm: sup.abs().max(inf.abs()) + up.residual,
                p2_rank: Some(p2_rank(a, alpha_plus)?),
                splus_eigs: up.entries.iter().map(|e| e.1).collect(),
                splus_residual: up.residual,
                sminus_eigs: down.as_ref().map(|s| s.entries.iter().map(|e| -e.1).collect()),
                sminus_residual: down.as_ref().map(|s| s.residual),
            })
        }
    }
}

/// Number of diagonal entries in `[α⁺ − boundary, ∞)`.
fn p2_rank(a: &SequenceModel, alpha_plus: f64) -> Result<Rank> {
    let threshold = alpha_plus - BOUNDARY_TOL * (1.0 + alpha_plus.abs());
    let head_count = a.head().iter().filter(|v| **v >= threshold).count();
    match a.tail() {
        Tail::None => Ok(Rank::Finite(head_count)),
        Tail::Constant(_) => Ok(Rank::Infinite),
        Tail::Generator(_) => match a.limsup_hits() {
            Hits::Infinite => Ok(Rank::Infinite),
            Hits::None => Ok(Rank::Finite(head_count)),
            Hits::Unknown => Err(Error::HorizonExceeded {
                what: "rank of the top spectral projection (limsup attainment undeclared)".into(),
                limit: sequences::MAX_SCAN,
            }),
        },
    }
}

/// `U_k(S) = sup tr(SP)` over rank-`k` projections.
pub fn u_k_op(s: &OperatorModel, k: usize) -> Result<Evaluated> {
    match s {
        OperatorModel::Finite(m) => Ok(Evaluated::exact(top_k_sum(&m.eigenvalues, k)?)),
        OperatorModel::Diagonal(d) => sequences::u_k_seq(&d.diag, k),
    }
}

/// `L_k(S) = inf tr(SP)` over rank-`k` projections.
pub fn l_k_op(s: &OperatorModel, k: usize) -> Result<Evaluated> {
    match s {
        OperatorModel::Finite(m) => Ok(Evaluated::exact(bottom_k_sum(&m.eigenvalues, k)?)),
        OperatorModel::Diagonal(d) => sequences::l_k_seq(&d.diag, k),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Finite(usize),
    Infinite,
}

/// `S ⊕ 0_d`. The infinite extension is the diagonal operator of the
/// eigenvalues of `S` followed by zeros.
pub fn embed_extended(s: &FiniteHermitian, d: Extension) -> OperatorModel {
    match d {
        Extension::Finite(d) => {
            let n = s.dim();
            let mut m = DMatrix::zeros(n + d, n + d);
            m.view_mut((0, 0), (n, n)).copy_from(&s.matrix);
            let eigenvalues = s.eigenvalues.iter().copied().chain(std::iter::repeat_n(0.0, d)).collect::<Vec<_>>();
            let order = sequences::desc_order(&eigenvalues);
            let mut big_q = DMatrix::zeros(n + d, n + d);
            big_q.view_mut((0, 0), (n, n)).copy_from(&s.eigenvectors);
            for j in 0..d {
                big_q[(n + j, n + j)] = 1.0;
            }
            let mut q = DMatrix::zeros(n + d, n + d);
            for (col, &i) in order.iter().enumerate() {
                q.set_column(col, &big_q.column(i));
            }
            OperatorModel::Finite(FiniteHermitian {
                matrix: m,
                eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
                eigenvectors: q,
            })
        }
        Extension::Infinite => {
            let diag = SequenceModel::constant_tail(s.eigenvalues.clone(), 0.0).expect("finite eigenvalues");
            OperatorModel::Diagonal(DiagonalOperator { diag })
        }
    }
}

/// Outcome of the closure membership test with per-condition evidence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub evidence: Vec<Evidence>,
}

const CLOSURE_TAG: &str = "orbit-closure-diagonal";

/// Whether `c` lies in the closure of the diagonals of the unitary orbit of `S`:
/// `U_k(S) ≥ U_k(c)` and `L_k(S) ≤ L_k(c)` for `k = 1..=horizon`, plus
/// `limsup c ≤ α⁺(S)` and `liminf c ≥ α₋(S)`.
///
/// A finite `S` with a finite `c` of the same length reduces to `c ≺ eig(S)`;
/// a finite `S` with an infinite `c` is first embedded as `S ⊕ 0`.
pub fn closure_membership(s: &OperatorModel, c: &SequenceModel, horizon: usize, tol_: f64) -> Result<Membership> {
    match (s, c.len()) {
        (OperatorModel::Finite(m), Some(len)) => {
            if len != m.dim() {
                return Err(Error::DimensionMismatch { expected: m.dim(), found: len });
            }
            let chk = sequences::majorization_check(&m.eigenvalues, c.head(), tol_)?;
            Ok(Membership { member: chk.holds, evidence: chk.evidence(CLOSURE_TAG, tol_) })
        }
        (OperatorModel::Finite(m), None) => closure_membership(&embed_extended(m, Extension::Infinite), c, horizon, tol_),
        (OperatorModel::Diagonal(_), Some(_)) => {
            Err(Error::InvalidInput("an infinite-dimensional operator needs an infinite sequence".into()))
        }
        (OperatorModel::Diagonal(d), None) => {
            let upper = k_family(
                "upper-functional",
                CLOSURE_TAG,
                1..=horizon,
                |k| {
                    let us = u_k_op(s, k)?;
                    let uc = sequences::u_k_seq(c, k)?;
                    Ok((us.value + us.error, uc.value - uc.error))
                },
                |l, r| tol::ge(l, r, tol_),
            )?;
            let lower = k_family(
                "lower-functional",
                CLOSURE_TAG,
                1..=horizon,
                |k| {
                    let ls = l_k_op(s, k)?;
                    let lc = sequences::l_k_seq(c, k)?;
                    Ok((lc.value + lc.error, ls.value - ls.error))
                },
                |l, r| tol::ge(l, r, tol_),
            )?;
            let (ap, am) = (d.diag.limsup().expect("infinite"), d.diag.liminf().expect("infinite"));
            let (cs, ci) = (c.limsup().expect("infinite"), c.liminf().expect("infinite"));
            let evidence = vec![
                upper,
                lower,
                Evidence::new("limsup-bound", CLOSURE_TAG, tol::le(cs, ap, tol_), None, cs, ap),
                Evidence::new("liminf-bound", CLOSURE_TAG, tol::ge(ci, am, tol_), None, ci, am),
            ];
            Ok(Membership { member: evidence.iter().all(|e| e.pass), evidence })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::NamedGenerator;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        g.qr().q()
    }

    fn diag_op(head: Vec<f64>, rule: NamedGenerator) -> OperatorModel {
        DiagonalOperator::new(SequenceModel::with_generator(head, rule).unwrap()).unwrap().into()
    }

    #[test]
    fn eigenvalues_examples() {
        assert_eq!(eigenvalues_desc(&FiniteHermitian::diagonal(&[1.0, 2.0]).unwrap()).as_slice(), &[2.0, 1.0]);
        let s = FiniteHermitian::scaled_identity(2, 4.0 / 2.0).unwrap();
        assert_eq!(eigenvalues_desc(&s).as_slice(), &[2.0, 2.0]);
    }

    #[test]
    fn planted_spectrum_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let planted = [4.0, 2.5, 1.0, -0.5, -3.0];
            let q = random_orthogonal(5, &mut rng);
            let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(&planted)) * q.transpose();
            let s = FiniteHermitian::new((&m + m.transpose()) * 0.5).unwrap();
            for (a, b) in s.eigenvalues().iter().zip(planted) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_and_non_square() {
        assert!(FiniteHermitian::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).is_err());
        assert!(matches!(FiniteHermitian::from_rows(&[vec![1.0, 2.0]]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn harmonic_gap_summary() {
        let s = diag_op(vec![], NamedGenerator::HarmonicGap);
        let sum = spectral_summary(&s, 1e-12).unwrap();
        assert_eq!(sum.alpha_plus, Some(1.0));
        assert!(sum.splus_eigs.is_empty());
        assert_eq!(sum.p2_rank, Some(Rank::Finite(0)));
        for k in 1..=50 {
            assert_eq!(u_k_op(&s, k).unwrap(), Evaluated::exact(k as f64));
        }
    }

    #[test]
    fn alternating_summary() {
        let s = diag_op(vec![], NamedGenerator::Alternating { v1: 0.5, v2: 1.0 });
        let sum = spectral_summary(&s, 1e-12).unwrap();
        assert_eq!((sum.alpha_plus, sum.alpha_minus), (Some(1.0), Some(0.5)));
        assert_eq!(sum.p2_rank, Some(Rank::Infinite));
        assert_eq!(sum.operator_norm, 1.0);
    }

    #[test]
    fn constant_diagonal_summary() {
        let s: OperatorModel = DiagonalOperator::new(SequenceModel::constant_tail(vec![], 0.7).unwrap()).unwrap().into();
        let sum = spectral_summary(&s, 1e-12).unwrap();
        assert_eq!((sum.alpha_plus, sum.alpha_minus), (Some(0.7), Some(0.7)));
        assert!(sum.splus_eigs.is_empty());
        assert_eq!(sum.sminus_eigs, Some(vec![]));
        assert_eq!(sum.p2_rank, Some(Rank::Infinite));
    }

    #[test]
    fn finite_summary_leaves_essential_fields_unset() {
        let s: OperatorModel = FiniteHermitian::diagonal(&[3.0, 1.0]).unwrap().into();
        let sum = spectral_summary(&s, 1e-12).unwrap();
        assert!(sum.finite_dimensional);
        assert_eq!(sum.alpha_plus, None);
        assert_eq!(sum.p2_rank, None);
        assert_eq!(sum.operator_norm, 3.0);
    }

    #[test]
    fn functional_examples() {
        let s: OperatorModel = FiniteHermitian::diagonal(&[2.0, 2.0, 2.0]).unwrap().into();
        assert_eq!(u_k_op(&s, 2).unwrap().value, 4.0);
        assert!(matches!(u_k_op(&s, 4), Err(Error::KMismatch { .. })));
        let alt = diag_op(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 2.0 });
        let trunc = match &alt {
            OperatorModel::Diagonal(d) => d.diag().truncate(100),
            _ => unreachable!(),
        };
        for k in 1..=20 {
            assert_eq!(u_k_op(&alt, k).unwrap().value, 2.0 * k as f64);
            assert_eq!(l_k_op(&alt, k).unwrap().value, k as f64);
            assert_eq!(top_k_sum(&trunc, k).unwrap(), 2.0 * k as f64);
            assert_eq!(bottom_k_sum(&trunc, k).unwrap(), k as f64);
        }
    }

    #[test]
    fn embedding() {
        let s = FiniteHermitian::diagonal(&[1.0]).unwrap();
        match embed_extended(&s, Extension::Finite(1)) {
            OperatorModel::Finite(m) => assert_eq!(m.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 0.0]]),
            _ => panic!(),
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_orthogonal(4, &mut rng);
        let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(&[3.0, 2.0, 1.0, 0.5])) * q.transpose();
        let s = FiniteHermitian::new((&m + m.transpose()) * 0.5).unwrap();
        let inf = embed_extended(&s, Extension::Infinite);
        match &inf {
            OperatorModel::Diagonal(d) => {
                let t = d.diag().truncate(6);
                for (a, b) in t.iter().zip([3.0, 2.0, 1.0, 0.5, 0.0, 0.0]) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
            _ => panic!(),
        }
        let fin: OperatorModel = s.into();
        for k in 1..=4 {
            assert!((u_k_op(&inf, k).unwrap().value - u_k_op(&fin, k).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn closure_membership_examples() {
        let t = tol::DEFAULT_TOL;
        let identity: OperatorModel = DiagonalOperator::new(SequenceModel::constant_tail(vec![], 1.0).unwrap()).unwrap().into();
        let twos = SequenceModel::constant_tail(vec![], 2.0).unwrap();
        let m = closure_membership(&identity, &twos, 50, t).unwrap();
        assert!(!m.member);
        assert_eq!(m.evidence[0].witness_k, Some(1));
        assert!(!m.evidence[0].pass);

        let alt = diag_op(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 2.0 });
        let own = match &alt {
            OperatorModel::Diagonal(d) => d.diag().clone(),
            _ => unreachable!(),
        };
        assert!(closure_membership(&alt, &own, 100, t).unwrap().member);

        let c61 = SequenceModel::with_generator(vec![], NamedGenerator::Example61 { p: 0.5, a: 0.2 }).unwrap();
        // I itself fails on the L_k side (L_1(I) = 1 > 0 = L_1(c)); its extension I ⊕ 0 contains c.
        let r = closure_membership(&identity, &c61, 100, t).unwrap();
        assert!(!r.member);
        assert_eq!(r.evidence[1].witness_k, Some(1));
        let extended = diag_op(vec![], NamedGenerator::Alternating { v1: 1.0, v2: 0.0 });
        assert!(closure_membership(&extended, &c61, 100, t).unwrap().member);

        let finite: OperatorModel = FiniteHermitian::diagonal(&[2.0, 2.0, 2.0, 0.0]).unwrap().into();
        let c = SequenceModel::finite(vec![1.5; 4]).unwrap();
        assert!(closure_membership(&finite, &c, 10, t).unwrap().member);
    }

    #[test]
    fn sequence_and_operator_functionals_agree() {
        let models = [
            diag_op(vec![3.0, 0.2], NamedGenerator::Geometric { g: 1.0, rho: 0.5 }),
            diag_op(vec![], NamedGenerator::Alternating { v1: 0.5, v2: 1.0 }),
            diag_op(vec![2.0, 1.5], NamedGenerator::Example61 { p: 0.5, a: 0.2 }),
        ];
        for s in &models {
            let OperatorModel::Diagonal(d) = s else { unreachable!() };
            for k in 1..=50 {
                let a = u_k_op(s, k).unwrap();
                let b = sequences::u_k_seq(d.diag(), k).unwrap();
                assert!((a.value - b.value).abs() <= a.error + b.error + 1e-12);
            }
        }
    }

    #[test]
    fn u_k_over_k_tends_to_alpha_plus_for_constant_tails() {
        let s: OperatorModel = DiagonalOperator::new(SequenceModel::constant_tail(vec![2.05, 2.02, 1.0], 2.0).unwrap()).unwrap().into();
        let u = u_k_op(&s, 1000).unwrap().value / 1000.0;
        assert!((u - 2.0).abs() < 1e-4);
        // A heavier head converges at rate Σ(a⁺)/k.
        let heavy: OperatorModel = DiagonalOperator::new(SequenceModel::constant_tail(vec![5.0, 3.0, 2.5], 2.0).unwrap()).unwrap().into();
        let u = u_k_op(&heavy, 1000).unwrap().value / 1000.0;
        assert!((u - 2.0 - 4.5 / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn random_projection_oracle_is_a_lower_bound_that_gets_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            let q = random_orthogonal(n, &mut rng);
            let planted: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let m = &q * DMatrix::from_diagonal(&DVector::from_vec(planted)) * q.transpose();
            let s = FiniteHermitian::new((&m + m.transpose()) * 0.5).unwrap();
            let op: OperatorModel = s.clone().into();
            for k in 1..=n {
                let exact = u_k_op(&op, k).unwrap().value;
                let mut best = f64::NEG_INFINITY;
                for _ in 0..200 {
                    let w = random_orthogonal(n, &mut rng);
                    let p = w.columns(0, k);
                    best = best.max((p.transpose() * s.matrix() * p).trace());
                }
                // The eigenvector projection attains the sup.
                let v = s.eigenvectors().columns(0, k);
                let attained = (v.transpose() * s.matrix() * v).trace();
                assert!(best <= exact + 1e-9);
                assert!((attained - exact).abs() < 1e-6);
            }
        }
    }

    fn small_sym(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| {
            let m = DMatrix::from_vec(n, n, v);
            (&m + m.transpose()) * 0.5
        })
    }

    proptest! {
        #[test]
        fn unitary_invariance(m in small_sym(4), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_orthogonal(4, &mut rng);
            let a = FiniteHermitian::new(m.clone()).unwrap();
            let conj = q.transpose() * &m * &q;
            let b = FiniteHermitian::new((&conj + conj.transpose()) * 0.5).unwrap();
            let (a, b): (OperatorModel, OperatorModel) = (a.into(), b.into());
            let norm = match &a { OperatorModel::Finite(f) => f.operator_norm(), _ => unreachable!() };
            for k in 1..=4 {
                let (x, y) = (u_k_op(&a, k).unwrap().value, u_k_op(&b, k).unwrap().value);
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + norm));
            }
        }

        #[test]
        fn convexity(m1 in small_sym(4), m2 in small_sym(4)) {
            let a: OperatorModel = FiniteHermitian::new(m1.clone()).unwrap().into();
            let b: OperatorModel = FiniteHermitian::new(m2.clone()).unwrap().into();
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let mix: OperatorModel = FiniteHermitian::new(&m1 * t + &m2 * (1.0 - t)).unwrap().into();
                for k in 1..=4 {
                    let lhs = u_k_op(&mix, k).unwrap().value;
                    let rhs = t * u_k_op(&a, k).unwrap().value + (1.0 - t) * u_k_op(&b, k).unwrap().value;
                    prop_assert!(lhs <= rhs + 1e-9);
                }
            }
        }
    }
}
