//! Finite frames: frame operator, bounds, excess and verification against a target pair.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::FiniteHermitian;
use crate::sequences::RealVec;
use crate::tol::DEFAULT_TOL;

/// An ordered family of `m` vectors in `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameFile", into = "FrameFile")]
pub struct Frame {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

/// JSON layout `{"dim": n, "vectors": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameFile {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl TryFrom<FrameFile> for Frame {
    type Error = Error;

    fn try_from(f: FrameFile) -> Result<Self> {
        Frame::new(f.dim, f.vectors)
    }
}

impl From<Frame> for FrameFile {
    fn from(f: Frame) -> Self {
        FrameFile { dim: f.dim, vectors: f.vectors }
    }
}

impl Frame {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("frame dimension must be positive".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidInput("a frame needs at least one vector".into()));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("frame vectors must be finite".into()));
            }
        }
        Ok(Frame { dim, vectors })
    }

    /// The columns of an `n×m` synthesis matrix.
    pub fn from_synthesis(t: &DMatrix<f64>) -> Result<Self> {
        Frame::new(t.nrows(), t.column_iter().map(|c| c.iter().copied().collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Appends the vectors of `other`; both must live in the same space.
    pub fn extend(&mut self, other: &Frame) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        self.vectors.extend(other.vectors.iter().cloned());
        Ok(())
    }

    /// The first `count` vectors.
    pub fn prefix(&self, count: usize) -> Result<Frame> {
        Frame::new(self.dim, self.vectors.iter().take(count).cloned().collect())
    }

    /// Re-embeds every vector into `ℝ^dim` (zero padding); `dim` must not shrink.
    pub fn padded(&self, dim: usize) -> Result<Frame> {
        if dim < self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: dim });
        }
        let vectors = self.vectors.iter().map(|v| {
            let mut w = v.clone();
            w.resize(dim, 0.0);
            w
        });
        Frame::new(dim, vectors.collect())
    }
}

/// `T` with `T e_k = f_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisMatrix(DMatrix<f64>);

impl SynthesisMatrix {
    pub fn of(f: &Frame) -> Self {
        SynthesisMatrix(DMatrix::from_fn(f.dim, f.len(), |i, k| f.vectors[k][i]))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `S = Σ f_k f_kᵀ = T Tᵀ`.
pub fn frame_operator(f: &Frame) -> Result<FiniteHermitian> {
    FiniteHermitian::new(frame_operator_matrix(f))
}

/// The symmetrized matrix `T Tᵀ` without diagonalizing it.
pub fn frame_operator_matrix(f: &Frame) -> DMatrix<f64> {
    let t = SynthesisMatrix::of(f).0;
    let s = &t * t.transpose();
    (&s + s.transpose()) * 0.5
}

/// Optimal bounds `A = λ_min(S)`, `B = λ_max(S)`, with `A` clamped at zero.
pub fn frame_bounds(f: &Frame) -> Result<FrameBounds> {
    let s = frame_operator(f)?;
    Ok(FrameBounds { lower: s.min_eigenvalue().max(0.0), upper: s.eigenvalues()[0].max(0.0) })
}

pub fn is_frame(f: &Frame, tol: f64) -> Result<bool> {
    Ok(frame_bounds(f)?.lower > tol)
}

pub fn is_tight(f: &Frame, tol: f64) -> Result<bool> {
    let b = frame_bounds(f)?;
    Ok(b.lower > tol && b.upper - b.lower <= tol * (1.0 + b.upper))
}

pub fn is_parseval(f: &Frame, tol: f64) -> Result<bool> {
    Ok(is_tight(f, tol)? && (frame_bounds(f)?.lower - 1.0).abs() <= tol)
}

/// Numerical rank of `T`: singular values above `tol·(1 + σ_max)`.
pub fn synthesis_rank(f: &Frame, tol: f64) -> usize {
    let sv = SynthesisMatrix::of(f).0.singular_values();
    let smax = sv.iter().fold(0.0_f64, |m, v| m.max(*v));
    sv.iter().filter(|s| **s > tol * (1.0 + smax)).count()
}

/// `e(F) = m − rank T`.
pub fn excess(f: &Frame, tol: f64) -> usize {
    f.len() - synthesis_rank(f, tol)
}

/// `‖f_k‖²` for each vector.
pub fn norms_squared(f: &Frame) -> RealVec {
    RealVec::new(f.vectors.iter().map(|v| v.iter().map(|x| x * x).sum()).collect()).expect("non-empty finite frame")
}

/// Deviations of a frame from a target `(S, c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max_k |‖f_k‖² − c_k|`.
    pub max_norm_deviation: f64,
    /// `‖S_F − S‖` in spectral norm.
    pub operator_deviation: f64,
    /// `‖S_F − S‖` in max-entry norm.
    pub operator_entry_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `S_F = S` within `tol·(1 + ‖S‖)` and `‖f_k‖² = c_k` within `tol·(1 + ‖c‖∞)`.
pub fn verify_pair(f: &Frame, s: &FiniteHermitian, c: &RealVec, tol: f64) -> Result<VerificationReport> {
    if c.len() != f.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: c.len() });
    }
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: s.dim() });
    }
    let norms = norms_squared(f);
    let max_norm_deviation = norms.iter().zip(c.iter()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let diff = frame_operator_matrix(f) - s.matrix();
    let operator_entry_deviation = diff.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let operator_deviation = diff.singular_values().iter().fold(0.0_f64, |m, v| m.max(*v));
    let pass = operator_deviation <= tol * (1.0 + s.operator_norm()) && max_norm_deviation <= tol * (1.0 + c.max_abs());
    Ok(VerificationReport { max_norm_deviation, operator_deviation, operator_entry_deviation, tol, pass })
}

/// [`verify_pair`] at the default tolerance.
pub fn verify_pair_default(f: &Frame, s: &FiniteHermitian, c: &RealVec) -> Result<VerificationReport> {
    verify_pair(f, s, c, DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e1e1e2() -> Frame {
        Frame::new(2, vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn onb(n: usize) -> Frame {
        Frame::new(n, (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()).unwrap()
    }

    /// Unit vectors at angles `πj/k`: a tight frame of `k` vectors in `ℝ²` with bound `k/2`.
    fn spherical(k: usize) -> Frame {
        let v = (0..k).map(|j| {
            let th = std::f64::consts::PI * j as f64 / k as f64;
            vec![th.cos(), th.sin()]
        });
        Frame::new(2, v.collect()).unwrap()
    }

    #[test]
    fn frame_operator_examples() {
        assert_eq!(frame_operator(&onb(2)).unwrap().to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(frame_operator(&e1e1e2()).unwrap().to_rows(), vec![vec![2.0, 0.0], vec![0.0, 1.0]]);
        let s = frame_operator(&spherical(5)).unwrap();
        for (i, row) in s.to_rows().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { 2.5 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let t = DEFAULT_TOL;
        let b = frame_bounds(&onb(3)).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        assert!(is_parseval(&onb(3), t).unwrap());
        let b = frame_bounds(&e1e1e2()).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 2.0));
        assert!(is_frame(&e1e1e2(), t).unwrap() && !is_tight(&e1e1e2(), t).unwrap());
        let single = Frame::new(2, vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(frame_bounds(&single).unwrap().lower, 0.0);
        assert!(!is_frame(&single, t).unwrap());
        assert!(is_tight(&spherical(7), t).unwrap());
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&onb(4), DEFAULT_TOL), 0);
        assert_eq!(excess(&e1e1e2(), DEFAULT_TOL), 1);
        assert_eq!(excess(&spherical(6), DEFAULT_TOL), 4);
    }

    #[test]
    fn verification_examples() {
        let t = DEFAULT_TOL;
        let r = verify_pair(&onb(2), &FiniteHermitian::scaled_identity(2, 1.0).unwrap(), &RealVec::new(vec![1.0; 2]).unwrap(), t).unwrap();
        assert!(r.pass && r.max_norm_deviation == 0.0 && r.operator_deviation == 0.0);
        let ones = RealVec::new(vec![1.0; 3]).unwrap();
        let r = verify_pair(&e1e1e2(), &FiniteHermitian::diagonal(&[2.0, 1.0]).unwrap(), &ones, t).unwrap();
        assert!(r.pass);
        let r = verify_pair(&e1e1e2(), &FiniteHermitian::scaled_identity(2, 1.0).unwrap(), &ones, t).unwrap();
        assert!(!r.pass);
        assert!((r.operator_deviation - 1.0).abs() < 1e-12);
        assert!(matches!(
            verify_pair(&e1e1e2(), &FiniteHermitian::diagonal(&[2.0, 1.0]).unwrap(), &RealVec::new(vec![1.0; 2]).unwrap(), t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = e1e1e2();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"dim":2,"vectors":[[1.0,0.0],[1.0,0.0],[0.0,1.0]]}"#);
        assert_eq!(serde_json::from_str::<Frame>(&s).unwrap(), f);
        assert!(serde_json::from_str::<Frame>(r#"{"dim":3,"vectors":[[1.0]]}"#).is_err());
    }

    fn frame_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = Frame> {
        (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), m).prop_map(move |v| Frame::new(n, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn frame_operator_is_psd(f in frame_strategy(6, 12)) {
            let s = frame_operator(&f).unwrap();
            prop_assert!(s.min_eigenvalue() >= -1e-12 * (1.0 + s.operator_norm()));
        }

        #[test]
        fn excess_plus_rank_is_count(f in frame_strategy(6, 12)) {
            prop_assert_eq!(excess(&f, DEFAULT_TOL) + synthesis_rank(&f, DEFAULT_TOL), f.len());
        }

        #[test]
        fn full_rank_excess(n in 1usize..=10, extra in 0usize..=20, seed in prop::collection::vec(-1.0f64..1.0, 300)) {
            let m = n + extra;
            let t = DMatrix::from_fn(n, m, |i, k| seed[(i * m + k) % seed.len()] + if i == k % n { 3.0 } else { 0.0 });
            let f = Frame::from_synthesis(&t).unwrap();
            prop_assume!(synthesis_rank(&f, DEFAULT_TOL) == n);
            prop_assert_eq!(excess(&f, DEFAULT_TOL), m - n);
        }

        #[test]
        fn parseval_vectors_are_contractions(n in 1usize..=5, extra in 0usize..=6, seed in prop::collection::vec(-1.0f64..1.0, 200)) {
            // Rows of an orthogonal m×m matrix restricted to n coordinates form a Parseval frame.
            let m = n + extra;
            let q = DMatrix::from_fn(m, m, |i, j| seed[(i * m + j) % seed.len()] + if i == j { 2.0 } else { 0.0 }).qr().q();
            let t = q.rows(0, n).into_owned();
            let f = Frame::from_synthesis(&t).unwrap();
            prop_assert!(is_parseval(&f, 1e-9).unwrap());
            prop_assert!(norms_squared(&f).iter().all(|v| *v <= 1.0 + 1e-12));
        }
    }
}
