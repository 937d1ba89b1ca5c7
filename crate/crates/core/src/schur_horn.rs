//! Constructive Schur-Horn: an orthogonal `U` with `diag(Uᵀ M_b U) = c` whenever `c ≺ b`.
//!
//! Targets are placed in non-increasing order. For the current target `γ`, if
//! an active coordinate already carries `γ` it is claimed; otherwise the active
//! coordinates `p`, `q` with values adjacent to `γ` (`d_p > γ > d_q`) are mixed
//! by a plane rotation so that coordinate `p` carries exactly `γ` and `q`
//! carries `d_p + d_q − γ`. Active columns stay pairwise `M_b`-orthogonal, so
//! each rotation only sees a diagonal 2×2 block. A final column permutation
//! puts the claimed coordinates in the order of `c`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{self, RealVec};

/// Tolerance within which an active coordinate counts as already carrying the target.
const MATCH_TOL: f64 = 1e-12;

/// A real orthogonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix(DMatrix<f64>);

impl OrthogonalMatrix {
    pub fn identity(n: usize) -> Self {
        OrthogonalMatrix(DMatrix::identity(n, n))
    }

    /// Accepts `q` when `‖QᵀQ − I‖∞ ≤ 10⁻¹⁰·n`.
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(Error::DimensionMismatch { expected: q.nrows(), found: q.ncols() });
        }
        let out = OrthogonalMatrix(q);
        let r = out.orthogonality_residual();
        if r > 1e-10 * out.dim() as f64 {
            return Err(Error::NumericalFailure(format!("orthogonality residual {r:e}")));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `max |QᵀQ − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dim();
        (self.0.transpose() * &self.0 - DMatrix::<f64>::identity(n, n)).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `diag(Qᵀ M_b Q)`.
    pub fn conjugated_diagonal(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| b[j] * self.0[(j, i)] * self.0[(j, i)]).sum()).collect()
    }
}

/// One two-coordinate mixing: columns `first` and `second` (0-based) are rotated
/// with `cos² θ = t`, after which coordinate `first` is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TStep {
    pub first: usize,
    pub second: usize,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformChain {
    pub steps: Vec<TStep>,
    /// `assignment[i]` is the coordinate whose final value is `c_i`.
    pub assignment: Vec<usize>,
}

/// The rotation chain turning `diag(b)` into a matrix with diagonal `c`.
pub fn t_transform_chain(b: &RealVec, c: &RealVec, tol: f64) -> Result<TransformChain> {
    let check = sequences::majorization_check(b, c, tol)?;
    if let Some(k) = check.first_violation {
        return Err(Error::NotMajorized { k });
    }
    let n = b.len();
    let scale = 1.0 + b.max_abs().max(c.max_abs());
    let mut d = b.to_vec();
    let mut active = vec![true; n];
    let mut assignment = vec![usize::MAX; n];
    let mut steps = Vec::new();
    for target_idx in sequences::desc_order(c) {
        let gamma = c[target_idx];
        let live = || (0..n).filter(|&j| active[j]);
        let claimed = live().find(|&j| (d[j] - gamma).abs() <= MATCH_TOL * scale);
        let p = live().filter(|&j| d[j] > gamma).min_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
        let q = live().filter(|&j| d[j] < gamma).max_by(|&i, &j| d[i].total_cmp(&d[j]).then(j.cmp(&i)));
        let chosen = match (claimed, p, q) {
            (Some(j), _, _) => j,
            (None, Some(p), Some(q)) => {
                let t = ((gamma - d[q]) / (d[p] - d[q])).clamp(0.0, 1.0);
                steps.push(TStep { first: p, second: q, t });
                d[q] = d[p] + d[q] - gamma;
                d[p] = gamma;
                p
            }
            // Rounding left the target marginally outside the active range; take the nearest.
            _ => live()
                .min_by(|&i, &j| (d[i] - gamma).abs().total_cmp(&(d[j] - gamma).abs()).then(i.cmp(&j)))
                .expect("one active coordinate per remaining target"),
        };
        active[chosen] = false;
        assignment[target_idx] = chosen;
    }
    Ok(TransformChain { steps, assignment })
}

/// Applies the chain's rotations to the identity, then permutes columns by the assignment.
pub fn replay(n: usize, chain: &TransformChain) -> DMatrix<f64> {
    let mut u = DMatrix::<f64>::identity(n, n);
    for s in &chain.steps {
        let (cs, sn) = (s.t.sqrt(), (1.0 - s.t).sqrt());
        for row in 0..n {
            let (a, b) = (u[(row, s.first)], u[(row, s.second)]);
            u[(row, s.first)] = cs * a + sn * b;
            u[(row, s.second)] = -sn * a + cs * b;
        }
    }
    DMatrix::from_fn(n, n, |row, i| u[(row, chain.assignment[i])])
}

/// An orthogonal `U` with `|diag(Uᵀ M_b U)_i − c_i| ≤ 10⁻⁹·(1 + ‖b‖∞)`.
pub fn construct_diagonal_unitary(b: &RealVec, c: &RealVec, tol: f64) -> Result<OrthogonalMatrix> {
    let chain = t_transform_chain(b, c, tol)?;
    let u = OrthogonalMatrix::new(replay(b.len(), &chain))?;
    let achieved = u.conjugated_diagonal(b);
    let residual = achieved.iter().zip(c.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    if residual > 1e-9 * (1.0 + b.max_abs()) {
        return Err(Error::NumericalFailure(format!("diagonal residual {residual:e}")));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(v: &[f64]) -> RealVec {
        RealVec::new(v.to_vec()).unwrap()
    }

    fn check_pair(b: &[f64], c: &[f64]) -> OrthogonalMatrix {
        let u = construct_diagonal_unitary(&rv(b), &rv(c), 1e-9).unwrap();
        for (x, y) in u.conjugated_diagonal(b).iter().zip(c) {
            assert!((x - y).abs() <= 1e-9 * (1.0 + rv(b).max_abs()));
        }
        u
    }

    #[test]
    fn pack_pair() {
        check_pair(&[2.0, 2.0, 2.0, 0.0], &[1.5; 4]);
    }

    #[test]
    fn equal_vectors_need_no_steps() {
        let chain = t_transform_chain(&rv(&[3.0, 1.0, 2.0]), &rv(&[3.0, 1.0, 2.0]), 1e-9).unwrap();
        assert!(chain.steps.is_empty());
        let u = check_pair(&[3.0, 1.0, 2.0], &[3.0, 1.0, 2.0]);
        assert_eq!(u.matrix(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn two_by_two_is_a_quarter_turn() {
        let chain = t_transform_chain(&rv(&[1.0, 0.0]), &rv(&[0.5, 0.5]), 1e-9).unwrap();
        assert_eq!(chain.steps, vec![TStep { first: 0, second: 1, t: 0.5 }]);
        let u = check_pair(&[1.0, 0.0], &[0.5, 0.5]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u.matrix()[(0, 0)].abs() - h).abs() < 1e-15);
        assert!((u.matrix()[(1, 0)].abs() - h).abs() < 1e-15);
    }

    #[test]
    fn three_step_chain_replays() {
        let chain = t_transform_chain(&rv(&[3.0, 2.0, 1.0]), &rv(&[2.0, 2.0, 2.0]), 1e-9).unwrap();
        assert!(chain.steps.len() <= 2);
        assert!(chain.steps.iter().all(|s| (0.0..=1.0).contains(&s.t)));
        let u = OrthogonalMatrix::new(replay(3, &chain)).unwrap();
        for v in u.conjugated_diagonal(&[3.0, 2.0, 1.0]) {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_majorized() {
        assert!(matches!(
            construct_diagonal_unitary(&rv(&[1.0, 0.0]), &rv(&[0.6, 0.6]), 1e-9),
            Err(Error::NotMajorized { k: 2 })
        ));
        assert!(matches!(
            construct_diagonal_unitary(&rv(&[1.0, 1.0]), &rv(&[2.0, 0.0]), 1e-9),
            Err(Error::NotMajorized { k: 1 })
        ));
        assert!(matches!(
            construct_diagonal_unitary(&rv(&[1.0]), &rv(&[0.5, 0.5]), 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn random_orthogonal(n: usize, seed: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| seed[(i * n + j) % seed.len()]).qr().q()
    }

    proptest! {
        #[test]
        fn schur_direction(b in prop::collection::vec(-5.0f64..5.0, 1..8), seed in prop::collection::vec(-1.0f64..1.0, 64)) {
            let n = b.len();
            let q = OrthogonalMatrix(random_orthogonal(n, &seed));
            let diag = q.conjugated_diagonal(&b);
            prop_assert!(sequences::majorizes(&rv(&b), &rv(&diag), 1e-9).unwrap());
        }

        #[test]
        fn permutations_are_reproduced(b in prop::collection::vec(-5.0f64..5.0, 1..10), shift in 0usize..10) {
            let mut c = b.clone();
            c.rotate_left(shift % b.len());
            let u = construct_diagonal_unitary(&rv(&b), &rv(&c), 1e-9).unwrap();
            for (x, y) in u.conjugated_diagonal(&b).iter().zip(&c) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + rv(&b).max_abs()));
            }
        }

        #[test]
        fn doubly_stochastic_images_round_trip(b in prop::collection::vec(-5.0f64..5.0, 2..12), seed in prop::collection::vec(-1.0f64..1.0, 144)) {
            let n = b.len();
            let q = random_orthogonal(n, &seed);
            // Orthostochastic mixing keeps c ≺ b.
            let c: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[(i, j)] * q[(i, j)] * b[j]).sum()).collect();
            let u = construct_diagonal_unitary(&rv(&b), &rv(&c), 1e-9).unwrap();
            prop_assert!(u.orthogonality_residual() <= 1e-10 * n as f64);
            for (x, y) in u.conjugated_diagonal(&b).iter().zip(&c) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + rv(&b).max_abs()));
            }
        }
    }
}
