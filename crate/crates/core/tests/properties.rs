use approx::assert_relative_eq;
use frame_admissibility::frames;
use frame_admissibility::operators::{self, FiniteHermitian, OperatorModel};
use frame_admissibility::sequences::{self, RealVec, SequenceModel};
use frame_admissibility::{schur_horn, synthesis};
use proptest::prelude::*;

/// A vector majorized by `b`, obtained by averaging random pairs.
fn blend(b: &[f64], mixes: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut c = b.to_vec();
    let n = c.len();
    for &(i, j, t) in mixes {
        let (i, j) = (i % n, j % n);
        let (x, y) = (c[i], c[j]);
        c[i] = t * x + (1.0 - t) * y;
        c[j] = (1.0 - t) * x + t * y;
    }
    c
}

proptest! {
    #[test]
    fn u_k_dominates_l_k(v in prop::collection::vec(-5.0..5.0f64, 1..15)) {
        let s = SequenceModel::finite(v.clone()).unwrap();
        let mut total_check = None;
        for k in 1..=v.len() {
            let u = sequences::u_k_seq(&s, k).unwrap().value;
            let l = sequences::l_k_seq(&s, k).unwrap().value;
            prop_assert!(u >= l - 1e-12);
            total_check = Some((u, l));
        }
        let (u, l) = total_check.unwrap();
        assert_relative_eq!(u, l, epsilon = 1e-12 * (1.0 + v.iter().map(|x| x.abs()).sum::<f64>()));
    }

    #[test]
    fn blended_vectors_are_majorized_and_realized(
        b in prop::collection::vec(0.0..4.0f64, 2..10),
        mixes in prop::collection::vec((0usize..10, 0usize..10, 0.0..1.0f64), 0..12),
    ) {
        let c = blend(&b, &mixes);
        let (bv, cv) = (RealVec::new(b.clone()).unwrap(), RealVec::new(c.clone()).unwrap());
        prop_assert!(sequences::majorizes(&bv, &cv, 1e-9).unwrap());
        let q = schur_horn::construct_diagonal_unitary(&bv, &cv, 1e-9).unwrap();
        for (x, y) in q.conjugated_diagonal(&b).iter().zip(&c) {
            assert_relative_eq!(*x, *y, epsilon = 1e-9 * (1.0 + bv.max_abs()));
        }
    }

    #[test]
    fn synthesized_frames_match_their_pair(
        eig in prop::collection::vec(0.5..3.0f64, 1..5),
        extra in 0usize..5,
        mixes in prop::collection::vec((0usize..10, 0usize..10, 0.0..1.0f64), 0..12),
    ) {
        let n = eig.len();
        let mut b = eig.clone();
        b.resize(n + extra, 0.0);
        let c = blend(&b, &mixes);
        let s = FiniteHermitian::diagonal(&eig).unwrap();
        let cv = RealVec::new(c).unwrap();
        let f = synthesis::synthesize_finite(&s, &cv, 1e-9).unwrap();
        prop_assert!(frames::verify_pair(&f, &s, &cv, 1e-8).unwrap().pass);
        prop_assert_eq!(frames::excess(&f, 1e-9), extra);
        let tr: f64 = frames::norms_squared(&f).iter().sum();
        assert_relative_eq!(tr, s.trace(), epsilon = 1e-9 * (1.0 + s.trace()));
    }

    #[test]
    fn operator_functionals_match_eigenvalue_sums(eig in prop::collection::vec(-3.0..3.0f64, 1..8)) {
        let s = OperatorModel::Finite(FiniteHermitian::diagonal(&eig).unwrap());
        let seq = SequenceModel::finite(eig.clone()).unwrap();
        for k in 1..=eig.len() {
            assert_relative_eq!(operators::u_k_op(&s, k).unwrap().value, sequences::u_k_seq(&seq, k).unwrap().value, epsilon = 1e-12);
            assert_relative_eq!(operators::l_k_op(&s, k).unwrap().value, sequences::l_k_seq(&seq, k).unwrap().value, epsilon = 1e-12);
        }
    }
}

/// Largest `k`-subset sum of `v`, by enumeration.
fn subset_max(v: &[f64], k: usize) -> f64 {
    (0u32..1 << v.len()).filter(|m| m.count_ones() as usize == k).map(|m| (0..v.len()).filter(|i| m >> i & 1 == 1).map(|i| v[i]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn classify_is_sound_on_finite_pairs(
        eig in prop::collection::vec(0.5..3.0f64, 1..5),
        c in prop::collection::vec(0.0..3.0f64, 1..10),
    ) {
        use frame_admissibility::admissibility::{self, Status};
        let s = FiniteHermitian::diagonal(&eig).unwrap();
        // Rescale so the trace condition holds and only the partial sums decide.
        let scale = s.trace() / c.iter().sum::<f64>().max(1e-3);
        let c: Vec<f64> = c.iter().map(|x| x * scale).collect();
        let cv = RealVec::new(c.clone()).unwrap();
        let verdict = admissibility::classify(&OperatorModel::Finite(s.clone()), &SequenceModel::finite(c.clone()).unwrap(), 200, 1e-9).unwrap();
        match verdict.status {
            Status::Admissible => {
                let f = synthesis::synthesize_finite(&s, &cv, 1e-9).unwrap();
                prop_assert!(frames::verify_pair(&f, &s, &cv, 1e-8).unwrap().pass);
            }
            Status::NotAdmissible => {
                let w = verdict.first_failure().unwrap();
                if let Some(k) = w.witness_k.filter(|k| *k < c.len() && c.len() <= 12) {
                    let mut b = eig.clone();
                    b.resize(c.len(), 0.0);
                    prop_assert!(subset_max(&c, k) > subset_max(&b, k));
                }
            }
            Status::Undetermined => prop_assert!(false, "finite pairs are always decided"),
        }
    }
}
