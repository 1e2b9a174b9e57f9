use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use qsim::channels::{damping_branch, protect_unknown_qubit};
use qsim::entanglement::{concurrence, three_tangle};
use qsim::protocols::{bell_generate, chi_pair, teleport_case, w_generate, Pairing, TeleportCase};
use qsim::qstate::{apply_op, cr, fidelity, project_bell, tensor, BellLabel, QubitOperator, StateVector};
use qsim::sweep::Grid;
use qsim::NormalizationMode;

fn amps(n: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-2)
        .prop_map(|v| {
            let n = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            v.into_iter().map(|(a, b)| C::new(a / n, b / n)).collect()
        })
}

fn state(qubits: usize) -> impl Strategy<Value = StateVector> {
    amps(1 << qubits).prop_map(|a| StateVector::new(a).unwrap())
}

fn unitary() -> impl Strategy<Value = QubitOperator> {
    (amps(2), 0.0..2.0 * PI).prop_map(|(q, t)| {
        let ph = C::from_polar(1.0, t);
        QubitOperator::from_rows(2, &[q[0], -q[1].conj() * ph, q[1], q[0].conj() * ph]).unwrap()
    })
}

/// (p, gamma_tau) where the recovery strength is in range.
fn feasible() -> impl Strategy<Value = (f64, f64)> {
    (0.5..0.95f64, 0.0..2.0f64).prop_filter("feasible", |&(p, gt)| (1.0 - p) * (-gt).exp() / p <= 1.0)
}

fn norm_of(s: &StateVector) -> f64 {
    s.norm_sqr()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(s in state(3), u in unitary(), q in 0usize..3) {
        let out = apply_op(&s, &u, &[q]).unwrap();
        prop_assert!((norm_of(&out) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_op_is_linear(a in state(2), b in state(2), u in unitary(), k in -2.0..2.0f64) {
        let sum = a.add(&b.scaled(cr(k))).unwrap();
        let lhs = apply_op(&sum, &u, &[1]).unwrap();
        let rhs = apply_op(&a, &u, &[1]).unwrap().add(&apply_op(&b, &u, &[1]).unwrap().scaled(cr(k))).unwrap();
        for (x, y) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn local_ops_commute_with_tensor(a in state(1), b in state(2), u in unitary()) {
        let lhs = apply_op(&tensor(&a, &b), &u, &[0]).unwrap();
        let rhs = tensor(&apply_op(&a, &u, &[0]).unwrap(), &b);
        for (x, y) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn bell_projections_are_complete(s in state(3), pair in prop::sample::select(vec![(0, 1), (0, 2), (1, 2), (2, 0)])) {
        let total: f64 = BellLabel::ALL.iter().map(|&l| project_bell(&s, pair, l).unwrap().0).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in state(2), b in state(2)) {
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-14);
        prop_assert!((-1e-14..=1.0 + 1e-12).contains(&f));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn damping_branches_sum_to_one(s in state(2), q in 0usize..2, r in 0.0..=1.0f64) {
        let total: f64 = damping_branch(&s, q, r).unwrap().iter().map(|b| b.joint_prob).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tangle_is_lu_invariant(s in state(3), u0 in unitary(), u1 in unitary(), u2 in unitary()) {
        let mut moved = s.clone();
        for (q, u) in [u0, u1, u2].iter().enumerate() {
            moved = apply_op(&moved, u, &[q]).unwrap();
        }
        let (t0, t1) = (three_tangle(&s).unwrap(), three_tangle(&moved).unwrap());
        prop_assert!((t0 - t1).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t0));
    }

    #[test]
    fn concurrence_is_lu_invariant(s in state(2), u0 in unitary(), u1 in unitary()) {
        let moved = apply_op(&apply_op(&s, &u0, &[0]).unwrap(), &u1, &[1]).unwrap();
        prop_assert!((concurrence(&s).unwrap() - concurrence(&moved).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn protect_leaves_sum_to_one(a in amps(2), (p, gt) in feasible()) {
        let rep = protect_unknown_qubit(a[0], a[1], p, gt).unwrap();
        prop_assert!((rep.leaf_probability_sum() - 1.0).abs() < 1e-12);
        prop_assert!(rep.target_fidelity > 1.0 - 1e-12);
    }

    #[test]
    fn bell_leaves_sum_to_one(t in 0.05..1.5f64, (p, gt) in feasible(), physical in any::<bool>()) {
        let (a, g) = (t.cos() * FRAC_1_SQRT_2, t.sin() * FRAC_1_SQRT_2);
        let mode = if physical { NormalizationMode::Physical } else { NormalizationMode::Paper };
        let rep = bell_generate(cr(a), cr(-a), cr(g), cr(g), p, gt, mode).unwrap();
        prop_assert!((rep.leaf_probability_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_leaves_sum_to_one(angle in 0.0..PI / 2.0, (p, gt) in feasible(), flip in any::<bool>()) {
        let rep = w_generate(angle, FRAC_1_SQRT_2, p, gt, NormalizationMode::Physical, flip).unwrap();
        prop_assert!((rep.leaf_probability_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_pair_overlap_is_s(x in 0.01..0.99f64, s in 0.0..=1.0f64) {
        let (a, b) = chi_pair(x, s).unwrap();
        prop_assert!((a.inner(&b).unwrap() - cr(s)).norm() < 1e-12);
        prop_assert!((b.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleport_outcomes_are_complete(x in 0.05..0.95f64, s in 0.05..0.95f64) {
        prop_assume!((x - s).abs() > 1e-3);
        if let Ok(rep) = teleport_case(TeleportCase::Ia, x, s, Pairing::DEFAULT) {
            let total: f64 = rep.outcomes.iter().map(|o| o.prob).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_row_count(n in 1usize..12, m in 1usize..12) {
        let grid: Grid = format!("p=0.1:{}:0.1,s=0:{}:1", 0.1 * n as f64, m - 1).parse().unwrap();
        prop_assert_eq!(grid.len(), n * m);
        prop_assert_eq!(grid.points().count(), n * m);
    }
}
