use num_complex::Complex64;
use proptest::prelude::*;

use cqt_core::linalg::{
    commutator_norm, inner, projector_onto, tensor_ops, tensor_states, unitary_exp, Operator,
    StateVector,
};
use cqt_core::spin::{born_probability, spin_operator, Direction, Sign};

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn operator(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(complex(), dim * dim)
        .prop_map(move |v| Operator::from_rows(dim, &v).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = Operator> {
    operator(dim).prop_map(|a| a.add(&a.adjoint()).unwrap())
}

fn state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), dim)
        .prop_filter("non-null", |v| {
            v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(|v| StateVector::new(v).unwrap().normalized().unwrap())
}

fn direction() -> impl Strategy<Value = Direction> {
    (
        0.0..=std::f64::consts::PI,
        0.0..(2.0 * std::f64::consts::PI),
    )
        .prop_map(|(t, p)| Direction::new(t, p).unwrap())
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

proptest! {
    #[test]
    fn adjoint_moves_across_inner_product((a, u, v) in (1usize..=6).prop_flat_map(|d| (operator(d), state(d), state(d)))) {
        let lhs = inner(&u, &a.apply(&v).unwrap()).unwrap();
        let rhs = inner(&a.adjoint().apply(&u).unwrap(), &v).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn tensor_product_is_associative(a in operator(2), b in operator(2), c in operator(2)) {
        let left = tensor_ops(&tensor_ops(&a, &b), &c);
        let right = tensor_ops(&a, &tensor_ops(&b, &c));
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-13);
    }

    #[test]
    fn tensor_states_match_tensor_ops(a in operator(2), b in operator(3), u in state(2), v in state(3)) {
        let lhs = tensor_ops(&a, &b).apply(&tensor_states(&u, &v)).unwrap();
        let rhs = tensor_states(&a.apply(&u).unwrap(), &b.apply(&v).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn exponential_of_hermitian_is_unitary((h, t) in ((1usize..=8).prop_flat_map(hermitian), -3.0..3.0f64)) {
        let u = unitary_exp(&h, t).unwrap();
        prop_assert!(u.is_unitary(1e-10));
        prop_assert!(u.mul(&h).unwrap().max_abs_diff(&h.mul(&u).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn exponential_adds_durations((h, s, t) in ((1usize..=4).prop_flat_map(hermitian), -2.0..2.0f64, -2.0..2.0f64)) {
        let product = unitary_exp(&h, s).unwrap().mul(&unitary_exp(&h, t).unwrap()).unwrap();
        let whole = unitary_exp(&h, s + t).unwrap();
        prop_assert!(product.max_abs_diff(&whole).unwrap() < 1e-9);
    }

    #[test]
    fn born_probabilities_of_both_signs_sum_to_one(psi in state(2), w in direction()) {
        let p = born_probability(&psi, w, Sign::Plus).unwrap();
        let m = born_probability(&psi, w, Sign::Minus).unwrap();
        prop_assert!((p + m - 1.0).abs() < 1e-12);
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn projector_onto_state_is_rank_one(psi in (1usize..=6).prop_flat_map(state)) {
        let p = projector_onto(&psi, "psi").unwrap();
        prop_assert_eq!(p.rank(), 1);
        prop_assert!(p.op().apply(&psi).unwrap().max_abs_diff(&psi).unwrap() < 1e-12);
        let q = p.complement("not psi");
        prop_assert!(q.op().apply(&psi).unwrap().norm() < 1e-12);
    }

    #[test]
    fn spin_along_w_is_a_rotated_pauli_combination(w in direction()) {
        let [x, y, z] = w.unit_vector();
        let combo = spin_operator(Direction::x()).scale(Complex64::new(x, 0.0))
            .add(&spin_operator(Direction::y()).scale(Complex64::new(y, 0.0))).unwrap()
            .add(&spin_operator(Direction::z()).scale(Complex64::new(z, 0.0))).unwrap();
        prop_assert!(combo.max_abs_diff(&spin_operator(w)).unwrap() < 1e-12);
    }
}

#[test]
fn spin_commutation_relations() {
    let [sx, sy, sz] = [Direction::x(), Direction::y(), Direction::z()].map(spin_operator);
    for (a, b, c) in [(&sx, &sy, &sz), (&sy, &sz, &sx), (&sz, &sx, &sy)] {
        let comm = a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap();
        assert!(comm.max_abs_diff(&c.scale(i())).unwrap() < 1e-15);
    }
    assert!(commutator_norm(&sx, &sx).unwrap() == 0.0);
}
