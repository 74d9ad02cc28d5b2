use num_complex::Complex64;
use proptest::prelude::*;

use cqt_core::dynamics::{Schedule, TimeGrid};
use cqt_core::histories::{
    check_consistency, collapse_family_labeled, gram_matrix, gram_min_eigenvalue, unitary_family,
    Family,
};
use cqt_core::linalg::StateVector;
use cqt_core::scenario::builtin_scenarios;
use cqt_core::spin::{basis_for, spin_operator, Direction};

fn direction() -> impl Strategy<Value = Direction> {
    (
        0.0..=std::f64::consts::PI,
        0.0..(2.0 * std::f64::consts::PI),
    )
        .prop_map(|(t, p)| Direction::new(t, p).unwrap())
}

fn qubit() -> impl Strategy<Value = StateVector> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("non-null", |a| a.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|a| {
            StateVector::new(vec![Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])])
                .unwrap()
                .normalized()
                .unwrap()
        })
}

fn schedule() -> impl Strategy<Value = Schedule> {
    (direction(), -2.0..2.0f64, any::<bool>()).prop_map(|(w, b, free)| {
        if free {
            Schedule::free(2)
        } else {
            Schedule::constant(spin_operator(w).scale(Complex64::new(b, 0.0)), 0.0, 10.0).unwrap()
        }
    })
}

fn two_time(psi: &StateVector, w: Direction, s: &Schedule, t1: f64) -> Family {
    let b = basis_for(w);
    collapse_family_labeled(
        psi,
        &TimeGrid::new(vec![0.0, t1]).unwrap(),
        s,
        &[("w1+".into(), b.plus), ("w1-".into(), b.minus)],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn two_time_families_are_consistent(psi in qubit(), w in direction(), s in schedule(), t1 in 0.01..5.0f64) {
        let r = check_consistency(&two_time(&psi, w, &s, t1));
        prop_assert!(r.consistent);
        prop_assert!((r.probability_sum - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unitary_family_has_probability_one(psi in qubit(), s in schedule(), n in 1usize..5) {
        let f = unitary_family(&psi, &TimeGrid::uniform(n), &s).unwrap();
        let r = check_consistency(&f);
        prop_assert!(r.consistent);
        prop_assert_eq!(r.probabilities.len(), 1);
        prop_assert!((r.probabilities[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn collapse_family_reproduces_born_weights(psi in qubit(), w in direction(), s in schedule(), n in 1usize..4) {
        let b = basis_for(w);
        let f = collapse_family_labeled(
            &psi,
            &TimeGrid::uniform(n),
            &s,
            &[("w+".into(), b.plus.clone()), ("w-".into(), b.minus)],
        )
        .unwrap();
        let r = check_consistency(&f);
        prop_assert!(r.consistent);
        let evolved = f.evolved_state(n).unwrap();
        let born = cqt_core::linalg::inner(&b.plus, &evolved).unwrap().norm_sqr();
        prop_assert!((r.probabilities[0] - born).abs() < 1e-10);
    }

    #[test]
    fn coarse_graining_keeps_consistency(w1 in direction(), w2 in direction(), psi in qubit()) {
        let doc = format!(
            "scenario cg\n[system]\nspins 1\n[state]\namplitudes {} {} {} {}\n[grid]\ntimes 0 1 2\n[schedule]\nfree\n\
             [family f]\nw({t1},{p1})1+ w({t2},{p2})2+\nw({t1},{p1})1+ w({t2},{p2})2-\nw({t1},{p1})1- w({t2},{p2})2+\nw({t1},{p1})1- w({t2},{p2})2-\n",
            psi.amplitudes()[0].re, psi.amplitudes()[0].im, psi.amplitudes()[1].re, psi.amplitudes()[1].im,
            t1 = w1.theta(), p1 = w1.phi(), t2 = w2.theta(), p2 = w2.phi(),
        );
        let doc = cqt_core::scenario::parse_scenario(&doc).unwrap();
        let f = doc.families().unwrap().remove(0);
        for k in 1..=2 {
            let coarse = f.coarse_grained(k).unwrap();
            let r = check_consistency(&coarse);
            // one remaining branching time is always consistent
            prop_assert!(r.consistent);
            prop_assert!((r.probability_sum - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn gram_matrices_of_builtins_are_positive_semidefinite() {
    for doc in builtin_scenarios() {
        for f in doc.families().unwrap() {
            let g = gram_matrix(&f).unwrap();
            for (i, row) in g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert!((v - g[j][i].conj()).norm() < 1e-12);
                }
            }
            let min = gram_min_eigenvalue(&f).unwrap();
            assert!(
                min > -1e-10,
                "{}/{}: min eigenvalue {min}",
                doc.name,
                f.name()
            );
        }
    }
}

#[test]
fn probabilities_of_consistent_builtins_sum_to_one() {
    for doc in builtin_scenarios() {
        for f in doc.families().unwrap() {
            let r = check_consistency(&f);
            if r.consistent {
                assert!(
                    (r.probability_sum - 1.0).abs() < 1e-10,
                    "{}/{}",
                    doc.name,
                    f.name()
                );
            }
        }
    }
}

#[test]
fn coarse_graining_consistent_builtins_stays_consistent() {
    for doc in builtin_scenarios() {
        for f in doc.families().unwrap() {
            if !check_consistency(&f).consistent {
                continue;
            }
            for k in 1..=f.grid().event_count() {
                let r = check_consistency(&f.coarse_grained(k).unwrap());
                assert!(r.consistent, "{}/{} at {k}", doc.name, f.name());
                assert!((r.probability_sum - 1.0).abs() < 1e-10);
            }
        }
    }
}
