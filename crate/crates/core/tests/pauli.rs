mod common;

use common::*;
use proptest::prelude::*;
use z2ladder::pauli::{Pauli, PauliString, PauliSum, Phase};

fn ps(n: usize, ops: &[(usize, Pauli)]) -> PauliString {
    PauliString::from_ops(n, ops).unwrap()
}

#[test]
fn single_qubit_products() {
    let x = ps(1, &[(0, Pauli::X)]);
    let z = ps(1, &[(0, Pauli::Z)]);
    let prod = x.mul(&z).unwrap();
    assert_eq!(prod.get(0), Pauli::Y);
    assert_eq!(prod.phase(), Phase::MINUS_I);

    let zz = ps(2, &[(0, Pauli::Z), (1, Pauli::Z)]);
    let sq = zz.mul(&zz).unwrap();
    assert!(sq.is_identity());
    assert_eq!(sq.phase(), Phase::ONE);
}

#[test]
fn two_qubit_product_matches_dense() {
    let a = ps(2, &[(0, Pauli::X), (1, Pauli::Z)]);
    let b = ps(2, &[(0, Pauli::Z), (1, Pauli::X)]);
    let prod = a.mul(&b).unwrap();
    assert_eq!(prod, ps(2, &[(0, Pauli::Y), (1, Pauli::Y)]));
    let dense = dense_string(&a) * dense_string(&b);
    assert!(max_abs(&(dense - dense_string(&prod))) < 1e-14);
}

#[test]
fn width_mismatch_is_an_error() {
    let a = PauliString::identity(2).unwrap();
    let b = PauliString::identity(3).unwrap();
    assert!(a.mul(&b).is_err());
    assert!(a.commutes(&b).is_err());
    assert!(PauliString::single(2, 2, Pauli::X).is_err());
}

#[test]
fn commutation_examples() {
    let x = ps(1, &[(0, Pauli::X)]);
    let z = ps(1, &[(0, Pauli::Z)]);
    assert!(!x.commutes(&z).unwrap());
    assert!(x.commutes(&x).unwrap());
    let xx = ps(2, &[(0, Pauli::X), (1, Pauli::X)]);
    let zz = ps(2, &[(0, Pauli::Z), (1, Pauli::Z)]);
    assert!(xx.commutes(&zz).unwrap());
    let comm = dense_string(&xx) * dense_string(&zz) - dense_string(&zz) * dense_string(&xx);
    assert!(max_abs(&comm) < 1e-14);
}

#[test]
fn simplify_merges_and_cancels() {
    let z0 = ps(1, &[(0, Pauli::Z)]);
    let s = PauliSum::from_terms(1, vec![(1.0, z0), (1.0, z0)]).unwrap();
    let simp = s.simplify(1e-12);
    assert_eq!(simp.terms(), &[(2.0, z0)]);
    let s = PauliSum::from_terms(1, vec![(1.0, z0), (-1.0, z0)]).unwrap();
    assert!(s.simplify(1e-12).is_empty());
    // Phases fold into the coefficient.
    let s =
        PauliSum::from_terms(1, vec![(1.0, z0.with_phase(Phase::MINUS_ONE)), (3.0, z0)]).unwrap();
    assert_eq!(s.simplify(0.0).terms(), &[(2.0, z0)]);
}

#[test]
fn canonical_order_is_z_then_x() {
    let n = 2;
    let s = PauliSum::from_terms(
        n,
        vec![
            (1.0, ps(n, &[(1, Pauli::Z)])),
            (1.0, ps(n, &[(0, Pauli::X)])),
            (1.0, PauliString::identity(n).unwrap()),
            (1.0, ps(n, &[(0, Pauli::Z)])),
        ],
    )
    .unwrap()
    .simplified();
    let keys: Vec<_> = s.terms().iter().map(|(_, p)| p.sort_key()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(s.terms()[0].1.is_identity());
}

#[test]
fn text_examples() {
    let p = PauliString::parse("Z0 X3 X4", 5).unwrap();
    assert_eq!(p.to_string(), "Z0 X3 X4");
    let p = PauliString::parse("−1 * Y2", 3).unwrap();
    assert_eq!(p.phase(), Phase::MINUS_ONE);
    let sum: PauliSum<f64> = PauliSum::parse("qubits 5\n−2.0 * Z0 X3 X4\n0.5 * I\n").unwrap();
    assert_eq!(sum.len(), 2);
    assert_eq!(sum.terms()[0].0, -2.0);
    assert!(PauliString::parse("Q1", 2).is_err());
    assert!(PauliString::parse("X5", 2).is_err());
    assert!(PauliString::parse("X0 X0", 2).is_err());
    assert!(PauliSum::<f64>::parse("2 * X0").is_err());
}

fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>(), 0u32..4).prop_map(move |(x, z, k)| {
        PauliString::from_masks(n, x & mask, z & mask, Phase::from_exponent(k)).unwrap()
    })
}

fn arb_sum(n: usize) -> impl Strategy<Value = PauliSum<f64>> {
    prop::collection::vec((-3i32..=3, arb_string(n)), 0..12).prop_map(move |terms| {
        PauliSum::from_terms(
            n,
            terms
                .into_iter()
                .map(|(c, s)| (c as f64 * 0.25, s))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn product_is_phase_exact(a in arb_string(3), b in arb_string(3), c in arb_string(3)) {
        let ab = a.mul(&b).unwrap();
        prop_assert!(max_abs(&(dense_string(&a) * dense_string(&b) - dense_string(&ab))) < 1e-13);
        let left = ab.mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_matches_dense_on_four_qubits(a in arb_string(4), b in arb_string(4)) {
        let ab = a.mul(&b).unwrap();
        prop_assert!(max_abs(&(dense_string(&a) * dense_string(&b) - dense_string(&ab))) < 1e-13);
    }

    #[test]
    fn commutes_matches_dense(a in arb_string(4), b in arb_string(4)) {
        let (da, db) = (dense_string(&a), dense_string(&b));
        let comm = &da * &db - &db * &da;
        prop_assert_eq!(a.commutes(&b).unwrap(), max_abs(&comm) < 1e-12);
    }

    #[test]
    fn simplify_is_idempotent(s in arb_sum(4)) {
        let once = s.simplify(1e-12);
        prop_assert_eq!(once.simplify(1e-12), once.clone());
        prop_assert!(max_abs(&(dense_sum(&s) - dense_sum(&once))) < 1e-12);
    }

    #[test]
    fn text_round_trip(s in arb_sum(5)) {
        let text = s.to_string();
        let back: PauliSum<f64> = PauliSum::parse(&text).unwrap();
        prop_assert_eq!(back, s.clone());
        for (_, p) in s.terms() {
            prop_assert_eq!(PauliString::parse(&p.to_string(), 5).unwrap(), *p);
        }
    }
}
