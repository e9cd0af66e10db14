mod common;

use std::collections::BTreeMap;

use derham_core::complexes::{cone, ChainComplex, ChainMap};
use derham_core::dalg::{AlgebraPresentation, Poly};
use derham_core::dold_kan::{derived_power, dk_gamma, normalize, apply_levelwise, PowerKind};
use derham_core::graded::{FilteredStub, GradedComplex};
use derham_core::linalg::{int, invariant_factors, smith_normal_form, Matrix, RingSpec, Scalar};
use proptest::prelude::*;

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r).prop_map(move |rows| {
            let rows: Vec<Vec<Scalar>> = rows.into_iter().map(|row| row.into_iter().map(int).collect()).collect();
            Matrix::from_rows_sized(RingSpec::Integers, r, c, rows).unwrap()
        })
    })
}

/// A two-term complex `Z^c --m--> Z^r` in degrees `1, 0`.
fn two_term() -> impl Strategy<Value = ChainComplex> {
    small_matrix(2, 2).prop_map(|m| ChainComplex::two_term(m, 1))
}

fn graded() -> impl Strategy<Value = GradedComplex> {
    proptest::collection::btree_map(-2i32..=2, two_term(), 0..3)
        .prop_map(|pieces| GradedComplex::new(RingSpec::Integers, pieces).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_is_diagonal_and_divisible(m in small_matrix(4, 4)) {
        let s = smith_normal_form(&m);
        let d = s.u.mul(&m).unwrap().mul(&s.v).unwrap();
        prop_assert_eq!(&d, &s.diagonal_matrix());
        prop_assert!(s.u.mul(&s.u_inv).unwrap().is_identity());
        prop_assert!(s.v.mul(&s.v_inv).unwrap().is_identity());
        for w in s.diagonal.windows(2) {
            prop_assert!(RingSpec::Integers.divides(&w[0], &w[1]));
        }
        let mut diag: Vec<Scalar> = s.diagonal.iter().map(|x| if *x < int(0) { -x.clone() } else { x.clone() }).collect();
        diag.sort();
        let mut inv = invariant_factors(&m);
        inv.sort();
        prop_assert_eq!(diag, inv);
    }

    #[test]
    fn derived_powers_are_complexes(c in two_term(), r in 1usize..=3, k in 0usize..4) {
        let kind = [PowerKind::Sym, PowerKind::Exterior, PowerKind::Divided, PowerKind::AntiSym][k];
        let out = derived_power(kind, r, &c, 6).unwrap();
        for (i, d) in out.differentials() {
            if let Some(next) = out.differential_ref(i - 1) {
                prop_assert!(next.mul(d).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn decalage(c in two_term(), r in 1usize..=3) {
        let lhs = derived_power(PowerKind::Sym, r, &c.shift(1), 10).unwrap().homology();
        let rhs = derived_power(PowerKind::Exterior, r, &c, 10).unwrap().shift(r as i32).homology();
        prop_assert_eq!(lhs, rhs);
        let lhs = derived_power(PowerKind::Exterior, r, &c.shift(1), 10).unwrap().homology();
        let rhs = derived_power(PowerKind::Divided, r, &c, 10).unwrap().shift(r as i32).homology();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fast_route_matches_literal_dold_kan(c in two_term(), r in 1usize..=2, k in 0usize..3) {
        let kind = [PowerKind::Sym, PowerKind::Exterior, PowerKind::Divided][k];
        let top = 2 * r + 1;
        let literal = normalize(&apply_levelwise(kind, r, &dk_gamma(&c, top).unwrap()).unwrap(), 2 * r).unwrap();
        let fast = derived_power(kind, r, &c, 2 * r).unwrap();
        let cut = literal.truncated_above.unwrap_or(i32::MAX);
        let lit: BTreeMap<_, _> = literal.complex.homology().groups().iter().filter(|(d, _)| **d <= cut).map(|(d, g)| (*d, g.clone())).collect();
        let fst: BTreeMap<_, _> = fast.homology().groups().iter().filter(|(d, _)| **d <= cut).map(|(d, g)| (*d, g.clone())).collect();
        prop_assert_eq!(lit, fst);
    }

    #[test]
    fn shear_composes_and_dual_is_involutive(g in graded(), a in -2i32..=2, b in -2i32..=2) {
        prop_assert_eq!(g.shear(a).shear(b).homology(), g.shear(a + b).homology());
        prop_assert_eq!(g.dual().dual().homology(), g.homology());
        prop_assert_eq!(g.negate_weights().negate_weights().homology(), g.homology());
        for (w, h) in g.shear(a).homology() {
            prop_assert_eq!(h, g.piece(w).homology().shift(2 * a * w));
        }
    }

    #[test]
    fn day_tensor_unit_and_euler(g in graded(), h in graded()) {
        let unit = GradedComplex::unit(RingSpec::Integers);
        prop_assert_eq!(g.day_tensor(&unit).unwrap().homology(), g.homology());
        let t = g.day_tensor(&h).unwrap();
        for (w, c) in t.pieces() {
            let expected: i64 = g
                .pieces()
                .iter()
                .map(|(i, a)| a.euler_characteristic() * h.piece(w - i).euler_characteristic())
                .sum();
            prop_assert_eq!(c.euler_characteristic(), expected);
        }
    }

    #[test]
    fn cone_of_identity_is_acyclic(c in two_term()) {
        prop_assert!(cone(&ChainMap::identity(&c)).unwrap().is_acyclic());
    }

    #[test]
    fn stub_graded_pieces_add_up(c in two_term(), l0 in 0i64..3, l1 in 0i64..3) {
        let lv0 = vec![l0.max(l1); c.rank(0)];
        let lv1 = vec![l1; c.rank(1)];
        let levels: BTreeMap<i32, Vec<i64>> = [(0, lv0), (1, lv1)].into();
        let st = FilteredStub::from_levels(&c, &levels, 3).unwrap();
        let total: i64 = (0..3).map(|s| st.gr(s).unwrap().euler_characteristic()).sum();
        prop_assert_eq!(total, st.level(0).euler_characteristic());
        prop_assert!(st.is_strict());
    }

    #[test]
    fn polynomial_print_parse_round_trip(coeffs in proptest::collection::vec(-5i64..=5, 1..5), e in 0u32..4) {
        let vars = vec!["x".to_string(), "y".to_string()];
        let mut p = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            p = p.add(&Poly::monomial(vec![i as u32, e], int(*c)));
        }
        let text = p.format(&vars);
        prop_assert_eq!(Poly::parse(&text, &vars).unwrap(), p);
    }
}

#[test]
fn presentation_json_round_trip() {
    for name in ["Fp-over-Z", "Zx", "Zxy", "hypersurface-x2"] {
        let p = AlgebraPresentation::preset(name, 5).unwrap();
        let back = AlgebraPresentation::from_json(&p.to_json()).unwrap();
        assert_eq!(back.to_json(), p.to_json());
    }
}

#[test]
fn stub_json_round_trip() {
    let st = FilteredStub::principal_adic(RingSpec::Integers, &int(3), 3).unwrap();
    let back = FilteredStub::from_json(&st.to_json()).unwrap();
    assert_eq!(back.to_json(), st.to_json());
    assert_eq!(common::tor_amplitude(&ChainComplex::concentrated(RingSpec::Integers, 0, 1)), (0, 0));
}
