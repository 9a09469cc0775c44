use hypext::lie_core::*;
use hypext::poincare::critical_exponent;
use hypext::schottky::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;

fn sl2r() -> impl Strategy<Value = GroupElement> {
    (0.0..2.0 * PI, -3.0..3.0f64, -2.0..2.0f64)
        .prop_map(|(a, t, x)| GroupElement::rotation(a).mul(&GroupElement::boost(t)).mul(&GroupElement::lower_unipotent(x)))
}

fn sl2c() -> impl Strategy<Value = GroupElement> {
    (0.3..2.0f64, -PI..PI, (-2.0..2.0f64, -2.0..2.0f64), (-2.0..2.0f64, -2.0..2.0f64)).prop_map(|(r, ph, b, cc)| {
        let a = C::from_polar(r, ph);
        let (b, cc) = (C::new(b.0, b.1), C::new(cc.0, cc.1));
        let d = (1.0 + b * cc) / a;
        GroupElement::new([[a, b], [cc, d]], Rank::Three).unwrap()
    })
}

fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn angle_diff(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(2.0 * PI) - PI).abs()
}

fn check_iwasawa(g: &GroupElement) -> Result<(), TestCaseError> {
    let f = iwasawa_decompose(g).unwrap();
    let k = &f.kappa;
    // κ is special unitary
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    prop_assert!((det - 1.0).norm() < 1e-12);
    prop_assert!((k[0][0].norm_sqr() + k[1][0].norm_sqr() - 1.0).abs() < 1e-12);
    let scale = g.matrix().iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    prop_assert!(max_diff(&f.reconstruct(), g.matrix()) < 1e-12 * scale);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, .. ProptestConfig::default() })]

    #[test]
    fn iwasawa_round_trip_real(g in sl2r()) {
        check_iwasawa(&g)?;
    }

    #[test]
    fn iwasawa_round_trip_complex(g in sl2c()) {
        check_iwasawa(&g)?;
    }

    #[test]
    fn boundary_action_is_associative(g in sl2r(), h in sl2r(), t in 0.0..2.0 * PI) {
        let b = BoundaryPoint::circle(t);
        let (BoundaryPoint::Circle { theta: x }, BoundaryPoint::Circle { theta: y }) =
            (boundary_act(&g, &boundary_act(&h, &b)), boundary_act(&g.mul(&h), &b))
        else {
            return Err(TestCaseError::fail("circle points stay on the circle"));
        };
        prop_assert!(angle_diff(x, y) < 1e-9);
    }

    #[test]
    fn sphere_action_is_associative(g in sl2c(), h in sl2c(), p in 0.1..3.0f64, az in 0.0..2.0 * PI) {
        let b = BoundaryPoint::sphere(p, az);
        let x = boundary_act(&g, &boundary_act(&h, &b));
        let y = boundary_act(&g.mul(&h), &b);
        prop_assert!(x.chordal(&y) < 1e-9);
    }

    #[test]
    fn log_a_is_an_additive_cocycle(g in sl2r(), h in sl2r(), t in 0.0..2.0 * PI) {
        // log_a(g h k_θ) = log_a(g κ(h k_θ)) + log_a(h k_θ)
        let (gm, hm) = (g.real_matrix().unwrap(), h.real_matrix().unwrap());
        let (t1, l1) = act_circle(&hm, t);
        let (t2, l2) = act_circle(&gm, t1);
        let (t3, l3) = act_circle(&g.mul(&h).real_matrix().unwrap(), t);
        prop_assert!(angle_diff(t2, t3) < 1e-9);
        prop_assert!((l1 + l2 - l3).abs() < 1e-9);
    }

    #[test]
    fn a_power_is_trivial_on_k(a in 0.0..4.0 * PI, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let v = a_power(&GroupElement::rotation(a), &SpectralParam::new(C::new(re, im), Rank::Two)).unwrap();
        prop_assert!((v - 1.0).norm() < 1e-12);
    }

    #[test]
    fn weyl_reflection_is_an_involution(re in -3.0..3.0f64, im in -3.0..3.0f64, half in -6i32..6) {
        let l = SpectralParam::new(C::new(re, im), Rank::Two);
        prop_assert_eq!(weyl_reflect(&weyl_reflect(&l)), l);
        prop_assert_eq!(is_bad(&l), is_bad(&weyl_reflect(&l)));
        let b = SpectralParam::real(half as f64 / 2.0);
        prop_assert!(is_bad(&b) && is_bad(&weyl_reflect(&b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, .. ProptestConfig::default() })]

    #[test]
    fn enumerated_words_are_reduced_and_counted(ell in 2.0..6.0f64, l in 0usize..6, two in any::<bool>()) {
        let g = if two { two_generator(ell).unwrap() } else { hyperbolic_cylinder(ell).unwrap() };
        let words = enumerate_words(&g, l);
        prop_assert_eq!(words.len(), word_count(g.num_generators(), l));
        for (w, m) in &words {
            prop_assert!(w.is_reduced());
            prop_assert!(max_diff(m.matrix(), g.word_matrix(w).matrix()) < 1e-9 * (1.0 + m.matrix()[0][0].norm()));
        }
    }

    #[test]
    fn min_displacement_is_positive_and_monotone_in_depth(ell in 2.0..6.0f64) {
        let g = two_generator(ell).unwrap();
        let shallow = min_displacement(&g, 1).unwrap();
        let deep = min_displacement(&g, 3).unwrap();
        prop_assert!(deep > 0.0 && deep.is_finite());
        prop_assert!(deep <= shallow);
    }

    #[test]
    fn embedding_preserves_words(ell in 1.0..5.0f64, l in 1usize..5) {
        let g = hyperbolic_cylinder(ell).unwrap();
        let e = embed_next_rank(&g).unwrap();
        prop_assert_eq!(e.rank, Rank::Three);
        for (w, m) in enumerate_words(&g, l) {
            prop_assert!(max_diff(e.word_matrix(&w).matrix(), m.matrix()) < 1e-12 * (1.0 + m.matrix()[0][0].norm()));
        }
    }
}

#[test]
fn critical_exponent_is_rotation_invariant() {
    let g = hyperbolic_cylinder(1.0).unwrap();
    let alpha = 0.9;
    let k = GroupElement::rotation(alpha);
    let gens = g.generators.iter().map(|h| k.mul(h).mul(&k.inverse())).collect();
    let arcs = g
        .paired_arcs
        .iter()
        .map(|(s, t)| (Arc::new(s.start + alpha, s.len), Arc::new(t.start + alpha, t.len)))
        .collect();
    let r = build_schottky(gens, arcs).unwrap();
    let tol = 1e-3;
    let (a, b) = (critical_exponent(&g, tol).unwrap(), critical_exponent(&r, tol).unwrap());
    assert!((a - b).abs() <= 2.0 * tol, "{a} vs {b}");
}

#[test]
fn trivial_group_has_infinite_displacement() {
    assert_eq!(min_displacement(&trivial_group(), 3).unwrap(), f64::INFINITY);
    assert_eq!(enumerate_words(&trivial_group(), 5).len(), 1);
}
