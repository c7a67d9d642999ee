use invphase_core::coeffsys;
use invphase_core::fgab::FgAbGroup;
use invphase_core::thomcoh::{compute_window, series_mul, sq, sw_total, truncated_ko, ModTwoClass, ThomError, VirtualBundle};
use proptest::prelude::*;

/// Independent polynomial arithmetic over F2, coefficient vectors.
fn poly_mul(x: &[bool], y: &[bool]) -> Vec<bool> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![false; x.len() + y.len() - 1];
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in y.iter().enumerate() {
            out[i + j] ^= a & b;
        }
    }
    out
}

fn poly_pow(x: &[bool], k: u32) -> Vec<bool> {
    (0..k).fold(vec![true], |acc, _| poly_mul(&acc, x))
}

fn coeffs(c: &ModTwoClass) -> Vec<u32> {
    c.exponents.iter().copied().collect()
}

fn support(v: &[bool]) -> Vec<u32> {
    v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect()
}

/// Total square of `a^j` is `(a + a²)^j`; read off the degree-`j+k` part.
#[test]
fn squares_match_total_square_oracle() {
    for j in 0..=12u32 {
        let total = poly_pow(&[false, true, true], j);
        for k in 0..=12u32 {
            let expected: Vec<u32> = support(&total).into_iter().filter(|&e| e == j + k).collect();
            assert_eq!(coeffs(&sq(k, &ModTwoClass::a_pow(j))), expected, "Sq^{k} a^{j}");
        }
    }
}

/// `Sq(Ū a^j) = Ū w(V) (a + a²)^j`.
#[test]
fn thom_squares_match_total_square_oracle() {
    for (m, n) in [(-3, 0), (-2, 2), (-1, 5), (0, 1), (1, 0), (2, -1), (5, 0)] {
        let v = VirtualBundle::new(m, n);
        for j in 0..=10u32 {
            let total = poly_mul(&sw_total(v, 30), &poly_pow(&[false, true, true], j));
            for k in 0..=10u32 {
                let expected: Vec<u32> =
                    support(&total).into_iter().filter(|&e| e == j + k).collect();
                assert_eq!(coeffs(&sq(k, &ModTwoClass::thom_a_pow(v, j))), expected, "Sq^{k} of Ua^{j} for {v}");
            }
        }
    }
}

#[test]
fn stiefel_whitney_classes_are_inverse() {
    for m in -9..=9 {
        let plus = sw_total(VirtualBundle::new(m, 0), 20);
        let minus = sw_total(VirtualBundle::new(-m, 3), 20);
        let mut one = vec![false; 21];
        one[0] = true;
        assert_eq!(series_mul(&plus, &minus), one, "m = {m}");
    }
    assert_eq!(support(&sw_total(VirtualBundle::new(-2, 2), 6)), vec![0, 2, 4, 6]);
}

#[test]
fn adem_relations_in_low_degree() {
    for j in 0..=12 {
        let x = ModTwoClass::a_pow(j);
        // Sq¹Sq¹ = 0, Sq¹Sq² = Sq³, Sq²Sq² = Sq³Sq¹
        assert!(sq(1, &sq(1, &x)).is_zero());
        assert_eq!(sq(1, &sq(2, &x)), sq(3, &x));
        assert_eq!(sq(2, &sq(2, &x)), sq(3, &sq(1, &x)));
    }
}

#[test]
fn two_thom_classes_do_not_multiply() {
    let v = VirtualBundle::new(1, 0);
    let u = ModTwoClass::thom_a_pow(v, 0);
    assert_eq!(u.mul(&u), Err(ThomError::TwoThomClasses));
}

fn arb_poly() -> impl Strategy<Value = ModTwoClass> {
    prop::collection::vec(0u32..=6, 0..4).prop_map(|e| ModTwoClass::from_exponents(e, None))
}

proptest! {
    #[test]
    fn cartan_formula(x in arb_poly(), y in arb_poly(), k in 0u32..=12, m in -6i64..=6, thom in any::<bool>()) {
        let x = if thom { ModTwoClass { thom: Some(VirtualBundle::new(m, 0)), ..x } } else { x };
        let lhs = sq(k, &x.mul(&y).unwrap());
        let mut rhs = ModTwoClass::from_exponents([], x.thom);
        for i in 0..=k {
            rhs = rhs.add(&sq(i, &x).mul(&sq(k - i, &y)).unwrap());
        }
        prop_assert_eq!(coeffs(&lhs), coeffs(&rhs));
    }

    /// Adding a trivial summand shifts every total degree by one.
    #[test]
    fn suspension_shifts_degree(m in -5i64..=5, n in -3i64..=3, d in -4i64..=6) {
        let a = compute_window(VirtualBundle::new(m, n), d).unwrap();
        let b = compute_window(VirtualBundle::new(m, n + 1), d + 1).unwrap();
        prop_assert_eq!(a.group, b.group);
        prop_assert_eq!(a.closed, b.closed);
    }

    /// `Sq²` and orientability only see `m` modulo 4.
    #[test]
    fn period_four_in_m(m in -5i64..=5, d in -4i64..=6) {
        let a = compute_window(VirtualBundle::new(m, 0), d).unwrap();
        let b = compute_window(VirtualBundle::new(m + 4, -4), d).unwrap();
        prop_assert_eq!(a.group, b.group);
    }
}

#[test]
fn reflection_window_vanishes() {
    let r = compute_window(VirtualBundle::new(-2, 2), 1).unwrap();
    let e2: Vec<(i64, i64, String)> = r
        .e2
        .iter()
        .filter(|e| e.p - e.t == 1 && !e.group.is_trivial())
        .map(|e| (e.p, e.t, e.generator.clone().unwrap()))
        .collect();
    assert_eq!(e2, vec![(2, 1, "Ūa^2".to_string()), (3, 2, "Ūa^3".to_string())]);
    let killers: Vec<((i64, i64), String)> =
        r.differentials.iter().filter(|d| d.nonzero && d.to.0 - d.to.1 == 1).map(|d| (d.from, d.image_of_generator.clone())).collect();
    assert_eq!(killers, vec![((0, 0), "Ūa^2".to_string()), ((1, 1), "Ūa^3".to_string())]);
    assert!(r.graded.is_empty());
    assert!(r.closed);
    assert_eq!(r.group, Some(FgAbGroup::trivial()));
    assert!(!r.extension_ambiguous);
    assert_eq!(r.phase_degree, 5);
}

#[test]
fn point_dictionary_matches_spin_column() {
    let spin = coeffsys::builtin("spin").unwrap();
    for q in 0..=3 {
        assert_eq!(truncated_ko(2 - q), spin.group_at("e", q).unwrap(), "q = {q}");
    }
}

#[test]
fn bundles_below_the_thom_class_are_empty() {
    let r = compute_window(VirtualBundle::new(3, 2), -20).unwrap();
    assert_eq!(r.group, Some(FgAbGroup::trivial()));
    assert!(r.e2.iter().all(|e| e.group.is_trivial()));
}

#[test]
fn truncation_is_reported() {
    assert!(matches!(compute_window(VirtualBundle::new(0, 0), 60), Err(ThomError::TruncationExceeded { .. })));
    assert!(compute_window(VirtualBundle::new(0, 0), 40).is_ok());
}
