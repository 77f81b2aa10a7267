//! Randomized invariants.

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use codestat::code::{is_closed_under_subtraction, make_linear_code, random_code, Code, GeneratorMatrix};
use codestat::measures::{
    check_semimeasure, pushforward_semimeasure, ruelle_apply, CylinderFunction, MeasureClass, MonotoneMap, Potential,
};
use codestat::plane::{cone_partition, empirical_envelope, lower_cone_contains, spoil_descendants, Cone, CodePoint};
use codestat::spoiling::{apply_spoiling, letter_classes, numeric_spoil, SpoilKind, SpoilOp};

const DEN: i64 = 24;

/// A point strictly inside `R + δ < 1` on a `1/DEN` grid.
fn inner_point() -> impl Strategy<Value = CodePoint> {
    (0..DEN, 0..DEN)
        .prop_filter("inside", |(r, d)| r + d < DEN)
        .prop_map(|(r, d)| CodePoint::from_ratios((r, DEN), (d, DEN)).unwrap())
}

fn small_code() -> impl Strategy<Value = Code> {
    (prop::sample::select(vec![2u32, 3, 5]), 2usize..7, 2usize..24, any::<u64>()).prop_map(|(q, n, size, seed)| {
        let cap = (q as usize).pow(n as u32);
        random_code(q, n, size.min(cap), seed).unwrap()
    })
}

fn linear_code() -> impl Strategy<Value = Code> {
    (prop::sample::select(vec![2u32, 3, 5]), 2usize..6)
        .prop_flat_map(|(q, n)| {
            (Just(q), prop::collection::vec(prop::collection::vec(0..q, n), 1..3))
        })
        .prop_filter_map("full rank", |(q, rows)| GeneratorMatrix::new(q, rows).ok())
        .prop_map(|g| make_linear_code(&g).unwrap())
}

fn grid() -> Vec<BigRational> {
    (0..=DEN).map(|i| BigRational::new(i.into(), DEN.into())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_reflexive(p in inner_point()) {
        prop_assert!(lower_cone_contains(&p, &p).unwrap());
        let all = cone_partition(&p, &p).unwrap();
        prop_assert_eq!(all.iter().count(), 4);
    }

    #[test]
    fn cone_transitive(p in inner_point(), q in inner_point(), s in inner_point()) {
        if lower_cone_contains(&p, &q).unwrap() && lower_cone_contains(&q, &s).unwrap() {
            prop_assert!(lower_cone_contains(&p, &s).unwrap());
        }
    }

    #[test]
    fn upper_lower_duality(p in inner_point(), q in inner_point()) {
        let lower = lower_cone_contains(&p, &q).unwrap();
        prop_assert_eq!(lower, cone_partition(&q, &p).unwrap().contains(Cone::Upper));
    }

    #[test]
    fn envelope_idempotent(points in prop::collection::vec(inner_point(), 1..12)) {
        let env = empirical_envelope(&points).unwrap().envelope;
        let again = empirical_envelope(&env.vertices).unwrap().envelope;
        prop_assert_eq!(&again, &env);
        for p in &points {
            prop_assert!(env.value_at(&p.delta) >= p.rate);
        }
    }

    #[test]
    fn envelope_monotone(points in prop::collection::vec(inner_point(), 2..12), cut in 1usize..11) {
        let cut = cut.min(points.len() - 1);
        let sub = empirical_envelope(&points[..cut]).unwrap().envelope;
        let sup = empirical_envelope(&points).unwrap().envelope;
        let mut xs = grid();
        xs.extend(sub.polyline().into_iter().map(|(x, _)| x));
        xs.extend(sup.polyline().into_iter().map(|(x, _)| x));
        for x in xs {
            prop_assert!(sub.value_at(&x) <= sup.value_at(&x));
        }
    }

    #[test]
    fn singleton_bound(c in small_code()) {
        if c.size() >= 2 {
            prop_assert_eq!(c.satisfies_singleton(), Some(true));
        }
    }

    #[test]
    fn letter_classes_partition(c in small_code(), i in 0usize..6) {
        let i = i % c.n();
        prop_assert_eq!(letter_classes(&c, i).unwrap().iter().sum::<usize>(), c.size());
    }

    #[test]
    fn restrict_zero_keeps_linearity(c in linear_code(), i in 0usize..5) {
        let i = i % c.n();
        let r = apply_spoiling(&c, &SpoilOp::Restrict { letter: 0, position: i }).unwrap();
        prop_assert!(is_closed_under_subtraction(&r));
    }

    #[test]
    fn pad_contract(c in small_code()) {
        prop_assume!(c.size() >= 2);
        let s = numeric_spoil(&c, SpoilKind::Pad).unwrap().code;
        prop_assert_eq!(s.n(), c.n() + 1);
        prop_assert_eq!(s.size(), c.size());
        prop_assert_eq!(s.min_distance().unwrap(), c.min_distance().unwrap());
    }

    #[test]
    fn descendants_grow(c in small_code()) {
        prop_assume!(c.size() >= 2 && c.n() <= 5);
        let one = spoil_descendants(&c, 1).unwrap();
        let two = spoil_descendants(&c, 2).unwrap();
        prop_assert!(one.iter().all(|p| two.contains(p)));
    }

    #[test]
    fn pushforward_is_multiplicative(table in prop::collection::vec(prop::option::of(0usize..3), 4)) {
        let f = MonotoneMap::new(2, 2, 3, table).unwrap();
        let mu = pushforward_semimeasure::<BigRational>(&f, 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let lhs = mu.value(&[a, b, c]).unwrap();
                    let rhs = mu.value(&[a]).unwrap() * mu.value(&[b]).unwrap() * mu.value(&[c]).unwrap();
                    prop_assert_eq!(lhs, &rhs);
                }
            }
        }
        let total = mu.layer_mass(1);
        let class = check_semimeasure(&mu);
        if total.is_one() {
            prop_assert_eq!(class, MeasureClass::Measure);
        } else {
            prop_assert_eq!(class, MeasureClass::Semimeasure);
        }
    }

    #[test]
    fn keane_fixes_constants(raw in prop::collection::vec(0.01f64..1.0, 2..6), depth in 1usize..4) {
        let total: f64 = raw.iter().sum();
        let pot = Potential::from_weights(raw.iter().map(|w| w / total).collect()).unwrap();
        let one = CylinderFunction::constant(raw.len(), depth, 1.0).unwrap();
        let out = ruelle_apply(&pot, &one).unwrap();
        prop_assert!(out.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}
