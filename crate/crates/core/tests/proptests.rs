mod common;

use std::sync::Arc;

use common::fixture;
use hpt::document::{Document, MapDecl};
use hpt::map::{decode, koszul_apply, GradedVector, MultilinearMap};
use hpt::scalar::Field;
use hpt::space::GradedSpace;
use proptest::prelude::*;

fn field_of(prime: bool) -> Field {
    if prime {
        Field::prime(101).unwrap()
    } else {
        Field::Rational
    }
}

/// A map of the given shape whose coefficients are read off `coeffs` in order, cycling.
fn map_from(field: Field, space: &Arc<GradedSpace>, arity: usize, degree: i32, coeffs: &[i8]) -> MultilinearMap {
    let dim = space.dim() as u64;
    let mut b = MultilinearMap::builder(field, space.clone(), space.clone(), arity, degree);
    let mut next = coeffs.iter().cycle();
    for code in 0..dim.pow(arity as u32) {
        let ins = decode(dim, arity, code);
        let deg = ins.iter().map(|&g| space.degree(g)).sum::<i32>() + degree;
        for o in space.basis_in(deg) {
            let c = *next.next().unwrap();
            if c != 0 {
                b.add(&ins, &[o], field.from_i64(c as i64));
            }
        }
    }
    b.build().unwrap()
}

fn space() -> impl Strategy<Value = Arc<GradedSpace>> {
    prop::collection::vec(0usize..=2, 3)
        .prop_filter("nonzero space", |d| d.iter().sum::<usize>() > 0)
        .prop_map(|d| Arc::new(GradedSpace::new((-1..=1).zip(d).collect())))
}

fn coeffs() -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(-2i8..=2, 1..24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_field_axioms(prime: bool, a in -500i64..500, b in -500i64..500, c in -500i64..500) {
        let k = field_of(prime);
        let (x, y, z) = (k.from_i64(a), k.from_i64(b), k.from_i64(c));
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert!(x.sub(&x).is_zero());
        if !y.is_zero() {
            prop_assert_eq!(x.div(&y).mul(&y), x.clone());
            prop_assert!(y.mul(&y.inv()).is_one());
        }
        prop_assert_eq!(k.parse_scalar(&x.to_string()).unwrap(), x);
    }

    /// (f⊗g)∘(f'⊗g') = (−1)^{|g||f'|} (ff')⊗(gg').
    #[test]
    fn koszul_interchange(
        prime: bool, s in space(), degs in prop::collection::vec(-1i32..=1, 4), c in coeffs(), d in coeffs(),
    ) {
        let k = field_of(prime);
        let m: Vec<MultilinearMap> = degs.iter().enumerate()
            .map(|(i, &deg)| map_from(k, &s, 1, deg, if i % 2 == 0 { &c } else { &d }))
            .collect();
        let (f, g, f2, g2) = (&m[0], &m[1], &m[2], &m[3]);
        let lhs = MultilinearMap::compose(
            &MultilinearMap::tensor_many(&[f, g]).unwrap(),
            &MultilinearMap::tensor_many(&[f2, g2]).unwrap(),
        ).unwrap();
        let ff = MultilinearMap::compose(f, f2).unwrap();
        let gg = MultilinearMap::compose(g, g2).unwrap();
        let rhs = MultilinearMap::tensor_many(&[&ff, &gg]).unwrap()
            .scale(&k.sign((g.degree() * f2.degree()) & 1 == 1));
        prop_assert_eq!(lhs, rhs);
    }

    /// Applying f⊗g as one map agrees with evaluating the factors on elements.
    #[test]
    fn tensor_agrees_with_elementwise_application(
        s in space(), df in -1i32..=1, dg in -1i32..=1, c in coeffs(), x in any::<u32>(), y in any::<u32>(),
    ) {
        let k = Field::Rational;
        let f = map_from(k, &s, 1, df, &c);
        let g = map_from(k, &s, 2, dg, &c);
        let n = s.dim() as u32;
        let v: Vec<GradedVector> = [x % n, y % n, (x ^ y) % n].iter().map(|&i| GradedVector::basis(s.clone(), k, i)).collect();
        let direct = koszul_apply(&[&f, &g], &v).unwrap();
        let joined = MultilinearMap::tensor_many(&[&f, &g]).unwrap().apply(&v).unwrap();
        prop_assert_eq!(direct, joined);
    }

    #[test]
    fn composition_is_associative_and_unital(
        s in space(), degs in prop::collection::vec(-1i32..=1, 3), c in coeffs(),
    ) {
        let k = Field::Rational;
        let a = map_from(k, &s, 2, degs[0], &c);
        let b = map_from(k, &s, 1, degs[1], &c[c.len() / 2..]);
        let e = map_from(k, &s, 2, degs[2], &c);
        let id = MultilinearMap::identity(k, s.clone());
        let left = MultilinearMap::compose_blocks(&MultilinearMap::compose_blocks(&a, &[&b, &id]).unwrap(), &[&id, &e]).unwrap();
        let inner = MultilinearMap::compose_blocks(&a, &[&b, &e]).unwrap();
        prop_assert_eq!(left, inner);
        prop_assert_eq!(MultilinearMap::compose(&id, &a).unwrap(), a.clone());
        prop_assert_eq!(MultilinearMap::compose_blocks(&a, &[&id, &id]).unwrap(), a);
    }

    #[test]
    fn hom_differential_squares_to_zero(seed in 0u64..40, arity in 1usize..=3, deg in -1i32..=2, c in coeffs()) {
        let (a, _) = fixture(seed, Field::Rational, 3);
        let d = &a.complex.diff;
        let f = map_from(Field::Rational, &a.complex.space, arity, deg, &c);
        let df = MultilinearMap::hom_differential(&f, d, d).unwrap();
        prop_assert!(MultilinearMap::hom_differential(&df, d, d).unwrap().is_zero());
    }

    /// δ(F ∘ᵢ G) = δF ∘ᵢ G + (−1)^{|F|} F ∘ᵢ δG.
    #[test]
    fn hom_differential_is_a_derivation(
        seed in 0u64..40, slot in 1usize..=2, df in -1i32..=1, dg in -1i32..=1, c in coeffs(), e in coeffs(),
    ) {
        let k = Field::prime(101).unwrap();
        let (a, _) = fixture(seed, k, 3);
        let d = &a.complex.diff;
        let f = map_from(k, &a.complex.space, 2, df, &c);
        let g = map_from(k, &a.complex.space, 2, dg, &e);
        let delta = |m: &MultilinearMap| MultilinearMap::hom_differential(m, d, d).unwrap();
        let lhs = delta(&MultilinearMap::compose_insert(&f, &g, slot).unwrap());
        let rhs = MultilinearMap::compose_insert(&delta(&f), &g, slot).unwrap().add_scaled(
            &MultilinearMap::compose_insert(&f, &delta(&g), slot).unwrap(),
            &k.sign(df & 1 == 1),
        ).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn documents_round_trip(prime: bool, s in space(), arity in 1usize..=3, deg in -2i32..=2, c in coeffs()) {
        let k = field_of(prime);
        let m = map_from(k, &s, arity, deg, &c);
        let mut doc = Document::new(k, 3);
        doc.spaces.insert("S".into(), s);
        doc.maps.insert("m".into(), MapDecl { source: "S".into(), target: "S".into(), map: m });
        let text = doc.to_string_pretty();
        let back = Document::parse(&text).unwrap();
        prop_assert_eq!(back.to_string_pretty(), text);
        prop_assert_eq!(&back.maps["m"], &doc.maps["m"]);
    }
}
