mod common;

use std::collections::BTreeSet;

use common::*;
use hpt::ainfty::{compose_morphisms, identity_morphism, AInftyAlgebra};
use hpt::bar::{
    bar_decode_morphism, bar_encode, bar_encode_morphism, bar_encode_morphism_with, bar_encode_with,
    bar_morphism_check, bar_square_check, compare_algebra, compare_morphism,
};
use hpt::scalar::Field;
use hpt::transfer::transfer;

fn table(bits: u32, upto: usize) -> Vec<bool> {
    (1..=upto).map(|n| bits >> (n - 1) & 1 == 1).collect()
}

fn pattern(t: &[bool]) -> String {
    t.iter().map(|&b| if b { '-' } else { '+' }).collect()
}

/// Re-derives the coderivation sign table: among all tables with σ₁ = + only the constant
/// table and its (−1)^{n+1} twin make the corestrictions of transferred structures vanish.
#[test]
fn coderivation_sign_table_is_forced() {
    const UPTO: usize = 4;
    let mut structures: Vec<AInftyAlgebra> = Vec::new();
    for seed in 0..3 {
        let (a, ctx) = fixture(seed, Field::Rational, UPTO);
        structures.push(a.clone());
        structures.push((*transfer(&ctx, &a, UPTO).unwrap().nu).clone());
    }
    let mut survivors = BTreeSet::new();
    for bits in (0..1u32 << UPTO).filter(|b| b & 1 == 0) {
        let t = table(bits, UPTO);
        let ok = structures.iter().all(|a| {
            let b = bar_encode_with(a, &|n| t[n - 1]).unwrap();
            bar_square_check(&b, UPTO).unwrap().passed()
        });
        if ok {
            survivors.insert(pattern(&t));
        }
    }
    assert_eq!(survivors, BTreeSet::from(["++++".to_string(), "+-+-".to_string()]));
}

/// With σ constant, τ is forced to be constant + as well.
#[test]
fn morphism_sign_table_is_forced() {
    const UPTO: usize = 4;
    let mut runs = Vec::new();
    for seed in 0..3 {
        let (a, ctx) = fixture(seed, Field::Rational, UPTO);
        runs.push(transfer(&ctx, &a, UPTO).unwrap());
    }
    let mut survivors = BTreeSet::new();
    for bits in 0..1u32 << UPTO {
        let t = table(bits, UPTO);
        let ok = runs.iter().all(|r| {
            [&r.phi, &r.psi].iter().all(|m| {
                let f = bar_encode_morphism_with(m, UPTO, &|n| t[n - 1]).unwrap();
                let (src, tgt) = (bar_encode(&m.source).unwrap(), bar_encode(&m.target).unwrap());
                bar_morphism_check(&f, &src, &tgt, UPTO).unwrap().passed()
            })
        });
        if ok {
            survivors.insert(pattern(&t));
        }
    }
    assert_eq!(survivors, BTreeSet::from(["++++".to_string()]));
}

#[test]
fn decode_inverts_encode() {
    for field in fields() {
        let (a, ctx) = fixture(4, field, 4);
        let r = transfer(&ctx, &a, 4).unwrap();
        let f = bar_encode_morphism(&r.phi, 4).unwrap();
        let back = bar_decode_morphism(&f, r.phi.source.clone(), r.phi.target.clone()).unwrap();
        assert_eq!(back.comps(), r.phi.comps());
    }
}

#[test]
fn identity_is_a_unit_for_composition() {
    let (a, ctx) = fixture(5, Field::Rational, 4);
    let r = transfer(&ctx, &a, 4).unwrap();
    let left = compose_morphisms(&identity_morphism(&r.phi.target), &r.phi, 4).unwrap();
    let right = compose_morphisms(&r.phi, &identity_morphism(&r.phi.source), 4).unwrap();
    assert_eq!(left.comps(), r.phi.comps());
    assert_eq!(right.comps(), r.phi.comps());
}

#[test]
fn composition_is_associative() {
    let (a, ctx) = fixture(6, Field::prime(101).unwrap(), 4);
    let r = transfer(&ctx, &a, 4).unwrap();
    let (phi, psi) = (&*r.phi, &*r.psi);
    let left = compose_morphisms(&compose_morphisms(phi, psi, 4).unwrap(), phi, 4).unwrap();
    let right = compose_morphisms(phi, &compose_morphisms(psi, phi, 4).unwrap(), 4).unwrap();
    assert_eq!(left.comps(), right.comps());
}

#[test]
fn verdicts_agree_on_broken_structures() {
    for field in fields() {
        let (a, ctx) = fixture(7, field, 4);
        let r = transfer(&ctx, &a, 4).unwrap();
        let mut failing = 0;
        for (s, n) in [&a, &*r.nu].iter().flat_map(|s| s.ops().keys().map(move |&n| (*s, n))) {
            let mut ops = s.ops().clone();
            let m = ops[&n].scale(&field.from_i64(2));
            ops.insert(n, m);
            let broken = AInftyAlgebra::new(s.complex.clone(), ops, 4).unwrap();
            let c = compare_algebra(&broken, 4).unwrap();
            failing += !c.axioms.passed() as usize;
            assert!(c.agree(), "{field} nu_{n}");
        }
        assert!(failing > 0);
        let ok = compare_morphism(&r.psi, 4).unwrap();
        assert!(ok.axioms.passed() && ok.bar.passed());
    }
}
