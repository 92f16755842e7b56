mod common;

use std::collections::BTreeMap;

use common::*;
use hpt::ainfty::AInftyAlgebra;
use hpt::fixtures::{chain_isomorphism, e1_algebra, matrix_dga, perturb_homotopy, rng64};
use hpt::map::MultilinearMap;
use hpt::scalar::Field;
use hpt::transfer::{
    check_kernel_identities, check_side_conditions, kernel_term_count, transfer, transfer_structure, transfer_with,
    ContractionData, KernelKind, KernelMethod,
};

#[test]
fn closure_on_a_few_fixtures() {
    for field in fields() {
        for seed in 0..3 {
            let (a, ctx) = fixture(seed, field, 4);
            let r = transfer(&ctx, &a, 4).unwrap();
            assert!(r.check(4).unwrap().passed(), "{field} {seed}");
            assert!(check_kernel_identities(&ctx, &a, 4).unwrap().passed());
        }
    }
}

#[test]
fn methods_agree() {
    let (a, ctx) = fixture(11, Field::Rational, 4);
    let i = transfer_with(&ctx, &a, 4, KernelMethod::Inductive).unwrap();
    let t = transfer_with(&ctx, &a, 4, KernelMethod::Trees).unwrap();
    assert_eq!(*i.nu, *t.nu);
    assert_eq!(i.phi.comps(), t.phi.comps());
    assert_eq!(i.homotopy.comps(), t.homotopy.comps());
    assert!(transfer_with(&ctx, &a, 4, KernelMethod::Both).is_ok());
}

#[test]
fn structure_only_path_matches() {
    let (a, ctx) = fixture(2, Field::prime(101).unwrap(), 4);
    assert_eq!(transfer_structure(&ctx, &a, 4).unwrap(), *transfer(&ctx, &a, 4).unwrap().nu);
}

#[test]
fn low_components_are_the_contraction() {
    let (a, ctx) = fixture(1, Field::Rational, 3);
    let r = transfer(&ctx, &a, 3).unwrap();
    assert_eq!(r.phi.comp_or_zero(1), ctx.f);
    assert_eq!(r.psi.comp_or_zero(1), ctx.g);
    assert_eq!(r.homotopy.comp_or_zero(1), ctx.h);
    let nu2 = MultilinearMap::compose(&ctx.f, &MultilinearMap::compose_blocks(&a.op_or_zero(2), &[&ctx.g, &ctx.g]).unwrap()).unwrap();
    assert_eq!(r.nu.op_or_zero(2), nu2);
}

#[test]
fn term_counts() {
    let p: Vec<usize> = (2..=5).map(|n| kernel_term_count(KernelKind::P, n)).collect();
    assert_eq!(p, [1, 3, 7, 15]);
    assert_eq!(kernel_term_count(KernelKind::Q, 2), 2);
}

#[test]
fn invalid_contraction_is_rejected() {
    let (a, ctx) = fixture(0, Field::Rational, 3);
    let bad = ContractionData::new_unchecked(ctx.v.clone(), ctx.w.clone(), ctx.f.clone(), ctx.g.clone(), ctx.h.neg(), None);
    let err = transfer(&bad, &a, 3).unwrap_err().to_string();
    assert!(err.contains("δ(h)"), "{err}");
}

#[test]
fn broken_input_structure_is_rejected() {
    let (a, ctx) = fixture(0, Field::Rational, 3);
    let mut ops = a.ops().clone();
    let m2 = ops[&2].scale(&Field::Rational.from_i64(3));
    ops.insert(2, m2);
    let broken = AInftyAlgebra::new(a.complex.clone(), ops, 3).unwrap();
    assert!(!hpt::ainfty::check_ainfty(&broken, 3).unwrap().passed());
    let err = transfer(&ctx, &broken, 3).unwrap_err().to_string();
    assert!(err.contains("A∞ relation"), "{err}");
}

#[test]
fn perturbed_homotopy_still_transfers() {
    let (a, ctx) = fixture(8, Field::Rational, 4);
    let p = perturb_homotopy(&mut rng64(8), &ctx, 2).unwrap();
    assert!(!check_side_conditions(&p).unwrap().passed());
    assert!(transfer(&p, &a, 4).unwrap().check(4).unwrap().passed());
}

#[test]
fn classical_limit_on_a_dga() {
    let mut rng = rng64(77);
    let dga = matrix_dga(&mut rng, Field::Rational, &[0, 0, 1, 2], 4).unwrap();
    let ctx = chain_isomorphism(&mut rng, &dga.complex).unwrap();
    let r = transfer(&ctx, &dga, 4).unwrap();
    assert_eq!(r.nu.ops().keys().copied().collect::<Vec<_>>(), [2]);
}

#[test]
fn transfer_to_zero_is_zero() {
    let q = Field::Rational;
    let a = e1_algebra(q, 4);
    let ctx = hpt::minimal::contraction_from_hodge(&hpt::minimal::hodge_decompose(&a.complex).unwrap()).unwrap();
    let r = transfer(&ctx, &a, 4).unwrap();
    assert!(r.nu.ops().is_empty());
    assert!(r.check(4).unwrap().passed());
    assert_eq!(r.nu.space().dims(), &BTreeMap::new());
}
