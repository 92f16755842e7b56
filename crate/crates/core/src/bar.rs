//! Tensor-coalgebra encoding on the suspension sV (degrees raised by one).
//!
//! A structure μ becomes the coderivation with components b_n = σ_n·s∘μ_n∘(s⁻¹)^{⊗n},
//! b₁ = σ₁·s∘∂∘s⁻¹; a morphism φ becomes the coalgebra map with components
//! F_n = τ_n·s∘φ_n∘(s⁻¹)^{⊗n}. The sign tables σ, τ are frozen constants.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainfty::{AInftyAlgebra, AInftyMorphism};
use crate::error::{Error, Result};
use crate::index::compositions;
use crate::map::MultilinearMap;
use crate::report::Report;
use crate::scalar::Field;
use crate::space::GradedSpace;

/// Per-arity sign σ_n of the coderivation components. Every σ_n is +; the table was
/// pinned by requiring the square-zero corestrictions to vanish on transferred structures
/// over all 2⁵ candidate tables (the only other solutions are the symmetries b ↦ −b and
/// b_n ↦ (−1)ⁿb_n).
pub fn coderivation_sign(_n: usize) -> bool {
    false
}

/// Per-arity sign τ_n of coalgebra morphism components, pinned the same way against the
/// commutation b∘F = F∘b for transferred morphisms.
pub fn morphism_sign(_n: usize) -> bool {
    false
}

#[derive(Clone, Debug)]
pub struct Suspension {
    pub base: Arc<GradedSpace>,
    pub shifted: Arc<GradedSpace>,
    pub up: MultilinearMap,
    pub down: MultilinearMap,
}

impl Suspension {
    pub fn new(field: Field, base: Arc<GradedSpace>) -> Suspension {
        let shifted = Arc::new(base.shifted(1));
        let mut up = MultilinearMap::builder(field, base.clone(), shifted.clone(), 1, 1);
        let mut down = MultilinearMap::builder(field, shifted.clone(), base.clone(), 1, -1);
        for g in 0..base.dim() as u32 {
            up.add(&[g], &[g], field.one());
            down.add(&[g], &[g], field.one());
        }
        Suspension {
            base,
            shifted,
            up: up.build().expect("suspension is homogeneous"),
            down: down.build().expect("desuspension is homogeneous"),
        }
    }

    /// s∘m∘(s⁻¹)^{⊗n} for a map from this space to `target`.
    fn conjugate(&self, m: &MultilinearMap, target: &Suspension) -> Result<MultilinearMap> {
        let downs = vec![&self.down; m.arity()];
        let inner = MultilinearMap::compose_blocks(m, &downs)?;
        MultilinearMap::compose(&target.up, &inner)
    }

    /// s⁻¹∘m∘s^{⊗n}, the inverse of `conjugate` up to (−1)^{n(n−1)/2}.
    fn unconjugate(&self, m: &MultilinearMap, target: &Suspension) -> Result<MultilinearMap> {
        let ups = vec![&self.up; m.arity()];
        let inner = MultilinearMap::compose_blocks(m, &ups)?;
        MultilinearMap::compose(&target.down, &inner)
    }
}

/// Components b₁…b_cap of the coderivation encoding an A∞-structure.
#[derive(Clone, Debug)]
pub struct BarObject {
    pub suspension: Suspension,
    pub comps: BTreeMap<usize, MultilinearMap>,
    pub cap: usize,
}

impl BarObject {
    pub fn comp(&self, n: usize) -> Option<&MultilinearMap> {
        self.comps.get(&n)
    }
}

pub fn bar_encode(a: &AInftyAlgebra) -> Result<BarObject> {
    bar_encode_with(a, &coderivation_sign)
}

pub fn bar_encode_with(a: &AInftyAlgebra, signs: &dyn Fn(usize) -> bool) -> Result<BarObject> {
    let field = a.field();
    let s = Suspension::new(field, a.space().clone());
    let mut comps = BTreeMap::new();
    for n in 1..=a.cap {
        let m = if n == 1 { a.diff().clone() } else { a.op_or_zero(n) };
        let b = s.conjugate(&m, &s)?;
        if !b.is_zero() {
            comps.insert(n, b.scale(&field.sign(signs(n))));
        }
    }
    Ok(BarObject { suspension: s, comps, cap: a.cap })
}

/// Arity-m corestriction of the square: Σ_{k+l=m+1} Σ_i b_k(id^{i−1}⊗b_l⊗id^{k−i}).
pub fn bar_square_residual(b: &BarObject, m: usize) -> Result<MultilinearMap> {
    let field = b.suspension.up.field();
    let sp = b.suspension.shifted.clone();
    let mut res = MultilinearMap::zero(field, sp.clone(), sp, m, -2);
    for k in 1..=m {
        let l = m + 1 - k;
        let (Some(bk), Some(bl)) = (b.comp(k), b.comp(l)) else { continue };
        for i in 1..=k {
            res = res.add(&MultilinearMap::compose_insert(bk, bl, i)?)?;
        }
    }
    Ok(res)
}

pub fn bar_square_check(b: &BarObject, up_to: usize) -> Result<Report> {
    let mut rep = Report::new();
    for m in 1..=up_to {
        rep.residual("bar-square", m, &bar_square_residual(b, m)?);
    }
    Ok(rep)
}

/// Components F₁…F_cap of a coalgebra morphism between suspensions.
#[derive(Clone, Debug)]
pub struct BarMorphism {
    pub source: Suspension,
    pub target: Suspension,
    pub comps: BTreeMap<usize, MultilinearMap>,
}

impl BarMorphism {
    fn comp_or_zero(&self, n: usize) -> MultilinearMap {
        self.comps.get(&n).cloned().unwrap_or_else(|| {
            MultilinearMap::zero(self.source.up.field(), self.source.shifted.clone(), self.target.shifted.clone(), n, 0)
        })
    }
}

pub fn bar_encode_morphism(phi: &AInftyMorphism, up_to: usize) -> Result<BarMorphism> {
    bar_encode_morphism_with(phi, up_to, &morphism_sign)
}

pub fn bar_encode_morphism_with(phi: &AInftyMorphism, up_to: usize, signs: &dyn Fn(usize) -> bool) -> Result<BarMorphism> {
    let field = phi.field();
    let src = Suspension::new(field, phi.source.space().clone());
    let tgt = Suspension::new(field, phi.target.space().clone());
    let mut comps = BTreeMap::new();
    for (&n, m) in phi.comps() {
        if n <= up_to {
            comps.insert(n, src.conjugate(m, &tgt)?.scale(&field.sign(signs(n))));
        }
    }
    Ok(BarMorphism { source: src, target: tgt, comps })
}

pub fn bar_decode_morphism(
    f: &BarMorphism,
    source: Arc<AInftyAlgebra>,
    target: Arc<AInftyAlgebra>,
) -> Result<AInftyMorphism> {
    let field = f.source.up.field();
    let mut comps = BTreeMap::new();
    for (&n, m) in &f.comps {
        let odd = morphism_sign(n) ^ ((n * (n - 1) / 2) % 2 == 1);
        comps.insert(n, f.source.unconjugate(m, &f.target)?.scale(&field.sign(odd)));
    }
    AInftyMorphism::new(source, target, comps)
}

/// Σ_{k, r} b^W_k(F_{r₁}⊗…⊗F_{r_k}) − Σ_{k+l=m+1} Σ_i F_k(id^{i−1}⊗b^V_l⊗id^{k−i}).
pub fn bar_morphism_residual(f: &BarMorphism, src: &BarObject, tgt: &BarObject, m: usize) -> Result<MultilinearMap> {
    let field = f.source.up.field();
    let mut res = MultilinearMap::zero(field, f.source.shifted.clone(), f.target.shifted.clone(), m, -1);
    for k in 1..=m {
        let Some(bk) = tgt.comp(k) else { continue };
        for r in compositions(m, k) {
            let blocks: Vec<MultilinearMap> = r.iter().map(|&x| f.comp_or_zero(x)).collect();
            if blocks.iter().any(|b| b.is_zero()) {
                continue;
            }
            let refs: Vec<&MultilinearMap> = blocks.iter().collect();
            res = res.add(&MultilinearMap::compose_blocks(bk, &refs)?)?;
        }
    }
    for k in 1..=m {
        let l = m + 1 - k;
        let (Some(fk), Some(bl)) = (f.comps.get(&k), src.comp(l)) else { continue };
        for i in 1..=k {
            res = res.sub(&MultilinearMap::compose_insert(fk, bl, i)?)?;
        }
    }
    Ok(res)
}

pub fn bar_morphism_check(f: &BarMorphism, src: &BarObject, tgt: &BarObject, up_to: usize) -> Result<Report> {
    let mut rep = Report::new();
    for m in 1..=up_to {
        rep.residual("bar-morphism", m, &bar_morphism_residual(f, src, tgt, m)?);
    }
    Ok(rep)
}

/// (G∘F)_m = Σ_{k, r} G_k(F_{r₁}⊗…⊗F_{r_k}).
pub fn bar_compose(g: &BarMorphism, f: &BarMorphism, up_to: usize) -> Result<BarMorphism> {
    if !f.target.shifted.same_shape(&g.source.shifted) {
        return Err(Error::Mismatch("coalgebra morphisms do not compose".into()));
    }
    let mut comps = BTreeMap::new();
    for m in 1..=up_to {
        let mut acc = MultilinearMap::zero(f.source.up.field(), f.source.shifted.clone(), g.target.shifted.clone(), m, 0);
        for k in 1..=m {
            let Some(gk) = g.comps.get(&k) else { continue };
            for r in compositions(m, k) {
                let blocks: Vec<MultilinearMap> = r.iter().map(|&x| f.comp_or_zero(x)).collect();
                if blocks.iter().any(|b| b.is_zero()) {
                    continue;
                }
                let refs: Vec<&MultilinearMap> = blocks.iter().collect();
                acc = acc.add(&MultilinearMap::compose_blocks(gk, &refs)?)?;
            }
        }
        if !acc.is_zero() {
            comps.insert(m, acc);
        }
    }
    Ok(BarMorphism { source: f.source.clone(), target: g.target.clone(), comps })
}

/// Axiom-checker verdicts beside the corresponding bar-construction verdicts.
#[derive(Clone, Debug)]
pub struct OracleComparison {
    pub axioms: Report,
    pub bar: Report,
}

impl OracleComparison {
    /// Same verdict at every arity both reports cover.
    pub fn agree(&self) -> bool {
        let bar: BTreeMap<usize, bool> = self.bar.verdicts().into_iter().collect();
        self.axioms.verdicts().iter().all(|(m, v)| bar.get(m).is_none_or(|b| b == v))
    }
}

/// A∞ relations against the square-zero corestrictions, arities 2..=up_to.
pub fn compare_algebra(a: &AInftyAlgebra, up_to: usize) -> Result<OracleComparison> {
    let axioms = crate::ainfty::check_ainfty(a, up_to)?;
    let bar = bar_square_check(&bar_encode(a)?, up_to)?;
    Ok(OracleComparison { axioms, bar })
}

/// Morphism relations against the commutation of the encoded coalgebra map.
pub fn compare_morphism(phi: &AInftyMorphism, up_to: usize) -> Result<OracleComparison> {
    let axioms = crate::ainfty::check_morphism(phi, up_to)?;
    let f = bar_encode_morphism(phi, up_to)?;
    let bar = bar_morphism_check(&f, &bar_encode(&phi.source)?, &bar_encode(&phi.target)?, up_to)?;
    Ok(OracleComparison { axioms, bar })
}
