use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bar;
use crate::error::{Error, Result};
use crate::index::{compositions, enumerate_index_set, index_set_a_with_unary, IndexKind, IndexTuple};
use crate::map::{check_complex, MultilinearMap};
use crate::report::Report;
use crate::scalar::Field;
use crate::space::GradedSpace;

pub use crate::index::theta_sign;

pub const DEFAULT_CAP: usize = 6;

/// A chain complex: space plus a degree −1 differential squaring to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub space: Arc<GradedSpace>,
    pub diff: MultilinearMap,
}

impl Complex {
    pub fn new(space: Arc<GradedSpace>, diff: MultilinearMap) -> Result<Complex> {
        let rep = check_complex(&space, &diff)?;
        if let Some(k) = rep.violations.first() {
            return Err(Error::Invariant(format!("∂∘∂ ≠ 0 on basis element {k}")));
        }
        Ok(Complex { space, diff })
    }

    pub fn with_zero_differential(field: Field, space: Arc<GradedSpace>) -> Complex {
        let diff = MultilinearMap::zero(field, space.clone(), space.clone(), 1, -1);
        Complex { space, diff }
    }

    pub fn field(&self) -> Field {
        self.diff.field()
    }

    pub fn identity(&self) -> MultilinearMap {
        MultilinearMap::identity(self.field(), self.space.clone())
    }
}

fn shape_check(m: &MultilinearMap, src: &GradedSpace, tgt: &GradedSpace, arity: usize, degree: i32, what: &str) -> Result<()> {
    if m.arity() != arity || m.out_arity() != 1 {
        return Err(Error::Invariant(format!("{what} must have arity {arity}, found {}", m.arity())));
    }
    if m.degree() != degree {
        return Err(Error::Invariant(format!(
            "{what} must have degree {degree} (the A∞ degree rule), found {}",
            m.degree()
        )));
    }
    if !m.source().same_shape(src) || !m.target().same_shape(tgt) {
        return Err(Error::Mismatch(format!("{what} has the wrong source or target")));
    }
    Ok(())
}

/// Truncated A∞-structure μ = (μ₂, …, μ_cap) on a complex. Absent operations are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInftyAlgebra {
    pub complex: Complex,
    ops: BTreeMap<usize, MultilinearMap>,
    pub cap: usize,
}

impl AInftyAlgebra {
    pub fn new(complex: Complex, ops: BTreeMap<usize, MultilinearMap>, cap: usize) -> Result<AInftyAlgebra> {
        for (&n, m) in &ops {
            if n < 2 || n > cap {
                return Err(Error::Invariant(format!("operation μ_{n} outside 2..={cap}")));
            }
            shape_check(m, &complex.space, &complex.space, n, n as i32 - 2, &format!("μ_{n}"))?;
        }
        let ops = ops.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(AInftyAlgebra { complex, ops, cap })
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.complex.space
    }

    pub fn diff(&self) -> &MultilinearMap {
        &self.complex.diff
    }

    pub fn op(&self, n: usize) -> Option<&MultilinearMap> {
        self.ops.get(&n)
    }

    pub fn ops(&self) -> &BTreeMap<usize, MultilinearMap> {
        &self.ops
    }

    pub fn op_or_zero(&self, n: usize) -> MultilinearMap {
        self.ops.get(&n).cloned().unwrap_or_else(|| {
            MultilinearMap::zero(self.field(), self.space().clone(), self.space().clone(), n, n as i32 - 2)
        })
    }

    /// Keeps μ_n for n ≤ cap.
    pub fn truncated(&self, cap: usize) -> AInftyAlgebra {
        AInftyAlgebra {
            complex: self.complex.clone(),
            ops: self.ops.iter().filter(|(&n, _)| n <= cap).map(|(&n, m)| (n, m.clone())).collect(),
            cap,
        }
    }
}

/// Components φ₁, …, φ_cap of an A∞-morphism.
#[derive(Clone, Debug)]
pub struct AInftyMorphism {
    pub source: Arc<AInftyAlgebra>,
    pub target: Arc<AInftyAlgebra>,
    comps: BTreeMap<usize, MultilinearMap>,
}

impl AInftyMorphism {
    pub fn new(
        source: Arc<AInftyAlgebra>,
        target: Arc<AInftyAlgebra>,
        comps: BTreeMap<usize, MultilinearMap>,
    ) -> Result<AInftyMorphism> {
        for (&n, m) in &comps {
            if n == 0 {
                return Err(Error::Invariant("morphism components start at arity 1".into()));
            }
            shape_check(m, source.space(), target.space(), n, n as i32 - 1, &format!("φ_{n}"))?;
        }
        let comps = comps.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(AInftyMorphism { source, target, comps })
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    pub fn comp(&self, n: usize) -> Option<&MultilinearMap> {
        self.comps.get(&n)
    }

    pub fn comps(&self) -> &BTreeMap<usize, MultilinearMap> {
        &self.comps
    }

    pub fn comp_or_zero(&self, n: usize) -> MultilinearMap {
        self.comps.get(&n).cloned().unwrap_or_else(|| {
            MultilinearMap::zero(self.field(), self.source.space().clone(), self.target.space().clone(), n, n as i32 - 1)
        })
    }
}

/// Components H₁, …, H_cap of an A∞-homotopy between ψφ and the identity of φ's source.
#[derive(Clone, Debug)]
pub struct AInftyHomotopy {
    pub phi: Arc<AInftyMorphism>,
    pub psi: Arc<AInftyMorphism>,
    comps: BTreeMap<usize, MultilinearMap>,
}

impl AInftyHomotopy {
    pub fn new(
        phi: Arc<AInftyMorphism>,
        psi: Arc<AInftyMorphism>,
        comps: BTreeMap<usize, MultilinearMap>,
    ) -> Result<AInftyHomotopy> {
        let v = phi.source.space().clone();
        if !psi.target.space().same_shape(&v) || !psi.source.space().same_shape(phi.target.space()) {
            return Err(Error::Mismatch("homotopy endpoints do not compose to an endomorphism".into()));
        }
        for (&n, m) in &comps {
            if n == 0 {
                return Err(Error::Invariant("homotopy components start at arity 1".into()));
            }
            shape_check(m, &v, &v, n, n as i32, &format!("H_{n}"))?;
        }
        let comps = comps.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(AInftyHomotopy { phi, psi, comps })
    }

    pub fn algebra(&self) -> &Arc<AInftyAlgebra> {
        &self.phi.source
    }

    pub fn comp(&self, n: usize) -> Option<&MultilinearMap> {
        self.comps.get(&n)
    }

    pub fn comps(&self) -> &BTreeMap<usize, MultilinearMap> {
        &self.comps
    }

    pub fn comp_or_zero(&self, n: usize) -> MultilinearMap {
        let v = self.algebra().space().clone();
        self.comps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| MultilinearMap::zero(self.algebra().field(), v.clone(), v, n, n as i32))
    }
}

fn sign(field: Field, odd: bool) -> crate::scalar::Scalar {
    field.sign(odd)
}

/// δ(μ_m) − Σ_A (−1)^{i(l+1)+m} μ_k(id^{i−1} ⊗ μ_l ⊗ id^{k−i}).
pub fn ainfty_residual(a: &AInftyAlgebra, m: usize) -> Result<MultilinearMap> {
    let field = a.field();
    let mu = a.op_or_zero(m);
    let mut res = MultilinearMap::hom_differential(&mu, a.diff(), a.diff())?;
    for t in enumerate_index_set(IndexKind::A, m, None)? {
        let IndexTuple::A { k, l, i } = t else { unreachable!() };
        let (Some(mk), Some(ml)) = (a.op(k), a.op(l)) else { continue };
        let term = MultilinearMap::compose_insert(mk, ml, i)?;
        res = res.add_scaled(&term, &sign(field, (i * (l + 1) + m).is_multiple_of(2)))?;
    }
    Ok(res)
}

/// Verifies the A∞ relations for 2 ≤ m ≤ up_to.
pub fn check_ainfty(a: &AInftyAlgebra, up_to: usize) -> Result<Report> {
    let mut rep = Report::new();
    for m in 2..=up_to {
        rep.residual("ainfty", m, &ainfty_residual(a, m)?);
    }
    Ok(rep)
}

/// δ(φ_m) + Σ_B (−1)^{ϑ(r)} ν_k(φ_{r₁}⊗…⊗φ_{r_k}) + Σ_{A, k≥1} (−1)^{i(l+1)+m} φ_k(id^{i−1}⊗μ_l⊗id^{k−i}).
pub fn morphism_residual(phi: &AInftyMorphism, m: usize) -> Result<MultilinearMap> {
    let field = phi.field();
    let (src, tgt) = (&phi.source, &phi.target);
    let pm = phi.comp_or_zero(m);
    let mut res = MultilinearMap::hom_differential(&pm, src.diff(), tgt.diff())?;
    for k in 2..=m {
        let Some(nu) = tgt.op(k) else { continue };
        for r in compositions(m, k) {
            let blocks: Vec<MultilinearMap> = r.iter().map(|&x| phi.comp_or_zero(x)).collect();
            if blocks.iter().any(|b| b.is_zero()) {
                continue;
            }
            let refs: Vec<&MultilinearMap> = blocks.iter().collect();
            let term = MultilinearMap::compose_blocks(nu, &refs)?;
            res = res.add_scaled(&term, &sign(field, theta_sign(&r)))?;
        }
    }
    for (k, l, i) in index_set_a_with_unary(m) {
        let (Some(pk), Some(ml)) = (phi.comp(k), src.op(l)) else { continue };
        let term = MultilinearMap::compose_insert(pk, ml, i)?;
        res = res.add_scaled(&term, &sign(field, (i * (l + 1) + m) % 2 == 1))?;
    }
    Ok(res)
}

/// Verifies the morphism relations for 1 ≤ m ≤ up_to.
pub fn check_morphism(phi: &AInftyMorphism, up_to: usize) -> Result<Report> {
    let mut rep = Report::new();
    for m in 1..=up_to {
        rep.residual("morphism", m, &morphism_residual(phi, m)?);
    }
    Ok(rep)
}

/// (id)₁ = id, (id)_n = 0 for n ≥ 2.
pub fn identity_morphism(a: &Arc<AInftyAlgebra>) -> AInftyMorphism {
    let mut comps = BTreeMap::new();
    comps.insert(1, a.complex.identity());
    AInftyMorphism { source: a.clone(), target: a.clone(), comps }
}

/// ψ∘φ, computed as the composite of the encoded coalgebra morphisms.
pub fn compose_morphisms(psi: &AInftyMorphism, phi: &AInftyMorphism, up_to: usize) -> Result<AInftyMorphism> {
    if !phi.target.space().same_shape(psi.source.space()) || phi.field() != psi.field() {
        return Err(Error::Mismatch("morphisms do not compose".into()));
    }
    let f = bar::bar_encode_morphism(phi, up_to)?;
    let g = bar::bar_encode_morphism(psi, up_to)?;
    let gf = bar::bar_compose(&g, &f, up_to)?;
    bar::bar_decode_morphism(&gf, phi.source.clone(), psi.target.clone())
}

/// The homotopy relation residual at arity n given the composite ψφ.
pub fn homotopy_residual(h: &AInftyHomotopy, psiphi: &AInftyMorphism, n: usize) -> Result<MultilinearMap> {
    let a = h.algebra();
    let field = a.field();
    let id = a.complex.identity();
    let hn = h.comp_or_zero(n);
    let mut res = MultilinearMap::hom_differential(&hn, a.diff(), a.diff())?;
    for t in enumerate_index_set(IndexKind::C, n, None)? {
        let IndexTuple::C { k, i, r } = t else { unreachable!() };
        let Some(mk) = a.op(k) else { continue };
        let mut blocks: Vec<MultilinearMap> = r[..i - 1].iter().map(|&x| psiphi.comp_or_zero(x)).collect();
        blocks.push(h.comp_or_zero(r[i - 1]));
        blocks.extend(std::iter::repeat_n(id.clone(), k - i));
        if blocks.iter().any(|b| b.is_zero()) {
            continue;
        }
        let refs: Vec<&MultilinearMap> = blocks.iter().collect();
        let term = MultilinearMap::compose_blocks(mk, &refs)?;
        res = res.add_scaled(&term, &sign(field, ((n + r[i - 1]) % 2 == 1) ^ theta_sign(&r)))?;
    }
    for (k, l, i) in index_set_a_with_unary(n) {
        let (Some(hk), Some(ml)) = (h.comp(k), a.op(l)) else { continue };
        let term = MultilinearMap::compose_insert(hk, ml, i)?;
        res = res.add_scaled(&term, &sign(field, (n + i * (l + 1)).is_multiple_of(2)))?;
    }
    res = res.sub(&psiphi.comp_or_zero(n))?;
    if n == 1 {
        res = res.add(&id)?;
    }
    Ok(res)
}

/// Verifies the homotopy relations for 1 ≤ n ≤ up_to.
pub fn check_homotopy(h: &AInftyHomotopy, up_to: usize) -> Result<Report> {
    let psiphi = compose_morphisms(&h.psi, &h.phi, up_to)?;
    let mut rep = Report::new();
    for n in 1..=up_to {
        rep.residual("homotopy", n, &homotopy_residual(h, &psiphi, n)?);
    }
    Ok(rep)
}
