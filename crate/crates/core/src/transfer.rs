use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::ainfty::{
    check_ainfty, check_homotopy, check_morphism, AInftyAlgebra, AInftyHomotopy, AInftyMorphism, Complex,
};
use crate::error::{Error, Result};
use crate::index::{enumerate_index_set, index_set_a_with_unary, theta_sign, IndexKind, IndexTuple};
use crate::map::MultilinearMap;
use crate::report::Report;
use crate::scalar::Field;
use crate::trees;

/// f: V → W, g: W → V chain maps and h on V with δ(h) = gf − id; optionally l on W
/// with δ(l) = fg − id.
#[derive(Clone, Debug)]
pub struct ContractionData {
    pub v: Complex,
    pub w: Complex,
    pub f: MultilinearMap,
    pub g: MultilinearMap,
    pub h: MultilinearMap,
    pub l: Option<MultilinearMap>,
}

impl ContractionData {
    pub fn new(
        v: Complex,
        w: Complex,
        f: MultilinearMap,
        g: MultilinearMap,
        h: MultilinearMap,
        l: Option<MultilinearMap>,
    ) -> Result<ContractionData> {
        let ctx = ContractionData { v, w, f, g, h, l };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn new_unchecked(
        v: Complex,
        w: Complex,
        f: MultilinearMap,
        g: MultilinearMap,
        h: MultilinearMap,
        l: Option<MultilinearMap>,
    ) -> ContractionData {
        ContractionData { v, w, f, g, h, l }
    }

    pub fn field(&self) -> Field {
        self.v.field()
    }

    pub fn validate(&self) -> Result<()> {
        let (v, w) = (&self.v.space, &self.w.space);
        let linear = |m: &MultilinearMap, src: &crate::space::GradedSpace, tgt: &crate::space::GradedSpace, deg: i32, name: &str| {
            if m.arity() != 1 || m.degree() != deg || !m.source().same_shape(src) || !m.target().same_shape(tgt) {
                return Err(Error::Invariant(format!("{name} must be a linear map of degree {deg} with the right source and target")));
            }
            Ok(())
        };
        linear(&self.f, v, w, 0, "f")?;
        linear(&self.g, w, v, 0, "g")?;
        linear(&self.h, v, v, 1, "h")?;
        let df = MultilinearMap::hom_differential(&self.f, &self.v.diff, &self.w.diff)?;
        if let Some(k) = df.first_support() {
            return Err(Error::Invariant(format!("f is not a chain map at {k:?}")));
        }
        let dg = MultilinearMap::hom_differential(&self.g, &self.w.diff, &self.v.diff)?;
        if let Some(k) = dg.first_support() {
            return Err(Error::Invariant(format!("g is not a chain map at {k:?}")));
        }
        let gf = MultilinearMap::compose(&self.g, &self.f)?;
        let dh = MultilinearMap::hom_differential(&self.h, &self.v.diff, &self.v.diff)?;
        let res = dh.sub(&gf)?.add(&self.v.identity())?;
        if let Some(k) = res.first_support() {
            return Err(Error::Invariant(format!("δ(h) ≠ gf − id at {k:?}")));
        }
        if let Some(l) = &self.l {
            linear(l, w, w, 1, "l")?;
            let fg = MultilinearMap::compose(&self.f, &self.g)?;
            let dl = MultilinearMap::hom_differential(l, &self.w.diff, &self.w.diff)?;
            let res = dl.sub(&fg)?.add(&self.w.identity())?;
            if let Some(k) = res.first_support() {
                return Err(Error::Invariant(format!("δ(l) ≠ fg − id at {k:?}")));
            }
        }
        Ok(())
    }

    pub fn gf(&self) -> MultilinearMap {
        MultilinearMap::compose(&self.g, &self.f).expect("g and f compose")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    P,
    Q,
}

/// Flips the sign of one term of one kernel's defining sum (terms numbered in the
/// order of the index sets B and C).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub kernel: KernelKind,
    pub n: usize,
    pub term: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    P(usize),
    Hp(usize),
    Pi(usize, usize),
    Q(usize),
    Hq(usize),
    Gq(usize),
    Pw(usize),
    Hpw(usize),
}

/// Memoized inductive kernels p_n, p^i_n, q_n for a fixed contraction and structure.
pub struct Kernels<'a> {
    ctx: &'a ContractionData,
    mu: &'a AInftyAlgebra,
    id: MultilinearMap,
    gf: MultilinearMap,
    mutation: Option<Mutation>,
    memo: Mutex<HashMap<Key, Arc<MultilinearMap>>>,
}

impl<'a> Kernels<'a> {
    pub fn new(ctx: &'a ContractionData, mu: &'a AInftyAlgebra) -> Result<Kernels<'a>> {
        if !mu.space().same_shape(&ctx.v.space) || mu.field() != ctx.field() {
            return Err(Error::Mismatch("structure does not live on the contraction's source".into()));
        }
        Ok(Kernels { ctx, mu, id: ctx.v.identity(), gf: ctx.gf(), mutation: None, memo: Mutex::new(HashMap::new()) })
    }

    pub fn with_mutation(mut self, m: Mutation) -> Kernels<'a> {
        self.mutation = Some(m);
        self
    }

    pub fn ctx(&self) -> &ContractionData {
        self.ctx
    }

    pub fn mu(&self) -> &AInftyAlgebra {
        self.mu
    }

    fn cached(&self, key: Key, make: impl FnOnce() -> Result<MultilinearMap>) -> Result<Arc<MultilinearMap>> {
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(make()?);
        Ok(self.memo.lock().expect("memo lock").entry(key).or_insert(m).clone())
    }

    fn term_sign(&self, kernel: KernelKind, n: usize, term: usize, odd: bool) -> crate::scalar::Scalar {
        let flip = self.mutation == Some(Mutation { kernel, n, term });
        self.ctx.field().sign(odd ^ flip)
    }

    fn zero(&self, arity: usize, degree: i32) -> MultilinearMap {
        let v = self.ctx.v.space.clone();
        MultilinearMap::zero(self.ctx.field(), v.clone(), v, arity, degree)
    }

    /// p_n = Σ_B (−1)^{ϑ(r)} μ_k(hp_{r₁}⊗…⊗hp_{r_k}), hp₁ = id.
    pub fn p(&self, n: usize) -> Result<Arc<MultilinearMap>> {
        if n < 2 {
            return Err(Error::Input("p_n needs n ≥ 2".into()));
        }
        self.cached(Key::P(n), || {
            let mut acc = self.zero(n, n as i32 - 2);
            for (t, tuple) in enumerate_index_set(IndexKind::B, n, None)?.into_iter().enumerate() {
                let IndexTuple::B { r } = tuple else { unreachable!() };
                let Some(mk) = self.mu.op(r.len()) else { continue };
                let blocks = r.iter().map(|&x| self.hp(x)).collect::<Result<Vec<_>>>()?;
                if blocks.iter().any(|b| b.is_zero()) {
                    continue;
                }
                let refs: Vec<&MultilinearMap> = blocks.iter().map(|b| b.as_ref()).collect();
                let term = MultilinearMap::compose_blocks(mk, &refs)?;
                acc = acc.add_scaled(&term, &self.term_sign(KernelKind::P, n, t, theta_sign(&r)))?;
            }
            Ok(acc)
        })
    }

    /// h∘p_r, with hp₁ = id.
    pub fn hp(&self, r: usize) -> Result<Arc<MultilinearMap>> {
        self.cached(Key::Hp(r), || {
            if r == 1 {
                return Ok(self.id.clone());
            }
            MultilinearMap::compose(&self.ctx.h, &*self.p(r)?)
        })
    }

    /// p^i_n = Σ (−1)^{ϑ(r)} μ_k(hp_{r₁}⊗…⊗hp_{r_c}⊗id^{n−i+1}) over compositions r of i − 1,
    /// k = c + n − i + 1 ≥ 2.
    pub fn p_partial(&self, n: usize, i: usize) -> Result<Arc<MultilinearMap>> {
        if i == 0 || i > n || n < 2 {
            return Err(Error::Input(format!("p^{i}_{n} is undefined")));
        }
        self.cached(Key::Pi(n, i), || {
            let mut acc = self.zero(n, n as i32 - 2);
            for tuple in enumerate_index_set(IndexKind::D, n, Some(i))? {
                let IndexTuple::D { k, r } = tuple else { unreachable!() };
                let Some(mk) = self.mu.op(k) else { continue };
                let mut blocks = r.iter().map(|&x| self.hp(x)).collect::<Result<Vec<_>>>()?;
                if blocks.iter().any(|b| b.is_zero()) {
                    continue;
                }
                blocks.extend(std::iter::repeat_n(Arc::new(self.id.clone()), n - i + 1));
                let refs: Vec<&MultilinearMap> = blocks.iter().map(|b| b.as_ref()).collect();
                let term = MultilinearMap::compose_blocks(mk, &refs)?;
                acc = acc.add_scaled(&term, &self.ctx.field().sign(theta_sign(&r)))?;
            }
            Ok(acc)
        })
    }

    /// q₁ = id; q_n = Σ_C (−1)^{n+r_i+ϑ(r)} p^i_k(gf q_{r₁}⊗…⊗gf q_{r_{i−1}}⊗h q_{r_i}⊗id^{k−i}).
    pub fn q(&self, n: usize) -> Result<Arc<MultilinearMap>> {
        if n == 0 {
            return Err(Error::Input("q_n needs n ≥ 1".into()));
        }
        self.cached(Key::Q(n), || {
            if n == 1 {
                return Ok(self.id.clone());
            }
            let mut acc = self.zero(n, n as i32 - 1);
            for (t, tuple) in enumerate_index_set(IndexKind::C, n, None)?.into_iter().enumerate() {
                let IndexTuple::C { k, i, r } = tuple else { unreachable!() };
                let outer = self.p_partial(k, i)?;
                if outer.is_zero() {
                    continue;
                }
                let mut blocks = Vec::with_capacity(k);
                for &x in &r[..i - 1] {
                    blocks.push(self.gq(x)?);
                }
                blocks.push(self.hq(r[i - 1])?);
                if blocks.iter().any(|b| b.is_zero()) {
                    continue;
                }
                blocks.extend(std::iter::repeat_n(Arc::new(self.id.clone()), k - i));
                let refs: Vec<&MultilinearMap> = blocks.iter().map(|b| b.as_ref()).collect();
                let term = MultilinearMap::compose_blocks(&outer, &refs)?;
                let odd = ((n + r[i - 1]) % 2 == 1) ^ theta_sign(&r);
                acc = acc.add_scaled(&term, &self.term_sign(KernelKind::Q, n, t, odd))?;
            }
            Ok(acc)
        })
    }

    pub fn hq(&self, r: usize) -> Result<Arc<MultilinearMap>> {
        self.cached(Key::Hq(r), || MultilinearMap::compose(&self.ctx.h, &*self.q(r)?))
    }

    pub fn gq(&self, r: usize) -> Result<Arc<MultilinearMap>> {
        self.cached(Key::Gq(r), || MultilinearMap::compose(&self.gf, &*self.q(r)?))
    }

    /// p_n∘g^{⊗n}, by the same recursion with hp₁ replaced by g.
    pub fn p_on_w(&self, n: usize) -> Result<Arc<MultilinearMap>> {
        if n < 2 {
            return Err(Error::Input("p_n needs n ≥ 2".into()));
        }
        self.cached(Key::Pw(n), || {
            let v = self.ctx.v.space.clone();
            let w = self.ctx.w.space.clone();
            let mut acc = MultilinearMap::zero(self.ctx.field(), w, v, n, n as i32 - 2);
            for (t, tuple) in enumerate_index_set(IndexKind::B, n, None)?.into_iter().enumerate() {
                let IndexTuple::B { r } = tuple else { unreachable!() };
                let Some(mk) = self.mu.op(r.len()) else { continue };
                let blocks = r.iter().map(|&x| self.hp_on_w(x)).collect::<Result<Vec<_>>>()?;
                if blocks.iter().any(|b| b.is_zero()) {
                    continue;
                }
                let refs: Vec<&MultilinearMap> = blocks.iter().map(|b| b.as_ref()).collect();
                let term = MultilinearMap::compose_blocks(mk, &refs)?;
                acc = acc.add_scaled(&term, &self.term_sign(KernelKind::P, n, t, theta_sign(&r)))?;
            }
            Ok(acc)
        })
    }

    fn hp_on_w(&self, r: usize) -> Result<Arc<MultilinearMap>> {
        self.cached(Key::Hpw(r), || {
            if r == 1 {
                return Ok(self.ctx.g.clone());
            }
            MultilinearMap::compose(&self.ctx.h, &*self.p_on_w(r)?)
        })
    }
}

/// Number of terms in the defining sum of p_n (index set B) or q_n (index set C).
pub fn kernel_term_count(kind: KernelKind, n: usize) -> usize {
    let set = match kind {
        KernelKind::P => IndexKind::B,
        KernelKind::Q => IndexKind::C,
    };
    enumerate_index_set(set, n, None).map(|v| v.len()).unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMethod {
    Inductive,
    Trees,
    Both,
}

/// (ν, φ, ψ, H) with φ₁ = f, ψ₁ = g, H₁ = h.
#[derive(Clone, Debug)]
pub struct TransferResult {
    pub nu: Arc<AInftyAlgebra>,
    pub phi: Arc<AInftyMorphism>,
    pub psi: Arc<AInftyMorphism>,
    pub homotopy: AInftyHomotopy,
}

impl TransferResult {
    /// All axioms up to `up_to`.
    pub fn check(&self, up_to: usize) -> Result<Report> {
        let mut rep = check_ainfty(&self.nu, up_to)?;
        rep.extend(check_morphism(&self.phi, up_to)?);
        rep.extend(check_morphism(&self.psi, up_to)?);
        rep.extend(check_homotopy(&self.homotopy, up_to)?);
        Ok(rep)
    }
}

/// ν_n = f p_n g^{⊗n} only, for 2 ≤ n ≤ up_to.
pub fn transfer_structure(ctx: &ContractionData, mu: &AInftyAlgebra, up_to: usize) -> Result<AInftyAlgebra> {
    let k = Kernels::new(ctx, mu)?;
    let mut ops = BTreeMap::new();
    for n in 2..=up_to {
        ops.insert(n, MultilinearMap::compose(&ctx.f, &*k.p_on_w(n)?)?);
    }
    AInftyAlgebra::new(ctx.w.clone(), ops, up_to)
}

pub fn transfer(ctx: &ContractionData, mu: &AInftyAlgebra, up_to: usize) -> Result<TransferResult> {
    transfer_with(ctx, mu, up_to, KernelMethod::Inductive)
}

/// Validates the contraction and the structure, then transfers.
pub fn transfer_with(ctx: &ContractionData, mu: &AInftyAlgebra, up_to: usize, method: KernelMethod) -> Result<TransferResult> {
    ctx.validate()?;
    let rep = check_ainfty(mu, up_to)?;
    if let Some(c) = rep.first_failure() {
        return Err(Error::Invariant(format!("input structure fails the A∞ relation at arity {}", c.arity)));
    }
    transfer_unchecked(ctx, mu, up_to, method)
}

pub fn transfer_unchecked(ctx: &ContractionData, mu: &AInftyAlgebra, up_to: usize, method: KernelMethod) -> Result<TransferResult> {
    let k = Kernels::new(ctx, mu)?;
    let mut p_w: BTreeMap<usize, MultilinearMap> = BTreeMap::new();
    let mut q: BTreeMap<usize, MultilinearMap> = BTreeMap::new();
    for n in 1..=up_to {
        let qi = || k.q(n).map(|m| m.as_ref().clone());
        let qt = || trees::q_kernel_trees(mu, &ctx.f, &ctx.g, &ctx.h, n);
        q.insert(n, pick(method, qi, qt, "q", n)?);
        if n >= 2 {
            let pi = || k.p_on_w(n).map(|m| m.as_ref().clone());
            let pt = || trees::p_kernel_trees_on(mu, &ctx.h, &ctx.g, n);
            p_w.insert(n, pick(method, pi, pt, "p", n)?);
        }
    }
    let mut nu = BTreeMap::new();
    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    let mut hs = BTreeMap::new();
    psi.insert(1, ctx.g.clone());
    for n in 1..=up_to {
        phi.insert(n, MultilinearMap::compose(&ctx.f, &q[&n])?);
        hs.insert(n, MultilinearMap::compose(&ctx.h, &q[&n])?);
        if n >= 2 {
            nu.insert(n, MultilinearMap::compose(&ctx.f, &p_w[&n])?);
            psi.insert(n, MultilinearMap::compose(&ctx.h, &p_w[&n])?);
        }
    }
    let src = Arc::new(mu.truncated(up_to));
    let nu = Arc::new(AInftyAlgebra::new(ctx.w.clone(), nu, up_to)?);
    let phi = Arc::new(AInftyMorphism::new(src.clone(), nu.clone(), phi)?);
    let psi = Arc::new(AInftyMorphism::new(nu.clone(), src, psi)?);
    let homotopy = AInftyHomotopy::new(phi.clone(), psi.clone(), hs)?;
    Ok(TransferResult { nu, phi, psi, homotopy })
}

fn pick(
    method: KernelMethod,
    inductive: impl FnOnce() -> Result<MultilinearMap>,
    trees: impl FnOnce() -> Result<MultilinearMap>,
    name: &str,
    n: usize,
) -> Result<MultilinearMap> {
    match method {
        KernelMethod::Inductive => inductive(),
        KernelMethod::Trees => trees(),
        KernelMethod::Both => {
            let a = inductive()?;
            if a != trees()? {
                return Err(Error::Invariant(format!("inductive and tree {name}-kernels differ at n = {n}")));
            }
            Ok(a)
        }
    }
}

/// δ(p_n) − Σ_A (−1)^{i(l+1)+n} p_k(id^{i−1}⊗gf p_l⊗id^{k−i}).
pub fn p_identity_residual(k: &Kernels, n: usize) -> Result<MultilinearMap> {
    let field = k.ctx.field();
    let d = &k.ctx.v.diff;
    let mut res = MultilinearMap::hom_differential(&*k.p(n)?, d, d)?;
    for t in enumerate_index_set(IndexKind::A, n, None)? {
        let IndexTuple::A { k: kk, l, i } = t else { unreachable!() };
        let inner = MultilinearMap::compose(&k.gf, &*k.p(l)?)?;
        let term = MultilinearMap::compose_insert(&*k.p(kk)?, &inner, i)?;
        res = res.add_scaled(&term, &field.sign((i * (l + 1) + n).is_multiple_of(2)))?;
    }
    Ok(res)
}

/// δ(q_n) + Σ_B (−1)^{ϑ(r)} p_k(gf q_{r₁}⊗…) + Σ_{A, k≥1} (−1)^{i(l+1)+n} q_k(id^{i−1}⊗μ_l⊗id^{k−i}).
pub fn q_identity_residual(k: &Kernels, n: usize) -> Result<MultilinearMap> {
    let field = k.ctx.field();
    let d = &k.ctx.v.diff;
    let mut res = MultilinearMap::hom_differential(&*k.q(n)?, d, d)?;
    for t in enumerate_index_set(IndexKind::B, n, None)? {
        let IndexTuple::B { r } = t else { unreachable!() };
        let blocks = r.iter().map(|&x| k.gq(x)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&MultilinearMap> = blocks.iter().map(|b| b.as_ref()).collect();
        let term = MultilinearMap::compose_blocks(&*k.p(r.len())?, &refs)?;
        res = res.add_scaled(&term, &field.sign(theta_sign(&r)))?;
    }
    for (kk, l, i) in index_set_a_with_unary(n) {
        let Some(ml) = k.mu.op(l) else { continue };
        let term = MultilinearMap::compose_insert(&*k.q(kk)?, ml, i)?;
        res = res.add_scaled(&term, &field.sign((i * (l + 1) + n) % 2 == 1))?;
    }
    Ok(res)
}

pub fn check_kernel_identities(ctx: &ContractionData, mu: &AInftyAlgebra, up_to: usize) -> Result<Report> {
    check_kernel_identities_with(&Kernels::new(ctx, mu)?, up_to)
}

pub fn check_kernel_identities_with(k: &Kernels, up_to: usize) -> Result<Report> {
    let mut rep = Report::new();
    for n in 2..=up_to {
        rep.residual("p-identity", n, &p_identity_residual(k, n)?);
    }
    for n in 1..=up_to {
        rep.residual("q-identity", n, &q_identity_residual(k, n)?);
    }
    Ok(rep)
}

/// fh = 0, hg = 0, hh = 0, reported individually.
pub fn check_side_conditions(ctx: &ContractionData) -> Result<Report> {
    let mut rep = Report::new();
    rep.residual("fh", 1, &MultilinearMap::compose(&ctx.f, &ctx.h)?);
    rep.residual("hg", 1, &MultilinearMap::compose(&ctx.h, &ctx.g)?);
    rep.residual("hh", 1, &MultilinearMap::compose(&ctx.h, &ctx.h)?);
    Ok(rep)
}
