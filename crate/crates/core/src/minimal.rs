//! Homology, Hodge decompositions V ≅ D ⊕ W ⊕ B, the induced contraction, minimal
//! models, and the obstruction class of a pair of homotopies.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainfty::{AInftyAlgebra, Complex};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::map::{GradedVector, MultilinearMap};
use crate::scalar::{Field, Scalar};
use crate::space::GradedSpace;
use crate::transfer::{transfer, ContractionData, TransferResult};

/// Matrix of ∂: V_d → V_{d−1}; rows index V_{d−1}.
pub fn diff_matrix(c: &Complex, d: i32) -> Matrix {
    let field = c.field();
    let space = &c.space;
    let src = space.basis_in(d);
    let tgt = space.basis_in(d - 1);
    let mut m = linalg::zeros(field, tgt.len(), src.len());
    for (j, g) in src.enumerate() {
        for (out, x) in c.diff.eval_basis(&[g]) {
            m[(out[0] - tgt.start) as usize][j] = x;
        }
    }
    m
}

/// Cycles of degree d, one basis vector per free column of the reduced ∂.
pub fn cycles(c: &Complex, d: i32) -> Vec<Vec<Scalar>> {
    let n = c.space.dim_in(d);
    linalg::nullspace(c.field(), &diff_matrix(c, d), n)
}

/// The splitting in one degree: columns D, W, B in coordinates of V_d, and the inverse
/// of the matrix [D | W | B].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgePart {
    pub d: Vec<Vec<Scalar>>,
    pub w: Vec<Vec<Scalar>>,
    pub b: Vec<Vec<Scalar>>,
    coords: Matrix,
}

impl HodgePart {
    /// Coordinates of basis element `j` of V_d along D, W, B.
    fn coordinates(&self, j: usize) -> Vec<Scalar> {
        self.coords.iter().map(|row| row[j].clone()).collect()
    }
}

/// V_d = D_d ⊕ W_d ⊕ B_d with Z_d = W_d ⊕ B_d, B_d = ∂(D_{d+1}) and ω = ∂∘ι_D : D_{d+1} → B_d
/// the identity in the chosen bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeDecomposition {
    pub complex: Complex,
    pub parts: BTreeMap<i32, HodgePart>,
}

/// Vectors from `candidates` that enlarge the span of `base`, in order, until `want` are taken.
fn extend_basis(base: &[Vec<Scalar>], candidates: impl IntoIterator<Item = Vec<Scalar>>, n: usize, want: usize) -> Vec<Vec<Scalar>> {
    let mut cur: Matrix = base.to_vec();
    let mut rank = linalg::rank(&cur, n);
    let mut out = Vec::new();
    for v in candidates {
        if out.len() == want {
            break;
        }
        cur.push(v.clone());
        let r = linalg::rank(&cur, n);
        if r > rank {
            rank = r;
            out.push(v);
        } else {
            cur.pop();
        }
    }
    out
}

fn unit(field: Field, n: usize, j: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[j] = field.one();
    v
}

impl HodgeDecomposition {
    /// Builds the splitting with D_d and W_d drawn from the given candidate vectors
    /// (each candidate list is scanned in order; the unit vectors are appended as fallback).
    pub fn with_candidates(
        c: &Complex,
        mut d_candidates: impl FnMut(i32) -> Vec<Vec<Scalar>>,
        mut w_candidates: impl FnMut(i32, &[Vec<Scalar>]) -> Vec<Vec<Scalar>>,
    ) -> Result<HodgeDecomposition> {
        let field = c.field();
        let degs: Vec<i32> = c.space.dims().keys().copied().collect();
        let mut z = BTreeMap::new();
        let mut ds = BTreeMap::new();
        for &d in &degs {
            let n = c.space.dim_in(d);
            let zd = cycles(c, d);
            let want = n - zd.len();
            let cands = d_candidates(d).into_iter().chain((0..n).map(|j| unit(field, n, j)));
            ds.insert(d, extend_basis(&zd, cands, n, want));
            z.insert(d, zd);
        }
        let mut parts = BTreeMap::new();
        for &d in &degs {
            let n = c.space.dim_in(d);
            let above = ds.get(&(d + 1)).cloned().unwrap_or_default();
            let m = diff_matrix(c, d + 1);
            let b: Vec<Vec<Scalar>> = above.iter().map(|x| linalg::mat_vec(field, &m, x)).collect();
            let zd = &z[&d];
            let want = zd.len() - b.len();
            let cands = w_candidates(d, zd).into_iter().chain(zd.iter().cloned());
            let w = extend_basis(&b, cands, n, want);
            let dd = ds[&d].clone();
            let mut p = linalg::zeros(field, n, n);
            for (j, col) in dd.iter().chain(&w).chain(&b).enumerate() {
                for (i, x) in col.iter().enumerate() {
                    p[i][j] = x.clone();
                }
            }
            let coords = linalg::inverse(field, &p)
                .ok_or_else(|| Error::Invariant(format!("D ⊕ W ⊕ B does not span degree {d}")))?;
            parts.insert(d, HodgePart { d: dd, w, b, coords });
        }
        Ok(HodgeDecomposition { complex: c.clone(), parts })
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    /// Harmonic representatives, degree by degree.
    pub fn representatives(&self) -> Vec<GradedVector> {
        let space = &self.complex.space;
        let mut out = Vec::new();
        for (&d, part) in &self.parts {
            let start = space.basis_in(d).start;
            for w in &part.w {
                out.push(GradedVector::from_pairs(
                    space.clone(),
                    w.iter().enumerate().map(|(i, x)| (start + i as u32, x.clone())),
                ));
            }
        }
        out
    }

    /// The contraction onto W ⊕ D′ ⊕ B′ where D′ ⊂ D are the kept directions (`keep[d][j]`
    /// keeps D_d's j-th vector and its boundary). With nothing kept this is the contraction
    /// onto homology: f = π_W, g = ι_W, h = −ι_D∘ω⁻¹∘π_B.
    pub fn contraction_keeping(&self, keep: &BTreeMap<i32, Vec<bool>>) -> Result<ContractionData> {
        let field = self.field();
        let v = &self.complex.space;
        let kept = |d: i32, j: usize| keep.get(&d).and_then(|k| k.get(j)).copied().unwrap_or(false);
        let mut dims = BTreeMap::new();
        let mut labels: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        // W basis per degree: harmonic, kept D, kept B (paired with kept D one degree up).
        let mut layout: BTreeMap<i32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (&d, part) in &self.parts {
            let kd: Vec<usize> = (0..part.d.len()).filter(|&j| kept(d, j)).collect();
            let kb: Vec<usize> = (0..part.b.len()).filter(|&j| kept(d + 1, j)).collect();
            let start = v.basis_in(d).start;
            let mut ls = Vec::new();
            for (i, w) in part.w.iter().enumerate() {
                let support: Vec<usize> = (0..w.len()).filter(|&k| !w[k].is_zero()).collect();
                match support.as_slice() {
                    [k] if w[*k].is_one() => ls.push(format!("[{}]", v.label(start + *k as u32))),
                    _ => ls.push(format!("w{d}_{i}")),
                }
            }
            ls.extend(kd.iter().map(|j| format!("d{d}_{j}")));
            ls.extend(kb.iter().map(|j| format!("b{d}_{j}")));
            dims.insert(d, ls.len());
            labels.insert(d, ls);
            layout.insert(d, (kd, kb));
        }
        let w_space = Arc::new(GradedSpace::with_labels(dims, labels)?);
        let mut f = MultilinearMap::builder(field, v.clone(), w_space.clone(), 1, 0);
        let mut g = MultilinearMap::builder(field, w_space.clone(), v.clone(), 1, 0);
        let mut h = MultilinearMap::builder(field, v.clone(), v.clone(), 1, 1);
        let mut dw = MultilinearMap::builder(field, w_space.clone(), w_space.clone(), 1, -1);
        for (&d, part) in &self.parts {
            let (kd, kb) = &layout[&d];
            let (nd, nw) = (part.d.len(), part.w.len());
            let vstart = v.basis_in(d).start;
            let wstart = w_space.basis_in(d).start;
            let w_of_d = |j: usize| wstart + (nw + kd.iter().position(|&x| x == j).unwrap()) as u32;
            let w_of_b = |j: usize| wstart + (nw + kd.len() + kb.iter().position(|&x| x == j).unwrap()) as u32;
            for a in 0..v.dim_in(d) {
                let coord = part.coordinates(a);
                let src = vstart + a as u32;
                for j in 0..nw {
                    f.add(&[src], &[wstart + j as u32], coord[nd + j].clone());
                }
                for &j in kd {
                    f.add(&[src], &[w_of_d(j)], coord[j].clone());
                }
                for j in 0..part.b.len() {
                    let c = &coord[nd + nw + j];
                    if c.is_zero() {
                        continue;
                    }
                    if kb.contains(&j) {
                        f.add(&[src], &[w_of_b(j)], c.clone());
                    } else {
                        let x = &self.parts[&(d + 1)].d[j];
                        let up = v.basis_in(d + 1).start;
                        for (i, xi) in x.iter().enumerate() {
                            h.add(&[src], &[up + i as u32], c.mul(xi).neg());
                        }
                    }
                }
            }
            let mut push_g = |wi: u32, vec: &Vec<Scalar>| {
                for (i, x) in vec.iter().enumerate() {
                    g.add(&[wi], &[vstart + i as u32], x.clone());
                }
            };
            for (j, w) in part.w.iter().enumerate() {
                push_g(wstart + j as u32, w);
            }
            for &j in kd {
                push_g(w_of_d(j), &part.d[j]);
                let below = &layout[&(d - 1)].1;
                let pos = below.iter().position(|&x| x == j).expect("kept pairs are recorded on both sides");
                let wb = w_space.basis_in(d - 1).start + (self.parts[&(d - 1)].w.len() + layout[&(d - 1)].0.len() + pos) as u32;
                dw.add(&[w_of_d(j)], &[wb], field.one());
            }
            for &j in kb {
                push_g(w_of_b(j), &part.b[j]);
            }
        }
        let w = Complex::new(w_space, dw.build()?)?;
        ContractionData::new(self.complex.clone(), w, f.build()?, g.build()?, h.build()?, None)
    }
}

/// Deterministic splitting: D spanned by the unit vectors at the non-pivot columns of the
/// reduced cycle basis, W by the first cycles (in basis order) independent of B.
pub fn hodge_decompose(c: &Complex) -> Result<HodgeDecomposition> {
    HodgeDecomposition::with_candidates(c, |_| Vec::new(), |_, _| Vec::new())
}

/// f = π_W, g = ι_W, h = −ι_D∘ω⁻¹∘π_B. The sign makes δ(h) = gf − id with ∂ of degree −1.
pub fn contraction_from_hodge(hd: &HodgeDecomposition) -> Result<ContractionData> {
    hd.contraction_keeping(&BTreeMap::new())
}

/// H(V) with one harmonic representative cycle per basis element.
#[derive(Clone, Debug)]
pub struct Homology {
    pub space: Arc<GradedSpace>,
    pub representatives: Vec<GradedVector>,
}

pub fn homology(c: &Complex) -> Result<Homology> {
    let hd = hodge_decompose(c)?;
    let ctx = contraction_from_hodge(&hd)?;
    Ok(Homology { space: ctx.w.space.clone(), representatives: hd.representatives() })
}

/// The minimal model on H(V) with the Hodge contraction and the transferred maps.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub hodge: HodgeDecomposition,
    pub contraction: ContractionData,
    pub result: TransferResult,
}

impl MinimalModel {
    pub fn model(&self) -> &Arc<AInftyAlgebra> {
        &self.result.nu
    }
}

pub fn minimal_model(a: &AInftyAlgebra, up_to: usize) -> Result<MinimalModel> {
    let hodge = hodge_decompose(&a.complex)?;
    let contraction = contraction_from_hodge(&hodge)?;
    let result = transfer(&contraction, a, up_to)?;
    Ok(MinimalModel { hodge, contraction, result })
}

/// Some X with δX = c in the complex of linear maps src → tgt, if c is a boundary.
pub fn hom_preimage(c: &MultilinearMap, src: &Complex, tgt: &Complex) -> Result<Option<MultilinearMap>> {
    if c.arity() != 1 {
        return Err(Error::Input("boundary test is for linear maps".into()));
    }
    let field = c.field();
    let (s, t) = (&src.space, &tgt.space);
    let deg = c.degree() + 1;
    let vars: Vec<(u32, u32)> = (0..s.dim() as u32)
        .flat_map(|a| t.basis_in(s.degree(a) + deg).map(move |b| (a, b)))
        .collect();
    let eqs: Vec<(u32, u32)> = (0..s.dim() as u32)
        .flat_map(|a| t.basis_in(s.degree(a) + c.degree()).map(move |b| (a, b)))
        .collect();
    let eq_index: BTreeMap<(u32, u32), usize> = eqs.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut m = linalg::zeros(field, eqs.len(), vars.len());
    for (j, &(a, b)) in vars.iter().enumerate() {
        let mut e = MultilinearMap::builder(field, s.clone(), t.clone(), 1, deg);
        e.add(&[a], &[b], field.one());
        let dx = MultilinearMap::hom_differential(&e.build()?, &src.diff, &tgt.diff)?;
        for (inp, row) in dx.decoded() {
            for (out, x) in row {
                m[eq_index[&(inp[0], out[0])]][j] = x;
            }
        }
    }
    let rhs: Vec<Scalar> = eqs.iter().map(|&(a, b)| c.coefficient(&[a], &[b])).collect();
    let Some(x) = linalg::solve(field, &m, vars.len(), &rhs) else { return Ok(None) };
    let mut out = MultilinearMap::builder(field, s.clone(), t.clone(), 1, deg);
    for (&(a, b), xi) in vars.iter().zip(x) {
        out.add(&[a], &[b], xi);
    }
    Ok(Some(out.build()?))
}

/// The classes [fh − lf] in H₁(Hom(V, W)) and [gl − hg] in H₁(Hom(W, V)).
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub fh_lf: MultilinearMap,
    pub fh_lf_vanishes: bool,
    pub gl_hg: MultilinearMap,
    pub gl_hg_vanishes: bool,
}

impl Obstruction {
    pub fn agree(&self) -> bool {
        self.fh_lf_vanishes == self.gl_hg_vanishes
    }
}

pub fn obstruction_class(ctx: &ContractionData) -> Result<Obstruction> {
    let l = ctx.l.as_ref().ok_or_else(|| Error::Input("the obstruction needs a homotopy l on W".into()))?;
    let fh_lf = MultilinearMap::compose(&ctx.f, &ctx.h)?.sub(&MultilinearMap::compose(l, &ctx.f)?)?;
    let gl_hg = MultilinearMap::compose(&ctx.g, l)?.sub(&MultilinearMap::compose(&ctx.h, &ctx.g)?)?;
    for (name, c, s, t) in [("fh − lf", &fh_lf, &ctx.v, &ctx.w), ("gl − hg", &gl_hg, &ctx.w, &ctx.v)] {
        let d = MultilinearMap::hom_differential(c, &s.diff, &t.diff)?;
        if let Some(k) = d.first_support() {
            return Err(Error::Invariant(format!("{name} is not a cycle at {k:?}")));
        }
    }
    let fh_lf_vanishes = hom_preimage(&fh_lf, &ctx.v, &ctx.w)?.is_some();
    let gl_hg_vanishes = hom_preimage(&gl_hg, &ctx.w, &ctx.v)?.is_some();
    Ok(Obstruction { fh_lf, fh_lf_vanishes, gl_hg, gl_hg_vanishes })
}
