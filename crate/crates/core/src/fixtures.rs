//! Small named complexes and seeded random inputs.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ainfty::{AInftyAlgebra, Complex};
use crate::error::{Error, Result};
use crate::linalg;
use crate::map::MultilinearMap;
use crate::minimal::HodgeDecomposition;
use crate::scalar::{Field, Scalar};
use crate::space::GradedSpace;
use crate::transfer::{transfer_structure, ContractionData};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng64(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labelled(spec: &[(i32, &[&str])]) -> Arc<GradedSpace> {
    let dims = spec.iter().map(|(d, ls)| (*d, ls.len())).collect();
    let labels = spec.iter().map(|(d, ls)| (*d, ls.iter().map(|s| s.to_string()).collect())).collect();
    Arc::new(GradedSpace::with_labels(dims, labels).expect("fixture labels are consistent"))
}

/// y₀ in degree 0, x₁ in degree 1, ∂x₁ = y₀.
pub fn e1(field: Field) -> Complex {
    let space = labelled(&[(0, &["y0"]), (1, &["x1"])]);
    let mut d = MultilinearMap::builder(field, space.clone(), space.clone(), 1, -1);
    d.add(&[1], &[0], field.one());
    Complex::new(space, d.build().expect("E1 differential")).expect("E1 is a complex")
}

/// E1 as an A∞-algebra with zero operations.
pub fn e1_algebra(field: Field, cap: usize) -> AInftyAlgebra {
    AInftyAlgebra::new(e1(field), BTreeMap::new(), cap).expect("E1 algebra")
}

const HEIS_BASIS: [&str; 8] = ["1", "a", "b", "c", "ab", "ac", "bc", "abc"];

/// Exterior algebra on a, b, c in degree −1 with ∂c = ab; μ₂ is the exterior product.
pub fn heis(field: Field, cap: usize) -> AInftyAlgebra {
    let space = labelled(&[(-3, &["abc"]), (-2, &["ab", "ac", "bc"]), (-1, &["a", "b", "c"]), (0, &["1"])]);
    let id = |s: &str| space.find_label(s).expect("basis label");
    let gens = |s: &str| -> Vec<char> { if s == "1" { Vec::new() } else { s.chars().collect() } };
    let mut d = MultilinearMap::builder(field, space.clone(), space.clone(), 1, -1);
    d.add(&[id("c")], &[id("ab")], field.one());
    let mut mu = MultilinearMap::builder(field, space.clone(), space.clone(), 2, 0);
    for x in HEIS_BASIS {
        for y in HEIS_BASIS {
            let (gx, gy) = (gens(x), gens(y));
            if gx.iter().any(|c| gy.contains(c)) {
                continue;
            }
            let mut word: Vec<char> = gx.iter().chain(&gy).copied().collect();
            let mut odd = false;
            for i in 0..word.len() {
                for j in 0..word.len() - 1 - i {
                    if word[j] > word[j + 1] {
                        word.swap(j, j + 1);
                        odd = !odd;
                    }
                }
            }
            let w: String = word.into_iter().collect();
            let w = if w.is_empty() { "1".to_string() } else { w };
            mu.add(&[id(x), id(y)], &[id(&w)], field.sign(odd));
        }
    }
    let complex = Complex::new(space, d.build().expect("HEIS differential")).expect("HEIS is a complex");
    let ops = BTreeMap::from([(2, mu.build().expect("HEIS product"))]);
    AInftyAlgebra::new(complex, ops, cap).expect("HEIS algebra")
}

/// A nonzero scalar from a small symmetric range.
pub fn small_scalar(rng: &mut Rng64, field: Field) -> Scalar {
    loop {
        let x = rng.gen_range(-3i64..=3);
        if x != 0 {
            return field.from_i64(x);
        }
    }
}

fn random_vector(rng: &mut Rng64, field: Field, n: usize, density: f64) -> Vec<Scalar> {
    (0..n)
        .map(|_| if rng.gen_bool(density) { small_scalar(rng, field) } else { field.zero() })
        .collect()
}

/// Upper-triangular endomorphisms of a graded space U with generators in degrees `udegs`
/// (ascending), the commutator differential [d, −] of a random square-zero d of degree −1
/// on U, and matrix multiplication.
pub fn matrix_dga(rng: &mut Rng64, field: Field, udegs: &[i32], cap: usize) -> Result<AInftyAlgebra> {
    let m = udegs.len();
    let basis: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let deg = |(i, j): (usize, usize)| udegs[i] - udegs[j];
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&t| (deg(basis[t]), t));
    let degs: Vec<i32> = order.iter().map(|&t| deg(basis[t])).collect();
    let space = Arc::new(GradedSpace::from_degrees(&degs));
    let mut idx = BTreeMap::new();
    for (g, &t) in order.iter().enumerate() {
        idx.insert(basis[t], g as u32);
    }
    let mut dmat: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for _ in 0..1000 {
        dmat.clear();
        for i in 0..m {
            for j in i + 1..m {
                if udegs[i] == udegs[j] - 1 && rng.gen_bool(0.7) {
                    dmat.insert((i, j), small_scalar(rng, field));
                }
            }
        }
        let square_zero = (0..m).all(|i| {
            (0..m).all(|j| {
                (0..m)
                    .filter_map(|k| Some(dmat.get(&(i, k))?.mul(dmat.get(&(k, j))?)))
                    .fold(field.zero(), |a, x| a.add(&x))
                    .is_zero()
            })
        });
        if square_zero {
            break;
        }
    }
    let mut d = MultilinearMap::builder(field, space.clone(), space.clone(), 1, -1);
    for &(i, j) in &basis {
        let odd = deg((i, j)).rem_euclid(2) == 1;
        for (&(p, q), c) in &dmat {
            if q == i {
                d.add(&[idx[&(i, j)]], &[idx[&(p, j)]], c.clone());
            }
            if p == j {
                d.add(&[idx[&(i, j)]], &[idx[&(i, q)]], c.signed(!odd));
            }
        }
    }
    let mut mu = MultilinearMap::builder(field, space.clone(), space.clone(), 2, 0);
    for &(i, j) in &basis {
        for &(k, l) in &basis {
            if j == k {
                mu.add(&[idx[&(i, j)], idx[&(k, l)]], &[idx[&(i, l)]], field.one());
            }
        }
    }
    let complex = Complex::new(space, d.build()?)?;
    AInftyAlgebra::new(complex, BTreeMap::from([(2, mu.build()?)]), cap)
}

/// Splitting with random complements, keeping each contractible pair with probability `keep`.
pub fn random_contraction(rng: &mut Rng64, c: &Complex, keep: f64) -> Result<ContractionData> {
    let hd = random_hodge(rng, c)?;
    let mut kept = BTreeMap::new();
    for (&d, part) in &hd.parts {
        kept.insert(d, (0..part.d.len()).map(|_| rng.gen_bool(keep)).collect::<Vec<bool>>());
    }
    hd.contraction_keeping(&kept)
}

pub fn random_hodge(rng: &mut Rng64, c: &Complex) -> Result<HodgeDecomposition> {
    let field = c.field();
    let dims: BTreeMap<i32, usize> = c.space.dims().clone();
    let d_cands: BTreeMap<i32, Vec<Vec<Scalar>>> = dims
        .iter()
        .map(|(&d, &n)| (d, (0..n + 2).map(|_| random_vector(rng, field, n, 0.6)).collect()))
        .collect();
    let mut w_rng = rng64(rng.gen());
    HodgeDecomposition::with_candidates(
        c,
        |d| d_cands.get(&d).cloned().unwrap_or_default(),
        |_, z| {
            let mut out: Vec<Vec<Scalar>> = (0..3)
                .map(|_| {
                    let n = z.first().map_or(0, Vec::len);
                    let mut v = vec![field.zero(); n];
                    for zi in z {
                        let c = small_scalar(&mut w_rng, field);
                        for (x, y) in v.iter_mut().zip(zi) {
                            *x = x.add(&c.mul(y));
                        }
                    }
                    v
                })
                .collect();
            let mut rest = z.to_vec();
            rest.shuffle(&mut w_rng);
            out.extend(rest);
            out
        },
    )
}

/// A random degree-2 map c on V with a few nonzero entries.
pub fn random_degree_two(rng: &mut Rng64, c: &Complex, entries: usize) -> Result<MultilinearMap> {
    let field = c.field();
    let s = &c.space;
    let pairs: Vec<(u32, u32)> = (0..s.dim() as u32)
        .flat_map(|a| s.basis_in(s.degree(a) + 2).map(move |b| (a, b)))
        .collect();
    let mut m = MultilinearMap::builder(field, s.clone(), s.clone(), 1, 2);
    for _ in 0..entries {
        if let Some(&(a, b)) = pairs.choose(rng) {
            m.add(&[a], &[b], small_scalar(rng, field));
        }
    }
    m.build()
}

/// Replaces h by h + δ(c) for a random degree-2 map c; δ(h) is unchanged.
pub fn perturb_homotopy(rng: &mut Rng64, ctx: &ContractionData, entries: usize) -> Result<ContractionData> {
    let c = random_degree_two(rng, &ctx.v, entries)?;
    let dc = MultilinearMap::hom_differential(&c, &ctx.v.diff, &ctx.v.diff)?;
    let h = ctx.h.add(&dc)?;
    ContractionData::new(ctx.v.clone(), ctx.w.clone(), ctx.f.clone(), ctx.g.clone(), h, ctx.l.clone())
}

/// Bounds on a random A∞ fixture: at most `max_dim` basis elements per degree and at
/// most `max_degrees` nonzero degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub max_dim: usize,
    pub max_degrees: usize,
}

impl Default for Shape {
    fn default() -> Shape {
        Shape { max_dim: 3, max_degrees: 4 }
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;

    /// `3x4`: at most three per degree over at most four degrees.
    fn from_str(s: &str) -> Result<Shape> {
        let bad = || Error::Input(format!("shape {s:?} is not of the form <max dim>x<degrees>"));
        let (a, b) = s.split_once('x').ok_or_else(bad)?;
        Ok(Shape { max_dim: a.trim().parse().map_err(|_| bad())?, max_degrees: b.trim().parse().map_err(|_| bad())? })
    }
}

impl Shape {
    pub fn admits(&self, s: &GradedSpace) -> bool {
        s.dims().len() <= self.max_degrees && s.dims().values().all(|&n| n <= self.max_dim)
    }
}

/// A random A∞-algebra with nonzero higher operations: a random matrix dga transferred
/// along a random contraction, resampled until its space fits `shape`.
pub fn random_ainfty(rng: &mut Rng64, field: Field, shape: Shape, cap: usize) -> Result<AInftyAlgebra> {
    for _ in 0..500 {
        let m = rng.gen_range(4..=5);
        let mut udegs: Vec<i32> = (0..m).map(|_| rng.gen_range(0..=3)).collect();
        udegs.sort();
        if udegs[m - 1] - udegs[0] + 1 < shape.max_degrees.min(4) as i32 {
            continue;
        }
        let dga = matrix_dga(rng, field, &udegs, cap)?;
        if dga.diff().is_zero() {
            continue;
        }
        let ctx = random_contraction(rng, &dga.complex, 0.5)?;
        let degrees = ctx.w.space.dims().len();
        if !shape.admits(&ctx.w.space) || degrees + 1 < shape.max_degrees.min(4) || ctx.w.space.dim() < 5 {
            continue;
        }
        let a = transfer_structure(&ctx, &dga, cap)?;
        if a.ops().keys().any(|&n| n >= 3) {
            return Ok(a);
        }
    }
    Err(Error::Input(format!("no random structure fits {shape:?}")))
}

/// A random A∞-algebra and a random contraction of its complex (contractible pairs kept
/// with probability 0.3).
pub fn random_transfer_input(rng: &mut Rng64, field: Field, shape: Shape, cap: usize) -> Result<(AInftyAlgebra, ContractionData)> {
    let a = random_ainfty(rng, field, shape, cap)?;
    let ctx = random_contraction(rng, &a.complex, 0.3)?;
    Ok((a, ctx))
}

/// A random chain isomorphism f: V → W (W = V with conjugated differential), g = f⁻¹, h = 0.
pub fn chain_isomorphism(rng: &mut Rng64, c: &Complex) -> Result<ContractionData> {
    let field = c.field();
    let s = &c.space;
    let mut fcols: Vec<Vec<Scalar>> = vec![Vec::new(); s.dim()];
    let mut gcols: Vec<Vec<Scalar>> = vec![Vec::new(); s.dim()];
    for (&d, &n) in s.dims() {
        let start = s.basis_in(d).start as usize;
        let (t, ti) = loop {
            let t: linalg::Matrix = (0..n).map(|_| random_vector(rng, field, n, 0.7)).collect();
            if let Some(ti) = linalg::inverse(field, &t) {
                break (t, ti);
            }
        };
        for j in 0..n {
            let mut fc = vec![field.zero(); s.dim()];
            let mut gc = vec![field.zero(); s.dim()];
            for i in 0..n {
                fc[start + i] = t[i][j].clone();
                gc[start + i] = ti[i][j].clone();
            }
            fcols[start + j] = fc;
            gcols[start + j] = gc;
        }
    }
    let w_space = Arc::new(GradedSpace::new(s.dims().clone()));
    let f = MultilinearMap::from_columns(field, s.clone(), w_space.clone(), 0, &fcols)?;
    let g = MultilinearMap::from_columns(field, w_space.clone(), s.clone(), 0, &gcols)?;
    let dw = MultilinearMap::compose(&f, &MultilinearMap::compose(&c.diff, &g)?)?;
    let w = Complex::new(w_space.clone(), dw)?;
    let h = MultilinearMap::zero(field, s.clone(), s.clone(), 1, 1);
    ContractionData::new(c.clone(), w, f, g, h, None)
}

/// Degree-1 cycles in Hom(W, W), as a basis of maps.
pub fn hom_cycles(c: &Complex, degree: i32) -> Result<Vec<MultilinearMap>> {
    let field = c.field();
    let s = &c.space;
    let vars: Vec<(u32, u32)> = (0..s.dim() as u32)
        .flat_map(|a| s.basis_in(s.degree(a) + degree).map(move |b| (a, b)))
        .collect();
    let eqs: Vec<(u32, u32)> = (0..s.dim() as u32)
        .flat_map(|a| s.basis_in(s.degree(a) + degree - 1).map(move |b| (a, b)))
        .collect();
    let eq_index: BTreeMap<(u32, u32), usize> = eqs.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut m = linalg::zeros(field, eqs.len(), vars.len());
    let unit_map = |a: u32, b: u32| {
        let mut e = MultilinearMap::builder(field, s.clone(), s.clone(), 1, degree);
        e.add(&[a], &[b], field.one());
        e.build()
    };
    for (j, &(a, b)) in vars.iter().enumerate() {
        let dx = MultilinearMap::hom_differential(&unit_map(a, b)?, &c.diff, &c.diff)?;
        for (inp, row) in dx.decoded() {
            for (out, x) in row {
                m[eq_index[&(inp[0], out[0])]][j] = x;
            }
        }
    }
    let mut out = Vec::new();
    for v in linalg::nullspace(field, &m, vars.len()) {
        let mut e = MultilinearMap::builder(field, s.clone(), s.clone(), 1, degree);
        for (&(a, b), x) in vars.iter().zip(v) {
            e.add(&[a], &[b], x);
        }
        out.push(e.build()?);
    }
    Ok(out)
}

/// Adds l = fhg + z + δ(x) to a contraction with fg = id_W, where z is a random degree-1
/// cycle (zero when `twist` is false) and x a random degree-2 map on W.
pub fn with_random_l(rng: &mut Rng64, ctx: &ContractionData, twist: bool) -> Result<ContractionData> {
    let field = ctx.field();
    let mut l = MultilinearMap::compose(&ctx.f, &MultilinearMap::compose(&ctx.h, &ctx.g)?)?;
    if twist {
        for z in hom_cycles(&ctx.w, 1)? {
            if rng.gen_bool(0.5) {
                l = l.add_scaled(&z, &small_scalar(rng, field))?;
            }
        }
    }
    let x = random_degree_two(rng, &ctx.w, 2)?;
    l = l.add(&MultilinearMap::hom_differential(&x, &ctx.w.diff, &ctx.w.diff)?)?;
    ContractionData::new(ctx.v.clone(), ctx.w.clone(), ctx.f.clone(), ctx.g.clone(), ctx.h.clone(), Some(l))
}

/// V = W with zero differential, basis e₀ in degree 0 and e₁ in degree 1; f = g = id,
/// h = 0 and l sends e₀ to e₁. The class [fh − lf] = −[l] is not a boundary.
pub fn nonzero_obstruction(field: Field) -> ContractionData {
    let space = labelled(&[(0, &["e0"]), (1, &["e1"])]);
    let c = Complex::with_zero_differential(field, space.clone());
    let id = MultilinearMap::identity(field, space.clone());
    let mut l = MultilinearMap::builder(field, space.clone(), space.clone(), 1, 1);
    l.add(&[0], &[1], field.one());
    let h = MultilinearMap::zero(field, space.clone(), space, 1, 1);
    ContractionData::new(c.clone(), c, id.clone(), id, h, Some(l.build().expect("l"))).expect("valid contraction")
}
