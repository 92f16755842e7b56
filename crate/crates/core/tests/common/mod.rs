//! Oracles written independently of the library's algorithms.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hpt::ainfty::Complex;
use hpt::fixtures::{random_transfer_input, rng64, Shape};
use hpt::map::MultilinearMap;
use hpt::scalar::{Field, Scalar};
use hpt::space::GradedSpace;
use hpt::transfer::ContractionData;
use hpt::ainfty::AInftyAlgebra;

pub type Dense = Vec<Vec<Scalar>>;

pub fn fields() -> [Field; 2] {
    [Field::Rational, Field::prime(101).unwrap()]
}

/// The seeded random fixture used throughout: a structure with nonzero μ₃ and a random
/// contraction of its complex.
pub fn fixture(seed: u64, field: Field, cap: usize) -> (AInftyAlgebra, ContractionData) {
    random_transfer_input(&mut rng64(seed), field, Shape::default(), cap).unwrap()
}

/// Matrix of a linear map: rows index the target basis, columns the source basis.
pub fn dense(m: &MultilinearMap) -> Dense {
    assert_eq!(m.arity(), 1);
    let (s, t) = (m.source().dim(), m.target().dim());
    (0..t)
        .map(|b| (0..s).map(|a| m.coefficient(&[a as u32], &[b as u32])).collect())
        .collect()
}

pub fn matmul(field: Field, a: &Dense, b: &Dense, inner: usize, cols: usize) -> Dense {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(field.zero(), |acc, k| acc.add(&row[k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

pub fn sub(a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.sub(q)).collect()).collect()
}

/// Rank by plain row reduction.
pub fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let k = rows[i][c].mul(&inv);
                for j in c..ncols {
                    let v = rows[r][j].mul(&k);
                    rows[i][j] = rows[i][j].sub(&v);
                }
            }
        }
        r += 1;
    }
    r
}

/// Whether the degree-`deg` linear map `c` (src → tgt, dense) is δX for some X of degree
/// deg + 1, where δX = ∂X − (−1)^{|X|} X∂. Decided by comparing ranks.
pub fn is_boundary(field: Field, c: &Dense, deg: i32, src: &Complex, tgt: &Complex) -> bool {
    let (ds, dt) = (dense(&src.diff), dense(&tgt.diff));
    let (ns, nt) = (src.space.dim(), tgt.space.dim());
    let xdeg = deg + 1;
    let sign = field.sign(xdeg % 2 != 0);
    let unknowns: Vec<(usize, usize)> = (0..nt)
        .flat_map(|b| (0..ns).map(move |a| (b, a)))
        .filter(|&(b, a)| tgt.space.degree(b as u32) == src.space.degree(a as u32) + xdeg)
        .collect();
    let mut rows = Vec::new();
    for b in 0..nt {
        for a in 0..ns {
            let mut row: Vec<Scalar> = unknowns
                .iter()
                .map(|&(kb, ka)| {
                    let mut v = field.zero();
                    if ka == a {
                        v = v.add(&dt[b][kb]);
                    }
                    if kb == b {
                        v = v.sub(&sign.mul(&ds[ka][a]));
                    }
                    v
                })
                .collect();
            row.push(c[b][a].clone());
            rows.push(row);
        }
    }
    let augmented = rank(rows.clone());
    let plain = rank(rows.into_iter().map(|mut r| {
        r.pop();
        r
    }).collect());
    plain == augmented
}

/// Vanishing of [fh − lf] and [gl − hg], computed from dense matrices.
pub fn obstruction_oracle(ctx: &ContractionData) -> (bool, bool) {
    let field = ctx.field();
    let (nv, nw) = (ctx.v.space.dim(), ctx.w.space.dim());
    let (f, g, h) = (dense(&ctx.f), dense(&ctx.g), dense(&ctx.h));
    let l = dense(ctx.l.as_ref().unwrap());
    let fh_lf = sub(&matmul(field, &f, &h, nv, nv), &matmul(field, &l, &f, nw, nv));
    let gl_hg = sub(&matmul(field, &g, &l, nw, nw), &matmul(field, &h, &g, nv, nw));
    (
        is_boundary(field, &fh_lf, 1, &ctx.v, &ctx.w),
        is_boundary(field, &gl_hg, 1, &ctx.w, &ctx.v),
    )
}

/// Planar trees with n leaves and every vertex of arity at least two, counted by the
/// first-principles recursion over the root arity.
pub fn count_planar_trees(n: usize) -> u64 {
    let mut t = vec![0u64; n + 1];
    t[1] = 1;
    for m in 2..=n {
        // f[k][j]: ordered forests of k trees with j leaves in total.
        let mut total = 0;
        let mut forests = vec![0u64; m + 1];
        forests[0] = 1;
        for k in 1..=m {
            let mut next = vec![0u64; m + 1];
            for j in 0..=m {
                if forests[j] == 0 {
                    continue;
                }
                for s in 1..=m - j {
                    next[j + s] += forests[j] * t[s];
                }
            }
            forests = next;
            if k >= 2 {
                total += forests[m];
            }
        }
        t[m] = total;
    }
    t[n]
}

/// Exterior algebra on a, b, c: words are sorted letter strings.
pub type Ext = BTreeMap<String, i64>;

pub fn ext_mul(x: &Ext, y: &Ext) -> Ext {
    let mut out = Ext::new();
    for (wx, cx) in x {
        for (wy, cy) in y {
            if wx.chars().any(|ch| wy.contains(ch)) {
                continue;
            }
            let mut letters: Vec<char> = wx.chars().chain(wy.chars()).collect();
            let mut inversions = 0;
            for i in 0..letters.len() {
                for j in i + 1..letters.len() {
                    if letters[i] > letters[j] {
                        inversions += 1;
                    }
                }
            }
            letters.sort();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            *out.entry(letters.into_iter().collect()).or_insert(0) += sign * cx * cy;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

pub fn word(w: &str) -> Ext {
    Ext::from([(w.to_string(), 1)])
}

/// Every letter has degree −1.
pub fn ext_degree(w: &str) -> i32 {
    -(w.len() as i32)
}

/// The homotopy of the minimal-model contraction of HEIS: ab ↦ −c, zero elsewhere.
pub fn heis_h(x: &Ext) -> Ext {
    let mut out = Ext::new();
    if let Some(&k) = x.get("ab") {
        out.insert("c".into(), -k);
    }
    out
}

/// Projection onto the homology representatives 1, a, b, ac, bc, abc (ab and c go to 0).
pub fn heis_f(x: &Ext) -> Ext {
    x.iter()
        .filter(|(w, _)| ["", "a", "b", "ac", "bc", "abc"].contains(&w.as_str()))
        .map(|(w, c)| (w.clone(), *c))
        .collect()
}

/// ν₂(x, y) = f(xy) on representatives.
pub fn heis_nu2(x: &str, y: &str) -> Ext {
    heis_f(&ext_mul(&word(x), &word(y)))
}

/// ν₃ = f p₃ g^{⊗3} with p₃ = μ₂(hμ₂ ⊗ id) − μ₂(id ⊗ hμ₂), expanded by hand;
/// the Koszul sign of id ⊗ hμ₂ on x ⊗ y ⊗ z is (−1)^{|x|}.
pub fn heis_nu3(x: &str, y: &str, z: &str) -> Ext {
    let (x, y, z) = (word(x), word(y), word(z));
    let first = ext_mul(&heis_h(&ext_mul(&x, &y)), &z);
    let second = ext_mul(&x, &heis_h(&ext_mul(&y, &z)));
    let koszul = if ext_degree(x.keys().next().unwrap()) % 2 == 0 { 1 } else { -1 };
    let mut total = first;
    for (w, c) in second {
        *total.entry(w).or_insert(0) -= koszul * c;
    }
    total.retain(|_, v| *v != 0);
    heis_f(&total)
}

/// A representative word for each homology label "[w]" ("[1]" is the empty word).
pub fn heis_rep(label: &str) -> String {
    let w = label.trim_start_matches('[').trim_end_matches(']');
    if w == "1" {
        String::new()
    } else {
        w.to_string()
    }
}

/// Checks a map on W against a word-valued oracle; returns the first mismatch.
pub fn compare_with_oracle(
    m: &MultilinearMap,
    w: &GradedSpace,
    oracle: impl Fn(&[String]) -> Ext,
) -> Option<String> {
    let field = m.field();
    let n = m.arity();
    let dim = w.dim() as u32;
    let mut tuple = vec![0u32; n];
    loop {
        let words: Vec<String> = tuple.iter().map(|&g| heis_rep(w.label(g))).collect();
        let expected = oracle(&words);
        for out in 0..dim {
            let ow = heis_rep(w.label(out));
            let e = field.from_i64(*expected.get(&ow).unwrap_or(&0));
            let got = m.coefficient(&tuple, &[out]);
            if e != got {
                return Some(format!("{words:?} -> {ow}: expected {e}, got {got}"));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < dim {
                break;
            }
            tuple[i] = 0;
        }
    }
}
