use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::space::{BasisKey, GradedSpace};

/// Sparse output of one input tuple: (output tuple code, coefficient), sorted, no zeros.
pub type Row = Vec<(u64, Scalar)>;

/// Mixed-radix code of a basis tuple: the first factor is the most significant digit,
/// so numeric order is lexicographic order.
pub fn encode(base: u64, tuple: &[u32]) -> u64 {
    tuple.iter().fold(0, |acc, &t| acc * base + t as u64)
}

pub fn decode(base: u64, arity: usize, mut code: u64) -> Vec<u32> {
    let mut out = vec![0u32; arity];
    for slot in out.iter_mut().rev() {
        *slot = (code % base) as u32;
        code /= base;
    }
    out
}

fn radix(space: &GradedSpace) -> u64 {
    space.dim().max(1) as u64
}

fn check_width(space: &GradedSpace, arity: usize) -> Result<()> {
    radix(space)
        .checked_pow(arity as u32)
        .map(|_| ())
        .ok_or_else(|| Error::Input(format!("tensor power {arity} of a {}-dimensional space is too large", space.dim())))
}

fn tuple_degree(space: &GradedSpace, arity: usize, code: u64) -> i32 {
    decode(radix(space), arity, code).iter().map(|&g| space.degree(g)).sum()
}

fn tuple_parity(space: &GradedSpace, arity: usize, code: u64) -> bool {
    tuple_degree(space, arity, code) & 1 == 1
}

/// Homogeneous multilinear map `source^⊗arity → target^⊗out_arity` of a fixed degree,
/// stored sparsely on basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearMap {
    field: Field,
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    arity: usize,
    out_arity: usize,
    degree: i32,
    entries: Vec<(u64, Row)>,
}

/// Accumulates entries of a map before validation.
pub struct MapBuilder {
    field: Field,
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    arity: usize,
    out_arity: usize,
    degree: i32,
    acc: BTreeMap<u64, BTreeMap<u64, Scalar>>,
}

impl MapBuilder {
    pub fn add(&mut self, inputs: &[u32], outputs: &[u32], c: Scalar) {
        assert_eq!(inputs.len(), self.arity, "input arity");
        assert_eq!(outputs.len(), self.out_arity, "output arity");
        let i = encode(radix(&self.source), inputs);
        let o = encode(radix(&self.target), outputs);
        self.add_code(i, o, c);
    }

    pub fn add_code(&mut self, i: u64, o: u64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let row = self.acc.entry(i).or_default();
        match row.get_mut(&o) {
            Some(v) => *v = v.add(&c),
            None => {
                row.insert(o, c);
            }
        }
    }

    /// Validates index ranges and homogeneity.
    pub fn build(self) -> Result<MultilinearMap> {
        let sb = radix(&self.source);
        let tb = radix(&self.target);
        let mut entries = Vec::new();
        for (i, row) in self.acc {
            let ins = decode(sb, self.arity, i);
            if ins.iter().any(|&g| g as usize >= self.source.dim()) {
                return Err(Error::Input(format!("input index out of range in {ins:?}")));
            }
            let din: i32 = ins.iter().map(|&g| self.source.degree(g)).sum();
            let row: Row = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            for (o, _) in &row {
                let outs = decode(tb, self.out_arity, *o);
                if outs.iter().any(|&g| g as usize >= self.target.dim()) {
                    return Err(Error::Input(format!("output index out of range in {outs:?}")));
                }
                let dout: i32 = outs.iter().map(|&g| self.target.degree(g)).sum();
                if dout != din + self.degree {
                    let keys: Vec<BasisKey> = ins.iter().map(|&g| self.source.key(g)).collect();
                    return Err(Error::Invariant(format!(
                        "map of degree {} sends input {keys:?} (degree {din}) to degree {dout}",
                        self.degree
                    )));
                }
            }
            if !row.is_empty() {
                entries.push((i, row));
            }
        }
        Ok(MultilinearMap {
            field: self.field,
            source: self.source,
            target: self.target,
            arity: self.arity,
            out_arity: self.out_arity,
            degree: self.degree,
            entries,
        })
    }
}

impl MultilinearMap {
    pub fn builder(
        field: Field,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        arity: usize,
        degree: i32,
    ) -> MapBuilder {
        MultilinearMap::tensor_builder(field, source, target, arity, 1, degree)
    }

    pub fn tensor_builder(
        field: Field,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        arity: usize,
        out_arity: usize,
        degree: i32,
    ) -> MapBuilder {
        check_width(&source, arity).expect("tensor power fits in 64-bit codes");
        check_width(&target, out_arity).expect("tensor power fits in 64-bit codes");
        MapBuilder { field, source, target, arity, out_arity, degree, acc: BTreeMap::new() }
    }

    pub fn zero(
        field: Field,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        arity: usize,
        degree: i32,
    ) -> MultilinearMap {
        MultilinearMap { field, source, target, arity, out_arity: 1, degree, entries: Vec::new() }
    }

    pub fn identity(field: Field, space: Arc<GradedSpace>) -> MultilinearMap {
        let entries = (0..space.dim() as u64).map(|g| (g, vec![(g, field.one())])).collect();
        MultilinearMap {
            field,
            source: space.clone(),
            target: space,
            arity: 1,
            out_arity: 1,
            degree: 0,
            entries,
        }
    }

    /// Linear map from a dense matrix: column j is the image of basis element j.
    pub fn from_columns(
        field: Field,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        cols: &[Vec<Scalar>],
    ) -> Result<MultilinearMap> {
        let mut b = MultilinearMap::builder(field, source, target, 1, degree);
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                b.add(&[j as u32], &[i as u32], c.clone());
            }
        }
        b.build()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn entries(&self) -> &[(u64, Row)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of stored (input, output) coefficients.
    pub fn nnz(&self) -> usize {
        self.entries.iter().map(|(_, r)| r.len()).sum()
    }

    pub fn row(&self, code: u64) -> Option<&Row> {
        self.entries.binary_search_by_key(&code, |(k, _)| *k).ok().map(|i| &self.entries[i].1)
    }

    /// Entries as decoded (inputs, [(outputs, coefficient)]).
    pub fn decoded(&self) -> Vec<(Vec<u32>, Vec<(Vec<u32>, Scalar)>)> {
        let sb = radix(&self.source);
        let tb = radix(&self.target);
        self.entries
            .iter()
            .map(|(i, row)| {
                let outs = row.iter().map(|(o, c)| (decode(tb, self.out_arity, *o), c.clone())).collect();
                (decode(sb, self.arity, *i), outs)
            })
            .collect()
    }

    /// Value on a basis tuple, as (output tuple, coefficient) pairs.
    pub fn eval_basis(&self, inputs: &[u32]) -> Vec<(Vec<u32>, Scalar)> {
        let tb = radix(&self.target);
        match self.row(encode(radix(&self.source), inputs)) {
            Some(row) => row.iter().map(|(o, c)| (decode(tb, self.out_arity, *o), c.clone())).collect(),
            None => Vec::new(),
        }
    }

    /// Coefficient of `outputs` in the value on `inputs`.
    pub fn coefficient(&self, inputs: &[u32], outputs: &[u32]) -> Scalar {
        let o = encode(radix(&self.target), outputs);
        self.row(encode(radix(&self.source), inputs))
            .and_then(|row| row.iter().find(|(k, _)| *k == o))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.field.zero())
    }

    /// First input tuple with a nonzero value, as basis keys.
    pub fn first_support(&self) -> Option<Vec<BasisKey>> {
        self.entries.first().map(|(i, _)| {
            decode(radix(&self.source), self.arity, *i).iter().map(|&g| self.source.key(g)).collect()
        })
    }

    fn same_kind(&self, o: &MultilinearMap) -> Result<()> {
        if self.field != o.field
            || self.arity != o.arity
            || self.out_arity != o.out_arity
            || self.degree != o.degree
            || !self.source.same_shape(&o.source)
            || !self.target.same_shape(&o.target)
        {
            return Err(Error::Mismatch(format!(
                "cannot add maps of arity {}/{} degree {} and arity {}/{} degree {}",
                self.arity, self.out_arity, self.degree, o.arity, o.out_arity, o.degree
            )));
        }
        Ok(())
    }

    /// `self + c·o`.
    pub fn add_scaled(&self, o: &MultilinearMap, c: &Scalar) -> Result<MultilinearMap> {
        self.same_kind(o)?;
        if c.is_zero() || o.is_zero() {
            return Ok(self.clone());
        }
        let mut out = Vec::with_capacity(self.entries.len() + o.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), o.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((ka, ra)), Some((kb, rb))) if ka == kb => {
                    let row = merge_rows(ra, rb, c);
                    if !row.is_empty() {
                        out.push((*ka, row));
                    }
                    a.next();
                    b.next();
                }
                (Some((ka, ra)), Some((kb, _))) if ka < kb => {
                    out.push((*ka, ra.clone()));
                    a.next();
                }
                (Some((ka, ra)), None) => {
                    out.push((*ka, ra.clone()));
                    a.next();
                }
                (_, Some((kb, rb))) => {
                    out.push((*kb, scale_row(rb, c)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Ok(MultilinearMap { entries: out, ..self.shell() })
    }

    pub fn add(&self, o: &MultilinearMap) -> Result<MultilinearMap> {
        self.add_scaled(o, &self.field.one())
    }

    pub fn sub(&self, o: &MultilinearMap) -> Result<MultilinearMap> {
        self.add_scaled(o, &self.field.from_i64(-1))
    }

    pub fn scale(&self, c: &Scalar) -> MultilinearMap {
        if c.is_zero() {
            return self.shell();
        }
        let entries = self.entries.iter().map(|(k, r)| (*k, scale_row(r, c))).collect();
        MultilinearMap { entries, ..self.shell() }
    }

    pub fn neg(&self) -> MultilinearMap {
        self.scale(&self.field.from_i64(-1))
    }

    /// Same metadata, no entries.
    pub fn shell(&self) -> MultilinearMap {
        MultilinearMap {
            field: self.field,
            source: self.source.clone(),
            target: self.target.clone(),
            arity: self.arity,
            out_arity: self.out_arity,
            degree: self.degree,
            entries: Vec::new(),
        }
    }

    /// The same entries viewed with different space labels (shapes must agree).
    pub fn with_spaces(&self, source: Arc<GradedSpace>, target: Arc<GradedSpace>) -> Result<MultilinearMap> {
        if !source.same_shape(&self.source) || !target.same_shape(&self.target) {
            return Err(Error::Mismatch("relabelled spaces must keep their shape".into()));
        }
        Ok(MultilinearMap { source, target, ..self.clone() })
    }

    /// `outer ∘ inner` where `inner` lands in `outer.source^⊗outer.arity`.
    pub fn compose(outer: &MultilinearMap, inner: &MultilinearMap) -> Result<MultilinearMap> {
        MultilinearMap::compose_blocks(outer, &[inner])
    }

    /// `outer ∘ (b₁ ⊗ … ⊗ b_k)` with Koszul signs: the block `b_j` passing the inputs of
    /// `b₁…b_{j-1}` contributes `(-1)^{|b_j|·Σ|v|}`.
    pub fn compose_blocks(outer: &MultilinearMap, blocks: &[&MultilinearMap]) -> Result<MultilinearMap> {
        let outs: usize = blocks.iter().map(|b| b.out_arity).sum();
        if outs != outer.arity {
            return Err(Error::Mismatch(format!(
                "blocks produce {outs} factors but the outer map has arity {}",
                outer.arity
            )));
        }
        for b in blocks {
            if !b.target.same_shape(&outer.source) || b.field != outer.field {
                return Err(Error::Mismatch("block target differs from outer source".into()));
            }
        }
        let shape = block_shape(blocks)?;
        let degree = outer.degree + blocks.iter().map(|b| b.degree).sum::<i32>();
        let mut result = MultilinearMap {
            field: outer.field,
            source: shape.source,
            target: outer.target.clone(),
            arity: shape.arity,
            out_arity: outer.out_arity,
            degree,
            entries: Vec::new(),
        };
        if blocks.is_empty() {
            return Ok(result);
        }
        check_width(&result.source, result.arity)?;
        result.entries = run_blocks(blocks, Some(outer), outer.field);
        Ok(result)
    }

    /// `outer ∘ (id^{slot-1} ⊗ inner ⊗ id^{k-slot})`, slot counted from 1.
    pub fn compose_insert(outer: &MultilinearMap, inner: &MultilinearMap, slot: usize) -> Result<MultilinearMap> {
        if slot == 0 || slot > outer.arity {
            return Err(Error::Input(format!("slot {slot} outside 1..={}", outer.arity)));
        }
        let id = MultilinearMap::identity(outer.field, inner.target.clone());
        let mut blocks: Vec<&MultilinearMap> = vec![&id; outer.arity - inner.out_arity + 1];
        blocks[slot - 1] = inner;
        MultilinearMap::compose_blocks(outer, &blocks)
    }

    /// `m₁ ⊗ … ⊗ m_k` as a single map with Koszul signs.
    pub fn tensor_many(maps: &[&MultilinearMap]) -> Result<MultilinearMap> {
        let first = maps.first().ok_or_else(|| Error::Input("tensor of no maps".into()))?;
        for m in maps {
            if !m.target.same_shape(&first.target) || m.field != first.field {
                return Err(Error::Mismatch("tensor factors must share a target".into()));
            }
        }
        let shape = block_shape(maps)?;
        let out_arity = maps.iter().map(|m| m.out_arity).sum();
        check_width(&shape.source, shape.arity)?;
        check_width(&first.target, out_arity)?;
        Ok(MultilinearMap {
            field: first.field,
            source: shape.source,
            target: first.target.clone(),
            arity: shape.arity,
            out_arity,
            degree: maps.iter().map(|m| m.degree).sum(),
            entries: run_blocks(maps, None, first.field),
        })
    }

    /// The hom-complex differential `δF = ∂∘F − (-1)^{|F|} Σᵢ F∘(id^{i-1}⊗∂⊗id^{n-i})`.
    pub fn hom_differential(
        f: &MultilinearMap,
        source_diff: &MultilinearMap,
        target_diff: &MultilinearMap,
    ) -> Result<MultilinearMap> {
        for d in [source_diff, target_diff] {
            if d.arity != 1 || d.degree != -1 {
                return Err(Error::Input("a differential must be linear of degree -1".into()));
            }
        }
        if f.out_arity != 1 {
            return Err(Error::Input("hom differential of a tensor-valued map".into()));
        }
        let mut out = MultilinearMap::compose(target_diff, f)?;
        let sign = f.field.sign(f.degree & 1 == 0);
        for i in 1..=f.arity {
            let t = MultilinearMap::compose_insert(f, source_diff, i)?;
            out = out.add_scaled(&t, &sign)?;
        }
        Ok(out)
    }

    /// Value on homogeneous elements, with no sign: the map is applied last.
    pub fn apply(&self, elements: &[GradedVector]) -> Result<Tensor> {
        koszul_apply(&[self], elements)
    }
}

struct BlockShape {
    source: Arc<GradedSpace>,
    arity: usize,
}

fn block_shape(blocks: &[&MultilinearMap]) -> Result<BlockShape> {
    let source = match blocks.first() {
        Some(b) => b.source.clone(),
        None => Arc::new(GradedSpace::zero()),
    };
    for b in blocks {
        if !b.source.same_shape(&source) {
            return Err(Error::Mismatch("tensor blocks must share a source".into()));
        }
    }
    Ok(BlockShape { arity: blocks.iter().map(|b| b.arity).sum(), source })
}

fn scale_row(r: &Row, c: &Scalar) -> Row {
    if c.is_one() {
        return r.clone();
    }
    r.iter().map(|(k, v)| (*k, v.mul(c))).collect()
}

fn merge_rows(a: &Row, b: &Row, c: &Scalar) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, b[j].1.mul(c)));
            j += 1;
        } else {
            let v = a[i].1.add(&b[j].1.mul(c));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

struct BlockData<'a> {
    map: &'a MultilinearMap,
    in_mult: u64,
    out_mult: u64,
    parities: Vec<bool>,
}

/// Enumerates all tuples of block entries in lexicographic order, so input codes come out sorted.
fn run_blocks(blocks: &[&MultilinearMap], outer: Option<&MultilinearMap>, field: Field) -> Vec<(u64, Row)> {
    let sb = radix(&blocks[0].source);
    let tb = radix(&blocks[0].target);
    let data: Vec<BlockData> = blocks
        .iter()
        .map(|b| BlockData {
            map: b,
            in_mult: sb.pow(b.arity as u32),
            out_mult: tb.pow(b.out_arity as u32),
            parities: b.entries.iter().map(|(k, _)| tuple_parity(&b.source, b.arity, *k)).collect(),
        })
        .collect();
    if data.iter().any(|d| d.map.entries.is_empty()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut rows: Vec<&Row> = Vec::with_capacity(blocks.len());
    pick(&data, 0, 0, false, false, &mut rows, outer, field, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn pick<'a>(
    data: &'a [BlockData],
    j: usize,
    code: u64,
    parity: bool,
    sign: bool,
    rows: &mut Vec<&'a Row>,
    outer: Option<&MultilinearMap>,
    field: Field,
    out: &mut Vec<(u64, Row)>,
) {
    if j == data.len() {
        let mut acc: Vec<(u64, Scalar)> = Vec::new();
        expand(rows, 0, 0, field.sign(sign), outer, data, &mut acc);
        let row = consolidate(acc);
        if !row.is_empty() {
            out.push((code, row));
        }
        return;
    }
    let d = &data[j];
    let flip = d.map.degree & 1 == 1 && parity;
    for (e, (k, r)) in d.map.entries.iter().enumerate() {
        rows.push(r);
        pick(data, j + 1, code * d.in_mult + k, parity ^ d.parities[e], sign ^ flip, rows, outer, field, out);
        rows.pop();
    }
}

fn expand(
    rows: &[&Row],
    j: usize,
    code: u64,
    coef: Scalar,
    outer: Option<&MultilinearMap>,
    data: &[BlockData],
    acc: &mut Vec<(u64, Scalar)>,
) {
    if j == rows.len() {
        match outer {
            Some(m) => {
                if let Some(r) = m.row(code) {
                    for (o, c) in r {
                        acc.push((*o, c.mul(&coef)));
                    }
                }
            }
            None => acc.push((code, coef)),
        }
        return;
    }
    for (o, c) in rows[j] {
        expand(rows, j + 1, code * data[j].out_mult + o, coef.mul(c), outer, data, acc);
    }
}

fn consolidate(mut acc: Vec<(u64, Scalar)>) -> Row {
    acc.sort_by_key(|(k, _)| *k);
    let mut out: Row = Vec::with_capacity(acc.len());
    for (k, c) in acc {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc = lc.add(&c),
            _ => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Sparse element of a single graded space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVector {
    pub space: Arc<GradedSpace>,
    pub entries: Vec<(u32, Scalar)>,
}

impl GradedVector {
    pub fn basis(space: Arc<GradedSpace>, field: Field, g: u32) -> GradedVector {
        GradedVector { space, entries: vec![(g, field.one())] }
    }

    pub fn from_pairs(space: Arc<GradedSpace>, pairs: impl IntoIterator<Item = (u32, Scalar)>) -> GradedVector {
        let mut m: BTreeMap<u32, Scalar> = BTreeMap::new();
        for (g, c) in pairs {
            let e = m.entry(g).or_insert_with(|| c.field().zero());
            *e = e.add(&c);
        }
        GradedVector { space, entries: m.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// The degree if the vector is nonzero and homogeneous.
    pub fn degree(&self) -> Option<i32> {
        let mut ds = self.entries.iter().map(|(g, _)| self.space.degree(*g));
        let d = ds.next()?;
        ds.all(|e| e == d).then_some(d)
    }

    pub fn component(&self, deg: i32) -> GradedVector {
        GradedVector {
            space: self.space.clone(),
            entries: self.entries.iter().filter(|(g, _)| self.space.degree(*g) == deg).cloned().collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Sparse element of a tensor power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub arity: usize,
    pub entries: BTreeMap<Vec<u32>, Scalar>,
}

impl Tensor {
    pub fn into_vector(self, space: Arc<GradedSpace>) -> GradedVector {
        assert_eq!(self.arity, 1);
        GradedVector::from_pairs(space, self.entries.into_iter().map(|(k, c)| (k[0], c)))
    }
}

/// `(f₁⊗…⊗f_k)(v₁⊗…⊗v_n)` with sign `(-1)^{Σ_{i<j} |f_j||v_i|}`, evaluated directly on elements.
pub fn koszul_apply(maps: &[&MultilinearMap], elements: &[GradedVector]) -> Result<Tensor> {
    let total: usize = maps.iter().map(|m| m.arity).sum();
    if total != elements.len() {
        return Err(Error::Input(format!(
            "maps take {total} inputs but {} elements were given",
            elements.len()
        )));
    }
    let mut degs = Vec::with_capacity(elements.len());
    for v in elements {
        match v.degree() {
            Some(d) => degs.push(d),
            None if v.is_zero() => {
                return Ok(Tensor { arity: maps.iter().map(|m| m.out_arity).sum(), entries: BTreeMap::new() })
            }
            None => return Err(Error::Input("inhomogeneous input element".into())),
        }
    }
    let field = maps.first().map(|m| m.field).unwrap_or(Field::Rational);
    let mut result: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), field.one())];
    let mut start = 0;
    let mut passed = 0i32;
    for m in maps {
        let sign = field.sign(m.degree & 1 == 1 && passed & 1 == 1);
        let mut vals: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), sign)];
        for v in &elements[start..start + m.arity] {
            vals = vals
                .iter()
                .flat_map(|(t, c)| {
                    v.entries.iter().map(move |(g, d)| {
                        let mut t = t.clone();
                        t.push(*g);
                        (t, c.mul(d))
                    })
                })
                .collect();
        }
        let mut image: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        for (t, c) in vals {
            for (o, d) in m.eval_basis(&t) {
                let e = image.entry(o).or_insert_with(|| field.zero());
                *e = e.add(&c.mul(&d));
            }
        }
        result = result
            .iter()
            .flat_map(|(t, c)| {
                image.iter().map(move |(o, d)| {
                    let mut t = t.clone();
                    t.extend_from_slice(o);
                    (t, c.mul(d))
                })
            })
            .collect();
        passed += degs[start..start + m.arity].iter().sum::<i32>();
        start += m.arity;
    }
    let mut entries: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
    for (t, c) in result {
        let e = entries.entry(t).or_insert_with(|| field.zero());
        *e = e.add(&c);
    }
    entries.retain(|_, c| !c.is_zero());
    Ok(Tensor { arity: maps.iter().map(|m| m.out_arity).sum(), entries })
}

/// Result of checking `∂∘∂ = 0`.
#[derive(Clone, Debug)]
pub struct ComplexReport {
    pub violations: Vec<BasisKey>,
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_complex(space: &GradedSpace, diff: &MultilinearMap) -> Result<ComplexReport> {
    if diff.arity != 1 || diff.degree != -1 || !diff.source.same_shape(space) || !diff.target.same_shape(space) {
        return Err(Error::Input("a differential must be a degree -1 endomorphism".into()));
    }
    let sq = MultilinearMap::compose(diff, diff)?;
    Ok(ComplexReport { violations: sq.entries.iter().map(|(k, _)| space.key(*k as u32)).collect() })
}
