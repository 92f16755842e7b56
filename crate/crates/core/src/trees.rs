//! Planar trees indexing the non-inductive kernel formulas.
//!
//! Canonical text: a leaf is `.`, a vertex is `(` followed by its inputs and `)`.
//! In decorated trees an input may carry a mark prefix: `o` for h and `*` for gf.
//! The fourth tree with four leaves is `((..)(..))`; the two decorated trees with
//! two leaves are `(o..)` and `(*.o.)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::ainfty::AInftyAlgebra;
use crate::error::{Error, Result};
use crate::index::{compositions, enumerate_index_set, theta_sign, IndexKind, IndexTuple};
use crate::map::MultilinearMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlanarTree {
    Leaf,
    Node(Vec<PlanarTree>),
}

/// Trees of P_n: every vertex has arity at least two and every internal edge stands for h.
pub type PTree = PlanarTree;

impl PlanarTree {
    pub fn corolla(k: usize) -> PlanarTree {
        PlanarTree::Node(vec![PlanarTree::Leaf; k])
    }

    pub fn leaves(&self) -> usize {
        match self {
            PlanarTree::Leaf => 1,
            PlanarTree::Node(cs) => cs.iter().map(PlanarTree::leaves).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            PlanarTree::Leaf => 0,
            PlanarTree::Node(cs) => 1 + cs.iter().map(PlanarTree::vertex_count).sum::<usize>(),
        }
    }

    pub fn children(&self) -> &[PlanarTree] {
        match self {
            PlanarTree::Leaf => &[],
            PlanarTree::Node(cs) => cs,
        }
    }

    /// Vertex arities in pre-order.
    pub fn arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn walk(t: &PlanarTree, out: &mut Vec<usize>) {
            if let PlanarTree::Node(cs) = t {
                out.push(cs.len());
                cs.iter().for_each(|c| walk(c, out));
            }
        }
        walk(self, &mut out);
        out
    }

    /// Word such as `m2(hm2(1,1),1)`: `1` is an input, `h` precedes an internal edge.
    pub fn monomial(&self) -> String {
        match self {
            PlanarTree::Leaf => "1".into(),
            PlanarTree::Node(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| match c {
                        PlanarTree::Leaf => "1".into(),
                        n => format!("h{}", n.monomial()),
                    })
                    .collect();
                format!("m{}({})", cs.len(), parts.join(","))
            }
        }
    }
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarTree::Leaf => f.write_str("."),
            PlanarTree::Node(cs) => {
                f.write_str("(")?;
                for c in cs {
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for PlanarTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<PlanarTree> {
        let q: QTree = s.parse()?;
        if q.has_marks() {
            return Err(Error::Input(format!("undecorated tree expected, got {s:?}")));
        }
        Ok(q.shape())
    }
}

/// ϑ(T): the sum of ϑ over the input leaf counts of every vertex.
pub fn theta_tree(t: &PlanarTree) -> bool {
    match t {
        PlanarTree::Leaf => false,
        PlanarTree::Node(cs) => {
            let counts: Vec<usize> = cs.iter().map(PlanarTree::leaves).collect();
            cs.iter().fold(theta_sign(&counts), |acc, c| acc ^ theta_tree(c))
        }
    }
}

/// All trees with `n` leaves whose vertices have arity at least two, sorted by canonical text.
/// For n = 1 this is the single leaf.
pub fn enumerate_planar_trees(n: usize) -> Vec<PlanarTree> {
    let mut memo = HashMap::new();
    let mut out = planar(n, &mut memo);
    out.sort_by_key(|t| t.to_string());
    out
}

pub fn enumerate_p_trees(n: usize) -> Vec<PTree> {
    if n < 2 {
        return Vec::new();
    }
    enumerate_planar_trees(n)
}

fn planar(n: usize, memo: &mut HashMap<usize, Vec<PlanarTree>>) -> Vec<PlanarTree> {
    if n == 1 {
        return vec![PlanarTree::Leaf];
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut out = Vec::new();
    for k in 2..=n {
        for r in compositions(n, k) {
            let parts: Vec<Vec<PlanarTree>> = r.iter().map(|&x| planar(x, memo)).collect();
            for combo in product(&parts) {
                out.push(PlanarTree::Node(combo));
            }
        }
    }
    memo.insert(n, out.clone());
    out
}

fn product<T: Clone>(parts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::with_capacity(parts.len())];
    for p in parts {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for prefix in &out {
            for x in p {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Flattened tree: nodes (vertices and leaves) in pre-order.
struct Flat {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    end: Vec<usize>,
    height: Vec<usize>,
    vertices: Vec<usize>,
}

impl Flat {
    fn new(t: &PlanarTree) -> Flat {
        let mut f = Flat { parent: Vec::new(), children: Vec::new(), end: Vec::new(), height: Vec::new(), vertices: Vec::new() };
        f.push(t, None);
        let nv = f.vertices.len();
        for (rank, &v) in f.vertices.iter().enumerate() {
            f.height[v] = nv - rank;
        }
        f
    }

    fn push(&mut self, t: &PlanarTree, parent: Option<usize>) -> usize {
        let id = self.parent.len();
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.end.push(id);
        self.height.push(0);
        if let PlanarTree::Node(cs) = t {
            self.vertices.push(id);
            for c in cs {
                let cid = self.push(c, Some(id));
                self.children[id].push(cid);
            }
        }
        self.end[id] = self.parent.len() - 1;
        id
    }

    fn is_vertex(&self, id: usize) -> bool {
        !self.children[id].is_empty()
    }

    /// Edges (named by their lower node) met by the line drawn just below vertex `v`:
    /// the inputs of `v` and the edges to its right passing its level, left to right.
    fn line(&self, v: usize) -> Vec<usize> {
        let hv = self.height[v];
        let mut out = self.children[v].clone();
        for e in self.end[v] + 1..self.parent.len() {
            let p = self.parent[e].expect("only the root has no parent");
            if self.height[e] < hv && hv <= self.height[p] {
                out.push(e);
            }
        }
        out
    }
}

/// Order numbers of the vertices listed in pre-order: the root is largest, every vertex
/// exceeds those below it, and a left branch exceeds the branches to its right.
pub fn vertex_order(t: &PlanarTree) -> Vec<usize> {
    let f = Flat::new(t);
    f.vertices.iter().map(|&v| f.height[v]).collect()
}

/// Edge marks. The mark of a node is the decoration of the edge above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Plain,
    /// the homotopy h
    H,
    /// the composite gf
    Gf,
}

impl Mark {
    fn prefix(self) -> &'static str {
        match self {
            Mark::Plain => "",
            Mark::H => "o",
            Mark::Gf => "*",
        }
    }

    fn word(self) -> &'static str {
        match self {
            Mark::Plain => "",
            Mark::H => "h",
            Mark::Gf => "G",
        }
    }
}

/// A decorated tree of Q_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QTree {
    Leaf(Mark),
    Node(Mark, Vec<QTree>),
}

impl QTree {
    pub fn mark(&self) -> Mark {
        match self {
            QTree::Leaf(m) | QTree::Node(m, _) => *m,
        }
    }

    fn with_mark(mut self, m: Mark) -> QTree {
        match &mut self {
            QTree::Leaf(x) | QTree::Node(x, _) => *x = m,
        }
        self
    }

    pub fn leaves(&self) -> usize {
        match self {
            QTree::Leaf(_) => 1,
            QTree::Node(_, cs) => cs.iter().map(QTree::leaves).sum(),
        }
    }

    pub fn shape(&self) -> PlanarTree {
        match self {
            QTree::Leaf(_) => PlanarTree::Leaf,
            QTree::Node(_, cs) => PlanarTree::Node(cs.iter().map(QTree::shape).collect()),
        }
    }

    fn has_marks(&self) -> bool {
        match self {
            QTree::Leaf(m) => *m != Mark::Plain,
            QTree::Node(m, cs) => *m != Mark::Plain || cs.iter().any(QTree::has_marks),
        }
    }

    /// Degree of the flow-chart map: Σ(arity − 2) over vertices plus the number of h marks.
    pub fn degree(&self) -> i32 {
        let own = (self.mark() == Mark::H) as i32;
        match self {
            QTree::Leaf(_) => own,
            QTree::Node(_, cs) => own + cs.len() as i32 - 2 + cs.iter().map(QTree::degree).sum::<i32>(),
        }
    }

    /// Word such as `m2(G,h)`: `1` is an input, `h` and `G` stand for h and gf.
    pub fn monomial(&self) -> String {
        match self {
            QTree::Leaf(Mark::Plain) => "1".into(),
            QTree::Leaf(m) => m.word().into(),
            QTree::Node(m, cs) => {
                let parts: Vec<String> = cs.iter().map(QTree::monomial).collect();
                format!("{}m{}({})", m.word(), cs.len(), parts.join(","))
            }
        }
    }
}

impl fmt::Display for QTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mark().prefix())?;
        match self {
            QTree::Leaf(_) => f.write_str("."),
            QTree::Node(_, cs) => {
                f.write_str("(")?;
                for c in cs {
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for QTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<QTree> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_q(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Input(format!("trailing characters in tree {s:?}")));
        }
        Ok(t)
    }
}

fn parse_q(c: &[char], pos: &mut usize) -> Result<QTree> {
    let bad = |p: usize| Error::Input(format!("malformed tree text at position {p}"));
    let mark = match c.get(*pos) {
        Some('o') => Mark::H,
        Some('*') | Some('•') => Mark::Gf,
        _ => Mark::Plain,
    };
    if mark != Mark::Plain {
        *pos += 1;
    }
    match c.get(*pos) {
        Some('.') => {
            *pos += 1;
            Ok(QTree::Leaf(mark))
        }
        Some('(') => {
            *pos += 1;
            let mut cs = Vec::new();
            while c.get(*pos) != Some(&')') {
                if *pos >= c.len() {
                    return Err(bad(*pos));
                }
                cs.push(parse_q(c, pos)?);
            }
            *pos += 1;
            if cs.len() < 2 {
                return Err(Error::Input("vertices must have at least two inputs".into()));
            }
            Ok(QTree::Node(mark, cs))
        }
        _ => Err(bad(*pos)),
    }
}

/// Q_n by the decoration rules, sorted by canonical text. Every line crossing reads
/// gf…gf h followed by undecorated crossings, each edge is decorated at most once and
/// every internal edge is decorated. Q_1 is the single leaf.
pub fn enumerate_q_trees(n: usize) -> Vec<QTree> {
    if n == 1 {
        return vec![QTree::Leaf(Mark::Plain)];
    }
    let mut out = Vec::new();
    for t in enumerate_p_trees(n) {
        let f = Flat::new(&t);
        let lines: Vec<Vec<usize>> = f.vertices.iter().map(|&v| f.line(v)).collect();
        let mut marks = vec![Mark::Plain; f.parent.len()];
        decorate(&f, &lines, 0, &mut marks, &mut out);
    }
    out.sort_by_key(|t| t.to_string());
    out
}

fn decorate(f: &Flat, lines: &[Vec<usize>], at: usize, marks: &mut Vec<Mark>, out: &mut Vec<QTree>) {
    if at == lines.len() {
        let internal_ok = (1..marks.len()).all(|e| !f.is_vertex(e) || marks[e] != Mark::Plain);
        if internal_ok {
            out.push(build_q(f, 0, marks));
        }
        return;
    }
    let line = &lines[at];
    for s in 0..line.len() {
        if marks[line[s]] != Mark::Plain {
            break;
        }
        for &e in &line[..s] {
            marks[e] = Mark::Gf;
        }
        marks[line[s]] = Mark::H;
        decorate(f, lines, at + 1, marks, out);
        for &e in &line[..=s] {
            marks[e] = Mark::Plain;
        }
    }
}

fn build_q(f: &Flat, id: usize, marks: &[Mark]) -> QTree {
    if f.is_vertex(id) {
        QTree::Node(marks[id], f.children[id].iter().map(|&c| build_q(f, c, marks)).collect())
    } else {
        QTree::Leaf(marks[id])
    }
}

/// Signed p-trees from unfolding the inductive definition of p_n.
pub fn expand_p(n: usize) -> Vec<(bool, PlanarTree)> {
    if n == 1 {
        return vec![(false, PlanarTree::Leaf)];
    }
    let mut out = Vec::new();
    for k in 2..=n {
        for r in compositions(n, k) {
            let parts: Vec<Vec<(bool, PlanarTree)>> = r.iter().map(|&x| expand_p(x)).collect();
            for combo in product(&parts) {
                let sign = combo.iter().fold(theta_sign(&r), |a, (s, _)| a ^ s);
                out.push((sign, PlanarTree::Node(combo.into_iter().map(|(_, t)| t).collect())));
            }
        }
    }
    out
}

/// Signed trees of p^i_n: hp blocks over the first i − 1 inputs, the rest plain.
pub fn expand_p_partial(n: usize, i: usize) -> Vec<(bool, PlanarTree)> {
    let tail = n - i + 1;
    let mut out = Vec::new();
    for c in 0..i {
        if c + tail < 2 {
            continue;
        }
        for r in compositions(i - 1, c) {
            let parts: Vec<Vec<(bool, PlanarTree)>> = r.iter().map(|&x| expand_p(x)).collect();
            for combo in product(&parts) {
                let sign = combo.iter().fold(theta_sign(&r), |a, (s, _)| a ^ s);
                let mut cs: Vec<PlanarTree> = combo.into_iter().map(|(_, t)| t).collect();
                cs.extend(std::iter::repeat_n(PlanarTree::Leaf, tail));
                out.push((sign, PlanarTree::Node(cs)));
            }
        }
    }
    out
}

/// Signed decorated trees from unfolding the inductive definition of q_n.
pub fn expand_q(n: usize) -> Vec<(bool, QTree)> {
    if n == 1 {
        return vec![(false, QTree::Leaf(Mark::Plain))];
    }
    let mut out = Vec::new();
    let tuples = enumerate_index_set(IndexKind::C, n, None).expect("index set C exists for n ≥ 2");
    for tuple in tuples {
        let IndexTuple::C { k, i, r } = tuple else { unreachable!() };
        let head = ((n + r[i - 1]) % 2 == 1) ^ theta_sign(&r);
        let blocks: Vec<Vec<(bool, QTree)>> = r
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let m = if j + 1 == i { Mark::H } else { Mark::Gf };
                expand_q(x).into_iter().map(|(s, t)| (s, t.with_mark(m))).collect()
            })
            .collect();
        for (ts, top) in expand_p_partial(k, i) {
            for combo in product(&blocks) {
                let sign = combo.iter().fold(head ^ ts, |a, (s, _)| a ^ s);
                let mut slots = combo.into_iter().map(|(_, t)| t);
                out.push((sign, graft(&top, &mut slots, Mark::Plain)));
            }
        }
    }
    out
}

/// Replaces the leaves of `t` by `slots` in order (plain leaves once `slots` runs out);
/// internal edges become h.
fn graft(t: &PlanarTree, slots: &mut impl Iterator<Item = QTree>, mark: Mark) -> QTree {
    match t {
        PlanarTree::Leaf => slots.next().unwrap_or(QTree::Leaf(Mark::Plain)),
        PlanarTree::Node(cs) => QTree::Node(mark, cs.iter().map(|c| graft(c, slots, Mark::H)).collect()),
    }
}

/// One summand of the q recursion matched to a decorated tree: the term p^i_k(gf q_{r₁}⊗…⊗h q_{r_i}⊗id)
/// with its p-tree and the decompositions of the non-trivial blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QLevel {
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub r: Vec<usize>,
    pub top: PlanarTree,
    pub gf_blocks: Vec<Option<QLevel>>,
    pub h_block: Option<Box<QLevel>>,
}

impl QLevel {
    /// Rebuilds the decorated tree.
    pub fn to_tree(&self) -> QTree {
        let mut slots: Vec<QTree> = self
            .gf_blocks
            .iter()
            .map(|b| b.as_ref().map_or(QTree::Leaf(Mark::Gf), |l| l.to_tree().with_mark(Mark::Gf)))
            .collect();
        slots.push(self.h_block.as_ref().map_or(QTree::Leaf(Mark::H), |l| l.to_tree().with_mark(Mark::H)));
        graft(&self.top, &mut slots.into_iter(), Mark::Plain)
    }

    /// This level's own sign n + r_i + ϑ(r) + ϑ(T).
    pub fn own_sign(&self) -> bool {
        ((self.n + self.r[self.i - 1]) % 2 == 1) ^ theta_sign(&self.r) ^ theta_tree(&self.top)
    }

    fn sub_levels(&self) -> impl Iterator<Item = &QLevel> {
        self.gf_blocks.iter().flatten().chain(self.h_block.as_deref())
    }

    /// Every level, this one first, in pre-order.
    pub fn levels(&self) -> Vec<&QLevel> {
        let mut out = vec![self];
        for l in self.sub_levels() {
            out.extend(l.levels());
        }
        out
    }

    /// p-trees with each level's tree joined to the tree of its h block, as drawn
    /// when a decorated tree is cut into p-kernel summands.
    pub fn pieces(&self) -> Vec<PlanarTree> {
        let mut out = Vec::new();
        self.collect_pieces(&mut out);
        out
    }

    fn collect_pieces(&self, out: &mut Vec<PlanarTree>) {
        out.push(self.spine());
        let mut l = self;
        loop {
            for b in l.gf_blocks.iter().flatten() {
                b.collect_pieces(out);
            }
            match &l.h_block {
                Some(next) => l = next,
                None => break,
            }
        }
    }

    fn spine(&self) -> PlanarTree {
        let below = self.h_block.as_ref().map(|b| b.spine());
        let mut idx = 0;
        substitute_leaf(&self.top, self.i, &mut idx, &below)
    }
}

fn substitute_leaf(t: &PlanarTree, target: usize, idx: &mut usize, with: &Option<PlanarTree>) -> PlanarTree {
    match t {
        PlanarTree::Leaf => {
            *idx += 1;
            match with {
                Some(w) if *idx == target => w.clone(),
                _ => PlanarTree::Leaf,
            }
        }
        PlanarTree::Node(cs) => PlanarTree::Node(cs.iter().map(|c| substitute_leaf(c, target, idx, with)).collect()),
    }
}

/// Matches a decorated tree to the summand of the q recursion that produces it.
pub fn decompose_q_tree(s: &QTree) -> Result<QLevel> {
    let QTree::Node(_, cs) = s else {
        return Err(Error::Input("a single leaf is q₁ = id and has no decomposition".into()));
    };
    let bad = |why: &str| Error::Invariant(format!("tree {s} is not produced by the q recursion: {why}"));
    let last = cs.iter().rposition(|c| c.mark() != Mark::Plain).ok_or_else(|| bad("no decorated input at the root"))?;
    if cs[last].mark() != Mark::H {
        return Err(bad("the last decorated root input is not h"));
    }
    if cs[last + 1..].iter().any(|c| *c != QTree::Leaf(Mark::Plain)) {
        return Err(bad("inputs after the h block are not plain leaves"));
    }
    let mut slots: Vec<&QTree> = Vec::new();
    let mut top_cs = Vec::with_capacity(cs.len());
    for c in &cs[..last] {
        top_cs.push(hp_part(c, &mut slots).ok_or_else(|| bad("a block before the h block is neither gf nor an h-subtree"))?);
    }
    slots.push(&cs[last]);
    top_cs.extend(std::iter::repeat_n(PlanarTree::Leaf, cs.len() - last));
    let top = PlanarTree::Node(top_cs);
    let i = slots.len();
    let r: Vec<usize> = slots.iter().map(|b| b.leaves()).collect();
    let sub = |b: &QTree| -> Result<Option<QLevel>> {
        match b {
            QTree::Leaf(_) => Ok(None),
            node => decompose_q_tree(node).map(Some),
        }
    };
    let gf_blocks = slots[..i - 1].iter().map(|b| sub(b)).collect::<Result<Vec<_>>>()?;
    let h_block = sub(slots[i - 1])?.map(Box::new);
    Ok(QLevel { n: s.leaves(), k: top.leaves(), i, r, top, gf_blocks, h_block })
}

/// The part of an input below the root that belongs to the p-tree; gf blocks become its leaves.
fn hp_part<'t>(c: &'t QTree, slots: &mut Vec<&'t QTree>) -> Option<PlanarTree> {
    match (c.mark(), c) {
        (Mark::Gf, _) => {
            slots.push(c);
            Some(PlanarTree::Leaf)
        }
        (Mark::H, QTree::Node(_, cs)) => {
            cs.iter().map(|x| hp_part(x, slots)).collect::<Option<Vec<_>>>().map(PlanarTree::Node)
        }
        _ => None,
    }
}

/// ε(S): the level signs n + r_i + ϑ(r₁…r_i) + ϑ(T) summed over every level of the
/// decomposition. This is the coefficient sign of S in q_n.
pub fn epsilon_tree(s: &QTree) -> Result<bool> {
    if matches!(s, QTree::Leaf(_)) {
        return Ok(false);
    }
    Ok(decompose_q_tree(s)?.levels().iter().fold(false, |a, l| a ^ l.own_sign()))
}

/// The top-level n + r_i + ϑ(r₁…r_i) plus ϑ of the joined pieces. Agrees with
/// `epsilon_tree` only on some trees.
pub fn epsilon_pieces(s: &QTree) -> Result<bool> {
    if matches!(s, QTree::Leaf(_)) {
        return Ok(false);
    }
    let d = decompose_q_tree(s)?;
    let head = ((d.n + d.r[d.i - 1]) % 2 == 1) ^ theta_sign(&d.r);
    Ok(d.pieces().iter().fold(head, |a, t| a ^ theta_tree(t)))
}

fn op_for(mu: &AInftyAlgebra, k: usize) -> Result<Option<&MultilinearMap>> {
    if k > mu.cap {
        return Err(Error::Input(format!("μ_{k} is beyond the structure's arity cap {}", mu.cap)));
    }
    Ok(mu.op(k))
}

/// Flow-chart map F_T with every leaf replaced by `leaf` (the identity gives F_T itself).
/// `None` when some μ_k of the tree vanishes.
fn eval_p(t: &PlanarTree, mu: &AInftyAlgebra, h: &MultilinearMap, leaf: &MultilinearMap, memo: &mut HashMap<String, Option<MultilinearMap>>) -> Result<Option<MultilinearMap>> {
    let key = t.to_string();
    if let Some(m) = memo.get(&key) {
        return Ok(m.clone());
    }
    let PlanarTree::Node(cs) = t else { return Ok(Some(leaf.clone())) };
    let Some(op) = op_for(mu, cs.len())? else {
        memo.insert(key, None);
        return Ok(None);
    };
    let mut blocks = Vec::with_capacity(cs.len());
    for c in cs {
        match c {
            PlanarTree::Leaf => blocks.push(leaf.clone()),
            node => match eval_p(node, mu, h, leaf, memo)? {
                Some(m) => blocks.push(MultilinearMap::compose(h, &m)?),
                None => {
                    memo.insert(key, None);
                    return Ok(None);
                }
            },
        }
    }
    let refs: Vec<&MultilinearMap> = blocks.iter().collect();
    let out = MultilinearMap::compose_blocks(op, &refs)?;
    memo.insert(key, Some(out.clone()));
    Ok(Some(out))
}

/// F_T: μ at every vertex and h on every internal edge.
pub fn eval_p_tree(t: &PlanarTree, mu: &AInftyAlgebra, h: &MultilinearMap) -> Result<MultilinearMap> {
    let id = MultilinearMap::identity(mu.field(), mu.space().clone());
    let deg = t.leaves() as i32 - 2;
    Ok(eval_p(t, mu, h, &id, &mut HashMap::new())?
        .unwrap_or_else(|| MultilinearMap::zero(mu.field(), mu.space().clone(), mu.space().clone(), t.leaves(), deg)))
}

/// Σ_{T ∈ P_n} (−1)^{ϑ(T)} F_T.
pub fn p_kernel_trees(mu: &AInftyAlgebra, h: &MultilinearMap, n: usize) -> Result<MultilinearMap> {
    let id = MultilinearMap::identity(mu.field(), mu.space().clone());
    p_kernel_trees_on(mu, h, &id, n)
}

/// Σ_{T ∈ P_n} (−1)^{ϑ(T)} F_T∘leaf^{⊗n}, evaluated without forming F_T.
pub fn p_kernel_trees_on(mu: &AInftyAlgebra, h: &MultilinearMap, leaf: &MultilinearMap, n: usize) -> Result<MultilinearMap> {
    if n < 2 {
        return Err(Error::Input("p-kernels start at n = 2".into()));
    }
    let field = mu.field();
    let mut acc = MultilinearMap::zero(field, leaf.source().clone(), mu.space().clone(), n, n as i32 - 2);
    let mut memo = HashMap::new();
    for t in enumerate_p_trees(n) {
        if let Some(m) = eval_p(&t, mu, h, leaf, &mut memo)? {
            acc = acc.add_scaled(&m, &field.sign(theta_tree(&t)))?;
        }
    }
    Ok(acc)
}

struct QMaps<'a> {
    mu: &'a AInftyAlgebra,
    id: MultilinearMap,
    h: &'a MultilinearMap,
    gf: MultilinearMap,
    memo: HashMap<String, Option<MultilinearMap>>,
}

impl QMaps<'_> {
    fn mark(&self, m: Mark, x: MultilinearMap) -> Result<MultilinearMap> {
        match m {
            Mark::Plain => Ok(x),
            Mark::H => MultilinearMap::compose(self.h, &x),
            Mark::Gf => MultilinearMap::compose(&self.gf, &x),
        }
    }

    fn eval(&mut self, s: &QTree) -> Result<Option<MultilinearMap>> {
        let key = s.to_string();
        if let Some(m) = self.memo.get(&key) {
            return Ok(m.clone());
        }
        let out = match s {
            QTree::Leaf(m) => Some(self.mark(*m, self.id.clone())?),
            QTree::Node(m, cs) => match op_for(self.mu, cs.len())?.cloned() {
                None => None,
                Some(op) => {
                    let mut blocks = Vec::with_capacity(cs.len());
                    for c in cs {
                        match self.eval(c)? {
                            Some(b) => blocks.push(b),
                            None => break,
                        }
                    }
                    if blocks.len() < cs.len() {
                        None
                    } else {
                        let refs: Vec<&MultilinearMap> = blocks.iter().collect();
                        Some(self.mark(*m, MultilinearMap::compose_blocks(&op, &refs)?)?)
                    }
                }
            },
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

fn q_maps<'a>(mu: &'a AInftyAlgebra, f: &MultilinearMap, g: &MultilinearMap, h: &'a MultilinearMap) -> Result<QMaps<'a>> {
    Ok(QMaps {
        mu,
        id: MultilinearMap::identity(mu.field(), mu.space().clone()),
        h,
        gf: MultilinearMap::compose(g, f)?,
        memo: HashMap::new(),
    })
}

/// G_S: μ at every vertex, h on ∘ edges and gf on • edges.
pub fn eval_q_tree(s: &QTree, mu: &AInftyAlgebra, f: &MultilinearMap, g: &MultilinearMap, h: &MultilinearMap) -> Result<MultilinearMap> {
    let mut qm = q_maps(mu, f, g, h)?;
    Ok(qm.eval(s)?.unwrap_or_else(|| {
        MultilinearMap::zero(mu.field(), mu.space().clone(), mu.space().clone(), s.leaves(), s.degree())
    }))
}

/// Σ_{S ∈ Q_n} (−1)^{ε(S)} G_S, and q₁ = id.
pub fn q_kernel_trees(mu: &AInftyAlgebra, f: &MultilinearMap, g: &MultilinearMap, h: &MultilinearMap, n: usize) -> Result<MultilinearMap> {
    if n == 0 {
        return Err(Error::Input("q-kernels start at n = 1".into()));
    }
    let field = mu.field();
    let mut qm = q_maps(mu, f, g, h)?;
    if n == 1 {
        return Ok(qm.id.clone());
    }
    let mut acc = MultilinearMap::zero(field, mu.space().clone(), mu.space().clone(), n, n as i32 - 1);
    for s in enumerate_q_trees(n) {
        if let Some(m) = qm.eval(&s)? {
            acc = acc.add_scaled(&m, &field.sign(epsilon_tree(&s)?))?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn t(s: &str) -> QTree {
        s.parse().unwrap()
    }

    /// Total orders with (i) below ⇒ smaller and (ii) a left sibling's subtree above
    /// everything in the subtrees to its right, by brute force over permutations.
    fn orders_by_conditions(tree: &PlanarTree) -> Vec<Vec<usize>> {
        let f = Flat::new(tree);
        let vs = f.vertices.clone();
        let nv = vs.len();
        let rank_of: HashMap<usize, usize> = vs.iter().enumerate().map(|(r, &v)| (v, r)).collect();
        let below = |u: usize, v: usize| u != v && v <= u && u <= f.end[v];
        let mut rels = Vec::new();
        for (a, &u) in vs.iter().enumerate() {
            for (b, &v) in vs.iter().enumerate() {
                if below(u, v) {
                    rels.push((a, b));
                }
            }
        }
        for &p in &vs {
            let cs = &f.children[p];
            for x in 0..cs.len() {
                for y in x + 1..cs.len() {
                    for u in cs[x]..=f.end[cs[x]] {
                        for v in cs[y]..=f.end[cs[y]] {
                            if f.is_vertex(u) && f.is_vertex(v) {
                                rels.push((rank_of[&v], rank_of[&u]));
                            }
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (1..=nv).collect();
        permute(&mut perm, 0, &mut |p| {
            if rels.iter().all(|&(a, b)| p[a] < p[b]) {
                out.push(p.to_vec());
            }
        });
        out
    }

    fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            visit(p);
            return;
        }
        for j in k..p.len() {
            p.swap(k, j);
            permute(p, k + 1, visit);
            p.swap(k, j);
        }
    }

    #[test]
    fn vertex_order_is_the_unique_admissible_order() {
        for n in 2..=6 {
            for tree in enumerate_planar_trees(n) {
                if tree.vertex_count() > 6 {
                    continue;
                }
                let orders = orders_by_conditions(&tree);
                assert_eq!(orders, vec![vertex_order(&tree)], "{tree}");
            }
        }
    }

    #[test]
    fn five_vertex_example_order() {
        let tree: PlanarTree = "(((..)(..))(..))".parse().unwrap();
        assert_eq!(vertex_order(&tree), vec![5, 4, 3, 2, 1]);
    }

    #[test]
    fn p_tree_counts() {
        let counts: Vec<usize> = (2..=6).map(|n| enumerate_p_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 3, 11, 45, 197]);
        for n in 2..=6 {
            assert_eq!(expand_p(n).len(), enumerate_p_trees(n).len());
        }
    }

    #[test]
    fn theta_of_trees() {
        assert!(!theta_tree(&PlanarTree::corolla(4)));
        let tree: PlanarTree = "((..).)".parse().unwrap();
        assert!(!theta_tree(&tree));
        let tree: PlanarTree = "(.(..))".parse().unwrap();
        assert!(theta_tree(&tree));
    }

    #[test]
    fn q_tree_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_q_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 10, 62, 442]);
        let q2: Vec<String> = enumerate_q_trees(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(q2, vec!["(*.o.)", "(o..)"]);
    }

    #[test]
    fn six_decorations_of_the_balanced_tree() {
        let shape: PlanarTree = "((..)(..))".parse().unwrap();
        let found: Vec<String> = enumerate_q_trees(4).into_iter().filter(|s| s.shape() == shape).map(|s| s.to_string()).collect();
        assert_eq!(found.len(), 6);
        let expected = [
            "(o(*.*.)o(o..))",
            "(o(*.*.)o(*.o.))",
            "(*(o..)o(o..))",
            "(*(o..)o(*.o.))",
            "(*(*.o.)o(o..))",
            "(*(*.o.)o(*.o.))",
        ];
        for e in expected {
            assert!(found.contains(&e.to_string()), "{e} missing from {found:?}");
        }
    }

    #[test]
    fn enumeration_matches_expansion() {
        for n in 1..=5 {
            let mut a: Vec<String> = enumerate_q_trees(n).iter().map(|s| s.to_string()).collect();
            let mut b: Vec<String> = expand_q(n).iter().map(|(_, s)| s.to_string()).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "n = {n}");
            let mut dedup = a.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), a.len());
        }
    }

    #[test]
    fn epsilon_matches_expansion_signs() {
        for n in 2..=5 {
            for (sign, s) in expand_q(n) {
                assert_eq!(epsilon_tree(&s).unwrap(), sign, "{s}");
            }
        }
    }

    #[test]
    fn decomposition_round_trips() {
        for n in 2..=5 {
            for s in enumerate_q_trees(n) {
                let d = decompose_q_tree(&s).unwrap();
                assert_eq!(d.to_tree(), s);
                assert_eq!(d.n, n);
                assert_eq!(d.r.iter().sum::<usize>() + d.k - d.i, n);
            }
        }
    }

    #[test]
    fn q2_decompositions() {
        let d = decompose_q_tree(&t("(o..)")).unwrap();
        assert_eq!((d.k, d.i, d.r.clone()), (2, 1, vec![1]));
        let d = decompose_q_tree(&t("(*.o.)")).unwrap();
        assert_eq!((d.k, d.i, d.r.clone()), (2, 2, vec![1, 1]));
        assert!(epsilon_tree(&t("(o..)")).unwrap());
        assert!(epsilon_tree(&t("(*.o.)")).unwrap());
    }

    #[test]
    fn seven_leaf_example() {
        let s = t("(*(o(*.*.)o(*.o.))o(o...))");
        assert_eq!(s.leaves(), 7);
        assert_eq!(s.degree(), 6);
        let d = decompose_q_tree(&s).unwrap();
        assert_eq!((d.n, d.i, d.r.clone()), (7, 2, vec![4, 3]));
        let pieces: Vec<usize> = d.pieces().iter().map(PlanarTree::vertex_count).collect();
        assert_eq!(pieces, vec![2, 3]);
        assert_eq!(s.monomial(), "m2(Gm2(hm2(G,G),hm2(G,h)),hm3(h,1,1))");
    }

    #[test]
    fn text_round_trip() {
        for n in 1..=4 {
            for s in enumerate_q_trees(n) {
                assert_eq!(t(&s.to_string()), s);
            }
        }
        assert!("(.)".parse::<QTree>().is_err());
        assert!("(..".parse::<QTree>().is_err());
        assert!("(o..)".parse::<PlanarTree>().is_err());
    }

    #[test]
    fn partial_kernel_trees() {
        let all: BTreeMap<String, bool> = expand_p_partial(4, 4).into_iter().map(|(s, t)| (t.to_string(), s)).collect();
        assert!(all.contains_key("(....)"));
        assert!(all.contains_key("((...).)"));
        assert_eq!(expand_p_partial(3, 1).len(), 1);
    }
}
