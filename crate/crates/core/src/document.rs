//! JSON documents holding named spaces, maps, complexes, structures, morphisms,
//! homotopies and contractions.
//!
//! ```json
//! {
//!   "cap": 6,
//!   "field": "Q",
//!   "spaces": { "V": { "dims": { "0": 1, "1": 1 }, "labels": { "0": ["y0"], "1": ["x1"] } } },
//!   "maps": { "d_V": { "source": "V", "target": "V", "arity": 1, "degree": -1,
//!                      "entries": [ { "inputs": [[1, 0]], "output": [[0, 0, "1"]] } ] } },
//!   "complexes": { "V": { "space": "V", "differential": "d_V" } },
//!   "algebras": { "mu": { "complex": "V", "cap": 6, "ops": { "2": "mu_2" } } },
//!   "morphisms": { "phi": { "source": "mu", "target": "nu", "components": { "1": "phi_1" } } },
//!   "homotopies": { "H": { "phi": "phi", "psi": "psi", "components": { "1": "H_1" } } },
//!   "contractions": { "c": { "v": "V", "w": "W", "f": "c_f", "g": "c_g", "h": "c_h", "l": null } }
//! }
//! ```
//!
//! Scalars are strings: "p/q" in lowest terms over Q, canonical residues over F_p.
//! Object keys are written in sorted order, so serialization is deterministic.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map as JsonMap, Value};

use crate::ainfty::{AInftyAlgebra, AInftyHomotopy, AInftyMorphism, Complex};
use crate::error::{Error, Result};
use crate::map::MultilinearMap;
use crate::scalar::Field;
use crate::space::{BasisKey, GradedSpace};
use crate::transfer::{ContractionData, TransferResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub source: String,
    pub target: String,
    pub map: MultilinearMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexDecl {
    pub space: String,
    pub differential: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub complex: String,
    pub cap: usize,
    pub ops: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub source: String,
    pub target: String,
    pub components: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyDecl {
    pub phi: String,
    pub psi: String,
    pub components: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionDecl {
    pub v: String,
    pub w: String,
    pub f: String,
    pub g: String,
    pub h: String,
    pub l: Option<String>,
}

/// A validated document. Every name resolves and every declared object satisfies
/// its shape rules; the axioms themselves are checked by the verifiers, not on load.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub field: Field,
    pub cap: usize,
    pub spaces: BTreeMap<String, Arc<GradedSpace>>,
    pub maps: BTreeMap<String, MapDecl>,
    pub complexes: BTreeMap<String, ComplexDecl>,
    pub algebras: BTreeMap<String, AlgebraDecl>,
    pub morphisms: BTreeMap<String, MorphismDecl>,
    pub homotopies: BTreeMap<String, HomotopyDecl>,
    pub contractions: BTreeMap<String, ContractionDecl>,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("{path}: {msg}"))
}

fn with_path(path: &str, e: Error) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{path}: {m}")),
        Error::Invariant(m) => Error::Invariant(format!("{path}: {m}")),
        Error::Mismatch(m) => Error::Mismatch(format!("{path}: {m}")),
        e => e,
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a JsonMap<String, Value>> {
    v.as_object().ok_or_else(|| at(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| at(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| at(path, "expected a string"))
}

fn int(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| at(path, "expected an integer"))
}

fn uint(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| at(path, "expected a non-negative integer"))
}

fn field_of<'a>(o: &'a JsonMap<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| at(path, format!("missing key {key:?}")))
}

fn only_keys(o: &JsonMap<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match o.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(at(path, format!("unknown key {k:?}"))),
        None => Ok(()),
    }
}

fn section<'a>(root: &'a JsonMap<String, Value>, key: &str) -> Result<Vec<(&'a String, &'a Value)>> {
    match root.get(key) {
        None => Ok(Vec::new()),
        Some(v) => Ok(object(v, key)?.iter().collect()),
    }
}

fn int_key(k: &str, path: &str) -> Result<i64> {
    k.parse().map_err(|_| at(path, format!("key {k:?} is not an integer")))
}

fn arity_table(v: &Value, path: &str) -> Result<BTreeMap<usize, String>> {
    let mut out = BTreeMap::new();
    for (k, name) in object(v, path)? {
        let p = format!("{path}.{k}");
        let n = int_key(k, &p)?;
        if n < 1 {
            return Err(at(&p, "arity must be positive"));
        }
        out.insert(n as usize, string(name, &p)?.to_string());
    }
    Ok(out)
}

fn arity_table_json(t: &BTreeMap<usize, String>) -> Value {
    Value::Object(t.iter().map(|(n, s)| (n.to_string(), json!(s))).collect())
}

fn parse_space(v: &Value, path: &str) -> Result<GradedSpace> {
    let o = object(v, path)?;
    only_keys(o, &["dims", "labels"], path)?;
    let mut dims = BTreeMap::new();
    for (k, n) in object(field_of(o, "dims", path)?, &format!("{path}.dims"))? {
        let p = format!("{path}.dims.{k}");
        dims.insert(int_key(k, &p)? as i32, uint(n, &p)?);
    }
    let mut labels = BTreeMap::new();
    if let Some(ls) = o.get("labels") {
        for (k, l) in object(ls, &format!("{path}.labels"))? {
            let p = format!("{path}.labels.{k}");
            let names = array(l, &p)?
                .iter()
                .enumerate()
                .map(|(i, s)| string(s, &format!("{p}[{i}]")).map(str::to_string))
                .collect::<Result<Vec<_>>>()?;
            labels.insert(int_key(k, &p)? as i32, names);
        }
    }
    GradedSpace::with_labels(dims, labels).map_err(|e| with_path(path, e))
}

fn space_json(s: &GradedSpace) -> Value {
    let dims: JsonMap<String, Value> = s.dims().iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
    let labels: JsonMap<String, Value> = s.labels().iter().map(|(d, l)| (d.to_string(), json!(l))).collect();
    json!({ "dims": dims, "labels": labels })
}

fn parse_key(v: &Value, space: &GradedSpace, path: &str) -> Result<u32> {
    let a = array(v, path)?;
    if a.len() < 2 {
        return Err(at(path, "basis element must be [degree, index]"));
    }
    let deg = int(&a[0], &format!("{path}[0]"))? as i32;
    let idx = uint(&a[1], &format!("{path}[1]"))? as u32;
    space
        .index(BasisKey { deg, idx })
        .ok_or_else(|| at(path, format!("no basis element ({deg}, {idx})")))
}

fn parse_map(v: &Value, field: Field, spaces: &BTreeMap<String, Arc<GradedSpace>>, path: &str) -> Result<MapDecl> {
    let o = object(v, path)?;
    only_keys(o, &["source", "target", "arity", "degree", "entries"], path)?;
    let src_name = string(field_of(o, "source", path)?, &format!("{path}.source"))?;
    let tgt_name = string(field_of(o, "target", path)?, &format!("{path}.target"))?;
    let lookup = |n: &str, p: &str| spaces.get(n).cloned().ok_or_else(|| at(p, format!("unknown space {n:?}")));
    let src = lookup(src_name, &format!("{path}.source"))?;
    let tgt = lookup(tgt_name, &format!("{path}.target"))?;
    let arity = uint(field_of(o, "arity", path)?, &format!("{path}.arity"))?;
    if arity == 0 {
        return Err(at(&format!("{path}.arity"), "arity must be positive"));
    }
    let degree = int(field_of(o, "degree", path)?, &format!("{path}.degree"))? as i32;
    let mut b = MultilinearMap::builder(field, src.clone(), tgt.clone(), arity, degree);
    for (e, entry) in array(field_of(o, "entries", path)?, &format!("{path}.entries"))?.iter().enumerate() {
        let p = format!("{path}.entries[{e}]");
        let eo = object(entry, &p)?;
        only_keys(eo, &["inputs", "output"], &p)?;
        let ins = array(field_of(eo, "inputs", &p)?, &format!("{p}.inputs"))?;
        if ins.len() != arity {
            return Err(at(&format!("{p}.inputs"), format!("expected {arity} inputs, found {}", ins.len())));
        }
        let ins = ins
            .iter()
            .enumerate()
            .map(|(i, k)| parse_key(k, &src, &format!("{p}.inputs[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        for (j, out) in array(field_of(eo, "output", &p)?, &format!("{p}.output"))?.iter().enumerate() {
            let q = format!("{p}.output[{j}]");
            let g = parse_key(out, &tgt, &q)?;
            let a = array(out, &q)?;
            if a.len() != 3 {
                return Err(at(&q, "output term must be [degree, index, scalar]"));
            }
            let c = field.parse_scalar(string(&a[2], &format!("{q}[2]"))?).map_err(|e| with_path(&q, e))?;
            b.add(&ins, &[g], c);
        }
    }
    let map = b.build().map_err(|e| with_path(path, e))?;
    Ok(MapDecl { source: src_name.to_string(), target: tgt_name.to_string(), map })
}

fn key_json(space: &GradedSpace, g: u32) -> Value {
    let k = space.key(g);
    json!([k.deg, k.idx])
}

fn map_json(d: &MapDecl) -> Value {
    let m = &d.map;
    let entries: Vec<Value> = m
        .decoded()
        .into_iter()
        .map(|(ins, outs)| {
            let inputs: Vec<Value> = ins.iter().map(|&g| key_json(m.source(), g)).collect();
            let output: Vec<Value> = outs
                .iter()
                .map(|(o, c)| {
                    let k = m.target().key(o[0]);
                    json!([k.deg, k.idx, c.to_string()])
                })
                .collect();
            json!({ "inputs": inputs, "output": output })
        })
        .collect();
    json!({
        "source": d.source,
        "target": d.target,
        "arity": m.arity(),
        "degree": m.degree(),
        "entries": entries,
    })
}

impl Document {
    pub fn new(field: Field, cap: usize) -> Document {
        Document {
            field,
            cap,
            spaces: BTreeMap::new(),
            maps: BTreeMap::new(),
            complexes: BTreeMap::new(),
            algebras: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            homotopies: BTreeMap::new(),
            contractions: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Document> {
        let v: Value = serde_json::from_str(text)?;
        Document::from_json(&v)
    }

    pub fn load(path: &Path) -> Result<Document> {
        Document::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_string_pretty())?)
    }

    pub fn from_json(v: &Value) -> Result<Document> {
        let root = object(v, "$")?;
        only_keys(
            root,
            &["field", "cap", "spaces", "maps", "complexes", "algebras", "morphisms", "homotopies", "contractions"],
            "$",
        )?;
        let field: Field = string(field_of(root, "field", "$")?, "field")?.parse().map_err(|e| with_path("field", e))?;
        let cap = uint(field_of(root, "cap", "$")?, "cap")?;
        let mut doc = Document::new(field, cap);
        for (name, s) in section(root, "spaces")? {
            doc.spaces.insert(name.clone(), Arc::new(parse_space(s, &format!("spaces.{name}"))?));
        }
        for (name, m) in section(root, "maps")? {
            let d = parse_map(m, field, &doc.spaces, &format!("maps.{name}"))?;
            doc.maps.insert(name.clone(), d);
        }
        let name_at = |o: &JsonMap<String, Value>, key: &str, path: &str| -> Result<String> {
            Ok(string(field_of(o, key, path)?, &format!("{path}.{key}"))?.to_string())
        };
        for (name, c) in section(root, "complexes")? {
            let p = format!("complexes.{name}");
            let o = object(c, &p)?;
            only_keys(o, &["space", "differential"], &p)?;
            let decl = ComplexDecl { space: name_at(o, "space", &p)?, differential: name_at(o, "differential", &p)? };
            doc.complexes.insert(name.clone(), decl);
        }
        for (name, a) in section(root, "algebras")? {
            let p = format!("algebras.{name}");
            let o = object(a, &p)?;
            only_keys(o, &["complex", "cap", "ops"], &p)?;
            let decl = AlgebraDecl {
                complex: name_at(o, "complex", &p)?,
                cap: uint(field_of(o, "cap", &p)?, &format!("{p}.cap"))?,
                ops: arity_table(field_of(o, "ops", &p)?, &format!("{p}.ops"))?,
            };
            doc.algebras.insert(name.clone(), decl);
        }
        for (name, m) in section(root, "morphisms")? {
            let p = format!("morphisms.{name}");
            let o = object(m, &p)?;
            only_keys(o, &["source", "target", "components"], &p)?;
            let decl = MorphismDecl {
                source: name_at(o, "source", &p)?,
                target: name_at(o, "target", &p)?,
                components: arity_table(field_of(o, "components", &p)?, &format!("{p}.components"))?,
            };
            doc.morphisms.insert(name.clone(), decl);
        }
        for (name, h) in section(root, "homotopies")? {
            let p = format!("homotopies.{name}");
            let o = object(h, &p)?;
            only_keys(o, &["phi", "psi", "components"], &p)?;
            let decl = HomotopyDecl {
                phi: name_at(o, "phi", &p)?,
                psi: name_at(o, "psi", &p)?,
                components: arity_table(field_of(o, "components", &p)?, &format!("{p}.components"))?,
            };
            doc.homotopies.insert(name.clone(), decl);
        }
        for (name, c) in section(root, "contractions")? {
            let p = format!("contractions.{name}");
            let o = object(c, &p)?;
            only_keys(o, &["v", "w", "f", "g", "h", "l"], &p)?;
            let l = match o.get("l") {
                None | Some(Value::Null) => None,
                Some(v) => Some(string(v, &format!("{p}.l"))?.to_string()),
            };
            let decl = ContractionDecl {
                v: name_at(o, "v", &p)?,
                w: name_at(o, "w", &p)?,
                f: name_at(o, "f", &p)?,
                g: name_at(o, "g", &p)?,
                h: name_at(o, "h", &p)?,
                l,
            };
            doc.contractions.insert(name.clone(), decl);
        }
        doc.validate()?;
        Ok(doc)
    }

    /// Resolves every declared object.
    pub fn validate(&self) -> Result<()> {
        for name in self.complexes.keys() {
            self.complex(name)?;
        }
        for name in self.algebras.keys() {
            self.algebra(name)?;
        }
        for name in self.morphisms.keys() {
            self.morphism(name)?;
        }
        for name in self.homotopies.keys() {
            self.homotopy(name)?;
        }
        for name in self.contractions.keys() {
            self.contraction(name)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut root = JsonMap::new();
        root.insert("field".into(), json!(self.field.to_string()));
        root.insert("cap".into(), json!(self.cap));
        let spaces = self.spaces.iter().map(|(n, s)| (n.clone(), space_json(s))).collect();
        root.insert("spaces".into(), Value::Object(spaces));
        let maps = self.maps.iter().map(|(n, m)| (n.clone(), map_json(m))).collect();
        root.insert("maps".into(), Value::Object(maps));
        let complexes = self
            .complexes
            .iter()
            .map(|(n, c)| (n.clone(), json!({ "space": c.space, "differential": c.differential })))
            .collect();
        root.insert("complexes".into(), Value::Object(complexes));
        let algebras = self
            .algebras
            .iter()
            .map(|(n, a)| (n.clone(), json!({ "complex": a.complex, "cap": a.cap, "ops": arity_table_json(&a.ops) })))
            .collect();
        root.insert("algebras".into(), Value::Object(algebras));
        let morphisms = self
            .morphisms
            .iter()
            .map(|(n, m)| {
                let v = json!({ "source": m.source, "target": m.target, "components": arity_table_json(&m.components) });
                (n.clone(), v)
            })
            .collect();
        root.insert("morphisms".into(), Value::Object(morphisms));
        let homotopies = self
            .homotopies
            .iter()
            .map(|(n, h)| {
                let v = json!({ "phi": h.phi, "psi": h.psi, "components": arity_table_json(&h.components) });
                (n.clone(), v)
            })
            .collect();
        root.insert("homotopies".into(), Value::Object(homotopies));
        let contractions = self
            .contractions
            .iter()
            .map(|(n, c)| (n.clone(), json!({ "v": c.v, "w": c.w, "f": c.f, "g": c.g, "h": c.h, "l": c.l })))
            .collect();
        root.insert("contractions".into(), Value::Object(contractions));
        Value::Object(root)
    }

    /// Pretty-printed JSON with sorted keys and a trailing newline.
    pub fn to_string_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&sorted(self.to_json())).expect("documents serialize");
        s.push('\n');
        s
    }

    fn space(&self, name: &str, path: &str) -> Result<&Arc<GradedSpace>> {
        self.spaces.get(name).ok_or_else(|| at(path, format!("unknown space {name:?}")))
    }

    fn map(&self, name: &str, path: &str) -> Result<&MapDecl> {
        self.maps.get(name).ok_or_else(|| at(path, format!("unknown map {name:?}")))
    }

    /// A named map whose source and target are the given spaces.
    fn map_between(&self, name: &str, src: &str, tgt: &str, path: &str) -> Result<MultilinearMap> {
        let d = self.map(name, path)?;
        if d.source != src || d.target != tgt {
            return Err(Error::Mismatch(format!(
                "{path}: map {name:?} goes {} → {}, expected {src} → {tgt}",
                d.source, d.target
            )));
        }
        Ok(d.map.clone())
    }

    pub fn complex(&self, name: &str) -> Result<Complex> {
        let p = format!("complexes.{name}");
        let c = self.complexes.get(name).ok_or_else(|| at(&p, "unknown complex"))?;
        let space = self.space(&c.space, &format!("{p}.space"))?.clone();
        let d = self.map_between(&c.differential, &c.space, &c.space, &format!("{p}.differential"))?;
        if d.arity() != 1 || d.degree() != -1 {
            return Err(Error::Invariant(format!("{p}.differential: a differential is linear of degree -1")));
        }
        Complex::new(space, d).map_err(|e| with_path(&p, e))
    }

    pub fn algebra(&self, name: &str) -> Result<AInftyAlgebra> {
        let p = format!("algebras.{name}");
        let a = self.algebras.get(name).ok_or_else(|| at(&p, "unknown algebra"))?;
        if a.cap > self.cap {
            return Err(at(&format!("{p}.cap"), format!("exceeds the document cap {}", self.cap)));
        }
        let complex = self.complex(&a.complex).map_err(|e| with_path(&format!("{p}.complex"), e))?;
        let space = &self.complexes[&a.complex].space;
        let mut ops = BTreeMap::new();
        for (&n, m) in &a.ops {
            ops.insert(n, self.map_between(m, space, space, &format!("{p}.ops.{n}"))?);
        }
        AInftyAlgebra::new(complex, ops, a.cap).map_err(|e| with_path(&format!("{p}.ops"), e))
    }

    pub fn morphism(&self, name: &str) -> Result<AInftyMorphism> {
        let p = format!("morphisms.{name}");
        let m = self.morphisms.get(name).ok_or_else(|| at(&p, "unknown morphism"))?;
        let src = Arc::new(self.algebra(&m.source).map_err(|e| with_path(&format!("{p}.source"), e))?);
        let tgt = Arc::new(self.algebra(&m.target).map_err(|e| with_path(&format!("{p}.target"), e))?);
        let (ss, ts) = (&self.complexes[&self.algebras[&m.source].complex].space, &self.complexes[&self.algebras[&m.target].complex].space);
        let mut comps = BTreeMap::new();
        for (&n, c) in &m.components {
            comps.insert(n, self.map_between(c, ss, ts, &format!("{p}.components.{n}"))?);
        }
        AInftyMorphism::new(src, tgt, comps).map_err(|e| with_path(&format!("{p}.components"), e))
    }

    pub fn homotopy(&self, name: &str) -> Result<AInftyHomotopy> {
        let p = format!("homotopies.{name}");
        let h = self.homotopies.get(name).ok_or_else(|| at(&p, "unknown homotopy"))?;
        let phi = Arc::new(self.morphism(&h.phi).map_err(|e| with_path(&format!("{p}.phi"), e))?);
        let psi = Arc::new(self.morphism(&h.psi).map_err(|e| with_path(&format!("{p}.psi"), e))?);
        if self.morphisms[&h.psi].target != self.morphisms[&h.phi].source {
            return Err(Error::Mismatch(format!("{p}: psi must land in the source of phi")));
        }
        let vs = &self.complexes[&self.algebras[&self.morphisms[&h.phi].source].complex].space;
        let mut comps = BTreeMap::new();
        for (&n, c) in &h.components {
            comps.insert(n, self.map_between(c, vs, vs, &format!("{p}.components.{n}"))?);
        }
        AInftyHomotopy::new(phi, psi, comps).map_err(|e| with_path(&format!("{p}.components"), e))
    }

    pub fn contraction(&self, name: &str) -> Result<ContractionData> {
        let p = format!("contractions.{name}");
        let c = self.contractions.get(name).ok_or_else(|| at(&p, "unknown contraction"))?;
        let v = self.complex(&c.v).map_err(|e| with_path(&format!("{p}.v"), e))?;
        let w = self.complex(&c.w).map_err(|e| with_path(&format!("{p}.w"), e))?;
        let (vs, ws) = (&self.complexes[&c.v].space, &self.complexes[&c.w].space);
        let f = self.map_between(&c.f, vs, ws, &format!("{p}.f"))?;
        let g = self.map_between(&c.g, ws, vs, &format!("{p}.g"))?;
        let h = self.map_between(&c.h, vs, vs, &format!("{p}.h"))?;
        let l = match &c.l {
            Some(l) => Some(self.map_between(l, ws, ws, &format!("{p}.l"))?),
            None => None,
        };
        ContractionData::new(v, w, f, g, h, l).map_err(|e| with_path(&p, e))
    }

    /// The single declared object of a section, or the named one.
    pub fn pick<'a, T>(section: &'a BTreeMap<String, T>, name: Option<&'a str>, what: &str) -> Result<&'a str> {
        match name {
            Some(n) if section.contains_key(n) => Ok(n),
            Some(n) => Err(Error::Input(format!("no {what} named {n:?}"))),
            None if section.len() == 1 => Ok(section.keys().next().expect("one entry")),
            None if section.is_empty() => Err(Error::Input(format!("document declares no {what}"))),
            None => Err(Error::Input(format!("document declares several {what}s; name one"))),
        }
    }

    fn put_space(&mut self, name: &str, s: &Arc<GradedSpace>) -> Result<()> {
        match self.spaces.get(name) {
            Some(old) if old != s => Err(Error::Input(format!("space {name:?} already holds a different space"))),
            _ => {
                self.spaces.insert(name.to_string(), s.clone());
                Ok(())
            }
        }
    }

    fn put_map(&mut self, name: String, src: &str, tgt: &str, m: &MultilinearMap) -> Result<String> {
        if m.field() != self.field {
            return Err(Error::Mismatch(format!("map {name:?} is over {}, document over {}", m.field(), self.field)));
        }
        if m.out_arity() != 1 {
            return Err(Error::Input(format!("map {name:?} has several outputs")));
        }
        let d = MapDecl { source: src.to_string(), target: tgt.to_string(), map: m.clone() };
        match self.maps.get(&name) {
            Some(old) if *old != d => Err(Error::Input(format!("map {name:?} already holds a different map"))),
            _ => {
                self.maps.insert(name.clone(), d);
                Ok(name)
            }
        }
    }

    /// Adds a complex under `name`; its space and differential are named `name` and `d_{name}`.
    pub fn add_complex(&mut self, name: &str, c: &Complex) -> Result<()> {
        self.put_space(name, &c.space)?;
        let differential = self.put_map(format!("d_{name}"), name, name, &c.diff)?;
        self.complexes.insert(name.to_string(), ComplexDecl { space: name.to_string(), differential });
        Ok(())
    }

    /// Adds an algebra on the complex `complex` (added if absent); μ_n is named `{name}_{n}`.
    pub fn add_algebra(&mut self, name: &str, complex: &str, a: &AInftyAlgebra) -> Result<()> {
        self.add_complex(complex, &a.complex)?;
        let mut ops = BTreeMap::new();
        for (&n, m) in a.ops() {
            ops.insert(n, self.put_map(format!("{name}_{n}"), complex, complex, m)?);
        }
        self.cap = self.cap.max(a.cap);
        self.algebras.insert(name.to_string(), AlgebraDecl { complex: complex.to_string(), cap: a.cap, ops });
        Ok(())
    }

    /// Adds a morphism between two algebras already in the document.
    pub fn add_morphism(&mut self, name: &str, source: &str, target: &str, m: &AInftyMorphism) -> Result<()> {
        let space_of = |d: &Document, a: &str| -> Result<String> {
            let decl = d.algebras.get(a).ok_or_else(|| Error::Input(format!("unknown algebra {a:?}")))?;
            Ok(d.complexes[&decl.complex].space.clone())
        };
        let (ss, ts) = (space_of(self, source)?, space_of(self, target)?);
        let mut components = BTreeMap::new();
        for (&n, c) in m.comps() {
            components.insert(n, self.put_map(format!("{name}_{n}"), &ss, &ts, c)?);
        }
        let decl = MorphismDecl { source: source.to_string(), target: target.to_string(), components };
        self.morphisms.insert(name.to_string(), decl);
        Ok(())
    }

    /// Adds a homotopy between two morphisms already in the document.
    pub fn add_homotopy(&mut self, name: &str, phi: &str, psi: &str, h: &AInftyHomotopy) -> Result<()> {
        let src = &self.morphisms.get(phi).ok_or_else(|| Error::Input(format!("unknown morphism {phi:?}")))?.source;
        let vs = self.complexes[&self.algebras[src].complex].space.clone();
        let mut components = BTreeMap::new();
        for (&n, c) in h.comps() {
            components.insert(n, self.put_map(format!("{name}_{n}"), &vs, &vs, c)?);
        }
        let decl = HomotopyDecl { phi: phi.to_string(), psi: psi.to_string(), components };
        self.homotopies.insert(name.to_string(), decl);
        Ok(())
    }

    /// Adds a contraction between complexes `v` and `w` (added if absent).
    pub fn add_contraction(&mut self, name: &str, v: &str, w: &str, c: &ContractionData) -> Result<()> {
        self.add_complex(v, &c.v)?;
        self.add_complex(w, &c.w)?;
        let f = self.put_map(format!("{name}_f"), v, w, &c.f)?;
        let g = self.put_map(format!("{name}_g"), w, v, &c.g)?;
        let h = self.put_map(format!("{name}_h"), v, v, &c.h)?;
        let l = match &c.l {
            Some(l) => Some(self.put_map(format!("{name}_l"), w, w, l)?),
            None => None,
        };
        let decl = ContractionDecl { v: v.to_string(), w: w.to_string(), f, g, h, l };
        self.contractions.insert(name.to_string(), decl);
        Ok(())
    }

    /// A document with the contraction `c` (V → W), algebras `mu` and `nu`, morphisms
    /// `phi`: mu → nu and `psi`: nu → mu, and the homotopy `H`.
    pub fn from_transfer(ctx: &ContractionData, r: &TransferResult) -> Result<Document> {
        let mut doc = Document::new(ctx.field(), r.nu.cap);
        doc.add_contraction("c", "V", "W", ctx)?;
        doc.add_algebra("mu", "V", &r.phi.source)?;
        doc.add_algebra("nu", "W", &r.nu)?;
        doc.add_morphism("phi", "mu", "nu", &r.phi)?;
        doc.add_morphism("psi", "nu", "mu", &r.psi)?;
        doc.add_homotopy("H", "phi", "psi", &r.homotopy)?;
        Ok(doc)
    }
}

fn sorted(v: Value) -> Value {
    match v {
        Value::Object(o) => {
            let mut keys: Vec<(String, Value)> = o.into_iter().map(|(k, v)| (k, sorted(v))).collect();
            keys.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(keys.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        v => v,
    }
}
