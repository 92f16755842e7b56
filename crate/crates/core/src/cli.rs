//! The `hpt` command line.
//!
//! Every command prints a JSON report on stdout (except `trees`, which prints plain
//! text) and exits with 0 when the delegated checks pass, 1 on a verification failure
//! and 2 on an input error. Failure reports carry `"status": "fail"` or `"error"`.
//!
//! Tree text: a leaf is `.`, a vertex with children `t₁ … t_k` is `(t₁…t_k)`. In
//! decorated trees the vertex or leaf may be prefixed by `o` (an `h` on the edge below
//! it) or `*` (a `gf` on the edge below it); so `(o(..).)` is μ₂(hμ₂(1, 1), 1).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ainfty::check_homotopy;
use crate::bar::{compare_algebra, compare_morphism, OracleComparison};
use crate::document::Document;
use crate::error::Error;
use crate::fixtures::{random_transfer_input, rng64, with_random_l, Shape};
use crate::minimal::{minimal_model, obstruction_class};
use crate::report::Report;
use crate::scalar::Field;
use crate::transfer::{
    check_kernel_identities, check_side_conditions, transfer_unchecked, transfer_with, KernelMethod, Kernels,
};
use crate::trees;

#[derive(Parser, Debug)]
#[command(name = "hpt", version, about = "Exact homotopy transfer of A-infinity structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every structure, morphism, homotopy and contraction in a document.
    Verify {
        doc: PathBuf,
        /// Highest arity to compute or check (defaults to the document's cap).
        #[arg(long)]
        up_to: Option<usize>,
    },
    /// Transfer a structure along a contraction and write the result document.
    Transfer {
        doc: PathBuf,
        /// Where to write the result document.
        #[arg(long)]
        out: PathBuf,
        /// Highest arity to compute or check (defaults to the document's cap).
        #[arg(long)]
        up_to: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Inductive)]
        method: Method,
        #[command(flatten)]
        pick: Pick,
    },
    /// Minimal model on homology through a Hodge decomposition.
    MinimalModel {
        doc: PathBuf,
        /// Where to write the result document.
        #[arg(long)]
        out: PathBuf,
        /// Highest arity to compute or check (defaults to the document's cap).
        #[arg(long)]
        up_to: Option<usize>,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Count, list or sign the trees indexing p_n or q_n.
    Trees {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, group = "mode")]
        count: bool,
        #[arg(long, group = "mode")]
        list: bool,
        #[arg(long, group = "mode")]
        signs: bool,
    },
    /// Dump the kernel p_n or q_n of a structure and contraction.
    Kernels {
        doc: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Inductive)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        pick: Pick,
    },
    /// Decide whether the classes [fh − lf] and [gl − hg] vanish.
    Obstruction {
        doc: PathBuf,
        #[arg(long)]
        contraction: Option<String>,
    },
    /// Run every checker on seeded random data.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Space bound: at most A basis elements per degree over at most B degrees.
        #[arg(long, default_value = "3x4", value_name = "AxB")]
        dims: String,
        #[arg(long, default_value_t = 4)]
        up_to: usize,
        /// Q, Fp (the field with 101 elements) or Fp:<prime>.
        #[arg(long, default_value = "Q")]
        field: String,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct Pick {
    /// Algebra to use when the document declares several.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Contraction to use when the document declares several.
    #[arg(long)]
    pub contraction: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Inductive,
    Trees,
    Both,
}

impl From<Method> for KernelMethod {
    fn from(m: Method) -> KernelMethod {
        match m {
            Method::Inductive => KernelMethod::Inductive,
            Method::Trees => KernelMethod::Trees,
            Method::Both => KernelMethod::Both,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    P,
    Q,
}

/// Exit code and stdout of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

enum Failure {
    Input(String),
    Verify(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Invariant(_) | Error::Mismatch(_) => Failure::Verify(json!({ "status": "fail", "error": e.to_string() })),
            e => Failure::Input(e.to_string()),
        }
    }
}

type Run = std::result::Result<Value, Failure>;

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn load(path: &Path) -> std::result::Result<Document, Failure> {
    Document::load(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

fn finish(passed: bool, body: Value) -> Run {
    let mut body = body;
    body["status"] = json!(status(passed));
    if passed {
        Ok(body)
    } else {
        Err(Failure::Verify(body))
    }
}

fn report_json(r: &Report) -> Value {
    serde_json::to_value(&r.checks).expect("reports serialize")
}

fn oracle_json(o: &OracleComparison) -> Value {
    json!({ "axioms": report_json(&o.axioms), "bar": report_json(&o.bar), "agree": o.agree() })
}

/// Parses and runs one command line.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            Outcome { code, stdout: e.to_string() }
        }
    }
}

pub fn execute(cmd: Command) -> Outcome {
    let result = match cmd {
        Command::Verify { doc, up_to } => verify(&doc, up_to),
        Command::Transfer { doc, out, up_to, method, pick } => transfer_cmd(&doc, &out, up_to, method, &pick),
        Command::MinimalModel { doc, out, up_to, algebra } => minimal_cmd(&doc, &out, up_to, algebra.as_deref()),
        Command::Trees { kind, n, count, list, signs } => return trees_cmd(kind, n, count, list, signs),
        Command::Kernels { doc, kind, n, method, out, pick } => kernels_cmd(&doc, kind, n, method, out.as_deref(), &pick),
        Command::Obstruction { doc, contraction } => obstruction_cmd(&doc, contraction.as_deref()),
        Command::Selfcheck { seed, dims, up_to, field } => selfcheck(seed, &dims, up_to, &field),
    };
    match result {
        Ok(v) => Outcome { code: 0, stdout: pretty(&v) },
        Err(Failure::Verify(v)) => Outcome { code: 1, stdout: pretty(&v) },
        Err(Failure::Input(msg)) => Outcome { code: 2, stdout: pretty(&json!({ "status": "error", "error": msg })) },
    }
}

fn verify(path: &Path, up_to: Option<usize>) -> Run {
    let doc = load(path)?;
    let up_to = up_to.unwrap_or(doc.cap);
    let mut passed = true;
    let mut algebras = serde_json::Map::new();
    for name in doc.algebras.keys() {
        let a = doc.algebra(name)?;
        let cmp = compare_algebra(&a, up_to.min(a.cap))?;
        passed &= cmp.axioms.passed() && cmp.agree();
        algebras.insert(name.clone(), oracle_json(&cmp));
    }
    let mut morphisms = serde_json::Map::new();
    for name in doc.morphisms.keys() {
        let m = doc.morphism(name)?;
        let cmp = compare_morphism(&m, up_to)?;
        passed &= cmp.axioms.passed() && cmp.agree();
        morphisms.insert(name.clone(), oracle_json(&cmp));
    }
    let mut homotopies = serde_json::Map::new();
    for name in doc.homotopies.keys() {
        let rep = check_homotopy(&doc.homotopy(name)?, up_to)?;
        passed &= rep.passed();
        homotopies.insert(name.clone(), report_json(&rep));
    }
    let mut contractions = serde_json::Map::new();
    for name in doc.contractions.keys() {
        let side = check_side_conditions(&doc.contraction(name)?)?;
        contractions.insert(name.clone(), json!({ "valid": true, "side_conditions": report_json(&side) }));
    }
    let complexes: Vec<&String> = doc.complexes.keys().collect();
    finish(
        passed,
        json!({
            "command": "verify",
            "up_to": up_to,
            "complexes": complexes,
            "algebras": algebras,
            "morphisms": morphisms,
            "homotopies": homotopies,
            "contractions": contractions,
        }),
    )
}

fn transfer_cmd(path: &Path, out: &Path, up_to: Option<usize>, method: Method, pick: &Pick) -> Run {
    let doc = load(path)?;
    let an = Document::pick(&doc.algebras, pick.algebra.as_deref(), "algebra")?;
    let cn = Document::pick(&doc.contractions, pick.contraction.as_deref(), "contraction")?;
    let a = doc.algebra(an)?;
    let ctx = doc.contraction(cn)?;
    let up_to = up_to.unwrap_or(a.cap);
    if up_to > a.cap {
        return Err(Failure::Input(format!("--up-to {up_to} exceeds the arity cap {}", a.cap)));
    }
    let r = transfer_with(&ctx, &a, up_to, method.into())?;
    Document::from_transfer(&ctx, &r)?.save(out)?;
    let ops: Vec<usize> = r.nu.ops().keys().copied().collect();
    Ok(json!({
        "status": "pass",
        "command": "transfer",
        "algebra": an,
        "contraction": cn,
        "up_to": up_to,
        "nonzero_operations": ops,
        "out": out.display().to_string(),
    }))
}

fn minimal_cmd(path: &Path, out: &Path, up_to: Option<usize>, algebra: Option<&str>) -> Run {
    let doc = load(path)?;
    let an = Document::pick(&doc.algebras, algebra, "algebra")?;
    let a = doc.algebra(an)?;
    let up_to = up_to.unwrap_or(a.cap).min(a.cap);
    let mm = minimal_model(&a, up_to)?;
    Document::from_transfer(&mm.contraction, &mm.result)?.save(out)?;
    let h = &mm.contraction.w.space;
    let dims: serde_json::Map<String, Value> = h.dims().iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
    let ops: Vec<usize> = mm.model().ops().keys().copied().collect();
    Ok(json!({
        "status": "pass",
        "command": "minimal-model",
        "algebra": an,
        "homology_dims": dims,
        "nonzero_operations": ops,
        "up_to": up_to,
        "out": out.display().to_string(),
    }))
}

fn sign_char(odd: bool) -> char {
    if odd {
        '-'
    } else {
        '+'
    }
}

fn trees_cmd(kind: Kind, n: usize, _count: bool, list: bool, signs: bool) -> Outcome {
    if n == 0 || (kind == Kind::P && n < 2) {
        return Outcome { code: 2, stdout: format!("no {kind:?} trees with {n} leaves\n") };
    }
    let signed: Vec<(bool, String)> = match kind {
        Kind::P => trees::enumerate_p_trees(n).iter().map(|t| (trees::theta_tree(t), t.to_string())).collect(),
        Kind::Q => {
            let mut v = Vec::new();
            for t in trees::enumerate_q_trees(n) {
                match trees::epsilon_tree(&t) {
                    Ok(e) => v.push((e, t.to_string())),
                    Err(e) => return Outcome { code: 1, stdout: format!("{e}\n") },
                }
            }
            v
        }
    };
    let stdout = if list {
        signed.iter().map(|(_, t)| format!("{t}\n")).collect()
    } else if signs {
        signed.iter().map(|(s, t)| format!("{} {t}\n", sign_char(*s))).collect()
    } else {
        format!("{}\n", signed.len())
    };
    Outcome { code: 0, stdout }
}

fn kernels_cmd(path: &Path, kind: Kind, n: usize, method: Method, out: Option<&Path>, pick: &Pick) -> Run {
    let doc = load(path)?;
    let an = Document::pick(&doc.algebras, pick.algebra.as_deref(), "algebra")?;
    let cn = Document::pick(&doc.contractions, pick.contraction.as_deref(), "contraction")?;
    let a = doc.algebra(an)?;
    let ctx = doc.contraction(cn)?;
    if n > a.cap || n == 0 || (kind == Kind::P && n < 2) {
        return Err(Failure::Input(format!("kernel index {n} outside the valid range up to {}", a.cap)));
    }
    let k = Kernels::new(&ctx, &a)?;
    let inductive = || -> crate::Result<_> {
        Ok(match kind {
            Kind::P => k.p(n)?.as_ref().clone(),
            Kind::Q => k.q(n)?.as_ref().clone(),
        })
    };
    let tree = || match kind {
        Kind::P => trees::p_kernel_trees(&a, &ctx.h, n),
        Kind::Q => trees::q_kernel_trees(&a, &ctx.f, &ctx.g, &ctx.h, n),
    };
    let map = match method {
        Method::Inductive => inductive()?,
        Method::Trees => tree()?,
        Method::Both => {
            let x = inductive()?;
            if x != tree()? {
                return finish(false, json!({ "command": "kernels", "error": "inductive and tree kernels differ" }));
            }
            x
        }
    };
    let name = format!("{}_{n}", if kind == Kind::P { "p" } else { "q" });
    let mut dump = Document::new(doc.field, doc.cap);
    dump.add_complex("V", &ctx.v)?;
    dump.maps.insert(
        name.clone(),
        crate::document::MapDecl { source: "V".into(), target: "V".into(), map: map.clone() },
    );
    match out {
        Some(p) => {
            dump.save(p)?;
            Ok(json!({ "status": "pass", "command": "kernels", "map": name, "nnz": map.nnz(), "out": p.display().to_string() }))
        }
        None => {
            let mut v = dump.to_json();
            v["status"] = json!("pass");
            Ok(v)
        }
    }
}

fn obstruction_cmd(path: &Path, contraction: Option<&str>) -> Run {
    let doc = load(path)?;
    let cn = Document::pick(&doc.contractions, contraction, "contraction")?;
    let ob = obstruction_class(&doc.contraction(cn)?)?;
    let verdict = |z: bool| if z { "zero" } else { "nonzero" };
    finish(
        ob.agree(),
        json!({
            "command": "obstruction",
            "contraction": cn,
            "fh_minus_lf": verdict(ob.fh_lf_vanishes),
            "gl_minus_hg": verdict(ob.gl_hg_vanishes),
            "class": verdict(ob.fh_lf_vanishes && ob.gl_hg_vanishes),
            "agree": ob.agree(),
        }),
    )
}

fn parse_field(s: &str) -> crate::Result<Field> {
    if s == "Fp" {
        return Field::prime(101);
    }
    s.parse()
}

fn selfcheck(seed: u64, dims: &str, up_to: usize, field: &str) -> Run {
    let field = parse_field(field)?;
    let shape: Shape = dims.parse()?;
    if !(2..=6).contains(&up_to) {
        return Err(Failure::Input(format!("--up-to must lie in 2..=6, got {up_to}")));
    }
    let mut rng = rng64(seed);
    let (a, ctx) = random_transfer_input(&mut rng, field, shape, up_to)?;
    let mut checks = serde_json::Map::new();
    let mut passed = true;
    let mut record = |name: &str, ok: bool, detail: Value| {
        passed &= ok;
        checks.insert(name.to_string(), json!({ "passed": ok, "detail": detail }));
    };
    let input = compare_algebra(&a, up_to)?;
    record("input_structure", input.axioms.passed() && input.agree(), oracle_json(&input));
    let kid = check_kernel_identities(&ctx, &a, up_to)?;
    record("kernel_identities", kid.passed(), report_json(&kid));
    let r = transfer_unchecked(&ctx, &a, up_to, KernelMethod::Both);
    record("trees_match_inductive", r.is_ok(), json!(r.as_ref().err().map(|e| e.to_string())));
    let r = r?;
    let rep = r.check(up_to)?;
    record("transfer_axioms", rep.passed(), report_json(&rep));
    for (name, m) in [("phi", &r.phi), ("psi", &r.psi)] {
        let cmp = compare_morphism(m, up_to)?;
        record(&format!("bar_oracle_{name}"), cmp.agree(), oracle_json(&cmp));
    }
    let nu = compare_algebra(&r.nu, up_to)?;
    record("bar_oracle_nu", nu.agree(), oracle_json(&nu));
    let side = check_side_conditions(&ctx)?;
    record("side_conditions", side.passed(), report_json(&side));
    let ob = obstruction_class(&with_random_l(&mut rng, &ctx, true)?)?;
    record("obstruction_formulations_agree", ob.agree(), json!({ "fh_minus_lf_zero": ob.fh_lf_vanishes, "gl_minus_hg_zero": ob.gl_hg_vanishes }));
    let vdims: serde_json::Map<String, Value> = a.space().dims().iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
    let wdims: serde_json::Map<String, Value> = ctx.w.space.dims().iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
    finish(
        passed,
        json!({
            "command": "selfcheck",
            "seed": seed,
            "field": field.to_string(),
            "up_to": up_to,
            "v_dims": vdims,
            "w_dims": wdims,
            "checks": checks,
        }),
    )
}
