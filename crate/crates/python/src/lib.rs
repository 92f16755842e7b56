//! Python bindings: load documents, run the transfer, build minimal models and enumerate trees.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use hpt::ainfty::{check_ainfty, AInftyAlgebra};
use hpt::document::Document;
use hpt::fixtures::{self, rng64, Shape};
use hpt::map::MultilinearMap;
use hpt::minimal::{minimal_model as build_minimal_model, obstruction_class};
use hpt::scalar::Field;
use hpt::transfer::{transfer_with, ContractionData, KernelMethod, TransferResult};
use hpt::trees::{expand_p, expand_q};
use hpt::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Json(_) | Error::Io(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn field(spec: &str) -> PyResult<Field> {
    match spec {
        "Fp" => Ok(Field::prime(101).map_err(py_err)?),
        s => s.parse().map_err(py_err),
    }
}

fn method(name: &str) -> PyResult<KernelMethod> {
    match name {
        "inductive" => Ok(KernelMethod::Inductive),
        "trees" => Ok(KernelMethod::Trees),
        "both" => Ok(KernelMethod::Both),
        _ => Err(PyValueError::new_err(format!("unknown method {name:?}"))),
    }
}

/// Entries as (input labels, output label, coefficient) triples.
fn entries(m: &MultilinearMap) -> Vec<(Vec<String>, String, String)> {
    let (src, tgt) = (m.source(), m.target());
    let mut out = Vec::new();
    for (ins, outs) in m.decoded() {
        let labels: Vec<String> = ins.iter().map(|&g| src.label(g).to_string()).collect();
        for (o, c) in outs {
            out.push((labels.clone(), tgt.label(o[0]).to_string(), c.to_string()));
        }
    }
    out
}

/// An A∞ structure on a finite graded space.
#[pyclass(name = "Algebra", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAlgebra {
    inner: Arc<AInftyAlgebra>,
}

#[pymethods]
impl PyAlgebra {
    #[getter]
    fn field(&self) -> String {
        self.inner.field().to_string()
    }

    #[getter]
    fn cap(&self) -> usize {
        self.inner.cap
    }

    /// Dimension in each degree.
    fn dims(&self) -> BTreeMap<i32, usize> {
        self.inner.space().dims().clone()
    }

    fn labels(&self) -> Vec<String> {
        let s = self.inner.space();
        (0..s.dim() as u32).map(|g| s.label(g).to_string()).collect()
    }

    /// Arities of the nonzero operations, the differential excluded.
    fn arities(&self) -> Vec<usize> {
        self.inner.ops().keys().copied().collect()
    }

    /// μ_n as (inputs, output, coefficient) triples; n = 1 is the differential.
    fn op(&self, n: usize) -> Vec<(Vec<String>, String, String)> {
        if n == 1 {
            entries(self.inner.diff())
        } else {
            entries(&self.inner.op_or_zero(n))
        }
    }

    /// Whether the A∞ relations hold through arity `up_to`.
    fn check(&self, up_to: usize) -> PyResult<bool> {
        Ok(check_ainfty(&self.inner, up_to).map_err(py_err)?.passed())
    }

    fn __repr__(&self) -> String {
        format!("Algebra(field={}, dims={:?}, ops={:?})", self.field(), self.dims(), self.arities())
    }
}

/// A contraction (f, g, h) from V onto W, optionally with l.
#[pyclass(name = "Contraction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyContraction {
    inner: ContractionData,
}

#[pymethods]
impl PyContraction {
    fn source_dims(&self) -> BTreeMap<i32, usize> {
        self.inner.v.space.dims().clone()
    }

    fn target_dims(&self) -> BTreeMap<i32, usize> {
        self.inner.w.space.dims().clone()
    }

    #[getter]
    fn has_l(&self) -> bool {
        self.inner.l.is_some()
    }

    /// Whether the classes of fh − lf and gl − hg vanish, computed separately.
    fn obstruction(&self) -> PyResult<(bool, bool)> {
        let ob = obstruction_class(&self.inner).map_err(py_err)?;
        Ok((ob.fh_lf_vanishes, ob.gl_hg_vanishes))
    }
}

/// The transferred structure ν with the morphisms φ, ψ and the homotopy.
#[pyclass(name = "Transfer", frozen)]
struct PyTransfer {
    ctx: ContractionData,
    inner: TransferResult,
}

#[pymethods]
impl PyTransfer {
    #[getter]
    fn nu(&self) -> PyAlgebra {
        PyAlgebra { inner: self.inner.nu.clone() }
    }

    #[getter]
    fn contraction(&self) -> PyContraction {
        PyContraction { inner: self.ctx.clone() }
    }

    fn phi(&self, n: usize) -> Vec<(Vec<String>, String, String)> {
        entries(&self.inner.phi.comp_or_zero(n))
    }

    fn psi(&self, n: usize) -> Vec<(Vec<String>, String, String)> {
        entries(&self.inner.psi.comp_or_zero(n))
    }

    /// Every axiom through arity `up_to`: ν, φ, ψ and the homotopy.
    fn check(&self, up_to: usize) -> PyResult<bool> {
        Ok(self.inner.check(up_to).map_err(py_err)?.passed())
    }

    fn to_document(&self) -> PyResult<PyDocument> {
        Ok(PyDocument { inner: Document::from_transfer(&self.ctx, &self.inner).map_err(py_err)? })
    }
}

/// A JSON document of named spaces, maps and structures.
#[pyclass(name = "Document", frozen)]
struct PyDocument {
    inner: Document,
}

#[pymethods]
impl PyDocument {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyDocument { inner: Document::load(&path).map_err(py_err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyDocument { inner: Document::parse(text).map_err(py_err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_string_pretty()
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field.to_string()
    }

    fn algebras(&self) -> Vec<String> {
        self.inner.algebras.keys().cloned().collect()
    }

    fn contractions(&self) -> Vec<String> {
        self.inner.contractions.keys().cloned().collect()
    }

    fn algebra(&self, name: &str) -> PyResult<PyAlgebra> {
        Ok(PyAlgebra { inner: Arc::new(self.inner.algebra(name).map_err(py_err)?) })
    }

    fn contraction(&self, name: &str) -> PyResult<PyContraction> {
        Ok(PyContraction { inner: self.inner.contraction(name).map_err(py_err)? })
    }
}

/// The exterior algebra on a, b, c with ∂c = ab, over "Q", "Fp" (F₁₀₁) or "Fp:<p>".
#[pyfunction]
#[pyo3(signature = (field = "Q", cap = 4))]
fn heis(field: &str, cap: usize) -> PyResult<PyAlgebra> {
    Ok(PyAlgebra { inner: Arc::new(fixtures::heis(self::field(field)?, cap)) })
}

/// A seeded random structure with nonzero μ₃ and a random contraction of its complex.
#[pyfunction]
#[pyo3(signature = (seed, field = "Q", cap = 4))]
fn random_input(seed: u64, field: &str, cap: usize) -> PyResult<(PyAlgebra, PyContraction)> {
    let (a, ctx) = fixtures::random_transfer_input(&mut rng64(seed), self::field(field)?, Shape::default(), cap)
        .map_err(py_err)?;
    Ok((PyAlgebra { inner: Arc::new(a) }, PyContraction { inner: ctx }))
}

/// Transfers `algebra` along `contraction` through arity `up_to`.
#[pyfunction]
#[pyo3(signature = (contraction, algebra, up_to, method = "inductive"))]
fn transfer(contraction: &PyContraction, algebra: &PyAlgebra, up_to: usize, method: &str) -> PyResult<PyTransfer> {
    let r = transfer_with(&contraction.inner, &algebra.inner, up_to, self::method(method)?).map_err(py_err)?;
    Ok(PyTransfer { ctx: contraction.inner.clone(), inner: r })
}

/// Transfers `algebra` to its homology along a Hodge decomposition.
#[pyfunction]
fn minimal_model(algebra: &PyAlgebra, up_to: usize) -> PyResult<PyTransfer> {
    let mm = build_minimal_model(&algebra.inner, up_to).map_err(py_err)?;
    Ok(PyTransfer { ctx: mm.contraction, inner: mm.result })
}

/// Signed trees of the p (kind "p") or q (kind "q") kernel of arity n, as (negative, text).
#[pyfunction]
fn trees(kind: &str, n: usize) -> PyResult<Vec<(bool, String)>> {
    match kind {
        "p" => Ok(expand_p(n).into_iter().map(|(s, t)| (s, t.to_string())).collect()),
        "q" => Ok(expand_q(n).into_iter().map(|(s, t)| (s, t.to_string())).collect()),
        _ => Err(PyValueError::new_err(format!("unknown tree kind {kind:?}"))),
    }
}

/// Runs the command line with `args` (without the program name); returns (exit code, stdout).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let out = hpt::cli::run(std::iter::once("hpt".to_string()).chain(args));
    (out.code, out.stdout)
}

#[pymodule]
fn hpt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyContraction>()?;
    m.add_class::<PyTransfer>()?;
    m.add_class::<PyDocument>()?;
    m.add_function(wrap_pyfunction!(heis, m)?)?;
    m.add_function(wrap_pyfunction!(random_input, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_model, m)?)?;
    m.add_function(wrap_pyfunction!(trees, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
