//! Python bindings: `import ccskit`.

use std::collections::HashMap;

use ccs_core::equivalence::{check as check_relation, RelationKind};
use ccs_core::laws::{self, Binding, Bindings};
use ccs_core::semantics::{explore, Limits};
use ccs_core::{klop as klop_mod, parse_term, parse_workspace, print_term, print_workspace, Environment, Error, LabelId, ProcessTerm};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(ccskit, CcsError, PyValueError);
create_exception!(ccskit, CapExceeded, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ExceedsCap { .. } | Error::IncompleteLts => CapExceeded::new_err(e.to_string()),
        e => CcsError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A CCS process term.
#[pyclass(name = "Term", module = "ccskit", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyTerm(ProcessTerm);

#[pymethods]
impl PyTerm {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        parse_term(src).map(PyTerm).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        ProcessTerm::from_json(src).map(PyTerm).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn depth(&self) -> usize {
        self.0.depth()
    }

    fn labels(&self) -> Vec<String> {
        self.0.mentioned_labels().iter().map(|l| l.to_string()).collect()
    }

    fn __add__(&self, other: TermArg) -> PyResult<Self> {
        Ok(PyTerm(ProcessTerm::sum(self.0.clone(), other.term()?)))
    }

    fn __or__(&self, other: TermArg) -> PyResult<Self> {
        Ok(PyTerm(ProcessTerm::par(self.0.clone(), other.term()?)))
    }

    fn __str__(&self) -> String {
        print_term(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", print_term(&self.0))
    }
}

/// Constant definitions plus the declared alphabet.
#[pyclass(name = "Workspace", module = "ccskit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWorkspace(Environment);

#[pymethods]
impl PyWorkspace {
    #[new]
    #[pyo3(signature = (src = ""))]
    fn new(src: &str) -> PyResult<Self> {
        parse_workspace(src).map(PyWorkspace).map_err(to_py)
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.0.alphabet().map(|l| l.to_string()).collect()
    }

    fn definitions(&self) -> Vec<(String, PyTerm)> {
        self.0.definitions().map(|(n, t)| (n.to_string(), PyTerm(t.clone()))).collect()
    }

    fn __str__(&self) -> String {
        print_workspace(&self.0)
    }
}

/// Either a `Term` or term source text.
#[derive(FromPyObject)]
enum TermArg {
    Term(PyTerm),
    Text(String),
}

impl TermArg {
    fn term(self) -> PyResult<ProcessTerm> {
        match self {
            TermArg::Term(t) => Ok(t.0),
            TermArg::Text(s) => parse_term(&s).map_err(to_py),
        }
    }
}

fn setup(ws: Option<&PyWorkspace>, terms: Vec<TermArg>) -> PyResult<(Environment, Vec<ProcessTerm>)> {
    let terms = terms.into_iter().map(TermArg::term).collect::<PyResult<Vec<_>>>()?;
    let env = ws.map(|w| w.0.clone()).unwrap_or_default().extended_for(&terms);
    Ok((env, terms))
}

fn limits(max_states: usize) -> Limits {
    Limits { max_states, ..Limits::default() }
}

fn kind_of(kind: &str) -> PyResult<RelationKind> {
    kind.parse().map_err(|_| CcsError::new_err(format!("unknown relation `{kind}`")))
}

#[pyfunction]
fn parse(src: &str) -> PyResult<PyTerm> {
    PyTerm::new(src)
}

/// Decide `kind` ("strong", "weak" or "obscongr") and return the verdict dict.
#[pyfunction]
#[pyo3(signature = (kind, p, q, workspace = None, max_states = 10_000))]
fn check<'py>(
    py: Python<'py>,
    kind: &str,
    p: TermArg,
    q: TermArg,
    workspace: Option<PyRef<'py, PyWorkspace>>,
    max_states: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = kind_of(kind)?;
    let (env, ts) = setup(workspace.as_deref(), vec![p, q])?;
    let v = check_relation(&env, kind, &ts[0], &ts[1], limits(max_states)).map_err(to_py)?;
    json_to_py(py, &v.to_json())
}

fn related(kind: RelationKind, p: TermArg, q: TermArg, workspace: Option<&PyWorkspace>) -> PyResult<bool> {
    let (env, ts) = setup(workspace, vec![p, q])?;
    check_relation(&env, kind, &ts[0], &ts[1], Limits::default()).map(|v| v.related).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (p, q, workspace = None))]
fn strong_equiv(p: TermArg, q: TermArg, workspace: Option<PyRef<'_, PyWorkspace>>) -> PyResult<bool> {
    related(RelationKind::Strong, p, q, workspace.as_deref())
}

#[pyfunction]
#[pyo3(signature = (p, q, workspace = None))]
fn weak_equiv(p: TermArg, q: TermArg, workspace: Option<PyRef<'_, PyWorkspace>>) -> PyResult<bool> {
    related(RelationKind::Weak, p, q, workspace.as_deref())
}

#[pyfunction]
#[pyo3(signature = (p, q, workspace = None))]
fn obs_congr(p: TermArg, q: TermArg, workspace: Option<PyRef<'_, PyWorkspace>>) -> PyResult<bool> {
    related(RelationKind::ObsCongr, p, q, workspace.as_deref())
}

/// The transition system of `p` as a dict, or as DOT text with `format="dot"`.
#[pyfunction]
#[pyo3(signature = (p, format = "json", workspace = None, max_states = 10_000))]
fn lts<'py>(
    py: Python<'py>,
    p: TermArg,
    format: &str,
    workspace: Option<PyRef<'py, PyWorkspace>>,
    max_states: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let (env, ts) = setup(workspace.as_deref(), vec![p])?;
    let lts = explore(&env, &ts, limits(max_states)).map_err(to_py)?;
    match format {
        "json" => json_to_py(py, &lts.to_json()),
        "dot" => Ok(pyo3::types::PyString::new(py, &lts.to_dot()).into_any()),
        other => Err(CcsError::new_err(format!("unknown format `{other}`"))),
    }
}

#[pyfunction]
fn law_ids() -> Vec<&'static str> {
    laws::catalog().iter().map(|l| l.id).collect()
}

/// Check one law instance. `bindings` maps metavariable names to source text.
#[pyfunction]
fn check_law<'py>(py: Python<'py>, law: &str, bindings: HashMap<String, String>) -> PyResult<Bound<'py, PyAny>> {
    let law = laws::law(law).map_err(to_py)?;
    let mut b = Bindings::new();
    for (name, src) in &bindings {
        let kind = law
            .metavar_kind(name)
            .ok_or_else(|| CcsError::new_err(format!("`{name}` is not a metavariable of {}", law.id)))?;
        b.insert(name, Binding::parse(kind, src).map_err(to_py)?);
    }
    let env = Environment::new([LabelId::new("a").unwrap(), LabelId::new("b").unwrap()], []).map_err(to_py)?;
    let r = laws::check_law_with(&env, &law, &b, Limits::default()).map_err(to_py)?;
    json_to_py(py, &r.to_json())
}

#[pyfunction]
fn deng<'py>(py: Python<'py>, p: TermArg, q: TermArg) -> PyResult<Bound<'py, PyAny>> {
    let (env, ts) = setup(None, vec![p, q])?;
    let o = laws::deng_classify(&env, &ts[0], &ts[1], Limits::default()).map_err(to_py)?;
    json_to_py(py, &o.to_json())
}

#[pyfunction]
fn hennessy<'py>(py: Python<'py>, p: TermArg, q: TermArg) -> PyResult<Bound<'py, PyAny>> {
    let (env, ts) = setup(None, vec![p, q])?;
    let o = laws::hennessy_classify(&env, &ts[0], &ts[1], Limits::default()).map_err(to_py)?;
    json_to_py(py, &o.to_json())
}

#[pyfunction]
#[pyo3(signature = (n, action = "a"))]
fn klop(n: usize, action: &str) -> PyResult<PyTerm> {
    let a = LabelId::new(action).map_err(to_py)?;
    klop_mod::klop(&a, n).map(PyTerm).map_err(to_py)
}

/// Decide ≈c through a Klop summand and cross-check with sampled summands.
#[pyfunction]
#[pyo3(signature = (p, q, samples = 25, seed = 0))]
fn coarsest<'py>(py: Python<'py>, p: TermArg, q: TermArg, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let (env, ts) = setup(None, vec![p, q])?;
    let r = klop_mod::coarsest_congr_crosscheck(&env, &ts[0], &ts[1], samples, seed, Limits::default()).map_err(to_py)?;
    json_to_py(py, &r.to_json())
}

#[pymodule]
fn ccskit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTerm>()?;
    m.add_class::<PyWorkspace>()?;
    m.add("CcsError", m.py().get_type::<CcsError>())?;
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(strong_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(weak_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(obs_congr, m)?)?;
    m.add_function(wrap_pyfunction!(lts, m)?)?;
    m.add_function(wrap_pyfunction!(law_ids, m)?)?;
    m.add_function(wrap_pyfunction!(check_law, m)?)?;
    m.add_function(wrap_pyfunction!(deng, m)?)?;
    m.add_function(wrap_pyfunction!(hennessy, m)?)?;
    m.add_function(wrap_pyfunction!(klop, m)?)?;
    m.add_function(wrap_pyfunction!(coarsest, m)?)?;
    Ok(())
}
