//! Python module `heisenbn`. Documents go in and results come out as plain
//! Python values (dicts, lists, floats); any argument that takes a document
//! accepts either JSON text or an equivalent dict.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;

use heisenbn::bn::{Evidence, Network as CoreNetwork};
use heisenbn::calibration::{FitSettings, Priors};
use heisenbn::defect::{DefectModelParams, DefectTemplate};
use heisenbn::io::render;
use heisenbn::io::{
    model_document, parse_evidence, parse_fault_tree, parse_model_document, parse_params, parse_priors, parse_records,
    parse_scenario, to_canonical_json, ErrorReport, ParseOptions,
};
use serde::Serialize;

fn raise(r: impl Into<ErrorReport>) -> PyErr {
    let r = r.into();
    if r.kind.is_input_error() {
        PyValueError::new_err(r.to_string())
    } else {
        PyRuntimeError::new_err(r.to_string())
    }
}

/// JSON text of a document given as a string or as a Python value.
fn text(doc: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = doc.cast::<PyString>() {
        return Ok(s.to_str()?.to_owned());
    }
    let json = doc.py().import("json")?;
    json.call_method1("dumps", (doc,))?.extract()
}

/// Python value of a serializable result.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (to_canonical_json(value),))
}

fn opts(strict: bool) -> ParseOptions {
    ParseOptions { strict }
}

fn params(doc: Option<&Bound<'_, PyAny>>, strict: bool) -> PyResult<DefectModelParams> {
    match doc {
        Some(d) => parse_params(&text(d)?, opts(strict)).map_err(raise),
        None => Ok(DefectModelParams::default()),
    }
}

fn evidence(doc: Option<&Bound<'_, PyAny>>, net: &CoreNetwork, strict: bool) -> PyResult<Evidence> {
    match doc {
        Some(d) => {
            let parsed = parse_evidence(&text(d)?, opts(strict)).map_err(raise)?;
            render::resolve_evidence(&parsed, net).map_err(raise)
        }
        None => Ok(Evidence::new()),
    }
}

/// A parsed model document.
#[pyclass(frozen)]
struct Network {
    inner: CoreNetwork,
}

#[pymethods]
impl Network {
    #[new]
    #[pyo3(signature = (model, strict = true))]
    fn new(model: &Bound<'_, PyAny>, strict: bool) -> PyResult<Self> {
        let doc = parse_model_document(&text(model)?, opts(strict)).map_err(raise)?;
        Ok(Network { inner: doc.to_network().map_err(raise)? })
    }

    /// Node ids in document order.
    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().iter().map(|n| n.id().to_string()).collect()
    }

    fn states(&self, node: &str) -> PyResult<Vec<String>> {
        Ok(self.inner.node(node).map_err(raise)?.states().labels().to_vec())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Posterior marginals; every node when `targets` is None.
    #[pyo3(signature = (evidence = None, targets = None, strict = true))]
    fn infer<'py>(
        &self,
        py: Python<'py>,
        evidence: Option<&Bound<'py, PyAny>>,
        targets: Option<Vec<String>>,
        strict: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ev = self::evidence(evidence, &self.inner, strict)?;
        let targets = targets.unwrap_or_else(|| self.nodes());
        let refs: Vec<&str> = targets.iter().map(String::as_str).collect();
        let report = py.detach(|| render::infer(&self.inner, &ev, &refs)).map_err(raise)?;
        to_py(py, &report)
    }

    /// Tornado sweep and mutual information; inputs default to every
    /// ancestor of the target.
    #[pyo3(signature = (target, evidence = None, inputs = None, strict = true))]
    fn sensitivity<'py>(
        &self,
        py: Python<'py>,
        target: &str,
        evidence: Option<&Bound<'py, PyAny>>,
        inputs: Option<Vec<String>>,
        strict: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ev = self::evidence(evidence, &self.inner, strict)?;
        let out = py.detach(|| render::sensitivity(&self.inner, &ev, target, inputs.as_deref())).map_err(raise)?;
        to_py(py, &out)
    }

    /// Canonical model document text.
    fn to_json(&self) -> String {
        to_canonical_json(&model_document(&self.inner, None))
    }
}

/// The defect-prediction template with a fixed parameter set.
#[pyclass(frozen)]
struct DefectModel {
    template: DefectTemplate,
}

#[pymethods]
impl DefectModel {
    #[new]
    #[pyo3(signature = (params = None, strict = true))]
    fn new(params: Option<&Bound<'_, PyAny>>, strict: bool) -> PyResult<Self> {
        Ok(DefectModel { template: DefectTemplate::new(self::params(params, strict)?).map_err(raise)? })
    }

    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, self.template.params())
    }

    /// Found and field defect distributions for a scenario.
    #[pyo3(signature = (scenario, strict = true))]
    fn predict<'py>(&self, py: Python<'py>, scenario: &Bound<'py, PyAny>, strict: bool) -> PyResult<Bound<'py, PyAny>> {
        let s = parse_scenario(&text(scenario)?, opts(strict)).map_err(raise)?;
        let out = py.detach(|| render::predict(&self.template, &s, &Evidence::new())).map_err(raise)?;
        to_py(py, &out)
    }

    /// Posteriors after verification found `found` defects.
    #[pyo3(signature = (scenario, found, strict = true))]
    fn diagnose<'py>(
        &self,
        py: Python<'py>,
        scenario: &Bound<'py, PyAny>,
        found: u64,
        strict: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let s = parse_scenario(&text(scenario)?, opts(strict)).map_err(raise)?;
        let out = py.detach(|| render::diagnose(&self.template, &s, &Evidence::new(), found)).map_err(raise)?;
        to_py(py, &out)
    }

    /// The template network for a scenario, with the evidence its answers
    /// imply.
    #[pyo3(signature = (scenario, strict = true))]
    fn instantiate<'py>(
        &self,
        py: Python<'py>,
        scenario: &Bound<'py, PyAny>,
        strict: bool,
    ) -> PyResult<(Network, Bound<'py, PyAny>)> {
        let s = parse_scenario(&text(scenario)?, opts(strict)).map_err(raise)?;
        let dn = self.template.instantiate(&s).map_err(raise)?;
        let ev = heisenbn::io::evidence_document(&dn.evidence, &dn.network).map_err(raise)?;
        Ok((Network { inner: dn.network }, to_py(py, &ev)?))
    }
}

/// Fit parameters to project records; returns `{"params", "report"}`.
#[pyfunction]
#[pyo3(signature = (records, priors = None, init = None, strict = true))]
fn calibrate<'py>(
    py: Python<'py>,
    records: &Bound<'py, PyAny>,
    priors: Option<&Bound<'py, PyAny>>,
    init: Option<&Bound<'py, PyAny>>,
    strict: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let recs = parse_records(&text(records)?, opts(strict)).map_err(raise)?;
    let priors = match priors {
        Some(p) => parse_priors(&text(p)?, opts(strict)).map_err(raise)?,
        None => Priors::default(),
    };
    let init = params(init, strict)?;
    let out = py.detach(|| render::calibrate(&recs, &init, &priors, &FitSettings::default())).map_err(raise)?;
    to_py(py, &out)
}

/// Probability of the top event of a fault tree.
#[pyfunction]
#[pyo3(signature = (tree, strict = true))]
fn fault_tree_top(tree: &Bound<'_, PyAny>, strict: bool) -> PyResult<f64> {
    let t = parse_fault_tree(&text(tree)?, opts(strict)).map_err(raise)?;
    Ok(render::top_event(&t).map_err(raise)?.probability)
}

/// Basic events ranked by posterior failure probability given soft
/// evidence `(likelihood_true, likelihood_false)` on the top event.
#[pyfunction]
#[pyo3(signature = (tree, likelihood_true = 1.0, likelihood_false = 0.0, strict = true))]
fn fault_tree_diagnose<'py>(
    py: Python<'py>,
    tree: &Bound<'py, PyAny>,
    likelihood_true: f64,
    likelihood_false: f64,
    strict: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let t = parse_fault_tree(&text(tree)?, opts(strict)).map_err(raise)?;
    to_py(py, &render::cause_ranking(&t, likelihood_true, likelihood_false).map_err(raise)?)
}

/// Compile a fault tree into a `Network`.
#[pyfunction]
#[pyo3(signature = (tree, strict = true))]
fn fault_tree_network(tree: &Bound<'_, PyAny>, strict: bool) -> PyResult<Network> {
    let t = parse_fault_tree(&text(tree)?, opts(strict)).map_err(raise)?;
    Ok(Network { inner: t.compile().map_err(raise)? })
}

#[pymodule]
#[pyo3(name = "heisenbn")]
fn heisenbn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_class::<DefectModel>()?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(fault_tree_top, m)?)?;
    m.add_function(wrap_pyfunction!(fault_tree_diagnose, m)?)?;
    m.add_function(wrap_pyfunction!(fault_tree_network, m)?)?;
    Ok(())
}
