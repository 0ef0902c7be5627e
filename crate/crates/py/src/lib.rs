//! Python bindings: templates, requirements, suites and probes.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use soor_core::adt::{suite_outcome, InputGenerator};
use soor_core::engine::{
    filter_items, load_suite, parse_suite_file, resolve_requirement, run_suite, serialize_report, Format, ItemSpec,
    Report as CoreReport, RequirementEntry, SuiteConfig, BUILTIN_SUITES,
};
use soor_core::fixtures::{driver_fixture, driver_fixture_names, MODEL_FIXTURES, PROBES};
use soor_core::temporal::{self, find_template, TemplateKind, TemporalRequirement, TemporalTemplate};
use soor_core::{Trace, Verdict as CoreVerdict};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

/// A requirement template from the catalog.
#[pyclass(frozen, module = "soor")]
struct Template {
    inner: TemporalTemplate,
}

#[pymethods]
impl Template {
    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn text(&self) -> &str {
        &self.inner.text_skeleton
    }

    /// Slot names in declaration order.
    #[getter]
    fn slots(&self) -> Vec<String> {
        self.inner.slot_names().into_iter().map(String::from).collect()
    }

    #[getter]
    fn k(&self) -> Option<u32> {
        self.inner.k()
    }

    fn __repr__(&self) -> String {
        format!("Template({:?})", self.inner.name)
    }
}

/// Outcome of one check.
#[pyclass(frozen, module = "soor")]
struct Verdict {
    inner: CoreVerdict,
}

#[pymethods]
impl Verdict {
    /// `holds`, `violated`, `bound_exhausted` or `precondition_unmet`.
    #[getter]
    fn outcome(&self) -> &'static str {
        self.inner.outcome.as_str()
    }

    #[getter]
    fn message(&self) -> &str {
        &self.inner.message
    }

    #[getter]
    fn failure(&self) -> Option<&'static str> {
        self.inner.failure.map(|f| f.as_str())
    }

    #[getter]
    fn iterations(&self) -> Option<u64> {
        self.inner.iterations
    }

    #[getter]
    fn witness_step(&self) -> Option<usize> {
        self.inner.witness_step()
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Verdict({})", self.inner.outcome)
    }
}

/// A template bound to a model fixture.
#[pyclass(frozen, module = "soor")]
struct Requirement {
    inner: Arc<TemporalRequirement>,
}

#[pymethods]
impl Requirement {
    #[new]
    #[pyo3(signature = (name, template, model, bind, bound=None, k=None))]
    fn new(
        name: String,
        template: String,
        model: String,
        bind: BTreeMap<String, String>,
        bound: Option<u64>,
        k: Option<u32>,
    ) -> PyResult<Self> {
        let entry = RequirementEntry {
            name,
            template,
            model,
            bind,
            bound,
            k,
        };
        let inner = resolve_requirement(&entry).map_err(PyValueError::new_err)?;
        Ok(Self { inner: Arc::new(inner) })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn template(&self) -> &str {
        &self.inner.template.name
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    /// LTL text of a pattern requirement.
    fn formula(&self) -> PyResult<String> {
        self.inner.formula().map(|f| f.to_string()).map_err(value_error)
    }

    #[pyo3(signature = (seed=0))]
    fn verify(&self, seed: u64) -> PyResult<Verdict> {
        self.inner.verify(seed).map(|inner| Verdict { inner }).map_err(value_error)
    }
}

/// Results of a suite run.
#[pyclass(frozen, module = "soor")]
struct Report {
    inner: CoreReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// Outcome name to count.
    #[getter]
    fn totals(&self) -> BTreeMap<&'static str, usize> {
        let t = &self.inner.totals;
        BTreeMap::from([
            ("holds", t.holds),
            ("violated", t.violated),
            ("bound_exhausted", t.bound_exhausted),
            ("precondition_unmet", t.precondition_unmet),
        ])
    }

    /// `(item name, outcome)` in declaration order.
    #[getter]
    fn verdicts(&self) -> Vec<(String, &'static str)> {
        self.inner.items.iter().map(|i| (i.name.clone(), i.verdict.as_str())).collect()
    }

    #[getter]
    fn exit_status(&self) -> i32 {
        self.inner.exit_status()
    }

    #[pyo3(signature = (format="json"))]
    fn serialize(&self, format: &str) -> PyResult<String> {
        let fmt: Format = format.parse().map_err(PyValueError::new_err)?;
        Ok(serialize_report(&self.inner, fmt))
    }

    fn __len__(&self) -> usize {
        self.inner.items.len()
    }
}

fn run(items: Vec<ItemSpec>, seed: u64, time_boundary: Option<u64>, samples: usize, filter: Option<&str>) -> PyResult<Report> {
    let items = match filter {
        Some(f) => filter_items(items, f).map_err(value_error)?,
        None => items,
    };
    let cfg = SuiteConfig {
        time_boundary,
        samples,
        ..SuiteConfig::new(items, seed)
    };
    run_suite(&cfg).map(|inner| Report { inner }).map_err(value_error)
}

/// Every template in the catalog.
#[pyfunction]
fn catalog() -> Vec<Template> {
    temporal::catalog().into_iter().map(|inner| Template { inner }).collect()
}

/// Runs `builtin:<name>` or a suite file path.
#[pyfunction]
#[pyo3(signature = (suite, seed=0, time_boundary=None, samples=1000, filter=None))]
fn verify(py: Python<'_>, suite: &str, seed: u64, time_boundary: Option<u64>, samples: usize, filter: Option<&str>) -> PyResult<Report> {
    let items = load_suite(suite, |p| std::fs::read_to_string(p)).map_err(value_error)?;
    py.detach(|| run(items, seed, time_boundary, samples, filter))
}

/// Runs a suite given as TOML text.
#[pyfunction]
#[pyo3(signature = (text, seed=0, time_boundary=None, samples=1000))]
fn verify_text(py: Python<'_>, text: &str, seed: u64, time_boundary: Option<u64>, samples: usize) -> PyResult<Report> {
    let items = parse_suite_file(text).map_err(value_error)?;
    py.detach(|| run(items, seed, time_boundary, samples, None))
}

/// Checks a pattern template on a trace given as one `{condition: bool}` dict per step.
#[pyfunction]
#[pyo3(signature = (template, bind, steps, k=None))]
fn check_trace(template: &str, bind: BTreeMap<String, String>, steps: Vec<BTreeMap<String, bool>>, k: Option<u32>) -> PyResult<Verdict> {
    let mut t = find_template(template).map_err(value_error)?;
    if let Some(k) = k {
        t = t.with_k(k).map_err(value_error)?;
    }
    let TemplateKind::Pattern { pattern, scope } = t.kind else {
        return Err(PyValueError::new_err(format!("{template} is not a pattern template")));
    };
    let conditions: Vec<String> = bind.values().cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let rows = steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            conditions
                .iter()
                .map(|c| step.get(c).copied().ok_or_else(|| PyValueError::new_err(format!("step {i} lacks `{c}`"))))
                .collect::<PyResult<Vec<bool>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    let trace = Trace::from_steps(conditions, rows).map_err(value_error)?;
    temporal::check_trace(pattern, scope, &bind, &trace)
        .map(|inner| Verdict { inner })
        .map_err(value_error)
}

/// Runs a driver fixture and returns `(outcome, per-driver JSON reports)`.
#[pyfunction]
#[pyo3(signature = (fixture, seed=0, samples=1000))]
fn run_drivers(py: Python<'_>, fixture: &str, seed: u64, samples: usize) -> PyResult<(&'static str, String)> {
    let suite = driver_fixture(fixture).map_err(value_error)?;
    let reports = py.detach(|| suite.run(&InputGenerator::new(seed).with_samples(samples)));
    Ok((suite_outcome(&reports).as_str(), to_json(&reports)))
}

#[pyfunction]
#[pyo3(signature = (name, seed=0, samples=1000))]
fn run_probe(name: &str, seed: u64, samples: usize) -> PyResult<Verdict> {
    soor_core::fixtures::run_probe(name, &InputGenerator::new(seed).with_samples(samples))
        .map(|inner| Verdict { inner })
        .ok_or_else(|| PyValueError::new_err(format!("unknown probe `{name}`")))
}

/// Names of model fixtures, driver fixtures, probes and builtin suites.
#[pyfunction]
fn fixtures() -> BTreeMap<&'static str, Vec<String>> {
    let names = |s: &[&str]| s.iter().map(|n| n.to_string()).collect();
    BTreeMap::from([
        ("models", names(&MODEL_FIXTURES)),
        ("drivers", driver_fixture_names()),
        ("probes", names(&PROBES)),
        ("suites", names(&BUILTIN_SUITES)),
    ])
}

#[pymodule]
fn soor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Template>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<Requirement>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_text, m)?)?;
    m.add_function(wrap_pyfunction!(check_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_drivers, m)?)?;
    m.add_function(wrap_pyfunction!(run_probe, m)?)?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    Ok(())
}
