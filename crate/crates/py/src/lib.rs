//! Python bindings. Reports come back as plain dicts with the same fields
//! as the CLI's JSON output.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use ::csmetric::audit as checks;
use ::csmetric::fixed_point;
use ::csmetric::poly;
use ::csmetric::spec::{AlphaSpec, SpaceSpec};
use ::csmetric::{ComposedSpace, CsError, SampleConfig, SelfMap, Strategy};

fn err(e: CsError) -> PyErr {
    match e {
        CsError::Domain(_)
        | CsError::Config(_)
        | CsError::Precondition(_)
        | CsError::Parse { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn config(seed: u64, samples: usize, strategy: &str) -> PyResult<SampleConfig> {
    let strategy = match strategy {
        "uniform_random" => Strategy::UniformRandom,
        "stratified_grid" => Strategy::StratifiedGrid,
        "grid_plus_random" => Strategy::GridPlusRandom,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown strategy '{other}' (expected uniform_random, stratified_grid, grid_plus_random)"
            )))
        }
    };
    Ok(SampleConfig::new(seed, samples, strategy))
}

/// A composed S-metric space built from a built-in metric.
#[pyclass(name = "Space", module = "csmetric", frozen)]
struct Space {
    inner: ComposedSpace,
}

#[pymethods]
impl Space {
    /// `Space("squared_diff", params=[1, 100], alpha="identity")`. `alpha`
    /// is a built-in id or `"expr:<expression>"`.
    #[new]
    #[pyo3(signature = (metric, params=None, alpha=None))]
    fn new(metric: &str, params: Option<Vec<f64>>, alpha: Option<&str>) -> PyResult<Self> {
        let alpha = alpha.map(|a| match a.strip_prefix("expr:") {
            Some(src) => AlphaSpec {
                id: "expr".into(),
                params: Vec::new(),
                expr: Some(src.into()),
            },
            None => AlphaSpec {
                id: a.into(),
                params: Vec::new(),
                expr: None,
            },
        });
        let spec = SpaceSpec {
            metric: metric.into(),
            params: params.unwrap_or_default(),
            domain: None,
            alpha,
            symmetric: None,
            map: None,
        };
        Ok(Space {
            inner: spec.build().map_err(err)?,
        })
    }

    /// Builds a space from a JSON space document.
    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        let spec = SpaceSpec::from_json(doc).map_err(err)?;
        Ok(Space {
            inner: spec.build().map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        Ok(SpaceSpec::describe(&self.inner, None)
            .map_err(err)?
            .to_json())
    }

    fn metric(&self, q: f64, h: f64, w: f64) -> PyResult<f64> {
        self.inner.eval_metric(q, h, w).map_err(err)
    }

    fn alpha(&self, t: f64) -> PyResult<f64> {
        self.inner.eval_alpha(t).map_err(err)
    }

    #[getter]
    fn symmetric(&self) -> bool {
        self.inner.symmetric_claim
    }

    fn __repr__(&self) -> String {
        format!(
            "Space({}, alpha={}, domain={})",
            self.inner.metric.id(),
            self.inner.alpha.id(),
            self.inner.domain
        )
    }
}

fn map_for(space: &Space, map: &str, params: Vec<f64>) -> PyResult<SelfMap> {
    SelfMap::builtin(map, &params, space.inner.domain.clone()).map_err(err)
}

/// Runs one axiom check by name: identity_axiom, composed_triangle,
/// classic_triangle or symmetry.
#[pyfunction]
#[pyo3(signature = (space, check, seed=42, samples=10_000, strategy="grid_plus_random"))]
fn audit(
    py: Python<'_>,
    space: &Space,
    check: &str,
    seed: u64,
    samples: usize,
    strategy: &str,
) -> PyResult<Py<PyAny>> {
    let cfg = config(seed, samples, strategy)?;
    let s = &space.inner;
    let verdict = match check {
        "identity_axiom" => checks::check_identity_axiom(s, &cfg),
        "composed_triangle" => checks::check_composed_triangle(s, &cfg),
        "classic_triangle" => checks::check_classic_triangle(s, &cfg),
        "symmetry" => checks::check_symmetry(s, &cfg),
        other => return Err(PyValueError::new_err(format!("unknown check '{other}'"))),
    }
    .map_err(err)?;
    to_py(py, &verdict)
}

#[pyfunction]
#[pyo3(signature = (space, map, x0, map_params=vec![], tol=1e-12, max_iter=fixed_point::DEFAULT_MAX_ITER))]
fn picard(
    py: Python<'_>,
    space: &Space,
    map: &str,
    x0: f64,
    map_params: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> PyResult<Py<PyAny>> {
    let f = map_for(space, map, map_params)?;
    to_py(
        py,
        &fixed_point::picard(&space.inner, &f, x0, tol, max_iter).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (space, map, map_params=vec![], seed=42, samples=10_000))]
fn estimate_contraction(
    py: Python<'_>,
    space: &Space,
    map: &str,
    map_params: Vec<f64>,
    seed: u64,
    samples: usize,
) -> PyResult<Py<PyAny>> {
    let f = map_for(space, map, map_params)?;
    let cfg = config(seed, samples, "grid_plus_random")?;
    to_py(
        py,
        &fixed_point::estimate_contraction_factor(&space.inner, &f, &cfg).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (space, map, r, map_params=vec![], seed=42, samples=10_000))]
fn check_banach(
    py: Python<'_>,
    space: &Space,
    map: &str,
    r: f64,
    map_params: Vec<f64>,
    seed: u64,
    samples: usize,
) -> PyResult<Py<PyAny>> {
    let f = map_for(space, map, map_params)?;
    let cfg = config(seed, samples, "grid_plus_random")?;
    to_py(
        py,
        &fixed_point::check_banach(&space.inner, &f, r, &cfg).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (m, x0=poly::DEFAULT_X0, tol=1e-12))]
fn solve_poly(py: Python<'_>, m: u32, x0: f64, tol: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &poly::solve_poly(m, x0, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (m, tol=1e-14))]
fn bisection_oracle(m: u32, tol: f64) -> PyResult<f64> {
    poly::bisection_oracle(m, tol).map_err(err)
}

#[pyfunction]
fn residual(m: u32, v: f64) -> PyResult<f64> {
    poly::residual(m, v).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, seed=42, samples=10_000, tol=1e-12))]
fn verify_thm41(
    py: Python<'_>,
    m: u32,
    seed: u64,
    samples: usize,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let opts = poly::Thm41Options {
        samples: config(seed, samples, "grid_plus_random")?,
        solve_tol: tol,
        ..poly::Thm41Options::default()
    };
    let report = poly::verify_theorem_4_1(m, &opts).map_err(err)?;
    let dict = to_py(py, &report)?;
    dict.bind(py).set_item("passed", report.all_passed())?;
    Ok(dict)
}

#[pymodule]
fn csmetric(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Space>()?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(picard, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_contraction, m)?)?;
    m.add_function(wrap_pyfunction!(check_banach, m)?)?;
    m.add_function(wrap_pyfunction!(solve_poly, m)?)?;
    m.add_function(wrap_pyfunction!(bisection_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(verify_thm41, m)?)?;
    Ok(())
}
