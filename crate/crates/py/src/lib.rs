//! Python bindings. Build with `--features extension-module` and import the
//! resulting library as `torus_mm`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use torus_mm::constants::CoarseConstants;
use torus_mm::hierarchy::{build_hierarchy_path, check_hierarchy_axioms, HierarchyPath};
use torus_mm::machinery::{coarse_equal, distance_formula};
use torus_mm::orbits::{enumerate_classes, growth_rate, length_spectrum};
use torus_mm::projection::{annular_coefficients, Endpoint};
use torus_mm::thurston::{cf_bound_certificate, classify, fixed_points, psi, translation_length, TwistTuple};
use torus_mm::{farey, marking, projection, Error};

create_exception!(torus_mm, BudgetError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Budget { .. } | Error::Overflow => BudgetError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for torus_mm::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A slope `p/q` in lowest terms; `1/0` is infinity.
#[pyclass(name = "Slope", module = "torus_mm", frozen, eq, hash, from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PySlope(pub farey::Slope);

#[pymethods]
impl PySlope {
    #[new]
    fn new(p: i64, q: i64) -> PyResult<Self> {
        Ok(PySlope(farey::Slope::new(p, q).py()?))
    }

    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        Ok(PySlope(s.parse().py()?))
    }

    #[getter]
    fn p(&self) -> i64 {
        self.0.p()
    }

    #[getter]
    fn q(&self) -> i64 {
        self.0.q()
    }

    fn cf(&self) -> PyResult<String> {
        Ok(farey::cf_expand(&self.0).py()?.to_string())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Slope({}, {})", self.0.p(), self.0.q())
    }
}

/// A marking `base|transversal` with intersection number one.
#[pyclass(name = "Marking", module = "torus_mm", frozen, eq, hash, from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PyMarking(pub marking::Marking);

#[pymethods]
impl PyMarking {
    #[new]
    fn new(base: PySlope, transversal: PySlope) -> PyResult<Self> {
        Ok(PyMarking(marking::Marking::new(base.0, transversal.0).py()?))
    }

    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        Ok(PyMarking(s.parse().py()?))
    }

    #[getter]
    fn base(&self) -> PySlope {
        PySlope(self.0.base())
    }

    #[getter]
    fn transversal(&self) -> PySlope {
        PySlope(self.0.transversal())
    }

    fn elementary_moves(&self) -> Vec<PyMarking> {
        self.0.elementary_moves().into_iter().map(PyMarking).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Marking('{}')", self.0)
    }
}

#[pyclass(name = "HierarchyPath", module = "torus_mm", frozen)]
pub struct PyHierarchyPath(pub HierarchyPath);

#[pymethods]
impl PyHierarchyPath {
    #[getter]
    fn steps(&self) -> Vec<PyMarking> {
        self.0.steps.iter().copied().map(PyMarking).collect()
    }

    #[getter]
    fn main_geodesic(&self) -> Vec<PySlope> {
        self.0.main_geodesic.iter().copied().map(PySlope).collect()
    }

    /// `(annulus, start, end)` for each twisting interval.
    #[getter]
    fn domains(&self) -> Vec<(PySlope, usize, usize)> {
        self.0.domains.iter().map(|d| (PySlope(d.annulus), d.start, d.end)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `(passed, [(check, passed, witness)])` with the shipped constants,
    /// or those in `constants_file`.
    #[pyo3(signature = (constants_file=None))]
    fn check(&self, constants_file: Option<&str>) -> PyResult<(bool, Vec<(String, bool, Option<String>)>)> {
        let c = load(constants_file)?;
        let r = check_hierarchy_axioms(&self.0, &c.hierarchy().py()?).py()?;
        Ok((r.passed(), r.checks.iter().map(|c| (c.name.to_string(), c.passed, c.witness.clone())).collect()))
    }
}

/// ψ for a twist tuple: matrix, trace and axis data.
#[pyclass(name = "PseudoAnosov", module = "torus_mm", frozen, get_all)]
pub struct PyPseudoAnosov {
    tuple: Vec<u64>,
    k: u64,
    /// `((a, b), (c, d))` as decimal strings.
    matrix: ((String, String), (String, String)),
    trace: String,
    classification: String,
    translation_length: f64,
    attracting: String,
    repelling: String,
    cf: String,
    cf_max: String,
    cf_ok: bool,
}

#[pymethods]
impl PyPseudoAnosov {
    #[new]
    #[pyo3(signature = (tuple, k, bound=None))]
    fn new(tuple: Vec<u64>, k: u64, bound: Option<u64>) -> PyResult<Self> {
        let t = match bound {
            Some(b) => TwistTuple::new(tuple.clone(), b),
            None => TwistTuple::tight(tuple.clone()),
        }
        .py()?;
        let m = psi(&t, k).py()?;
        let [a, b, c, d] = m.entries().map(|x| x.to_string());
        let (attr, rep) = fixed_points(&m).py()?;
        let cert = cf_bound_certificate(&t, k).py()?;
        Ok(PyPseudoAnosov {
            tuple,
            k,
            matrix: ((a, b), (c, d)),
            trace: m.trace().to_string(),
            classification: classify(&m).to_string(),
            translation_length: translation_length(&m).py()?,
            attracting: attr.to_string(),
            repelling: rep.to_string(),
            cf: cert.cf.to_string(),
            cf_max: cert.max_entry.to_string(),
            cf_ok: cert.ok,
        })
    }
}

/// The coarse constants file as a `{name: value}` dict.
#[pyclass(name = "Constants", module = "torus_mm", frozen)]
pub struct PyConstants(CoarseConstants);

#[pymethods]
impl PyConstants {
    #[staticmethod]
    #[pyo3(signature = (path=None))]
    fn load(path: Option<&str>) -> PyResult<Self> {
        Ok(PyConstants(load(path)?))
    }

    fn get(&self, key: &str) -> PyResult<f64> {
        self.0.value(key).py()
    }

    fn provenance(&self, key: &str) -> PyResult<String> {
        Ok(self.0.get(key).py()?.provenance.clone())
    }

    fn keys(&self) -> Vec<String> {
        self.0.keys().cloned().collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

fn load(path: Option<&str>) -> PyResult<CoarseConstants> {
    match path {
        Some(p) => CoarseConstants::load(std::path::Path::new(p)).py(),
        None => CoarseConstants::from_env_or_frozen().py(),
    }
}

#[pyfunction]
fn farey_distance(x: PySlope, y: PySlope) -> u64 {
    farey::farey_distance(&x.0, &y.0)
}

#[pyfunction]
fn farey_geodesic(x: PySlope, y: PySlope) -> Vec<PySlope> {
    farey::farey_geodesic(&x.0, &y.0).into_iter().map(PySlope).collect()
}

#[pyfunction]
fn annular_distance(gamma: PySlope, x: PySlope, y: PySlope) -> PyResult<u64> {
    projection::annular_distance(&gamma.0, &x.0, &y.0).py()
}

/// Annular coefficients between boundary points given as `p/q` or
/// `cf:[a0;a1,(p1,...)]` strings.
#[pyfunction]
fn annular_coefficients_between(x: &str, y: &str) -> PyResult<Vec<(PySlope, u64)>> {
    let (x, y): (Endpoint, Endpoint) = (x.parse().py()?, y.parse().py()?);
    Ok(annular_coefficients(&x, &y).py()?.into_iter().map(|c| (PySlope(c.annulus), c.value)).collect())
}

#[pyfunction]
fn marking_distance(m1: PyMarking, m2: PyMarking) -> PyResult<u64> {
    marking::marking_distance(&m1.0, &m2.0).py()
}

#[pyfunction]
#[pyo3(signature = (m1, m2, budget=1_000_000))]
fn marking_distance_bfs(m1: PyMarking, m2: PyMarking, budget: u64) -> PyResult<u64> {
    marking::marking_distance_bfs(&m1.0, &m2.0, budget).py()
}

#[pyfunction]
fn hierarchy_path(m1: PyMarking, m2: PyMarking) -> PyResult<PyHierarchyPath> {
    Ok(PyHierarchyPath(build_hierarchy_path(&m1.0, &m2.0).py()?))
}

/// `(total, [(domain, raw, cut)])`.
#[pyfunction]
fn distance_formula_terms(m1: PyMarking, m2: PyMarking, threshold: u64) -> (u64, Vec<(String, u64, u64)>) {
    let s = distance_formula(&m1.0, &m2.0, threshold);
    (s.total(), s.terms.iter().map(|t| (t.domain.to_string(), t.raw, t.cut)).collect())
}

#[pyfunction]
#[pyo3(name = "coarse_equal")]
fn py_coarse_equal(x: f64, y: f64, c1: f64, c2: f64) -> bool {
    coarse_equal(x, y, c1, c2)
}

/// `[(representative, multiplicity)]` for the cyclic classes of `[1, B]^n`.
#[pyfunction]
#[pyo3(signature = (n, b, budget=10_000_000))]
fn necklace_classes(n: usize, b: u64, budget: u64) -> PyResult<Vec<(Vec<u64>, usize)>> {
    Ok(enumerate_classes(n, b, budget).py()?.into_iter().map(|c| (c.representative.q().to_vec(), c.multiplicity)).collect())
}

#[pyfunction]
#[pyo3(signature = (n, b, k, budget=10_000_000))]
fn spectrum(n: usize, b: u64, k: u64, budget: u64) -> PyResult<Vec<(Vec<u64>, f64)>> {
    Ok(length_spectrum(n, b, k, budget).py()?.into_iter().map(|(c, l)| (c.representative.q().to_vec(), l)).collect())
}

/// `(estimate, lower_bound_at_n_max, lower_bound_limit)`.
#[pyfunction]
#[pyo3(signature = (b, n_max, k, c, budget=10_000_000))]
fn growth(b: u64, n_max: usize, k: u64, c: f64, budget: u64) -> PyResult<(f64, f64, f64)> {
    let g = growth_rate(b, n_max, k, c, budget).py()?;
    Ok((g.estimate, *g.lower_bound.last().expect("n_max >= 1"), g.lower_bound_limit))
}

#[pymodule]
#[pyo3(name = "torus_mm")]
fn torus_mm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySlope>()?;
    m.add_class::<PyMarking>()?;
    m.add_class::<PyHierarchyPath>()?;
    m.add_class::<PyPseudoAnosov>()?;
    m.add_class::<PyConstants>()?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add_function(wrap_pyfunction!(farey_distance, m)?)?;
    m.add_function(wrap_pyfunction!(farey_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(annular_distance, m)?)?;
    m.add_function(wrap_pyfunction!(annular_coefficients_between, m)?)?;
    m.add_function(wrap_pyfunction!(marking_distance, m)?)?;
    m.add_function(wrap_pyfunction!(marking_distance_bfs, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy_path, m)?)?;
    m.add_function(wrap_pyfunction!(distance_formula_terms, m)?)?;
    m.add_function(wrap_pyfunction!(py_coarse_equal, m)?)?;
    m.add_function(wrap_pyfunction!(necklace_classes, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(growth, m)?)?;
    Ok(())
}
