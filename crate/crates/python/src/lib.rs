//! Python bindings. Exact values come back as `fractions.Fraction`; reports come back as dicts.

use std::sync::Arc;

use paroper::fuchsian::{self, FuchsianSystem, MonicOperator, OpPoint};
use paroper::{
    jet, oper, orbifold, rational, LocallyAbelianBundle, MarkedCurve, MarkedPoint, Rational,
};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

create_exception!(paroper, ParoperError, PyException);

fn err(e: paroper::Error) -> PyErr {
    ParoperError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((*q.numer(), *q.denom()))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| ParoperError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.extract::<String>() {
        return Ok(s);
    }
    py.import("json")?.call_method1("dumps", (obj,))?.extract()
}

#[pyclass(name = "Curve", frozen, skip_from_py_object, module = "paroper")]
#[derive(Clone)]
struct PyCurve {
    inner: Arc<MarkedCurve>,
}

#[pymethods]
impl PyCurve {
    /// `Curve(genus, levels, labels=None)`; labels default to x1, x2, ...
    #[new]
    #[pyo3(signature = (genus, levels, labels = None))]
    fn new(genus: u32, levels: Vec<u32>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let labels =
            labels.unwrap_or_else(|| (1..=levels.len()).map(|i| format!("x{i}")).collect());
        if labels.len() != levels.len() {
            return Err(ParoperError::new_err("labels and levels differ in length"));
        }
        let points = labels
            .into_iter()
            .zip(levels)
            .map(|(l, n)| MarkedPoint::new(l, n))
            .collect();
        Ok(Self {
            inner: Arc::new(MarkedCurve::new(genus, points).map_err(err)?),
        })
    }

    /// Accepts a JSON string or a dict.
    #[staticmethod]
    fn from_json(py: Python<'_>, data: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text = from_py(py, data)?;
        Ok(Self {
            inner: Arc::new(MarkedCurve::from_json(&text).map_err(err)?),
        })
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &*self.inner)
    }

    #[getter]
    fn genus(&self) -> u32 {
        self.inner.genus()
    }

    #[getter]
    fn levels(&self) -> Vec<u32> {
        self.inner.levels().collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner
            .points()
            .iter()
            .map(|p| p.label.clone())
            .collect()
    }

    fn trivial(&self) -> PyBundle {
        PyBundle {
            inner: LocallyAbelianBundle::trivial(self.inner.clone()),
        }
    }

    fn gunning(&self) -> PyResult<PyBundle> {
        oper::gunning(&self.inner).map(PyBundle::from).map_err(err)
    }

    fn theta(&self) -> PyResult<PyBundle> {
        oper::theta_line(&self.inner)
            .map(PyBundle::from)
            .map_err(err)
    }

    fn theta_quotient(&self) -> PyResult<PyBundle> {
        oper::theta_quotient(&self.inner)
            .map(PyBundle::from)
            .map_err(err)
    }

    fn theta_power(&self, m: i64) -> PyResult<PyBundle> {
        oper::theta_power(&self.inner, m)
            .map(PyBundle::from)
            .map_err(err)
    }

    fn oper_bundle(&self, rank: usize) -> PyResult<PyBundle> {
        oper::oper_bundle(&self.inner, rank)
            .map(PyBundle::from)
            .map_err(err)
    }

    fn filtration<'py>(&self, py: Python<'py>, rank: usize) -> PyResult<Bound<'py, PyAny>> {
        let f = oper::oper_filtration(&self.inner, rank).map_err(err)?;
        to_py(py, &f.to_json())
    }

    fn xi_degree(&self, rank: usize, k: usize) -> PyResult<i64> {
        oper::xi_degree(&self.inner, rank, k).map_err(err)
    }

    fn transversality<'py>(&self, py: Python<'py>, rank: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &oper::transversality_report(&self.inner, rank).map_err(err)?,
        )
    }

    fn jets<'py>(&self, py: Python<'py>, order: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &jet::jet_tower(&self.inner, order).to_json())
    }

    fn oper_operators<'py>(&self, py: Python<'py>, rank: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &jet::oper_operator_space(&self.inner, rank).map_err(err)?,
        )
    }

    fn default_cover_degree(&self) -> u64 {
        self.inner.default_cover_degree()
    }

    #[pyo3(signature = (seed = 0, count = 1000, cover_degree = None))]
    fn oracle<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        count: usize,
        cover_degree: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &orbifold::oracle_run(&self.inner, seed, count, cover_degree).map_err(err)?,
        )
    }

    #[pyo3(signature = (cover_degree = None))]
    fn theta_check<'py>(
        &self,
        py: Python<'py>,
        cover_degree: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let d = cover_degree.unwrap_or_else(|| self.inner.default_cover_degree());
        to_py(
            py,
            &orbifold::theta_characteristic_check(&self.inner, d).map_err(err)?,
        )
    }

    #[pyo3(signature = (cover_degree = None))]
    fn regular_rep_check<'py>(
        &self,
        py: Python<'py>,
        cover_degree: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let d = cover_degree.unwrap_or_else(|| self.inner.default_cover_degree());
        to_py(py, &jet::regular_rep_check(&self.inner, d).map_err(err)?)
    }

    #[pyo3(signature = (rank, op, tol = 1e-6))]
    fn oper_check<'py>(
        &self,
        py: Python<'py>,
        rank: usize,
        op: &PyOperator,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rep =
            fuchsian::oper_exponent_consistency(&self.inner, rank, &op.inner, tol).map_err(err)?;
        to_py(py, &rep.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Curve(genus={}, levels={:?})",
            self.inner.genus(),
            self.levels()
        )
    }
}

#[pyclass(name = "Bundle", frozen, skip_from_py_object, module = "paroper")]
#[derive(Clone)]
struct PyBundle {
    inner: LocallyAbelianBundle,
}

impl From<LocallyAbelianBundle> for PyBundle {
    fn from(inner: LocallyAbelianBundle) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyBundle {
    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn degree(&self) -> i64 {
        self.inner.degree()
    }

    /// Weights per marked point, descending.
    #[getter]
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for (p, ws) in self.inner.curve().points().iter().zip(self.inner.weights()) {
            let list = ws
                .iter()
                .map(|w| fraction(py, w))
                .collect::<PyResult<Vec<_>>>()?;
            out.set_item(&p.label, list)?;
        }
        Ok(out)
    }

    fn par_deg<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.par_deg())
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    fn is_trivial(&self) -> bool {
        self.inner.is_trivial()
    }

    fn tensor(&self, other: &PyBundle) -> PyResult<PyBundle> {
        self.inner.tensor(&other.inner).map(Into::into).map_err(err)
    }

    fn __mul__(&self, other: &PyBundle) -> PyResult<PyBundle> {
        self.tensor(other)
    }

    fn direct_sum(&self, other: &PyBundle) -> PyResult<PyBundle> {
        self.inner
            .direct_sum(&other.inner)
            .map(Into::into)
            .map_err(err)
    }

    fn __add__(&self, other: &PyBundle) -> PyResult<PyBundle> {
        self.direct_sum(other)
    }

    fn hom(&self, target: &PyBundle) -> PyResult<PyBundle> {
        self.inner.hom(&target.inner).map(Into::into).map_err(err)
    }

    fn dual(&self) -> PyBundle {
        self.inner.dual().into()
    }

    fn sym(&self, k: usize) -> PyBundle {
        self.inner.sym_pow(k).into()
    }

    fn det(&self) -> PyBundle {
        self.inner.det().into()
    }

    fn twist(&self, m: i64) -> PyBundle {
        self.inner.twist(m).into()
    }

    fn power(&self, m: i64) -> PyResult<PyBundle> {
        self.inner.power(m).map(Into::into).map_err(err)
    }

    /// Pushes to the orbifold side; returns `{cover_degree, components: [{y_degree, characters}]}`.
    #[pyo3(signature = (cover_degree = None))]
    fn to_orbifold<'py>(
        &self,
        py: Python<'py>,
        cover_degree: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let d = cover_degree.unwrap_or_else(|| self.inner.curve().default_cover_degree());
        let orb = orbifold::to_orbifold(&self.inner, d).map_err(err)?;
        let back = orbifold::from_orbifold(&orb).map_err(err)?;
        let value = serde_json::json!({
            "cover_degree": orb.cover_degree(),
            "components": orb.components(),
            "round_trip": back == self.inner,
        });
        to_py(py, &value)
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    fn __eq__(&self, other: &PyBundle) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Bundle(rank={}, degree={}, par_deg={})",
            self.inner.rank(),
            self.inner.degree(),
            rational::format(&self.inner.par_deg())
        )
    }
}

#[pyclass(name = "FuchsianSystem", frozen, module = "paroper")]
struct PyFuchsianSystem {
    inner: FuchsianSystem,
}

#[pymethods]
impl PyFuchsianSystem {
    #[staticmethod]
    fn from_json(py: Python<'_>, data: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text = from_py(py, data)?;
        Ok(Self {
            inner: FuchsianSystem::from_json(&text).map_err(err)?,
        })
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels()
    }

    fn symmetric_power(&self, k: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.symmetric_power(k).map_err(err)?,
        })
    }

    #[pyo3(signature = (point, tol = 1e-8))]
    fn monodromy<'py>(
        &self,
        py: Python<'py>,
        point: &str,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &fuchsian::numerical_monodromy(&self.inner, point, tol)
                .map_err(err)?
                .to_json(),
        )
    }

    #[pyo3(signature = (tol = 1e-8))]
    fn atlas<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &fuchsian::monodromy_atlas(&self.inner, tol)
                .map_err(err)?
                .to_json(),
        )
    }

    /// Weights may be floats or `Fraction`s.
    #[pyo3(signature = (point, weights, tol = 1e-6))]
    fn spectrum_check<'py>(
        &self,
        py: Python<'py>,
        point: &str,
        weights: Vec<f64>,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rep =
            fuchsian::monodromy_spectrum_check(&self.inner, point, &weights, tol).map_err(err)?;
        to_py(py, &rep.to_json())
    }

    #[pyo3(signature = (tol = 1e-8))]
    fn irreducibility<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let rep = fuchsian::irreducibility_check(&self.inner, tol).map_err(err)?;
        let value = serde_json::json!({
            "min_residual": rep.min_residual,
            "threshold": rep.threshold,
            "candidates": rep.candidates,
            "pass": rep.pass,
        });
        to_py(py, &value)
    }

    fn __repr__(&self) -> String {
        format!(
            "FuchsianSystem(rank={}, labels={:?})",
            self.inner.rank(),
            self.inner.labels()
        )
    }
}

#[pyclass(name = "Operator", frozen, module = "paroper")]
struct PyOperator {
    inner: MonicOperator,
}

fn parse_point(point: &str) -> PyResult<OpPoint> {
    point.parse().map_err(err)
}

#[pymethods]
impl PyOperator {
    #[staticmethod]
    fn from_json(py: Python<'_>, data: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text = from_py(py, data)?;
        Ok(Self {
            inner: MonicOperator::from_json(&text).map_err(err)?,
        })
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// Point is a rational string such as "0", "1/2", or "inf".
    fn indicial_polynomial(&self, point: &str) -> PyResult<String> {
        Ok(
            fuchsian::indicial_polynomial(&self.inner, parse_point(point)?)
                .map_err(err)?
                .to_string(),
        )
    }

    /// Exact roots come back as `Fraction`, the rest as `complex`.
    fn exponents<'py>(&self, py: Python<'py>, point: &str) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let roots = fuchsian::indicial_roots(&self.inner, parse_point(point)?).map_err(err)?;
        roots
            .iter()
            .map(|e| match e {
                fuchsian::Exponent::Exact(q) => fraction(py, q),
                fuchsian::Exponent::Numeric(z) => {
                    Ok(pyo3::types::PyComplex::from_doubles(py, z.re, z.im).into_any())
                }
            })
            .collect()
    }

    fn subprincipal(&self) -> String {
        fuchsian::subprincipal_form(&self.inner).to_string()
    }

    fn symmetric_square(&self) -> PyResult<Self> {
        Ok(Self {
            inner: fuchsian::symmetric_square(&self.inner).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        self.inner.to_string_pretty()
    }
}

#[pymodule(name = "paroper")]
fn paroper_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ParoperError", m.py().get_type::<ParoperError>())?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyBundle>()?;
    m.add_class::<PyFuchsianSystem>()?;
    m.add_class::<PyOperator>()?;
    Ok(())
}
