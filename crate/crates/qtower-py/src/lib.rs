use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

use ::qtower::classify::{self as cls, Verdict};
use ::qtower::error::Error;
use ::qtower::group2::{self, TableGroup};

create_exception!(qtower, QtowerError, PyException);
create_exception!(qtower, PreconditionError, QtowerError);
create_exception!(qtower, NoRowMatchError, QtowerError);
create_exception!(qtower, ResourceError, QtowerError);
create_exception!(qtower, InconsistentError, QtowerError);

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::NoRowMatch(_) => NoRowMatchError::new_err(msg),
        Error::MultipleLabels { .. } | Error::Inconsistent(_) => InconsistentError::new_err(msg),
        Error::BoundExceeded(_)
        | Error::FactoringBoundExceeded { .. }
        | Error::NoSolutionWithinBound(_)
        | Error::PrecisionEscalationFailure(_)
        | Error::GeneratorSearchExhausted(_) => ResourceError::new_err(msg),
        _ => PreconditionError::new_err(msg),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| QtowerError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Exactly2 => "Exactly2",
        Verdict::AtLeast3 => "AtLeast3",
        Verdict::Unknown64_150 => "Unknown64_150",
        Verdict::Exactly2_By8Rank => "Exactly2_By8Rank",
    }
}

/// Kronecker symbol (a/n).
#[pyfunction]
fn kronecker(a: i64, n: i64) -> PyResult<i8> {
    ::qtower::arith::kronecker(a, n).map_err(err)
}

/// Prime discriminant factors of a fundamental discriminant, ascending by absolute value.
#[pyfunction]
fn factor_discriminant(d: i64) -> PyResult<Vec<i64>> {
    let f = ::qtower::arith::factor_discriminant(d).map_err(err)?;
    Ok(f.factors.iter().map(|p| p.value()).collect())
}

#[pyclass(frozen, get_all, module = "qtower")]
struct CaseRecord {
    d: i64,
    case_type: String,
    label: String,
    assignment: Vec<i64>,
    symbol_matrix: Vec<u8>,
    g_type: Vec<String>,
    gplus_label: String,
    g_order_formula: String,
}

#[pymethods]
impl CaseRecord {
    /// (verdict, justification); octic_cl2 is the 2-class group of the narrow 2-class field if known.
    #[pyo3(signature = (octic_cl2=None))]
    fn verdict(&self, octic_cl2: Option<Vec<u64>>) -> (String, String) {
        let v = cls::tower_verdict_for_label(&self.gplus_label, octic_cl2.as_deref());
        (verdict_name(v.verdict).to_string(), v.justification)
    }

    /// Unit and class number data compared with the table row, as a dict.
    fn verify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let r = cls::verify_appendix_row(self.d).map_err(err)?;
        let all = r.all_match();
        let obj = to_py(py, &r)?;
        obj.bind(py).set_item("all_match", all)?;
        Ok(obj)
    }

    fn __repr__(&self) -> String {
        format!("CaseRecord(d={}, label={:?}, assignment={:?})", self.d, self.label, self.assignment)
    }
}

/// Classifies a discriminant into its table row.
#[pyfunction]
fn classify(d: i64) -> PyResult<CaseRecord> {
    let r = cls::classify(d).map_err(err)?;
    Ok(CaseRecord {
        d: r.d,
        case_type: r.case_type.name().to_string(),
        label: r.label.clone(),
        assignment: r.values().to_vec(),
        symbol_matrix: r.symbol_matrix.to_vec(),
        g_type: r.g_type.iter().map(|g| g.to_string()).collect(),
        gplus_label: r.gplus_label.clone(),
        g_order_formula: r.g_order_formula.clone(),
    })
}

#[pyclass(frozen, get_all, module = "qtower")]
struct ClassGroup {
    discriminant: i64,
    elementary_divisors: Vec<u64>,
    narrow: bool,
    class_number: u64,
    two_sylow: Vec<u64>,
}

#[pymethods]
impl ClassGroup {
    fn __repr__(&self) -> String {
        format!("ClassGroup(d={}, narrow={}, divisors={:?})", self.discriminant, self.narrow, self.elementary_divisors)
    }
}

#[pyfunction]
#[pyo3(signature = (d, narrow=false))]
fn class_group(d: i64, narrow: bool) -> PyResult<ClassGroup> {
    let g = ::qtower::qform::class_group(d, narrow).map_err(err)?;
    let two = ::qtower::qform::two_sylow(&g);
    Ok(ClassGroup {
        discriminant: d,
        class_number: g.class_number(),
        elementary_divisors: g.elementary_divisors,
        narrow,
        two_sylow: two.elementary_divisors,
    })
}

/// The unit (x + y sqrt d)/2.
#[pyclass(frozen, get_all, module = "qtower")]
struct QuadUnit {
    d: i64,
    x: BigInt,
    y: BigInt,
    norm: i8,
}

#[pymethods]
impl QuadUnit {
    /// Squarefree kernel of N(1 + eps); only for units of norm +1.
    fn delta(&self) -> PyResult<i64> {
        let u = self.inner().map_err(err)?;
        Ok(::qtower::units::delta_invariant(&u).map_err(err)?.delta)
    }

    fn __str__(&self) -> PyResult<String> {
        Ok(self.inner().map_err(err)?.to_string())
    }
}

impl QuadUnit {
    fn inner(&self) -> ::qtower::Result<::qtower::units::QuadUnit> {
        ::qtower::units::QuadUnit::new(self.d, self.x.clone(), self.y.clone())
    }
}

#[pyfunction]
fn fundamental_unit(d: i64) -> PyResult<QuadUnit> {
    let u = ::qtower::units::fundamental_unit(d).map_err(err)?;
    Ok(QuadUnit { d: u.d, x: u.x, y: u.y, norm: u.norm })
}

/// Primitive (a, b, c) with a^2 = d1 b^2 + d2 c^2.
#[pyfunction]
#[pyo3(signature = (d1, d2, bound=None))]
fn solve_conic(d1: i64, d2: i64, bound: Option<u64>) -> PyResult<(i64, i64, i64)> {
    let s = ::qtower::conic::solve_conic_with_bound(d1, d2, bound.unwrap_or(::qtower::conic::DEFAULT_SEARCH_BOUND))
        .map_err(err)?;
    Ok((s.a, s.b, s.c))
}

/// A finite group given by its multiplication table.
#[pyclass(frozen, module = "qtower")]
struct Group {
    inner: TableGroup,
}

#[pymethods]
impl Group {
    #[staticmethod]
    fn from_table_text(text: &str) -> PyResult<Self> {
        Ok(Group { inner: TableGroup::from_table_text(text).map_err(err)? })
    }

    #[staticmethod]
    fn build_64_150() -> Self {
        Group { inner: group2::build_64_150().to_table_group() }
    }

    #[staticmethod]
    fn class3_cover(extra: usize) -> PyResult<Self> {
        Ok(Group { inner: group2::class3_cover_64_150(extra).map_err(err)? })
    }

    #[staticmethod]
    fn dihedral(order: usize) -> Self {
        Group { inner: group2::dihedral(order) }
    }

    #[staticmethod]
    fn quaternion() -> Self {
        Group { inner: group2::quaternion() }
    }

    #[staticmethod]
    fn abelian(factors: Vec<usize>) -> Self {
        Group { inner: group2::abelian(&factors) }
    }

    /// The named groups used for the triple check.
    #[staticmethod]
    fn library() -> Vec<(String, Group)> {
        group2::rank3_library().into_iter().map(|(n, g)| (n, Group { inner: g })).collect()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn is_abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    fn derived_order(&self) -> usize {
        self.inner.derived_subgroup().order()
    }

    fn lower_central_series(&self) -> Vec<usize> {
        self.inner.lower_central_series().iter().map(|s| s.order()).collect()
    }

    fn frattini_rank(&self) -> usize {
        self.inner.frattini_rank()
    }

    fn to_table_text(&self) -> String {
        self.inner.to_table_text()
    }

    fn check_prop10(&self, py: Python<'_>) -> PyResult<(bool, Py<PyAny>)> {
        let r = group2::check_prop10(&self.inner);
        Ok((r.holds(), to_py(py, &r)?))
    }

    fn check_prop11(&self, py: Python<'_>) -> PyResult<(bool, Py<PyAny>)> {
        let r = group2::check_prop11(&self.inner).map_err(err)?;
        Ok((r.holds(), to_py(py, &r)?))
    }

    fn check_prop12(&self, py: Python<'_>) -> PyResult<(bool, Py<PyAny>)> {
        let r = group2::check_prop12(&self.inner).map_err(err)?;
        Ok((r.holds(), to_py(py, &r)?))
    }

    fn __repr__(&self) -> String {
        format!("Group(order={})", self.inner.order())
    }
}

#[pymodule]
#[pyo3(name = "qtower")]
fn qtower_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("QtowerError", py.get_type::<QtowerError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("NoRowMatchError", py.get_type::<NoRowMatchError>())?;
    m.add("ResourceError", py.get_type::<ResourceError>())?;
    m.add("InconsistentError", py.get_type::<InconsistentError>())?;
    m.add_class::<CaseRecord>()?;
    m.add_class::<ClassGroup>()?;
    m.add_class::<QuadUnit>()?;
    m.add_class::<Group>()?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(factor_discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(class_group, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_unit, m)?)?;
    m.add_function(wrap_pyfunction!(solve_conic, m)?)?;
    Ok(())
}
