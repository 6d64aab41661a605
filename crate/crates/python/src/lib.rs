//! Python bindings for `haftools_core`.

use haftools_core::verify::{run_suites, Impls, Level};
use haftools_core::{
    hafnian_bruteforce, hafnian_j, hafnian_two_param_general, matching_counts, mu_c_closed,
    mu_d_closed, BiPoly, BigInt, Family, MatchingTable, Method, Ring, RingElement, SymmetricMatrix,
    Template, TwoParamSpec, TwoParamTemplate,
};
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn family(kind: &str) -> PyResult<Family> {
    match kind.to_ascii_uppercase().as_str() {
        "C" => Ok(Family::C),
        "D" => Ok(Family::D),
        _ => Err(PyValueError::new_err(format!(
            "unknown family {kind:?}, expected 'C' or 'D'"
        ))),
    }
}

/// A polynomial in the two formal symbols `a` and `b` with integer coefficients.
#[pyclass(name = "Poly", module = "haftools", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPoly(BiPoly);

#[pymethods]
impl PyPoly {
    #[new]
    #[pyo3(signature = (c = BigInt::from(0)))]
    fn new(c: BigInt) -> Self {
        Self(BiPoly::constant(c))
    }

    #[staticmethod]
    fn a() -> Self {
        Self(BiPoly::a())
    }

    #[staticmethod]
    fn b() -> Self {
        Self(BiPoly::b())
    }

    fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.0.coeff(i, j)
    }

    /// `(deg_a, deg_b, coefficient)` triples, leading term first.
    fn terms(&self) -> Vec<(u32, u32, BigInt)> {
        self.0
            .terms()
            .map(|((i, j), c)| (i, j, c.clone()))
            .collect()
    }

    fn eval(&self, a: BigInt, b: BigInt) -> BigInt {
        self.0.eval(&a, &b)
    }

    fn is_constant(&self) -> bool {
        self.0.as_constant().is_some()
    }

    fn __int__(&self) -> PyResult<BigInt> {
        self.0
            .as_constant()
            .ok_or_else(|| PyValueError::new_err("polynomial is not constant"))
    }

    fn __add__(&self, rhs: Param) -> PyResult<Self> {
        Ok(Self(&self.0 + &rhs.into_poly()?))
    }

    fn __radd__(&self, lhs: Param) -> PyResult<Self> {
        Ok(Self(&lhs.into_poly()? + &self.0))
    }

    fn __sub__(&self, rhs: Param) -> PyResult<Self> {
        Ok(Self(&self.0 - &rhs.into_poly()?))
    }

    fn __rsub__(&self, lhs: Param) -> PyResult<Self> {
        Ok(Self(&lhs.into_poly()? - &self.0))
    }

    fn __mul__(&self, rhs: Param) -> PyResult<Self> {
        Ok(Self(&self.0 * &rhs.into_poly()?))
    }

    fn __rmul__(&self, lhs: Param) -> PyResult<Self> {
        Ok(Self(&lhs.into_poly()? * &self.0))
    }

    fn __neg__(&self) -> Self {
        Self(self.0.ring_neg())
    }

    fn __pow__(&self, exp: u32, modulo: Option<BigInt>) -> PyResult<Self> {
        if modulo.is_some() {
            return Err(PyZeroDivisionError::new_err(
                "modular power is not supported",
            ));
        }
        Ok(Self(self.0.ring_pow(exp)))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({:?})", self.0.to_string())
    }
}

/// Hafnian parameter: an integer, a `Poly`, or `"a"` / `"b"` / `"sym"`.
#[derive(FromPyObject)]
enum Param {
    Int(BigInt),
    Poly(PyPoly),
    Symbol(String),
}

impl Param {
    fn into_poly(self) -> PyResult<BiPoly> {
        Ok(self.into_element('a')?.to_poly())
    }

    /// `sym` resolves to the symbol for the argument position.
    fn into_element(self, position: char) -> PyResult<RingElement> {
        Ok(match self {
            Param::Int(v) => RingElement::Int(v),
            Param::Poly(p) => RingElement::Poly(p.0),
            Param::Symbol(s) => match s.as_str() {
                "a" => RingElement::Poly(BiPoly::a()),
                "b" => RingElement::Poly(BiPoly::b()),
                "sym" if position == 'a' => RingElement::Poly(BiPoly::a()),
                "sym" => RingElement::Poly(BiPoly::b()),
                other => {
                    return Err(PyValueError::new_err(format!(
                        "{position}: unknown symbol {other:?}"
                    )))
                }
            },
        })
    }
}

#[derive(IntoPyObject)]
enum Value {
    Int(BigInt),
    Poly(PyPoly),
}

impl From<RingElement> for Value {
    fn from(e: RingElement) -> Self {
        match e {
            RingElement::Int(v) => Value::Int(v),
            RingElement::Poly(p) => Value::Poly(PyPoly(p)),
        }
    }
}

/// A 0/1 adjacency template.
#[pyclass(name = "Template", module = "haftools", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTemplate(Template);

impl PyTemplate {
    fn counts(&self) -> PyResult<Vec<BigInt>> {
        if self.0.order() > 64 {
            return Err(PyValueError::new_err(
                "matching enumeration supports at most 64 vertices",
            ));
        }
        Ok(matching_counts(&self.0))
    }
}

#[pymethods]
impl PyTemplate {
    /// Parses the plain-text format: order on the first line, then
    /// `toeplitz: <bits>` or one row of bits per line.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Template::parse(text).map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn family(kind: &str, n: usize) -> PyResult<Self> {
        Ok(Self(family(kind)?.template(n)))
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    /// Edges as 1-based `(i, j)` pairs with `i < j`.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges_one_based()
    }

    /// Number of k-edge matchings for k = 0, 1, ...
    fn matching_counts(&self) -> PyResult<Vec<BigInt>> {
        self.counts()
    }

    /// Hafnian of the matrix with `a` on template edges and `b` elsewhere.
    fn hafnian(&self, a: Param, b: Param) -> PyResult<Value> {
        let (a, b) = (a.into_element('a')?, b.into_element('b')?);
        let counts = self.counts()?;
        hafnian_two_param_general(&self.0, &a, &b, |j| counts[j].clone())
            .map(Value::from)
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyfunction]
fn binomial(n: u64, k: i64) -> BigInt {
    haftools_core::binomial(n, k)
}

/// `(2k-1)!!`, the number of perfect matchings of 2k points.
#[pyfunction]
fn pairing_count(k: u64) -> BigInt {
    haftools_core::pairing_count(k)
}

#[pyfunction]
fn mu_c(n: u64, k: u64) -> BigInt {
    mu_c_closed(n, k)
}

#[pyfunction]
fn mu_d(n: u64, k: u64) -> BigInt {
    mu_d_closed(n, k)
}

/// Matching counts as a grid `table[k][n]` for `0 ≤ n ≤ n_max`.
#[pyfunction]
#[pyo3(signature = (kind, n_max, method = "closed"))]
fn table(kind: &str, n_max: usize, method: &str) -> PyResult<Vec<Vec<BigInt>>> {
    let method = Method::ALL
        .into_iter()
        .find(|m| m.name() == method)
        .ok_or_else(|| PyValueError::new_err(format!("unknown method {method:?}")))?;
    Ok(MatchingTable::compute(family(kind)?, n_max, method).grid())
}

/// Hafnians of the family for m = 1..=m_max at integer parameters.
#[pyfunction]
fn sequence(kind: &str, m_max: usize, a: BigInt, b: BigInt) -> PyResult<Vec<BigInt>> {
    Ok(haftools_core::sequence(family(kind)?, m_max, &a, &b))
}

/// Hafnian of the two-parameter matrix of order 2m. `kind` is "C" or "D";
/// "J" is the constant matrix with `b` off the diagonal (`a` is ignored),
/// matching the command-line tool.
#[pyfunction]
fn hafnian(kind: &str, m: usize, a: Param, b: Param) -> PyResult<Value> {
    let template = match kind.to_ascii_uppercase().as_str() {
        "C" => TwoParamTemplate::C,
        "D" => TwoParamTemplate::D,
        "J" => return Ok(hafnian_j(m, &b.into_element('b')?).into()),
        _ => return Err(PyValueError::new_err(format!("unknown template {kind:?}"))),
    };
    let spec = TwoParamSpec {
        template,
        m,
        a: a.into_element('a')?,
        b: b.into_element('b')?,
    };
    spec.hafnian().map(Value::from).map_err(value_error)
}

/// Hafnian of a symmetric integer matrix by pairing enumeration.
#[pyfunction]
fn hafnian_matrix(rows: Vec<Vec<BigInt>>) -> PyResult<BigInt> {
    let m = SymmetricMatrix::from_rows(&rows).map_err(value_error)?;
    hafnian_bruteforce(&m).map_err(value_error)
}

/// Both sides of the summation-bound equivalence at `(n, k)`.
#[pyfunction]
fn bounds_equivalence(n: u64, k: u64) -> PyResult<(bool, bool)> {
    haftools_core::bounds_equivalence(n, k).map_err(value_error)
}

/// Runs the self-check suites; returns `(name, passed, detail)` per suite.
#[pyfunction]
#[pyo3(signature = (level = "quick"))]
fn verify(py: Python<'_>, level: &str) -> PyResult<Vec<(String, bool, String)>> {
    let level = match level {
        "quick" => Level::Quick,
        "full" => Level::Full,
        _ => return Err(PyValueError::new_err(format!("unknown level {level:?}"))),
    };
    let results = py.detach(|| run_suites(&Impls::default(), level));
    Ok(results
        .into_iter()
        .map(|r| {
            let passed = r.passed();
            let detail = match r.outcome {
                Ok(s) | Err(s) => s,
            };
            (r.name.to_string(), passed, detail)
        })
        .collect())
}

#[pymodule]
fn haftools(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PyTemplate>()?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(pairing_count, m)?)?;
    m.add_function(wrap_pyfunction!(mu_c, m)?)?;
    m.add_function(wrap_pyfunction!(mu_d, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(sequence, m)?)?;
    m.add_function(wrap_pyfunction!(hafnian, m)?)?;
    m.add_function(wrap_pyfunction!(hafnian_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
