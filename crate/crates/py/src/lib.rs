//! Python bindings: quaternions, quaternion matrices, the Schur
//! decomposition, eigenvectors, reordering, the scalar Sylvester solver and
//! the verification helpers.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qs::aed::{AedConfig, SpikeRule, WindowRule};
use qs::{Error, MatrixClass};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } | Error::OracleNoConvergence => PyRuntimeError::new_err(e.to_string()),
        Error::Io(io) => PyErr::from(io),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Quaternion", module = "qschur", frozen, eq, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyQuaternion(qs::Quaternion);

#[pymethods]
impl PyQuaternion {
    #[new]
    #[pyo3(signature = (w=0.0, x=0.0, y=0.0, z=0.0))]
    fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self(qs::Quaternion::new(w, x, y, z))
    }

    #[staticmethod]
    fn from_complex(c: Complex64) -> Self {
        Self(qs::Quaternion::from_complex(c))
    }

    #[getter]
    fn w(&self) -> f64 {
        self.0.w
    }
    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }
    #[getter]
    fn y(&self) -> f64 {
        self.0.y
    }
    #[getter]
    fn z(&self) -> f64 {
        self.0.z
    }

    fn components(&self) -> (f64, f64, f64, f64) {
        let [w, x, y, z] = self.0.components();
        (w, x, y, z)
    }

    fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    fn __abs__(&self) -> f64 {
        self.0.abs()
    }

    fn inverse(&self) -> PyResult<Self> {
        if self.0.is_zero() {
            return Err(PyValueError::new_err("zero quaternion has no inverse"));
        }
        Ok(Self(self.0.inv()))
    }

    /// Returns `(lambda, omega)` with `conj(omega)·q·omega = lambda`
    /// and `lambda` in the closed upper half plane.
    fn standardize(&self) -> (Complex64, PyQuaternion) {
        let (l, w) = self.0.standardize();
        (l, Self(w))
    }

    fn __add__(&self, o: &PyQuaternion) -> Self {
        Self(self.0 + o.0)
    }

    fn __sub__(&self, o: &PyQuaternion) -> Self {
        Self(self.0 - o.0)
    }

    fn __mul__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(q) = o.cast::<PyQuaternion>() {
            return Ok(Self(self.0 * q.get().0));
        }
        let s: f64 = o.extract()?;
        Ok(Self(self.0 * s))
    }

    fn __rmul__(&self, s: f64) -> Self {
        Self(self.0 * s)
    }

    fn __neg__(&self) -> Self {
        Self(-self.0)
    }

    fn __repr__(&self) -> String {
        let q = self.0;
        format!("Quaternion({}, {}, {}, {})", q.w, q.x, q.y, q.z)
    }
}

#[pyclass(name = "QMatrix", module = "qschur", skip_from_py_object)]
#[derive(Clone)]
struct PyQMatrix(qs::QMatrix);

fn parse_entry(v: &Bound<'_, PyAny>) -> PyResult<qs::Quaternion> {
    if let Ok(q) = v.cast::<PyQuaternion>() {
        return Ok(q.get().0);
    }
    if let Ok((w, x, y, z)) = v.extract::<(f64, f64, f64, f64)>() {
        return Ok(qs::Quaternion::new(w, x, y, z));
    }
    let c: Complex64 = v.extract()?;
    Ok(qs::Quaternion::from_complex(c))
}

#[pymethods]
impl PyQMatrix {
    /// Build from a list of rows; entries may be `Quaternion`, 4-tuples,
    /// or real/complex numbers.
    #[new]
    fn new(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(parse_entry).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        qs::QMatrix::from_rows(&parsed).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn zeros(nrows: usize, ncols: usize) -> Self {
        Self(qs::QMatrix::zeros(nrows, ncols))
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(qs::QMatrix::identity(n))
    }

    #[staticmethod]
    fn fullrand(n: usize, seed: u64) -> PyResult<Self> {
        MatrixClass::FullRand.generate(n, seed).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn hessrand(n: usize, seed: u64) -> PyResult<Self> {
        MatrixClass::HessRand.generate(n, seed).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        qs::qmat::read_qmatrix(path).map(Self).map_err(to_py)
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        qs::qmat::write_qmatrix(&self.0, path).map_err(to_py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<PyQuaternion> {
        let (r, c) = self.0.shape();
        if idx.0 >= r || idx.1 >= c {
            return Err(PyIndexError::new_err(format!("index {idx:?} out of range for shape ({r}, {c})")));
        }
        Ok(PyQuaternion(self.0[idx]))
    }

    fn __setitem__(&mut self, idx: (usize, usize), v: &Bound<'_, PyAny>) -> PyResult<()> {
        let (r, c) = self.0.shape();
        if idx.0 >= r || idx.1 >= c {
            return Err(PyIndexError::new_err(format!("index {idx:?} out of range for shape ({r}, {c})")));
        }
        self.0[idx] = parse_entry(v)?;
        Ok(())
    }

    /// Rows of `(w, x, y, z)` tuples.
    fn to_rows(&self) -> Vec<Vec<(f64, f64, f64, f64)>> {
        let (r, c) = self.0.shape();
        (0..r)
            .map(|i| {
                (0..c)
                    .map(|j| {
                        let [w, x, y, z] = self.0[(i, j)].components();
                        (w, x, y, z)
                    })
                    .collect()
            })
            .collect()
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn __matmul__(&self, o: &PyQMatrix) -> PyResult<Self> {
        self.0.matmul(&o.0).map(Self).map_err(to_py)
    }

    fn __sub__(&self, o: &PyQMatrix) -> PyResult<Self> {
        self.0.sub(&o.0).map(Self).map_err(to_py)
    }

    fn frob_norm(&self) -> f64 {
        self.0.frob_norm()
    }

    fn diagonal(&self) -> Vec<PyQuaternion> {
        self.0.diagonal().into_iter().map(PyQuaternion).collect()
    }

    fn is_upper_triangular(&self) -> bool {
        self.0.is_upper_triangular()
    }

    fn is_upper_hessenberg(&self) -> bool {
        self.0.is_upper_hessenberg()
    }

    fn __repr__(&self) -> String {
        let (r, c) = self.0.shape();
        format!("QMatrix(shape=({r}, {c}))")
    }

    fn __str__(&self) -> PyResult<String> {
        qs::qmat::format_qmatrix(&self.0).map_err(to_py)
    }
}

#[pyclass(name = "SchurDecomposition", module = "qschur", frozen)]
struct PySchur {
    #[pyo3(get)]
    u: Py<PyQMatrix>,
    #[pyo3(get)]
    t: Py<PyQMatrix>,
    #[pyo3(get)]
    sweeps: usize,
    #[pyo3(get)]
    eigenvalues: Vec<Complex64>,
    /// `None` without AED, otherwise a dict of counters.
    #[pyo3(get)]
    aed_stats: Option<BTreeMap<String, usize>>,
    #[pyo3(get)]
    timings: (f64, f64, f64),
}

/// Quaternion Schur decomposition `A = U·T·Uᴴ`.
#[pyfunction]
#[pyo3(signature = (a, aed=false, max_sweeps=None, nibble=14.0, aed_window=None))]
fn schur_decompose(
    py: Python<'_>,
    a: &PyQMatrix,
    aed: bool,
    max_sweeps: Option<usize>,
    nibble: f64,
    aed_window: Option<usize>,
) -> PyResult<PySchur> {
    let opts = qs::SchurOptions {
        use_aed: aed,
        aed: AedConfig {
            window: aed_window.map_or(WindowRule::Auto, WindowRule::Fixed),
            nibble,
            spike: SpikeRule::Standard,
        },
        max_sweeps,
    };
    opts.aed.validate().map_err(to_py)?;
    let m = a.0.clone();
    let s = py.detach(move || qs::schur_decompose(&m, &opts)).map_err(to_py)?;
    let eigenvalues = s.eigenvalues();
    let aed_stats = s.aed_stats.map(|st| {
        BTreeMap::from([
            ("calls".to_string(), st.calls),
            ("deflated".to_string(), st.deflated),
            ("undeflatable".to_string(), st.undeflatable),
            ("skipped_sweeps".to_string(), st.skipped_sweeps),
            ("window_sweeps".to_string(), st.window_sweeps),
        ])
    });
    Ok(PySchur {
        u: Py::new(py, PyQMatrix(s.u))?,
        t: Py::new(py, PyQMatrix(s.t))?,
        sweeps: s.sweeps,
        eigenvalues,
        aed_stats,
        timings: (
            s.timings.total.as_secs_f64(),
            s.timings.construct_q.as_secs_f64(),
            s.timings.aed.as_secs_f64(),
        ),
    })
}

/// Eigenvectors of an upper triangular `T`: returns `(X, lambdas)` with
/// `T·X = X·diag(lambdas)`.
#[pyfunction]
#[pyo3(signature = (t, normalize=false))]
fn triangular_eigenvectors(t: &PyQMatrix, normalize: bool) -> PyResult<(PyQMatrix, Vec<Complex64>)> {
    let es = qs::eigvec::triangular_eigenvectors_with(&t.0, qs::eigvec::EigvecOptions { normalize }).map_err(to_py)?;
    Ok((PyQMatrix(es.x), es.lambdas))
}

/// Eigenvectors of `A` from its Schur factors: returns `(U·X, lambdas)`.
#[pyfunction]
fn eigenvectors(u: &PyQMatrix, t: &PyQMatrix) -> PyResult<(PyQMatrix, Vec<Complex64>)> {
    let es = qs::triangular_eigenvectors(&t.0).map_err(to_py)?;
    let x = qs::full_eigenvectors(&u.0, &es).map_err(to_py)?;
    Ok((PyQMatrix(x), es.lambdas))
}

/// Solve `alpha·chi − chi·beta = gamma` for complex `alpha`, `beta`.
#[pyfunction]
fn solve_scalar(alpha: Complex64, beta: Complex64, gamma: &PyQuaternion) -> PyResult<PyQuaternion> {
    qs::solve_scalar(alpha, beta, gamma.0).map(PyQuaternion).map_err(to_py)
}

/// Swap `T[k,k]` and `T[k+1,k+1]`; returns the updated `(T, Q)`.
#[pyfunction]
fn swap_adjacent(t: &PyQMatrix, q: &PyQMatrix, k: usize) -> PyResult<(PyQMatrix, PyQMatrix)> {
    let (mut t, mut q) = (t.0.clone(), q.0.clone());
    qs::swap_adjacent(&mut t, &mut q, k).map_err(to_py)?;
    Ok((PyQMatrix(t), PyQMatrix(q)))
}

/// Move the selected eigenvalues to the front; returns `(T, Q, permutation)`.
#[pyfunction]
fn reorder_selected(t: &PyQMatrix, q: &PyQMatrix, select: Vec<bool>) -> PyResult<(PyQMatrix, PyQMatrix, Vec<usize>)> {
    let (mut t, mut q) = (t.0.clone(), q.0.clone());
    let perm = qs::reorder_selected(&mut t, &mut q, &select).map_err(to_py)?;
    Ok((PyQMatrix(t), PyQMatrix(q), perm))
}

/// `(e1, e2, e3)`: orthogonality, factorization and eigenpair residuals.
#[pyfunction]
fn metrics(a: &PyQMatrix, u: &PyQMatrix, t: &PyQMatrix, x: &PyQMatrix, lambdas: Vec<Complex64>) -> PyResult<(f64, f64, f64)> {
    let m = qs::metrics(&a.0, &u.0, &t.0, &x.0, &lambdas).map_err(to_py)?;
    Ok((m.e1, m.e2, m.e3))
}

/// Standardized spectrum of `A` computed independently through its complex
/// adjoint embedding.
#[pyfunction]
fn reference_spectrum(a: &PyQMatrix) -> PyResult<Vec<Complex64>> {
    qs::oracle::reference_quaternion_spectrum(&a.0).map(|s| s.values).map_err(to_py)
}

/// Largest distance under the best pairing of two eigenvalue lists.
#[pyfunction]
fn match_spectra(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    qs::oracle::match_spectra(&a, &b).map(|m| m.max_distance).map_err(to_py)
}

#[pymodule]
fn qschur(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuaternion>()?;
    m.add_class::<PyQMatrix>()?;
    m.add_class::<PySchur>()?;
    m.add_function(wrap_pyfunction!(schur_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(triangular_eigenvectors, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvectors, m)?)?;
    m.add_function(wrap_pyfunction!(solve_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(swap_adjacent, m)?)?;
    m.add_function(wrap_pyfunction!(reorder_selected, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(reference_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(match_spectra, m)?)?;
    Ok(())
}
