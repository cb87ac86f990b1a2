//! Python bindings. Robin coefficients are passed as floats, with
//! `float("inf")` or the string `"inf"` selecting the Dirichlet condition.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use shapelab_core::experiments::{self, FamilyResult};
use shapelab_core::fem::{self, SolverOptions};
use shapelab_core::functionals::{self, EvalOptions};
use shapelab_core::geometry::{self, DomainSpec};
use shapelab_core::homog_h1::{self, H1Options, ShellLattice};
use shapelab_core::{radial, RobinCoefficient, ShapeError};

create_exception!(
    shapelab,
    SolverError,
    PyRuntimeError,
    "A numerical method failed to converge."
);

fn err(e: ShapeError) -> PyErr {
    if e.is_solver_failure() {
        SolverError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[derive(FromPyObject)]
enum BetaArg {
    Num(f64),
    Text(String),
}

impl BetaArg {
    fn get(&self) -> PyResult<RobinCoefficient> {
        match self {
            BetaArg::Num(v) if *v == f64::INFINITY => Ok(RobinCoefficient::Infinite),
            BetaArg::Num(v) => RobinCoefficient::finite(*v).map_err(err),
            BetaArg::Text(s) => s.parse().map_err(err),
        }
    }
}

fn eval_options(h: f64, cell_resolution: usize, radial_tol: f64) -> EvalOptions {
    EvalOptions {
        h,
        cell_resolution,
        solver: SolverOptions::default(),
        radial_tol,
    }
}

/// Symbolic domain.
#[pyclass(name = "Domain", frozen, from_py_object, module = "shapelab")]
#[derive(Clone)]
struct PyDomain(DomainSpec);

#[pymethods]
impl PyDomain {
    #[staticmethod]
    #[pyo3(signature = (r, d = 2))]
    fn ball(r: f64, d: usize) -> PyResult<Self> {
        checked(DomainSpec::Ball { radius: r, dim: d })
    }

    #[staticmethod]
    fn rect(width: f64, height: f64) -> PyResult<Self> {
        checked(DomainSpec::Rectangle { width, height })
    }

    /// Unit cube minus `n^d` lattice holes of radius `k n^(-d/(d-1))`.
    #[staticmethod]
    #[pyo3(signature = (n, k = 1.0, d = 2))]
    fn perforated(n: usize, k: f64, d: usize) -> PyResult<Self> {
        checked(DomainSpec::PerforatedSquare { n, k, dim: d })
    }

    #[staticmethod]
    fn union(parts: Vec<PyDomain>) -> PyResult<Self> {
        checked(DomainSpec::DisjointUnion(
            parts.into_iter().map(|p| p.0).collect(),
        ))
    }

    #[getter]
    fn measure(&self) -> f64 {
        self.0.measure()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

fn checked(d: DomainSpec) -> PyResult<PyDomain> {
    d.validate().map_err(err)?;
    Ok(PyDomain(d))
}

/// Triangle mesh of a planar domain.
#[pyclass(name = "Mesh", frozen, module = "shapelab")]
struct PyMesh(geometry::Mesh);

#[pymethods]
impl PyMesh {
    #[staticmethod]
    #[pyo3(signature = (domain, h = 0.05, cell_resolution = 24))]
    fn from_domain(domain: &PyDomain, h: f64, cell_resolution: usize) -> PyResult<Self> {
        let opts = eval_options(h, cell_resolution, 1e-10);
        Ok(PyMesh(
            functionals::mesh_for(&domain.0, &opts).map_err(err)?,
        ))
    }

    /// Parses the plain-text mesh format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyMesh(geometry::read_mesh(text).map_err(err)?))
    }

    fn to_text(&self) -> String {
        geometry::write_mesh(&self.0)
    }

    fn refined(&self) -> Self {
        PyMesh(geometry::refine_uniform(&self.0))
    }

    fn scaled(&self, t: f64) -> PyResult<Self> {
        Ok(PyMesh(geometry::scale_mesh(&self.0, t).map_err(err)?))
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.0.num_vertices()
    }

    #[getter]
    fn num_triangles(&self) -> usize {
        self.0.triangles().len()
    }

    fn vertices(&self) -> Vec<(f64, f64)> {
        self.0.vertices().iter().map(|p| (p[0], p[1])).collect()
    }

    fn triangles(&self) -> Vec<(usize, usize, usize)> {
        self.0
            .triangles()
            .iter()
            .map(|t| (t[0], t[1], t[2]))
            .collect()
    }

    /// `(area, perimeter, h_max, min_angle_degrees)`.
    fn stats(&self) -> PyResult<(f64, f64, f64, f64)> {
        let s = geometry::mesh_stats(&self.0).map_err(err)?;
        Ok((s.area, s.perimeter, s.h_max, s.min_angle))
    }

    /// P1 solve: `(lambda, torsion)`.
    #[pyo3(signature = (beta, cg_tol = fem::DEFAULT_CG_TOL, eig_tol = fem::DEFAULT_EIG_TOL))]
    fn solve(
        &self,
        py: Python<'_>,
        beta: BetaArg,
        cg_tol: f64,
        eig_tol: f64,
    ) -> PyResult<(f64, f64)> {
        let b = beta.get()?;
        let opts = SolverOptions {
            cg_tol,
            eig_tol,
            ..Default::default()
        };
        py.detach(|| {
            let sys = fem::assemble(&self.0)?;
            let eig = fem::solve_eig_with(&sys, b, &opts)?;
            let tor = fem::solve_torsion(&sys, b, cg_tol)?;
            Ok((eig.lambda, tor.torsion))
        })
        .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(vertices={}, triangles={})",
            self.0.num_vertices(),
            self.0.triangles().len()
        )
    }
}

#[pyclass(name = "QuantityReport", frozen, get_all, module = "shapelab")]
struct PyReport {
    domain: String,
    scale: f64,
    beta: f64,
    q: f64,
    lambda_: f64,
    torsion: f64,
    f: f64,
    solver: String,
    mesh_h: Option<f64>,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "QuantityReport(domain={}, lambda={}, torsion={}, F={}, solver={})",
            self.domain, self.lambda_, self.torsion, self.f, self.solver
        )
    }
}

impl From<functionals::QuantityReport> for PyReport {
    fn from(r: functionals::QuantityReport) -> Self {
        PyReport {
            domain: r.domain_id(),
            scale: r.scale,
            beta: r.beta.as_f64(),
            q: r.q,
            lambda_: r.lambda,
            torsion: r.torsion,
            f: r.f,
            solver: r.solver.to_string(),
            mesh_h: r.mesh_h,
        }
    }
}

/// Fitted family: rows of `(parameter, n_small, scale, lambda, torsion, F)`.
#[pyclass(name = "FamilyResult", frozen, get_all, module = "shapelab")]
struct PyFamily {
    rows: Vec<(f64, f64, f64, f64, f64, f64)>,
    slope: f64,
    intercept: f64,
    r2: f64,
    expected_slope: f64,
}

impl From<FamilyResult> for PyFamily {
    fn from(r: FamilyResult) -> Self {
        PyFamily {
            rows: r
                .rows
                .iter()
                .map(|x| (x.parameter, x.n_small, x.scale, x.lambda, x.torsion, x.f))
                .collect(),
            slope: r.fit.slope,
            intercept: r.fit.intercept,
            r2: r.fit.r2,
            expected_slope: r.expected_slope,
        }
    }
}

#[pyclass(name = "EnergyBreakdown", frozen, get_all, module = "shapelab")]
struct PyEnergy {
    n: usize,
    k: f64,
    r: f64,
    s_nn_self: f64,
    s_nn_cross: f64,
    s_nmu: f64,
    s_mumu: f64,
    e_n: f64,
    mc_stderr: f64,
}

#[pyfunction]
#[pyo3(signature = (r, beta, d = 2, tol = 1e-10))]
fn eig_ball(r: f64, beta: BetaArg, d: usize, tol: f64) -> PyResult<f64> {
    radial::eig_ball(r, beta.get()?, d, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, beta, d = 2))]
fn torsion_ball(r: f64, beta: BetaArg, d: usize) -> PyResult<f64> {
    radial::torsion_ball(r, beta.get()?, d).map_err(err)
}

#[pyfunction]
fn unit_ball_volume(d: usize) -> f64 {
    radial::unit_ball_volume(d)
}

#[pyfunction]
fn f_q(lambda_: f64, torsion: f64, q: f64) -> PyResult<f64> {
    functionals::f_q(lambda_, torsion, q).map_err(err)
}

/// `(slope, intercept, r2)` of the least-squares line in log-log space.
#[pyfunction]
fn slope_fit(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let f = experiments::slope_fit(&points).map_err(err)?;
    Ok((f.slope, f.intercept, f.r2))
}

#[pyfunction]
#[pyo3(signature = (domain, beta, q = 1.0, normalize = false, h = 0.05, cell_resolution = 24, radial_tol = 1e-10))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    py: Python<'_>,
    domain: &PyDomain,
    beta: BetaArg,
    q: f64,
    normalize: bool,
    h: f64,
    cell_resolution: usize,
    radial_tol: f64,
) -> PyResult<PyReport> {
    let b = beta.get()?;
    let opts = eval_options(h, cell_resolution, radial_tol);
    let spec = domain.0.clone();
    py.detach(|| {
        if normalize {
            functionals::evaluate_normalized(&spec, b, q, &opts)
        } else {
            functionals::evaluate(&spec, b, q, &opts)
        }
    })
    .map(PyReport::from)
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (q, beta, deltas, d = 2, tol = 1e-10))]
fn threshold_family(
    q: f64,
    beta: BetaArg,
    deltas: Vec<f64>,
    d: usize,
    tol: f64,
) -> PyResult<PyFamily> {
    experiments::threshold_family(q, d, beta.get()?, &deltas, tol)
        .map(PyFamily::from)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (q, beta, epsilons, d = 2, tol = 1e-10))]
fn divergence_family(
    q: f64,
    beta: BetaArg,
    epsilons: Vec<f64>,
    d: usize,
    tol: f64,
) -> PyResult<PyFamily> {
    experiments::divergence_family(q, d, beta.get()?, &epsilons, tol)
        .map(PyFamily::from)
        .map_err(err)
}

/// Rows of `(n, lambda, torsion, F1, area, target_lambda, target_F1)`.
#[pyfunction]
#[pyo3(signature = (beta, k, ns, cell_resolution = 24, jobs = 1))]
#[allow(clippy::type_complexity)]
fn homogenization_sweep(
    py: Python<'_>,
    beta: f64,
    k: f64,
    ns: Vec<usize>,
    cell_resolution: usize,
    jobs: usize,
) -> PyResult<Vec<(usize, f64, f64, f64, f64, f64, f64)>> {
    let opts = eval_options(0.05, cell_resolution, 1e-10);
    let rows = py
        .detach(|| {
            experiments::homogenization_sweep(beta, k, &ns, cell_resolution, &opts, jobs.max(1))
        })
        .map_err(err)?;
    Ok(rows
        .iter()
        .map(|r| {
            (
                r.n,
                r.lambda,
                r.torsion,
                r.f1,
                r.area,
                r.target_lambda,
                r.target_f1,
            )
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (n, k = 1.0, shell_samples = 1 << 20, cube_samples = 1 << 22, seed = 20_240_601, jobs = 1))]
fn h1_energy(
    py: Python<'_>,
    n: usize,
    k: f64,
    shell_samples: usize,
    cube_samples: usize,
    seed: u64,
    jobs: usize,
) -> PyResult<PyEnergy> {
    let lat = ShellLattice::new(n, k).map_err(err)?;
    let opts = H1Options {
        shell_samples,
        cube_samples,
        seed,
        jobs: jobs.max(1),
    };
    let e = py
        .detach(|| homog_h1::h1_energy(&lat, &opts))
        .map_err(err)?;
    Ok(PyEnergy {
        n,
        k,
        r: lat.r,
        s_nn_self: e.s_nn_self,
        s_nn_cross: e.s_nn_cross,
        s_nmu: e.s_nmu,
        s_mumu: e.s_mumu,
        e_n: e.e_n,
        mc_stderr: e.mc_stderr,
    })
}

#[pymodule]
pub fn shapelab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PyEnergy>()?;
    m.add_function(wrap_pyfunction!(eig_ball, m)?)?;
    m.add_function(wrap_pyfunction!(torsion_ball, m)?)?;
    m.add_function(wrap_pyfunction!(unit_ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(f_q, m)?)?;
    m.add_function(wrap_pyfunction!(slope_fit, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_family, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_family, m)?)?;
    m.add_function(wrap_pyfunction!(homogenization_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(h1_energy, m)?)?;
    Ok(())
}
