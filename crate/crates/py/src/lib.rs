//! Python module `floeflow_py`: run scenarios, step a particle system and
//! read back the grids a run writes.

use std::path::PathBuf;

use floeflow::contact;
use floeflow::diagnostics::{grid_concentration, moments};
use floeflow::integrator::ParticleRun;
use floeflow::output;
use floeflow::runner;
use floeflow::scenario::{Mode, Scenario};
use floeflow::FloeError;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

/// Python exception class for each library error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Value,
    Runtime,
    Os,
}

pub fn error_kind(e: &FloeError) -> ErrorKind {
    match e {
        FloeError::NumericalBlowup { .. } => ErrorKind::Runtime,
        FloeError::Io { .. } => ErrorKind::Os,
        _ => ErrorKind::Value,
    }
}

fn to_py(e: FloeError) -> PyErr {
    let msg = e.to_string();
    match error_kind(&e) {
        ErrorKind::Value => PyValueError::new_err(msg),
        ErrorKind::Runtime => PyRuntimeError::new_err(msg),
        ErrorKind::Os => PyOSError::new_err(msg),
    }
}

fn load(config: PathBuf, out: Option<PathBuf>, mode: Option<&str>, seed: Option<u64>) -> Result<Scenario, FloeError> {
    let mut s = Scenario::load(&config)?;
    if let Some(m) = mode {
        s.mode = m.parse::<Mode>()?;
    }
    if let Some(seed) = seed {
        s.seed = seed;
    }
    if let Some(out) = out {
        s.output.dir = out;
    }
    s.validate()?;
    Ok(s)
}

/// Checks a scenario file; raises `ValueError` with the offending field.
#[pyfunction]
#[pyo3(signature = (config, mode=None, seed=None))]
fn validate(config: PathBuf, mode: Option<&str>, seed: Option<u64>) -> PyResult<()> {
    load(config, None, mode, seed).map(|_| ()).map_err(to_py)
}

/// Runs a scenario and returns a summary dict. Output files land in `out`
/// (or the scenario's own directory).
#[pyfunction]
#[pyo3(signature = (config, out=None, mode=None, seed=None))]
fn run<'py>(
    py: Python<'py>,
    config: PathBuf,
    out: Option<PathBuf>,
    mode: Option<&str>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = load(config, out, mode, seed).map_err(to_py)?;
    let summary = py.detach(|| runner::run_scenario(&s)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("out_dir", summary.out_dir.display().to_string())?;
    d.set_item("particle_steps", summary.particle_steps)?;
    d.set_item("hydro_steps", summary.hydro_steps)?;
    d.set_item("drag_value", summary.drag_value)?;
    if let Some(r) = &summary.last_record {
        d.set_item("momentum_relative_max", r.running.momentum_relative_max)?;
        d.set_item("energy_relative_max", r.running.energy_relative_max)?;
        d.set_item("velocity_mismatch", r.velocity_mismatch)?;
    }
    let agreement: Vec<(f64, f64, f64)> = summary.agreement.iter().map(|a| (a.t, a.l1, a.pearson)).collect();
    d.set_item("agreement", agreement)?;
    Ok(d)
}

/// Contact damping factor for a restitution coefficient in (0, 1).
#[pyfunction]
fn beta(e_r: f64) -> PyResult<f64> {
    contact::beta(e_r).map_err(to_py)
}

/// Reads a grid file written by a run: `(t, rows)` with `rows[j][i]`.
#[pyfunction]
fn read_grid(path: PathBuf) -> PyResult<(f64, Vec<Vec<f64>>)> {
    let (t, g) = output::read_grid(&path).map_err(to_py)?;
    let rows = g.values.chunks(g.nx).map(|r| r.to_vec()).collect();
    Ok((t, rows))
}

/// A particle run that Python drives step by step.
#[pyclass(unsendable)]
struct ParticleSim {
    run: ParticleRun,
}

#[pymethods]
impl ParticleSim {
    #[new]
    #[pyo3(signature = (config, seed=None))]
    fn new(config: PathBuf, seed: Option<u64>) -> PyResult<Self> {
        let s = load(config, None, None, seed).map_err(to_py)?;
        let build = || -> Result<ParticleRun, FloeError> {
            let ocean = s.ocean_field()?;
            let e = s.build_ensemble(&ocean)?;
            ParticleRun::new(e, ocean, s.physics, s.step_config()?)
        };
        Ok(ParticleSim {
            run: build().map_err(to_py)?,
        })
    }

    /// Takes up to `n` steps (fewer if the run ends) and returns the step index.
    #[pyo3(signature = (n=1))]
    fn advance(&mut self, n: u64) -> PyResult<u64> {
        for _ in 0..n {
            if self.run.is_finished() {
                break;
            }
            self.run.advance().map_err(to_py)?;
        }
        Ok(self.run.step_index())
    }

    #[getter]
    fn t(&self) -> f64 {
        self.run.ensemble.t
    }

    #[getter]
    fn step(&self) -> u64 {
        self.run.step_index()
    }

    #[getter]
    fn finished(&self) -> bool {
        self.run.is_finished()
    }

    /// Per-floe rows `(r, h, x, y, u, v)`.
    fn floes(&self) -> Vec<(f64, f64, f64, f64, f64, f64)> {
        self.run
            .ensemble
            .floes
            .iter()
            .map(|f| (f.r, f.h, f.x.x, f.x.y, f.v.x, f.v.y))
            .collect()
    }

    /// `{"M0", "M1", "M2v", "M2x", "M2"}` of the current state.
    fn moments<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = moments(&self.run.ensemble, &self.run.params);
        let d = PyDict::new(py);
        d.set_item("M0", m.m0)?;
        d.set_item("M1", (m.m1.x, m.m1.y))?;
        d.set_item("M2v", m.m2v)?;
        d.set_item("M2x", m.m2x)?;
        d.set_item("M2", m.m2)?;
        Ok(d)
    }

    /// Area-fraction grid of the current state, `rows[j][i]`.
    #[pyo3(signature = (nx=25, ny=25))]
    fn concentration(&self, nx: usize, ny: usize) -> PyResult<Vec<Vec<f64>>> {
        let g = grid_concentration(&self.run.ensemble, nx, ny).map_err(to_py)?;
        Ok(g.values.chunks(g.nx).map(|r| r.to_vec()).collect())
    }
}

#[pymodule]
fn floeflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(read_grid, m)?)?;
    m.add_class::<ParticleSim>()?;
    m.add("SCHEMA", output::SCHEMA)?;
    Ok(())
}
