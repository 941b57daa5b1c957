//! End-to-end execution of a scenario and the files it leaves behind.
//!
//! Layout of an output directory:
//!
//! - `effective_config.toml`: the scenario with all defaults filled in
//! - `diagnostics.csv`: one row per recorded particle step
//! - `snapshots/particles_<step>.csv`: particle states
//! - `grids/{particle,hydro}_<step>.csv`: concentration grids
//! - `agreement.csv`: compare mode only
//! - `hydro_mass.csv`: hydro mode only
//! - `ocean_state.txt`: final stochastic ocean state, when there is one

use std::path::{Path, PathBuf};

use crate::diagnostics::{grid_concentration, DiagnosticsRecord};
use crate::error::{FloeError, Result};
use crate::hydro::{total_mass, HydroFields, HydroRun};
use crate::integrator::{ParticleRun, StepConfig};
use crate::model::{Ensemble, Vec2};
use crate::ocean::OceanField;
use crate::output::{self, CsvSink};
use crate::scenario::{HydroInit, HydroVelocityInit, Mode, Scenario};

/// Particle-vs-hydro agreement at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Agreement {
    pub t: f64,
    pub l1: f64,
    pub pearson: f64,
    pub particle_area: f64,
    pub hydro_area: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub particle_steps: u64,
    pub hydro_steps: u64,
    pub last_record: Option<DiagnosticsRecord>,
    pub agreement: Vec<Agreement>,
    pub drag_value: Option<f64>,
}

fn step_of(t: f64, dt: f64) -> u64 {
    (t / dt).round() as u64
}

fn snapshot_path(out: &Path, step: u64) -> PathBuf {
    out.join("snapshots").join(format!("particles_{step:08}.csv"))
}

fn grid_path(out: &Path, name: &str, step: u64) -> PathBuf {
    out.join("grids").join(format!("{name}_{step:08}.csv"))
}

/// Runs `s` and writes its outputs under `s.output.dir`.
pub fn run_scenario(s: &Scenario) -> Result<RunSummary> {
    let out = s.output.dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| FloeError::io(&out, e))?;
    let drag_value = match s.mode {
        Mode::Particle => None,
        Mode::Hydro | Mode::Compare => Some(s.hydro_drag_value()?),
    };
    output::write_text(&out.join("effective_config.toml"), &s.effective_toml(drag_value)?)?;
    let mut summary = RunSummary {
        out_dir: out.clone(),
        drag_value,
        ..RunSummary::default()
    };
    match s.mode {
        Mode::Particle => run_particle(s, &out, &mut summary)?,
        Mode::Hydro => run_hydro_mode(s, &out, drag_value.expect("hydro drag"), &mut summary)?,
        Mode::Compare => run_compare(s, &out, drag_value.expect("hydro drag"), &mut summary)?,
    }
    Ok(summary)
}

/// Particle run writing diagnostics rows and snapshots; `on_snapshot` sees
/// each snapshot state. Returns the final run state.
fn particle_pass<F>(
    s: &Scenario,
    out: &Path,
    cfg: StepConfig,
    snapshot_times: &[f64],
    mut on_snapshot: F,
) -> Result<(ParticleRun, Option<DiagnosticsRecord>)>
where
    F: FnMut(u64, &Ensemble) -> Result<()>,
{
    let ocean = s.ocean_field()?;
    let ensemble = s.build_ensemble(&ocean)?;
    let mut run = ParticleRun::new(ensemble, ocean, s.physics, cfg)?;
    let mut diag = CsvSink::create(&out.join("diagnostics.csv"), output::DIAGNOSTICS_COLUMNS)?;
    let snap_steps: Vec<u64> = snapshot_times.iter().map(|t| step_of(*t, cfg.dt)).collect();

    let mut emit = |step: u64, e: &Ensemble| -> Result<()> {
        if snap_steps.contains(&step) {
            output::write_particle_snapshot(&snapshot_path(out, step), e)?;
            on_snapshot(step, e)?;
        }
        Ok(())
    };

    let rec = run.initial_record();
    diag.row(&output::diagnostics_row(0, &rec))?;
    emit(0, &run.ensemble)?;
    let mut last = Some(rec);
    while !run.is_finished() {
        let rep = run.advance()?;
        if rep.step % cfg.record_every == 0 || rep.step == cfg.n_steps {
            diag.row(&output::diagnostics_row(rep.step, &rep.record))?;
        }
        emit(rep.step, &run.ensemble)?;
        last = Some(rep.record);
        if rep.step % 10_000 == 0 {
            log::info!("particle step {}/{}", rep.step, cfg.n_steps);
        }
    }
    if let OceanField::Stochastic(st) = &run.ocean {
        output::write_text(&out.join("ocean_state.txt"), &st.state.to_text())?;
    }
    Ok((run, last))
}

fn run_particle(s: &Scenario, out: &Path, summary: &mut RunSummary) -> Result<()> {
    let cfg = s.step_config()?;
    let (run, last) = particle_pass(s, out, cfg, &s.output.snapshot_times, |_, _| Ok(()))?;
    summary.particle_steps = run.step_index();
    summary.last_record = last;
    Ok(())
}

fn initial_velocity(mode: HydroVelocityInit, ocean: OceanField) -> impl Fn(&Vec2) -> Vec2 {
    move |x: &Vec2| match mode {
        HydroVelocityInit::Ocean => ocean.eval(x),
        HydroVelocityInit::Zero => Vec2::zeros(),
    }
}

fn run_hydro_mode(s: &Scenario, out: &Path, drag: f64, summary: &mut RunSummary) -> Result<()> {
    let ocean = s.ocean_field()?;
    let grid = match &s.hydro.initial {
        HydroInit::Ensemble => grid_concentration(&s.build_ensemble(&ocean)?, s.hydro.nx, s.hydro.ny)?,
        HydroInit::Uniform { value } => crate::diagnostics::ConcentrationGrid {
            values: vec![*value; s.hydro.nx * s.hydro.ny],
            ..crate::diagnostics::ConcentrationGrid::zeros(s.hydro.nx, s.hydro.ny, s.domain.half_width)
        },
        HydroInit::File { path } => output::read_grid(path)?.1,
    };
    let fields = HydroFields::from_concentration(&grid, initial_velocity(s.hydro.initial_velocity, ocean.clone()))?;
    let mut run = HydroRun::new(fields, ocean, s.hydro_config(drag))?;
    let mut mass = CsvSink::create(&out.join("hydro_mass.csv"), "t,total_mass")?;
    for &t in &s.hydro.snapshot_times {
        run.run_until(t)?;
        let step = run.step_index();
        output::write_grid(
            &grid_path(out, "hydro", step),
            "hydro",
            run.fields.t,
            &run.fields.concentration(),
        )?;
        mass.row(&format!(
            "{},{}",
            output::fmt_f64(run.fields.t),
            output::fmt_f64(total_mass(&run.fields))
        ))?;
    }
    run.run_until(s.hydro.t_final)?;
    summary.hydro_steps = run.step_index();
    Ok(())
}

fn run_compare(s: &Scenario, out: &Path, drag: f64, summary: &mut RunSummary) -> Result<()> {
    let cfg = s.compare_step_config()?;
    let times = &s.compare.times;
    let (nx, ny) = (s.hydro.nx, s.hydro.ny);
    let mut particle_grids = Vec::new();
    let (run, last) = particle_pass(s, out, cfg, times, |step, e| {
        let g = grid_concentration(e, nx, ny)?;
        output::write_grid(&grid_path(out, "particle", step), "particle", e.t, &g)?;
        particle_grids.push(g);
        Ok(())
    })?;
    summary.particle_steps = run.step_index();
    summary.last_record = last;

    let ocean = s.ocean_field()?;
    let fields = HydroFields::from_concentration(
        &particle_grids[0],
        initial_velocity(s.hydro.initial_velocity, ocean.clone()),
    )?;
    let mut hydro = HydroRun::new(fields, ocean, s.hydro_config(drag))?;
    let mut report = CsvSink::create(&out.join("agreement.csv"), output::AGREEMENT_COLUMNS)?;
    for (&t, pg) in times.iter().zip(&particle_grids) {
        hydro.run_until(t)?;
        let hg = hydro.fields.concentration();
        output::write_grid(
            &grid_path(out, "hydro", hydro.step_index()),
            "hydro",
            hydro.fields.t,
            &hg,
        )?;
        let a = Agreement {
            t,
            l1: output::normalized_l1(pg, &hg)?,
            pearson: output::pearson(pg, &hg)?,
            particle_area: pg.total_area(),
            hydro_area: hg.total_area(),
        };
        report.row(
            &[a.t, a.l1, a.pearson, a.particle_area, a.hydro_area]
                .map(output::fmt_f64)
                .join(","),
        )?;
        summary.agreement.push(a);
    }
    summary.hydro_steps = hydro.step_index();
    Ok(())
}
