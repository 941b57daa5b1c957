//! Explicit forward-Euler stepping of the floe system.
//!
//! `m_i dv_i/dt = (1/n) sum_j f^{ij} + alpha_i (u_o - v_i)|u_o - v_i|`, with
//! every force evaluated on the pre-step state.

use crate::contact::{find_contacts, pair_forces, sum_pair_forces, ContactPair};
use crate::diagnostics::{self, DiagnosticsRecord, ResidualTracker};
use crate::error::{FloeError, Result};
use crate::model::{wrap_position, Ensemble, PhysParams, Vec2};
use crate::ocean::OceanField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub t_final: f64,
    pub n_steps: u64,
    pub record_every: u64,
}

impl StepConfig {
    pub fn new(dt: f64, t_final: f64, record_every: u64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FloeError::invalid(format!("time.dt = {dt} must be > 0")));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(FloeError::invalid(format!("time.t_final = {t_final} must be >= 0")));
        }
        if record_every == 0 {
            return Err(FloeError::invalid("output.record_every must be >= 1"));
        }
        let n_steps = (t_final / dt).round() as u64;
        if (n_steps as f64 * dt - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(FloeError::invalid(format!(
                "time.t_final = {t_final} is not a whole number of steps of dt = {dt}"
            )));
        }
        Ok(StepConfig {
            dt,
            t_final,
            n_steps,
            record_every,
        })
    }
}

/// Quadratic ocean drag `alpha (u_o - v)|u_o - v|`.
pub fn drag_force(alpha: f64, u_o: &Vec2, v: &Vec2) -> Vec2 {
    let rel = u_o - v;
    rel * (alpha * rel.norm())
}

/// `F_i = (1/n) contact_sums[i] + alpha_i (u_oi - v_i)|u_oi - v_i|`.
pub fn total_force(i: usize, e: &Ensemble, contact_sums: &[Vec2], u_oi: &Vec2, p: &PhysParams) -> Vec2 {
    let f = &e.floes[i];
    contact_sums[i] / e.len() as f64 + drag_force(f.drag(p), u_oi, &f.v)
}

/// One explicit Euler step; `step` only labels a blow-up error.
pub fn step_forward_euler(e: &Ensemble, dt: f64, ocean: &OceanField, p: &PhysParams, step: u64) -> Result<Ensemble> {
    step_forward_euler_with_pairs(e, &find_contacts(e), dt, ocean, p, step)
}

/// [`step_forward_euler`] with the contact pairs of `e` already known.
pub fn step_forward_euler_with_pairs(
    e: &Ensemble,
    pairs: &[ContactPair],
    dt: f64,
    ocean: &OceanField,
    p: &PhysParams,
    step: u64,
) -> Result<Ensemble> {
    if !(dt > 0.0) {
        return Err(FloeError::invalid(format!("dt = {dt} must be > 0")));
    }
    let forces = pair_forces(e, pairs, p);
    let sums = sum_pair_forces(e.len(), pairs, &forces);

    let mut next = e.clone();
    for (i, (f, nf)) in e.floes.iter().zip(next.floes.iter_mut()).enumerate() {
        let u_o = ocean.eval(&f.x);
        let force = total_force(i, e, &sums, &u_o, p);
        let x = f.x + f.v * dt;
        let v = f.v + force * (dt / f.mass(p));
        if !(x.iter().chain(v.iter()).all(|c| c.is_finite())) {
            return Err(FloeError::NumericalBlowup {
                step,
                what: format!("floe {i} state became non-finite"),
            });
        }
        nf.x = wrap_position(&x, &e.domain)?;
        nf.v = v;
    }
    next.t = e.t + dt;
    Ok(next)
}

/// A particle run in progress: state, forcing and residual bookkeeping.
pub struct ParticleRun {
    pub ensemble: Ensemble,
    pub ocean: OceanField,
    pub params: PhysParams,
    pub cfg: StepConfig,
    t0: f64,
    /// Contact pairs of `ensemble`.
    pairs: Vec<ContactPair>,
    step: u64,
    tracker: ResidualTracker,
    last_contact_step: Option<u64>,
}

/// Everything known about the step that was just taken.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub step: u64,
    pub record: DiagnosticsRecord,
    pub had_contacts: bool,
}

impl ParticleRun {
    pub fn new(ensemble: Ensemble, ocean: OceanField, params: PhysParams, cfg: StepConfig) -> Result<Self> {
        params.validate()?;
        Ok(ParticleRun {
            t0: ensemble.t,
            pairs: find_contacts(&ensemble),
            ensemble,
            ocean,
            params,
            cfg,
            step: 0,
            tracker: ResidualTracker::default(),
            last_contact_step: None,
        })
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.cfg.n_steps
    }

    /// Step index (1-based) of the last step taken from a state with contacts.
    pub fn last_contact_step(&self) -> Option<u64> {
        self.last_contact_step
    }

    /// Diagnostics of the current state before any step.
    pub fn initial_record(&self) -> DiagnosticsRecord {
        DiagnosticsRecord::at_rest_with_pairs(&self.ensemble, &self.pairs, &self.ocean, &self.params, &self.tracker)
    }

    /// Advances one step, then checks the discrete balance laws against the
    /// ocean sampled before the step. Stochastic forcing advances last.
    pub fn advance(&mut self) -> Result<StepReport> {
        let had_contacts = !self.pairs.is_empty();
        let next = step_forward_euler_with_pairs(
            &self.ensemble,
            &self.pairs,
            self.cfg.dt,
            &self.ocean,
            &self.params,
            self.step,
        )?;
        self.step += 1;
        let mut next = next;
        // avoid drift from summing dt
        next.t = self.t0 + self.step as f64 * self.cfg.dt;
        if had_contacts {
            self.last_contact_step = Some(self.step);
        }
        let next_pairs = find_contacts(&next);
        let record = diagnostics::step_record_with_pairs(
            &self.ensemble,
            &self.pairs,
            &next,
            &next_pairs,
            self.cfg.dt,
            &self.ocean,
            &self.params,
            &mut self.tracker,
        )?;
        self.ensemble = next;
        self.pairs = next_pairs;
        self.ocean.advance(self.cfg.dt)?;
        Ok(StepReport {
            step: self.step,
            record,
            had_contacts,
        })
    }

    /// Runs to the final time, handing every `record_every`-th state (and
    /// the initial one) to `sink`.
    pub fn run<F>(&mut self, mut sink: F) -> Result<()>
    where
        F: FnMut(u64, &Ensemble, &DiagnosticsRecord) -> Result<()>,
    {
        if self.step == 0 {
            let rec = self.initial_record();
            sink(0, &self.ensemble, &rec)?;
        }
        while !self.is_finished() {
            let rep = self.advance()?;
            if rep.step % self.cfg.record_every == 0 || rep.step == self.cfg.n_steps {
                sink(rep.step, &self.ensemble, &rep.record)?;
            }
        }
        Ok(())
    }
}
