//! Pressureless continuum model: density and momentum on a periodic
//! cell-centred grid, central differences in space, two-step
//! Adams-Bashforth in time.
//!
//! `d_t rho + div(rho u) = 0`,
//! `d_t (rho u) + div(rho u (x) u) = S`, with `S` the ocean drag source.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::ConcentrationGrid;
use crate::distributions::{RadiusLaw, ThicknessLaw};
use crate::error::{FloeError, Result};
use crate::model::{drag_coefficient, floe_mass, PhysParams, Vec2};
use crate::ocean::OceanField;

#[derive(Clone, Debug, PartialEq)]
pub struct HydroFields {
    pub nx: usize,
    pub ny: usize,
    pub half_width: f64,
    /// Row-major, `rho[j * nx + i]`, `i` along x.
    pub rho: Vec<f64>,
    pub mom_x: Vec<f64>,
    pub mom_y: Vec<f64>,
    /// Velocity: `mom / max(rho, floor)` in conservative form, the evolved
    /// variable in velocity form.
    pub vel_x: Vec<f64>,
    pub vel_y: Vec<f64>,
    pub t: f64,
}

impl HydroFields {
    /// Density and velocity both uniform.
    pub fn uniform(nx: usize, ny: usize, half_width: f64, rho: f64, u: Vec2) -> Result<Self> {
        let rho = vec![rho; nx * ny];
        Self::from_density(nx, ny, half_width, rho, |_| u)
    }

    /// Given density, velocity `u(x)` sampled at cell centres.
    pub fn from_density<F>(nx: usize, ny: usize, half_width: f64, rho: Vec<f64>, u: F) -> Result<Self>
    where
        F: Fn(&Vec2) -> Vec2,
    {
        if nx == 0 || ny == 0 || rho.len() != nx * ny {
            return Err(FloeError::invalid(format!(
                "hydro grid {nx}x{ny} does not match {} density values",
                rho.len()
            )));
        }
        if !(half_width > 0.0) {
            return Err(FloeError::invalid(format!(
                "domain.half_width = {half_width} must be > 0"
            )));
        }
        if let Some(bad) = rho.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(FloeError::invalid(format!("density {bad} must be finite and >= 0")));
        }
        let mut f = HydroFields {
            nx,
            ny,
            half_width,
            mom_x: vec![0.0; nx * ny],
            mom_y: vec![0.0; nx * ny],
            vel_x: vec![0.0; nx * ny],
            vel_y: vec![0.0; nx * ny],
            rho,
            t: 0.0,
        };
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let v = u(&f.cell_centre(i, j));
                f.vel_x[k] = v.x;
                f.vel_y[k] = v.y;
                f.mom_x[k] = f.rho[k] * v.x;
                f.mom_y[k] = f.rho[k] * v.y;
            }
        }
        Ok(f)
    }

    /// Density taken from a concentration grid.
    pub fn from_concentration<F>(c: &ConcentrationGrid, u: F) -> Result<Self>
    where
        F: Fn(&Vec2) -> Vec2,
    {
        Self::from_density(c.nx, c.ny, c.half_width, c.values.clone(), u)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_width / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn cell_centre(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            -self.half_width + (i as f64 + 0.5) * self.dx(),
            -self.half_width + (j as f64 + 0.5) * self.dy(),
        )
    }

    pub fn velocity(&self, k: usize) -> Vec2 {
        Vec2::new(self.vel_x[k], self.vel_y[k])
    }

    /// Density as a concentration grid.
    pub fn concentration(&self) -> ConcentrationGrid {
        ConcentrationGrid {
            nx: self.nx,
            ny: self.ny,
            half_width: self.half_width,
            values: self.rho.clone(),
        }
    }
}

/// `sum rho * cell_area`.
pub fn total_mass(f: &HydroFields) -> f64 {
    f.rho.iter().sum::<f64>() * f.cell_area()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DragMode {
    /// `S = rho gamma (u_o - u)|u_o - u|`, `gamma` the mean of `alpha/m`.
    #[default]
    MeanField,
    /// `S = alpha (u_o - u)|u_o - u|` with a constant `alpha`.
    Literal,
}

/// Which variable carries the momentum equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumForm {
    /// `d_t (rho u) = -div(rho u (x) u) + S`, `u = rho u / max(rho, floor)`.
    #[default]
    Conservative,
    /// `d_t u = -(u . grad) u + S / rho`. In mean-field mode `S / rho` is
    /// `gamma (u_o - u)|u_o - u|`, so no division by the density occurs.
    Velocity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HydroConfig {
    pub dt: f64,
    pub momentum_form: MomentumForm,
    pub drag_mode: DragMode,
    /// `gamma` in mean-field mode, `alpha` in literal mode.
    pub drag_value: f64,
    pub density_floor: f64,
}

impl Default for HydroConfig {
    fn default() -> Self {
        HydroConfig {
            dt: 2e-4,
            momentum_form: MomentumForm::Conservative,
            drag_mode: DragMode::MeanField,
            drag_value: 0.0,
            density_floor: 1e-12,
        }
    }
}

impl HydroConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(FloeError::invalid(format!("hydro.dt = {} must be > 0", self.dt)));
        }
        if !(self.density_floor > 0.0) {
            return Err(FloeError::invalid(format!(
                "hydro.density_floor = {} must be > 0",
                self.density_floor
            )));
        }
        if !(self.drag_value >= 0.0 && self.drag_value.is_finite()) {
            return Err(FloeError::invalid(format!(
                "hydro drag value {} must be finite and >= 0",
                self.drag_value
            )));
        }
        Ok(())
    }
}

/// `d/dx` by `(f[i+1] - f[i-1]) / (2 dx)` with periodic wrap.
pub fn central_dx(f: &[f64], nx: usize, ny: usize, dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let row = &f[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let (l, r) = ((i + nx - 1) % nx, (i + 1) % nx);
            out[j * nx + i] = (row[r] - row[l]) / (2.0 * dx);
        }
    }
    out
}

/// `d/dy` counterpart of [`central_dx`].
pub fn central_dy(f: &[f64], nx: usize, ny: usize, dy: f64) -> Vec<f64> {
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let (d, u) = ((j + ny - 1) % ny, (j + 1) % ny);
        for i in 0..nx {
            out[j * nx + i] = (f[u * nx + i] - f[d * nx + i]) / (2.0 * dy);
        }
    }
    out
}

/// Central divergence of the vector field `(fx, fy)`.
pub fn central_divergence(fx: &[f64], fy: &[f64], nx: usize, ny: usize, dx: f64, dy: f64) -> Vec<f64> {
    let a = central_dx(fx, nx, ny, dx);
    let b = central_dy(fy, nx, ny, dy);
    a.iter().zip(&b).map(|(a, b)| a + b).collect()
}

/// Per-cell time derivatives of the density and of the momentum
/// (conservative form) or velocity (velocity form) components.
#[derive(Clone, Debug, PartialEq)]
pub struct Tendencies {
    pub rho: Vec<f64>,
    pub q_x: Vec<f64>,
    pub q_y: Vec<f64>,
}

fn drag_source(f: &HydroFields, ocean: &OceanField, cfg: &HydroConfig) -> (Vec<f64>, Vec<f64>) {
    let n = f.nx * f.ny;
    let mut sx = vec![0.0; n];
    let mut sy = vec![0.0; n];
    for j in 0..f.ny {
        for i in 0..f.nx {
            let k = j * f.nx + i;
            let rel = ocean.eval(&f.cell_centre(i, j)) - f.velocity(k);
            let coef = match (cfg.momentum_form, cfg.drag_mode) {
                (MomentumForm::Conservative, DragMode::MeanField) => f.rho[k] * cfg.drag_value,
                (MomentumForm::Conservative, DragMode::Literal) => cfg.drag_value,
                (MomentumForm::Velocity, DragMode::MeanField) => cfg.drag_value,
                (MomentumForm::Velocity, DragMode::Literal) => cfg.drag_value / f.rho[k].max(cfg.density_floor),
            };
            let s = rel * (coef * rel.norm());
            sx[k] = s.x;
            sy[k] = s.y;
        }
    }
    (sx, sy)
}

pub fn rhs(f: &HydroFields, ocean: &OceanField, cfg: &HydroConfig) -> Tendencies {
    let (nx, ny) = (f.nx, f.ny);
    let (dx, dy) = (f.dx(), f.dy());
    let rho = central_divergence(&f.mom_x, &f.mom_y, nx, ny, dx, dy);
    let (src_x, src_y) = drag_source(f, ocean, cfg);
    let (trans_x, trans_y) = match cfg.momentum_form {
        MomentumForm::Conservative => {
            let uxx: Vec<f64> = f.mom_x.iter().zip(&f.vel_x).map(|(m, u)| m * u).collect();
            let uxy: Vec<f64> = f.mom_x.iter().zip(&f.vel_y).map(|(m, u)| m * u).collect();
            let uyy: Vec<f64> = f.mom_y.iter().zip(&f.vel_y).map(|(m, u)| m * u).collect();
            (
                central_divergence(&uxx, &uxy, nx, ny, dx, dy),
                central_divergence(&uxy, &uyy, nx, ny, dx, dy),
            )
        }
        MomentumForm::Velocity => {
            let (ux_x, ux_y) = (central_dx(&f.vel_x, nx, ny, dx), central_dy(&f.vel_x, nx, ny, dy));
            let (uy_x, uy_y) = (central_dx(&f.vel_y, nx, ny, dx), central_dy(&f.vel_y, nx, ny, dy));
            let n = nx * ny;
            let (mut ax, mut ay) = (vec![0.0; n], vec![0.0; n]);
            for k in 0..n {
                let (u, v) = (f.vel_x[k], f.vel_y[k]);
                ax[k] = u * ux_x[k] + v * ux_y[k];
                ay[k] = u * uy_x[k] + v * uy_y[k];
            }
            (ax, ay)
        }
    };
    Tendencies {
        rho: rho.iter().map(|d| -d).collect(),
        q_x: trans_x.iter().zip(&src_x).map(|(d, s)| s - d).collect(),
        q_y: trans_y.iter().zip(&src_y).map(|(d, s)| s - d).collect(),
    }
}

/// `state += dt (1.5 now - 0.5 prev)`, or `state += dt now` without history.
pub fn ab2_update(state: &mut [f64], now: &[f64], prev: Option<&[f64]>, dt: f64) {
    match prev {
        Some(prev) => {
            for ((s, a), b) in state.iter_mut().zip(now).zip(prev) {
                *s += dt * (1.5 * a - 0.5 * b);
            }
        }
        None => {
            for (s, a) in state.iter_mut().zip(now) {
                *s += dt * a;
            }
        }
    }
}

/// One AB2 step (forward Euler when `prev` is absent). Returns the new
/// fields and the tendencies at the old ones for the next call.
pub fn step_ab2(
    f: &HydroFields,
    prev: Option<&Tendencies>,
    cfg: &HydroConfig,
    ocean: &OceanField,
    step: u64,
) -> Result<(HydroFields, Tendencies)> {
    let now = rhs(f, ocean, cfg);
    let mut next = f.clone();
    ab2_update(&mut next.rho, &now.rho, prev.map(|p| p.rho.as_slice()), cfg.dt);
    let (qx, qy) = match cfg.momentum_form {
        MomentumForm::Conservative => (&mut next.mom_x, &mut next.mom_y),
        MomentumForm::Velocity => (&mut next.vel_x, &mut next.vel_y),
    };
    ab2_update(qx, &now.q_x, prev.map(|p| p.q_x.as_slice()), cfg.dt);
    ab2_update(qy, &now.q_y, prev.map(|p| p.q_y.as_slice()), cfg.dt);
    for k in 0..next.rho.len() {
        // untouched cells keep their derived field bit for bit
        let unchanged = next.rho[k] == f.rho[k]
            && match cfg.momentum_form {
                MomentumForm::Conservative => next.mom_x[k] == f.mom_x[k] && next.mom_y[k] == f.mom_y[k],
                MomentumForm::Velocity => next.vel_x[k] == f.vel_x[k] && next.vel_y[k] == f.vel_y[k],
            };
        if unchanged {
            continue;
        }
        match cfg.momentum_form {
            MomentumForm::Conservative => {
                let r = next.rho[k].max(cfg.density_floor);
                next.vel_x[k] = next.mom_x[k] / r;
                next.vel_y[k] = next.mom_y[k] / r;
            }
            MomentumForm::Velocity => {
                next.mom_x[k] = next.rho[k] * next.vel_x[k];
                next.mom_y[k] = next.rho[k] * next.vel_y[k];
            }
        }
    }
    let finite = next
        .rho
        .iter()
        .chain(&next.mom_x)
        .chain(&next.mom_y)
        .chain(&next.vel_x)
        .chain(&next.vel_y)
        .all(|v| v.is_finite());
    if !finite {
        return Err(FloeError::NumericalBlowup {
            step,
            what: "hydro fields became non-finite".into(),
        });
    }
    next.t = f.t + cfg.dt;
    Ok((next, now))
}

/// Monte Carlo mean of `alpha(r, h) / m(r, h)` over the floe laws.
pub fn mean_field_gamma(
    radius: &RadiusLaw,
    thickness: &ThicknessLaw,
    p: &PhysParams,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(FloeError::invalid("mean-field drag needs at least one sample"));
    }
    radius.validate()?;
    thickness.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..samples {
        let r = radius.sample(&mut rng);
        let h = thickness.sample(&mut rng);
        acc += drag_coefficient(r, h, p)? / floe_mass(r, h, p)?;
    }
    Ok(acc / samples as f64)
}

/// A hydro run in progress.
pub struct HydroRun {
    pub fields: HydroFields,
    pub ocean: OceanField,
    pub cfg: HydroConfig,
    prev: Option<Tendencies>,
    step: u64,
}

impl HydroRun {
    pub fn new(fields: HydroFields, ocean: OceanField, cfg: HydroConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(HydroRun {
            fields,
            ocean,
            cfg,
            prev: None,
            step: 0,
        })
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn advance(&mut self) -> Result<()> {
        let (next, now) = step_ab2(&self.fields, self.prev.as_ref(), &self.cfg, &self.ocean, self.step)?;
        self.fields = next;
        self.prev = Some(now);
        self.step += 1;
        self.ocean.advance(self.cfg.dt)?;
        Ok(())
    }

    /// Steps until `t` is reached (to within half a step).
    pub fn run_until(&mut self, t: f64) -> Result<()> {
        let target = (t / self.cfg.dt).round() as u64;
        while self.step < target {
            self.advance()?;
        }
        Ok(())
    }

    /// Snapshots at the given times, in increasing order.
    pub fn snapshots(&mut self, times: &[f64]) -> Result<Vec<HydroFields>> {
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            self.run_until(t)?;
            out.push(self.fields.clone());
        }
        Ok(out)
    }
}
