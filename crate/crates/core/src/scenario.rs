//! Scenario files: strict TOML describing a complete experiment.
//!
//! Unknown keys are rejected everywhere. The RNG seed has no default.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{place_floes, RadiusLaw, ThicknessLaw};
use crate::error::{FloeError, Result};
use crate::hydro::{mean_field_gamma, DragMode, HydroConfig, MomentumForm};
use crate::integrator::StepConfig;
use crate::model::{Domain, Ensemble, Floe, PhysParams, Vec2};
use crate::ocean::{FourierOceanState, FourierSpectrum, OceanField, StochasticOcean};

/// Independent ChaCha streams drawn from the scenario seed.
pub const STREAM_FLOES: u64 = 0;
pub const STREAM_OCEAN: u64 = 1;
pub const STREAM_GAMMA: u64 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Particle,
    Hydro,
    Compare,
}

impl std::str::FromStr for Mode {
    type Err = FloeError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "particle" => Ok(Mode::Particle),
            "hydro" => Ok(Mode::Hydro),
            "compare" => Ok(Mode::Compare),
            other => Err(FloeError::Config(format!(
                "mode = {other:?} is not one of particle, hydro, compare"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSpec {
    pub half_width: f64,
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            half_width: std::f64::consts::PI,
        }
    }
}

/// Initial floe velocities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocityInit {
    Zero,
    /// The local ocean velocity.
    Ocean,
    /// Ocean velocity plus independent uniform draws on `[-spread, spread]`.
    OceanPlusUniform {
        spread: f64,
    },
    Constant {
        value: [f64; 2],
    },
}

impl Default for VelocityInit {
    fn default() -> Self {
        VelocityInit::OceanPlusUniform { spread: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloeSpec {
    pub radius: RadiusLaw,
    pub thickness: ThicknessLaw,
    pub velocity: VelocityInit,
    /// Placement draws per floe before overlaps are allowed.
    pub max_attempts: usize,
}

impl Default for FloeSpec {
    fn default() -> Self {
        FloeSpec {
            radius: RadiusLaw::default(),
            thickness: ThicknessLaw::default(),
            velocity: VelocityInit::default(),
            max_attempts: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StochasticInit {
    /// Amplitudes drawn from the stationary law.
    #[default]
    Stationary,
    /// All amplitudes zero.
    Quiescent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OceanSpec {
    Constant {
        u: [f64; 2],
    },
    Vortex,
    QuadraticChannel,
    Stochastic {
        #[serde(default = "default_modes")]
        mode_count: usize,
        #[serde(default = "default_damping_base")]
        damping_base: f64,
        #[serde(default = "default_damping_k2")]
        damping_k2: f64,
        #[serde(default = "default_forcing_scale")]
        forcing_scale: f64,
        #[serde(default)]
        init: StochasticInit,
        /// Resume from a saved ocean state instead of `init`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state_file: Option<PathBuf>,
    },
}

fn default_modes() -> usize {
    FourierSpectrum::default().mode_count
}
fn default_damping_base() -> f64 {
    FourierSpectrum::default().damping_base
}
fn default_damping_k2() -> f64 {
    FourierSpectrum::default().damping_k2
}
fn default_forcing_scale() -> f64 {
    FourierSpectrum::default().forcing_scale
}

impl Default for OceanSpec {
    fn default() -> Self {
        OceanSpec::Constant { u: [0.5, 0.0] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_final: f64,
}

impl Default for TimeSpec {
    fn default() -> Self {
        TimeSpec {
            dt: 1e-3,
            t_final: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Diagnostics row every this many steps (the last step always).
    pub record_every: u64,
    /// Particle snapshots at these times (rounded to the nearest step).
    pub snapshot_times: Vec<f64>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("out"),
            record_every: 10,
            snapshot_times: vec![0.0, 2.0, 10.0],
        }
    }
}

/// Initial hydro density for hydro mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HydroInit {
    /// Concentration of the scenario's sampled floe ensemble.
    #[default]
    Ensemble,
    Uniform {
        value: f64,
    },
    /// A grid file written by a previous run.
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HydroVelocityInit {
    #[default]
    Ocean,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HydroSpec {
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub momentum_form: MomentumForm,
    pub drag_mode: DragMode,
    /// Overrides the Monte Carlo mean in mean-field mode; required in
    /// literal mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drag_value: Option<f64>,
    pub gamma_samples: usize,
    pub density_floor: f64,
    pub initial: HydroInit,
    pub initial_velocity: HydroVelocityInit,
    /// Hydro-mode run length.
    pub t_final: f64,
    /// Hydro-mode grid snapshots.
    pub snapshot_times: Vec<f64>,
}

impl Default for HydroSpec {
    fn default() -> Self {
        let c = HydroConfig::default();
        HydroSpec {
            nx: 25,
            ny: 25,
            dt: c.dt,
            momentum_form: c.momentum_form,
            drag_mode: c.drag_mode,
            drag_value: None,
            gamma_samples: 100_000,
            density_floor: c.density_floor,
            initial: HydroInit::default(),
            initial_velocity: HydroVelocityInit::default(),
            t_final: 10.0,
            snapshot_times: vec![0.0, 5.0, 10.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSpec {
    pub times: Vec<f64>,
}

impl Default for CompareSpec {
    fn default() -> Self {
        CompareSpec {
            times: vec![0.0, 5.0, 10.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub mode: Mode,
    pub seed: u64,
    #[serde(default = "default_n_floes")]
    pub n_floes: usize,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub physics: PhysParams,
    #[serde(default)]
    pub floes: FloeSpec,
    #[serde(default)]
    pub ocean: OceanSpec,
    #[serde(default)]
    pub time: TimeSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub hydro: HydroSpec,
    #[serde(default)]
    pub compare: CompareSpec,
}

fn default_n_floes() -> usize {
    100
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn field_error(field: &str, e: FloeError) -> FloeError {
    let msg = match e {
        FloeError::InvalidArgument(m) | FloeError::Config(m) => m,
        other => other.to_string(),
    };
    FloeError::Config(format!("{field}: {msg}"))
}

fn check_times(field: &str, times: &[f64], t_final: f64) -> Result<()> {
    for w in times.windows(2) {
        if !(w[0] < w[1]) {
            return Err(FloeError::Config(format!("{field} must be strictly increasing")));
        }
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= t_final)) {
        return Err(FloeError::Config(format!(
            "{field} entry {t} lies outside [0, {t_final}]"
        )));
    }
    Ok(())
}

impl Scenario {
    /// Parses and validates TOML text; `path` labels error messages.
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| FloeError::Parse {
            path: path.to_path_buf(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FloeError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_floes == 0 {
            return Err(FloeError::Config("n_floes must be >= 1".into()));
        }
        Domain::new(self.domain.half_width).map_err(|e| field_error("domain.half_width", e))?;
        self.physics.validate().map_err(|e| field_error("physics", e))?;
        self.floes
            .radius
            .validate()
            .map_err(|e| field_error("floes.radius", e))?;
        self.floes
            .thickness
            .validate()
            .map_err(|e| field_error("floes.thickness", e))?;
        if let RadiusLaw::PowerLaw { r_max: Some(m), .. } = self.floes.radius {
            if 2.0 * m >= self.domain.half_width {
                return Err(FloeError::Config(format!(
                    "floes.radius.r_max = {m} must be below half the domain half-width"
                )));
            }
        }
        if let VelocityInit::OceanPlusUniform { spread } = self.floes.velocity {
            if !(spread >= 0.0 && spread.is_finite()) {
                return Err(FloeError::Config(format!(
                    "floes.velocity.spread = {spread} must be >= 0"
                )));
            }
        }
        if self.floes.max_attempts == 0 {
            return Err(FloeError::Config("floes.max_attempts must be >= 1".into()));
        }
        if let OceanSpec::Stochastic {
            mode_count,
            damping_base,
            damping_k2,
            forcing_scale,
            ..
        } = self.ocean
        {
            if mode_count == 0 || !(damping_base > 0.0) || !(damping_k2 >= 0.0) || !(forcing_scale >= 0.0) {
                return Err(FloeError::Config(
                    "ocean: stochastic needs mode_count >= 1, damping_base > 0, damping_k2 >= 0, forcing_scale >= 0"
                        .into(),
                ));
            }
        }
        self.step_config().map_err(|e| field_error("time", e))?;
        check_times("output.snapshot_times", &self.output.snapshot_times, self.time.t_final)?;
        let h = &self.hydro;
        if h.nx == 0 || h.ny == 0 {
            return Err(FloeError::Config("hydro.nx and hydro.ny must be >= 1".into()));
        }
        if h.gamma_samples == 0 {
            return Err(FloeError::Config("hydro.gamma_samples must be >= 1".into()));
        }
        if h.drag_mode == DragMode::Literal && h.drag_value.is_none() {
            return Err(FloeError::Config(
                "hydro.drag_value is required when hydro.drag_mode = \"literal\"".into(),
            ));
        }
        HydroConfig {
            dt: h.dt,
            momentum_form: h.momentum_form,
            drag_mode: h.drag_mode,
            drag_value: h.drag_value.unwrap_or(0.0),
            density_floor: h.density_floor,
        }
        .validate()
        .map_err(|e| field_error("hydro", e))?;
        if let HydroInit::Uniform { value } = h.initial {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(FloeError::Config(format!("hydro.initial.value = {value} must be >= 0")));
            }
        }
        if !(h.t_final >= 0.0 && h.t_final.is_finite()) {
            return Err(FloeError::Config(format!("hydro.t_final = {} must be >= 0", h.t_final)));
        }
        check_times("hydro.snapshot_times", &h.snapshot_times, h.t_final)?;
        if self.compare.times.is_empty() {
            return Err(FloeError::Config("compare.times must not be empty".into()));
        }
        check_times("compare.times", &self.compare.times, f64::INFINITY)?;
        if self.mode == Mode::Compare {
            if self.compare.times[0] != 0.0 {
                return Err(FloeError::Config("compare.times must start at 0".into()));
            }
            self.compare_step_config()
                .map_err(|e| field_error("compare.times", e))?;
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        Domain::new(self.domain.half_width).expect("validated domain")
    }

    pub fn step_config(&self) -> Result<StepConfig> {
        StepConfig::new(self.time.dt, self.time.t_final, self.output.record_every)
    }

    /// Particle stepping for compare mode: runs to the last comparison time.
    pub fn compare_step_config(&self) -> Result<StepConfig> {
        let t_end = *self.compare.times.last().expect("non-empty compare.times");
        StepConfig::new(self.time.dt, t_end, self.output.record_every)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Builds the ocean field at time zero.
    pub fn ocean_field(&self) -> Result<OceanField> {
        Ok(match &self.ocean {
            OceanSpec::Constant { u } => OceanField::Constant(Vec2::new(u[0], u[1])),
            OceanSpec::Vortex => OceanField::Vortex,
            OceanSpec::QuadraticChannel => OceanField::QuadraticChannel,
            OceanSpec::Stochastic {
                mode_count,
                damping_base,
                damping_k2,
                forcing_scale,
                init,
                state_file,
            } => {
                let spec = FourierSpectrum {
                    mode_count: *mode_count,
                    damping_base: *damping_base,
                    damping_k2: *damping_k2,
                    forcing_scale: *forcing_scale,
                };
                let mut rng = self.rng(STREAM_OCEAN);
                let state = match (state_file, init) {
                    (Some(p), _) => {
                        let text = std::fs::read_to_string(p).map_err(|e| FloeError::io(p, e))?;
                        FourierOceanState::from_text(&text)?
                    }
                    (None, StochasticInit::Stationary) => FourierOceanState::stationary(&spec, &mut rng)?,
                    (None, StochasticInit::Quiescent) => FourierOceanState::quiescent(&spec)?,
                };
                OceanField::Stochastic(StochasticOcean { state, rng })
            }
        })
    }

    /// Samples radii, thicknesses, positions and velocities.
    pub fn build_ensemble(&self, ocean: &OceanField) -> Result<Ensemble> {
        let mut rng = self.rng(STREAM_FLOES);
        let n = self.n_floes;
        let radii: Vec<f64> = (0..n).map(|_| self.floes.radius.sample(&mut rng)).collect();
        let thick: Vec<f64> = (0..n).map(|_| self.floes.thickness.sample(&mut rng)).collect();
        let domain = self.domain();
        let placement = place_floes(&radii, &domain, &mut rng, self.floes.max_attempts)?;
        let mut floes = Vec::with_capacity(n);
        for i in 0..n {
            let x = placement.positions[i];
            let v = match self.floes.velocity {
                VelocityInit::Zero => Vec2::zeros(),
                VelocityInit::Ocean => ocean.eval(&x),
                VelocityInit::OceanPlusUniform { spread } => {
                    let jitter = if spread > 0.0 {
                        use rand::Rng;
                        Vec2::new(rng.random_range(-spread..=spread), rng.random_range(-spread..=spread))
                    } else {
                        Vec2::zeros()
                    };
                    ocean.eval(&x) + jitter
                }
                VelocityInit::Constant { value } => Vec2::new(value[0], value[1]),
            };
            floes.push(Floe::new(radii[i], thick[i], x, v)?);
        }
        Ensemble::new(floes, domain, 0.0)
    }

    /// Mean-field drag rate: the configured value, else a seeded Monte Carlo
    /// mean of `alpha/m` over the floe laws.
    pub fn hydro_drag_value(&self) -> Result<f64> {
        match (self.hydro.drag_mode, self.hydro.drag_value) {
            (_, Some(v)) => Ok(v),
            (DragMode::MeanField, None) => {
                let mut rng = self.rng(STREAM_GAMMA);
                use rand::Rng;
                let seed = rng.random::<u64>();
                mean_field_gamma(
                    &self.floes.radius,
                    &self.floes.thickness,
                    &self.physics,
                    self.hydro.gamma_samples,
                    seed,
                )
            }
            (DragMode::Literal, None) => Err(FloeError::Config("hydro.drag_value missing".into())),
        }
    }

    pub fn hydro_config(&self, drag_value: f64) -> HydroConfig {
        HydroConfig {
            dt: self.hydro.dt,
            momentum_form: self.hydro.momentum_form,
            drag_mode: self.hydro.drag_mode,
            drag_value,
            density_floor: self.hydro.density_floor,
        }
    }

    /// The scenario as TOML with every default spelled out, plus derived
    /// quantities as trailing comments.
    pub fn effective_toml(&self, drag_value: Option<f64>) -> Result<String> {
        let mut text = toml::to_string_pretty(self)
            .map_err(|e| FloeError::Config(format!("cannot serialize effective config: {e}")))?;
        if let Some(g) = drag_value {
            let name = match self.hydro.drag_mode {
                DragMode::MeanField => "gamma_bar",
                DragMode::Literal => "alpha",
            };
            text.push_str(&format!("\n# derived: hydro {name} = {}\n", crate::output::fmt_f64(g)));
        }
        Ok(text)
    }
}
