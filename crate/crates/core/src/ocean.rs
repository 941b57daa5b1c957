//! Prescribed ocean surface velocity fields.
//!
//! The ocean drags the floes; floes never feed back on the ocean.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{FloeError, Result};
use crate::model::Vec2;

pub const OCEAN_STATE_HEADER: &str = "# floeflow-ocean-v1";

pub fn eval_constant(u: &Vec2, _x: &Vec2) -> Vec2 {
    *u
}

/// Vortex ring `(-y s, x s)` with
/// `s = (x^2+y^2-4) exp(-(x^2+y^2)(x^2+y^2-8)/8) / 32`.
pub fn eval_vortex(x: f64, y: f64) -> Vec2 {
    let q = x * x + y * y;
    let s = (q - 4.0) * (-q * (q - 8.0) / 8.0).exp() / 32.0;
    Vec2::new(-y * s, x * s)
}

/// Rightward channel flow `(0.1 + 0.1 (x + pi)(pi - x), 0)`.
pub fn eval_quadratic_channel(x: f64, _y: f64) -> Vec2 {
    Vec2::new(0.1 + 0.1 * (x + PI) * (PI - x), 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierMode {
    pub k: [i32; 2],
    pub amplitude: Complex<f64>,
    pub damping: f64,
    pub forcing: f64,
}

impl FourierMode {
    /// Divergence-free unit direction `(-k_y, k_x)/|k|`.
    pub fn direction(&self) -> Vec2 {
        let (kx, ky) = (self.k[0] as f64, self.k[1] as f64);
        let norm = kx.hypot(ky);
        Vec2::new(-ky / norm, kx / norm)
    }

    pub fn stationary_variance(&self) -> f64 {
        self.forcing * self.forcing / (2.0 * self.damping)
    }
}

/// Linear stochastic (Ornstein-Uhlenbeck) Fourier-mode velocity field.
///
/// Only one wavevector of each conjugate pair is stored; the real part of
/// the synthesis sum supplies the conjugate partner.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierOceanState {
    pub modes: Vec<FourierMode>,
    pub time: f64,
}

/// Shape of the default mode set: damping `d0 + d1 |k|^2` and forcing
/// `s0 / (1 + |k|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierSpectrum {
    pub mode_count: usize,
    pub damping_base: f64,
    pub damping_k2: f64,
    pub forcing_scale: f64,
}

impl Default for FourierSpectrum {
    fn default() -> Self {
        FourierSpectrum {
            mode_count: 80,
            damping_base: 0.5,
            damping_k2: 0.1,
            forcing_scale: 0.1,
        }
    }
}

/// The `count` shortest wavevectors of the half plane `kx > 0 or (kx = 0, ky > 0)`.
pub fn half_plane_wavevectors(count: usize) -> Vec<[i32; 2]> {
    let mut radius = 1i32;
    loop {
        let mut ks = Vec::new();
        for kx in 0..=radius {
            for ky in -radius..=radius {
                if kx > 0 || ky > 0 {
                    ks.push([kx, ky]);
                }
            }
        }
        ks.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0], k[1]));
        // every vector shorter than `radius` is inside the box
        let inside = ks
            .iter()
            .filter(|k| k[0] * k[0] + k[1] * k[1] <= radius * radius)
            .count();
        if inside >= count {
            ks.truncate(count);
            return ks;
        }
        radius *= 2;
    }
}

impl FourierOceanState {
    /// Mode set from a spectrum with all amplitudes zero.
    pub fn quiescent(spec: &FourierSpectrum) -> Result<Self> {
        if spec.mode_count == 0 {
            return Err(FloeError::invalid("stochastic ocean needs at least one mode"));
        }
        if !(spec.damping_base > 0.0 && spec.damping_k2 >= 0.0 && spec.forcing_scale >= 0.0) {
            return Err(FloeError::invalid(
                "stochastic ocean needs damping_base > 0, damping_k2 >= 0, forcing_scale >= 0",
            ));
        }
        let modes = half_plane_wavevectors(spec.mode_count)
            .into_iter()
            .map(|k| {
                let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
                FourierMode {
                    k,
                    amplitude: Complex::new(0.0, 0.0),
                    damping: spec.damping_base + spec.damping_k2 * k2,
                    forcing: spec.forcing_scale / (1.0 + k2),
                }
            })
            .collect();
        Ok(FourierOceanState { modes, time: 0.0 })
    }

    /// Mode set with amplitudes drawn from the stationary distribution.
    pub fn stationary<R: Rng + ?Sized>(spec: &FourierSpectrum, rng: &mut R) -> Result<Self> {
        let mut s = Self::quiescent(spec)?;
        for m in &mut s.modes {
            let sd = m.stationary_variance().sqrt();
            m.amplitude = standard_complex_normal(rng) * sd;
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for m in &self.modes {
            if m.k == [0, 0] {
                return Err(FloeError::invalid("stochastic ocean mode with k = 0"));
            }
            if !(m.damping > 0.0) || !(m.forcing >= 0.0) {
                return Err(FloeError::invalid(format!(
                    "mode {:?}: damping must be > 0 and forcing >= 0",
                    m.k
                )));
            }
            if !(m.amplitude.re.is_finite() && m.amplitude.im.is_finite()) {
                return Err(FloeError::invalid(format!("mode {:?}: non-finite amplitude", m.k)));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{OCEAN_STATE_HEADER}");
        let _ = writeln!(s, "time,{}", self.time);
        let _ = writeln!(s, "kx,ky,re,im,damping,forcing");
        for m in &self.modes {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                m.k[0], m.k[1], m.amplitude.re, m.amplitude.im, m.damping, m.forcing
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, msg: &str| FloeError::invalid(format!("ocean state line {}: {msg}", line + 1));
        match lines.next() {
            Some((_, l)) if l.trim() == OCEAN_STATE_HEADER => {}
            _ => return Err(bad(0, "missing version header")),
        }
        let (ln, tline) = lines.next().ok_or_else(|| bad(1, "missing time"))?;
        let time = tline
            .strip_prefix("time,")
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| bad(ln, "expected `time,<value>`"))?;
        lines.next().ok_or_else(|| bad(2, "missing column header"))?;
        let mut modes = Vec::new();
        for (ln, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(bad(ln, "expected 6 fields"));
            }
            let int = |s: &str| s.trim().parse::<i32>().map_err(|_| bad(ln, "bad integer"));
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(ln, "bad number"));
            modes.push(FourierMode {
                k: [int(f[0])?, int(f[1])?],
                amplitude: Complex::new(num(f[2])?, num(f[3])?),
                damping: num(f[4])?,
                forcing: num(f[5])?,
            });
        }
        let s = FourierOceanState { modes, time };
        s.validate()?;
        Ok(s)
    }
}

fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Exact Ornstein-Uhlenbeck update of every mode over `dt`.
pub fn stochastic_step<R: Rng + ?Sized>(state: &FourierOceanState, dt: f64, rng: &mut R) -> Result<FourierOceanState> {
    if !(dt > 0.0) {
        return Err(FloeError::invalid(format!("dt = {dt} must be > 0")));
    }
    let mut next = state.clone();
    for m in &mut next.modes {
        let decay = (-m.damping * dt).exp();
        let noise_sd = m.forcing * ((1.0 - decay * decay) / (2.0 * m.damping)).sqrt();
        let xi = standard_complex_normal(rng);
        m.amplitude = m.amplitude * decay + xi * noise_sd;
    }
    next.time = state.time + dt;
    Ok(next)
}

/// Real-space synthesis `sum_k Re(a_k e^{i k.x}) psi_k`.
pub fn eval_stochastic(state: &FourierOceanState, x: &Vec2) -> Vec2 {
    let mut u = Vec2::zeros();
    for m in &state.modes {
        let phase = m.k[0] as f64 * x.x + m.k[1] as f64 * x.y;
        let (s, c) = phase.sin_cos();
        let re = m.amplitude.re * c - m.amplitude.im * s;
        u += m.direction() * re;
    }
    u
}

/// Stochastic field together with its private random stream.
#[derive(Clone, Debug)]
pub struct StochasticOcean {
    pub state: FourierOceanState,
    pub rng: ChaCha8Rng,
}

impl StochasticOcean {
    pub fn new(state: FourierOceanState, seed: u64) -> Self {
        StochasticOcean {
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

#[derive(Clone, Debug)]
// one field per run, so the size of the stochastic variant does not matter
#[allow(clippy::large_enum_variant)]
pub enum OceanField {
    Constant(Vec2),
    Vortex,
    QuadraticChannel,
    Stochastic(StochasticOcean),
}

impl OceanField {
    /// Velocity at `x` for the field's current time.
    pub fn eval(&self, x: &Vec2) -> Vec2 {
        match self {
            OceanField::Constant(u) => eval_constant(u, x),
            OceanField::Vortex => eval_vortex(x.x, x.y),
            OceanField::QuadraticChannel => eval_quadratic_channel(x.x, x.y),
            OceanField::Stochastic(s) => eval_stochastic(&s.state, x),
        }
    }

    /// Advances time-dependent fields by `dt`; a no-op for steady fields.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        if let OceanField::Stochastic(s) = self {
            s.state = stochastic_step(&s.state, dt, &mut s.rng)?;
        }
        Ok(())
    }

    pub fn is_steady(&self) -> bool {
        !matches!(self, OceanField::Stochastic(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            OceanField::Constant(_) => "constant",
            OceanField::Vortex => "vortex",
            OceanField::QuadraticChannel => "quadratic_channel",
            OceanField::Stochastic(_) => "stochastic",
        }
    }
}
