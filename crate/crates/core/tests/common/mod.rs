//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the contact or integrator modules.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::path::PathBuf;

use floeflow::scenario::Scenario;
use floeflow::{Ensemble, PhysParams, Vec2};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

/// Loads a bundled scenario with its output redirected to `out`.
pub fn bundled(name: &str, out: &std::path::Path) -> Scenario {
    let mut s = Scenario::load(&scenario_path(name)).expect("bundled scenario loads");
    s.output.dir = out.to_path_buf();
    s
}

pub fn mass(r: f64, h: f64, p: &PhysParams) -> f64 {
    p.rho_ice * PI * r * r * h
}

pub fn drag(r: f64, h: f64, p: &PhysParams) -> f64 {
    PI * p.rho_o * (2.0 * p.c_vo * r * (p.draft_factor * h) + p.c_ho * r * r)
}

/// `(kappa1, kappa2)` for a pair of floes `(r, h)`.
pub fn stiffness(a: (f64, f64), b: (f64, f64), p: &PhysParams) -> (f64, f64) {
    let l = p.e_r.ln();
    let beta = l / (l * l + PI * PI).sqrt();
    let he = a.1.min(b.1);
    let (ma, mb) = (mass(a.0, a.1, p), mass(b.0, b.1, p));
    let me = ma * mb / (ma + mb);
    (PI / 4.0 * p.e_e * he, beta * (5.0 * PI / 4.0 * p.e_e * he * me).sqrt())
}

fn min_image(d: f64, width: f64) -> f64 {
    d - width * (d / width).round()
}

/// Unscaled contact sums `sum_j f_ij` over every pair, no cell grid.
pub fn brute_contact_sums(e: &Ensemble, p: &PhysParams) -> Vec<Vec2> {
    let w = 2.0 * e.domain.half_width;
    let n = e.len();
    let mut out = vec![Vec2::zeros(); n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (&e.floes[i], &e.floes[j]);
            let dx = min_image(b.x.x - a.x.x, w);
            let dy = min_image(b.x.y - a.x.y, w);
            let dist = (dx * dx + dy * dy).sqrt();
            let delta = dist - a.r - b.r;
            if delta >= 0.0 || dist < 1e-12 {
                continue;
            }
            let nrm = Vec2::new(dx / dist, dy / dist);
            let (k1, k2) = stiffness((a.r, a.h), (b.r, b.h), p);
            out[i] += nrm * (k1 * delta + k2 * (a.v - b.v).dot(&nrm));
        }
    }
    out
}

/// Two floes on the x axis, positions and velocities as plain numbers, so
/// a step can be written out term by term.
#[derive(Clone, Copy, Debug)]
pub struct TwoBody {
    pub r: [f64; 2],
    pub h: [f64; 2],
    pub x: [f64; 2],
    pub v: [f64; 2],
}

/// Energy bookkeeping of one step, written out for two bodies.
#[derive(Clone, Copy, Debug)]
pub struct TwoBodyEnergy {
    /// Kinetic energy rate plus strain energy rate.
    pub lhs: f64,
    /// Damping plus increment work plus drag work.
    pub rhs: f64,
}

impl TwoBody {
    fn overlap(&self) -> f64 {
        (self.x[1] - self.x[0]) - self.r[0] - self.r[1]
    }

    /// Force on floe 0 along +x from the contact (already divided by n = 2),
    /// and the drag on each floe.
    fn forces(&self, u: f64, p: &PhysParams) -> (f64, [f64; 2]) {
        let delta = self.overlap();
        let (k1, k2) = stiffness((self.r[0], self.h[0]), (self.r[1], self.h[1]), p);
        let fc = if delta < 0.0 {
            (k1 * delta + k2 * (self.v[0] - self.v[1])) / 2.0
        } else {
            0.0
        };
        let fd = [0, 1].map(|i| {
            let rel = u - self.v[i];
            drag(self.r[i], self.h[i], p) * rel * rel.abs()
        });
        (fc, fd)
    }

    /// One forward Euler step in a uniform current `(u, 0)`.
    pub fn step(&self, dt: f64, u: f64, p: &PhysParams) -> TwoBody {
        let (fc, fd) = self.forces(u, p);
        let total = [fc + fd[0], -fc + fd[1]];
        let mut next = *self;
        for i in 0..2 {
            next.x[i] = self.x[i] + dt * self.v[i];
            next.v[i] = self.v[i] + dt * total[i] / mass(self.r[i], self.h[i], p);
        }
        next
    }

    /// Energy balance of the step `self -> next`. The strain rate is the
    /// derivative of `k1 delta^2 / 4` along the position update, evaluated
    /// at the start of the step.
    pub fn energy(&self, next: &TwoBody, dt: f64, u: f64, p: &PhysParams) -> TwoBodyEnergy {
        let (k1, k2) = stiffness((self.r[0], self.h[0]), (self.r[1], self.h[1]), p);
        let delta = self.overlap();
        let (fc, fd) = self.forces(u, p);
        let m = [0, 1].map(|i| mass(self.r[i], self.h[i], p));
        let dv = [next.v[0] - self.v[0], next.v[1] - self.v[1]];
        let kinetic: f64 = (0..2)
            .map(|i| 0.5 * m[i] * (next.v[i].powi(2) - self.v[i].powi(2)) / dt)
            .sum();
        let (strain, damping) = if delta < 0.0 {
            let w = self.v[0] - self.v[1];
            (k1 * delta * (-w) / 2.0, k2 * w * w / 2.0)
        } else {
            (0.0, 0.0)
        };
        let increment = 0.5 * (fc * dv[0] - fc * dv[1]);
        let drag_work: f64 = (0..2).map(|i| 0.5 * fd[i] * (next.v[i] + self.v[i])).sum();
        TwoBodyEnergy {
            lhs: kinetic + strain,
            rhs: damping + increment + drag_work,
        }
    }

    pub fn ensemble(&self, t: f64) -> Ensemble {
        let floes = (0..2)
            .map(|i| {
                floeflow::Floe::new(
                    self.r[i],
                    self.h[i],
                    Vec2::new(self.x[i], 0.0),
                    Vec2::new(self.v[i], 0.0),
                )
                .unwrap()
            })
            .collect();
        Ensemble::new(floes, floeflow::Domain::default(), t).unwrap()
    }
}
