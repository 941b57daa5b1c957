//! Discrete moments, balance-law residuals, relaxation metrics and grid
//! concentration.

use std::f64::consts::PI;

use crate::contact::{chi, find_contacts, pair_forces, pair_stiffness, sum_pair_forces, ContactPair};
use crate::error::{FloeError, Result};
use crate::integrator::drag_force;
use crate::model::{Ensemble, PhysParams, Vec2};
use crate::ocean::OceanField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub m0: f64,
    pub m1: Vec2,
    pub m2v: f64,
    pub m2x: f64,
    pub m2: f64,
}

/// Strain energy `(1/4n) sum_{i,j} kappa1 chi(delta)^2` over the given pairs
/// (each unordered pair stands for both orderings).
fn strain_energy(e: &Ensemble, pairs: &[ContactPair], p: &PhysParams) -> f64 {
    let n = e.len() as f64;
    pairs
        .iter()
        .map(|c| {
            let s = pair_stiffness(&e.floes[c.i], &e.floes[c.j], p);
            let d = chi(c.delta);
            s.kappa1 * d * d
        })
        .fold(0.0, |acc, x| acc + x)
        / (2.0 * n)
}

pub fn moments(e: &Ensemble, p: &PhysParams) -> Moments {
    moments_with_pairs(e, &find_contacts(e), p)
}

/// [`moments`] with the contact pairs of `e` already known.
pub fn moments_with_pairs(e: &Ensemble, pairs: &[ContactPair], p: &PhysParams) -> Moments {
    let mut m0 = 0.0;
    let mut m1 = Vec2::zeros();
    let mut m2v = 0.0;
    for f in &e.floes {
        let m = f.mass(p);
        m0 += m;
        m1 += f.v * m;
        m2v += 0.5 * m * f.v.norm_squared();
    }
    let m2x = strain_energy(e, pairs, p);
    Moments {
        m0,
        m1,
        m2v,
        m2x,
        m2: m2v + m2x,
    }
}

fn check_pair(e_l: &Ensemble, e_l1: &Ensemble, dt: f64) -> Result<()> {
    if e_l.len() != e_l1.len() {
        return Err(FloeError::invalid(format!(
            "residual needs matching ensembles, got {} and {} floes",
            e_l.len(),
            e_l1.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(FloeError::invalid(format!("dt = {dt} must be > 0")));
    }
    Ok(())
}

/// `dM1/dt - sum_i alpha_i (U_i - V_i)|U_i - V_i|` for one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumResidual {
    pub residual: Vec2,
    /// Magnitude scale of the summed terms; the round-off floor is about
    /// `f64::EPSILON * scale`.
    pub scale: f64,
}

impl MomentumResidual {
    pub fn relative(&self) -> f64 {
        relative(self.residual.norm(), self.scale)
    }
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// Momentum balance of a step `e_l -> e_l1`; `ocean` must be the field at `t_l`.
pub fn momentum_residual(
    e_l: &Ensemble,
    e_l1: &Ensemble,
    dt: f64,
    ocean: &OceanField,
    p: &PhysParams,
) -> Result<MomentumResidual> {
    check_pair(e_l, e_l1, dt)?;
    let mut lhs = Vec2::zeros();
    let mut rhs = Vec2::zeros();
    let mut scale = 0.0;
    for (a, b) in e_l.floes.iter().zip(&e_l1.floes) {
        let m = a.mass(p);
        lhs += (b.v - a.v) * (m / dt);
        let drag = drag_force(a.drag(p), &ocean.eval(&a.x), &a.v);
        rhs += drag;
        scale += m * (a.v.norm() + b.v.norm()) / dt + drag.norm();
    }
    Ok(MomentumResidual {
        residual: lhs - rhs,
        scale,
    })
}

/// Energy balance of a step.
///
/// `residual` compares the discrete energy rate, the kinetic part taken
/// from the velocity difference and the strain part as its exact one-sided
/// derivative along the Euler position update, with the three-term right
/// hand side (damping, O(dt) velocity-increment work, symmetrized drag
/// work). It vanishes to round-off for an exact Euler step.
///
/// `defect` uses the plain difference quotient of the strain energy
/// instead; it differs from `residual` by an O(dt) truncation term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyResidual {
    pub residual: f64,
    pub scale: f64,
    pub defect: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl EnergyResidual {
    pub fn relative(&self) -> f64 {
        relative(self.residual.abs(), self.scale)
    }
}

pub fn energy_residual(
    e_l: &Ensemble,
    e_l1: &Ensemble,
    dt: f64,
    ocean: &OceanField,
    p: &PhysParams,
) -> Result<EnergyResidual> {
    energy_residual_with_pairs(e_l, &find_contacts(e_l), e_l1, &find_contacts(e_l1), dt, ocean, p)
}

/// [`energy_residual`] with the contact pairs of both states already known.
pub fn energy_residual_with_pairs(
    e_l: &Ensemble,
    pairs: &[ContactPair],
    e_l1: &Ensemble,
    pairs_l1: &[ContactPair],
    dt: f64,
    ocean: &OceanField,
    p: &PhysParams,
) -> Result<EnergyResidual> {
    check_pair(e_l, e_l1, dt)?;
    let n = e_l.len() as f64;

    let mut kinetic_rate = 0.0;
    let mut kinetic_scale = 0.0;
    let mut drag_work = 0.0;
    let mut drag_scale = 0.0;
    for (a, b) in e_l.floes.iter().zip(&e_l1.floes) {
        let m = a.mass(p);
        kinetic_rate += 0.5 * m * (b.v.norm_squared() - a.v.norm_squared()) / dt;
        kinetic_scale += 0.5 * m * (b.v.norm_squared() + a.v.norm_squared()) / dt;
        let drag = drag_force(a.drag(p), &ocean.eval(&a.x), &a.v);
        let w = 0.5 * drag.dot(&(b.v + a.v));
        drag_work += w;
        drag_scale += 0.5 * drag.norm() * (b.v.norm() + a.v.norm());
    }

    let forces = pair_forces(e_l, pairs, p);
    let sums = sum_pair_forces(e_l.len(), pairs, &forces);

    let mut strain_rate = 0.0;
    let mut damping = 0.0;
    let mut pair_scale = 0.0;
    for c in pairs {
        let (fi, fj) = (&e_l.floes[c.i], &e_l.floes[c.j]);
        let s = pair_stiffness(fi, fj, p);
        let closing = (fj.v - fi.v).dot(&c.normal);
        strain_rate += s.kappa1 * c.delta * closing / n;
        let rate = (fi.v - fj.v).dot(&c.normal);
        damping += s.kappa2 * rate * rate / n;
        pair_scale += (s.kappa1 * c.delta * closing).abs() / n + (s.kappa2 * rate * rate).abs() / n;
    }

    let mut increment_work = 0.0;
    let mut increment_scale = 0.0;
    for ((a, b), f) in e_l.floes.iter().zip(&e_l1.floes).zip(&sums) {
        let dv = b.v - a.v;
        increment_work += f.dot(&dv) / (2.0 * n);
        increment_scale += f.norm() * dv.norm() / (2.0 * n);
    }

    let lhs = kinetic_rate + strain_rate;
    let rhs = damping + increment_work + drag_work;
    let scale = kinetic_scale + pair_scale + increment_scale + drag_scale;

    let strain_after = strain_energy(e_l1, pairs_l1, p);
    let strain_before = strain_energy(e_l, pairs, p);
    let defect = kinetic_rate + (strain_after - strain_before) / dt - rhs;

    Ok(EnergyResidual {
        residual: lhs - rhs,
        scale,
        defect,
        lhs,
        rhs,
    })
}

/// `sum_j |v_j - u_o(x_j)|^2`.
pub fn velocity_mismatch(e: &Ensemble, ocean: &OceanField) -> f64 {
    e.floes.iter().map(|f| (f.v - ocean.eval(&f.x)).norm_squared()).sum()
}

/// Constants `(A0, A1)` of the drag-free energy lower bound
/// `M2(t) >= M2(0) e^{-A0 t} + (A1/A0)|M1(0)|^2 (1 - e^{-A0 t})`:
/// `A0 = 2 max|kappa2| / min m`, `A1 = max|kappa2| / (n M0^2)`, the maximum
/// running over all floe pairs.
pub fn energy_bound_constants(e: &Ensemble, p: &PhysParams) -> (f64, f64) {
    let n = e.len();
    let mut k2max: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let s = pair_stiffness(&e.floes[i], &e.floes[j], p);
            k2max = k2max.max(s.kappa2.abs());
        }
    }
    let m_min = e.floes.iter().map(|f| f.mass(p)).fold(f64::INFINITY, f64::min);
    let m0: f64 = e.floes.iter().map(|f| f.mass(p)).sum();
    (2.0 * k2max / m_min, k2max / (n as f64 * m0 * m0))
}

pub fn energy_lower_bound(initial: &Moments, a0: f64, a1: f64, t: f64) -> f64 {
    if a0 == 0.0 {
        return initial.m2;
    }
    let decay = (-a0 * t).exp();
    initial.m2 * decay + a1 / a0 * initial.m1.norm_squared() * (1.0 - decay)
}

/// Running maxima of the per-step residuals.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResidualTracker {
    pub momentum_max: f64,
    pub energy_max: f64,
    pub momentum_relative_max: f64,
    pub energy_relative_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub moments: Moments,
    /// Norm of the momentum residual of the step that produced this state.
    pub momentum_residual: f64,
    pub momentum_relative: f64,
    pub energy_residual: f64,
    pub energy_relative: f64,
    pub energy_defect: f64,
    pub velocity_mismatch: f64,
    pub running: ResidualTracker,
}

impl DiagnosticsRecord {
    /// Record for a state not produced by a step (residuals zero).
    pub fn at_rest(e: &Ensemble, ocean: &OceanField, p: &PhysParams, tracker: &ResidualTracker) -> Self {
        Self::at_rest_with_pairs(e, &find_contacts(e), ocean, p, tracker)
    }

    pub fn at_rest_with_pairs(
        e: &Ensemble,
        pairs: &[ContactPair],
        ocean: &OceanField,
        p: &PhysParams,
        tracker: &ResidualTracker,
    ) -> Self {
        DiagnosticsRecord {
            t: e.t,
            moments: moments_with_pairs(e, pairs, p),
            momentum_residual: 0.0,
            momentum_relative: 0.0,
            energy_residual: 0.0,
            energy_relative: 0.0,
            energy_defect: 0.0,
            velocity_mismatch: velocity_mismatch(e, ocean),
            running: *tracker,
        }
    }
}

/// Residuals of the step `e_l -> e_l1` folded into `tracker`, plus the
/// moments of `e_l1`. `ocean` is the field at `t_l`; the velocity mismatch
/// uses the same field.
pub fn step_record(
    e_l: &Ensemble,
    e_l1: &Ensemble,
    dt: f64,
    ocean: &OceanField,
    p: &PhysParams,
    tracker: &mut ResidualTracker,
) -> Result<DiagnosticsRecord> {
    step_record_with_pairs(
        e_l,
        &find_contacts(e_l),
        e_l1,
        &find_contacts(e_l1),
        dt,
        ocean,
        p,
        tracker,
    )
}

/// [`step_record`] with the contact pairs of both states already known.
#[allow(clippy::too_many_arguments)]
pub fn step_record_with_pairs(
    e_l: &Ensemble,
    pairs: &[ContactPair],
    e_l1: &Ensemble,
    pairs_l1: &[ContactPair],
    dt: f64,
    ocean: &OceanField,
    p: &PhysParams,
    tracker: &mut ResidualTracker,
) -> Result<DiagnosticsRecord> {
    let mom = momentum_residual(e_l, e_l1, dt, ocean, p)?;
    let en = energy_residual_with_pairs(e_l, pairs, e_l1, pairs_l1, dt, ocean, p)?;
    tracker.momentum_max = tracker.momentum_max.max(mom.residual.norm());
    tracker.energy_max = tracker.energy_max.max(en.residual.abs());
    tracker.momentum_relative_max = tracker.momentum_relative_max.max(mom.relative());
    tracker.energy_relative_max = tracker.energy_relative_max.max(en.relative());
    Ok(DiagnosticsRecord {
        t: e_l1.t,
        moments: moments_with_pairs(e_l1, pairs_l1, p),
        momentum_residual: mom.residual.norm(),
        momentum_relative: mom.relative(),
        energy_residual: en.residual.abs(),
        energy_relative: en.relative(),
        energy_defect: en.defect,
        velocity_mismatch: velocity_mismatch(e_l1, ocean),
        running: *tracker,
    })
}

/// Per-cell area fraction on a uniform `nx x ny` grid over the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationGrid {
    pub nx: usize,
    pub ny: usize,
    pub half_width: f64,
    /// Row-major, `values[j * nx + i]` with `i` along x and `j` along y.
    pub values: Vec<f64>,
}

impl ConcentrationGrid {
    pub fn zeros(nx: usize, ny: usize, half_width: f64) -> Self {
        ConcentrationGrid {
            nx,
            ny,
            half_width,
            values: vec![0.0; nx * ny],
        }
    }

    pub fn cell_area(&self) -> f64 {
        let w = 2.0 * self.half_width;
        (w / self.nx as f64) * (w / self.ny as f64)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// `sum_cells value * cell_area`.
    pub fn total_area(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }
}

const SUBSAMPLES: usize = 16;

/// Distributes each disc's area over the cells containing a 16x16 lattice of
/// sample points in its bounding box; points inside the disc share the area
/// equally.
pub fn grid_concentration(e: &Ensemble, nx: usize, ny: usize) -> Result<ConcentrationGrid> {
    if nx == 0 || ny == 0 {
        return Err(FloeError::invalid(format!("grid size {nx}x{ny} must be at least 1x1")));
    }
    let l = e.domain.half_width;
    let mut grid = ConcentrationGrid::zeros(nx, ny, l);
    let (dx, dy) = (2.0 * l / nx as f64, 2.0 * l / ny as f64);
    let cell_index = |c: f64, h: f64, n: usize| -> usize {
        let w = 2.0 * l;
        let wrapped = c - w * ((c + l) / w).floor();
        ((((wrapped + l) / h).floor()).max(0.0) as usize).min(n - 1)
    };
    let mut inside = Vec::with_capacity(SUBSAMPLES * SUBSAMPLES);
    let mut area = vec![0.0; nx * ny];
    for f in &e.floes {
        inside.clear();
        let step = 2.0 * f.r / SUBSAMPLES as f64;
        for b in 0..SUBSAMPLES {
            let oy = -f.r + (b as f64 + 0.5) * step;
            for a in 0..SUBSAMPLES {
                let ox = -f.r + (a as f64 + 0.5) * step;
                if ox * ox + oy * oy <= f.r * f.r {
                    let i = cell_index(f.x.x + ox, dx, nx);
                    let j = cell_index(f.x.y + oy, dy, ny);
                    inside.push(j * nx + i);
                }
            }
        }
        let share = PI * f.r * f.r / inside.len() as f64;
        for &idx in &inside {
            area[idx] += share;
        }
    }
    let cell_area = grid.cell_area();
    for (v, a) in grid.values.iter_mut().zip(&area) {
        *v = a / cell_area;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::contact_stiffness;
    use crate::model::{Domain, Floe};
    use approx::assert_relative_eq;

    fn ens(floes: Vec<Floe>) -> Ensemble {
        Ensemble::new(floes, Domain::default(), 0.0).unwrap()
    }

    #[test]
    fn moments_single_floe() {
        // mass 2 from rho_ice = 2 / (pi r^2 h) with r = h = 1
        let p = PhysParams {
            rho_ice: 2.0 / PI,
            ..PhysParams::default()
        };
        let e = ens(vec![Floe::new(1.0, 1.0, Vec2::zeros(), Vec2::new(1.0, 0.0)).unwrap()]);
        let m = moments(&e, &p);
        assert_relative_eq!(m.m0, 2.0, max_relative = 1e-15);
        assert_relative_eq!(m.m1.x, 2.0, max_relative = 1e-15);
        assert_relative_eq!(m.m2v, 1.0, max_relative = 1e-15);
        assert_eq!(m.m2x, 0.0);
        assert_eq!(m.m2, m.m2v);
    }

    #[test]
    fn strain_energy_of_overlapping_pair() {
        let p = PhysParams::default();
        let a = Floe::new(1.0, 1.0, Vec2::zeros(), Vec2::zeros()).unwrap();
        let b = Floe::new(1.0, 1.0, Vec2::new(1.5, 0.0), Vec2::zeros()).unwrap();
        let m = moments(&ens(vec![a, b]), &p);
        let k1 = contact_stiffness(1.0, 1.0, 1.0, 1.0, &p).unwrap().kappa1;
        assert_relative_eq!(m.m2x, k1 * 0.25 * 2.0 / 8.0, max_relative = 1e-14);
        assert_relative_eq!(m.m2x, 4.90874, max_relative = 1e-5);
        let c = Floe::new(1.0, 1.0, Vec2::new(2.5, 0.0), Vec2::zeros()).unwrap();
        assert_eq!(moments(&ens(vec![a, c]), &p).m2x, 0.0);
    }

    #[test]
    fn mismatch_examples() {
        let u = Vec2::new(0.5, 0.0);
        let ocean = OceanField::Constant(u);
        let e = ens(vec![Floe::new(0.1, 0.1, Vec2::zeros(), Vec2::zeros()).unwrap()]);
        assert_relative_eq!(velocity_mismatch(&e, &ocean), 0.25);
        let e = ens(vec![
            Floe::new(0.1, 0.1, Vec2::new(1.0, 2.0), Vec2::new(0.1, 0.2)).unwrap()
        ]);
        let x = e.floes[0].x;
        let field = OceanField::Vortex;
        let mut matched = e.clone();
        matched.floes[0].v = field.eval(&x);
        assert_eq!(velocity_mismatch(&matched, &field), 0.0);
    }

    #[test]
    fn residual_rejects_mismatched_sizes() {
        let p = PhysParams::default();
        let f = Floe::new(0.1, 0.1, Vec2::zeros(), Vec2::zeros()).unwrap();
        let g = Floe::new(0.1, 0.1, Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        let ocean = OceanField::Constant(Vec2::zeros());
        assert!(momentum_residual(&ens(vec![f]), &ens(vec![f, g]), 0.1, &ocean, &p).is_err());
        assert!(energy_residual(&ens(vec![f]), &ens(vec![f, g]), 0.1, &ocean, &p).is_err());
    }

    #[test]
    fn corrupted_step_is_detected() {
        let p = PhysParams::default();
        let ocean = OceanField::Constant(Vec2::new(0.5, 0.0));
        let e = ens(vec![
            Floe::new(0.3, 0.5, Vec2::zeros(), Vec2::new(0.2, 0.0)).unwrap(),
            Floe::new(0.3, 0.5, Vec2::new(0.5, 0.1), Vec2::new(-0.2, 0.0)).unwrap(),
        ]);
        let dt = 1e-3;
        let good = crate::integrator::step_forward_euler(&e, dt, &ocean, &p, 0).unwrap();
        let r = momentum_residual(&e, &good, dt, &ocean, &p).unwrap();
        assert!(r.relative() < 1e-13, "{}", r.relative());
        let mut bad = good.clone();
        bad.floes[0].v.x += 1e-6;
        let r = momentum_residual(&e, &bad, dt, &ocean, &p).unwrap();
        assert!(r.relative() > 1e-8);
        let en = energy_residual(&e, &bad, dt, &ocean, &p).unwrap();
        assert!(en.relative() > 1e-8);
    }

    #[test]
    fn drag_free_contact_free_momentum_is_exact() {
        let p = PhysParams::default().without_drag();
        let ocean = OceanField::Constant(Vec2::new(0.5, 0.0));
        let e = ens(vec![
            Floe::new(0.1, 0.5, Vec2::zeros(), Vec2::new(0.2, 0.0)).unwrap(),
            Floe::new(0.1, 0.5, Vec2::new(1.5, 0.1), Vec2::new(-0.2, 0.3)).unwrap(),
        ]);
        let next = crate::integrator::step_forward_euler(&e, 0.01, &ocean, &p, 0).unwrap();
        let r = momentum_residual(&e, &next, 0.01, &ocean, &p).unwrap();
        assert_eq!(r.residual, Vec2::zeros());
    }

    #[test]
    fn static_ensemble_energy_terms_vanish() {
        let p = PhysParams::default();
        let ocean = OceanField::Constant(Vec2::zeros());
        let e = ens(vec![
            Floe::new(0.1, 0.5, Vec2::zeros(), Vec2::zeros()).unwrap(),
            Floe::new(0.1, 0.5, Vec2::new(1.5, 0.1), Vec2::zeros()).unwrap(),
        ]);
        let next = crate::integrator::step_forward_euler(&e, 0.01, &ocean, &p, 0).unwrap();
        let r = energy_residual(&e, &next, 0.01, &ocean, &p).unwrap();
        assert_eq!((r.lhs, r.rhs, r.residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bound_constants_are_positive() {
        let p = PhysParams::default();
        let e = ens(vec![
            Floe::new(0.1, 0.5, Vec2::zeros(), Vec2::new(1.0, 0.0)).unwrap(),
            Floe::new(0.2, 0.3, Vec2::new(1.5, 0.1), Vec2::zeros()).unwrap(),
        ]);
        let (a0, a1) = energy_bound_constants(&e, &p);
        assert!(a0 > 0.0 && a1 > 0.0);
        let m = moments(&e, &p);
        assert_relative_eq!(energy_lower_bound(&m, a0, a1, 0.0), m.m2);
        let late = energy_lower_bound(&m, a0, a1, 1e3);
        assert_relative_eq!(late, a1 / a0 * m.m1.norm_squared(), max_relative = 1e-12);
    }

    #[test]
    fn concentration_single_cell() {
        let n = 25;
        let l = PI;
        let h = 2.0 * l / n as f64;
        // centre of cell (12, 7)
        let x = Vec2::new(-l + 12.5 * h, -l + 7.5 * h);
        let e = ens(vec![Floe::new(0.1, 0.1, x, Vec2::zeros()).unwrap()]);
        let g = grid_concentration(&e, n, n).unwrap();
        let expect = PI * 0.01 / (h * h);
        assert_relative_eq!(expect, 0.49736, max_relative = 1e-4);
        for j in 0..n {
            for i in 0..n {
                let v = g.get(i, j);
                if (i, j) == (12, 7) {
                    assert_relative_eq!(v, expect, max_relative = 1e-13);
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
        assert!(grid_concentration(&e, 0, 3).is_err());
    }

    #[test]
    fn concentration_straddling_splits_evenly() {
        let n = 25;
        let h = 2.0 * PI / n as f64;
        // on the boundary between cells 3 and 4 along x, centred in y
        let x = Vec2::new(-PI + 4.0 * h, -PI + 10.5 * h);
        let e = ens(vec![Floe::new(0.1, 0.1, x, Vec2::zeros()).unwrap()]);
        let g = grid_concentration(&e, n, n).unwrap();
        let (a, b) = (g.get(3, 10), g.get(4, 10));
        let total = PI * 0.01 / (h * h);
        assert!((a - b).abs() * (h * h) <= 0.02 * PI * 0.01);
        assert_relative_eq!(a + b, total, max_relative = 1e-12);
    }

    #[test]
    fn concentration_wraps_across_boundary() {
        let e = ens(vec![Floe::new(0.2, 0.1, Vec2::new(-PI, -PI), Vec2::zeros()).unwrap()]);
        let g = grid_concentration(&e, 10, 10).unwrap();
        let corners = g.get(0, 0) + g.get(9, 0) + g.get(0, 9) + g.get(9, 9);
        assert_relative_eq!(corners * g.cell_area(), PI * 0.04, max_relative = 1e-12);
        assert!(g.get(0, 0) > 0.0 && g.get(9, 9) > 0.0);
    }
}
