//! Hertzian normal contact with restitution damping, and contact search on a
//! uniform periodic cell grid.

use std::f64::consts::PI;

use crate::error::{FloeError, Result};
use crate::model::{min_image_displacement, Domain, Ensemble, Floe, PhysParams, Vec2};
use crate::neighbor::CellGrid;

/// Below this centre distance the contact normal is undefined and the pair
/// exerts no force.
pub const EPS_POS: f64 = 1e-12;

/// Damping factor `ln(e_r) / sqrt(ln^2(e_r) + pi^2)`, in `(-1, 0)`.
pub fn beta(e_r: f64) -> Result<f64> {
    if !(e_r > 0.0 && e_r < 1.0) {
        return Err(FloeError::invalid(format!(
            "restitution coefficient e_r = {e_r} must lie in (0, 1)"
        )));
    }
    let l = e_r.ln();
    Ok(l / (l * l + PI * PI).sqrt())
}

/// Clamp to the contact window: `xi` when negative, zero otherwise.
pub fn chi(xi: f64) -> f64 {
    if xi < 0.0 {
        xi
    } else {
        0.0
    }
}

/// Geometry of a floe pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    /// Periodic centre distance minus the radius sum; negative in contact.
    pub delta: f64,
    /// Unit vector from floe i toward floe j; `None` for coincident centres.
    pub normal: Option<Vec2>,
}

impl Overlap {
    pub fn in_contact(&self) -> bool {
        self.delta < 0.0 && self.normal.is_some()
    }
}

pub fn overlap(xi: &Vec2, xj: &Vec2, ri: f64, rj: f64, d: &Domain) -> Overlap {
    let disp = min_image_displacement(xi, xj, d);
    let dist = disp.norm();
    Overlap {
        delta: dist - (ri + rj),
        normal: (dist >= EPS_POS).then(|| disp / dist),
    }
}

/// An interacting pair, `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactPair {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
    pub normal: Vec2,
}

impl ContactPair {
    pub fn from_overlap(i: usize, j: usize, o: &Overlap) -> Option<Self> {
        if !o.in_contact() {
            return None;
        }
        Some(ContactPair {
            i,
            j,
            delta: o.delta,
            normal: o.normal?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactStiffness {
    pub kappa1: f64,
    pub kappa2: f64,
    pub beta: f64,
}

/// `kappa1 = (pi/4) E h_e`, `kappa2 = beta sqrt((5 pi / 4) E h_e m_e)` with
/// `h_e = min(h_i, h_j)` and `m_e` the reduced mass.
pub fn contact_stiffness(hi: f64, hj: f64, mi: f64, mj: f64, p: &PhysParams) -> Result<ContactStiffness> {
    if !(hi > 0.0 && hj > 0.0 && mi > 0.0 && mj > 0.0) {
        return Err(FloeError::invalid(format!(
            "contact stiffness needs positive thicknesses and masses (h = {hi}, {hj}; m = {mi}, {mj})"
        )));
    }
    let b = beta(p.e_r)?;
    let h_e = hi.min(hj);
    let m_e = mi * mj / (mi + mj);
    let kappa1 = 0.25 * PI * p.e_e * h_e;
    let kappa2 = b * (1.25 * PI * p.e_e * h_e * m_e).sqrt();
    assert!(kappa2 < 0.0, "damping must be negative, got {kappa2}");
    Ok(ContactStiffness {
        kappa1,
        kappa2,
        beta: b,
    })
}

pub(crate) fn pair_stiffness(fi: &Floe, fj: &Floe, p: &PhysParams) -> ContactStiffness {
    contact_stiffness(fi.h, fj.h, fi.mass(p), fj.mass(p), p).expect("validated floes and parameters")
}

/// Force exerted on floe i by floe j: `(kappa1 delta + kappa2 (v_i - v_j).n) n`
/// inside the contact window, zero outside it.
pub fn contact_force(fi: &Floe, fj: &Floe, s: &ContactStiffness, delta: f64, normal: Option<Vec2>) -> Vec2 {
    match normal {
        Some(n) if delta < 0.0 => {
            let rate = (fi.v - fj.v).dot(&n);
            n * (s.kappa1 * delta + s.kappa2 * rate)
        }
        _ => Vec2::zeros(),
    }
}

/// Every pair in contact, ordered by `(i, j)`, found with a cell grid whose
/// cells are at least one maximum diameter wide.
pub fn find_contacts(e: &Ensemble) -> Vec<ContactPair> {
    let floes = &e.floes;
    let mut grid = CellGrid::new(&e.domain, 2.0 * e.max_radius());
    for (idx, f) in floes.iter().enumerate() {
        grid.insert(idx, &f.x);
    }
    let mut pairs = Vec::new();
    for (i, a) in floes.iter().enumerate() {
        for j in grid.candidates(&a.x) {
            if j <= i {
                continue;
            }
            let b = &floes[j];
            let o = overlap(&a.x, &b.x, a.r, b.r, &e.domain);
            if let Some(pair) = ContactPair::from_overlap(i, j, &o) {
                pairs.push(pair);
            }
        }
    }
    pairs.sort_unstable_by_key(|p| (p.i, p.j));
    pairs
}

/// Force on `i` from each contact pair (the force on `j` is its negative).
pub fn pair_forces(e: &Ensemble, pairs: &[ContactPair], p: &PhysParams) -> Vec<Vec2> {
    pairs
        .iter()
        .map(|c| {
            let (fi, fj) = (&e.floes[c.i], &e.floes[c.j]);
            contact_force(fi, fj, &pair_stiffness(fi, fj, p), c.delta, Some(c.normal))
        })
        .collect()
}

/// Unscaled per-floe contact sums `sum_j f^{ij}`.
pub fn sum_pair_forces(n: usize, pairs: &[ContactPair], forces: &[Vec2]) -> Vec<Vec2> {
    let mut sums = vec![Vec2::zeros(); n];
    for (c, f) in pairs.iter().zip(forces) {
        sums[c.i] += f;
        sums[c.j] -= f;
    }
    sums
}

pub fn assemble_contact_forces(e: &Ensemble, p: &PhysParams) -> Vec<Vec2> {
    let pairs = find_contacts(e);
    let forces = pair_forces(e, &pairs, p);
    sum_pair_forces(e.len(), &pairs, &forces)
}
