//! Floe state, physical parameters and periodic-domain geometry.
//!
//! Positions are stored wrapped into `[-L, L)^2` and every pairwise quantity
//! is computed with the minimum-image displacement.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{FloeError, Result};

pub type Vec2 = Vector2<f64>;

/// Material and drag constants shared by every floe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysParams {
    /// Ice density.
    pub rho_ice: f64,
    /// Ocean density.
    pub rho_o: f64,
    /// Ocean vertical (form) drag coefficient.
    pub c_vo: f64,
    /// Ocean horizontal (skin) drag coefficient.
    pub c_ho: f64,
    /// Effective contact modulus.
    pub e_e: f64,
    /// Restitution coefficient.
    pub e_r: f64,
    /// Draft as a fraction of thickness.
    pub draft_factor: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            rho_ice: 0.9,
            rho_o: 1.0,
            c_vo: 0.1,
            c_ho: 0.05,
            e_e: 100.0,
            e_r: 0.15,
            draft_factor: 0.9,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, field: &str, value: f64, rule: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(FloeError::invalid(format!("{field} = {value} violates {rule}")))
            }
        }
        check(self.rho_ice > 0.0, "rho_ice", self.rho_ice, "rho_ice > 0")?;
        check(self.rho_o > 0.0, "rho_o", self.rho_o, "rho_o > 0")?;
        check(self.c_vo >= 0.0, "c_vo", self.c_vo, "c_vo >= 0")?;
        check(self.c_ho >= 0.0, "c_ho", self.c_ho, "c_ho >= 0")?;
        check(self.e_e > 0.0, "e_e", self.e_e, "e_e > 0")?;
        // e_r = 0 would make the damping factor ln(e_r)/... undefined.
        check(self.e_r > 0.0 && self.e_r < 1.0, "e_r", self.e_r, "0 < e_r < 1")?;
        check(
            self.draft_factor > 0.0 && self.draft_factor <= 1.0,
            "draft_factor",
            self.draft_factor,
            "0 < draft_factor <= 1",
        )?;
        Ok(())
    }

    /// Same parameters with both ocean drag coefficients zeroed.
    pub fn without_drag(mut self) -> Self {
        self.c_vo = 0.0;
        self.c_ho = 0.0;
        self
    }
}

/// Doubly periodic square `[-half_width, half_width)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub half_width: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain { half_width: PI }
    }
}

impl Domain {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(FloeError::invalid(format!(
                "half_width = {half_width} must be positive and finite"
            )));
        }
        Ok(Domain { half_width })
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn area(&self) -> f64 {
        self.width() * self.width()
    }

    fn wrap_scalar(&self, x: f64) -> f64 {
        let l = self.half_width;
        let w = 2.0 * l;
        let mut y = x - w * ((x + l) / w).floor();
        // floor() can leave y one rounding step outside the half-open interval
        if y >= l {
            y -= w;
        }
        if y < -l {
            y += w;
        }
        y
    }

    pub fn contains(&self, x: &Vec2) -> bool {
        let l = self.half_width;
        x.iter().all(|c| *c >= -l && *c < l)
    }
}

/// Map a point into the domain by whole-period shifts.
pub fn wrap_position(x: &Vec2, d: &Domain) -> Result<Vec2> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(FloeError::invalid(format!(
            "cannot wrap non-finite position ({}, {})",
            x.x, x.y
        )));
    }
    Ok(Vec2::new(d.wrap_scalar(x.x), d.wrap_scalar(x.y)))
}

/// Shortest periodic representative of `xj - xi`.
pub fn min_image_displacement(xi: &Vec2, xj: &Vec2, d: &Domain) -> Vec2 {
    let diff = xj - xi;
    Vec2::new(d.wrap_scalar(diff.x), d.wrap_scalar(diff.y))
}

fn check_size(r: f64, h: f64) -> Result<()> {
    if !(r > 0.0) || !(h > 0.0) {
        return Err(FloeError::invalid(format!(
            "floe radius and thickness must be positive (r = {r}, h = {h})"
        )));
    }
    Ok(())
}

/// Mass of a cylindrical floe, `rho_ice * pi * r^2 * h`.
pub fn floe_mass(r: f64, h: f64, p: &PhysParams) -> Result<f64> {
    check_size(r, h)?;
    Ok(p.rho_ice * PI * r * r * h)
}

/// Quadratic ocean drag coefficient `pi rho_o (2 C_vo r D + C_ho r^2)`, with
/// draft `D = draft_factor * h`.
pub fn drag_coefficient(r: f64, h: f64, p: &PhysParams) -> Result<f64> {
    check_size(r, h)?;
    let draft = p.draft_factor * h;
    Ok(PI * p.rho_o * (2.0 * p.c_vo * r * draft + p.c_ho * r * r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Floe {
    pub r: f64,
    pub h: f64,
    pub x: Vec2,
    pub v: Vec2,
}

impl Floe {
    pub fn new(r: f64, h: f64, x: Vec2, v: Vec2) -> Result<Self> {
        check_size(r, h)?;
        Ok(Floe { r, h, x, v })
    }

    pub fn mass(&self, p: &PhysParams) -> f64 {
        p.rho_ice * PI * self.r * self.r * self.h
    }

    pub fn drag(&self, p: &PhysParams) -> f64 {
        let draft = p.draft_factor * self.h;
        PI * p.rho_o * (2.0 * p.c_vo * self.r * draft + p.c_ho * self.r * self.r)
    }

    pub fn area(&self) -> f64 {
        PI * self.r * self.r
    }
}

/// One snapshot of the particle system.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub floes: Vec<Floe>,
    pub domain: Domain,
    pub t: f64,
}

impl Ensemble {
    /// Builds an ensemble, wrapping every position into the domain.
    pub fn new(mut floes: Vec<Floe>, domain: Domain, t: f64) -> Result<Self> {
        if floes.is_empty() {
            return Err(FloeError::invalid("an ensemble needs at least one floe"));
        }
        for f in &mut floes {
            check_size(f.r, f.h)?;
            f.x = wrap_position(&f.x, &domain)?;
        }
        Ok(Ensemble { floes, domain, t })
    }

    pub fn len(&self) -> usize {
        self.floes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.floes.is_empty()
    }

    pub fn max_radius(&self) -> f64 {
        self.floes.iter().map(|f| f.r).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mass_examples() {
        let p = PhysParams::default();
        assert_relative_eq!(floe_mass(0.1, 0.02, &p).unwrap(), 0.9 * PI * 0.01 * 0.02);
        assert_relative_eq!(floe_mass(0.1, 0.02, &p).unwrap(), 5.65487e-4, max_relative = 1e-5);
        let unit = PhysParams { rho_ice: 1.0, ..p };
        assert_relative_eq!(floe_mass(1.0, 1.0, &unit).unwrap(), PI);
        assert!(floe_mass(1e-9, 3.0, &p).unwrap() < 1e-16);
        assert!(floe_mass(0.0, 1.0, &p).is_err());
        assert!(floe_mass(1.0, -1.0, &p).is_err());
    }

    #[test]
    fn drag_examples() {
        let p = PhysParams {
            rho_o: 1.0,
            c_vo: 0.1,
            c_ho: 0.05,
            draft_factor: 0.9,
            ..PhysParams::default()
        };
        assert_relative_eq!(
            drag_coefficient(0.1, 0.02, &p).unwrap(),
            2.70177e-3,
            max_relative = 1e-5
        );
        let q = PhysParams {
            c_vo: 0.5,
            c_ho: 1.0,
            ..p
        };
        assert_relative_eq!(drag_coefficient(1.0, 1.0, &q).unwrap(), 5.96903, max_relative = 1e-5);
        assert_eq!(drag_coefficient(0.3, 0.1, &p.without_drag()).unwrap(), 0.0);
        assert!(drag_coefficient(-0.1, 0.1, &p).is_err());
    }

    #[test]
    fn wrap_examples() {
        let d = Domain::default();
        let w = wrap_position(&Vec2::new(PI + 0.1, 0.0), &d).unwrap();
        assert_relative_eq!(w.x, -PI + 0.1, epsilon = 1e-14);
        assert_eq!(w.y, 0.0);
        assert_eq!(wrap_position(&Vec2::new(0.5, -0.5), &d).unwrap(), Vec2::new(0.5, -0.5));
        let z = wrap_position(&Vec2::new(2.0 * PI, 2.0 * PI), &d).unwrap();
        assert_relative_eq!(z.norm(), 0.0, epsilon = 1e-15);
        assert!(wrap_position(&Vec2::new(f64::NAN, 0.0), &d).is_err());
        // upper edge maps to the lower edge
        assert_eq!(wrap_position(&Vec2::new(PI, 0.0), &d).unwrap().x, -PI);
    }

    #[test]
    fn min_image_examples() {
        let d = Domain::default();
        let m = min_image_displacement(&Vec2::new(PI - 0.1, 0.0), &Vec2::new(-PI + 0.1, 0.0), &d);
        assert_relative_eq!(m.x, 0.2, epsilon = 1e-14);
        assert_eq!(m.y, 0.0);
        let a = Vec2::new(0.3, -1.2);
        assert_eq!(min_image_displacement(&a, &a, &d), Vec2::zeros());
        assert_eq!(
            min_image_displacement(&Vec2::zeros(), &Vec2::new(1.0, 1.0), &d),
            Vec2::new(1.0, 1.0)
        );
    }

    #[test]
    fn ensemble_rejects_empty() {
        assert!(Ensemble::new(vec![], Domain::default(), 0.0).is_err());
    }

    #[test]
    fn params_validation_names_field() {
        let bad = PhysParams {
            e_r: 1.2,
            ..PhysParams::default()
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("e_r"), "{msg}");
        assert!(PhysParams::default().validate().is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn wrap_is_idempotent(x in -100.0f64..100.0, y in -100.0f64..100.0, l in 0.1f64..10.0) {
                let d = Domain::new(l).unwrap();
                let once = wrap_position(&Vec2::new(x, y), &d).unwrap();
                prop_assert!(d.contains(&once));
                let twice = wrap_position(&once, &d).unwrap();
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn min_image_is_antisymmetric(
                ax in -PI..PI, ay in -PI..PI,
                bx in -PI..PI, by in -PI..PI,
            ) {
                let d = Domain::default();
                let a = Vec2::new(ax, ay);
                let b = Vec2::new(bx, by);
                let ab = min_image_displacement(&a, &b, &d);
                let ba = min_image_displacement(&b, &a, &d);
                let back = wrap_position(&(-ba), &d).unwrap();
                prop_assert!((ab - back).norm() < 1e-12);
                prop_assert!(d.contains(&ab));
            }

            #[test]
            fn mass_and_drag_scale(r in 0.01f64..2.0, h in 0.01f64..2.0, lam in 0.1f64..5.0) {
                let p = PhysParams::default();
                let m1 = floe_mass(r, h, &p).unwrap();
                let m2 = floe_mass(lam * r, h, &p).unwrap();
                prop_assert!((m2 - lam * lam * m1).abs() <= 1e-12 * m2);
                // both drag terms are degree 2 in (r, h) jointly
                let a1 = drag_coefficient(r, h, &p).unwrap();
                let a2 = drag_coefficient(lam * r, lam * h, &p).unwrap();
                prop_assert!((a2 - lam * lam * a1).abs() <= 1e-12 * a2);
            }
        }
    }
}
