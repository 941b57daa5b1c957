//! Floe size (Pareto power law) and thickness (Gamma) laws, and
//! non-overlapping random placement of floes.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{FloeError, Result};
use crate::model::{min_image_displacement, Domain, Vec2};
use crate::neighbor::CellGrid;

/// Power-law size density `a kappa^a / r^(a+1)` supported on `[kappa, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawParams {
    pub a: f64,
    pub kappa: f64,
}

impl Default for PowerLawParams {
    fn default() -> Self {
        PowerLawParams { a: 2.0, kappa: 0.05 }
    }
}

impl PowerLawParams {
    pub fn new(a: f64, kappa: f64) -> Result<Self> {
        let p = PowerLawParams { a, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(FloeError::invalid(format!("power law a = {} must be > 0", self.a)));
        }
        if !(self.kappa > 0.0) {
            return Err(FloeError::invalid(format!(
                "power law kappa = {} must be > 0",
                self.kappa
            )));
        }
        Ok(())
    }

    /// Survival function `P(R > r)`.
    pub fn survival(&self, r: f64) -> f64 {
        if r <= self.kappa {
            1.0
        } else {
            (self.kappa / r).powf(self.a)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaParams {
    /// Shape.
    pub k: f64,
    /// Scale.
    pub theta: f64,
}

impl Default for GammaParams {
    fn default() -> Self {
        GammaParams { k: 2.0, theta: 0.5 }
    }
}

impl GammaParams {
    pub fn new(k: f64, theta: f64) -> Result<Self> {
        let p = GammaParams { k, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.theta > 0.0) {
            return Err(FloeError::invalid(format!(
                "gamma k = {} and theta = {} must both be > 0",
                self.k, self.theta
            )));
        }
        Ok(())
    }
}

pub fn pdf_power_law(r: f64, p: &PowerLawParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(FloeError::invalid(format!("radius r = {r} must be > 0")));
    }
    if r < p.kappa {
        return Ok(0.0);
    }
    Ok(p.a * p.kappa.powf(p.a) / r.powf(p.a + 1.0))
}

/// Uniform draw on `(0, 1]`.
fn unit_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Inverse-CDF map `kappa * u^(-1/a)` for `u` in `(0, 1]`.
pub fn power_law_quantile(u: f64, p: &PowerLawParams) -> f64 {
    p.kappa * u.powf(-1.0 / p.a)
}

pub fn sample_power_law<R: Rng + ?Sized>(p: &PowerLawParams, rng: &mut R) -> f64 {
    power_law_quantile(unit_open_closed(rng), p)
}

/// Power law conditioned on `r <= r_max` (inverse CDF of the truncated law).
pub fn sample_power_law_truncated<R: Rng + ?Sized>(p: &PowerLawParams, r_max: f64, rng: &mut R) -> f64 {
    let tail = p.survival(r_max);
    let u = unit_open_closed(rng);
    // u = 1 gives kappa, u -> 0 gives r_max
    let r = p.kappa * (tail + u * (1.0 - tail)).powf(-1.0 / p.a);
    r.clamp(p.kappa, r_max)
}

/// Gamma(k, theta) draw via the Marsaglia-Tsang squeeze method.
pub fn sample_gamma<R: Rng + ?Sized>(p: &GammaParams, rng: &mut R) -> f64 {
    let g = Gamma::new(p.k, p.theta).expect("validated gamma parameters");
    loop {
        let h = g.sample(rng);
        // can underflow to exactly zero for very small shapes
        if h > 0.0 {
            return h;
        }
    }
}

/// Radius law of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusLaw {
    /// Power law, optionally conditioned on `r <= r_max`.
    PowerLaw {
        a: f64,
        kappa: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_max: Option<f64>,
    },
    Constant {
        value: f64,
    },
}

impl Default for RadiusLaw {
    fn default() -> Self {
        let p = PowerLawParams::default();
        RadiusLaw::PowerLaw {
            a: p.a,
            kappa: p.kappa,
            r_max: None,
        }
    }
}

impl RadiusLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadiusLaw::PowerLaw { a, kappa, r_max } => {
                PowerLawParams::new(a, kappa)?;
                if let Some(m) = r_max {
                    if !(m > kappa && m.is_finite()) {
                        return Err(FloeError::invalid(format!(
                            "floes.radius.r_max = {m} must exceed kappa = {kappa}"
                        )));
                    }
                }
                Ok(())
            }
            RadiusLaw::Constant { value } if value > 0.0 && value.is_finite() => Ok(()),
            RadiusLaw::Constant { value } => {
                Err(FloeError::invalid(format!("floes.radius.value = {value} must be > 0")))
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadiusLaw::PowerLaw { a, kappa, r_max } => {
                let p = PowerLawParams { a, kappa };
                match r_max {
                    Some(m) => sample_power_law_truncated(&p, m, rng),
                    None => sample_power_law(&p, rng),
                }
            }
            RadiusLaw::Constant { value } => value,
        }
    }
}

/// Thickness law of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThicknessLaw {
    Gamma { k: f64, theta: f64 },
    Constant { value: f64 },
}

impl Default for ThicknessLaw {
    fn default() -> Self {
        let g = GammaParams::default();
        ThicknessLaw::Gamma { k: g.k, theta: g.theta }
    }
}

impl ThicknessLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThicknessLaw::Gamma { k, theta } => GammaParams::new(k, theta).map(|_| ()),
            ThicknessLaw::Constant { value } if value > 0.0 && value.is_finite() => Ok(()),
            ThicknessLaw::Constant { value } => Err(FloeError::invalid(format!(
                "floes.thickness.value = {value} must be > 0"
            ))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ThicknessLaw::Gamma { k, theta } => sample_gamma(&GammaParams { k, theta }, rng),
            ThicknessLaw::Constant { value } => value,
        }
    }
}

/// Result of random placement.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub positions: Vec<Vec2>,
    /// Set when some floe could not be placed without overlap.
    pub overlaps_permitted: bool,
}

fn uniform_point<R: Rng + ?Sized>(d: &Domain, rng: &mut R) -> Vec2 {
    let l = d.half_width;
    Vec2::new(rng.random_range(-l..l), rng.random_range(-l..l))
}

/// Uniform random positions, rejection-resampled so that no two discs
/// overlap under the minimum-image distance.
///
/// Floes are placed largest first. A floe that finds no free spot within
/// `max_attempts` draws is dropped at a uniform position and the returned
/// `overlaps_permitted` flag is raised.
pub fn place_floes<R: Rng + ?Sized>(radii: &[f64], d: &Domain, rng: &mut R, max_attempts: usize) -> Result<Placement> {
    if radii.is_empty() {
        return Err(FloeError::invalid("place_floes needs at least one radius"));
    }
    if let Some(bad) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(FloeError::invalid(format!("radius {bad} must be > 0")));
    }
    let disc_area: f64 = radii.iter().map(|r| PI * r * r).sum();
    if disc_area > d.area() {
        return Err(FloeError::InfeasiblePacking {
            disc_area,
            domain_area: d.area(),
        });
    }
    let r_max = radii.iter().copied().fold(0.0, f64::max);

    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]).then(a.cmp(&b)));

    let mut grid = CellGrid::new(d, 2.0 * r_max);
    let mut positions = vec![Vec2::zeros(); radii.len()];
    let mut overlaps_permitted = false;

    for &i in &order {
        let mut placed = None;
        for _ in 0..max_attempts.max(1) {
            let x = uniform_point(d, rng);
            let free = grid.candidates(&x).all(|j| {
                let dist = min_image_displacement(&x, &positions[j], d).norm();
                dist >= radii[i] + radii[j]
            });
            if free {
                placed = Some(x);
                break;
            }
        }
        let x = placed.unwrap_or_else(|| {
            overlaps_permitted = true;
            uniform_point(d, rng)
        });
        positions[i] = x;
        grid.insert(i, &x);
    }
    if overlaps_permitted {
        log::warn!("placement attempts exhausted; some floes start overlapping");
    }
    Ok(Placement {
        positions,
        overlaps_permitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pdf_examples() {
        let p = PowerLawParams::new(2.0, 0.05).unwrap();
        assert_relative_eq!(pdf_power_law(0.05, &p).unwrap(), 40.0, max_relative = 1e-12);
        assert_eq!(pdf_power_law(0.025, &p).unwrap(), 0.0);
        assert_relative_eq!(pdf_power_law(0.1, &p).unwrap(), 5.0, max_relative = 1e-12);
        assert!(pdf_power_law(0.0, &p).is_err());
        assert!(pdf_power_law(-1.0, &p).is_err());
    }

    #[test]
    fn pdf_normalizes() {
        // composite Simpson in log r: integrand a kappa^a r^-a after r dr = r d(ln r)
        let p = PowerLawParams::new(2.0, 0.05).unwrap();
        let big_r = 1e6 * p.kappa;
        let (lo, hi) = (p.kappa.ln(), big_r.ln());
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let f = |s: f64| {
            let r = s.exp();
            pdf_power_law(r, &p).unwrap() * r
        };
        let mut acc = f(lo) + f(hi);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + k as f64 * h);
        }
        let integral = acc * h / 3.0;
        let exact = 1.0 - (p.kappa / big_r).powf(p.a);
        assert!((integral - exact).abs() < 1e-10, "{integral} vs {exact}");
    }

    #[test]
    fn quantile_edge_is_kappa() {
        let p = PowerLawParams::default();
        assert_eq!(power_law_quantile(1.0, &p), p.kappa);
    }

    #[test]
    fn samplers_are_reproducible_and_bounded() {
        let p = PowerLawParams::default();
        let g = GammaParams::default();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (ra, rb) = (sample_power_law(&p, &mut a), sample_power_law(&p, &mut b));
            assert_eq!(ra.to_bits(), rb.to_bits());
            assert!(ra >= p.kappa);
            let (ha, hb) = (sample_gamma(&g, &mut a), sample_gamma(&g, &mut b));
            assert_eq!(ha.to_bits(), hb.to_bits());
            assert!(ha > 0.0);
            let t = sample_power_law_truncated(&p, 0.2, &mut a);
            let _ = sample_power_law_truncated(&p, 0.2, &mut b);
            assert!((p.kappa..=0.2).contains(&t));
        }
    }

    #[test]
    fn truncated_matches_conditional_survival() {
        let p = PowerLawParams::default();
        let r_max = 0.3;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let above = (0..n)
            .filter(|_| sample_power_law_truncated(&p, r_max, &mut rng) > 0.1)
            .count() as f64
            / n as f64;
        let expect = (p.survival(0.1) - p.survival(r_max)) / (1.0 - p.survival(r_max));
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((above - expect).abs() < 4.0 * se, "{above} vs {expect}");
    }

    #[test]
    fn gamma_exponential_tail() {
        let g = GammaParams::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let frac = (0..n).filter(|_| sample_gamma(&g, &mut rng) > 1.0).count() as f64 / n as f64;
        let expect = (-1.0f64).exp();
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((frac - expect).abs() < 3.0 * se, "{frac} vs {expect}");
    }

    #[test]
    fn pareto_survival_at_two_kappa() {
        let p = PowerLawParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let frac = (0..n)
            .filter(|_| sample_power_law(&p, &mut rng) > 2.0 * p.kappa)
            .count() as f64
            / n as f64;
        let se = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((frac - 0.25).abs() < 3.0 * se, "{frac}");
    }

    fn min_gap(pos: &[Vec2], radii: &[f64], d: &Domain) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                let dist = min_image_displacement(&pos[i], &pos[j], d).norm();
                gap = gap.min(dist - radii[i] - radii[j]);
            }
        }
        gap
    }

    #[test]
    fn placement_single_and_pair() {
        let d = Domain::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let one = place_floes(&[0.3], &d, &mut rng, 10).unwrap();
        assert_eq!(one.positions.len(), 1);
        assert!(d.contains(&one.positions[0]));
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let two = place_floes(&[1.0, 1.0], &d, &mut rng, 1000).unwrap();
            assert!(!two.overlaps_permitted);
            assert!(min_gap(&two.positions, &[1.0, 1.0], &d) >= 0.0);
        }
    }

    #[test]
    fn placement_hundred_power_law() {
        let d = Domain::default();
        let p = PowerLawParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let radii: Vec<f64> = (0..100)
            .map(|_| sample_power_law_truncated(&p, 0.5, &mut rng))
            .collect();
        let pl = place_floes(&radii, &d, &mut rng, 10_000).unwrap();
        assert!(!pl.overlaps_permitted);
        assert!(min_gap(&pl.positions, &radii, &d) >= 0.0);
    }

    #[test]
    fn placement_infeasible() {
        let d = Domain::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let radii = vec![1.0; 20];
        assert!(matches!(
            place_floes(&radii, &d, &mut rng, 10),
            Err(FloeError::InfeasiblePacking { .. })
        ));
    }

    #[test]
    fn placement_flags_exhaustion() {
        // 0.8 coverage of random sequential adsorption cannot be reached
        let d = Domain::default();
        let r = 0.5;
        let n = (0.8 * d.area() / (PI * r * r)) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pl = place_floes(&vec![r; n], &d, &mut rng, 50).unwrap();
        assert!(pl.overlaps_permitted);
    }
}
