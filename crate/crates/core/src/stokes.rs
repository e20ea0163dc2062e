//! Both sides of the space-time Stokes identity
//! `∮ A_μ dx^μ = ½ ∬ F_{μν} dx^μ ∧ dx^ν` for the solenoid.
//!
//! The surface side is computed two ways. The numeric route multiplies the
//! field-strength components by the wedge measures of the patch and hands the
//! product to [`integrate_2d`]. The semi-analytic route integrates the electric
//! part by parts in `ρ` region by region, leaving one-dimensional boundary
//! terms in `B̃(ρ, φ) = B(F(ρ)f(φ))` plus the interior `∫ρB̃` pieces that are
//! supposed to cancel against the magnetic flux term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{FieldStrength, FourPotential, SolenoidField};
use crate::geometry::{sector_wedge, winding_number, Sector, Segment, SpacetimePath, SurfacePatch, WedgeMeasures};
use crate::quadrature::{integrate_1d, integrate_2d_split, level_crossings, riemann_oracle, IntegralResult, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePart {
    Electric,
    Magnetic,
    Both,
}

impl SurfacePart {
    fn density(self, f: &FieldStrength, w: &WedgeMeasures) -> f64 {
        let electric = || f.f0x() * w.tx + f.f0y() * w.ty + f.f0z() * w.tz;
        let magnetic = || f.fxy() * w.xy + f.fyz() * w.yz + f.fzx() * w.zx;
        match self {
            SurfacePart::Electric => electric(),
            SurfacePart::Magnetic => magnetic(),
            SurfacePart::Both => electric() + magnetic(),
        }
    }
}

/// `A_μ dx^μ/ds = A⁰ dt/ds − A·dx/ds` along one segment.
pub fn segment_integrand<'a, P: FourPotential>(potential: &'a P, segment: &'a Segment) -> impl Fn(f64) -> f64 + 'a {
    move |s| {
        let ev = segment.event_at(s);
        let [dt, dx, dy, dz] = segment.tangent(s);
        let a = potential.vector(&ev);
        potential.scalar(&ev) * dt - (a.x * dx + a.y * dy + a.z * dz)
    }
}

/// `∮ A_μ dx^μ` (without the `−e` of the phase) along `path`.
///
/// Each segment is split where it crosses the potential's radial and time
/// breakpoints.
pub fn line_integral<P: FourPotential>(potential: &P, path: &SpacetimePath, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let radii = potential.radial_breakpoints();
    let times = potential.time_breakpoints();
    path.segments().iter().try_fold(IntegralResult::zero(), |acc, seg| {
        let (s0, s1) = seg.parameter_range();
        let (lo, hi) = (s0.min(s1), s0.max(s1));
        let mut seg_cfg = cfg.clone();
        if let Segment::Radial { .. } = seg {
            seg_cfg.breakpoints.extend(&radii);
        }
        seg_cfg.breakpoints.extend(level_crossings(|s| seg.event_at(s).t, lo, hi, &times));
        Ok(acc.combine(integrate_1d(segment_integrand(potential, seg), s0, s1, &seg_cfg)?))
    })
}

/// Midpoint-rule evaluation of the same line integral with `n` panels per
/// segment.
pub fn line_integral_oracle<P: FourPotential>(potential: &P, path: &SpacetimePath, n: usize) -> f64 {
    path.segments()
        .iter()
        .map(|seg| {
            let (s0, s1) = seg.parameter_range();
            riemann_oracle(segment_integrand(potential, seg), s0, s1, n)
        })
        .sum()
}

fn surface_cfg(field: &SolenoidField, cfg: &QuadratureConfig) -> QuadratureConfig {
    let mut c = cfg.clone();
    c.breakpoints.push(field.radius());
    c
}

// Where the surface time `F(ρ)f(φ)` meets a kink of the flux profile the
// integrands lose smoothness along a curve in the (ρ, φ) plane.
struct KinkCurves<'a> {
    sector: &'a Sector,
    times: Vec<f64>,
}

impl<'a> KinkCurves<'a> {
    fn new(field: &SolenoidField, sector: &'a Sector) -> Self {
        KinkCurves { sector, times: field.profile().kinks() }
    }

    fn radii_at(&self, phi: f64, (lo, hi): (f64, f64)) -> Vec<f64> {
        level_crossings(|rho| self.sector.time(rho, phi), lo, hi, &self.times)
    }

    fn angles_at(&self, rho: f64, (lo, hi): (f64, f64)) -> Vec<f64> {
        level_crossings(|phi| self.sector.time(rho, phi), lo, hi, &self.times)
    }

    /// Angles where a curve enters or leaves the band `rho_edges`.
    fn angles_on(&self, rho_edges: &[f64], phi_range: (f64, f64)) -> Vec<f64> {
        rho_edges.iter().flat_map(|&r| self.angles_at(r, phi_range)).collect()
    }

    fn radii_on(&self, phi_edges: &[f64], rho_range: (f64, f64)) -> Vec<f64> {
        phi_edges.iter().flat_map(|&p| self.radii_at(p, rho_range)).collect()
    }
}

/// `∫dφ ∫dρ f` over one sector with the solenoid wall and the kink curves as
/// breakpoints.
fn sector_integral_rho_inner(
    field: &SolenoidField,
    sector: &Sector,
    rho_range: (f64, f64),
    phi_range: (f64, f64),
    cfg: &QuadratureConfig,
    f: impl FnMut(f64, f64) -> f64,
) -> Result<IntegralResult> {
    let kinks = KinkCurves::new(field, sector);
    let wall = field.radius().clamp(rho_range.0, rho_range.1);
    let mut c = surface_cfg(field, cfg);
    c.outer_breakpoints.extend(kinks.angles_on(&[rho_range.0, wall, rho_range.1], phi_range));
    integrate_2d_split(f, rho_range, phi_range, &c, |phi| kinks.radii_at(phi, rho_range))
}

/// Numeric surface integral of the requested part, one result per angular
/// sector.
pub fn surface_integral_sectors(
    field: &SolenoidField,
    patch: &SurfacePatch,
    part: SurfacePart,
    cfg: &QuadratureConfig,
) -> Result<Vec<IntegralResult>> {
    let rho_range = (patch.rho_inner(), patch.rho_outer());
    patch
        .sectors()
        .into_iter()
        .map(|(lo, hi, sector)| {
            sector_integral_rho_inner(field, sector, rho_range, (lo, hi), cfg, |rho, phi| {
                let ev = crate::fields::Event::polar(sector.time(rho, phi), rho, phi);
                part.density(&field.field_strength(&ev), &sector_wedge(sector, rho, phi))
            })
        })
        .collect()
}

pub fn surface_integral(field: &SolenoidField, patch: &SurfacePatch, part: SurfacePart, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    Ok(surface_integral_sectors(field, patch, part, cfg)?
        .into_iter()
        .fold(IntegralResult::zero(), IntegralResult::combine))
}

/// One region of the electric-field reduction.
#[derive(Debug, Clone, Serialize)]
pub struct RegionValue {
    /// `i`..`iv`: odd regions are inside the solenoid, even ones outside.
    pub label: String,
    pub sector: usize,
    pub rho_range: (f64, f64),
    /// One-dimensional `B̃` boundary terms left by the integration by parts.
    pub boundary_terms: IntegralResult,
    /// `∫dφ ∫ρ B̃ dρ`, present only inside the solenoid.
    pub interior_term: IntegralResult,
    pub value: IntegralResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemianalyticBreakdown {
    pub electric_regions: Vec<RegionValue>,
    /// `−∫ρ dρ ∫ B̃ dφ` per sector, integrated with `φ` inner.
    pub magnetic_sectors: Vec<IntegralResult>,
    pub electric_total: IntegralResult,
    pub magnetic_total: IntegralResult,
    pub total: IntegralResult,
    /// The closed form left after the interior terms cancel:
    /// `Σ ∫dφ [−w(ρ₀)B̃(ρ₀, φ) + w(ρ₁)B̃(ρ₁, φ)]` with `w(ρ) = min(ρ, R)²/2`.
    pub boundary_closed_form: IntegralResult,
}

impl SemianalyticBreakdown {
    pub fn interior_terms(&self) -> impl Iterator<Item = &IntegralResult> {
        self.electric_regions.iter().map(|r| &r.interior_term)
    }
}

const REGION_LABELS: [[&str; 2]; 2] = [["i", "ii"], ["iii", "iv"]];

/// Which one-dimensional `φ` integral of the reduction a [`BoundaryIntegral`]
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTarget {
    /// Boundary terms of the region at this index of `electric_regions`.
    Region(usize),
    /// One sector's share of `boundary_closed_form`.
    ClosedForm,
}

/// A one-dimensional integrand of the semi-analytic reduction over `[lo, hi]`.
pub struct BoundaryIntegral<'a> {
    pub target: BoundaryTarget,
    pub lo: f64,
    pub hi: f64,
    /// Angles where the integrand has a kink.
    pub breakpoints: Vec<f64>,
    pub integrand: Box<dyn Fn(f64) -> f64 + 'a>,
}

struct RegionPlan<'a> {
    label: &'static str,
    sector_index: usize,
    sector: &'a Sector,
    rho_range: (f64, f64),
    phi_range: (f64, f64),
    interior: bool,
}

fn region_plan<'a>(field: &SolenoidField, patch: &'a SurfacePatch) -> Vec<RegionPlan<'a>> {
    let (rho0, rho1) = (patch.rho_outer(), patch.rho_inner());
    let wall = field.radius().clamp(rho1, rho0);
    let mut plan = Vec::new();
    for (k, (lo, hi, sector)) in patch.sectors().into_iter().enumerate() {
        let mut push = |label, rho_range, interior| {
            plan.push(RegionPlan { label, sector_index: k, sector, rho_range, phi_range: (lo, hi), interior })
        };
        if wall > rho1 {
            push(REGION_LABELS[k][0], (rho1, wall), true);
        }
        if rho0 > wall {
            push(REGION_LABELS[k][1], (wall, rho0), false);
        }
    }
    plan
}

/// Every one-dimensional integral entering [`surface_integral_semianalytic`],
/// with its integrand, so it can be cross-checked independently.
pub fn semianalytic_boundary_integrals<'a>(field: &'a SolenoidField, patch: &'a SurfacePatch) -> Vec<BoundaryIntegral<'a>> {
    let big_r = field.radius();
    let half_sq = move |r: f64| 0.5 * r.min(big_r) * r.min(big_r);
    let b_tilde = move |sector: &Sector, rho: f64, phi: f64| field.profile().eval_b(sector.time(rho, phi));
    let mut out: Vec<BoundaryIntegral<'a>> = region_plan(field, patch)
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            let (inner, outer) = r.rho_range;
            let sector = r.sector;
            // inside: −(s²/2)B̃(s) + (ρ₁²/2)B̃(ρ₁); outside: (R²/2)(B̃(s) − B̃(ρ₀))
            let (w_out, w_in) = if r.interior { (half_sq(outer), half_sq(inner)) } else { (half_sq(big_r), half_sq(big_r)) };
            BoundaryIntegral {
                target: BoundaryTarget::Region(index),
                lo: r.phi_range.0,
                hi: r.phi_range.1,
                breakpoints: KinkCurves::new(field, sector).angles_on(&[inner, outer], r.phi_range),
                integrand: Box::new(move |phi| -w_out * b_tilde(sector, outer, phi) + w_in * b_tilde(sector, inner, phi)),
            }
        })
        .collect();
    let (rho0, rho1) = (patch.rho_outer(), patch.rho_inner());
    let (w0, w1) = (half_sq(rho0), half_sq(rho1));
    for (lo, hi, sector) in patch.sectors() {
        out.push(BoundaryIntegral {
            target: BoundaryTarget::ClosedForm,
            lo,
            hi,
            breakpoints: KinkCurves::new(field, sector).angles_on(&[rho1, rho0], (lo, hi)),
            integrand: Box::new(move |phi| -w0 * b_tilde(sector, rho0, phi) + w1 * b_tilde(sector, rho1, phi)),
        });
    }
    out
}

/// Region-by-region reduction of the surface integral.
///
/// Works for encircling patches and for annular sectors with any inner
/// radius; the solenoid wall splits each sector into an inner and an outer
/// region.
pub fn surface_integral_semianalytic(field: &SolenoidField, patch: &SurfacePatch, cfg: &QuadratureConfig) -> Result<SemianalyticBreakdown> {
    let profile = field.profile();
    let b_tilde = |sector: &Sector, rho: f64, phi: f64| profile.eval_b(sector.time(rho, phi));

    let plan = region_plan(field, patch);
    let mut boundary = vec![IntegralResult::zero(); plan.len()];
    let mut closed_form = IntegralResult::zero();
    for b in semianalytic_boundary_integrals(field, patch) {
        let mut c = cfg.clone();
        c.breakpoints.extend(&b.breakpoints);
        let r = integrate_1d(&b.integrand, b.lo, b.hi, &c)?;
        match b.target {
            BoundaryTarget::Region(k) => boundary[k] = r,
            BoundaryTarget::ClosedForm => closed_form = closed_form.combine(r),
        }
    }

    let mut regions = Vec::with_capacity(plan.len());
    let mut magnetic_sectors = vec![IntegralResult::zero(); patch.sectors().len()];
    for (r, boundary_terms) in plan.iter().zip(boundary) {
        let interior_term = if r.interior {
            let sector = r.sector;
            let interior = sector_integral_rho_inner(field, sector, r.rho_range, r.phi_range, cfg, |rho, phi| {
                rho * b_tilde(sector, rho, phi)
            })?;
            // same integrand in the other order, φ inner
            let kinks = KinkCurves::new(field, sector);
            let mut flux_cfg = cfg.clone();
            flux_cfg.outer_breakpoints.extend(kinks.radii_on(&[r.phi_range.0, r.phi_range.1], r.rho_range));
            let flux = integrate_2d_split(
                |phi, rho| rho * b_tilde(sector, rho, phi),
                r.phi_range,
                r.rho_range,
                &flux_cfg,
                |rho| kinks.angles_at(rho, r.phi_range),
            )?;
            magnetic_sectors[r.sector_index] = flux.negate();
            interior
        } else {
            IntegralResult::zero()
        };
        regions.push(RegionValue {
            label: r.label.into(),
            sector: r.sector_index,
            rho_range: r.rho_range,
            boundary_terms,
            interior_term,
            value: boundary_terms.combine(interior_term),
        });
    }
    let electric_total = regions.iter().map(|r| r.value).fold(IntegralResult::zero(), IntegralResult::combine);
    let magnetic_total = magnetic_sectors.iter().copied().fold(IntegralResult::zero(), IntegralResult::combine);
    Ok(SemianalyticBreakdown {
        electric_regions: regions,
        magnetic_sectors,
        electric_total,
        magnetic_total,
        total: electric_total.combine(magnetic_total),
        boundary_closed_form: closed_form,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StokesReport {
    pub winding_number: i64,
    pub line_value: IntegralResult,
    pub surface_value_numeric: IntegralResult,
    pub surface_value_semianalytic: IntegralResult,
    pub residual_line_vs_numeric: f64,
    pub residual_line_vs_semianalytic: f64,
    /// `|Σ interior ∫ρB̃ terms + numeric magnetic total|`.
    pub interior_cancellation_residual: f64,
    /// Largest magnitude among the terms entering the cancellation.
    pub interior_cancellation_scale: f64,
    pub electric_numeric: IntegralResult,
    pub magnetic_numeric: IntegralResult,
    pub electric_sectors_numeric: Vec<IntegralResult>,
    pub magnetic_sectors_numeric: Vec<IntegralResult>,
    pub semianalytic: SemianalyticBreakdown,
    pub converged: bool,
}

/// Evaluates both sides of the Stokes identity for `patch` and its boundary.
pub fn stokes_check(field: &SolenoidField, patch: &SurfacePatch, cfg: &QuadratureConfig) -> Result<StokesReport> {
    let boundary = patch.boundary()?;
    let winding = winding_number(&boundary)?;
    let line = line_integral(field, &boundary, cfg)?;
    let numeric = surface_integral(field, patch, SurfacePart::Both, cfg)?;
    let electric_sectors = surface_integral_sectors(field, patch, SurfacePart::Electric, cfg)?;
    let magnetic_sectors = surface_integral_sectors(field, patch, SurfacePart::Magnetic, cfg)?;
    let electric = electric_sectors.iter().copied().fold(IntegralResult::zero(), IntegralResult::combine);
    let magnetic = magnetic_sectors.iter().copied().fold(IntegralResult::zero(), IntegralResult::combine);
    let semi = surface_integral_semianalytic(field, patch, cfg)?;

    let interior_sum: f64 = semi.interior_terms().map(|r| r.value).sum::<f64>() + magnetic.value;
    let scale = semi
        .interior_terms()
        .map(|r| r.value.abs())
        .chain(magnetic_sectors.iter().map(|r| r.value.abs()))
        .fold(0.0, f64::max);

    let converged = [line, numeric, electric, magnetic, semi.total, semi.boundary_closed_form]
        .iter()
        .chain(semi.interior_terms())
        .all(|r| r.converged);
    Ok(StokesReport {
        winding_number: winding,
        line_value: line,
        surface_value_numeric: numeric,
        surface_value_semianalytic: semi.total,
        residual_line_vs_numeric: (line.value - numeric.value).abs(),
        residual_line_vs_semianalytic: (line.value - semi.total.value).abs(),
        interior_cancellation_residual: interior_sum.abs(),
        interior_cancellation_scale: scale,
        electric_numeric: electric,
        magnetic_numeric: magnetic,
        electric_sectors_numeric: electric_sectors,
        magnetic_sectors_numeric: magnetic_sectors,
        semianalytic: semi,
        converged,
    })
}

/// `∫_A A_μ dx^μ − ∫_B A_μ dx^μ` for two paths with common endpoints; this
/// is the difference of the path-dependent gauge functions built from them.
pub fn lambda_difference<P: FourPotential>(
    potential: &P,
    path_a: &SpacetimePath,
    path_b: &SpacetimePath,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    check_common_endpoints(path_a, path_b)?;
    let a = line_integral(potential, path_a, cfg)?;
    let b = line_integral(potential, path_b, cfg)?;
    Ok(a.combine(b.negate()))
}

pub(crate) fn check_common_endpoints(path_a: &SpacetimePath, path_b: &SpacetimePath) -> Result<()> {
    let start = path_a.start().max_abs_diff(&path_b.start());
    let end = path_a.end().max_abs_diff(&path_b.end());
    if start > 1e-10 || end > 1e-10 {
        return Err(Error::domain(format!(
            "paths must share start and end events (mismatch {start:e} at start, {end:e} at end)"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::FluxProfile;
    use crate::geometry::{make_arc_path, RadialProfile, RadialTime, TimeMap};
    use std::f64::consts::PI;

    fn tight() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-13, 1e-12)
    }

    fn encircling(omega: f64) -> SurfacePatch {
        let radial = RadialProfile::linear(2.0).unwrap();
        SurfacePatch::encircling(
            2.0,
            0.0,
            PI,
            Sector::new(TimeMap::uniform(omega, 0.0, 1.0), radial.clone()),
            Sector::new(TimeMap::uniform(omega, 2.0 * PI / omega, -1.0), radial),
        )
        .unwrap()
    }

    fn wedge(rho1: f64) -> SurfacePatch {
        let radial = RadialProfile::bump(2.0, rho1, 0.6).unwrap();
        SurfacePatch::annular_sector(2.0, rho1, 0.2, 2.3, Sector::new(TimeMap::uniform(1.0, 0.0, 1.0), radial)).unwrap()
    }

    #[test]
    fn narrow_sector_with_power_profile_converges() {
        // tolerances sit below roundoff for the inner radial integrals
        let field = SolenoidField::new(1.2169, FluxProfile::sinusoidal(0.4445, 5.527)).unwrap();
        let (phi_f, t_f, rho0) = (0.5, 3.934, 1.2169 + 0.4267);
        let radial = RadialProfile::power(rho0, 2.3277).unwrap();
        let lower = (2.0 * PI - phi_f) / t_f;
        let patch = SurfacePatch::encircling(
            rho0,
            0.0,
            phi_f,
            Sector::new(TimeMap::uniform(phi_f / t_f, 0.0, 1.0), radial.clone()),
            Sector::new(TimeMap::uniform(lower, 2.0 * PI / lower, -1.0), radial),
        )
        .unwrap();
        let r = stokes_check(&field, &patch, &QuadratureConfig::with_tolerances(1e-13, 1e-11)).unwrap();
        assert!(r.converged);
        assert!(r.residual_line_vs_numeric < 1e-12);
    }

    #[test]
    fn arc_line_integral_with_constant_flux() {
        let field = SolenoidField::new(1.0, FluxProfile::constant(2.0)).unwrap();
        let maps = [
            TimeMap::uniform(1.0, 0.0, 1.0),
            TimeMap::uniform(7.0, 3.0, -1.0),
            TimeMap::custom("cubic", |p: f64| p + 0.1 * p * p * p, |p: f64| 1.0 + 0.3 * p * p),
        ];
        for tmap in maps {
            let path = make_arc_path(2.0, 0.0, PI, tmap).unwrap();
            let r = line_integral(&field, &path, &tight()).unwrap();
            assert!((r.value + PI).abs() < 1e-12, "{}", r.value);
        }
    }

    #[test]
    fn arc_line_integral_matches_reduction() {
        // −(R²/2)∫B(t(φ))dφ computed directly
        let field = SolenoidField::new(1.0, FluxProfile::sinusoidal(1.0, 3.0)).unwrap();
        let tmap = TimeMap::uniform(0.7, 0.0, 1.0);
        let path = make_arc_path(2.5, 0.3, 2.9, tmap.clone()).unwrap();
        let r = line_integral(&field, &path, &tight()).unwrap();
        let reduced = integrate_1d(|phi| -0.5 * field.profile().eval_b(tmap.time(phi)), 0.3, 2.9, &tight()).unwrap();
        assert!((r.value - reduced.value).abs() < 1e-12);
    }

    #[test]
    fn radial_and_degenerate_segments_contribute_nothing() {
        let field = SolenoidField::new(1.0, FluxProfile::linear_ramp(1.0, 0.5)).unwrap();
        let radial = SpacetimePath::new(vec![Segment::radial(0.4, 0.0, 3.0, RadialTime::Constant(1.0))]).unwrap();
        assert!(line_integral(&field, &radial, &tight()).unwrap().value.abs() < 1e-15);
        let point = make_arc_path(2.0, 1.0, 1.0, TimeMap::uniform(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(line_integral(&field, &point, &tight()).unwrap(), IntegralResult::zero());
    }

    #[test]
    fn constant_flux_surface_parts() {
        let field = SolenoidField::new(1.0, FluxProfile::constant(2.0)).unwrap();
        let patch = encircling(1.0);
        let e = surface_integral(&field, &patch, SurfacePart::Electric, &tight()).unwrap();
        assert_eq!(e.value, 0.0);
        let m = surface_integral(&field, &patch, SurfacePart::Magnetic, &tight()).unwrap();
        assert!((m.value + 2.0 * PI).abs() < 1e-11, "{}", m.value);
    }

    #[test]
    fn both_is_sum_of_parts() {
        let field = SolenoidField::new(1.0, FluxProfile::linear_ramp(1.0, 0.5)).unwrap();
        let patch = encircling(2.0);
        let e = surface_integral(&field, &patch, SurfacePart::Electric, &tight()).unwrap();
        let m = surface_integral(&field, &patch, SurfacePart::Magnetic, &tight()).unwrap();
        let b = surface_integral(&field, &patch, SurfacePart::Both, &tight()).unwrap();
        assert!((b.value - e.value - m.value).abs() < 1e-10);
    }

    #[test]
    fn non_encircling_magnetic_part_is_zero() {
        let field = SolenoidField::new(1.0, FluxProfile::linear_ramp(1.0, 0.5)).unwrap();
        let m = surface_integral(&field, &wedge(1.2), SurfacePart::Magnetic, &tight()).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn semianalytic_constant_flux() {
        let field = SolenoidField::new(1.0, FluxProfile::constant(2.0)).unwrap();
        let semi = surface_integral_semianalytic(&field, &encircling(1.0), &tight()).unwrap();
        let labels: Vec<_> = semi.electric_regions.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["i", "ii", "iii", "iv"]);
        assert!(semi.electric_regions[1].value.value.abs() < 1e-15);
        assert!((semi.total.value + 2.0 * PI).abs() < 1e-11);
        assert!((semi.boundary_closed_form.value + 2.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn interior_electric_term_cancels_magnetic_sector() {
        let field = SolenoidField::new(1.0, FluxProfile::linear_ramp(1.0, 0.5)).unwrap();
        let semi = surface_integral_semianalytic(&field, &encircling(1.0), &tight()).unwrap();
        let region_i = &semi.electric_regions[0];
        assert!((region_i.interior_term.value + semi.magnetic_sectors[0].value).abs() < 1e-11);
        let region_iii = &semi.electric_regions[2];
        assert!((region_iii.interior_term.value + semi.magnetic_sectors[1].value).abs() < 1e-11);
    }

    #[test]
    fn stokes_check_linear_ramp() {
        let field = SolenoidField::new(1.0, FluxProfile::linear_ramp(1.0, 0.5)).unwrap();
        let report = stokes_check(&field, &encircling(1.0), &tight()).unwrap();
        assert!(report.converged);
        assert_eq!(report.winding_number, 1);
        assert!(report.residual_line_vs_semianalytic <= 1e-9);
        assert!(report.residual_line_vs_numeric <= 1e-6);
        assert!(report.interior_cancellation_residual <= 1e-9 * (1.0 + report.interior_cancellation_scale));
    }

    #[test]
    fn stokes_check_wedges() {
        let field = SolenoidField::new(1.0, FluxProfile::sinusoidal(1.0, 2.0)).unwrap();
        // ρ₁ outside, inside and at the centre of the solenoid
        for rho1 in [1.2, 0.5] {
            let report = stokes_check(&field, &wedge(rho1), &tight()).unwrap();
            assert_eq!(report.winding_number, 0);
            assert!(report.residual_line_vs_semianalytic <= 1e-10, "{rho1}: {}", report.residual_line_vs_semianalytic);
            assert!(report.residual_line_vs_numeric <= 1e-8, "{rho1}: {}", report.residual_line_vs_numeric);
        }
        let radial = RadialProfile::linear(2.0).unwrap();
        let pie = SurfacePatch::annular_sector(2.0, 0.0, 0.2, 2.3, Sector::new(TimeMap::uniform(1.0, 0.0, 1.0), radial)).unwrap();
        let report = stokes_check(&field, &pie, &tight()).unwrap();
        assert!(report.residual_line_vs_semianalytic <= 1e-10);
        assert!(report.residual_line_vs_numeric <= 1e-8);
    }

    #[test]
    fn boundary_integrals_match_oracle() {
        let field = SolenoidField::new(1.0, FluxProfile::piecewise_ramp(1.0, 3.0, 0.5, 1.5).unwrap()).unwrap();
        for patch in [encircling(0.5), wedge(0.5)] {
            let semi = surface_integral_semianalytic(&field, &patch, &tight()).unwrap();
            let mut closed = 0.0;
            for b in semianalytic_boundary_integrals(&field, &patch) {
                let oracle = riemann_oracle(&b.integrand, b.lo, b.hi, 200_000);
                match b.target {
                    BoundaryTarget::Region(k) => {
                        let v = semi.electric_regions[k].boundary_terms.value;
                        assert!((v - oracle).abs() <= 1e-5 * (1.0 + v.abs()));
                    }
                    BoundaryTarget::ClosedForm => closed += oracle,
                }
            }
            assert!((semi.boundary_closed_form.value - closed).abs() <= 1e-5 * (1.0 + closed.abs()));
            let line = line_integral(&field, &patch.boundary().unwrap(), &tight()).unwrap().value;
            assert!((line - line_integral_oracle(&field, &patch.boundary().unwrap(), 200_000)).abs() <= 1e-5 * (1.0 + line.abs()));
        }
    }

    #[test]
    fn lambda_difference_examples() {
        let field = SolenoidField::new(1.0, FluxProfile::constant(1.5)).unwrap();
        let c1 = make_arc_path(2.0, 0.0, PI, TimeMap::uniform(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(lambda_difference(&field, &c1, &c1, &tight()).unwrap().value, 0.0);
        let c2 = make_arc_path(2.0, 0.0, -PI, TimeMap::uniform(1.0, 0.0, -1.0)).unwrap();
        let d = lambda_difference(&field, &c1, &c2, &tight()).unwrap();
        assert!((d.value + PI * 1.5).abs() < 1e-12);
        let elsewhere = make_arc_path(3.0, 0.0, PI, TimeMap::uniform(1.0, 0.0, 1.0)).unwrap();
        assert!(matches!(lambda_difference(&field, &c1, &elsewhere, &tight()), Err(Error::Domain(_))));
    }
}
