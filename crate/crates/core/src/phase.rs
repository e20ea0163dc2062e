//! Observable phase shifts. `e` is always the charge magnitude; the particle
//! carries `−e`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::SolenoidField;
use crate::flux::{sinc, FluxProfile};
use crate::geometry::SpacetimePath;
use crate::quadrature::QuadratureConfig;
use crate::stokes::{check_common_endpoints, line_integral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMethod {
    TwoPathLineIntegral,
    AveragedFormula,
    SinusoidalFormula,
}

/// Endpoints and swept angle of one interferometer arm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    pub segments: usize,
    /// `[t, x, y, z]`
    pub start: [f64; 4],
    pub end: [f64; 4],
    pub angle_swept: f64,
}

impl PathSummary {
    pub fn of(path: &SpacetimePath) -> Self {
        let ev = |e: crate::fields::Event| [e.t, e.x, e.y, e.z];
        PathSummary {
            segments: path.segments().len(),
            start: ev(path.start()),
            end: ev(path.end()),
            angle_swept: path.angle_swept(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseInputs {
    pub charge: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<FluxProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_f: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathSummary>,
}

impl PhaseInputs {
    fn charge(e: f64) -> Self {
        PhaseInputs {
            charge: e,
            radius: None,
            profile: None,
            flux_amplitude: None,
            omega: None,
            t_f: None,
            paths: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePrediction {
    /// Radians, not reduced mod 2π.
    pub phase: f64,
    pub method: PhaseMethod,
    pub inputs: PhaseInputs,
    /// Present for the numeric route only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

fn check_charge(e: f64) -> Result<()> {
    if e.is_finite() && e >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("charge magnitude must be finite and non-negative, got {e}")))
    }
}

fn check_t_f(t_f: f64) -> Result<()> {
    if t_f.is_finite() && t_f > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("t_f must be positive and finite, got {t_f}")))
    }
}

/// `−e (∫_{c1} A_μ dx^μ − ∫_{c2} A_μ dx^μ)`.
pub fn ab_phase_two_path(
    field: &SolenoidField,
    c1: &SpacetimePath,
    c2: &SpacetimePath,
    e: f64,
    cfg: &QuadratureConfig,
) -> Result<PhasePrediction> {
    check_charge(e)?;
    check_common_endpoints(c1, c2)?;
    let l1 = line_integral(field, c1, cfg)?;
    let l2 = line_integral(field, c2, cfg)?;
    let diff = l1.combine(l2.negate()).scale(-e);
    Ok(PhasePrediction {
        phase: -e * (l1.value - l2.value),
        method: PhaseMethod::TwoPathLineIntegral,
        inputs: PhaseInputs {
            radius: Some(field.radius()),
            profile: Some(*field.profile()),
            paths: vec![PathSummary::of(c1), PathSummary::of(c2)],
            ..PhaseInputs::charge(e)
        },
        error_estimate: Some(diff.error_estimate),
        evaluations: diff.evaluations,
        converged: diff.converged,
    })
}

/// `e πR² B̄(t_f)`, where `B̄` is the time average over `[0, t_f]`.
pub fn ab_phase_averaged(profile: &FluxProfile, radius: f64, t_f: f64, e: f64) -> Result<PhasePrediction> {
    check_charge(e)?;
    check_t_f(t_f)?;
    profile.validate()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(format!("radius must be positive, got {radius}")));
    }
    let avg = profile.avg_b(t_f)?;
    Ok(PhasePrediction {
        phase: e * PI * radius * radius * avg,
        method: PhaseMethod::AveragedFormula,
        inputs: PhaseInputs {
            radius: Some(radius),
            profile: Some(*profile),
            t_f: Some(t_f),
            ..PhaseInputs::charge(e)
        },
        error_estimate: None,
        evaluations: 0,
        converged: true,
    })
}

/// `e Φ₀ sin(Ωt_f)/(Ωt_f)`.
pub fn ab_phase_sinusoidal(phi0: f64, omega: f64, t_f: f64, e: f64) -> Result<PhasePrediction> {
    check_charge(e)?;
    check_t_f(t_f)?;
    if !(phi0.is_finite() && omega.is_finite()) {
        return Err(Error::domain("flux amplitude and frequency must be finite"));
    }
    Ok(PhasePrediction {
        phase: e * phi0 * sinc(omega * t_f),
        method: PhaseMethod::SinusoidalFormula,
        inputs: PhaseInputs {
            flux_amplitude: Some(phi0),
            omega: Some(omega),
            t_f: Some(t_f),
            ..PhaseInputs::charge(e)
        },
        error_estimate: None,
        evaluations: 0,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_arc_path, TimeMap};
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-13, 1e-12)
    }

    fn arms(omega: f64) -> (SpacetimePath, SpacetimePath) {
        let upper = make_arc_path(2.0, 0.0, PI, TimeMap::uniform(omega, 0.0, 1.0)).unwrap();
        let lower = make_arc_path(2.0, 0.0, -PI, TimeMap::uniform(omega, 0.0, -1.0)).unwrap();
        (upper, lower)
    }

    #[test]
    fn two_path_constant_flux() {
        let field = SolenoidField::new(1.0, FluxProfile::constant(2.0)).unwrap();
        let (c1, c2) = arms(1.0);
        let p = ab_phase_two_path(&field, &c1, &c2, 1.0, &cfg()).unwrap();
        assert!((p.phase - 2.0 * PI).abs() < 1e-9);
        assert_eq!(p.method, PhaseMethod::TwoPathLineIntegral);
        assert!(p.converged);
        assert_eq!(ab_phase_two_path(&field, &c1, &c1, 1.0, &cfg()).unwrap().phase, 0.0);
    }

    #[test]
    fn two_path_same_side_is_zero() {
        let field = SolenoidField::new(1.0, FluxProfile::sinusoidal(1.0, 3.0)).unwrap();
        let tmap = TimeMap::uniform(1.0, 0.0, 1.0);
        let near = make_arc_path(2.0, 0.0, 1.0, tmap.clone()).unwrap();
        // out at φ = 0, along ρ = 3, and back in at φ = 1, all at matching times
        let detour = SpacetimePath::new(vec![
            crate::geometry::Segment::radial(0.0, 2.0, 3.0, crate::geometry::RadialTime::Constant(0.0)),
            crate::geometry::Segment::arc(3.0, 0.0, 1.0, tmap),
            crate::geometry::Segment::radial(1.0, 3.0, 2.0, crate::geometry::RadialTime::Constant(1.0)),
        ])
        .unwrap();
        let p = ab_phase_two_path(&field, &near, &detour, 1.0, &cfg()).unwrap();
        assert!(p.phase.abs() < 1e-10, "{}", p.phase);
    }

    #[test]
    fn two_path_rejects_mismatched_endpoints() {
        let field = SolenoidField::new(1.0, FluxProfile::constant(2.0)).unwrap();
        let (c1, _) = arms(1.0);
        let (_, c2) = arms(2.0);
        assert!(matches!(ab_phase_two_path(&field, &c1, &c2, 1.0, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn averaged_examples() {
        let p = ab_phase_averaged(&FluxProfile::constant(2.0), 1.0, 3.7, 1.5).unwrap();
        assert!((p.phase - 1.5 * PI * 2.0).abs() < 1e-13);
        let p = ab_phase_averaged(&FluxProfile::linear_ramp(1.0, 0.4), 0.5, 2.0, 1.0).unwrap();
        assert!((p.phase - PI * 0.25 * (1.0 + 0.4)).abs() < 1e-13);
        assert!(matches!(ab_phase_averaged(&FluxProfile::constant(1.0), 1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(ab_phase_averaged(&FluxProfile::constant(1.0), 1.0, -1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn averaged_continuous_across_ramp_end() {
        let profile = FluxProfile::piecewise_ramp(1.0, 3.0, 0.5, 1.5).unwrap();
        let lo = ab_phase_averaged(&profile, 1.0, 1.5 - 5e-7, 1.0).unwrap().phase;
        let hi = ab_phase_averaged(&profile, 1.0, 1.5 + 5e-7, 1.0).unwrap().phase;
        assert!((hi - lo).abs() <= 1e-5 * PI * 3.0);
    }

    #[test]
    fn sinusoidal_examples() {
        assert!(ab_phase_sinusoidal(1.0, 1.0, PI, 1.0).unwrap().phase.abs() < 1e-15);
        let p = ab_phase_sinusoidal(1.0, 1.0, PI / 2.0, 1.0).unwrap();
        assert!((p.phase - 2.0 / PI).abs() < 1e-15);
        assert_eq!(ab_phase_sinusoidal(3.0, 0.0, 2.0, 2.0).unwrap().phase, 6.0);
        assert!((ab_phase_sinusoidal(3.0, 1e-9, 2.0, 2.0).unwrap().phase - 6.0).abs() < 1e-15);
        assert!(matches!(ab_phase_sinusoidal(1.0, 1.0, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn serializes_method_tag() {
        let p = ab_phase_sinusoidal(1.0, 1.0, 1.0, 1.0).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["method"], "sinusoidal_formula");
        assert!(v.get("error_estimate").is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reversing_arms_negates(b0 in -3.0..3.0f64, b1 in -2.0..2.0f64, omega in 0.2..5.0f64, e in 0.1..2.0f64) {
            let field = SolenoidField::new(1.0, FluxProfile::linear_ramp(b0, b1)).unwrap();
            let (c1, c2) = arms(omega);
            let a = ab_phase_two_path(&field, &c1, &c2, e, &cfg()).unwrap().phase;
            let b = ab_phase_two_path(&field, &c2, &c1, e, &cfg()).unwrap().phase;
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn two_path_matches_average(b0 in 0.1..3.0f64, big_omega in 0.1..8.0f64, omega in 0.2..5.0f64) {
            let profile = FluxProfile::sinusoidal(b0, big_omega);
            let field = SolenoidField::new(1.0, profile).unwrap();
            let (c1, c2) = arms(omega);
            let two = ab_phase_two_path(&field, &c1, &c2, 1.0, &cfg()).unwrap().phase;
            let avg = ab_phase_averaged(&profile, 1.0, PI / omega, 1.0).unwrap().phase;
            prop_assert!((two - avg).abs() <= 1e-9 * (1.0 + avg.abs()), "{} vs {}", two, avg);
            let sin = ab_phase_sinusoidal(PI * b0, big_omega, PI / omega, 1.0).unwrap().phase;
            prop_assert!((avg - sin).abs() <= 1e-12);
        }

        #[test]
        fn constant_flux_ignores_time_map(k in 0.01..0.3f64, t_end in 0.5..20.0f64) {
            // t(φ) = t_end (φ/π + k sin φ) keeps the endpoints and stays monotone for k < 1/π
            let field = SolenoidField::new(1.0, FluxProfile::constant(2.0)).unwrap();
            let warped = TimeMap::custom(
                "warped",
                move |p: f64| t_end * (p / PI + k * p.sin()),
                move |p: f64| t_end * (1.0 / PI + k * p.cos()),
            );
            let c1 = make_arc_path(2.0, 0.0, PI, warped).unwrap();
            let c2 = make_arc_path(2.0, 0.0, -PI, TimeMap::uniform(PI / t_end, 0.0, -1.0)).unwrap();
            let p = ab_phase_two_path(&field, &c1, &c2, 1.0, &cfg()).unwrap().phase;
            prop_assert!((p - 2.0 * PI).abs() < 1e-9);
        }
    }
}
