//! Time laws `B(t)` for the uniform field inside the solenoid.
//!
//! Every profile exposes its value, its exact derivative and its exact running
//! integral `B̄(t) = ∫₀ᵗ B(t′) dt′`. The running integral is closed form for
//! every variant so that [`FluxProfile::avg_b`] can serve as an oracle for the
//! numerically integrated phase.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior magnetic field as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxProfile {
    /// `B(t) = b0`.
    Constant { b0: f64 },
    /// `B(t) = b0 + b1·t`.
    LinearRamp { b0: f64, b1: f64 },
    /// `bi` before `ti`, linear between, `bf` after `tf`.
    PiecewiseRamp { bi: f64, bf: f64, ti: f64, tf: f64 },
    /// `B(t) = b0·cos(omega·t)`.
    Sinusoidal { b0: f64, omega: f64 },
}

/// `sin(x)/x`, switching to the Taylor series near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

impl FluxProfile {
    pub fn constant(b0: f64) -> Self {
        FluxProfile::Constant { b0 }
    }

    pub fn linear_ramp(b0: f64, b1: f64) -> Self {
        FluxProfile::LinearRamp { b0, b1 }
    }

    pub fn piecewise_ramp(bi: f64, bf: f64, ti: f64, tf: f64) -> Result<Self> {
        let profile = FluxProfile::PiecewiseRamp { bi, bf, ti, tf };
        profile.validate()?;
        Ok(profile)
    }

    pub fn sinusoidal(b0: f64, omega: f64) -> Self {
        FluxProfile::Sinusoidal { b0, omega }
    }

    /// Checks finiteness of all parameters and `ti < tf` for ramps.
    pub fn validate(&self) -> Result<()> {
        let params: &[f64] = match self {
            FluxProfile::Constant { b0 } => &[*b0],
            FluxProfile::LinearRamp { b0, b1 } => &[*b0, *b1],
            FluxProfile::PiecewiseRamp { bi, bf, ti, tf } => &[*bi, *bf, *ti, *tf],
            FluxProfile::Sinusoidal { b0, omega } => &[*b0, *omega],
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::construction("flux profile parameters must be finite"));
        }
        if let FluxProfile::PiecewiseRamp { ti, tf, .. } = self {
            if ti >= tf {
                return Err(Error::construction(format!(
                    "piecewise ramp requires ti < tf (got ti = {ti}, tf = {tf})"
                )));
            }
        }
        Ok(())
    }

    /// `B(t)`.
    pub fn eval_b(&self, t: f64) -> f64 {
        match *self {
            FluxProfile::Constant { b0 } => b0,
            FluxProfile::LinearRamp { b0, b1 } => b0 + b1 * t,
            FluxProfile::PiecewiseRamp { bi, bf, ti, tf } => {
                if t <= ti {
                    bi
                } else if t >= tf {
                    bf
                } else {
                    bi + (bf - bi) * (t - ti) / (tf - ti)
                }
            }
            FluxProfile::Sinusoidal { b0, omega } => b0 * (omega * t).cos(),
        }
    }

    /// `dB/dt`. At the kinks of a piecewise ramp the ramp slope is returned.
    pub fn eval_b_dot(&self, t: f64) -> f64 {
        match *self {
            FluxProfile::Constant { .. } => 0.0,
            FluxProfile::LinearRamp { b1, .. } => b1,
            FluxProfile::PiecewiseRamp { bi, bf, ti, tf } => {
                if t < ti || t > tf {
                    0.0
                } else {
                    (bf - bi) / (tf - ti)
                }
            }
            FluxProfile::Sinusoidal { b0, omega } => -b0 * omega * (omega * t).sin(),
        }
    }

    /// Running integral `B̄(t) = ∫₀ᵗ B(t′) dt′` in closed form.
    pub fn running_integral(&self, t: f64) -> f64 {
        match *self {
            FluxProfile::Constant { b0 } => b0 * t,
            FluxProfile::LinearRamp { b0, b1 } => b0 * t + 0.5 * b1 * t * t,
            FluxProfile::PiecewiseRamp { .. } => self.ramp_primitive(t) - self.ramp_primitive(0.0),
            FluxProfile::Sinusoidal { b0, omega } => b0 * t * sinc(omega * t),
        }
    }

    // ∫_{ti}^{t} B for the piecewise ramp.
    fn ramp_primitive(&self, t: f64) -> f64 {
        let FluxProfile::PiecewiseRamp { bi, bf, ti, tf } = *self else {
            unreachable!("ramp_primitive on a non-ramp profile")
        };
        if t <= ti {
            bi * (t - ti)
        } else if t >= tf {
            0.5 * (bi + bf) * (tf - ti) + bf * (t - tf)
        } else {
            let s = t - ti;
            bi * s + 0.5 * (bf - bi) / (tf - ti) * s * s
        }
    }

    /// Time average `B̄(t_f)/t_f` over `[0, t_f]`.
    pub fn avg_b(&self, t_f: f64) -> Result<f64> {
        if !(t_f > 0.0) {
            return Err(Error::domain(format!("averaging window must be positive (got {t_f})")));
        }
        Ok(match *self {
            FluxProfile::Constant { b0 } => b0,
            FluxProfile::LinearRamp { b0, b1 } => b0 + 0.5 * b1 * t_f,
            FluxProfile::Sinusoidal { b0, omega } => b0 * sinc(omega * t_f),
            FluxProfile::PiecewiseRamp { .. } => self.running_integral(t_f) / t_f,
        })
    }

    /// Times where the derivative is discontinuous.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            FluxProfile::PiecewiseRamp { ti, tf, .. } => vec![ti, tf],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn all_profiles() -> Vec<FluxProfile> {
        vec![
            FluxProfile::constant(2.0),
            FluxProfile::linear_ramp(1.0, 0.5),
            FluxProfile::piecewise_ramp(1.0, 3.0, 0.5, 1.5).unwrap(),
            FluxProfile::sinusoidal(1.3, 5.0),
        ]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(FluxProfile::constant(2.0).eval_b(17.0), 2.0);
        assert_eq!(FluxProfile::linear_ramp(1.0, 0.5).eval_b(4.0), 3.0);
        assert_relative_eq!(FluxProfile::sinusoidal(1.0, PI).eval_b(1.0), -1.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(FluxProfile::constant(5.0).eval_b_dot(-3.0), 0.0);
        assert_eq!(FluxProfile::linear_ramp(1.0, 0.5).eval_b_dot(100.0), 0.5);
        assert_eq!(FluxProfile::sinusoidal(2.0, 1.0).eval_b_dot(0.0), 0.0);
    }

    #[test]
    fn average_examples() {
        assert_eq!(FluxProfile::constant(3.0).avg_b(7.0).unwrap(), 3.0);
        assert_eq!(FluxProfile::linear_ramp(1.0, 2.0).avg_b(4.0).unwrap(), 5.0);
        assert!(FluxProfile::sinusoidal(1.0, 2.0).avg_b(PI).unwrap().abs() < 1e-15);
    }

    #[test]
    fn average_rejects_nonpositive_window() {
        for p in all_profiles() {
            assert!(matches!(p.avg_b(0.0), Err(Error::Domain(_))));
            assert!(matches!(p.avg_b(-1.0), Err(Error::Domain(_))));
            assert!(matches!(p.avg_b(f64::NAN), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn ramp_clamps_and_is_continuous() {
        let p = FluxProfile::piecewise_ramp(1.0, 3.0, 0.5, 1.5).unwrap();
        assert_eq!(p.eval_b(-10.0), 1.0);
        assert_eq!(p.eval_b(0.5), 1.0);
        assert_eq!(p.eval_b(1.0), 2.0);
        assert_eq!(p.eval_b(1.5), 3.0);
        assert_eq!(p.eval_b(99.0), 3.0);
        for &k in &[0.5, 1.5] {
            assert!((p.eval_b(k - 1e-12) - p.eval_b(k + 1e-12)).abs() < 1e-11);
        }
        // kink derivative is the interior slope
        assert_eq!(p.eval_b_dot(0.5), 2.0);
        assert_eq!(p.eval_b_dot(1.5), 2.0);
        assert_eq!(p.eval_b_dot(0.4), 0.0);
        assert_eq!(p.eval_b_dot(1.6), 0.0);
    }

    #[test]
    fn ramp_requires_ordered_times() {
        assert!(FluxProfile::piecewise_ramp(1.0, 2.0, 1.0, 1.0).is_err());
        assert!(FluxProfile::piecewise_ramp(1.0, 2.0, 2.0, 1.0).is_err());
        assert!(FluxProfile::PiecewiseRamp { bi: 0.0, bf: 1.0, ti: 3.0, tf: 1.0 }.validate().is_err());
        assert!(FluxProfile::linear_ramp(f64::INFINITY, 0.0).validate().is_err());
    }

    #[test]
    fn ramp_running_integral_with_negative_start() {
        // ramp straddling t = 0: B = 0 for t <= -1, B = t + 1 on [-1, 1], B = 2 after
        let p = FluxProfile::piecewise_ramp(0.0, 2.0, -1.0, 1.0).unwrap();
        // ∫₀¹ (t + 1) dt = 1.5, then + 2·(3 − 1)
        assert_relative_eq!(p.running_integral(1.0), 1.5, epsilon = 1e-15);
        assert_relative_eq!(p.running_integral(3.0), 5.5, epsilon = 1e-15);
        // ∫₀^{-2} B = −∫_{-2}^{0} B = −(0 + 0.5)
        assert_relative_eq!(p.running_integral(-2.0), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn constant_average_is_value() {
        let p = FluxProfile::constant(-0.7);
        for t in [1e-9, 0.3, 1.0, 1e6] {
            assert_eq!(p.avg_b(t).unwrap(), p.eval_b(t));
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-5;
        for p in all_profiles() {
            let kinks = p.kinks();
            for i in 0..400 {
                let t = -2.0 + i as f64 * 0.0137;
                if kinks.iter().any(|k| (t - k).abs() <= 2.0 * h) {
                    continue;
                }
                let fd = (p.eval_b(t + h) - p.eval_b(t - h)) / (2.0 * h);
                let d = p.eval_b_dot(t);
                assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()), "{p:?} at t = {t}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn running_integral_differentiates_to_value() {
        let h = 1e-5;
        for p in all_profiles() {
            let kinks = p.kinks();
            for i in 1..300 {
                let t = i as f64 * 0.011;
                if kinks.iter().any(|k| (t - k).abs() <= 2.0 * h) {
                    continue;
                }
                let lhs = (p.avg_b(t + h).unwrap() * (t + h) - p.avg_b(t - h).unwrap() * (t - h)) / (2.0 * h);
                let b = p.eval_b(t);
                assert!((lhs - b).abs() <= 1e-6 * (1.0 + b.abs()), "{p:?} at t = {t}: {lhs} vs {b}");
            }
        }
    }

    #[test]
    fn sinc_series_matches_direct_form_at_switch() {
        let x = 1e-4;
        assert!((sinc(x) - x.sin() / x).abs() < 1e-16);
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn serde_roundtrip_and_unknown_fields() {
        let p: FluxProfile = serde_json::from_str(r#"{"kind":"linear_ramp","b0":1.0,"b1":0.5}"#).unwrap();
        assert_eq!(p, FluxProfile::linear_ramp(1.0, 0.5));
        let bad = serde_json::from_str::<FluxProfile>(r#"{"kind":"constant","b0":1.0,"b9":2.0}"#);
        assert!(bad.is_err());
        for p in all_profiles() {
            let s = serde_json::to_string(&p).unwrap();
            assert_eq!(serde_json::from_str::<FluxProfile>(&s).unwrap(), p);
        }
    }
}
