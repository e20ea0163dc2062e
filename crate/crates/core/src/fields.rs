//! Potentials and fields of an infinitely long solenoid along the z axis.
//!
//! Inside (`ρ < R`) the field is uniform, `B = B(t) e_z`, and the vector
//! potential is `ρB/2 e_φ`. Outside the magnetic field vanishes but
//! `A = R²B/(2ρ) e_φ` survives, and so does the induced `E = −∂A/∂t`. The
//! scalar potential is zero everywhere. The wall `ρ = R` belongs to the
//! exterior branch.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::flux::FluxProfile;

/// A point `(t, x, y, z)` in Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Event {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Event { t, x, y, z }
    }

    /// Event at cylindrical coordinates `(ρ, φ)` in the `z = 0` plane.
    pub fn polar(t: f64, rho: f64, phi: f64) -> Self {
        Event::new(t, rho * phi.cos(), rho * phi.sin(), 0.0)
    }

    pub fn rho(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth in `(−π, π]`.
    pub fn phi(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn max_abs_diff(&self, other: &Event) -> f64 {
        (self.t - other.t)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// Electric and magnetic field at an event, with tensor-component accessors
/// for `F_{μν}` under signature `(+,−,−,−)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStrength {
    pub e: Vector3<f64>,
    pub b: Vector3<f64>,
}

impl FieldStrength {
    pub fn f0x(&self) -> f64 {
        self.e.x
    }
    pub fn f0y(&self) -> f64 {
        self.e.y
    }
    pub fn f0z(&self) -> f64 {
        self.e.z
    }
    pub fn fxy(&self) -> f64 {
        -self.b.z
    }
    pub fn fyz(&self) -> f64 {
        -self.b.x
    }
    pub fn fzx(&self) -> f64 {
        -self.b.y
    }
}

/// Anything that assigns a 4-potential `(A⁰, A)` to an event.
pub trait FourPotential {
    fn scalar(&self, ev: &Event) -> f64;
    fn vector(&self, ev: &Event) -> Vector3<f64>;

    /// Radii where the potential is not smooth; line integrals split there.
    fn radial_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Times where the potential is not smooth.
    fn time_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<P: FourPotential + ?Sized> FourPotential for &P {
    fn scalar(&self, ev: &Event) -> f64 {
        (**self).scalar(ev)
    }
    fn vector(&self, ev: &Event) -> Vector3<f64> {
        (**self).vector(ev)
    }
    fn radial_breakpoints(&self) -> Vec<f64> {
        (**self).radial_breakpoints()
    }
    fn time_breakpoints(&self) -> Vec<f64> {
        (**self).time_breakpoints()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolenoidField {
    radius: f64,
    profile: FluxProfile,
}

fn e_phi(ev: &Event, rho: f64) -> Vector3<f64> {
    Vector3::new(-ev.y / rho, ev.x / rho, 0.0)
}

impl SolenoidField {
    pub fn new(radius: f64, profile: FluxProfile) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::construction(format!("solenoid radius must be positive (got {radius})")));
        }
        profile.validate()?;
        Ok(SolenoidField { radius, profile })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn profile(&self) -> &FluxProfile {
        &self.profile
    }

    /// Total flux `πR²B(t)`.
    pub fn flux(&self, t: f64) -> f64 {
        std::f64::consts::PI * self.radius * self.radius * self.profile.eval_b(t)
    }

    // Azimuthal factor multiplying a time law: ρ/2 inside, R²/(2ρ) outside.
    fn azimuthal_weight(&self, rho: f64) -> f64 {
        if rho < self.radius {
            0.5 * rho
        } else {
            0.5 * self.radius * self.radius / rho
        }
    }

    pub fn vector_potential(&self, ev: &Event) -> Vector3<f64> {
        let rho = ev.rho();
        if rho == 0.0 {
            return Vector3::zeros();
        }
        e_phi(ev, rho) * (self.azimuthal_weight(rho) * self.profile.eval_b(ev.t))
    }

    /// Induced field `−∂A/∂t`.
    pub fn electric_field(&self, ev: &Event) -> Vector3<f64> {
        let rho = ev.rho();
        if rho == 0.0 {
            return Vector3::zeros();
        }
        e_phi(ev, rho) * (-self.azimuthal_weight(rho) * self.profile.eval_b_dot(ev.t))
    }

    pub fn magnetic_field(&self, ev: &Event) -> Vector3<f64> {
        if ev.rho() < self.radius {
            Vector3::new(0.0, 0.0, self.profile.eval_b(ev.t))
        } else {
            Vector3::zeros()
        }
    }

    pub fn field_strength(&self, ev: &Event) -> FieldStrength {
        FieldStrength {
            e: self.electric_field(ev),
            b: self.magnetic_field(ev),
        }
    }
}

impl FourPotential for SolenoidField {
    fn scalar(&self, _ev: &Event) -> f64 {
        0.0
    }

    fn vector(&self, ev: &Event) -> Vector3<f64> {
        self.vector_potential(ev)
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }

    fn time_breakpoints(&self) -> Vec<f64> {
        self.profile.kinks()
    }
}

type ScalarFn = dyn Fn(&Event) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&Event) -> (f64, Vector3<f64>) + Send + Sync;

/// A single-valued scalar `χ(x)` paired with its exact 4-gradient
/// `(∂χ/∂t, ∇χ)`.
#[derive(Clone)]
pub struct GaugeFunction {
    name: String,
    value: Arc<ScalarFn>,
    gradient: Arc<GradientFn>,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeFunction").field("name", &self.name).finish_non_exhaustive()
    }
}

impl GaugeFunction {
    /// Builds a gauge function, checking the supplied gradient against
    /// central differences of the scalar on a grid over `t ∈ [0, 3]`,
    /// `x, y, z ∈ [−2, 2]`.
    pub fn new<V, G>(name: impl Into<String>, value: V, gradient: G) -> Result<Self>
    where
        V: Fn(&Event) -> f64 + Send + Sync + 'static,
        G: Fn(&Event) -> (f64, Vector3<f64>) + Send + Sync + 'static,
    {
        let chi = GaugeFunction {
            name: name.into(),
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        };
        chi.check_gradient()?;
        Ok(chi)
    }

    fn check_gradient(&self) -> Result<()> {
        const H: f64 = 1e-5;
        let axis = |i: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / 4.0;
        for it in 0..5 {
            for ix in 0..5 {
                for iy in 0..5 {
                    for iz in 0..5 {
                        let ev = Event::new(axis(it, 0.0, 3.0), axis(ix, -2.0, 2.0), axis(iy, -2.0, 2.0), axis(iz, -2.0, 2.0));
                        let (dt, grad) = (self.gradient)(&ev);
                        let shifted = |d: [f64; 4]| {
                            let plus = Event::new(ev.t + d[0], ev.x + d[1], ev.y + d[2], ev.z + d[3]);
                            let minus = Event::new(ev.t - d[0], ev.x - d[1], ev.y - d[2], ev.z - d[3]);
                            ((self.value)(&plus) - (self.value)(&minus)) / (2.0 * H)
                        };
                        let fd = [
                            shifted([H, 0.0, 0.0, 0.0]),
                            shifted([0.0, H, 0.0, 0.0]),
                            shifted([0.0, 0.0, H, 0.0]),
                            shifted([0.0, 0.0, 0.0, H]),
                        ];
                        let exact = [dt, grad.x, grad.y, grad.z];
                        for (k, (e, f)) in exact.iter().zip(fd.iter()).enumerate() {
                            if !e.is_finite() || (e - f).abs() > 1e-6 * (1.0 + e.abs()) {
                                return Err(Error::construction(format!(
                                    "gauge function `{}`: gradient component {k} at {ev:?} is {e}, finite difference gives {f}",
                                    self.name
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `χ = α·t`.
    pub fn linear_time(alpha: f64) -> Result<Self> {
        Self::new(format!("{alpha}*t"), move |ev| alpha * ev.t, move |_| (alpha, Vector3::zeros()))
    }

    /// `χ = β·x·y`.
    pub fn bilinear_xy(beta: f64) -> Result<Self> {
        Self::new(
            format!("{beta}*x*y"),
            move |ev| beta * ev.x * ev.y,
            move |ev| (0.0, Vector3::new(beta * ev.y, beta * ev.x, 0.0)),
        )
    }

    /// `χ = sin(x)·cos(t)`.
    pub fn sin_x_cos_t() -> Result<Self> {
        Self::new(
            "sin(x)*cos(t)",
            |ev| ev.x.sin() * ev.t.cos(),
            |ev| (-ev.x.sin() * ev.t.sin(), Vector3::new(ev.x.cos() * ev.t.cos(), 0.0, 0.0)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, ev: &Event) -> f64 {
        (self.value)(ev)
    }

    pub fn gradient(&self, ev: &Event) -> (f64, Vector3<f64>) {
        (self.gradient)(ev)
    }
}

/// A potential after the gauge transformation `A_μ → A_μ − ∂_μχ`.
///
/// With `A_μ = (A⁰, −A)` this reads `A⁰′ = A⁰ − ∂χ/∂t` and `A′ = A + ∇χ`.
#[derive(Debug, Clone)]
pub struct Gauged<P> {
    base: P,
    chi: GaugeFunction,
}

pub fn apply_gauge<P: FourPotential>(potential: P, chi: GaugeFunction) -> Gauged<P> {
    Gauged { base: potential, chi }
}

impl<P> Gauged<P> {
    pub fn gauge(&self) -> &GaugeFunction {
        &self.chi
    }
}

impl<P: FourPotential> FourPotential for Gauged<P> {
    fn scalar(&self, ev: &Event) -> f64 {
        self.base.scalar(ev) - self.chi.gradient(ev).0
    }

    fn vector(&self, ev: &Event) -> Vector3<f64> {
        self.base.vector(ev) + self.chi.gradient(ev).1
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        self.base.radial_breakpoints()
    }

    fn time_breakpoints(&self) -> Vec<f64> {
        self.base.time_breakpoints()
    }
}
