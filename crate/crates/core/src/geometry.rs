//! Space-time paths and `(ρ, φ)`-parametrized spanning surfaces.
//!
//! All geometry lives in the `z = 0` plane. Angles are unwrapped real
//! numbers, so an arc may run past `2π` and winding numbers are read off the
//! accumulated `Δφ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::Event;

/// Tolerance for joins between consecutive path segments.
pub const JOIN_TOL: f64 = 1e-10;
/// Tolerance for seam continuity of a surface patch.
pub const SEAM_TOL: f64 = 1e-12;

const MONOTONE_SAMPLES: usize = 257;
const SEAM_SAMPLES: usize = 100;

type RealFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A user-supplied real function together with its exact derivative.
#[derive(Clone)]
pub struct SmoothFn {
    name: String,
    value: Arc<RealFn>,
    derivative: Arc<RealFn>,
}

impl SmoothFn {
    pub fn new<F, D>(name: impl Into<String>, value: F, derivative: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SmoothFn {
            name: name.into(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFn({})", self.name)
    }
}

// Checks the stated derivative of `value` by central differences on [lo, hi].
fn check_derivative(what: &str, value: &RealFn, derivative: &RealFn, lo: f64, hi: f64) -> Result<()> {
    if lo == hi {
        return Ok(());
    }
    for k in 0..MONOTONE_SAMPLES {
        let x = lo + (hi - lo) * k as f64 / (MONOTONE_SAMPLES - 1) as f64;
        let h = 1e-5 * (1.0 + x.abs());
        let fd = (value(x + h) - value(x - h)) / (2.0 * h);
        let d = derivative(x);
        if !d.is_finite() || (d - fd).abs() > 1e-6 * (1.0 + d.abs()) {
            return Err(Error::construction(format!(
                "{what}: derivative at {x} is {d} but finite differences give {fd}"
            )));
        }
    }
    Ok(())
}

/// Assigns a time to each angular position along an arc.
#[derive(Debug, Clone)]
pub enum TimeMap {
    /// `t(φ) = t0 + sign·φ/ω`, traversal at constant angular speed.
    UniformAngular { omega: f64, t0: f64, sign: f64 },
    /// `t(φ) = slope·φ + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// Any strictly monotone map with its exact derivative.
    Custom(SmoothFn),
}

impl TimeMap {
    pub fn uniform(omega: f64, t0: f64, sign: f64) -> Self {
        TimeMap::UniformAngular { omega, t0, sign }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        TimeMap::Affine { slope, intercept }
    }

    pub fn custom<F, D>(name: impl Into<String>, value: F, derivative: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TimeMap::Custom(SmoothFn::new(name, value, derivative))
    }

    pub fn time(&self, phi: f64) -> f64 {
        match self {
            TimeMap::UniformAngular { omega, t0, sign } => t0 + sign * phi / omega,
            TimeMap::Affine { slope, intercept } => slope * phi + intercept,
            TimeMap::Custom(s) => (s.value)(phi),
        }
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        match self {
            TimeMap::UniformAngular { omega, sign, .. } => sign / omega,
            TimeMap::Affine { slope, .. } => *slope,
            TimeMap::Custom(s) => (s.derivative)(phi),
        }
    }

    /// Checks parameters, strict monotonicity on `[lo, hi]` (either order)
    /// and, for custom maps, the supplied derivative.
    pub fn validate_on(&self, lo: f64, hi: f64) -> Result<()> {
        match self {
            TimeMap::UniformAngular { omega, t0, sign } => {
                if !(*omega > 0.0) || !omega.is_finite() || !t0.is_finite() {
                    return Err(Error::construction(format!("uniform time map needs ω > 0 and finite t0 (ω = {omega}, t0 = {t0})")));
                }
                if *sign != 1.0 && *sign != -1.0 {
                    return Err(Error::construction(format!("uniform time map sign must be ±1 (got {sign})")));
                }
                Ok(())
            }
            TimeMap::Affine { slope, intercept } => {
                if *slope == 0.0 || !slope.is_finite() || !intercept.is_finite() {
                    return Err(Error::construction(format!("affine time map needs a finite nonzero slope (got {slope})")));
                }
                Ok(())
            }
            TimeMap::Custom(s) => {
                let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
                if lo == hi {
                    return Ok(());
                }
                let mut direction = 0.0;
                let mut prev = (s.value)(lo);
                for k in 1..MONOTONE_SAMPLES {
                    let x = lo + (hi - lo) * k as f64 / (MONOTONE_SAMPLES - 1) as f64;
                    let t = (s.value)(x);
                    let step = t - prev;
                    if !t.is_finite() || step == 0.0 || (direction != 0.0 && step.signum() != direction) {
                        return Err(Error::construction(format!("time map `{}` is not strictly monotone on [{lo}, {hi}]", s.name)));
                    }
                    direction = step.signum();
                    prev = t;
                }
                check_derivative(&format!("time map `{}`", s.name), &*s.value, &*s.derivative, lo, hi)
            }
        }
    }
}

/// Radial interpolation `F(ρ)` of the surface time, with `F(ρ₀) = 1`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    rho0: f64,
    kind: RadialKind,
}

#[derive(Debug, Clone)]
pub enum RadialKind {
    /// `ρ/ρ₀`.
    Linear,
    /// `(ρ/ρ₀)^p` with `p ≥ 1`.
    Power(f64),
    /// `1` everywhere.
    Unit,
    /// `1 + a(ρ − ρ₁)(ρ₀ − ρ)/(ρ₀ − ρ₁)²`, equal to one at both `ρ₁` and `ρ₀`.
    Bump { rho_inner: f64, amplitude: f64 },
    Custom(SmoothFn),
}

impl RadialProfile {
    pub fn new(rho0: f64, kind: RadialKind) -> Result<Self> {
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::construction(format!("radial profile needs ρ₀ > 0 (got {rho0})")));
        }
        match &kind {
            RadialKind::Power(p) if !(*p >= 1.0) || !p.is_finite() => {
                return Err(Error::construction(format!("radial power must be at least 1 (got {p})")));
            }
            RadialKind::Bump { rho_inner, amplitude } if !(*rho_inner >= 0.0 && *rho_inner < rho0) || !amplitude.is_finite() => {
                return Err(Error::construction(format!("bump profile needs 0 ≤ ρ₁ < ρ₀ (ρ₁ = {rho_inner}, ρ₀ = {rho0})")));
            }
            _ => {}
        }
        let profile = RadialProfile { rho0, kind };
        if let RadialKind::Custom(s) = &profile.kind {
            check_derivative(&format!("radial profile `{}`", s.name), &*s.value, &*s.derivative, 0.0, rho0)?;
        }
        let at_edge = profile.value(rho0);
        if (at_edge - 1.0).abs() > SEAM_TOL {
            return Err(Error::construction(format!("radial profile must equal 1 at ρ₀ (got {at_edge})")));
        }
        Ok(profile)
    }

    pub fn linear(rho0: f64) -> Result<Self> {
        Self::new(rho0, RadialKind::Linear)
    }

    pub fn power(rho0: f64, p: f64) -> Result<Self> {
        Self::new(rho0, RadialKind::Power(p))
    }

    pub fn unit(rho0: f64) -> Result<Self> {
        Self::new(rho0, RadialKind::Unit)
    }

    pub fn bump(rho0: f64, rho_inner: f64, amplitude: f64) -> Result<Self> {
        Self::new(rho0, RadialKind::Bump { rho_inner, amplitude })
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn kind(&self) -> &RadialKind {
        &self.kind
    }

    pub fn value(&self, rho: f64) -> f64 {
        match &self.kind {
            RadialKind::Linear => rho / self.rho0,
            RadialKind::Power(p) => (rho / self.rho0).powf(*p),
            RadialKind::Unit => 1.0,
            RadialKind::Bump { rho_inner, amplitude } => {
                let w = self.rho0 - rho_inner;
                1.0 + amplitude * (rho - rho_inner) * (self.rho0 - rho) / (w * w)
            }
            RadialKind::Custom(s) => (s.value)(rho),
        }
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        match &self.kind {
            RadialKind::Linear => 1.0 / self.rho0,
            RadialKind::Power(p) => {
                if rho == 0.0 {
                    if *p == 1.0 {
                        1.0 / self.rho0
                    } else {
                        0.0
                    }
                } else {
                    p / self.rho0 * (rho / self.rho0).powf(p - 1.0)
                }
            }
            RadialKind::Unit => 0.0,
            RadialKind::Bump { rho_inner, amplitude } => {
                let w = self.rho0 - rho_inner;
                amplitude * ((self.rho0 - rho) - (rho - rho_inner)) / (w * w)
            }
            RadialKind::Custom(s) => (s.derivative)(rho),
        }
    }
}

/// Time law along a radial segment.
#[derive(Debug, Clone)]
pub enum RadialTime {
    Constant(f64),
    /// `t(ρ) = scale·F(ρ)`; used for the straight edges of a surface sector.
    Profile { profile: RadialProfile, scale: f64 },
}

impl RadialTime {
    pub fn time(&self, rho: f64) -> f64 {
        match self {
            RadialTime::Constant(t) => *t,
            RadialTime::Profile { profile, scale } => scale * profile.value(rho),
        }
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        match self {
            RadialTime::Constant(_) => 0.0,
            RadialTime::Profile { profile, scale } => scale * profile.derivative(rho),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Segment {
    /// Circular arc of radius `rho`, parametrized by the unwrapped angle.
    Arc { rho: f64, phi_start: f64, phi_end: f64, tmap: TimeMap, z: f64 },
    /// Straight radial segment at fixed angle, parametrized by `ρ`.
    Radial { phi: f64, rho_start: f64, rho_end: f64, time: RadialTime, z: f64 },
}

impl Segment {
    pub fn arc(rho: f64, phi_start: f64, phi_end: f64, tmap: TimeMap) -> Self {
        Segment::Arc { rho, phi_start, phi_end, tmap, z: 0.0 }
    }

    pub fn radial(phi: f64, rho_start: f64, rho_end: f64, time: RadialTime) -> Self {
        Segment::Radial { phi, rho_start, rho_end, time, z: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Segment::Arc { rho, phi_start, phi_end, tmap, z } => {
                if !(*rho > 0.0) || !rho.is_finite() {
                    return Err(Error::domain(format!("arc radius must be positive (got {rho})")));
                }
                if !phi_start.is_finite() || !phi_end.is_finite() || !z.is_finite() {
                    return Err(Error::domain("arc angles must be finite"));
                }
                tmap.validate_on(*phi_start, *phi_end)
            }
            Segment::Radial { phi, rho_start, rho_end, z, .. } => {
                if !phi.is_finite() || !z.is_finite() || !rho_start.is_finite() || !rho_end.is_finite() {
                    return Err(Error::domain("radial segment coordinates must be finite"));
                }
                if *rho_start < 0.0 || *rho_end < 0.0 {
                    return Err(Error::domain("radial segment radii must be nonnegative"));
                }
                Ok(())
            }
        }
    }

    /// Parameter interval, in traversal order.
    pub fn parameter_range(&self) -> (f64, f64) {
        match self {
            Segment::Arc { phi_start, phi_end, .. } => (*phi_start, *phi_end),
            Segment::Radial { rho_start, rho_end, .. } => (*rho_start, *rho_end),
        }
    }

    pub fn event_at(&self, s: f64) -> Event {
        match self {
            Segment::Arc { rho, tmap, z, .. } => Event::new(tmap.time(s), rho * s.cos(), rho * s.sin(), *z),
            Segment::Radial { phi, time, z, .. } => Event::new(time.time(s), s * phi.cos(), s * phi.sin(), *z),
        }
    }

    /// `(dt, dx, dy, dz)/ds` at parameter `s`.
    pub fn tangent(&self, s: f64) -> [f64; 4] {
        match self {
            Segment::Arc { rho, tmap, .. } => [tmap.derivative(s), -rho * s.sin(), rho * s.cos(), 0.0],
            Segment::Radial { phi, time, .. } => [time.derivative(s), phi.cos(), phi.sin(), 0.0],
        }
    }

    pub fn start(&self) -> Event {
        self.event_at(self.parameter_range().0)
    }

    pub fn end(&self) -> Event {
        self.event_at(self.parameter_range().1)
    }

    /// Same point set traversed the other way.
    pub fn reversed(&self) -> Segment {
        match self {
            Segment::Arc { rho, phi_start, phi_end, tmap, z } => Segment::Arc {
                rho: *rho,
                phi_start: *phi_end,
                phi_end: *phi_start,
                tmap: tmap.clone(),
                z: *z,
            },
            Segment::Radial { phi, rho_start, rho_end, time, z } => Segment::Radial {
                phi: *phi,
                rho_start: *rho_end,
                rho_end: *rho_start,
                time: time.clone(),
                z: *z,
            },
        }
    }

    fn angle_swept(&self) -> f64 {
        match self {
            Segment::Arc { phi_start, phi_end, .. } => phi_end - phi_start,
            Segment::Radial { .. } => 0.0,
        }
    }
}

/// A continuous piecewise-smooth curve in space-time.
#[derive(Debug, Clone)]
pub struct SpacetimePath {
    segments: Vec<Segment>,
}

fn join_tolerance(a: &Event, b: &Event) -> f64 {
    let scale = [a.t, a.x, a.y, a.z, b.t, b.x, b.y, b.z].iter().fold(1.0f64, |m, v| m.max(v.abs()));
    JOIN_TOL * scale
}

impl SpacetimePath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::construction("a path needs at least one segment"));
        }
        for s in &segments {
            s.validate()?;
        }
        for (k, pair) in segments.windows(2).enumerate() {
            let (end, start) = (pair[0].end(), pair[1].start());
            if end.max_abs_diff(&start) > join_tolerance(&end, &start) {
                return Err(Error::construction(format!(
                    "segment {k} ends at {end:?} but segment {} starts at {start:?}",
                    k + 1
                )));
            }
        }
        Ok(SpacetimePath { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Event {
        self.segments[0].start()
    }

    pub fn end(&self) -> Event {
        self.segments[self.segments.len() - 1].end()
    }

    /// This path followed by `other`.
    pub fn then(&self, other: &SpacetimePath) -> Result<SpacetimePath> {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        SpacetimePath::new(segments)
    }

    pub fn reversed(&self) -> SpacetimePath {
        SpacetimePath {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        let (a, b) = (self.start(), self.end());
        a.max_abs_diff(&b) <= join_tolerance(&a, &b)
    }

    fn is_spatially_closed(&self) -> bool {
        let (a, b) = (self.start(), self.end());
        let d = (a.x - b.x).abs().max((a.y - b.y).abs()).max((a.z - b.z).abs());
        d <= join_tolerance(&a, &b)
    }

    /// Total signed angle swept about the z axis.
    pub fn angle_swept(&self) -> f64 {
        self.segments.iter().map(Segment::angle_swept).sum()
    }
}

pub fn make_arc_path(rho: f64, phi_start: f64, phi_end: f64, tmap: TimeMap) -> Result<SpacetimePath> {
    SpacetimePath::new(vec![Segment::arc(rho, phi_start, phi_end, tmap)])
}

/// Number of turns a spatially closed path makes about the solenoid axis.
pub fn winding_number(path: &SpacetimePath) -> Result<i64> {
    if !path.is_spatially_closed() {
        return Err(Error::domain("winding number needs a spatially closed path"));
    }
    Ok((path.angle_swept() / (2.0 * PI)).round() as i64)
}

/// Coefficients of `dρ∧dφ` in the six coordinate 2-forms on a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeMeasures {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub xy: f64,
    pub yz: f64,
    pub zx: f64,
}

impl WedgeMeasures {
    /// Builds the measures from the partial derivatives of `(t, x, y, z)`
    /// with respect to the first and second surface parameters.
    pub fn from_jacobian(first: [f64; 4], second: [f64; 4]) -> Self {
        let w = |i: usize, j: usize| first[i] * second[j] - first[j] * second[i];
        WedgeMeasures {
            tx: w(0, 1),
            ty: w(0, 2),
            tz: w(0, 3),
            xy: w(1, 2),
            yz: w(2, 3),
            zx: w(3, 1),
        }
    }
}

/// One angular sector of a surface: its boundary time map and radial profile.
#[derive(Debug, Clone)]
pub struct Sector {
    pub tmap: TimeMap,
    pub radial: RadialProfile,
}

impl Sector {
    pub fn new(tmap: TimeMap, radial: RadialProfile) -> Self {
        Sector { tmap, radial }
    }

    pub fn time(&self, rho: f64, phi: f64) -> f64 {
        self.radial.value(rho) * self.tmap.time(phi)
    }
}

/// A planar surface `t = F(ρ)f(φ)`, `(x, y) = (ρ cos φ, ρ sin φ)`.
///
/// Encircling patches cover the full disc `ρ ≤ ρ₀` in two angular sectors,
/// `[φ_i, φ_f]` with `(F, f)` and `[φ_f, φ_i + 2π]` with `(G, g)`. Annular
/// sectors cover `ρ₁ ≤ ρ ≤ ρ₀`, `φ_i ≤ φ ≤ φ_f` with a single sector and do
/// not enclose the axis when `ρ₁ > 0`.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    rho_outer: f64,
    rho_inner: f64,
    phi_i: f64,
    phi_f: f64,
    first: Sector,
    second: Option<Sector>,
}

fn seam_mismatch(what: &str, rho0: f64, lhs: impl Fn(f64) -> f64, rhs: impl Fn(f64) -> f64) -> Result<()> {
    for k in 0..SEAM_SAMPLES {
        let rho = rho0 * k as f64 / (SEAM_SAMPLES - 1) as f64;
        let (a, b) = (lhs(rho), rhs(rho));
        if !a.is_finite() || !b.is_finite() || (a - b).abs() > SEAM_TOL * (1.0 + a.abs().max(b.abs())) {
            return Err(Error::construction(format!(
                "surface is discontinuous across the {what} seam at ρ = {rho}: {a} vs {b}"
            )));
        }
    }
    Ok(())
}

impl SurfacePatch {
    pub fn encircling(rho0: f64, phi_i: f64, phi_f: f64, first: Sector, second: Sector) -> Result<Self> {
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::construction(format!("outer radius must be positive (got {rho0})")));
        }
        if !(phi_i < phi_f && phi_f < phi_i + 2.0 * PI) {
            return Err(Error::construction(format!("need φ_i < φ_f < φ_i + 2π (φ_i = {phi_i}, φ_f = {phi_f})")));
        }
        for s in [&first, &second] {
            if (s.radial.rho0() - rho0).abs() > SEAM_TOL * rho0 {
                return Err(Error::construction("radial profiles must share the patch's outer radius"));
            }
        }
        first.tmap.validate_on(phi_i, phi_f)?;
        second.tmap.validate_on(phi_f, phi_i + 2.0 * PI)?;
        seam_mismatch("φ_f", rho0, |r| first.time(r, phi_f), |r| second.time(r, phi_f))?;
        seam_mismatch("φ_i", rho0, |r| first.time(r, phi_i), |r| second.time(r, phi_i + 2.0 * PI))?;
        let patch = SurfacePatch {
            rho_outer: rho0,
            rho_inner: 0.0,
            phi_i,
            phi_f,
            first,
            second: Some(second),
        };
        patch.boundary()?;
        Ok(patch)
    }

    pub fn annular_sector(rho0: f64, rho1: f64, phi_i: f64, phi_f: f64, sector: Sector) -> Result<Self> {
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::construction(format!("outer radius must be positive (got {rho0})")));
        }
        if !(rho1 >= 0.0 && rho1 < rho0) {
            return Err(Error::construction(format!("need 0 ≤ ρ₁ < ρ₀ (ρ₁ = {rho1}, ρ₀ = {rho0})")));
        }
        if !(phi_i < phi_f && phi_f <= phi_i + 2.0 * PI) {
            return Err(Error::construction(format!("need φ_i < φ_f ≤ φ_i + 2π (φ_i = {phi_i}, φ_f = {phi_f})")));
        }
        if (sector.radial.rho0() - rho0).abs() > SEAM_TOL * rho0 {
            return Err(Error::construction("radial profile must share the patch's outer radius"));
        }
        sector.tmap.validate_on(phi_i, phi_f)?;
        if rho1 > 0.0 {
            let inner = sector.radial.value(rho1);
            if (inner - 1.0).abs() > SEAM_TOL {
                return Err(Error::construction(format!(
                    "the inner arc carries the boundary time map, so F(ρ₁) must be 1 (got {inner})"
                )));
            }
        }
        let patch = SurfacePatch {
            rho_outer: rho0,
            rho_inner: rho1,
            phi_i,
            phi_f,
            first: sector,
            second: None,
        };
        patch.boundary()?;
        Ok(patch)
    }

    pub fn rho_outer(&self) -> f64 {
        self.rho_outer
    }

    pub fn rho_inner(&self) -> f64 {
        self.rho_inner
    }

    pub fn phi_i(&self) -> f64 {
        self.phi_i
    }

    pub fn phi_f(&self) -> f64 {
        self.phi_f
    }

    pub fn is_encircling(&self) -> bool {
        self.second.is_some()
    }

    pub fn first(&self) -> &Sector {
        &self.first
    }

    pub fn second(&self) -> Option<&Sector> {
        self.second.as_ref()
    }

    /// `(φ_lo, φ_hi, sector)` for each angular sector.
    pub fn sectors(&self) -> Vec<(f64, f64, &Sector)> {
        let mut out = vec![(self.phi_i, self.phi_f, &self.first)];
        if let Some(second) = &self.second {
            out.push((self.phi_f, self.phi_i + 2.0 * PI, second));
        }
        out
    }

    fn sector_at(&self, rho: f64, phi: f64) -> Result<&Sector> {
        let rho_ok = rho >= self.rho_inner && rho <= self.rho_outer;
        if rho_ok && phi >= self.phi_i && phi <= self.phi_f {
            return Ok(&self.first);
        }
        if let Some(second) = &self.second {
            if rho_ok && phi > self.phi_f && phi <= self.phi_i + 2.0 * PI {
                return Ok(second);
            }
        }
        Err(Error::domain(format!("point (ρ = {rho}, φ = {phi}) is outside the surface patch")))
    }

    pub fn event(&self, rho: f64, phi: f64) -> Result<Event> {
        let sector = self.sector_at(rho, phi)?;
        Ok(Event::polar(sector.time(rho, phi), rho, phi))
    }

    pub fn wedge_measures(&self, rho: f64, phi: f64) -> Result<WedgeMeasures> {
        let sector = self.sector_at(rho, phi)?;
        Ok(sector_wedge(sector, rho, phi))
    }

    /// The closed boundary curve, oriented consistently with `dρ∧dφ`.
    pub fn boundary(&self) -> Result<SpacetimePath> {
        let (r0, r1, pi_, pf) = (self.rho_outer, self.rho_inner, self.phi_i, self.phi_f);
        let mut segments = vec![Segment::arc(r0, pi_, pf, self.first.tmap.clone())];
        match &self.second {
            Some(second) => segments.push(Segment::arc(r0, pf, pi_ + 2.0 * PI, second.tmap.clone())),
            None => {
                let edge = |phi: f64| RadialTime::Profile {
                    profile: self.first.radial.clone(),
                    scale: self.first.tmap.time(phi),
                };
                segments.push(Segment::radial(pf, r0, r1, edge(pf)));
                if r1 > 0.0 {
                    segments.push(Segment::arc(r1, pf, pi_, self.first.tmap.clone()));
                }
                segments.push(Segment::radial(pi_, r1, r0, edge(pi_)));
            }
        }
        SpacetimePath::new(segments)
    }
}

pub(crate) fn sector_jacobian(sector: &Sector, rho: f64, phi: f64) -> ([f64; 4], [f64; 4]) {
    let (f, df) = (sector.tmap.time(phi), sector.tmap.derivative(phi));
    let (big_f, big_df) = (sector.radial.value(rho), sector.radial.derivative(rho));
    let (s, c) = phi.sin_cos();
    (
        [big_df * f, c, s, 0.0],
        [big_f * df, -rho * s, rho * c, 0.0],
    )
}

pub(crate) fn sector_wedge(sector: &Sector, rho: f64, phi: f64) -> WedgeMeasures {
    let (d_rho, d_phi) = sector_jacobian(sector, rho, phi);
    WedgeMeasures::from_jacobian(d_rho, d_phi)
}
