//! Time-dependent Aharonov–Bohm phases for an infinitely long solenoid.
//!
//! The crate evaluates the solenoid's potentials and field-strength tensor,
//! integrates `A_μ dx^μ` along closed space-time loops, integrates
//! `½ F_{μν} dx^μ ∧ dx^ν` over spanning surfaces (both numerically and through
//! a region-by-region reduction), and turns line integrals into observable
//! phase shifts. Natural units `ħ = c = 1` are used throughout, with metric
//! signature `(+,−,−,−)`.

pub mod error;
pub mod fields;
pub mod flux;
pub mod geometry;
pub mod phase;
pub mod quadrature;
pub mod scenario;
pub mod stokes;

pub use error::{Error, Result};
pub use fields::{apply_gauge, Event, FieldStrength, FourPotential, GaugeFunction, Gauged, SolenoidField};
pub use flux::FluxProfile;
pub use geometry::{
    make_arc_path, winding_number, RadialKind, RadialProfile, RadialTime, Segment, Sector, SmoothFn, SpacetimePath,
    SurfacePatch, TimeMap, WedgeMeasures,
};
pub use phase::{ab_phase_averaged, ab_phase_sinusoidal, ab_phase_two_path, PhaseMethod, PhasePrediction};
pub use quadrature::{
    integrate_1d, integrate_2d, integrate_2d_split, level_crossings, riemann_oracle, IntegralResult, QuadratureConfig,
};
pub use scenario::{run, Report, RunOptions, Scenario};
pub use stokes::{
    lambda_difference, line_integral, line_integral_oracle, stokes_check, surface_integral, surface_integral_semianalytic,
    SemianalyticBreakdown, StokesReport, SurfacePart,
};
