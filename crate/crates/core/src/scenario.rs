//! JSON scenario files and the reports produced from them.
//!
//! A scenario names a solenoid, an optional surface geometry, the charge and
//! one task. [`Scenario::from_json_slice`] is the single entry point for
//! untrusted input; every error it returns names the offending field.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::SolenoidField;
use crate::flux::FluxProfile;
use crate::geometry::{make_arc_path, winding_number, RadialProfile, Sector, SpacetimePath, SurfacePatch, TimeMap};
use crate::phase::{ab_phase_averaged, ab_phase_sinusoidal, ab_phase_two_path, PhasePrediction};
use crate::quadrature::{riemann_oracle, IntegralResult, QuadratureConfig};
use crate::stokes::{
    lambda_difference, line_integral, line_integral_oracle, semianalytic_boundary_integrals, stokes_check,
    BoundaryTarget, StokesReport,
};

pub const TOOL_NAME: &str = "abstokes";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Panels used by the midpoint-rule cross-checks.
pub const ORACLE_PANELS: usize = 200_000;

const MAX_SWEEP_STEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub solenoid: SolenoidSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    /// Charge magnitude `e`.
    #[serde(default = "one")]
    pub charge: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub task: Task,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolenoidSpec {
    pub radius: f64,
    pub flux: FluxProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub rho0: f64,
    /// Inner radius; present only for non-encircling annular sectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho1: Option<f64>,
    pub phi_i: f64,
    pub phi_f: f64,
    /// Time map of the `[φ_i, φ_f]` sector.
    pub f: TimeMapSpec,
    /// Time map of the `[φ_f, φ_i + 2π]` sector of an encircling surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<TimeMapSpec>,
    pub radial: RadialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeMapSpec {
    UniformAngular {
        omega: f64,
        #[serde(default)]
        t0: f64,
        #[serde(default = "one")]
        sign: f64,
    },
    Affine {
        slope: f64,
        intercept: f64,
    },
}

impl TimeMapSpec {
    pub fn build(&self) -> TimeMap {
        match *self {
            TimeMapSpec::UniformAngular { omega, t0, sign } => TimeMap::uniform(omega, t0, sign),
            TimeMapSpec::Affine { slope, intercept } => TimeMap::affine(slope, intercept),
        }
    }
}

/// Radial profile used by every sector of the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialSpec {
    Linear {},
    Power { p: f64 },
    Unit {},
    Bump { rho_inner: f64, amplitude: f64 },
}

impl RadialSpec {
    pub fn build(&self, rho0: f64) -> Result<RadialProfile> {
        match *self {
            RadialSpec::Linear {} => RadialProfile::linear(rho0),
            RadialSpec::Power { p } => RadialProfile::power(rho0, p),
            RadialSpec::Unit {} => RadialProfile::unit(rho0),
            RadialSpec::Bump { rho_inner, amplitude } => RadialProfile::bump(rho0, rho_inner, amplitude),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
}

impl QuadratureSpec {
    pub fn build(&self) -> Result<QuadratureConfig> {
        let mut cfg = QuadratureConfig::default();
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.max_subdivisions {
            cfg.max_subdivisions = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    StokesCheck {},
    AbPhase {},
    LoopCheck {},
    Sweep {
        parameter: SweepParameter,
        from: f64,
        to: f64,
        steps: usize,
        #[serde(default)]
        route: SweepRoute,
        /// Fixed `t_f` for sweeps over `omega`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_f: Option<f64>,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::StokesCheck {} => "stokes_check",
            Task::AbPhase {} => "ab_phase",
            Task::LoopCheck {} => "loop_check",
            Task::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `Ωt_f` for a sinusoidal profile at fixed `Ω`.
    OmegaTf,
    /// Observation time `t_f` at a fixed profile.
    #[serde(rename = "t_f")]
    TF,
    /// Flux angular frequency `Ω` at fixed `t_f`.
    Omega,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepRoute {
    #[default]
    Formula,
    LineIntegral,
}

fn config_err(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        Error::Domain(m) | Error::Construction(m) => Error::config(field, m),
        other => Error::config(field, other.to_string()),
    }
}

fn require(ok: bool, field: &str, message: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, message))
    }
}

impl GeometrySpec {
    fn radial(&self) -> Result<RadialProfile> {
        self.radial.build(self.rho0).map_err(config_err("geometry.radial"))
    }

    fn check_basics(&self) -> Result<()> {
        require(self.rho0.is_finite() && self.rho0 > 0.0, "geometry.rho0", "must be positive and finite")?;
        require(self.phi_i.is_finite(), "geometry.phi_i", "must be finite")?;
        require(self.phi_f.is_finite(), "geometry.phi_f", "must be finite")?;
        Ok(())
    }

    /// Full disc of radius `ρ₀` spanned by the `(F, f)` and `(G, g)` sectors.
    pub fn encircling_patch(&self) -> Result<SurfacePatch> {
        self.check_basics()?;
        require(self.rho1.is_none(), "geometry.rho1", "an encircling surface has no inner radius")?;
        let g = self.g.as_ref().ok_or_else(|| Error::config("geometry.g", "an encircling surface needs the second time map"))?;
        let radial = self.radial()?;
        SurfacePatch::encircling(
            self.rho0,
            self.phi_i,
            self.phi_f,
            Sector::new(self.f.build(), radial.clone()),
            Sector::new(g.build(), radial),
        )
        .map_err(config_err("geometry"))
    }

    /// Annular sector between `ρ₁` and `ρ₀`.
    pub fn annular_patch(&self) -> Result<SurfacePatch> {
        self.check_basics()?;
        let rho1 = self.rho1.ok_or_else(|| Error::config("geometry.rho1", "a non-encircling loop needs an inner radius"))?;
        require(rho1.is_finite() && rho1 >= 0.0, "geometry.rho1", "must be nonnegative and finite")?;
        require(self.g.is_none(), "geometry.g", "an annular sector has a single time map")?;
        SurfacePatch::annular_sector(self.rho0, rho1, self.phi_i, self.phi_f, Sector::new(self.f.build(), self.radial()?))
            .map_err(config_err("geometry"))
    }

    pub fn patch(&self) -> Result<SurfacePatch> {
        match self.rho1 {
            Some(_) => self.annular_patch(),
            None => self.encircling_patch(),
        }
    }

    /// The two interferometer arms along the rim of the encircling surface:
    /// `φ_i → φ_f` with `f`, and `φ_i + 2π → φ_f` with `g`.
    pub fn arms(&self) -> Result<(SpacetimePath, SpacetimePath)> {
        let patch = self.encircling_patch()?;
        let g = patch.second().expect("encircling patch has two sectors");
        let c1 = make_arc_path(self.rho0, self.phi_i, self.phi_f, patch.first().tmap.clone()).map_err(config_err("geometry.f"))?;
        let c2 = make_arc_path(self.rho0, self.phi_i + 2.0 * PI, self.phi_f, g.tmap.clone()).map_err(config_err("geometry.g"))?;
        Ok((c1, c2))
    }

    /// Arms at constant angular speed that leave `φ_i` at `t = 0` and meet at
    /// `φ_f` at `t = t_f`.
    pub fn uniform_arms(&self, t_f: f64) -> Result<(SpacetimePath, SpacetimePath)> {
        self.check_basics()?;
        let upper = self.phi_f - self.phi_i;
        require(upper > 0.0 && upper < 2.0 * PI, "geometry.phi_f", "need φ_i < φ_f < φ_i + 2π")?;
        let lower = 2.0 * PI - upper;
        let start = self.phi_i + 2.0 * PI;
        let c1 = make_arc_path(self.rho0, self.phi_i, self.phi_f, TimeMap::uniform(upper / t_f, -self.phi_i * t_f / upper, 1.0))?;
        let c2 = make_arc_path(self.rho0, start, self.phi_f, TimeMap::uniform(lower / t_f, start * t_f / lower, -1.0))?;
        Ok((c1, c2))
    }
}

impl Scenario {
    /// Parses and validates a scenario.
    pub fn from_json_slice(bytes: &[u8]) -> Result<Scenario> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path.is_empty() || path == "." { "<document>".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_json_str(text: &str) -> Result<Scenario> {
        Scenario::from_json_slice(text.as_bytes())
    }

    pub fn field(&self) -> Result<SolenoidField> {
        let r = self.solenoid.radius;
        require(r.is_finite() && r > 0.0, "solenoid.radius", "must be positive and finite")?;
        SolenoidField::new(r, self.solenoid.flux).map_err(config_err("solenoid.flux"))
    }

    pub fn quadrature_config(&self) -> Result<QuadratureConfig> {
        self.quadrature.build().map_err(config_err("quadrature"))
    }

    fn geometry(&self) -> Result<&GeometrySpec> {
        self.geometry
            .as_ref()
            .ok_or_else(|| Error::config("geometry", format!("task `{}` needs a geometry", self.task.name())))
    }

    /// Checks every parameter against the preconditions of the operations the
    /// task will call.
    pub fn validate(&self) -> Result<()> {
        self.field()?;
        self.quadrature_config()?;
        require(self.charge.is_finite() && self.charge >= 0.0, "charge", "must be a finite magnitude ≥ 0")?;
        match &self.task {
            Task::StokesCheck {} => {
                self.geometry()?.patch()?;
            }
            Task::AbPhase {} => {
                self.geometry()?.arms()?;
            }
            Task::LoopCheck {} => {
                let g = self.geometry()?;
                let patch = g.annular_patch()?;
                require(patch.rho_inner() > 0.0, "geometry.rho1", "must be positive so the loop avoids the axis")?;
            }
            Task::Sweep { .. } => {
                self.sweep_grid()?;
                // building every point surfaces range errors before any work starts
                for x in self.sweep_grid()? {
                    self.sweep_inputs(x)?;
                }
                if let Task::Sweep { route: SweepRoute::LineIntegral, .. } = self.task {
                    self.geometry()?.check_basics()?;
                }
            }
        }
        Ok(())
    }

    /// Parameter values of a sweep: `steps` evenly spaced points including
    /// both ends, plus every nonzero multiple of π strictly inside the range
    /// for `Ωt_f` sweeps.
    pub fn sweep_grid(&self) -> Result<Vec<f64>> {
        let Task::Sweep { parameter, from, to, steps, .. } = self.task else {
            return Err(Error::config("task", "not a sweep"));
        };
        require(from.is_finite(), "task.from", "must be finite")?;
        require(to.is_finite(), "task.to", "must be finite")?;
        require(steps >= 1 && steps <= MAX_SWEEP_STEPS, "task.steps", format!("must be between 1 and {MAX_SWEEP_STEPS}"))?;
        require(steps > 1 || from == to, "task.steps", "a single step needs from == to")?;
        let mut grid: Vec<f64> = (0..steps)
            .map(|k| if k + 1 == steps { to } else { from + (to - from) * k as f64 / (steps - 1) as f64 })
            .collect();
        if parameter == SweepParameter::OmegaTf {
            let (lo, hi) = (from.min(to), from.max(to));
            let k_lo = (lo / PI).floor() as i64;
            let k_hi = (hi / PI).ceil() as i64;
            for k in k_lo..=k_hi {
                let m = k as f64 * PI;
                if k != 0 && m > lo && m < hi && !grid.contains(&m) {
                    grid.push(m);
                }
            }
            let ascending = to >= from;
            grid.sort_by(|a, b| if ascending { a.total_cmp(b) } else { b.total_cmp(a) });
        }
        Ok(grid)
    }

    /// Profile and `t_f` for one sweep point.
    fn sweep_inputs(&self, x: f64) -> Result<(FluxProfile, f64)> {
        let Task::Sweep { parameter, t_f, .. } = self.task else {
            return Err(Error::config("task", "not a sweep"));
        };
        let profile = self.solenoid.flux;
        let sinusoid = || match profile {
            FluxProfile::Sinusoidal { b0, omega } => Ok((b0, omega)),
            _ => Err(Error::config("solenoid.flux", format!("a sweep over `{}` needs a sinusoidal profile", parameter.name()))),
        };
        let (profile, t_f) = match parameter {
            SweepParameter::TF => (profile, x),
            SweepParameter::OmegaTf => {
                let (_, omega) = sinusoid()?;
                require(omega != 0.0, "solenoid.flux.omega", "must be nonzero for an omega_tf sweep")?;
                (profile, x / omega)
            }
            SweepParameter::Omega => {
                let (b0, _) = sinusoid()?;
                let t_f = t_f.ok_or_else(|| Error::config("task.t_f", "a sweep over omega needs a fixed t_f"))?;
                (FluxProfile::sinusoidal(b0, x), t_f)
            }
        };
        require(t_f.is_finite() && t_f > 0.0, "task", format!("sweep point {x} gives t_f = {t_f}, which is not positive"))?;
        Ok((profile, t_f))
    }
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::OmegaTf => "omega_tf",
            SweepParameter::TF => "t_f",
            SweepParameter::Omega => "omega",
        }
    }
}

/// Adaptive value against the midpoint-rule oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub quantity: String,
    pub adaptive: f64,
    pub oracle: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    pub fn new(quantity: impl Into<String>, adaptive: f64, oracle: f64) -> Self {
        let difference = (adaptive - oracle).abs();
        let tolerance = 1e-5 * (1.0 + adaptive.abs());
        OracleCheck {
            quantity: quantity.into(),
            adaptive,
            oracle,
            difference,
            tolerance,
            passed: difference <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbPhaseResult {
    pub two_path: PhasePrediction,
    /// Present when the first arm starts at `t = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub averaged: Option<PhasePrediction>,
    /// Present for sinusoidal profiles alongside `averaged`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sinusoidal: Option<PhasePrediction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopCheckResult {
    pub winding_number: i64,
    /// `∮ A_μ dx^μ` around the sector boundary.
    pub loop_integral: IntegralResult,
    /// `Λ(x; C₁) − Λ(x; C₂)` for the two halves of the boundary, which share
    /// the events at `(ρ₁, φ_i)` and `(ρ₀, φ_f)`.
    pub lambda_difference: IntegralResult,
    pub stokes: StokesReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub t_f: f64,
    pub prediction: PhasePrediction,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub route: SweepRoute,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// `param,phase,error_estimate` rows; closed-form points report a zero
    /// error estimate.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["param", "phase", "error_estimate"]).expect("in-memory write");
        for p in &self.points {
            let err = p.prediction.error_estimate.unwrap_or(0.0);
            w.serialize((p.param, p.prediction.phase, err)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum TaskResult {
    StokesCheck(Box<StokesReport>),
    AbPhase(AbPhaseResult),
    LoopCheck(Box<LoopCheckResult>),
    Sweep(SweepResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub task: &'static str,
    pub scenario: Scenario,
    pub converged: bool,
    pub results: TaskResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_checks: Option<Vec<OracleCheck>>,
}

impl Report {
    pub fn oracle_passed(&self) -> bool {
        self.oracle_checks.iter().flatten().all(|c| c.passed)
    }

    /// 0 when everything converged (and every oracle check passed), 2
    /// otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.converged && self.oracle_passed() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn csv(&self) -> Option<String> {
        match &self.results {
            TaskResult::Sweep(s) => Some(s.to_csv()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub oracle: bool,
}

fn path_oracle(field: &SolenoidField, label: &str, path: &SpacetimePath, value: f64) -> OracleCheck {
    OracleCheck::new(label, value, line_integral_oracle(field, path, ORACLE_PANELS))
}

fn stokes_oracles(field: &SolenoidField, patch: &SurfacePatch, report: &StokesReport, out: &mut Vec<OracleCheck>) -> Result<()> {
    out.push(path_oracle(field, "boundary line integral", &patch.boundary()?, report.line_value.value));
    let mut closed = 0.0;
    for b in semianalytic_boundary_integrals(field, patch) {
        let oracle = riemann_oracle(&b.integrand, b.lo, b.hi, ORACLE_PANELS);
        match b.target {
            BoundaryTarget::Region(k) => {
                let region = &report.semianalytic.electric_regions[k];
                out.push(OracleCheck::new(format!("region {} boundary terms", region.label), region.boundary_terms.value, oracle));
            }
            BoundaryTarget::ClosedForm => closed += oracle,
        }
    }
    out.push(OracleCheck::new("boundary closed form", report.semianalytic.boundary_closed_form.value, closed));
    Ok(())
}

/// Runs the scenario's task.
pub fn run(scenario: &Scenario, opts: RunOptions) -> Result<Report> {
    scenario.validate()?;
    let field = scenario.field()?;
    let cfg = scenario.quadrature_config()?;
    let e = scenario.charge;
    let mut oracle = opts.oracle.then(Vec::new);

    let (results, converged) = match &scenario.task {
        Task::StokesCheck {} => {
            let patch = scenario.geometry()?.patch()?;
            let report = stokes_check(&field, &patch, &cfg)?;
            if let Some(out) = oracle.as_mut() {
                stokes_oracles(&field, &patch, &report, out)?;
            }
            let converged = report.converged;
            (TaskResult::StokesCheck(Box::new(report)), converged)
        }
        Task::AbPhase {} => {
            let geometry = scenario.geometry()?;
            let (c1, c2) = geometry.arms()?;
            let two_path = ab_phase_two_path(&field, &c1, &c2, e, &cfg)?;
            let (t_start, t_f) = (c1.start().t, c1.end().t);
            let (averaged, sinusoidal) = if t_start == 0.0 && t_f > 0.0 {
                let avg = ab_phase_averaged(&field.profile().clone(), field.radius(), t_f, e)?;
                let sin = match *field.profile() {
                    FluxProfile::Sinusoidal { b0, omega } => {
                        Some(ab_phase_sinusoidal(PI * field.radius().powi(2) * b0, omega, t_f, e)?)
                    }
                    _ => None,
                };
                (Some(avg), sin)
            } else {
                (None, None)
            };
            if let Some(out) = oracle.as_mut() {
                out.push(path_oracle(&field, "arm c1", &c1, line_integral(&field, &c1, &cfg)?.value));
                out.push(path_oracle(&field, "arm c2", &c2, line_integral(&field, &c2, &cfg)?.value));
            }
            let converged = two_path.converged;
            (TaskResult::AbPhase(AbPhaseResult { two_path, averaged, sinusoidal }), converged)
        }
        Task::LoopCheck {} => {
            let patch = scenario.geometry()?.annular_patch()?;
            let boundary = patch.boundary()?;
            // outer arc, radial leg in at φ_f, inner arc back, radial leg out at φ_i
            let segs = boundary.segments();
            let via_outer = SpacetimePath::new(vec![segs[3].clone(), segs[0].clone()])?;
            let via_inner = SpacetimePath::new(vec![segs[2].reversed(), segs[1].reversed()])?;
            let loop_integral = line_integral(&field, &boundary, &cfg)?;
            let lambda = lambda_difference(&field, &via_outer, &via_inner, &cfg)?;
            let stokes = stokes_check(&field, &patch, &cfg)?;
            if let Some(out) = oracle.as_mut() {
                out.push(path_oracle(&field, "loop integral", &boundary, loop_integral.value));
                stokes_oracles(&field, &patch, &stokes, out)?;
            }
            let converged = loop_integral.converged && lambda.converged && stokes.converged;
            let result = LoopCheckResult {
                winding_number: winding_number(&boundary)?,
                loop_integral,
                lambda_difference: lambda,
                stokes,
            };
            (TaskResult::LoopCheck(Box::new(result)), converged)
        }
        Task::Sweep { parameter, route, .. } => {
            let grid = scenario.sweep_grid()?;
            let evaluated: Vec<(SweepPoint, Option<Vec<OracleCheck>>)> = grid
                .par_iter()
                .map(|&x| {
                    let (profile, t_f) = scenario.sweep_inputs(x)?;
                    let (prediction, checks) = match route {
                        SweepRoute::Formula => (ab_phase_averaged(&profile, field.radius(), t_f, e)?, None),
                        SweepRoute::LineIntegral => {
                            let point_field = SolenoidField::new(field.radius(), profile)?;
                            let (c1, c2) = scenario.geometry()?.uniform_arms(t_f)?;
                            let p = ab_phase_two_path(&point_field, &c1, &c2, e, &cfg)?;
                            let checks = opts.oracle.then(|| {
                                let oracle = line_integral_oracle(&point_field, &c1, ORACLE_PANELS)
                                    - line_integral_oracle(&point_field, &c2, ORACLE_PANELS);
                                vec![OracleCheck::new(format!("phase at {x}"), p.phase, -e * oracle)]
                            });
                            (p, checks)
                        }
                    };
                    Ok((SweepPoint { param: x, t_f, prediction }, checks))
                })
                .collect::<Result<_>>()?;
            let mut points = Vec::with_capacity(evaluated.len());
            for (p, checks) in evaluated {
                if let (Some(out), Some(c)) = (oracle.as_mut(), checks) {
                    out.extend(c);
                }
                points.push(p);
            }
            let converged = points.iter().all(|p| p.prediction.converged);
            (TaskResult::Sweep(SweepResult { parameter: *parameter, route: *route, points }), converged)
        }
    };

    Ok(Report {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        task: scenario.task.name(),
        scenario: scenario.clone(),
        converged,
        results,
        oracle_checks: oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STOKES: &str = r#"{
        "name": "ramp",
        "solenoid": {"radius": 1.0, "flux": {"kind": "linear_ramp", "b0": 1.0, "b1": 0.5}},
        "geometry": {
            "rho0": 2.0, "phi_i": 0.0, "phi_f": 3.141592653589793,
            "f": {"kind": "uniform_angular", "omega": 1.0},
            "g": {"kind": "uniform_angular", "omega": 1.0, "t0": 6.283185307179586, "sign": -1.0},
            "radial": {"kind": "linear"}
        },
        "task": {"kind": "stokes_check"}
    }"#;

    fn with_task(task: &str) -> String {
        STOKES.replace(r#"{"kind": "stokes_check"}"#, task)
    }

    fn config_field(text: &str) -> String {
        match Scenario::from_json_str(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn stokes_scenario_runs() {
        let s = Scenario::from_json_str(STOKES).unwrap();
        assert_eq!(s.charge, 1.0);
        let report = run(&s, RunOptions::default()).unwrap();
        assert_eq!(report.exit_code(), 0);
        let TaskResult::StokesCheck(r) = &report.results else { panic!() };
        assert!(r.residual_line_vs_semianalytic <= 1e-9);
        assert!(report.csv().is_none());
    }

    #[test]
    fn report_is_deterministic_and_round_trips() {
        let s = Scenario::from_json_str(STOKES).unwrap();
        let a = run(&s, RunOptions::default()).unwrap().to_json();
        let b = run(&s, RunOptions::default()).unwrap().to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        let line = v["results"]["line_value"]["value"].as_f64().unwrap();
        let TaskResult::StokesCheck(r) = run(&s, RunOptions::default()).unwrap().results else { panic!() };
        assert_eq!(line.to_bits(), r.line_value.value.to_bits());
        // the echo parses back to the same scenario
        let echo: Scenario = serde_json::from_value(v["scenario"].clone()).unwrap();
        assert_eq!(echo, s);
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(config_field(&STOKES.replace(r#""radius": 1.0"#, r#""radius": -1.0"#)), "solenoid.radius");
        assert_eq!(config_field(&STOKES.replace(r#""rho0": 2.0"#, r#""rho0": 2.0, "rh01": 1"#)), "geometry.rh01");
        assert_eq!(config_field(&STOKES.replace(r#""b1": 0.5"#, r#""b1": "fast""#)), "solenoid.flux");
        assert_eq!(config_field(&STOKES.replace(r#""kind": "linear"}"#, r#""kind": "power", "p": 0.5}"#)), "geometry.radial");
        assert_eq!(config_field(&STOKES.replace(r#""t0": 6.283185307179586, "#, "")), "geometry");
        assert_eq!(config_field(&with_task(r#"{"kind": "loop_check"}"#)), "geometry.rho1");
        assert_eq!(config_field(&with_task(r#"{"kind": "sweep", "parameter": "omega_tf", "from": 0.1, "to": 1, "steps": 3}"#)), "solenoid.flux");
        assert_eq!(config_field(&with_task(r#"{"kind": "sweep", "parameter": "t_f", "from": 0.1, "to": 1, "steps": 0}"#)), "task.steps");
        assert_eq!(config_field(&STOKES.replace(r#""name": "ramp","#, r#""name": "ramp", "charge": -1,"#)), "charge");
        assert_eq!(config_field(&STOKES.replace(r#""name": "ramp","#, r#""name": "ramp", "quadrature": {"rel_tol": 0},"#)), "quadrature");
        assert_eq!(config_field("not json"), "<document>");
    }

    #[test]
    fn unknown_fields_rejected_everywhere() {
        for (from, to) in [
            (r#""name": "ramp","#, r#""name": "ramp", "extra": 1,"#),
            (r#""task": {"kind": "stokes_check"}"#, r#""task": {"kind": "stokes_check", "steps": 3}"#),
            (r#""kind": "linear"}"#, r#""kind": "linear", "p": 2}"#),
            (r#""b1": 0.5"#, r#""b1": 0.5, "b2": 1"#),
        ] {
            let text = STOKES.replace(from, to);
            assert!(matches!(Scenario::from_json_str(&text), Err(Error::Config { .. })), "{to}");
        }
    }

    fn sinusoid_sweep(route: &str) -> Scenario {
        let text = with_task(&format!(
            r#"{{"kind": "sweep", "parameter": "omega_tf", "from": 0.1, "to": 10.0, "steps": 100, "route": "{route}"}}"#
        ))
        .replace(r#"{"kind": "linear_ramp", "b0": 1.0, "b1": 0.5}"#, r#"{"kind": "sinusoidal", "b0": 1.0, "omega": 2.0}"#);
        Scenario::from_json_str(&text).unwrap()
    }

    #[test]
    fn omega_tf_grid_includes_multiples_of_pi() {
        let s = sinusoid_sweep("formula");
        let grid = s.sweep_grid().unwrap();
        assert_eq!(grid.len(), 103);
        assert_eq!(grid[0], 0.1);
        assert_eq!(*grid.last().unwrap(), 10.0);
        for k in 1..=3 {
            assert!(grid.contains(&(k as f64 * PI)));
        }
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sweep_formula_traces_sinc() {
        let report = run(&sinusoid_sweep("formula"), RunOptions::default()).unwrap();
        assert_eq!(report.exit_code(), 0);
        let TaskResult::Sweep(sweep) = &report.results else { panic!() };
        let at_pi = sweep.points.iter().find(|p| p.param == PI).unwrap();
        assert!(at_pi.prediction.phase.abs() < 1e-9);
        let csv = report.csv().unwrap();
        assert!(csv.starts_with("param,phase,error_estimate\n"));
        assert_eq!(csv.lines().count(), 104);
        assert!(!csv.contains('\r'));
        let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row[0], 0.1);
        assert_eq!(row[1], sweep.points[0].prediction.phase);
    }

    #[test]
    fn sweep_line_route_agrees_with_formula() {
        let mut s = sinusoid_sweep("line_integral");
        if let Task::Sweep { steps, .. } = &mut s.task {
            *steps = 5;
        }
        let report = run(&s, RunOptions { oracle: true }).unwrap();
        assert_eq!(report.exit_code(), 0);
        let TaskResult::Sweep(sweep) = &report.results else { panic!() };
        for p in &sweep.points {
            let want = ab_phase_sinusoidal(PI, 2.0, p.t_f, 1.0).unwrap().phase;
            assert!((p.prediction.phase - want).abs() <= 1e-9 * (1.0 + want.abs()), "{} {}", p.prediction.phase, want);
        }
        assert_eq!(report.oracle_checks.as_ref().unwrap().len(), sweep.points.len());
    }

    #[test]
    fn ab_phase_task_reports_all_routes() {
        let text = with_task(r#"{"kind": "ab_phase"}"#);
        let report = run(&Scenario::from_json_str(&text).unwrap(), RunOptions { oracle: true }).unwrap();
        assert_eq!(report.exit_code(), 0);
        let TaskResult::AbPhase(r) = &report.results else { panic!() };
        let avg = r.averaged.as_ref().unwrap();
        assert!((r.two_path.phase - avg.phase).abs() <= 1e-9 * (1.0 + avg.phase.abs()));
        assert!(r.sinusoidal.is_none());
    }

    #[test]
    fn loop_check_task() {
        let text = STOKES
            .replace(r#""rho0": 2.0,"#, r#""rho0": 2.0, "rho1": 1.2,"#)
            .replace(r#""g": {"kind": "uniform_angular", "omega": 1.0, "t0": 6.283185307179586, "sign": -1.0},"#, "")
            .replace(r#"{"kind": "linear"}"#, r#"{"kind": "bump", "rho_inner": 1.2, "amplitude": 0.5}"#)
            .replace(r#""stokes_check""#, r#""loop_check""#);
        let report = run(&Scenario::from_json_str(&text).unwrap(), RunOptions { oracle: true }).unwrap();
        assert_eq!(report.exit_code(), 0);
        let TaskResult::LoopCheck(r) = &report.results else { panic!() };
        assert_eq!(r.winding_number, 0);
        assert!(r.loop_integral.value.abs() <= 1e-9);
        assert!(r.lambda_difference.value.abs() <= 1e-9);
    }

    #[test]
    fn non_convergence_gives_status_two() {
        let text = STOKES.replace(
            r#""name": "ramp","#,
            r#""name": "ramp", "quadrature": {"abs_tol": 1e-300, "rel_tol": 1e-300, "max_subdivisions": 1},"#,
        );
        let s = Scenario::from_json_str(&text.replace(r#"{"kind": "linear"}"#, r#"{"kind": "power", "p": 2.5}"#)).unwrap();
        let report = run(&s, RunOptions::default()).unwrap();
        assert!(!report.converged);
        assert_eq!(report.exit_code(), 2);
    }
}
