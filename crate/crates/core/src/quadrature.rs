//! Adaptive Gauss–Kronrod quadrature with user breakpoints, and a plain
//! midpoint-rule oracle.
//!
//! `integrate_1d` is a globally adaptive scheme: the interval with the
//! largest error estimate is bisected until the summed estimate meets
//! `max(abs_tol, rel_tol·|value|)` or the interval budget is spent. Each
//! panel is evaluated with the 21-point Kronrod rule and its embedded
//! 10-point Gauss rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the number of panels held by one adaptive run.
    pub max_subdivisions: usize,
    /// Points where the integrand may be non-smooth. For [`integrate_2d`]
    /// these apply to the inner (ρ) variable.
    pub breakpoints: Vec<f64>,
    /// Breakpoints for the outer (φ) variable of [`integrate_2d`].
    pub outer_breakpoints: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            breakpoints: Vec::new(),
            outer_breakpoints: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    pub fn with_outer_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.outer_breakpoints = breakpoints;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || !self.abs_tol.is_finite() || !self.rel_tol.is_finite() {
            return Err(Error::domain(format!(
                "quadrature tolerances must be positive and finite (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if self.breakpoints.iter().chain(&self.outer_breakpoints).any(|b| !b.is_finite()) {
            return Err(Error::domain("breakpoints must be finite"));
        }
        Ok(())
    }

    fn tightened(&self, factor: f64) -> Self {
        QuadratureConfig {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_subdivisions: self.max_subdivisions,
            breakpoints: self.breakpoints.clone(),
            outer_breakpoints: Vec::new(),
        }
    }

    /// Tolerance target for a given value.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegralResult {
    pub fn zero() -> Self {
        IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Sum of two results; error estimates add.
    pub fn combine(self, other: IntegralResult) -> IntegralResult {
        IntegralResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, factor: f64) -> IntegralResult {
        IntegralResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }

    pub fn negate(self) -> IntegralResult {
        IntegralResult {
            value: -self.value,
            ..self
        }
    }
}

// 21-point Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452570,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    // 50ε∫|f|: bisection cannot push the estimate below this
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn eval_checked<F: FnMut(f64) -> Result<f64>>(f: &mut F, x: f64) -> Result<f64> {
    let y = f(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

fn gauss_kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = eval_checked(f, center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut samples = [(0.0f64, 0.0f64); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval_checked(f, center - dx)?;
        let f2 = eval_checked(f, center + dx)?;
        samples[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((samples[j].0 - mean).abs() + (samples[j].1 - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) { 50.0 * f64::EPSILON * res_abs } else { 0.0 };
    error = error.max(floor);
    Ok(Panel { lo, hi, value, error, floor })
}

const POINTS_PER_PANEL: usize = 21;
const FLOOR_SLACK: f64 = 0.1;

pub(crate) fn try_integrate_1d<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("integration limits must be finite (got {a}, {b})")));
    }
    if a == b {
        return Ok(IntegralResult::zero());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut cuts: Vec<f64> = cfg.breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        heap.push(gauss_kronrod(&mut f, w[0], w[1])?);
        evaluations += POINTS_PER_PANEL;
    }

    let totals = |heap: &BinaryHeap<Panel>, settled: &[Panel]| {
        let mut panels: Vec<&Panel> = heap.iter().chain(settled.iter()).collect();
        panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        panels.iter().fold((0.0, 0.0, 0.0), |(v, e, r), p| (v + p.value, e + p.error, r + p.floor))
    };
    // below the roundoff floor only the excess over it has to meet a slice of the target
    let reachable = |value: f64, floor: f64| {
        let target = cfg.target(value);
        target.max(floor + FLOOR_SLACK * target)
    };

    let mut value_sum: f64 = heap.iter().map(|p| p.value).sum();
    let mut error_sum: f64 = heap.iter().map(|p| p.error).sum();
    let mut floor_sum: f64 = heap.iter().map(|p| p.floor).sum();
    let converged = loop {
        if error_sum <= reachable(value_sum, floor_sum) {
            let (v, e, r) = totals(&heap, &settled);
            (value_sum, error_sum, floor_sum) = (v, e, r);
            if error_sum <= reachable(value_sum, floor_sum) {
                break true;
            }
        }
        if heap.len() + settled.len() >= cfg.max_subdivisions {
            break false;
        }
        let Some(worst) = heap.pop() else {
            // every panel is settled
            let (v, e, r) = totals(&heap, &settled);
            break e <= reachable(v, r);
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let width = worst.hi - worst.lo;
        let too_narrow = !(mid > worst.lo && mid < worst.hi) || width <= 4.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs());
        if too_narrow || worst.error <= worst.floor {
            settled.push(worst);
            continue;
        }
        let left = gauss_kronrod(&mut f, worst.lo, mid)?;
        let right = gauss_kronrod(&mut f, mid, worst.hi)?;
        evaluations += 2 * POINTS_PER_PANEL;
        value_sum += left.value + right.value - worst.value;
        error_sum += left.error + right.error - worst.error;
        floor_sum += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
    };
    let (value, error, floor) = totals(&heap, &settled);
    Ok(IntegralResult {
        value: sign * value,
        error_estimate: error,
        evaluations,
        converged: converged && error <= reachable(value, floor),
    })
}

/// Integrates `f` over `[a, b]`; `a > b` yields the negated integral over
/// `[b, a]`. Breakpoints outside the open interval are ignored.
///
/// Running out of subdivisions is not an error: the best estimate is
/// returned with `converged == false`.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_1d(|x| Ok(f(x)), a, b, cfg)
}

/// Iterated integral `∫ dφ ∫ dρ f(ρ, φ)` with ρ inner.
///
/// Inner integrals use tolerances ten times tighter than `cfg` and honour
/// `cfg.breakpoints`; the outer integral honours `cfg.outer_breakpoints`.
/// The reported error is the outer estimate.
pub fn integrate_2d<F>(f: F, rho_range: (f64, f64), phi_range: (f64, f64), cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64, f64) -> f64,
{
    integrate_2d_split(f, rho_range, phi_range, cfg, |_| Vec::new())
}

/// As [`integrate_2d`], with extra inner breakpoints that depend on the
/// outer variable, for integrands whose kinks lie along curves.
pub fn integrate_2d_split<F, B>(
    mut f: F,
    rho_range: (f64, f64),
    phi_range: (f64, f64),
    cfg: &QuadratureConfig,
    mut inner_breakpoints: B,
) -> Result<IntegralResult>
where
    F: FnMut(f64, f64) -> f64,
    B: FnMut(f64) -> Vec<f64>,
{
    cfg.validate()?;
    let base_inner = cfg.tightened(10.0);
    let outer_cfg = QuadratureConfig {
        breakpoints: cfg.outer_breakpoints.clone(),
        outer_breakpoints: Vec::new(),
        ..cfg.clone()
    };
    let mut inner_evals = 0;
    let mut inner_ok = true;
    let outer = try_integrate_1d(
        |phi| {
            let extra = inner_breakpoints(phi);
            let r = if extra.is_empty() {
                try_integrate_1d(|rho| Ok(f(rho, phi)), rho_range.0, rho_range.1, &base_inner)?
            } else {
                let mut inner_cfg = base_inner.clone();
                inner_cfg.breakpoints.extend(extra);
                try_integrate_1d(|rho| Ok(f(rho, phi)), rho_range.0, rho_range.1, &inner_cfg)?
            };
            inner_evals += r.evaluations;
            inner_ok &= r.converged;
            Ok(r.value)
        },
        phi_range.0,
        phi_range.1,
        &outer_cfg,
    )?;
    Ok(IntegralResult {
        evaluations: inner_evals,
        converged: outer.converged && inner_ok,
        ..outer
    })
}

const CROSSING_SAMPLES: usize = 64;

/// Points of the open interval `(lo, hi)` where `g` takes one of `levels`.
///
/// Sign changes of `g − level` are bracketed on a uniform grid and refined by
/// bisection, so pairs of crossings closer than the grid step can be missed.
pub fn level_crossings<G>(g: G, lo: f64, hi: f64, levels: &[f64]) -> Vec<f64>
where
    G: Fn(f64) -> f64,
{
    if levels.is_empty() || !(lo < hi) {
        return Vec::new();
    }
    let xs: Vec<f64> = (0..=CROSSING_SAMPLES)
        .map(|k| if k == CROSSING_SAMPLES { hi } else { lo + (hi - lo) * k as f64 / CROSSING_SAMPLES as f64 })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut out = Vec::new();
    for &level in levels {
        for k in 0..CROSSING_SAMPLES {
            let (a, b) = (ys[k] - level, ys[k + 1] - level);
            if a == 0.0 {
                if b != 0.0 {
                    out.push(xs[k]);
                }
            } else if a * b < 0.0 {
                let (mut l, mut r) = (xs[k], xs[k + 1]);
                for _ in 0..200 {
                    let m = 0.5 * (l + r);
                    if !(m > l && m < r) {
                        break;
                    }
                    if (g(m) - level) * a > 0.0 {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                out.push(0.5 * (l + r));
            }
        }
    }
    out.retain(|&x| x > lo && x < hi);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Midpoint rule with `n` equal panels. Deliberately non-adaptive; used as
/// an independent cross-check of the adaptive routines.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn riemann_oracle<F>(mut f: F, a: f64, b: f64, n: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    assert!(n >= 1, "riemann_oracle needs at least one panel");
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        sum += f(a + (k as f64 + 0.5) * h);
    }
    sum * h
}
