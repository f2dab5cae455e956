//! Finite-difference certification of the free-boundary system.
//!
//! Every derivative here is a second-order central difference of the
//! numerically inverted Eulerian fields (`u`, `w`, `P`, `η`). The closed-form
//! derivative formulas from [`crate::fields`] only appear as targets that the
//! differences are compared against, never inside a stencil.
//!
//! Residuals are divided by a physical scale before being compared with the
//! dimensionless tolerances:
//!
//! | check      | scale            |
//! |------------|------------------|
//! | momentum   | `k c² e^{kb}`    |
//! | divergence | `c k e^{kb}`     |
//! | vorticity  | `c k e^{kb}`     |
//! | kinematic  | `c`              |
//! | dynamic    | `max(P0, ρg/k)`  |

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    flow_acceleration, flow_map, flow_velocity, jacobian, phase, velocity_gradient, vorticity,
};
use crate::inversion::{eulerian_state, surface_elevation, EulerianState, InversionSettings};
use crate::params::{EulerianPoint, LagrangianLabel, WaveParameters};

/// Central-difference step sizes: `space` in metres, `time` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdStep {
    pub space: f64,
    pub time: f64,
}

impl FdStep {
    /// Spatial step `h` with the matching time step `h / c` (the time a
    /// crest needs to travel `h`).
    pub fn new(space: f64, params: &WaveParameters) -> Result<Self> {
        if !(space.is_finite() && space > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "finite-difference step must be positive, got {space}"
            )));
        }
        Ok(Self {
            space,
            time: space / params.c(),
        })
    }

    /// `1e-5/k` in space and `1e-5/(kc)` in time.
    ///
    /// Near a trochoid surface with `b0 = -0.1/k` the third derivatives of
    /// the Eulerian fields grow like `(1 - e^{kb0})^{-4}`; at `1e-4/k` the
    /// truncation error there exceeds the momentum tolerance.
    pub fn default_for(params: &WaveParameters) -> Self {
        Self {
            space: 1e-5 / params.k(),
            time: 1e-5 / (params.k() * params.c()),
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            space: 0.5 * self.space,
            time: 0.5 * self.time,
        }
    }
}

/// Eulerian fields at a point and its six axis neighbours (±t, ±x, ±z).
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub center: EulerianPoint,
    pub step: FdStep,
    pub state: EulerianState,
    t_plus: EulerianState,
    t_minus: EulerianState,
    x_plus: EulerianState,
    x_minus: EulerianState,
    z_plus: EulerianState,
    z_minus: EulerianState,
}

fn neighbour(
    point: EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<EulerianState> {
    eulerian_state(&point, params, settings).map_err(|e| match e {
        Error::NotInDomain { t, x, z, .. } => Error::StencilOutsideDomain { t, x, z },
        other => other,
    })
}

impl Stencil {
    pub fn evaluate(
        point: &EulerianPoint,
        params: &WaveParameters,
        settings: &InversionSettings,
        step: FdStep,
    ) -> Result<Self> {
        let state = eulerian_state(point, params, settings)?;
        let at = |dt, dx, dz| neighbour(point.shifted(dt, dx, dz), params, settings);
        let (h, ht) = (step.space, step.time);
        Ok(Self {
            center: *point,
            step,
            state,
            t_plus: at(ht, 0.0, 0.0)?,
            t_minus: at(-ht, 0.0, 0.0)?,
            x_plus: at(0.0, h, 0.0)?,
            x_minus: at(0.0, -h, 0.0)?,
            z_plus: at(0.0, 0.0, h)?,
            z_minus: at(0.0, 0.0, -h)?,
        })
    }

    fn diff<F: Fn(&EulerianState) -> f64>(
        plus: &EulerianState,
        minus: &EulerianState,
        step: f64,
        f: F,
    ) -> f64 {
        (f(plus) - f(minus)) / (2.0 * step)
    }

    /// `(∂_t, ∂_x, ∂_z)` of the quantity `f`.
    fn gradient<F: Fn(&EulerianState) -> f64 + Copy>(&self, f: F) -> (f64, f64, f64) {
        (
            Self::diff(&self.t_plus, &self.t_minus, self.step.time, f),
            Self::diff(&self.x_plus, &self.x_minus, self.step.space, f),
            Self::diff(&self.z_plus, &self.z_minus, self.step.space, f),
        )
    }

    pub fn label(&self) -> LagrangianLabel {
        self.state.label
    }

    /// Material derivatives `(Du/Dt, Dw/Dt)` from the stencil.
    pub fn material_acceleration(&self) -> (f64, f64) {
        let (u, w) = self.state.velocity;
        let (u_t, u_x, u_z) = self.gradient(|s| s.velocity.0);
        let (w_t, w_x, w_z) = self.gradient(|s| s.velocity.1);
        (u_t + u * u_x + w * u_z, w_t + u * w_x + w * w_z)
    }

    pub fn pressure_gradient(&self) -> (f64, f64) {
        let (_, p_x, p_z) = self.gradient(|s| s.pressure);
        (p_x, p_z)
    }

    pub fn divergence(&self) -> f64 {
        let (_, u_x, _) = self.gradient(|s| s.velocity.0);
        let (_, _, w_z) = self.gradient(|s| s.velocity.1);
        u_x + w_z
    }

    /// `u_z − w_x`.
    pub fn vorticity(&self) -> f64 {
        let (_, _, u_z) = self.gradient(|s| s.velocity.0);
        let (_, w_x, _) = self.gradient(|s| s.velocity.1);
        u_z - w_x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumResidual {
    pub r_x: f64,
    pub r_z: f64,
    /// Difference between the stencil's material derivative and the
    /// particle acceleration `(x_tt, z_tt)` at the recovered label.
    pub material_x: f64,
    pub material_z: f64,
    pub scale: f64,
}

impl MomentumResidual {
    fn from_stencil(s: &Stencil, params: &WaveParameters) -> Self {
        let (u, w) = s.state.velocity;
        let (du, dw) = s.material_acceleration();
        let (p_x, p_z) = s.pressure_gradient();
        let two_omega = 2.0 * params.omega();
        let rho = params.rho();
        let label = s.label();
        let (x_tt, z_tt) = flow_acceleration(s.center.t, &label, params);
        let c = params.c();
        Self {
            r_x: du + two_omega * w + p_x / rho,
            r_z: dw - two_omega * u + p_z / rho + params.g(),
            material_x: du - x_tt,
            material_z: dw - z_tt,
            scale: params.k() * c * c * (params.k() * label.b()).exp(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.r_x.hypot(self.r_z)
    }

    /// Largest of the scaled equation and material-derivative residuals.
    pub fn scaled_max(&self) -> f64 {
        self.r_x
            .abs()
            .max(self.r_z.abs())
            .max(self.material_x.abs())
            .max(self.material_z.abs())
            / self.scale
    }
}

/// A residual value together with its physical scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledResidual {
    pub value: f64,
    pub scale: f64,
}

impl ScaledResidual {
    pub fn scaled(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

fn rotation_scale(label: &LagrangianLabel, params: &WaveParameters) -> f64 {
    params.c() * params.k() * (params.k() * label.b()).exp()
}

/// Momentum balance `Du/Dt + 2ωw + P_x/ρ` and `Dw/Dt − 2ωu + P_z/ρ + g`.
pub fn momentum_residual(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
    step: FdStep,
) -> Result<MomentumResidual> {
    let s = Stencil::evaluate(point, params, settings, step)?;
    Ok(MomentumResidual::from_stencil(&s, params))
}

/// `u_x + w_z`.
pub fn divergence_residual(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
    step: FdStep,
) -> Result<ScaledResidual> {
    let s = Stencil::evaluate(point, params, settings, step)?;
    Ok(ScaledResidual {
        value: s.divergence(),
        scale: rotation_scale(&s.label(), params),
    })
}

/// `(u_z − w_x) − γ(b)` with `b` the recovered depth label.
pub fn vorticity_residual(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
    step: FdStep,
) -> Result<ScaledResidual> {
    let s = Stencil::evaluate(point, params, settings, step)?;
    vorticity_from_stencil(&s, params)
}

fn vorticity_from_stencil(s: &Stencil, params: &WaveParameters) -> Result<ScaledResidual> {
    let gamma = vorticity(s.label().b(), params)?;
    Ok(ScaledResidual {
        value: s.vorticity() - gamma,
        scale: rotation_scale(&s.label(), params),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicResidual {
    /// `w − η_t − u η_x` with `η_t`, `η_x` differenced from the computed surface.
    pub fd: f64,
    /// `w − (u − c) z_a/x_a`, the closed-form surface slope version.
    pub analytic: f64,
    pub scale: f64,
}

impl KinematicResidual {
    pub fn scaled_max(&self) -> f64 {
        self.fd.abs().max(self.analytic.abs()) / self.scale
    }
}

/// Kinematic condition at the surface particle with horizontal label `a_surface`.
pub fn kinematic_bc_residual(
    t: f64,
    a_surface: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
    step: FdStep,
) -> Result<KinematicResidual> {
    let label = LagrangianLabel::surface(a_surface, params);
    let jac = jacobian(t, &label, params);
    let x_a = jac.0[0][0];
    if params.b0() == 0.0 && x_a.abs() < crate::inversion::CUSP_DERIVATIVE_THRESHOLD {
        return Err(Error::Cusp {
            phase: phase(t, a_surface, params),
        });
    }
    let (x, _) = flow_map(t, &label, params);
    let (u, w) = flow_velocity(t, &label, params);
    let (h, ht) = (step.space, step.time);
    let eta = |t, x| surface_elevation(t, x, params, settings);
    let eta_t = (eta(t + ht, x)? - eta(t - ht, x)?) / (2.0 * ht);
    let eta_x = (eta(t, x + h)? - eta(t, x - h)?) / (2.0 * h);
    let slope = jac.0[1][0] / x_a;
    Ok(KinematicResidual {
        fd: w - eta_t - u * eta_x,
        analytic: w - (u - params.c()) * slope,
        scale: params.c(),
    })
}

/// Pressure at the surface particle minus the atmospheric pressure.
pub fn dynamic_bc_residual(
    t: f64,
    a_surface: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<ScaledResidual> {
    let label = LagrangianLabel::surface(a_surface, params);
    let (x, z) = flow_map(t, &label, params);
    let state = eulerian_state(&EulerianPoint::new(t, x, z), params, settings)?;
    Ok(ScaledResidual {
        value: state.pressure - params.p0(),
        scale: dynamic_scale(params),
    })
}

fn dynamic_scale(params: &WaveParameters) -> f64 {
    params
        .p0()
        .abs()
        .max(params.rho() * params.g() / params.k())
}

/// Velocity magnitudes down a vertical column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    pub x: f64,
    pub depths: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// `c e^{k z + e^{k b0}}`, which bounds the speed at height `z`.
    pub bounds: Vec<f64>,
    pub within_bound: bool,
    pub strictly_decreasing: bool,
}

/// Samples `|(u, w)|` at heights `depths` (strictly decreasing, below `b0`).
pub fn decay_check(
    t: f64,
    x: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
    depths: &[f64],
) -> Result<DecayProfile> {
    if depths.windows(2).any(|w| w[1] >= w[0]) || depths.iter().any(|&z| z >= params.b0()) {
        return Err(Error::InvalidGrid(
            "decay depths must be strictly decreasing and below b0".into(),
        ));
    }
    let k = params.k();
    let mut magnitudes = Vec::with_capacity(depths.len());
    let mut bounds = Vec::with_capacity(depths.len());
    for &z in depths {
        let state = eulerian_state(&EulerianPoint::new(t, x, z), params, settings)?;
        magnitudes.push(state.velocity.0.hypot(state.velocity.1));
        bounds.push(params.c() * (k * z + (k * params.b0()).exp()).exp());
    }
    let within_bound = magnitudes.iter().zip(&bounds).all(|(m, b)| m <= b);
    let strictly_decreasing = magnitudes.windows(2).all(|w| w[1] < w[0]);
    Ok(DecayProfile {
        x,
        depths: depths.to_vec(),
        magnitudes,
        bounds,
        within_bound,
        strictly_decreasing,
    })
}

/// Ratios `|r(h)| / |r(h/2)|` of each interior residual; 4 for a
/// second-order stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRatios {
    pub momentum: f64,
    pub divergence: f64,
    pub vorticity: f64,
}

pub fn convergence_ratios(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
    step: FdStep,
) -> Result<ConvergenceRatios> {
    let coarse = Stencil::evaluate(point, params, settings, step)?;
    let fine = Stencil::evaluate(point, params, settings, step.halved())?;
    let m = |s: &Stencil| MomentumResidual::from_stencil(s, params).norm();
    let v = |s: &Stencil| vorticity_from_stencil(s, params).map(|r| r.value.abs());
    Ok(ConvergenceRatios {
        momentum: m(&coarse) / m(&fine),
        divergence: coarse.divergence().abs() / fine.divergence().abs(),
        vorticity: v(&coarse)? / v(&fine)?,
    })
}

pub fn kinematic_convergence_ratio(
    t: f64,
    a_surface: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
    step: FdStep,
) -> Result<f64> {
    let coarse = kinematic_bc_residual(t, a_surface, params, settings, step)?;
    let fine = kinematic_bc_residual(t, a_surface, params, settings, step.halved())?;
    Ok(coarse.fd.abs() / fine.fd.abs())
}

/// Where the sweep evaluates the interior and surface checks.
///
/// Interior columns sit at `n_x` equally spaced `x` over one wavelength. Each
/// column carries `n_z` rows spaced evenly from just below the local surface
/// down to `b0 − depth_extent`, plus one row at each of `surface_offsets`
/// below the surface. The surface checks use `n_x` labels `a` over one
/// wavelength. `extra_points` are appended verbatim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingGrid {
    pub n_x: usize,
    pub n_z: usize,
    pub depth_extent: f64,
    pub times: Vec<f64>,
    pub surface_offsets: Vec<f64>,
    pub extra_points: Vec<EulerianPoint>,
}

impl SamplingGrid {
    /// 24 × 16 over one wavelength and `3/k` of depth at `0, 0.3T, 0.7T`.
    pub fn default_for(params: &WaveParameters) -> Self {
        let k = params.k();
        let period = params.period();
        Self {
            n_x: 24,
            n_z: 16,
            depth_extent: 3.0 / k,
            times: vec![0.0, 0.3 * period, 0.7 * period],
            surface_offsets: vec![1e-3 / k, 1e-2 / k],
            extra_points: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x < 2 || self.n_z < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_x and n_z must be at least 2 (got {} x {})",
                self.n_x, self.n_z
            )));
        }
        if !(self.depth_extent.is_finite() && self.depth_extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "depth extent must be positive, got {}",
                self.depth_extent
            )));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("need at least one finite time".into()));
        }
        if self
            .surface_offsets
            .iter()
            .any(|&d| !(d.is_finite() && d > 0.0))
        {
            return Err(Error::InvalidGrid(
                "surface offsets must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn surface_labels(&self, params: &WaveParameters) -> Vec<(f64, f64)> {
        let step = params.wavelength() / self.n_x as f64;
        self.times
            .iter()
            .flat_map(|&t| (0..self.n_x).map(move |i| (t, i as f64 * step)))
            .collect()
    }

    /// Interior sample points, in a fixed order.
    pub fn interior_points(
        &self,
        params: &WaveParameters,
        settings: &InversionSettings,
    ) -> Result<Vec<EulerianPoint>> {
        self.validate()?;
        let dx = params.wavelength() / self.n_x as f64;
        let bottom = params.b0() - self.depth_extent;
        let mut points = Vec::new();
        for &t in &self.times {
            for i in 0..self.n_x {
                let x = i as f64 * dx;
                let eta = surface_elevation(t, x, params, settings)?;
                for &d in &self.surface_offsets {
                    points.push(EulerianPoint::new(t, x, eta - d));
                }
                for j in 0..self.n_z {
                    let frac = (j + 1) as f64 / self.n_z as f64;
                    points.push(EulerianPoint::new(t, x, eta + (bottom - eta) * frac));
                }
            }
        }
        points.extend(self.extra_points.iter().copied());
        Ok(points)
    }
}

/// Dimensionless tolerance for each check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub momentum: f64,
    pub divergence: f64,
    pub vorticity: f64,
    pub kinematic: f64,
    pub dynamic: f64,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            momentum: tol,
            divergence: tol,
            vorticity: tol,
            kinematic: tol,
            dynamic: tol,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            momentum: 1e-5,
            divergence: 1e-5,
            vorticity: 1e-4,
            kinematic: 1e-5,
            dynamic: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Raw residual at the worst sample (by scaled residual).
    pub max_abs_residual: f64,
    /// Physical scale at that sample.
    pub residual_scale: f64,
    pub scaled_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    pub failures: usize,
}

/// A sample that could not be evaluated; the sweep carries on without it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub check: String,
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub n_x: usize,
    pub n_z: usize,
    pub depth_extent: f64,
    pub times: Vec<f64>,
    pub surface_offsets: Vec<f64>,
    pub interior_points: usize,
    pub surface_labels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub params: WaveParameters,
    pub checks: Vec<CheckRecord>,
    pub fd_step: FdStep,
    pub grid: GridSummary,
    pub point_failures: Vec<PointFailure>,
    pub overall_pass: bool,
}

pub const CHECK_NAMES: [&str; 5] = [
    "momentum",
    "divergence",
    "vorticity",
    "kinematic_bc",
    "dynamic_bc",
];

struct Accumulator {
    name: &'static str,
    tolerance: f64,
    worst: Option<(f64, f64, f64)>,
    samples: usize,
    failures: usize,
}

impl Accumulator {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: None,
            samples: 0,
            failures: 0,
        }
    }

    /// Records `(raw, scale)`; NaN counts as worse than anything.
    fn push(&mut self, raw: f64, scale: f64) {
        self.samples += 1;
        let scaled = raw.abs() / scale;
        let worse = match self.worst {
            None => true,
            Some((_, _, s)) if s.is_nan() => false,
            Some((_, _, s)) => scaled > s || scaled.is_nan(),
        };
        if worse {
            self.worst = Some((raw.abs(), scale, scaled));
        }
    }

    fn finish(self) -> CheckRecord {
        let (max_abs_residual, residual_scale, scaled_residual) =
            self.worst.unwrap_or((0.0, 1.0, 0.0));
        CheckRecord {
            name: self.name.to_string(),
            max_abs_residual,
            residual_scale,
            scaled_residual,
            tolerance: self.tolerance,
            pass: self.failures == 0 && self.samples > 0 && scaled_residual <= self.tolerance,
            samples: self.samples,
            failures: self.failures,
        }
    }
}

struct InteriorOutcome {
    point: EulerianPoint,
    result: Result<(MomentumResidual, ScaledResidual, Result<ScaledResidual>)>,
}

struct SurfaceOutcome {
    t: f64,
    a: f64,
    kinematic: Result<KinematicResidual>,
    dynamic: Result<ScaledResidual>,
}

/// Runs every residual over the grid and reduces to one record per check.
///
/// Samples are evaluated in parallel; the reduction walks them in grid
/// order, so the report does not depend on scheduling. A sample that fails
/// (outside the fluid, stencil leaving the domain, no convergence) is listed
/// in `point_failures` and fails its check, but the sweep continues.
pub fn run_full_verification(
    params: &WaveParameters,
    grid: &SamplingGrid,
    settings: &InversionSettings,
    step: FdStep,
    tolerances: &Tolerances,
) -> Result<VerificationReport> {
    let points = grid.interior_points(params, settings)?;
    let labels = grid.surface_labels(params);

    let interior: Vec<InteriorOutcome> = points
        .par_iter()
        .map(|p| InteriorOutcome {
            point: *p,
            result: Stencil::evaluate(p, params, settings, step).map(|s| {
                (
                    MomentumResidual::from_stencil(&s, params),
                    ScaledResidual {
                        value: s.divergence(),
                        scale: rotation_scale(&s.label(), params),
                    },
                    vorticity_from_stencil(&s, params),
                )
            }),
        })
        .collect();

    let surface: Vec<SurfaceOutcome> = labels
        .par_iter()
        .map(|&(t, a)| SurfaceOutcome {
            t,
            a,
            kinematic: kinematic_bc_residual(t, a, params, settings, step),
            dynamic: dynamic_bc_residual(t, a, params, settings),
        })
        .collect();

    let mut momentum = Accumulator::new(CHECK_NAMES[0], tolerances.momentum);
    let mut divergence = Accumulator::new(CHECK_NAMES[1], tolerances.divergence);
    let mut vort = Accumulator::new(CHECK_NAMES[2], tolerances.vorticity);
    let mut kinematic = Accumulator::new(CHECK_NAMES[3], tolerances.kinematic);
    let mut dynamic = Accumulator::new(CHECK_NAMES[4], tolerances.dynamic);
    let mut point_failures = Vec::new();

    let mut fail = |acc: &mut Accumulator, t: f64, x: f64, z: f64, err: &Error| {
        acc.failures += 1;
        point_failures.push(PointFailure {
            check: acc.name.to_string(),
            t,
            x,
            z,
            error: err.to_string(),
        });
    };

    for outcome in &interior {
        let EulerianPoint { t, x, z } = outcome.point;
        match &outcome.result {
            Ok((m, d, v)) => {
                momentum.push(m.scaled_max() * m.scale, m.scale);
                divergence.push(d.value, d.scale);
                match v {
                    Ok(v) => vort.push(v.value, v.scale),
                    Err(e) => fail(&mut vort, t, x, z, e),
                }
            }
            Err(e) => {
                fail(&mut momentum, t, x, z, e);
                fail(&mut divergence, t, x, z, e);
                fail(&mut vort, t, x, z, e);
            }
        }
    }

    for outcome in &surface {
        let label = LagrangianLabel::surface(outcome.a, params);
        let (x, z) = flow_map(outcome.t, &label, params);
        match &outcome.kinematic {
            Ok(k) => kinematic.push(k.scaled_max() * k.scale, k.scale),
            Err(e) => fail(&mut kinematic, outcome.t, x, z, e),
        }
        match &outcome.dynamic {
            Ok(d) => dynamic.push(d.value, d.scale),
            Err(e) => fail(&mut dynamic, outcome.t, x, z, e),
        }
    }

    let checks: Vec<CheckRecord> = [momentum, divergence, vort, kinematic, dynamic]
        .into_iter()
        .map(Accumulator::finish)
        .collect();
    let overall_pass = checks.iter().all(|c| c.pass);

    Ok(VerificationReport {
        params: *params,
        fd_step: step,
        grid: GridSummary {
            n_x: grid.n_x,
            n_z: grid.n_z,
            depth_extent: grid.depth_extent,
            times: grid.times.clone(),
            surface_offsets: grid.surface_offsets.clone(),
            interior_points: points.len(),
            surface_labels: labels.len(),
        },
        checks,
        point_failures,
        overall_pass,
    })
}

/// Closed-form Eulerian velocity gradient at the particle found at `point`;
/// a reference for the stencil's `u_x, u_z, w_x, w_z`.
pub fn analytic_velocity_gradient(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<crate::fields::Mat2> {
    let state = eulerian_state(point, params, settings)?;
    velocity_gradient(point.t, &state.label, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (WaveParameters, InversionSettings, FdStep) {
        let p = WaveParameters::default();
        (p, InversionSettings::default(), FdStep::default_for(&p))
    }

    #[test]
    fn default_step_sizes() {
        let (p, _, step) = setup();
        assert_eq!(step.space, 1e-5);
        assert!((step.time - 1e-5 / p.c()).abs() < 1e-20);
        assert!(FdStep::new(0.0, &p).is_err());
    }

    #[test]
    fn crest_column_momentum() {
        let (p, s, step) = setup();
        let t = 0.4;
        let label = LagrangianLabel::new(p.c() * t, p.b0() - 0.2, &p).unwrap();
        let (x, z) = flow_map(t, &label, &p);
        let r = momentum_residual(&EulerianPoint::new(t, x, z), &p, &s, step).unwrap();
        assert!(r.scaled_max() <= 1e-5, "{r:?}");
    }

    #[test]
    fn crest_column_divergence_is_w_z() {
        let (p, s, step) = setup();
        let t = 0.0;
        let label = LagrangianLabel::new(0.0, p.b0() - 0.2, &p).unwrap();
        let (x, z) = flow_map(t, &label, &p);
        let point = EulerianPoint::new(t, x, z);
        let st = Stencil::evaluate(&point, &p, &s, step).unwrap();
        let u_x = (st.x_plus.velocity.0 - st.x_minus.velocity.0) / (2.0 * step.space);
        let w_z = (st.z_plus.velocity.1 - st.z_minus.velocity.1) / (2.0 * step.space);
        let scale = rotation_scale(&st.label(), &p);
        assert!(u_x.abs() < 1e-10 * scale);
        assert!((st.divergence() - w_z).abs() < 1e-10 * scale);
    }

    #[test]
    fn stencil_leaving_the_fluid_is_reported() {
        let (p, s, _) = setup();
        let eta = surface_elevation(0.0, 0.5, &p, &s).unwrap();
        let point = EulerianPoint::new(0.0, 0.5, eta - 1e-4);
        let step = FdStep::new(1e-3, &p).unwrap();
        assert!(matches!(
            divergence_residual(&point, &p, &s, step),
            Err(Error::StencilOutsideDomain { .. })
        ));
    }

    #[test]
    fn crest_kinematic_residual_vanishes() {
        let (p, s, step) = setup();
        let t = 0.9;
        let r = kinematic_bc_residual(t, p.c() * t, &p, &s, step).unwrap();
        assert!(r.analytic.abs() < 1e-12 * p.c());
        assert!(r.fd.abs() <= 1e-5 * p.c());
    }

    #[test]
    fn cusp_labels_are_refused() {
        let p = WaveParameters::default().with_b0(0.0).unwrap();
        let s = InversionSettings::default();
        let step = FdStep::default_for(&p);
        assert!(matches!(
            kinematic_bc_residual(0.0, 0.0, &p, &s, step),
            Err(Error::Cusp { .. })
        ));
    }

    #[test]
    fn dynamic_residual_on_a_period_of_labels() {
        let (p, s, _) = setup();
        let scale = dynamic_scale(&p);
        let pressures: Vec<f64> = (0..100)
            .map(|i| {
                let a = i as f64 * p.wavelength() / 100.0;
                let r = dynamic_bc_residual(0.3, a, &p, &s).unwrap();
                assert!(r.scaled() <= 1e-9);
                r.value + p.p0()
            })
            .collect();
        let max = pressures.iter().cloned().fold(f64::MIN, f64::max);
        let min = pressures.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min) / scale <= 1e-10);
    }

    #[test]
    fn grid_validation() {
        let (p, _, _) = setup();
        let mut g = SamplingGrid::default_for(&p);
        assert!(g.validate().is_ok());
        g.n_z = 1;
        assert!(g.validate().is_err());
        let mut g = SamplingGrid::default_for(&p);
        g.depth_extent = 0.0;
        assert!(g.validate().is_err());
        let mut g = SamplingGrid::default_for(&p);
        g.surface_offsets = vec![-1.0];
        assert!(g.validate().is_err());
    }

    #[test]
    fn decay_rejects_unsorted_depths() {
        let (p, s, _) = setup();
        assert!(decay_check(0.0, 0.0, &p, &s, &[-2.0, -1.0]).is_err());
        assert!(decay_check(0.0, 0.0, &p, &s, &[0.5, -1.0]).is_err());
    }
}
