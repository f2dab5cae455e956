//! Numerical inversion of the flow map and the Eulerian fields built on it.
//!
//! At each time the flow map is a diffeomorphism from the label half-plane
//! `b ≤ b0` onto the fluid domain below the free surface. The inverse has no
//! closed form, so labels are recovered by a damped Newton iteration that
//! uses the analytic Jacobian.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{flow_map, flow_velocity, inverse_jacobian, phase, pressure_lagrangian};
use crate::params::{EulerianPoint, LagrangianLabel, WaveParameters};

/// Points up to this far (m) above the computed surface still count as fluid,
/// so samples taken exactly on `z = η` are accepted.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Below this `|x_a|` the scalar surface solve switches to bisection.
pub const CUSP_DERIVATIVE_THRESHOLD: f64 = 1e-8;

/// Extra halvings granted to the bisection fallback on top of `max_iterations`.
const BISECTION_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionSettings {
    /// Bound on the position residual `|Φ(a, b) − (x, z)|`, in metres.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub bisection_fallback: bool,
}

impl InversionSettings {
    pub fn new(tolerance: f64, max_iterations: usize, bisection_fallback: bool) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidSettings(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(Self {
            tolerance,
            max_iterations,
            bisection_fallback,
        })
    }

    fn effective_tolerance(&self, scale: f64) -> f64 {
        self.tolerance.max(4.0 * f64::EPSILON * scale.abs())
    }
}

impl Default for InversionSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
            bisection_fallback: true,
        }
    }
}

/// Result of [`invert_map_detailed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inversion {
    pub label: LagrangianLabel,
    /// Newton steps taken to reach the tolerance.
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `x = a − (e^{kb}/k) sin(ka − kct)` for `a` on the label line `b`.
///
/// The right-hand side is strictly increasing in `a` for `b < 0` and
/// non-decreasing for `b = 0`, and the root is bracketed by `x ± e^{kb}/k`.
/// Newton steps are taken inside the bracket; a bisection step replaces them
/// when the derivative `x_a` nearly vanishes (cycloid cusps) or a step leaves
/// the bracket.
pub fn solve_horizontal_label(
    t: f64,
    x: f64,
    b: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<f64> {
    let k = params.k();
    let e = (k * b).exp();
    let radius = e / k;
    let tol = settings.effective_tolerance(x);

    let residual = |a: f64| {
        let (s, c) = phase(t, a, params).sin_cos();
        (a - radius * s - x, 1.0 - e * c)
    };

    let mut lo = x - radius;
    let mut hi = x + radius;
    let mut a = x;
    let budget = settings.max_iterations
        + if settings.bisection_fallback {
            BISECTION_BUDGET
        } else {
            0
        };
    let mut last = f64::INFINITY;
    for _ in 0..budget {
        let (f, df) = residual(a);
        last = f.abs();
        if last <= tol {
            return Ok(a);
        }
        if f < 0.0 {
            lo = lo.max(a);
        } else {
            hi = hi.min(a);
        }
        let newton = a - f / df;
        let newton_ok = df.abs() >= CUSP_DERIVATIVE_THRESHOLD && newton > lo && newton < hi;
        a = if newton_ok || !settings.bisection_fallback {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if settings.bisection_fallback && hi - lo <= f64::EPSILON * x.abs().max(radius) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence {
        iterations: budget,
        residual: last,
    })
}

/// Horizontal label of the surface particle located above `x` at time `t`.
pub fn surface_label_at(
    t: f64,
    x: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<f64> {
    solve_horizontal_label(t, x, params.b0(), params, settings)
}

/// Free-surface elevation `η(t, x)`: the image of the label line `b = b0`.
pub fn surface_elevation(
    t: f64,
    x: f64,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<f64> {
    let a = surface_label_at(t, x, params, settings)?;
    Ok(flow_map(t, &LagrangianLabel::surface(a, params), params).1)
}

/// Whether `point` lies in the fluid, i.e. below the free surface (with
/// [`MEMBERSHIP_SLACK`]).
pub fn in_domain(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<bool> {
    let eta = surface_elevation(point.t, point.x, params, settings)?;
    Ok(point.z < eta + MEMBERSHIP_SLACK)
}

fn require_in_domain(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<()> {
    let eta = surface_elevation(point.t, point.x, params, settings)?;
    if point.z < eta + MEMBERSHIP_SLACK {
        Ok(())
    } else {
        Err(Error::NotInDomain {
            t: point.t,
            x: point.x,
            z: point.z,
            eta,
        })
    }
}

pub fn invert_map(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<LagrangianLabel> {
    invert_map_detailed(point, params, settings).map(|inv| inv.label)
}

/// Recovers the label of the particle at `point`.
///
/// The start value takes `b = min(z, b0)` and solves the horizontal equation
/// for `a` at that depth; Newton then runs in both unknowns with step
/// halving whenever the residual grows, and with `b` held below the surface
/// label (plus slack), where the map is one-to-one.
pub fn invert_map_detailed(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<Inversion> {
    require_in_domain(point, params, settings)?;
    let EulerianPoint { t, x, z } = *point;
    let tol = settings.effective_tolerance(x.abs().max(z.abs()));
    let b_cap = (params.b0() + MEMBERSHIP_SLACK).min(-MEMBERSHIP_SLACK);

    let residual = |a: f64, b: f64| {
        let (px, pz) = flow_map(t, &LagrangianLabel::unchecked(a, b), params);
        (px - x, pz - z)
    };
    let norm = |r: (f64, f64)| r.0.hypot(r.1);

    let mut b = z.min(b_cap);
    let mut a = solve_horizontal_label(t, x, b, params, settings)?;
    let mut r = residual(a, b);
    let mut rn = norm(r);

    let mut iterations = 0;
    while rn > tol {
        if iterations == settings.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual: rn,
            });
        }
        iterations += 1;
        let inv = inverse_jacobian(t, &LagrangianLabel::unchecked(a, b), params)?;
        let (da, db) = inv.apply(r);
        let mut lambda = 1.0;
        loop {
            let na = a - lambda * da;
            let nb = (b - lambda * db).min(b_cap);
            let nr = residual(na, nb);
            let nrn = norm(nr);
            if nrn < rn || lambda < 1e-6 {
                a = na;
                b = nb;
                r = nr;
                rn = nrn;
                break;
            }
            lambda *= 0.5;
        }
    }

    // One undamped polishing step brings the label to round-off level.
    if let Ok(inv) = inverse_jacobian(t, &LagrangianLabel::unchecked(a, b), params) {
        let (da, db) = inv.apply(r);
        let (na, nb) = (a - da, (b - db).min(b_cap));
        let nrn = norm(residual(na, nb));
        if nrn <= rn {
            a = na;
            b = nb;
            rn = nrn;
        }
    }

    Ok(Inversion {
        label: LagrangianLabel::unchecked(a, b),
        iterations,
        residual: rn,
    })
}

/// Eulerian quantities at one point, all taken from a single inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerianState {
    pub label: LagrangianLabel,
    pub velocity: (f64, f64),
    pub pressure: f64,
}

pub fn eulerian_state(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<EulerianState> {
    let label = invert_map(point, params, settings)?;
    Ok(EulerianState {
        label,
        velocity: flow_velocity(point.t, &label, params),
        pressure: pressure_lagrangian(label.b(), params),
    })
}

/// Velocity `(u, w)` of the particle currently at `point`.
pub fn eulerian_velocity(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<(f64, f64)> {
    let label = invert_map(point, params, settings)?;
    Ok(flow_velocity(point.t, &label, params))
}

pub fn eulerian_pressure(
    point: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<f64> {
    let label = invert_map(point, params, settings)?;
    Ok(pressure_lagrangian(label.b(), params))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// `b0 = 0`: cusped at the crests.
    Cycloid,
    /// `b0 < 0`: smooth.
    Trochoid,
}

/// The free surface sampled over one wavelength `[0, 2π/k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceProfile {
    pub k: f64,
    pub b0: f64,
    pub t: f64,
    pub kind: ProfileKind,
    pub samples: Vec<(f64, f64)>,
}

impl SurfaceProfile {
    pub fn sample(
        t: f64,
        n: usize,
        params: &WaveParameters,
        settings: &InversionSettings,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid(
                "profile needs at least one sample".into(),
            ));
        }
        let step = params.wavelength() / n as f64;
        let samples = (0..n)
            .map(|i| {
                let x = i as f64 * step;
                surface_elevation(t, x, params, settings).map(|eta| (x, eta))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k: params.k(),
            b0: params.b0(),
            t,
            kind: if params.b0() == 0.0 {
                ProfileKind::Cycloid
            } else {
                ProfileKind::Trochoid
            },
            samples,
        })
    }

    /// Analytic crest height `b0 + e^{k b0}/k`.
    pub fn crest(&self) -> f64 {
        self.b0 + (self.k * self.b0).exp() / self.k
    }

    /// Analytic trough depth `b0 − e^{k b0}/k`.
    pub fn trough(&self) -> f64 {
        self.b0 - (self.k * self.b0).exp() / self.k
    }

    pub fn max_elevation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_elevation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1)
            .fold(f64::INFINITY, f64::min)
    }
}
