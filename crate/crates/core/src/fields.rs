//! Closed-form Lagrangian fields of the wave.
//!
//! A particle with label `(a, b)` moves on
//!
//! ```text
//! x = a − (e^{kb}/k) sin θ,   z = b + (e^{kb}/k) cos θ,   θ = ka − kct,
//! ```
//!
//! a circle of radius `e^{kb}/k` about `(a, b)` traversed clockwise with
//! angular speed `kc`. Everything here is an explicit formula; the numerical
//! inversion to Eulerian coordinates lives in [`crate::inversion`].

use std::f64::consts::TAU;
use std::ops::Mul;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{LagrangianLabel, WaveParameters};

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, v: (f64, f64)) -> (f64, f64) {
        let [[a, b], [c, d]] = self.0;
        (a * v.0 + b * v.1, c * v.0 + d * v.1)
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let l = self.0;
        let r = rhs.0;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = l[i][0] * r[0][j] + l[i][1] * r[1][j];
            }
        }
        Mat2(out)
    }
}

/// Wave speed from the dispersion relation `k c² + 2 ω c − g = 0`.
pub fn wave_speed(params: &WaveParameters) -> f64 {
    params.c()
}

/// Residual `k c² + 2 ω c − g` of the dispersion relation.
pub fn dispersion_residual(params: &WaveParameters) -> f64 {
    let c = params.c();
    params.k() * c * c + 2.0 * params.omega() * c - params.g()
}

/// Phase `θ = ka − kct` reduced to `[0, 2π)`.
///
/// Both products are reduced separately so that large `t` does not swamp
/// the label contribution.
pub fn phase(t: f64, a: f64, params: &WaveParameters) -> f64 {
    let k = params.k();
    let spatial = (k * a).rem_euclid(TAU);
    let temporal = (k * params.c() * t).rem_euclid(TAU);
    (spatial - temporal).rem_euclid(TAU)
}

fn decay(b: f64, params: &WaveParameters) -> f64 {
    (params.k() * b).exp()
}

pub fn flow_map(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> (f64, f64) {
    let k = params.k();
    let r = decay(label.b(), params) / k;
    let (s, c) = phase(t, label.a(), params).sin_cos();
    (label.a() - r * s, label.b() + r * c)
}

pub fn flow_velocity(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> (f64, f64) {
    let amp = params.c() * decay(label.b(), params);
    let (s, c) = phase(t, label.a(), params).sin_cos();
    (amp * c, amp * s)
}

pub fn flow_acceleration(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> (f64, f64) {
    let c = params.c();
    let amp = params.k() * c * c * decay(label.b(), params);
    let (s, co) = phase(t, label.a(), params).sin_cos();
    (amp * s, -amp * co)
}

/// `∂(x, z)/∂(a, b)`.
pub fn jacobian(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> Mat2 {
    let e = decay(label.b(), params);
    let (s, c) = phase(t, label.a(), params).sin_cos();
    Mat2([[1.0 - e * c, -e * s], [-e * s, 1.0 + e * c]])
}

/// `∂(a, b)/∂(x, z)`, the Jacobian of the inverse map. Undefined on `b = 0`.
pub fn inverse_jacobian(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> Result<Mat2> {
    let e = decay(label.b(), params);
    let denom = 1.0 - e * e;
    if label.b() >= 0.0 || denom <= 0.0 {
        return Err(Error::SurfaceSingularity { b: label.b() });
    }
    let (s, c) = phase(t, label.a(), params).sin_cos();
    let f = 1.0 / denom;
    Ok(Mat2([
        [f * (1.0 + e * c), f * e * s],
        [f * e * s, f * (1.0 - e * c)],
    ]))
}

/// `∂(x_t, z_t)/∂(a, b)`: the mixed derivatives `x_ta, x_tb, z_ta, z_tb`.
pub fn velocity_label_gradient(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> Mat2 {
    let amp = params.k() * params.c() * decay(label.b(), params);
    let (s, c) = phase(t, label.a(), params).sin_cos();
    Mat2([[-amp * s, amp * c], [amp * c, amp * s]])
}

/// Eulerian velocity gradient `[[u_x, u_z], [w_x, w_z]]` by the chain rule
/// through the inverse Jacobian.
pub fn velocity_gradient(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> Result<Mat2> {
    Ok(velocity_label_gradient(t, label, params) * inverse_jacobian(t, label, params)?)
}

/// Pressure along the label line `b`; independent of `a` and `t`.
pub fn pressure_lagrangian(b: f64, params: &WaveParameters) -> f64 {
    let k = params.k();
    let c = params.c();
    let b0 = params.b0();
    let rho = params.rho();
    let coeff = rho * (k * c * c + 2.0 * params.omega() * c) / (2.0 * k);
    let tail = (2.0 * k * b).exp() - (2.0 * k * b0).exp();
    params.p0() + coeff * tail - rho * params.g() * (b - b0)
}

/// Vorticity `γ = −2kc e^{2kb}/(1 − e^{2kb})`, a function of depth label only.
pub fn vorticity(b: f64, params: &WaveParameters) -> Result<f64> {
    let e2 = (2.0 * params.k() * b).exp();
    if b >= 0.0 || e2 >= 1.0 {
        return Err(Error::SurfaceSingularity { b });
    }
    // 1 - e^{2kb} via exp_m1 keeps precision for b close to 0.
    let denom = -(2.0 * params.k() * b).exp_m1();
    Ok(-2.0 * params.k() * params.c() * e2 / denom)
}

/// Everything the flow map knows about one particle at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowKinematics {
    pub position: (f64, f64),
    pub velocity: (f64, f64),
    pub acceleration: (f64, f64),
    pub jacobian: Mat2,
    /// `None` on the singular line `b = 0`.
    pub inverse_jacobian: Option<Mat2>,
}

impl FlowKinematics {
    pub fn evaluate(t: f64, label: &LagrangianLabel, params: &WaveParameters) -> Self {
        Self {
            position: flow_map(t, label, params),
            velocity: flow_velocity(t, label, params),
            acceleration: flow_acceleration(t, label, params),
            jacobian: jacobian(t, label, params),
            inverse_jacobian: inverse_jacobian(t, label, params).ok(),
        }
    }
}
