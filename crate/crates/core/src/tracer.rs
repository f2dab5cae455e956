//! Particle paths through the reconstructed Eulerian velocity field.
//!
//! Paths are integrated with fixed-step classical RK4 on
//! `(dx/dt, dz/dt) = (u, w)(t, x, z)`, where `(u, w)` comes from inverting
//! the flow map at every stage. The closed-form orbit is never consulted
//! during integration, so the recovered circle is an independent check.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::flow_map;
use crate::inversion::{eulerian_velocity, invert_map, InversionSettings};
use crate::params::{EulerianPoint, LagrangianLabel, WaveParameters};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t0: f64,
    pub x0: f64,
    pub z0: f64,
    pub dt: f64,
    /// `(t, x, z)`, starting with the initial point.
    pub samples: Vec<(f64, f64, f64)>,
    pub inferred_center: (f64, f64),
    pub inferred_radius: f64,
    pub inferred_period: f64,
}

/// Largest step accepted by [`trace`], as a fraction of the orbit period.
pub const MAX_STEP_FRACTION: f64 = 0.01;

/// Integrates the particle starting at `start` for `n_steps` steps of `dt`.
pub fn trace(
    start: &EulerianPoint,
    params: &WaveParameters,
    settings: &InversionSettings,
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0 && dt <= MAX_STEP_FRACTION * params.period()) {
        return Err(Error::InvalidSettings(format!(
            "time step must lie in (0, {:e}], got {dt}",
            MAX_STEP_FRACTION * params.period()
        )));
    }
    if n_steps < 2 {
        return Err(Error::InvalidSettings(
            "a trajectory needs at least two steps".into(),
        ));
    }

    let velocity = |t: f64, x: f64, z: f64| {
        eulerian_velocity(&EulerianPoint::new(t, x, z), params, settings).map_err(|e| match e {
            Error::NotInDomain { t, .. } => Error::ParticleLeftDomain { t },
            other => other,
        })
    };

    let mut samples = Vec::with_capacity(n_steps + 1);
    let (mut x, mut z) = (start.x, start.z);
    samples.push((start.t, x, z));
    for i in 0..n_steps {
        let t = start.t + i as f64 * dt;
        let half = 0.5 * dt;
        let k1 = velocity(t, x, z)?;
        let k2 = velocity(t + half, x + half * k1.0, z + half * k1.1)?;
        let k3 = velocity(t + half, x + half * k2.0, z + half * k2.1)?;
        let k4 = velocity(t + dt, x + dt * k3.0, z + dt * k3.1)?;
        x += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        z += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        samples.push((start.t + (i + 1) as f64 * dt, x, z));
    }

    let (center, radius) = fit_circle(&samples);
    let angles = unwrap_angles(&samples, center);
    let rate = least_squares_slope(&samples, &angles);

    Ok(Trajectory {
        t0: start.t,
        x0: start.x,
        z0: start.z,
        dt,
        samples,
        inferred_center: center,
        inferred_radius: radius,
        inferred_period: TAU / rate.abs(),
    })
}

impl Trajectory {
    /// Polar angle about the fitted centre, unwrapped to be continuous.
    pub fn unwrapped_angles(&self) -> Vec<f64> {
        unwrap_angles(&self.samples, self.inferred_center)
    }

    pub fn angle_increments(&self) -> Vec<f64> {
        self.unwrapped_angles()
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect()
    }

    /// Clockwise means the angle about the centre strictly decreases.
    pub fn is_clockwise(&self) -> bool {
        self.angle_increments().iter().all(|&d| d < 0.0)
    }

    /// Distance between the last and the first sample.
    pub fn closure_error(&self) -> f64 {
        let first = self.samples[0];
        let last = self.samples[self.samples.len() - 1];
        (last.1 - first.1).hypot(last.2 - first.2)
    }
}

/// Algebraic (Kåsa) circle fit: least squares on `x² + z² + Dx + Ez + F = 0`.
pub fn fit_circle(samples: &[(f64, f64, f64)]) -> ((f64, f64), f64) {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let mz = samples.iter().map(|s| s.2).sum::<f64>() / n;

    // Normal equations in centred coordinates.
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for s in samples {
        let (x, z) = (s.1 - mx, s.2 - mz);
        let row = [x, z, 1.0];
        let target = -(x * x + z * z);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * target;
        }
    }
    let [d, e, f] = solve3(m, rhs);
    let center = (mx - 0.5 * d, mz - 0.5 * e);
    let radius = (0.25 * (d * d + e * e) - f).max(0.0).sqrt();
    (center, radius)
}

fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, src) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc -= m[row][k] * out[k];
        }
        out[row] = acc / m[row][row];
    }
    out
}

fn unwrap_angles(samples: &[(f64, f64, f64)], center: (f64, f64)) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(samples.len());
    for s in samples {
        let raw = (s.2 - center.1).atan2(s.1 - center.0);
        let angle = match out.last() {
            None => raw,
            Some(&prev) => {
                let turns = ((prev - raw) / TAU).round();
                raw + turns * TAU
            }
        };
        out.push(angle);
    }
    out
}

fn least_squares_slope(samples: &[(f64, f64, f64)], values: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mt = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mv = values.iter().sum::<f64>() / n;
    let (num, den) = samples
        .iter()
        .zip(values)
        .fold((0.0, 0.0), |(num, den), (s, v)| {
            let dt = s.0 - mt;
            (num + dt * (v - mv), den + dt * dt)
        });
    num / den
}

/// Largest distance between the integrated samples and the closed-form
/// orbit of `label`.
pub fn deviation_from_label(
    trajectory: &Trajectory,
    label: &LagrangianLabel,
    params: &WaveParameters,
) -> f64 {
    trajectory
        .samples
        .iter()
        .map(|&(t, x, z)| {
            let (ex, ez) = flow_map(t, label, params);
            (x - ex).hypot(z - ez)
        })
        .fold(0.0, f64::max)
}

/// Largest distance between the integrated samples and the closed-form
/// orbit of the particle that starts the trajectory.
pub fn compare_to_analytic(
    trajectory: &Trajectory,
    params: &WaveParameters,
    settings: &InversionSettings,
) -> Result<f64> {
    let start = EulerianPoint::new(trajectory.t0, trajectory.x0, trajectory.z0);
    let label = invert_map(&start, params, settings)?;
    Ok(deviation_from_label(trajectory, &label, params))
}
