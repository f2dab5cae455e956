//! Wave parameters and the two coordinate systems: Lagrangian labels and
//! Eulerian points.

use serde::Serialize;

use crate::error::{Error, Result};

/// Rotational speed of the Earth, rad/s.
pub const EARTH_ROTATION: f64 = 7.3e-5;
/// Gravitational acceleration, m/s².
pub const GRAVITY: f64 = 9.8;
/// Density of water, kg/m³.
pub const WATER_DENSITY: f64 = 1000.0;
/// Standard atmospheric pressure, Pa.
pub const ATMOSPHERIC_PRESSURE: f64 = 101_325.0;

/// Physical and geometric constants of one wave. SI units throughout.
///
/// The wave speed is derived once at construction from the dispersion
/// relation `k c² + 2 ω c = g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParameters {
    k: f64,
    omega: f64,
    g: f64,
    rho: f64,
    p0: f64,
    b0: f64,
    #[serde(skip)]
    c: f64,
}

impl WaveParameters {
    pub fn new(k: f64, omega: f64, g: f64, rho: f64, p0: f64, b0: f64) -> Result<Self> {
        fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                })
            }
        }
        check("k", k, k > 0.0, "wavenumber must be positive")?;
        check(
            "omega",
            omega,
            omega >= 0.0,
            "rotation rate must be non-negative",
        )?;
        check("g", g, g > 0.0, "gravity must be positive")?;
        check("rho", rho, rho > 0.0, "density must be positive")?;
        check("p0", p0, true, "pressure must be finite")?;
        check("b0", b0, b0 <= 0.0, "surface label must be non-positive")?;

        let c = ((omega * omega + k * g).sqrt() - omega) / k;
        Ok(Self {
            k,
            omega,
            g,
            rho,
            p0,
            b0,
            c,
        })
    }

    /// Default constants with wavenumber `k` and the submerged surface label
    /// `b0 = -0.1 / k`.
    pub fn with_wavenumber(k: f64) -> Result<Self> {
        Self::new(
            k,
            EARTH_ROTATION,
            GRAVITY,
            WATER_DENSITY,
            ATMOSPHERIC_PRESSURE,
            -0.1 / k,
        )
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.k, omega, self.g, self.rho, self.p0, self.b0)
    }

    pub fn with_b0(self, b0: f64) -> Result<Self> {
        Self::new(self.k, self.omega, self.g, self.rho, self.p0, b0)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// Wave speed `c = (√(ω² + kg) − ω)/k`, the positive root of the dispersion relation.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn wavelength(&self) -> f64 {
        std::f64::consts::TAU / self.k
    }

    /// Time for one full particle revolution, `2π/(kc)`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / (self.k * self.c)
    }

    /// Orbit radius of the surface particles, `e^{k b0}/k`.
    pub fn surface_amplitude(&self) -> f64 {
        (self.k * self.b0).exp() / self.k
    }
}

impl Default for WaveParameters {
    fn default() -> Self {
        Self::with_wavenumber(1.0).expect("default parameters are valid")
    }
}

/// Particle label `(a, b)` in `ℝ × (−∞, b0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangianLabel {
    a: f64,
    b: f64,
}

impl LagrangianLabel {
    pub fn new(a: f64, b: f64, params: &WaveParameters) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || b > params.b0 {
            return Err(Error::LabelOutsideDomain { b, b0: params.b0 });
        }
        Ok(Self { a, b })
    }

    /// A label on the free surface, `b = b0`.
    pub fn surface(a: f64, params: &WaveParameters) -> Self {
        Self { a, b: params.b0 }
    }

    /// Labels recovered numerically may overshoot `b0` by round-off.
    pub(crate) fn unchecked(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Physical position `(x, z)` at time `t`.
///
/// No validation: finite-difference stencils around `t = 0` legitimately
/// evaluate the analytic fields at slightly negative times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerianPoint {
    pub t: f64,
    pub x: f64,
    pub z: f64,
}

impl EulerianPoint {
    pub fn new(t: f64, x: f64, z: f64) -> Self {
        Self { t, x, z }
    }

    pub fn shifted(&self, dt: f64, dx: f64, dz: f64) -> Self {
        Self {
            t: self.t + dt,
            x: self.x + dx,
            z: self.z + dz,
        }
    }
}
