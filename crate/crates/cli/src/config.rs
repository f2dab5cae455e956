//! Run configuration: built-in defaults, then a flat TOML file, then flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use gerstner_core::params::{ATMOSPHERIC_PRESSURE, EARTH_ROTATION, GRAVITY, WATER_DENSITY};
use gerstner_core::verify::{FdStep, SamplingGrid, Tolerances};
use gerstner_core::{InversionSettings, WaveParameters};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Every setting a command may read. All optional so that flags and file
/// values can be layered.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Wavenumber k (1/m)
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Rotation rate of the Earth ω (rad/s)
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Gravitational acceleration g (m/s²)
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Water density ρ (kg/m³)
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Atmospheric pressure P0 (Pa)
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    /// Surface label b0 (m, ≤ 0); defaults to -0.1/k
    #[arg(long, allow_negative_numbers = true)]
    pub b0: Option<f64>,
    /// Time (s): profile/field snapshot, trace start, or the single verify time
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Horizontal sample count
    #[arg(long)]
    pub nx: Option<usize>,
    /// Vertical sample count
    #[arg(long)]
    pub nz: Option<usize>,
    /// Depth extent below b0 (m)
    #[arg(long, allow_negative_numbers = true)]
    pub depth: Option<f64>,
    /// RK4 time step (s); defaults to one 2000th of the period
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// RK4 step count; defaults to one period
    #[arg(long)]
    pub steps: Option<usize>,
    /// Acceptance tolerance: every verify check, or the trace fit (relative to the radius)
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Finite-difference space step (m); the time step is h/c
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Horizontal label of the traced particle (m)
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Depth label of the traced particle (m); defaults to b0 - 1/k
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Newton residual bound for label recovery (m)
    #[arg(long, allow_negative_numbers = true)]
    pub inversion_tolerance: Option<f64>,
    /// Newton iteration cap for label recovery
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Bisection fallback in the surface solve (true/false)
    #[arg(long)]
    pub bisection_fallback: Option<bool>,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("malformed config file {}", path.display()))
    }

    /// `self` wins wherever it has a value.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            k: self.k.or(base.k),
            omega: self.omega.or(base.omega),
            g: self.g.or(base.g),
            rho: self.rho.or(base.rho),
            p0: self.p0.or(base.p0),
            b0: self.b0.or(base.b0),
            t: self.t.or(base.t),
            nx: self.nx.or(base.nx),
            nz: self.nz.or(base.nz),
            depth: self.depth.or(base.depth),
            dt: self.dt.or(base.dt),
            steps: self.steps.or(base.steps),
            tol: self.tol.or(base.tol),
            h: self.h.or(base.h),
            a: self.a.or(base.a),
            b: self.b.or(base.b),
            inversion_tolerance: self.inversion_tolerance.or(base.inversion_tolerance),
            max_iterations: self.max_iterations.or(base.max_iterations),
            bisection_fallback: self.bisection_fallback.or(base.bisection_fallback),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }

    pub fn params(&self) -> anyhow::Result<WaveParameters> {
        let k = self.k.unwrap_or(1.0);
        let b0 = self.b0.unwrap_or(-0.1 / k);
        Ok(WaveParameters::new(
            k,
            self.omega.unwrap_or(EARTH_ROTATION),
            self.g.unwrap_or(GRAVITY),
            self.rho.unwrap_or(WATER_DENSITY),
            self.p0.unwrap_or(ATMOSPHERIC_PRESSURE),
            b0,
        )?)
    }

    pub fn inversion(&self) -> anyhow::Result<InversionSettings> {
        let d = InversionSettings::default();
        Ok(InversionSettings::new(
            self.inversion_tolerance.unwrap_or(d.tolerance),
            self.max_iterations.unwrap_or(d.max_iterations),
            self.bisection_fallback.unwrap_or(d.bisection_fallback),
        )?)
    }

    pub fn time(&self) -> anyhow::Result<f64> {
        let t = self.t.unwrap_or(0.0);
        if !(t.is_finite() && t >= 0.0) {
            bail!("time must be finite and non-negative, got {t}");
        }
        Ok(t)
    }

    pub fn fd_step(&self, params: &WaveParameters) -> anyhow::Result<FdStep> {
        Ok(match self.h {
            Some(h) => FdStep::new(h, params)?,
            None => FdStep::default_for(params),
        })
    }

    pub fn grid(&self, params: &WaveParameters) -> anyhow::Result<SamplingGrid> {
        let mut grid = SamplingGrid::default_for(params);
        if let Some(nx) = self.nx {
            grid.n_x = nx;
        }
        if let Some(nz) = self.nz {
            grid.n_z = nz;
        }
        if let Some(depth) = self.depth {
            grid.depth_extent = depth;
        }
        if self.t.is_some() {
            grid.times = vec![self.time()?];
        }
        grid.validate()?;
        Ok(grid)
    }

    pub fn tolerances(&self) -> anyhow::Result<Tolerances> {
        match self.tol {
            None => Ok(Tolerances::default()),
            Some(tol) if tol.is_finite() && tol >= 0.0 => Ok(Tolerances::uniform(tol)),
            Some(tol) => bail!("tolerance must be non-negative, got {tol}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file: RunConfig = toml::from_str("k = 2.0\nomega = 0.0\nnx = 10").unwrap();
        let flags = RunConfig {
            k: Some(0.5),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.k, Some(0.5));
        assert_eq!(merged.omega, Some(0.0));
        assert_eq!(merged.nx, Some(10));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("kk = 1.0").is_err());
        assert!(toml::from_str::<RunConfig>("format = \"svg\"").is_ok());
    }

    #[test]
    fn b0_follows_k_by_default() {
        let cfg = RunConfig {
            k: Some(2.0),
            ..Default::default()
        };
        assert_eq!(cfg.params().unwrap().b0(), -0.05);
    }
}
