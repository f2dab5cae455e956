//! One function per subcommand. Each returns the rendered output; writing it
//! out and choosing the exit status is left to `main`.

use anyhow::anyhow;
use serde::Serialize;
use serde_json::json;

use gerstner_core::tracer::deviation_from_label;
use gerstner_core::verify::Stencil;
use gerstner_core::{
    dispersion_residual, flow_map, run_full_verification, surface_elevation, trace as integrate,
    EulerianPoint, LagrangianLabel, SurfaceProfile,
};

use crate::config::{Format, RunConfig};
use crate::output::{csv, num, profile_svg, trace_svg};
use crate::{Classify, CliError, Outcome};

pub type Handler = fn(&RunConfig) -> Result<Outcome, CliError>;

const DEFAULT_PROFILE_SAMPLES: usize = 256;
const DEFAULT_FIELD_COLUMNS: usize = 24;
const DEFAULT_FIELD_ROWS: usize = 16;
const DEFAULT_STEPS_PER_PERIOD: usize = 2000;
const DEFAULT_TRACE_TOLERANCE: f64 = 1e-6;
/// The top field row sits this many finite-difference steps below the surface.
const FIELD_SURFACE_CLEARANCE: f64 = 3.0;

fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Usage(anyhow!("`{command}` cannot write {format:?} output"))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).failure()?;
    text.push('\n');
    Ok(text)
}

fn pass(text: String) -> Result<Outcome, CliError> {
    Ok(Outcome { text, pass: true })
}

pub fn speed(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params().usage()?;
    let c = params.c();
    let residual = dispersion_residual(&params).abs();
    match cfg.format {
        None => pass(format!("c = {c:.12}\nresidual = {residual:e}\n")),
        Some(Format::Json) => to_json(&json!({
            "k": params.k(),
            "omega": params.omega(),
            "g": params.g(),
            "c": c,
            "residual": residual,
        }))
        .and_then(pass),
        Some(Format::Csv) => pass(csv(
            &["k", "omega", "g", "c", "residual"],
            [vec![params.k(), params.omega(), params.g(), c, residual]],
        )),
        Some(f) => Err(unsupported("speed", f)),
    }
}

pub fn profile(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params().usage()?;
    let settings = cfg.inversion().usage()?;
    let t = cfg.time().usage()?;
    let n = cfg.nx.unwrap_or(DEFAULT_PROFILE_SAMPLES);
    let profile = SurfaceProfile::sample(t, n, &params, &settings).usage()?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => pass(csv(
            &["x", "eta"],
            profile.samples.iter().map(|&(x, eta)| vec![x, eta]),
        )),
        Format::Json => to_json(&json!({
            "k": profile.k,
            "b0": profile.b0,
            "t": profile.t,
            "kind": profile.kind,
            "crest": profile.crest(),
            "trough": profile.trough(),
            "samples": profile.samples,
        }))
        .and_then(pass),
        Format::Svg => pass(profile_svg(
            &profile.samples,
            params.wavelength(),
            profile.crest(),
            profile.trough(),
        )),
    }
}

#[derive(Serialize)]
struct FieldRow {
    x: f64,
    z: f64,
    u: f64,
    w: f64,
    p: f64,
    gamma: f64,
}

pub fn field(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params().usage()?;
    let settings = cfg.inversion().usage()?;
    let t = cfg.time().usage()?;
    let step = cfg.fd_step(&params).usage()?;
    let n_x = cfg.nx.unwrap_or(DEFAULT_FIELD_COLUMNS);
    let n_z = cfg.nz.unwrap_or(DEFAULT_FIELD_ROWS);
    let depth = cfg.depth.unwrap_or(3.0 / params.k());
    if n_x == 0 || n_z == 0 {
        return Err(CliError::Usage(anyhow!("field grid needs nx, nz >= 1")));
    }
    if !(depth.is_finite() && depth > 0.0) {
        return Err(CliError::Usage(anyhow!(
            "depth must be positive, got {depth}"
        )));
    }

    let bottom = params.b0() - depth;
    let mut rows = Vec::with_capacity(n_x * n_z);
    for i in 0..n_x {
        let x = i as f64 * params.wavelength() / n_x as f64;
        let eta = surface_elevation(t, x, &params, &settings).failure()?;
        let top = eta - FIELD_SURFACE_CLEARANCE * step.space;
        for j in 0..n_z {
            let z = if n_z == 1 {
                top
            } else {
                top + (bottom - top) * j as f64 / (n_z - 1) as f64
            };
            let stencil = Stencil::evaluate(&EulerianPoint::new(t, x, z), &params, &settings, step)
                .failure()?;
            rows.push(FieldRow {
                x,
                z,
                u: stencil.state.velocity.0,
                w: stencil.state.velocity.1,
                p: stencil.state.pressure,
                gamma: stencil.vorticity(),
            });
        }
    }

    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => pass(csv(
            &["x", "z", "u", "w", "p", "gamma"],
            rows.iter().map(|r| vec![r.x, r.z, r.u, r.w, r.p, r.gamma]),
        )),
        Format::Json => to_json(&rows).and_then(pass),
        f => Err(unsupported("field", f)),
    }
}

pub fn trace(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params().usage()?;
    let settings = cfg.inversion().usage()?;
    let t0 = cfg.time().usage()?;
    let period = params.period();
    let dt = cfg.dt.unwrap_or(period / DEFAULT_STEPS_PER_PERIOD as f64);
    let steps = cfg
        .steps
        .unwrap_or_else(|| (period / dt).round().max(2.0) as usize);
    let tol = cfg.tol.unwrap_or(DEFAULT_TRACE_TOLERANCE);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(anyhow!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    let label = LagrangianLabel::new(
        cfg.a.unwrap_or(0.0),
        cfg.b.unwrap_or(params.b0() - 1.0 / params.k()),
        &params,
    )
    .usage()?;

    let (x0, z0) = flow_map(t0, &label, &params);
    let start = EulerianPoint::new(t0, x0, z0);
    let traj = match integrate(&start, &params, &settings, dt, steps) {
        Err(e @ gerstner_core::Error::InvalidSettings(_)) => return Err(CliError::Usage(e.into())),
        other => other.failure()?,
    };

    let radius = (params.k() * label.b()).exp() / params.k();
    let max_deviation = deviation_from_label(&traj, &label, &params);
    let radius_error = (traj.inferred_radius - radius).abs();
    let period_error = (traj.inferred_period - period).abs() / period;
    let ok = max_deviation <= tol * radius && radius_error <= tol * radius && period_error <= tol;

    let summary = json!({
        "label": { "a": label.a(), "b": label.b() },
        "start": { "t": t0, "x": x0, "z": z0 },
        "dt": dt,
        "steps": steps,
        "fit": {
            "center": traj.inferred_center,
            "radius": traj.inferred_radius,
            "period": traj.inferred_period,
            "max_deviation": max_deviation,
        },
        "analytic": {
            "center": (label.a(), label.b()),
            "radius": radius,
            "period": period,
        },
        "clockwise": traj.is_clockwise(),
        "tolerance": tol,
        "pass": ok,
    });

    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            eprintln!(
                "fit: center = ({}, {}), radius = {}, period = {}, max_deviation = {}",
                num(traj.inferred_center.0),
                num(traj.inferred_center.1),
                num(traj.inferred_radius),
                num(traj.inferred_period),
                num(max_deviation)
            );
            csv(
                &["t", "x", "z"],
                traj.samples.iter().map(|&(t, x, z)| vec![t, x, z]),
            )
        }
        Format::Json => {
            let mut full = summary;
            full["samples"] = json!(traj.samples);
            to_json(&full)?
        }
        Format::Svg => trace_svg(&traj.samples, traj.inferred_center, traj.inferred_radius),
    };
    if !ok {
        eprintln!(
            "orbit fit outside tolerance {tol:e}: deviation {max_deviation:e}, radius error {radius_error:e}, period error {period_error:e}"
        );
    }
    Ok(Outcome { text, pass: ok })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params().usage()?;
    let settings = cfg.inversion().usage()?;
    let grid = cfg.grid(&params).usage()?;
    let step = cfg.fd_step(&params).usage()?;
    let tolerances = cfg.tolerances().usage()?;
    let report = run_full_verification(&params, &grid, &settings, step, &tolerances).failure()?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from(
                "check,max_abs_residual,residual_scale,scaled_residual,tolerance,pass\n",
            );
            for c in &report.checks {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.name,
                    num(c.max_abs_residual),
                    num(c.residual_scale),
                    num(c.scaled_residual),
                    num(c.tolerance),
                    c.pass
                ));
            }
            out
        }
        f => return Err(unsupported("verify", f)),
    };
    for c in &report.checks {
        eprintln!(
            "[{}] {}: {:e} (tolerance {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.scaled_residual,
            c.tolerance
        );
    }
    Ok(Outcome {
        text,
        pass: report.overall_pass,
    })
}
