use gerstner_core::verify::*;
use gerstner_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn settings() -> InversionSettings {
    InversionSettings::default()
}

/// Random interior points from labels at least `0.2/k` below the surface label.
fn interior_points(p: &WaveParameters, n: usize, seed: u64) -> Vec<EulerianPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.gen_range(0.0..5.0);
            let a = rng.gen_range(0.0..p.wavelength());
            let b = p.b0() - (0.2 + rng.gen_range(0.0..2.5)) / p.k();
            let (x, z) = flow_map(t, &LagrangianLabel::new(a, b, p).unwrap(), p);
            EulerianPoint::new(t, x, z)
        })
        .collect()
}

#[test]
fn residuals_at_coarse_step_on_random_interior_points() {
    let p = WaveParameters::default();
    let step = FdStep::new(1e-4 / p.k(), &p).unwrap();
    for point in interior_points(&p, 40, 1) {
        let m = momentum_residual(&point, &p, &settings(), step).unwrap();
        assert!(m.scaled_max() <= 1e-5, "{m:?}");
        let d = divergence_residual(&point, &p, &settings(), step).unwrap();
        assert!(d.scaled() <= 1e-5, "{d:?}");
        let v = vorticity_residual(&point, &p, &settings(), step).unwrap();
        assert!(v.scaled() <= 1e-4, "{v:?}");
    }
}

#[test]
fn second_order_convergence() {
    let p = WaveParameters::default();
    let step = FdStep::new(5e-3 / p.k(), &p).unwrap();
    for point in interior_points(&p, 12, 2) {
        let r = convergence_ratios(&point, &p, &settings(), step).unwrap();
        for ratio in [r.momentum, r.divergence, r.vorticity] {
            assert!((3.5..=4.5).contains(&ratio), "{r:?} at {point:?}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..12 {
        let t = rng.gen_range(0.0..5.0);
        let a = rng.gen_range(0.0..p.wavelength());
        let ratio = kinematic_convergence_ratio(t, a, &p, &settings(), step).unwrap();
        assert!((3.5..=4.5).contains(&ratio), "kinematic {ratio} at a = {a}");
    }
}

#[test]
fn deep_points_have_negligible_residuals() {
    let p = WaveParameters::default();
    let step = FdStep::new(1e-4 / p.k(), &p).unwrap();
    let point = EulerianPoint::new(0.4, 1.3, p.b0() - 10.0 / p.k());
    let d = divergence_residual(&point, &p, &settings(), step).unwrap();
    assert!(d.value.abs() <= 1e-12 * p.c() * p.k());
    let v = vorticity_residual(&point, &p, &settings(), step).unwrap();
    assert!(v.value.abs() <= 1e-12 * p.c() * p.k());
}

#[test]
fn vorticity_at_the_half_point() {
    let p = WaveParameters::default();
    let b = -(2.0f64.ln()) / (2.0 * p.k());
    let step = FdStep::new(1e-4 / p.k(), &p).unwrap();
    for i in 0..8 {
        let a = i as f64 * 0.8;
        let (x, z) = flow_map(0.5, &LagrangianLabel::new(a, b, &p).unwrap(), &p);
        let point = EulerianPoint::new(0.5, x, z);
        let s = Stencil::evaluate(&point, &p, &settings(), step).unwrap();
        let target = -2.0 * p.k() * p.c();
        assert!((s.vorticity() - target).abs() <= 1e-4 * p.k() * p.c());
        assert!(s.vorticity() < 0.0);
    }
}

#[test]
fn fd_gradient_agrees_with_chain_rule() {
    let p = WaveParameters::default();
    let step = FdStep::default_for(&p);
    for point in interior_points(&p, 10, 4) {
        let s = Stencil::evaluate(&point, &p, &settings(), step).unwrap();
        let g = analytic_velocity_gradient(&point, &p, &settings()).unwrap();
        let scale = p.c() * p.k();
        assert!((s.divergence() - g.trace()).abs() <= 1e-6 * scale);
        assert!((s.vorticity() - (g.0[0][1] - g.0[1][0])).abs() <= 1e-6 * scale);
    }
}

#[test]
fn kinematic_condition_on_random_surface_labels() {
    let p = WaveParameters::default();
    let step = FdStep::new(1e-4 / p.k(), &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let t = rng.gen_range(0.0..5.0);
        let a = rng.gen_range(-5.0..5.0);
        let r = kinematic_bc_residual(t, a, &p, &settings(), step).unwrap();
        assert!(r.fd.abs() <= 1e-5 * p.c(), "{r:?}");
        assert!(r.analytic.abs() <= 1e-12 * p.c(), "{r:?}");
    }
}

#[test]
fn dynamic_condition_is_time_invariant_along_a_phase() {
    let p = WaveParameters::default();
    let phase0 = 0.7;
    let values: Vec<f64> = (0..20)
        .map(|i| {
            let t = i as f64 * p.period() / 20.0;
            dynamic_bc_residual(t, phase0 + p.c() * t, &p, &settings())
                .unwrap()
                .scaled()
        })
        .collect();
    assert!(values.iter().all(|&v| v <= 1e-9));
}

#[test]
fn decay_down_a_column() {
    let p = WaveParameters::default();
    let depths: Vec<f64> = (0..12).map(|i| p.b0() - (1.0 + i as f64) / p.k()).collect();
    let d = decay_check(0.3, 0.9, &p, &settings(), &depths).unwrap();
    assert!(d.within_bound && d.strictly_decreasing);

    let z = p.b0() - 10.0 / p.k();
    let d = decay_check(0.3, 0.9, &p, &settings(), &[z]).unwrap();
    assert!(d.magnitudes[0] <= p.c() * (-9.0f64).exp());

    // One e-folding per 1/k of depth.
    let deep = [p.b0() - 6.0 / p.k(), p.b0() - 7.0 / p.k()];
    let d = decay_check(1.1, 2.0, &p, &settings(), &deep).unwrap();
    let ratio = d.magnitudes[0] / d.magnitudes[1];
    let e = std::f64::consts::E;
    assert!((ratio - e).abs() <= 0.05 * e, "{ratio}");
}

#[test]
fn full_sweep_passes_with_and_without_rotation() {
    for omega in [7.3e-5, 0.0] {
        let p = WaveParameters::default().with_omega(omega).unwrap();
        let report = run_full_verification(
            &p,
            &SamplingGrid::default_for(&p),
            &settings(),
            FdStep::default_for(&p),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(report.overall_pass, "{report:#?}");
        assert_eq!(report.checks.len(), 5);
        assert!(report.point_failures.is_empty());
        assert!(report.checks.iter().all(|c| c.residual_scale > 0.0));
    }
}

#[test]
fn sweep_reports_bad_points_and_continues() {
    let p = WaveParameters::default();
    let mut grid = SamplingGrid::default_for(&p);
    grid.extra_points.push(EulerianPoint::new(0.0, 0.0, 2.0));
    let report = run_full_verification(
        &p,
        &grid,
        &settings(),
        FdStep::default_for(&p),
        &Tolerances::default(),
    )
    .unwrap();
    assert!(!report.overall_pass);
    assert_eq!(report.point_failures.len(), 3);
    assert!(report.point_failures[0]
        .error
        .contains("not below the free surface"));
    let momentum = &report.checks[0];
    assert_eq!(momentum.failures, 1);
    assert_eq!(momentum.samples, report.grid.interior_points - 1);
    assert!(momentum.scaled_residual <= momentum.tolerance);
    // The surface checks are untouched.
    assert!(report.checks[3].pass && report.checks[4].pass);
}

#[test]
fn zero_tolerance_fails_every_check() {
    let p = WaveParameters::default();
    let report = run_full_verification(
        &p,
        &SamplingGrid::default_for(&p),
        &settings(),
        FdStep::default_for(&p),
        &Tolerances::uniform(0.0),
    )
    .unwrap();
    assert!(!report.overall_pass);
    assert!(report.checks.iter().filter(|c| !c.pass).count() >= 4);
}

#[test]
fn sweep_is_deterministic() {
    let p = WaveParameters::default();
    let run = || {
        run_full_verification(
            &p,
            &SamplingGrid::default_for(&p),
            &settings(),
            FdStep::default_for(&p),
            &Tolerances::default(),
        )
        .unwrap()
    };
    assert_eq!(run(), run());
}
