//! Closed forms versus their quadrature counterparts.
//!
//! Every comparison normalizes both routes by one shared constant (their
//! origin values) and then measures deviation relative to the common peak,
//! which is the strongest metric f64 cancellation supports once the Gaussian
//! envelope reaches e^{-44} at the window edge.

use approx::assert_relative_eq;
use biphoton::analytic::{
    joint_momentum_density, joint_position_density, marginal_left_density,
    marginal_right_density, post_slit_momentum_amplitude, GaussianPrefactor,
};
use biphoton::grid::CoordinateKind;
use biphoton::oracle::{
    kim_shih_rate_numeric, kim_shih_rate_numeric_windowed, numeric_marginal,
    numeric_post_slit_amplitude, sample_momentum_joint_for_left_marginal,
    sample_momentum_joint_for_left_marginal_scaled, MarginalAxis,
};
use biphoton::{
    DensityDomain, Distribution1D, JointDensity2D, Preset, QuadratureSpec, TransverseGrid,
    ValidatedConfig,
};

fn kim_shih() -> ValidatedConfig {
    Preset::KimShih.config().validate().unwrap()
}

#[test]
fn post_slit_amplitude_matches_oracle_on_the_full_grid() {
    let cfg = kim_shih();
    let spec = QuadratureSpec::default();
    let (a, d) = (cfg.correlation_a(), cfg.slit_width());

    let numeric_origin = numeric_post_slit_amplitude(0.0, 0.0, &cfg, &spec).unwrap();
    let closed_origin = post_slit_momentum_amplitude(0.0, 0.0, a, d);
    let scale = numeric_origin / closed_origin;

    let n = 10;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let p_r = -20.0 + 40.0 * i as f64 / (n - 1) as f64;
            let p_l = -20.0 + 40.0 * j as f64 / (n - 1) as f64;
            let numeric = numeric_post_slit_amplitude(p_r, p_l, &cfg, &spec).unwrap();
            let closed = scale * post_slit_momentum_amplitude(p_r, p_l, a, d);
            worst = worst.max((numeric - closed).abs() / numeric_origin.abs());
        }
    }
    assert!(worst < 1e-6, "peak-relative deviation {worst}");
}

#[test]
fn right_marginal_collapses_to_the_source_gaussian() {
    let cfg = kim_shih();
    let spec = QuadratureSpec::default();
    let right_grid =
        TransverseGrid::symmetric(CoordinateKind::MomentumRadPerMm, 20.0, 41).unwrap();
    let joint = sample_momentum_joint_for_left_marginal(&cfg, right_grid.clone()).unwrap();
    let marginal = numeric_marginal(&joint, MarginalAxis::Left, &spec).unwrap();

    let gaussian = Distribution1D::sample(right_grid, |p| {
        marginal_right_density(p, cfg.correlation_a())
    })
    .unwrap()
    .normalize()
    .unwrap();

    let mut worst = 0.0_f64;
    for (m, g) in marginal.values().iter().zip(gaussian.values()) {
        worst = worst.max(((m - g) / g).abs());
    }
    assert!(worst < 1e-6, "pointwise relative deviation {worst}");
}

#[test]
fn left_marginal_recovers_the_slit_pattern_for_narrow_momentum_spread() {
    // a = 3 mm puts the source Gaussian far inside the slit scale, the regime
    // where the joint's Gaussian acts as a delta under the p_R integral.
    let cfg_wide = kim_shih().with_correlation_a(3.0).unwrap();
    let spec = QuadratureSpec::default();
    let a = cfg_wide.correlation_a();
    let d = cfg_wide.slit_width();

    let left_grid = TransverseGrid::symmetric(CoordinateKind::MomentumRadPerMm, 20.0, 41).unwrap();
    let right_grid =
        TransverseGrid::symmetric(CoordinateKind::MomentumRadPerMm, 2.0, 201).unwrap();
    let joint = JointDensity2D::sample(left_grid.clone(), right_grid, DensityDomain::Momentum, {
        |p_l, p_r| joint_momentum_density(p_r, p_l, a, d)
    })
    .unwrap();
    let marginal = numeric_marginal(&joint, MarginalAxis::Right, &spec).unwrap();

    let slit_pattern = Distribution1D::sample(left_grid, |p| marginal_left_density(p, d))
        .unwrap()
        .normalize()
        .unwrap();

    let mut worst = 0.0_f64;
    for (m, s) in marginal.values().iter().zip(slit_pattern.values()) {
        worst = worst.max(((m - s) / s).abs());
    }
    assert!(worst < 1e-3, "near-peak relative deviation {worst}");
}

#[test]
fn symmetric_joint_yields_symmetric_marginal() {
    let cfg = kim_shih();
    let spec = QuadratureSpec::default();
    let right_grid =
        TransverseGrid::symmetric(CoordinateKind::MomentumRadPerMm, 15.0, 31).unwrap();
    let joint = sample_momentum_joint_for_left_marginal(&cfg, right_grid).unwrap();
    let marginal = numeric_marginal(&joint, MarginalAxis::Left, &spec).unwrap();
    let v = marginal.values();
    let n = v.len();
    for i in 0..n / 2 {
        assert_relative_eq!(v[i], v[n - 1 - i], max_relative = 1e-9);
    }
}

#[test]
fn position_density_equals_momentum_density_up_to_the_angle_scale() {
    // Two algebraic routes to the same joint density: directly in position
    // space, and through the inferred momenta with the (2π/λ)² Jacobian-like
    // scale from the sinc denominator.
    let cfg = Preset::Strekalov.config().validate().unwrap();
    let scale = (2.0 * std::f64::consts::PI / cfg.wavelength()).powi(2);
    for (y_r, y_l) in [(0.0, 0.0), (0.7, -1.1), (-3.3, 2.0), (1.95, 0.4)] {
        let p_r = biphoton::analytic::inferred_momentum(y_r, cfg.z2(), cfg.wavelength());
        let p_l = biphoton::analytic::inferred_momentum(y_l, cfg.z1(), cfg.wavelength());
        let via_momentum = scale
            * joint_momentum_density(p_r, p_l, cfg.correlation_a(), cfg.slit_width());
        let direct = joint_position_density(y_r, y_l, &cfg, GaussianPrefactor::Retain);
        assert_relative_eq!(direct, via_momentum, max_relative = 1e-11);
    }
}

#[test]
fn widening_the_rate_window_does_not_move_the_result() {
    let cfg = kim_shih();
    let spec = QuadratureSpec::default();
    for y in [0.0, 0.6, 1.2] {
        let base = kim_shih_rate_numeric(y, &cfg, &spec).unwrap();
        let wide = kim_shih_rate_numeric_windowed(y, &cfg, &spec, 2.0).unwrap();
        assert!(
            ((wide - base) / base).abs() < 1e-8,
            "y={y}: window doubling moved the rate by {}",
            ((wide - base) / base).abs()
        );
    }
}

#[test]
fn widening_the_marginal_window_does_not_move_the_marginal() {
    let cfg = kim_shih();
    let spec = QuadratureSpec::default();
    let right_grid =
        TransverseGrid::symmetric(CoordinateKind::MomentumRadPerMm, 10.0, 21).unwrap();
    let base = numeric_marginal(
        &sample_momentum_joint_for_left_marginal(&cfg, right_grid.clone()).unwrap(),
        MarginalAxis::Left,
        &spec,
    )
    .unwrap();
    let wide = numeric_marginal(
        &sample_momentum_joint_for_left_marginal_scaled(&cfg, right_grid, 2.0).unwrap(),
        MarginalAxis::Left,
        &spec,
    )
    .unwrap();
    for (b, w) in base.values().iter().zip(wide.values()) {
        assert!(((w - b) / b).abs() < 1e-8);
    }
}
