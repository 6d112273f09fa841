//! End-to-end scenario behavior: fringe geometry, width ordering, the
//! no-signaling bound, and the beam-width limit.

use approx::assert_relative_eq;
use biphoton::analytic::{single_slit_first_zero, strekalov_first_zero, GaussianPrefactor};
use biphoton::config::ScanSpec;
use biphoton::experiments::{
    beam_width_limit_study, no_signaling_check, no_signaling_check_windowed, run_kim_shih_scan,
    run_single_slit, run_strekalov_scan, RateMode,
};
use biphoton::{Preset, ValidatedConfig};

fn kim_shih() -> ValidatedConfig {
    Preset::KimShih.config().validate().unwrap()
}

fn strekalov() -> ValidatedConfig {
    Preset::Strekalov.config().validate().unwrap()
}

#[test]
fn single_slit_first_zero_sits_at_lambda_z_over_d() {
    let cfg = kim_shih();
    let zero = single_slit_first_zero(cfg.z2(), cfg.slit_width(), cfg.wavelength());
    assert!((zero - 6.5625).abs() < 1e-9);
    let doubled = single_slit_first_zero(2.0 * cfg.z2(), cfg.slit_width(), cfg.wavelength());
    assert!((doubled - 2.0 * zero).abs() < 1e-9);
}

#[test]
fn strekalov_fringe_scales_linearly_with_z2() {
    let cfg = strekalov();
    let zero = strekalov_first_zero(&cfg, 0.0);
    let expected = cfg.wavelength() * cfg.z2() / cfg.slit_width();
    assert!((zero - expected).abs() < 1e-9, "zero {zero} vs {expected}");
    assert_relative_eq!(zero, 2.8958, max_relative = 1e-4);

    let doubled_cfg = cfg.with_z2(2.0 * cfg.z2()).unwrap();
    let doubled = strekalov_first_zero(&doubled_cfg, 0.0);
    assert!((doubled - 2.0 * zero).abs() < 1e-9, "doubling z2 must double the fringe");
}

#[test]
fn centered_strekalov_scan_keeps_its_first_zero_under_both_prefactors() {
    let cfg = strekalov().with_left_detector_y(0.0).unwrap();
    for prefactor in [GaussianPrefactor::Drop, GaussianPrefactor::Retain] {
        let res = run_strekalov_scan(&cfg, prefactor).unwrap();
        assert!(res.metrics.peak_location_mm.abs() < 1e-9);
        // density at the analytic fringe zero is dark relative to the peak
        let zero = strekalov_first_zero(&cfg, 0.0);
        let grid = res.distribution.grid();
        let idx = grid
            .samples()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - zero).abs().total_cmp(&(b.1 - zero).abs()))
            .unwrap()
            .0;
        let near_zero = res.distribution.values()[idx];
        let peak = res.distribution.peak().value;
        assert!(near_zero / peak < 1e-4, "fringe zero not dark: {}", near_zero / peak);
    }
}

#[test]
fn no_signaling_between_catalogued_slit_widths() {
    let cfg = kim_shih();
    let dev = no_signaling_check(&cfg, 0.4).unwrap();
    assert!(dev < 1e-6, "slit width leaked into the right marginal: {dev}");
}

#[test]
fn no_signaling_deviation_is_window_independent() {
    let cfg = kim_shih();
    let narrow = no_signaling_check_windowed(&cfg, 0.4, 10.0, 21).unwrap();
    let wide = no_signaling_check_windowed(&cfg, 0.4, 20.0, 21).unwrap();
    assert!((narrow - wide).abs() < 1e-8, "narrow {narrow} vs wide {wide}");
}

#[test]
fn beam_widening_broadens_the_rate() {
    let cfg = kim_shih();
    let results =
        beam_width_limit_study(&cfg, &[1.0 / 3.0, 1.0 / 30.0, 1.0 / 300.0]).unwrap();
    let widths: Vec<f64> = results.iter().map(|r| r.metrics.fwhm_mm.unwrap()).collect();
    assert!(widths[0] < widths[1] && widths[1] < widths[2], "widths {widths:?}");
    assert_relative_eq!(widths[0], 0.588588, max_relative = 1e-3);
    assert_relative_eq!(widths[1], 4.697458, max_relative = 1e-3);
    assert_relative_eq!(widths[2], 7.674885, max_relative = 1e-3);
}

#[test]
fn narrow_beams_approach_the_pure_gaussian_halving_law() {
    // For large a the envelope dominates and FWHM ∝ 1/a; a fine scan window
    // resolves the narrow curves.
    let cfg = kim_shih().with_scan(ScanSpec::new(-0.2, 0.2, 2001)).unwrap();
    let results = beam_width_limit_study(&cfg, &[10.0, 20.0]).unwrap();
    let ratio = results[0].metrics.fwhm_mm.unwrap() / results[1].metrics.fwhm_mm.unwrap();
    assert!((ratio - 2.0).abs() < 0.05 * 2.0, "FWHM ratio {ratio}");
}

#[test]
fn collected_rate_metrics_reproduce_the_sub_slit_momentum_spread() {
    let cfg = kim_shih();
    let res = run_kim_shih_scan(&cfg, RateMode::ClosedForm).unwrap();
    let m = &res.metrics;
    // The rate's momentum spread sits just below the bare source value
    // 1/(2a) = 1.5 ħ/mm; the slit-convolution factor narrows it by ~0.3%.
    assert!(
        m.delta_p_hbar_per_mm > 1.49 && m.delta_p_hbar_per_mm < 1.5,
        "delta_p = {}",
        m.delta_p_hbar_per_mm
    );
    assert_relative_eq!(m.delta_p_hbar_per_mm, 1.495697, max_relative = 1e-4);
    assert_eq!(m.delta_y_mm, 0.08);
    assert!(m.product_hbar < 0.5);
    assert!(m.product_hbar > 0.10 && m.product_hbar < 0.40);
    assert_relative_eq!(m.product_hbar, 0.119656, max_relative = 1e-4);
}

#[test]
fn momentum_spread_never_exceeds_the_source_spread() {
    let cfg = kim_shih();
    let res = run_kim_shih_scan(&cfg, RateMode::ClosedForm).unwrap();
    let source_std = 1.0 / (2.0 * cfg.correlation_a());
    assert!(res.metrics.delta_p_hbar_per_mm <= source_std);
}

#[test]
fn rate_scan_sits_inside_the_single_slit_pattern() {
    let cfg = kim_shih();
    let rate = run_kim_shih_scan(&cfg, RateMode::ClosedForm).unwrap();
    let slit = run_single_slit(&cfg, cfg.z2()).unwrap();
    let fw_rate = rate.metrics.fwhm_mm.unwrap();
    let fw_slit = slit.metrics.fwhm_mm.unwrap();
    assert!(fw_rate < fw_slit);

    // Above half maximum the (peak-normalized) rate curve lies inside the
    // single-slit curve: its half-max interval is nested in the other's.
    let rate_peak = rate.distribution.peak();
    let slit_peak = slit.distribution.peak();
    let half_in = |r: &biphoton::ScanResult, peak_value: f64| -> (f64, f64) {
        let xs = r.distribution.grid().samples();
        let vs = r.distribution.values();
        let above: Vec<f64> = xs
            .iter()
            .zip(vs)
            .filter(|(_, &v)| v >= 0.5 * peak_value)
            .map(|(&x, _)| x)
            .collect();
        (above[0], *above.last().unwrap())
    };
    let (rl, rr) = half_in(&rate, rate_peak.value);
    let (sl, sr) = half_in(&slit, slit_peak.value);
    assert!(sl < rl && rr < sr, "rate [{rl}, {rr}] not inside slit [{sl}, {sr}]");
}
