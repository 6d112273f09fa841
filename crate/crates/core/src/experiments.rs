//! Scenario drivers: the single-slit reference pattern, coincidence scans
//! with a fixed left detector, the collected-rate scan, uncertainty metrics,
//! and the no-signaling and beam-width studies.

use thiserror::Error;

use crate::analytic::{
    joint_position_density, single_slit_density, GaussianPrefactor, RateClosedForm,
    RateExponentSign,
};
use crate::config::{ConfigErrors, ExperimentConfig, ValidatedConfig};
use crate::distribution::{Distribution1D, DistributionError};
use crate::grid::CoordinateKind;
use crate::oracle::{
    calibrate_rate_constant, kim_shih_rate_numeric, numeric_marginal,
    sample_momentum_joint_for_left_marginal, MarginalAxis, OracleError, QuadratureSpec,
    RateCalibration,
};
use crate::TransverseGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    SingleSlit,
    Strekalov,
    KimShih,
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::SingleSlit => "single-slit",
            Scenario::Strekalov => "strekalov",
            Scenario::KimShih => "kim-shih",
        }
    }
}

/// Whether the collected-rate scan evaluates the calibrated closed form or
/// integrates the weighted joint density at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    ClosedForm,
    Numeric,
}

impl RateMode {
    pub fn label(&self) -> &'static str {
        match self {
            RateMode::ClosedForm => "closed-form",
            RateMode::Numeric => "numeric",
        }
    }
}

/// Position and momentum widths of a scanned distribution, in units of ħ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// Localization half-width d/2: the slit restricts the transmitted pair
    /// to a width d, and the product quoted alongside uses the half-width.
    pub delta_y_mm: f64,
    /// Standard deviation of the scan mapped through p = 2πy/(λ·z), ħ·mm⁻¹.
    pub delta_p_hbar_per_mm: f64,
    /// delta_y · delta_p in units of ħ.
    pub product_hbar: f64,
    pub peak_location_mm: f64,
    pub fwhm_mm: Option<f64>,
}

/// How a scan was produced: enough to reproduce it and to recover raw
/// (pre-normalization) densities.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    /// Window the distribution was normalized over.
    pub window: (f64, f64),
    /// Integral divided out at normalization.
    pub normalization: f64,
    /// Distance used for the momentum mapping in the metrics.
    pub plane_distance_mm: f64,
    pub mode: Option<RateMode>,
    pub prefactor: Option<GaussianPrefactor>,
    pub left_detector_y_mm: Option<f64>,
    pub calibration: Option<RateCalibration>,
}

/// A normalized scanned distribution with its metrics and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub distribution: Distribution1D,
    pub metrics: UncertaintyReport,
    pub provenance: Provenance,
}

impl ScanResult {
    /// Peak density before normalization, comparable across scans that share
    /// a configuration.
    pub fn raw_peak_value(&self) -> f64 {
        self.distribution.peak().value * self.provenance.normalization
    }

    /// Recompute the metrics from the stored distribution; they must agree.
    pub fn metrics_are_consistent(&self) -> bool {
        let recomputed = match self.provenance.config.validate() {
            Ok(cfg) => compute_uncertainty_report(
                &self.distribution,
                &cfg,
                self.provenance.plane_distance_mm,
            ),
            Err(_) => return false,
        };
        match recomputed {
            Ok(m) => {
                (m.delta_p_hbar_per_mm - self.metrics.delta_p_hbar_per_mm).abs()
                    <= 1e-12 * self.metrics.delta_p_hbar_per_mm.abs()
                    && (m.product_hbar - self.metrics.product_hbar).abs()
                        <= 1e-12 * self.metrics.product_hbar.abs()
            }
            Err(_) => false,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("distribution must be normalized before computing metrics")]
    NotNormalized,
    #[error("metrics require a position-space distribution")]
    WrongDomain,
    #[error("{0}")]
    InvalidParameter(&'static str),
}

fn scan_distribution(
    cfg: &ValidatedConfig,
    f: impl Fn(f64) -> f64,
) -> Result<Distribution1D, ExperimentError> {
    let dist = Distribution1D::sample(cfg.scan_grid().clone(), f)?;
    Ok(dist.normalize()?)
}

/// Width metrics of a normalized position-space scan: Δy is the slit
/// half-width d/2, Δp the standard deviation mapped through
/// p = 2πy/(λ·plane_distance).
pub fn compute_uncertainty_report(
    dist: &Distribution1D,
    cfg: &ValidatedConfig,
    plane_distance_mm: f64,
) -> Result<UncertaintyReport, ExperimentError> {
    if !dist.is_normalized() {
        return Err(ExperimentError::NotNormalized);
    }
    if dist.grid().kind() != CoordinateKind::PositionMm {
        return Err(ExperimentError::WrongDomain);
    }
    if !(plane_distance_mm > 0.0) {
        return Err(ExperimentError::InvalidParameter("plane distance must be positive"));
    }
    let delta_y = 0.5 * cfg.slit_width();
    let momentum_per_mm = 2.0 * std::f64::consts::PI / (cfg.wavelength() * plane_distance_mm);
    let delta_p = momentum_per_mm * dist.std_dev();
    let peak = dist.peak();
    Ok(UncertaintyReport {
        delta_y_mm: delta_y,
        delta_p_hbar_per_mm: delta_p,
        product_hbar: delta_y * delta_p,
        peak_location_mm: peak.location,
        fwhm_mm: dist.fwhm(),
    })
}

/// Single-slit diffraction pattern at distance `z`, sampled over the scan
/// window and normalized.
pub fn run_single_slit(cfg: &ValidatedConfig, z_mm: f64) -> Result<ScanResult, ExperimentError> {
    if !(z_mm > 0.0) {
        return Err(ExperimentError::InvalidParameter("z must be positive"));
    }
    let (d, lam) = (cfg.slit_width(), cfg.wavelength());
    let dist = scan_distribution(cfg, |y| single_slit_density(y, z_mm, d, lam))?;
    let metrics = compute_uncertainty_report(&dist, cfg, z_mm)?;
    Ok(ScanResult {
        distribution: dist,
        metrics,
        provenance: Provenance {
            scenario: Scenario::SingleSlit,
            config: *cfg.config(),
            window: (cfg.scan().y_min_mm, cfg.scan().y_max_mm),
            normalization: 0.0, // replaced below
            plane_distance_mm: z_mm,
            mode: None,
            prefactor: None,
            left_detector_y_mm: None,
            calibration: None,
        },
    }
    .with_recorded_normalization())
}

impl ScanResult {
    fn with_recorded_normalization(mut self) -> Self {
        self.provenance.normalization = self.distribution.normalization_scale();
        self
    }
}

/// Right-detector coincidence scan with the left detector fixed at
/// `cfg.left_detector_y`. The prefactor choice selects between the full
/// position-space density and its envelope-free approximation; the
/// anticorrelated displacement −(z2/z1)·y_L is a property of the envelope-free
/// pattern.
pub fn run_strekalov_scan(
    cfg: &ValidatedConfig,
    prefactor: GaussianPrefactor,
) -> Result<ScanResult, ExperimentError> {
    let y_l = cfg.left_detector_y();
    let dist = scan_distribution(cfg, |y_r| joint_position_density(y_r, y_l, cfg, prefactor))?;
    let metrics = compute_uncertainty_report(&dist, cfg, cfg.z2())?;
    Ok(ScanResult {
        distribution: dist,
        metrics,
        provenance: Provenance {
            scenario: Scenario::Strekalov,
            config: *cfg.config(),
            window: (cfg.scan().y_min_mm, cfg.scan().y_max_mm),
            normalization: 0.0,
            plane_distance_mm: cfg.z2(),
            mode: None,
            prefactor: Some(prefactor),
            left_detector_y_mm: Some(y_l),
            calibration: None,
        },
    }
    .with_recorded_normalization())
}

/// Collected-rate scan: every transmitted left photon is counted, so the
/// right detector sees the single-slit-weighted average of the joint density.
/// The closed form is recalibrated against quadrature on every run and the
/// outcome is recorded in the provenance.
pub fn run_kim_shih_scan(
    cfg: &ValidatedConfig,
    mode: RateMode,
) -> Result<ScanResult, ExperimentError> {
    let spec = QuadratureSpec::default();
    let calibration = calibrate_rate_constant(cfg, &spec, 1e-6)?;
    let dist = match mode {
        RateMode::ClosedForm => {
            let form = RateClosedForm {
                arg_constant: calibration.chosen,
                exponent_sign: RateExponentSign::Decaying,
            };
            scan_distribution(cfg, |y_r| form.eval(y_r, cfg))?
        }
        RateMode::Numeric => {
            let values: Vec<f64> = cfg
                .scan_grid()
                .samples()
                .iter()
                .map(|&y_r| kim_shih_rate_numeric(y_r, cfg, &spec))
                .collect::<Result<_, _>>()?;
            Distribution1D::from_samples(cfg.scan_grid().clone(), values)?.normalize()?
        }
    };
    let metrics = compute_uncertainty_report(&dist, cfg, cfg.z2())?;
    Ok(ScanResult {
        distribution: dist,
        metrics,
        provenance: Provenance {
            scenario: Scenario::KimShih,
            config: *cfg.config(),
            window: (cfg.scan().y_min_mm, cfg.scan().y_max_mm),
            normalization: 0.0,
            plane_distance_mm: cfg.z2(),
            mode: Some(mode),
            prefactor: Some(GaussianPrefactor::Retain),
            left_detector_y_mm: None,
            calibration: Some(calibration),
        },
    }
    .with_recorded_normalization())
}

/// Maximum pointwise relative deviation between the normalized right-side
/// momentum marginals computed for two slit widths. A nonzero deviation would
/// let the right observer infer the slit setting without the coincidence
/// channel.
pub fn no_signaling_check(
    cfg: &ValidatedConfig,
    d_alt_mm: f64,
) -> Result<f64, ExperimentError> {
    no_signaling_check_windowed(cfg, d_alt_mm, 20.0, 41)
}

/// [`no_signaling_check`] with an explicit right-momentum window, used to
/// show the deviation is insensitive to the observation window.
pub fn no_signaling_check_windowed(
    cfg: &ValidatedConfig,
    d_alt_mm: f64,
    p_half_width: f64,
    points: usize,
) -> Result<f64, ExperimentError> {
    if !(d_alt_mm > 0.0) {
        return Err(ExperimentError::InvalidParameter("alternate slit width must be positive"));
    }
    let spec = QuadratureSpec::default();
    let right_grid = TransverseGrid::symmetric(CoordinateKind::MomentumRadPerMm, p_half_width, points)
        .map_err(|_| ExperimentError::InvalidParameter("bad momentum window"))?;

    let marginal_for = |c: &ValidatedConfig| -> Result<Distribution1D, ExperimentError> {
        let joint = sample_momentum_joint_for_left_marginal(c, right_grid.clone())?;
        Ok(numeric_marginal(&joint, MarginalAxis::Left, &spec)?)
    };

    let base = marginal_for(cfg)?;
    let alt_cfg = cfg.with_slit_width(d_alt_mm)?;
    let alt = marginal_for(&alt_cfg)?;

    let max_dev = base
        .values()
        .iter()
        .zip(alt.values())
        .map(|(&b, &a)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    Ok(max_dev)
}

/// Collected-rate scans for a list of packet parameters. The rate broadens as
/// the source beam widens (a → 0); callers assert the FWHM ordering.
pub fn beam_width_limit_study(
    cfg: &ValidatedConfig,
    a_values_mm: &[f64],
) -> Result<Vec<ScanResult>, ExperimentError> {
    a_values_mm
        .iter()
        .map(|&a| {
            let cfg_a = cfg.with_correlation_a(a)?;
            run_kim_shih_scan(&cfg_a, RateMode::ClosedForm)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Preset, ScanSpec};
    use approx::assert_relative_eq;

    fn kim_shih() -> ValidatedConfig {
        Preset::KimShih.config().validate().unwrap()
    }

    fn strekalov() -> ValidatedConfig {
        Preset::Strekalov.config().validate().unwrap()
    }

    #[test]
    fn single_slit_peaks_at_center_and_is_normalized() {
        let cfg = kim_shih();
        let res = run_single_slit(&cfg, cfg.z2()).unwrap();
        assert!(res.distribution.is_normalized());
        assert!(res.metrics.peak_location_mm.abs() < 1e-9);
        assert!(res.metrics_are_consistent());
        res.distribution.check_invariants().unwrap();
    }

    #[test]
    fn strekalov_displaced_scan_peaks_on_the_anticorrelation_line() {
        let cfg = strekalov();
        let res = run_strekalov_scan(&cfg, GaussianPrefactor::Drop).unwrap();
        let expected = -cfg.z2() / cfg.z1() * cfg.left_detector_y();
        let spacing = res.distribution.grid().spacing();
        assert!(
            (res.metrics.peak_location_mm - expected).abs() <= spacing,
            "peak {} vs expected {expected}",
            res.metrics.peak_location_mm
        );
    }

    #[test]
    fn retained_envelope_suppresses_the_displaced_peak() {
        let cfg = strekalov();
        let displaced = run_strekalov_scan(&cfg, GaussianPrefactor::Retain).unwrap();
        let centered_cfg = cfg.with_left_detector_y(0.0).unwrap();
        let centered = run_strekalov_scan(&centered_cfg, GaussianPrefactor::Retain).unwrap();
        assert!(
            displaced.raw_peak_value() < centered.raw_peak_value(),
            "displaced raw peak {} should be below centered {}",
            displaced.raw_peak_value(),
            centered.raw_peak_value()
        );
        // And dramatically so: the envelope confines the displaced lobe.
        assert!(displaced.raw_peak_value() / centered.raw_peak_value() < 0.05);
    }

    #[test]
    fn anticorrelation_holds_across_the_central_region() {
        let cfg = strekalov();
        let central = cfg.wavelength() * cfg.z1() / cfg.slit_width();
        for y_l in [-central * 0.9, -0.8, 0.0, 0.5, 1.2, central * 0.9] {
            let c = cfg.with_left_detector_y(y_l).unwrap();
            let res = run_strekalov_scan(&c, GaussianPrefactor::Drop).unwrap();
            let expected = -c.z2() / c.z1() * y_l;
            let spacing = res.distribution.grid().spacing();
            assert!(
                (res.metrics.peak_location_mm - expected).abs() <= spacing,
                "y_l={y_l}: peak {} vs {expected}",
                res.metrics.peak_location_mm
            );
        }
    }

    #[test]
    fn kim_shih_scan_is_narrower_than_single_slit() {
        let cfg = kim_shih();
        let rate = run_kim_shih_scan(&cfg, RateMode::ClosedForm).unwrap();
        let reference = run_single_slit(&cfg, cfg.z2()).unwrap();
        let fw_rate = rate.metrics.fwhm_mm.unwrap();
        let fw_ref = reference.metrics.fwhm_mm.unwrap();
        assert!(fw_rate < fw_ref, "rate FWHM {fw_rate} should be below single-slit {fw_ref}");
        assert_relative_eq!(fw_rate, 0.588588, max_relative = 1e-3);
        assert_relative_eq!(fw_ref, 5.813672, max_relative = 1e-3);
        assert!(rate.provenance.calibration.is_some());
    }

    #[test]
    fn closed_and_numeric_rate_modes_agree_pointwise() {
        let cfg = kim_shih()
            .with_scan(ScanSpec::new(-1.5, 1.5, 41))
            .unwrap();
        let closed = run_kim_shih_scan(&cfg, RateMode::ClosedForm).unwrap();
        let numeric = run_kim_shih_scan(&cfg, RateMode::Numeric).unwrap();
        for (c, n) in closed.distribution.values().iter().zip(numeric.distribution.values()) {
            assert_relative_eq!(c, n, max_relative = 1e-6);
        }
        assert_eq!(closed.provenance.mode, Some(RateMode::ClosedForm));
        assert_eq!(numeric.provenance.mode, Some(RateMode::Numeric));
    }

    #[test]
    fn gaussian_scan_maps_std_linearly_into_momentum() {
        let cfg = kim_shih();
        let sigma = 0.6;
        let dist = Distribution1D::sample(cfg.scan_grid().clone(), |y| {
            (-0.5 * y * y / (sigma * sigma)).exp()
        })
        .unwrap()
        .normalize()
        .unwrap();
        let report = compute_uncertainty_report(&dist, &cfg, cfg.z2()).unwrap();
        let expected = 2.0 * std::f64::consts::PI * sigma / (cfg.wavelength() * cfg.z2());
        assert_relative_eq!(report.delta_p_hbar_per_mm, expected, max_relative = 1e-6);
        assert!(report.peak_location_mm.abs() < 1e-9);
        assert_eq!(report.delta_y_mm, 0.08);
        assert_relative_eq!(
            report.product_hbar,
            report.delta_y_mm * report.delta_p_hbar_per_mm,
            max_relative = 1e-15
        );
    }

    #[test]
    fn metrics_require_normalized_input() {
        let cfg = kim_shih();
        let dist =
            Distribution1D::sample(cfg.scan_grid().clone(), |y| (-y * y).exp()).unwrap();
        assert!(matches!(
            compute_uncertainty_report(&dist, &cfg, cfg.z2()),
            Err(ExperimentError::NotNormalized)
        ));
    }

    #[test]
    fn identical_slit_widths_cannot_signal() {
        let cfg = kim_shih();
        let dev = no_signaling_check_windowed(&cfg, cfg.slit_width(), 10.0, 11).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn study_with_single_value_matches_direct_scan() {
        let cfg = kim_shih();
        let study = beam_width_limit_study(&cfg, &[cfg.correlation_a()]).unwrap();
        assert_eq!(study.len(), 1);
        let direct = run_kim_shih_scan(&cfg, RateMode::ClosedForm).unwrap();
        assert_eq!(study[0].distribution.values(), direct.distribution.values());
    }
}
