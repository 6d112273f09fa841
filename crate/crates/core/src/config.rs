//! Experiment configuration: physical constants, scan window, presets, and
//! the on-disk config format.
//!
//! All lengths are millimetres. The entanglement parameter `a` enters the
//! source momentum profile exp(-2 p² a²); catalogued beam widths quote 1/a,
//! so a 3 mm beam stores a = 1/3.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{CoordinateKind, TransverseGrid};

/// Uniform scan window over a transverse detector coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub y_min_mm: f64,
    pub y_max_mm: f64,
    pub points: usize,
}

impl ScanSpec {
    pub fn new(y_min_mm: f64, y_max_mm: f64, points: usize) -> Self {
        Self { y_min_mm, y_max_mm, points }
    }

    pub fn spacing(&self) -> f64 {
        (self.y_max_mm - self.y_min_mm) / (self.points - 1) as f64
    }
}

/// Raw physical constants of one experimental arrangement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Photon wavelength λ, mm.
    pub wavelength_mm: f64,
    /// Gaussian packet parameter a, mm; the source momentum density is
    /// exp(-2 p² a²), so the catalogued beam width is 1/a.
    pub correlation_a_mm: f64,
    /// Slit width d, mm.
    pub slit_width_mm: f64,
    /// Slit plane to left detector plane, mm.
    pub z1_mm: f64,
    /// Slit plane to right detector plane, mm.
    pub z2_mm: f64,
    /// Fixed left detector position for coincidence scans, mm.
    pub left_detector_y_mm: f64,
    pub scan: ScanSpec,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{field} must be positive")]
    NonPositiveLength { field: &'static str },
    #[error("degenerate scan: need points >= 3 and y_min < y_max, got points={points}, y_min={y_min}, y_max={y_max}")]
    DegenerateScan { points: usize, y_min: f64, y_max: f64 },
}

/// Every violation found while validating a configuration.
#[derive(Debug, Error, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: ")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Non-fatal conditions carried alongside a validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Fresnel number d²/(λ·min(z1,z2)) exceeds 0.1, so the far-field
    /// (Fraunhofer) forms are marginal for this geometry.
    FresnelNumberLarge { value: f64 },
    /// The catalogue gives no beam width for this arrangement; a = 1/3 mm is
    /// assumed and every derived scan inherits that assumption.
    BeamWidthAssumed,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::FresnelNumberLarge { value } => write!(
                f,
                "Fresnel number {value:.4} exceeds 0.1; far-field approximation is marginal"
            ),
            Warning::BeamWidthAssumed => {
                write!(f, "beam width not given; defaulting a = 1/3 mm")
            }
        }
    }
}

/// A configuration that passed validation, with derived quantities cached.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    config: ExperimentConfig,
    fresnel_number: f64,
    warnings: Vec<Warning>,
    scan_grid: TransverseGrid,
}

impl ExperimentConfig {
    /// Check every invariant, collecting all violations rather than stopping
    /// at the first. Warnings (large Fresnel number) never abort.
    pub fn validate(&self) -> Result<ValidatedConfig, ConfigErrors> {
        let mut errors = Vec::new();
        for (value, field) in [
            (self.wavelength_mm, "wavelength"),
            (self.correlation_a_mm, "correlation_a"),
            (self.slit_width_mm, "slit_width"),
            (self.z1_mm, "z1"),
            (self.z2_mm, "z2"),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                errors.push(ConfigError::NonPositiveLength { field });
            }
        }
        if self.scan.points < 3
            || !(self.scan.y_min_mm < self.scan.y_max_mm)
            || !self.scan.y_min_mm.is_finite()
            || !self.scan.y_max_mm.is_finite()
        {
            errors.push(ConfigError::DegenerateScan {
                points: self.scan.points,
                y_min: self.scan.y_min_mm,
                y_max: self.scan.y_max_mm,
            });
        }
        if !errors.is_empty() {
            return Err(ConfigErrors(errors));
        }

        let fresnel_number =
            self.slit_width_mm * self.slit_width_mm / (self.wavelength_mm * self.z1_mm.min(self.z2_mm));
        let mut warnings = Vec::new();
        if fresnel_number > 0.1 {
            warnings.push(Warning::FresnelNumberLarge { value: fresnel_number });
        }
        let scan_grid = TransverseGrid::uniform(
            CoordinateKind::PositionMm,
            self.scan.y_min_mm,
            self.scan.y_max_mm,
            self.scan.points,
        )
        .expect("scan bounds were validated");

        Ok(ValidatedConfig { config: *self, fresnel_number, warnings, scan_grid })
    }
}

impl ValidatedConfig {
    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn wavelength(&self) -> f64 {
        self.config.wavelength_mm
    }

    pub fn correlation_a(&self) -> f64 {
        self.config.correlation_a_mm
    }

    pub fn slit_width(&self) -> f64 {
        self.config.slit_width_mm
    }

    pub fn z1(&self) -> f64 {
        self.config.z1_mm
    }

    pub fn z2(&self) -> f64 {
        self.config.z2_mm
    }

    pub fn left_detector_y(&self) -> f64 {
        self.config.left_detector_y_mm
    }

    pub fn scan(&self) -> ScanSpec {
        self.config.scan
    }

    pub fn fresnel_number(&self) -> f64 {
        self.fresnel_number
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn scan_grid(&self) -> &TransverseGrid {
        &self.scan_grid
    }

    /// Copy with a different packet parameter, revalidated. Used by the
    /// beam-width study.
    pub fn with_correlation_a(&self, a_mm: f64) -> Result<ValidatedConfig, ConfigErrors> {
        let mut cfg = self.config;
        cfg.correlation_a_mm = a_mm;
        cfg.validate()
    }

    /// Copy with a different right-arm distance, revalidated.
    pub fn with_z2(&self, z2_mm: f64) -> Result<ValidatedConfig, ConfigErrors> {
        let mut cfg = self.config;
        cfg.z2_mm = z2_mm;
        cfg.validate()
    }

    /// Copy with a different slit width, revalidated.
    pub fn with_slit_width(&self, d_mm: f64) -> Result<ValidatedConfig, ConfigErrors> {
        let mut cfg = self.config;
        cfg.slit_width_mm = d_mm;
        cfg.validate()
    }

    /// Copy with a different fixed left detector position, revalidated.
    pub fn with_left_detector_y(&self, y_mm: f64) -> Result<ValidatedConfig, ConfigErrors> {
        let mut cfg = self.config;
        cfg.left_detector_y_mm = y_mm;
        cfg.validate()
    }

    /// Copy with a different scan window, revalidated.
    pub fn with_scan(&self, scan: ScanSpec) -> Result<ValidatedConfig, ConfigErrors> {
        let mut cfg = self.config;
        cfg.scan = scan;
        cfg.validate()
    }
}

// --- Built-in presets -------------------------------------------------------

/// The two catalogued experimental arrangements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Slit + collection lens on the left, scanned detector on the right.
    /// λ = 0.0007 mm, d = 0.16 mm, z1 = 500 mm, z2 = 1500 mm, beam width 3 mm.
    KimShih,
    /// Both detectors scanned. λ = 0.000702 mm, d = 0.4 mm, z1 = 1000 mm,
    /// z2 = 1650 mm; beam width not catalogued.
    Strekalov,
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown preset {0:?} (expected \"kim-shih\" or \"strekalov\")")]
pub struct UnknownPreset(pub String);

impl Preset {
    pub fn from_name(name: &str) -> Result<Self, UnknownPreset> {
        match name {
            "kim-shih" => Ok(Preset::KimShih),
            "strekalov" => Ok(Preset::Strekalov),
            other => Err(UnknownPreset(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::KimShih => "kim-shih",
            Preset::Strekalov => "strekalov",
        }
    }

    pub fn config(&self) -> ExperimentConfig {
        let scan = ScanSpec::new(-10.0, 10.0, 2001);
        match self {
            Preset::KimShih => ExperimentConfig {
                wavelength_mm: 0.0007,
                correlation_a_mm: 1.0 / 3.0,
                slit_width_mm: 0.16,
                z1_mm: 500.0,
                z2_mm: 1500.0,
                left_detector_y_mm: 0.0,
                scan,
            },
            Preset::Strekalov => ExperimentConfig {
                wavelength_mm: 0.000702,
                correlation_a_mm: 1.0 / 3.0,
                slit_width_mm: 0.4,
                z1_mm: 1000.0,
                z2_mm: 1650.0,
                left_detector_y_mm: 2.0,
                scan,
            },
        }
    }

    /// Caveats attached to the preset itself, independent of validation.
    pub fn notes(&self) -> Vec<Warning> {
        match self {
            Preset::KimShih => Vec::new(),
            Preset::Strekalov => vec![Warning::BeamWidthAssumed],
        }
    }
}

// --- Config file format -----------------------------------------------------
//
// Bracketed sections of key = value pairs:
//
//   [source]    wavelength_mm, correlation_a_mm
//   [geometry]  slit_width_mm, z1_mm, z2_mm
//   [left]      y_fixed_mm
//   [scan]      y_min_mm, y_max_mm, points

#[derive(Serialize, Deserialize)]
struct SourceSection {
    wavelength_mm: f64,
    correlation_a_mm: f64,
}

#[derive(Serialize, Deserialize)]
struct GeometrySection {
    slit_width_mm: f64,
    z1_mm: f64,
    z2_mm: f64,
}

#[derive(Serialize, Deserialize)]
struct LeftSection {
    y_fixed_mm: f64,
}

#[derive(Serialize, Deserialize)]
struct ScanSection {
    y_min_mm: f64,
    y_max_mm: f64,
    points: usize,
}

#[derive(Serialize, Deserialize)]
struct ConfigFile {
    source: SourceSection,
    geometry: GeometrySection,
    left: LeftSection,
    scan: ScanSection,
}

#[derive(Debug, Error)]
pub enum ConfigIoError {
    #[error("config file not found: {0}")]
    FileNotFound(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
}

impl ExperimentConfig {
    /// Render in the config file format. All floats are written with the
    /// shortest representation that reloads bit-for-bit.
    pub fn to_config_string(&self) -> String {
        let file = ConfigFile {
            source: SourceSection {
                wavelength_mm: self.wavelength_mm,
                correlation_a_mm: self.correlation_a_mm,
            },
            geometry: GeometrySection {
                slit_width_mm: self.slit_width_mm,
                z1_mm: self.z1_mm,
                z2_mm: self.z2_mm,
            },
            left: LeftSection { y_fixed_mm: self.left_detector_y_mm },
            scan: ScanSection {
                y_min_mm: self.scan.y_min_mm,
                y_max_mm: self.scan.y_max_mm,
                points: self.scan.points,
            },
        };
        toml::to_string(&file).expect("config sections always serialize")
    }

    pub fn from_config_str(text: &str) -> Result<Self, ConfigIoError> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| ConfigIoError::Parse(e.to_string()))?;
        Ok(ExperimentConfig {
            wavelength_mm: file.source.wavelength_mm,
            correlation_a_mm: file.source.correlation_a_mm,
            slit_width_mm: file.geometry.slit_width_mm,
            z1_mm: file.geometry.z1_mm,
            z2_mm: file.geometry.z2_mm,
            left_detector_y_mm: file.left.y_fixed_mm,
            scan: ScanSpec::new(file.scan.y_min_mm, file.scan.y_max_mm, file.scan.points),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigIoError> {
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ConfigIoError::FileNotFound(path.display().to_string()))
            }
            Err(e) => {
                return Err(ConfigIoError::Io { path: path.display().to_string(), source: e })
            }
        };
        Self::from_config_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kim_shih_preset_validates_without_warning() {
        let v = Preset::KimShih.config().validate().unwrap();
        assert!((v.fresnel_number() - 0.0256 / 0.35).abs() < 1e-12);
        assert!((v.fresnel_number() - 0.0731).abs() < 5e-5);
        assert!(v.warnings().is_empty());
        assert_eq!(v.z2(), 1500.0);
    }

    #[test]
    fn strekalov_preset_carries_beam_width_note_and_fresnel_warning() {
        let preset = Preset::Strekalov;
        assert_eq!(preset.notes(), vec![Warning::BeamWidthAssumed]);
        let v = preset.config().validate().unwrap();
        // d²/(λ·z1) = 0.16/0.702 ≈ 0.228 exceeds the far-field comfort zone.
        assert!(matches!(v.warnings()[0], Warning::FresnelNumberLarge { .. }));
        assert_eq!(v.z2(), 1650.0);
        assert_eq!(v.left_detector_y(), 2.0);
    }

    #[test]
    fn zero_slit_width_is_rejected_by_name() {
        let mut cfg = Preset::KimShih.config();
        cfg.slit_width_mm = 0.0;
        let errs = cfg.validate().unwrap_err();
        assert_eq!(errs.0, vec![ConfigError::NonPositiveLength { field: "slit_width" }]);
    }

    #[test]
    fn two_point_scan_is_degenerate() {
        let mut cfg = Preset::KimShih.config();
        cfg.scan.points = 2;
        let errs = cfg.validate().unwrap_err();
        assert!(matches!(errs.0[0], ConfigError::DegenerateScan { points: 2, .. }));
    }

    #[test]
    fn all_violations_are_collected() {
        let mut cfg = Preset::KimShih.config();
        cfg.wavelength_mm = -1.0;
        cfg.z2_mm = 0.0;
        cfg.scan.y_min_mm = 5.0;
        cfg.scan.y_max_mm = -5.0;
        let errs = cfg.validate().unwrap_err();
        assert_eq!(errs.0.len(), 3);
    }

    #[test]
    fn unknown_preset_is_reported() {
        let err = Preset::from_name("nope").unwrap_err();
        assert_eq!(err, UnknownPreset("nope".to_string()));
    }

    #[test]
    fn config_file_round_trips_presets_bit_for_bit() {
        for preset in [Preset::KimShih, Preset::Strekalov] {
            let cfg = preset.config();
            let text = cfg.to_config_string();
            let back = ExperimentConfig::from_config_str(&text).unwrap();
            assert_eq!(cfg.wavelength_mm.to_bits(), back.wavelength_mm.to_bits());
            assert_eq!(cfg.correlation_a_mm.to_bits(), back.correlation_a_mm.to_bits());
            assert_eq!(cfg.slit_width_mm.to_bits(), back.slit_width_mm.to_bits());
            assert_eq!(cfg.z1_mm.to_bits(), back.z1_mm.to_bits());
            assert_eq!(cfg.z2_mm.to_bits(), back.z2_mm.to_bits());
            assert_eq!(cfg.left_detector_y_mm.to_bits(), back.left_detector_y_mm.to_bits());
            assert_eq!(cfg.scan, back.scan);
        }
    }

    #[test]
    fn missing_key_names_the_key() {
        let cfg = Preset::KimShih.config();
        let text = cfg.to_config_string().replace("slit_width_mm", "slitwidth_mm");
        let err = ExperimentConfig::from_config_str(&text).unwrap_err();
        assert!(err.to_string().contains("slit_width_mm"), "error was: {err}");
    }

    #[test]
    fn config_sections_use_the_documented_keys() {
        let text = Preset::KimShih.config().to_config_string();
        for needle in [
            "[source]",
            "[geometry]",
            "[left]",
            "[scan]",
            "wavelength_mm",
            "correlation_a_mm",
            "slit_width_mm",
            "z1_mm",
            "z2_mm",
            "y_fixed_mm",
            "y_min_mm",
            "y_max_mm",
            "points",
        ] {
            assert!(text.contains(needle), "missing {needle} in:\n{text}");
        }
    }
}
