//! Simulation of biphoton coincidence experiments behind a single slit.
//!
//! A momentum-entangled photon pair from an SPDC source is sent in opposite
//! directions; the left photon passes a slit of width `d`. This crate computes
//! the joint and marginal probability densities of the pair in momentum and
//! position space, the coincidence counting rate seen when every transmitted
//! left photon is collected into one detector (the Kim–Shih arrangement), and
//! the scanned coincidence patterns seen when both detectors move (the
//! Strekalov arrangement).
//!
//! Every closed form in [`analytic`] has an independent brute-force
//! counterpart in [`oracle`] built on adaptive Simpson quadrature and
//! Riemann-sum Fourier transforms; the two are held to agree to 1e-6.
//!
//! Units: lengths in mm, transverse momenta in rad/mm, ħ = 1. Momentum
//! uncertainties are therefore reported in ħ·mm⁻¹.

pub mod analytic;
pub mod config;
pub mod distribution;
pub mod experiments;
pub mod grid;
pub mod oracle;

pub use config::{
    ConfigError, ConfigErrors, ExperimentConfig, Preset, ScanSpec, ValidatedConfig, Warning,
};
pub use distribution::{DensityDomain, Distribution1D, JointDensity2D};
pub use experiments::{
    RateMode, ScanResult, Scenario, UncertaintyReport,
};
pub use grid::{CoordinateKind, TransverseGrid};
pub use oracle::{MarginalAxis, QuadratureSpec, RateCalibration};
