//! Sampled density containers and the width/peak metrics computed from them.

use thiserror::Error;

use crate::grid::{CoordinateKind, TransverseGrid};

#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    #[error("value count {values} does not match grid length {grid}")]
    LengthMismatch { values: usize, grid: usize },
    #[error("densities must be finite and non-negative (value {value} at index {index})")]
    InvalidValue { index: usize, value: f64 },
    #[error("cannot normalize: integral over the window is {integral}")]
    ZeroMass { integral: f64 },
    #[error("operation requires a normalized distribution")]
    NotNormalized,
    #[error("grid coordinate kind does not match the declared domain")]
    DomainMismatch,
}

/// A sampled non-negative density over one transverse grid.
///
/// `normalized` records whether the trapezoid integral over the grid equals
/// one; `scale` keeps the constant that was divided out, so raw magnitudes
/// stay recoverable after normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution1D {
    grid: TransverseGrid,
    values: Vec<f64>,
    normalized: bool,
    scale: f64,
}

impl Distribution1D {
    pub fn from_samples(grid: TransverseGrid, values: Vec<f64>) -> Result<Self, DistributionError> {
        if values.len() != grid.len() {
            return Err(DistributionError::LengthMismatch {
                values: values.len(),
                grid: grid.len(),
            });
        }
        if let Some((index, &value)) =
            values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(DistributionError::InvalidValue { index, value });
        }
        Ok(Self { grid, values, normalized: false, scale: 1.0 })
    }

    /// Sample a closed-form density over a grid.
    pub fn sample(
        grid: TransverseGrid,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, DistributionError> {
        let values: Vec<f64> = grid.samples().iter().map(|&x| f(x)).collect();
        Self::from_samples(grid, values)
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// The constant divided out at normalization (1.0 for a raw sample).
    pub fn normalization_scale(&self) -> f64 {
        self.scale
    }

    pub fn trapezoid_integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.trapezoid_weight(i) * v)
            .sum()
    }

    /// Divide by the window integral so the trapezoid integral becomes one.
    pub fn normalize(mut self) -> Result<Self, DistributionError> {
        let integral = self.trapezoid_integral();
        if !(integral > 0.0) || !integral.is_finite() {
            return Err(DistributionError::ZeroMass { integral });
        }
        for v in &mut self.values {
            *v /= integral;
        }
        self.scale *= integral;
        self.normalized = true;
        Ok(self)
    }

    /// Container invariants: non-negative values; if flagged normalized, the
    /// integral equals 1 within 1e-9 relative.
    pub fn check_invariants(&self) -> Result<(), DistributionError> {
        if let Some((index, &value)) =
            self.values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(DistributionError::InvalidValue { index, value });
        }
        if self.normalized {
            let integral = self.trapezoid_integral();
            if (integral - 1.0).abs() > 1e-9 {
                return Err(DistributionError::ZeroMass { integral });
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        let mass = self.trapezoid_integral();
        let first: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.trapezoid_weight(i) * self.grid.samples()[i] * v)
            .sum();
        first / mass
    }

    pub fn variance(&self) -> f64 {
        let mass = self.trapezoid_integral();
        let mean = self.mean();
        let second: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let d = self.grid.samples()[i] - mean;
                self.grid.trapezoid_weight(i) * d * d * v
            })
            .sum();
        second / mass
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Peak location refined by a parabola through the three highest samples,
    /// plus the refined peak value.
    pub fn peak(&self) -> Peak {
        let (i_max, _) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty by construction");
        let xs = self.grid.samples();
        if i_max == 0 || i_max == self.values.len() - 1 {
            return Peak { location: xs[i_max], value: self.values[i_max], index: i_max };
        }
        let (vm, v0, vp) = (self.values[i_max - 1], self.values[i_max], self.values[i_max + 1]);
        let denom = vm - 2.0 * v0 + vp;
        if denom.abs() < 1e-300 * v0.abs().max(1.0) {
            return Peak { location: xs[i_max], value: v0, index: i_max };
        }
        let delta = 0.5 * (vm - vp) / denom;
        let delta = delta.clamp(-0.5, 0.5);
        Peak {
            location: xs[i_max] + delta * self.grid.spacing(),
            value: v0 - 0.25 * (vm - vp) * delta,
            index: i_max,
        }
    }

    /// Full width at half maximum with the crossings located by linear
    /// interpolation between bracketing grid points. `None` when either
    /// crossing falls outside the window.
    pub fn fwhm(&self) -> Option<f64> {
        let peak = self.peak();
        let half = 0.5 * peak.value;
        let xs = self.grid.samples();
        let vs = &self.values;
        let i = peak.index;

        let mut left = None;
        for j in (0..i).rev() {
            if vs[j] < half {
                let t = (half - vs[j]) / (vs[j + 1] - vs[j]);
                left = Some(xs[j] + t * (xs[j + 1] - xs[j]));
                break;
            }
        }
        let mut right = None;
        for j in i + 1..vs.len() {
            if vs[j] < half {
                let t = (half - vs[j - 1]) / (vs[j] - vs[j - 1]);
                right = Some(xs[j - 1] + t * (xs[j] - xs[j - 1]));
                break;
            }
        }
        match (left, right) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        }
    }
}

/// Refined peak of a sampled distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub location: f64,
    pub value: f64,
    pub index: usize,
}

/// Which space a joint density lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityDomain {
    Momentum,
    Position,
}

impl DensityDomain {
    fn coordinate_kind(&self) -> CoordinateKind {
        match self {
            DensityDomain::Momentum => CoordinateKind::MomentumRadPerMm,
            DensityDomain::Position => CoordinateKind::PositionMm,
        }
    }
}

/// A sampled joint density over a (left, right) grid pair, stored left-major:
/// `value(i, j)` is left index `i`, right index `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity2D {
    left_grid: TransverseGrid,
    right_grid: TransverseGrid,
    values: Vec<f64>,
    domain: DensityDomain,
}

impl JointDensity2D {
    pub fn sample(
        left_grid: TransverseGrid,
        right_grid: TransverseGrid,
        domain: DensityDomain,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, DistributionError> {
        if left_grid.kind() != domain.coordinate_kind()
            || right_grid.kind() != domain.coordinate_kind()
        {
            return Err(DistributionError::DomainMismatch);
        }
        let mut values = Vec::with_capacity(left_grid.len() * right_grid.len());
        for &l in left_grid.samples() {
            for &r in right_grid.samples() {
                let v = f(l, r);
                if !v.is_finite() || v < 0.0 {
                    return Err(DistributionError::InvalidValue { index: values.len(), value: v });
                }
                values.push(v);
            }
        }
        Ok(Self { left_grid, right_grid, values, domain })
    }

    pub fn left_grid(&self) -> &TransverseGrid {
        &self.left_grid
    }

    pub fn right_grid(&self) -> &TransverseGrid {
        &self.right_grid
    }

    pub fn domain(&self) -> DensityDomain {
        self.domain
    }

    pub fn value(&self, left_index: usize, right_index: usize) -> f64 {
        self.values[left_index * self.right_grid.len() + right_index]
    }

    pub fn peak_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, &v| m.max(v))
    }
}
