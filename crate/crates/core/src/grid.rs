//! Uniform 1D sample grids over a transverse coordinate.

use thiserror::Error;

/// Which physical coordinate a grid discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateKind {
    /// Transverse detector position, mm.
    PositionMm,
    /// Transverse momentum, rad/mm (ħ = 1).
    MomentumRadPerMm,
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid range is degenerate: lo={lo}, hi={hi}")]
    DegenerateRange { lo: f64, hi: f64 },
    #[error("grid bounds must be finite")]
    NonFinite,
}

/// Strictly increasing, uniformly spaced samples of one transverse coordinate.
///
/// Spacing uniformity is guaranteed at construction to within 1e-12 relative
/// to the coordinate magnitude (the achievable bound for an f64 linspace).
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseGrid {
    kind: CoordinateKind,
    samples: Vec<f64>,
    spacing: f64,
}

impl TransverseGrid {
    pub fn uniform(
        kind: CoordinateKind,
        lo: f64,
        hi: f64,
        points: usize,
    ) -> Result<Self, GridError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(GridError::NonFinite);
        }
        if points < 2 {
            return Err(GridError::TooFewPoints(points));
        }
        if lo >= hi {
            return Err(GridError::DegenerateRange { lo, hi });
        }
        let spacing = (hi - lo) / (points - 1) as f64;
        let samples: Vec<f64> = (0..points)
            .map(|i| {
                if i == points - 1 {
                    hi
                } else {
                    lo + i as f64 * spacing
                }
            })
            .collect();
        Ok(Self { kind, samples, spacing })
    }

    /// Symmetric grid over [-half_width, half_width].
    pub fn symmetric(kind: CoordinateKind, half_width: f64, points: usize) -> Result<Self, GridError> {
        Self::uniform(kind, -half_width, half_width, points)
    }

    pub fn kind(&self) -> CoordinateKind {
        self.kind
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.samples[0]
    }

    pub fn last(&self) -> f64 {
        *self.samples.last().unwrap()
    }

    /// Verify the strictly-increasing uniform-spacing invariant.
    pub fn check_uniform(&self) -> bool {
        let scale = self
            .first()
            .abs()
            .max(self.last().abs())
            .max(self.spacing.abs());
        let tol = 1e-12 * scale;
        self.samples.windows(2).all(|w| {
            let d = w[1] - w[0];
            d > 0.0 && (d - self.spacing).abs() <= tol
        })
    }

    /// Trapezoid weights: spacing/2 at the ends, spacing inside.
    pub fn trapezoid_weight(&self, index: usize) -> f64 {
        if index == 0 || index == self.samples.len() - 1 {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }
}
