//! Brute-force numerical counterparts for every closed form: adaptive
//! composite Simpson quadrature, Riemann-sum Fourier transforms, sampled-grid
//! marginals, and the counting-rate calibration.
//!
//! Complex values in the Fourier integrals are carried as explicit
//! (real, imaginary) pairs; no transform library is involved, so each result
//! is auditable down to the quadrature rule.

use std::cell::Cell;
use std::f64::consts::PI;

use thiserror::Error;

use crate::analytic::{
    biphoton_position_amplitude, box_transmission, joint_position_density, GaussianPrefactor,
    RateArgConstant, RateClosedForm, RateExponentSign, SincSquaredParams,
};
use crate::config::ValidatedConfig;
use crate::distribution::{DensityDomain, Distribution1D, DistributionError, JointDensity2D};
use crate::grid::TransverseGrid;

/// Controls for the adaptive quadrature engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target relative error of each integral.
    pub relative_tolerance: f64,
    /// Maximum recursive interval halvings per seed segment.
    pub max_subdivisions: u32,
    /// Infinite domains are truncated where the integrand's Gaussian envelope
    /// falls below exp(-truncation_sigma²/2).
    pub truncation_sigma: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { relative_tolerance: 1e-8, max_subdivisions: 30, truncation_sigma: 10.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.relative_tolerance > 0.0) {
            return Err(OracleError::InvalidSpec("relative_tolerance must be positive"));
        }
        if self.max_subdivisions < 4 {
            return Err(OracleError::InvalidSpec("max_subdivisions must be at least 4"));
        }
        if !(self.truncation_sigma > 0.0) {
            return Err(OracleError::InvalidSpec("truncation_sigma must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("quadrature did not converge (best estimate {best_estimate}, error ~{error_estimate})")]
    NoConvergence { best_estimate: f64, error_estimate: f64 },
    #[error("joint grid window too narrow: boundary holds {boundary_ratio:.3e} of the peak (limit 1e-10)")]
    TruncationTooTight { boundary_ratio: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
    #[error("no closed-form constant matches quadrature (half-turn dev {half_turn_dev:.3e}, convolution dev {convolution_dev:.3e})")]
    CalibrationFailed { half_turn_dev: f64, convolution_dev: f64 },
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

// --- adaptive Simpson ---------------------------------------------------------

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width * (fa + 4.0 * fm + fb) / 6.0
}

struct Adaptive<'a, F> {
    f: &'a F,
    unresolved: f64,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth_left: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * eps || depth_left == 0 {
            if depth_left == 0 && delta.abs() > 15.0 * eps {
                self.unresolved += delta.abs() / 15.0;
            }
            // Richardson extrapolation of the two Simpson levels.
            left + right + delta / 15.0
        } else {
            self.refine(a, fa, lm, flm, m, fm, left, 0.5 * eps, depth_left - 1)
                + self.refine(m, fm, rm, frm, b, fb, right, 0.5 * eps, depth_left - 1)
        }
    }
}

/// Adaptive composite Simpson integral of `f` over `[lo, hi]` seeded with
/// `segments` equal panels. The convergence target is
/// `relative_tolerance · |I|`, floored at the f64 rounding noise of the
/// absolute-value integral so oscillatory cancellation cannot demand more
/// precision than the arithmetic carries.
pub fn integrate_adaptive_segmented(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    segments: usize,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    integrate_with_floor(f, lo, hi, segments, spec, 0.0)
}

/// [`integrate_adaptive_segmented`] with an extra absolute error floor, for
/// integrands whose values already carry noise (nested quadratures): asking
/// for accuracy below the caller-known noise would never terminate.
fn integrate_with_floor(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    segments: usize,
    spec: &QuadratureSpec,
    caller_noise_floor: f64,
) -> Result<f64, OracleError> {
    spec.validate()?;
    if !(hi > lo) {
        return Err(OracleError::InvalidSpec("integration bounds must satisfy lo < hi"));
    }
    let segments = segments.max(1);
    let width = (hi - lo) / segments as f64;

    // Seed pass: Simpson estimate and |f| mass per panel.
    let mut nodes = Vec::with_capacity(segments);
    let mut coarse_total = 0.0;
    let mut abs_total = 0.0;
    let mut f_lo = f(lo);
    for k in 0..segments {
        let a = lo + k as f64 * width;
        let b = if k + 1 == segments { hi } else { lo + (k + 1) as f64 * width };
        let m = 0.5 * (a + b);
        let fm = f(m);
        let fb = f(b);
        let whole = simpson(f_lo, fm, fb, b - a);
        coarse_total += whole;
        abs_total += simpson(f_lo.abs(), fm.abs(), fb.abs(), b - a);
        nodes.push((a, f_lo, m, fm, b, fb, whole));
        f_lo = fb;
    }

    let noise_floor = (64.0 * f64::EPSILON * abs_total.abs()).max(caller_noise_floor);
    let target = (spec.relative_tolerance * coarse_total.abs()).max(noise_floor);
    let target = if target > 0.0 { target } else { spec.relative_tolerance };

    let mut engine = Adaptive { f: &f, unresolved: 0.0 };
    let mut total = 0.0;
    for (a, fa, m, fm, b, fb, whole) in nodes {
        let eps = target * ((b - a) / (hi - lo));
        total += engine.refine(a, fa, m, fm, b, fb, whole, eps, spec.max_subdivisions);
    }

    if engine.unresolved > target {
        return Err(OracleError::NoConvergence {
            best_estimate: total,
            error_estimate: engine.unresolved,
        });
    }
    Ok(total)
}

/// Adaptive Simpson with a default 16-panel seed.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    integrate_adaptive_segmented(f, lo, hi, 16, spec)
}

/// Reference value of the full-line integral of sin²(Ax)/x²: quadrature over
/// a finite core plus the asymptotic tail
/// 1/(2U) + sin(2AU)/(4AU²) - cos(2AU)/(4A²U³) on each side. The exact value
/// is πA; the residual after the correction is O(1/(A³U⁴)).
pub fn sinc_squared_integral(
    arg_scale: f64,
    core_half_width: f64,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    let a = arg_scale;
    let u = core_half_width;
    let shape = SincSquaredParams::new(1.0, a);
    let lobes = (2.0 * u * a / PI).ceil() as usize + 4;
    let core = integrate_adaptive_segmented(|x| shape.eval(x), -u, u, lobes, spec)?;
    let tail = 0.5 / u + (2.0 * a * u).sin() / (4.0 * a * u * u)
        - (2.0 * a * u).cos() / (4.0 * a * a * u * u * u);
    Ok(core + 2.0 * tail)
}

// --- Fourier-integral oracles ---------------------------------------------------

#[derive(Clone, Copy)]
enum Phase {
    Cos,
    Sin,
}

impl Phase {
    fn eval(self, x: f64) -> f64 {
        match self {
            Phase::Cos => x.cos(),
            Phase::Sin => x.sin(),
        }
    }
}

/// Direct double Fourier transform of the aperture-masked pair amplitude:
///
///   ∫_{-d/2}^{d/2} dy_L ∫ dy_R  Ψ(y_L, y_R) · e^{i (y_L p_L + y_R p_R)}
///
/// with the inner integral truncated where the Gaussian envelope of Ψ falls
/// below exp(-truncation_sigma²/2). Returns the modulus of the complex result
/// signed by its real part, which is the phase convention that makes it
/// comparable to the real closed form.
pub fn numeric_post_slit_amplitude(
    p_r: f64,
    p_l: f64,
    cfg: &ValidatedConfig,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    spec.validate()?;
    let a = cfg.correlation_a();
    let d = cfg.slit_width();
    let inner_half_width = 2.0_f64.sqrt() * a * spec.truncation_sigma;

    // The comparison scale of the whole transform is the Gaussian mass
    // ∫Ψ dy_R = 2a√π: resolving any single inner integral below
    // rel_tol × that mass adds nothing to the final accuracy but costs deep
    // refinement wherever the oscillation has cancelled the local value away.
    let gaussian_mass = 2.0 * a * PI.sqrt();
    let inner_floor = 0.25 * spec.relative_tolerance * gaussian_mass;

    let inner_failure: Cell<Option<OracleError>> = Cell::new(None);
    let inner = |y_l: f64, phase: Phase| -> f64 {
        let lo = y_l - inner_half_width;
        let hi = y_l + inner_half_width;
        let segments = (2.0 * inner_half_width * p_r.abs() / PI).ceil() as usize + 8;
        let result = integrate_with_floor(
            |y_r| {
                biphoton_position_amplitude(y_r, y_l, a) * phase.eval(y_l * p_l + y_r * p_r)
            },
            lo,
            hi,
            segments,
            spec,
            inner_floor,
        );
        match result {
            Ok(v) => v,
            Err(OracleError::NoConvergence { best_estimate, error_estimate }) => {
                inner_failure.set(Some(OracleError::NoConvergence {
                    best_estimate,
                    error_estimate,
                }));
                best_estimate
            }
            Err(e) => {
                inner_failure.set(Some(e));
                0.0
            }
        }
    };

    let outer_segments = (d * (p_l.abs() + p_r.abs()) / PI).ceil() as usize + 8;
    // Inner values arrive with errors up to inner_floor; the outer cannot
    // resolve below that error times its own width.
    let outer = |phase: Phase| -> Result<f64, OracleError> {
        integrate_with_floor(
            |y_l| box_transmission(y_l, d) * inner(y_l, phase),
            -0.5 * d,
            0.5 * d,
            outer_segments,
            spec,
            inner_floor * d,
        )
    };

    let re = outer(Phase::Cos)?;
    let im = outer(Phase::Sin)?;
    if let Some(err) = inner_failure.take() {
        return Err(err);
    }
    Ok(re.signum() * re.hypot(im))
}

/// Fourier transform of the source momentum Gaussian back to position space:
/// ∫ e^{-p² a²} cos(p (y_L - y_R)) dp, the numeric counterpart of the
/// position-space pair amplitude (up to the constant √π/a).
pub fn numeric_position_amplitude(
    y_r: f64,
    y_l: f64,
    cfg: &ValidatedConfig,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    spec.validate()?;
    let a = cfg.correlation_a();
    let p_max = spec.truncation_sigma / (2.0_f64.sqrt() * a);
    let delta = y_l - y_r;
    let segments = (2.0 * p_max * delta.abs() / PI).ceil() as usize + 8;
    integrate_adaptive_segmented(
        |p| (-p * p * a * a).exp() * (p * delta).cos(),
        -p_max,
        p_max,
        segments,
        spec,
    )
}

// --- sampled-grid marginals -----------------------------------------------------

/// Which coordinate of a joint density is integrated out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    /// Integrate over the left coordinate; the marginal lives on the right grid.
    Left,
    /// Integrate over the right coordinate; the marginal lives on the left grid.
    Right,
}

/// Trapezoid marginal of a sampled joint density over one axis, normalized
/// over the remaining grid.
///
/// Requires the window along the integrated axis to be wide enough that its
/// boundary samples hold less than 1e-10 of the joint's peak; otherwise the
/// truncation is too tight for the result to be trusted.
pub fn numeric_marginal(
    joint: &JointDensity2D,
    axis: MarginalAxis,
    spec: &QuadratureSpec,
) -> Result<Distribution1D, OracleError> {
    spec.validate()?;
    let peak = joint.peak_value();
    if !(peak > 0.0) {
        return Err(DistributionError::ZeroMass { integral: 0.0 }.into());
    }
    let (nl, nr) = (joint.left_grid().len(), joint.right_grid().len());

    let boundary_ratio = match axis {
        MarginalAxis::Left => (0..nr)
            .flat_map(|j| [joint.value(0, j), joint.value(nl - 1, j)])
            .fold(0.0_f64, f64::max),
        MarginalAxis::Right => (0..nl)
            .flat_map(|i| [joint.value(i, 0), joint.value(i, nr - 1)])
            .fold(0.0_f64, f64::max),
    } / peak;
    if boundary_ratio > 1e-10 {
        return Err(OracleError::TruncationTooTight { boundary_ratio });
    }

    let (out_grid, values): (TransverseGrid, Vec<f64>) = match axis {
        MarginalAxis::Left => {
            let g = joint.left_grid();
            let values = (0..nr)
                .map(|j| (0..nl).map(|i| g.trapezoid_weight(i) * joint.value(i, j)).sum())
                .collect();
            (joint.right_grid().clone(), values)
        }
        MarginalAxis::Right => {
            let g = joint.right_grid();
            let values = (0..nl)
                .map(|i| (0..nr).map(|j| g.trapezoid_weight(j) * joint.value(i, j)).sum())
                .collect();
            (joint.left_grid().clone(), values)
        }
    };

    let dist = Distribution1D::from_samples(out_grid, values)?;
    Ok(dist.normalize()?)
}

/// Grid half-width along one momentum axis such that the slit factor
/// 1/s² has decayed to 1e-10 of the joint peak d²/4, i.e. 2e5/d.
pub fn marginal_momentum_window(d_mm: f64) -> f64 {
    2.0e5 / d_mm
}

/// Sample the joint momentum density on grids suited to marginalizing over
/// the left momentum: the left window satisfies the 1e-10 boundary rule, the
/// spacing stays well inside the band limit 2π/d of the slit factor.
pub fn sample_momentum_joint_for_left_marginal(
    cfg: &ValidatedConfig,
    right_grid: TransverseGrid,
) -> Result<JointDensity2D, DistributionError> {
    sample_momentum_joint_for_left_marginal_scaled(cfg, right_grid, 1.0)
}

/// [`sample_momentum_joint_for_left_marginal`] with the left window widened
/// by `window_factor`, used to demonstrate truncation safety.
pub fn sample_momentum_joint_for_left_marginal_scaled(
    cfg: &ValidatedConfig,
    right_grid: TransverseGrid,
    window_factor: f64,
) -> Result<JointDensity2D, DistributionError> {
    let d = cfg.slit_width();
    let a = cfg.correlation_a();
    let half_width = window_factor * marginal_momentum_window(d);
    let spacing_limit = 2.0 * PI / d / 2.1;
    let points = (2.0 * half_width / spacing_limit).ceil() as usize + 1;
    let left_grid = TransverseGrid::symmetric(
        crate::grid::CoordinateKind::MomentumRadPerMm,
        half_width,
        points,
    )
    .expect("window parameters are positive");
    JointDensity2D::sample(left_grid, right_grid, DensityDomain::Momentum, |p_l, p_r| {
        crate::analytic::joint_momentum_density(p_r, p_l, a, d)
    })
}

// --- Kim–Shih counting rate oracle ------------------------------------------------

/// Coincidence counting rate by direct quadrature:
/// R(y_R) = ∫ W(y_L) Φ(y_R, y_L) dy_L with the single-slit collection weight
/// W(y_L) = sin²((πd/λ)(y_L/z1))/(y_L/z1)².
///
/// Both factors decay like 1/y_L², so the window is cut where the product
/// envelope falls below 1e-12 of its peak; the half-lobe seeding keeps the
/// oscillatory integrand resolved everywhere.
pub fn kim_shih_rate_numeric(
    y_r: f64,
    cfg: &ValidatedConfig,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    kim_shih_rate_numeric_windowed(y_r, cfg, spec, 1.0)
}

/// [`kim_shih_rate_numeric`] with the integration window widened by
/// `window_factor`, used to demonstrate truncation safety.
pub fn kim_shih_rate_numeric_windowed(
    y_r: f64,
    cfg: &ValidatedConfig,
    spec: &QuadratureSpec,
    window_factor: f64,
) -> Result<f64, OracleError> {
    spec.validate()?;
    let arg_scale = PI * cfg.slit_width() / cfg.wavelength();
    let weight = SincSquaredParams::collection_weight(cfg);
    let u = y_r / cfg.z2();
    // product envelope 1/(A v)⁴ = 1e-12 at v = 1000/A, v = y_L/z1
    let half_window =
        cfg.z1() * (window_factor * 1000.0 / arg_scale + u.abs() + 2.0 * PI / arg_scale);
    let half_lobe = 0.5 * PI * cfg.z1() / arg_scale;
    let segments = (2.0 * half_window / half_lobe).ceil() as usize + 2;
    integrate_adaptive_segmented(
        |y_l| weight.eval(y_l) * joint_position_density(y_r, y_l, cfg, GaussianPrefactor::Retain),
        -half_window,
        half_window,
        segments,
        spec,
    )
}

/// Outcome of matching the counting-rate closed form against quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCalibration {
    /// The argument constant that reproduced the quadrature.
    pub chosen: RateArgConstant,
    /// Max pointwise relative deviation of the c = 2πd/(λz2) form.
    pub convolution_dev: f64,
    /// Max pointwise relative deviation of the c = πd/(λz2) form.
    pub half_turn_dev: f64,
    /// Number of sample points compared.
    pub points: usize,
}

/// Decide the argument constant of the counting-rate closed form by comparing
/// both candidates against [`kim_shih_rate_numeric`] on 20 points over
/// y_R ∈ [0, 1.5] mm, normalized at the origin; a candidate matches when its
/// max relative deviation is below `tolerance`.
pub fn calibrate_rate_constant(
    cfg: &ValidatedConfig,
    spec: &QuadratureSpec,
    tolerance: f64,
) -> Result<RateCalibration, OracleError> {
    const POINTS: usize = 20;
    let ys: Vec<f64> = (0..POINTS).map(|i| 1.5 * i as f64 / (POINTS - 1) as f64).collect();

    let numeric: Vec<f64> =
        ys.iter().map(|&y| kim_shih_rate_numeric(y, cfg, spec)).collect::<Result<_, _>>()?;
    let n0 = numeric[0];

    let deviation = |constant: RateArgConstant| -> f64 {
        let form = RateClosedForm { arg_constant: constant, exponent_sign: RateExponentSign::Decaying };
        let c0 = form.eval(0.0, cfg);
        ys.iter()
            .zip(&numeric)
            .map(|(&y, &num)| {
                let closed = form.eval(y, cfg) / c0;
                let reference = num / n0;
                if reference == 0.0 {
                    // Envelope underflow: both routes must agree on zero.
                    if closed == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    ((closed - reference) / reference).abs()
                }
            })
            .fold(0.0, f64::max)
    };

    let convolution_dev = deviation(RateArgConstant::ConvolutionDerived);
    let half_turn_dev = deviation(RateArgConstant::HalfTurn);

    let chosen = match (convolution_dev <= tolerance, half_turn_dev <= tolerance) {
        (true, false) => RateArgConstant::ConvolutionDerived,
        (false, true) => RateArgConstant::HalfTurn,
        (true, true) => {
            if convolution_dev <= half_turn_dev {
                RateArgConstant::ConvolutionDerived
            } else {
                RateArgConstant::HalfTurn
            }
        }
        (false, false) => {
            return Err(OracleError::CalibrationFailed { half_turn_dev, convolution_dev })
        }
    };
    Ok(RateCalibration { chosen, convolution_dev, half_turn_dev, points: POINTS })
}
