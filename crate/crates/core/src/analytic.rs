//! Closed-form wavefunctions, densities, and counting rates.
//!
//! Everything here is an unnormalized pure function; normalization over a
//! scan window is an explicit later step. Sinc-type singularities are handled
//! by short Taylor series so every form is finite and smooth through zero
//! argument. The independent quadrature counterparts live in [`crate::oracle`].

use std::f64::consts::PI;

use crate::config::ValidatedConfig;

/// Below this sum-momentum magnitude (rad/mm) the sinc forms switch to their
/// series expansion.
pub const MOMENTUM_SERIES_THRESHOLD: f64 = 1e-6;

/// Below this detector offset (mm) the counting-rate closed form switches to
/// its series expansion.
pub const POSITION_SERIES_THRESHOLD: f64 = 1e-4;

/// Slit aperture: 1 inside |y| <= d/2 (closed interval at the edges), else 0.
pub fn box_transmission(y_mm: f64, slit_width_mm: f64) -> f64 {
    debug_assert!(slit_width_mm > 0.0);
    if y_mm.abs() <= 0.5 * slit_width_mm {
        1.0
    } else {
        0.0
    }
}

/// Position-space pair amplitude exp(-(y_L - y_R)² / (4a²)), the Fourier
/// transform of the source momentum Gaussian. Symmetric under swapping the
/// two coordinates.
pub fn biphoton_position_amplitude(y_r_mm: f64, y_l_mm: f64, a_mm: f64) -> f64 {
    debug_assert!(a_mm > 0.0);
    let diff = y_l_mm - y_r_mm;
    (-diff * diff / (4.0 * a_mm * a_mm)).exp()
}

/// Joint momentum amplitude after the slit:
/// exp(-p_R² a²) · sin((d/2)(p_L + p_R)) / (p_L + p_R).
///
/// For |p_L + p_R| below [`MOMENTUM_SERIES_THRESHOLD`] the sinc factor uses
/// the series d/2 - d³x²/48.
pub fn post_slit_momentum_amplitude(p_r: f64, p_l: f64, a_mm: f64, d_mm: f64) -> f64 {
    debug_assert!(a_mm > 0.0 && d_mm > 0.0);
    let sum = p_l + p_r;
    let sinc = if sum.abs() < MOMENTUM_SERIES_THRESHOLD {
        0.5 * d_mm - d_mm * d_mm * d_mm * sum * sum / 48.0
    } else {
        (0.5 * d_mm * sum).sin() / sum
    };
    (-p_r * p_r * a_mm * a_mm).exp() * sinc
}

/// Joint momentum density, exactly the squared amplitude:
/// exp(-2 p_R² a²) · sin²((d/2)(p_L + p_R)) / (p_L + p_R)².
pub fn joint_momentum_density(p_r: f64, p_l: f64, a_mm: f64, d_mm: f64) -> f64 {
    let amp = post_slit_momentum_amplitude(p_r, p_l, a_mm, d_mm);
    amp * amp
}

/// Left-side marginal: the single-slit diffraction pattern
/// sin²((d/2) p_L) / p_L².
pub fn marginal_left_density(p_l: f64, d_mm: f64) -> f64 {
    debug_assert!(d_mm > 0.0);
    let amp = if p_l.abs() < MOMENTUM_SERIES_THRESHOLD {
        0.5 * d_mm - d_mm * d_mm * d_mm * p_l * p_l / 48.0
    } else {
        (0.5 * d_mm * p_l).sin() / p_l
    };
    amp * amp
}

/// Right-side marginal: only the source Gaussian exp(-2 p_R² a²) remains.
pub fn marginal_right_density(p_r: f64, a_mm: f64) -> f64 {
    debug_assert!(a_mm > 0.0);
    (-2.0 * p_r * p_r * a_mm * a_mm).exp()
}

/// Transverse momentum inferred for a detection at position `y` a distance
/// `z` from the slit plane: p = 2π y / (λ z). Both arms reference the real
/// slit, so the sum momentum maps to (πd/λ)(y_L/z1 + y_R/z2) under the slit
/// phase (d/2)(p_L + p_R).
pub fn inferred_momentum(y_mm: f64, z_mm: f64, wavelength_mm: f64) -> f64 {
    debug_assert!(z_mm > 0.0 && wavelength_mm > 0.0);
    2.0 * PI * y_mm / (wavelength_mm * z_mm)
}

/// Whether the position-space joint density keeps its Gaussian envelope.
///
/// The envelope exp(-8π² y_R² a² / (λ² z2²)) is the source momentum Gaussian
/// expressed at the right detector plane. Dropping it reproduces the common
/// approximate form in which both coincidence curves are pure single-slit
/// patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianPrefactor {
    Retain,
    Drop,
}

/// Joint position-space density at the detector planes:
/// exp(-8π² y_R² a²/(λ² z2²)) · sin²((πd/λ)(y_L/z1 + y_R/z2)) / (y_L/z1 + y_R/z2)².
pub fn joint_position_density(
    y_r_mm: f64,
    y_l_mm: f64,
    cfg: &ValidatedConfig,
    prefactor: GaussianPrefactor,
) -> f64 {
    let arg_scale = PI * cfg.slit_width() / cfg.wavelength();
    let u = y_l_mm / cfg.z1() + y_r_mm / cfg.z2();
    let amp = arg_scale * sinc(arg_scale * u);
    let envelope = match prefactor {
        GaussianPrefactor::Retain => {
            let w = 2.0 * PI * cfg.correlation_a() / (cfg.wavelength() * cfg.z2());
            (-2.0 * w * w * y_r_mm * y_r_mm).exp()
        }
        GaussianPrefactor::Drop => 1.0,
    };
    envelope * amp * amp
}

/// Single-slit diffraction pattern at distance `z`: the left marginal
/// composed with the inferred momentum, peaking at d²/4 with its first zero
/// at y = λz/d.
pub fn single_slit_density(y_mm: f64, z_mm: f64, d_mm: f64, wavelength_mm: f64) -> f64 {
    marginal_left_density(inferred_momentum(y_mm, z_mm, wavelength_mm), d_mm)
}

/// Parameter bundle for sin²(kx)/x² shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincSquaredParams {
    pub amplitude_scale: f64,
    pub argument_scale: f64,
}

impl SincSquaredParams {
    pub fn new(amplitude_scale: f64, argument_scale: f64) -> Self {
        debug_assert!(argument_scale > 0.0);
        Self { amplitude_scale, argument_scale }
    }

    /// The single-slit weighting profile over left detector positions when
    /// every transmitted photon is collected:
    /// sin²((πd/λ)(y_L/z1)) / (y_L/z1)².
    pub fn collection_weight(cfg: &ValidatedConfig) -> Self {
        let arg = PI * cfg.slit_width() / (cfg.wavelength() * cfg.z1());
        Self::new(cfg.z1() * cfg.z1(), arg)
    }

    /// amplitude_scale · sin²(argument_scale · x) / x².
    pub fn eval(&self, x: f64) -> f64 {
        let s = self.argument_scale * sinc(self.argument_scale * x);
        self.amplitude_scale * s * s
    }
}

// --- Kim–Shih counting rate --------------------------------------------------

/// Candidate argument constants for the counting-rate closed form
/// R(y_R) ∝ exp(·) (t - sin t)/y_R³ with t = c·y_R. Which one is correct is
/// decided by quadrature, never assumed; see
/// [`crate::oracle::calibrate_rate_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateArgConstant {
    /// c = πd/(λ z2).
    HalfTurn,
    /// c = 2πd/(λ z2), the convolution of two single-slit profiles.
    ConvolutionDerived,
}

impl RateArgConstant {
    pub fn value(&self, cfg: &ValidatedConfig) -> f64 {
        let base = PI * cfg.slit_width() / (cfg.wavelength() * cfg.z2());
        match self {
            RateArgConstant::HalfTurn => base,
            RateArgConstant::ConvolutionDerived => 2.0 * base,
        }
    }

    pub fn describe(&self, cfg: &ValidatedConfig) -> String {
        match self {
            RateArgConstant::HalfTurn => {
                format!("pi*d/(lambda*z2) = {:.9}", self.value(cfg))
            }
            RateArgConstant::ConvolutionDerived => {
                format!("2*pi*d/(lambda*z2) = {:.9}", self.value(cfg))
            }
        }
    }
}

/// Sign of the Gaussian exponent in the counting-rate closed form. The
/// physical envelope decays; the growing variant exists only so the
/// verification suite can prove the calibration rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateExponentSign {
    Decaying,
    Growing,
}

/// Fully parameterized counting-rate closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateClosedForm {
    pub arg_constant: RateArgConstant,
    pub exponent_sign: RateExponentSign,
}

impl Default for RateClosedForm {
    fn default() -> Self {
        Self {
            arg_constant: RateArgConstant::ConvolutionDerived,
            exponent_sign: RateExponentSign::Decaying,
        }
    }
}

impl RateClosedForm {
    /// Evaluate exp(±8π² y² a²/(λ² z2²)) · (t - sin t)/y³, t = c·y.
    ///
    /// For |y| below [`POSITION_SERIES_THRESHOLD`] the rational factor uses
    /// its series c³/6 - c⁵y²/120; above it, (t - sin t) itself is evaluated
    /// through a cancellation-free series for small t so the two branches
    /// agree through the switch-over.
    pub fn eval(&self, y_r_mm: f64, cfg: &ValidatedConfig) -> f64 {
        let c = self.arg_constant.value(cfg);
        let w = 2.0 * PI * cfg.correlation_a() / (cfg.wavelength() * cfg.z2());
        let exponent = 2.0 * w * w * y_r_mm * y_r_mm;
        let envelope = match self.exponent_sign {
            RateExponentSign::Decaying => (-exponent).exp(),
            RateExponentSign::Growing => exponent.exp(),
        };
        let shape = if y_r_mm.abs() < POSITION_SERIES_THRESHOLD {
            let c3 = c * c * c;
            c3 / 6.0 - c3 * c * c * y_r_mm * y_r_mm / 120.0
        } else {
            t_minus_sin(c * y_r_mm) / (y_r_mm * y_r_mm * y_r_mm)
        };
        envelope * shape
    }
}

/// Coincidence counting rate at the right detector when all transmitted left
/// photons are collected: the single-slit-weighted average of the joint
/// position density, which closes to
/// exp(-8π² y² a²/(λ² z2²)) · (t - sin t)/y³ with t = 2πd y/(λ z2).
///
/// The argument constant is the one the quadrature calibration selects.
pub fn kim_shih_rate(y_r_mm: f64, cfg: &ValidatedConfig) -> f64 {
    RateClosedForm::default().eval(y_r_mm, cfg)
}

// --- root finding -------------------------------------------------------------

/// First zero (y > 0) of the single-slit pattern at distance `z`, located by
/// bisection on the oscillating amplitude. Analytically λz/d.
pub fn single_slit_first_zero(z_mm: f64, d_mm: f64, wavelength_mm: f64) -> f64 {
    let arg = PI * d_mm / (wavelength_mm * z_mm); // amplitude is sin(arg·y)/…
    first_sine_zero(arg, 0.0)
}

/// First zero (y_R > 0) of the coincidence fringe pattern for a fixed left
/// detector position. For y_L = 0 this is λ z2/d.
pub fn strekalov_first_zero(cfg: &ValidatedConfig, y_l_mm: f64) -> f64 {
    let arg = PI * cfg.slit_width() / (cfg.wavelength() * cfg.z2());
    let offset = PI * cfg.slit_width() * y_l_mm / (cfg.wavelength() * cfg.z1());
    first_sine_zero(arg, offset)
}

/// Smallest y > 0 with sin(offset + scale·y) = 0, found by bracketing the
/// sign change and bisecting to 1e-12 mm.
fn first_sine_zero(scale: f64, offset: f64) -> f64 {
    debug_assert!(scale > 0.0);
    let f = |y: f64| (offset + scale * y).sin();
    // March in steps of an eighth period until the sine changes sign.
    let step = PI / scale / 8.0;
    let mut lo = 0.0_f64;
    let mut flo = f(lo);
    if flo == 0.0 {
        // Start exactly on a node: move just inside the next lobe.
        lo = step * 1e-6;
        flo = f(lo);
    }
    let mut hi = lo + step;
    let mut fhi = f(hi);
    let mut guard = 0;
    while flo.signum() == fhi.signum() {
        lo = hi;
        flo = fhi;
        hi += step;
        fhi = f(hi);
        guard += 1;
        assert!(guard < 100, "no sign change found while bracketing fringe zero");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// --- numeric helpers -----------------------------------------------------------

/// sin(x)/x, with the series 1 - x²/6 below |x| = 1e-4 (agrees with the
/// direct form to ~1e-16 at the threshold).
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// x - sin(x) without catastrophic cancellation: series for |x| < 0.5,
/// direct subtraction above (where cancellation costs < 1e-14 relative).
pub(crate) fn t_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let x3 = x2 * x;
        // x³/6 - x⁵/120 + x⁷/5040 - x⁹/362880 + x¹¹/39916800
        x3 * (1.0 / 6.0
            + x2 * (-1.0 / 120.0
                + x2 * (1.0 / 5040.0 + x2 * (-1.0 / 362_880.0 + x2 / 39_916_800.0))))
    } else {
        x - x.sin()
    }
}
