//! Textual metric reports printed after a run.

use biphoton::config::Warning;
use biphoton::{ScanResult, ValidatedConfig};

use crate::output::curve_label;

pub fn render_report(
    cfg: &ValidatedConfig,
    preset_notes: &[Warning],
    results: &[&ScanResult],
) -> String {
    let mut out = String::new();
    let c = cfg.config();
    out.push_str(&format!(
        "configuration: lambda = {} mm, d = {} mm, a = {} mm (beam width {} mm), z1 = {} mm, z2 = {} mm\n",
        c.wavelength_mm,
        c.slit_width_mm,
        c.correlation_a_mm,
        1.0 / c.correlation_a_mm,
        c.z1_mm,
        c.z2_mm
    ));
    out.push_str(&format!(
        "scan window: [{}, {}] mm, {} points; fresnel number = {:.4}\n",
        c.scan.y_min_mm, c.scan.y_max_mm, c.scan.points, cfg.fresnel_number()
    ));
    for w in preset_notes.iter().chain(cfg.warnings()) {
        out.push_str(&format!("warning: {w}\n"));
    }
    for result in results {
        out.push('\n');
        out.push_str(&format!("[{}]\n", curve_label(result)));
        let m = &result.metrics;
        out.push_str(&format!(
            "  normalized over [{}, {}] mm (window integral {:.6e})\n",
            result.provenance.window.0, result.provenance.window.1, result.provenance.normalization
        ));
        out.push_str(&format!("  peak location: {:.6} mm\n", m.peak_location_mm));
        match m.fwhm_mm {
            Some(f) => out.push_str(&format!("  fwhm: {f:.6} mm\n")),
            None => out.push_str("  fwhm: not bracketed by the scan window\n"),
        }
        out.push_str(&format!(
            "  delta_y = d/2 = {:.6} mm (slit half-width localization convention)\n",
            m.delta_y_mm
        ));
        out.push_str(&format!(
            "  delta_p = {:.6} hbar/mm (std of p = 2*pi*y/(lambda*z), z = {} mm)\n",
            m.delta_p_hbar_per_mm, result.provenance.plane_distance_mm
        ));
        out.push_str(&format!("  delta_y * delta_p = {:.6} hbar\n", m.product_hbar));
        if let Some(cal) = &result.provenance.calibration {
            out.push_str(&format!(
                "  rate argument constant: {} (matched quadrature to {:.3e}; alternative {} rejected at {:.3e})\n",
                cal.chosen.describe(cfg),
                match cal.chosen {
                    biphoton::analytic::RateArgConstant::ConvolutionDerived => cal.convolution_dev,
                    biphoton::analytic::RateArgConstant::HalfTurn => cal.half_turn_dev,
                },
                match cal.chosen {
                    biphoton::analytic::RateArgConstant::ConvolutionDerived =>
                        "pi*d/(lambda*z2)",
                    biphoton::analytic::RateArgConstant::HalfTurn => "2*pi*d/(lambda*z2)",
                },
                match cal.chosen {
                    biphoton::analytic::RateArgConstant::ConvolutionDerived => cal.half_turn_dev,
                    biphoton::analytic::RateArgConstant::HalfTurn => cal.convolution_dev,
                },
            ));
        }
    }
    out
}
