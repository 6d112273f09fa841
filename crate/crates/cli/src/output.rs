//! CSV and SVG emission for scan results.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use biphoton::analytic::GaussianPrefactor;
use biphoton::{JointDensity2D, RateMode, ScanResult, Scenario};

/// Everything one invocation wrote, plus the textual report.
#[derive(Debug, Default)]
pub struct OutputBundle {
    pub csv_paths: Vec<PathBuf>,
    pub svg_paths: Vec<PathBuf>,
    pub report: String,
}

impl OutputBundle {
    /// Every listed path must exist and be non-empty.
    pub fn verify(&self) -> io::Result<()> {
        for path in self.csv_paths.iter().chain(&self.svg_paths) {
            let meta = fs::metadata(path)?;
            if meta.len() == 0 {
                return Err(io::Error::new(
                    io::ErrorKind::UnexpectedEof,
                    format!("{} is empty", path.display()),
                ));
            }
        }
        Ok(())
    }
}

/// 12 significant digits: enough to reload within 1e-10, free of f64 noise.
fn fmt_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Write a scan as `y_mm,probability_density` rows, newline-terminated.
pub fn write_csv(result: &ScanResult, path: &Path) -> io::Result<()> {
    let grid = result.distribution.grid();
    if grid.len() == 0 || result.distribution.values().is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "refusing to write an empty distribution",
        ));
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "y_mm,probability_density")?;
    for (y, v) in grid.samples().iter().zip(result.distribution.values()) {
        writeln!(w, "{},{}", fmt_value(*y), fmt_value(*v))?;
    }
    w.flush()
}

/// Write a joint density as `y_L_mm,y_R_mm,probability_density` rows.
pub fn write_joint_csv(joint: &JointDensity2D, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "y_L_mm,y_R_mm,probability_density")?;
    for (i, l) in joint.left_grid().samples().iter().enumerate() {
        for (j, r) in joint.right_grid().samples().iter().enumerate() {
            writeln!(w, "{},{},{}", fmt_value(*l), fmt_value(*r), fmt_value(joint.value(i, j)))?;
        }
    }
    w.flush()
}

/// Parse a scan CSV back into (y, density) pairs.
pub fn read_scan_csv(path: &Path) -> io::Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> io::Result<f64> {
            s.and_then(|t| t.parse().ok()).ok_or_else(|| {
                io::Error::new(io::ErrorKind::InvalidData, format!("bad CSV row: {line}"))
            })
        };
        rows.push((parse(parts.next())?, parse(parts.next())?));
    }
    Ok(rows)
}

/// Label a curve by what produced it.
pub fn curve_label(result: &ScanResult) -> String {
    match result.provenance.scenario {
        Scenario::SingleSlit => {
            format!("single-slit @ z = {} mm", result.provenance.plane_distance_mm)
        }
        Scenario::Strekalov => {
            let y_l = result.provenance.left_detector_y_mm.unwrap_or(0.0);
            let env = match result.provenance.prefactor {
                Some(GaussianPrefactor::Retain) => ", envelope",
                _ => "",
            };
            format!("strekalov y_L = {y_l} mm{env}")
        }
        Scenario::KimShih => {
            let mode = match result.provenance.mode {
                Some(RateMode::Numeric) => "numeric",
                _ => "closed-form",
            };
            format!("kim-shih ({mode})")
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Render scan curves as a self-contained SVG. Each curve is shown
/// peak-normalized so width relations read directly off the figure.
/// `overlay` puts every curve on one axes pair; otherwise each curve gets
/// its own panel, stacked vertically.
pub fn emit_svg_plot(results: &[&ScanResult], path: &Path, overlay: bool) -> io::Result<()> {
    if results.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no curves to plot"));
    }
    let svg = if overlay {
        render_panels(&[results.to_vec()])
    } else {
        let panels: Vec<Vec<&ScanResult>> = results.iter().map(|r| vec![*r]).collect();
        render_panels(&panels)
    };
    fs::write(path, svg)
}

fn render_panels(panels: &[Vec<&ScanResult>]) -> String {
    const WIDTH: f64 = 860.0;
    const PANEL_HEIGHT: f64 = 430.0;
    const LEFT: f64 = 72.0;
    const RIGHT: f64 = 24.0;
    const TOP: f64 = 36.0;
    const BOTTOM: f64 = 58.0;

    let total_height = PANEL_HEIGHT * panels.len() as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{total_height}\" \
         viewBox=\"0 0 {WIDTH} {total_height}\" font-family=\"sans-serif\" font-size=\"13\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    ));

    for (p, curves) in panels.iter().enumerate() {
        let oy = p as f64 * PANEL_HEIGHT;
        let x0 = LEFT;
        let x1 = WIDTH - RIGHT;
        let y0 = oy + PANEL_HEIGHT - BOTTOM;
        let y1 = oy + TOP;

        let x_min = curves.iter().map(|r| r.distribution.grid().first()).fold(f64::MAX, f64::min);
        let x_max = curves.iter().map(|r| r.distribution.grid().last()).fold(f64::MIN, f64::max);
        let y_max = 1.05; // peak-normalized curves
        let sx = move |x: f64| x0 + (x - x_min) / (x_max - x_min) * (x1 - x0);
        let sy = move |y: f64| y0 - y / y_max * (y0 - y1);

        // axes
        svg.push_str(&format!(
            "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>\n\
             <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>\n"
        ));
        // x ticks
        for k in 0..=6 {
            let x = x_min + (x_max - x_min) * k as f64 / 6.0;
            let px = sx(x);
            svg.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
                 <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x:.2}</text>\n",
                y0 + 5.0,
                y0 + 20.0
            ));
        }
        // y ticks
        for k in 0..=5 {
            let v = k as f64 / 5.0;
            let py = sy(v);
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\n\
                 <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.1}</text>\n",
                x0 - 5.0,
                x0 - 9.0,
                py + 4.0
            ));
        }
        // axis labels
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">y (mm)</text>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">density (peak = 1)</text>\n",
            0.5 * (x0 + x1),
            oy + PANEL_HEIGHT - 12.0,
            x0 - 52.0,
            0.5 * (y0 + y1),
            x0 - 52.0,
            0.5 * (y0 + y1)
        ));

        for (c, result) in curves.iter().enumerate() {
            let color = PALETTE[c % PALETTE.len()];
            let peak = result.distribution.peak().value;
            let mut points = String::new();
            for (x, v) in result
                .distribution
                .grid()
                .samples()
                .iter()
                .zip(result.distribution.values())
            {
                points.push_str(&format!("{:.2},{:.2} ", sx(*x), sy(v / peak)));
            }
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                points.trim_end()
            ));
            // legend entry
            let lx = x1 - 250.0;
            let ly = y1 + 16.0 + 18.0 * c as f64;
            svg.push_str(&format!(
                "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
                 <text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
                lx + 28.0,
                lx + 34.0,
                ly + 4.0,
                curve_label(result)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
