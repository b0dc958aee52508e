use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::geometry_at;
use crate::error::{Error, Result};
use crate::model::{Check, Events, Profile, Sample, VerificationReport};
use crate::solver::SweepTable;

pub const PROFILE_HEADER: [&str; 6] = ["y", "r", "r_y", "r_yy", "support", "residual"];

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Profile CSV text. `{:.16e}` gives 17 significant digits, which round-trips every double.
pub fn profile_csv(profile: &Profile) -> String {
    let mut out = PROFILE_HEADER.join(",");
    out.push('\n');
    for s in &profile.samples {
        let residual = geometry_at(s.y, s.r, s.r_y, s.r_yy, &profile.equation).map_or(f64::NAN, |g| g.residual);
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.y,
            s.r,
            s.r_y,
            s.r_yy,
            s.support(),
            residual
        );
    }
    out
}

pub fn write_profile_csv(path: &Path, profile: &Profile) -> Result<()> {
    fs::write(path, profile_csv(profile)).map_err(|e| io_error(path, e))
}

/// Reads the samples back from a profile CSV; derived columns are ignored.
pub fn read_profile_csv(path: &Path) -> Result<Vec<Sample>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let headers = reader.headers().map_err(|e| io_error(path, e))?;
    if headers.iter().ne(PROFILE_HEADER) {
        return Err(io_error(path, "unexpected profile header"));
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| io_error(path, e))?;
        let field = |i: usize| -> Result<f64> {
            let text = record.get(i).unwrap_or_default();
            text.parse()
                .map_err(|_| Error::TypeMismatch { key: PROFILE_HEADER[i].to_string(), value: text.to_string() })
        };
        samples.push(Sample { y: field(0)?, r: field(1)?, r_y: field(2)?, r_yy: field(3)? });
    }
    Ok(samples)
}

pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for row in &table.rows {
        writer.serialize(row).map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    overall: &'static str,
    events: Option<&'a Events>,
    checks: &'a [Check],
}

pub fn report_json(report: &VerificationReport, events: Option<&Events>) -> String {
    let file = ReportFile { overall: if report.overall() { "PASS" } else { "FAIL" }, events, checks: &report.checks };
    serde_json::to_string_pretty(&file).expect("report serialises")
}

pub fn write_report_json(path: &Path, report: &VerificationReport, events: Option<&Events>) -> Result<()> {
    fs::write(path, report_json(report, events) + "\n").map_err(|e| io_error(path, e))
}

/// Gnuplot script drawing the profile and its mirror image from the CSV at `csv`.
pub fn gnuplot_script(csv: &Path, profile: &Profile) -> String {
    let eq = profile.equation;
    let csv = csv.display();
    format!(
        "set datafile separator ','\n\
         set key off\n\
         set xlabel 'r'\n\
         set ylabel 'y'\n\
         set title 'n = {}, lambda = {}'\n\
         set size ratio -1\n\
         plot '{csv}' every ::1 using 2:1 with lines lc rgb '#1f4e79', \\\n     \
         '{csv}' every ::1 using (-$2):1 with lines lc rgb '#1f4e79'\n",
        eq.n, eq.lambda
    )
}

/// Standalone SVG of the profile curve and its reflection across the axis,
/// restricted to heights `y <= y_clip`.
pub fn profile_svg(profile: &Profile, y_clip: f64) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 20.0;
    let pts: Vec<(f64, f64)> = profile.samples.iter().filter(|s| s.y <= y_clip).map(|s| (s.r, s.y)).collect();
    let r_max = pts.iter().map(|p| p.0).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (y_lo, y_hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let span = (2.0 * r_max).max(y_hi - y_lo).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * PAD) / span;
    let to_px = |r: f64, y: f64| (SIZE / 2.0 + r * scale, SIZE - PAD - (y - y_lo) * scale);
    let path = |sign: f64| {
        let mut d = String::new();
        for (i, &(r, y)) in pts.iter().enumerate() {
            let (x, z) = to_px(sign * r, y);
            let _ = write!(d, "{}{x:.2},{z:.2} ", if i == 0 { "M" } else { "L" });
        }
        d
    };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <line x1=\"{c}\" y1=\"0\" x2=\"{c}\" y2=\"{SIZE}\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n\
         <path d=\"{}\" fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\"/>\n\
         <path d=\"{}\" fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\"/>\n\
         </svg>\n",
        path(1.0),
        path(-1.0),
        c = SIZE / 2.0,
    )
}

/// Writes `<plot>` as a gnuplot script and `<plot>.svg` next to it.
pub fn write_plot(path: &Path, csv: &Path, profile: &Profile, y_clip: f64) -> Result<()> {
    fs::write(path, gnuplot_script(csv, profile)).map_err(|e| io_error(path, e))?;
    let svg = path.with_extension("svg");
    fs::write(&svg, profile_svg(profile, y_clip)).map_err(|e| io_error(&svg, e))
}
