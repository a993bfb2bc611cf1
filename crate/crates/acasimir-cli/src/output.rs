//! CSV rendering and atomic file writes.
//!
//! All numeric columns use shortest round-trip formatting so outputs are
//! bit-reproducible across runs; rows a sweep skipped carry NaN. Sign
//! changes are appended after the data as `# sign_change: <lo>,<hi>`
//! comment lines. Files are written to a sibling temp path and renamed into
//! place so readers never observe a partial file.

use std::fs;
use std::io;
use std::path::Path;

use acasimir::{ModeDensityPoint, SweepRow};

fn float_field(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_string()
    } else {
        format!("{value}")
    }
}

/// Render sweep rows (or a single-row force/energy result) as CSV.
///
/// # Arguments
/// * `header` - the five column names, e.g. `L_m,force_Pa,error_Pa,method,warnings`.
/// * `sign_changes` - separation pairs bracketing a sign change, appended as
///   comment lines after the data.
pub fn render_rows(
    header: &[&str; 5],
    rows: &[SweepRow],
    sign_changes: &[(f64, f64)],
) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("writing to a Vec cannot fail");
    for row in rows {
        writer
            .write_record(&[
                float_field(row.separation),
                float_field(row.value),
                float_field(row.error_estimate),
                row.method.to_string(),
                row.warnings.join("; "),
            ])
            .expect("writing to a Vec cannot fail");
    }
    let mut bytes = writer.into_inner().expect("writing to a Vec cannot fail");
    for (lo, hi) in sign_changes {
        bytes.extend_from_slice(format!("# sign_change: {lo},{hi}\n").as_bytes());
    }
    bytes
}

/// Render a density-of-modes scan as CSV with columns `k_z_rad_per_m,density`.
pub fn render_dos(points: &[ModeDensityPoint]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["k_z_rad_per_m", "density"])
        .expect("writing to a Vec cannot fail");
    for point in points {
        writer
            .write_record(&[float_field(point.k_z), float_field(point.density)])
            .expect("writing to a Vec cannot fail");
    }
    writer.into_inner().expect("writing to a Vec cannot fail")
}

/// Write `bytes` to `path` via a sibling `.tmp` file and rename, so the
/// destination is either absent, the old content, or the complete new
/// content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
