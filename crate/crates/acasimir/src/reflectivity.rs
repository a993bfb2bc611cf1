//! Plate reflectivity models: built-in constants and ingested frequency tables.
//!
//! A reflectivity is the complex pressure-reflection coefficient of a plate's
//! inner surface, as a function of angular frequency only (angle-of-incidence
//! dependence is outside this model's validity domain). Passivity |r| <= 1 is
//! enforced up to a small interpolation/roundoff slack.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roundoff slack allowed on the passivity bound |r| <= 1.
pub const PASSIVITY_SLACK: f64 = 1e-12;

/// How a plate's complex reflectivity depends on angular frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum ReflectivitySpec {
    /// Frequency-independent complex reflectivity. Not validated at
    /// construction; every computation checks passivity on entry.
    Constant(Complex64),
    /// Rigid surface, r = 1 at all frequencies.
    PerfectReflector,
    /// Free surface, r = -1 at all frequencies (pressure node at the wall).
    PressureRelease,
    /// Measured reflectivity on a frequency grid, linearly interpolated.
    Table(ReflectivityTable),
}

/// Reflectivity samples (omega, r), strictly increasing in omega.
///
/// Linear interpolation is deliberate: it is monotone between knots, so the
/// interpolated modulus never overshoots the knot moduli and passivity
/// checked at the knots holds everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectivityTable {
    samples: Vec<(f64, Complex64)>,
}

impl ReflectivityTable {
    /// Build a table from (omega, r) samples.
    ///
    /// Requires at least 2 samples, finite nonnegative omegas strictly
    /// increasing, and |r| <= 1 + [`PASSIVITY_SLACK`] at every sample.
    pub fn new(samples: Vec<(f64, Complex64)>) -> Result<Self> {
        Self::validated(samples, |i| i + 1)
    }

    /// Parse the delimited text form: a header line naming the three columns
    /// `omega_rad_per_s`, `re_r`, `im_r` (comma- or whitespace-separated),
    /// then one sample per line. Blank lines and `#` comment lines are
    /// ignored. Errors carry 1-based physical line numbers.
    pub fn from_delimited(text: &str) -> Result<Self> {
        let fail = |line: usize, reason: String| Error::InvalidInput {
            name: "reflectivity table",
            reason: format!("line {line}: {reason}"),
        };
        let mut rows: Vec<(usize, (f64, Complex64))> = Vec::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            if !header_seen {
                if fields != ["omega_rad_per_s", "re_r", "im_r"] {
                    return Err(fail(
                        line_no,
                        format!(
                            "expected header \"omega_rad_per_s, re_r, im_r\", got {line:?}"
                        ),
                    ));
                }
                header_seen = true;
                continue;
            }
            if fields.len() != 3 {
                return Err(fail(
                    line_no,
                    format!("expected 3 columns, got {}", fields.len()),
                ));
            }
            let mut nums = [0.0f64; 3];
            for (slot, field) in nums.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|_| {
                    fail(line_no, format!("cannot parse {field:?} as a number"))
                })?;
            }
            rows.push((line_no, (nums[0], Complex64::new(nums[1], nums[2]))));
        }
        if !header_seen {
            return Err(fail(1, "missing header line".to_string()));
        }
        let lines: Vec<usize> = rows.iter().map(|(l, _)| *l).collect();
        Self::validated(rows.into_iter().map(|(_, s)| s).collect(), move |i| lines[i])
    }

    fn validated(samples: Vec<(f64, Complex64)>, line_of: impl Fn(usize) -> usize) -> Result<Self> {
        let fail = |i: usize, reason: String| Error::InvalidInput {
            name: "reflectivity table",
            reason: format!("line {}: {reason}", line_of(i)),
        };
        if samples.len() < 2 {
            return Err(Error::InvalidInput {
                name: "reflectivity table",
                reason: format!("need at least 2 samples, got {}", samples.len()),
            });
        }
        for (i, (omega, r)) in samples.iter().enumerate() {
            if !omega.is_finite() || *omega < 0.0 {
                return Err(fail(i, format!("omega = {omega} must be finite and nonnegative")));
            }
            if !r.re.is_finite() || !r.im.is_finite() {
                return Err(fail(i, format!("reflectivity {r} is not finite")));
            }
            if r.norm() > 1.0 + PASSIVITY_SLACK {
                return Err(Error::PassivityViolation {
                    line: line_of(i),
                    modulus: r.norm(),
                });
            }
            if i > 0 && samples[i - 1].0 >= *omega {
                return Err(fail(
                    i,
                    format!(
                        "omega values must be strictly increasing ({} then {omega})",
                        samples[i - 1].0
                    ),
                ));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    fn eval(&self, omega: f64) -> Result<Complex64> {
        let (lo, hi) = (
            self.samples[0].0,
            self.samples[self.samples.len() - 1].0,
        );
        if omega < lo || omega > hi {
            return Err(Error::OutOfTableRange { omega, lo, hi });
        }
        // index of the first knot at or above omega
        let i = self.samples.partition_point(|(w, _)| *w < omega);
        if self.samples[i].0 == omega {
            return Ok(self.samples[i].1);
        }
        let (w0, r0) = self.samples[i - 1];
        let (w1, r1) = self.samples[i];
        let t = (omega - w0) / (w1 - w0);
        Ok(r0 + (r1 - r0) * t)
    }
}

/// Evaluate a reflectivity spec at angular frequency `omega` (rad/s).
///
/// `omega` must be positive and finite; table queries outside the sampled
/// range fail with [`Error::OutOfTableRange`]. The returned value satisfies
/// |r| <= 1 + [`PASSIVITY_SLACK`]; a `Constant` built beyond that bound is
/// rejected here with [`Error::NotPassive`].
pub fn eval_reflectivity(spec: &ReflectivitySpec, omega: f64) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidInput {
            name: "reflectivity query",
            reason: format!("omega must be positive and finite (got {omega})"),
        });
    }
    match spec {
        ReflectivitySpec::Constant(r) => {
            if r.norm() > 1.0 + PASSIVITY_SLACK {
                return Err(Error::NotPassive { sup_modulus: r.norm() });
            }
            Ok(*r)
        }
        ReflectivitySpec::PerfectReflector => Ok(Complex64::new(1.0, 0.0)),
        ReflectivitySpec::PressureRelease => Ok(Complex64::new(-1.0, 0.0)),
        ReflectivitySpec::Table(table) => table.eval(omega),
    }
}

/// The reflectivity of a frequency-independent spec, if it is one.
pub fn constant_value(spec: &ReflectivitySpec) -> Option<Complex64> {
    match spec {
        ReflectivitySpec::Constant(r) => Some(*r),
        ReflectivitySpec::PerfectReflector => Some(Complex64::new(1.0, 0.0)),
        ReflectivitySpec::PressureRelease => Some(Complex64::new(-1.0, 0.0)),
        ReflectivitySpec::Table(_) => None,
    }
}

/// Largest |r| the spec attains for omega in [omega_lo, omega_hi].
///
/// Exact: a linear segment's modulus is convex in the interpolation
/// parameter, so the supremum over any subinterval is attained at a knot
/// inside the band or at a band edge, all of which are evaluated. Fails with
/// [`Error::OutOfTableRange`] if the band is not covered by the table.
pub fn sup_modulus_in_band(
    spec: &ReflectivitySpec,
    omega_lo: f64,
    omega_hi: f64,
) -> Result<f64> {
    match spec {
        ReflectivitySpec::Constant(r) => Ok(r.norm()),
        ReflectivitySpec::PerfectReflector | ReflectivitySpec::PressureRelease => Ok(1.0),
        ReflectivitySpec::Table(table) => {
            let mut sup: f64 = table.eval(omega_lo)?.norm().max(table.eval(omega_hi)?.norm());
            for (omega, r) in table.samples() {
                if *omega > omega_lo && *omega < omega_hi {
                    sup = sup.max(r.norm());
                }
            }
            Ok(sup)
        }
    }
}

/// First in-band frequency at which the spec is not real-valued, if any.
///
/// A table is real over the band only if both endpoints of every segment
/// overlapping the band are real (linear interpolation of real knots stays
/// real). Reports the offending knot (or the constant's frequency-independent
/// value at `omega_lo`).
pub fn first_nonreal_in_band(
    spec: &ReflectivitySpec,
    omega_lo: f64,
    omega_hi: f64,
) -> Result<Option<(f64, f64)>> {
    match spec {
        ReflectivitySpec::PerfectReflector | ReflectivitySpec::PressureRelease => Ok(None),
        ReflectivitySpec::Constant(r) => {
            Ok((r.im != 0.0).then_some((omega_lo, r.im)))
        }
        ReflectivitySpec::Table(table) => {
            // band coverage check, same contract as evaluation
            table.eval(omega_lo)?;
            table.eval(omega_hi)?;
            let samples = table.samples();
            for (i, (omega, r)) in samples.iter().enumerate() {
                let touches_band = {
                    let seg_lo = if i == 0 { *omega } else { samples[i - 1].0 };
                    let seg_hi = if i + 1 == samples.len() { *omega } else { samples[i + 1].0 };
                    seg_hi >= omega_lo && seg_lo <= omega_hi
                };
                if touches_band && r.im != 0.0 {
                    return Ok(Some((*omega, r.im)));
                }
            }
            Ok(None)
        }
    }
}
