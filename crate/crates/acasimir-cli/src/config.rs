//! Run configuration: flat `key = value` lines under bracketed section
//! headers.
//!
//! ```text
//! [band]
//! omega_lo_rad_per_s = 31415.926535897932
//! omega_hi_rad_per_s = 94247.77960769379
//! spectral_intensity = 1
//! sound_speed_m_per_s = 343
//!
//! [cavity]
//! separation_m = 0.05
//! refl_a = perfect
//! refl_b = constant 0.8
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. Unknown sections or
//! keys are rejected, and every diagnostic names the file and line it came
//! from. Reflectivity values are `perfect`, `pressure-release`,
//! `constant <re> [<im>]`, or `table <path>` (relative paths resolve against
//! the config file's directory; tables are read and validated at load time).
//! The effective configuration of a run, after flag overrides, is serialized
//! back into this grammar as the output's sidecar so the run can be
//! reproduced from it exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use acasimir::reflectivity::ReflectivityTable;
use acasimir::{Method, NoiseBand, QuadratureSettings, ReflectivitySpec};
use num_complex::Complex64;

/// A configuration problem, always fatal and always locatable.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// File the problem lives in (config or reflectivity table).
    pub file: String,
    /// 1-based line, when the problem is tied to one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error: {}:{line}: {}", self.file, self.message),
            None => write!(f, "config error: {}: {}", self.file, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Every section and key the grammar accepts.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "band",
        &["omega_lo_rad_per_s", "omega_hi_rad_per_s", "spectral_intensity", "sound_speed_m_per_s"],
    ),
    ("cavity", &["separation_m", "refl_a", "refl_b"]),
    ("sphere_plane", &["radius_m", "refl_sphere", "refl_plane"]),
    ("sweep", &["l_min_m", "l_max_m", "points", "spacing"]),
    ("dos", &["points"]),
    (
        "quadrature",
        &[
            "rel_tol",
            "abs_tol",
            "max_subdivisions",
            "min_panels_per_oscillation",
            "series_max_terms",
            "series_tail_tol",
        ],
    ),
    ("run", &["method"]),
    ("output", &["path"]),
];

fn schema_keys(section: &str) -> Option<&'static [&'static str]> {
    SCHEMA.iter().find(|(name, _)| *name == section).map(|(_, keys)| *keys)
}

#[derive(Debug, Clone)]
struct RawValue {
    value: String,
    line: usize,
}

/// A parsed but untyped configuration: section -> key -> value with source
/// lines retained for diagnostics.
#[derive(Debug, Clone)]
pub struct RawConfig {
    file: String,
    dir: PathBuf,
    sections: BTreeMap<String, BTreeMap<String, RawValue>>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|err| ConfigError {
            file: file.clone(),
            line: None,
            message: format!("cannot read config: {err}"),
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let file = path.display().to_string();
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).map_or_else(
            || PathBuf::from("."),
            Path::to_path_buf,
        );
        let fail = |line: usize, message: String| ConfigError {
            file: file.clone(),
            line: Some(line),
            message,
        };
        let mut sections: BTreeMap<String, BTreeMap<String, RawValue>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let Some(name) = inner.strip_suffix(']') else {
                    return Err(fail(line_no, format!("malformed section header {line:?}")));
                };
                let name = name.trim();
                if schema_keys(name).is_none() {
                    return Err(fail(line_no, format!("unknown section [{name}]")));
                }
                if sections.contains_key(name) {
                    return Err(fail(line_no, format!("duplicate section [{name}]")));
                }
                sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(fail(line_no, format!("expected `key = value`, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = &current else {
                return Err(fail(line_no, format!("key '{key}' outside any [section]")));
            };
            let allowed = schema_keys(section).expect("current section came from the schema");
            if !allowed.contains(&key) {
                return Err(fail(
                    line_no,
                    format!("unknown key '{key}' in [{section}] (expected one of: {})", allowed.join(", ")),
                ));
            }
            let entry = sections.get_mut(section).expect("section was inserted");
            if entry.contains_key(key) {
                return Err(fail(line_no, format!("duplicate key '{key}' in [{section}]")));
            }
            entry.insert(key.to_string(), RawValue { value: value.to_string(), line: line_no });
        }
        Ok(Self { file, dir, sections })
    }

    /// Apply one `--override section.key=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let fail = |message: String| ConfigError {
            file: self.file.clone(),
            line: None,
            message: format!("override '{spec}': {message}"),
        };
        let Some((target, value)) = spec.split_once('=') else {
            return Err(fail("expected section.key=value".to_string()));
        };
        let Some((section, key)) = target.trim().split_once('.') else {
            return Err(fail("expected section.key=value".to_string()));
        };
        let (section, key) = (section.trim(), key.trim());
        let Some(allowed) = schema_keys(section) else {
            return Err(fail(format!("unknown section [{section}]")));
        };
        if !allowed.contains(&key) {
            return Err(fail(format!(
                "unknown key '{key}' in [{section}] (expected one of: {})",
                allowed.join(", ")
            )));
        }
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), RawValue { value: value.trim().to_string(), line: 0 });
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&RawValue> {
        self.sections.get(section).and_then(|keys| keys.get(key))
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }
}

/// A reflectivity spec together with its canonical config-file spelling.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRefl {
    pub echo: String,
    pub spec: ReflectivitySpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
    }
}

/// Separation grid of a sweep: `points` values from `l_min` to `l_max`
/// inclusive, linearly or logarithmically spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub l_min: f64,
    pub l_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepGrid {
    pub fn build(&self) -> Vec<f64> {
        let n = self.points;
        let mut grid = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            grid.push(match self.spacing {
                Spacing::Linear => self.l_min + (self.l_max - self.l_min) * t,
                Spacing::Log => (self.l_min.ln() + (self.l_max.ln() - self.l_min.ln()) * t).exp(),
            });
        }
        // both endpoints exact regardless of rounding in the interior
        grid[0] = self.l_min;
        grid[n - 1] = self.l_max;
        grid
    }
}

/// The typed configuration: band always present, everything else optional
/// until a subcommand claims it.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub file: String,
    pub band: NoiseBand,
    pub separation: Option<f64>,
    pub refl_a: Option<LoadedRefl>,
    pub refl_b: Option<LoadedRefl>,
    pub sphere_radius: Option<f64>,
    pub refl_sphere: Option<LoadedRefl>,
    pub refl_plane: Option<LoadedRefl>,
    pub sweep: Option<SweepGrid>,
    pub dos_points: Option<usize>,
    pub settings: QuadratureSettings,
    pub method: Method,
    pub out: Option<PathBuf>,
}

fn parse_number<T: std::str::FromStr>(
    file: &str,
    section: &str,
    key: &str,
    rv: &RawValue,
) -> Result<T, ConfigError> {
    rv.value.parse().map_err(|_| ConfigError {
        file: file.to_string(),
        line: Some(rv.line),
        message: format!("invalid value for '{key}' in [{section}]: {:?}", rv.value),
    })
}

fn require<'a>(
    raw: &'a RawConfig,
    section: &str,
    key: &str,
) -> Result<&'a RawValue, ConfigError> {
    raw.get(section, key).ok_or_else(|| ConfigError {
        file: raw.file.clone(),
        line: None,
        message: format!("missing key '{key}' in [{section}]"),
    })
}

fn parse_refl(raw: &RawConfig, section: &str, key: &str) -> Result<Option<LoadedRefl>, ConfigError> {
    let Some(rv) = raw.get(section, key) else { return Ok(None) };
    let fail = |message: String| ConfigError {
        file: raw.file.clone(),
        line: Some(rv.line),
        message: format!("'{key}' in [{section}]: {message}"),
    };
    let mut tokens = rv.value.split_whitespace();
    let form = tokens.next().ok_or_else(|| fail("empty reflectivity".to_string()))?;
    let loaded = match form {
        "perfect" => {
            if tokens.next().is_some() {
                return Err(fail("'perfect' takes no arguments".to_string()));
            }
            LoadedRefl { echo: "perfect".to_string(), spec: ReflectivitySpec::PerfectReflector }
        }
        "pressure-release" => {
            if tokens.next().is_some() {
                return Err(fail("'pressure-release' takes no arguments".to_string()));
            }
            LoadedRefl {
                echo: "pressure-release".to_string(),
                spec: ReflectivitySpec::PressureRelease,
            }
        }
        "constant" => {
            let parts: Vec<&str> = tokens.collect();
            if parts.is_empty() || parts.len() > 2 {
                return Err(fail("'constant' takes a real part and an optional imaginary part".to_string()));
            }
            let mut nums = [0.0f64; 2];
            for (slot, part) in nums.iter_mut().zip(&parts) {
                *slot = part
                    .parse()
                    .map_err(|_| fail(format!("cannot parse {part:?} as a number")))?;
            }
            let value = Complex64::new(nums[0], nums[1]);
            if value.norm() > 1.0 + acasimir::reflectivity::PASSIVITY_SLACK {
                return Err(fail(format!(
                    "constant reflectivity modulus {} exceeds 1",
                    value.norm()
                )));
            }
            let echo = if value.im == 0.0 {
                format!("constant {}", value.re)
            } else {
                format!("constant {} {}", value.re, value.im)
            };
            LoadedRefl { echo, spec: ReflectivitySpec::Constant(value) }
        }
        "table" => {
            let rest = rv.value["table".len()..].trim();
            if rest.is_empty() {
                return Err(fail("'table' needs a file path".to_string()));
            }
            let given = Path::new(rest);
            let resolved = if given.is_absolute() {
                given.to_path_buf()
            } else {
                raw.dir.join(given)
            };
            let absolute = if resolved.is_absolute() {
                resolved
            } else {
                std::env::current_dir()
                    .map_err(|err| fail(format!("cannot resolve table path: {err}")))?
                    .join(resolved)
            };
            let text = fs::read_to_string(&absolute).map_err(|err| {
                fail(format!("cannot read reflectivity table {}: {err}", absolute.display()))
            })?;
            let table = ReflectivityTable::from_delimited(&text).map_err(|err| match err {
                acasimir::Error::PassivityViolation { line, modulus } => ConfigError {
                    file: absolute.display().to_string(),
                    line: Some(line),
                    message: format!("reflectivity modulus {modulus} exceeds 1"),
                },
                other => ConfigError {
                    file: absolute.display().to_string(),
                    line: None,
                    message: other.to_string(),
                },
            })?;
            LoadedRefl {
                echo: format!("table {}", absolute.display()),
                spec: ReflectivitySpec::Table(table),
            }
        }
        other => {
            return Err(fail(format!(
                "unknown reflectivity form {other:?} (expected perfect, pressure-release, constant, or table)"
            )))
        }
    };
    Ok(Some(loaded))
}

impl LoadedConfig {
    pub fn build(raw: RawConfig) -> Result<Self, ConfigError> {
        let file = raw.file.clone();
        let section_err = |section: &str, message: String| ConfigError {
            file: file.clone(),
            line: None,
            message: format!("[{section}]: {message}"),
        };

        if !raw.has_section("band") {
            return Err(ConfigError {
                file: file.clone(),
                line: None,
                message: "missing required section [band]".to_string(),
            });
        }
        let band_f64 = |key: &str| -> Result<f64, ConfigError> {
            parse_number(&file, "band", key, require(&raw, "band", key)?)
        };
        let band = NoiseBand::new(
            band_f64("omega_lo_rad_per_s")?,
            band_f64("omega_hi_rad_per_s")?,
            band_f64("spectral_intensity")?,
            band_f64("sound_speed_m_per_s")?,
        )
        .map_err(|err| section_err("band", err.to_string()))?;

        let separation = raw
            .get("cavity", "separation_m")
            .map(|rv| parse_number(&file, "cavity", "separation_m", rv))
            .transpose()?;
        let refl_a = parse_refl(&raw, "cavity", "refl_a")?;
        let refl_b = parse_refl(&raw, "cavity", "refl_b")?;

        let sphere_radius = raw
            .get("sphere_plane", "radius_m")
            .map(|rv| parse_number::<f64>(&file, "sphere_plane", "radius_m", rv))
            .transpose()?;
        if let Some(radius) = sphere_radius {
            if !(radius.is_finite() && radius > 0.0) {
                return Err(section_err(
                    "sphere_plane",
                    format!("radius_m must be positive and finite (got {radius})"),
                ));
            }
        }
        let refl_sphere = parse_refl(&raw, "sphere_plane", "refl_sphere")?;
        let refl_plane = parse_refl(&raw, "sphere_plane", "refl_plane")?;

        let sweep = if raw.has_section("sweep") {
            let l_min: f64 = parse_number(&file, "sweep", "l_min_m", require(&raw, "sweep", "l_min_m")?)?;
            let l_max: f64 = parse_number(&file, "sweep", "l_max_m", require(&raw, "sweep", "l_max_m")?)?;
            let points: usize = parse_number(&file, "sweep", "points", require(&raw, "sweep", "points")?)?;
            let spacing = match raw.get("sweep", "spacing") {
                None => Spacing::Linear,
                Some(rv) => match rv.value.as_str() {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    other => {
                        return Err(ConfigError {
                            file: file.clone(),
                            line: Some(rv.line),
                            message: format!("spacing must be 'linear' or 'log', got {other:?}"),
                        })
                    }
                },
            };
            if !(l_min.is_finite() && l_min > 0.0 && l_max.is_finite() && l_min < l_max) {
                return Err(section_err(
                    "sweep",
                    format!("need 0 < l_min_m < l_max_m (got {l_min} and {l_max})"),
                ));
            }
            if points < 2 {
                return Err(section_err("sweep", format!("points must be at least 2 (got {points})")));
            }
            Some(SweepGrid { l_min, l_max, points, spacing })
        } else {
            None
        };

        let dos_points = raw
            .get("dos", "points")
            .map(|rv| parse_number::<usize>(&file, "dos", "points", rv))
            .transpose()?;
        if let Some(points) = dos_points {
            if points < 2 {
                return Err(section_err("dos", format!("points must be at least 2 (got {points})")));
            }
        }

        let mut settings = QuadratureSettings::default();
        if let Some(rv) = raw.get("quadrature", "rel_tol") {
            settings.rel_tol = parse_number(&file, "quadrature", "rel_tol", rv)?;
        }
        if let Some(rv) = raw.get("quadrature", "abs_tol") {
            settings.abs_tol = parse_number(&file, "quadrature", "abs_tol", rv)?;
        }
        if let Some(rv) = raw.get("quadrature", "max_subdivisions") {
            settings.max_subdivisions = parse_number(&file, "quadrature", "max_subdivisions", rv)?;
        }
        if let Some(rv) = raw.get("quadrature", "min_panels_per_oscillation") {
            settings.min_panels_per_oscillation =
                parse_number(&file, "quadrature", "min_panels_per_oscillation", rv)?;
        }
        if let Some(rv) = raw.get("quadrature", "series_max_terms") {
            settings.series_max_terms = parse_number(&file, "quadrature", "series_max_terms", rv)?;
        }
        if let Some(rv) = raw.get("quadrature", "series_tail_tol") {
            settings.series_tail_tol = parse_number(&file, "quadrature", "series_tail_tol", rv)?;
        }
        settings
            .validate()
            .map_err(|err| section_err("quadrature", err.to_string()))?;

        let method = match raw.get("run", "method") {
            None => Method::Adaptive,
            Some(rv) => rv.value.parse().map_err(|err| ConfigError {
                file: file.clone(),
                line: Some(rv.line),
                message: err,
            })?,
        };

        let out = raw.get("output", "path").map(|rv| PathBuf::from(&rv.value));

        Ok(Self {
            file,
            band,
            separation,
            refl_a,
            refl_b,
            sphere_radius,
            refl_sphere,
            refl_plane,
            sweep,
            dos_points,
            settings,
            method,
            out,
        })
    }
}

/// The cavity part of an effective configuration; `separation` is echoed
/// only when the subcommand used it.
pub struct EffectiveCavity<'a> {
    pub separation: Option<f64>,
    pub refl_a: &'a str,
    pub refl_b: &'a str,
}

/// What a run actually computed with, serialized to the sidecar.
pub struct Effective<'a> {
    pub band: &'a NoiseBand,
    pub cavity: Option<EffectiveCavity<'a>>,
    pub sphere: Option<(f64, &'a str, &'a str)>,
    pub sweep: Option<&'a SweepGrid>,
    pub dos_points: Option<usize>,
    pub settings: &'a QuadratureSettings,
    pub method: Method,
    pub out: &'a Path,
}

/// Canonical serialization of the effective configuration. Parsing the
/// result reproduces the run: sections appear in a fixed order, floats are
/// printed in round-trip precision, and paths are absolute.
pub fn serialize_effective(effective: &Effective) -> String {
    use fmt::Write;
    let mut text = String::new();
    let out = &mut text;
    writeln!(out, "# effective configuration; rerunning from this file reproduces the output").unwrap();
    writeln!(out, "[band]").unwrap();
    writeln!(out, "omega_lo_rad_per_s = {}", effective.band.omega_lo()).unwrap();
    writeln!(out, "omega_hi_rad_per_s = {}", effective.band.omega_hi()).unwrap();
    writeln!(out, "spectral_intensity = {}", effective.band.spectral_intensity()).unwrap();
    writeln!(out, "sound_speed_m_per_s = {}", effective.band.sound_speed()).unwrap();
    if let Some(cavity) = &effective.cavity {
        writeln!(out).unwrap();
        writeln!(out, "[cavity]").unwrap();
        if let Some(separation) = cavity.separation {
            writeln!(out, "separation_m = {separation}").unwrap();
        }
        writeln!(out, "refl_a = {}", cavity.refl_a).unwrap();
        writeln!(out, "refl_b = {}", cavity.refl_b).unwrap();
    }
    if let Some((radius, refl_sphere, refl_plane)) = &effective.sphere {
        writeln!(out).unwrap();
        writeln!(out, "[sphere_plane]").unwrap();
        writeln!(out, "radius_m = {radius}").unwrap();
        writeln!(out, "refl_sphere = {refl_sphere}").unwrap();
        writeln!(out, "refl_plane = {refl_plane}").unwrap();
    }
    if let Some(sweep) = effective.sweep {
        writeln!(out).unwrap();
        writeln!(out, "[sweep]").unwrap();
        writeln!(out, "l_min_m = {}", sweep.l_min).unwrap();
        writeln!(out, "l_max_m = {}", sweep.l_max).unwrap();
        writeln!(out, "points = {}", sweep.points).unwrap();
        writeln!(out, "spacing = {}", sweep.spacing).unwrap();
    }
    if let Some(points) = effective.dos_points {
        writeln!(out).unwrap();
        writeln!(out, "[dos]").unwrap();
        writeln!(out, "points = {points}").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[quadrature]").unwrap();
    writeln!(out, "rel_tol = {}", effective.settings.rel_tol).unwrap();
    writeln!(out, "abs_tol = {}", effective.settings.abs_tol).unwrap();
    writeln!(out, "max_subdivisions = {}", effective.settings.max_subdivisions).unwrap();
    writeln!(out, "min_panels_per_oscillation = {}", effective.settings.min_panels_per_oscillation).unwrap();
    writeln!(out, "series_max_terms = {}", effective.settings.series_max_terms).unwrap();
    writeln!(out, "series_tail_tol = {}", effective.settings.series_tail_tol).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[run]").unwrap();
    writeln!(out, "method = {}", effective.method).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[output]").unwrap();
    writeln!(out, "path = {}", effective.out.display()).unwrap();
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as IoWrite;

    fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        RawConfig::parse(text, Path::new("test.conf"))
    }

    const MINIMAL_BAND: &str = "[band]\nomega_lo_rad_per_s = 100\nomega_hi_rad_per_s = 200\nspectral_intensity = 1\nsound_speed_m_per_s = 343\n";

    #[test]
    fn unknown_keys_are_rejected_with_their_line() {
        let err = parse("[band]\nomega_lo_rad_per_s = 1\nbogus = 2\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("unknown key 'bogus'"), "{err}");
    }

    #[test]
    fn unknown_sections_and_duplicates_are_rejected() {
        assert!(parse("[bogus]\n").unwrap_err().message.contains("unknown section"));
        let err = parse("[band]\n[band]\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("duplicate section"));
        let err = parse("[run]\nmethod = adaptive\nmethod = series\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("duplicate key"));
    }

    #[test]
    fn keys_need_a_section_and_an_equals_sign() {
        let err = parse("method = adaptive\n").unwrap_err();
        assert!(err.message.contains("outside any [section]"), "{err}");
        let err = parse("[run]\nmethod adaptive\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("key = value"), "{err}");
    }

    #[test]
    fn bad_numbers_are_located() {
        let text = "[band]\nomega_lo_rad_per_s = fast\nomega_hi_rad_per_s = 200\nspectral_intensity = 1\nsound_speed_m_per_s = 343\n";
        let err = LoadedConfig::build(parse(text).unwrap()).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("omega_lo_rad_per_s"), "{err}");
    }

    #[test]
    fn band_is_required_and_validated() {
        let err = LoadedConfig::build(parse("[run]\nmethod = adaptive\n").unwrap()).unwrap_err();
        assert!(err.message.contains("[band]"), "{err}");
        let swapped = "[band]\nomega_lo_rad_per_s = 300\nomega_hi_rad_per_s = 200\nspectral_intensity = 1\nsound_speed_m_per_s = 343\n";
        let err = LoadedConfig::build(parse(swapped).unwrap()).unwrap_err();
        assert!(err.message.contains("[band]"), "{err}");
    }

    #[test]
    fn defaults_fill_in_quadrature_run_and_spacing() {
        let text = format!("{MINIMAL_BAND}[sweep]\nl_min_m = 0.01\nl_max_m = 0.1\npoints = 5\n");
        let cfg = LoadedConfig::build(parse(&text).unwrap()).unwrap();
        assert_eq!(cfg.settings, QuadratureSettings::default());
        assert_eq!(cfg.method, Method::Adaptive);
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.spacing, Spacing::Linear);
        let grid = sweep.build();
        assert_eq!((grid[0], grid[4]), (0.01, 0.1));
        for (got, want) in grid.iter().zip([0.01, 0.0325, 0.055, 0.0775, 0.1]) {
            assert!((got - want).abs() <= 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn log_grids_hit_both_endpoints_exactly() {
        let grid = SweepGrid { l_min: 0.001, l_max: 1.0, points: 7, spacing: Spacing::Log }.build();
        assert_eq!(grid[0], 0.001);
        assert_eq!(grid[6], 1.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        // log spacing: constant ratio between neighbors
        let ratio = grid[1] / grid[0];
        for w in grid.windows(2) {
            assert!((w[1] / w[0] - ratio).abs() <= 1e-12);
        }
    }

    #[test]
    fn overrides_replace_and_insert_values() {
        let mut raw = parse(MINIMAL_BAND).unwrap();
        raw.apply_override("band.spectral_intensity=2.5").unwrap();
        raw.apply_override("run.method = series").unwrap(); // whitespace around '=' is fine
        let cfg = LoadedConfig::build(raw).unwrap();
        assert_eq!(cfg.band.spectral_intensity(), 2.5);
        assert_eq!(cfg.method, Method::Series);
        let mut raw = parse(MINIMAL_BAND).unwrap();
        assert!(raw.apply_override("band.bogus=1").is_err());
        assert!(raw.apply_override("no_equals").is_err());
    }

    #[test]
    fn reflectivity_forms_parse_to_their_specs() {
        let text = format!(
            "{MINIMAL_BAND}[cavity]\nrefl_a = perfect\nrefl_b = constant 0.8\n[sphere_plane]\nradius_m = 0.2\nrefl_sphere = pressure-release\nrefl_plane = constant 0.5 -0.1\n"
        );
        let cfg = LoadedConfig::build(parse(&text).unwrap()).unwrap();
        assert_eq!(cfg.refl_a.unwrap().spec, ReflectivitySpec::PerfectReflector);
        let b = cfg.refl_b.unwrap();
        assert_eq!(b.spec, ReflectivitySpec::Constant(Complex64::new(0.8, 0.0)));
        assert_eq!(b.echo, "constant 0.8");
        assert_eq!(cfg.refl_sphere.unwrap().spec, ReflectivitySpec::PressureRelease);
        let plane = cfg.refl_plane.unwrap();
        assert_eq!(plane.spec, ReflectivitySpec::Constant(Complex64::new(0.5, -0.1)));
        assert_eq!(plane.echo, "constant 0.5 -0.1");
    }

    #[test]
    fn active_constants_and_unknown_forms_are_config_errors() {
        let text = format!("{MINIMAL_BAND}[cavity]\nrefl_a = constant 1.2\n");
        let err = LoadedConfig::build(parse(&text).unwrap()).unwrap_err();
        assert!(err.message.contains("exceeds 1"), "{err}");
        let text = format!("{MINIMAL_BAND}[cavity]\nrefl_a = mirror\n");
        let err = LoadedConfig::build(parse(&text).unwrap()).unwrap_err();
        assert!(err.message.contains("unknown reflectivity form"), "{err}");
    }

    #[test]
    fn tables_resolve_relative_to_the_config_and_echo_absolute() {
        let dir = tempfile::tempdir().unwrap();
        let table_path = dir.path().join("panel.txt");
        let mut table = fs::File::create(&table_path).unwrap();
        writeln!(table, "omega_rad_per_s, re_r, im_r\n100 0.9 0\n300 0.7 0").unwrap();
        let config_path = dir.path().join("run.conf");
        let text = format!("{MINIMAL_BAND}[cavity]\nrefl_a = table panel.txt\n");
        fs::write(&config_path, &text).unwrap();
        let cfg = LoadedConfig::build(RawConfig::load(&config_path).unwrap()).unwrap();
        let refl = cfg.refl_a.unwrap();
        assert_eq!(refl.echo, format!("table {}", table_path.display()));
        assert!(matches!(refl.spec, ReflectivitySpec::Table(_)));
    }

    #[test]
    fn table_passivity_violations_name_the_offending_row() {
        let dir = tempfile::tempdir().unwrap();
        let table_path = dir.path().join("active.txt");
        fs::write(&table_path, "omega_rad_per_s, re_r, im_r\n100 0.9 0\n300 1.2 0\n").unwrap();
        let config_path = dir.path().join("run.conf");
        fs::write(&config_path, format!("{MINIMAL_BAND}[cavity]\nrefl_a = table active.txt\n"))
            .unwrap();
        let err = LoadedConfig::build(RawConfig::load(&config_path).unwrap()).unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.file.ends_with("active.txt"), "{err}");
        assert!(err.message.contains("1.2"), "{err}");
    }

    #[test]
    fn effective_configuration_round_trips_through_the_grammar() {
        let band = NoiseBand::new(31415.926535897932, 94247.77960769379, 1.0, 343.0).unwrap();
        let sweep = SweepGrid { l_min: 0.01, l_max: 0.1, points: 46, spacing: Spacing::Linear };
        let settings = QuadratureSettings::default();
        let effective = Effective {
            band: &band,
            cavity: Some(EffectiveCavity {
                separation: None,
                refl_a: "constant 0.8",
                refl_b: "constant 0.8",
            }),
            sphere: None,
            sweep: Some(&sweep),
            dos_points: None,
            settings: &settings,
            method: Method::Series,
            out: Path::new("/tmp/out.csv"),
        };
        let text = serialize_effective(&effective);
        let cfg = LoadedConfig::build(RawConfig::parse(&text, Path::new("sidecar.conf")).unwrap())
            .unwrap();
        assert_eq!(cfg.band.omega_lo(), band.omega_lo());
        assert_eq!(cfg.band.omega_hi(), band.omega_hi());
        assert_eq!(cfg.refl_a.unwrap().echo, "constant 0.8");
        assert_eq!(cfg.sweep.unwrap(), sweep);
        assert_eq!(cfg.settings, settings);
        assert_eq!(cfg.method, Method::Series);
        assert_eq!(cfg.out.unwrap(), PathBuf::from("/tmp/out.csv"));
        // serializing the reparsed config is byte-stable
        let again = serialize_effective(&Effective {
            band: &cfg.band,
            cavity: Some(EffectiveCavity {
                separation: None,
                refl_a: "constant 0.8",
                refl_b: "constant 0.8",
            }),
            sphere: None,
            sweep: Some(&sweep),
            dos_points: None,
            settings: &cfg.settings,
            method: cfg.method,
            out: Path::new("/tmp/out.csv"),
        });
        assert_eq!(text, again);
    }
}
