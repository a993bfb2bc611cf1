//! Shared domain types and conventions.
//!
//! Units are SI throughout. The spectral intensity is defined per unit angular
//! frequency, so integrating it over the band gives total intensity in W/m^2.
//! Sign convention for every force and pressure in this crate: positive =
//! repulsive (surfaces pushed apart), negative = attractive.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::reflectivity::ReflectivitySpec;

/// Band-limited broadband noise field of constant spectral intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBand {
    omega_lo: f64,
    omega_hi: f64,
    spectral_intensity: f64,
    sound_speed: f64,
}

impl NoiseBand {
    /// Build a band from its edge angular frequencies (rad/s), spectral
    /// intensity I (W*s/m^2), and sound speed c (m/s).
    ///
    /// Requires 0 <= omega_lo < omega_hi, I > 0, c > 0, all finite.
    pub fn new(
        omega_lo: f64,
        omega_hi: f64,
        spectral_intensity: f64,
        sound_speed: f64,
    ) -> Result<Self> {
        let fail = |reason: String| Error::InvalidInput {
            name: "noise band",
            reason,
        };
        for (label, v) in [
            ("omega_lo", omega_lo),
            ("omega_hi", omega_hi),
            ("spectral_intensity", spectral_intensity),
            ("sound_speed", sound_speed),
        ] {
            if !v.is_finite() {
                return Err(fail(format!("{label} = {v} is not finite")));
            }
        }
        if !(0.0 <= omega_lo && omega_lo < omega_hi) {
            return Err(fail(format!(
                "band edges must satisfy 0 <= omega_lo < omega_hi (got [{omega_lo}, {omega_hi}])"
            )));
        }
        if spectral_intensity <= 0.0 {
            return Err(fail(format!(
                "spectral_intensity must be positive (got {spectral_intensity})"
            )));
        }
        if sound_speed <= 0.0 {
            return Err(fail(format!(
                "sound_speed must be positive (got {sound_speed})"
            )));
        }
        Ok(Self {
            omega_lo,
            omega_hi,
            spectral_intensity,
            sound_speed,
        })
    }

    pub fn omega_lo(&self) -> f64 {
        self.omega_lo
    }

    pub fn omega_hi(&self) -> f64 {
        self.omega_hi
    }

    pub fn spectral_intensity(&self) -> f64 {
        self.spectral_intensity
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    /// Lower band-edge wavenumber omega_lo / c (rad/m).
    pub fn k_lo(&self) -> f64 {
        self.omega_lo / self.sound_speed
    }

    /// Upper band-edge wavenumber omega_hi / c (rad/m).
    pub fn k_hi(&self) -> f64 {
        self.omega_hi / self.sound_speed
    }
}

/// Two parallel plates: separation plus a reflectivity spec per plate.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    separation: f64,
    refl_a: ReflectivitySpec,
    refl_b: ReflectivitySpec,
}

impl CavityConfig {
    /// Requires a positive, finite separation (m).
    pub fn new(separation: f64, refl_a: ReflectivitySpec, refl_b: ReflectivitySpec) -> Result<Self> {
        if !(separation.is_finite() && separation > 0.0) {
            return Err(Error::InvalidInput {
                name: "cavity",
                reason: format!("separation must be positive and finite (got {separation})"),
            });
        }
        Ok(Self {
            separation,
            refl_a,
            refl_b,
        })
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn refl_a(&self) -> &ReflectivitySpec {
        &self.refl_a
    }

    pub fn refl_b(&self) -> &ReflectivitySpec {
        &self.refl_b
    }
}

/// Sphere of radius R above a plane, at closest gap L.
///
/// The proximity approximation behind [`crate::pressure::sphere_plane_force`]
/// assumes L/R < 1; larger gaps still compute but carry a validity warning.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePlaneConfig {
    radius: f64,
    closest_gap: f64,
    refl_sphere: ReflectivitySpec,
    refl_plane: ReflectivitySpec,
}

impl SpherePlaneConfig {
    /// Requires positive, finite radius and gap (m).
    pub fn new(
        radius: f64,
        closest_gap: f64,
        refl_sphere: ReflectivitySpec,
        refl_plane: ReflectivitySpec,
    ) -> Result<Self> {
        let fail = |reason: String| Error::InvalidInput {
            name: "sphere-plane geometry",
            reason,
        };
        if !(radius.is_finite() && radius > 0.0) {
            return Err(fail(format!("radius must be positive and finite (got {radius})")));
        }
        if !(closest_gap.is_finite() && closest_gap > 0.0) {
            return Err(fail(format!(
                "closest gap must be positive and finite (got {closest_gap})"
            )));
        }
        Ok(Self {
            radius,
            closest_gap,
            refl_sphere,
            refl_plane,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn closest_gap(&self) -> f64 {
        self.closest_gap
    }

    pub fn refl_sphere(&self) -> &ReflectivitySpec {
        &self.refl_sphere
    }

    pub fn refl_plane(&self) -> &ReflectivitySpec {
        &self.refl_plane
    }
}

/// Tolerances and budgets for the integration engines.
///
/// Plain knobs, freely adjustable; every computation validates them on entry.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSettings {
    /// Relative tolerance on each integral.
    pub rel_tol: f64,
    /// Absolute tolerance, in the units of the integral.
    pub abs_tol: f64,
    /// Total panel budget per 1D integration run.
    pub max_subdivisions: usize,
    /// Minimum initial panels per 2*pi of the supplied oscillation scale.
    pub min_panels_per_oscillation: usize,
    /// Hard cap on geometric-series terms.
    pub series_max_terms: usize,
    /// Series truncation: stop once the remaining tail bound drops below this.
    pub series_tail_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            min_panels_per_oscillation: 4,
            series_max_terms: 2000,
            series_tail_tol: 1e-10,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidInput {
            name: "quadrature settings",
            reason,
        };
        for (label, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("series_tail_tol", self.series_tail_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(fail(format!("{label} must be positive and finite (got {v})")));
            }
        }
        for (label, n) in [
            ("max_subdivisions", self.max_subdivisions),
            ("min_panels_per_oscillation", self.min_panels_per_oscillation),
            ("series_max_terms", self.series_max_terms),
        ] {
            if n < 1 {
                return Err(fail(format!("{label} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Which evaluation route produced a force result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Direct adaptive quadrature of the resonance kernel.
    Adaptive,
    /// Geometric-series expansion with closed-form trigonometric moments.
    Series,
    /// Analytic delta-comb sum; perfect reflectors only.
    ModeSum,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Adaptive => "adaptive",
            Method::Series => "series",
            Method::ModeSum => "mode-sum",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "adaptive" => Ok(Method::Adaptive),
            "series" => Ok(Method::Series),
            "mode-sum" => Ok(Method::ModeSum),
            other => Err(format!(
                "unknown method {other:?}; expected adaptive, series, or mode-sum"
            )),
        }
    }
}

/// A computed scalar with its numerical provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceResult {
    /// Pa for plate-plate forces and pressures, N for the sphere-plane force,
    /// J/m^2 when returned by [`crate::pressure::free_energy`].
    pub value: f64,
    /// Nonnegative estimate of the numerical error, same units as `value`.
    pub error_estimate: f64,
    /// Code path that produced the value.
    pub method: Method,
    /// Number of integrand (or series-term-sum) evaluations spent.
    pub evaluations: usize,
    /// Non-fatal caveats: quadrature non-convergence, validity limits, etc.
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reflectivity::ReflectivitySpec;

    #[test]
    fn band_constructor_enforces_ordering_and_positivity() {
        assert!(NoiseBand::new(0.0, 343.0, 1.0, 343.0).is_ok());
        assert!(NoiseBand::new(100.0, 100.0, 1.0, 343.0).is_err(), "zero-width band");
        assert!(NoiseBand::new(200.0, 100.0, 1.0, 343.0).is_err(), "inverted band");
        assert!(NoiseBand::new(-1.0, 100.0, 1.0, 343.0).is_err(), "negative edge");
        assert!(NoiseBand::new(0.0, 100.0, 0.0, 343.0).is_err(), "zero intensity");
        assert!(NoiseBand::new(0.0, 100.0, 1.0, -2.0).is_err(), "negative speed");
        assert!(NoiseBand::new(0.0, f64::INFINITY, 1.0, 343.0).is_err(), "non-finite edge");
    }

    #[test]
    fn band_wavenumbers_are_omega_over_c() {
        let band = NoiseBand::new(686.0, 1029.0, 2.0, 343.0).unwrap();
        assert_eq!(band.k_lo(), 2.0);
        assert_eq!(band.k_hi(), 3.0);
    }

    #[test]
    fn cavity_rejects_nonpositive_separation() {
        let r = ReflectivitySpec::PerfectReflector;
        assert!(CavityConfig::new(0.0, r.clone(), r.clone()).is_err());
        assert!(CavityConfig::new(-0.1, r.clone(), r.clone()).is_err());
        assert!(CavityConfig::new(0.05, r.clone(), r).is_ok());
    }

    #[test]
    fn sphere_plane_requires_positive_radius_and_gap() {
        let r = ReflectivitySpec::PerfectReflector;
        assert!(SpherePlaneConfig::new(0.2, 0.01, r.clone(), r.clone()).is_ok());
        assert!(SpherePlaneConfig::new(0.0, 0.01, r.clone(), r.clone()).is_err());
        assert!(SpherePlaneConfig::new(0.2, 0.0, r.clone(), r).is_err());
    }

    #[test]
    fn settings_validation_catches_bad_knobs() {
        let good = QuadratureSettings::default();
        assert!(good.validate().is_ok());
        let mut s = good.clone();
        s.rel_tol = 0.0;
        assert!(s.validate().is_err());
        let mut s = good.clone();
        s.abs_tol = f64::NAN;
        assert!(s.validate().is_err());
        let mut s = good;
        s.max_subdivisions = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [Method::Adaptive, Method::Series, Method::ModeSum] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("midpoint".parse::<Method>().is_err());
    }
}
