//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid {name}: {reason}")]
    InvalidInput { name: &'static str, reason: String },

    /// A reflectivity table was queried outside its sampled frequency range.
    #[error("reflectivity query at {omega} rad/s outside table range [{lo}, {hi}] rad/s")]
    OutOfTableRange { omega: f64, lo: f64, hi: f64 },

    /// A reflectivity sample has |r| > 1. `line` is the 1-based physical line
    /// in the source text when the table was read from delimited input, or the
    /// 1-based sample index when built from values.
    #[error("reflectivity table line {line}: |r| = {modulus} exceeds 1; surfaces must be passive")]
    PassivityViolation { line: usize, modulus: f64 },

    /// The Fabry-Perot denominator 1 - r1*r2*exp(2i*k_z*L) is numerically zero.
    #[error("resonance pole at k_z = {k_z} rad/m: |1 - r1 r2 exp(2i k_z L)| = {denominator:e}")]
    ResonancePole { k_z: f64, denominator: f64 },

    /// An integrand produced NaN or infinity at a quadrature node.
    #[error("integrand returned a non-finite value at {location}")]
    NonFiniteIntegrand { location: String },

    /// The reflectivity product exceeds unit modulus somewhere in the band.
    #[error("reflectivity modulus {sup_modulus} exceeds 1 in the band; surfaces must be passive")]
    NotPassive { sup_modulus: f64 },

    /// The operation needs sup |r1 r2| strictly below 1 across the band.
    #[error("|r1 r2| reaches {sup_modulus} in the band; this operation requires a strictly passive cavity (rigid-rigid cavities use the mode-sum path)")]
    NotStrictlyPassive { sup_modulus: f64 },

    /// The geometric-series method diverges at unit product modulus.
    #[error("series method requires sup |r1 r2| < 1 in the band (found {sup_modulus})")]
    SeriesNotApplicable { sup_modulus: f64 },

    /// The series closed forms assume a real geometric ratio; each plate must
    /// be real-valued across the band (complex reflectivities take the
    /// adaptive path).
    #[error("series method requires real plate reflectivities; found Im r = {im:e} at omega = {omega} rad/s")]
    SeriesRequiresReal { omega: f64, im: f64 },

    /// Method::ModeSum is the analytic delta-comb evaluation; it only exists
    /// for two perfect reflectors.
    #[error("mode-sum method requires two perfect reflectors; use the adaptive or series method")]
    ModeSumRequiresPerfect,
}
