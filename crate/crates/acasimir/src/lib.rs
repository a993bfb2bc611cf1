//! Acoustic analogue of the Casimir force for band-limited broadband noise.
//!
//! Two parallel plates immersed in isotropic acoustic noise screen part of
//! the sound spectrum from the gap between them. The mismatch between the
//! radiation pressure of the free continuum outside and the reshaped density
//! of modes inside yields a net force per unit area that oscillates with
//! separation, attracts at some distances, repels at others, and depends on
//! the plates' complex reflection coefficients. This crate computes that
//! force, the underlying mode density and cavity free energy, and the force
//! on a sphere above a plate via the proximity approximation.
//!
//! Conventions: SI units throughout; forces are per unit plate area (Pa)
//! between plates and total (N) for the sphere, with positive values pushing
//! the surfaces apart; the noise band is specified by angular frequencies
//! and its spectral intensity, and reflectivities depend on frequency only.
//!
//! Three routes compute the plate-plate force, cross-checking one another:
//! adaptive quadrature of a resonance kernel over wavenumber and direction
//! cosine (any passive reflectivity), a round-trip series in closed-form
//! trigonometric moments (real, strictly passive reflectivities), and an
//! exact mode sum (perfect reflectors).

pub mod error;
pub mod modes;
pub mod pressure;
pub mod quadrature;
pub mod reflectivity;
pub mod types;

pub use error::{Error, Result};
pub use modes::{
    density_scan, greens_function, mode_density_closed, mode_density_from_green, ModeDensityPoint,
};
pub use pressure::{
    casimir_force, casimir_force_perfect, force_sweep, free_energy, pressure_inside,
    pressure_outside, sphere_plane_force, sphere_plane_sweep, SweepResult, SweepRow,
};
pub use quadrature::{adaptive_1d, adaptive_2d, trig_moment, IntegrationReport, TrigMoment};
pub use reflectivity::{eval_reflectivity, ReflectivitySpec, ReflectivityTable};
pub use types::{
    CavityConfig, ForceResult, Method, NoiseBand, QuadratureSettings, SpherePlaneConfig,
};
