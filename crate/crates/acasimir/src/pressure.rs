//! Radiation pressures and the acoustic force between surfaces in band noise.
//!
//! Isotropic broadband noise of spectral intensity I over the wavenumber
//! band [k1, k2] pushes on both faces of each plate. Outside the cavity the
//! mode continuum is free; inside, the density of modes is reshaped by the
//! round-trip amplitude x = r1 r2 e^{2 i k L u} (u the direction cosine).
//! The net force per unit area is
//!
//!   f = P_in - P_out = (I / pi) int_{k1}^{k2} dk int_0^1 du u^2 Re[x / (1 - x)],
//!
//! positive f pushing the plates apart. Three routes compute it: direct 2D
//! quadrature of the resonance kernel (any passive reflectivity), a
//! round-trip expansion in closed-form trigonometric moments (real, strictly
//! passive reflectivities), and an exact mode sum (perfect reflectors).
//! The cavity free energy per unit area feeds the sphere-plane force through
//! the proximity (Derjaguin) approximation.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::one_minus_x_norm_sqr;
use crate::quadrature::{adaptive_1d, adaptive_2d, trig_moment, IntegrationReport, TrigMoment};
use crate::reflectivity::{
    constant_value, eval_reflectivity, first_nonreal_in_band, sup_modulus_in_band,
    ReflectivitySpec, PASSIVITY_SLACK,
};
use crate::types::{
    CavityConfig, ForceResult, Method, NoiseBand, QuadratureSettings, SpherePlaneConfig,
};

/// Reflectivity products this close to the unit circle are treated as
/// lossless: quantities that diverge there are refused, and the broadband
/// integrals switch to the almost-everywhere limit with a warning.
pub const UNIMODULAR_EPS: f64 = 1e-12;

/// Pointwise pin threshold for the resonance kernel: within this distance of
/// the unit circle the kernel takes its almost-everywhere limit -1/2.
const KERNEL_PIN_EPS: f64 = 1e-14;

/// One separation of a force sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Plate separation or sphere-plane gap (m).
    pub separation: f64,
    /// Force at this separation (Pa plate-plate, N sphere-plane); NaN if the
    /// point was skipped.
    pub value: f64,
    /// Estimated absolute error of `value`.
    pub error_estimate: f64,
    /// Computation route used.
    pub method: Method,
    /// Per-point diagnostics.
    pub warnings: Vec<String>,
}

/// A force-versus-separation sweep with its sign-change bracketing.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Consecutive separations (lo, hi) between which the force crosses zero.
    pub sign_changes: Vec<(f64, f64)>,
}

/// Re[x / (1 - x)] for x = rho e^{i theta}, arranged without cancellation.
///
/// Numerator and denominator are grouped so the near-resonance regime
/// (|rho| -> 1, theta -> 0) is computed from the detuning directly:
///
///   Re[x/(1-x)] = [(a - |rho|^2) - 2 a sin^2(theta/2) - b sin theta]
///                 / [(1-a)^2 + b^2 + 4 a sin^2(theta/2) + 2 b sin theta].
///
/// On the unit circle the value is -1/2 for every theta except the discrete
/// resonances (a set of measure zero in the band integrals), so unimodular
/// products are pinned to -1/2 outright.
pub(crate) fn resonance_kernel(rho: Complex64, theta: f64) -> f64 {
    if rho.norm() >= 1.0 - KERNEL_PIN_EPS {
        return -0.5;
    }
    let (a, b) = (rho.re, rho.im);
    let s_half = (0.5 * theta).sin();
    let numerator = (a - rho.norm_sqr()) - 2.0 * a * s_half * s_half - b * theta.sin();
    numerator / one_minus_x_norm_sqr(rho, theta)
}

/// Radiation pressure on the outer face of either plate (Pa).
///
/// The free continuum over the band exerts P_out = I (k2 - k1) / (6 pi);
/// the 1/6 is the direction-cosine moment of the normal momentum flux.
pub fn pressure_outside(band: &NoiseBand) -> f64 {
    band.spectral_intensity() * (band.k_hi() - band.k_lo()) / (6.0 * PI)
}

/// Evaluates the two walls' reflectivity product along the band, funneling
/// evaluation failures out of the quadrature as NaN samples so the first
/// underlying error (not the generic non-finite report) reaches the caller.
struct PairEval<'a> {
    sound_speed: f64,
    refl_a: &'a ReflectivitySpec,
    refl_b: &'a ReflectivitySpec,
    failure: RefCell<Option<Error>>,
}

impl<'a> PairEval<'a> {
    fn new(band: &NoiseBand, cavity: &'a CavityConfig) -> Self {
        Self {
            sound_speed: band.sound_speed(),
            refl_a: cavity.refl_a(),
            refl_b: cavity.refl_b(),
            failure: RefCell::new(None),
        }
    }

    fn rho(&self, k: f64) -> Option<Complex64> {
        let omega = self.sound_speed * k;
        match (
            eval_reflectivity(self.refl_a, omega),
            eval_reflectivity(self.refl_b, omega),
        ) {
            (Ok(r1), Ok(r2)) => Some(r1 * r2),
            (Err(err), _) | (_, Err(err)) => {
                let mut slot = self.failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(err);
                }
                None
            }
        }
    }

    fn unpoison(&self, report: Result<IntegrationReport>) -> Result<IntegrationReport> {
        if let Some(err) = self.failure.borrow_mut().take() {
            return Err(err);
        }
        report
    }
}

/// Largest in-band |r1| |r2|, rejecting any wall that is outright active.
/// The product bound is conservative: the two suprema need not occur at the
/// same frequency.
fn band_sup_product(
    band: &NoiseBand,
    refl_a: &ReflectivitySpec,
    refl_b: &ReflectivitySpec,
) -> Result<f64> {
    let mut product = 1.0;
    for spec in [refl_a, refl_b] {
        let sup = sup_modulus_in_band(spec, band.omega_lo(), band.omega_hi())?;
        if sup > 1.0 + PASSIVITY_SLACK {
            return Err(Error::NotPassive { sup_modulus: sup });
        }
        product *= sup;
    }
    Ok(product)
}

fn finish(report: IntegrationReport, method: Method, mut warnings: Vec<String>) -> ForceResult {
    if !report.converged {
        warnings.push(format!(
            "quadrature did not reach the requested tolerance (error estimate {:.3e})",
            report.error_estimate
        ));
    }
    ForceResult {
        value: report.value,
        error_estimate: report.error_estimate,
        method,
        evaluations: report.evaluations,
        warnings,
    }
}

/// Radiation pressure on the inner faces (Pa): P_in = (I/2) int dk int du u^2 D.
///
/// Requires the reflectivity product to stay strictly inside the unit circle
/// (else the mode density degenerates into discrete lines and the integral
/// is meaningless), with one exception: a constant product of exactly -1
/// makes the density vanish identically, so P_in = 0 without quadrature.
pub fn pressure_inside(
    band: &NoiseBand,
    cavity: &CavityConfig,
    settings: &QuadratureSettings,
) -> Result<ForceResult> {
    if let (Some(ra), Some(rb)) = (constant_value(cavity.refl_a()), constant_value(cavity.refl_b()))
    {
        if ra * rb == Complex64::new(-1.0, 0.0) {
            return Ok(ForceResult {
                value: 0.0,
                error_estimate: 0.0,
                method: Method::Adaptive,
                evaluations: 0,
                warnings: Vec::new(),
            });
        }
    }
    let sup = band_sup_product(band, cavity.refl_a(), cavity.refl_b())?;
    if sup >= 1.0 - UNIMODULAR_EPS {
        return Err(Error::NotStrictlyPassive { sup_modulus: sup });
    }

    let intensity = band.spectral_intensity();
    let separation = cavity.separation();
    let pair = PairEval::new(band, cavity);
    // strictly passive, so the Poisson denominator is bounded away from zero
    let integrand = |k: f64, u: f64| -> f64 {
        let Some(rho) = pair.rho(k) else { return f64::NAN };
        let theta = 2.0 * k * separation * u;
        let density = (1.0 - rho.norm_sqr()) / (PI * one_minus_x_norm_sqr(rho, theta));
        0.5 * intensity * density * u * u
    };
    let report = pair.unpoison(adaptive_2d(
        integrand,
        (band.k_lo(), band.k_hi()),
        (0.0, 1.0),
        (Some(2.0 * separation), Some(2.0 * band.k_hi() * separation)),
        settings,
    ))?;
    Ok(finish(report, Method::Adaptive, Vec::new()))
}

/// Net force per unit plate area (Pa), positive pushing the plates apart.
///
/// Dispatches on `method`: [`Method::Adaptive`] integrates the resonance
/// kernel over the band for any passive reflectivities; [`Method::Series`]
/// expands in round trips, requiring real and strictly passive
/// reflectivities; [`Method::ModeSum`] is exact for perfect reflectors only.
pub fn casimir_force(
    band: &NoiseBand,
    cavity: &CavityConfig,
    method: Method,
    settings: &QuadratureSettings,
) -> Result<ForceResult> {
    match method {
        Method::Adaptive => force_adaptive(band, cavity, settings),
        Method::Series => force_series(band, cavity, settings),
        Method::ModeSum => {
            let rigid = |spec: &ReflectivitySpec| {
                constant_value(spec) == Some(Complex64::new(1.0, 0.0))
            };
            if rigid(cavity.refl_a()) && rigid(cavity.refl_b()) {
                Ok(casimir_force_perfect(band, cavity.separation()))
            } else {
                Err(Error::ModeSumRequiresPerfect)
            }
        }
    }
}

fn force_adaptive(
    band: &NoiseBand,
    cavity: &CavityConfig,
    settings: &QuadratureSettings,
) -> Result<ForceResult> {
    let sup = band_sup_product(band, cavity.refl_a(), cavity.refl_b())?;
    let mut warnings = Vec::new();
    if sup >= 1.0 - UNIMODULAR_EPS {
        warnings.push(
            "reflectivity product reaches the unit circle in-band; discrete cavity \
             resonances (zero measure) are excluded from the broadband integral"
                .to_string(),
        );
    }

    let intensity = band.spectral_intensity();
    let separation = cavity.separation();
    let pair = PairEval::new(band, cavity);
    let integrand = |k: f64, u: f64| -> f64 {
        let Some(rho) = pair.rho(k) else { return f64::NAN };
        intensity / PI * u * u * resonance_kernel(rho, 2.0 * k * separation * u)
    };
    let report = pair.unpoison(adaptive_2d(
        integrand,
        (band.k_lo(), band.k_hi()),
        (0.0, 1.0),
        (Some(2.0 * separation), Some(2.0 * band.k_hi() * separation)),
        settings,
    ))?;
    Ok(finish(report, Method::Adaptive, warnings))
}

/// Upper bound on the neglected round trips: |M2c| <= 1/3 turns the
/// geometric tail after `terms` round trips into sup^(terms+1) / (3 (1-sup)),
/// a bound on the dimensionless k-integrand.
fn series_tail_bound(sup: f64, terms: usize) -> f64 {
    sup.powi(terms as i32 + 1) / (3.0 * (1.0 - sup))
}

fn force_series(
    band: &NoiseBand,
    cavity: &CavityConfig,
    settings: &QuadratureSettings,
) -> Result<ForceResult> {
    settings.validate()?;
    for spec in [cavity.refl_a(), cavity.refl_b()] {
        if let Some((omega, im)) = first_nonreal_in_band(spec, band.omega_lo(), band.omega_hi())? {
            return Err(Error::SeriesRequiresReal { omega, im });
        }
    }
    let sup = band_sup_product(band, cavity.refl_a(), cavity.refl_b())?;
    if sup >= 1.0 - UNIMODULAR_EPS {
        return Err(Error::SeriesNotApplicable { sup_modulus: sup });
    }

    let mut terms = 1usize;
    while series_tail_bound(sup, terms) >= settings.series_tail_tol
        && terms < settings.series_max_terms
    {
        terms += 1;
    }
    let tail = series_tail_bound(sup, terms);
    let mut warnings = Vec::new();
    if tail >= settings.series_tail_tol {
        warnings.push(format!(
            "round-trip series capped at {terms} terms; neglected tail bounded by {tail:.3e}"
        ));
    }
    // round trips beyond half weight are exponentially suppressed; resolving
    // their oscillation in the initial grid buys nothing
    let half_weight_horizon = if sup > 0.0 {
        ((std::f64::consts::LN_2 / -sup.ln()).ceil() as usize).clamp(1, 64)
    } else {
        1
    }
    .min(terms);

    let intensity = band.spectral_intensity();
    let separation = cavity.separation();
    let pair = PairEval::new(band, cavity);
    let integrand = |k: f64| -> f64 {
        let Some(rho) = pair.rho(k) else { return f64::NAN };
        let mut sum = 0.0;
        let mut power = 1.0;
        for n in 1..=terms {
            power *= rho.re;
            if power == 0.0 {
                break;
            }
            sum += power * trig_moment(TrigMoment::M2c, 2.0 * n as f64 * k * separation);
        }
        intensity / PI * sum
    };
    let report = pair.unpoison(adaptive_1d(
        integrand,
        band.k_lo(),
        band.k_hi(),
        Some(2.0 * separation * half_weight_horizon as f64),
        settings,
    ))?;
    let mut result = finish(report, Method::Series, warnings);
    result.error_estimate += intensity / PI * (band.k_hi() - band.k_lo()) * tail;
    Ok(result)
}

/// Exact force per unit area between perfect reflectors (Pa).
///
/// Rigid walls quantize k_z at multiples of k0 = pi / L; each mode carries
/// the in-band part of its direction-cosine annulus, giving
///
///   P_in = (I k0 / 4 pi) sum_{n=1}^{floor(k2/k0)} n^2 k0^2
///          [1 / max(n^2 k0^2, k1^2) - 1 / k2^2]
///
/// (modes below k1 still contribute through the annulus clipped at k1). The
/// result is exact up to roundoff; over a full dense band the force tends to
/// -I (1 + 1/(3 N)) / (8 L) with N modes in band.
pub fn casimir_force_perfect(band: &NoiseBand, separation: f64) -> ForceResult {
    assert!(
        separation.is_finite() && separation > 0.0,
        "separation must be positive and finite"
    );
    let k0 = PI / separation;
    let (k_lo, k_hi) = (band.k_lo(), band.k_hi());
    let n_max = (k_hi / k0).floor() as usize;
    let mut modes = 0.0;
    for n in 1..=n_max {
        let kn_sqr = (n as f64 * k0) * (n as f64 * k0);
        modes += kn_sqr * (1.0 / kn_sqr.max(k_lo * k_lo) - 1.0 / (k_hi * k_hi));
    }
    let inside = band.spectral_intensity() * k0 / (4.0 * PI) * modes;
    ForceResult {
        value: inside - pressure_outside(band),
        error_estimate: 0.0,
        method: Method::ModeSum,
        evaluations: n_max,
        warnings: Vec::new(),
    }
}

/// Cavity free energy per unit plate area (J/m^2), the quantity whose
/// negative separation-derivative is the force.
///
/// E = (I / 2 pi) int_{k1}^{k2} (dk / k) int_0^1 du u Im ln(1 - x), with
/// Im ln(1 - x) = atan2(-Im x, 1 - Re x). Strictly passive products only:
/// on the unit circle the energy integral develops divergent resonance
/// lines (no pressure-release exception here). The band must not reach down
/// to zero frequency, where the 1/k weight makes dispersive-wall energies
/// infrared-divergent.
pub fn free_energy(
    band: &NoiseBand,
    cavity: &CavityConfig,
    settings: &QuadratureSettings,
) -> Result<ForceResult> {
    if band.omega_lo() <= 0.0 {
        return Err(Error::InvalidInput {
            name: "band",
            reason: "free energy requires omega_lo > 0".to_string(),
        });
    }
    let sup = band_sup_product(band, cavity.refl_a(), cavity.refl_b())?;
    if sup >= 1.0 - UNIMODULAR_EPS {
        return Err(Error::NotStrictlyPassive { sup_modulus: sup });
    }

    let intensity = band.spectral_intensity();
    let separation = cavity.separation();
    let pair = PairEval::new(band, cavity);
    let integrand = |k: f64, u: f64| -> f64 {
        let Some(rho) = pair.rho(k) else { return f64::NAN };
        let theta = 2.0 * k * separation * u;
        let (sin_t, cos_t) = theta.sin_cos();
        let re_x = rho.re * cos_t - rho.im * sin_t;
        let im_x = rho.re * sin_t + rho.im * cos_t;
        intensity / (2.0 * PI) * u / k * (-im_x).atan2(1.0 - re_x)
    };
    let report = pair.unpoison(adaptive_2d(
        integrand,
        (band.k_lo(), band.k_hi()),
        (0.0, 1.0),
        (Some(2.0 * separation), Some(2.0 * band.k_hi() * separation)),
        settings,
    ))?;
    Ok(finish(report, Method::Adaptive, Vec::new()))
}

/// Force on a sphere above a plate (N) in the proximity approximation.
///
/// For gap << radius the curved surface integrates the plate-plate free
/// energy over its local separations, giving F = 2 pi R E(gap). Negative
/// values pull the sphere toward the plate. A warning is attached when the
/// gap is not small against the radius.
pub fn sphere_plane_force(
    band: &NoiseBand,
    config: &SpherePlaneConfig,
    settings: &QuadratureSettings,
) -> Result<ForceResult> {
    let cavity = CavityConfig::new(
        config.closest_gap(),
        config.refl_sphere().clone(),
        config.refl_plane().clone(),
    )?;
    let energy = free_energy(band, &cavity, settings)?;
    let scale = 2.0 * PI * config.radius();
    let mut warnings = energy.warnings;
    let ratio = config.closest_gap() / config.radius();
    if ratio >= 1.0 {
        warnings.push(format!(
            "gap/radius = {ratio:.3} is outside the proximity approximation's \
             validity (requires gap << radius)"
        ));
    }
    Ok(ForceResult {
        value: scale * energy.value,
        error_estimate: scale * energy.error_estimate,
        method: Method::Adaptive,
        evaluations: energy.evaluations,
        warnings,
    })
}

fn sweep_over(
    separations: &[f64],
    requested: Method,
    compute: impl Fn(f64) -> Result<ForceResult>,
) -> Result<SweepResult> {
    if separations.is_empty() {
        return Err(Error::InvalidInput {
            name: "separations",
            reason: "need at least one separation".to_string(),
        });
    }
    for (i, &sep) in separations.iter().enumerate() {
        if !(sep.is_finite() && sep > 0.0) {
            return Err(Error::InvalidInput {
                name: "separations",
                reason: format!("separation {sep} at index {i} must be positive and finite"),
            });
        }
        if i > 0 && separations[i - 1] >= sep {
            return Err(Error::InvalidInput {
                name: "separations",
                reason: format!(
                    "separations must be strictly increasing ({} then {sep})",
                    separations[i - 1]
                ),
            });
        }
    }
    let mut rows = Vec::with_capacity(separations.len());
    for &separation in separations {
        match compute(separation) {
            Ok(result) => rows.push(SweepRow {
                separation,
                value: result.value,
                error_estimate: result.error_estimate,
                method: result.method,
                warnings: result.warnings,
            }),
            // localized numerical failures skip the point; anything else
            // would fail every point the same way, so it fails the sweep
            Err(err @ (Error::ResonancePole { .. } | Error::NonFiniteIntegrand { .. })) => {
                rows.push(SweepRow {
                    separation,
                    value: f64::NAN,
                    error_estimate: f64::NAN,
                    method: requested,
                    warnings: vec![format!("skipped: {err}")],
                })
            }
            Err(fatal) => return Err(fatal),
        }
    }
    let mut sign_changes = Vec::new();
    for pair in rows.windows(2) {
        let (p, q) = (&pair[0], &pair[1]);
        let crossing = p.value.is_finite()
            && q.value.is_finite()
            && p.value != 0.0
            && q.value != 0.0
            && (p.value < 0.0) != (q.value < 0.0);
        if crossing {
            sign_changes.push((p.separation, q.separation));
        }
    }
    Ok(SweepResult { rows, sign_changes })
}

/// Plate-plate force at each separation of a strictly increasing grid.
///
/// Separation-local numerical failures (resonance poles, non-finite
/// samples) yield NaN rows carrying the diagnostic; configuration errors
/// abort the sweep. Zero crossings between consecutive finite rows are
/// bracketed in the result.
pub fn force_sweep(
    band: &NoiseBand,
    refl_a: &ReflectivitySpec,
    refl_b: &ReflectivitySpec,
    separations: &[f64],
    method: Method,
    settings: &QuadratureSettings,
) -> Result<SweepResult> {
    sweep_over(separations, method, |separation| {
        let cavity = CavityConfig::new(separation, refl_a.clone(), refl_b.clone())?;
        casimir_force(band, &cavity, method, settings)
    })
}

/// Sphere-plane force at each gap of a strictly increasing grid; same row
/// and sign-change semantics as [`force_sweep`].
pub fn sphere_plane_sweep(
    band: &NoiseBand,
    radius: f64,
    refl_sphere: &ReflectivitySpec,
    refl_plane: &ReflectivitySpec,
    gaps: &[f64],
    settings: &QuadratureSettings,
) -> Result<SweepResult> {
    sweep_over(gaps, Method::Adaptive, |gap| {
        let config = SpherePlaneConfig::new(
            radius,
            gap,
            refl_sphere.clone(),
            refl_plane.clone(),
        )?;
        sphere_plane_force(band, &config, settings)
    })
}
