//! Adaptive quadrature on finite intervals and closed-form oscillatory moments.
//!
//! The workhorse is a 15-point Kronrod rule with embedded 7-point Gauss rule
//! per panel; the difference of the two estimates drives globally adaptive
//! bisection of the worst panel. Oscillatory integrands are handled by
//! seeding the panel list at a caller-provided phase scale so no oscillation
//! is ever straddled by a single panel, and by closed-form trigonometric
//! moments where the k-integral can be done analytically.

use std::cell::{Cell, RefCell};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::types::QuadratureSettings;

/// Abscissae of the 15-point Kronrod rule on [-1, 1]: the 7 Gauss points
/// interleaved with 8 new points, nonnegative half (symmetric rule).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Weights of the embedded 7-point Gauss rule.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Weights of the 15-point Kronrod rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationReport {
    /// Integral estimate.
    pub value: f64,
    /// Estimated absolute error of `value`.
    pub error_estimate: f64,
    /// Panels in the final subdivision.
    pub panels_used: usize,
    /// Integrand evaluations performed.
    pub evaluations: usize,
    /// Whether the error estimate met the requested tolerance within the
    /// subdivision budget.
    pub converged: bool,
}

/// One panel of the subdivision with its local rule results.
#[derive(Debug, Clone, PartialEq)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Panel {}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on error; ties resolved toward the smaller start so the
        // refinement order (hence the result bit pattern) is deterministic
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Downscale a raw Kronrod-Gauss difference into an error estimate, exactly
/// as QUADPACK does: dampen by (200 err / resasc)^1.5 when the difference is
/// small relative to the integrand's variation, and never report below
/// 50 ulp of the absolute integral.
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut err = err.abs();
    if result_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / result_asc).powf(1.5);
        err = if scale < 1.0 { result_asc * scale } else { result_asc };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    err
}

/// Apply the 15-point Kronrod / 7-point Gauss pair on [a, b].
fn qk15(f: &impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center)?;
    let mut result_gauss = fc * WG[3];
    let mut result_kronrod = fc * WGK[7];
    let mut result_abs = result_kronrod.abs();
    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    // Gauss points sit at the odd Kronrod indices
    for j in 0..3 {
        let idx = 2 * j + 1;
        let dx = half * XGK[idx];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[idx] = f1;
        fv2[idx] = f2;
        let sum = f1 + f2;
        result_gauss += WG[j] * sum;
        result_kronrod += WGK[idx] * sum;
        result_abs += WGK[idx] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let idx = 2 * j;
        let dx = half * XGK[idx];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[idx] = f1;
        fv2[idx] = f2;
        let sum = f1 + f2;
        result_kronrod += WGK[idx] * sum;
        result_abs += WGK[idx] * (f1.abs() + f2.abs());
    }

    let mean = result_kronrod * 0.5;
    let mut result_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (result_kronrod - result_gauss) * half;
    Ok(Panel {
        a,
        b,
        value: result_kronrod * half,
        error: rescale_error(err, result_abs * abs_half, result_asc * abs_half),
    })
}

/// Wrap a plain integrand so non-finite samples abort the integration with a
/// located error instead of silently corrupting the sums.
fn eval_checked(f: &impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<f64> + '_ {
    move |x| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteIntegrand {
                location: format!("x = {x}"),
            })
        }
    }
}

/// Integrate `f` over [a, b] by globally adaptive Gauss-Kronrod bisection.
///
/// `oscillation_scale`, if given, is the integrand's shortest phase period
/// 2 pi / (d phase / dx); the initial subdivision places at least
/// `min_panels_per_oscillation` panels per period so the rule never sees an
/// unresolved oscillation. Exhausting `max_subdivisions` is not an error:
/// the best estimate is returned with `converged = false`.
pub fn adaptive_1d(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    oscillation_scale: Option<f64>,
    settings: &QuadratureSettings,
) -> Result<IntegrationReport> {
    settings.validate()?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidInput {
            name: "integration interval",
            reason: format!("[{a}, {b}] must be finite with a <= b"),
        });
    }
    if a == b {
        return Ok(IntegrationReport {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 0,
            evaluations: 0,
            converged: true,
        });
    }

    let checked = eval_checked(&f);
    let width = b - a;
    let mut initial = 1usize;
    if let Some(scale) = oscillation_scale {
        if scale > 0.0 {
            let periods = width * scale / std::f64::consts::TAU;
            let wanted = (periods * settings.min_panels_per_oscillation as f64).ceil();
            initial = (wanted as usize).clamp(1, settings.max_subdivisions);
        }
    }

    let mut evaluations = 0usize;
    let mut heap: BinaryHeap<Panel> = BinaryHeap::with_capacity(initial);
    for i in 0..initial {
        let pa = a + width * (i as f64 / initial as f64);
        let pb = if i + 1 == initial { b } else { a + width * ((i + 1) as f64 / initial as f64) };
        heap.push(qk15(&checked, pa, pb)?);
        evaluations += 15;
    }

    let tolerance = |value: f64| settings.abs_tol.max(settings.rel_tol * value.abs());
    loop {
        let total_value: f64 = heap.iter().map(|p| p.value).sum();
        let total_error: f64 = heap.iter().map(|p| p.error).sum();
        if total_error <= tolerance(total_value) || heap.len() >= settings.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; cannot bisect further
            heap.push(worst);
            break;
        }
        heap.push(qk15(&checked, worst.a, mid)?);
        heap.push(qk15(&checked, mid, worst.b)?);
        evaluations += 30;
    }

    // deterministic final summation: left-to-right by panel start
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error_estimate: f64 = panels.iter().map(|p| p.error).sum();
    Ok(IntegrationReport {
        value,
        error_estimate,
        panels_used: panels.len(),
        evaluations,
        converged: error_estimate <= tolerance(value),
    })
}

/// Integrate `f(x, y)` over a rectangle as an iterated integral: an adaptive
/// outer integral in `x` whose integrand is an adaptive inner integral in
/// `y`. `scales` are the per-axis oscillation scales, as in [`adaptive_1d`].
///
/// The reported error estimate is the outer rule's estimate of its own error
/// (with the inner integrals resolved to a proportionally tighter absolute
/// tolerance); `converged` additionally requires every inner integral to
/// have converged.
pub fn adaptive_2d(
    f: impl Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    scales: (Option<f64>, Option<f64>),
    settings: &QuadratureSettings,
) -> Result<IntegrationReport> {
    settings.validate()?;
    let (xa, xb) = x_range;
    let (ya, yb) = y_range;
    let x_width = xb - xa;

    let mut inner_settings = settings.clone();
    if x_width > 1.0 {
        inner_settings.abs_tol = settings.abs_tol / x_width;
    }

    let inner_evals = Cell::new(0usize);
    let inner_panels = Cell::new(0usize);
    let inner_converged = Cell::new(true);
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);

    let outer_integrand = |x: f64| -> f64 {
        if inner_failure.borrow().is_some() {
            return f64::NAN;
        }
        match adaptive_1d(|y| f(x, y), ya, yb, scales.1, &inner_settings) {
            Ok(report) => {
                inner_evals.set(inner_evals.get() + report.evaluations);
                inner_panels.set(inner_panels.get() + report.panels_used);
                if !report.converged {
                    inner_converged.set(false);
                }
                report.value
            }
            Err(err) => {
                // poison the outer integrand; the stored error wins below
                let located = match err {
                    Error::NonFiniteIntegrand { location } => Error::NonFiniteIntegrand {
                        location: format!("x = {x}, {location}"),
                    },
                    other => other,
                };
                *inner_failure.borrow_mut() = Some(located);
                f64::NAN
            }
        }
    };

    let outer = adaptive_1d(outer_integrand, xa, xb, scales.0, settings);
    if let Some(err) = inner_failure.into_inner() {
        return Err(err);
    }
    let outer = outer?;
    Ok(IntegrationReport {
        value: outer.value,
        error_estimate: outer.error_estimate,
        panels_used: outer.panels_used + inner_panels.get(),
        evaluations: inner_evals.get(),
        converged: outer.converged && inner_converged.get(),
    })
}

/// Which closed-form trigonometric moment of the mode-fraction variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigMoment {
    /// integral of u^2 cos(a u) du over [0, 1]
    M2c,
    /// integral of u sin(a u) du over [0, 1]
    M1s,
}

/// Below this |a| the closed forms lose digits to cancellation; switch to
/// Taylor series accurate to well under 1e-16 at the threshold.
pub const TRIG_TAYLOR_THRESHOLD: f64 = 0.05;

/// Closed-form oscillatory moments over the unit interval.
///
/// M2c(a) = sin a / a + 2 cos a / a^2 - 2 sin a / a^3,
/// M1s(a) = sin a / a^2 - cos a / a.
/// Both are evaluated by Taylor series near a = 0 where the closed forms
/// cancel catastrophically. |M2c| <= 1/3 and |M1s| <= 1/2 for all real a.
pub fn trig_moment(which: TrigMoment, a: f64) -> f64 {
    let a2 = a * a;
    match which {
        TrigMoment::M2c => {
            if a.abs() < TRIG_TAYLOR_THRESHOLD {
                // 1/3 - a^2/10 + a^4/168 - a^6/6480 + a^8/443520
                (((a2 / 443520.0 - 1.0 / 6480.0) * a2 + 1.0 / 168.0) * a2 - 0.1) * a2 + 1.0 / 3.0
            } else {
                let (s, c) = a.sin_cos();
                s / a + 2.0 * c / a2 - 2.0 * s / (a2 * a)
            }
        }
        TrigMoment::M1s => {
            if a.abs() < TRIG_TAYLOR_THRESHOLD {
                // a/3 - a^3/30 + a^5/840 - a^7/45360
                a * ((((-a2 / 45360.0 + 1.0 / 840.0) * a2 - 1.0 / 30.0) * a2) + 1.0 / 3.0)
            } else {
                let (s, c) = a.sin_cos();
                s / a2 - c / a
            }
        }
    }
}
