//! Closed forms and quadrature for mean area fractions of LOS coverage.
//!
//! Every fraction is a probability that the origin is covered. For a line
//! within `η/2` of the origin, coverage reduces to the foot point (abscissa 0)
//! lying in some LOS interval. Lines within `η/2` of the origin form a Poisson
//! count with mean `λ_l η`, and RSUs on each line are Poisson with intensity
//! `μ`. So every fraction has the shape `1 - exp(-λ_l η (1 - exp(-μ I)))`,
//! where `I` is the integral over RSU positions `x` of the probability that
//! an RSU at `x` (or its relay) covers the foot point.
//!
//! For RSU-only coverage `I = 2γ`. With relays, `I` is evaluated by
//! quadrature in units of `γ`:
//!
//! ```text
//! I/γ = 2 ∫_0^K [ e^{-x} + E( 1{W < x} · h(x; W, V) ) ] dx
//! h(x; w, v) = (1/(w+v)) ∫_{x-w}^{x+v} e^{-|u|} du
//! ```
//!
//! The first term is the RSU covering the foot point. The second is the RSU
//! missing it while its relay, uniform on the RSU's segment, covers it. `h`
//! is the relay's coverage probability averaged over its position, taken in
//! closed form. The expectation over `(W, V)` uses the substitution
//! `w = -ln u`, `v = -ln t`, which turns the exponential weights into the
//! unit square.

pub mod quadrature;

use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::ScenarioParams;
use quadrature::{integrate, QuadOptions, QuadratureError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Outer integral truncated to `|x| ≤ K·γ`.
    pub x_cutoff_multiplier: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Interval budget for each adaptive pass.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            x_cutoff_multiplier: 12.0,
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<(), AnalyticError> {
        let bad = |field: &'static str| Err(AnalyticError::InvalidSettings { field });
        if !(self.x_cutoff_multiplier > 0.0 && self.x_cutoff_multiplier.is_finite()) {
            return bad("x_cutoff_multiplier");
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return bad("rel_tol");
        }
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return bad("abs_tol");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions");
        }
        Ok(())
    }

    fn inner(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol * 0.1,
            abs_tol: self.abs_tol * 0.1,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn outer(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaFraction {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
}

impl AreaFraction {
    fn closed_form(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            error_bound: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid quadrature setting `{field}`")]
    InvalidSettings { field: &'static str },
    #[error("gain ratio undefined: RSU-only coverage is zero")]
    UndefinedRatio,
}

/// Which form of the additive-approach error to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorVariant {
    /// Exponent `2 λ_l η (1 - e^{-2μγ})` in the exact term.
    AsPrinted,
    /// Exact term equal to [`theorem1_area_fraction`].
    #[default]
    Theorem1Consistent,
}

/// Probability that a line-restricted coverage process with per-line
/// coverage integral `integral` covers the origin.
fn fraction_from_integral(lambda_l: f64, eta: f64, mu: f64, integral: f64) -> f64 {
    let per_line_hit = -(-mu * integral).exp_m1();
    -(-lambda_l * eta * per_line_hit).exp_m1()
}

/// Mean area fraction of RSU-only LOS coverage,
/// `1 - exp(-λ_l η (1 - e^{-2μγ}))`.
pub fn theorem1_area_fraction(p: &ScenarioParams) -> AreaFraction {
    AreaFraction::closed_form(fraction_from_integral(p.lambda_l, p.eta, p.mu, 2.0 * p.gamma))
}

/// Area fraction of the roads themselves, `1 - e^{-λ_l η}`; no LOS coverage
/// can exceed it.
pub fn road_area_fraction(lambda_l: f64, eta: f64) -> AreaFraction {
    AreaFraction::closed_form(-(-lambda_l * eta).exp_m1())
}

/// Fraction of a single line covered by LOS segments, `1 - e^{-2μγ}`.
pub fn linear_fraction(mu: f64, gamma: f64) -> f64 {
    -(-2.0 * mu * gamma).exp_m1()
}

/// Additive approximation `η λ_l (1 - e^{-2μγ})`, which ignores overlap
/// between roads. Not clamped; it can exceed 1.
pub fn additive_rsu_fraction(p: &ScenarioParams) -> f64 {
    p.eta * p.lambda_l * linear_fraction(p.mu, p.gamma)
}

/// Absolute gap between the overlap-aware fraction and the additive one.
pub fn additive_error_gamma(p: &ScenarioParams, variant: ErrorVariant) -> f64 {
    let additive = additive_rsu_fraction(p);
    let exact = match variant {
        ErrorVariant::AsPrinted => -(-2.0 * additive).exp_m1(),
        ErrorVariant::Theorem1Consistent => theorem1_area_fraction(p).value,
    };
    (exact - additive).abs()
}

/// Mean of `e^{-|u|}` over `u ∈ [x - w, x + v]`, i.e. the coverage
/// probability of a relay placed uniformly there (unit mean LOS distance).
pub(crate) fn relay_hit_average(x: f64, w: f64, v: f64) -> f64 {
    let a = x - w;
    let b = x + v;
    let s = w + v;
    if s <= 0.0 {
        return (-x.abs()).exp();
    }
    // (1 - e^{-s}) / s, stable for small s
    let shrink = if s < 1e-300 { 1.0 } else { -(-s).exp_m1() / s };
    if a >= 0.0 {
        (-a).exp() * shrink
    } else if b <= 0.0 {
        b.exp() * shrink
    } else {
        (2.0 - (-b).exp() - a.exp()) / s
    }
}

/// Integral over the unit square of `φ(-ln u, -ln t)` for `u ∈ [u_lo, 1]`.
fn exponential_expectation<F>(u_lo: f64, opts: &QuadOptions, failure: &mut Option<QuadratureError>, phi: F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let mut inner_fail: Option<QuadratureError> = None;
    let outer = integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let w = -u.ln();
            let r = integrate(
                |t| {
                    if t <= 0.0 {
                        // v → ∞
                        return phi(w, f64::INFINITY);
                    }
                    phi(w, -t.ln())
                },
                0.0,
                1.0,
                opts,
            );
            match r {
                Ok(r) => r.value,
                Err(e) => {
                    inner_fail.get_or_insert(e);
                    e.estimate()
                }
            }
        },
        u_lo,
        1.0,
        opts,
    );
    if let Some(e) = inner_fail {
        failure.get_or_insert(e);
    }
    match outer {
        Ok(r) => r.value,
        Err(e) => {
            failure.get_or_insert(e);
            e.estimate()
        }
    }
}

/// Probability that an RSU at distance `x ≥ 0` from the foot point, or its
/// relay, covers the foot point (unit mean LOS distance).
pub(crate) fn rsu_or_relay_hit(x: f64, opts: &QuadOptions, failure: &mut Option<QuadratureError>) -> f64 {
    let relay_only = exponential_expectation((-x).exp(), opts, failure, |w, v| {
        if v.is_infinite() {
            0.0
        } else {
            relay_hit_average(x, w, v)
        }
    });
    (-x).exp() + relay_only
}

/// Per-line coverage integral `I` with relays, divided by `γ`.
///
/// The value is truncated at the cutoff. `abs_error` combines the
/// quadrature estimate with a bound on the dropped tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayIntegral {
    pub value: f64,
    pub abs_error: f64,
}

///
/// The integral depends only on `settings`, so results are memoized per
/// settings value.
pub fn relay_coverage_integral(settings: &QuadratureSettings) -> Result<RelayIntegral, AnalyticError> {
    static CACHE: Mutex<Vec<(QuadratureSettings, Result<RelayIntegral, AnalyticError>)>> = Mutex::new(Vec::new());
    settings.validate()?;
    if let Some((_, r)) = CACHE.lock().unwrap_or_else(|e| e.into_inner()).iter().find(|(s, _)| s == settings) {
        return *r;
    }
    let r = compute_relay_integral(settings);
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if cache.len() >= 32 {
        cache.drain(..1);
    }
    cache.push((*settings, r));
    r
}

fn compute_relay_integral(settings: &QuadratureSettings) -> Result<RelayIntegral, AnalyticError> {
    let inner = settings.inner();
    let mut failure = None;
    let k = settings.x_cutoff_multiplier;
    let half = integrate(|x| rsu_or_relay_hit(x, &inner, &mut failure), 0.0, k, &settings.outer());
    if let Some(e) = failure {
        return Err(e.into());
    }
    let half = half?;
    // h ≤ e^{-(x-w)} when w < x, so the integrand is at most (1 + x) e^{-x}
    // and the dropped tail at most (K + 2) e^{-K}.
    let tail = (k + 2.0) * (-k).exp();
    Ok(RelayIntegral {
        value: 2.0 * half.value,
        abs_error: 2.0 * (half.abs_error + tail),
    })
}

/// Mean area fraction of RSU-plus-relay LOS coverage, by quadrature.
///
/// A relay is uniform on its RSU's LOS segment and has its own exponential
/// extents. The origin is missed iff both the RSU and its relay miss it.
pub fn theorem2_area_fraction(p: &ScenarioParams, settings: &QuadratureSettings) -> Result<AreaFraction, AnalyticError> {
    settings.validate()?;
    if p.gamma == 0.0 || p.mu == 0.0 {
        return Ok(AreaFraction {
            value: 0.0,
            method: Method::Quadrature,
            error_bound: 0.0,
        });
    }
    let integral = relay_coverage_integral(settings)?;
    let i = integral.value * p.gamma;
    let value = fraction_from_integral(p.lambda_l, p.eta, p.mu, i);
    let sensitivity = (1.0 - value) * p.lambda_l * p.eta * p.mu * (-p.mu * i).exp();
    Ok(AreaFraction {
        value,
        method: Method::Quadrature,
        error_bound: sensitivity * integral.abs_error * p.gamma,
    })
}

/// The displayed closed expression taken literally, with its outer integral
/// truncated at the cutoff. Its integrand tends to `-1` for large `|x|`, so
/// the result depends on the cutoff and is usually not a probability; it is
/// provided only for comparison with [`theorem2_area_fraction`].
pub fn theorem2_printed_display(p: &ScenarioParams, settings: &QuadratureSettings) -> Result<f64, AnalyticError> {
    settings.validate()?;
    if p.gamma == 0.0 {
        return Ok(0.0);
    }
    let inner = settings.inner();
    let mut failure = None;
    let k = settings.x_cutoff_multiplier;
    let integrand = |x: f64, failure: &mut Option<QuadratureError>| {
        let miss = exponential_expectation(0.0, &inner, failure, |w, v| {
            if v.is_infinite() {
                1.0
            } else {
                1.0 - relay_hit_average(x, w, v)
            }
        });
        (-x).exp() - miss
    };
    let half = integrate(|x| integrand(x, &mut failure), 0.0, k, &settings.outer());
    if let Some(e) = failure {
        return Err(e.into());
    }
    let i = 2.0 * half?.value * p.gamma;
    Ok(1.0 - (-p.lambda_l * p.eta * (1.0 - (-p.mu * i).exp())).exp())
}

/// `ν(RSU + relay) / ν(RSU)`.
pub fn relay_gain_ratio(p: &ScenarioParams, settings: &QuadratureSettings) -> Result<f64, AnalyticError> {
    let rsu = theorem1_area_fraction(p).value;
    if rsu <= 0.0 {
        return Err(AnalyticError::UndefinedRatio);
    }
    Ok(theorem2_area_fraction(p, settings)?.value / rsu)
}
