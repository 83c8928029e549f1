//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol·|I|)`. Intervals are kept in
//! creation order and summed in that order, so results do not depend on
//! anything but the integrand.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of intervals.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge in {subdivisions} subdivisions: estimate {estimate}, error {abs_error}")]
    NotConverged {
        estimate: f64,
        abs_error: f64,
        subdivisions: usize,
    },
}

impl QuadratureError {
    pub fn estimate(&self) -> f64 {
        match *self {
            Self::NotConverged { estimate, .. } => estimate,
        }
    }

    pub fn abs_error(&self) -> f64 {
        match *self {
            Self::NotConverged { abs_error, .. } => abs_error,
        }
    }
}

// Kronrod abscissae on [0, 1]; odd indices are the Gauss points.
#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = kronrod.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        f1[j] = lo;
        f2[j] = hi;
        kronrod += WGK[j] * (lo + hi);
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = kronrod * half;
    let abs = abs * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult, QuadratureError> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }
    let mut segs = vec![gk15(&mut f, a, b)];
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                abs_error: error,
                subdivisions: segs.len(),
            });
        }
        if segs.len() >= opts.max_subdivisions {
            return Err(QuadratureError::NotConverged {
                estimate: value,
                abs_error: error,
                subdivisions: segs.len(),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segs[worst];
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval cannot be split further in floating point
            return Err(QuadratureError::NotConverged {
                estimate: value,
                abs_error: error,
                subdivisions: segs.len(),
            });
        }
        segs[worst] = gk15(&mut f, s.a, mid);
        segs.push(gk15(&mut f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x - x + 1.0, -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((r.value - 10.5).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn exponential_decay() {
        let r = integrate(|x| (-x).exp(), 0.0, 40.0, &QuadOptions::default()).unwrap();
        assert!((r.value - (1.0 - (-40.0f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn endpoint_log_singularity() {
        // ∫_0^1 ln x dx = -1
        let r = integrate(|x| if x > 0.0 { x.ln() } else { 0.0 }, 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value + 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn kink_is_resolved() {
        let r = integrate(|x: f64| x.abs(), -1.0, 3.0, &QuadOptions::default()).unwrap();
        assert!((r.value - 5.0).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &opts).unwrap_err();
        assert!(err.abs_error() > 0.0);
        assert!(err.estimate().is_finite());
    }

    #[test]
    fn empty_interval() {
        let r = integrate(|_| 1.0, 2.0, 2.0, &QuadOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
