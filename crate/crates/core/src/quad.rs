//! Adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! A 7-point Gauss / 15-point Kronrod pair per panel, panels split at the
//! largest error estimate until the summed estimate meets tolerance. Callers
//! pass seed breakpoints at known features (series peaks, oscillation nodes);
//! without them a narrow peak deep inside [0,1] is invisible to the first
//! coarse panels and the refinement loop never finds it.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadraturePolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-12,
            max_panels: 8192,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and the paired
// 7-point Gauss / 15-point Kronrod weights; QUADPACK values kept at their
// published 33-digit precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
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

fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut err = err.abs();
    if result_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / result_asc).powf(1.5);
        err = if scale < 1.0 {
            result_asc * scale
        } else {
            result_asc
        };
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if result_abs > tiny {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    err
}

/// One G7K15 evaluation on [a, b]: (kronrod value, error estimate).
fn qk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut result_gauss = WG[3] * f_center;
    let mut result_kronrod = WGK[7] * f_center;
    let mut result_abs = result_kronrod.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * sum;
        }
        result_kronrod += WGK[j] * sum;
        result_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * result_kronrod;
    let mut result_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = rescale_error(
        (result_kronrod - result_gauss) * half,
        result_abs * half,
        result_asc * half.abs(),
    );
    (result_kronrod * half, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn eval_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let (value, error) = qk15(f, a, b);
    Panel { a, b, value, error }
}

/// Integrates f over [a, b]. Seeds inside (a, b) become initial panel
/// boundaries; duplicates and out-of-range values are dropped.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    seeds: &[f64],
    policy: &QuadraturePolicy,
) -> Result<QuadratureResult> {
    assert!(a < b, "integration interval is empty");
    let mut cuts: Vec<f64> = seeds.iter().copied().filter(|x| *x > a && *x < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(a);
    bounds.extend(cuts);
    bounds.push(b);

    let mut panels: Vec<Panel> = bounds
        .windows(2)
        .map(|w| eval_panel(&f, w[0], w[1]))
        .collect();

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureNotConverged {
                error: f64::NAN,
                tol: policy.abs_tol,
                panels: panels.len(),
            });
        }
        let tol = policy.abs_tol.max(policy.rel_tol * value.abs());
        if error <= tol {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                panels: panels.len(),
            });
        }
        if panels.len() >= policy.max_panels {
            return Err(Error::QuadratureNotConverged {
                error,
                tol,
                panels: panels.len(),
            });
        }

        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let p = panels[worst];
        let width_floor = 100.0 * f64::EPSILON * (p.a.abs() + p.b.abs() + f64::MIN_POSITIVE);
        if p.b - p.a <= width_floor {
            // cannot refine further; either the estimate is honest noise or
            // the integrand is genuinely nasty here
            return Err(Error::QuadratureNotConverged {
                error,
                tol,
                panels: panels.len(),
            });
        }
        let mid = 0.5 * (p.a + p.b);
        panels[worst] = eval_panel(&f, p.a, mid);
        panels.push(eval_panel(&f, mid, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_near_exact() {
        let r = integrate(|x| x * x, 0.0, 1.0, &[], &QuadraturePolicy::default()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let pol = QuadraturePolicy {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_panels: 20000,
        };
        let r = integrate(
            |x| if x > 0.0 { x.powf(-0.5) } else { 0.0 },
            0.0,
            1.0,
            &[],
            &pol,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "got {}", r.value);
    }

    #[test]
    fn oscillatory_with_seeded_periods() {
        // int_0^{20 pi} sin x dx = 0; seed every half period. The value
        // cancels to roundoff, so the reachable absolute tolerance is set by
        // the total |integrand| mass, not by machine epsilon.
        let b = 20.0 * std::f64::consts::PI;
        let seeds: Vec<f64> = (1..40).map(|k| k as f64 * b / 40.0).collect();
        let pol = QuadraturePolicy {
            abs_tol: 1e-10,
            ..QuadraturePolicy::default()
        };
        let r = integrate(|x| x.sin(), 0.0, b, &seeds, &pol).unwrap();
        assert!(r.value.abs() < 1e-12, "got {}", r.value);
    }

    #[test]
    fn narrow_peak_needs_seeds() {
        // gaussian of width 1e-5 centered at 0.3; mass ~ sqrt(pi)*1e-5.
        // Seeds must reach far enough out that the outer panels' nodes see
        // the tails; erfc(12) is comfortably below any tolerance here.
        let w = 1e-5;
        let f = move |x: f64| (-((x - 0.3) / w).powi(2)).exp();
        let exact = w * std::f64::consts::PI.sqrt();
        let seeds = [
            0.3 - 12.0 * w,
            0.3 - 4.0 * w,
            0.3 - w,
            0.3,
            0.3 + w,
            0.3 + 4.0 * w,
            0.3 + 12.0 * w,
        ];
        let r = integrate(f, 0.0, 1.0, &seeds, &QuadraturePolicy::default()).unwrap();
        assert!(
            (r.value - exact).abs() / exact < 1e-10,
            "got {} want {}",
            r.value,
            exact
        );
    }

    #[test]
    fn reports_nonconvergence_on_nan() {
        let r = integrate(|_| f64::NAN, 0.0, 1.0, &[], &QuadraturePolicy::default());
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn respects_panel_budget() {
        let pol = QuadraturePolicy {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_panels: 8,
        };
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 1.0, &[], &pol);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
