//! Adaptive quadrature on finite intervals.
//!
//! A 7-point Gauss / 15-point Kronrod pair drives interval bisection until
//! the summed error estimate meets the requested absolute tolerance. For
//! integrands with an inverse-square-root endpoint singularity there is a
//! variant that substitutes `x = a + t^2` (and mirrored at `b`), which turns
//! the singular factor into a bounded one before integrating.

use crate::error::{Error, Result};

// G7K15 abscissae and weights (positive half; node 7 is the center).
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

/// One Gauss-Kronrod evaluation: returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptively integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_SEGMENTS: usize = 4096;

    // (lo, hi, value, err) segments kept in a worklist; split the worst one.
    let (v, e) = gk15(&f, a, b);
    let mut segments = vec![(a, b, v, e)];

    loop {
        let total_err: f64 = segments.iter().map(|s| s.3).sum();
        if total_err <= tol {
            return Ok(segments.iter().map(|s| s.2).sum());
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure {
                tol,
                estimate: total_err,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
}

/// Integrate `f` over `[a, b]` where `f` may blow up like
/// `(x-a)^{-1/2}` or `(b-x)^{-1/2}` at the endpoints.
///
/// Splits at the midpoint and substitutes `x = a + t^2` on the left half
/// (`x = b - t^2` on the right), so the integrand seen by the adaptive rule
/// is `2 t f(a + t^2)`, which stays bounded for integrable endpoint
/// singularities.
pub fn integrate_endpoint_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = integrate(|t| 2.0 * t * f(a + t * t), 0.0, (mid - a).sqrt(), 0.5 * tol)?;
    let right = integrate(|t| 2.0 * t * f(b - t * t), 0.0, (b - mid).sqrt(), 0.5 * tol)?;
    Ok(left + right)
}
