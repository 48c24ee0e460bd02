use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// zeta(k) for k = 2..=30.
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_436_5,
    1.202_056_903_159_594_285_4,
    1.082_323_233_711_138_191_5,
    1.036_927_755_143_369_926_3,
    1.017_343_061_984_449_139_7,
    1.008_349_277_381_922_826_8,
    1.004_077_356_197_944_339_4,
    1.002_008_392_826_082_214_4,
    1.000_994_575_127_818_085_3,
    1.000_494_188_604_119_464_6,
    1.000_246_086_553_308_048_3,
    1.000_122_713_347_578_489_1,
    1.000_061_248_135_058_704_8,
    1.000_030_588_236_307_020_5,
    1.000_015_282_259_408_651_9,
    1.000_007_637_197_637_899_8,
    1.000_003_817_293_264_999_8,
    1.000_001_908_212_716_553_9,
    1.000_000_953_962_033_872_8,
    1.000_000_476_932_986_787_8,
    1.000_000_238_450_502_727_7,
    1.000_000_119_219_925_965_3,
    1.000_000_059_608_189_051_3,
    1.000_000_029_803_503_514_7,
    1.000_000_014_901_554_828_4,
    1.000_000_007_450_711_789_8,
    1.000_000_003_725_334_024_8,
    1.000_000_001_862_659_723_5,
    1.000_000_000_931_327_432_4,
];

/// Stirling series is used directly from here up.
const STIRLING_MIN: f64 = 10.0;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_741_78;

/// Natural logarithm of the gamma function for real `x > 0`.
///
/// The evaluation is piecewise so that the result keeps full relative
/// accuracy near the zeros of `ln Γ` at 1 and 2:
///
/// * `|x - 1| <= 1/4` and `|x - 2| <= 1/4`: Taylor series of `ln Γ(1 + z)`
///   in zeta values.
/// * `x < 1/4`: the same series shifted down by `ln x`.
/// * `x >= 10`: Stirling series with terms through `x^-13`.
/// * elsewhere: Stirling at `x + n` shifted back by `ln(x (x+1) ... (x+n-1))`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain("log_gamma argument", format!("x = {x} must be > 0")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let v = if x < 0.25 {
        log_gamma_one_plus(x) - x.ln()
    } else if x < 0.75 {
        shifted_stirling(x + 1.0) - x.ln()
    } else if x <= 1.25 {
        log_gamma_one_plus(x - 1.0)
    } else if x < 1.75 {
        shifted_stirling(x)
    } else if x <= 2.25 {
        let z = x - 2.0;
        z.ln_1p() + log_gamma_one_plus(z)
    } else if x < STIRLING_MIN {
        shifted_stirling(x)
    } else {
        stirling(x)
    };
    Ok(v)
}

/// ln Γ(1 + z) for |z| <= 1/4.
fn log_gamma_one_plus(z: f64) -> f64 {
    // Sum smallest terms first.
    let mut sum = 0.0;
    for (i, zeta) in ZETA.iter().enumerate().rev() {
        let k = (i + 2) as i32;
        sum += zeta * (-z).powi(k) / k as f64;
    }
    sum - EULER_GAMMA * z
}

fn shifted_stirling(x: f64) -> f64 {
    let mut product = 1.0;
    let mut y = x;
    while y < STIRLING_MIN {
        product *= y;
        y += 1.0;
    }
    stirling(y) - product.ln()
}

fn stirling(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r
        * (1.0 / 12.0
            - r2 * (1.0 / 360.0
                - r2 * (1.0 / 1260.0
                    - r2 * (1.0 / 1680.0
                        - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360_360.0 - r2 / 156.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}
