//! Special functions backing the estimators: log-gamma, the regularized
//! incomplete beta function, and the Student t distribution.
//!
//! No quantile tables are used at runtime; the t quantile is obtained by
//! bracketed root finding on the CDF, which is in turn evaluated through
//! the incomplete beta continued fraction.

use crate::stats::StatsError;

/// Lanczos coefficients for `g = 671/128`, 14 terms (Godfrey's set, as used
/// in Numerical Recipes 3rd ed.). Relative error is below 1e-14 over the
/// positive reals, comfortably inside the 1e-12 budget needed so that
/// `c4(n)` stays accurate when the two log-gamma terms nearly cancel.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Lanczos approximation; callers in this crate only need arguments of the
/// form `k/2` with `k >= 1`, so no reflection branch is required.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires a positive argument");
    let tmp = x + LANCZOS_G;
    let log_prefactor = (x + 0.5) * libm::log(tmp) - tmp;
    let mut series = 0.999_999_999_999_997_092;
    let mut denom = x;
    for coeff in LANCZOS_COEFFS {
        denom += 1.0;
        series += coeff / denom;
    }
    // 2.5066... = sqrt(2*pi)
    log_prefactor + libm::log(2.506_628_274_631_000_5 * series / x)
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued fraction (modified Lentz algorithm) with the usual symmetry
/// switch at `x = (a+1)/(a+b+2)` so the fraction always converges quickly.
pub fn regularized_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
        + a * libm::log(x)
        + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if libm::fabs(d) < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;

        if libm::fabs(delta - 1.0) < EPS {
            break;
        }
    }
    h
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn student_t_cdf(x: f64, df: f64) -> f64 {
    debug_assert!(df >= 1.0);
    let tail = 0.5 * regularized_inc_beta(0.5 * df, 0.5, df / (df + x * x));
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Inverse CDF of Student's t distribution.
///
/// `df >= 1`, `p` strictly inside (0, 1). The root of `cdf(x) = p` is
/// bracketed by doubling and then bisected down to an interval width of
/// 1e-11, giving roughly 1e-8 absolute accuracy or better away from the
/// extreme tails.
pub fn t_quantile(df: u32, p: f64) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::InsufficientSample);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::BadProbability);
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p < 0.5 {
        return Ok(-t_quantile(df, 1.0 - p)?);
    }

    let dff = f64::from(df);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while student_t_cdf(hi, dff) < p {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    const TOL: f64 = 1e-11;
    while hi - lo > TOL {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, dff) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_2: f64 = 0.693_147_180_559_945_3;
    const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;

    #[test]
    fn ln_gamma_known_values() {
        // Exact references: integers via factorials, half-integers via
        // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!).
        let cases = [
            (0.5, LN_SQRT_PI),
            (1.0, 0.0),
            (1.5, -0.120_782_237_635_245_43),
            (2.0, 0.0),
            (3.0, LN_2),
            (3.5, 1.200_973_602_347_074_3),
            (10.0, 12.801_827_480_081_467),
        ];
        for (x, expected) in cases {
            let got = ln_gamma(x);
            let err = libm::fabs(got - expected);
            let scale = libm::fabs(expected).max(1.0);
            assert!(
                err / scale <= 1e-12,
                "ln_gamma({x}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn ln_gamma_large_argument() {
        // Stirling series oracle with three correction terms; at x = 5e5 the
        // truncation error is far below the comparison tolerance.
        let x = 500_000.0f64;
        let stirling = (x - 0.5) * libm::log(x) - x
            + 0.5 * libm::log(2.0 * core::f64::consts::PI)
            + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x * x * x);
        let got = ln_gamma(x);
        assert!(libm::fabs(got - stirling) / stirling <= 1e-13);
    }

    #[test]
    fn inc_beta_closed_forms() {
        // I_x(1, 1) = x and I_x(0.5, 0.5) = (2/pi) asin(sqrt(x)).
        for &x in &[0.05, 0.25, 0.5, 0.75, 0.95] {
            assert!(libm::fabs(regularized_inc_beta(1.0, 1.0, x) - x) < 1e-14);
            let arcsin = 2.0 / core::f64::consts::PI * libm::asin(libm::sqrt(x));
            assert!(libm::fabs(regularized_inc_beta(0.5, 0.5, x) - arcsin) < 1e-13);
        }
        assert_eq!(regularized_inc_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(regularized_inc_beta(2.0, 3.0, 1.0), 1.0);
    }

    #[test]
    fn t_cdf_midpoint_and_symmetry() {
        for df in [1.0, 2.0, 7.0, 100.0] {
            assert_eq!(student_t_cdf(0.0, df), 0.5);
            for x in [0.3, 1.7, 4.0] {
                let sum = student_t_cdf(x, df) + student_t_cdf(-x, df);
                assert!(libm::fabs(sum - 1.0) < 1e-14);
            }
        }
    }

    #[test]
    fn t_quantile_reference_values() {
        // Standard two-sided 95% critical values.
        let cases = [
            (1, 12.706_204_736_432_095),
            (2, 4.302_652_729_696_142),
            (3, 3.182_446_305_284_263),
            (6, 2.446_911_851_144_969),
            (7, 2.364_624_251_592_784),
            (30, 2.042_272_456_301_237),
            (100, 1.983_971_518_449_633),
        ];
        for (df, expected) in cases {
            let got = t_quantile(df, 0.975).unwrap();
            assert!(
                libm::fabs(got - expected) <= 1e-8,
                "t_quantile({df}, 0.975) = {got}, expected {expected}"
            );
        }
        assert!(libm::fabs(t_quantile(1, 0.9995).unwrap() - 636.619_248_768_789_6) < 1e-4);
    }

    #[test]
    fn t_quantile_symmetry_and_domain() {
        for df in [1, 5, 23] {
            assert_eq!(t_quantile(df, 0.5).unwrap(), 0.0);
            for p in [0.6, 0.9, 0.975, 0.999] {
                let upper = t_quantile(df, p).unwrap();
                let lower = t_quantile(df, 1.0 - p).unwrap();
                assert_eq!(upper, -lower);
            }
        }
        assert!(matches!(
            t_quantile(5, 0.0),
            Err(StatsError::BadProbability)
        ));
        assert!(matches!(
            t_quantile(5, 1.0),
            Err(StatsError::BadProbability)
        ));
        assert!(matches!(
            t_quantile(5, f64::NAN),
            Err(StatsError::BadProbability)
        ));
    }
}
