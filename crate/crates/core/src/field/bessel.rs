//! Spherical Bessel functions of the first kind for the low orders that appear
//! in ring-mode quadrature, plus integer-order cylindrical Bessel functions
//! used for far-field normalization.

use super::FieldError;

/// Highest supported order of [`spherical_bessel`].
pub const MAX_ORDER: u32 = 3;

/// Below these arguments the closed forms lose digits to cancellation, so the
/// power series is summed instead. Index is the order.
const SERIES_SWITCH: [f64; 4] = [1e-3, 1.0, 1.5, 2.5];

/// Spherical Bessel function of the first kind `j_m(x)` for `m <= 3`.
pub fn spherical_bessel(m: u32, x: f64) -> Result<f64, FieldError> {
    if m > MAX_ORDER {
        return Err(FieldError::UnsupportedOrder(m));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(FieldError::Domain(format!(
            "spherical Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(spherical_bessel_unchecked(m, x))
}

/// Same as [`spherical_bessel`] without argument validation. `m` must be at
/// most [`MAX_ORDER`] and `x` non-negative.
#[inline]
pub(crate) fn spherical_bessel_unchecked(m: u32, x: f64) -> f64 {
    if x < SERIES_SWITCH[m as usize] {
        return series(m, x);
    }
    let (s, c) = x.sin_cos();
    let inv = 1.0 / x;
    match m {
        0 => s * inv,
        1 => (s * inv - c) * inv,
        2 => {
            let inv2 = inv * inv;
            (3.0 * inv2 - 1.0) * s * inv - 3.0 * c * inv2
        }
        3 => {
            let inv2 = inv * inv;
            (15.0 * inv2 * inv - 6.0 * inv) * s * inv - (15.0 * inv2 - 1.0) * c * inv
        }
        _ => unreachable!("order checked by caller"),
    }
}

/// Power series `x^m / (2m+1)!! * sum_k (-x²/2)^k / (k! (2m+3)...(2m+2k+1))`.
fn series(m: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for k in 0..m {
        lead *= x / f64::from(2 * k + 3);
    }
    // lead = x^m / (3·5·…·(2m+1)); (2m+1)!! also has the leading 1.
    let half_sq = -0.5 * x * x;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..40u32 {
        term *= half_sq / (f64::from(k) * f64::from(2 * m + 2 * k + 1));
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum
}

/// Cylindrical Bessel function `J_n(x)` for integer `n`, from the integral
/// representation `J_n(x) = (1/π) ∫₀^π cos(nτ − x sin τ) dτ` on a periodic
/// trapezoid rule. Accurate to machine precision for `|x| ≲ 50`.
pub fn cylindrical_bessel(n: i32, x: f64) -> f64 {
    // Integrand is smooth and 2π-periodic over the full circle; integrate over
    // [0, 2π) and halve.
    let nodes = 128 + 2 * (x.abs().ceil() as usize);
    let step = std::f64::consts::TAU / nodes as f64;
    let nf = f64::from(n);
    let sum: f64 = (0..nodes)
        .map(|k| {
            let tau = k as f64 * step;
            (nf * tau - x * tau.sin()).cos()
        })
        .sum();
    sum * step / std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 40 digits:
    // j_m(x) = sqrt(π/2x) J_{m+1/2}(x).
    const REFERENCE: [(u32, f64, f64); 13] = [
        (0, 0.5, 0.958_851_077_208_406_000_55),
        (1, 0.1, 0.033_300_011_902_557_569_726),
        (1, 0.7, 0.222_098_277_833_773_786_31),
        (2, 0.7, 0.031_538_780_376_614_721_81),
        (3, 0.7, 0.003_178_724_856_331_369_475),
        (2, 5.0, 0.134_731_210_085_125_218_79),
        (3, 12.5, 0.074_666_784_234_748_482_358),
        (3, 0.001, 9.523_808_994_709_006_734e-12),
        (2, 1e-4, 6.666_666_661_904_761_906_1e-10),
        (0, 50.0, -0.005_247_497_074_078_575_718_3),
        (3, 50.0, 0.019_812_594_595_663_751_546),
        (3, 1.0, 0.009_006_581_117_112_516_259_4),
        (2, 0.999, 0.061_920_028_529_084_499_305),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(m, x, want) in &REFERENCE {
            let got = spherical_bessel(m, x).unwrap();
            let tol = 1e-14 * want.abs().max(1e-3);
            assert!((got - want).abs() <= tol, "j_{m}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn limits_at_origin() {
        assert_eq!(spherical_bessel(0, 0.0).unwrap(), 1.0);
        assert!((spherical_bessel(0, 1e-300).unwrap() - 1.0).abs() < 1e-15);
        for m in 1..=3 {
            assert_eq!(spherical_bessel(m, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_of_order_zero_at_pi() {
        assert!(spherical_bessel(0, std::f64::consts::PI).unwrap().abs() < 1e-15);
    }

    #[test]
    fn order_one_small_argument_series() {
        let x: f64 = 0.1;
        let got = spherical_bessel(1, x).unwrap();
        // Two-term series is only good to its first omitted term x⁵/840.
        let two_term = x / 3.0 - x.powi(3) / 30.0;
        assert!((got - two_term).abs() < 1.2e-8);
        assert!((got - 0.033_300_011_902_557_569_726).abs() < 1e-15);
    }

    #[test]
    fn continuous_across_series_switch() {
        for m in 0..=3u32 {
            let s = SERIES_SWITCH[m as usize];
            let closed = spherical_bessel(m, s).unwrap();
            let summed = series(m, s);
            assert!((closed - summed).abs() < 2e-15 * closed.abs(), "m={m}: {closed} vs {summed}");
        }
    }

    #[test]
    fn recurrence_holds() {
        let mut x = 0.5;
        while x <= 50.0 {
            for m in 1..=2u32 {
                let lhs = spherical_bessel(m - 1, x).unwrap() + spherical_bessel(m + 1, x).unwrap();
                let rhs = f64::from(2 * m + 1) / x * spherical_bessel(m, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "m={m} x={x}: {lhs} vs {rhs}");
            }
            x += 0.0625;
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(spherical_bessel(4, 1.0), Err(FieldError::UnsupportedOrder(4))));
        assert!(matches!(spherical_bessel(0, -1.0), Err(FieldError::Domain(_))));
        assert!(spherical_bessel(0, f64::NAN).is_err());
    }

    #[test]
    fn cylindrical_matches_reference() {
        // mpmath besselj
        assert!((cylindrical_bessel(0, 1.0) - 0.765_197_686_557_966_551_45).abs() < 1e-15);
        let x = 3f64.sqrt() / 2.0;
        assert!((cylindrical_bessel(1, x) - 0.393_666_715_914_088_636_03).abs() < 1e-15);
        assert!((cylindrical_bessel(2, 1.3) - 0.183_026_698_768_737_631_6).abs() < 1e-15);
        assert!((cylindrical_bessel(-1, 1.3) + cylindrical_bessel(1, 1.3)).abs() < 1e-15);
    }
}
