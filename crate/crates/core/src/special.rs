//! Special functions: log-Gamma and the exponentially scaled modified
//! Bessel function of order zero.

use std::f64::consts::PI;

/// Switch point between the power series and the large-argument expansion.
pub const I0_SERIES_LIMIT: f64 = 30.0;

/// Natural log of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `e^{-x} I_0(x)` for `x >= 0`.
///
/// Power series up to [`I0_SERIES_LIMIT`], the asymptotic expansion
/// `e^{-x} I_0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k)` beyond.
/// The returned value never overflows, whatever the argument.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "bessel_i0_scaled needs a nonnegative argument");
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        bessel_i0_series(x) * (-x).exp()
    } else {
        bessel_i0_asymptotic_scaled(x)
    }
}

/// Unscaled `I_0(x)` by its defining series; only sensible for moderate `x`.
pub fn bessel_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= 1e-17 * sum {
            return sum;
        }
        k += 1.0;
    }
}

fn bessel_i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    let eight_x = 8.0 * x;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (kf * eight_x);
        // divergent series: stop at the smallest term
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `e^{-x} I_0(x) = (1/pi) int_0^pi e^{x (cos th - 1)} d th`; the
    /// trapezoid rule is spectrally accurate for this periodic integrand.
    fn i0_scaled_by_integral(x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let mut s = 0.5 * (1.0 + (-2.0 * x).exp());
        for j in 1..m {
            s += (x * ((j as f64 * h).cos() - 1.0)).exp();
        }
        s * h / PI
    }

    #[test]
    fn matches_integral_representation() {
        for &x in &[0.0, 1e-3, 0.5, 1.0, 5.0, 17.0, 29.9, 30.0, 30.1, 45.0, 200.0, 1500.0] {
            let want = i0_scaled_by_integral(x);
            let got = bessel_i0_scaled(x);
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn continuous_across_switch_point() {
        let below = bessel_i0_series(I0_SERIES_LIMIT) * (-I0_SERIES_LIMIT).exp();
        let above = bessel_i0_asymptotic_scaled(I0_SERIES_LIMIT);
        assert_relative_eq!(below, above, max_relative = 1e-14);
    }

    #[test]
    fn known_values() {
        assert_eq!(bessel_i0_scaled(0.0), 1.0);
        // I_0(1) = 1.2660658777520082
        assert_relative_eq!(bessel_i0_series(1.0), 1.266_065_877_752_008_2, max_relative = 1e-15);
    }

    #[test]
    fn ln_gamma_at_integers() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-15);
        assert_relative_eq!(ln_gamma(5.0), 24f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(0.5), PI.sqrt().ln(), max_relative = 1e-14);
        // large argument stays finite where Gamma itself overflows
        assert!(ln_gamma(1000.5).is_finite());
    }
}
