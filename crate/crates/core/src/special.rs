//! Special functions shared by the t-model likelihoods and samplers.

#[allow(unused_imports)]
use num_traits::Float;

/// Natural log of the Gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal CDF, evaluated through the complementary error function
/// so the tails keep full relative accuracy.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Scaled complementary error function `exp(x^2) * erfc(x)` for `x >= 0`.
///
/// The direct product overflows/underflows around x ~ 26, and loses digits
/// well before that, so above a modest threshold we switch to the Laplace
/// continued fraction, which never forms the exponential.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 4.0 {
        return libm::exp(x * x) * libm::erfc(x);
    }
    // erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut frac = 0.0;
    let mut k = 30;
    while k >= 1 {
        frac = (k as f64 / 2.0) / (x + frac);
        k -= 1;
    }
    core::f64::consts::FRAC_1_PI.sqrt() / (x + frac)
}

/// E[tau^a] for tau ~ Gamma(shape, rate), finite for a > -shape.
pub fn gamma_moment(shape: f64, rate: f64, a: f64) -> f64 {
    libm::exp(ln_gamma(shape + a) - ln_gamma(shape) - a * libm::log(rate))
}
