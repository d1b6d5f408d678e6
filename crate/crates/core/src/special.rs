//! Gamma-function helpers. Everything is evaluated in log space so that
//! constants stay finite for degrees in the hundreds.

use statrs::function::gamma::ln_gamma;

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "lgamma argument must be positive, got {x}");
    ln_gamma(x)
}

/// `ln (a)_n` where `(a)_n = Γ(a+n)/Γ(a)` is the rising factorial.
///
/// `(a)_0 = 1` for every `a`; for `n ≥ 1` the caller must ensure `a > 0`.
pub fn ln_pochhammer(a: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    lgamma(a + n as f64) - lgamma(a)
}

/// `ln n!`
pub fn ln_factorial(n: usize) -> f64 {
    lgamma(n as f64 + 1.0)
}
