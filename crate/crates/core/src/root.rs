//! Safeguarded Newton iteration for a scalar root inside a sign-change bracket.

/// Finds a root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// `f` returns the value and derivative. Newton steps that leave the current
/// bracket, or fail to halve it, fall back to bisection.
pub fn safeguarded_newton<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo.signum() != fhi.signum(), "bracket has no sign change");
    let mut x = 0.5 * (lo + hi);
    let mut prev_width = hi - lo;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let width = hi - lo;
        if width <= xtol * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let newton = x - fx / dfx;
        let inside = newton.is_finite() && newton > lo && newton < hi;
        let shrinking = width < 0.5 * prev_width || (newton - x).abs() < 0.25 * width;
        x = if inside && shrinking {
            newton
        } else {
            0.5 * (lo + hi)
        };
        prev_width = width;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = safeguarded_newton(|x| (x * x - 2.0, 2.0 * x), 0.0, 5.0, 1e-15, 200);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn survives_flat_derivative() {
        // cube root near a flat region: Newton alone would overshoot badly
        let r = safeguarded_newton(|x| (x.powi(3) - 1e-3, 3.0 * x * x), -1.0, 1.0, 1e-15, 400);
        assert!((r - 0.1).abs() < 1e-13);
    }

    #[test]
    fn decreasing_function() {
        let r = safeguarded_newton(|x| (1.0 - x.exp(), -x.exp()), -3.0, 2.0, 1e-15, 200);
        assert!(r.abs() < 1e-14);
    }
}
