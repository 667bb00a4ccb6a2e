//! Special functions used by the ray tracers and correlators.
//!
//! The principal branch of the Lambert W function is computed from a
//! piecewise initial guess polished by Halley iteration. Arguments of the
//! form `e^y` are handled by [`lambert_w0_exp`], which never forms `e^y`
//! and therefore stays finite for any finite `y`.

use num_complex::Complex64;

use crate::error::{HarvestError, Result};

const INV_E: f64 = 0.367_879_441_171_442_33;

/// Principal branch `W0(x)` of the Lambert W function, `w e^w = x`, `w >= -1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(HarvestError::Domain("lambert_w0 called with NaN".into()));
    }
    if x <= -INV_E {
        return Err(HarvestError::Domain(format!(
            "lambert_w0 requires x > -1/e, got {x}"
        )));
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(w0_unchecked(x))
}

/// `W0(e^y)` for any finite `y`, evaluated without forming `e^y`.
///
/// For large `y` this solves `w + ln w = y`; for very negative `y` the
/// series `W(x) = x - x^2 + 3x^3/2` is used directly.
pub fn lambert_w0_exp(y: f64) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    if y == f64::INFINITY {
        return f64::INFINITY;
    }
    if y < -40.0 {
        let x = y.exp();
        return x * (1.0 - x);
    }
    if y <= 2.0 {
        return w0_unchecked(y.exp());
    }
    // Asymptotic seed, then Newton/Halley on f(w) = w + ln w - y.
    let ly = y.ln();
    let mut w = y - ly + ly / y;
    for _ in 0..20 {
        let f = w + w.ln() - y;
        let fp = 1.0 + 1.0 / w;
        let fpp = -1.0 / (w * w);
        let step = f / (fp - 0.5 * f * fpp / fp);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}

fn w0_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut w = initial_guess(x);
    if x > 20.0 {
        // Iterate in log space; w e^w overflows long before x does.
        let lx = x.ln();
        for _ in 0..20 {
            let f = w + w.ln() - lx;
            let fp = 1.0 + 1.0 / w;
            let fpp = -1.0 / (w * w);
            let step = f / (fp - 0.5 * f * fpp / fp);
            w -= step;
            if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
                break;
            }
        }
        return w;
    }
    for _ in 0..32 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        w = next;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    w
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Branch-point expansion in p = sqrt(2(ex + 1)).
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x.abs() <= 0.25 {
        x * (1.0 - x * (1.0 - 1.5 * x))
    } else if x < 20.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// Principal logarithm of `eps + i*delta`, the factor appearing in every
/// iε-regularized massless correlator.
///
/// The imaginary part is `atan2(delta, eps)` and lies in `[-π/2, π/2]` for
/// `eps >= 0`.
pub fn log_ieps(delta: f64, eps: f64) -> Result<Complex64> {
    if delta.is_nan() || eps.is_nan() {
        return Err(HarvestError::Domain("log_ieps called with NaN".into()));
    }
    if eps < 0.0 {
        return Err(HarvestError::Domain(format!(
            "log_ieps requires eps >= 0, got {eps}"
        )));
    }
    if delta == 0.0 && eps == 0.0 {
        return Err(HarvestError::SingularArgument);
    }
    Ok(ln_eps_i(delta, eps))
}

/// Unchecked [`log_ieps`] for integrand inner loops.
#[inline]
pub(crate) fn ln_eps_i(delta: f64, eps: f64) -> Complex64 {
    Complex64::new(eps.hypot(delta).ln(), delta.atan2(eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(x: f64) -> f64 {
        let w = lambert_w0(x).unwrap();
        ((w * w.exp() - x) / x).abs()
    }

    #[test]
    fn lambert_trivial_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambert_matches_high_precision_values() {
        // mpmath.lambertw at 40 digits.
        let table = [
            (1e-8, 9.999_999_900_000_002e-9),
            (0.1, 0.091_276_527_160_862_27),
            (1.0, 0.567_143_290_409_784),
            (2.5, 0.958_586_356_728_702_9),
            (10.0, 1.745_528_002_740_699_4),
            (1e3, 5.249_602_852_401_596),
            (1e6, 11.383_358_086_140_053),
            (-0.3, -0.489_402_227_180_214_9),
            (-0.367_879_44, -0.999_920_198_484_151_4),
        ];
        for (x, w) in table {
            let (x, w): (f64, f64) = (x, w);
            let got = lambert_w0(x).unwrap();
            let tol = if x < -0.36 { 1e-9 } else { 2e-15 * w.abs().max(1e-300) };
            assert!((got - w).abs() <= tol, "W({x}) = {got}, want {w}");
        }
    }

    #[test]
    fn lambert_rejects_out_of_domain() {
        assert!(lambert_w0(-1.0).is_err());
        assert!(lambert_w0(-INV_E).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_residual_across_scales() {
        for x in [-0.36, -0.2, 1e-300, 1e-12, 0.3, 3.0, 19.9, 20.1, 1e10, 1e300] {
            assert!(residual(x) < 1e-13, "residual at {x}: {}", residual(x));
        }
    }

    #[test]
    fn lambert_of_exponential_agrees_with_direct() {
        for y in [-50.0, -39.0, -5.0, 0.0, 1.9, 2.1, 10.0, 100.0, 700.0] {
            let direct = lambert_w0(f64::exp(y)).unwrap();
            let via = lambert_w0_exp(y);
            assert!((direct - via).abs() <= 4e-15 * direct.abs(), "y={y}: {direct} vs {via}");
        }
        // Far beyond f64 range: w + ln w = y.
        let w = lambert_w0_exp(1e4);
        assert!((w + w.ln() - 1e4).abs() < 1e-11);
        assert!(lambert_w0_exp(-800.0) >= 0.0);
    }

    #[test]
    fn log_ieps_principal_values() {
        let z = log_ieps(0.0, 1.0).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
        let z = log_ieps(1.0, 0.0).unwrap();
        assert!(z.re.abs() < 1e-16 && (z.im - std::f64::consts::FRAC_PI_2).abs() < 1e-16);
        let z = log_ieps(-1.0, 0.0).unwrap();
        assert!(z.re.abs() < 1e-16 && (z.im + std::f64::consts::FRAC_PI_2).abs() < 1e-16);
        assert!(matches!(log_ieps(0.0, 0.0), Err(HarvestError::SingularArgument)));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lambert_inverts_product_log(x in -0.3678794..1e6f64) {
                let w = lambert_w0(x).unwrap();
                prop_assert!(w >= -1.0);
                let r = w * w.exp();
                prop_assert!((r - x).abs() <= 1e-13 * x.abs().max(1e-300) + 1e-16,
                    "x={} r={}", x, r);
            }

            #[test]
            fn lambert_is_increasing(a in -0.36f64..1e5, b in -0.36f64..1e5) {
                prop_assume!(a < b);
                prop_assert!(lambert_w0(a).unwrap() <= lambert_w0(b).unwrap());
            }

            #[test]
            fn log_ieps_conjugate_symmetry(d in -1e3f64..1e3, e in 1e-8f64..10.0) {
                let lhs = log_ieps(d, e).unwrap();
                let rhs = log_ieps(-d, e).unwrap().conj();
                prop_assert!((lhs - rhs).norm() <= 1e-15 * lhs.norm().max(1.0));
                prop_assert!(lhs.im > -std::f64::consts::PI && lhs.im <= std::f64::consts::PI);
            }
        }
    }
}
