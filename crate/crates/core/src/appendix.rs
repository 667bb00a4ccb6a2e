//! One-dimensional reductions of the local term for a static detector a
//! distance `d` from a static boundary.
//!
//! A stationary correlator `W(t - t')` reduces the Gaussian double integral
//! to `σ√π ∫ dy e^{-y²/4σ²} e^{-iΩy} W(y)`. The `y` integral runs over
//! `[-2·window·σ, 2·window·σ]`, which truncates the Gaussian at the same
//! level as the square window of the two-dimensional integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::Estimate;
use crate::error::{HarvestError, Result};
use crate::quadrature::{integrate_1d_with_breaks, QuadSpec};
use crate::specfun::ln_eps_i;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticProbeSpec {
    pub omega: f64,
    pub sigma: f64,
    /// Distance from the boundary.
    pub d: f64,
    pub eps: f64,
    /// IR cutoff, read only by the free (1+1)-dimensional probability.
    pub lambda_ir: f64,
}

impl StaticProbeSpec {
    pub fn new(omega: f64, sigma: f64, d: f64, eps: f64) -> Self {
        Self { omega, sigma, d, eps, lambda_ir: 1e-12 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarvestError::InvalidParameter(msg));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return bad(format!("d must be non-negative, got {}", self.d));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.lambda_ir > 0.0) {
            return bad(format!("lambda_ir must be positive, got {}", self.lambda_ir));
        }
        if !self.omega.is_finite() {
            return bad(format!("omega must be finite, got {}", self.omega));
        }
        Ok(())
    }
}

/// `σ√π ∫ dy e^{-y²/4σ²} e^{-iΩy} w(y)`, real part, with the imaginary
/// residue checked.
fn reduce<F>(spec: &StaticProbeSpec, quad: &QuadSpec, breaks: &[f64], w: F) -> Result<Estimate<f64>>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    quad.validate()?;
    let s = spec.sigma;
    let half = 2.0 * quad.window * s;
    let f = |y: f64| Complex64::from_polar((-y * y / (4.0 * s * s)).exp(), -spec.omega * y) * w(y);
    let r = integrate_1d_with_breaks(f, -half, half, breaks, quad);
    let scale = s * PI.sqrt();
    let value = r.value * scale;
    let err = r.err_estimate * scale;
    let tolerance = 10.0 * quad.abs_tol.max(quad.rel_tol * value.re.abs()).max(err);
    if value.im.abs() > tolerance || !value.re.is_finite() {
        return Err(HarvestError::ImaginaryResidue { quantity: "P", residue: value.im, tolerance });
    }
    Ok(Estimate { value: value.re, err, converged: r.converged })
}

/// Free part of the (3+1)-dimensional probability,
/// `-σ/√(16π³) ∫ dy e^{-y²/4σ²} e^{-iΩy} / (y - iε)²`.
pub fn p_free_3p1(spec: &StaticProbeSpec, quad: &QuadSpec) -> Result<Estimate<f64>> {
    let eps = spec.eps;
    reduce(spec, quad, &[0.0], |y| {
        let z = Complex64::new(y, -eps);
        -(z * z).inv() / (4.0 * PI * PI)
    })
}

/// Image part of the (3+1)-dimensional probability,
/// `σ/√(16π³) ∫ dy e^{-y²/4σ²} e^{-iΩy} / ((y - iε)² - 4d²)`.
pub fn p_image_3p1(spec: &StaticProbeSpec, quad: &QuadSpec) -> Result<Estimate<f64>> {
    let (eps, d) = (spec.eps, spec.d);
    reduce(spec, quad, &[-2.0 * d, 0.0, 2.0 * d], |y| {
        let z = Complex64::new(y, -eps);
        (z * z - 4.0 * d * d).inv() / (4.0 * PI * PI)
    })
}

/// (1+1)-dimensional probability in front of a static mirror,
/// `-σ/√(16π) ∫ dy e^{-iΩy} e^{-y²/4σ²} log[(ε+iy)² / ((ε+iy)² + 4d²)]`.
///
/// The logarithm is split into principal logs of `ε + i(y)`, `ε + i(y ± 2d)`
/// exactly as in the mirror correlator; no IR cutoff enters.
pub fn p_static_1p1(spec: &StaticProbeSpec, quad: &QuadSpec) -> Result<Estimate<f64>> {
    let (eps, d) = (spec.eps, spec.d);
    reduce(spec, quad, &[-2.0 * d, 0.0, 2.0 * d], |y| {
        let l = 2.0 * ln_eps_i(y, eps) - ln_eps_i(y + 2.0 * d, eps) - ln_eps_i(y - 2.0 * d, eps);
        -l / (4.0 * PI)
    })
}

/// (1+1)-dimensional free-space probability, which depends on the IR cutoff.
pub fn p_free_1p1(spec: &StaticProbeSpec, quad: &QuadSpec) -> Result<Estimate<f64>> {
    let eps = spec.eps;
    let two_ln_lambda = 2.0 * spec.lambda_ir.ln();
    reduce(spec, quad, &[0.0], |y| -(2.0 * ln_eps_i(y, eps) + two_ln_lambda) / (4.0 * PI))
}

/// Large-σ limit of `P/σ` for the (1+1)-dimensional static mirror,
/// `-√π Θ(-Ω)/Ω e^{2Ωε} (1 - cos 2Ωd)`.
pub fn p_rate_limit(omega: f64, d: f64, eps: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(HarvestError::InvalidParameter(format!(
            "rate limit needs a finite nonzero gap, got {omega}"
        )));
    }
    if omega > 0.0 {
        return Ok(0.0);
    }
    Ok(-PI.sqrt() / omega * (2.0 * omega * eps).exp() * (1.0 - (2.0 * omega * d).cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadSpec {
        QuadSpec { rel_tol: 1e-10, ..QuadSpec::default() }
    }

    #[test]
    fn rate_limit_examples() {
        assert_eq!(p_rate_limit(1.0, 3.0, 1e-4).unwrap(), 0.0);
        let v = p_rate_limit(-1.0, 1.0, 0.0).unwrap();
        assert!((v - 2.510_054_913_885_647).abs() < 1e-14);
        assert_eq!(p_rate_limit(-2.0, 0.0, 1e-4).unwrap(), 0.0);
        assert!(p_rate_limit(0.0, 1.0, 1e-4).is_err());
    }

    #[test]
    fn static_probability_vanishes_on_the_mirror() {
        let p = p_static_1p1(&StaticProbeSpec::new(1.0, 1.0, 0.0, 1e-4), &quad()).unwrap();
        assert_eq!(p.value, 0.0);
    }

    #[test]
    fn free_3p1_matches_closed_form() {
        // ε → 0: (1/4π)[e^{-Ω²σ²} - √π Ωσ erfc(Ωσ)]; the ε correction is O(ε).
        for omega in [0.5, 1.0, 2.0] {
            let p = p_free_3p1(&StaticProbeSpec::new(omega, 1.0, 0.0, 1e-6), &quad()).unwrap();
            let exact = ((-omega * omega).exp() - PI.sqrt() * omega * statrs::function::erf::erfc(omega))
                / (4.0 * PI);
            assert!(((p.value - exact) / exact).abs() < 1e-5, "Ω={omega}: {} vs {exact}", p.value);
        }
    }

    #[test]
    fn free_3p1_at_finite_epsilon() {
        // mpmath, 30 digits
        let p = p_free_3p1(&StaticProbeSpec::new(1.0, 1.0, 0.0, 1e-4), &quad()).unwrap();
        assert!((p.value / 0.007_087_871_743_098_83 - 1.0).abs() < 1e-8, "{}", p.value);
    }

    #[test]
    fn image_cancels_free_part_at_the_boundary() {
        let s = StaticProbeSpec::new(1.0, 1.0, 1e-7, 1e-4);
        let free = p_free_3p1(&s, &quad()).unwrap().value;
        let image = p_image_3p1(&s, &quad()).unwrap().value;
        assert!(((image + free) / free).abs() < 1e-5);
    }

    #[test]
    fn image_decays_with_distance() {
        let free = p_free_3p1(&StaticProbeSpec::new(1.0, 1.0, 100.0, 1e-4), &quad()).unwrap().value;
        let image = p_image_3p1(&StaticProbeSpec::new(1.0, 1.0, 100.0, 1e-4), &quad()).unwrap().value;
        assert!(image.abs() < 1e-2 * free);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(p_static_1p1(&StaticProbeSpec::new(1.0, 0.0, 1.0, 1e-4), &quad()).is_err());
        assert!(p_static_1p1(&StaticProbeSpec::new(1.0, 1.0, -1.0, 1e-4), &quad()).is_err());
        assert!(p_free_3p1(&StaticProbeSpec::new(1.0, 1.0, 1.0, 0.0), &quad()).is_err());
    }
}
