//! Static detectors with Gaussian switching and the pointwise integrands of
//! the local and nonlocal terms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{CorrelatorRequest, Event, Regulators};
use crate::error::{HarvestError, Result};
use crate::trajectories::MirrorTrajectory;

/// One detector held at fixed `x_pos`, switched on around `t_center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    /// Energy gap Ω.
    pub omega: f64,
    pub t_center: f64,
    pub x_pos: f64,
    /// Switching width σ.
    pub sigma: f64,
}

impl DetectorSpec {
    pub fn new(omega: f64, t_center: f64, x_pos: f64, sigma: f64) -> Result<Self> {
        let spec = Self { omega, t_center, x_pos, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(HarvestError::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        for (name, v) in [("omega", self.omega), ("t_center", self.t_center), ("x_pos", self.x_pos)] {
            if !v.is_finite() {
                return Err(HarvestError::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Gaussian switching `exp(-(t - t_center)^2 / 2σ^2)`.
    #[inline]
    pub fn switching(&self, t: f64) -> f64 {
        let z = (t - self.t_center) / self.sigma;
        (-0.5 * z * z).exp()
    }

    /// `[t_center - window·σ, t_center + window·σ]`
    pub fn time_window(&self, window: f64) -> (f64, f64) {
        (self.t_center - window * self.sigma, self.t_center + window * self.sigma)
    }

    pub fn event(&self, t: f64) -> Event {
        Event::new(t, self.x_pos)
    }

    /// Whether the detector sits left of the mirror at any sampled time in the window.
    pub fn crosses_mirror(&self, mirror: &MirrorTrajectory, window: f64) -> bool {
        let (lo, hi) = self.time_window(window);
        (0..=200).any(|i| {
            let t = lo + (hi - lo) * i as f64 / 200.0;
            mirror.is_left_of_mirror(t, self.x_pos)
        })
    }
}

/// Two identical detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorPair {
    pub a: DetectorSpec,
    pub b: DetectorSpec,
}

impl DetectorPair {
    pub fn new(a: DetectorSpec, b: DetectorSpec) -> Result<Self> {
        let pair = Self { a, b };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        self.a.validate()?;
        self.b.validate()?;
        if self.a.sigma != self.b.sigma {
            return Err(HarvestError::InvalidParameter(format!(
                "detectors must share sigma ({} vs {})",
                self.a.sigma, self.b.sigma
            )));
        }
        if self.a.omega != self.b.omega {
            return Err(HarvestError::InvalidParameter(format!(
                "detectors must share the gap ({} vs {})",
                self.a.omega, self.b.omega
            )));
        }
        Ok(())
    }

    /// `Δx = x_B - x_A`
    pub fn separation(&self) -> f64 {
        self.b.x_pos - self.a.x_pos
    }

    /// Distance of detector A from the mirror at its switching peak.
    pub fn distance_from_mirror(&self, mirror: &MirrorTrajectory) -> f64 {
        self.a.x_pos - mirror.mirror_position(self.a.t_center)
    }
}

/// Which time ordering of the nonlocal integrand to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `t' > t`: correlator `K(x_A(t), x_B(t'))`.
    AB,
    /// `t' < t`: correlator `K(x_B(t'), x_A(t))`.
    BA,
}

/// Pointwise integrand of the local term,
/// `χ(t)χ(t') e^{-iΩ(t-t')} K(x(t), x(t'))`, at `reg.epsilon`.
pub fn p_integrand(spec: &DetectorSpec, req: &CorrelatorRequest, reg: &Regulators, t: f64, tp: f64) -> Complex64 {
    let envelope = spec.switching(t) * spec.switching(tp);
    let phase = Complex64::from_polar(1.0, -spec.omega * (t - tp));
    envelope * phase * req.evaluate(spec.event(t), spec.event(tp), reg).value
}

/// Pointwise integrand of the nonlocal term for one ordering,
/// `χ_A(t)χ_B(t') e^{-iΩ(t+t')} K`, without the overall minus sign.
pub fn x_integrand(
    pair: &DetectorPair,
    req: &CorrelatorRequest,
    reg: &Regulators,
    t: f64,
    tp: f64,
    ordering: Ordering,
) -> Complex64 {
    let envelope = pair.a.switching(t) * pair.b.switching(tp);
    let phase = Complex64::from_polar(1.0, -pair.a.omega * (t + tp));
    let (ea, eb) = (pair.a.event(t), pair.b.event(tp));
    let k = match ordering {
        Ordering::AB => req.evaluate(ea, eb, reg),
        Ordering::BA => req.evaluate(eb, ea, reg),
    };
    envelope * phase * k.value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::{wightman_free, Background, Coupling};

    fn spec(x: f64) -> DetectorSpec {
        DetectorSpec::new(1.0, 0.0, x, 1.0).unwrap()
    }

    #[test]
    fn switching_profile() {
        let s = DetectorSpec::new(1.0, 2.0, 0.0, 1.5).unwrap();
        assert_eq!(s.switching(2.0), 1.0);
        assert!((s.switching(3.5) - (-0.5f64).exp()).abs() < 1e-16);
        assert_eq!(s.switching(2.75), s.switching(1.25));
    }

    #[test]
    fn invalid_detectors_rejected() {
        assert!(DetectorSpec::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(DetectorSpec::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
        let a = spec(1.0);
        let b = DetectorSpec { sigma: 2.0, ..a };
        assert!(DetectorPair::new(a, b).is_err());
        let b = DetectorSpec { omega: 2.0, ..a };
        assert!(DetectorPair::new(a, b).is_err());
    }

    #[test]
    fn local_integrand_on_diagonal_has_no_phase() {
        let req = CorrelatorRequest::new(Coupling::Linear, Background::FreeSpace);
        let reg = Regulators::default();
        let s = spec(2.0);
        let got = p_integrand(&s, &req, &reg, 0.4, 0.4);
        let want = s.switching(0.4).powi(2) * wightman_free(s.event(0.4), s.event(0.4), &reg);
        assert!((got - want).norm() < 1e-15 * want.norm());
    }

    #[test]
    fn integrands_vanish_on_static_mirror() {
        let req = CorrelatorRequest::new(Coupling::Linear, Background::Mirror(MirrorTrajectory::Static));
        let reg = Regulators::default();
        assert_eq!(p_integrand(&spec(0.0), &req, &reg, 0.3, -0.8).norm(), 0.0);
        let pair = DetectorPair::new(spec(0.0), spec(0.0)).unwrap();
        for o in [Ordering::AB, Ordering::BA] {
            assert_eq!(x_integrand(&pair, &req, &reg, 0.3, -0.8, o).norm(), 0.0);
        }
    }

    #[test]
    fn integrands_match_high_precision_values() {
        // mpmath at 40 digits: free space, Λ = 1e-12, ε = 1e-4, Ω = 1.
        let req = CorrelatorRequest::new(Coupling::Linear, Background::FreeSpace);
        let reg = Regulators::default();
        let got = p_integrand(&spec(1.0), &req, &reg, 0.3, -0.5);
        let want = Complex64::new(2.454_444_744_973_927_4, -2.829_899_986_755_945_4);
        assert!((got - want).norm() < 1e-12 * want.norm(), "{got}");

        let cw = MirrorTrajectory::carlitz_willey(0.5).unwrap();
        let req = CorrelatorRequest::new(Coupling::Linear, Background::Mirror(cw));
        let pair = DetectorPair::new(spec(2.0), spec(4.0)).unwrap();
        let got = x_integrand(&pair, &req, &reg, 0.3, 1.1, Ordering::AB);
        let want = Complex64::new(0.016_136_354_910_365_093, -0.093_558_843_306_681_36);
        assert!((got - want).norm() < 1e-12 * want.norm(), "{got}");
    }

    #[test]
    fn crossing_detection() {
        let cw = MirrorTrajectory::carlitz_willey(0.5).unwrap();
        // At t = -20 the mirror sits near x = -14 and moves right at ~0.9.
        let far = DetectorSpec::new(1.0, -20.0, 0.0, 1.0).unwrap();
        assert!(!far.crosses_mirror(&cw, 5.0));
        let near = DetectorSpec::new(1.0, -20.0, -12.0, 1.0).unwrap();
        assert!(near.crosses_mirror(&cw, 5.0));
        assert!(spec(-1.0).crosses_mirror(&MirrorTrajectory::Static, 5.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn local_integrand_is_hermitian(t in -4.0f64..4.0, tp in -4.0f64..4.0, x in 0.5f64..5.0, which in 0usize..3) {
                let bg = [
                    Background::FreeSpace,
                    Background::Mirror(MirrorTrajectory::Static),
                    Background::Mirror(MirrorTrajectory::carlitz_willey(0.5).unwrap()),
                ][which];
                let reg = Regulators::default();
                for c in [Coupling::Linear, Coupling::Derivative] {
                    let req = CorrelatorRequest::new(c, bg);
                    let s = spec(x);
                    let f1 = p_integrand(&s, &req, &reg, t, tp);
                    let f2 = p_integrand(&s, &req, &reg, tp, t);
                    prop_assert!((f1 - f2.conj()).norm() <= 1e-12 * f1.norm().max(1e-300));
                }
            }
        }
    }
}
