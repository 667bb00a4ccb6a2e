//! Mirror worldlines and their ray-tracing functions.
//!
//! A right-moving ray with null coordinate `u = t - x` that hits the mirror
//! reflects onto the left-moving coordinate `v = p(u)`. All three
//! trajectories have `p` defined and strictly increasing on the whole real
//! line.
//!
//! | kind | `p(u)` | `z(t)` |
//! |------|--------|--------|
//! | static | `u` | `0` |
//! | Carlitz-Willey | `-e^{-κu}/κ` | `-t - W(e^{-2κt})/κ` |
//! | black-hole collapse | `v_H - W(e^{-κ(u-v_H)})/κ` | `v_H - t - W(2e^{2κ(v_H-t)})/2κ` |
//!
//! The Carlitz-Willey position fixes its integration constant so the future
//! horizon is the null line `v = 0`. For the collapse mirror `κ = 1/4M`
//! relates the trajectory to a null shell forming a black hole of mass `M`.

use serde::{Deserialize, Serialize};

use crate::error::{HarvestError, Result};
use crate::specfun::lambert_w0_exp;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MirrorTrajectory {
    Static,
    CarlitzWilley { kappa: f64 },
    BlackHoleCollapse { kappa: f64, v_horizon: f64 },
}

impl MirrorTrajectory {
    pub fn carlitz_willey(kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self::CarlitzWilley { kappa })
    }

    pub fn black_hole_collapse(kappa: f64, v_horizon: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if !v_horizon.is_finite() {
            return Err(HarvestError::InvalidParameter(format!(
                "v_horizon must be finite, got {v_horizon}"
            )));
        }
        Ok(Self::BlackHoleCollapse { kappa, v_horizon })
    }

    /// Re-checks the invariants; useful after deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Static => Ok(()),
            Self::CarlitzWilley { kappa } => check_kappa(kappa),
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                Self::black_hole_collapse(kappa, v_horizon).map(|_| ())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Static => "static",
            Self::CarlitzWilley { .. } => "carlitz-willey",
            Self::BlackHoleCollapse { .. } => "black-hole-collapse",
        }
    }

    /// Ray-tracing function `p(u)`.
    pub fn ray_trace(&self, u: f64) -> f64 {
        match *self {
            Self::Static => u,
            Self::CarlitzWilley { kappa } => -(-kappa * u).exp() / kappa,
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                v_horizon - lambert_w0_exp(-kappa * (u - v_horizon)) / kappa
            }
        }
    }

    /// Analytic derivative `p'(u)`.
    pub fn ray_trace_deriv(&self, u: f64) -> f64 {
        match *self {
            Self::Static => 1.0,
            Self::CarlitzWilley { kappa } => (-kappa * u).exp(),
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                let w = lambert_w0_exp(-kappa * (u - v_horizon));
                w / (1.0 + w)
            }
        }
    }

    /// `p(u)` and `p'(u)` together, sharing the Lambert W evaluation.
    #[inline]
    pub fn ray_trace_with_deriv(&self, u: f64) -> (f64, f64) {
        match *self {
            Self::Static => (u, 1.0),
            Self::CarlitzWilley { kappa } => {
                let e = (-kappa * u).exp();
                (-e / kappa, e)
            }
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                let w = lambert_w0_exp(-kappa * (u - v_horizon));
                (v_horizon - w / kappa, w / (1.0 + w))
            }
        }
    }

    /// `p(u1) - p(u2)` without cancellation when `p` is exponentially large.
    #[inline]
    pub fn ray_trace_diff(&self, u1: f64, u2: f64) -> f64 {
        match *self {
            Self::CarlitzWilley { kappa } => {
                -(-kappa * u2).exp() * (-kappa * (u1 - u2)).exp_m1() / kappa
            }
            _ => self.ray_trace(u1) - self.ray_trace(u2),
        }
    }

    /// Inverse ray tracing: the `u` with `p(u) = v`, if `v` is in the range of `p`.
    pub fn ray_trace_inverse(&self, v: f64) -> Option<f64> {
        match *self {
            Self::Static => Some(v),
            Self::CarlitzWilley { kappa } => {
                (v < 0.0).then(|| -(-kappa * v).ln() / kappa)
            }
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                let w = kappa * (v_horizon - v);
                (w > 0.0).then(|| v_horizon - (w + w.ln()) / kappa)
            }
        }
    }

    /// Mirror position `z(t)`.
    pub fn mirror_position(&self, t: f64) -> f64 {
        match *self {
            Self::Static => 0.0,
            Self::CarlitzWilley { kappa } => -t - lambert_w0_exp(-2.0 * kappa * t) / kappa,
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                let w = lambert_w0_exp(LN_2 + 2.0 * kappa * (v_horizon - t));
                v_horizon - t - w / (2.0 * kappa)
            }
        }
    }

    /// Mirror velocity `dz/dt`, always in `(-1, 1)`.
    pub fn mirror_velocity(&self, t: f64) -> f64 {
        match *self {
            Self::Static => 0.0,
            Self::CarlitzWilley { kappa } => {
                let w = lambert_w0_exp(-2.0 * kappa * t);
                (w - 1.0) / (w + 1.0)
            }
            Self::BlackHoleCollapse { kappa, v_horizon } => {
                let w = lambert_w0_exp(LN_2 + 2.0 * kappa * (v_horizon - t));
                -1.0 / (w + 1.0)
            }
        }
    }

    /// True when `(t, x)` lies strictly left of the mirror, outside the field region.
    pub fn is_left_of_mirror(&self, t: f64, x: f64) -> bool {
        t + x < self.ray_trace(t - x)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(HarvestError::InvalidParameter(format!(
            "kappa must be positive and finite, got {kappa}"
        )))
    }
}
