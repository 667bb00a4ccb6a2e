//! Two-point functions of the massless field, pulled back to events.
//!
//! Linear coupling uses the Wightman function; derivative coupling uses its
//! mixed time derivative `A = ∂_t ∂_t' W`. Every logarithm of a product is
//! evaluated as a signed sum of principal logs of `ε + iΔ` factors, which
//! keeps each factor on the principal branch.
//!
//! Units: times and positions are measured in units of the switching width.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HarvestError, Result};
use crate::specfun::ln_eps_i;
use crate::trajectories::MirrorTrajectory;

const INV_4PI: f64 = 1.0 / (4.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    pub fn u(&self) -> f64 {
        self.t - self.x
    }

    pub fn v(&self) -> f64 {
        self.t + self.x
    }

    /// Parity image through `x = 0`.
    pub fn reflected(&self) -> Self {
        Self { t: self.t, x: -self.x }
    }
}

/// How derivative-coupling integrals are regularized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeRoute {
    /// Move both time derivatives onto the switching functions by parts and
    /// integrate against the Wightman function at `by_parts_epsilon`.
    ByParts,
    /// Integrate the double-pole correlator literally at each ε of the
    /// schedule and extrapolate the integrals to ε → 0.
    Richardson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regulators {
    /// UV smoothing ε.
    pub epsilon: f64,
    /// IR cutoff Λ; read only by the free-space linear correlator.
    pub lambda_ir: f64,
    /// Strictly decreasing ε values for extrapolation. Empty means `[epsilon]`.
    pub eps_schedule: Vec<f64>,
    pub derivative_route: DerivativeRoute,
    pub by_parts_epsilon: f64,
}

impl Default for Regulators {
    fn default() -> Self {
        Self::linear_default()
    }
}

impl Regulators {
    pub fn linear_default() -> Self {
        Self {
            epsilon: 1e-4,
            lambda_ir: 1e-12,
            eps_schedule: Vec::new(),
            derivative_route: DerivativeRoute::ByParts,
            by_parts_epsilon: 1e-10,
        }
    }

    pub fn derivative_default() -> Self {
        Self {
            epsilon: 1e-3,
            eps_schedule: vec![4e-3, 2e-3, 1e-3],
            ..Self::linear_default()
        }
    }

    pub fn for_coupling(coupling: Coupling) -> Self {
        match coupling {
            Coupling::Linear => Self::linear_default(),
            Coupling::Derivative => Self::derivative_default(),
        }
    }

    pub fn with_lambda(mut self, lambda_ir: f64) -> Self {
        self.lambda_ir = lambda_ir;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self.eps_schedule.clear();
        self
    }

    /// The ε values at which integrals are evaluated.
    pub fn schedule(&self) -> Vec<f64> {
        if self.eps_schedule.is_empty() {
            vec![self.epsilon]
        } else {
            self.eps_schedule.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarvestError::InvalidParameter(msg));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.lambda_ir > 0.0 && self.lambda_ir.is_finite()) {
            return bad(format!("lambda_ir must be positive, got {}", self.lambda_ir));
        }
        if !(self.by_parts_epsilon > 0.0) {
            return bad(format!(
                "by_parts_epsilon must be positive, got {}",
                self.by_parts_epsilon
            ));
        }
        if self.eps_schedule.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("eps_schedule entries must be positive".into());
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps_schedule must be strictly decreasing".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    Linear,
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Background {
    FreeSpace,
    Mirror(MirrorTrajectory),
}

impl Background {
    pub fn mirror(&self) -> Option<&MirrorTrajectory> {
        match self {
            Self::FreeSpace => None,
            Self::Mirror(m) => Some(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorRequest {
    pub coupling: Coupling,
    pub background: Background,
}

impl CorrelatorRequest {
    pub fn new(coupling: Coupling, background: Background) -> Self {
        Self { coupling, background }
    }

    /// Pointwise correlator `K(a, b)` at `reg.epsilon`.
    pub fn evaluate(&self, a: Event, b: Event, reg: &Regulators) -> PointValue {
        match (self.coupling, self.background) {
            (Coupling::Linear, Background::FreeSpace) => PointValue::inside(wightman_free(a, b, reg)),
            (Coupling::Derivative, Background::FreeSpace) => PointValue::inside(a_free(a, b, reg.epsilon)),
            (Coupling::Linear, Background::Mirror(m)) => wightman_mirror(&m, a, b, reg.epsilon),
            (Coupling::Derivative, Background::Mirror(m)) => a_mirror(&m, a, b, reg.epsilon),
        }
    }
}

/// A correlator value tagged with whether either event lies left of the mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: Complex64,
    pub out_of_region: bool,
}

impl PointValue {
    fn inside(value: Complex64) -> Self {
        Self { value, out_of_region: false }
    }
}

/// Null data of an event as seen through a background: `v`, the traced
/// `p(u)` (just `u` in free space) and `p'(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NullPoint {
    pub u: f64,
    pub v: f64,
    pub pu: f64,
    pub dpu: f64,
}

impl NullPoint {
    #[inline]
    pub fn new(background: &Background, t: f64, x: f64) -> Self {
        let u = t - x;
        let (pu, dpu) = match background {
            Background::FreeSpace => (u, 1.0),
            Background::Mirror(m) => m.ray_trace_with_deriv(u),
        };
        Self { u, v: t + x, pu, dpu }
    }

    fn left_of_mirror(&self) -> bool {
        self.v < self.pu
    }
}

/// The pointwise kernel used inside integrands.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    pub background: Background,
    pub coupling: Coupling,
    pub eps: f64,
    /// `2 ln Λ`, read only for free-space linear coupling.
    pub two_ln_lambda: f64,
}

impl Kernel {
    pub fn new(req: &CorrelatorRequest, eps: f64, lambda_ir: f64) -> Self {
        Self {
            background: req.background,
            coupling: req.coupling,
            eps,
            two_ln_lambda: 2.0 * lambda_ir.ln(),
        }
    }

    #[inline]
    pub fn eval(&self, a: &NullPoint, b: &NullPoint) -> Complex64 {
        match (self.coupling, &self.background) {
            (Coupling::Linear, Background::FreeSpace) => {
                let s = ln_eps_i(a.pu - b.pu, self.eps) + ln_eps_i(a.v - b.v, self.eps);
                -(s + self.two_ln_lambda) * INV_4PI
            }
            (Coupling::Linear, Background::Mirror(m)) => linear_mirror(m, a, b, self.eps),
            (Coupling::Derivative, Background::FreeSpace) => {
                -(inv_sq(a.pu - b.pu, self.eps) + inv_sq(a.v - b.v, self.eps)) * INV_4PI
            }
            (Coupling::Derivative, Background::Mirror(m)) => derivative_mirror(m, a, b, self.eps),
        }
    }

    /// Singular lines of `K(x_a(t), x_b(s))` in `s` for static events at
    /// `x_a`, `x_b`, pushed onto `out`.
    pub fn singular_times(&self, t: f64, x_a: f64, x_b: f64, out: &mut Vec<f64>) {
        out.push(t - x_a + x_b);
        out.push(t + x_a - x_b);
        if let Background::Mirror(m) = &self.background {
            out.push(m.ray_trace(t - x_a) - x_b);
            if let Some(u) = m.ray_trace_inverse(t + x_a) {
                out.push(x_b + u);
            }
        }
    }
}

#[inline]
fn linear_mirror(m: &MirrorTrajectory, a: &NullPoint, b: &NullPoint, eps: f64) -> Complex64 {
    let s = ln_eps_i(p_diff(m, a, b), eps) + ln_eps_i(a.v - b.v, eps)
        - ln_eps_i(a.pu - b.v, eps)
        - ln_eps_i(a.v - b.pu, eps);
    -s * INV_4PI
}

#[inline]
fn derivative_mirror(m: &MirrorTrajectory, a: &NullPoint, b: &NullPoint, eps: f64) -> Complex64 {
    let s = inv_sq(p_diff(m, a, b), eps) * (a.dpu * b.dpu) + inv_sq(a.v - b.v, eps)
        - inv_sq(a.v - b.pu, eps) * b.dpu
        - inv_sq(a.pu - b.v, eps) * a.dpu;
    -s * INV_4PI
}

#[inline]
fn p_diff(m: &MirrorTrajectory, a: &NullPoint, b: &NullPoint) -> f64 {
    match m {
        MirrorTrajectory::CarlitzWilley { .. } => m.ray_trace_diff(a.u, b.u),
        _ => a.pu - b.pu,
    }
}

/// `1 / (Δ - iε)^2`
#[inline]
fn inv_sq(delta: f64, eps: f64) -> Complex64 {
    let z = Complex64::new(delta, -eps);
    (z * z).inv()
}

/// Free-space Wightman function `-(1/4π) log[Λ²(ε + iΔu)(ε + iΔv)]`.
pub fn wightman_free(a: Event, b: Event, reg: &Regulators) -> Complex64 {
    let s = ln_eps_i(a.u() - b.u(), reg.epsilon) + ln_eps_i(a.v() - b.v(), reg.epsilon);
    -(s + 2.0 * reg.lambda_ir.ln()) * INV_4PI
}

/// Wightman function in the presence of a mirror. No IR cutoff appears.
pub fn wightman_mirror(traj: &MirrorTrajectory, a: Event, b: Event, eps: f64) -> PointValue {
    let bg = Background::Mirror(*traj);
    let na = NullPoint::new(&bg, a.t, a.x);
    let nb = NullPoint::new(&bg, b.t, b.x);
    PointValue {
        value: linear_mirror(traj, &na, &nb, eps),
        out_of_region: na.left_of_mirror() || nb.left_of_mirror(),
    }
}

/// Free-space derivative-coupling correlator `-(1/4π)[1/(Δu - iε)² + 1/(Δv - iε)²]`.
pub fn a_free(a: Event, b: Event, eps: f64) -> Complex64 {
    -(inv_sq(a.u() - b.u(), eps) + inv_sq(a.v() - b.v(), eps)) * INV_4PI
}

/// Derivative-coupling correlator in the presence of a mirror.
pub fn a_mirror(traj: &MirrorTrajectory, a: Event, b: Event, eps: f64) -> PointValue {
    let bg = Background::Mirror(*traj);
    let na = NullPoint::new(&bg, a.t, a.x);
    let nb = NullPoint::new(&bg, b.t, b.x);
    PointValue {
        value: derivative_mirror(traj, &na, &nb, eps),
        out_of_region: na.left_of_mirror() || nb.left_of_mirror(),
    }
}

/// (3+1)D Wightman function for a static detector a distance `d` from a
/// Dirichlet plane, as a function of the proper-time difference.
pub fn wightman_halfspace_3p1(dtau: f64, d: f64, eps: f64) -> Complex64 {
    let z = Complex64::new(dtau, -eps);
    let z2 = z * z;
    -(z2.inv() - (z2 - 4.0 * d * d).inv()) / (4.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw() -> MirrorTrajectory {
        MirrorTrajectory::carlitz_willey(0.5).unwrap()
    }

    fn bhc() -> MirrorTrajectory {
        MirrorTrajectory::black_hole_collapse(0.25, 0.0).unwrap()
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm()
    }

    #[test]
    fn free_wightman_examples() {
        let reg = Regulators { epsilon: 1.0, lambda_ir: 1.0, ..Regulators::default() };
        let p = Event::new(0.3, 0.1);
        assert_eq!(wightman_free(p, p, &reg), Complex64::new(0.0, 0.0));

        let reg = Regulators { epsilon: 1e-300, lambda_ir: 1.0, ..Regulators::default() };
        let w = wightman_free(Event::new(1.0, 0.0), Event::new(0.0, 0.0), &reg);
        // Δu = Δv = 1 so both logs are iπ/2.
        assert!(close(w, Complex64::new(0.0, -0.25), 1e-15));

        // mpmath at 40 digits.
        let reg = Regulators { epsilon: 1e-4, lambda_ir: 1e-12, ..Regulators::default() };
        let w = wightman_free(Event::new(1.0, 0.0), Event::new(0.0, 0.0), &reg);
        let want = Complex64::new(4.397_613_592_480_792, -0.249_984_084_505_743_86);
        assert!(close(w, want, 1e-10));
    }

    #[test]
    fn mirror_wightman_examples() {
        let s = MirrorTrajectory::Static;
        let on = Event::new(0.7, 0.0);
        assert_eq!(wightman_mirror(&s, on, on, 1e-4).value, Complex64::new(0.0, 0.0));

        // mpmath at 40 digits.
        let w = wightman_mirror(&cw(), Event::new(0.0, 2.0), Event::new(1.0, 3.0), 1e-4);
        assert!(close(w.value, Complex64::new(1.016_060_590_978_685, 0.124_995_794_331_174_26), 1e-10));
        assert!(!w.out_of_region);
        let w = wightman_mirror(&bhc(), Event::new(0.0, 2.0), Event::new(1.0, 3.0), 1e-4);
        assert!(close(w.value, Complex64::new(0.962_465_522_326_490_6, 0.124_995_576_362_725_24), 1e-10));
    }

    #[test]
    fn out_of_region_flag() {
        let w = wightman_mirror(&cw(), Event::new(0.0, -3.0), Event::new(1.0, 3.0), 1e-4);
        assert!(w.out_of_region);
        let a = a_mirror(&MirrorTrajectory::Static, Event::new(0.0, 1.0), Event::new(0.0, -1.0), 1e-3);
        assert!(a.out_of_region);
    }

    #[test]
    fn derivative_examples() {
        let p = Event::new(0.2, 0.4);
        // -(1/4π)(2/(-i)^2) with the squared poles of ∂_t∂_t' W.
        let a = a_free(p, p, 1.0);
        assert!(close(a, Complex64::new(1.0 / (2.0 * PI), 0.0), 1e-15));

        let on = Event::new(0.3, 0.0);
        assert!(a_mirror(&MirrorTrajectory::Static, on, on, 1e-3).value.norm() < 1e-12);

        // mpmath at 40 digits.
        let a = a_mirror(&cw(), Event::new(0.0, 2.0), Event::new(0.5, 2.5), 1e-3);
        assert!(close(a.value, Complex64::new(588_002.328_837_461, 1.594_861_078_688_403_4e-4), 1e-10));
    }

    #[test]
    fn halfspace_examples() {
        let w = wightman_halfspace_3p1(0.0, 1.0, 1.0);
        let want = -(-1.0 + 1.0 / 5.0) / (4.0 * PI * PI);
        assert!(close(w, Complex64::new(want, 0.0), 1e-15));

        let w = wightman_halfspace_3p1(2.0, 1.0, 1e-3);
        let want = Complex64::new(-0.007_915_712_623_682_672, 6.332_567_249_289_450_5);
        assert!(close(w, want, 1e-10));

        let near = wightman_halfspace_3p1(0.7, 0.0, 1e-2);
        assert!(near.norm() < 1e-12);
        let far = wightman_halfspace_3p1(0.7, 1e8, 1e-2);
        let z = Complex64::new(0.7, -1e-2);
        let free = -(z * z).inv() / (4.0 * PI * PI);
        assert!(close(far, free, 1e-15));
    }

    #[test]
    fn static_mirror_wightman_is_an_image_difference() {
        let s = MirrorTrajectory::Static;
        for lambda in [1e-3, 1e-12] {
            let reg = Regulators { epsilon: 1e-4, lambda_ir: lambda, ..Regulators::default() };
            let a = Event::new(0.3, 1.2);
            let b = Event::new(-0.4, 2.5);
            let img = wightman_free(a, b, &reg) - wightman_free(a, b.reflected(), &reg);
            assert!((wightman_mirror(&s, a, b, 1e-4).value - img).norm() < 1e-12);
        }
    }

    #[test]
    fn regulator_validation() {
        assert!(Regulators::default().validate().is_ok());
        assert!(Regulators::derivative_default().validate().is_ok());
        let r = Regulators { eps_schedule: vec![1e-3, 2e-3], ..Regulators::default() };
        assert!(r.validate().is_err());
        let r = Regulators { epsilon: 0.0, ..Regulators::default() };
        assert!(r.validate().is_err());
        let r = Regulators { lambda_ir: -1.0, ..Regulators::default() };
        assert!(r.validate().is_err());
        assert_eq!(Regulators::default().schedule(), vec![1e-4]);
    }

    #[test]
    fn singular_times_hit_the_poles() {
        for bg in [Background::FreeSpace, Background::Mirror(cw()), Background::Mirror(bhc())] {
            let kernel = Kernel::new(&CorrelatorRequest::new(Coupling::Linear, bg), 1e-12, 1.0);
            let (t, xa, xb) = (0.4, 1.5, 3.0);
            let mut ts = Vec::new();
            kernel.singular_times(t, xa, xb, &mut ts);
            let a = NullPoint::new(&bg, t, xa);
            for s in ts {
                let b = NullPoint::new(&bg, s, xb);
                let near = [a.pu - b.pu, a.v - b.v, a.pu - b.v, a.v - b.pu]
                    .iter()
                    .map(|d| d.abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(near < 1e-9, "{bg:?} s={s} gap={near}");
            }
        }
    }

    fn mixed_fd<F: Fn(Event, Event) -> Complex64>(w: F, a: Event, b: Event, h: f64) -> Complex64 {
        let sh = |e: Event, dt: f64| Event::new(e.t + dt, e.x);
        (w(sh(a, h), sh(b, h)) - w(sh(a, h), sh(b, -h)) - w(sh(a, -h), sh(b, h)) + w(sh(a, -h), sh(b, -h)))
            / (4.0 * h * h)
    }

    #[test]
    fn derivative_correlators_match_finite_differences() {
        let reg = Regulators { epsilon: 1e-3, lambda_ir: 1e-6, ..Regulators::default() };
        let (a, b) = (Event::new(1.0, 0.3), Event::new(0.0, 0.0));
        let fd = mixed_fd(|a, b| wightman_free(a, b, &reg), a, b, 1e-4);
        assert!(close(a_free(a, b, 1e-3), fd, 1e-4));

        let (a, b) = (Event::new(0.2, 1.1), Event::new(-0.9, 2.7));
        for m in [MirrorTrajectory::Static, cw(), bhc()] {
            let fd = mixed_fd(|a, b| wightman_mirror(&m, a, b, 1e-3).value, a, b, 1e-4);
            let exact = a_mirror(&m, a, b, 1e-3).value;
            assert!(close(exact, fd, 1e-4), "{}: {exact} vs {fd}", m.name());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn trajectories() -> [MirrorTrajectory; 3] {
            [MirrorTrajectory::Static, cw(), bhc()]
        }

        fn event() -> impl Strategy<Value = Event> {
            (-5.0f64..5.0, 0.0f64..6.0).prop_map(|(t, x)| Event::new(t, x))
        }

        proptest! {
            #[test]
            fn hermiticity(a in event(), b in event(), eps in 1e-4f64..1e-1, which in 0usize..3) {
                let reg = Regulators { epsilon: eps, lambda_ir: 1e-6, ..Regulators::default() };
                let m = trajectories()[which];
                let pairs = [
                    (wightman_free(a, b, &reg), wightman_free(b, a, &reg)),
                    (a_free(a, b, eps), a_free(b, a, eps)),
                    (wightman_mirror(&m, a, b, eps).value, wightman_mirror(&m, b, a, eps).value),
                    (a_mirror(&m, a, b, eps).value, a_mirror(&m, b, a, eps).value),
                    (wightman_halfspace_3p1(a.t - b.t, b.x, eps), wightman_halfspace_3p1(b.t - a.t, b.x, eps)),
                ];
                for (ab, ba) in pairs {
                    prop_assert!((ab - ba.conj()).norm() <= 1e-12 * ab.norm().max(1.0));
                }
            }

            #[test]
            fn dirichlet_on_worldline(t in -10.0f64..10.0, b in event(), which in 0usize..3) {
                let m = trajectories()[which];
                let on = Event::new(t, m.mirror_position(t));
                let w1 = wightman_mirror(&m, on, b, 1e-2).value;
                let w2 = wightman_mirror(&m, b, on, 1e-2).value;
                prop_assert!(w1.norm() < 1e-12 && w2.norm() < 1e-12, "{} {}", w1, w2);
                if which == 0 {
                    prop_assert!(a_mirror(&m, on, b, 1e-2).value.norm() < 1e-12);
                }
            }
        }
    }
}
