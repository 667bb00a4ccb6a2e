//! Local and nonlocal terms of the two-detector density matrix and the
//! entanglement measures built from them.
//!
//! Every double integral is computed row by row: for each outer time `t`
//! the inner integral over `t'` is split at the times where the correlator
//! is singular (direct and mirror-reflected light cones), so the adaptive
//! rule only ever sees an ε-smoothed singularity at a panel edge.
//!
//! Derivative coupling is computed by default with both time derivatives
//! moved onto the switching functions (integration by parts), leaving the
//! log-singular Wightman function at a tiny ε. This avoids resolving double
//! poles whose width in `u` collapses to `ε / p'(u)` near an accelerating
//! mirror. The literal route, integrating the double-pole correlator at each
//! ε of a schedule and extrapolating to ε → 0, is kept for cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{Background, Coupling, CorrelatorRequest, DerivativeRoute, Kernel, NullPoint, Regulators};
use crate::detectors::{DetectorPair, DetectorSpec};
use crate::error::{HarvestError, Result};
use crate::quadrature::{integrate_rows, QuadResult, QuadSpec, Rect, Region};

/// A computed quantity with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub err: f64,
    pub converged: bool,
}

/// Non-fatal conditions attached to a [`HarvestResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// A detector is left of the mirror somewhere in its switching window.
    MirrorCrossing,
    NotConverged { quantity: String },
    /// A slightly negative probability was reported as zero.
    NegativeClamped { quantity: String, value: f64 },
}

impl Warning {
    /// Compact form used in tabular output.
    pub fn code(&self) -> String {
        match self {
            Self::MirrorCrossing => "mirror_crossing".into(),
            Self::NotConverged { quantity } => format!("not_converged:{quantity}"),
            Self::NegativeClamped { quantity, .. } => format!("clamped:{quantity}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorEstimates {
    pub p_a: f64,
    pub p_b: f64,
    pub x_nonlocal: f64,
}

/// Leading-order harvesting observables, per unit squared coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestResult {
    pub p_a: f64,
    pub p_b: f64,
    pub x_nonlocal: Complex64,
    pub concurrence: f64,
    pub negativity: f64,
    pub err: ErrorEstimates,
    pub warnings: Vec<Warning>,
}

impl HarvestResult {
    pub fn sqrt_papb(&self) -> f64 {
        (self.p_a * self.p_b).sqrt()
    }

    pub fn density_matrix(&self) -> DensityMatrix2Q {
        DensityMatrix2Q::assemble(self.p_a, self.p_b, self.x_nonlocal)
    }
}

/// `2 max{0, |X| - sqrt(P_A P_B)}`
pub fn concurrence(p_a: f64, p_b: f64, x: Complex64) -> f64 {
    2.0 * (x.norm() - (p_a * p_b).sqrt()).max(0.0)
}

/// `max{0, sqrt(|X|^2 - ((P_A - P_B)/2)^2) - (P_A + P_B)/2}`, zero when the
/// square root would be imaginary.
pub fn negativity(p_a: f64, p_b: f64, x: Complex64) -> f64 {
    let half_diff = 0.5 * (p_a - p_b);
    let disc = x.norm_sqr() - half_diff * half_diff;
    if disc < 0.0 {
        return 0.0;
    }
    (disc.sqrt() - 0.5 * (p_a + p_b)).max(0.0)
}

/// Leading-order two-detector state in the `{gg, ge, eg, ee}` basis. The
/// `ge`/`eg` coherence is not computed and set to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2Q {
    pub m: [[Complex64; 4]; 4],
}

impl DensityMatrix2Q {
    pub fn assemble(p_a: f64, p_b: f64, x: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let re = |v: f64| Complex64::new(v, 0.0);
        let mut m = [[zero; 4]; 4];
        m[0][0] = re(1.0 - p_a - p_b);
        m[0][3] = x.conj();
        m[1][1] = re(p_b);
        m[2][2] = re(p_a);
        m[3][0] = x;
        Self { m }
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.m[i][j] - self.m[j][i].conj()).norm() <= tol))
    }
}

/// `χ(t) e^{iφt}`, or its time derivative.
#[derive(Debug, Clone, Copy)]
struct Envelope {
    t_center: f64,
    sigma: f64,
    freq: f64,
    derivative: bool,
}

impl Envelope {
    fn new(spec: &DetectorSpec, freq: f64, derivative: bool) -> Self {
        Self { t_center: spec.t_center, sigma: spec.sigma, freq, derivative }
    }

    #[inline]
    fn at(&self, t: f64) -> Complex64 {
        let dt = t - self.t_center;
        let z = dt / self.sigma;
        let g = Complex64::from_polar((-0.5 * z * z).exp(), self.freq * t);
        if self.derivative {
            g * Complex64::new(-dt / (self.sigma * self.sigma), self.freq)
        } else {
            g
        }
    }
}

/// The kernels to integrate and how to combine them.
struct Plan {
    eps: Vec<f64>,
    kernels: Vec<Kernel>,
    derivative_envelopes: bool,
}

impl Plan {
    fn new(req: &CorrelatorRequest, reg: &Regulators) -> Self {
        match (req.coupling, reg.derivative_route) {
            (Coupling::Derivative, DerivativeRoute::ByParts) => {
                let linear = CorrelatorRequest::new(Coupling::Linear, req.background);
                // Λ only shifts W by a constant, whose integral against the
                // differentiated envelopes is a boundary term.
                Self {
                    eps: vec![reg.by_parts_epsilon],
                    kernels: vec![Kernel::new(&linear, reg.by_parts_epsilon, 1.0)],
                    derivative_envelopes: true,
                }
            }
            _ => {
                let eps = reg.schedule();
                let kernels = eps.iter().map(|&e| Kernel::new(req, e, reg.lambda_ir)).collect();
                Self { eps, kernels, derivative_envelopes: false }
            }
        }
    }
}

/// Neville extrapolation of `ys(xs)` to `x = 0`, with an error estimate from
/// the last order increment plus the propagated integration errors.
fn extrapolate_to_zero(xs: &[f64], results: &[QuadResult]) -> Estimate<Complex64> {
    let n = xs.len();
    let converged = results.iter().all(|r| r.converged);
    if n == 1 {
        let r = &results[0];
        return Estimate { value: r.value, err: r.err_estimate, converged };
    }
    let mut p: Vec<Complex64> = results.iter().map(|r| r.value).collect();
    let mut previous = p[n - 1];
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xim) = (xs[i], xs[i + m]);
            p[i] = (p[i] * (-xim) + p[i + 1] * xi) / (xi - xim);
        }
        if m == n - 2 {
            previous = p[1];
        }
    }
    if n == 2 {
        previous = results[1].value;
    }
    // Lebesgue constant at 0 bounds how integration errors propagate.
    let lebesgue: f64 = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (xs[j] / (xs[j] - xs[i])).abs())
                .product::<f64>()
        })
        .sum();
    let quad_err = results.iter().map(|r| r.err_estimate).fold(0.0, f64::max);
    Estimate {
        value: p[0],
        err: (p[0] - previous).norm() + lebesgue * quad_err,
        converged,
    }
}

/// Times `t` at which a singular line of `K(x_a(t), x_b(s))` crosses the
/// horizontal edges `s = s_lo` and `s = s_hi`.
fn edge_crossings(kernel: &Kernel, s_lo: f64, s_hi: f64, x_a: f64, x_b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    kernel.singular_times(s_lo, x_b, x_a, &mut out);
    kernel.singular_times(s_hi, x_b, x_a, &mut out);
    out
}

fn validate_all(req: &CorrelatorRequest, reg: &Regulators, quad: &QuadSpec) -> Result<()> {
    reg.validate()?;
    quad.validate()?;
    if let Background::Mirror(m) = &req.background {
        m.validate()?;
    }
    Ok(())
}

fn local_integral(spec: &DetectorSpec, bg: Background, kernel: &Kernel, derivative: bool, quad: &QuadSpec) -> QuadResult {
    let (lo, hi) = spec.time_window(quad.window);
    let x = spec.x_pos;
    let g = Envelope::new(spec, -spec.omega, derivative);
    let h = Envelope::new(spec, spec.omega, derivative);
    let breaks = edge_crossings(kernel, lo, hi, x, x);
    integrate_rows(Rect::square(lo, hi), Region::Full, &breaks, quad, |t, sing| {
        let a = NullPoint::new(&bg, t, x);
        kernel.singular_times(t, x, x, sing);
        let gt = g.at(t);
        move |s| gt * h.at(s) * kernel.eval(&a, &NullPoint::new(&bg, s, x))
    })
}

/// Excitation probability `P_j` of one detector, per unit squared coupling.
///
/// The value is the real part of the double integral; a residual imaginary
/// part larger than ten times the accuracy target is an error. Negative
/// values are returned as computed.
pub fn local_term(spec: &DetectorSpec, req: &CorrelatorRequest, reg: &Regulators, quad: &QuadSpec) -> Result<Estimate<f64>> {
    spec.validate()?;
    validate_all(req, reg, quad)?;
    let plan = Plan::new(req, reg);
    let results: Vec<QuadResult> = plan
        .kernels
        .iter()
        .map(|k| local_integral(spec, req.background, k, plan.derivative_envelopes, quad))
        .collect();
    let est = extrapolate_to_zero(&plan.eps, &results);
    let tolerance = 10.0 * quad.abs_tol.max(quad.rel_tol * est.value.re.abs()).max(est.err);
    if est.value.im.abs() > tolerance || !est.value.re.is_finite() {
        return Err(HarvestError::ImaginaryResidue {
            quantity: "P",
            residue: est.value.im,
            tolerance,
        });
    }
    Ok(Estimate { value: est.value.re, err: est.err, converged: est.converged })
}

/// Nonlocal correlation term `X`, per unit squared coupling.
pub fn nonlocal_term(pair: &DetectorPair, req: &CorrelatorRequest, reg: &Regulators, quad: &QuadSpec) -> Result<Estimate<Complex64>> {
    pair.validate()?;
    validate_all(req, reg, quad)?;
    let plan = Plan::new(req, reg);
    if plan.derivative_envelopes && pair.separation().abs() <= 1e3 * reg.by_parts_epsilon {
        return Err(HarvestError::InvalidParameter(
            "integration by parts for the nonlocal term needs spatially separated detectors; \
             use the richardson derivative route"
                .into(),
        ));
    }
    let bg = req.background;
    let (xa, xb) = (pair.a.x_pos, pair.b.x_pos);
    let (t_lo, t_hi) = pair.a.time_window(quad.window);
    let (s_lo, s_hi) = pair.b.time_window(quad.window);
    let rect = Rect::new(t_lo, t_hi, s_lo, s_hi);
    let omega = pair.a.omega;
    let ga = Envelope::new(&pair.a, -omega, plan.derivative_envelopes);
    let gb = Envelope::new(&pair.b, -omega, plan.derivative_envelopes);

    let results: Vec<QuadResult> = plan
        .kernels
        .iter()
        .map(|kernel| {
            let breaks = edge_crossings(kernel, s_lo, s_hi, xa, xb);
            let ab = integrate_rows(rect, Region::Upper, &breaks, quad, |t, sing| {
                let a = NullPoint::new(&bg, t, xa);
                kernel.singular_times(t, xa, xb, sing);
                let gt = ga.at(t);
                move |s| gt * gb.at(s) * kernel.eval(&a, &NullPoint::new(&bg, s, xb))
            });
            let ba = integrate_rows(rect, Region::Lower, &breaks, quad, |t, sing| {
                let a = NullPoint::new(&bg, t, xa);
                kernel.singular_times(t, xa, xb, sing);
                let gt = ga.at(t);
                move |s| gt * gb.at(s) * kernel.eval(&NullPoint::new(&bg, s, xb), &a)
            });
            QuadResult {
                value: -(ab.value + ba.value),
                err_estimate: ab.err_estimate + ba.err_estimate,
                panels_used: ab.panels_used + ba.panels_used,
                converged: ab.converged && ba.converged,
            }
        })
        .collect();
    Ok(extrapolate_to_zero(&plan.eps, &results))
}

fn clamp_probability(quantity: &str, est: &Estimate<f64>, abs_tol: f64, warnings: &mut Vec<Warning>) -> Result<f64> {
    if est.value >= 0.0 {
        return Ok(est.value);
    }
    let tolerance = abs_tol.max(est.err);
    if est.value >= -tolerance {
        warnings.push(Warning::NegativeClamped { quantity: quantity.into(), value: est.value });
        Ok(0.0)
    } else {
        Err(HarvestError::NegativeProbability {
            quantity: if quantity == "P_A" { "P_A" } else { "P_B" },
            value: est.value,
            tolerance,
        })
    }
}

/// `P_A`, `P_B`, `X` and the entanglement measures for one configuration.
pub fn harvest(pair: &DetectorPair, req: &CorrelatorRequest, reg: &Regulators, quad: &QuadSpec) -> Result<HarvestResult> {
    pair.validate()?;
    let mut warnings = Vec::new();
    if let Background::Mirror(m) = &req.background {
        if pair.a.crosses_mirror(m, quad.window) || pair.b.crosses_mirror(m, quad.window) {
            warnings.push(Warning::MirrorCrossing);
        }
    }

    let p_a = local_term(&pair.a, req, reg, quad)?;
    // Free space is translation invariant, so a shifted copy needs no new integral.
    let same_local = match req.background {
        Background::FreeSpace => pair.a.t_center == pair.b.t_center,
        Background::Mirror(_) => pair.a == pair.b,
    };
    let p_b = if same_local { p_a } else { local_term(&pair.b, req, reg, quad)? };
    let x = nonlocal_term(pair, req, reg, quad)?;

    for (name, ok) in [("P_A", p_a.converged), ("P_B", p_b.converged), ("X", x.converged)] {
        if !ok {
            warnings.push(Warning::NotConverged { quantity: name.into() });
        }
    }
    let pa = clamp_probability("P_A", &p_a, quad.abs_tol, &mut warnings)?;
    let pb = clamp_probability("P_B", &p_b, quad.abs_tol, &mut warnings)?;

    Ok(HarvestResult {
        p_a: pa,
        p_b: pb,
        x_nonlocal: x.value,
        concurrence: concurrence(pa, pb, x.value),
        negativity: negativity(pa, pb, x.value),
        err: ErrorEstimates { p_a: p_a.err, p_b: p_b.err, x_nonlocal: x.err },
        warnings,
    })
}
