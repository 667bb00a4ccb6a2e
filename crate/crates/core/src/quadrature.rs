//! Adaptive quadrature for complex-valued integrands.
//!
//! The 1D engine is a globally adaptive Gauss-Kronrod scheme: the panel
//! with the largest error estimate is bisected until the summed estimate
//! meets `max(abs_tol, rel_tol |I|)`. Known near-singular points are passed
//! as breakpoints so they sit on panel edges, where the open Kronrod rules
//! never sample them.
//!
//! Two-dimensional integrals are iterated: an adaptive outer integral over
//! `t` whose integrand is itself an adaptive inner integral over `s`. Each
//! row may report its own breakpoints, which is how the ε-smoothed light
//! cone singularities of the correlators are handed to the inner
//! integrator. A triangle `{s < t}` or `{s > t}` is handled by clipping the
//! inner limits at `s = t`, which maps it onto a rectangle row by row.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HarvestError, Result};

const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Kronrod points per panel: 15 or 21.
    pub panel_order: usize,
    /// Integration half-width in units of the switching width σ.
    pub window: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-12,
            max_depth: 40,
            panel_order: 15,
            window: 5.0,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarvestError::InvalidParameter(msg));
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return bad(format!(
                "tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            ));
        }
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1".into());
        }
        if !(self.window >= 3.0) {
            return bad(format!("window must be at least 3, got {}", self.window));
        }
        if rule_for(self.panel_order).is_none() {
            return bad(format!(
                "panel_order must be 15 or 21, got {}",
                self.panel_order
            ));
        }
        Ok(())
    }

    fn rule(&self) -> &'static KronrodRule {
        rule_for(self.panel_order).unwrap_or(&GK15)
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            err_estimate: 0.0,
            panels_used: 0,
            converged: true,
        }
    }
}

/// Integration rectangle: outer variable `t` in `[t_lo, t_hi]`, inner
/// variable `s` in `[s_lo, s_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub t_lo: f64,
    pub t_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl Rect {
    pub fn new(t_lo: f64, t_hi: f64, s_lo: f64, s_hi: f64) -> Self {
        Self { t_lo, t_hi, s_lo, s_hi }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, lo, hi)
    }
}

/// Which part of a rectangle to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Full,
    /// `s < t`
    Lower,
    /// `s > t`
    Upper,
}

/// Embedded Gauss-Kronrod pair in QUADPACK layout: `xgk` runs from the
/// outermost node down to the centre `0`, Gauss nodes sit at odd indices.
struct KronrodRule {
    xgk: &'static [f64],
    wgk: &'static [f64],
    wg: &'static [f64],
}

#[allow(clippy::excessive_precision)]
static GK15: KronrodRule = KronrodRule {
    xgk: &[
        0.991_455_371_120_812_639_206_854_697_526_329,
        0.949_107_912_342_758_524_526_189_684_047_851,
        0.864_864_423_359_769_072_789_712_788_640_926,
        0.741_531_185_599_394_439_863_864_773_280_788,
        0.586_087_235_467_691_130_294_144_838_258_730,
        0.405_845_151_377_397_166_906_606_412_076_961,
        0.207_784_955_007_898_467_600_689_403_773_245,
        0.0,
    ],
    wgk: &[
        0.022_935_322_010_529_224_963_732_008_058_970,
        0.063_092_092_629_978_553_290_700_663_189_204,
        0.104_790_010_322_250_183_839_876_322_541_518,
        0.140_653_259_715_525_918_745_189_590_510_238,
        0.169_004_726_639_267_902_826_583_426_598_550,
        0.190_350_578_064_785_409_913_256_402_421_014,
        0.204_432_940_075_298_892_414_161_999_234_649,
        0.209_482_141_084_727_828_012_999_174_891_714,
    ],
    wg: &[
        0.129_484_966_168_869_693_270_611_432_679_082,
        0.279_705_391_489_276_667_901_467_771_423_780,
        0.381_830_050_505_118_944_950_369_775_488_975,
        0.417_959_183_673_469_387_755_102_040_816_327,
    ],
};

#[allow(clippy::excessive_precision)]
static GK21: KronrodRule = KronrodRule {
    xgk: &[
        0.995_657_163_025_808_080_735_527_280_689_003,
        0.973_906_528_517_171_720_077_964_012_084_452,
        0.930_157_491_355_708_226_001_207_180_059_508,
        0.865_063_366_688_984_510_732_096_688_423_493,
        0.780_817_726_586_416_897_063_717_578_345_042,
        0.679_409_568_299_024_406_234_327_365_114_874,
        0.562_757_134_668_604_683_339_000_099_272_694,
        0.433_395_394_129_247_190_799_265_943_165_784,
        0.294_392_862_701_460_198_131_126_603_103_866,
        0.148_874_338_981_631_210_884_826_001_129_720,
        0.0,
    ],
    wgk: &[
        0.011_694_638_867_371_874_278_064_396_062_192,
        0.032_558_162_307_964_727_478_818_972_459_390,
        0.054_755_896_574_351_996_031_381_300_244_580,
        0.075_039_674_810_919_952_767_043_140_916_190,
        0.093_125_454_583_697_605_535_065_465_083_366,
        0.109_387_158_802_297_641_899_210_590_325_805,
        0.123_491_976_262_065_851_077_208_067_491_063,
        0.134_709_217_311_473_325_928_054_001_771_707,
        0.142_775_938_577_060_080_797_094_273_138_717,
        0.147_739_104_901_338_491_374_841_515_972_068,
        0.149_445_554_002_916_905_664_936_468_389_821,
    ],
    wg: &[
        0.066_671_344_308_688_137_593_568_809_893_332,
        0.149_451_349_150_580_593_145_776_339_657_697,
        0.219_086_362_515_982_043_995_534_934_228_163,
        0.269_266_719_309_996_355_091_226_921_569_469,
        0.295_524_224_714_752_870_173_892_994_651_338,
    ],
};

fn rule_for(order: usize) -> Option<&'static KronrodRule> {
    match order {
        15 => Some(&GK15),
        21 => Some(&GK21),
        _ => None,
    }
}

struct PanelEstimate {
    value: Complex64,
    err: f64,
    side: f64,
}

impl KronrodRule {
    /// One Gauss-Kronrod panel with the QUADPACK error heuristic. `f`
    /// returns the integrand and a non-negative side channel that is
    /// integrated with the Kronrod weights alone.
    fn apply<F>(&self, f: &mut F, a: f64, b: f64) -> PanelEstimate
    where
        F: FnMut(f64) -> (Complex64, f64),
    {
        let n = self.xgk.len();
        let centre = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let gauss_has_centre = self.wg.len() * 2 == n;

        let mut fv1 = [Complex64::new(0.0, 0.0); 11];
        let mut fv2 = [Complex64::new(0.0, 0.0); 11];

        let (fc, sc) = f(centre);
        let mut resk = fc * self.wgk[n - 1];
        let mut resg = if gauss_has_centre {
            fc * self.wg[self.wg.len() - 1]
        } else {
            Complex64::new(0.0, 0.0)
        };
        let mut resabs = fc.norm() * self.wgk[n - 1];
        let mut side = sc * self.wgk[n - 1];

        for j in 0..n - 1 {
            let dx = half * self.xgk[j];
            let (f1, s1) = f(centre - dx);
            let (f2, s2) = f(centre + dx);
            fv1[j] = f1;
            fv2[j] = f2;
            resk += (f1 + f2) * self.wgk[j];
            resabs += (f1.norm() + f2.norm()) * self.wgk[j];
            side += (s1 + s2) * self.wgk[j];
            if j % 2 == 1 {
                resg += (f1 + f2) * self.wg[j / 2];
            }
        }

        let mean = resk * 0.5;
        let mut resasc = (fc - mean).norm() * self.wgk[n - 1];
        for j in 0..n - 1 {
            resasc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * self.wgk[j];
        }

        let scale = half.abs();
        let value = resk * half;
        resabs *= scale;
        resasc *= scale;
        let mut err = ((resk - resg) * half).norm();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            err = f64::INFINITY;
        }
        PanelEstimate { value, err, side: side * scale }
    }
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    est: PanelEstimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .err
            .total_cmp(&other.est.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Sorted, de-duplicated segment edges for `[lo, hi]` with interior breakpoints.
fn segments(lo: f64, hi: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    edges.push(lo);
    let min_gap = 1e-13 * (hi - lo).abs().max(lo.abs()).max(hi.abs());
    let mut interior: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > lo + min_gap && x < hi - min_gap)
        .collect();
    interior.sort_by(f64::total_cmp);
    for x in interior {
        if x - edges[edges.len() - 1] > min_gap {
            edges.push(x);
        }
    }
    edges.push(hi);
    edges
}

fn adaptive<F>(f: &mut F, lo: f64, hi: f64, breaks: &[f64], spec: &QuadSpec) -> QuadResult
where
    F: FnMut(f64) -> (Complex64, f64),
{
    if lo == hi {
        return QuadResult::zero();
    }
    if lo > hi {
        let mut r = adaptive(f, hi, lo, breaks, spec);
        r.value = -r.value;
        return r;
    }
    let rule = spec.rule();
    let edges = segments(lo, hi, breaks);
    let mut heap = BinaryHeap::with_capacity(64);
    let mut done: Vec<Panel> = Vec::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in edges.windows(2) {
        let est = rule.apply(f, w[0], w[1]);
        total += est.value;
        err += est.err;
        heap.push(Panel { a: w[0], b: w[1], depth: 0, est });
    }
    let mut panels = heap.len();

    while err > spec.target(total) && panels < MAX_PANELS {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = worst.depth < spec.max_depth && mid > worst.a && mid < worst.b;
        if !splittable {
            done.push(worst);
            continue;
        }
        let left = rule.apply(f, worst.a, mid);
        let right = rule.apply(f, mid, worst.b);
        total += left.value + right.value - worst.est.value;
        err += left.err + right.err - worst.est.err;
        heap.push(Panel { a: worst.a, b: mid, depth: worst.depth + 1, est: left });
        heap.push(Panel { a: mid, b: worst.b, depth: worst.depth + 1, est: right });
        panels += 1;
        if !err.is_finite() {
            // Re-sum to recover from inf - inf in the running update.
            err = heap.iter().chain(done.iter()).map(|p| p.est.err).sum();
        }
    }

    // Final sums in panel order so the result does not depend on heap layout.
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(done);
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: Complex64 = all.iter().map(|p| p.est.value).sum();
    let err: f64 = all.iter().map(|p| p.est.err + p.est.side).sum();
    let quad_err: f64 = all.iter().map(|p| p.est.err).sum();
    QuadResult {
        value,
        err_estimate: err,
        panels_used: all.len(),
        converged: quad_err <= spec.target(value) && value.re.is_finite() && value.im.is_finite(),
    }
}

/// Adaptive integral of `f` over `[lo, hi]`.
pub fn integrate_1d<F>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> QuadResult
where
    F: Fn(f64) -> Complex64,
{
    integrate_1d_with_breaks(f, lo, hi, &[], spec)
}

/// Adaptive integral of `f` over `[lo, hi]`, starting from panels split at
/// the given breakpoints (points outside the interval are ignored).
pub fn integrate_1d_with_breaks<F>(f: F, lo: f64, hi: f64, breaks: &[f64], spec: &QuadSpec) -> QuadResult
where
    F: Fn(f64) -> Complex64,
{
    let mut g = |x: f64| (f(x), 0.0);
    adaptive(&mut g, lo, hi, breaks, spec)
}

/// Adaptive integral of `f(t, s)` over a rectangle.
pub fn integrate_2d<F>(f: F, rect: Rect, spec: &QuadSpec) -> QuadResult
where
    F: Fn(f64, f64) -> Complex64,
{
    integrate_rows(rect, Region::Full, &[], spec, |t, _| {
        let f = &f;
        move |s| f(t, s)
    })
}

/// Adaptive integral of `f(t, s)` over the part of `rect` with `s < t`
/// (`lower = true`) or `s > t` (`lower = false`).
pub fn integrate_2d_triangle<F>(f: F, rect: Rect, lower: bool, spec: &QuadSpec) -> QuadResult
where
    F: Fn(f64, f64) -> Complex64,
{
    let region = if lower { Region::Lower } else { Region::Upper };
    integrate_rows(rect, region, &[], spec, |t, _| {
        let f = &f;
        move |s| f(t, s)
    })
}

/// Iterated adaptive integral over `region` of `rect`.
///
/// `row(t, breaks)` returns the inner integrand for fixed `t` and may push
/// inner breakpoints (in `s`) onto `breaks`; per-row work such as ray
/// tracing the outer event belongs there. `outer_breaks` are breakpoints
/// in `t`.
pub fn integrate_rows<R, G>(rect: Rect, region: Region, outer_breaks: &[f64], spec: &QuadSpec, row: R) -> QuadResult
where
    R: Fn(f64, &mut Vec<f64>) -> G,
    G: Fn(f64) -> Complex64,
{
    let Rect { t_lo, t_hi, s_lo, s_hi } = rect;
    if t_lo >= t_hi || s_lo >= s_hi {
        return QuadResult::zero();
    }
    let limits = |t: f64| -> (f64, f64) {
        match region {
            Region::Full => (s_lo, s_hi),
            Region::Lower => (s_lo, s_hi.min(t)),
            Region::Upper => (s_lo.max(t), s_hi),
        }
    };
    let mut obreaks: Vec<f64> = outer_breaks.to_vec();
    if region != Region::Full {
        obreaks.push(s_lo);
        obreaks.push(s_hi);
    }

    // Cheap non-adaptive pass to fix the absolute scale handed to rows.
    let rule = spec.rule();
    let mut buf = Vec::new();
    let scale = {
        let mut crude = |t: f64| -> (Complex64, f64) {
            let (a, b) = limits(t);
            if a >= b {
                return (Complex64::new(0.0, 0.0), 0.0);
            }
            buf.clear();
            let g = row(t, &mut buf);
            let edges = segments(a, b, &buf);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut gg = |s: f64| (g(s), 0.0);
            for w in edges.windows(2) {
                sum += rule.apply(&mut gg, w[0], w[1]).value;
            }
            (sum, 0.0)
        };
        let edges = segments(t_lo, t_hi, &obreaks);
        let mut sum = Complex64::new(0.0, 0.0);
        for w in edges.windows(2) {
            sum += rule.apply(&mut crude, w[0], w[1]).value;
        }
        sum.norm()
    };

    let width = t_hi - t_lo;
    let inner_spec = QuadSpec {
        rel_tol: 0.1 * spec.rel_tol,
        abs_tol: 0.1 * spec.abs_tol.max(spec.rel_tol * scale) / width,
        ..*spec
    };

    let mut inner_panels = 0usize;
    let mut inner_ok = true;
    let mut outer = |t: f64| -> (Complex64, f64) {
        let (a, b) = limits(t);
        if a >= b {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        buf.clear();
        let g = row(t, &mut buf);
        let mut gg = |s: f64| (g(s), 0.0);
        let r = adaptive(&mut gg, a, b, &buf, &inner_spec);
        inner_panels += r.panels_used;
        inner_ok &= r.converged;
        (r.value, r.err_estimate)
    };
    let mut res = adaptive(&mut outer, t_lo, t_hi, &obreaks, spec);
    res.panels_used += inner_panels;
    res.converged &= inner_ok;
    res
}
