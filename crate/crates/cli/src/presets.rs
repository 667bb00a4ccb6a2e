//! Sweeps that reproduce the published figures, with σ = 1 throughout.

use harvest_core::Coupling;

use crate::scenario::{Scenario, TrajectoryKind};
use crate::sweep::{Observable, SweepSpec, SweepVar};

pub const PRESET_NAMES: [&str; 14] = [
    "fig2L", "fig2R", "fig3L", "fig3R", "fig4L", "fig4M", "fig4R", "fig5L", "fig5R", "fig7L", "fig7R", "fig8",
    "fig9_1p1", "fig9_ir",
];

/// One curve of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub help: &'static str,
    pub series: Vec<Series>,
}

fn scenario(kind: TrajectoryKind, omega: f64, t: f64, dx: f64) -> Scenario {
    let mut s = Scenario::default();
    s.trajectory.kind = kind;
    s.detector_a.omega = omega;
    s.detector_b.omega = omega;
    s.detectors_at(t);
    s.detector_b.x_pos = s.detector_a.x_pos + dx;
    s
}

fn cw(omega: f64, t: f64, dx: f64) -> Scenario {
    let mut s = scenario(TrajectoryKind::CarlitzWilley, omega, t, dx);
    s.trajectory.kappa = 0.5;
    s
}

fn bhc(t: f64, dx: f64) -> Scenario {
    let mut s = scenario(TrajectoryKind::BlackHoleCollapse, 1.0, t, dx);
    s.trajectory.kappa = 0.25;
    s.trajectory.v_horizon = 0.0;
    s
}

fn series(label: impl Into<String>, spec: SweepSpec) -> Series {
    Series { label: label.into(), spec }
}

/// The mirror curve followed by its free-space baseline over the same grid.
fn with_free(label: &str, spec: SweepSpec) -> [Series; 2] {
    let mut free = spec.clone();
    free.scenario.trajectory.kind = TrajectoryKind::Free;
    [series(label, spec), series(format!("{label}_free"), free)]
}

fn d_sweep(s: Scenario, start: f64, stop: f64, count: usize) -> SweepSpec {
    SweepSpec::new(SweepVar::DA, start, stop, count, s)
}

fn fig2(name: &'static str, dx: f64, help: &'static str) -> Preset {
    let series = [0.5, 0.75, 1.0, 1.5]
        .into_iter()
        .flat_map(|w| with_free(&format!("omega{w}"), d_sweep(scenario(TrajectoryKind::Static, w, 0.0, dx), 0.02, 10.0, 50)))
        .collect();
    Preset { name, help, series }
}

fn fig3(name: &'static str, t: f64, help: &'static str) -> Preset {
    Preset { name, help, series: with_free("cw", d_sweep(cw(1.0, t, 2.0), 0.05, 20.0, 60)).to_vec() }
}

fn fig4(name: &'static str, dxs: &[f64], help: &'static str) -> Preset {
    let series = dxs
        .iter()
        .flat_map(|&dx| with_free(&format!("dx{dx}"), d_sweep(cw(1.0, -1.0, dx), 0.02, 6.0, 60)))
        .collect();
    Preset { name, help, series }
}

fn fig5(name: &'static str, t: f64, help: &'static str) -> Preset {
    let series = [1.0, 2.0, 3.0]
        .into_iter()
        .flat_map(|dx| with_free(&format!("dx{dx}"), d_sweep(bhc(t, dx), 0.05, 20.0, 60)))
        .collect();
    Preset { name, help, series }
}

fn fig7(name: &'static str, help: &'static str) -> Preset {
    let mut s = cw(1.0, 0.0, 1.0);
    s.coupling = Coupling::Derivative;
    // The mirror is at x = -1.134 at t = 0.
    let spec = SweepSpec::new(SweepVar::XA, -1.1, 30.0, 60, s);
    Preset { name, help, series: with_free("cw", spec).to_vec() }
}

fn probe(name: &'static str, observable: Observable, lambdas: &[f64], help: &'static str) -> Preset {
    let series = lambdas
        .iter()
        .map(|&l| {
            let mut s = scenario(TrajectoryKind::Static, 1.0, 0.0, 1.0);
            s.regulators.lambda_ir = Some(l);
            series(format!("lambda{l:e}"), SweepSpec::new(SweepVar::D, 1e-2, 1e3, 61, s).log().observe(observable))
        })
        .collect();
    Preset { name, help, series }
}

/// The named preset, or `None` for an unknown name.
pub fn preset(name: &str) -> Option<Preset> {
    Some(match name {
        "fig2L" => fig2("fig2L", 1.0, "Static mirror, C vs d_A for Ω ∈ {0.5, 0.75, 1, 1.5} with free baselines; Δx = 1, t = 0. The gap values are an assumption."),
        "fig2R" => fig2("fig2R", 3.0, "Static mirror, C vs d_A for Ω ∈ {0.5, 0.75, 1, 1.5} with free baselines; Δx = 3, t = 0. The gap values are an assumption."),
        "fig3L" => fig3("fig3L", -20.0, "CW mirror κ = 0.5, Ω = 1, Δx = 2, t_A = t_B = -20; C vs d_A with free baseline."),
        "fig3R" => fig3("fig3R", 20.0, "CW mirror κ = 0.5, Ω = 1, Δx = 2, t_A = t_B = +20; C vs d_A with free baseline."),
        "fig4L" => fig4("fig4L", &[2.0, 3.0], "CW mirror at t_A = t_B = -1 with κ = 0.5, Ω = 1 (inherited from the CW figure), Δx ∈ {2, 3}; C vs d_A."),
        "fig4M" => fig4("fig4M", &[2.0], "CW mirror at t_A = t_B = -1, κ = 0.5, Ω = 1, Δx = 2; |X| (abs_X) and sqrt(P_A P_B) vs d_A."),
        "fig4R" => fig4("fig4R", &[3.0], "CW mirror at t_A = t_B = -1, κ = 0.5, Ω = 1, Δx = 3; |X| (abs_X) and sqrt(P_A P_B) vs d_A."),
        "fig5L" => fig5("fig5L", -20.0, "BHC mirror κ = 0.25, v_H = 0, Ω = 1, t = -20, Δx ∈ {1, 2, 3} (assumed); C vs d_A."),
        "fig5R" => fig5("fig5R", 20.0, "BHC mirror κ = 0.25, v_H = 0, Ω = 1, t = +20, Δx ∈ {1, 2, 3} (assumed); C vs d_A."),
        "fig7L" => fig7("fig7L", "Derivative coupling, CW κ = 0.5, Ω = 1, t_A = 0, Δx = 1; P_A vs x_A with free baseline."),
        "fig7R" => fig7("fig7R", "Derivative coupling, CW κ = 0.5, Ω = 1, t_A = 0, Δx = 1; C vs x_A with free baseline."),
        "fig8" => probe("fig8", Observable::P3p1, &[1e-12], "(3+1)D half-space P (P_A) and free P (P_B) vs d, Ω = σ = 1, log grid."),
        "fig9_1p1" => probe("fig9_1p1", Observable::PStatic1p1, &[1e-3, 1e-6, 1e-12], "(1+1)D static-mirror P (P_A) vs d, Ω = σ = 1; P_B is the free value at each IR cutoff."),
        "fig9_ir" => {
            let s = scenario(TrajectoryKind::Free, 1.0, 0.0, 1.0);
            let spec = SweepSpec::new(SweepVar::Lambda, 1e-12, 1e-1, 45, s).log();
            Preset {
                name: "fig9_ir",
                help: "Free-space C vs IR cutoff Λ, Ω = σ = 1, Δx = 1 (assumed).",
                series: vec![series("free", spec)],
            }
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert_eq!(p.name, name);
            assert!(!p.series.is_empty());
            for s in &p.series {
                s.spec.validate().unwrap();
                s.spec.scenario.pair().unwrap();
            }
        }
        assert!(preset("fig6").is_none());
    }
}
