//! One-dimensional parameter sweeps evaluated in parallel and collected in grid order.

use harvest_core::appendix::{p_free_1p1, p_free_3p1, p_image_3p1, p_static_1p1, StaticProbeSpec};
use harvest_core::{harvest, HarvestResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{Row, Table};
use crate::scenario::Scenario;
use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    /// Distance of detector A from the mirror at its switching peak; B keeps its offset.
    #[serde(rename = "d_A")]
    DA,
    /// Position of detector A; B keeps its offset.
    #[serde(rename = "x_A")]
    XA,
    /// Separation `x_B - x_A`.
    #[serde(rename = "dx")]
    Dx,
    /// Common energy gap.
    #[serde(rename = "omega")]
    Omega,
    /// Common switching peak time.
    #[serde(rename = "t_A")]
    TA,
    /// Free-space IR cutoff.
    #[serde(rename = "lambda")]
    Lambda,
    /// Switching width.
    #[serde(rename = "sigma_scale")]
    SigmaScale,
    /// Distance from a static boundary, for the probe observables.
    #[serde(rename = "d")]
    D,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            Self::DA => "d_A",
            Self::XA => "x_A",
            Self::Dx => "dx",
            Self::Omega => "omega",
            Self::TA => "t_A",
            Self::Lambda => "lambda",
            Self::SigmaScale => "sigma_scale",
            Self::D => "d",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "d_A" => Self::DA,
            "x_A" => Self::XA,
            "dx" | "Δx" | "delta_x" => Self::Dx,
            "omega" | "Ω" => Self::Omega,
            "t_A" => Self::TA,
            "lambda" | "Λ" => Self::Lambda,
            "sigma_scale" | "σ_scale" | "sigma" => Self::SigmaScale,
            "d" => Self::D,
            _ => {
                return Err(ConfigError::Value {
                    key: "sweep.variable".into(),
                    value: s.into(),
                    expected: "d_A, x_A, dx, omega, t_A, lambda, sigma_scale or d",
                })
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

/// What each grid point computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// The full two-detector result.
    Harvest,
    /// (1+1)-dimensional static-mirror probability in `P_A`, free-space value in `P_B`.
    PStatic1p1,
    /// (3+1)-dimensional half-space probability in `P_A`, free-space value in `P_B`.
    P3p1,
}

impl Observable {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "harvest" => Ok(Self::Harvest),
            "p_static_1p1" => Ok(Self::PStatic1p1),
            "p_3p1" => Ok(Self::P3p1),
            _ => Err(ConfigError::Value {
                key: "sweep.observable".into(),
                value: s.into(),
                expected: "harvest, p_static_1p1 or p_3p1",
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub observable: Observable,
    pub scenario: Scenario,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, start: f64, stop: f64, count: usize, scenario: Scenario) -> Self {
        Self { variable, start, stop, count, spacing: Spacing::Linear, observable: Observable::Harvest, scenario }
    }

    pub fn log(mut self) -> Self {
        self.spacing = Spacing::Log;
        self
    }

    pub fn observe(mut self, observable: Observable) -> Self {
        self.observable = observable;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Sweep(m));
        if self.count < 2 {
            return bad(format!("count must be at least 2, got {}", self.count));
        }
        if !(self.start < self.stop) {
            return bad(format!("start ({}) must be below stop ({})", self.start, self.stop));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return bad(format!("log spacing needs a positive start, got {}", self.start));
        }
        Ok(())
    }

    /// Grid values; the endpoints are exactly `start` and `stop`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n - 1 {
                    return self.stop;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + f * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + f * (self.stop / self.start).ln()).exp(),
                }
            })
            .collect()
    }

    /// The scenario with the swept variable set to `value`.
    pub fn scenario_at(&self, value: f64) -> Result<Scenario, ConfigError> {
        let mut s = self.scenario.clone();
        let dx = s.separation();
        match self.variable {
            SweepVar::DA | SweepVar::D => {
                s.detector_a.x_pos = s.mirror_position_at_a()? + value;
                s.detector_b.x_pos = s.detector_a.x_pos + dx;
            }
            SweepVar::XA => {
                s.detector_a.x_pos = value;
                s.detector_b.x_pos = value + dx;
            }
            SweepVar::Dx => s.detector_b.x_pos = s.detector_a.x_pos + value,
            SweepVar::Omega => {
                s.detector_a.omega = value;
                s.detector_b.omega = value;
            }
            SweepVar::TA => s.detectors_at(value),
            SweepVar::Lambda => s.regulators.lambda_ir = Some(value),
            SweepVar::SigmaScale => s.sigma = value,
        }
        Ok(s)
    }

    /// Sets a `sweep.*` key, or a scenario key otherwise.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        let num = |v: &str| {
            v.parse::<f64>().map_err(|_| ConfigError::Value { key: key.into(), value: v.into(), expected: "a number" })
        };
        match key {
            "sweep.variable" => self.variable = SweepVar::parse(v)?,
            "sweep.start" => self.start = num(v)?,
            "sweep.stop" => self.stop = num(v)?,
            "sweep.count" => {
                self.count = v.parse().map_err(|_| ConfigError::Value {
                    key: key.into(),
                    value: v.into(),
                    expected: "a positive integer",
                })?
            }
            "sweep.spacing" => {
                self.spacing = match v {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    _ => {
                        return Err(ConfigError::Value { key: key.into(), value: v.into(), expected: "linear or log" })
                    }
                }
            }
            "sweep.observable" => self.observable = Observable::parse(v)?,
            _ => self.scenario.set(key, value)?,
        }
        Ok(())
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self::new(SweepVar::DA, 0.1, 10.0, 50, Scenario::default())
    }
}

fn evaluate(spec: &SweepSpec, value: f64) -> Result<Row, String> {
    let s = spec.scenario_at(value).map_err(|e| e.to_string())?;
    let var = spec.variable.name();
    match spec.observable {
        Observable::Harvest => {
            let pair = s.pair().map_err(|e| e.to_string())?;
            let req = s.request().map_err(|e| e.to_string())?;
            let r: HarvestResult =
                harvest(&pair, &req, &s.resolved_regulators(), &s.quad).map_err(|e| e.to_string())?;
            Ok(Row::from_result(var, value, &r))
        }
        Observable::PStatic1p1 | Observable::P3p1 => {
            let reg = s.resolved_regulators();
            let d = s.detector_a.x_pos - s.mirror_position_at_a().map_err(|e| e.to_string())?;
            let probe = StaticProbeSpec { omega: s.detector_a.omega, sigma: s.sigma, d, eps: reg.epsilon, lambda_ir: reg.lambda_ir };
            let (mirror, free) = if spec.observable == Observable::P3p1 {
                let free = p_free_3p1(&probe, &s.quad).map_err(|e| e.to_string())?;
                let image = p_image_3p1(&probe, &s.quad).map_err(|e| e.to_string())?;
                let total = harvest_core::Estimate {
                    value: free.value + image.value,
                    err: free.err + image.err,
                    converged: free.converged && image.converged,
                };
                (total, free)
            } else {
                (
                    p_static_1p1(&probe, &s.quad).map_err(|e| e.to_string())?,
                    p_free_1p1(&probe, &s.quad).map_err(|e| e.to_string())?,
                )
            };
            Ok(Row::from_probe(var, value, &mirror, &free))
        }
    }
}

/// Evaluates every grid point. Invalid sweep specifications are errors; a
/// failing point becomes a row flagged `error:...`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table, ConfigError> {
    spec.validate()?;
    spec.scenario_at(spec.start)?.pair()?;
    let header = serde_json::json!({
        "sweep": spec,
        "regulators": spec.scenario.resolved_regulators(),
    });
    let rows = spec
        .grid()
        .par_iter()
        .map(|&value| evaluate(spec, value).unwrap_or_else(|e| Row::failed(spec.variable.name(), value, &e)))
        .collect();
    Ok(Table { header: header.to_string(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::TrajectoryKind;

    #[test]
    fn grids() {
        let mut s = SweepSpec::new(SweepVar::DA, 1.0, 2.0, 2, Scenario::default());
        assert_eq!(s.grid(), vec![1.0, 2.0]);
        s.count = 5;
        assert_eq!(s.grid(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        let s = SweepSpec::new(SweepVar::Lambda, 1e-12, 1e-3, 4, Scenario::default()).log();
        let g = s.grid();
        assert_eq!((g[0], g[3]), (1e-12, 1e-3));
        assert!((g[1] / 1e-9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_sweeps() {
        let ok = SweepSpec::default();
        assert!(ok.validate().is_ok());
        assert!(SweepSpec { count: 1, ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { start: 3.0, stop: 3.0, ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { start: 0.0, spacing: Spacing::Log, ..ok }.validate().is_err());
    }

    #[test]
    fn distance_is_measured_from_the_mirror() {
        let mut sc = Scenario::default();
        sc.trajectory.kind = TrajectoryKind::CarlitzWilley;
        sc.detectors_at(-20.0);
        let spec = SweepSpec::new(SweepVar::DA, 0.5, 1.0, 2, sc);
        let s = spec.scenario_at(0.5).unwrap();
        let z = s.mirror_position_at_a().unwrap();
        assert!((s.detector_a.x_pos - z - 0.5).abs() < 1e-12);
        assert_eq!(s.separation(), 1.0);
    }

    #[test]
    fn failing_points_are_flagged_not_fatal() {
        let mut sc = Scenario::default();
        sc.regulators.epsilon = Some(-1.0);
        let t = run_sweep(&SweepSpec::new(SweepVar::Omega, 1.0, 2.0, 2, sc)).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows.iter().all(|r| r.flags.starts_with("error:") && r.p_a.is_none()));
    }

    #[test]
    fn two_point_sweep() {
        let mut sc = Scenario::default();
        sc.trajectory.kind = TrajectoryKind::Static;
        sc.quad.window = 4.0;
        let t = run_sweep(&SweepSpec::new(SweepVar::DA, 1.0, 2.0, 2, sc)).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!((t.rows[0].value, t.rows[1].value), (1.0, 2.0));
        assert!(t.rows.iter().all(|r| r.sweep_var == "d_A" && r.p_a.unwrap() > 0.0));
    }
}
