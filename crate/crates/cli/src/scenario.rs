//! A fully specified configuration and its flat `section.key = value` form.

use harvest_core::{
    Background, CorrelatorRequest, Coupling, DerivativeRoute, DetectorPair, DetectorSpec, MirrorTrajectory,
    QuadSpec, Regulators,
};
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryKind {
    Free,
    Static,
    CarlitzWilley,
    BlackHoleCollapse,
}

impl TrajectoryKind {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "free" | "free-space" => Ok(Self::Free),
            "static" => Ok(Self::Static),
            "cw" | "carlitz-willey" => Ok(Self::CarlitzWilley),
            "bhc" | "black-hole-collapse" => Ok(Self::BlackHoleCollapse),
            _ => Err(ConfigError::Value {
                key: "trajectory.kind".into(),
                value: s.into(),
                expected: "free, static, cw or bhc",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub kappa: f64,
    pub v_horizon: f64,
}

/// Where and when one detector is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub omega: f64,
    pub t_center: f64,
    pub x_pos: f64,
}

/// Regulator values that differ from the coupling's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegulatorOverrides {
    pub epsilon: Option<f64>,
    pub lambda_ir: Option<f64>,
    pub eps_schedule: Option<Vec<f64>>,
    pub derivative_route: Option<DerivativeRoute>,
    pub by_parts_epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub trajectory: Trajectory,
    pub coupling: Coupling,
    pub sigma: f64,
    pub detector_a: Placement,
    pub detector_b: Placement,
    pub regulators: RegulatorOverrides,
    pub quad: QuadSpec,
}

impl Default for Scenario {
    /// Free space, linear coupling, `Ω = σ = 1`, detectors at `x = 0` and `x = 1`.
    fn default() -> Self {
        Self {
            trajectory: Trajectory { kind: TrajectoryKind::Free, kappa: 0.5, v_horizon: 0.0 },
            coupling: Coupling::Linear,
            sigma: 1.0,
            detector_a: Placement { omega: 1.0, t_center: 0.0, x_pos: 0.0 },
            detector_b: Placement { omega: 1.0, t_center: 0.0, x_pos: 1.0 },
            regulators: RegulatorOverrides::default(),
            quad: QuadSpec::default(),
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        expected: "a number",
    })
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        expected: "an integer",
    })
}

impl Scenario {
    pub fn background(&self) -> Result<Background, ConfigError> {
        let t = &self.trajectory;
        let mirror = match t.kind {
            TrajectoryKind::Free => return Ok(Background::FreeSpace),
            TrajectoryKind::Static => Ok(MirrorTrajectory::Static),
            TrajectoryKind::CarlitzWilley => MirrorTrajectory::carlitz_willey(t.kappa),
            TrajectoryKind::BlackHoleCollapse => MirrorTrajectory::black_hole_collapse(t.kappa, t.v_horizon),
        };
        Ok(Background::Mirror(mirror?))
    }

    pub fn request(&self) -> Result<CorrelatorRequest, ConfigError> {
        Ok(CorrelatorRequest::new(self.coupling, self.background()?))
    }

    /// Defaults for the coupling with the overrides applied.
    pub fn resolved_regulators(&self) -> Regulators {
        let o = &self.regulators;
        let mut reg = Regulators::for_coupling(self.coupling);
        if let Some(v) = o.epsilon {
            reg.epsilon = v;
        }
        if let Some(v) = o.lambda_ir {
            reg.lambda_ir = v;
        }
        if let Some(v) = &o.eps_schedule {
            reg.eps_schedule = v.clone();
        }
        if let Some(v) = o.derivative_route {
            reg.derivative_route = v;
        }
        if let Some(v) = o.by_parts_epsilon {
            reg.by_parts_epsilon = v;
        }
        reg
    }

    pub fn pair(&self) -> Result<DetectorPair, ConfigError> {
        let spec = |p: &Placement| DetectorSpec::new(p.omega, p.t_center, p.x_pos, self.sigma);
        Ok(DetectorPair::new(spec(&self.detector_a)?, spec(&self.detector_b)?)?)
    }

    /// Mirror position at detector A's switching peak, 0 in free space.
    pub fn mirror_position_at_a(&self) -> Result<f64, ConfigError> {
        Ok(self.background()?.mirror().map_or(0.0, |m| m.mirror_position(self.detector_a.t_center)))
    }

    /// Moves both switching peaks to `t`.
    pub fn detectors_at(&mut self, t: f64) {
        self.detector_a.t_center = t;
        self.detector_b.t_center = t;
    }

    pub fn separation(&self) -> f64 {
        self.detector_b.x_pos - self.detector_a.x_pos
    }

    /// Sets one dotted key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "trajectory.kind" => self.trajectory.kind = TrajectoryKind::parse(v)?,
            "trajectory.kappa" => self.trajectory.kappa = number(key, v)?,
            "trajectory.v_horizon" => self.trajectory.v_horizon = number(key, v)?,
            "coupling" => {
                self.coupling = match v {
                    "linear" => Coupling::Linear,
                    "derivative" => Coupling::Derivative,
                    _ => {
                        return Err(ConfigError::Value {
                            key: key.into(),
                            value: v.into(),
                            expected: "linear or derivative",
                        })
                    }
                }
            }
            "sigma" => self.sigma = number(key, v)?,
            "detectors.omega" => {
                let w = number(key, v)?;
                self.detector_a.omega = w;
                self.detector_b.omega = w;
            }
            "detectors.t_center" => self.detectors_at(number(key, v)?),
            "detector_a.omega" => self.detector_a.omega = number(key, v)?,
            "detector_a.t_center" => self.detector_a.t_center = number(key, v)?,
            "detector_a.x_pos" => self.detector_a.x_pos = number(key, v)?,
            "detector_b.omega" => self.detector_b.omega = number(key, v)?,
            "detector_b.t_center" => self.detector_b.t_center = number(key, v)?,
            "detector_b.x_pos" => self.detector_b.x_pos = number(key, v)?,
            "regulators.epsilon" => self.regulators.epsilon = Some(number(key, v)?),
            "regulators.lambda_ir" => self.regulators.lambda_ir = Some(number(key, v)?),
            "regulators.by_parts_epsilon" => self.regulators.by_parts_epsilon = Some(number(key, v)?),
            "regulators.eps_schedule" => {
                let list = v.trim_start_matches('[').trim_end_matches(']');
                let parsed: Result<Vec<f64>, _> = list.split(',').map(|s| number(key, s)).collect();
                self.regulators.eps_schedule = Some(parsed?);
            }
            "regulators.derivative_route" => {
                self.regulators.derivative_route = Some(match v {
                    "by-parts" => DerivativeRoute::ByParts,
                    "richardson" => DerivativeRoute::Richardson,
                    _ => {
                        return Err(ConfigError::Value {
                            key: key.into(),
                            value: v.into(),
                            expected: "by-parts or richardson",
                        })
                    }
                })
            }
            "quad.rel_tol" => self.quad.rel_tol = number(key, v)?,
            "quad.abs_tol" => self.quad.abs_tol = number(key, v)?,
            "quad.max_depth" => self.quad.max_depth = integer(key, v)?,
            "quad.panel_order" => self.quad.panel_order = integer(key, v)?,
            "quad.window" => self.quad.window = number(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }
}

/// Flattens a TOML document into `(dotted.key, text)` pairs in document order.
pub fn flatten_toml(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let mut out = Vec::new();
    flatten_into("", &table, &mut out);
    Ok(out)
}

fn flatten_into(prefix: &str, table: &toml::Table, out: &mut Vec<(String, String)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten_into(&key, t, out),
            toml::Value::String(s) => out.push((key, s.clone())),
            toml::Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(|i| i.to_string()).collect();
                out.push((key, parts.join(",")));
            }
            other => out.push((key, other.to_string())),
        }
    }
}

/// Splits a `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Parse(format!("override `{s}` is not of the form key=value"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_resolve() {
        let mut s = Scenario::default();
        s.set("trajectory.kind", "cw").unwrap();
        s.set("coupling", "derivative").unwrap();
        s.set("regulators.eps_schedule", "[3e-3, 1e-3]").unwrap();
        s.set("detectors.omega", "2").unwrap();
        assert_eq!(s.trajectory.kind, TrajectoryKind::CarlitzWilley);
        let reg = s.resolved_regulators();
        assert_eq!(reg.eps_schedule, vec![3e-3, 1e-3]);
        assert_eq!(reg.epsilon, Regulators::derivative_default().epsilon);
        assert_eq!((s.detector_a.omega, s.detector_b.omega), (2.0, 2.0));
        assert!(matches!(s.background().unwrap(), Background::Mirror(MirrorTrajectory::CarlitzWilley { .. })));
    }

    #[test]
    fn bad_keys_and_values() {
        let mut s = Scenario::default();
        assert!(matches!(s.set("detector_c.omega", "1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(s.set("sigma", "wide"), Err(ConfigError::Value { .. })));
        assert!(s.set("trajectory.kind", "hyperbolic").is_err());
        assert!(parse_override("sigma").is_err());
        assert_eq!(parse_override(" sigma = 2 ").unwrap(), ("sigma".into(), "2".into()));
    }

    #[test]
    fn toml_flattening() {
        let text = "coupling = \"derivative\"\n[trajectory]\nkind = \"bhc\"\nkappa = 0.25\n\
                    [regulators]\neps_schedule = [4e-3, 2e-3]\n[quad]\nmax_depth = 30\n";
        let mut s = Scenario::default();
        for (k, v) in flatten_toml(text).unwrap() {
            s.set(&k, &v).unwrap();
        }
        assert_eq!(s.trajectory.kind, TrajectoryKind::BlackHoleCollapse);
        assert_eq!(s.trajectory.kappa, 0.25);
        assert_eq!(s.quad.max_depth, 30);
        assert_eq!(s.regulators.eps_schedule, Some(vec![4e-3, 2e-3]));
        assert_eq!(s.coupling, Coupling::Derivative);
    }

    #[test]
    fn dotted_keys_flatten_like_tables() {
        let a = flatten_toml("trajectory.kind = \"static\"\ndetector_a.x_pos = 2.5\n").unwrap();
        assert!(a.contains(&("trajectory.kind".into(), "static".into())));
        assert!(a.contains(&("detector_a.x_pos".into(), "2.5".into())));
    }
}
