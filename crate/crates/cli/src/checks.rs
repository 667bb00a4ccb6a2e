//! Grids of the one-dimensional reductions for a static boundary.

use harvest_core::appendix::{p_free_3p1, p_image_3p1, p_rate_limit, p_static_1p1, StaticProbeSpec};
use harvest_core::{local_term, Background, CorrelatorRequest, Coupling, DetectorSpec, MirrorTrajectory, QuadSpec};

use crate::ConfigError;

pub const CHECK_NAMES: [&str; 4] = ["oracle-grid", "rate-limit", "asymptote-3p1", "growth-1p1"];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    /// Comma-separated lines, the first one a header.
    pub lines: Vec<String>,
    pub pass: bool,
}

fn tight() -> QuadSpec {
    QuadSpec { window: 7.0, rel_tol: 1e-9, ..QuadSpec::default() }
}

fn oracle_grid() -> Result<CheckReport, ConfigError> {
    let quad = tight();
    let req = CorrelatorRequest::new(Coupling::Linear, Background::Mirror(MirrorTrajectory::Static));
    let reg = harvest_core::Regulators::default();
    let mut lines = vec!["omega,d,P_2d,P_1d,rel_diff".to_string()];
    let mut pass = true;
    for omega in [0.5, 1.0, 2.0] {
        for d in [0.5, 1.0, 5.0, 20.0] {
            let two = local_term(&DetectorSpec::new(omega, 0.0, d, 1.0)?, &req, &reg, &quad)?.value;
            let one = p_static_1p1(&StaticProbeSpec::new(omega, 1.0, d, reg.epsilon), &quad)?.value;
            let rel = ((two - one) / one).abs();
            pass &= rel < 1e-6;
            lines.push(format!("{omega},{d},{two:.12e},{one:.12e},{rel:.3e}"));
        }
    }
    Ok(CheckReport { lines, pass })
}

fn rate_limit() -> Result<CheckReport, ConfigError> {
    let quad = QuadSpec { rel_tol: 1e-9, ..QuadSpec::default() };
    let limit = p_rate_limit(-1.0, 1.0, 1e-4)?;
    let mut lines = vec!["sigma,P_over_sigma(omega=-1),P_over_sigma(omega=+1),limit(omega=-1)".to_string()];
    let mut last = (0.0, 0.0);
    let mut first_pos = 0.0;
    for sigma in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let p = |omega| p_static_1p1(&StaticProbeSpec::new(omega, sigma, 1.0, 1e-4), &quad).map(|e| e.value / sigma);
        let (neg, pos) = (p(-1.0)?, p(1.0)?);
        if sigma == 1.0 {
            first_pos = pos;
        }
        last = (neg, pos);
        lines.push(format!("{sigma},{neg:.10e},{pos:.10e},{limit:.10e}"));
    }
    let pass = ((last.0 - limit) / limit).abs() < 0.05 && last.1 < 0.1 * first_pos;
    Ok(CheckReport { lines, pass })
}

fn asymptote_3p1() -> Result<CheckReport, ConfigError> {
    let quad = QuadSpec { rel_tol: 1e-9, ..QuadSpec::default() };
    let mut lines = vec!["d,P_free,P_image,ratio".to_string()];
    let mut pass = true;
    for d in [0.1, 1.0, 10.0, 100.0] {
        let s = StaticProbeSpec::new(1.0, 1.0, d, 1e-4);
        let (free, image) = (p_free_3p1(&s, &quad)?.value, p_image_3p1(&s, &quad)?.value);
        let ratio = image.abs() / free;
        if d == 100.0 {
            pass = ratio < 1e-2;
        }
        lines.push(format!("{d},{free:.10e},{image:.10e},{ratio:.3e}"));
    }
    Ok(CheckReport { lines, pass })
}

fn growth_1p1() -> Result<CheckReport, ConfigError> {
    let quad = QuadSpec { rel_tol: 1e-9, ..QuadSpec::default() };
    let mut lines = vec!["d,P_static".to_string()];
    let mut values = Vec::new();
    for d in [1.0, 10.0, 100.0] {
        let p = p_static_1p1(&StaticProbeSpec::new(1.0, 1.0, d, 1e-4), &quad)?.value;
        values.push(p);
        lines.push(format!("{d},{p:.10e}"));
    }
    Ok(CheckReport { lines, pass: values[2] > values[1] })
}

/// Runs a named check; `None` for an unknown name.
pub fn run_check(name: &str) -> Option<Result<CheckReport, ConfigError>> {
    Some(match name {
        "oracle-grid" => oracle_grid(),
        "rate-limit" => rate_limit(),
        "asymptote-3p1" => asymptote_3p1(),
        "growth-1p1" => growth_1p1(),
        _ => return None,
    })
}
