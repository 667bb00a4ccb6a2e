//! Shared configurations for the benchmarks.

use harvest_core::{DetectorPair, DetectorSpec, MirrorTrajectory};

pub fn cw() -> MirrorTrajectory {
    MirrorTrajectory::carlitz_willey(0.5).unwrap()
}

/// Two detectors with `Ω = σ = 1` peaked at `t`, A at distance `d` from the mirror.
pub fn pair_near(mirror: &MirrorTrajectory, t: f64, d: f64, dx: f64) -> DetectorPair {
    let xa = mirror.mirror_position(t) + d;
    DetectorPair::new(
        DetectorSpec::new(1.0, t, xa, 1.0).unwrap(),
        DetectorSpec::new(1.0, t, xa + dx, 1.0).unwrap(),
    )
    .unwrap()
}
