//! Fixed scenarios shared by the benchmarks.

use rotwave_core::{PhasePoint, Theta, WaveParams};

/// θ = 1/4 with the singular line between the origin and φ1 = 1.
pub fn peakon_window() -> WaveParams {
    WaveParams::direct(Theta::QUARTER, 0.125, 0.0, -1.0, 0.5).expect("finite")
}

/// θ = 1/2 with the singular line through the origin.
pub fn origin_line() -> WaveParams {
    WaveParams::direct(Theta::HALF, 0.0, 0.0, -1.0, 0.05).expect("finite")
}

/// A closed orbit around the right center of `origin_line`.
pub fn origin_line_start() -> PhasePoint {
    PhasePoint::new(1.0, 0.0)
}
