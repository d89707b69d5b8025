//! Traveling waves of the rotation-θ shallow-water family.
//!
//! The crate derives the model coefficients from the Coriolis frequency,
//! builds a conserved first integral of the traveling-wave planar system,
//! classifies its equilibria, constructs closed-form elliptic waves, and
//! classifies numerically traced orbits (smooth periodic, solitary, peakon,
//! periodic peakon), and compares the result with the bifurcation-region
//! predictions.

pub mod atlas;
pub mod closedform;
pub mod elliptic;
pub mod equilibria;
pub mod error;
pub mod field;
pub mod orbits;
pub mod params;
pub mod poly;

pub use atlas::{
    classify_region, predict_wave_menu, sweep_singular_line, RegionLabel, SweepReport, SweepSample, WaveMenu,
};
pub use closedform::{WaveSolution, WaveVariant};
pub use equilibria::{census, CaseLabel, Equilibrium, EquilibriumCensus, EquilibriumKind};
pub use error::{Error, Result};
pub use field::{build_first_integral, FirstIntegral, PhasePoint};
pub use orbits::{classify_orbit, integrate, trace_level_curve, OrbitClass, OrbitTag, Trajectory};
pub use params::{derive_coriolis, derive_wave_params, CoriolisParams, Theta, WaveParams};
