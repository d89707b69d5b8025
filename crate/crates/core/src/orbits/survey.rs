//! Observed orbit inventory for one parameter set.
//!
//! Separatrices are shot from every saddle; ordinary orbits are started at the
//! axis crossings of canonical levels: midpoints between consecutive critical
//! levels, critical levels offset by small fractions of the gaps to their
//! neighbours, and one level beyond each end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::Tolerances;
use super::{
    axis_crossings, classify_with, flow_equilibria, integrate_system, FlowEquilibrium, IntegrateOptions, OrbitClass,
    OrbitTag, System, Trajectory, DEFAULT_JUMP_FACTOR, RETURN_RADIUS,
};
use crate::equilibria::{EquilibriumCensus, EquilibriumKind};
use crate::error::Result;
use crate::field::{build_first_integral, FirstIntegral, PhasePoint};
use crate::params::WaveParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyOptions {
    pub jump_factor: f64,
    /// Offsets from each critical level, as fractions of the gap to the
    /// neighbouring critical level.
    pub level_offsets: Vec<f64>,
    pub shoot_offset: f64,
    pub return_radius: f64,
    pub tau_span: f64,
    pub tolerances: Tolerances,
    /// Keep at most this many points per orbit for drawing; 0 keeps none.
    pub curve_points: usize,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        SurveyOptions {
            jump_factor: DEFAULT_JUMP_FACTOR,
            level_offsets: vec![1e-3, 1e-7],
            shoot_offset: 1e-8,
            return_radius: RETURN_RADIUS,
            tau_span: 1e5,
            tolerances: Tolerances { rtol: 1e-10, atol: 1e-12, max_steps: 200_000, ..Tolerances::default() },
            curve_points: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OrbitSource {
    /// Started at an axis crossing of the level h.
    Level { h: f64, phi: f64 },
    /// Shot from equilibrium `from` along ±(unstable direction).
    Separatrix { from: usize, sign: i8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyedOrbit {
    pub class: OrbitClass,
    pub source: OrbitSource,
    /// Indices of the axis equilibria enclosed by a closed orbit.
    pub family: Vec<usize>,
    pub h_drift: f64,
    /// Thinned samples for drawing, mirrored to a full loop for closed orbits.
    pub curve: Vec<PhasePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSurvey {
    pub equilibria: Vec<FlowEquilibrium>,
    pub critical_levels: Vec<f64>,
    pub levels: Vec<f64>,
    pub orbits: Vec<SurveyedOrbit>,
}

impl OrbitSurvey {
    pub fn count(&self, tag: OrbitTag) -> usize {
        self.orbits.iter().filter(|o| o.class.tag == tag).count()
    }

    /// Number of distinct enclosed-equilibrium sets among orbits with `tag`.
    pub fn families(&self, tag: OrbitTag) -> usize {
        let mut keys: Vec<&Vec<usize>> = self.orbits.iter().filter(|o| o.class.tag == tag).map(|o| &o.family).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }
}

struct Ctx<'a> {
    sys: System,
    fi: FirstIntegral,
    eqs: Vec<FlowEquilibrium>,
    opts: &'a SurveyOptions,
    escape_phi: f64,
    escape_y: f64,
}

impl Ctx<'_> {
    fn run(&self, start: PhasePoint, turning: Option<usize>, targets: Vec<PhasePoint>) -> Trajectory {
        let io = IntegrateOptions {
            tolerances: self.opts.tolerances,
            stop_after_turning_points: turning,
            targets,
            target_radius: self.opts.return_radius,
            escape_phi: self.escape_phi,
            escape_y: self.escape_y,
        };
        integrate_system(&self.sys, &self.fi, start, self.opts.tau_span, &io)
    }

    fn finish(&self, traj: &Trajectory, class: OrbitClass, source: OrbitSource) -> SurveyedOrbit {
        let closed = matches!(class.tag, OrbitTag::PeriodicSmooth | OrbitTag::PeriodicPeakon);
        let family = if closed {
            let (lo, hi) = class.phi_range;
            self.eqs
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.on_singular_line && e.location.phi > lo && e.location.phi < hi)
                .map(|(i, _)| i)
                .collect()
        } else {
            Vec::new()
        };
        let mut curve = Vec::new();
        if let Some(stride) = traj.samples.len().checked_div(self.opts.curve_points) {
            let stride = stride.max(1);
            curve = traj.samples.iter().step_by(stride).map(|s| s.point).collect();
            curve.push(traj.end());
            if closed {
                let back: Vec<PhasePoint> = curve.iter().rev().map(|p| PhasePoint::new(p.phi, -p.y)).collect();
                curve.extend(back);
            }
        }
        SurveyedOrbit { class, source, family, h_drift: traj.h_drift_max, curve }
    }
}

/// Survey the phase portrait of `wp`.
pub fn survey(wp: &WaveParams, census: &EquilibriumCensus, opts: &SurveyOptions) -> Result<OrbitSurvey> {
    let fi = build_first_integral(wp)?;
    let sys = System::new(wp);
    let eqs = flow_equilibria(census, &sys);
    let s = wp.singular_abscissa();
    let reach = 1.0 + s.abs() + eqs.iter().map(|e| e.location.phi.abs() + e.location.y.abs()).fold(0.0, f64::max);
    let ctx = Ctx { fi, eqs, opts, escape_phi: 20.0 * reach, escape_y: 1e3 * reach * reach, sys };
    let saddles: Vec<PhasePoint> =
        ctx.eqs.iter().filter(|e| e.kind == EquilibriumKind::Saddle).map(|e| e.location).collect();

    // Separatrices.
    let mut shots = Vec::new();
    for (i, e) in ctx.eqs.iter().enumerate() {
        if e.kind != EquilibriumKind::Saddle {
            continue;
        }
        let Some(v) = ctx.sys.unstable_direction(e.location) else { continue };
        if e.on_singular_line && v.0.abs() < 1e-12 {
            continue;
        }
        for sign in [1i8, -1] {
            let d = sign as f64 * opts.shoot_offset * (1.0 + e.location.phi.abs() + e.location.y.abs());
            shots.push((i, sign, PhasePoint::new(e.location.phi + d * v.0, e.location.y + d * v.1)));
        }
    }
    let mut orbits: Vec<SurveyedOrbit> = shots
        .par_iter()
        .map(|&(i, sign, start)| {
            let traj = ctx.run(start, None, saddles.clone());
            let class = classify_with(&ctx.sys, &ctx.eqs, &traj, opts.jump_factor, opts.return_radius);
            ctx.finish(&traj, class, OrbitSource::Separatrix { from: i, sign })
        })
        .collect();

    // Canonical levels.
    let mut crit: Vec<f64> = ctx.eqs.iter().filter_map(|e| ctx.fi.eval_h(e.location).ok()).collect();
    crit.sort_by(f64::total_cmp);
    crit.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    let levels = canonical_levels(&crit, &opts.level_offsets);
    let window = (-ctx.escape_phi, ctx.escape_phi);
    let near_eq =
        |x: f64| ctx.eqs.iter().any(|e| e.location.y == 0.0 && (x - e.location.phi).abs() <= 1e-9 * (1.0 + x.abs()));
    let per_level: Vec<Vec<SurveyedOrbit>> = levels
        .par_iter()
        .map(|&h| {
            let starts: Vec<f64> = axis_crossings(&ctx.fi, h, window).into_iter().filter(|&x| !near_eq(x)).collect();
            let mut done: Vec<f64> = Vec::new();
            let mut found = Vec::new();
            for &x in &starts {
                if done.iter().any(|d| (d - x).abs() <= 1e-6 * (1.0 + x.abs())) {
                    continue;
                }
                let traj = ctx.run(PhasePoint::new(x, 0.0), Some(1), Vec::new());
                let class = classify_with(&ctx.sys, &ctx.eqs, &traj, opts.jump_factor, opts.return_radius);
                if let Some(tp) = traj.turning_points.first() {
                    done.push(tp.phi);
                }
                found.push(ctx.finish(&traj, class, OrbitSource::Level { h, phi: x }));
            }
            found
        })
        .collect();
    orbits.extend(per_level.into_iter().flatten());
    Ok(OrbitSurvey { equilibria: ctx.eqs.clone(), critical_levels: crit, levels, orbits })
}

/// Midpoints between consecutive critical levels, each critical level shifted
/// towards its neighbours by offset × gap (the whole spread at the ends), and
/// one level half a spread beyond either end.
pub fn canonical_levels(crit: &[f64], offsets: &[f64]) -> Vec<f64> {
    if crit.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = (crit[0], *crit.last().unwrap());
    let spread = if hi > lo { hi - lo } else { 1.0 + lo.abs() };
    let mut out = vec![lo - 0.5 * spread, hi + 0.5 * spread];
    out.extend(crit.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    for (i, &c) in crit.iter().enumerate() {
        let below = if i > 0 { c - crit[i - 1] } else { spread };
        let above = if i + 1 < crit.len() { crit[i + 1] - c } else { spread };
        for &o in offsets {
            out.push(c - o * below);
            out.push(c + o * above);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
