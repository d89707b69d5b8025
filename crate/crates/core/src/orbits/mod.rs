//! Numerical orbits of the regularized planar system.
//!
//! Long integrations run in the regular time τ, dξ = (θφ − C1) dτ, whose
//! vector field is polynomial. When θ = ½ and f vanishes on the singular line
//! the whole line is stationary in τ; the common factor is divided out and the
//! remaining flow φ' = y, y' = f/(θ(φ − s)) is integrated directly in ξ.
//! The state carries ξ as a third component either way.

use serde::{Deserialize, Serialize};

pub mod integrator;
mod level;
mod survey;

use crate::equilibria::{classify, EquilibriumCensus, EquilibriumKind};
use crate::error::{Error, Result};
use crate::field::{build_first_integral, eval_f, FirstIntegral, PhasePoint, ShiftedIntegral};
use crate::params::WaveParams;
use crate::poly;
use integrator::{Control, DenseStep, Outcome, Tolerances};

pub use level::{axis_crossings, trace_level_curve, CurveBranch};
pub use survey::{canonical_levels, survey, OrbitSource, OrbitSurvey, SurveyOptions, SurveyedOrbit};

const REDUCE_TOL: f64 = 1e-12;

/// Default slope-jump factor, relative to the largest |φ'| on the orbit.
pub const DEFAULT_JUMP_FACTOR: f64 = 0.1;

/// Distance at which a separatrix counts as having reached an equilibrium.
/// A 1e−8 offset passes a saddle with eigenvalue ratio r at roughly
/// offset^(1/(1+r)), about 1e−4 for the 2:1 singular-line saddles.
pub const RETURN_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flow {
    /// (φ, y) in τ with the line factor kept.
    Regular,
    /// θ = ½ with a stationary singular line, integrated in ξ.
    Reduced,
}

/// The vector field that is actually integrated.
#[derive(Debug, Clone)]
pub struct System {
    pub flow: Flow,
    theta: f64,
    c1: f64,
    s: f64,
    f: Vec<f64>,
    df: Vec<f64>,
    /// f expanded in u = φ − s.
    fu: Vec<f64>,
    q: Vec<f64>,
    dq: Vec<f64>,
}

impl System {
    pub fn new(wp: &WaveParams) -> Self {
        let s = wp.singular_abscissa();
        let f = wp.f_coeffs().to_vec();
        let reduced = wp.theta.reciprocal() == 2 && eval_f(wp, s).abs() <= REDUCE_TOL * (1.0 + poly::magnitude(&f, s));
        let q = if reduced { poly::divide_by_linear_power(&f, &s, 1).0 } else { vec![0.0] };
        System {
            flow: if reduced { Flow::Reduced } else { Flow::Regular },
            theta: wp.theta_value(),
            c1: wp.c1,
            s,
            df: poly::derivative(&f),
            fu: poly::taylor_shift(&f, &s),
            dq: poly::derivative(&q),
            f,
            q,
        }
    }

    pub fn singular_abscissa(&self) -> f64 {
        self.s
    }

    /// Time derivative of (φ, y, ξ).
    pub fn rhs(&self, z: &[f64; 3]) -> [f64; 3] {
        let (phi, y) = (z[0], z[1]);
        match self.flow {
            Flow::Regular => {
                let l = self.theta * phi - self.c1;
                [y * l, (self.theta - 0.5) * y * y + poly::eval(&self.f, &phi), l]
            }
            Flow::Reduced => [y, poly::eval(&self.q, &phi) / self.theta, 1.0],
        }
    }

    /// Coordinates used for a run starting at `p`.
    pub fn coordinates_for(&self, p: PhasePoint) -> Coordinates {
        let u = p.phi - self.s;
        if self.flow == Flow::Regular && u != 0.0 {
            Coordinates::LogDistance { sign: u.signum() }
        } else {
            Coordinates::Phi
        }
    }

    fn rhs_in(&self, c: Coordinates, z: &[f64; 3]) -> [f64; 3] {
        match c {
            Coordinates::Phi => self.rhs(z),
            Coordinates::LogDistance { sign } => {
                let u = sign * z[0].exp();
                let y = z[1];
                [self.theta * y, (self.theta - 0.5) * y * y + poly::eval(&self.fu, &u), self.theta * u]
            }
        }
    }

    /// Jacobian of the (φ, y) part.
    pub fn jacobian(&self, p: PhasePoint) -> [[f64; 2]; 2] {
        match self.flow {
            Flow::Regular => {
                let l = self.theta * p.phi - self.c1;
                let fp = poly::eval(&self.df, &p.phi);
                [[self.theta * p.y, l], [fp, 2.0 * (self.theta - 0.5) * p.y]]
            }
            Flow::Reduced => [[0.0, 1.0], [poly::eval(&self.dq, &p.phi) / self.theta, 0.0]],
        }
    }

    /// Unit eigenvector of the positive eigenvalue at a saddle.
    pub fn unstable_direction(&self, p: PhasePoint) -> Option<(f64, f64)> {
        let j = self.jacobian(p);
        let tr = j[0][0] + j[1][1];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let disc = tr * tr - 4.0 * det;
        if det >= 0.0 || disc <= 0.0 {
            return None;
        }
        let lam = 0.5 * (tr + disc.sqrt());
        let a = (j[0][1], lam - j[0][0]);
        let b = (lam - j[1][1], j[1][0]);
        let v = if a.0.hypot(a.1) >= b.0.hypot(b.1) { a } else { b };
        let n = v.0.hypot(v.1);
        (n > 0.0).then(|| (v.0 / n, v.1 / n))
    }
}

/// State coordinates of a run. Off the singular line the regular flow is
/// integrated in w = ln|φ − s|, where u̇ = θyu becomes ẇ = θy; this keeps the
/// distance to the line to full relative precision as orbits approach it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coordinates {
    Phi,
    LogDistance { sign: f64 },
}

impl Coordinates {
    fn encode(self, p: PhasePoint, s: f64) -> [f64; 3] {
        match self {
            Coordinates::Phi => [p.phi, p.y, 0.0],
            Coordinates::LogDistance { .. } => [(p.phi - s).abs().ln(), p.y, 0.0],
        }
    }

    /// Distance u = φ − s of a state.
    pub fn u(self, z: &[f64; 3], s: f64) -> f64 {
        match self {
            Coordinates::Phi => z[0] - s,
            Coordinates::LogDistance { sign } => sign * z[0].exp(),
        }
    }

    pub fn phase(self, z: &[f64; 3], s: f64) -> PhasePoint {
        match self {
            Coordinates::Phi => PhasePoint::new(z[0], z[1]),
            Coordinates::LogDistance { .. } => PhasePoint::new(s + self.u(z, s), z[1]),
        }
    }
}

/// An equilibrium of the integrated flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowEquilibrium {
    pub location: PhasePoint,
    pub kind: EquilibriumKind,
    pub on_singular_line: bool,
}

/// Equilibria of the flow that is integrated. For the regular flow these are
/// the census entries; the reduced flow has the zeros of f/(φ − s) instead.
pub fn flow_equilibria(census: &EquilibriumCensus, sys: &System) -> Vec<FlowEquilibrium> {
    match sys.flow {
        Flow::Regular => census
            .equilibria
            .iter()
            .map(|e| FlowEquilibrium { location: e.location, kind: e.kind, on_singular_line: e.on_singular_line })
            .collect(),
        Flow::Reduced => poly::real_roots(&sys.q, 1e-10)
            .into_iter()
            .map(|r| {
                let p = PhasePoint::new(r.value, 0.0);
                let det = -poly::eval(&sys.dq, &r.value) / sys.theta;
                let tol = 1e-10 * (1.0 + poly::magnitude(&sys.dq, r.value));
                FlowEquilibrium { location: p, kind: classify(det, 0.0, r.multiplicity, tol), on_singular_line: false }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub tau: f64,
    pub point: PhasePoint,
    pub xi: f64,
}

/// Crossing of the singular line (only possible where the line is not
/// invariant, i.e. in the reduced flow), or the closest approach used by the
/// classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineEvent {
    pub tau: f64,
    pub xi: f64,
    pub y: f64,
}

/// A zero of y, where φ turns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub tau: f64,
    pub xi: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopReason {
    SpanReached,
    Escaped,
    TurningPoints,
    NearTarget { index: usize, distance: f64 },
    StepUnderflow { tau: f64 },
    StepLimit { tau: f64 },
    NonFinite { tau: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub flow: Flow,
    pub samples: Vec<TrajectorySample>,
    /// max |H − H(start)| over samples, relative to the largest term of H seen.
    pub h_drift_max: f64,
    pub events: Vec<LineEvent>,
    pub turning_points: Vec<TurningPoint>,
    pub stop: StopReason,
    pub coordinates: Coordinates,
    /// Abscissa of the singular line.
    pub shift: f64,
    /// Accepted steps with their interpolants, in order; states are in
    /// `coordinates`.
    pub steps: Vec<DenseStep<3>>,
}

impl Trajectory {
    pub fn start(&self) -> PhasePoint {
        self.samples[0].point
    }

    pub fn end(&self) -> PhasePoint {
        self.samples.last().unwrap().point
    }

    /// Point and ξ at time τ from the dense output.
    pub fn state_at(&self, tau: f64) -> Option<(PhasePoint, f64)> {
        self.steps
            .iter()
            .find(|s| {
                let (a, b) = (s.t0.min(s.t1()), s.t0.max(s.t1()));
                tau >= a && tau <= b
            })
            .map(|s| self.decode(&s.at(tau)))
    }

    /// Point and ξ of a raw state.
    pub fn decode(&self, z: &[f64; 3]) -> (PhasePoint, f64) {
        (self.coordinates.phase(z, self.shift), z[2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub tolerances: Tolerances,
    /// Stop once this many zeros of y have been passed.
    pub stop_after_turning_points: Option<usize>,
    /// Stop on entering the ball of `target_radius` around one of these,
    /// after having been at least twice that far from it.
    pub targets: Vec<PhasePoint>,
    pub target_radius: f64,
    pub escape_phi: f64,
    pub escape_y: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tolerances: Tolerances::default(),
            stop_after_turning_points: None,
            targets: Vec::new(),
            target_radius: RETURN_RADIUS,
            escape_phi: f64::INFINITY,
            escape_y: f64::INFINITY,
        }
    }
}

/// Integrate from `start` over τ ∈ [0, tau_span] (negative spans run backward).
pub fn integrate(wp: &WaveParams, start: PhasePoint, tau_span: f64, tol: &Tolerances) -> Result<Trajectory> {
    if !start.phi.is_finite() || !start.y.is_finite() {
        return Err(Error::InvalidParameter("start point is not finite".into()));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    let fi = build_first_integral(wp)?;
    let sys = System::new(wp);
    let opts = IntegrateOptions { tolerances: *tol, ..Default::default() };
    let traj = integrate_system(&sys, &fi, start, tau_span, &opts);
    match traj.stop {
        StopReason::StepUnderflow { tau } | StopReason::NonFinite { tau } | StopReason::StepLimit { tau } => {
            let last = traj.end();
            Err(Error::StepUnderflow { tau, phi: last.phi, y: last.y })
        }
        _ => Ok(traj),
    }
}

/// Integration with stopping rules; never fails, the outcome is in `stop`.
pub fn integrate_system(
    sys: &System,
    fi: &FirstIntegral,
    start: PhasePoint,
    tau_span: f64,
    opts: &IntegrateOptions,
) -> Trajectory {
    let s = sys.singular_abscissa();
    let coords = sys.coordinates_for(start);
    let shifted = ShiftedIntegral::new(fi);
    let u0 = start.phi - s;
    let h0 = shifted.eval(u0, start.y);
    let mut scale = shifted.scale(u0, start.y);
    let mut drift: f64 = 0.0;
    let mut samples = vec![TrajectorySample { tau: 0.0, point: start, xi: 0.0 }];
    let mut steps: Vec<DenseStep<3>> = Vec::new();
    let mut events = Vec::new();
    let mut tps = Vec::new();
    let mut stop = StopReason::SpanReached;
    let mut left: Vec<bool> = opts.targets.iter().map(|t| dist(start, *t) > 2.0 * opts.target_radius).collect();

    let outcome = integrator::integrate(
        |_t, z| sys.rhs_in(coords, z),
        0.0,
        coords.encode(start, s),
        tau_span,
        &opts.tolerances,
        |st| {
            let z = st.y1;
            let p = coords.phase(&z, s);
            samples.push(TrajectorySample { tau: st.t1(), point: p, xi: z[2] });
            let u = coords.u(&z, s);
            if let (Some(h0), Some(h)) = (h0, shifted.eval(u, z[1])) {
                scale = scale.max(shifted.scale(u, z[1]));
                drift = drift.max((h - h0).abs());
            }
            if coords == Coordinates::Phi && sys.flow == Flow::Reduced {
                if let Some(t) = st.crossing(0, s) {
                    let w = st.at(t);
                    events.push(LineEvent { tau: t, xi: w[2], y: w[1] });
                }
            }
            let mut ctl = Control::Continue;
            if let Some(t) = st.crossing(1, 0.0) {
                let w = st.at(t);
                tps.push(TurningPoint { tau: t, xi: w[2], phi: coords.phase(&w, s).phi });
                if opts.stop_after_turning_points.is_some_and(|n| tps.len() >= n) {
                    stop = StopReason::TurningPoints;
                    ctl = Control::Stop;
                }
            }
            if ctl == Control::Continue {
                for (i, t) in opts.targets.iter().enumerate() {
                    let mut best = f64::INFINITY;
                    for k in 1..=4 {
                        let w = st.at(st.t0 + st.h * k as f64 / 4.0);
                        best = best.min(dist(coords.phase(&w, s), *t));
                    }
                    if !left[i] {
                        left[i] = best > 2.0 * opts.target_radius;
                    } else if best <= opts.target_radius {
                        stop = StopReason::NearTarget { index: i, distance: best };
                        ctl = Control::Stop;
                        break;
                    }
                }
            }
            if ctl == Control::Continue && !(p.phi.abs() <= opts.escape_phi && p.y.abs() <= opts.escape_y) {
                stop = StopReason::Escaped;
                ctl = Control::Stop;
            }
            steps.push(st.clone());
            ctl
        },
    );
    match outcome {
        Outcome::Finished | Outcome::Stopped => {}
        Outcome::StepUnderflow { t } => stop = StopReason::StepUnderflow { tau: t },
        Outcome::TooManySteps { t } => stop = StopReason::StepLimit { tau: t },
        Outcome::NonFinite { t } => stop = StopReason::NonFinite { tau: t },
    }
    Trajectory {
        flow: sys.flow,
        samples,
        h_drift_max: if scale > 0.0 { drift / scale } else { 0.0 },
        events,
        turning_points: tps,
        stop,
        coordinates: coords,
        shift: s,
        steps,
    }
}

fn dist(a: PhasePoint, b: PhasePoint) -> f64 {
    (a.phi - b.phi).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitTag {
    PeriodicSmooth,
    Solitary,
    Peakon,
    AntiPeakon,
    PeriodicPeakon,
    Unbounded,
    BoundaryDegenerate,
}

impl std::fmt::Display for OrbitTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub tag: OrbitTag,
    /// Period in ξ, or the ξ-extent of an arch.
    pub period: Option<f64>,
    /// One-sided slope difference across the singular line.
    pub derivative_jump: Option<f64>,
    /// Closest approach to the singular line, for peakon-type orbits.
    pub line_event: Option<LineEvent>,
    /// Range of φ covered.
    pub phi_range: (f64, f64),
    pub diagnostics: String,
}

impl OrbitClass {
    fn bare(tag: OrbitTag, traj: &Trajectory, diagnostics: String) -> Self {
        OrbitClass {
            tag,
            period: None,
            derivative_jump: None,
            line_event: None,
            phi_range: phi_range(traj),
            diagnostics,
        }
    }
}

fn phi_range(traj: &Trajectory) -> (f64, f64) {
    traj.samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.point.phi), b.max(s.point.phi)))
}

/// Classify a trajectory.
///
/// `jump_threshold` is relative: a slope jump counts when it exceeds this
/// fraction of the largest |φ'| on the orbit.
pub fn classify_orbit(
    wp: &WaveParams,
    traj: &Trajectory,
    census: &EquilibriumCensus,
    jump_threshold: f64,
) -> OrbitClass {
    let sys = System::new(wp);
    let eqs = flow_equilibria(census, &sys);
    classify_with(&sys, &eqs, traj, jump_threshold, RETURN_RADIUS)
}

pub(crate) fn classify_with(
    sys: &System,
    eqs: &[FlowEquilibrium],
    traj: &Trajectory,
    jump_threshold: f64,
    radius: f64,
) -> OrbitClass {
    let nearest = |p: PhasePoint| {
        eqs.iter()
            .enumerate()
            .map(|(i, e)| (i, dist(p, e.location)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .filter(|(_, d)| *d <= radius)
            .map(|(i, _)| i)
    };
    let start = traj.start();
    let tps = &traj.turning_points;
    if start.y == 0.0 && !tps.is_empty() {
        let a = TurningPoint { tau: 0.0, xi: 0.0, phi: start.phi };
        return periodic(sys, eqs, traj, a, tps[0], jump_threshold);
    }
    if let (Some(i), Some(j)) = (nearest(start), nearest(traj.end())) {
        if traj.samples.len() > 2 {
            return connection(sys, eqs, traj, i, j);
        }
    }
    if tps.len() >= 2 {
        return periodic(sys, eqs, traj, tps[0], tps[1], jump_threshold);
    }
    match traj.stop {
        StopReason::Escaped => OrbitClass::bare(OrbitTag::Unbounded, traj, "left the escape box".into()),
        other => OrbitClass::bare(OrbitTag::BoundaryDegenerate, traj, format!("inconclusive: {other:?}")),
    }
}

fn connection(sys: &System, eqs: &[FlowEquilibrium], traj: &Trajectory, i: usize, j: usize) -> OrbitClass {
    let (a, b) = (eqs[i], eqs[j]);
    let xi_extent = (traj.samples.last().unwrap().xi - traj.samples[0].xi).abs();
    if i == j && a.kind == EquilibriumKind::Saddle && !a.on_singular_line {
        let mut c = OrbitClass::bare(OrbitTag::Solitary, traj, format!("homoclinic to φ = {}", a.location.phi));
        c.period = Some(f64::INFINITY);
        return c;
    }
    if i != j && a.on_singular_line && b.on_singular_line {
        let s = sys.singular_abscissa();
        let mean = traj.samples.iter().map(|p| p.point.phi).sum::<f64>() / traj.samples.len() as f64;
        let tag = if mean < s { OrbitTag::Peakon } else { OrbitTag::AntiPeakon };
        let last = traj.samples.last().unwrap();
        let mut c = OrbitClass::bare(tag, traj, "arch between the singular-line saddles".into());
        c.period = Some(xi_extent);
        c.derivative_jump = Some((a.location.y - b.location.y).abs());
        c.line_event = Some(LineEvent { tau: last.tau, xi: last.xi, y: b.location.y });
        return c;
    }
    OrbitClass::bare(
        OrbitTag::BoundaryDegenerate,
        traj,
        format!("connection from {:?} to {:?}", a.location, b.location),
    )
}

fn periodic(
    sys: &System,
    eqs: &[FlowEquilibrium],
    traj: &Trajectory,
    a: TurningPoint,
    b: TurningPoint,
    factor: f64,
) -> OrbitClass {
    let half = b.xi - a.xi;
    let period = 2.0 * half.abs();
    let (lo, hi) = (a.phi.min(b.phi), a.phi.max(b.phi));
    let max_y = traj.samples.iter().filter(|p| p.tau <= b.tau).map(|p| p.point.y.abs()).fold(0.0, f64::max);
    let mut class = OrbitClass {
        tag: OrbitTag::PeriodicSmooth,
        period: Some(period),
        derivative_jump: None,
        line_event: None,
        phi_range: (lo, hi),
        diagnostics: String::new(),
    };
    // Triangular orbits are bounded by the segment between the singular-line
    // saddles; without them a steep orbit is still smooth.
    if sys.flow == Flow::Reduced || !eqs.iter().any(|e| e.on_singular_line) {
        return class;
    }
    // The turning point next to the line; by reversibility the slope jump over
    // a window of 10⁻³ periods centred there is twice |y| at its edge.
    let s = sys.singular_abscissa();
    let near_a = (a.phi - s).abs() <= (b.phi - s).abs();
    let tp = if near_a { a } else { b };
    let inward = if near_a { half.signum() } else { -half.signum() };
    let target = tp.xi + inward * 0.5e-3 * period;
    let (t_lo, t_hi) = (a.tau.min(b.tau), a.tau.max(b.tau));
    let edge = traj
        .steps
        .iter()
        .filter(|st| st.t1().max(st.t0) >= t_lo && st.t0.min(st.t1()) <= t_hi)
        .find_map(|st| st.crossing(2, target).map(|t| st.at(t)[1]));
    let jump = edge.map(|y| 2.0 * y.abs()).unwrap_or(0.0);
    class.derivative_jump = Some(jump);
    if jump > factor * max_y && (tp.phi - s).abs() < 0.25 * (hi - lo) {
        class.tag = OrbitTag::PeriodicPeakon;
        class.line_event = Some(LineEvent { tau: tp.tau, xi: tp.xi, y: 0.0 });
    }
    class
}
