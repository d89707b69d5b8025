//! Bifurcation regions, the wave menus asserted for them, and sweeps of the
//! singular line that compare those menus with the numeric orbit survey.
//!
//! Domains, with Δ = 4C2² − 6C3 > 0 throughout:
//!
//! | theorem | domain | condition |
//! |---|---|---|
//! | T1 (θ = ¼) | D1 | g(φ̃−) > 0 |
//! | | D2 | g(φ̃−) = 0 |
//! | | D3 | g(φ̃+) = 0 |
//! | | D4 | g(φ̃+) > 0 > g(φ̃−) |
//! | | D5 | K = 0 |
//! | T2 (θ = ½, C1 ≠ 0) | D1 | g(φ̃−) > 0 |
//! | | D2 | g(φ̃−) = 0 |
//! | | D3 | g(φ̃+) = 0 |
//! | | D4 | g(φ̃+) < 0 |
//! | | D5 | g(φ̃+) > 0 > g(φ̃−) |
//! | | D6 | K = 0 |
//! | T3 (θ = ½, C1 = 0) | D1 | g(φ̃−) > 0 |
//! | | D2 | g(φ̃+) < 0 |
//! | | D3 | g(φ̃+) > 0 > g(φ̃−) |
//!
//! The T3 conditions as usually stated overlap at g(φ̃−) = 0; that equality
//! and g(φ̃+) = 0 are reported as boundaries.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{census, find_g_roots, EquilibriumCensus};
use crate::error::{Error, Result};
use crate::orbits::{survey, OrbitSurvey, OrbitTag, SurveyOptions};
use crate::params::{derive_coriolis, derive_wave_params, Theta, WaveParams};
use crate::poly;

/// Relative tolerance for an equality condition (D2, D3, K = 0, C1 = 0).
pub const EQUALITY_TOL: f64 = 1e-9;
/// Relative margin a strict inequality must clear. Values between the two
/// tolerances are boundaries, so labels are locally constant.
pub const STRICT_TOL: f64 = 1e-7;

/// Census tolerance used by sweeps.
pub const CENSUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T1,
    T2,
    T3,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Domain {
        theorem: Theorem,
        domain: u8,
    },
    /// A defining inequality is within tolerance.
    Boundary {
        theorem: Option<Theorem>,
        reason: String,
    },
    /// No theorem covers these parameters.
    Outside {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub region: Region,
    /// Ordering of the singular line among 0 and the zeros of g,
    /// e.g. `0 < 4C1 < φ1`.
    pub singular_line_position: String,
    /// Distinct real zeros of g, descending: φ1 > φ2 > φ3.
    pub roots: Vec<f64>,
    /// C1/θ.
    pub singular_abscissa: f64,
}

impl RegionLabel {
    pub fn is_boundary(&self) -> bool {
        matches!(self.region, Region::Boundary { .. })
    }

    pub fn name(&self) -> String {
        match &self.region {
            Region::Domain { theorem, domain } => format!("{theorem}/D{domain}"),
            Region::Boundary { theorem: Some(t), .. } => format!("{t}/boundary"),
            Region::Boundary { theorem: None, .. } => "boundary".to_string(),
            Region::Outside { .. } => "outside".to_string(),
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name(), self.singular_line_position)?;
        match &self.region {
            Region::Boundary { reason, .. } | Region::Outside { reason } => write!(f, ": {reason}"),
            Region::Domain { .. } => Ok(()),
        }
    }
}

/// Three-way sign with an equality band and a strict margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
    Unclear,
}

fn sign(v: f64, scale: f64) -> Sign {
    let a = v.abs();
    if a <= EQUALITY_TOL * scale {
        Sign::Zero
    } else if a <= STRICT_TOL * scale {
        Sign::Unclear
    } else if v > 0.0 {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

fn line_symbol(theta: Theta) -> String {
    match theta.reciprocal() {
        1 => "C1".to_string(),
        n => format!("{n}C1"),
    }
}

fn position_descriptor(theta: Theta, s: f64, roots: &[f64]) -> String {
    let mut marks: Vec<(f64, String)> = roots.iter().enumerate().map(|(i, &r)| (r, format!("φ{}", i + 1))).collect();
    if !roots.contains(&0.0) {
        marks.push((0.0, "0".to_string()));
    }
    marks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let line = line_symbol(theta);
    let mut out = String::new();
    let mut placed = false;
    for (i, (x, name)) in marks.iter().enumerate() {
        let near = (s - x).abs() <= EQUALITY_TOL * (1.0 + x.abs());
        if !placed && (near || s < *x) {
            if i > 0 {
                out.push_str(" < ");
            }
            out.push_str(&line);
            out.push_str(if near { " = " } else { " < " });
            placed = true;
        } else if i > 0 {
            out.push_str(" < ");
        }
        out.push_str(name);
    }
    if !placed {
        out.push_str(" < ");
        out.push_str(&line);
    }
    out
}

/// Locate `wp` in the domain tables.
pub fn classify_region(wp: &WaveParams, census: &EquilibriumCensus) -> RegionLabel {
    let s = wp.singular_abscissa();
    let mut roots: Vec<f64> = find_g_roots(wp, CENSUS_TOL).into_iter().map(|r| r.value).collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    roots.dedup_by(|a, b| (*a - *b).abs() <= EQUALITY_TOL * (1.0 + a.abs()));
    let singular_line_position = position_descriptor(wp.theta, s, &roots);
    let region = region_of(wp, census, s, &roots);
    RegionLabel { region, singular_line_position, roots, singular_abscissa: s }
}

fn region_of(wp: &WaveParams, census: &EquilibriumCensus, s: f64, roots: &[f64]) -> Region {
    let theorem = match (wp.theta.reciprocal(), sign(wp.c1, 1.0 + s.abs())) {
        (4, _) => Theorem::T1,
        (2, Sign::Zero) => Theorem::T3,
        (2, Sign::Unclear) => {
            return Region::Boundary { theorem: None, reason: "C1 within tolerance of zero".into() };
        }
        (2, _) => Theorem::T2,
        (n, _) => return Region::Outside { reason: format!("no domain table for θ = 1/{n}") },
    };
    let boundary = |reason: &str| Region::Boundary { theorem: Some(theorem), reason: reason.to_string() };
    let outside = |reason: &str| Region::Outside { reason: reason.to_string() };
    if wp.c3 == 0.0 {
        return outside("C3 = 0: g is not a cubic");
    }
    let (c2, c3, k) = (wp.c2, wp.c3, wp.big_k);
    match sign(census.discriminant, 4.0 * c2 * c2 + 6.0 * c3.abs()) {
        Sign::Pos => {}
        Sign::Neg => return outside("4C2² ≤ 6C3"),
        _ => return boundary("4C2² − 6C3 within tolerance of zero"),
    }
    let k_sign = sign(k, 1.0 + c2.abs() + c3.abs());

    // Singular-line placement matters wherever the line carries equilibria.
    if theorem == Theorem::T1 {
        for (i, &r) in roots.iter().enumerate() {
            if matches!(sign(s - r, 1.0 + r.abs()), Sign::Zero | Sign::Unclear) {
                return boundary(&format!("singular line at φ{}", i + 1));
            }
        }
        if matches!(sign(s, 1.0), Sign::Zero | Sign::Unclear) {
            return boundary("singular line at 0");
        }
    }

    match k_sign {
        Sign::Zero => {
            return match theorem {
                Theorem::T1 => Region::Domain { theorem, domain: 5 },
                Theorem::T2 => Region::Domain { theorem, domain: 6 },
                Theorem::T3 => outside("K = 0 is not covered for C1 = 0"),
            };
        }
        Sign::Unclear => return boundary("K within tolerance of zero"),
        _ => {}
    }

    let g = wp.g_coeffs();
    let (lo, hi) = census.critical_points.expect("Δ > 0 with C3 ≠ 0");
    let gm = sign(poly::eval(&g, &lo), poly::magnitude(&g, lo));
    let gp = sign(poly::eval(&g, &hi), poly::magnitude(&g, hi));
    if gm == Sign::Unclear || gp == Sign::Unclear {
        return boundary("g at a critical point within tolerance of zero");
    }
    let domain = match theorem {
        Theorem::T1 | Theorem::T2 => match (gm, gp) {
            (Sign::Pos, _) => 1,
            (Sign::Zero, _) => 2,
            (_, Sign::Zero) => 3,
            (Sign::Neg, Sign::Pos) if theorem == Theorem::T1 => 4,
            (Sign::Neg, Sign::Pos) => 5,
            (_, Sign::Neg) if theorem == Theorem::T2 => 4,
            _ => return outside("g(φ̃+) < 0"),
        },
        Theorem::T3 => match (gm, gp) {
            (Sign::Pos, _) => 1,
            (_, Sign::Neg) => 2,
            (Sign::Neg, Sign::Pos) => 3,
            _ => return boundary("g at a critical point vanishes"),
        },
    };
    Region::Domain { theorem, domain }
}

/// Asserted number of orbits of one wave type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Count {
    Absent,
    AtLeast(usize),
    Unspecified,
}

impl Count {
    pub fn admits(self, observed: usize) -> bool {
        match self {
            Count::Absent => observed == 0,
            Count::AtLeast(n) => observed >= n,
            Count::Unspecified => true,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Absent => f.write_str("0"),
            Count::AtLeast(n) => write!(f, ">={n}"),
            Count::Unspecified => f.write_str("any"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveMenu {
    pub solitary: Count,
    pub periodic_smooth: Count,
    pub peakon: Count,
    pub periodic_peakon: Count,
    /// At least one smooth wave, solitary or periodic.
    pub smooth_any: bool,
}

impl fmt::Display for WaveMenu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "solitary {} periodicSmooth {} peakon {} periodicPeakon {}",
            self.solitary, self.periodic_smooth, self.peakon, self.periodic_peakon
        )?;
        if self.smooth_any {
            f.write_str(" smooth>=1")?;
        }
        Ok(())
    }
}

/// Orbit counts seen by the numeric survey.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservedMenu {
    /// Homoclinic loops.
    pub solitary: usize,
    /// Families of smooth closed orbits, keyed by the enclosed equilibria.
    pub periodic_smooth: usize,
    /// Arches, crest up or down.
    pub peakon: usize,
    /// Families of closed orbits with a corner on the singular line.
    pub periodic_peakon: usize,
}

impl ObservedMenu {
    pub fn from_survey(sv: &OrbitSurvey) -> Self {
        ObservedMenu {
            solitary: sv.count(OrbitTag::Solitary),
            periodic_smooth: sv.families(OrbitTag::PeriodicSmooth),
            peakon: sv.count(OrbitTag::Peakon) + sv.count(OrbitTag::AntiPeakon),
            periodic_peakon: sv.families(OrbitTag::PeriodicPeakon),
        }
    }
}

impl fmt::Display for ObservedMenu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "solitary {} periodicSmooth {} peakon {} periodicPeakon {}",
            self.solitary, self.periodic_smooth, self.peakon, self.periodic_peakon
        )
    }
}

impl WaveMenu {
    pub fn agrees_with(&self, seen: &ObservedMenu) -> bool {
        self.solitary.admits(seen.solitary)
            && self.periodic_smooth.admits(seen.periodic_smooth)
            && self.peakon.admits(seen.peakon)
            && self.periodic_peakon.admits(seen.periodic_peakon)
            && (!self.smooth_any || seen.solitary + seen.periodic_smooth >= 1)
    }
}

fn inside(s: f64, lo: Option<&f64>, hi: Option<&f64>) -> bool {
    matches!((lo, hi), (Some(&a), Some(&b)) if a < s && s < b)
}

/// The menu asserted for a domain.
pub fn predict_wave_menu(label: &RegionLabel) -> Result<WaveMenu> {
    let Region::Domain { theorem, domain } = label.region else {
        return Err(Error::NoPrediction(label.to_string()));
    };
    let smooth = WaveMenu {
        solitary: Count::Unspecified,
        periodic_smooth: Count::Unspecified,
        peakon: Count::Absent,
        periodic_peakon: Count::Absent,
        smooth_any: true,
    };
    let s = label.singular_abscissa;
    let r = &label.roots;
    Ok(match theorem {
        Theorem::T1 => {
            let zero = 0.0;
            let mut window = inside(s, Some(&zero), r.first());
            if domain == 4 || domain == 5 {
                window |= inside(s, r.get(2), r.get(1));
            }
            if window {
                let peakon = if domain == 2 { Count::Absent } else { Count::AtLeast(1) };
                WaveMenu { peakon, periodic_peakon: Count::AtLeast(2), ..smooth }
            } else {
                smooth
            }
        }
        Theorem::T2 => smooth,
        Theorem::T3 => {
            let base = WaveMenu { smooth_any: false, ..smooth };
            if domain == 3 {
                WaveMenu { solitary: Count::AtLeast(2), periodic_smooth: Count::AtLeast(2), ..base }
            } else {
                WaveMenu { periodic_smooth: Count::AtLeast(1), ..base }
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub c1: f64,
    /// Wave speed, for sweeps in physical mode.
    pub c: Option<f64>,
    pub label: RegionLabel,
    pub predicted: Option<WaveMenu>,
    pub observed: ObservedMenu,
    /// `None` when the sample is excluded (boundary, uncovered, or failed).
    pub agreement: Option<bool>,
    pub diagnostics: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub samples: Vec<SweepSample>,
}

impl SweepReport {
    /// (agreeing, compared) over samples with a prediction.
    pub fn tally(&self) -> (usize, usize) {
        let compared: Vec<bool> = self.samples.iter().filter_map(|s| s.agreement).collect();
        (compared.iter().filter(|&&a| a).count(), compared.len())
    }

    pub fn agreement_rate(&self) -> Option<f64> {
        let (ok, n) = self.tally();
        (n > 0).then(|| ok as f64 / n as f64)
    }

    pub fn boundary_count(&self) -> usize {
        self.samples.iter().filter(|s| s.label.is_boundary()).count()
    }
}

/// Evaluate one parameter set: region, prediction, survey, agreement.
pub fn evaluate(wp: &WaveParams, opts: &SurveyOptions) -> SweepSample {
    let cen = census(wp, CENSUS_TOL);
    let label = classify_region(wp, &cen);
    let predicted = predict_wave_menu(&label).ok();
    let (observed, mut diagnostics) = match survey(wp, &cen, opts) {
        Ok(sv) => (ObservedMenu::from_survey(&sv), String::new()),
        Err(e) => (ObservedMenu::default(), format!("survey failed: {e}")),
    };
    let agreement = match &predicted {
        Some(menu) if diagnostics.is_empty() => Some(menu.agrees_with(&observed)),
        _ => None,
    };
    if agreement == Some(false) {
        diagnostics = format!(
            "{label}: predicted [{}], observed [{observed}]; equilibria {:?}",
            predicted.unwrap(),
            cen.equilibria.iter().map(|e| (e.location.phi, e.location.y, e.kind)).collect::<Vec<_>>()
        );
    }
    SweepSample { c1: wp.c1, c: wp.c, label, predicted, observed, agreement, diagnostics }
}

/// `count` points from `hi` down to `lo`; values within rounding of zero
/// are snapped to zero.
pub fn decreasing_grid(hi: f64, lo: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!("sweep needs at least 2 samples, got {count}")));
    }
    if !(hi.is_finite() && lo.is_finite() && hi > lo) {
        return Err(Error::InvalidParameter(format!("sweep range must run from right to left, got {hi} -> {lo}")));
    }
    let snap = 1e-12 * (hi - lo);
    Ok((0..count)
        .map(|i| {
            let v = hi + (lo - hi) * i as f64 / (count - 1) as f64;
            if v.abs() < snap {
                0.0
            } else {
                v
            }
        })
        .collect())
}

/// Move the singular line from right to left: C1 runs from `c1_range.0`
/// down to `c1_range.1` with the other coefficients of `base` fixed.
pub fn sweep_singular_line(base: &WaveParams, c1_range: (f64, f64), count: usize) -> Result<SweepReport> {
    sweep_singular_line_with(base, c1_range, count, &SurveyOptions::default())
}

pub fn sweep_singular_line_with(
    base: &WaveParams,
    c1_range: (f64, f64),
    count: usize,
    opts: &SurveyOptions,
) -> Result<SweepReport> {
    let grid = decreasing_grid(c1_range.0, c1_range.1, count)?;
    let samples = grid.par_iter().map(|&c1| evaluate(&base.with_c1(c1), opts)).collect();
    Ok(SweepReport { samples })
}

/// Physical mode: vary the wave speed c at fixed Ω and θ. C1 = c − β₀/β
/// grows with c, so speeds running from `c_range.0` down move the line
/// from right to left.
pub fn sweep_speed(
    omega: f64,
    theta: Theta,
    c_range: (f64, f64),
    count: usize,
    opts: &SurveyOptions,
) -> Result<SweepReport> {
    let cp = derive_coriolis(omega)?;
    let grid = decreasing_grid(c_range.0, c_range.1, count)?;
    let params: Vec<WaveParams> = grid.iter().map(|&c| derive_wave_params(&cp, c, theta)).collect::<Result<_>>()?;
    let samples = params.par_iter().map(|wp| evaluate(wp, opts)).collect();
    Ok(SweepReport { samples })
}
