//! Equilibria of the regularized system and the root-structure case labels.
//!
//! Axis equilibria are the zeros of f(φ) = φ g(φ); the singular line carries
//! a symmetric pair (s, ±y*) with y*² = f(s)/(½ − θ) whenever that is positive.
//! The case labels follow the cubic g:
//!
//! * `1i`–`1v`: Δ = 4C2² − 6C3 > 0 and K ≠ 0, split by the signs of g at its
//!   local minimum φ̃− and local maximum φ̃+;
//! * `2`: Δ ≤ 0 (g monotone);
//! * `3i`–`3iii`: K = 0, split by the sign of C2² − 2C3;
//! * `Reduced`: C3 = 0, where g is not a cubic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{eval_f, eval_f_prime, eval_g, rhs_regular, PhasePoint};
use crate::params::WaveParams;
use crate::poly::{self, RealRoot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Saddle,
    Center,
    Node,
    Cusp,
    Degenerate,
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub location: PhasePoint,
    pub kind: EquilibriumKind,
    pub on_singular_line: bool,
    /// Root multiplicity of f for axis equilibria, 1 on the singular line.
    pub multiplicity: u32,
    pub determinant: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "1i")]
    OneI,
    #[serde(rename = "1ii")]
    OneIi,
    #[serde(rename = "1iii")]
    OneIii,
    #[serde(rename = "1iv")]
    OneIv,
    #[serde(rename = "1v")]
    OneV,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3i")]
    ThreeI,
    #[serde(rename = "3ii")]
    ThreeIi,
    #[serde(rename = "3iii")]
    ThreeIii,
    Reduced,
    /// Δ within tolerance of zero: between case 1 and case 2.
    Boundary,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::OneI => "1i",
            CaseLabel::OneIi => "1ii",
            CaseLabel::OneIii => "1iii",
            CaseLabel::OneIv => "1iv",
            CaseLabel::OneV => "1v",
            CaseLabel::Two => "2",
            CaseLabel::ThreeI => "3i",
            CaseLabel::ThreeIi => "3ii",
            CaseLabel::ThreeIii => "3iii",
            CaseLabel::Reduced => "Reduced",
            CaseLabel::Boundary => "Boundary",
        }
    }

    /// Number of distinct axis equilibria implied by the root structure.
    pub fn axis_count(self) -> Option<usize> {
        match self {
            CaseLabel::OneI | CaseLabel::OneV | CaseLabel::Two | CaseLabel::ThreeIi => Some(2),
            CaseLabel::OneIi | CaseLabel::OneIv | CaseLabel::ThreeI => Some(3),
            CaseLabel::OneIii => Some(4),
            CaseLabel::ThreeIii => Some(1),
            CaseLabel::Reduced | CaseLabel::Boundary => None,
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCensus {
    pub equilibria: Vec<Equilibrium>,
    pub case_label: CaseLabel,
    /// Δ = 4C2² − 6C3.
    pub discriminant: f64,
    /// Local minimum and maximum of g, when Δ > 0.
    pub critical_points: Option<(f64, f64)>,
    /// (g(φ̃−), g(φ̃+)) when Δ > 0.
    pub g_at_critical_points: Option<(f64, f64)>,
    /// Decisions that were within tolerance of a boundary.
    pub boundary_flags: Vec<String>,
    pub notes: Vec<String>,
}

impl EquilibriumCensus {
    pub fn axis(&self) -> impl Iterator<Item = &Equilibrium> {
        self.equilibria.iter().filter(|e| !e.on_singular_line)
    }

    pub fn singular_pair(&self) -> Option<(Equilibrium, Equilibrium)> {
        let mut it = self.equilibria.iter().filter(|e| e.on_singular_line);
        match (it.next(), it.next()) {
            (Some(a), Some(b)) => {
                if a.location.y > b.location.y {
                    Some((*a, *b))
                } else {
                    Some((*b, *a))
                }
            }
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        !self.boundary_flags.is_empty() || self.case_label == CaseLabel::Boundary
    }
}

/// Local minimum and maximum abscissae (φ̃−, φ̃+) of g when Δ > 0.
pub fn critical_points(wp: &WaveParams) -> Option<(f64, f64)> {
    let (c2, c3) = (wp.c2, wp.c3);
    if c3 == 0.0 {
        return None;
    }
    let disc = 4.0 * c2 * c2 - 6.0 * c3;
    if disc <= 0.0 {
        return None;
    }
    // Stable quadratic formula for 3C3 x² + 2C2 x + ½ = 0.
    let sq = disc.sqrt();
    let sign = if c2 < 0.0 { -1.0 } else { 1.0 };
    let qv = -(c2 + sign * sq / 2.0);
    let r1 = qv / (3.0 * c3);
    let r2 = 0.5 / qv;
    // g'' = 6C3 x + 2C2 decides which is the minimum.
    let gpp = |x: f64| 6.0 * c3 * x + 2.0 * c2;
    if gpp(r1) > 0.0 {
        Some((r1, r2))
    } else {
        Some((r2, r1))
    }
}

/// Real roots of the cubic g with multiplicities, ascending.
pub fn find_g_roots(wp: &WaveParams, tol: f64) -> Vec<RealRoot> {
    let g = wp.g_coeffs();
    if wp.c3 == 0.0 {
        return quadratic_roots(&g[..3], tol);
    }
    let mag = |x: f64| poly::magnitude(&g, x);
    if let Some((lo, hi)) = critical_points(wp) {
        let (glo, ghi) = (eval_g(wp, lo), eval_g(wp, hi));
        let sum = -wp.c2 / wp.c3;
        for (x, gx) in [(lo, glo), (hi, ghi)] {
            if gx.abs() <= tol * mag(x) {
                let simple = sum - 2.0 * x;
                let mut out = vec![
                    RealRoot { value: x, multiplicity: 2 },
                    RealRoot { value: poly::newton_polish(&g, simple, 2), multiplicity: 1 },
                ];
                out.sort_by(|a, b| a.value.total_cmp(&b.value));
                return out;
            }
        }
    } else {
        // Δ ≤ 0: an inflection tangent to the axis is a triple root.
        let x = -wp.c2 / (3.0 * wp.c3);
        let disc = 4.0 * wp.c2 * wp.c2 - 6.0 * wp.c3;
        if disc.abs() <= tol * (4.0 * wp.c2 * wp.c2 + 6.0 * wp.c3.abs()) && eval_g(wp, x).abs() <= tol * mag(x) {
            return vec![RealRoot { value: x, multiplicity: 3 }];
        }
    }
    let mut roots: Vec<f64> =
        cubic_real_roots(wp.c3, wp.c2, 0.5, wp.big_k).into_iter().map(|r| poly::newton_polish(&g, r, 1)).collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    merge(roots)
}

fn merge(roots: Vec<f64>) -> Vec<RealRoot> {
    let mut out: Vec<RealRoot> = Vec::new();
    for r in roots {
        if let Some(last) = out.last_mut() {
            if (r - last.value).abs() <= 1e-7 * (1.0 + r.abs().max(last.value.abs())) {
                let m = last.multiplicity as f64;
                last.value = (last.value * m + r) / (m + 1.0);
                last.multiplicity += 1;
                continue;
            }
        }
        out.push(RealRoot { value: r, multiplicity: 1 });
    }
    out
}

/// Roots of a0 + a1 x + a2 x² (degree reduced when a2 = 0).
fn quadratic_roots(c: &[f64], tol: f64) -> Vec<RealRoot> {
    let (a0, a1, a2) = (c[0], c[1], c[2]);
    if a2 == 0.0 {
        return if a1 == 0.0 { vec![] } else { vec![RealRoot { value: -a0 / a1, multiplicity: 1 }] };
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let scale = a1 * a1 + (4.0 * a2 * a0).abs();
    if disc.abs() <= tol * scale {
        return vec![RealRoot { value: -a1 / (2.0 * a2), multiplicity: 2 }];
    }
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
    let q = if a1 == 0.0 { -0.5 * disc.sqrt() } else { q };
    let mut r = vec![q / a2, a0 / q];
    r.sort_by(|a, b| a.total_cmp(b));
    r.into_iter().map(|value| RealRoot { value, multiplicity: 1 }).collect()
}

/// Real roots of a x³ + b x² + c x + d by the trigonometric / Cardano forms.
fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let (b, c, d) = (b / a, c / a, d / a);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc < 0.0 {
        let r = (-p / 3.0).sqrt();
        let phi = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0).acos();
        (0..3).map(|j| 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * j as f64) / 3.0).cos() - shift).collect()
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        vec![u + v - shift]
    }
}

/// Determinant and trace of the Jacobian of the regular system at an equilibrium.
pub fn linearization_determinant(wp: &WaveParams, p: PhasePoint) -> Result<(f64, f64)> {
    let (a, b) = rhs_regular(wp, p);
    let residual = a.hypot(b);
    let scale = 1.0 + poly::magnitude(&wp.f_coeffs(), p.phi) + p.y * p.y;
    if residual > 1e-8 * scale {
        return Err(Error::NotEquilibrium { phi: p.phi, y: p.y, residual });
    }
    Ok(jacobian_invariants(wp, p))
}

fn jacobian_invariants(wp: &WaveParams, p: PhasePoint) -> (f64, f64) {
    let th = wp.theta_value();
    let j = 2.0 * th * (th - 0.5) * p.y * p.y - wp.line_factor(p.phi) * eval_f_prime(wp, p.phi);
    (j, (3.0 * th - 1.0) * p.y)
}

/// Equilibrium type from determinant and trace.
pub fn classify(j: f64, trace: f64, multiplicity: u32, tol: f64) -> EquilibriumKind {
    if j < -tol {
        EquilibriumKind::Saddle
    } else if j > tol {
        if trace * trace - 4.0 * j < 0.0 {
            EquilibriumKind::Center
        } else {
            EquilibriumKind::Node
        }
    } else if multiplicity == 2 {
        EquilibriumKind::Cusp
    } else {
        EquilibriumKind::Degenerate
    }
}

pub fn census(wp: &WaveParams, tol: f64) -> EquilibriumCensus {
    let mut flags = Vec::new();
    let mut notes = Vec::new();
    let (c2, c3, k) = (wp.c2, wp.c3, wp.big_k);
    let disc = 4.0 * c2 * c2 - 6.0 * c3;
    let disc_scale = 4.0 * c2 * c2 + 6.0 * c3.abs();
    let g_roots = find_g_roots(wp, tol);
    let crit = critical_points(wp);
    let g_crit = crit.map(|(lo, hi)| (eval_g(wp, lo), eval_g(wp, hi)));
    let k_zero = k.abs() <= tol * (1.0 + c2.abs() + c3.abs());

    let label = if c3 == 0.0 {
        CaseLabel::Reduced
    } else if k_zero {
        let d = c2 * c2 - 2.0 * c3;
        if d.abs() <= tol * (c2 * c2 + 2.0 * c3.abs()) {
            CaseLabel::ThreeIi
        } else if d > 0.0 {
            CaseLabel::ThreeI
        } else {
            CaseLabel::ThreeIii
        }
    } else if disc.abs() <= tol * disc_scale {
        flags.push("discriminant of g' within tolerance of zero".to_string());
        CaseLabel::Boundary
    } else if disc < 0.0 {
        CaseLabel::Two
    } else {
        let (lo, hi) = crit.expect("Δ > 0 with C3 ≠ 0");
        let (glo, ghi) = g_crit.unwrap();
        let g = wp.g_coeffs();
        let zero_lo = glo.abs() <= tol * poly::magnitude(&g, lo);
        let zero_hi = ghi.abs() <= tol * poly::magnitude(&g, hi);
        if zero_hi {
            flags.push("g(φ̃+) within tolerance of zero".to_string());
            CaseLabel::OneIi
        } else if zero_lo {
            flags.push("g(φ̃−) within tolerance of zero".to_string());
            CaseLabel::OneIv
        } else if ghi < 0.0 {
            CaseLabel::OneI
        } else if glo > 0.0 {
            CaseLabel::OneV
        } else {
            CaseLabel::OneIii
        }
    };
    if label == CaseLabel::OneIv {
        notes.push(
            "root structure gives a double and a simple zero of g, hence three axis equilibria; \
             the printed list for this case names only E0 and one further axis point"
                .to_string(),
        );
    }

    // Axis equilibria: zeros of f = φ g.
    let mut axis: Vec<(f64, u32)> = Vec::new();
    let mut zero_mult = 1;
    for r in &g_roots {
        if r.value.abs() <= tol.sqrt() * 1e-2 || (k_zero && r.value.abs() <= 1e-9) {
            zero_mult += r.multiplicity;
        } else {
            axis.push((r.value, r.multiplicity));
        }
    }
    if k_zero && !g_roots.iter().any(|r| r.value.abs() <= 1e-9) {
        zero_mult += 1;
    }
    axis.push((0.0, zero_mult));
    axis.sort_by(|a, b| a.0.total_cmp(&b.0));

    let s = wp.singular_abscissa();
    let fs = eval_f(wp, s);
    let fs_scale = poly::magnitude(&wp.f_coeffs(), s);
    // At θ = ½ with f(s) = 0 the factor (φ − s) divides out of the flow; the
    // line then carries no equilibrium structure of its own.
    let reduced = wp.theta.reciprocal() == 2 && fs.abs() <= tol * fs_scale;
    let jtol = |p: PhasePoint| {
        tol * (1.0
            + wp.line_factor(p.phi).abs() * poly::magnitude(&poly::derivative(&wp.f_coeffs()), p.phi)
            + p.y * p.y)
    };
    let mut equilibria = Vec::new();
    for (phi, mult) in axis {
        let phi = if phi == 0.0 { 0.0 } else { poly::newton_polish(&wp.f_coeffs(), phi, 1) };
        if !reduced && (phi - s).abs() <= tol.sqrt() * (1.0 + s.abs()) {
            flags.push(format!("singular line passes through the axis equilibrium at {phi}"));
        }
        let p = PhasePoint::new(phi, 0.0);
        let (j, tr) = jacobian_invariants(wp, p);
        let kind = classify(j, tr, mult, jtol(p));
        equilibria.push(Equilibrium {
            location: p,
            kind,
            on_singular_line: false,
            multiplicity: mult,
            determinant: j,
            trace: tr,
        });
    }

    let th = wp.theta_value();
    if wp.theta.reciprocal() == 2 {
        if reduced {
            notes.push(
                "f vanishes on the singular line: the line is stationary and divides out of the flow".to_string(),
            );
        }
    } else if fs.abs() <= tol * fs_scale {
        flags.push("f(s) within tolerance of zero: singular-line pair merges with the axis".to_string());
    } else {
        let y2 = fs / (0.5 - th);
        if y2 > 0.0 {
            let y = y2.sqrt();
            for yy in [y, -y] {
                let p = PhasePoint::new(s, yy);
                let (j, tr) = jacobian_invariants(wp, p);
                let kind = classify(j, tr, 1, jtol(p));
                equilibria.push(Equilibrium {
                    location: p,
                    kind,
                    on_singular_line: true,
                    multiplicity: 1,
                    determinant: j,
                    trace: tr,
                });
            }
        }
    }

    EquilibriumCensus {
        equilibria,
        case_label: label,
        discriminant: disc,
        critical_points: crit,
        g_at_critical_points: g_crit,
        boundary_flags: flags,
        notes,
    }
}
