//! Explicit elliptic and hyperbolic waves on polynomial level sets.
//!
//! When the first integral reads H = −¼y² + p(φ) (θ = ½ with no log term),
//! a level set is y² = P(φ) = 4(p(φ) − h), a quartic with leading
//! coefficient C3. Its real-root pattern decides the wave:
//!
//! * four simple roots p1 > p2 > p3 > p4: sn-type waves on [p2, p1] and [p4, p3];
//! * two simple roots and a complex pair: a cn-type wave on [p2, p1];
//! * p1 > p2 > p3 with p2 double: cosh-type solitary waves homoclinic to p2.
//!
//! Profiles are written with the elliptic parameter m (= modulus²).

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, jacobi, EllipticModulus};
use crate::error::{Error, Result};
use crate::field::{eval_f, FirstIntegral};
use crate::params::{Theta, WaveParams};
use crate::poly::{self, RealRoot};

/// y² = P(φ) on the level set H = h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPolynomial {
    pub coefficients: Vec<f64>,
    pub level_h: f64,
    pub theta: Theta,
}

impl OrbitPolynomial {
    pub fn eval(&self, phi: f64) -> f64 {
        poly::eval(&self.coefficients, &phi)
    }

    pub fn leading(&self) -> f64 {
        *self.coefficients.last().unwrap()
    }
}

/// Level set of a first integral as a polynomial relation y² = P(φ).
pub fn orbit_polynomial(fi: &FirstIntegral, h: f64) -> Result<OrbitPolynomial> {
    if fi.y_squared_exponent != 0 {
        return Err(Error::UnsupportedForClosedForm(format!(
            "y² is weighted by (φ − s)^{} for θ = {}",
            fi.y_squared_exponent, fi.theta
        )));
    }
    if fi.log_coefficient != 0.0 || !fi.pole_terms.is_empty() {
        return Err(Error::UnsupportedForClosedForm("the first integral has a logarithmic or pole term".to_string()));
    }
    // H = c y² + p(φ) = h  ⇒  y² = (h − p(φ))/c.
    let inv = 1.0 / fi.y_squared_coefficient;
    let mut coefficients: Vec<f64> = fi.polynomial_part.iter().map(|a| -a * inv).collect();
    coefficients[0] += h * inv;
    Ok(OrbitPolynomial { coefficients: poly::trim(coefficients), level_h: h, theta: fi.theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootPattern {
    FourSimple,
    TwoSimpleComplexPair,
    /// Three distinct real roots, the middle one double.
    DoubleMiddle,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticFactorization {
    pub leading_coefficient: f64,
    /// Distinct real roots, descending.
    pub real_roots: Vec<f64>,
    pub root_multiplicities: Vec<u32>,
    /// (b1, a1) with the pair b1 ± i a1, a1 > 0.
    pub complex_pair: Option<(f64, f64)>,
}

impl QuarticFactorization {
    /// Build from known roots (for constructed test cases).
    pub fn from_roots(leading: f64, roots: &[RealRoot], complex_pair: Option<(f64, f64)>) -> Self {
        let mut r: Vec<RealRoot> = roots.to_vec();
        r.sort_by(|a, b| b.value.total_cmp(&a.value));
        QuarticFactorization {
            leading_coefficient: leading,
            real_roots: r.iter().map(|x| x.value).collect(),
            root_multiplicities: r.iter().map(|x| x.multiplicity).collect(),
            complex_pair,
        }
    }

    pub fn pattern(&self) -> RootPattern {
        let mult = &self.root_multiplicities;
        match (mult.as_slice(), self.complex_pair) {
            ([1, 1, 1, 1], None) => RootPattern::FourSimple,
            ([1, 1], Some(_)) => RootPattern::TwoSimpleComplexPair,
            ([1, 2, 1], None) => RootPattern::DoubleMiddle,
            _ => RootPattern::Other,
        }
    }

    /// Expanded coefficients, ascending.
    pub fn expand(&self) -> Vec<f64> {
        let mut p = vec![self.leading_coefficient];
        for (r, m) in self.real_roots.iter().zip(&self.root_multiplicities) {
            for _ in 0..*m {
                p = poly::mul(&p, &[-r, 1.0]);
            }
        }
        if let Some((b1, a1)) = self.complex_pair {
            p = poly::mul(&p, &[b1 * b1 + a1 * a1, -2.0 * b1, 1.0]);
        }
        p
    }

    fn describe(&self) -> String {
        let roots: Vec<String> = self
            .real_roots
            .iter()
            .zip(&self.root_multiplicities)
            .map(|(r, m)| if *m == 1 { format!("{r}") } else { format!("{r}^{m}") })
            .collect();
        let pair = if self.complex_pair.is_some() { " + complex pair" } else { "" };
        format!("[{}]{}", roots.join(", "), pair)
    }
}

/// Real roots with multiplicity plus the leftover complex pair of a quartic.
pub fn factor_quartic(p: &OrbitPolynomial, tol: f64) -> Result<QuarticFactorization> {
    let c = poly::trim(p.coefficients.clone());
    let deg = c.len() - 1;
    if deg < 2 {
        return Err(Error::WrongRootPattern { expected: "degree ≥ 2".into(), found: format!("degree {deg}") });
    }
    let lead = c[deg];
    let roots = poly::real_roots(&c, tol);
    let counted: u32 = roots.iter().map(|r| r.multiplicity).sum();
    let complex_pair = match deg as u32 - counted {
        0 => None,
        2 => {
            // Remaining quadratic factor by deflation: P = (real part) · (x² + βx + γ).
            let q = deflate(&c, &roots);
            let (gamma, beta) = (q[0] / q[2], q[1] / q[2]);
            let b1 = -beta / 2.0;
            let a1sq = gamma - b1 * b1;
            if a1sq <= 0.0 {
                return Err(Error::IllConditioned { near: b1, separation: a1sq.abs().sqrt() });
            }
            Some((b1, a1sq.sqrt()))
        }
        _ => {
            return Err(Error::IllConditioned { near: roots.first().map(|r| r.value).unwrap_or(0.0), separation: 0.0 })
        }
    };
    let fact = QuarticFactorization::from_roots(lead, &roots, complex_pair);
    for w in fact.real_roots.windows(2) {
        let sep = w[0] - w[1];
        if sep <= tol.sqrt() * (1.0 + w[0].abs()) * 1e-2 {
            return Err(Error::IllConditioned { near: w[0], separation: sep });
        }
    }
    let back = fact.expand();
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (a, b) in back.iter().zip(&c) {
        if (a - b).abs() > 1e-9 * scale {
            return Err(Error::IllConditioned { near: 0.0, separation: (a - b).abs() });
        }
    }
    Ok(fact)
}

/// Divide out the real roots.
fn deflate(c: &[f64], roots: &[RealRoot]) -> Vec<f64> {
    let mut q = c.to_vec();
    for r in roots {
        for _ in 0..r.multiplicity {
            q = poly::divide_by_linear_power(&q, &r.value, 1).0;
        }
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveVariant {
    CnPeriodic,
    SnPeriodicRight,
    SnPeriodicLeft,
    SolitaryRight,
    SolitaryLeft,
    NumericOrbit,
}

/// Constants of a constructed wave. Unused entries are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveParameters {
    /// Real roots, descending.
    pub roots: Vec<f64>,
    pub leading_coefficient: f64,
    pub omega: f64,
    /// Frequency from the printed constant block, reported for comparison.
    pub printed_omega: Option<f64>,
    pub m_param: Option<f64>,
    pub a1: Option<f64>,
    pub b1: Option<f64>,
    pub big_a1: Option<f64>,
    pub big_b1: Option<f64>,
    /// Solitary constants a = (p1 − p2)(p2 − p3), b = p1 − 2p2 + p3.
    pub sol_a: Option<f64>,
    pub sol_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveSolution {
    pub variant: WaveVariant,
    pub parameters: WaveParameters,
    /// Period in ξ for periodic waves.
    pub period: Option<f64>,
    /// Closed interval the profile lives in.
    pub range: (f64, f64),
    /// Max |ODE residual| over the last grid it was checked on.
    pub residual_report: Option<f64>,
    /// Samples (ξ, φ) for numeric orbits.
    pub samples: Vec<(f64, f64)>,
    pub notes: Vec<String>,
}

impl WaveSolution {
    /// Profile φ(ξ).
    pub fn eval(&self, xi: f64) -> f64 {
        let p = &self.parameters;
        let r = &p.roots;
        match self.variant {
            WaveVariant::SnPeriodicRight => sn_right(r[0], r[1], r[2], p.m_param.unwrap(), p.omega, xi),
            WaveVariant::SnPeriodicLeft => {
                let mu = EllipticModulus::new(p.m_param.unwrap()).unwrap();
                let s2 = jacobi(p.omega * xi, mu).sn.powi(2);
                let (p1, p3, p4) = (r[0], r[2], r[3]);
                (p4 * (p1 - p3) + p1 * (p3 - p4) * s2) / ((p1 - p3) + (p3 - p4) * s2)
            }
            WaveVariant::CnPeriodic => {
                let mu = EllipticModulus::new(p.m_param.unwrap()).unwrap();
                let cn = jacobi(p.omega * xi, mu).cn;
                let (a, b) = (p.big_a1.unwrap(), p.big_b1.unwrap());
                let (p1, p2) = (r[0], r[1]);
                ((p2 * a - p1 * b) * cn + (p1 * b + p2 * a)) / ((a - b) * cn + (a + b))
            }
            WaveVariant::SolitaryRight | WaveVariant::SolitaryLeft => {
                let (p1, p2, p3) = (r[0], r[1], r[2]);
                let (a, b) = (p.sol_a.unwrap(), p.sol_b.unwrap());
                let ch = (p.omega * xi).cosh();
                let d = if self.variant == WaveVariant::SolitaryRight { p1 - p3 } else { p3 - p1 };
                p2 + 2.0 * a / (d * ch - b)
            }
            WaveVariant::NumericOrbit => interpolate(&self.samples, xi),
        }
    }

    /// Compute and store the residual over a grid.
    pub fn attach_residual(&mut self, wp: &WaveParams, xi_grid: &[f64]) -> f64 {
        let r = ode_residual(wp, self, xi_grid);
        self.residual_report = Some(r);
        r
    }

    /// Numerically sampled profile.
    pub fn numeric(samples: Vec<(f64, f64)>, period: Option<f64>) -> Self {
        let lo = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let hi = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        WaveSolution {
            variant: WaveVariant::NumericOrbit,
            parameters: WaveParameters {
                roots: vec![],
                leading_coefficient: 0.0,
                omega: 0.0,
                printed_omega: None,
                m_param: None,
                a1: None,
                b1: None,
                big_a1: None,
                big_b1: None,
                sol_a: None,
                sol_b: None,
            },
            period,
            range: (lo, hi),
            residual_report: None,
            samples,
            notes: vec![],
        }
    }
}

fn interpolate(samples: &[(f64, f64)], xi: f64) -> f64 {
    match samples.binary_search_by(|s| s.0.total_cmp(&xi)) {
        Ok(i) => samples[i].1,
        Err(0) => samples.first().map(|s| s.1).unwrap_or(f64::NAN),
        Err(i) if i >= samples.len() => samples.last().unwrap().1,
        Err(i) => {
            let (a, b) = (samples[i - 1], samples[i]);
            a.1 + (b.1 - a.1) * (xi - a.0) / (b.0 - a.0)
        }
    }
}

/// The printed "k" of the elliptic profiles is the parameter m = modulus².
pub fn parameter_from_printed_k(k_expr: f64) -> Result<EllipticModulus> {
    EllipticModulus::new(k_expr)
}

fn sn_right(p1: f64, p2: f64, p3: f64, m: f64, omega: f64, xi: f64) -> f64 {
    let mu = EllipticModulus::new(m.clamp(0.0, 1.0)).unwrap();
    let s2 = jacobi(omega * xi, mu).sn.powi(2);
    (p2 * (p1 - p3) - p3 * (p1 - p2) * s2) / ((p1 - p3) - (p1 - p2) * s2)
}

fn wrong(expected: &str, fact: &QuarticFactorization) -> Error {
    Error::WrongRootPattern { expected: expected.to_string(), found: fact.describe() }
}

pub fn construct_sn_periodic(fact: &QuarticFactorization, branch: Branch) -> Result<WaveSolution> {
    if fact.pattern() != RootPattern::FourSimple || fact.leading_coefficient >= 0.0 {
        return Err(wrong("four simple real roots, negative leading coefficient", fact));
    }
    let r = &fact.real_roots;
    let (p1, p2, p3, p4) = (r[0], r[1], r[2], r[3]);
    let a = fact.leading_coefficient.abs();
    let m = (p1 - p2) * (p3 - p4) / ((p1 - p3) * (p2 - p4));
    let mu = parameter_from_printed_k(m)?;
    let omega = (a * (p1 - p3) * (p2 - p4)).sqrt() / 2.0;
    let printed_omega = 2.0 / ((p1 - p3) * (p2 - p4)).sqrt() * (a / 2.0).sqrt();
    let period = 2.0 * complete_k(mu)? / omega;
    let (variant, range) = match branch {
        Branch::Right => (WaveVariant::SnPeriodicRight, (p2, p1)),
        Branch::Left => (WaveVariant::SnPeriodicLeft, (p4, p3)),
    };
    let mut notes =
        vec![format!("frequency √(|a|(p1 − p3)(p2 − p4))/2 = {omega}; printed constant block gives {printed_omega}")];
    if branch == Branch::Left {
        notes.push("left profile uses corrected signs so that it oscillates on [p4, p3]".to_string());
    }
    Ok(WaveSolution {
        variant,
        parameters: WaveParameters {
            roots: r.clone(),
            leading_coefficient: fact.leading_coefficient,
            omega,
            printed_omega: Some(printed_omega),
            m_param: Some(m),
            a1: None,
            b1: None,
            big_a1: None,
            big_b1: None,
            sol_a: None,
            sol_b: None,
        },
        period: Some(period),
        range,
        residual_report: None,
        samples: vec![],
        notes,
    })
}

pub fn construct_cn_periodic(fact: &QuarticFactorization) -> Result<WaveSolution> {
    let Some((b1, a1)) = fact.complex_pair else {
        return Err(wrong("two simple real roots and a complex pair", fact));
    };
    if fact.pattern() != RootPattern::TwoSimpleComplexPair || fact.leading_coefficient >= 0.0 {
        return Err(wrong("two simple real roots and a complex pair, negative leading coefficient", fact));
    }
    let (p1, p2) = (fact.real_roots[0], fact.real_roots[1]);
    Ok(cn_wave(fact.leading_coefficient, p1, p2, b1, a1))
}

fn cn_wave(lead: f64, p1: f64, p2: f64, b1: f64, a1: f64) -> WaveSolution {
    let a = lead.abs();
    let big_a = ((p1 - b1).powi(2) + a1 * a1).sqrt();
    let big_b = ((p2 - b1).powi(2) + a1 * a1).sqrt();
    let m = (((p1 - p2).powi(2) - (big_a - big_b).powi(2)) / (4.0 * big_a * big_b)).clamp(0.0, 1.0);
    let omega = (a * big_a * big_b).sqrt();
    let printed_omega = (big_a * big_b * a / 2.0).sqrt();
    let period = EllipticModulus::new(m).ok().and_then(|mu| complete_k(mu).ok()).map(|k| 4.0 * k / omega);
    WaveSolution {
        variant: WaveVariant::CnPeriodic,
        parameters: WaveParameters {
            roots: vec![p1, p2],
            leading_coefficient: lead,
            omega,
            printed_omega: Some(printed_omega),
            m_param: Some(m),
            a1: Some(a1),
            b1: Some(b1),
            big_a1: Some(big_a),
            big_b1: Some(big_b),
            sol_a: None,
            sol_b: None,
        },
        period,
        range: (p2, p1),
        residual_report: None,
        samples: vec![],
        notes: vec![
            "profile rederived: the printed denominator (B1 − A1)cn − (B1 − A1) vanishes at cn = 1".to_string(),
            format!("frequency √(|a| A1 B1) = {omega}; printed constant block gives {printed_omega}"),
        ],
    }
}

/// The cn wave for an explicit pair b1 ± i a1, including the limit a1 → 0.
pub fn cn_wave_from_pair(lead: f64, p1: f64, p2: f64, b1: f64, a1: f64) -> WaveSolution {
    cn_wave(lead, p1, p2, b1, a1)
}

pub fn construct_solitary(fact: &QuarticFactorization, branch: Branch) -> Result<WaveSolution> {
    if fact.pattern() != RootPattern::DoubleMiddle || fact.leading_coefficient >= 0.0 {
        return Err(wrong("p1 > p2 > p3 with p2 double, negative leading coefficient", fact));
    }
    let r = &fact.real_roots;
    let (p1, p2, p3) = (r[0], r[1], r[2]);
    let a = (p1 - p2) * (p2 - p3);
    let b = p1 - 2.0 * p2 + p3;
    let lead = fact.leading_coefficient.abs();
    let omega = (a * lead).sqrt();
    let printed_omega = (a * lead / 2.0).sqrt();
    let (variant, range) = match branch {
        Branch::Right => (WaveVariant::SolitaryRight, (p2, p1)),
        Branch::Left => (WaveVariant::SolitaryLeft, (p3, p2)),
    };
    Ok(WaveSolution {
        variant,
        parameters: WaveParameters {
            roots: r.clone(),
            leading_coefficient: fact.leading_coefficient,
            omega,
            printed_omega: Some(printed_omega),
            m_param: None,
            a1: None,
            b1: None,
            big_a1: None,
            big_b1: None,
            sol_a: Some(a),
            sol_b: Some(b),
        },
        period: None,
        range,
        residual_report: None,
        samples: vec![],
        notes: vec![format!("frequency √(a|C3|) = {omega}; printed constant block gives {printed_omega}")],
    })
}

/// Max |(θφ − C1)φ'' − (θ − ½)φ'² − f(φ)| over the grid.
pub fn ode_residual(wp: &WaveParams, wave: &WaveSolution, xi_grid: &[f64]) -> f64 {
    let scale = if wave.parameters.omega > 0.0 { wave.parameters.omega } else { 1.0 };
    profile_residual(wp, &|xi| wave.eval(xi), scale, xi_grid)
}

/// Residual of an arbitrary profile; `omega` sets the difference step.
pub fn profile_residual(wp: &WaveParams, phi: &dyn Fn(f64) -> f64, omega: f64, xi_grid: &[f64]) -> f64 {
    let th = wp.theta_value();
    let h0 = 0.04 / omega;
    xi_grid
        .iter()
        .map(|&xi| {
            let (d1, d2) = derivatives(phi, xi, h0);
            let v = phi(xi);
            (wp.line_factor(v) * d2 - (th - 0.5) * d1 * d1 - eval_f(wp, v)).abs()
        })
        .fold(0.0, f64::max)
}

/// First and second derivatives by central differences with two Richardson
/// refinements (steps h, h/2, h/4).
fn derivatives(phi: &dyn Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let f0 = phi(x);
    let mut d1 = [0.0; 3];
    let mut d2 = [0.0; 3];
    for (i, s) in [h, h / 2.0, h / 4.0].into_iter().enumerate() {
        let (fp, fm) = (phi(x + s), phi(x - s));
        d1[i] = (fp - fm) / (2.0 * s);
        d2[i] = (fp - 2.0 * f0 + fm) / (s * s);
    }
    let rich = |d: [f64; 3]| {
        let a = (4.0 * d[1] - d[0]) / 3.0;
        let b = (4.0 * d[2] - d[1]) / 3.0;
        (16.0 * b - a) / 15.0
    };
    (rich(d1), rich(d2))
}
