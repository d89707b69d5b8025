//! Physical constants derived from the Coriolis frequency and the
//! traveling-wave frame coefficients.
//!
//! The wave-frame reduction turns the PDE into the planar system
//!
//! ```text
//! φ' = y,    y' = ((θ − ½) y² + f(φ)) / (θφ − C1),
//! f(φ) = C3 φ⁴ + C2 φ³ + ½ φ² + K φ
//! ```
//!
//! where `C1 = c − β₀/β`, `C2 = ω₁/(3α²)`, `C3 = ω₂/(4α³)` and `K = k − c`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonlocal parameter θ, stored exactly.
///
/// Only θ = 1/n (n ≥ 1) is admissible: those are exactly the values for which
/// the integrating-factor exponent `m = (1 − 3θ)/θ = n − 3` is an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Theta(Ratio<i64>);

impl Theta {
    pub const QUARTER: Theta = Theta(Ratio::new_raw(1, 4));
    pub const THIRD: Theta = Theta(Ratio::new_raw(1, 3));
    pub const HALF: Theta = Theta(Ratio::new_raw(1, 2));
    pub const ONE: Theta = Theta(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::UnsupportedTheta(format!("{numer}/{denom}")));
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<Self> {
        if *r.numer() != 1 || *r.denom() < 1 {
            return Err(Error::UnsupportedTheta(r.to_string()));
        }
        Ok(Theta(r))
    }

    /// The integer n with θ = 1/n.
    pub fn reciprocal(self) -> i64 {
        *self.0.denom()
    }

    /// Integrating-factor exponent m = (1 − 3θ)/θ.
    pub fn m(self) -> i64 {
        self.reciprocal() - 3
    }

    pub fn as_ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn value(self) -> f64 {
        1.0 / self.reciprocal() as f64
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.reciprocal() == 1 {
            write!(f, "1")
        } else {
            write!(f, "1/{}", self.reciprocal())
        }
    }
}

impl FromStr for Theta {
    type Err = Error;

    /// Accepts `p/q`, integers and finite decimal literals (`0.25`), all parsed
    /// exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnsupportedTheta(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Theta::new(p, q).map_err(|_| bad());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            return Theta::new(int * scale + frac, scale).map_err(|_| bad());
        }
        let p: i64 = s.parse().map_err(|_| bad())?;
        Theta::new(p, 1).map_err(|_| bad())
    }
}

impl Serialize for Theta {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Constants induced by the Coriolis frequency Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoriolisParams {
    pub omega: f64,
    pub k: f64,
    pub alpha: f64,
    pub beta0: f64,
    pub beta: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl CoriolisParams {
    /// Inverse of `k(Ω)`: Ω = (1 − k²)/(2k).
    pub fn omega_from_k(k: f64) -> f64 {
        (1.0 - k * k) / (2.0 * k)
    }

    /// Ratio β₀/β entering C1.
    pub fn dispersion_ratio(&self) -> Result<f64> {
        if self.beta.abs() <= 1e-12 * (1.0 + self.beta0.abs()) {
            return Err(Error::DegenerateBeta { omega: self.omega, beta: self.beta });
        }
        Ok(self.beta0 / self.beta)
    }
}

pub fn derive_coriolis(omega: f64) -> Result<CoriolisParams> {
    if !omega.is_finite() || omega < 0.0 {
        return Err(Error::InvalidOmega(omega));
    }
    // √(1+Ω²) − Ω without cancellation for large Ω.
    let k = 1.0 / ((1.0 + omega * omega).sqrt() + omega);
    let k2 = k * k;
    let k4 = k2 * k2;
    let one_k2 = 1.0 + k2;
    let alpha = k / one_k2;
    let beta0 = k * (k4 + 6.0 * k2 - 1.0) / (6.0 * one_k2);
    let beta = (3.0 * k4 + 8.0 * k2 - 1.0) / (6.0 * one_k2);
    let omega1 = -3.0 * k * (k2 - 1.0) * (k2 - 2.0) / (2.0 * one_k2.powi(3));
    let omega2 = (k2 - 2.0) * (k2 - 1.0).powi(2) * (8.0 * k2 - 1.0) / (2.0 * one_k2.powi(5));
    Ok(CoriolisParams { omega, k, alpha, beta0, beta, omega1, omega2 })
}

/// Coefficients of the traveling-wave planar system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub theta: Theta,
    /// Wave speed; `None` when the coefficients were supplied directly.
    pub c: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Linear coefficient K = k − c of f.
    pub big_k: f64,
}

impl WaveParams {
    /// Direct-coefficient mode, decoupled from (Ω, c).
    pub fn direct(theta: Theta, c1: f64, c2: f64, c3: f64, big_k: f64) -> Result<Self> {
        for (name, v) in [("C1", c1), ("C2", c2), ("C3", c3), ("K", big_k)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        Ok(WaveParams { theta, c: None, c1, c2, c3, big_k })
    }

    pub fn m(&self) -> i64 {
        self.theta.m()
    }

    pub fn theta_value(&self) -> f64 {
        self.theta.value()
    }

    /// Abscissa C1/θ of the singular line.
    pub fn singular_abscissa(&self) -> f64 {
        self.c1 * self.theta.reciprocal() as f64
    }

    /// `θφ − C1`, the time-rescaling factor dξ/dτ.
    pub fn line_factor(&self, phi: f64) -> f64 {
        self.theta_value() * phi - self.c1
    }

    /// Ascending coefficients of f(φ) = C3φ⁴ + C2φ³ + ½φ² + Kφ.
    pub fn f_coeffs(&self) -> [f64; 5] {
        [0.0, self.big_k, 0.5, self.c2, self.c3]
    }

    /// Ascending coefficients of g(φ) = f(φ)/φ.
    pub fn g_coeffs(&self) -> [f64; 4] {
        [self.big_k, 0.5, self.c2, self.c3]
    }

    pub fn with_c1(&self, c1: f64) -> Self {
        WaveParams { c1, c: None, ..*self }
    }
}

pub fn derive_wave_params(cp: &CoriolisParams, c: f64, theta: Theta) -> Result<WaveParams> {
    if !c.is_finite() {
        return Err(Error::InvalidParameter(format!("wave speed {c} is not finite")));
    }
    let ratio = cp.dispersion_ratio()?;
    Ok(WaveParams {
        theta,
        c: Some(c),
        c1: c - ratio,
        c2: cp.omega1 / (3.0 * cp.alpha * cp.alpha),
        c3: cp.omega2 / (4.0 * cp.alpha.powi(3)),
        big_k: cp.k - c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Exact constants at a rational k.
    fn exact_constants(k: &BigRational) -> [BigRational; 5] {
        let one = q(1, 1);
        let k2 = k * k;
        let k4 = &k2 * &k2;
        let one_k2 = &one + &k2;
        let alpha = k / &one_k2;
        let beta0 = k * (&k4 + q(6, 1) * &k2 - &one) / (q(6, 1) * &one_k2);
        let beta = (q(3, 1) * &k4 + q(8, 1) * &k2 - &one) / (q(6, 1) * &one_k2);
        let p3 = &one_k2 * &one_k2 * &one_k2;
        let omega1 = q(-3, 1) * k * (&k2 - &one) * (&k2 - q(2, 1)) / (q(2, 1) * &p3);
        let p5 = &p3 * &one_k2 * &one_k2;
        let omega2 = (&k2 - q(2, 1)) * (&k2 - &one) * (&k2 - &one) * (q(8, 1) * &k2 - &one) / (q(2, 1) * p5);
        [alpha, beta0, beta, omega1, omega2]
    }

    fn to_f64(r: &BigRational) -> f64 {
        use num_traits::ToPrimitive;
        r.to_f64().unwrap()
    }

    #[test]
    fn omega_zero_matches_exact_rationals() {
        let cp = derive_coriolis(0.0).unwrap();
        assert_eq!(cp.k, 1.0);
        let [alpha, beta0, beta, omega1, omega2] = exact_constants(&q(1, 1));
        assert_eq!(alpha, q(1, 2));
        assert_eq!(beta0, q(1, 2));
        assert_eq!(beta, q(5, 6));
        assert_eq!(omega1, q(0, 1));
        assert_eq!(omega2, q(0, 1));
        assert_eq!(cp.alpha, to_f64(&alpha));
        assert!((cp.beta0 - 0.5).abs() < 1e-15);
        assert!((cp.beta - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(cp.omega1, 0.0);
        assert_eq!(cp.omega2, 0.0);
        assert!((cp.dispersion_ratio().unwrap() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn rational_k_matches_exact_oracle() {
        // Ω = 3/4 gives k = 1/2 exactly.
        let cp = derive_coriolis(0.75).unwrap();
        assert_eq!(cp.k, 0.5);
        let exact = exact_constants(&q(1, 2));
        let got = [cp.alpha, cp.beta0, cp.beta, cp.omega1, cp.omega2];
        for (g, e) in got.iter().zip(exact.iter()) {
            let e = to_f64(e);
            assert!((g - e).abs() <= 1e-15 * e.abs().max(1.0), "{g} vs {e}");
        }
    }

    #[test]
    fn omega_one_gives_sqrt2_minus_one() {
        let cp = derive_coriolis(1.0).unwrap();
        let expected = std::f64::consts::SQRT_2 - 1.0;
        assert!(((cp.k - expected) / expected).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_omega() {
        assert!(matches!(derive_coriolis(-1.0), Err(Error::InvalidOmega(_))));
        assert!(matches!(derive_coriolis(f64::NAN), Err(Error::InvalidOmega(_))));
        assert!(matches!(derive_coriolis(f64::INFINITY), Err(Error::InvalidOmega(_))));
    }

    #[test]
    fn beta_zero_is_guarded() {
        let k2 = (76f64.sqrt() - 8.0) / 6.0;
        let omega = CoriolisParams::omega_from_k(k2.sqrt());
        let cp = derive_coriolis(omega).unwrap();
        assert!(cp.beta.abs() < 1e-14);
        assert!(matches!(derive_wave_params(&cp, 1.0, Theta::QUARTER), Err(Error::DegenerateBeta { .. })));
    }

    #[test]
    fn wave_params_at_rest_frame() {
        let cp = derive_coriolis(0.0).unwrap();
        let wp = derive_wave_params(&cp, 2.0, Theta::QUARTER).unwrap();
        assert_eq!(wp.big_k, -1.0);
        assert_eq!(wp.c2, 0.0);
        assert_eq!(wp.c3, 0.0);
        assert!((wp.c1 - (2.0 - 0.6)).abs() < 1e-14);
        assert_eq!(wp.singular_abscissa(), 4.0 * wp.c1);
    }

    #[test]
    fn theta_exponents() {
        assert_eq!(Theta::QUARTER.m(), 1);
        assert_eq!(Theta::HALF.m(), -1);
        assert_eq!(Theta::ONE.m(), -2);
        assert_eq!(Theta::THIRD.m(), 0);
    }

    #[test]
    fn theta_parsing_is_exact() {
        assert_eq!("1/4".parse::<Theta>().unwrap(), Theta::QUARTER);
        assert_eq!("0.25".parse::<Theta>().unwrap(), Theta::QUARTER);
        assert_eq!("2/4".parse::<Theta>().unwrap(), Theta::HALF);
        assert_eq!("1".parse::<Theta>().unwrap(), Theta::ONE);
        assert!("0".parse::<Theta>().is_err());
        assert!("2/3".parse::<Theta>().is_err());
        assert!("0.3".parse::<Theta>().is_err());
        assert!("-1/2".parse::<Theta>().is_err());
        assert!("abc".parse::<Theta>().is_err());
    }

    proptest! {
        #[test]
        fn k_in_unit_interval_and_decreasing(a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let ka = derive_coriolis(a).unwrap().k;
            let kb = derive_coriolis(b).unwrap().k;
            prop_assert!(ka > 0.0 && ka <= 1.0);
            if a < b {
                prop_assert!(ka > kb);
            }
        }

        #[test]
        fn omega_round_trip(omega in 0.0f64..10.0) {
            let k = derive_coriolis(omega).unwrap().k;
            let back = CoriolisParams::omega_from_k(k);
            prop_assert!((back - omega).abs() <= 1e-12 * omega.max(1e-3));
        }

        #[test]
        fn rest_frame_has_no_nonlinear_coefficients(c in -10.0f64..10.0, n in 1i64..6) {
            let theta = Theta::new(1, n).unwrap();
            let wp = derive_wave_params(&derive_coriolis(0.0).unwrap(), c, theta).unwrap();
            prop_assert_eq!(wp.c2, 0.0);
            prop_assert_eq!(wp.c3, 0.0);
        }
    }
}
