//! Complete elliptic integral K(m) and the Jacobi functions sn, cn, dn.
//!
//! Everything is in terms of the parameter m = k², k the modulus.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elliptic parameter m ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m_param: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m_param) {
            return Err(Error::ModulusOutOfRange(m_param));
        }
        Ok(EllipticModulus(m_param))
    }

    /// Parameter from a modulus k, m = k².
    pub fn from_modulus(k: f64) -> Result<Self> {
        Self::new(k * k)
    }

    pub fn m_param(self) -> f64 {
        self.0
    }

    pub fn modulus(self) -> f64 {
        self.0.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

const MAX_LANDEN: usize = 32;

/// Quarter period K(m) = π / (2 AGM(1, √(1 − m))).
pub fn complete_k(mu: EllipticModulus) -> Result<f64> {
    let m = mu.m_param();
    if m >= 1.0 {
        return Err(Error::Divergent);
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..MAX_LANDEN {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(FRAC_PI_2 / a)
}

/// sn, cn, dn by the descending Landen (AGM) scheme.
pub fn jacobi(u: f64, mu: EllipticModulus) -> JacobiTriple {
    let m = mu.m_param();
    if m == 0.0 {
        return JacobiTriple { sn: u.sin(), cn: u.cos(), dn: 1.0 };
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return JacobiTriple { sn: u.tanh(), cn: sech, dn: sech };
    }
    // Reduce to one real period 4K; keeps the phase 2ⁿ aₙ u moderate.
    let period = 4.0 * complete_k(mu).expect("m < 1");
    let u = u - period * (u / period).round();

    let mut a = [0.0f64; MAX_LANDEN + 1];
    let mut c = [0.0f64; MAX_LANDEN + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < MAX_LANDEN && c[n].abs() > f64::EPSILON * a[n] {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // cn / cos(φ_{n-1} − φ_n) loses digits near cn = 0; pick the cancellation-free form.
    let dn2 = if sn * sn > 0.5 { (1.0 - m) + m * cn * cn } else { 1.0 - m * sn * sn };
    let dn = dn2.sqrt();
    JacobiTriple { sn, cn, dn }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[allow(clippy::too_many_arguments)]
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    }

    fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        let m = 0.5 * (a + b);
        simpson(&f, a, b, f(a), f(m), f(b), tol, 40)
    }

    fn incomplete_f(phi: f64, m: f64) -> f64 {
        quad(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-15)
    }

    #[test]
    fn quarter_period_values() {
        assert_eq!(complete_k(EllipticModulus::new(0.0).unwrap()).unwrap(), PI / 2.0);
        assert!(matches!(complete_k(EllipticModulus::new(1.0).unwrap()), Err(Error::Divergent)));
        assert!(EllipticModulus::new(1.5).is_err());
        assert!(EllipticModulus::new(-0.1).is_err());
        let m = 0.5;
        let k = complete_k(EllipticModulus::new(m).unwrap()).unwrap();
        let oracle = incomplete_f(PI / 2.0, m);
        assert!((k - oracle).abs() < 1e-12, "{k} vs {oracle}");
    }

    #[test]
    fn degenerate_parameters() {
        for &u in &[-2.3, 0.0, 0.4, 5.0] {
            let t = jacobi(u, EllipticModulus::new(0.0).unwrap());
            assert_eq!((t.sn, t.cn, t.dn), (u.sin(), u.cos(), 1.0));
            let t = jacobi(u, EllipticModulus::new(1.0).unwrap());
            assert!((t.sn - u.tanh()).abs() < 1e-15);
            assert!((t.cn - 1.0 / u.cosh()).abs() < 1e-15);
        }
        let t = jacobi(0.0, EllipticModulus::new(0.7).unwrap());
        assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
    }

    #[test]
    fn matches_inverted_incomplete_integral() {
        let (m, u) = (0.7, 1.3);
        // Newton on F(φ) = u, F' = 1/√(1 − m sin²φ).
        let mut phi = u;
        for _ in 0..30 {
            let step = (incomplete_f(phi, m) - u) * (1.0 - m * phi.sin().powi(2)).sqrt();
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let t = jacobi(u, EllipticModulus::new(m).unwrap());
        assert!((t.sn - phi.sin()).abs() < 1e-10);
        assert!((t.cn - phi.cos()).abs() < 1e-10);
        assert!((t.dn - (1.0 - m * phi.sin().powi(2)).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn identities_periodicity_and_parity() {
        for i in 0..20 {
            let m = i as f64 / 20.0 + 0.0123;
            let mu = EllipticModulus::new(m).unwrap();
            let k = complete_k(mu).unwrap();
            for j in 0..100 {
                let u = -25.0 + j as f64 * 0.51;
                let t = jacobi(u, mu);
                assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() <= 1e-12);
                assert!((t.dn * t.dn + m * t.sn * t.sn - 1.0).abs() <= 1e-12);
                let p = jacobi(u + 4.0 * k, mu);
                assert!((p.sn - t.sn).abs() <= 1e-10 && (p.cn - t.cn).abs() <= 1e-10);
                let d = jacobi(u + 2.0 * k, mu);
                assert!((d.dn - t.dn).abs() <= 1e-10);
                let r = jacobi(-u, mu);
                assert!((r.sn + t.sn).abs() <= 1e-12);
                assert!((r.cn - t.cn).abs() <= 1e-12 && (r.dn - t.dn).abs() <= 1e-12);
            }
        }
    }
}
