//! Univariate polynomial helpers on ascending coefficient slices.
//!
//! The algebraic routines are generic over [`Scalar`] so the same code runs
//! in `f64` and in exact rationals. Root isolation is `f64` only.

use num_traits::{FromPrimitive, Num};
use std::ops::Neg;

/// Field-like scalar: `f64` or an exact rational type.
pub trait Scalar: Clone + PartialEq + Num + Neg<Output = Self> + FromPrimitive {
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits scalar")
    }
}

impl<T> Scalar for T where T: Clone + PartialEq + Num + Neg<Output = T> + FromPrimitive {}

/// Drop exact-zero leading coefficients.
pub fn trim<T: Scalar>(mut c: Vec<T>) -> Vec<T> {
    while c.len() > 1 && c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    c
}

pub fn eval<T: Scalar>(c: &[T], x: &T) -> T {
    c.iter().rev().fold(T::zero(), |acc, a| acc * x.clone() + a.clone())
}

pub fn derivative<T: Scalar>(c: &[T]) -> Vec<T> {
    if c.len() <= 1 {
        return vec![T::zero()];
    }
    c.iter().enumerate().skip(1).map(|(i, a)| a.clone() * T::int(i as i64)).collect()
}

/// Antiderivative with zero constant term.
pub fn antiderivative<T: Scalar>(c: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(T::zero());
    for (i, a) in c.iter().enumerate() {
        out.push(a.clone() / T::int(i as i64 + 1));
    }
    out
}

pub fn mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            x + y
        })
        .collect()
}

pub fn scale<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

/// `(x − s)^n` expanded in powers of x.
pub fn linear_power<T: Scalar>(s: &T, n: u32) -> Vec<T> {
    let lin = vec![-s.clone(), T::one()];
    (0..n).fold(vec![T::one()], |acc, _| mul(&acc, &lin))
}

/// Coefficients of p(u + s) in powers of u (Taylor shift).
pub fn taylor_shift<T: Scalar>(c: &[T], s: &T) -> Vec<T> {
    // Repeated synthetic division.
    let mut work = c.to_vec();
    let n = work.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = work[j + 1].clone() * s.clone();
            work[j] = work[j].clone() + t;
        }
    }
    work
}

/// Divide p(x) by (x − s)^n.
///
/// Returns the quotient in powers of x and the remainder as the first `n`
/// coefficients of p expanded about s (powers of u = x − s), so that
/// `p(x) = q(x)(x − s)^n + Σ_{j<n} r_j u^j`.
pub fn divide_by_linear_power<T: Scalar>(c: &[T], s: &T, n: usize) -> (Vec<T>, Vec<T>) {
    let shifted = taylor_shift(c, s);
    let remainder: Vec<T> = (0..n).map(|j| shifted.get(j).cloned().unwrap_or_else(T::zero)).collect();
    if shifted.len() <= n {
        return (vec![T::zero()], remainder);
    }
    // Quotient in u, shifted back to x.
    let q_u: Vec<T> = shifted[n..].to_vec();
    let q_x = taylor_shift(&q_u, &-s.clone());
    (q_x, remainder)
}

/// Σ |a_i| |x|^i, the conditioning scale of evaluating p at x.
pub fn magnitude(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x.abs() + a.abs())
}

/// Cauchy bound: every real root lies in [−R, R].
pub fn cauchy_bound(c: &[f64]) -> f64 {
    let c = trim(c.to_vec());
    let lead = *c.last().unwrap();
    if c.len() <= 1 || lead == 0.0 {
        return 0.0;
    }
    1.0 + c[..c.len() - 1].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max)
}

/// A real root with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u32,
}

/// All real roots of p, sorted ascending, with multiplicities.
///
/// Recursive isolation: the real critical points of p split the line into
/// monotone pieces, each holding at most one simple root (found by bisection
/// followed by Newton polishing). A critical point where
/// `|p| ≤ tol · magnitude(p, x)` is a multiple root; its multiplicity is one
/// more than its multiplicity as a root of p'.
pub fn real_roots(c: &[f64], tol: f64) -> Vec<RealRoot> {
    let c = trim(c.to_vec());
    let deg = c.len() - 1;
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        return vec![RealRoot { value: -c[0] / c[1], multiplicity: 1 }];
    }
    let d = derivative(&c);
    let crit = real_roots(&d, tol);
    let bound = cauchy_bound(&c);
    let mut out: Vec<RealRoot> = Vec::new();

    let mut push = |r: RealRoot| {
        if let Some(last) = out.last_mut() {
            if (r.value - last.value).abs() <= 1e-12 * (1.0 + r.value.abs()) {
                last.multiplicity = last.multiplicity.max(r.multiplicity);
                return;
            }
        }
        out.push(r);
    };

    // A multiple root is treated as an exact zero so the neighbouring monotone
    // pieces cannot report a spurious simple root next to it.
    let mut lo = -bound - 1.0;
    let mut flo = eval(&c, &lo);
    for cp in &crit {
        let x = cp.value;
        let fx = eval(&c, &x);
        let multiple = fx.abs() <= tol * magnitude(&c, x);
        let fx = if multiple { 0.0 } else { fx };
        if let Some(v) = bracket_simple_root(&c, lo, flo, x, fx) {
            push(RealRoot { value: v, multiplicity: 1 });
        }
        if multiple {
            push(RealRoot { value: x, multiplicity: cp.multiplicity + 1 });
        }
        lo = x;
        flo = fx;
    }
    let hi = bound + 1.0;
    if let Some(v) = bracket_simple_root(&c, lo, flo, hi, eval(&c, &hi)) {
        push(RealRoot { value: v, multiplicity: 1 });
    }
    out
}

/// Root of a polynomial that is monotone on [a, b], if p changes sign strictly
/// inside the interval.
fn bracket_simple_root(c: &[f64], a: f64, fa: f64, b: f64, fb: f64) -> Option<f64> {
    if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
        return None;
    }
    let (mut lo, mut hi) = (a, b);
    let mut flo = fa;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(c, &mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(newton_polish(c, 0.5 * (lo + hi), 2))
}

/// A few Newton steps, rejecting any step that increases |p|.
pub fn newton_polish(c: &[f64], mut x: f64, steps: usize) -> f64 {
    let d = derivative(c);
    for _ in 0..steps {
        let fx = eval(c, &x);
        let dx = eval(&d, &x);
        if dx == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - fx / dx;
        if eval(c, &next).abs() <= fx.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}
