//! Dormand–Prince 5(4) with Hairer's continuous extension.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; 0 picks one from the initial slope.
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-11, atol: 1e-13, h_init: 0.0, h_min: 1e-14, h_max: f64::INFINITY, max_steps: 400_000 }
    }
}

/// One accepted step and its interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at time t inside the step.
    pub fn at(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }

    /// Component `idx` at time t.
    pub fn component(&self, t: f64, idx: usize) -> f64 {
        self.at(t)[idx]
    }

    /// Time in the step where component `idx` crosses `level`, if it brackets.
    pub fn crossing(&self, idx: usize, level: f64) -> Option<f64> {
        let (a, b) = (self.y0[idx] - level, self.y1[idx] - level);
        if a == 0.0 || a.signum() == b.signum() {
            return None;
        }
        let (mut lo, mut hi) = (self.t0, self.t1());
        let mut flo = a;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let fm = self.component(mid, idx) - level;
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
        Some(0.5 * (lo + hi))
    }
}

/// What the step observer wants next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Reached the final time.
    Finished,
    /// The observer stopped the run.
    Stopped,
    StepUnderflow {
        t: f64,
    },
    TooManySteps {
        t: f64,
    },
    NonFinite {
        t: f64,
    },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrate from `t0` to `t_end` (either direction), handing every accepted
/// step to `observe`.
pub fn integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: &Tolerances,
    mut observe: O,
) -> Outcome
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseStep<N>) -> Control,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let norm = |v: &[f64; N], y: &[f64; N]| {
        let mut s = 0.0;
        for i in 0..N {
            let sc = tol.atol + tol.rtol * y[i].abs();
            s += (v[i] / sc).powi(2);
        }
        (s / N as f64).sqrt()
    };
    let mut h = if tol.h_init > 0.0 {
        tol.h_init
    } else {
        let d0 = norm(&y, &y);
        let d1 = norm(&k1, &y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(span.max(1e-12))
    };
    h = h.min(tol.h_max);
    let mut steps = 0usize;
    let mut reject_streak = 0;
    while (t_end - t) * dir > 0.0 {
        if steps >= tol.max_steps {
            return Outcome::TooManySteps { t };
        }
        steps += 1;
        let last = h >= (t_end - t).abs();
        let hh = if last { (t_end - t).abs() } else { h };
        let hs = hh * dir;
        let k2 = f(t + C2 * hs, &comb(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &comb(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &comb(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &comb(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let ys = comb(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = f(t + hs, &ys);
        let y1 = comb(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + hs, &y1);
        if y1.iter().any(|v| !v.is_finite()) || k7.iter().any(|v| !v.is_finite()) {
            if hh <= tol.h_min {
                return Outcome::NonFinite { t };
            }
            h = hh * 0.2;
            continue;
        }
        let mut errv = [0.0; N];
        for i in 0..N {
            errv[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let mut s = 0.0;
        for i in 0..N {
            let sc = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
            s += (errv[i] / sc).powi(2);
        }
        let err = (s / N as f64).sqrt();
        if err <= 1.0 {
            let mut rcont = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = hs * k1[i] - dy;
                rcont[0][i] = y[i];
                rcont[1][i] = dy;
                rcont[2][i] = bspl;
                rcont[3][i] = dy - hs * k7[i] - bspl;
                rcont[4][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h: hs, y0: y, y1, rcont };
            t = if last { t_end } else { t + hs };
            y = y1;
            k1 = k7;
            reject_streak = 0;
            if observe(&step) == Control::Stop {
                return Outcome::Stopped;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (hh * fac).min(tol.h_max);
        } else {
            reject_streak += 1;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            h = hh * if reject_streak > 3 { 0.1 } else { fac };
            if h < tol.h_min {
                return Outcome::StepUnderflow { t };
            }
        }
    }
    Outcome::Finished
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut last = [0.0; 2];
        let out = integrate(f, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, &Tolerances::default(), |s| {
            last = s.y1;
            Control::Continue
        });
        assert_eq!(out, Outcome::Finished);
        assert!((last[0] - 1.0).abs() < 1e-9 && last[1].abs() < 1e-9);
    }

    #[test]
    fn dense_output_is_accurate() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let tol = Tolerances { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let mut worst: f64 = 0.0;
        integrate(f, 0.0, [1.0], 3.0, &tol, |s| {
            for j in 1..10 {
                let t = s.t0 + s.h * j as f64 / 10.0;
                worst = worst.max((s.at(t)[0] - t.exp()).abs() / t.exp());
            }
            Control::Continue
        });
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn backward_and_crossing() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut hit = None;
        integrate(f, 0.0, [1.0, 0.0], -3.0, &Tolerances::default(), |s| {
            if let Some(t) = s.crossing(0, 0.0) {
                hit = Some(t);
                return Control::Stop;
            }
            Control::Continue
        });
        assert!((hit.unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }
}
