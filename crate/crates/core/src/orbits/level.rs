//! Level sets H(φ, y) = h from the y²-structure H = w(φ) y² + p(φ).

use serde::{Deserialize, Serialize};

use crate::field::{FirstIntegral, PhasePoint};
use crate::poly;

const GRID: usize = 2000;

/// One connected piece of a level set. Points run along y ≥ 0 from the left
/// end to the right end and back along y ≤ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveBranch {
    pub points: Vec<PhasePoint>,
    /// Both ends are turning points (y = 0), so the branch is a closed curve.
    pub closed: bool,
    pub phi_range: (f64, f64),
}

fn singular_at_shift(fi: &FirstIntegral) -> bool {
    fi.y_squared_exponent != 0 || fi.log_coefficient != 0.0 || !fi.pole_terms.is_empty()
}

/// Sub-intervals of the window that avoid the singular line.
fn pieces(fi: &FirstIntegral, window: (f64, f64)) -> Vec<(f64, f64)> {
    let s = fi.log_argument_shift;
    let (a, b) = window;
    if singular_at_shift(fi) && s > a && s < b {
        let gap = 1e-12 * (1.0 + s.abs());
        vec![(a, s - gap), (s + gap, b)]
    } else {
        vec![(a, b)]
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Simple zeros of H(φ, 0) − h inside the window, ascending.
pub fn axis_crossings(fi: &FirstIntegral, h: f64, window: (f64, f64)) -> Vec<f64> {
    if fi.log_coefficient == 0.0 && fi.pole_terms.is_empty() {
        let mut c = fi.polynomial_part.clone();
        c[0] -= h;
        return poly::real_roots(&c, 1e-12)
            .into_iter()
            .filter(|r| r.multiplicity % 2 == 1 && r.value >= window.0 && r.value <= window.1)
            .map(|r| r.value)
            .collect();
    }
    let d = |x: f64| fi.potential(x).map(|p| p - h).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for (a, b) in pieces(fi, window) {
        let dx = (b - a) / GRID as f64;
        let mut prev = (a, d(a));
        for i in 1..=GRID {
            let x = if i == GRID { b } else { a + dx * i as f64 };
            let v = d(x);
            if prev.1.is_finite() && v.is_finite() && (prev.1 < 0.0) != (v < 0.0) {
                out.push(bisect(&d, prev.0, x));
            }
            prev = (x, v);
        }
    }
    out
}

/// Trace H = h over a φ-window on a uniform grid.
pub fn trace_level_curve(fi: &FirstIntegral, h: f64, window: (f64, f64)) -> Vec<CurveBranch> {
    trace_level_curve_with(fi, h, window, GRID)
}

pub fn trace_level_curve_with(fi: &FirstIntegral, h: f64, window: (f64, f64), grid: usize) -> Vec<CurveBranch> {
    // Next to a singular line y² is roundoff over a vanishing weight, and a
    // spurious sign change there would fake a turning point.
    let s = fi.log_argument_shift;
    let guard = if singular_at_shift(fi) { 1e-9 * (1.0 + s.abs()) } else { -1.0 };
    let y2 = |x: f64| -> f64 {
        if (x - s).abs() <= guard {
            return f64::NAN;
        }
        let w = fi.y_weight(x);
        match fi.potential(x) {
            Ok(p) if w != 0.0 && w.is_finite() => (h - p) / w,
            _ => f64::NAN,
        }
    };
    let mut out = Vec::new();
    for (a, b) in pieces(fi, window) {
        let dx = (b - a) / grid as f64;
        let xs: Vec<f64> = (0..=grid).map(|i| if i == grid { b } else { a + dx * i as f64 }).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| y2(x)).collect();
        let inside = |v: f64| v.is_finite() && v >= 0.0;

        let touches = |x: f64| {
            let p = fi.potential(x).unwrap_or(f64::NAN);
            (h - p).abs() <= 1e-10 * (1.0 + fi.term_scale(PhasePoint::new(x, 0.0)))
        };
        let mut seen: Vec<f64> = Vec::new();
        let mut i = 0;
        while i <= grid {
            if !inside(vs[i]) {
                i += 1;
                continue;
            }
            let first = i;
            while i <= grid && inside(vs[i]) {
                i += 1;
            }
            let last = i - 1;
            if (first..=last).all(|k| touches(xs[k])) {
                let x = golden_max(&y2, xs[first.saturating_sub(1)], xs[(last + 1).min(grid)]);
                seen.push(x);
                out.push(CurveBranch { points: vec![PhasePoint::new(x, 0.0)], closed: true, phi_range: (x, x) });
                continue;
            }
            let (left, lclosed) = if first > 0 && vs[first - 1].is_finite() {
                (bisect(&|x| y2(x), xs[first - 1], xs[first]), true)
            } else {
                (xs[first], false)
            };
            let (right, rclosed) = if last < grid && vs[last + 1].is_finite() {
                (bisect(&|x| y2(x), xs[last], xs[last + 1]), true)
            } else {
                (xs[last], false)
            };
            let mut upper = vec![PhasePoint::new(left, if lclosed { 0.0 } else { y2(left).max(0.0).sqrt() })];
            for k in first..=last {
                if xs[k] > left && xs[k] < right {
                    upper.push(PhasePoint::new(xs[k], vs[k].sqrt()));
                }
            }
            upper.push(PhasePoint::new(right, if rclosed { 0.0 } else { y2(right).max(0.0).sqrt() }));
            let mut points = upper.clone();
            points.extend(upper.iter().rev().map(|p| PhasePoint::new(p.phi, -p.y)));
            out.push(CurveBranch { points, closed: lclosed && rclosed, phi_range: (left, right) });
        }

        // Isolated points: a local maximum of y² that touches zero between
        // grid nodes. Flat maxima can show up at neighbouring nodes.
        for k in 1..grid {
            let (l, c, r) = (vs[k - 1], vs[k], vs[k + 1]);
            if !(l.is_finite() && c.is_finite() && r.is_finite()) || c >= 0.0 || c < l || c <= r {
                continue;
            }
            let x = golden_max(&y2, xs[k - 1], xs[k + 1]);
            if touches(x) && !seen.iter().any(|&q| (q - x).abs() <= 2.0 * dx) {
                seen.push(x);
                out.push(CurveBranch { points: vec![PhasePoint::new(x, 0.0)], closed: true, phi_range: (x, x) });
            }
        }
    }
    out.sort_by(|a, b| a.phi_range.0.total_cmp(&b.phi_range.0));
    out
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
