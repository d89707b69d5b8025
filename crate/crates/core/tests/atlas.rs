use proptest::prelude::*;
use rotwave_core::atlas::*;
use rotwave_core::equilibria::find_g_roots;
use rotwave_core::orbits::SurveyOptions;
use rotwave_core::*;

fn label(theta: Theta, c1: f64, c2: f64, c3: f64, k: f64) -> RegionLabel {
    let wp = WaveParams::direct(theta, c1, c2, c3, k).unwrap();
    classify_region(&wp, &census(&wp, CENSUS_TOL))
}

fn domain(l: &RegionLabel) -> Option<(Theorem, u8)> {
    match l.region {
        Region::Domain { theorem, domain } => Some((theorem, domain)),
        _ => None,
    }
}

/// K at which the local minimum (sign −1) or maximum (+1) of g touches zero,
/// for C2 = 0, C3 = −1.
fn touching_k(which: f64) -> f64 {
    -which / (3.0 * 6f64.sqrt())
}

/// Extremes of g on a dense grid between its critical points' neighbourhood.
fn scanned_extrema(k: f64) -> (f64, f64) {
    let g = |x: f64| k + 0.5 * x - x * x * x;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    // Local minimum on [-1, 0], local maximum on [0, 1].
    for i in 0..=200_000 {
        let x = i as f64 / 200_000.0;
        lo = lo.min(g(-x));
        hi = hi.max(g(x));
    }
    (lo, hi)
}

#[test]
fn peakon_domain_at_quarter() {
    let l = label(Theta::QUARTER, 0.125, 0.0, -1.0, 0.5);
    assert_eq!(domain(&l), Some((Theorem::T1, 1)));
    assert_eq!(l.singular_line_position, "0 < 4C1 < φ1");
}

#[test]
fn k_zero_at_half_is_the_sixth_domain() {
    let l = label(Theta::HALF, 0.1, 0.0, -1.0, 0.0);
    assert_eq!(domain(&l), Some((Theorem::T2, 6)));
}

#[test]
fn three_roots_at_the_origin_line() {
    let l = label(Theta::HALF, 0.0, 0.0, -1.0, 0.05);
    assert_eq!(domain(&l), Some((Theorem::T3, 3)));
    assert_eq!(l.roots.len(), 3);
    assert!(l.roots.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn domains_follow_the_scanned_extrema_of_g() {
    for k in [-0.3, -0.2, -0.1, 0.02, 0.05, 0.1, 0.2, 0.4] {
        let (gmin, gmax) = scanned_extrema(k);
        let expect = if gmin > 0.0 {
            1
        } else if gmax < 0.0 {
            0
        } else {
            4
        };
        let l = label(Theta::QUARTER, -0.3, 0.0, -1.0, k);
        match domain(&l) {
            Some((Theorem::T1, d)) => assert_eq!(d, expect, "K = {k}"),
            None => assert_eq!(expect, 0, "K = {k}: {l}"),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn touching_extrema_give_the_equality_domains() {
    let l = label(Theta::QUARTER, -0.3, 0.0, -1.0, touching_k(-1.0));
    assert_eq!(domain(&l), Some((Theorem::T1, 2)));
    let l = label(Theta::QUARTER, 0.3, 0.0, -1.0, touching_k(1.0));
    assert_eq!(domain(&l), Some((Theorem::T1, 3)));
    // Just off the equality, inside the margin: boundary.
    let l = label(Theta::QUARTER, -0.3, 0.0, -1.0, touching_k(-1.0) + 1e-8);
    assert!(l.is_boundary(), "{l}");
}

#[test]
fn singular_line_on_a_root_is_a_boundary() {
    let l = label(Theta::QUARTER, 0.25, 0.0, -1.0, 0.5);
    assert!(l.is_boundary(), "{l}");
    assert_eq!(l.singular_line_position, "0 < 4C1 = φ1");
    assert!(predict_wave_menu(&l).is_err());
}

#[test]
fn position_flips_when_the_line_passes_the_root() {
    let a = label(Theta::QUARTER, 0.249, 0.0, -1.0, 0.5);
    let b = label(Theta::QUARTER, 0.251, 0.0, -1.0, 0.5);
    assert_eq!(a.singular_line_position, "0 < 4C1 < φ1");
    assert_eq!(b.singular_line_position, "0 < φ1 < 4C1");
    assert_eq!(domain(&a), domain(&b));
}

#[test]
fn menu_in_the_first_window() {
    let m = predict_wave_menu(&label(Theta::QUARTER, 0.125, 0.0, -1.0, 0.5)).unwrap();
    assert_eq!(m.peakon, Count::AtLeast(1));
    assert_eq!(m.periodic_peakon, Count::AtLeast(2));
    assert!(m.smooth_any);
}

#[test]
fn menu_in_the_double_minimum_domain() {
    let m = predict_wave_menu(&label(Theta::QUARTER, 0.1, 0.0, -1.0, touching_k(-1.0))).unwrap();
    assert_eq!(m.peakon, Count::Absent);
    assert_eq!(m.periodic_peakon, Count::AtLeast(2));
}

#[test]
fn menu_of_the_single_cn_wave() {
    let l = label(Theta::HALF, 0.0, 0.0, -1.0, 0.5);
    assert_eq!(domain(&l), Some((Theorem::T3, 1)));
    let m = predict_wave_menu(&l).unwrap();
    assert_eq!(m.periodic_smooth, Count::AtLeast(1));
    assert_eq!(m.peakon, Count::Absent);
}

#[test]
fn no_peakons_right_of_the_root() {
    let base = WaveParams::direct(Theta::QUARTER, 0.0, 0.0, -1.0, 0.5).unwrap();
    let report = sweep_singular_line(&base, (0.375, 0.26), 6).unwrap();
    for s in &report.samples {
        assert!(s.label.singular_line_position.ends_with("φ1 < 4C1"));
        assert_eq!(s.predicted.unwrap().peakon, Count::Absent);
        assert_eq!((s.observed.peakon, s.observed.periodic_peakon), (0, 0));
        assert_eq!(s.agreement, Some(true));
    }
}

#[test]
fn lower_window_of_three_roots_has_peakons() {
    let wp = WaveParams::direct(Theta::QUARTER, -0.1, 0.0, -1.0, 0.05).unwrap();
    let s = evaluate(&wp, &SurveyOptions::default());
    assert_eq!(domain(&s.label), Some((Theorem::T1, 4)));
    assert_eq!(s.label.singular_line_position, "φ3 < 4C1 < φ2 < 0 < φ1");
    assert!(s.observed.peakon >= 1 && s.observed.periodic_peakon >= 2, "{}", s.observed);
    assert_eq!(s.agreement, Some(true));
}

#[test]
fn double_maximum_domain_observations() {
    // With C3 < 0 the singular-line saddles exist where f(4C1) > 0, which
    // is left of the origin here; the observation is recorded as is.
    let k = touching_k(1.0);
    let right = evaluate(&WaveParams::direct(Theta::QUARTER, 0.1, 0.0, -1.0, k).unwrap(), &SurveyOptions::default());
    assert_eq!(domain(&right.label), Some((Theorem::T1, 3)));
    assert_eq!(right.observed.peakon, 0);
    assert_eq!(right.agreement, Some(false));
    assert!(!right.diagnostics.is_empty());
    let left = evaluate(&WaveParams::direct(Theta::QUARTER, -0.1, 0.0, -1.0, k).unwrap(), &SurveyOptions::default());
    assert!(left.observed.peakon >= 1 && left.observed.periodic_peakon >= 2, "{}", left.observed);
}

#[test]
fn sweep_runs_right_to_left_and_hits_zero() {
    let base = WaveParams::direct(Theta::HALF, 0.0, 0.0, -1.0, 0.05).unwrap();
    let report = sweep_singular_line(&base, (0.5, -0.495), 200).unwrap();
    assert!(report.samples.windows(2).all(|w| w[0].c1 > w[1].c1));
    let t3: Vec<&SweepSample> = report
        .samples
        .iter()
        .filter(|s| matches!(s.label.region, Region::Domain { theorem: Theorem::T3, .. }))
        .collect();
    assert_eq!(t3.len(), 1);
    assert_eq!(t3[0].c1, 0.0);
    assert!(t3[0].observed.solitary >= 2 && t3[0].observed.periodic_smooth >= 2);
}

#[test]
fn sweep_is_deterministic() {
    let base = WaveParams::direct(Theta::QUARTER, 0.0, 0.0, -1.0, 0.5).unwrap();
    let a = sweep_singular_line(&base, (0.3, -0.1), 8).unwrap();
    let b = sweep_singular_line(&base, (0.3, -0.1), 8).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sweep_rejects_bad_ranges() {
    let base = WaveParams::direct(Theta::QUARTER, 0.0, 0.0, -1.0, 0.5).unwrap();
    assert!(sweep_singular_line(&base, (-0.1, 0.3), 10).is_err());
    assert!(sweep_singular_line(&base, (0.3, -0.1), 1).is_err());
}

#[test]
fn roots_are_the_zeros_of_g() {
    let wp = WaveParams::direct(Theta::QUARTER, 0.0, 0.3, -0.7, 0.02).unwrap();
    let l = classify_region(&wp, &census(&wp, CENSUS_TOL));
    let mut asc: Vec<f64> = find_g_roots(&wp, CENSUS_TOL).iter().map(|r| r.value).collect();
    asc.reverse();
    assert_eq!(l.roots, asc);
}

fn theta_strategy() -> impl Strategy<Value = Theta> {
    prop_oneof![Just(Theta::QUARTER), Just(Theta::HALF)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]
    #[test]
    fn labels_are_locally_constant(
        theta in theta_strategy(),
        c1 in prop_oneof![Just(0.0), -1.0..1.0f64],
        c2 in -1.0..1.0f64,
        c3 in -1.0..1.0f64,
        k in prop_oneof![Just(0.0), -0.5..0.5f64],
        d in prop::array::uniform4(-1e-9..1e-9f64),
    ) {
        let a = label(theta, c1, c2, c3, k);
        let b = label(theta, c1 + d[0], c2 + d[1], c3 + d[2], k + d[3]);
        if let (Some(x), Some(y)) = (domain(&a), domain(&b)) {
            prop_assert_eq!(x, y, "{} vs {}", a, b);
        }
    }
}
