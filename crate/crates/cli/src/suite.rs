//! Seeded property suite behind `rotwave verify`. Output is a list of
//! named checks; details carry no timings, so a fixed seed reproduces the
//! ledger byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotwave_core::atlas::{sweep_singular_line, CENSUS_TOL};
use rotwave_core::closedform::{
    construct_sn_periodic, construct_solitary, factor_quartic, orbit_polynomial, Branch, QuarticFactorization,
};
use rotwave_core::elliptic::{complete_k, jacobi, EllipticModulus};
use rotwave_core::equilibria::find_g_roots;
use rotwave_core::field::{audit, eval_f};
use rotwave_core::orbits::{integrate_system, IntegrateOptions, SurveyOptions, System, DEFAULT_JUMP_FACTOR};
use rotwave_core::poly::RealRoot;
use rotwave_core::{
    build_first_integral, census, classify_orbit, derive_coriolis, derive_wave_params, orbits, CaseLabel, OrbitTag,
    PhasePoint, Theta, WaveParams,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.to_string(), passed, detail }
}

pub fn run(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![params_identities(), params_monotone(&mut rng)];
    for theta in [Theta::QUARTER, Theta::HALF, Theta::ONE] {
        out.push(conservation(&mut rng, theta));
    }
    out.push(printed_quarter(&mut rng));
    out.push(printed_audit(&mut rng));
    out.push(census_oracle(&mut rng));
    out.push(census_cases(&mut rng));
    out.push(elliptic_identities(&mut rng));
    out.extend(closed_forms());
    out.extend(peakons());
    out.extend(atlas_sweeps());
    out
}

fn params_identities() -> CheckResult {
    let cp = match derive_coriolis(0.0) {
        Ok(cp) => cp,
        Err(e) => return check("params-identities", false, e.to_string()),
    };
    let ratio = cp.beta0 / cp.beta;
    let wp = derive_wave_params(&cp, 2.0, Theta::QUARTER);
    let ok = cp.k == 1.0
        && cp.omega1.abs() <= 1e-15
        && cp.omega2.abs() <= 1e-15
        && (ratio - 0.6).abs() <= 1e-14
        && (cp.alpha - 0.5).abs() <= 1e-15
        && (cp.beta0 - 0.5).abs() <= 1e-15
        && (cp.beta - 5.0 / 6.0).abs() <= 1e-15
        && matches!(wp, Ok(w) if w.big_k == -1.0 && w.c2 == 0.0 && w.c3 == 0.0);
    check(
        "params-identities",
        ok,
        format!("Omega = 0: k = {}, omega1 = {:e}, omega2 = {:e}, beta0/beta = {ratio}", cp.k, cp.omega1, cp.omega2),
    )
}

fn params_monotone(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut draws: Vec<f64> = (0..1000).map(|_| rng.gen_range(0.0..10.0)).collect();
    draws.sort_by(f64::total_cmp);
    let mut worst_trip: f64 = 0.0;
    let mut ok = true;
    let mut prev: Option<(f64, f64)> = None;
    for &omega in &draws {
        let Ok(cp) = derive_coriolis(omega) else {
            ok = false;
            continue;
        };
        ok &= cp.k > 0.0 && cp.k <= 1.0;
        if let Some((o, k)) = prev {
            if omega > o {
                ok &= cp.k < k;
            }
        }
        prev = Some((omega, cp.k));
        let back = rotwave_core::CoriolisParams::omega_from_k(cp.k);
        if omega > 0.0 {
            worst_trip = worst_trip.max((back - omega).abs() / omega);
        }
    }
    ok &= worst_trip <= 1e-12;
    check("params-monotone", ok, format!("1000 draws of Omega in [0, 10], worst round trip {worst_trip:.1e}"))
}

fn conservation(rng: &mut ChaCha8Rng, theta: Theta) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut failures = 0;
    while done < 100 {
        let mut u = || rng.gen_range(-1.0..1.0);
        let Ok(wp) = WaveParams::direct(theta, u(), u(), u(), u()) else { continue };
        let start = PhasePoint::new(u(), u());
        if wp.line_factor(start.phi).abs() < 0.05 {
            continue;
        }
        let Ok(fi) = build_first_integral(&wp) else {
            failures += 1;
            done += 1;
            continue;
        };
        let opts = IntegrateOptions { escape_phi: 1e2, escape_y: 1e3, ..Default::default() };
        let traj = integrate_system(&System::new(&wp), &fi, start, 10.0, &opts);
        worst = worst.max(traj.h_drift_max);
        done += 1;
    }
    let name = format!("conservation-theta-{theta}");
    check(
        &name,
        failures == 0 && worst <= 1e-8,
        format!("100 draws over tau in [0, 10], worst relative H drift {worst:.1e}"),
    )
}

fn printed_quarter(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut same = 0;
    for _ in 0..100 {
        let mut u = || rng.gen_range(-2.0..2.0);
        let wp = WaveParams::direct(Theta::QUARTER, u(), u(), u(), u()).expect("finite draw");
        if let Ok(fi) = build_first_integral(&wp) {
            if fi.polynomial_part == audit::printed_quarter_coeffs(&wp) && fi.y_squared_exponent == 2 {
                same += 1;
            }
        }
    }
    check("printed-quarter-hamiltonian", same == 100, format!("{same}/100 draws equal coefficient-wise"))
}

fn printed_audit(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut flagged = 0;
    let mut passed = 0;
    let mut worst_derived: f64 = 0.0;
    let n = 20;
    for theta in [Theta::HALF, Theta::ONE] {
        for _ in 0..n {
            let mut u = || rng.gen_range(-1.0..1.0);
            let wp = WaveParams::direct(theta, u(), u(), u(), u()).expect("finite draw");
            let printed = audit::printed_hamiltonian(&wp).expect("printed form exists");
            if matches!(audit::worst_defect(&wp, &*printed), Ok(d) if d > 1e-2) {
                flagged += 1;
            }
            let Ok(fi) = build_first_integral(&wp) else { continue };
            let derived = move |phi: f64, y: f64| fi.eval_h(PhasePoint::new(phi, y)).unwrap_or(f64::NAN);
            if let Ok(d) = audit::worst_defect(&wp, &derived) {
                worst_derived = worst_derived.max(d);
                if d < 1e-7 {
                    passed += 1;
                }
            }
        }
    }
    check(
        "printed-formula-audit",
        flagged == 2 * n && passed == 2 * n,
        format!(
            "theta 1/2 and 1: printed forms flagged in {flagged}/{}, derived forms conserved in {passed}/{} (worst {worst_derived:.1e})",
            2 * n,
            2 * n
        ),
    )
}

/// Equilibria counted by scanning g for sign changes, plus the origin and the
/// singular-line pair when f(4C1) > 0.
pub fn scanned_equilibrium_count(wp: &WaveParams) -> usize {
    let (k, c2, c3) = (wp.big_k, wp.c2, wp.c3);
    let g = |x: f64| ((c3 * x + c2) * x + 0.5) * x + k;
    let r = if c3 != 0.0 { 1.0 + k.abs().max(0.5).max(c2.abs()) / c3.abs() } else { 1e3 };
    let n = 200_000;
    let mut changes = 0;
    let mut prev = g(-r);
    for i in 1..=n {
        let v = g(-r + 2.0 * r * i as f64 / n as f64);
        if v == 0.0 || (prev != 0.0 && (v < 0.0) != (prev < 0.0)) {
            changes += 1;
        }
        prev = v;
    }
    let origin = usize::from(k != 0.0);
    let pair = if eval_f(wp, wp.singular_abscissa()) > 0.0 { 2 } else { 0 };
    changes + origin + pair
}

fn census_oracle(rng: &mut ChaCha8Rng) -> CheckResult {
    let (mut matched, mut flagged, mut unexplained) = (0, 0, 0);
    for _ in 0..1000 {
        let mut u = || rng.gen_range(-1.0..1.0);
        let wp = WaveParams::direct(Theta::QUARTER, u(), u(), u(), u()).expect("finite draw");
        let cen = census(&wp, CENSUS_TOL);
        if cen.equilibria.len() == scanned_equilibrium_count(&wp) {
            matched += 1;
        } else if cen.is_boundary() {
            flagged += 1;
        } else {
            unexplained += 1;
        }
    }
    check(
        "census-sign-scan",
        matched >= 999 && unexplained == 0,
        format!("theta 1/4, 1000 draws: {matched} match, {flagged} flagged boundary, {unexplained} unexplained"),
    )
}

fn census_cases(rng: &mut ChaCha8Rng) -> CheckResult {
    let expected = |l: CaseLabel| match l {
        CaseLabel::OneI => Some(4),
        CaseLabel::OneIii => Some(6),
        CaseLabel::ThreeIii => Some(3),
        _ => None,
    };
    let mut seen = [0usize; 3];
    let mut bad = 0;
    let mut tally = |wp: &WaveParams| {
        let cen = census(wp, CENSUS_TOL);
        if cen.is_boundary() || eval_f(wp, wp.singular_abscissa()) <= 0.0 {
            return;
        }
        if let Some(n) = expected(cen.case_label) {
            let slot = match cen.case_label {
                CaseLabel::OneI => 0,
                CaseLabel::OneIii => 1,
                _ => 2,
            };
            seen[slot] += 1;
            if cen.equilibria.len() != n {
                bad += 1;
            }
        }
    };
    for _ in 0..2000 {
        let mut u = || rng.gen_range(-1.0..1.0);
        tally(&WaveParams::direct(Theta::QUARTER, u(), u(), u(), u()).expect("finite draw"));
    }
    // K = 0 with C2² < 2C3.
    for _ in 0..300 {
        let c3: f64 = rng.gen_range(0.1..1.0);
        let lim = (2.0 * c3).sqrt();
        let c2 = rng.gen_range(-0.99 * lim..0.99 * lim);
        let c1 = rng.gen_range(-1.0..1.0);
        tally(&WaveParams::direct(Theta::QUARTER, c1, c2, c3, 0.0).expect("finite draw"));
    }
    check(
        "census-case-counts",
        bad == 0 && seen.iter().all(|&n| n > 0),
        format!(
            "with f(4C1) > 0: 1i {} draws, 1iii {}, 3iii {}; {bad} with the wrong count",
            seen[0], seen[1], seen[2]
        ),
    )
}

fn elliptic_identities(rng: &mut ChaCha8Rng) -> CheckResult {
    let (mut pyth, mut period): (f64, f64) = (0.0, 0.0);
    for _ in 0..2000 {
        let m = rng.gen_range(0.0..0.999);
        let u = rng.gen_range(-20.0..20.0);
        let mu = EllipticModulus::new(m).expect("m in range");
        let t = jacobi(u, mu);
        pyth = pyth.max((t.sn * t.sn + t.cn * t.cn - 1.0).abs()).max((t.dn * t.dn + m * t.sn * t.sn - 1.0).abs());
        let k = complete_k(mu).expect("m < 1");
        period = period.max((jacobi(u + 4.0 * k, mu).sn - t.sn).abs());
    }
    // Trapezoidal rule is spectrally accurate for this periodic integrand.
    let n = 256;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let quad: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w / (1.0 - 0.5 * (i as f64 * h).sin().powi(2)).sqrt()
        })
        .sum::<f64>()
        * h;
    let k_half = EllipticModulus::new(0.5).and_then(complete_k).unwrap_or(f64::NAN);
    let kerr = (k_half - quad).abs();
    check(
        "elliptic-identities",
        pyth <= 1e-12 && period <= 1e-10 && kerr <= 1e-12,
        format!("2000 points: identities {pyth:.1e}, 4K periodicity {period:.1e}, K(0.5) vs quadrature {kerr:.1e}"),
    )
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Orbit polynomial at level h for the origin-line case with three zeros of g.
fn origin_case_fact(pick: impl Fn(f64, f64) -> f64) -> Option<(WaveParams, QuarticFactorization)> {
    let wp = WaveParams::direct(Theta::HALF, 0.0, 0.0, -1.0, 0.05).ok()?;
    let fi = build_first_integral(&wp).ok()?;
    let roots = find_g_roots(&wp, 1e-12);
    let hs = fi.potential(roots.get(1)?.value).ok()?;
    let hc = fi.potential(roots[0].value).ok()?.min(fi.potential(roots[2].value).ok()?);
    let p = orbit_polynomial(&fi, pick(hs, hc)).ok()?;
    Some((wp, factor_quartic(&p, 1e-10).ok()?))
}

fn closed_forms() -> Vec<CheckResult> {
    let mut out = Vec::new();
    match origin_case_fact(|hs, hc| 0.5 * (hs + hc)) {
        Some((wp, fact)) => {
            let mut worst: f64 = 0.0;
            let mut period_err = f64::NAN;
            for branch in [Branch::Right, Branch::Left] {
                let Ok(mut w) = construct_sn_periodic(&fact, branch) else {
                    worst = f64::INFINITY;
                    continue;
                };
                let t = w.period.unwrap_or(f64::NAN);
                worst = worst.max(w.attach_residual(&wp, &grid(-t, t, 1000)));
                if branch == Branch::Right {
                    period_err = numeric_period(&wp, fact.real_roots[1]).map(|p| (p - t).abs() / t).unwrap_or(f64::NAN);
                }
            }
            out.push(check(
                "closedform-sn-residual",
                worst <= 1e-8,
                format!("theta 1/2, C1 = 0: sn waves on both branches, residual {worst:.1e}"),
            ));
            out.push(check(
                "closedform-sn-period",
                period_err <= 1e-6,
                format!("2K(m)/omega vs integrated orbit period, relative gap {period_err:.1e}"),
            ));
        }
        None => out.push(check("closedform-sn-residual", false, "four-root level not found".into())),
    }
    match origin_case_fact(|hs, _| hs) {
        Some((wp, fact)) => {
            let mut worst: f64 = 0.0;
            for branch in [Branch::Right, Branch::Left] {
                worst = worst.max(match construct_solitary(&fact, branch) {
                    Ok(mut w) => w.attach_residual(&wp, &grid(-30.0, 30.0, 1201)),
                    Err(_) => f64::INFINITY,
                });
            }
            out.push(check(
                "closedform-solitary-residual",
                worst <= 1e-8,
                format!("both solitary branches, residual {worst:.1e}"),
            ));
        }
        None => out.push(check("closedform-solitary-residual", false, "double-root level not found".into())),
    }
    let (p1, p2, p4, gap) = (1.0, 0.2, -0.9, 1e-6);
    let simple = |v: f64| RealRoot { value: v, multiplicity: 1 };
    let sn_fact = QuarticFactorization::from_roots(-1.0, &[p1, p2, p2 - gap, p4].map(simple), None);
    let sol_fact = QuarticFactorization::from_roots(
        -1.0,
        &[simple(p1), RealRoot { value: p2, multiplicity: 2 }, simple(p4)],
        None,
    );
    let err = match (construct_sn_periodic(&sn_fact, Branch::Right), construct_solitary(&sol_fact, Branch::Right)) {
        (Ok(sn), Ok(sol)) => {
            let shift = sn.period.unwrap_or(f64::NAN) / 2.0;
            grid(-5.0, 5.0, 401).into_iter().map(|x| (sn.eval(x + shift) - sol.eval(x)).abs()).fold(0.0, f64::max)
        }
        _ => f64::INFINITY,
    };
    out.push(check(
        "closedform-degeneration",
        err <= 1e-6,
        format!("sn at root gap 1e-6 vs solitary, sup error {err:.1e}"),
    ));
    out
}

/// Period of the closed orbit through (start, 0), integrated.
fn numeric_period(wp: &WaveParams, start: f64) -> Option<f64> {
    let fi = build_first_integral(wp).ok()?;
    let opts = IntegrateOptions { stop_after_turning_points: Some(2), ..Default::default() };
    let traj = integrate_system(&System::new(wp), &fi, PhasePoint::new(start, 0.0), 1e4, &opts);
    classify_orbit(wp, &traj, &census(wp, CENSUS_TOL), DEFAULT_JUMP_FACTOR).period
}

fn peakons() -> Vec<CheckResult> {
    let survey_of = |c1: f64| {
        let wp = WaveParams::direct(Theta::QUARTER, c1, 0.0, -1.0, 0.5).ok()?;
        let opts = SurveyOptions { curve_points: 400, ..SurveyOptions::default() };
        orbits::survey(&wp, &census(&wp, CENSUS_TOL), &opts).ok()
    };
    let mut out = Vec::new();
    match survey_of(0.125) {
        Some(sv) => {
            let arches: Vec<_> = sv.orbits.iter().filter(|o| o.class.tag == OrbitTag::Peakon).collect();
            let jumps_ok = !arches.is_empty()
                && arches.iter().all(|o| {
                    let ymax = o.curve.iter().map(|p| p.y.abs()).fold(0.0, f64::max);
                    o.class.derivative_jump.is_some_and(|j| j > DEFAULT_JUMP_FACTOR * ymax)
                });
            let fams = sv.families(OrbitTag::PeriodicPeakon);
            out.push(check(
                "peakon-window",
                jumps_ok && fams >= 2,
                format!(
                    "theta 1/4, 0 < 4C1 = 0.5 < phi1 = 1: {} peakon arches, {fams} periodic-peakon families",
                    arches.len()
                ),
            ));
        }
        None => out.push(check("peakon-window", false, "survey failed".into())),
    }
    match survey_of(0.375) {
        Some(sv) => {
            let n = sv.count(OrbitTag::Peakon) + sv.count(OrbitTag::AntiPeakon) + sv.count(OrbitTag::PeriodicPeakon);
            out.push(check("peakon-outside-window", n == 0, format!("4C1 = 1.5 > phi1 = 1: {n} peaked orbits")));
        }
        None => out.push(check("peakon-outside-window", false, "survey failed".into())),
    }
    out
}

fn atlas_sweeps() -> Vec<CheckResult> {
    let cases = [
        ("atlas-sweep-t1", Theta::QUARTER, 0.5, (0.375, -0.125)),
        ("atlas-sweep-t3", Theta::HALF, 0.05, (0.5, -0.495)),
    ];
    cases
        .iter()
        .map(|&(name, theta, k, range)| {
            let base = WaveParams::direct(theta, 0.0, 0.0, -1.0, k).expect("finite");
            match sweep_singular_line(&base, range, 200) {
                Ok(report) => {
                    let (ok, n) = report.tally();
                    let rate = report.agreement_rate().unwrap_or(0.0);
                    check(
                        name,
                        rate >= 0.95,
                        format!(
                            "200 samples C1 {} -> {}: agreement {ok}/{n} ({:.1}%), {} boundary",
                            range.0,
                            range.1,
                            100.0 * rate,
                            report.boundary_count()
                        ),
                    )
                }
                Err(e) => check(name, false, e.to_string()),
            }
        })
        .collect()
}
