//! The five commands. Each returns an [`Outcome`] without touching the
//! file system.

use std::collections::BTreeMap;
use std::fmt::Write;

use rotwave_core::atlas::{self, Region, SweepReport, CENSUS_TOL};
use rotwave_core::closedform::{
    construct_cn_periodic, construct_sn_periodic, construct_solitary, factor_quartic, orbit_polynomial, Branch,
    RootPattern,
};
use rotwave_core::equilibria::EquilibriumKind;
use rotwave_core::field::FirstIntegral;
use rotwave_core::orbits::{
    axis_crossings, flow_equilibria, integrate_system, survey, trace_level_curve, FlowEquilibrium, IntegrateOptions,
    OrbitSource, SurveyOptions, System, DEFAULT_JUMP_FACTOR,
};
use rotwave_core::{
    build_first_integral, census, classify_orbit, derive_coriolis, derive_wave_params, CoriolisParams, Error, OrbitTag,
    PhasePoint, Theta, WaveParams, WaveSolution,
};

use crate::config::{BranchArg, CommandConfig, Format, ParamSource, RunConfig, SweepRange, WaveKind};
use crate::output::{num, opt_num, short, Csv, Jsonl, Record};
use crate::svg::{Frame, Svg, HEIGHT, MARGIN, WIDTH};
use crate::{suite, CliError, OutFile, Outcome};

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match &cfg.command {
        CommandConfig::Params => params(cfg),
        CommandConfig::Portrait { h, phi_window } => portrait(cfg, h, *phi_window),
        CommandConfig::Wave { kind, branch, h, samples, xi_max } => wave(cfg, *kind, *branch, *h, *samples, *xi_max),
        CommandConfig::Sweep { range, samples } => sweep(cfg, *range, *samples),
        CommandConfig::Verify => verify(cfg),
    }
}

/// Invalid physical input is a usage error; everything later is a runtime one.
fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn resolve_params(cfg: &RunConfig) -> Result<(Option<CoriolisParams>, WaveParams), CliError> {
    let theta = cfg.theta.ok_or_else(|| CliError::Usage("--theta is required".into()))?;
    match cfg.params {
        Some(ParamSource::Physical { omega, c }) => {
            let cp = derive_coriolis(omega).map_err(usage)?;
            let wp = derive_wave_params(&cp, c, theta).map_err(usage)?;
            Ok((Some(cp), wp))
        }
        Some(ParamSource::Direct { c1, c2, c3, k }) => {
            Ok((None, WaveParams::direct(theta, c1, c2, c3, k).map_err(usage)?))
        }
        None => Err(CliError::Usage("no parameters given".into())),
    }
}

fn line_symbol(theta: Theta) -> String {
    match theta.reciprocal() {
        1 => "C1".into(),
        n => format!("{n}C1"),
    }
}

fn describe_params(out: &mut String, cp: Option<&CoriolisParams>, wp: &WaveParams) {
    match cp {
        Some(cp) => {
            let _ = writeln!(out, "mode: physical");
            for (k, v) in [
                ("Omega", cp.omega),
                ("k", cp.k),
                ("alpha", cp.alpha),
                ("beta0", cp.beta0),
                ("beta", cp.beta),
                ("omega1", cp.omega1),
                ("omega2", cp.omega2),
            ] {
                let _ = writeln!(out, "{k} = {}", short(v));
            }
        }
        None => {
            let _ = writeln!(out, "mode: direct");
        }
    }
    let _ = writeln!(out, "theta = {}", wp.theta);
    let _ = writeln!(out, "m = {}", wp.m());
    if let Some(c) = wp.c {
        let _ = writeln!(out, "c = {}", short(c));
    }
    for (k, v) in [("C1", wp.c1), ("C2", wp.c2), ("C3", wp.c3), ("K", wp.big_k)] {
        let _ = writeln!(out, "{k} = {}", short(v));
    }
    let _ = writeln!(out, "singular line: phi = {} = {}", line_symbol(wp.theta), short(wp.singular_abscissa()));
}

fn params(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (cp, wp) = resolve_params(cfg)?;
    let fi = build_first_integral(&wp)?;
    let mut report = String::new();
    describe_params(&mut report, cp.as_ref(), &wp);
    let _ = writeln!(report, "first integral: {}", fi.validity_note);

    let file = match cfg.format {
        None => return Ok(Outcome::report_only(report)),
        Some(Format::Svg) => return Err(CliError::Usage("params writes csv or jsonl".into())),
        Some(Format::Csv) => {
            let mut csv = Csv::new(&["quantity", "value"]);
            if let Some(cp) = &cp {
                for (k, v) in [
                    ("Omega", cp.omega),
                    ("k", cp.k),
                    ("alpha", cp.alpha),
                    ("beta0", cp.beta0),
                    ("beta", cp.beta),
                    ("omega1", cp.omega1),
                    ("omega2", cp.omega2),
                ] {
                    csv.row([k.to_string(), num(v)]);
                }
            }
            csv.row(["theta".to_string(), wp.theta.to_string()]);
            csv.row(["m".to_string(), wp.m().to_string()]);
            csv.row(["c".to_string(), opt_num(wp.c)]);
            for (k, v) in [("C1", wp.c1), ("C2", wp.c2), ("C3", wp.c3), ("K", wp.big_k)] {
                csv.row([k.to_string(), num(v)]);
            }
            csv.row(["validity_note".to_string(), fi.validity_note.clone()]);
            OutFile { ext: "csv", bytes: csv.finish()? }
        }
        Some(Format::Jsonl) => {
            let mut j = Jsonl::default();
            if let Some(cp) = &cp {
                let mut r = Record::new("coriolis");
                r.num("omega", cp.omega)
                    .num("k", cp.k)
                    .num("alpha", cp.alpha)
                    .num("beta0", cp.beta0)
                    .num("beta", cp.beta)
                    .num("omega1", cp.omega1)
                    .num("omega2", cp.omega2);
                j.push(&r);
            }
            let mut r = Record::new("wave_params");
            r.str("theta", &wp.theta.to_string())
                .int("m", wp.m())
                .opt("c", wp.c)
                .num("c1", wp.c1)
                .num("c2", wp.c2)
                .num("c3", wp.c3)
                .num("k", wp.big_k);
            j.push(&r);
            j.push(&first_integral_record(&fi));
            OutFile { ext: "jsonl", bytes: j.finish() }
        }
    };
    Ok(Outcome { files: vec![file], primary: Some(0), report, failed: false })
}

fn first_integral_record(fi: &FirstIntegral) -> Record {
    let mut r = Record::new("first_integral");
    r.num("y_squared_coefficient", fi.y_squared_coefficient)
        .int("y_squared_exponent", fi.y_squared_exponent)
        .nums("polynomial_part", &fi.polynomial_part)
        .num("log_coefficient", fi.log_coefficient)
        .num("log_argument_shift", fi.log_argument_shift);
    let poles: Vec<f64> = fi.pole_terms.iter().flat_map(|p| [p.power as f64, p.coefficient]).collect();
    r.nums("pole_terms", &poles).str("validity_note", &fi.validity_note);
    r
}

struct Curve {
    orbit: usize,
    branch: usize,
    source: String,
    tag: Option<OrbitTag>,
    h: Option<f64>,
    points: Vec<PhasePoint>,
    bounded: bool,
    /// Level branches return along y ≤ 0; a jump between signs is an open
    /// end, not a segment.
    split_on_sign_flip: bool,
}

fn tag_name(tag: Option<OrbitTag>) -> String {
    tag.map(|t| t.to_string()).unwrap_or_else(|| "level".into())
}

fn colour(tag: Option<OrbitTag>) -> &'static str {
    match tag {
        Some(OrbitTag::PeriodicSmooth) => "#1f77b4",
        Some(OrbitTag::Solitary) => "#d62728",
        Some(OrbitTag::Peakon) => "#2ca02c",
        Some(OrbitTag::AntiPeakon) => "#17becf",
        Some(OrbitTag::PeriodicPeakon) => "#9467bd",
        Some(OrbitTag::Unbounded) => "#9a9a9a",
        Some(OrbitTag::BoundaryDegenerate) => "#bcbd22",
        None => "#444444",
    }
}

fn span_of(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((a, b)) => Some((a.min(v), b.max(v))),
    })
}

fn pad((a, b): (f64, f64), frac: f64) -> (f64, f64) {
    let w = (b - a).max(0.5);
    (a - frac * w, b + frac * w)
}

/// φ-window around the equilibria and the singular line.
fn equilibrium_window(eqs: &[FlowEquilibrium], s: f64) -> (f64, f64) {
    let r = span_of(eqs.iter().map(|e| e.location.phi).chain([s, 0.0])).unwrap_or((-1.0, 1.0));
    pad(r, 0.5)
}

fn portrait(cfg: &RunConfig, levels: &[f64], user: (Option<f64>, Option<f64>)) -> Result<Outcome, CliError> {
    let (_, wp) = resolve_params(cfg)?;
    let fi = build_first_integral(&wp)?;
    let cen = census(&wp, CENSUS_TOL);
    let sys = System::new(&wp);
    let eqs = flow_equilibria(&cen, &sys);
    let s = wp.singular_abscissa();
    let eq_window = equilibrium_window(&eqs, s);
    if let (Some(a), Some(b)) = user {
        // Written to reject NaN as well.
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(CliError::Usage("--phi-min must be below --phi-max".into()));
        }
    }
    let trace_window = (user.0.unwrap_or(eq_window.0), user.1.unwrap_or(eq_window.1));

    let mut curves = Vec::new();
    let mut report = String::new();
    let label = atlas::classify_region(&wp, &cen);
    let _ = writeln!(report, "case: {}", cen.case_label);
    let _ = writeln!(report, "region: {label}");
    if levels.is_empty() {
        let opts = SurveyOptions { curve_points: 400, tolerances: cfg.tolerances, ..SurveyOptions::default() };
        let sv = survey(&wp, &cen, &opts)?;
        for (i, o) in sv.orbits.iter().enumerate() {
            let (source, h) = match o.source {
                OrbitSource::Level { h, .. } => ("level".to_string(), Some(h)),
                OrbitSource::Separatrix { from, sign } => {
                    let h = o.curve.first().and_then(|p| fi.eval_h(*p).ok());
                    (format!("separatrix {from}{}", if sign > 0 { '+' } else { '-' }), h)
                }
            };
            let bounded = !matches!(o.class.tag, OrbitTag::Unbounded | OrbitTag::BoundaryDegenerate);
            curves.push(Curve {
                orbit: i,
                branch: 0,
                source,
                tag: Some(o.class.tag),
                h,
                points: o.curve.clone(),
                bounded,
                split_on_sign_flip: false,
            });
        }
        let mut counts: BTreeMap<OrbitTag, usize> = BTreeMap::new();
        for o in &sv.orbits {
            *counts.entry(o.class.tag).or_default() += 1;
        }
        let list: Vec<String> = counts.iter().map(|(t, n)| format!("{t} {n}")).collect();
        let _ = writeln!(report, "orbits: {}", if list.is_empty() { "none".into() } else { list.join(", ") });
    } else {
        let mut n = 0;
        for (i, &h) in levels.iter().enumerate() {
            let branches = trace_level_curve(&fi, h, trace_window);
            n += branches.len();
            for (j, b) in branches.into_iter().enumerate() {
                let mut points = b.points;
                if b.closed {
                    if let Some(&p) = points.first() {
                        points.push(p);
                    }
                }
                curves.push(Curve {
                    orbit: i,
                    branch: j,
                    source: "level".into(),
                    tag: None,
                    h: Some(h),
                    points,
                    bounded: b.closed,
                    split_on_sign_flip: true,
                });
            }
        }
        let _ = writeln!(report, "level branches: {n}");
    }
    let _ = writeln!(report, "equilibria: {}", eqs.len());
    for e in &eqs {
        let _ = writeln!(
            report,
            "  {} at ({}, {}){}",
            e.kind,
            short(e.location.phi),
            short(e.location.y),
            if e.on_singular_line { " on the singular line" } else { "" }
        );
    }

    let frame = portrait_frame(&eqs, &curves, s, levels.is_empty(), user, eq_window);
    let svg = draw_portrait(&wp, &eqs, &curves, frame, s);

    let mut csv = Csv::new(&["orbit_id", "branch_id", "source", "tag", "h", "phi", "y"]);
    let mut jsonl = Jsonl::default();
    for e in &eqs {
        let mut r = Record::new("equilibrium");
        r.num("phi", e.location.phi)
            .num("y", e.location.y)
            .str("type", &e.kind.to_string())
            .bool("on_singular_line", e.on_singular_line);
        jsonl.push(&r);
    }
    let mut r = Record::new("singular_line");
    r.num("phi", s);
    jsonl.push(&r);
    for c in &curves {
        let (id, br, tag) = (c.orbit.to_string(), c.branch.to_string(), tag_name(c.tag));
        for p in &c.points {
            csv.row([&id, &br, &c.source, &tag, &opt_num(c.h), &num(p.phi), &num(p.y)]);
        }
        let mut r = Record::new("curve");
        r.int("orbit_id", c.orbit as i64)
            .int("branch_id", c.branch as i64)
            .str("source", &c.source)
            .str("tag", &tag)
            .opt("h", c.h)
            .nums("phi", &c.points.iter().map(|p| p.phi).collect::<Vec<_>>())
            .nums("y", &c.points.iter().map(|p| p.y).collect::<Vec<_>>());
        jsonl.push(&r);
    }
    let data = match cfg.format {
        Some(Format::Jsonl) => OutFile { ext: "jsonl", bytes: jsonl.finish() },
        _ => OutFile { ext: "csv", bytes: csv.finish()? },
    };
    let primary = if matches!(cfg.format, Some(Format::Csv | Format::Jsonl)) { 1 } else { 0 };
    Ok(Outcome {
        files: vec![OutFile { ext: "svg", bytes: svg.into_bytes() }, data],
        primary: Some(primary),
        report,
        failed: false,
    })
}

fn portrait_frame(
    eqs: &[FlowEquilibrium],
    curves: &[Curve],
    s: f64,
    surveyed: bool,
    user: (Option<f64>, Option<f64>),
    eq_window: (f64, f64),
) -> Frame {
    let auto_x = if surveyed {
        let bounded = curves.iter().filter(|c| c.bounded).flat_map(|c| c.points.iter().map(|p| p.phi));
        let r = span_of(eqs.iter().map(|e| e.location.phi).chain([s]).chain(bounded)).unwrap_or((-1.0, 1.0));
        pad(r, 0.1)
    } else {
        eq_window
    };
    let x = (user.0.unwrap_or(auto_x.0), user.1.unwrap_or(auto_x.1));
    let inside = |p: &PhasePoint| p.phi >= x.0 && p.phi <= x.1;
    let ymax = eqs
        .iter()
        .map(|e| e.location)
        .chain(curves.iter().filter(|c| c.bounded).flat_map(|c| c.points.iter().copied()))
        .filter(inside)
        .map(|p| p.y.abs())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let ymax = if ymax > 1e-9 { 1.1 * ymax } else { 0.5 * (x.1 - x.0) };
    Frame { x, y: (-ymax, ymax) }
}

fn draw_portrait(wp: &WaveParams, eqs: &[FlowEquilibrium], curves: &[Curve], frame: Frame, s: f64) -> String {
    let mut svg = Svg::new();
    let (l, t) = (MARGIN, MARGIN);
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    svg.rect(0.0, 0.0, WIDTH, HEIGHT, "background", "fill=\"white\"");
    svg.rect(l, t, w, h, "frame", "fill=\"none\" stroke=\"#999999\"");
    svg.text(
        (WIDTH / 2.0, 24.0),
        "middle",
        &format!(
            "θ = {}, C1 = {}, C2 = {}, C3 = {}, K = {}",
            wp.theta,
            short(wp.c1),
            short(wp.c2),
            short(wp.c3),
            short(wp.big_k)
        ),
    );
    svg.text((l, HEIGHT - MARGIN + 16.0), "start", &format!("{:.3}", frame.x.0));
    svg.text((WIDTH - MARGIN, HEIGHT - MARGIN + 16.0), "end", &format!("{:.3}", frame.x.1));
    svg.text((WIDTH - MARGIN + 6.0, HEIGHT - MARGIN - 4.0), "start", "φ");
    svg.text((l - 4.0, t + 4.0), "end", &format!("{:.3}", frame.y.1));
    svg.text((l - 4.0, HEIGHT - MARGIN), "end", &format!("{:.3}", frame.y.0));
    svg.text((l, t - 6.0), "start", "y");
    svg.line((l, frame.py(0.0)), (l + w, frame.py(0.0)), "axis", "stroke=\"#cccccc\"");
    if s >= frame.x.0 && s <= frame.x.1 {
        svg.line(
            (frame.px(s), t),
            (frame.px(s), t + h),
            "singular-line",
            "stroke=\"#000000\" stroke-dasharray=\"6 4\"",
        );
    }

    // Families first, separatrices on top.
    let layer = |t: Option<OrbitTag>| match t {
        Some(OrbitTag::Unbounded | OrbitTag::BoundaryDegenerate) => 0,
        None | Some(OrbitTag::PeriodicSmooth | OrbitTag::PeriodicPeakon) => 1,
        _ => 2,
    };
    let mut order: Vec<&Curve> = curves.iter().collect();
    order.sort_by_key(|c| layer(c.tag));
    svg.open_group("curves");
    for c in order {
        let class = format!("orbit {}", tag_name(c.tag));
        let style = format!("stroke=\"{}\" stroke-width=\"1.2\"", colour(c.tag));
        let mut seg: Vec<(f64, f64)> = Vec::new();
        let mut prev_y = 0.0;
        for p in &c.points {
            if c.split_on_sign_flip && p.y * prev_y < 0.0 {
                if seg.len() >= 2 {
                    svg.polyline(&seg, &class, &style);
                }
                seg.clear();
            }
            prev_y = p.y;
            if p.phi.is_finite() && p.y.is_finite() && frame.contains(p.phi, p.y) {
                seg.push((frame.px(p.phi), frame.py(p.y)));
            } else {
                if seg.len() >= 2 {
                    svg.polyline(&seg, &class, &style);
                }
                seg.clear();
            }
        }
        if seg.len() >= 2 {
            svg.polyline(&seg, &class, &style);
        }
    }
    svg.close_group();

    svg.open_group("equilibria");
    for e in eqs {
        if !frame.contains(e.location.phi, e.location.y) {
            continue;
        }
        let (x, y) = (frame.px(e.location.phi), frame.py(e.location.y));
        let kind = format!("{:?}", e.kind).to_lowercase();
        let class =
            if e.on_singular_line { format!("equilibrium {kind} singular") } else { format!("equilibrium {kind}") };
        let ink = "stroke=\"#000000\" stroke-width=\"1.5\"";
        let filled = "fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"1.5\"";
        svg.open_group(&class);
        let r = 5.0;
        match e.kind {
            EquilibriumKind::Saddle => {
                svg.line((x - r, y - r), (x + r, y + r), "glyph", ink);
                svg.line((x - r, y + r), (x + r, y - r), "glyph", ink);
            }
            EquilibriumKind::Center => svg.circle((x, y), r - 1.0, "glyph", filled),
            EquilibriumKind::Node => svg.rect(x - 4.0, y - 4.0, 8.0, 8.0, "glyph", filled),
            EquilibriumKind::Cusp => svg.polygon(&[(x, y - r), (x + r, y + r), (x - r, y + r)], "glyph", filled),
            EquilibriumKind::Degenerate => {
                svg.polygon(&[(x, y - r), (x + r, y), (x, y + r), (x - r, y)], "glyph", filled)
            }
        }
        svg.close_group();
    }
    svg.close_group();

    let mut tags: Vec<Option<OrbitTag>> = curves.iter().map(|c| c.tag).collect();
    tags.sort();
    tags.dedup();
    svg.open_group("legend");
    let mut x = MARGIN;
    for tag in &tags {
        let y = HEIGHT - 14.0;
        svg.line((x, y - 4.0), (x + 16.0, y - 4.0), "key", &format!("stroke=\"{}\" stroke-width=\"2\"", colour(*tag)));
        let name = tag_name(*tag);
        svg.text((x + 20.0, y), "start", &name);
        x += 36.0 + 7.0 * name.chars().count() as f64;
    }
    svg.close_group();
    svg.finish()
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn wave(
    cfg: &RunConfig,
    kind: WaveKind,
    branch: BranchArg,
    h: Option<f64>,
    samples: usize,
    xi_max: Option<f64>,
) -> Result<Outcome, CliError> {
    let (_, wp) = resolve_params(cfg)?;
    let fi = build_first_integral(&wp)?;
    let side = match branch {
        BranchArg::Left => Branch::Left,
        BranchArg::Right => Branch::Right,
    };
    if kind == WaveKind::Numeric {
        let h = h.ok_or_else(|| CliError::Usage("--h is required for --type numeric".into()))?;
        return numeric_wave(cfg, &wp, &fi, h, side, samples);
    }
    let (h, mut sol) = match kind {
        WaveKind::Solitary => solitary_at_saddle(&wp, &fi, h, side)?,
        _ => {
            let h = h.ok_or_else(|| CliError::Usage("--h is required for periodic waves".into()))?;
            let fact = factor_quartic(&orbit_polynomial(&fi, h)?, 1e-10)?;
            let sol = match (kind, fact.pattern()) {
                (WaveKind::Sn, _) | (WaveKind::Periodic, RootPattern::FourSimple) => {
                    construct_sn_periodic(&fact, side)?
                }
                _ => construct_cn_periodic(&fact)?,
            };
            (h, sol)
        }
    };
    let half = match (xi_max, sol.period) {
        (Some(x), _) => x,
        (None, Some(t)) => t,
        (None, None) => 40.0 / sol.parameters.omega,
    };
    if !(half > 0.0 && half.is_finite()) {
        return Err(CliError::Usage("--xi-max must be positive".into()));
    }
    let xs = grid(-half, half, samples);
    let residual = sol.attach_residual(&wp, &xs);

    let p = &sol.parameters;
    let mut report = String::new();
    let _ = writeln!(report, "variant: {:?}", sol.variant);
    let _ = writeln!(report, "h = {}", short(h));
    let roots: Vec<String> = p.roots.iter().map(|&r| short(r)).collect();
    let _ = writeln!(report, "roots: {}", roots.join(", "));
    if let (Some(b1), Some(a1)) = (p.b1, p.a1) {
        let _ = writeln!(report, "complex pair: {} ± {}i", short(b1), short(a1));
    }
    let _ = writeln!(report, "leading coefficient = {}", short(p.leading_coefficient));
    let _ = writeln!(report, "omega = {}", short(p.omega));
    if let Some(po) = p.printed_omega {
        let _ = writeln!(report, "printed omega = {}", short(po));
    }
    if let Some(m) = p.m_param {
        let _ = writeln!(report, "m = {}", short(m));
    }
    if let Some(t) = sol.period {
        let _ = writeln!(report, "period = {}", short(t));
    }
    let _ = writeln!(report, "range: [{}, {}]", short(sol.range.0), short(sol.range.1));
    let _ = writeln!(report, "residual = {:.3e} over xi in [{}, {}]", residual, short(-half), short(half));
    if matches!(kind, WaveKind::Solitary) {
        let p2 = p.roots[1];
        let (a, b) = (sol.eval(-half), sol.eval(half));
        let _ = writeln!(report, "limit: phi(-xi_max) = {}, phi(xi_max) = {}, p2 = {}", short(a), short(b), short(p2));
        let _ = writeln!(report, "limit gap = {:.3e}", (a - p2).abs().max((b - p2).abs()));
    }
    for n in &sol.notes {
        let _ = writeln!(report, "note: {n}");
    }

    let profile: Vec<(f64, f64)> = xs.iter().map(|&x| (x, sol.eval(x))).collect();
    let file = profile_file(cfg.format, &profile, |r| {
        r.str("variant", &format!("{:?}", sol.variant))
            .num("h", h)
            .nums("roots", &p.roots)
            .num("omega", p.omega)
            .opt("printed_omega", p.printed_omega)
            .opt("m", p.m_param)
            .opt("period", sol.period)
            .num("residual", residual);
    })?;
    Ok(Outcome { files: vec![file], primary: Some(0), report, failed: false })
}

fn profile_file(
    format: Option<Format>,
    profile: &[(f64, f64)],
    head: impl FnOnce(&mut Record),
) -> Result<OutFile, CliError> {
    match format {
        Some(Format::Jsonl) => {
            let mut j = Jsonl::default();
            let mut r = Record::new("wave");
            head(&mut r);
            j.push(&r);
            for &(x, v) in profile {
                let mut r = Record::new("sample");
                r.num("xi", x).num("phi", v);
                j.push(&r);
            }
            Ok(OutFile { ext: "jsonl", bytes: j.finish() })
        }
        Some(Format::Svg) => Err(CliError::Usage("wave writes csv or jsonl".into())),
        _ => {
            let mut csv = Csv::new(&["xi", "phi"]);
            for &(x, v) in profile {
                csv.row([num(x), num(v)]);
            }
            Ok(OutFile { ext: "csv", bytes: csv.finish()? })
        }
    }
}

/// The homoclinic level through an axis saddle whose orbit polynomial has
/// the double-root pattern.
fn solitary_at_saddle(
    wp: &WaveParams,
    fi: &FirstIntegral,
    h: Option<f64>,
    side: Branch,
) -> Result<(f64, WaveSolution), CliError> {
    let levels = match h {
        Some(h) => vec![h],
        None => {
            let cen = census(wp, CENSUS_TOL);
            let eqs = flow_equilibria(&cen, &System::new(wp));
            eqs.iter()
                .filter(|e| e.kind == EquilibriumKind::Saddle && !e.on_singular_line)
                .filter_map(|e| fi.potential(e.location.phi).ok())
                .collect()
        }
    };
    let mut last = CliError::Runtime("no saddle on the φ-axis, so no solitary level".into());
    for h in levels {
        match orbit_polynomial(fi, h).and_then(|p| factor_quartic(&p, 1e-10)).and_then(|f| construct_solitary(&f, side))
        {
            Ok(sol) => return Ok((h, sol)),
            Err(e) => last = e.into(),
        }
    }
    Err(last)
}

fn numeric_wave(
    cfg: &RunConfig,
    wp: &WaveParams,
    fi: &FirstIntegral,
    h: f64,
    side: Branch,
    samples: usize,
) -> Result<Outcome, CliError> {
    let cen = census(wp, CENSUS_TOL);
    let sys = System::new(wp);
    let eqs = flow_equilibria(&cen, &sys);
    let window = equilibrium_window(&eqs, wp.singular_abscissa());
    let crossings = axis_crossings(fi, h, window);
    let start = match side {
        Branch::Right => crossings.last(),
        Branch::Left => crossings.first(),
    }
    .copied()
    .ok_or_else(|| CliError::Runtime(format!("level h = {} does not cross the φ-axis", short(h))))?;
    let span = window.1 - window.0;
    let opts = IntegrateOptions {
        tolerances: cfg.tolerances,
        stop_after_turning_points: Some(2),
        escape_phi: 10.0 * span,
        escape_y: 1e4 * span,
        ..IntegrateOptions::default()
    };
    let traj = integrate_system(&sys, fi, PhasePoint::new(start, 0.0), 1e4, &opts);
    let class = classify_orbit(wp, &traj, &cen, DEFAULT_JUMP_FACTOR);
    let mut pts: Vec<(f64, f64)> = traj.samples.iter().map(|s| (s.xi, s.point.phi)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() < 2 {
        return Err(CliError::Runtime("trajectory has fewer than two samples".into()));
    }
    let sol = WaveSolution::numeric(pts.clone(), class.period);
    let xs = grid(pts[0].0, pts[pts.len() - 1].0, samples);
    let profile: Vec<(f64, f64)> = xs.iter().map(|&x| (x, sol.eval(x))).collect();

    let mut report = String::new();
    let _ = writeln!(report, "variant: NumericOrbit");
    let _ = writeln!(report, "h = {}", short(h));
    let _ = writeln!(report, "start: phi = {}, y = 0", short(start));
    let _ = writeln!(report, "tag: {}", class.tag);
    if let Some(t) = class.period {
        let _ = writeln!(report, "period = {}", short(t));
    }
    if let Some(j) = class.derivative_jump {
        let _ = writeln!(report, "slope jump = {}", short(j));
    }
    let _ = writeln!(report, "range: [{}, {}]", short(sol.range.0), short(sol.range.1));
    let _ = writeln!(report, "relative H drift = {:.3e}", traj.h_drift_max);
    let _ = writeln!(report, "stop: {:?}", traj.stop);
    let file = profile_file(cfg.format, &profile, |r| {
        r.str("variant", "NumericOrbit")
            .num("h", h)
            .str("tag", &class.tag.to_string())
            .opt("period", class.period)
            .num("h_drift", traj.h_drift_max);
    })?;
    Ok(Outcome { files: vec![file], primary: Some(0), report, failed: false })
}

fn sweep(cfg: &RunConfig, range: SweepRange, samples: usize) -> Result<Outcome, CliError> {
    let opts = SurveyOptions { tolerances: cfg.tolerances, ..SurveyOptions::default() };
    let theta = cfg.theta.ok_or_else(|| CliError::Usage("--theta is required".into()))?;
    let checked = |a: f64, b: f64| {
        if samples < 2 {
            Err(CliError::Usage("--samples must be at least 2".into()))
        } else if a.partial_cmp(&b) != Some(std::cmp::Ordering::Greater) {
            Err(CliError::Usage("sweeps run from right to left: the start must exceed the end".into()))
        } else {
            Ok(())
        }
    };
    let report = match (range, cfg.params) {
        (SweepRange::C1(a, b), _) => {
            checked(a, b)?;
            let (_, base) = resolve_params(cfg)?;
            atlas::sweep_singular_line_with(&base, (a, b), samples, &opts)?
        }
        (SweepRange::Speed(a, b), Some(ParamSource::Physical { omega, .. })) => {
            checked(a, b)?;
            derive_coriolis(omega).and_then(|cp| cp.dispersion_ratio()).map_err(usage)?;
            atlas::sweep_speed(omega, theta, (a, b), samples, &opts)?
        }
        _ => return Err(CliError::Usage("speed sweeps need physical mode".into())),
    };
    let summary = sweep_summary(&report);
    let file = match cfg.format {
        Some(Format::Jsonl) => {
            let mut j = Jsonl::default();
            for (i, s) in report.samples.iter().enumerate() {
                let mut r = Record::new("sample");
                r.int("index", i as i64)
                    .num("c1", s.c1)
                    .opt("c", s.c)
                    .str("region", &s.label.name())
                    .str("position", &s.label.singular_line_position)
                    .str("predicted", &s.predicted.map(|m| m.to_string()).unwrap_or_default())
                    .int("solitary", s.observed.solitary as i64)
                    .int("periodic_smooth", s.observed.periodic_smooth as i64)
                    .int("peakon", s.observed.peakon as i64)
                    .int("periodic_peakon", s.observed.periodic_peakon as i64);
                match s.agreement {
                    Some(a) => r.bool("agreement", a),
                    None => r.str("agreement", "excluded"),
                };
                r.str("diagnostics", &s.diagnostics);
                j.push(&r);
            }
            let (ok, n) = report.tally();
            let mut r = Record::new("summary");
            r.int("agreeing", ok as i64)
                .int("compared", n as i64)
                .opt("rate", report.agreement_rate())
                .int("boundary", report.boundary_count() as i64);
            j.push(&r);
            OutFile { ext: "jsonl", bytes: j.finish() }
        }
        Some(Format::Svg) => return Err(CliError::Usage("sweep writes csv or jsonl".into())),
        _ => {
            let mut csv = Csv::new(&[
                "index",
                "c1",
                "c",
                "region",
                "position",
                "predicted",
                "solitary",
                "periodic_smooth",
                "peakon",
                "periodic_peakon",
                "agreement",
                "diagnostics",
            ]);
            for (i, s) in report.samples.iter().enumerate() {
                csv.row([
                    i.to_string(),
                    num(s.c1),
                    opt_num(s.c),
                    s.label.name(),
                    s.label.singular_line_position.clone(),
                    s.predicted.map(|m| m.to_string()).unwrap_or_default(),
                    s.observed.solitary.to_string(),
                    s.observed.periodic_smooth.to_string(),
                    s.observed.peakon.to_string(),
                    s.observed.periodic_peakon.to_string(),
                    match s.agreement {
                        Some(true) => "yes".into(),
                        Some(false) => "no".into(),
                        None => "excluded".into(),
                    },
                    s.diagnostics.clone(),
                ]);
            }
            OutFile { ext: "csv", bytes: csv.finish()? }
        }
    };
    Ok(Outcome { files: vec![file], primary: Some(0), report: summary, failed: false })
}

pub fn sweep_summary(report: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "samples: {}", report.samples.len());
    let mut regions: BTreeMap<String, usize> = BTreeMap::new();
    let mut outside = 0;
    for s in &report.samples {
        *regions.entry(s.label.name()).or_default() += 1;
        if matches!(s.label.region, Region::Outside { .. }) {
            outside += 1;
        }
    }
    let list: Vec<String> = regions.iter().map(|(k, v)| format!("{k} {v}")).collect();
    let _ = writeln!(out, "regions: {}", list.join(", "));
    let _ = writeln!(out, "boundary samples: {}", report.boundary_count());
    let _ = writeln!(out, "outside samples: {outside}");
    let (ok, n) = report.tally();
    match report.agreement_rate() {
        Some(rate) => {
            let _ = writeln!(out, "agreement {ok}/{n} ({:.2}%) on non-boundary samples", 100.0 * rate);
            let _ = writeln!(out, "agreement >= 95%: {}", if rate >= 0.95 { "yes" } else { "no" });
        }
        None => {
            let _ = writeln!(out, "agreement 0/0 (no sample has a prediction)");
            let _ = writeln!(out, "agreement >= 95%: n/a");
        }
    }
    for s in report.samples.iter().filter(|s| s.agreement == Some(false)) {
        let _ = writeln!(out, "disagreement at C1 = {}: {}", short(s.c1), s.diagnostics);
    }
    out
}

fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let results = suite::run(cfg.seed);
    let mut report = String::new();
    let _ = writeln!(report, "seed {}", cfg.seed);
    for r in &results {
        let _ = writeln!(report, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(report, "{} checks, {} failed", results.len(), failed);
    Ok(Outcome { files: Vec::new(), primary: None, report, failed: failed > 0 })
}
