//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. All sampling is seeded; tolerances are the
//! constants below.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tfractal::address::{dist_lower, wedge};
use tfractal::atlas::{
    boundary_loops, canonical_pieces, partial_area, validate_atlas, vertex_classes, Atlas, EdgeLabel, GlobalPoint,
};
use tfractal::billiard::{billiard_trace, simulate_table};
use tfractal::dynamics::{canonical_cylinders, eventually_equal, separation_witness, twist, untwist, Window, TWIST_SHEAR};
use tfractal::metric::{box_dimension, compare_metrics, dist_upper_graph, dist_upper_tree, m_bar, MetricChoice};
use tfractal::singularity::{approach_sequence, default_apex, sector_obstruction_witness};
use tfractal::tracer::{reverse, trace, Budgets, Termination};
use tfractal::{sample, Address, Direction, ElusiveAddress, Error, Rat};

const SEED: u64 = 20240611;
const ATLAS_TIME_LIMIT: Duration = Duration::from_secs(1);
const DIMENSION_TIME_LIMIT: Duration = Duration::from_secs(10);
const D2_SLOPE_TOLERANCE: f64 = 1e-3;
const D_UPPER_SLOPE_RANGE: (f64, f64) = (0.85, 1.15);
const GRAPH_DENSITY: usize = 8;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    format!("error: {e}")
}

fn atlas_structure(atlas: &Atlas) -> Outcome {
    let t0 = Instant::now();
    let report = validate_atlas(atlas);
    let elapsed = t0.elapsed();
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    ensure(report.passed, || format!("failed checks {failed:?}"))?;
    ensure(elapsed < ATLAS_TIME_LIMIT, || format!("validation took {elapsed:?}"))?;
    // independent count straight from the piece labels
    let mut uses: BTreeMap<EdgeLabel, usize> = BTreeMap::new();
    for p in canonical_pieces() {
        for e in &p.edges {
            *uses.entry(e.label).or_default() += 1;
        }
    }
    let solid: Vec<_> = uses.iter().filter(|(l, _)| !l.is_boundary()).collect();
    ensure(solid.len() == 14 && solid.iter().all(|(_, &n)| n == 2), || format!("solid label uses {solid:?}"))?;
    let boundary = uses.iter().filter(|(l, &n)| l.is_boundary() && n == 1).count();
    ensure(boundary == 12, || format!("{boundary} boundary labels used once"))?;
    let area: Rat = canonical_pieces().iter().map(|p| p.area()).sum();
    ensure(area == Rat::int(32), || format!("chart area {area}"))?;
    Ok(format!("{} checks, 14 solid pairs, area 32, {elapsed:.0?}", report.checks.len()))
}

fn cone_angles(atlas: &Atlas) -> Outcome {
    let depth = 3;
    let classes = vertex_classes(atlas.table(), depth).map_err(err)?;
    let bad: Vec<_> = classes.iter().filter(|c| !c.is_regular() && !c.is_six_pi()).map(|c| c.total_angle.to_string()).collect();
    ensure(bad.is_empty(), || format!("angles other than 2π and 6π: {bad:?}"))?;
    let six = classes.iter().filter(|c| c.is_six_pi()).count();
    // every complete quad-T meets a 6π class
    let complete: Vec<Address> = (0..depth)
        .flat_map(|k| (0..1u32 << k).map(move |i| Address::from_bits(&(0..k).rev().map(|b| (i >> b & 1) as u8).collect::<Vec<_>>())))
        .collect();
    for s in &complete {
        let has = classes.iter().any(|c| c.is_six_pi() && c.members.iter().any(|m| &m.address == s));
        ensure(has, || format!("Q^{s} touches no 6π class"))?;
    }
    let loops = boundary_loops(atlas.table(), depth).map_err(err)?;
    // each non-root quad-T of depth ≤ 3 contributes two boundary loops
    let expected_loops = 2 * ((1 << (depth + 1)) - 2);
    ensure(loops.len() == expected_loops, || format!("{} boundary loops, expected {expected_loops}", loops.len()))?;
    let open = loops.iter().filter(|l| !l.has_single_cone_point()).count();
    ensure(open == 0, || format!("{open} loops without a single 6π cone point"))?;
    Ok(format!("{} classes ({} at 6π), {} loops each with one cone point", classes.len(), six, loops.len()))
}

fn cylinders_and_moduli() -> Outcome {
    let cs = canonical_cylinders();
    let mut dims: Vec<(Rat, Rat)> = cs.iter().map(|c| (c.circumference.clone(), c.height.clone())).collect();
    dims.sort();
    let expected = [(4, 2), (4, 2), (8, 1), (8, 1)].map(|(c, h)| (Rat::int(c), Rat::int(h)));
    ensure(dims == expected, || format!("cylinder dimensions {dims:?}"))?;
    for c in cs {
        ensure(c.modulus == &c.circumference / &c.height, || "modulus is not c/h".into())?;
        let strip_area: Rat = c.strips.iter().map(|s| Rat::int(s.rect.area())).sum();
        ensure(strip_area == c.area(), || "strips do not tile the cylinder".into())?;
    }
    let moduli: std::collections::BTreeSet<Rat> = cs.iter().map(|c| c.modulus.clone()).collect();
    ensure(moduli == [Rat::int(2), Rat::int(8)].into(), || format!("moduli {moduli:?}"))?;
    let area: Rat = cs.iter().map(|c| c.area()).sum();
    let chart: Rat = canonical_pieces().iter().map(|p| p.area()).sum();
    ensure(area == chart, || format!("cylinder area {area} vs chart area {chart}"))?;
    Ok("4 cylinders (4x2, 4x2, 8x1, 8x1), moduli {2, 8}, area 32".into())
}

fn twist_map() -> Outcome {
    let mut rng = sample::rng(SEED ^ 4);
    for i in 0..1000 {
        let p = sample::interior_point(&mut rng, 6);
        let q = twist(&p).map_err(err)?;
        ensure(untwist(&q).map_err(err)? == p, || format!("untwist∘twist moved {p}"))?;
        // oracle: the shear in cylinder coordinates
        let c = canonical_cylinders().iter().find(|c| c.coords(p.piece(), &p.point.x, &p.point.y).is_some()).unwrap();
        let (_, u, v) = c.coords(p.piece(), &p.point.x, &p.point.y).unwrap();
        let (_, u2, v2) = c
            .coords(q.piece(), &q.point.x, &q.point.y)
            .ok_or_else(|| format!("point {i}: image {q} left the cylinder"))?;
        let expect = (&u + &v * Rat::int(TWIST_SHEAR)).rem_euclid(&c.circumference);
        ensure(v2 == v && u2 == expect && q.address == p.address, || format!("point {i}: {p} -> {q}"))?;
    }
    // boundary circles are fixed pointwise
    for c in canonical_cylinders() {
        for (k, s) in c.strips.iter().enumerate() {
            for v in [Rat::zero(), c.height.clone()] {
                let u = &s.u0 + Rat::new(2 * k as i64 + 1, 7).rem_euclid(&Rat::int(s.rect.x1 - s.rect.x0));
                let (piece, x, y) = c.point(&u, &v);
                let p = GlobalPoint::new(sample::address(&mut rng, 6), piece, x, y);
                ensure(twist(&p).map_err(err)? == p, || format!("boundary point {p} moved"))?;
            }
        }
    }
    // full-height displacement in circumferences
    let mut wraps: Vec<(Rat, Rat)> =
        canonical_cylinders().iter().map(|c| (c.circumference.clone(), Rat::int(TWIST_SHEAR) * &c.height / &c.circumference)).collect();
    wraps.sort();
    wraps.dedup();
    let expected = vec![(Rat::int(4), Rat::int(4)), (Rat::int(8), Rat::int(1))];
    ensure(wraps == expected, || format!("wraps {wraps:?}"))?;
    Ok("1000 points round-trip and shear by 8v; boundaries fixed; 4x2 wraps 4 times, 8x1 once".into())
}

fn distance_brackets(atlas: &Atlas) -> Outcome {
    let mut rng = sample::rng(SEED ^ 5);
    let mb = m_bar();
    for i in 0..200 {
        let (p, q) = (sample::interior_point(&mut rng, 8), sample::interior_point(&mut rng, 8));
        let (s, t) = (atlas.locate(&p).map_err(err)?, atlas.locate(&q).map_err(err)?);
        let lower = if s == t { Rat::zero() } else { dist_lower(&s, &t).map_err(err)? };
        let graph = dist_upper_graph(atlas, &p, &q, GRAPH_DENSITY).map_err(err)?;
        let tree = dist_upper_tree(atlas, &p, &q).map_err(err)?;
        ensure(lower <= graph && graph <= tree, || format!("pair {i}: {lower} ≤ {graph} ≤ {tree} fails"))?;
        let w = wedge(&s, &t);
        let cap = if s == t { &mb * s.scale() } else { Rat::int(3) * &mb * w.scale() };
        ensure(tree <= cap, || format!("pair {i}: tree bound {tree} above {cap}"))?;
    }
    Ok(format!("200 pairs bracketed, waypoint density {GRAPH_DENSITY}"))
}

fn metric_comparison(atlas: &Atlas) -> Outcome {
    let mut rng = sample::rng(SEED ^ 6);
    let pairs: Vec<_> = (0..100).map(|_| sample::elusive_pair(&mut rng)).collect();
    let rows = compare_metrics(atlas, &pairs, 12).map_err(err)?;
    for (r, (a, b)) in rows.iter().zip(&pairs) {
        // oracle: first differing bit by direct scan
        let k = (0..).find(|&n| a.bit(n) != b.bit(n)).unwrap();
        ensure(r.d2 == Rat::pow2(-(k as i64)), || format!("{a} {b}: d2 {} at first difference {k}", r.d2))?;
        ensure(r.d2 <= r.lower, || format!("{a} {b}: d2 {} > lower {}", r.d2, r.lower))?;
        ensure(r.tree_upper <= Rat::int(3) * m_bar() * &r.d2, || format!("{a} {b}: upper {} > 3M d2", r.tree_upper))?;
        ensure(r.holds, || format!("{a} {b}: report says the comparison fails"))?;
    }
    Ok("100 pairs at depth 12 satisfy d2 ≤ d and d ≤ 3·14·d2".into())
}

fn cantor_dimension(atlas: &Atlas) -> Outcome {
    let t0 = Instant::now();
    let r2 = box_dimension(atlas, MetricChoice::D2, 1, 16).map_err(err)?;
    ensure(r2.counts.iter().zip(&r2.scales).all(|(&n, &k)| n == 1 << k), || format!("d2 counts {:?}", r2.counts))?;
    ensure((r2.slope - 1.0).abs() <= D2_SLOPE_TOLERANCE, || format!("d2 slope {}", r2.slope))?;
    let ru = box_dimension(atlas, MetricChoice::DUpper, 4, 12).map_err(err)?;
    let elapsed = t0.elapsed();
    ensure(ru.slope >= D_UPPER_SLOPE_RANGE.0 && ru.slope <= D_UPPER_SLOPE_RANGE.1, || format!("d-upper slope {}", ru.slope))?;
    ensure(elapsed < DIMENSION_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("d2 slope {:.4}, d-upper slope {:.4}, {elapsed:.1?}", r2.slope, ru.slope))
}

fn approach_sequences(atlas: &Atlas) -> Outcome {
    let mut rng = sample::rng(SEED ^ 8);
    let mut addrs: Vec<ElusiveAddress> = Vec::new();
    while addrs.len() < 10 {
        let a = sample::elusive(&mut rng);
        if !addrs.contains(&a) {
            addrs.push(a);
        }
    }
    for a in &addrs {
        let seq = approach_sequence(a, 20);
        if let Some((j, k)) = seq.first_violation(atlas).map_err(err)? {
            return Err(format!("{a}: d(y_{j}, y_{k}) not below the tail bound"));
        }
    }
    for (i, a) in addrs.iter().enumerate() {
        for b in &addrs[i + 1..] {
            let (s, t) = (a.prefix(20), b.prefix(20));
            let w = wedge(&s, &t);
            let lower = dist_lower(&s, &t).map_err(err)?;
            ensure(lower >= w.scale(), || format!("{a} {b}: lower {lower} below 2^-{}", w.len()))?;
        }
    }
    Ok("10 addresses at depth 20 Cauchy; distinct limits separated".into())
}

fn billiard_unfolding(atlas: &Atlas) -> Outcome {
    let mut rng = sample::rng(SEED ^ 9);
    let mut corners = 0;
    for i in 0..100 {
        let start = sample::table_point(&mut rng);
        let dir = sample::direction(&mut rng, 9, true);
        let b = billiard_trace(atlas, 2, &start, dir, 50).map_err(err)?;
        let (poly, end) = simulate_table(2, &start, (dir.dx, dir.dy), 50).map_err(err)?;
        ensure(b.polyline == poly && b.end == end, || {
            format!("path {i} from ({}, {}) along ({},{}) differs from the direct billiard", start[0], start[1], dir.dx, dir.dy)
        })?;
        corners += usize::from(matches!(end, tfractal::billiard::BilliardEnd::HitCorner));
    }
    Ok(format!("100 paths on T_2 match the direct billiard for 50 bounces ({corners} end in a corner)"))
}

fn separation(atlas: &Atlas) -> Outcome {
    let mut rng = sample::rng(SEED ^ 10);
    let budgets = Budgets::new(Rat::int(200), 5000, 6);
    let (mut done, mut tries) = (0, 0);
    while done < 5 {
        tries += 1;
        ensure(tries <= 200, || format!("only {done} upward traces reached depth 6"))?;
        let p = sample::interior_point(&mut rng, 0);
        let dir = sample::upward_direction(&mut rng, 4);
        let tr = trace(atlas, &p, dir, &budgets).map_err(err)?;
        if tr.termination != Termination::DepthLimit {
            continue;
        }
        let r = separation_witness(atlas, &tr, 3).map_err(err)?;
        ensure(r.success, || format!("trace from {p} along ({},{}) not separated", dir.dx, dir.dy))?;
        done += 1;
    }
    Ok(format!("5 upward traces to depth 6 separated by 3 twists ({tries} sampled)"))
}

fn eventual_equality() -> Outcome {
    let w1 = [0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1];
    let w2 = [1, 1, 1, 0, 1, 0, 1, 0, 1];
    let window = Window { max_m: 8, max_n: 8, min_overlap: 5 };
    let got = eventually_equal(&w1, &w2, window);
    ensure(got == Some((5, 3)), || format!("least alignment is {got:?}, expected Some((5, 3))"))?;
    Ok("(M, N) = (5, 3)".into())
}

fn sector_witness(atlas: &Atlas) -> Outcome {
    let a = ElusiveAddress::constant(1);
    let apex = default_apex(&a);
    let mut pairs = vec![(Direction::new(1, 1).unwrap(), Direction::new(1, 2).unwrap())];
    let mut rng = sample::rng(SEED ^ 12);
    while pairs.len() < 4 {
        let (d1, d2) = (sample::upward_direction(&mut rng, 3), sample::upward_direction(&mut rng, 3));
        if d1 != d2 && !pairs.contains(&(d1, d2)) {
            pairs.push((d1, d2));
        }
    }
    let mut summary = Vec::new();
    for (i, (d1, d2)) in pairs.iter().enumerate() {
        let tag = format!("({},{})/({},{})", d1.dx, d1.dy, d2.dx, d2.dy);
        match sector_obstruction_witness(atlas, &a, &apex, *d1, *d2, 12) {
            Ok(r) => {
                let c = r.cone.ok_or_else(|| format!("{tag}: no cone point in the sector"))?;
                ensure(c.depth <= 12, || format!("{tag}: cone at depth {}", c.depth))?;
                summary.push(format!("{tag} cone at depth {}", c.depth));
            }
            Err(Error::RaysDiverge(_)) if i > 0 => summary.push(format!("{tag} rays-diverge")),
            Err(e) => return Err(format!("{tag}: {e}")),
        }
    }
    Ok(summary.join(", "))
}

fn tracer_determinism(atlas: &Atlas) -> Outcome {
    let mut rng = sample::rng(SEED ^ 13);
    let mut reversed = 0;
    for i in 0..500 {
        let p = sample::interior_point(&mut rng, 5);
        let dir = sample::direction(&mut rng, 7, false);
        let budgets = Budgets::new(Rat::new(i % 13 + 1, 2), 400, 8);
        let a = trace(atlas, &p, dir, &budgets).map_err(err)?;
        let b = trace(atlas, &p, dir, &budgets).map_err(err)?;
        ensure(a.to_json() == b.to_json(), || format!("trace {i} is not reproducible"))?;
        if a.termination == Termination::HitSingularity {
            continue;
        }
        let r = reverse(atlas, &a).map_err(err)?;
        let (back, start) = (atlas.canonical_point(&r.end()).map_err(err)?, atlas.canonical_point(&p).map_err(err)?);
        ensure(back == start && r.flow_time == a.flow_time, || format!("trace {i}: reversal ends at {back}, not {start}"))?;
        reversed += 1;
    }
    Ok(format!("500 traces reproducible, {reversed} non-singular traces reverse exactly"))
}

fn area_series() -> Outcome {
    for n in 0..=20u32 {
        // oracle: 2^k quad-Ts of area 32·4^-k at each level k
        let direct: Rat = (0..=n as i64).map(|k| Rat::pow2(k) * Rat::int(32) * Rat::pow2(-2 * k)).sum();
        let closed = Rat::int(64) * (Rat::one() - Rat::pow2(-(n as i64) - 1));
        let got = partial_area(n);
        ensure(got == direct && got == closed, || format!("n = {n}: {got} vs {direct}"))?;
    }
    Ok("area of depth ≤ n equals 64(1 - 2^-(n+1)) for n ≤ 20".into())
}

fn main() -> ExitCode {
    let atlas = Atlas::canonical();
    let criteria: Vec<Criterion> = vec![
        ("atlas structure", Box::new(|| atlas_structure(&atlas))),
        ("cone angles and boundary loops", Box::new(|| cone_angles(&atlas))),
        ("cylinders and moduli", Box::new(cylinders_and_moduli)),
        ("twist map", Box::new(twist_map)),
        ("distance brackets", Box::new(|| distance_brackets(&atlas))),
        ("metric comparison", Box::new(|| metric_comparison(&atlas))),
        ("cantor dimension", Box::new(|| cantor_dimension(&atlas))),
        ("approach sequences", Box::new(|| approach_sequences(&atlas))),
        ("billiard unfolding", Box::new(|| billiard_unfolding(&atlas))),
        ("separation witness", Box::new(|| separation(&atlas))),
        ("eventual equality", Box::new(eventual_equality)),
        ("sector obstruction witness", Box::new(|| sector_witness(&atlas))),
        ("tracer determinism and reversal", Box::new(|| tracer_determinism(&atlas))),
        ("area series", Box::new(area_series)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} {:>2} {name}: {detail} [{:.1?}]", i + 1, t0.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
