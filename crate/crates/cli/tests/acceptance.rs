//! Acceptance suite: ten end-to-end checks, one PASS/FAIL line each.
//! Runs without the libtest harness so the lines come out in order.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatsurf::builders::{build_chamanara, build_icicled, build_l_shaped, build_nested_cylinders, build_torus, default_height, Family};
use flatsurf::developing::{distance_to_singularities_sq, trace, Limits, SurfacePoint, TraceOutcome};
use flatsurf::geometry::{int, point_in_polygon, ratio, to_f64, Interval, Location, Point2, Scalar, Vec2};
use flatsurf::saddle::enumerate;
use flatsurf::topology::{
    connection_from_point, cut_along, family_report, icicle_tip, primary_class, witness_infinite_genus, ReportOptions,
    WitnessBudget,
};
use flatsurf::{Genus, Surface, SurfaceComplex};

/// Interval slack for the Lipschitz comparison.
const LIPSCHITZ_TOL: f64 = 1e-12;
/// Random pairs in the Lipschitz suite.
const LIPSCHITZ_PAIRS: usize = 1000;
/// Squared probe radius for distances to the singular set; larger distances are
/// clamped, which keeps the function 1-Lipschitz.
const LIPSCHITZ_PROBE_SQ: (i64, i64) = (1, 16);
/// Longest step between the two points of a pair.
const LIPSCHITZ_STEP: (i64, i64) = (1, 8);
/// Random starting points per depth for the icicled flow.
const ICICLED_POINTS: usize = 20;
/// Odd prime denominator: every sampled coordinate is non-dyadic.
const NON_DYADIC_DEN: i64 = 3001;
/// Length bound for the nested-cylinder holonomy check: length 2, wider than
/// the whole strip at depths 1 to 3.
const NESTED_MAX_LEN_SQ: i64 = 4;
/// Length bound for the torus census.
const TORUS_MAX_LEN_SQ: i64 = 100;
const SEED: u64 = 0x5eed_f1a7;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "calibration genus", limit: Duration::from_secs(1), run: calibration_genus },
        Criterion { id: 2, name: "gauss-bonnet on closed builds", limit: Duration::from_secs(5), run: gauss_bonnet },
        Criterion { id: 3, name: "torus saddle census vs gcd oracle", limit: Duration::from_secs(10), run: torus_census },
        Criterion { id: 4, name: "icicled vertical and horizontal flow", limit: Duration::from_secs(5), run: icicled_flow },
        Criterion { id: 5, name: "separating tip connection", limit: Duration::from_secs(5), run: separating_tip },
        Criterion { id: 6, name: "nested cylinders horizontal holonomy", limit: Duration::from_secs(10), run: nested_horizontal },
        Criterion { id: 7, name: "short-connection decay", limit: Duration::from_secs(10), run: short_decay },
        Criterion { id: 8, name: "witness on icicled depth 3", limit: Duration::from_secs(60), run: witness_icicled },
        Criterion { id: 9, name: "lipschitz distance to singularities", limit: Duration::from_secs(30), run: lipschitz },
        Criterion { id: 10, name: "cli determinism", limit: Duration::from_secs(120), run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:>2}  {:<38} {:>8.2?}  {detail}", c.id, c.name, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}  {:<38} {:>8.2?}  {why}", c.id, c.name, elapsed);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// χ = V − E + F counted straight from the polygon and gluing lists.
fn chi_by_count(c: &SurfaceComplex) -> i64 {
    let faces = c.polygons.len() as i64;
    let sides: i64 = c.polygons.iter().map(|p| p.len() as i64).sum();
    let edges = sides - c.gluings.len() as i64;
    let vertices = c.vertex_classes().len() as i64;
    vertices - edges + faces
}

fn genus_by_count(c: &SurfaceComplex) -> i64 {
    (2 - chi_by_count(c) - c.boundary_cycles() as i64) / 2
}

fn calibration_genus() -> Outcome {
    let expect_closed = |c: &SurfaceComplex, g: i64, label: &str| -> Result<(), String> {
        let got = c.genus().map_err(err)?;
        ensure(got == Genus::Closed { genus: g } && genus_by_count(c) == g, || {
            format!("{label}: genus {got:?}, counted {}", genus_by_count(c))
        })
    };
    expect_closed(&build_torus(), 1, "torus")?;
    expect_closed(&build_l_shaped(), 2, "l-shaped")?;
    for n in 1..=4 {
        let c = build_nested_cylinders(n, &default_height()).map_err(err)?;
        let g = c.genus().map_err(err)?.value();
        ensure(g == 0 && genus_by_count(&c) == 0, || format!("nested depth {n}: genus {g}"))?;
    }
    Ok("torus 1, l-shaped 2, nested 1..4 all 0".into())
}

fn gauss_bonnet() -> Outcome {
    let mut builds = vec![("torus".to_string(), build_torus()), ("l-shaped".to_string(), build_l_shaped())];
    for n in 1..=4 {
        builds.push((format!("chamanara {n}"), build_chamanara(n).map_err(err)?));
        for (name, c) in [
            ("icicled", build_icicled(n).map_err(err)?),
            ("nested", build_nested_cylinders(n, &default_height()).map_err(err)?),
        ] {
            builds.push((format!("{name} {n}"), c));
        }
    }
    let mut checked = 0;
    for (name, c) in builds.iter().filter(|(_, c)| c.is_closed()) {
        let mut excess = 0i64;
        for cone in c.cone_multiplicities() {
            let k = cone.multiplicity().ok_or_else(|| format!("{name}: closed surface with a boundary class"))?;
            excess += k as i64 - 1;
        }
        let g = genus_by_count(c);
        ensure(excess == 2 * g - 2, || format!("{name}: sum(k-1) = {excess}, 2g-2 = {}", 2 * g - 2))?;
        checked += 1;
    }
    ensure(checked == 6, || format!("expected 6 closed builds, found {checked}"))?;
    Ok(format!("{checked} closed builds"))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn torus_census() -> Outcome {
    let s = Surface::with_marked(build_torus(), &[0]).map_err(err)?;
    let found = enumerate(&s, 0, &int(TORUS_MAX_LEN_SQ), &Limits::default()).map_err(err)?;
    let got: Vec<(i64, i64)> = found
        .iter()
        .map(|sc| (to_f64(&sc.holonomy.x) as i64, to_f64(&sc.holonomy.y) as i64))
        .collect();
    let got_set: BTreeSet<(i64, i64)> = got.iter().copied().collect();
    ensure(got.len() == got_set.len(), || "duplicate holonomies".into())?;
    let r = (TORUS_MAX_LEN_SQ as f64).sqrt() as i64;
    let mut oracle = BTreeSet::new();
    for a in -r..=r {
        for b in -r..=r {
            if (a, b) != (0, 0) && a * a + b * b <= TORUS_MAX_LEN_SQ && gcd(a, b) == 1 {
                oracle.insert((a, b));
            }
        }
    }
    ensure(got_set == oracle, || {
        format!(
            "missing {:?}, extra {:?}",
            oracle.difference(&got_set).collect::<Vec<_>>(),
            got_set.difference(&oracle).collect::<Vec<_>>()
        )
    })?;
    Ok(format!("{} primitive vectors", oracle.len()))
}

fn locate(c: &SurfaceComplex, p: &Point2) -> Option<usize> {
    c.polygons.iter().position(|q| point_in_polygon(p, &q.vertices) == Location::Inside)
}

fn icicled_flow() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (lo, hi) = (ratio(1, 2), ratio(3, 2));
    let mut longer = 0;
    for depth in 1..=3 {
        let s = Surface::new(build_icicled(depth).map_err(err)?);
        let mut done = 0;
        while done < ICICLED_POINTS {
            let x = ratio(rng.gen_range(1..NON_DYADIC_DEN), NON_DYADIC_DEN);
            let y = ratio(rng.gen_range(1..2 * NON_DYADIC_DEN), NON_DYADIC_DEN);
            let p = Point2::new(x, y.clone());
            let Some(poly) = locate(s.complex(), &p) else { continue };
            let start = SurfacePoint::new(poly, p.clone());
            let up = trace(&s, &start, &Vec2::from_ints(0, 1), &int(2)).map_err(err)?;
            ensure(up.is_terminal_hit(), || format!("depth {depth}: vertical from {p} ended {}", up.name()))?;
            let across = trace(&s, &start, &Vec2::from_ints(1, 0), &int(8)).map_err(err)?;
            let TraceOutcome::Closed { period, .. } = &across else {
                return Err(format!("depth {depth}: horizontal from {p} ended {}", across.name()));
            };
            if y > lo && y < hi {
                // Middle band: no slit reaches these heights.
                ensure(*period == int(1), || format!("depth {depth}: period {period} at {p} in the middle band"))?;
            } else {
                ensure(period.is_integer() && *period >= int(1), || format!("depth {depth}: period {period} at {p}"))?;
                if *period > int(1) {
                    longer += 1;
                }
            }
            done += 1;
        }
    }
    Ok(format!(
        "{} points: all vertical traces stop within 2, horizontal closed (period 1 in the middle band, {longer} longer near the slits)",
        3 * ICICLED_POINTS
    ))
}

fn separating_tip() -> Outcome {
    let mut counts = Vec::new();
    for depth in 1..=3 {
        let s = Surface::new(build_icicled(depth).map_err(err)?);
        let sc = connection_from_point(&s, &icicle_tip(), &Vec2::from_ints(1, 0), &int(4))
            .map_err(err)?
            .ok_or_else(|| format!("depth {depth}: no horizontal connection at the tip"))?;
        ensure(sc.is_loop(), || format!("depth {depth}: tip connection ends at class {}", sc.end_class))?;
        let cut = cut_along(&s, &[sc]).map_err(err)?;
        ensure(cut.component_count == 2, || format!("depth {depth}: {} components", cut.component_count))?;
        counts.push(cut.component_count);
    }
    Ok(format!("components per depth {counts:?}"))
}

fn nested_horizontal() -> Outcome {
    let height = default_height();
    let mut total = 0;
    let mut truncation_ends = 0;
    for depth in 1..=3 {
        let s = Surface::new(build_nested_cylinders(depth, &height).map_err(err)?);
        let interior = |c: usize| !s.classes()[c].boundary;
        let mut here = 0;
        for class in s.singular_classes().into_iter().filter(|&c| interior(c)) {
            for sc in enumerate(&s, class, &int(NESTED_MAX_LEN_SQ), &Limits::default()).map_err(err)? {
                if interior(sc.end_class) {
                    ensure(sc.holonomy.y.is_zero(), || format!("depth {depth}: holonomy {}", sc.holonomy))?;
                    here += 1;
                } else {
                    // Runs up a slit to the point where the truncation ends it.
                    ensure(sc.holonomy.x.is_zero() && sc.length_sq == &height * &height, || {
                        format!("depth {depth}: unexpected connection to the boundary {}", sc.holonomy)
                    })?;
                    truncation_ends += 1;
                }
            }
        }
        ensure(here > 0, || format!("depth {depth}: no connections found"))?;
        total += here;
    }
    Ok(format!(
        "{total} connections between interior singularities, all horizontal; {truncation_ends} slit-length runs to truncation ends"
    ))
}

fn short_decay() -> Outcome {
    let options = ReportOptions::default();
    let ch = family_report(Family::Chamanara, &[1, 2, 3], &options).map_err(err)?;
    let quarter = Some(ratio(1, 4));
    ensure(ch.trends.shortest_ratios.iter().all(|r| *r == quarter), || {
        format!("chamanara ratios {:?}", ch.trends.shortest_ratios)
    })?;
    let ic = family_report(Family::Icicled, &[1, 2, 3], &options).map_err(err)?;
    ensure(ic.trends.shortest_nonincreasing, || {
        let v: Vec<_> = ic.rows.iter().map(|r| r.shortest_self_connection_sq.clone()).collect();
        format!("icicled shortest {v:?}")
    })?;
    let show = |r: &flatsurf::topology::FamilyReport| {
        r.rows
            .iter()
            .map(|r| r.shortest_self_connection_sq.as_ref().map_or("-".into(), |v| v.to_string()))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Ok(format!("chamanara [{}], icicled [{}]", show(&ch), show(&ic)))
}

fn witness_icicled() -> Outcome {
    let complex = build_icicled(3).map_err(err)?;
    let genus = genus_by_count(&complex);
    let s = Surface::new(complex);
    let class = primary_class(&s, Some(Family::Icicled)).ok_or("no primary class")?;
    let report = witness_infinite_genus(&s, class, 3, &WitnessBudget::default()).map_err(err)?;
    ensure(report.reached_target(), || format!("stopped with {:?} after {}", report.stop, report.verified))?;
    ensure(report.steps.iter().all(|st| st.non_separating), || "a prefix separates".into())?;
    ensure(2 * genus >= report.verified as i64, || format!("2 * genus {genus} < {}", report.verified))?;
    Ok(format!("verified {}, genus bound {}, genus {genus}", report.verified, report.genus_lower_bound))
}

fn random_point(rng: &mut impl Rng, c: &SurfaceComplex) -> (usize, Point2) {
    loop {
        let p = rng.gen_range(0..c.polygons.len());
        let vs = &c.polygons[p].vertices;
        let xs: Vec<f64> = vs.iter().map(|v| to_f64(&v.x)).collect();
        let ys: Vec<f64> = vs.iter().map(|v| to_f64(&v.y)).collect();
        let (x0, x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        let (y0, y1) = (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        let den = 1 << 12;
        let x = ratio(((x0 + rng.gen::<f64>() * (x1 - x0)) * den as f64) as i64 * 3 + 1, 3 * den);
        let y = ratio(((y0 + rng.gen::<f64>() * (y1 - y0)) * den as f64) as i64 * 3 + 1, 3 * den);
        let q = Point2::new(x, y);
        if point_in_polygon(&q, vs) == Location::Inside {
            return (p, q);
        }
    }
}

fn lipschitz() -> Outcome {
    let surfaces = vec![
        Surface::with_marked(build_torus(), &[0]).map_err(err)?,
        Surface::new(build_l_shaped()),
        Surface::new(build_chamanara(2).map_err(err)?),
        Surface::new(build_icicled(2).map_err(err)?),
        Surface::new(build_nested_cylinders(2, &default_height()).map_err(err)?),
    ];
    let probe = ratio(LIPSCHITZ_PROBE_SQ.0, LIPSCHITZ_PROBE_SQ.1);
    let step = ratio(LIPSCHITZ_STEP.0, LIPSCHITZ_STEP.1);
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let ir = |s: &Surface, p: &SurfacePoint| -> Result<Scalar, String> {
        Ok(distance_to_singularities_sq(s, p, &probe, &limits).map_err(err)?.unwrap_or_else(|| probe.clone()))
    };
    let mut pairs = 0;
    let mut unclamped = 0;
    let mut worst = f64::NEG_INFINITY;
    while pairs < LIPSCHITZ_PAIRS {
        let s = &surfaces[pairs % surfaces.len()];
        let (poly, p) = random_point(&mut rng, s.complex());
        let dir = Vec2::from_ints(rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        if dir.is_zero() {
            continue;
        }
        // Parameter with |t * dir| <= step.
        let t = ratio(rng.gen_range(1..=64), 64) * &step / Scalar::from_integer(8.into());
        let x = SurfacePoint::new(poly, p);
        let out = trace(s, &x, &dir, &t).map_err(err)?;
        let TraceOutcome::ReachedBudget { path } = out else { continue };
        let y = path.point_at(&path.total_param);
        if point_in_polygon(&y.position, &s.complex().polygon(y.polygon).vertices) != Location::Inside {
            continue;
        }
        let (a, b) = (ir(s, &x)?, ir(s, &y)?);
        if a < probe && b < probe {
            unclamped += 1;
        }
        // Straight path length bounds the surface distance from above.
        let d_sq = &t * &t * dir.norm_sq();
        let gap = Interval::from_scalar(&a).sqrt().sub(Interval::from_scalar(&b).sqrt()).abs();
        let d = Interval::from_scalar(&d_sq).sqrt();
        let excess = gap.lo - d.hi;
        worst = worst.max(excess);
        ensure(excess <= LIPSCHITZ_TOL, || {
            format!("|ir(x) - ir(y)| exceeds d by {excess:e} at {} -> {}", x.position, y.position)
        })?;
        pairs += 1;
    }
    Ok(format!("{pairs} pairs ({unclamped} below the clamp), max excess {worst:.3e}"))
}

fn cli(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_flatsurf"))
        .args(args)
        .current_dir(dir)
        .env_remove("FLATSURF_CHART_CAP")
        .output()
        .expect("run flatsurf");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let d = dir.path();
    let setup: &[&[&str]] = &[
        &["build", "icicled", "--depth", "2", "-o", "s.json"],
        &["build", "icicled", "--depth", "3", "-o", "i3.json"],
        &["build", "torus", "-o", "t.json"],
        &["build", "nested-cylinders", "--depth", "2", "-o", "n.json"],
    ];
    for args in setup {
        let (code, _) = cli(args, d);
        ensure(code == 0, || format!("{args:?} exited {code}"))?;
    }
    let commands: &[(&[&str], i32)] = &[
        (&["build", "chamanara", "--depth", "3", "--json"], 0),
        (&["validate", "s.json", "--json"], 0),
        (&["genus", "s.json", "--json"], 0),
        (&["singularities", "s.json", "--json"], 0),
        (&["saddles", "t.json", "--mark", "0", "--class", "0", "--max-len-sq", "4", "--json"], 0),
        (&["trace", "s.json", "--polygon", "0", "--point", "1/7,2/3", "--dir", "1,0", "--json"], 0),
        (&["first-return", "t.json", "--polygon", "0", "--transversal", "0,1/7:1,1/7", "--from", "1/3,1/7", "--dir", "1,5", "--json"], 0),
        (&["cut", "s.json", "--ray", "1/2,3/2:1,0", "--json"], 0),
        (&["witness", "i3.json", "--class", "3", "--target", "3", "--json"], 0),
        (&["witness", "n.json", "--class", "0", "--target", "1", "--json"], 1),
        (&["family-report", "icicled", "--depths", "1-3", "--json"], 0),
        (&["family-report", "nested-cylinders", "--depths", "1-3", "--json"], 0),
        (&["export-svg", "s.json", "--kind", "unfolding", "--polygon", "0", "--point", "1/7,2/3"], 0),
    ];
    let (_, genus) = cli(&["genus", "s.json"], d);
    ensure(!genus.is_empty(), || "genus printed nothing".into())?;
    for (args, want) in commands {
        let (c1, a) = cli(args, d);
        let (c2, b) = cli(args, d);
        ensure(c1 == *want && c2 == *want, || format!("{args:?} exited {c1}/{c2}, expected {want}"))?;
        ensure(!a.is_empty() && a == b, || format!("{args:?} output differs between runs"))?;
    }
    let rebuilt = SurfaceComplex::from_json(&std::fs::read_to_string(d.join("s.json")).map_err(err)?).map_err(err)?;
    ensure(rebuilt == build_icicled(2).map_err(err)?, || "s.json does not round-trip".into())?;
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}
