//! Cutting along saddle connections, the left-to-right connectivity test,
//! the greedy infinite-genus witness and per-depth family reports.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::analysis::Surface;
use crate::builders::{Family, FamilySpec};
use crate::developing::{trace_from_corner, Limits, TraceOutcome};
use crate::error::{Error, Result};
use crate::geometry::{
    in_ccw_sector, insert_on_boundary, int, point_in_polygon, ratio, serialize_scalar, split_polygon, Location, Point2,
    Scalar, Segment, Vec2,
};
use crate::saddle::{enumerate, generalized_ir, intersect_only_at_singularity, shortest_by_doubling, SaddleConnection};
use crate::surface::{ConeKind, CornerRef, EdgeRef, GluedPair, Genus, Metadata, SurfaceComplex, SurfacePolygon};

/// Where the two copies of one cut connection ended up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutSides {
    pub left_face: usize,
    pub right_face: usize,
    pub left_component: usize,
    pub right_component: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub pieces: SurfaceComplex,
    pub component_count: usize,
    /// Component of every piece.
    pub component_of: Vec<usize>,
    /// Original polygon every piece came from.
    pub origin: Vec<usize>,
    pub side_map: Vec<CutSides>,
    /// Pairs of boundary copies created by the cut, one per cut segment.
    pub cut_pairs: Vec<GluedPair>,
}

impl CutResult {
    /// The cut complex with its cut copies glued back.
    pub fn reglue(&self) -> SurfaceComplex {
        let mut gluings = self.pieces.gluings.clone();
        gluings.extend(self.cut_pairs.iter().copied());
        SurfaceComplex::new_unchecked(self.pieces.polygons.clone(), gluings, self.pieces.metadata.clone())
    }
}

/// One straight piece of a connection inside an original polygon.
struct CutLeg {
    connection: usize,
    a: Point2,
    b: Point2,
}

fn is_on_edge(poly: &SurfacePolygon, a: &Point2, b: &Point2) -> Option<usize> {
    (0..poly.len()).find(|&e| {
        let s = Segment {
            a: poly.edge_start(e).clone(),
            b: poly.edge_end(e).clone(),
        };
        s.contains(a) && s.contains(b)
    })
}

/// Cuts `surface` open along every connection of `set`.
pub fn cut_along(surface: &Surface, set: &[SaddleConnection]) -> Result<CutResult> {
    let verdict = intersect_only_at_singularity(surface, set);
    if let Some((i, j)) = verdict.first_offending {
        return Err(Error::SetIntersects(i, j));
    }
    let complex = surface.complex();
    let np = complex.polygons.len();

    // Legs split into chords and runs along edges.
    let mut chords: Vec<Vec<CutLeg>> = (0..np).map(|_| Vec::new()).collect();
    let mut edge_runs: Vec<(usize, usize, Point2, Point2)> = Vec::new();
    for (ci, sc) in set.iter().enumerate() {
        for leg in &sc.path.legs {
            if leg.entry == leg.exit {
                continue;
            }
            let poly = complex.polygon(leg.polygon);
            if is_on_edge(poly, &leg.entry, &leg.exit).is_some() {
                edge_runs.push((ci, leg.polygon, leg.entry.clone(), leg.exit.clone()));
            } else {
                chords[leg.polygon].push(CutLeg {
                    connection: ci,
                    a: leg.entry.clone(),
                    b: leg.exit.clone(),
                });
            }
        }
    }

    // Split every polygon along its chords; remember chord copies per side.
    let mut pieces: Vec<Vec<Point2>> = Vec::new();
    let mut origin: Vec<usize> = Vec::new();
    // (piece, a, b, connection, left side)
    let mut chord_copies: Vec<(usize, Point2, Point2, usize, bool)> = Vec::new();
    for (p, poly) in complex.polygons.iter().enumerate() {
        let mut local: Vec<Vec<Point2>> = vec![poly.vertices.clone()];
        let mut copies: Vec<(usize, Point2, Point2, usize, bool)> = Vec::new();
        for leg in &chords[p] {
            let seg = Segment {
                a: leg.a.clone(),
                b: leg.b.clone(),
            };
            let mid = seg.at(&ratio(1, 2));
            let idx = local
                .iter()
                .position(|v| point_in_polygon(&mid, v) == Location::Inside)
                .ok_or(Error::ChordNotInterior)?;
            let (left, right) = split_polygon(&local[idx], &seg)?;
            let right_idx = local.len();
            local[idx] = left;
            local.push(right);
            // Earlier copies lying on the right piece move with it.
            for c in copies.iter_mut().filter(|c| c.0 == idx) {
                if contains_segment(&local[right_idx], &c.1, &c.2) && !contains_segment(&local[idx], &c.1, &c.2) {
                    c.0 = right_idx;
                }
            }
            copies.push((idx, leg.a.clone(), leg.b.clone(), leg.connection, true));
            copies.push((right_idx, leg.b.clone(), leg.a.clone(), leg.connection, false));
        }
        let base = pieces.len();
        for (i, a, b, c, left) in copies {
            chord_copies.push((base + i, a, b, c, left));
        }
        for v in local {
            pieces.push(v);
            origin.push(p);
        }
    }

    // Common refinement of every original edge and its partner.
    let piece_ids_of: Vec<Vec<usize>> = (0..np)
        .map(|p| (0..pieces.len()).filter(|&i| origin[i] == p).collect())
        .collect();
    let mut breaks: Vec<Vec<BTreeSet<Point2>>> = complex.polygons.iter().map(|q| vec![BTreeSet::new(); q.len()]).collect();
    for (i, piece) in pieces.iter().enumerate() {
        let poly = complex.polygon(origin[i]);
        for v in piece {
            for e in 0..poly.len() {
                if on_closed_edge(poly, e, v) {
                    breaks[origin[i]][e].insert(v.clone());
                }
            }
        }
    }
    for (p, poly) in complex.polygons.iter().enumerate() {
        for e in 0..poly.len() {
            let edge = EdgeRef::new(p, e);
            if let (Some(f), Some(t)) = (surface.partner(edge), surface.translation(edge)) {
                let moved: Vec<Point2> = breaks[p][e].iter().map(|x| x + t).collect();
                breaks[f.polygon][f.edge].extend(moved);
            }
        }
    }
    for (p, poly) in complex.polygons.iter().enumerate() {
        for e in 0..poly.len() {
            for x in breaks[p][e].clone() {
                for &i in &piece_ids_of[p] {
                    if on_piece_boundary(&pieces[i], &x) {
                        insert_on_boundary(&mut pieces[i], &x);
                    }
                }
            }
        }
    }

    let polygons: Vec<SurfacePolygon> = pieces
        .iter()
        .enumerate()
        .map(|(id, v)| SurfacePolygon { id, vertices: v.clone() })
        .collect();

    // Locate piece edges by original polygon and endpoints.
    let mut edge_index: BTreeMap<(usize, Point2, Point2), EdgeRef> = BTreeMap::new();
    for (i, poly) in polygons.iter().enumerate() {
        for e in 0..poly.len() {
            edge_index.insert(
                (origin[i], poly.edge_start(e).clone(), poly.edge_end(e).clone()),
                EdgeRef::new(i, e),
            );
        }
    }
    let cut_runs: BTreeSet<(usize, Point2, Point2)> = edge_runs
        .iter()
        .flat_map(|(_, p, a, b)| [(*p, a.clone(), b.clone()), (*p, b.clone(), a.clone())])
        .collect();
    let is_cut = |p: usize, a: &Point2, b: &Point2| {
        cut_runs.iter().any(|(q, x, y)| {
            *q == p && {
                let s = Segment { a: x.clone(), b: y.clone() };
                s.contains(a) && s.contains(b)
            }
        })
    };

    let mut gluings = Vec::new();
    let mut cut_pairs = Vec::new();
    let mut done = BTreeSet::new();
    for (i, poly) in polygons.iter().enumerate() {
        let p = origin[i];
        let orig = complex.polygon(p);
        for e in 0..poly.len() {
            let a = poly.edge_start(e);
            let b = poly.edge_end(e);
            let Some(oe) = (0..orig.len()).find(|&k| on_closed_edge(orig, k, a) && on_closed_edge(orig, k, b)) else {
                continue;
            };
            let here = EdgeRef::new(i, e);
            if done.contains(&here) {
                continue;
            }
            let oedge = EdgeRef::new(p, oe);
            let (Some(f), Some(t)) = (surface.partner(oedge), surface.translation(oedge)) else {
                continue;
            };
            let key = (f.polygon, b + t, a + t);
            let there = *edge_index
                .get(&key)
                .ok_or_else(|| Error::InvalidSurface("edge refinement mismatch".into()))?;
            done.insert(here);
            done.insert(there);
            let pair = GluedPair { a: here, b: there };
            let cut_here = is_cut(p, a, b) || is_cut(f.polygon, &(b + t), &(a + t));
            if cut_here {
                cut_pairs.push(pair);
            } else {
                gluings.push(pair);
            }
        }
    }

    // Chord copies pair up left with right.
    let mut side_faces: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); set.len()];
    let mut left_copies: BTreeMap<(usize, Point2, Point2), EdgeRef> = BTreeMap::new();
    for (piece, a, b, c, left) in &chord_copies {
        let e = piece_edge(&polygons[*piece], a, b).ok_or_else(|| Error::InvalidSurface("lost chord copy".into()))?;
        if *left {
            left_copies.insert((*c, a.clone(), b.clone()), EdgeRef::new(*piece, e));
            side_faces[*c].0.get_or_insert(*piece);
        } else {
            side_faces[*c].1.get_or_insert(*piece);
        }
    }
    for (piece, a, b, c, left) in &chord_copies {
        if *left {
            continue;
        }
        let e = piece_edge(&polygons[*piece], a, b).expect("checked above");
        let l = left_copies[&(*c, b.clone(), a.clone())];
        cut_pairs.push(GluedPair {
            a: l,
            b: EdgeRef::new(*piece, e),
        });
    }
    // Runs along original edges: the polygon whose edge runs with the
    // connection lies on its left.
    for (c, p, a, b) in &edge_runs {
        let poly = complex.polygon(*p);
        let oe = is_on_edge(poly, a, b).expect("classified as a run");
        let forward = poly.edge_vector(oe).dot(&(b - a)).is_positive();
        let oedge = EdgeRef::new(*p, oe);
        let own = piece_containing_segment(&polygons, &origin, *p, a, b);
        let other = match (surface.partner(oedge), surface.translation(oedge)) {
            (Some(f), Some(t)) => piece_containing_segment(&polygons, &origin, f.polygon, &(a + t), &(b + t)),
            _ => None,
        };
        let (l, r) = if forward { (own, other) } else { (other, own) };
        if let Some(l) = l {
            side_faces[*c].0.get_or_insert(l);
        }
        if let Some(r) = r {
            side_faces[*c].1.get_or_insert(r);
        }
    }

    let pieces_complex = SurfaceComplex::new_unchecked(
        polygons,
        gluings,
        Metadata {
            name: format!("{} cut", complex.metadata.name),
            family: complex.metadata.family.clone(),
            depth: complex.metadata.depth,
        },
    );
    let component_of = components(&pieces_complex);
    let component_count = component_of.iter().collect::<BTreeSet<_>>().len();
    let side_map = side_faces
        .iter()
        .map(|(l, r)| {
            let l = l.unwrap_or(0);
            let r = r.unwrap_or(l);
            CutSides {
                left_face: l,
                right_face: r,
                left_component: component_of[l],
                right_component: component_of[r],
            }
        })
        .collect();
    if complex.is_closed() && !set.is_empty() {
        let endpoints: BTreeSet<usize> = set.iter().flat_map(|s| [s.start_class, s.end_class]).collect();
        debug_assert_eq!(
            pieces_complex.euler_characteristic(),
            complex.euler_characteristic() - endpoints.len() as i64 + set.len() as i64,
            "cutting a closed surface along a graph"
        );
    }
    Ok(CutResult {
        pieces: pieces_complex,
        component_count,
        component_of,
        origin,
        side_map,
        cut_pairs,
    })
}

fn on_closed_edge(poly: &SurfacePolygon, e: usize, p: &Point2) -> bool {
    Segment {
        a: poly.edge_start(e).clone(),
        b: poly.edge_end(e).clone(),
    }
    .contains(p)
}

fn on_piece_boundary(ring: &[Point2], p: &Point2) -> bool {
    point_in_polygon(p, ring) == Location::Boundary
}

fn contains_segment(ring: &[Point2], a: &Point2, b: &Point2) -> bool {
    let n = ring.len();
    (0..n).any(|i| {
        let s = Segment {
            a: ring[i].clone(),
            b: ring[(i + 1) % n].clone(),
        };
        s.contains(a) && s.contains(b)
    })
}

fn piece_edge(poly: &SurfacePolygon, a: &Point2, b: &Point2) -> Option<usize> {
    (0..poly.len()).find(|&e| poly.edge_start(e) == a && poly.edge_end(e) == b)
}

fn piece_containing_segment(polygons: &[SurfacePolygon], origin: &[usize], p: usize, a: &Point2, b: &Point2) -> Option<usize> {
    polygons
        .iter()
        .enumerate()
        .find(|(i, q)| origin[*i] == p && contains_segment(&q.vertices, a, b))
        .map(|(i, _)| i)
}

/// Component label of every polygon, numbered by first appearance.
fn components(complex: &SurfaceComplex) -> Vec<usize> {
    let n = complex.polygons.len();
    let mut adj = vec![Vec::new(); n];
    for g in &complex.gluings {
        adj[g.a.polygon].push(g.b.polygon);
        adj[g.b.polygon].push(g.a.polygon);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Shortest face path between two pieces of a cut complex.
fn face_path(complex: &SurfaceComplex, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = complex.polygons.len();
    let mut adj = vec![BTreeSet::new(); n];
    for g in &complex.gluings {
        adj[g.a.polygon].insert(g.b.polygon);
        adj[g.b.polygon].insert(g.a.polygon);
    }
    let mut prev = vec![usize::MAX; n];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut x = to;
            while x != from {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for &v in &adj[u] {
            if prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationVerdict {
    pub non_separating: bool,
    pub component_count: usize,
    /// Per connection, a face path in the cut complex from its left copy to
    /// its right copy, when one exists.
    pub witness: Vec<Option<Vec<usize>>>,
}

/// Whether removing `set` leaves the surface connected with every cut's two
/// sides joined.
pub fn is_non_separating(surface: &Surface, set: &[SaddleConnection]) -> Result<SeparationVerdict> {
    let cut = cut_along(surface, set)?;
    let witness: Vec<Option<Vec<usize>>> = cut
        .side_map
        .iter()
        .map(|s| face_path(&cut.pieces, s.left_face, s.right_face))
        .collect();
    let non_separating = cut.component_count == 1 && witness.iter().all(Option::is_some);
    Ok(SeparationVerdict {
        non_separating,
        component_count: cut.component_count,
        witness,
    })
}

/// Vertex class of the corner sitting at `point`, if any.
pub fn class_at(surface: &Surface, point: &Point2) -> Option<usize> {
    surface.complex().polygons.iter().enumerate().find_map(|(p, poly)| {
        poly.vertices
            .iter()
            .position(|v| v == point)
            .map(|v| surface.class_of(CornerRef::new(p, v)))
    })
}

/// Saddle connection leaving the corner at `point` in direction `dir`.
pub fn connection_from_point(surface: &Surface, point: &Point2, dir: &Vec2, max_param: &Scalar) -> Result<Option<SaddleConnection>> {
    let complex = surface.complex();
    let corner = complex.polygons.iter().enumerate().find_map(|(p, poly)| {
        poly.vertices.iter().enumerate().find_map(|(v, q)| {
            let c = CornerRef::new(p, v);
            let (out, back) = complex.corner_sector(c);
            (q == point && in_ccw_sector(&out, &back, dir)).then_some(c)
        })
    });
    let Some(corner) = corner else {
        return Ok(None);
    };
    let start_class = surface.class_of(corner);
    Ok(match trace_from_corner(surface, corner, dir, max_param)? {
        TraceOutcome::HitSingularity { path, class, corner: end } => {
            let holonomy = path.holonomy();
            Some(SaddleConnection {
                start_class,
                start_corner: corner,
                end_class: class,
                end_corner: end,
                length_sq: holonomy.norm_sq(),
                holonomy,
                crossing_sequence: path.crossing_sequence(),
                path,
            })
        }
        _ => None,
    })
}

/// Tip of the longest icicle in the upper half of an icicled truncation.
pub fn icicle_tip() -> Point2 {
    Point2::new(ratio(1, 2), ratio(3, 2))
}

/// The class a family report and the witness follow: the top icicle tip for
/// icicled truncations, otherwise the interior class of largest angle.
pub fn primary_class(surface: &Surface, family: Option<Family>) -> Option<usize> {
    if family == Some(Family::Icicled) {
        return class_at(surface, &icicle_tip());
    }
    surface
        .cones()
        .iter()
        .filter(|c| surface.is_singular(c.class_id))
        .filter_map(|c| c.multiplicity().map(|k| (k, c.class_id)))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, c)| c)
}

/// Classes that together make up the primary singularity. On icicled
/// truncations the top boundary pieces stay separate classes, but all of them
/// and every top tip are one point of the completion.
pub fn primary_group(surface: &Surface, family: Option<Family>) -> Vec<usize> {
    if family == Some(Family::Icicled) {
        let one = int(1);
        return surface
            .singular_classes()
            .into_iter()
            .filter(|&c| {
                surface.classes()[c]
                    .corners
                    .iter()
                    .any(|k| surface.complex().polygon(k.polygon).vertex(k.vertex).y > one)
            })
            .collect();
    }
    primary_class(surface, family).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessBudget {
    /// Longest connection considered, squared.
    #[serde(serialize_with = "serialize_scalar")]
    pub max_len_sq: Scalar,
    pub grid_depth: u32,
    pub chart_cap: usize,
}

impl Default for WitnessBudget {
    fn default() -> Self {
        WitnessBudget {
            max_len_sq: int(1),
            grid_depth: 6,
            chart_cap: Limits::default().chart_cap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    /// No further connection keeps the set disjoint and non-separating.
    ExhaustedAtDepth,
    /// The first connection already separates.
    Separating,
    NoSelfConnection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub holonomy: Vec2,
    #[serde(serialize_with = "serialize_scalar")]
    pub length_sq: Scalar,
    /// Squared budget in force when this connection was chosen.
    #[serde(serialize_with = "serialize_scalar")]
    pub budget_sq: Scalar,
    /// The connection is strictly shorter than the budget.
    pub within_budget: bool,
    /// The prefix ending here is non-separating.
    pub non_separating: bool,
    pub witness: Vec<Option<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub class: usize,
    pub target: usize,
    pub steps: Vec<WitnessStep>,
    pub verified: usize,
    pub genus_lower_bound: usize,
    pub stop: StopReason,
    #[serde(skip)]
    pub connections: Vec<SaddleConnection>,
}

impl WitnessReport {
    pub fn reached_target(&self) -> bool {
        self.stop == StopReason::TargetReached
    }
}

/// Greedy search for `target` pairwise disjoint self-connections of `class`
/// whose union is non-separating.
pub fn witness_infinite_genus(surface: &Surface, class: usize, target: usize, budget: &WitnessBudget) -> Result<WitnessReport> {
    let limits = Limits {
        chart_cap: budget.chart_cap,
    };
    let mut candidates: Vec<SaddleConnection> = enumerate(surface, class, &budget.max_len_sq, &limits)?
        .into_iter()
        .filter(|s| s.end_class == class)
        .collect();
    let report = |steps: Vec<WitnessStep>, chosen: Vec<SaddleConnection>, stop| {
        let verified = steps.iter().take_while(|s| s.non_separating).count();
        WitnessReport {
            class,
            target,
            verified,
            genus_lower_bound: verified.div_ceil(2),
            steps,
            stop,
            connections: chosen,
        }
    };
    if candidates.is_empty() {
        return Ok(report(Vec::new(), Vec::new(), StopReason::NoSelfConnection));
    }
    let mut chosen: Vec<SaddleConnection> = Vec::new();
    let mut steps: Vec<WitnessStep> = Vec::new();
    let mut budget_sq = budget.max_len_sq.clone();
    while chosen.len() < target {
        // Connections below the budget first, then the rest in length order.
        let order: Vec<usize> = {
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                (0..candidates.len()).partition(|&i| candidates[i].length_sq < budget_sq);
            inside.into_iter().chain(outside).collect()
        };
        let mut picked = None;
        for i in order {
            let mut trial = chosen.clone();
            trial.push(candidates[i].clone());
            if !intersect_only_at_singularity(surface, &trial).disjoint {
                continue;
            }
            let verdict = is_non_separating(surface, &trial)?;
            if verdict.non_separating {
                picked = Some((i, verdict));
                break;
            }
            if chosen.is_empty() {
                // The shortest connection separates on its own.
                steps.push(WitnessStep {
                    holonomy: candidates[i].holonomy.clone(),
                    length_sq: candidates[i].length_sq.clone(),
                    budget_sq: budget_sq.clone(),
                    within_budget: candidates[i].length_sq < budget_sq,
                    non_separating: false,
                    witness: verdict.witness,
                });
                let all_separate = candidates.iter().all(|c| {
                    is_non_separating(surface, std::slice::from_ref(c)).map_or(true, |v| !v.non_separating)
                });
                if all_separate {
                    return Ok(report(steps, vec![candidates[i].clone()], StopReason::Separating));
                }
                steps.pop();
            }
        }
        let Some((i, verdict)) = picked else {
            return Ok(report(steps, chosen, StopReason::ExhaustedAtDepth));
        };
        let sc = candidates.remove(i);
        steps.push(WitnessStep {
            holonomy: sc.holonomy.clone(),
            length_sq: sc.length_sq.clone(),
            budget_sq: budget_sq.clone(),
            within_budget: sc.length_sq < budget_sq,
            non_separating: verdict.non_separating,
            witness: verdict.witness,
        });
        chosen.push(sc);
        // The next connection should be shorter than every generalized radius so far.
        budget_sq = chosen
            .iter()
            .map(|c| generalized_ir(surface, c, budget.grid_depth, &limits))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("nonempty");
    }
    Ok(report(steps, chosen, StopReason::TargetReached))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub class: usize,
    pub kind: ConeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyRow {
    pub depth: u32,
    pub genus: Genus,
    pub singularities: Vec<ClassSummary>,
    pub primary_class: Option<usize>,
    /// Classes forming the primary singularity.
    pub primary_group: Vec<usize>,
    pub primary_multiplicity: Option<usize>,
    #[serde(serialize_with = "crate::geometry::serialize_opt_scalar")]
    pub shortest_self_connection_sq: Option<Scalar>,
    pub witness_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyTrends {
    pub genus_strictly_increasing: bool,
    pub genus_constant: bool,
    pub shortest_nonincreasing: bool,
    /// Consecutive ratios of the shortest squared lengths.
    #[serde(serialize_with = "crate::geometry::serialize_opt_scalars")]
    pub shortest_ratios: Vec<Option<Scalar>>,
    pub multiplicity_increasing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub rows: Vec<FamilyRow>,
    pub trends: FamilyTrends,
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Largest squared length probed for the shortest self-connection.
    pub probe_max_sq: Scalar,
    /// Run the witness with this target; skipped when `None`.
    pub witness_target: Option<usize>,
    pub witness_budget: WitnessBudget,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            probe_max_sq: int(4),
            witness_target: None,
            witness_budget: WitnessBudget::default(),
        }
    }
}

/// Per-depth genus, singularities, shortest self-connection and witness size.
pub fn family_report(family: Family, depths: &[u32], options: &ReportOptions) -> Result<FamilyReport> {
    if depths.is_empty() {
        return Err(Error::InvalidParameter("no depths requested".into()));
    }
    let limits = Limits {
        chart_cap: options.witness_budget.chart_cap,
    };
    let mut rows = Vec::new();
    for &depth in depths {
        let complex = FamilySpec::new(family, depth).build()?;
        let genus = complex.genus()?;
        let mut surface = Surface::new(complex);
        if family == Family::Torus {
            surface.mark(0)?;
        }
        let singularities = surface
            .cones()
            .iter()
            .filter(|c| surface.is_singular(c.class_id))
            .map(|c| ClassSummary {
                class: c.class_id,
                kind: c.kind.clone(),
            })
            .collect();
        let primary = primary_class(&surface, Some(family));
        let group = primary_group(&surface, Some(family));
        let shortest = shortest_by_doubling(&surface, &group, &ratio(1, 1 << 12), &options.probe_max_sq, &limits)?
            .map(|s| s.length_sq);
        let witness_size = match (primary, options.witness_target) {
            (Some(class), Some(t)) => Some(witness_infinite_genus(&surface, class, t, &options.witness_budget)?.verified),
            _ => None,
        };
        rows.push(FamilyRow {
            depth,
            genus,
            singularities,
            primary_class: primary,
            primary_group: group,
            primary_multiplicity: primary.and_then(|c| surface.cones()[c].multiplicity()),
            shortest_self_connection_sq: shortest,
            witness_size,
        });
    }
    let genus: Vec<i64> = rows.iter().map(|r| r.genus.value()).collect();
    let shortest: Vec<Option<&Scalar>> = rows.iter().map(|r| r.shortest_self_connection_sq.as_ref()).collect();
    let mult: Vec<Option<usize>> = rows.iter().map(|r| r.primary_multiplicity).collect();
    let trends = FamilyTrends {
        genus_strictly_increasing: genus.windows(2).all(|w| w[0] < w[1]),
        genus_constant: genus.windows(2).all(|w| w[0] == w[1]),
        shortest_nonincreasing: shortest.windows(2).all(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => b <= a,
            _ => false,
        }),
        shortest_ratios: shortest
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (Some(a), Some(b)) if !a.is_zero() => Some(b / a),
                _ => None,
            })
            .collect(),
        multiplicity_increasing: mult.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a < b)),
    };
    Ok(FamilyReport {
        family: family.name().to_string(),
        rows,
        trends,
    })
}
