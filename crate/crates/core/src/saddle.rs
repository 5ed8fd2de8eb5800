//! Saddle connections: enumeration by unfolding around a singular class,
//! shortest self-connections, generalized immersion radii and pairwise
//! intersection tests.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::analysis::Surface;
use crate::developing::{
    corner_for_direction, develop, immersion_radius_along, singular_images, trace_from_corner, DevelopedChart, GeodesicPath, Leg,
    Limits, TraceOutcome, Transition, Unfolding,
};
use crate::error::{Error, Result};
use crate::geometry::{
    angular_cmp, in_ccw_sector, point_segment_distance_sq, primitive_direction, segment_meet, segments_within_sq,
    serialize_scalar, Point2, Scalar, Segment, SegmentMeet, Vec2,
};
use crate::surface::{CornerRef, EdgeRef};

/// Oriented saddle connection between two singular corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaddleConnection {
    pub start_class: usize,
    pub start_corner: CornerRef,
    pub end_class: usize,
    pub end_corner: CornerRef,
    pub holonomy: Vec2,
    #[serde(serialize_with = "serialize_scalar")]
    pub length_sq: Scalar,
    pub crossing_sequence: Vec<EdgeRef>,
    #[serde(skip)]
    pub path: GeodesicPath,
}

impl SaddleConnection {
    pub fn is_loop(&self) -> bool {
        self.start_class == self.end_class
    }

    /// The same geodesic run backwards.
    pub fn reversed(&self, surface: &Surface) -> Result<SaddleConnection> {
        let dir = -&self.path.direction;
        let corner = corner_for_direction(surface, self.end_class, &dir)
            .ok_or_else(|| Error::InvalidParameter("no corner sector holds the reversed direction".into()))?;
        let out = trace_from_corner(surface, corner, &dir, &self.path.total_param)?;
        connection_from(self.end_class, corner, out)
            .ok_or_else(|| Error::InvalidParameter("connection does not replay backwards".into()))
    }
}

fn sort_key_cmp(a: &SaddleConnection, b: &SaddleConnection) -> std::cmp::Ordering {
    a.length_sq
        .cmp(&b.length_sq)
        .then_with(|| angular_cmp(&a.holonomy, &b.holonomy))
        .then_with(|| a.start_corner.cmp(&b.start_corner))
}

fn connection_from(start_class: usize, start_corner: CornerRef, out: TraceOutcome) -> Option<SaddleConnection> {
    match out {
        TraceOutcome::HitSingularity { path, class, corner } => {
            let holonomy = path.holonomy();
            Some(SaddleConnection {
                start_class,
                start_corner,
                end_class: class,
                end_corner: corner,
                length_sq: holonomy.norm_sq(),
                holonomy,
                crossing_sequence: path.crossing_sequence(),
                path,
            })
        }
        _ => None,
    }
}

fn require_singular(surface: &Surface, class: usize) -> Result<()> {
    surface.check_class(class)?;
    if !surface.is_singular(class) {
        return Err(Error::InvalidParameter(format!("class {class} is not singular; mark it first")));
    }
    Ok(())
}

/// Charts within squared distance `radius_sq` of the apex of `class`, placed
/// with the apex at the origin. Walking around the apex reaches every corner
/// of the class, so one development serves all of them.
fn develop_around(surface: &Surface, class: usize, radius_sq: &Scalar, limits: &Limits) -> Result<Vec<DevelopedChart>> {
    let corner = surface.classes()[class].corners[0];
    let apex = surface.complex().polygon(corner.polygon).vertex(corner.vertex).clone();
    let origin = Point2::origin();
    develop(
        surface,
        &[(corner.polygon, &origin - &apex)],
        |a, b| segments_within_sq(&origin, &origin, a, b, radius_sq),
        limits,
    )
}

/// Unfolding of the disk of squared radius `radius_sq` around the apex of
/// `class`, with the apex at the origin.
pub fn unfold_at_class(surface: &Surface, class: usize, radius_sq: &Scalar, limits: &Limits) -> Result<Unfolding> {
    require_singular(surface, class)?;
    if !radius_sq.is_positive() {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let charts = develop_around(surface, class, radius_sq, limits)?;
    let singularity_images = singular_images(surface, &charts, |p| p.to_vec().norm_sq() <= *radius_sq);
    Ok(Unfolding {
        center: Point2::origin(),
        charts,
        singularity_images,
    })
}

/// All oriented saddle connections leaving `class` with `length_sq <= max_len_sq`,
/// sorted by length, then direction, then start corner.
pub fn enumerate(surface: &Surface, class: usize, max_len_sq: &Scalar, limits: &Limits) -> Result<Vec<SaddleConnection>> {
    require_singular(surface, class)?;
    if !max_len_sq.is_positive() {
        return Err(Error::InvalidParameter("length bound must be positive".into()));
    }
    let complex = surface.complex();
    let charts = develop_around(surface, class, max_len_sq, limits)?;
    let mut images: BTreeSet<Vec2> = BTreeSet::new();
    for chart in &charts {
        let poly = complex.polygon(chart.polygon);
        for (v, pt) in poly.vertices.iter().enumerate() {
            if !surface.is_singular_corner(CornerRef::new(chart.polygon, v)) {
                continue;
            }
            let z = (pt + &chart.translation).to_vec();
            if !z.is_zero() && z.norm_sq() <= *max_len_sq {
                images.insert(z);
            }
        }
    }
    let mut out = Vec::new();
    for &corner in &surface.classes()[class].corners {
        let (out_dir, back_dir) = complex.corner_sector(corner);
        let out_glued = surface.partner(EdgeRef::new(corner.polygon, corner.vertex)).is_some();
        // Farthest candidate parameter per primitive direction.
        let mut directions: BTreeMap<(BigInt, BigInt), Scalar> = BTreeMap::new();
        for z in &images {
            if !in_ccw_sector(&out_dir, &back_dir, z) || (!out_glued && z.same_direction(&out_dir)) {
                continue;
            }
            let key = primitive_direction(z);
            let d = Vec2::new(Scalar::from_integer(key.0.clone()), Scalar::from_integer(key.1.clone()));
            let t = z.dot(&d) / d.norm_sq();
            let slot = directions.entry(key).or_insert_with(Scalar::zero);
            if t > *slot {
                *slot = t;
            }
        }
        for ((dx, dy), t) in directions {
            let d = Vec2::new(Scalar::from_integer(dx), Scalar::from_integer(dy));
            let res = trace_from_corner(surface, corner, &d, &t)?;
            if let Some(sc) = connection_from(class, corner, res) {
                if sc.length_sq <= *max_len_sq {
                    out.push(sc);
                }
            }
        }
    }
    out.sort_by(sort_key_cmp);
    Ok(out)
}

/// Shortest connection from `class` back to itself within the probe bound.
pub fn shortest_at(surface: &Surface, class: usize, probe_bound_sq: &Scalar, limits: &Limits) -> Result<Option<SaddleConnection>> {
    Ok(enumerate(surface, class, probe_bound_sq, limits)?
        .into_iter()
        .find(|sc| sc.end_class == class))
}

/// Shortest connection between two classes of `group` (possibly equal)
/// within the probe bound. A group stands for one singularity whose
/// truncation splits it into several classes.
pub fn shortest_in_group(surface: &Surface, group: &[usize], probe_bound_sq: &Scalar, limits: &Limits) -> Result<Option<SaddleConnection>> {
    let mut best: Option<SaddleConnection> = None;
    for &class in group {
        let found = enumerate(surface, class, probe_bound_sq, limits)?
            .into_iter()
            .find(|sc| group.contains(&sc.end_class));
        if let Some(sc) = found {
            if best.as_ref().map_or(true, |b| sort_key_cmp(&sc, b).is_lt()) {
                best = Some(sc);
            }
        }
    }
    Ok(best)
}

/// [`shortest_in_group`] with the probe bound growing by a factor of 4 from
/// `start` up to `max_bound`.
pub fn shortest_by_doubling(
    surface: &Surface,
    group: &[usize],
    start: &Scalar,
    max_bound: &Scalar,
    limits: &Limits,
) -> Result<Option<SaddleConnection>> {
    let mut bound = start.clone();
    loop {
        if let Some(sc) = shortest_in_group(surface, group, &bound, limits)? {
            return Ok(Some(sc));
        }
        if bound >= *max_bound {
            return Ok(None);
        }
        bound = (&bound * Scalar::from_integer(4.into())).min(max_bound.clone());
    }
}

/// Squared clearance radius around the apex of `class`: no other singular
/// point or unglued edge lies closer. Bounded above by `cap_sq`.
fn clearance_sq(surface: &Surface, class: usize, cap_sq: &Scalar, limits: &Limits) -> Result<Scalar> {
    let complex = surface.complex();
    let mut best = cap_sq.clone();
    if let Some(sc) = enumerate(surface, class, cap_sq, limits)?.first() {
        best = best.min(sc.length_sq.clone());
    }
    let origin = Point2::origin();
    let corners = &surface.classes()[class].corners;
    for chart in develop_around(surface, class, &best, limits)? {
        let poly = complex.polygon(chart.polygon);
        for e in 0..poly.len() {
            if surface.partner(EdgeRef::new(chart.polygon, e)).is_some() {
                continue;
            }
            let a = poly.edge_start(e) + &chart.translation;
            let b = poly.edge_end(e) + &chart.translation;
            let (d, u) = point_segment_distance_sq(&origin, &a, &b);
            if d.is_zero() || d >= best {
                continue;
            }
            // Confirm the closest point is reached straight from the apex.
            let z = a.offset(&(&b - &a), &u).to_vec();
            for &c in corners {
                let (out, back) = complex.corner_sector(c);
                if !in_ccw_sector(&out, &back, &z) {
                    continue;
                }
                let hit = trace_from_corner(surface, c, &z, &Scalar::one())?;
                if hit.is_terminal_hit() {
                    let t = &hit.path().total_param;
                    best = best.min(t * t * z.norm_sq());
                }
            }
        }
    }
    Ok(best)
}

/// Certified lower bound on the squared generalized immersion radius of `sc`,
/// maximized over trims `delta = (i / 2^depth) * length`.
pub fn generalized_ir(surface: &Surface, sc: &SaddleConnection, grid_depth: u32, limits: &Limits) -> Result<Scalar> {
    for class in [sc.start_class, sc.end_class] {
        if !surface.cone(class)?.wider_than_half_turn() {
            return Err(Error::NarrowRotationalComponent { class });
        }
    }
    if grid_depth == 0 || grid_depth > 62 {
        return Err(Error::InvalidParameter(format!("grid depth {grid_depth} out of range")));
    }
    let len_sq = &sc.length_sq;
    let mut rho_sq = clearance_sq(surface, sc.start_class, len_sq, limits)?;
    if sc.end_class != sc.start_class {
        rho_sq = rho_sq.min(clearance_sq(surface, sc.end_class, len_sq, limits)?);
    }
    // Largest i <= 2^(D-1) with (i / 2^D)^2 * len_sq <= rho_sq / 4.
    let scale = BigInt::from(1u64) << (2 * grid_depth as usize);
    let limit = &rho_sq * Scalar::from_integer(scale) / (Scalar::from_integer(4.into()) * len_sq);
    let mut i = BigInt::from(1u64) << (grid_depth as usize - 1);
    let sqrt_floor = limit.floor().to_integer().sqrt();
    if sqrt_floor < i {
        i = sqrt_floor;
    }
    if i.is_zero() {
        return Ok(Scalar::zero());
    }
    let s = Scalar::new(i, BigInt::from(1u64) << grid_depth as usize);
    let delta_sq = &s * &s * len_sq;
    let total = &sc.path.total_param;
    let middle = sc.path.sub_path(&(&s * total), &((Scalar::from_integer(1.into()) - &s) * total));
    let ir = immersion_radius_along(surface, &middle, &delta_sq, limits)?;
    Ok(match ir {
        Some(v) => v.min(delta_sq),
        None => delta_sq,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionVerdict {
    pub disjoint: bool,
    pub first_offending: Option<(usize, usize)>,
}

/// Legs of `sc` per polygon, with legs lying on a glued edge copied to the
/// partner polygon.
fn legs_by_polygon(surface: &Surface, sc: &SaddleConnection) -> Vec<(usize, Point2, Point2)> {
    let complex = surface.complex();
    let mut out = Vec::new();
    for Leg { polygon, entry, exit, .. } in &sc.path.legs {
        out.push((*polygon, entry.clone(), exit.clone()));
        let poly = complex.polygon(*polygon);
        for e in 0..poly.len() {
            let seg = Segment {
                a: poly.edge_start(e).clone(),
                b: poly.edge_end(e).clone(),
            };
            if entry != exit && seg.contains(entry) && seg.contains(exit) {
                if let (Some(f), Some(t)) = (surface.partner(EdgeRef::new(*polygon, e)), surface.translation(EdgeRef::new(*polygon, e))) {
                    out.push((f.polygon, entry + t, exit + t));
                }
            }
        }
    }
    out
}

fn flat_passes(surface: &Surface, sc: &SaddleConnection) -> Vec<usize> {
    sc.path
        .legs
        .iter()
        .filter_map(|l| match &l.exit_via {
            Some(Transition::Corner { from, .. }) => Some(surface.class_of(*from)),
            _ => None,
        })
        .collect()
}

fn pair_meets_off_singularity(surface: &Surface, a: &SaddleConnection, b: &SaddleConnection) -> bool {
    let complex = surface.complex();
    let fa = flat_passes(surface, a);
    if flat_passes(surface, b).iter().any(|c| fa.contains(c)) {
        return true;
    }
    let la = legs_by_polygon(surface, a);
    let lb = legs_by_polygon(surface, b);
    let singular_vertex = |polygon: usize, p: &Point2| {
        complex
            .polygon(polygon)
            .vertices
            .iter()
            .enumerate()
            .any(|(v, q)| q == p && surface.is_singular_corner(CornerRef::new(polygon, v)))
    };
    for (pa, a0, a1) in &la {
        for (pb, b0, b1) in &lb {
            if pa != pb {
                continue;
            }
            let sa = Segment { a: a0.clone(), b: a1.clone() };
            let sb = Segment { a: b0.clone(), b: b1.clone() };
            match segment_meet(&sa, &sb) {
                SegmentMeet::None => {}
                SegmentMeet::Point(p) => {
                    if !singular_vertex(*pa, &p) {
                        return true;
                    }
                }
                SegmentMeet::Overlap(..) => return true,
            }
        }
    }
    false
}

/// Whether the connections pairwise meet only at singular points.
pub fn intersect_only_at_singularity(surface: &Surface, set: &[SaddleConnection]) -> IntersectionVerdict {
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if pair_meets_off_singularity(surface, &set[i], &set[j]) {
                return IntersectionVerdict {
                    disjoint: false,
                    first_offending: Some((i, j)),
                };
            }
        }
    }
    IntersectionVerdict {
        disjoint: true,
        first_offending: None,
    }
}
