//! Straight-line flow across gluings, disk unfoldings and distances to the
//! singular set.
//!
//! Every chart places a polygon in the developing plane by a translation:
//! developed position = local position + `translation`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::analysis::Surface;
use crate::error::{Error, Result};
use crate::geometry::{
    in_ccw_sector, orientation, point_in_polygon, point_segment_distance_sq, ray_segment_intersect, segment_distance_sq,
    segment_meet, segments_within_sq, serialize_scalar, Location, Point2, RayHit, Scalar, Segment, SegmentMeet, Vec2,
};
use crate::surface::{CornerRef, EdgeRef};

/// Hard cap on the number of legs of a single trace.
pub const LEG_CAP: usize = 1_000_000;

/// Resource knobs shared by the developing engines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub chart_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { chart_cap: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SurfacePoint {
    pub polygon: usize,
    pub position: Point2,
}

impl SurfacePoint {
    pub fn new(polygon: usize, position: Point2) -> Self {
        SurfacePoint { polygon, position }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transition {
    Edge { from: EdgeRef, to: EdgeRef },
    Corner { from: CornerRef, to: CornerRef },
}

/// Straight piece of a path inside one polygon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Leg {
    pub polygon: usize,
    pub entry: Point2,
    pub exit: Point2,
    #[serde(serialize_with = "serialize_scalar")]
    pub entry_param: Scalar,
    /// Placement of this polygon copy in the developing plane of the path.
    pub offset: Vec2,
    pub exit_via: Option<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicPath {
    pub start: SurfacePoint,
    pub direction: Vec2,
    pub legs: Vec<Leg>,
    #[serde(serialize_with = "serialize_scalar")]
    pub total_param: Scalar,
}

impl GeodesicPath {
    /// Zero-length path sitting at `p`.
    pub fn point(p: SurfacePoint) -> Self {
        GeodesicPath {
            legs: vec![Leg {
                polygon: p.polygon,
                entry: p.position.clone(),
                exit: p.position.clone(),
                entry_param: Scalar::zero(),
                offset: Vec2::zero(),
                exit_via: None,
            }],
            start: p,
            direction: Vec2::from_ints(1, 0),
            total_param: Scalar::zero(),
        }
    }

    pub fn holonomy(&self) -> Vec2 {
        self.direction.scale(&self.total_param)
    }

    /// Edges crossed, in order, on the side the path leaves through.
    pub fn crossing_sequence(&self) -> Vec<EdgeRef> {
        self.legs
            .iter()
            .filter_map(|l| match &l.exit_via {
                Some(Transition::Edge { from, .. }) => Some(*from),
                _ => None,
            })
            .collect()
    }

    /// Flat vertices the path passes through, as the corner it arrives at.
    pub fn corner_passes(&self) -> Vec<CornerRef> {
        self.legs
            .iter()
            .filter_map(|l| match &l.exit_via {
                Some(Transition::Corner { from, .. }) => Some(*from),
                _ => None,
            })
            .collect()
    }

    /// Developed `(entry, exit)` of every leg.
    pub fn developed_legs(&self) -> Vec<(Point2, Point2)> {
        self.legs
            .iter()
            .map(|l| (&l.entry + &l.offset, &l.exit + &l.offset))
            .collect()
    }

    /// Surface point at parameter `s` (clamped to the path).
    pub fn point_at(&self, s: &Scalar) -> SurfacePoint {
        let s = s.clone().clamp(Scalar::zero(), self.total_param.clone());
        let idx = self
            .legs
            .iter()
            .rposition(|l| l.entry_param <= s)
            .unwrap_or(0);
        let leg = &self.legs[idx];
        SurfacePoint::new(leg.polygon, leg.entry.offset(&self.direction, &(&s - &leg.entry_param)))
    }

    /// Restriction to `[s0, s1]`, reparametrized to start at 0.
    pub fn sub_path(&self, s0: &Scalar, s1: &Scalar) -> GeodesicPath {
        let zero = Scalar::zero();
        let s0 = s0.clone().clamp(zero.clone(), self.total_param.clone());
        let s1 = s1.clone().clamp(s0.clone(), self.total_param.clone());
        let mut legs = Vec::new();
        for (i, leg) in self.legs.iter().enumerate() {
            let end = self.legs.get(i + 1).map(|l| l.entry_param.clone()).unwrap_or_else(|| self.total_param.clone());
            if end < s0 || leg.entry_param > s1 || (end == s0 && i + 1 < self.legs.len() && s0 < s1) {
                continue;
            }
            let a = leg.entry_param.clone().max(s0.clone());
            let b = end.clone().min(s1.clone());
            let entry = leg.entry.offset(&self.direction, &(&a - &leg.entry_param));
            let exit = leg.entry.offset(&self.direction, &(&b - &leg.entry_param));
            legs.push(Leg {
                polygon: leg.polygon,
                entry,
                exit,
                entry_param: &a - &s0,
                offset: leg.offset.clone(),
                exit_via: if b == end && b < s1 { leg.exit_via.clone() } else { None },
            });
            if b >= s1 {
                break;
            }
        }
        let first = &legs[0];
        GeodesicPath {
            start: SurfacePoint::new(first.polygon, first.entry.clone()),
            direction: self.direction.clone(),
            total_param: &s1 - &s0,
            legs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TraceOutcome {
    ReachedBudget {
        path: GeodesicPath,
    },
    HitSingularity {
        path: GeodesicPath,
        class: usize,
        corner: CornerRef,
    },
    HitBoundary {
        path: GeodesicPath,
        edge: EdgeRef,
    },
    Closed {
        path: GeodesicPath,
        #[serde(serialize_with = "serialize_scalar")]
        period: Scalar,
    },
}

impl TraceOutcome {
    pub fn path(&self) -> &GeodesicPath {
        match self {
            TraceOutcome::ReachedBudget { path }
            | TraceOutcome::HitSingularity { path, .. }
            | TraceOutcome::HitBoundary { path, .. }
            | TraceOutcome::Closed { path, .. } => path,
        }
    }

    pub fn into_path(self) -> GeodesicPath {
        match self {
            TraceOutcome::ReachedBudget { path }
            | TraceOutcome::HitSingularity { path, .. }
            | TraceOutcome::HitBoundary { path, .. }
            | TraceOutcome::Closed { path, .. } => path,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TraceOutcome::ReachedBudget { .. } => "reached_budget",
            TraceOutcome::HitSingularity { .. } => "hit_singularity",
            TraceOutcome::HitBoundary { .. } => "hit_boundary",
            TraceOutcome::Closed { .. } => "closed",
        }
    }

    /// The flow stopped because it is undefined beyond this point.
    pub fn is_terminal_hit(&self) -> bool {
        matches!(self, TraceOutcome::HitSingularity { .. } | TraceOutcome::HitBoundary { .. })
    }
}

/// Where a walk begins.
#[derive(Clone, Debug)]
pub(crate) enum Start {
    Point(SurfacePoint),
    /// Leaves a corner inside its sector `[out, back)`.
    Corner(CornerRef),
}

enum Event {
    Edge(usize, Point2),
    Vertex(usize),
}

enum End {
    Outcome(TraceOutcome),
    Return { point: SurfacePoint, param: Scalar },
}

struct Walker<'a> {
    surface: &'a Surface,
    dir: Vec2,
    dir_sq: Scalar,
    max_param: Scalar,
    closure: Option<SurfacePoint>,
    transversal: Option<(usize, Segment)>,
}

impl<'a> Walker<'a> {
    fn param_along(&self, from: &Point2, to: &Point2) -> Scalar {
        self.dir.dot(&(to - from)) / &self.dir_sq
    }

    fn next_event(&self, polygon: usize, pos: &Point2) -> Option<(Scalar, Event)> {
        let poly = self.surface.complex().polygon(polygon);
        let n = poly.len();
        let mut best: Option<(Scalar, Event)> = None;
        let mut consider = |t: Scalar, ev: Event| {
            let better = match &best {
                None => true,
                Some((bt, bev)) => t < *bt || (t == *bt && matches!(ev, Event::Vertex(_)) && matches!(bev, Event::Edge(..))),
            };
            if better {
                best = Some((t, ev));
            }
        };
        for e in 0..n {
            let seg = Segment {
                a: poly.vertex(e).clone(),
                b: poly.vertex(e + 1).clone(),
            };
            match ray_segment_intersect(pos, &self.dir, &seg) {
                None => {}
                Some(RayHit::Point { t, u }) => {
                    if u.is_zero() {
                        consider(t, Event::Vertex(e));
                    } else if u.is_one() {
                        consider(t, Event::Vertex((e + 1) % n));
                    } else {
                        let p = seg.at(&u);
                        consider(t, Event::Edge(e, p));
                    }
                }
                Some(RayHit::Overlap { t_enter, t_exit }) => {
                    let forward = self.dir.dot(&seg.direction()).is_positive();
                    if t_enter.is_positive() {
                        consider(t_enter, Event::Vertex(if forward { e } else { (e + 1) % n }));
                    } else {
                        consider(t_exit, Event::Vertex(if forward { (e + 1) % n } else { e }));
                    }
                }
            }
        }
        best
    }

    fn closes_on(&self, polygon: usize, a: &Point2, b: &Point2, t_a: &Scalar) -> Option<Scalar> {
        let target = self.closure.as_ref()?;
        if target.polygon != polygon {
            return None;
        }
        let p = &target.position;
        if orientation(a, b, p) != 0 {
            return None;
        }
        let s = self.param_along(a, p);
        let len = self.param_along(a, b);
        if s.is_negative() || s > len {
            return None;
        }
        let total = t_a + &s;
        total.is_positive().then_some(total)
    }

    fn crosses_transversal(&self, polygon: usize, a: &Point2, b: &Point2, t_a: &Scalar) -> Option<(Point2, Scalar)> {
        let (tp, seg) = self.transversal.as_ref()?;
        if *tp != polygon {
            return None;
        }
        let hit = if a == b {
            seg.contains(a).then(|| a.clone())
        } else {
            match segment_meet(&Segment { a: a.clone(), b: b.clone() }, seg) {
                SegmentMeet::Point(p) => Some(p),
                _ => None,
            }
        }?;
        let total = t_a + self.param_along(a, &hit);
        total.is_positive().then_some((hit, total))
    }

    fn finish_leg(
        &self,
        legs: &mut Vec<Leg>,
        polygon: usize,
        entry: Point2,
        exit: Point2,
        t: &Scalar,
        offset: &Vec2,
    ) -> Option<End> {
        let ret = self.crosses_transversal(polygon, &entry, &exit, t);
        let closed = self.closes_on(polygon, &entry, &exit, t);
        let first = match (&ret, &closed) {
            (Some((_, a)), Some(b)) => Some(if a <= b { 0 } else { 1 }),
            (Some(_), None) => Some(0),
            (None, Some(_)) => Some(1),
            (None, None) => None,
        };
        let stop_at = match first {
            Some(0) => ret.as_ref().map(|(p, _)| p.clone()),
            Some(_) => self.closure.as_ref().map(|c| c.position.clone()),
            None => None,
        };
        legs.push(Leg {
            polygon,
            entry,
            exit: stop_at.unwrap_or(exit),
            entry_param: t.clone(),
            offset: offset.clone(),
            exit_via: None,
        });
        match first {
            Some(0) => {
                let (p, s) = ret.unwrap();
                Some(End::Return {
                    point: SurfacePoint::new(polygon, p),
                    param: s,
                })
            }
            Some(_) => Some(End::Outcome(TraceOutcome::Closed {
                path: GeodesicPath {
                    start: SurfacePoint::new(0, Point2::origin()),
                    direction: self.dir.clone(),
                    legs: Vec::new(),
                    total_param: closed.clone().unwrap(),
                },
                period: closed.unwrap(),
            })),
            None => None,
        }
    }

    fn run(&self, start: Start) -> Result<(End, GeodesicPath)> {
        let s = self.surface;
        let complex = s.complex();
        let mut legs: Vec<Leg> = Vec::new();
        let mut t = Scalar::zero();
        let mut offset = Vec2::zero();
        let (start_point, mut polygon, mut pos) = match &start {
            Start::Point(p) => (p.clone(), p.polygon, p.position.clone()),
            Start::Corner(c) => {
                let v = complex.polygon(c.polygon).vertex(c.vertex).clone();
                (SurfacePoint::new(c.polygon, v.clone()), c.polygon, v)
            }
        };
        let path = |legs: Vec<Leg>, total: Scalar| GeodesicPath {
            start: start_point.clone(),
            direction: self.dir.clone(),
            legs,
            total_param: total,
        };
        if let Start::Point(p) = &start {
            // Leaving through the edge we start on.
            let poly = complex.polygon(p.polygon);
            for e in 0..poly.len() {
                let a = poly.edge_start(e);
                let b = poly.edge_end(e);
                if orientation(a, b, &p.position) == 0
                    && (Segment { a: a.clone(), b: b.clone() }).contains(&p.position)
                    && poly.edge_vector(e).cross(&self.dir).is_negative()
                {
                    let edge = EdgeRef::new(p.polygon, e);
                    match s.partner(edge) {
                        None => {
                            return Ok((
                                End::Outcome(TraceOutcome::HitBoundary {
                                    path: path(Vec::new(), Scalar::zero()),
                                    edge,
                                }),
                                path(Vec::new(), Scalar::zero()),
                            ))
                        }
                        Some(f) => {
                            let tr = s.translation(edge).unwrap();
                            pos = &pos + tr;
                            offset = &offset - tr;
                            polygon = f.polygon;
                        }
                    }
                    break;
                }
            }
        }
        loop {
            if legs.len() >= LEG_CAP {
                return Err(Error::BudgetExceeded(LEG_CAP));
            }
            let (dt, event) = self
                .next_event(polygon, &pos)
                .ok_or_else(|| Error::InvalidParameter("direction leaves the polygon".into()))?;
            let end_t = &t + &dt;
            if end_t > self.max_param {
                let rest = &self.max_param - &t;
                let exit = pos.offset(&self.dir, &rest);
                if let Some(end) = self.finish_leg(&mut legs, polygon, pos.clone(), exit, &t, &offset) {
                    return Ok(self.wrap(end, path, legs));
                }
                let total = self.max_param.clone();
                let p = path(legs, total);
                return Ok((End::Outcome(TraceOutcome::ReachedBudget { path: p.clone() }), p));
            }
            let exit_point = match &event {
                Event::Edge(_, p) => p.clone(),
                Event::Vertex(v) => complex.polygon(polygon).vertex(*v).clone(),
            };
            if let Some(end) = self.finish_leg(&mut legs, polygon, pos.clone(), exit_point.clone(), &t, &offset) {
                return Ok(self.wrap(end, path, legs));
            }
            t = end_t;
            match event {
                Event::Edge(e, p) => {
                    let edge = EdgeRef::new(polygon, e);
                    match s.partner(edge) {
                        None => {
                            let total = t.clone();
                            let pth = path(legs, total);
                            return Ok((End::Outcome(TraceOutcome::HitBoundary { path: pth.clone(), edge }), pth));
                        }
                        Some(f) => {
                            let tr = s.translation(edge).unwrap().clone();
                            legs.last_mut().unwrap().exit_via = Some(Transition::Edge { from: edge, to: f });
                            pos = &p + &tr;
                            offset = &offset - &tr;
                            polygon = f.polygon;
                            if let Some(end) = self.check_point(polygon, &pos, &t) {
                                return Ok(self.wrap(end, path, legs));
                            }
                        }
                    }
                }
                Event::Vertex(v) => {
                    let corner = CornerRef::new(polygon, v);
                    let class = s.class_of(corner);
                    if s.is_singular(class) {
                        let total = t.clone();
                        let pth = path(legs, total);
                        return Ok((
                            End::Outcome(TraceOutcome::HitSingularity {
                                path: pth.clone(),
                                class,
                                corner,
                            }),
                            pth,
                        ));
                    }
                    let next = corner_for_direction(s, class, &self.dir)
                        .ok_or_else(|| Error::InvalidSurface("flat vertex without matching sector".into()))?;
                    let here = complex.polygon(polygon).vertex(v).clone();
                    let there = complex.polygon(next.polygon).vertex(next.vertex).clone();
                    legs.last_mut().unwrap().exit_via = Some(Transition::Corner { from: corner, to: next });
                    offset = &offset - &(&there - &here);
                    polygon = next.polygon;
                    pos = there;
                    if let Some(end) = self.check_point(polygon, &pos, &t) {
                        return Ok(self.wrap(end, path, legs));
                    }
                }
            }
        }
    }

    fn check_point(&self, polygon: usize, pos: &Point2, t: &Scalar) -> Option<End> {
        if let Some((tp, seg)) = &self.transversal {
            if *tp == polygon && seg.contains(pos) {
                return Some(End::Return {
                    point: SurfacePoint::new(polygon, pos.clone()),
                    param: t.clone(),
                });
            }
        }
        if let Some(c) = &self.closure {
            if c.polygon == polygon && &c.position == pos {
                return Some(End::Outcome(TraceOutcome::Closed {
                    path: GeodesicPath {
                        start: c.clone(),
                        direction: self.dir.clone(),
                        legs: Vec::new(),
                        total_param: t.clone(),
                    },
                    period: t.clone(),
                }));
            }
        }
        None
    }

    /// Attaches the accumulated legs to an early stop.
    fn wrap(
        &self,
        end: End,
        path: impl Fn(Vec<Leg>, Scalar) -> GeodesicPath,
        legs: Vec<Leg>,
    ) -> (End, GeodesicPath) {
        match end {
            End::Outcome(TraceOutcome::Closed { period, .. }) => {
                let p = path(legs, period.clone());
                (End::Outcome(TraceOutcome::Closed { path: p.clone(), period }), p)
            }
            End::Return { point, param } => {
                let p = path(legs, param.clone());
                (End::Return { point, param }, p)
            }
            End::Outcome(o) => {
                let p = o.path().clone();
                (End::Outcome(o), p)
            }
        }
    }
}

/// Corner of `class` whose sector `[out, back)` contains `dir`.
pub fn corner_for_direction(surface: &Surface, class: usize, dir: &Vec2) -> Option<CornerRef> {
    surface.classes()[class].corners.iter().copied().find(|c| {
        let (out, back) = surface.complex().corner_sector(*c);
        in_ccw_sector(&out, &back, dir)
    })
}

fn check_point_in_polygon(surface: &Surface, p: &SurfacePoint) -> Result<Location> {
    let poly = surface
        .complex()
        .polygons
        .get(p.polygon)
        .ok_or_else(|| Error::PointOutsidePolygon(p.position.to_string(), p.polygon))?;
    let loc = point_in_polygon(&p.position, &poly.vertices);
    if loc == Location::Outside {
        return Err(Error::PointOutsidePolygon(p.position.to_string(), p.polygon));
    }
    Ok(loc)
}

fn vertex_index(surface: &Surface, p: &SurfacePoint) -> Option<usize> {
    surface.complex().polygon(p.polygon).vertices.iter().position(|v| v == &p.position)
}

/// Start for an arbitrary non-singular surface point; flat vertices pick the
/// corner whose sector contains `dir`.
pub(crate) fn resolve_start(surface: &Surface, p: &SurfacePoint, dir: &Vec2) -> Result<Option<Start>> {
    check_point_in_polygon(surface, p)?;
    match vertex_index(surface, p) {
        None => Ok(Some(Start::Point(p.clone()))),
        Some(v) => {
            let class = surface.class_of(CornerRef::new(p.polygon, v));
            if surface.is_singular(class) {
                return Ok(None);
            }
            Ok(corner_for_direction(surface, class, dir).map(Start::Corner))
        }
    }
}

fn walker<'a>(surface: &'a Surface, dir: &Vec2, max_param: &Scalar) -> Result<Walker<'a>> {
    if dir.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Ok(Walker {
        surface,
        dir: dir.clone(),
        dir_sq: dir.norm_sq(),
        max_param: max_param.clone(),
        closure: None,
        transversal: None,
    })
}

/// Follows `start + t·dir` until a singular corner, an unglued edge, a return
/// to the start point, or `t = max_param`.
pub fn trace(surface: &Surface, start: &SurfacePoint, dir: &Vec2, max_param: &Scalar) -> Result<TraceOutcome> {
    let mut w = walker(surface, dir, max_param)?;
    check_point_in_polygon(surface, start)?;
    if vertex_index(surface, start).is_some() {
        return Err(Error::StartAtCorner);
    }
    w.closure = Some(start.clone());
    let (end, _) = w.run(Start::Point(start.clone()))?;
    match end {
        End::Outcome(o) => Ok(o),
        End::Return { .. } => unreachable!("no transversal set"),
    }
}

/// Trace leaving corner `c` in direction `dir`, which must lie in its sector.
pub fn trace_from_corner(surface: &Surface, c: CornerRef, dir: &Vec2, max_param: &Scalar) -> Result<TraceOutcome> {
    let w = walker(surface, dir, max_param)?;
    let (out, back) = surface.complex().corner_sector(c);
    if !in_ccw_sector(&out, &back, dir) {
        return Err(Error::InvalidParameter(format!("direction {dir} is outside the sector of {c:?}")));
    }
    let (end, _) = w.run(Start::Corner(c))?;
    match end {
        End::Outcome(o) => Ok(o),
        End::Return { .. } => unreachable!("no transversal set"),
    }
}

pub(crate) fn trace_from(surface: &Surface, start: Start, dir: &Vec2, max_param: &Scalar) -> Result<TraceOutcome> {
    let w = walker(surface, dir, max_param)?;
    let (end, _) = w.run(start)?;
    match end {
        End::Outcome(o) => Ok(o),
        End::Return { .. } => unreachable!("no transversal set"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FirstReturn {
    pub point: SurfacePoint,
    #[serde(serialize_with = "serialize_scalar")]
    pub param: Scalar,
    pub path: GeodesicPath,
}

/// First `t > 0` at which the flow from `from` meets `transversal` again.
pub fn first_return(
    surface: &Surface,
    polygon: usize,
    transversal: &Segment,
    dir: &Vec2,
    from: &Point2,
    max_param: &Scalar,
) -> Result<Option<FirstReturn>> {
    let mut w = walker(surface, dir, max_param)?;
    if transversal.direction().cross(dir).is_zero() {
        return Err(Error::InvalidParameter("transversal is parallel to the flow".into()));
    }
    if !transversal.contains(from) {
        return Err(Error::InvalidParameter("start point is not on the transversal".into()));
    }
    let start = SurfacePoint::new(polygon, from.clone());
    let Some(s) = resolve_start(surface, &start, dir)? else {
        return Ok(None);
    };
    w.transversal = Some((polygon, transversal.clone()));
    let (end, path) = w.run(s)?;
    Ok(match end {
        End::Return { point, param } => Some(FirstReturn { point, param, path }),
        End::Outcome(_) => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DevelopedChart {
    pub polygon: usize,
    pub translation: Vec2,
    pub parent: Option<usize>,
    /// Edge of the parent polygon crossed to reach this chart.
    pub via: Option<EdgeRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityImage {
    pub class: usize,
    pub corner: CornerRef,
    pub chart: usize,
    pub position: Point2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unfolding {
    pub center: Point2,
    pub charts: Vec<DevelopedChart>,
    pub singularity_images: Vec<SingularityImage>,
}

/// Breadth-first development from `seeds`, crossing every glued edge whose
/// developed copy satisfies `near`.
pub(crate) fn develop(
    surface: &Surface,
    seeds: &[(usize, Vec2)],
    near: impl Fn(&Point2, &Point2) -> bool,
    limits: &Limits,
) -> Result<Vec<DevelopedChart>> {
    let complex = surface.complex();
    let mut charts: Vec<DevelopedChart> = Vec::new();
    let mut index: HashMap<(usize, Vec2), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for (p, t) in seeds {
        if index.contains_key(&(*p, t.clone())) {
            continue;
        }
        index.insert((*p, t.clone()), charts.len());
        queue.push_back(charts.len());
        charts.push(DevelopedChart {
            polygon: *p,
            translation: t.clone(),
            parent: None,
            via: None,
        });
    }
    while let Some(ci) = queue.pop_front() {
        let (p, t) = (charts[ci].polygon, charts[ci].translation.clone());
        let poly = complex.polygon(p);
        for e in 0..poly.len() {
            let edge = EdgeRef::new(p, e);
            let Some(f) = surface.partner(edge) else { continue };
            let a = poly.edge_start(e) + &t;
            let b = poly.edge_end(e) + &t;
            if !near(&a, &b) {
                continue;
            }
            let child_t = &t - surface.translation(edge).unwrap();
            let key = (f.polygon, child_t);
            if index.contains_key(&key) {
                continue;
            }
            if charts.len() >= limits.chart_cap {
                return Err(Error::BudgetExceeded(limits.chart_cap));
            }
            index.insert(key.clone(), charts.len());
            queue.push_back(charts.len());
            charts.push(DevelopedChart {
                polygon: f.polygon,
                translation: key.1,
                parent: Some(ci),
                via: Some(edge),
            });
        }
    }
    Ok(charts)
}

pub(crate) fn singular_images(surface: &Surface, charts: &[DevelopedChart], keep: impl Fn(&Point2) -> bool) -> Vec<SingularityImage> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (ci, chart) in charts.iter().enumerate() {
        let poly = surface.complex().polygon(chart.polygon);
        for (v, pt) in poly.vertices.iter().enumerate() {
            let corner = CornerRef::new(chart.polygon, v);
            let class = surface.class_of(corner);
            if !surface.is_singular(class) {
                continue;
            }
            let position = pt + &chart.translation;
            if !keep(&position) || seen.contains_key(&(class, position.clone())) {
                continue;
            }
            seen.insert((class, position.clone()), ());
            out.push(SingularityImage {
                class,
                corner,
                chart: ci,
                position,
            });
        }
    }
    out
}

/// Develops every polygon copy meeting the closed disk of squared radius
/// `radius_sq` around `center` and lists the singular corner images inside it.
pub fn unfold_disk(surface: &Surface, center: &SurfacePoint, radius_sq: &Scalar, limits: &Limits) -> Result<Unfolding> {
    if !radius_sq.is_positive() {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    check_point_in_polygon(surface, center)?;
    let c = center.position.clone();
    let charts = develop(
        surface,
        &[(center.polygon, Vec2::zero())],
        |a, b| segments_within_sq(&c, &c, a, b, radius_sq),
        limits,
    )?;
    let singularity_images = singular_images(surface, &charts, |p| (p - &c).norm_sq() <= *radius_sq);
    Ok(Unfolding {
        center: c,
        charts,
        singularity_images,
    })
}

/// Squared distance from `p` to the nearest singular point or unglued edge, if
/// it is at most `probe_bound_sq`.
pub fn distance_to_singularities_sq(
    surface: &Surface,
    p: &SurfacePoint,
    probe_bound_sq: &Scalar,
    limits: &Limits,
) -> Result<Option<Scalar>> {
    check_point_in_polygon(surface, p)?;
    immersion_radius_along(surface, &GeodesicPath::point(p.clone()), probe_bound_sq, limits)
}

/// Squared infimum over the path of the distance to the singular set, if it is
/// at most `probe_bound_sq`.
pub fn immersion_radius_along(
    surface: &Surface,
    path: &GeodesicPath,
    probe_bound_sq: &Scalar,
    limits: &Limits,
) -> Result<Option<Scalar>> {
    if !probe_bound_sq.is_positive() {
        return Err(Error::InvalidParameter("probe bound must be positive".into()));
    }
    let complex = surface.complex();
    // Contact inside the path's own charts.
    for leg in &path.legs {
        let poly = complex.polygon(leg.polygon);
        for v in 0..poly.len() {
            if surface.is_singular_corner(CornerRef::new(leg.polygon, v))
                && point_segment_distance_sq(poly.vertex(v), &leg.entry, &leg.exit).0.is_zero()
            {
                return Ok(Some(Scalar::zero()));
            }
        }
        for e in 0..poly.len() {
            if surface.partner(EdgeRef::new(leg.polygon, e)).is_none()
                && segment_distance_sq(poly.edge_start(e), poly.edge_end(e), &leg.entry, &leg.exit).is_zero()
            {
                return Ok(Some(Scalar::zero()));
            }
        }
    }
    let developed = path.developed_legs();
    let seeds: Vec<(usize, Vec2)> = path.legs.iter().map(|l| (l.polygon, l.offset.clone())).collect();
    let charts = develop(
        surface,
        &seeds,
        |a, b| developed.iter().any(|(p, q)| segments_within_sq(a, b, p, q, probe_bound_sq)),
        limits,
    )?;

    // Candidate targets with their plane distance and foot parameter on the path.
    let leg_lengths: Vec<Scalar> = path
        .legs
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let end = path.legs.get(i + 1).map_or(&path.total_param, |n| &n.entry_param);
            end - &l.entry_param
        })
        .collect();
    let foot = |z: &Point2| -> (Scalar, Scalar) {
        let mut best: Option<(Scalar, Scalar)> = None;
        for ((leg, (p, q)), len) in path.legs.iter().zip(&developed).zip(&leg_lengths) {
            let (d, u) = point_segment_distance_sq(z, p, q);
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, &leg.entry_param + &u * len));
            }
        }
        best.expect("path has legs")
    };
    let mut candidates: Vec<(Scalar, Scalar, Point2)> = Vec::new();
    for img in singular_images(surface, &charts, |_| true) {
        let (d, s) = foot(&img.position);
        if d <= *probe_bound_sq {
            candidates.push((d, s, img.position));
        }
    }
    for chart in &charts {
        let poly = complex.polygon(chart.polygon);
        for e in 0..poly.len() {
            if surface.partner(EdgeRef::new(chart.polygon, e)).is_some() {
                continue;
            }
            let a = poly.edge_start(e) + &chart.translation;
            let b = poly.edge_end(e) + &chart.translation;
            // Closest point of the edge to the path: the edge point nearest to the
            // closest path endpoint or leg endpoint, or a path endpoint projected.
            let mut best: Option<(Scalar, Point2)> = None;
            let mut offer = |z: Point2| {
                let (d, _) = foot(&z);
                if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                    best = Some((d, z));
                }
            };
            offer(a.clone());
            offer(b.clone());
            for (p, q) in &developed {
                for x in [p, q] {
                    let (_, u) = point_segment_distance_sq(x, &a, &b);
                    offer(a.offset(&(&b - &a), &u));
                }
            }
            if let Some((d, z)) = best {
                if d <= *probe_bound_sq {
                    let (_, s) = foot(&z);
                    candidates.push((d, s, z));
                }
            }
        }
    }
    candidates.sort();
    let mut best: Option<Scalar> = None;
    for (d, s, z) in candidates {
        if d.is_zero() {
            continue;
        }
        if let Some(b) = &best {
            if d >= *b {
                break;
            }
        }
        let from = path.point_at(&s);
        let idx = path.legs.iter().rposition(|l| l.entry_param <= s).unwrap_or(0);
        let from_dev = &from.position + &path.legs[idx].offset;
        let dir = &z - &from_dev;
        let hit = match resolve_start(surface, &from, &dir)? {
            None => Some(Scalar::zero()),
            Some(start) => match trace_from(surface, start, &dir, &Scalar::one())? {
                TraceOutcome::HitSingularity { path: p, .. } | TraceOutcome::HitBoundary { path: p, .. } => {
                    Some(&p.total_param * &p.total_param * dir.norm_sq())
                }
                _ => None,
            },
        };
        if let Some(h) = hit {
            if best.as_ref().map_or(true, |b| h < *b) {
                best = Some(h);
            }
        }
    }
    Ok(best.filter(|b| b <= probe_bound_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_icicled, build_nested_cylinders, build_torus, default_height};
    use crate::geometry::{int, ratio};
    use proptest::prelude::*;

    fn pt(x: Scalar, y: Scalar) -> Point2 {
        Point2::new(x, y)
    }

    fn torus() -> Surface {
        Surface::new(build_torus())
    }

    fn marked_torus() -> Surface {
        Surface::with_marked(build_torus(), &[0]).unwrap()
    }

    fn quarter() -> SurfacePoint {
        SurfacePoint::new(0, pt(ratio(1, 4), ratio(1, 4)))
    }

    #[test]
    fn torus_horizontal_closes() {
        let out = trace(&torus(), &quarter(), &Vec2::from_ints(1, 0), &int(2)).unwrap();
        match out {
            TraceOutcome::Closed { period, path } => {
                assert_eq!(period, int(1));
                assert_eq!(path.total_param, int(1));
                assert_eq!(path.crossing_sequence().len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn torus_diagonal_passes_flat_corner_and_closes() {
        let out = trace(&torus(), &quarter(), &Vec2::from_ints(1, 1), &int(2)).unwrap();
        assert!(matches!(out, TraceOutcome::Closed { ref period, .. } if *period == int(1)), "{out:?}");
        assert_eq!(out.path().corner_passes().len(), 1);
    }

    #[test]
    fn marked_torus_diagonal_hits_corner() {
        let out = trace(&marked_torus(), &quarter(), &Vec2::from_ints(1, 1), &int(2)).unwrap();
        match out {
            TraceOutcome::HitSingularity { path, class, .. } => {
                assert_eq!(class, 0);
                assert_eq!(path.total_param, ratio(3, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_is_respected() {
        let out = trace(&torus(), &quarter(), &Vec2::from_ints(1, 0), &ratio(1, 2)).unwrap();
        assert!(matches!(out, TraceOutcome::ReachedBudget { ref path } if path.total_param == ratio(1, 2)));
    }

    #[test]
    fn trace_rejects_corners_and_zero() {
        let s = torus();
        let corner = SurfacePoint::new(0, pt(int(1), int(0)));
        assert!(matches!(trace(&s, &corner, &Vec2::from_ints(1, 1), &int(1)), Err(Error::StartAtCorner)));
        assert!(matches!(trace(&s, &quarter(), &Vec2::zero(), &int(1)), Err(Error::ZeroDirection)));
        let outside = SurfacePoint::new(0, pt(int(2), int(2)));
        assert!(matches!(
            trace(&s, &outside, &Vec2::from_ints(1, 0), &int(1)),
            Err(Error::PointOutsidePolygon(..))
        ));
    }

    #[test]
    fn icicled_vertical_flow_dies() {
        let s = Surface::new(build_icicled(2).unwrap());
        let start = SurfacePoint::new(1, pt(ratio(1, 3), int(1)));
        let out = trace(&s, &start, &Vec2::from_ints(0, 1), &int(10)).unwrap();
        assert!(out.is_terminal_hit(), "{out:?}");
        assert!(out.path().total_param <= int(1));
    }

    fn half_vertical() -> Segment {
        Segment::new(pt(ratio(1, 2), int(0)), pt(ratio(1, 2), int(1))).unwrap()
    }

    #[test]
    fn torus_first_returns() {
        let s = torus();
        let from = pt(ratio(1, 2), ratio(1, 3));
        let r = first_return(&s, 0, &half_vertical(), &Vec2::from_ints(1, 0), &from, &int(10)).unwrap().unwrap();
        assert_eq!(r.param, int(1));
        assert_eq!(r.point.position, from);
        let r = first_return(&s, 0, &half_vertical(), &Vec2::from_ints(2, 1), &from, &int(10)).unwrap().unwrap();
        assert_eq!(r.param, ratio(1, 2));
        assert!(half_vertical().contains(&r.point.position));
        assert_eq!(r.point.position, pt(ratio(1, 2), ratio(5, 6)));
    }

    #[test]
    fn first_return_rejects_parallel_transversal() {
        let from = pt(ratio(1, 2), ratio(1, 3));
        let err = first_return(&torus(), 0, &half_vertical(), &Vec2::from_ints(0, 1), &from, &int(1));
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn icicled_vertical_first_return_is_none() {
        let s = Surface::new(build_icicled(2).unwrap());
        let mid = Segment::new(pt(ratio(1, 4), int(1)), pt(ratio(1, 2), int(1))).unwrap();
        let r = first_return(&s, 1, &mid, &Vec2::from_ints(0, 1), &pt(ratio(1, 3), int(1)), &int(10)).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn unfold_torus_disks() {
        let s = marked_torus();
        let center = SurfacePoint::new(0, pt(ratio(1, 2), ratio(1, 2)));
        let u = unfold_disk(&s, &center, &ratio(1, 2), &Limits::default()).unwrap();
        assert_eq!(u.singularity_images.len(), 4);
        for img in &u.singularity_images {
            assert_eq!((&img.position - &u.center).norm_sq(), ratio(1, 2));
        }
        let u = unfold_disk(&s, &center, &ratio(1, 4), &Limits::default()).unwrap();
        assert!(u.singularity_images.is_empty());
        let unmarked = unfold_disk(&torus(), &center, &ratio(1, 2), &Limits::default()).unwrap();
        assert!(unmarked.singularity_images.is_empty());
    }

    #[test]
    fn unfold_chart_translations_chain() {
        let s = marked_torus();
        let center = SurfacePoint::new(0, pt(ratio(1, 2), ratio(1, 2)));
        let u = unfold_disk(&s, &center, &int(4), &Limits::default()).unwrap();
        for chart in &u.charts {
            if let (Some(p), Some(via)) = (chart.parent, chart.via) {
                let parent = &u.charts[p];
                assert_eq!(chart.translation, &parent.translation - s.translation(via).unwrap());
            }
        }
        let err = unfold_disk(&s, &center, &int(4), &Limits { chart_cap: 3 });
        assert!(matches!(err, Err(Error::BudgetExceeded(3))));
    }

    #[test]
    fn nested_cylinders_slit_tip_sees_singularity() {
        let s = Surface::new(build_nested_cylinders(1, &default_height()).unwrap());
        // Midline point between the first two slit tips, 1/6 from each.
        let p = pt(ratio(2, 3), int(0));
        let polygon = s
            .complex()
            .polygons
            .iter()
            .position(|q| point_in_polygon(&p, &q.vertices) != Location::Outside)
            .unwrap();
        let near = SurfacePoint::new(polygon, p);
        let u = unfold_disk(&s, &near, &ratio(1, 30), &Limits::default()).unwrap();
        assert!(u.singularity_images.len() >= 2, "{}", u.singularity_images.len());
    }

    #[test]
    fn marked_torus_distances() {
        let s = marked_torus();
        let lim = Limits::default();
        let center = SurfacePoint::new(0, pt(ratio(1, 2), ratio(1, 2)));
        assert_eq!(distance_to_singularities_sq(&s, &center, &int(4), &lim).unwrap(), Some(ratio(1, 2)));
        assert_eq!(distance_to_singularities_sq(&s, &quarter(), &int(4), &lim).unwrap(), Some(ratio(1, 8)));
        assert_eq!(distance_to_singularities_sq(&s, &quarter(), &ratio(1, 9), &lim).unwrap(), None);
        assert_eq!(distance_to_singularities_sq(&torus(), &quarter(), &int(4), &lim).unwrap(), None);
    }

    #[test]
    fn marked_torus_path_radii() {
        let s = marked_torus();
        let lim = Limits::default();
        let horizontal = trace(&s, &SurfacePoint::new(0, pt(ratio(1, 4), ratio(1, 2))), &Vec2::from_ints(1, 0), &ratio(3, 4))
            .unwrap()
            .into_path();
        assert_eq!(immersion_radius_along(&s, &horizontal, &int(4), &lim).unwrap(), Some(ratio(1, 4)));
        let diagonal = trace(&s, &quarter(), &Vec2::from_ints(1, 1), &ratio(1, 2)).unwrap().into_path();
        assert_eq!(immersion_radius_along(&s, &diagonal, &int(4), &lim).unwrap(), Some(ratio(1, 8)));
        let into_corner = trace(&s, &quarter(), &Vec2::from_ints(1, 1), &int(1)).unwrap().into_path();
        assert_eq!(immersion_radius_along(&s, &into_corner, &int(4), &lim).unwrap(), Some(Scalar::zero()));
    }

    #[test]
    fn boundary_counts_as_singular() {
        let s = Surface::new(build_nested_cylinders(1, &default_height()).unwrap());
        let p = SurfacePoint::new(0, pt(ratio(1, 4), int(3)));
        assert_eq!(distance_to_singularities_sq(&s, &p, &int(4), &Limits::default()).unwrap(), Some(int(1)));
    }

    #[test]
    fn sub_path_restricts() {
        let path = trace(&torus(), &quarter(), &Vec2::from_ints(1, 0), &int(3)).unwrap().into_path();
        let sub = path.sub_path(&ratio(1, 2), &ratio(3, 4));
        assert_eq!(sub.total_param, ratio(1, 4));
        assert_eq!(sub.start.position, pt(ratio(3, 4), ratio(1, 4)));
        assert_eq!(sub.legs.last().unwrap().exit, pt(int(1), ratio(1, 4)));
    }

    fn oracle_torus_distance(x: &Scalar, y: &Scalar) -> Scalar {
        // Nearest integer lattice point.
        let fx = x.clone().min(int(1) - x);
        let fy = y.clone().min(int(1) - y);
        &fx * &fx + &fy * &fy
    }

    proptest! {
        #[test]
        fn developed_path_is_straight(px in 1i64..63, py in 1i64..63, dx in -5i64..=5, dy in -5i64..=5) {
            prop_assume!(dx != 0 || dy != 0);
            let s = Surface::new(crate::builders::build_l_shaped());
            let start = SurfacePoint::new(0, pt(ratio(px, 32), ratio(py, 64)));
            prop_assume!(point_in_polygon(&start.position, &s.complex().polygons[0].vertices) == Location::Inside);
            let dir = Vec2::from_ints(dx, dy);
            let out = trace(&s, &start, &dir, &int(5)).unwrap();
            let path = out.path();
            let origin = &start.position;
            let mut sum = Scalar::zero();
            for (i, ((a, b), leg)) in path.developed_legs().iter().zip(&path.legs).enumerate() {
                prop_assert!(&(a - origin).cross(&dir) == &Scalar::zero());
                prop_assert!(&(b - origin).cross(&dir) == &Scalar::zero());
                prop_assert_eq!(&leg.entry_param, &sum);
                prop_assert_eq!(&(a - origin), &dir.scale(&leg.entry_param));
                let end = path.legs.get(i + 1).map_or(path.total_param.clone(), |n| n.entry_param.clone());
                prop_assert!(end > leg.entry_param || (i == 0 && end.is_zero()));
                sum = end;
            }
            prop_assert_eq!(sum, path.total_param.clone());
        }

        #[test]
        fn marked_torus_distance_matches_lattice(px in 1i64..16, py in 1i64..16) {
            let x = ratio(px, 16);
            let y = ratio(py, 16);
            let p = SurfacePoint::new(0, pt(x.clone(), y.clone()));
            let d = distance_to_singularities_sq(&marked_torus(), &p, &int(2), &Limits::default()).unwrap();
            prop_assert_eq!(d, Some(oracle_torus_distance(&x, &y)));
        }

        #[test]
        fn distance_monotone_in_probe(px in 1i64..16, py in 1i64..16, b in 1i64..40) {
            let s = marked_torus();
            let p = SurfacePoint::new(0, pt(ratio(px, 16), ratio(py, 16)));
            let lim = Limits::default();
            let small = distance_to_singularities_sq(&s, &p, &ratio(b, 40), &lim).unwrap();
            let big = distance_to_singularities_sq(&s, &p, &ratio(b + 1, 40), &lim).unwrap();
            if let Some(v) = &small {
                prop_assert_eq!(big.as_ref(), Some(v));
            }
        }

        #[test]
        fn first_return_lands_on_transversal(py in 1i64..32, dx in 1i64..6, dy in -6i64..6) {
            let s = torus();
            let from = pt(ratio(1, 2), ratio(py, 32));
            let r = first_return(&s, 0, &half_vertical(), &Vec2::from_ints(dx, dy), &from, &int(20)).unwrap();
            let r = r.expect("rational flows on the torus return");
            prop_assert!(half_vertical().contains(&r.point.position));
            prop_assert_eq!(r.param, ratio(1, dx));
        }
    }
}
