//! Polygons glued along parallel edges by translations.
//!
//! Edge `i` of a polygon runs from vertex `i` to vertex `i + 1` (cyclically) and
//! polygons are counterclockwise, so the interior is always on the left. Two
//! edges can be glued only when their edge vectors are opposite; the gluing
//! translation maps the start of one edge onto the end of the other.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{doubled_area, in_ccw_sector, is_simple, parse_scalar, scalar_to_string, Point2, Vec2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePolygon {
    pub id: usize,
    pub vertices: Vec<Point2>,
}

impl SurfacePolygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Point2 {
        &self.vertices[i % self.vertices.len()]
    }

    pub fn edge_start(&self, e: usize) -> &Point2 {
        self.vertex(e)
    }

    pub fn edge_end(&self, e: usize) -> &Point2 {
        self.vertex(e + 1)
    }

    pub fn edge_vector(&self, e: usize) -> Vec2 {
        self.edge_end(e) - self.edge_start(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(polygon: usize, edge: usize) -> Self {
        EdgeRef { polygon, edge }
    }
}

/// A polygon corner, identified by polygon and vertex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CornerRef {
    pub polygon: usize,
    pub vertex: usize,
}

impl CornerRef {
    pub fn new(polygon: usize, vertex: usize) -> Self {
        CornerRef { polygon, vertex }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GluedPair {
    pub a: EdgeRef,
    pub b: EdgeRef,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
}

/// Polygons plus translation gluings. Immutable once built; use
/// [`crate::Surface`] for the derived structure the engines need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceComplex {
    pub polygons: Vec<SurfacePolygon>,
    pub gluings: Vec<GluedPair>,
    pub metadata: Metadata,
}

/// Corners identified by chains of edge gluings, in rotational order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClass {
    pub class_id: usize,
    /// Interior classes: one full counterclockwise cycle. Boundary classes:
    /// the chain from the corner whose outgoing edge is unglued to the one whose
    /// incoming edge is unglued.
    pub corners: Vec<CornerRef>,
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeKind {
    /// Total angle `2π·multiplicity`; multiplicity 1 is a flat point.
    InteriorCone { multiplicity: usize },
    /// Sector chain between two unglued edges. The swept angle lies in
    /// `[half_turns·π, (half_turns + 1)·π)`; `exact_multiple` marks equality.
    Boundary {
        half_turns: usize,
        exact_multiple: bool,
        sectors: Vec<CornerRef>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeData {
    pub class_id: usize,
    #[serde(flatten)]
    pub kind: ConeKind,
}

impl ConeData {
    pub fn multiplicity(&self) -> Option<usize> {
        match self.kind {
            ConeKind::InteriorCone { multiplicity } => Some(multiplicity),
            ConeKind::Boundary { .. } => None,
        }
    }

    /// Total angle strictly greater than π.
    pub fn wider_than_half_turn(&self) -> bool {
        match &self.kind {
            ConeKind::InteriorCone { .. } => true,
            ConeKind::Boundary {
                half_turns,
                exact_multiple,
                ..
            } => *half_turns >= 2 || (*half_turns == 1 && !exact_multiple),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Genus {
    Closed { genus: i64 },
    WithBoundary { genus: i64, boundary_cycles: usize },
}

impl Genus {
    pub fn value(&self) -> i64 {
        match *self {
            Genus::Closed { genus } | Genus::WithBoundary { genus, .. } => genus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SurfaceComplex {
    /// Builds a complex and rejects it unless [`SurfaceComplex::validate`] is clean.
    pub fn new(polygons: Vec<SurfacePolygon>, gluings: Vec<GluedPair>, metadata: Metadata) -> Result<Self> {
        let complex = SurfaceComplex::new_unchecked(polygons, gluings, metadata);
        let report = complex.validate();
        if !report.is_valid() {
            return Err(Error::InvalidSurface(report.violations.join("; ")));
        }
        Ok(complex)
    }

    pub fn new_unchecked(polygons: Vec<SurfacePolygon>, mut gluings: Vec<GluedPair>, metadata: Metadata) -> Self {
        for g in &mut gluings {
            if g.b < g.a {
                std::mem::swap(&mut g.a, &mut g.b);
            }
        }
        gluings.sort();
        SurfaceComplex {
            polygons,
            gluings,
            metadata,
        }
    }

    pub fn polygon(&self, id: usize) -> &SurfacePolygon {
        &self.polygons[id]
    }

    pub fn edge_count(&self) -> usize {
        self.polygons.iter().map(|p| p.len()).sum()
    }

    /// Partner of every edge, indexed `[polygon][edge]`.
    pub fn partner_table(&self) -> Vec<Vec<Option<EdgeRef>>> {
        let mut table: Vec<Vec<Option<EdgeRef>>> = self.polygons.iter().map(|p| vec![None; p.len()]).collect();
        for g in &self.gluings {
            if g.a.polygon < table.len()
                && g.b.polygon < table.len()
                && g.a.edge < table[g.a.polygon].len()
                && g.b.edge < table[g.b.polygon].len()
            {
                table[g.a.polygon][g.a.edge] = Some(g.b);
                table[g.b.polygon][g.b.edge] = Some(g.a);
            }
        }
        table
    }

    /// Translation carrying points of edge `e` onto its partner.
    pub fn gluing_translation(&self, e: EdgeRef, partner: EdgeRef) -> Vec2 {
        let src = self.polygon(e.polygon).edge_start(e.edge);
        let dst = self.polygon(partner.polygon).edge_end(partner.edge);
        dst - src
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, poly) in self.polygons.iter().enumerate() {
            if poly.id != i {
                violations.push(format!("polygon at position {i} has id {}", poly.id));
            }
            if poly.len() < 3 {
                violations.push(format!("polygon {i} has fewer than 3 vertices"));
                continue;
            }
            if !doubled_area(&poly.vertices).is_positive() {
                violations.push(format!("polygon {i} is not counterclockwise with positive area"));
            }
            if !is_simple(&poly.vertices) {
                violations.push(format!("polygon {i} is not simple"));
            }
        }
        let mut seen = BTreeSet::new();
        for g in &self.gluings {
            let mut ok = true;
            for e in [g.a, g.b] {
                if e.polygon >= self.polygons.len() || e.edge >= self.polygons[e.polygon].len() {
                    violations.push(format!("gluing references missing edge {e:?}"));
                    ok = false;
                } else if !seen.insert(e) {
                    violations.push(format!("edge {e:?} is glued more than once"));
                }
            }
            if !ok {
                continue;
            }
            if g.a == g.b {
                violations.push(format!("edge {:?} is glued to itself", g.a));
                continue;
            }
            let va = self.polygon(g.a.polygon).edge_vector(g.a.edge);
            let vb = self.polygon(g.b.polygon).edge_vector(g.b.edge);
            if &va + &vb != Vec2::zero() {
                if va.cross(&vb).is_zero() {
                    violations.push(format!(
                        "edges {:?} and {:?} are parallel but differ in length or orientation",
                        g.a, g.b
                    ));
                } else {
                    violations.push(format!("edges {:?} and {:?} are not parallel", g.a, g.b));
                }
            }
        }
        if !self.polygons.is_empty() && self.face_components() > 1 {
            violations.push("complex is disconnected".to_string());
        }
        ValidationReport { violations }
    }

    /// Number of connected components of the face-adjacency graph.
    pub fn face_components(&self) -> usize {
        let mut uf = UnionFind::new(self.polygons.len());
        for g in &self.gluings {
            if g.a.polygon < self.polygons.len() && g.b.polygon < self.polygons.len() {
                uf.union(g.a.polygon, g.b.polygon);
            }
        }
        uf.count()
    }

    /// Corner partition induced by the gluings, ordered by smallest member.
    pub fn vertex_classes(&self) -> Vec<VertexClass> {
        let partner = self.partner_table();
        let mut class_of: BTreeMap<CornerRef, usize> = BTreeMap::new();
        let mut classes = Vec::new();
        for (p, poly) in self.polygons.iter().enumerate() {
            for v in 0..poly.len() {
                let c = CornerRef::new(p, v);
                if class_of.contains_key(&c) {
                    continue;
                }
                let (corners, boundary) = self.corner_cycle(c, &partner);
                let id = classes.len();
                for k in &corners {
                    class_of.insert(*k, id);
                }
                classes.push(VertexClass {
                    class_id: id,
                    corners,
                    boundary,
                });
            }
        }
        classes
    }

    /// Rotational walk around the vertex of `start`.
    fn corner_cycle(&self, start: CornerRef, partner: &[Vec<Option<EdgeRef>>]) -> (Vec<CornerRef>, bool) {
        // Rewind clockwise until a boundary edge or the cycle closes.
        let mut first = start;
        let mut boundary = false;
        loop {
            match self.cw_neighbor(first, partner) {
                Some(prev) if prev == start => break,
                Some(prev) => first = prev,
                None => {
                    boundary = true;
                    break;
                }
            }
        }
        let mut corners = vec![first];
        let mut cur = first;
        while let Some(next) = self.ccw_neighbor(cur, partner) {
            if next == first {
                break;
            }
            corners.push(next);
            cur = next;
        }
        (corners, boundary)
    }

    /// Corner reached by rotating counterclockwise across the incoming edge.
    pub(crate) fn ccw_neighbor(&self, c: CornerRef, partner: &[Vec<Option<EdgeRef>>]) -> Option<CornerRef> {
        let n = self.polygon(c.polygon).len();
        let incoming = (c.vertex + n - 1) % n;
        partner[c.polygon][incoming].map(|e| CornerRef::new(e.polygon, e.edge))
    }

    /// Corner reached by rotating clockwise across the outgoing edge.
    pub(crate) fn cw_neighbor(&self, c: CornerRef, partner: &[Vec<Option<EdgeRef>>]) -> Option<CornerRef> {
        partner[c.polygon][c.vertex].map(|e| {
            let m = self.polygon(e.polygon).len();
            CornerRef::new(e.polygon, (e.edge + 1) % m)
        })
    }

    /// Outgoing edge direction and reversed incoming edge direction of a corner:
    /// the corner sector is the counterclockwise range `[out, back)`.
    pub fn corner_sector(&self, c: CornerRef) -> (Vec2, Vec2) {
        let poly = self.polygon(c.polygon);
        let n = poly.len();
        let here = poly.vertex(c.vertex);
        let out = poly.vertex(c.vertex + 1) - here;
        let back = poly.vertex(c.vertex + n - 1) - here;
        (out, back)
    }

    /// Exact cone data: counts how often the swept sectors pass a reference direction.
    pub fn cone_data(&self, class: &VertexClass) -> ConeData {
        if !class.boundary {
            let reference = Vec2::from_ints(1, 0);
            let multiplicity = class
                .corners
                .iter()
                .filter(|c| {
                    let (from, to) = self.corner_sector(**c);
                    in_ccw_sector(&from, &to, &reference)
                })
                .count();
            return ConeData {
                class_id: class.class_id,
                kind: ConeKind::InteriorCone { multiplicity },
            };
        }
        let (start, _) = self.corner_sector(class.corners[0]);
        let opposite = -&start;
        // Sectors are swept in order; count the multiples of π strictly inside the total angle.
        let mut inside = 0;
        for (i, c) in class.corners.iter().enumerate() {
            let (from, to) = self.corner_sector(*c);
            if i > 0 && in_ccw_sector(&from, &to, &start) {
                inside += 1;
            }
            if in_ccw_sector(&from, &to, &opposite) {
                inside += 1;
            }
        }
        let (_, last_back) = self.corner_sector(*class.corners.last().unwrap());
        let exact_multiple = last_back.cross(&start).is_zero();
        ConeData {
            class_id: class.class_id,
            kind: ConeKind::Boundary {
                half_turns: inside + usize::from(exact_multiple),
                exact_multiple,
                sectors: class.corners.clone(),
            },
        }
    }

    pub fn cone_multiplicities(&self) -> Vec<ConeData> {
        self.vertex_classes().iter().map(|c| self.cone_data(c)).collect()
    }

    pub fn unglued_edges(&self) -> Vec<EdgeRef> {
        let partner = self.partner_table();
        let mut out = Vec::new();
        for (p, row) in partner.iter().enumerate() {
            for (e, q) in row.iter().enumerate() {
                if q.is_none() {
                    out.push(EdgeRef::new(p, e));
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.unglued_edges().is_empty()
    }

    /// `χ = V − E + F`, each glued pair and each unglued edge counting once.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertex_classes().len() as i64;
        let e = (self.gluings.len() + self.unglued_edges().len()) as i64;
        let f = self.polygons.len() as i64;
        v - e + f
    }

    /// Number of boundary circles formed by the unglued edges.
    pub fn boundary_cycles(&self) -> usize {
        let unglued = self.unglued_edges();
        if unglued.is_empty() {
            return 0;
        }
        let index: BTreeMap<EdgeRef, usize> = unglued.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let classes = self.vertex_classes();
        let mut uf = UnionFind::new(unglued.len());
        for class in classes.iter().filter(|c| c.boundary) {
            // Chain starts with an unglued outgoing edge and ends with an unglued incoming edge.
            let first = class.corners[0];
            let last = *class.corners.last().unwrap();
            let n = self.polygon(last.polygon).len();
            let outgoing = EdgeRef::new(first.polygon, first.vertex);
            let incoming = EdgeRef::new(last.polygon, (last.vertex + n - 1) % n);
            if let (Some(&a), Some(&b)) = (index.get(&outgoing), index.get(&incoming)) {
                uf.union(a, b);
            }
        }
        uf.count()
    }

    pub fn genus(&self) -> Result<Genus> {
        let chi = self.euler_characteristic();
        let b = self.boundary_cycles();
        let twice = 2 - chi - b as i64;
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::NonIntegerGenus { chi, boundary: b });
        }
        let genus = twice / 2;
        Ok(if b == 0 {
            Genus::Closed { genus }
        } else {
            Genus::WithBoundary {
                genus,
                boundary_cycles: b,
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SurfaceJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SurfaceJson = serde_json::from_str(text)?;
        raw.into_complex()
    }
}

/// On-disk form: rationals as `"p/q"` strings, translations derived on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceJson {
    pub polygons: Vec<PolygonJson>,
    pub gluings: Vec<GluingJson>,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonJson {
    pub id: usize,
    pub vertices: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluingJson {
    pub a: [usize; 2],
    pub b: [usize; 2],
}

impl From<&SurfaceComplex> for SurfaceJson {
    fn from(c: &SurfaceComplex) -> Self {
        SurfaceJson {
            polygons: c
                .polygons
                .iter()
                .map(|p| PolygonJson {
                    id: p.id,
                    vertices: p
                        .vertices
                        .iter()
                        .map(|v| [scalar_to_string(&v.x), scalar_to_string(&v.y)])
                        .collect(),
                })
                .collect(),
            gluings: c
                .gluings
                .iter()
                .map(|g| GluingJson {
                    a: [g.a.polygon, g.a.edge],
                    b: [g.b.polygon, g.b.edge],
                })
                .collect(),
            metadata: c.metadata.clone(),
        }
    }
}

impl SurfaceJson {
    pub fn into_complex(self) -> Result<SurfaceComplex> {
        let mut polygons = Vec::with_capacity(self.polygons.len());
        for p in self.polygons {
            let vertices = p
                .vertices
                .iter()
                .map(|[x, y]| Ok(Point2::new(parse_scalar(x)?, parse_scalar(y)?)))
                .collect::<Result<Vec<_>>>()?;
            polygons.push(SurfacePolygon { id: p.id, vertices });
        }
        polygons.sort_by_key(|p| p.id);
        let gluings = self
            .gluings
            .iter()
            .map(|g| GluedPair {
                a: EdgeRef::new(g.a[0], g.a[1]),
                b: EdgeRef::new(g.b[0], g.b[1]),
            })
            .collect();
        Ok(SurfaceComplex::new_unchecked(polygons, gluings, self.metadata))
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_chamanara, build_icicled, build_l_shaped, build_nested_cylinders, build_torus};
    use crate::geometry::{int, ratio, Scalar};
    use proptest::prelude::*;

    fn square(id: usize) -> SurfacePolygon {
        SurfacePolygon {
            id,
            vertices: vec![
                Point2::from_ints(0, 0),
                Point2::from_ints(1, 0),
                Point2::from_ints(1, 1),
                Point2::from_ints(0, 1),
            ],
        }
    }

    fn pair(a: (usize, usize), b: (usize, usize)) -> GluedPair {
        GluedPair {
            a: EdgeRef::new(a.0, a.1),
            b: EdgeRef::new(b.0, b.1),
        }
    }

    #[test]
    fn validate_examples() {
        assert!(build_torus().validate().is_valid());
        let skew = SurfaceComplex::new_unchecked(vec![square(0)], vec![pair((0, 0), (0, 3))], Metadata::default());
        let report = skew.validate();
        assert!(report.violations.iter().any(|v| v.contains("not parallel")), "{report:?}");
        let two = SurfaceComplex::new_unchecked(
            vec![square(0), square(1)],
            vec![pair((0, 0), (0, 2)), pair((0, 1), (0, 3)), pair((1, 0), (1, 2)), pair((1, 1), (1, 3))],
            Metadata::default(),
        );
        assert!(two.validate().violations.iter().any(|v| v.contains("disconnected")));
        let dup = SurfaceComplex::new_unchecked(vec![square(0)], vec![pair((0, 0), (0, 2)), pair((0, 2), (0, 0))], Metadata::default());
        assert!(dup.validate().violations.iter().any(|v| v.contains("more than once")));
        let mut cw = square(0);
        cw.vertices.reverse();
        let bad = SurfaceComplex::new_unchecked(vec![cw], vec![], Metadata::default());
        assert!(!bad.validate().is_valid());
        assert!(SurfaceComplex::new(vec![square(0)], vec![pair((0, 0), (0, 3))], Metadata::default()).is_err());
    }

    #[test]
    fn torus_classes_and_genus() {
        let t = build_torus();
        let classes = t.vertex_classes();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].corners.len(), 4);
        assert_eq!(t.euler_characteristic(), 0);
        assert_eq!(t.genus().unwrap(), Genus::Closed { genus: 1 });
    }

    #[test]
    fn unglued_square() {
        let s = SurfaceComplex::new_unchecked(vec![square(0)], vec![], Metadata::default());
        let classes = s.vertex_classes();
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.boundary && c.corners.len() == 1));
        assert_eq!(s.euler_characteristic(), 1);
        assert_eq!(s.boundary_cycles(), 1);
        assert_eq!(
            s.genus().unwrap(),
            Genus::WithBoundary {
                genus: 0,
                boundary_cycles: 1
            }
        );
        for c in &classes {
            let cone = s.cone_data(c);
            assert_eq!(
                cone.kind,
                ConeKind::Boundary {
                    half_turns: 0,
                    exact_multiple: false,
                    sectors: c.corners.clone()
                }
            );
            assert!(!cone.wider_than_half_turn());
        }
    }

    #[test]
    fn cylinder_boundary_angles_are_half_turns() {
        // Unit square with only left and right glued: two boundary circles.
        let c = SurfaceComplex::new_unchecked(vec![square(0)], vec![pair((0, 1), (0, 3))], Metadata::default());
        assert_eq!(c.vertex_classes().len(), 2);
        assert_eq!(c.boundary_cycles(), 2);
        assert_eq!(c.genus().unwrap().value(), 0);
        for cone in c.cone_multiplicities() {
            match cone.kind {
                ConeKind::Boundary {
                    half_turns,
                    exact_multiple,
                    ..
                } => {
                    assert_eq!(half_turns, 1);
                    assert!(exact_multiple);
                }
                _ => panic!("expected boundary class"),
            }
        }
    }

    #[test]
    fn l_shaped_cone_angle_from_corner_angles() {
        // Independent oracle: sum the corner angles in quarter turns.
        let l = build_l_shaped();
        let p = &l.polygons[0];
        let mut quarter_turns = 0;
        for v in 0..p.len() {
            let (out, back) = l.corner_sector(CornerRef::new(0, v));
            let turn = out.cross(&back);
            quarter_turns += if turn.is_positive() {
                1
            } else if turn.is_zero() {
                2
            } else {
                3
            };
        }
        assert_eq!(quarter_turns, 12);
        let classes = l.vertex_classes();
        assert_eq!(l.cone_data(&classes[0]).multiplicity(), Some(quarter_turns / 4));
    }

    #[test]
    fn icicled_depth_one_has_separate_top_and_bottom_classes() {
        let c = build_icicled(1).unwrap();
        let classes = c.vertex_classes();
        let class_at = |x: Scalar, y: Scalar| {
            let target = Point2::new(x, y);
            classes
                .iter()
                .find(|k| k.corners.iter().any(|cr| c.polygon(cr.polygon).vertex(cr.vertex) == &target))
                .unwrap()
                .class_id
        };
        let top = class_at(ratio(1, 2), ratio(3, 2));
        let bottom = class_at(ratio(1, 2), ratio(1, 2));
        assert_ne!(top, bottom);
        // The top class sweeps at least two full turns.
        match &c.cone_data(&classes[top]).kind {
            ConeKind::Boundary { half_turns, .. } => assert!(*half_turns >= 4, "{half_turns}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gauss_bonnet_on_closed_outputs() {
        let mut closed = vec![build_torus(), build_l_shaped()];
        for n in 1..=4 {
            closed.push(build_chamanara(n).unwrap());
        }
        for c in closed {
            assert!(c.is_closed());
            let g = c.genus().unwrap().value();
            let excess: i64 = c.cone_multiplicities().iter().map(|k| k.multiplicity().unwrap() as i64 - 1).sum();
            assert_eq!(excess, 2 * g - 2, "{}", c.metadata.name);
        }
    }

    #[test]
    fn classes_partition_corners() {
        for c in [build_l_shaped(), build_icicled(3).unwrap(), build_nested_cylinders(2, &int(2)).unwrap()] {
            let mut seen = BTreeSet::new();
            for k in c.vertex_classes() {
                for corner in k.corners {
                    assert!(seen.insert(corner));
                }
            }
            assert_eq!(seen.len(), c.edge_count());
        }
    }

    #[test]
    fn json_round_trip() {
        for c in [build_torus(), build_chamanara(3).unwrap(), build_nested_cylinders(2, &ratio(5, 2)).unwrap()] {
            let text = c.to_json().unwrap();
            let back = SurfaceComplex::from_json(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.to_json().unwrap(), text);
        }
    }

    /// Splits edge `e` of polygon 0 of a one-polygon complex and its partner at their midpoints.
    fn refine(c: &SurfaceComplex, e: usize) -> SurfaceComplex {
        let partner = c.partner_table()[0][e].expect("glued edge");
        let mut poly = c.polygons[0].clone();
        let mid = |p: &SurfacePolygon, k: usize| {
            let a = p.edge_start(k);
            let v = p.edge_vector(k);
            a + &v.scale(&ratio(1, 2))
        };
        let (first, second) = if e < partner.edge { (e, partner.edge) } else { (partner.edge, e) };
        let m2 = mid(&poly, second);
        let m1 = mid(&poly, first);
        poly.vertices.insert(second + 1, m2);
        poly.vertices.insert(first + 1, m1);
        // Old edge k maps to k, or k + 1 after the first insertion, or k + 2 after both.
        let shift = |k: usize| if k <= first { k } else if k <= second { k + 1 } else { k + 2 };
        let mut gluings = Vec::new();
        for g in &c.gluings {
            let (a, b) = (g.a.edge, g.b.edge);
            if (a == first && b == second) || (a == second && b == first) {
                let (sa, sb) = (shift(first), shift(second));
                gluings.push(GluedPair { a: EdgeRef::new(0, sa), b: EdgeRef::new(0, sb + 1) });
                gluings.push(GluedPair { a: EdgeRef::new(0, sa + 1), b: EdgeRef::new(0, sb) });
            } else {
                gluings.push(GluedPair { a: EdgeRef::new(0, shift(a)), b: EdgeRef::new(0, shift(b)) });
            }
        }
        SurfaceComplex::new_unchecked(vec![poly], gluings, c.metadata.clone())
    }

    proptest! {
        #[test]
        fn euler_characteristic_invariant_under_edge_refinement(which in 0usize..3, edge in 0usize..64) {
            let c = match which {
                0 => build_torus(),
                1 => build_l_shaped(),
                _ => build_chamanara(2).unwrap(),
            };
            let e = edge % c.polygons[0].len();
            let r = refine(&c, e);
            prop_assert!(r.validate().is_valid(), "{:?}", r.validate());
            prop_assert_eq!(r.euler_characteristic(), c.euler_characteristic());
        }
    }
}
