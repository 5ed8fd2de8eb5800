//! Constructors for the calibration surfaces and the finite truncations of the
//! three parametric families.
//!
//! Chamanara truncation at depth `n`: the unit square with the bottom and right
//! sides cut at `1/2, 3/4, ..., 1 - 2^-n` and the top and left sides at
//! `1/2, 1/4, ..., 2^-n`. On both axes the far piece of length `2^-k` is glued
//! to the near piece of the same length, and the far leftover `[1 - 2^-n, 1]`
//! to the near leftover `[0, 2^-n]`.
//!
//! Icicled truncation at depth `n`: the rectangle `[0,1] x [0,2]` with left and
//! right sides glued, cut into columns of width `2^-n`. Column sides carry the
//! icicle slits of every level `m <= n`. For the top, with `L(x)` / `R(x)` the
//! left / right side of the slit at `x` and depths measured down from `y = 2`:
//!
//! * `L(1/2)[1/4, 1/2]` to `R(1/4)`;
//! * `L(i/2^m)` to `R((i-2)/2^m)` for odd `3 <= i <= 2^(m-1) - 1`;
//! * `L(1/2^(m-1))` lower half to `R((2^(m-1)-1)/2^m)`, upper half to
//!   `R(1/2)[2^-m, 2^-(m-1)]`, for `3 <= m <= n`;
//! * at the last level `L(1/2^n)` upper half goes to `R(1/2)[2^-(n+1), 2^-n]`
//!   and lower half to the remaining `R(1/2)[0, 2^-(n+1)]`.
//!
//! The right half of the top is the mirror image under `x -> 1 - x` (left and
//! right sides exchanged) and the bottom is the mirror image under
//! `y -> 2 - y`. Top and bottom edges stay unglued.
//!
//! Nested cylinders at depth `n` and height `h`: slit positions
//! `s_0 = 1/2`, `s_k = s_(k-1) + 1/(k+2)`; even-indexed slits point up and
//! odd-indexed ones point down. The strip `[0, s_2n] x [-h, h]` is cut along the
//! midline and at every slit; above the midline the walls `0, s_0, s_2, ...,
//! s_2n` bound cylinders whose two walls are glued, and likewise below with
//! `0, s_1, s_3, ..., s_2n`. The horizontal edges at `y = ±h` stay unglued.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dyadic, int, ratio, Point2, Scalar};
use crate::surface::{EdgeRef, GluedPair, Metadata, SurfaceComplex, SurfacePolygon};

/// Largest accepted truncation depth.
pub const MAX_DEPTH: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Torus,
    LShaped,
    Chamanara,
    Icicled,
    NestedCylinders,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Torus => "torus",
            Family::LShaped => "l_shaped",
            Family::Chamanara => "chamanara",
            Family::Icicled => "icicled",
            Family::NestedCylinders => "nested_cylinders",
        }
    }

    pub fn parametric(&self) -> bool {
        matches!(self, Family::Chamanara | Family::Icicled | Family::NestedCylinders)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "torus" => Ok(Family::Torus),
            "l_shaped" | "l" => Ok(Family::LShaped),
            "chamanara" | "baker" => Ok(Family::Chamanara),
            "icicled" => Ok(Family::Icicled),
            "nested_cylinders" | "nested" => Ok(Family::NestedCylinders),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub depth: u32,
    /// Slit height of the nested cylinders; ignored elsewhere.
    pub height: Scalar,
}

impl FamilySpec {
    pub fn new(family: Family, depth: u32) -> Self {
        FamilySpec {
            family,
            depth,
            height: default_height(),
        }
    }

    pub fn build(&self) -> Result<SurfaceComplex> {
        match self.family {
            Family::Torus => Ok(build_torus()),
            Family::LShaped => Ok(build_l_shaped()),
            Family::Chamanara => build_chamanara(self.depth),
            Family::Icicled => build_icicled(self.depth),
            Family::NestedCylinders => build_nested_cylinders(self.depth, &self.height),
        }
    }
}

pub fn default_height() -> Scalar {
    int(4)
}

fn check_depth(n: u32) -> Result<()> {
    if (1..=MAX_DEPTH).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidDepth(n))
    }
}

fn metadata(name: &str, family: Family, depth: Option<u32>) -> Metadata {
    Metadata {
        name: name.to_string(),
        family: Some(family.name().to_string()),
        depth,
    }
}

fn glue(a: (usize, usize), b: (usize, usize)) -> GluedPair {
    GluedPair {
        a: EdgeRef::new(a.0, a.1),
        b: EdgeRef::new(b.0, b.1),
    }
}

fn polygon(id: usize, pts: &[(i64, i64)]) -> SurfacePolygon {
    SurfacePolygon {
        id,
        vertices: pts.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect(),
    }
}

fn finish(polygons: Vec<SurfacePolygon>, gluings: Vec<GluedPair>, meta: Metadata) -> SurfaceComplex {
    let complex = SurfaceComplex::new_unchecked(polygons, gluings, meta);
    debug_assert!(complex.validate().is_valid(), "{:?}", complex.validate());
    complex
}

pub fn build_torus() -> SurfaceComplex {
    let square = polygon(0, &[(0, 0), (1, 0), (1, 1), (0, 1)]);
    finish(
        vec![square],
        vec![glue((0, 0), (0, 2)), glue((0, 1), (0, 3))],
        metadata("torus", Family::Torus, None),
    )
}

pub fn build_l_shaped() -> SurfaceComplex {
    let l = polygon(0, &[(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2), (0, 1)]);
    finish(
        vec![l],
        vec![
            glue((0, 0), (0, 5)),
            glue((0, 1), (0, 3)),
            glue((0, 2), (0, 7)),
            glue((0, 4), (0, 6)),
        ],
        metadata("l_shaped", Family::LShaped, None),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

/// Axis-parallel rectangle with extra vertices on its sides.
struct CutRect {
    vertices: Vec<Point2>,
    edges: Vec<(Side, Scalar, Scalar)>,
}

impl CutRect {
    /// Cut coordinates are x for horizontal sides and y for vertical ones; any
    /// order, endpoints and duplicates are ignored.
    fn new(x0: &Scalar, x1: &Scalar, y0: &Scalar, y1: &Scalar, cuts: [&[Scalar]; 4]) -> Self {
        let inner = |c: &[Scalar], lo: &Scalar, hi: &Scalar| -> Vec<Scalar> {
            let set: BTreeSet<Scalar> = c.iter().filter(|v| *v > lo && *v < hi).cloned().collect();
            set.into_iter().collect()
        };
        let [bottom, right, top, left] = cuts;
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut push_side = |side: Side, from: Scalar, stops: Vec<Scalar>, to: Scalar, pt: &dyn Fn(&Scalar) -> Point2| {
            let mut prev = from;
            for s in stops.into_iter().chain(std::iter::once(to)) {
                vertices.push(pt(&prev));
                let (lo, hi) = if prev < s { (prev.clone(), s.clone()) } else { (s.clone(), prev.clone()) };
                edges.push((side, lo, hi));
                prev = s;
            }
        };
        push_side(Side::Bottom, x0.clone(), inner(bottom, x0, x1), x1.clone(), &|x| Point2::new(x.clone(), y0.clone()));
        push_side(Side::Right, y0.clone(), inner(right, y0, y1), y1.clone(), &|y| Point2::new(x1.clone(), y.clone()));
        let mut t = inner(top, x0, x1);
        t.reverse();
        push_side(Side::Top, x1.clone(), t, x0.clone(), &|x| Point2::new(x.clone(), y1.clone()));
        let mut l = inner(left, y0, y1);
        l.reverse();
        push_side(Side::Left, y1.clone(), l, y0.clone(), &|y| Point2::new(x0.clone(), y.clone()));
        CutRect { vertices, edges }
    }

    fn edge(&self, side: Side, lo: &Scalar, hi: &Scalar) -> usize {
        self.edges
            .iter()
            .position(|(s, a, b)| *s == side && a == lo && b == hi)
            .unwrap_or_else(|| panic!("no {side:?} edge [{lo}, {hi}]"))
    }

    fn into_polygon(self, id: usize) -> SurfacePolygon {
        SurfacePolygon {
            id,
            vertices: self.vertices,
        }
    }
}

pub fn build_chamanara(n: u32) -> Result<SurfaceComplex> {
    check_depth(n)?;
    let one = int(1);
    let zero = int(0);
    let far_cuts: Vec<Scalar> = (1..=n).map(|k| &one - dyadic(k)).collect();
    let near_cuts: Vec<Scalar> = (1..=n).map(dyadic).collect();
    let rect = CutRect::new(&zero, &one, &zero, &one, [&far_cuts, &far_cuts, &near_cuts, &near_cuts]);
    let mut gluings = Vec::new();
    for (a, b) in [(Side::Bottom, Side::Top), (Side::Right, Side::Left)] {
        for k in 1..=n {
            let lo = &one - dyadic(k - 1);
            let hi = &one - dyadic(k);
            gluings.push(glue((0, rect.edge(a, &lo, &hi)), (0, rect.edge(b, &dyadic(k), &dyadic(k - 1)))));
        }
        gluings.push(glue((0, rect.edge(a, &(&one - dyadic(n)), &one)), (0, rect.edge(b, &zero, &dyadic(n)))));
    }
    Ok(finish(
        vec![rect.into_polygon(0)],
        gluings,
        metadata(&format!("chamanara depth {n}"), Family::Chamanara, Some(n)),
    ))
}

/// Top-slit gluing `L(a)[d0, d1] ~ R(b)[e0, e1]` with depths below the top edge.
struct SlitGluing {
    left_of: Scalar,
    left_depths: (Scalar, Scalar),
    right_of: Scalar,
    right_depths: (Scalar, Scalar),
}

fn icicle_top_gluings(n: u32) -> Vec<SlitGluing> {
    let half = ratio(1, 2);
    let g = |a: Scalar, d: (Scalar, Scalar), b: Scalar, e: (Scalar, Scalar)| SlitGluing {
        left_of: a,
        left_depths: d,
        right_of: b,
        right_depths: e,
    };
    let whole = |m: u32| (int(0), dyadic(m));
    let mut out = Vec::new();
    if n >= 2 {
        out.push(g(half.clone(), (dyadic(2), dyadic(1)), dyadic(2), whole(2)));
    }
    for m in 3..=n {
        let denom = 1i64 << m;
        let mut i = 3;
        while i < 1i64 << (m - 1) {
            out.push(g(ratio(i, denom), whole(m), ratio(i - 2, denom), whole(m)));
            i += 2;
        }
        let big = dyadic(m - 1);
        out.push(g(
            big.clone(),
            (dyadic(m), dyadic(m - 1)),
            ratio((1i64 << (m - 1)) - 1, denom),
            whole(m),
        ));
        out.push(g(big, (int(0), dyadic(m)), half.clone(), (dyadic(m), dyadic(m - 1))));
    }
    let last = dyadic(n);
    out.push(g(last.clone(), (int(0), dyadic(n + 1)), half.clone(), (dyadic(n + 1), dyadic(n))));
    out.push(g(last, (dyadic(n + 1), dyadic(n)), half, (int(0), dyadic(n + 1))));
    // Mirror x -> 1 - x, exchanging the sides.
    let one = int(1);
    let mirrored: Vec<SlitGluing> = out
        .iter()
        .map(|s| SlitGluing {
            left_of: &one - &s.right_of,
            left_depths: s.right_depths.clone(),
            right_of: &one - &s.left_of,
            right_depths: s.left_depths.clone(),
        })
        .filter(|m| {
            !out.iter()
                .any(|s| s.left_of == m.left_of && s.left_depths == m.left_depths)
        })
        .collect();
    out.extend(mirrored);
    out
}

/// Slit length at the dyadic position `j / 2^n`, `0 < j < 2^n`.
fn slit_length(j: u64, n: u32) -> Scalar {
    let level = n - j.trailing_zeros();
    dyadic(level)
}

pub fn build_icicled(n: u32) -> Result<SurfaceComplex> {
    check_depth(n)?;
    let columns = 1u64 << n;
    let width = dyadic(n);
    let two = int(2);
    let zero = int(0);
    let gluings_top = icicle_top_gluings(n);
    let column_of_left_side = |x: &Scalar| -> usize {
        // Column whose right side lies at x.
        let j = (x / &width).to_integer();
        usize::try_from(j).expect("small index") - 1
    };
    // Depth cut points of every slit side; identical for top and bottom.
    let mut left_cuts: Vec<Vec<Scalar>> = vec![Vec::new(); columns as usize + 1];
    let mut right_cuts: Vec<Vec<Scalar>> = vec![Vec::new(); columns as usize + 1];
    let index_of = |x: &Scalar| -> usize { usize::try_from((x / &width).to_integer()).expect("small index") };
    for s in &gluings_top {
        let l = index_of(&s.left_of);
        left_cuts[l].push(s.left_depths.0.clone());
        left_cuts[l].push(s.left_depths.1.clone());
        let r = index_of(&s.right_of);
        right_cuts[r].push(s.right_depths.0.clone());
        right_cuts[r].push(s.right_depths.1.clone());
    }
    let side_ys = |j: usize, depth_cuts: &[Scalar]| -> Vec<Scalar> {
        if j == 0 || j == columns as usize {
            return Vec::new();
        }
        let len = slit_length(j as u64, n);
        let mut ys = vec![len.clone(), &two - &len];
        for d in depth_cuts {
            ys.push(d.clone());
            ys.push(&two - d);
        }
        ys
    };
    let mut rects = Vec::with_capacity(columns as usize);
    for c in 0..columns as usize {
        let x0 = &width * int(c as i64);
        let x1 = &width * int(c as i64 + 1);
        let right = side_ys(c + 1, &left_cuts[c + 1]);
        let left = side_ys(c, &right_cuts[c]);
        rects.push(CutRect::new(&x0, &x1, &zero, &two, [&[], &right, &[], &left]));
    }
    let mut gluings = Vec::new();
    let last = columns as usize - 1;
    gluings.push(glue(
        (last, rects[last].edge(Side::Right, &zero, &two)),
        (0, rects[0].edge(Side::Left, &zero, &two)),
    ));
    // Non-slit parts of interior column boundaries.
    for j in 1..columns as usize {
        let len = slit_length(j as u64, n);
        let hi = &two - &len;
        gluings.push(glue(
            (j - 1, rects[j - 1].edge(Side::Right, &len, &hi)),
            (j, rects[j].edge(Side::Left, &len, &hi)),
        ));
    }
    for s in &gluings_top {
        let lc = column_of_left_side(&s.left_of);
        let rc = lc_right(&s.right_of, &width);
        let (d0, d1) = &s.left_depths;
        let (e0, e1) = &s.right_depths;
        // Top copy.
        gluings.push(glue(
            (lc, rects[lc].edge(Side::Right, &(&two - d1), &(&two - d0))),
            (rc, rects[rc].edge(Side::Left, &(&two - e1), &(&two - e0))),
        ));
        // Bottom copy.
        gluings.push(glue(
            (lc, rects[lc].edge(Side::Right, d0, d1)),
            (rc, rects[rc].edge(Side::Left, e0, e1)),
        ));
    }
    let polygons = rects.into_iter().enumerate().map(|(i, r)| r.into_polygon(i)).collect();
    Ok(finish(
        polygons,
        gluings,
        metadata(&format!("icicled depth {n}"), Family::Icicled, Some(n)),
    ))
}

/// Column whose left side lies at x.
fn lc_right(x: &Scalar, width: &Scalar) -> usize {
    usize::try_from((x / width).to_integer()).expect("small index")
}

/// Slit positions `s_0, ..., s_2n` of the nested cylinders.
pub fn nested_slit_positions(n: u32) -> Vec<Scalar> {
    let mut out = vec![ratio(1, 2)];
    for k in 1..=(2 * n as i64) {
        let next = out.last().unwrap() + ratio(1, k + 2);
        out.push(next);
    }
    out
}

pub fn build_nested_cylinders(n: u32, h: &Scalar) -> Result<SurfaceComplex> {
    check_depth(n)?;
    if *h <= int(0) {
        return Err(Error::InvalidParameter("height must be positive".into()));
    }
    let slits = nested_slit_positions(n);
    let zero = int(0);
    let neg_h = -h.clone();
    let mut stops = vec![zero.clone()];
    stops.extend(slits.iter().cloned());
    // Intervals between consecutive stops; upper rectangles first.
    let count = stops.len() - 1;
    let mut polygons = Vec::new();
    for i in 0..count {
        let r = CutRect::new(&stops[i], &stops[i + 1], &zero, h, [&[], &[], &[], &[]]);
        polygons.push(r.into_polygon(i));
    }
    for i in 0..count {
        let r = CutRect::new(&stops[i], &stops[i + 1], &neg_h, &zero, [&[], &[], &[], &[]]);
        polygons.push(r.into_polygon(count + i));
    }
    // CutRect edges without cuts: 0 bottom, 1 right, 2 top, 3 left.
    let mut gluings = Vec::new();
    for i in 0..count {
        gluings.push(glue((i, 0), (count + i, 2)));
    }
    // Walls: stop index 0 and the last are walls on both halves; interior stop
    // k + 1 is slit s_k, upward for even k.
    let last = stops.len() - 1;
    let is_wall = |stop: usize, upper: bool| -> bool {
        stop == 0 || stop == last || ((stop - 1) % 2 == 0) == upper
    };
    for (upper, offset) in [(true, 0), (false, count)] {
        let walls: Vec<usize> = (0..=last).filter(|&s| is_wall(s, upper)).collect();
        for w in walls.windows(2) {
            // Cylinder spanning stops w[0]..w[1]: left wall of its first
            // rectangle to the right wall of its last.
            gluings.push(glue((offset + w[1] - 1, 1), (offset + w[0], 3)));
            for s in w[0] + 1..w[1] {
                gluings.push(glue((offset + s - 1, 1), (offset + s, 3)));
            }
        }
    }
    Ok(finish(
        polygons,
        gluings,
        metadata(&format!("nested cylinders depth {n}"), Family::NestedCylinders, Some(n)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{ConeKind, Genus};

    #[test]
    fn torus_basics() {
        let t = build_torus();
        assert!(t.validate().is_valid());
        assert_eq!(t.polygons.len(), 1);
        assert_eq!(t.gluings.len(), 2);
        let cones = t.cone_multiplicities();
        assert_eq!(cones.len(), 1);
        assert_eq!(cones[0].multiplicity(), Some(1));
        assert_eq!(t.genus().unwrap(), Genus::Closed { genus: 1 });
    }

    #[test]
    fn l_shaped_basics() {
        let l = build_l_shaped();
        assert!(l.validate().is_valid());
        let classes = l.vertex_classes();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].corners.len(), 8);
        assert_eq!(l.cone_data(&classes[0]).multiplicity(), Some(3));
        assert_eq!(l.euler_characteristic(), -2);
        assert_eq!(l.genus().unwrap(), Genus::Closed { genus: 2 });
    }

    #[test]
    fn depth_zero_rejected() {
        assert!(matches!(build_chamanara(0), Err(Error::InvalidDepth(0))));
        assert!(matches!(build_icicled(0), Err(Error::InvalidDepth(0))));
        assert!(matches!(build_nested_cylinders(0, &int(1)), Err(Error::InvalidDepth(0))));
        assert!(build_nested_cylinders(1, &int(0)).is_err());
    }

    #[test]
    fn family_outputs_validate() {
        for n in 1..=4 {
            for c in [
                build_chamanara(n).unwrap(),
                build_icicled(n).unwrap(),
                build_nested_cylinders(n, &int(3)).unwrap(),
            ] {
                let report = c.validate();
                assert!(report.is_valid(), "{}: {:?}", c.metadata.name, report);
            }
        }
    }

    #[test]
    fn chamanara_depth_one() {
        let c = build_chamanara(1).unwrap();
        assert_eq!(c.polygons[0].len(), 8);
        assert_eq!(c.gluings.len(), 4);
        assert_eq!(c.genus().unwrap(), Genus::Closed { genus: 2 });
    }

    #[test]
    fn chamanara_shortest_piece() {
        for n in 1..=5 {
            let c = build_chamanara(n).unwrap();
            let p = &c.polygons[0];
            let shortest = (0..p.len()).map(|e| p.edge_vector(e).norm_sq()).min().unwrap();
            assert_eq!(shortest, dyadic(2 * n));
        }
    }

    #[test]
    fn nested_cylinders_single_singularity() {
        for n in 1..=4 {
            let c = build_nested_cylinders(n, &int(2)).unwrap();
            let classes = c.vertex_classes();
            let interior: Vec<_> = classes.iter().filter(|k| !k.boundary).collect();
            assert_eq!(interior.len(), 1);
            assert_eq!(
                c.cone_data(interior[0]).kind,
                ConeKind::InteriorCone {
                    multiplicity: 2 * n as usize + 1
                }
            );
            assert_eq!(c.genus().unwrap().value(), 0);
            assert_eq!(c.boundary_cycles(), 2 * n as usize + 2);
        }
    }

    #[test]
    fn nested_slit_positions_match_partial_sums() {
        let s = nested_slit_positions(2);
        assert_eq!(s[0], ratio(1, 2));
        assert_eq!(s[1], ratio(5, 6));
        assert_eq!(s[2], ratio(13, 12));
        assert_eq!(s[3], ratio(77, 60));
        assert_eq!(s[4], ratio(29, 20));
    }

    #[test]
    fn icicled_top_and_bottom_never_meet() {
        for n in 1..=4 {
            let c = build_icicled(n).unwrap();
            for g in &c.gluings {
                let mid = |e: EdgeRef| {
                    let p = c.polygon(e.polygon);
                    let a = p.edge_start(e.edge);
                    let b = p.edge_end(e.edge);
                    (&a.y + &b.y) / int(2)
                };
                let (ya, yb) = (mid(g.a), mid(g.b));
                let pa = c.polygon(g.a.polygon).edge_vector(g.a.edge);
                if pa.x == int(0) && ya != int(1) {
                    // Slit pieces stay on their own half.
                    assert_eq!(ya > int(1), yb > int(1), "{g:?}");
                }
            }
        }
    }

    #[test]
    fn family_names_parse() {
        for f in [
            Family::Torus,
            Family::LShaped,
            Family::Chamanara,
            Family::Icicled,
            Family::NestedCylinders,
        ] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
