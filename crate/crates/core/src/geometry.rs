//! Exact rational plane geometry.
//!
//! Every coordinate is a reduced [`BigRational`]; no predicate in this module
//! rounds. Lengths are compared through their squares so that rectilinear and
//! dyadic inputs stay closed over the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^-k` as an exact scalar.
pub fn dyadic(k: u32) -> Scalar {
    BigRational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Canonical `"p/q"` rendering (reduced, `q > 0`).
pub fn scalar_to_string(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = text.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

pub fn to_f64(s: &Scalar) -> f64 {
    s.to_f64().unwrap_or(f64::NAN)
}

/// Position in a polygon chart or in the developing plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Scalar,
    pub y: Scalar,
}

/// Displacement: directions, holonomies, gluing translations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(int(x), int(y))
    }

    pub fn origin() -> Self {
        Point2::new(Scalar::zero(), Scalar::zero())
    }

    /// `self + t * v`
    pub fn offset(&self, v: &Vec2, t: &Scalar) -> Point2 {
        Point2::new(&self.x + &v.x * t, &self.y + &v.y * t)
    }

    pub fn to_vec(&self) -> Vec2 {
        Vec2::new(self.x.clone(), self.y.clone())
    }
}

impl Vec2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Vec2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Vec2::new(int(x), int(y))
    }

    pub fn zero() -> Self {
        Vec2::new(Scalar::zero(), Scalar::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn cross(&self, other: &Vec2) -> Scalar {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn dot(&self, other: &Vec2) -> Scalar {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn norm_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn scale(&self, t: &Scalar) -> Vec2 {
        Vec2::new(&self.x * t, &self.y * t)
    }

    /// True when `other` is a positive multiple of `self`.
    pub fn same_direction(&self, other: &Vec2) -> bool {
        self.cross(other).is_zero() && self.dot(other).is_positive()
    }

    /// Half-plane index used by [`angular_cmp`]: 0 for angles in `[0, π)`, 1 for `[π, 2π)`.
    fn half(&self) -> u8 {
        if self.y.is_positive() || (self.y.is_zero() && self.x.is_positive()) {
            0
        } else {
            1
        }
    }
}

/// Orders nonzero vectors by their counterclockwise angle from `+x` in `[0, 2π)`,
/// then by length. This is the holonomy tie-break used throughout the crate.
pub fn angular_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    a.half()
        .cmp(&b.half())
        .then_with(|| Scalar::zero().cmp(&a.cross(b)))
        .then_with(|| a.norm_sq().cmp(&b.norm_sq()))
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Sub for &Point2 {
    type Output = Vec2;
    fn sub(self, rhs: &Point2) -> Vec2 {
        Vec2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Add<&Vec2> for &Point2 {
    type Output = Point2;
    fn add(self, rhs: &Vec2) -> Point2 {
        Point2::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub<&Vec2> for &Point2 {
    type Output = Point2;
    fn sub(self, rhs: &Vec2) -> Point2 {
        Point2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Add for &Vec2 {
    type Output = Vec2;
    fn add(self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

impl Mul<&Scalar> for &Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: &Scalar) -> Vec2 {
        self.scale(rhs)
    }
}

/// Non-degenerate closed segment `a → b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }

    pub fn direction(&self) -> Vec2 {
        &self.b - &self.a
    }

    pub fn at(&self, u: &Scalar) -> Point2 {
        self.a.offset(&self.direction(), u)
    }

    /// Parameter `u` with `at(u) == p` when `p` lies on the segment.
    pub fn param_of(&self, p: &Point2) -> Option<Scalar> {
        let d = self.direction();
        let w = p - &self.a;
        if !d.cross(&w).is_zero() {
            return None;
        }
        let u = d.dot(&w) / d.norm_sq();
        (!u.is_negative() && u <= Scalar::one()).then_some(u)
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.param_of(p).is_some()
    }
}

/// Sign of the cross product `(q − p) × (r − p)`.
pub fn orientation(p: &Point2, q: &Point2, r: &Point2) -> i8 {
    let c = (q - p).cross(&(r - p));
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

/// Result of casting an open ray against a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayHit {
    /// Transversal hit at `origin + t·dir == seg.a + u·(seg.b − seg.a)`.
    Point { t: Scalar, u: Scalar },
    /// The ray runs along the segment's supporting line and meets it;
    /// `t_enter..=t_exit` is the overlap (with `t_enter ≥ 0`).
    Overlap { t_enter: Scalar, t_exit: Scalar },
}

/// Intersects the open ray `origin + t·dir`, `t > 0`, with a closed segment.
pub fn ray_segment_intersect(origin: &Point2, dir: &Vec2, seg: &Segment) -> Option<RayHit> {
    debug_assert!(!dir.is_zero());
    let e = seg.direction();
    let w = &seg.a - origin;
    let denom = dir.cross(&e);
    if denom.is_zero() {
        if !dir.cross(&w).is_zero() {
            return None;
        }
        let dd = dir.norm_sq();
        let ta = dir.dot(&w) / &dd;
        let tb = dir.dot(&(&seg.b - origin)) / &dd;
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if !hi.is_positive() {
            return None;
        }
        let lo = if lo.is_negative() { Scalar::zero() } else { lo };
        return Some(RayHit::Overlap { t_enter: lo, t_exit: hi });
    }
    let t = w.cross(&e) / &denom;
    let u = w.cross(dir) / &denom;
    if t.is_positive() && !u.is_negative() && u <= Scalar::one() {
        Some(RayHit::Point { t, u })
    } else {
        None
    }
}

/// Closed-segment intersection test (touching and collinear overlap count).
pub fn segments_intersect(s: &Segment, t: &Segment) -> bool {
    let o1 = orientation(&s.a, &s.b, &t.a);
    let o2 = orientation(&s.a, &s.b, &t.b);
    let o3 = orientation(&t.a, &t.b, &s.a);
    let o4 = orientation(&t.a, &t.b, &s.b);
    if o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 {
        if o1 == 0 && o2 == 0 {
            return collinear_overlap(s, t);
        }
        return true;
    }
    if o1 == 0 && s.contains(&t.a)
        || o2 == 0 && s.contains(&t.b)
        || o3 == 0 && t.contains(&s.a)
        || o4 == 0 && t.contains(&s.b)
    {
        return true;
    }
    false
}

fn collinear_overlap(s: &Segment, t: &Segment) -> bool {
    s.contains(&t.a) || s.contains(&t.b) || t.contains(&s.a) || t.contains(&s.b)
}

/// Intersection set of two closed segments: nothing, one point, or a sub-segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentMeet {
    None,
    Point(Point2),
    Overlap(Point2, Point2),
}

pub fn segment_meet(s: &Segment, t: &Segment) -> SegmentMeet {
    let d = s.direction();
    let e = t.direction();
    let denom = d.cross(&e);
    let w = &t.a - &s.a;
    if denom.is_zero() {
        if !d.cross(&w).is_zero() {
            return SegmentMeet::None;
        }
        let dd = d.norm_sq();
        let ua = d.dot(&w) / &dd;
        let ub = d.dot(&(&t.b - &s.a)) / &dd;
        let (lo, hi) = if ua <= ub { (ua, ub) } else { (ub, ua) };
        let lo = lo.max(Scalar::zero());
        let hi = hi.min(Scalar::one());
        return match lo.cmp(&hi) {
            Ordering::Greater => SegmentMeet::None,
            Ordering::Equal => SegmentMeet::Point(s.at(&lo)),
            Ordering::Less => SegmentMeet::Overlap(s.at(&lo), s.at(&hi)),
        };
    }
    let u = w.cross(&e) / &denom;
    let v = w.cross(&d) / &denom;
    let unit = Scalar::one();
    if u.is_negative() || u > unit || v.is_negative() || v > unit {
        SegmentMeet::None
    } else {
        SegmentMeet::Point(s.at(&u))
    }
}

/// Squared distance from `p` to the closed segment, with the closest parameter.
pub fn point_segment_distance_sq(p: &Point2, seg_a: &Point2, seg_b: &Point2) -> (Scalar, Scalar) {
    let d = seg_b - seg_a;
    let w = p - seg_a;
    let dd = d.norm_sq();
    let u = if dd.is_zero() {
        Scalar::zero()
    } else {
        let raw = d.dot(&w) / &dd;
        raw.clamp(Scalar::zero(), Scalar::one())
    };
    let foot = seg_a.offset(&d, &u);
    ((p - &foot).norm_sq(), u)
}

/// Twice the signed shoelace area.
pub fn doubled_area(poly: &[Point2]) -> Scalar {
    let n = poly.len();
    let mut acc = Scalar::zero();
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        acc += &p.x * &q.y - &q.x * &p.y;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Exact point classification for a simple polygon (either orientation).
pub fn point_in_polygon(p: &Point2, poly: &[Point2]) -> Location {
    let n = poly.len();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if orientation(a, b, p) == 0 && (Segment { a: a.clone(), b: b.clone() }).contains(p) {
            return Location::Boundary;
        }
    }
    // Crossing number with a rightward horizontal ray, half-open on y.
    let mut inside = false;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let t = (&p.y - &a.y) / (&b.y - &a.y);
            let x = &a.x + (&b.x - &a.x) * t;
            if x > p.x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// True if the polygon has no two non-adjacent edges touching and no
/// adjacent edges overlapping.
pub fn is_simple(poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let seg = |i: usize| Segment {
        a: poly[i].clone(),
        b: poly[(i + 1) % n].clone(),
    };
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let si = seg(i);
            let sj = seg(j);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only share their common vertex.
                let shared = if j == i + 1 { &poly[j] } else { &poly[0] };
                match segment_meet(&si, &sj) {
                    SegmentMeet::Point(p) if &p == shared => {}
                    SegmentMeet::None => {}
                    _ => return false,
                }
            } else if segments_intersect(&si, &sj) {
                return false;
            }
        }
    }
    true
}

/// Does direction `d` lie in the half-open counterclockwise sector `[from, to)`?
///
/// `from == to` (as directions) is read as the full turn.
pub fn in_ccw_sector(from: &Vec2, to: &Vec2, d: &Vec2) -> bool {
    if from.same_direction(d) {
        return true;
    }
    let c = from.cross(to);
    if c.is_positive() {
        from.cross(d).is_positive() && d.cross(to).is_positive()
    } else if c.is_negative() {
        // Reflex: everything except the closed convex sector [to, from].
        !(to.cross(d).is_positive() && d.cross(from).is_positive()) && !to.same_direction(d)
    } else if from.dot(to).is_negative() {
        from.cross(d).is_positive()
    } else {
        // Full turn.
        true
    }
}

/// Does `d` lie strictly inside the counterclockwise sector `(from, to)`?
pub fn strictly_in_ccw_sector(from: &Vec2, to: &Vec2, d: &Vec2) -> bool {
    in_ccw_sector(from, to, d) && !from.same_direction(d)
}

/// Splits a simple counterclockwise polygon along a chord whose endpoints lie
/// on the boundary and whose interior lies strictly inside.
///
/// Returns `(left, right)`: `left` lies to the left of `a → b` and contains the
/// chord as the directed edge `a → b`; `right` contains it as `b → a`.
pub fn split_polygon(poly: &[Point2], chord: &Segment) -> Result<(Vec<Point2>, Vec<Point2>)> {
    let mut ring = poly.to_vec();
    let ia = insert_on_boundary(&mut ring, &chord.a).ok_or(Error::ChordNotInterior)?;
    let ib = insert_on_boundary(&mut ring, &chord.b).ok_or(Error::ChordNotInterior)?;
    // Insertion of b may have shifted a.
    let ia = ring.iter().position(|q| q == &chord.a).unwrap_or(ia);
    let n = ring.len();
    let arc = |from: usize, to: usize| {
        let mut out = vec![ring[from].clone()];
        let mut i = from;
        while i != to {
            i = (i + 1) % n;
            out.push(ring[i].clone());
        }
        out
    };
    let left = arc(ib, ia);
    let right = arc(ia, ib);

    let area = doubled_area(poly);
    let la = doubled_area(&left);
    let ra = doubled_area(&right);
    if left.len() < 3 || right.len() < 3 || !la.is_positive() || !ra.is_positive() || la + ra != area {
        return Err(Error::ChordNotInterior);
    }
    let mid = chord.at(&ratio(1, 2));
    if point_in_polygon(&mid, poly) != Location::Inside {
        return Err(Error::ChordNotInterior);
    }
    for i in 0..poly.len() {
        let e = Segment {
            a: poly[i].clone(),
            b: poly[(i + 1) % poly.len()].clone(),
        };
        match segment_meet(chord, &e) {
            SegmentMeet::None => {}
            SegmentMeet::Point(p) if p == chord.a || p == chord.b => {}
            _ => return Err(Error::ChordNotInterior),
        }
    }
    Ok((left, right))
}

/// Index of `p` in `ring`, inserting it into the edge that contains it if needed.
pub(crate) fn insert_on_boundary(ring: &mut Vec<Point2>, p: &Point2) -> Option<usize> {
    if let Some(i) = ring.iter().position(|q| q == p) {
        return Some(i);
    }
    let n = ring.len();
    for i in 0..n {
        let s = Segment {
            a: ring[i].clone(),
            b: ring[(i + 1) % n].clone(),
        };
        if s.contains(p) {
            ring.insert(i + 1, p.clone());
            return Some(i + 1);
        }
    }
    None
}

/// Checks `|√a − √b| ≤ √c` exactly for nonnegative rationals.
pub fn sqrt_difference_bounded(a: &Scalar, b: &Scalar, c: &Scalar) -> bool {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    // √hi ≤ √lo + √c  ⇔  hi − lo − c ≤ 2√(lo·c)
    let lhs = hi - lo - c;
    if !lhs.is_positive() {
        return true;
    }
    &lhs * &lhs <= int(4) * lo * c
}

/// Closed floating-point enclosure of a real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Encloses a rational; `to_f64` is correctly rounded so one ulp either side suffices.
    pub fn from_scalar(s: &Scalar) -> Self {
        let v = to_f64(s);
        Interval {
            lo: next_down(v),
            hi: next_up(v),
        }
    }

    pub fn sqrt(self) -> Self {
        Interval {
            lo: next_down(self.lo.max(0.0).sqrt()).max(0.0),
            hi: next_up(self.hi.max(0.0).sqrt()),
        }
    }

    pub fn sub(self, other: Interval) -> Self {
        Interval {
            lo: next_down(self.lo - other.hi),
            hi: next_up(self.hi - other.lo),
        }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Interval { lo: -self.hi, hi: -self.lo }
        } else {
            Interval {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }
}

fn next_up(v: f64) -> f64 {
    if v.is_nan() || v == f64::INFINITY {
        return v;
    }
    if v == 0.0 {
        return f64::from_bits(1);
    }
    let bits = v.to_bits();
    if v > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

fn next_down(v: f64) -> f64 {
    -next_up(-v)
}

/// Squared distance between two closed segments; either may be degenerate.
pub fn segment_distance_sq(a0: &Point2, a1: &Point2, b0: &Point2, b1: &Point2) -> Scalar {
    if a0 != a1 && b0 != b1 {
        let s = Segment { a: a0.clone(), b: a1.clone() };
        let t = Segment { a: b0.clone(), b: b1.clone() };
        if segments_intersect(&s, &t) {
            return Scalar::zero();
        }
    }
    [
        point_segment_distance_sq(a0, b0, b1).0,
        point_segment_distance_sq(a1, b0, b1).0,
        point_segment_distance_sq(b0, a0, a1).0,
        point_segment_distance_sq(b1, a0, a1).0,
    ]
    .into_iter()
    .min()
    .expect("four candidates")
}

fn approx(p: &Point2) -> (f64, f64) {
    (to_f64(&p.x), to_f64(&p.y))
}

fn approx_point_segment_sq(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (wx, wy) = (p.0 - a.0, p.1 - a.1);
    let dd = dx * dx + dy * dy;
    let u = if dd == 0.0 { 0.0 } else { ((dx * wx + dy * wy) / dd).clamp(0.0, 1.0) };
    let (fx, fy) = (p.0 - a.0 - u * dx, p.1 - a.1 - u * dy);
    fx * fx + fy * fy
}

/// Whether two segments come within squared distance `r2`. A floating-point
/// estimate decides clear cases; close calls are settled exactly.
pub fn segments_within_sq(a0: &Point2, a1: &Point2, b0: &Point2, b1: &Point2, r2: &Scalar) -> bool {
    let pts = [approx(a0), approx(a1), approx(b0), approx(b1)];
    let scale = pts.iter().map(|(x, y)| x * x + y * y).fold(1.0, f64::max);
    let d = approx_point_segment_sq(pts[0], pts[2], pts[3])
        .min(approx_point_segment_sq(pts[1], pts[2], pts[3]))
        .min(approx_point_segment_sq(pts[2], pts[0], pts[1]))
        .min(approx_point_segment_sq(pts[3], pts[0], pts[1]));
    let r = to_f64(r2);
    let margin = 1e-9 * (scale + r);
    if d > r + margin {
        // Crossing segments have distance zero but a positive endpoint estimate.
        if a0 == a1 || b0 == b1 {
            return false;
        }
        let cross = |o: (f64, f64), p: (f64, f64), q: (f64, f64)| (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0);
        let signs = [
            cross(pts[0], pts[1], pts[2]),
            cross(pts[0], pts[1], pts[3]),
            cross(pts[2], pts[3], pts[0]),
            cross(pts[2], pts[3], pts[1]),
        ];
        if signs.iter().all(|c| c.abs() > margin) {
            return signs[0].signum() != signs[1].signum() && signs[2].signum() != signs[3].signum();
        }
        let s = Segment { a: a0.clone(), b: a1.clone() };
        let t = Segment { a: b0.clone(), b: b1.clone() };
        return segments_intersect(&s, &t);
    }
    if d < r - margin {
        return true;
    }
    segment_distance_sq(a0, a1, b0, b1) <= *r2
}

/// Smallest integer vector with the direction of a nonzero rational vector.
pub fn primitive_direction(v: &Vec2) -> (BigInt, BigInt) {
    let l = v.x.denom().lcm(v.y.denom());
    let x = v.x.numer() * (&l / v.x.denom());
    let y = v.y.numer() * (&l / v.y.denom());
    let g = x.gcd(&y);
    (x / &g, y / &g)
}

/// Serializes a scalar as its `"p/q"` string.
pub fn serialize_scalar<S: Serializer>(v: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&scalar_to_string(v))
}

pub fn serialize_scalars<S: Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(scalar_to_string))
}

pub fn serialize_opt_scalar<S: Serializer>(v: &Option<Scalar>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(scalar_to_string).serialize(s)
}

pub fn serialize_opt_scalars<S: Serializer>(v: &[Option<Scalar>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.as_ref().map(scalar_to_string)))
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [scalar_to_string(&self.x), scalar_to_string(&self.y)].serialize(s)
    }
}

impl Serialize for Vec2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [scalar_to_string(&self.x), scalar_to_string(&self.y)].serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn unit_square() -> Vec<Point2> {
        vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)]
    }

    #[test]
    fn orientation_signs() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), 0);
        assert_eq!(orientation(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
    }

    #[test]
    fn ray_hits_by_hand() {
        let seg = Segment::new(p(1, 0), p(0, 1)).unwrap();
        assert_eq!(
            ray_segment_intersect(&p(0, 0), &Vec2::from_ints(1, 1), &seg),
            Some(RayHit::Point { t: ratio(1, 2), u: ratio(1, 2) })
        );
        let seg = Segment::new(p(2, 1), p(2, -1)).unwrap();
        assert_eq!(
            ray_segment_intersect(&p(0, 0), &Vec2::from_ints(1, 0), &seg),
            Some(RayHit::Point { t: int(2), u: ratio(1, 2) })
        );
        let seg = Segment::new(p(1, 2), p(2, 2)).unwrap();
        assert_eq!(ray_segment_intersect(&p(0, 0), &Vec2::from_ints(0, 1), &seg), None);
    }

    #[test]
    fn ray_overlap_is_distinct_from_miss() {
        let seg = Segment::new(p(2, 0), p(3, 0)).unwrap();
        assert_eq!(
            ray_segment_intersect(&p(0, 0), &Vec2::from_ints(1, 0), &seg),
            Some(RayHit::Overlap { t_enter: int(2), t_exit: int(3) })
        );
        let behind = Segment::new(p(-3, 0), p(-2, 0)).unwrap();
        assert_eq!(ray_segment_intersect(&p(0, 0), &Vec2::from_ints(1, 0), &behind), None);
    }

    #[test]
    fn split_square_diagonal() {
        let (l, r) = split_polygon(&unit_square(), &Segment::new(p(0, 0), p(1, 1)).unwrap()).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(r.len(), 3);
        assert_eq!(doubled_area(&l), int(1));
        assert_eq!(doubled_area(&r), int(1));
        // Left of (0,0)→(1,1) is the upper-left triangle.
        assert!(l.contains(&p(0, 1)));
        assert!(r.contains(&p(1, 0)));
    }

    #[test]
    fn split_square_vertical() {
        let a = Point2::new(ratio(1, 2), int(0));
        let b = Point2::new(ratio(1, 2), int(1));
        let (l, r) = split_polygon(&unit_square(), &Segment::new(a, b).unwrap()).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(r.len(), 4);
        assert_eq!(doubled_area(&l), int(1));
        assert_eq!(doubled_area(&r), int(1));
        assert!(l.contains(&p(0, 0)));
    }

    #[test]
    fn split_rejects_chord_leaving_polygon() {
        let chord = Segment::new(p(0, 0), p(2, 2)).unwrap();
        assert!(matches!(split_polygon(&unit_square(), &chord), Err(Error::ChordNotInterior)));
        // Along an edge is not interior either.
        let chord = Segment::new(p(0, 0), p(1, 0)).unwrap();
        assert!(matches!(split_polygon(&unit_square(), &chord), Err(Error::ChordNotInterior)));
    }

    #[test]
    fn split_nonconvex_rejects_outside_chord() {
        let l_shape = vec![p(0, 0), p(2, 0), p(2, 1), p(1, 1), p(1, 2), p(0, 2)];
        let chord = Segment::new(p(2, 1), p(1, 2)).unwrap();
        assert!(split_polygon(&l_shape, &chord).is_err());
        let chord = Segment::new(p(1, 0), p(1, 1)).unwrap();
        let (a, b) = split_polygon(&l_shape, &chord).unwrap();
        assert_eq!(doubled_area(&a) + doubled_area(&b), doubled_area(&l_shape));
    }

    #[test]
    fn classify_points() {
        let sq = unit_square();
        assert_eq!(point_in_polygon(&Point2::new(ratio(1, 2), ratio(1, 2)), &sq), Location::Inside);
        assert_eq!(point_in_polygon(&Point2::new(int(0), ratio(1, 2)), &sq), Location::Boundary);
        assert_eq!(point_in_polygon(&p(2, 0), &sq), Location::Outside);
    }

    #[test]
    fn angular_order_starts_at_positive_x() {
        let mut v = vec![
            Vec2::from_ints(0, -1),
            Vec2::from_ints(-1, 0),
            Vec2::from_ints(0, 1),
            Vec2::from_ints(1, 0),
            Vec2::from_ints(1, 1),
        ];
        v.sort_by(angular_cmp);
        assert_eq!(v[0], Vec2::from_ints(1, 0));
        assert_eq!(v[1], Vec2::from_ints(1, 1));
        assert_eq!(v[4], Vec2::from_ints(0, -1));
    }

    #[test]
    fn sectors() {
        let e = Vec2::from_ints(1, 0);
        let n = Vec2::from_ints(0, 1);
        let w = Vec2::from_ints(-1, 0);
        assert!(in_ccw_sector(&e, &n, &Vec2::from_ints(1, 1)));
        assert!(in_ccw_sector(&e, &n, &e));
        assert!(!in_ccw_sector(&e, &n, &n));
        assert!(in_ccw_sector(&e, &w, &n));
        assert!(!in_ccw_sector(&e, &w, &Vec2::from_ints(0, -1)));
        // Reflex sector from north round to east (270°).
        assert!(in_ccw_sector(&n, &e, &Vec2::from_ints(0, -1)));
        assert!(!in_ccw_sector(&n, &e, &Vec2::from_ints(1, 1)));
    }

    #[test]
    fn exact_sqrt_bound() {
        // |√4 − √1| = 1 ≤ √1
        assert!(sqrt_difference_bounded(&int(4), &int(1), &int(1)));
        assert!(!sqrt_difference_bounded(&int(4), &int(1), &ratio(99, 100)));
    }

    fn small() -> impl Strategy<Value = Scalar> {
        (-40i64..40, 1i64..12).prop_map(|(p, q)| ratio(p, q))
    }

    fn point() -> impl Strategy<Value = Point2> {
        (small(), small()).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn ray_hit_substitutes_back(o in point(), dx in small(), dy in small(), a in point(), b in point()) {
            let dir = Vec2::new(dx, dy);
            prop_assume!(!dir.is_zero() && a != b);
            let seg = Segment::new(a, b).unwrap();
            if let Some(RayHit::Point { t, u }) = ray_segment_intersect(&o, &dir, &seg) {
                prop_assert_eq!(o.offset(&dir, &t), seg.at(&u));
            }
        }

        #[test]
        fn orientation_antisymmetric(a in point(), b in point(), c in point()) {
            prop_assert_eq!(orientation(&a, &b, &c), -orientation(&a, &c, &b));
        }

        #[test]
        fn split_preserves_area(ua in 1i64..8, ub in 1i64..8, ea in 0usize..4, eb in 0usize..4) {
            prop_assume!(ea != eb);
            let sq = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)];
            let on_edge = |e: usize, u: i64| {
                let s = Segment { a: sq[e].clone(), b: sq[(e + 1) % 4].clone() };
                s.at(&ratio(u, 8))
            };
            let chord = Segment::new(on_edge(ea, ua), on_edge(eb, ub)).unwrap();
            if let Ok((l, r)) = split_polygon(&sq, &chord) {
                prop_assert_eq!(doubled_area(&l) + doubled_area(&r), doubled_area(&sq));
            }
        }
    }
}
