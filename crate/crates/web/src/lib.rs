//! Browser bindings: build a surface, trace a straight line from a clicked
//! point, list the saddle connections of the primary singularity. Every call
//! returns a JSON string carrying an SVG drawing.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use flatsurf::builders::{Family, FamilySpec};
use flatsurf::developing::{trace, Limits, SurfacePoint, TraceOutcome};
use flatsurf::geometry::{point_in_polygon, Location, Point2, Scalar, Vec2};
use flatsurf::saddle::{enumerate, unfold_at_class};
use flatsurf::topology::primary_class;
use flatsurf::{svg, Surface};

/// Clicked coordinates are snapped to this odd denominator, so they never
/// land on the dyadic grid of the builders.
const CLICK_DENOMINATOR: i64 = 3001;
/// Charts allowed per unfolding in the browser.
const CHART_CAP: usize = 50_000;

fn surface(family: &str, depth: u32) -> Result<(Family, Surface), String> {
    let family: Family = family.parse().map_err(|e: flatsurf::Error| e.to_string())?;
    let complex = FamilySpec::new(family, depth).build().map_err(|e| e.to_string())?;
    let mut s = Surface::new(complex);
    if family == Family::Torus {
        // The flat torus has no cone point; mark the corner class.
        s.mark(0).map_err(|e| e.to_string())?;
    }
    Ok((family, s))
}

fn snap(v: f64) -> Scalar {
    let d = CLICK_DENOMINATOR;
    Scalar::new(((v * d as f64).round() as i64).into(), d.into())
}

fn text(s: &Scalar) -> String {
    s.to_string()
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Built {
    svg: String,
    genus: i64,
    closed: bool,
    polygons: usize,
    singular_classes: usize,
}

pub fn build_surface(family: &str, depth: u32) -> Result<String, String> {
    let (_, s) = surface(family, depth)?;
    let genus = s.complex().genus().map_err(|e| e.to_string())?;
    json(&Built {
        svg: svg::surface_svg(&s),
        genus: genus.value(),
        closed: s.complex().is_closed(),
        polygons: s.complex().polygons.len(),
        singular_classes: s.singular_classes().len(),
    })
}

#[derive(Serialize)]
struct Traced {
    svg: String,
    outcome: &'static str,
    param: String,
    period: Option<String>,
    legs: usize,
}

pub fn trace_line(family: &str, depth: u32, x: f64, y: f64, dx: i64, dy: i64, max_param: u32) -> Result<String, String> {
    let (_, s) = surface(family, depth)?;
    let p = Point2::new(snap(x), snap(y));
    let polygon = s
        .complex()
        .polygons
        .iter()
        .position(|q| point_in_polygon(&p, &q.vertices) == Location::Inside)
        .ok_or_else(|| format!("({x:.3}, {y:.3}) is not inside the surface"))?;
    let out = trace(
        &s,
        &SurfacePoint::new(polygon, p),
        &Vec2::from_ints(dx, dy),
        &Scalar::from_integer(max_param.into()),
    )
    .map_err(|e| e.to_string())?;
    let path = out.path();
    json(&Traced {
        svg: svg::path_svg(&s, path),
        outcome: out.name(),
        param: text(&path.total_param),
        period: match &out {
            TraceOutcome::Closed { period, .. } => Some(text(period)),
            _ => None,
        },
        legs: path.legs.len(),
    })
}

#[derive(Serialize)]
struct Connection {
    from: usize,
    to: usize,
    holonomy: [String; 2],
    length_sq: String,
}

#[derive(Serialize)]
struct Saddles {
    svg: String,
    class: usize,
    connections: Vec<Connection>,
}

pub fn saddle_connections(family: &str, depth: u32, max_len_sq: f64) -> Result<String, String> {
    let (family, s) = surface(family, depth)?;
    let class = primary_class(&s, Some(family)).ok_or("no singular class")?;
    let bound = Scalar::new(((max_len_sq * 64.0).round() as i64).max(1).into(), 64.into());
    let limits = Limits { chart_cap: CHART_CAP };
    let list = enumerate(&s, class, &bound, &limits).map_err(|e| e.to_string())?;
    let unfolding = unfold_at_class(&s, class, &bound, &limits).map_err(|e| e.to_string())?;
    // Connections drawn from the apex, which sits at the origin of the unfolding.
    let centered: Vec<_> = list
        .iter()
        .map(|sc| {
            let mut sc = sc.clone();
            let shift = sc.path.start.position.to_vec();
            for leg in &mut sc.path.legs {
                leg.offset = &leg.offset - &shift;
            }
            sc
        })
        .collect();
    json(&Saddles {
        svg: svg::unfolding_svg(&s, &unfolding, &centered),
        class,
        connections: list
            .iter()
            .map(|sc| Connection {
                from: sc.start_class,
                to: sc.end_class,
                holonomy: [text(&sc.holonomy.x), text(&sc.holonomy.y)],
                length_sq: text(&sc.length_sq),
            })
            .collect(),
    })
}

#[wasm_bindgen(js_name = buildSurface)]
pub fn build_surface_js(family: &str, depth: u32) -> Result<String, JsError> {
    build_surface(family, depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = traceLine)]
pub fn trace_line_js(family: &str, depth: u32, x: f64, y: f64, dx: i32, dy: i32, max_param: u32) -> Result<String, JsError> {
    trace_line(family, depth, x, y, dx.into(), dy.into(), max_param).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = saddleConnections)]
pub fn saddle_connections_js(family: &str, depth: u32, max_len_sq: f64) -> Result<String, JsError> {
    saddle_connections(family, depth, max_len_sq).map_err(|e| JsError::new(&e))
}
