//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON string.
//! The `*_json` functions hold the logic so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use thompson_core::analysis::{growth_table, uniform_growth_estimate, GrowthFit};
use thompson_core::schreier::orbital_ball_limited;
use thompson_core::{Point, Word};

/// Largest orbit radius the page will draw.
pub const MAX_ORBIT_RADIUS: u32 = 12;
/// Largest radius for the growth curve.
pub const MAX_GROWTH_RADIUS: u32 = 20;
const MAX_VERTICES: usize = 200_000;

#[derive(Serialize)]
struct Vertex {
    point: String,
    /// Numeric value of the point, used as the horizontal coordinate.
    x: f64,
    depth: u32,
}

#[derive(Serialize)]
struct Edge {
    from: usize,
    to: usize,
    label: String,
}

#[derive(Serialize)]
struct OrbitView {
    root: usize,
    radius: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

#[derive(Serialize)]
struct GrowthView {
    point: String,
    sizes: Vec<u64>,
    fitted_rate: Option<f64>,
    r_squared: Option<f64>,
}

#[derive(Serialize)]
struct MapView {
    word: String,
    /// Exact breakpoints and their images.
    points: Vec<(String, String)>,
    /// The same pairs as floats, for plotting.
    plot: Vec<(f64, f64)>,
    /// Base-2 logarithms of the slopes on each piece.
    slopes: Vec<i32>,
    in_commutator: bool,
}

fn ser<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<Point, String> {
    let p: Point = s.trim().parse().map_err(|e: thompson_core::Error| e.to_string())?;
    if !p.in_open_unit() {
        return Err(format!("{p} is fixed by every element; pick a point strictly between 0 and 1"));
    }
    Ok(p)
}

/// Orbital graph of `point` out to `radius`, with each vertex placed at its value.
pub fn orbit_graph_json(point: &str, radius: u32) -> Result<String, String> {
    if radius > MAX_ORBIT_RADIUS {
        return Err(format!("radius is capped at {MAX_ORBIT_RADIUS} in the browser"));
    }
    let p = parse_point(point)?;
    let g = orbital_ball_limited(&p, radius, MAX_VERTICES).map_err(|e| e.to_string())?;
    let vertices = g
        .payloads()
        .iter()
        .enumerate()
        .map(|(v, payload)| {
            let q = match payload {
                thompson_core::Payload::Point(q) => q,
                thompson_core::Payload::Element(_) => unreachable!("orbital graphs carry points"),
            };
            Vertex {
                point: q.to_string(),
                x: q.to_f64(),
                depth: g.depth(v),
            }
        })
        .collect();
    let edges = g
        .edges()
        .into_iter()
        .map(|(from, to, label)| Edge {
            from,
            to,
            label: label.to_string(),
        })
        .collect();
    ser(&OrbitView {
        root: g.root(),
        radius,
        vertices,
        edges,
    })
}

/// Ball sizes around `point` in its orbital graph and an exponential fit.
pub fn growth_curve_json(point: &str, max_radius: u32) -> Result<String, String> {
    if max_radius > MAX_GROWTH_RADIUS {
        return Err(format!("radius is capped at {MAX_GROWTH_RADIUS} in the browser"));
    }
    let p = parse_point(point)?;
    let g = orbital_ball_limited(&p, max_radius, MAX_VERTICES).map_err(|e| e.to_string())?;
    let table = growth_table(&g, "orbit", &[g.root()], max_radius).map_err(|e| e.to_string())?;
    let est = uniform_growth_estimate(&table, &GrowthFit::default()).ok();
    ser(&GrowthView {
        point: p.to_string(),
        sizes: table.sup_sizes(),
        fitted_rate: est.as_ref().map(|e| e.fitted_rate),
        r_squared: est.as_ref().map(|e| e.r_squared),
    })
}

/// The piecewise-linear map of a word in `x0`, `x1`.
pub fn word_map_json(word: &str) -> Result<String, String> {
    let w: Word = word.trim().parse().map_err(|e: thompson_core::Error| e.to_string())?;
    let g = w.eval();
    let pairs: Vec<_> = g.breakpoints().iter().zip(g.images()).collect();
    ser(&MapView {
        word: w.to_string(),
        points: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        plot: pairs.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect(),
        slopes: g.slopes().to_vec(),
        in_commutator: g.in_commutator(),
    })
}

#[wasm_bindgen]
pub fn orbit_graph(point: &str, radius: u32) -> Result<String, JsError> {
    orbit_graph_json(point, radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn growth_curve(point: &str, max_radius: u32) -> Result<String, JsError> {
    growth_curve_json(point, max_radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn word_map(word: &str) -> Result<String, JsError> {
    word_map_json(word).map_err(|e| JsError::new(&e))
}
