//! Rooted graphs with edges labelled by the generators x0 and x1.
//!
//! Graphs are finite snapshots of a Schreier (or Cayley) graph: every vertex at
//! distance `< radius` from the root has all four neighbours recorded, and
//! vertices at distance `radius` form the frontier.
//!
//! A radius-`n` ball around `v` consists of the vertices within distance `n`
//! of `v` and every edge with an endpoint at distance `< n`, i.e. everything
//! reachable by paths of length at most `n`.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::Point;
use crate::element::PLMap;
use crate::error::{Error, Result};

/// Edge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "x0")]
    X0,
    #[serde(rename = "x1")]
    X1,
}

impl Label {
    pub fn index(self) -> usize {
        match self {
            Label::X0 => 0,
            Label::X1 => 1,
        }
    }

    pub fn element(self) -> PLMap {
        match self {
            Label::X0 => PLMap::x0(),
            Label::X1 => PLMap::x1(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::X0 => "x0",
            Label::X1 => "x1",
        })
    }
}

/// One of x0, x1, x0⁻¹, x1⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub label: Label,
    pub inverse: bool,
}

impl Generator {
    pub const X0: Generator = Generator { label: Label::X0, inverse: false };
    pub const X0_INV: Generator = Generator { label: Label::X0, inverse: true };
    pub const X1: Generator = Generator { label: Label::X1, inverse: false };
    pub const X1_INV: Generator = Generator { label: Label::X1, inverse: true };

    /// Fixed traversal order used by BFS and canonical codes.
    pub const ALL: [Generator; 4] = [Self::X0, Self::X0_INV, Self::X1, Self::X1_INV];

    pub fn inv(self) -> Generator {
        Generator {
            label: self.label,
            inverse: !self.inverse,
        }
    }

    pub fn element(self) -> PLMap {
        let g = self.label.element();
        if self.inverse {
            g.inverse()
        } else {
            g
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.inverse {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// Diagnostic data attached to a vertex. Ignored by isomorphism tests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Point(Point),
    Element(PLMap),
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Point(p) => p.fmt(f),
            Payload::Element(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedLabelledGraph {
    payloads: Vec<Payload>,
    dist: Vec<u32>,
    /// `out[v][l]`: image of `v` under label `l`.
    out: Vec<[Option<u32>; 2]>,
    /// `inn[v][l]`: image of `v` under the inverse of label `l`.
    inn: Vec<[Option<u32>; 2]>,
    root: usize,
    radius: u32,
}

impl RootedLabelledGraph {
    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn radius_computed(&self) -> u32 {
        self.radius
    }

    pub fn payload(&self, v: usize) -> &Payload {
        &self.payloads[v]
    }

    pub fn payloads(&self) -> &[Payload] {
        &self.payloads
    }

    /// Distance from the root.
    pub fn depth(&self, v: usize) -> u32 {
        self.dist[v]
    }

    pub fn step(&self, v: usize, g: Generator) -> Option<usize> {
        let table = if g.inverse { &self.inn } else { &self.out };
        table[v][g.label.index()].map(|w| w as usize)
    }

    /// Follows a path of generators; `None` once it leaves the computed region.
    pub fn walk(&self, v: usize, path: &[Generator]) -> Option<usize> {
        path.iter().try_fold(v, |u, &g| self.step(u, g))
    }

    /// Directed labelled edges `(v, label(v), label)`.
    pub fn edges(&self) -> Vec<(usize, usize, Label)> {
        let mut out = Vec::new();
        for (v, targets) in self.out.iter().enumerate() {
            for label in [Label::X0, Label::X1] {
                if let Some(w) = targets[label.index()] {
                    out.push((v, w as usize, label));
                }
            }
        }
        out
    }

    pub fn find_point(&self, p: &Point) -> Option<usize> {
        self.payloads
            .iter()
            .position(|x| matches!(x, Payload::Point(q) if q == p))
    }

    /// Vertices whose radius-`n` ball lies inside the computed region.
    pub fn complete_centers(&self, n: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| self.dist[v] + n <= self.radius)
    }

    pub fn check_ball(&self, v: usize, n: u32) -> Result<()> {
        if v >= self.len() {
            return Err(Error::UnknownVertex(v));
        }
        if self.dist[v] + n > self.radius {
            return Err(Error::InsufficientRadius {
                required: self.dist[v] + n,
                computed: self.radius,
            });
        }
        Ok(())
    }

    /// Vertices of the radius-`n` ball around `v` with their distances, in BFS order.
    pub fn ball(&self, v: usize, n: u32) -> Result<Vec<(usize, u32)>> {
        self.check_ball(v, n)?;
        let mut seen = HashMap::from([(v, 0u32)]);
        let mut order = vec![(v, 0)];
        let mut i = 0;
        while i < order.len() {
            let (u, d) = order[i];
            i += 1;
            if d == n {
                continue;
            }
            for g in Generator::ALL {
                let w = self.step(u, g).expect("vertex inside the complete region");
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                    e.insert(d + 1);
                    order.push((w, d + 1));
                }
            }
        }
        Ok(order)
    }

    pub fn ball_size(&self, v: usize, n: u32) -> Result<usize> {
        Ok(self.ball(v, n)?.len())
    }

    /// Graph distance from `u` to `w`, searched up to `limit`.
    pub fn distance(&self, u: usize, w: usize, limit: u32) -> Result<Option<u32>> {
        Ok(self
            .ball(u, limit)?
            .into_iter()
            .find(|&(x, _)| x == w)
            .map(|(_, d)| d))
    }

    /// Canonical code of the radius-`n` ball around `v`: BFS in the fixed
    /// generator order, recording the discovery index of every neighbour of
    /// every vertex at distance `< n`. Two rooted balls are isomorphic iff
    /// their codes are equal.
    pub fn canonical_code(&self, v: usize, n: u32) -> Result<Vec<u32>> {
        self.check_ball(v, n)?;
        let mut index = HashMap::from([(v, 0u32)]);
        let mut queue = VecDeque::from([(v, 0u32)]);
        let mut code = vec![n];
        while let Some((u, d)) = queue.pop_front() {
            if d == n {
                continue;
            }
            for g in Generator::ALL {
                let w = self.step(u, g).expect("vertex inside the complete region");
                let next = index.len() as u32;
                let id = *index.entry(w).or_insert_with(|| {
                    queue.push_back((w, d + 1));
                    next
                });
                code.push(id);
            }
        }
        Ok(code)
    }

    /// Re-roots the snapshot at `v`, keeping only its radius-`n` ball.
    pub fn reroot(&self, v: usize, n: u32) -> Result<RootedLabelledGraph> {
        let ball = self.ball(v, n)?;
        let local: HashMap<usize, usize> = ball.iter().enumerate().map(|(i, &(u, _))| (u, i)).collect();
        let mut b = GraphBuilder::new(n);
        for &(u, d) in &ball {
            b.add_vertex(self.payloads[u].clone(), d);
        }
        for &(u, d) in &ball {
            if d < n {
                for g in Generator::ALL {
                    let w = self.step(u, g).expect("complete ball");
                    b.link(local[&u], g, local[&w]);
                }
            }
        }
        Ok(b.finish())
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n  node [shape=circle];\n");
        for (v, p) in self.payloads.iter().enumerate() {
            let shape = if v == self.root { ", shape=doublecircle" } else { "" };
            let label = match p {
                Payload::Point(p) => p.to_string(),
                Payload::Element(_) => v.to_string(),
            };
            let _ = writeln!(s, "  v{v} [label=\"{label}\"{shape}];");
        }
        for (v, w, l) in self.edges() {
            let _ = writeln!(s, "  v{v} -> v{w} [label=\"{l}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// Synchronized BFS from `v1` in `g1` and `v2` in `g2`. Succeeds iff the
/// radius-`n` balls are isomorphic as rooted labelled graphs; determinism of
/// both graphs makes the isomorphism unique when it exists.
pub fn ball_isomorphic(
    g1: &RootedLabelledGraph,
    v1: usize,
    g2: &RootedLabelledGraph,
    v2: usize,
    n: u32,
) -> Result<bool> {
    g1.check_ball(v1, n)?;
    g2.check_ball(v2, n)?;
    let mut fwd = HashMap::from([(v1, v2)]);
    let mut bwd = HashMap::from([(v2, v1)]);
    let mut queue = VecDeque::from([(v1, v2, 0u32)]);
    while let Some((a, b, d)) = queue.pop_front() {
        if d == n {
            continue;
        }
        for g in Generator::ALL {
            let na = g1.step(a, g).expect("complete ball");
            let nb = g2.step(b, g).expect("complete ball");
            match (fwd.get(&na), bwd.get(&nb)) {
                (Some(&x), Some(&y)) => {
                    if x != nb || y != na {
                        return Ok(false);
                    }
                }
                (None, None) => {
                    fwd.insert(na, nb);
                    bwd.insert(nb, na);
                    queue.push_back((na, nb, d + 1));
                }
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Incremental construction of a graph snapshot.
pub(crate) struct GraphBuilder {
    g: RootedLabelledGraph,
}

impl GraphBuilder {
    pub(crate) fn new(radius: u32) -> Self {
        GraphBuilder {
            g: RootedLabelledGraph {
                payloads: Vec::new(),
                dist: Vec::new(),
                out: Vec::new(),
                inn: Vec::new(),
                root: 0,
                radius,
            },
        }
    }

    pub(crate) fn add_vertex(&mut self, payload: Payload, dist: u32) -> usize {
        self.g.payloads.push(payload);
        self.g.dist.push(dist);
        self.g.out.push([None; 2]);
        self.g.inn.push([None; 2]);
        self.g.payloads.len() - 1
    }

    pub(crate) fn step(&self, v: usize, g: Generator) -> Option<usize> {
        self.g.step(v, g)
    }

    /// Records `g(v) = w` together with the reverse edge.
    pub(crate) fn link(&mut self, v: usize, g: Generator, w: usize) {
        let l = g.label.index();
        let (fwd, bwd) = if g.inverse {
            (&mut self.g.inn, &mut self.g.out)
        } else {
            (&mut self.g.out, &mut self.g.inn)
        };
        debug_assert!(fwd[v][l].is_none_or(|x| x as usize == w));
        debug_assert!(bwd[w][l].is_none_or(|x| x as usize == v));
        fwd[v][l] = Some(w as u32);
        bwd[w][l] = Some(v as u32);
    }

    pub(crate) fn finish(self) -> RootedLabelledGraph {
        self.g
    }
}

/// Result of a breadth-first exploration.
pub(crate) struct Explored<S> {
    pub graph: RootedLabelledGraph,
    pub states: Vec<S>,
    /// BFS tree: the parent and the generator leading to each vertex.
    pub parents: Vec<Option<(usize, Generator)>>,
}

/// Explores the orbit of `root` under the four generators up to `radius`.
///
/// Vertices are bucketed by `key`; two states with the same key are
/// identified when `same` says so. `key` must agree on states that `same`
/// identifies.
pub(crate) fn explore<S, K: Hash + Eq>(
    root: S,
    radius: u32,
    max_vertices: usize,
    mut act: impl FnMut(&S, Generator) -> Result<S>,
    mut key: impl FnMut(&S) -> K,
    mut same: impl FnMut(&S, &S) -> Result<bool>,
    payload: impl Fn(&S) -> Payload,
) -> Result<Explored<S>> {
    let mut b = GraphBuilder::new(radius);
    let mut buckets: HashMap<K, Vec<usize>> = HashMap::new();
    b.add_vertex(payload(&root), 0);
    buckets.insert(key(&root), vec![0]);
    let mut states = vec![root];
    let mut parents = vec![None];
    let mut i = 0;
    while i < states.len() {
        let d = b.g.dist[i];
        if d >= radius {
            i += 1;
            continue;
        }
        for g in Generator::ALL {
            if b.step(i, g).is_some() {
                continue;
            }
            let next = act(&states[i], g)?;
            let k = key(&next);
            let mut found = None;
            if let Some(bucket) = buckets.get(&k) {
                for &j in bucket {
                    if same(&states[j], &next)? {
                        found = Some(j);
                        break;
                    }
                }
            }
            let w = match found {
                Some(j) => j,
                None => {
                    if states.len() >= max_vertices {
                        return Err(Error::ResourceLimit(format!(
                            "more than {max_vertices} vertices needed at radius {}",
                            d + 1
                        )));
                    }
                    let j = b.add_vertex(payload(&next), d + 1);
                    buckets.entry(k).or_default().push(j);
                    states.push(next);
                    parents.push(Some((i, g)));
                    j
                }
            };
            b.link(i, g, w);
        }
        i += 1;
    }
    Ok(Explored {
        graph: b.finish(),
        states,
        parents,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    root: usize,
    radius: u32,
    vertices: Vec<VertexJson>,
    edges: Vec<(usize, usize, Label)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    dist: u32,
    payload: Payload,
}

impl Serialize for RootedLabelledGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            root: self.root,
            radius: self.radius,
            vertices: self
                .payloads
                .iter()
                .zip(&self.dist)
                .map(|(p, &dist)| VertexJson {
                    dist,
                    payload: p.clone(),
                })
                .collect(),
            edges: self.edges(),
        }
        .serialize(s)
    }
}

impl TryFrom<GraphJson> for RootedLabelledGraph {
    type Error = Error;
    fn try_from(raw: GraphJson) -> Result<Self> {
        let n = raw.vertices.len();
        if raw.root >= n {
            return Err(Error::schema("root", format!("root {} out of range", raw.root)));
        }
        if raw.vertices[raw.root].dist != 0 {
            return Err(Error::schema("vertices[root].dist", "root must have distance 0"));
        }
        let mut b = GraphBuilder::new(raw.radius);
        b.g.root = raw.root;
        for (i, v) in raw.vertices.into_iter().enumerate() {
            if v.dist > raw.radius {
                return Err(Error::schema(format!("vertices[{i}].dist"), "beyond radius"));
            }
            b.add_vertex(v.payload, v.dist);
        }
        for (i, (v, w, l)) in raw.edges.into_iter().enumerate() {
            if v >= n || w >= n {
                return Err(Error::schema(format!("edges[{i}]"), "vertex index out of range"));
            }
            let li = l.index();
            if b.g.out[v][li].is_some() || b.g.inn[w][li].is_some() {
                return Err(Error::schema(
                    format!("edges[{i}]"),
                    format!("second {l}-edge at a vertex; graphs must be deterministic"),
                ));
            }
            b.link(v, Generator { label: l, inverse: false }, w);
        }
        Ok(b.finish())
    }
}

impl<'de> Deserialize<'de> for RootedLabelledGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        RootedLabelledGraph::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl FromStr for RootedLabelledGraph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }
}
