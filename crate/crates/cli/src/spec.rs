//! Textual graph descriptions: `cayley`, `orbit:P`, `orbit:P@Q` (the orbital
//! graph of P rooted at Q), and `coset:KIND[:DATA]`.

use std::fmt;
use std::str::FromStr;

use thompson_core::cayley::{cayley_ball_limited, DEFAULT_RADIUS_CAP};
use thompson_core::schreier::{coset_ball_limited, orbital_ball_limited};
use thompson_core::{Error, Point, Result, RootedLabelledGraph, SubgroupOracle};

/// How far from the base point a requested root may lie.
const ROOT_SEARCH_LIMIT: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Cayley,
    Orbit { point: Point, root: Option<Point> },
    /// The oracle and its `KIND[:DATA]` text.
    Coset(SubgroupOracle, String),
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedOracle(format!("graph spec {s:?}: {reason}"));
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s.trim(), None),
        };
        match (head, rest) {
            ("cayley", None) => Ok(GraphSpec::Cayley),
            ("orbit", Some(r)) => {
                let (p, root) = match r.split_once('@') {
                    Some((p, q)) => (p, Some(q.trim().parse()?)),
                    None => (r, None),
                };
                Ok(GraphSpec::Orbit {
                    point: p.trim().parse()?,
                    root,
                })
            }
            ("coset", Some(r)) => {
                let (kind, data) = r.split_once(':').unwrap_or((r, ""));
                let (kind, data) = (kind.trim(), data.trim());
                let text = if data.is_empty() { kind.to_string() } else { format!("{kind}:{data}") };
                Ok(GraphSpec::Coset(SubgroupOracle::parse(kind, data)?, text))
            }
            _ => Err(bad("expected cayley, orbit:P[@Q] or coset:KIND[:DATA]")),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cayley => f.write_str("cayley"),
            GraphSpec::Orbit { point, root: None } => write!(f, "orbit:{point}"),
            GraphSpec::Orbit { point, root: Some(q) } => write!(f, "orbit:{point}@{q}"),
            GraphSpec::Coset(_, text) => write!(f, "coset:{text}"),
        }
    }
}

/// A computed snapshot together with the vertex that plays the root.
pub struct Built {
    pub graph: RootedLabelledGraph,
    pub center: usize,
}

pub struct Limits {
    pub max_vertices: usize,
    pub allow_large: bool,
}

impl Limits {
    pub fn cayley_radius(&self, radius: u32) -> Result<()> {
        if radius > DEFAULT_RADIUS_CAP && !self.allow_large {
            return Err(Error::ResourceLimit(format!(
                "Cayley balls beyond radius {DEFAULT_RADIUS_CAP} need --allow-large (asked for {radius})"
            )));
        }
        Ok(())
    }
}

impl GraphSpec {
    /// Builds enough of the graph that every ball of radius `around` at the
    /// center is complete.
    pub fn build(&self, around: u32, limits: &Limits) -> Result<Built> {
        let cap = limits.max_vertices;
        match self {
            GraphSpec::Cayley => {
                limits.cayley_radius(around)?;
                let graph = cayley_ball_limited(around, cap)?.graph;
                Ok(Built { center: graph.root(), graph })
            }
            GraphSpec::Coset(h, _) => {
                let graph = coset_ball_limited(h, around, cap)?;
                Ok(Built { center: graph.root(), graph })
            }
            GraphSpec::Orbit { point, root: None } => {
                let graph = orbital_ball_limited(point, around, cap)?;
                Ok(Built { center: graph.root(), graph })
            }
            GraphSpec::Orbit { point, root: Some(q) } => {
                let depth = locate(point, q, cap)?;
                let graph = orbital_ball_limited(point, depth + around, cap)?;
                let center = graph.find_point(q).expect("found at this depth before");
                Ok(Built { graph, center })
            }
        }
    }
}

/// Distance from `p` to `q` in the orbital graph of `p`.
fn locate(p: &Point, q: &Point, cap: usize) -> Result<u32> {
    let mut r = 1;
    loop {
        let g = orbital_ball_limited(p, r, cap)?;
        if let Some(v) = g.find_point(q) {
            return Ok(g.depth(v));
        }
        if r == ROOT_SEARCH_LIMIT {
            return Err(Error::Degenerate(format!(
                "{q} is not within distance {ROOT_SEARCH_LIMIT} of {p} in its orbit"
            )));
        }
        r = (r * 2).min(ROOT_SEARCH_LIMIT);
    }
}
