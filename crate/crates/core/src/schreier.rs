//! Orbital and coset graphs of F, subgroup membership oracles, and the
//! rooted-ball distance between labelled graphs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cayley::{cayley_ball, DEFAULT_MAX_VERTICES};
use crate::dyadic::{Point, Rational};
use crate::element::{AbelianImage, PLMap};
use crate::error::{Error, Result};
use crate::graph::{ball_isomorphic, explore, Generator, Payload, RootedLabelledGraph};

pub use crate::graph::ball_isomorphic as balls_isomorphic;

/// The defining data of a subgroup with decidable membership.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum OracleKind {
    /// The trivial subgroup {1}.
    Trivial,
    /// F itself.
    Whole,
    /// Stabiliser of a point.
    PointStab(Point),
    /// Pointwise stabiliser of a finite tuple.
    TupleStab(Vec<Point>),
    /// Elements acting trivially on a neighbourhood of every point of S.
    GermStab(Vec<Point>),
    /// Germ stabiliser of S inside F', i.e. the germ stabiliser of S ∪ {0, 1}.
    GermStabCommutator(Vec<Point>),
    /// The cyclic subgroup generated by an element.
    Cyclic(PLMap),
    /// The commutator subgroup F'.
    Commutator,
}

/// A subgroup of F given by a membership predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupOracle {
    pub name: String,
    pub kind: OracleKind,
}

/// Invariant of a coset `gH`: equal cosets have equal keys. Used to
/// bucket candidates before the exact membership test.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CosetKey {
    None,
    Element(PLMap),
    Points(Vec<Point>),
    PointsAndGerms(Vec<Point>, AbelianImage),
    Germs(AbelianImage),
}

fn check_points(points: &[Point]) -> Result<()> {
    for p in points {
        if !p.in_closed_unit() {
            return Err(Error::MalformedOracle(format!("{p} lies outside [0, 1]")));
        }
    }
    Ok(())
}

fn sorted_set(mut points: Vec<Point>) -> Vec<Point> {
    points.sort();
    points.dedup();
    points
}

fn fmt_points(points: &[Point]) -> String {
    points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

impl SubgroupOracle {
    pub fn new(kind: OracleKind) -> Result<Self> {
        let kind = match kind {
            OracleKind::PointStab(p) => {
                check_points(std::slice::from_ref(&p))?;
                OracleKind::PointStab(p)
            }
            OracleKind::TupleStab(ps) => {
                check_points(&ps)?;
                let n = ps.len();
                if sorted_set(ps.clone()).len() != n {
                    return Err(Error::MalformedOracle("tuple entries must be distinct".into()));
                }
                OracleKind::TupleStab(ps)
            }
            OracleKind::GermStab(ps) => {
                check_points(&ps)?;
                OracleKind::GermStab(sorted_set(ps))
            }
            OracleKind::GermStabCommutator(ps) => {
                check_points(&ps)?;
                OracleKind::GermStabCommutator(sorted_set(ps))
            }
            other => other,
        };
        let name = match &kind {
            OracleKind::Trivial => "trivial".to_string(),
            OracleKind::Whole => "whole".to_string(),
            OracleKind::PointStab(p) => format!("point_stab({p})"),
            OracleKind::TupleStab(ps) => format!("tuple_stab({})", fmt_points(ps)),
            OracleKind::GermStab(ps) => format!("germ_stab({})", fmt_points(ps)),
            OracleKind::GermStabCommutator(ps) => {
                format!("germ_stab_commutator({})", fmt_points(ps))
            }
            OracleKind::Cyclic(g) => format!("cyclic({g})"),
            OracleKind::Commutator => "commutator".to_string(),
        };
        Ok(SubgroupOracle { name, kind })
    }

    /// Builds an oracle from a kind name and its textual data: a point or a
    /// comma-separated point list, or a word for `cyclic`.
    pub fn parse(kind: &str, data: &str) -> Result<Self> {
        let points = || -> Result<Vec<Point>> {
            data.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect()
        };
        let kind = match kind {
            "trivial" => OracleKind::Trivial,
            "whole" => OracleKind::Whole,
            "commutator" => OracleKind::Commutator,
            "point_stab" => {
                let mut ps = points()?;
                if ps.len() != 1 {
                    return Err(Error::MalformedOracle("point_stab needs exactly one point".into()));
                }
                OracleKind::PointStab(ps.remove(0))
            }
            "tuple_stab" => OracleKind::TupleStab(points()?),
            "germ_stab" => OracleKind::GermStab(points()?),
            "germ_stab_commutator" => OracleKind::GermStabCommutator(points()?),
            "cyclic" => OracleKind::Cyclic(data.parse::<crate::cayley::Word>()?.eval()),
            other => return Err(Error::MalformedOracle(format!("unknown oracle kind {other:?}"))),
        };
        SubgroupOracle::new(kind)
    }

    fn germ_trivial_on(g: &PLMap, points: &[Point]) -> bool {
        points
            .iter()
            .all(|s| g.is_germ_trivial_at(s).expect("points validated to lie in [0, 1]"))
    }

    pub fn member(&self, g: &PLMap) -> bool {
        match &self.kind {
            OracleKind::Trivial => g.is_identity(),
            OracleKind::Whole => true,
            OracleKind::PointStab(p) => g.eval(p).expect("validated point") == *p,
            OracleKind::TupleStab(ps) => ps.iter().all(|p| g.eval(p).expect("validated point") == *p),
            OracleKind::GermStab(ps) => Self::germ_trivial_on(g, ps),
            OracleKind::GermStabCommutator(ps) => {
                g.in_commutator() && Self::germ_trivial_on(g, ps)
            }
            OracleKind::Cyclic(g0) => cyclic_member(g0, g),
            OracleKind::Commutator => g.in_commutator(),
        }
    }

    fn coset_key(&self, g: &PLMap) -> CosetKey {
        let images = |ps: &[Point]| -> Vec<Point> {
            ps.iter().map(|p| g.eval(p).expect("validated point")).collect()
        };
        match &self.kind {
            OracleKind::Trivial => CosetKey::Element(g.clone()),
            OracleKind::Whole | OracleKind::Cyclic(_) => CosetKey::None,
            OracleKind::PointStab(p) => CosetKey::Points(images(std::slice::from_ref(p))),
            OracleKind::TupleStab(ps) | OracleKind::GermStab(ps) => CosetKey::Points(images(ps)),
            OracleKind::GermStabCommutator(ps) => {
                CosetKey::PointsAndGerms(images(ps), g.abelianize())
            }
            OracleKind::Commutator => CosetKey::Germs(g.abelianize()),
        }
    }

    /// Whether `g1 H = g2 H`, i.e. `g2⁻¹ g1 ∈ H`.
    pub fn same_coset(&self, g1: &PLMap, g2: &PLMap) -> bool {
        self.member(&g2.inverse().compose(g1))
    }
}

/// Membership in `<g0>`: the exponent is forced by the germ of `g0` at the
/// left end of its support, then checked exactly.
fn cyclic_member(g0: &PLMap, g: &PLMap) -> bool {
    if g.is_identity() {
        return true;
    }
    let Some(s) = g0.support_inf() else {
        return false;
    };
    let c = g0.right_slope(&s).expect("support starts below 1");
    let Some(cg) = g.right_slope(&s) else {
        return false;
    };
    if cg % c != 0 {
        return false;
    }
    g0.power(i64::from(cg / c)) == *g
}

impl fmt::Display for SubgroupOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The orbital graph of `p` out to distance `radius`.
pub fn orbital_ball(p: &Point, radius: u32) -> Result<RootedLabelledGraph> {
    orbital_ball_limited(p, radius, DEFAULT_MAX_VERTICES)
}

pub fn orbital_ball_limited(p: &Point, radius: u32, max_vertices: usize) -> Result<RootedLabelledGraph> {
    if !p.in_open_unit() {
        return Err(Error::OutOfRange(p.to_string(), "the open interval (0, 1)"));
    }
    let gens: [PLMap; 4] = Generator::ALL.map(|g| g.element());
    let explored = explore(
        p.clone(),
        radius,
        max_vertices,
        |q, s| {
            let i = Generator::ALL.iter().position(|x| *x == s).unwrap();
            gens[i].eval(q)
        },
        |q| q.clone(),
        |_, _| Ok(true),
        |q| Payload::Point(q.clone()),
    )?;
    Ok(explored.graph)
}

/// The Schreier graph of `H`: cosets `gH` with edges `gH → s·gH`, rooted at
/// `H`. For `H = St(p)` the map `gH ↦ g(p)` identifies it with the orbital
/// graph of `p`. Payloads carry a representative of each coset.
///
/// Cosets are bucketed by an invariant of the subgroup kind (images of the
/// defining points, germs at the endpoints) and compared exactly within each
/// bucket; kinds without an invariant fall back to comparing against every
/// known coset.
pub fn coset_ball(h: &SubgroupOracle, radius: u32) -> Result<RootedLabelledGraph> {
    coset_ball_limited(h, radius, DEFAULT_MAX_VERTICES)
}

pub fn coset_ball_limited(
    h: &SubgroupOracle,
    radius: u32,
    max_vertices: usize,
) -> Result<RootedLabelledGraph> {
    let gens: [PLMap; 4] = Generator::ALL.map(|g| g.element());
    let explored = explore(
        PLMap::identity(),
        radius,
        max_vertices,
        |g, s| {
            let i = Generator::ALL.iter().position(|x| *x == s).unwrap();
            Ok(gens[i].compose(g))
        },
        |g| h.coset_key(g),
        |a, b| Ok(h.same_coset(a, b)),
        |g| Payload::Element(g.clone()),
    )?;
    Ok(explored.graph)
}

/// Distance `1/(n+1)` between two rooted labelled graphs, where `n` is the
/// least radius at which their balls differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChabautyDistance {
    /// Least radius with non-isomorphic balls, if one was found.
    pub witness_radius: Option<u32>,
    /// Largest radius compared.
    pub max_radius: u32,
}

impl ChabautyDistance {
    /// The exact value when a witness exists.
    pub fn value(&self) -> Option<Rational> {
        self.witness_radius
            .map(|n| Rational::new(1, i64::from(n) + 1).expect("nonzero"))
    }

    /// Upper bound `1/(max_radius + 2)` when all compared balls agree.
    pub fn upper_bound(&self) -> Rational {
        match self.value() {
            Some(v) => v,
            None => Rational::new(1, i64::from(self.max_radius) + 2).expect("nonzero"),
        }
    }
}

impl fmt::Display for ChabautyDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "<= {}", self.upper_bound()),
        }
    }
}

pub fn chabauty_distance(
    g1: &RootedLabelledGraph,
    g2: &RootedLabelledGraph,
    max_radius: u32,
) -> Result<ChabautyDistance> {
    chabauty_distance_at(g1, g1.root(), g2, g2.root(), max_radius)
}

/// As [`chabauty_distance`], with both graphs re-rooted at the given vertices.
pub fn chabauty_distance_at(
    g1: &RootedLabelledGraph,
    v1: usize,
    g2: &RootedLabelledGraph,
    v2: usize,
    max_radius: u32,
) -> Result<ChabautyDistance> {
    g1.check_ball(v1, max_radius)?;
    g2.check_ball(v2, max_radius)?;
    let mut witness = None;
    for n in 0..=max_radius {
        if !ball_isomorphic(g1, v1, g2, v2, n)? {
            witness = Some(n);
            break;
        }
    }
    Ok(ChabautyDistance {
        witness_radius: witness,
        max_radius,
    })
}

/// Vertices of `g` whose radius-`n` ball is isomorphic to the radius-`n`
/// ball of the Cayley graph. Only vertices whose ball lies inside the
/// computed region are examined.
pub fn cayley_fragment_search(g: &RootedLabelledGraph, n: u32) -> Result<Vec<usize>> {
    let cayley = cayley_ball(n)?.graph;
    cayley_fragment_search_in(g, &cayley, n)
}

pub fn cayley_fragment_search_in(
    g: &RootedLabelledGraph,
    cayley: &RootedLabelledGraph,
    n: u32,
) -> Result<Vec<usize>> {
    let mut hits = Vec::new();
    for v in g.complete_centers(n) {
        if ball_isomorphic(g, v, cayley, cayley.root(), n)? {
            hits.push(v);
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::cayley_ball;
    use crate::dyadic::Dyadic;
    use crate::element::bump;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn vertex_set(g: &RootedLabelledGraph) -> Vec<Point> {
        let mut v: Vec<Point> = g
            .payloads()
            .iter()
            .map(|x| match x {
                Payload::Point(q) => q.clone(),
                Payload::Element(_) => unreachable!(),
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn orbital_ball_examples() {
        let g1 = orbital_ball(&p("1/2"), 1).unwrap();
        assert_eq!(vertex_set(&g1), vec![p("1/4"), p("1/2"), p("3/4")]);
        let g2 = orbital_ball(&p("1/2"), 2).unwrap();
        assert_eq!(
            vertex_set(&g2),
            ["1/8", "1/4", "1/2", "5/8", "3/4", "7/8"].map(p).to_vec()
        );
        assert_eq!(orbital_ball(&p("1/3"), 0).unwrap().len(), 1);
        assert!(orbital_ball(&p("0"), 2).is_err());
        assert!(orbital_ball(&p("3/2"), 2).is_err());
    }

    #[test]
    fn orbital_edges_follow_the_action() {
        let g = orbital_ball(&p("1/3"), 4).unwrap();
        for (v, w, l) in g.edges() {
            let (Payload::Point(a), Payload::Point(b)) = (g.payload(v), g.payload(w)) else {
                unreachable!()
            };
            assert_eq!(&l.element().eval(a).unwrap(), b);
        }
    }

    #[test]
    fn oracle_examples() {
        let stab = SubgroupOracle::parse("point_stab", "1/2").unwrap();
        assert!(stab.member(&PLMap::x1()));
        assert!(!stab.member(&PLMap::x0()));
        let germ = SubgroupOracle::parse("germ_stab", "1/4").unwrap();
        assert!(!germ.member(&PLMap::x0()));
        assert!(germ.member(&PLMap::x1()));
        let cyc = SubgroupOracle::new(OracleKind::Cyclic(PLMap::x0())).unwrap();
        assert!(cyc.member(&PLMap::x0().power(3)));
        assert!(cyc.member(&PLMap::x0().power(-2)));
        assert!(!cyc.member(&PLMap::x1()));
        assert!(!cyc.member(&PLMap::x0().compose(&PLMap::x1())));
        let b = bump(&Dyadic::pow2_recip(2), &Dyadic::pow2_recip(1)).unwrap();
        let cyc_b = SubgroupOracle::new(OracleKind::Cyclic(b.clone())).unwrap();
        assert!(cyc_b.member(&b.power(-3)));
        assert!(!cyc_b.member(&b.conjugate(&PLMap::x0())));
        assert!(SubgroupOracle::parse("point_stab", "2").is_err());
        assert!(SubgroupOracle::parse("nonsense", "").is_err());
        assert!(SubgroupOracle::parse("tuple_stab", "1/2,1/2").is_err());
    }

    #[test]
    fn germ_commutator_includes_endpoints() {
        let h = SubgroupOracle::parse("germ_stab_commutator", "1/4").unwrap();
        assert!(!h.member(&PLMap::x1()));
        let b = bump(&p("3/8").as_dyadic().unwrap().clone(), &p("7/16").as_dyadic().unwrap().clone())
            .unwrap();
        assert!(h.member(&b));
    }

    #[test]
    fn coset_ball_special_subgroups() {
        let trivial = SubgroupOracle::new(OracleKind::Trivial).unwrap();
        let g = coset_ball(&trivial, 3).unwrap();
        let c = cayley_ball(3).unwrap().graph;
        assert_eq!(g.canonical_code(0, 3).unwrap(), c.canonical_code(0, 3).unwrap());

        let whole = SubgroupOracle::new(OracleKind::Whole).unwrap();
        let g = coset_ball(&whole, 3).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.edges().len(), 2);
        for s in Generator::ALL {
            assert_eq!(g.step(0, s), Some(0));
        }
    }

    #[test]
    fn point_stabiliser_matches_orbit() {
        for (pt, n) in [("1/2", 4), ("1/3", 4), ("5/8", 3)] {
            let h = SubgroupOracle::parse("point_stab", pt).unwrap();
            let a = coset_ball(&h, n).unwrap();
            let b = orbital_ball(&p(pt), n).unwrap();
            assert_eq!(a.canonical_code(0, n).unwrap(), b.canonical_code(0, n).unwrap());
        }
    }

    #[test]
    fn isomorphism_and_distance() {
        let orb = orbital_ball(&p("1/2"), 4).unwrap();
        let cay = cayley_ball(4).unwrap().graph;
        assert!(ball_isomorphic(&orb, 0, &orb, 0, 4).unwrap());
        assert!(ball_isomorphic(&orb, 0, &cay, 0, 0).unwrap());
        assert!(!ball_isomorphic(&orb, 0, &cay, 0, 1).unwrap());
        let d = chabauty_distance(&orb, &cay, 4).unwrap();
        assert_eq!(d.witness_radius, Some(1));
        assert_eq!(d.value(), Some(Rational::new(1, 2).unwrap()));
        let same = chabauty_distance(&cay, &cay, 4).unwrap();
        assert_eq!(same.witness_radius, None);
        assert_eq!(same.to_string(), "<= 1/6");
        assert!(matches!(
            ball_isomorphic(&orb, 0, &cay, 0, 5),
            Err(Error::InsufficientRadius { .. })
        ));
    }

    #[test]
    fn rerooting_changes_distance() {
        let orb = orbital_ball(&p("1/2"), 6).unwrap();
        let quarter = orb.find_point(&p("1/4")).unwrap();
        let d = chabauty_distance_at(&orb, 0, &orb, quarter, 5).unwrap();
        // 1/2 has an x1-loop, 1/4 has loops for both x1 and... only x1; the
        // balls first differ once the x0-neighbourhoods diverge
        assert!(d.witness_radius.is_some());
    }

    #[test]
    fn fragment_search_radius_zero_takes_everything() {
        let orb = orbital_ball(&p("1/2"), 3).unwrap();
        assert_eq!(cayley_fragment_search(&orb, 0).unwrap().len(), orb.len());
        let triv = coset_ball(&SubgroupOracle::new(OracleKind::Trivial).unwrap(), 3).unwrap();
        let n = 1;
        let hits = cayley_fragment_search(&triv, n).unwrap();
        assert_eq!(hits.len(), triv.complete_centers(n).count());
    }
}
