//! Constructive steps behind the confinement characterisation: disjoint-support
//! confining sets, the interval chain for a finite family of elements, the
//! push-left exponent, and finite checks of the germ-stabiliser identity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{enumerate_commutator_ball, Word};
use crate::dyadic::{Dyadic, Point};
use crate::element::{bump, Interval, PLMap};
use crate::error::{Error, Result};
use crate::schreier::{OracleKind, SubgroupOracle};

/// Nontrivial elements `g₁, …, g_r` such that some `g_i` lies in every
/// conjugate `kHk⁻¹` that was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfiningSet {
    pub elements: Vec<PLMap>,
    pub supports: Vec<Interval>,
    /// The finite set S the construction avoids.
    pub avoided: Vec<Point>,
    /// Subgroup the set is meant for.
    pub target: String,
    /// Largest conjugator radius at which confinement was checked, if any.
    pub certificate_radius: Option<u32>,
}

fn check_open_set(set: &[Point]) -> Result<Vec<Point>> {
    for p in set {
        if !p.in_open_unit() {
            return Err(Error::OutOfRange(p.to_string(), "the open interval (0, 1)"));
        }
    }
    let mut s = set.to_vec();
    s.sort();
    s.dedup();
    Ok(s)
}

/// `|S| + 1` bumps supported on the pairwise disjoint intervals
/// `[2^-(i+1), 3·2^-(i+2)]`, `i = 1..=|S|+1`.
pub fn build_confining_set(set: &[Point]) -> Result<ConfiningSet> {
    let set = check_open_set(set)?;
    let r = set.len() + 1;
    let mut elements = Vec::with_capacity(r);
    let mut supports = Vec::with_capacity(r);
    for i in 1..=r as u32 {
        let lo = Dyadic::pow2_recip(i + 1);
        let hi = Dyadic::new(3, i + 2);
        let g = bump(&lo, &hi)?;
        supports.extend(g.support());
        elements.push(g);
    }
    let target = SubgroupOracle::new(OracleKind::GermStabCommutator(set.clone()))?.name;
    Ok(ConfiningSet {
        elements,
        supports,
        avoided: set,
        target,
        certificate_radius: None,
    })
}

/// Outcome of checking `kHk⁻¹ ∩ P ≠ ∅` over a finite family of conjugators.
/// A pass is evidence only; a failure is a genuine counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfinementReport {
    pub subgroup: String,
    pub radius: u32,
    pub conjugators_checked: usize,
    pub passed: bool,
    /// First conjugator `k` with `k⁻¹ g k ∉ H` for every `g ∈ P`.
    pub witness: Option<Word>,
    pub note: String,
}

/// Checks, for every `k` in the F' part of the radius-`radius` Cayley ball,
/// that some `g ∈ P` satisfies `k⁻¹ g k ∈ H` (equivalently `g ∈ kHk⁻¹`).
pub fn verify_confining(h: &SubgroupOracle, p: &[PLMap], radius: u32) -> Result<ConfinementReport> {
    let conjugators = enumerate_commutator_ball(radius)?;
    Ok(verify_confining_over(h, p, radius, &conjugators))
}

pub fn verify_confining_over(
    h: &SubgroupOracle,
    p: &[PLMap],
    radius: u32,
    conjugators: &[(PLMap, Word)],
) -> ConfinementReport {
    let witness = conjugators
        .par_iter()
        .find_first(|(k, _)| !p.iter().any(|g| h.member(&g.conjugate(k))))
        .map(|(_, w)| w.clone());
    let passed = witness.is_none();
    let note = if passed {
        format!(
            "every one of the {} sampled conjugators from F' hit H; this is evidence, not a proof",
            conjugators.len()
        )
    } else {
        "counterexample: this conjugate of H misses P entirely".to_string()
    };
    ConfinementReport {
        subgroup: h.name.clone(),
        radius,
        conjugators_checked: conjugators.len(),
        passed,
        witness,
        note,
    }
}

/// First conjugator for which no `k⁻¹ g k` has support disjoint from `set`,
/// or `None` if the pigeonhole property holds for all of them.
pub fn pigeonhole_failure<'a>(
    set: &[Point],
    p: &[PLMap],
    conjugators: &'a [(PLMap, Word)],
) -> Option<&'a Word> {
    conjugators
        .iter()
        .find(|(k, _)| {
            !p.iter().any(|g| {
                g.conjugate(k)
                    .support()
                    .iter()
                    .all(|iv| set.iter().all(|s| !iv.contains(s)))
            })
        })
        .map(|(_, w)| w)
}

/// Elements and open intervals with
/// `g₁(U₁) < U₁ < g₂(U₂) < U₂ < … < g_r(U_r) < U_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalChain {
    pub elements: Vec<PLMap>,
    pub intervals: Vec<Interval>,
    /// Position of each element in the input.
    pub source_index: Vec<usize>,
    /// Whether the input element was replaced by its inverse.
    pub inverted: Vec<bool>,
}

impl IntervalChain {
    pub fn ordering_holds(&self) -> Result<bool> {
        chain_ordering_holds(&self.elements, &self.intervals)
    }
}

/// Checks the chain ordering exactly, where `(a, b) < (c, d)` iff `b < c`.
pub fn chain_ordering_holds(elements: &[PLMap], intervals: &[Interval]) -> Result<bool> {
    if elements.len() != intervals.len() {
        return Err(Error::LengthMismatch(elements.len(), intervals.len()));
    }
    let mut prev: Option<&Interval> = None;
    for (g, u) in elements.iter().zip(intervals) {
        let image = u.image(g)?;
        if let Some(p) = prev {
            if !p.precedes(&image) {
                return Ok(false);
            }
        }
        if !image.precedes(u) {
            return Ok(false);
        }
        prev = Some(u);
    }
    Ok(true)
}

/// Builds an interval chain for nontrivial `gs`, after reordering and
/// inverting some of them.
///
/// The element whose support reaches furthest right (first one on ties) goes
/// last. If it pushes points right just below the supremum `s` of its
/// support, it is inverted. The rest are chained recursively, ending below
/// some `M < s`; then `v = s - (s - M)/2^j` is scanned for the first `j` with
/// `g(v) < v` and `M < g(g(v))`, and `U = (u, v)` with `u` the simplest
/// dyadic in `(g(v), v)`. Then `g(U) = (g(u), g(v))` ends before `u`, and
/// starts after `M` since `g(u) > g(g(v))`.
pub fn lemma_interval_chain(gs: &[PLMap]) -> Result<IntervalChain> {
    if gs.iter().any(PLMap::is_identity) {
        return Err(Error::TrivialElement);
    }
    let mut remaining: Vec<(usize, PLMap)> = gs.iter().cloned().enumerate().collect();
    // peel elements off from the right end, then build intervals left to right
    let mut order = Vec::with_capacity(gs.len());
    while !remaining.is_empty() {
        let mut best = 0;
        for i in 1..remaining.len() {
            if remaining[i].1.support_sup() > remaining[best].1.support_sup() {
                best = i;
            }
        }
        order.push(remaining.remove(best));
    }
    order.reverse();

    let mut chain = IntervalChain {
        elements: Vec::new(),
        intervals: Vec::new(),
        source_index: Vec::new(),
        inverted: Vec::new(),
    };
    let mut floor = Dyadic::zero();
    for (idx, g) in order {
        let s = g.support_sup().expect("nontrivial");
        let invert = g.left_slope(&s).expect("sup of support is positive") < 0;
        let g = if invert { g.inverse() } else { g };
        let gap = &s - &floor;
        let mut j = 1;
        let v = loop {
            let v = &s - &gap.halve(j);
            let gv = g.eval(&v)?;
            if gv < v && floor < g.eval(&gv)? {
                break v;
            }
            j += 1;
        };
        let gv = g.eval(&v)?;
        let u = Dyadic::simplest_between(&gv, &v).expect("g(v) < v");
        chain.intervals.push(Interval::open(u, v.clone())?);
        chain.elements.push(g);
        chain.source_index.push(idx);
        chain.inverted.push(invert);
        floor = v;
    }
    Ok(chain)
}

/// Least `k ≥ 0` with `x0^k(s) < 1/2` for every `s` in the set.
pub fn push_left(set: &[Point]) -> Result<u32> {
    let set = check_open_set(set)?;
    let x0 = PLMap::x0();
    let half = Point::Dyadic(Dyadic::pow2_recip(1));
    let mut pts = set;
    let mut k = 0;
    while pts.iter().any(|p| p >= &half) {
        pts = pts.iter().map(|p| x0.eval(p)).collect::<Result<_>>()?;
        k += 1;
    }
    Ok(k)
}

/// One sample of the comparison between `St⁰_{F'}(S)` and `St⁰_F(S ∪ {0, 1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermCheckRow {
    pub element: PLMap,
    pub in_commutator_germ_stab: bool,
    pub in_extended_germ_stab: bool,
}

impl GermCheckRow {
    pub fn agrees(&self) -> bool {
        self.in_commutator_germ_stab == self.in_extended_germ_stab
    }
}

/// Evaluates both sides of `St⁰_{F'}(S) = St⁰_F(S ∪ {0, 1})` on each sample.
pub fn germ_identity_check(set: &[Point], samples: &[PLMap]) -> Result<Vec<GermCheckRow>> {
    let set = check_open_set(set)?;
    let mut extended = set.clone();
    extended.push(Point::Dyadic(Dyadic::zero()));
    extended.push(Point::Dyadic(Dyadic::one()));
    let lhs = |g: &PLMap| -> Result<bool> {
        if !g.in_commutator() {
            return Ok(false);
        }
        for s in &set {
            if !g.is_germ_trivial_at(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let rhs = |g: &PLMap| -> Result<bool> {
        for s in &extended {
            if !g.is_germ_trivial_at(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    samples
        .iter()
        .map(|g| {
            Ok(GermCheckRow {
                element: g.clone(),
                in_commutator_germ_stab: lhs(g)?,
                in_extended_germ_stab: rhs(g)?,
            })
        })
        .collect()
}
