//! Growth tables and their log-linear fits, Følner ratios, wobbling
//! displacement, and the exact check that x1 fixes a set pushed left by x0.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::Word;
use crate::constructions::push_left;
use crate::dyadic::{Point, Rational};
use crate::element::PLMap;
use crate::error::{Error, Result};
use crate::graph::{Payload, RootedLabelledGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub graph_id: String,
    /// Exact point for orbital graphs, `#index` otherwise.
    pub root: String,
    pub n: u32,
    pub ball_size: u64,
}

/// Exact ball sizes `|B(v, n)|` for a sample of roots and `n = 0..=max_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub graph_id: String,
    pub max_n: u32,
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    /// Builds a table from rows, checking they describe one graph and that
    /// each root has a nondecreasing run starting at `|B(0)| = 1`.
    pub fn from_rows(rows: Vec<GrowthRow>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Degenerate("growth table has no rows".into()))?;
        let graph_id = first.graph_id.clone();
        let mut max_n = 0;
        let mut prev: Option<&GrowthRow> = None;
        for (i, r) in rows.iter().enumerate() {
            if r.graph_id != graph_id {
                return Err(Error::schema(format!("rows[{i}].graph_id"), "mixed graph ids"));
            }
            let fresh_root = prev.is_none_or(|p| p.root != r.root);
            if fresh_root {
                if r.n != 0 || r.ball_size != 1 {
                    return Err(Error::schema(format!("rows[{i}]"), "each root must start with n = 0, size 1"));
                }
            } else {
                let p = prev.unwrap();
                if r.n != p.n + 1 || r.ball_size < p.ball_size {
                    return Err(Error::schema(format!("rows[{i}]"), "radii must be consecutive with nondecreasing sizes"));
                }
            }
            max_n = max_n.max(r.n);
            prev = Some(r);
        }
        Ok(GrowthTable { graph_id, max_n, rows })
    }

    /// `max_v |B(v, n)|` over the sampled roots, for `n = 0..=max_n`. A lower
    /// bound for the uniform growth function, never the supremum itself.
    pub fn sup_sizes(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.max_n as usize + 1];
        for r in &self.rows {
            let slot = &mut out[r.n as usize];
            *slot = (*slot).max(r.ball_size);
        }
        out
    }

    pub fn roots(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if seen.last() != Some(&r.root.as_str()) {
                seen.push(r.root.as_str());
            }
        }
        seen
    }
}

fn root_label(g: &RootedLabelledGraph, v: usize) -> String {
    match g.payload(v) {
        Payload::Point(p) => p.to_string(),
        Payload::Element(_) => format!("#{v}"),
    }
}

/// Ball sizes around each sampled root. Every ball must lie inside the
/// computed region, so no size is truncated.
pub fn growth_table(
    g: &RootedLabelledGraph,
    graph_id: &str,
    roots: &[usize],
    max_n: u32,
) -> Result<GrowthTable> {
    if roots.is_empty() {
        return Err(Error::Degenerate("no roots sampled".into()));
    }
    for &v in roots {
        g.check_ball(v, max_n)?;
    }
    let per_root: Vec<Vec<GrowthRow>> = roots
        .par_iter()
        .map(|&v| {
            let mut counts = vec![0u64; max_n as usize + 1];
            for (_, d) in g.ball(v, max_n).expect("checked above") {
                counts[d as usize] += 1;
            }
            let label = root_label(g, v);
            let mut total = 0;
            counts
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    total += c;
                    GrowthRow {
                        graph_id: graph_id.to_string(),
                        root: label.clone(),
                        n: n as u32,
                        ball_size: total,
                    }
                })
                .collect()
        })
        .collect();
    Ok(GrowthTable {
        graph_id: graph_id.to_string(),
        max_n,
        rows: per_root.into_iter().flatten().collect(),
    })
}

/// The graph root plus up to `count - 1` further vertices whose radius-`max_n`
/// balls are complete, drawn with a seeded generator.
pub fn sample_roots(g: &RootedLabelledGraph, max_n: u32, count: usize, seed: u64) -> Vec<usize> {
    let others: Vec<usize> = g.complete_centers(max_n).filter(|&v| v != g.root()).collect();
    let mut out = Vec::with_capacity(count);
    if g.check_ball(g.root(), max_n).is_ok() && count > 0 {
        out.push(g.root());
    }
    let want = count.saturating_sub(out.len()).min(others.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = sample(&mut rng, others.len(), want).into_iter().map(|i| others[i]).collect();
    picked.sort_unstable();
    out.extend(picked);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    ExponentialEvidence,
    Inconclusive,
}

/// Heuristic thresholds for calling a table exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Inclusive range of radii to fit; `None` means the upper half of the table.
    pub window: Option<(u32, u32)>,
    pub min_rate: f64,
    pub min_r_squared: f64,
}

impl Default for GrowthFit {
    fn default() -> Self {
        GrowthFit {
            window: None,
            min_rate: 0.3,
            min_r_squared: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// Least-squares slope of `log₂ max_v |B(v, n)|` against `n`, in bits per step.
    pub fitted_rate: f64,
    pub r_squared: f64,
    pub classification: GrowthClass,
    pub window: (u32, u32),
    pub roots_sampled: usize,
    /// Lower bounds for the uniform growth function at each radius in the window.
    pub sup_lower_bounds: Vec<u64>,
}

pub fn uniform_growth_estimate(t: &GrowthTable, fit: &GrowthFit) -> Result<GrowthEstimate> {
    if t.max_n < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 4 radii, table stops at n = {}",
            t.max_n
        )));
    }
    let (lo, hi) = fit.window.unwrap_or((t.max_n.div_ceil(2), t.max_n));
    if lo > hi || hi > t.max_n || hi - lo < 1 {
        return Err(Error::Degenerate(format!(
            "window {lo}..={hi} does not fit a table with radii 0..={}",
            t.max_n
        )));
    }
    let sup = t.sup_sizes();
    let xs: Vec<f64> = (lo..=hi).map(f64::from).collect();
    let ys: Vec<f64> = (lo..=hi).map(|n| (sup[n as usize] as f64).log2()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    // a flat table is fitted exactly
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    let classification = if slope >= fit.min_rate && r_squared >= fit.min_r_squared {
        GrowthClass::ExponentialEvidence
    } else {
        GrowthClass::Inconclusive
    };
    Ok(GrowthEstimate {
        fitted_rate: slope,
        r_squared,
        classification,
        window: (lo, hi),
        roots_sampled: t.roots().len(),
        sup_lower_bounds: sup[lo as usize..=hi as usize].to_vec(),
    })
}

/// Whether `g(n) < f(C·n)` for every `n ≥ 1` that both tables cover.
pub fn growth_dominates(f: &GrowthTable, g: &GrowthTable, c: u32) -> Result<bool> {
    if c == 0 {
        return Err(Error::Degenerate("C must be positive".into()));
    }
    let top = g.max_n.min(f.max_n / c);
    if top < 1 {
        return Err(Error::Degenerate(format!(
            "no overlap: f reaches n = {}, g reaches n = {}, C = {c}",
            f.max_n, g.max_n
        )));
    }
    let (fs, gs) = (f.sup_sizes(), g.sup_sizes());
    Ok((1..=top).all(|n| gs[n as usize] < fs[(c * n) as usize]))
}

/// `|∂S| / |S|`, where `∂S` counts generator steps `v → s(v)` with
/// `s ∈ {x0, x1}^±1` leaving `S`. Every vertex of `S` must have all its
/// neighbours inside the computed region.
pub fn foelner_ratio(g: &RootedLabelledGraph, set: &[usize]) -> Result<Rational> {
    let s: HashSet<usize> = set.iter().copied().collect();
    if s.is_empty() {
        return Err(Error::Degenerate("empty vertex set".into()));
    }
    let mut boundary: i64 = 0;
    for &v in &s {
        if v >= g.len() {
            return Err(Error::UnknownVertex(v));
        }
        g.check_ball(v, 1)?;
        for gen in crate::graph::Generator::ALL {
            let w = g.step(v, gen).expect("checked above");
            if !s.contains(&w) {
                boundary += 1;
            }
        }
    }
    Rational::new(boundary, s.len() as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub word: Word,
    pub element: PLMap,
    pub max_observed: u32,
    pub vertices_checked: usize,
    /// Vertices too close to the computed frontier to measure.
    pub vertices_skipped: usize,
}

/// Largest `d(v, g·v)` over the vertices whose radius-`|w|` ball is complete.
/// `g·v` is reached by walking the letters of `w` from last to first, since
/// in a product the last factor acts first.
pub fn displacement(w: &Word, g: &RootedLabelledGraph) -> Result<DisplacementReport> {
    let len = w.len() as u32;
    let path: Vec<_> = w.letters().iter().rev().copied().collect();
    let centers: Vec<usize> = g.complete_centers(len).collect();
    let dists: Vec<u32> = centers
        .par_iter()
        .map(|&v| {
            let target = g.walk(v, &path).expect("path stays inside a complete ball");
            g.distance(v, target, len)
                .expect("complete ball")
                .expect("the path itself has length |w|")
        })
        .collect();
    Ok(DisplacementReport {
        word: w.clone(),
        element: w.eval(),
        max_observed: dists.into_iter().max().unwrap_or(0),
        vertices_checked: centers.len(),
        vertices_skipped: g.len() - centers.len(),
    })
}

/// After `k = push_left(S)` applications of x0 the set lies in (0, 1/2),
/// where x1 is the identity; `x1_fixes_all` records the exact check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushLeftReport {
    pub set: Vec<Point>,
    pub k: u32,
    pub pushed: Vec<Point>,
    pub x1_fixes_all: bool,
    /// Whether `k` is least: some point of `x0^(k-1)(S)` is still `≥ 1/2`.
    pub minimal: bool,
}

pub fn push_left_report(set: &[Point]) -> Result<PushLeftReport> {
    let k = push_left(set)?;
    let x0 = PLMap::x0();
    let x1 = PLMap::x1();
    let xk = x0.power(i64::from(k));
    let pushed: Vec<Point> = set.iter().map(|p| xk.eval(p)).collect::<Result<_>>()?;
    let mut x1_fixes_all = true;
    for p in &pushed {
        x1_fixes_all &= x1.eval(p)? == *p;
    }
    let minimal = if k == 0 {
        true
    } else {
        let before = x0.power(i64::from(k) - 1);
        let half: Point = Point::Dyadic(crate::dyadic::Dyadic::pow2_recip(1));
        let mut any = false;
        for p in set {
            any |= before.eval(p)? >= half;
        }
        any
    };
    Ok(PushLeftReport {
        set: set.to_vec(),
        k,
        pushed,
        x1_fixes_all,
        minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::cayley_ball;
    use crate::schreier::{coset_ball, orbital_ball, OracleKind, SubgroupOracle};

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn orbital_table_at_half() {
        let g = orbital_ball(&p("1/2"), 4).unwrap();
        let t = growth_table(&g, "orbit:1/2", &[g.root()], 4).unwrap();
        let sizes: Vec<u64> = t.rows.iter().map(|r| r.ball_size).collect();
        assert_eq!(&sizes[..3], &[1, 3, 6]);
        assert_eq!(t.rows[0].root.parse::<Point>().unwrap(), p("1/2"));
        assert!(matches!(
            growth_table(&g, "x", &[g.root()], 5),
            Err(Error::InsufficientRadius { .. })
        ));
    }

    #[test]
    fn flat_table_has_zero_rate() {
        let h = SubgroupOracle::new(OracleKind::Whole).unwrap();
        let g = coset_ball(&h, 8).unwrap();
        let t = growth_table(&g, "coset:whole", &[g.root()], 8).unwrap();
        let e = uniform_growth_estimate(&t, &GrowthFit::default()).unwrap();
        assert_eq!(e.fitted_rate, 0.0);
        assert_eq!(e.classification, GrowthClass::Inconclusive);
    }

    #[test]
    fn short_tables_are_degenerate() {
        let g = orbital_ball(&p("1/2"), 2).unwrap();
        let t = growth_table(&g, "o", &[g.root()], 2).unwrap();
        assert!(uniform_growth_estimate(&t, &GrowthFit::default()).is_err());
    }

    #[test]
    fn cayley_is_exponential() {
        let b = cayley_ball(7).unwrap();
        let t = growth_table(&b.graph, "cayley", &[b.graph.root()], 7).unwrap();
        let e = uniform_growth_estimate(&t, &GrowthFit::default()).unwrap();
        assert_eq!(e.classification, GrowthClass::ExponentialEvidence);
        assert!(e.fitted_rate > 1.4);
    }

    #[test]
    fn domination() {
        let o = orbital_ball(&p("1/2"), 5).unwrap();
        let to = growth_table(&o, "o", &[o.root()], 5).unwrap();
        let b = cayley_ball(5).unwrap();
        let tc = growth_table(&b.graph, "c", &[b.graph.root()], 5).unwrap();
        assert!(!growth_dominates(&to, &to, 1).unwrap());
        assert!(growth_dominates(&tc, &to, 1).unwrap());
        assert!(!growth_dominates(&to, &tc, 1).unwrap());
        assert!(growth_dominates(&tc, &to, 0).is_err());
    }

    #[test]
    fn foelner_examples() {
        let b = cayley_ball(2).unwrap();
        assert_eq!(foelner_ratio(&b.graph, &[b.graph.root()]).unwrap(), Rational::new(4, 1).unwrap());
        let h = SubgroupOracle::new(OracleKind::Whole).unwrap();
        let g = coset_ball(&h, 2).unwrap();
        assert_eq!(foelner_ratio(&g, &[g.root()]).unwrap(), Rational::new(0, 1).unwrap());
        // the root of a radius-1 snapshot is fine, its neighbours are not
        let o = orbital_ball(&p("1/2"), 1).unwrap();
        assert!(foelner_ratio(&o, &[o.root()]).is_ok());
        let all: Vec<usize> = (0..o.len()).collect();
        assert!(foelner_ratio(&o, &all).is_err());
    }

    #[test]
    fn displacement_examples() {
        let g = orbital_ball(&p("1/2"), 8).unwrap();
        let r = displacement(&"x1".parse().unwrap(), &g).unwrap();
        assert!(r.max_observed <= 1);
        let r = displacement(&Word::empty(), &g).unwrap();
        assert_eq!(r.max_observed, 0);
        assert_eq!(r.vertices_checked, g.len());
        let r = displacement(&"x0x0".parse().unwrap(), &g).unwrap();
        assert!(r.max_observed <= 2);
        assert!(r.vertices_skipped > 0);
    }

    #[test]
    fn push_left_facts() {
        let r = push_left_report(&[p("3/4"), p("7/8"), p("1/3")]).unwrap();
        assert!(r.x1_fixes_all);
        assert!(r.minimal);
        assert_eq!(r.k, 3);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = orbital_ball(&p("1/2"), 10).unwrap();
        let a = sample_roots(&g, 4, 8, 7);
        assert_eq!(a, sample_roots(&g, 4, 8, 7));
        assert_eq!(a[0], g.root());
        assert_eq!(a.len(), 8);
    }
}
