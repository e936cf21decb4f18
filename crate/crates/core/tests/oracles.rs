//! Hand-derived values and small independent reimplementations checked
//! against the library.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use thompson_core::analysis::{displacement, foelner_ratio, growth_table};
use thompson_core::cayley::{commutator_elements, enumerate_commutator_ball, relator_one};
use thompson_core::constructions::{germ_identity_check, push_left};
use thompson_core::schreier::{cayley_fragment_search, chabauty_distance, chabauty_distance_at};
use thompson_core::*;

fn d(s: &str) -> Dyadic {
    s.parse().unwrap()
}

fn p(s: &str) -> Point {
    s.parse().unwrap()
}

fn q(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

/// x0 and x1 straight from their piecewise formulas, over exact rationals.
fn x0_ref(t: &BigRational) -> BigRational {
    if t <= &q(1, 2) {
        t / q(2, 1)
    } else if t <= &q(3, 4) {
        t - q(1, 4)
    } else {
        t * q(2, 1) - q(1, 1)
    }
}

fn x0_inv_ref(t: &BigRational) -> BigRational {
    if t <= &q(1, 4) {
        t * q(2, 1)
    } else if t <= &q(1, 2) {
        t + q(1, 4)
    } else {
        (t + q(1, 1)) / q(2, 1)
    }
}

fn x1_ref(t: &BigRational) -> BigRational {
    if t <= &q(1, 2) {
        t.clone()
    } else if t <= &q(3, 4) {
        t / q(2, 1) + q(1, 4)
    } else if t <= &q(7, 8) {
        t - q(1, 8)
    } else {
        t * q(2, 1) - q(1, 1)
    }
}

fn x1_inv_ref(t: &BigRational) -> BigRational {
    if t <= &q(1, 2) {
        t.clone()
    } else if t <= &q(5, 8) {
        (t - q(1, 4)) * q(2, 1)
    } else if t <= &q(3, 4) {
        t + q(1, 8)
    } else {
        (t + q(1, 1)) / q(2, 1)
    }
}

fn refs() -> [fn(&BigRational) -> BigRational; 4] {
    [x0_ref, x0_inv_ref, x1_ref, x1_inv_ref]
}

fn to_big(p: &Point) -> BigRational {
    p.to_rational().as_big_rational().clone()
}

/// Orbit points within distance `n`, by naive BFS over exact rationals.
fn naive_orbit(p0: &BigRational, n: u32) -> BTreeSet<BigRational> {
    let mut seen = BTreeSet::from([p0.clone()]);
    let mut frontier = vec![p0.clone()];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &frontier {
            for f in refs() {
                let u = f(t);
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    seen
}

#[test]
fn generator_values() {
    assert_eq!(PLMap::x0().eval(&d("1/2")).unwrap(), d("1/4"));
    assert_eq!(PLMap::x1().eval(&d("3/4")).unwrap(), d("5/8"));
    assert_eq!(PLMap::identity().eval(&p("1/3")).unwrap(), p("1/3"));
    assert_eq!(PLMap::x0().inverse().eval(&d("1/2")).unwrap(), d("3/4"));
    assert_eq!(PLMap::x0().power(2).eval(&d("3/4")).unwrap(), d("1/4"));
    for k in 0..=64 {
        let t = Dyadic::new(k, 6);
        let tq = to_big(&t.clone().into());
        for (g, f) in Generator::ALL.iter().zip(refs()) {
            assert_eq!(to_big(&g.element().eval(&t).unwrap().into()), f(&tq), "{g} at {t}");
        }
    }
    for (n, m) in [(1, 3), (2, 3), (1, 5), (4, 7), (5, 6)] {
        let t: Point = format!("{n}/{m}").parse().unwrap();
        for (g, f) in Generator::ALL.iter().zip(refs()) {
            assert_eq!(to_big(&g.element().eval(&t).unwrap()), f(&q(n, m)));
        }
    }
}

#[test]
fn element_facts() {
    let x0 = PLMap::x0();
    let x1 = PLMap::x1();
    assert!(x0.compose(&x0.inverse()).is_identity());
    assert_eq!(PLMap::identity().compose(&x1), x1);
    assert_eq!(x1.inverse().inverse(), x1);
    assert!(PLMap::identity().inverse().is_identity());
    assert_ne!(x0, x1);
    let a: Word = "x0 x1^-1".parse().unwrap();
    let b: Word = "x0^-1 x1 x0".parse().unwrap();
    assert_eq!(a.concat(&b).eval(), b.concat(&a).eval());
    assert!(relator_one().eval().is_identity());

    assert_eq!(x1.support(), vec![Interval::closed(d("1/2"), d("1")).unwrap()]);
    assert_eq!(x0.support(), vec![Interval::closed(d("0"), d("1")).unwrap()]);
    assert!(PLMap::identity().support().is_empty());

    let ab = x0.abelianize();
    assert_eq!((ab.at_zero, ab.at_one), (-1, 1));
    let ab = x1.abelianize();
    assert_eq!((ab.at_zero, ab.at_one), (0, 1));
    assert!(PLMap::identity().abelianize().is_zero());
    assert!(!x0.in_commutator());
    assert!(PLMap::identity().in_commutator());

    let b = bump(&d("1/4"), &d("1/2")).unwrap();
    assert_eq!(b.support(), vec![Interval::closed(d("1/4"), d("1/2")).unwrap()]);
    assert!(b.conjugate(&x0).in_commutator());
    assert_eq!(x1.conjugate(&PLMap::identity()), x1);
    assert!(PLMap::identity().conjugate(&x1).is_identity());
    assert_eq!(bump(&d("1/2"), &d("1")).unwrap().eval(&d("9/16")).unwrap(), d("5/8"));

    let left = bump(&d("0"), &d("1/2")).unwrap();
    let right = bump(&d("1/2"), &d("1")).unwrap();
    let both = left.compose(&right);
    assert_eq!(both, right.compose(&left));
    for k in 0..=32 {
        let t = Dyadic::new(k, 5);
        let expect = if t <= d("1/2") { left.eval(&t) } else { right.eval(&t) };
        assert_eq!(both.eval(&t).unwrap(), expect.unwrap());
    }
}

#[test]
fn interval_map_examples() {
    let h = interval_map(&[d("1/4")], &[d("1/2")], MapMode::Full).unwrap();
    assert_eq!(h.eval(&d("1/4")).unwrap(), d("1/2"));
    let t = [d("1/8"), d("3/8"), d("5/8")];
    assert!(interval_map(&t, &t, MapMode::Full).unwrap().is_identity());
    let h = interval_map(&[d("1/4"), d("1/2")], &[d("1/2"), d("3/4")], MapMode::Commutator).unwrap();
    assert!(h.abelianize().is_zero());
    assert_eq!(h.slopes().first(), Some(&0));
    assert_eq!(h.slopes().last(), Some(&0));

    // conjugating x1 by h moves its support to h⁻¹([1/2, 1])
    let h = interval_map(&[d("1/2")], &[d("3/4")], MapMode::Full).unwrap();
    let c = PLMap::x1().conjugate(&h);
    let expect = Interval::closed(d("1/2"), d("1")).unwrap().image(&h.inverse()).unwrap();
    assert_eq!(c.support(), vec![expect]);
}

#[test]
fn cayley_ball_by_brute_force() {
    // every word of length ≤ 3, deduplicated by exact equality in a flat list
    let mut words = vec![Word::empty()];
    let mut sizes = vec![1];
    let mut distinct: Vec<PLMap> = vec![PLMap::identity()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &words {
            for g in Generator::ALL {
                let mut v = w.clone();
                v.push(g);
                let e = v.eval();
                if !distinct.contains(&e) {
                    distinct.push(e);
                }
                next.push(v);
            }
        }
        words = next;
        sizes.push(distinct.len());
    }
    assert_eq!(sizes, vec![1, 5, 17, 53]);
    let ball = cayley_ball(3).unwrap();
    assert_eq!(ball.len(), 53);
    for g in &distinct {
        assert!(ball.elements.contains(g));
    }
    for (g, w) in ball.elements.iter().zip(&ball.words) {
        assert_eq!(&w.eval(), g);
        assert_eq!(w.len() as u32, ball.graph.depth(ball.elements.iter().position(|x| x == g).unwrap()));
    }
}

#[test]
fn commutator_ball_examples() {
    assert_eq!(enumerate_commutator_ball(0).unwrap().len(), 1);
    assert_eq!(enumerate_commutator_ball(1).unwrap().len(), 1);
    let ball = cayley_ball(5).unwrap();
    let c = commutator_elements(&ball);
    assert!(c.iter().all(|(g, _)| g.in_commutator()));
    // exponent sums vanish on F', so nontrivial elements need 4 letters
    assert!(c.iter().all(|(g, w)| g.is_identity() || w.len() >= 4));
    let brute = ball.elements.iter().filter(|g| g.abelianize().is_zero()).count();
    assert_eq!(c.len(), brute);
}

#[test]
fn orbital_balls_match_naive_orbits() {
    let set = |g: &RootedLabelledGraph| -> BTreeSet<BigRational> {
        g.payloads()
            .iter()
            .map(|x| match x {
                Payload::Point(p) => to_big(p),
                Payload::Element(_) => unreachable!(),
            })
            .collect()
    };
    let g = orbital_ball(&p("1/2"), 1).unwrap();
    assert_eq!(set(&g), BTreeSet::from([q(1, 4), q(1, 2), q(3, 4)]));
    let g = orbital_ball(&p("1/2"), 2).unwrap();
    assert_eq!(
        set(&g),
        BTreeSet::from([q(1, 8), q(1, 4), q(1, 2), q(5, 8), q(3, 4), q(7, 8)])
    );
    assert_eq!(orbital_ball(&p("3/8"), 0).unwrap().len(), 1);
    for (pt, qt) in [("1/2", q(1, 2)), ("1/3", q(1, 3)), ("5/16", q(5, 16)), ("2/7", q(2, 7))] {
        for n in 0..=6 {
            let g = orbital_ball(&p(pt), n).unwrap();
            assert_eq!(set(&g), naive_orbit(&qt, n), "{pt} radius {n}");
        }
    }
    assert!(orbital_ball(&p("0"), 2).is_err());
    assert!(orbital_ball(&p("1"), 2).is_err());
}

#[test]
fn oracle_examples() {
    let h = SubgroupOracle::parse("point_stab", "1/2").unwrap();
    assert!(h.member(&PLMap::x1()));
    let h = SubgroupOracle::parse("germ_stab", "1/4").unwrap();
    assert!(!h.member(&PLMap::x0()));
    let h = SubgroupOracle::parse("cyclic", "x0").unwrap();
    assert!(h.member(&PLMap::x0().power(3)));
    assert!(h.member(&PLMap::x0().power(-2)));
    // brute force: ⟨x0⟩ ∩ B(4) is exactly {x0^k : |k| ≤ 4}
    let powers: Vec<PLMap> = (-4..=4).map(|k| PLMap::x0().power(k)).collect();
    for g in &cayley_ball(4).unwrap().elements {
        assert_eq!(h.member(g), powers.contains(g), "{g}");
    }
    let h = SubgroupOracle::parse("cyclic", "x1 x0").unwrap();
    let g0 = "x1 x0".parse::<Word>().unwrap().eval();
    for g in &cayley_ball(4).unwrap().elements {
        let brute = (-8..=8).any(|k| g0.power(k) == *g);
        assert_eq!(h.member(g), brute, "{g}");
    }
}

#[test]
fn coset_graph_examples() {
    let cayley = cayley_ball(4).unwrap().graph;
    let triv = coset_ball(&SubgroupOracle::new(OracleKind::Trivial).unwrap(), 4).unwrap();
    assert_eq!(triv.len(), cayley.len());
    assert!(ball_isomorphic(&triv, triv.root(), &cayley, cayley.root(), 4).unwrap());
    let whole = coset_ball(&SubgroupOracle::new(OracleKind::Whole).unwrap(), 4).unwrap();
    assert_eq!(whole.len(), 1);
    assert_eq!(whole.edges().len(), 2);
    for g in Generator::ALL {
        assert_eq!(whole.step(0, g), Some(0));
    }
    for pt in ["1/2", "3/8", "1/3"] {
        let stab = coset_ball(&SubgroupOracle::parse("point_stab", pt).unwrap(), 5).unwrap();
        let orb = orbital_ball(&p(pt), 5).unwrap();
        assert_eq!(stab.len(), orb.len());
        assert_eq!(stab.canonical_code(stab.root(), 5).unwrap(), orb.canonical_code(orb.root(), 5).unwrap());
    }
}

#[test]
fn ball_distance_examples() {
    let cayley = cayley_ball(6).unwrap().graph;
    let orb = orbital_ball(&p("1/2"), 6).unwrap();
    assert!(ball_isomorphic(&orb, orb.root(), &orb, orb.root(), 6).unwrap());
    assert!(ball_isomorphic(&orb, orb.root(), &cayley, cayley.root(), 0).unwrap());
    assert!(!ball_isomorphic(&orb, orb.root(), &cayley, cayley.root(), 1).unwrap());
    let dist = chabauty_distance(&orb, &cayley, 6).unwrap();
    assert_eq!(dist.value(), Some(Rational::new(1, 2).unwrap()));
    let same = chabauty_distance(&cayley, &cayley, 6).unwrap();
    assert_eq!(same.value(), None);
    assert_eq!(same.upper_bound(), Rational::new(1, 8).unwrap());
    assert_eq!(same.to_string(), "<= 1/8");

    // rerooting at 1/4: both roots carry an x1-loop, and their x0⁻¹ steps
    // (to 3/4 and 1/2) differ in whether they are fixed by x1
    let orb = orbital_ball(&p("1/2"), 8).unwrap();
    let quarter = orb.find_point(&p("1/4")).unwrap();
    let r = chabauty_distance_at(&orb, orb.root(), &orb, quarter, 6).unwrap();
    let w = r.witness_radius.unwrap();
    assert_eq!(w, 2);
    for n in 0..w {
        assert_eq!(
            orb.canonical_code(orb.root(), n).unwrap(),
            orb.canonical_code(quarter, n).unwrap()
        );
    }
}

/// A radius-1 ball matches the Cayley one iff the four neighbours are
/// pairwise distinct and differ from the centre.
fn locally_free(g: &RootedLabelledGraph, v: usize) -> bool {
    let mut seen = vec![v];
    for s in Generator::ALL {
        let w = g.step(v, s).unwrap();
        if seen.contains(&w) {
            return false;
        }
        seen.push(w);
    }
    true
}

#[test]
fn fragment_search_at_radius_one() {
    let g = orbital_ball(&p("1/2"), 10).unwrap();
    let hits = cayley_fragment_search(&g, 1).unwrap();
    let brute: Vec<usize> = g.complete_centers(1).filter(|&v| locally_free(&g, v)).collect();
    assert_eq!(hits, brute);
    assert_eq!(hits.len(), 54);
    assert!(hits.contains(&g.find_point(&p("11/16")).unwrap()));
    assert!(!hits.contains(&g.root()));
    assert!(cayley_fragment_search(&g, 2).unwrap().is_empty());
    assert_eq!(cayley_fragment_search(&g, 0).unwrap().len(), g.len());

    let triv = coset_ball(&SubgroupOracle::new(OracleKind::Trivial).unwrap(), 4).unwrap();
    for n in 0..=2 {
        let hits = cayley_fragment_search(&triv, n).unwrap();
        assert_eq!(hits.len(), triv.complete_centers(n).count());
    }
}

#[test]
fn push_left_and_germ_examples() {
    assert_eq!(push_left(&[p("3/4")]).unwrap(), 2);
    assert_eq!(push_left(&[p("1/4")]).unwrap(), 0);
    assert_eq!(push_left(&[p("1/2"), p("7/8")]).unwrap(), 3);
    let rows = germ_identity_check(
        &[p("1/4")],
        &[PLMap::x1(), bump(&d("3/8"), &d("7/16")).unwrap(), PLMap::identity()],
    )
    .unwrap();
    let sides: Vec<(bool, bool)> = rows
        .iter()
        .map(|r| (r.in_commutator_germ_stab, r.in_extended_germ_stab))
        .collect();
    assert_eq!(sides, vec![(false, false), (true, true), (true, true)]);
}

#[test]
fn analysis_examples() {
    let g = orbital_ball(&p("1/2"), 8).unwrap();
    let t = growth_table(&g, "orbit:1/2", &[g.root()], 2).unwrap();
    let sizes: Vec<u64> = t.rows.iter().map(|r| r.ball_size).collect();
    assert_eq!(sizes, vec![1, 3, 6]);

    // Følner ratio of the radius-3 ball around 1/2, counted by hand from
    // the vertex list: steps from the ball that land outside it
    let ball: Vec<usize> = g.ball(g.root(), 3).unwrap().into_iter().map(|(v, _)| v).collect();
    let mut out = 0;
    for &v in &ball {
        for s in Generator::ALL {
            if !ball.contains(&g.step(v, s).unwrap()) {
                out += 1;
            }
        }
    }
    let r = foelner_ratio(&g, &ball).unwrap();
    assert_eq!(r, Rational::new(out, ball.len() as i64).unwrap());
    let mut shuffled = ball.clone();
    shuffled.reverse();
    assert_eq!(foelner_ratio(&g, &shuffled).unwrap(), r);

    let x00: Word = "x0x0".parse().unwrap();
    let rep = displacement(&x00, &g).unwrap();
    let half = g.root();
    let target = g.find_point(&p("1/8")).unwrap();
    assert_eq!(g.distance(half, target, 2).unwrap(), Some(2));
    assert_eq!(rep.max_observed, 2);
}
