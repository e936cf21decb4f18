//! Elements of F as canonical piecewise-linear homeomorphisms of [0, 1].
//!
//! A [`PLMap`] stores its breakpoints together with their images and the
//! base-2 logarithm of the slope on each piece. Adjacent pieces never share a
//! slope, so two maps are equal as functions iff their representations are
//! equal. That turns the word problem into a structural comparison.
//!
//! The group product is composition of functions: `g * h` (or
//! [`PLMap::compose`]) is `t ↦ g(h(t))`. This is the convention in which
//! `[x0 x1⁻¹, x0⁻¹ x1 x0]` and `[x0 x1⁻¹, x0⁻² x1 x0²]` are trivial.
//! [`PLMap::then`] is the same product read in the other order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Point, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLMap {
    breaks: Vec<Dyadic>,
    images: Vec<Dyadic>,
    slopes: Vec<i32>,
}

/// Image of an element in F/F' ≅ Z², read off the germs at the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AbelianImage {
    pub at_zero: i64,
    pub at_one: i64,
}

impl Add for AbelianImage {
    type Output = AbelianImage;
    fn add(self, rhs: AbelianImage) -> AbelianImage {
        AbelianImage {
            at_zero: self.at_zero + rhs.at_zero,
            at_one: self.at_one + rhs.at_one,
        }
    }
}

impl AbelianImage {
    pub fn is_zero(&self) -> bool {
        self.at_zero == 0 && self.at_one == 0
    }
}

/// An interval of [0, 1] with per-endpoint open/closed flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Point,
    pub hi: Point,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    fn checked(lo: Point, hi: Point, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo >= hi {
            return Err(Error::EmptyInterval(lo.to_string(), hi.to_string()));
        }
        if !lo.in_closed_unit() || !hi.in_closed_unit() {
            return Err(Error::OutOfRange(
                format!("[{lo}, {hi}]"),
                "the unit interval [0, 1]",
            ));
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: impl Into<Point>, hi: impl Into<Point>) -> Result<Self> {
        Self::checked(lo.into(), hi.into(), true, true)
    }

    pub fn open(lo: impl Into<Point>, hi: impl Into<Point>) -> Result<Self> {
        Self::checked(lo.into(), hi.into(), false, false)
    }

    pub fn contains(&self, t: &Point) -> bool {
        let above = match t.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match t.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        let separated = |a: &Interval, b: &Interval| match a.hi.cmp(&b.lo) {
            Ordering::Less => true,
            Ordering::Equal => !(a.hi_closed && b.lo_closed),
            Ordering::Greater => false,
        };
        !separated(self, other) && !separated(other, self)
    }

    /// The order `(a, b) < (c, d)` iff `b < c`.
    pub fn precedes(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Pointwise image under an increasing map.
    pub fn image(&self, g: &PLMap) -> Result<Interval> {
        Interval::checked(
            g.eval(&self.lo)?,
            g.eval(&self.hi)?,
            self.lo_closed,
            self.hi_closed,
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Whether [`interval_map`] may use any element of F or must stay inside F'.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMode {
    Full,
    Commutator,
}

/// log2(dy / dx), when the ratio is a power of two.
fn log2_ratio(dy: &Dyadic, dx: &Dyadic) -> Option<i64> {
    if dx.is_zero() || dy.is_zero() {
        return None;
    }
    let tx = dx.numerator().trailing_zeros()?;
    let ty = dy.numerator().trailing_zeros()?;
    let ox = dx.numerator() >> tx as usize;
    let oy = dy.numerator() >> ty as usize;
    if ox != oy {
        return None;
    }
    Some(ty as i64 - tx as i64 + i64::from(dx.exponent()) - i64::from(dy.exponent()))
}

/// Index of the piece containing `t`, taking the right-hand piece at interior breakpoints.
fn piece_index<T: Scalar>(breaks: &[Dyadic], t: &T) -> usize {
    let last = breaks.len() - 2;
    breaks[1..=last].partition_point(|b| t.cmp_dyadic(b) != Ordering::Less)
}

fn eval_on<T: Scalar>(breaks: &[Dyadic], images: &[Dyadic], slopes: &[i32], t: &T) -> T {
    let i = piece_index(breaks, t);
    t.sub_dyadic(&breaks[i])
        .mul_pow2(i64::from(slopes[i]))
        .add_dyadic(&images[i])
}

impl PLMap {
    pub fn identity() -> Self {
        PLMap {
            breaks: vec![Dyadic::zero(), Dyadic::one()],
            images: vec![Dyadic::zero(), Dyadic::one()],
            slopes: vec![0],
        }
    }

    pub fn x0() -> Self {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        PLMap {
            breaks: vec![d("0"), d("1/2"), d("3/4"), d("1")],
            images: vec![d("0"), d("1/4"), d("1/2"), d("1")],
            slopes: vec![-1, 0, 1],
        }
    }

    pub fn x1() -> Self {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        PLMap {
            breaks: vec![d("0"), d("1/2"), d("3/4"), d("7/8"), d("1")],
            images: vec![d("0"), d("1/2"), d("5/8"), d("3/4"), d("1")],
            slopes: vec![0, -1, 0, 1],
        }
    }

    /// Builds a map from consecutive (breakpoint, image) pairs, merging pieces
    /// with equal slopes. Fails unless every piece has a power-of-two slope
    /// and the map is an increasing bijection of [0, 1].
    pub fn from_points(points: &[(Dyadic, Dyadic)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidMap("need at least two points".into()));
        }
        let (first, last) = (&points[0], &points[points.len() - 1]);
        if !first.0.is_zero() || !first.1.is_zero() {
            return Err(Error::InvalidMap("map must send 0 to 0".into()));
        }
        if last.0 != Dyadic::one() || last.1 != Dyadic::one() {
            return Err(Error::InvalidMap("map must send 1 to 1".into()));
        }
        let mut slopes = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            let dx = &w[1].0 - &w[0].0;
            let dy = &w[1].1 - &w[0].1;
            if dx <= Dyadic::zero() || dy <= Dyadic::zero() {
                return Err(Error::InvalidMap(format!(
                    "points must be strictly increasing near {}",
                    w[0].0
                )));
            }
            let k = log2_ratio(&dy, &dx).ok_or_else(|| {
                Error::InvalidMap(format!("slope on [{}, {}] is not a power of two", w[0].0, w[1].0))
            })?;
            slopes.push(i32::try_from(k).map_err(|_| Error::InvalidMap("slope overflow".into()))?);
        }
        let (breaks, images) = points.iter().cloned().unzip();
        Ok(Self::merged(breaks, images, slopes))
    }

    /// Drops breakpoints between pieces of equal slope.
    fn merged(breaks: Vec<Dyadic>, images: Vec<Dyadic>, slopes: Vec<i32>) -> Self {
        let n = slopes.len();
        let mut out = PLMap {
            breaks: Vec::with_capacity(n + 1),
            images: Vec::with_capacity(n + 1),
            slopes: Vec::with_capacity(n),
        };
        for (i, (b, y)) in breaks.into_iter().zip(images).enumerate() {
            if i > 0 && i < n && slopes[i] == slopes[i - 1] {
                continue;
            }
            out.breaks.push(b);
            out.images.push(y);
            if i < n {
                out.slopes.push(slopes[i]);
            }
        }
        out
    }

    /// Strict constructor: rejects anything that is not already canonical.
    pub fn from_parts(breaks: Vec<Dyadic>, images: Vec<Dyadic>, slopes: Vec<i32>) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::schema("points", "need at least the points 0 and 1"));
        }
        if images.len() != breaks.len() {
            return Err(Error::schema("points", "breakpoint and image counts differ"));
        }
        if slopes.len() + 1 != breaks.len() {
            return Err(Error::schema(
                "slopes",
                format!("expected {} slope exponents, found {}", breaks.len() - 1, slopes.len()),
            ));
        }
        if !breaks[0].is_zero() || !images[0].is_zero() {
            return Err(Error::schema("points[0]", "first point must be (0, 0)"));
        }
        let last = breaks.len() - 1;
        if breaks[last] != Dyadic::one() || images[last] != Dyadic::one() {
            return Err(Error::schema(format!("points[{last}]"), "last point must be (1, 1)"));
        }
        for i in 0..slopes.len() {
            let dx = &breaks[i + 1] - &breaks[i];
            if dx <= Dyadic::zero() {
                return Err(Error::schema(format!("points[{}]", i + 1), "breakpoints must increase"));
            }
            let expected = &images[i] + &dx.mul_pow2(i64::from(slopes[i]));
            if expected != images[i + 1] {
                return Err(Error::schema(
                    format!("slopes[{i}]"),
                    format!(
                        "slope 2^{} from ({}, {}) does not reach image {}",
                        slopes[i], breaks[i], images[i], images[i + 1]
                    ),
                ));
            }
            if i > 0 && slopes[i] == slopes[i - 1] {
                return Err(Error::schema(
                    format!("points[{i}]"),
                    "redundant breakpoint: adjacent pieces have equal slope",
                ));
            }
        }
        Ok(PLMap {
            breaks,
            images,
            slopes,
        })
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breaks
    }

    pub fn images(&self) -> &[Dyadic] {
        &self.images
    }

    /// Slope exponents, one per piece.
    pub fn slopes(&self) -> &[i32] {
        &self.slopes
    }

    pub fn is_identity(&self) -> bool {
        self.slopes.len() == 1
    }

    /// Exact image of `t`. Dyadic inputs give dyadic outputs.
    pub fn eval<T: Scalar>(&self, t: &T) -> Result<T> {
        if t.cmp_dyadic(&Dyadic::zero()) == Ordering::Less
            || t.cmp_dyadic(&Dyadic::one()) == Ordering::Greater
        {
            return Err(Error::OutOfRange(t.to_string(), "the unit interval [0, 1]"));
        }
        Ok(eval_on(&self.breaks, &self.images, &self.slopes, t))
    }

    fn eval_inverse(&self, t: &Dyadic) -> Dyadic {
        let neg: Vec<i32> = self.slopes.iter().map(|s| -s).collect();
        eval_on(&self.images, &self.breaks, &neg, t)
    }

    /// The product `self · h`, i.e. `t ↦ self(h(t))`.
    pub fn compose(&self, h: &PLMap) -> PLMap {
        h.then(self)
    }

    /// `t ↦ h(self(t))`: apply `self`, then `h`.
    pub fn then(&self, h: &PLMap) -> PLMap {
        if self.is_identity() {
            return h.clone();
        }
        if h.is_identity() {
            return self.clone();
        }
        let pulled: Vec<Dyadic> = h.breaks.iter().map(|c| self.eval_inverse(c)).collect();
        let mut xs = Vec::with_capacity(self.breaks.len() + pulled.len());
        let (mut i, mut j) = (0, 0);
        while i < self.breaks.len() || j < pulled.len() {
            let next = match (self.breaks.get(i), pulled.get(j)) {
                (Some(a), Some(b)) => match a.cmp(b) {
                    Ordering::Less => {
                        i += 1;
                        a
                    }
                    Ordering::Greater => {
                        j += 1;
                        b
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        a
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a
                }
                (None, Some(b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            xs.push(next.clone());
        }
        let mut images = Vec::with_capacity(xs.len());
        let mut slopes = Vec::with_capacity(xs.len() - 1);
        for (n, x) in xs.iter().enumerate() {
            let gi = piece_index(&self.breaks, x);
            let gx = eval_on(&self.breaks, &self.images, &self.slopes, x);
            let hi = piece_index(&h.breaks, &gx);
            images.push(eval_on(&h.breaks, &h.images, &h.slopes, &gx));
            if n + 1 < xs.len() {
                slopes.push(self.slopes[gi] + h.slopes[hi]);
            }
        }
        PLMap::merged(xs, images, slopes)
    }

    pub fn inverse(&self) -> PLMap {
        PLMap {
            breaks: self.images.clone(),
            images: self.breaks.clone(),
            slopes: self.slopes.iter().map(|s| -s).collect(),
        }
    }

    /// `k` applications of `self` (of its inverse when `k < 0`).
    pub fn power(&self, k: i64) -> PLMap {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = PLMap::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// `h⁻¹ g h` with `g = self`. Its support is `h⁻¹(support(g))`.
    pub fn conjugate(&self, h: &PLMap) -> PLMap {
        h.inverse().compose(self).compose(h)
    }

    pub fn abelianize(&self) -> AbelianImage {
        AbelianImage {
            at_zero: i64::from(self.slopes[0]),
            at_one: i64::from(*self.slopes.last().unwrap()),
        }
    }

    pub fn in_commutator(&self) -> bool {
        self.abelianize().is_zero()
    }

    fn piece_is_identity(&self, i: usize) -> bool {
        self.slopes[i] == 0 && self.images[i] == self.breaks[i]
    }

    /// Closure of the set of moved points, as disjoint closed intervals.
    pub fn support(&self) -> Vec<Interval> {
        let mut out: Vec<(Dyadic, Dyadic)> = Vec::new();
        for i in 0..self.slopes.len() {
            if self.piece_is_identity(i) {
                continue;
            }
            let (lo, hi) = (&self.breaks[i], &self.breaks[i + 1]);
            match out.last_mut() {
                Some(last) if &last.1 == lo => last.1 = hi.clone(),
                _ => out.push((lo.clone(), hi.clone())),
            }
        }
        out.into_iter()
            .map(|(lo, hi)| Interval::closed(lo, hi).expect("pieces are nonempty"))
            .collect()
    }

    /// Supremum of the support, `None` for the identity.
    pub fn support_sup(&self) -> Option<Dyadic> {
        (0..self.slopes.len())
            .rev()
            .find(|&i| !self.piece_is_identity(i))
            .map(|i| self.breaks[i + 1].clone())
    }

    pub fn support_inf(&self) -> Option<Dyadic> {
        (0..self.slopes.len())
            .find(|&i| !self.piece_is_identity(i))
            .map(|i| self.breaks[i].clone())
    }

    /// Slope exponent just right of `t`; `None` at `t = 1`.
    pub fn right_slope<T: Scalar>(&self, t: &T) -> Option<i32> {
        if t.cmp_dyadic(&Dyadic::one()) != Ordering::Less {
            return None;
        }
        Some(self.slopes[piece_index(&self.breaks, t)])
    }

    /// Slope exponent just left of `t`; `None` at `t = 0`.
    pub fn left_slope<T: Scalar>(&self, t: &T) -> Option<i32> {
        if t.cmp_dyadic(&Dyadic::zero()) != Ordering::Greater {
            return None;
        }
        let i = self.breaks[1..].partition_point(|b| t.cmp_dyadic(b) == Ordering::Greater);
        Some(self.slopes[i])
    }

    /// Whether `self` is the identity on a neighbourhood of `t` in [0, 1].
    pub fn is_germ_trivial_at(&self, t: &Point) -> Result<bool> {
        if self.eval(t)? != *t {
            return Ok(false);
        }
        Ok(self.left_slope(t).unwrap_or(0) == 0 && self.right_slope(t).unwrap_or(0) == 0)
    }
}

impl Mul for &PLMap {
    type Output = PLMap;
    fn mul(self, rhs: &PLMap) -> PLMap {
        self.compose(rhs)
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (b, y)) in self.breaks.iter().zip(&self.images).enumerate() {
            if i > 0 {
                write!(f, " -{}- ", self.slopes[i - 1])?;
            }
            write!(f, "({b}→{y})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap[{self}]")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PLMapJson {
    points: Vec<(Dyadic, Dyadic)>,
    slopes: Vec<i32>,
}

impl Serialize for PLMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PLMapJson {
            points: self.breaks.iter().cloned().zip(self.images.iter().cloned()).collect(),
            slopes: self.slopes.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PLMapJson::deserialize(d)?;
        let (breaks, images) = raw.points.into_iter().unzip();
        PLMap::from_parts(breaks, images, raw.slopes).map_err(serde::de::Error::custom)
    }
}

/// An element supported exactly on `[a, b]`, with slopes 2, 1, 1/2 on the
/// pieces cut at `a + L/8` and `b - L/4` (`L = b - a`). It moves every point
/// of `(a, b)` to the right.
pub fn bump(a: &Dyadic, b: &Dyadic) -> Result<PLMap> {
    if a >= b {
        return Err(Error::EmptyInterval(a.to_string(), b.to_string()));
    }
    if a < &Dyadic::zero() || b > &Dyadic::one() {
        return Err(Error::OutOfRange(format!("[{a}, {b}]"), "the unit interval [0, 1]"));
    }
    let len = b - a;
    let p = a + &len.halve(3);
    let q = b - &len.halve(2);
    let mut points = Vec::with_capacity(5);
    if !a.is_zero() {
        points.push((Dyadic::zero(), Dyadic::zero()));
    }
    points.push((a.clone(), a.clone()));
    points.push((p, a + &len.halve(2)));
    points.push((q, b - &len.halve(3)));
    points.push((b.clone(), b.clone()));
    if b != &Dyadic::one() {
        points.push((Dyadic::one(), Dyadic::one()));
    }
    PLMap::from_points(&points)
}

/// Lengths (as exponents k, length 2^-k) of the greedy decomposition of
/// `[a, b]` into standard dyadic intervals `[m/2^k, (m+1)/2^k]`.
fn standard_pieces(a: &Dyadic, b: &Dyadic) -> Vec<u32> {
    let mut pieces = Vec::new();
    let mut x = a.clone();
    while &x < b {
        let mut k = x.exponent();
        while &(&x + &Dyadic::pow2_recip(k)) > b {
            k += 1;
        }
        x = &x + &Dyadic::pow2_recip(k);
        pieces.push(k);
    }
    pieces
}

/// Splits the largest pieces in half until `pieces` has `len` entries.
fn refine_to(pieces: &mut Vec<u32>, len: usize) {
    while pieces.len() < len {
        let (i, &k) = pieces
            .iter()
            .enumerate()
            .min_by_key(|&(_, k)| *k)
            .expect("decomposition is nonempty");
        pieces[i] = k + 1;
        pieces.insert(i + 1, k + 1);
    }
}

fn check_tuple(tuple: &[Dyadic]) -> Result<()> {
    for t in tuple {
        if t <= &Dyadic::zero() || t >= &Dyadic::one() {
            return Err(Error::OutOfRange(t.to_string(), "the open interval (0, 1)"));
        }
    }
    if tuple.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing);
    }
    Ok(())
}

/// An element `h` with `h(source[i]) = target[i]` for every `i`.
///
/// Each gap between consecutive entries (with 0 and 1 appended) is cut into
/// standard dyadic intervals on both sides; the shorter decomposition is
/// refined by halving until the counts agree, and pieces are matched in
/// order. In [`MapMode::Commutator`] an extra fixed point `2^-m` (and
/// `1 - 2^-m`) is inserted near each end so the result is trivial near 0 and 1.
pub fn interval_map(source: &[Dyadic], target: &[Dyadic], mode: MapMode) -> Result<PLMap> {
    if source.len() != target.len() {
        return Err(Error::LengthMismatch(source.len(), target.len()));
    }
    check_tuple(source)?;
    check_tuple(target)?;

    let mut src = vec![Dyadic::zero()];
    let mut dst = vec![Dyadic::zero()];
    if mode == MapMode::Commutator && !source.is_empty() {
        let n = source.len() - 1;
        let margin = [
            source[0].clone(),
            target[0].clone(),
            &Dyadic::one() - &source[n],
            &Dyadic::one() - &target[n],
        ]
        .into_iter()
        .min()
        .unwrap();
        let mut k = 1;
        while Dyadic::pow2_recip(k) >= margin {
            k += 1;
        }
        let eps = Dyadic::pow2_recip(k);
        let top = &Dyadic::one() - &eps;
        src.push(eps.clone());
        dst.push(eps);
        src.extend_from_slice(source);
        dst.extend_from_slice(target);
        src.push(top.clone());
        dst.push(top);
    } else {
        src.extend_from_slice(source);
        dst.extend_from_slice(target);
    }
    src.push(Dyadic::one());
    dst.push(Dyadic::one());

    let mut points = vec![(Dyadic::zero(), Dyadic::zero())];
    for i in 0..src.len() - 1 {
        let mut a = standard_pieces(&src[i], &src[i + 1]);
        let mut b = standard_pieces(&dst[i], &dst[i + 1]);
        let n = a.len().max(b.len());
        refine_to(&mut a, n);
        refine_to(&mut b, n);
        let (mut x, mut y) = (src[i].clone(), dst[i].clone());
        for (ka, kb) in a.into_iter().zip(b) {
            x = &x + &Dyadic::pow2_recip(ka);
            y = &y + &Dyadic::pow2_recip(kb);
            points.push((x.clone(), y.clone()));
        }
    }
    PLMap::from_points(&points)
}
