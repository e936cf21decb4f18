//! Words over {x0, x1}^±1 and balls in the Cayley graph of F.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::element::PLMap;
use crate::error::{Error, Result};
use crate::graph::{explore, Generator, Label, Payload, RootedLabelledGraph};

/// Radius above which front ends should ask before building Cayley balls.
pub const DEFAULT_RADIUS_CAP: u32 = 8;

/// Vertex budget for any single graph construction.
pub const DEFAULT_MAX_VERTICES: usize = 2_000_000;

/// A (not necessarily reduced) word in the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn push(&mut self, g: Generator) {
        self.0.push(g);
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Product of the letters in order. Products compose as functions, so
    /// on points the last letter acts first.
    pub fn eval(&self) -> PLMap {
        let gens: [PLMap; 4] = Generator::ALL.map(|g| g.element());
        self.0.iter().fold(PLMap::identity(), |acc, g| {
            let i = Generator::ALL.iter().position(|x| x == g).unwrap();
            acc.compose(&gens[i])
        })
    }
}

pub fn eval_word(w: &Word) -> PLMap {
    w.eval()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for g in &self.0 {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts letters `x0`, `x1` with optional integer powers (`x0^-1`,
    /// `x1^3`), `X0`/`X1` as inverses, and `e` for the empty word. Spaces,
    /// `*` and `.` are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: String| Error::ParseWord {
            input: s.to_string(),
            reason,
        };
        let chars: Vec<char> = s.chars().filter(|c| !matches!(c, ' ' | '*' | '.')).collect();
        let trimmed: String = chars.iter().collect();
        if trimmed.is_empty() || trimmed == "e" || trimmed == "1" || trimmed == "id" {
            return Ok(Word::empty());
        }
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (inverse, c) = match chars[i] {
                'x' => (false, chars.get(i + 1)),
                'X' => (true, chars.get(i + 1)),
                other => return Err(err(format!("unexpected character {other:?} at {i}"))),
            };
            let label = match c {
                Some('0') => Label::X0,
                Some('1') => Label::X1,
                _ => return Err(err(format!("expected 0 or 1 after x at {i}"))),
            };
            i += 2;
            let mut power: i64 = 1;
            if chars.get(i) == Some(&'^') {
                let start = i + 1;
                let mut end = start;
                if chars.get(end) == Some(&'-') {
                    end += 1;
                }
                while chars.get(end).is_some_and(|c| c.is_ascii_digit()) {
                    end += 1;
                }
                let digits: String = chars[start..end].iter().collect();
                power = digits
                    .parse()
                    .map_err(|_| err(format!("bad exponent {digits:?}")))?;
                i = end;
            }
            if inverse {
                power = -power;
            }
            let g = Generator {
                label,
                inverse: power < 0,
            };
            for _ in 0..power.unsigned_abs() {
                out.push(g);
            }
        }
        Ok(Word(out))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The first defining relator `[x0 x1⁻¹, x0⁻¹ x1 x0]`, with `[a, b] = a⁻¹ b⁻¹ a b`.
pub fn relator_one() -> Word {
    let a: Word = "x0 x1^-1".parse().unwrap();
    let b: Word = "x0^-1 x1 x0".parse().unwrap();
    commutator_word(&a, &b)
}

/// The second defining relator `[x0 x1⁻¹, x0⁻² x1 x0²]`.
pub fn relator_two() -> Word {
    let a: Word = "x0 x1^-1".parse().unwrap();
    let b: Word = "x0^-2 x1 x0^2".parse().unwrap();
    commutator_word(&a, &b)
}

pub fn commutator_word(a: &Word, b: &Word) -> Word {
    a.inverse().concat(&b.inverse()).concat(a).concat(b)
}

/// All elements of word length at most `radius`, each with a shortest word,
/// together with the Cayley graph snapshot rooted at the identity. Edges run
/// `g → s·g`, matching the coset graphs of [`crate::schreier`] for the trivial
/// subgroup.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub radius: u32,
    pub elements: Vec<PLMap>,
    pub words: Vec<Word>,
    pub graph: RootedLabelledGraph,
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Indices of elements at word length exactly `n`.
    pub fn sphere(&self, n: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| self.graph.depth(v) == n)
    }
}

pub fn cayley_ball(radius: u32) -> Result<CayleyBall> {
    cayley_ball_limited(radius, DEFAULT_MAX_VERTICES)
}

/// BFS over group elements, identified by canonical PL form.
pub fn cayley_ball_limited(radius: u32, max_vertices: usize) -> Result<CayleyBall> {
    let gens: [PLMap; 4] = Generator::ALL.map(|g| g.element());
    let explored = explore(
        PLMap::identity(),
        radius,
        max_vertices,
        |g, s| {
            let i = Generator::ALL.iter().position(|x| *x == s).unwrap();
            Ok(gens[i].compose(g))
        },
        |g| g.clone(),
        |_, _| Ok(true),
        |g| Payload::Element(g.clone()),
    )?;
    let mut words: Vec<Word> = Vec::with_capacity(explored.states.len());
    for parent in &explored.parents {
        let w = match parent {
            None => Word::empty(),
            // the path label sequence is the word read backwards
            Some((p, g)) => Word(vec![*g]).concat(&words[*p]),
        };
        words.push(w);
    }
    Ok(CayleyBall {
        radius,
        elements: explored.states,
        words,
        graph: explored.graph,
    })
}

/// Elements of the radius-`n` Cayley ball lying in F', with their words.
/// F' is not finitely generated; this is the finite sample of it used
/// wherever a statement quantifies over all of F'.
pub fn enumerate_commutator_ball(n: u32) -> Result<Vec<(PLMap, Word)>> {
    Ok(commutator_elements(&cayley_ball(n)?))
}

pub fn commutator_elements(ball: &CayleyBall) -> Vec<(PLMap, Word)> {
    ball.elements
        .iter()
        .zip(&ball.words)
        .filter(|(g, _)| g.in_commutator())
        .map(|(g, w)| (g.clone(), w.clone()))
        .collect()
}
