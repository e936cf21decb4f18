//! Exact computations in Richard Thompson's group F.
//!
//! Elements are canonical piecewise-linear homeomorphisms of [0, 1] with
//! dyadic breakpoints and power-of-two slopes, so the word problem reduces to
//! comparing representations. On top of that sit Cayley balls, orbital and
//! coset (Schreier) graphs, the rooted-ball distance between them, the
//! constructive steps used to exhibit confining sets, and growth, Følner and
//! displacement measurements.

pub mod analysis;
pub mod cayley;
pub mod constructions;
pub mod dyadic;
pub mod element;
pub mod error;
pub mod graph;
pub mod io;
pub mod schreier;

pub use cayley::{cayley_ball, eval_word, CayleyBall, Word};
pub use dyadic::{Dyadic, Point, Rational};
pub use element::{bump, interval_map, AbelianImage, Interval, MapMode, PLMap};
pub use error::{Error, Result};
pub use graph::{ball_isomorphic, Generator, Label, Payload, RootedLabelledGraph};
pub use schreier::{coset_ball, orbital_ball, OracleKind, SubgroupOracle};
