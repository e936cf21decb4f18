//! The `thompson` command line: argument definitions and one function per
//! command, each returning a JSON-serialisable result and optionally a file
//! artifact (DOT, JSON or CSV).

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use thompson_core::analysis::{
    displacement, foelner_ratio, growth_table, push_left_report, sample_roots,
    uniform_growth_estimate, GrowthFit,
};
use thompson_core::cayley::{
    cayley_ball_limited, commutator_elements, relator_one, relator_two, DEFAULT_MAX_VERTICES,
};
use thompson_core::constructions::{
    build_confining_set, germ_identity_check, lemma_interval_chain, verify_confining_over,
};
use thompson_core::io::{growth_table_to_csv, to_json};
use thompson_core::schreier::{
    cayley_fragment_search_in, chabauty_distance_at, coset_ball_limited, orbital_ball_limited,
};
use thompson_core::{Error, Generator, PLMap, Payload, Point, Result, RootedLabelledGraph, SubgroupOracle, Word};

pub mod spec;

use spec::{GraphSpec, Limits};

#[derive(Debug, Parser, Serialize)]
#[command(name = "thompson", version, about = "Exact experiments in Thompson's group F")]
pub struct Cli {
    /// Print a machine-readable JSON report on stdout
    #[arg(long, global = true)]
    pub json: bool,

    /// Write the command's artifact (graph, table, certificate) to this file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Vertex budget for any single graph construction
    #[arg(long, global = true, env = "THOMPSON_MAX_VERTICES", default_value_t = DEFAULT_MAX_VERTICES)]
    pub max_vertices: usize,

    /// Permit Cayley balls beyond the default radius cap
    #[arg(long, global = true)]
    pub allow_large: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate both defining relators
    RelationsCheck,
    /// Ball of the Cayley graph around the identity
    CayleyBall {
        #[arg(long)]
        radius: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Orbital graph of a point
    OrbitGraph {
        #[arg(long)]
        point: String,
        #[arg(long)]
        radius: u32,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
    /// Schreier graph of a subgroup given by a membership oracle
    CosetGraph {
        /// trivial, whole, point_stab, tuple_stab, germ_stab,
        /// germ_stab_commutator, cyclic or commutator
        #[arg(long)]
        oracle: String,
        /// Comma-separated points for the stabiliser kinds
        #[arg(long, default_value = "")]
        set: String,
        /// Generator of a cyclic subgroup
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        radius: u32,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
    /// Distance 1/(n+1) between two rooted graphs
    Chabauty {
        /// cayley, orbit:P, orbit:P@Q or coset:KIND[:DATA]
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        max_radius: u32,
    },
    /// Vertices whose ball matches the Cayley ball of the same radius
    CayleyFragments {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        n: u32,
        /// Radius to compute the graph to (default n + 4)
        #[arg(long)]
        radius: Option<u32>,
    },
    /// Bumps with disjoint supports, one more than the size of the set
    ConfineBuild {
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Check that every conjugate of H by the F' part of a Cayley ball meets P
    ConfineVerify {
        #[arg(long, default_value = "germ_stab_commutator")]
        oracle: String,
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        radius: u32,
        /// Semicolon-separated words for P (default: confine-build on --set)
        #[arg(long)]
        elements: Option<String>,
    },
    /// Ordered intervals for a family of nontrivial elements
    LemmaChain {
        /// Semicolon-separated words
        #[arg(long)]
        words: String,
    },
    /// Least k with x0^k(S) inside (0, 1/2)
    PushLeft {
        #[arg(long)]
        set: String,
    },
    /// Compare both descriptions of the germ stabiliser on random elements
    GermCheck {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Ball sizes around sampled roots and a log-linear growth fit
    Growth {
        #[arg(long, conflicts_with = "graph")]
        point: Option<String>,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        max_radius: u32,
        #[arg(long, default_value_t = 32)]
        sample_roots: usize,
        /// Extra depth computed beyond max-radius, so roots besides the base can be sampled
        #[arg(long, default_value_t = 4)]
        extra: u32,
        /// Radii to fit, as LO..HI (default: upper half of the table)
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Largest distance a word moves a vertex
    Displacement {
        #[arg(long)]
        word: String,
        #[arg(long, conflicts_with = "graph")]
        point: Option<String>,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = 12)]
        radius: u32,
    },
    /// Exact edge-boundary ratio of a vertex set
    Foelner {
        #[arg(long, conflicts_with = "graph")]
        point: Option<String>,
        #[arg(long)]
        graph: Option<String>,
        /// ball:K, or comma-separated orbit points
        #[arg(long)]
        set: String,
        /// Radius to compute the graph to when --set lists points
        #[arg(long, default_value_t = 8)]
        radius: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RelationsCheck => "relations-check",
            Command::CayleyBall { .. } => "cayley-ball",
            Command::OrbitGraph { .. } => "orbit-graph",
            Command::CosetGraph { .. } => "coset-graph",
            Command::Chabauty { .. } => "chabauty",
            Command::CayleyFragments { .. } => "cayley-fragments",
            Command::ConfineBuild { .. } => "confine-build",
            Command::ConfineVerify { .. } => "confine-verify",
            Command::LemmaChain { .. } => "lemma-chain",
            Command::PushLeft { .. } => "push-left",
            Command::GermCheck { .. } => "germ-check",
            Command::Growth { .. } => "growth",
            Command::Displacement { .. } => "displacement",
            Command::Foelner { .. } => "foelner",
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// The command ran, and the property it checks does not hold.
    pub const CHECK_FAILED: i32 = 1;
    /// Bad arguments or malformed input data.
    pub const PARSE: i32 = 2;
    /// Input is well formed but violates a precondition.
    pub const PRECONDITION: i32 = 3;
    /// A resource cap was hit.
    pub const RESOURCE: i32 = 4;
    pub const IO: i32 = 5;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ParseNumber { .. } | Error::ParseWord { .. } | Error::Schema { .. } | Error::MalformedOracle(_) => {
            exit::PARSE
        }
        Error::ResourceLimit(_) => exit::RESOURCE,
        Error::Io(_) => exit::IO,
        _ => exit::PRECONDITION,
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub result: Value,
    pub artifact: Option<String>,
    pub passed: bool,
    pub seed: Option<u64>,
}

impl Outcome {
    fn new(summary: String, result: Value) -> Self {
        Outcome {
            summary,
            result,
            artifact: None,
            passed: true,
            seed: None,
        }
    }

    fn with_artifact(mut self, artifact: String) -> Self {
        self.artifact = Some(artifact);
        self
    }
}

/// The JSON report printed under `--json`. Everything except `elapsed_ms`
/// is a function of the configuration.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub command: &'a str,
    pub config: &'a Cli,
    pub passed: bool,
    pub seed: Option<u64>,
    pub result: &'a Value,
    pub artifact: Option<&'a str>,
    pub elapsed_ms: u128,
}

fn parse_point(s: &str) -> Result<Point> {
    s.trim().parse()
}

fn parse_set(s: &str) -> Result<Vec<Point>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse_point).collect()
}

fn parse_words(s: &str) -> Result<Vec<Word>> {
    s.split(';').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialise")
}

fn render_graph(g: &RootedLabelledGraph, format: GraphFormat) -> Result<String> {
    match format {
        GraphFormat::Dot => Ok(g.to_dot()),
        GraphFormat::Json => to_json(g),
    }
}

fn vertex_label(g: &RootedLabelledGraph, v: usize) -> String {
    match g.payload(v) {
        Payload::Point(p) => p.to_string(),
        Payload::Element(_) => format!("#{v}"),
    }
}

fn graph_summary(g: &RootedLabelledGraph) -> Value {
    let sizes: Vec<usize> = (0..=g.radius_computed())
        .map(|n| g.ball_size(g.root(), n).expect("root ball is complete"))
        .collect();
    json!({ "vertices": g.len(), "radius": g.radius_computed(), "ball_sizes": sizes })
}

fn graph_spec(point: &Option<String>, graph: &Option<String>) -> Result<GraphSpec> {
    match (point, graph) {
        (Some(p), None) => Ok(GraphSpec::Orbit {
            point: parse_point(p)?,
            root: None,
        }),
        (None, Some(g)) => g.parse(),
        _ => Err(Error::MalformedOracle("give exactly one of --point or --graph".into())),
    }
}

fn parse_window(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::ParseNumber {
        input: s.to_string(),
        reason: "expected a window LO..HI of integer radii".into(),
    };
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn random_sample(r: &mut ChaCha8Rng, max_len: usize, i: usize) -> PLMap {
    let word = |r: &mut ChaCha8Rng| -> PLMap {
        let len = r.gen_range(0..=max_len);
        Word((0..len).map(|_| Generator::ALL[r.gen_range(0..4)]).collect()).eval()
    };
    if i.is_multiple_of(2) {
        word(r)
    } else {
        let a = word(r);
        let b = word(r);
        a.inverse().compose(&b.inverse()).compose(&a).compose(&b)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let limits = Limits {
        max_vertices: cli.max_vertices,
        allow_large: cli.allow_large,
    };
    match &cli.command {
        Command::RelationsCheck => {
            let rows: Vec<Value> = [relator_one(), relator_two()]
                .iter()
                .map(|w| json!({ "word": w.to_string(), "length": w.len(), "identity": w.eval().is_identity() }))
                .collect();
            let ok = rows.iter().all(|r| r["identity"] == json!(true));
            let summary = if ok {
                "both relators = identity".to_string()
            } else {
                "a relator evaluates to a nontrivial element".to_string()
            };
            let mut o = Outcome::new(summary, json!({ "relators": rows }));
            o.passed = ok;
            Ok(o)
        }
        Command::CayleyBall { radius, format } => {
            let spec = GraphSpec::Cayley;
            let b = spec.build(*radius, &limits)?;
            let result = graph_summary(&b.graph);
            Ok(Outcome::new(
                format!("Cayley ball of radius {radius}: sizes {}", result["ball_sizes"]),
                result,
            )
            .with_artifact(render_graph(&b.graph, *format)?))
        }
        Command::OrbitGraph { point, radius, format } => {
            let p = parse_point(point)?;
            let g = orbital_ball_limited(&p, *radius, cli.max_vertices)?;
            let result = graph_summary(&g);
            Ok(Outcome::new(
                format!("orbital graph of {p} to radius {radius}: {} vertices", g.len()),
                result,
            )
            .with_artifact(render_graph(&g, *format)?))
        }
        Command::CosetGraph { oracle, set, word, radius, format } => {
            let data = word.clone().unwrap_or_else(|| set.clone());
            let h = SubgroupOracle::parse(oracle, &data)?;
            let g = coset_ball_limited(&h, *radius, cli.max_vertices)?;
            let mut result = graph_summary(&g);
            result["subgroup"] = json!(h.name);
            Ok(Outcome::new(
                format!("coset graph of {} to radius {radius}: {} vertices", h.name, g.len()),
                result,
            )
            .with_artifact(render_graph(&g, *format)?))
        }
        Command::Chabauty { left, right, max_radius } => {
            let l: GraphSpec = left.parse()?;
            let r: GraphSpec = right.parse()?;
            let a = l.build(*max_radius, &limits)?;
            let b = r.build(*max_radius, &limits)?;
            let d = chabauty_distance_at(&a.graph, a.center, &b.graph, b.center, *max_radius)?;
            let result = json!({
                "left": l.to_string(),
                "right": r.to_string(),
                "distance": d.to_string(),
                "value": d.value().map(|v| v.to_string()),
                "upper_bound": d.upper_bound().to_string(),
                "witness_radius": d.witness_radius,
                "max_radius": d.max_radius,
            });
            Ok(Outcome::new(format!("d({l}, {r}) = {d}"), result))
        }
        Command::CayleyFragments { graph, n, radius } => {
            let spec: GraphSpec = graph.parse()?;
            let radius = radius.unwrap_or(n + 4);
            let b = spec.build(radius, &limits)?;
            limits.cayley_radius(*n)?;
            let cayley = cayley_ball_limited(*n, cli.max_vertices)?.graph;
            let hits = cayley_fragment_search_in(&b.graph, &cayley, *n)?;
            let examined = b.graph.complete_centers(*n).count();
            let labels: Vec<String> = hits.iter().map(|&v| vertex_label(&b.graph, v)).collect();
            Ok(Outcome::new(
                format!("{} of {examined} vertices of {spec} carry a Cayley ball of radius {n}", hits.len()),
                json!({ "graph": spec.to_string(), "n": n, "examined": examined, "hits": labels }),
            ))
        }
        Command::ConfineBuild { set } => {
            let s = parse_set(set)?;
            let c = build_confining_set(&s)?;
            let supports: Vec<String> = c.supports.iter().map(|i| i.to_string()).collect();
            Ok(Outcome::new(
                format!("{} bumps on {}", c.elements.len(), supports.join(", ")),
                to_value(&c),
            )
            .with_artifact(to_json(&c)?))
        }
        Command::ConfineVerify { oracle, set, word, radius, elements } => {
            let data = word.clone().unwrap_or_else(|| set.clone());
            let h = SubgroupOracle::parse(oracle, &data)?;
            let mut confining = build_confining_set(&parse_set(set)?)?;
            let p: Vec<PLMap> = match elements {
                Some(ws) => {
                    let gs: Vec<PLMap> = parse_words(ws)?.iter().map(Word::eval).collect();
                    if gs.is_empty() || gs.iter().any(PLMap::is_identity) {
                        return Err(Error::TrivialElement);
                    }
                    gs
                }
                None => confining.elements.clone(),
            };
            limits.cayley_radius(*radius)?;
            let ks = commutator_elements(&cayley_ball_limited(*radius, cli.max_vertices)?);
            let rep = verify_confining_over(&h, &p, *radius, &ks);
            let summary = match &rep.witness {
                None => format!("pass: {} conjugators from F' checked against {}", rep.conjugators_checked, h.name),
                Some(w) => format!("fail: the conjugate by {w} misses P"),
            };
            let mut o = Outcome::new(summary, to_value(&rep));
            o.passed = rep.passed;
            if rep.passed && elements.is_none() {
                confining.target = h.name.clone();
                confining.certificate_radius = Some(*radius);
                o = o.with_artifact(to_json(&confining)?);
            }
            Ok(o)
        }
        Command::LemmaChain { words } => {
            let ws = parse_words(words)?;
            let gs: Vec<PLMap> = ws.iter().map(Word::eval).collect();
            let chain = lemma_interval_chain(&gs)?;
            let ordered = chain.ordering_holds()?;
            let rows: Vec<Value> = (0..chain.elements.len())
                .map(|i| {
                    json!({
                        "input": ws[chain.source_index[i]].to_string(),
                        "inverted": chain.inverted[i],
                        "interval": chain.intervals[i].to_string(),
                        "image": chain.intervals[i].image(&chain.elements[i]).expect("interval in [0, 1]").to_string(),
                    })
                })
                .collect();
            let text: Vec<String> = rows.iter().map(|r| format!("{} -> {}", r["input"], r["interval"])).collect();
            let mut o = Outcome::new(
                format!("{} (ordering {})", text.join("; "), if ordered { "holds" } else { "fails" }),
                json!({ "chain": rows, "ordering_holds": ordered }),
            );
            o.passed = ordered;
            Ok(o)
        }
        Command::PushLeft { set } => {
            let r = push_left_report(&parse_set(set)?)?;
            let mut o = Outcome::new(
                format!("k = {}; x1 fixes x0^k(S): {}", r.k, r.x1_fixes_all),
                to_value(&r),
            );
            o.passed = r.x1_fixes_all && r.minimal;
            Ok(o)
        }
        Command::GermCheck { set, samples, max_len, seed } => {
            let s = parse_set(set)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let gs: Vec<PLMap> = (0..*samples).map(|i| random_sample(&mut rng, *max_len, i)).collect();
            let rows = germ_identity_check(&s, &gs)?;
            let agree = rows.iter().filter(|r| r.agrees()).count();
            let members = rows.iter().filter(|r| r.in_commutator_germ_stab).count();
            let disagreements: Vec<String> =
                rows.iter().filter(|r| !r.agrees()).map(|r| r.element.to_string()).collect();
            let mut o = Outcome::new(
                format!("{agree}/{} samples agree ({members} in the stabiliser)", rows.len()),
                json!({ "samples": rows.len(), "agree": agree, "members": members, "disagreements": disagreements }),
            );
            o.passed = agree == rows.len();
            o.seed = Some(*seed);
            Ok(o)
        }
        Command::Growth { point, graph, max_radius, sample_roots: count, extra, window, seed, format } => {
            let spec = graph_spec(point, graph)?;
            let b = spec.build(max_radius + extra, &limits)?;
            let mut roots = vec![b.center];
            for v in sample_roots(&b.graph, *max_radius, *count, *seed) {
                if v != b.center && roots.len() < *count {
                    roots.push(v);
                }
            }
            let table = growth_table(&b.graph, &spec.to_string(), &roots, *max_radius)?;
            let fit = GrowthFit {
                window: window.as_deref().map(parse_window).transpose()?,
                ..GrowthFit::default()
            };
            let estimate = uniform_growth_estimate(&table, &fit);
            let sup = table.sup_sizes();
            let artifact = match format {
                TableFormat::Csv => growth_table_to_csv(&table)?,
                TableFormat::Json => to_json(&table)?,
            };
            let (summary, est) = match estimate {
                Ok(e) => (
                    format!(
                        "{spec}: {} roots, fitted rate {:.3} bits/step (r^2 {:.4}) over n = {}..={}: {:?}",
                        roots.len(),
                        e.fitted_rate,
                        e.r_squared,
                        e.window.0,
                        e.window.1,
                        e.classification
                    ),
                    to_value(&e),
                ),
                Err(e) => (format!("{spec}: {} roots, no fit ({e})", roots.len()), Value::Null),
            };
            let mut o = Outcome::new(
                summary,
                json!({ "graph": spec.to_string(), "roots": table.roots(), "sup_lower_bounds": sup, "estimate": est }),
            )
            .with_artifact(artifact);
            o.seed = Some(*seed);
            Ok(o)
        }
        Command::Displacement { word, point, graph, radius } => {
            let w: Word = word.parse()?;
            let spec = graph_spec(point, graph)?;
            let b = spec.build(*radius, &limits)?;
            let r = displacement(&w, &b.graph)?;
            let mut o = Outcome::new(
                format!(
                    "{w} moves vertices of {spec} by at most {} ({} checked, {} skipped near the frontier)",
                    r.max_observed, r.vertices_checked, r.vertices_skipped
                ),
                to_value(&r),
            );
            o.passed = r.max_observed as usize <= w.len();
            Ok(o)
        }
        Command::Foelner { point, graph, set, radius } => {
            let spec = graph_spec(point, graph)?;
            let (b, vertices) = if let Some(k) = set.strip_prefix("ball:") {
                let k: u32 = k.trim().parse().map_err(|_| Error::ParseNumber {
                    input: set.clone(),
                    reason: "expected ball:K with an integer K".into(),
                })?;
                let b = spec.build(k + 1, &limits)?;
                let vs: Vec<usize> = b.graph.ball(b.center, k)?.into_iter().map(|(v, _)| v).collect();
                (b, vs)
            } else {
                let b = spec.build(*radius, &limits)?;
                let mut vs = Vec::new();
                for p in parse_set(set)? {
                    vs.push(b.graph.find_point(&p).ok_or_else(|| {
                        Error::Degenerate(format!("{p} is not within radius {radius} of the base point"))
                    })?);
                }
                (b, vs)
            };
            let ratio = foelner_ratio(&b.graph, &vertices)?;
            Ok(Outcome::new(
                format!("|boundary| / |S| = {ratio} for {} vertices of {spec}", vertices.len()),
                json!({ "graph": spec.to_string(), "set_size": vertices.len(), "ratio": ratio.to_string() }),
            ))
        }
    }
}
