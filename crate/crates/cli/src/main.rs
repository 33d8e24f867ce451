// SPDX-License-Identifier: Apache-2.0

//! `stallings`: batch front end for core graphs, fringes, primitivity rank
//! and fixed-point statistics of subgroups of free groups.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use stallings::expectation::{self, laurent_expand, Derivations, RationalFunction};
use stallings::montecarlo::{self, EstimateReport};
use stallings::poset::{self, AlgebraicProfile, PrimitivityRank};
use stallings::{CoreGraph, Error, Word};

#[derive(Parser)]
#[command(name = "stallings", version, about = "Core graphs, primitivity rank and fixed points of free group words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Rank of the ambient free group.
    #[arg(short = 'k', long = "rank", value_parser = clap::value_parser!(u32).range(1..))]
    rank: u32,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Subgroup {
    /// Generators, one word per argument, or @FILE with one word per line.
    #[arg(value_name = "WORD")]
    gens: Vec<String>,
}

#[derive(Args)]
struct Ambient {
    /// Generators of the containing subgroup (default: the whole group).
    #[arg(long = "in", value_name = "WORD")]
    within: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the core graph of the subgroup.
    Fold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        /// Read a graph in the text format instead of generators.
        #[arg(long, value_name = "PATH", conflicts_with = "gens")]
        graph: Option<String>,
    },
    /// Decide whether a word lies in the subgroup.
    Member {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "WORD")]
        word: String,
        #[command(flatten)]
        sub: Subgroup,
    },
    /// List every quotient of the core graph with its distance.
    Fringe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
    },
    /// Distance from the subgroup to a quotient of its core graph.
    Dist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        /// Generators of the target subgroup.
        #[arg(long, value_name = "WORD", required = true)]
        target: Vec<String>,
    },
    /// Decide whether the subgroup is a free factor of another.
    Freefactor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        #[command(flatten)]
        ambient: Ambient,
    },
    /// List the algebraic extensions.
    Algext {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
    },
    /// Primitivity rank and critical subgroups.
    Pirank {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
    },
    /// Decide whether a single word is primitive.
    Primitive {
        #[command(flatten)]
        common: Common,
        #[arg(value_name = "WORD")]
        word: String,
    },
    /// Expected number of common fixed points as a rational function of n.
    Phi {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        #[command(flatten)]
        ambient: Ambient,
        /// Also evaluate at this n.
        #[arg(long = "n", value_name = "N")]
        degree: Option<u64>,
    },
    /// L, R and C over the interval from the subgroup up to a fringe node.
    Derive {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        /// Generators of the top of the interval (default: the whole fringe).
        #[arg(long, value_name = "WORD")]
        top: Vec<String>,
    },
    /// Expansion of the expected number of fixed points in powers of 1/n.
    Expand {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        #[command(flatten)]
        ambient: Ambient,
        /// Number of terms after the leading one.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Monte Carlo estimate of the expected number of fixed points.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sub: Subgroup,
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long = "n", value_name = "N", default_value_t = 10)]
        degree: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Count lifts to per-edge random coverings instead of sampling homomorphisms.
        #[arg(long)]
        coverings: bool,
        /// Emit a CSV header and row.
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::GeneratorOutOfRange { .. }
            | Error::InvalidRank
            | Error::GraphFormat { .. }
            | Error::NoTrials
            | Error::InvalidDegree => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

thread_local! {
    static COMMAND: RefCell<&'static str> = const { RefCell::new("") };
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fold { .. } => "fold",
            Command::Member { .. } => "member",
            Command::Fringe { .. } => "fringe",
            Command::Dist { .. } => "dist",
            Command::Freefactor { .. } => "freefactor",
            Command::Algext { .. } => "algext",
            Command::Pirank { .. } => "pirank",
            Command::Primitive { .. } => "primitive",
            Command::Phi { .. } => "phi",
            Command::Derive { .. } => "derive",
            Command::Expand { .. } => "expand",
            Command::Verify { .. } => "verify",
        }
    }
}

fn read_words(args: &[String], k: u32) -> Result<Vec<Word>, Failure> {
    let mut texts = Vec::new();
    for a in args {
        if let Some(path) = a.strip_prefix('@') {
            let body = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            texts.extend(
                body.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(str::to_string),
            );
        } else {
            texts.push(a.clone());
        }
    }
    texts.iter().map(|t| Word::parse(t, k).map_err(Failure::from)).collect()
}

fn subgroup(args: &[String], k: u32) -> Result<CoreGraph, Failure> {
    if args.is_empty() {
        return Err(Failure::Usage("no generators given".into()));
    }
    Ok(CoreGraph::from_generators(k, &read_words(args, k)?)?)
}

fn ambient(args: &[String], k: u32) -> Result<CoreGraph, Failure> {
    if args.is_empty() {
        Ok(CoreGraph::bouquet(k)?)
    } else {
        subgroup(args, k)
    }
}

fn render(json: bool, mut value: Value, text: String) -> Outcome {
    Ok(if json {
        value["command"] = json!(COMMAND.with(|c| *c.borrow()));
        value.to_string()
    } else {
        text
    })
}

fn rank_json(r: PrimitivityRank) -> Value {
    r.finite().map_or(Value::Null, |x| json!(x))
}

fn names(gs: &[CoreGraph]) -> Vec<String> {
    gs.iter().map(CoreGraph::describe).collect()
}

fn profile_json(p: &AlgebraicProfile) -> Value {
    json!({
        "subgroup": p.subject.describe(),
        "primitivity_rank": rank_json(p.primitivity_rank),
        "critical": names(&p.critical),
        "algebraic_extensions": names(&p.algebraic_extensions),
    })
}

fn rational_json(f: &RationalFunction) -> Value {
    json!({
        "numerator": f.numerator().to_string(),
        "denominator": f.denominator().to_string(),
        "valid_from": f.validity_threshold(),
        "expression": f.expression(),
    })
}

fn graph_json(g: &CoreGraph) -> Value {
    json!({
        "rank": g.rank_of_ambient(),
        "vertices": g.vertex_count(),
        "edges": g.edges().iter().map(|e| json!([e.origin, e.terminus, e.label])).collect::<Vec<_>>(),
        "subgroup": g.describe(),
        "text": g.to_text(),
    })
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Fold { common, sub, graph } => {
            let g = match graph {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
                    CoreGraph::from_text(&text, common.rank)?
                }
                None => subgroup(&sub.gens, common.rank)?,
            };
            render(common.json, graph_json(&g), g.to_text().trim_end().to_string())
        }
        Command::Member { common, word, sub } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let w = Word::parse(&word, common.rank)?;
            let member = h.contains(&w);
            let verdict = if member { "member" } else { "not a member" };
            render(
                common.json,
                json!({"word": w.to_string(), "subgroup": h.describe(), "member": member}),
                verdict.to_string(),
            )
        }
        Command::Fringe { common, sub } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let f = poset::fringe(&h)?;
            let report = f.report();
            let mut text = format!("fringe of {}: {} nodes", h.describe(), report.len());
            for node in &report {
                write!(text, "\n{}", node.to_string().trim_end()).unwrap();
            }
            render(common.json, json!({"root": h.describe(), "nodes": report}), text)
        }
        Command::Dist { common, sub, target } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let t = subgroup(&target, common.rank)?;
            let d = poset::distance_to(&h, &t)?;
            render(
                common.json,
                json!({"from": h.describe(), "to": t.describe(), "distance": d}),
                d.to_string(),
            )
        }
        Command::Freefactor { common, sub, ambient: amb } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let j = ambient(&amb.within, common.rank)?;
            let ff = poset::is_free_factor(&h, &j)?;
            let verdict = if ff { "free factor" } else { "not a free factor" };
            render(
                common.json,
                json!({"subgroup": h.describe(), "in": j.describe(), "free_factor": ff}),
                verdict.to_string(),
            )
        }
        Command::Algext { common, sub } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let ae = poset::algebraic_extensions(&h)?;
            let text = names(&ae).join("\n");
            render(common.json, json!({"subgroup": h.describe(), "algebraic_extensions": names(&ae)}), text)
        }
        Command::Pirank { common, sub } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let p = poset::primitivity_profile(&h)?;
            render(common.json, profile_json(&p), p.to_string())
        }
        Command::Primitive { common, word } => {
            let w = Word::parse(&word, common.rank)?;
            if w.is_identity() {
                return Err(Error::IdentityWord.into());
            }
            let h = CoreGraph::from_generators(common.rank, std::slice::from_ref(&w))?;
            let p = poset::primitivity_profile(&h)?;
            let text = match p.primitivity_rank {
                PrimitivityRank::Infinite => "primitive; pi=inf".to_string(),
                r => format!("not primitive; pi={r}; crit=[{}]", names(&p.critical).join(", ")),
            };
            let mut value = profile_json(&p);
            value["primitive"] = json!(p.primitivity_rank.is_infinite());
            render(common.json, value, text)
        }
        Command::Phi { common, sub, ambient: amb, degree } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let j = ambient(&amb.within, common.rank)?;
            let f = expectation::phi(&h, &j)?;
            let mut value = rational_json(&f);
            let mut text = f.to_string();
            if let Some(n) = degree {
                let x = f.eval(n)?;
                value["n"] = json!(n);
                value["value"] = json!(x.to_string());
                write!(text, "\nat n = {n}: {x}").unwrap();
            }
            render(common.json, value, text)
        }
        Command::Derive { common, sub, top } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let f = poset::fringe(&h)?;
            let members: Vec<usize> = if top.is_empty() {
                (0..f.len()).collect()
            } else {
                let t = subgroup(&top, common.rank)?;
                let ti = f.index_of(&t).ok_or(Error::NotInFringe)?;
                f.interval(0, ti)
            };
            let d = Derivations::compute(&f);
            let mut rows = Vec::new();
            let mut text = String::new();
            for &a in &members {
                let dist = f.distances_from(a);
                for &b in &members {
                    if !f.covers(a, b) {
                        continue;
                    }
                    let cell = |m: &[Vec<Option<RationalFunction>>]| m[a][b].as_ref().unwrap().expression();
                    let (from, to) = (f.node(a).describe(), f.node(b).describe());
                    writeln!(
                        text,
                        "{from} -> {to} dist={} phi={} L={} R={} C={}",
                        dist[b].unwrap(),
                        cell(&d.phi),
                        cell(&d.l),
                        cell(&d.r),
                        cell(&d.c)
                    )
                    .unwrap();
                    rows.push(json!({
                        "from": from, "to": to, "distance": dist[b],
                        "phi": cell(&d.phi), "L": cell(&d.l), "R": cell(&d.r), "C": cell(&d.c),
                    }));
                }
            }
            render(common.json, json!({"root": h.describe(), "pairs": rows}), text.trim_end().to_string())
        }
        Command::Expand { common, sub, ambient: amb, order } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let (f, series, profile) = if amb.within.is_empty() {
                let a = expectation::subgroup_asymptotics(&h, order)?;
                (a.phi, a.series, Some(a.profile))
            } else {
                let j = ambient(&amb.within, common.rank)?;
                let f = expectation::phi(&h, &j)?;
                let s = laurent_expand(&f, order.unwrap_or(2));
                (f, s, None)
            };
            let mut value = json!({
                "phi": rational_json(&f),
                "series": series.to_string(),
                "leading_exponent": series.leading_exponent(),
                "order": series.order(),
                "coefficients": series.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            let mut text = series.to_string();
            if let Some(p) = profile {
                value["profile"] = profile_json(&p);
                write!(text, "\n{p}").unwrap();
            }
            render(common.json, value, text)
        }
        Command::Verify {
            common,
            sub,
            ambient: amb,
            degree,
            trials,
            seed,
            coverings,
            csv,
        } => {
            let h = subgroup(&sub.gens, common.rank)?;
            let j = ambient(&amb.within, common.rank)?;
            let report: EstimateReport = if coverings {
                montecarlo::estimate_lifts(&h, &j, degree, trials, seed, false)?
            } else {
                montecarlo::estimate_phi(&h, &j, degree, trials, seed)?
            };
            if csv {
                return Ok(format!("{}\n{}", EstimateReport::CSV_HEADER, report.csv_row()));
            }
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value["subgroup"] = json!(h.describe());
            value["in"] = json!(j.describe());
            value["model"] = json!(if coverings { "coverings" } else { "homomorphisms" });
            render(common.json, value, report.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    COMMAND.with(|c| *c.borrow_mut() = cli.command.name());
    match run(cli.command) {
        Ok(out) => {
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
