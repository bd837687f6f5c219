//! Command-line front end. Every verb writes JSON (or CSV for sweeps) to
//! stdout; the exit code is the only success channel.

use std::io::Write;
use std::num::NonZeroUsize;
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::closed_forms::{
    ferrers2d_multiplicity, ferrers2d_regularity, mu_bound, profile_bounds, rect_multiplicity,
    rect_regularity, Partition, ProfileBounds, Reg2d,
};
use crate::diagram::{box_count, enumerate_box, parse_diagram, Diagram, Flavor, Plane, Point};
use crate::engine::{Engine, EngineConfig, InvariantsReport, LinkReport};
use crate::error::{Error, Result};
use crate::minors::{monomial_generators, two_minors};
use crate::oracle::{
    complex_summary, default_hilbert_degree, fit_hilbert, hilbert_function, hilbert_invariants,
    oracle_invariants, summary_report, toric_gb_check, DEFAULT_MONOMIAL_LIMIT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

type Report = InvariantsReport<BigUint>;

#[derive(Parser, Debug)]
#[command(name = "ferrers", version, about = "Invariants of toric rings of 3D Ferrers diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Vertex limit for facet enumeration.
    #[arg(long, global = true, default_value_t = 24)]
    pub limit: usize,

    /// Seed for sampled sweeps.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Shedding order used by the engine.
    #[arg(long, global = true, value_enum, default_value_t = OrderArg::Induction)]
    pub order: OrderArg,

    /// Maximum number of memoized engine states.
    #[arg(long, global = true)]
    pub cache_cap: Option<NonZeroUsize>,

    /// Check every link against facet counts on small hosts.
    #[arg(long, global = true)]
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Induction,
    Lex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    All,
    Pp,
    Strong,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a diagram and print its properties, orders and zones.
    Check {
        /// Diagram JSON, or @path to a file holding it.
        diagram: String,
        /// Dump the zones around this point, given as i,j,k.
        #[arg(long)]
        zones: Option<String>,
    },
    /// Dimension, regularity, multiplicity and reduction number.
    Invariants {
        diagram: String,
        /// Cross-check against facet enumeration.
        #[arg(long)]
        oracle: bool,
        /// Cross-check against the Hilbert function.
        #[arg(long)]
        hilbert: bool,
        /// Report the closed-form bounds.
        #[arg(long)]
        bounds: bool,
    },
    /// Monomial generators and 2-minors.
    Gens { diagram: String },
    /// Facets, f- and h-vectors, and the Hilbert function.
    Oracle {
        diagram: String,
        /// Degree up to which the Hilbert function is tabulated.
        #[arg(long)]
        hilbert_degree: Option<usize>,
        /// Omit facet lists longer than this.
        #[arg(long, default_value_t = 200)]
        max_facets: usize,
    },
    /// Compare two nested diagrams.
    Compare { smaller: String, larger: String },
    /// Run every diagram in a box.
    Sweep {
        /// Box sides a,b,c (or a single n for a cube).
        #[arg(long = "box")]
        bounds: String,
        #[arg(long, value_enum, default_value_t = Filter::Pp)]
        filter: Filter,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        hilbert: bool,
        /// Check monotonicity over all nested pairs instead of printing rows.
        #[arg(long)]
        pairs: bool,
        /// Keep only this many diagrams, chosen with --seed.
        #[arg(long)]
        sample: Option<usize>,
        /// Refuse boxes holding more diagrams than this.
        #[arg(long, default_value_t = 300_000)]
        max_count: usize,
    },
    /// Look for diagrams whose multiplicity exceeds that of their box.
    Search {
        #[arg(long = "box")]
        bounds: String,
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 300_000)]
        max_count: usize,
    },
    /// Check that the 2-minors are a lex Gröbner basis up to a degree.
    GbCheck {
        diagram: String,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
}

/// Parses the process arguments and runs; returns the exit code.
pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout().lock();
    match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            let _ = writeln!(out, "{}", json!({ "error": e.to_string(), "exit_code": code }));
            code
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::NotFerrers { .. } | Error::NotInDiagram(_) | Error::NotInLayer(_) => EXIT_INPUT,
        Error::UnsupportedDiagram(_) | Error::TooLarge { .. } | Error::InsufficientDegree { .. } | Error::NotNormal(_) | Error::HypothesisFailed(_) => {
            EXIT_UNSUPPORTED
        }
        Error::LinkMismatch { .. } | Error::Overflow | Error::Internal(_) => EXIT_INTERNAL,
    }
}

fn engine(cli: &Cli) -> Engine<BigUint> {
    Engine::new(EngineConfig {
        strategy: match cli.order {
            OrderArg::Induction => Flavor::Induction,
            OrderArg::Lex => Flavor::Lex,
        },
        verify: cli.verify,
        oracle_limit: cli.limit,
        cache_cap: cli.cache_cap,
        ..EngineConfig::default()
    })
}

fn read_diagram(arg: &str) -> Result<Diagram> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?;
            parse_diagram(&text)
        }
        None => parse_diagram(arg),
    }
}

fn parse_triple(s: &str, what: &str) -> Result<[u32; 3]> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("bad {what} {s:?}: {e}")))?;
    match parts[..] {
        [n] if n > 0 => Ok([n, n, n]),
        [a, b, c] if a > 0 && b > 0 && c > 0 => Ok([a, b, c]),
        _ => Err(Error::InvalidInput(format!("bad {what} {s:?}: expected n or a,b,c with positive entries"))),
    }
}

/// A reader that went away (`ferrers ... | head`) is not an error.
fn write_result(r: std::io::Result<()>) -> Result<()> {
    match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Internal(e.to_string())),
        _ => Ok(()),
    }
}

fn emit<W: Write>(out: &mut W, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
    write_result(writeln!(out, "{text}"))
}

pub fn execute<W: Write>(cli: &Cli, out: &mut W) -> Result<i32> {
    match &cli.command {
        Command::Check { diagram, zones } => cmd_check(read_diagram(diagram)?, zones.as_deref(), out),
        Command::Invariants {
            diagram,
            oracle,
            hilbert,
            bounds,
        } => cmd_invariants(cli, &read_diagram(diagram)?, *oracle, *hilbert, *bounds, out),
        Command::Gens { diagram } => {
            let d = read_diagram(diagram)?;
            let minors: Vec<Value> = two_minors(&d.points())
                .into_iter()
                .map(|m| json!({ "lead": [m.lead.0, m.lead.1], "trail": [m.trail.0, m.trail.1], "directions": m.directions }))
                .collect();
            emit(out, &json!({ "monomials": monomial_generators(&d), "minors": minors }))?;
            Ok(EXIT_OK)
        }
        Command::Oracle {
            diagram,
            hilbert_degree,
            max_facets,
        } => cmd_oracle(cli, &read_diagram(diagram)?, *hilbert_degree, *max_facets, out),
        Command::Compare { smaller, larger } => cmd_compare(cli, &read_diagram(smaller)?, &read_diagram(larger)?, out),
        Command::Sweep {
            bounds,
            filter,
            oracle,
            hilbert,
            pairs,
            sample,
            max_count,
        } => {
            let opts = SweepOptions {
                bounds: parse_triple(bounds, "box")?,
                filter: *filter,
                oracle: *oracle,
                hilbert: *hilbert,
                sample: *sample,
                max_count: *max_count,
            };
            if *pairs {
                cmd_pairs(cli, &opts, out)
            } else {
                cmd_sweep(cli, &opts, out)
            }
        }
        Command::Search {
            bounds,
            sample,
            max_count,
        } => cmd_search(cli, parse_triple(bounds, "box")?, *sample, *max_count, out),
        Command::GbCheck { diagram, max_degree } => {
            let d = read_diagram(diagram)?;
            let report = toric_gb_check(&d, *max_degree, DEFAULT_MONOMIAL_LIMIT)?;
            emit(
                out,
                &json!({
                    "input": d,
                    "projection_property": d.has_projection_property(),
                    "report": report,
                }),
            )?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct Properties {
    points: usize,
    essential_dims: [u32; 3],
    projection_property: bool,
    strong_projection_property: bool,
    mu_bound: u32,
}

fn properties(d: &Diagram) -> Properties {
    let (a, b, c) = d.essential_dims();
    Properties {
        points: d.len(),
        essential_dims: [a, b, c],
        projection_property: d.has_projection_property(),
        strong_projection_property: d.has_strong_projection_property(),
        mu_bound: mu_bound(d),
    }
}

fn cmd_check<W: Write>(d: Diagram, zones: Option<&str>, out: &mut W) -> Result<i32> {
    let ind = d.induction_order();
    let mut v = json!({
        "input": d,
        "properties": properties(&d),
        "profiles": { "xy": d.profile(Plane::XY), "xz": d.profile(Plane::XZ) },
        "induction_order": { "points": ind.points, "first_stage": ind.first_stage },
        "lex_order": d.lex_order().points,
    });
    if let Some(z) = zones {
        let [i, j, k] = parse_triple(z, "point")?;
        let zm = d.zones(Point::new(i, j, k))?;
        v["zones"] = json!({
            "point": zm.point,
            "alpha": zm.alpha,
            "beta": zm.beta,
            "gamma": zm.gamma,
            "Z1": zm.zone(1), "Z2": zm.zone(2), "Z3": zm.zone(3),
            "Z4": zm.zone(4), "Z5": zm.zone(5), "Z6": zm.zone(6),
        });
    }
    emit(out, &v)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
enum CrossCheck {
    Agree,
    Disagree { details: Vec<String>, reproduction: Diagram },
    Skipped { reason: String },
}

fn cross_check(d: &Diagram, reports: &[&Report]) -> CrossCheck {
    let certified: Vec<&&Report> = reports.iter().filter(|r| r.certified).collect();
    if certified.len() < 2 {
        return CrossCheck::Skipped {
            reason: "fewer than two certified sources".into(),
        };
    }
    let base = certified[0];
    let details: Vec<String> = certified[1..]
        .iter()
        .filter(|r| (r.ring_dim, r.reg, &r.mult) != (base.ring_dim, base.reg, &base.mult))
        .map(|r| {
            format!(
                "{:?} gives ({}, {}, {}), {:?} gives ({}, {}, {})",
                base.source, base.ring_dim, base.reg, base.mult, r.source, r.ring_dim, r.reg, r.mult
            )
        })
        .collect();
    if details.is_empty() {
        CrossCheck::Agree
    } else {
        CrossCheck::Disagree {
            details,
            reproduction: d.clone(),
        }
    }
}

/// A result or the reason it was not produced.
fn outcome(r: &Result<Report>) -> Value {
    match r {
        Ok(r) => serde_json::to_value(r).unwrap(),
        Err(e) => json!({ "refused": e.to_string() }),
    }
}

fn cmd_invariants<W: Write>(cli: &Cli, d: &Diagram, oracle: bool, hilbert: bool, bounds: bool, out: &mut W) -> Result<i32> {
    let t0 = Instant::now();
    let eng = engine(cli);
    let engine_result = eng.invariants(d);
    if let Err(e) = &engine_result {
        let recoverable = matches!(e, Error::UnsupportedDiagram(_)) && (oracle || hilbert);
        if !recoverable {
            return Err(e.clone());
        }
    }
    let oracle_result = oracle.then(|| oracle_invariants::<BigUint>(d, cli.limit));
    let hilbert_result = hilbert.then(|| hilbert_invariants::<BigUint>(d, None, DEFAULT_MONOMIAL_LIMIT));

    let available: Vec<&Report> = [Some(&engine_result), oracle_result.as_ref(), hilbert_result.as_ref()]
        .into_iter()
        .flatten()
        .filter_map(|r| r.as_ref().ok())
        .collect();
    if available.is_empty() {
        let err = [oracle_result, hilbert_result]
            .into_iter()
            .flatten()
            .find_map(|r| r.err())
            .unwrap_or_else(|| engine_result.clone().unwrap_err());
        return Err(err);
    }
    let check = cross_check(d, &available);

    let mut v = json!({
        "input": d,
        "properties": properties(d),
        "engine": outcome(&engine_result),
    });
    if let Some(r) = &oracle_result {
        v["oracle"] = outcome(r);
    }
    if let Some(r) = &hilbert_result {
        v["hilbert"] = outcome(r);
    }
    if bounds {
        v["bounds"] = bounds_report(d, &eng, available[0])?;
    }
    v["cross_check"] = serde_json::to_value(&check).unwrap();
    v["engine_stats"] = serde_json::to_value(eng.stats()).unwrap();
    v["timing_ms"] = json!(t0.elapsed().as_secs_f64() * 1e3);
    emit(out, &v)?;
    Ok(match check {
        CrossCheck::Disagree { .. } => EXIT_DISAGREE,
        _ => EXIT_OK,
    })
}

fn bounds_report(d: &Diagram, eng: &Engine<BigUint>, r: &Report) -> Result<Value> {
    let (a, b, c) = d.essential_dims();
    let box_mult: BigUint = rect_multiplicity(a, b, c)?;
    let mut v = json!({
        "mu_bound": mu_bound(d),
        "reg_within_mu_bound": r.reg <= mu_bound(d),
        "reg_below_dim": r.reg < r.ring_dim,
        "box": { "reg": rect_regularity(a, b, c)?, "mult": box_mult.to_string() },
    });
    if d.has_strong_projection_property() {
        let p: ProfileBounds<BigUint> = profile_bounds(d, eng)?;
        v["within_profile_bounds"] = json!(r.reg <= p.best.reg && r.mult <= p.best.mult);
        v["profile"] = serde_json::to_value(&p).unwrap();
    }
    Ok(v)
}

fn cmd_oracle<W: Write>(cli: &Cli, d: &Diagram, degree: Option<usize>, max_facets: usize, out: &mut W) -> Result<i32> {
    let s = complex_summary(d, cli.limit)?;
    let pp = d.has_projection_property();
    let inv: Report = summary_report(&s, pp)?;
    let facet_count = s.facets.len();
    let mut summary = serde_json::to_value(&s).unwrap();
    if facet_count > max_facets {
        summary["facets"] = Value::Null;
    }
    summary["facet_count"] = json!(facet_count);
    let degree = degree.unwrap_or_else(|| default_hilbert_degree(d));
    let hilbert = match hilbert_function(d, degree, DEFAULT_MONOMIAL_LIMIT) {
        Ok(t) => {
            let fit = fit_hilbert(&t);
            json!({
                "table": t,
                "fit": match fit { Ok(f) => serde_json::to_value(f).unwrap(), Err(e) => json!({ "refused": e.to_string() }) },
            })
        }
        Err(e) => json!({ "refused": e.to_string() }),
    };
    emit(
        out,
        &json!({
            "input": d,
            "groebner_guarantee": pp,
            "summary": summary,
            "invariants": inv,
            "hilbert": hilbert,
        }),
    )?;
    Ok(EXIT_OK)
}

/// Engine values when the projection property holds, facet values otherwise.
fn best_invariants(eng: &Engine<BigUint>, d: &Diagram, limit: usize) -> Result<Report> {
    match eng.invariants(d) {
        Err(Error::UnsupportedDiagram(_)) => oracle_invariants(d, limit),
        r => r,
    }
}

fn cmd_compare<W: Write>(cli: &Cli, d1: &Diagram, d2: &Diagram, out: &mut W) -> Result<i32> {
    if !d1.is_subset_of(d2) {
        return Err(Error::InvalidInput("the first diagram is not contained in the second".into()));
    }
    let eng = engine(cli);
    let r1 = best_invariants(&eng, d1, cli.limit)?;
    let r2 = best_invariants(&eng, d2, cli.limit)?;
    let hypotheses = d1.has_strong_projection_property() && d2.has_strong_projection_property();
    let reg_monotone = r1.reg <= r2.reg;
    let mult_monotone = r1.mult <= r2.mult;

    let mut links = Vec::new();
    let mut inversions = Vec::new();
    if d1.has_projection_property() && d2.has_projection_property() {
        for u in d1.layer_points(1) {
            let l1: LinkReport<BigUint> = eng.link_report(d1, u, Flavor::Induction)?;
            let l2: LinkReport<BigUint> = eng.link_report(d2, u, Flavor::Induction)?;
            let m1 = l1.link.as_ref().map(|l| l.mult.clone());
            let m2 = l2.link.as_ref().map(|l| l.mult.clone());
            if let (Some(a), Some(b)) = (&m1, &m2) {
                if a > b {
                    inversions.push(json!({ "point": u, "link_mult": [a.to_string(), b.to_string()] }));
                }
            }
            links.push(json!({
                "point": u,
                "smaller": m1.map(|m| m.to_string()),
                "larger": m2.map(|m| m.to_string()),
            }));
        }
    }
    let note = if hypotheses {
        "both diagrams have the strong projection property; monotonicity is expected"
    } else {
        "strong projection property missing; the comparison is informational"
    };
    emit(
        out,
        &json!({
            "smaller": { "input": d1, "properties": properties(d1), "invariants": r1 },
            "larger": { "input": d2, "properties": properties(d2), "invariants": r2 },
            "hypotheses_hold": hypotheses,
            "note": note,
            "reg_monotone": reg_monotone,
            "mult_monotone": mult_monotone,
            "link_multiplicities": links,
            "link_inversions": inversions,
        }),
    )?;
    Ok(if hypotheses && !(reg_monotone && mult_monotone) {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    })
}

struct SweepOptions {
    bounds: [u32; 3],
    filter: Filter,
    oracle: bool,
    hilbert: bool,
    sample: Option<usize>,
    max_count: usize,
}

fn sweep_diagrams(cli: &Cli, [a, b, c]: [u32; 3], filter: Filter, sample: Option<usize>, max_count: usize) -> Result<Vec<Diagram>> {
    let estimate = box_count(a, b, c);
    if estimate > max_count as f64 {
        return Err(Error::TooLarge {
            what: "diagrams in the box",
            size: estimate.min(usize::MAX as f64) as usize,
            limit: max_count,
        });
    }
    let mut all: Vec<(usize, Diagram)> = enumerate_box(a, b, c)
        .into_iter()
        .filter(|d| match filter {
            Filter::All => true,
            Filter::Pp => d.has_projection_property(),
            Filter::Strong => d.has_strong_projection_property(),
        })
        .enumerate()
        .collect();
    if let Some(n) = sample {
        let mut rng = StdRng::seed_from_u64(cli.seed);
        all.shuffle(&mut rng);
        all.truncate(n);
        all.sort_by_key(|(n, _)| *n);
    }
    Ok(all.into_iter().map(|(_, d)| d).collect())
}

#[derive(Serialize)]
struct SweepRow {
    layers: String,
    points: usize,
    a: u32,
    b: u32,
    c: u32,
    pp: bool,
    strong_pp: bool,
    ring_dim: Option<u32>,
    reg: Option<u32>,
    mult: Option<String>,
    source: Option<String>,
    oracle_reg: Option<u32>,
    oracle_mult: Option<String>,
    hilbert_reg: Option<u32>,
    hilbert_mult: Option<String>,
    /// Two-dimensional formula values when the first layer is the whole diagram.
    formula2d_reg: Option<String>,
    formula2d_mult: Option<String>,
    reg_within_mu: Option<bool>,
    agree: Option<bool>,
    error: Option<String>,
}

fn sweep_row(cli: &Cli, eng: &Engine<BigUint>, d: &Diagram, oracle: bool, hilbert: bool) -> SweepRow {
    let (a, b, c) = d.essential_dims();
    let main = best_invariants(eng, d, cli.limit);
    let orc = oracle.then(|| oracle_invariants::<BigUint>(d, cli.limit));
    let hil = hilbert.then(|| hilbert_invariants::<BigUint>(d, None, DEFAULT_MONOMIAL_LIMIT));
    let mut row = SweepRow {
        layers: serde_json::to_string(d.layers()).unwrap(),
        points: d.len(),
        a,
        b,
        c,
        pp: d.has_projection_property(),
        strong_pp: d.has_strong_projection_property(),
        ring_dim: None,
        reg: None,
        mult: None,
        source: None,
        oracle_reg: None,
        oracle_mult: None,
        hilbert_reg: None,
        hilbert_mult: None,
        formula2d_reg: None,
        formula2d_mult: None,
        reg_within_mu: None,
        agree: None,
        error: None,
    };
    if a == 1 {
        let lambda = Partition::new(d.layers()[0].clone()).expect("layers are partitions");
        row.formula2d_reg = Some(match ferrers2d_regularity(&lambda) {
            Reg2d::Value { reg } => reg.to_string(),
            Reg2d::Ambiguous { long_rows, twos } => format!("ambiguous:{long_rows}|{twos}"),
            Reg2d::Gap => "gap".into(),
        });
        row.formula2d_mult = ferrers2d_multiplicity::<BigUint>(&lambda).ok().map(|m| m.to_string());
    }
    match &main {
        Ok(r) => {
            row.ring_dim = Some(r.ring_dim);
            row.reg = Some(r.reg);
            row.mult = Some(r.mult.to_string());
            row.source = Some(serde_json::to_value(r.source).unwrap().as_str().unwrap().to_string());
            row.reg_within_mu = Some(r.reg <= mu_bound(d));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    let mut reports: Vec<&Report> = main.iter().collect();
    if let Some(Ok(r)) = &orc {
        row.oracle_reg = Some(r.reg);
        row.oracle_mult = Some(r.mult.to_string());
        reports.push(r);
    }
    if let Some(Ok(r)) = &hil {
        row.hilbert_reg = Some(r.reg);
        row.hilbert_mult = Some(r.mult.to_string());
        reports.push(r);
    }
    row.agree = match cross_check(d, &reports) {
        CrossCheck::Agree => Some(true),
        CrossCheck::Disagree { .. } => Some(false),
        CrossCheck::Skipped { .. } => None,
    };
    row
}

fn write_rows<W: Write, R: Serialize>(cli: &Cli, rows: &[R], out: &mut W) -> Result<()> {
    match cli.format {
        Format::Json => emit(out, &rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                if let Err(e) = w.serialize(r) {
                    return match e.into_kind() {
                        csv::ErrorKind::Io(io) => write_result(Err(io)),
                        kind => Err(Error::Internal(format!("{kind:?}"))),
                    };
                }
            }
            write_result(w.flush())
        }
    }
}

fn cmd_sweep<W: Write>(cli: &Cli, opts: &SweepOptions, out: &mut W) -> Result<i32> {
    let diagrams = sweep_diagrams(cli, opts.bounds, opts.filter, opts.sample, opts.max_count)?;
    let eng = engine(cli);
    let rows: Vec<SweepRow> = diagrams
        .par_iter()
        .map(|d| sweep_row(cli, &eng, d, opts.oracle, opts.hilbert))
        .collect();
    write_rows(cli, &rows, out)?;
    Ok(if rows.iter().any(|r| r.agree == Some(false)) {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct PairViolation {
    smaller: String,
    larger: String,
    reg: [u32; 2],
    mult: [String; 2],
}

fn cmd_pairs<W: Write>(cli: &Cli, opts: &SweepOptions, out: &mut W) -> Result<i32> {
    let diagrams = sweep_diagrams(cli, opts.bounds, opts.filter, opts.sample, opts.max_count)?;
    let eng = engine(cli);
    let values: Vec<Report> = diagrams
        .par_iter()
        .map(|d| best_invariants(&eng, d, cli.limit))
        .collect::<Result<_>>()?;
    let all_strong = diagrams.iter().all(Diagram::has_strong_projection_property);
    let (checked, violations): (usize, Vec<PairViolation>) = (0..diagrams.len())
        .into_par_iter()
        .map(|x| {
            let mut n = 0;
            let mut bad = Vec::new();
            for y in 0..diagrams.len() {
                if x == y || !diagrams[x].is_subset_of(&diagrams[y]) {
                    continue;
                }
                n += 1;
                let (r1, r2) = (&values[x], &values[y]);
                if r1.reg > r2.reg || r1.mult > r2.mult {
                    bad.push(PairViolation {
                        smaller: serde_json::to_string(diagrams[x].layers()).unwrap(),
                        larger: serde_json::to_string(diagrams[y].layers()).unwrap(),
                        reg: [r1.reg, r2.reg],
                        mult: [r1.mult.to_string(), r2.mult.to_string()],
                    });
                }
            }
            (n, bad)
        })
        .reduce(|| (0, Vec::new()), |(n1, mut v1), (n2, v2)| {
            v1.extend(v2);
            (n1 + n2, v1)
        });
    match cli.format {
        Format::Json => emit(
            out,
            &json!({
                "box": opts.bounds,
                "diagrams": diagrams.len(),
                "pairs_checked": checked,
                "hypotheses_hold": all_strong,
                "violations": violations,
            }),
        )?,
        Format::Csv => {
            let flat: Vec<Value> = violations
                .iter()
                .map(|v| json!({ "smaller": v.smaller, "larger": v.larger, "reg_smaller": v.reg[0], "reg_larger": v.reg[1], "mult_smaller": v.mult[0], "mult_larger": v.mult[1] }))
                .collect();
            write_rows(cli, &flat, out)?
        }
    }
    Ok(if all_strong && !violations.is_empty() {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    })
}

fn cmd_search<W: Write>(cli: &Cli, bounds: [u32; 3], sample: Option<usize>, max_count: usize, out: &mut W) -> Result<i32> {
    let diagrams = sweep_diagrams(cli, bounds, Filter::Pp, sample, max_count)?;
    let eng = engine(cli);
    let candidates: Vec<Value> = diagrams
        .par_iter()
        .map(|d| -> Result<Option<Value>> {
            let r = eng.invariants(d)?;
            let (a, b, c) = d.essential_dims();
            let bound: BigUint = rect_multiplicity(a, b, c)?;
            if r.mult <= bound {
                return Ok(None);
            }
            let orc = oracle_invariants::<BigUint>(d, cli.limit);
            let hil = hilbert_invariants::<BigUint>(d, None, DEFAULT_MONOMIAL_LIMIT);
            Ok(Some(json!({
                "input": d,
                "strong_projection_property": d.has_strong_projection_property(),
                "mult": r.mult.to_string(),
                "box_mult": bound.to_string(),
                "oracle": outcome(&orc),
                "hilbert": outcome(&hil),
            })))
        })
        .filter_map(|r| r.transpose())
        .collect::<Result<_>>()?;
    let summary = if candidates.is_empty() {
        "no counterexample found".to_string()
    } else {
        format!("{} counterexample candidates", candidates.len())
    };
    emit(
        out,
        &json!({
            "box": bounds,
            "diagrams_checked": diagrams.len(),
            "counterexamples": candidates,
            "summary": summary,
        }),
    )?;
    Ok(EXIT_OK)
}
