//! Acceptance report: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ferrers_toric::closed_forms::{
    ferrers2d_multiplicity, ferrers2d_regularity, mu_bound, partitions_of, Reg2d,
};
use ferrers_toric::diagram::{enumerate_box, Diagram, Flavor, Point};
use ferrers_toric::engine::Engine;
use ferrers_toric::oracle::{
    hilbert_invariants, oracle_invariants, toric_gb_check, DEFAULT_FACET_LIMIT, DEFAULT_MONOMIAL_LIMIT,
};
use ferrers_toric::{EngineConfig, Error};
use num_bigint::BigUint;
use rayon::prelude::*;

const BOX_BUDGET: Duration = Duration::from_secs(30);
const SWEEP_BUDGET: Duration = Duration::from_secs(60);
const LARGE_BUDGET: Duration = Duration::from_secs(5);
/// Enough for every diagram in the 3-box (27 points).
const SWEEP_FACET_LIMIT: usize = 32;
const SMALL_POINTS: usize = 10;
const GB_DEGREE: usize = 4;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome {
        pass,
        summary,
        details: Vec::new(),
    }
}

fn engine() -> Engine<BigUint> {
    Engine::new(EngineConfig::default())
}

fn p(i: u32, j: u32, k: u32) -> Point {
    Point::new(i, j, k)
}

fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn triple(r: &ferrers_toric::InvariantsReport) -> (u32, u32, BigUint) {
    (r.ring_dim, r.reg, r.mult.clone())
}

/// Every Ferrers diagram with at most `n` points, grown one addable corner at
/// a time.
fn diagrams_up_to(n: usize) -> Vec<Diagram> {
    let mut level: BTreeSet<Diagram> = [Diagram::from_layers(vec![vec![1]]).unwrap()].into();
    let mut all: Vec<Diagram> = level.iter().cloned().collect();
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for d in &level {
            let pts = d.points();
            let (a, b, _) = d.essential_dims();
            for i in 1..=a + 1 {
                for j in 1..=b + 1 {
                    let q = p(i, j, d.height(i, j) + 1);
                    let mut grown = pts.clone();
                    grown.push(q);
                    if let Ok(g) = Diagram::from_points(grown) {
                        next.insert(g);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

fn c1_boxes() -> Outcome {
    let e = engine();
    let t0 = Instant::now();
    let mut bad = Vec::new();
    for a in 1..=4u32 {
        for b in 1..=4u32 {
            for c in 1..=4u32 {
                let d = Diagram::from_generators(&[p(a, b, c)]).unwrap();
                let r = e.invariants(&d).unwrap();
                let mut s = [a, b, c];
                s.sort_unstable();
                let reg = s[0] + s[1] - 2;
                let mult = factorial(a + b + c - 3) / (factorial(a - 1) * factorial(b - 1) * factorial(c - 1));
                if (r.reg, &r.mult) != (reg, &mult) {
                    bad.push(format!("{a}x{b}x{c}: engine ({}, {}), expected ({reg}, {mult})", r.reg, r.mult));
                }
            }
        }
    }
    let dt = t0.elapsed();
    let mut o = outcome(
        bad.is_empty() && dt < BOX_BUDGET,
        format!("64 boxes, {} mismatches, {:.2?} (budget {:?})", bad.len(), dt, BOX_BUDGET),
    );
    o.details = bad;
    o
}

fn c2_engine_oracle(pp: &[Diagram]) -> (Outcome, Vec<ferrers_toric::InvariantsReport>) {
    let e = Engine::<BigUint>::new(EngineConfig {
        oracle_limit: SWEEP_FACET_LIMIT,
        ..EngineConfig::default()
    });
    let t0 = Instant::now();
    let results: Vec<(ferrers_toric::InvariantsReport, Option<String>)> = pp
        .par_iter()
        .map(|d| {
            let x = e.invariants(d).unwrap();
            let y = oracle_invariants::<BigUint>(d, SWEEP_FACET_LIMIT).unwrap();
            let bad = (triple(&x) != triple(&y)).then(|| {
                format!("{:?}: engine {:?}, oracle {:?}", d.layers(), triple(&x), triple(&y))
            });
            (x, bad)
        })
        .collect();
    let dt = t0.elapsed();
    let bad: Vec<String> = results.iter().filter_map(|(_, b)| b.clone()).collect();
    let stats = e.stats();
    let mut o = outcome(
        bad.is_empty() && dt < SWEEP_BUDGET,
        format!(
            "{} projection diagrams, {} mismatches, {} oracle fallbacks, {:.2?} (budget {:?})",
            pp.len(),
            bad.len(),
            stats.fallbacks,
            dt,
            SWEEP_BUDGET
        ),
    );
    o.details = bad;
    (o, results.into_iter().map(|(r, _)| r).collect())
}

fn c3_oracles(pp: &[Diagram]) -> Outcome {
    let small: Vec<&Diagram> = pp.iter().filter(|d| d.len() <= SMALL_POINTS).collect();
    let bad: Vec<String> = small
        .par_iter()
        .filter_map(|d| {
            let f = oracle_invariants::<BigUint>(d, SWEEP_FACET_LIMIT).unwrap();
            let h = hilbert_invariants::<BigUint>(d, None, DEFAULT_MONOMIAL_LIMIT).unwrap();
            (triple(&f) != triple(&h)).then(|| format!("{:?}: facets {:?}, hilbert {:?}", d.layers(), triple(&f), triple(&h)))
        })
        .collect();
    let mut o = outcome(
        bad.is_empty(),
        format!("{} diagrams with at most {SMALL_POINTS} points, {} mismatches", small.len(), bad.len()),
    );
    o.details = bad;
    o
}

fn c4_links() -> Outcome {
    let e = engine();
    let u = p(1, 3, 1);
    let d1 = Diagram::from_generators(&[p(1, 3, 2), p(2, 2, 3)]).unwrap();
    let d2 = Diagram::from_generators(&[p(2, 3, 3)]).unwrap();
    let mult = |d: &Diagram| {
        e.link_report(d, u, Flavor::Induction)
            .ok()
            .and_then(|r| r.link)
            .map(|l| l.mult)
    };
    let (m1, m2) = (mult(&d1), mult(&d2));
    let pass = m1 == Some(BigUint::from(2u32)) && m2 == Some(BigUint::from(1u32));
    outcome(pass, format!("link multiplicities at {u}: {m1:?} and {m2:?}, expected 2 and 1"))
}

fn c5_bounds(pp: &[Diagram], values: &[ferrers_toric::InvariantsReport]) -> Outcome {
    let bad: Vec<String> = pp
        .iter()
        .zip(values)
        .filter(|(d, r)| r.reg > mu_bound(d) || r.reg >= r.ring_dim)
        .map(|(d, r)| format!("{:?}: reg {}, mu - 2 = {}, dim {}", d.layers(), r.reg, mu_bound(d), r.ring_dim))
        .collect();
    let mut o = outcome(bad.is_empty(), format!("{} diagrams, {} violations", pp.len(), bad.len()));
    o.details = bad;
    o
}

fn c6_monotone(pp: &[Diagram], values: &[ferrers_toric::InvariantsReport]) -> Outcome {
    let strong: Vec<(&Diagram, &ferrers_toric::InvariantsReport)> = pp
        .iter()
        .zip(values)
        .filter(|(d, _)| d.has_strong_projection_property())
        .collect();
    let mut pairs = 0usize;
    let mut bad = Vec::new();
    for (d1, r1) in &strong {
        for (d2, r2) in &strong {
            if d1 != d2 && d1.is_subset_of(d2) {
                pairs += 1;
                if r1.reg > r2.reg || r1.mult > r2.mult {
                    bad.push(format!("{:?} in {:?}", d1.layers(), d2.layers()));
                }
            }
        }
    }
    let mut o = outcome(
        bad.is_empty(),
        format!("{} strong diagrams, {pairs} nested pairs, {} violations", strong.len(), bad.len()),
    );
    o.details = bad;
    o
}

fn c7_two_dimensional() -> Outcome {
    let mut reg_bad = Vec::new();
    let mut mult_bad = Vec::new();
    let mut notes = Vec::new();
    let mut total = 0;
    for lambda in (1..=SMALL_POINTS as u32).flat_map(partitions_of) {
        total += 1;
        let truth = oracle_invariants::<BigUint>(&lambda.to_diagram(), 64).unwrap();
        let mult: BigUint = ferrers2d_multiplicity(&lambda).unwrap();
        if mult != truth.mult {
            mult_bad.push(format!("{:?}: formula e {mult}, oracle {}", lambda.parts(), truth.mult));
        }
        match ferrers2d_regularity(&lambda) {
            Reg2d::Value { reg } if reg != truth.reg => {
                reg_bad.push(format!("{:?}: formula reg {reg}, oracle {}", lambda.parts(), truth.reg))
            }
            Reg2d::Value { .. } => {}
            Reg2d::Ambiguous { long_rows, twos } => notes.push(format!(
                "ambiguous {:?}: branches give {long_rows} and {twos}, oracle {}",
                lambda.parts(),
                truth.reg
            )),
            Reg2d::Gap => notes.push(format!("gap {:?}: oracle {}", lambda.parts(), truth.reg)),
        }
    }
    let mut o = outcome(
        reg_bad.is_empty() && mult_bad.is_empty(),
        format!(
            "{total} partitions, {} regularity and {} multiplicity mismatches where unambiguous, {} ambiguous or gap",
            reg_bad.len(),
            mult_bad.len(),
            notes.len()
        ),
    );
    o.details = reg_bad.into_iter().chain(mult_bad).chain(notes).collect();
    o
}

fn is_p4(r: &ferrers_toric::oracle::GbReport) -> bool {
    !r.holds
        && r.minimal_generator_witnesses.contains_key(&4)
        && r.failing_fibers.get(&4).is_some_and(|&n| n > 0)
}

fn c8_groebner() -> Outcome {
    let all = diagrams_up_to(SMALL_POINTS);
    let total = all.len();
    let small: Vec<Diagram> = all.into_iter().filter(Diagram::has_projection_property).collect();
    let bad: Vec<String> = small
        .par_iter()
        .filter_map(|d| {
            let r = toric_gb_check(d, GB_DEGREE, DEFAULT_MONOMIAL_LIMIT).unwrap();
            (!r.holds).then(|| format!("{:?}: {:?}", d.layers(), r.witness))
        })
        .collect();
    let family = Diagram::from_generators(&[
        p(1, 2, 3),
        p(2, 3, 2),
        p(3, 4, 1),
        p(4, 1, 2),
        p(2, 1, 3),
        p(3, 2, 2),
        p(4, 3, 1),
        p(1, 4, 2),
    ])
    .unwrap();
    let r = toric_gb_check(&family, GB_DEGREE, DEFAULT_MONOMIAL_LIMIT).unwrap();
    let family_ok = is_p4(&r);
    let mut o = outcome(
        bad.is_empty() && family_ok,
        format!(
            "{} of {total} diagrams with at most {SMALL_POINTS} points have the projection property, {} failures; p = 4 family: holds = {}, degree-4 witness = {}",
            small.len(),
            bad.len(),
            r.holds,
            family_ok
        ),
    );
    if let Some(w) = r.minimal_generator_witnesses.get(&4) {
        o.details.push(format!("p = 4 quartic: {:?} - {:?}", w.lhs, w.rhs));
    }
    o.details.extend(bad);
    o
}

fn c9_performance() -> Outcome {
    let cube = Diagram::from_generators(&[p(4, 4, 4)]).unwrap();
    let thirty = enumerate_box(4, 4, 4)
        .into_iter()
        .find(|d| d.len() == 30 && d.essential_dims() == (4, 4, 4) && d.has_projection_property())
        .unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    for d in [&cube, &thirty] {
        let t0 = Instant::now();
        let r = engine().invariants(d);
        let dt = t0.elapsed();
        let refused = matches!(oracle_invariants::<BigUint>(d, DEFAULT_FACET_LIMIT), Err(Error::TooLarge { .. }));
        let ok = r.is_ok() && dt < LARGE_BUDGET;
        pass &= ok;
        lines.push(format!(
            "{:?} ({} points): engine {:?} in {:.2?}, facet oracle refused: {refused}",
            d.layers(),
            d.len(),
            r.map(|r| triple(&r)),
            dt
        ));
    }
    let mut o = outcome(pass, format!("two large diagrams under {:?} each", LARGE_BUDGET));
    o.details = lines;
    o
}

fn main() {
    let pp: Vec<Diagram> = enumerate_box(3, 3, 3)
        .into_iter()
        .filter(Diagram::has_projection_property)
        .collect();
    let (c2, values) = c2_engine_oracle(&pp);
    let results = [
        ("1 box formulas", c1_boxes()),
        ("2 engine = facet oracle", c2),
        ("3 facet oracle = Hilbert oracle", c3_oracles(&pp)),
        ("4 link multiplicity inversion", c4_links()),
        ("5 regularity bound", c5_bounds(&pp, &values)),
        ("6 monotonicity on nested pairs", c6_monotone(&pp, &values)),
        ("7 two-dimensional formulas", c7_two_dimensional()),
        ("8 Groebner basis up to degree 4", c8_groebner()),
        ("9 performance", c9_performance()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("    {d}");
        }
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    std::process::exit(i32::from(failed > 0));
}
