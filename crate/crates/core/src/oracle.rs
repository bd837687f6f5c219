//! Brute-force ground truth: facets of the Stanley–Reisner complex, the
//! Hilbert function of the toric ring, and a bounded-degree check that the
//! 2-minors are a lex Gröbner basis of the toric ideal.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::closed_forms::mu_bound;
use crate::diagram::{Diagram, Point};
use crate::engine::{InvariantsReport, Source};
use crate::error::{Error, Result};
use crate::minors::{leading_pair_graph, two_minors, PairGraph};
use crate::num::{from_u64, Count};

/// Default vertex limit for facet enumeration.
pub const DEFAULT_FACET_LIMIT: usize = 24;

/// Largest number of distinct monomials held in memory by the Hilbert and
/// Gröbner checks.
pub const DEFAULT_MONOMIAL_LIMIT: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexSummary {
    pub facets: Vec<Vec<Point>>,
    pub pure: bool,
    /// `f_{-1}, f_0, f_1, …`
    pub f_vector: Vec<u64>,
    pub h_vector: Vec<i128>,
    pub complex_dim: i64,
}

impl ComplexSummary {
    /// Krull dimension of the Stanley–Reisner ring.
    pub fn ring_dim(&self) -> u32 {
        (self.complex_dim + 1) as u32
    }

    /// Number of facets of maximal dimension.
    pub fn top_facets(&self) -> u64 {
        *self.f_vector.last().unwrap()
    }

    pub fn reg(&self) -> u32 {
        self.h_vector.iter().rposition(|&h| h != 0).unwrap_or(0) as u32
    }
}

/// `h_k = Σ_{i ≤ k} (−1)^{k−i} C(d−i, k−i) f_{i−1}` for `k = 0..=d`, where
/// `d = f.len() − 1`.
pub fn h_from_f(f: &[u64]) -> Vec<i128> {
    let d = f.len() - 1;
    (0..=d)
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
                    sign * binom_i128(d - i, k - i) * f[i] as i128
                })
                .sum()
        })
        .collect()
}

/// Inverse transform: `f_{i−1} = Σ_{k ≤ i} C(d−k, i−k) h_k`.
pub fn f_from_h(h: &[i128]) -> Vec<i128> {
    let d = h.len() - 1;
    (0..=d)
        .map(|i| (0..=i).map(|k| binom_i128(d - k, i - k) * h[k]).sum())
        .collect()
}

fn binom_i128(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

/// Adjacency bitmasks over the lex-sorted vertex list.
fn adjacency(g: &PairGraph, limit: usize) -> Result<Vec<u64>> {
    let n = g.vertices().len();
    let cap = limit.min(64);
    if n > cap {
        return Err(Error::TooLarge {
            what: "vertex count",
            size: n,
            limit: cap,
        });
    }
    let index: HashMap<Point, usize> = g.vertices().iter().enumerate().map(|(n, &p)| (p, n)).collect();
    let mut adj = vec![0u64; n];
    for (a, b) in g.edges() {
        let (x, y) = (index[a], index[b]);
        adj[x] |= 1 << y;
        adj[y] |= 1 << x;
    }
    Ok(adj)
}

/// Maximal independent sets of `adj`, as bitmasks, by Bron–Kerbosch with
/// pivoting on the complement graph.
fn maximal_independent_sets(adj: &[u64]) -> Vec<u64> {
    let n = adj.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let comp: Vec<u64> = (0..n).map(|v| all & !adj[v] & !(1u64 << v)).collect();
    let mut out = Vec::new();

    fn bk(r: u64, mut p: u64, mut x: u64, comp: &[u64], out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot_pool = p | x;
        let pivot = (0..comp.len())
            .filter(|&u| pivot_pool >> u & 1 == 1)
            .max_by_key(|&u| (p & comp[u]).count_ones())
            .unwrap();
        let mut candidates = p & !comp[pivot];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            bk(r | 1 << v, p & comp[v], x & comp[v], comp, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }

    bk(0, all, 0, &comp, &mut out);
    out
}

fn face_counts(adj: &[u64]) -> Vec<u64> {
    let n = adj.len();
    let mut f = vec![0u64; n + 1];

    fn rec(allowed: u64, size: usize, adj: &[u64], f: &mut [u64]) {
        f[size] += 1;
        let mut rest = allowed;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            rec(rest & !adj[v], size + 1, adj, f);
        }
    }

    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    rec(all, 0, adj, &mut f);
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
    f
}

/// Facets, f-vector and h-vector of the independence complex of `g`.
pub fn facets(g: &PairGraph, limit: usize) -> Result<ComplexSummary> {
    let adj = adjacency(g, limit)?;
    let masks = maximal_independent_sets(&adj);
    let mut facets: Vec<Vec<Point>> = masks
        .iter()
        .map(|&m| {
            g.vertices()
                .iter()
                .enumerate()
                .filter(|(n, _)| m >> n & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect();
    facets.sort();
    let sizes: HashSet<usize> = facets.iter().map(Vec::len).collect();
    let f_vector = face_counts(&adj);
    let h_vector = h_from_f(&f_vector);
    Ok(ComplexSummary {
        pure: sizes.len() == 1,
        complex_dim: f_vector.len() as i64 - 2,
        facets,
        f_vector,
        h_vector,
    })
}

/// Facet summary of `Δ(D)`.
pub fn complex_summary(d: &Diagram, limit: usize) -> Result<ComplexSummary> {
    facets(&leading_pair_graph(&d.points()), limit)
}

pub(crate) fn summary_report<T: Count>(s: &ComplexSummary, certified: bool) -> Result<InvariantsReport<T>> {
    let reg = s.reg();
    Ok(InvariantsReport {
        ring_dim: s.ring_dim(),
        reg,
        mult: from_u64(s.top_facets())?,
        red_num: reg,
        source: Source::OracleFacets,
        certified,
    })
}

/// Invariants read off the facet enumeration. For diagrams without the
/// projection property the report is marked uncertified: it describes the
/// complex of the leading pairs, which need not match the fiber ring.
pub fn oracle_invariants<T: Count>(d: &Diagram, limit: usize) -> Result<InvariantsReport<T>> {
    let s = complex_summary(d, limit)?;
    let pp = d.has_projection_property();
    if pp && !s.pure {
        return Err(Error::Internal(format!(
            "complex of {d:?} is not pure although the projection property holds"
        )));
    }
    summary_report(&s, pp)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertTable {
    /// `H(0), …, H(L)`. These are cardinalities of sets held in memory, so
    /// they always fit in 64 bits.
    pub values: Vec<u64>,
}

/// Bit layout for exponent vectors packed into a `u128`.
struct Packing {
    shifts: [Vec<u32>; 3],
}

impl Packing {
    fn new(d: &Diagram, max_degree: usize) -> Result<Self> {
        let width = usize::BITS - max_degree.leading_zeros();
        let (a, b, c) = d.essential_dims();
        let fields = (a + b + c) as usize;
        if fields * width as usize > 128 {
            return Err(Error::TooLarge {
                what: "packed exponent bits",
                size: fields * width as usize,
                limit: 128,
            });
        }
        let mut next = 0u32;
        let mut axis = |n: u32| -> Vec<u32> {
            (0..n)
                .map(|_| {
                    let s = next;
                    next += width;
                    s
                })
                .collect()
        };
        let shifts = [axis(a), axis(b), axis(c)];
        Ok(Packing { shifts })
    }

    fn image(&self, p: Point) -> u128 {
        (0..3)
            .map(|axis| 1u128 << self.shifts[axis][p.coord(axis) as usize - 1])
            .sum()
    }
}

/// `H(ℓ)` = number of distinct degree-ℓ products of the generators
/// `x_i y_j z_k`, for `ℓ = 0..=max_degree`.
pub fn hilbert_function(d: &Diagram, max_degree: usize, monomial_limit: usize) -> Result<HilbertTable> {
    let pack = Packing::new(d, max_degree.max(1))?;
    let gens: Vec<u128> = d.points().into_iter().map(|p| pack.image(p)).collect();
    let mut layer: HashSet<u128> = HashSet::from([0u128]);
    let mut values = vec![1u64];
    for _ in 0..max_degree {
        let mut next = HashSet::with_capacity(layer.len() * 2);
        for &m in &layer {
            for &g in &gens {
                next.insert(m + g);
            }
            if next.len() > monomial_limit {
                return Err(Error::TooLarge {
                    what: "monomials in one degree",
                    size: next.len(),
                    limit: monomial_limit,
                });
            }
        }
        values.push(next.len() as u64);
        layer = next;
    }
    Ok(HilbertTable { values })
}

/// Default degree for the Hilbert oracle: dimension plus the regularity
/// bound plus slack.
pub fn default_hilbert_degree(d: &Diagram) -> usize {
    let (a, b, c) = d.essential_dims();
    (a + b + c - 2 + mu_bound(d) + 2) as usize
}

/// Hilbert polynomial data recovered from a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertFit {
    pub ring_dim: u32,
    #[serde(serialize_with = "crate::num::serialize_display")]
    pub mult: BigInt,
    #[serde(serialize_with = "crate::num::serialize_display_seq")]
    pub h_vector: Vec<BigInt>,
}

pub fn fit_hilbert(table: &HilbertTable) -> Result<HilbertFit> {
    let big: Vec<BigInt> = table.values.iter().map(|&v| BigInt::from(v)).collect();
    let last = big.len() - 1;
    let degree_error = Error::InsufficientDegree { degree: last };
    let mut diff = big.clone();
    let mut r = 0usize;
    // The r-th difference of a degree-(d−1) polynomial is eventually the
    // constant e once r = d − 1.
    let mult = loop {
        if diff.len() < 3 {
            return Err(degree_error);
        }
        let tail = &diff[diff.len() - 3..];
        if tail.iter().all(|x| *x == tail[0]) && !tail[0].is_zero() {
            break tail[0].clone();
        }
        diff = diff.windows(2).map(|w| &w[1] - &w[0]).collect();
        r += 1;
    };
    let d = r + 1;
    // Numerator of the Hilbert series: (1 − t)^d · Σ H(ℓ) t^ℓ, truncated.
    let coeffs: Vec<BigInt> = (0..=last)
        .map(|n| {
            (0..=d.min(n))
                .map(|i| {
                    let c = BigInt::from(binom_i128(d, i)) * &big[n - i];
                    if i % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .sum()
        })
        .collect();
    let top = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if top + 2 > last {
        return Err(degree_error);
    }
    let h_vector = coeffs[..=top].to_vec();
    let sum: BigInt = h_vector.iter().sum();
    if sum != mult {
        return Err(Error::Internal(format!(
            "Hilbert numerator sums to {sum}, leading difference is {mult}"
        )));
    }
    Ok(HilbertFit {
        ring_dim: d as u32,
        mult,
        h_vector,
    })
}

/// Invariants of the fiber ring from its Hilbert function alone.
pub fn hilbert_invariants<T: Count>(d: &Diagram, max_degree: Option<usize>, monomial_limit: usize) -> Result<InvariantsReport<T>> {
    let degree = max_degree.unwrap_or_else(|| default_hilbert_degree(d));
    let fit = fit_hilbert(&hilbert_function(d, degree, monomial_limit)?)?;
    let reg = (fit.h_vector.len() - 1) as u32;
    Ok(InvariantsReport {
        ring_dim: fit.ring_dim,
        reg,
        mult: crate::num::convert(&fit.mult)?,
        red_num: reg,
        source: Source::OracleHilbert,
        certified: true,
    })
}

/// A binomial `lhs − rhs`, each side a multiset of points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GbWitness {
    pub degree: usize,
    pub lhs: Vec<Point>,
    pub rhs: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GbReport {
    pub max_degree: usize,
    /// Every binomial of the toric ideal up to `max_degree` reduces to zero.
    pub holds: bool,
    /// Lowest-degree binomial whose two sides have different normal forms.
    pub witness: Option<GbWitness>,
    /// Per degree, the number of fibers with more than one normal form.
    pub failing_fibers: BTreeMap<usize, usize>,
    /// Per degree, the number of minimal generators of the toric ideal.
    pub minimal_generators: BTreeMap<usize, usize>,
    /// One minimal generator per degree in which any exist.
    pub minimal_generator_witnesses: BTreeMap<usize, GbWitness>,
    /// All leading terms of the 2-minors are squarefree.
    pub squarefree_leads: bool,
}

/// Reduces degree-≤`max_degree` binomials of the toric ideal modulo the
/// 2-minors by lex division, and counts minimal generators of the toric
/// ideal by the connected components of each fiber.
pub fn toric_gb_check(d: &Diagram, max_degree: usize, monomial_limit: usize) -> Result<GbReport> {
    let points = d.points();
    let n = points.len();
    let index: HashMap<Point, u16> = points.iter().enumerate().map(|(n, &p)| (p, n as u16)).collect();
    let minors = two_minors(&points);
    let squarefree_leads = minors.iter().all(|m| m.lead.0 != m.lead.1);
    // The first minor listed for a leading pair serves as its reducer.
    let mut rules: BTreeMap<(u16, u16), (u16, u16)> = BTreeMap::new();
    for m in &minors {
        rules
            .entry((index[&m.lead.0], index[&m.lead.1]))
            .or_insert((index[&m.trail.0], index[&m.trail.1]));
    }
    let rules: Vec<Rule> = rules.into_iter().collect();
    let pack = Packing::new(d, max_degree.max(1))?;
    let images: Vec<u128> = points.iter().map(|&p| pack.image(p)).collect();

    let mut report = GbReport {
        max_degree,
        holds: true,
        witness: None,
        failing_fibers: BTreeMap::new(),
        minimal_generators: BTreeMap::new(),
        minimal_generator_witnesses: BTreeMap::new(),
        squarefree_leads,
    };
    let to_points = |m: &[u16]| m.iter().map(|&v| points[v as usize]).collect::<Vec<_>>();

    for degree in 2..=max_degree {
        let count = crate::num::binomial::<u64>((n + degree - 1) as u64, degree as u64)?;
        if count as usize > monomial_limit {
            return Err(Error::TooLarge {
                what: "monomials in one degree",
                size: count as usize,
                limit: monomial_limit,
            });
        }
        let mut fibers: HashMap<u128, Vec<Vec<u16>>> = HashMap::new();
        let mut cur = Vec::with_capacity(degree);
        multisets(n as u16, degree, 0, &mut cur, &mut |m| {
            let img = m.iter().map(|&v| images[v as usize]).sum();
            fibers.entry(img).or_default().push(m.to_vec());
        });
        let mut fibers: Vec<Vec<Vec<u16>>> = fibers.into_values().filter(|f| f.len() > 1).collect();
        fibers.sort();

        let mut failing = 0;
        let mut generators = 0;
        for fiber in &fibers {
            let forms: Vec<Vec<u16>> = fiber.iter().map(|m| normal_form(m, &rules)).collect();
            if let Some(pos) = forms.iter().position(|f| *f != forms[0]) {
                failing += 1;
                if report.witness.is_none() {
                    report.witness = Some(GbWitness {
                        degree,
                        lhs: to_points(&forms[0]),
                        rhs: to_points(&forms[pos]),
                    });
                }
            }
            let comps = components(fiber);
            // Labels are 0..components, so the largest label is components − 1.
            let extra = *comps.iter().max().unwrap();
            if extra > 0 {
                generators += extra;
                report.minimal_generator_witnesses.entry(degree).or_insert_with(|| {
                    let other = comps.iter().position(|&c| c != comps[0]).unwrap();
                    GbWitness {
                        degree,
                        lhs: to_points(&fiber[0]),
                        rhs: to_points(&fiber[other]),
                    }
                });
            }
        }
        if failing > 0 {
            report.holds = false;
            report.failing_fibers.insert(degree, failing);
        }
        if generators > 0 {
            report.minimal_generators.insert(degree, generators);
        }
    }
    Ok(report)
}

fn multisets(n: u16, len: usize, from: u16, cur: &mut Vec<u16>, f: &mut impl FnMut(&[u16])) {
    if cur.len() == len {
        f(cur);
        return;
    }
    for v in from..n {
        cur.push(v);
        multisets(n, len, v, cur, f);
        cur.pop();
    }
}

/// Leading pair and trail pair, as variable indices.
type Rule = ((u16, u16), (u16, u16));

/// Lex normal form of a sorted monomial: replace a leading pair by its
/// trail until none divides.
fn normal_form(m: &[u16], rules: &[Rule]) -> Vec<u16> {
    let mut m = m.to_vec();
    'outer: loop {
        for &((a, b), (c, e)) in rules {
            if let Some(pa) = m.iter().position(|&x| x == a) {
                if let Some(pb) = m.iter().position(|&x| x == b) {
                    if pa != pb {
                        let (hi, lo) = if pa > pb { (pa, pb) } else { (pb, pa) };
                        m.remove(hi);
                        m.remove(lo);
                        m.push(c);
                        m.push(e);
                        m.sort_unstable();
                        continue 'outer;
                    }
                }
            }
        }
        return m;
    }
}

/// Component labels of the fiber graph, where two monomials are adjacent
/// when they share a variable.
fn components(fiber: &[Vec<u16>]) -> Vec<usize> {
    let n = fiber.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if label[y] == usize::MAX && fiber[x].iter().any(|v| fiber[y].contains(v)) {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    label
}
