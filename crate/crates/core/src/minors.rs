//! Monomial generators, 2-minors and their lexicographic leading pairs.
//!
//! Variables are ordered by `T_u > T_v` iff `u` precedes `v`
//! lexicographically, so the leading pair of a minor is the pair containing
//! the lex-smallest of its four points.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, OrderedPointList, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }
}

/// `T_u T_v − T_{u'} T_{v'}` with `{u, v}` the leading pair. Both pairs are
/// stored with the smaller point first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binomial2Minor {
    pub lead: (Point, Point),
    pub trail: (Point, Point),
    /// Every axis whose swap produces this binomial.
    pub directions: BTreeSet<Axis>,
}

fn ordered(a: Point, b: Point) -> (Point, Point) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Swap partners of `u`, `v` along `axis`, or `None` when the minor vanishes.
fn swap(set: &HashSet<Point>, u: Point, v: Point, axis: Axis) -> Option<(Point, Point)> {
    let a = axis.index();
    let (cu, cv) = (u.coord(a), v.coord(a));
    if cu == cv {
        return None;
    }
    let u2 = u.with_coord(a, cv);
    let v2 = v.with_coord(a, cu);
    // Partners coincide with {u, v} when u and v differ only along `axis`.
    if u2 == v || !set.contains(&u2) || !set.contains(&v2) {
        return None;
    }
    Some((u2, v2))
}

/// Calls `f(lead, trail, axis)` for every nonzero minor, once per ordered
/// choice of unordered pair `{u, v}` and axis.
fn for_each_minor(points: &[Point], mut f: impl FnMut((Point, Point), (Point, Point), Axis)) {
    let set: HashSet<Point> = points.iter().copied().collect();
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    for (n, &u) in pts.iter().enumerate() {
        for &v in &pts[n + 1..] {
            for axis in Axis::ALL {
                if let Some((u2, v2)) = swap(&set, u, v, axis) {
                    let here = ordered(u, v);
                    let there = ordered(u2, v2);
                    if here.0 < there.0 {
                        f(here, there, axis);
                    } else {
                        f(there, here, axis);
                    }
                }
            }
        }
    }
}

/// The generators `x_i y_j z_k` of `I_D`, one per point.
pub fn monomial_generators(d: &Diagram) -> Vec<Point> {
    d.points()
}

type PairOfPairs = ((Point, Point), (Point, Point));

pub fn two_minors(points: &[Point]) -> Vec<Binomial2Minor> {
    let mut found: BTreeMap<PairOfPairs, BTreeSet<Axis>> = BTreeMap::new();
    for_each_minor(points, |lead, trail, axis| {
        found.entry((lead, trail)).or_default().insert(axis);
    });
    found
        .into_iter()
        .map(|((lead, trail), directions)| Binomial2Minor {
            lead,
            trail,
            directions,
        })
        .collect()
}

/// Vertices are the points; edges are the leading pairs of the nonzero
/// 2-minors. Its independence complex is the Stanley–Reisner complex of the
/// initial ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGraph {
    vertices: Vec<Point>,
    edges: BTreeSet<(Point, Point)>,
}

pub fn leading_pair_graph(points: &[Point]) -> PairGraph {
    let mut edges = BTreeSet::new();
    for_each_minor(points, |lead, _, _| {
        edges.insert(lead);
    });
    let mut vertices = points.to_vec();
    vertices.sort();
    vertices.dedup();
    PairGraph { vertices, edges }
}

impl PairGraph {
    pub fn from_parts(vertices: Vec<Point>, edges: impl IntoIterator<Item = (Point, Point)>) -> Self {
        let mut vertices = vertices;
        vertices.sort();
        vertices.dedup();
        let edges = edges.into_iter().map(|(a, b)| ordered(a, b)).collect();
        PairGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(Point, Point)> {
        &self.edges
    }

    pub fn neighbors(&self, u: Point) -> BTreeSet<Point> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_isolated(&self, u: Point) -> bool {
        !self.edges.iter().any(|&(a, b)| a == u || b == u)
    }

    /// Induced subgraph on `keep ∩ vertices`.
    pub fn induced(&self, keep: &BTreeSet<Point>) -> PairGraph {
        PairGraph {
            vertices: self.vertices.iter().copied().filter(|p| keep.contains(p)).collect(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .collect(),
        }
    }

    /// Edge set with every edge through `u` removed.
    pub fn edges_avoiding(&self, u: Point) -> BTreeSet<(Point, Point)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(a, b)| a != u && b != u)
            .collect()
    }

    /// Applies a relabeling to every vertex. The caller guarantees it is
    /// injective.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> PairGraph {
        PairGraph::from_parts(
            self.vertices.iter().map(|&p| f(p)).collect(),
            self.edges.iter().map(|&(a, b)| (f(a), f(b))),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Normal,
    Phantom,
}

/// `A_u`: the points of `order` from `u` on, together with `D^{≥2}`.
pub fn suffix_set(d: &Diagram, order: &OrderedPointList, u: Point) -> Result<Vec<Point>> {
    let pos = order.position(u).ok_or(Error::NotInLayer(u))?;
    let mut out: Vec<Point> = order.points[pos..].to_vec();
    out.extend(d.points_from_layer(2));
    out.sort();
    Ok(out)
}

/// Normal iff removing `u` from `A_u` shrinks the initial ideal, that is iff
/// the leading-pair graphs of `A_u` and `A_u^+` differ.
pub fn classify_point(d: &Diagram, order: &OrderedPointList, u: Point) -> Result<PointClass> {
    let a = suffix_set(d, order, u)?;
    let plus: Vec<Point> = a.iter().copied().filter(|&p| p != u).collect();
    Ok(classify_sets(&a, &plus))
}

pub(crate) fn classify_sets(a: &[Point], plus: &[Point]) -> PointClass {
    if leading_pair_graph(a).edges == leading_pair_graph(plus).edges {
        PointClass::Phantom
    } else {
        PointClass::Normal
    }
}
