//! Three-dimensional Ferrers diagrams.
//!
//! A diagram is stored as a stack of layer height matrices: layer `i` is a
//! partition `λ⁽ⁱ⁾` and `(i, j, k)` belongs to the diagram iff `k ≤ λ⁽ⁱ⁾_j`.
//! Coordinates are 1-based. A validated diagram is downward closed, so every
//! coordinate value between 1 and its maximum is inhabited and the diagram is
//! automatically essential; [`essential_reduce`] exists for the arbitrary
//! point sets produced by zone arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::closed_forms::Partition;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct Point {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl Point {
    pub const fn new(i: u32, j: u32, k: u32) -> Self {
        Point { i, j, k }
    }

    /// `(i, j, k) ↦ (i, k, j)`.
    pub const fn flip(self) -> Self {
        Point::new(self.i, self.k, self.j)
    }

    pub fn coord(self, axis: usize) -> u32 {
        match axis {
            0 => self.i,
            1 => self.j,
            2 => self.k,
            _ => panic!("axis {axis} out of range"),
        }
    }

    pub fn with_coord(mut self, axis: usize, v: u32) -> Self {
        match axis {
            0 => self.i = v,
            1 => self.j = v,
            2 => self.k = v,
            _ => panic!("axis {axis} out of range"),
        }
        self
    }

    pub fn dominated_by(self, other: Point) -> bool {
        self.i <= other.i && self.j <= other.j && self.k <= other.k
    }
}

impl TryFrom<[u32; 3]> for Point {
    type Error = Error;

    fn try_from(c: [u32; 3]) -> Result<Self> {
        if c.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "coordinates must be >= 1, got {c:?}"
            )));
        }
        Ok(Point::new(c[0], c[1], c[2]))
    }
}

impl From<Point> for [u32; 3] {
    fn from(p: Point) -> Self {
        [p.i, p.j, p.k]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which order is used to shed the points of the first layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Induction,
    Lex,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "LayersRepr", into = "LayersRepr")]
pub struct Diagram {
    layers: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct LayersRepr {
    layers: Vec<Vec<u32>>,
}

impl TryFrom<LayersRepr> for Diagram {
    type Error = Error;
    fn try_from(r: LayersRepr) -> Result<Self> {
        Diagram::from_layers(r.layers)
    }
}

impl From<Diagram> for LayersRepr {
    fn from(d: Diagram) -> Self {
        LayersRepr { layers: d.layers }
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.layers)
    }
}

impl Diagram {
    /// The empty sentinel. Never produced by [`Diagram::from_layers`].
    pub fn empty() -> Self {
        Diagram { layers: Vec::new() }
    }

    pub fn from_layers(layers: Vec<Vec<u32>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("diagram has no layers".into()));
        }
        for (ii, layer) in layers.iter().enumerate() {
            let i = ii as u32 + 1;
            if layer.is_empty() {
                return Err(Error::InvalidInput(format!("layer {i} is empty")));
            }
            for (jj, &h) in layer.iter().enumerate() {
                let j = jj as u32 + 1;
                if h == 0 {
                    return Err(Error::InvalidInput(format!(
                        "zero height at layer {i}, column {j}"
                    )));
                }
                if jj > 0 && h > layer[jj - 1] {
                    return Err(Error::NotFerrers {
                        point: Point::new(i, j, h),
                        reason: format!("heights increase in j: ({i},{},{h}) is missing", j - 1),
                    });
                }
                if ii > 0 {
                    let below = layers[ii - 1].get(jj).copied().unwrap_or(0);
                    if h > below {
                        return Err(Error::NotFerrers {
                            point: Point::new(i, j, h),
                            reason: format!("layer {i} exceeds layer {}: ({},{j},{h}) is missing", i - 1, i - 1),
                        });
                    }
                }
            }
        }
        Ok(Diagram { layers })
    }

    /// Downward closure of a nonempty generator set.
    pub fn from_generators(gens: &[Point]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidInput("empty generator set".into()));
        }
        if let Some(g) = gens.iter().find(|g| g.i == 0 || g.j == 0 || g.k == 0) {
            return Err(Error::InvalidInput(format!("coordinates must be >= 1, got {g}")));
        }
        let a = gens.iter().map(|g| g.i).max().unwrap();
        let layers = (1..=a)
            .map(|i| {
                let b = gens.iter().filter(|g| g.i >= i).map(|g| g.j).max().unwrap();
                (1..=b)
                    .map(|j| {
                        gens.iter()
                            .filter(|g| g.i >= i && g.j >= j)
                            .map(|g| g.k)
                            .max()
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        Diagram::from_layers(layers)
    }

    /// Builds a diagram from a point set that must already be downward closed.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Result<Self> {
        let set: BTreeSet<Point> = points.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidInput("empty point set".into()));
        }
        for &p in &set {
            if p.i == 0 || p.j == 0 || p.k == 0 {
                return Err(Error::InvalidInput(format!("coordinates must be >= 1, got {p}")));
            }
            for axis in 0..3 {
                let c = p.coord(axis);
                if c > 1 {
                    let q = p.with_coord(axis, c - 1);
                    if !set.contains(&q) {
                        return Err(Error::NotFerrers {
                            point: p,
                            reason: format!("{q} is missing"),
                        });
                    }
                }
            }
        }
        let mut heights: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for p in &set {
            let h = heights.entry((p.i, p.j)).or_insert(0);
            *h = (*h).max(p.k);
        }
        let a = set.iter().map(|p| p.i).max().unwrap();
        let layers = (1..=a)
            .map(|i| {
                heights
                    .range((i, 0)..(i + 1, 0))
                    .map(|(_, &h)| h)
                    .collect::<Vec<_>>()
            })
            .collect();
        Diagram::from_layers(layers)
    }

    pub fn layers(&self) -> &[Vec<u32>] {
        &self.layers
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.iter())
            .map(|&h| h as usize)
            .sum()
    }

    pub fn num_layers(&self) -> u32 {
        self.layers.len() as u32
    }

    /// `λ⁽ⁱ⁾_j`, or 0 outside the diagram.
    pub fn height(&self, i: u32, j: u32) -> u32 {
        if i == 0 || j == 0 {
            return 0;
        }
        self.layers
            .get(i as usize - 1)
            .and_then(|l| l.get(j as usize - 1))
            .copied()
            .unwrap_or(0)
    }

    /// Number of columns of layer `i` (0 past the last layer).
    pub fn row_len(&self, i: u32) -> u32 {
        if i == 0 {
            return 0;
        }
        self.layers.get(i as usize - 1).map_or(0, |l| l.len() as u32)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.k >= 1 && p.k <= self.height(p.i, p.j)
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        (1..=self.num_layers()).flat_map(|i| self.layer_points(i)).collect()
    }

    /// Points of the layer `x = i`, lexicographically.
    pub fn layer_points(&self, i: u32) -> Vec<Point> {
        let mut out = Vec::new();
        for j in 1..=self.row_len(i) {
            for k in 1..=self.height(i, j) {
                out.push(Point::new(i, j, k));
            }
        }
        out
    }

    /// Points with `x ≥ i`, lexicographically.
    pub fn points_from_layer(&self, i: u32) -> Vec<Point> {
        (i.max(1)..=self.num_layers())
            .flat_map(|l| self.layer_points(l))
            .collect()
    }

    /// `D^{≥2}` shifted down one layer; empty when `a_D = 1`.
    pub fn without_first_layer(&self) -> Diagram {
        Diagram {
            layers: self.layers.iter().skip(1).cloned().collect(),
        }
    }

    /// Essential length, width and height `(a_D, b_D, c_D)`.
    pub fn essential_dims(&self) -> (u32, u32, u32) {
        if self.is_empty() {
            return (0, 0, 0);
        }
        (self.num_layers(), self.row_len(1), self.height(1, 1))
    }

    /// `b_{D^{≥i}}`: width of the layers from `i` on.
    pub fn width_from(&self, i: u32) -> u32 {
        self.row_len(i.max(1))
    }

    /// `c_{D^{≥i}}`: height of the layers from `i` on.
    pub fn height_from(&self, i: u32) -> u32 {
        self.height(i.max(1), 1)
    }

    /// `S(D) = {(i, k, j)}`; each layer is replaced by its conjugate partition.
    pub fn flip(&self) -> Diagram {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                (1..=l[0])
                    .map(|k| l.iter().filter(|&&h| h >= k).count() as u32)
                    .collect()
            })
            .collect();
        Diagram { layers }
    }

    /// `(α, β, γ)`: how far the lines through `u` extend in `i`, `j` and `k`.
    pub fn alpha_beta_gamma(&self, u: Point) -> Result<(u32, u32, u32)> {
        if !self.contains(u) {
            return Err(Error::NotInDiagram(u));
        }
        let alpha = (u.i..=self.num_layers())
            .take_while(|&i| self.contains(Point::new(i, u.j, u.k)))
            .last()
            .unwrap();
        let beta = (u.j..=self.row_len(u.i))
            .take_while(|&j| self.height(u.i, j) >= u.k)
            .last()
            .unwrap();
        let gamma = self.height(u.i, u.j);
        Ok((alpha, beta, gamma))
    }

    pub fn zones(&self, u: Point) -> Result<ZoneMap> {
        let (alpha, beta, gamma) = self.alpha_beta_gamma(u)?;
        let mut zones: [Vec<Point>; 6] = Default::default();
        for p in self.points_from_layer(u.i) {
            let z = if p.j <= u.j {
                if p.k > gamma {
                    0
                } else if p.k > u.k {
                    1
                } else {
                    2
                }
            } else if p.j <= beta {
                if p.k > u.k {
                    3
                } else {
                    4
                }
            } else {
                5
            };
            zones[z].push(p);
        }
        Ok(ZoneMap {
            point: u,
            alpha,
            beta,
            gamma,
            zones,
        })
    }

    pub fn has_projection_property(&self) -> bool {
        (1..self.num_layers()).all(|i| {
            let b = self.row_len(i + 1);
            let c = self.height(i + 1, 1);
            self.contains(Point::new(i, b, c))
        })
    }

    pub fn has_strong_projection_property(&self) -> bool {
        (1..self.num_layers()).all(|i| {
            let (b_next, c_next) = (self.row_len(i + 1), self.height(i + 1, 1));
            let (b_here, c_here) = (self.row_len(i), self.height(i, 1));
            (b_next == 1 || self.contains(Point::new(i, b_next, c_here)))
                && (c_next == 1 || self.contains(Point::new(i, b_here, c_next)))
        })
    }

    /// The two-stage shedding order of the first layer: lexicographic on the
    /// points with `k ≤ c_{D^{≥2}}`, then the flipped-lexicographic order
    /// (`k` major, `j` minor) on the rest.
    pub fn induction_order(&self) -> OrderedPointList {
        let cut = self.height_from(2);
        let layer = self.layer_points(1);
        let mut points: Vec<Point> = layer.iter().copied().filter(|p| p.k <= cut).collect();
        let first_stage = points.len();
        let mut rest: Vec<Point> = layer.into_iter().filter(|p| p.k > cut).collect();
        rest.sort_by_key(|p| (p.k, p.j));
        points.extend(rest);
        OrderedPointList {
            points,
            flavor: Flavor::Induction,
            first_stage,
        }
    }

    pub fn lex_order(&self) -> OrderedPointList {
        let points = self.layer_points(1);
        let first_stage = points.len();
        OrderedPointList {
            points,
            flavor: Flavor::Lex,
            first_stage,
        }
    }

    pub fn order(&self, flavor: Flavor) -> OrderedPointList {
        match flavor {
            Flavor::Induction => self.induction_order(),
            Flavor::Lex => self.lex_order(),
        }
    }

    pub fn profile(&self, plane: Plane) -> Partition {
        let parts = match plane {
            Plane::XY => self.layers.iter().map(|l| l.len() as u32).collect(),
            Plane::XZ => self.layers.iter().map(|l| l[0]).collect(),
        };
        Partition::new(parts).expect("profiles of a Ferrers diagram are partitions")
    }

    /// Image of the diagram under a permutation of the axes: coordinate `n`
    /// of the image is coordinate `perm[n]` of the source.
    pub fn permute_axes(&self, perm: [usize; 3]) -> Diagram {
        let pts = self.points().into_iter().map(|p| {
            Point::new(p.coord(perm[0]), p.coord(perm[1]), p.coord(perm[2]))
        });
        Diagram::from_points(pts).expect("axis permutations preserve downward closure")
    }

    pub fn is_subset_of(&self, other: &Diagram) -> bool {
        self.layers.iter().enumerate().all(|(ii, l)| {
            l.iter()
                .enumerate()
                .all(|(jj, &h)| h <= other.height(ii as u32 + 1, jj as u32 + 1))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    XY,
    XZ,
}

/// The six zones of `D^{≥ i₀}` around a point `u = (i₀, j₀, k₀)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZoneMap {
    pub point: Point,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    zones: [Vec<Point>; 6],
}

impl ZoneMap {
    /// Zone `Z_n`, `n` in `1..=6`.
    pub fn zone(&self, n: usize) -> &[Point] {
        &self.zones[n - 1]
    }

    /// `Z_n ∩ D^i`.
    pub fn in_layer(&self, n: usize, i: u32) -> impl Iterator<Item = Point> + '_ {
        self.zone(n).iter().copied().filter(move |p| p.i == i)
    }

    /// `Z_n ∩ D^{≥i}`.
    pub fn from_layer(&self, n: usize, i: u32) -> impl Iterator<Item = Point> + '_ {
        self.zone(n).iter().copied().filter(move |p| p.i >= i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPointList {
    pub points: Vec<Point>,
    pub flavor: Flavor,
    /// Number of leading points shed in the first stage; the whole list for lex.
    pub first_stage: usize,
}

impl OrderedPointList {
    pub fn position(&self, p: Point) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    /// Checks the quasi-lexicographic axioms against the first layer of `d`.
    pub fn is_quasi_lexicographic(&self, d: &Diagram) -> bool {
        let mut expected = d.layer_points(1);
        let mut got = self.points.clone();
        got.sort();
        expected.sort();
        if got != expected {
            return false;
        }
        self.points.iter().enumerate().all(|(n, p)| {
            self.points[n + 1..]
                .iter()
                .all(|q| !(q.j <= p.j && q.k <= p.k))
        })
    }
}

/// A point set relabeled so that every coordinate value is inhabited.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub diagram: Diagram,
    maps: [BTreeMap<u32, u32>; 3],
}

impl Reduction {
    pub fn map(&self, p: Point) -> Option<Point> {
        Some(Point::new(
            *self.maps[0].get(&p.i)?,
            *self.maps[1].get(&p.j)?,
            *self.maps[2].get(&p.k)?,
        ))
    }
}

/// Deletes the empty `i`-, `j`- and `k`-slices of a point set and checks that
/// what remains is a Ferrers diagram.
pub fn essential_reduce<'a, I>(points: I) -> Result<Reduction>
where
    I: IntoIterator<Item = &'a Point>,
{
    let pts: Vec<Point> = points.into_iter().copied().collect();
    if pts.is_empty() {
        return Err(Error::InvalidInput("cannot reduce an empty diagram".into()));
    }
    let maps: [BTreeMap<u32, u32>; 3] = std::array::from_fn(|axis| {
        let values: BTreeSet<u32> = pts.iter().map(|p| p.coord(axis)).collect();
        values
            .into_iter()
            .enumerate()
            .map(|(n, v)| (v, n as u32 + 1))
            .collect()
    });
    let relabel = |p: &Point| Point::new(maps[0][&p.i], maps[1][&p.j], maps[2][&p.k]);
    let diagram = Diagram::from_points(pts.iter().map(relabel))?;
    Ok(Reduction { diagram, maps })
}

/// Input form of a diagram: exactly one of `layers` and `generators`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Point>>,
}

impl DiagramSpec {
    pub fn build(self) -> Result<Diagram> {
        match (self.layers, self.generators) {
            (Some(layers), None) => Diagram::from_layers(layers),
            (None, Some(gens)) => Diagram::from_generators(&gens),
            _ => Err(Error::InvalidInput(
                "exactly one of \"layers\" and \"generators\" must be given".into(),
            )),
        }
    }
}

pub fn parse_diagram(json: &str) -> Result<Diagram> {
    let spec: DiagramSpec = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("bad diagram JSON: {e}")))?;
    spec.build()
}

/// All Ferrers diagrams inside `[a] × [b] × [c]`, in a fixed order: layer
/// matrices are enumerated depth first, each layer bounded by the previous.
pub fn enumerate_box(a: u32, b: u32, c: u32) -> Vec<Diagram> {
    fn partitions_under(bound: &[u32]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(bound: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            let j = cur.len();
            if j >= bound.len() {
                return;
            }
            let cap = cur.last().map_or(bound[j], |&h| h.min(bound[j]));
            for h in 1..=cap {
                cur.push(h);
                rec(bound, cur, out);
                cur.pop();
            }
        }
        rec(bound, &mut cur, &mut out);
        out
    }

    fn rec(a: u32, layers: &mut Vec<Vec<u32>>, out: &mut Vec<Diagram>, cache: &mut BTreeMap<Vec<u32>, Vec<Vec<u32>>>) {
        if !layers.is_empty() {
            out.push(Diagram {
                layers: layers.clone(),
            });
        }
        if layers.len() as u32 >= a {
            return;
        }
        let bound = layers.last().cloned().unwrap();
        let options = cache
            .entry(bound.clone())
            .or_insert_with(|| partitions_under(&bound))
            .clone();
        for p in options {
            layers.push(p);
            rec(a, layers, out, cache);
            layers.pop();
        }
    }

    let mut out = Vec::new();
    if a == 0 || b == 0 || c == 0 {
        return out;
    }
    let mut cache = BTreeMap::new();
    for first in partitions_under(&vec![c; b as usize]) {
        let mut layers = vec![first];
        rec(a, &mut layers, &mut out, &mut cache);
    }
    out
}

/// Number of nonempty diagrams in the box, by the plane-partition product
/// formula. Used to refuse sweeps that would not finish.
pub fn box_count(a: u32, b: u32, c: u32) -> f64 {
    let mut r = 1.0f64;
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                r *= (i + j + k - 1) as f64 / (i + j + k - 2) as f64;
            }
        }
    }
    r - 1.0
}
