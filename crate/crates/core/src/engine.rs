//! Regularity and multiplicity by shedding the first layer point by point.
//!
//! A [`SuffixState`] stands for the point set `A_u`: the points of the first
//! layer from `u` on (in the chosen order) together with all later layers.
//! Removing `u` either leaves the leading-pair graph unchanged (a phantom
//! point, whose removal only drops a cone apex) or is a genuine deletion, in
//! which case the link of `T_u` is re-expressed as another suffix state of a
//! smaller diagram. Every link is checked against the graph-level link before
//! it is trusted; failures fall back to facet enumeration.

use std::collections::BTreeSet;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};

use log::{debug, warn};
use lru::LruCache;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::diagram::{essential_reduce, Diagram, Flavor, Point, Reduction};
use crate::error::{Error, Result};
use crate::minors::{classify_sets, leading_pair_graph, PairGraph, PointClass};
use crate::num::{self, Count};
use crate::oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Engine,
    OracleFacets,
    OracleHilbert,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantsReport<T: Count> {
    pub ring_dim: u32,
    pub reg: u32,
    #[serde(serialize_with = "num::serialize_count")]
    pub mult: T,
    pub red_num: u32,
    pub source: Source,
    /// False when the numbers describe the initial complex of a diagram
    /// without the projection property rather than its fiber ring.
    pub certified: bool,
}

/// Dimension, regularity and multiplicity of the complex of a suffix state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateInvariants<T: Count> {
    pub ring_dim: u32,
    pub reg: u32,
    #[serde(serialize_with = "num::serialize_count")]
    pub mult: T,
}

impl<T: Count> StateInvariants<T> {
    fn base() -> Self {
        StateInvariants {
            ring_dim: 0,
            reg: 0,
            mult: T::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SuffixState {
    pub host: Diagram,
    pub flavor: Flavor,
    /// `None` stands for the layers after the first.
    pub start: Option<Point>,
}

/// Opaque memoization key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateKey(SuffixState);

impl SuffixState {
    pub fn new(host: Diagram, flavor: Flavor, start: Option<Point>) -> Result<Self> {
        if let Some(u) = start {
            if u.i != 1 || !host.contains(u) {
                return Err(Error::NotInLayer(u));
            }
        }
        Ok(SuffixState { host, flavor, start })
    }

    /// The whole diagram, shed from the first point of the order.
    pub fn initial(d: &Diagram, flavor: Flavor) -> SuffixState {
        let first = d.order(flavor).points.first().copied();
        SuffixState {
            host: d.clone(),
            flavor,
            start: first,
        }
    }

    /// An induction state starting in the second stage is replaced by the
    /// lexicographic state of the flipped host. Returns whether it flipped.
    pub fn normalized(self) -> (SuffixState, bool) {
        if let (Flavor::Induction, Some(u)) = (self.flavor, self.start) {
            if u.k > self.host.height_from(2) {
                let state = SuffixState {
                    host: self.host.flip(),
                    flavor: Flavor::Lex,
                    start: Some(u.flip()),
                };
                return (state, true);
            }
        }
        (self, false)
    }

    pub fn canonical_key(&self) -> StateKey {
        StateKey(self.clone().normalized().0)
    }

    /// Sorted point set `A_start`.
    pub fn realized(&self) -> Vec<Point> {
        let mut out = self.host.points_from_layer(2);
        if let Some(u) = self.start {
            let order = self.host.order(self.flavor);
            let pos = order.position(u).expect("start lies in the first layer");
            out.extend_from_slice(&order.points[pos..]);
        }
        out.sort();
        out
    }

    /// The state after `start`, normalized.
    pub fn successor(&self) -> (SuffixState, bool) {
        let u = self.start.expect("sentinel has no successor");
        let order = self.host.order(self.flavor);
        let pos = order.position(u).expect("start lies in the first layer");
        SuffixState {
            host: self.host.clone(),
            flavor: self.flavor,
            start: order.points.get(pos + 1).copied(),
        }
        .normalized()
    }

    fn empty() -> SuffixState {
        SuffixState {
            host: Diagram::from_layers(vec![vec![1]]).unwrap(),
            flavor: Flavor::Lex,
            start: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Order used on each fresh diagram. Lex requires the strong projection
    /// property.
    pub strategy: Flavor,
    /// Hosts with at most this many points get the facet-count check in
    /// verification mode.
    pub validate_limit: usize,
    pub verify: bool,
    /// Vertex limit for the facet fallback.
    pub oracle_limit: usize,
    /// `None` keeps every entry.
    pub cache_cap: Option<NonZeroUsize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            strategy: Flavor::Induction,
            validate_limit: 24,
            verify: false,
            oracle_limit: oracle::DEFAULT_FACET_LIMIT,
            cache_cap: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub states: usize,
    pub phantom: usize,
    pub normal: usize,
    pub cache_hits: usize,
    pub fallbacks: usize,
    /// Links realized only by the wider lex ambient.
    pub wide_ambient: usize,
}

#[derive(Default)]
struct Counters {
    states: AtomicUsize,
    phantom: AtomicUsize,
    normal: AtomicUsize,
    cache_hits: AtomicUsize,
    fallbacks: AtomicUsize,
    wide_ambient: AtomicUsize,
}

/// The link of `T_start` in `Δ(A_start)`, written as a suffix state joined
/// with a simplex on `cone`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkState {
    pub state: SuffixState,
    /// The state lives in flipped coordinates.
    pub flipped: bool,
    /// Non-cone vertices of the link, in the coordinates of the parent.
    pub h: Vec<Point>,
    pub cone: Vec<Point>,
    pub validated: bool,
}

/// Link invariants of one point, as printed by the comparison diagnostic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkReport<T: Count> {
    pub point: Point,
    pub class: PointClass,
    pub link: Option<StateInvariants<T>>,
    pub validated: bool,
}

pub struct Engine<T: Count> {
    config: EngineConfig,
    memo: Mutex<LruCache<StateKey, StateInvariants<T>>>,
    counters: Counters,
}

impl<T: Count> Default for Engine<T> {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

struct Ambient {
    reduction: Reduction,
    state: SuffixState,
    flipped: bool,
}

/// Where the link state starts inside its reduced ambient diagram.
#[derive(Clone, Copy)]
enum LinkStart {
    /// Right after the image of the shed point.
    After,
    /// At the image of a given point.
    At(Point),
    /// Past the first layer.
    Sentinel,
}

impl<T: Count> Engine<T> {
    pub fn new(config: EngineConfig) -> Self {
        let cache = match config.cache_cap {
            Some(cap) => LruCache::new(cap),
            None => LruCache::unbounded(),
        };
        Engine {
            config,
            memo: Mutex::new(cache),
            counters: Counters::default(),
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn stats(&self) -> EngineStats {
        let c = &self.counters;
        EngineStats {
            states: c.states.load(Ordering::Relaxed),
            phantom: c.phantom.load(Ordering::Relaxed),
            normal: c.normal.load(Ordering::Relaxed),
            cache_hits: c.cache_hits.load(Ordering::Relaxed),
            fallbacks: c.fallbacks.load(Ordering::Relaxed),
            wide_ambient: c.wide_ambient.load(Ordering::Relaxed),
        }
    }

    pub fn clear_cache(&self) {
        self.memo.lock().clear();
    }

    fn check_supported(&self, d: &Diagram) -> Result<()> {
        if !d.has_projection_property() {
            return Err(Error::UnsupportedDiagram(format!(
                "{d:?} lacks the projection property"
            )));
        }
        if self.config.strategy == Flavor::Lex && !d.has_strong_projection_property() {
            return Err(Error::UnsupportedDiagram(format!(
                "{d:?} lacks the strong projection property needed for the lex order"
            )));
        }
        Ok(())
    }

    pub fn invariants(&self, d: &Diagram) -> Result<InvariantsReport<T>> {
        self.check_supported(d)?;
        let (state, _) = SuffixState::initial(d, self.config.strategy).normalized();
        let v = self.eval(&state)?;
        let (a, b, c) = d.essential_dims();
        if v.ring_dim != a + b + c - 2 {
            return Err(Error::Internal(format!(
                "{d:?}: recursion gave dimension {}, expected {}",
                v.ring_dim,
                a + b + c - 2
            )));
        }
        Ok(InvariantsReport {
            ring_dim: v.ring_dim,
            reg: v.reg,
            mult: v.mult,
            red_num: v.reg,
            source: Source::Engine,
            certified: true,
        })
    }

    pub fn suffix_invariants(&self, state: &SuffixState) -> Result<StateInvariants<T>> {
        self.check_supported(&state.host)?;
        self.eval(&state.clone().normalized().0)
    }

    fn lookup(&self, key: &StateKey) -> Option<StateInvariants<T>> {
        let hit = self.memo.lock().get(key).cloned();
        if hit.is_some() {
            self.counters.cache_hits.fetch_add(1, Ordering::Relaxed);
        }
        hit
    }

    fn store(&self, state: &SuffixState, v: &StateInvariants<T>) {
        self.memo.lock().put(StateKey(state.clone()), v.clone());
    }

    /// Walks the successor chain to a known value, then folds back.
    fn eval(&self, state: &SuffixState) -> Result<StateInvariants<T>> {
        let mut chain = Vec::new();
        let mut cur = state.clone();
        let mut value = loop {
            if let Some(v) = self.lookup(&StateKey(cur.clone())) {
                break v;
            }
            if cur.start.is_none() {
                let rest = cur.host.without_first_layer();
                let v = if rest.is_empty() {
                    StateInvariants::base()
                } else {
                    let (first, _) = SuffixState::initial(&rest, self.config.strategy).normalized();
                    self.eval(&first)?
                };
                self.store(&cur, &v);
                break v;
            }
            let (next, _) = cur.successor();
            chain.push(cur);
            cur = next;
        };
        for s in chain.into_iter().rev() {
            value = self.step(&s, &value)?;
            self.store(&s, &value);
        }
        Ok(value)
    }

    fn step(&self, state: &SuffixState, succ: &StateInvariants<T>) -> Result<StateInvariants<T>> {
        self.counters.states.fetch_add(1, Ordering::Relaxed);
        let u = state.start.unwrap();
        let a = state.realized();
        let plus: Vec<Point> = a.iter().copied().filter(|&p| p != u).collect();
        let graph = leading_pair_graph(&a);
        if graph.edges() == leading_pair_graph(&plus).edges() {
            self.counters.phantom.fetch_add(1, Ordering::Relaxed);
            return Ok(StateInvariants {
                ring_dim: succ.ring_dim + 1,
                reg: succ.reg,
                mult: succ.mult.clone(),
            });
        }
        self.counters.normal.fetch_add(1, Ordering::Relaxed);
        let link = self.build_link(state, &a, &graph)?;
        let link = self.link_invariants_of(state, &graph, &link)?;
        if link.ring_dim + 1 != succ.ring_dim {
            return Err(Error::Internal(format!(
                "link at {u} in {:?} has dimension {}, deletion has {}",
                state.host, link.ring_dim, succ.ring_dim
            )));
        }
        Ok(StateInvariants {
            ring_dim: succ.ring_dim,
            reg: succ.reg.max(link.reg + 1),
            mult: num::add(&succ.mult, &link.mult)?,
        })
    }

    /// Invariants of the full link (cone included), through the link state
    /// when it validates and through facet enumeration otherwise.
    fn link_invariants_of(&self, state: &SuffixState, graph: &PairGraph, link: &LinkState) -> Result<StateInvariants<T>> {
        let u = state.start.unwrap();
        if link.validated {
            let v = self.eval(&link.state)?;
            let full = StateInvariants {
                ring_dim: v.ring_dim + link.cone.len() as u32,
                reg: v.reg,
                mult: v.mult,
            };
            let expected_dim = self.link_dim_hint(graph, u);
            if expected_dim.is_none_or(|d| d == full.ring_dim) {
                return Ok(full);
            }
            warn!("link at {u} in {:?}: dimension disagrees with facets", state.host);
        } else {
            warn!("link state at {u} in {:?} failed validation", state.host);
        }
        self.counters.fallbacks.fetch_add(1, Ordering::Relaxed);
        let w: BTreeSet<Point> = link.h.iter().chain(&link.cone).copied().collect();
        let summary = oracle::facets(&graph.induced(&w), self.config.oracle_limit).map_err(|e| Error::LinkMismatch {
            point: u,
            detail: format!("validation failed and the facet fallback refused: {e}"),
        })?;
        Ok(StateInvariants {
            ring_dim: summary.ring_dim(),
            reg: summary.reg(),
            mult: num::from_u64(summary.top_facets())?,
        })
    }

    /// In verification mode on small hosts, the link dimension read off the
    /// facets of the graph-level link.
    fn link_dim_hint(&self, graph: &PairGraph, u: Point) -> Option<u32> {
        if !self.config.verify || graph.vertices().len() > self.config.validate_limit {
            return None;
        }
        let w = non_neighbors(graph, u);
        oracle::facets(&graph.induced(&w), self.config.oracle_limit)
            .ok()
            .map(|s| s.ring_dim())
    }

    /// The link state of a normal start point.
    pub fn link_state(&self, state: &SuffixState) -> Result<LinkState> {
        let (state, _) = state.clone().normalized();
        let u = state.start.ok_or_else(|| Error::InvalidInput("the sentinel has no link".into()))?;
        let a = state.realized();
        let plus: Vec<Point> = a.iter().copied().filter(|&p| p != u).collect();
        if classify_sets(&a, &plus) == PointClass::Phantom {
            return Err(Error::NotNormal(u));
        }
        let graph = leading_pair_graph(&a);
        self.build_link(&state, &a, &graph)
    }

    fn build_link(&self, state: &SuffixState, a: &[Point], graph: &PairGraph) -> Result<LinkState> {
        let u = state.start.unwrap();
        let host = &state.host;
        let z = host.zones(u)?;
        let w = non_neighbors(graph, u);
        let upper = |n: usize| z.from_layer(n, 2).collect::<Vec<_>>();
        let first = |n: usize| z.in_layer(n, 1).collect::<Vec<_>>();

        let mut h: BTreeSet<Point> = BTreeSet::new();
        h.extend(upper(1));
        h.extend(upper(3));
        h.extend(first(5));
        h.extend(first(6));

        let mut candidates: Vec<Vec<Point>> = Vec::new();
        let mut starts: Vec<LinkStart> = Vec::new();
        let c2 = host.height_from(2);
        match state.flavor {
            Flavor::Induction => {
                h.extend(host.layer_points(1).into_iter().filter(|p| p.j <= u.j && p.k > c2));
                let cut = z.gamma.min(c2);
                let mut amb: BTreeSet<Point> = z.zone(3).iter().copied().collect();
                amb.extend(first(5));
                amb.extend(first(6));
                amb.extend(host.points().into_iter().filter(|p| p.j <= u.j && p.k > cut));
                candidates.push(amb.into_iter().collect());
                starts.push(LinkStart::After);
            }
            Flavor::Lex => {
                let tail: Vec<Point> = first(5).into_iter().chain(first(6)).collect();
                if u.j > host.width_from(2) {
                    let mut amb: BTreeSet<Point> = z
                        .zone(1)
                        .iter()
                        .chain(z.zone(3))
                        .copied()
                        .filter(|p| p.j < u.j)
                        .collect();
                    amb.extend(&tail);
                    candidates.push(amb.into_iter().collect());
                    starts.push(if tail.is_empty() {
                        LinkStart::Sentinel
                    } else {
                        LinkStart::At(Point::new(1, u.j + 1, 1))
                    });
                } else {
                    let mut amb: BTreeSet<Point> = z.zone(3).iter().copied().collect();
                    amb.extend(&tail);
                    candidates.push(amb.into_iter().collect());
                    starts.push(LinkStart::After);
                }
                // Wider ambient that keeps the shed point, so the link is
                // again the suffix right after it.
                let mut amb = h.clone();
                amb.extend(
                    host.layer_points(1)
                        .into_iter()
                        .filter(|p| (p.j < u.j && (p.k <= u.k || p.k > z.gamma)) || (p.j == u.j && p.k <= u.k)),
                );
                candidates.push(amb.into_iter().collect());
                starts.push(LinkStart::After);
            }
        }
        let h_vec: Vec<Point> = h.iter().copied().collect();
        let cone: Vec<Point> = w.difference(&h).copied().collect();

        if h.is_empty() {
            let validated = cone.iter().all(|&p| graph.induced(&w).is_isolated(p));
            return Ok(LinkState {
                state: SuffixState::empty(),
                flipped: false,
                h: h_vec,
                cone,
                validated,
            });
        }

        let mut fallback = None;
        for (n, (amb, start)) in candidates.iter().zip(starts).enumerate() {
            let Some(ambient) = ambient_state(state.flavor, amb, u, start) else {
                continue;
            };
            let mapped: BTreeSet<Point> = h
                .iter()
                .map(|&p| {
                    let q = ambient.reduction.map(p).unwrap();
                    if ambient.flipped {
                        q.flip()
                    } else {
                        q
                    }
                })
                .collect();
            let realized: BTreeSet<Point> = ambient.state.realized().into_iter().collect();
            if realized == mapped {
                if n > 0 {
                    self.counters.wide_ambient.fetch_add(1, Ordering::Relaxed);
                }
                let validated = self.validate(graph, &w, &h, &cone, &ambient, a);
                return Ok(LinkState {
                    state: ambient.state,
                    flipped: ambient.flipped,
                    h: h_vec,
                    cone,
                    validated,
                });
            }
            debug!("ambient candidate for {u} in {:?} does not realize H", state.host);
            fallback.get_or_insert(ambient);
        }
        let (state_out, flipped) = match fallback {
            Some(a) => (a.state, a.flipped),
            None => (SuffixState::empty(), false),
        };
        Ok(LinkState {
            state: state_out,
            flipped,
            h: h_vec,
            cone,
            validated: false,
        })
    }

    /// Graph-level checks that the link of `T_u` is the join of `Δ(H)` with
    /// a simplex on `cone`, plus the facet-count comparison in verification
    /// mode.
    fn validate(&self, graph: &PairGraph, w: &BTreeSet<Point>, h: &BTreeSet<Point>, cone: &[Point], ambient: &Ambient, a: &[Point]) -> bool {
        if !h.is_subset(w) {
            return false;
        }
        let gw = graph.induced(w);
        if !cone.iter().all(|&p| gw.is_isolated(p)) {
            return false;
        }
        let h_vec: Vec<Point> = h.iter().copied().collect();
        let own = leading_pair_graph(&h_vec);
        let restricted = graph.induced(h);
        if own.edges() != restricted.edges() {
            return false;
        }
        if self.config.verify && a.len() <= self.config.validate_limit {
            let limit = self.config.oracle_limit;
            let expected = oracle::facets(&restricted, limit).map(|s| s.facets.len());
            let got = oracle::facets(&leading_pair_graph(&ambient.state.realized()), limit).map(|s| s.facets.len());
            match (expected, got) {
                (Ok(x), Ok(y)) if x != y => return false,
                _ => {}
            }
        }
        true
    }

    /// Link invariants of `u` in `d` under the given order, as used by the
    /// comparison diagnostic.
    pub fn link_report(&self, d: &Diagram, u: Point, flavor: Flavor) -> Result<LinkReport<T>> {
        if !d.has_projection_property() {
            return Err(Error::UnsupportedDiagram(format!(
                "{d:?} lacks the projection property"
            )));
        }
        let (state, _) = SuffixState::new(d.clone(), flavor, Some(u))?.normalized();
        let a = state.realized();
        let su = state.start.unwrap();
        let plus: Vec<Point> = a.iter().copied().filter(|&p| p != su).collect();
        let class = classify_sets(&a, &plus);
        if class == PointClass::Phantom {
            return Ok(LinkReport {
                point: u,
                class,
                link: None,
                validated: true,
            });
        }
        let graph = leading_pair_graph(&a);
        let link = self.build_link(&state, &a, &graph)?;
        let inv = self.link_invariants_of(&state, &graph, &link)?;
        let validated = link.validated;
        Ok(LinkReport {
            point: u,
            class,
            link: Some(inv),
            validated,
        })
    }
}

/// Reduces an ambient point set and builds the state that should realize
/// `H`.
fn ambient_state(flavor: Flavor, amb: &[Point], u: Point, start: LinkStart) -> Option<Ambient> {
    let reduction = essential_reduce(amb).ok()?;
    let host = reduction.diagram.clone();
    let start = match start {
        LinkStart::Sentinel => None,
        LinkStart::At(p) => Some(reduction.map(p)?),
        LinkStart::After => {
            let order = host.order(flavor);
            let pos = order.position(reduction.map(u)?)?;
            order.points.get(pos + 1).copied()
        }
    };
    let (state, flipped) = SuffixState { host, flavor, start }.normalized();
    Some(Ambient {
        reduction,
        state,
        flipped,
    })
}

/// Vertices of `graph` other than `u` and its neighbors.
fn non_neighbors(graph: &PairGraph, u: Point) -> BTreeSet<Point> {
    let nb = graph.neighbors(u);
    graph
        .vertices()
        .iter()
        .copied()
        .filter(|&p| p != u && !nb.contains(&p))
        .collect()
}
