//! Network graph of CVQKD nodes and links, capacity snapshots over a time
//! window, and routing of secret keys along maximum-bottleneck paths.

use crate::passes::{check_relay_feasibility, RelayVerdict};
use crate::{Error, Result};
use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// Largest graph accepted by [`brute_force_widest_path`].
pub const BRUTE_FORCE_NODE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NodeKind {
    Ogs,
    Satellite,
    Submarine,
    /// High-altitude platform. Representable, but no link family covers it.
    Hap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TrajectorySample {
    pub time_s: f64,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_km: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum Position {
    Fixed { lat_deg: f64, lon_deg: f64, alt_km: f64 },
    Moving { samples: Vec<TrajectorySample> },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub position: Position,
    #[cfg_attr(feature = "serde", serde(default = "trusted_default"))]
    pub trusted: bool,
}

#[cfg(feature = "serde")]
fn trusted_default() -> bool {
    true
}

impl Node {
    pub fn fixed(id: impl Into<String>, kind: NodeKind, lat_deg: f64, lon_deg: f64, alt_km: f64) -> Self {
        Self {
            id: id.into(),
            kind,
            position: Position::Fixed {
                lat_deg,
                lon_deg,
                alt_km,
            },
            trusted: true,
        }
    }

    pub fn moving(id: impl Into<String>, kind: NodeKind, samples: Vec<TrajectorySample>) -> Self {
        Self {
            id: id.into(),
            kind,
            position: Position::Moving { samples },
            trusted: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LinkFamily {
    Fibre,
    SatelliteGround,
    SubmarineGround,
    SatelliteSubmarine,
    InterSatellite,
    InterSubmarine,
}

impl LinkFamily {
    pub const ALL: [LinkFamily; 6] = [
        LinkFamily::Fibre,
        LinkFamily::SatelliteGround,
        LinkFamily::SubmarineGround,
        LinkFamily::SatelliteSubmarine,
        LinkFamily::InterSatellite,
        LinkFamily::InterSubmarine,
    ];

    /// The node kinds this family connects, in a fixed order.
    pub fn endpoints(self) -> (NodeKind, NodeKind) {
        match self {
            LinkFamily::Fibre => (NodeKind::Ogs, NodeKind::Ogs),
            LinkFamily::SatelliteGround => (NodeKind::Ogs, NodeKind::Satellite),
            LinkFamily::SubmarineGround => (NodeKind::Ogs, NodeKind::Submarine),
            LinkFamily::SatelliteSubmarine => (NodeKind::Satellite, NodeKind::Submarine),
            LinkFamily::InterSatellite => (NodeKind::Satellite, NodeKind::Satellite),
            LinkFamily::InterSubmarine => (NodeKind::Submarine, NodeKind::Submarine),
        }
    }

    fn from_kinds(a: NodeKind, b: NodeKind) -> Option<Self> {
        let pair = if a <= b { (a, b) } else { (b, a) };
        Self::ALL.into_iter().find(|f| f.endpoints() == pair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GeometryClass {
    StationaryStationary,
    StationaryMoving,
    MovingMoving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dynamics {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Uniformity {
    Uniform,
    NonUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Classification {
    pub family: LinkFamily,
    pub geometry: GeometryClass,
    pub dynamics: Dynamics,
    pub uniformity: Uniformity,
    /// Non-uniform links see different media in each direction
    /// (uplink vs downlink) and so carry per-direction capacities.
    pub direction_dependent: bool,
}

/// Classifies a link between two node kinds.
///
/// `family` may be omitted and is then inferred from the kinds. Inter-satellite
/// links are dynamic unless `fixed_formation` says the satellites hold their
/// relative positions.
pub fn classify_link(
    a: NodeKind,
    b: NodeKind,
    family: Option<LinkFamily>,
    fixed_formation: bool,
) -> Result<Classification> {
    let inferred = LinkFamily::from_kinds(a, b)
        .ok_or_else(|| Error::Classification(format!("no link family connects {a:?} and {b:?}")))?;
    let family = match family {
        Some(f) if f != inferred => {
            return Err(Error::Classification(format!(
                "{f:?} links connect {:?} and {:?}, not {a:?} and {b:?}",
                f.endpoints().0,
                f.endpoints().1
            )))
        }
        _ => inferred,
    };
    use Dynamics::*;
    use GeometryClass::*;
    use Uniformity::*;
    let (geometry, dynamics, uniformity) = match family {
        LinkFamily::Fibre => (StationaryStationary, Static, Uniform),
        LinkFamily::SatelliteGround => (StationaryMoving, Dynamic, NonUniform),
        LinkFamily::SubmarineGround => (StationaryMoving, Dynamic, Uniform),
        LinkFamily::SatelliteSubmarine => (MovingMoving, Dynamic, NonUniform),
        LinkFamily::InterSatellite => (MovingMoving, if fixed_formation { Static } else { Dynamic }, Uniform),
        LinkFamily::InterSubmarine => (MovingMoving, Dynamic, Uniform),
    };
    Ok(Classification {
        family,
        geometry,
        dynamics,
        uniformity,
        direction_dependent: uniformity == NonUniform,
    })
}

/// Key capacity deliverable over one contiguous interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CapacityWindow {
    pub start_s: f64,
    pub end_s: f64,
    pub bits: f64,
}

/// Capacity of a link over a query window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum CapacityFn {
    /// Steady key rate; capacity grows with the window length.
    Rate { bits_per_s: f64 },
    /// Same capacity whatever the window.
    Constant { bits: f64 },
    /// Capacity concentrated in windows such as satellite passes. A window
    /// that only partly overlaps the query contributes pro rata. Outside
    /// `[coverage_start_s, coverage_end_s]` nothing is known.
    Windows {
        coverage_start_s: f64,
        coverage_end_s: f64,
        windows: Vec<CapacityWindow>,
    },
}

impl CapacityFn {
    fn validate(&self) -> core::result::Result<(), String> {
        let bad = |v: f64| !(v >= 0.0) || !v.is_finite();
        match self {
            CapacityFn::Rate { bits_per_s } if bad(*bits_per_s) => Err(format!("rate {bits_per_s} must be >= 0")),
            CapacityFn::Constant { bits } if bad(*bits) => Err(format!("capacity {bits} must be >= 0")),
            CapacityFn::Windows {
                coverage_start_s,
                coverage_end_s,
                windows,
            } => {
                if !(coverage_end_s >= coverage_start_s) {
                    return Err("coverage end precedes its start".to_string());
                }
                for w in windows {
                    if !(w.end_s > w.start_s) || bad(w.bits) {
                        return Err(format!(
                            "window [{}, {}] with {} bits is invalid",
                            w.start_s, w.end_s, w.bits
                        ));
                    }
                    if w.start_s < *coverage_start_s || w.end_s > *coverage_end_s {
                        return Err(format!("window [{}, {}] lies outside the coverage", w.start_s, w.end_s));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Capacity over `[start, end]`, or `None` if the window is not covered.
    pub fn capacity(&self, start_s: f64, end_s: f64) -> Option<f64> {
        match self {
            CapacityFn::Rate { bits_per_s } => Some(bits_per_s * (end_s - start_s)),
            CapacityFn::Constant { bits } => Some(*bits),
            CapacityFn::Windows {
                coverage_start_s,
                coverage_end_s,
                windows,
            } => {
                if start_s < *coverage_start_s || end_s > *coverage_end_s {
                    return None;
                }
                Some(
                    windows
                        .iter()
                        .map(|w| {
                            let overlap = end_s.min(w.end_s) - start_s.max(w.start_s);
                            if overlap <= 0.0 {
                                0.0
                            } else if overlap >= w.end_s - w.start_s {
                                w.bits
                            } else {
                                w.bits * overlap / (w.end_s - w.start_s)
                            }
                        })
                        .sum(),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Link {
    pub id: String,
    pub a: String,
    pub b: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub family: Option<LinkFamily>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub fixed_formation: bool,
    /// Capacity from `a` to `b`, and from `b` to `a` unless `reverse` is set.
    pub capacity: CapacityFn,
    /// Capacity from `b` to `a` for direction-dependent links.
    #[cfg_attr(feature = "serde", serde(default))]
    pub reverse: Option<CapacityFn>,
}

impl Link {
    pub fn new(id: impl Into<String>, a: impl Into<String>, b: impl Into<String>, capacity: CapacityFn) -> Self {
        Self {
            id: id.into(),
            a: a.into(),
            b: b.into(),
            family: None,
            fixed_formation: false,
            capacity,
            reverse: None,
        }
    }

    pub fn with_reverse(mut self, reverse: CapacityFn) -> Self {
        self.reverse = Some(reverse);
        self
    }
}

/// Validated set of nodes and classified links.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<Node>,
    links: Vec<Link>,
    classes: Vec<Classification>,
}

impl Network {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let mut ids = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.id.is_empty() {
                return Err(Error::Graph("node ids must not be empty".to_string()));
            }
            if ids.insert(n.id.as_str(), i).is_some() {
                return Err(Error::Graph(format!("duplicate node id `{}`", n.id)));
            }
            if let Position::Moving { samples } = &n.position {
                if samples.is_empty() {
                    return Err(Error::Graph(format!(
                        "moving node `{}` has no trajectory samples",
                        n.id
                    )));
                }
            }
        }
        let mut link_ids = BTreeMap::new();
        let mut classes = Vec::with_capacity(links.len());
        for l in &links {
            if link_ids.insert(l.id.as_str(), ()).is_some() {
                return Err(Error::Graph(format!("duplicate link id `{}`", l.id)));
            }
            let kind = |id: &str| {
                ids.get(id)
                    .map(|&i| nodes[i].kind)
                    .ok_or_else(|| Error::Graph(format!("link `{}` refers to unknown node `{id}`", l.id)))
            };
            if l.a == l.b {
                return Err(Error::Graph(format!("link `{}` is a self-loop", l.id)));
            }
            let class = classify_link(kind(&l.a)?, kind(&l.b)?, l.family, l.fixed_formation)?;
            for f in core::iter::once(&l.capacity).chain(l.reverse.iter()) {
                f.validate()
                    .map_err(|m| Error::Graph(format!("link `{}`: {m}", l.id)))?;
            }
            if l.reverse.is_some() && !class.direction_dependent {
                return Err(Error::Graph(format!(
                    "link `{}` is uniform and cannot have a separate reverse capacity",
                    l.id
                )));
            }
            classes.push(class);
        }
        Ok(Self { nodes, links, classes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn classification(&self, link_index: usize) -> Classification {
        self.classes[link_index]
    }
}

/// Directed, capacity-weighted graph at one point in time.
///
/// Parallel edges keep the larger weight. Node ids are kept sorted so that
/// indices order the same way as ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    ids: Vec<String>,
    trusted: Vec<bool>,
    adj: Vec<BTreeMap<usize, f64>>,
}

impl WeightedGraph {
    /// Builds a graph from `(id, trusted)` pairs.
    pub fn new<I, S>(nodes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        let mut pairs: Vec<(String, bool)> = nodes.into_iter().map(|(s, t)| (s.into(), t)).collect();
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Graph(format!("duplicate node id `{}`", w[0].0)));
        }
        let n = pairs.len();
        let (ids, trusted) = pairs.into_iter().unzip();
        Ok(Self {
            ids,
            trusted,
            adj: vec![BTreeMap::new(); n],
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::Graph(format!("unknown node `{id}`")))
    }

    pub fn is_trusted(&self, id: &str) -> Option<bool> {
        self.index_of(id).map(|i| self.trusted[i])
    }

    /// Adds a directed edge, keeping the larger weight if one exists.
    pub fn add_edge(&mut self, from: &str, to: &str, weight: f64) -> Result<()> {
        let (i, j) = (self.require(from)?, self.require(to)?);
        if i == j {
            return Err(Error::Graph(format!("self-loop at `{from}`")));
        }
        if weight.is_nan() {
            return Err(Error::Graph(format!("edge {from} -> {to} has NaN weight")));
        }
        let slot = self.adj[i].entry(j).or_insert(weight);
        if weight > *slot {
            *slot = weight;
        }
        Ok(())
    }

    pub fn add_undirected(&mut self, a: &str, b: &str, weight: f64) -> Result<()> {
        self.add_edge(a, b, weight)?;
        self.add_edge(b, a, weight)
    }

    pub fn weight(&self, from: &str, to: &str) -> Option<f64> {
        let (i, j) = (self.index_of(from)?, self.index_of(to)?);
        self.adj[i].get(&j).copied()
    }

    /// Directed edges as `(from, to, weight)` in id order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(i, m)| {
            m.iter()
                .map(move |(&j, &w)| (self.ids[i].as_str(), self.ids[j].as_str(), w))
        })
    }

    /// Edges that can carry key: positive weight.
    fn usable(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[i].iter().filter(|(_, &w)| w > 0.0).map(|(&j, &w)| (j, w))
    }
}

/// Evaluates every link's capacity over `[start_s, end_s]`.
///
/// Fails with [`Error::UncoveredLinks`] listing every link whose capacity
/// data does not cover the window.
pub fn snapshot_capacities(network: &Network, start_s: f64, end_s: f64) -> Result<WeightedGraph> {
    if !(end_s >= start_s) {
        return Err(Error::domain("window end", end_s, "must not precede the window start"));
    }
    let mut g = WeightedGraph::new(network.nodes.iter().map(|n| (n.id.clone(), n.trusted)))?;
    let mut uncovered = Vec::new();
    for l in &network.links {
        let forward = l.capacity.capacity(start_s, end_s);
        let backward = match &l.reverse {
            Some(f) => f.capacity(start_s, end_s),
            None => forward,
        };
        match (forward, backward) {
            (Some(f), Some(b)) => {
                g.add_edge(&l.a, &l.b, f)?;
                g.add_edge(&l.b, &l.a, b)?;
            }
            _ => uncovered.push(l.id.clone()),
        }
    }
    if !uncovered.is_empty() {
        return Err(Error::UncoveredLinks(uncovered));
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Objective {
    /// Maximise the smallest hop capacity.
    #[default]
    WidestPath,
    /// Minimise the number of hops over usable links.
    FewestHops,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Route {
    /// Node ids from source to destination; a single id for an empty route.
    pub nodes: Vec<String>,
    pub hop_capacities: Vec<f64>,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.hop_capacities.len()
    }

    /// Smallest hop capacity, `None` for an empty route.
    pub fn bottleneck(&self) -> Option<f64> {
        self.hop_capacities.iter().copied().reduce(f64::min)
    }

    fn from_indices(g: &WeightedGraph, path: &[usize]) -> Self {
        Self {
            nodes: path.iter().map(|&i| g.ids[i].clone()).collect(),
            hop_capacities: path.windows(2).map(|w| g.adj[w[0]][&w[1]]).collect(),
        }
    }
}

/// Whether node `v` may appear on a path from `src` to `dst`.
fn may_visit(g: &WeightedGraph, v: usize, src: usize, dst: usize, allow_untrusted: bool) -> bool {
    allow_untrusted || v == src || v == dst || g.trusted[v]
}

/// Best bottleneck from `src` to every node (max-min Dijkstra).
fn widest_bottleneck(g: &WeightedGraph, src: usize, dst: usize, allow_untrusted: bool) -> Option<f64> {
    let n = g.len();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut done = vec![false; n];
    best[src] = f64::INFINITY;
    loop {
        let mut pick = None;
        for v in 0..n {
            if !done[v] && best[v] > f64::NEG_INFINITY && pick.is_none_or(|p: usize| best[v] > best[p]) {
                pick = Some(v);
            }
        }
        let v = pick?;
        if v == dst {
            return Some(best[v]);
        }
        done[v] = true;
        if v != src && !may_visit(g, v, src, dst, allow_untrusted) {
            continue;
        }
        for (u, w) in g.usable(v) {
            if done[u] || !may_visit(g, u, src, dst, allow_untrusted) {
                continue;
            }
            let through = best[v].min(w);
            if through > best[u] {
                best[u] = through;
            }
        }
    }
}

/// Among paths using only edges with weight ≥ `floor`, the one with fewest
/// hops and then the lexicographically smallest id sequence.
fn fewest_hops_above(
    g: &WeightedGraph,
    src: usize,
    dst: usize,
    floor: f64,
    allow_untrusted: bool,
) -> Option<Vec<usize>> {
    let n = g.len();
    // Hop distance to dst over reversed qualifying edges.
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        for (u, w) in g.usable(v) {
            if w >= floor {
                rev[u].push(v);
            }
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[dst] = 0;
    let mut queue = VecDeque::from([dst]);
    while let Some(u) = queue.pop_front() {
        if u != dst && u != src && !may_visit(g, u, src, dst, allow_untrusted) {
            continue;
        }
        for &v in &rev[u] {
            if dist[v] == usize::MAX && may_visit(g, v, src, dst, allow_untrusted) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[src] == usize::MAX {
        return None;
    }
    let mut path = vec![src];
    let mut v = src;
    while v != dst {
        // Indices are in id order, so the first candidate is the smallest id.
        v = g
            .usable(v)
            .find(|&(u, w)| w >= floor && dist[u] == dist[v] - 1)
            .map(|(u, _)| u)?;
        path.push(v);
    }
    Some(path)
}

fn best_path(
    g: &WeightedGraph,
    src: usize,
    dst: usize,
    objective: Objective,
    allow_untrusted: bool,
) -> Option<Vec<usize>> {
    if src == dst {
        return Some(vec![src]);
    }
    let floor = match objective {
        Objective::WidestPath => widest_bottleneck(g, src, dst, allow_untrusted)?,
        Objective::FewestHops => f64::MIN_POSITIVE,
    };
    fewest_hops_above(g, src, dst, floor, allow_untrusted)
}

/// Routes from `src` to `dst`. Ties go to fewer hops, then to the
/// lexicographically smallest sequence of node ids. Only positive-weight
/// edges are used, and untrusted nodes may only be endpoints.
///
/// Returns `Ok(None)` when no path exists at all, and
/// [`Error::UntrustedRelay`] when every path relays through an untrusted node.
pub fn route(g: &WeightedGraph, src: &str, dst: &str, objective: Objective) -> Result<Option<Route>> {
    let (s, d) = (g.require(src)?, g.require(dst)?);
    if let Some(path) = best_path(g, s, d, objective, false) {
        return Ok(Some(Route::from_indices(g, &path)));
    }
    match best_path(g, s, d, objective, true) {
        Some(path) => {
            let node = path[1..path.len() - 1]
                .iter()
                .find(|&&v| !g.trusted[v])
                .map(|&v| g.ids[v].clone())
                .unwrap_or_default();
            Err(Error::UntrustedRelay {
                from: src.to_string(),
                to: dst.to_string(),
                node,
            })
        }
        None => Ok(None),
    }
}

/// Maximum-bottleneck route; see [`route`].
pub fn widest_path(g: &WeightedGraph, src: &str, dst: &str) -> Result<Option<Route>> {
    route(g, src, dst, Objective::WidestPath)
}

/// Widest path by enumerating every simple path. Same rules and tie-breaks
/// as [`widest_path`]; refuses graphs above [`BRUTE_FORCE_NODE_LIMIT`] nodes.
pub fn brute_force_widest_path(g: &WeightedGraph, src: &str, dst: &str) -> Result<Option<Route>> {
    if g.len() > BRUTE_FORCE_NODE_LIMIT {
        return Err(Error::TooLarge {
            nodes: g.len(),
            limit: BRUTE_FORCE_NODE_LIMIT,
        });
    }
    let (s, d) = (g.require(src)?, g.require(dst)?);
    if s == d {
        return Ok(Some(Route::from_indices(g, &[s])));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut untrusted_best: Option<Vec<usize>> = None;
    let mut path = vec![s];
    let mut on_path = vec![false; g.len()];
    on_path[s] = true;
    enumerate(g, d, &mut path, &mut on_path, &mut |p| {
        let bottleneck = p.windows(2).map(|w| g.adj[w[0]][&w[1]]).fold(f64::INFINITY, f64::min);
        if p[1..p.len() - 1].iter().any(|&v| !g.trusted[v]) {
            if untrusted_best.is_none() {
                untrusted_best = Some(p.to_vec());
            }
            return;
        }
        let better = match &best {
            None => true,
            Some((b, q)) => {
                bottleneck > *b
                    || (bottleneck == *b && (p.len() < q.len() || (p.len() == q.len() && id_seq_less(g, p, q))))
            }
        };
        if better {
            best = Some((bottleneck, p.to_vec()));
        }
    });
    match (best, untrusted_best) {
        (Some((_, p)), _) => Ok(Some(Route::from_indices(g, &p))),
        (None, Some(p)) => Err(Error::UntrustedRelay {
            from: src.to_string(),
            to: dst.to_string(),
            node: p[1..p.len() - 1]
                .iter()
                .find(|&&v| !g.trusted[v])
                .map(|&v| g.ids[v].clone())
                .unwrap_or_default(),
        }),
        (None, None) => Ok(None),
    }
}

fn id_seq_less(g: &WeightedGraph, p: &[usize], q: &[usize]) -> bool {
    p.iter()
        .map(|&i| g.ids[i].as_str())
        .lt(q.iter().map(|&i| g.ids[i].as_str()))
}

fn enumerate<F: FnMut(&[usize])>(
    g: &WeightedGraph,
    dst: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    visit: &mut F,
) {
    let v = *path.last().expect("path starts at the source");
    for (u, _) in g.usable(v) {
        if on_path[u] {
            continue;
        }
        path.push(u);
        if u == dst {
            visit(path);
        } else {
            on_path[u] = true;
            enumerate(g, dst, path, on_path, visit);
            on_path[u] = false;
        }
        path.pop();
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PlannedRoute {
    pub route: Route,
    /// Index into `route.nodes` where each target is reached.
    pub target_positions: Vec<usize>,
    pub verdict: RelayVerdict,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum MultiRouteOutcome {
    Routed(PlannedRoute),
    /// No path between these consecutive targets.
    Unreachable {
        from: String,
        to: String,
    },
}

/// Chains best routes between consecutive targets and checks the relay
/// conditions on the concatenated hop capacities. An empty route is feasible.
pub fn multi_target_route(
    g: &WeightedGraph,
    targets: &[&str],
    key_size_bits: f64,
    objective: Objective,
) -> Result<MultiRouteOutcome> {
    if targets.len() < 2 {
        return Err(Error::Graph(format!(
            "routing needs at least two targets, got {}",
            targets.len()
        )));
    }
    if !(key_size_bits > 0.0) {
        return Err(Error::domain("key_size", key_size_bits, "must be positive"));
    }
    let mut nodes = vec![targets[0].to_string()];
    let mut hop_capacities = Vec::new();
    let mut target_positions = vec![0];
    for pair in targets.windows(2) {
        match route(g, pair[0], pair[1], objective)? {
            Some(r) => {
                nodes.extend(r.nodes.into_iter().skip(1));
                hop_capacities.extend(r.hop_capacities);
                target_positions.push(nodes.len() - 1);
            }
            None => {
                return Ok(MultiRouteOutcome::Unreachable {
                    from: pair[0].to_string(),
                    to: pair[1].to_string(),
                })
            }
        }
    }
    let verdict = if hop_capacities.is_empty() {
        RelayVerdict {
            no_bottleneck: true,
            exceeds_key: true,
            feasible: true,
            first_bottleneck_hop: None,
            first_short_hop: None,
        }
    } else {
        check_relay_feasibility(&hop_capacities, key_size_bits)?
    };
    Ok(MultiRouteOutcome::Routed(PlannedRoute {
        route: Route { nodes, hop_capacities },
        target_positions,
        verdict,
    }))
}
