//! Layered DAG model of a fully connected network with skip connections.
//!
//! A network is a list of layer widths plus a set of connected layer pairs
//! `(j, l)` with `j < l`. Every connected pair is a complete bipartite block of
//! edges. Edges carry an optional rational weight that no algorithm reads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node, identified by its layer and its index inside that layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct NodeId {
    pub layer: usize,
    pub index: usize,
}

impl NodeId {
    pub const fn new(layer: usize, index: usize) -> Self {
        Self { layer, index }
    }
}

impl From<(usize, usize)> for NodeId {
    fn from((layer, index): (usize, usize)) -> Self {
        Self { layer, index }
    }
}

impl From<NodeId> for (usize, usize) {
    fn from(n: NodeId) -> Self {
        (n.layer, n.index)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.layer, self.index)
    }
}

/// A directed edge between two nodes of connected layers.
///
/// Edges order canonically by `(tail.layer, head.layer, tail.index, head.index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
}

impl Edge {
    pub const fn new(tail: NodeId, head: NodeId) -> Self {
        Self { tail, head }
    }

    pub fn layer_pair(&self) -> (usize, usize) {
        (self.tail.layer, self.head.layer)
    }

    fn key(&self) -> (usize, usize, usize, usize) {
        (self.tail.layer, self.head.layer, self.tail.index, self.head.index)
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.tail, self.head)
    }
}

impl From<Edge> for String {
    fn from(e: Edge) -> Self {
        e.to_string()
    }
}

impl TryFrom<String> for Edge {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

impl FromStr for Edge {
    type Err = String;

    /// Parses the `j.i->l.k` form used for weight keys.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        fn node(s: &str) -> std::result::Result<NodeId, String> {
            let (layer, index) = s
                .trim()
                .split_once('.')
                .ok_or_else(|| format!("expected layer.index, got {s:?}"))?;
            let layer = layer.parse().map_err(|e| format!("layer {layer:?}: {e}"))?;
            let index = index.parse().map_err(|e| format!("index {index:?}: {e}"))?;
            Ok(NodeId { layer, index })
        }
        let (tail, head) = s
            .split_once("->")
            .ok_or_else(|| "expected tail->head".to_string())?;
        Ok(Edge::new(node(tail)?, node(head)?))
    }
}

/// An input-to-output path, stored as its node sequence.
///
/// Paths order lexicographically by node sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    pub nodes: Vec<NodeId>,
}

impl Path {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        Self { nodes }
    }

    /// Builds a path from `(layer, index)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self { nodes: pairs.iter().map(|&p| NodeId::from(p)).collect() }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    pub fn layers(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.layer).collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// On-disk network description, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNetwork {
    pub widths: Vec<usize>,
    pub connections: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, String>>,
}

impl RawNetwork {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// A validated layered network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    widths: Vec<usize>,
    connections: Vec<(usize, usize)>,
    weights: BTreeMap<Edge, BigRational>,
    /// First canonical edge index of each connected layer pair.
    offsets: BTreeMap<(usize, usize), usize>,
    edge_count: usize,
}

/// Checks a raw description and builds the network.
pub fn validate_network(raw: &RawNetwork) -> Result<NetworkSpec> {
    let pairs: Vec<(usize, usize)> = raw.connections.iter().map(|c| (c[0], c[1])).collect();
    let mut spec = NetworkSpec::new(raw.widths.clone(), &pairs)?;
    if let Some(weights) = &raw.weights {
        for (key, value) in weights {
            let edge: Edge = key
                .parse()
                .map_err(|reason| Error::BadWeight { key: key.clone(), reason })?;
            if !spec.contains_edge(&edge) {
                return Err(Error::BadWeight {
                    key: key.clone(),
                    reason: "no such edge in the network".into(),
                });
            }
            let w: BigRational = value.trim().parse().map_err(|e| Error::BadWeight {
                key: key.clone(),
                reason: format!("{value:?} is not a rational: {e}"),
            })?;
            if spec.weights.insert(edge, w).is_some() {
                return Err(Error::BadWeight { key: key.clone(), reason: "duplicate edge".into() });
            }
        }
    }
    Ok(spec)
}

impl NetworkSpec {
    /// Validates widths and connections. Connection order is irrelevant.
    pub fn new(widths: Vec<usize>, connections: &[(usize, usize)]) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::TooFewLayers(widths.len()));
        }
        if let Some((layer, &width)) = widths.iter().enumerate().find(|(_, &w)| w == 0) {
            return Err(Error::BadWidth { layer, width });
        }
        let last = widths.len() - 1;
        let mut set = BTreeSet::new();
        for &(j, l) in connections {
            if j >= l || l > last {
                return Err(Error::BadPair(j, l));
            }
            if !set.insert((j, l)) {
                return Err(Error::DuplicatePair(j, l));
            }
        }
        if let Some(l) = (0..last).find(|&l| !set.contains(&(l, l + 1))) {
            return Err(Error::MissingConsecutivePair(l));
        }

        let connections: Vec<_> = set.into_iter().collect();
        let mut offsets = BTreeMap::new();
        let mut edge_count = 0;
        for &(j, l) in &connections {
            offsets.insert((j, l), edge_count);
            edge_count += widths[j] * widths[l];
        }
        Ok(Self { widths, connections, weights: BTreeMap::new(), offsets, edge_count })
    }

    /// A network with only consecutive connections.
    pub fn chain(widths: Vec<usize>) -> Result<Self> {
        let pairs: Vec<_> = (0..widths.len().saturating_sub(1)).map(|l| (l, l + 1)).collect();
        Self::new(widths, &pairs)
    }

    /// Number of layers, `L + 1`.
    pub fn layer_count(&self) -> usize {
        self.widths.len()
    }

    /// Index of the output layer, `L`.
    pub fn last_layer(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn width(&self, layer: usize) -> usize {
        self.widths[layer]
    }

    pub fn max_width(&self) -> usize {
        self.widths.iter().copied().max().unwrap_or(0)
    }

    /// Connected layer pairs in ascending order.
    pub fn connections(&self) -> &[(usize, usize)] {
        &self.connections
    }

    pub fn is_connected(&self, j: usize, l: usize) -> bool {
        self.offsets.contains_key(&(j, l))
    }

    /// True when the only connections are the consecutive ones.
    pub fn is_chain(&self) -> bool {
        self.connections.iter().all(|&(j, l)| l == j + 1)
    }

    /// `m`, the number of edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Total width of the hidden layers.
    pub fn hidden_node_count(&self) -> usize {
        self.widths[1..self.last_layer()].iter().sum()
    }

    pub fn weights(&self) -> &BTreeMap<Edge, BigRational> {
        &self.weights
    }

    pub fn weight(&self, edge: &Edge) -> Option<&BigRational> {
        self.weights.get(edge)
    }

    pub fn contains_node(&self, node: &NodeId) -> bool {
        node.layer < self.widths.len() && node.index < self.widths[node.layer]
    }

    pub fn contains_edge(&self, edge: &Edge) -> bool {
        self.edge_index(edge).is_some()
    }

    /// Position of `edge` in the canonical edge ordering.
    pub fn edge_index(&self, edge: &Edge) -> Option<usize> {
        if !self.contains_node(&edge.tail) || !self.contains_node(&edge.head) {
            return None;
        }
        let base = self.offsets.get(&edge.layer_pair())?;
        Some(base + edge.tail.index * self.widths[edge.head.layer] + edge.head.index)
    }

    /// All edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.connections.iter().flat_map(move |&(j, l)| {
            (0..self.widths[j]).flat_map(move |i| {
                (0..self.widths[l]).map(move |k| Edge::new(NodeId::new(j, i), NodeId::new(l, k)))
            })
        })
    }

    /// Checks that `path` runs from the input layer to the output layer over real edges.
    pub fn check_path(&self, path: &Path) -> Result<()> {
        let nodes = &path.nodes;
        let (first, last) = match (nodes.first(), nodes.last()) {
            (Some(f), Some(l)) if nodes.len() >= 2 => (f, l),
            _ => return Err(Error::InvalidPath(format!("path {path} has fewer than 2 nodes"))),
        };
        if first.layer != 0 || last.layer != self.last_layer() {
            return Err(Error::InvalidPath(format!(
                "path {path} must start in layer 0 and end in layer {}",
                self.last_layer()
            )));
        }
        for e in path.edges() {
            if !self.contains_edge(&e) {
                return Err(Error::InvalidPath(format!("edge {e} of path {path} is not in the network")));
            }
        }
        Ok(())
    }

    /// Normalized raw form: sorted connections, canonical weight keys.
    pub fn to_raw(&self) -> RawNetwork {
        RawNetwork {
            widths: self.widths.clone(),
            connections: self.connections.iter().map(|&(j, l)| [j, l]).collect(),
            weights: (!self.weights.is_empty())
                .then(|| self.weights.iter().map(|(e, w)| (e.to_string(), w.to_string())).collect()),
        }
    }
}

/// A layer-level path through the one-node-per-layer skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubstructurePath {
    pub layers: Vec<usize>,
}

/// Layer incidence of a substructure path: `bits[l] = 1` iff layer `l` is visited.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BetaVector {
    pub bits: Vec<u8>,
}

/// Row-major flattening of the `(L+1) x (L+1)` layer adjacency matrix of a substructure path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaVector {
    pub bits: Vec<u8>,
}

impl AlphaVector {
    pub fn get(&self, layers: usize, j: usize, l: usize) -> u8 {
        self.bits[j * layers + l]
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| i64::from(b)).collect()
    }
}

impl SubstructurePath {
    pub fn new(layers: Vec<usize>) -> Self {
        Self { layers }
    }

    /// Consecutive layer pairs traversed.
    pub fn layer_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layers.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn pair_set(&self) -> BTreeSet<(usize, usize)> {
        self.layer_pairs().collect()
    }

    pub fn shares_pair_with(&self, other: &SubstructurePath) -> bool {
        let mine = self.pair_set();
        other.layer_pairs().any(|p| mine.contains(&p))
    }

    pub fn beta(&self, last_layer: usize) -> BetaVector {
        beta_vector(self, last_layer)
    }

    pub fn alpha(&self, last_layer: usize) -> AlphaVector {
        alpha_vector(self, last_layer)
    }
}

impl fmt::Display for SubstructurePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.layers.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn beta_vector(p: &SubstructurePath, last_layer: usize) -> BetaVector {
    let mut bits = vec![0u8; last_layer + 1];
    for &l in &p.layers {
        bits[l] = 1;
    }
    BetaVector { bits }
}

pub fn alpha_vector(p: &SubstructurePath, last_layer: usize) -> AlphaVector {
    let n = last_layer + 1;
    let mut bits = vec![0u8; n * n];
    for (j, l) in p.layer_pairs() {
        bits[j * n + l] = 1;
    }
    AlphaVector { bits }
}

/// All substructure paths in lexicographic order of their layer sequences.
///
/// The skeleton uses node 0 of every layer; with complete bipartite blocks the
/// result depends only on which layer pairs are connected.
pub fn enumerate_substructure_paths(spec: &NetworkSpec, cap: usize) -> Result<Vec<SubstructurePath>> {
    let last = spec.last_layer();
    let mut next: Vec<Vec<usize>> = vec![Vec::new(); last + 1];
    for &(j, l) in spec.connections() {
        next[j].push(l);
    }

    let mut out = Vec::new();
    let mut stack = vec![0usize];
    // (layer, position of the next successor to try)
    let mut frames = vec![(0usize, 0usize)];
    while let Some(frame) = frames.last_mut() {
        let (layer, pos) = *frame;
        if layer == last {
            if out.len() == cap {
                return Err(Error::PathCountGuardExceeded(cap));
            }
            out.push(SubstructurePath::new(stack.clone()));
            frames.pop();
            stack.pop();
            continue;
        }
        match next[layer].get(pos) {
            Some(&succ) => {
                frame.1 += 1;
                frames.push((succ, 0));
                stack.push(succ);
            }
            None => {
                frames.pop();
                stack.pop();
            }
        }
    }
    Ok(out)
}

/// A no-skip network induced by one substructure path, with its layer relabelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub spec: NetworkSpec,
    /// `layer_map[k]` is the original layer of induced layer `k`.
    pub layer_map: Vec<usize>,
}

impl InducedSubgraph {
    /// Maps a path of the induced network back to the original layers.
    pub fn lift(&self, path: &Path) -> Path {
        Path::new(
            path.nodes
                .iter()
                .map(|n| NodeId::new(self.layer_map[n.layer], n.index))
                .collect(),
        )
    }
}

/// Builds the chain network over the layers of `p` with their original widths.
pub fn induce_subgraph(spec: &NetworkSpec, p: &SubstructurePath) -> Result<InducedSubgraph> {
    for (j, l) in p.layer_pairs() {
        if !spec.is_connected(j, l) {
            return Err(Error::InvalidPath(format!("substructure {p} uses unconnected pair ({j}, {l})")));
        }
    }
    let widths = p.layers.iter().map(|&l| spec.width(l)).collect();
    Ok(InducedSubgraph { spec: NetworkSpec::chain(widths)?, layer_map: p.layers.clone() })
}

/// 0/1 indicator of a path over the canonical edge ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeIncidence {
    pub bits: Vec<u8>,
}

impl EdgeIncidence {
    pub fn to_i64(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| i64::from(b)).collect()
    }
}

pub fn edge_incidence(path: &Path, spec: &NetworkSpec) -> Result<EdgeIncidence> {
    spec.check_path(path)?;
    let mut bits = vec![0u8; spec.edge_count()];
    for e in path.edges() {
        // check_path guarantees every edge has an index
        bits[spec.edge_index(&e).expect("validated edge")] = 1;
    }
    Ok(EdgeIncidence { bits })
}
