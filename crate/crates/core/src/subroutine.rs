//! Basis paths of a network without skip connections.
//!
//! Each stage `k -> k+1` is split into direct edges (every tail node owns
//! exactly one) and cross edges (the rest). A direct edge extends every path
//! arriving at its tail; a cross edge extends only the lexicographically
//! smallest arriving path. The final stage's paths form the basis, of size
//! `m - H` where `H` is the number of hidden nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Edge, NetworkSpec, NodeId, Path};

/// Direct and cross edges of one complete bipartite stage, as `(tail, head)` index pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEdges {
    pub direct: Vec<(usize, usize)>,
    pub cross: Vec<(usize, usize)>,
}

impl StageEdges {
    /// Head of the direct edge leaving `tail`.
    pub fn direct_head(&self, tail: usize) -> usize {
        self.direct[tail].1
    }
}

/// Pairs tail `i` with head `i` while both exist; leftover tails attach to head 0.
pub fn match_direct_edges(tails: usize, heads: usize) -> StageEdges {
    let direct: Vec<(usize, usize)> = (0..tails).map(|i| (i, if i < heads { i } else { 0 })).collect();
    let cross = (0..tails)
        .flat_map(|i| (0..heads).map(move |j| (i, j)))
        .filter(|&(i, j)| direct[i].1 != j)
        .collect();
    StageEdges { direct, cross }
}

/// Snapshot of one stage, for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerStagePaths {
    pub stage: usize,
    pub direct_edges: Vec<Edge>,
    pub cross_edges: Vec<Edge>,
    /// Paths ending at each node of layer `stage + 1`, in lexicographic order.
    pub per_node_paths: Vec<(NodeId, Vec<Path>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisPathSet {
    pub paths: Vec<Path>,
    /// Index of the substructure path this set was built for, when known.
    pub substructure: Option<usize>,
    /// Paths whose last edge is a direct edge.
    pub direct_count: usize,
    /// Paths whose last edge is a cross edge.
    pub cross_count: usize,
}

impl BasisPathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

const ROOT: usize = usize::MAX;

/// Paths as a prefix tree: each entry is `(parent entry, node index)`.
struct Arena {
    parent: Vec<usize>,
    node: Vec<usize>,
}

impl Arena {
    fn push(&mut self, parent: usize, node: usize) -> usize {
        self.parent.push(parent);
        self.node.push(node);
        self.parent.len() - 1
    }

    fn materialize(&self, mut id: usize, len: usize) -> Path {
        let mut nodes = vec![NodeId::new(0, 0); len];
        for layer in (0..len).rev() {
            nodes[layer] = NodeId::new(layer, self.node[id]);
            id = self.parent[id];
        }
        Path::new(nodes)
    }
}

/// Runs the stage recurrence; `observe` sees each stage's lexicographically
/// sorted paths bucketed by head node.
fn run_stages(
    spec: &NetworkSpec,
    mut observe: impl FnMut(usize, &StageEdges, &Arena, &[Vec<usize>]),
) -> Result<(Arena, Vec<usize>, Vec<bool>)> {
    if let Some(&(j, l)) = spec.connections().iter().find(|&&(j, l)| l != j + 1) {
        return Err(Error::NotChain(j, l));
    }
    let widths = spec.widths();
    let mut arena = Arena { parent: Vec::new(), node: Vec::new() };
    let roots: Vec<usize> = (0..widths[0]).map(|i| arena.push(ROOT, i)).collect();

    // paths of the current stage in lexicographic order, and whether each ends in a direct edge
    let mut current: Vec<usize> = Vec::new();
    let mut is_direct: Vec<bool> = Vec::new();

    for k in 0..spec.last_layer() {
        let stage = match_direct_edges(widths[k], widths[k + 1]);
        let mut cross_heads: Vec<Vec<usize>> = vec![Vec::new(); widths[k]];
        for &(i, j) in &stage.cross {
            cross_heads[i].push(j);
        }

        let mut next = Vec::new();
        let mut next_direct = Vec::new();
        // For tail i, `incoming` is every path ending at i, in order; the first is the
        // representative that cross edges extend. Emitting in prefix order and then
        // head order keeps `next` sorted.
        let mut extend = |prefix: usize, tail: usize, representative: bool, arena: &mut Arena| {
            let direct = stage.direct_head(tail);
            let extra: &[usize] = if representative { &cross_heads[tail] } else { &[] };
            let mut heads: Vec<(usize, bool)> = extra.iter().map(|&j| (j, false)).collect();
            heads.push((direct, true));
            heads.sort_unstable();
            for (j, d) in heads {
                next.push(arena.push(prefix, j));
                next_direct.push(d);
            }
        };
        if k == 0 {
            for (i, &root) in roots.iter().enumerate() {
                extend(root, i, true, &mut arena);
            }
        } else {
            let mut seen = vec![false; widths[k]];
            for &p in &current {
                let tail = arena.node[p];
                let first = !seen[tail];
                seen[tail] = true;
                extend(p, tail, first, &mut arena);
            }
        }

        let mut by_node: Vec<Vec<usize>> = vec![Vec::new(); widths[k + 1]];
        for &p in &next {
            by_node[arena.node[p]].push(p);
        }
        observe(k, &stage, &arena, &by_node);
        current = next;
        is_direct = next_direct;
    }
    Ok((arena, current, is_direct))
}

/// Basis path set of a network with only consecutive connections.
pub fn subroutine_basis(spec: &NetworkSpec) -> Result<BasisPathSet> {
    let (arena, current, is_direct) = run_stages(spec, |_, _, _, _| {})?;
    let len = spec.layer_count();
    let paths = current.iter().map(|&p| arena.materialize(p, len)).collect();
    let direct_count = is_direct.iter().filter(|&&d| d).count();
    Ok(BasisPathSet {
        paths,
        substructure: None,
        direct_count,
        cross_count: is_direct.len() - direct_count,
    })
}

/// Per-stage edges and arriving paths, mainly for tests and traces.
pub fn subroutine_stages(spec: &NetworkSpec) -> Result<Vec<LayerStagePaths>> {
    let mut out = Vec::new();
    run_stages(spec, |k, stage, arena, by_node| {
        let edge = |&(i, j): &(usize, usize)| Edge::new(NodeId::new(k, i), NodeId::new(k + 1, j));
        out.push(LayerStagePaths {
            stage: k,
            direct_edges: stage.direct.iter().map(edge).collect(),
            cross_edges: stage.cross.iter().map(edge).collect(),
            per_node_paths: by_node
                .iter()
                .enumerate()
                .map(|(j, ids)| {
                    (NodeId::new(k + 1, j), ids.iter().map(|&p| arena.materialize(p, k + 2)).collect())
                })
                .collect(),
        });
    })?;
    Ok(out)
}
