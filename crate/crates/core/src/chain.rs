//! Subdivision chains and removal of cross-substructure path dependencies.
//!
//! Two substructures that share layer pairs can produce basis paths whose
//! shared segments swap and whose unshared segments cancel. Walking each chain
//! of nested subdivision sets, every child basis is filtered against its
//! parent's original basis; chain heads are then filtered against the deepest
//! sharing member of every earlier chain.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::network::{Edge, Path, SubstructurePath};
use crate::select::SubdivisionSet;

/// Nested subdivision sets `U_{t_1} ⊃ U_{t_2} ⊃ ...`; the underlying path closes every chain implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionChain {
    pub indices: Vec<usize>,
}

impl SubdivisionChain {
    pub fn head(&self) -> usize {
        self.indices[0]
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChainSet {
    pub chains: Vec<SubdivisionChain>,
    /// Substructure index to the chains that contain it.
    pub membership: BTreeMap<usize, Vec<usize>>,
}

/// Builds chains over `ordered` (selected, non-underlying, in candidate order).
///
/// An unclaimed set opens a chain, which is then stretched by scanning the
/// later sets in order and appending each one that subdivides the current
/// tail. A subdividing path's set is always strictly contained in its
/// parent's, so consecutive sets nest strictly.
pub fn build_chains(ordered: &[usize], u_sets: &[SubdivisionSet]) -> ChainSet {
    let mut claimed = BTreeSet::new();
    let mut out = ChainSet::default();
    for (pos, &r) in ordered.iter().enumerate() {
        if claimed.contains(&r) {
            continue;
        }
        let mut indices = vec![r];
        let mut tail = r;
        for &next in &ordered[pos + 1..] {
            if u_sets[tail].contains(next) {
                indices.push(next);
                tail = next;
            }
        }
        let id = out.chains.len();
        for &i in &indices {
            claimed.insert(i);
            out.membership.entry(i).or_default().push(id);
        }
        out.chains.push(SubdivisionChain { indices });
    }
    out
}

/// Cross-chain targets of one chain.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrossChainTargets {
    /// For every earlier chain, its deepest member sharing a layer pair with this head.
    pub q: Vec<usize>,
    /// Earlier chains whose heads share a layer pair with this head. Reported only.
    pub sh: Vec<usize>,
}

pub fn compute_qt(chains: &[SubdivisionChain], paths: &[SubstructurePath]) -> Vec<CrossChainTargets> {
    chains
        .iter()
        .enumerate()
        .map(|(t, chain)| {
            let head = &paths[chain.head()];
            let own: BTreeSet<usize> = chain.indices.iter().copied().collect();
            let mut q = Vec::new();
            // one direction only: each pair of chains is compared once, from the later one
            for c in &chains[..t] {
                if let Some(&deepest) = c.indices.iter().rev().find(|&&i| head.shares_pair_with(&paths[i])) {
                    if !own.contains(&deepest) && !q.contains(&deepest) {
                        q.push(deepest);
                    }
                }
            }
            let sh = (0..t)
                .filter(|&r| head.shares_pair_with(&paths[chains[r].head()]))
                .collect();
            CrossChainTargets { q, sh }
        })
        .collect()
}

/// A basis path split into edges over shared layer pairs and the rest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub shared_pattern: Vec<Edge>,
    pub unshared_pattern: Vec<Edge>,
}

pub fn decompose(path: &Path, shared_pairs: &BTreeSet<(usize, usize)>) -> PathDecomposition {
    let (shared_pattern, unshared_pattern) = path.edges().partition(|e| shared_pairs.contains(&e.layer_pair()));
    PathDecomposition { shared_pattern, unshared_pattern }
}

/// Bookkeeping for one distinct unshared pattern of the parent basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRecord {
    /// Unshared pattern of some parent paths.
    pub ep: Vec<Edge>,
    /// Most frequent shared pattern among those parent paths.
    pub ucp_star: Vec<Edge>,
    /// Child unshared patterns seen at least twice with a shared pattern from the parent group.
    pub iep: Vec<(Vec<Edge>, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdvStep {
    pub shared_pairs: Vec<(usize, usize)>,
    pub patterns: Vec<PatternRecord>,
    pub discarded: Vec<Path>,
}

fn count<T: Ord + Clone>(items: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut out = BTreeMap::new();
    for x in items {
        *out.entry(x).or_insert(0) += 1;
    }
    out
}

/// Child paths that would close a dependency with the parent basis.
///
/// Parent paths are grouped by unshared pattern. For each group, the child
/// paths whose shared pattern also occurs in the group are counted by their
/// unshared pattern; patterns seen fewer than twice are harmless. Among the
/// rest, only the child paths carrying the group's most frequent shared
/// pattern are kept.
pub fn sdv_step(
    parent_basis: &[Path],
    child_basis: &[Path],
    parent: &SubstructurePath,
    child: &SubstructurePath,
) -> SdvStep {
    let child_pairs = child.pair_set();
    let shared_pairs: BTreeSet<(usize, usize)> =
        parent.layer_pairs().filter(|p| child_pairs.contains(p)).collect();
    if shared_pairs.is_empty() {
        return SdvStep { shared_pairs: Vec::new(), patterns: Vec::new(), discarded: Vec::new() };
    }

    let parent_parts: Vec<PathDecomposition> = parent_basis.iter().map(|p| decompose(p, &shared_pairs)).collect();
    let child_parts: Vec<PathDecomposition> = child_basis.iter().map(|p| decompose(p, &shared_pairs)).collect();

    let mut groups: BTreeMap<&Vec<Edge>, Vec<&Vec<Edge>>> = BTreeMap::new();
    for d in &parent_parts {
        groups.entry(&d.unshared_pattern).or_default().push(&d.shared_pattern);
    }

    let mut patterns = Vec::new();
    let mut discard = BTreeSet::new();
    for (ep, ucp) in groups {
        let freq = count(ucp.iter().copied());
        // highest count wins; BTreeMap order makes the smallest pattern win ties
        let ucp_star = freq
            .iter()
            .fold(None::<(&Vec<Edge>, usize)>, |best, (pat, &n)| match best {
                Some((_, m)) if m >= n => best,
                _ => Some((pat, n)),
            })
            .map(|(p, _)| p.clone())
            .unwrap_or_default();

        let iep: BTreeMap<&Vec<Edge>, usize> = count(
            child_parts
                .iter()
                .filter(|d| freq.contains_key(&d.shared_pattern))
                .map(|d| &d.unshared_pattern),
        )
        .into_iter()
        .filter(|&(_, n)| n >= 2)
        .collect();

        for (i, d) in child_parts.iter().enumerate() {
            if iep.contains_key(&d.unshared_pattern)
                && freq.contains_key(&d.shared_pattern)
                && d.shared_pattern != ucp_star
            {
                discard.insert(i);
            }
        }
        patterns.push(PatternRecord {
            ep: ep.clone(),
            ucp_star,
            iep: iep.into_iter().map(|(p, n)| (p.clone(), n)).collect(),
        });
    }

    SdvStep {
        shared_pairs: shared_pairs.into_iter().collect(),
        patterns,
        discarded: discard.into_iter().map(|i| child_basis[i].clone()).collect(),
    }
}

/// One call of the filtering step, as recorded in the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub chain: usize,
    /// `true` for the cross-chain pass over a chain head.
    pub cross_chain: bool,
    pub parent: usize,
    pub child: usize,
    #[serde(flatten)]
    pub step: SdvStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub chains: Vec<SubdivisionChain>,
    pub cross_chain: Vec<CrossChainTargets>,
    pub steps: Vec<StepRecord>,
    /// Paths removed from the underlying basis.
    pub underlying_discarded: Vec<Path>,
}

impl EliminationTrace {
    pub fn discard_count(&self) -> usize {
        self.steps.iter().map(|s| s.step.discarded.len()).sum()
    }
}

/// Output of the elimination: the shrunk set of every selected substructure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub shrunk: BTreeMap<usize, Vec<Path>>,
    pub trace: EliminationTrace,
}

impl Elimination {
    /// Union of all shrunk sets in canonical order.
    pub fn basis(&self) -> Vec<Path> {
        let set: BTreeSet<&Path> = self.shrunk.values().flatten().collect();
        set.into_iter().cloned().collect()
    }
}

fn remove_paths(set: &mut Vec<Path>, gone: &[Path]) {
    let gone: BTreeSet<&Path> = gone.iter().collect();
    set.retain(|p| !gone.contains(p));
}

/// Filters every selected substructure's basis along the chains, then the
/// chain heads against their cross-chain targets.
///
/// `bases` maps each selected substructure index (the underlying one included)
/// to its original basis. Parents are always original bases; children are the
/// current shrunk sets, so a set in several chains shrinks cumulatively in
/// chain order.
pub fn eliminate_dependencies(
    chains: &[SubdivisionChain],
    cross: &[CrossChainTargets],
    bases: &BTreeMap<usize, Vec<Path>>,
    underlying: usize,
    paths: &[SubstructurePath],
) -> Elimination {
    let mut shrunk = bases.clone();
    let mut trace = EliminationTrace {
        chains: chains.to_vec(),
        cross_chain: cross.to_vec(),
        ..Default::default()
    };

    for (t, chain) in chains.iter().enumerate() {
        let walk = chain.indices.iter().copied().chain(std::iter::once(underlying));
        let pairs: Vec<(usize, usize)> = walk.clone().zip(walk.skip(1)).collect();
        for (parent, child) in pairs {
            let step = sdv_step(&bases[&parent], &shrunk[&child], &paths[parent], &paths[child]);
            remove_paths(shrunk.get_mut(&child).expect("selected"), &step.discarded);
            if child == underlying {
                trace.underlying_discarded.extend(step.discarded.iter().cloned());
            }
            trace.steps.push(StepRecord { chain: t, cross_chain: false, parent, child, step });
        }

        let head = chain.head();
        for &q in &cross[t].q {
            let step = sdv_step(&bases[&q], &shrunk[&head], &paths[q], &paths[head]);
            remove_paths(shrunk.get_mut(&head).expect("selected"), &step.discarded);
            trace.steps.push(StepRecord { chain: t, cross_chain: true, parent: q, child: head, step });
        }
    }
    Elimination { shrunk, trace }
}
