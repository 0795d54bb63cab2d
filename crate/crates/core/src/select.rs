//! Subdivision sets and greedy selection of a maximal independent set of
//! substructure paths.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{exact_rank, RankAccumulator};
use crate::network::{AlphaVector, BetaVector};

/// How two substructure paths relate under subdivision, read off `beta_r - beta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubdivisionRelation {
    Equal,
    /// `p_t` visits every layer of `p_r` and more.
    TSubdividesR,
    /// `p_r` visits every layer of `p_t` and more.
    RSubdividesT,
    Incomparable,
}

pub fn subdivision_relation(beta_r: &BetaVector, beta_t: &BetaVector) -> SubdivisionRelation {
    debug_assert_eq!(beta_r.bits.len(), beta_t.bits.len());
    let mut plus = false;
    let mut minus = false;
    for (&a, &b) in beta_r.bits.iter().zip(&beta_t.bits) {
        match a.cmp(&b) {
            std::cmp::Ordering::Greater => plus = true,
            std::cmp::Ordering::Less => minus = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    match (plus, minus) {
        (false, false) => SubdivisionRelation::Equal,
        (false, true) => SubdivisionRelation::TSubdividesR,
        (true, false) => SubdivisionRelation::RSubdividesT,
        (true, true) => SubdivisionRelation::Incomparable,
    }
}

/// Indices of the substructure paths that subdivide path `owner`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionSet {
    pub owner: usize,
    pub members: BTreeSet<usize>,
}

impl SubdivisionSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.members.contains(&t)
    }
}

pub fn compute_subdivision_sets(betas: &[BetaVector]) -> Vec<SubdivisionSet> {
    betas
        .iter()
        .enumerate()
        .map(|(r, beta_r)| SubdivisionSet {
            owner: r,
            members: betas
                .iter()
                .enumerate()
                .filter(|(_, beta_t)| subdivision_relation(beta_r, beta_t) == SubdivisionRelation::TSubdividesR)
                .map(|(t, _)| t)
                .collect(),
        })
        .collect()
}

/// Why a candidate was passed over during selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SkipReason {
    /// Its alpha vector lies in the span of those already chosen.
    NoRankGain,
    /// The swap-point rule fired against the previous candidate in sort order.
    SharedSwapPoint { previous: usize, parent: usize, swap_layer: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub index: usize,
    #[serde(flatten)]
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Chosen substructure indices, the underlying path first, then in sort order.
    pub selected: Vec<usize>,
    /// Rank of all alpha vectors.
    pub rank: usize,
    pub skipped: Vec<SkipRecord>,
    /// Candidates admitted by the fallback pass after the greedy pass fell short.
    pub fallback_admitted: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Candidate order: subdivision-set size descending, then beta ascending.
pub fn selection_order(betas: &[BetaVector], u_sets: &[SubdivisionSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..betas.len()).collect();
    order.sort_by(|&a, &b| {
        u_sets[b]
            .len()
            .cmp(&u_sets[a].len())
            .then_with(|| betas[a].cmp(&betas[b]))
            .then(a.cmp(&b))
    });
    order
}

/// A layer strictly between a `+1` and a `-1` of `beta_a - beta_b` that both paths visit.
fn shared_swap_layer(beta_a: &BetaVector, beta_b: &BetaVector) -> Option<usize> {
    let a = &beta_a.bits;
    let b = &beta_b.bits;
    let plus: Vec<usize> = (0..a.len()).filter(|&l| a[l] > b[l]).collect();
    let minus: Vec<usize> = (0..a.len()).filter(|&l| a[l] < b[l]).collect();
    let shared: Vec<usize> = (0..a.len()).filter(|&l| a[l] == 1 && b[l] == 1).collect();
    for &x in &plus {
        for &y in &minus {
            let (lo, hi) = (x.min(y), x.max(y));
            if let Some(&s) = shared.iter().find(|&&s| lo < s && s < hi) {
                return Some(s);
            }
        }
    }
    None
}

/// Greedy selection of substructure paths whose alpha vectors are independent.
///
/// Starts from the underlying path (the one with an empty subdivision set and
/// all-ones beta) and walks the remaining paths in [`selection_order`]. A
/// candidate that raises the rank is still skipped when it ties the previous
/// candidate on subdivision-set size, both sit in the subdivision set of an
/// earlier candidate, and the two paths differ on both sides of a layer they
/// both visit. If the walk runs out before reaching the full rank, skipped
/// candidates get a second chance and a warning is recorded.
pub fn select_independent_substructures(
    alphas: &[AlphaVector],
    betas: &[BetaVector],
    u_sets: &[SubdivisionSet],
) -> Result<SelectionResult> {
    let underlying = betas
        .iter()
        .position(|b| b.bits.iter().all(|&x| x == 1))
        .ok_or(Error::RankShortfall { reached: 0, target: 1 })?;
    debug_assert!(u_sets[underlying].is_empty());

    let vectors: Vec<Vec<i64>> = alphas.iter().map(AlphaVector::to_i64).collect();
    let rank = exact_rank(&vectors);

    let mut order = selection_order(betas, u_sets);
    order.retain(|&r| r != underlying);
    order.insert(0, underlying);

    let mut acc = RankAccumulator::new();
    acc.insert(&vectors[underlying]);
    let mut selected = vec![underlying];
    let mut skipped = Vec::new();
    let mut rule_skipped = Vec::new();

    for i in 1..order.len() {
        if acc.rank() == rank {
            break;
        }
        let r = order[i];
        if !acc.is_independent(&vectors[r]) {
            skipped.push(SkipRecord { index: r, reason: SkipReason::NoRankGain });
            continue;
        }
        let prev = order[i - 1];
        if u_sets[prev].len() == u_sets[r].len() {
            let parent = order[..i - 1]
                .iter()
                .copied()
                .find(|&j| u_sets[j].contains(prev) && u_sets[j].contains(r));
            if let (Some(parent), Some(swap_layer)) = (parent, shared_swap_layer(&betas[prev], &betas[r])) {
                skipped.push(SkipRecord {
                    index: r,
                    reason: SkipReason::SharedSwapPoint { previous: prev, parent, swap_layer },
                });
                rule_skipped.push(r);
                continue;
            }
        }
        acc.insert(&vectors[r]);
        selected.push(r);
    }

    let mut fallback_admitted = Vec::new();
    let mut warnings = Vec::new();
    if acc.rank() < rank {
        warnings.push(format!(
            "greedy pass stopped at rank {} of {}; retrying skipped candidates",
            acc.rank(),
            rank
        ));
        for r in rule_skipped {
            if acc.rank() == rank {
                break;
            }
            if acc.insert(&vectors[r]) {
                fallback_admitted.push(r);
            }
        }
        if acc.rank() < rank {
            return Err(Error::RankShortfall { reached: acc.rank(), target: rank });
        }
        // keep the non-underlying part in candidate order
        let pos = |r: &usize| order.iter().position(|x| x == r).unwrap_or(usize::MAX);
        selected.extend(fallback_admitted.iter().copied());
        selected[1..].sort_by_key(pos);
    }

    Ok(SelectionResult { selected, rank, skipped, fallback_admitted, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{enumerate_substructure_paths, NetworkSpec, SubstructurePath};

    fn beta(bits: &[u8]) -> BetaVector {
        BetaVector { bits: bits.to_vec() }
    }

    fn encode(spec: &NetworkSpec) -> (Vec<SubstructurePath>, Vec<AlphaVector>, Vec<BetaVector>) {
        let paths = enumerate_substructure_paths(spec, 1000).unwrap();
        let l = spec.last_layer();
        let alphas = paths.iter().map(|p| p.alpha(l)).collect();
        let betas = paths.iter().map(|p| p.beta(l)).collect();
        (paths, alphas, betas)
    }

    #[test]
    fn relation_examples() {
        use SubdivisionRelation::*;
        assert_eq!(subdivision_relation(&beta(&[1, 0, 1, 0, 1]), &beta(&[1, 1, 1, 1, 1])), TSubdividesR);
        assert_eq!(subdivision_relation(&beta(&[1, 1, 1, 1, 1]), &beta(&[1, 0, 1, 0, 1])), RSubdividesT);
        assert_eq!(subdivision_relation(&beta(&[1, 0, 1]), &beta(&[1, 0, 1])), Equal);
        assert_eq!(subdivision_relation(&beta(&[1, 1, 1, 0, 1]), &beta(&[1, 0, 1, 1, 1])), Incomparable);
    }

    #[test]
    fn fig1b_subdivision_sets_and_selection() {
        let spec =
            NetworkSpec::new(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (2, 4)]).unwrap();
        let (_, alphas, betas) = encode(&spec);
        // indices: 0=(0,1,2,3,4) p1, 1=(0,1,2,4) p3, 2=(0,2,3,4) p2, 3=(0,2,4) p4
        let u = compute_subdivision_sets(&betas);
        let sets: Vec<Vec<usize>> = u.iter().map(|s| s.members.iter().copied().collect()).collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![0], vec![0, 1, 2]]);

        let sel = select_independent_substructures(&alphas, &betas, &u).unwrap();
        assert_eq!(sel.rank, 3);
        assert_eq!(sel.selected, vec![0, 3, 2]);
        // p3 is never reached: the rank is full once p2 is in
        assert!(sel.skipped.is_empty());
        assert!(sel.warnings.is_empty());
    }

    #[test]
    fn chain_only_network_selects_underlying() {
        let spec = NetworkSpec::chain(vec![2, 3, 2]).unwrap();
        let (_, alphas, betas) = encode(&spec);
        let u = compute_subdivision_sets(&betas);
        assert_eq!(u.len(), 1);
        assert!(u[0].is_empty());
        let sel = select_independent_substructures(&alphas, &betas, &u).unwrap();
        assert_eq!(sel.selected, vec![0]);
        assert_eq!(sel.rank, 1);
    }

    #[test]
    fn swap_layer_needs_a_layer_both_visit() {
        // +1 at 1, -1 at 3, both visit 2
        assert_eq!(shared_swap_layer(&beta(&[1, 1, 1, 0, 1]), &beta(&[1, 0, 1, 1, 1])), Some(2));
        // +1 at 1, -1 at 2, nothing in between
        assert_eq!(shared_swap_layer(&beta(&[1, 1, 0, 1]), &beta(&[1, 0, 1, 1])), None);
        // the only layer between them is skipped by both
        assert_eq!(shared_swap_layer(&beta(&[1, 1, 0, 0, 1]), &beta(&[1, 0, 0, 1, 1])), None);
        assert_eq!(shared_swap_layer(&beta(&[1, 0, 1]), &beta(&[1, 1, 1])), None);
    }
}
