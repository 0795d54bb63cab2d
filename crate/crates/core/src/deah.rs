//! The full pipeline: select independent substructures, build a basis for
//! each, then remove the paths that make their union dependent.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{build_chains, compute_qt, eliminate_dependencies, EliminationTrace};
use crate::error::Result;
use crate::network::{enumerate_substructure_paths, induce_subgraph, AlphaVector, BetaVector, NetworkSpec, Path, SubstructurePath};
use crate::oracle::DEFAULT_PATH_CAP;
use crate::select::{compute_subdivision_sets, select_independent_substructures, SelectionResult, SubdivisionSet};
use crate::subroutine::{subroutine_basis, BasisPathSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeahOptions {
    /// Guard on the number of substructure paths.
    pub path_cap: usize,
    /// Worker threads for the per-substructure bases; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for DeahOptions {
    fn default() -> Self {
        Self { path_cap: DEFAULT_PATH_CAP, threads: None }
    }
}

/// Counts describing one run. Everything here is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Rank of the substructure alpha vectors (number of selected substructures).
    pub r: usize,
    /// Number of chains.
    pub t: usize,
    pub chain_lengths: Vec<usize>,
    pub m: usize,
    pub w_max: usize,
    /// Largest per-substructure basis before elimination.
    pub b_max: usize,
    pub basis_size: usize,
    pub substructure_count: usize,
    pub naive_union_size: usize,
    pub chain_discards: usize,
    pub cross_chain_discards: usize,
    pub underlying_discards: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseTimings {
    pub select: Duration,
    pub bases: Duration,
    pub eliminate: Duration,
}

/// Step 1 output: every substructure with its encodings and the selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstructureAnalysis {
    pub paths: Vec<SubstructurePath>,
    pub alphas: Vec<AlphaVector>,
    pub betas: Vec<BetaVector>,
    pub u_sets: Vec<SubdivisionSet>,
    pub selection: SelectionResult,
}

impl SubstructureAnalysis {
    pub fn underlying(&self) -> usize {
        self.selection.selected[0]
    }
}

pub fn analyze_substructures(spec: &NetworkSpec, path_cap: usize) -> Result<SubstructureAnalysis> {
    let paths = enumerate_substructure_paths(spec, path_cap)?;
    let last = spec.last_layer();
    let alphas: Vec<_> = paths.iter().map(|p| p.alpha(last)).collect();
    let betas: Vec<_> = paths.iter().map(|p| p.beta(last)).collect();
    let u_sets = compute_subdivision_sets(&betas);
    let selection = select_independent_substructures(&alphas, &betas, &u_sets)?;
    Ok(SubstructureAnalysis { paths, alphas, betas, u_sets, selection })
}

/// Basis of the chain network induced by `p`, lifted back to `spec`'s layers.
pub fn substructure_basis(spec: &NetworkSpec, p: &SubstructurePath, index: usize) -> Result<BasisPathSet> {
    let induced = induce_subgraph(spec, p)?;
    let mut basis = subroutine_basis(&induced.spec)?;
    for path in &mut basis.paths {
        *path = induced.lift(path);
    }
    basis.substructure = Some(index);
    Ok(basis)
}

#[derive(Debug, Clone)]
pub struct DeahOutcome {
    pub analysis: SubstructureAnalysis,
    pub bases: BTreeMap<usize, BasisPathSet>,
    pub shrunk: BTreeMap<usize, Vec<Path>>,
    pub trace: EliminationTrace,
    /// Final basis in canonical order.
    pub basis: Vec<Path>,
    pub stats: RunStats,
    pub timings: PhaseTimings,
}

impl DeahOutcome {
    /// Union of the per-substructure bases before elimination.
    pub fn naive_union(&self) -> Vec<Path> {
        let mut all: Vec<Path> = self.bases.values().flat_map(|b| b.paths.iter().cloned()).collect();
        all.sort();
        all.dedup();
        all
    }
}

fn build_bases(spec: &NetworkSpec, analysis: &SubstructureAnalysis) -> Result<BTreeMap<usize, BasisPathSet>> {
    analysis
        .selection
        .selected
        .par_iter()
        .map(|&r| substructure_basis(spec, &analysis.paths[r], r).map(|b| (r, b)))
        .collect()
}

pub fn run_deah(spec: &NetworkSpec, options: &DeahOptions) -> Result<DeahOutcome> {
    let started = Instant::now();
    let analysis = analyze_substructures(spec, options.path_cap)?;
    let select = started.elapsed();

    let started = Instant::now();
    let bases = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(|| build_bases(spec, &analysis))?,
        None => build_bases(spec, &analysis)?,
    };
    let bases_time = started.elapsed();

    let started = Instant::now();
    let underlying = analysis.underlying();
    let ordered: Vec<usize> = analysis.selection.selected[1..].to_vec();
    let chain_set = build_chains(&ordered, &analysis.u_sets);
    let cross = compute_qt(&chain_set.chains, &analysis.paths);
    let originals: BTreeMap<usize, Vec<Path>> = bases.iter().map(|(&r, b)| (r, b.paths.clone())).collect();
    let elimination = eliminate_dependencies(&chain_set.chains, &cross, &originals, underlying, &analysis.paths);
    let basis = elimination.basis();
    let eliminate = started.elapsed();

    let trace = elimination.trace;
    let (cross_steps, chain_steps): (Vec<_>, Vec<_>) = trace.steps.iter().partition(|s| s.cross_chain);
    let naive_union_size = bases.values().map(BasisPathSet::len).sum();
    let stats = RunStats {
        r: analysis.selection.rank,
        t: chain_set.chains.len(),
        chain_lengths: chain_set.chains.iter().map(|c| c.len()).collect(),
        m: spec.edge_count(),
        w_max: spec.max_width(),
        b_max: bases.values().map(BasisPathSet::len).max().unwrap_or(0),
        basis_size: basis.len(),
        substructure_count: analysis.paths.len(),
        naive_union_size,
        chain_discards: chain_steps.iter().map(|s| s.step.discarded.len()).sum(),
        cross_chain_discards: cross_steps.iter().map(|s| s.step.discarded.len()).sum(),
        underlying_discards: trace.underlying_discarded.len(),
    };

    Ok(DeahOutcome {
        analysis,
        bases,
        shrunk: elimination.shrunk,
        trace,
        basis,
        stats,
        timings: PhaseTimings { select, bases: bases_time, eliminate },
    })
}
