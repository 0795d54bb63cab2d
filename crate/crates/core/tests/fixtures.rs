//! Worked instances with hand-checked answers.

use bpk_core::chain::{build_chains, compute_qt, sdv_step, SubdivisionChain};
use bpk_core::deah::{analyze_substructures, substructure_basis};
use bpk_core::linalg::exact_rank;
use bpk_core::network::{edge_incidence, induce_subgraph};
use bpk_core::oracle::{certify_basis, enumerate_all_paths, evaluate_expression, represent, SignedPathExpression, DEFAULT_PATH_CAP};
use bpk_core::subroutine::subroutine_basis;
use bpk_core::{run_deah, DeahOptions, NetworkSpec, Path, SubstructurePath, Verdict};

fn p(pairs: &[(usize, usize)]) -> Path {
    Path::from_pairs(pairs)
}

fn sp(layers: &[usize]) -> SubstructurePath {
    SubstructurePath::new(layers.to_vec())
}

fn index_of(paths: &[SubstructurePath], layers: &[usize]) -> usize {
    paths.iter().position(|q| q.layers == layers).unwrap()
}

fn skeleton(widths: Vec<usize>, pairs: &[(usize, usize)]) -> NetworkSpec {
    NetworkSpec::new(widths, pairs).unwrap()
}

#[test]
fn fig1b_skeleton_end_to_end() {
    let spec = skeleton(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (2, 4)]);
    let a = analyze_substructures(&spec, DEFAULT_PATH_CAP).unwrap();
    let layers: Vec<Vec<usize>> = a.paths.iter().map(|q| q.layers.clone()).collect();
    assert_eq!(layers, vec![vec![0, 1, 2, 3, 4], vec![0, 1, 2, 4], vec![0, 2, 3, 4], vec![0, 2, 4]]);
    assert_eq!(a.selection.rank, 3);

    let out = run_deah(&spec, &DeahOptions::default()).unwrap();
    assert_eq!(out.stats.t, 1);
    assert_eq!(out.basis.len(), 3);
    assert_eq!(certify_basis(&out.basis, &spec, DEFAULT_PATH_CAP).unwrap(), Verdict::IsBasis { rank: 3 });

    // the excluded skeleton path p3 = (0,1,2,4) is p1 + p4 - p2
    let p3 = p(&[(0, 0), (1, 0), (2, 0), (4, 0)]);
    let rep = represent(&p3, &out.basis, &spec).unwrap();
    assert!(rep.small_integer);
    let coeffs: Vec<String> = rep.coefficients.iter().map(|c| c.to_string()).collect();
    // basis order: p1 (0,1,2,3,4), p2 (0,2,3,4), p4 (0,2,4)
    assert_eq!(coeffs, vec!["1", "-1", "1"]);
}

#[test]
fn nested_chain_of_three() {
    // (0,4) ⊃ (0,3,4) ⊃ (0,2,3,4) ⊃ underlying, one chain
    let spec = skeleton(vec![2; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (0, 3), (0, 4)]);
    let a = analyze_substructures(&spec, DEFAULT_PATH_CAP).unwrap();
    assert_eq!(a.selection.rank, 4);
    let i4 = index_of(&a.paths, &[0, 4]);
    let i5 = index_of(&a.paths, &[0, 3, 4]);
    let i6 = index_of(&a.paths, &[0, 2, 3, 4]);
    let i0 = a.underlying();

    let chains = build_chains(&a.selection.selected[1..], &a.u_sets);
    assert_eq!(chains.chains, vec![SubdivisionChain { indices: vec![i4, i5, i6] }]);
    let u = |i: usize| &a.u_sets[i].members;
    assert!(u(i4).is_superset(u(i5)) && u(i4) != u(i5));
    assert!(u(i5).is_superset(u(i6)) && u(i5) != u(i6));
    assert!(u(i6).contains(&i0) && u(i0).is_empty());

    let out = run_deah(&spec, &DeahOptions::default()).unwrap();
    assert!(certify_basis(&out.basis, &spec, DEFAULT_PATH_CAP).unwrap().is_basis());
}

#[test]
fn case1_swap_identity() {
    // p1 = (0,2,3) and p2 = (0,1,2,3) share the layer pair (2,3)
    let spec = skeleton(vec![1, 1, 1, 2], &[(0, 1), (1, 2), (2, 3), (0, 2)]);
    let p11 = p(&[(0, 0), (2, 0), (3, 0)]);
    let p12 = p(&[(0, 0), (2, 0), (3, 1)]);
    let p21 = p(&[(0, 0), (1, 0), (2, 0), (3, 0)]);
    let p22 = p(&[(0, 0), (1, 0), (2, 0), (3, 1)]);
    let rhs = evaluate_expression(&SignedPathExpression::new().plus(p21.clone()).minus(p22.clone()).plus(p12.clone()), &spec).unwrap();
    assert_eq!(rhs, edge_incidence(&p11, &spec).unwrap().to_i64());

    let out = run_deah(&spec, &DeahOptions::default()).unwrap();
    let naive = out.naive_union();
    assert_eq!(naive, {
        let mut v = vec![p11, p12, p21, p22.clone()];
        v.sort();
        v
    });
    let rows: Vec<Vec<i64>> = naive.iter().map(|q| edge_incidence(q, &spec).unwrap().to_i64()).collect();
    assert_eq!(exact_rank(&rows), 3);

    assert_eq!(out.trace.discard_count(), 1);
    assert_eq!(out.trace.underlying_discarded, vec![p22]);
    assert_eq!(certify_basis(&out.basis, &spec, DEFAULT_PATH_CAP).unwrap(), Verdict::IsBasis { rank: 3 });
}

#[test]
fn shared_pairs_without_dependency() {
    // widths [1,2,1,1] plus (1,3): the two substructures share (0,1) but their union is independent
    let spec = skeleton(vec![1, 2, 1, 1], &[(0, 1), (1, 2), (2, 3), (1, 3)]);
    let parent = sp(&[0, 1, 3]);
    let child = sp(&[0, 1, 2, 3]);
    let b_parent = substructure_basis(&spec, &parent, 1).unwrap().paths;
    let b_child = substructure_basis(&spec, &child, 0).unwrap().paths;
    assert_eq!(b_parent, vec![p(&[(0, 0), (1, 0), (3, 0)]), p(&[(0, 0), (1, 1), (3, 0)])]);
    assert_eq!(b_child, vec![p(&[(0, 0), (1, 0), (2, 0), (3, 0)]), p(&[(0, 0), (1, 1), (2, 0), (3, 0)])]);

    let step = sdv_step(&b_parent, &b_child, &parent, &child);
    assert_eq!(step.shared_pairs, vec![(0, 1)]);
    assert!(step.patterns.iter().all(|r| r.iep.is_empty()));
    assert!(step.discarded.is_empty());

    let out = run_deah(&spec, &DeahOptions::default()).unwrap();
    assert_eq!(out.basis.len(), 4);
    assert_eq!(enumerate_all_paths(&spec, DEFAULT_PATH_CAP).unwrap().rank, 4);
    assert!(certify_basis(&out.basis, &spec, DEFAULT_PATH_CAP).unwrap().is_basis());
}

#[test]
fn disjoint_layer_pairs_discard_nothing() {
    let spec = skeleton(vec![1, 1, 1], &[(0, 1), (1, 2), (0, 2)]);
    let parent = sp(&[0, 2]);
    let child = sp(&[0, 1, 2]);
    let bp = substructure_basis(&spec, &parent, 1).unwrap().paths;
    let bc = substructure_basis(&spec, &child, 0).unwrap().paths;
    let step = sdv_step(&bp, &bc, &parent, &child);
    assert!(step.shared_pairs.is_empty());
    assert!(step.discarded.is_empty());
}

#[test]
fn cross_chain_target_is_deepest_sharing_member() {
    // chain 0: (0,3,5) ⊃ (0,1,3,5) ⊃ (0,2,3,5); chain 1: (0,1,5)
    let paths = vec![sp(&[0, 3, 5]), sp(&[0, 1, 3, 5]), sp(&[0, 2, 3, 5]), sp(&[0, 1, 5])];
    let chains = vec![SubdivisionChain { indices: vec![0, 1, 2] }, SubdivisionChain { indices: vec![3] }];
    let q = compute_qt(&chains, &paths);
    assert!(q[0].q.is_empty());
    assert_eq!(q[1].q, vec![1]);
    assert!(q[1].sh.is_empty());

    // a single chain has no cross-chain targets
    let q = compute_qt(&chains[..1], &paths);
    assert!(q[0].q.is_empty());
}

#[test]
fn induce_subgraph_examples() {
    let spec = skeleton(vec![2, 3, 2, 2, 2], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]);
    let g = induce_subgraph(&spec, &sp(&[0, 2, 3, 4])).unwrap();
    assert_eq!(g.spec.widths(), &[2, 2, 2, 2]);
    assert_eq!(g.spec.edge_count(), 12);

    let g = induce_subgraph(&spec, &sp(&[0, 1, 2, 3, 4])).unwrap();
    assert_eq!(g.spec, NetworkSpec::chain(vec![2, 3, 2, 2, 2]).unwrap());
}

#[test]
fn subroutine_small_cases() {
    let b = subroutine_basis(&NetworkSpec::chain(vec![2, 2, 2]).unwrap()).unwrap();
    assert_eq!(b.len(), 6);
    let spec = NetworkSpec::chain(vec![2, 2, 2]).unwrap();
    let space = enumerate_all_paths(&spec, DEFAULT_PATH_CAP).unwrap();
    assert_eq!(space.all_paths.len(), 8);
    assert_eq!(space.rank, 6);
    assert_eq!(certify_basis(&b.paths, &spec, DEFAULT_PATH_CAP).unwrap(), Verdict::IsBasis { rank: 6 });

    let mut missing = b.paths.clone();
    missing.pop();
    assert!(matches!(certify_basis(&missing, &spec, DEFAULT_PATH_CAP).unwrap(), Verdict::NotMaximal { gap: 1, .. }));

    let mut dup = b.paths.clone();
    dup.push(dup[0].clone());
    assert!(matches!(certify_basis(&dup, &spec, DEFAULT_PATH_CAP).unwrap(), Verdict::NotIndependent { .. }));
}

#[test]
fn expression_algebra() {
    let spec = NetworkSpec::chain(vec![1, 2, 1]).unwrap();
    let a = p(&[(0, 0), (1, 0), (2, 0)]);
    let zero = evaluate_expression(&SignedPathExpression::new().plus(a.clone()).minus(a.clone()), &spec).unwrap();
    assert!(zero.iter().all(|&x| x == 0));
    let twice = evaluate_expression(&SignedPathExpression::new().plus(a.clone()).plus(a.clone()), &spec).unwrap();
    let once = edge_incidence(&a, &spec).unwrap().to_i64();
    assert_eq!(twice, once.iter().map(|x| 2 * x).collect::<Vec<_>>());
}
