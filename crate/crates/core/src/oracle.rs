//! Brute-force verification of basis path sets.
//!
//! Path independence is checked as rational linear independence of edge
//! incidence vectors. Every input-to-output path is enumerated, so this only
//! scales to small networks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{exact_rank, solve_combinations, RankAccumulator};
use crate::network::{edge_incidence, NetworkSpec, NodeId, Path};

pub const DEFAULT_PATH_CAP: usize = 10_000;

/// Every input-to-output path of a network with its incidence rows and their rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpace {
    pub all_paths: Vec<Path>,
    pub incidence_matrix: Vec<Vec<i64>>,
    pub rank: usize,
}

fn incidence_row(path: &Path, spec: &NetworkSpec) -> Result<Vec<i64>> {
    Ok(edge_incidence(path, spec)?.to_i64())
}

/// Depth-first enumeration in canonical (lexicographic) order.
pub fn enumerate_paths(spec: &NetworkSpec, cap: usize) -> Result<Vec<Path>> {
    let last = spec.last_layer();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); last + 1];
    for &(j, l) in spec.connections() {
        succ[j].push(l);
    }
    let mut out = Vec::new();
    let mut stack: Vec<NodeId> = Vec::new();

    fn walk(
        node: NodeId,
        spec: &NetworkSpec,
        succ: &[Vec<usize>],
        stack: &mut Vec<NodeId>,
        out: &mut Vec<Path>,
        cap: usize,
    ) -> Result<()> {
        stack.push(node);
        if node.layer == spec.last_layer() {
            if out.len() == cap {
                return Err(Error::PathCountGuardExceeded(cap));
            }
            out.push(Path::new(stack.clone()));
        } else {
            for &l in &succ[node.layer] {
                for k in 0..spec.width(l) {
                    walk(NodeId::new(l, k), spec, succ, stack, out, cap)?;
                }
            }
        }
        stack.pop();
        Ok(())
    }

    for i in 0..spec.width(0) {
        walk(NodeId::new(0, i), spec, &succ, &mut stack, &mut out, cap)?;
    }
    Ok(out)
}

pub fn enumerate_all_paths(spec: &NetworkSpec, cap: usize) -> Result<PathSpace> {
    let all_paths = enumerate_paths(spec, cap)?;
    let incidence_matrix = all_paths
        .iter()
        .map(|p| incidence_row(p, spec))
        .collect::<Result<Vec<_>>>()?;
    let rank = exact_rank(&incidence_matrix);
    Ok(PathSpace { all_paths, incidence_matrix, rank })
}

/// A candidate path that is a rational combination of earlier candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyWitness {
    /// Position of the dependent path in the candidate list.
    pub index: usize,
    pub path: Path,
    /// `(position, coefficient)` for each earlier candidate with a nonzero coefficient.
    pub combination: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    IsBasis { rank: usize },
    NotIndependent { witness: DependencyWitness },
    NotMaximal { gap: usize, candidate_rank: usize, space_rank: usize },
}

impl Verdict {
    pub fn is_basis(&self) -> bool {
        matches!(self, Verdict::IsBasis { .. })
    }
}

/// Checks a candidate against a precomputed path space.
pub fn certify_against(candidate: &[Path], spec: &NetworkSpec, space: &PathSpace) -> Result<Verdict> {
    let rows = candidate
        .iter()
        .map(|p| incidence_row(p, spec))
        .collect::<Result<Vec<_>>>()?;

    let mut acc = RankAccumulator::new();
    for (index, row) in rows.iter().enumerate() {
        if !acc.insert(row) {
            let coeffs = solve_combinations(&rows[..index], std::slice::from_ref(row))
                .pop()
                .flatten()
                .ok_or(Error::Inconsistent)?;
            let combination = coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.to_string()))
                .collect();
            return Ok(Verdict::NotIndependent {
                witness: DependencyWitness { index, path: candidate[index].clone(), combination },
            });
        }
    }
    let candidate_rank = acc.rank();
    if candidate_rank < space.rank {
        return Ok(Verdict::NotMaximal { gap: space.rank - candidate_rank, candidate_rank, space_rank: space.rank });
    }
    Ok(Verdict::IsBasis { rank: candidate_rank })
}

/// Whether `candidate` is a maximal independent subset of all paths.
pub fn certify_basis(candidate: &[Path], spec: &NetworkSpec, cap: usize) -> Result<Verdict> {
    let space = enumerate_all_paths(spec, cap)?;
    certify_against(candidate, spec, &space)
}

/// Exact expression of a path over a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub coefficients: Vec<BigRational>,
    /// True when every coefficient is an integer of magnitude at most
    /// [`INTEGER_COEFF_BOUND`], i.e. the path is reachable by bounded path
    /// additions and removals.
    pub small_integer: bool,
}

pub const INTEGER_COEFF_BOUND: i64 = 3;

impl Representation {
    /// `sum_i c_i * basis_i` as a rational edge vector.
    pub fn reconstruct(&self, basis_rows: &[Vec<i64>]) -> Vec<BigRational> {
        let dim = basis_rows.first().map_or(0, Vec::len);
        let mut out = vec![BigRational::zero(); dim];
        for (c, row) in self.coefficients.iter().zip(basis_rows) {
            if c.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row) {
                if x != 0 {
                    *o += c * BigRational::from_integer(BigInt::from(x));
                }
            }
        }
        out
    }
}

fn small_integer(coeffs: &[BigRational]) -> bool {
    let bound = BigRational::from_integer(BigInt::from(INTEGER_COEFF_BOUND));
    coeffs.iter().all(|c| c.is_integer() && c.abs() <= bound)
}

/// Represents several paths at once over `basis`.
///
/// When `basis` is a basis the coefficients are unique, so the bounded
/// integer check is decided by the rational solution itself.
pub fn represent_many(paths: &[Path], basis: &[Path], spec: &NetworkSpec) -> Result<Vec<Representation>> {
    let basis_rows = basis
        .iter()
        .map(|p| incidence_row(p, spec))
        .collect::<Result<Vec<_>>>()?;
    let targets = paths
        .iter()
        .map(|p| incidence_row(p, spec))
        .collect::<Result<Vec<_>>>()?;
    solve_combinations(&basis_rows, &targets)
        .into_iter()
        .map(|sol| {
            let coefficients = sol.ok_or(Error::Inconsistent)?;
            Ok(Representation { small_integer: small_integer(&coefficients), coefficients })
        })
        .collect()
}

pub fn represent(path: &Path, basis: &[Path], spec: &NetworkSpec) -> Result<Representation> {
    Ok(represent_many(std::slice::from_ref(path), basis, spec)?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// A signed sum of paths: path addition and removal on edge multisets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedPathExpression {
    pub terms: Vec<(Sign, Path)>,
}

impl SignedPathExpression {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn plus(mut self, p: Path) -> Self {
        self.terms.push((Sign::Plus, p));
        self
    }

    pub fn minus(mut self, p: Path) -> Self {
        self.terms.push((Sign::Minus, p));
        self
    }
}

/// Signed edge multiplicities of an expression over the canonical edge order.
pub fn evaluate_expression(expr: &SignedPathExpression, spec: &NetworkSpec) -> Result<Vec<i64>> {
    let mut out = vec![0i64; spec.edge_count()];
    for (sign, path) in &expr.terms {
        let s = match sign {
            Sign::Plus => 1,
            Sign::Minus => -1,
        };
        for (o, x) in out.iter_mut().zip(incidence_row(path, spec)?) {
            *o += s * x;
        }
    }
    Ok(out)
}
