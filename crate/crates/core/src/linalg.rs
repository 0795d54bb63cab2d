//! Exact rank and linear solves over the rationals.
//!
//! Elimination is fraction-free: rows stay integral and are divided by the
//! gcd of their entries after every update. Arithmetic runs on checked `i128`
//! first and restarts on `BigInt` if anything overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

trait Scalar: Clone {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `a * b - c * d`, or `None` on overflow.
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn to_bigint(&self) -> BigInt;
}

impl Scalar for i128 {
    fn from_i64(v: i64) -> Self {
        i128::from(v)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        Some(a * b - c * d)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

fn lift<T: Scalar>(v: &[i64]) -> Vec<T> {
    v.iter().map(|&x| T::from_i64(x)).collect()
}

/// Divides a row by the gcd of its entries.
fn normalize<T: Scalar>(row: &mut [T]) {
    let mut g: Option<T> = None;
    for x in row.iter().filter(|x| !x.is_zero()) {
        let next = match g {
            None => x.gcd(x),
            Some(ref g) => g.gcd(x),
        };
        if next.is_unit() {
            return;
        }
        g = Some(next);
    }
    if let Some(g) = g {
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = x.div_exact(&g);
            }
        }
    }
}

/// `target <- pivot * target - factor * row`, then normalized.
fn eliminate<T: Scalar>(target: &mut [T], row: &[T], col: usize) -> Option<()> {
    let pivot = row[col].clone();
    let factor = target[col].clone();
    for (t, r) in target.iter_mut().zip(row) {
        if !(t.is_zero() && r.is_zero()) {
            *t = T::cross(&pivot, t, &factor, r)?;
        }
    }
    normalize(target);
    Some(())
}

/// Row echelon form built one row at a time. Each stored row's first nonzero
/// entry is its pivot; rows are kept sorted by pivot column.
#[derive(Debug, Clone)]
struct Echelon<T> {
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> Echelon<T> {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn reduce(&self, v: &mut [T]) -> Option<()> {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                eliminate(v, row, *pivot)?;
            }
        }
        Some(())
    }

    /// Returns whether `v` was independent of the stored rows (and stored it).
    fn insert(&mut self, mut v: Vec<T>) -> Option<bool> {
        self.reduce(&mut v)?;
        match v.iter().position(|x| !x.is_zero()) {
            None => Some(false),
            Some(pivot) => {
                normalize(&mut v);
                let at = self.rows.partition_point(|(p, _)| *p < pivot);
                self.rows.insert(at, (pivot, v));
                Some(true)
            }
        }
    }

    fn is_independent(&self, v: &[i64]) -> Option<bool> {
        let mut v = lift::<T>(v);
        self.reduce(&mut v)?;
        Some(v.iter().any(|x| !x.is_zero()))
    }
}

/// Incremental rank of a growing set of integer vectors.
#[derive(Debug, Clone)]
pub struct RankAccumulator {
    fast: Option<Echelon<i128>>,
    slow: Option<Echelon<BigInt>>,
    accepted: Vec<Vec<i64>>,
}

impl Default for RankAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl RankAccumulator {
    pub fn new() -> Self {
        Self { fast: Some(Echelon::new()), slow: None, accepted: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.accepted.len()
    }

    fn promote(&mut self) -> &mut Echelon<BigInt> {
        if self.slow.is_none() {
            self.fast = None;
            let mut slow = Echelon::new();
            for v in &self.accepted {
                slow.insert(lift(v)).expect("bigint arithmetic cannot overflow");
            }
            self.slow = Some(slow);
        }
        self.slow.as_mut().expect("just set")
    }

    /// Whether adding `v` would raise the rank.
    pub fn is_independent(&mut self, v: &[i64]) -> bool {
        if let Some(fast) = &self.fast {
            if let Some(ans) = fast.is_independent(v) {
                return ans;
            }
        }
        self.promote().is_independent(v).expect("bigint arithmetic cannot overflow")
    }

    /// Adds `v` if it raises the rank; returns whether it did.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let added = match self.fast.as_mut().map(|f| f.insert(lift(v))) {
            Some(Some(added)) => added,
            _ => self
                .promote()
                .insert(lift(v))
                .expect("bigint arithmetic cannot overflow"),
        };
        if added {
            self.accepted.push(v.to_vec());
        }
        added
    }
}

/// Rank over the rationals of a list of equal-length integer vectors.
pub fn exact_rank<V: AsRef<[i64]>>(vectors: &[V]) -> usize {
    let mut acc = RankAccumulator::new();
    for v in vectors {
        acc.insert(v.as_ref());
    }
    acc.rank()
}

type Solutions = Vec<Option<Vec<BigRational>>>;

fn gauss_jordan<T: Scalar>(columns: &[Vec<i64>], targets: &[Vec<i64>], dim: usize) -> Option<Solutions> {
    let n = columns.len();
    let mut m: Vec<Vec<T>> = (0..dim)
        .map(|e| {
            columns
                .iter()
                .chain(targets)
                .map(|v| T::from_i64(v[e]))
                .collect()
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(found) = (r..dim).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, found);
        normalize(&mut m[r]);
        let (before, rest) = m.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().expect("r < dim");
        for row in before.iter_mut().chain(after.iter_mut()) {
            if !row[col].is_zero() {
                eliminate(row, pivot_row, col)?;
            }
        }
        pivots.push((r, col));
        r += 1;
    }

    let solutions = (0..targets.len())
        .map(|t| {
            let rhs = n + t;
            if m[r..].iter().any(|row| !row[rhs].is_zero()) {
                return None;
            }
            let mut coeffs = vec![BigRational::zero(); n];
            for &(row, col) in &pivots {
                coeffs[col] = BigRational::new(m[row][rhs].to_bigint(), m[row][col].to_bigint());
            }
            Some(coeffs)
        })
        .collect();
    Some(solutions)
}

/// Solves `target = sum_i c_i * columns[i]` exactly for every target.
///
/// Returns `None` for a target outside the span of `columns`. When the columns
/// are dependent, free coefficients are set to zero.
pub fn solve_combinations(columns: &[Vec<i64>], targets: &[Vec<i64>]) -> Solutions {
    let dim = columns
        .iter()
        .chain(targets)
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    debug_assert!(columns.iter().chain(targets).all(|v| v.len() == dim));
    gauss_jordan::<i128>(columns, targets, dim)
        .unwrap_or_else(|| gauss_jordan::<BigInt>(columns, targets, dim).expect("bigint arithmetic cannot overflow"))
}
