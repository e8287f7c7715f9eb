//! The commutant `{Z : YZ = ZY, ΩZ = ZΩ}` over Q and the enumeration of
//! its non-negative integer points with `Z_{0,0} = 1`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{Cyclotomic, Rational};
use crate::fusion::FusionRing;
use crate::linalg;
use crate::modular::ModularData;

pub type IntMatrix = Vec<Vec<u32>>;

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommutantError {
    #[error("commutant basis matrix {index} fails YB = BY at ({row},{col})")]
    BasisVerification { index: usize, row: usize, col: usize },
    #[error("the diagonal entry (0,0) is not a pivot of the commutant basis")]
    VacuumNotPivot,
    #[error("basis coefficients overflow the 128-bit search representation")]
    Overflow,
    #[error("node budget of {budget} exhausted; {} invariants found so far", partial.len())]
    BudgetExhausted { budget: u64, partial: Vec<CouplingMatrix> },
    #[error("enumerated candidate failed verification: {0}")]
    CandidateRejected(Rejection),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

/// Why a matrix is not a coupling matrix.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    #[error("matrix must be {n}×{n}")]
    Shape { n: usize },
    #[error("entry ({row},{col}) is negative")]
    Negative { row: usize, col: usize },
    #[error("Z_00 = {value}, expected 1")]
    Vacuum { value: i64 },
    #[error("ΩZ != ZΩ at ({row},{col}): twists differ")]
    TwistCommutation { row: usize, col: usize },
    #[error("YZ != ZY at ({row},{col})")]
    YCommutation { row: usize, col: usize },
}

/// Entries allowed by T-commutation: `(a, b)` with `h_a ≡ h_b mod 1`,
/// in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityPattern {
    n: usize,
    allowed: Vec<(usize, usize)>,
}

impl SparsityPattern {
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.allowed
    }
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.allowed.binary_search(&(a, b)).is_ok()
    }
    pub fn rank(&self) -> usize {
        self.n
    }
}

pub fn twist_sparsity(ring: &FusionRing) -> SparsityPattern {
    let n = ring.rank();
    let allowed = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| ring.twist(a) == ring.twist(b))
        .collect();
    SparsityPattern { n, allowed }
}

/// Rational basis of the commutant restricted to a sparsity pattern, in
/// reduced echelon form over the pattern's entry order.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutantBasis {
    n: usize,
    entries: Vec<(usize, usize)>,
    vectors: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    exact: bool,
}

impl CommutantBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
    pub fn is_exact(&self) -> bool {
        self.exact
    }
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }
    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }
    pub fn pivot_positions(&self) -> Vec<(usize, usize)> {
        self.pivots.iter().map(|&p| self.entries[p]).collect()
    }
    pub fn matrix(&self, k: usize) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![Rational::zero(); self.n]; self.n];
        for (&(a, b), x) in self.entries.iter().zip(&self.vectors[k]) {
            m[a][b] = x.clone();
        }
        m
    }
    pub fn matrices(&self) -> Vec<Vec<Vec<Rational>>> {
        (0..self.dim()).map(|k| self.matrix(k)).collect()
    }

    /// Coordinates of `z` in this basis, if it lies in the span.
    pub fn coordinates(&self, z: &IntMatrix) -> Option<Vec<Rational>> {
        let x: Vec<Rational> = self.pivots.iter().map(|&p| Rational::from_integer(z[self.entries[p].0][self.entries[p].1].into())).collect();
        let n = self.n;
        let mut rebuilt = vec![vec![Rational::zero(); n]; n];
        for (k, v) in self.vectors.iter().enumerate() {
            for (&(a, b), c) in self.entries.iter().zip(v) {
                rebuilt[a][b] += &x[k] * c;
            }
        }
        let same = (0..n).all(|a| (0..n).all(|b| rebuilt[a][b] == Rational::from_integer(z[a][b].into())));
        same.then_some(x)
    }
}

/// Non-negative integer matrix in the commutant with `Z_00 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub z: IntMatrix,
    /// Commutation with Y and Ω was checked in exact arithmetic.
    pub verified: bool,
    pub trace: u64,
    pub vacuum_column: Vec<u32>,
    pub vacuum_row: Vec<u32>,
}

impl CouplingMatrix {
    fn from_matrix(z: IntMatrix, verified: bool) -> Self {
        let trace = (0..z.len()).map(|a| z[a][a] as u64).sum();
        let vacuum_column = z.iter().map(|row| row[0]).collect();
        let vacuum_row = z[0].clone();
        CouplingMatrix { z, verified, trace, vacuum_column, vacuum_row }
    }
    pub fn rank(&self) -> usize {
        self.z.len()
    }
    pub fn is_identity(&self) -> bool {
        self.z.iter().enumerate().all(|(a, row)| row.iter().enumerate().all(|(b, &x)| x == u32::from(a == b)))
    }
    pub fn is_symmetric(&self) -> bool {
        let n = self.rank();
        (0..n).all(|a| (0..n).all(|b| self.z[a][b] == self.z[b][a]))
    }
    pub fn is_permutation(&self) -> bool {
        let n = self.rank();
        self.z.iter().all(|row| row.iter().filter(|&&x| x == 1).count() == 1 && row.iter().all(|&x| x <= 1))
            && (0..n).all(|b| self.z.iter().filter(|row| row[b] == 1).count() == 1)
    }
    pub fn transpose(&self) -> IntMatrix {
        transpose(&self.z)
    }
}

pub fn transpose(z: &IntMatrix) -> IntMatrix {
    let n = z.len();
    (0..n).map(|a| (0..n).map(|b| z[b][a]).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|a| (0..n).map(|b| u32::from(a == b)).collect()).collect()
}

/// Solves `(YZ - ZY)_{a,b} = 0` coordinate-wise in the cyclotomic power
/// basis over the allowed entries. Exact data uses fraction-free
/// elimination; numeric-only data is eliminated in floating point and
/// rationally reconstructed.
pub fn commutant_basis(md: &ModularData, pattern: &SparsityPattern) -> Result<CommutantBasis, CommutantError> {
    let n = md.rank();
    let entries = pattern.entries().to_vec();
    let index = |a: usize, b: usize| entries.binary_search(&(a, b)).ok();
    let basis = match md.exact() {
        Some(ex) => {
            let y = &ex.y;
            let m = md.conductor();
            let rows: Vec<Vec<BigInt>> = (0..n)
                .into_par_iter()
                .flat_map_iter(|a| (0..n).map(move |b| (a, b)))
                .flat_map_iter(|(a, b)| {
                    let mut coeffs: Vec<Cyclotomic> = vec![Cyclotomic::zero(); entries.len()];
                    for i in 0..n {
                        // Y_{a,i} Z_{i,b}
                        if let Some(k) = index(i, b) {
                            coeffs[k] += &y[a][i];
                        }
                        // -Z_{a,j} Y_{j,b}
                        if let Some(k) = index(a, i) {
                            coeffs[k] -= &y[i][b];
                        }
                    }
                    let coords: Vec<Vec<Rational>> = coeffs.iter().map(|c| c.promote(m).coordinates()).collect();
                    let deg = crate::cyclo::euler_phi(m) as usize;
                    (0..deg)
                        .map(|j| linalg::integer_row(&coords.iter().map(|c| c[j].clone()).collect::<Vec<_>>()))
                        .filter(|r| r.iter().any(|x| !x.is_zero()))
                        .collect::<Vec<_>>()
                })
                .collect();
            let (vectors, pivots) = linalg::kernel(rows, entries.len());
            CommutantBasis { n, entries, vectors, pivots, exact: true }
        }
        None => {
            let y = &md.numeric().y;
            let mut rows = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    let mut coeffs = vec![Complex64::new(0.0, 0.0); entries.len()];
                    for i in 0..n {
                        if let Some(k) = index(i, b) {
                            coeffs[k] += y[a][i];
                        }
                        if let Some(k) = index(a, i) {
                            coeffs[k] -= y[i][b];
                        }
                    }
                    rows.push(coeffs.iter().map(|c| c.re).collect());
                    rows.push(coeffs.iter().map(|c| c.im).collect());
                }
            }
            let (kern, pivots) = linalg::kernel_f64(rows, entries.len(), 1e-9);
            let vectors = kern
                .iter()
                .map(|v| v.iter().map(|&x| linalg::rationalize(x, 1_000_000)).collect())
                .collect();
            CommutantBasis { n, entries, vectors, pivots, exact: false }
        }
    };
    for k in 0..basis.dim() {
        if let Some((row, col)) = commutation_defect(md, &basis.matrix(k)) {
            return Err(CommutantError::BasisVerification { index: k, row, col });
        }
    }
    Ok(basis)
}

/// First `(a, b)` where `YB != BY`, for a rational matrix `B`.
fn commutation_defect(md: &ModularData, b: &[Vec<Rational>]) -> Option<(usize, usize)> {
    let n = md.rank();
    match md.exact() {
        Some(ex) => {
            let y = &ex.y;
            (0..n).into_par_iter().find_map_first(|r| {
                (0..n).find(|&c| {
                    let yb: Cyclotomic = (0..n).filter(|&i| !b[i][c].is_zero()).map(|i| y[r][i].scale(&b[i][c])).sum();
                    let by: Cyclotomic = (0..n).filter(|&i| !b[r][i].is_zero()).map(|i| y[i][c].scale(&b[r][i])).sum();
                    yb != by
                })
                .map(|c| (r, c))
            })
        }
        None => {
            let y = &md.numeric().y;
            let bf: Vec<Vec<f64>> = b.iter().map(|row| row.iter().map(|x| x.to_f64().unwrap()).collect()).collect();
            let scale = md.numeric().w.max(1.0);
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).find(|&(r, c)| {
                let yb: Complex64 = (0..n).map(|i| y[r][i] * bf[i][c]).sum();
                let by: Complex64 = (0..n).map(|i| y[i][c] * bf[r][i]).sum();
                (yb - by).norm() > 1e-7 * scale
            })
        }
    }
}

/// Checks that `z` is a coupling matrix: square, non-negative, `Z_00 = 1`,
/// and commuting with Ω and Y (exactly when the data is exact).
pub fn verify_invariant(md: &ModularData, z: &[Vec<i64>]) -> Result<CouplingMatrix, Rejection> {
    let n = md.rank();
    if z.len() != n || z.iter().any(|r| r.len() != n) {
        return Err(Rejection::Shape { n });
    }
    for (a, row) in z.iter().enumerate() {
        if let Some(b) = row.iter().position(|&x| x < 0) {
            return Err(Rejection::Negative { row: a, col: b });
        }
    }
    if z[0][0] != 1 {
        return Err(Rejection::Vacuum { value: z[0][0] });
    }
    let ring = md.ring();
    for a in 0..n {
        for b in 0..n {
            if z[a][b] != 0 && ring.twist(a) != ring.twist(b) {
                return Err(Rejection::TwistCommutation { row: a, col: b });
            }
        }
    }
    let r: Vec<Vec<Rational>> = z.iter().map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
    if let Some((row, col)) = commutation_defect(md, &r) {
        return Err(Rejection::YCommutation { row, col });
    }
    let im: IntMatrix = z.iter().map(|row| row.iter().map(|&x| x as u32).collect()).collect();
    Ok(CouplingMatrix::from_matrix(im, md.is_exact()))
}

#[derive(Clone, Debug)]
pub struct EnumerationOptions {
    /// Every entry is bounded by `ceil(bound_scale · d_a d_b)`.
    pub bound_scale: Rational,
    pub node_budget: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { bound_scale: Rational::one(), node_budget: DEFAULT_NODE_BUDGET, workers: None }
    }
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub invariants: Vec<CouplingMatrix>,
    pub nodes: u64,
}

struct Search {
    k: usize,
    den: i128,
    /// `coef[k][j]`: contribution of pivot k to non-pivot entry j (scaled by den)
    coef: Vec<Vec<i128>>,
    bounds: Vec<i128>,
    /// upper bound of each non-pivot entry, scaled by den
    free_bounds: Vec<i128>,
    /// suffix sums of the minimal / maximal contribution of pivots `k..`
    min_rem: Vec<Vec<i128>>,
    max_rem: Vec<Vec<i128>>,
    weight_pivot: Vec<f64>,
    weight_free: Vec<f64>,
    weight_limit: f64,
    budget: u64,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Search {
    fn prune(&self, depth: usize, partial: &[i128], assigned_weight: f64) -> bool {
        let next = depth + 1;
        let mut lower = assigned_weight;
        for (j, &p) in partial.iter().enumerate() {
            if p + self.max_rem[next][j] < 0 {
                return true;
            }
            let lo = p + self.min_rem[next][j];
            if lo > self.free_bounds[j] {
                return true;
            }
            if lo > 0 {
                lower += self.weight_free[j] * lo as f64 / self.den as f64;
            }
        }
        lower > self.weight_limit
    }

    fn dfs(&self, depth: usize, xs: &mut Vec<i128>, partial: &mut Vec<i128>, weight: f64, out: &mut Vec<Vec<i128>>) {
        if self.stop.load(Ordering::Relaxed) {
            return;
        }
        if depth == self.k {
            if partial.iter().zip(&self.free_bounds).all(|(&p, &b)| p >= 0 && p <= b && p % self.den == 0) {
                out.push(xs.clone());
            }
            return;
        }
        for v in 0..=self.bounds[depth] {
            if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
                self.stop.store(true, Ordering::Relaxed);
                return;
            }
            for (p, c) in partial.iter_mut().zip(&self.coef[depth]) {
                *p += v * c;
            }
            let w = weight + self.weight_pivot[depth] * v as f64;
            if !self.prune(depth, partial, w) {
                xs.push(v);
                self.dfs(depth + 1, xs, partial, w, out);
                xs.pop();
            }
            for (p, c) in partial.iter_mut().zip(&self.coef[depth]) {
                *p -= v * c;
            }
        }
    }
}

/// Depth-first search over pivot values with `Z_00 = 1`, completing each
/// candidate through the span. Output is verified, deduplicated and sorted
/// row-major lexicographically.
pub fn enumerate_invariants(
    md: &ModularData,
    basis: &CommutantBasis,
    opts: &EnumerationOptions,
) -> Result<Enumeration, CommutantError> {
    let k = basis.dim();
    if k == 0 || basis.pivots[0] != 0 || basis.entries[0] != (0, 0) {
        return Err(CommutantError::VacuumNotPivot);
    }
    let den = basis
        .vectors
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let to_i128 = |x: &Rational| -> Result<i128, CommutantError> {
        (x * Rational::from_integer(den.clone())).to_integer().to_i128().ok_or(CommutantError::Overflow)
    };
    let den_i = den.to_i128().ok_or(CommutantError::Overflow)?;
    let free: Vec<usize> = (0..basis.entries.len()).filter(|e| !basis.pivots.contains(e)).collect();
    let mut coef = Vec::with_capacity(k);
    for v in &basis.vectors {
        coef.push(free.iter().map(|&e| to_i128(&v[e])).collect::<Result<Vec<_>, _>>()?);
    }
    let dims = &md.numeric().dims;
    let scale = opts.bound_scale.to_f64().unwrap_or(1.0);
    let dd = |(a, b): (usize, usize)| dims[a] * dims[b];
    let entry_bound = |e: usize| (scale * dd(basis.entries[e]) - 1e-9).ceil().max(0.0) as i128;
    let bounds: Vec<i128> = basis.pivots.iter().enumerate().map(|(i, &p)| if i == 0 { 1 } else { entry_bound(p) }).collect();
    let free_bounds: Vec<i128> = free.iter().map(|&e| entry_bound(e).saturating_mul(den_i)).collect();
    let mut min_rem = vec![vec![0i128; free.len()]; k + 1];
    let mut max_rem = vec![vec![0i128; free.len()]; k + 1];
    for d in (0..k).rev() {
        let lo_v = if d == 0 { 1 } else { 0 };
        for j in 0..free.len() {
            let c = coef[d][j];
            let (a, b) = (c * lo_v, c * bounds[d]);
            min_rem[d][j] = min_rem[d + 1][j] + a.min(b);
            max_rem[d][j] = max_rem[d + 1][j] + a.max(b);
        }
    }
    let w = md.numeric().w;
    let search = Search {
        k,
        den: den_i,
        weight_pivot: basis.pivots.iter().map(|&p| dd(basis.entries[p])).collect(),
        weight_free: free.iter().map(|&e| dd(basis.entries[e])).collect(),
        weight_limit: w * w * scale * scale * (1.0 + 1e-9),
        coef,
        bounds,
        free_bounds,
        min_rem,
        max_rem,
        budget: opts.node_budget,
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    };

    let run = || -> Vec<Vec<i128>> {
        // Z_00 = 1 fixes the first pivot
        let mut partial: Vec<i128> = search.coef[0].clone();
        let weight0 = search.weight_pivot[0];
        search.nodes.fetch_add(1, Ordering::Relaxed);
        if search.prune(0, &partial, weight0) {
            return Vec::new();
        }
        if k == 1 {
            let mut out = Vec::new();
            search.dfs(1, &mut vec![1], &mut partial, weight0, &mut out);
            return out;
        }
        // split the second pivot across workers
        let branches: Vec<i128> = (0..=search.bounds[1]).collect();
        let per_branch: Vec<Vec<Vec<i128>>> = branches
            .par_iter()
            .map(|&v| {
                let mut out = Vec::new();
                if search.nodes.fetch_add(1, Ordering::Relaxed) >= search.budget {
                    search.stop.store(true, Ordering::Relaxed);
                    return out;
                }
                let mut p = partial.clone();
                for (x, c) in p.iter_mut().zip(&search.coef[1]) {
                    *x += v * c;
                }
                let w1 = weight0 + search.weight_pivot[1] * v as f64;
                if !search.prune(1, &p, w1) {
                    search.dfs(2, &mut vec![1, v], &mut p, w1, &mut out);
                }
                out
            })
            .collect();
        partial.clear();
        per_branch.into_iter().flatten().collect()
    };
    let solutions = match opts.workers {
        Some(nw) => rayon::ThreadPoolBuilder::new()
            .num_threads(nw.max(1))
            .build()
            .map_err(|e| CommutantError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };

    let n = md.rank();
    let mut mats: Vec<IntMatrix> = solutions
        .iter()
        .map(|xs| {
            let mut z = vec![vec![0u32; n]; n];
            for (e, &(a, b)) in basis.entries.iter().enumerate() {
                let acc: i128 = xs.iter().zip(&basis.vectors).map(|(x, v)| x * to_i128(&v[e]).unwrap()).sum();
                z[a][b] = (acc / den_i) as u32;
            }
            z
        })
        .collect();
    mats.sort();
    mats.dedup();
    let mut invariants = Vec::with_capacity(mats.len());
    for z in mats {
        let zi: Vec<Vec<i64>> = z.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        invariants.push(verify_invariant(md, &zi).map_err(CommutantError::CandidateRejected)?);
    }
    let nodes = search.nodes.load(Ordering::Relaxed);
    if search.stop.load(Ordering::Relaxed) {
        return Err(CommutantError::BudgetExhausted { budget: opts.node_budget, partial: invariants });
    }
    Ok(Enumeration { invariants, nodes })
}

/// Twist pattern, basis and enumeration in one call.
pub fn find_invariants(md: &ModularData, opts: &EnumerationOptions) -> Result<(CommutantBasis, Enumeration), CommutantError> {
    let pattern = twist_sparsity(md.ring());
    let basis = commutant_basis(md, &pattern)?;
    let en = enumerate_invariants(md, &basis, opts)?;
    Ok((basis, en))
}
