//! Taxonomy of coupling matrices: type I block factorizations, parent
//! invariants, block bijections, extended modular data and global indices.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::commutant::{CouplingMatrix, IntMatrix};
use crate::cyclo::{lcm, Cyclotomic, Rational};
use crate::linalg;
use crate::modular::{central_charge, twist_exponent, y_y_dagger, CycloMatrix, ModularData};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("classification needs exact modular data")]
    NotExact,
    #[error("zero denominator in global index {0}")]
    ZeroDenominator(&'static str),
    #[error("branching rows are linearly dependent: {rows:?}")]
    RankDeficient { rows: Vec<usize> },
    #[error("repeated branching row {row} occurs {count} times; only pairs can be resolved")]
    UnsupportedMultiplicity { row: usize, count: usize },
    #[error("repeated branching rows need non-degenerate data to be resolved")]
    DegenerateFixedPoint,
    #[error("no exact resolution found for repeated branching rows {rows:?}")]
    NoResolution { rows: (usize, usize) },
}

/// Branching coefficients of one type I factorization `Z = BᵀB`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingData {
    /// `t × n`, row 0 is the vacuum block.
    pub b: IntMatrix,
    pub block_twists: Vec<Rational>,
    pub block_dims: Vec<Cyclotomic>,
}

impl BranchingData {
    pub fn block_count(&self) -> usize {
        self.b.len()
    }

    /// `Σ_τ b_{τ,λ} b_{τ',μ}` with `τ' = map(τ)`.
    pub fn pair_product(&self, other: &BranchingData, map: &[usize]) -> IntMatrix {
        let n = self.b.first().map_or(0, Vec::len);
        let mut z = vec![vec![0u32; n]; n];
        for (t, &s) in map.iter().enumerate() {
            for a in 0..n {
                if self.b[t][a] == 0 {
                    continue;
                }
                for c in 0..n {
                    z[a][c] += self.b[t][a] * other.b[s][c];
                }
            }
        }
        z
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalIndices {
    pub w: Cyclotomic,
    pub w_plus: Cyclotomic,
    pub w_alpha: Cyclotomic,
    pub w_zero: Cyclotomic,
}

impl GlobalIndices {
    /// `1 ≤ w_0 ≤ w_+ ≤ w_α ≤ w` numerically and `w_0 w_α = w_+²` exactly.
    pub fn check(&self) -> (bool, bool) {
        let tol = 1e-9;
        let v = [1.0, self.w_zero.to_f64(), self.w_plus.to_f64(), self.w_alpha.to_f64(), self.w.to_f64()];
        let ordered = v.windows(2).all(|p| p[0] <= p[1] + tol * p[1].max(1.0));
        let identity = &self.w_zero * &self.w_alpha == &self.w_plus * &self.w_plus;
        (ordered, identity)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedModularData {
    pub y_ext: CycloMatrix,
    pub twists: Vec<Rational>,
    pub z0: Cyclotomic,
    pub checks: Vec<ExactCheck>,
    pub consistent: bool,
    /// Pairs of identical branching rows whose splitting was fixed from
    /// unitarity and the Gauss relation.
    pub resolved_pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Diagonal,
    Permutation,
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "type_ii")]
    TypeII,
    Heterotic,
    Unresolved,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Diagonal => "diagonal",
            Kind::Permutation => "permutation",
            Kind::TypeI => "type I",
            Kind::TypeII => "type II",
            Kind::Heterotic => "heterotic",
            Kind::Unresolved => "unresolved",
        }
    }
}

/// Block bijection `ϑ` with `Z_{λ,μ} = Σ_τ b⁺_{τ,λ} b⁻_{ϑ(τ),μ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bijection {
    pub map: Vec<usize>,
    /// Number of bijections satisfying the constraints.
    pub solutions: usize,
    pub plus_factorization: usize,
    pub minus_factorization: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    pub permutation: Vec<usize>,
    /// `Yext_{ω(τ),ω(τ')} = Yext_{τ,τ'}` and twists preserved; `None` when the
    /// extended data could not be built.
    pub preserves_extended_data: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: Kind,
    pub is_permutation: bool,
    pub vacuum_symmetric: bool,
    pub vacuum_column: Vec<u32>,
    pub vacuum_row: Vec<u32>,
    pub factorizations: Vec<BranchingData>,
    /// Pool indices of type I matrices sharing the vacuum column / row.
    pub parents_plus: Vec<usize>,
    pub parents_minus: Vec<usize>,
    pub parent_plus: Option<usize>,
    pub parent_minus: Option<usize>,
    pub bijection: Option<Bijection>,
    pub automorphism: Option<Automorphism>,
    pub extended: Option<ExtendedModularData>,
    pub extended_minus: Option<ExtendedModularData>,
    /// Heterotic case: `Yext⁺_{τ,τ'} = Yext⁻_{ϑ(τ),ϑ(τ')}`.
    pub extended_coincide: Option<bool>,
    pub indices: GlobalIndices,
    pub trace: u64,
    pub notes: Vec<String>,
}

pub fn vacuum_profile(z: &CouplingMatrix) -> (Vec<u32>, Vec<u32>, bool) {
    let col = z.vacuum_column.clone();
    let row = z.vacuum_row.clone();
    let sym = col == row;
    (col, row, sym)
}

fn exact_dims(md: &ModularData) -> Result<&[Cyclotomic], ClassifyError> {
    md.dims().filter(|_| md.is_exact()).ok_or(ClassifyError::NotExact)
}

fn weighted(dims: &[Cyclotomic], coeffs: impl Iterator<Item = (usize, u32)>) -> Cyclotomic {
    coeffs.filter(|&(_, c)| c > 0).map(|(a, c)| dims[a].scale_int(c as i64)).sum()
}

pub fn global_indices(md: &ModularData, z: &CouplingMatrix) -> Result<GlobalIndices, ClassifyError> {
    let dims = exact_dims(md)?;
    let ex = md.exact().ok_or(ClassifyError::NotExact)?;
    let w = ex.w.clone();
    let chiral = weighted(dims, z.vacuum_column.iter().copied().enumerate());
    let alpha = weighted(dims, md.degenerates().iter().map(|&a| (a, z.vacuum_row[a])));
    let w_plus = w.checked_div(&chiral).ok_or(ClassifyError::ZeroDenominator("w_plus"))?;
    let w_alpha = w.checked_div(&alpha).ok_or(ClassifyError::ZeroDenominator("w_alpha"))?;
    let w_zero = (&w_plus * &w_plus).checked_div(&w_alpha).ok_or(ClassifyError::ZeroDenominator("w_zero"))?;
    Ok(GlobalIndices { w, w_plus, w_alpha, w_zero })
}

/// All decompositions `Z = BᵀB` over non-negative integers with
/// `b_{τ,0} = δ_{τ,0}`. Rows after the vacuum block are in decreasing
/// lexicographic order.
pub fn factorize_type_one(md: &ModularData, z: &CouplingMatrix) -> Result<Vec<BranchingData>, ClassifyError> {
    if !z.is_symmetric() {
        return Ok(Vec::new());
    }
    let dims = exact_dims(md)?;
    let n = z.rank();
    let b0 = z.vacuum_column.clone();
    let mut rest: Vec<Vec<i64>> = (0..n).map(|a| (0..n).map(|c| z.z[a][c] as i64 - (b0[a] * b0[c]) as i64).collect()).collect();
    if rest.iter().flatten().any(|&x| x < 0) {
        return Ok(Vec::new());
    }
    let mut found = BTreeSet::new();
    let mut rows = Vec::new();
    decompose(&mut rest, &mut rows, &mut found);
    let chiral = weighted(dims, b0.iter().copied().enumerate());
    let mut out = Vec::new();
    for mut extra in found {
        extra.sort_by(|a: &Vec<u32>, b| b.cmp(a));
        let mut b = vec![b0.clone()];
        b.extend(extra);
        if let Some(data) = branching_data(md, b, &chiral) {
            out.push(data);
        }
    }
    Ok(out)
}

fn branching_data(md: &ModularData, b: IntMatrix, chiral: &Cyclotomic) -> Option<BranchingData> {
    let ring = md.ring();
    let dims = ring.dims()?;
    let mut block_twists = Vec::with_capacity(b.len());
    let mut block_dims = Vec::with_capacity(b.len());
    for row in &b {
        let support: Vec<usize> = (0..row.len()).filter(|&a| row[a] > 0).collect();
        let h = ring.twist(*support.first()?).clone();
        if support.iter().any(|&a| *ring.twist(a) != h) {
            return None;
        }
        block_twists.push(h);
        block_dims.push(weighted(dims, row.iter().copied().enumerate()).checked_div(chiral)?);
    }
    Some(BranchingData { b, block_twists, block_dims })
}

fn decompose(rest: &mut Vec<Vec<i64>>, rows: &mut Vec<Vec<u32>>, found: &mut BTreeSet<Vec<Vec<u32>>>) {
    let n = rest.len();
    let Some(lead) = (1..n).find(|&a| rest[a][a] > 0) else {
        if rest.iter().flatten().all(|&x| x == 0) {
            let mut key = rows.clone();
            key.sort();
            found.insert(key);
        }
        return;
    };
    // zero diagonal before the lead forces zero rows and columns there
    if (0..lead).any(|a| rest[a].iter().any(|&x| x != 0)) {
        return;
    }
    let max_lead = (rest[lead][lead] as u64).sqrt() as u32;
    let previous = rows.last().filter(|r| r[..lead].iter().all(|&x| x == 0) && r[lead] > 0).cloned();
    for a in (1..=max_lead).rev() {
        let mut row = vec![0u32; n];
        row[lead] = a;
        let support: Vec<usize> = (lead + 1..n).filter(|&m| rest[lead][m] > 0).collect();
        extend_row(rest, rows, found, &mut row, &support, 0, lead, previous.as_deref());
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_row(
    rest: &mut Vec<Vec<i64>>,
    rows: &mut Vec<Vec<u32>>,
    found: &mut BTreeSet<Vec<Vec<u32>>>,
    row: &mut Vec<u32>,
    support: &[usize],
    i: usize,
    lead: usize,
    previous: Option<&[u32]>,
) {
    if i == support.len() {
        // rows sharing a lead appear in non-increasing order
        if previous.is_some_and(|p| row.as_slice() > p) {
            return;
        }
        let n = row.len();
        for a in 0..n {
            for c in 0..n {
                rest[a][c] -= (row[a] * row[c]) as i64;
            }
        }
        if rest.iter().flatten().all(|&x| x >= 0) {
            rows.push(row.clone());
            decompose(rest, rows, found);
            rows.pop();
        }
        for a in 0..n {
            for c in 0..n {
                rest[a][c] += (row[a] * row[c]) as i64;
            }
        }
        return;
    }
    let m = support[i];
    let lead_val = row[lead] as i64;
    let mut cap = ((rest[m][m] as u64).sqrt() as i64).min(rest[lead][m] / lead_val);
    for &p in &support[..i] {
        if row[p] > 0 {
            cap = cap.min(rest[p][m] / row[p] as i64);
        }
    }
    for v in (0..=cap.max(0)).rev() {
        row[m] = v as u32;
        extend_row(rest, rows, found, row, support, i + 1, lead, previous);
    }
    row[m] = 0;
}

/// Indices into `pool` of the type I matrices with the given vacuum column
/// (plus side) or vacuum row (minus side). The marked parent is `own` when
/// present in the list, else the canonically smallest.
pub fn find_parents(
    z: &CouplingMatrix,
    pool: &[CouplingMatrix],
    type_one: &[bool],
    own: Option<usize>,
) -> (Vec<usize>, Vec<usize>, Option<usize>, Option<usize>) {
    let plus: Vec<usize> = (0..pool.len()).filter(|&i| type_one[i] && pool[i].vacuum_column == z.vacuum_column).collect();
    let minus: Vec<usize> = (0..pool.len()).filter(|&i| type_one[i] && pool[i].vacuum_row == z.vacuum_row).collect();
    let mark = |list: &[usize]| own.filter(|o| list.contains(o)).or_else(|| list.first().copied());
    let (p, m) = (mark(&plus), mark(&minus));
    (plus, minus, p, m)
}

/// Bijections `ϑ` between the blocks of two factorizations reproducing `Z`,
/// restricted to pairs with equal twists and equal exact block dimensions.
/// Returns the first in lexicographic order and the total count.
pub fn find_block_bijection(plus: &BranchingData, minus: &BranchingData, z: &CouplingMatrix) -> Option<(Vec<usize>, usize)> {
    let t = plus.block_count();
    if t != minus.block_count() {
        return None;
    }
    let compatible: Vec<Vec<usize>> = (0..t)
        .map(|a| {
            (0..t)
                .filter(|&c| plus.block_twists[a] == minus.block_twists[c] && plus.block_dims[a] == minus.block_dims[c])
                .collect()
        })
        .collect();
    let n = z.rank();
    let mut partial = vec![vec![0u32; n]; n];
    let mut map = Vec::with_capacity(t);
    let mut used = vec![false; t];
    let mut first = None;
    let mut count = 0usize;
    bijection_dfs(plus, minus, z, &compatible, &mut partial, &mut map, &mut used, &mut first, &mut count);
    first.map(|f| (f, count))
}

#[allow(clippy::too_many_arguments)]
fn bijection_dfs(
    plus: &BranchingData,
    minus: &BranchingData,
    z: &CouplingMatrix,
    compatible: &[Vec<usize>],
    partial: &mut IntMatrix,
    map: &mut Vec<usize>,
    used: &mut [bool],
    first: &mut Option<Vec<usize>>,
    count: &mut usize,
) {
    let tau = map.len();
    if tau == compatible.len() {
        if *partial == z.z {
            *count += 1;
            first.get_or_insert_with(|| map.clone());
        }
        return;
    }
    let n = z.rank();
    let bp = &plus.b[tau];
    for &sigma in &compatible[tau] {
        if used[sigma] {
            continue;
        }
        let bm = &minus.b[sigma];
        let fits = (0..n).all(|a| bp[a] == 0 || (0..n).all(|c| partial[a][c] + bp[a] * bm[c] <= z.z[a][c]));
        if !fits {
            continue;
        }
        for a in 0..n {
            for c in 0..n {
                partial[a][c] += bp[a] * bm[c];
            }
        }
        used[sigma] = true;
        map.push(sigma);
        bijection_dfs(plus, minus, z, compatible, partial, map, used, first, count);
        map.pop();
        used[sigma] = false;
        for a in 0..n {
            for c in 0..n {
                partial[a][c] -= bp[a] * bm[c];
            }
        }
    }
}

fn rational_matrix(b: &IntMatrix) -> Vec<Vec<Rational>> {
    b.iter().map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()).collect()
}

/// Extended `Y` from `(w/w₊)·Yext·B = B·Y`, with Gauss sum and exact
/// consistency checks. Identical branching rows (pairs only) are split
/// using `Yext·Yext† = w₀·1` and `ΩYΩYΩ = z₀Y` on the extended data.
pub fn extended_modular_data(
    md: &ModularData,
    branching: &BranchingData,
    indices: &GlobalIndices,
) -> Result<ExtendedModularData, ClassifyError> {
    let ex = md.exact().ok_or(ClassifyError::NotExact)?;
    let dims = exact_dims(md)?;
    let n = md.rank();
    let b = &branching.b;
    let t = b.len();
    let ratio = indices.w_plus.checked_div(&indices.w).ok_or(ClassifyError::ZeroDenominator("w"))?;

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0usize; t];
    for tau in 0..t {
        match classes.iter().position(|c| b[c[0]] == b[tau]) {
            Some(i) => {
                classes[i].push(tau);
                class_of[tau] = i;
            }
            None => {
                class_of[tau] = classes.len();
                classes.push(vec![tau]);
            }
        }
    }
    if let Some(c) = classes.iter().find(|c| c.len() > 2) {
        return Err(ClassifyError::UnsupportedMultiplicity { row: c[0], count: c.len() });
    }
    let reduced: IntMatrix = classes.iter().map(|c| b[c[0]].clone()).collect();
    let rb = rational_matrix(&reduced);
    let k = reduced.len();
    let gram: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..k).map(|j| rb[i].iter().zip(&rb[j]).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let Some(gram_inv) = linalg::inverse(&gram) else {
        let (_, pivots) = linalg::rref(transpose_rational(&rb));
        let rows = (0..k).filter(|i| !pivots.contains(i)).map(|i| classes[i][0]).collect();
        return Err(ClassifyError::RankDeficient { rows });
    };
    // B' Y B'ᵀ
    let by: CycloMatrix = (0..k)
        .map(|i| (0..n).map(|mu| weighted_row(&reduced[i], |l| &ex.y[l][mu])).collect())
        .collect();
    let byb: CycloMatrix = (0..k).map(|i| (0..k).map(|j| weighted_row(&reduced[j], |mu| &by[i][mu])).collect()).collect();
    let y_reduced: CycloMatrix = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let s: Cyclotomic = (0..k).filter(|&l| !gram_inv[l][j].is_zero()).map(|l| byb[i][l].scale(&gram_inv[l][j])).sum();
                    &ratio * &s
                })
                .collect()
        })
        .collect();
    let mut y_ext: CycloMatrix = (0..t)
        .map(|a| {
            (0..t)
                .map(|c| {
                    let size = classes[class_of[c]].len() as i64;
                    y_reduced[class_of[a]][class_of[c]].scale(&Rational::new(1.into(), size.into()))
                })
                .collect()
        })
        .collect();

    let twists = branching.block_twists.clone();
    let z0: Cyclotomic = (0..t)
        .map(|a| (&branching.block_dims[a] * &branching.block_dims[a]) * Cyclotomic::root_of_unity(&twists[a]))
        .sum();
    let m_big = twists.iter().fold(md.conductor(), |acc, h| lcm(acc, h.denom().to_u32().unwrap()));
    let ext_exps: Vec<i64> = twists.iter().map(|h| twist_exponent(h, m_big)).collect();

    let pairs: Vec<(usize, usize)> = classes.iter().filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect();
    if !pairs.is_empty() {
        if !md.is_nondegenerate() {
            return Err(ClassifyError::DegenerateFixedPoint);
        }
        // |z0| = z0 e^{-iπc/4}; |a| = |z0|/2
        let c0 = central_charge(&z0, 24 * m_big as u64).ok_or(ClassifyError::NoResolution { rows: pairs[0] })?;
        let abs_z0 = &z0 * &Cyclotomic::root_of_unity(&(-&c0 / Rational::from_integer(8.into())));
        let half = abs_z0.scale(&Rational::new(1.into(), 2.into()));
        let order = lcm(lcm(m_big, abs_z0.conductor()), 4);
        for &(p, q) in &pairs {
            let mut solved = false;
            for j in 0..order {
                let a = half.mul_zeta(order, j as i64);
                let mut trial = y_ext.clone();
                add_pair_term(&mut trial, p, q, &a);
                let lhs = |r: usize, s: usize| -> Cyclotomic {
                    let sum: Cyclotomic = (0..t).map(|c| (&trial[r][c] * &trial[c][s]).mul_zeta(m_big, ext_exps[c])).sum();
                    sum.mul_zeta(m_big, ext_exps[r] + ext_exps[s])
                };
                if lhs(p, p) == &z0 * &trial[p][p] && lhs(p, q) == &z0 * &trial[p][q] {
                    y_ext = trial;
                    solved = true;
                    break;
                }
            }
            if !solved {
                return Err(ClassifyError::NoResolution { rows: (p, q) });
            }
        }
    }

    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool| checks.push(ExactCheck { name: name.into(), passed });
    // (w/w₊)·Yext·B = B·Y  ⇔  Yext·B = (w₊/w)·B·Y
    let intertwines = (0..t).all(|a| {
        (0..n).all(|mu| {
            let lhs: Cyclotomic = (0..t).filter(|&c| b[c][mu] > 0).map(|c| y_ext[a][c].scale_int(b[c][mu] as i64)).sum();
            let rhs = &ratio * &weighted_row(&b[a], |l| &ex.y[l][mu]);
            lhs == rhs
        })
    });
    push("(w/w₊)·Yext·B = B·Y", intertwines);
    push("Yext symmetric", (0..t).all(|a| (0..t).all(|c| y_ext[a][c] == y_ext[c][a])));
    let twist_ok = (0..t).all(|a| (0..n).all(|l| b[a][l] == 0 || md.ring().twist(l) == &twists[a]));
    push("ω_τ b_{τ,λ} = b_{τ,λ} ω_λ", twist_ok);
    push("z₀ = (w₊/w)·z", z0 == &ratio * &ex.z);
    push("w₀·w_α = w₊²", &indices.w_zero * &indices.w_alpha == &indices.w_plus * &indices.w_plus);
    let vac_ok = (0..t).all(|a| y_ext[a][0] == branching.block_dims[a]);
    push("Yext vacuum column = block dims", vac_ok);
    let gauss = (0..t).all(|r| {
        (0..t).all(|s| {
            let sum: Cyclotomic = (0..t).map(|c| (&y_ext[r][c] * &y_ext[c][s]).mul_zeta(m_big, ext_exps[c])).sum();
            sum.mul_zeta(m_big, ext_exps[r] + ext_exps[s]) == &z0 * &y_ext[r][s]
        })
    });
    push("Ω Yext Ω Yext Ω = z₀·Yext", gauss);
    if md.is_nondegenerate() {
        let yy = y_y_dagger(&y_ext);
        let unitary = (0..t).all(|a| (0..t).all(|c| yy[a][c] == if a == c { indices.w_zero.clone() } else { Cyclotomic::zero() }));
        push("Yext·Yext† = w₀·1", unitary);
    }
    let _ = dims;
    let consistent = checks.iter().all(|c| c.passed);
    Ok(ExtendedModularData { y_ext, twists, z0, checks, consistent, resolved_pairs: pairs })
}

fn add_pair_term(y: &mut CycloMatrix, p: usize, q: usize, a: &Cyclotomic) {
    y[p][p] += a;
    y[q][q] += a;
    y[p][q] -= a;
    y[q][p] -= a;
}

fn weighted_row<'a>(row: &[u32], f: impl Fn(usize) -> &'a Cyclotomic) -> Cyclotomic {
    row.iter().enumerate().filter(|(_, &c)| c > 0).map(|(l, &c)| f(l).scale_int(c as i64)).sum()
}

fn transpose_rational(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|c| (0..rows).map(|r| m[r][c].clone()).collect()).collect()
}

/// Whether `perm` maps the extended data onto itself.
fn preserves(ext: &ExtendedModularData, perm: &[usize]) -> bool {
    let t = perm.len();
    (0..t).all(|a| ext.twists[perm[a]] == ext.twists[a])
        && (0..t).all(|a| (0..t).all(|c| ext.y_ext[perm[a]][perm[c]] == ext.y_ext[a][c]))
}

fn coincide(plus: &ExtendedModularData, minus: &ExtendedModularData, map: &[usize]) -> bool {
    let t = map.len();
    (0..t).all(|a| minus.twists[map[a]] == plus.twists[a])
        && (0..t).all(|a| (0..t).all(|c| minus.y_ext[map[a]][map[c]] == plus.y_ext[a][c]))
}

/// Classifies every member of a complete pool.
pub fn classify_all(md: &ModularData, pool: &[CouplingMatrix]) -> Result<Vec<Classification>, ClassifyError> {
    let facts = pool_factorizations(md, pool)?;
    (0..pool.len())
        .into_par_iter()
        .map(|i| classify_with(md, pool, &facts, &pool[i], Some(i)))
        .collect()
}

pub fn pool_factorizations(md: &ModularData, pool: &[CouplingMatrix]) -> Result<Vec<Vec<BranchingData>>, ClassifyError> {
    pool.par_iter().map(|z| factorize_type_one(md, z)).collect()
}

/// Classifies `z` against a pool; `own` is its index in the pool, if any.
pub fn classify_with(
    md: &ModularData,
    pool: &[CouplingMatrix],
    facts: &[Vec<BranchingData>],
    z: &CouplingMatrix,
    own: Option<usize>,
) -> Result<Classification, ClassifyError> {
    let indices = global_indices(md, z)?;
    let (vacuum_column, vacuum_row, vacuum_symmetric) = vacuum_profile(z);
    let factorizations = match own {
        Some(i) => facts[i].clone(),
        None => factorize_type_one(md, z)?,
    };
    let type_one: Vec<bool> = facts.iter().map(|f| !f.is_empty()).collect();
    let (parents_plus, parents_minus, mut parent_plus, mut parent_minus) = find_parents(z, pool, &type_one, own);
    let mut notes = Vec::new();
    let mut bijection = None;
    let mut automorphism = None;
    let mut extended = None;
    let mut extended_minus = None;
    let mut extended_coincide = None;
    let is_permutation = z.is_permutation();

    let ext_for = |parent: Option<usize>, f: &BranchingData, notes: &mut Vec<String>| -> Option<ExtendedModularData> {
        let idx = match parent {
            Some(p) => global_indices(md, &pool[p]),
            None => global_indices(md, z),
        };
        match idx.and_then(|ix| extended_modular_data(md, f, &ix)) {
            Ok(e) => Some(e),
            Err(e) => {
                notes.push(format!("extended data unavailable: {e}"));
                None
            }
        }
    };

    let kind = if z.is_identity() {
        extended = factorizations.first().and_then(|f| ext_for(None, f, &mut notes));
        Kind::Diagonal
    } else if !vacuum_symmetric {
        match search_pairs(pool, facts, &parents_plus, &parents_minus, z) {
            Some((p, m, bij)) => {
                parent_plus = Some(p);
                parent_minus = Some(m);
                let fp = &facts[p][bij.plus_factorization];
                let fm = &facts[m][bij.minus_factorization];
                extended = ext_for(Some(p), fp, &mut notes);
                extended_minus = ext_for(Some(m), fm, &mut notes);
                if let (Some(a), Some(b)) = (&extended, &extended_minus) {
                    extended_coincide = Some(coincide(a, b, &bij.map));
                }
                bijection = Some(bij);
            }
            None => notes.push("no block bijection between the parents reproduces Z".into()),
        }
        Kind::Heterotic
    } else if !factorizations.is_empty() {
        extended = ext_for(None, &factorizations[0], &mut notes);
        if factorizations.len() > 1 {
            notes.push(format!("{} distinct type I factorizations", factorizations.len()));
        }
        bijection = Some(Bijection {
            map: (0..factorizations[0].block_count()).collect(),
            solutions: 1,
            plus_factorization: 0,
            minus_factorization: 0,
        });
        parent_plus = own.or(parent_plus);
        parent_minus = own.or(parent_minus);
        Kind::TypeI
    } else {
        let common: Vec<usize> = parents_plus.iter().copied().filter(|p| parents_minus.contains(p)).collect();
        let found = common.iter().find_map(|&p| search_pairs(pool, facts, &[p], &[p], z).map(|r| (p, r)));
        match found {
            Some((p, (_, _, bij))) => {
                parent_plus = Some(p);
                parent_minus = Some(p);
                let f = &facts[p][bij.plus_factorization];
                extended = ext_for(Some(p), f, &mut notes);
                let preserves_extended_data = extended.as_ref().map(|e| preserves(e, &bij.map));
                if !md.is_nondegenerate() {
                    notes.push("automorphism verified at the level of extended modular data".into());
                }
                if facts[p].len() > 1 {
                    notes.push("parents coincide as coupling matrices but have several factorizations; whether the underlying extensions agree is not decidable from Z".into());
                }
                automorphism = Some(Automorphism { permutation: bij.map.clone(), preserves_extended_data });
                bijection = Some(bij);
                Kind::TypeII
            }
            None if is_permutation => Kind::Permutation,
            None => Kind::Unresolved,
        }
    };
    if parents_plus.is_empty() || parents_minus.is_empty() {
        notes.push("no type I parent in pool".into());
    }
    Ok(Classification {
        kind,
        is_permutation,
        vacuum_symmetric,
        vacuum_column,
        vacuum_row,
        factorizations,
        parents_plus,
        parents_minus,
        parent_plus,
        parent_minus,
        bijection,
        automorphism,
        extended,
        extended_minus,
        extended_coincide,
        indices,
        trace: z.trace,
        notes,
    })
}

/// First (plus parent, minus parent, bijection) in canonical order.
fn search_pairs(
    pool: &[CouplingMatrix],
    facts: &[Vec<BranchingData>],
    plus: &[usize],
    minus: &[usize],
    z: &CouplingMatrix,
) -> Option<(usize, usize, Bijection)> {
    let _ = pool;
    for &p in plus {
        for &m in minus {
            for (i, fp) in facts[p].iter().enumerate() {
                for (j, fm) in facts[m].iter().enumerate() {
                    if let Some((map, solutions)) = find_block_bijection(fp, fm, z) {
                        return Some((p, m, Bijection { map, solutions, plus_factorization: i, minus_factorization: j }));
                    }
                }
            }
        }
    }
    None
}

/// Integer linear relations among the pool and, for each matrix that is not
/// symmetric, whether it lies in the rational span of the symmetric ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanAnalysis {
    pub rank: usize,
    /// Primitive integer relations `Σ_i c_i Z_i = 0`, first non-zero positive.
    pub relations: Vec<Vec<i64>>,
    /// `(index, in span of the symmetric matrices)`
    pub asymmetric_in_symmetric_span: Vec<(usize, bool)>,
}

pub fn span_analysis(pool: &[CouplingMatrix]) -> SpanAnalysis {
    let vecs: Vec<Vec<Rational>> = pool
        .iter()
        .map(|c| c.z.iter().flatten().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
        .collect();
    let rank = if vecs.is_empty() { 0 } else { linalg::rank(&vecs) };
    // relations = kernel of the matrix whose columns are the pool members
    let columns: Vec<Vec<BigInt>> = if vecs.is_empty() {
        Vec::new()
    } else {
        (0..vecs[0].len()).map(|e| vecs.iter().map(|v| v[e].to_integer()).collect()).collect()
    };
    let (kernel, _) = if pool.is_empty() { (Vec::new(), Vec::new()) } else { linalg::kernel(columns, pool.len()) };
    let relations = kernel
        .iter()
        .map(|v| {
            let mut ints: Vec<i64> = linalg::integer_row(v).iter().map(|x| x.to_i64().unwrap_or(0)).collect();
            if ints.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                ints.iter_mut().for_each(|x| *x = -*x);
            }
            ints
        })
        .collect();
    let sym: Vec<Vec<Rational>> = pool.iter().zip(&vecs).filter(|(c, _)| c.is_symmetric()).map(|(_, v)| v.clone()).collect();
    let sym_rank = if sym.is_empty() { 0 } else { linalg::rank(&sym) };
    let asymmetric_in_symmetric_span = pool
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_symmetric())
        .map(|(i, _)| {
            let mut with = sym.clone();
            with.push(vecs[i].clone());
            (i, linalg::rank(&with) == sym_rank)
        })
        .collect();
    SpanAnalysis { rank, relations, asymmetric_in_symmetric_span }
}
