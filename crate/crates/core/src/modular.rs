//! Statistics data of a fusion ring with twists: the monodromy matrix Y,
//! the phases Ω, the Gauss sum z, the central charge, and the derived
//! numeric S and T matrices.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{frac_part, format_rational, Cyclotomic, Rational};
use crate::fusion::{FusionError, FusionRing};
use crate::linalg::rationalize;

pub type CycloMatrix = Vec<Vec<Cyclotomic>>;
pub type ComplexMatrix = Vec<Vec<Complex64>>;

const NUMERIC_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularError {
    #[error("inconsistent data: Σ_μ Y_{{{label},μ}} d_μ = {value} is neither w·d_{label} nor 0")]
    DegeneracyDichotomy { label: usize, value: String },
    #[error("operation needs a non-degenerate braiding (degenerate labels: {0:?})")]
    Degenerate(Vec<usize>),
    #[error("operation needs exact dimensions")]
    NotExact,
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

/// Exactly represented statistics data, all at the ring's global conductor.
#[derive(Clone, Debug)]
pub struct ExactData {
    pub y: CycloMatrix,
    pub omega: Vec<Cyclotomic>,
    pub z: Cyclotomic,
    pub w: Cyclotomic,
}

#[derive(Clone, Debug)]
pub struct NumericData {
    pub dims: Vec<f64>,
    pub y: ComplexMatrix,
    pub omega: Vec<Complex64>,
    pub z: Complex64,
    pub w: f64,
    /// `Y / |z|`, absent when `z = 0`.
    pub s: Option<ComplexMatrix>,
    /// Diagonal of `e^{-iπc/12} Ω`, absent when the central charge is.
    pub t: Option<Vec<Complex64>>,
}

#[derive(Clone, Debug)]
pub struct ModularData {
    ring: FusionRing,
    exact: Option<ExactData>,
    numeric: NumericData,
    central_charge: Option<Rational>,
    t_charge: Option<Rational>,
    degenerates: BTreeSet<usize>,
    nondegenerate: bool,
    warnings: Vec<String>,
}

impl ModularData {
    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }
    pub fn rank(&self) -> usize {
        self.ring.rank()
    }
    pub fn conductor(&self) -> u32 {
        self.ring.conductor()
    }
    pub fn exact(&self) -> Option<&ExactData> {
        self.exact.as_ref()
    }
    pub fn exact_or_err(&self) -> Result<&ExactData, ModularError> {
        self.exact.as_ref().ok_or(ModularError::NotExact)
    }
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
    pub fn numeric(&self) -> &NumericData {
        &self.numeric
    }
    /// Representative in `[0, 8)`.
    pub fn central_charge(&self) -> Option<&Rational> {
        self.central_charge.as_ref()
    }
    /// The central charge used in the phase of T: the ring's hint when it
    /// agrees with the computed value mod 8, otherwise the `[0, 8)` value.
    pub fn t_charge(&self) -> Option<&Rational> {
        self.t_charge.as_ref()
    }
    pub fn degenerates(&self) -> &BTreeSet<usize> {
        &self.degenerates
    }
    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    /// Exact dimensions (present whenever the data is exact).
    pub fn dims(&self) -> Option<&[Cyclotomic]> {
        self.ring.dims()
    }

    /// Default rounding bound for the central charge.
    pub fn default_max_denominator(&self) -> u64 {
        24 * self.conductor() as u64
    }

    /// Nearest rational (denominator ≤ `max_den`) to `4 arg(z)/π` mod 8,
    /// accepted only if `z·e^{-iπc/4}` is exactly real and positive.
    pub fn compute_central_charge(&self, max_den: u64) -> Option<Rational> {
        match &self.exact {
            Some(ex) => central_charge(&ex.z, max_den),
            None => central_charge_numeric(self.numeric.z, max_den),
        }
    }

    /// Rehren's criterion: λ is degenerate iff `Σ_μ Y_{λ,μ} Y_{μ,0} = w d_λ`;
    /// every other label must give 0.
    pub fn detect_degenerates(&self) -> Result<BTreeSet<usize>, ModularError> {
        match &self.exact {
            Some(ex) => detect_exact(&self.ring, ex),
            None => detect_numeric(&self.numeric),
        }
    }

    pub fn verify_statistics_axioms(&self) -> AxiomReport {
        let mut checks = Vec::new();
        let n = self.rank();
        if let Some(ex) = &self.exact {
            checks.extend(exact_axiom_checks(&self.ring, ex));
        }
        if self.nondegenerate {
            if let (Some(s), Some(t)) = (&self.numeric.s, &self.numeric.t) {
                let ts: ComplexMatrix = (0..n).map(|a| (0..n).map(|b| t[a] * s[a][b]).collect()).collect();
                let tsts = matmul(&ts, &ts);
                let tstst: ComplexMatrix = tsts.iter().map(|row| row.iter().zip(t).map(|(x, tb)| x * tb).collect()).collect();
                let dev = max_dev(&tstst, s);
                checks.push(Check::numeric("TSTST = S", dev));
                let s2 = matmul(s, s);
                let c: ComplexMatrix = (0..n)
                    .map(|a| (0..n).map(|b| Complex64::new(f64::from(u8::from(b == self.ring.dual(a))), 0.0)).collect())
                    .collect();
                checks.push(Check::numeric("S² = C", max_dev(&s2, &c)));
            }
        }
        AxiomReport { checks }
    }

    /// Recovers fusion coefficients through the Verlinde formula and
    /// compares them with the ring.
    pub fn verlinde_check(&self) -> Result<VerlindeReport, ModularError> {
        if !self.nondegenerate {
            return Err(ModularError::Degenerate(self.degenerates.iter().copied().collect()));
        }
        let s = self.numeric.s.as_ref().ok_or_else(|| ModularError::Degenerate(vec![]))?;
        let n = self.rank();
        let mut max_deviation = 0.0f64;
        let mut mismatches = Vec::new();
        let mut recovered = vec![vec![vec![0u32; n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v: Complex64 = (0..n).map(|r| s[a][r] * s[b][r] * s[c][r].conj() / s[0][r]).sum();
                    let rounded = v.re.round();
                    max_deviation = max_deviation.max((v - Complex64::new(rounded, 0.0)).norm());
                    let got = rounded.max(0.0) as u32;
                    recovered[a][b][c] = got;
                    if got != self.ring.fusion(a, b, c) {
                        mismatches.push((a, b, c, self.ring.fusion(a, b, c), got));
                    }
                }
            }
        }
        Ok(VerlindeReport { max_deviation, mismatches, recovered })
    }
}

type Mismatch = (usize, usize, usize, u32, u32);

#[derive(Clone, Debug)]
pub struct VerlindeReport {
    pub max_deviation: f64,
    /// `(a, b, c, ring value, recovered value)`
    pub mismatches: Vec<Mismatch>,
    pub recovered: Vec<Vec<Vec<u32>>>,
}

impl VerlindeReport {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub exact: bool,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    fn exact(name: &str, failure: Option<String>) -> Self {
        Check { name: name.into(), exact: true, passed: failure.is_none(), detail: failure }
    }

    fn numeric(name: &str, deviation: f64) -> Self {
        Check {
            name: name.into(),
            exact: false,
            passed: deviation < NUMERIC_TOL,
            detail: Some(format!("max deviation {deviation:.3e}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<Check>,
}

impl AxiomReport {
    pub fn exact_failures(&self) -> usize {
        self.checks.iter().filter(|c| c.exact && !c.passed).count()
    }
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Exact `Y`, `Ω`, `z` and `w`; `None` without exact dimensions.
pub fn exact_data(ring: &FusionRing) -> Option<ExactData> {
    let n = ring.rank();
    let m = ring.conductor();
    let dims = ring.dims()?;
    let exps: Vec<i64> = ring.twists().iter().map(|h| twist_exponent(h, m)).collect();
    let y: CycloMatrix = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    ring.products(a, b)
                        .iter()
                        .map(|&(r, mult)| dims[r].scale_int(mult as i64).mul_zeta(m, exps[a] + exps[b] - exps[r]))
                        .sum()
                })
                .collect()
        })
        .collect();
    let omega: Vec<Cyclotomic> = (0..n).map(|a| ring.omega(a)).collect();
    let z: Cyclotomic = (0..n).map(|a| (&dims[a] * &dims[a]).mul_zeta(m, exps[a])).sum();
    let w: Cyclotomic = dims.iter().map(|d| d * d).sum();
    Some(ExactData { y, omega, z, w })
}

/// Y symmetric, conjugation under duality, vacuum column and the Gauss
/// relation, all exact.
pub fn exact_axiom_checks(ring: &FusionRing, ex: &ExactData) -> Vec<Check> {
    let n = ring.rank();
    let mut checks = Vec::new();
    let dims = ring.dims().expect("exact data has dims");
    let y = &ex.y;
    let sym = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).find(|&(a, b)| y[a][b] != y[b][a]);
    checks.push(Check::exact("Y symmetric", sym.map(|(a, b)| format!("Y_{{{a},{b}}} != Y_{{{b},{a}}}"))));
    let conj = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| y[ring.dual(a)][b] != y[a][b].conj());
    checks.push(Check::exact(
        "Y conjugation under duality",
        conj.map(|(a, b)| format!("Y_{{dual({a}),{b}}} != conj Y_{{{a},{b}}}")),
    ));
    let vac = (0..n).find(|&a| y[a][0] != dims[a]);
    checks.push(Check::exact("Y vacuum column = d", vac.map(|a| format!("Y_{{{a},0}} != d_{a}"))));
    let lhs = omega_y_omega_y_omega(ring, y);
    let bad = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| lhs[a][b] != &ex.z * &y[a][b]);
    checks.push(Check::exact("ΩYΩYΩ = zY", bad.map(|(a, b)| format!("entry ({a},{b}) differs"))));
    checks
}

/// Builds the statistics data. Rings without exact dimensions get a
/// numeric-only result built from Perron-Frobenius dimensions.
pub fn compute_modular_data(ring: &FusionRing) -> Result<ModularData, ModularError> {
    let n = ring.rank();
    let omega_num: Vec<Complex64> = ring.twists().iter().map(phase).collect();
    let (exact, dims_num, y_num, z_num, w_num) = match ring.dims() {
        Some(dims) => {
            let ex = exact_data(ring).expect("ring has exact dims");
            let y_num = ex.y.iter().map(|row| row.iter().map(Cyclotomic::to_complex).collect()).collect();
            let dn = dims.iter().map(Cyclotomic::to_f64).collect();
            let (zn, wn) = (ex.z.to_complex(), ex.w.to_f64());
            (Some(ex), dn, y_num, zn, wn)
        }
        None => {
            let d = ring.pf_dims_numeric()?;
            let y: ComplexMatrix = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            ring.products(a, b)
                                .iter()
                                .map(|&(r, mult)| omega_num[a] * omega_num[b] / omega_num[r] * (d[r] * mult as f64))
                                .sum()
                        })
                        .collect()
                })
                .collect();
            let z = (0..n).map(|a| omega_num[a] * d[a] * d[a]).sum();
            let w = d.iter().map(|x| x * x).sum();
            (None, d, y, z, w)
        }
    };
    let mut md = ModularData {
        ring: ring.clone(),
        exact,
        numeric: NumericData { dims: dims_num, y: y_num, omega: omega_num, z: z_num, w: w_num, s: None, t: None },
        central_charge: None,
        t_charge: None,
        degenerates: BTreeSet::new(),
        nondegenerate: false,
        warnings: Vec::new(),
    };
    md.degenerates = md.detect_degenerates()?;
    md.nondegenerate = md.degenerates.len() == 1;
    md.central_charge = md.compute_central_charge(md.default_max_denominator());
    if md.central_charge.is_none() && md.numeric.z.norm() > NUMERIC_TOL {
        md.warnings.push("central charge could not be verified as a rational number".into());
    }
    md.t_charge = md.central_charge.as_ref().map(|c| match ring.central_charge_hint() {
        Some(hint) if frac_part(&((hint - c) / Rational::from_integer(8.into()))) == Rational::from_integer(0.into()) => hint.clone(),
        Some(hint) => {
            md.warnings.push(format!("central charge hint {} disagrees with {} mod 8", format_rational(hint), format_rational(c)));
            c.clone()
        }
        None => c.clone(),
    });
    let zabs = md.numeric.z.norm();
    if zabs > NUMERIC_TOL {
        md.numeric.s = Some(md.numeric.y.iter().map(|row| row.iter().map(|x| x / zabs).collect()).collect());
    }
    if let Some(c) = &md.t_charge {
        let pre = Complex64::from_polar(1.0, -std::f64::consts::PI * c.to_f64().unwrap() / 12.0);
        md.numeric.t = Some(md.numeric.omega.iter().map(|w| w * pre).collect());
    }
    Ok(md)
}

/// `h·m` as an exponent of `ζ_m`; `m` must be a multiple of the twist
/// denominator.
pub fn twist_exponent(h: &Rational, m: u32) -> i64 {
    let e = frac_part(h) * Rational::from_integer(m.into());
    debug_assert!(e.is_integer());
    e.to_integer().to_i64().unwrap()
}

fn phase(h: &Rational) -> Complex64 {
    let x = frac_part(h).to_f64().unwrap();
    Complex64::from_polar(1.0, std::f64::consts::TAU * x)
}

pub fn central_charge(z: &Cyclotomic, max_den: u64) -> Option<Rational> {
    if z.is_zero() {
        return None;
    }
    let c = central_charge_numeric(z.to_complex(), max_den)?;
    // exact confirmation: z e^{-iπc/4} must be real and positive
    let rotated = z * &Cyclotomic::root_of_unity(&(-&c / Rational::from_integer(8.into())));
    (rotated.is_real() && rotated.to_f64() > 0.0).then_some(c)
}

fn central_charge_numeric(z: Complex64, max_den: u64) -> Option<Rational> {
    if z.norm() < NUMERIC_TOL {
        return None;
    }
    let raw = (4.0 * z.arg() / std::f64::consts::PI).rem_euclid(8.0);
    let c = rationalize(raw, max_den);
    let c = frac_part(&(c / Rational::from_integer(8.into()))) * Rational::from_integer(8.into());
    let check = Complex64::from_polar(z.norm(), std::f64::consts::PI * c.to_f64().unwrap() / 4.0);
    ((check - z).norm() < 1e-9 * z.norm().max(1.0)).then_some(c)
}

fn detect_exact(ring: &FusionRing, ex: &ExactData) -> Result<BTreeSet<usize>, ModularError> {
    let dims = ring.dims().expect("exact data has dims");
    let n = ring.rank();
    let mut out = BTreeSet::new();
    for a in 0..n {
        let s: Cyclotomic = (0..n).map(|b| &ex.y[a][b] * &ex.y[b][0]).sum();
        if s.is_zero() {
            continue;
        }
        if s == &ex.w * &dims[a] {
            out.insert(a);
        } else {
            return Err(ModularError::DegeneracyDichotomy { label: a, value: s.to_string() });
        }
    }
    Ok(out)
}

fn detect_numeric(num: &NumericData) -> Result<BTreeSet<usize>, ModularError> {
    let n = num.dims.len();
    let tol = 1e-8 * num.w.max(1.0) * num.w.max(1.0);
    let mut out = BTreeSet::new();
    for a in 0..n {
        let s: Complex64 = (0..n).map(|b| num.y[a][b] * num.y[b][0]).sum();
        if s.norm() < tol {
            continue;
        }
        if (s - num.w * num.dims[a]).norm() < tol {
            out.insert(a);
        } else {
            return Err(ModularError::DegeneracyDichotomy { label: a, value: format!("{s}") });
        }
    }
    Ok(out)
}

/// `(ΩYΩYΩ)_{a,b} = ω_a ω_b Σ_c ω_c Y_{a,c} Y_{c,b}`.
pub fn omega_y_omega_y_omega(ring: &FusionRing, y: &CycloMatrix) -> CycloMatrix {
    let m = ring.conductor();
    let exps: Vec<i64> = ring.twists().iter().map(|h| twist_exponent(h, m)).collect();
    let n = y.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    let s: Cyclotomic = (0..n).map(|c| (&y[a][c] * &y[c][b]).mul_zeta(m, exps[c])).sum();
                    s.mul_zeta(m, exps[a] + exps[b])
                })
                .collect()
        })
        .collect()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn max_dev(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Y · Y†` computed exactly.
pub fn y_y_dagger(y: &CycloMatrix) -> CycloMatrix {
    let n = y.len();
    (0..n)
        .into_par_iter()
        .map(|a| (0..n).map(|b| (0..n).map(|c| &y[a][c] * &y[b][c].conj()).sum()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::rat;
    use crate::fusion::{builtin_cyclic, builtin_so_level1, builtin_su2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn so16_matches_kac_peterson_matrices() {
        let md = compute_modular_data(&builtin_so_level1(16).unwrap()).unwrap();
        let s = md.numeric().s.as_ref().unwrap();
        let expected = [[1., 1., 1., 1.], [1., 1., -1., -1.], [1., -1., 1., -1.], [1., -1., -1., 1.]];
        for a in 0..4 {
            for b in 0..4 {
                assert!((s[a][b] - c(expected[a][b] / 2.0, 0.0)).norm() < 1e-12);
            }
        }
        let t = md.numeric().t.as_ref().unwrap();
        let pre = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0);
        for (x, sign) in t.iter().zip([1., -1., 1., 1.]) {
            assert!((x - pre * sign).norm() < 1e-12);
        }
        let ex = md.exact().unwrap();
        assert_eq!(ex.z, Cyclotomic::from_integer(2));
        assert_eq!(ex.w, Cyclotomic::from_integer(4));
        assert_eq!(md.central_charge(), Some(&rat(0, 1)));
        assert_eq!(md.t_charge(), Some(&rat(8, 1)));
    }

    #[test]
    fn so32_t_prefactor() {
        let md = compute_modular_data(&builtin_so_level1(32).unwrap()).unwrap();
        let t = md.numeric().t.as_ref().unwrap();
        let pre = Complex64::from_polar(1.0, -4.0 * std::f64::consts::PI / 3.0);
        assert!((t[0] - pre).norm() < 1e-12);
        assert!((t[1] + pre).norm() < 1e-12);
    }

    #[test]
    fn trivial_ring() {
        let md = compute_modular_data(&builtin_cyclic(1, &[rat(0, 1)]).unwrap()).unwrap();
        let ex = md.exact().unwrap();
        assert_eq!(ex.y, vec![vec![Cyclotomic::one()]]);
        assert!(ex.z.is_one());
        assert_eq!(md.central_charge(), Some(&rat(0, 1)));
        assert_eq!(md.degenerates().iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn central_charges() {
        let md = compute_modular_data(&builtin_su2(1)).unwrap();
        assert_eq!(md.central_charge(), Some(&rat(1, 1)));
        for k in 1..=16i64 {
            let md = compute_modular_data(&builtin_su2(k as u32)).unwrap();
            let expected = crate::cyclo::frac_part(&rat(3 * k, 8 * (k + 2))) * rat(8, 1);
            assert_eq!(md.central_charge(), Some(&expected), "SU(2)_{k}");
        }
        let md = compute_modular_data(&builtin_cyclic(2, &[rat(0, 1), rat(0, 1)]).unwrap()).unwrap();
        assert_eq!(md.exact().unwrap().z, Cyclotomic::from_integer(2));
        assert_eq!(md.central_charge(), Some(&rat(0, 1)));
    }

    #[test]
    fn degenerate_labels() {
        let so = compute_modular_data(&builtin_so_level1(16).unwrap()).unwrap();
        assert_eq!(so.degenerates().iter().copied().collect::<Vec<_>>(), vec![0]);
        assert!(so.is_nondegenerate());
        let z2 = compute_modular_data(&builtin_cyclic(2, &[rat(0, 1), rat(0, 1)]).unwrap()).unwrap();
        assert_eq!(z2.degenerates().iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert!(!z2.is_nondegenerate());
        let semion = compute_modular_data(&builtin_cyclic(2, &[rat(0, 1), rat(1, 4)]).unwrap()).unwrap();
        assert!(semion.is_nondegenerate());
        let yy = y_y_dagger(&semion.exact().unwrap().y);
        assert_eq!(yy, vec![vec![Cyclotomic::from_integer(2), Cyclotomic::zero()], vec![Cyclotomic::zero(), Cyclotomic::from_integer(2)]]);
    }

    #[test]
    fn axioms_hold_for_builtins() {
        for ring in [builtin_so_level1(16).unwrap(), builtin_su2(2), builtin_su2(5)] {
            let md = compute_modular_data(&ring).unwrap();
            let rep = md.verify_statistics_axioms();
            assert!(rep.all_passed(), "{}: {:?}", ring.name(), rep);
            assert_eq!(rep.checks.len(), 6);
        }
    }

    #[test]
    fn corrupted_y_is_caught() {
        let mut md = compute_modular_data(&builtin_su2(2)).unwrap();
        let ex = md.exact.as_mut().unwrap();
        ex.y[1][2] = -&ex.y[1][2];
        let rep = md.verify_statistics_axioms();
        assert!(rep.exact_failures() >= 1);
        assert!(!rep.checks[0].passed || !rep.checks[3].passed);
    }

    #[test]
    fn verlinde() {
        let md = compute_modular_data(&builtin_so_level1(16).unwrap()).unwrap();
        let rep = md.verlinde_check().unwrap();
        assert!(rep.matches());
        assert!(rep.max_deviation < 1e-12);
        let rep = compute_modular_data(&builtin_su2(4)).unwrap().verlinde_check().unwrap();
        assert!(rep.matches() && rep.max_deviation < 1e-9);
        let z2 = compute_modular_data(&builtin_cyclic(2, &[rat(0, 1), rat(0, 1)]).unwrap()).unwrap();
        assert!(matches!(z2.verlinde_check(), Err(ModularError::Degenerate(_))));
    }

    #[test]
    fn y_rebuilt_from_verlinde_coefficients() {
        for ring in [builtin_su2(3), builtin_su2(6), builtin_so_level1(16).unwrap()] {
            let md = compute_modular_data(&ring).unwrap();
            let rep = md.verlinde_check().unwrap();
            let num = md.numeric();
            let n = ring.rank();
            for a in 0..n {
                for b in 0..n {
                    let y: Complex64 = (0..n)
                        .map(|r| num.omega[a] * num.omega[b] / num.omega[r] * (rep.recovered[a][b][r] as f64 * num.dims[r]))
                        .sum();
                    assert!((y - num.y[a][b]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn degeneracy_matches_unitarity() {
        let rings = [
            builtin_so_level1(16).unwrap(),
            builtin_su2(3),
            builtin_cyclic(2, &[rat(0, 1), rat(0, 1)]).unwrap(),
            builtin_cyclic(4, &[rat(0, 1), rat(1, 8), rat(1, 2), rat(1, 8)]).unwrap(),
            builtin_cyclic(4, &[rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap(),
        ];
        for ring in rings {
            let md = compute_modular_data(&ring).unwrap();
            let ex = md.exact().unwrap();
            let yy = y_y_dagger(&ex.y);
            let n = ring.rank();
            let unitary = (0..n).all(|a| (0..n).all(|b| yy[a][b] == if a == b { ex.w.clone() } else { Cyclotomic::zero() }));
            assert_eq!(unitary, md.is_nondegenerate(), "{}", ring.name());
            // |z|² = w iff non-degenerate, when z ≠ 0
            if !ex.z.is_zero() {
                assert_eq!((md.numeric().z.norm_sqr() - md.numeric().w).abs() < 1e-9, md.is_nondegenerate());
            }
        }
    }

    #[test]
    fn numeric_only_mode() {
        let exact = builtin_su2(3);
        let ring = exact.with_dims(None).unwrap();
        let md = compute_modular_data(&ring).unwrap();
        assert!(!md.is_exact());
        assert!(md.is_nondegenerate());
        let reference = compute_modular_data(&exact).unwrap();
        assert!(max_dev(&md.numeric().y, &reference.numeric().y) < 1e-9);
        assert_eq!(md.central_charge(), reference.central_charge());
    }
}
