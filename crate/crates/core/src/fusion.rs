//! Fusion-ring data model, axiom validation and built-in example rings.

use std::fmt;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclo::{frac_part, format_rational, lcm, rat, Cyclotomic, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("ring needs at least one label")]
    Empty,
    #[error("{what} has length {got}, expected {expected}")]
    Length { what: &'static str, got: usize, expected: usize },
    #[error("fusion entry ({0}, {1}, {2}) is out of range")]
    IndexOutOfRange(usize, usize, usize),
    #[error("dual of label {0} is out of range")]
    DualOutOfRange(usize),
    #[error("Perron-Frobenius iteration did not converge after {iterations} iterations")]
    PfNoConvergence { iterations: usize },
    #[error("invalid generator parameters: {0}")]
    BadParameters(String),
    #[error("twists are not symmetric under λ ↦ -λ: h_{label} = {h} but h_{dual} = {h_dual}")]
    TwistSymmetry { label: usize, dual: usize, h: String, h_dual: String },
}

/// Finite fusion ring with twists and (optionally) exact quantum dimensions.
///
/// All exact dimensions are stored at the ring's global conductor, the lcm
/// of the twist denominators and the dimension conductors.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionRing {
    name: String,
    names: Vec<String>,
    /// `fusion[(a * n + b) * n + c] = N_{a,b}^c`
    fusion: Vec<u32>,
    products: Vec<Vec<(usize, u32)>>,
    dual: Vec<usize>,
    twists: Vec<Rational>,
    dims: Option<Vec<Cyclotomic>>,
    conductor: u32,
    central_charge_hint: Option<Rational>,
}

impl FusionRing {
    /// Builds a ring from sparse fusion entries `(a, b, c, N_{a,b}^c)`.
    /// Only structural checks happen here; axioms are checked by
    /// [`FusionRing::validate`].
    pub fn new(
        name: impl Into<String>,
        names: Vec<String>,
        entries: &[(usize, usize, usize, u32)],
        dual: Vec<usize>,
        twists: Vec<Rational>,
        dims: Option<Vec<Cyclotomic>>,
    ) -> Result<Self, FusionError> {
        let n = names.len();
        if n == 0 {
            return Err(FusionError::Empty);
        }
        for (what, got) in [("dual", dual.len()), ("twists", twists.len())] {
            if got != n {
                return Err(FusionError::Length { what, got, expected: n });
            }
        }
        if let Some(d) = &dims {
            if d.len() != n {
                return Err(FusionError::Length { what: "dims", got: d.len(), expected: n });
            }
        }
        if let Some(&bad) = dual.iter().find(|&&d| d >= n) {
            return Err(FusionError::DualOutOfRange(bad));
        }
        let mut fusion = vec![0u32; n * n * n];
        for &(a, b, c, m) in entries {
            if a >= n || b >= n || c >= n {
                return Err(FusionError::IndexOutOfRange(a, b, c));
            }
            fusion[(a * n + b) * n + c] += m;
        }
        let products = (0..n * n)
            .map(|ab| (0..n).filter_map(|c| Some((c, fusion[ab * n + c])).filter(|x| x.1 > 0)).collect())
            .collect();
        let twists: Vec<Rational> = twists.iter().map(frac_part).collect();
        let mut conductor = twists
            .iter()
            .fold(1u32, |acc, h| lcm(acc, h.denom().to_u32().expect("twist denominator exceeds u32")));
        if let Some(d) = &dims {
            conductor = d.iter().fold(conductor, |acc, x| lcm(acc, x.conductor()));
        }
        let dims = dims.map(|d| d.iter().map(|x| x.promote(conductor)).collect());
        Ok(FusionRing {
            name: name.into(),
            names,
            fusion,
            products,
            dual,
            twists,
            dims,
            conductor,
            central_charge_hint: None,
        })
    }

    /// Central charge representative used for the phase of T (not reduced
    /// mod 8).
    pub fn with_central_charge_hint(mut self, c: Rational) -> Self {
        self.central_charge_hint = Some(c);
        self
    }

    pub fn with_dims(&self, dims: Option<Vec<Cyclotomic>>) -> Result<Self, FusionError> {
        let entries = self.fusion_entries();
        let mut r = FusionRing::new(self.name.clone(), self.names.clone(), &entries, self.dual.clone(), self.twists.clone(), dims)?;
        r.central_charge_hint = self.central_charge_hint.clone();
        Ok(r)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn rank(&self) -> usize {
        self.names.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }
    pub fn duals(&self) -> &[usize] {
        &self.dual
    }
    pub fn twist(&self, a: usize) -> &Rational {
        &self.twists[a]
    }
    pub fn twists(&self) -> &[Rational] {
        &self.twists
    }
    pub fn dims(&self) -> Option<&[Cyclotomic]> {
        self.dims.as_deref()
    }
    pub fn conductor(&self) -> u32 {
        self.conductor
    }
    pub fn central_charge_hint(&self) -> Option<&Rational> {
        self.central_charge_hint.as_ref()
    }

    pub fn fusion(&self, a: usize, b: usize, c: usize) -> u32 {
        let n = self.rank();
        self.fusion[(a * n + b) * n + c]
    }

    /// Non-zero `(c, N_{a,b}^c)` pairs.
    pub fn products(&self, a: usize, b: usize) -> &[(usize, u32)] {
        &self.products[a * self.rank() + b]
    }

    pub fn fusion_entries(&self) -> Vec<(usize, usize, usize, u32)> {
        let n = self.rank();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for &(c, m) in self.products(a, b) {
                    out.push((a, b, c, m));
                }
            }
        }
        out
    }

    /// `ω_a = e^{2πi h_a}` at the global conductor.
    pub fn omega(&self, a: usize) -> Cyclotomic {
        Cyclotomic::root_of_unity(&self.twists[a]).promote(self.conductor)
    }

    /// Checks every ring axiom exactly; an empty report means valid.
    pub fn validate(&self) -> ValidationReport {
        let n = self.rank();
        let mut v = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let d = u32::from(a == b);
                if self.fusion(0, a, b) != d || self.fusion(a, 0, b) != d {
                    v.push(Violation::Unit { label: a, other: b });
                }
            }
        }
        for a in 0..n {
            if self.dual[self.dual[a]] != a {
                v.push(Violation::DualNotInvolution { label: a });
            }
        }
        if self.dual[0] != 0 {
            v.push(Violation::VacuumNotSelfDual);
        }
        for a in 0..n {
            for b in 0..n {
                let expected = u32::from(b == self.dual[a]);
                if self.fusion(a, b, 0) != expected {
                    v.push(Violation::Duality { label: a, other: b, got: self.fusion(a, b, 0), expected });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let x = self.fusion(a, b, c);
                    let ad = self.dual[a];
                    let bd = self.dual[b];
                    if x != self.fusion(ad, c, b) || x != self.fusion(c, bd, a) {
                        v.push(Violation::Frobenius { a, b, c });
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs: u64 = self.products(a, b).iter().map(|&(r, m)| m as u64 * self.fusion(r, c, d) as u64).sum();
                        let rhs: u64 = self.products(b, c).iter().map(|&(r, m)| m as u64 * self.fusion(a, r, d) as u64).sum();
                        if lhs != rhs {
                            v.push(Violation::Associativity { a, b, c, d, lhs, rhs });
                        }
                    }
                }
            }
        }
        if !self.twists[0].is_zero() {
            v.push(Violation::VacuumTwist { h: format_rational(&self.twists[0]) });
        }
        for a in 0..n {
            if self.twists[a] != self.twists[self.dual[a]] {
                v.push(Violation::TwistDual { label: a });
            }
        }
        if let Some(dims) = &self.dims {
            if !dims[0].is_one() {
                v.push(Violation::VacuumDimension);
            }
            for a in 0..n {
                if dims[a] != dims[self.dual[a]] {
                    v.push(Violation::DimensionDual { label: a });
                }
                if !dims[a].is_real() {
                    v.push(Violation::DimensionNotReal { label: a });
                } else if dims[a].to_f64() < 1.0 - 1e-9 {
                    v.push(Violation::DimensionTooSmall { label: a, value: dims[a].to_f64() });
                }
            }
            for a in 0..n {
                for b in a..n {
                    let lhs = &dims[a] * &dims[b];
                    let rhs: Cyclotomic = self.products(a, b).iter().map(|&(c, m)| dims[c].scale_int(m as i64)).sum();
                    if lhs != rhs {
                        v.push(Violation::DimensionCharacter { a, b });
                    }
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// Perron-Frobenius dimensions from the positive matrix `Σ_λ N_λ`.
    pub fn pf_dims_numeric(&self) -> Result<Vec<f64>, FusionError> {
        const MAX_ITER: usize = 10_000;
        let n = self.rank();
        // all N_λ commute with T = Σ_λ N_λ, whose Perron vector v gives d = v / v_0
        let mut t = vec![0.0f64; n * n];
        for a in 0..n {
            for b in 0..n {
                for &(c, m) in self.products(a, b) {
                    t[b * n + c] += m as f64;
                }
            }
        }
        let mut v = vec![1.0f64; n];
        for it in 0..MAX_ITER {
            let mut next = vec![0.0f64; n];
            for b in 0..n {
                for c in 0..n {
                    next[c] += v[b] * t[b * n + c];
                }
            }
            let norm = next.iter().cloned().fold(0.0, f64::max);
            if norm <= 0.0 || !norm.is_finite() {
                return Err(FusionError::PfNoConvergence { iterations: it });
            }
            next.iter_mut().for_each(|x| *x /= norm);
            let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            if delta < 1e-15 {
                let v0 = v[0];
                return Ok(v.iter().map(|x| x / v0).collect());
            }
        }
        Err(FusionError::PfNoConvergence { iterations: MAX_ITER })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Unit { label: usize, other: usize },
    DualNotInvolution { label: usize },
    VacuumNotSelfDual,
    Duality { label: usize, other: usize, got: u32, expected: u32 },
    Frobenius { a: usize, b: usize, c: usize },
    Associativity { a: usize, b: usize, c: usize, d: usize, lhs: u64, rhs: u64 },
    VacuumTwist { h: String },
    TwistDual { label: usize },
    VacuumDimension,
    DimensionDual { label: usize },
    DimensionNotReal { label: usize },
    DimensionTooSmall { label: usize, value: f64 },
    DimensionCharacter { a: usize, b: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unit { label, other } => write!(f, "unit: N_{{0,{label}}}^{other} or N_{{{label},0}}^{other} is not δ"),
            Violation::DualNotInvolution { label } => write!(f, "duality: dual(dual({label})) != {label}"),
            Violation::VacuumNotSelfDual => write!(f, "duality: dual(0) != 0"),
            Violation::Duality { label, other, got, expected } => {
                write!(f, "duality: N_{{{label},{other}}}^0 = {got}, expected {expected}")
            }
            Violation::Frobenius { a, b, c } => write!(f, "frobenius: N_{{{a},{b}}}^{c} breaks Frobenius symmetry"),
            Violation::Associativity { a, b, c, d, lhs, rhs } => {
                write!(f, "associativity: ({a}·{b})·{c} and {a}·({b}·{c}) differ at {d} ({lhs} vs {rhs})")
            }
            Violation::VacuumTwist { h } => write!(f, "twist: h_0 = {h}, expected 0"),
            Violation::TwistDual { label } => write!(f, "twist: h_{label} != h of its dual"),
            Violation::VacuumDimension => write!(f, "dimension: d_0 != 1"),
            Violation::DimensionDual { label } => write!(f, "dimension: d_{label} != d of its dual"),
            Violation::DimensionNotReal { label } => write!(f, "dimension: d_{label} is not real"),
            Violation::DimensionTooSmall { label, value } => write!(f, "dimension: d_{label} = {value} < 1"),
            Violation::DimensionCharacter { a, b } => write!(f, "dimension: d_{a} d_{b} != Σ_c N_{{{a},{b}}}^c d_c"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// SU(2) at level `k`: truncated Clebsch-Gordan fusion,
/// `h_λ = λ(λ+2)/(4(k+2))` and `d_λ = [λ+1]_q` with `q = e^{iπ/(k+2)}`.
pub fn builtin_su2(k: u32) -> FusionRing {
    let n = (k + 1) as usize;
    let kk = k as usize;
    let mut entries = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let lo = a.abs_diff(b);
            let hi = (a + b).min(2 * kk - a - b);
            for c in (lo..=hi).step_by(2) {
                entries.push((a, b, c, 1));
            }
        }
    }
    let level = k as i64 + 2;
    let twists = (0..n as i64).map(|l| rat(l * (l + 2), 4 * level)).collect();
    let root_order = 2 * level as u32;
    let dims = (0..n as i64)
        .map(|l| (0..=l).map(|j| Cyclotomic::zeta(root_order, l - 2 * j)).sum())
        .collect();
    let names = (0..n).map(|l| l.to_string()).collect();
    FusionRing::new(format!("SU(2)_{k}"), names, &entries, (0..n).collect(), twists, Some(dims))
        .expect("SU(2) data is well formed")
        .with_central_charge_hint(rat(3 * k as i64, level))
}

/// SO(16ℓ) at level 1: labels `0, v, s, c` with Z2×Z2 fusion and twists
/// `(0, 1/2, ℓ, ℓ)`.
pub fn builtin_so_level1(n: u32) -> Result<FusionRing, FusionError> {
    if n == 0 || !n.is_multiple_of(16) {
        return Err(FusionError::BadParameters(format!("SO(n)_1 needs n a positive multiple of 16, got {n}")));
    }
    let ell = (n / 16) as i64;
    // 0 = (0,0), v = (1,1), s = (1,0), c = (0,1)
    let group = [(0u8, 0u8), (1, 1), (1, 0), (0, 1)];
    let index = |g: (u8, u8)| group.iter().position(|&x| x == g).unwrap();
    let mut entries = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            let c = index((group[a].0 ^ group[b].0, group[a].1 ^ group[b].1));
            entries.push((a, b, c, 1));
        }
    }
    let twists = vec![rat(0, 1), rat(1, 2), rat(ell, 1), rat(ell, 1)];
    let names = ["0", "v", "s", "c"].iter().map(|s| s.to_string()).collect();
    Ok(FusionRing::new(format!("SO({n})_1"), names, &entries, vec![0, 1, 2, 3], twists, Some(vec![Cyclotomic::one(); 4]))?
        .with_central_charge_hint(rat(8 * ell, 1)))
}

/// Group ring of Z_n with the given twists and unit dimensions.
pub fn builtin_cyclic(n: u32, twists: &[Rational]) -> Result<FusionRing, FusionError> {
    let n = n as usize;
    if n == 0 {
        return Err(FusionError::BadParameters("Z_n needs n ≥ 1".into()));
    }
    if twists.len() != n {
        return Err(FusionError::Length { what: "twists", got: twists.len(), expected: n });
    }
    let twists: Vec<Rational> = twists.iter().map(frac_part).collect();
    if !twists[0].is_zero() {
        return Err(FusionError::BadParameters(format!("h_0 must be 0, got {}", format_rational(&twists[0]))));
    }
    for a in 0..n {
        let d = (n - a) % n;
        if twists[a] != twists[d] {
            return Err(FusionError::TwistSymmetry {
                label: a,
                dual: d,
                h: format_rational(&twists[a]),
                h_dual: format_rational(&twists[d]),
            });
        }
    }
    let mut entries = Vec::new();
    for a in 0..n {
        for b in 0..n {
            entries.push((a, b, (a + b) % n, 1));
        }
    }
    let names = (0..n).map(|a| a.to_string()).collect();
    let dual = (0..n).map(|a| (n - a) % n).collect();
    FusionRing::new(format!("Z_{n}"), names, &entries, dual, twists, Some(vec![Cyclotomic::one(); n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtins_validate() {
        for k in 0..=16 {
            let r = builtin_su2(k);
            assert_eq!(r.rank(), k as usize + 1);
            let rep = r.validate();
            assert!(rep.is_valid(), "SU(2)_{k}: {:?}", rep.violations);
        }
        for n in [16, 32, 48] {
            assert!(builtin_so_level1(n).unwrap().validate().is_valid());
        }
        assert!(builtin_cyclic(1, &[rat(0, 1)]).unwrap().validate().is_valid());
        assert!(builtin_cyclic(2, &[rat(0, 1), rat(0, 1)]).unwrap().validate().is_valid());
        assert!(builtin_cyclic(2, &[rat(0, 1), rat(1, 4)]).unwrap().validate().is_valid());
    }

    #[test]
    fn su2_low_levels() {
        let r = builtin_su2(1);
        assert_eq!(r.twists(), &[rat(0, 1), rat(1, 4)]);
        assert!(r.dims().unwrap().iter().all(Cyclotomic::is_one));
        let r = builtin_su2(2);
        assert_eq!(r.twist(1), &rat(3, 16));
        let sqrt2 = Cyclotomic::zeta(8, 1) + Cyclotomic::zeta(8, -1);
        assert_eq!(r.dims().unwrap()[1], sqrt2);
        let r = builtin_su2(0);
        assert_eq!(r.rank(), 1);
        assert!(r.validate().is_valid());
    }

    #[test]
    fn so16_data() {
        let r = builtin_so_level1(16).unwrap();
        assert_eq!(r.twists(), &[rat(0, 1), rat(1, 2), rat(0, 1), rat(0, 1)]);
        // s · c = v
        assert_eq!(r.products(2, 3), &[(1, 1)]);
        assert_eq!(r.duals(), &[0, 1, 2, 3]);
        assert_eq!(builtin_so_level1(32).unwrap().central_charge_hint(), Some(&rat(16, 1)));
        assert!(builtin_so_level1(24).is_err());
        assert!(builtin_so_level1(0).is_err());
    }

    #[test]
    fn corrupted_unit_row_is_reported() {
        let r = builtin_so_level1(16).unwrap();
        let mut entries = r.fusion_entries();
        // v·v = 2·0 instead of 0
        for e in entries.iter_mut() {
            if e.0 == 1 && e.1 == 1 {
                e.3 = 2;
            }
        }
        let bad = FusionRing::new("bad", r.names().to_vec(), &entries, r.duals().to_vec(), r.twists().to_vec(), None).unwrap();
        let rep = bad.validate();
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Duality { label: 1, other: 1, .. })));
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Associativity { .. })));
    }

    #[test]
    fn cyclic_twists_must_be_symmetric() {
        assert!(matches!(
            builtin_cyclic(3, &[rat(0, 1), rat(1, 3), rat(0, 1)]),
            Err(FusionError::TwistSymmetry { .. })
        ));
        assert!(builtin_cyclic(0, &[]).is_err());
    }

    #[test]
    fn perron_frobenius_dims() {
        let d = builtin_so_level1(16).unwrap().pf_dims_numeric().unwrap();
        assert!(d.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let d = builtin_su2(2).pf_dims_numeric().unwrap();
        assert!((d[1] - 2f64.sqrt()).abs() < 1e-12 && (d[2] - 1.0).abs() < 1e-12);
        assert_eq!(builtin_cyclic(1, &[rat(0, 1)]).unwrap().pf_dims_numeric().unwrap(), vec![1.0]);
        for k in 1..=16 {
            let r = builtin_su2(k);
            let pf = r.pf_dims_numeric().unwrap();
            for (x, d) in pf.iter().zip(r.dims().unwrap()) {
                assert!((x - d.to_f64()).abs() < 1e-9, "SU(2)_{k}");
            }
        }
    }

    proptest! {
        #[test]
        fn dims_are_characters(k in 1u32..12, a in 0usize..13, b in 0usize..13) {
            let r = builtin_su2(k);
            let (a, b) = (a % r.rank(), b % r.rank());
            let d = r.dims().unwrap();
            let rhs: Cyclotomic = r.products(a, b).iter().map(|&(c, m)| d[c].scale_int(m as i64)).sum();
            prop_assert_eq!(&d[a] * &d[b], rhs);
        }
    }
}
