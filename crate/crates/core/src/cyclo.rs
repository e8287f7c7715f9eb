//! Exact arithmetic in cyclotomic fields.
//!
//! An element of Q(ζ_m) is stored in the reduced power basis
//! `1, ζ, …, ζ^{φ(m)-1}`, where every power `ζ^e` with `e ≥ φ(m)` has been
//! rewritten modulo the m-th cyclotomic polynomial. Elements with different
//! conductors are promoted to the lcm before any binary operation.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// Arbitrary precision rational number, always kept in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("invalid rational literal {0:?}: expected \"p/q\" or \"p\"")]
    BadRational(String),
    #[error("conductor must be positive")]
    ZeroConductor,
}

/// Parses `"p/q"` or `"p"` (optional sign). Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, CycloError> {
    let t = s.trim();
    if t.is_empty() || t.contains('.') {
        return Err(CycloError::BadRational(s.to_string()));
    }
    let r = Rational::from_str(t).map_err(|_| CycloError::BadRational(s.to_string()))?;
    Ok(r)
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Reduces `h` into `[0, 1)`.
pub fn frac_part(h: &Rational) -> Rational {
    h - h.floor()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(mut n: u32) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Coefficients of the m-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    let divisors: Vec<u32> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    let mut poly = vec![1i64];
    // multiply first so every division below is exact
    for &d in &divisors {
        if mobius(m / d) == 1 {
            let mut next = vec![0i64; poly.len() + d as usize];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d as usize] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if mobius(m / d) == -1 {
            // divide by x^d - 1
            let d = d as usize;
            let deg = poly.len() - 1;
            let mut rem = poly.clone();
            let mut quot = vec![0i64; deg + 1 - d];
            for i in (d..=deg).rev() {
                let c = rem[i];
                quot[i - d] = c;
                rem[i] = 0;
                rem[i - d] += c;
            }
            debug_assert!(rem.iter().all(|&c| c == 0));
            poly = quot;
        }
    }
    poly
}

/// Reduced power-basis expansions of `ζ_m^e` for `e` in `0..m`.
struct ReductionTable {
    degree: usize,
    powers: Vec<Vec<(u32, i64)>>,
}

impl ReductionTable {
    fn build(m: u32) -> Self {
        let phi = cyclotomic_polynomial(m);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut current = vec![0i64; degree];
        current[0] = 1;
        for _ in 0..m {
            powers.push(
                current
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| (i as u32, c))
                    .collect(),
            );
            // multiply by x and reduce the overflowing x^degree
            let top = current[degree - 1];
            for i in (1..degree).rev() {
                current[i] = current[i - 1];
            }
            current[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    current[i] = current[i]
                        .checked_sub(top.checked_mul(phi[i]).expect("reduction overflow"))
                        .expect("reduction overflow");
                }
            }
        }
        ReductionTable { degree, powers }
    }
}

fn table(m: u32) -> Arc<ReductionTable> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<ReductionTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = cache.read().unwrap().get(&m) {
        return t.clone();
    }
    let t = Arc::new(ReductionTable::build(m));
    cache.write().unwrap().entry(m).or_insert(t).clone()
}

/// Element of Q(ζ_m) in the reduced power basis.
///
/// `terms` is sorted by exponent, every exponent is below φ(m), and no
/// coefficient is zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "CyclotomicRepr", try_from = "CyclotomicRepr")]
pub struct Cyclotomic {
    conductor: u32,
    terms: Vec<(u32, Rational)>,
}

/// Wire form: `{"conductor": m, "terms": [[e, "p/q"], …]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CyclotomicRepr {
    pub conductor: u32,
    pub terms: Vec<(u32, String)>,
}

impl From<Cyclotomic> for CyclotomicRepr {
    fn from(c: Cyclotomic) -> Self {
        CyclotomicRepr {
            conductor: c.conductor,
            terms: c.terms.iter().map(|(e, r)| (*e, format_rational(r))).collect(),
        }
    }
}

impl TryFrom<CyclotomicRepr> for Cyclotomic {
    type Error = CycloError;

    fn try_from(r: CyclotomicRepr) -> Result<Self, Self::Error> {
        if r.conductor == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let mut acc = vec![Rational::zero(); r.conductor as usize];
        for (e, s) in &r.terms {
            acc[(*e % r.conductor) as usize] += parse_rational(s)?;
        }
        Ok(Cyclotomic::reduce_dense(r.conductor, acc))
    }
}

/// Complex embedding together with an a-priori bound on its absolute error.
#[derive(Clone, Copy, Debug)]
pub struct Embedding {
    pub value: Complex64,
    pub error_bound: f64,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic { conductor: 1, terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cyclotomic { conductor: 1, terms: vec![(0, r)] }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `ζ_m^e`.
    pub fn zeta(m: u32, e: i64) -> Self {
        assert!(m > 0, "conductor must be positive");
        let e = e.rem_euclid(m as i64) as usize;
        let t = table(m);
        Cyclotomic {
            conductor: m,
            terms: t.powers[e]
                .iter()
                .map(|&(j, c)| (j, Rational::from_integer(BigInt::from(c))))
                .collect(),
        }
    }

    /// `e^{2πih}` for rational `h`, with conductor equal to the reduced
    /// denominator of `h`.
    pub fn root_of_unity(h: &Rational) -> Self {
        let h = frac_part(h);
        let q = h.denom().to_u32().expect("root of unity order exceeds u32");
        let p = h.numer().to_i64().expect("numerator exceeds i64");
        Self::zeta(q, p)
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn coefficient(&self, e: u32) -> Rational {
        self.terms
            .iter()
            .find(|(x, _)| *x == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Dense coordinate vector of length φ(conductor).
    pub fn coordinates(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); euler_phi(self.conductor) as usize];
        for (e, c) in &self.terms {
            v[*e as usize] = c.clone();
        }
        v
    }

    pub fn from_coordinates(conductor: u32, coords: &[Rational]) -> Self {
        Cyclotomic {
            conductor,
            terms: coords
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e as u32, c.clone()))
                .collect(),
        }
    }

    /// Reduce a dense vector indexed by exponent mod `m`.
    fn reduce_dense(m: u32, acc: Vec<Rational>) -> Self {
        let t = table(m);
        let mut out = vec![Rational::zero(); t.degree];
        for (e, c) in acc.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pw = &t.powers[e];
            if pw.len() == 1 && pw[0].1 == 1 {
                out[pw[0].0 as usize] += c;
                continue;
            }
            for &(j, k) in pw {
                out[j as usize] += &c * Rational::from_integer(BigInt::from(k));
            }
        }
        Self::from_coordinates(m, &out)
    }

    /// Re-express in Q(ζ_M); requires `conductor | M`.
    pub fn promote(&self, m: u32) -> Self {
        assert!(m.is_multiple_of(self.conductor), "cannot promote Q(ζ_{}) into Q(ζ_{m})", self.conductor);
        if m == self.conductor {
            return self.clone();
        }
        if self.terms.iter().all(|(e, _)| *e == 0) {
            return Cyclotomic { conductor: m, terms: self.terms.clone() };
        }
        let step = m / self.conductor;
        let mut acc = vec![Rational::zero(); m as usize];
        for (e, c) in &self.terms {
            acc[(e * step) as usize] += c;
        }
        Self::reduce_dense(m, acc)
    }

    /// Try to express in Q(ζ_m); `None` if the element does not lie there.
    pub fn demote(&self, m: u32) -> Option<Self> {
        let big = lcm(self.conductor, m);
        let me = self.promote(big);
        let step = big / m;
        // the reduced basis of Q(ζ_m) embeds as powers ζ_big^{step·e}; solve
        // for coordinates and confirm
        let deg = euler_phi(m) as usize;
        let images: Vec<Vec<Rational>> =
            (0..deg).map(|e| Self::zeta(big, (e as u32 * step) as i64).coordinates()).collect();
        let rows = euler_phi(big) as usize;
        let a: Vec<Vec<Rational>> =
            (0..rows).map(|r| (0..deg).map(|c| images[c][r].clone()).collect()).collect();
        let sol = linalg::solve_consistent(&a, &me.coordinates())?;
        let candidate = Self::from_coordinates(m, &sol);
        (candidate.promote(big) == me).then_some(candidate)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.conductor == other.conductor {
            return (self.clone(), other.clone());
        }
        let m = lcm(self.conductor, other.conductor);
        (self.promote(m), other.promote(m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// The rational value, when the element lies in Q.
    pub fn rational_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.conductor;
        if self.terms.iter().all(|(e, _)| *e == 0) {
            return self.clone();
        }
        let mut acc = vec![Rational::zero(); m as usize];
        for (e, c) in &self.terms {
            acc[((m - e) % m) as usize] += c;
        }
        Self::reduce_dense(m, acc)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(k)))
    }

    /// Multiply by `ζ_M^shift` where `M` is a multiple of the conductor.
    pub fn mul_zeta(&self, m: u32, shift: i64) -> Self {
        let big = lcm(self.conductor, m);
        let me = self.promote(big);
        let s = shift.rem_euclid(m as i64) as u32 * (big / m);
        let mut acc = vec![Rational::zero(); big as usize];
        for (e, c) in &me.terms {
            acc[((e + s) % big) as usize] += c;
        }
        Self::reduce_dense(big, acc)
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Exact quotient `self / other`, by solving the multiplication-by-`other`
    /// system over Q in basis coordinates. `None` when `other` is zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if let Some(r) = other.rational_value() {
            return Some(self.scale(&(Rational::one() / r)));
        }
        let (x, y) = self.common(other);
        let m = x.conductor;
        let deg = euler_phi(m) as usize;
        let columns: Vec<Vec<Rational>> =
            (0..deg).map(|j| y.mul_zeta(m, j as i64).coordinates()).collect();
        let a: Vec<Vec<Rational>> =
            (0..deg).map(|r| (0..deg).map(|c| columns[c][r].clone()).collect()).collect();
        let q = Self::from_coordinates(m, &linalg::solve(&a, &x.coordinates())?);
        debug_assert!(&q * &y == x);
        Some(q)
    }

    pub fn embed(&self) -> Embedding {
        let m = self.conductor as f64;
        let mut value = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for (e, c) in &self.terms {
            let coeff = c.to_f64().unwrap_or(f64::NAN);
            let angle = std::f64::consts::TAU * (*e as f64) / m;
            value += Complex64::new(angle.cos(), angle.sin()) * coeff;
            mass += coeff.abs();
        }
        let n = self.terms.len().max(1) as f64;
        Embedding { value, error_bound: mass * f64::EPSILON * (4.0 + 2.0 * n) }
    }

    /// Evaluation at `ζ_m = e^{2πi/m}` in double precision. Only 53 bits are
    /// supported; larger requests are served at 53 bits and the returned
    /// error bound reflects that.
    pub fn embed_complex(&self, precision_bits: u32) -> Embedding {
        debug_assert!(precision_bits >= 53);
        self.embed()
    }

    pub fn to_complex(&self) -> Complex64 {
        self.embed().value
    }

    /// Real part of the embedding; intended for real elements.
    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.terms == other.terms;
        }
        let (a, b) = self.common(other);
        a.terms == b.terms
    }
}

impl Eq for Cyclotomic {}

impl Default for Cyclotomic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

fn merge(a: &Cyclotomic, b: &Cyclotomic, negate_b: bool) -> Cyclotomic {
    let (a, b) = a.common(b);
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let take_a = j >= b.terms.len() || (i < a.terms.len() && a.terms[i].0 < b.terms[j].0);
        let take_b = i >= a.terms.len() || (j < b.terms.len() && b.terms[j].0 < a.terms[i].0);
        if take_a {
            terms.push(a.terms[i].clone());
            i += 1;
        } else if take_b {
            let (e, c) = &b.terms[j];
            terms.push((*e, if negate_b { -c } else { c.clone() }));
            j += 1;
        } else {
            let c = if negate_b { &a.terms[i].1 - &b.terms[j].1 } else { &a.terms[i].1 + &b.terms[j].1 };
            if !c.is_zero() {
                terms.push((a.terms[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    Cyclotomic { conductor: a.conductor, terms }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &'a Cyclotomic) -> Cyclotomic {
        merge(self, rhs, false)
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &'a Cyclotomic) -> Cyclotomic {
        merge(self, rhs, true)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &'a Cyclotomic) -> Cyclotomic {
        if self.is_zero() || rhs.is_zero() {
            return Cyclotomic::zero();
        }
        if let Some(r) = self.rational_value() {
            return rhs.scale(&r);
        }
        if let Some(r) = rhs.rational_value() {
            return self.scale(&r);
        }
        let (a, b) = self.common(rhs);
        let m = a.conductor;
        let mut acc = vec![Rational::zero(); m as usize];
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                acc[((e1 + e2) % m) as usize] += c1 * c2;
            }
        }
        Cyclotomic::reduce_dense(m, acc)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &'a Cyclotomic) -> Cyclotomic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Cyclotomic> for Cyclotomic {
    fn sub_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Cyclotomic {
    /// `3/2 + z^2 - z^5 [z=ζ8]`; rationals print without the suffix.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if let Some(r) = self.rational_value() {
            return write!(f, "{}", format_rational(&r));
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match (*e, abs.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&abs))?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{}*z", format_rational(&abs))?,
                (_, true) => write!(f, "z^{e}")?,
                (_, false) => write!(f, "{}*z^{e}", format_rational(&abs))?,
            }
        }
        write!(f, " [z=ζ{}]", self.conductor)
    }
}
