//! Sparse multivariate polynomials over exact rationals.
//!
//! Variables are ordered `d < l < m < parameters`, parameters lexicographically.
//! `d`, `l`, `m` stand for ∂, λ, μ.

mod parse;
mod uni;

pub use parse::{parse_poly, parse_poly_open};
pub use uni::UniPoly;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub const RESERVED: [&str; 3] = ["d", "l", "m"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Partial,
    Lambda,
    Mu,
    Param(Arc<str>),
}

impl Var {
    /// Panics on a reserved name; use [`Var::from_name`] for untrusted input.
    pub fn param(name: &str) -> Var {
        assert!(!RESERVED.contains(&name), "`{name}` is reserved");
        Var::Param(Arc::from(name))
    }

    pub fn from_name(name: &str) -> Var {
        match name {
            "d" => Var::Partial,
            "l" => Var::Lambda,
            "m" => Var::Mu,
            other => Var::Param(Arc::from(other)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Var::Partial => "d",
            Var::Lambda => "l",
            Var::Mu => "m",
            Var::Param(s) => s,
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Var::Param(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Power product with strictly increasing variables and positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(alloc::vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).cloned().collect())
    }

    /// Splits into the part over `vars` and the rest.
    pub fn split(&self, vars: &[Var]) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(w, _)| vars.contains(w));
        (Monomial(a), Monomial(b))
    }

    /// Graded order used for printing: higher degree first, then larger
    /// exponent on the earlier variable first.
    pub fn display_cmp(&self, other: &Monomial) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Less,
                    (None, Some(_)) => return Ordering::Greater,
                    (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                        Ordering::Less => return Ordering::Less,
                        Ordering::Greater => return Ordering::Greater,
                        Ordering::Equal => {
                            if ea != eb {
                                return eb.cmp(ea);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> MultiPoly {
        MultiPoly::default()
    }

    pub fn one() -> MultiPoly {
        MultiPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> MultiPoly {
        MultiPoly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> MultiPoly {
        MultiPoly::constant(rat(n))
    }

    pub fn term(c: Rational, m: Monomial) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn var(v: Var) -> MultiPoly {
        MultiPoly::term(Rational::one(), Monomial::var(v, 1))
    }

    pub fn d() -> MultiPoly {
        MultiPoly::var(Var::Partial)
    }

    pub fn l() -> MultiPoly {
        MultiPoly::var(Var::Lambda)
    }

    pub fn m() -> MultiPoly {
        MultiPoly::var(Var::Mu)
    }

    pub fn param(name: &str) -> MultiPoly {
        MultiPoly::var(Var::param(name))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(n, k)| (n.mul(m), k.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, v: &Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(v)).max()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn params(&self) -> BTreeSet<Var> {
        self.vars().into_iter().filter(Var::is_param).collect()
    }

    /// True when every variable of `self` is in `allowed`.
    pub fn only_vars(&self, allowed: &[Var]) -> bool {
        self.vars().iter().all(|v| allowed.contains(v))
    }

    /// Coefficient of `v^k`, free of `v`.
    pub fn coeff(&self, v: &Var, k: u32) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == k)
                .map(|(m, c)| (m.without(v), c.clone()))
                .collect(),
        }
    }

    /// All coefficients in `v`, keyed by power.
    pub fn coeffs_in(&self, v: &Var) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(v)).or_default().add_term(m.without(v), c.clone());
        }
        out
    }

    /// Splits into monomials over `vars` with coefficients in the other variables.
    pub fn coefficients_in(&self, vars: &[Var]) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inner, outer) = m.split(vars);
            out.entry(inner).or_default().add_term(outer, c.clone());
        }
        out
    }

    /// Simultaneous substitution of each listed variable.
    pub fn substitute_many(&self, map: &[(Var, MultiPoly)]) -> MultiPoly {
        if map.is_empty() || self.is_zero() {
            return self.clone();
        }
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut rest = Vec::new();
            let mut acc = MultiPoly::constant(c.clone());
            for (v, e) in m.iter() {
                match map.iter().position(|(w, _)| w == v) {
                    Some(idx) => {
                        let p = cache.entry((idx, *e)).or_insert_with(|| map[idx].1.pow(*e));
                        acc = &acc * &*p;
                    }
                    None => rest.push((v.clone(), *e)),
                }
            }
            out += acc.mul_monomial(&Monomial(rest));
        }
        out
    }

    pub fn substitute(&self, v: &Var, r: &MultiPoly) -> MultiPoly {
        self.substitute_many(&[(v.clone(), r.clone())])
    }

    /// Replaces parameters by rational values.
    pub fn evaluate(&self, values: &[(Var, Rational)]) -> MultiPoly {
        let map: Vec<(Var, MultiPoly)> =
            values.iter().map(|(v, r)| (v.clone(), MultiPoly::constant(r.clone()))).collect();
        self.substitute_many(&map)
    }

    /// Division by `q` in the variable `v`; the leading `v`-coefficient of
    /// `q` must be a nonzero rational constant.
    pub fn div_rem(&self, q: &MultiPoly, v: &Var) -> Result<(MultiPoly, MultiPoly)> {
        let dq = q.degree_in(v).ok_or_else(|| Error::UnsupportedDivision("division by zero".into()))?;
        let lead = q
            .coeff(v, dq)
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::UnsupportedDivision(alloc::format!("leading coefficient of {q} in {v} is not constant")))?;
        let mut quot = MultiPoly::zero();
        let mut rem = self.clone();
        while let Some(dr) = rem.degree_in(v) {
            if rem.is_zero() || dr < dq {
                break;
            }
            let t = rem.coeff(v, dr).scale(&(Rational::one() / &lead)).mul_monomial(&Monomial::var(v.clone(), dr - dq));
            rem -= &(&t * q);
            quot += t;
        }
        Ok((quot, rem))
    }

    /// Reads off a univariate polynomial in `v`; fails if other variables remain.
    pub fn to_uni(&self, v: &Var) -> Result<UniPoly> {
        let mut coeffs = Vec::new();
        for (m, c) in &self.terms {
            if m.iter().any(|(w, _)| w != v) {
                return Err(Error::NotInstantiated(alloc::format!("{self} is not univariate in {v}")));
            }
            let e = m.exponent(v) as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rational::zero());
            }
            coeffs[e] = c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    pub fn from_uni(u: &UniPoly, v: &Var) -> MultiPoly {
        MultiPoly::from_terms(
            u.coeffs().iter().enumerate().map(|(e, c)| (Monomial::var(v.clone(), e as u32), c.clone())),
        )
    }

    /// Terms in printing order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| a.0.display_cmp(b.0));
        ts
    }

    /// The term that prints first, if any.
    pub fn leading_term(&self) -> Option<(Monomial, Rational)> {
        self.sorted_terms().first().map(|(m, c)| ((*m).clone(), (*c).clone()))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

impl From<i64> for MultiPoly {
    fn from(n: i64) -> Self {
        MultiPoly::int(n)
    }
}

impl AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: &MultiPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: MultiPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&MultiPoly> for MultiPoly {
    fn sub_assign(&mut self, rhs: &MultiPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl SubAssign<MultiPoly> for MultiPoly {
    fn sub_assign(&mut self, rhs: MultiPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match terms.get_mut(&m) {
                    Some(e) => *e += c,
                    None => {
                        terms.insert(m, c);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { terms }
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl core::iter::Sum for MultiPoly {
    fn sum<I: Iterator<Item = MultiPoly>>(iter: I) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

/// Convenience for building names such as `psi1_3`.
pub fn indexed(base: &str, i: usize) -> String {
    alloc::format!("{base}_{i}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    #[test]
    fn add_and_absorb() {
        assert_eq!(MultiPoly::d() + MultiPoly::l().scale(&rat(2)), p("d+2*l"));
        assert!((p("d+2*l") * MultiPoly::zero()).is_zero());
    }

    #[test]
    fn schoolbook_product() {
        // (∂+2λ)(∂λ+λ²) = ∂²λ + 3∂λ² + 2λ³
        let prod = p("d+2*l") * p("d*l+l^2");
        let expected = MultiPoly::from_terms([
            (Monomial::var(Var::Partial, 2).mul(&Monomial::var(Var::Lambda, 1)), rat(1)),
            (Monomial::var(Var::Partial, 1).mul(&Monomial::var(Var::Lambda, 2)), rat(3)),
            (Monomial::var(Var::Lambda, 3), rat(2)),
        ]);
        assert_eq!(prod, expected);
    }

    #[test]
    fn substitutions() {
        let minus = -(MultiPoly::d() + MultiPoly::l());
        assert_eq!(p("d+2*l").substitute(&Var::Lambda, &minus), p("-d-2*l"));
        let q = p("d*l+l^2");
        assert_eq!(q.substitute(&Var::Lambda, &MultiPoly::l()), q);
        assert_eq!(q.substitute(&Var::Lambda, &p("l+m")), p("d*l+d*m+l^2+2*l*m+m^2"));
    }

    #[test]
    fn simultaneous_substitution_swaps() {
        let q = p("d^2*l");
        let swapped = q.substitute_many(&[(Var::Partial, MultiPoly::l()), (Var::Lambda, MultiPoly::d())]);
        assert_eq!(swapped, p("l^2*d"));
    }

    #[test]
    fn coefficients() {
        assert_eq!(p("d+2*l").coeff(&Var::Lambda, 1), MultiPoly::int(2));
        assert!(p("d+2*l").coeff(&Var::Lambda, 5).is_zero());
        assert_eq!(p("d^2*l+3*d*l^2+2*l^3").coeff(&Var::Lambda, 2), p("3*d"));
    }

    #[test]
    fn division() {
        let (q, r) = p("(d+l+eta)*(d+eta)").div_rem(&p("d+eta"), &Var::Partial).unwrap();
        assert_eq!(q, p("d+l+eta"));
        assert!(r.is_zero());
        let (q, r) = p("d^2+1").div_rem(&MultiPoly::d(), &Var::Partial).unwrap();
        assert_eq!((q, r), (MultiPoly::d(), MultiPoly::one()));
        // p(∂+λ)(∂+Δλ+η) with p = ∂+η, Δ = 0
        let shifted = p("(d+l+eta)*(d+eta)");
        assert!(shifted.div_rem(&p("d+eta"), &Var::Partial).unwrap().1.is_zero());
        assert!(p("d").div_rem(&p("a*d"), &Var::Partial).is_err());
    }

    #[test]
    fn display_is_degree_sorted() {
        assert_eq!(p("2*l + d").to_string(), "d + 2*l");
        assert_eq!(p("1 - d^2 + 3/2*l").to_string(), "-d^2 + 3/2*l + 1");
        assert_eq!(MultiPoly::zero().to_string(), "0");
        assert_eq!(p("-alpha*l").to_string(), "-l*alpha");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
