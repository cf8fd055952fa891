//! Free ℤ₂-graded conformal superalgebras given by structure polynomials
//! `[X^i_λ X^j] = Σ_k Q_ij^k(∂,λ) X^k`.

mod hnf;
mod series;

pub use hnf::{hermite_normal_form, unit as unit_row, PolySubmodule};
pub use series::{check_ideal, derived_series, is_nilpotent, is_solvable, lower_central_series, span_of_generators, Series};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::polyring::{factorial, MultiPoly, Rational, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// (−1)^{|a||b|}
pub fn koszul(a: Parity, b: Parity) -> Rational {
    if a.is_odd() && b.is_odd() {
        -Rational::one()
    } else {
        Rational::one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub parity: Parity,
}

impl BasisElement {
    pub fn new(name: &str, parity: Parity) -> BasisElement {
        BasisElement { name: name.to_string(), parity }
    }
}

pub type Row = BTreeMap<usize, MultiPoly>;

pub(crate) fn minus_d_minus_l() -> MultiPoly {
    -(MultiPoly::d() + MultiPoly::l())
}

/// Q(∂, −∂−λ)
pub(crate) fn reflect(q: &MultiPoly) -> MultiPoly {
    q.substitute(&Var::Lambda, &minus_d_minus_l())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalSuperAlgebra {
    basis: Vec<BasisElement>,
    table: BTreeMap<(usize, usize), Row>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub residual: MultiPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub t: usize,
    pub residual: MultiPoly,
}

impl ConformalSuperAlgebra {
    pub fn builder() -> AlgebraBuilder {
        AlgebraBuilder::default()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.basis[i].parity
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn row(&self, i: usize, j: usize) -> Option<&Row> {
        self.table.get(&(i, j))
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> MultiPoly {
        self.table.get(&(i, j)).and_then(|r| r.get(&k)).cloned().unwrap_or_default()
    }

    /// Entry looked up by generator names; zero when a name is absent.
    pub fn entry_named(&self, a: &str, b: &str, c: &str) -> MultiPoly {
        match (self.index_of(a), self.index_of(b), self.index_of(c)) {
            (Some(i), Some(j), Some(k)) => self.entry(i, j, k),
            _ => MultiPoly::zero(),
        }
    }

    pub fn table(&self) -> &BTreeMap<(usize, usize), Row> {
        &self.table
    }

    pub fn params(&self) -> BTreeSet<Var> {
        self.table.values().flat_map(|r| r.values()).flat_map(MultiPoly::params).collect()
    }

    /// Overwrites one entry without re-deriving its skew partner.
    pub fn set_entry_raw(&mut self, i: usize, j: usize, k: usize, q: MultiPoly) {
        let row = self.table.entry((i, j)).or_default();
        if q.is_zero() {
            row.remove(&k);
        } else {
            row.insert(k, q);
        }
        if row.is_empty() {
            self.table.remove(&(i, j));
        }
    }

    pub fn map_entries(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> ConformalSuperAlgebra {
        let mut table = BTreeMap::new();
        for (key, row) in &self.table {
            let r: Row = row.iter().map(|(k, q)| (*k, f(q))).filter(|(_, q)| !q.is_zero()).collect();
            if !r.is_empty() {
                table.insert(*key, r);
            }
        }
        ConformalSuperAlgebra { basis: self.basis.clone(), table }
    }

    pub fn instantiate(&self, values: &[(Var, Rational)]) -> ConformalSuperAlgebra {
        self.map_entries(|q| q.evaluate(values))
    }

    pub fn substitute_params(&self, map: &[(Var, MultiPoly)]) -> ConformalSuperAlgebra {
        self.map_entries(|q| q.substitute_many(map))
    }

    /// Subalgebra on the even generators.
    pub fn even_part(&self) -> ConformalSuperAlgebra {
        let keep: Vec<usize> = (0..self.rank()).filter(|&i| !self.parity(i).is_odd()).collect();
        let pos = |i: usize| keep.iter().position(|&k| k == i);
        let mut table = BTreeMap::new();
        for (&(i, j), row) in &self.table {
            if let (Some(a), Some(b)) = (pos(i), pos(j)) {
                let r: Row = row.iter().filter_map(|(k, q)| pos(*k).map(|c| (c, q.clone()))).collect();
                if !r.is_empty() {
                    table.insert((a, b), r);
                }
            }
        }
        ConformalSuperAlgebra { basis: keep.iter().map(|&i| self.basis[i].clone()).collect(), table }
    }

    pub fn check_skew(&self) -> Vec<SkewViolation> {
        let mut out = Vec::new();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                let sign = koszul(self.parity(i), self.parity(j));
                let mut targets: BTreeSet<usize> = BTreeSet::new();
                targets.extend(self.row(i, j).into_iter().flat_map(|r| r.keys().copied()));
                targets.extend(self.row(j, i).into_iter().flat_map(|r| r.keys().copied()));
                for k in targets {
                    let residual = self.entry(i, j, k) + reflect(&self.entry(j, i, k)).scale(&sign);
                    if !residual.is_zero() {
                        out.push(SkewViolation { i, j, k, residual });
                    }
                }
            }
        }
        out
    }

    /// Residuals of
    /// Σ_s Q_jk^s(∂+λ,μ)Q_is^t(∂,λ) − (−1)^{|i||j|}Q_ik^s(∂+μ,λ)Q_js^t(∂,μ)
    ///   − Q_ij^s(−λ−μ,λ)Q_sk^t(∂,λ+μ).
    pub fn check_jacobi(&self) -> Vec<JacobiViolation> {
        let mut out = Vec::new();
        for (key, row) in self.jacobi_residuals() {
            for (t, residual) in row {
                out.push(JacobiViolation { i: key.0, j: key.1, k: key.2, t, residual });
            }
        }
        out
    }

    pub fn is_lie_conformal(&self) -> bool {
        self.check_skew().is_empty() && self.check_jacobi().is_empty()
    }

    pub(crate) fn jacobi_residuals(&self) -> BTreeMap<(usize, usize, usize), Row> {
        let (d, l, m) = (MultiPoly::d(), MultiPoly::l(), MultiPoly::m());
        let sub = |q: &MultiPoly, dd: &MultiPoly, ll: &MultiPoly| {
            q.substitute_many(&[(Var::Partial, dd.clone()), (Var::Lambda, ll.clone())])
        };
        let mut t1 = BTreeMap::new(); // Q(∂+λ, μ)
        let mut t3 = BTreeMap::new(); // Q(∂+μ, λ)
        let mut t4 = BTreeMap::new(); // Q(∂, μ)
        let mut t5 = BTreeMap::new(); // Q(−λ−μ, λ)
        let mut t6 = BTreeMap::new(); // Q(∂, λ+μ)
        let (dl, dm, lm, nlm) = (&d + &l, &d + &m, &l + &m, -(&l + &m));
        for (&(a, b), row) in &self.table {
            for (&s, q) in row {
                t1.insert((a, b, s), sub(q, &dl, &m));
                t3.insert((a, b, s), sub(q, &dm, &l));
                t4.insert((a, b, s), q.substitute(&Var::Lambda, &m));
                t5.insert((a, b, s), sub(q, &nlm, &l));
                t6.insert((a, b, s), q.substitute(&Var::Lambda, &lm));
            }
        }
        let n = self.rank();
        let mut result = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let sign = koszul(self.parity(i), self.parity(j));
                for k in 0..n {
                    let mut acc: BTreeMap<usize, MultiPoly> = BTreeMap::new();
                    if let Some(row) = self.row(j, k) {
                        for &s in row.keys() {
                            if let Some(inner) = self.row(i, s) {
                                for (&t, q) in inner {
                                    *acc.entry(t).or_default() += &t1[&(j, k, s)] * q;
                                }
                            }
                        }
                    }
                    if let Some(row) = self.row(i, k) {
                        for &s in row.keys() {
                            if self.row(j, s).is_some() {
                                for &t in self.row(j, s).unwrap().keys() {
                                    *acc.entry(t).or_default() -= (&t3[&(i, k, s)] * &t4[&(j, s, t)]).scale(&sign);
                                }
                            }
                        }
                    }
                    if let Some(row) = self.row(i, j) {
                        for &s in row.keys() {
                            if let Some(inner) = self.row(s, k) {
                                for &t in inner.keys() {
                                    *acc.entry(t).or_default() -= &t5[&(i, j, s)] * &t6[&(s, k, t)];
                                }
                            }
                        }
                    }
                    acc.retain(|_, p| !p.is_zero());
                    if !acc.is_empty() {
                        result.insert((i, j, k), acc);
                    }
                }
            }
        }
        result
    }

    /// `[x_λ y]` extended from generators by sesquilinearity, without any
    /// homogeneity requirement.
    pub fn bracket_bilinear(&self, x: &Element, y: &Element) -> Element {
        let neg_l = -MultiPoly::l();
        let dl = MultiPoly::d() + MultiPoly::l();
        let mut out = Element::zero();
        for (&i, xi) in &x.coords {
            let left = xi.substitute(&Var::Partial, &neg_l);
            for (&j, yj) in &y.coords {
                let Some(row) = self.row(i, j) else { continue };
                let coeff = &left * &yj.substitute(&Var::Partial, &dl);
                for (&k, q) in row {
                    out.add_coord(k, &coeff * q);
                }
            }
        }
        out
    }

    pub fn bracket_eval(&self, x: &Element, y: &Element) -> Result<Element> {
        for e in [x, y] {
            if e.coords.values().any(|p| p.contains_var(&Var::Lambda) || p.contains_var(&Var::Mu)) {
                return Err(Error::Domain("element coordinates must be polynomials in d and parameters".into()));
            }
            if e.parity(self) == ElementParity::Mixed {
                return Err(Error::Domain("bracket of a mixed-parity element".into()));
            }
        }
        Ok(self.bracket_bilinear(x, y))
    }

    /// a_(n)b = n!·(coefficient of λⁿ in [a_λ b]) for generators a, b.
    pub fn jth_products(&self, i: usize, j: usize) -> BTreeMap<u32, Element> {
        jth_of(&self.bracket_bilinear(&Element::generator(i), &Element::generator(j)))
    }

    /// Products a_(n)b for arbitrary elements.
    pub fn jth_products_of(&self, x: &Element, y: &Element) -> BTreeMap<u32, Element> {
        jth_of(&self.bracket_bilinear(x, y))
    }

    /// Flips the parity of generator `x`, which must satisfy [x_λ x] = 0.
    pub fn super_deform(&self, x: &str) -> Result<ConformalSuperAlgebra> {
        if self.basis.iter().any(|b| b.parity.is_odd()) {
            return Err(Error::Domain("super deformation needs an all-even algebra".into()));
        }
        let idx = self.index_of(x).ok_or_else(|| Error::Unknown(format!("generator `{x}`")))?;
        if self.row(idx, idx).is_some() {
            return Err(Error::Domain(format!("[{x}_l {x}] is nonzero")));
        }
        let mut basis = self.basis.clone();
        basis[idx].parity = Parity::Odd;
        let out = ConformalSuperAlgebra { basis, table: self.table.clone() };
        out.check_parities()?;
        Ok(out)
    }

    fn check_parities(&self) -> Result<()> {
        for (&(i, j), row) in &self.table {
            for &k in row.keys() {
                if self.parity(i).add(self.parity(j)) != self.parity(k) {
                    return Err(Error::InvalidAlgebra(format!(
                        "[{}_l {}] has a component on {} of the wrong parity",
                        self.name(i),
                        self.name(j),
                        self.name(k)
                    )));
                }
            }
        }
        Ok(())
    }
}

fn jth_of(bracket: &Element) -> BTreeMap<u32, Element> {
    let mut out: BTreeMap<u32, Element> = BTreeMap::new();
    for (&k, q) in &bracket.coords {
        for (n, c) in q.coeffs_in(&Var::Lambda) {
            let scaled = c.scale(&Rational::from_integer(factorial(n)));
            out.entry(n).or_default().add_coord(k, scaled);
        }
    }
    out.retain(|_, e| !e.is_zero());
    out
}

impl fmt::Display for ConformalSuperAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.basis.iter().map(|b| format!("{}:{}", b.name, b.parity.as_str())).collect();
        writeln!(f, "basis {}", names.join(", "))?;
        for (&(i, j), row) in &self.table {
            let parts: Vec<String> = row.iter().map(|(&k, q)| format!("({q}){}", self.name(k))).collect();
            writeln!(f, "[{}_l {}] = {}", self.name(i), self.name(j), parts.join(" + "))?;
        }
        Ok(())
    }
}

/// Element Σ p_i X^i of the free ℂ[∂]-module.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    coords: BTreeMap<usize, MultiPoly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementParity {
    Zero,
    Homogeneous(Parity),
    Mixed,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn generator(i: usize) -> Element {
        Element::from_coords([(i, MultiPoly::one())])
    }

    pub fn from_coords<I: IntoIterator<Item = (usize, MultiPoly)>>(it: I) -> Element {
        let mut e = Element::zero();
        for (i, p) in it {
            e.add_coord(i, p);
        }
        e
    }

    pub fn coords(&self) -> &BTreeMap<usize, MultiPoly> {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> MultiPoly {
        self.coords.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add_coord(&mut self, i: usize, p: MultiPoly) {
        let slot = self.coords.entry(i).or_default();
        *slot += p;
        if slot.is_zero() {
            self.coords.remove(&i);
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (&i, p) in &other.coords {
            out.add_coord(i, p.clone());
        }
        out
    }

    pub fn scale(&self, p: &MultiPoly) -> Element {
        Element::from_coords(self.coords.iter().map(|(&i, q)| (i, q * p)))
    }

    pub fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Element {
        Element::from_coords(self.coords.iter().map(|(&i, q)| (i, f(q))))
    }

    pub fn parity(&self, alg: &ConformalSuperAlgebra) -> ElementParity {
        let mut seen: Option<Parity> = None;
        for &i in self.coords.keys() {
            let p = alg.parity(i);
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return ElementParity::Mixed,
                _ => {}
            }
        }
        seen.map_or(ElementParity::Zero, ElementParity::Homogeneous)
    }

    pub fn display(&self, alg: &ConformalSuperAlgebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self.coords.iter().map(|(&k, q)| format!("({q}){}", alg.name(k))).collect();
        parts.join(" + ")
    }
}

/// Incremental constructor; unlisted pairs (j,i) are derived from (i,j) by
/// skew-symmetry.
#[derive(Clone, Debug, Default)]
pub struct AlgebraBuilder {
    basis: Vec<BasisElement>,
    entries: BTreeMap<(usize, usize), Row>,
    error: Option<Error>,
}

impl AlgebraBuilder {
    pub fn generator(mut self, name: &str, parity: Parity) -> Self {
        if self.basis.iter().any(|b| b.name == name) {
            self.error.get_or_insert(Error::InvalidAlgebra(format!("duplicate generator `{name}`")));
        }
        self.basis.push(BasisElement::new(name, parity));
        self
    }

    pub fn even(self, name: &str) -> Self {
        self.generator(name, Parity::Even)
    }

    pub fn odd(self, name: &str) -> Self {
        self.generator(name, Parity::Odd)
    }

    fn idx(&mut self, name: &str) -> Option<usize> {
        let found = self.basis.iter().position(|b| b.name == name);
        if found.is_none() {
            self.error.get_or_insert(Error::Unknown(format!("generator `{name}`")));
        }
        found
    }

    /// Adds `q` to Q_ab^c.
    pub fn bracket(mut self, a: &str, b: &str, c: &str, q: MultiPoly) -> Self {
        if let (Some(i), Some(j), Some(k)) = (self.idx(a), self.idx(b), self.idx(c)) {
            self = self.bracket_idx(i, j, k, q);
        }
        self
    }

    pub fn bracket_idx(mut self, i: usize, j: usize, k: usize, q: MultiPoly) -> Self {
        let row = self.entries.entry((i, j)).or_default();
        *row.entry(k).or_default() += q;
        self
    }

    pub fn build(self) -> Result<ConformalSuperAlgebra> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let n = self.basis.len();
        for (&(i, j), row) in &self.entries {
            for (&k, q) in row {
                if i >= n || j >= n || k >= n {
                    return Err(Error::InvalidAlgebra("generator index out of range".into()));
                }
                if q.contains_var(&Var::Mu) {
                    return Err(Error::InvalidAlgebra(format!("structure polynomial {q} mentions m")));
                }
            }
        }
        let mut table: BTreeMap<(usize, usize), Row> = BTreeMap::new();
        for (&(i, j), row) in &self.entries {
            let r: Row = row.iter().filter(|(_, q)| !q.is_zero()).map(|(&k, q)| (k, q.clone())).collect();
            if !r.is_empty() {
                table.insert((i, j), r);
            }
        }
        for (&(i, j), row) in &self.entries {
            if i == j || self.entries.contains_key(&(j, i)) {
                continue;
            }
            let sign = -koszul(self.basis[i].parity, self.basis[j].parity);
            let r: Row = row
                .iter()
                .map(|(&k, q)| (k, reflect(q).scale(&sign)))
                .filter(|(_, q)| !q.is_zero())
                .collect();
            if !r.is_empty() {
                table.insert((j, i), r);
            }
        }
        let alg = ConformalSuperAlgebra { basis: self.basis, table };
        alg.check_parities()?;
        Ok(alg)
    }
}
