//! Constructors for the rank (2+1) families, their rank-one and rank-two
//! relatives, the Condition 1 templates and the W(a,b,r) algebra.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lcsa::{AlgebraBuilder, ConformalSuperAlgebra};
use crate::polyring::{frac, indexed, parse_poly_open, rat, MultiPoly, Rational, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Vir,
    NS,
    HV,
    HVS,
    /// Õ₁ with generators A1..An.
    OTilde1(usize),
    /// Õ₂ with generators A1..An.
    OTilde2(usize),
    O1,
    O2,
    A1,
    A2,
    A3,
    A4,
    B0,
    B1,
    B2,
    C0,
    C1,
    C2,
    C3,
    D0,
    D1,
    D2,
    D3,
    D4,
    D5,
    Dbar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    /// Free of ∂ and λ.
    Scalar,
    /// Polynomial in λ.
    Lambda,
    /// Polynomial in ∂.
    Partial,
    /// Skew-symmetric polynomial in ∂, λ.
    Skew,
    /// Q(∂,λ) of a type D even part.
    Quadratic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotDef {
    pub name: String,
    pub kind: SlotKind,
    pub nonzero: bool,
}

fn slot(name: &str, kind: SlotKind) -> SlotDef {
    SlotDef { name: name.to_string(), kind, nonzero: false }
}

fn nonzero(name: &str, kind: SlotKind) -> SlotDef {
    SlotDef { name: name.to_string(), kind, nonzero: true }
}

impl Family {
    /// Every family, with Õ₁/Õ₂ at n = 3.
    pub fn all() -> Vec<Family> {
        use Family::*;
        alloc::vec![
            Vir, NS, HV, HVS, OTilde1(3), OTilde2(3), O1, O2, A1, A2, A3, A4, B0, B1, B2, C0, C1, C2, C3, D0, D1, D2,
            D3, D4, D5, Dbar,
        ]
    }

    pub fn tag(&self) -> String {
        match self {
            Family::OTilde1(n) => format!("O1({n})"),
            Family::OTilde2(n) => format!("O2({n})"),
            other => format!("{other:?}"),
        }
    }

    pub fn parse(text: &str) -> Result<Family> {
        let t = text.trim();
        let open = |prefix: &str| -> Option<usize> {
            t.strip_prefix(prefix)?.strip_suffix(')')?.trim().parse().ok().filter(|&n| n > 0)
        };
        if let Some(n) = open("O1(") {
            return Ok(Family::OTilde1(n));
        }
        if let Some(n) = open("O2(") {
            return Ok(Family::OTilde2(n));
        }
        Family::all()
            .into_iter()
            .find(|f| !matches!(f, Family::OTilde1(_) | Family::OTilde2(_)) && f.tag().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Unknown(format!("family `{t}`")))
    }

    pub fn generators(&self) -> Vec<String> {
        match self {
            Family::Vir => alloc::vec!["L".into()],
            Family::NS => alloc::vec!["L".into(), "G".into()],
            Family::HV => alloc::vec!["L".into(), "H".into()],
            Family::OTilde1(n) | Family::OTilde2(n) => {
                let mut v: Vec<String> = (1..=*n).map(|i| format!("A{i}")).collect();
                v.push("X".into());
                v
            }
            _ => alloc::vec!["A".into(), "B".into(), "X".into()],
        }
    }

    pub fn slots(&self) -> Vec<SlotDef> {
        use SlotKind::*;
        match self {
            Family::Vir | Family::NS | Family::HV | Family::HVS | Family::D5 => Vec::new(),
            Family::B0 | Family::C0 | Family::B2 | Family::C2 => Vec::new(),
            Family::OTilde1(n) => (1..=*n).map(|i| slot(&format!("phi{i}"), Lambda)).collect(),
            Family::OTilde2(n) => (1..=*n).map(|i| slot(&format!("psi{i}"), Partial)).collect(),
            Family::O1 => alloc::vec![slot("phi_a", Lambda), slot("phi_b", Lambda)],
            Family::O2 => alloc::vec![slot("psi_a", Partial), slot("psi_b", Partial)],
            Family::A1 => alloc::vec![nonzero("f1", Skew), slot("phi1", Lambda)],
            Family::A2 => alloc::vec![nonzero("f2", Skew), slot("psi", Partial)],
            Family::A3 => alloc::vec![nonzero("phi3", Lambda)],
            Family::A4 => alloc::vec![nonzero("p", Lambda), slot("phi4", Lambda)],
            Family::B1 | Family::C1 => alloc::vec![slot("alpha", Scalar), slot("beta", Scalar)],
            Family::C3 => alloc::vec![nonzero("phi", Lambda)],
            Family::D0 | Family::D2 => alloc::vec![slot("a", Scalar), slot("b", Scalar), slot("q", Quadratic)],
            Family::D1 => alloc::vec![
                slot("a", Scalar),
                slot("b", Scalar),
                slot("q", Quadratic),
                slot("alpha", Scalar),
                slot("beta", Scalar),
            ],
            Family::D3 => alloc::vec![slot("b", Scalar), slot("q", Quadratic)],
            Family::D4 => alloc::vec![slot("alpha", Scalar), slot("beta", Scalar), slot("gamma", Scalar)],
            Family::Dbar => alloc::vec![
                slot("a", Scalar),
                slot("b", Scalar),
                slot("q", Quadratic),
                slot("alpha", Scalar),
                slot("beta", Scalar),
                slot("gamma", Scalar),
            ],
        }
    }

    /// The value a of the C1 check for families with a type D even part.
    fn fixed_a(&self) -> Option<Rational> {
        match self {
            Family::D3 => Some(rat(0)),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// A family together with explicit slot values; missing slots are symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub slots: BTreeMap<String, MultiPoly>,
    /// Degree of the generic polynomials used for missing polynomial slots.
    pub generic_degree: u32,
}

fn generic_in(name: &str, v: &Var, deg: u32) -> MultiPoly {
    (0..=deg)
        .map(|k| MultiPoly::param(&indexed(name, k as usize)) * MultiPoly::var(v.clone()).pow(k))
        .sum()
}

/// ∂λ + λ², fixed by λ ↦ −∂−λ.
pub fn sym_u() -> MultiPoly {
    MultiPoly::d() * MultiPoly::l() + MultiPoly::l().pow(2)
}

/// ∂ + 2λ, negated by λ ↦ −∂−λ.
pub fn vir_poly() -> MultiPoly {
    MultiPoly::d() + MultiPoly::l().scale(&rat(2))
}

fn generic_skew(name: &str) -> MultiPoly {
    let p = |k: usize| MultiPoly::param(&indexed(name, k));
    vir_poly() * (p(0) + p(1) * MultiPoly::d() + p(2) * sym_u())
}

impl FamilySpec {
    pub fn new(family: Family) -> FamilySpec {
        FamilySpec { family, slots: BTreeMap::new(), generic_degree: 2 }
    }

    pub fn set(mut self, name: &str, value: MultiPoly) -> Result<FamilySpec> {
        if !self.family.slots().iter().any(|s| s.name == name) {
            return Err(Error::InvalidSlot {
                slot: name.into(),
                reason: format!("{} has no such slot", self.family),
            });
        }
        self.slots.insert(name.into(), value);
        Ok(self)
    }

    pub fn set_text(self, name: &str, text: &str) -> Result<FamilySpec> {
        let p = parse_poly_open(text)?;
        self.set(name, p)
    }

    pub fn set_rat(self, name: &str, value: Rational) -> Result<FamilySpec> {
        self.set(name, MultiPoly::constant(value))
    }

    /// Value of `name`, or its symbolic default.
    pub fn value(&self, name: &str) -> MultiPoly {
        if let Some(v) = self.slots.get(name) {
            return v.clone();
        }
        let Some(def) = self.family.slots().into_iter().find(|s| s.name == name) else {
            return MultiPoly::zero();
        };
        match def.kind {
            SlotKind::Scalar => MultiPoly::param(name),
            SlotKind::Lambda => generic_in(name, &Var::Lambda, self.generic_degree),
            SlotKind::Partial => generic_in(name, &Var::Partial, self.generic_degree),
            SlotKind::Skew => generic_skew(name),
            SlotKind::Quadratic => MultiPoly::zero(),
        }
    }

    /// Tag plus the explicitly set slots, e.g. `D2{a=1, b=0}`.
    pub fn label(&self) -> String {
        if self.slots.is_empty() {
            return self.family.tag();
        }
        let parts: Vec<String> = self.slots.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}{{{}}}", self.family, parts.join(", "))
    }

    pub fn validate(&self) -> Result<()> {
        for def in self.family.slots() {
            let v = self.value(&def.name);
            check_kind(&def, &v)?;
        }
        match self.family {
            Family::D0 | Family::D1 | Family::D2 | Family::D3 | Family::Dbar => {
                let a = match self.family.fixed_a() {
                    Some(a) => MultiPoly::constant(a),
                    None => self.value("a"),
                };
                check_condition1(&a, &self.value("b"), &self.value("q"))?;
                if self.family == Family::Dbar {
                    let g = self.value("gamma");
                    let hv = a == MultiPoly::one() && self.value("b").is_zero() && self.value("q").is_zero();
                    if !g.is_zero() && !hv {
                        return Err(Error::InvalidSlot {
                            slot: "gamma".into(),
                            reason: "gamma must vanish unless (a, b, Q) = (1, 0, 0)".into(),
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ConformalSuperAlgebra> {
        self.validate()?;
        self.build_forced()
    }

    /// Builds without slot validation; the result need not satisfy the axioms.
    pub fn build_forced(&self) -> Result<ConformalSuperAlgebra> {
        construct(self)
    }
}

fn check_kind(def: &SlotDef, v: &MultiPoly) -> Result<()> {
    let bad = |reason: &str| Err(Error::InvalidSlot { slot: def.name.clone(), reason: reason.into() });
    if v.contains_var(&Var::Mu) {
        return bad("must not mention m");
    }
    match def.kind {
        SlotKind::Scalar if v.contains_var(&Var::Partial) || v.contains_var(&Var::Lambda) => {
            return bad("must be a scalar");
        }
        SlotKind::Lambda if v.contains_var(&Var::Partial) => return bad("must be a polynomial in l only"),
        SlotKind::Partial if v.contains_var(&Var::Lambda) => return bad("must be a polynomial in d only"),
        SlotKind::Skew if !crate::lcsa::reflect(v).scale(&rat(-1)).eq(v) => {
            return bad("must be skew-symmetric, f(d,l) = -f(d,-d-l)");
        }
        _ => {}
    }
    if def.nonzero && v.is_zero() {
        return bad("must be nonzero");
    }
    Ok(())
}

/// The admissible values of a for a nonzero Q.
pub const CONDITION1_A: [i64; 5] = [1, 0, -1, -4, -6];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition1Entry {
    pub a: Rational,
    /// In the symbolic constants `c` and `c_d`.
    pub template: MultiPoly,
}

/// Spanning polynomials of the admissible Q for the given a.
pub fn condition1_basis(a: &Rational) -> Option<Vec<MultiPoly>> {
    let v = vir_poly();
    let u = sym_u();
    let d = MultiPoly::d();
    let a = CONDITION1_A.iter().position(|&x| rat(x) == *a)?;
    Some(match a {
        0 => alloc::vec![v],
        1 => alloc::vec![&v * &u, &v * &d],
        2 => alloc::vec![&v * &d.pow(2), &v * &u * &d],
        3 => alloc::vec![&v * &u.pow(3)],
        _ => alloc::vec![&v * &(u.pow(4).scale(&rat(11)) + u.pow(3) * d.pow(2).scale(&rat(2)))],
    })
}

/// The template for `a` with constants `c` and (for a ∈ {0, −1}) `d`.
pub fn condition1_q(a: &Rational, c: &MultiPoly, d: Option<&MultiPoly>) -> Result<MultiPoly> {
    let basis = condition1_basis(a).ok_or_else(|| Error::Condition1(format!("a = {a} is not in the table")))?;
    match (basis.len(), d) {
        (1, Some(_)) => Err(Error::Condition1(format!("a = {a} takes no second constant"))),
        (1, None) => Ok(c * &basis[0]),
        (_, d) => Ok(c * &basis[0] + d.cloned().unwrap_or_else(MultiPoly::zero) * &basis[1]),
    }
}

pub fn condition1_table() -> Vec<Condition1Entry> {
    let c = MultiPoly::param("c");
    let cd = MultiPoly::param("c_d");
    CONDITION1_A
        .iter()
        .map(|&a| {
            let a = rat(a);
            let two = condition1_basis(&a).map(|b| b.len() == 2).unwrap_or(false);
            let template = condition1_q(&a, &c, if two { Some(&cd) } else { None }).expect("table entry");
            Condition1Entry { a, template }
        })
        .collect()
}

/// Whether `q` is a combination of `basis` with coefficients free of ∂, λ.
pub fn in_span(q: &MultiPoly, basis: &[MultiPoly]) -> bool {
    let dl = [Var::Partial, Var::Lambda];
    let mut rest = q.coefficients_in(&dl);
    let mut sorted: Vec<&MultiPoly> = basis.iter().collect();
    sorted.sort_by(|x, y| {
        let lx = x.leading_term().map(|t| t.0);
        let ly = y.leading_term().map(|t| t.0);
        match (lx, ly) {
            (Some(a), Some(b)) => a.display_cmp(&b),
            _ => core::cmp::Ordering::Equal,
        }
    });
    for b in sorted {
        let Some((lead, lc)) = b.leading_term() else { continue };
        let Some(c) = rest.get(&lead).cloned() else { continue };
        let c = c.scale(&(Rational::from_integer(1.into()) / lc));
        for (m, coef) in b.coefficients_in(&dl) {
            let e = rest.entry(m.clone()).or_insert_with(MultiPoly::zero);
            *e -= &c * &coef;
            if e.is_zero() {
                rest.remove(&m);
            }
        }
    }
    rest.is_empty()
}

/// Condition 1 on (a, b, Q).
pub fn check_condition1(a: &MultiPoly, b: &MultiPoly, q: &MultiPoly) -> Result<()> {
    if q.is_zero() {
        return Ok(());
    }
    if q.contains_var(&Var::Mu) {
        return Err(Error::Condition1("Q must be a polynomial in d, l".into()));
    }
    if !b.is_zero() {
        return Err(Error::Condition1(format!("Q = {q} must vanish when b = {b} is nonzero")));
    }
    let av = a.as_constant().ok_or_else(|| Error::Condition1(format!("a = {a} must be a rational constant when Q is nonzero")))?;
    let basis = condition1_basis(&av).ok_or_else(|| Error::Condition1(format!("a = {av} admits no nonzero Q")))?;
    if !in_span(q, &basis) {
        return Err(Error::Condition1(format!("Q = {q} does not fit the template for a = {av}")));
    }
    Ok(())
}

fn abx() -> AlgebraBuilder {
    ConformalSuperAlgebra::builder().even("A").even("B").odd("X")
}

/// ∂ + αλ + β
pub fn conformal_weight(alpha: &MultiPoly, beta: &MultiPoly) -> MultiPoly {
    MultiPoly::d() + alpha * &MultiPoly::l() + beta.clone()
}

fn d_even(b: AlgebraBuilder, a: &MultiPoly, bb: &MultiPoly, q: &MultiPoly) -> AlgebraBuilder {
    b.bracket("A", "A", "A", vir_poly()).bracket("A", "A", "B", q.clone()).bracket("A", "B", "B", conformal_weight(a, bb))
}

fn construct(spec: &FamilySpec) -> Result<ConformalSuperAlgebra> {
    let v = |n: &str| spec.value(n);
    let two = MultiPoly::int(2);
    let three_halves = MultiPoly::constant(frac(3, 2));
    let half = |p: MultiPoly| p.scale(&frac(1, 2));
    let builder = ConformalSuperAlgebra::builder();
    let out = match spec.family {
        Family::Vir => builder.even("L").bracket("L", "L", "L", vir_poly()),
        Family::NS => builder
            .even("L")
            .odd("G")
            .bracket("L", "L", "L", vir_poly())
            .bracket("L", "G", "G", conformal_weight(&three_halves, &MultiPoly::zero()))
            .bracket("G", "G", "L", two),
        Family::HV => builder
            .even("L")
            .even("H")
            .bracket("L", "L", "L", vir_poly())
            .bracket("L", "H", "H", MultiPoly::d() + MultiPoly::l()),
        Family::HVS | Family::D5 => {
            let hv = FamilySpec::new(Family::D2)
                .set("a", MultiPoly::one())?
                .set("b", MultiPoly::zero())?
                .set("q", MultiPoly::zero())?;
            return construct(&hv);
        }
        Family::OTilde1(n) | Family::OTilde2(n) => {
            let polys: Vec<MultiPoly> = spec.family.slots().iter().map(|s| v(&s.name)).collect();
            let variant = if matches!(spec.family, Family::OTilde1(_)) { 1 } else { 2 };
            return general_o(variant, n, &polys, false);
        }
        Family::O1 => abx().bracket("A", "X", "X", v("phi_a")).bracket("B", "X", "X", v("phi_b")),
        Family::O2 => abx().bracket("X", "X", "A", v("psi_a")).bracket("X", "X", "B", v("psi_b")),
        Family::A1 => abx().bracket("A", "A", "B", v("f1")).bracket("A", "X", "X", v("phi1")),
        Family::A2 => abx().bracket("A", "A", "B", v("f2")).bracket("X", "X", "B", v("psi")),
        Family::A3 => abx()
            .bracket("A", "B", "B", v("phi3").scale(&rat(2)))
            .bracket("A", "X", "X", v("phi3"))
            .bracket("X", "X", "B", two),
        Family::A4 => abx().bracket("A", "B", "B", v("p")).bracket("A", "X", "X", v("phi4")),
        Family::B0 | Family::B1 | Family::B2 => {
            let b = abx().bracket("A", "A", "A", vir_poly()).bracket("B", "B", "B", vir_poly());
            match spec.family {
                Family::B0 => b,
                Family::B1 => b.bracket("A", "X", "X", conformal_weight(&v("alpha"), &v("beta"))),
                _ => b.bracket("A", "X", "X", conformal_weight(&three_halves, &MultiPoly::zero())).bracket("X", "X", "A", two),
            }
        }
        Family::C0 | Family::C1 | Family::C2 | Family::C3 => {
            let b = abx().bracket("A", "A", "A", vir_poly());
            match spec.family {
                Family::C0 => b,
                Family::C1 => b.bracket("A", "X", "X", conformal_weight(&v("alpha"), &v("beta"))),
                Family::C2 => {
                    b.bracket("A", "X", "X", conformal_weight(&three_halves, &MultiPoly::zero())).bracket("X", "X", "A", two)
                }
                _ => b.bracket("B", "X", "X", v("phi")),
            }
        }
        Family::D0 => d_even(abx(), &v("a"), &v("b"), &v("q")),
        Family::D1 => d_even(abx(), &v("a"), &v("b"), &v("q")).bracket("A", "X", "X", conformal_weight(&v("alpha"), &v("beta"))),
        Family::D2 => {
            let a = v("a");
            let b = v("b");
            let alpha = half(&a + &MultiPoly::one());
            d_even(abx(), &a, &b, &v("q"))
                .bracket("A", "X", "X", conformal_weight(&alpha, &half(b.clone())))
                .bracket("X", "X", "B", two)
        }
        Family::D3 => {
            let b = v("b");
            d_even(abx(), &MultiPoly::zero(), &b, &v("q"))
                .bracket("A", "X", "X", conformal_weight(&MultiPoly::one(), &half(b.clone())))
                .bracket("X", "X", "B", MultiPoly::d() + b)
        }
        Family::D4 => d_even(abx(), &MultiPoly::one(), &MultiPoly::zero(), &MultiPoly::zero())
            .bracket("A", "X", "X", conformal_weight(&v("alpha"), &v("beta")))
            .bracket("B", "X", "X", v("gamma")),
        Family::Dbar => d_even(abx(), &v("a"), &v("b"), &v("q"))
            .bracket("A", "X", "X", conformal_weight(&v("alpha"), &v("beta")))
            .bracket("B", "X", "X", v("gamma")),
    };
    out.build()
}

fn general_o(variant: u8, n: usize, polys: &[MultiPoly], check: bool) -> Result<ConformalSuperAlgebra> {
    if polys.len() != n {
        return Err(Error::InvalidSlot { slot: "polys".into(), reason: format!("expected {n} polynomials, got {}", polys.len()) });
    }
    let mut b = ConformalSuperAlgebra::builder();
    for i in 1..=n {
        b = b.even(&format!("A{i}"));
    }
    b = b.odd("X");
    for (i, p) in polys.iter().enumerate() {
        let (bad, name) = match variant {
            1 => (p.contains_var(&Var::Partial), format!("phi{}", i + 1)),
            _ => (p.contains_var(&Var::Lambda), format!("psi{}", i + 1)),
        };
        if check && (bad || p.contains_var(&Var::Mu)) {
            let var = if variant == 1 { "l" } else { "d" };
            return Err(Error::InvalidSlot { slot: name, reason: format!("must be a polynomial in {var} only") });
        }
        let ai = format!("A{}", i + 1);
        b = match variant {
            1 => b.bracket(&ai, "X", "X", p.clone()),
            _ => b.bracket("X", "X", &ai, p.clone()),
        };
    }
    b.build()
}

/// Õ₁ (variant 1, φᵢ in λ) or Õ₂ (variant 2, ψᵢ in ∂) of rank (n+1).
pub fn build_general_o(variant: u8, n: usize, polys: &[MultiPoly]) -> Result<ConformalSuperAlgebra> {
    if !(1..=2).contains(&variant) {
        return Err(Error::Domain(format!("variant must be 1 or 2, got {variant}")));
    }
    general_o(variant, n, polys, true)
}

/// The all-even rank-three W(a,b,r) algebra on A, B, X.
pub fn w_algebra(a: &MultiPoly, b: &MultiPoly, r: &MultiPoly) -> Result<ConformalSuperAlgebra> {
    ConformalSuperAlgebra::builder()
        .even("A")
        .even("B")
        .even("X")
        .bracket("A", "A", "A", vir_poly())
        .bracket("A", "B", "B", MultiPoly::d() + MultiPoly::l())
        .bracket("A", "X", "X", conformal_weight(a, b))
        .bracket("B", "X", "X", r.clone())
        .build()
}

/// Family instances exercised by catalog verification. D̄ appears once per
/// admissible component.
pub fn verification_specs() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for f in Family::all() {
        if f == Family::Dbar {
            out.push(FamilySpec::new(f).set("gamma", MultiPoly::zero()).expect("slot"));
            out.push(
                FamilySpec::new(f)
                    .set("a", MultiPoly::one())
                    .and_then(|s| s.set("b", MultiPoly::zero()))
                    .expect("slot"),
            );
        } else {
            out.push(FamilySpec::new(f));
        }
    }
    out
}

/// Type D instances with a nonzero Condition 1 template, one per admissible a.
pub fn condition1_specs(family: Family) -> Vec<FamilySpec> {
    condition1_table()
        .into_iter()
        .filter(|e| family.fixed_a().as_ref().is_none_or(|a| *a == e.a))
        .map(|e| {
            let mut s = FamilySpec::new(family);
            if family.fixed_a().is_none() {
                s = s.set_rat("a", e.a.clone()).expect("slot");
            }
            s.set("b", MultiPoly::zero()).and_then(|s| s.set("q", e.template)).expect("slot")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    #[test]
    fn ns_brackets() {
        let ns = FamilySpec::new(Family::NS).build().unwrap();
        assert_eq!(ns.entry_named("L", "G", "G"), p("d+3/2*l"));
        assert_eq!(ns.entry_named("G", "G", "L"), p("2"));
        assert!(ns.is_lie_conformal());
    }

    #[test]
    fn every_family_satisfies_axioms() {
        for spec in verification_specs() {
            let alg = spec.build().unwrap_or_else(|e| panic!("{}: {e}", spec.label()));
            assert!(alg.check_skew().is_empty(), "{}", spec.label());
            assert!(alg.check_jacobi().is_empty(), "{}", spec.label());
        }
    }

    #[test]
    fn d5_is_hvs() {
        let d2 = FamilySpec::new(Family::D2)
            .set("a", p("1"))
            .unwrap()
            .set("b", p("0"))
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(d2, FamilySpec::new(Family::HVS).build().unwrap());
        assert_eq!(d2, FamilySpec::new(Family::D5).build().unwrap());
    }

    #[test]
    fn d3_shape() {
        let d3 = FamilySpec::new(Family::D3).build().unwrap();
        assert_eq!(d3.entry_named("X", "X", "B"), p("d+b"));
        assert_eq!(d3.entry_named("A", "X", "X"), p("d+l+1/2*b"));
    }

    #[test]
    fn condition1_templates() {
        assert_eq!(condition1_q(&rat(1), &p("c"), None).unwrap(), p("c*(d+2*l)"));
        assert_eq!(
            condition1_q(&rat(-6), &p("c"), None).unwrap(),
            p("c*(d+2*l)*(11*(d*l+l^2)^4+2*(d*l+l^2)^3*d^2)")
        );
        assert_eq!(condition1_q(&rat(0), &p("c"), Some(&p("e"))).unwrap(), p("(d+2*l)*(c*(d*l+l^2)+e*d)"));
        assert!(condition1_q(&rat(-4), &p("c"), Some(&p("e"))).is_err());
        assert!(condition1_q(&rat(2), &p("c"), None).is_err());
        for e in condition1_table() {
            let alg = abx().bracket("A", "A", "B", e.template.clone()).build().unwrap();
            assert!(alg.check_skew().is_empty());
        }
    }

    #[test]
    fn condition1_validation() {
        let ok = FamilySpec::new(Family::D1).set("a", p("-4")).unwrap().set("b", p("0")).unwrap();
        assert!(ok.clone().set("q", p("3*(d+2*l)*(d*l+l^2)^3")).unwrap().build().is_ok());
        assert!(ok.clone().set("q", p("k*(d+2*l)*(d*l+l^2)^3")).unwrap().build().is_ok());
        let bad = ok.set("q", p("d+2*l")).unwrap();
        assert!(matches!(bad.build(), Err(Error::Condition1(_))));
        // ∂+2λ is removed by A ↦ A + cB, so the axioms alone accept it.
        assert!(bad.build_forced().unwrap().check_jacobi().is_empty());
        let off = FamilySpec::new(Family::D0).set("a", p("2")).unwrap().set("b", p("0")).unwrap();
        let off = off.set("q", p("(d+2*l)*(d*l+l^2)^3")).unwrap();
        assert!(off.build().is_err());
        assert!(!off.build_forced().unwrap().check_jacobi().is_empty());
        let with_b = FamilySpec::new(Family::D0).set("a", p("1")).unwrap().set("b", p("1")).unwrap();
        assert!(with_b.set("q", p("d+2*l")).unwrap().build().is_err());
    }

    #[test]
    fn nonzero_slots() {
        assert!(FamilySpec::new(Family::A3).set("phi3", p("0")).unwrap().build().is_err());
        assert!(FamilySpec::new(Family::A1).set("f1", p("l")).unwrap().build().is_err());
        assert!(FamilySpec::new(Family::B1).set("alpha", p("l")).unwrap().build().is_err());
        assert!(FamilySpec::new(Family::B1).set("nope", p("1")).is_err());
    }

    #[test]
    fn dbar_needs_admissible_component() {
        let general = FamilySpec::new(Family::Dbar);
        assert!(general.build().is_err());
        assert!(!general.build_forced().unwrap().check_jacobi().is_empty());
    }

    #[test]
    fn general_o() {
        let o1 = build_general_o(1, 2, &[p("l"), p("1")]).unwrap();
        assert!(o1.is_lie_conformal());
        let o2 = build_general_o(2, 3, &[p("d"), p("1"), p("0")]).unwrap();
        assert!(o2.is_lie_conformal());
        let trivial = build_general_o(1, 1, &[p("0")]).unwrap();
        assert!(trivial.table().is_empty());
        assert!(build_general_o(1, 1, &[p("d")]).is_err());
    }

    #[test]
    fn super_deformations() {
        let w = w_algebra(&p("a"), &p("b"), &p("r")).unwrap();
        assert!(w.is_lie_conformal());
        let d4 = FamilySpec::new(Family::D4)
            .set("alpha", p("a"))
            .unwrap()
            .set("beta", p("b"))
            .unwrap()
            .set("gamma", p("r"))
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(w.super_deform("X").unwrap(), d4);
        let vir = FamilySpec::new(Family::Vir).build().unwrap();
        assert!(vir.super_deform("L").is_err());
        let hv = FamilySpec::new(Family::HV).build().unwrap().super_deform("H").unwrap();
        assert!(hv.is_lie_conformal());
    }

    #[test]
    fn family_tags_round_trip() {
        for f in Family::all() {
            assert_eq!(Family::parse(&f.tag()).unwrap(), f);
        }
        assert_eq!(Family::parse("O1(5)").unwrap(), Family::OTilde1(5));
        assert!(Family::parse("E7").is_err());
    }
}
