//! Graded automorphisms of rank (2+1) algebras and the group constraints of
//! the catalog families.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{in_span, Family, FamilySpec};
use crate::error::{Error, Result};
use crate::lcsa::{ConformalSuperAlgebra, Element};
use crate::polyring::{frac, rat, MultiPoly, Rational, Var};

/// σ(A) = e₀₀A + e₀₁B, σ(B) = e₁₀A + e₁₁B, σ(X) = k₃X. The even block is
/// upper triangular with constant diagonal, or anti-diagonal and constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAutomorphism {
    even: [[MultiPoly; 2]; 2],
    odd: Rational,
}

fn constant_nonzero(p: &MultiPoly) -> Option<Rational> {
    p.as_constant().filter(|c| !c.is_zero())
}

impl GradedAutomorphism {
    pub fn new(even: [[MultiPoly; 2]; 2], odd: Rational) -> Result<GradedAutomorphism> {
        if odd.is_zero() {
            return Err(Error::Domain("k3 must be nonzero".into()));
        }
        for row in &even {
            for e in row {
                if !e.only_vars(&[Var::Partial]) && e.vars().iter().any(|v| !v.is_param() && *v != Var::Partial) {
                    return Err(Error::Domain(format!("entry {e} must be a polynomial in d")));
                }
            }
        }
        let triangular = even[1][0].is_zero()
            && constant_nonzero(&even[0][0]).is_some()
            && constant_nonzero(&even[1][1]).is_some();
        let swap = even[0][0].is_zero()
            && even[1][1].is_zero()
            && constant_nonzero(&even[0][1]).is_some()
            && constant_nonzero(&even[1][0]).is_some();
        if !triangular && !swap {
            return Err(Error::Domain("even block must be upper triangular with constant diagonal, or a constant swap".into()));
        }
        Ok(GradedAutomorphism { even, odd })
    }

    pub fn triangular(k1: Rational, g: MultiPoly, k2: Rational, k3: Rational) -> Result<GradedAutomorphism> {
        GradedAutomorphism::new([[MultiPoly::constant(k1), g], [MultiPoly::zero(), MultiPoly::constant(k2)]], k3)
    }

    /// A ↦ cB, B ↦ dA.
    pub fn swap(c: Rational, d: Rational, k3: Rational) -> Result<GradedAutomorphism> {
        GradedAutomorphism::new([[MultiPoly::zero(), MultiPoly::constant(c)], [MultiPoly::constant(d), MultiPoly::zero()]], k3)
    }

    pub fn identity() -> GradedAutomorphism {
        GradedAutomorphism::triangular(Rational::one(), MultiPoly::zero(), Rational::one(), Rational::one()).expect("identity")
    }

    pub fn is_swap(&self) -> bool {
        self.even[0][0].is_zero()
    }

    pub fn even(&self) -> &[[MultiPoly; 2]; 2] {
        &self.even
    }

    pub fn k1(&self) -> Rational {
        self.even[0][0].constant_term()
    }

    pub fn k2(&self) -> Rational {
        self.even[1][1].constant_term()
    }

    pub fn k3(&self) -> Rational {
        self.odd.clone()
    }

    pub fn g(&self) -> MultiPoly {
        self.even[0][1].clone()
    }

    /// self ∘ other
    pub fn compose(&self, other: &GradedAutomorphism) -> Result<GradedAutomorphism> {
        let (s, t) = (&self.even, &other.even);
        let e = |i: usize, k: usize| &(&t[i][0] * &s[0][k]) + &(&t[i][1] * &s[1][k]);
        GradedAutomorphism::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]], &self.odd * &other.odd)
    }

    pub fn invert(&self) -> Result<GradedAutomorphism> {
        let inv = |p: &MultiPoly| -> Result<Rational> {
            constant_nonzero(p).map(|c| Rational::one() / c).ok_or_else(|| Error::Domain("singular diagonal".into()))
        };
        let k3 = Rational::one() / &self.odd;
        if self.is_swap() {
            let (c, d) = (inv(&self.even[0][1])?, inv(&self.even[1][0])?);
            return GradedAutomorphism::swap(d, c, k3);
        }
        let (a, b) = (inv(&self.even[0][0])?, inv(&self.even[1][1])?);
        let g = self.even[0][1].scale(&-(&a * &b));
        GradedAutomorphism::triangular(a, g, b, k3)
    }

    fn image(&self, idx: &[usize; 3], k: usize) -> Element {
        let [a, b, x] = *idx;
        if k == a {
            Element::from_coords([(a, self.even[0][0].clone()), (b, self.even[0][1].clone())])
        } else if k == b {
            Element::from_coords([(a, self.even[1][0].clone()), (b, self.even[1][1].clone())])
        } else if k == x {
            Element::from_coords([(x, MultiPoly::constant(self.odd.clone()))])
        } else {
            Element::generator(k)
        }
    }

    fn apply(&self, idx: &[usize; 3], e: &Element) -> Element {
        let mut out = Element::zero();
        for (&k, p) in e.coords() {
            out = out.add(&self.image(idx, k).scale(p));
        }
        out
    }
}

impl fmt::Display for GradedAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.even;
        write!(f, "A -> ({})A + ({})B, B -> ({})A + ({})B, X -> ({})X", e[0][0], e[0][1], e[1][0], e[1][1], self.odd)
    }
}

fn abx(alg: &ConformalSuperAlgebra) -> Result<[usize; 3]> {
    let get = |n: &str| alg.index_of(n).ok_or_else(|| Error::Domain(format!("generator `{n}` missing")));
    if alg.rank() != 3 {
        return Err(Error::Domain("rank (2+1) algebra on A, B, X expected".into()));
    }
    Ok([get("A")?, get("B")?, get("X")?])
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AutReport {
    /// (i, j, σ[i_λ j] − [σi_λ σj]) for failing generator pairs.
    pub residuals: Vec<(usize, usize, Element)>,
}

impl AutReport {
    pub fn holds(&self) -> bool {
        self.residuals.is_empty()
    }
}

pub fn automorphism_report(alg: &ConformalSuperAlgebra, s: &GradedAutomorphism) -> Result<AutReport> {
    let idx = abx(alg)?;
    let mut report = AutReport::default();
    for i in 0..3 {
        for j in 0..3 {
            let lhs = s.apply(&idx, &alg.bracket_bilinear(&Element::generator(i), &Element::generator(j)));
            let rhs = alg.bracket_bilinear(&s.image(&idx, i), &s.image(&idx, j));
            let diff = lhs.add(&rhs.scale(&MultiPoly::int(-1)));
            if !diff.is_zero() {
                report.residuals.push((i, j, diff));
            }
        }
    }
    Ok(report)
}

pub fn is_automorphism(alg: &ConformalSuperAlgebra, s: &GradedAutomorphism) -> Result<bool> {
    Ok(automorphism_report(alg, s)?.holds())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KRule {
    One,
    Free,
    /// ±1
    Sign,
    /// k₂ = k₁²
    SquareOfK1,
    /// k₂ = k₃²
    SquareOfK3,
    /// k₃ = ±k₁
    SignOfK1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GRule {
    Zero,
    Free,
    /// Rational span of the listed polynomials in ∂.
    Span(Vec<MultiPoly>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutCase {
    pub label: String,
    pub group: String,
    pub k1: KRule,
    pub k2: KRule,
    pub k3: KRule,
    pub g: GRule,
}

impl AutCase {
    fn new(label: &str, group: &str, k1: KRule, k2: KRule, k3: KRule, g: GRule) -> AutCase {
        AutCase { label: label.into(), group: group.into(), k1, k2, k3, g }
    }
}

fn rule_holds(rule: &KRule, v: &Rational, s: &GradedAutomorphism) -> bool {
    let one = Rational::one();
    match rule {
        KRule::One => *v == one,
        KRule::Free => !v.is_zero(),
        KRule::Sign => *v == one || *v == -one,
        KRule::SquareOfK1 => *v == s.k1() * s.k1(),
        KRule::SquareOfK3 => *v == s.k3() * s.k3(),
        KRule::SignOfK1 => *v == s.k1() || *v == -s.k1(),
    }
}

/// Membership in the group described by `case`.
pub fn check_family(case: &AutCase, s: &GradedAutomorphism) -> bool {
    if s.is_swap() {
        return false;
    }
    let g_ok = match &case.g {
        GRule::Zero => s.g().is_zero(),
        GRule::Free => true,
        GRule::Span(basis) => in_span(&s.g(), basis),
    };
    g_ok && rule_holds(&case.k1, &s.k1(), s) && rule_holds(&case.k2, &s.k2(), s) && rule_holds(&case.k3, &s.k3(), s)
}

fn neg_d() -> MultiPoly {
    -MultiPoly::d()
}

fn poly_slot(spec: &FamilySpec, name: &str) -> Result<MultiPoly> {
    let v = spec.value(name);
    if !v.params().is_empty() {
        return Err(Error::NotInstantiated(format!("slot `{name}` = {v} is symbolic")));
    }
    Ok(v)
}

fn scalar_slot(spec: &FamilySpec, name: &str) -> Result<Rational> {
    let v = poly_slot(spec, name)?;
    v.as_constant().ok_or_else(|| Error::InvalidSlot { slot: name.into(), reason: "must be a scalar".into() })
}

/// Even automorphisms of a type D even part, as (label, group, g, k₂).
fn type_d_even(a: &Rational, b: &Rational, q_zero: bool) -> (String, String, GRule, KRule) {
    let d = MultiPoly::d();
    if !b.is_zero() {
        let g = MultiPoly::one() - d.scale(&((a - Rational::one()) / b));
        return ("b!=0".into(), "C^x |x C".into(), GRule::Span(alloc::vec![g]), KRule::Free);
    }
    let small = [rat(1), rat(0), rat(-1)].contains(a);
    if !small {
        return if q_zero {
            ("b=0, a not in {1,0,-1}, Q=0".into(), "C^x |x C".into(), GRule::Span(alloc::vec![d]), KRule::Free)
        } else {
            ("b=0, a not in {1,0,-1}, Q!=0".into(), "C".into(), GRule::Span(alloc::vec![d]), KRule::One)
        };
    }
    let extra = if *a == rat(1) {
        MultiPoly::one()
    } else if a.is_zero() {
        d.pow(2)
    } else {
        d.pow(3)
    };
    let span = GRule::Span(alloc::vec![d, extra]);
    if q_zero {
        ("b=0, a in {1,0,-1}, Q=0".into(), "C^x |x C^2".into(), span, KRule::Free)
    } else {
        ("b=0, a in {1,0,-1}, Q!=0".into(), "C^2".into(), span, KRule::One)
    }
}

/// The automorphism-group case of an instantiated family.
pub fn aut_case(spec: &FamilySpec) -> Result<AutCase> {
    use KRule::*;
    let fam = spec.family;
    let tag = fam.tag();
    let lbl = |s: &str| format!("{tag}: {s}");
    Ok(match fam {
        Family::A1 => {
            if poly_slot(spec, "phi1")?.is_zero() {
                AutCase::new(&lbl("phi1=0"), "(C^x |x C[d]) x C^x", Free, SquareOfK1, Free, GRule::Free)
            } else {
                AutCase::new(&lbl("phi1!=0"), "C[d] x C^x", One, One, Free, GRule::Free)
            }
        }
        Family::A2 => {
            if poly_slot(spec, "psi")?.is_zero() {
                AutCase::new(&lbl("psi=0"), "(C^x |x C[d]) x C^x", Free, SquareOfK1, Free, GRule::Free)
            } else {
                AutCase::new(&lbl("psi!=0"), "(C^x |x C[d]) x Z2", Free, SquareOfK1, SignOfK1, GRule::Free)
            }
        }
        Family::A3 => {
            let phi = poly_slot(spec, "phi3")?.substitute(&Var::Lambda, &neg_d());
            AutCase::new(&lbl("k3^2=k2"), "C^x |x C", One, SquareOfK3, Free, GRule::Span(alloc::vec![phi]))
        }
        Family::A4 => {
            let p = poly_slot(spec, "p")?.substitute(&Var::Lambda, &neg_d());
            AutCase::new(&lbl("g=k p(-d)"), "(C^x |x C) x C^x", One, Free, Free, GRule::Span(alloc::vec![p]))
        }
        Family::B1 => AutCase::new(&lbl("identity even block"), "C^x", One, One, Free, GRule::Zero),
        Family::B2 => AutCase::new(&lbl("k3^2=1"), "Z2", One, One, Sign, GRule::Zero),
        Family::C1 => AutCase::new(&lbl("diag(1,k)"), "C^x x C^x", One, Free, Free, GRule::Zero),
        Family::C2 => AutCase::new(&lbl("k3^2=1"), "C^x x Z2", One, Free, Sign, GRule::Zero),
        Family::C3 => AutCase::new(&lbl("k=1"), "C^x", One, One, Free, GRule::Zero),
        Family::D1 | Family::D2 | Family::D3 => {
            let a = if fam == Family::D3 { rat(0) } else { scalar_slot(spec, "a")? };
            let b = scalar_slot(spec, "b")?;
            let q_zero = poly_slot(spec, "q")?.is_zero();
            let (sub, group, g, k2) = type_d_even(&a, &b, q_zero);
            if fam == Family::D1 {
                AutCase::new(&lbl(&sub), &format!("({group}) x C^x"), One, k2, Free, g)
            } else if k2 == One {
                AutCase::new(&lbl(&format!("{sub}, k3^2=k2")), &format!("{group} x Z2"), One, One, Sign, g)
            } else {
                AutCase::new(&lbl(&format!("{sub}, k3^2=k2")), &group, One, SquareOfK3, Free, g)
            }
        }
        Family::D4 => {
            if scalar_slot(spec, "gamma")?.is_zero() {
                let g = GRule::Span(alloc::vec![MultiPoly::d(), MultiPoly::one()]);
                AutCase::new(&lbl("gamma=0"), "(C^x |x C^2) x C^x", One, Free, Free, g)
            } else {
                AutCase::new(&lbl("gamma!=0"), "C^x", One, One, Free, GRule::Zero)
            }
        }
        other => return Err(Error::Unknown(format!("no automorphism case for {other}"))),
    })
}

fn fs(family: Family, slots: &[(&str, &str)]) -> FamilySpec {
    slots.iter().fold(FamilySpec::new(family), |s, (k, v)| s.set_text(k, v).expect("slot"))
}

/// One instance per case of the group tables.
pub fn aut_instances() -> Vec<FamilySpec> {
    use Family::*;
    let vir = "d+2*l";
    let mut out = alloc::vec![
        fs(A1, &[("f1", vir), ("phi1", "0")]),
        fs(A1, &[("f1", vir), ("phi1", "l")]),
        fs(A2, &[("f2", vir), ("psi", "0")]),
        fs(A2, &[("f2", vir), ("psi", "1")]),
        fs(A3, &[("phi3", "l")]),
        fs(A4, &[("p", "l"), ("phi4", "l+1")]),
        fs(B1, &[("alpha", "1"), ("beta", "0")]),
        fs(B2, &[]),
        fs(C1, &[("alpha", "1"), ("beta", "1")]),
        fs(C2, &[]),
        fs(C3, &[("phi", "l+1")]),
    ];
    let d_rows = [
        ("2", "1", "0"),
        ("-4", "0", "(d+2*l)*(d*l+l^2)^3"),
        ("2", "0", "0"),
        ("-1", "0", "(d+2*l)*d^2"),
        ("0", "0", "0"),
    ];
    for fam in [D1, D2] {
        for (a, b, q) in d_rows {
            let mut slots = alloc::vec![("a", a), ("b", b), ("q", q)];
            if fam == D1 {
                slots.extend([("alpha", "1"), ("beta", "0")]);
            }
            out.push(fs(fam, &slots));
        }
    }
    out.push(fs(D3, &[("b", "1"), ("q", "0")]));
    out.push(fs(D3, &[("b", "0"), ("q", "(d+2*l)*(d*l+l^2)")]));
    out.push(fs(D3, &[("b", "0"), ("q", "0")]));
    out.push(fs(D4, &[("alpha", "1"), ("beta", "2"), ("gamma", "1")]));
    out.push(fs(D4, &[("alpha", "1"), ("beta", "2"), ("gamma", "0")]));
    out
}

/// Seeded draws from {±1, ±2, ±3, ±1/2} and polynomials of degree ≤ 3.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn below(&mut self, n: u32) -> u32 {
        self.rng.next_u32() % n
    }

    pub fn constant(&mut self) -> Rational {
        let mag = [rat(1), rat(2), rat(3), frac(1, 2)][self.below(4) as usize].clone();
        if self.below(2) == 0 {
            mag
        } else {
            -mag
        }
    }

    fn maybe_constant(&mut self) -> Rational {
        if self.below(3) == 0 {
            Rational::zero()
        } else {
            self.constant()
        }
    }

    pub fn poly(&mut self) -> MultiPoly {
        let deg = self.below(4);
        (0..=deg).map(|e| MultiPoly::constant(self.maybe_constant()) * MultiPoly::d().pow(e)).sum()
    }

    fn sign(&mut self) -> Rational {
        if self.below(2) == 0 {
            Rational::one()
        } else {
            -Rational::one()
        }
    }

    pub fn member(&mut self, case: &AutCase) -> GradedAutomorphism {
        let k1 = match case.k1 {
            KRule::One => Rational::one(),
            _ => self.constant(),
        };
        let k3 = match case.k3 {
            KRule::Sign => self.sign(),
            KRule::SignOfK1 => self.sign() * &k1,
            _ => self.constant(),
        };
        let k2 = match case.k2 {
            KRule::One => Rational::one(),
            KRule::SquareOfK1 => &k1 * &k1,
            KRule::SquareOfK3 => &k3 * &k3,
            _ => self.constant(),
        };
        let g = match &case.g {
            GRule::Zero => MultiPoly::zero(),
            GRule::Free => self.poly(),
            GRule::Span(basis) => basis.iter().map(|b| b.scale(&self.maybe_constant())).sum(),
        };
        GradedAutomorphism::triangular(k1, g, k2, k3).expect("member shape")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    K1,
    K2,
    K3,
    G,
}

/// Breaks exactly one constraint of `case` in `s`; None if that slot is free.
pub fn perturb(case: &AutCase, s: &GradedAutomorphism, which: Perturbation) -> Option<GradedAutomorphism> {
    let two = rat(2);
    let (mut k1, mut g, mut k2, mut k3) = (s.k1(), s.g(), s.k2(), s.k3());
    match which {
        Perturbation::K1 => match case.k1 {
            KRule::One => k1 = two,
            _ => return None,
        },
        Perturbation::K2 => match case.k2 {
            KRule::Free => return None,
            _ => k2 = &k2 * &rat(3),
        },
        Perturbation::K3 => match case.k3 {
            KRule::Free => return None,
            _ => k3 = &k3 * &two,
        },
        Perturbation::G => match &case.g {
            GRule::Free => return None,
            GRule::Zero => g = MultiPoly::one(),
            GRule::Span(basis) => {
                let e = (0..=4).find(|&e| !in_span(&MultiPoly::d().pow(e), basis))?;
                g = g + MultiPoly::d().pow(e);
            }
        },
    }
    GradedAutomorphism::triangular(k1, g, k2, k3).ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SampleReport {
    pub members: usize,
    pub member_failures: Vec<String>,
    pub closure_failures: Vec<String>,
    pub nonmembers: usize,
    /// Samples where the family predicate and the exact check disagree.
    pub soundness_failures: Vec<String>,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.member_failures.is_empty() && self.closure_failures.is_empty() && self.soundness_failures.is_empty()
    }
}

/// Draws `count` members, verifies each exactly, checks closure under
/// compose/invert and associativity, and compares the predicate with the
/// exact check on perturbed non-members.
pub fn group_axiom_sample(spec: &FamilySpec, count: usize, seed: u64) -> Result<SampleReport> {
    let alg = spec.build()?;
    let case = aut_case(spec)?;
    let mut rng = Sampler::new(seed);
    let mut report = SampleReport::default();
    let mut prev: Vec<GradedAutomorphism> = Vec::new();
    let kinds = [Perturbation::K1, Perturbation::K2, Perturbation::K3, Perturbation::G];
    for n in 0..count {
        let s = rng.member(&case);
        report.members += 1;
        if !is_automorphism(&alg, &s)? || !check_family(&case, &s) {
            report.member_failures.push(s.to_string());
        }
        let inv = s.invert()?;
        if inv.compose(&s)? != GradedAutomorphism::identity() || !check_family(&case, &inv) {
            report.closure_failures.push(format!("inverse of {s}"));
        }
        if let Some(t) = prev.last() {
            let st = s.compose(t)?;
            if !check_family(&case, &st) || !is_automorphism(&alg, &st)? {
                report.closure_failures.push(format!("{s} o {t}"));
            }
            if prev.len() >= 2 {
                let u = &prev[prev.len() - 2];
                if s.compose(t)?.compose(u)? != s.compose(&t.compose(u)?)? {
                    report.closure_failures.push(format!("associativity at sample {n}"));
                }
            }
        }
        if let Some(bad) = perturb(&case, &s, kinds[n % kinds.len()]) {
            report.nonmembers += 1;
            if check_family(&case, &bad) != is_automorphism(&alg, &bad)? {
                report.soundness_failures.push(bad.to_string());
            }
        }
        prev.push(s);
    }
    Ok(report)
}

/// For each non-free constraint of the case, a member with exactly that
/// constraint broken; returns (constraint, still an automorphism?).
pub fn necessity_probes(spec: &FamilySpec, seed: u64) -> Result<Vec<(Perturbation, bool)>> {
    let alg = spec.build()?;
    let case = aut_case(spec)?;
    let mut rng = Sampler::new(seed);
    let s = rng.member(&case);
    let mut out = Vec::new();
    for which in [Perturbation::K1, Perturbation::K2, Perturbation::K3, Perturbation::G] {
        if let Some(bad) = perturb(&case, &s, which) {
            out.push((which, is_automorphism(&alg, &bad)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_poly_open;

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    #[test]
    fn a3_example() {
        let spec = fs(Family::A3, &[("phi3", "l")]);
        let alg = spec.build().unwrap();
        let s = GradedAutomorphism::triangular(rat(1), p("-2*d"), rat(4), rat(2)).unwrap();
        assert!(is_automorphism(&alg, &s).unwrap());
        assert!(check_family(&aut_case(&spec).unwrap(), &s));
    }

    #[test]
    fn identity_everywhere() {
        for spec in aut_instances() {
            let alg = spec.build().unwrap();
            assert!(is_automorphism(&alg, &GradedAutomorphism::identity()).unwrap(), "{}", spec.label());
        }
    }

    #[test]
    fn b_family_rejections() {
        let b2 = FamilySpec::new(Family::B2).build().unwrap();
        let s = GradedAutomorphism::triangular(rat(1), p("0"), rat(1), rat(2)).unwrap();
        assert!(!is_automorphism(&b2, &s).unwrap());
        let b1 = fs(Family::B1, &[("alpha", "1"), ("beta", "0")]).build().unwrap();
        let swap = GradedAutomorphism::swap(rat(1), rat(1), rat(1)).unwrap();
        assert!(!is_automorphism(&b1, &swap).unwrap());
        assert!(!check_family(&aut_case(&fs(Family::B1, &[("alpha", "1"), ("beta", "0")])).unwrap(), &swap));
    }

    #[test]
    fn inverse_formula() {
        let s = GradedAutomorphism::triangular(rat(2), p("d+1"), rat(3), rat(5)).unwrap();
        let inv = s.invert().unwrap();
        assert_eq!(inv.g(), p("-1/6*d-1/6"));
        assert_eq!(inv.compose(&s).unwrap(), GradedAutomorphism::identity());
        assert_eq!(GradedAutomorphism::identity().compose(&s).unwrap(), s);
        let sw = GradedAutomorphism::swap(rat(2), rat(3), rat(1)).unwrap();
        assert_eq!(sw.invert().unwrap().compose(&sw).unwrap(), GradedAutomorphism::identity());
    }

    #[test]
    fn shape_rejected() {
        assert!(GradedAutomorphism::new([[p("d"), p("0")], [p("0"), p("1")]], rat(1)).is_err());
        assert!(GradedAutomorphism::triangular(rat(1), p("0"), rat(1), rat(0)).is_err());
    }

    #[test]
    fn every_case_samples() {
        for spec in aut_instances() {
            let r = group_axiom_sample(&spec, 12, 7).unwrap();
            assert!(r.passed(), "{}: {r:?}", spec.label());
        }
    }

    #[test]
    fn necessity() {
        for spec in aut_instances() {
            for (which, holds) in necessity_probes(&spec, 3).unwrap() {
                assert!(!holds, "{} {which:?}", spec.label());
            }
        }
    }

    #[test]
    fn d1_shape_of_g() {
        let spec = fs(Family::D1, &[("a", "-1"), ("b", "0"), ("q", "(d+2*l)*d^2"), ("alpha", "1"), ("beta", "0")]);
        let alg = spec.build().unwrap();
        let good = GradedAutomorphism::triangular(rat(1), p("2*d+3*d^3"), rat(1), rat(5)).unwrap();
        assert!(is_automorphism(&alg, &good).unwrap());
        let bad = GradedAutomorphism::triangular(rat(1), p("2*d+d^2"), rat(1), rat(5)).unwrap();
        assert!(!is_automorphism(&alg, &bad).unwrap());
    }

    #[test]
    fn d4_gamma() {
        let spec = fs(Family::D4, &[("alpha", "1"), ("beta", "2"), ("gamma", "1")]);
        let alg = spec.build().unwrap();
        let case = aut_case(&spec).unwrap();
        let s = GradedAutomorphism::triangular(rat(1), p("0"), rat(1), rat(-3)).unwrap();
        assert!(is_automorphism(&alg, &s).unwrap() && check_family(&case, &s));
        let t = GradedAutomorphism::triangular(rat(1), p("d"), rat(1), rat(1)).unwrap();
        assert!(!is_automorphism(&alg, &t).unwrap());
    }
}
