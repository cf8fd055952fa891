//! Conformal modules over catalog algebras.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::{conformal_weight, Family, FamilySpec};
use crate::error::{Error, Result};
use crate::lcsa::{hermite_normal_form, koszul, BasisElement, ConformalSuperAlgebra, Element, Parity, PolySubmodule};
use crate::polyring::{factorial, frac, parse_poly_open, rat, MultiPoly, Rational, UniPoly, Var};

/// Action table: (algebra generator, module generator) → target → P(∂,λ).
pub type ActionTable = BTreeMap<(usize, usize), BTreeMap<usize, MultiPoly>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalModule {
    algebra: ConformalSuperAlgebra,
    basis: Vec<BasisElement>,
    action: ActionTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleViolation {
    pub i: usize,
    pub j: usize,
    pub u: usize,
    pub z: usize,
    pub residual: MultiPoly,
}

impl ConformalModule {
    pub fn new(algebra: ConformalSuperAlgebra, basis: Vec<BasisElement>, action: ActionTable) -> Result<ConformalModule> {
        let mut clean = ActionTable::new();
        for (&(i, u), row) in &action {
            if i >= algebra.rank() || u >= basis.len() {
                return Err(Error::Domain(format!("action index ({i}, {u}) out of range")));
            }
            for (&w, p) in row {
                if w >= basis.len() {
                    return Err(Error::Domain(format!("action target {w} out of range")));
                }
                if p.contains_var(&Var::Mu) {
                    return Err(Error::Domain("action polynomials must not mention m".into()));
                }
                if p.is_zero() {
                    continue;
                }
                if algebra.parity(i).add(basis[u].parity) != basis[w].parity {
                    return Err(Error::InvalidAlgebra(format!(
                        "{}_l {} has a component on {} of the wrong parity",
                        algebra.name(i),
                        basis[u].name,
                        basis[w].name
                    )));
                }
                clean.entry((i, u)).or_default().insert(w, p.clone());
            }
        }
        Ok(ConformalModule { algebra, basis, action: clean })
    }

    pub fn algebra(&self) -> &ConformalSuperAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn table(&self) -> &ActionTable {
        &self.action
    }

    pub fn action(&self, i: usize, u: usize, w: usize) -> MultiPoly {
        self.action.get(&(i, u)).and_then(|r| r.get(&w)).cloned().unwrap_or_default()
    }

    pub fn params(&self) -> BTreeSet<Var> {
        let mut out = self.algebra.params();
        out.extend(self.action_params());
        out
    }

    /// Parameters of the action polynomials alone.
    pub fn action_params(&self) -> BTreeSet<Var> {
        self.action.values().flat_map(|row| row.values().flat_map(|p| p.params())).collect()
    }

    /// Replaces one action polynomial, bypassing nothing but parity checks.
    pub fn with_action(&self, i: usize, u: usize, w: usize, p: MultiPoly) -> Result<ConformalModule> {
        let mut action = self.action.clone();
        action.entry((i, u)).or_default().insert(w, p);
        ConformalModule::new(self.algebra.clone(), self.basis.clone(), action)
    }

    pub fn instantiate(&self, values: &[(Var, Rational)]) -> ConformalModule {
        let action = self
            .action
            .iter()
            .map(|(&k, row)| (k, row.iter().map(|(&w, p)| (w, p.evaluate(values))).filter(|(_, p)| !p.is_zero()).collect()))
            .collect::<ActionTable>();
        ConformalModule { algebra: self.algebra.instantiate(values), basis: self.basis.clone(), action }
    }

    pub fn parity_changed(&self) -> ConformalModule {
        let basis = self.basis.iter().map(|b| BasisElement::new(&b.name, b.parity.flip())).collect();
        ConformalModule { algebra: self.algebra.clone(), basis, action: self.action.clone() }
    }

    /// a_λ m for generator a and m = Σ p_w(∂) w, using a_λ(p(∂)w) = p(∂+λ) a_λ w.
    pub fn act(&self, i: usize, m: &Element) -> Element {
        let dl = MultiPoly::d() + MultiPoly::l();
        let mut out = Element::zero();
        for (&w, c) in m.coords() {
            let Some(row) = self.action.get(&(i, w)) else { continue };
            let shifted = c.substitute(&Var::Partial, &dl);
            for (&z, p) in row {
                out.add_coord(z, &shifted * p);
            }
        }
        out
    }

    /// a_(n)u = n!·(coefficient of λⁿ in a_λ u).
    pub fn jth_actions(&self, i: usize, m: &Element) -> BTreeMap<u32, Element> {
        let mut out: BTreeMap<u32, Element> = BTreeMap::new();
        for (&z, q) in self.act(i, m).coords() {
            for (n, c) in q.coeffs_in(&Var::Lambda) {
                out.entry(n).or_default().add_coord(z, c.scale(&Rational::from_integer(factorial(n))));
            }
        }
        out.retain(|_, e| !e.is_zero());
        out
    }

    /// Residuals of [a_λ b]_{λ+μ}v − a_λ(b_μ v) + (−1)^{|a||b|} b_μ(a_λ v).
    pub fn check_module(&self) -> Vec<ModuleViolation> {
        let (d, l, m) = (MultiPoly::d(), MultiPoly::l(), MultiPoly::m());
        let sub = |q: &MultiPoly, dd: &MultiPoly, ll: &MultiPoly| {
            q.substitute_many(&[(Var::Partial, dd.clone()), (Var::Lambda, ll.clone())])
        };
        let (dl, dm, lm, nlm) = (&d + &l, &d + &m, &l + &m, -(&l + &m));
        let n = self.algebra.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let sign = koszul(self.algebra.parity(i), self.algebra.parity(j));
                for u in 0..self.rank() {
                    let mut acc: BTreeMap<usize, MultiPoly> = BTreeMap::new();
                    if let Some(row) = self.algebra.row(i, j) {
                        for (&s, q) in row {
                            let q = sub(q, &nlm, &l);
                            if let Some(act) = self.action.get(&(s, u)) {
                                for (&z, p) in act {
                                    *acc.entry(z).or_default() += &q * &p.substitute(&Var::Lambda, &lm);
                                }
                            }
                        }
                    }
                    if let Some(row) = self.action.get(&(j, u)) {
                        for (&w, p) in row {
                            let p = sub(p, &dl, &m);
                            if let Some(act) = self.action.get(&(i, w)) {
                                for (&z, r) in act {
                                    *acc.entry(z).or_default() -= &p * r;
                                }
                            }
                        }
                    }
                    if let Some(row) = self.action.get(&(i, u)) {
                        for (&w, p) in row {
                            let p = sub(p, &dm, &l);
                            if let Some(act) = self.action.get(&(j, w)) {
                                for (&z, r) in act {
                                    *acc.entry(z).or_default() += (&p * &r.substitute(&Var::Lambda, &m)).scale(&sign);
                                }
                            }
                        }
                    }
                    for (z, residual) in acc {
                        if !residual.is_zero() {
                            out.push(ModuleViolation { i, j, u, z, residual });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_module(&self) -> bool {
        self.check_module().is_empty()
    }

    /// Largest n with a_(n)v ≠ 0 for generators a, v; None if a_λ v = 0.
    pub fn locality_bound(&self, i: usize, u: usize) -> Option<u32> {
        self.action.get(&(i, u))?.values().filter_map(|p| p.degree_in(&Var::Lambda)).max()
    }

    /// True iff a_(n)v = 0 for all generators and every n ≤ level past the
    /// λ-degree bound.
    pub fn locality_check(&self, level: u32) -> Result<bool> {
        require_instantiated(&self.action_params())?;
        for i in 0..self.algebra.rank() {
            for u in 0..self.rank() {
                let bound = self.locality_bound(i, u);
                let jth = self.jth_actions(i, &Element::generator(u));
                for n in 0..=level {
                    let beyond = bound.is_none_or(|b| n > b);
                    if beyond && jth.contains_key(&n) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Module on the remaining generators, after dividing out the span of
    /// `drop`, which must be action closed.
    pub fn quotient(&self, drop: &[usize]) -> Result<ConformalModule> {
        let dropped: BTreeSet<usize> = drop.iter().copied().collect();
        for (&(i, u), row) in &self.action {
            if dropped.contains(&u) && row.keys().any(|z| !dropped.contains(z)) {
                return Err(Error::Domain(format!(
                    "{}_l {} leaves the span being divided out",
                    self.algebra.name(i),
                    self.basis[u].name
                )));
            }
        }
        let keep: Vec<usize> = (0..self.rank()).filter(|u| !dropped.contains(u)).collect();
        let pos = |u: usize| keep.iter().position(|&k| k == u);
        let mut action = ActionTable::new();
        for (&(i, u), row) in &self.action {
            let Some(nu) = pos(u) else { continue };
            let r: BTreeMap<usize, MultiPoly> = row.iter().filter_map(|(&z, p)| pos(z).map(|nz| (nz, p.clone()))).collect();
            if !r.is_empty() {
                action.insert((i, nu), r);
            }
        }
        ConformalModule::new(self.algebra.clone(), keep.iter().map(|&u| self.basis[u].clone()).collect(), action)
    }
}

impl fmt::Display for ConformalModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.basis.iter().map(|b| format!("{}:{}", b.name, b.parity.as_str())).collect();
        writeln!(f, "module {}", names.join(", "))?;
        for (&(i, u), row) in &self.action {
            let parts: Vec<String> = row.iter().map(|(&z, p)| format!("({p}){}", self.basis[z].name)).collect();
            writeln!(f, "{}_l {} = {}", self.algebra.name(i), self.basis[u].name, parts.join(" + "))?;
        }
        Ok(())
    }
}

fn require_instantiated(params: &BTreeSet<Var>) -> Result<()> {
    match params.iter().next() {
        Some(p) => Err(Error::NotInstantiated(format!("parameter `{p}` is symbolic"))),
        None => Ok(()),
    }
}

/// p(∂) divides p(∂+λ)·act(∂,λ) in ℚ[λ][∂] for every action on the single
/// generator, so ℂ[∂]p(∂)v is a submodule.
pub fn rank1_closure_test(p: &MultiPoly, module: &ConformalModule) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::Domain("p must be nonzero".into()));
    }
    if module.rank() != 1 {
        return Err(Error::Domain("rank one module expected".into()));
    }
    if !p.only_vars(&[Var::Partial]) {
        return Err(Error::Domain(format!("{p} must be a polynomial in d with rational coefficients")));
    }
    require_instantiated(&module.action_params())?;
    let shifted = p.substitute(&Var::Partial, &(MultiPoly::d() + MultiPoly::l()));
    for i in 0..module.algebra.rank() {
        let act = module.action(i, 0, 0);
        let (_, r) = (&shifted * &act).div_rem(p, &Var::Partial)?;
        if !r.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn to_row(e: &Element, n: usize) -> Result<Vec<UniPoly>> {
    (0..n).map(|i| e.coord(i).to_uni(&Var::Partial)).collect()
}

fn to_element(row: &[UniPoly]) -> Element {
    Element::from_coords(row.iter().enumerate().map(|(i, u)| (i, u.to_multi(&Var::Partial))))
}

/// Smallest action-closed ℂ[∂]-submodule containing `generators`.
pub fn submodule_closure(module: &ConformalModule, generators: &[Vec<UniPoly>]) -> Result<PolySubmodule> {
    require_instantiated(&module.action_params())?;
    let n = module.rank();
    let mut rows: Vec<Vec<UniPoly>> = generators.to_vec();
    let mut current = hermite_normal_form(n, &rows);
    loop {
        for b in current.basis().to_vec() {
            let e = to_element(&b);
            for i in 0..module.algebra.rank() {
                for m in module.jth_actions(i, &e).values() {
                    rows.push(to_row(m, n)?);
                }
            }
        }
        let next = hermite_normal_form(n, &rows);
        if next.basis() == current.basis() {
            return Ok(next);
        }
        rows = next.basis().to_vec();
        current = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Reducible { witness: Vec<UniPoly>, submodule: PolySubmodule },
    NoWitnessFound { candidates: usize },
}

impl Verdict {
    pub fn is_reducible(&self) -> bool {
        matches!(self, Verdict::Reducible { .. })
    }
}

fn monic_products(roots: &[Rational], max_deg: usize) -> Vec<UniPoly> {
    let mut out = Vec::new();
    let mut layer: Vec<(usize, UniPoly)> = alloc::vec![(0, UniPoly::one())];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for (start, p) in &layer {
            for (k, r) in roots.iter().enumerate().skip(*start) {
                let q = p.mul(&UniPoly::linear_root(r));
                out.push(q.clone());
                next.push((k, q));
            }
        }
        layer = next;
    }
    out
}

/// Searches the single generators and p(∂)·(generator), p monic of degree
/// ≤ `degree` with roots among those of the λ-free parts of the actions,
/// for one whose closure is proper.
pub fn irreducibility_probe(module: &ConformalModule, degree: usize) -> Result<Verdict> {
    require_instantiated(&module.action_params())?;
    if module.rank() > 2 {
        return Err(Error::Domain("irreducibility probe supports rank at most two".into()));
    }
    let n = module.rank();
    let mut roots: Vec<Rational> = Vec::new();
    for row in module.action.values() {
        for p in row.values() {
            let free = p.substitute(&Var::Lambda, &MultiPoly::zero());
            if let Ok(u) = free.to_uni(&Var::Partial) {
                for r in u.rational_roots() {
                    if !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    let mut candidates: Vec<Vec<UniPoly>> = (0..n).map(|w| crate::lcsa::unit_row(n, w)).collect();
    for p in monic_products(&roots, degree) {
        for w in 0..n {
            let mut row = alloc::vec![UniPoly::zero(); n];
            row[w] = p.clone();
            candidates.push(row);
        }
    }
    let count = candidates.len();
    for c in candidates {
        let sub = submodule_closure(module, core::slice::from_ref(&c))?;
        if !sub.is_full() {
            return Ok(Verdict::Reducible { witness: c, submodule: sub });
        }
    }
    Ok(Verdict::NoWitnessFound { candidates: count })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModuleFamily {
    /// V_{Δ,a} over Vir.
    VirDeltaA,
    NsBar,
    NsBarPrime,
    N,
    NF,
    NG,
    MA,
    MB,
    MPlus,
    MMinus,
    /// M_{Δ,η,ω}
    MOmega,
    /// M_{Δ,ζ,c,ε}
    MHvs,
    /// Rank (1+1) HVS modules, rows 1 to 6.
    Hvs(u8),
}

const SCALAR_TAGS: [(ModuleFamily, &str); 12] = [
    (ModuleFamily::VirDeltaA, "V_Da"),
    (ModuleFamily::NsBar, "NSbar"),
    (ModuleFamily::NsBarPrime, "NSbar'"),
    (ModuleFamily::N, "N"),
    (ModuleFamily::NF, "N_f"),
    (ModuleFamily::NG, "N_g"),
    (ModuleFamily::MA, "M_A"),
    (ModuleFamily::MB, "M_B"),
    (ModuleFamily::MPlus, "M_plus"),
    (ModuleFamily::MMinus, "M_minus"),
    (ModuleFamily::MOmega, "M_Dew"),
    (ModuleFamily::MHvs, "M_Dzce"),
];

impl ModuleFamily {
    pub fn all() -> Vec<ModuleFamily> {
        let mut v: Vec<ModuleFamily> = SCALAR_TAGS.iter().map(|t| t.0).collect();
        v.extend((1..=6).map(ModuleFamily::Hvs));
        v
    }

    pub fn tag(&self) -> String {
        match self {
            ModuleFamily::Hvs(i) => format!("HVS_{i}"),
            other => SCALAR_TAGS.iter().find(|t| t.0 == *other).map(|t| t.1.to_string()).unwrap_or_default(),
        }
    }

    pub fn parse(text: &str) -> Result<ModuleFamily> {
        let t = text.trim();
        ModuleFamily::all()
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Unknown(format!("module family `{t}`")))
    }

    pub fn default_algebra(&self) -> Family {
        match self {
            ModuleFamily::VirDeltaA => Family::Vir,
            ModuleFamily::NsBar | ModuleFamily::NsBarPrime => Family::NS,
            ModuleFamily::N => Family::O1,
            ModuleFamily::NF => Family::A1,
            ModuleFamily::NG => Family::C1,
            ModuleFamily::MA | ModuleFamily::MB => Family::B1,
            ModuleFamily::MPlus | ModuleFamily::MMinus => Family::B2,
            ModuleFamily::MOmega => Family::D4,
            ModuleFamily::MHvs | ModuleFamily::Hvs(_) => Family::HVS,
        }
    }

    pub fn slots(&self) -> Vec<&'static str> {
        match self {
            ModuleFamily::VirDeltaA | ModuleFamily::NsBar | ModuleFamily::NsBarPrime => alloc::vec!["delta", "a"],
            ModuleFamily::N => alloc::vec!["f", "g"],
            ModuleFamily::NF => alloc::vec!["f"],
            ModuleFamily::NG => alloc::vec!["g"],
            ModuleFamily::MA | ModuleFamily::MB | ModuleFamily::MPlus | ModuleFamily::MMinus => alloc::vec!["delta", "eta"],
            ModuleFamily::MOmega => alloc::vec!["delta", "eta", "omega"],
            ModuleFamily::MHvs => alloc::vec!["delta", "zeta", "c", "eps"],
            ModuleFamily::Hvs(1..=3) => alloc::vec!["delta0", "eta"],
            ModuleFamily::Hvs(4) => alloc::vec!["eta", "k"],
            ModuleFamily::Hvs(_) => alloc::vec!["eta"],
        }
    }

    fn rank(&self) -> usize {
        match self {
            ModuleFamily::NsBar
            | ModuleFamily::NsBarPrime
            | ModuleFamily::MPlus
            | ModuleFamily::MMinus
            | ModuleFamily::MHvs
            | ModuleFamily::Hvs(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ModuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Algebras with their finite nontrivial irreducible module families.
pub fn fnicm_table() -> Vec<(Family, Vec<ModuleFamily>)> {
    use ModuleFamily::*;
    alloc::vec![
        (Family::A1, alloc::vec![NF]),
        (Family::A2, alloc::vec![NF]),
        (Family::A3, alloc::vec![NF]),
        (Family::A4, alloc::vec![NF]),
        (Family::B1, alloc::vec![MA, MB]),
        (Family::B2, alloc::vec![MB, MPlus, MMinus]),
        (Family::C1, alloc::vec![NG, MA]),
        (Family::C3, alloc::vec![NG, MA]),
        (Family::C2, alloc::vec![NG, MPlus, MMinus]),
        (Family::D1, alloc::vec![MA, MOmega]),
        (Family::D4, alloc::vec![MA, MOmega]),
        (Family::HVS, alloc::vec![MA, MHvs]),
        (Family::D2, alloc::vec![MA]),
        (Family::D3, alloc::vec![MA]),
    ]
}

/// Every table entry over its algebra, then V_{Δ,a}, the two NS modules,
/// N and the six HVS rows over their default algebras.
pub fn verification_module_specs() -> Vec<ModuleFamilySpec> {
    let mut out: Vec<ModuleFamilySpec> = Vec::new();
    for (fam, mods) in fnicm_table() {
        for mf in mods {
            out.push(ModuleFamilySpec::over(mf, FamilySpec::new(fam)));
        }
    }
    let mut extra = alloc::vec![ModuleFamily::VirDeltaA, ModuleFamily::NsBar, ModuleFamily::NsBarPrime, ModuleFamily::N];
    extra.extend((1..=6).map(ModuleFamily::Hvs));
    for mf in extra {
        out.push(ModuleFamilySpec::new(mf));
    }
    out
}

impl ModuleFamilySpec {
    /// `M_A over B1`
    pub fn label(&self) -> String {
        let mut s = self.family.tag();
        if !self.slots.is_empty() {
            let parts: Vec<String> = self.slots.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s = format!("{s}{{{}}}", parts.join(", "));
        }
        if self.parity_change {
            s.push_str(" (parity changed)");
        }
        format!("{s} over {}", self.algebra.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleFamilySpec {
    pub family: ModuleFamily,
    pub algebra: FamilySpec,
    pub slots: BTreeMap<String, MultiPoly>,
    pub parity_change: bool,
}

fn is_hv_even(alg: &ConformalSuperAlgebra) -> bool {
    let (Some(a), Some(b)) = (alg.index_of("A"), alg.index_of("B")) else { return false };
    alg.entry(a, a, b).is_zero() && alg.entry(a, b, b) == MultiPoly::d() + MultiPoly::l()
}

impl ModuleFamilySpec {
    pub fn new(family: ModuleFamily) -> ModuleFamilySpec {
        ModuleFamilySpec::over(family, FamilySpec::new(family.default_algebra()))
    }

    pub fn over(family: ModuleFamily, algebra: FamilySpec) -> ModuleFamilySpec {
        ModuleFamilySpec { family, algebra, slots: BTreeMap::new(), parity_change: false }
    }

    pub fn set(mut self, name: &str, value: MultiPoly) -> Result<ModuleFamilySpec> {
        if !self.family.slots().contains(&name) {
            return Err(Error::InvalidSlot { slot: name.into(), reason: format!("{} has no such slot", self.family) });
        }
        self.slots.insert(name.into(), value);
        Ok(self)
    }

    pub fn set_text(self, name: &str, text: &str) -> Result<ModuleFamilySpec> {
        let p = parse_poly_open(text)?;
        self.set(name, p)
    }

    pub fn with_parity_change(mut self, flag: bool) -> ModuleFamilySpec {
        self.parity_change = flag;
        self
    }

    fn value(&self, name: &str, alg: &ConformalSuperAlgebra) -> MultiPoly {
        if let Some(v) = self.slots.get(name) {
            return v.clone();
        }
        match name {
            "f" | "g" => (0..=2u32)
                .map(|k| MultiPoly::param(&crate::polyring::indexed(name, k as usize)) * MultiPoly::l().pow(k))
                .sum(),
            "omega" if !is_hv_even(alg) => MultiPoly::zero(),
            _ => MultiPoly::param(name),
        }
    }

    fn validate(&self, alg: &ConformalSuperAlgebra) -> Result<()> {
        let bad = |slot: &str, reason: &str| Err(Error::InvalidSlot { slot: slot.into(), reason: reason.into() });
        for s in self.family.slots() {
            let v = self.value(s, alg);
            let lambda_only = matches!(s, "f" | "g");
            if v.contains_var(&Var::Mu) || v.contains_var(&Var::Partial) || (!lambda_only && v.contains_var(&Var::Lambda)) {
                return bad(s, if lambda_only { "must be a polynomial in l only" } else { "must be a scalar" });
            }
        }
        let v = |n: &str| self.value(n, alg);
        let is = |p: &MultiPoly, c: Rational| p.as_constant() == Some(c);
        match self.family {
            ModuleFamily::NsBar | ModuleFamily::MA | ModuleFamily::MB | ModuleFamily::MPlus if v("delta").is_zero() => {
                return bad("delta", "must be nonzero");
            }
            ModuleFamily::NsBarPrime | ModuleFamily::MMinus if is(&v("delta"), frac(1, 2)) => {
                return bad("delta", "must differ from 1/2");
            }
            ModuleFamily::N if v("f").is_zero() && v("g").is_zero() => return bad("f", "f and g must not both vanish"),
            ModuleFamily::NF if v("f").is_zero() => return bad("f", "must be nonzero"),
            ModuleFamily::NG if v("g").is_zero() => return bad("g", "must be nonzero"),
            ModuleFamily::MOmega if !v("omega").is_zero() && !is_hv_even(alg) => {
                return bad("omega", "must vanish unless the even part is Heisenberg-Virasoro");
            }
            ModuleFamily::MHvs => {
                for s in ["c", "eps"] {
                    if v(s).is_zero() {
                        return bad(s, "must be nonzero");
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ConformalModule> {
        let alg = self.algebra.build()?;
        self.validate(&alg)?;
        self.assemble(alg)
    }

    /// Builds over an explicit algebra without slot validation.
    pub fn build_forced(&self) -> Result<ConformalModule> {
        let alg = self.algebra.build_forced()?;
        self.assemble(alg)
    }

    fn assemble(&self, alg: ConformalSuperAlgebra) -> Result<ConformalModule> {
        let v = |n: &str| self.value(n, &alg);
        let gen = |name: &str| -> Result<usize> {
            alg.index_of(name)
                .ok_or_else(|| Error::Domain(format!("{} needs an algebra generator `{name}`", self.family)))
        };
        let basis: Vec<BasisElement> = if self.family.rank() == 1 {
            alloc::vec![BasisElement::new("v", Parity::Even)]
        } else {
            alloc::vec![BasisElement::new("v0", Parity::Even), BasisElement::new("v1", Parity::Odd)]
        };
        let mut action = ActionTable::new();
        let mut put = |i: usize, u: usize, w: usize, p: MultiPoly| {
            if !p.is_zero() {
                action.entry((i, u)).or_default().insert(w, p);
            }
        };
        let weight = |delta: MultiPoly, shift: MultiPoly| conformal_weight(&delta, &shift);
        let half = MultiPoly::constant(frac(1, 2));
        let one = MultiPoly::one();
        let two = MultiPoly::int(2);
        match self.family {
            ModuleFamily::VirDeltaA => put(gen("L")?, 0, 0, weight(v("delta"), v("a"))),
            ModuleFamily::NsBar | ModuleFamily::NsBarPrime => {
                let (l, g) = (gen("L")?, gen("G")?);
                let (dl, a) = (v("delta"), v("a"));
                if self.family == ModuleFamily::NsBar {
                    put(l, 0, 0, weight(dl.clone(), a.clone()));
                    put(l, 1, 1, weight(&dl + &half, a.clone()));
                    put(g, 0, 1, one);
                    put(g, 1, 0, weight(&two * &dl, a));
                } else {
                    put(l, 0, 0, weight(dl.clone(), a.clone()));
                    put(l, 1, 1, weight(&dl - &half, a.clone()));
                    put(g, 0, 1, weight(&two * &dl - one.clone(), a));
                    put(g, 1, 0, one);
                }
            }
            ModuleFamily::N | ModuleFamily::NF | ModuleFamily::NG => {
                let f = if self.family == ModuleFamily::NG { MultiPoly::zero() } else { v("f") };
                let g = if self.family == ModuleFamily::NF { MultiPoly::zero() } else { v("g") };
                put(gen("A")?, 0, 0, f);
                put(gen("B")?, 0, 0, g);
            }
            ModuleFamily::MA => put(gen("A")?, 0, 0, weight(v("delta"), v("eta"))),
            ModuleFamily::MB => put(gen("B")?, 0, 0, weight(v("delta"), v("eta"))),
            ModuleFamily::MPlus | ModuleFamily::MMinus => {
                let (a, x) = (gen("A")?, gen("X")?);
                let (dl, eta) = (v("delta"), v("eta"));
                put(a, 0, 0, weight(dl.clone(), eta.clone()));
                if self.family == ModuleFamily::MPlus {
                    put(a, 1, 1, weight(&dl + &half, eta.clone()));
                    put(x, 0, 1, one);
                    put(x, 1, 0, weight(&two * &dl, eta));
                } else {
                    put(a, 1, 1, weight(&dl - &half, eta.clone()));
                    put(x, 0, 1, weight(&two * &dl - one.clone(), eta));
                    put(x, 1, 0, one);
                }
            }
            ModuleFamily::MOmega => {
                put(gen("A")?, 0, 0, weight(v("delta"), v("eta")));
                put(gen("B")?, 0, 0, v("omega"));
            }
            ModuleFamily::MHvs => {
                let (a, b, x) = (gen("A")?, gen("B")?, gen("X")?);
                let w = weight(v("delta"), v("zeta"));
                let ce = v("c") * v("eps");
                put(a, 0, 0, w.clone());
                put(a, 1, 1, w);
                put(b, 0, 0, ce.clone());
                put(b, 1, 1, ce);
                put(x, 0, 1, v("c"));
                put(x, 1, 0, v("eps"));
            }
            ModuleFamily::Hvs(row) => {
                let (a, x) = (gen("A")?, gen("X")?);
                let (d0, d1, h) = hvs_row(row, &|n| v(n))?;
                let eta = v("eta");
                put(a, 0, 0, weight(d0, eta.clone()));
                put(a, 1, 1, weight(d1, eta));
                put(x, 0, 1, h);
            }
        }
        let m = ConformalModule::new(alg, basis, action)?;
        Ok(if self.parity_change { m.parity_changed() } else { m })
    }
}

/// (Δ₀, Δ₁, h) for HVS row `row`.
fn hvs_row(row: u8, v: &dyn Fn(&str) -> MultiPoly) -> Result<(MultiPoly, MultiPoly, MultiPoly)> {
    let (d, l, eta) = (MultiPoly::d(), MultiPoly::l(), v("eta"));
    let c = |n: i64| MultiPoly::int(n);
    Ok(match row {
        1 => (v("delta0"), v("delta0"), MultiPoly::one()),
        2 => (v("delta0"), v("delta0") - c(1), l),
        3 => {
            let d1 = v("delta0") - c(2);
            let h = &l * &(&d - &(&d1 * &l) + eta);
            (v("delta0"), d1, h)
        }
        4 => (c(1), c(0), &d + &(v("k") * &l) + eta),
        5 => (c(1), c(-2), &l * &(&d + &l + &eta) * (&d + &l.scale(&rat(2)) + eta)),
        6 => (c(3), c(0), &l * &(&d + &eta) * (&d - &l + eta)),
        _ => return Err(Error::Unknown(format!("HVS module row {row}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    fn uni(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn every_table_entry_is_a_module() {
        for (fam, mods) in fnicm_table() {
            for mf in mods {
                let m = ModuleFamilySpec::over(mf, FamilySpec::new(fam)).build().unwrap();
                let bad = m.check_module();
                assert!(bad.is_empty(), "{mf} over {fam}: {:?}", bad.first());
            }
        }
        for mf in [ModuleFamily::VirDeltaA, ModuleFamily::NsBar, ModuleFamily::NsBarPrime] {
            assert!(ModuleFamilySpec::new(mf).build().unwrap().is_module(), "{mf}");
        }
    }

    #[test]
    fn verification_list_is_all_modules() {
        let specs = verification_module_specs();
        assert_eq!(specs.len(), 34);
        for s in specs {
            assert!(s.build().unwrap().is_module(), "{}", s.label());
        }
    }

    #[test]
    fn hvs_rows_are_modules() {
        for i in 1..=6 {
            let m = ModuleFamilySpec::new(ModuleFamily::Hvs(i)).build().unwrap();
            assert!(m.is_module(), "row {i}: {:?}", m.check_module().first());
        }
    }

    #[test]
    fn wrong_ns_coefficient_fails() {
        let m = ModuleFamilySpec::new(ModuleFamily::NsBar).build().unwrap();
        let bad = m.with_action(1, 1, 0, p("d+delta*l+a")).unwrap();
        let v = bad.check_module();
        assert!(v.iter().any(|x| x.i == 1 && x.j == 1 && x.u == 0));
    }

    #[test]
    fn hvs_module_shapes() {
        let m = ModuleFamilySpec::new(ModuleFamily::MHvs).build().unwrap();
        assert_eq!(m.action(2, 0, 1), p("c"));
        assert_eq!(m.action(2, 1, 0), p("eps"));
        assert_eq!(m.action(1, 0, 0), p("c*eps"));
        let h4 = ModuleFamilySpec::new(ModuleFamily::Hvs(4)).build().unwrap();
        assert_eq!(h4.action(0, 0, 0), p("d+l+eta"));
        assert_eq!(h4.action(0, 1, 1), p("d+eta"));
        assert_eq!(h4.action(2, 0, 1), p("d+k*l+eta"));
        let mm = ModuleFamilySpec::new(ModuleFamily::MMinus).build().unwrap();
        assert_eq!(mm.action(2, 0, 1), p("d+(2*delta-1)*l+eta"));
        let zero_c = ModuleFamilySpec::new(ModuleFamily::MHvs).set("c", p("0")).unwrap();
        assert!(zero_c.build().is_err());
    }

    #[test]
    fn omega_constraint_over_d1() {
        let d1 = FamilySpec::new(Family::D1);
        let forced = ModuleFamilySpec::over(ModuleFamily::MOmega, d1.clone()).set("omega", p("w")).unwrap();
        assert!(forced.build().is_err());
        assert!(!forced.build_forced().unwrap().is_module());
        assert!(ModuleFamilySpec::over(ModuleFamily::MOmega, d1).build().unwrap().is_module());
    }

    #[test]
    fn quotients_of_hvs_rows() {
        for i in 1..=6 {
            let m = ModuleFamilySpec::new(ModuleFamily::Hvs(i)).build().unwrap();
            let q = m.quotient(&[1]).unwrap();
            assert_eq!(q.rank(), 1);
            assert!(q.is_module());
            let a = q.action(0, 0, 0);
            assert_eq!(a.coeff(&Var::Partial, 1), MultiPoly::one());
            assert!(a.degree_in(&Var::Lambda).is_some_and(|d| d <= 1));
            assert_eq!(q.action(1, 0, 0), MultiPoly::zero());
            assert_eq!(q.action(2, 0, 0), MultiPoly::zero());
        }
    }

    #[test]
    fn locality() {
        let v = ModuleFamilySpec::new(ModuleFamily::VirDeltaA).build().unwrap();
        assert_eq!(v.locality_bound(0, 0), Some(1));
        let inst = v.instantiate(&[(Var::param("delta"), rat(2)), (Var::param("a"), rat(1))]);
        assert!(inst.locality_check(6).unwrap());
        let h = ModuleFamilySpec::new(ModuleFamily::MHvs).build().unwrap();
        assert_eq!(h.locality_bound(1, 0), Some(0));
        assert!(v.locality_check(3).is_err());
    }

    fn vir(delta: i64, a: i64) -> ConformalModule {
        ModuleFamilySpec::new(ModuleFamily::VirDeltaA)
            .set("delta", MultiPoly::int(delta))
            .unwrap()
            .set("a", MultiPoly::int(a))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn rank_one_closure() {
        assert!(rank1_closure_test(&p("d+3"), &vir(0, 3)).unwrap());
        assert!(!rank1_closure_test(&p("d+3"), &vir(1, 3)).unwrap());
        assert!(rank1_closure_test(&p("1"), &vir(1, 3)).unwrap());
        assert!(rank1_closure_test(&p("0"), &vir(1, 3)).is_err());
    }

    #[test]
    fn closures() {
        let sub = submodule_closure(&vir(0, 3), &[alloc::vec![uni(&[3, 1])]]).unwrap();
        assert_eq!(sub.basis(), &[alloc::vec![uni(&[3, 1])]]);
        let h1 = ModuleFamilySpec::new(ModuleFamily::Hvs(1))
            .set("delta0", p("2"))
            .unwrap()
            .set("eta", p("1"))
            .unwrap()
            .build()
            .unwrap();
        let s = submodule_closure(&h1, &[alloc::vec![uni(&[]), uni(&[1])]]).unwrap();
        assert!(!s.is_full() && s.rank() == 1);
        let mz = ModuleFamilySpec::new(ModuleFamily::MHvs);
        let mz = [("delta", "1"), ("zeta", "0"), ("c", "2"), ("eps", "3")]
            .iter()
            .fold(mz, |s, (k, v)| s.set_text(k, v).unwrap())
            .build()
            .unwrap();
        assert!(submodule_closure(&mz, &[alloc::vec![uni(&[1]), uni(&[])]]).unwrap().is_full());
    }

    #[test]
    fn probes() {
        match irreducibility_probe(&vir(0, 3), 2).unwrap() {
            Verdict::Reducible { witness, .. } => assert_eq!(witness, alloc::vec![uni(&[3, 1])]),
            other => panic!("{other:?}"),
        }
        let m0 = ModuleFamilySpec::new(ModuleFamily::MOmega)
            .set("delta", p("0"))
            .unwrap()
            .set("eta", p("2"))
            .unwrap()
            .set("omega", p("5"))
            .unwrap()
            .build()
            .unwrap();
        assert!(!irreducibility_probe(&m0, 3).unwrap().is_reducible());
        let h2 = ModuleFamilySpec::new(ModuleFamily::Hvs(2))
            .set("delta0", p("1"))
            .unwrap()
            .set("eta", p("0"))
            .unwrap()
            .build()
            .unwrap();
        match irreducibility_probe(&h2, 2).unwrap() {
            Verdict::Reducible { witness, .. } => assert_eq!(witness, alloc::vec![uni(&[]), uni(&[1])]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parity_change_keeps_module() {
        let m = ModuleFamilySpec::new(ModuleFamily::MPlus).with_parity_change(true).build().unwrap();
        assert_eq!(m.basis()[0].parity, Parity::Odd);
        assert!(m.is_module());
    }
}
