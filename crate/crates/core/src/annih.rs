//! Truncated annihilation superalgebras Lie(R)⁺ and Lie(R)ᵉ.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lcsa::{koszul, BasisElement, ConformalSuperAlgebra, Element, Parity};
use crate::polyring::{binomial, factorial, MultiPoly, Rational, Var};
use crate::repmod::ConformalModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AnnGen {
    /// The adjoined ∂ of Lie(R)ᵉ.
    Partial,
    /// a_(level) for algebra generator `base`.
    Mode { base: usize, level: u32 },
}

impl AnnGen {
    pub fn mode(base: usize, level: u32) -> AnnGen {
        AnnGen::Mode { base, level }
    }

    pub fn level(&self) -> u32 {
        match self {
            AnnGen::Partial => 0,
            AnnGen::Mode { level, .. } => *level,
        }
    }
}

/// Finite combination of generators with coefficients in the parameters.
pub type AnnElem = BTreeMap<AnnGen, MultiPoly>;

fn add_into(acc: &mut AnnElem, g: AnnGen, c: MultiPoly) {
    let e = acc.entry(g).or_default();
    *e += c;
    if e.is_zero() {
        acc.remove(&g);
    }
}

fn axpy(acc: &mut AnnElem, c: &MultiPoly, x: &AnnElem) {
    for (&g, v) in x {
        add_into(acc, g, c * v);
    }
}

/// (p(∂)X)_(r) with (∂ˢX)_(r) = (−1)ˢ r!/(r−s)! X_(r−s).
fn mode_of(e: &Element, r: u32) -> AnnElem {
    let mut out = AnnElem::new();
    for (&k, p) in e.coords() {
        for (s, c) in p.coeffs_in(&Var::Partial) {
            if s > r {
                continue;
            }
            let mut f = Rational::from_integer(factorial(r)) / Rational::from_integer(factorial(r - s));
            if s % 2 == 1 {
                f = -f;
            }
            add_into(&mut out, AnnGen::mode(k, r - s), c.scale(&f));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedLieSuper {
    basis: Vec<BasisElement>,
    cap: u32,
    extended: bool,
    table: BTreeMap<(AnnGen, AnnGen), AnnElem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnJacobiFailure {
    pub x: AnnGen,
    pub y: AnnGen,
    pub z: AnnGen,
    pub residual: AnnElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AnnJacobiReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<AnnJacobiFailure>,
}

impl AnnJacobiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// [a_(m), b_(n)] = Σ_j C(m,j)(a_(j)b)_(m+n−j) on generators.
fn mode_bracket(alg: &ConformalSuperAlgebra, i: usize, m: u32, j: usize, n: u32) -> AnnElem {
    let mut out = AnnElem::new();
    for (jj, prod) in alg.jth_products(i, j) {
        if jj > m {
            continue;
        }
        let c = MultiPoly::constant(Rational::from_integer(binomial(m, jj)));
        axpy(&mut out, &c, &mode_of(&prod, m + n - jj));
    }
    out
}

/// Levels m, n of a bracket kept in the table must both be at most the cap.
pub fn build_annihilation(alg: &ConformalSuperAlgebra, cap: u32, extended: bool) -> TruncatedLieSuper {
    let mut gens: Vec<AnnGen> = Vec::new();
    if extended {
        gens.push(AnnGen::Partial);
    }
    for i in 0..alg.rank() {
        for n in 0..=cap {
            gens.push(AnnGen::mode(i, n));
        }
    }
    let mut table = BTreeMap::new();
    for &g in &gens {
        for &h in &gens {
            let v = match (g, h) {
                (AnnGen::Partial, AnnGen::Partial) => AnnElem::new(),
                (AnnGen::Partial, AnnGen::Mode { base, level }) => partial_shift(base, level, false),
                (AnnGen::Mode { base, level }, AnnGen::Partial) => partial_shift(base, level, true),
                (AnnGen::Mode { base: i, level: m }, AnnGen::Mode { base: j, level: n }) => mode_bracket(alg, i, m, j, n),
            };
            if !v.is_empty() {
                table.insert((g, h), v);
            }
        }
    }
    TruncatedLieSuper { basis: alg.basis().to_vec(), cap, extended, table }
}

/// [∂, a_(n)] = −n a_(n−1), or its negative for the reversed pair.
fn partial_shift(base: usize, level: u32, reversed: bool) -> AnnElem {
    let mut out = AnnElem::new();
    if level > 0 {
        let c = if reversed { level as i64 } else { -(level as i64) };
        out.insert(AnnGen::mode(base, level - 1), MultiPoly::int(c));
    }
    out
}

impl TruncatedLieSuper {
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn generators(&self) -> Vec<AnnGen> {
        let mut gens = Vec::new();
        if self.extended {
            gens.push(AnnGen::Partial);
        }
        for i in 0..self.basis.len() {
            gens.extend((0..=self.cap).map(|n| AnnGen::mode(i, n)));
        }
        gens
    }

    pub fn parity(&self, g: AnnGen) -> Parity {
        match g {
            AnnGen::Partial => Parity::Even,
            AnnGen::Mode { base, .. } => self.basis[base].parity,
        }
    }

    pub fn name(&self, g: AnnGen) -> String {
        match g {
            AnnGen::Partial => "d".into(),
            AnnGen::Mode { base, level } => format!("{}_({level})", self.basis[base].name),
        }
    }

    pub fn bracket(&self, g: AnnGen, h: AnnGen) -> AnnElem {
        self.table.get(&(g, h)).cloned().unwrap_or_default()
    }

    pub fn table(&self) -> &BTreeMap<(AnnGen, AnnGen), AnnElem> {
        &self.table
    }

    /// Overwrites one stored bracket.
    pub fn set_bracket(&mut self, g: AnnGen, h: AnnGen, v: AnnElem) {
        if v.is_empty() {
            self.table.remove(&(g, h));
        } else {
            self.table.insert((g, h), v);
        }
    }

    pub fn in_table(&self, g: AnnGen) -> bool {
        match g {
            AnnGen::Partial => self.extended,
            AnnGen::Mode { base, level } => base < self.basis.len() && level <= self.cap,
        }
    }

    /// Bilinear extension; None if some needed pair is outside the table.
    pub fn bracket_elems(&self, x: &AnnElem, y: &AnnElem) -> Option<AnnElem> {
        let mut out = AnnElem::new();
        for (&g, cg) in x {
            for (&h, ch) in y {
                if !self.in_table(g) || !self.in_table(h) {
                    return None;
                }
                axpy(&mut out, &(cg * ch), &self.bracket(g, h));
            }
        }
        Some(out)
    }

    /// Pairs whose stored bracket violates [g,h] = −(−1)^{|g||h|}[h,g].
    pub fn check_antisymmetry(&self) -> Vec<(AnnGen, AnnGen)> {
        let mut bad = Vec::new();
        let gens = self.generators();
        for &g in &gens {
            for &h in &gens {
                if g > h {
                    continue;
                }
                let sign = MultiPoly::constant(koszul(self.parity(g), self.parity(h)));
                let mut sum = self.bracket(g, h);
                axpy(&mut sum, &sign, &self.bracket(h, g));
                if !sum.is_empty() {
                    bad.push((g, h));
                }
            }
        }
        bad
    }

    /// [x,[y,z]] − [[x,y],z] − (−1)^{|x||y|}[y,[x,z]] on every generator
    /// triple whose pairwise level sums stay within the cap.
    pub fn check_super_jacobi_filtered(&self) -> AnnJacobiReport {
        let mut report = AnnJacobiReport::default();
        let gens = self.generators();
        let single = |g: AnnGen| -> AnnElem { [(g, MultiPoly::one())].into_iter().collect() };
        for &x in &gens {
            for &y in &gens {
                for &z in &gens {
                    let (lx, ly, lz) = (x.level(), y.level(), z.level());
                    if lx + ly > self.cap || ly + lz > self.cap || lx + lz > self.cap {
                        report.skipped += 1;
                        continue;
                    }
                    let (sx, sy, sz) = (single(x), single(y), single(z));
                    let r = (|| {
                        let a = self.bracket_elems(&sx, &self.bracket_elems(&sy, &sz)?)?;
                        let b = self.bracket_elems(&self.bracket_elems(&sx, &sy)?, &sz)?;
                        let c = self.bracket_elems(&sy, &self.bracket_elems(&sx, &sz)?)?;
                        let mut res = a;
                        axpy(&mut res, &MultiPoly::int(-1), &b);
                        axpy(&mut res, &MultiPoly::constant(-koszul(self.parity(x), self.parity(y))), &c);
                        Some(res)
                    })();
                    match r {
                        None => report.skipped += 1,
                        Some(res) => {
                            report.checked += 1;
                            if !res.is_empty() {
                                report.failures.push(AnnJacobiFailure { x, y, z, residual: res });
                            }
                        }
                    }
                }
            }
        }
        report
    }

    pub fn display_elem(&self, e: &AnnElem) -> String {
        if e.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = e.iter().map(|(&g, c)| format!("({c}){}", self.name(g))).collect();
        parts.join(" + ")
    }
}

impl fmt::Display for TruncatedLieSuper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(g, h), v) in &self.table {
            writeln!(f, "[{}, {}] = {}", self.name(g), self.name(h), self.display_elem(v))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormEntry {
    /// e.g. `[A_1, B_2]` in shifted indices.
    pub label: String,
    pub expected: AnnElem,
    pub actual: AnnElem,
}

impl ClosedFormEntry {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClosedFormReport {
    pub entries: Vec<ClosedFormEntry>,
    /// c_i(m, n): coefficient of B_{m+n+2−i} in [A_m, A_n].
    pub c_coefficients: BTreeMap<(i64, i64), BTreeMap<i64, MultiPoly>>,
}

impl ClosedFormReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(ClosedFormEntry::matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ClosedFormEntry> {
        self.entries.iter().filter(|e| !e.matches())
    }
}

struct DShape {
    a: MultiPoly,
    b: MultiPoly,
    q: MultiPoly,
    alpha: MultiPoly,
    beta: MultiPoly,
    gamma: MultiPoly,
    kappa: MultiPoly,
}

fn read_linear(p: &MultiPoly, what: &str) -> Result<(MultiPoly, MultiPoly)> {
    let rest = p - &MultiPoly::d();
    if rest.contains_var(&Var::Partial) || rest.contains_var(&Var::Mu) || rest.degree_in(&Var::Lambda).unwrap_or(0) > 1 {
        return Err(Error::Domain(format!("{what} = {p} is not of the form d + x*l + y")));
    }
    Ok((rest.coeff(&Var::Lambda, 1), rest.coeff(&Var::Lambda, 0)))
}

fn is_scalar(p: &MultiPoly) -> bool {
    p.vars().iter().all(Var::is_param)
}

fn read_shape(alg: &ConformalSuperAlgebra) -> Result<(usize, usize, usize, DShape)> {
    let idx = |n: &str| alg.index_of(n).ok_or_else(|| Error::Domain(format!("generator `{n}` missing")));
    let (ia, ib, ix) = (idx("A")?, idx("B")?, idx("X")?);
    let vir = MultiPoly::d() + MultiPoly::l().scale(&Rational::from_integer(2.into()));
    if alg.entry(ia, ia, ia) != vir || !alg.entry(ib, ib, ia).is_zero() || !alg.entry(ib, ib, ib).is_zero() {
        return Err(Error::Domain("even part is not of type D".into()));
    }
    let (a, b) = read_linear(&alg.entry(ia, ib, ib), "[A_l B]")?;
    let (alpha, beta) = read_linear(&alg.entry(ia, ix, ix), "[A_l X]")?;
    let gamma = alg.entry(ib, ix, ix);
    let kappa = alg.entry(ix, ix, ib);
    if !is_scalar(&gamma) {
        return Err(Error::Domain("[B_l X] must be a scalar multiple of X".into()));
    }
    if !is_scalar(&kappa) || !alg.entry(ix, ix, ia).is_zero() {
        return Err(Error::Domain("[X_l X] must be a scalar multiple of B".into()));
    }
    let q = alg.entry(ia, ia, ib);
    Ok((ia, ib, ix, DShape { a, b, q, alpha, beta, gamma, kappa }))
}

/// Compares the table against the closed forms in shifted indices
/// A_m = A_(m+1), B_n = B_(n), X_s = X_(s).
pub fn match_closed_form(alg: &ConformalSuperAlgebra, cap: u32) -> Result<ClosedFormReport> {
    let (ia, ib, ix, sh) = read_shape(alg)?;
    let lie = build_annihilation(alg, cap, false);
    let mut report = ClosedFormReport::default();
    let one = MultiPoly::one();
    let int = |n: i64| MultiPoly::int(n);
    let m_a = |m: i64| AnnGen::mode(ia, (m + 1) as u32);
    let m_b = |n: i64| AnnGen::mode(ib, n as u32);
    let m_x = |s: i64| AnnGen::mode(ix, s as u32);
    let mut push = |label: String, expected: AnnElem, actual: AnnElem| {
        report.entries.push(ClosedFormEntry { label, expected, actual });
    };
    let top = cap as i64;
    let qj: BTreeMap<u32, MultiPoly> = sh.q.coeffs_in(&Var::Lambda);
    for m in -1..top {
        for n in -1..top {
            let mut exp = AnnElem::new();
            add_into(&mut exp, m_a(m + n), int(m - n));
            // Σ_j C(m+1,j)(j!·Q_j(∂)B)_(m+n+2−j)
            let mut cterm = AnnElem::new();
            for (&j, qpoly) in &qj {
                if j as i64 > m + 1 {
                    continue;
                }
                let r = (m + n + 2 - j as i64) as u32;
                let c = Rational::from_integer(binomial((m + 1) as u32, j) * factorial(j));
                let e = Element::from_coords([(ib, qpoly.scale(&c))]);
                axpy(&mut cterm, &one, &mode_of(&e, r));
            }
            let mut cs = BTreeMap::new();
            for (g, c) in &cterm {
                if let AnnGen::Mode { level, .. } = g {
                    cs.insert(m + n + 2 - *level as i64, c.clone());
                }
            }
            report.c_coefficients.insert((m, n), cs);
            axpy(&mut exp, &one, &cterm);
            if m + n >= -1 {
                push(format!("[A_{m}, A_{n}]"), exp, lie.bracket(m_a(m), m_a(n)));
            }
        }
        for n in 0..=top {
            if m + 1 + n > top {
                continue;
            }
            let mut exp = AnnElem::new();
            add_into(&mut exp, m_b(m + n + 1), sh.b.clone());
            if m + n >= 0 {
                add_into(&mut exp, m_b(m + n), (&sh.a - &one) * int(m + 1) - int(n));
            }
            push(format!("[A_{m}, B_{n}]"), exp, lie.bracket(m_a(m), m_b(n)));
            let mut exp = AnnElem::new();
            add_into(&mut exp, m_x(m + n + 1), sh.beta.clone());
            if m + n >= 0 {
                add_into(&mut exp, m_x(m + n), (&sh.alpha - &one) * int(m + 1) - int(n));
            }
            push(format!("[A_{m}, X_{n}]"), exp, lie.bracket(m_a(m), m_x(n)));
        }
    }
    for n in 0..=top {
        for s in 0..=top - n {
            let mut exp = AnnElem::new();
            add_into(&mut exp, m_x(n + s), sh.gamma.clone());
            push(format!("[B_{n}, X_{s}]"), exp, lie.bracket(m_b(n), m_x(s)));
            let mut exp = AnnElem::new();
            add_into(&mut exp, m_b(n + s), sh.kappa.clone());
            push(format!("[X_{n}, X_{s}]"), exp, lie.bracket(m_x(n), m_x(s)));
            push(format!("[B_{n}, B_{s}]"), AnnElem::new(), lie.bracket(m_b(n), m_b(s)));
        }
    }
    Ok(report)
}

fn apply(module: &ConformalModule, g: AnnGen, v: &Element) -> Element {
    match g {
        AnnGen::Partial => v.scale(&MultiPoly::d()),
        AnnGen::Mode { base, level } => module.jth_actions(base, v).remove(&level).unwrap_or_default(),
    }
}

fn apply_elem(module: &ConformalModule, x: &AnnElem, v: &Element) -> Element {
    let mut out = Element::zero();
    for (&g, c) in x {
        out = out.add(&apply(module, g, v).scale(c));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CorrespondenceReport {
    pub checked: usize,
    /// (g, h, module vector index, ∂-degree) of failing relations.
    pub failures: Vec<(AnnGen, AnnGen, usize, u32)>,
}

/// Checks [g,h]·u = g(h u) − (−1)^{|g||h|} h(g u) on u = ∂ᵏw for module
/// generators w and k ≤ `degree`, for pairs with level sum within the cap.
pub fn check_module_correspondence(lie: &TruncatedLieSuper, module: &ConformalModule, degree: u32) -> CorrespondenceReport {
    let mut report = CorrespondenceReport::default();
    let gens = lie.generators();
    for &g in &gens {
        for &h in &gens {
            if g.level() + h.level() > lie.cap() {
                continue;
            }
            let sign = MultiPoly::constant(koszul(lie.parity(g), lie.parity(h)));
            for w in 0..module.rank() {
                for k in 0..=degree {
                    let u = Element::from_coords([(w, MultiPoly::d().pow(k))]);
                    let lhs = apply_elem(module, &lie.bracket(g, h), &u);
                    let gh = apply(module, g, &apply(module, h, &u));
                    let hg = apply(module, h, &apply(module, g, &u));
                    let rhs = gh.add(&hg.scale(&-sign.clone()));
                    report.checked += 1;
                    if lhs != rhs {
                        report.failures.push((g, h, w, k));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Family, FamilySpec};
    use crate::polyring::parse_poly_open;
    use crate::repmod::{ModuleFamily, ModuleFamilySpec};

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    fn single(g: AnnGen, c: i64) -> AnnElem {
        [(g, MultiPoly::int(c))].into_iter().collect()
    }

    #[test]
    fn virasoro_modes() {
        let vir = FamilySpec::new(Family::Vir).build().unwrap();
        let lie = build_annihilation(&vir, 8, false);
        for m in -1i64..=3 {
            for n in -1i64..=3 {
                let got = lie.bracket(AnnGen::mode(0, (m + 1) as u32), AnnGen::mode(0, (n + 1) as u32));
                let want = if m == n { AnnElem::new() } else { single(AnnGen::mode(0, (m + n + 1) as u32), m - n) };
                assert_eq!(got, want, "[L_{m}, L_{n}]");
            }
        }
        let rep = lie.check_super_jacobi_filtered();
        assert!(rep.passed() && rep.checked > 0 && rep.skipped > 0);
        // (1,2,3) by hand: [L1,[L2,L3]] = -[L1,L5] = 4L6, [[L1,L2],L3] = -[L3,L3] = 0,
        // [L2,[L1,L3]] = -2[L2,L4] = 4L6.
        assert!(lie.check_antisymmetry().is_empty());
    }

    #[test]
    fn hvs_odd_modes() {
        let hvs = FamilySpec::new(Family::HVS).build().unwrap();
        let lie = build_annihilation(&hvs, 8, true);
        for r in 0..4 {
            for s in 0..4 {
                assert_eq!(lie.bracket(AnnGen::mode(2, r), AnnGen::mode(2, s)), single(AnnGen::mode(1, r + s), 2));
            }
        }
        assert_eq!(lie.bracket(AnnGen::Partial, AnnGen::mode(0, 3)), single(AnnGen::mode(0, 2), -3));
        assert!(lie.check_antisymmetry().is_empty());
        assert!(lie.check_super_jacobi_filtered().passed());
    }

    #[test]
    fn abelian_is_zero() {
        let ab = crate::catalog::build_general_o(1, 1, &[p("0")]).unwrap();
        assert!(build_annihilation(&ab, 5, false).table().is_empty());
    }

    #[test]
    fn corrupted_sign_is_caught() {
        let vir = FamilySpec::new(Family::Vir).build().unwrap();
        let mut lie = build_annihilation(&vir, 6, false);
        let (g, h) = (AnnGen::mode(0, 1), AnnGen::mode(0, 2));
        let flipped: AnnElem = lie.bracket(g, h).into_iter().map(|(k, v)| (k, -v)).collect();
        lie.set_bracket(g, h, flipped);
        let rep = lie.check_super_jacobi_filtered();
        assert!(!rep.passed());
        assert!(!lie.check_antisymmetry().is_empty());
    }

    #[test]
    fn dbar_closed_forms() {
        let spec = FamilySpec::new(Family::Dbar);
        let alg = spec.build_forced().unwrap();
        let rep = match_closed_form(&alg, 5).unwrap();
        assert!(rep.passed(), "{:?}", rep.mismatches().next());
        for comp in crate::catalog::verification_specs().into_iter().filter(|s| s.family == Family::Dbar) {
            let lie = build_annihilation(&comp.build().unwrap(), 5, true);
            assert!(lie.check_super_jacobi_filtered().passed(), "{}", comp.label());
        }
    }

    #[test]
    fn d2_c_terms() {
        let spec = FamilySpec::new(Family::D2)
            .set("a", p("1"))
            .unwrap()
            .set("b", p("0"))
            .unwrap()
            .set("q", p("c*(d+2*l)"))
            .unwrap();
        let alg = spec.build().unwrap();
        let rep = match_closed_form(&alg, 6).unwrap();
        assert!(rep.passed(), "{:?}", rep.mismatches().next());
        // (c∂B)_(4) + 2·(2cB)_(3) = −4cB_3 + 4cB_3
        assert!(rep.c_coefficients[&(1, 1)].values().all(|c| c.is_zero()));
        // (m,n) = (1,0): (c∂B)_(3) + 2·(2cB)_(2) = −3cB_2 + 4cB_2
        assert_eq!(rep.c_coefficients[&(1, 0)].get(&1), Some(&p("c")));
    }

    #[test]
    fn closed_form_rejects_other_shapes() {
        let ns = FamilySpec::new(Family::NS).build().unwrap();
        assert!(match_closed_form(&ns, 4).is_err());
    }

    #[test]
    fn module_correspondence() {
        let m = ModuleFamilySpec::new(ModuleFamily::MHvs).build().unwrap();
        let lie = build_annihilation(m.algebra(), 4, true);
        let rep = check_module_correspondence(&lie, &m, 2);
        assert!(rep.failures.is_empty() && rep.checked > 0);
        let bad = m.with_action(2, 0, 1, p("2*c")).unwrap();
        assert!(!check_module_correspondence(&lie, &bad, 1).failures.is_empty());
    }
}
