//! Bounded-degree solver for linear polynomial functional equations, and a
//! derivation of the odd structure over each rank-two even part.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::catalog::{conformal_weight, vir_poly, Family, FamilySpec};
use crate::error::{Error, Result};
use crate::lcsa::ConformalSuperAlgebra;
use crate::polyring::{frac, rat, Monomial, MultiPoly, Rational, Var};

/// Kernel of an exact matrix by Gauss-Jordan elimination. Pivots are taken
/// left to right; one basis vector per free column, with that column set to 1.
pub fn rational_nullspace(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..ncols {
                    let d = &f * &rows[r][k];
                    rows[i][k] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// An unknown polynomial with one coefficient symbol per allowed monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unknown {
    pub name: String,
    pub monomials: Vec<Monomial>,
    coeffs: Vec<Var>,
}

impl Unknown {
    pub fn symbolic(&self) -> MultiPoly {
        self.coeffs.iter().zip(&self.monomials).map(|(c, m)| MultiPoly::var(c.clone()).mul_monomial(m)).sum()
    }

    pub fn from_values(&self, values: &[Rational]) -> MultiPoly {
        values.iter().zip(&self.monomials).map(|(c, m)| MultiPoly::term(c.clone(), m.clone())).sum()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ansatz {
    unknowns: Vec<Unknown>,
}

impl Ansatz {
    pub fn new() -> Ansatz {
        Ansatz::default()
    }

    fn push(&mut self, name: &str, monomials: Vec<Monomial>) -> MultiPoly {
        let base = self.coeff_vars().len();
        let coeffs = (0..monomials.len()).map(|k| Var::param(&format!("_u{}", base + k))).collect();
        let u = Unknown { name: name.into(), monomials, coeffs };
        let p = u.symbolic();
        self.unknowns.push(u);
        p
    }

    /// Σ_{k ≤ degree} c_k v^k
    pub fn univariate(&mut self, name: &str, v: &Var, degree: u32) -> MultiPoly {
        self.push(name, (0..=degree).map(|k| Monomial::var(v.clone(), k)).collect())
    }

    /// All monomials in x, y of total degree ≤ `degree`.
    pub fn bivariate(&mut self, name: &str, x: &Var, y: &Var, degree: u32) -> MultiPoly {
        let mut ms = Vec::new();
        for t in 0..=degree {
            for i in 0..=t {
                ms.push(Monomial::var(x.clone(), i).mul(&Monomial::var(y.clone(), t - i)));
            }
        }
        self.push(name, ms)
    }

    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn coeff_vars(&self) -> Vec<Var> {
        self.unknowns.iter().flat_map(|u| u.coeffs.iter().cloned()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Template {
    /// f(x+y)g(x,y) = f(x)h(y)
    FgH,
    /// (x+ay+b)f(x+y) = (x+2αy−y+2β)f(x)
    Shift,
    /// Odd-bracket constraints over a type A even part.
    ASystem,
    /// Odd-bracket constraints over a type B, C or D even part.
    OddSystem,
}

impl Template {
    pub fn parse(text: &str) -> Result<Template> {
        match text.to_ascii_lowercase().as_str() {
            "fgh" | "fg_h" => Ok(Template::FgH),
            "shift" => Ok(Template::Shift),
            "a_system" | "a-system" | "asystem" => Ok(Template::ASystem),
            "odd" | "odd_system" => Ok(Template::OddSystem),
            other => Err(Error::Unknown(format!("template `{other}`"))),
        }
    }
}

const SPACE: [Var; 3] = [Var::Partial, Var::Lambda, Var::Mu];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalEquation {
    pub template: Template,
    /// Each residual must vanish identically in d, l, m.
    pub residuals: Vec<MultiPoly>,
    pub ansatz: Ansatz,
}

impl FunctionalEquation {
    /// One linear row per (residual, monomial in d, l, m).
    pub fn linear_rows(&self) -> Result<Vec<Vec<Rational>>> {
        let vars = self.ansatz.coeff_vars();
        let mut rows = Vec::new();
        for r in &self.residuals {
            for c in r.coefficients_in(&SPACE).into_values() {
                let mut row = Vec::with_capacity(vars.len());
                let mut rebuilt = MultiPoly::zero();
                for v in &vars {
                    let k = c.coeff(v, 1);
                    let kc = k.as_constant().ok_or_else(|| {
                        Error::NotInstantiated(format!("coefficient {k} of an unknown is not a rational constant"))
                    })?;
                    rebuilt += MultiPoly::var(v.clone()).scale(&kc);
                    row.push(kc);
                }
                if rebuilt != c {
                    return Err(Error::Domain(format!("constraint {c} is not linear homogeneous in the unknowns")));
                }
                rows.push(row);
            }
        }
        Ok(rows)
    }

    pub fn solve(&self) -> Result<SolutionSpace> {
        let rows = self.linear_rows()?;
        let basis = rational_nullspace(&rows, self.ansatz.coeff_vars().len());
        Ok(SolutionSpace { unknowns: self.ansatz.unknowns.clone(), basis, conditions: Vec::new() })
    }

    /// True iff every basis vector of `space` zeroes all residuals.
    pub fn verify(&self, space: &SolutionSpace) -> bool {
        let vars = self.ansatz.coeff_vars();
        space.basis.iter().all(|v| {
            let map: Vec<(Var, MultiPoly)> =
                vars.iter().cloned().zip(v.iter().map(|c| MultiPoly::constant(c.clone()))).collect();
            self.residuals.iter().all(|r| r.substitute_many(&map).is_zero())
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    pub unknowns: Vec<Unknown>,
    /// Coefficient vectors, concatenated in unknown order.
    pub basis: Vec<Vec<Rational>>,
    /// Polynomial conditions on parameters attached to the space (empty for
    /// fully instantiated equations).
    pub conditions: Vec<MultiPoly>,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The unknown polynomials for a coefficient vector.
    pub fn member(&self, v: &[Rational]) -> Vec<MultiPoly> {
        let mut out = Vec::new();
        let mut off = 0;
        for u in &self.unknowns {
            out.push(u.from_values(&v[off..off + u.len()]));
            off += u.len();
        }
        out
    }

    pub fn basis_polys(&self) -> Vec<Vec<MultiPoly>> {
        self.basis.iter().map(|v| self.member(v)).collect()
    }

    /// Σ_j t_j · basis_j with symbolic t1, t2, ...
    pub fn generic(&self, prefix: &str) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(); self.unknowns.len()];
        for (j, polys) in self.basis_polys().into_iter().enumerate() {
            let t = MultiPoly::param(&format!("{prefix}{}", j + 1));
            for (o, p) in out.iter_mut().zip(polys) {
                *o += &t * &p;
            }
        }
        out
    }
}

fn x() -> MultiPoly {
    MultiPoly::d()
}

fn y() -> MultiPoly {
    MultiPoly::l()
}

fn shift_residual(a: &MultiPoly, b: &MultiPoly, alpha: &MultiPoly, beta: &MultiPoly, f: &MultiPoly) -> MultiPoly {
    let f_xy = f.substitute(&Var::Partial, &(x() + y()));
    let left = (x() + a * &y() + b.clone()) * f_xy;
    let right = (x() + (alpha.scale(&rat(2)) - MultiPoly::one()) * y() + beta.scale(&rat(2))) * f.clone();
    left - right
}

/// (x+ay+b)f(x+y) − (x+(2α−1)y+2β)f(x) with f of degree ≤ `degree`; x is d, y is l.
pub fn shift_equation(a: &Rational, b: &Rational, alpha: &Rational, beta: &Rational, degree: u32) -> FunctionalEquation {
    let mut ansatz = Ansatz::new();
    let f = ansatz.univariate("f", &Var::Partial, degree);
    let c = |r: &Rational| MultiPoly::constant(r.clone());
    let residual = shift_residual(&c(a), &c(b), &c(alpha), &c(beta), &f);
    FunctionalEquation { template: Template::Shift, residuals: vec![residual], ansatz }
}

pub fn solve_shift(a: &Rational, b: &Rational, alpha: &Rational, beta: &Rational, degree: u32) -> Result<SolutionSpace> {
    shift_equation(a, b, alpha, beta, degree).solve()
}

pub enum FghKnown {
    /// f known: unknowns g(x,y) and h(y).
    F(MultiPoly),
    /// g and h known: unknown f.
    GH(MultiPoly, MultiPoly),
}

/// f(x+y)g(x,y) − f(x)h(y) with the unknowns of total degree ≤ `degree`.
pub fn fgh_equation(known: &FghKnown, degree: u32) -> Result<FunctionalEquation> {
    let mut ansatz = Ansatz::new();
    let (f, g, h) = match known {
        FghKnown::F(f) => {
            if f.is_zero() {
                return Err(Error::Domain("f must be nonzero".into()));
            }
            let g = ansatz.bivariate("g", &Var::Partial, &Var::Lambda, degree);
            let h = ansatz.univariate("h", &Var::Lambda, degree);
            (f.clone(), g, h)
        }
        FghKnown::GH(g, h) => {
            if g.is_zero() || h.is_zero() {
                return Err(Error::Domain("g and h must be nonzero".into()));
            }
            let f = ansatz.univariate("f", &Var::Partial, degree);
            (f, g.clone(), h.clone())
        }
    };
    let residual = f.substitute(&Var::Partial, &(x() + y())) * g - f * h;
    Ok(FunctionalEquation { template: Template::FgH, residuals: vec![residual], ansatz })
}

pub fn solve_fgh(known: &FghKnown, degree: u32) -> Result<SolutionSpace> {
    fgh_equation(known, degree)?.solve()
}

/// A linear equation Σ coeffs[j]·u_j + constant = 0 over a parameter ring.
#[derive(Clone, Debug)]
struct LinRow {
    coeffs: Vec<MultiPoly>,
    constant: MultiPoly,
}

impl LinRow {
    fn is_pure(&self) -> bool {
        self.coeffs.iter().all(MultiPoly::is_zero)
    }

    fn map(&self, f: &impl Fn(&MultiPoly) -> MultiPoly) -> LinRow {
        LinRow { coeffs: self.coeffs.iter().map(f).collect(), constant: f(&self.constant) }
    }

    fn combine(&self, p: &MultiPoly, other: &LinRow, e: &MultiPoly) -> LinRow {
        LinRow {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(s, o)| p * s - e * o).collect(),
            constant: p * &self.constant - e * &other.constant,
        }
    }
}

#[derive(Clone, Debug)]
struct ElimState {
    rows: Vec<LinRow>,
    subst: Vec<(Var, MultiPoly)>,
    residual: Vec<MultiPoly>,
    nonzero: Vec<MultiPoly>,
    elims: Vec<(usize, LinRow)>,
}

impl ElimState {
    fn apply(&mut self, v: &Var, e: &MultiPoly) {
        let f = |p: &MultiPoly| p.substitute(v, e);
        self.rows = self.rows.iter().map(|r| r.map(&f)).collect();
        self.elims = self.elims.iter().map(|(j, r)| (*j, r.map(&f))).collect();
        self.residual = self.residual.iter().map(f).filter(|p| !p.is_zero()).collect();
        self.nonzero = self.nonzero.iter().map(f).collect();
        for (_, val) in self.subst.iter_mut() {
            *val = val.substitute(v, e);
        }
        self.subst.push((v.clone(), e.clone()));
    }

    fn consistent(&self) -> bool {
        !self.nonzero.iter().any(MultiPoly::is_zero) && !self.residual.iter().any(|p| p.as_constant().is_some_and(|c| !c.is_zero()))
    }
}

/// Solves p = 0 for the first listed parameter occurring linearly with a
/// constant coefficient.
fn solve_for(p: &MultiPoly, order: &[Var]) -> Option<(Var, MultiPoly)> {
    for v in order {
        if p.degree_in(v) == Some(1) {
            if let Some(c) = p.coeff(v, 1).as_constant() {
                let rest = p - &MultiPoly::var(v.clone()).scale(&c);
                return Some((v.clone(), rest.scale(&(-Rational::one() / c))));
            }
        }
    }
    None
}

fn eliminate(mut st: ElimState, order: &[Var], out: &mut Vec<ElimState>) {
    loop {
        st.rows.retain(|r| !(r.is_pure() && r.constant.is_zero()));
        if let Some(i) = st.rows.iter().position(LinRow::is_pure) {
            let p = st.rows.remove(i).constant;
            if p.as_constant().is_some() {
                return;
            }
            match solve_for(&p, order) {
                Some((v, e)) => st.apply(&v, &e),
                None => st.residual.push(p),
            }
            if !st.consistent() {
                return;
            }
            continue;
        }
        if st.rows.is_empty() {
            out.push(st);
            return;
        }
        let constant_pivot = st.rows.iter().enumerate().find_map(|(r, row)| {
            row.coeffs.iter().position(|c| c.as_constant().is_some_and(|k| !k.is_zero())).map(|j| (r, j))
        });
        let (r, j, branch) = match constant_pivot {
            Some((r, j)) => (r, j, false),
            None => {
                let (r, j) = st
                    .rows
                    .iter()
                    .enumerate()
                    .find_map(|(r, row)| row.coeffs.iter().position(|c| !c.is_zero()).map(|j| (r, j)))
                    .expect("non-pure row");
                (r, j, true)
            }
        };
        let p = st.rows[r].coeffs[j].clone();
        if branch {
            let mut vanish = st.clone();
            match solve_for(&p, order) {
                Some((v, e)) => vanish.apply(&v, &e),
                None => {
                    vanish.residual.push(p.clone());
                    vanish.rows[r].coeffs[j] = MultiPoly::zero();
                }
            }
            if vanish.consistent() {
                eliminate(vanish, order, out);
            }
            st.nonzero.push(p.clone());
        }
        let pivot = st.rows.remove(r);
        st.rows = st.rows.iter().map(|row| row.combine(&p, &pivot, &row.coeffs[j])).collect();
        st.elims.push((j, pivot));
    }
}

/// A branch of the parametric shift equation: under the listed conditions
/// there is a solution f of exact degree `degree`, f = f_num / f_den.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftBranch {
    pub degree: u32,
    /// Solved parameters, v = expression in the remaining ones.
    pub solved: Vec<(Var, MultiPoly)>,
    /// Conditions that could not be solved for a parameter.
    pub residual: Vec<MultiPoly>,
    /// Polynomials assumed nonzero on this branch.
    pub nonzero: Vec<MultiPoly>,
    pub f_num: MultiPoly,
    pub f_den: MultiPoly,
}

impl ShiftBranch {
    /// Every condition as a polynomial that must vanish.
    pub fn conditions(&self) -> Vec<MultiPoly> {
        let mut out: Vec<MultiPoly> = self.solved.iter().map(|(v, e)| MultiPoly::var(v.clone()) - e.clone()).collect();
        out.extend(self.residual.iter().cloned());
        out
    }

    /// f when the denominator is a rational constant.
    pub fn f(&self) -> Option<MultiPoly> {
        self.f_den.as_constant().filter(|c| !c.is_zero()).map(|c| self.f_num.scale(&(Rational::one() / c)))
    }

    pub fn value_of(&self, v: &Var) -> Option<&MultiPoly> {
        self.solved.iter().find(|(w, _)| w == v).map(|(_, e)| e)
    }
}

pub fn shift_params() -> [Var; 4] {
    [Var::param("a"), Var::param("b"), Var::param("alpha"), Var::param("beta")]
}

/// For each exact degree k ≤ `max_degree`, the parameter conditions under
/// which a degree-k solution of the shift equation exists. `fixed` pins
/// some of a, b, α, β to rationals first.
pub fn solve_shift_parametric_with(fixed: &[(Var, Rational)], max_degree: u32) -> Vec<ShiftBranch> {
    let order = shift_params();
    let [a, b, alpha, beta] = order.clone().map(MultiPoly::var);
    let mut out = Vec::new();
    for k in 0..=max_degree {
        let us: Vec<Var> = (0..k).map(|i| Var::param(&format!("_u{i}"))).collect();
        let mut f = x().pow(k);
        for (i, u) in us.iter().enumerate() {
            f += MultiPoly::var(u.clone()) * x().pow(i as u32);
        }
        let res = shift_residual(&a, &b, &alpha, &beta, &f);
        let rows: Vec<LinRow> = res
            .coefficients_in(&SPACE)
            .into_values()
            .map(|c| {
                let coeffs: Vec<MultiPoly> = us.iter().map(|u| c.coeff(u, 1)).collect();
                let constant = c.substitute_many(&us.iter().map(|u| (u.clone(), MultiPoly::zero())).collect::<Vec<_>>());
                LinRow { coeffs, constant }
            })
            .collect();
        let mut st = ElimState { rows, subst: Vec::new(), residual: Vec::new(), nonzero: Vec::new(), elims: Vec::new() };
        for (v, r) in fixed {
            st.apply(v, &MultiPoly::constant(r.clone()));
        }
        let mut finals = Vec::new();
        if st.consistent() {
            eliminate(st, &order, &mut finals);
        }
        for st in finals {
            out.push(finish_branch(k, &us, st, fixed));
        }
    }
    out
}

pub fn solve_shift_parametric(max_degree: u32) -> Vec<ShiftBranch> {
    solve_shift_parametric_with(&[], max_degree)
}

fn finish_branch(k: u32, us: &[Var], st: ElimState, fixed: &[(Var, Rational)]) -> ShiftBranch {
    let n = us.len();
    let mut vals: Vec<Option<(MultiPoly, MultiPoly)>> = vec![None; n];
    for (j, row) in st.elims.iter().rev() {
        let mut num = row.constant.clone();
        let mut den = MultiPoly::one();
        for (i, c) in row.coeffs.iter().enumerate() {
            if i == *j || c.is_zero() {
                continue;
            }
            let (vn, vd) = vals[i].clone().unwrap_or_else(|| (MultiPoly::var(us[i].clone()), MultiPoly::one()));
            num = &num * &vd + c * &vn * den.clone();
            den = &den * &vd;
        }
        vals[*j] = Some((-num, &den * &row.coeffs[*j]));
    }
    let den = vals.iter().flatten().fold(MultiPoly::one(), |acc, (_, d)| acc * d.clone());
    let mut num = x().pow(k) * den.clone();
    for (i, u) in us.iter().enumerate() {
        let term = match &vals[i] {
            Some((vn, _)) => {
                let others = vals
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != i)
                    .filter_map(|(_, v)| v.as_ref().map(|(_, d)| d.clone()))
                    .fold(MultiPoly::one(), |acc, d| acc * d);
                vn * &others
            }
            None => MultiPoly::var(u.clone()) * den.clone(),
        };
        num += term * x().pow(i as u32);
    }
    let solved = st.subst.into_iter().filter(|(v, _)| !fixed.iter().any(|(w, _)| w == v)).collect();
    ShiftBranch { degree: k, solved, residual: st.residual, nonzero: st.nonzero, f_num: num, f_den: den }
}

const GRID: [(i64, i64); 9] = [(1, 1), (-1, 1), (2, 1), (1, 2), (-3, 1), (5, 3), (-2, 7), (3, 1), (7, 4)];

fn sample_point(free: &[Var], solved: &[(Var, MultiPoly)], i: usize) -> Vec<(Var, Rational)> {
    let mut point: Vec<(Var, Rational)> = free
        .iter()
        .enumerate()
        .map(|(t, v)| {
            let (n, d) = GRID[(i * (2 * t + 1) + 3 * t) % GRID.len()];
            (v.clone(), frac(n, d))
        })
        .collect();
    for (v, e) in solved {
        let val = e.evaluate(&point).as_constant().unwrap_or_else(Rational::zero);
        point.push((v.clone(), val));
    }
    point
}

/// Compares two parametrised condition sets by evaluation: points of each
/// (solved variables from free ones) must satisfy the other's conditions.
pub fn same_conditions(left: &[(Var, MultiPoly)], right: &[(Var, MultiPoly)], vars: &[Var], samples: usize) -> bool {
    let holds = |point: &[(Var, Rational)], conds: &[(Var, MultiPoly)]| {
        conds.iter().all(|(v, e)| (MultiPoly::var(v.clone()) - e.clone()).evaluate(point).is_zero())
    };
    let one_way = |a: &[(Var, MultiPoly)], b: &[(Var, MultiPoly)]| {
        let free: Vec<Var> = vars.iter().filter(|v| !a.iter().any(|(w, _)| w == *v)).cloned().collect();
        (0..samples).all(|i| holds(&sample_point(&free, a, i), b))
    };
    one_way(left, right) && one_way(right, left)
}

/// Rank-two even parts on the generators A, B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvenType {
    /// [A_λA] = Q₁B, [A_λB] = P₁B with Q₁ = 0 or P₁ = 0.
    A { q1: MultiPoly, p1: MultiPoly },
    /// Vir ⊕ Vir
    B,
    /// Vir ⊕ commutative
    C,
    /// [A_λA] = (∂+2λ)A + QB, [A_λB] = (∂+aλ+b)B.
    D { a: Rational, b: Rational, q: MultiPoly },
}

impl EvenType {
    pub fn tag(&self) -> &'static str {
        match self {
            EvenType::A { .. } => "A",
            EvenType::B => "B",
            EvenType::C => "C",
            EvenType::D { .. } => "D",
        }
    }

    pub fn parse(tag: &str, spec: &FamilySpec) -> Result<EvenType> {
        let scalar = |n: &str| -> Result<Rational> {
            spec.value(n).as_constant().ok_or_else(|| Error::NotInstantiated(format!("`{n}` must be a rational")))
        };
        match tag.to_ascii_uppercase().as_str() {
            "A" => Ok(EvenType::A { q1: spec.value("f1"), p1: spec.value("p") }),
            "B" => Ok(EvenType::B),
            "C" => Ok(EvenType::C),
            "D" => Ok(EvenType::D { a: scalar("a")?, b: scalar("b")?, q: spec.value("q") }),
            other => Err(Error::Unknown(format!("even type `{other}`"))),
        }
    }

    fn is_hv(&self) -> bool {
        matches!(self, EvenType::D { a, b, q } if a.is_one() && b.is_zero() && q.is_zero())
    }

    fn brackets(&self) -> Vec<(&'static str, &'static str, &'static str, MultiPoly)> {
        match self {
            EvenType::A { q1, p1 } => vec![("A", "A", "B", q1.clone()), ("A", "B", "B", p1.clone())],
            EvenType::B => vec![("A", "A", "A", vir_poly()), ("B", "B", "B", vir_poly())],
            EvenType::C => vec![("A", "A", "A", vir_poly())],
            EvenType::D { a, b, q } => vec![
                ("A", "A", "A", vir_poly()),
                ("A", "A", "B", q.clone()),
                ("A", "B", "B", conformal_weight(&MultiPoly::constant(a.clone()), &MultiPoly::constant(b.clone()))),
            ],
        }
    }

    pub fn build(&self) -> Result<ConformalSuperAlgebra> {
        if let EvenType::A { q1, p1 } = self {
            if !q1.is_zero() && !p1.is_zero() {
                return Err(Error::Domain("type A needs Q1 = 0 or P1 = 0".into()));
            }
        }
        let mut b = ConformalSuperAlgebra::builder().even("A").even("B");
        for (i, j, k, q) in self.brackets() {
            b = b.bracket(i, j, k, q);
        }
        let alg = b.build()?;
        if !alg.is_lie_conformal() {
            return Err(Error::InvalidAlgebra(format!("type {} even part fails the axioms", self.tag())));
        }
        Ok(alg)
    }

    /// Even part plus X with the given actions and [X_λX] = ψ₁A + ψ₂B.
    pub fn assemble(&self, act_a: &MultiPoly, act_b: &MultiPoly, psi1: &MultiPoly, psi2: &MultiPoly) -> Result<ConformalSuperAlgebra> {
        let mut b = ConformalSuperAlgebra::builder().even("A").even("B").odd("X");
        for (i, j, k, q) in self.brackets() {
            b = b.bracket(i, j, k, q);
        }
        b.bracket("A", "X", "X", act_a.clone())
            .bracket("B", "X", "X", act_b.clone())
            .bracket("X", "X", "A", psi1.clone())
            .bracket("X", "X", "B", psi2.clone())
            .build()
    }
}

/// Coefficient of Z in [Y_λ[X_μX]] − [[Y_λX]_{λ+μ}X] − [X_μ[Y_λX]] for
/// Y, Z ∈ {A, B}, with [Y_λX] = φ_Y(∂,λ)X and [X_λX] = ψ₁(∂)A + ψ₂(∂)B.
pub fn odd_residuals(even: &ConformalSuperAlgebra, acts: [&MultiPoly; 2], psi: [&MultiPoly; 2]) -> Vec<(String, MultiPoly)> {
    let names = ["A", "B"];
    let shift = |p: &MultiPoly, by: MultiPoly| p.substitute(&Var::Partial, &(MultiPoly::d() + by));
    let mut out = Vec::new();
    for yi in 0..2 {
        let phi = acts[yi];
        let first = phi.substitute_many(&[(Var::Partial, -(MultiPoly::l() + MultiPoly::m()))]);
        let second = shift(phi, MultiPoly::m());
        let factor = first + second;
        for zi in 0..2 {
            let mut lhs = MultiPoly::zero();
            for (wi, p) in psi.iter().enumerate() {
                lhs += shift(p, MultiPoly::l()) * even.entry(yi, wi, zi);
            }
            out.push((format!("[{}(XX)]_{}", names[yi], names[zi]), lhs - &factor * psi[zi]));
        }
    }
    out
}

/// The odd-bracket constraints for fixed actions, ψ₁, ψ₂ of degree ≤ `degree`.
pub fn odd_system(even: &EvenType, act_a: &MultiPoly, act_b: &MultiPoly, degree: u32) -> Result<FunctionalEquation> {
    let alg = even.build()?;
    let mut ansatz = Ansatz::new();
    let psi1 = ansatz.univariate("psi1", &Var::Partial, degree);
    let psi2 = ansatz.univariate("psi2", &Var::Partial, degree);
    let residuals = odd_residuals(&alg, [act_a, act_b], [&psi1, &psi2]).into_iter().map(|(_, r)| r).collect();
    let template = if matches!(even, EvenType::A { .. }) { Template::ASystem } else { Template::OddSystem };
    Ok(FunctionalEquation { template, residuals, ansatz })
}

/// x, y structurally equal, with the (X, X) rows allowed to differ by one
/// nonzero rational factor (rescaling X).
pub fn same_structure(x: &ConformalSuperAlgebra, y: &ConformalSuperAlgebra) -> bool {
    if x.basis() != y.basis() {
        return false;
    }
    let n = x.rank();
    for i in 0..n {
        for j in 0..n {
            let odd_pair = x.parity(i).is_odd() && x.parity(j).is_odd();
            let mut ratio: Option<Rational> = None;
            for k in 0..n {
                let (p, q) = (x.entry(i, j, k), y.entry(i, j, k));
                if !odd_pair {
                    if p != q {
                        return false;
                    }
                    continue;
                }
                if p.is_zero() != q.is_zero() {
                    return false;
                }
                if p.is_zero() {
                    continue;
                }
                let Some((m, c)) = p.leading_term() else { return false };
                let Some(c2) = q.terms().find(|(mm, _)| **mm == m).map(|(_, c)| c.clone()) else { return false };
                let r = c2 / c;
                if p.scale(&r) != q || ratio.as_ref().is_some_and(|r0| *r0 != r) {
                    return false;
                }
                ratio = Some(r);
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct DerivedFamily {
    pub even: &'static str,
    pub action: String,
    pub act_a: MultiPoly,
    pub act_b: MultiPoly,
    pub psi1: MultiPoly,
    pub psi2: MultiPoly,
    /// Dimension of the ψ solution space for this action.
    pub space_dim: usize,
    pub algebra: ConformalSuperAlgebra,
    /// Passes skew-symmetry and Jacobi.
    pub sound: bool,
    /// Label of the structurally equal catalog family, if any.
    pub matched: Option<FamilySpec>,
}

impl DerivedFamily {
    pub fn matched_family(&self) -> Option<Family> {
        self.matched.as_ref().map(|s| s.family)
    }
}

struct Action {
    label: String,
    a: MultiPoly,
    b: MultiPoly,
}

fn weight_action(alpha: &Rational, beta: &Rational) -> MultiPoly {
    conformal_weight(&MultiPoly::constant(alpha.clone()), &MultiPoly::constant(beta.clone()))
}

/// (α, β) from the shift branches at fixed (a, b), plus a point off them.
fn weight_sweep(a: &Rational, b: &Rational, degree: u32) -> Vec<(String, Rational, Rational)> {
    let [pa, pb, palpha, pbeta] = shift_params();
    let generic = (frac(1, 3), frac(1, 5));
    let mut out = Vec::new();
    for br in solve_shift_parametric_with(&[(pa, a.clone()), (pb, b.clone())], degree) {
        let pick = |v: &Var, dflt: &Rational| {
            br.value_of(v).and_then(|e| e.as_constant()).unwrap_or_else(|| dflt.clone())
        };
        let (al, be) = (pick(&palpha, &generic.0), pick(&pbeta, &generic.1));
        out.push((format!("shift branch deg {}: alpha={al}, beta={be}", br.degree), al, be));
    }
    out.push((format!("generic: alpha={}, beta={}", generic.0, generic.1), generic.0, generic.1));
    out
}

fn actions(even: &EvenType, degree: u32) -> Vec<Action> {
    let zero = MultiPoly::zero();
    let mut out = vec![Action { label: "trivial".into(), a: zero.clone(), b: zero.clone() }];
    let weights = |a: &Rational, b: &Rational, out: &mut Vec<Action>, gamma: &MultiPoly| {
        for (label, al, be) in weight_sweep(a, b, degree) {
            let lab = if gamma.is_zero() { label } else { format!("{label}, gamma={gamma}") };
            out.push(Action { label: lab, a: weight_action(&al, &be), b: gamma.clone() });
        }
    };
    match even {
        EvenType::A { p1, .. } => {
            let mut phis = vec![MultiPoly::one(), y(), y().pow(2) + MultiPoly::int(2)];
            if !p1.is_zero() {
                phis.push(p1.scale(&frac(1, 2)));
            }
            for phi in phis {
                out.push(Action { label: format!("phi={phi}"), a: phi, b: zero.clone() });
            }
        }
        EvenType::B => weights(&rat(2), &rat(0), &mut out, &zero),
        EvenType::C => {
            weights(&rat(2), &rat(0), &mut out, &zero);
            for phi in [MultiPoly::one(), y(), y() + MultiPoly::one()] {
                out.push(Action { label: format!("B acts by {phi}"), a: zero.clone(), b: phi });
            }
        }
        EvenType::D { a, b, .. } => {
            weights(a, b, &mut out, &zero);
            if even.is_hv() {
                weights(a, b, &mut out, &MultiPoly::one());
            }
        }
    }
    out
}

fn candidates(even: &EvenType, act_a: &MultiPoly, act_b: &MultiPoly, psi2: &MultiPoly) -> Vec<FamilySpec> {
    let alpha = act_a.coeff(&Var::Lambda, 1);
    let beta = act_a.coeff(&Var::Lambda, 0).coeff(&Var::Partial, 0);
    let set = |s: FamilySpec, k: &str, v: &MultiPoly| s.set(k, v.clone()).ok();
    let mut out: Vec<Option<FamilySpec>> = Vec::new();
    match even {
        EvenType::A { q1, p1 } => {
            out.push(set(FamilySpec::new(Family::A1), "f1", q1).and_then(|s| set(s, "phi1", act_a)));
            out.push(set(FamilySpec::new(Family::A2), "f2", q1).and_then(|s| set(s, "psi", psi2)));
            out.push(set(FamilySpec::new(Family::A3), "phi3", act_a));
            out.push(set(FamilySpec::new(Family::A4), "p", p1).and_then(|s| set(s, "phi4", act_a)));
        }
        EvenType::B | EvenType::C => {
            let (f0, f1, f2) = if *even == EvenType::B {
                (Family::B0, Family::B1, Family::B2)
            } else {
                (Family::C0, Family::C1, Family::C2)
            };
            out.push(Some(FamilySpec::new(f0)));
            out.push(set(FamilySpec::new(f1), "alpha", &alpha).and_then(|s| set(s, "beta", &beta)));
            out.push(Some(FamilySpec::new(f2)));
            if *even == EvenType::C {
                out.push(set(FamilySpec::new(Family::C3), "phi", act_b));
            }
        }
        EvenType::D { a, b, q } => {
            let d = |f: Family| {
                let s = FamilySpec::new(f);
                let s = if f == Family::D3 { Some(s) } else { s.set("a", MultiPoly::constant(a.clone())).ok() };
                s.and_then(|s| s.set("b", MultiPoly::constant(b.clone())).ok()).and_then(|s| s.set("q", q.clone()).ok())
            };
            if even.is_hv() {
                out.push(
                    set(FamilySpec::new(Family::D4), "alpha", &alpha)
                        .and_then(|s| set(s, "beta", &beta))
                        .and_then(|s| set(s, "gamma", act_b)),
                );
                out.push(Some(FamilySpec::new(Family::D5)));
            }
            out.push(d(Family::D0));
            out.push(d(Family::D1).and_then(|s| set(s, "alpha", &alpha)).and_then(|s| set(s, "beta", &beta)));
            out.push(d(Family::D2));
            if a.is_zero() {
                out.push(d(Family::D3));
            }
        }
    }
    out.into_iter().flatten().collect()
}

fn match_catalog(even: &EvenType, fam: &ConformalSuperAlgebra, act_a: &MultiPoly, act_b: &MultiPoly, psi2: &MultiPoly) -> Option<FamilySpec> {
    candidates(even, act_a, act_b, psi2)
        .into_iter()
        .find(|spec| spec.build().map(|alg| same_structure(fam, &alg)).unwrap_or(false))
}

/// Derives the odd structures over `even`: for each action drawn from the
/// rank-one module forms, solves the odd-bracket constraints for ψ₁, ψ₂ of
/// degree ≤ `degree` and matches each solution family against the catalog.
pub fn derive_odd_structure(even: &EvenType, degree: u32) -> Result<Vec<DerivedFamily>> {
    even.build()?;
    let mut out: Vec<DerivedFamily> = Vec::new();
    for act in actions(even, degree) {
        let eq = odd_system(even, &act.a, &act.b, degree)?;
        let space = eq.solve()?;
        let mut members = vec![(MultiPoly::zero(), MultiPoly::zero())];
        match space.dim() {
            0 => {}
            1 => {
                let v = space.member(&space.basis[0]);
                members.push((v[0].clone(), v[1].clone()));
            }
            _ => {
                let v = space.generic("t");
                members.push((v[0].clone(), v[1].clone()));
            }
        }
        for (psi1, psi2) in members {
            let alg = even.assemble(&act.a, &act.b, &psi1, &psi2)?;
            let sound = alg.check_skew().is_empty() && alg.check_jacobi().is_empty();
            let matched = match_catalog(even, &alg, &act.a, &act.b, &psi2);
            if out.iter().any(|f| f.algebra == alg) {
                continue;
            }
            out.push(DerivedFamily {
                even: even.tag(),
                action: act.label.clone(),
                act_a: act.a.clone(),
                act_b: act.b.clone(),
                psi1,
                psi2,
                space_dim: space.dim(),
                algebra: alg,
                sound,
                matched,
            });
        }
    }
    Ok(out)
}

/// The probe even parts and the catalog families each should reproduce.
pub fn derivation_probes() -> Vec<(String, EvenType, Vec<Family>)> {
    use Family::*;
    let d = |a: i64, b: i64, q: MultiPoly| EvenType::D { a: rat(a), b: rat(b), q };
    vec![
        ("A nilpotent, Q1=d+2l".to_string(), EvenType::A { q1: vir_poly(), p1: MultiPoly::zero() }, vec![A1, A2]),
        ("A solvable, P1=l".to_string(), EvenType::A { q1: MultiPoly::zero(), p1: y() }, vec![A3, A4]),
        ("B".to_string(), EvenType::B, vec![B0, B1, B2]),
        ("C".to_string(), EvenType::C, vec![C0, C1, C2, C3]),
        ("D a=2, b=1".to_string(), d(2, 1, MultiPoly::zero()), vec![D0, D1, D2]),
        ("D a=0, b=1".to_string(), d(0, 1, MultiPoly::zero()), vec![D0, D1, D2, D3]),
        ("D a=-1, b=0, Q=(d+2l)d^2".to_string(), d(-1, 0, vir_poly() * x().pow(2)), vec![D0, D1, D2]),
        ("D HV".to_string(), d(1, 0, MultiPoly::zero()), vec![D0, D4, D5]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_poly_open;
    use alloc::collections::BTreeSet;

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn proportional(u: &[Rational], v: &[Rational]) -> bool {
        let i = u.iter().position(|x| !x.is_zero()).unwrap();
        let f = &v[i] / &u[i];
        u.iter().zip(v).all(|(a, b)| a * &f == *b)
    }

    #[test]
    fn nullspace_examples() {
        assert!(rational_nullspace(&[r(&[1, 0]), r(&[0, 1])], 2).is_empty());
        assert_eq!(rational_nullspace(&[r(&[0, 0]), r(&[0, 0])], 2), vec![r(&[1, 0]), r(&[0, 1])]);
        let k = rational_nullspace(&[r(&[1, 1]), r(&[2, 2])], 2);
        assert_eq!(k.len(), 1);
        assert!(proportional(&k[0], &r(&[1, -1])));
    }

    #[test]
    fn nullspace_vectors_are_kernel() {
        let m = vec![r(&[1, 2, 3, 4]), r(&[2, 4, 6, 8]), r(&[0, 1, -1, 2])];
        let k = rational_nullspace(&m, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &m {
                let s: Rational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn shift_examples() {
        let s = solve_shift(&rat(2), &rat(0), &frac(3, 2), &rat(0), 6).unwrap();
        assert_eq!(s.basis_polys(), vec![vec![p("1")]]);
        let s = solve_shift(&rat(0), &rat(0), &rat(1), &rat(0), 6).unwrap();
        assert_eq!(s.basis_polys(), vec![vec![p("d")]]);
        assert_eq!(solve_shift(&rat(2), &rat(1), &rat(3), &rat(5), 6).unwrap().dim(), 0);
        let eq = shift_equation(&rat(0), &rat(3), &rat(1), &frac(3, 2), 4);
        let s = eq.solve().unwrap();
        assert!(eq.verify(&s));
        assert_eq!(s.basis_polys(), vec![vec![p("d+3")]]);
    }

    #[test]
    fn shift_dimension_stabilises() {
        for (a, b, al, be) in [(0, 2, 1, 1), (1, 0, 1, 0), (3, 2, 2, 1), (0, 0, 1, 0)] {
            let dims: Vec<usize> =
                (1..=6).map(|d| solve_shift(&rat(a), &rat(b), &rat(al), &rat(be), d).unwrap().dim()).collect();
            assert!(dims.windows(2).all(|w| w[0] == w[1]), "{dims:?}");
        }
    }

    #[test]
    fn shift_parametric_branches() {
        let br = solve_shift_parametric(6);
        assert_eq!(br.len(), 2, "{br:?}");
        let [a, b, alpha, beta] = shift_params();
        let v = |x: &Var| MultiPoly::var(x.clone());
        assert_eq!(br[0].degree, 0);
        let constant_branch = vec![(a.clone(), v(&alpha).scale(&rat(2)) - MultiPoly::one()), (b.clone(), v(&beta).scale(&rat(2)))];
        assert!(same_conditions(&br[0].solved, &constant_branch, &shift_params(), 25));
        assert_eq!(br[1].degree, 1);
        let linear_branch = vec![(a.clone(), MultiPoly::zero()), (alpha.clone(), MultiPoly::one()), (b.clone(), v(&beta).scale(&rat(2)))];
        assert!(same_conditions(&br[1].solved, &linear_branch, &shift_params(), 25));
        assert!(!same_conditions(&br[0].solved, &linear_branch, &shift_params(), 25));
        let f = br[1].f().unwrap();
        assert_eq!(f.substitute(&beta, &v(&b).scale(&frac(1, 2))), x() + v(&b));
    }

    #[test]
    fn fgh_examples() {
        let s = solve_fgh(&FghKnown::F(p("d+1")), 4).unwrap();
        assert_eq!(s.dim(), 0);
        let eq = fgh_equation(&FghKnown::F(p("2")), 4).unwrap();
        let s = eq.solve().unwrap();
        assert_eq!(s.dim(), 5);
        assert!(eq.verify(&s));
        for v in s.basis_polys() {
            assert_eq!(v[0], v[1]);
            assert!(!v[0].contains_var(&Var::Partial));
        }
        assert!(solve_fgh(&FghKnown::F(p("0")), 4).is_err());
        let s = solve_fgh(&FghKnown::GH(p("l+1"), p("l+1")), 4).unwrap();
        assert_eq!(s.basis_polys(), vec![vec![p("1")]]);
    }

    #[test]
    fn a_system_matches_hand_equations() {
        let even = EvenType::A { q1: vir_poly(), p1: MultiPoly::zero() };
        let s = odd_system(&even, &y(), &MultiPoly::zero(), 4).unwrap().solve().unwrap();
        assert_eq!(s.dim(), 0);
        let s = odd_system(&even, &MultiPoly::zero(), &MultiPoly::zero(), 4).unwrap().solve().unwrap();
        assert_eq!(s.dim(), 5);
        assert!(s.basis_polys().iter().all(|v| v[0].is_zero()));
    }

    #[test]
    fn structure_comparison_allows_odd_rescaling() {
        let a = EvenType::B.assemble(&p("d+3/2*l"), &p("0"), &p("1"), &p("0")).unwrap();
        let b = FamilySpec::new(Family::B2).build().unwrap();
        assert!(same_structure(&a, &b));
        let c = EvenType::B.assemble(&p("d+l"), &p("0"), &p("1"), &p("0")).unwrap();
        assert!(!same_structure(&c, &b));
    }

    #[test]
    fn derivation_reproduces_catalog() {
        for (label, even, expected) in derivation_probes() {
            let fams = derive_odd_structure(&even, 6).unwrap();
            for f in &fams {
                assert!(f.sound, "{label}: {} unsound", f.action);
            }
            let got: BTreeSet<Family> = fams.iter().filter_map(|f| f.matched_family()).collect();
            let want: BTreeSet<Family> = expected.into_iter().collect();
            assert_eq!(got, want, "{label}");
            let unmatched: Vec<&DerivedFamily> = fams.iter().filter(|f| f.matched.is_none()).collect();
            if even == EvenType::C {
                assert_eq!(unmatched.len(), 1);
                assert!(unmatched[0].psi1.is_zero() && !unmatched[0].psi2.is_zero());
                assert!(unmatched[0].act_a.is_zero() && unmatched[0].act_b.is_zero());
            } else {
                assert!(unmatched.is_empty(), "{label}: {:?}", unmatched.iter().map(|f| &f.action).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn type_b_psi_from_shift() {
        let fams = derive_odd_structure(&EvenType::B, 6).unwrap();
        let b2 = fams.iter().find(|f| f.matched_family() == Some(Family::B2)).unwrap();
        assert_eq!(b2.act_a, p("d+3/2*l"));
        assert!(b2.psi1.is_constant() && b2.psi2.is_zero());
    }

    #[test]
    fn bad_even_parts() {
        assert!(EvenType::A { q1: vir_poly(), p1: y() }.build().is_err());
        let q = vir_poly() * crate::catalog::sym_u().pow(3);
        assert!(derive_odd_structure(&EvenType::D { a: rat(2), b: rat(0), q }, 3).is_err());
    }
}
