//! Derived and lower central series of instantiated algebras.

use alloc::vec::Vec;

use super::hnf::{hermite_normal_form, PolySubmodule};
use super::{ConformalSuperAlgebra, Element};
use crate::error::{Error, Result};
use crate::polyring::{UniPoly, Var};

const MAX_STEPS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub terms: Vec<PolySubmodule>,
    /// The iteration cap was hit before the chain stabilised.
    pub capped: bool,
}

impl Series {
    pub fn last(&self) -> &PolySubmodule {
        self.terms.last().expect("series starts with R")
    }

    pub fn reaches_zero(&self) -> bool {
        self.last().is_zero()
    }
}

fn require_instantiated(alg: &ConformalSuperAlgebra) -> Result<()> {
    let ps = alg.params();
    if let Some(p) = ps.iter().next() {
        return Err(Error::NotInstantiated(alloc::format!("parameter `{p}` is symbolic")));
    }
    Ok(())
}

fn to_element(row: &[UniPoly]) -> Element {
    Element::from_coords(row.iter().enumerate().map(|(i, u)| (i, u.to_multi(&Var::Partial))))
}

fn to_row(e: &Element, n: usize) -> Result<Vec<UniPoly>> {
    (0..n).map(|i| e.coord(i).to_uni(&Var::Partial)).collect()
}

fn products(alg: &ConformalSuperAlgebra, xs: &[Element], ys: &[Element]) -> Result<Vec<Vec<UniPoly>>> {
    let n = alg.rank();
    let mut rows = Vec::new();
    for x in xs {
        for y in ys {
            for e in alg.jth_products_of(x, y).values() {
                rows.push(to_row(e, n)?);
            }
        }
    }
    Ok(rows)
}

fn generators(alg: &ConformalSuperAlgebra) -> Vec<Element> {
    (0..alg.rank()).map(Element::generator).collect()
}

fn iterate(
    alg: &ConformalSuperAlgebra,
    mut step: impl FnMut(&PolySubmodule) -> Result<PolySubmodule>,
) -> Result<Series> {
    require_instantiated(alg)?;
    let mut terms = alloc::vec![PolySubmodule::full(alg.rank())];
    for _ in 0..MAX_STEPS {
        let cur = terms.last().expect("nonempty");
        if cur.is_zero() {
            return Ok(Series { terms, capped: false });
        }
        let next = step(cur)?;
        let stable = next.basis() == cur.basis();
        terms.push(next);
        if stable {
            return Ok(Series { terms, capped: false });
        }
    }
    let capped = !terms.last().expect("nonempty").is_zero();
    Ok(Series { terms, capped })
}

/// R ⊇ R' ⊇ R'' ⊇ … with R^(n+1) spanned by all products of R^(n).
pub fn derived_series(alg: &ConformalSuperAlgebra) -> Result<Series> {
    iterate(alg, |cur| {
        let gens: Vec<Element> = cur.basis().iter().map(|r| to_element(r)).collect();
        Ok(hermite_normal_form(alg.rank(), &products(alg, &gens, &gens)?))
    })
}

/// R ⊇ R¹ ⊇ R² ⊇ … with R^{k+1} spanned by products of R with R^k.
pub fn lower_central_series(alg: &ConformalSuperAlgebra) -> Result<Series> {
    let all = generators(alg);
    iterate(alg, |cur| {
        let gens: Vec<Element> = cur.basis().iter().map(|r| to_element(r)).collect();
        Ok(hermite_normal_form(alg.rank(), &products(alg, &all, &gens)?))
    })
}

pub fn is_solvable(alg: &ConformalSuperAlgebra) -> Result<bool> {
    Ok(derived_series(alg)?.reaches_zero())
}

pub fn is_nilpotent(alg: &ConformalSuperAlgebra) -> Result<bool> {
    Ok(lower_central_series(alg)?.reaches_zero())
}

/// True iff every product of a generator with an element of `sub` lies in `sub`.
pub fn check_ideal(alg: &ConformalSuperAlgebra, sub: &PolySubmodule) -> Result<bool> {
    require_instantiated(alg)?;
    let gens: Vec<Element> = sub.basis().iter().map(|r| to_element(r)).collect();
    let all = generators(alg);
    for row in products(alg, &all, &gens)?.iter().chain(products(alg, &gens, &all)?.iter()) {
        if !sub.contains(row) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Submodule spanned by single generators, e.g. ℂ[∂]B.
pub fn span_of_generators(alg: &ConformalSuperAlgebra, idx: &[usize]) -> PolySubmodule {
    let rows: Vec<Vec<UniPoly>> = idx.iter().map(|&i| super::hnf::unit(alg.rank(), i)).collect();
    hermite_normal_form(alg.rank(), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_poly_open, MultiPoly};

    fn p(s: &str) -> MultiPoly {
        parse_poly_open(s).unwrap()
    }

    fn a2() -> ConformalSuperAlgebra {
        ConformalSuperAlgebra::builder()
            .even("A")
            .even("B")
            .odd("X")
            .bracket("A", "A", "B", p("d+2*l"))
            .bracket("X", "X", "B", p("1"))
            .build()
            .unwrap()
    }

    #[test]
    fn a2_series() {
        let alg = a2();
        let b = span_of_generators(&alg, &[1]);
        let ds = derived_series(&alg).unwrap();
        assert_eq!(ds.terms.len(), 3);
        assert_eq!(ds.terms[1].basis(), b.basis());
        assert!(ds.reaches_zero());
        let lc = lower_central_series(&alg).unwrap();
        assert_eq!(lc.terms[1].basis(), b.basis());
        assert!(lc.reaches_zero());
    }

    #[test]
    fn ideals() {
        let alg = a2();
        let ds = derived_series(&alg).unwrap();
        assert!(check_ideal(&alg, &ds.terms[1]).unwrap());
        assert!(!check_ideal(&alg, &span_of_generators(&alg, &[0])).unwrap());
    }

    #[test]
    fn symbolic_rejected() {
        let alg = ConformalSuperAlgebra::builder().even("A").bracket("A", "A", "A", p("d+a*l")).build().unwrap();
        assert!(matches!(derived_series(&alg), Err(Error::NotInstantiated(_))));
    }
}
