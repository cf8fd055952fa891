//! Hermite normal form over ℚ[∂].

use alloc::vec::Vec;

use crate::error::Result;
use num_traits::One;

use crate::polyring::{MultiPoly, Rational, UniPoly, Var};

/// Submodule of ℚ[∂]^n kept together with its canonical row basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySubmodule {
    ambient: usize,
    generators: Vec<Vec<UniPoly>>,
    basis: Vec<Vec<UniPoly>>,
}

fn pivot(row: &[UniPoly]) -> Option<usize> {
    row.iter().position(|e| !e.is_zero())
}

fn axpy(row: &mut [UniPoly], q: &UniPoly, other: &[UniPoly]) {
    for (a, b) in row.iter_mut().zip(other) {
        *a = a.sub(&q.mul(b));
    }
}

/// Canonical basis: monic pivots in strictly increasing columns, entries
/// above each pivot reduced below the pivot degree. Pivots are chosen by
/// minimal degree, ties by input order.
pub fn hermite_normal_form(ambient: usize, rows: &[Vec<UniPoly>]) -> PolySubmodule {
    let mut work: Vec<Vec<UniPoly>> = rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.resize(ambient, UniPoly::zero());
            r
        })
        .filter(|r| pivot(r).is_some())
        .collect();
    let mut basis: Vec<Vec<UniPoly>> = Vec::new();
    for col in 0..ambient {
        loop {
            let cands: Vec<usize> = (0..work.len()).filter(|&r| !work[r][col].is_zero()).collect();
            if cands.is_empty() {
                break;
            }
            let p = *cands
                .iter()
                .min_by_key(|&&r| (work[r][col].degree(), r))
                .expect("nonempty");
            if cands.len() == 1 {
                let row = work.remove(p);
                let scale = Rational::one() / row[col].lead();
                basis.push(row.iter().map(|e| e.scale(&scale)).collect());
                break;
            }
            let prow = work[p].clone();
            for &r in &cands {
                if r == p {
                    continue;
                }
                let (q, _) = work[r][col].div_rem(&prow[col]).expect("pivot nonzero");
                axpy(&mut work[r], &q, &prow);
            }
            work.retain(|r| pivot(r).is_some());
        }
    }
    for r in 0..basis.len() {
        let c = pivot(&basis[r]).expect("basis rows are nonzero");
        let prow = basis[r].clone();
        for e in 0..r {
            let (q, _) = basis[e][c].div_rem(&prow[c]).expect("pivot nonzero");
            if !q.is_zero() {
                axpy(&mut basis[e], &q, &prow);
            }
        }
    }
    PolySubmodule { ambient, generators: rows.to_vec(), basis }
}

impl PolySubmodule {
    pub fn zero(ambient: usize) -> PolySubmodule {
        PolySubmodule { ambient, generators: Vec::new(), basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> PolySubmodule {
        let rows: Vec<Vec<UniPoly>> = (0..ambient).map(|i| unit(ambient, i)).collect();
        hermite_normal_form(ambient, &rows)
    }

    /// Rows with polynomial entries in ∂ only.
    pub fn from_multi(ambient: usize, rows: &[Vec<MultiPoly>]) -> Result<PolySubmodule> {
        let mut conv = Vec::with_capacity(rows.len());
        for r in rows {
            conv.push(r.iter().map(|p| p.to_uni(&Var::Partial)).collect::<Result<Vec<_>>>()?);
        }
        Ok(hermite_normal_form(ambient, &conv))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Vec<UniPoly>] {
        &self.generators
    }

    pub fn basis(&self) -> &[Vec<UniPoly>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Remainder of `v` after reduction against the basis.
    pub fn reduce(&self, v: &[UniPoly]) -> Vec<UniPoly> {
        let mut v: Vec<UniPoly> = v.to_vec();
        v.resize(self.ambient, UniPoly::zero());
        for row in &self.basis {
            let c = pivot(row).expect("basis rows are nonzero");
            if v[c].is_zero() {
                continue;
            }
            let (q, _) = v[c].div_rem(&row[c]).expect("pivot nonzero");
            axpy(&mut v, &q, row);
        }
        v
    }

    pub fn contains(&self, v: &[UniPoly]) -> bool {
        self.reduce(v).iter().all(UniPoly::is_zero)
    }

    pub fn contains_all(&self, other: &PolySubmodule) -> bool {
        other.basis.iter().all(|r| self.contains(r))
    }

    pub fn is_full(&self) -> bool {
        (0..self.ambient).all(|i| self.contains(&unit(self.ambient, i)))
    }

    pub fn basis_multi(&self) -> Vec<Vec<MultiPoly>> {
        self.basis.iter().map(|r| r.iter().map(|u| u.to_multi(&Var::Partial)).collect()).collect()
    }
}

pub fn unit(n: usize, i: usize) -> Vec<UniPoly> {
    (0..n).map(|k| if k == i { UniPoly::one() } else { UniPoly::zero() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat;

    fn u(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn gcd_collapses_column() {
        // {(∂,0),(2,0),(0,∂+1)} → {(1,0),(0,∂+1)}
        let rows = alloc::vec![
            alloc::vec![u(&[0, 1]), u(&[])],
            alloc::vec![u(&[2]), u(&[])],
            alloc::vec![u(&[]), u(&[1, 1])],
        ];
        let h = hermite_normal_form(2, &rows);
        assert_eq!(h.basis(), &[alloc::vec![u(&[1]), u(&[])], alloc::vec![u(&[]), u(&[1, 1])]]);
    }

    #[test]
    fn canonical_input_is_fixed() {
        let rows = alloc::vec![alloc::vec![u(&[1, 1]), u(&[])]];
        assert_eq!(hermite_normal_form(2, &rows).basis(), &rows[..]);
    }

    #[test]
    fn gcd_of_two_rows() {
        let rows = alloc::vec![alloc::vec![u(&[-1, 0, 1]), u(&[])], alloc::vec![u(&[-1, 1]), u(&[])]];
        assert_eq!(hermite_normal_form(2, &rows).basis(), &[alloc::vec![u(&[-1, 1]), u(&[])]]);
    }

    #[test]
    fn above_pivot_reduction() {
        let rows = alloc::vec![alloc::vec![u(&[1]), u(&[0, 0, 1])], alloc::vec![u(&[]), u(&[0, 1])]];
        let h = hermite_normal_form(2, &rows);
        assert_eq!(h.basis()[0], alloc::vec![u(&[1]), u(&[])]);
        assert!(h.contains(&[u(&[2]), u(&[0, 3])]));
        assert!(!h.contains(&[u(&[]), u(&[1])]));
    }
}
