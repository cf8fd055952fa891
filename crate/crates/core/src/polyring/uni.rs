use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use super::{MultiPoly, Rational, Var};

/// Dense univariate polynomial over ℚ, lowest coefficient first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> UniPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly::default()
    }

    pub fn one() -> UniPoly {
        UniPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> UniPoly {
        UniPoly::new(alloc::vec![c])
    }

    /// x^e
    pub fn monomial(e: usize) -> UniPoly {
        let mut coeffs = alloc::vec![Rational::zero(); e + 1];
        coeffs[e] = Rational::one();
        UniPoly { coeffs }
    }

    /// x − r
    pub fn linear_root(r: &Rational) -> UniPoly {
        UniPoly::new(alloc::vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = alloc::vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &UniPoly) -> Option<(UniPoly, UniPoly)> {
        let dd = d.degree()?;
        let inv = Rational::one() / d.lead();
        let mut rem = self.coeffs.clone();
        let mut quot = alloc::vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = &rem[top] * &inv;
            if !c.is_zero() {
                for (k, dk) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + k;
                    rem[idx] -= &c * dk;
                }
                quot[top - dd] = c;
            }
            rem.pop();
        }
        Some((UniPoly::new(quot), UniPoly::new(rem)))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Rational roots by the rational root theorem, without multiplicity.
    pub fn rational_roots(&self) -> Vec<Rational> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let Some(deg) = self.degree() else { return Vec::new() };
        if deg == 0 {
            return Vec::new();
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let mut roots = Vec::new();
        // x = 0 first, then strip the factor x^k.
        let shift = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        if shift > 0 {
            roots.push(Rational::zero());
        }
        let ints = &ints[shift..];
        if ints.len() < 2 {
            return roots;
        }
        let c0 = ints[0].clone();
        let cn = ints[ints.len() - 1].clone();
        let ps = divisors(&c0);
        let qs = divisors(&cn);
        let mut cands: Vec<Rational> = Vec::new();
        for p in &ps {
            for q in &qs {
                for s in [1i64, -1] {
                    let r = Rational::new(p.clone() * BigInt::from(s), q.clone());
                    if !cands.contains(&r) {
                        cands.push(r);
                    }
                }
            }
        }
        cands.sort();
        for r in cands {
            if self.eval(&r).is_zero() && !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots
    }

    pub fn to_multi(&self, v: &Var) -> MultiPoly {
        MultiPoly::from_uni(self, v)
    }
}

fn divisors(n: &num_bigint::BigInt) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    use num_traits::Signed;
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let j = &n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_multi(&Var::Partial))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{frac, rat};

    fn u(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn euclid() {
        let (q, r) = u(&[1, 0, 1]).div_rem(&u(&[0, 1])).unwrap();
        assert_eq!(q, u(&[0, 1]));
        assert_eq!(r, u(&[1]));
        let (q, r) = u(&[-1, 0, 1]).div_rem(&u(&[-1, 1])).unwrap();
        assert_eq!(q, u(&[1, 1]));
        assert!(r.is_zero());
        assert!(u(&[1]).div_rem(&UniPoly::zero()).is_none());
    }

    #[test]
    fn roots() {
        // 2x² − x − 1 = (2x+1)(x−1)
        let mut rs = u(&[-1, -1, 2]).rational_roots();
        rs.sort();
        assert_eq!(rs, alloc::vec![frac(-1, 2), rat(1)]);
        assert_eq!(u(&[0, 0, 1]).rational_roots(), alloc::vec![rat(0)]);
        assert!(u(&[1, 0, 1]).rational_roots().is_empty());
    }
}
