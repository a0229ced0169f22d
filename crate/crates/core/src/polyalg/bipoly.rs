//! Sparse bivariate polynomials in (λ, ω).

use std::collections::BTreeMap;
use std::fmt;

use super::{Poly, Rat, Ring};

/// Map from `(λ-power, ω-power)` to a nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Rat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        BiPoly::term(c, 0, 0)
    }

    pub fn term(c: Rat, lambda_pow: usize, omega_pow: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((lambda_pow, omega_pow), c);
        }
        BiPoly { terms }
    }

    /// Embeds a polynomial in λ.
    pub fn from_lambda_poly(p: &Poly) -> Self {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| ((k, 0), c.clone()))
            .collect();
        BiPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: (usize, usize), c: &Rat) {
        let entry = self.terms.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Coefficients grouped by ω power: `Σ_j p_j(λ) ω^j`, ascending `j`,
    /// zero groups omitted.
    pub fn omega_coefficients(&self) -> Vec<(usize, Poly)> {
        let mut groups: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            let v = groups.entry(j).or_default();
            if v.len() <= i {
                v.resize(i + 1, Rat::zero());
            }
            v[i] = c.clone();
        }
        groups.into_iter().map(|(j, v)| (j, Poly::new(v))).collect()
    }

    pub fn eval(&self, lambda: &Rat, omega: &Rat) -> Rat {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c * &(&lambda.pow(i as u32) * &omega.pow(j as u32)))
            .sum()
    }

    // monomial order: ω power first, then λ power
    fn leading_key(&self) -> Option<(usize, usize)> {
        self.terms.keys().max_by_key(|&&(i, j)| (j, i)).copied()
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| {
                let mut s = c.to_string();
                if i > 0 {
                    s.push_str(&format!("*λ^{i}"));
                }
                if j > 0 {
                    s.push_str(&format!("*ω^{j}"));
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Ring for BiPoly {
    fn zero() -> Self {
        BiPoly::zero()
    }

    fn one() -> Self {
        BiPoly::constant(Rat::one())
    }

    fn is_zero(&self) -> bool {
        BiPoly::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c);
        }
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, &-c);
        }
        out
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = BiPoly::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), &(a * b));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    /// Multivariate division; succeeds only when the remainder is zero.
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        let (li, lj) = rhs.leading_key()?;
        let lc_inv = rhs.terms[&(li, lj)].recip()?;
        let mut rem = self.clone();
        let mut quot = BiPoly::zero();
        while let Some((ri, rj)) = rem.leading_key() {
            if ri < li || rj < lj {
                return None;
            }
            let c = &rem.terms[&(ri, rj)] * &lc_inv;
            let t = BiPoly::term(c, ri - li, rj - lj);
            rem = rem.sub(&t.mul(rhs));
            quot = quot.add(&t);
        }
        Some(quot)
    }
}
