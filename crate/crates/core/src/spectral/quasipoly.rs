//! Characteristic quasipolynomials `g(λ) = Σ_j p_j(λ) e^{−jλτ}`.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::polyroots::poly_roots;
use crate::error::{DdaeError, Result};
use crate::polyalg::{BiPoly, MatPoly, Poly, Rat, RatMatrix};

#[derive(Clone, PartialEq)]
pub struct QuasiPoly {
    terms: Vec<(usize, Poly)>,
    delay: Rat,
}

/// Growth type of a quasipolynomial after factoring out the lowest delay power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayType {
    /// Only one term: an ordinary polynomial times an exponential.
    Polynomial,
    Retarded,
    Neutral,
    /// Every coefficient is a constant: roots lie on vertical chains.
    PureDifference,
    Advanced,
}

impl QuasiPoly {
    /// Drops zero terms and sorts by delay power.
    pub fn new(terms: Vec<(usize, Poly)>, delay: Rat) -> Result<Self> {
        if !delay.is_positive() {
            return Err(DdaeError::NonPositiveDelay);
        }
        let mut merged: std::collections::BTreeMap<usize, Poly> = Default::default();
        for (j, p) in terms {
            let e = merged.entry(j).or_insert_with(Poly::zero);
            *e = &*e + &p;
        }
        let terms = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Ok(QuasiPoly { terms, delay })
    }

    pub fn from_bipoly(b: &BiPoly, delay: Rat) -> Result<Self> {
        QuasiPoly::new(b.omega_coefficients(), delay)
    }

    pub fn terms(&self) -> &[(usize, Poly)] {
        &self.terms
    }

    pub fn delay(&self) -> &Rat {
        &self.delay
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_power(&self) -> usize {
        self.terms.last().map_or(0, |(j, _)| *j)
    }

    /// Same zeros with the lowest delay power shifted to zero.
    pub fn normalized(&self) -> QuasiPoly {
        let jmin = self.terms.first().map_or(0, |(j, _)| *j);
        QuasiPoly { terms: self.terms.iter().map(|(j, p)| (j - jmin, p.clone())).collect(), delay: self.delay.clone() }
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn delay_type(&self) -> DelayType {
        let n = self.normalized();
        if n.terms.len() <= 1 {
            return DelayType::Polynomial;
        }
        if n.terms.iter().all(|(_, p)| p.degree() == Some(0)) {
            return DelayType::PureDifference;
        }
        let d0 = n.terms[0].1.degree().unwrap_or(0);
        let dmax = n.terms[1..].iter().filter_map(|(_, p)| p.degree()).max().unwrap_or(0);
        match d0.cmp(&dmax) {
            std::cmp::Ordering::Greater => DelayType::Retarded,
            std::cmp::Ordering::Equal => DelayType::Neutral,
            std::cmp::Ordering::Less => DelayType::Advanced,
        }
    }

    /// The ω-polynomial `Σ_j c_j ω^j` of a pure difference quasipolynomial.
    pub fn omega_poly(&self) -> Option<Poly> {
        if !self.terms.iter().all(|(_, p)| p.degree() == Some(0)) {
            return None;
        }
        let mut c = vec![Rat::zero(); self.max_power() + 1];
        for (j, p) in &self.terms {
            c[*j] = p.coeff(0);
        }
        Some(Poly::new(c))
    }

    /// `sup Re λ` over the zeros of a pure difference quasipolynomial:
    /// `max −ln|ω_k| / τ` over the nonzero roots `ω_k`. `None` for other
    /// types, `−∞` when there are no zeros at all.
    pub fn chain_abscissa(&self) -> Option<f64> {
        let w = self.normalized().omega_poly()?;
        let tau = self.delay.to_f64();
        Some(
            poly_roots(&w)
                .iter()
                .map(|(z, _)| -z.norm().ln() / tau)
                .fold(f64::NEG_INFINITY, f64::max),
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let tau = self.delay.to_f64();
        self.terms
            .iter()
            .map(|(j, p)| p.eval_complex(z) * (-(*j as f64) * tau * z).exp())
            .sum()
    }

    /// `g'` exactly: `(p_j' − jτ p_j) e^{−jλτ}` termwise.
    pub fn derivative(&self) -> QuasiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(j, p)| {
                let jt = &self.delay * &Rat::from_int(*j as i64);
                (*j, &p.derivative() - &p.scale(&jt))
            })
            .collect();
        QuasiPoly::new(terms, self.delay.clone()).expect("delay already validated")
    }

    pub fn nth_derivative(&self, n: usize) -> QuasiPoly {
        (0..n).fold(self.clone(), |q, _| q.derivative())
    }

    /// Normalizer for root certification: `1 + Σ |p_j(λ)| e^{−j Re λ τ}`.
    pub fn scale(&self, z: Complex64) -> f64 {
        let tau = self.delay.to_f64();
        1.0 + self
            .terms
            .iter()
            .map(|(j, p)| p.eval_complex(z).norm() * (-(*j as f64) * z.re * tau).exp())
            .sum::<f64>()
    }

    /// True iff `|g(λ)| ≤ tol · scale(λ)`.
    pub fn certifies(&self, z: Complex64, tol: f64) -> bool {
        self.eval(z).norm() <= tol * self.scale(z)
    }

    /// The polynomial of a single-term quasipolynomial.
    pub fn single_poly(&self) -> Option<&Poly> {
        match self.terms.as_slice() {
            [(_, p)] => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for QuasiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(j, p)| match j {
                0 => format!("({p})"),
                1 => format!("({p})·e^(−λ·{})", self.delay),
                _ => format!("({p})·e^(−{j}λ·{})", self.delay),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for QuasiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `det(λE − A − e^{−λτ}B)` as a quasipolynomial.
pub fn char_quasipoly(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix, tau: &Rat) -> Result<QuasiPoly> {
    if !e.is_square() {
        return Err(DdaeError::NotSquare { rows: e.rows(), cols: e.cols() });
    }
    if [a, b].iter().any(|m| m.rows() != e.rows() || m.cols() != e.cols()) {
        return Err(DdaeError::Dimension("E, A and B differ in shape".into()));
    }
    let det = MatPoly::characteristic_bipoly(&MatPoly::pencil(e, a)?, &MatPoly::constant(b))?;
    QuasiPoly::from_bipoly(&det, tau.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_ints(rows)
    }

    #[test]
    fn high_index_example_has_linear_char_poly() {
        let e = m(&[&[1, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
        let a = m(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = m(&[&[0, 0, 0], &[0, 0, 0], &[-1, 0, 0]]);
        let q = char_quasipoly(&e, &a, &b, &Rat::one()).unwrap();
        assert_eq!(q.terms(), &[(0, Poly::from_ints(&[1, 1]))]);
    }

    #[test]
    fn lambert_example_terms() {
        let e = m(&[&[0, 1], &[0, 0]]);
        let a = RatMatrix::identity(2);
        let b = RatMatrix::from_rows(vec![
            vec![Rat::zero(), Rat::zero()],
            vec![Rat::new(-1, 2), Rat::zero()],
        ])
        .unwrap();
        let q = char_quasipoly(&e, &a, &b, &Rat::one()).unwrap();
        assert_eq!(q.terms(), &[(0, Poly::one()), (1, Poly::new(vec![Rat::zero(), Rat::new(-1, 2)]))]);
        assert_eq!(q.delay_type(), DelayType::Advanced);
    }

    #[test]
    fn scalar_identity_gives_lambda() {
        let q = char_quasipoly(&m(&[&[1]]), &m(&[&[0]]), &m(&[&[0]]), &Rat::one()).unwrap();
        assert_eq!(q.terms(), &[(0, Poly::x())]);
        assert_eq!(q.delay_type(), DelayType::Polynomial);
    }

    #[test]
    fn classification() {
        let t = Rat::one();
        let retarded = QuasiPoly::new(vec![(0, Poly::from_ints(&[2, 1])), (1, Poly::from_ints(&[-1]))], t.clone()).unwrap();
        assert_eq!(retarded.delay_type(), DelayType::Retarded);
        let neutral = QuasiPoly::new(vec![(0, Poly::from_ints(&[2, 1])), (1, Poly::from_ints(&[0, 1]))], t.clone()).unwrap();
        assert_eq!(neutral.delay_type(), DelayType::Neutral);
        let diff = QuasiPoly::new(vec![(1, Poly::from_ints(&[1])), (2, Poly::from_ints(&[2]))], t).unwrap();
        assert_eq!(diff.delay_type(), DelayType::PureDifference);
        // 1 + 2ω = 0 → |ω| = ½ → Re λ = ln 2
        assert!((diff.chain_abscissa().unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let q = QuasiPoly::new(
            vec![(0, Poly::from_ints(&[2, 1, 3])), (2, Poly::from_ints(&[-1, 4]))],
            Rat::new(1, 2),
        )
        .unwrap();
        let z = Complex64::new(0.3, -0.7);
        let h = 1e-6;
        let fd = (q.eval(z + h) - q.eval(z - h)) / (2.0 * h);
        assert!((q.derivative().eval(z) - fd).norm() < 1e-7);
    }
}
