//! Matrices with polynomial entries and fraction-free determinants.

use std::fmt;
use std::ops::Range;

use super::{BiPoly, Poly, Rat, RatMatrix, Ring};
use crate::error::{DdaeError, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl MatPoly {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatPoly { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatPoly::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatPoly { rows, cols, entries }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(DdaeError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(MatPoly { rows, cols, entries })
    }

    pub fn constant(m: &RatMatrix) -> Self {
        MatPoly::from_fn(m.rows(), m.cols(), |i, j| Poly::constant(m.get(i, j).clone()))
    }

    /// `Σ_k coeffs[k] λ^k` for equally sized rational matrices (ascending powers).
    pub fn from_coefficients(coeffs: &[&RatMatrix]) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(DdaeError::Dimension("no coefficient matrices".into()));
        };
        let (r, c) = (first.rows(), first.cols());
        if coeffs.iter().any(|m| m.rows() != r || m.cols() != c) {
            return Err(DdaeError::Dimension("coefficient matrices differ in shape".into()));
        }
        Ok(MatPoly::from_fn(r, c, |i, j| {
            Poly::new(coeffs.iter().map(|m| m.get(i, j).clone()).collect())
        }))
    }

    /// The pencil `λE − A`.
    pub fn pencil(e: &RatMatrix, a: &RatMatrix) -> Result<Self> {
        MatPoly::from_coefficients(&[&(-a), e])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(Poly::degree).max()
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        MatPoly::from_fn(rows.len(), cols.len(), |i, j| self.get(rows.start + i, cols.start + j).clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        MatPoly::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn transpose(&self) -> Self {
        MatPoly::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &MatPoly) -> Result<MatPoly> {
        if self.cols != rhs.rows {
            return Err(DdaeError::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(MatPoly::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Poly::zero(), |acc, k| &acc + &(self.get(i, k) * rhs.get(k, j)))
        }))
    }

    pub fn add(&self, rhs: &MatPoly) -> Result<MatPoly> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &MatPoly) -> Result<MatPoly> {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &MatPoly, f: impl Fn(&Poly, &Poly) -> Poly) -> Result<MatPoly> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(DdaeError::Dimension("matrix polynomial shapes differ".into()));
        }
        Ok(MatPoly {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn eval(&self, x: &Rat) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(x))
    }

    pub fn det(&self) -> Result<Poly> {
        if !self.is_square() {
            return Err(DdaeError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(bareiss_det(self.rows, self.entries.clone()))
    }

    /// True iff the determinant is a nonzero constant.
    pub fn is_unimodular(&self) -> Result<bool> {
        let d = self.det()?;
        Ok(d.degree() == Some(0))
    }

    /// `P − ωQ` as a matrix of bivariate polynomials (row-major).
    pub fn omega_pencil(p: &MatPoly, q: &MatPoly) -> Result<Vec<BiPoly>> {
        if (p.rows, p.cols) != (q.rows, q.cols) {
            return Err(DdaeError::Dimension("P and Q differ in shape".into()));
        }
        let omega = BiPoly::term(Rat::one(), 0, 1);
        Ok(p.entries
            .iter()
            .zip(&q.entries)
            .map(|(a, b)| BiPoly::from_lambda_poly(a).sub(&omega.mul(&BiPoly::from_lambda_poly(b))))
            .collect())
    }

    /// `det(P(λ) − ω Q(λ))` for square pairs.
    pub fn characteristic_bipoly(p: &MatPoly, q: &MatPoly) -> Result<BiPoly> {
        if !p.is_square() {
            return Err(DdaeError::NotSquare { rows: p.rows, cols: p.cols });
        }
        Ok(bareiss_det(p.rows, MatPoly::omega_pencil(p, q)?))
    }

    // elementary operations used by the Smith reduction

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[source]
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Poly) {
        for j in 0..self.cols {
            let s = self.get(source, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, j) + &(factor * s);
            self.set(target, j, v);
        }
    }

    /// col[target] += factor * col[source]
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, factor: &Poly) {
        for i in 0..self.rows {
            let s = self.get(i, source);
            if s.is_zero() {
                continue;
            }
            let v = self.get(i, target) + &(s * factor);
            self.set(i, target, v);
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, c: &Rat) {
        for j in 0..self.cols {
            let v = self.get(i, j).scale(c);
            self.set(i, j, v);
        }
    }

    /// Applies `block` (k×k) from the left to rows `offset..offset+k`.
    pub(crate) fn left_apply_block(&self, block: &MatPoly, offset: usize) -> MatPoly {
        let k = block.rows;
        let mut out = self.clone();
        for i in 0..k {
            for j in 0..self.cols {
                let v = (0..k).fold(Poly::zero(), |acc, m| {
                    &acc + &(block.get(i, m) * self.get(offset + m, j))
                });
                out.set(offset + i, j, v);
            }
        }
        out
    }

    /// Applies `block` (k×k) from the right to columns `offset..offset+k`.
    pub(crate) fn right_apply_block(&self, block: &MatPoly, offset: usize) -> MatPoly {
        let k = block.rows;
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..k {
                let v = (0..k).fold(Poly::zero(), |acc, m| {
                    &acc + &(self.get(i, offset + m) * block.get(m, j))
                });
                out.set(i, offset + j, v);
            }
        }
        out
    }
}

impl fmt::Debug for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Fraction-free Gaussian elimination (Bareiss) over an integral domain
/// with exact division. Row swaps flip the sign.
pub fn bareiss_det<T: Ring>(n: usize, mut m: Vec<T>) -> T {
    assert_eq!(m.len(), n * n);
    if n == 0 {
        return T::one();
    }
    let mut sign_negative = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                return T::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            sign_negative = !sign_negative;
        }
        let pivot = m[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let num = pivot.mul(&m[i * n + j]).sub(&m[i * n + k].mul(&m[k * n + j]));
                m[i * n + j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i * n + k] = T::zero();
        }
        prev = pivot;
    }
    let d = m[n * n - 1].clone();
    if sign_negative {
        d.neg()
    } else {
        d
    }
}

/// Plain Laplace expansion along the first row. Exponential cost; used as
/// an independent reference for small matrices.
pub fn cofactor_det<T: Ring>(n: usize, m: &[T]) -> T {
    if n == 0 {
        return T::one();
    }
    if n == 1 {
        return m[0].clone();
    }
    let mut acc = T::zero();
    for c in 0..n {
        if m[c].is_zero() {
            continue;
        }
        let minor: Vec<T> = (1..n)
            .flat_map(|i| (0..n).filter(move |&j| j != c).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].clone())
            .collect();
        let term = m[c].mul(&cofactor_det(n - 1, &minor));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}
