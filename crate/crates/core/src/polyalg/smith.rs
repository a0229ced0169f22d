//! Smith canonical form of matrix polynomials with transformation tracking.
//!
//! The reduction keeps `U·P·V = S` throughout: row operations act on `S`
//! and `U`, column operations on `S` and `V`. Pivots are nonzero entries of
//! minimal degree, ties broken by the lowest `(row, col)`.

use super::{MatPoly, Poly};

#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub u: MatPoly,
    pub v: MatPoly,
    pub invariant_factors: Vec<Poly>,
    pub rank: usize,
}

impl SmithForm {
    /// `diag(p_1, …, p_r)` padded with zeros to `rows × cols`.
    pub fn diagonal(&self, rows: usize, cols: usize) -> MatPoly {
        let mut d = MatPoly::zeros(rows, cols);
        for (k, p) in self.invariant_factors.iter().enumerate() {
            d.set(k, k, p.clone());
        }
        d
    }
}

struct Reduction {
    s: MatPoly,
    u: MatPoly,
    v: MatPoly,
}

impl Reduction {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, f: &Poly) {
        self.s.add_row_multiple(target, source, f);
        self.u.add_row_multiple(target, source, f);
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, f: &Poly) {
        self.s.add_col_multiple(target, source, f);
        self.v.add_col_multiple(target, source, f);
    }

    fn min_degree_entry(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, (usize, usize))> = None;
        for i in k..self.s.rows() {
            for j in k..self.s.cols() {
                if let Some(d) = self.s.get(i, j).degree() {
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, (i, j)));
                    }
                }
            }
        }
        best.map(|(_, pos)| pos)
    }

    /// Clears row and column `k` outside the pivot. Returns once both are
    /// zero; a nonzero remainder becomes the next (lower degree) pivot.
    fn clear_cross(&mut self, k: usize) {
        loop {
            let pivot = self.s.get(k, k).clone();
            for i in k + 1..self.s.rows() {
                if self.s.get(i, k).is_zero() {
                    continue;
                }
                let (q, _) = self.s.get(i, k).divmod(&pivot).expect("nonzero pivot");
                self.add_row_multiple(i, k, &-&q);
            }
            for j in k + 1..self.s.cols() {
                if self.s.get(k, j).is_zero() {
                    continue;
                }
                let (q, _) = self.s.get(k, j).divmod(&pivot).expect("nonzero pivot");
                self.add_col_multiple(j, k, &-&q);
            }
            let mut best: Option<(usize, bool, usize)> = None;
            for i in k + 1..self.s.rows() {
                if let Some(d) = self.s.get(i, k).degree() {
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, true, i));
                    }
                }
            }
            for j in k + 1..self.s.cols() {
                if let Some(d) = self.s.get(k, j).degree() {
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, false, j));
                    }
                }
            }
            match best {
                None => return,
                Some((_, true, i)) => self.swap_rows(k, i),
                Some((_, false, j)) => self.swap_cols(k, j),
            }
        }
    }

    fn first_non_divisible(&self, k: usize) -> Option<usize> {
        let pivot = self.s.get(k, k);
        for i in k + 1..self.s.rows() {
            for j in k + 1..self.s.cols() {
                if !pivot.divides(self.s.get(i, j)) {
                    return Some(i);
                }
            }
        }
        None
    }
}

pub fn smith_form(p: &MatPoly) -> SmithForm {
    let (rows, cols) = (p.rows(), p.cols());
    let mut red = Reduction { s: p.clone(), u: MatPoly::identity(rows), v: MatPoly::identity(cols) };
    let mut k = 0;
    while k < rows.min(cols) {
        let Some((pi, pj)) = red.min_degree_entry(k) else {
            break;
        };
        red.swap_rows(k, pi);
        red.swap_cols(k, pj);
        loop {
            red.clear_cross(k);
            match red.first_non_divisible(k) {
                // row k picks up row i; the cross is no longer clear
                Some(i) => red.add_row_multiple(k, i, &Poly::one()),
                None => break,
            }
        }
        let lc = red.s.get(k, k).leading().cloned().expect("nonzero pivot");
        let inv = lc.recip().expect("nonzero leading coefficient");
        red.s.scale_row(k, &inv);
        red.u.scale_row(k, &inv);
        k += 1;
    }
    let invariant_factors = (0..k).map(|i| red.s.get(i, i).clone()).collect();
    SmithForm { u: red.u, v: red.v, invariant_factors, rank: k }
}
