//! Strangeness-free test: after a row compression `S·E = [E₁; 0]`, the
//! system splits into a differential part and an algebraic part, and it is
//! strangeness-free when `[E₁; A₂]` is nonsingular.

use serde::Serialize;

use crate::error::{DdaeError, Result};
use crate::polyalg::{Rat, RatMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrangenessFreeForm {
    /// Rank of `E`.
    pub rank: usize,
    pub s: RatMatrix,
    pub e1: RatMatrix,
    pub a1: RatMatrix,
    pub b1: RatMatrix,
    pub a2: RatMatrix,
    pub b2: RatMatrix,
    /// `det [E₁; A₂]`.
    pub det: Rat,
}

impl StrangenessFreeForm {
    pub fn is_strangeness_free(&self) -> bool {
        !self.det.is_zero()
    }

    /// `[E₁; A₂]`.
    pub fn m(&self) -> RatMatrix {
        self.e1.vstack(&self.a2).expect("same column count")
    }
}

/// The form iff `[E₁; A₂]` is nonsingular in the given coordinates.
pub fn strangeness_free_check(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> Result<Option<StrangenessFreeForm>> {
    let f = row_compression(e, a, b)?;
    Ok(f.is_strangeness_free().then_some(f))
}

/// Row compression of the triple. The returned form records the witness
/// determinant whether or not it vanishes.
pub fn row_compression(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> Result<StrangenessFreeForm> {
    if !e.is_square() {
        return Err(DdaeError::NotSquare { rows: e.rows(), cols: e.cols() });
    }
    if [a, b].iter().any(|m| m.rows() != e.rows() || m.cols() != e.cols()) {
        return Err(DdaeError::Dimension("E, A and B differ in shape".into()));
    }
    let n = e.rows();
    let aug = RatMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            e.get(i, j).clone()
        } else if j - n == i {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    let (r, pivots) = aug.rref();
    let rank = pivots.iter().filter(|&&c| c < n).count();
    let s = r.submatrix(0..n, n..2 * n);
    let se = &s * e;
    let sa = &s * a;
    let sb = &s * b;
    let e1 = se.submatrix(0..rank, 0..n);
    let a2 = sa.submatrix(rank..n, 0..n);
    let det = e1.vstack(&a2)?.det()?;
    Ok(StrangenessFreeForm {
        rank,
        e1,
        a1: sa.submatrix(0..rank, 0..n),
        b1: sb.submatrix(0..rank, 0..n),
        a2,
        b2: sb.submatrix(rank..n, 0..n),
        s,
        det,
    })
}
