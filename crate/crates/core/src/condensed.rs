//! Behavior form `P(d/dt) x(t) = Q(d/dt) x(t − τ) + f(t)` and its condensed
//! (staircase) form under unimodular equivalence.
//!
//! The reduction alternates two Smith steps on an active leading block of
//! the pair. Step 1 diagonalizes the active part of `P`. If the rows of `Q`
//! below the rank of `P` vanish on the active columns the procedure stops;
//! otherwise step 2 diagonalizes those rows of `Q`, moves the diagonal block
//! `Σ_i` to the right end of the active columns and shrinks the active block
//! to the leading rows and the columns left of `Σ_i`.
//!
//! Finally the rows are ordered as
//! `[Σ_P][Σ_q]…[Σ_1][stop rows][waste_q]…[waste_1]` and the columns as
//! `[y_1][free][Σ_q]…[Σ_1]`.

use std::ops::Range;

use serde::Serialize;

use crate::error::{DdaeError, Result};
use crate::polyalg::{smith_form, MatPoly, Poly, Rat, RatMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct BehaviorPair {
    pub p: MatPoly,
    pub q: MatPoly,
    pub delay: Rat,
}

impl BehaviorPair {
    pub fn new(p: MatPoly, q: MatPoly, delay: Rat) -> Result<Self> {
        if (p.rows(), p.cols()) != (q.rows(), q.cols()) {
            return Err(DdaeError::Dimension(format!(
                "P is {}x{} but Q is {}x{}",
                p.rows(),
                p.cols(),
                q.rows(),
                q.cols()
            )));
        }
        if !delay.is_positive() {
            return Err(DdaeError::NonPositiveDelay);
        }
        Ok(BehaviorPair { p, q, delay })
    }

    /// `P = λE − A`, `Q = B`.
    pub fn first_order(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix, delay: Rat) -> Result<Self> {
        behavior_pair(&[e, &-a], &[b], delay)
    }

    pub fn rows(&self) -> usize {
        self.p.rows()
    }

    pub fn cols(&self) -> usize {
        self.p.cols()
    }
}

/// Builds the pair from coefficient lists in descending order of
/// derivative: `lhs = [A_k, …, A_0]`, `rhs = [B_κ, …, B_0]`.
pub fn behavior_pair(lhs: &[&RatMatrix], rhs: &[&RatMatrix], delay: Rat) -> Result<BehaviorPair> {
    let ascending = |ms: &[&RatMatrix]| -> Result<MatPoly> {
        let rev: Vec<&RatMatrix> = ms.iter().rev().copied().collect();
        MatPoly::from_coefficients(&rev)
    };
    let p = ascending(lhs)?;
    let q = ascending(rhs)?;
    BehaviorPair::new(p, q, delay)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CondensedForm {
    pub u: MatPoly,
    pub v: MatPoly,
    /// `U·P·V`
    pub p: MatPoly,
    /// `U·Q·V`
    pub q: MatPoly,
    pub sigma_p: Vec<Poly>,
    /// Diagonals of `Σ_q, …, Σ_1` in final row order.
    pub sigma_blocks: Vec<Vec<Poly>>,
    /// `a_q, …, a_1`.
    pub block_row_sizes: Vec<usize>,
    /// Zero rows left by each pass, final row order: the rows left at the
    /// stopping pass first, then `v_q, …, v_1`.
    pub waste_row_sizes: Vec<usize>,
    pub free_cols: usize,
    /// Number of step-1 passes performed.
    pub iterations: usize,
    /// Highest power of `λ` in `V`: how many derivatives of the initial
    /// function the change of variables consumes.
    pub required_smoothness: usize,
    /// Active columns at each step-2 pass, in the order `Σ_q, …, Σ_1`.
    active_cols: Vec<usize>,
}

impl CondensedForm {
    pub fn rank_p(&self) -> usize {
        self.sigma_p.len()
    }

    pub fn sigma_rows(&self) -> Range<usize> {
        let r = self.rank_p();
        r..r + self.block_row_sizes.iter().sum::<usize>()
    }

    pub fn waste_rows(&self) -> Range<usize> {
        self.sigma_rows().end..self.p.rows()
    }

    pub fn y1_cols(&self) -> Range<usize> {
        0..self.rank_p()
    }

    pub fn free_col_range(&self) -> Range<usize> {
        self.rank_p()..self.rank_p() + self.free_cols
    }

    pub fn sigma_cols(&self) -> Range<usize> {
        self.free_col_range().end..self.p.cols()
    }

    /// `(rows, cols)` of the `P_23` view.
    pub fn p23(&self) -> (Range<usize>, Range<usize>) {
        (self.sigma_rows(), self.sigma_cols())
    }

    pub fn p33(&self) -> (Range<usize>, Range<usize>) {
        (self.waste_rows(), self.sigma_cols())
    }

    pub fn q23(&self) -> (Range<usize>, Range<usize>) {
        self.p23()
    }

    pub fn q33(&self) -> (Range<usize>, Range<usize>) {
        self.p33()
    }

    pub fn view(m: &MatPoly, (rows, cols): (Range<usize>, Range<usize>)) -> MatPoly {
        m.submatrix(rows, cols)
    }

    /// Checks the staircase shape of the stored pair block by block.
    /// Returns a description of the first violation.
    pub fn check_shape(&self) -> std::result::Result<(), String> {
        let r = self.rank_p();
        let c_final = r + self.free_cols;
        let zero_on = |m: &MatPoly, rows: Range<usize>, cols: Range<usize>, what: &str| {
            for i in rows.clone() {
                for j in cols.clone() {
                    if !m.get(i, j).is_zero() {
                        return Err(format!("{what}: nonzero entry at ({i}, {j})"));
                    }
                }
            }
            Ok(())
        };
        // leading block row: [Σ_P 0 *]
        for i in 0..r {
            for j in 0..c_final {
                let e = self.p.get(i, j);
                let ok = if i == j { *e == self.sigma_p[i] && e.is_monic() } else { e.is_zero() };
                if !ok {
                    return Err(format!("Σ_P block broken at ({i}, {j})"));
                }
            }
        }
        let mut row = r;
        for (k, sigma) in self.sigma_blocks.iter().enumerate() {
            let a = sigma.len();
            let c_i = self.active_cols[k];
            zero_on(&self.p, row..row + a, 0..c_i, "P on Σ rows")?;
            zero_on(&self.q, row..row + a, 0..c_i - a, "Q left of Σ")?;
            for (d, s) in sigma.iter().enumerate() {
                if !s.is_monic() {
                    return Err(format!("Σ entry {s} is not monic"));
                }
                for j in 0..a {
                    let e = self.q.get(row + d, c_i - a + j);
                    let ok = if d == j { e == s } else { e.is_zero() };
                    if !ok {
                        return Err(format!("Σ block {k} broken at ({}, {})", row + d, c_i - a + j));
                    }
                }
            }
            row += a;
        }
        let mut waste_row = row;
        for (k, &w) in self.waste_row_sizes.iter().enumerate() {
            // stop rows are zero on the final active block, v_i on the block of pass i
            let cols = if k == 0 { c_final } else { self.active_cols[k - 1] };
            zero_on(&self.p, waste_row..waste_row + w, 0..cols, "P on waste rows")?;
            zero_on(&self.q, waste_row..waste_row + w, 0..cols, "Q on waste rows")?;
            waste_row += w;
        }
        if waste_row != self.p.rows() {
            return Err("row blocks do not cover all rows".into());
        }
        Ok(())
    }
}

/// Applies `block` to rows `offset..` of `m` from the left and returns the product.
fn left(block: &MatPoly, m: &MatPoly, offset: usize) -> MatPoly {
    m.left_apply_block(block, offset)
}

fn right(m: &MatPoly, block: &MatPoly, offset: usize) -> MatPoly {
    m.right_apply_block(block, offset)
}

/// Permutation matrix `Π` with `(Π·M)` row `i` equal to row `order[i]` of `M`.
fn row_permutation(order: &[usize]) -> MatPoly {
    let n = order.len();
    let mut m = MatPoly::zeros(n, n);
    for (i, &src) in order.iter().enumerate() {
        m.set(i, src, Poly::one());
    }
    m
}

pub fn condense(pair: &BehaviorPair) -> CondensedForm {
    let (rows, cols) = (pair.rows(), pair.cols());
    let mut p = pair.p.clone();
    let mut q = pair.q.clone();
    let mut u = MatPoly::identity(rows);
    let mut v = MatPoly::identity(cols);

    let (mut r_act, mut c_act) = (rows, cols);
    // per pass i: (rank, a_i, waste_i, active cols before shrinking)
    let mut passes: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut iterations = 0;
    let rank = loop {
        let sf = smith_form(&p.submatrix(0..r_act, 0..c_act));
        if r_act > 0 && c_act > 0 {
            iterations += 1;
        }
        p = right(&left(&sf.u, &p, 0), &sf.v, 0);
        q = right(&left(&sf.u, &q, 0), &sf.v, 0);
        u = left(&sf.u, &u, 0);
        v = right(&v, &sf.v, 0);
        let r = sf.rank;

        let rest = q.submatrix(r..r_act, 0..c_act);
        if rest.is_zero() {
            break r;
        }
        let sq = smith_form(&rest);
        let a = sq.rank;
        // Σ to the last a active columns
        let mut order: Vec<usize> = (a..c_act).collect();
        order.extend(0..a);
        let v2 = sq.v.mul(&row_permutation(&order).transpose()).expect("square factors");
        p = right(&left(&sq.u, &p, r), &v2, 0);
        q = right(&left(&sq.u, &q, r), &v2, 0);
        u = left(&sq.u, &u, r);
        v = right(&v, &v2, 0);

        passes.push((r, a, r_act - r - a, c_act));
        r_act = r;
        c_act -= a;
    };

    // rows: [Σ_P][Σ_q..Σ_1][stop rows][v_q..v_1]
    let mut order: Vec<usize> = (0..rank).collect();
    for &(r, a, _, _) in passes.iter().rev() {
        order.extend(r..r + a);
    }
    order.extend(rank..r_act);
    for &(r, a, w, _) in passes.iter().rev() {
        order.extend(r + a..r + a + w);
    }
    let perm = row_permutation(&order);
    p = perm.mul(&p).expect("square permutation");
    q = perm.mul(&q).expect("square permutation");
    u = perm.mul(&u).expect("square permutation");

    let sigma_p = (0..rank).map(|i| p.get(i, i).clone()).collect();
    let mut sigma_blocks = Vec::new();
    let mut row = rank;
    for &(_, a, _, c) in passes.iter().rev() {
        sigma_blocks.push((0..a).map(|d| q.get(row + d, c - a + d).clone()).collect());
        row += a;
    }
    let mut waste_row_sizes = vec![r_act - rank];
    waste_row_sizes.extend(passes.iter().rev().map(|&(_, _, w, _)| w));
    let required_smoothness = v.max_degree().unwrap_or(0);

    CondensedForm {
        u,
        v,
        p,
        q,
        sigma_p,
        sigma_blocks,
        block_row_sizes: passes.iter().rev().map(|&(_, a, _, _)| a).collect(),
        waste_row_sizes,
        free_cols: c_act - rank,
        iterations,
        required_smoothness,
        active_cols: passes.iter().rev().map(|&(_, _, _, c)| c).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvabilityKind {
    Unique,
    Underdetermined,
    Constrained,
    UnderdeterminedAndConstrained,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolvabilityVerdict {
    pub kind: SolvabilityKind,
    pub free_variable_count: usize,
    pub consistency_row_count: usize,
    pub regular: bool,
}

/// Reads the verdict off the block sizes. For square pairs the result is
/// cross-checked against `det(P − ωQ) ≢ 0`; a disagreement is an internal
/// error.
pub fn classify_solvability(pair: &BehaviorPair, cf: &CondensedForm) -> Result<SolvabilityVerdict> {
    let free = cf.free_cols;
    let consistency: usize = cf.waste_row_sizes.iter().sum();
    let kind = match (free > 0, consistency > 0) {
        (false, false) => SolvabilityKind::Unique,
        (true, false) => SolvabilityKind::Underdetermined,
        (false, true) => SolvabilityKind::Constrained,
        (true, true) => SolvabilityKind::UnderdeterminedAndConstrained,
    };
    let regular = kind == SolvabilityKind::Unique;
    if pair.p.is_square() {
        let det = MatPoly::characteristic_bipoly(&pair.p, &pair.q)?;
        if det.is_zero() == regular {
            return Err(DdaeError::Internal(format!(
                "condensed form says regular = {regular} but det(P − ωQ) = {det}"
            )));
        }
    }
    Ok(SolvabilityVerdict { kind, free_variable_count: free, consistency_row_count: consistency, regular })
}

/// Convenience: condense and classify in one call.
pub fn solvability(pair: &BehaviorPair) -> Result<(CondensedForm, SolvabilityVerdict)> {
    let cf = condense(pair);
    let verdict = classify_solvability(pair, &cf)?;
    Ok((cf, verdict))
}

/// `det(λE − A − ωB) ≢ 0`. Non-square triples are never regular; the
/// diagnostic explains why.
pub fn regularity(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> (bool, Option<String>) {
    if !e.is_square() {
        return (false, Some(format!("{}x{} system is not square", e.rows(), e.cols())));
    }
    let shapes_match = [a, b].iter().all(|m| m.rows() == e.rows() && m.cols() == e.cols());
    if !shapes_match {
        return (false, Some("coefficient matrices differ in shape".into()));
    }
    let pencil = MatPoly::pencil(e, a).expect("shapes checked");
    let det = MatPoly::characteristic_bipoly(&pencil, &MatPoly::constant(b)).expect("square");
    if det.is_zero() {
        (false, Some("det(λE − A − ωB) vanishes identically".into()))
    } else {
        (true, None)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CondensedSummary {
    pub iterations: usize,
    pub sigma_p: Vec<String>,
    pub sigma_blocks: Vec<Vec<String>>,
    pub block_row_sizes: Vec<usize>,
    pub waste_row_sizes: Vec<usize>,
    pub free_cols: usize,
    pub required_smoothness: usize,
    pub verdict: SolvabilityVerdict,
}

impl CondensedSummary {
    pub fn new(cf: &CondensedForm, verdict: &SolvabilityVerdict) -> Self {
        let strs = |ps: &[Poly]| ps.iter().map(Poly::to_string).collect();
        CondensedSummary {
            iterations: cf.iterations,
            sigma_p: strs(&cf.sigma_p),
            sigma_blocks: cf.sigma_blocks.iter().map(|b| strs(b)).collect(),
            block_row_sizes: cf.block_row_sizes.clone(),
            waste_row_sizes: cf.waste_row_sizes.clone(),
            free_cols: cf.free_cols,
            required_smoothness: cf.required_smoothness,
            verdict: verdict.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[[i64; 3]]) -> RatMatrix {
        RatMatrix::from_ints(rows)
    }

    fn example_21() -> BehaviorPair {
        let e = ints(&[[0, 0, 1], [0, 0, 0], [0, 0, 0]]);
        let a = ints(&[[0, 1, 0], [0, 0, 1], [0, -1, 0]]);
        let b = ints(&[[0, 0, 0], [1, 0, 0], [0, 0, 0]]);
        BehaviorPair::first_order(&e, &a, &b, Rat::one()).unwrap()
    }

    fn example_22() -> (RatMatrix, RatMatrix, RatMatrix) {
        let e = ints(&[[0, 0, 0], [0, 1, 0], [0, 0, 0]]);
        let a = ints(&[[0, 1, 0], [0, 0, 1], [0, 0, 0]]);
        let b = ints(&[[0, -1, 0], [0, 0, 0], [0, 0, 1]]);
        (e, a, b)
    }

    fn check_transform(pair: &BehaviorPair, cf: &CondensedForm) {
        assert_eq!(cf.u.mul(&pair.p).unwrap().mul(&cf.v).unwrap(), cf.p);
        assert_eq!(cf.u.mul(&pair.q).unwrap().mul(&cf.v).unwrap(), cf.q);
        assert!(cf.u.is_unimodular().unwrap());
        assert!(cf.v.is_unimodular().unwrap());
        cf.check_shape().unwrap();
    }

    #[test]
    fn first_walkthrough_pair() {
        let pair = example_21();
        let lam = Poly::x();
        let m1 = Poly::from_ints(&[-1]);
        let expected_p = MatPoly::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) | (1, 2) => m1.clone(),
            (0, 2) => lam.clone(),
            (2, 1) => Poly::one(),
            _ => Poly::zero(),
        });
        assert_eq!(pair.p, expected_p);
        let cf = condense(&pair);
        check_transform(&pair, &cf);
        assert_eq!(cf.iterations, 2);
        assert_eq!(cf.sigma_p, vec![Poly::one(), Poly::one()]);
        let v = classify_solvability(&pair, &cf).unwrap();
        assert_eq!(v.kind, SolvabilityKind::Unique);
        // the constraint row carries d/dt on the delayed variable
        assert_eq!(cf.sigma_blocks, vec![vec![Poly::x()]]);
    }

    #[test]
    fn second_walkthrough_pair() {
        let (e, a, b) = example_22();
        let pair = BehaviorPair::first_order(&e, &a, &b, Rat::one()).unwrap();
        let cf = condense(&pair);
        check_transform(&pair, &cf);
        let v = classify_solvability(&pair, &cf).unwrap();
        assert_eq!(v.kind, SolvabilityKind::UnderdeterminedAndConstrained);
        assert_eq!((v.free_variable_count, v.consistency_row_count), (1, 1));
        assert!(!regularity(&e, &a, &b).0);
    }

    #[test]
    fn zero_q_reduces_to_smith() {
        let e = RatMatrix::identity(2);
        let a = RatMatrix::from_ints(&[[1, 2], [3, 4]]);
        let pair = BehaviorPair::first_order(&e, &a, &RatMatrix::zeros(2, 2), Rat::one()).unwrap();
        let cf = condense(&pair);
        check_transform(&pair, &cf);
        assert!(cf.sigma_blocks.is_empty());
        assert_eq!(cf.iterations, 1);
    }

    #[test]
    fn empty_dynamics_scalar() {
        let z = RatMatrix::zeros(1, 1);
        let pair = BehaviorPair::first_order(&z, &z, &z, Rat::one()).unwrap();
        let cf = condense(&pair);
        check_transform(&pair, &cf);
        let v = classify_solvability(&pair, &cf).unwrap();
        assert_eq!(v.kind, SolvabilityKind::UnderdeterminedAndConstrained);
        assert_eq!((v.free_variable_count, v.consistency_row_count), (1, 1));
    }

    #[test]
    fn rectangular_pairs_are_supported() {
        let e = RatMatrix::from_ints(&[[1, 0, 0], [0, 1, 0]]);
        let a = RatMatrix::from_ints(&[[0, 1, 0], [0, 0, 1]]);
        let b = RatMatrix::zeros(2, 3);
        let pair = BehaviorPair::first_order(&e, &a, &b, Rat::one()).unwrap();
        let cf = condense(&pair);
        check_transform(&pair, &cf);
        let v = classify_solvability(&pair, &cf).unwrap();
        assert_eq!(v.kind, SolvabilityKind::Underdetermined);
        assert!(!regularity(&e, &a, &b).0);
    }

    #[test]
    fn degenerate_order_gives_constant_pair() {
        let a0 = RatMatrix::from_ints(&[[1, 2], [0, 1]]);
        let b0 = RatMatrix::from_ints(&[[0, 1], [1, 0]]);
        let pair = behavior_pair(&[&a0], &[&b0], Rat::one()).unwrap();
        assert_eq!(pair.p, MatPoly::constant(&a0));
        assert_eq!(pair.q, MatPoly::constant(&b0));
    }

    #[test]
    fn rejects_mismatched_shapes_and_bad_delay() {
        let a = RatMatrix::zeros(2, 2);
        let b = RatMatrix::zeros(2, 3);
        assert!(behavior_pair(&[&a], &[&b], Rat::one()).is_err());
        assert!(behavior_pair(&[&a], &[&a], Rat::zero()).is_err());
    }

    #[test]
    fn regularity_examples() {
        let i = RatMatrix::identity(2);
        let a = RatMatrix::from_ints(&[[1, 5], [-2, 0]]);
        assert!(regularity(&i, &a, &a).0);
        let (ok, why) = regularity(&RatMatrix::zeros(2, 3), &RatMatrix::zeros(2, 3), &RatMatrix::zeros(2, 3));
        assert!(!ok && why.is_some());
    }
}
