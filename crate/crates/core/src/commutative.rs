//! Commutative triples and their block-diagonal form.
//!
//! Every split is an exact core-nilpotent (Fitting) decomposition
//! `ℚⁿ = range(Mⁿ) ⊕ ker(Mⁿ)`. Matrices commuting with `M` leave both
//! subspaces invariant, so splitting `E`, then `A` on the nilpotent part of
//! `E`, then `B` on the part where both `E` and `A` are nilpotent yields four
//! diagonal blocks for all three matrices at once.

use serde::Serialize;

use crate::error::{DdaeError, Result};
use crate::polyalg::{Rat, RatMatrix};

fn check_square_same(ms: &[&RatMatrix]) -> Result<usize> {
    let n = ms[0].rows();
    for m in ms {
        if !m.is_square() {
            return Err(DdaeError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if m.rows() != n {
            return Err(DdaeError::Dimension(format!("expected {n}x{n}, got {}x{}", m.rows(), m.cols())));
        }
    }
    Ok(n)
}

pub fn is_commutative_triple(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> Result<bool> {
    check_square_same(&[e, a, b])?;
    Ok(e.commutes_with(a) && e.commutes_with(b) && a.commutes_with(b))
}

/// `T·M·T⁻¹ = diag(J, N)` with `J` invertible and `N` nilpotent.
#[derive(Clone, Debug, PartialEq)]
pub struct FittingSplit {
    pub t: RatMatrix,
    pub t_inv: RatMatrix,
    pub j: RatMatrix,
    pub n: RatMatrix,
}

impl FittingSplit {
    pub fn core_dim(&self) -> usize {
        self.j.rows()
    }

    /// Block-diagonal restriction `(X_J, X_N)` of a matrix commuting with
    /// the split one.
    pub fn restrict(&self, x: &RatMatrix) -> (RatMatrix, RatMatrix) {
        let k = self.core_dim();
        let n = x.rows();
        let y = &(&self.t * x) * &self.t_inv;
        (y.submatrix(0..k, 0..k), y.submatrix(k..n, k..n))
    }
}

pub fn fitting_split(m: &RatMatrix) -> Result<FittingSplit> {
    let n = check_square_same(&[m])?;
    let mn = m.pow(n);
    let mut cols = mn.column_space_basis();
    let k = cols.len();
    cols.extend(mn.kernel_basis());
    let p = RatMatrix::from_columns(n, &cols);
    let t = p
        .inverse()
        .ok_or_else(|| DdaeError::Internal("range and kernel of Mⁿ are not complementary".into()))?;
    let d = &(&t * m) * &p;
    Ok(FittingSplit { j: d.submatrix(0..k, 0..k), n: d.submatrix(k..n, k..n), t, t_inv: p })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NilpotencyCertificate {
    pub index: usize,
    /// Vector with `N^{index−1}·w ≠ 0`; empty for the 0×0 matrix.
    pub witness: Vec<Rat>,
}

pub fn nilpotency_index(n: &RatMatrix) -> Result<NilpotencyCertificate> {
    let dim = check_square_same(&[n])?;
    if dim == 0 {
        return Ok(NilpotencyCertificate { index: 0, witness: Vec::new() });
    }
    let mut prev = RatMatrix::identity(dim);
    for nu in 1..=dim {
        let cur = &prev * n;
        if cur.is_zero() {
            let j = (0..dim)
                .find(|&j| prev.column(j).iter().any(|x| !x.is_zero()))
                .expect("previous power is nonzero");
            let mut w = vec![Rat::zero(); dim];
            w[j] = Rat::one();
            return Ok(NilpotencyCertificate { index: nu, witness: w });
        }
        prev = cur;
    }
    Err(DdaeError::NotNilpotent)
}

/// `(J − N)⁻¹ = Σ_{i<ν} (J⁻¹)^{i+1} Nⁱ` for commuting `J`, `N` with `N` nilpotent.
pub fn nilpotent_inverse_series(j: &RatMatrix, n: &RatMatrix) -> Result<RatMatrix> {
    let dim = check_square_same(&[j, n])?;
    if !j.commutes_with(n) {
        return Err(DdaeError::NotCommutative);
    }
    let nu = nilpotency_index(n)?.index;
    let j_inv = j.inverse().ok_or(DdaeError::Singular)?;
    let mut acc = RatMatrix::zeros(dim, dim);
    let mut term = j_inv.clone();
    for _ in 0..nu {
        acc = &acc + &term;
        term = &(&term * &j_inv) * n;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockTriple {
    pub e: RatMatrix,
    pub a: RatMatrix,
    pub b: RatMatrix,
}

impl BlockTriple {
    pub fn dim(&self) -> usize {
        self.e.rows()
    }

    fn from_split(s: &FittingSplit, e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> (Self, Self) {
        let (e1, e2) = s.restrict(e);
        let (a1, a2) = s.restrict(a);
        let (b1, b2) = s.restrict(b);
        (BlockTriple { e: e1, a: a1, b: b1 }, BlockTriple { e: e2, a: a2, b: b2 })
    }

    pub fn commutes(&self) -> bool {
        self.e.commutes_with(&self.a) && self.e.commutes_with(&self.b) && self.a.commutes_with(&self.b)
    }
}

/// Block-diagonal form of a commutative triple.
///
/// `blocks[0] = (J^E, A₁, B₁)`, `blocks[1] = (N^E₂, J^A, B₂)`,
/// `blocks[2] = (N^E₃, N^A₃, J^B)`, `blocks[3] = (N^E₄, N^A₄, N^B₄)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub t: RatMatrix,
    pub t_inv: RatMatrix,
    pub block_dims: [usize; 4],
    pub blocks: [BlockTriple; 4],
    pub zeta: usize,
    pub nu3: usize,
}

impl Decomposition {
    pub fn offsets(&self) -> [usize; 5] {
        let d = self.block_dims;
        [0, d[0], d[0] + d[1], d[0] + d[1] + d[2], d.iter().sum()]
    }

    /// `T·X·T⁻¹`.
    pub fn transform(&self, x: &RatMatrix) -> RatMatrix {
        &(&self.t * x) * &self.t_inv
    }

    /// `T⁻¹·diag(blocks)·T` for the selected matrix of each triple.
    pub fn reconstruct(&self, pick: impl Fn(&BlockTriple) -> &RatMatrix) -> RatMatrix {
        let parts: Vec<&RatMatrix> = self.blocks.iter().map(pick).collect();
        let d = RatMatrix::block_diag(&parts);
        &(&self.t_inv * &d) * &self.t
    }
}

fn embed(t: &RatMatrix, lead: usize) -> RatMatrix {
    RatMatrix::block_diag(&[&RatMatrix::identity(lead), t])
}

pub fn decompose_triple(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> Result<Decomposition> {
    if !is_commutative_triple(e, a, b)? {
        return Err(DdaeError::NotCommutative);
    }
    let n = e.rows();

    let s1 = fitting_split(e)?;
    let (blk1, rest1) = BlockTriple::from_split(&s1, e, a, b);
    let n1 = blk1.dim();

    let s2 = fitting_split(&rest1.a)?;
    let (blk2, rest2) = BlockTriple::from_split(&s2, &rest1.e, &rest1.a, &rest1.b);
    let n2 = blk2.dim();

    let s3 = fitting_split(&rest2.b)?;
    let (blk3, blk4) = BlockTriple::from_split(&s3, &rest2.e, &rest2.a, &rest2.b);

    let t = &(&embed(&s3.t, n1 + n2) * &embed(&s2.t, n1)) * &s1.t;
    let t_inv = &(&s1.t_inv * &embed(&s2.t_inv, n1)) * &embed(&s3.t_inv, n1 + n2);
    debug_assert_eq!(&t * &t_inv, RatMatrix::identity(n));

    let zeta = nilpotency_index(&blk2.e)?.index;
    let nu3 = nilpotency_index(&blk3.e)?.index;
    Ok(Decomposition {
        t,
        t_inv,
        block_dims: [n1, n2, blk3.dim(), blk4.dim()],
        blocks: [blk1, blk2, blk3, blk4],
        zeta,
        nu3,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    pub block_dims: [usize; 4],
    pub zeta: usize,
    pub nu3: usize,
    /// Eigenvalues of the invertible factor of each of the first three
    /// blocks (`J^E`, `J^A`, `J^B`) as `[re, im]` pairs.
    pub invertible_spectra: [Vec<[f64; 2]>; 3],
    pub t: Vec<Vec<Rat>>,
}

impl DecompositionSummary {
    pub fn new(dec: &Decomposition) -> Self {
        let eig = |m: &RatMatrix| -> Vec<[f64; 2]> {
            if m.rows() == 0 {
                return Vec::new();
            }
            let mut v: Vec<[f64; 2]> =
                m.to_f64().complex_eigenvalues().iter().map(|z| [z.re, z.im]).collect();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
            v
        };
        DecompositionSummary {
            block_dims: dec.block_dims,
            zeta: dec.zeta,
            nu3: dec.nu3,
            invertible_spectra: [eig(&dec.blocks[0].e), eig(&dec.blocks[1].a), eig(&dec.blocks[2].b)],
            t: dec.t.to_rows(),
        }
    }
}
