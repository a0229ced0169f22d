//! Vector-valued piecewise polynomial functions with exact rational
//! coefficients. Pieces are polynomials in absolute time `t`.

use serde::{Deserialize, Serialize};

use crate::error::{DdaeError, Result};
use crate::polyalg::{Poly, Rat, RatMatrix};
use crate::spectral::real_roots_in;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePolyFn {
    breakpoints: Vec<Rat>,
    pieces: Vec<Vec<Poly>>,
}

impl PiecewisePolyFn {
    pub fn new(breakpoints: Vec<Rat>, pieces: Vec<Vec<Poly>>) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(DdaeError::Dimension(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DdaeError::InvalidArgument("breakpoints must be strictly increasing".into()));
        }
        let dim = pieces[0].len();
        if pieces.iter().any(|p| p.len() != dim) {
            return Err(DdaeError::Dimension("pieces differ in dimension".into()));
        }
        Ok(PiecewisePolyFn { breakpoints, pieces })
    }

    pub fn single(start: Rat, end: Rat, polys: Vec<Poly>) -> Result<Self> {
        PiecewisePolyFn::new(vec![start, end], vec![polys])
    }

    pub fn constant(start: Rat, end: Rat, values: &[Rat]) -> Result<Self> {
        PiecewisePolyFn::single(start, end, values.iter().cloned().map(Poly::constant).collect())
    }

    pub fn zero(start: Rat, end: Rat, dim: usize) -> Result<Self> {
        PiecewisePolyFn::single(start, end, vec![Poly::zero(); dim])
    }

    /// Joins consecutive `(start, end, polys)` pieces; each must start where
    /// the previous ended.
    pub fn from_pieces(pieces: Vec<(Rat, Rat, Vec<Poly>)>) -> Result<Self> {
        let mut iter = pieces.into_iter();
        let Some((s, e, p)) = iter.next() else {
            return Err(DdaeError::InvalidArgument("no pieces".into()));
        };
        let mut bps = vec![s, e];
        let mut ps = vec![p];
        for (s, e, p) in iter {
            if &s != bps.last().expect("nonempty") {
                return Err(DdaeError::InvalidArgument(format!(
                    "piece starting at {s} does not continue the previous one ending at {}",
                    bps.last().expect("nonempty")
                )));
            }
            bps.push(e);
            ps.push(p);
        }
        PiecewisePolyFn::new(bps, ps)
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].len()
    }

    pub fn start(&self) -> &Rat {
        &self.breakpoints[0]
    }

    pub fn end(&self) -> &Rat {
        self.breakpoints.last().expect("at least two breakpoints")
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Poly>] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().flatten().all(Poly::is_zero)
    }

    /// Highest polynomial degree over all pieces and components.
    pub fn max_degree(&self) -> usize {
        self.pieces.iter().flatten().filter_map(Poly::degree).max().unwrap_or(0)
    }

    pub fn covers(&self, lo: &Rat, hi: &Rat) -> bool {
        self.start() <= lo && hi <= self.end()
    }

    fn index_f64(&self, t: f64) -> Result<usize> {
        let lo = self.start().to_f64();
        let hi = self.end().to_f64();
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(DdaeError::OutOfDomain { t, lo, hi });
        }
        // right-continuous inside, left piece at the right end
        let k = self.breakpoints[1..self.breakpoints.len() - 1]
            .iter()
            .take_while(|b| b.to_f64() <= t)
            .count();
        Ok(k)
    }

    fn index_rat(&self, t: &Rat) -> Result<usize> {
        if t < self.start() || t > self.end() {
            return Err(DdaeError::OutOfDomain { t: t.to_f64(), lo: self.start().to_f64(), hi: self.end().to_f64() });
        }
        Ok(self.breakpoints[1..self.breakpoints.len() - 1].iter().take_while(|b| *b <= t).count())
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let k = self.index_f64(t)?;
        Ok(self.pieces[k].iter().map(|p| p.eval_f64(t)).collect())
    }

    /// Value from the piece to the left of `t` (differs from [`eval`](Self::eval)
    /// only at interior breakpoints).
    pub fn eval_left(&self, t: f64) -> Result<Vec<f64>> {
        let mut k = self.index_f64(t)?;
        if k > 0 && self.breakpoints[k].to_f64() == t {
            k -= 1;
        }
        Ok(self.pieces[k].iter().map(|p| p.eval_f64(t)).collect())
    }

    pub fn eval_rat(&self, t: &Rat) -> Result<Vec<Rat>> {
        let k = self.index_rat(t)?;
        Ok(self.pieces[k].iter().map(|p| p.eval(t)).collect())
    }

    pub fn eval_derivative(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        let k = self.index_f64(t)?;
        Ok(self.pieces[k].iter().map(|p| p.nth_derivative(order).eval_f64(t)).collect())
    }

    pub fn map_polys(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        PiecewisePolyFn {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|v| v.iter().map(&f).collect()).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        self.map_polys(Poly::derivative)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        self.map_polys(|p| p.nth_derivative(n))
    }

    /// `g(t) = self(t + s)` on the shifted domain.
    pub fn shift(&self, s: &Rat) -> Self {
        PiecewisePolyFn {
            breakpoints: self.breakpoints.iter().map(|b| b - s).collect(),
            pieces: self.pieces.iter().map(|v| v.iter().map(|p| p.shift(s)).collect()).collect(),
        }
    }

    /// `M·v(t)` for a rational matrix with `dim` columns.
    pub fn map_linear(&self, m: &RatMatrix) -> Result<Self> {
        if m.cols() != self.dim() {
            return Err(DdaeError::Dimension(format!(
                "{}x{} matrix applied to a {}-vector function",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|v| {
                (0..m.rows())
                    .map(|i| {
                        v.iter()
                            .enumerate()
                            .filter(|(j, _)| !m.get(i, *j).is_zero())
                            .fold(Poly::zero(), |acc, (j, p)| &acc + &p.scale(m.get(i, j)))
                    })
                    .collect()
            })
            .collect();
        Ok(PiecewisePolyFn { breakpoints: self.breakpoints.clone(), pieces })
    }

    pub fn components(&self, range: std::ops::Range<usize>) -> Self {
        PiecewisePolyFn {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|v| v[range.clone()].to_vec()).collect(),
        }
    }

    /// Restriction to `[lo, hi] ⊆` domain.
    pub fn restrict(&self, lo: &Rat, hi: &Rat) -> Result<Self> {
        if lo >= hi || !self.covers(lo, hi) {
            return Err(DdaeError::OutOfDomain { t: lo.to_f64(), lo: self.start().to_f64(), hi: self.end().to_f64() });
        }
        let mut bps = vec![lo.clone()];
        let mut ps = Vec::new();
        for (k, piece) in self.pieces.iter().enumerate() {
            let (a, b) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
            if b <= lo || a >= hi {
                continue;
            }
            bps.push(if b < hi { b.clone() } else { hi.clone() });
            ps.push(piece.clone());
        }
        PiecewisePolyFn::new(bps, ps)
    }

    /// Same function on a breakpoint set refined by `extra` (points outside
    /// the domain are ignored).
    pub fn refine(&self, extra: &[Rat]) -> Self {
        let mut bps = self.breakpoints.clone();
        for x in extra {
            if x > self.start() && x < self.end() {
                bps.push(x.clone());
            }
        }
        bps.sort();
        bps.dedup();
        let pieces = bps[..bps.len() - 1]
            .iter()
            .map(|a| self.pieces[self.index_rat(a).expect("inside domain")].clone())
            .collect();
        PiecewisePolyFn { breakpoints: bps, pieces }
    }

    /// Pointwise combination on the common refinement of two functions with
    /// the same domain and dimension.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&Poly, &Poly) -> Poly) -> Result<Self> {
        if self.start() != other.start() || self.end() != other.end() || self.dim() != other.dim() {
            return Err(DdaeError::Dimension("piecewise functions differ in domain or dimension".into()));
        }
        let a = self.refine(&other.breakpoints);
        let b = other.refine(&a.breakpoints);
        let pieces = a
            .pieces
            .iter()
            .zip(&b.pieces)
            .map(|(u, v)| u.iter().zip(v).map(|(p, q)| f(p, q)).collect())
            .collect();
        Ok(PiecewisePolyFn { breakpoints: a.breakpoints, pieces })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |p, q| p + q)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |p, q| p - q)
    }

    pub fn neg(&self) -> Self {
        self.map_polys(|p| -p)
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.end() != other.start() || self.dim() != other.dim() {
            return Err(DdaeError::InvalidArgument("concatenated pieces do not line up".into()));
        }
        let mut bps = self.breakpoints.clone();
        bps.extend(other.breakpoints[1..].iter().cloned());
        let mut ps = self.pieces.clone();
        ps.extend(other.pieces.iter().cloned());
        PiecewisePolyFn::new(bps, ps)
    }

    /// Stacks two functions on the same domain into one vector function.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.start() != other.start() || self.end() != other.end() {
            return Err(DdaeError::Dimension("stacked functions differ in domain".into()));
        }
        let a = self.refine(&other.breakpoints);
        let b = other.refine(&a.breakpoints);
        let pieces = a.pieces.iter().zip(&b.pieces).map(|(u, v)| u.iter().chain(v).cloned().collect()).collect();
        Ok(PiecewisePolyFn { breakpoints: a.breakpoints, pieces })
    }

    /// Largest jump `‖v(b⁺) − v(b⁻)‖_∞` over interior breakpoints (exact).
    pub fn max_jump(&self) -> Rat {
        let mut worst = Rat::zero();
        for k in 1..self.pieces.len() {
            let b = &self.breakpoints[k];
            for (p, q) in self.pieces[k - 1].iter().zip(&self.pieces[k]) {
                let d = (p.eval(b) - q.eval(b)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// `sup_t ‖v(t)‖₂` from endpoints and critical points of `‖v‖²` on
    /// every piece.
    pub fn sup_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for (k, piece) in self.pieces.iter().enumerate() {
            let (a, b) = (self.breakpoints[k].to_f64(), self.breakpoints[k + 1].to_f64());
            let sq = piece.iter().fold(Poly::zero(), |acc, p| &acc + &(p * p));
            let mut cands = vec![a, b];
            cands.extend(real_roots_in(&sq.derivative(), a, b));
            for t in cands {
                best = best.max(sq.eval_f64(t).max(0.0).sqrt());
            }
        }
        best
    }

    /// `‖v‖_{C^p} = Σ_{i≤p} sup ‖v^{(i)}‖₂`.
    pub fn cp_norm(&self, p: usize) -> f64 {
        (0..=p).map(|i| self.nth_derivative(i).sup_norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn two_piece() -> PiecewisePolyFn {
        // t on [0,1), 2 − t on [1,2]
        PiecewisePolyFn::new(
            vec![r(0), r(1), r(2)],
            vec![vec![Poly::x()], vec![Poly::from_ints(&[2, -1])]],
        )
        .unwrap()
    }

    #[test]
    fn evaluation_and_domain() {
        let f = two_piece();
        assert_eq!(f.eval(0.5).unwrap(), vec![0.5]);
        assert_eq!(f.eval(1.5).unwrap(), vec![0.5]);
        assert_eq!(f.eval(2.0).unwrap(), vec![0.0]);
        assert_eq!(f.eval_derivative(0.5, 1).unwrap(), vec![1.0]);
        assert_eq!(f.eval_derivative(1.0, 1).unwrap(), vec![-1.0]);
        assert!(f.eval(2.5).is_err());
        assert_eq!(f.max_jump(), Rat::zero());
    }

    #[test]
    fn shift_and_restrict() {
        let f = two_piece();
        let g = f.shift(&r(1));
        assert_eq!(g.start(), &r(-1));
        assert_eq!(g.eval(0.5).unwrap(), f.eval(1.5).unwrap());
        let h = f.restrict(&Rat::new(1, 2), &Rat::new(3, 2)).unwrap();
        assert_eq!(h.breakpoints(), &[Rat::new(1, 2), r(1), Rat::new(3, 2)]);
    }

    #[test]
    fn arithmetic_on_common_refinement() {
        let f = two_piece();
        let g = PiecewisePolyFn::new(
            vec![r(0), Rat::new(1, 2), r(2)],
            vec![vec![Poly::one()], vec![Poly::zero()]],
        )
        .unwrap();
        let s = f.add(&g).unwrap();
        assert_eq!(s.breakpoints().len(), 4);
        assert_eq!(s.eval(0.25).unwrap(), vec![1.25]);
        assert_eq!(s.eval(1.5).unwrap(), vec![0.5]);
    }

    #[test]
    fn norms() {
        let f = two_piece();
        assert!((f.sup_norm() - 1.0).abs() < 1e-12);
        assert!((f.cp_norm(1) - 2.0).abs() < 1e-12);
        // (t, 1 − t) on [0, 1]: sup norm at the endpoints
        let v = PiecewisePolyFn::single(r(0), r(1), vec![Poly::x(), Poly::from_ints(&[1, -1])]).unwrap();
        assert!((v.sup_norm() - 1.0).abs() < 1e-12);
        // interior maximum of t(1 − t)
        let w = PiecewisePolyFn::single(r(0), r(1), vec![Poly::from_ints(&[0, 1, -1])]).unwrap();
        assert!((w.sup_norm() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn linear_map_and_stack() {
        let f = two_piece();
        let m = RatMatrix::from_ints(&[[2], [-1]]);
        let g = f.map_linear(&m).unwrap();
        assert_eq!(g.eval(0.5).unwrap(), vec![1.0, -0.5]);
        let s = f.stack(&f).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(f.map_linear(&RatMatrix::identity(2)).is_err());
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(PiecewisePolyFn::new(vec![r(0)], vec![]).is_err());
        assert!(PiecewisePolyFn::new(vec![r(1), r(0)], vec![vec![Poly::one()]]).is_err());
        assert!(PiecewisePolyFn::from_pieces(vec![
            (r(0), r(1), vec![Poly::one()]),
            (r(2), r(3), vec![Poly::one()]),
        ])
        .is_err());
    }
}
