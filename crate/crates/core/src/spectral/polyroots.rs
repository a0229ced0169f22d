//! Roots of univariate polynomials: exact squarefree factorization followed
//! by companion-matrix eigenvalues and Newton polishing.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::polyalg::Poly;

/// Yun's algorithm: `p = c · Π_i f_i^i` with squarefree, pairwise coprime
/// monic `f_i`. Returns `(f_i, i)` for the nonconstant factors.
pub fn squarefree_factors(p: &Poly) -> Vec<(Poly, usize)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let a0 = p.gcd_monic(&dp).expect("p is nonzero");
    let mut b = p.divmod(&a0).expect("nonzero").0;
    let mut c = dp.divmod(&a0).expect("nonzero").0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let a = b.gcd_monic(&d).expect("b is nonzero");
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.divmod(&a).expect("nonzero").0;
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        c = d.divmod(&a).expect("nonzero").0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..20 {
        let (v, dv) = eval_with_derivative(coeffs, z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        // keep the polished value only if it improves the residual
        if eval_with_derivative(coeffs, next).0.norm() > v.norm() {
            break;
        }
        z = next;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Roots of a squarefree polynomial given by ascending `f64` coefficients.
fn simple_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    if d == 1 {
        return vec![Complex64::new(-coeffs[0] / lead, 0.0)];
    }
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -coeffs[i] / lead;
    }
    comp.complex_eigenvalues().iter().map(|&z| polish(coeffs, z)).collect()
}

/// All complex roots with multiplicities, sorted by `(re, im)`.
pub fn poly_roots(p: &Poly) -> Vec<(Complex64, usize)> {
    let mut out = Vec::new();
    for (f, m) in squarefree_factors(p) {
        for z in simple_roots(&f.to_f64_coeffs()) {
            out.push((z, m));
        }
    }
    out.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Real roots of `p` inside `[a, b]` (numerically real: tiny imaginary part).
pub fn real_roots_in(p: &Poly, a: f64, b: f64) -> Vec<f64> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    poly_roots(p)
        .into_iter()
        .filter(|(z, _)| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|(z, _)| z.re)
        .filter(|&x| x >= a && x <= b)
        .collect()
}
