//! The four families of quadratic relations for t_{ij}^α.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticContext, LatticeIndex, Lift};
use crate::error::{Error, Result};
use crate::expr::{Affine, Coeff, Point};
use crate::ncalgebra::{lifted_generator, NCSum, RelationVector, WordSpace};
use crate::rmatrix::{DynamicalParams, ThirdTerm};
use crate::tensor::kappa;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Sklyanin relations among t_{ji}^• with parameter η = q2_i − q1_j.
    Sklyanin,
    /// Same second index, distinct first indices.
    SameSecond,
    /// Same first index, distinct second indices.
    SameFirst,
    /// Both indices distinct.
    Mixed,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Sklyanin, Family::SameSecond, Family::SameFirst, Family::Mixed];

    pub fn from_number(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Family::Sklyanin),
            2 => Ok(Family::SameSecond),
            3 => Ok(Family::SameFirst),
            4 => Ok(Family::Mixed),
            _ => Err(Error::InvalidIndices(format!("family {k}"))),
        }
    }

    pub fn number(self) -> usize {
        match self {
            Family::Sklyanin => 1,
            Family::SameSecond => 2,
            Family::SameFirst => 3,
            Family::Mixed => 4,
        }
    }

    /// Number of matrix indices the family is labelled by.
    pub fn arity(self) -> usize {
        match self {
            Family::Sklyanin => 2,
            Family::SameSecond | Family::SameFirst => 3,
            Family::Mixed => 4,
        }
    }
}

/// The function multiplying E_ii ⊗ E_jj ⊗ 1 ⊗ 1 in the R-matrix, at x.
pub fn third_term_coeff(third: ThirdTerm, n: usize, hbar: Affine, x: Affine) -> Coeff {
    match third {
        ThirdTerm::Scaled => {
            let nf = Complex64::from(n as f64);
            Coeff::phi(hbar.scale(nf), x.scale(-nf)).scale(nf)
        }
        ThirdTerm::Unscaled => Coeff::phi(hbar, -x),
    }
}

fn omega(l: Lift, tau: Complex64) -> Affine {
    Affine::constant(l.omega(tau))
}

struct Builder {
    m: usize,
    tau: Complex64,
    sum: NCSum,
}

impl Builder {
    fn new(m: usize, tau: Complex64) -> Self {
        Self {
            m,
            tau,
            sum: NCSum::zero(m),
        }
    }

    /// Adds c · t_{x}^{μx} t_{y}^{μy} with lifted indices.
    fn add(&mut self, c: Coeff, x: (usize, usize), mx: Lift, y: (usize, usize), my: Lift) -> Result<()> {
        let gx = lifted_generator(x.0, x.1, mx, self.m, self.tau);
        let gy = lifted_generator(y.0, y.1, my, self.m, self.tau);
        let term = NCSum::scalar(self.m, c).mul(&gx)?.mul(&gy)?;
        self.sum = std::mem::take(&mut self.sum).add(term);
        Ok(())
    }
}

fn check_indices(family: Family, idx: &[usize], m: usize) -> Result<()> {
    let bad = || Error::InvalidIndices(format!("{family:?} with indices {idx:?}, M = {m}"));
    if idx.len() != family.arity() || idx.iter().any(|&k| k >= m) {
        return Err(bad());
    }
    match family {
        Family::Sklyanin => Ok(()),
        Family::SameSecond | Family::SameFirst if idx[1] != idx[2] => Ok(()),
        Family::Mixed if idx[0] != idx[2] && idx[1] != idx[3] => Ok(()),
        _ => Err(bad()),
    }
}

/// Symbolic relation of a family. Indices from 0: (i, j) for family 1,
/// (i, j, k) for families 2 and 3, (i, j, k, l) for family 4.
pub fn slnm_family_sum(
    tau: Complex64,
    family: Family,
    idx: &[usize],
    alpha: LatticeIndex,
    beta: LatticeIndex,
    m: usize,
    third: ThirdTerm,
) -> Result<NCSum> {
    check_indices(family, idx, m)?;
    let n = alpha.order();
    let (a, b) = (alpha.lift(), beta.lift());
    let h = Affine::hbar;
    let mut out = Builder::new(m, tau);
    match family {
        Family::Sklyanin => {
            let (i, j) = (idx[0], idx[1]);
            let eta = Affine::q2(i) - Affine::q1(j);
            // S̃_μ = S^η_μ e^{−2πiμ₂(η−ħ)/N}
            let tilde = |mu: Lift| Coeff::exp((eta.clone() - h()).scale(-2.0 * PI * I * mu.a2 as f64 / n as f64));
            for gamma in LatticeIndex::all(n) {
                let g = gamma.lift();
                let m1 = a - g;
                let (m2, c) = if !beta.is_zero() {
                    let e = |l: Lift| Coeff::e1(h() + omega(l, tau));
                    let c = (e(g) - e(a - b - g) + e(a - g) - e(b + g)).scale(kappa(g, a - b));
                    (b + g, c)
                } else {
                    let e = |l: Lift| Coeff::e2(h() + omega(l, tau));
                    (g, (e(g) - e(a - g)).scale(kappa(g, a)))
                };
                let c = c
                    * Coeff::theta(h() + omega(m1, tau))
                    * Coeff::theta(h() + omega(m2, tau))
                    * tilde(m1)
                    * tilde(m2);
                out.add(c, (j, i), m1, (j, i), m2)?;
            }
        }
        Family::SameSecond => {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            let x = Affine::q1(j) - Affine::q1(k);
            for gamma in LatticeIndex::all(n) {
                let g = gamma.lift();
                let c = Coeff::phi(h() + omega(g, tau), x.clone() + omega(b + g - a, tau)).scale(kappa(g, a) * kappa(b, g));
                out.add(c, (j, i), a - g, (k, i), b + g)?;
            }
            let f = third_term_coeff(third, n, h(), x).scale(Complex64::from(-1.0));
            out.add(f, (k, i), b, (j, i), a)?;
        }
        Family::SameFirst => {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            let x = Affine::q2(j) - Affine::q2(k);
            for gamma in LatticeIndex::all(n) {
                let g = gamma.lift();
                let c = Coeff::phi(h() + omega(a - b - g, tau), -x.clone() - omega(g, tau)).scale(kappa(g, a) * kappa(b, g));
                out.add(c, (i, k), a - g, (i, j), b + g)?;
            }
            let f = third_term_coeff(third, n, h(), x).scale(Complex64::from(-1.0));
            out.add(f, (i, j), a, (i, k), b)?;
        }
        Family::Mixed => {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let x2 = Affine::q2(i) - Affine::q2(k);
            let x1 = Affine::q1(j) - Affine::q1(l);
            for gamma in LatticeIndex::all(n) {
                let g = gamma.lift();
                let c = Coeff::phi(x2.clone() + omega(g, tau), x1.clone() + omega(b + g - a, tau))
                    .scale(kappa(g, a) * kappa(b, g));
                out.add(c, (j, k), a - g, (l, i), b + g)?;
            }
            let f1 = third_term_coeff(third, n, h(), x1).scale(Complex64::from(-1.0));
            out.add(f1, (l, k), b, (j, i), a)?;
            let f2 = third_term_coeff(third, n, h(), x2);
            out.add(f2, (j, i), a, (l, k), b)?;
        }
    }
    Ok(out.sum)
}

fn point_of(params: &DynamicalParams) -> Point {
    Point {
        q1: params.q1.clone(),
        q2: params.q2.clone(),
        hbar: params.hbar,
        z: Vec::new(),
    }
}

/// The evaluated coefficient vector of one relation.
#[allow(clippy::too_many_arguments)]
pub fn slnm_family_coeffs(
    ctx: &EllipticContext,
    family: Family,
    idx: &[usize],
    alpha: LatticeIndex,
    beta: LatticeIndex,
    params: &DynamicalParams,
    third: ThirdTerm,
) -> Result<RelationVector> {
    let m = params.m();
    let n = alpha.order();
    let sum = slnm_family_sum(ctx.tau(), family, idx, alpha, beta, m, third)?;
    let coords = sum.freeze_quadratic(ctx, &point_of(params), &WordSpace::new(n, m))?;
    let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    let label = format!("f{}({};{},{})", family.number(), idx.join(","), alpha, beta);
    let v = RelationVector::new(coords, label);
    if !v.is_finite() {
        return Err(Error::NonFinite("relation coefficient"));
    }
    Ok(v)
}

fn index_tuples(arity: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every relation of a family. Family 1 keeps α ≠ β only.
pub fn slnm_family_vectors(
    ctx: &EllipticContext,
    family: Family,
    n: usize,
    params: &DynamicalParams,
    third: ThirdTerm,
) -> Result<Vec<RelationVector>> {
    let m = params.m();
    let mut out = Vec::new();
    for idx in index_tuples(family.arity(), m) {
        if check_indices(family, &idx, m).is_err() {
            continue;
        }
        for alpha in LatticeIndex::all(n) {
            for beta in LatticeIndex::all(n) {
                if family == Family::Sklyanin && alpha == beta {
                    continue;
                }
                let v = slnm_family_coeffs(ctx, family, &idx, alpha, beta, params, third)?;
                if v.norm() > 0.0 {
                    out.push(v);
                }
            }
        }
    }
    Ok(out)
}

/// Families 1–4 together.
pub fn relation_vectors_all(ctx: &EllipticContext, n: usize, params: &DynamicalParams, third: ThirdTerm) -> Result<Vec<RelationVector>> {
    let mut out = Vec::new();
    for f in Family::ALL {
        out.extend(slnm_family_vectors(ctx, f, n, params, third)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::sklyanin::sklyanin_coeffs_eta;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(m: usize) -> DynamicalParams {
        DynamicalParams {
            hbar: c(0.19, 0.27),
            q1: (0..m).map(|k| c(0.13 + 0.31 * k as f64, 0.21 + 0.17 * k as f64)).collect(),
            q2: (0..m).map(|k| c(0.47 + 0.23 * k as f64, 0.12 + 0.19 * k as f64)).collect(),
        }
    }

    #[test]
    fn index_constraints() {
        let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
        let p = params(2);
        let a = LatticeIndex::zero(2);
        let err = slnm_family_coeffs(&ctx, Family::SameSecond, &[0, 1, 1], a, a, &p, ThirdTerm::Scaled);
        assert!(matches!(err, Err(Error::InvalidIndices(_))));
        assert!(slnm_family_coeffs(&ctx, Family::Mixed, &[0, 0, 0, 1], a, a, &p, ThirdTerm::Scaled).is_err());
        assert!(Family::from_number(5).is_err());
        let p1 = params(1);
        assert!(slnm_family_vectors(&ctx, Family::Mixed, 2, &p1, ThirdTerm::Scaled).unwrap().is_empty());
    }

    #[test]
    fn sklyanin_family_matches_eta_coefficients() {
        let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
        let p = params(2);
        let n = 2;
        let (i, j) = (1, 0);
        let eta = p.q2[i] - p.q1[j];
        for alpha in LatticeIndex::all(n) {
            for beta in LatticeIndex::all(n) {
                let v = slnm_family_coeffs(&ctx, Family::Sklyanin, &[i, j], alpha, beta, &p, ThirdTerm::Scaled).unwrap();
                let rel = sklyanin_coeffs_eta(&ctx, alpha, beta, eta, p.hbar).unwrap();
                let sum = rel.to_ncsum(j, i, 2, ctx.tau()).unwrap();
                let w = sum.freeze_quadratic(&ctx, &point_of(&p), &WordSpace::new(n, 2)).unwrap();
                let diff: f64 = v.coords.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(diff < 1e-11 * (1.0 + v.norm()), "{alpha} {beta} {diff}");
            }
        }
    }

    #[test]
    fn order_one_same_second_is_two_terms() {
        // φ(ħ, x) t_ji t_ki = φ(ħ, −x) t_ki t_ji with x = q1_jk, which is
        // t_ji t_ki = θ(x − ħ)/θ(x + ħ) t_ki t_ji
        let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
        let p = params(2);
        let z = LatticeIndex::zero(1);
        let v = slnm_family_coeffs(&ctx, Family::SameSecond, &[0, 0, 1], z, z, &p, ThirdTerm::Scaled).unwrap();
        let nz: Vec<_> = v.coords.iter().filter(|c| c.norm() > 0.0).collect();
        assert_eq!(nz.len(), 2);
        let x = p.q1[0] - p.q1[1];
        let space = WordSpace::new(1, 2);
        let g = |a, b| crate::ncalgebra::Generator::new(a, b, z);
        let first = v.coords[space.word_index(&g(0, 0), &g(1, 0))];
        let second = v.coords[space.word_index(&g(1, 0), &g(0, 0))];
        assert!((first - ctx.kronecker_phi(p.hbar, x).unwrap()).norm() < 1e-13);
        assert!((second + ctx.kronecker_phi(p.hbar, -x).unwrap()).norm() < 1e-13);
        let ratio = ctx.kronecker_phi(p.hbar, x).unwrap() / ctx.kronecker_phi(p.hbar, -x).unwrap();
        let want = ctx.theta(x + p.hbar).unwrap() / ctx.theta(x - p.hbar).unwrap();
        assert!((ratio - want).norm() < 1e-12 * want.norm());
    }
}
