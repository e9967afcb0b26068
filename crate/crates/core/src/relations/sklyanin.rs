//! Sklyanin algebra relations Σ_γ c_γ S_{left(γ)} S_{right(γ)} = 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticContext, LatticeIndex, Lift};
use crate::error::Result;
use crate::ncalgebra::{lifted_generator, NCSum};
use crate::tensor::{basis_t, kappa, CMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which θ-prefactor multiplies S̃_{α−γ} S̃_γ in the β = 0 relations of the
/// rescaled form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroBetaReading {
    /// θ(ħ + ω_{α−γ}) θ(ħ + ω_γ), matching the generators it multiplies.
    #[default]
    AlphaMinusGamma,
    /// θ(ħ + ω_{α+γ}) θ(ħ + ω_γ).
    AlphaPlusGamma,
}

/// Normalization of the generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SklyaninForm {
    /// Generators S_α of L = Σ φ_α(z, ħ + ω_α) S_α T_α.
    Plain,
    /// S̃_α = S_α / θ(ħ + ω_α).
    Theta(ZeroBetaReading),
    /// S^η_α = S̃_α e^{2πiα₂(η − ħ)/N}.
    Eta(Complex64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SklyaninTerm {
    pub gamma: LatticeIndex,
    pub left: Lift,
    pub right: Lift,
    pub coeff: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SklyaninRelation {
    pub alpha: LatticeIndex,
    pub beta: LatticeIndex,
    pub terms: Vec<SklyaninTerm>,
}

impl SklyaninRelation {
    pub fn is_trivial(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == Complex64::new(0.0, 0.0))
    }

    /// Σ_γ c_γ t^{left} t^{right} with S_μ read as t_{first,second}^μ.
    pub fn to_ncsum(&self, first: usize, second: usize, m: usize, tau: Complex64) -> Result<NCSum> {
        let mut out = NCSum::zero(m);
        for t in &self.terms {
            let l = lifted_generator(first, second, t.left, m, tau);
            let r = lifted_generator(first, second, t.right, m, tau);
            let prod = l.mul(&r)?;
            out = out.add(prod.left_scale(&crate::expr::Coeff::constant(t.coeff)));
        }
        Ok(out)
    }
}

/// The relation labelled (α, β) in the plain normalization.
pub fn sklyanin_coeffs(ctx: &EllipticContext, alpha: LatticeIndex, beta: LatticeIndex, hbar: Complex64) -> Result<SklyaninRelation> {
    let n = alpha.order();
    let tau = ctx.tau();
    let (a, b) = (alpha.lift(), beta.lift());
    let w = |l: Lift| l.omega(tau) + hbar;
    let mut terms = Vec::with_capacity(n * n);
    for gamma in LatticeIndex::all(n) {
        let g = gamma.lift();
        let term = if !beta.is_zero() {
            let c = kappa(g, a - b)
                * (ctx.eisenstein_e1(w(g))? - ctx.eisenstein_e1(w(a - b - g))? + ctx.eisenstein_e1(w(a - g))?
                    - ctx.eisenstein_e1(w(b + g))?);
            SklyaninTerm {
                gamma,
                left: a - g,
                right: b + g,
                coeff: c,
            }
        } else {
            let c = kappa(g, a) * (ctx.eisenstein_e2(w(g))? - ctx.eisenstein_e2(w(a - g))?);
            SklyaninTerm {
                gamma,
                left: a - g,
                right: g,
                coeff: c,
            }
        };
        terms.push(term);
    }
    Ok(SklyaninRelation { alpha, beta, terms })
}

/// The relation in the θ-prefactor normalization.
pub fn sklyanin_coeffs_theta(
    ctx: &EllipticContext,
    alpha: LatticeIndex,
    beta: LatticeIndex,
    hbar: Complex64,
    reading: ZeroBetaReading,
) -> Result<SklyaninRelation> {
    let tau = ctx.tau();
    let mut rel = sklyanin_coeffs(ctx, alpha, beta, hbar)?;
    for t in &mut rel.terms {
        let first = if beta.is_zero() && reading == ZeroBetaReading::AlphaPlusGamma {
            alpha.lift() + t.gamma.lift()
        } else {
            t.left
        };
        t.coeff *= ctx.theta(hbar + first.omega(tau))? * ctx.theta(hbar + t.right.omega(tau))?;
    }
    Ok(rel)
}

/// The relation for S^η, transported from the θ-prefactor form.
pub fn sklyanin_coeffs_eta(
    ctx: &EllipticContext,
    alpha: LatticeIndex,
    beta: LatticeIndex,
    eta: Complex64,
    hbar: Complex64,
) -> Result<SklyaninRelation> {
    ctx.ensure_pole_free("eta", eta)?;
    let n = alpha.order() as f64;
    let mut rel = sklyanin_coeffs_theta(ctx, alpha, beta, hbar, ZeroBetaReading::AlphaMinusGamma)?;
    for t in &mut rel.terms {
        let k = (t.left.a2 + t.right.a2) as f64;
        t.coeff *= (-2.0 * PI * I * k * (eta - hbar) / n).exp();
    }
    Ok(rel)
}

pub fn relation_in_form(
    ctx: &EllipticContext,
    alpha: LatticeIndex,
    beta: LatticeIndex,
    hbar: Complex64,
    form: SklyaninForm,
) -> Result<SklyaninRelation> {
    match form {
        SklyaninForm::Plain => sklyanin_coeffs(ctx, alpha, beta, hbar),
        SklyaninForm::Theta(r) => sklyanin_coeffs_theta(ctx, alpha, beta, hbar, r),
        SklyaninForm::Eta(eta) => sklyanin_coeffs_eta(ctx, alpha, beta, eta, hbar),
    }
}

/// The matrix S_μ = T_{−μ} in the requested normalization.
pub fn representation_matrix(ctx: &EllipticContext, mu: Lift, hbar: Complex64, form: SklyaninForm) -> Result<CMatrix> {
    let t = basis_t(-mu);
    let n = mu.order() as f64;
    let scale = match form {
        SklyaninForm::Plain => Complex64::new(1.0, 0.0),
        SklyaninForm::Theta(_) => ctx.theta(hbar + mu.omega(ctx.tau()))?.inv(),
        SklyaninForm::Eta(eta) => {
            ctx.theta(hbar + mu.omega(ctx.tau()))?.inv() * (2.0 * PI * I * mu.a2 as f64 * (eta - hbar) / n).exp()
        }
    };
    Ok(t * scale)
}

/// ‖Σ_γ c_γ S_l S_r‖ / max(Σ_γ ‖c_γ S_l S_r‖, 1) for S_μ = T_{−μ}.
pub fn representation_residual(ctx: &EllipticContext, rel: &SklyaninRelation, hbar: Complex64, form: SklyaninForm) -> Result<f64> {
    let n = rel.alpha.order();
    let mut acc = CMatrix::zeros(n, n);
    let mut scale = 0.0;
    for t in &rel.terms {
        let x = representation_matrix(ctx, t.left, hbar, form)? * representation_matrix(ctx, t.right, hbar, form)? * t.coeff;
        scale += x.norm();
        acc += x;
    }
    Ok(acc.norm() / scale.max(1.0))
}

/// Worst representation residual over every (α, β).
pub fn max_representation_residual(ctx: &EllipticContext, n: usize, hbar: Complex64, form: SklyaninForm) -> Result<f64> {
    let mut worst = 0.0f64;
    for alpha in LatticeIndex::all(n) {
        for beta in LatticeIndex::all(n) {
            let rel = relation_in_form(ctx, alpha, beta, hbar, form)?;
            worst = worst.max(representation_residual(ctx, &rel, hbar, form)?);
        }
    }
    Ok(worst)
}

/// All nontrivial relations for Z_N².
pub fn sklyanin_relations(ctx: &EllipticContext, n: usize, hbar: Complex64, form: SklyaninForm) -> Result<Vec<SklyaninRelation>> {
    let mut out = Vec::new();
    for alpha in LatticeIndex::all(n) {
        for beta in LatticeIndex::all(n) {
            let rel = relation_in_form(ctx, alpha, beta, hbar, form)?;
            if !rel.is_trivial() {
                out.push(rel);
            }
        }
    }
    Ok(out)
}
