//! Baxter–Belavin, Felder and SL(NM) R-matrices and their Yang–Baxter
//! residuals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticContext, LatticeIndex};
use crate::error::{Error, Result};
use crate::tensor::{basis_t, kron, kron_all, unit, CMatrix, TensorOperator};

/// Dynamical coordinates in two independent blocks plus ħ. Checks that only
/// need one block read `q2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicalParams {
    pub hbar: Complex64,
    pub q1: Vec<Complex64>,
    pub q2: Vec<Complex64>,
}

impl DynamicalParams {
    pub fn single(hbar: Complex64, q: Vec<Complex64>) -> Self {
        Self {
            hbar,
            q1: q.clone(),
            q2: q,
        }
    }

    pub fn m(&self) -> usize {
        self.q2.len()
    }
}

/// Scalar function multiplying E_ii ⊗ E_jj ⊗ 1 ⊗ 1 in the SL(NM) R-matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThirdTerm {
    /// N·φ(Nħ, −N·q_ij). The dynamical YBE holds with this choice.
    #[default]
    Scaled,
    /// φ(ħ, −q_ij). Kept for comparison; breaks the dynamical YBE for N > 1.
    Unscaled,
}

impl ThirdTerm {
    pub fn eval(self, ctx: &EllipticContext, n: usize, hbar: Complex64, x: Complex64) -> Result<Complex64> {
        match self {
            ThirdTerm::Scaled => {
                let nf = n as f64;
                Ok(ctx.kronecker_phi(hbar * nf, -x * nf)? * nf)
            }
            ThirdTerm::Unscaled => ctx.kronecker_phi(hbar, -x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ThirdTerm::Scaled => "scaled",
            ThirdTerm::Unscaled => "unscaled",
        }
    }
}

/// R^BB(ħ, u) = Σ_α φ_α(u, ħ + ω_α) T_α ⊗ T_{−α}.
pub fn r_bb(ctx: &EllipticContext, n: usize, hbar: Complex64, u: Complex64) -> Result<CMatrix> {
    let mut r = CMatrix::zeros(n * n, n * n);
    for alpha in LatticeIndex::all(n) {
        let c = ctx.varphi(alpha, u, hbar)?;
        r += kron(&basis_t(alpha), &basis_t(-alpha.lift())) * c;
    }
    Ok(r)
}

/// Felder's R-matrix on C^M ⊗ C^M, M = q.len().
pub fn r_felder(ctx: &EllipticContext, hbar: Complex64, u: Complex64, q: &[Complex64]) -> Result<CMatrix> {
    let m = q.len();
    if m == 0 {
        return Err(Error::EmptyInput("dynamical coordinates"));
    }
    let mut r = CMatrix::zeros(m * m, m * m);
    let diag = ctx.kronecker_phi(u, hbar)?;
    for i in 0..m {
        r[(i * m + i, i * m + i)] += diag;
        for j in 0..m {
            if i == j {
                continue;
            }
            let x = q[i] - q[j];
            // E_ij ⊗ E_ji maps e_j ⊗ e_i to e_i ⊗ e_j
            r[(i * m + j, j * m + i)] += ctx.kronecker_phi(u, x)?;
            r[(i * m + j, i * m + j)] += ctx.kronecker_phi(hbar, -x)?;
        }
    }
    Ok(r)
}

/// SL(NM) R-matrix on (C^M ⊗ C^N)^{⊗2}, site order (Latin, numeric).
pub fn r_slnm(
    ctx: &EllipticContext,
    n: usize,
    hbar: Complex64,
    u: Complex64,
    q: &[Complex64],
    third: ThirdTerm,
) -> Result<CMatrix> {
    let m = q.len();
    if m == 0 {
        return Err(Error::EmptyInput("dynamical coordinates"));
    }
    let d = n * m;
    let id_nn = CMatrix::identity(n * n, n * n);
    let mut r = CMatrix::zeros(d * d, d * d);
    // assembled in slot order (a, b, 1, 2)
    for i in 0..m {
        let eii = unit(i, i, m);
        r += kron_all(&[&eii, &eii, &r_bb(ctx, n, hbar, u)?]);
        for j in 0..m {
            if i == j {
                continue;
            }
            let x = q[i] - q[j];
            r += kron_all(&[&unit(i, j, m), &unit(j, i, m), &r_bb(ctx, n, x, u)?]);
            let f = third.eval(ctx, n, hbar, x)?;
            r += kron_all(&[&eii, &unit(j, j, m), &id_nn]) * f;
        }
    }
    let op = TensorOperator::new(vec![m, m, n, n], r)?;
    Ok(op.permute_components(&[0, 2, 1, 3])?.into_data())
}

/// Σ_k R(q − ħe_k) ⊗ P_k with R on `pair` and P_k on `shift_slot`.
pub fn shifted_r<F>(
    builder: F,
    q: &[Complex64],
    hbar: Complex64,
    pair: [usize; 2],
    shift_slot: usize,
    projectors: &[CMatrix],
    dims: &[usize],
) -> Result<TensorOperator>
where
    F: Fn(&[Complex64]) -> Result<CMatrix>,
{
    if projectors.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: projectors.len(),
        });
    }
    let d_pair = dims[pair[0]] * dims[pair[1]];
    let d_shift = dims[shift_slot];
    let mut acc = CMatrix::zeros(d_pair * d_shift, d_pair * d_shift);
    let mut shifted = q.to_vec();
    for (k, p) in projectors.iter().enumerate() {
        shifted[k] = q[k] - hbar;
        acc += kron(&builder(&shifted)?, p);
        shifted[k] = q[k];
    }
    TensorOperator::embed(&acc, &[pair[0], pair[1], shift_slot], dims)
}

/// Weight projectors E_kk ⊗ 1_N on C^M ⊗ C^N.
pub fn weight_projectors(m: usize, n: usize) -> Vec<CMatrix> {
    let id = CMatrix::identity(n, n);
    (0..m).map(|k| kron(&unit(k, k, m), &id)).collect()
}

/// One residual sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub residual: f64,
    pub normalization: f64,
}

impl Trial {
    /// ‖lhs − rhs‖ / max(‖lhs‖, ‖rhs‖, 1).
    pub fn compare(lhs: &CMatrix, rhs: &CMatrix) -> Self {
        let normalization = lhs.norm().max(rhs.norm()).max(1.0);
        Self {
            residual: (lhs - rhs).norm() / normalization,
            normalization,
        }
    }

    pub fn absolute(residual: f64) -> Self {
        Self {
            residual,
            normalization: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub mean_residual: f64,
    pub normalization: f64,
    pub trials: usize,
    pub per_trial: Vec<f64>,
}

impl ResidualReport {
    pub fn from_trials(trials: &[Trial]) -> Result<Self> {
        if trials.is_empty() {
            return Err(Error::EmptyInput("trials"));
        }
        let per_trial: Vec<f64> = trials.iter().map(|t| t.residual).collect();
        // NaN propagates into max so a broken trial cannot pass
        let max_residual = per_trial
            .iter()
            .fold(0.0f64, |a, &b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
        let mean_residual = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
        let normalization = trials.iter().map(|t| t.normalization).fold(1.0, f64::max);
        Ok(Self {
            max_residual,
            mean_residual,
            normalization,
            trials: trials.len(),
            per_trial,
        })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}

/// R12 R13 R23 against R23 R13 R12 for R^BB, z_ij = z_i − z_j.
pub fn ybe_trial(ctx: &EllipticContext, n: usize, hbar: Complex64, z: [Complex64; 3]) -> Result<Trial> {
    let dims = [n, n, n];
    let r = |u: Complex64, slots: [usize; 2]| -> Result<TensorOperator> {
        TensorOperator::embed(&r_bb(ctx, n, hbar, u)?, &slots, &dims)
    };
    let r12 = r(z[0] - z[1], [0, 1])?;
    let r13 = r(z[0] - z[2], [0, 2])?;
    let r23 = r(z[1] - z[2], [1, 2])?;
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    Ok(Trial::compare(lhs.data(), rhs.data()))
}

/// R12 L1 L2 = L2 L1 R12 with L1(z) = R13(ħ, z) acting on an auxiliary
/// C^N. This is the YBE at z3 = 0, assembled as an RLL relation.
pub fn bb_rll_trial(ctx: &EllipticContext, n: usize, hbar: Complex64, z1: Complex64, z2: Complex64) -> Result<Trial> {
    let dims = [n, n, n];
    let l1 = TensorOperator::embed(&r_bb(ctx, n, hbar, z1)?, &[0, 2], &dims)?;
    let l2 = TensorOperator::embed(&r_bb(ctx, n, hbar, z2)?, &[1, 2], &dims)?;
    let r12 = TensorOperator::embed(&r_bb(ctx, n, hbar, z1 - z2)?, &[0, 1], &dims)?;
    let lhs = &(&r12 * &l1) * &l2;
    let rhs = &(&l2 * &l1) * &r12;
    Ok(Trial::compare(lhs.data(), rhs.data()))
}

/// R12(q) R13(q − ħ^{(2)}) R23(q) against R23(q − ħ^{(1)}) R13(q) R12(q − ħ^{(3)}),
/// the shifts decomposed over `projectors` on a site of dimension `d`.
fn dybe_generic<F>(
    builder: F,
    d: usize,
    q: &[Complex64],
    hbar: Complex64,
    z: [Complex64; 3],
    projectors: &[CMatrix],
) -> Result<Trial>
where
    F: Fn(Complex64, &[Complex64]) -> Result<CMatrix>,
{
    let dims = [d, d, d];
    let plain = |u: Complex64, slots: [usize; 2]| TensorOperator::embed(&builder(u, q)?, &slots, &dims);
    let shifted = |u: Complex64, pair: [usize; 2], slot: usize| {
        shifted_r(|qq| builder(u, qq), q, hbar, pair, slot, projectors, &dims)
    };
    let (z12, z13, z23) = (z[0] - z[1], z[0] - z[2], z[1] - z[2]);
    let lhs = &(&plain(z12, [0, 1])? * &shifted(z13, [0, 2], 1)?) * &plain(z23, [1, 2])?;
    let rhs = &(&shifted(z23, [1, 2], 0)? * &plain(z13, [0, 2])?) * &shifted(z12, [0, 1], 2)?;
    Ok(Trial::compare(lhs.data(), rhs.data()))
}

pub fn dybe_felder_trial(ctx: &EllipticContext, params: &DynamicalParams, z: [Complex64; 3]) -> Result<Trial> {
    let m = params.m();
    let hbar = params.hbar;
    dybe_generic(
        |u, q| r_felder(ctx, hbar, u, q),
        m,
        &params.q2,
        hbar,
        z,
        &weight_projectors(m, 1),
    )
}

pub fn dybe_slnm_trial(
    ctx: &EllipticContext,
    n: usize,
    params: &DynamicalParams,
    z: [Complex64; 3],
    third: ThirdTerm,
) -> Result<Trial> {
    let m = params.m();
    let hbar = params.hbar;
    dybe_generic(
        |u, q| r_slnm(ctx, n, hbar, u, q, third),
        n * m,
        &params.q2,
        hbar,
        z,
        &weight_projectors(m, n),
    )
}

/// Dynamical RLL with L1(z|q) = R13^F(ħ, z|q) and h_k = (E_kk)_3:
/// R12(q) L1(z1|q − ħ^{(2)}) L2(z2|q) = L2(z2|q − ħ^{(1)}) L1(z1|q) R12(q − ħh).
pub fn felder_rll_trial(ctx: &EllipticContext, params: &DynamicalParams, z1: Complex64, z2: Complex64) -> Result<Trial> {
    let m = params.m();
    let hbar = params.hbar;
    let q = &params.q2;
    let dims = [m, m, m];
    let projectors = weight_projectors(m, 1);
    let r = |u: Complex64, qq: &[Complex64]| r_felder(ctx, hbar, u, qq);
    let l1_shift = shifted_r(|qq| r(z1, qq), q, hbar, [0, 2], 1, &projectors, &dims)?;
    let l2 = TensorOperator::embed(&r(z2, q)?, &[1, 2], &dims)?;
    let l2_shift = shifted_r(|qq| r(z2, qq), q, hbar, [1, 2], 0, &projectors, &dims)?;
    let l1 = TensorOperator::embed(&r(z1, q)?, &[0, 2], &dims)?;
    let r12 = TensorOperator::embed(&r(z1 - z2, q)?, &[0, 1], &dims)?;
    let r12_h = shifted_r(|qq| r(z1 - z2, qq), q, hbar, [0, 1], 2, &projectors, &dims)?;
    let lhs = &(&r12 * &l1_shift) * &l2;
    let rhs = &(&l2_shift * &l1) * &r12_h;
    Ok(Trial::compare(lhs.data(), rhs.data()))
}

/// Zero-weight residuals of R^F: the largest ‖[(E_ii)_1 + (E_ii)_2, R]‖ and
/// the elementwise change under q → q + c.
pub fn zero_weight_residual(
    ctx: &EllipticContext,
    hbar: Complex64,
    u: Complex64,
    q: &[Complex64],
    c: Complex64,
) -> Result<(f64, f64)> {
    let m = q.len();
    let r = r_felder(ctx, hbar, u, q)?;
    let id = CMatrix::identity(m, m);
    let mut commutator = 0.0f64;
    for i in 0..m {
        let h = kron(&unit(i, i, m), &id) + kron(&id, &unit(i, i, m));
        commutator = commutator.max((&h * &r - &r * &h).norm());
    }
    let moved: Vec<Complex64> = q.iter().map(|x| x + c).collect();
    let r2 = r_felder(ctx, hbar, u, &moved)?;
    let translation = (&r2 - &r).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((commutator, translation))
}

/// Elementwise distance between r_slnm at M = 1 and r_bb.
pub fn bb_reduction_residual(ctx: &EllipticContext, n: usize, hbar: Complex64, u: Complex64, q: Complex64) -> Result<f64> {
    let a = r_slnm(ctx, n, hbar, u, &[q], ThirdTerm::default())?;
    let b = r_bb(ctx, n, hbar, u)?;
    Ok(max_abs_diff(&a, &b))
}

/// Elementwise distance between r_slnm at N = 1 and r_felder.
pub fn felder_reduction_residual(ctx: &EllipticContext, hbar: Complex64, u: Complex64, q: &[Complex64]) -> Result<f64> {
    let a = r_slnm(ctx, 1, hbar, u, q, ThirdTerm::default())?;
    let b = r_felder(ctx, hbar, u, q)?;
    Ok(max_abs_diff(&a, &b))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
