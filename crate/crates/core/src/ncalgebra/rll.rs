//! RLL defect extraction for the SL(NM) R-matrix and the L-operator ansatz.

use std::collections::hash_map::{Entry, HashMap};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{l_entry, LConvention, NCSum, RelationVector, WordSpace};
use crate::elliptic::{EllipticContext, LatticeIndex};
use crate::error::{Error, Result};
use crate::expr::{Affine, Coeff, Point};
use crate::rmatrix::{r_slnm, DynamicalParams, ThirdTerm};
use crate::tensor::{basis_t, kron, unit, CMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// LHS − RHS of R12(z12|q2) L1(z1) L2(z2) = L2(z2) L1(z1) R12(z12|q1), one
/// (NM)²×(NM)² matrix per quadratic word.
#[derive(Clone, Debug)]
pub struct DefectTable {
    space: WordSpace,
    matrices: Vec<CMatrix>,
    scale: f64,
    /// Largest |entry| of either side at each position, over all words.
    entry_scale: DMatrix<f64>,
}

impl DefectTable {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        ctx: &EllipticContext,
        n: usize,
        params: &DynamicalParams,
        z1: Complex64,
        z2: Complex64,
        conv: LConvention,
        third: ThirdTerm,
    ) -> Result<Self> {
        let m = params.m();
        if params.q1.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: params.q1.len(),
            });
        }
        let space = WordSpace::new(n, m);
        let point = Point {
            q1: params.q1.clone(),
            q2: params.q2.clone(),
            hbar: params.hbar,
            z: vec![z1, z2],
        };
        let g_count = space.num_generators();

        // per generator: symbolic coefficient at z1 and z2, and its matrix E_ij ⊗ T_α
        let mut at_z1: Vec<Option<Coeff>> = vec![None; g_count];
        let mut at_z2: Vec<Option<Coeff>> = vec![None; g_count];
        let mut mats: Vec<CMatrix> = vec![CMatrix::zeros(0, 0); g_count];
        for i in 0..m {
            for j in 0..m {
                let e = l_entry(i, j, &Affine::z(0), n, m, ctx.tau(), conv);
                let f = l_entry(i, j, &Affine::z(1), n, m, ctx.tau(), conv);
                for ((alpha, s1), (_, s2)) in e.into_iter().zip(f) {
                    let g = super::Generator::new(j, i, alpha);
                    let k = space.generator_index(&g);
                    at_z1[k] = Some(single_coeff(&s1, &g)?);
                    at_z2[k] = Some(single_coeff(&s2, &g)?);
                    mats[k] = kron(&unit(i, j, m), &basis_t(alpha));
                }
            }
        }
        let at_z1: Vec<Coeff> = at_z1.into_iter().map(|s| s.expect("every generator appears")).collect();
        let at_z2: Vec<Coeff> = at_z2.into_iter().map(|s| s.expect("every generator appears")).collect();

        // c_x(z_a) c_y(z_b) in the twisted product evaluates c_y at the point
        // shifted by x, which depends on (x.first, x.second) only
        let eval_all = |cs: &[Coeff], p: &Point| -> Result<Vec<Complex64>> { cs.iter().map(|c| c.eval(ctx, p)).collect() };
        let plain1 = eval_all(&at_z1, &point)?;
        let plain2 = eval_all(&at_z2, &point)?;
        let mut shifted1 = Vec::with_capacity(m * m);
        let mut shifted2 = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let p = point.shifted(&super::Generator::new(a, b, LatticeIndex::zero(n)).shift(m));
                shifted1.push(eval_all(&at_z1, &p)?);
                shifted2.push(eval_all(&at_z2, &p)?);
            }
        }

        let r_left = r_slnm(ctx, n, params.hbar, z1 - z2, &params.q2, third)?;
        let mut r_right: HashMap<(usize, usize), CMatrix> = HashMap::new();

        let mut matrices = Vec::with_capacity(space.num_words());
        let mut scale = 0.0f64;
        let d = n * m * n * m;
        let mut entry_scale = DMatrix::<f64>::zeros(d, d);
        for xi in 0..g_count {
            let x = space.generator(xi);
            let sx = x.first * m + x.second;
            for yi in 0..g_count {
                let y = space.generator(yi);
                let lhs_c = plain1[xi] * shifted2[sx][yi];
                let rhs_c = plain2[xi] * shifted1[sx][yi];
                let key = (x.first, y.first);
                if let Entry::Vacant(e) = r_right.entry(key) {
                    let mut q = params.q1.clone();
                    q[x.first] += params.hbar;
                    q[y.first] += params.hbar;
                    e.insert(r_slnm(ctx, n, params.hbar, z1 - z2, &q, third)?);
                }
                let lhs = &r_left * kron(&mats[xi], &mats[yi]) * lhs_c;
                let rhs = kron(&mats[yi], &mats[xi]) * &r_right[&key] * rhs_c;
                for ((e, a), b) in entry_scale.iter_mut().zip(lhs.iter()).zip(rhs.iter()) {
                    *e = e.max(a.norm()).max(b.norm());
                }
                scale = scale.max(lhs.camax()).max(rhs.camax());
                matrices.push(lhs - rhs);
            }
        }
        Ok(Self {
            space,
            matrices,
            scale,
            entry_scale,
        })
    }

    pub fn space(&self) -> WordSpace {
        self.space
    }

    /// Defect matrix of the word with the given index.
    pub fn matrix(&self, word: usize) -> &CMatrix {
        &self.matrices[word]
    }

    /// Largest entry of either side over all words.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// One vector per matrix element of the defect, over words. A vector is
    /// dropped when it is at rounding level relative to the terms that
    /// produced it (entries span many orders of magnitude, so a global
    /// cutoff would discard genuine relations).
    pub fn vectors(&self) -> Vec<RelationVector> {
        let d = self.matrices.first().map_or(0, |x| x.nrows());
        let mut out = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let coords: Vec<Complex64> = self.matrices.iter().map(|x| x[(r, c)]).collect();
                let v = RelationVector::new(coords, format!("rll[{r},{c}]"));
                if v.norm() > 1e-11 * self.entry_scale[(r, c)] {
                    out.push(v);
                }
            }
        }
        out
    }
}

/// The coefficient of the single word [g] in an L-operator entry.
fn single_coeff(s: &NCSum, g: &super::Generator) -> Result<Coeff> {
    let mut terms = s.terms();
    match (terms.next(), terms.next()) {
        (Some((w, c)), None) if w.generators() == [*g] => Ok(c.clone()),
        _ => Err(Error::InvalidIndices(format!("L-operator entry for {g} is not a single generator term"))),
    }
}

/// Defect vectors of the RLL relation at one spectral pair.
pub fn rll_defect(
    ctx: &EllipticContext,
    n: usize,
    params: &DynamicalParams,
    z1: Complex64,
    z2: Complex64,
    conv: LConvention,
    third: ThirdTerm,
) -> Result<Vec<RelationVector>> {
    Ok(DefectTable::compute(ctx, n, params, z1, z2, conv, third)?.vectors())
}

#[derive(Clone, Debug)]
pub struct FactorizationReport {
    /// Largest change of the divided coefficients across spectral samples,
    /// relative to their largest magnitude.
    pub variation: f64,
    /// The divided coefficients at the first sample.
    pub ratio: RelationVector,
}

/// Takes the (E_ij)_a (E_ik)_b block of the defect, projects it on
/// T_α ⊗ T_β and divides by θ(z2 + q2_i − q1_k + ω_β) θ(z1 + q2_i − q1_j + ħ + ω_α)
/// (and the exponential factors of the ansatz). Indices from 0.
#[allow(clippy::too_many_arguments)]
pub fn block_factorization_check(
    ctx: &EllipticContext,
    n: usize,
    (i, j, k): (usize, usize, usize),
    alpha: LatticeIndex,
    beta: LatticeIndex,
    params: &DynamicalParams,
    z_samples: &[(Complex64, Complex64)],
    conv: LConvention,
    third: ThirdTerm,
) -> Result<FactorizationReport> {
    let m = params.m();
    if m < 2 {
        return Err(Error::NotApplicable("the block needs two distinct second indices"));
    }
    if j == k || i >= m || j >= m || k >= m {
        return Err(Error::InvalidIndices(format!("(i,j,k) = ({i},{j},{k}) with M = {m}")));
    }
    if z_samples.is_empty() {
        return Err(Error::EmptyInput("spectral samples"));
    }
    let tau = ctx.tau();
    let d = n * m;
    let tinv = kron(&basis_t(alpha).adjoint(), &basis_t(beta).adjoint());
    let mut samples: Vec<Vec<Complex64>> = Vec::with_capacity(z_samples.len());
    for &(z1, z2) in z_samples {
        let table = DefectTable::compute(ctx, n, params, z1, z2, conv, third)?;
        let mut pref = ctx.theta(z2 + params.q2[i] - params.q1[k] + beta.omega(tau))?
            * ctx.theta(z1 + params.q2[i] - params.q1[j] + params.hbar + alpha.omega(tau))?;
        if conv.exp_factor {
            pref *= (2.0 * PI * I * (alpha.a2() as f64 * z1 + beta.a2() as f64 * z2) / n as f64).exp();
        }
        if pref.norm() < 1e-8 {
            return Err(Error::PrefactorNearZero(pref.norm()));
        }
        let words = table.space().num_words();
        let mut v = Vec::with_capacity(words);
        for w in 0..words {
            let x = table.matrix(w);
            let block = CMatrix::from_fn(n * n, n * n, |r, c| {
                let (r1, r2) = (r / n, r % n);
                let (c1, c2) = (c / n, c % n);
                x[((i * n + r1) * d + i * n + r2, (j * n + c1) * d + k * n + c2)]
            });
            v.push((&tinv * block).trace() / (n * n) as f64 / pref);
        }
        samples.push(v);
    }
    let base = &samples[0];
    let peak = base.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let variation = samples
        .iter()
        .flat_map(|s| s.iter().zip(base).map(|(a, b)| (a - b).norm()))
        .fold(0.0, f64::max)
        / peak;
    Ok(FactorizationReport {
        variation,
        ratio: RelationVector::new(samples.swap_remove(0), format!("block({i},{j},{k};{alpha},{beta})")),
    })
}
