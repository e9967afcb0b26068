//! One trial of each named check.

use num_complex::Complex64;

use super::sampler::{Constraints, Sampler};
use super::CheckKind;
use crate::elliptic::{EllipticContext, LatticeIndex};
use crate::error::{Error, Result};
use crate::expr::{Affine, Point};
use crate::ncalgebra::{rll_defect, LConvention, RelationVector, WordSpace};
use crate::relations::{
    max_representation_residual, relation_vectors_all, sklyanin_relations, slnm_family_coeffs, tv_relation_vectors,
    Family, SklyaninForm, ZeroBetaReading,
};
use crate::rmatrix::{
    bb_reduction_residual, dybe_felder_trial, dybe_slnm_trial, felder_reduction_residual, ybe_trial, zero_weight_residual,
    DynamicalParams, ThirdTerm,
};
use crate::span::{inclusion_residual, span_equal, SpanBasis};

/// Spectral pairs per RLL trial.
pub const RLL_PAIRS: usize = 5;

#[derive(Clone, Copy, Debug)]
pub struct TrialSetup {
    pub n: usize,
    pub m: usize,
    pub conv: LConvention,
    pub third: ThirdTerm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub residual: f64,
    pub rank: Option<usize>,
}

impl TrialOutcome {
    fn plain(residual: f64) -> Self {
        Self { residual, rank: None }
    }
}

/// Sizes actually used by a check: some ignore N or M.
pub fn effective_sizes(kind: CheckKind, n: usize, m: usize) -> (usize, usize) {
    match kind {
        CheckKind::Fay => (1, 1),
        CheckKind::Ybe | CheckKind::SklyaninRep => (n, 1),
        CheckKind::DybeFelder | CheckKind::TvReduce => (1, m),
        _ => (n, m),
    }
}

pub fn constraints(kind: CheckKind, n: usize, m: usize) -> Constraints {
    let h = Affine::hbar;
    let two_h = || h().scale(Complex64::new(2.0, 0.0));
    let triple = [(0, 1), (0, 2), (1, 2)];
    match kind {
        CheckKind::Fay => {
            let z = Affine::z;
            Constraints::new(1, 1, 4)
                .with(z(0))
                .with(z(1))
                .with(z(2))
                .with(z(3))
                .with(z(0) - z(1))
                .with(z(2) + z(3))
                .with(z(0) + z(2))
                .with(z(1) + z(3))
                .with(z(0) - z(1) + z(2))
                .with(z(1) - z(0) + z(3))
                .with(z(1) + z(2) + z(3))
                .with(z(0) + z(2) + z(3))
        }
        CheckKind::Ybe => Constraints::new(n, 1, 3)
            .with(h())
            .with_spectral_differences(&triple),
        CheckKind::DybeFelder | CheckKind::DybeSlnm | CheckKind::BbReduce => Constraints::new(n, m, 3)
            .with(h())
            .with(two_h())
            .with(Affine::z(0))
            .with_q_differences()
            .with_spectral_differences(&triple),
        CheckKind::Rll => {
            let pairs: Vec<(usize, usize)> = (0..RLL_PAIRS).map(|k| (2 * k, 2 * k + 1)).collect();
            Constraints::new(n, m, 2 * RLL_PAIRS)
                .with(h())
                .with(two_h())
                .with_q_differences()
                .with_spectral_differences(&pairs)
        }
        CheckKind::Relations | CheckKind::TvReduce => {
            let mut c = Constraints::new(n, m, 0).with(h()).with(two_h()).with_q_differences();
            if kind == CheckKind::TvReduce {
                for i in 0..m {
                    for k in 0..m {
                        for j in 0..m {
                            for l in 0..m {
                                if i != k && j != l {
                                    c = c.with(Affine::q1(i) - Affine::q1(k) + Affine::q2(j) - Affine::q2(l));
                                }
                            }
                        }
                    }
                }
            }
            c
        }
        CheckKind::SklyaninRep => Constraints::new(n, 1, 1).with(h()).with(Affine::z(0)),
        CheckKind::All => Constraints::new(n, m, 0),
    }
}

fn params_of(p: &Point) -> DynamicalParams {
    DynamicalParams {
        hbar: p.hbar,
        q1: p.q1.clone(),
        q2: p.q2.clone(),
    }
}

/// Draws samples until one evaluates without meeting a pole.
pub fn run_trial(ctx: &EllipticContext, kind: CheckKind, setup: TrialSetup, sampler: &mut Sampler<'_>) -> Result<TrialOutcome> {
    loop {
        let p = sampler.next_point()?;
        match evaluate(ctx, kind, setup, &p) {
            Err(Error::PoleProximity { .. }) => sampler.reject()?,
            other => return other,
        }
    }
}

fn evaluate(ctx: &EllipticContext, kind: CheckKind, setup: TrialSetup, p: &Point) -> Result<TrialOutcome> {
    let TrialSetup { n, m, conv, third } = setup;
    let z = &p.z;
    let params = params_of(p);
    match kind {
        CheckKind::Fay => {
            let r = ctx
                .fay_residual(z[0], z[1], z[2], z[3])?
                .max(ctx.fay_degenerate_residual(z[0], z[2], z[3])?)
                .max(ctx.fay_e2_residual(z[0], z[2])?);
            Ok(TrialOutcome::plain(r))
        }
        CheckKind::Ybe => Ok(TrialOutcome::plain(ybe_trial(ctx, n, p.hbar, [z[0], z[1], z[2]])?.residual)),
        CheckKind::DybeFelder => {
            let d = dybe_felder_trial(ctx, &params, [z[0], z[1], z[2]])?.residual;
            let (comm, trans) = zero_weight_residual(ctx, p.hbar, z[0] - z[1], &p.q2, z[2])?;
            Ok(TrialOutcome::plain(d.max(comm).max(trans)))
        }
        CheckKind::DybeSlnm => Ok(TrialOutcome::plain(dybe_slnm_trial(ctx, n, &params, [z[0], z[1], z[2]], third)?.residual)),
        CheckKind::Rll => {
            let mut bases = Vec::with_capacity(RLL_PAIRS);
            let mut first = Vec::new();
            for k in 0..RLL_PAIRS {
                let v = rll_defect(ctx, n, &params, z[2 * k], z[2 * k + 1], conv, third)?;
                bases.push(SpanBasis::new(&v)?);
                if k == 0 {
                    first = v;
                }
            }
            let angle = bases[1..].iter().map(|b| bases[0].max_angle_sine(b)).fold(0.0, f64::max);
            let fam = relation_vectors_all(ctx, n, &params, third)?;
            let fam_basis = SpanBasis::new(&fam)?;
            let metric = inclusion_residual(&first, &fam_basis).max(inclusion_residual(&fam, &bases[0]));
            Ok(TrialOutcome {
                residual: metric.max(angle),
                rank: Some(bases[0].rank()),
            })
        }
        CheckKind::Relations => {
            let tau = ctx.tau();
            let space = WordSpace::new(n, m);
            let mut worst = 0.0f64;
            let mut rank = 0;
            for i in 0..m {
                for j in 0..m {
                    let eta = p.q2[i] - p.q1[j];
                    let mut fam = Vec::new();
                    for alpha in LatticeIndex::all(n) {
                        for beta in LatticeIndex::all(n) {
                            if alpha != beta {
                                fam.push(slnm_family_coeffs(ctx, Family::Sklyanin, &[i, j], alpha, beta, &params, third)?);
                            }
                        }
                    }
                    let mut skl = Vec::new();
                    for rel in sklyanin_relations(ctx, n, p.hbar, SklyaninForm::Eta(eta))? {
                        if rel.alpha == rel.beta {
                            continue;
                        }
                        let coords = rel.to_ncsum(j, i, m, tau)?.freeze_quadratic(ctx, p, &space)?;
                        skl.push(RelationVector::new(coords, "eta"));
                    }
                    if fam.is_empty() && skl.is_empty() {
                        continue;
                    }
                    let cmp = span_equal(&fam, &skl, f64::INFINITY)?;
                    worst = worst.max(cmp.metric);
                    if cmp.rank_a != cmp.rank_b {
                        worst = worst.max(1.0);
                    }
                    rank += cmp.rank_a;
                }
            }
            Ok(TrialOutcome {
                residual: worst,
                rank: Some(rank),
            })
        }
        CheckKind::SklyaninRep => {
            let forms = [
                SklyaninForm::Plain,
                SklyaninForm::Theta(ZeroBetaReading::AlphaMinusGamma),
                SklyaninForm::Eta(z[0]),
            ];
            let mut worst = 0.0f64;
            for f in forms {
                worst = worst.max(max_representation_residual(ctx, n, p.hbar, f)?);
            }
            Ok(TrialOutcome::plain(worst))
        }
        CheckKind::TvReduce => {
            let fam = relation_vectors_all(ctx, 1, &params, third)?;
            let tv = tv_relation_vectors(ctx, m, p)?;
            if fam.is_empty() && tv.is_empty() {
                return Ok(TrialOutcome {
                    residual: 0.0,
                    rank: Some(0),
                });
            }
            let cmp = span_equal(&fam, &tv, f64::INFINITY)?;
            Ok(TrialOutcome {
                residual: cmp.metric,
                rank: Some(cmp.rank_a),
            })
        }
        CheckKind::BbReduce => {
            let a = bb_reduction_residual(ctx, n, p.hbar, z[0], p.q1[0])?;
            let b = felder_reduction_residual(ctx, p.hbar, z[0], &p.q1)?;
            Ok(TrialOutcome::plain(a.max(b)))
        }
        CheckKind::All => Err(Error::InvalidConfig("`all` is not a single check".into())),
    }
}
