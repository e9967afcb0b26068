//! Span comparisons of relation vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncalgebra::RelationVector;

pub const RANK_THRESHOLD: f64 = 1e-8;

/// Orthonormal basis of the span of a set of vectors.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    u: DMatrix<Complex64>,
    pivots: Vec<f64>,
}

impl SpanBasis {
    /// Vectors are normalized first, then reduced by column-pivoted QR;
    /// directions whose pivot |R_kk| falls below `RANK_THRESHOLD · |R_00|`
    /// are dropped. (The bidiagonal SVD of nalgebra loses accuracy on these
    /// highly rank-deficient matrices, pivoted QR does not.)
    pub fn new(vectors: &[RelationVector]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyInput("relation vectors"))?;
        let len = first.coords.len();
        let cols: Vec<&RelationVector> = vectors.iter().filter(|v| v.norm() > 0.0).collect();
        for v in &cols {
            if v.coords.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: v.coords.len(),
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("relation vector"));
            }
        }
        if cols.is_empty() {
            return Ok(Self {
                u: DMatrix::zeros(len, 0),
                pivots: Vec::new(),
            });
        }
        let a = DMatrix::from_fn(len, cols.len(), |r, c| cols[c].coords[r] / cols[c].norm());
        let qr = a.col_piv_qr();
        let r = qr.r();
        let pivots: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|k| r[(k, k)].norm()).collect();
        let top = pivots[0];
        let rank = pivots.iter().take_while(|&&p| p > RANK_THRESHOLD * top).count();
        let u = qr.q().columns(0, rank).into_owned();
        Ok(Self { u, pivots })
    }

    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// |R_kk| of the pivoted factorization, non-increasing.
    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    /// ‖v̂ − UU*v̂‖ for the normalized v.
    pub fn residual(&self, v: &RelationVector) -> f64 {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let x = DMatrix::from_fn(v.coords.len(), 1, |r, _| v.coords[r] / norm);
        let proj = &self.u * (self.u.adjoint() * &x);
        (x - proj).norm()
    }

    /// Sine of the largest principal angle between two spans; 1 when the
    /// ranks differ.
    pub fn max_angle_sine(&self, other: &SpanBasis) -> f64 {
        if self.rank() != other.rank() {
            return 1.0;
        }
        if self.rank() == 0 {
            return 0.0;
        }
        let perp = &self.u - &other.u * (other.u.adjoint() * &self.u);
        let gram = perp.adjoint() * &perp;
        gram.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
    }
}

pub fn rank(vectors: &[RelationVector]) -> Result<usize> {
    Ok(SpanBasis::new(vectors)?.rank())
}

/// Largest residual of a vector of `a` against span(b).
pub fn inclusion_residual(a: &[RelationVector], b: &SpanBasis) -> f64 {
    a.iter().map(|v| b.residual(v)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanComparison {
    pub equal: bool,
    /// Worst inclusion residual in either direction.
    pub metric: f64,
    pub a_in_b: f64,
    pub b_in_a: f64,
    pub rank_a: usize,
    pub rank_b: usize,
}

/// Mutual inclusion test.
pub fn span_equal(a: &[RelationVector], b: &[RelationVector], tol: f64) -> Result<SpanComparison> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("span comparison"));
    }
    let ba = SpanBasis::new(a)?;
    let bb = SpanBasis::new(b)?;
    let a_in_b = inclusion_residual(a, &bb);
    let b_in_a = inclusion_residual(b, &ba);
    let metric = a_in_b.max(b_in_a);
    Ok(SpanComparison {
        equal: metric < tol,
        metric,
        a_in_b,
        b_in_a,
        rank_a: ba.rank(),
        rank_b: bb.rank(),
    })
}

/// Best λ with v ≈ λw and the relative misfit ‖v − λw‖/‖v‖.
pub fn proportionality(v: &RelationVector, w: &RelationVector) -> (Complex64, f64) {
    let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
    let ww = dot(&w.coords, &w.coords);
    if ww.norm() == 0.0 {
        return (Complex64::new(0.0, 0.0), 1.0);
    }
    let lambda = dot(&w.coords, &v.coords) / ww;
    let misfit = v
        .coords
        .iter()
        .zip(&w.coords)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (lambda, misfit / v.norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(xs: &[(f64, f64)]) -> RelationVector {
        RelationVector::new(xs.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), "t")
    }

    #[test]
    fn identical_and_scaled_sets() {
        let a = vec![rv(&[(1.0, 0.0), (0.0, 1.0), (2.0, 0.0)]), rv(&[(0.0, 0.0), (1.0, 0.0), (0.0, -1.0)])];
        let r = span_equal(&a, &a, 1e-8).unwrap();
        assert!(r.equal && r.metric < 1e-14 && r.rank_a == 2);
        let v = vec![rv(&[(1.0, 2.0), (3.0, 0.0)])];
        let w = vec![rv(&[(2.0, 4.0), (6.0, 0.0)])];
        assert!(span_equal(&v, &w, 1e-8).unwrap().equal);
    }

    #[test]
    fn detects_missing_direction() {
        let a = vec![rv(&[(1.0, 0.0), (0.0, 0.0)]), rv(&[(0.0, 0.0), (1.0, 0.0)])];
        let b = vec![rv(&[(1.0, 0.0), (0.0, 0.0)])];
        let r = span_equal(&a, &b, 1e-8).unwrap();
        assert!(!r.equal);
        assert!((r.a_in_b - 1.0).abs() < 1e-14);
        assert!(r.b_in_a < 1e-14);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(matches!(span_equal(&[], &[rv(&[(1.0, 0.0)])], 1e-8), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn rank_counts_dependencies() {
        let a = vec![
            rv(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]),
            rv(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)]),
            rv(&[(1.0, 0.0), (2.0, 0.0), (1.0, 0.0)]),
        ];
        assert_eq!(rank(&a).unwrap(), 2);
    }

    #[test]
    fn principal_angle_of_rotated_plane() {
        let t: f64 = 0.3;
        let a = SpanBasis::new(&[rv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])]).unwrap();
        let b = SpanBasis::new(&[rv(&[(t.cos(), 0.0), (t.sin(), 0.0), (0.0, 0.0)])]).unwrap();
        assert!((a.max_angle_sine(&b) - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn proportional_vectors() {
        let w = rv(&[(1.0, 1.0), (0.0, 2.0)]);
        let v = RelationVector::new(w.coords.iter().map(|c| c * Complex64::new(0.5, -2.0)).collect(), "v");
        let (l, misfit) = proportionality(&v, &w);
        assert!((l - Complex64::new(0.5, -2.0)).norm() < 1e-14 && misfit < 1e-14);
    }

    proptest! {
        #[test]
        fn combinations_stay_inside(
            coeffs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3),
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let basis: Vec<RelationVector> = (0..3)
                .map(|_| RelationVector::new((0..6).map(|_| Complex64::new(rng.random(), rng.random())).collect(), "b"))
                .collect();
            let mut combo = vec![Complex64::new(0.0, 0.0); 6];
            for (b, &(re, im)) in basis.iter().zip(&coeffs) {
                for (c, x) in combo.iter_mut().zip(&b.coords) {
                    *c += Complex64::new(re, im) * x;
                }
            }
            let combo = RelationVector::new(combo, "c");
            prop_assume!(combo.norm() > 1e-3);
            let span = SpanBasis::new(&basis).unwrap();
            prop_assert!(span.residual(&combo) < 1e-10);
        }
    }
}
