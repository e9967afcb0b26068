//! Relations of the small elliptic quantum group on t_{ij}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticContext, LatticeIndex};
use crate::error::Result;
use crate::expr::{Affine, Coeff, Factor, Point};
use crate::ncalgebra::{Generator, NCSum, RelationVector, Word, WordSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TVKind {
    /// t_ij t_ik = t_ik t_ij, j ≠ k.
    CommutingPair,
    /// t_ik t_jk = θ(q1_ij − ħ)/θ(q1_ij + ħ) t_jk t_ik, i ≠ j.
    SameSecondIndex,
    /// The three-term relation for i ≠ k, j ≠ l.
    Mixed,
}

#[derive(Clone, Debug)]
pub struct TVRelation {
    pub kind: TVKind,
    pub indices: Vec<usize>,
    pub sum: NCSum,
}

impl TVRelation {
    pub fn evaluate(&self, ctx: &EllipticContext, p: &Point) -> Result<RelationVector> {
        let space = WordSpace::new(1, self.sum.m());
        let coords = self.sum.freeze_quadratic(ctx, p, &space)?;
        let idx: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        Ok(RelationVector::new(coords, format!("{:?}({})", self.kind, idx.join(","))))
    }
}

fn word(m: usize, a: (usize, usize), b: (usize, usize)) -> Word {
    let z = LatticeIndex::zero(1);
    let _ = m;
    Word::new(vec![Generator::new(a.0, a.1, z), Generator::new(b.0, b.1, z)]).expect("quadratic")
}

fn theta_ratio(num: Affine, den: Affine) -> Coeff {
    Coeff::theta(num) * Coeff::power(Factor::Theta(den), -1)
}

/// The three families, as symbolic sums over quadratic words (indices
/// from 0; degenerate index choices are skipped).
pub fn tv_relations(m: usize) -> Vec<TVRelation> {
    let mut out = Vec::new();
    let one = Coeff::one();
    let minus = Coeff::constant(Complex64::new(-1.0, 0.0));
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if j != k {
                    let mut s = NCSum::zero(m);
                    s.add_term(word(m, (i, j), (i, k)), one.clone());
                    s.add_term(word(m, (i, k), (i, j)), minus.clone());
                    out.push(TVRelation {
                        kind: TVKind::CommutingPair,
                        indices: vec![i, j, k],
                        sum: s,
                    });
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if i != j {
                    let x = Affine::q1(i) - Affine::q1(j);
                    let r = theta_ratio(x.clone() - Affine::hbar(), x + Affine::hbar());
                    let mut s = NCSum::zero(m);
                    s.add_term(word(m, (i, k), (j, k)), one.clone());
                    s.add_term(word(m, (j, k), (i, k)), r.scale(Complex64::new(-1.0, 0.0)));
                    out.push(TVRelation {
                        kind: TVKind::SameSecondIndex,
                        indices: vec![i, j, k],
                        sum: s,
                    });
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    if i == k || j == l {
                        continue;
                    }
                    let a = Affine::q1(i) - Affine::q1(k);
                    let b = Affine::q2(j) - Affine::q2(l);
                    let mut s = NCSum::zero(m);
                    s.add_term(word(m, (i, j), (k, l)), theta_ratio(b.clone() - Affine::hbar(), b.clone()));
                    s.add_term(
                        word(m, (k, l), (i, j)),
                        theta_ratio(a.clone() - Affine::hbar(), a.clone()).scale(Complex64::new(-1.0, 0.0)),
                    );
                    let c = Coeff::theta(Affine::hbar())
                        * Coeff::theta(a.clone() + b.clone())
                        * Coeff::power(Factor::Theta(a), -1)
                        * Coeff::power(Factor::Theta(b), -1);
                    s.add_term(word(m, (i, l), (k, j)), c);
                    out.push(TVRelation {
                        kind: TVKind::Mixed,
                        indices: vec![i, j, k, l],
                        sum: s,
                    });
                }
            }
        }
    }
    out
}

/// Evaluated relation vectors for all three families.
pub fn tv_relation_vectors(ctx: &EllipticContext, m: usize, p: &Point) -> Result<Vec<RelationVector>> {
    tv_relations(m).iter().map(|r| r.evaluate(ctx, p)).collect()
}
