//! Dense operators on ordered tensor products, the Heisenberg basis T_α and
//! matrix units.
//!
//! Tensor slots are numbered from 0. Multi-indices are row-major: the first
//! slot is the most significant digit, matching `kronecker`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::elliptic::{LatticeIndex, Lift};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Operator on C^{d_0} ⊗ … ⊗ C^{d_{k-1}}.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    dims: Vec<usize>,
    data: CMatrix,
}

impl TensorOperator {
    pub fn new(dims: Vec<usize>, data: CMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if data.nrows() != total || data.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let total = dims.iter().product();
        Self {
            dims,
            data: CMatrix::identity(total, total),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let total = dims.iter().product();
        Self {
            dims,
            data: CMatrix::zeros(total, total),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn total_dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.norm()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: &self.data * c,
        }
    }

    /// Places `op` on `slots` (in the given order) and the identity
    /// elsewhere.
    pub fn embed(op: &CMatrix, slots: &[usize], dims: &[usize]) -> Result<Self> {
        let k = dims.len();
        let mut seen = vec![false; k];
        for &s in slots {
            if s >= k {
                return Err(Error::IndexOutOfRange { index: s, bound: k });
            }
            if seen[s] {
                return Err(Error::InvalidPermutation(slots.to_vec()));
            }
            seen[s] = true;
        }
        let op_dim: usize = slots.iter().map(|&s| dims[s]).product();
        if op.nrows() != op_dim || op.ncols() != op_dim {
            return Err(Error::DimensionMismatch {
                expected: op_dim,
                found: op.nrows(),
            });
        }
        let strides = strides(dims);
        let rest: Vec<usize> = (0..k).filter(|s| !seen[*s]).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&s| dims[s]).collect();
        let slot_dims: Vec<usize> = slots.iter().map(|&s| dims[s]).collect();
        let rest_total: usize = rest_dims.iter().product();

        // Full-space offset contributed by each op index.
        let op_offset: Vec<usize> = (0..op_dim)
            .map(|i| {
                digits(i, &slot_dims)
                    .iter()
                    .zip(slots)
                    .map(|(d, &s)| d * strides[s])
                    .sum()
            })
            .collect();

        let total: usize = dims.iter().product();
        let mut data = CMatrix::zeros(total, total);
        for r in 0..rest_total {
            let base: usize = digits(r, &rest_dims)
                .iter()
                .zip(&rest)
                .map(|(d, &s)| d * strides[s])
                .sum();
            for i in 0..op_dim {
                for j in 0..op_dim {
                    let v = op[(i, j)];
                    if v != ZERO {
                        data[(base + op_offset[i], base + op_offset[j])] = v;
                    }
                }
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    /// Moves old slot `s` to position `perm[s]`.
    pub fn permute_components(&self, perm: &[usize]) -> Result<Self> {
        let k = self.dims.len();
        let mut check = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut check[p], true)) {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        let mut new_dims = vec![0; k];
        for (s, &p) in perm.iter().enumerate() {
            new_dims[p] = self.dims[s];
        }
        let new_strides = strides(&new_dims);
        let map: Vec<usize> = (0..self.total_dim())
            .map(|i| {
                digits(i, &self.dims)
                    .iter()
                    .zip(perm)
                    .map(|(d, &p)| d * new_strides[p])
                    .sum()
            })
            .collect();
        let n = self.total_dim();
        let mut data = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                data[(map[i], map[j])] = self.data[(i, j)];
            }
        }
        Ok(Self {
            dims: new_dims,
            data,
        })
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dims, other.dims, "tensor operators on different spaces");
    }
}

impl Mul for &TensorOperator {
    type Output = TensorOperator;
    fn mul(self, rhs: Self) -> TensorOperator {
        self.check_same(rhs);
        TensorOperator {
            dims: self.dims.clone(),
            data: &self.data * &rhs.data,
        }
    }
}

impl Add for &TensorOperator {
    type Output = TensorOperator;
    fn add(self, rhs: Self) -> TensorOperator {
        self.check_same(rhs);
        TensorOperator {
            dims: self.dims.clone(),
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &TensorOperator {
    type Output = TensorOperator;
    fn sub(self, rhs: Self) -> TensorOperator {
        self.check_same(rhs);
        TensorOperator {
            dims: self.dims.clone(),
            data: &self.data - &rhs.data,
        }
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in dims.iter().enumerate().rev() {
        out[slot] = index % d;
        index /= d;
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let mut it = factors.iter();
    let first = (*it.next().expect("at least one factor")).clone();
    it.fold(first, |acc, f| acc.kronecker(*f))
}

/// E_ij with 1-based indices.
pub fn matrix_unit(i: usize, j: usize, m: usize) -> Result<CMatrix> {
    for idx in [i, j] {
        if idx == 0 || idx > m {
            return Err(Error::IndexOutOfRange { index: idx, bound: m + 1 });
        }
    }
    Ok(unit(i - 1, j - 1, m))
}

/// E_ij with 0-based indices.
pub fn unit(i: usize, j: usize, m: usize) -> CMatrix {
    let mut e = CMatrix::zeros(m, m);
    e[(i, j)] = ONE;
    e
}

/// Q = diag(e^{2πik/N}).
pub fn clock(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
        } else {
            ZERO
        }
    })
}

/// Λ with Λ_{j,j+1 mod N} = 1.
pub fn shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| if c == (r + 1) % n { ONE } else { ZERO })
}

/// T_α = e^{πiα₁α₂/N} Q^{α₁} Λ^{α₂}, evaluated on the given representative.
/// Representatives of one class differ by a sign.
pub fn basis_t(alpha: impl Into<Lift>) -> CMatrix {
    let a: Lift = alpha.into();
    let n = a.order();
    let nf = n as f64;
    let pre = Complex64::from_polar(1.0, PI * (a.a1 * a.a2) as f64 / nf);
    let s = a.a2.rem_euclid(n as i64) as usize;
    let p = a.a1.rem_euclid(n as i64) as f64;
    CMatrix::from_fn(n, n, |r, c| {
        if c == (r + s) % n {
            pre * Complex64::from_polar(1.0, 2.0 * PI * p * r as f64 / nf)
        } else {
            ZERO
        }
    })
}

/// κ_{αβ} = exp(πi/N (β₁α₂ − β₂α₁)).
pub fn kappa(alpha: impl Into<Lift>, beta: impl Into<Lift>) -> Complex64 {
    let a: Lift = alpha.into();
    let b: Lift = beta.into();
    let n = a.order() as f64;
    Complex64::from_polar(1.0, PI / n * (b.a1 * a.a2 - b.a2 * a.a1) as f64)
}

/// Coefficient of T_α in the expansion of an N×N matrix: tr(T_α^{-1} X)/N.
pub fn t_coefficient(alpha: LatticeIndex, x: &CMatrix) -> Complex64 {
    let t = basis_t(alpha);
    (t.adjoint() * x).trace() / alpha.order() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random(), rng.random()))
    }

    #[test]
    fn clock_and_shift_relations() {
        for n in 2..5 {
            let q = clock(n);
            let l = shift(n);
            let id = CMatrix::identity(n, n);
            let mut qn = id.clone();
            let mut ln = id.clone();
            for _ in 0..n {
                qn = &qn * &q;
                ln = &ln * &l;
            }
            assert!(close(&qn, &id, 1e-13));
            assert!(close(&ln, &id, 1e-13));
            let w = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
            assert!(close(&(&l * &q), &(&q * &l * w), 1e-14));
        }
    }

    #[test]
    fn basis_t_identity_and_trace() {
        for n in 1..5 {
            assert!(close(&basis_t(LatticeIndex::zero(n)), &CMatrix::identity(n, n), 0.0));
            for a in LatticeIndex::all(n) {
                let tr = basis_t(a).trace();
                let want = if a.is_zero() { n as f64 } else { 0.0 };
                assert!((tr - want).norm() < 1e-13, "{a}");
            }
        }
    }

    #[test]
    fn heisenberg_law_on_lifts() {
        for n in 2..4 {
            for a in LatticeIndex::all(n) {
                for b in LatticeIndex::all(n) {
                    let lhs = basis_t(a) * basis_t(b);
                    let rhs = basis_t(a.lift() + b.lift()) * kappa(a, b);
                    assert!(close(&lhs, &rhs, 1e-13), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn negation_is_inverse() {
        for n in 2..5 {
            for a in LatticeIndex::all(n) {
                let p = basis_t(a) * basis_t(-a.lift());
                assert!(close(&p, &CMatrix::identity(n, n), 1e-13));
            }
        }
    }

    #[test]
    fn lift_sign_matches_direct_evaluation() {
        for n in 2..5usize {
            let ni = n as i64;
            for a1 in -2 * ni..2 * ni {
                for a2 in -2 * ni..2 * ni {
                    let l = Lift::new(a1, a2, n);
                    let want = basis_t(l.class()) * Complex64::from(l.heisenberg_sign());
                    assert!(close(&basis_t(l), &want, 1e-13), "{l}");
                }
            }
        }
    }

    #[test]
    fn trace_orthogonality() {
        for n in 2..4 {
            for a in LatticeIndex::all(n) {
                for b in LatticeIndex::all(n) {
                    let tr = (basis_t(a) * basis_t(b)).trace();
                    let want = if (a + b).is_zero() {
                        kappa(a, b) * basis_t(a.lift() + b.lift()).trace()
                    } else {
                        ZERO
                    };
                    assert!((tr - want).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn kappa_examples() {
        let n = 2;
        let z = LatticeIndex::zero(n);
        let b = LatticeIndex::new(1, 1, n);
        assert!((kappa(z, b) - ONE).norm() < 1e-15);
        let e1 = LatticeIndex::new(1, 0, n);
        let e2 = LatticeIndex::new(0, 1, n);
        assert!((kappa(e1, e2) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        for a in LatticeIndex::all(3) {
            for b in LatticeIndex::all(3) {
                assert!((kappa(a, b) * kappa(b, a) - ONE).norm() < 1e-14);
                assert!((kappa(a, b).norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn t_coefficients_expand() {
        let n = 3;
        let x = random_matrix(n, 3);
        let mut rebuilt = CMatrix::zeros(n, n);
        for a in LatticeIndex::all(n) {
            rebuilt += basis_t(a) * t_coefficient(a, &x);
        }
        assert!(close(&rebuilt, &x, 1e-13));
    }

    #[test]
    fn matrix_units() {
        let m = 3;
        let e11 = matrix_unit(1, 1, m).unwrap();
        assert_eq!(&e11 * &e11, e11);
        for i in 1..=m {
            for j in 1..=m {
                for k in 1..=m {
                    for l in 1..=m {
                        let p = matrix_unit(i, j, m).unwrap() * matrix_unit(k, l, m).unwrap();
                        let want = if j == k { matrix_unit(i, l, m).unwrap() } else { CMatrix::zeros(m, m) };
                        assert_eq!(p, want);
                    }
                }
            }
        }
        let sum = (1..=m).fold(CMatrix::zeros(m, m), |acc, i| acc + matrix_unit(i, i, m).unwrap());
        assert_eq!(sum, CMatrix::identity(m, m));
        assert!(matches!(matrix_unit(0, 1, m), Err(Error::IndexOutOfRange { .. })));
        assert!(matrix_unit(1, 4, m).is_err());
    }

    // Index-by-index construction of A ⊗ 1 ⊗ B.
    fn oracle_a1b(a: &CMatrix, b: &CMatrix, n: usize) -> CMatrix {
        let d = n * n * n;
        CMatrix::from_fn(d, d, |r, c| {
            let (r0, r1, r2) = (r / (n * n), (r / n) % n, r % n);
            let (c0, c1, c2) = (c / (n * n), (c / n) % n, c % n);
            if r1 == c1 {
                a[(r0, c0)] * b[(r2, c2)]
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn embed_examples() {
        let n = 2;
        let dims = [n, n, n];
        let a = random_matrix(n, 1);
        let b = random_matrix(n, 2);
        let id = CMatrix::identity(n, n);
        let e = TensorOperator::embed(&a, &[0], &dims).unwrap();
        assert!(close(e.data(), &kron_all(&[&a, &id, &id]), 0.0));
        let e = TensorOperator::embed(&kron(&a, &b), &[0, 2], &dims).unwrap();
        assert!(close(e.data(), &oracle_a1b(&a, &b, n), 1e-15));
        let e = TensorOperator::embed(&id, &[1], &dims).unwrap();
        assert!(close(e.data(), &CMatrix::identity(8, 8), 0.0));
        // reversed slot order transposes the factors
        let e = TensorOperator::embed(&kron(&b, &a), &[2, 0], &dims).unwrap();
        assert!(close(e.data(), &oracle_a1b(&a, &b, n), 1e-15));
    }

    #[test]
    fn embed_errors() {
        let a = CMatrix::identity(3, 3);
        assert!(matches!(
            TensorOperator::embed(&a, &[0], &[2, 2]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(TensorOperator::embed(&a, &[5], &[3, 3]).is_err());
        assert!(TensorOperator::embed(&CMatrix::identity(9, 9), &[0, 0], &[3, 3]).is_err());
    }

    #[test]
    fn permute_examples() {
        let dims = [2, 3, 2];
        let a = random_matrix(2, 4);
        let op = TensorOperator::embed(&a, &[0], &dims).unwrap();
        assert_eq!(op.permute_components(&[0, 1, 2]).unwrap(), op);
        let moved = op.permute_components(&[2, 1, 0]).unwrap();
        assert_eq!(moved, TensorOperator::embed(&a, &[2], &dims).unwrap());
        let full = TensorOperator::new(dims.to_vec(), random_matrix(12, 5)).unwrap();
        let swap = [1, 0, 2];
        let twice = full.permute_components(&swap).unwrap().permute_components(&swap).unwrap();
        assert!(close(twice.data(), full.data(), 0.0));
        assert_eq!(full.permute_components(&swap).unwrap().dims(), &[3, 2, 2]);
        assert!(matches!(
            full.permute_components(&[0, 0, 1]),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn embed_then_permute_consistent() {
        let dims = [2, 3, 2, 3];
        let x = random_matrix(6, 9);
        // x on slots (0,1), then send 0→2, 1→3
        let direct = TensorOperator::embed(&x, &[2, 3], &dims).unwrap();
        let via = TensorOperator::embed(&x, &[0, 1], &dims)
            .unwrap()
            .permute_components(&[2, 3, 0, 1])
            .unwrap();
        assert!(close(direct.data(), via.data(), 1e-14));
        let cyc = TensorOperator::embed(&x, &[1, 2], &[2, 2, 3, 3]).unwrap();
        let via = TensorOperator::embed(&x, &[0, 3], &[2, 2, 3, 3])
            .unwrap()
            .permute_components(&[1, 0, 3, 2])
            .unwrap();
        assert_eq!(via.dims(), &[2, 2, 3, 3]);
        assert!(close(cyc.data(), via.data(), 1e-14));
    }
}
