//! Deferred coefficient functions of the dynamical coordinates.
//!
//! A coefficient is a sum of monomials; a monomial is a constant times a
//! product of elliptic factors, each evaluated at an affine combination of
//! the variables. Shifting q by ħ multiples is exact and symbolic, so
//! normal ordering never evaluates anything early.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q1(usize),
    Q2(usize),
    Hbar,
    /// Spectral parameter z_k.
    Z(usize),
}

/// c + Σ a_v v.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Affine {
    constant: Complex64,
    terms: BTreeMap<Var, Complex64>,
}

impl Affine {
    pub fn constant(c: Complex64) -> Self {
        Self {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, ONE);
        Self { constant: ZERO, terms }
    }

    pub fn q1(k: usize) -> Self {
        Self::var(Var::Q1(k))
    }

    pub fn q2(k: usize) -> Self {
        Self::var(Var::Q2(k))
    }

    pub fn hbar() -> Self {
        Self::var(Var::Hbar)
    }

    pub fn z(k: usize) -> Self {
        Self::var(Var::Z(k))
    }

    pub fn plus(mut self, c: Complex64) -> Self {
        self.constant += c;
        self
    }

    pub fn scale(mut self, s: Complex64) -> Self {
        self.constant *= s;
        for v in self.terms.values_mut() {
            *v *= s;
        }
        self.prune();
        self
    }

    pub fn coefficient(&self, v: Var) -> Complex64 {
        self.terms.get(&v).copied().unwrap_or(ZERO)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != ZERO);
    }

    /// Substitutes q1_k → q1_k + n1_k ħ and q2_k → q2_k + n2_k ħ.
    pub fn shifted(&self, shift: &Shift) -> Self {
        let mut out = self.clone();
        let mut extra = ZERO;
        for (v, c) in &self.terms {
            let n = match v {
                Var::Q1(k) => shift.q1.get(*k).copied().unwrap_or(0),
                Var::Q2(k) => shift.q2.get(*k).copied().unwrap_or(0),
                _ => 0,
            };
            extra += c * n as f64;
        }
        if extra != ZERO {
            *out.terms.entry(Var::Hbar).or_insert(ZERO) += extra;
            out.prune();
        }
        out
    }

    pub fn eval(&self, point: &Point) -> Result<Complex64> {
        let mut acc = self.constant;
        for (v, c) in &self.terms {
            acc += c * point.value(*v)?;
        }
        Ok(acc)
    }
}

impl Add for Affine {
    type Output = Affine;
    fn add(mut self, rhs: Affine) -> Affine {
        self.constant += rhs.constant;
        for (v, c) in rhs.terms {
            *self.terms.entry(v).or_insert(ZERO) += c;
        }
        self.prune();
        self
    }
}

impl Sub for Affine {
    type Output = Affine;
    fn sub(self, rhs: Affine) -> Affine {
        self + (-rhs)
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        self.scale(-ONE)
    }
}

/// Number of ħ added to each coordinate of the two blocks.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Shift {
    pub q1: Vec<i64>,
    pub q2: Vec<i64>,
}

impl Shift {
    pub fn zero(m: usize) -> Self {
        Self {
            q1: vec![0; m],
            q2: vec![0; m],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q1.iter().chain(&self.q2).all(|&n| n == 0)
    }

    pub fn compose(&self, other: &Shift) -> Shift {
        let add = |a: &[i64], b: &[i64]| {
            let n = a.len().max(b.len());
            (0..n)
                .map(|k| a.get(k).copied().unwrap_or(0) + b.get(k).copied().unwrap_or(0))
                .collect()
        };
        Shift {
            q1: add(&self.q1, &other.q1),
            q2: add(&self.q2, &other.q2),
        }
    }
}

/// Numeric values of every variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub q1: Vec<Complex64>,
    pub q2: Vec<Complex64>,
    pub hbar: Complex64,
    pub z: Vec<Complex64>,
}

impl Point {
    pub fn value(&self, v: Var) -> Result<Complex64> {
        let get = |xs: &[Complex64], k: usize| {
            xs.get(k).copied().ok_or(Error::IndexOutOfRange {
                index: k,
                bound: xs.len(),
            })
        };
        match v {
            Var::Q1(k) => get(&self.q1, k),
            Var::Q2(k) => get(&self.q2, k),
            Var::Hbar => Ok(self.hbar),
            Var::Z(k) => get(&self.z, k),
        }
    }

    /// The point with q moved by `shift` ħ-steps.
    pub fn shifted(&self, shift: &Shift) -> Point {
        let mv = |xs: &[Complex64], n: &[i64]| {
            xs.iter()
                .enumerate()
                .map(|(k, x)| x + self.hbar * n.get(k).copied().unwrap_or(0) as f64)
                .collect()
        };
        Point {
            q1: mv(&self.q1, &shift.q1),
            q2: mv(&self.q2, &shift.q2),
            hbar: self.hbar,
            z: self.z.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Theta(Affine),
    Phi(Affine, Affine),
    E1(Affine),
    E2(Affine),
    Exp(Affine),
}

impl Factor {
    pub fn shifted(&self, s: &Shift) -> Factor {
        match self {
            Factor::Theta(a) => Factor::Theta(a.shifted(s)),
            Factor::Phi(a, b) => Factor::Phi(a.shifted(s), b.shifted(s)),
            Factor::E1(a) => Factor::E1(a.shifted(s)),
            Factor::E2(a) => Factor::E2(a.shifted(s)),
            Factor::Exp(a) => Factor::Exp(a.shifted(s)),
        }
    }

    pub fn eval(&self, ctx: &EllipticContext, p: &Point) -> Result<Complex64> {
        match self {
            Factor::Theta(a) => ctx.theta(a.eval(p)?),
            Factor::Phi(a, b) => ctx.kronecker_phi(a.eval(p)?, b.eval(p)?),
            Factor::E1(a) => ctx.eisenstein_e1(a.eval(p)?),
            Factor::E2(a) => ctx.eisenstein_e2(a.eval(p)?),
            Factor::Exp(a) => Ok(a.eval(p)?.exp()),
        }
    }
}

/// scalar · Π factor^power.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub scalar: Complex64,
    pub factors: Vec<(Factor, i32)>,
}

impl Monomial {
    pub fn shifted(&self, s: &Shift) -> Monomial {
        Monomial {
            scalar: self.scalar,
            factors: self.factors.iter().map(|(f, p)| (f.shifted(s), *p)).collect(),
        }
    }

    pub fn eval(&self, ctx: &EllipticContext, p: &Point) -> Result<Complex64> {
        let mut acc = self.scalar;
        for (f, pow) in &self.factors {
            acc *= f.eval(ctx, p)?.powi(*pow);
        }
        Ok(acc)
    }
}

/// A deferred coefficient: a sum of monomials.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Coeff(pub Vec<Monomial>);

impl Coeff {
    pub fn constant(c: Complex64) -> Self {
        Coeff(vec![Monomial {
            scalar: c,
            factors: Vec::new(),
        }])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn factor(f: Factor) -> Self {
        Self::power(f, 1)
    }

    pub fn power(f: Factor, pow: i32) -> Self {
        Coeff(vec![Monomial {
            scalar: ONE,
            factors: vec![(f, pow)],
        }])
    }

    pub fn theta(a: Affine) -> Self {
        Self::factor(Factor::Theta(a))
    }

    pub fn phi(a: Affine, b: Affine) -> Self {
        Self::factor(Factor::Phi(a, b))
    }

    pub fn e1(a: Affine) -> Self {
        Self::factor(Factor::E1(a))
    }

    pub fn e2(a: Affine) -> Self {
        Self::factor(Factor::E2(a))
    }

    pub fn exp(a: Affine) -> Self {
        Self::factor(Factor::Exp(a))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shifted(&self, s: &Shift) -> Coeff {
        if s.is_zero() {
            return self.clone();
        }
        Coeff(self.0.iter().map(|m| m.shifted(s)).collect())
    }

    pub fn scale(mut self, c: Complex64) -> Coeff {
        for m in &mut self.0 {
            m.scalar *= c;
        }
        self
    }

    pub fn eval(&self, ctx: &EllipticContext, p: &Point) -> Result<Complex64> {
        let mut acc = ZERO;
        for m in &self.0 {
            acc += m.eval(ctx, p)?;
        }
        if !acc.re.is_finite() || !acc.im.is_finite() {
            return Err(Error::NonFinite("coefficient"));
        }
        Ok(acc)
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(mut self, rhs: Coeff) -> Coeff {
        self.0.extend(rhs.0);
        self
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        self + rhs.scale(-ONE)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        let mut out = Vec::with_capacity(self.0.len() * rhs.0.len());
        for a in &self.0 {
            for b in &rhs.0 {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                out.push(Monomial {
                    scalar: a.scalar * b.scalar,
                    factors,
                });
            }
        }
        Coeff(out)
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        &self * &rhs
    }
}
