//! Free algebra on t_{ab}^α with the q-shift twist.
//!
//! Coefficients always stand to the left of words. Moving f(q) to the left
//! past t_{ab}^α turns it into f(q + σ), where σ adds ħ to q1_a and q2_b.

mod rll;

pub use rll::{block_factorization_check, rll_defect, DefectTable, FactorizationReport};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticContext, LatticeIndex, Lift};
use crate::error::{Error, Result};
use crate::expr::{Affine, Coeff, Point, Shift};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// t_{first, second}^α, indices from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub first: usize,
    pub second: usize,
    pub alpha: LatticeIndex,
}

impl Generator {
    pub fn new(first: usize, second: usize, alpha: LatticeIndex) -> Self {
        Self { first, second, alpha }
    }

    pub fn shift(&self, m: usize) -> Shift {
        let mut s = Shift::zero(m);
        s.q1[self.first] += 1;
        s.q2[self.second] += 1;
        s
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}{}^{}", self.first + 1, self.second + 1, self.alpha)
    }
}

/// Ordered product of generators, at most quadratic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Generator>);

pub const MAX_WORD_LEN: usize = 2;

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(gens: Vec<Generator>) -> Result<Self> {
        if gens.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong(gens.len()));
        }
        Ok(Word(gens))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shift(&self, m: usize) -> Shift {
        self.0.iter().fold(Shift::zero(m), |acc, g| acc.compose(&g.shift(m)))
    }

    fn concat(&self, other: &Word) -> Result<Word> {
        let mut g = self.0.clone();
        g.extend_from_slice(&other.0);
        Word::new(g)
    }
}

/// Finite sum Σ c_w(q) w in normal form.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NCSum {
    m: usize,
    terms: BTreeMap<Word, Coeff>,
}

impl NCSum {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(m: usize, c: Coeff) -> Self {
        let mut s = Self::zero(m);
        s.terms.insert(Word::empty(), c);
        s
    }

    pub fn generator(m: usize, g: Generator) -> Self {
        let mut s = Self::zero(m);
        s.terms.insert(Word(vec![g]), Coeff::one());
        s
    }

    pub fn term(m: usize, c: Coeff, w: Word) -> Self {
        let mut s = Self::zero(m);
        s.terms.insert(w, c);
        s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Coeff) {
        let slot = self.terms.entry(w).or_default();
        *slot = std::mem::take(slot) + c;
    }

    pub fn add(mut self, other: NCSum) -> NCSum {
        for (w, c) in other.terms {
            self.add_term(w, c);
        }
        self
    }

    pub fn sub(self, other: NCSum) -> NCSum {
        let neg = NCSum {
            m: other.m,
            terms: other
                .terms
                .into_iter()
                .map(|(w, c)| (w, c.scale(Complex64::from(-1.0))))
                .collect(),
        };
        self.add(neg)
    }

    /// Left multiplication by a coefficient; no shift is involved.
    pub fn left_scale(&self, c: &Coeff) -> NCSum {
        NCSum {
            m: self.m,
            terms: self.terms.iter().map(|(w, k)| (w.clone(), c * k)).collect(),
        }
    }

    /// Twisted product: (c₁ w₁)(c₂ w₂) = c₁ · c₂(q + σ(w₁)) · w₁w₂.
    pub fn mul(&self, rhs: &NCSum) -> Result<NCSum> {
        let mut out = NCSum::zero(self.m.max(rhs.m));
        for (w1, c1) in &self.terms {
            let s = w1.shift(out.m);
            for (w2, c2) in &rhs.terms {
                out.add_term(w1.concat(w2)?, c1 * &c2.shifted(&s));
            }
        }
        Ok(out)
    }

    /// Numeric coefficients at a point.
    pub fn freeze(&self, ctx: &EllipticContext, p: &Point) -> Result<BTreeMap<Word, Complex64>> {
        self.terms
            .iter()
            .map(|(w, c)| Ok((w.clone(), c.eval(ctx, p)?)))
            .collect()
    }

    /// Numeric coefficient vector over quadratic words; fails if lower
    /// degree terms are present.
    pub fn freeze_quadratic(&self, ctx: &EllipticContext, p: &Point, space: &WordSpace) -> Result<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); space.num_words()];
        for (w, c) in &self.terms {
            let [x, y] = w.generators() else {
                return Err(Error::InvalidIndices(format!("word of length {} in a quadratic relation", w.len())));
            };
            v[space.word_index(x, y)] += c.eval(ctx, p)?;
        }
        Ok(v)
    }
}

/// Index bookkeeping for quadratic words in t_{ab}^α, a, b < M, α ∈ Z_N².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordSpace {
    pub n: usize,
    pub m: usize,
}

impl WordSpace {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn num_generators(&self) -> usize {
        self.m * self.m * self.n * self.n
    }

    pub fn num_words(&self) -> usize {
        self.num_generators().pow(2)
    }

    pub fn generator_index(&self, g: &Generator) -> usize {
        ((g.first * self.m + g.second) * self.n + g.alpha.a1() as usize) * self.n + g.alpha.a2() as usize
    }

    pub fn generator(&self, index: usize) -> Generator {
        let nn = self.n * self.n;
        let pair = index / nn;
        Generator::new(pair / self.m, pair % self.m, LatticeIndex::from_flat(index % nn, self.n))
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        (0..self.num_generators()).map(|k| self.generator(k))
    }

    pub fn word_index(&self, x: &Generator, y: &Generator) -> usize {
        self.generator_index(x) * self.num_generators() + self.generator_index(y)
    }

    pub fn word(&self, index: usize) -> (Generator, Generator) {
        let g = self.num_generators();
        (self.generator(index / g), self.generator(index % g))
    }
}

/// A quadratic relation evaluated at fixed parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationVector {
    pub coords: Vec<Complex64>,
    pub label: String,
}

impl RelationVector {
    pub fn new(coords: Vec<Complex64>, label: impl Into<String>) -> Self {
        Self {
            coords,
            label: label.into(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// t_{ab}^μ for an unreduced μ = ι + N c, written as f(q)·t_{ab}^ι.
///
/// Consistency of the L-operator sum over representatives forces
/// t^μ = t^ι · s (−1)^{c₁+c₂} exp(πiτc₂² + 2πic₂(η + ω_ι)), η = q2_b − q1_a,
/// where s is the sign relating T_μ and T_ι.
pub fn lifted_generator(first: usize, second: usize, mu: Lift, m: usize, tau: Complex64) -> NCSum {
    let iota = mu.class();
    let (c1, c2) = mu.carry();
    let sign = mu.heisenberg_sign() * if (c1 + c2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let g = Generator::new(first, second, iota);
    if c2 == 0 {
        return NCSum::term(m, Coeff::constant(Complex64::from(sign)), Word(vec![g]));
    }
    let c2f = c2 as f64;
    let eta = Affine::q2(second) - Affine::q1(first);
    let arg = (eta + Affine::constant(iota.omega(tau))).scale(2.0 * PI * I * c2f)
        + Affine::constant(PI * I * tau * c2f * c2f);
    NCSum::term(m, Coeff::exp(arg).scale(Complex64::from(sign)), Word(vec![g]))
}

/// Convention for the L-operator ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LConvention {
    /// Multiply each term by e^{2πiα₂z/N}.
    pub exp_factor: bool,
}

impl Default for LConvention {
    fn default() -> Self {
        Self { exp_factor: true }
    }
}

/// Entry L^{ij}(z) = Σ_α θ(z + q2_i − q1_j + ω_α) [e^{2πiα₂z/N}] t_{ji}^α T_α,
/// returned as the N² pairs (α, NCSum coefficient of T_α). `z` is any affine
/// expression, normally a spectral variable.
pub fn l_entry(i: usize, j: usize, z: &Affine, n: usize, m: usize, tau: Complex64, conv: LConvention) -> Vec<(LatticeIndex, NCSum)> {
    LatticeIndex::all(n)
        .map(|alpha| {
            let arg = z.clone() + Affine::q2(i) - Affine::q1(j) + Affine::constant(alpha.omega(tau));
            let mut c = Coeff::theta(arg);
            if conv.exp_factor && alpha.a2() != 0 {
                let e = z.clone().scale(2.0 * PI * I * alpha.a2() as f64 / n as f64);
                c = c * Coeff::exp(e);
            }
            (alpha, NCSum::term(m, c, Word(vec![Generator::new(j, i, alpha)])))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::basis_t;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx() -> EllipticContext {
        EllipticContext::new(c(0.3, 0.8)).unwrap()
    }

    fn point() -> Point {
        Point {
            q1: vec![c(0.11, 0.2), c(0.43, 0.31)],
            q2: vec![c(0.27, 0.15), c(0.71, 0.44)],
            hbar: c(0.19, 0.23),
            z: vec![c(0.37, 0.12), c(0.61, 0.33)],
        }
    }

    #[test]
    fn generator_moves_coefficients() {
        let ctx = ctx();
        let p = point();
        let m = 2;
        let g = Generator::new(0, 1, LatticeIndex::zero(1));
        // closed form: θ(q2_1 − q1_0 + z) with q1_0 → q1_0 + ħ, q2_1 → q2_1 + ħ is unchanged,
        // θ(q1_0 + z) picks up ħ
        let f1 = Coeff::theta(Affine::q2(1) - Affine::q1(0) + Affine::z(0));
        let f2 = Coeff::theta(Affine::q1(0) + Affine::z(0));
        let gf1 = NCSum::generator(m, g).mul(&NCSum::scalar(m, f1.clone())).unwrap();
        let gf2 = NCSum::generator(m, g).mul(&NCSum::scalar(m, f2)).unwrap();
        let w = Word::new(vec![g]).unwrap();
        let v1 = gf1.freeze(&ctx, &p).unwrap()[&w];
        let v2 = gf2.freeze(&ctx, &p).unwrap()[&w];
        assert!((v1 - f1.eval(&ctx, &p).unwrap()).norm() < 1e-14);
        let want = ctx.theta(p.q1[0] + p.hbar + p.z[0]).unwrap();
        assert!((v2 - want).norm() < 1e-14);
    }

    #[test]
    fn twisted_product_is_associative() {
        let ctx = ctx();
        let p = point();
        let m = 2;
        let a = LatticeIndex::new(1, 0, 2);
        let b = LatticeIndex::new(1, 1, 2);
        let x = NCSum::term(m, Coeff::theta(Affine::q1(1) + Affine::z(0)), Word::new(vec![Generator::new(1, 0, a)]).unwrap());
        let f = NCSum::scalar(m, Coeff::phi(Affine::hbar(), Affine::q2(0) - Affine::q1(1)));
        let y = NCSum::term(m, Coeff::exp(Affine::q2(1)), Word::new(vec![Generator::new(0, 1, b)]).unwrap());
        let left = x.mul(&f).unwrap().mul(&y).unwrap().freeze(&ctx, &p).unwrap();
        let right = x.mul(&f.mul(&y).unwrap()).unwrap().freeze(&ctx, &p).unwrap();
        let mid = {
            let xf = x.mul(&f).unwrap();
            xf.mul(&y).unwrap().freeze(&ctx, &p).unwrap()
        };
        assert_eq!(left.len(), 1);
        for (w, v) in &left {
            assert!((v - right[w]).norm() < 1e-13 * v.norm());
            assert!((v - mid[w]).norm() < 1e-13 * v.norm());
        }
    }

    #[test]
    fn cubic_words_rejected() {
        let m = 1;
        let g = Generator::new(0, 0, LatticeIndex::zero(1));
        let t = NCSum::generator(m, g);
        let t2 = t.mul(&t).unwrap();
        assert!(matches!(t2.mul(&t), Err(Error::WordTooLong(3))));
    }

    #[test]
    fn word_space_roundtrip() {
        let s = WordSpace::new(2, 3);
        for (k, g) in s.generators().enumerate() {
            assert_eq!(s.generator_index(&g), k);
        }
        let (x, y) = s.word(123);
        assert_eq!(s.word_index(&x, &y), 123);
    }

    #[test]
    fn l_entry_shapes() {
        let tau = c(0.3, 0.8);
        let z = Affine::z(0);
        assert_eq!(l_entry(0, 1, &z, 3, 2, tau, LConvention::default()).len(), 9);
        let one = l_entry(1, 0, &z, 1, 2, tau, LConvention::default());
        assert_eq!(one.len(), 1);
        let (w, _) = one[0].1.terms().next().unwrap();
        assert_eq!(w.generators()[0], Generator::new(0, 1, LatticeIndex::zero(1)));
    }

    #[test]
    fn l_entry_m1_matches_eta_form() {
        let ctx = ctx();
        let p = point();
        let n = 2;
        let z = p.z[0];
        let eta = p.q2[0] - p.q1[0];
        for (alpha, sum) in l_entry(0, 0, &Affine::z(0), n, 1, ctx.tau(), LConvention::default()) {
            let (_, v) = sum.freeze(&ctx, &p).unwrap().into_iter().next().unwrap();
            let want = ctx.theta(z + eta + alpha.omega(ctx.tau())).unwrap()
                * (2.0 * PI * I * alpha.a2() as f64 * z / n as f64).exp();
            assert!((v - want).norm() < 1e-13);
        }
    }

    // The ansatz written with a lifted index must equal the canonical one.
    #[test]
    fn lifted_generator_is_consistent_with_ansatz() {
        let ctx = ctx();
        let p = point();
        let tau = ctx.tau();
        for n in [2usize, 3] {
            let ni = n as i64;
            let eta = p.q2[1] - p.q1[0];
            let z = p.z[0];
            for iota in LatticeIndex::all(n) {
                for (d1, d2) in [(ni, 0), (0, ni), (-ni, ni), (2 * ni, -ni)] {
                    let mu = Lift::new(iota.a1() + d1, iota.a2() + d2, n);
                    let term = |l: Lift| {
                        ctx.theta(z + eta + l.omega(tau)).unwrap()
                            * (2.0 * PI * I * l.a2 as f64 * z / n as f64).exp()
                    };
                    // θ·e·T_μ·t^μ must equal θ·e·T_ι·t^ι
                    let lifted = lifted_generator(0, 1, mu, 2, tau);
                    let (w, f) = lifted.freeze(&ctx, &p).unwrap().into_iter().next().unwrap();
                    assert_eq!(w.generators()[0].alpha, iota);
                    let lhs = basis_t(mu) * (term(mu) * f);
                    let rhs = basis_t(iota) * term(iota.lift());
                    assert!((lhs - &rhs).norm() < 1e-12 * rhs.norm(), "{mu}");
                }
            }
        }
    }
}
