//! Pole-avoiding rejection sampling of dynamical and spectral parameters.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{EllipticContext, LatticeIndex};
use crate::error::{Error, Result};
use crate::expr::{Affine, Point, Var};

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9); seed_from_u64(seed), stream = check index << 32 | trial";
pub const POLE_DELTA: f64 = 0.05;
pub const MAX_REJECTIONS: usize = 10_000;
pub const SHIFT_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HbarSpec {
    Random,
    Fixed(Complex64),
}

/// Expressions that must stay away from the period lattice, together with
/// every copy moved by ω_γ (γ ∈ Z_N²) and by ħ-shifts of q of total depth
/// at most `shift_depth`.
#[derive(Clone, Debug)]
pub struct Constraints {
    pub n: usize,
    pub m: usize,
    pub spectral: usize,
    pub exprs: Vec<Affine>,
    pub shift_depth: usize,
}

impl Constraints {
    pub fn new(n: usize, m: usize, spectral: usize) -> Self {
        Self {
            n,
            m,
            spectral,
            exprs: Vec::new(),
            shift_depth: SHIFT_DEPTH,
        }
    }

    pub fn with(mut self, e: Affine) -> Self {
        self.exprs.push(e);
        self
    }

    /// q_j − q_k for j < k in both blocks.
    pub fn with_q_differences(mut self) -> Self {
        for j in 0..self.m {
            for k in j + 1..self.m {
                self.exprs.push(Affine::q1(j) - Affine::q1(k));
                self.exprs.push(Affine::q2(j) - Affine::q2(k));
            }
        }
        self
    }

    /// z_a − z_b for the given pairs.
    pub fn with_spectral_differences(mut self, pairs: &[(usize, usize)]) -> Self {
        for &(a, b) in pairs {
            self.exprs.push(Affine::z(a) - Affine::z(b));
        }
        self
    }

    /// The multiples c of ħ by which a depth-limited shift of q moves `e`.
    pub fn shift_effects(&self, e: &Affine) -> Vec<Complex64> {
        let mut steps: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
        for k in 0..self.m {
            for v in [Var::Q1(k), Var::Q2(k)] {
                let a = e.coefficient(v);
                if a != Complex64::new(0.0, 0.0) {
                    steps.push(a);
                    steps.push(-a);
                }
            }
        }
        dedup(&mut steps);
        let mut effects = vec![Complex64::new(0.0, 0.0)];
        for _ in 0..self.shift_depth {
            let next: Vec<Complex64> = effects.iter().flat_map(|&c| steps.iter().map(move |&s| c + s)).collect();
            effects = next;
            dedup(&mut effects);
        }
        effects
    }

    /// Smallest lattice distance over every constrained copy at `p`.
    pub fn min_distance(&self, ctx: &EllipticContext, p: &Point) -> Result<f64> {
        let omegas: Vec<Complex64> = LatticeIndex::all(self.n).map(|g| g.omega(ctx.tau())).collect();
        let mut worst = f64::INFINITY;
        for e in &self.exprs {
            let base = e.eval(p)?;
            for c in self.shift_effects(e) {
                for w in &omegas {
                    worst = worst.min(ctx.lattice_distance(base + c * p.hbar + w));
                }
            }
        }
        Ok(worst)
    }
}

fn dedup(xs: &mut Vec<Complex64>) {
    let mut out: Vec<Complex64> = Vec::with_capacity(xs.len());
    for &x in xs.iter() {
        if !out.iter().any(|y| (x - y).norm() < 1e-12) {
            out.push(x);
        }
    }
    *xs = out;
}

/// Deterministic stream of accepted samples for one trial.
pub struct Sampler<'a> {
    ctx: &'a EllipticContext,
    rng: ChaCha8Rng,
    hbar: HbarSpec,
    constraints: &'a Constraints,
    rejections: usize,
}

impl<'a> Sampler<'a> {
    pub fn new(ctx: &'a EllipticContext, seed: u64, stream: u64, hbar: HbarSpec, constraints: &'a Constraints) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            ctx,
            rng,
            hbar,
            constraints,
            rejections: 0,
        }
    }

    pub fn rejections(&self) -> usize {
        self.rejections
    }

    /// Counts a sample rejected after the fact (a pole met during evaluation).
    pub fn reject(&mut self) -> Result<()> {
        self.rejections += 1;
        if self.rejections >= MAX_REJECTIONS {
            return Err(Error::SamplingFailed(self.rejections));
        }
        Ok(())
    }

    /// a + bτ with a ∈ [0,1), b ∈ [0.1,0.9).
    fn draw(&mut self) -> Complex64 {
        let a: f64 = self.rng.random_range(0.0..1.0);
        let b: f64 = self.rng.random_range(0.1..0.9);
        a + b * self.ctx.tau()
    }

    pub fn next_point(&mut self) -> Result<Point> {
        let c = self.constraints;
        loop {
            let hbar = match self.hbar {
                HbarSpec::Random => self.draw(),
                HbarSpec::Fixed(h) => h,
            };
            let q1 = (0..c.m).map(|_| self.draw()).collect();
            let q2 = (0..c.m).map(|_| self.draw()).collect();
            let z = (0..c.spectral).map(|_| self.draw()).collect();
            let p = Point { q1, q2, hbar, z };
            if c.min_distance(self.ctx, &p)? >= POLE_DELTA {
                return Ok(p);
            }
            self.reject()?;
        }
    }
}

/// The first accepted sample of a trial.
pub fn sample_params(
    ctx: &EllipticContext,
    seed: u64,
    stream: u64,
    hbar: HbarSpec,
    constraints: &Constraints,
) -> Result<Point> {
    Sampler::new(ctx, seed, stream, hbar, constraints).next_point()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Shift;

    fn ctx() -> EllipticContext {
        EllipticContext::new(Complex64::new(0.3, 0.8)).unwrap()
    }

    fn constraints() -> Constraints {
        Constraints::new(2, 2, 3)
            .with(Affine::hbar())
            .with_q_differences()
            .with_spectral_differences(&[(0, 1), (1, 2)])
    }

    #[test]
    fn deterministic() {
        let ctx = ctx();
        let c = constraints();
        let a = sample_params(&ctx, 7, 3, HbarSpec::Random, &c).unwrap();
        let b = sample_params(&ctx, 7, 3, HbarSpec::Random, &c).unwrap();
        assert_eq!(a, b);
        let other = sample_params(&ctx, 7, 4, HbarSpec::Random, &c).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn samples_respect_constraints() {
        let ctx = ctx();
        let c = constraints();
        for stream in 0..20 {
            let p = sample_params(&ctx, 11, stream, HbarSpec::Random, &c).unwrap();
            assert!(c.min_distance(&ctx, &p).unwrap() >= POLE_DELTA);
        }
    }

    fn shift_vectors(len: usize, depth: i64) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    (-depth..=depth).map(move |s| {
                        let mut v = v.clone();
                        v.push(s);
                        v
                    })
                })
                .filter(|v| v.iter().map(|s| s.abs()).sum::<i64>() <= depth)
                .collect();
        }
        out
    }

    #[test]
    fn shift_closure_by_enumeration() {
        let ctx = ctx();
        let c = constraints();
        let m = 2;
        for stream in 0..10 {
            let p = sample_params(&ctx, 5, stream, HbarSpec::Random, &c).unwrap();
            for s in shift_vectors(2 * m, 2) {
                let shift = Shift {
                    q1: s[..m].to_vec(),
                    q2: s[m..].to_vec(),
                };
                let moved = p.shifted(&shift);
                for e in &c.exprs {
                    for g in LatticeIndex::all(2) {
                        let d = ctx.lattice_distance(e.eval(&moved).unwrap() + g.omega(ctx.tau()));
                        assert!(d >= POLE_DELTA, "{s:?} {d}");
                    }
                }
            }
            // q1_jk ± ħ, ± 2ħ in particular
            let x = p.q1[0] - p.q1[1];
            for k in [-2.0, -1.0, 1.0, 2.0] {
                assert!(ctx.lattice_distance(x + k * p.hbar) >= POLE_DELTA);
            }
        }
    }

    #[test]
    fn infeasible_constraints_fail() {
        let ctx = ctx();
        let c = Constraints::new(1, 1, 0).with(Affine::hbar());
        let bad = Sampler::new(&ctx, 1, 0, HbarSpec::Fixed(Complex64::new(0.01, 0.0)), &c).next_point();
        assert!(matches!(bad, Err(Error::SamplingFailed(_))));
    }
}
