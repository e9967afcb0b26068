//! Indices in Z_N² and their integer lifts.
//!
//! `LatticeIndex` is the reduced representative in {0..N-1}². Quantities such
//! as ω_α inside φ_α(u, x + ω_α) only depend on the class, so they take a
//! `LatticeIndex`. The Heisenberg matrices T_α, the phases κ_{αβ} and any
//! E₁/θ evaluated at x + ω_α depend on the representative; those take a
//! [`Lift`], an unreduced integer pair.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Element of Z_N², stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeIndex {
    a1: i64,
    a2: i64,
    n: i64,
}

impl LatticeIndex {
    pub fn new(a1: i64, a2: i64, n: usize) -> Self {
        assert!(n > 0, "order N must be positive");
        let n = n as i64;
        Self {
            a1: a1.rem_euclid(n),
            a2: a2.rem_euclid(n),
            n,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(0, 0, n)
    }

    pub fn a1(&self) -> i64 {
        self.a1
    }

    pub fn a2(&self) -> i64 {
        self.a2
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn is_zero(&self) -> bool {
        self.a1 == 0 && self.a2 == 0
    }

    /// The canonical lift with components in {0..N-1}.
    pub fn lift(&self) -> Lift {
        Lift {
            a1: self.a1,
            a2: self.a2,
            n: self.n,
        }
    }

    /// Position in the row-major enumeration of Z_N².
    pub fn flat(&self) -> usize {
        (self.a1 * self.n + self.a2) as usize
    }

    pub fn from_flat(index: usize, n: usize) -> Self {
        Self::new((index / n) as i64, (index % n) as i64, n)
    }

    /// All N² elements in row-major order.
    pub fn all(n: usize) -> impl Iterator<Item = LatticeIndex> {
        (0..n * n).map(move |k| LatticeIndex::from_flat(k, n))
    }

    /// ω_α = (α₁ + α₂τ)/N of the reduced representative.
    pub fn omega(&self, tau: Complex64) -> Complex64 {
        self.lift().omega(tau)
    }
}

impl Add for LatticeIndex {
    type Output = LatticeIndex;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        LatticeIndex::new(self.a1 + rhs.a1, self.a2 + rhs.a2, self.n as usize)
    }
}

impl Sub for LatticeIndex {
    type Output = LatticeIndex;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        LatticeIndex::new(self.a1 - rhs.a1, self.a2 - rhs.a2, self.n as usize)
    }
}

impl Neg for LatticeIndex {
    type Output = LatticeIndex;
    fn neg(self) -> Self {
        LatticeIndex::new(-self.a1, -self.a2, self.n as usize)
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a1, self.a2)
    }
}

/// Integer representative of a class in Z_N².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lift {
    pub a1: i64,
    pub a2: i64,
    n: i64,
}

impl Lift {
    pub fn new(a1: i64, a2: i64, n: usize) -> Self {
        assert!(n > 0, "order N must be positive");
        Self { a1, a2, n: n as i64 }
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn class(&self) -> LatticeIndex {
        LatticeIndex::new(self.a1, self.a2, self.n as usize)
    }

    /// Splits the lift as `class + N·carry`.
    pub fn carry(&self) -> (i64, i64) {
        (self.a1.div_euclid(self.n), self.a2.div_euclid(self.n))
    }

    pub fn omega(&self, tau: Complex64) -> Complex64 {
        (Complex64::from(self.a1 as f64) + tau * self.a2 as f64) / self.n as f64
    }

    /// Sign s with T_{lift} = s · T_{class}.
    pub fn heisenberg_sign(&self) -> f64 {
        let (c1, c2) = self.carry();
        let r = self.class();
        let parity = c1 * r.a2() + c2 * r.a1() + self.n * c1 * c2;
        if parity.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl From<LatticeIndex> for Lift {
    fn from(value: LatticeIndex) -> Self {
        value.lift()
    }
}

impl Add for Lift {
    type Output = Lift;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        Lift {
            a1: self.a1 + rhs.a1,
            a2: self.a2 + rhs.a2,
            n: self.n,
        }
    }
}

impl Sub for Lift {
    type Output = Lift;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        Lift {
            a1: self.a1 - rhs.a1,
            a2: self.a2 - rhs.a2,
            n: self.n,
        }
    }
}

impl Neg for Lift {
    type Output = Lift;
    fn neg(self) -> Self {
        Lift {
            a1: -self.a1,
            a2: -self.a2,
            n: self.n,
        }
    }
}

impl fmt::Display for Lift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a1, self.a2)
    }
}
