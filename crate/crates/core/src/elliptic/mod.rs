//! Odd theta function, Kronecker and Eisenstein functions, Fay identities.

mod lattice;

pub use lattice::{LatticeIndex, Lift};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_IM_TAU: f64 = 0.3;
pub const DEFAULT_TRUNC_K: usize = 30;
pub const DEFAULT_TOL: f64 = 1e-15;
pub const DEFAULT_POLE_MIN: f64 = 0.05;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Modulus plus truncation policy for the theta series.
#[derive(Clone, Debug)]
pub struct EllipticContext {
    tau: Complex64,
    trunc_k: usize,
    tol: f64,
    tail_bound: f64,
    pole_min: f64,
    // e^{πiτ(k+½)²} for k = 0..=trunc_k; the k and -k-1 terms share the weight.
    weights: Vec<Complex64>,
    theta_d1_zero: Complex64,
}

impl EllipticContext {
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_truncation(tau, DEFAULT_TRUNC_K, DEFAULT_TOL)
    }

    pub fn with_truncation(tau: Complex64, trunc_k: usize, tol: f64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::NonFinite("tau"));
        }
        if tau.im < MIN_IM_TAU {
            return Err(Error::InvalidModulus(tau, MIN_IM_TAU));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance {tol} must be positive")));
        }
        let tail_bound = tail_bound(tau.im, trunc_k);
        if tail_bound >= tol {
            return Err(Error::TruncationTooShort {
                trunc_k,
                bound: tail_bound,
                tol,
            });
        }
        let weights = (0..=trunc_k)
            .map(|k| {
                let h = k as f64 + 0.5;
                (I * PI * tau * h * h).exp()
            })
            .collect();
        let mut ctx = Self {
            tau,
            trunc_k,
            tol,
            tail_bound,
            pole_min: DEFAULT_POLE_MIN,
            weights,
            theta_d1_zero: Complex64::new(0.0, 0.0),
        };
        ctx.theta_d1_zero = ctx.series(Complex64::new(0.0, 0.0)).1;
        Ok(ctx)
    }

    pub fn with_pole_min(mut self, pole_min: f64) -> Self {
        self.pole_min = pole_min;
        self
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn trunc_k(&self) -> usize {
        self.trunc_k
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Bound on the discarded tail (including second-derivative weights)
    /// for arguments in the fundamental band |Im u| ≤ Im τ / 2.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn arg_band(&self) -> f64 {
        self.tau.im / 2.0
    }

    pub fn pole_min(&self) -> f64 {
        self.pole_min
    }

    /// Writes u = u0 + m + nτ with u0 in the fundamental parallelogram
    /// centred at the origin.
    fn reduce(&self, u: Complex64) -> (Complex64, i64, i64) {
        let n = (u.im / self.tau.im).round();
        let v = u - self.tau * n;
        let m = v.re.round();
        (v - m, m as i64, n as i64)
    }

    /// θ, θ', θ'' summed directly at a reduced argument.
    fn series(&self, u0: Complex64) -> (Complex64, Complex64, Complex64) {
        // term(k) = w_k x^{2k+1}, x = e^{πi(u+½)}; pair k with -k-1.
        let x = (I * PI * (u0 + 0.5)).exp();
        let x2 = x * x;
        let xi = x.inv();
        let xi2 = xi * xi;
        let mut pos = x;
        let mut neg = xi;
        let mut s0 = Complex64::new(0.0, 0.0);
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        for (k, w) in self.weights.iter().enumerate() {
            let h = k as f64 + 0.5;
            let d = 2.0 * PI * h;
            let sum = w * (pos + neg);
            let diff = w * (pos - neg);
            s0 += sum;
            s1 += I * d * diff;
            s2 -= d * d * sum;
            pos *= x2;
            neg *= xi2;
        }
        (-s0, -s1, -s2)
    }

    fn checked(&self, u: Complex64) -> Result<Complex64> {
        if u.re.is_finite() && u.im.is_finite() {
            Ok(u)
        } else {
            Err(Error::NonFinite("theta argument"))
        }
    }

    /// θ and its first two derivatives at u.
    pub fn theta_jet(&self, u: Complex64) -> Result<[Complex64; 3]> {
        let u = self.checked(u)?;
        let (u0, m, n) = self.reduce(u);
        let (t0, t1, t2) = self.series(u0);
        let nf = n as f64;
        let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let f = sign * (-I * PI * self.tau * nf * nf - 2.0 * PI * I * nf * u0).exp();
        let a = -2.0 * PI * I * nf;
        let out = [f * t0, f * (t1 + a * t0), f * (t2 + 2.0 * a * t1 + a * a * t0)];
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("theta value"));
        }
        Ok(out)
    }

    pub fn theta(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.theta_jet(u)?[0])
    }

    pub fn theta_d1(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.theta_jet(u)?[1])
    }

    pub fn theta_d2(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.theta_jet(u)?[2])
    }

    /// θ'(0), cached.
    pub fn theta_d1_zero(&self) -> Complex64 {
        self.theta_d1_zero
    }

    /// Distance from u to the nearest point of Z + τZ.
    pub fn lattice_distance(&self, u: Complex64) -> f64 {
        let (u0, _, _) = self.reduce(u);
        let mut best = f64::INFINITY;
        for a in -1..=1 {
            for b in -1..=1 {
                let p = Complex64::from(a as f64) + self.tau * b as f64;
                best = best.min((u0 - p).norm());
            }
        }
        best
    }

    pub fn ensure_pole_free(&self, what: &'static str, u: Complex64) -> Result<()> {
        self.checked(u)?;
        let distance = self.lattice_distance(u);
        if distance < self.pole_min {
            return Err(Error::PoleProximity {
                what,
                value: u,
                distance,
                min: self.pole_min,
            });
        }
        Ok(())
    }

    /// φ(u, x) = θ'(0)θ(u+x)/(θ(u)θ(x)).
    pub fn kronecker_phi(&self, u: Complex64, x: Complex64) -> Result<Complex64> {
        self.ensure_pole_free("u", u)?;
        self.ensure_pole_free("x", x)?;
        let num = self.theta(u + x)?;
        Ok(self.theta_d1_zero * num / (self.theta(u)? * self.theta(x)?))
    }

    /// φ_α(u, x + ω_α) = φ(u, x + ω_α)·e^{2πiα₂u/N}. Only the class of α
    /// matters.
    pub fn varphi(&self, alpha: impl Into<Lift>, u: Complex64, x: Complex64) -> Result<Complex64> {
        let alpha = alpha.into();
        let n = alpha.order() as f64;
        let phi = self.kronecker_phi(u, x + alpha.omega(self.tau))?;
        Ok(phi * (2.0 * PI * I * alpha.a2 as f64 * u / n).exp())
    }

    pub fn omega(&self, alpha: impl Into<Lift>) -> Complex64 {
        alpha.into().omega(self.tau)
    }

    /// E₁ = θ'/θ.
    pub fn eisenstein_e1(&self, z: Complex64) -> Result<Complex64> {
        self.ensure_pole_free("z", z)?;
        let [t0, t1, _] = self.theta_jet(z)?;
        Ok(t1 / t0)
    }

    /// E₂ = −E₁' = (θ'² − θ''θ)/θ².
    pub fn eisenstein_e2(&self, z: Complex64) -> Result<Complex64> {
        self.ensure_pole_free("z", z)?;
        let [t0, t1, t2] = self.theta_jet(z)?;
        Ok((t1 * t1 - t2 * t0) / (t0 * t0))
    }

    /// Relative residual of φ(z,x)φ(w,y) = φ(z−w,x)φ(w,x+y) + φ(w−z,y)φ(z,x+y).
    pub fn fay_residual(&self, z: Complex64, w: Complex64, x: Complex64, y: Complex64) -> Result<f64> {
        let a = self.kronecker_phi(z, x)? * self.kronecker_phi(w, y)?;
        let b = self.kronecker_phi(z - w, x)? * self.kronecker_phi(w, x + y)?;
        let c = self.kronecker_phi(w - z, y)? * self.kronecker_phi(z, x + y)?;
        Ok(relative(a - b - c, &[a, b, c]))
    }

    /// Relative residual of the w → z limit
    /// φ(z,x)φ(z,y) = φ(z,x+y)(E₁(z)+E₁(x)+E₁(y)−E₁(x+y+z)).
    pub fn fay_degenerate_residual(&self, z: Complex64, x: Complex64, y: Complex64) -> Result<f64> {
        let a = self.kronecker_phi(z, x)? * self.kronecker_phi(z, y)?;
        let e = self.eisenstein_e1(z)? + self.eisenstein_e1(x)? + self.eisenstein_e1(y)?
            - self.eisenstein_e1(x + y + z)?;
        let b = self.kronecker_phi(z, x + y)? * e;
        Ok(relative(a - b, &[a, b]))
    }

    /// Relative residual of φ(z,x)φ(z,−x) = E₂(z) − E₂(x).
    pub fn fay_e2_residual(&self, z: Complex64, x: Complex64) -> Result<f64> {
        let a = self.kronecker_phi(z, x)? * self.kronecker_phi(z, -x)?;
        let e2z = self.eisenstein_e2(z)?;
        let e2x = self.eisenstein_e2(x)?;
        Ok(relative(a - (e2z - e2x), &[a, e2z, e2x]))
    }
}

fn relative(diff: Complex64, terms: &[Complex64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(1e-300, f64::max);
    diff.norm() / scale
}

fn tail_bound(im_tau: f64, trunc_k: usize) -> f64 {
    // |Im u| ≤ Im τ / 2 gives |term| ≤ exp(−π Im τ (h² − h)), h = k + ½;
    // the second derivative adds (2πh)². Both signs of h count.
    let mut total = 0.0;
    for k in trunc_k + 1..trunc_k + 200 {
        let h = k as f64 + 0.5;
        let w = (1.0 + 2.0 * PI * h).powi(2) * (-PI * im_tau * (h * h - h)).exp();
        total += 2.0 * w;
        if w == 0.0 {
            break;
        }
    }
    total
}
