//! Dense real polynomials with ascending-power coefficients.
//!
//! The same type backs polynomials in `s` and in the delay operator `z^-1`;
//! for the latter, index `i` holds the coefficient of `z^-i`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Coefficients below this magnitude are stripped from the high-power end.
pub const TRIM_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-power coefficients and strips
    /// negligible high-order terms.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut p = Self {
            coeffs: coeffs.into(),
        };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.abs() < TRIM_EPS) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * a).collect::<Vec<_>>())
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Coefficients in descending order, i.e. the polynomial `x^d p(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Complex roots by Durand-Kerner (Weierstrass) iteration.
    ///
    /// Leading zero roots (a zero constant term) are split off exactly.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let lead_zeros = self.coeffs.iter().take_while(|c| **c == 0.0).count();
        let mut roots = vec![Complex64::new(0.0, 0.0); lead_zeros];
        let rest: Vec<f64> = self.coeffs[lead_zeros..].to_vec();
        let n = deg - lead_zeros;
        if n == 0 {
            return roots;
        }
        let lead = rest[n];
        let monic: Vec<f64> = rest.iter().map(|c| c / lead).collect();
        if n == 1 {
            roots.push(Complex64::new(-monic[0], 0.0));
            return roots;
        }
        if n == 2 {
            roots.extend(quadratic_roots(monic[0], monic[1]));
            return roots;
        }

        // Cauchy bound on root magnitude
        let radius = 1.0 + monic[..n].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| seed.powu(k as u32) * (radius / 2.0).max(0.5))
            .collect();

        let eval = |x: Complex64| {
            monic
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
        };
        for _ in 0..2000 {
            let mut max_step = 0.0_f64;
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        denom *= z[i] - z[j];
                    }
                }
                if denom.norm() == 0.0 {
                    denom = Complex64::new(1e-300, 0.0);
                }
                let step = eval(z[i]) / denom;
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
            if max_step < 1e-15 {
                break;
            }
        }
        // Newton polish against the original monic polynomial
        for r in z.iter_mut() {
            for _ in 0..3 {
                let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for &c in monic.iter().rev() {
                    dp = dp * *r + p;
                    p = p * *r + c;
                }
                if dp.norm() > 0.0 {
                    let step = p / dp;
                    if step.norm().is_finite() && step.norm() < 1e-6 * (1.0 + r.norm()) {
                        *r -= step;
                    }
                }
            }
        }
        roots.extend(z);
        roots
    }
}

/// Roots of `x^2 + b x + c` without cancellation.
fn quadratic_roots(c: f64, b: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let sq = libm::sqrt(disc);
        let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let im = 0.5 * libm::sqrt(-disc);
        [Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeff(i) + rhs.coeff(i))
                .collect::<Vec<_>>(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeff(i) - rhs.coeff(i))
                .collect::<Vec<_>>(),
        )
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}
