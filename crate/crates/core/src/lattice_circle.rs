//! Integer points on the circle `λ₁² + λ₂² = n` and the Fourier coefficients of
//! the normalized counting measure they induce on the unit circle.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification thresholds on `|μ̂(4) ∓ 1|`.
pub const CLASSIFICATION_TOL: f64 = 1e-12;

const IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub lambda1: i64,
    pub lambda2: i64,
}

impl LatticePoint {
    pub const fn new(lambda1: i64, lambda2: i64) -> Self {
        Self { lambda1, lambda2 }
    }

    pub const fn norm_sq(self) -> i64 {
        self.lambda1 * self.lambda1 + self.lambda2 * self.lambda2
    }

    pub const fn neg(self) -> Self {
        Self::new(-self.lambda1, -self.lambda2)
    }

    /// Whether the point lies in the half-set `λ₁ > 0, or λ₁ = 0 and λ₂ > 0`.
    pub const fn is_positive_half(self) -> bool {
        self.lambda1 > 0 || (self.lambda1 == 0 && self.lambda2 > 0)
    }

    pub const fn dot(self, other: (i64, i64)) -> i64 {
        self.lambda1 * other.0 + self.lambda2 * other.1
    }
}

/// `E_n`: all integer points of norm `n`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCircle {
    n: u64,
    points: Vec<LatticePoint>,
}

/// Shape of the limiting measure, decided from `μ̂(4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureClass {
    Generic,
    /// Mass at `±1, ±i`: `μ̂(4) = 1`.
    Cilleruelo,
    /// The previous measure rotated by `π/4`: `μ̂(4) = −1`.
    TiltedCilleruelo,
}

impl MeasureClass {
    pub fn from_mu4(mu4: f64) -> Self {
        if (mu4 - 1.0).abs() < CLASSIFICATION_TOL {
            MeasureClass::Cilleruelo
        } else if (mu4 + 1.0).abs() < CLASSIFICATION_TOL {
            MeasureClass::TiltedCilleruelo
        } else {
            MeasureClass::Generic
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub n: u64,
    pub mu_hat: BTreeMap<i32, f64>,
    pub class: MeasureClass,
}

impl SpectralMeasure {
    pub fn mu4(&self) -> f64 {
        self.mu_hat[&4]
    }
}

/// Exhaustive scan of `λ₁ ∈ [−⌊√n⌋, ⌊√n⌋]`.
pub fn enumerate_circle(n: u64) -> Result<LatticeCircle> {
    if n == 0 {
        return Err(Error::ZeroRadius);
    }
    let s = n.isqrt() as i64;
    let mut points = Vec::new();
    for l1 in -s..=s {
        let rest = n - (l1 * l1) as u64;
        let r = rest.isqrt();
        if r * r == rest {
            let r = r as i64;
            points.push(LatticePoint::new(l1, -r));
            if r != 0 {
                points.push(LatticePoint::new(l1, r));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::NotSumOfTwoSquares { n });
    }
    points.sort();
    Ok(LatticeCircle { n, points })
}

impl LatticeCircle {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    /// `r₂(n)`.
    pub fn r2(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// `μ̂ₙ(k) = (1/r₂) Σ ((λ₁ + iλ₂)/√n)^k`.
    ///
    /// The sum of Gaussian-integer powers is formed exactly whenever it fits
    /// in `i128`, otherwise in floating point. Panics if the imaginary part
    /// exceeds `1e-12`, which would mean the point set lost its symmetry.
    pub fn mu_hat(&self, k: i32) -> f64 {
        let k = k.unsigned_abs();
        let z = match self.exact_power_sum(k) {
            Some(sum) => {
                let scale = (self.n as f64).powf(k as f64 / 2.0) * self.r2() as f64;
                Complex::new(sum.re as f64 / scale, sum.im as f64 / scale)
            }
            None => {
                let root = (self.n as f64).sqrt();
                let total: Complex<f64> = self
                    .points
                    .iter()
                    .map(|p| Complex::new(p.lambda1 as f64 / root, p.lambda2 as f64 / root).powu(k))
                    .sum();
                total / self.r2() as f64
            }
        };
        assert!(
            z.im.abs() < IMAG_TOL,
            "imaginary part {} of mu_hat({k}) for n = {}",
            z.im,
            self.n
        );
        z.re
    }

    fn exact_power_sum(&self, k: u32) -> Option<Complex<i128>> {
        let mut total = Complex::new(0i128, 0i128);
        for p in &self.points {
            let base = Complex::new(p.lambda1 as i128, p.lambda2 as i128);
            let mut acc = Complex::new(1i128, 0i128);
            for _ in 0..k {
                let re = acc.re.checked_mul(base.re)?.checked_sub(acc.im.checked_mul(base.im)?)?;
                let im = acc.re.checked_mul(base.im)?.checked_add(acc.im.checked_mul(base.re)?)?;
                acc = Complex::new(re, im);
            }
            total = Complex::new(total.re.checked_add(acc.re)?, total.im.checked_add(acc.im)?);
        }
        Some(total)
    }

    /// `μ̂ₙ(k)` for `k = 0..=max_k` together with the classification.
    pub fn spectral_measure(&self, max_k: i32) -> SpectralMeasure {
        let max_k = max_k.max(4);
        let mu_hat: BTreeMap<i32, f64> = (0..=max_k).map(|k| (k, self.mu_hat(k))).collect();
        let class = MeasureClass::from_mu4(mu_hat[&4]);
        SpectralMeasure {
            n: self.n,
            mu_hat,
            class,
        }
    }

    /// Direct moments `((1/N) Σ λ₁⁴, (1/N) Σ λ₁² λ₂²)`.
    pub fn moment_sums(&self) -> (f64, f64) {
        let (mut s4, mut s22) = (0i128, 0i128);
        for p in &self.points {
            let a = (p.lambda1 as i128).pow(2);
            let b = (p.lambda2 as i128).pow(2);
            s4 += a * a;
            s22 += a * b;
        }
        let r2 = self.r2() as f64;
        (s4 as f64 / r2, s22 as f64 / r2)
    }

    /// Closed forms `n²(3/8 + μ̂(4)/8)` and `(n²/8)(1 − μ̂(4))` for the moments.
    pub fn moment_sums_closed_form(&self) -> (f64, f64) {
        let mu4 = self.mu_hat(4);
        let n2 = (self.n as f64).powi(2);
        (n2 * (0.375 + mu4 / 8.0), n2 / 8.0 * (1.0 - mu4))
    }
}
