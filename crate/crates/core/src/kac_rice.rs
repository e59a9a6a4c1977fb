//! Closed-form expected number of directional nodal points for arithmetic
//! random waves, and its Kac–Rice constituents.
//!
//! With `G = (f, ⟨∇f, ξ⟩)` the zero density is `K₁ = φ_G(0,0) · E[|J_G| | G = 0]`,
//! constant in `x` by stationarity, so the expectation over the unit torus is
//! `K₁` itself:
//!
//! ```text
//! φ_G(0,0)        = 1 / (2^{3/2} π² √n)
//! E[|J_G| | G=0]  = 2π² n^{3/2} (1 + μ̂ₙ(4) cos 4θ)^{1/2}
//! E[N_ζ]          = (n/√2) (1 + μ̂ₙ(4) cos 4θ)^{1/2}
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice_circle::enumerate_circle;
use crate::num::Real;

/// Radicands below this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KacRiceBreakdown<T> {
    pub n: u64,
    pub theta: T,
    /// `θ mod π/2`, for display only.
    pub theta_reduced: T,
    pub mu4: T,
    /// `1 + μ̂ₙ(4) cos 4θ`
    pub radicand: T,
    pub phi0: T,
    pub jexp: T,
    pub density: T,
    pub expectation: T,
    /// Radicand vanishes: (tilted) Cilleruelo measure at a critical angle.
    pub degenerate: bool,
    /// Covariance of `G(x)`, `diag(1, 2π²n)`, is positive definite.
    pub g_nondegenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub samples: usize,
}

fn mu4_of(n: u64) -> Result<f64> {
    Ok(enumerate_circle(n)?.mu_hat(4))
}

fn radicand<T: Real>(mu4: T, theta: T) -> T {
    let r = T::one() + mu4 * (T::lit(4.0) * theta).cos();
    r.max(T::zero())
}

/// `1 / (2^{3/2} π² √n)`, the density of `G(x)` at the origin.
pub fn density_factor_phi0<T: Real>(n: u64) -> T {
    let pi = T::PI();
    (T::lit(2.0).powf(T::lit(1.5)) * pi * pi * T::lit(n as f64).sqrt()).recip()
}

/// `E[|J_G| | G = 0] = 2π² n^{3/2} (1 + μ̂ₙ(4) cos 4θ)^{1/2}`.
pub fn conditional_jacobian_expectation<T: Real>(n: u64, theta: T) -> Result<T> {
    let mu4 = T::lit(mu4_of(n)?);
    Ok(jexp_from_mu4(n, mu4, theta))
}

fn jexp_from_mu4<T: Real>(n: u64, mu4: T, theta: T) -> T {
    let pi = T::PI();
    T::lit(2.0) * pi * pi * T::lit(n as f64).powf(T::lit(1.5)) * radicand(mu4, theta).sqrt()
}

/// `E[N_ζ] = (n/√2)(1 + μ̂ₙ(4) cos 4θ)^{1/2}`; zero when the radicand vanishes.
pub fn expected_count<T: Real>(n: u64, theta: T) -> Result<T> {
    let mu4 = T::lit(mu4_of(n)?);
    Ok(expected_count_from_mu4(n, mu4, theta))
}

/// Same formula with `μ̂ₙ(4)` supplied by the caller.
pub fn expected_count_from_mu4<T: Real>(n: u64, mu4: T, theta: T) -> T {
    T::lit(n as f64) * T::FRAC_1_SQRT_2() * radicand(mu4, theta).sqrt()
}

/// `E[|J_G| | G = 0]` obtained by conditioning `(f₁, f₂, f₁₁, f₁₂, f₂₂)` on
/// `G = 0` directly: `|J_G| = |f_ζ|·|f_ξξ|` with the two factors independent,
/// giving `4π² n^{3/2} (1 + μ̂ₙ(4) cos 4θ)^{1/2}`, twice
/// [`conditional_jacobian_expectation`].
pub fn conditioned_jacobian_expectation<T: Real>(n: u64, theta: T) -> Result<T> {
    Ok(T::lit(2.0) * conditional_jacobian_expectation(n, theta)?)
}

/// `φ₀ ·` [`conditioned_jacobian_expectation`] `= √2 n (1 + μ̂ₙ(4) cos 4θ)^{1/2}`.
/// This is the value the Monte Carlo counts converge to.
pub fn conditioned_expected_count<T: Real>(n: u64, theta: T) -> Result<T> {
    Ok(T::lit(2.0) * expected_count(n, theta)?)
}

pub fn kac_rice_breakdown<T: Real>(n: u64, theta: T) -> Result<KacRiceBreakdown<T>> {
    let mu4 = T::lit(mu4_of(n)?);
    let phi0 = density_factor_phi0::<T>(n);
    let jexp = jexp_from_mu4(n, mu4, theta);
    let rad = radicand(mu4, theta);
    let density = phi0 * jexp;
    let quarter = T::FRAC_PI_2();
    let var_grad = T::lit(2.0) * T::PI() * T::PI() * T::lit(n as f64);
    Ok(KacRiceBreakdown {
        n,
        theta,
        theta_reduced: theta - quarter * (theta / quarter).floor(),
        mu4,
        radicand: rad,
        phi0,
        jexp,
        density,
        expectation: density,
        degenerate: rad < T::lit(DEGENERACY_TOL),
        g_nondegenerate: var_grad > T::zero(),
    })
}

/// Covariance of `(f₁, f₂, f₁₁, f₁₂, f₂₂)` at a point: `2π²n·I₂` on the
/// gradient block and
///
/// ```text
/// 2π⁴n² [ 3+μ   0    1−μ ]
///       [ 0     1−μ  0   ]
///       [ 1−μ   0    3+μ ]
/// ```
///
/// on the Hessian block, with `μ = μ̂ₙ(4)`.
pub fn derivative_covariance_matrix<T: Real>(n: u64) -> Result<[[T; 5]; 5]> {
    let mu4 = T::lit(mu4_of(n)?);
    let pi = T::PI();
    let nn = T::lit(n as f64);
    let g = T::lit(2.0) * pi * pi * nn;
    let h = T::lit(2.0) * pi.powi(4) * nn * nn;
    let diag = h * (T::lit(3.0) + mu4);
    let off = h * (T::one() - mu4);
    let z = T::zero();
    Ok([
        [g, z, z, z, z],
        [z, g, z, z, z],
        [z, z, diag, z, off],
        [z, z, z, off, z],
        [z, z, off, z, diag],
    ])
}

/// Sampling check of the conditional Jacobian expectation: draws
/// `A ~ N(0, 1 + μ̂ₙ(4) cos 4θ)` and returns `2^{1/2} π^{5/2} n^{3/2} · mean|A|`
/// with its standard error.
pub fn monte_carlo_jexp_oracle<T: Real, R: Rng + ?Sized>(
    n: u64,
    theta: T,
    samples: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate<T>> {
    if samples < 10_000 {
        return Err(Error::InvalidConfig(format!("need at least 10000 samples, got {samples}")));
    }
    let mu4 = mu4_of(n)?;
    let theta = theta.to_f64().unwrap();
    let sd = (1.0 + mu4 * (4.0 * theta).cos()).max(0.0).sqrt();
    let scale = 2f64.sqrt() * std::f64::consts::PI.powf(2.5) * (n as f64).powf(1.5);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let z: f64 = rng.sample(StandardNormal);
        let v = scale * (sd * z).abs();
        sum += v;
        sum_sq += v * v;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean: T::lit(mean),
        std_error: T::lit((var / m).sqrt()),
        samples,
    })
}
