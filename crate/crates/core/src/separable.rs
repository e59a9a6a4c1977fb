//! Separable reference domains: the irrational rectangle and the unit disk.
//!
//! Directional counts here come from the explicit nodal structure (grids of
//! lines, diameters and concentric circles), not from contour tracing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Real;

pub const MAX_ORDER: u32 = 50;
pub const MAX_ARGUMENT: f64 = 500.0;
pub const MAX_ZERO_INDEX: u32 = 50;
/// Angular tolerance for "ζ is normal to a nodal line".
pub const ANGLE_TOL: f64 = 1e-9;

const SERIES_LIMIT: f64 = 12.0;

/// Directional count for a separable eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparableCount {
    Finite {
        count: u64,
        /// `ζ` runs along a diameter, so the candidate points on the circles
        /// coincide with singular crossings.
        singular_coincidence: bool,
    },
    Infinite,
}

impl SeparableCount {
    fn finite(count: u64) -> Self {
        SeparableCount::Finite {
            count,
            singular_coincidence: false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SeparableCount::Infinite)
    }

    pub fn count(&self) -> Option<u64> {
        match *self {
            SeparableCount::Finite { count, .. } => Some(count),
            SeparableCount::Infinite => None,
        }
    }
}

fn check_envelope<T: Real>(m: u32, x: T) -> Result<()> {
    if m > MAX_ORDER || !(x >= T::zero()) || x > T::lit(MAX_ARGUMENT) {
        return Err(Error::OutOfEnvelope(format!(
            "J_{m}({x}) outside m <= {MAX_ORDER}, 0 <= x <= {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// Bessel function of the first kind `J_m(x)` for `m ≤ 50`, `0 ≤ x ≤ 500`.
///
/// Power series for `x ≤ 12`, Miller's backward recurrence normalized by
/// `J₀ + 2ΣJ_{2k} = 1` above that.
pub fn bessel_j<T: Real>(m: u32, x: T) -> Result<T> {
    check_envelope(m, x)?;
    Ok(if x <= T::lit(SERIES_LIMIT) {
        series(m, x)
    } else {
        miller(m, x)
    })
}

fn series<T: Real>(m: u32, x: T) -> T {
    let half = x * T::lit(0.5);
    let mut term = T::one();
    for i in 1..=m {
        term = term * half / T::lit(i as f64);
    }
    if term == T::zero() {
        return T::zero();
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term = -term * q / (T::lit(k as f64) * T::lit((k + m) as f64));
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs().max(T::epsilon()) && T::lit(k as f64) > half {
            break;
        }
        if k > 500 {
            break;
        }
    }
    sum
}

fn miller<T: Real>(m: u32, x: T) -> T {
    let top = (m as f64).max(x.to_f64().unwrap());
    let start = 2 * (((top + 15.0 + (40.0 * top).sqrt()) / 2.0).ceil() as u32);
    let big = T::max_value().sqrt();
    let two_over_x = T::lit(2.0) / x;
    let (mut above, mut cur) = (T::zero(), T::one());
    let mut norm = T::zero();
    let mut result = T::zero();
    // cur holds J_k (unnormalized), above holds J_{k+1}
    for k in (1..=start).rev() {
        if k == m {
            result = cur;
        }
        if k % 2 == 0 {
            norm = norm + T::lit(2.0) * cur;
        }
        let below = T::lit(k as f64) * two_over_x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > big {
            let s = big.recip();
            cur = cur * s;
            above = above * s;
            norm = norm * s;
            result = result * s;
        }
    }
    if m == 0 {
        result = cur;
    }
    norm = norm + cur;
    result / norm
}

/// `J_m'(x) = (J_{m−1}(x) − J_{m+1}(x))/2`, with `J₀' = −J₁`.
pub fn bessel_j_derivative<T: Real>(m: u32, x: T) -> Result<T> {
    if m == 0 {
        return Ok(-bessel_j(1, x)?);
    }
    check_envelope(m + 1, x).or_else(|_| check_envelope(m, x))?;
    Ok((bessel_j(m - 1, x)? - bessel_j_unchecked(m + 1, x)) * T::lit(0.5))
}

fn bessel_j_unchecked<T: Real>(m: u32, x: T) -> T {
    if x <= T::lit(SERIES_LIMIT) {
        series(m, x)
    } else {
        miller(m, x)
    }
}

/// McCann's lower bound `√(π²(k − 1/4)² + m²)` for `j_{m,k}`.
pub fn mccann_lower_bound<T: Real>(m: u32, k: u32) -> T {
    let a = T::PI() * (T::lit(k as f64) - T::lit(0.25));
    (a * a + T::lit((m * m) as f64)).sqrt()
}

/// The first `count` positive zeros of `J_m`.
///
/// Scans upward from the McCann bound for `j_{m,1}` in steps of `π/4`, which
/// is below the spacing of consecutive zeros; each sign change is bisected and
/// then polished by Newton.
pub fn bessel_zeros<T: Real>(m: u32, count: u32) -> Result<Vec<T>> {
    if m > MAX_ORDER || count > MAX_ZERO_INDEX {
        return Err(Error::OutOfEnvelope(format!(
            "zeros of J_{m} up to k = {count} outside m, k <= {MAX_ORDER}"
        )));
    }
    let step = T::FRAC_PI_4();
    let limit = T::lit(MAX_ARGUMENT);
    let mut zeros = Vec::with_capacity(count as usize);
    let mut a = mccann_lower_bound::<T>(m, 1);
    let mut fa = bessel_j(m, a)?;
    while zeros.len() < count as usize {
        let b = a + step;
        if b > limit {
            return Err(Error::ConvergenceFailure(format!(
                "bracket for zero {} of J_{m} not found below {MAX_ARGUMENT}",
                zeros.len() + 1
            )));
        }
        let fb = bessel_j(m, b)?;
        if fb == T::zero() {
            zeros.push(b);
        } else if (fa > T::zero()) != (fb > T::zero()) && fa != T::zero() {
            zeros.push(refine_zero(m, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    for (i, &z) in zeros.iter().enumerate() {
        let k = i as u32 + 1;
        debug_assert!(z * z >= mccann_lower_bound::<T>(m, k).powi(2) * (T::one() - T::epsilon() * T::lit(8.0)));
        debug_assert!(i == 0 || zeros[i - 1] < z);
    }
    Ok(zeros)
}

fn refine_zero<T: Real>(m: u32, mut lo: T, mut hi: T, mut flo: T) -> Result<T> {
    for _ in 0..40 {
        let mid = (lo + hi) * T::lit(0.5);
        let fm = bessel_j(m, mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = (lo + hi) * T::lit(0.5);
    for _ in 0..8 {
        let d = bessel_j_derivative(m, x)?;
        if d == T::zero() {
            break;
        }
        let next = x - bessel_j(m, x)? / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        let done = (next - x).abs() <= T::epsilon() * x * T::lit(4.0);
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

/// `j_{m,k}`, the `k`-th positive zero of `J_m` (`k ≥ 1`).
pub fn bessel_zero<T: Real>(m: u32, k: u32) -> Result<T> {
    if k == 0 {
        return Err(Error::OutOfEnvelope("zero index starts at 1".into()));
    }
    Ok(*bessel_zeros::<T>(m, k)?.last().unwrap())
}

/// Angular distance between two lines through the origin (angles mod π).
fn line_angle_gap<T: Real>(a: T, b: T) -> T {
    let pi = T::PI();
    let d = (a - b) / pi;
    let r = d - d.round();
    (r * pi).abs()
}

/// Dirichlet eigenfunction `J_m(j_{m,k} r) cos(mθ + φ)` of the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskEigenfunction<T> {
    pub m: u32,
    pub k: u32,
    pub phase: T,
    pub j_mk: T,
}

impl<T: Real> DiskEigenfunction<T> {
    pub fn new(m: u32, k: u32, phase: T) -> Result<Self> {
        let j_mk = bessel_zero(m, k)?;
        let tau = T::two_pi();
        let phase = phase - tau * (phase / tau).floor();
        Ok(Self { m, k, phase, j_mk })
    }

    /// `E = j_{m,k}²`
    pub fn eigenvalue(&self) -> T {
        self.j_mk * self.j_mk
    }

    pub fn value_polar(&self, r: T, theta: T) -> T {
        let radial = bessel_j_unchecked(self.m, self.j_mk * r);
        radial * (T::lit(self.m as f64) * theta + self.phase).cos()
    }

    pub fn value(&self, x: [T; 2]) -> T {
        self.value_polar(x[0].hypot(x[1]), x[1].atan2(x[0]))
    }

    /// Angles in `[0, π)` of the `m` nodal diameters `cos(mθ + φ) = 0`.
    pub fn diameter_angles(&self) -> Vec<T> {
        let pi = T::PI();
        let mm = T::lit(self.m as f64);
        let mut out: Vec<T> = (0..self.m)
            .map(|j| {
                let t = (T::FRAC_PI_2() - self.phase + T::lit(j as f64) * pi) / mm;
                t - pi * (t / pi).floor()
            })
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Radii `j_{m,l}/j_{m,k}`, `l < k`, of the nodal circles.
    pub fn circle_radii(&self) -> Result<Vec<T>> {
        let zeros = bessel_zeros::<T>(self.m, self.k)?;
        Ok(zeros[..zeros.len() - 1].iter().map(|&z| z / self.j_mk).collect())
    }

    /// `2(k−1)` points from the nodal circles, unless `ζ` is normal to one of
    /// the `m` diameters.
    pub fn directional_count(&self, zeta_angle: T) -> SeparableCount {
        let finite = 2 * (self.k as u64 - 1);
        let tol = T::lit(ANGLE_TOL);
        let mut coincidence = false;
        for d in self.diameter_angles() {
            if line_angle_gap(zeta_angle, d + T::FRAC_PI_2()) < tol {
                return SeparableCount::Infinite;
            }
            if line_angle_gap(zeta_angle, d) < tol {
                coincidence = true;
            }
        }
        SeparableCount::Finite {
            count: finite,
            singular_coincidence: coincidence,
        }
    }

    /// Invariants of the zero: `|J_m(j)| < 1e-9` and McCann.
    pub fn check(&self) -> Result<bool> {
        let residual = bessel_j(self.m, self.j_mk)?.abs();
        let mccann = self.eigenvalue() >= mccann_lower_bound::<T>(self.m, self.k).powi(2);
        Ok(residual < T::tol(1e-9, 1e4) && mccann)
    }
}

/// `2(k−1) ≤ (2/π) j_{m,k}` and `2m ≤ 2 j_{m,k}`, for `m, k ≤ 20`.
pub fn disk_bound_check(m: u32, k: u32) -> Result<bool> {
    if m > 20 || k > 20 || k == 0 {
        return Err(Error::OutOfEnvelope(format!("disk bound check needs m <= 20, 1 <= k <= 20, got ({m}, {k})")));
    }
    let j: f64 = bessel_zero(m, k)?;
    let points = 2.0 * (k as f64 - 1.0) <= 2.0 / std::f64::consts::PI * j;
    let lines = 2.0 * m as f64 <= 2.0 * j;
    Ok(points && lines)
}

/// `sin(√α m x) sin(n y)` on the rectangle `[0, π/√α] × [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectangleSpec<T> {
    pub alpha: T,
    pub m: u32,
    pub n: u32,
}

impl<T: Real> RectangleSpec<T> {
    pub fn new(alpha: T, m: u32, n: u32) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
        }
        if m < 1 || n < 1 {
            return Err(Error::InvalidConfig(format!("mode indices must be >= 1, got ({m}, {n})")));
        }
        Ok(Self { alpha, m, n })
    }

    /// `α m² + n²`
    pub fn eigenvalue(&self) -> T {
        self.alpha * T::lit((self.m * self.m) as f64) + T::lit((self.n * self.n) as f64)
    }

    /// The nodal set is a grid: vertical lines exist iff `m ≥ 2`, horizontal
    /// lines iff `n ≥ 2`. A direction normal to one of those families sees
    /// infinitely many points, every other direction none.
    pub fn directional_count(&self, zeta_angle: T) -> SeparableCount {
        let tol = T::lit(ANGLE_TOL);
        let vertical_normal = line_angle_gap(zeta_angle, T::zero()) < tol;
        let horizontal_normal = line_angle_gap(zeta_angle, T::FRAC_PI_2()) < tol;
        if (vertical_normal && self.m >= 2) || (horizontal_normal && self.n >= 2) {
            SeparableCount::Infinite
        } else {
            SeparableCount::finite(0)
        }
    }
}
