//! Numerical count of the nodal points whose normal is `±ζ`.
//!
//! The nodal set `{f = 0}` is traced on a periodic grid, the directional
//! function `g = ⟨∇f, ξ⟩` (`ξ = ζ^⊥`) is sign-checked along every traced
//! curve, and each sign change seeds a Newton iteration on the system
//! `(f, g) = 0`. For rational directions, closed geodesics orthogonal to `ζ`
//! that lie inside the nodal set are detected first and excluded from the
//! point count.

use num_complex::Complex;
use serde::Serialize;

use crate::contour::{Polyline, SampledGrid};
use crate::eigenfunction::ToralEigenfunction;
use crate::error::{Error, Result};
use crate::num::{gcd, torus_distance, wrap01, wrap_half, Real};

const GEODESIC_SCAN_SAMPLES: usize = 4096;
const NEWTON_MAX_ITER: usize = 60;

/// A direction `ζ` modulo sign, either generic (angle only) or rational.
///
/// Rationality is declared by the caller, never inferred from the angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction<T> {
    theta: T,
    rational: Option<(i64, i64)>,
}

impl<T: Real> Direction<T> {
    /// Generic direction at angle `theta`, reduced to `[0, π)`.
    pub fn from_angle(theta: T) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidDirection(format!("angle {theta} is not finite")));
        }
        let pi = T::PI();
        let mut t = theta - pi * (theta / pi).floor();
        if t >= pi || t < T::zero() {
            t = T::zero();
        }
        Ok(Self {
            theta: t,
            rational: None,
        })
    }

    /// Rational direction along the integer vector `(k1, k2)`; the vector is
    /// reduced to a primitive one with angle in `[0, π)`.
    pub fn from_rational(k1: i64, k2: i64) -> Result<Self> {
        if k1 == 0 && k2 == 0 {
            return Err(Error::InvalidDirection("zero vector".into()));
        }
        let g = gcd(k1, k2);
        let (mut a, mut b) = (k1 / g, k2 / g);
        if b < 0 || (b == 0 && a < 0) {
            a = -a;
            b = -b;
        }
        let theta = T::int(b).atan2(T::int(a));
        Ok(Self {
            theta,
            rational: Some((a, b)),
        })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn rational(&self) -> Option<(i64, i64)> {
        self.rational
    }

    /// `h(ζ) = max(|k₁|, |k₂|)` for rational directions.
    pub fn height(&self) -> Option<i64> {
        self.rational.map(|(a, b)| a.abs().max(b.abs()))
    }

    /// Unit vector `(cos θ, sin θ)`.
    pub fn zeta(&self) -> [T; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    /// `ξ = ζ^⊥ = (−sin θ, cos θ)`.
    pub fn xi(&self) -> [T; 2] {
        [-self.theta.sin(), self.theta.cos()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountTolerances<T> {
    /// Bound on `max(|f|, |g|)` at an accepted root.
    pub residual: T,
    /// Relative to the RMS gradient component `π√(2n)`.
    pub singular: T,
    /// Torus distance below which two roots are the same point.
    pub dedupe_radius: T,
    /// Square root of the accepted minimum of the line restriction energy.
    pub geodesic: T,
}

impl<T: Real> Default for CountTolerances<T> {
    fn default() -> Self {
        Self {
            residual: T::tol(1e-10, 4096.0),
            singular: T::tol(1e-6, 64.0),
            dedupe_radius: T::tol(1e-6, 16384.0),
            geodesic: T::tol(1e-8, 1024.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountOptions<T> {
    /// Defaults to [`default_grid_cells`].
    pub grid_cells: Option<usize>,
    pub tolerances: CountTolerances<T>,
}

impl<T: Real> Default for CountOptions<T> {
    fn default() -> Self {
        Self {
            grid_cells: None,
            tolerances: CountTolerances::default(),
        }
    }
}

impl<T: Real> CountOptions<T> {
    pub fn with_grid_cells(cells: usize) -> Self {
        Self {
            grid_cells: Some(cells),
            ..Self::default()
        }
    }
}

/// `max(128, ⌈24√n⌉)`: about 24 samples per wavelength.
pub fn default_grid_cells(n: u64) -> usize {
    128.max((24.0 * (n as f64).sqrt()).ceil() as usize)
}

/// Smallest accepted grid: `⌈4√n⌉`.
pub fn minimum_grid_cells(n: u64) -> usize {
    (4.0 * (n as f64).sqrt()).ceil() as usize
}

/// `(2/π²)·E = 8n`.
pub fn bezout_bound(n: u64) -> u64 {
    8 * n
}

/// `√E/(π h(ζ)) = 2√n / h(ζ)`; requires a rational direction.
pub fn geodesic_bound<T: Real>(n: u64, zeta: &Direction<T>) -> Result<T> {
    let h = zeta
        .height()
        .ok_or_else(|| Error::InvalidDirection("geodesic bound needs a rational direction".into()))?;
    Ok(T::lit(2.0 * (n as f64).sqrt()) / T::int(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionalPoint<T> {
    pub x: [T; 2],
    pub residual_f: T,
    pub residual_g: T,
    pub grad_norm: T,
}

/// The closed geodesic `{x : ⟨x, normal⟩ ≡ offset mod 1}`, running along
/// `direction = (−k₂, k₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geodesic<T> {
    pub direction: (i64, i64),
    pub normal: (i64, i64),
    pub offset: T,
}

impl<T: Real> Geodesic<T> {
    /// Euclidean distance on the torus from `x` to the geodesic.
    pub fn distance(&self, x: [T; 2]) -> T {
        let (k1, k2) = self.normal;
        let s = T::int(k1) * x[0] + T::int(k2) * x[1] - self.offset;
        wrap_half(s).abs() / T::int(k1 * k1 + k2 * k2).sqrt()
    }

    /// Point of the geodesic at parameter `t ∈ [0, 1)`.
    pub fn point(&self, t: T) -> [T; 2] {
        let (k1, k2) = self.normal;
        let kk = T::int(k1 * k1 + k2 * k2);
        let (v1, v2) = self.direction;
        [
            wrap01(self.offset * T::int(k1) / kk + t * T::int(v1)),
            wrap01(self.offset * T::int(k2) / kk + t * T::int(v2)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CountDiagnostics {
    pub polylines: usize,
    pub seeds: usize,
    pub newton_failures: usize,
    pub duplicates: usize,
    pub on_geodesic: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalCountReport<T> {
    pub n: u64,
    pub direction: Direction<T>,
    pub grid_cells: usize,
    pub points: Vec<DirectionalPoint<T>>,
    pub geodesics: Vec<Geodesic<T>>,
    pub singular_suspects: Vec<[T; 2]>,
    pub count: usize,
    pub bezout_bound: u64,
    pub geodesic_bound: Option<T>,
    pub within_bezout: bool,
    pub within_geodesic_bound: bool,
    /// Singular nodal points were found; `count` excludes them and may not be
    /// the full size of the directional set.
    pub inconclusive: bool,
    pub diagnostics: CountDiagnostics,
}

/// Nodal polylines of `f` traced on a `cells × cells` periodic grid.
pub fn nodal_polylines<T: Real>(f: &ToralEigenfunction<T>, cells: usize) -> Vec<Polyline<T>> {
    let grid = SampledGrid::unit_torus(cells, |x| f.value(x));
    grid.march(Some(&|x| f.value(x)))
}

/// Closed geodesics orthogonal to a rational `ζ = (k₁, k₂)` on which `f`
/// vanishes identically.
///
/// Along `x₀(φ) + t v`, with `v = (−k₂, k₁)` and `x₀(φ) = φ k/|k|²`, the
/// restriction of `f` is `Σ_m a_m(φ) e(m t)` where `a_m` collects the terms
/// with `⟨λ, v⟩ = m`. The line lies in the nodal set iff every `a_m(φ)`
/// vanishes, i.e. iff `S(φ) = Σ |a_m(φ)|²` does. `S` is scanned on a dense
/// grid and each local minimum is polished by Gauss–Newton.
pub fn detect_geodesics<T: Real>(
    f: &ToralEigenfunction<T>,
    zeta: &Direction<T>,
    tol_geodesic: T,
) -> Result<Vec<Geodesic<T>>> {
    let (k1, k2) = zeta
        .rational()
        .ok_or_else(|| Error::InvalidDirection("geodesic detection needs a rational direction".into()))?;
    let v = (-k2, k1);
    let kk = T::int(k1 * k1 + k2 * k2);

    // (m, [(c_λ, ⟨λ,k⟩/|k|²)])
    let mut groups: Vec<(i64, Vec<(Complex<T>, T)>)> = Vec::new();
    for (l, c) in f.terms() {
        let m = l.dot(v);
        let s = T::int(l.dot((k1, k2))) / kk;
        match groups.iter_mut().find(|(gm, _)| *gm == m) {
            Some((_, g)) => g.push((c, s)),
            None => groups.push((m, vec![(c, s)])),
        }
    }

    let tp = T::two_pi();
    let eval = |phi: T| -> (T, T, T) {
        // S, Σ Re(conj(a') a), Σ |a'|²
        let (mut s, mut num, mut den) = (T::zero(), T::zero(), T::zero());
        for (_, g) in &groups {
            let mut a = Complex::<T>::default();
            let mut da = Complex::<T>::default();
            for &(c, w) in g {
                let arg = tp * w * phi;
                let e = c * Complex::new(arg.cos(), arg.sin());
                a = a + e;
                da = da + e * Complex::new(T::zero(), tp * w);
            }
            s = s + a.norm_sqr();
            num = num + (da.conj() * a).re;
            den = den + da.norm_sqr();
        }
        (s, num, den)
    };

    let samples: Vec<T> = (0..GEODESIC_SCAN_SAMPLES)
        .map(|i| eval(T::lit(i as f64 / GEODESIC_SCAN_SAMPLES as f64)).0)
        .collect();
    let nsamp = samples.len();
    let step_tol = T::epsilon() * T::lit(4.0);
    let mut found: Vec<T> = Vec::new();
    for i in 0..nsamp {
        let prev = samples[(i + nsamp - 1) % nsamp];
        let next = samples[(i + 1) % nsamp];
        if !(samples[i] <= prev && samples[i] <= next) {
            continue;
        }
        let mut phi = T::lit(i as f64 / nsamp as f64);
        for _ in 0..NEWTON_MAX_ITER {
            let (_, num, den) = eval(phi);
            if den <= T::zero() {
                break;
            }
            let d = num / den;
            // stay near the sampled minimum
            let d = d.max(-T::lit(2.0 / nsamp as f64)).min(T::lit(2.0 / nsamp as f64));
            phi = phi - d;
            if d.abs() < step_tol {
                break;
            }
        }
        let s = eval(phi).0;
        if s < tol_geodesic * tol_geodesic {
            let phi = wrap01(phi);
            let dup = found.iter().any(|&q| wrap_half(q - phi).abs() < T::lit(1e-9).max(step_tol * T::lit(1e3)));
            if !dup {
                found.push(phi);
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(found
        .into_iter()
        .map(|offset| Geodesic {
            direction: v,
            normal: (k1, k2),
            offset,
        })
        .collect())
}

enum Polish<T> {
    Root([T; 2]),
    Failed,
}

/// Newton on `(f, ⟨∇f, ξ⟩) = 0`, Jacobian rows `∇f` and `Hξ`.
fn polish_directional<T: Real>(f: &ToralEigenfunction<T>, seed: [T; 2], xi: [T; 2], max_step: T) -> Polish<T> {
    let mut x = seed;
    let step_tol = T::epsilon() * T::lit(16.0);
    for _ in 0..NEWTON_MAX_ITER {
        let j = f.evaluate_jet(x);
        let g = j.grad[0] * xi[0] + j.grad[1] * xi[1];
        let hx = j.hess_times(xi);
        let det = j.grad[0] * hx[1] - j.grad[1] * hx[0];
        if det == T::zero() || !det.is_finite() {
            return Polish::Failed;
        }
        let mut dx = [
            (j.f * hx[1] - g * j.grad[1]) / det,
            (j.grad[0] * g - hx[0] * j.f) / det,
        ];
        let len = dx[0].hypot(dx[1]);
        if !len.is_finite() {
            return Polish::Failed;
        }
        if len > max_step {
            dx = [dx[0] * max_step / len, dx[1] * max_step / len];
        }
        x = [wrap01(x[0] - dx[0]), wrap01(x[1] - dx[1])];
        if len < step_tol {
            break;
        }
    }
    Polish::Root(x)
}

/// Newton on `∇f = 0`; used to classify seeds near singular nodal points.
fn polish_critical<T: Real>(f: &ToralEigenfunction<T>, seed: [T; 2], max_step: T) -> Option<[T; 2]> {
    let mut x = seed;
    let step_tol = T::epsilon() * T::lit(16.0);
    for _ in 0..NEWTON_MAX_ITER {
        let j = f.evaluate_jet(x);
        let det = j.f11 * j.f22 - j.f12 * j.f12;
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let dx = [
            (j.grad[0] * j.f22 - j.grad[1] * j.f12) / det,
            (j.f11 * j.grad[1] - j.f12 * j.grad[0]) / det,
        ];
        let len = dx[0].hypot(dx[1]);
        if !len.is_finite() || len > max_step {
            return None;
        }
        x = [wrap01(x[0] - dx[0]), wrap01(x[1] - dx[1])];
        if len < step_tol {
            break;
        }
    }
    Some(x)
}

fn push_unique<T: Real>(list: &mut Vec<[T; 2]>, x: [T; 2], radius: T) -> bool {
    if list.iter().any(|&y| torus_distance(x, y) < radius) {
        false
    } else {
        list.push(x);
        true
    }
}

/// Counts the isolated nonsingular nodal points of `f` with normal `±ζ`.
pub fn count_directional_points<T: Real>(
    f: &ToralEigenfunction<T>,
    zeta: &Direction<T>,
    options: &CountOptions<T>,
) -> Result<DirectionalCountReport<T>> {
    let n = f.n().filter(|&n| n > 0).ok_or(Error::NotMonochromatic)?;
    let cells = options.grid_cells.unwrap_or_else(|| default_grid_cells(n));
    let required = minimum_grid_cells(n);
    if cells < required {
        return Err(Error::GridTooCoarse { cells, n, required });
    }
    let tol = options.tolerances;

    let geodesics = if zeta.rational().is_some() {
        detect_geodesics(f, zeta, tol.geodesic)?
    } else {
        Vec::new()
    };
    let on_geodesic = |x: [T; 2]| geodesics.iter().any(|g| g.distance(x) < tol.dedupe_radius);

    let xi = zeta.xi();
    let wavelength = T::lit((n as f64).sqrt().recip());
    let max_step = wavelength * T::lit(0.25);
    let cell = T::one() / T::lit(cells as f64);
    let grad_floor = tol.singular * T::PI() * T::lit((2.0 * n as f64).sqrt());

    let polylines = nodal_polylines(f, cells);
    let mut diagnostics = CountDiagnostics {
        polylines: polylines.len(),
        ..Default::default()
    };

    let mut roots: Vec<[T; 2]> = Vec::new();
    let mut points = Vec::new();
    let mut singular: Vec<[T; 2]> = Vec::new();

    for line in &polylines {
        let pts = &line.points;
        let gs: Vec<T> = pts
            .iter()
            .map(|&p| {
                let j = f.evaluate_jet(p);
                j.grad[0] * xi[0] + j.grad[1] * xi[1]
            })
            .collect();
        let segs = if line.closed { pts.len() } else { pts.len().saturating_sub(1) };
        for k in 0..segs {
            let k1 = (k + 1) % pts.len();
            if (gs[k] >= T::zero()) == (gs[k1] >= T::zero()) {
                continue;
            }
            diagnostics.seeds += 1;
            let t = gs[k] / (gs[k] - gs[k1]);
            let d = [wrap_half(pts[k1][0] - pts[k][0]), wrap_half(pts[k1][1] - pts[k][1])];
            let seed = [wrap01(pts[k][0] + t * d[0]), wrap01(pts[k][1] + t * d[1])];

            let accepted = match polish_directional(f, seed, xi, max_step) {
                Polish::Root(x) => {
                    let j = f.evaluate_jet(x);
                    let g = j.grad[0] * xi[0] + j.grad[1] * xi[1];
                    if j.f.abs().max(g.abs()) < tol.residual {
                        Some((x, j, g))
                    } else {
                        None
                    }
                }
                Polish::Failed => None,
            };
            match accepted {
                Some((x, j, g)) => {
                    if on_geodesic(x) {
                        diagnostics.on_geodesic += 1;
                    } else if j.grad_norm() <= grad_floor {
                        push_unique(&mut singular, x, tol.dedupe_radius);
                    } else if push_unique(&mut roots, x, tol.dedupe_radius) {
                        points.push(DirectionalPoint {
                            x,
                            residual_f: j.f.abs(),
                            residual_g: g.abs(),
                            grad_norm: j.grad_norm(),
                        });
                    } else {
                        diagnostics.duplicates += 1;
                    }
                }
                None => {
                    diagnostics.newton_failures += 1;
                    if let Some(x) = polish_critical(f, seed, cell * T::lit(2.0)) {
                        let j = f.evaluate_jet(x);
                        let near = torus_distance(x, seed) < cell * T::lit(2.0);
                        if near && j.f.abs() < tol.residual && j.grad_norm() <= grad_floor {
                            if on_geodesic(x) {
                                diagnostics.on_geodesic += 1;
                            } else {
                                push_unique(&mut singular, x, tol.dedupe_radius);
                            }
                        }
                    }
                }
            }
        }
    }

    let lex = |a: &[T; 2], b: &[T; 2]| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap());
    points.sort_by(|a, b| lex(&a.x, &b.x));
    singular.sort_by(lex);

    let count = points.len();
    let bezout = bezout_bound(n);
    let gbound = zeta.rational().map(|_| geodesic_bound(n, zeta)).transpose()?;
    Ok(DirectionalCountReport {
        n,
        direction: *zeta,
        grid_cells: cells,
        within_bezout: count as u64 <= bezout,
        within_geodesic_bound: gbound.is_none_or(|b| T::lit(geodesics.len() as f64) <= b),
        inconclusive: !singular.is_empty(),
        points,
        geodesics,
        singular_suspects: singular,
        count,
        bezout_bound: bezout,
        geodesic_bound: gbound,
        diagnostics,
    })
}
