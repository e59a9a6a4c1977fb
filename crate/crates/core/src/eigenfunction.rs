//! Real trigonometric polynomials on the unit torus, stored as
//! `Σ c_λ e(⟨λ, x⟩)` with `e(t) = exp(2πit)` and `c_{−λ} = conj(c_λ)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lattice_circle::{LatticeCircle, LatticePoint};
use crate::num::{wrap01, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct ToralEigenfunction<T> {
    terms: BTreeMap<LatticePoint, Complex<T>>,
    n: Option<u64>,
}

/// Value, gradient and Hessian at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetAtPoint<T> {
    pub f: T,
    pub grad: [T; 2],
    pub f11: T,
    pub f12: T,
    pub f22: T,
}

impl<T: Real> JetAtPoint<T> {
    pub fn grad_norm(&self) -> T {
        self.grad[0].hypot(self.grad[1])
    }

    pub fn hess_times(&self, v: [T; 2]) -> [T; 2] {
        [
            self.f11 * v[0] + self.f12 * v[1],
            self.f12 * v[0] + self.f22 * v[1],
        ]
    }

    pub fn laplacian(&self) -> T {
        self.f11 + self.f22
    }
}

impl<T: Real> ToralEigenfunction<T> {
    /// Builds from frequency/coefficient pairs; repeated frequencies are summed.
    /// Fails unless `c_{−λ} = conj(c_λ)` for every stored frequency.
    pub fn from_terms(terms: impl IntoIterator<Item = (LatticePoint, Complex<T>)>) -> Result<Self> {
        let mut map: BTreeMap<LatticePoint, Complex<T>> = BTreeMap::new();
        for (lambda, c) in terms {
            let slot = map.entry(lambda).or_default();
            *slot = *slot + c;
        }
        let tol = T::tol(1e-12, 64.0);
        for (&lambda, &c) in &map {
            let partner = map.get(&lambda.neg()).copied().unwrap_or_default();
            let scale = T::one().max(c.norm());
            if (partner - c.conj()).norm() > tol * scale {
                return Err(Error::ConjugateSymmetry(lambda.lambda1, lambda.lambda2));
            }
        }
        let mut norms = map.keys().map(|l| l.norm_sq() as u64);
        let n = norms.next().filter(|&first| norms.all(|m| m == first));
        Ok(Self { terms: map, n })
    }

    pub fn terms(&self) -> impl Iterator<Item = (LatticePoint, Complex<T>)> + '_ {
        self.terms.iter().map(|(&l, &c)| (l, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Common squared norm of all frequencies, when there is one.
    pub fn n(&self) -> Option<u64> {
        self.n
    }

    /// `E = 4π²n` for monochromatic functions.
    pub fn eigenvalue(&self) -> Option<T> {
        self.n.map(|n| T::lit(4.0) * T::PI() * T::PI() * T::lit(n as f64))
    }

    fn phase(lambda: LatticePoint, x: [T; 2]) -> Complex<T> {
        let t = wrap01(T::int(lambda.lambda1) * x[0]) + wrap01(T::int(lambda.lambda2) * x[1]);
        let arg = T::two_pi() * t;
        Complex::new(arg.cos(), arg.sin())
    }

    /// Complex sum; the imaginary part is rounding noise for valid input.
    pub fn evaluate_complex(&self, x: [T; 2]) -> Complex<T> {
        self.terms
            .iter()
            .map(|(&l, &c)| c * Self::phase(l, x))
            .fold(Complex::default(), |a, b| a + b)
    }

    pub fn value(&self, x: [T; 2]) -> T {
        self.evaluate_complex(x).re
    }

    pub fn evaluate_jet(&self, x: [T; 2]) -> JetAtPoint<T> {
        let tp = T::two_pi();
        let mut f = Complex::default();
        let mut g1 = Complex::default();
        let mut g2 = Complex::default();
        let mut h11 = Complex::default();
        let mut h12 = Complex::default();
        let mut h22 = Complex::default();
        for (&l, &c) in &self.terms {
            let e = c * Self::phase(l, x);
            let a = tp * T::int(l.lambda1);
            let b = tp * T::int(l.lambda2);
            f = f + e;
            // d/dx_j multiplies by i·2πλ_j
            g1 = g1 + Complex::new(-e.im * a, e.re * a);
            g2 = g2 + Complex::new(-e.im * b, e.re * b);
            h11 = h11 - e * (a * a);
            h12 = h12 - e * (a * b);
            h22 = h22 - e * (b * b);
        }
        JetAtPoint {
            f: f.re,
            grad: [g1.re, g2.re],
            f11: h11.re,
            f12: h12.re,
            f22: h22.re,
        }
    }

    /// Largest `|Im f|` over the given points.
    pub fn max_imag_residue(&self, points: &[[T; 2]]) -> T {
        points
            .iter()
            .map(|&x| self.evaluate_complex(x).im.abs())
            .fold(T::zero(), T::max)
    }

    /// Plain text, one `lambda1 lambda2 re(c) im(c)` line per stored frequency.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, c) in &self.terms {
            writeln!(out, "{} {} {} {}", l.lambda1, l.lambda2, c.re, c.im).unwrap();
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Blank lines and `#` comments are
    /// skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(perr(format!("expected 4 fields, found {}", fields.len())));
            }
            let l1: i64 = fields[0].parse().map_err(|_| perr(format!("bad integer `{}`", fields[0])))?;
            let l2: i64 = fields[1].parse().map_err(|_| perr(format!("bad integer `{}`", fields[1])))?;
            let re: T = fields[2].parse().map_err(|_| perr(format!("bad real `{}`", fields[2])))?;
            let im: T = fields[3].parse().map_err(|_| perr(format!("bad real `{}`", fields[3])))?;
            terms.push((LatticePoint::new(l1, l2), Complex::new(re, im)));
        }
        Self::from_terms(terms)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// Accumulates real trigonometric terms into conjugate-symmetric coefficients.
#[derive(Debug, Default)]
struct TrigBuilder<T> {
    terms: Vec<(LatticePoint, Complex<T>)>,
}

impl<T: Real> TrigBuilder<T> {
    /// `amp · cos(2π⟨λ, x⟩)`
    fn cos(mut self, l1: i64, l2: i64, amp: f64) -> Self {
        let half = Complex::new(T::lit(amp / 2.0), T::zero());
        let l = LatticePoint::new(l1, l2);
        self.terms.push((l, half));
        self.terms.push((l.neg(), half));
        self
    }

    /// `amp · sin(2π⟨λ, x⟩)`
    fn sin(mut self, l1: i64, l2: i64, amp: f64) -> Self {
        let c = Complex::new(T::zero(), T::lit(-amp / 2.0));
        let l = LatticePoint::new(l1, l2);
        self.terms.push((l, c));
        self.terms.push((l.neg(), c.conj()));
        self
    }

    /// `amp · sin(2πax) sin(2πby)`
    fn sin_sin(self, a: i64, b: i64, amp: f64) -> Self {
        self.cos(a, -b, amp / 2.0).cos(a, b, -amp / 2.0)
    }

    fn build(self) -> ToralEigenfunction<T> {
        ToralEigenfunction::from_terms(self.terms).expect("builder terms are conjugate symmetric")
    }
}

/// Explicit eigenfunctions used as regression fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// `sin(2π(8x−y)) + sin(2π(4x+7y)) + cos(2π(4x−7y))`, n = 65; mostly ovals.
    Fig1,
    /// `2(sin 8x sin y + sin 7x sin 4y + sin x sin 8y + sin 4x sin 7y)` rescaled
    /// to the unit torus, n = 65; contains closed geodesics.
    Fig2,
    /// `2cos(20πx) + cos(20πy)`, n = 100.
    Fig3,
    /// `sin(2πmx) sin(2πny)`
    Grid(i64, i64),
    /// `2cos(2πmx) + cos(2πmy)`
    Cosline(i64),
}

impl Fixture {
    pub fn build<T: Real>(self) -> Result<ToralEigenfunction<T>> {
        let b = TrigBuilder::<T>::default();
        Ok(match self {
            Fixture::Fig1 => b.sin(8, -1, 1.0).sin(4, 7, 1.0).cos(4, -7, 1.0).build(),
            Fixture::Fig2 => b
                .sin_sin(8, 1, 2.0)
                .sin_sin(7, 4, 2.0)
                .sin_sin(1, 8, 2.0)
                .sin_sin(4, 7, 2.0)
                .build(),
            Fixture::Fig3 => Fixture::Cosline(10).build()?,
            Fixture::Grid(m, n) => {
                if m < 1 || n < 1 {
                    return Err(Error::UnknownFixture(format!("grid({m},{n}) needs m, n >= 1")));
                }
                b.sin_sin(m, n, 1.0).build()
            }
            Fixture::Cosline(m) => {
                if m < 1 {
                    return Err(Error::UnknownFixture(format!("cosline({m}) needs m >= 1")));
                }
                b.cos(m, 0, 2.0).cos(0, m, 1.0).build()
            }
        })
    }
}

impl FromStr for Fixture {
    type Err = Error;

    /// Accepts `fig1`, `fig2`, `fig3`, `grid(m,n)` and `cosline(m)`; `grid:m,n`
    /// and `cosline:m` are accepted as shell-friendly spellings.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFixture(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "fig1" => return Ok(Fixture::Fig1),
            "fig2" => return Ok(Fixture::Fig2),
            "fig3" => return Ok(Fixture::Fig3),
            _ => {}
        }
        let (name, args) = if let Some(open) = t.find('(') {
            let inner = t[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
            (&t[..open], inner)
        } else if let Some((name, args)) = t.split_once(':') {
            (name, args)
        } else {
            return Err(unknown());
        };
        let nums: Vec<i64> = args
            .split(',')
            .map(|a| a.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| unknown())?;
        match (name.trim(), nums.as_slice()) {
            ("grid", &[m, n]) => Ok(Fixture::Grid(m, n)),
            ("cosline", &[m]) => Ok(Fixture::Cosline(m)),
            _ => Err(unknown()),
        }
    }
}

/// Arithmetic random wave on `E_n`: for `λ` in the half-set
/// (`λ₁ > 0`, or `λ₁ = 0 ∧ λ₂ > 0`) draw `a, b ~ N(0,1)` and set
/// `c_λ = (a + ib)/√(2N)`, `c_{−λ} = conj(c_λ)`, so that `Var f(x) = 1`.
pub fn sample_arithmetic_wave<T: Real, R: Rng + ?Sized>(
    circle: &LatticeCircle,
    rng: &mut R,
) -> ToralEigenfunction<T> {
    let scale = (2.0 * circle.r2() as f64).sqrt().recip();
    let mut terms = BTreeMap::new();
    for &l in circle.points().iter().filter(|l| l.is_positive_half()) {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let c = Complex::new(T::lit(a * scale), T::lit(b * scale));
        terms.insert(l, c);
        terms.insert(l.neg(), c.conj());
    }
    ToralEigenfunction {
        terms,
        n: Some(circle.n()),
    }
}
