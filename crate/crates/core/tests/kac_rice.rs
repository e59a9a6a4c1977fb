use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Matrix2, Matrix2x5, Matrix5, Matrix6, SymmetricEigen, Vector5};
use nodal_directions::{
    conditional_jacobian_expectation, conditioned_jacobian_expectation, density_factor_phi0,
    derivative_covariance_matrix, enumerate_circle, expected_count, kac_rice_breakdown,
    monte_carlo_jexp_oracle, sample_arithmetic_wave, Eigenfunction64, LatticeCircle,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const ATTAINABLE: [u64; 12] = [1, 2, 5, 10, 13, 25, 65, 85, 125, 169, 325, 1105];

/// Covariance of `(f, f₁, f₂, f₁₁, f₁₂, f₂₂)` summed over the lattice points.
fn lattice_covariance(c: &LatticeCircle) -> Matrix6<f64> {
    let a = 2.0 * PI;
    let mut m = Matrix6::zeros();
    for p in c.points() {
        let (l1, l2) = (p.lambda1 as f64, p.lambda2 as f64);
        // real and imaginary parts of each derivative symbol
        let s: [(f64, f64); 6] = [
            (1.0, 0.0),
            (0.0, a * l1),
            (0.0, a * l2),
            (-a * a * l1 * l1, 0.0),
            (-a * a * l1 * l2, 0.0),
            (-a * a * l2 * l2, 0.0),
        ];
        for i in 0..6 {
            for j in 0..6 {
                m[(i, j)] += s[i].0 * s[j].0 + s[i].1 * s[j].1;
            }
        }
    }
    m / c.r2() as f64
}

#[test]
fn derivative_covariance_matches_lattice_sums() {
    for n in ATTAINABLE {
        let c = enumerate_circle(n).unwrap();
        let full = lattice_covariance(&c);
        let d = derivative_covariance_matrix::<f64>(n).unwrap();
        let scale = full.amax();
        for i in 0..5 {
            for j in 0..5 {
                assert!((full[(i + 1, j + 1)] - d[i][j]).abs() <= 1e-12 * scale, "n={n} ({i},{j})");
            }
        }
        assert!((full[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((full[(0, 3)] + 2.0 * PI * PI * n as f64).abs() < 1e-9 * n as f64);
    }
}

#[test]
fn derivative_covariance_is_psd() {
    for n in ATTAINABLE {
        let d = derivative_covariance_matrix::<f64>(n).unwrap();
        let m = Matrix5::from_fn(|i, j| d[i][j]);
        assert_eq!(m, m.transpose());
        let eig = SymmetricEigen::new(m);
        let tol = 1e-12 * m.amax();
        assert!(eig.eigenvalues.iter().all(|&l| l >= -tol), "n={n}: {:?}", eig.eigenvalues);
    }
}

#[test]
fn phi0_matches_gaussian_density() {
    for n in ATTAINABLE {
        let d = derivative_covariance_matrix::<f64>(n).unwrap();
        for theta in [0.0, 0.3, FRAC_PI_4, 2.0] {
            let xi = [-theta.sin(), theta.cos()];
            let var_g = xi[0] * xi[0] * d[0][0] + 2.0 * xi[0] * xi[1] * d[0][1] + xi[1] * xi[1] * d[1][1];
            let cg = Matrix2::new(1.0, 0.0, 0.0, var_g);
            let oracle = 1.0 / (2.0 * PI * cg.determinant().sqrt());
            let phi0 = density_factor_phi0::<f64>(n);
            assert!((phi0 - oracle).abs() <= 1e-12 * oracle);
        }
    }
}

/// Monte Carlo estimate of `E[|J_G| | G = 0]` by Gaussian conditioning of the
/// lattice covariance on `(f, ⟨∇f, ξ⟩) = 0`.
fn conditioned_jacobian_oracle(n: u64, theta: f64, samples: usize, seed: u64) -> (f64, f64) {
    let c = enumerate_circle(n).unwrap();
    let full = lattice_covariance(&c);
    let xi = [-theta.sin(), theta.cos()];
    // V = (f₁, f₂, f₁₁, f₁₂, f₂₂), W = (f, ξ₁f₁ + ξ₂f₂)
    let vv = full.fixed_view::<5, 5>(1, 1).into_owned();
    let mut lw = Matrix2x5::zeros();
    lw[(1, 0)] = xi[0];
    lw[(1, 1)] = xi[1];
    let cov_fv = full.fixed_view::<1, 5>(0, 1).into_owned();
    let vw_ximix = vv * lw.row(1).transpose();
    let mut vw = nalgebra::Matrix5x2::zeros();
    vw.set_column(0, &cov_fv.transpose());
    vw.set_column(1, &vw_ximix);
    let ww = Matrix2::new(1.0, (cov_fv * lw.row(1).transpose())[0], (cov_fv * lw.row(1).transpose())[0], (lw.row(1) * vv * lw.row(1).transpose())[0]);
    let cond = vv - vw * ww.try_inverse().unwrap() * vw.transpose();
    let eig = SymmetricEigen::new((cond + cond.transpose()) / 2.0);
    let root = eig.eigenvectors * Matrix5::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let z = Vector5::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let v = root * z;
        let (f1, f2, f11, f12, f22) = (v[0], v[1], v[2], v[3], v[4]);
        let j = (f1 * (f12 * xi[0] + f22 * xi[1]) - f2 * (f11 * xi[0] + f12 * xi[1])).abs();
        s += j;
        s2 += j * j;
    }
    let m = samples as f64;
    let mean = s / m;
    (mean, ((s2 / m - mean * mean) / m).sqrt())
}

#[test]
fn jacobian_by_direct_conditioning() {
    for (n, theta) in [(5u64, 0.0), (25, 0.3), (65, 1.1), (1, 0.2)] {
        let (mean, se) = conditioned_jacobian_oracle(n, theta, 400_000, n);
        let full = conditioned_jacobian_expectation::<f64>(n, theta).unwrap();
        let half = conditional_jacobian_expectation::<f64>(n, theta).unwrap();
        assert!((mean - full).abs() <= 4.0 * se + 1e-3 * full, "n={n} θ={theta}: {mean} ± {se} vs {full}");
        assert!((full - 2.0 * half).abs() <= 1e-12 * full);
    }
}

#[test]
fn jexp_sampling_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, theta) in [(5u64, 0.0), (25, 0.3)] {
        let est = monte_carlo_jexp_oracle::<f64, _>(n, theta, 1_000_000, &mut rng).unwrap();
        let exact = conditional_jacobian_expectation::<f64>(n, theta).unwrap();
        assert!((est.mean - exact).abs() <= 3.0 * est.std_error, "{est:?} vs {exact}");
    }
    let zero = monte_carlo_jexp_oracle::<f64, _>(1, FRAC_PI_4, 10_000, &mut rng).unwrap();
    assert_eq!(zero.mean, 0.0);
    assert!(monte_carlo_jexp_oracle::<f64, _>(5, 0.0, 9_999, &mut rng).is_err());
}

#[test]
fn sampled_covariances() {
    let n = 5;
    let c = enumerate_circle(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples = 40_000;
    let x = [0.13, 0.37];
    let (mut vf, mut vf1, mut vfx, mut cov) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let f: Eigenfunction64 = sample_arithmetic_wave(&c, &mut rng);
        let j0 = f.evaluate_jet([0.0, 0.0]);
        let fx = f.value(x);
        vf += j0.f * j0.f;
        vf1 += j0.grad[0] * j0.grad[0];
        vfx += fx * fx;
        cov += j0.f * fx;
    }
    let m = samples as f64;
    let r: f64 = c
        .points()
        .iter()
        .map(|p| (2.0 * PI * (p.lambda1 as f64 * x[0] + p.lambda2 as f64 * x[1])).cos())
        .sum::<f64>()
        / c.r2() as f64;
    assert!((vf / m - 1.0).abs() < 0.02, "{}", vf / m);
    assert!((vfx / m - 1.0).abs() < 0.02, "{}", vfx / m);
    assert!((vf1 / m / (2.0 * PI * PI * n as f64) - 1.0).abs() < 0.05);
    assert!((cov / m - r).abs() < 0.03, "{} vs {r}", cov / m);
}

#[test]
fn degenerate_directions() {
    assert_eq!(expected_count::<f64>(1, FRAC_PI_4).unwrap(), 0.0);
    assert_eq!(expected_count::<f64>(2, 0.0).unwrap(), 0.0);
    let b = kac_rice_breakdown::<f64>(1, FRAC_PI_4).unwrap();
    assert!(b.degenerate && b.g_nondegenerate);
    assert!((expected_count::<f64>(5, 0.0).unwrap() - 3.0).abs() < 1e-12);
    assert!((expected_count::<f64>(5, FRAC_PI_4).unwrap() - 4.0).abs() < 1e-12);
    assert!((expected_count::<f32>(5, 0.0).unwrap() - 3.0).abs() < 1e-5);
}

fn attainable() -> impl Strategy<Value = u64> {
    (1u64..3000).prop_filter("sum of two squares", |&n| enumerate_circle(n).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symmetries(n in attainable(), theta in -10.0f64..10.0) {
        let e = expected_count::<f64>(n, theta).unwrap();
        let tol = 1e-12 * n as f64;
        prop_assert!((e - expected_count::<f64>(n, theta + FRAC_PI_2).unwrap()).abs() <= tol);
        prop_assert!((e - expected_count::<f64>(n, -theta).unwrap()).abs() <= tol);
    }

    #[test]
    fn bracketing(n in attainable(), theta in 0.0f64..PI) {
        let mu = enumerate_circle(n).unwrap().mu_hat(4).abs();
        let e = expected_count::<f64>(n, theta).unwrap();
        let s = n as f64 / 2f64.sqrt();
        let tol = 1e-12 * n as f64;
        prop_assert!(s * (1.0 - mu).sqrt() - tol <= e && e <= s * (1.0 + mu).sqrt() + tol);
    }

    #[test]
    fn breakdown_consistency(n in attainable(), theta in 0.0f64..PI) {
        let b = kac_rice_breakdown::<f64>(n, theta).unwrap();
        prop_assert!((b.phi0 * b.jexp - b.expectation).abs() <= 1e-12 * b.expectation.abs().max(1e-300));
        prop_assert!((b.expectation - expected_count::<f64>(n, theta).unwrap()).abs() <= 1e-12 * n as f64);
        prop_assert!(b.theta_reduced >= 0.0 && b.theta_reduced < FRAC_PI_2);
    }
}
