use std::f64::consts::{FRAC_PI_2, PI};

use nodal_directions::separable::{bessel_j_derivative, bessel_zeros, mccann_lower_bound};
use nodal_directions::{bessel_j, bessel_zero, disk_bound_check, DiskEigenfunction64, RectangleSpec64, SeparableCount};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `J_m(x) = (1/2π) ∫₀^{2π} cos(mτ − x sin τ) dτ` by the trapezoid rule,
/// which converges geometrically for this periodic integrand.
fn bessel_integral(m: u32, x: f64) -> f64 {
    let k = 1024;
    let h = 2.0 * PI / k as f64;
    (0..k)
        .map(|i| {
            let t = i as f64 * h;
            (m as f64 * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / k as f64
}

#[test]
fn reference_values() {
    let j0: f64 = bessel_zero(0, 1).unwrap();
    assert!((j0 - 2.404825557695773).abs() < 1e-9);
    let j11: f64 = bessel_zero(1, 1).unwrap();
    assert!((j11 - 3.831705970207512).abs() < 1e-9);
    let j35: f64 = bessel_zero(3, 5).unwrap();
    assert!((j35 - 19.40941522643501).abs() < 1e-9);
    assert!((bessel_j::<f64>(0, 1.0).unwrap() - 0.7651976865579666).abs() < 1e-12);
}

#[test]
fn mccann_for_all_small_indices() {
    for m in 0..=50u32 {
        let zeros: Vec<f64> = bessel_zeros(m, 50).unwrap();
        for (i, &z) in zeros.iter().enumerate() {
            let k = i as u32 + 1;
            assert!(z >= mccann_lower_bound::<f64>(m, k), "m={m} k={k}");
            assert!(bessel_j::<f64>(m, z).unwrap().abs() < 1e-9);
        }
        assert!(zeros.windows(2).all(|w| w[1] - w[0] > 0.5 * PI));
    }
}

#[test]
fn zeros_interlace() {
    for m in 0..30u32 {
        let a: Vec<f64> = bessel_zeros(m, 20).unwrap();
        let b: Vec<f64> = bessel_zeros(m + 1, 20).unwrap();
        for k in 0..19 {
            assert!(a[k] < b[k] && b[k] < a[k + 1], "m={m} k={k}");
        }
    }
}

#[test]
fn bessel_ode_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-3;
    for _ in 0..100 {
        let m = rng.random_range(0..=50u32);
        let x = rng.random_range(1.0..100.0f64);
        let j = |t: f64| bessel_j::<f64>(m, t).unwrap();
        let d2 = (j(x + h) - 2.0 * j(x) + j(x - h)) / (h * h);
        let d1 = bessel_j_derivative::<f64>(m, x).unwrap();
        let r = d2 + d1 / x + (1.0 - (m * m) as f64 / (x * x)) * j(x);
        assert!(r.abs() < 1e-6, "m={m} x={x}: {r}");
    }
}

#[test]
fn disk_counts() {
    let e = DiskEigenfunction64::new(3, 5, 0.0).unwrap();
    assert_eq!(e.directional_count(0.123).count(), Some(8));
    // ζ normal to a nodal diameter
    let d = e.diameter_angles()[0];
    assert!(e.directional_count(d + FRAC_PI_2).is_infinite());
    assert_eq!(
        e.directional_count(d),
        SeparableCount::Finite { count: 8, singular_coincidence: true }
    );
    assert!(e.check().unwrap());
    let radial = DiskEigenfunction64::new(0, 4, 0.0).unwrap();
    assert_eq!(radial.directional_count(1.0).count(), Some(6));
    for m in 0..=20 {
        for k in 1..=20 {
            assert!(disk_bound_check(m, k).unwrap());
        }
    }
    assert!(disk_bound_check(21, 1).is_err());
}

#[test]
fn rectangle_counts() {
    let r = RectangleSpec64::new(2f64.sqrt(), 3, 2).unwrap();
    assert!((r.eigenvalue() - (2f64.sqrt() * 9.0 + 4.0)).abs() < 1e-12);
    assert!(r.directional_count(0.0).is_infinite());
    assert!(r.directional_count(FRAC_PI_2).is_infinite());
    assert!(r.directional_count(PI).is_infinite());
    assert_eq!(r.directional_count(0.4).count(), Some(0));
    let thin = RectangleSpec64::new(2f64.sqrt(), 1, 1).unwrap();
    assert_eq!(thin.directional_count(0.0).count(), Some(0));
    assert!(RectangleSpec64::new(-1.0, 1, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_integral(m in 0u32..=50, x in 0.0f64..150.0) {
        let v = bessel_j::<f64>(m, x).unwrap();
        prop_assert!((v - bessel_integral(m, x)).abs() < 1e-10, "m={} x={}: {}", m, x, v);
    }

    #[test]
    fn disk_invariants(m in 1u32..=12, k in 1u32..=12, phase in 0.0f64..6.0, zeta in 0.0f64..PI, alpha in 0.0f64..6.3) {
        let e = DiskEigenfunction64::new(m, k, phase).unwrap();
        let c = e.directional_count(zeta);
        prop_assert_eq!(c, e.directional_count(zeta + PI));
        // rotating the picture by α rotates the directions by α
        let rotated = DiskEigenfunction64::new(m, k, phase - m as f64 * alpha).unwrap();
        let cr = rotated.directional_count(zeta + alpha);
        prop_assert_eq!(c.is_infinite(), cr.is_infinite());
        prop_assert_eq!(c.count(), cr.count());
        // the nodal set is invariant under rotation by π/m
        prop_assert_eq!(c.count(), e.directional_count(zeta + PI / m as f64).count());
        prop_assert!(e.value([0.0, 0.0]).abs() < 1e-12);
    }
}
