use std::f64::consts::PI;

use nodal_directions::num::torus_distance;
use nodal_directions::{
    count_directional_points, enumerate_circle, sample_arithmetic_wave, CountOptions, Direction32,
    Direction64, Eigenfunction32, Eigenfunction64, Error, Fixture,
};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn count(f: &Eigenfunction64, z: &Direction64, cells: Option<usize>) -> nodal_directions::CountReport64 {
    let opts = CountOptions { grid_cells: cells, ..CountOptions::default() };
    count_directional_points(f, z, &opts).unwrap()
}

fn wave(n: u64, seed: u64) -> Eigenfunction64 {
    let c = enumerate_circle(n).unwrap();
    sample_arithmetic_wave(&c, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn translate(f: &Eigenfunction64, a: [f64; 2]) -> Eigenfunction64 {
    Eigenfunction64::from_terms(f.terms().map(|(l, c)| {
        let t = 2.0 * PI * (l.lambda1 as f64 * a[0] + l.lambda2 as f64 * a[1]);
        (l, c * Complex::from_polar(1.0, t))
    }))
    .unwrap()
}

#[test]
fn points_are_directional_and_separated() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (i, n) in [5u64, 13, 25, 65].into_iter().enumerate() {
        let f = wave(n, i as u64);
        let z = Direction64::from_angle(rng.random_range(0.0..PI)).unwrap();
        let r = count(&f, &z, None);
        let xi = z.xi();
        for p in &r.points {
            let j = f.evaluate_jet(p.x);
            let g = j.grad[0] * xi[0] + j.grad[1] * xi[1];
            assert!(j.f.abs() < 1e-8 && g.abs() < 1e-8 * j.grad_norm().max(1.0));
            assert!(j.grad_norm() > 1e-6);
        }
        for (a, p) in r.points.iter().enumerate() {
            for q in &r.points[a + 1..] {
                assert!(torus_distance(p.x, q.x) > 1e-6);
            }
        }
        assert!(r.count as u64 <= 8 * n);
        if !r.inconclusive {
            assert_eq!(r.count % 2, 0, "n={n}");
        }
    }
}

#[test]
fn refinement_stability() {
    for (n, seed, theta) in [(5u64, 3u64, 0.2), (13, 4, 1.0), (25, 5, 2.5), (65, 6, 0.7)] {
        let f = wave(n, seed);
        let z = Direction64::from_angle(theta).unwrap();
        let a = count(&f, &z, None);
        let b = count(&f, &z, Some(2 * a.grid_cells));
        assert_eq!(a.count, b.count, "n={n}");
    }
    for fx in [Fixture::Fig1, Fixture::Fig3] {
        let f: Eigenfunction64 = fx.build().unwrap();
        for (k1, k2) in [(1, 0), (0, 1), (1, 1), (2, -1)] {
            let z = Direction64::from_rational(k1, k2).unwrap();
            let a = count(&f, &z, None);
            let b = count(&f, &z, Some(2 * a.grid_cells));
            assert_eq!(a.count, b.count, "{fx:?} ({k1},{k2})");
        }
    }
}

#[test]
fn invariant_under_symmetries() {
    for (n, seed) in [(5u64, 10u64), (25, 11), (65, 12)] {
        let f = wave(n, seed);
        let z = Direction64::from_rational(1, 2).unwrap();
        let base = count(&f, &z, None).count;
        let neg = Eigenfunction64::from_terms(f.terms().map(|(l, c)| (l, -c))).unwrap();
        assert_eq!(count(&neg, &z, None).count, base);
        assert_eq!(count(&f, &Direction64::from_rational(-1, -2).unwrap(), None).count, base);
        assert_eq!(count(&f, &Direction64::from_angle(2f64.atan2(1.0) + PI).unwrap(), None).count, base);
        let shifted = translate(&f, [0.3141, 0.2718]);
        assert_eq!(count(&shifted, &z, None).count, base, "n={n}");
        // swapping coordinates swaps ζ = (1,2) with (2,1)
        let swapped = Eigenfunction64::from_terms(f.terms().map(|(l, c)| {
            (nodal_directions::LatticePoint { lambda1: l.lambda2, lambda2: l.lambda1 }, c)
        }))
        .unwrap();
        assert_eq!(count(&swapped, &Direction64::from_rational(2, 1).unwrap(), None).count, base);
    }
}

#[test]
fn geodesics_are_excluded() {
    let f: Eigenfunction64 = Fixture::Fig2.build().unwrap();
    for (k1, k2, expected) in [(1, 0, 2), (0, 1, 2), (1, 1, 1), (1, -1, 1), (1, 2, 0)] {
        let z = Direction64::from_rational(k1, k2).unwrap();
        let r = count(&f, &z, None);
        assert_eq!(r.geodesics.len(), expected, "({k1},{k2})");
        for g in &r.geodesics {
            for t in 0..50 {
                assert!(f.value(g.point(t as f64 / 50.0)).abs() < 1e-10);
            }
            for p in &r.points {
                assert!(g.distance(p.x) > 1e-6);
            }
        }
        assert!(r.within_geodesic_bound);
    }
}

#[test]
fn fig3_exact_counts() {
    let f: Eigenfunction64 = Fixture::Fig3.build().unwrap();
    assert_eq!(count(&f, &Direction64::from_rational(0, 1).unwrap(), None).count, 0);
    assert_eq!(count(&f, &Direction64::from_rational(1, 0).unwrap(), None).count, 400);
    let g: Eigenfunction32 = Fixture::Fig3.build().unwrap();
    let r = count_directional_points(&g, &Direction32::from_rational(1, 0).unwrap(), &CountOptions::default()).unwrap();
    assert_eq!(r.count, 400);
}

#[test]
fn grid_too_coarse() {
    let f = wave(65, 0);
    let z = Direction64::from_angle(0.5).unwrap();
    let e = count_directional_points(&f, &z, &CountOptions::with_grid_cells(8)).unwrap_err();
    assert!(matches!(e, Error::GridTooCoarse { .. }));
}
