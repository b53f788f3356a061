use boundcoh::projective::{cross_ratio, normalize_to_standard, ExtendedScalar, Field, MoebiusMap, ProjectivePoint};
use boundcoh::rng::{gaussian, substream, StreamRng};
use num_complex::Complex64;
use proptest::prelude::*;

fn cgauss(rng: &mut StreamRng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

fn random_map(rng: &mut StreamRng) -> MoebiusMap {
    loop {
        if let Ok(m) = MoebiusMap::complex(cgauss(rng), cgauss(rng), cgauss(rng), cgauss(rng)) {
            return m;
        }
    }
}

fn random_point(rng: &mut StreamRng) -> ProjectivePoint {
    ProjectivePoint::from_homogeneous(cgauss(rng), cgauss(rng), Field::Complex).unwrap()
}

fn finite(z: ExtendedScalar) -> Complex64 {
    z.finite().expect("finite cross ratio")
}

#[test]
fn cross_ratio_is_moebius_invariant() {
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let mut rng = substream(11, i);
        let m = random_map(&mut rng);
        let x: Vec<ProjectivePoint> = (0..4).map(|_| random_point(&mut rng)).collect();
        let y: Vec<ProjectivePoint> = x.iter().map(|p| m.apply(p)).collect();
        let a = finite(cross_ratio(&x[0], &x[1], &x[2], &x[3]).unwrap());
        let b = finite(cross_ratio(&y[0], &y[1], &y[2], &y[3]).unwrap());
        worst = worst.max((a - b).norm() / a.norm());
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn real_cross_ratio_is_invariant_under_real_maps() {
    for i in 0..1_000 {
        let mut rng = substream(12, i);
        let m = loop {
            if let Ok(m) = MoebiusMap::real(gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)) {
                break m;
            }
        };
        let x: Vec<ProjectivePoint> = (0..4).map(|_| ProjectivePoint::real(gaussian(&mut rng))).collect();
        let y: Vec<ProjectivePoint> = x.iter().map(|p| m.apply(p)).collect();
        let a = finite(cross_ratio(&x[0], &x[1], &x[2], &x[3]).unwrap());
        let b = finite(cross_ratio(&y[0], &y[1], &y[2], &y[3]).unwrap());
        assert_eq!(a.im, 0.0);
        assert_eq!(b.im, 0.0);
        assert!((a - b).norm() <= 1e-9 * a.norm());
    }
}

#[test]
fn normalization_identity() {
    let inf = ProjectivePoint::infinity(Field::Complex);
    let zero = ProjectivePoint::complex(Complex64::new(0.0, 0.0));
    let one = ProjectivePoint::complex(Complex64::new(1.0, 0.0));
    for i in 0..1_000 {
        let mut rng = substream(13, i);
        let x = cgauss(&mut rng) * 3.0;
        let z = finite(cross_ratio(&inf, &zero, &one, &ProjectivePoint::complex(x)).unwrap());
        assert!((z - x).norm() <= 1e-12 * x.norm().max(1.0));
    }
}

#[test]
fn normalizing_map_evaluates_the_cross_ratio() {
    for i in 0..1_000 {
        let mut rng = substream(14, i);
        let x: Vec<ProjectivePoint> = (0..4).map(|_| random_point(&mut rng)).collect();
        let m = normalize_to_standard(&x[0], &x[1], &x[2]).unwrap();
        let inf = ProjectivePoint::infinity(Field::Complex);
        assert!(m.apply(&x[0]).chordal_distance(&inf) < 1e-12);
        let at = |p: &ProjectivePoint| finite(m.apply(p).to_extended());
        let zero = ProjectivePoint::complex(Complex64::new(0.0, 0.0));
        let one = ProjectivePoint::complex(Complex64::new(1.0, 0.0));
        assert!(m.apply(&x[1]).chordal_distance(&zero) < 1e-12);
        assert!(m.apply(&x[2]).chordal_distance(&one) < 1e-12);
        let z = finite(cross_ratio(&x[0], &x[1], &x[2], &x[3]).unwrap());
        assert!((at(&x[3]) - z).norm() <= 1e-9 * z.norm().max(1.0));
    }
}

#[test]
fn composition_is_associative() {
    for i in 0..500 {
        let mut rng = substream(15, i);
        let (a, b, c) = (random_map(&mut rng), random_map(&mut rng), random_map(&mut rng));
        assert!(((a * b) * c).projectively_equal(&(a * (b * c)), 1e-10));
        assert!((a * a.inverse()).projectively_equal(&MoebiusMap::identity(Field::Complex), 1e-10));
        let p = random_point(&mut rng);
        let lhs = (a * b).apply(&p);
        let rhs = a.apply(&b.apply(&p));
        assert!(lhs.chordal_distance(&rhs) < 1e-10);
    }
}

proptest! {
    #[test]
    fn double_transposition_inverts(seed in any::<u64>()) {
        let mut rng = substream(seed, 0);
        let x: Vec<ProjectivePoint> = (0..4).map(|_| random_point(&mut rng)).collect();
        let a = finite(cross_ratio(&x[0], &x[1], &x[2], &x[3]).unwrap());
        let b = finite(cross_ratio(&x[1], &x[0], &x[2], &x[3]).unwrap());
        prop_assert!((a * b - 1.0).norm() <= 1e-12 * (a.norm() * b.norm()).max(1.0));
    }

    #[test]
    fn six_orbit_of_the_cross_ratio(seed in any::<u64>()) {
        let mut rng = substream(seed, 1);
        let x: Vec<ProjectivePoint> = (0..4).map(|_| random_point(&mut rng)).collect();
        let z = finite(cross_ratio(&x[0], &x[1], &x[2], &x[3]).unwrap());
        let w = finite(cross_ratio(&x[0], &x[2], &x[1], &x[3]).unwrap());
        // swapping the middle pair sends z to 1 − z
        prop_assert!((w - (1.0 - z)).norm() <= 1e-9 * z.norm().max(1.0));
    }
}
