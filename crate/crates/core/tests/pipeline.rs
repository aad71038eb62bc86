use ptmat::construct::{build_h2, build_h3, check_pt_symmetry, fit_pt2, Pt2Params};
use ptmat::cpt::build_frame;
use ptmat::random::{random_pt3, random_unbroken_pt2};
use ptmat::{SquareMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn two_level_build_fit_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let p = random_unbroken_pt2(&mut rng, 0.8);
        let h = build_h2(&p);
        let (fitted, parity) = fit_pt2(&h, 1e-10).unwrap();
        assert!(build_h2(&fitted).distance(&h) < 1e-9);
        assert!(check_pt_symmetry(&h, &parity).unwrap() < 1e-12);

        let frame = build_frame(&h, &parity, 1e-10).unwrap();
        assert!(frame.passes(1e-9), "{:?}", frame.residuals);
        let herm = &frame.h;
        assert!(herm.distance(&herm.dagger()) < 1e-9);
        let mut e = frame.energies.clone();
        e.sort_by(f64::total_cmp);
        let tr = h.trace().re;
        assert!((e[0] + e[1] - tr).abs() < 1e-9);
    }
}

#[test]
fn three_level_family_is_pt_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = random_pt3(&mut rng, 2.0, 1.0);
        let h = build_h3(&p);
        assert!(check_pt_symmetry(&h, &p.parity()).unwrap() < 1e-12);
    }
}

#[test]
fn hermitian_limit_has_trivial_metric() {
    let p = Pt2Params { epsilon: 0.3, gamma: 1.2, mu: 0.0, nu: 0.0, theta: 0.9, phi: -0.5 };
    let h = build_h2(&p);
    let frame = build_frame(&h, &p.parity(), 1e-10).unwrap();
    let one = SquareMatrix::scalar(2, C64::new(1.0, 0.0));
    assert!(frame.w.distance(&one) < 1e-10);
    assert!(frame.h.distance(&h) < 1e-10);
}
