use charsum::spectrum::{
    arc_max_spectrum, default_v_grid, exceptional_set, g_aux, midpoint_g, midpoint_spectrum,
    tail_curve, transform_at, ChirpZ, GMode,
};
use charsum::{Complex64, DirichletCharacter, Error};

#[test]
fn dft_linear_and_matches_gauss_points() {
    let chi = DirichletCharacter::from_prime(1009, 4, 3).unwrap();
    let c = chi.coefficients(0);
    let plan = ChirpZ::new(1009);
    let out = plan.twisted_dft(&c, 0.0).unwrap();
    let tau = chi.gauss_sum();
    for k in 0..1009u64 {
        assert!((out[k as usize] - chi.value(k).conj() * tau).norm() < 1e-9);
    }
    let doubled: Vec<Complex64> = c.iter().map(|z| z * 2.0).collect();
    let out2 = plan.twisted_dft(&doubled, 0.37).unwrap();
    let out1 = plan.twisted_dft(&c, 0.37).unwrap();
    for (a, b) in out2.iter().zip(&out1) {
        assert!((a - 2.0 * b).norm() < 1e-10);
    }
    assert!(matches!(plan.twisted_dft(&c[1..], 0.0), Err(Error::LengthMismatch { .. })));
}

#[test]
fn dft_relative_linf_error() {
    for (p, d) in [(101u64, 2u64), (1009, 7), (10_007, 2)] {
        let chi = DirichletCharacter::from_prime(p, d, 1).unwrap();
        let fast = transform_at(&chi, 5, 0.25);
        let step = (p / 97).max(1);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for k in (0..p).step_by(step as usize) {
            let direct = chi.eval_f_arc(k as i64, 0.25, 5);
            num = num.max((fast[k as usize] - direct).norm());
            den = den.max(direct.norm());
        }
        assert!(num / den <= 1e-8, "p={p}");
    }
}

#[test]
fn parseval_and_shift_invariance() {
    for (p, d) in [(10_007u64, 2u64), (10_009, 3), (10_009, 4)] {
        let chi = DirichletCharacter::from_prime(p, d, 1).unwrap();
        let spec = midpoint_spectrum(&chi, 0);
        assert!((spec.mean_square() - (p - 1) as f64 / p as f64).abs() <= 1e-6);
        let a = midpoint_spectrum(&chi, 17);
        let b = midpoint_spectrum(&chi, 17 + p as i64);
        assert_eq!(a.values, b.values);
    }
}

#[test]
fn midpoint_equals_twice_g() {
    let chi = DirichletCharacter::from_prime(10_009, 3, 2).unwrap();
    let spec = midpoint_spectrum(&chi, 0);
    let g = midpoint_g(&chi, 0);
    let worst = spec
        .values
        .iter()
        .zip(&g)
        .map(|(v, z)| (2.0 * z.norm() - v).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8);
    for k in [0i64, 1, 5000, 10_008] {
        let exact = g_aux(&chi, k, 0.5, 0, GMode::Exact).unwrap();
        assert!((exact.value - g[k as usize]).norm() < 1e-9);
    }
}

#[test]
fn gauss_point_magnitudes_independent_of_shift() {
    let chi = DirichletCharacter::from_prime(1009, 6, 5).unwrap();
    let sp = (1009f64).sqrt();
    for a in [0i64, 1, 400, -3] {
        let f = transform_at(&chi, a, 0.0);
        for (k, z) in f.iter().enumerate().skip(1) {
            assert!((z.norm() - sp).abs() < 1e-9, "a={a} k={k}");
        }
    }
}

#[test]
fn arc_max_sandwich() {
    let chi = DirichletCharacter::from_prime(1009, 4, 1).unwrap();
    let mid = midpoint_spectrum(&chi, 0);
    let coarse = arc_max_spectrum(&chi, 0, 8, 0.0).unwrap();
    let fine = arc_max_spectrum(&chi, 0, 32, 0.0).unwrap();
    let refined = arc_max_spectrum(&chi, 0, 32, 1e-4).unwrap();
    for k in 0..1009 {
        assert!(coarse.values[k] >= mid.values[k] - 1e-12);
        assert!(fine.values[k] >= coarse.values[k] - 1e-12);
        assert!(refined.values[k] >= fine.values[k]);
    }
}

#[test]
fn arc_max_global_max_is_grid_max() {
    let chi = DirichletCharacter::legendre(211).unwrap();
    let t = 16;
    let spec = arc_max_spectrum(&chi, 0, t, 0.0).unwrap();
    let sp = (211f64).sqrt();
    let grid_max = (0..t)
        .flat_map(|i| transform_at(&chi, 0, i as f64 / t as f64))
        .map(|z| z.norm() / sp)
        .fold(0.0, f64::max);
    assert!((spec.max() - grid_max).abs() < 1e-12);
}

#[test]
fn refined_value_close_to_true_arc_max() {
    let chi = DirichletCharacter::legendre(101).unwrap();
    let spec = arc_max_spectrum(&chi, 0, 32, 1e-7).unwrap();
    let sp = (101f64).sqrt();
    for k in [0i64, 13, 50, 100] {
        let dense = (0..=4000)
            .map(|i| chi.eval_f_arc(k, i as f64 / 4000.0, 0).norm() / sp)
            .fold(0.0, f64::max);
        let got = spec.values[k as usize];
        assert!(got >= dense - 1e-6, "k={k}: {got} < {dense}");
        assert!(got <= dense + 1e-6, "k={k}: {got} > {dense}");
    }
}

#[test]
fn arc_max_rejects_small_grid() {
    let chi = DirichletCharacter::legendre(101).unwrap();
    assert!(arc_max_spectrum(&chi, 0, 1, 1e-4).is_err());
}

#[test]
fn tail_curve_integrality() {
    let chi = DirichletCharacter::legendre(101).unwrap();
    let spec = midpoint_spectrum(&chi, 0);
    let curve = tail_curve(&spec, &default_v_grid(&spec, 0.01)).unwrap();
    for (phi, c) in curve.phi.iter().zip(&curve.counts) {
        assert_eq!(*phi, *c as f64 / 101.0);
        assert!((phi * 101.0 - (phi * 101.0).round()).abs() < 1e-9);
    }
    assert_eq!(curve.phi[0], 1.0);
}

#[test]
fn exceptional_set_small() {
    let chi = DirichletCharacter::legendre(10_007).unwrap();
    let rep = exceptional_set(&chi, true);
    assert_eq!(rep.count as usize, rep.members.as_ref().unwrap().len());
    assert!((rep.count as f64) <= (10_007f64).powf(0.75));
    let g = midpoint_g(&chi, 0);
    let brute = g.iter().filter(|z| z.norm() >= rep.threshold).count();
    assert_eq!(brute as u64, rep.count);
}
