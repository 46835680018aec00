use charsum::arith::{gcd, is_prime, next_admissible_prime};
use charsum::charmod::find_primitive_root;
use charsum::{Complex64, DirichletCharacter, PrimeModulus};
use proptest::prelude::*;

fn divisors(n: u64) -> Vec<u64> {
    (2..=n).filter(|d| n % d == 0).collect()
}

/// Strategy over valid `(p, d, m)` with `p ≤ 10^5`.
fn character_params(max_p: u64) -> impl Strategy<Value = (u64, u64, u64)> {
    (3u64..max_p, any::<u64>(), any::<u64>()).prop_filter_map("no admissible prime", move |(start, a, b)| {
        let p = next_admissible_prime(start, 2);
        if p > max_p {
            return None;
        }
        let ds: Vec<u64> = divisors(p - 1).into_iter().filter(|&d| d <= 48).collect();
        let d = ds[(a % ds.len() as u64) as usize];
        let units: Vec<u64> = (1..d).filter(|&m| gcd(m, d) == 1).collect();
        let m = units[(b % units.len() as u64) as usize];
        Some((p, d, m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn order_is_exact((p, d, m) in character_params(100_000)) {
        let chi = DirichletCharacter::from_prime(p, d, m).unwrap();
        prop_assert!(chi.power_is_principal(d));
        // χ^e is principal iff it is trivial at the generator.
        let g = chi.generator();
        for e in 1..d {
            prop_assert!((chi.exponent(g).unwrap() as u64 * e) % d != 0);
        }
    }

    #[test]
    fn gauss_modulus((p, d, m) in character_params(100_000)) {
        let chi = DirichletCharacter::from_prime(p, d, m).unwrap();
        let sp = (p as f64).sqrt();
        prop_assert!((chi.gauss_sum().norm() - sp).abs() <= 1e-9 * sp);
    }

    #[test]
    fn complete_sum_vanishes((p, d, m) in character_params(100_000)) {
        let chi = DirichletCharacter::from_prime(p, d, m).unwrap();
        let total: Complex64 = (0..p).map(|n| chi.value(n)).sum();
        prop_assert!(total.norm() <= 1e-9 * (p as f64).sqrt().max(1.0) );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn interpolation_identity((p, d, m) in character_params(2_000)) {
        let chi = DirichletCharacter::from_prime(p, d, m).unwrap();
        let tau = chi.gauss_sum();
        let worst = (0..p)
            .map(|k| (chi.eval_f_direct(k as f64 / p as f64, 0) - chi.value(k).conj() * tau).norm())
            .fold(0.0, f64::max);
        prop_assert!(worst <= 1e-6 * (p as f64).sqrt());
    }
}

#[test]
fn interpolation_identity_at_10007() {
    let chi = DirichletCharacter::legendre(10_007).unwrap();
    let tau = chi.gauss_sum();
    let p = 10_007u64;
    let worst = (0..p)
        .step_by(7)
        .map(|k| (chi.eval_f_arc(k as i64, 0.0, 0) - chi.value(k).conj() * tau).norm())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6 * (p as f64).sqrt());
}

#[test]
fn primitive_roots_examples() {
    for (p, g) in [(5, 2), (7, 3), (13, 2)] {
        assert_eq!(find_primitive_root(&PrimeModulus::new(p).unwrap()), g);
    }
}

#[test]
fn modulus_invariants() {
    for p in [3u64, 10_007, 200_003, 20_000_821] {
        let m = PrimeModulus::new(p).unwrap();
        let prod: u64 = m.factors().iter().map(|&(q, e)| q.pow(e)).product();
        assert_eq!(prod, p - 1);
        assert!(m.factors().iter().all(|&(q, _)| is_prime(q)));
    }
    assert!(PrimeModulus::new(1).is_err());
    assert!(PrimeModulus::new(10_005).is_err());
}

#[test]
fn shifted_values_are_cyclic() {
    let chi = DirichletCharacter::from_prime(31, 5, 2).unwrap();
    assert_eq!(chi.coefficients(3), chi.coefficients(3 + 31));
    assert_eq!(chi.coefficients(-1), chi.coefficients(30));
    assert_eq!(chi.coefficients(2)[0], chi.value(2));
}

#[test]
fn pattern_frequencies_bounds() {
    // Smaller analogue of the acceptance criterion.
    let p = 2_017; // 2016 = 2^5 · 3^2 · 7
    let chi = DirichletCharacter::from_prime(p, 3, 1).unwrap();
    for n in 1..=3usize {
        let tol = 5.0 * n as f64 / (p as f64).sqrt();
        for f in chi.pattern_frequencies(n) {
            assert!((f.frequency - 1.0 / 3f64.powi(n as i32)).abs() <= tol);
        }
    }
}
