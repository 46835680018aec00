//! Dirichlet characters modulo an odd prime.
//!
//! A character of order `d` is indexed by `m` with `gcd(m, d) = 1` and is
//! defined through a primitive root `g` by `χ(g^t) = e(m t / d)`. Values are
//! kept as exact exponents modulo `d` and only turned into complex numbers
//! through a table of the `d`-th roots of unity.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith;
use crate::sum::Compensated;
use crate::{e, Error, Result};

const NO_LOG: u32 = u32::MAX;

/// An odd prime together with the factorization of `p - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeModulus {
    p: u64,
    factors: Vec<(u64, u32)>,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || !arith::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Self { p, factors: arith::factorize(p - 1) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Factorization of `p - 1`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn admits_order(&self, d: u64) -> bool {
        d >= 1 && (self.p - 1) % d == 0
    }
}

pub fn find_primitive_root(modulus: &PrimeModulus) -> u64 {
    arith::primitive_root(modulus.p, &modulus.factors)
}

/// A character `χ (mod p)` of exact order `d`. Immutable once built.
#[derive(Debug)]
pub struct DirichletCharacter {
    modulus: PrimeModulus,
    order: u32,
    index: u32,
    generator: u64,
    log_table: Vec<u32>,
    roots: Vec<Complex64>,
    gauss: OnceLock<Complex64>,
}

impl DirichletCharacter {
    /// Builds the character with `χ(g) = e(m/d)`, `g` the smallest primitive root.
    pub fn new(modulus: PrimeModulus, d: u64, m: u64) -> Result<Self> {
        let p = modulus.p;
        if d < 2 {
            return Err(Error::OrderTooSmall(d));
        }
        if !modulus.admits_order(d) {
            return Err(Error::OrderDoesNotDivide { d, group_order: p - 1 });
        }
        let g = arith::gcd(m % d, d);
        if g != 1 {
            return Err(Error::IndexNotCoprime { m, d, actual: d / g });
        }
        if p > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge(p));
        }
        let generator = find_primitive_root(&modulus);
        let mut log_table = vec![NO_LOG; p as usize];
        let mut x = 1u64;
        for t in 0..(p - 1) as u32 {
            log_table[x as usize] = t;
            x = x * generator % p;
        }
        debug_assert_eq!(x, 1);
        let roots = (0..d).map(|k| root_of_unity(k, d)).collect();
        Ok(Self {
            modulus,
            order: d as u32,
            index: (m % d) as u32,
            generator,
            log_table,
            roots,
            gauss: OnceLock::new(),
        })
    }

    /// Convenience constructor from a raw prime.
    pub fn from_prime(p: u64, d: u64, m: u64) -> Result<Self> {
        Self::new(PrimeModulus::new(p)?, d, m)
    }

    /// The Legendre symbol modulo `p`.
    pub fn legendre(p: u64) -> Result<Self> {
        Self::from_prime(p, 2, 1)
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Discrete logarithm base `g`; `None` at `n ≡ 0`.
    pub fn discrete_log(&self, n: u64) -> Option<u32> {
        match self.log_table[(n % self.modulus.p) as usize] {
            NO_LOG => None,
            t => Some(t),
        }
    }

    /// Exponent `k` in `[0, d)` with `χ(n) = e(k/d)`; `None` when `p | n`.
    #[inline]
    pub fn exponent(&self, n: u64) -> Option<u32> {
        self.discrete_log(n)
            .map(|t| ((self.index as u64 * t as u64) % self.order as u64) as u32)
    }

    /// Exponent at a signed argument, reduced cyclically mod p.
    #[inline]
    pub fn exponent_at(&self, n: i64) -> Option<u32> {
        self.exponent(n.rem_euclid(self.modulus.p as i64) as u64)
    }

    /// `e(k/d)` for `k` in `[0, d)`.
    pub fn root(&self, k: u32) -> Complex64 {
        self.roots[k as usize]
    }

    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.exponent(n).map_or(Complex64::new(0.0, 0.0), |k| self.roots[k as usize])
    }

    #[inline]
    pub fn value_at(&self, n: i64) -> Complex64 {
        self.exponent_at(n).map_or(Complex64::new(0.0, 0.0), |k| self.roots[k as usize])
    }

    /// `conj(χ(n))` at a signed argument.
    #[inline]
    pub fn conj_value_at(&self, n: i64) -> Complex64 {
        self.value_at(n).conj()
    }

    /// Coefficient vector `χ(n + a)` for `n = 0..p`. The shift is reduced mod p.
    pub fn coefficients(&self, shift: i64) -> Vec<Complex64> {
        let p = self.modulus.p as i64;
        let a = shift.rem_euclid(p);
        (0..p).map(|n| self.value_at(n + a)).collect()
    }

    /// Whether `χ^e` is the principal character (checked over every residue).
    pub fn power_is_principal(&self, e: u64) -> bool {
        let d = self.order as u64;
        (1..self.modulus.p).all(|n| self.exponent(n).is_some_and(|k| (k as u64 * e) % d == 0))
    }

    /// `τ(χ) = Σ χ(n) e_p(n)`, computed once and cached.
    pub fn gauss_sum(&self) -> Complex64 {
        *self.gauss.get_or_init(|| gauss_sum_direct(self))
    }

    /// Direct O(p) evaluation of `Σ_{n<p} χ(n + a) e(nθ)`.
    pub fn eval_f_direct(&self, theta: f64, shift: i64) -> Complex64 {
        let p = self.modulus.p as i64;
        let a = shift.rem_euclid(p);
        let mut re = Compensated::new();
        let mut im = Compensated::new();
        for n in 1..p {
            // n = 0 contributes χ(a) * 1.
            let Some(k) = self.exponent_at(n + a) else { continue };
            let t = (n as f64 * theta).rem_euclid(1.0);
            let z = self.roots[k as usize] * e(t);
            re.add(z.re);
            im.add(z.im);
        }
        let z0 = self.value_at(a);
        Complex64::new(re.value() + z0.re, im.value() + z0.im)
    }

    /// Direct O(p) evaluation at `z = e_p(K + x)` with exact reduction of `nK mod p`.
    pub fn eval_f_arc(&self, k: i64, x: f64, shift: i64) -> Complex64 {
        let p = self.modulus.p as i64;
        let a = shift.rem_euclid(p);
        let k = k.rem_euclid(p) as u64;
        let pf = p as f64;
        let mut re = Compensated::new();
        let mut im = Compensated::new();
        for n in 0..p {
            let Some(c) = self.exponent_at(n + a) else { continue };
            let nk = arith::mul_mod(n as u64, k, p as u64) as f64;
            let z = self.roots[c as usize] * e((nk + n as f64 * x) / pf);
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// Frequencies of every value pattern `(χ(K+1), …, χ(K+n))` over `K ∈ F_p`.
    ///
    /// Patterns are indexed by exponent tuples; `K` for which some argument is
    /// divisible by `p` match no pattern.
    pub fn pattern_frequencies(&self, len: usize) -> Vec<PatternFrequency> {
        let d = self.order as usize;
        let patterns = d.checked_pow(len as u32).expect("pattern count overflow");
        let mut counts = vec![0u64; patterns];
        let p = self.modulus.p;
        'k: for k in 0..p {
            let mut code = 0usize;
            let mut place = 1usize;
            for j in 1..=len as u64 {
                let Some(c) = self.exponent((k + j) % p) else { continue 'k };
                code += c as usize * place;
                place *= d;
            }
            counts[code] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(code, count)| {
                let mut rest = code;
                let exponents = (0..len)
                    .map(|_| {
                        let c = (rest % d) as u32;
                        rest /= d;
                        c
                    })
                    .collect();
                PatternFrequency { exponents, count, frequency: count as f64 / p as f64 }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternFrequency {
    /// `exponents[i] = k` means `χ(K + i + 1) = e(k/d)`.
    pub exponents: Vec<u32>,
    pub count: u64,
    pub frequency: f64,
}

fn gauss_sum_direct(chi: &DirichletCharacter) -> Complex64 {
    // Group by exponent: τ = Σ_k e(k/d) Σ_{χ(n) = e(k/d)} e_p(n).
    let d = chi.order as usize;
    let p = chi.p();
    let mut partial: Vec<(Compensated, Compensated)> = vec![Default::default(); d];
    for n in 1..p {
        let k = chi.exponent(n).expect("n is a unit") as usize;
        let z = e(n as f64 / p as f64);
        partial[k].0.add(z.re);
        partial[k].1.add(z.im);
    }
    partial
        .iter()
        .enumerate()
        .map(|(k, (re, im))| chi.roots[k] * Complex64::new(re.value(), im.value()))
        .sum()
}

/// `e(k/d)` with exact values on the axes.
pub fn root_of_unity(k: u64, d: u64) -> Complex64 {
    let k = k % d;
    if 4 * k == d {
        Complex64::new(0.0, 1.0)
    } else if 2 * k == d {
        Complex64::new(-1.0, 0.0)
    } else if 4 * k == 3 * d {
        Complex64::new(0.0, -1.0)
    } else if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        e(k as f64 / d as f64)
    }
}
