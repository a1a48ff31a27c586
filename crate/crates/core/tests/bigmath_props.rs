mod common;

use common::{eratosthenes, legendre, naive_order};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spsp_core::bigmath::{
    big_gcd, factor_u64, jacobi, mod_pow, multiplicative_order, strong_probable_prime, v2,
};
use spsp_core::Natural;

#[test]
fn mod_pow_matches_naive_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100_000 {
        let b: u64 = rng.gen_range(0..1 << 16);
        let e: u64 = rng.gen_range(0..1 << 8);
        let n: u64 = rng.gen_range(2..1 << 16);
        let mut want = 1;
        for _ in 0..e {
            want = want * b % n;
        }
        assert_eq!(mod_pow(&b, &e, &n).unwrap(), want, "{b}^{e} mod {n}");
    }
}

#[test]
fn mod_pow_agrees_across_scalars() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2000 {
        let b: u64 = rng.gen();
        let e: u64 = rng.gen();
        let n: u64 = rng.gen_range(2..u64::MAX);
        let w = mod_pow(&b, &e, &n).unwrap();
        let big = mod_pow(&Natural::from(b), &Natural::from(e), &Natural::from(n)).unwrap();
        assert_eq!(Natural::from(w), big);
    }
}

proptest! {
    #[test]
    fn gcd_divides_and_is_greatest(a in 1u64..1 << 40, b in 1u64..1 << 40, c in 1u64..1000) {
        let (a, b) = (a * c, b * c);
        let g = big_gcd(&a, &b).unwrap();
        prop_assert_eq!(a % g, 0);
        prop_assert_eq!(b % g, 0);
        for d in 2..=1000u64 {
            if a % d == 0 && b % d == 0 {
                prop_assert_eq!(g % d, 0);
            }
        }
        let gb = big_gcd(&Natural::from(a), &Natural::from(b)).unwrap();
        prop_assert_eq!(gb, Natural::from(g));
    }

    #[test]
    fn jacobi_is_multiplicative(a in 0u64..1 << 30, b in 0u64..1 << 30, i in 1usize..9000) {
        let p = spsp_core::bigmath::small_primes()[i];
        let ja = jacobi(&a, &p).unwrap();
        let jb = jacobi(&b, &p).unwrap();
        prop_assert_eq!(ja * jb, jacobi(&(a * b), &p).unwrap());
        prop_assert_eq!(ja, legendre(a, p));
    }
}

#[test]
fn order_divides_group_and_is_minimal() {
    let sieve = eratosthenes(20_000);
    for p in (3..20_000u64).filter(|&p| sieve[p as usize]).step_by(7) {
        let f = factor_u64(p - 1);
        for a in [2u64, 3, 5, 7, 10, 37, p - 1] {
            if a % p == 0 {
                continue;
            }
            let o = multiplicative_order(&a, &p, &f).unwrap();
            assert_eq!((p - 1) % o, 0);
            assert_eq!(mod_pow(&a, &o, &p).unwrap(), 1);
            for (q, _) in factor_u64(o).factors() {
                assert_ne!(mod_pow(&a, &(o / q), &p).unwrap(), 1, "ord_{p}({a}) = {o} not minimal");
            }
            if p < 2000 {
                assert_eq!(o, naive_order(a, p));
            }
        }
    }
}

#[test]
fn primes_are_strong_probable_primes() {
    let sieve = eratosthenes(100_000);
    for p in (3..=100_000u64).filter(|&p| sieve[p as usize]) {
        for a in 2..=20u64 {
            if a % p != 0 {
                assert!(strong_probable_prime(&p, &a).unwrap(), "{p} fails base {a}");
            }
        }
    }
}

#[test]
fn euler_link_between_character_and_order() {
    let sieve = eratosthenes(10_000);
    for p in (3..=10_000u64).filter(|&p| sieve[p as usize]) {
        let f = factor_u64(p - 1);
        let e = v2(&(p - 1)).unwrap();
        for a in 2..=37u64 {
            if a % p == 0 {
                continue;
            }
            let o = multiplicative_order(&a, &p, &f).unwrap();
            let residue = jacobi(&a, &p).unwrap() == 1;
            assert_eq!(residue, v2(&o).unwrap() < e, "p = {p}, a = {a}");
        }
    }
}

#[test]
fn base_sharing_factor_is_not_pseudoprime() {
    assert!(!strong_probable_prime(&15u64, &3).unwrap());
    assert!(!strong_probable_prime(&(23u64 * 89), &23).unwrap());
    assert!(strong_probable_prime(&2047u64, &2).unwrap());
}
