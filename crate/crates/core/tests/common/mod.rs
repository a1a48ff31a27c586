//! Reference implementations used as oracles. Deliberately naive and
//! independent of the library's number theory.
#![allow(dead_code)]

pub const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, n);
        }
        b = mul_mod(b, b, n);
        e >>= 1;
    }
    r
}

/// Textbook strong test of odd `n > 2` to base `a`.
pub fn strong_test(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn is_prime_td(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn eratosthenes(n: u64) -> Vec<bool> {
    let mut s = vec![true; n as usize + 1];
    s[0] = false;
    if n >= 1 {
        s[1] = false;
    }
    let mut i = 2;
    while i * i <= n as usize {
        if s[i] {
            for j in (i * i..=n as usize).step_by(i) {
                s[j] = false;
            }
        }
        i += 1;
    }
    s
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let s = eratosthenes(hi);
    (lo..=hi).filter(|&p| s[p as usize]).collect()
}

/// Odd composites `n <= bound` that pass the strong test to the first `m`
/// bases (excluding the bases themselves).
pub fn brute_force_spsp(bound: u64, m: usize) -> Vec<u64> {
    let sieve = eratosthenes(bound);
    (3..=bound)
        .step_by(2)
        .filter(|&n| !sieve[n as usize])
        .filter(|&n| BASES[..m].iter().all(|&a| n % a != 0 && strong_test(n, a)))
        .collect()
}

pub fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Order of `a` modulo the prime `p` by direct stepping.
pub fn naive_order(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, a, p);
        k += 1;
    }
    k
}

/// Signature by direct order stepping.
pub fn naive_signature(p: u64, m: usize) -> Vec<u8> {
    BASES[..m]
        .iter()
        .map(|&a| naive_order(a, p).trailing_zeros() as u8)
        .collect()
}

pub fn legendre(a: u64, p: u64) -> i8 {
    match pow_mod(a, (p - 1) / 2, p) {
        1 => 1,
        0 => 0,
        _ => -1,
    }
}
