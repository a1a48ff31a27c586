//! Word-size and arbitrary-precision number theory shared by every stage.
//!
//! All routines are generic over [`Scalar`], so the same order, symbol and
//! strong-probable-prime code runs on `u64` in the hot loops and on
//! [`Natural`] when verifying 25-digit witnesses.

mod factor;
mod natural;
mod primes;
mod scalar;

pub use factor::{factor_bounded, factor_u64, pollard_rho, trial_divide, FactoredNumber};
pub use natural::Natural;
pub use primes::{first_primes, primes_up_to, small_primes, SMALL_PRIME_LIMIT};
pub use scalar::{PrimScalar, Scalar};

pub(crate) use scalar::mul_mod_u64;

use crate::error::{Error, Result};

/// `base^exponent mod modulus`.
pub fn mod_pow<T: Scalar>(base: &T, exponent: &T, modulus: &T) -> Result<T> {
    if *modulus < T::from_u64(2) {
        return Err(Error::invalid(format!("modulus {modulus} < 2")));
    }
    Ok(base.pow_mod(exponent, modulus))
}

/// Greatest common divisor; `gcd(0, 0)` is rejected.
pub fn big_gcd<T: Scalar>(a: &T, b: &T) -> Result<T> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::invalid("gcd(0, 0) is undefined"));
    }
    Ok(a.gcd_ref(b))
}

/// 2-adic valuation of `n >= 1`.
pub fn v2<T: Scalar>(n: &T) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::invalid("v2(0) is undefined"));
    }
    Ok(n.trailing_zeros())
}

/// Splits `n >= 1` as `2^e * odd`, returning `(e, odd)`.
pub fn split_two_power<T: Scalar>(n: &T) -> Result<(u64, T)> {
    let e = v2(n)?;
    Ok((e, n.shr(e)))
}

/// Order of `a` in `(Z/pZ)^*`, computed by stripping prime factors off
/// `p - 1` while the power stays 1.
pub fn multiplicative_order<T: Scalar>(a: &T, p: &T, p_minus_1: &FactoredNumber<T>) -> Result<T> {
    if p.is_even() || *p < T::from_u64(3) {
        return Err(Error::invalid(format!("order modulo {p}: need an odd prime")));
    }
    if p_minus_1.value().add_ref(&T::one()) != *p {
        return Err(Error::invalid(format!(
            "factored value {} is not {p} - 1",
            p_minus_1.value()
        )));
    }
    let a = a.rem_ref(p);
    if a.is_zero() {
        return Err(Error::invalid(format!("{p} divides the base")));
    }
    let one = T::one();
    let mut order = p_minus_1.value().clone();
    for (q, e) in p_minus_1.factors() {
        for _ in 0..*e {
            let cand = order.div_ref(q);
            if a.pow_mod(&cand, p) == one {
                order = cand;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi<T: Scalar>(a: &T, n: &T) -> Result<i8> {
    if n.is_even() {
        return Err(Error::invalid(format!("jacobi: modulus {n} is even")));
    }
    let eight = T::from_u64(8);
    let four = T::from_u64(4);
    let mut a = a.rem_ref(n);
    let mut n = n.clone();
    let mut t = 1i8;
    while !a.is_zero() {
        let z = a.trailing_zeros();
        if z > 0 {
            a = a.shr(z);
            let r = n.rem_ref(&eight).to_u64().unwrap_or(0);
            if z % 2 == 1 && (r == 3 || r == 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_ref(&four).to_u64() == Some(3) && n.rem_ref(&four).to_u64() == Some(3) {
            t = -t;
        }
        a = a.rem_ref(&n);
    }
    Ok(if n.is_one() { t } else { 0 })
}

/// Jacobi symbol with a signed numerator.
pub fn jacobi_i64(a: i64, n: u64) -> Result<i8> {
    if n.is_multiple_of(2) {
        return Err(Error::invalid(format!("jacobi: modulus {n} is even")));
    }
    let r = (a as i128).rem_euclid(n as i128) as u64;
    jacobi(&r, &n)
}

/// Strong probable-prime test of odd `n >= 3` to base `a` (Miller-Rabin round).
///
/// Bases that are a multiple of `n` pass vacuously; bases sharing a proper
/// factor with `n` fail.
pub fn strong_probable_prime<T: Scalar>(n: &T, a: &T) -> Result<bool> {
    if n.is_even() || *n < T::from_u64(3) {
        return Err(Error::invalid(format!("strong test needs odd n >= 3, got {n}")));
    }
    Ok(sprp_unchecked(n, a))
}

#[inline]
pub(crate) fn sprp_unchecked<T: Scalar>(n: &T, a: &T) -> bool {
    let one = T::one();
    let n_minus_1 = n.sub_ref(&one);
    let a = a.rem_ref(n);
    if a.is_zero() || a == one || a == n_minus_1 {
        return true;
    }
    let s = n_minus_1.trailing_zeros();
    let d = n_minus_1.shr(s);
    let mut x = a.pow_mod(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.mul_mod(&x, n);
        if x == n_minus_1 {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Length of the longest prefix of `2, 3, 5, ...` (capped at `m_max`) to
/// which `n` is a strong probable prime.
pub fn spsp_base_count<T: Scalar>(n: &T, m_max: usize) -> Result<usize> {
    if n.is_even() || *n < T::from_u64(3) {
        return Err(Error::invalid(format!("base count needs odd n >= 3, got {n}")));
    }
    Ok(first_primes(m_max)
        .iter()
        .take_while(|&&a| sprp_unchecked(n, &T::from_u64(a)))
        .count())
}

/// Probable-prime test: trial division by small primes, then strong tests to
/// the first 13 prime bases, which is deterministic below 2^81 (the least
/// strong pseudoprime to all of them is about 3.3 * 10^24). Larger `n` get
/// the first 24 prime bases.
pub fn is_probable_prime<T: Scalar>(n: &T) -> bool {
    if *n < T::from_u64(2) {
        return false;
    }
    for &p in small_primes().iter().take(60) {
        let pt = T::from_u64(p);
        if *n == pt {
            return true;
        }
        if n.rem_ref(&pt).is_zero() {
            return false;
        }
    }
    let cutoff = small_primes()[59];
    if *n < T::from_u64(cutoff * cutoff) {
        return true;
    }
    let bases = if n.bits() <= 81 { 13 } else { 24 };
    first_primes(bases).iter().all(|&a| sprp_unchecked(n, &T::from_u64(a)))
}

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    is_probable_prime(&n)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / num_integer::gcd(a, b) * b
}

/// `a^-1 mod m`, if it exists. `m >= 1`.
pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}
