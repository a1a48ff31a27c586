use std::collections::BTreeMap;

use super::primes::small_primes;
use super::{is_probable_prime, Scalar};
use crate::error::{Error, Result};

/// A value together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredNumber<T> {
    value: T,
    factors: Vec<(T, u32)>,
}

impl<T: Scalar> FactoredNumber<T> {
    /// Checks that `factors` multiply out to `value`, with strictly
    /// increasing probable-prime bases and positive exponents.
    pub fn new(value: T, factors: Vec<(T, u32)>) -> Result<Self> {
        let mut prod = T::one();
        for (i, (p, e)) in factors.iter().enumerate() {
            if *e == 0 {
                return Err(Error::invalid(format!("zero exponent on {p}")));
            }
            if i > 0 && factors[i - 1].0 >= *p {
                return Err(Error::invalid("factor primes must be strictly increasing"));
            }
            if !is_probable_prime(p) {
                return Err(Error::invalid(format!("{p} is not a probable prime")));
            }
            for _ in 0..*e {
                prod = prod.mul_ref(p);
            }
        }
        if prod != value {
            return Err(Error::invalid(format!("factors multiply to {prod}, not {value}")));
        }
        Ok(FactoredNumber { value, factors })
    }

    pub fn from_factors(factors: Vec<(T, u32)>) -> Result<Self> {
        let mut prod = T::one();
        for (p, e) in &factors {
            for _ in 0..*e {
                prod = prod.mul_ref(p);
            }
        }
        Self::new(prod, factors)
    }

    /// Skips validation; for callers that built the factorization themselves.
    pub(crate) fn from_parts_unchecked(value: T, factors: Vec<(T, u32)>) -> Self {
        FactoredNumber { value, factors }
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn factors(&self) -> &[(T, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &T> + '_ {
        self.factors.iter().map(|(p, _)| p)
    }
}

/// Divides out every prime `<= limit` (capped at the small-prime table).
/// Returns the found factors and the remaining cofactor.
pub fn trial_divide<T: Scalar>(n: &T, limit: u64) -> (Vec<(T, u32)>, T) {
    let mut r = n.clone();
    let mut out = Vec::new();
    if r.is_zero() {
        return (out, r);
    }
    for &p in small_primes().iter().take_while(|&&p| p <= limit) {
        let pt = T::from_u64(p);
        if pt.mul_ref(&pt) > r {
            break;
        }
        let mut e = 0;
        loop {
            let q = r.div_ref(&pt);
            if q.mul_ref(&pt) != r {
                break;
            }
            r = q;
            e += 1;
        }
        if e > 0 {
            out.push((pt, e));
        }
    }
    // r may now be a prime below the limit
    if r > T::one() {
        if let Some(v) = r.to_u64() {
            if v <= limit && v <= *small_primes().last().unwrap() {
                out.push((r, 1));
                r = T::one();
            }
        }
    }
    (out, r)
}

#[inline]
fn abs_diff<T: Scalar>(a: &T, b: &T) -> T {
    if a >= b {
        a.sub_ref(b)
    } else {
        b.sub_ref(a)
    }
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of composite
/// `n`, or `None` once `budget` iterations are spent.
pub fn pollard_rho<T: Scalar>(n: &T, budget: u64) -> Option<T> {
    let one = T::one();
    if *n <= T::from_u64(3) {
        return None;
    }
    if n.is_even() {
        return Some(T::from_u64(2));
    }
    let batch = 128u64;
    let mut spent = 0u64;
    for c in 1u64.. {
        let c = T::from_u64(c);
        let f = |x: &T| x.mul_mod(x, n).add_ref(&c).rem_ref(n);
        let mut y = T::from_u64(2);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = one.clone();
        let mut g = one.clone();
        let mut r = 1u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            spent += r;
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let steps = batch.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    q = q.mul_mod(&abs_diff(&x, &y), n);
                }
                spent += steps;
                g = q.gcd_ref(n);
                k += batch;
            }
            r *= 2;
            if spent > budget && g == one {
                return None;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = abs_diff(&x, &ys).gcd_ref(n);
                if g != one {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
        if spent > budget {
            return None;
        }
    }
    None
}

/// Outcome of a bounded factoring attempt: prime factors found so far plus
/// the product of any composite parts rho could not split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFactorization<T> {
    pub factors: Vec<(T, u32)>,
    pub unresolved: Option<T>,
}

/// Trial division up to `trial_limit`, then Pollard rho with `rho_budget`
/// iterations per composite piece.
pub fn factor_bounded<T: Scalar>(n: &T, trial_limit: u64, rho_budget: u64) -> PartialFactorization<T> {
    let (found, rest) = trial_divide(n, trial_limit);
    let mut acc: BTreeMap<T, u32> = found.into_iter().collect();
    let mut unresolved: Option<T> = None;
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c <= T::one() {
            continue;
        }
        if is_probable_prime(&c) {
            *acc.entry(c).or_insert(0) += 1;
            continue;
        }
        match pollard_rho(&c, rho_budget) {
            Some(d) => {
                let e = c.div_ref(&d);
                stack.push(d);
                stack.push(e);
            }
            None => {
                unresolved = Some(match unresolved {
                    Some(u) => u.mul_ref(&c),
                    None => c,
                });
            }
        }
    }
    PartialFactorization {
        factors: acc.into_iter().collect(),
        unresolved,
    }
}

/// Complete factorization of a machine word `n >= 1`.
pub fn factor_u64(n: u64) -> FactoredNumber<u64> {
    assert!(n >= 1, "factor_u64(0)");
    let mut budget = 1u64 << 20;
    loop {
        let part = factor_bounded(&n, 1000, budget);
        if part.unresolved.is_none() {
            return FactoredNumber::from_parts_unchecked(n, part.factors);
        }
        budget *= 4;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::Natural;

    #[test]
    fn factored_number_validation() {
        assert!(FactoredNumber::new(12u64, vec![(2, 2), (3, 1)]).is_ok());
        assert!(FactoredNumber::new(12u64, vec![(3, 1), (2, 2)]).is_err());
        assert!(FactoredNumber::new(12u64, vec![(2, 1), (6, 1)]).is_err());
        assert!(FactoredNumber::new(13u64, vec![(2, 2), (3, 1)]).is_err());
        assert!(FactoredNumber::new(12u64, vec![(2, 2), (3, 1), (5, 0)]).is_err());
        let f = FactoredNumber::from_factors(vec![(2u64, 4), (5, 1), (1889, 1)]).unwrap();
        assert_eq!(*f.value(), 151120);
    }

    #[test]
    fn factor_u64_examples() {
        assert_eq!(factor_u64(151120).factors(), &[(2, 4), (5, 1), (1889, 1)]);
        assert_eq!(
            factor_u64(300000316).factors(),
            &[(2, 2), (7, 1), (11, 1), (23, 1), (42349, 1)]
        );
        assert_eq!(factor_u64(1).factors(), &[]);
        assert_eq!(factor_u64(97).factors(), &[(97, 1)]);
        // two 32-bit primes
        let n = 4294967291u64 * 4294967279u64;
        assert_eq!(factor_u64(n).factors(), &[(4294967279, 1), (4294967291, 1)]);
        assert_eq!(factor_u64(1 << 40).factors(), &[(2, 40)]);
    }

    #[test]
    fn rho_on_naturals() {
        let n: Natural = "318665857834031151167461".parse().unwrap();
        let part = factor_bounded(&n, 1000, 1 << 24);
        assert!(part.unresolved.is_none());
        let ps: Vec<String> = part.factors.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(ps, ["399165290221", "798330580441"]);
    }

    #[test]
    fn bounded_factoring_reports_residual() {
        // product of two ~40-bit primes with a tiny budget
        let n = 1099511627689u128 * 1099511627609u128;
        let part = factor_bounded(&n, 100, 10);
        assert_eq!(part.unresolved, Some(n));
    }
}
