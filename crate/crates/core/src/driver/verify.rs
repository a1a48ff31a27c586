//! Independent check of a claimed strong pseudoprime and its factorization.

use std::fmt;

use crate::bigmath::{factor_bounded, is_probable_prime, spsp_base_count, FactoredNumber, Natural, Scalar};
use crate::error::{Error, Result};
use crate::signatures::{compute_signature, BaseVector, Signature};

const RHO_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCheck {
    pub factors: Vec<Natural>,
    pub product_matches: bool,
    pub all_probable_prime: bool,
    pub pairwise_distinct: bool,
    /// Signature per factor; `None` when it could not be computed (not a
    /// prime, a base, or `p - 1` resisted factoring).
    pub signatures: Vec<Option<Signature>>,
    pub signatures_equal: bool,
}

impl FactorCheck {
    pub fn passed(&self) -> bool {
        self.product_matches && self.all_probable_prime && self.pairwise_distinct && self.signatures_equal
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: Natural,
    pub m: usize,
    pub composite: bool,
    pub bases_passed: usize,
    pub factor_check: Option<FactorCheck>,
}

impl VerifyReport {
    /// Composite, strong pseudoprime to all `m` bases, and every factor
    /// sub-check (when factors were given) holds.
    pub fn passed(&self) -> bool {
        self.composite
            && self.bases_passed >= self.m
            && self.factor_check.as_ref().is_none_or(FactorCheck::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "composite: {}", yn(self.composite))?;
        writeln!(f, "strong tests passed: {} of {}", self.bases_passed.min(self.m), self.m)?;
        if let Some(fc) = &self.factor_check {
            let list: Vec<String> = fc.factors.iter().map(|p| p.to_string()).collect();
            writeln!(f, "factors: {}", list.join(" * "))?;
            writeln!(f, "product matches: {}", yn(fc.product_matches))?;
            writeln!(f, "factors probable prime: {}", yn(fc.all_probable_prime))?;
            writeln!(f, "factors distinct: {}", yn(fc.pairwise_distinct))?;
            for (p, s) in fc.factors.iter().zip(&fc.signatures) {
                match s {
                    Some(s) => writeln!(f, "signature of {p}: {s}")?,
                    None => writeln!(f, "signature of {p}: unavailable")?,
                }
            }
            writeln!(f, "signatures equal: {}", yn(fc.signatures_equal))?;
        }
        write!(f, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Verifies `n` against the first `m` bases and, when given, the claimed
/// factorization (product, primality, distinctness, equal signatures).
pub fn verify(n: &str, claimed: Option<&[String]>, m: usize) -> Result<VerifyReport> {
    let nu = BaseVector::first(m)?;
    let n: Natural = n.parse()?;
    if n.is_even() || n < Natural::from(3u64) {
        return Err(Error::invalid(format!("verify needs odd n >= 3, got {n}")));
    }
    let bases_passed = spsp_base_count(&n, m)?;
    let composite = !is_probable_prime(&n);
    let factor_check = match claimed {
        None => None,
        Some(list) => {
            let factors = list
                .iter()
                .map(|s| s.parse::<Natural>())
                .collect::<Result<Vec<_>>>()?;
            Some(check_factors(&n, factors, &nu))
        }
    };
    Ok(VerifyReport {
        n,
        m,
        composite,
        bases_passed,
        factor_check,
    })
}

fn check_factors(n: &Natural, mut factors: Vec<Natural>, nu: &BaseVector) -> FactorCheck {
    factors.sort();
    let product = factors.iter().fold(Natural::from(1u64), |acc, p| acc.mul_ref(p));
    let product_matches = product == *n;
    let primes: Vec<bool> = factors.iter().map(is_probable_prime).collect();
    let all_probable_prime = !factors.is_empty() && primes.iter().all(|&b| b);
    let pairwise_distinct = factors.windows(2).all(|w| w[0] != w[1]);
    let signatures: Vec<Option<Signature>> = factors
        .iter()
        .zip(&primes)
        .map(|(p, &is_p)| if is_p { signature_of(p, nu) } else { None })
        .collect();
    let signatures_equal = !signatures.is_empty()
        && signatures.iter().all(Option::is_some)
        && signatures.windows(2).all(|w| w[0] == w[1]);
    FactorCheck {
        factors,
        product_matches,
        all_probable_prime,
        pairwise_distinct,
        signatures,
        signatures_equal,
    }
}

fn signature_of(p: &Natural, nu: &BaseVector) -> Option<Signature> {
    if p.is_even() || p.to_u64().is_some_and(|v| nu.contains(v)) {
        return None;
    }
    let pm1 = p.sub_ref(&Natural::from(1u64));
    let part = factor_bounded(&pm1, 100_000, RHO_BUDGET);
    if part.unresolved.is_some() {
        return None;
    }
    let f = FactoredNumber::new(pm1, part.factors).ok()?;
    compute_signature(p, &f, nu).ok()
}
