//! Elimination of small `k` by chained big-integer GCDs.
//!
//! If `n = k * p_t` is a strong pseudoprime to base `b` and `v2(ord_k(b)) = c`,
//! then `p_t` divides the single algebraic factor `h(b, k)` of `b^(k-1) - 1`
//! selected by `c`: `b^u - 1` when `c = 0`, else `b^(u 2^(c-1)) + 1`, where
//! `k - 1 = u 2^d` with `u` odd. So `p_t` divides the GCD of all `h(a_i, k)`.
//! Only the smallest `h` is built; every other one is reduced modulo the
//! running GCD by modular exponentiation, which keeps the work near-linear
//! in `k`. Usually the GCD collapses to at most `k` and `k` is ruled out.

use std::sync::OnceLock;

use num_traits::{One, Zero};
use rug::Integer;

use crate::bigmath::{
    factor_bounded, is_probable_prime, lcm_u64, primes_up_to, trial_divide, Natural, Scalar,
    SMALL_PRIME_LIMIT,
};
use crate::error::{Error, Result};
use crate::signatures::{BaseVector, Signature};

/// A partial product `k = p_1 * ... * p_(t-1)` of primes sharing a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateK {
    pub k: u64,
    pub factors: Vec<u64>,
    pub signature: Signature,
    pub lambda: u64,
    pub t: usize,
}

impl CandidateK {
    /// `parts` lists `(p_i, lambda_(p_i))` in increasing `p_i`.
    pub fn new(parts: &[(u64, u64)], signature: Signature) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("candidate k needs at least one prime"));
        }
        let mut k: u64 = 1;
        let mut lambda = 1u64;
        for (i, &(p, l)) in parts.iter().enumerate() {
            if i > 0 && parts[i - 1].0 >= p {
                return Err(Error::invalid("factors of k must increase"));
            }
            if p % 2 == 0 {
                return Err(Error::invalid(format!("even factor {p} in k")));
            }
            k = k
                .checked_mul(p)
                .ok_or_else(|| Error::invalid("k overflows a word"))?;
            lambda = lcm_u64(lambda, l);
        }
        Ok(CandidateK {
            k,
            factors: parts.iter().map(|&(p, _)| p).collect(),
            signature,
            lambda,
            t: parts.len() + 1,
        })
    }

    /// Largest prime factor of `k`; `p_t` must exceed it.
    pub fn largest_factor(&self) -> u64 {
        *self.factors.last().expect("k has a factor")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HForm {
    /// `b^e - 1`
    Minus,
    /// `b^e + 1`
    Plus,
}

/// Form and exponent of `h(b, k)`.
pub fn h_exponent_and_form(b: u64, k: &CandidateK, nu: &BaseVector) -> Result<(HForm, u64)> {
    if k.k.is_multiple_of(2) || k.k < 3 {
        return Err(Error::invalid(format!("h(b, k) needs odd k >= 3, got {}", k.k)));
    }
    let i = nu
        .bases()
        .iter()
        .position(|&a| a == b)
        .ok_or_else(|| Error::invalid(format!("{b} is not a base")))?;
    let c = u32::from(k.signature.entries()[i]);
    let d = (k.k - 1).trailing_zeros();
    let u = (k.k - 1) >> d;
    if c == 0 {
        Ok((HForm::Minus, u))
    } else if c <= d {
        Ok((HForm::Plus, u << (c - 1)))
    } else {
        Err(Error::invalid(format!(
            "signature entry {c} exceeds v2(k - 1) = {d} for k = {}",
            k.k
        )))
    }
}

/// Bit length of `b^e +- 1`, exact for `b = 2` and within one otherwise.
pub fn estimate_h_bits(b: u64, form: HForm, exponent: u64) -> u64 {
    if b == 2 {
        return match form {
            HForm::Minus => exponent,
            HForm::Plus => exponent + 1,
        };
    }
    (exponent as f64 * (b as f64).log2()).floor() as u64 + 1
}

/// `b^e +- 1` as a big integer.
pub fn h_value(b: u64, form: HForm, exponent: u64) -> Natural {
    let v = Natural::pow_u64(b, exponent).into_integer();
    let v = match form {
        HForm::Minus => v - 1u32,
        HForm::Plus => v + 1u32,
    };
    Natural::from_integer(v).expect("b^e >= 1")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    RuledOut,
    Survivors,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdOutcome {
    pub verdict: Verdict,
    /// Base whose `h` was built in full.
    pub materialized_base: u64,
    /// The GCD after the first chained reduction (`None` when `m = 1`).
    pub first_gcd: Option<Natural>,
    /// Final GCD when `k` survives.
    pub residual: Option<Natural>,
    /// Primes `p_t` dividing the residual with `p_(t-1) < p_t <= B / k`.
    pub candidate_pts: Vec<u64>,
}

/// Runs the GCD chain for `k` and extracts the possible final primes.
pub fn gcd_filter(k: &CandidateK, nu: &BaseVector, bound: u64) -> Result<GcdOutcome> {
    let mut forms = Vec::with_capacity(nu.m());
    for &b in nu.bases() {
        let (form, e) = h_exponent_and_form(b, k, nu)?;
        forms.push((b, form, e, estimate_h_bits(b, form, e)));
    }
    let start = (0..forms.len())
        .min_by_key(|&i| forms[i].3)
        .expect("at least one base");
    let (b0, f0, e0, _) = forms[start];
    let floor = Natural::from(k.largest_factor());

    let mut x = h_value(b0, f0, e0);
    let mut first_gcd = None;
    for (i, &(b, form, e, _)) in forms.iter().enumerate() {
        if i == start {
            continue;
        }
        if x <= floor {
            break;
        }
        let xi = x.as_integer();
        let r = Integer::from(b)
            .pow_mod(&Integer::from(e), xi)
            .expect("positive exponent");
        let y = match form {
            HForm::Minus if r == 0 => Integer::from(xi - 1u32),
            HForm::Minus => r - 1u32,
            HForm::Plus => {
                let y = r + 1u32;
                if y == *xi {
                    Integer::new()
                } else {
                    y
                }
            }
        };
        x = Natural::from_integer(y.gcd(xi)).expect("gcd is non-negative");
        if first_gcd.is_none() {
            first_gcd = Some(x.clone());
        }
    }

    if x <= floor {
        return Ok(GcdOutcome {
            verdict: Verdict::RuledOut,
            materialized_base: b0,
            first_gcd,
            residual: None,
            candidate_pts: Vec::new(),
        });
    }
    let limit = bound / k.k;
    let candidate_pts = bounded_prime_divisors(&x, k.largest_factor(), limit).map_err(|rest| {
        Error::Unresolved {
            k: k.k,
            residual: rest.to_string(),
        }
    })?;
    Ok(GcdOutcome {
        verdict: Verdict::Survivors,
        materialized_base: b0,
        first_gcd,
        residual: Some(x),
        candidate_pts,
    })
}

const RHO_BUDGET: u64 = 1_000_000;
const PRIMORIAL_LIMIT: u64 = 1 << 24;

/// Product of the primes in `(SMALL_PRIME_LIMIT, PRIMORIAL_LIMIT]`.
fn primorial() -> &'static Integer {
    static P: OnceLock<Integer> = OnceLock::new();
    P.get_or_init(|| {
        let mut layer: Vec<Integer> = primes_up_to(PRIMORIAL_LIMIT)
            .into_iter()
            .filter(|&p| p > SMALL_PRIME_LIMIT)
            .map(Integer::from)
            .collect();
        while layer.len() > 1 {
            layer = layer
                .chunks(2)
                .map(|c| match c {
                    [a, b] => Integer::from(a * b),
                    [a] => a.clone(),
                    _ => unreachable!(),
                })
                .collect();
        }
        layer.pop().unwrap_or_else(|| Integer::from(1))
    })
}

/// Distinct primes `q` with `above < q <= limit` dividing `x`. Returns the
/// undecided cofactor as the error when a composite piece resists rho.
fn bounded_prime_divisors(
    x: &Natural,
    above: u64,
    limit: u64,
) -> std::result::Result<Vec<u64>, Natural> {
    let mut out = Vec::new();
    let keep = |q: &Natural, out: &mut Vec<u64>| {
        if let Some(q) = q.to_u64() {
            if q > above && q <= limit {
                out.push(q);
            }
        }
    };
    let (small, mut rest) = trial_divide(x, SMALL_PRIME_LIMIT.min(limit));
    for (q, _) in &small {
        keep(q, &mut out);
    }
    if limit <= SMALL_PRIME_LIMIT || rest.is_one() {
        return Ok(finish(out));
    }
    if is_probable_prime(&rest) {
        keep(&rest, &mut out);
        return Ok(finish(out));
    }

    let ri = rest.as_integer();
    let g = Integer::from(primorial() % ri).gcd(ri);
    if g > 1 {
        let g = Natural::from_integer(g).expect("positive gcd");
        let part = factor_bounded(&g, 0, RHO_BUDGET);
        if let Some(u) = part.unresolved {
            return Err(u);
        }
        for (q, _) in &part.factors {
            keep(q, &mut out);
            while rest.rem_ref(q).is_zero() {
                rest = rest.div_ref(q);
            }
        }
    }
    if limit <= PRIMORIAL_LIMIT || rest.is_one() {
        return Ok(finish(out));
    }
    let part = factor_bounded(&rest, 0, RHO_BUDGET);
    if let Some(u) = part.unresolved {
        return Err(u);
    }
    for (q, _) in &part.factors {
        keep(q, &mut out);
    }
    Ok(finish(out))
}

fn finish(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::factor_u64;
    use crate::primestream::{lambda_p, stream_primes};
    use crate::signatures::compute_signature;

    fn cand(p: u64, m: usize) -> CandidateK {
        let nu = BaseVector::first(m).unwrap();
        let rec = stream_primes(p, p, 1).unwrap().next().unwrap();
        let s = compute_signature(&p, &rec.p_minus_1, &nu).unwrap();
        CandidateK::new(&[(p, lambda_p(&rec, &nu).unwrap())], s).unwrap()
    }

    #[test]
    fn forms_for_151121() {
        let nu = BaseVector::first(8).unwrap();
        let k = cand(151121, 8);
        assert_eq!(h_exponent_and_form(5, &k, &nu).unwrap(), (HForm::Minus, 9445));
        assert_eq!(h_exponent_and_form(2, &k, &nu).unwrap(), (HForm::Plus, 37780));
        assert_eq!(h_exponent_and_form(3, &k, &nu).unwrap(), (HForm::Plus, 75560));
        assert!(h_exponent_and_form(23, &k, &nu).is_err());
    }

    #[test]
    fn bit_estimates() {
        assert_eq!(estimate_h_bits(2, HForm::Plus, 37780), 37781);
        assert_eq!(estimate_h_bits(2, HForm::Minus, 1), 1);
        let exact = Scalar::bits(&h_value(5, HForm::Minus, 9445));
        assert!(estimate_h_bits(5, HForm::Minus, 9445).abs_diff(exact) <= 1);
        assert_eq!(h_value(2, HForm::Plus, 37780).bits(), 37781);
    }

    #[test]
    fn rules_out_151121() {
        let k = cand(151121, 3);
        let out = gcd_filter(&k, &BaseVector::first(3).unwrap(), u64::MAX).unwrap();
        assert_eq!(out.materialized_base, 5);
        assert_eq!(out.first_gcd, Some(Natural::from(151121u64)));
        assert_eq!(out.verdict, Verdict::RuledOut);
    }

    #[test]
    fn small_survivors() {
        let out = gcd_filter(&cand(23, 1), &BaseVector::first(1).unwrap(), 2048).unwrap();
        assert_eq!(out.verdict, Verdict::Survivors);
        assert!(out.candidate_pts.contains(&89));
        let out = gcd_filter(&cand(829, 2), &BaseVector::first(2).unwrap(), 1_500_000).unwrap();
        assert!(out.candidate_pts.contains(&1657));
        assert!(out.candidate_pts.iter().all(|&q| q > 829 && q <= 1_500_000 / 829));
    }

    #[test]
    fn h_divides_fermat_quotient() {
        let nu = BaseVector::first(3).unwrap();
        for p in crate::bigmath::primes_up_to(2000).into_iter().filter(|&p| p > 5) {
            let k = cand(p, 3);
            for &b in nu.bases() {
                let (f, e) = h_exponent_and_form(b, &k, &nu).unwrap();
                let h = h_value(b, f, e);
                let full = Natural::pow_u64(b, p - 1).into_integer() - 1u32;
                assert!(full.is_divisible(h.as_integer()), "p = {p}, b = {b}");
            }
        }
    }

    #[test]
    fn candidate_validation() {
        let s = Signature::new(vec![0]).unwrap();
        assert!(CandidateK::new(&[], s.clone()).is_err());
        assert!(CandidateK::new(&[(7, 3), (5, 4)], s.clone()).is_err());
        let k = CandidateK::new(&[(3, 2), (5, 4)], s).unwrap();
        assert_eq!((k.k, k.lambda, k.t), (15, 4, 3));
        let f = factor_u64(k.k);
        assert_eq!(f.factors(), &[(3, 1), (5, 1)]);
    }

    #[test]
    fn large_survivor_pieces() {
        // 1000003 * 16777259 has both pieces above the trial limit
        let x = Natural::from(1000003u64 * 16777259);
        let v = bounded_prime_divisors(&x, 10, u64::MAX).unwrap();
        assert_eq!(v, [1000003, 16777259]);
        let v = bounded_prime_divisors(&x, 10, 2_000_000).unwrap();
        assert_eq!(v, [1000003]);
    }
}
