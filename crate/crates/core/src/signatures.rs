//! Prime signatures and the quadratic-character classes they imply.
//!
//! The signature of a prime `p` with respect to bases `a_1, ..., a_m` is the
//! vector of 2-adic valuations of `ord_p(a_i)`. A squarefree `n` is a strong
//! pseudoprime to every base iff it is a Fermat pseudoprime to them and all
//! of its prime factors share one signature, so signatures are both the
//! matching key for building `k` and the source of sieve constraints: by
//! Euler's criterion `(a/q) = +1` exactly when `v2(ord_q(a)) < v2(q - 1)`.

use std::fmt;

use crate::bigmath::{first_primes, jacobi, small_primes, FactoredNumber, Scalar};
use crate::error::{Error, Result};

/// The first `m` primes, used as strong-test bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseVector {
    bases: Vec<u64>,
}

impl BaseVector {
    /// Largest supported base count; keeps `2^m` hash buckets reasonable.
    pub const MAX_BASES: usize = 24;

    pub fn first(m: usize) -> Result<Self> {
        if m == 0 || m > Self::MAX_BASES {
            return Err(Error::invalid(format!(
                "base count {m} outside 1..={}",
                Self::MAX_BASES
            )));
        }
        Ok(BaseVector {
            bases: first_primes(m).to_vec(),
        })
    }

    pub fn m(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn contains(&self, p: u64) -> bool {
        self.bases.binary_search(&p).is_ok()
    }

    /// Smallest prime not in the vector (`a_{m+1}`).
    pub fn next_prime(&self) -> u64 {
        small_primes()[self.m()]
    }
}

/// `(v2(ord_p(a_1)), ..., v2(ord_p(a_m)))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    entries: Vec<u8>,
}

impl Signature {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("empty signature"));
        }
        Ok(Signature { entries })
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn max_entry(&self) -> u8 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|&e| e <= 1)
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature{self}")
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Signature of the odd prime `p`.
///
/// Each entry is read off `a^q mod p` with `p - 1 = 2^e q`: the valuation of
/// `ord_p(a)` is the number of squarings needed to reach 1. The factored
/// `p - 1` is only checked for consistency.
pub fn compute_signature<T: Scalar>(
    p: &T,
    p_minus_1: &FactoredNumber<T>,
    nu: &BaseVector,
) -> Result<Signature> {
    if p.is_even() || *p < T::from_u64(3) {
        return Err(Error::invalid(format!("signature of {p}: need an odd prime")));
    }
    if p_minus_1.value().add_ref(&T::one()) != *p {
        return Err(Error::invalid(format!(
            "factored value {} is not {p} - 1",
            p_minus_1.value()
        )));
    }
    let pm1 = p_minus_1.value();
    let e = pm1.trailing_zeros();
    let q = pm1.shr(e);
    let one = T::one();
    let mut entries = Vec::with_capacity(nu.m());
    for &a in nu.bases() {
        let a = T::from_u64(a);
        if a.rem_ref(p).is_zero() {
            return Err(Error::invalid(format!("{p} divides base {a}")));
        }
        let mut x = a.pow_mod(&q, p);
        let mut v = 0u8;
        while x != one {
            x = x.mul_mod(&x, p);
            v += 1;
            debug_assert!(u64::from(v) <= e);
        }
        entries.push(v);
    }
    Signature::new(entries)
}

/// Bucket index in `[0, 2^m)`: entries equal to the maximum become 1-bits
/// (a binary signature maps to itself), first entry most significant.
pub fn hash_signature(sigma: &Signature) -> usize {
    let max = sigma.max_entry();
    if max == 0 {
        return 0;
    }
    let target = if max == 1 { 1 } else { max };
    sigma
        .entries()
        .iter()
        .fold(0usize, |h, &e| (h << 1) | usize::from(e == target))
}

/// Which 2-adic case a matching prime `q` falls in, relative to
/// `c* = max(signature)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `v2(q - 1) = c*`.
    EqualValuation,
    /// `v2(q - 1) > c*`.
    GreaterValuation,
}

/// `residue mod modulus`, modulus a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoAdicClass {
    pub residue: u64,
    pub modulus: u64,
}

/// Constraints a prime `q` with a given signature must satisfy in one
/// 2-adic scenario: a class modulo a power of two, the character `(2/q)`,
/// and the target character `(a/q)` for every odd base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterPlan {
    pub scenario: Scenario,
    pub c_star: u8,
    pub two_adic_class: TwoAdicClass,
    pub two_character: i8,
    pub per_base: Vec<(u64, i8)>,
}

/// The scenario plans for primes with signature `sigma`.
///
/// Every prime `q` whose signature equals `sigma` satisfies every constraint
/// of at least one returned plan. The equal-valuation plan is dropped when
/// the required `(2/q)` contradicts the class `q mod 8` the scenario forces.
pub fn character_plans(sigma: &Signature, nu: &BaseVector) -> Result<Vec<CharacterPlan>> {
    if sigma.m() != nu.m() {
        return Err(Error::invalid(format!(
            "signature length {} does not match {} bases",
            sigma.m(),
            nu.m()
        )));
    }
    let c = sigma.max_entry();
    let e2 = sigma.entries()[0];
    let odd: Vec<(u64, u8)> = nu.bases()[1..]
        .iter()
        .copied()
        .zip(sigma.entries()[1..].iter().copied())
        .collect();

    let mut plans = Vec::with_capacity(2);

    let greater_class = match c {
        0 => TwoAdicClass { residue: 1, modulus: 2 },
        1 => TwoAdicClass { residue: 1, modulus: 8 },
        _ => TwoAdicClass {
            residue: 1,
            modulus: 1 << (c + 1),
        },
    };
    plans.push(CharacterPlan {
        scenario: Scenario::GreaterValuation,
        c_star: c,
        two_adic_class: greater_class,
        two_character: 1,
        per_base: odd.iter().map(|&(a, _)| (a, 1)).collect(),
    });

    let equal_class = match (c, e2 == c) {
        (0, _) => None,
        (1, true) => Some(TwoAdicClass { residue: 3, modulus: 8 }),
        (1, false) => Some(TwoAdicClass { residue: 7, modulus: 8 }),
        (2, true) => Some(TwoAdicClass { residue: 5, modulus: 8 }),
        (2, false) => None,
        (_, true) => None,
        (_, false) => Some(TwoAdicClass {
            residue: 1 + (1 << c),
            modulus: 1 << (c + 1),
        }),
    };
    if let Some(class) = equal_class {
        plans.push(CharacterPlan {
            scenario: Scenario::EqualValuation,
            c_star: c,
            two_adic_class: class,
            two_character: if e2 == c { -1 } else { 1 },
            per_base: odd
                .iter()
                .map(|&(a, e)| (a, if e == c { -1 } else { 1 }))
                .collect(),
        });
    }
    Ok(plans)
}

/// Residues `r mod a` such that every prime `q ≡ r (mod a)` with the given
/// `q mod 4` has `(a/q) = eps`. Quadratic reciprocity turns `(a/q)` into
/// `(q/a)` up to the sign `-1` when `a ≡ q ≡ 3 (mod 4)`.
pub fn allowed_residues(a: u64, eps: i8, q_mod_4: u8) -> Result<Vec<u64>> {
    if a < 3 || a.is_multiple_of(2) {
        return Err(Error::invalid(format!("base {a} is not an odd prime")));
    }
    if eps != 1 && eps != -1 {
        return Err(Error::invalid(format!("character {eps} is not +-1")));
    }
    if q_mod_4 != 1 && q_mod_4 != 3 {
        return Err(Error::invalid(format!("q mod 4 = {q_mod_4} for odd q")));
    }
    let sign = if a % 4 == 3 && q_mod_4 == 3 { -1 } else { 1 };
    let target = eps * sign;
    let mut out = Vec::with_capacity(((a - 1) / 2) as usize);
    for r in 1..a {
        if jacobi(&r, &a)? == target {
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::{factor_u64, multiplicative_order, v2};

    fn sig(p: u64, m: usize) -> Signature {
        compute_signature(&p, &factor_u64(p - 1), &BaseVector::first(m).unwrap()).unwrap()
    }

    #[test]
    fn base_vector() {
        let nu = BaseVector::first(4).unwrap();
        assert_eq!(nu.bases(), &[2, 3, 5, 7]);
        assert_eq!(nu.next_prime(), 11);
        assert!(nu.contains(5));
        assert!(!nu.contains(11));
        assert!(BaseVector::first(0).is_err());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(sig(151121, 8).entries(), &[3, 4, 0, 4, 2, 1, 2, 4]);
        assert_eq!(sig(7, 2).entries(), &[0, 1]);
        for p in [23u64, 31, 43, 47, 10007] {
            assert!(sig(p, 8).is_binary(), "p = {p}");
        }
        let nu = BaseVector::first(3).unwrap();
        assert!(compute_signature(&5u64, &factor_u64(4), &nu).is_err());
        assert!(compute_signature(&13u64, &factor_u64(11), &nu).is_err());
    }

    #[test]
    fn signature_matches_order_valuations() {
        let nu = BaseVector::first(6).unwrap();
        for p in crate::bigmath::primes_up_to(5000).into_iter().filter(|&p| p > 13) {
            let f = factor_u64(p - 1);
            let s = compute_signature(&p, &f, &nu).unwrap();
            for (i, &a) in nu.bases().iter().enumerate() {
                let o = multiplicative_order(&a, &p, &f).unwrap();
                assert_eq!(u64::from(s.entries()[i]), v2(&o).unwrap());
            }
        }
    }

    #[test]
    fn hash_examples() {
        assert_eq!(hash_signature(&Signature::new(vec![0; 8]).unwrap()), 0);
        assert_eq!(
            hash_signature(&Signature::new(vec![3, 4, 0, 4, 2, 1, 2, 4]).unwrap()),
            81
        );
        assert_eq!(hash_signature(&Signature::new(vec![1, 0, 1]).unwrap()), 5);
        // a lone maximum of 2 still sets only its own bit
        assert_eq!(hash_signature(&Signature::new(vec![1, 2, 1]).unwrap()), 2);
    }

    #[test]
    fn plans_for_example_signature() {
        // c* = 2 on bases 2, 3, 5, 13
        let nu = BaseVector::first(6).unwrap();
        let s = Signature::new(vec![2, 2, 2, 0, 1, 2]).unwrap();
        let plans = character_plans(&s, &nu).unwrap();
        assert_eq!(plans.len(), 2);
        let eq = plans
            .iter()
            .find(|p| p.scenario == Scenario::EqualValuation)
            .unwrap();
        assert_eq!(eq.two_adic_class, TwoAdicClass { residue: 5, modulus: 8 });
        assert_eq!(eq.per_base, vec![(3, -1), (5, -1), (7, 1), (11, 1), (13, -1)]);
    }

    #[test]
    fn plans_all_zero() {
        let nu = BaseVector::first(4).unwrap();
        let plans = character_plans(&Signature::new(vec![0; 4]).unwrap(), &nu).unwrap();
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].scenario, Scenario::GreaterValuation);
        assert_eq!(plans[0].two_adic_class, TwoAdicClass { residue: 1, modulus: 2 });
        assert!(plans[0].per_base.iter().all(|&(_, e)| e == 1));
    }

    #[test]
    fn plans_drop_inconsistent_equal_case() {
        let nu = BaseVector::first(3).unwrap();
        let plans = character_plans(&Signature::new(vec![3, 1, 3]).unwrap(), &nu).unwrap();
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].scenario, Scenario::GreaterValuation);
        // c* = 2 needs entry(2) = 2 for the equal case
        let plans = character_plans(&Signature::new(vec![1, 2, 2]).unwrap(), &nu).unwrap();
        assert_eq!(plans.len(), 1);
        // c* = 1 splits on entry(2)
        let p = character_plans(&Signature::new(vec![0, 1, 1]).unwrap(), &nu).unwrap();
        assert_eq!(p[1].two_adic_class.residue, 7);
        let p = character_plans(&Signature::new(vec![1, 0, 1]).unwrap(), &nu).unwrap();
        assert_eq!(p[1].two_adic_class.residue, 3);
    }

    #[test]
    fn residue_examples() {
        assert_eq!(allowed_residues(5, -1, 1).unwrap(), vec![2, 3]);
        assert_eq!(allowed_residues(13, -1, 1).unwrap(), vec![2, 5, 6, 7, 8, 11]);
        assert_eq!(allowed_residues(3, -1, 1).unwrap(), vec![2]);
        // q ≡ 3 (mod 4): (3/q) = -1 iff q ≡ 1 (mod 3), so q ≡ 7 (mod 12)
        assert_eq!(allowed_residues(3, -1, 3).unwrap(), vec![1]);
        assert!(allowed_residues(4, 1, 1).is_err());
        assert!(allowed_residues(5, 0, 1).is_err());
        assert!(allowed_residues(5, 1, 2).is_err());
    }
}
