//! Segmented enumeration of primes with `p - 1` already factored.
//!
//! Each segment is sieved twice: once for primality, and once over the
//! shifted values `p - 1` of the surviving primes, dividing out every
//! sieving prime `<= sqrt(hi)`. What is left of `p - 1` afterwards is 1 or
//! a single large prime, so no general factoring is ever needed.

use crate::bigmath::{primes_up_to, FactoredNumber, Scalar};
use crate::error::{Error, Result};
use crate::signatures::BaseVector;
use crate::FactoredWord;

/// Default number of integers per segment.
pub const DEFAULT_SEGMENT: usize = 1 << 20;

/// Largest accepted upper limit; keeps `p - 1` sieving inside `u64`.
pub const MAX_LIMIT: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeWithFactoredPred {
    pub p: u64,
    pub p_minus_1: FactoredWord,
}

/// Iterator over the primes of `[lo, hi]` in increasing order.
pub struct PrimeStream {
    next_start: u64,
    hi: u64,
    segment: usize,
    base_primes: Vec<u64>,
    ready: std::vec::IntoIter<PrimeWithFactoredPred>,
}

/// Streams the primes of `[lo, hi]`, each with its factored predecessor.
pub fn stream_primes(lo: u64, hi: u64, segment_size: usize) -> Result<PrimeStream> {
    PrimeStream::new(lo, hi, segment_size)
}

impl PrimeStream {
    pub fn new(lo: u64, hi: u64, segment_size: usize) -> Result<Self> {
        if segment_size == 0 {
            return Err(Error::invalid("segment size must be positive"));
        }
        if lo < 2 || lo > hi {
            return Err(Error::invalid(format!("prime range [{lo}, {hi}] needs 2 <= lo <= hi")));
        }
        if hi > MAX_LIMIT {
            return Err(Error::invalid(format!("prime range limit {hi} exceeds 2^62")));
        }
        let root = hi.isqrt();
        Ok(PrimeStream {
            next_start: lo,
            hi,
            segment: segment_size,
            base_primes: primes_up_to(root),
            ready: Vec::new().into_iter(),
        })
    }

    fn fill(&mut self) -> bool {
        while self.next_start <= self.hi {
            let s = self.next_start;
            let e = s.saturating_add(self.segment as u64 - 1).min(self.hi);
            self.next_start = e + 1;
            let batch = self.sieve_segment(s, e);
            if !batch.is_empty() {
                self.ready = batch.into_iter();
                return true;
            }
        }
        false
    }

    fn sieve_segment(&self, s: u64, e: u64) -> Vec<PrimeWithFactoredPred> {
        let len = (e - s + 1) as usize;
        let mut composite = vec![false; len];
        for &q in &self.base_primes {
            if q * q > e {
                break;
            }
            let first = (s.div_ceil(q) * q).max(q * q);
            let mut j = first;
            while j <= e {
                composite[(j - s) as usize] = true;
                j += q;
            }
        }

        // cofactor of p - 1 and factors found so far, primes only
        let idx: Vec<usize> = (0..len).filter(|&i| !composite[i]).collect();
        let mut slot = vec![u32::MAX; len];
        for (k, &i) in idx.iter().enumerate() {
            slot[i] = k as u32;
        }
        let mut rest: Vec<u64> = idx.iter().map(|&i| s + i as u64 - 1).collect();
        let mut facs: Vec<Vec<(u64, u32)>> = vec![Vec::new(); idx.len()];
        for (k, r) in rest.iter_mut().enumerate() {
            if *r > 1 {
                let z = r.trailing_zeros();
                if z > 0 {
                    facs[k].push((2, z));
                    *r >>= z;
                }
            }
        }
        // values p - 1 live in [s - 1, e - 1]
        let vlo = s - 1;
        let vhi = e - 1;
        for &q in self.base_primes.iter().skip(1) {
            if q > vhi {
                break;
            }
            let mut j = vlo.div_ceil(q) * q;
            if j == 0 {
                j = q;
            }
            while j <= vhi {
                let k = slot[(j - vlo) as usize];
                if k != u32::MAX {
                    let k = k as usize;
                    let r = &mut rest[k];
                    let mut ex = 0;
                    while (*r).is_multiple_of(q) {
                        *r /= q;
                        ex += 1;
                    }
                    if ex > 0 {
                        facs[k].push((q, ex));
                    }
                }
                j += q;
            }
        }
        idx.iter()
            .zip(rest)
            .zip(facs)
            .map(|((&i, r), mut f)| {
                if r > 1 {
                    f.push((r, 1));
                }
                let p = s + i as u64;
                PrimeWithFactoredPred {
                    p,
                    p_minus_1: FactoredNumber::from_parts_unchecked(p - 1, f),
                }
            })
            .collect()
    }
}

impl Iterator for PrimeStream {
    type Item = PrimeWithFactoredPred;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(r) = self.ready.next() {
                return Some(r);
            }
            if !self.fill() {
                return None;
            }
        }
    }
}

/// `lcm(ord_p(a) : a in nu)`: the exponent of the subgroup the bases
/// generate, found by stripping prime factors off `p - 1` while every base
/// still powers to 1.
pub fn lambda_p(rec: &PrimeWithFactoredPred, nu: &BaseVector) -> Result<u64> {
    let p = rec.p;
    if nu.contains(p) {
        return Err(Error::invalid(format!("{p} is one of the bases")));
    }
    if p < 3 || rec.p_minus_1.value() + 1 != p {
        return Err(Error::invalid(format!("bad record for {p}")));
    }
    let all_one = |d: u64| {
        nu.bases()
            .iter()
            .all(|&a| (a % p).pow_mod(&d, &p) == 1)
    };
    let mut lambda = p - 1;
    for &(q, e) in rec.p_minus_1.factors() {
        for _ in 0..e {
            if all_one(lambda / q) {
                lambda /= q;
            } else {
                break;
            }
        }
    }
    Ok(lambda)
}
