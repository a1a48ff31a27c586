//! Primes bucketed by signature hash.
//!
//! There are `2^m` buckets, each an append-only list in increasing `p`.
//! A fetch scans one bucket and keeps exact signature matches, so hash
//! collisions cost time but never correctness.

use crate::error::{Error, Result};
use crate::signatures::{hash_signature, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeRecord {
    pub p: u64,
    pub signature: Signature,
    pub lambda: u64,
}

#[derive(Clone, Debug)]
pub struct SignatureTable {
    m: usize,
    buckets: Vec<Vec<PrimeRecord>>,
    last_inserted: u64,
    len: usize,
}

impl SignatureTable {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > crate::signatures::BaseVector::MAX_BASES {
            return Err(Error::invalid(format!("table for {m} bases")));
        }
        Ok(SignatureTable {
            m,
            buckets: vec![Vec::new(); 1 << m],
            last_inserted: 0,
            len: 0,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn last_inserted(&self) -> u64 {
        self.last_inserted
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn insert(&mut self, rec: PrimeRecord) -> Result<()> {
        if rec.p <= self.last_inserted {
            return Err(Error::invalid(format!(
                "insert of {} after {}: insertions must increase",
                rec.p, self.last_inserted
            )));
        }
        if rec.signature.m() != self.m {
            return Err(Error::invalid(format!(
                "signature of length {} in a table for {} bases",
                rec.signature.m(),
                self.m
            )));
        }
        self.last_inserted = rec.p;
        let h = hash_signature(&rec.signature);
        self.buckets[h].push(rec);
        self.len += 1;
        Ok(())
    }

    /// Records whose signature equals `sigma`, in increasing `p`.
    pub fn fetch<'a>(&'a self, sigma: &'a Signature) -> impl Iterator<Item = &'a PrimeRecord> + 'a {
        let bucket: &[PrimeRecord] = if sigma.m() == self.m {
            &self.buckets[hash_signature(sigma)]
        } else {
            &[]
        };
        bucket.iter().filter(move |r| r.signature == *sigma)
    }

    /// Matching records with `p < below`.
    pub fn fetch_below<'a>(
        &'a self,
        sigma: &'a Signature,
        below: u64,
    ) -> impl Iterator<Item = &'a PrimeRecord> + 'a {
        self.fetch(sigma).take_while(move |r| r.p < below)
    }

    pub fn bucket(&self, h: usize) -> &[PrimeRecord] {
        &self.buckets[h]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(p: u64, s: &[u8]) -> PrimeRecord {
        PrimeRecord {
            p,
            signature: Signature::new(s.to_vec()).unwrap(),
            lambda: p - 1,
        }
    }

    #[test]
    fn bucket_placement() {
        let mut t = SignatureTable::new(8).unwrap();
        t.insert(rec(149, &[0; 8])).unwrap();
        t.insert(rec(151121, &[3, 4, 0, 4, 2, 1, 2, 4])).unwrap();
        assert_eq!(t.bucket(0).len(), 1);
        assert_eq!(t.bucket(81)[0].p, 151121);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn monotone_insert() {
        let mut t = SignatureTable::new(2).unwrap();
        for p in [3, 5, 7] {
            t.insert(rec(p, &[0, 1])).unwrap();
        }
        assert!(t.insert(rec(5, &[0, 1])).is_err());
        assert!(t.insert(rec(11, &[0, 1, 1])).is_err());
    }

    #[test]
    fn fetch_filters_collisions() {
        let mut t = SignatureTable::new(2).unwrap();
        // (2,1) and (1,0) both hash to 0b10
        t.insert(rec(11, &[1, 0])).unwrap();
        t.insert(rec(13, &[2, 1])).unwrap();
        t.insert(rec(19, &[1, 0])).unwrap();
        let s = Signature::new(vec![1, 0]).unwrap();
        let ps: Vec<u64> = t.fetch(&s).map(|r| r.p).collect();
        assert_eq!(ps, [11, 19]);
        let ps: Vec<u64> = t.fetch_below(&s, 19).map(|r| r.p).collect();
        assert_eq!(ps, [11]);
        let empty = SignatureTable::new(2).unwrap();
        assert_eq!(empty.fetch(&s).count(), 0);
    }
}
