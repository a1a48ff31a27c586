//! Candidate `k = p_1 ... p_(t-1)` built from signature-matched primes.

use crate::driver::config::{integer_root, SearchConfig};
use crate::error::Result;
use crate::gcdfilter::CandidateK;
use crate::primestream::{lambda_p, stream_primes, PrimeWithFactoredPred};
use crate::signatures::{compute_signature, BaseVector};
use crate::sigtable::{PrimeRecord, SignatureTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// `k <= X`, handled by the GCD chain.
    GcdRange,
    /// `X < k < B / p`, handled by sieving.
    SieveRange,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::GcdRange => "gcd",
            Mode::SieveRange => "sieve",
        }
    }
}

/// `floor(sqrt(B / a_(m+1)^(t-2)))`: the largest possible `p_(t-1)`.
pub fn outer_limit(t: usize, bound: u64, nu: &BaseVector) -> u64 {
    let a = nu.next_prime();
    match a.checked_pow((t - 2) as u32) {
        Some(d) => (bound / d).isqrt(),
        None => 0,
    }
}

/// `floor((B / a_(m+1)^(t-3))^(1/3))`: the largest prime kept in the table.
pub fn insert_limit(t: usize, bound: u64, nu: &BaseVector) -> u64 {
    if t < 3 {
        return 0;
    }
    let a = nu.next_prime();
    match a.checked_pow((t - 3) as u32) {
        Some(d) => integer_root(bound / d, 3),
        None => 0,
    }
}

pub fn prime_record(rec: &PrimeWithFactoredPred, nu: &BaseVector) -> Result<PrimeRecord> {
    Ok(PrimeRecord {
        p: rec.p,
        signature: compute_signature(&rec.p, &rec.p_minus_1, nu)?,
        lambda: lambda_p(rec, nu)?,
    })
}

/// Table of every non-base prime up to the insertion limit for `t`.
pub fn build_table(t: usize, cfg: &SearchConfig, nu: &BaseVector) -> Result<SignatureTable> {
    let mut table = SignatureTable::new(nu.m())?;
    let lo = nu.next_prime();
    let hi = insert_limit(t, cfg.bound, nu);
    if hi >= lo {
        for rec in stream_primes(lo, hi, cfg.segment)? {
            table.insert(prime_record(&rec, nu)?)?;
        }
    }
    Ok(table)
}

/// Per-prime counts of generated `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KCounts {
    pub in_mode: u64,
    pub other_mode: u64,
}

impl KCounts {
    pub fn total(&self) -> u64 {
        self.in_mode + self.other_mode
    }

    pub fn add(&mut self, o: KCounts) {
        self.in_mode += o.in_mode;
        self.other_mode += o.other_mode;
    }
}

/// Visits every `k` whose largest factor is `rec.p`, selected by `mode`.
/// The smaller factors come from `table` (ignored for `t = 2`).
pub fn candidates_for_prime(
    rec: &PrimeRecord,
    t: usize,
    table: &SignatureTable,
    cfg: &SearchConfig,
    mode: Mode,
    visit: &mut dyn FnMut(CandidateK) -> Result<()>,
) -> Result<KCounts> {
    let p = rec.p;
    let bound = u128::from(cfg.bound);
    let mut counts = KCounts::default();
    let tail = u128::from(p) * u128::from(p + 2);
    if tail > bound {
        return Ok(counts);
    }
    let mut emit = |parts: &[(u64, u64)], counts: &mut KCounts| -> Result<()> {
        let k: u64 = parts.iter().map(|&(q, _)| q).product();
        let m = if k <= cfg.cutoff {
            Mode::GcdRange
        } else {
            Mode::SieveRange
        };
        if m == mode {
            counts.in_mode += 1;
            visit(CandidateK::new(parts, rec.signature.clone())?)
        } else {
            counts.other_mode += 1;
            Ok(())
        }
    };
    if t == 2 {
        emit(&[(p, rec.lambda)], &mut counts)?;
        return Ok(counts);
    }
    let s: Vec<(u64, u64)> = table
        .fetch_below(&rec.signature, p)
        .map(|r| (r.p, r.lambda))
        .collect();
    let mut chosen: Vec<(u64, u64)> = Vec::with_capacity(t - 1);
    subsets(&s, 0, t - 2, 1, tail, bound, &mut chosen, &mut |c: &[(u64, u64)]| {
        let mut parts = c.to_vec();
        parts.push((p, rec.lambda));
        emit(&parts, &mut counts)
    })?;
    Ok(counts)
}

/// Increasing-index `r`-subsets of `s` whose product times `tail` stays
/// within `bound`.
#[allow(clippy::too_many_arguments)]
fn subsets(
    s: &[(u64, u64)],
    from: usize,
    r: usize,
    prod: u128,
    tail: u128,
    bound: u128,
    chosen: &mut Vec<(u64, u64)>,
    f: &mut dyn FnMut(&[(u64, u64)]) -> Result<()>,
) -> Result<()> {
    if r == 0 {
        return f(chosen);
    }
    for i in from..s.len() {
        if s.len() - i < r {
            break;
        }
        let next = prod * u128::from(s[i].0);
        if next.saturating_mul(tail) > bound {
            break;
        }
        chosen.push(s[i]);
        subsets(s, i + 1, r - 1, next, tail, bound, chosen, f)?;
        chosen.pop();
    }
    Ok(())
}

/// All `k` for `t` in `mode`, in order of their largest factor.
pub fn generate_k(t: usize, cfg: &SearchConfig, table: &SignatureTable, mode: Mode) -> Result<Vec<CandidateK>> {
    let nu = BaseVector::first(cfg.m)?;
    let mut out = Vec::new();
    let lo = nu.next_prime();
    let hi = outer_limit(t, cfg.bound, &nu);
    if hi < lo {
        return Ok(out);
    }
    for rec in stream_primes(lo, hi, cfg.segment)? {
        let pr = prime_record(&rec, &nu)?;
        candidates_for_prime(&pr, t, table, cfg, mode, &mut |k| {
            out.push(k);
            Ok(())
        })?;
    }
    Ok(out)
}
