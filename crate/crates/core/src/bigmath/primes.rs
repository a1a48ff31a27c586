use std::sync::OnceLock;

/// Trial-division ceiling used throughout.
pub const SMALL_PRIME_LIMIT: u64 = 100_000;

/// Plain sieve of Eratosthenes over `[2, limit]`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// All primes up to [`SMALL_PRIME_LIMIT`].
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(SMALL_PRIME_LIMIT))
}

/// The first `m` primes `2, 3, 5, ...`.
pub fn first_primes(m: usize) -> &'static [u64] {
    let p = small_primes();
    &p[..m.min(p.len())]
}
