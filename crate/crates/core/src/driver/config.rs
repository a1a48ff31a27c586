use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::primestream::DEFAULT_SEGMENT;

/// Largest base count accepted by `search`.
pub const MAX_SEARCH_BASES: usize = 13;

pub const DEFAULT_HEADROOM: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub bound: u64,
    pub m: usize,
    pub cutoff: u64,
    pub t_max: Option<usize>,
    pub headroom: u64,
    pub workers: usize,
    pub segment: usize,
    pub output: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
}

impl SearchConfig {
    /// Config with the default cutoff `round(B^(1/3))` and one worker.
    pub fn new(bound: u64, m: usize) -> Result<Self> {
        let cfg = SearchConfig {
            bound,
            m,
            cutoff: default_cutoff(bound),
            t_max: None,
            headroom: DEFAULT_HEADROOM,
            workers: 1,
            segment: DEFAULT_SEGMENT,
            output: None,
            checkpoint: None,
            resume: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_cutoff(mut self, cutoff: u64) -> Result<Self> {
        self.cutoff = cutoff;
        self.validate()?;
        Ok(self)
    }

    pub fn with_workers(mut self, workers: usize) -> Result<Self> {
        self.workers = workers;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bound < 9 {
            return Err(Error::Config(format!("bound {} is below 9", self.bound)));
        }
        if self.m == 0 || self.m > MAX_SEARCH_BASES {
            return Err(Error::Config(format!(
                "base count {} outside 1..={MAX_SEARCH_BASES}",
                self.m
            )));
        }
        if self.cutoff < 2 || self.cutoff > self.bound.isqrt() {
            return Err(Error::Config(format!(
                "cutoff {} outside [2, sqrt(B)] = [2, {}]",
                self.cutoff,
                self.bound.isqrt()
            )));
        }
        if self.headroom == 0 {
            return Err(Error::Config("headroom must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        if self.segment == 0 {
            return Err(Error::Config("segment size must be positive".into()));
        }
        if matches!(self.t_max, Some(t) if t < 2) {
            return Err(Error::Config("t-max must be at least 2".into()));
        }
        Ok(())
    }
}

/// `round(B^(1/3))`, at least 2.
pub fn default_cutoff(bound: u64) -> u64 {
    root_rounded(bound, 3).max(2).min(bound.isqrt().max(2))
}

/// `round(B^(1/k))` computed exactly on integers.
pub fn root_rounded(n: u64, k: u32) -> u64 {
    let f = integer_root(n, k);
    // f <= n^(1/k) < f + 1; round up when (f + 1/2)^k <= n, i.e. (2f+1)^k <= 2^k n
    let lhs = (2 * u128::from(f) + 1).checked_pow(k);
    let rhs = u128::from(n) << k;
    match lhs {
        Some(l) if l <= rhs => f + 1,
        _ => f,
    }
}

/// Largest `r` with `r^k <= n`.
pub fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / f64::from(k)) as u64;
    let pow = |r: u64| u128::from(r).checked_pow(k);
    while matches!(pow(r), Some(v) if v > u128::from(n)) || pow(r).is_none() {
        r -= 1;
    }
    while matches!(pow(r + 1), Some(v) if v <= u128::from(n)) {
        r += 1;
    }
    r
}

/// `floor(B^e)` for a rational exponent `num/den`, via `integer_root(B^num)`.
pub fn rational_power(bound: u64, num: u32, den: u32) -> u64 {
    if num == 1 {
        return integer_root(bound, den);
    }
    let f = (bound as f64).powf(f64::from(num) / f64::from(den)) as u64;
    // refine against exact integer powers
    let ok = |r: u64| {
        let lhs = u128::from(r).checked_pow(den);
        let rhs = u128::from(bound).checked_pow(num);
        match (lhs, rhs) {
            (Some(l), Some(r)) => l <= r,
            _ => (r as f64).powi(den as i32) <= (bound as f64).powi(num as i32),
        }
    };
    let mut r = f;
    while r > 0 && !ok(r) {
        r -= 1;
    }
    while ok(r + 1) {
        r += 1;
    }
    r
}

/// Parses a non-negative integer written in decimal or scientific notation
/// (`2048`, `1.4e6`, `2_200_000`). Values that are not integers are rejected.
pub fn parse_bound(s: &str) -> Result<u64> {
    let t: String = s.trim().chars().filter(|&c| c != '_').collect();
    let bad = || Error::Config(format!("not an integer bound: {s:?}"));
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<u32>().map_err(|_| bad())?),
        None => (&t[..], 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let frac_len = frac.len() as u32;
    let mut v: u128 = 0;
    for b in digits.bytes() {
        v = v
            .checked_mul(10)
            .and_then(|v| v.checked_add(u128::from(b - b'0')))
            .ok_or_else(bad)?;
    }
    let v = if exp >= frac_len {
        10u128
            .checked_pow(exp - frac_len)
            .and_then(|p| v.checked_mul(p))
            .ok_or_else(bad)?
    } else {
        let d = 10u128.pow(frac_len - exp);
        if !v.is_multiple_of(d) {
            return Err(bad());
        }
        v / d
    };
    u64::try_from(v).map_err(|_| Error::Config(format!("bound {s:?} does not fit 64 bits")))
}
