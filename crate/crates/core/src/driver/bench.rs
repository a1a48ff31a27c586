//! Timing of the three per-`k` strategies on sampled prime `k`.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::bigmath::{factor_u64, is_prime_u64};
use crate::driver::config::DEFAULT_HEADROOM;
use crate::error::{Error, Result};
use crate::gcdfilter::{gcd_filter, CandidateK};
use crate::primestream::{lambda_p, PrimeWithFactoredPred};
use crate::signatures::{compute_signature, BaseVector};
use crate::wheelsieve::{build_wheel_plan, lambda_only_plan, sieve_plan};

pub const CSV_HEADER: &str = "k,t_gcd_ms,t_lambda_ms,t_sig_ms";

/// Sieve timings repeat until this much time has been spent.
const MIN_SIEVE_TIME: Duration = Duration::from_millis(20);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub lo: u64,
    pub hi: u64,
    pub samples: usize,
    pub bound: u64,
    pub m: usize,
    pub headroom: u64,
    /// Skip the GCD timing (reported as NaN).
    pub skip_gcd: bool,
}

impl BenchConfig {
    pub fn new(lo: u64, hi: u64, samples: usize) -> Result<Self> {
        let cfg = BenchConfig {
            lo,
            hi,
            samples,
            bound: 10_000_000_000_000_000_000,
            m: 11,
            headroom: DEFAULT_HEADROOM,
            skip_gcd: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let nu = BaseVector::first(self.m).map_err(|e| Error::Config(e.to_string()))?;
        if self.lo > self.hi || self.lo <= nu.bases()[self.m - 1] {
            return Err(Error::Config(format!(
                "sample range {}:{} must be increasing and above the bases",
                self.lo, self.hi
            )));
        }
        if u128::from(self.hi) * u128::from(self.hi) > u128::from(self.bound) {
            return Err(Error::Config(format!(
                "sample range must stay below sqrt(bound) = {}",
                self.bound.isqrt()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub k: u64,
    pub t_gcd_ms: f64,
    pub t_lambda_ms: f64,
    pub t_sig_ms: f64,
    /// Odd wheel primes used by the signature sieve (largest over plans).
    pub wheel_primes: usize,
}

/// Primes spread geometrically over `[lo, hi]`, increasing and distinct.
pub fn sample_primes(lo: u64, hi: u64, samples: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(samples);
    for i in 0..samples {
        let f = if samples == 1 {
            0.0
        } else {
            i as f64 / (samples - 1) as f64
        };
        let target = (lo as f64 * (hi as f64 / lo as f64).powf(f)) as u64;
        let floor = target.max(lo).max(out.last().map_or(0, |&q| q + 1));
        let up = (floor..=hi).find(|&p| is_prime_u64(p));
        let down = || (floor.saturating_sub(1000).max(lo)..floor).rev().find(|&p| is_prime_u64(p));
        match up.or_else(|| down().filter(|&p| out.last().is_none_or(|&q| p > q))) {
            Some(p) => out.push(p),
            None => continue,
        }
    }
    out
}

fn prime_candidate(p: u64, nu: &BaseVector) -> Result<CandidateK> {
    let rec = PrimeWithFactoredPred {
        p,
        p_minus_1: factor_u64(p - 1),
    };
    let sigma = compute_signature(&p, &rec.p_minus_1, nu)?;
    CandidateK::new(&[(p, lambda_p(&rec, nu)?)], sigma)
}

fn mean_ms(mut f: impl FnMut()) -> f64 {
    let start = Instant::now();
    let mut runs = 0u32;
    while runs == 0 || start.elapsed() < MIN_SIEVE_TIME {
        f();
        runs += 1;
    }
    start.elapsed().as_secs_f64() * 1e3 / f64::from(runs)
}

pub fn bench_prime(p: u64, cfg: &BenchConfig) -> Result<BenchRow> {
    let nu = BaseVector::first(cfg.m)?;
    let k = prime_candidate(p, &nu)?;
    let t_gcd_ms = if cfg.skip_gcd {
        f64::NAN
    } else {
        let start = Instant::now();
        match gcd_filter(&k, &nu, cfg.bound) {
            Ok(_) | Err(Error::Unresolved { .. }) => {}
            Err(e) => return Err(e),
        }
        start.elapsed().as_secs_f64() * 1e3
    };
    let lo = p + 1;
    let hi = cfg.bound / p;
    let lambda_plan = lambda_only_plan(&k);
    let t_lambda_ms = mean_ms(|| {
        std::hint::black_box(sieve_plan(&k, &lambda_plan, lo, hi, cfg.m));
    });
    let mut wheel_primes = 0;
    let t_sig_ms = mean_ms(|| {
        let plans = build_wheel_plan(&k, u128::from(cfg.bound), &nu, cfg.headroom).expect("plans");
        wheel_primes = plans.iter().map(|p| p.odd.len()).max().unwrap_or(0);
        for plan in &plans {
            std::hint::black_box(sieve_plan(&k, plan, lo, hi, cfg.m));
        }
    });
    Ok(BenchRow {
        k: p,
        t_gcd_ms,
        t_lambda_ms,
        t_sig_ms,
        wheel_primes,
    })
}

pub fn bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    sample_primes(cfg.lo, cfg.hi, cfg.samples)
        .into_iter()
        .map(|p| {
            let row = bench_prime(p, cfg)?;
            log::info!(
                "k = {}: gcd {:.3} ms, lambda {:.3} ms, signature {:.3} ms",
                row.k,
                row.t_gcd_ms,
                row.t_lambda_ms,
                row.t_sig_ms
            );
            Ok(row)
        })
        .collect()
}

pub fn write_csv(rows: &[BenchRow], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{:.6},{:.6},{:.6}", r.k, r.t_gcd_ms, r.t_lambda_ms, r.t_sig_ms)?;
    }
    w.flush()
}

pub fn write_csv_file(rows: &[BenchRow], path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_primes_in_range() {
        let v = sample_primes(10_000_000, 350_000_000, 6);
        assert_eq!(v.len(), 6);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|&p| is_prime_u64(p) && (10_000_000..=350_000_000).contains(&p)));
        assert!(sample_primes(10, 20, 0).is_empty());
    }

    #[test]
    fn header_only_csv() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,t_gcd_ms,t_lambda_ms,t_sig_ms\n");
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(1.1))).collect();
        assert!((log_log_slope(&pts).unwrap() - 1.1).abs() < 1e-9);
        assert_eq!(log_log_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn small_bench_row() {
        let mut cfg = BenchConfig::new(100_000, 200_000, 1).unwrap();
        cfg.bound = 1 << 40;
        let rows = bench(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].t_gcd_ms >= 0.0 && rows[0].t_sig_ms > 0.0);
    }

    #[test]
    fn config_checks() {
        assert!(BenchConfig::new(5, 100, 3).is_err());
        assert!(BenchConfig::new(1000, 100, 3).is_err());
        assert!(BenchConfig::new(1000, 1 << 40, 3).is_err());
    }
}
