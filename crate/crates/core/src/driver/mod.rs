//! Orchestration: candidate generation, the GCD and sieve phases, resume
//! state, witness verification and benchmarking.

pub mod bench;
pub mod checkpoint;
pub mod config;
pub mod generate;
pub mod hitfile;
mod search;
pub mod verify;

pub use bench::{bench, BenchConfig, BenchRow};
pub use config::{default_cutoff, parse_bound, SearchConfig};
pub use generate::{generate_k, Mode};
pub use search::{checkpoint_path, search, SearchReport, StageSummary, UnresolvedResidual};
pub use verify::{verify, FactorCheck, VerifyReport};

/// A strong pseudoprime to all `m` bases, with its factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hit {
    pub n: u64,
    /// Increasing, distinct primes multiplying to `n`.
    pub factors: Vec<u64>,
    pub bases_passed: usize,
    pub found_by: Mode,
    pub t: usize,
}
