use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::bigmath::{is_prime_u64, spsp_base_count};
use crate::driver::checkpoint::Checkpoint;
use crate::driver::config::SearchConfig;
use crate::driver::generate::{build_table, candidates_for_prime, outer_limit, prime_record, KCounts, Mode};
use crate::driver::hitfile::{read_hits, HitWriter};
use crate::driver::Hit;
use crate::error::{Error, Result};
use crate::gcdfilter::{gcd_filter, CandidateK};
use crate::primestream::stream_primes;
use crate::signatures::BaseVector;
use crate::sigtable::SignatureTable;
use crate::wheelsieve::{build_wheel_plan, sieve_plan};

/// Outer primes per chunk; also the checkpoint granularity.
const PRIMES_PER_CHUNK: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnresolvedResidual {
    pub k: u64,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSummary {
    pub mode: Mode,
    pub t: usize,
    /// `k` values generated for this `t` in either mode.
    pub k_seen: u64,
    /// `k` values this stage worked on (0 for a stage restored as done).
    pub k_processed: u64,
}

#[derive(Clone, Debug, Default)]
pub struct SearchReport {
    /// Sorted by `n`, no duplicates.
    pub hits: Vec<Hit>,
    pub unresolved: Vec<UnresolvedResidual>,
    pub stages: Vec<StageSummary>,
}

impl SearchReport {
    /// The smallest strong pseudoprime found, i.e. `ψ_m` when it is `<= B`
    /// and the run is complete.
    pub fn smallest(&self) -> Option<&Hit> {
        self.hits.first()
    }

    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }
}

struct Sink {
    seen: HashSet<u64>,
    hits: Vec<Hit>,
    writer: Option<HitWriter>,
    unresolved: Vec<UnresolvedResidual>,
}

impl Sink {
    fn push(&mut self, hit: Hit) -> Result<()> {
        if !self.seen.insert(hit.n) {
            return Ok(());
        }
        log::info!("hit n = {} = {:?} ({})", hit.n, hit.factors, hit.found_by.name());
        if let Some(w) = self.writer.as_mut() {
            w.append(&hit)?;
        }
        self.hits.push(hit);
        Ok(())
    }
}

/// Where the checkpoint lives: explicit path, else `<out>.ckpt`.
pub fn checkpoint_path(cfg: &SearchConfig) -> Option<PathBuf> {
    cfg.checkpoint.clone().or_else(|| {
        cfg.output.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".ckpt");
            PathBuf::from(s)
        })
    })
}

/// Runs the GCD phase and then the sieve phase, each for `t = 2, 3, ...`
/// until a `t` yields no candidate `k` at all.
pub fn search(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let nu = BaseVector::first(cfg.m)?;
    let ckpt_path = checkpoint_path(cfg);

    let mut ckpt = Checkpoint::new(cfg.bound, cfg.m, cfg.cutoff);
    let mut sink = Sink {
        seen: HashSet::new(),
        hits: Vec::new(),
        writer: None,
        unresolved: Vec::new(),
    };
    if cfg.resume {
        let path = ckpt_path
            .as_ref()
            .ok_or_else(|| Error::Config("resume needs an output or checkpoint path".into()))?;
        if let Some(c) = Checkpoint::load(path)? {
            c.check_matches(cfg.bound, cfg.m, cfg.cutoff)?;
            ckpt = c;
        }
        if let Some(out) = &cfg.output {
            for h in read_hits(out)? {
                if sink.seen.insert(h.n) {
                    sink.hits.push(h);
                }
            }
        }
    } else if let Some(out) = &cfg.output {
        if out.exists() {
            std::fs::remove_file(out).map_err(|e| Error::io(out, e))?;
        }
    }
    if let Some(out) = &cfg.output {
        sink.writer = Some(HitWriter::open(out, cfg.bound, cfg.m, cfg.cutoff)?);
    }

    let pool = if cfg.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let state = Shared {
        cfg,
        nu: &nu,
        sink: Mutex::new(sink),
        ckpt: Mutex::new(ckpt),
        ckpt_path,
    };
    let mut stages = Vec::new();
    for mode in [Mode::GcdRange, Mode::SieveRange] {
        let mut t = 2;
        loop {
            if matches!(cfg.t_max, Some(tm) if t > tm) {
                break;
            }
            let restored = state
                .ckpt
                .lock()
                .unwrap()
                .stage(mode, t)
                .filter(|s| s.complete)
                .map(|s| s.k_seen);
            let summary = match restored {
                Some(k_seen) => StageSummary {
                    mode,
                    t,
                    k_seen,
                    k_processed: 0,
                },
                None => state.run_stage(mode, t, pool.as_ref())?,
            };
            log::info!(
                "{} t={}: {} k generated, {} processed",
                mode.name(),
                t,
                summary.k_seen,
                summary.k_processed
            );
            let done = summary.k_seen == 0;
            stages.push(summary);
            if done {
                break;
            }
            t += 1;
        }
    }

    let sink = state.sink.into_inner().unwrap();
    let mut hits = sink.hits;
    hits.sort_by_key(|h| h.n);
    Ok(SearchReport {
        hits,
        unresolved: sink.unresolved,
        stages,
    })
}

struct Shared<'a> {
    cfg: &'a SearchConfig,
    nu: &'a BaseVector,
    sink: Mutex<Sink>,
    ckpt: Mutex<Checkpoint>,
    ckpt_path: Option<PathBuf>,
}

struct Progress {
    frontier_chunk: usize,
    done: BTreeMap<usize, KCounts>,
}

impl Shared<'_> {
    fn run_stage(&self, mode: Mode, t: usize, pool: Option<&rayon::ThreadPool>) -> Result<StageSummary> {
        let cfg = self.cfg;
        let table = if t > 2 {
            build_table(t, cfg, self.nu)?
        } else {
            SignatureTable::new(cfg.m)?
        };
        let first = self.nu.next_prime();
        let last = outer_limit(t, cfg.bound, self.nu);
        let (frontier, prior) = {
            let ck = self.ckpt.lock().unwrap();
            ck.stage(mode, t)
                .map(|s| (s.frontier, s.k_seen))
                .unwrap_or((0, 0))
        };
        let mut summary = StageSummary {
            mode,
            t,
            k_seen: prior,
            k_processed: 0,
        };
        if last >= first {
            let span = ((PRIMES_PER_CHUNK * (last as f64).ln()) as u64).max(1024);
            let n_chunks = ((last - first) / span + 1) as usize;
            let start_chunk = if frontier > first {
                ((frontier - first) / span) as usize
            } else {
                0
            };
            let chunk = |i: usize| {
                let lo = first + i as u64 * span;
                (lo, (lo + span - 1).min(last))
            };
            let progress = Mutex::new(Progress {
                frontier_chunk: start_chunk,
                done: BTreeMap::new(),
            });
            let work = |i: usize| -> Result<KCounts> {
                let (lo, hi) = chunk(i);
                let c = self.run_chunk(mode, t, &table, lo, hi)?;
                self.chunk_done(mode, t, i, c, &progress, |j| chunk(j).1 + 1)?;
                Ok(c)
            };
            let counts: Vec<KCounts> = match pool {
                None => (start_chunk..n_chunks).map(work).collect::<Result<_>>()?,
                Some(p) => p.install(|| {
                    (start_chunk..n_chunks)
                        .into_par_iter()
                        .map(work)
                        .collect::<Result<_>>()
                })?,
            };
            for c in counts {
                summary.k_seen += c.total();
                summary.k_processed += c.in_mode;
            }
        }
        let mut ck = self.ckpt.lock().unwrap();
        let st = ck.stage_mut(mode, t);
        st.complete = true;
        st.k_seen = summary.k_seen;
        st.frontier = last.saturating_add(1);
        self.save(&ck)?;
        Ok(summary)
    }

    fn chunk_done(
        &self,
        mode: Mode,
        t: usize,
        i: usize,
        c: KCounts,
        progress: &Mutex<Progress>,
        end_of: impl Fn(usize) -> u64,
    ) -> Result<()> {
        let mut pr = progress.lock().unwrap();
        pr.done.insert(i, c);
        let before = pr.frontier_chunk;
        let mut advanced = 0u64;
        loop {
            let next = pr.frontier_chunk;
            let Some(c) = pr.done.remove(&next) else { break };
            advanced += c.total();
            pr.frontier_chunk += 1;
        }
        if pr.frontier_chunk == before {
            return Ok(());
        }
        let frontier = end_of(pr.frontier_chunk - 1);
        drop(pr);
        let mut ck = self.ckpt.lock().unwrap();
        let st = ck.stage_mut(mode, t);
        st.frontier = st.frontier.max(frontier);
        st.k_seen += advanced;
        self.save(&ck)
    }

    fn save(&self, ck: &Checkpoint) -> Result<()> {
        match &self.ckpt_path {
            Some(p) => ck.save(p),
            None => Ok(()),
        }
    }

    fn run_chunk(&self, mode: Mode, t: usize, table: &SignatureTable, lo: u64, hi: u64) -> Result<KCounts> {
        let cfg = self.cfg;
        let mut counts = KCounts::default();
        for rec in stream_primes(lo, hi, cfg.segment.min(((hi - lo + 1) as usize).max(1)))? {
            let pr = prime_record(&rec, self.nu)?;
            let c = candidates_for_prime(&pr, t, table, cfg, mode, &mut |k| match mode {
                Mode::GcdRange => self.gcd_work(&k),
                Mode::SieveRange => self.sieve_work(&k),
            })?;
            counts.add(c);
        }
        Ok(counts)
    }

    fn gcd_work(&self, k: &CandidateK) -> Result<()> {
        let cfg = self.cfg;
        let out = match gcd_filter(k, self.nu, cfg.bound) {
            Ok(o) => o,
            Err(Error::Unresolved { k, residual }) => {
                log::warn!("unresolved GCD residual for k = {k}: {residual}");
                self.sink
                    .lock()
                    .unwrap()
                    .unresolved
                    .push(UnresolvedResidual { k, residual });
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        for q in out.candidate_pts {
            let n = k.k * q;
            if spsp_base_count(&n, cfg.m)? == cfg.m {
                self.record(k, q, cfg.m, Mode::GcdRange)?;
            }
        }
        Ok(())
    }

    fn sieve_work(&self, k: &CandidateK) -> Result<()> {
        let cfg = self.cfg;
        let lo = k.largest_factor() + 1;
        let hi = cfg.bound / k.k;
        for plan in build_wheel_plan(k, u128::from(cfg.bound), self.nu, cfg.headroom)? {
            for h in sieve_plan(k, &plan, lo, hi, cfg.m) {
                if h.bases_passed == cfg.m && is_prime_u64(h.p_t) {
                    self.record(k, h.p_t, h.bases_passed, Mode::SieveRange)?;
                }
            }
        }
        Ok(())
    }

    fn record(&self, k: &CandidateK, q: u64, bases_passed: usize, found_by: Mode) -> Result<()> {
        let mut factors = k.factors.clone();
        factors.push(q);
        self.sink.lock().unwrap().push(Hit {
            n: k.k * q,
            factors,
            bases_passed,
            found_by,
            t: k.t,
        })
    }
}
