//! Resume state: the finished prefix of the outer prime range per stage.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::driver::generate::Mode;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub bound: u64,
    pub bases: usize,
    pub cutoff: u64,
    pub stages: Vec<StageState>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageState {
    pub phase: String,
    pub t: usize,
    /// Every outer prime below this value has been fully processed.
    pub frontier: u64,
    pub complete: bool,
    /// `k` values seen so far in either mode.
    pub k_seen: u64,
}

impl Checkpoint {
    pub fn new(bound: u64, bases: usize, cutoff: u64) -> Self {
        Checkpoint {
            bound,
            bases,
            cutoff,
            stages: Vec::new(),
        }
    }

    pub fn stage(&self, mode: Mode, t: usize) -> Option<&StageState> {
        self.stages
            .iter()
            .find(|s| s.phase == mode.name() && s.t == t)
    }

    pub fn stage_mut(&mut self, mode: Mode, t: usize) -> &mut StageState {
        let pos = self
            .stages
            .iter()
            .position(|s| s.phase == mode.name() && s.t == t);
        match pos {
            Some(i) => &mut self.stages[i],
            None => {
                self.stages.push(StageState {
                    phase: mode.name().to_string(),
                    t,
                    frontier: 0,
                    complete: false,
                    k_seen: 0,
                });
                self.stages.last_mut().unwrap()
            }
        }
    }

    pub fn load(path: &Path) -> Result<Option<Self>> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        serde_json::from_str(&text).map(Some).map_err(|e| Error::Parse {
            what: "checkpoint",
            path: path.to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Writes through a temporary file and a rename so a crash never leaves
    /// a torn checkpoint.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("ckpt.tmp");
        let text = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    /// Fails when the stored run used different search parameters.
    pub fn check_matches(&self, bound: u64, bases: usize, cutoff: u64) -> Result<()> {
        if (self.bound, self.bases, self.cutoff) != (bound, bases, cutoff) {
            return Err(Error::Config(format!(
                "checkpoint is for B={} m={} X={}, not B={bound} m={bases} X={cutoff}",
                self.bound, self.bases, self.cutoff
            )));
        }
        Ok(())
    }
}
