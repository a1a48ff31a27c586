//! Append-only text file of hits.
//!
//! ```text
//! # spsp hits B=2048 m=1 X=13 version=0.1.0
//! 2047	2	23*89	1	sieve
//! ```

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::driver::generate::Mode;
use crate::driver::Hit;
use crate::error::{Error, Result};

pub struct HitWriter {
    path: PathBuf,
    file: File,
}

impl HitWriter {
    /// Opens `path` for appending, writing the header if the file is new or
    /// empty.
    pub fn open(path: &Path, bound: u64, m: usize, cutoff: u64) -> Result<Self> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
        if len == 0 {
            writeln!(
                file,
                "# spsp hits B={bound} m={m} X={cutoff} version={}",
                env!("CARGO_PKG_VERSION")
            )
            .map_err(|e| Error::io(path, e))?;
        }
        Ok(HitWriter {
            path: path.to_path_buf(),
            file,
        })
    }

    pub fn append(&mut self, hit: &Hit) -> Result<()> {
        writeln!(self.file, "{}", format_hit(hit)).map_err(|e| Error::io(&self.path, e))?;
        self.file.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn format_hit(hit: &Hit) -> String {
    let factors: Vec<String> = hit.factors.iter().map(u64::to_string).collect();
    format!(
        "{}\t{}\t{}\t{}\t{}",
        hit.n,
        hit.t,
        factors.join("*"),
        hit.bases_passed,
        hit.found_by.name()
    )
}

pub fn parse_hit(line: &str) -> std::result::Result<Hit, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 5 {
        return Err(format!("expected 5 tab-separated fields, found {}", cols.len()));
    }
    let n = cols[0].parse::<u64>().map_err(|e| format!("n: {e}"))?;
    let t = cols[1].parse::<usize>().map_err(|e| format!("t: {e}"))?;
    let factors = cols[2]
        .split('*')
        .map(|f| f.parse::<u64>().map_err(|e| format!("factor {f:?}: {e}")))
        .collect::<std::result::Result<Vec<u64>, String>>()?;
    let bases_passed = cols[3].parse::<usize>().map_err(|e| format!("bases: {e}"))?;
    let found_by = match cols[4] {
        "gcd" => Mode::GcdRange,
        "sieve" => Mode::SieveRange,
        other => return Err(format!("unknown phase {other:?}")),
    };
    if factors.len() != t || factors.iter().map(|&f| u128::from(f)).product::<u128>() != u128::from(n) {
        return Err("factors do not match n and t".into());
    }
    Ok(Hit {
        n,
        factors,
        bases_passed,
        found_by,
        t,
    })
}

/// Reads all hits of an existing file; a missing file reads as empty.
pub fn read_hits(path: &Path) -> Result<Vec<Hit>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_hit(line).map_err(|msg| Error::Parse {
            what: "hit file",
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hits.tsv");
        let hit = Hit {
            n: 2047,
            factors: vec![23, 89],
            bases_passed: 1,
            found_by: Mode::SieveRange,
            t: 2,
        };
        {
            let mut w = HitWriter::open(&path, 2048, 1, 13).unwrap();
            w.append(&hit).unwrap();
        }
        HitWriter::open(&path, 2048, 1, 13).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 1);
        assert!(text.contains("2047\t2\t23*89\t1\tsieve"));
        assert_eq!(read_hits(&path).unwrap(), vec![hit]);
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_hit("2047\t2\t23*88\t1\tsieve").is_err());
        assert!(parse_hit("2047\t2\t23*89\t1\tbogus").is_err());
        assert!(parse_hit("2047 2").is_err());
        assert!(read_hits(Path::new("/nonexistent/hits")).unwrap().is_empty());
    }
}
