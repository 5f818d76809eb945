//! Range scanner with ordered output and a resumable checkpoint.
//!
//! Checkpoint file (JSON): the scan parameters, the next discriminant to
//! process, the byte lengths of the output files after the last completed
//! chunk, and the running histogram. On resume the outputs are truncated to
//! those lengths, so a crash mid-chunk never duplicates records.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::record::{scan_record, ScanRecord};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub min: i64,
    pub max: i64,
    /// Keep only these case labels; empty keeps all.
    pub cases: Vec<String>,
    pub verify: bool,
    pub timing: bool,
    pub chunk: i64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub min: i64,
    pub max: i64,
    pub cases: Vec<String>,
    pub verify: bool,
    pub next: i64,
    pub output_bytes: u64,
    pub csv_bytes: Option<u64>,
    pub records: u64,
    pub histogram: BTreeMap<String, u64>,
}

impl Checkpoint {
    fn fresh(o: &ScanOptions, csv: bool) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            min: o.min,
            max: o.max,
            cases: o.cases.clone(),
            verify: o.verify,
            next: o.min,
            output_bytes: 0,
            csv_bytes: csv.then_some(0),
            records: 0,
            histogram: BTreeMap::new(),
        }
    }

    fn same_scan(&self, o: &ScanOptions, csv: bool) -> bool {
        self.version == CHECKPOINT_VERSION
            && self.min == o.min
            && self.max == o.max
            && self.cases == o.cases
            && self.verify == o.verify
            && self.csv_bytes.is_some() == csv
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub min: i64,
    pub max: i64,
    pub records: u64,
    pub histogram: BTreeMap<String, u64>,
    pub resumed_from: Option<i64>,
}

#[derive(Debug)]
pub enum ScanError {
    Io { path: PathBuf, source: std::io::Error },
    Checkpoint(String),
    Options(String),
}

impl std::fmt::Display for ScanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            ScanError::Checkpoint(s) => write!(f, "checkpoint: {s}"),
            ScanError::Options(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for ScanError {}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ScanError + '_ {
    move |source| ScanError::Io { path: path.to_path_buf(), source }
}

fn histogram_key(r: &ScanRecord) -> String {
    r.label.clone().unwrap_or_else(|| "error".into())
}

/// Records for [lo, hi] in ascending order.
pub fn scan_chunk(lo: i64, hi: i64, o: &ScanOptions) -> Vec<ScanRecord> {
    (lo..=hi)
        .into_par_iter()
        .filter_map(|d| {
            let t = Instant::now();
            let mut r = scan_record(d, o.verify)?;
            if !o.cases.is_empty() && !r.label.as_ref().is_some_and(|l| o.cases.contains(l)) {
                return None;
            }
            if o.timing {
                r.timing_us = Some(t.elapsed().as_micros() as u64);
            }
            Some(r)
        })
        .collect()
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), ScanError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_string_pretty(cp).expect("checkpoint serializes")).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

fn open_truncated(path: &Path, len: u64) -> Result<File, ScanError> {
    let f = OpenOptions::new().create(true).write(true).truncate(len == 0).open(path).map_err(io(path))?;
    f.set_len(len).map_err(io(path))?;
    let mut f = f;
    std::io::Seek::seek(&mut f, std::io::SeekFrom::Start(len)).map_err(io(path))?;
    Ok(f)
}

/// Scans [min, max] into `output` (JSON lines) and optionally `csv`.
pub fn run_scan(o: &ScanOptions, output: &Path, csv: Option<&Path>, checkpoint: Option<&Path>) -> Result<ScanSummary, ScanError> {
    if o.min > o.max {
        return Err(ScanError::Options(format!("empty range [{}, {}]", o.min, o.max)));
    }
    if o.chunk <= 0 {
        return Err(ScanError::Options("chunk must be positive".into()));
    }
    let mut cp = Checkpoint::fresh(o, csv.is_some());
    let mut resumed_from = None;
    if let Some(path) = checkpoint {
        if path.exists() {
            let text = fs::read_to_string(path).map_err(io(path))?;
            let old: Checkpoint =
                serde_json::from_str(&text).map_err(|e| ScanError::Checkpoint(format!("{}: {e}", path.display())))?;
            if !old.same_scan(o, csv.is_some()) {
                return Err(ScanError::Checkpoint(format!("{} belongs to a different scan", path.display())));
            }
            resumed_from = Some(old.next);
            cp = old;
        }
    }
    let out_file = open_truncated(output, cp.output_bytes)?;
    let mut out = BufWriter::new(out_file);
    let mut csv_out = match csv {
        Some(p) => {
            let f = open_truncated(p, cp.csv_bytes.unwrap_or(0))?;
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(f);
            if cp.csv_bytes == Some(0) {
                w.write_record(ScanRecord::csv_header()).map_err(|e| ScanError::Io { path: p.to_path_buf(), source: e.into() })?;
            }
            Some((p, w))
        }
        None => None,
    };

    let mut run = |cp: &mut Checkpoint| -> Result<(), ScanError> {
        while cp.next <= o.max {
            let hi = o.max.min(cp.next.saturating_add(o.chunk - 1));
            let recs = scan_chunk(cp.next, hi, o);
            for r in &recs {
                writeln!(out, "{}", r.to_line()).map_err(io(output))?;
                *cp.histogram.entry(histogram_key(r)).or_insert(0) += 1;
            }
            out.flush().map_err(io(output))?;
            cp.output_bytes = out.get_ref().metadata().map_err(io(output))?.len();
            if let Some((p, w)) = csv_out.as_mut() {
                for r in &recs {
                    w.write_record(r.csv_row()).map_err(|e| ScanError::Io { path: p.to_path_buf(), source: e.into() })?;
                }
                w.flush().map_err(io(p))?;
                cp.csv_bytes = Some(w.get_ref().metadata().map_err(io(p))?.len());
            }
            cp.records += recs.len() as u64;
            cp.next = hi + 1;
            if let Some(path) = checkpoint {
                save_checkpoint(path, cp)?;
            }
        }
        Ok(())
    };
    match o.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ScanError::Options(e.to_string()))?
            .install(|| run(&mut cp))?,
        None => run(&mut cp)?,
    }
    Ok(ScanSummary { min: o.min, max: o.max, records: cp.records, histogram: cp.histogram, resumed_from })
}
