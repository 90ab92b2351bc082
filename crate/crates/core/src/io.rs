//! CSV records of delay scans.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::Interferogram;

pub const CSV_HEADER: &str = "tau_fs,singles_port1,singles_port2,coincidence,engine";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub tau_fs: f64,
    pub singles_port1: f64,
    pub singles_port2: f64,
    pub coincidence: f64,
    pub engine: String,
}

pub fn records(ig: &Interferogram) -> Vec<ResultRecord> {
    (0..ig.len())
        .map(|j| ResultRecord {
            tau_fs: ig.tau[j] * 1e15,
            singles_port1: ig.singles[j],
            singles_port2: ig.singles_port2[j],
            coincidence: ig.coincidences[j],
            engine: ig.engine.as_str().to_string(),
        })
        .collect()
}

/// Nine significant digits, fixed notation where it reads well.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-5..1e9).contains(&a) {
        let digits = (8 - a.log10().floor() as i32).max(0) as usize;
        format!("{x:.digits$}")
    } else {
        format!("{x:.8e}")
    }
}

pub fn write_csv(w: &mut impl Write, rows: &[ResultRecord]) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        out.write_record([
            format_number(r.tau_fs),
            format_number(r.singles_port1),
            format_number(r.singles_port2),
            format_number(r.coincidence),
            r.engine.clone(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse(format!(
            "unexpected header `{header}`, expected `{CSV_HEADER}`"
        )));
    }
    let out = reader
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRecord>, _>>()?;
    if out.is_empty() {
        return Err(Error::Parse("no records".into()));
    }
    Ok(out)
}
