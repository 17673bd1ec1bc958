//! Result records and their CSV encoding.
//!
//! Schema: `program,round,verdict,failing_class,failing_input,reps_used,elapsed_ms`.
//! One record per (program, round). Reading a written file reproduces the
//! in-memory records exactly; `elapsed_ms` is the only field that varies
//! between identically-seeded runs.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub program: String,
    pub round: u64,
    pub verdict: String,
    pub failing_class: String,
    pub failing_input: String,
    pub reps_used: u64,
    pub elapsed_ms: u64,
}

impl ResultRecord {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }

    /// Copy with the timing field zeroed, for comparing runs.
    pub fn without_timing(&self) -> ResultRecord {
        ResultRecord { elapsed_ms: 0, ..self.clone() }
    }
}

pub fn records_to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        writer.serialize(record)?;
    }
    let bytes = writer.into_inner().context("flushing csv")?;
    Ok(String::from_utf8(bytes)?)
}

pub fn records_from_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut records = Vec::new();
    for row in reader.deserialize() {
        records.push(row?);
    }
    Ok(records)
}

pub fn write_records(path: &Path, records: &[ResultRecord]) -> Result<()> {
    std::fs::write(path, records_to_csv(records)?)
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    records_from_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRecord> {
        vec![
            ResultRecord {
                program: "QAdder".into(),
                round: 0,
                verdict: "PASS".into(),
                failing_class: String::new(),
                failing_input: String::new(),
                reps_used: 2770,
                elapsed_ms: 12,
            },
            ResultRecord {
                program: "QAdder_AddRyPi".into(),
                round: 1,
                verdict: "FAIL".into(),
                failing_class: "Q1".into(),
                failing_input: "x=0 y=0".into(),
                reps_used: 1,
                elapsed_ms: 0,
            },
        ]
    }

    #[test]
    fn csv_round_trips_exactly() {
        let records = sample();
        let text = records_to_csv(&records).unwrap();
        assert!(text.starts_with(
            "program,round,verdict,failing_class,failing_input,reps_used,elapsed_ms\n"
        ));
        assert_eq!(records_from_csv(&text).unwrap(), records);
    }

    #[test]
    fn timing_is_the_only_varying_field() {
        let a = sample();
        let mut b = sample();
        b[0].elapsed_ms = 999;
        assert_ne!(a, b);
        let strip = |v: &[ResultRecord]| v.iter().map(|r| r.without_timing()).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }
}
