//! CSV and JSON persistence.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::datasets::{LabeledSignal, Provenance};
use crate::error::{Error, Result};

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(File::create(path)?)
}

/// Writes records with a header row derived from field names.
pub fn write_records<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(create(path)?));
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let out = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}

/// One signal per row: `alpha_target, s_0, ..., s_{d-1}`.
pub fn write_signals(path: &Path, signals: &[LabeledSignal]) -> Result<()> {
    let d = signals.first().map_or(0, LabeledSignal::len);
    if signals.iter().any(|s| s.len() != d) {
        return Err(Error::invalid("signals differ in length"));
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(create(path)?));
    let mut header = vec!["alpha_target".to_string()];
    header.extend((0..d).map(|i| format!("s_{i}")));
    w.write_record(&header)?;
    for s in signals {
        let mut row = vec![s.alpha_target.to_string()];
        row.extend(s.samples.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_signals(path: &Path) -> Result<Vec<LabeledSignal>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.get(0) != Some("alpha_target") {
        return Err(Error::invalid(format!(
            "{}: first column must be alpha_target",
            path.display()
        )));
    }
    let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        out.push(LabeledSignal {
            samples: vals[1..].to_vec(),
            alpha_target: vals[0],
            provenance: Provenance {
                generator: name.clone(),
                seed: 0,
                x: None,
            },
        });
    }
    Ok(out)
}

/// Reads a two-column `t,y` table.
pub fn read_xy(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    #[derive(serde::Deserialize)]
    struct Row {
        t: f64,
        y: f64,
    }
    let rows: Vec<Row> = read_records(path)?;
    Ok(rows.into_iter().map(|r| (r.t, r.y)).unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Rec {
        a: f64,
        b: Option<usize>,
        c: String,
    }

    #[test]
    fn records_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/r.csv");
        let recs = vec![
            Rec { a: 0.1 + 0.2, b: None, c: "x".into() },
            Rec { a: -1e-300, b: Some(3), c: "y,z".into() },
        ];
        write_records(&p, &recs).unwrap();
        assert_eq!(read_records::<Rec>(&p).unwrap(), recs);
    }

    #[test]
    fn signals_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let sig = vec![
            LabeledSignal::new(vec![1.0, 1.0 / 3.0, 2.5e-17], 0.7, "g", 0),
            LabeledSignal::new(vec![0.0, -4.0, 1e10], 1.25, "g", 0),
        ];
        write_signals(&p, &sig).unwrap();
        let back = read_signals(&p).unwrap();
        for (a, b) in sig.iter().zip(&back) {
            assert_eq!(a.samples, b.samples);
            assert_eq!(a.alpha_target, b.alpha_target);
        }
    }
}
