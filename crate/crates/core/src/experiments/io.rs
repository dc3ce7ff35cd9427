//! CSV and JSON serialization of datasets.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::sweep::Row;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "scheme",
            "k",
            "j",
            "M",
            "pt_dbm",
            "t1",
            "q_db",
            "sigma_n_dbm",
            "sigma_e2",
            "model",
            "method",
            "x_threshold",
            "outage",
            "stderr",
        ])
        .map_err(csv_err)?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<Row>, _>>()
        .map_err(csv_err)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Sidecar path holding the metadata of a CSV dataset.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Writes `rows` to `path` and `metadata` next to it.
pub fn write_dataset<M: Serialize>(path: &Path, rows: &[Row], metadata: &M) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(rows, std::io::BufWriter::new(file))?;
    let meta = std::fs::File::create(metadata_path(path))?;
    write_json(metadata, std::io::BufWriter::new(meta))
}
