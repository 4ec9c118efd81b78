use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use freshness_core::report::{RowRecord, CSV_HEADER};
use tempfile::NamedTempFile;

use crate::args::TableFormat;
use crate::error::CliError;

pub fn write_table<W: Write>(rows: &[RowRecord], format: TableFormat, out: W) -> io::Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for row in rows {
                w.write_record(row.csv_fields())?;
            }
            w.flush()
        }
        TableFormat::Jsonl => {
            let mut out = io::BufWriter::new(out);
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

/// Writes `path` through a temporary file in the same directory, so a
/// failure never leaves a partial file behind.
pub fn write_atomically<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut NamedTempFile) -> io::Result<()>,
{
    let io_err = |e: io::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    fill(&mut tmp).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Appends one CSV row, writing the header first if the file is new or empty.
pub fn append_csv_row(path: &Path, row: &RowRecord) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_err)?;
    let fresh = file.metadata().map_err(io_err)?.len() == 0;
    let mut w = csv::Writer::from_writer(file);
    let result = (|| {
        if fresh {
            w.write_record(CSV_HEADER)?;
        }
        w.write_record(row.csv_fields())?;
        w.flush()
    })();
    result.map_err(io_err)
}

/// `results/fig2.csv` → `results/fig2.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

pub fn write_json_pretty<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_atomically(path, |f| {
        serde_json::to_writer_pretty(&mut *f, value)?;
        f.write_all(b"\n")
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}
