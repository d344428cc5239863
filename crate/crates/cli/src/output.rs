//! Table and JSON emission to stdout or a file.

use std::env;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cli::{Format, OutputArgs};
use crate::error::CliResult;
use crate::format::round_json;

pub const OUTPUT_DIR_ENV: &str = "NOONSIM_OUTPUT_DIR";

/// A header plus rows of already formatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn resolve(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn sink(out: &OutputArgs) -> CliResult<Box<dyn Write>> {
    Ok(match &out.output {
        Some(p) => {
            let p = resolve(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            Box::new(File::create(p)?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

pub fn emit_table(table: &Table, out: &OutputArgs) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_json<T: Serialize>(value: &T, out: &OutputArgs) -> CliResult<()> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn format_or(out: &OutputArgs, default: Format) -> Format {
    out.format.unwrap_or(default)
}
