//! Text cache for integer coefficient tables (ideal counts, Mertens
//! values, divisor aggregates).
//!
//! Format, line oriented:
//!   #ideal-moments-cache v1 field=<descriptor> table=<tag> N=<N>
//!   n,value          (one line per 1 <= n <= N)
//!   #crc=<hex>       (FNV-1a 64 over everything above)

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ideals::CoefficientTable;

const MAGIC: &str = "#ideal-moments-cache v1";

/// FNV-1a, 64-bit.
pub fn checksum(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn sanitize(part: &str) -> String {
    part.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// Canonical file name for a (field, tag, N) table within a cache dir.
pub fn cache_path(dir: &Path, field: &str, tag: &str, n_max: u64) -> PathBuf {
    dir.join(format!(
        "{}-{}-{}.cache",
        sanitize(field),
        sanitize(tag),
        n_max
    ))
}

/// Render a table in the cache text format, checksum line included.
pub fn render(table: &CoefficientTable<i128>) -> String {
    let mut body = format!(
        "{MAGIC} field={} table={} N={}\n",
        table.field, table.tag, table.n_max
    );
    for n in 1..=table.n_max {
        body.push_str(&format!("{n},{}\n", table[n]));
    }
    format!("{body}#crc={:016x}\n", checksum(body.as_bytes()))
}

/// Write the table under its canonical name; returns the path.
pub fn save(dir: &Path, table: &CoefficientTable<i128>) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, &table.field, &table.tag, table.n_max);
    fs::write(&path, render(table))?;
    Ok(path)
}

/// Parse and validate a cache file: header shape, row coverage, checksum.
pub fn parse(text: &str) -> Result<CoefficientTable<i128>> {
    let bad = |msg: String| Error::Cache(msg);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad(format!("bad magic in header {header:?}")))?;
    let mut field = None;
    let mut tag = None;
    let mut n_max = None;
    for part in rest.split_whitespace() {
        match part.split_once('=') {
            Some(("field", v)) => field = Some(v.to_string()),
            Some(("table", v)) => tag = Some(v.to_string()),
            Some(("N", v)) => {
                n_max = Some(v.parse::<u64>().map_err(|_| bad(format!("bad N {v:?}")))?)
            }
            _ => return Err(bad(format!("unknown header item {part:?}"))),
        }
    }
    let field = field.ok_or_else(|| bad("header missing field=".into()))?;
    let tag = tag.ok_or_else(|| bad("header missing table=".into()))?;
    let n_max = n_max.ok_or_else(|| bad("header missing N=".into()))?;
    if n_max == 0 {
        return Err(bad("N must be >= 1".into()));
    }

    let mut values = vec![0i128; n_max as usize + 1];
    let mut expect = 1u64;
    let mut crc_line = None;
    for line in lines {
        if let Some(hex) = line.strip_prefix("#crc=") {
            crc_line = Some(
                u64::from_str_radix(hex, 16).map_err(|_| bad(format!("bad crc {hex:?}")))?,
            );
            break;
        }
        let (n_str, v_str) = line
            .split_once(',')
            .ok_or_else(|| bad(format!("malformed row {line:?}")))?;
        let n: u64 = n_str.parse().map_err(|_| bad(format!("bad index {n_str:?}")))?;
        if n != expect {
            return Err(bad(format!("row {n} out of order, expected {expect}")));
        }
        if n > n_max {
            return Err(bad(format!("row {n} beyond N={n_max}")));
        }
        values[n as usize] = v_str
            .parse()
            .map_err(|_| bad(format!("bad value {v_str:?}")))?;
        expect += 1;
    }
    if expect != n_max + 1 {
        return Err(bad(format!("file covers n < {expect}, header says N={n_max}")));
    }
    let stored = crc_line.ok_or_else(|| bad("missing #crc line".into()))?;
    let body_end = text
        .rfind("#crc=")
        .expect("crc line located during parsing");
    let computed = checksum(text[..body_end].as_bytes());
    if computed != stored {
        return Err(bad(format!(
            "checksum mismatch: stored {stored:016x}, computed {computed:016x}"
        )));
    }
    Ok(CoefficientTable::from_values(field, tag, values))
}

/// Load a table if a valid cache file exists at the canonical path.
pub fn load(dir: &Path, field: &str, tag: &str, n_max: u64) -> Result<CoefficientTable<i128>> {
    let path = cache_path(dir, field, tag, n_max);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    let table = parse(&text)?;
    if table.field != field || table.tag != tag || table.n_max != n_max {
        return Err(Error::Cache(format!(
            "header ({}, {}, {}) does not match requested ({field}, {tag}, {n_max})",
            table.field, table.tag, table.n_max
        )));
    }
    Ok(table)
}

/// Load if present and valid, otherwise build and save. Corrupt files are
/// rebuilt; the returned flag is true when the cache was hit.
pub fn load_or_build<F>(
    dir: &Path,
    field: &str,
    tag: &str,
    n_max: u64,
    build: F,
) -> Result<(CoefficientTable<i128>, bool)>
where
    F: FnOnce() -> Result<CoefficientTable<i128>>,
{
    match load(dir, field, tag, n_max) {
        Ok(table) => Ok((table, true)),
        Err(Error::Cache(_)) => {
            let table = build()?;
            save(dir, &table)?;
            Ok((table, false))
        }
        Err(e) => Err(e),
    }
}

/// Remove cache files, optionally restricted to one field and/or tag;
/// returns the number removed.
pub fn purge(dir: &Path, field: Option<&str>, tag: Option<&str>) -> Result<usize> {
    let mut removed = 0;
    if !dir.exists() {
        return Ok(0);
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) if n.ends_with(".cache") => n,
            _ => continue,
        };
        if let Some(f) = field {
            if !name.starts_with(&format!("{}-", sanitize(f))) {
                continue;
            }
        }
        if let Some(t) = tag {
            if !name.contains(&format!("-{}-", sanitize(t))) {
                continue;
            }
        }
        fs::remove_file(&path)?;
        removed += 1;
    }
    Ok(removed)
}
