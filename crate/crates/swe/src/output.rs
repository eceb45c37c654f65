//! CSV and raw binary writers.
//!
//! Every float is written as `{:.16e}`, i.e. 17 significant digits, which is
//! enough for the value to read back bit for bit.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use swe_core::run::{GovernorRecord, RunRecord};
use swe_core::verification::ErrorReport;
use swe_core::FlowState;

/// I/O failure with the file it concerned.
#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    /// Filesystem error.
    #[error("{path}: {source}")]
    Io {
        /// File.
        path: PathBuf,
        /// Cause.
        source: io::Error,
    },
    /// CSV encoding or decoding error.
    #[error("{path}: {source}")]
    Csv {
        /// File.
        path: PathBuf,
        /// Cause.
        source: csv::Error,
    },
    /// Malformed input file.
    #[error("{path}: {message}")]
    Format {
        /// File.
        path: PathBuf,
        /// What was wrong.
        message: String,
    },
}

/// Magic bytes of the raw snapshot format.
pub const F64_MAGIC: &[u8; 4] = b"SWE0";

/// Column names of `series.csv`.
pub const SERIES_HEADER: [&str; 10] = ["n", "t", "k", "h_norm", "u_norm", "v_norm", "h_max", "u_max", "v_max", "source"];

/// Column names of `governor.csv`.
pub const GOVERNOR_HEADER: [&str; 5] = ["n", "t", "k_cfl", "k_thm1", "chosen_k"];

/// Column names of a snapshot CSV.
pub const SNAPSHOT_HEADER: [&str; 5] = ["x", "y", "h", "u", "v"];

/// Column names of a convergence table.
pub const CONVERGENCE_HEADER: [&str; 9] = ["dx", "dy", "k", "e_h", "order_h", "e_u", "order_u", "e_v", "order_v"];

/// Float text with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, OutputError> {
    let f = File::create(path).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), OutputError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let wrap = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r).map_err(wrap)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `series.csv`.
pub fn write_series(path: &Path, records: &[RunRecord]) -> Result<(), OutputError> {
    write_rows(
        path,
        &SERIES_HEADER,
        records.iter().map(|r| {
            [
                r.n.to_string(),
                fmt_f64(r.t),
                fmt_f64(r.k),
                fmt_f64(r.h_norm),
                fmt_f64(r.u_norm),
                fmt_f64(r.v_norm),
                fmt_f64(r.h_max),
                fmt_f64(r.u_max),
                fmt_f64(r.v_max),
                r.source.map(|s| s.label().to_string()).unwrap_or_default(),
            ]
        }),
    )
}

/// `governor.csv`.
pub fn write_governor(path: &Path, records: &[GovernorRecord]) -> Result<(), OutputError> {
    write_rows(
        path,
        &GOVERNOR_HEADER,
        records.iter().map(|r| {
            [
                r.n.to_string(),
                fmt_f64(r.t),
                fmt_f64(r.bound.k_cfl),
                fmt_f64(r.bound.k_thm1),
                fmt_f64(r.bound.chosen_k),
            ]
        }),
    )
}

/// One row per node, `x` fastest.
pub fn write_snapshot_csv(path: &Path, state: &FlowState, h_eps: f64) -> Result<(), OutputError> {
    let g = state.grid;
    let (u, v) = state.primitive_velocities(h_eps);
    write_rows(
        path,
        &SNAPSHOT_HEADER,
        (0..g.ny()).flat_map(|p| (0..g.nx()).map(move |l| (l, p))).map(|(l, p)| {
            let i = g.idx(l, p);
            [fmt_f64(g.x(l)), fmt_f64(g.y(p)), fmt_f64(state.h[i]), fmt_f64(u[i]), fmt_f64(v[i])]
        }),
    )
}

/// Raw snapshot: `SWE0`, `u32` nodes in x, `u32` nodes in y, `f64` time,
/// then the `h`, `u` and `v` fields one after another, each in storage order.
/// Everything little-endian.
pub fn write_snapshot_f64(path: &Path, state: &FlowState, h_eps: f64) -> Result<(), OutputError> {
    let io = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    let g = state.grid;
    let (u, v) = state.primitive_velocities(h_eps);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(F64_MAGIC).map_err(io)?;
    w.write_all(&(g.nx() as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&(g.ny() as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&state.t.to_le_bytes()).map_err(io)?;
    for field in [&state.h, &u, &v] {
        for x in field.iter() {
            w.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Contents of a raw snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSnapshot {
    /// Nodes in x.
    pub nx: usize,
    /// Nodes in y.
    pub ny: usize,
    /// Time.
    pub t: f64,
    /// Depth.
    pub h: Vec<f64>,
    /// x velocity.
    pub u: Vec<f64>,
    /// y velocity.
    pub v: Vec<f64>,
}

/// Read a file written by [`write_snapshot_f64`].
pub fn read_snapshot_f64(path: &Path) -> Result<RawSnapshot, OutputError> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|source| OutputError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let bad = |message: &str| OutputError::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    if bytes.len() < 20 || &bytes[..4] != F64_MAGIC {
        return Err(bad("missing SWE0 header"));
    }
    let nx = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let t = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let n = nx * ny;
    if bytes.len() != 20 + 24 * n {
        return Err(bad("payload length does not match the header"));
    }
    let values: Vec<f64> = bytes[20..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(RawSnapshot {
        nx,
        ny,
        t,
        h: values[..n].to_vec(),
        u: values[n..2 * n].to_vec(),
        v: values[2 * n..].to_vec(),
    })
}

/// File name for a snapshot at time `t`.
pub fn snapshot_name(t: f64, extension: &str) -> String {
    format!("snapshot_t{t}.{extension}")
}

/// Convergence table, one row per rung.
pub fn write_convergence(path: &Path, reports: &[ErrorReport]) -> Result<(), OutputError> {
    write_rows(
        path,
        &CONVERGENCE_HEADER,
        reports.iter().map(|r| {
            [
                fmt_f64(r.dx),
                fmt_f64(r.dy),
                fmt_f64(r.k),
                fmt_f64(r.e_h),
                fmt_opt(r.order_h),
                fmt_f64(r.e_u),
                fmt_opt(r.order_u),
                fmt_f64(r.e_v),
                fmt_opt(r.order_v),
            ]
        }),
    )
}

/// Parse `series.csv` back into records. The `source` column is returned
/// as text.
pub fn read_series(path: &Path) -> Result<Vec<(RunRecord, String)>, OutputError> {
    let wrap = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let bad = |message: String| OutputError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let header = r.headers().map_err(wrap)?.clone();
    if header.iter().ne(SERIES_HEADER.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(wrap)?;
        let f = |i: usize| -> Result<f64, OutputError> {
            row[i].parse::<f64>().map_err(|_| bad(format!("bad number `{}`", &row[i])))
        };
        let n = row[0].parse::<usize>().map_err(|_| bad(format!("bad level `{}`", &row[0])))?;
        let rec = RunRecord {
            n,
            t: f(1)?,
            k: f(2)?,
            h_norm: f(3)?,
            u_norm: f(4)?,
            v_norm: f(5)?,
            h_max: f(6)?,
            u_max: f(7)?,
            v_max: f(8)?,
            source: None,
        };
        out.push((rec, row[9].to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_name(0.5, "csv"), "snapshot_t0.5.csv");
        assert_eq!(snapshot_name(2.0, "f64"), "snapshot_t2.f64");
    }
}
