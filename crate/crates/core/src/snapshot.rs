//! Binary field snapshots and CSV slice export.
//!
//! Snapshot layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  content
//!      0     4  magic "GPF1"
//!      4     1  dim (u8, 1..=3)
//!      5     4  points per axis (u32, even)
//!      9     8  half length L (f64)
//!     17     8  rho0 (f64)
//!     25     8  snapshot time (f64)
//!     33   16*N^dim  row-major interleaved (re, im) f64 samples
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"GPF1";
pub const HEADER_LEN: usize = 33;

/// A field together with the run metadata the file format carries.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub field: Field,
    pub rho0: f64,
    pub time: f64,
}

pub fn encode(field: &Field, rho0: f64, time: f64) -> Vec<u8> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * grid.num_points());
    buf.extend_from_slice(MAGIC);
    buf.push(grid.dim() as u8);
    buf.extend_from_slice(&(grid.points_per_axis() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.half_length().to_le_bytes());
    buf.extend_from_slice(&rho0.to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    buf
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: format!("file truncated inside the {HEADER_LEN}-byte header"),
        });
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!(
                "bad magic {:?}, expected {:?}",
                &bytes[0..4],
                std::str::from_utf8(MAGIC).unwrap()
            ),
        });
    }
    let dim = bytes[4] as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::Format {
            offset: 4,
            message: format!("dimension byte must be 1..=3, got {dim}"),
        });
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let read_f64 = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let half_length = read_f64(9);
    let rho0 = read_f64(17);
    let time = read_f64(25);
    let grid = Grid::new(dim, n, half_length).map_err(|e| Error::Format {
        offset: 5,
        message: format!("invalid lattice parameters: {e}"),
    })?;
    let expected = HEADER_LEN + 16 * grid.num_points();
    if bytes.len() != expected {
        return Err(Error::Format {
            offset: bytes.len().min(expected) as u64,
            message: format!(
                "payload length {} does not match lattice size {}",
                bytes.len(),
                expected
            ),
        });
    }
    let mut values = Vec::with_capacity(grid.num_points());
    let mut at = HEADER_LEN;
    for _ in 0..grid.num_points() {
        let re = read_f64(at);
        let im = read_f64(at + 8);
        values.push(Complex64::new(re, im));
        at += 16;
    }
    Ok(Snapshot {
        field: Field::from_values(&grid, values)?,
        rho0,
        time,
    })
}

/// Write atomically: the bytes land under a temporary name in the target
/// directory and are renamed into place, so interrupted runs never leave a
/// half-written artifact behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Domain(format!("path {path:?} has no file name")))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_snapshot(path: &Path, field: &Field, rho0: f64, time: f64) -> Result<()> {
    write_atomic(path, &encode(field, rho0, time))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

/// Export a 1D slice through the center of the lattice along the given
/// axis as CSV rows `x,re,im`. For 1D fields the slice is the whole field.
pub fn slice_csv(field: &Field, axis: usize) -> Result<String> {
    let grid = field.grid();
    if axis >= grid.dim() {
        return Err(Error::Domain(format!(
            "axis {axis} out of range for dimension {}",
            grid.dim()
        )));
    }
    let n = grid.points_per_axis();
    let stride = n.pow((grid.dim() - 1 - axis) as u32);
    // center the other axes
    let mut base = 0usize;
    for other in 0..grid.dim() {
        if other != axis {
            base += (n / 2) * n.pow((grid.dim() - 1 - other) as u32);
        }
    }
    let mut out = String::from("x,re,im\n");
    let dx = grid.spacing();
    for j in 0..n {
        let x = -grid.half_length() + j as f64 * dx;
        let v = field.values()[base + j * stride];
        out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", x, v.re, v.im));
    }
    Ok(out)
}

/// Grid reconstructed from a snapshot header.
pub fn grid_of(snapshot: &Snapshot) -> Arc<Grid> {
    Arc::clone(snapshot.field.grid())
}
