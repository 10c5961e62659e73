//! `GFLD` binary fields.
//!
//! Layout (little-endian): magic `GFLD`, version `u16`, then `m`, `n`, `N` as
//! `u32`, then one `f64` block per lattice node of the `N^m` cube in
//! lexicographic order (last axis fastest), each block an `n`-vector or a
//! row-major `n×n` matrix. Nodes outside the ball hold a fill block.

use std::fs;
use std::io::Write;
use std::path::Path;

use gaugeforge_core::domain::{Field, GridDomain};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"GFLD";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 3 * 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub m: u32,
    pub n: u32,
    pub points_per_axis: u32,
}

/// A decoded file: header plus the raw lattice payload.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    pub header: Header,
    pub block: usize,
    pub data: Vec<f64>,
}

impl LatticeField {
    /// `(rows, cols)` of each node block.
    pub fn shape(&self) -> (usize, usize) {
        let n = self.header.n as usize;
        if self.block == n * n && n > 1 {
            (n, n)
        } else {
            (self.block, 1)
        }
    }

    pub fn check_grid(&self, dom: &GridDomain, path: &Path) -> Result<()> {
        let h = self.header;
        if h.m as usize != dom.dim() || h.points_per_axis as usize != dom.points_per_axis() {
            return Err(CliError::Format {
                path: path.to_owned(),
                reason: format!(
                    "grid m = {}, N = {} does not match the configured m = {}, N = {}",
                    h.m,
                    h.points_per_axis,
                    dom.dim(),
                    dom.points_per_axis()
                ),
            });
        }
        Ok(())
    }

    /// Interior values onto `dom`; boundary arm values interpolated toward
    /// the exterior lattice nodes.
    pub fn to_field(&self, dom: &GridDomain) -> Field {
        let (r, c) = self.shape();
        Field::from_lattice(dom, r, c, &self.data)
    }
}

pub fn encode(dom: &GridDomain, n: usize, field: &Field, fill: &[f64]) -> Vec<u8> {
    let payload = field.to_lattice(dom, fill);
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(dom.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(dom.points_per_axis() as u32).to_le_bytes());
    for v in payload {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<LatticeField> {
    let bad = |reason: String| CliError::Format {
        path: path.to_owned(),
        reason,
    };
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("missing GFLD magic".into()));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u16_at(4);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let header = Header {
        m: u32_at(6),
        n: u32_at(10),
        points_per_axis: u32_at(14),
    };
    if !(1..=5).contains(&header.m) || header.n == 0 || header.points_per_axis == 0 {
        return Err(bad(format!("implausible header {header:?}")));
    }
    let nodes = (header.points_per_axis as usize)
        .checked_pow(header.m)
        .ok_or_else(|| bad("lattice size overflows".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() % 8 != 0 || body.len() / 8 % nodes != 0 {
        return Err(bad(format!(
            "payload of {} bytes is not a whole lattice",
            body.len()
        )));
    }
    let block = body.len() / 8 / nodes;
    let n = header.n as usize;
    if block != n && block != n * n {
        return Err(bad(format!(
            "block size {block} is neither n nor n² for n = {n}"
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(LatticeField {
        header,
        block,
        data,
    })
}

pub fn write(path: &Path, dom: &GridDomain, n: usize, field: &Field, fill: &[f64]) -> Result<()> {
    let bytes = encode(dom, n, field, fill);
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(&bytes).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> Result<LatticeField> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes, path)
}

/// Fill block for exterior nodes: identity for matrix fields, zero otherwise.
pub fn identity_fill(n: usize) -> Vec<f64> {
    let mut f = vec![0.0; n * n];
    for i in 0..n {
        f[i * n + i] = 1.0;
    }
    f
}
