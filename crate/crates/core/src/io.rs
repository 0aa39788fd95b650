//! Binary persistence.
//!
//! Environment file: a 16-byte header — magic `RCME` (4 bytes), dimension
//! (u16 LE), distribution tag (u16 LE), box side (u64 LE) — followed by the
//! `d·L^d` edge conductances as little-endian f64 in flat edge order
//! (`dir * L^d + vertex`). Nothing else: the format stores the realized
//! edges plus the law's tag, not its parameters.
//!
//! Bundle container: the same header and edge array, then tagged sections
//! `[tag u32][meta u32][len u64][payload f64 × len]`. Unknown sections are
//! skipped on read.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corrector::{CorrectorBundle, SigmaComponent};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::field::{VectorField, VertexField};
use crate::solver::SolveReport;

pub const MAGIC: [u8; 4] = *b"RCME";

pub const SECTION_PHI: u32 = 1;
pub const SECTION_GRAD_PHI: u32 = 2;
pub const SECTION_FLUX: u32 = 3;
pub const SECTION_SIGMA: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvHeader {
    pub dimension: u16,
    pub distribution_tag: u16,
    pub box_side: u64,
}

fn write_header(w: &mut impl Write, env: &Environment) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(env.torus().dim() as u16).to_le_bytes())?;
    w.write_all(&env.spec().distribution.tag().to_le_bytes())?;
    w.write_all(&(env.torus().side() as u64).to_le_bytes())?;
    Ok(())
}

fn write_f64s(w: &mut impl Write, data: &[f64]) -> Result<()> {
    for v in data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Write the bare environment file (header + edge array).
pub fn write_environment(path: &Path, env: &Environment) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, env)?;
    write_f64s(&mut w, env.edges())?;
    w.flush()?;
    Ok(())
}

/// Read header and edge array back. The header carries only the law's tag;
/// pair with [`Environment::from_parts`] when the full spec is known.
pub fn read_environment(path: &Path) -> Result<(EnvHeader, Vec<f64>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::contract(format!(
            "bad magic {magic:?}; not an environment file"
        )));
    }
    let mut u16buf = [0u8; 2];
    r.read_exact(&mut u16buf)?;
    let dimension = u16::from_le_bytes(u16buf);
    r.read_exact(&mut u16buf)?;
    let distribution_tag = u16::from_le_bytes(u16buf);
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let box_side = u64::from_le_bytes(u64buf);
    let n_edges = dimension as usize * (box_side as usize).pow(dimension as u32);
    let edges = read_f64s(&mut r, n_edges)?;
    Ok((
        EnvHeader {
            dimension,
            distribution_tag,
            box_side,
        },
        edges,
    ))
}

fn write_section(w: &mut impl Write, tag: u32, meta: u32, data: &[f64]) -> Result<()> {
    w.write_all(&tag.to_le_bytes())?;
    w.write_all(&meta.to_le_bytes())?;
    w.write_all(&(data.len() as u64).to_le_bytes())?;
    write_f64s(w, data)
}

/// Write an environment together with a corrector bundle in the section-
/// tagged container. Sigma sections encode `(i, j, k)` in the meta word.
pub fn write_bundle(path: &Path, env: &Environment, bundle: &CorrectorBundle) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, env)?;
    write_f64s(&mut w, env.edges())?;
    let i = bundle.direction as u32;
    write_section(&mut w, SECTION_PHI, i, bundle.phi.as_slice())?;
    write_section(&mut w, SECTION_GRAD_PHI, i, bundle.grad_phi.as_slice())?;
    write_section(&mut w, SECTION_FLUX, i, bundle.flux.as_slice())?;
    for s in &bundle.sigma {
        let meta = (i << 16) | ((s.j as u32) << 8) | s.k as u32;
        write_section(&mut w, SECTION_SIGMA, meta, s.field.as_slice())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a bundle container written by [`write_bundle`].
pub fn read_bundle(path: &Path) -> Result<(EnvHeader, Vec<f64>, CorrectorBundle)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if head[0..4] != MAGIC {
        return Err(Error::contract("bad magic; not a bundle file"));
    }
    let dimension = u16::from_le_bytes(head[4..6].try_into().unwrap());
    let distribution_tag = u16::from_le_bytes(head[6..8].try_into().unwrap());
    let box_side = u64::from_le_bytes(head[8..16].try_into().unwrap());
    let d = dimension as usize;
    let n = (box_side as usize).pow(dimension as u32);
    let edges = read_f64s(&mut r, d * n)?;

    let mut direction = 0usize;
    let mut phi = None;
    let mut grad_phi = None;
    let mut flux = None;
    let mut sigma = Vec::new();
    loop {
        let mut tagbuf = [0u8; 4];
        match r.read_exact(&mut tagbuf) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
        let tag = u32::from_le_bytes(tagbuf);
        let mut metabuf = [0u8; 4];
        r.read_exact(&mut metabuf)?;
        let meta = u32::from_le_bytes(metabuf);
        let mut lenbuf = [0u8; 8];
        r.read_exact(&mut lenbuf)?;
        let len = u64::from_le_bytes(lenbuf) as usize;
        let data = read_f64s(&mut r, len)?;
        match tag {
            SECTION_PHI => {
                direction = meta as usize;
                phi = Some(VertexField::from_vec(data));
            }
            SECTION_GRAD_PHI => grad_phi = Some(VectorField::from_vec(d, data)),
            SECTION_FLUX => flux = Some(VectorField::from_vec(d, data)),
            SECTION_SIGMA => {
                let j = ((meta >> 8) & 0xff) as usize;
                let k = (meta & 0xff) as usize;
                sigma.push(SigmaComponent {
                    j,
                    k,
                    field: VertexField::from_vec(data),
                    residual: 0.0,
                });
            }
            _ => {} // unknown section: skip
        }
    }
    let phi = phi.ok_or_else(|| Error::contract("bundle file missing phi section"))?;
    let grad_phi =
        grad_phi.ok_or_else(|| Error::contract("bundle file missing gradient section"))?;
    let flux = flux.ok_or_else(|| Error::contract("bundle file missing flux section"))?;
    let header = EnvHeader {
        dimension,
        distribution_tag,
        box_side,
    };
    Ok((
        header,
        edges,
        CorrectorBundle {
            direction,
            phi,
            grad_phi,
            flux,
            sigma,
            phi_report: SolveReport {
                iterations: 0,
                final_residual: 0.0,
                tolerance: 0.0,
                wall_seconds: 0.0,
            },
            tolerance: 0.0,
        },
    ))
}
