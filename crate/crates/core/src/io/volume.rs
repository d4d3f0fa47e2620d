//! Binary volume files.
//!
//! Layout: the magic line `VVOL1\n`, an ASCII header `Nx Ny Nz cell_size ox oy oz\n`, then one
//! 24-byte record per cell in `l + Nx * (m + Ny * n)` order, six little-endian `f32`s:
//! `r g b transparency source object_id`. `source` is 0 (empty), 1 (scene) or 2 (object);
//! `object_id` is 0 unless the source is an object.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::ObjectId;
use crate::math::Vec3;
use crate::synthesis::{Source, VolumeCell, VolumetricRepresentation};

pub const MAGIC: &[u8] = b"VVOL1\n";
const RECORD: usize = 24;

pub fn encode_volume(p: &VolumetricRepresentation) -> Vec<u8> {
    let [nx, ny, nz] = p.dims;
    let o = p.origin;
    let header = format!("{nx} {ny} {nz} {} {} {} {}\n", p.cell_size, o.x, o.y, o.z);
    let mut out = Vec::with_capacity(MAGIC.len() + header.len() + p.cells.len() * RECORD);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(header.as_bytes());
    for c in &p.cells {
        let (code, id) = match c.source {
            Source::Empty => (0.0, 0.0),
            Source::Scene => (1.0, 0.0),
            Source::Object(id) => (2.0, id.0 as f32),
        };
        for v in [c.color[0], c.color[1], c.color[2], c.transparency, code, id] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadVolume(msg.into())
}

pub fn decode_volume(bytes: &[u8]) -> Result<VolumetricRepresentation> {
    let rest = bytes
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad("missing VVOL1 magic"))?;
    let nl = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("unterminated header"))?;
    let header = std::str::from_utf8(&rest[..nl]).map_err(|_| bad("header is not ASCII"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 7 {
        return Err(bad(format!(
            "header has {} fields, expected 7",
            fields.len()
        )));
    }
    let mut dims = [0usize; 3];
    for (d, f) in dims.iter_mut().zip(&fields[..3]) {
        *d = f.parse().map_err(|_| bad(format!("bad dimension `{f}`")))?;
    }
    let mut floats = [0f64; 4];
    for (v, f) in floats.iter_mut().zip(&fields[3..]) {
        *v = f.parse().map_err(|_| bad(format!("bad number `{f}`")))?;
    }
    let [cell_size, ox, oy, oz] = floats;
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(bad(format!("cell size {cell_size} is not > 0")));
    }

    let count = dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| bad("dimensions overflow"))?;
    let body = &rest[nl + 1..];
    let expected = count
        .checked_mul(RECORD)
        .ok_or_else(|| bad("dimensions overflow"))?;
    if body.len() != expected {
        return Err(bad(format!(
            "body is {} bytes, expected {expected} for {count} cells",
            body.len()
        )));
    }

    let cells = body
        .chunks_exact(RECORD)
        .enumerate()
        .map(|(i, rec)| {
            let f: [f32; 6] = std::array::from_fn(|k| {
                f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().unwrap())
            });
            for (k, v) in f[..4].iter().enumerate() {
                if !(0.0..=1.0).contains(v) {
                    return Err(bad(format!(
                        "cell {i}: channel {k} = {v} is outside [0, 1]"
                    )));
                }
            }
            let source = match f[4] {
                0.0 => Source::Empty,
                1.0 => Source::Scene,
                2.0 => {
                    let id = f[5];
                    if !(id >= 0.0 && id.fract() == 0.0 && id < super::MAX_OBJECT_ID as f32) {
                        return Err(bad(format!("cell {i}: bad object id {id}")));
                    }
                    Source::Object(ObjectId(id as u32))
                }
                s => return Err(bad(format!("cell {i}: bad source code {s}"))),
            };
            Ok(VolumeCell {
                source,
                color: [f[0], f[1], f[2]],
                transparency: f[3],
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(VolumetricRepresentation {
        dims,
        cell_size,
        origin: Vec3::new(ox, oy, oz),
        cells,
    })
}

pub fn write_volume(p: &VolumetricRepresentation, path: impl AsRef<Path>) -> Result<()> {
    super::write_atomic(path.as_ref(), &encode_volume(p))
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<VolumetricRepresentation> {
    let path = path.as_ref();
    decode_volume(&fs::read(path).map_err(super::with_path(path))?)
}
