//! Axis-aligned 2D projections of a volume, written as binary PPM.

use std::io::Write;

use crate::error::Result;
use crate::synthesis::{Source, VolumetricRepresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(format!("unknown axis `{s}`, expected x, y or z")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionMode {
    /// Color of the object cell with the smallest index along the axis.
    #[default]
    FirstPopulated,
    /// Per-channel maximum over the object cells along the axis.
    MaxChannel,
}

/// 8-bit RGB raster; row 0 is the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

fn to_u8(c: f32) -> u8 {
    (c.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Projects object cells along `axis`. Pixel columns follow the lower of the two remaining grid
/// axes, rows the higher one, increasing upwards. Pixels with no object cell are black.
pub fn project(p: &VolumetricRepresentation, axis: Axis, mode: ProjectionMode) -> Image {
    let [nx, ny, nz] = p.dims;
    let (width, height, depth) = match axis {
        Axis::X => (ny, nz, nx),
        Axis::Y => (nx, nz, ny),
        Axis::Z => (nx, ny, nz),
    };
    let mut data = vec![0u8; 3 * width * height];
    for v in 0..height {
        for u in 0..width {
            let mut acc: Option<[f32; 3]> = None;
            for d in 0..depth {
                let (l, m, n) = match axis {
                    Axis::X => (d, u, v),
                    Axis::Y => (u, d, v),
                    Axis::Z => (u, v, d),
                };
                let cell = &p.cells[l + nx * (m + ny * n)];
                if !matches!(cell.source, Source::Object(_)) {
                    continue;
                }
                match mode {
                    ProjectionMode::FirstPopulated => {
                        acc = Some(cell.color);
                        break;
                    }
                    ProjectionMode::MaxChannel => {
                        let a = acc.get_or_insert([0.0; 3]);
                        for (a, c) in a.iter_mut().zip(cell.color) {
                            *a = a.max(c);
                        }
                    }
                }
            }
            if let Some(c) = acc {
                let i = 3 * ((height - 1 - v) * width + u);
                data[i..i + 3].copy_from_slice(&c.map(to_u8));
            }
        }
    }
    Image {
        width,
        height,
        data,
    }
}

pub fn write_ppm(img: &Image, mut w: impl Write) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", img.width, img.height)?;
    w.write_all(&img.data)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ObjectId;
    use crate::math::Vec3;
    use crate::synthesis::VolumeCell;

    fn obj(color: [f32; 3]) -> VolumeCell {
        VolumeCell {
            source: Source::Object(ObjectId(1)),
            color,
            transparency: 0.0,
        }
    }

    #[test]
    fn first_populated_and_max_channel() {
        let mut p = VolumetricRepresentation::empty([2, 3, 4], 1.0, Vec3::ZERO);
        // Column (l=1, m=2) along z: two object cells.
        p.cells[1 + 2 * (2 + 3)] = obj([1.0, 0.0, 0.2]);
        p.cells[1 + 2 * (2 + 3 * 3)] = obj([0.0, 0.5, 1.0]);
        p.cells[0] = VolumeCell {
            source: Source::Scene,
            color: [1.0; 3],
            transparency: 1.0,
        };

        let first = project(&p, Axis::Z, ProjectionMode::FirstPopulated);
        assert_eq!((first.width, first.height), (2, 3));
        assert_eq!(first.pixel(1, 0), [255, 0, 51]);
        assert_eq!(first.pixel(0, 2), [0, 0, 0]);

        let max = project(&p, Axis::Z, ProjectionMode::MaxChannel);
        assert_eq!(max.pixel(1, 0), [255, 128, 255]);

        let side = project(&p, Axis::X, ProjectionMode::FirstPopulated);
        assert_eq!((side.width, side.height), (3, 4));
        assert_eq!(side.pixel(2, 4 - 1 - 1), [255, 0, 51]);
        assert_eq!(side.pixel(2, 0), [0, 128, 255]);
    }

    #[test]
    fn ppm_header() {
        let img = Image {
            width: 2,
            height: 1,
            data: vec![1, 2, 3, 4, 5, 6],
        };
        let mut out = Vec::new();
        write_ppm(&img, &mut out).unwrap();
        assert_eq!(out, b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06");
    }
}
