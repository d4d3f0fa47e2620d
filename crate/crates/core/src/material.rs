//! Per-voxel optical characteristics and light sources.

use crate::error::{Error, Result};
use crate::math::{Rgb, Vec3};

/// Visual characteristic of an object voxel.
///
/// `reflect` and `refract` are the weights with which a single reflected or refracted
/// secondary ray contributes to the voxel's final colour. Their sum never exceeds 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristic {
    pub color: Rgb,
    /// 0 is opaque.
    pub transparency: f64,
    pub reflect: f64,
    pub refract: f64,
    pub refractive_index: f64,
}

fn unit_interval(field: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::range(field, format!("{v} is not in [0, 1]")))
    }
}

pub(crate) fn check_rgb(field: &str, c: Rgb) -> Result<()> {
    unit_interval(&format!("{field}.r"), c.r)?;
    unit_interval(&format!("{field}.g"), c.g)?;
    unit_interval(&format!("{field}.b"), c.b)
}

impl Characteristic {
    pub fn new(
        color: Rgb,
        transparency: f64,
        reflect: f64,
        refract: f64,
        refractive_index: f64,
    ) -> Result<Self> {
        let c = Self {
            color,
            transparency,
            reflect,
            refract,
            refractive_index,
        };
        c.validate()?;
        Ok(c)
    }

    /// Opaque, non-reflecting, non-refracting material of the given colour.
    pub fn matte(color: Rgb) -> Result<Self> {
        Self::new(color, 0.0, 0.0, 0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_rgb("color", self.color)?;
        unit_interval("transparency", self.transparency)?;
        unit_interval("reflect", self.reflect)?;
        unit_interval("refract", self.refract)?;
        if self.reflect + self.refract > 1.0 {
            return Err(Error::range(
                "reflect + refract",
                format!("{} exceeds 1", self.reflect + self.refract),
            ));
        }
        if !(self.refractive_index >= 1.0 && self.refractive_index.is_finite()) {
            return Err(Error::range(
                "refractive_index",
                format!("{} is not a finite value >= 1", self.refractive_index),
            ));
        }
        Ok(())
    }

    /// Bit pattern used to intern identical materials.
    pub(crate) fn bits(&self) -> [u64; 7] {
        [
            self.color.r.to_bits(),
            self.color.g.to_bits(),
            self.color.b.to_bits(),
            self.transparency.to_bits(),
            self.reflect.to_bits(),
            self.refract.to_bits(),
            self.refractive_index.to_bits(),
        ]
    }
}

impl Default for Characteristic {
    fn default() -> Self {
        Self {
            color: Rgb::WHITE,
            transparency: 0.0,
            reflect: 0.0,
            refract: 0.0,
            refractive_index: 1.0,
        }
    }
}

/// Point light source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Light {
    pub position: Vec3,
    pub color: Rgb,
    pub intensity: f64,
}

impl Light {
    pub fn new(position: Vec3, color: Rgb, intensity: f64) -> Result<Self> {
        let l = Self {
            position,
            color,
            intensity,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::range("light.position", "must be finite"));
        }
        check_rgb("light.color", self.color)?;
        if !(self.intensity >= 0.0 && self.intensity.is_finite()) {
            return Err(Error::range(
                "light.intensity",
                format!("{} is not a finite value >= 0", self.intensity),
            ));
        }
        Ok(())
    }
}
