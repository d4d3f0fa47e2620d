//! JSON scene description.
//!
//! Unknown keys are rejected. Angles are given in degrees. Example:
//!
//! ```json
//! {
//!   "world": { "dims": [32, 32, 32], "cell_size": 1.0 },
//!   "objects": [{
//!     "id": 1,
//!     "primitive": { "type": "sphere", "center": [16, 16, 16], "radius": 6 },
//!     "cell_size": 1.0,
//!     "material": { "color": [1, 0.2, 0.2] }
//!   }],
//!   "lights": [{ "position": [16, 40, 0] }],
//!   "observer": { "pose": { "position": [16, 16, -4] }, "sector_deg": [30, 30] },
//!   "display": { "shape": "frustum", "near": 0, "far": 40 }
//! }
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridCoord, ObjectId, WorldGrid};
use crate::material::{Characteristic, Light};
use crate::math::{Pose, Rgb, Vec3};
use crate::shading::{ShadeConfig, ShadowMode};
use crate::synthesis::{
    DisplayShape, FrameUpdate, LightUpdate, Observer, Scene, SceneObject, Sector,
};
use crate::voxelizer::{Material, ObjectModel, Primitive, Voxelizer};

/// Object ids must stay exactly representable as `f32` in volume files.
pub const MAX_OBJECT_ID: u32 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub world: WorldSpec,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub lights: Vec<LightSpec>,
    pub observer: ObserverSpec,
    pub display: DisplaySpec,
    #[serde(default)]
    pub shade: ShadeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    pub dims: [usize; 3],
    pub cell_size: f64,
    #[serde(default)]
    pub origin: [f64; 3],
    #[serde(default)]
    pub medium_absorption: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub medium_edits: Vec<MediumEdit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumEdit {
    pub coord: [usize; 3],
    pub absorption: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacteristicSpec {
    pub color: [f64; 3],
    #[serde(default)]
    pub transparency: f64,
    #[serde(default, alias = "R")]
    pub reflect: f64,
    #[serde(default, alias = "F")]
    pub refract: f64,
    #[serde(default = "one")]
    pub refractive_index: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    #[serde(default)]
    pub position: [f64; 3],
    /// Yaw (about Z), pitch (about Y), roll (about X), in degrees.
    #[serde(default)]
    pub angles_deg: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: u32,
    pub primitive: Primitive,
    pub cell_size: f64,
    /// Uniform material; exactly one of `material` and `per_voxel_material` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<CharacteristicSpec>,
    /// One entry per cell of the voxelized model, in `l`-fastest order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_voxel_material: Option<Vec<CharacteristicSpec>>,
    #[serde(default)]
    pub pose: PoseSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightSpec {
    pub position: [f64; 3],
    #[serde(default = "white")]
    pub color: [f64; 3],
    #[serde(default = "one")]
    pub intensity: f64,
}

fn white() -> [f64; 3] {
    [1.0; 3]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverSpec {
    #[serde(default)]
    pub pose: PoseSpec,
    /// Horizontal and vertical half-angles, in degrees.
    pub sector_deg: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisplaySpec {
    Frustum {
        near: f64,
        far: f64,
    },
    Parallelepiped {
        size: [f64; 3],
    },
    Ball {
        radius: f64,
    },
    Cone {
        half_angle_deg: f64,
        near: f64,
        far: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmittanceMode {
    #[default]
    Binary,
    Attenuated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadeSpec {
    #[serde(default = "default_ambient")]
    pub ambient: [f64; 3],
    #[serde(default)]
    pub light_transmittance_mode: TransmittanceMode,
}

fn default_ambient() -> [f64; 3] {
    [0.1; 3]
}

impl Default for ShadeSpec {
    fn default() -> Self {
        Self {
            ambient: default_ambient(),
            light_transmittance_mode: TransmittanceMode::Binary,
        }
    }
}

/// Prefixes the field name of a range error with its location in the document.
fn at<T>(ctx: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::OutOfRange { field, reason } => Error::OutOfRange {
            field: format!("{ctx}.{field}"),
            reason,
        },
        Error::InvalidPrimitive(msg) => Error::range(format!("{ctx}.primitive"), msg),
        other => other,
    })
}

impl CharacteristicSpec {
    fn to_characteristic(self) -> Result<Characteristic> {
        Characteristic::new(
            self.color.into(),
            self.transparency,
            self.reflect,
            self.refract,
            self.refractive_index,
        )
    }

    fn from_characteristic(c: &Characteristic) -> Self {
        Self {
            color: c.color.into(),
            transparency: c.transparency,
            reflect: c.reflect,
            refract: c.refract,
            refractive_index: c.refractive_index,
        }
    }
}

impl PoseSpec {
    pub fn to_pose(self) -> Result<Pose> {
        let [yaw, pitch, roll] = self.angles_deg.map(f64::to_radians);
        let pose = Pose::new(self.position.into(), yaw, pitch, roll);
        if pose.is_finite() {
            Ok(pose)
        } else {
            Err(Error::range("pose", "must be finite"))
        }
    }

    pub fn from_pose(p: &Pose) -> Self {
        Self {
            position: p.position.into(),
            angles_deg: [p.yaw, p.pitch, p.roll].map(f64::to_degrees),
        }
    }
}

impl LightSpec {
    fn to_light(self) -> Result<Light> {
        Light::new(self.position.into(), self.color.into(), self.intensity)
    }
}

impl ObserverSpec {
    pub fn to_observer(self) -> Result<Observer> {
        let pose = at("observer", self.pose.to_pose())?;
        let [h, v] = self.sector_deg.map(f64::to_radians);
        Observer::new(
            pose,
            Sector {
                horizontal: h,
                vertical: v,
            },
        )
    }

    fn from_observer(o: &Observer) -> Self {
        Self {
            pose: PoseSpec::from_pose(&o.pose),
            sector_deg: [o.sector.horizontal, o.sector.vertical].map(f64::to_degrees),
        }
    }
}

impl DisplaySpec {
    fn to_shape(self) -> Result<DisplayShape> {
        let shape = match self {
            DisplaySpec::Frustum { near, far } => DisplayShape::Frustum { near, far },
            DisplaySpec::Parallelepiped { size } => {
                DisplayShape::Parallelepiped { size: size.into() }
            }
            DisplaySpec::Ball { radius } => DisplayShape::Ball { radius },
            DisplaySpec::Cone {
                half_angle_deg,
                near,
                far,
            } => DisplayShape::Cone {
                half_angle: half_angle_deg.to_radians(),
                near,
                far,
            },
        };
        shape.validate()?;
        Ok(shape)
    }

    fn from_shape(s: &DisplayShape) -> Self {
        match *s {
            DisplayShape::Frustum { near, far } => DisplaySpec::Frustum { near, far },
            DisplayShape::Parallelepiped { size } => {
                DisplaySpec::Parallelepiped { size: size.into() }
            }
            DisplayShape::Ball { radius } => DisplaySpec::Ball { radius },
            DisplayShape::Cone {
                half_angle,
                near,
                far,
            } => DisplaySpec::Cone {
                half_angle_deg: half_angle.to_degrees(),
                near,
                far,
            },
        }
    }
}

impl SceneFile {
    /// Parses a scene document; errors carry the key path and line/column.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Parse {
                context: format!("{source}:{}:{} at `{path}`", inner.line(), inner.column()),
                message: inner.to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene documents always serialize")
    }

    /// Validates the document and builds the engine state, placing objects in file order.
    pub fn build(&self) -> Result<Scene> {
        let w = &self.world;
        let world = at(
            "world",
            WorldGrid::new(w.dims, w.cell_size, w.origin.into())
                .and_then(|g| g.with_absorption(w.medium_absorption)),
        )?;
        let mut world = world;
        for (i, e) in w.medium_edits.iter().enumerate() {
            at(
                &format!("world.medium_edits[{i}]"),
                world.set_absorption(GridCoord::from(e.coord), e.absorption),
            )?;
        }

        let observer = self.observer.to_observer()?;
        let display = at("display", self.display.to_shape())?;
        let shade = ShadeConfig {
            ambient: {
                let a: Rgb = self.shade.ambient.into();
                at("shade", crate::material::check_rgb("ambient", a))?;
                a
            },
            shadow_mode: match self.shade.light_transmittance_mode {
                TransmittanceMode::Binary => ShadowMode::Binary,
                TransmittanceMode::Attenuated => ShadowMode::Attenuated,
            },
        };

        let mut scene = Scene::new(world, observer, display, shade);
        for (i, l) in self.lights.iter().enumerate() {
            scene
                .lights
                .push(at(&format!("lights[{i}]"), l.to_light())?);
        }

        let mut ids = BTreeSet::new();
        for (i, spec) in self.objects.iter().enumerate() {
            let ctx = format!("objects[{i}]");
            if spec.id >= MAX_OBJECT_ID {
                return Err(Error::range(
                    format!("{ctx}.id"),
                    format!("{} must be below {MAX_OBJECT_ID}", spec.id),
                ));
            }
            if !ids.insert(spec.id) {
                return Err(Error::DuplicateObject(ObjectId(spec.id)));
            }
            let model = at(&ctx, build_model(spec))?;
            scene.add_object(SceneObject {
                id: ObjectId(spec.id),
                primitive: Some(spec.primitive.clone()),
                model,
            })?;
        }
        Ok(scene)
    }

    /// Describes an engine state. Objects must carry the primitive they came from.
    pub fn from_scene(scene: &Scene) -> Result<Self> {
        let world = &scene.world;
        let default_absorption = most_common_absorption(world);
        let medium_edits = world
            .lattice()
            .coords()
            .filter(|c| world.absorption(*c).to_bits() != default_absorption.to_bits())
            .map(|c| MediumEdit {
                coord: c.to_array(),
                absorption: world.absorption(c),
            })
            .collect();

        let objects = scene
            .objects
            .iter()
            .map(|o| {
                let primitive = o.primitive.clone().ok_or_else(|| {
                    Error::range(
                        format!("object {}", o.id),
                        "has no primitive and cannot be written to a scene file",
                    )
                })?;
                let (material, per_voxel_material) = match &o.model.material {
                    Material::Uniform(c) => {
                        (Some(CharacteristicSpec::from_characteristic(c)), None)
                    }
                    Material::PerVoxel(v) => (
                        None,
                        Some(
                            v.iter()
                                .map(CharacteristicSpec::from_characteristic)
                                .collect(),
                        ),
                    ),
                };
                Ok(ObjectSpec {
                    id: o.id.0,
                    primitive,
                    cell_size: o.model.lattice.cell_size,
                    material,
                    per_voxel_material,
                    pose: PoseSpec::from_pose(&o.model.pose),
                })
            })
            .collect::<Result<_>>()?;

        Ok(SceneFile {
            world: WorldSpec {
                dims: world.dims(),
                cell_size: world.cell_size(),
                origin: world.origin().into(),
                medium_absorption: default_absorption,
                medium_edits,
            },
            objects,
            lights: scene
                .lights
                .iter()
                .map(|l| LightSpec {
                    position: l.position.into(),
                    color: l.color.into(),
                    intensity: l.intensity,
                })
                .collect(),
            observer: ObserverSpec::from_observer(&scene.observer),
            display: DisplaySpec::from_shape(&scene.display),
            shade: ShadeSpec {
                ambient: scene.shade.ambient.into(),
                light_transmittance_mode: match scene.shade.shadow_mode {
                    ShadowMode::Binary => TransmittanceMode::Binary,
                    ShadowMode::Attenuated => TransmittanceMode::Attenuated,
                },
            },
        })
    }
}

fn build_model(spec: &ObjectSpec) -> Result<ObjectModel> {
    let pose = spec.pose.to_pose()?;
    let model = match (&spec.material, &spec.per_voxel_material) {
        (Some(m), None) => {
            let m = at("material", m.to_characteristic())?;
            Voxelizer::default().voxelize(&spec.primitive, spec.cell_size, m)?
        }
        (None, Some(list)) => {
            let base = Voxelizer::default().voxelize(
                &spec.primitive,
                spec.cell_size,
                Characteristic::default(),
            )?;
            let materials = list
                .iter()
                .enumerate()
                .map(|(i, m)| at(&format!("per_voxel_material[{i}]"), m.to_characteristic()))
                .collect::<Result<Vec<_>>>()?;
            at(
                "per_voxel_material",
                ObjectModel::new(base.lattice, base.occupancy, Material::PerVoxel(materials)),
            )?
        }
        _ => {
            return Err(Error::range(
                "material",
                "exactly one of `material` and `per_voxel_material` is required",
            ))
        }
    };
    Ok(model.with_pose(pose))
}

fn most_common_absorption(world: &WorldGrid) -> f64 {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for v in world.cells() {
        *counts.entry(v.absorption.to_bits()).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by_key(|&(bits, n)| (n, std::cmp::Reverse(bits)))
        .map(|(bits, _)| f64::from_bits(bits))
        .unwrap_or(0.0)
}

/// Reads, validates and builds a scene file.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(super::with_path(path))?;
    SceneFile::parse(&text, &path.display().to_string())?.build()
}

/// Writes a scene back out as JSON.
pub fn save_scene(scene: &Scene, path: impl AsRef<Path>) -> Result<()> {
    let doc = SceneFile::from_scene(scene)?;
    super::write_atomic(path.as_ref(), doc.to_json().as_bytes())
}

// Frame updates for animations: a JSON array with one object per frame.

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    #[serde(default)]
    pub objects: Vec<ObjectPoseSpec>,
    #[serde(default)]
    pub lights: Vec<LightUpdateSpec>,
    #[serde(default)]
    pub observer: Option<ObserverSpec>,
    #[serde(default)]
    pub medium: Vec<MediumEdit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectPoseSpec {
    pub id: u32,
    pub pose: PoseSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightUpdateSpec {
    pub index: usize,
    #[serde(default)]
    pub position: Option<[f64; 3]>,
    #[serde(default)]
    pub color: Option<[f64; 3]>,
    #[serde(default)]
    pub intensity: Option<f64>,
}

impl FrameSpec {
    pub fn to_update(&self) -> Result<FrameUpdate> {
        Ok(FrameUpdate {
            objects: self
                .objects
                .iter()
                .map(|o| Ok((ObjectId(o.id), o.pose.to_pose()?)))
                .collect::<Result<_>>()?,
            lights: self
                .lights
                .iter()
                .map(|l| LightUpdate {
                    index: l.index,
                    position: l.position.map(Vec3::from),
                    color: l.color.map(Rgb::from),
                    intensity: l.intensity,
                })
                .collect(),
            observer: self.observer.map(|o| o.to_observer()).transpose()?,
            medium: self
                .medium
                .iter()
                .map(|m| (GridCoord::from(m.coord), m.absorption))
                .collect(),
        })
    }
}

/// Reads an animation file: a JSON array of frame updates.
pub fn load_frames(path: impl AsRef<Path>) -> Result<Vec<FrameUpdate>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(super::with_path(path))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let specs: Vec<FrameSpec> = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            context: format!(
                "{}:{}:{} at `{p}`",
                path.display(),
                inner.line(),
                inner.column()
            ),
            message: inner.to_string(),
        }
    })?;
    specs
        .iter()
        .enumerate()
        .map(|(i, f)| at(&format!("frames[{i}]"), f.to_update()))
        .collect()
}
