//! Engine state and its evolution over frames.

use crate::error::{Error, Result};
use crate::grid::{GridCoord, ObjectId, WorldGrid};
use crate::material::Light;
use crate::math::{Pose, Rgb, Vec3};
use crate::shading::ShadeConfig;
use crate::voxelizer::{place_object, ObjectModel, Primitive};

use super::{synthesize, DisplayShape, Observer, VolumetricRepresentation};

/// A placed object. `primitive` records what the model was voxelized from, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub id: ObjectId,
    pub primitive: Option<Primitive>,
    pub model: ObjectModel,
}

/// Everything needed to render one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub world: WorldGrid,
    /// In placement order; later objects overwrite earlier ones where they overlap.
    pub objects: Vec<SceneObject>,
    pub lights: Vec<Light>,
    pub observer: Observer,
    pub display: DisplayShape,
    pub shade: ShadeConfig,
}

impl Scene {
    pub fn new(
        world: WorldGrid,
        observer: Observer,
        display: DisplayShape,
        shade: ShadeConfig,
    ) -> Self {
        Self {
            world,
            objects: Vec::new(),
            lights: Vec::new(),
            observer,
            display,
            shade,
        }
    }

    /// Places a new object on top of the existing ones.
    pub fn add_object(&mut self, obj: SceneObject) -> Result<()> {
        if self.objects.iter().any(|o| o.id == obj.id) {
            return Err(Error::DuplicateObject(obj.id));
        }
        place_object(&mut self.world, &obj.model, obj.id);
        self.objects.push(obj);
        Ok(())
    }

    pub fn object(&self, id: ObjectId) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn synthesize(&self, threads: usize) -> Result<VolumetricRepresentation> {
        synthesize(
            &self.world,
            &self.observer,
            &self.display,
            &self.lights,
            &self.shade,
            threads,
        )
    }

    /// Applies one frame of changes, or none of them if any part is invalid.
    ///
    /// Moving any object re-places all objects in their original order, which keeps overlap
    /// precedence stable across frames.
    pub fn apply_frame(&mut self, upd: &FrameUpdate) -> Result<()> {
        self.check_frame(upd)?;

        if !upd.objects.is_empty() {
            for (id, pose) in &upd.objects {
                let obj = self
                    .objects
                    .iter_mut()
                    .find(|o| o.id == *id)
                    .expect("checked");
                obj.model.pose = *pose;
            }
            self.world.clear_all_occupants();
            for obj in &self.objects {
                place_object(&mut self.world, &obj.model, obj.id);
            }
        }

        for lu in &upd.lights {
            let light = &mut self.lights[lu.index];
            if let Some(p) = lu.position {
                light.position = p;
            }
            if let Some(c) = lu.color {
                light.color = c;
            }
            if let Some(i) = lu.intensity {
                light.intensity = i;
            }
        }

        if let Some(obs) = upd.observer {
            self.observer = obs;
        }

        for &(c, a) in &upd.medium {
            self.world.set_absorption(c, a).expect("checked");
        }
        Ok(())
    }

    fn check_frame(&self, upd: &FrameUpdate) -> Result<()> {
        for (id, pose) in &upd.objects {
            if self.object(*id).is_none() {
                return Err(Error::UnknownObject(*id));
            }
            if !pose.is_finite() {
                return Err(Error::range("objects.pose", "must be finite"));
            }
        }
        for lu in &upd.lights {
            let Some(light) = self.lights.get(lu.index) else {
                return Err(Error::UnknownLight(lu.index));
            };
            let mut l = *light;
            l.position = lu.position.unwrap_or(l.position);
            l.color = lu.color.unwrap_or(l.color);
            l.intensity = lu.intensity.unwrap_or(l.intensity);
            l.validate()?;
        }
        if let Some(obs) = &upd.observer {
            obs.validate()?;
        }
        for &(c, a) in &upd.medium {
            if !self.world.contains(c) {
                return Err(Error::CoordOutOfBounds(c.l, c.m, c.n));
            }
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::range(
                    "medium.absorption",
                    format!("{a} is not >= 0"),
                ));
            }
        }
        Ok(())
    }
}

/// Changes to one light; absent fields are kept.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LightUpdate {
    pub index: usize,
    pub position: Option<Vec3>,
    pub color: Option<Rgb>,
    pub intensity: Option<f64>,
}

/// Changes between two consecutive frames.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameUpdate {
    /// New absolute poses.
    pub objects: Vec<(ObjectId, Pose)>,
    pub lights: Vec<LightUpdate>,
    pub observer: Option<Observer>,
    /// New medium absorption per cell.
    pub medium: Vec<(GridCoord, f64)>,
}

impl FrameUpdate {
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
            && self.lights.is_empty()
            && self.observer.is_none()
            && self.medium.is_empty()
    }
}

/// Applies each frame in turn and renders after each one.
pub fn run_scenario(
    scene: &mut Scene,
    frames: &[FrameUpdate],
    threads: usize,
) -> Result<Vec<VolumetricRepresentation>> {
    frames
        .iter()
        .enumerate()
        .map(|(index, upd)| {
            scene.apply_frame(upd).map_err(|e| Error::Frame {
                index,
                source: Box::new(e),
            })?;
            scene.synthesize(threads)
        })
        .collect()
}
