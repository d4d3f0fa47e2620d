//! Synthesis of the volumetric representation seen by an observer.
//!
//! The world is cut down to the display's view space, whose cells start out carrying the scene
//! medium. Sight rays from the observer through the far boundary of the display march the view
//! space; the first object voxel each ray meets is shaded and replaces the medium in its cell.

mod frame;
mod view;

pub use frame::{run_scenario, FrameUpdate, LightUpdate, Scene, SceneObject};
pub use view::{build_view_space, sight_rays, DisplayShape, Observer, Sector, SightRay, ViewSpace};

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{GridCoord, ObjectId, WorldGrid};
use crate::material::Light;
use crate::math::Vec3;
use crate::shading::{shade, ShadeConfig};
use crate::traversal::{first_hit_where, Hit, Ray};

/// Where a cell of the representation got its value from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Source {
    /// Outside the display shape.
    #[default]
    Empty,
    /// Scene medium only.
    Scene,
    /// A visible object voxel.
    Object(ObjectId),
}

/// One cell of the output volume.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VolumeCell {
    pub source: Source,
    pub color: [f32; 3],
    pub transparency: f32,
}

/// The observer-visible voxel set with its computed characteristics.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumetricRepresentation {
    pub dims: [usize; 3],
    pub cell_size: f64,
    /// World position of the min corner of cell (0, 0, 0).
    pub origin: Vec3,
    /// Layout `l + Nx * (m + Ny * n)`.
    pub cells: Vec<VolumeCell>,
}

impl VolumetricRepresentation {
    /// All-empty volume.
    pub fn empty(dims: [usize; 3], cell_size: f64, origin: Vec3) -> Self {
        Self {
            dims,
            cell_size,
            origin,
            cells: vec![VolumeCell::default(); dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn index(&self, c: GridCoord) -> usize {
        c.l + self.dims[0] * (c.m + self.dims[1] * c.n)
    }

    pub fn coord(&self, i: usize) -> GridCoord {
        let l = i % self.dims[0];
        let rest = i / self.dims[0];
        GridCoord::new(l, rest % self.dims[1], rest / self.dims[1])
    }

    pub fn cell(&self, c: GridCoord) -> &VolumeCell {
        &self.cells[self.index(c)]
    }

    pub fn object_cells(&self) -> impl Iterator<Item = (GridCoord, &VolumeCell)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.source, Source::Object(_)))
            .map(|(i, c)| (self.coord(i), c))
    }

    pub fn object_count(&self) -> usize {
        self.object_cells().count()
    }

    pub fn scene_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.source == Source::Scene)
            .count()
    }

    /// Mean position of the object cells' centers, if any.
    pub fn object_centroid(&self) -> Option<Vec3> {
        let (sum, n) = self
            .object_cells()
            .fold((Vec3::ZERO, 0usize), |(s, n), (c, _)| {
                (s + self.cell_center(c), n + 1)
            });
        (n > 0).then(|| sum / n as f64)
    }

    pub fn cell_center(&self, c: GridCoord) -> Vec3 {
        self.origin
            + Vec3::new(c.l as f64 + 0.5, c.m as f64 + 0.5, c.n as f64 + 0.5) * self.cell_size
    }
}

/// First occupied member cell of the view space along a sight ray, in world coordinates.
pub fn trace_sight_ray(world: &WorldGrid, vs: &ViewSpace, ray: &Ray) -> Option<Hit> {
    first_hit_where(ray, world, f64::INFINITY, |c, _| vs.is_member(c))
}

/// Object cells of `p` that are not both view-space members and occupied by the same object in
/// the world. Empty for every valid synthesis.
pub fn set_identity_violations(
    p: &VolumetricRepresentation,
    vs: &ViewSpace,
    world: &WorldGrid,
) -> Vec<GridCoord> {
    p.object_cells()
        .filter_map(|(c, cell)| {
            let Source::Object(id) = cell.source else {
                return None;
            };
            let ok = vs.is_member_local(c)
                && world.occupant(vs.to_world(c)).is_some_and(|(o, _)| o == id);
            (!ok).then_some(c)
        })
        .collect()
}

/// Per-ray result before merging.
struct RayResult {
    cell: GridCoord,
    object: ObjectId,
    color: [f32; 3],
    transparency: f32,
}

fn to_f32(c: crate::math::Rgb) -> [f32; 3] {
    [c.r as f32, c.g as f32, c.b as f32]
}

/// Renders the volumetric representation of `world` for `obs` through `shape`.
///
/// Rays are independent and traced in parallel on `threads` workers (0 uses the global pool);
/// when several rays hit the same cell the lowest ray index wins, so the result does not depend
/// on the worker count.
pub fn synthesize(
    world: &WorldGrid,
    obs: &Observer,
    shape: &DisplayShape,
    lights: &[Light],
    cfg: &ShadeConfig,
    threads: usize,
) -> Result<VolumetricRepresentation> {
    let vs = build_view_space(obs, shape, world);
    let mut p =
        VolumetricRepresentation::empty(vs.lattice.dims, vs.lattice.cell_size, vs.lattice.origin);
    for (i, cell) in p.cells.iter_mut().enumerate() {
        if vs.membership[i] {
            let g = vs.scene_gray[i] as f32;
            *cell = VolumeCell {
                source: Source::Scene,
                color: [g; 3],
                transparency: g,
            };
        }
    }
    if vs.is_empty() {
        return Ok(p);
    }

    let rays = sight_rays(obs, shape, &vs);
    let trace = |sr: &SightRay| -> Option<RayResult> {
        let hit = trace_sight_ray(world, &vs, &sr.ray)?;
        let color = shade(world, &hit, &sr.ray, lights, cfg, 0);
        Some(RayResult {
            cell: vs.from_world(hit.coord).expect("hit is a member"),
            object: hit.object,
            color: to_f32(color),
            transparency: hit.characteristic.transparency as f32,
        })
    };

    let results: Vec<Option<RayResult>> = match threads {
        1 => rays.iter().map(trace).collect(),
        0 => rays.par_iter().map(trace).collect(),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| std::io::Error::other(e.to_string()))?
            .install(|| rays.par_iter().map(trace).collect()),
    };

    for r in results.into_iter().flatten() {
        let i = p.index(r.cell);
        if !matches!(p.cells[i].source, Source::Object(_)) {
            p.cells[i] = VolumeCell {
                source: Source::Object(r.object),
                color: r.color,
                transparency: r.transparency,
            };
        }
    }
    Ok(p)
}
