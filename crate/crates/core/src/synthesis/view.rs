//! Observer, display shapes and the visible volume they cut out of the world.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::grid::{GridCoord, Lattice, WorldGrid};
use crate::math::{Pose, Vec3};
use crate::traversal::Ray;

/// Horizontal and vertical half-angles of the observation sector, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub horizontal: f64,
    pub vertical: f64,
}

/// Viewer placed in the world. The view direction is the pose-rotated +Z axis; +X and +Y of the
/// pose span the horizontal and vertical extents of the sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observer {
    pub pose: Pose,
    pub sector: Sector,
}

fn half_angle(field: &str, a: f64) -> Result<()> {
    if a > 0.0 && a < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::range(field, format!("{a} rad is not in (0, pi/2)")))
    }
}

impl Observer {
    pub fn new(pose: Pose, sector: Sector) -> Result<Self> {
        let o = Self { pose, sector };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pose.is_finite() {
            return Err(Error::range("observer.pose", "must be finite"));
        }
        half_angle("observer.sector.horizontal", self.sector.horizontal)?;
        half_angle("observer.sector.vertical", self.sector.vertical)
    }

    pub fn position(&self) -> Vec3 {
        self.pose.position
    }

    pub fn view_dir(&self) -> Vec3 {
        self.pose.rotation().mul_vec(Vec3::Z)
    }
}

/// Form of the volumetric display's sight space, in observer coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisplayShape {
    /// Rectangular pyramid (truncated at `near`) from the observer, opened by the sector angles.
    Frustum { near: f64, far: f64 },
    /// Box of the given size: centred on the view axis, spanning `[0, size.z)` along it.
    Parallelepiped { size: Vec3 },
    /// Ball of the given radius centred on the observer.
    Ball { radius: f64 },
    /// Circular cone (truncated at `near`) around the view axis.
    Cone {
        half_angle: f64,
        near: f64,
        far: f64,
    },
}

impl DisplayShape {
    pub fn validate(&self) -> Result<()> {
        let depth = |near: f64, far: f64| {
            if !(near >= 0.0 && near.is_finite()) {
                Err(Error::range("display.near", format!("{near} is not >= 0")))
            } else if !(far > near && far.is_finite()) {
                Err(Error::range("display.far", format!("{far} is not > near")))
            } else {
                Ok(())
            }
        };
        match *self {
            DisplayShape::Frustum { near, far } => depth(near, far),
            DisplayShape::Parallelepiped { size } => {
                if (0..3).all(|a| size[a] > 0.0 && size[a].is_finite()) {
                    Ok(())
                } else {
                    Err(Error::range("display.size", "every extent must be > 0"))
                }
            }
            DisplayShape::Ball { radius } => {
                if radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::range(
                        "display.radius",
                        format!("{radius} is not > 0"),
                    ))
                }
            }
            DisplayShape::Cone {
                half_angle: a,
                near,
                far,
            } => {
                half_angle("display.half_angle", a)?;
                depth(near, far)
            }
        }
    }

    /// Membership of a point given in observer coordinates.
    pub fn contains_local(&self, sector: &Sector, p: Vec3) -> bool {
        match *self {
            DisplayShape::Frustum { near, far } => {
                p.z >= near
                    && p.z <= far
                    && p.x.abs() <= p.z * sector.horizontal.tan()
                    && p.y.abs() <= p.z * sector.vertical.tan()
            }
            DisplayShape::Parallelepiped { size } => {
                p.x >= -0.5 * size.x
                    && p.x < 0.5 * size.x
                    && p.y >= -0.5 * size.y
                    && p.y < 0.5 * size.y
                    && p.z >= 0.0
                    && p.z < size.z
            }
            DisplayShape::Ball { radius } => p.length() <= radius,
            DisplayShape::Cone {
                half_angle,
                near,
                far,
            } => {
                p.z >= near
                    && p.z <= far
                    && (p.x * p.x + p.y * p.y).sqrt() <= p.z * half_angle.tan()
            }
        }
    }

    pub fn contains(&self, obs: &Observer, world_point: Vec3) -> bool {
        self.contains_local(&obs.sector, obs.pose.to_local(world_point))
    }

    /// Corners of a box in observer coordinates enclosing the shape.
    fn local_corners(&self, sector: &Sector) -> [Vec3; 8] {
        let (x0, x1, y0, y1, z0, z1) = match *self {
            DisplayShape::Frustum { near: _, far } => {
                let hx = far * sector.horizontal.tan();
                let hy = far * sector.vertical.tan();
                (-hx, hx, -hy, hy, 0.0, far)
            }
            DisplayShape::Parallelepiped { size } => (
                -0.5 * size.x,
                0.5 * size.x,
                -0.5 * size.y,
                0.5 * size.y,
                0.0,
                size.z,
            ),
            DisplayShape::Ball { radius } => (-radius, radius, -radius, radius, -radius, radius),
            DisplayShape::Cone {
                half_angle, far, ..
            } => {
                let h = far * half_angle.tan();
                (-h, h, -h, h, 0.0, far)
            }
        };
        std::array::from_fn(|i| {
            Vec3::new(
                if i & 1 == 0 { x0 } else { x1 },
                if i & 2 == 0 { y0 } else { y1 },
                if i & 4 == 0 { z0 } else { z1 },
            )
        })
    }

    /// World-space axis-aligned box enclosing the posed shape.
    pub fn world_bounds(&self, obs: &Observer) -> (Vec3, Vec3) {
        self.local_corners(&obs.sector).iter().fold(
            (Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY)),
            |(lo, hi), c| {
                let w = obs.pose.to_world(*c);
                (lo.min_elem(w), hi.max_elem(w))
            },
        )
    }
}

/// The part of the world seen through the display: an index box of world cells, which of them lie
/// inside the display shape, and the scene medium sampled at each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewSpace {
    /// Index box in world coordinates; may have zero cells.
    pub lattice: Lattice,
    /// World index of the box's first cell.
    pub offset: [usize; 3],
    pub membership: Vec<bool>,
    /// Gray level `exp(-absorption * cell_size)` of each cell's medium.
    pub scene_gray: Vec<f64>,
}

impl ViewSpace {
    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn member_count(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    pub fn to_world(&self, c: GridCoord) -> GridCoord {
        GridCoord::new(
            c.l + self.offset[0],
            c.m + self.offset[1],
            c.n + self.offset[2],
        )
    }

    /// Local index of a world cell, if it lies in the index box.
    pub fn from_world(&self, c: GridCoord) -> Option<GridCoord> {
        let local = GridCoord::new(
            c.l.checked_sub(self.offset[0])?,
            c.m.checked_sub(self.offset[1])?,
            c.n.checked_sub(self.offset[2])?,
        );
        self.lattice.contains(local).then_some(local)
    }

    pub fn is_member_local(&self, c: GridCoord) -> bool {
        self.lattice.contains(c) && self.membership[self.lattice.index(c)]
    }

    pub fn is_member(&self, world: GridCoord) -> bool {
        self.from_world(world)
            .is_some_and(|c| self.membership[self.lattice.index(c)])
    }

    /// Member cells in local coordinates, in layout order.
    pub fn members(&self) -> impl Iterator<Item = GridCoord> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| self.lattice.coord(i))
    }
}

/// Cuts the display volume out of the world.
///
/// The index box is the world-clipped bounding box of the posed shape; a cell is a member iff its
/// center is inside the shape. A shape entirely outside the world gives an empty view space.
pub fn build_view_space(obs: &Observer, shape: &DisplayShape, world: &WorldGrid) -> ViewSpace {
    let d = world.cell_size();
    let (lo, hi) = shape.world_bounds(obs);
    let Some((min, max)) = world.lattice().cell_range(lo, hi) else {
        return ViewSpace {
            lattice: Lattice {
                dims: [0; 3],
                cell_size: d,
                origin: world.origin(),
            },
            offset: [0; 3],
            membership: Vec::new(),
            scene_gray: Vec::new(),
        };
    };
    let dims = [
        max[0] - min[0] + 1,
        max[1] - min[1] + 1,
        max[2] - min[2] + 1,
    ];
    let origin = world.cell_center(GridCoord::from(min)) - Vec3::splat(0.5 * d);
    let lattice = Lattice {
        dims,
        cell_size: d,
        origin,
    };
    let mut membership = vec![false; lattice.cell_count()];
    let mut scene_gray = vec![0.0; lattice.cell_count()];
    for (i, (member, gray)) in membership.iter_mut().zip(&mut scene_gray).enumerate() {
        let local = lattice.coord(i);
        let wc = GridCoord::new(local.l + min[0], local.m + min[1], local.n + min[2]);
        *member = shape.contains(obs, world.cell_center(wc));
        *gray = (-world.absorption(wc) * d).exp();
    }
    ViewSpace {
        lattice,
        offset: min,
        membership,
        scene_gray,
    }
}

/// A primary ray towards one far-boundary member cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SightRay {
    pub ray: Ray,
    /// Target cell, in view-space local coordinates.
    pub target: GridCoord,
}

/// One ray from the observer through the center of every member cell on the far boundary of the
/// display, in layout order of the targets, with duplicate directions removed.
///
/// Far-boundary cells are: for frustum and cone, cells whose center pushed two cells further away
/// from the observer lands outside the member set; for the parallelepiped, cells whose center pushed one cell along
/// the view direction lands outside it; for the ball, every member cell with a non-member face neighbour.
/// Where the world clips the shape, the clipped face therefore counts as far boundary.
pub fn sight_rays(obs: &Observer, shape: &DisplayShape, vs: &ViewSpace) -> Vec<SightRay> {
    let d = vs.lattice.cell_size;
    let eye = obs.position();
    let view = obs.view_dir();
    let mut seen = HashSet::new();
    let mut rays = Vec::new();
    for c in vs.members() {
        let center = vs.lattice.cell_center(c);
        let Some(dir) = (center - eye).try_normalize() else {
            continue;
        };
        let leaves = |p: Vec3| vs.lattice.locate(p).is_none_or(|n| !vs.is_member_local(n));
        let far_boundary = match shape {
            DisplayShape::Frustum { .. } | DisplayShape::Cone { .. } => {
                leaves(center + dir * (d * FAR_SHELL_DEPTH))
            }
            DisplayShape::Parallelepiped { .. } => leaves(center + view * d),
            DisplayShape::Ball { .. } => FACE_NEIGHBOURS
                .iter()
                .any(|o| c.offset(*o).is_none_or(|n| !vs.is_member_local(n))),
        };
        if !far_boundary {
            continue;
        }
        if seen.insert(dir.to_array().map(f64::to_bits)) {
            rays.push(SightRay {
                ray: Ray {
                    origin: eye,
                    direction: dir,
                },
                target: c,
            });
        }
    }
    rays
}

/// Depth of the far-boundary shell of frustum and cone, in cells.
const FAR_SHELL_DEPTH: f64 = 2.0;

pub(crate) const FACE_NEIGHBOURS: [[i64; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];
