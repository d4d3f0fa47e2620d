//! Discrete ray stepping through a lattice of cubic cells.
//!
//! [`GridMarch`] is an incremental 3D DDA in the style of Amanatides and Woo: starting from the
//! cell where the ray enters the lattice it moves exactly one face-neighbour per step, always
//! across the nearest boundary. When boundaries on several axes are crossed at the same
//! parameter, axes are stepped in x, y, z order, producing zero-length cells instead of diagonal
//! moves. The cell sequence is therefore always 6-connected.

use crate::error::{Error, Result};
use crate::grid::{GridCoord, Lattice, ObjectId, Occupant, WorldGrid};
use crate::material::Characteristic;
use crate::math::Vec3;

/// Half-line `origin + t * direction`, `t >= 0`, with unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    /// Normalizes `direction`; fails on a zero or non-finite direction.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self> {
        let direction = direction
            .try_normalize()
            .ok_or_else(|| Error::range("ray.direction", "must be non-zero and finite"))?;
        if !origin.is_finite() {
            return Err(Error::range("ray.origin", "must be finite"));
        }
        Ok(Self { origin, direction })
    }

    /// Ray from `from` towards `to`, or `None` if the points coincide.
    pub fn between(from: Vec3, to: Vec3) -> Option<(Self, f64)> {
        let d = to - from;
        let len = d.length();
        if len > 0.0 && len.is_finite() {
            Some((
                Self {
                    origin: from,
                    direction: d / len,
                },
                len,
            ))
        } else {
            None
        }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// One cell visited by a march, with the ray parameters where the ray enters and leaves it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchStep {
    pub coord: GridCoord,
    pub entry_t: f64,
    pub exit_t: f64,
}

/// Iterator over the cells pierced by a ray segment, in increasing `t`.
#[derive(Debug, Clone)]
pub struct GridMarch<'a> {
    lattice: &'a Lattice,
    ray: Ray,
    cell: [i64; 3],
    step: [i64; 3],
    t: f64,
    t_end: f64,
    remaining: usize,
}

impl<'a> GridMarch<'a> {
    /// Marches the whole ray (`t` in `[0, inf)`) clipped to the lattice.
    pub fn new(ray: &Ray, lattice: &'a Lattice) -> Self {
        Self::segment(ray, lattice, f64::INFINITY)
    }

    /// Marches the part of the ray with `t` in `[0, t_max]` clipped to the lattice.
    pub fn segment(ray: &Ray, lattice: &'a Lattice, t_max: f64) -> Self {
        let empty = GridMarch {
            lattice,
            ray: *ray,
            cell: [0; 3],
            step: [0; 3],
            t: 0.0,
            t_end: 0.0,
            remaining: 0,
        };

        let lo = lattice.min_corner();
        let hi = lattice.max_corner();
        let o = ray.origin;
        let d = ray.direction;

        let mut t_near = f64::NEG_INFINITY;
        let mut t_far = f64::INFINITY;
        let mut entry_axis = None;
        for a in 0..3 {
            if d[a] == 0.0 {
                // Half-open cells: a ray lying in the max face plane is outside.
                if o[a] < lo[a] || o[a] >= hi[a] {
                    return empty;
                }
                continue;
            }
            let t1 = (lo[a] - o[a]) / d[a];
            let t2 = (hi[a] - o[a]) / d[a];
            let (t_in, t_out) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            if t_in > t_near {
                t_near = t_in;
                entry_axis = Some(a);
            }
            t_far = t_far.min(t_out);
        }

        let t_start = t_near.max(0.0);
        let t_end = t_far.min(t_max);
        if t_start >= t_end || t_start.is_nan() || t_end.is_nan() {
            return empty;
        }
        let entering_face = if t_near >= 0.0 { entry_axis } else { None };

        let p = ray.at(t_start);
        let mut cell = [0i64; 3];
        let mut step = [0i64; 3];
        for a in 0..3 {
            step[a] = if d[a] > 0.0 {
                1
            } else if d[a] < 0.0 {
                -1
            } else {
                0
            };
            let n = lattice.dims[a] as i64;
            cell[a] = if entering_face == Some(a) {
                if d[a] > 0.0 {
                    0
                } else {
                    n - 1
                }
            } else {
                let q = (p[a] - lo[a]) / lattice.cell_size;
                let f = q.floor();
                let mut c = f as i64;
                // Sitting exactly on a boundary while moving down belongs to the lower cell.
                if d[a] < 0.0 && q == f {
                    c -= 1;
                }
                c.clamp(0, n - 1)
            };
        }

        GridMarch {
            lattice,
            ray: *ray,
            cell,
            step,
            t: t_start,
            t_end,
            remaining: lattice.dims.iter().sum::<usize>() + 3,
        }
    }

    /// Parameter at which the ray crosses the next boundary along `axis`.
    #[inline]
    fn boundary_t(&self, axis: usize) -> f64 {
        let d = self.ray.direction[axis];
        if self.step[axis] == 0 {
            return f64::INFINITY;
        }
        let k = if self.step[axis] > 0 {
            self.cell[axis] + 1
        } else {
            self.cell[axis]
        };
        let plane = self.lattice.origin[axis] + k as f64 * self.lattice.cell_size;
        ((plane - self.ray.origin[axis]) / d).max(self.t)
    }
}

impl Iterator for GridMarch<'_> {
    type Item = MarchStep;

    fn next(&mut self) -> Option<MarchStep> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;

        let bounds = [self.boundary_t(0), self.boundary_t(1), self.boundary_t(2)];
        let mut axis = 0;
        for a in 1..3 {
            if bounds[a] < bounds[axis] {
                axis = a;
            }
        }
        let exit = bounds[axis].min(self.t_end);
        let item = MarchStep {
            coord: GridCoord::new(
                self.cell[0] as usize,
                self.cell[1] as usize,
                self.cell[2] as usize,
            ),
            entry_t: self.t,
            exit_t: exit,
        };

        if exit >= self.t_end {
            self.remaining = 0;
        } else {
            self.cell[axis] += self.step[axis];
            self.t = exit;
            if !self.lattice.contains_signed(self.cell) {
                self.remaining = 0;
            }
        }
        Some(item)
    }
}

/// All cells the ray pierces inside the world, in increasing `t`.
pub fn grid_march(ray: &Ray, grid: &WorldGrid) -> Vec<MarchStep> {
    GridMarch::new(ray, grid.lattice()).collect()
}

/// First object voxel met by a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub coord: GridCoord,
    pub object: ObjectId,
    pub characteristic: Characteristic,
    pub entry_t: f64,
    /// Index `k` of the cell in the march sequence.
    pub step_index: usize,
}

/// First occupied cell along `ray`, ignoring `skip`.
pub fn first_hit(ray: &Ray, grid: &WorldGrid, skip: Option<GridCoord>) -> Option<Hit> {
    first_hit_where(ray, grid, f64::INFINITY, |c, _| Some(c) != skip)
}

/// First occupied cell with `t <= t_max` whose occupant passes `accept`.
pub fn first_hit_where(
    ray: &Ray,
    grid: &WorldGrid,
    t_max: f64,
    mut accept: impl FnMut(GridCoord, &Occupant) -> bool,
) -> Option<Hit> {
    GridMarch::segment(ray, grid.lattice(), t_max)
        .enumerate()
        .find_map(|(k, s)| {
            let occ = grid.voxel(s.coord).occupant?;
            accept(s.coord, &occ).then(|| Hit {
                coord: s.coord,
                object: occ.object,
                characteristic: *grid.occupant_of(&occ),
                entry_t: s.entry_t,
                step_index: k,
            })
        })
}

/// First occupied cell after the ray has left the run of occupied cells it starts in.
///
/// Secondary rays leaving a voxel surface use this so that the voxel staircase they start on
/// does not capture them.
pub fn first_hit_after_exit(ray: &Ray, grid: &WorldGrid) -> Option<Hit> {
    let mut leaving = true;
    GridMarch::new(ray, grid.lattice())
        .enumerate()
        .find_map(|(k, s)| {
            let Some(occ) = grid.voxel(s.coord).occupant else {
                leaving = false;
                return None;
            };
            (!leaving).then(|| Hit {
                coord: s.coord,
                object: occ.object,
                characteristic: *grid.occupant_of(&occ),
                entry_t: s.entry_t,
                step_index: k,
            })
        })
}

/// Beer-Lambert transmittance of the medium between `t0` and `t1` along the ray.
pub fn transmittance(ray: &Ray, grid: &WorldGrid, t0: f64, t1: f64) -> f64 {
    (-optical_depth(ray, grid, t0, t1)).exp()
}

/// Integral of absorption over `[t0, t1]`; the medium outside the world is empty.
pub fn optical_depth(ray: &Ray, grid: &WorldGrid, t0: f64, t1: f64) -> f64 {
    if t1 <= t0 || t1.is_nan() || t0.is_nan() {
        return 0.0;
    }
    GridMarch::segment(ray, grid.lattice(), t1)
        .map(|s| {
            let overlap = s.exit_t.min(t1) - s.entry_t.max(t0);
            if overlap > 0.0 {
                grid.absorption(s.coord) * overlap
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::Characteristic;

    fn row_grid(n: usize) -> WorldGrid {
        WorldGrid::new([n, 1, 1], 1.0, Vec3::ZERO).unwrap()
    }

    #[test]
    fn axis_aligned_march() {
        let g = row_grid(4);
        let ray = Ray::new(Vec3::new(-0.5, 0.5, 0.5), Vec3::X).unwrap();
        let steps = grid_march(&ray, &g);
        let coords: Vec<_> = steps.iter().map(|s| s.coord.l).collect();
        let entries: Vec<_> = steps.iter().map(|s| s.entry_t).collect();
        assert_eq!(coords, vec![0, 1, 2, 3]);
        assert_eq!(entries, vec![0.5, 1.5, 2.5, 3.5]);
        assert_eq!(steps.last().unwrap().exit_t, 4.5);
    }

    #[test]
    fn ray_pointing_away_is_empty() {
        let g = WorldGrid::new([4, 4, 4], 1.0, Vec3::ZERO).unwrap();
        let ray = Ray::new(Vec3::new(-1.0, 2.0, 2.0), -Vec3::X).unwrap();
        assert!(grid_march(&ray, &g).is_empty());
        let ray = Ray::new(Vec3::new(4.0, 2.0, 2.0), Vec3::Y).unwrap();
        assert!(grid_march(&ray, &g).is_empty(), "max face is outside");
    }

    #[test]
    fn negative_direction_from_boundary_starts_below() {
        let g = row_grid(4);
        let ray = Ray::new(Vec3::new(2.0, 0.5, 0.5), -Vec3::X).unwrap();
        let coords: Vec<_> = grid_march(&ray, &g).iter().map(|s| s.coord.l).collect();
        assert_eq!(coords, vec![1, 0]);
    }

    #[test]
    fn diagonal_tie_steps_x_first() {
        let g = WorldGrid::new([3, 3, 1], 1.0, Vec3::ZERO).unwrap();
        let ray = Ray::new(Vec3::new(0.5, 0.5, 0.5), Vec3::new(1.0, 1.0, 0.0)).unwrap();
        let coords: Vec<_> = grid_march(&ray, &g)
            .iter()
            .map(|s| (s.coord.l, s.coord.m))
            .collect();
        assert_eq!(
            coords,
            vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)],
            "corner crossings never step diagonally"
        );
    }

    #[test]
    fn first_hit_examples() {
        let mut g = row_grid(8);
        let ray = Ray::new(Vec3::new(0.5, 0.5, 0.5), Vec3::X).unwrap();
        assert!(first_hit(&ray, &g, None).is_none());

        let m = Characteristic::default();
        g.set_occupant(GridCoord::new(5, 0, 0), ObjectId(1), &m);
        let hit = first_hit(&ray, &g, None).unwrap();
        assert_eq!(hit.coord, GridCoord::new(5, 0, 0));
        assert_eq!(hit.step_index, 5);
        assert_eq!(hit.entry_t, 4.5);

        g.set_occupant(GridCoord::new(3, 0, 0), ObjectId(2), &m);
        assert_eq!(first_hit(&ray, &g, None).unwrap().coord.l, 3);
        assert_eq!(
            first_hit(&ray, &g, Some(GridCoord::new(3, 0, 0)))
                .unwrap()
                .coord
                .l,
            5
        );

        g.set_occupant(GridCoord::new(0, 0, 0), ObjectId(2), &m);
        g.set_occupant(GridCoord::new(1, 0, 0), ObjectId(2), &m);
        assert_eq!(first_hit_after_exit(&ray, &g).unwrap().coord.l, 3);
    }

    #[test]
    fn transmittance_closed_forms() {
        let g = row_grid(8);
        let ray = Ray::new(Vec3::new(0.5, 0.5, 0.5), Vec3::X).unwrap();
        assert_eq!(transmittance(&ray, &g, 0.0, 5.0), 1.0);

        let g = row_grid(8).with_absorption(0.5).unwrap();
        let t = transmittance(&ray, &g, 1.25, 3.25);
        assert!((t - (-1.0f64).exp()).abs() < 1e-6);
        assert!((t - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn zero_direction_rejected() {
        assert!(Ray::new(Vec3::ZERO, Vec3::ZERO).is_err());
    }
}
