//! Voxel models of analytic primitives and their placement into the world grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridCoord, Lattice, ObjectId, WorldGrid};
use crate::material::Characteristic;
use crate::math::{Pose, Vec3};
use crate::traversal::{GridMarch, Ray};

/// Default resource guard: 2^27 cells (a 512^3 model).
pub const DEFAULT_MAX_CELLS: u64 = 1 << 27;

/// Analytic solid, in object coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    Box {
        min: Vec3,
        max: Vec3,
    },
    /// Points within `radius` of a polyline. A zero radius voxelizes the bare curve: every cell
    /// the polyline passes through.
    PolylineTube {
        points: Vec<Vec3>,
        radius: f64,
    },
    /// Square slab of side `extent` and given `thickness`, centred on `point`, facing `normal`.
    PlaneSlab {
        point: Vec3,
        normal: Vec3,
        thickness: f64,
        extent: f64,
    },
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPrimitive(format!(
            "{field} must be > 0, got {v}"
        )))
    }
}

fn finite(field: &str, v: Vec3) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPrimitive(format!("{field} must be finite")))
    }
}

impl Primitive {
    pub fn validate(&self) -> Result<()> {
        match self {
            Primitive::Sphere { center, radius } => {
                finite("center", *center)?;
                positive("radius", *radius)
            }
            Primitive::Box { min, max } => {
                finite("min", *min)?;
                finite("max", *max)?;
                if (0..3).all(|a| min[a] < max[a]) {
                    Ok(())
                } else {
                    Err(Error::InvalidPrimitive(
                        "box min must be below max on every axis".into(),
                    ))
                }
            }
            Primitive::PolylineTube { points, radius } => {
                if points.len() < 2 {
                    return Err(Error::InvalidPrimitive(
                        "polyline needs at least 2 points".into(),
                    ));
                }
                for p in points {
                    finite("points", *p)?;
                }
                if points.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidPrimitive(
                        "consecutive polyline points must be distinct".into(),
                    ));
                }
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidPrimitive(format!(
                        "radius must be >= 0, got {radius}"
                    )));
                }
                Ok(())
            }
            Primitive::PlaneSlab {
                point,
                normal,
                thickness,
                extent,
            } => {
                finite("point", *point)?;
                if normal.try_normalize().is_none() {
                    return Err(Error::InvalidPrimitive("normal must be non-zero".into()));
                }
                positive("thickness", *thickness)?;
                positive("extent", *extent)
            }
        }
    }

    /// Axis-aligned bounds in object coordinates.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        match self {
            Primitive::Sphere { center, radius } => (
                *center - Vec3::splat(*radius),
                *center + Vec3::splat(*radius),
            ),
            Primitive::Box { min, max } => (*min, *max),
            Primitive::PolylineTube { points, radius } => {
                let (lo, hi) = points.iter().fold(
                    (Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY)),
                    |(lo, hi), p| (lo.min_elem(*p), hi.max_elem(*p)),
                );
                (lo - Vec3::splat(*radius), hi + Vec3::splat(*radius))
            }
            Primitive::PlaneSlab {
                point,
                thickness,
                extent,
                ..
            } => {
                let (n, u, v) = self.slab_frame().expect("validated slab");
                let mut lo = Vec3::splat(f64::INFINITY);
                let mut hi = Vec3::splat(f64::NEG_INFINITY);
                for sn in [-0.5, 0.5] {
                    for su in [-0.5, 0.5] {
                        for sv in [-0.5, 0.5] {
                            let c = *point
                                + n * (sn * thickness)
                                + u * (su * extent)
                                + v * (sv * extent);
                            lo = lo.min_elem(c);
                            hi = hi.max_elem(c);
                        }
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Orthonormal frame `(normal, u, v)` of a slab; `u` and `v` span the slab's square.
    fn slab_frame(&self) -> Option<(Vec3, Vec3, Vec3)> {
        let Primitive::PlaneSlab { normal, .. } = self else {
            return None;
        };
        let n = normal.try_normalize()?;
        let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
            Vec3::X
        } else if n.y.abs() <= n.z.abs() {
            Vec3::Y
        } else {
            Vec3::Z
        };
        let u = n.cross(axis).try_normalize()?;
        let v = n.cross(u);
        Some((n, u, v))
    }

    /// Point membership used by the center-sample rule.
    pub fn contains(&self, p: Vec3) -> bool {
        match self {
            Primitive::Sphere { center, radius } => (p - *center).length() < *radius,
            Primitive::Box { min, max } => (0..3).all(|a| p[a] >= min[a] && p[a] < max[a]),
            Primitive::PolylineTube { points, radius } => points
                .windows(2)
                .any(|w| segment_distance(p, w[0], w[1]) <= *radius),
            Primitive::PlaneSlab {
                point,
                thickness,
                extent,
                ..
            } => {
                let (n, u, v) = self.slab_frame().expect("validated slab");
                let d = p - *point;
                let half_t = 0.5 * thickness;
                let half_e = 0.5 * extent;
                let (sn, su, sv) = (d.dot(n), d.dot(u), d.dot(v));
                (-half_t..half_t).contains(&sn)
                    && (-half_e..half_e).contains(&su)
                    && (-half_e..half_e).contains(&sv)
            }
        }
    }
}

fn segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    (p - (a + ab * t)).length()
}

/// Material of an object: one characteristic for all voxels or one per voxel.
#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Uniform(Characteristic),
    PerVoxel(Vec<Characteristic>),
}

/// Voxel model of one object in its own coordinate system, plus its pose in the world.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectModel {
    /// Object lattice, expressed in object coordinates.
    pub lattice: Lattice,
    pub occupancy: Vec<bool>,
    pub material: Material,
    pub pose: Pose,
}

impl ObjectModel {
    pub fn new(lattice: Lattice, occupancy: Vec<bool>, material: Material) -> Result<Self> {
        let n = lattice.cell_count();
        if occupancy.len() != n {
            return Err(Error::range(
                "occupancy",
                format!("length {} does not match {n} cells", occupancy.len()),
            ));
        }
        match &material {
            Material::Uniform(c) => c.validate()?,
            Material::PerVoxel(v) => {
                if v.len() != n {
                    return Err(Error::range(
                        "material",
                        format!("{} per-voxel entries for {n} cells", v.len()),
                    ));
                }
                v.iter().try_for_each(Characteristic::validate)?;
            }
        }
        Ok(Self {
            lattice,
            occupancy,
            material,
            pose: Pose::IDENTITY,
        })
    }

    pub fn with_pose(mut self, pose: Pose) -> Self {
        self.pose = pose;
        self
    }

    pub fn is_occupied(&self, c: GridCoord) -> bool {
        self.occupancy[self.lattice.index(c)]
    }

    pub fn material_at(&self, c: GridCoord) -> &Characteristic {
        match &self.material {
            Material::Uniform(m) => m,
            Material::PerVoxel(v) => &v[self.lattice.index(c)],
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    pub fn occupied_coords(&self) -> impl Iterator<Item = GridCoord> + '_ {
        self.occupancy
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| self.lattice.coord(i))
    }

    /// World-space axis-aligned bounds of the posed object lattice.
    pub fn world_bounds(&self) -> (Vec3, Vec3) {
        let lo = self.lattice.min_corner();
        let hi = self.lattice.max_corner();
        let mut wlo = Vec3::splat(f64::INFINITY);
        let mut whi = Vec3::splat(f64::NEG_INFINITY);
        for i in 0..8 {
            let corner = Vec3::new(
                if i & 1 == 0 { lo.x } else { hi.x },
                if i & 2 == 0 { lo.y } else { hi.y },
                if i & 4 == 0 { lo.z } else { hi.z },
            );
            let w = self.pose.to_world(corner);
            wlo = wlo.min_elem(w);
            whi = whi.max_elem(w);
        }
        (wlo, whi)
    }
}

/// Builds object models from primitives, refusing models above a cell budget.
#[derive(Debug, Clone, Copy)]
pub struct Voxelizer {
    pub max_cells: u64,
}

impl Default for Voxelizer {
    fn default() -> Self {
        Self {
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

impl Voxelizer {
    pub fn voxelize(
        &self,
        prim: &Primitive,
        cell_size: f64,
        material: Characteristic,
    ) -> Result<ObjectModel> {
        let lattice = self.lattice_for(prim, cell_size)?;
        material.validate()?;
        let mut occupancy = vec![false; lattice.cell_count()];

        match prim {
            Primitive::PolylineTube { points, radius } if *radius == 0.0 => {
                for w in points.windows(2) {
                    let (ray, len) = Ray::between(w[0], w[1]).expect("distinct points");
                    for s in GridMarch::segment(&ray, &lattice, len) {
                        occupancy[lattice.index(s.coord)] = true;
                    }
                }
            }
            _ => {
                for (i, occ) in occupancy.iter_mut().enumerate() {
                    *occ = prim.contains(lattice.cell_center(lattice.coord(i)));
                }
            }
        }

        ObjectModel::new(lattice, occupancy, Material::Uniform(material))
    }

    /// Lattice aligned to multiples of `cell_size` covering the primitive's bounds plus one cell
    /// of padding on every side.
    fn lattice_for(&self, prim: &Primitive, cell_size: f64) -> Result<Lattice> {
        prim.validate()?;
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::range("cell_size", format!("{cell_size} is not > 0")));
        }
        let (lo, hi) = prim.bounds();
        let mut first = [0i64; 3];
        let mut dims = [0usize; 3];
        let mut requested: u128 = 1;
        for a in 0..3 {
            let start = (lo[a] / cell_size).floor() - 1.0;
            let end = (hi[a] / cell_size).ceil() + 1.0;
            let n = end - start;
            if !(n.is_finite() && n < 1e15) {
                return Err(Error::TooManyVoxels {
                    requested: u128::MAX,
                    cap: self.max_cells,
                });
            }
            first[a] = start as i64;
            dims[a] = n as usize;
            requested = requested.saturating_mul(n as u128);
        }
        if requested > self.max_cells as u128 {
            return Err(Error::TooManyVoxels {
                requested,
                cap: self.max_cells,
            });
        }
        let origin = Vec3::new(first[0] as f64, first[1] as f64, first[2] as f64) * cell_size;
        Lattice::new(dims, cell_size, origin)
    }
}

/// Voxelizes with the default cell budget.
pub fn voxelize(prim: &Primitive, cell_size: f64, material: Characteristic) -> Result<ObjectModel> {
    Voxelizer::default().voxelize(prim, cell_size, material)
}

/// Writes `obj` into the world as occupant `id`, returning the number of scene cells written.
///
/// Every scene cell whose center maps (through the inverse pose) into an occupied object voxel
/// takes that voxel's material; earlier occupants are overwritten. Parts outside the world are
/// clipped.
pub fn place_object(grid: &mut WorldGrid, obj: &ObjectModel, id: ObjectId) -> usize {
    let (lo, hi) = obj.world_bounds();
    let Some((min, max)) = grid.lattice().cell_range(lo, hi) else {
        return 0;
    };
    let rotation_inv = obj.pose.rotation().transpose();
    let mut written = 0;
    for n in min[2]..=max[2] {
        for m in min[1]..=max[1] {
            for l in min[0]..=max[0] {
                let c = GridCoord::new(l, m, n);
                let local = rotation_inv.mul_vec(grid.cell_center(c) - obj.pose.position);
                let Some(oc) = obj.lattice.locate(local) else {
                    continue;
                };
                if obj.is_occupied(oc) {
                    let material = *obj.material_at(oc);
                    grid.set_occupant(c, id, &material);
                    written += 1;
                }
            }
        }
    }
    written
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rgb;
    use proptest::prelude::*;
    use std::collections::BTreeSet;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn white() -> Characteristic {
        Characteristic::default()
    }

    /// Independent count of lattice-center points strictly inside a sphere.
    fn brute_sphere_count(center: Vec3, r: f64, d: f64) -> usize {
        let reach = (r / d).ceil() as i64 + 2;
        let base = [
            (center.x / d).floor() as i64,
            (center.y / d).floor() as i64,
            (center.z / d).floor() as i64,
        ];
        let mut count = 0;
        for i in -reach..=reach {
            for j in -reach..=reach {
                for k in -reach..=reach {
                    let p = Vec3::new(
                        (base[0] + i) as f64 + 0.5,
                        (base[1] + j) as f64 + 0.5,
                        (base[2] + k) as f64 + 0.5,
                    ) * d;
                    let q = p - center;
                    if q.x * q.x + q.y * q.y + q.z * q.z < r * r {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn tiny_sphere_on_voxel_center_is_one_voxel() {
        let d = 0.25;
        let prim = Primitive::Sphere {
            center: Vec3::splat(2.5 * d),
            radius: 0.4 * d,
        };
        let obj = voxelize(&prim, d, white()).unwrap();
        assert_eq!(obj.occupied_count(), 1);
        assert_eq!(obj.pose, Pose::IDENTITY);
    }

    #[test]
    fn lattice_aligned_box_counts_cells() {
        let prim = Primitive::Box {
            min: Vec3::ZERO,
            max: Vec3::new(2.0, 3.0, 4.0),
        };
        let obj = voxelize(&prim, 1.0, white()).unwrap();
        assert_eq!(obj.occupied_count(), 24);
        assert_eq!(obj.lattice.dims, [4, 5, 6], "tight bounds padded by one");
    }

    #[test]
    fn sphere_r8_matches_oracle_and_volume() {
        for center in [Vec3::ZERO, Vec3::splat(0.5), Vec3::new(0.3, 0.7, 0.1)] {
            let prim = Primitive::Sphere {
                center,
                radius: 8.0,
            };
            let count = voxelize(&prim, 1.0, white()).unwrap().occupied_count();
            assert_eq!(count, brute_sphere_count(center, 8.0, 1.0));
            let vol = 4.0 / 3.0 * PI * 512.0;
            assert!((count as f64 - vol).abs() <= 0.05 * vol, "{count} vs {vol}");
        }
    }

    #[test]
    fn rejects_invalid_primitives() {
        let bad = [
            Primitive::Sphere {
                center: Vec3::ZERO,
                radius: 0.0,
            },
            Primitive::Box {
                min: Vec3::ZERO,
                max: Vec3::new(1.0, 0.0, 1.0),
            },
            Primitive::PolylineTube {
                points: vec![Vec3::ZERO],
                radius: 1.0,
            },
            Primitive::PolylineTube {
                points: vec![Vec3::ZERO, Vec3::ZERO],
                radius: 1.0,
            },
            Primitive::PlaneSlab {
                point: Vec3::ZERO,
                normal: Vec3::ZERO,
                thickness: 1.0,
                extent: 1.0,
            },
        ];
        for p in bad {
            assert!(voxelize(&p, 1.0, white()).is_err(), "{p:?}");
        }
    }

    #[test]
    fn cell_cap_is_enforced() {
        let prim = Primitive::Sphere {
            center: Vec3::ZERO,
            radius: 100.0,
        };
        let v = Voxelizer { max_cells: 1000 };
        assert!(matches!(
            v.voxelize(&prim, 1.0, white()),
            Err(Error::TooManyVoxels { .. })
        ));
    }

    #[test]
    fn zero_radius_tube_is_connected_curve() {
        let prim = Primitive::PolylineTube {
            points: vec![
                Vec3::new(0.5, 0.5, 0.5),
                Vec3::new(7.3, 3.1, 0.5),
                Vec3::new(7.3, 3.1, 5.9),
            ],
            radius: 0.0,
        };
        let obj = voxelize(&prim, 1.0, white()).unwrap();
        let cells: BTreeSet<_> = obj.occupied_coords().collect();
        // 6-connected: every cell has an occupied face neighbour.
        for c in &cells {
            let neighbours = [
                [1, 0, 0],
                [-1, 0, 0],
                [0, 1, 0],
                [0, -1, 0],
                [0, 0, 1],
                [0, 0, -1],
            ];
            assert!(neighbours
                .iter()
                .filter_map(|d| c.offset(*d))
                .any(|n| cells.contains(&n)));
        }
        let start = obj.lattice.locate(Vec3::new(0.5, 0.5, 0.5)).unwrap();
        let end = obj.lattice.locate(Vec3::new(7.3, 3.1, 5.9)).unwrap();
        assert!(cells.contains(&start) && cells.contains(&end));
    }

    #[test]
    fn thick_tube_and_slab() {
        let tube = Primitive::PolylineTube {
            points: vec![Vec3::new(0.5, 0.5, 0.5), Vec3::new(10.5, 0.5, 0.5)],
            radius: 0.6,
        };
        // Centers within 0.6 of the x-axis line through (.,0.5,0.5): only the line itself.
        assert_eq!(voxelize(&tube, 1.0, white()).unwrap().occupied_count(), 11);

        let slab = Primitive::PlaneSlab {
            point: Vec3::new(0.0, 0.5, 0.0),
            normal: Vec3::Y,
            thickness: 1.0,
            extent: 8.0,
        };
        assert_eq!(voxelize(&slab, 1.0, white()).unwrap().occupied_count(), 64);
    }

    fn grid(n: usize) -> WorldGrid {
        WorldGrid::new([n, n, n], 1.0, Vec3::ZERO).unwrap()
    }

    fn occupant_set(g: &WorldGrid) -> BTreeSet<GridCoord> {
        g.occupied_coords().collect()
    }

    #[test]
    fn identity_placement_copies_occupancy() {
        let prim = Primitive::Sphere {
            center: Vec3::splat(6.0),
            radius: 3.0,
        };
        let obj = voxelize(&prim, 1.0, white()).unwrap();
        let mut g = grid(16);
        let n = place_object(&mut g, &obj, ObjectId(1));
        assert_eq!(n, obj.occupied_count());
        let expected: BTreeSet<_> = obj
            .occupied_coords()
            .map(|c| g.world_to_grid(obj.lattice.cell_center(c)).unwrap())
            .collect();
        assert_eq!(occupant_set(&g), expected);
    }

    #[test]
    fn translation_shifts_occupants() {
        let prim = Primitive::Box {
            min: Vec3::ZERO,
            max: Vec3::new(2.0, 2.0, 1.0),
        };
        let obj = voxelize(&prim, 1.0, white()).unwrap();
        let mut a = grid(16);
        place_object(&mut a, &obj, ObjectId(1));
        let mut b = grid(16);
        place_object(
            &mut b,
            &obj.clone()
                .with_pose(Pose::translation(Vec3::new(10.0, 0.0, 0.0))),
            ObjectId(1),
        );
        let shifted: BTreeSet<_> = occupant_set(&a)
            .into_iter()
            .map(|c| GridCoord::new(c.l + 10, c.m, c.n))
            .collect();
        assert_eq!(occupant_set(&b), shifted);
    }

    #[test]
    fn rotated_l_shape_matches_forward_oracle() {
        let lattice = Lattice::new([2, 2, 1], 1.0, Vec3::ZERO).unwrap();
        let mut occ = vec![false; 4];
        for c in [[0, 0, 0], [1, 0, 0], [0, 1, 0]] {
            occ[lattice.index(c.into())] = true;
        }
        let pose = Pose::new(Vec3::new(4.0, 4.0, 0.0), FRAC_PI_2, 0.0, 0.0);
        let obj = ObjectModel::new(lattice, occ, Material::Uniform(white()))
            .unwrap()
            .with_pose(pose);

        // Oracle: push each object voxel center forward and floor it.
        let expected: BTreeSet<_> = obj
            .occupied_coords()
            .map(|c| {
                let w = pose.to_world(lattice.cell_center(c));
                GridCoord::new(
                    w.x.floor() as usize,
                    w.y.floor() as usize,
                    w.z.floor() as usize,
                )
            })
            .collect();
        assert_eq!(
            expected,
            [[3, 4, 0], [3, 5, 0], [2, 4, 0]]
                .into_iter()
                .map(GridCoord::from)
                .collect()
        );

        let mut g = grid(8);
        place_object(&mut g, &obj, ObjectId(7));
        assert_eq!(occupant_set(&g), expected);

        // Placed at the grid origin, the quarter turn sends every voxel to negative x.
        let mut g = grid(8);
        let at_origin = obj.with_pose(Pose::new(Vec3::ZERO, FRAC_PI_2, 0.0, 0.0));
        assert_eq!(place_object(&mut g, &at_origin, ObjectId(7)), 0);
    }

    #[test]
    fn per_voxel_material_is_resampled() {
        let lattice = Lattice::new([2, 1, 1], 1.0, Vec3::ZERO).unwrap();
        let red = Characteristic::matte(Rgb::new(1.0, 0.0, 0.0)).unwrap();
        let blue = Characteristic::matte(Rgb::new(0.0, 0.0, 1.0)).unwrap();
        let obj = ObjectModel::new(
            lattice,
            vec![true, true],
            Material::PerVoxel(vec![red, blue]),
        )
        .unwrap();
        let mut g = grid(4);
        place_object(&mut g, &obj, ObjectId(1));
        assert_eq!(g.occupant(GridCoord::new(0, 0, 0)).unwrap().1, &red);
        assert_eq!(g.occupant(GridCoord::new(1, 0, 0)).unwrap().1, &blue);
    }

    #[test]
    fn overlapping_objects_last_writer_wins() {
        let a = voxelize(
            &Primitive::Box {
                min: Vec3::ZERO,
                max: Vec3::splat(3.0),
            },
            1.0,
            white(),
        )
        .unwrap();
        let b = voxelize(
            &Primitive::Box {
                min: Vec3::splat(2.0),
                max: Vec3::splat(4.0),
            },
            1.0,
            white(),
        )
        .unwrap();
        let mut g = grid(8);
        place_object(&mut g, &a, ObjectId(1));
        place_object(&mut g, &b, ObjectId(2));
        assert_eq!(g.occupant(GridCoord::new(2, 2, 2)).unwrap().0, ObjectId(2));
        assert_eq!(g.occupant(GridCoord::new(1, 1, 1)).unwrap().0, ObjectId(1));
    }

    fn random_object(seed: &[bool], dims: [usize; 3]) -> ObjectModel {
        let lattice = Lattice::new(dims, 1.0, Vec3::ZERO).unwrap();
        let occ: Vec<bool> = (0..lattice.cell_count())
            .map(|i| seed[i % seed.len()])
            .collect();
        ObjectModel::new(lattice, occ, Material::Uniform(white())).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lattice_preserving_motion_conserves_count(
            seed in proptest::collection::vec(any::<bool>(), 1..40),
            dims in (1usize..5, 1usize..5, 1usize..5),
            quarter in (0i32..4, 0i32..4, 0i32..4),
            shift in (-4i32..12, -4i32..12, -4i32..12),
        ) {
            let dims = [dims.0, dims.1, dims.2];
            let obj = random_object(&seed, dims);
            let pose = Pose::new(
                Vec3::new(shift.0 as f64, shift.1 as f64, shift.2 as f64),
                quarter.0 as f64 * FRAC_PI_2,
                quarter.1 as f64 * FRAC_PI_2,
                quarter.2 as f64 * FRAC_PI_2,
            );
            let obj = obj.with_pose(pose);
            let mut g = grid(8);
            let placed = place_object(&mut g, &obj, ObjectId(1));

            let mut inside = 0;
            for c in obj.occupied_coords() {
                let w = pose.to_world(obj.lattice.cell_center(c));
                if g.world_to_grid(w).is_some() {
                    inside += 1;
                }
            }
            prop_assert_eq!(placed, inside);
            prop_assert_eq!(g.occupied_count(), inside);
        }

        #[test]
        fn placement_is_idempotent(
            yaw in -PI..PI, pitch in -PI..PI, roll in -PI..PI,
            pos in (2.0f64..10.0, 2.0f64..10.0, 2.0f64..10.0),
        ) {
            let obj = voxelize(
                &Primitive::Box { min: Vec3::ZERO, max: Vec3::new(3.0, 2.0, 1.5) },
                0.7,
                white(),
            ).unwrap().with_pose(Pose::new(Vec3::new(pos.0, pos.1, pos.2), yaw, pitch, roll));
            let mut g = grid(14);
            place_object(&mut g, &obj, ObjectId(3));
            let once = g.clone();
            place_object(&mut g, &obj, ObjectId(3));
            prop_assert_eq!(once, g);
        }

        #[test]
        fn shrinking_sphere_never_adds_voxels(
            c in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
            r in 0.5f64..6.0,
            shrink in 0.0f64..1.0,
        ) {
            let center = Vec3::new(c.0, c.1, c.2);
            let big = voxelize(&Primitive::Sphere { center, radius: r }, 1.0, white()).unwrap();
            let small = voxelize(
                &Primitive::Sphere { center, radius: r * shrink.max(0.01) },
                1.0,
                white(),
            ).unwrap();
            let big_set: BTreeSet<_> = big
                .occupied_coords()
                .map(|c| big.lattice.cell_center(c).to_array().map(|v| (v * 2.0).round() as i64))
                .collect();
            for cell in small.occupied_coords() {
                let key = small.lattice.cell_center(cell).to_array().map(|v| (v * 2.0).round() as i64);
                prop_assert!(big_set.contains(&key));
            }
        }
    }
}
