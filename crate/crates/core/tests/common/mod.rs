//! Brute-force reference computations shared by the integration targets. None of these use the
//! engine's grid traversal.

#![allow(dead_code)]

use voxelworld::material::{Characteristic, Light};
use voxelworld::math::{Rgb, Vec3};
use voxelworld::traversal::Ray;
use voxelworld::voxelizer::{place_object, voxelize, Primitive};
use voxelworld::{GridCoord, ObjectId, WorldGrid};

/// Parameter interval of `o + t d` inside the box `[lo, hi]`, restricted to `t >= 0`.
pub fn clip_to_box(o: Vec3, d: Vec3, lo: Vec3, hi: Vec3) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for a in 0..3 {
        if d[a] == 0.0 {
            if o[a] < lo[a] || o[a] > hi[a] {
                return None;
            }
            continue;
        }
        let (mut near, mut far) = ((lo[a] - o[a]) / d[a], (hi[a] - o[a]) / d[a]);
        if near > far {
            std::mem::swap(&mut near, &mut far);
        }
        t0 = t0.max(near);
        t1 = t1.min(far);
    }
    (t0 < t1).then_some((t0, t1))
}

fn world_box(w: &WorldGrid) -> (Vec3, Vec3) {
    let o = w.origin();
    let dims = w.dims();
    (
        o,
        o + Vec3::new(dims[0] as f64, dims[1] as f64, dims[2] as f64) * w.cell_size(),
    )
}

fn cell_of(w: &WorldGrid, p: Vec3) -> Option<GridCoord> {
    let q = (p - w.origin()) / w.cell_size();
    let dims = w.dims();
    let idx = [q.x.floor(), q.y.floor(), q.z.floor()];
    (0..3)
        .all(|a| idx[a] >= 0.0 && (idx[a] as usize) < dims[a])
        .then(|| GridCoord::new(idx[0] as usize, idx[1] as usize, idx[2] as usize))
}

/// First occupied cell met by point samples spaced `step` apart along the ray.
pub fn sampled_first_hit(ray: &Ray, w: &WorldGrid, step: f64) -> Option<GridCoord> {
    let (lo, hi) = world_box(w);
    let (t0, t1) = clip_to_box(ray.origin, ray.direction, lo, hi)?;
    let mut k = 0u64;
    loop {
        let t = t0 + (k as f64 + 0.5) * step;
        if t >= t1 {
            return None;
        }
        if let Some(c) = cell_of(w, ray.origin + ray.direction * t) {
            if w.is_occupied(c) {
                return Some(c);
            }
        }
        k += 1;
    }
}

/// Whether the ray crosses some occupied cell, up to the exit of `until` (or the whole world),
/// along a chord shorter than `min_chord`. Chords are the gaps between consecutive lattice-plane
/// crossings inside the world.
pub fn is_grazing(ray: &Ray, w: &WorldGrid, until: Option<GridCoord>, min_chord: f64) -> bool {
    let (lo, hi) = world_box(w);
    let Some((t0, t1)) = clip_to_box(ray.origin, ray.direction, lo, hi) else {
        return false;
    };
    let d = w.cell_size();
    let limit = until.map_or(t1, |c| {
        let cl = w.cell_center(c) - Vec3::splat(0.5 * d);
        clip_to_box(ray.origin, ray.direction, cl, cl + Vec3::splat(d)).map_or(t1, |(_, b)| b)
    });
    let mut ts = vec![t0, limit];
    for a in 0..3 {
        if ray.direction[a] == 0.0 {
            continue;
        }
        for k in 0..=w.dims()[a] {
            let plane = lo[a] + k as f64 * d;
            let t = (plane - ray.origin[a]) / ray.direction[a];
            if t > t0 && t < limit {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.windows(2).any(|p| {
        p[1] - p[0] < min_chord
            && cell_of(w, ray.origin + ray.direction * (0.5 * (p[0] + p[1])))
                .is_some_and(|c| w.is_occupied(c))
    })
}

/// Whether the straight segment from the center of `from` to `light` passes through the interior
/// of any occupied cell other than `from`, by testing every occupied cell's box.
pub fn segment_occluded(
    w: &WorldGrid,
    occupied: &[GridCoord],
    from: GridCoord,
    light: Vec3,
) -> bool {
    let d = w.cell_size();
    let p0 = w.cell_center(from);
    let delta = light - p0;
    let (seg_lo, seg_hi) = (p0.min_elem(light), p0.max_elem(light));
    occupied.iter().any(|&c| {
        if c == from {
            return false;
        }
        let lo = w.cell_center(c) - Vec3::splat(0.5 * d);
        let hi = lo + Vec3::splat(d);
        if (0..3).any(|a| hi[a] < seg_lo[a] || lo[a] > seg_hi[a]) {
            return false;
        }
        clip_to_box(p0, delta, lo, hi).is_some_and(|(a, b)| a < 1.0 && b > a)
    })
}

pub struct SphereOverPlane {
    pub world: WorldGrid,
    pub plane: Vec<GridCoord>,
    pub sphere: Vec<GridCoord>,
    pub light: Light,
}

/// Plane slab two cells thick near the bottom of an `n`-cube world, a sphere above it and one
/// light above the sphere at a position chosen off every lattice symmetry.
pub fn sphere_over_plane(n: usize, radius: f64) -> SphereOverPlane {
    let nf = n as f64;
    let mut world = WorldGrid::new([n; 3], 1.0, Vec3::ZERO).unwrap();
    let floor = Characteristic::matte(Rgb::new(0.8, 0.8, 0.7)).unwrap();
    let ball = Characteristic::matte(Rgb::new(0.9, 0.3, 0.2)).unwrap();
    let plane = voxelize(
        &Primitive::Box {
            min: Vec3::new(2.0, 4.0, 2.0),
            max: Vec3::new(nf - 2.0, 6.0, nf - 2.0),
        },
        1.0,
        floor,
    )
    .unwrap();
    place_object(&mut world, &plane, ObjectId(1));
    let sphere = voxelize(
        &Primitive::Sphere {
            center: Vec3::new(0.5 * nf + 0.31, 6.0 + radius + 6.17, 0.5 * nf - 0.13),
            radius,
        },
        1.0,
        ball,
    )
    .unwrap();
    place_object(&mut world, &sphere, ObjectId(2));
    let light = Light::new(
        Vec3::new(0.5 * nf - 3.137, nf - 4.391, 0.5 * nf + 5.713),
        Rgb::WHITE,
        1.0,
    )
    .unwrap();
    let of = |id: u32| -> Vec<GridCoord> {
        world
            .occupied_coords()
            .filter(|c| world.occupant(*c).unwrap().0 == ObjectId(id))
            .collect()
    };
    let (plane, sphere) = (of(1), of(2));
    SphereOverPlane {
        world,
        plane,
        sphere,
        light,
    }
}
