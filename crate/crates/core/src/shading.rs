//! Colour of a visible object voxel: ambient term, point lights with shadow rays, and one level
//! of reflected and refracted secondary rays.

use crate::grid::{GridCoord, WorldGrid};
use crate::material::Light;
use crate::math::{Rgb, Vec3};
use crate::traversal::{first_hit_after_exit, first_hit_where, transmittance, GridMarch, Hit, Ray};

/// Secondary rays are traced at most this deep; their hits are shaded flat.
pub const MAX_SECONDARY_DEPTH: u32 = 1;

/// How light sources are attenuated on the way to a voxel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShadowMode {
    /// Visible lights contribute fully.
    #[default]
    Binary,
    /// Visible lights are attenuated by the medium's transmittance.
    Attenuated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadeConfig {
    /// Base illumination standing in for the scene space's own contribution.
    pub ambient: Rgb,
    pub shadow_mode: ShadowMode,
}

impl Default for ShadeConfig {
    fn default() -> Self {
        Self {
            ambient: Rgb::gray(0.1),
            shadow_mode: ShadowMode::Binary,
        }
    }
}

/// Half-width of the occupancy-gradient window.
const NORMAL_RADIUS: i64 = 2;

/// lcm(1..=12): makes every `d / |d|^2` weight an integer, so symmetric sums cancel exactly.
const WEIGHT_SCALE: i64 = 27_720;

/// Outward surface normal at an occupied cell.
///
/// The normal is the negated occupancy gradient over a 5x5x5 window, each neighbour weighted by
/// `d / |d|^2`. Cells outside the grid repeat the nearest in-bounds cell. When the gradient
/// vanishes (isolated voxels, symmetric neighbourhoods) the reverse of `incoming` is used.
pub fn estimate_normal(grid: &WorldGrid, c: GridCoord, incoming: Vec3) -> Vec3 {
    let dims = grid.dims();
    let clamp = |v: i64, a: usize| v.clamp(0, dims[a] as i64 - 1) as usize;
    let mut g = [0i64; 3];
    for dz in -NORMAL_RADIUS..=NORMAL_RADIUS {
        for dy in -NORMAL_RADIUS..=NORMAL_RADIUS {
            for dx in -NORMAL_RADIUS..=NORMAL_RADIUS {
                let d2 = dx * dx + dy * dy + dz * dz;
                if d2 == 0 {
                    continue;
                }
                let n = GridCoord::new(
                    clamp(c.l as i64 + dx, 0),
                    clamp(c.m as i64 + dy, 1),
                    clamp(c.n as i64 + dz, 2),
                );
                if grid.is_occupied(n) {
                    let w = WEIGHT_SCALE / d2;
                    g[0] += w * dx;
                    g[1] += w * dy;
                    g[2] += w * dz;
                }
            }
        }
    }
    if g == [0; 3] {
        return -incoming;
    }
    Vec3::new(-g[0] as f64, -g[1] as f64, -g[2] as f64)
        .try_normalize()
        .unwrap_or(-incoming)
}

/// Fraction of `light` reaching the center of `from`.
///
/// Any occupied cell other than `from` on the segment to the light gives 0. Otherwise the
/// result is 1 in binary mode, or the medium transmittance along the segment in attenuated mode.
pub fn shadow_factor(grid: &WorldGrid, from: GridCoord, light: &Light, mode: ShadowMode) -> f64 {
    let start = grid.cell_center(from);
    let Some((ray, dist)) = Ray::between(start, light.position) else {
        return 1.0;
    };
    let blocked = GridMarch::segment(&ray, grid.lattice(), dist)
        .any(|s| s.coord != from && s.entry_t < dist && grid.is_occupied(s.coord));
    if blocked {
        0.0
    } else {
        match mode {
            ShadowMode::Binary => 1.0,
            ShadowMode::Attenuated => transmittance(&ray, grid, 0.0, dist),
        }
    }
}

/// Unclamped sum of Lambertian contributions of every light at the hit voxel.
pub fn direct_light(
    grid: &WorldGrid,
    hit: &Hit,
    normal: Vec3,
    lights: &[Light],
    mode: ShadowMode,
) -> Rgb {
    let center = grid.cell_center(hit.coord);
    let color = hit.characteristic.color;
    lights.iter().fold(Rgb::BLACK, |acc, light| {
        let Some(to_light) = (light.position - center).try_normalize() else {
            return acc;
        };
        let cosine = normal.dot(to_light).max(0.0);
        if cosine == 0.0 || light.intensity == 0.0 {
            return acc;
        }
        let visible = shadow_factor(grid, hit.coord, light, mode);
        acc + light
            .color
            .modulate(color)
            .scale(visible * light.intensity * cosine)
    })
}

/// `clamp01(base + weight * contribution)` per channel.
pub fn combine(base: Rgb, contribution: Rgb, weight: f64) -> Rgb {
    (base + contribution.scale(weight)).clamp01()
}

/// Mirror reflection of `d` about unit normal `n`.
pub fn reflect(d: Vec3, n: Vec3) -> Vec3 {
    d - n * (2.0 * d.dot(n))
}

/// Refraction of unit direction `d` through a surface with unit normal `n`, from index `n1` into
/// index `n2`. The normal may face either side. `None` on total internal reflection.
pub fn refract(d: Vec3, n: Vec3, n1: f64, n2: f64) -> Option<Vec3> {
    let (n, n1, n2) = if d.dot(n) > 0.0 {
        (-n, n2, n1)
    } else {
        (n, n1, n2)
    };
    let eta = n1 / n2;
    let cos_i = -d.dot(n);
    let sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if sin2_t > 1.0 {
        return None;
    }
    let cos_t = (1.0 - sin2_t).sqrt();
    (d * eta + n * (eta * cos_i - cos_t)).try_normalize()
}

/// Ambient plus direct light at a hit, clamped; no secondary rays.
pub fn shade_flat(
    grid: &WorldGrid,
    hit: &Hit,
    incoming: &Ray,
    lights: &[Light],
    cfg: &ShadeConfig,
) -> Rgb {
    let normal = estimate_normal(grid, hit.coord, incoming.direction);
    flat_with_normal(grid, hit, normal, lights, cfg)
}

fn flat_with_normal(
    grid: &WorldGrid,
    hit: &Hit,
    normal: Vec3,
    lights: &[Light],
    cfg: &ShadeConfig,
) -> Rgb {
    let ambient = cfg.ambient.modulate(hit.characteristic.color);
    (ambient + direct_light(grid, hit, normal, lights, cfg.shadow_mode)).clamp01()
}

/// Final colour of a hit voxel seen along `incoming`.
///
/// At `depth < 1` a reflecting material traces one mirror ray and a refracting one traces one
/// Snell-refracted ray; each secondary hit is shaded flat and blended in with weight `reflect`
/// or `refract`. The reflected ray ignores the occupied cells it starts in; the refracted ray
/// passes through the refracting object itself.
pub fn shade(
    grid: &WorldGrid,
    hit: &Hit,
    incoming: &Ray,
    lights: &[Light],
    cfg: &ShadeConfig,
    depth: u32,
) -> Rgb {
    let normal = estimate_normal(grid, hit.coord, incoming.direction);
    let mut color = flat_with_normal(grid, hit, normal, lights, cfg);
    if depth >= MAX_SECONDARY_DEPTH {
        return color;
    }

    let material = &hit.characteristic;
    let start = grid.cell_center(hit.coord);

    if material.reflect > 0.0 {
        if let Some(dir) = reflect(incoming.direction, normal).try_normalize() {
            let ray = Ray {
                origin: start,
                direction: dir,
            };
            if let Some(h) = first_hit_after_exit(&ray, grid) {
                let c = shade(grid, &h, &ray, lights, cfg, depth + 1);
                color = combine(color, c, material.reflect);
            }
        }
    }

    if material.refract > 0.0 {
        if let Some(dir) = refract(incoming.direction, normal, 1.0, material.refractive_index) {
            let ray = Ray {
                origin: start,
                direction: dir,
            };
            let own = hit.object;
            if let Some(h) = first_hit_where(&ray, grid, f64::INFINITY, |_, o| o.object != own) {
                let c = shade(grid, &h, &ray, lights, cfg, depth + 1);
                color = combine(color, c, material.refract);
            }
        }
    }

    color
}
