mod common;

use voxelworld::math::{Rgb, Vec3};
use voxelworld::shading::{estimate_normal, shade, shadow_factor, ShadeConfig, ShadowMode};
use voxelworld::traversal::{Hit, Ray};
use voxelworld::GridCoord;

/// Ambient plus unshadowed-or-blocked Lambert term, with occlusion from the box-test oracle.
fn reference(
    s: &common::SphereOverPlane,
    occupied: &[GridCoord],
    c: GridCoord,
    normal: Vec3,
    cfg: &ShadeConfig,
) -> Rgb {
    let (_, ch) = s.world.occupant(c).unwrap();
    let to_light = (s.light.position - s.world.cell_center(c))
        .try_normalize()
        .unwrap();
    let cosine = normal.dot(to_light).max(0.0);
    let visible = if common::segment_occluded(&s.world, occupied, c, s.light.position) {
        0.0
    } else {
        1.0
    };
    let direct = s
        .light
        .color
        .modulate(ch.color)
        .scale(s.light.intensity * cosine * visible);
    (cfg.ambient.modulate(ch.color) + direct).clamp01()
}

#[test]
fn sphere_over_plane_matches_reference_at_picked_voxels() {
    let s = common::sphere_over_plane(64, 8.0);
    let occupied: Vec<GridCoord> = s.world.occupied_coords().collect();
    let cfg = ShadeConfig {
        ambient: Rgb::gray(0.1),
        shadow_mode: ShadowMode::Binary,
    };
    let eye = Vec3::new(32.0, 40.0, -10.0);

    let top = *s.sphere.iter().max_by_key(|c| (c.m, c.l, c.n)).unwrap();
    let bottom = *s.sphere.iter().min_by_key(|c| (c.m, c.l, c.n)).unwrap();
    let west = *s.sphere.iter().min_by_key(|c| (c.l, c.m, c.n)).unwrap();
    let east = *s.sphere.iter().max_by_key(|c| (c.l, c.m, c.n)).unwrap();
    let front = *s.sphere.iter().min_by_key(|c| (c.n, c.m, c.l)).unwrap();
    let picked = [
        top,
        bottom,
        west,
        east,
        front,
        GridCoord::new(32, 5, 32),
        GridCoord::new(28, 5, 36),
        GridCoord::new(4, 5, 4),
        GridCoord::new(59, 5, 10),
        GridCoord::new(40, 5, 50),
    ];

    let mut shadowed = 0;
    for c in picked {
        let (object, ch) = s.world.occupant(c).expect("picked voxel is occupied");
        let incoming = Ray::new(eye, s.world.cell_center(c) - eye).unwrap();
        let hit = Hit {
            coord: c,
            object,
            characteristic: *ch,
            entry_t: 0.0,
            step_index: 0,
        };
        let normal = estimate_normal(&s.world, c, incoming.direction);
        let want = reference(&s, &occupied, c, normal, &cfg);
        let got = shade(&s.world, &hit, &incoming, &[s.light], &cfg, 0);
        for (g, w) in [(got.r, want.r), (got.g, want.g), (got.b, want.b)] {
            assert!((g - w).abs() <= 1e-12, "{c:?}: {got:?} vs {want:?}");
        }
        shadowed += (shadow_factor(&s.world, c, &s.light, ShadowMode::Binary) == 0.0) as usize;
    }
    assert!(
        (2..=8).contains(&shadowed),
        "{shadowed} of the picked voxels are shadowed"
    );
}
