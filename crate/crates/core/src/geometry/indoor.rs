use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Combine, Primitive, Scene, Side, Vec2};

/// Sampling ranges for procedural rooms. Every `(lo, hi)` pair is sampled
/// uniformly. The defaults target the `[-5, 5]^2` Dubins domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndoorConfig {
    /// Room centre jitter around the origin, per axis.
    pub center_jitter: f64,
    /// Half-extent of the wall centreline rectangle, per axis.
    pub half_extent: (f64, f64),
    pub wall_thickness: f64,
    /// Number of door gaps (inclusive range), each on a distinct wall.
    pub doors: (usize, usize),
    pub door_width: (f64, f64),
    /// Door centre position along its wall, as a fraction of the half-length.
    pub door_offset: f64,
    /// Number of interior obstacles (inclusive range).
    pub obstacles: (usize, usize),
    /// Disc radius, box half-extents and ellipse semi-axes.
    pub obstacle_size: (f64, f64),
    /// Free space kept between interior obstacles and the inner wall face.
    pub wall_clearance: f64,
}

impl Default for IndoorConfig {
    fn default() -> Self {
        Self {
            center_jitter: 0.3,
            half_extent: (3.0, 4.0),
            wall_thickness: 0.3,
            doors: (1, 2),
            door_width: (1.0, 1.6),
            door_offset: 0.6,
            obstacles: (1, 3),
            obstacle_size: (0.3, 0.8),
            wall_clearance: 0.6,
        }
    }
}

pub fn gen_indoor_scene(rng_seed: u64) -> Scene {
    gen_indoor_scene_with(rng_seed, &IndoorConfig::default())
}

/// Rectangular room with door gaps carved from its walls and a few interior
/// boxes, discs and ellipses.
pub fn gen_indoor_scene_with(rng_seed: u64, cfg: &IndoorConfig) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let center = Vec2::new(
        rng.gen_range(-cfg.center_jitter..=cfg.center_jitter),
        rng.gen_range(-cfg.center_jitter..=cfg.center_jitter),
    );
    let half = Vec2::new(
        rng.gen_range(cfg.half_extent.0..=cfg.half_extent.1),
        rng.gen_range(cfg.half_extent.0..=cfg.half_extent.1),
    );
    let t = cfg.wall_thickness;
    let mut scene = Scene::single(Primitive::RoomWalls { center, half_extents: half, thickness: t })
        .expect("room parameters are positive");

    let mut sides = [Side::Left, Side::Right, Side::Bottom, Side::Top];
    sides.shuffle(&mut rng);
    let n_doors = rng.gen_range(cfg.doors.0..=cfg.doors.1);
    for &side in &sides[..n_doors] {
        let width = rng.gen_range(cfg.door_width.0..=cfg.door_width.1);
        let along = rng.gen_range(-cfg.door_offset..=cfg.door_offset);
        let (c, half_extents) = match side {
            Side::Left | Side::Right => {
                let x = if side == Side::Left { -half.x } else { half.x };
                (Vec2::new(x, along * half.y), Vec2::new(t, 0.5 * width))
            }
            Side::Bottom | Side::Top => {
                let y = if side == Side::Bottom { -half.y } else { half.y };
                (Vec2::new(along * half.x, y), Vec2::new(0.5 * width, t))
            }
        };
        scene
            .push(Combine::Subtract, Primitive::Box { center: center + c, half_extents, rotation: 0.0 })
            .expect("door parameters are positive");
    }

    let n_obstacles = rng.gen_range(cfg.obstacles.0..=cfg.obstacles.1);
    let (smin, smax) = cfg.obstacle_size;
    // an obstacle of size <= smax * sqrt(2) around its centre stays clear of the walls
    let margin = 0.5 * t + cfg.wall_clearance + smax * std::f64::consts::SQRT_2;
    for _ in 0..n_obstacles {
        let c = center
            + Vec2::new(
                rng.gen_range(-(half.x - margin)..=(half.x - margin)),
                rng.gen_range(-(half.y - margin)..=(half.y - margin)),
            );
        let rotation = rng.gen_range(0.0..std::f64::consts::PI);
        let prim = match rng.gen_range(0..3) {
            0 => Primitive::Box {
                center: c,
                half_extents: Vec2::new(rng.gen_range(smin..=smax), rng.gen_range(smin..=smax)),
                rotation,
            },
            1 => Primitive::Disc { center: c, radius: rng.gen_range(smin..=smax) },
            _ => Primitive::Ellipse {
                center: c,
                semi_axes: Vec2::new(rng.gen_range(smin..=smax), rng.gen_range(smin..=smax)),
                rotation,
            },
        };
        scene.push(Combine::Union, prim).expect("obstacle parameters are positive");
    }
    scene.with_seed(rng_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room(scene: &Scene) -> (Vec2, Vec2, f64) {
        match scene.primitives()[0].primitive {
            Primitive::RoomWalls { center, half_extents, thickness } => (center, half_extents, thickness),
            _ => panic!("first primitive is the room"),
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_indoor_scene(17), gen_indoor_scene(17));
        assert_ne!(gen_indoor_scene(17), gen_indoor_scene(18));
    }

    #[test]
    fn doors_are_passable_and_walls_solid() {
        for seed in 0..200 {
            let scene = gen_indoor_scene(seed);
            let (center, half, _) = room(&scene);
            let doors: Vec<(Vec2, Vec2)> = scene
                .primitives()
                .iter()
                .filter(|p| p.combine == Combine::Subtract)
                .map(|p| match p.primitive {
                    Primitive::Box { center, half_extents, .. } => (center, half_extents),
                    _ => unreachable!(),
                })
                .collect();
            assert!((1..=2).contains(&doors.len()));
            for &(c, _) in &doors {
                assert!(scene.sdf(c) > 0.0, "seed {seed}: door centre blocked");
            }
            // midpoint of a wall that carries no door
            let candidates = [
                Vec2::new(center.x - half.x, center.y),
                Vec2::new(center.x + half.x, center.y),
                Vec2::new(center.x, center.y - half.y),
                Vec2::new(center.x, center.y + half.y),
            ];
            for p in candidates {
                let in_door =
                    doors.iter().any(|&(c, h)| (p.x - c.x).abs() <= h.x + 0.3 && (p.y - c.y).abs() <= h.y + 0.3);
                if !in_door {
                    assert!(scene.sdf(p) < 0.0, "seed {seed}: wall midpoint free");
                }
            }
        }
    }

    #[test]
    fn interior_obstacles_within_room() {
        for seed in 0..100 {
            let scene = gen_indoor_scene(seed);
            let n = scene.primitives().iter().filter(|p| p.combine == Combine::Union).count() - 1;
            assert!((1..=3).contains(&n));
        }
    }
}
