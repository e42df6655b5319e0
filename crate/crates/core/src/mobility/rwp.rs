//! Random waypoint over a rectangle, constant speed, no pauses.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Arena {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        [
            rng.gen_range(self.min[0]..=self.max[0]),
            rng.gen_range(self.min[1]..=self.max[1]),
        ]
    }

    /// The interior `inner x inner` cells of a `rows x cols` grid.
    pub fn interior(rows: usize, cols: usize, cell_side: f64, inner: usize) -> Self {
        let mr = rows.saturating_sub(inner) as f64 / 2.0;
        let mc = cols.saturating_sub(inner) as f64 / 2.0;
        Arena {
            min: [mc * cell_side, mr * cell_side],
            max: [(cols as f64 - mc) * cell_side, (rows as f64 - mr) * cell_side],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RwpGeometric {
    pub pos: [f64; 2],
    pub waypoint: [f64; 2],
    pub speed: f64,
    pub arena: Arena,
}

impl RwpGeometric {
    pub fn new<R: Rng>(arena: Arena, speed: f64, rng: &mut R) -> Self {
        assert!(speed > 0.0, "speed must be positive");
        let pos = arena.sample(rng);
        let waypoint = arena.sample(rng);
        RwpGeometric {
            pos,
            waypoint,
            speed,
            arena,
        }
    }

    /// Advances by `dt` seconds, drawing fresh waypoints on arrival.
    pub fn step<R: Rng>(&mut self, dt: f64, rng: &mut R) -> [f64; 2] {
        let mut left = self.speed * dt;
        loop {
            let dx = self.waypoint[0] - self.pos[0];
            let dy = self.waypoint[1] - self.pos[1];
            let d = (dx * dx + dy * dy).sqrt();
            if d > left {
                self.pos[0] += dx / d * left;
                self.pos[1] += dy / d * left;
                return self.pos;
            }
            self.pos = self.waypoint;
            left -= d;
            self.waypoint = self.arena.sample(rng);
            if left <= 0.0 {
                return self.pos;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arena() -> Arena {
        Arena {
            min: [0.0, 0.0],
            max: [100.0, 100.0],
        }
    }

    #[test]
    fn moves_at_constant_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut m = RwpGeometric {
            pos: [0.0, 0.0],
            waypoint: [100.0, 0.0],
            speed: 1.0,
            arena: arena(),
        };
        let p = m.step(1.0, &mut rng);
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] == 0.0);
    }

    #[test]
    fn arrival_draws_new_waypoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut m = RwpGeometric {
            pos: [0.0, 0.0],
            waypoint: [3.0, 4.0],
            speed: 5.0,
            arena: arena(),
        };
        let p = m.step(1.0, &mut rng);
        assert_eq!(p, [3.0, 4.0]);
        assert_ne!(m.waypoint, [3.0, 4.0]);
        for _ in 0..1000 {
            let p = m.step(0.7, &mut rng);
            assert!(m.arena.contains(p));
        }
    }

    #[test]
    fn interior_of_six_by_six() {
        let a = Arena::interior(6, 6, 80.0, 4);
        assert_eq!(a.min, [80.0, 80.0]);
        assert_eq!(a.max, [400.0, 400.0]);
    }
}
