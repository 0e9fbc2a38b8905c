//! Seeded sampling of generic points in the fundamental cell.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Lattice, C64};

/// Points closer than `EXCLUSION · shortest` to the lattice are rejected.
pub const EXCLUSION: f64 = 0.1;

pub struct Sampler {
    rng: ChaCha8Rng,
    lattice: Lattice,
}

impl Sampler {
    /// The stream depends only on `seed` and `salt` (one salt per check),
    /// so reports are reproducible regardless of execution order.
    pub fn new(lattice: Lattice, seed: u64, salt: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in salt.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        Self { rng: ChaCha8Rng::seed_from_u64(seed ^ h), lattice }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn dist(&self, z: C64) -> f64 {
        self.lattice.reduce_nearest(z).0.norm()
    }

    fn far(&self, z: C64, factor: f64) -> bool {
        self.dist(z) >= factor * self.lattice.shortest()
    }

    fn cell_point(&mut self) -> C64 {
        let (u, v): (f64, f64) = (self.rng.gen(), self.rng.gen());
        self.lattice.omega1() * u + self.lattice.omega2() * v
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// A point at distance at least `factor · shortest` from the lattice.
    pub fn generic_with(&mut self, factor: f64) -> C64 {
        loop {
            let z = self.cell_point();
            if self.far(z, factor) {
                return z;
            }
        }
    }

    pub fn generic(&mut self) -> C64 {
        self.generic_with(EXCLUSION)
    }

    /// `k` points such that every point and every signed sum/difference of
    /// two of them stays off the exclusion zone.
    pub fn generic_tuple(&mut self, k: usize) -> Vec<C64> {
        'outer: loop {
            let v: Vec<C64> = (0..k).map(|_| self.cell_point()).collect();
            for (a, x) in v.iter().enumerate() {
                if !self.far(*x, EXCLUSION) {
                    continue 'outer;
                }
                for y in &v[a + 1..] {
                    if !self.far(x + y, EXCLUSION) || !self.far(x - y, EXCLUSION) {
                        continue 'outer;
                    }
                }
            }
            return v;
        }
    }

    /// A point `α + βτ` of the normalized lattice with `β` in `(lo, hi)`.
    pub fn strip_point(&mut self, tau: C64, lo: f64, hi: f64) -> C64 {
        let a: f64 = self.rng.gen_range(-0.5..0.5);
        let b: f64 = self.rng.gen_range(lo..hi);
        C64::new(a, 0.0) + tau * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_generic() {
        let l = Lattice::from_tau(C64::new(0.5, 1.0)).unwrap();
        let mut s1 = Sampler::new(l, 7, "x");
        let mut s2 = Sampler::new(l, 7, "x");
        let mut s3 = Sampler::new(l, 7, "y");
        let a = s1.generic_tuple(4);
        assert_eq!(a, s2.generic_tuple(4));
        assert_ne!(a, s3.generic_tuple(4));
        for x in &a {
            assert!(s1.dist(*x) >= EXCLUSION * l.shortest());
        }
    }
}
