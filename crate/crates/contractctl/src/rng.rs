//! Seeded sampling on top of the ChaCha8 stream cipher, a counter-based generator.

use contraction_core::deformation::DeformedElement;
use contraction_core::matgroup::{k_basis, mat_exp, p_dim, p_from_coords};
use contraction_core::Mat;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn angle(&mut self) -> f64 {
        self.range(-std::f64::consts::PI, std::f64::consts::PI)
    }

    /// Uniform point of the `B`-ball of the given radius in `p`, by rejection.
    pub fn p_point(&mut self, n: usize, radius: f64) -> Mat {
        let d = p_dim(n);
        loop {
            let c: Vec<f64> = (0..d).map(|_| self.range(-1.0, 1.0)).collect();
            if c.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                let c: Vec<f64> = c.iter().map(|x| x * radius).collect();
                return p_from_coords(n, &c);
            }
        }
    }

    /// Element of `SO(n)` as the exponential of a random combination of the `k` basis.
    pub fn rotation(&mut self, n: usize) -> Mat {
        let mut gen = Mat::zeros(n, n);
        for b in k_basis(n) {
            gen += b * self.angle();
        }
        mat_exp(&gen).expect("skew generator has a bounded norm")
    }

    pub fn element(&mut self, n: usize, radius: f64, t: f64) -> DeformedElement {
        let k = self.rotation(n);
        let v = self.p_point(n, radius);
        DeformedElement::new(k, v, t).expect("sampled element is valid")
    }
}
