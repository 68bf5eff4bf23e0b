//! Counter-keyed random substreams.
//!
//! Every sample owns a substream identified by `(seed, stream)`. The values it
//! produces depend on nothing else, so partitioning work across threads never
//! changes a result.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `(0, 1]`; never returns zero so `-ln(u)` is finite.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Complex variate with density `exp(-|z|²) / π`: each quadrature is
    /// normal with variance 1/2.
    pub fn standard_complex(&mut self) -> Complex64 {
        let re = self.standard_normal();
        let im = self.standard_normal();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Gamma(shape, 1) for integer shape, as a sum of unit exponentials.
    pub fn gamma_int(&mut self, shape: u32) -> f64 {
        (0..shape).map(|_| -self.uniform_open0().ln()).sum()
    }

    /// Uniform direction on the unit sphere of C² (the 3-sphere in R⁴).
    pub fn unit_c2(&mut self) -> [Complex64; 2] {
        loop {
            let v = [
                Complex64::new(self.standard_normal(), self.standard_normal()),
                Complex64::new(self.standard_normal(), self.standard_normal()),
            ];
            let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if n > 0.0 {
                return [v[0] / n, v[1] / n];
            }
        }
    }

    /// Uniform phase factor `exp(iφ)`.
    pub fn unit_phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.uniform())
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn draw_standard_complex(rng: &mut RandomStream) -> Complex64 {
    rng.standard_complex()
}

/// Derive an independent seed for a labelled sub-task (sweep point, check).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
