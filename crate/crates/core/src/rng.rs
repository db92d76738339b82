//! Seeded randomness shared by the search, ordering and simulation code.
//!
//! Every parallel work item draws from its own generator whose seed is
//! derived from the master seed and the item index, so results do not depend
//! on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};

pub type SimRng = ChaCha12Rng;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix(mix(seed) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_for(seed: u64, stream: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(seed, stream))
}

/// Symmetric Dirichlet draw via normalized Gamma variates.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize, alpha: f64) -> Vec<f64> {
    let g = Gamma::new(alpha, 1.0).expect("positive concentration");
    loop {
        let w: Vec<f64> = (0..n).map(|_| g.sample(rng)).collect();
        let t: f64 = w.iter().sum();
        if t > 0.0 && t.is_finite() {
            return w.into_iter().map(|x| x / t).collect();
        }
    }
}

/// Probability row drawn from a mixture that covers the simplex interior,
/// its faces and its vertices: one-hot rows, sparse Dirichlet rows and
/// diffuse Dirichlet rows.
pub fn mixed_row<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    match rng.random_range(0..4u8) {
        0 => {
            let mut v = vec![0.0; n];
            v[rng.random_range(0..n)] = 1.0;
            v
        }
        1 => dirichlet(rng, n, 0.2),
        2 => dirichlet(rng, n, 1.0),
        _ => dirichlet(rng, n, 3.0),
    }
}

/// Index drawn from the categorical law `probs` (which need not be exactly normalized).
pub fn categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
