//! Reproducible standard-normal draws.
//!
//! Draw `j` of stream `seed` depends only on `(seed, j)`: two uniforms come
//! from a splitmix64 hash of `(seed, j / 2)` and Box-Muller turns them into a
//! pair, of which `j` takes the cosine (even) or sine (odd) branch.

use std::f64::consts::TAU;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Uniform in `(0, 1]` from 53 random bits.
fn unit(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 / (1u64 << 53) as f64
}

pub fn standard_normal(seed: u64, index: u64) -> f64 {
    let pair = index / 2;
    let base = splitmix64(seed ^ splitmix64(pair.wrapping_mul(2)));
    let u1 = unit(base);
    let u2 = unit(splitmix64(base ^ 0xD1B5_4A32_D192_ED03));
    let r = (-2.0 * u1.ln()).sqrt();
    if index.is_multiple_of(2) {
        r * (TAU * u2).cos()
    } else {
        r * (TAU * u2).sin()
    }
}

/// The first `n` draws of stream `seed`.
pub fn normal_vector(seed: u64, n: usize) -> Vec<f64> {
    (0..n as u64).map(|j| standard_normal(seed, j)).collect()
}
