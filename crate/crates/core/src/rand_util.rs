//! Seeded random constructions: Gaussian matrices, Wishart-style densities,
//! Haar-uniform unit vectors, and random Hermitian tangents.
//!
//! Everything is driven by an explicit [`ChaCha8Rng`] so that every consumer
//! of this crate is reproducible from a single `u64` seed. Batch drivers
//! derive per-run seeds as `seed + run_index`; helpers here never share
//! generator state.

use alloc::vec::Vec;
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hermitian::{C64, DensityMatrix, HermitianMatrix};

/// The deterministic generator used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with independent standard normal real and imaginary parts.
pub fn gauss_c64(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Row-major `dim x dim` matrix of i.i.d. complex Gaussians.
pub fn gaussian_matrix(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..dim * dim).map(|_| gauss_c64(rng)).collect()
}

/// `G G^dagger` for a raw row-major `G`; Hermitian PSD by construction.
pub fn gram(g: &[C64], dim: usize) -> HermitianMatrix {
    let mut data = alloc::vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[i * dim + k] * g[j * dim + k].conj();
            }
            data[i * dim + j] = acc;
            data[j * dim + i] = acc.conj();
        }
    }
    for i in 0..dim {
        data[i * dim + i] = C64::new(data[i * dim + i].re, 0.0);
    }
    HermitianMatrix::from_entries_unchecked(dim, data)
}

/// Random Wishart matrix `G G^dagger` with complex Gaussian `G`.
pub fn gram_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    gram(&gaussian_matrix(dim, rng), dim)
}

/// Random full-rank density `G G^dagger / Tr(G G^dagger)`.
pub fn gram_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let w = gram_hermitian(dim, rng);
    let tr = w.trace();
    DensityMatrix::new_unchecked(w.scaled(1.0 / tr))
}

/// Random Hermitian matrix with Gaussian real diagonal and complex Gaussian
/// upper triangle.
pub fn gaussian_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let mut data = alloc::vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        let d: f64 = StandardNormal.sample(rng);
        data[i * dim + i] = C64::new(d, 0.0);
        for j in (i + 1)..dim {
            let z = gauss_c64(rng);
            data[i * dim + j] = z;
            data[j * dim + i] = z.conj();
        }
    }
    HermitianMatrix::from_entries_unchecked(dim, data)
}

/// Random traceless Hermitian tangent direction, normalized to unit
/// Frobenius norm.
pub fn traceless_tangent(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let h = gaussian_hermitian(dim, rng);
    let centered = h.sub_scaled_identity(h.trace() / dim as f64);
    let norm = centered.frobenius_norm();
    centered.scaled(1.0 / norm)
}

/// Haar-uniform unit vector: normalized complex Gaussian.
pub fn haar_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gauss_c64(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
