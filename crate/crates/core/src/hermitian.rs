//! Dense complex-Hermitian kernel: Kronecker products, partial trace and
//! transpose, Hilbert-Schmidt inner product, and projection back to the
//! density manifold.
//!
//! Joint indices follow the row-major convention: the pair `(i, j)` with `i`
//! over the first register (dimension `n`) and `j` over the second
//! (dimension `m`) maps to `i * m + j`. Every partial-trace/transpose routine
//! in this crate assumes that layout.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;
use num_traits::Float;

use crate::error::{CoreError, Result};

pub type C64 = Complex<f64>;

/// Tolerance for entrywise Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance on the real part of a density trace.
pub const TRACE_TOL: f64 = 1e-10;
/// Densities may dip this far below zero before they are rejected.
pub const DENSITY_EIG_TOL: f64 = 1e-10;
/// Imaginary residue allowed when a trace is extracted as a real scalar.
pub const REAL_TRACE_TOL: f64 = 1e-12;

/// A `dim x dim` complex matrix equal to its own conjugate transpose
/// (within [`HERMITICITY_TOL`] at construction). Entries are stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Builds a matrix from row-major entries, rejecting non-Hermitian input.
    pub fn from_entries(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(CoreError::InvalidDimensions {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let mut residual = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = data[i * dim + j] - data[j * dim + i].conj();
                residual = residual.max(d.norm());
            }
        }
        if residual > HERMITICITY_TOL {
            return Err(CoreError::NotHermitian { residual });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix the caller guarantees to be Hermitian.
    pub fn from_entries_unchecked(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    /// Symmetrizes arbitrary row-major entries via `(M + M^dagger) / 2`,
    /// yielding an exactly Hermitian matrix.
    pub fn from_raw_symmetrized(dim: usize, mut data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        for i in 0..dim {
            data[i * dim + i] = C64::new(data[i * dim + i].re, 0.0);
            for j in (i + 1)..dim {
                let avg = (data[i * dim + j] + data[j * dim + i].conj()) * 0.5;
                data[i * dim + j] = avg;
                data[j * dim + i] = avg.conj();
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * dim + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Rank-1 projector `v v^dagger` (the vector is not normalized here).
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for vi in v {
            for vj in v {
                data.push(vi * vj.conj());
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    /// Trace as a real scalar. Hermitian diagonals are real, so any imaginary
    /// residue signals a construction bug.
    pub fn trace(&self) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..self.dim {
            let z = self.data[i * self.dim + i];
            re += z.re;
            im += z.im;
        }
        assert!(
            im.abs() <= REAL_TRACE_TOL,
            "trace has imaginary residue {im:e}"
        );
        re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(CoreError::InvalidDimensions {
                expected: self.dim,
                got: other.dim,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b * factor)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// `self - shift * I`.
    pub fn sub_scaled_identity(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] -= C64::new(shift, 0.0);
        }
        out
    }

    /// Largest entrywise deviation from Hermiticity, `max |h_ij - conj(h_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = self.data[i * self.dim + j] - self.data[j * self.dim + i].conj();
                r = r.max(d.norm());
            }
        }
        r
    }
}

/// Row-major complex matrix product `a * b` on raw `dim x dim` buffers.
pub(crate) fn mat_mul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    debug_assert_eq!(a.len(), dim * dim);
    debug_assert_eq!(b.len(), dim * dim);
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let brow = &b[k * dim..(k + 1) * dim];
            let orow = &mut out[i * dim..(i + 1) * dim];
            for (o, bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
    out
}

/// `s * mid * s` for Hermitian `s` and `mid`; the result is Hermitian and is
/// symmetrized exactly to scrub rounding noise.
pub fn sandwich(s: &HermitianMatrix, mid: &HermitianMatrix) -> Result<HermitianMatrix> {
    if s.dim != mid.dim {
        return Err(CoreError::InvalidDimensions {
            expected: s.dim,
            got: mid.dim,
        });
    }
    let tmp = mat_mul(&s.data, &mid.data, s.dim);
    let out = mat_mul(&tmp, &s.data, s.dim);
    Ok(HermitianMatrix::from_raw_symmetrized(s.dim, out))
}

/// Kronecker product under the `i * m + j` joint-index convention:
/// `(A (x) B)[(i*m+j), (k*m+l)] = A[i][k] * B[j][l]`.
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    let (n, m) = (a.dim, b.dim);
    let dim = n * m;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            for j in 0..m {
                for l in 0..m {
                    data[(i * m + j) * dim + (k * m + l)] = aik * b.data[j * m + l];
                }
            }
        }
    }
    HermitianMatrix { dim, data }
}

/// Traces out the second register: `out[i][k] = sum_j M[(i*m+j)][(k*m+j)]`.
pub fn partial_trace_b(mat: &HermitianMatrix, n: usize, m: usize) -> Result<HermitianMatrix> {
    check_joint_dim(mat, n, m)?;
    let dim = n * m;
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                acc += mat.data[(i * m + j) * dim + (k * m + j)];
            }
            data[i * n + k] = acc;
        }
    }
    Ok(HermitianMatrix { dim: n, data })
}

/// Traces out the first register: `out[j][l] = sum_i M[(i*m+j)][(i*m+l)]`.
pub fn partial_trace_a(mat: &HermitianMatrix, n: usize, m: usize) -> Result<HermitianMatrix> {
    check_joint_dim(mat, n, m)?;
    let dim = n * m;
    let mut data = vec![C64::new(0.0, 0.0); m * m];
    for j in 0..m {
        for l in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += mat.data[(i * m + j) * dim + (i * m + l)];
            }
            data[j * m + l] = acc;
        }
    }
    Ok(HermitianMatrix { dim: m, data })
}

/// Transposes each `m x m` block: `out[(i,j),(k,l)] = M[(i,l),(k,j)]`.
pub fn partial_transpose_b(mat: &HermitianMatrix, n: usize, m: usize) -> Result<HermitianMatrix> {
    check_joint_dim(mat, n, m)?;
    let dim = n * m;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..n {
        for k in 0..n {
            for j in 0..m {
                for l in 0..m {
                    data[(i * m + j) * dim + (k * m + l)] =
                        mat.data[(i * m + l) * dim + (k * m + j)];
                }
            }
        }
    }
    Ok(HermitianMatrix { dim, data })
}

fn check_joint_dim(mat: &HermitianMatrix, n: usize, m: usize) -> Result<()> {
    if mat.dim != n * m || n == 0 || m == 0 {
        return Err(CoreError::InvalidDimensions {
            expected: n * m,
            got: mat.dim,
        });
    }
    Ok(())
}

/// Hilbert-Schmidt inner product `Tr(a^dagger b)`, real for Hermitian inputs.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(CoreError::InvalidDimensions {
            expected: a.dim,
            got: b.dim,
        });
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.data.iter().zip(&b.data) {
        let p = x.conj() * y;
        re += p.re;
        im += p.im;
    }
    assert!(
        im.abs() <= REAL_TRACE_TOL,
        "Hilbert-Schmidt inner product has imaginary residue {im:e}"
    );
    Ok(re)
}

/// A trace-one Hermitian PSD matrix: one player's strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    /// Validates trace and positivity before wrapping.
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        let tr = mat.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(CoreError::InvalidInput {
                reason: "density trace is not 1",
            });
        }
        let min = crate::eigh::eigh(&mat)?.eigenvalues[0];
        if min < -DENSITY_EIG_TOL {
            return Err(CoreError::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self(mat))
    }

    /// Wraps a matrix the caller guarantees to be a valid density.
    pub fn new_unchecked(mat: HermitianMatrix) -> Self {
        Self(mat)
    }

    /// The maximally mixed state `I / dim` (the uniform initialization).
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scaled(1.0 / dim as f64))
    }

    /// Pure state `v v^dagger / |v|^2`.
    pub fn from_pure(v: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 1e-28 {
            return Err(CoreError::InvalidInput {
                reason: "pure state vector has zero norm",
            });
        }
        Ok(Self(HermitianMatrix::outer(v).scaled(1.0 / norm_sqr)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn as_matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::eigh::eigh(&self.0)
            .expect("density matrices are Hermitian")
            .eigenvalues[0]
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Frobenius distance between two strategy profiles, treating the pair as a
/// direct sum.
pub fn profile_distance(
    a: &(DensityMatrix, DensityMatrix),
    b: &(DensityMatrix, DensityMatrix),
) -> Result<f64> {
    let dr = a.0.as_matrix().sub(b.0.as_matrix())?;
    let ds = a.1.as_matrix().sub(b.1.as_matrix())?;
    Ok((dr.frobenius_norm().powi(2) + ds.frobenius_norm().powi(2)).sqrt())
}

/// Projects an arbitrary Hermitian matrix back onto the density manifold:
/// symmetrize, clip negative eigenvalues to zero, renormalize the trace.
/// Controls the floating-point drift of integrators; idempotent on valid
/// densities.
pub fn project_to_density(mat: &HermitianMatrix) -> Result<DensityMatrix> {
    let sym = HermitianMatrix::from_raw_symmetrized(mat.dim, mat.data.clone());
    let decomp = crate::eigh::eigh(&sym)?;
    let clipped: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .map(|&l| if l < 0.0 { 0.0 } else { l })
        .collect();
    let total: f64 = clipped.iter().sum();
    if total <= 1e-14 {
        return Err(CoreError::DegenerateState { trace: total });
    }
    let scaled: Vec<f64> = clipped.iter().map(|l| l / total).collect();
    Ok(DensityMatrix(decomp.recompose(&scaled)))
}
