//! Bloch-sphere coordinates for 2x2 densities: `a_i = Tr(rho sigma_i)` with
//! the Pauli matrices ordered sigma_1 (off-diagonal real), sigma_2
//! (off-diagonal imaginary), sigma_3 (diagonal +/-1). A state is pure iff
//! its Bloch vector has unit norm.

use crate::error::{CoreError, Result};
use crate::hermitian::{C64, HermitianMatrix};

/// The non-identity Pauli matrices `[sigma_1, sigma_2, sigma_3]`.
pub fn pauli_matrices() -> [HermitianMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        HermitianMatrix::from_entries_unchecked(2, alloc::vec![z, one, one, z]),
        HermitianMatrix::from_entries_unchecked(2, alloc::vec![z, -i, i, z]),
        HermitianMatrix::from_entries_unchecked(2, alloc::vec![one, z, z, -one]),
    ]
}

/// Bloch coordinates `(Tr(rho sigma_1), Tr(rho sigma_2), Tr(rho sigma_3))`.
pub fn bloch_vector(rho: &HermitianMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(CoreError::UnsupportedDimension { dim: rho.dim() });
    }
    let off = rho.entry(0, 1);
    Ok([
        2.0 * off.re,
        -2.0 * off.im,
        rho.entry(0, 0).re - rho.entry(1, 1).re,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{DensityMatrix, hs_inner};
    use crate::rand_util::{gram_density, seeded_rng};
    use num_traits::Float;

    #[test]
    fn maximally_mixed_is_origin() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_eq!(bloch_vector(rho.as_matrix()).unwrap(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn ground_state_is_north_pole() {
        let rho = HermitianMatrix::from_diag(&[1.0, 0.0]);
        assert_eq!(bloch_vector(&rho).unwrap(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn matches_pauli_inner_products() {
        let mut rng = seeded_rng(4);
        let rho = gram_density(2, &mut rng);
        let a = bloch_vector(rho.as_matrix()).unwrap();
        for (k, sigma) in pauli_matrices().iter().enumerate() {
            let want = hs_inner(sigma, rho.as_matrix()).unwrap();
            assert!((a[k] - want).abs() <= 1e-14);
        }
        // Mixed states lie strictly inside the ball.
        let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        assert!(norm <= 1.0 + 1e-9);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let rho = HermitianMatrix::identity(3);
        assert!(matches!(
            bloch_vector(&rho).unwrap_err(),
            CoreError::UnsupportedDimension { dim: 3 }
        ));
    }
}
