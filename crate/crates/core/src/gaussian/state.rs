use crate::linalg::Matrix;
use crate::real::Real;

use super::symplectic::{default_tolerance, quadrature_indices, symplectic_form};
use super::{GaussianError, SymplecticTransform};

/// First and second moments of an `N`-mode Gaussian state in shot-noise
/// units (`ħ = 2`, vacuum variance 1), ordered `(x1, p1, ..., xN, pN)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState<T> {
    mean: Vec<T>,
    cov: Matrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// Validated constructor: the covariance must be symmetric and satisfy
    /// `V + iΩ ⪰ 0`.
    pub fn new(mean: Vec<T>, cov: Matrix<T>) -> Result<Self, GaussianError> {
        let state = Self::new_unchecked(mean, cov)?;
        let asym = state.cov.symmetry_defect();
        let tol = default_tolerance::<T>() * state.cov.max_abs().max(T::one());
        if asym > tol {
            return Err(GaussianError::NotSymmetric(asym.as_f64()));
        }
        let min_ev = state.uncertainty_margin();
        if min_ev < -tol {
            return Err(GaussianError::Unphysical(min_ev.as_f64()));
        }
        Ok(state)
    }

    fn new_unchecked(mean: Vec<T>, cov: Matrix<T>) -> Result<Self, GaussianError> {
        if !mean.len().is_multiple_of(2) || !cov.is_square() || cov.rows() != mean.len() {
            return Err(GaussianError::Dimension {
                expected: mean.len(),
                found: cov.rows(),
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: vec![T::zero(); 2 * modes],
            cov: Matrix::identity(2 * modes),
        }
    }

    /// Vacuum displaced to the given quadrature means.
    pub fn coherent(mean: Vec<T>) -> Result<Self, GaussianError> {
        let modes = mean.len() / 2;
        Self::new_unchecked(mean, Matrix::identity(2 * modes))
    }

    /// Single-mode squeezed vacuum with `Var(x) = e^{-2r}`.
    pub fn squeezed_vacuum(r: T) -> Self {
        let two = T::lit(2.0);
        Self {
            mean: vec![T::zero(); 2],
            cov: Matrix::from_diagonal(&[(-two * r).exp(), (two * r).exp()]),
        }
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix<T> {
        &self.cov
    }

    pub fn variance(&self, quadrature: usize) -> T {
        self.cov[(quadrature, quadrature)]
    }

    pub fn covariance(&self, a: usize, b: usize) -> T {
        self.cov[(a, b)]
    }

    /// Product state `self ⊗ other`; `other`'s modes follow `self`'s.
    pub fn tensor(&self, other: &GaussianState<T>) -> GaussianState<T> {
        let mut mean = self.mean.clone();
        mean.extend_from_slice(&other.mean);
        Self {
            mean,
            cov: self.cov.direct_sum(&other.cov),
        }
    }

    /// Heisenberg propagation: `mean -> S mean`, `V -> S V Sᵀ`.
    pub fn transformed(&self, s: &SymplecticTransform<T>) -> Result<Self, GaussianError> {
        if s.modes() != self.modes() {
            return Err(GaussianError::Dimension {
                expected: 2 * self.modes(),
                found: 2 * s.modes(),
            });
        }
        Ok(Self {
            mean: s.matrix().mul_vec(&self.mean),
            cov: s.matrix().congruence(&self.cov),
        })
    }

    /// Marginal state on the listed modes (partial trace).
    pub fn reduced(&self, modes: &[usize]) -> Result<Self, GaussianError> {
        if let Some(&bad) = modes.iter().find(|&&m| m >= self.modes()) {
            return Err(GaussianError::ModeIndex {
                index: bad,
                modes: self.modes(),
            });
        }
        let idx = quadrature_indices(modes);
        Ok(Self {
            mean: idx.iter().map(|&i| self.mean[i]).collect(),
            cov: self.cov.submatrix(&idx, &idx),
        })
    }

    /// Smallest eigenvalue of `V + iΩ`, computed on its real
    /// `[[V, -Ω], [Ω, V]]` form. Non-negative for physical states.
    pub fn uncertainty_margin(&self) -> T {
        let n = self.cov.rows();
        let omega = symplectic_form::<T>(self.modes());
        let mut big = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                big[(i, j)] = self.cov[(i, j)];
                big[(n + i, n + j)] = self.cov[(i, j)];
                big[(i, n + j)] = -omega[(i, j)];
                big[(n + i, j)] = omega[(i, j)];
            }
        }
        big.symmetric_eigenvalues()[0]
    }

    pub fn is_physical(&self, tol: T) -> bool {
        self.uncertainty_margin() >= -tol
    }

    /// `1/√det V`; equals 1 for pure states.
    pub fn purity(&self) -> T {
        T::one() / self.cov.determinant().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_unit_covariance() {
        let v = GaussianState::<f64>::vacuum(3);
        assert!(v.mean().iter().all(|&m| m == 0.0));
        assert_eq!(v.cov(), &Matrix::identity(6));
        assert!(v.uncertainty_margin().abs() < 1e-12);
        assert!((v.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sub_uncertainty_state_rejected() {
        let cov = Matrix::from_diagonal(&[0.5, 0.5]);
        assert!(matches!(
            GaussianState::new(vec![0.0f64, 0.0], cov),
            Err(GaussianError::Unphysical(_))
        ));
    }

    #[test]
    fn asymmetric_covariance_rejected() {
        let cov = Matrix::from_rows(&[vec![2.0, 0.1], vec![0.0, 2.0]]);
        assert!(matches!(
            GaussianState::new(vec![0.0f64, 0.0], cov),
            Err(GaussianError::NotSymmetric(_))
        ));
    }

    #[test]
    fn thermal_state_is_mixed_but_physical() {
        let s = GaussianState::new(vec![0.0f64, 0.0], Matrix::from_diagonal(&[3.0, 3.0])).unwrap();
        assert!(s.is_physical(1e-12));
        assert!((s.purity() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_picks_quadratures() {
        let s = GaussianState::<f64>::squeezed_vacuum(0.5).tensor(&GaussianState::vacuum(1));
        let r = s.reduced(&[0]).unwrap();
        assert!((r.variance(0) - (-1.0f64).exp()).abs() < 1e-12);
        assert!(s.reduced(&[2]).is_err());
    }
}
