use crate::linalg::Matrix;
use crate::real::Real;

use super::GaussianError;

/// The symplectic form for `modes` modes in `(x1, p1, x2, p2, ...)`
/// ordering: block-diagonal `[[0, 1], [-1, 0]]`.
pub fn symplectic_form<T: Real>(modes: usize) -> Matrix<T> {
    let mut omega = Matrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    omega
}

/// Absolute tolerance used for symplecticity and symmetry checks.
pub fn default_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(1e3))
}

/// Real linear map on a phase-space vector of `2 * modes` quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticTransform<T> {
    matrix: Matrix<T>,
}

impl<T: Real> SymplecticTransform<T> {
    /// Wraps a matrix after checking `S^T Ω S = Ω`.
    pub fn new(matrix: Matrix<T>) -> Result<Self, GaussianError> {
        if !matrix.is_square() || !matrix.rows().is_multiple_of(2) {
            return Err(GaussianError::Dimension {
                expected: matrix.rows() + matrix.rows() % 2,
                found: matrix.cols(),
            });
        }
        let t = Self { matrix };
        let defect = t.symplectic_defect();
        if defect > default_tolerance::<T>() {
            return Err(GaussianError::NotSymplectic(defect.as_f64()));
        }
        Ok(t)
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix<T>) -> Self {
        debug_assert!(matrix.is_square() && matrix.rows().is_multiple_of(2));
        Self { matrix }
    }

    pub fn identity(modes: usize) -> Self {
        Self::from_matrix_unchecked(Matrix::identity(2 * modes))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.matrix.rows() / 2
    }

    /// `max |S^T Ω S - Ω|`.
    pub fn symplectic_defect(&self) -> T {
        let omega = symplectic_form::<T>(self.modes());
        let lhs = &(&self.matrix.transpose() * &omega) * &self.matrix;
        lhs.max_abs_diff(&omega)
    }

    pub fn is_symplectic(&self, tol: T) -> bool {
        self.symplectic_defect() <= tol
    }

    /// The transform that applies `self` first and `next` afterwards.
    pub fn then(&self, next: &SymplecticTransform<T>) -> SymplecticTransform<T> {
        assert_eq!(self.modes(), next.modes(), "mode count mismatch");
        Self::from_matrix_unchecked(&next.matrix * &self.matrix)
    }

    /// `S^{-1} = -Ω S^T Ω`.
    pub fn inverse(&self) -> SymplecticTransform<T> {
        let omega = symplectic_form::<T>(self.modes());
        let mut inv = &(&omega * &self.matrix.transpose()) * &omega;
        for i in 0..inv.rows() {
            for j in 0..inv.cols() {
                inv[(i, j)] = -inv[(i, j)];
            }
        }
        Self::from_matrix_unchecked(inv)
    }

    /// Heisenberg-picture coefficient of input quadrature `col` in output
    /// quadrature `row`.
    pub fn coefficient(&self, row: usize, col: usize) -> T {
        self.matrix[(row, col)]
    }

    /// Rows and columns belonging to the listed modes.
    pub fn restrict(&self, modes: &[usize]) -> Matrix<T> {
        let idx = quadrature_indices(modes);
        self.matrix.submatrix(&idx, &idx)
    }
}

pub(crate) fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

fn check_mode(mode: usize, modes: usize) -> Result<(), GaussianError> {
    if mode >= modes {
        Err(GaussianError::ModeIndex { index: mode, modes })
    } else {
        Ok(())
    }
}

/// Two-port mixer acting identically on `x` and `p`:
/// `a' = √R a + √(1-R) b`, `b' = √(1-R) a - √R b`.
pub fn beam_splitter_symplectic<T: Real>(
    modes: usize,
    reflectivity: T,
    (a, b): (usize, usize),
) -> Result<SymplecticTransform<T>, GaussianError> {
    if !(reflectivity >= T::zero() && reflectivity <= T::one()) {
        return Err(GaussianError::Domain {
            what: "beam-splitter reflectivity",
            value: reflectivity.as_f64(),
        });
    }
    check_mode(a, modes)?;
    check_mode(b, modes)?;
    if a == b {
        return Err(GaussianError::Domain {
            what: "beam-splitter ports must differ",
            value: a as f64,
        });
    }
    let c = reflectivity.sqrt();
    let s = (T::one() - reflectivity).sqrt();
    let mut m = Matrix::identity(2 * modes);
    for q in 0..2 {
        let (ia, ib) = (2 * a + q, 2 * b + q);
        m[(ia, ia)] = c;
        m[(ia, ib)] = s;
        m[(ib, ia)] = s;
        m[(ib, ib)] = -c;
    }
    Ok(SymplecticTransform::from_matrix_unchecked(m))
}

/// Single-mode squeezer: `x -> x e^{-r}`, `p -> p e^{r}`. Negative `r`
/// squeezes `p`.
pub fn squeezer_symplectic<T: Real>(
    modes: usize,
    r: T,
    mode: usize,
) -> Result<SymplecticTransform<T>, GaussianError> {
    if !r.is_finite() {
        return Err(GaussianError::Domain {
            what: "squeezing parameter",
            value: r.as_f64(),
        });
    }
    check_mode(mode, modes)?;
    let mut m = Matrix::identity(2 * modes);
    m[(2 * mode, 2 * mode)] = (-r).exp();
    m[(2 * mode + 1, 2 * mode + 1)] = r.exp();
    Ok(SymplecticTransform::from_matrix_unchecked(m))
}

/// Phase-space rotation by `theta`: `x -> x cos θ + p sin θ`,
/// `p -> -x sin θ + p cos θ`.
pub fn rotation_symplectic<T: Real>(
    modes: usize,
    theta: T,
    mode: usize,
) -> Result<SymplecticTransform<T>, GaussianError> {
    check_mode(mode, modes)?;
    let (s, c) = theta.sin_cos();
    let mut m = Matrix::identity(2 * modes);
    let (x, p) = (2 * mode, 2 * mode + 1);
    m[(x, x)] = c;
    m[(x, p)] = s;
    m[(p, x)] = -s;
    m[(p, p)] = c;
    Ok(SymplecticTransform::from_matrix_unchecked(m))
}

/// Exact π phase shift (`x -> -x`, `p -> -p`) on one mode.
pub fn phase_flip_symplectic<T: Real>(
    modes: usize,
    mode: usize,
) -> Result<SymplecticTransform<T>, GaussianError> {
    check_mode(mode, modes)?;
    let mut m = Matrix::identity(2 * modes);
    m[(2 * mode, 2 * mode)] = -T::one();
    m[(2 * mode + 1, 2 * mode + 1)] = -T::one();
    Ok(SymplecticTransform::from_matrix_unchecked(m))
}

/// The ideal two-mode QND (sum) gate:
/// `x1 -> x1`, `x2 -> x2 + G x1`, `p1 -> p1 - G p2`, `p2 -> p2`.
pub fn qnd_ideal_symplectic<T: Real>(gain: T) -> Result<SymplecticTransform<T>, GaussianError> {
    if !gain.is_finite() {
        return Err(GaussianError::Domain {
            what: "QND gain",
            value: gain.as_f64(),
        });
    }
    let mut m = Matrix::identity(4);
    m[(2, 0)] = gain;
    m[(1, 3)] = -gain;
    Ok(SymplecticTransform::from_matrix_unchecked(m))
}

/// Which quadrature of the target mode a measurement-based squeezing gate
/// compresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqueezedQuadrature {
    X,
    P,
}

/// Offline squeezing gate after the feed-forward has removed the ancilla's
/// anti-squeezed quadrature.
///
/// For [`SqueezedQuadrature::X`]: `x -> √R x + √(1-R) x_anc`, `p -> p/√R`.
/// The map is completed on the ancilla mode with `x_anc' = x_anc`,
/// `p_anc' = p_anc - √((1-R)/R) p` so that the 2-mode matrix stays
/// symplectic. The `P` variant swaps the roles of `x` and `p`.
pub fn squeezing_gate_symplectic<T: Real>(
    modes: usize,
    reflectivity: T,
    target: usize,
    ancilla: usize,
    axis: SqueezedQuadrature,
) -> Result<SymplecticTransform<T>, GaussianError> {
    if !(reflectivity > T::zero() && reflectivity < T::one()) {
        return Err(GaussianError::Domain {
            what: "squeezing-gate reflectivity",
            value: reflectivity.as_f64(),
        });
    }
    check_mode(target, modes)?;
    check_mode(ancilla, modes)?;
    let sr = reflectivity.sqrt();
    let st = (T::one() - reflectivity).sqrt();
    let ff = ((T::one() - reflectivity) / reflectivity).sqrt();
    let (sq, anti) = match axis {
        SqueezedQuadrature::X => (0, 1),
        SqueezedQuadrature::P => (1, 0),
    };
    let mut m = Matrix::identity(2 * modes);
    let (t_sq, t_anti) = (2 * target + sq, 2 * target + anti);
    let (a_sq, a_anti) = (2 * ancilla + sq, 2 * ancilla + anti);
    m[(t_sq, t_sq)] = sr;
    m[(t_sq, a_sq)] = st;
    m[(t_anti, t_anti)] = T::one() / sr;
    m[(a_anti, t_anti)] = -ff;
    Ok(SymplecticTransform::from_matrix_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianState;

    #[test]
    fn full_reflection_flips_second_port() {
        let bs = beam_splitter_symplectic(2, 1.0f64, (0, 1)).unwrap();
        let expect = Matrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert!(bs.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn balanced_splitter_keeps_vacuum() {
        let bs = beam_splitter_symplectic(2, 0.5f64, (0, 1)).unwrap();
        let out = GaussianState::vacuum(2).transformed(&bs).unwrap();
        assert!(out.cov().max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn golden_reflectivity_entries() {
        let r = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((r - 0.381966).abs() < 1e-6);
        let bs = beam_splitter_symplectic(2, r, (0, 1)).unwrap();
        assert!((bs.coefficient(0, 0) - 0.61803).abs() < 1e-5);
        assert!((bs.coefficient(0, 2) - 0.78615).abs() < 1e-5);
    }

    #[test]
    fn reflectivity_out_of_range_is_rejected() {
        assert!(matches!(
            beam_splitter_symplectic(2, 1.5f64, (0, 1)),
            Err(GaussianError::Domain { .. })
        ));
        assert!(beam_splitter_symplectic(2, -0.1f64, (0, 1)).is_err());
        assert!(beam_splitter_symplectic(2, 0.5f64, (0, 2)).is_err());
    }

    #[test]
    fn zero_squeezing_is_identity() {
        let s = squeezer_symplectic(1, 0.0f64, 0).unwrap();
        assert_eq!(s, SymplecticTransform::identity(1));
    }

    #[test]
    fn squeezed_vacuum_is_pure() {
        let r = 0.7f64;
        let s = squeezer_symplectic(1, r, 0).unwrap();
        let out = GaussianState::vacuum(1).transformed(&s).unwrap();
        assert!((out.cov()[(0, 0)] - (-2.0 * r).exp()).abs() < 1e-12);
        assert!((out.cov()[(1, 1)] - (2.0 * r).exp()).abs() < 1e-12);
        assert!((out.cov().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_qnd_unit_gain_on_vacuum() {
        let s = qnd_ideal_symplectic(1.0f64).unwrap();
        let out = GaussianState::vacuum(2).transformed(&s).unwrap();
        let c = out.cov();
        // x-block
        assert!((c[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((c[(0, 2)] - 1.0).abs() < 1e-12);
        assert!((c[(2, 2)] - 2.0).abs() < 1e-12);
        // p-block
        assert!((c[(1, 1)] - 2.0).abs() < 1e-12);
        assert!((c[(1, 3)] + 1.0).abs() < 1e-12);
        assert!((c[(3, 3)] - 1.0).abs() < 1e-12);
        // +3 dB on the probe x quadrature
        assert!((10.0 * c[(2, 2)].log10() - 3.0103).abs() < 1e-3);
    }

    #[test]
    fn zero_gain_qnd_is_identity() {
        assert_eq!(
            qnd_ideal_symplectic(0.0f64).unwrap(),
            SymplecticTransform::identity(2)
        );
    }

    #[test]
    fn inverse_round_trip() {
        let s = beam_splitter_symplectic(2, 0.3f64, (0, 1))
            .unwrap()
            .then(&squeezer_symplectic(2, 0.4, 1).unwrap())
            .then(&qnd_ideal_symplectic(1.3).unwrap());
        let id = s.then(&s.inverse());
        assert!(id.matrix().max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn squeezing_gate_is_symplectic() {
        for axis in [SqueezedQuadrature::X, SqueezedQuadrature::P] {
            let g = squeezing_gate_symplectic(2, 0.38f64, 0, 1, axis).unwrap();
            assert!(g.is_symplectic(1e-12));
        }
    }

    #[test]
    fn rotation_by_pi_negates_mode() {
        let r = rotation_symplectic(1, std::f64::consts::PI, 0).unwrap();
        let flip = phase_flip_symplectic::<f64>(1, 0).unwrap();
        assert!(r.matrix().max_abs_diff(flip.matrix()) < 1e-15);
    }
}
