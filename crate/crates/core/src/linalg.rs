//! Dense complex linear algebra shared by the modules: operator and state
//! containers, norms, and the Hermitian eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest dimension for which dense `N×N` matrices are built.
pub const DENSE_LIMIT: usize = 4096;

pub(crate) fn ensure_dense(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { n, max: DENSE_LIMIT });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Observable,
    Evolution,
    Transition,
}

/// An `N×N` complex matrix acting on an `N`-dimensional module, tagged with its role.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub role: Role,
    pub entries: CMatrix,
}

impl OperatorMatrix {
    pub fn new(role: Role, entries: CMatrix) -> Self {
        debug_assert!(entries.is_square());
        OperatorMatrix { role, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |A − A†|`
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// `max |A†A − I|`
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.entries)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }
}

/// A length-`N` amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("state has non-finite amplitudes".into()));
        }
        Ok(StateVector { amplitudes })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> C64) -> Result<Self> {
        Self::new(CVector::from_fn(n, |k, _| f(k)))
    }

    /// Canonical basis vector `e_k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[k] = C64::new(1.0, 0.0);
        StateVector { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.
///
/// Purely real input takes the real symmetric path.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::Numeric("eigensolver needs a square matrix".into()));
    }
    let scale = max_abs(m).max(1.0);
    if max_abs(&(m - m.adjoint())) > 1e-9 * scale {
        return Err(Error::Numeric(format!(
            "matrix is not Hermitian (defect {:e})",
            max_abs(&(m - m.adjoint()))
        )));
    }
    let real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, CMatrix) = if real {
        let re = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        let eig = SymmetricEigen::try_new(re, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numeric(format!("real symmetric eigensolver did not converge (N={n})")))?;
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Numeric(format!("Hermitian eigensolver did not converge (N={n})")))?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("eigensolver produced non-finite eigenvalues".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok((sorted_values, sorted_vectors))
}

/// `Σ_k λ_k-phase · v_k v_k†` from an eigendecomposition.
pub fn spectral_function(vectors: &CMatrix, weights: &[C64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (c, w) in weights.iter().enumerate() {
        scaled.column_mut(c).iter_mut().for_each(|z| *z *= *w);
    }
    scaled * vectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_pauli_y() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        assert!(unitarity_defect(&vecs) < 1e-14);
        let rebuilt = spectral_function(&vecs, &[C64::new(vals[0], 0.0), C64::new(vals[1], 0.0)]);
        assert!(max_abs(&(rebuilt - m)) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(hermitian_eigen(&m), Err(Error::Numeric(_))));
    }

    #[test]
    fn inner_product_dimension_check() {
        let a = StateVector::basis(3, 0);
        let b = StateVector::basis(4, 0);
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
        assert_eq!(a.inner(&a).unwrap(), C64::new(1.0, 0.0));
    }
}
