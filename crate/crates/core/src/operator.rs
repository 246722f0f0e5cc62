//! Square complex operators with the Hermitian / unitary / PSD predicates
//! used throughout the crate.

use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use crate::state::PureState;
use crate::{CMat, CVec};
use nalgebra::{ComplexField, SymmetricEigen};
use num_complex::Complex;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// A `dim × dim` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: RealScalar> {
    entries: CMat<T>,
}

impl<T: RealScalar> Operator<T> {
    pub fn from_matrix(entries: CMat<T>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::InvalidShape {
                states: entries.ncols(),
                dim: entries.nrows(),
            });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMat::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMat::zeros(dim, dim),
        }
    }

    /// Diagonal operator from complex entries.
    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = CMat::zeros(diag.len(), diag.len());
        for (j, &z) in diag.iter().enumerate() {
            m[(j, j)] = z;
        }
        Self { entries: m }
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(state: &PureState<T>) -> Self {
        Self::outer(state.amplitudes(), state.amplitudes())
    }

    /// `|u⟩⟨v|` for raw vectors.
    pub fn outer(u: &CVec<T>, v: &CVec<T>) -> Self {
        Self {
            entries: u * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat<T> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            entries: self.entries.map(|z| z.scale(factor)),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries * &other.entries,
        }
    }

    /// Applies the operator to a raw vector.
    pub fn apply_vec(&self, v: &CVec<T>) -> Result<CVec<T>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.len()));
        }
        Ok(&self.entries * v)
    }

    /// Applies the operator to a state and renormalizes.
    pub fn apply(&self, state: &PureState<T>) -> Result<PureState<T>> {
        let v = self.apply_vec(state.amplitudes())?;
        PureState::new(v.iter().copied().collect())
    }

    /// `⟨ψ|A|ψ⟩` (complex in general; real for Hermitian `A`).
    pub fn expectation(&self, state: &PureState<T>) -> Result<Complex<T>> {
        let v = self.apply_vec(state.amplitudes())?;
        Ok(state.amplitudes().dotc(&v))
    }

    /// Max entry modulus of `A − A†`.
    pub fn hermiticity_defect(&self) -> T {
        let diff = &self.entries - self.entries.adjoint();
        diff.iter()
            .map(|z| z.modulus())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_hermitian(&self, tol: Option<T>) -> bool {
        self.hermiticity_defect() <= tol.unwrap_or_else(T::op_tol)
    }

    /// Max entry modulus of `A†A − I`.
    pub fn unitarity_defect(&self) -> T {
        let diff = self.entries.adjoint() * &self.entries - CMat::identity(self.dim(), self.dim());
        diff.iter()
            .map(|z| z.modulus())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_unitary(&self, tol: Option<T>) -> bool {
        self.unitarity_defect() <= tol.unwrap_or_else(T::op_tol)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let h = (&self.entries + self.entries.adjoint()).map(|z| z.unscale(T::from_f64(2.0).unwrap()));
        Self { entries: h }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let eig = SymmetricEigen::new(self.hermitian_part().entries);
        let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        vals
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> T {
        self.hermitian_eigenvalues()[0]
    }

    pub fn is_psd(&self, tol: Option<T>) -> bool {
        let tol = tol.unwrap_or_else(T::op_tol);
        self.is_hermitian(Some(tol)) && self.min_eigenvalue() >= -tol
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }
}

/// Operators serialize as a JSON array of rows of `[re, im]` pairs.
impl<T: RealScalar> Serialize for Operator<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.dim()))?;
        for i in 0..self.dim() {
            let row: Vec<[T; 2]> = (0..self.dim())
                .map(|j| {
                    let z = self.entries[(i, j)];
                    [z.re, z.im]
                })
                .collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}
