//! Fixed-amplitude phase ensembles: states of the form `Σ_j α_j e^{iφ_j} |j⟩`
//! with a strictly positive amplitude profile `α` and free phases.

use crate::error::{Error, Result};
use crate::scalar::{polar, wrap_angle, RealScalar};
use crate::state::PureState;
use nalgebra::ComplexField;

use serde::{Deserialize, Serialize};

/// The amplitude profile `ᾱ = (α_0, …, α_{d−1})`: strictly positive reals
/// with `Σ α_i² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PhaseEnsembleSpec<T: RealScalar> {
    alpha: Vec<T>,
}

impl<T: RealScalar> PhaseEnsembleSpec<T> {
    /// Validates positivity and normalizes `Σ α_i² = 1`.
    pub fn new(alpha: Vec<T>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidDimension(alpha.len()));
        }
        if alpha.iter().any(|&a| a <= T::zero()) {
            return Err(Error::InvalidArgument(
                "amplitude profile entries must be strictly positive".into(),
            ));
        }
        let norm = alpha
            .iter()
            .fold(T::zero(), |acc, &a| acc + a * a)
            .sqrt();
        if norm <= T::norm_tol() {
            return Err(Error::InvalidState);
        }
        Ok(Self {
            alpha: alpha.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// The flat profile `α_i = 1/√d`.
    pub fn uniform(dim: usize) -> Result<Self> {
        Self::new(vec![T::one(); dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }
}

/// A point `(φ_0, …, φ_{d−1})` on the d-torus, canonicalized to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PhasePoint<T: RealScalar> {
    phases: Vec<T>,
}

impl<T: RealScalar> PhasePoint<T> {
    pub fn new(phases: Vec<T>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_angle).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            phases: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    /// Phase difference to another point, componentwise modulo 2π.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self::new(
            self.phases
                .iter()
                .zip(&other.phases)
                .map(|(&a, &b)| a - b)
                .collect(),
        ))
    }
}

/// The ensemble element `Σ_j α_j e^{iφ_j} |j⟩`; normalized by construction
/// because `Σ α_j² = 1`.
pub fn phase_state<T: RealScalar>(
    spec: &PhaseEnsembleSpec<T>,
    point: &PhasePoint<T>,
) -> Result<PureState<T>> {
    if spec.dim() != point.dim() {
        return Err(Error::DimensionMismatch(spec.dim(), point.dim()));
    }
    let amps = spec
        .alpha()
        .iter()
        .zip(point.phases())
        .map(|(&a, &phi)| polar(a, phi))
        .collect();
    PureState::new(amps)
}

/// Recovers the phase point of a state that is (claimed to be) an element of
/// `S_α` in the computational basis: checks `|amplitude_j| = α_j` and reads
/// the phases off. Fails with `NotInEnsemble` otherwise.
pub fn phase_point_of<T: RealScalar>(
    spec: &PhaseEnsembleSpec<T>,
    state: &PureState<T>,
) -> Result<PhasePoint<T>> {
    if spec.dim() != state.dim() {
        return Err(Error::DimensionMismatch(spec.dim(), state.dim()));
    }
    let mut phases = Vec::with_capacity(spec.dim());
    for (j, &a) in spec.alpha().iter().enumerate() {
        let amp = state.amplitude(j);
        let modulus = amp.modulus();
        if (modulus - a).abs() > crate::scalar::real(1e-9) {
            return Err(Error::NotInEnsemble(format!(
                "amplitude {j} has modulus {:?}, profile requires {:?}",
                modulus.to_f64(),
                a.to_f64()
            )));
        }
        phases.push(amp.im.atan2(amp.re));
    }
    Ok(PhasePoint::new(phases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{PhaseEnsembleSpec64, PhasePoint64};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn zero_phases_give_plus_state() {
        let spec = PhaseEnsembleSpec64::uniform(2).unwrap();
        let s = phase_state(&spec, &PhasePoint::zero(2)).unwrap();
        assert_abs_diff_eq!(s.amplitude(0).re, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(1).re, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn pi_phase_gives_minus_state() {
        let spec = PhaseEnsembleSpec64::uniform(2).unwrap();
        let s = phase_state(&spec, &PhasePoint::new(vec![0.0, PI])).unwrap();
        assert_abs_diff_eq!(s.amplitude(1).re, -1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(1).im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_states_always_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let alpha: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
            let spec = PhaseEnsembleSpec64::new(alpha).unwrap();
            let phases: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let s = phase_state(&spec, &PhasePoint::new(phases)).unwrap();
            assert_abs_diff_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn nonpositive_alpha_rejected() {
        assert!(PhaseEnsembleSpec64::new(vec![0.5, 0.0]).is_err());
        assert!(PhaseEnsembleSpec64::new(vec![0.5, -0.5]).is_err());
    }

    #[test]
    fn dim_mismatch_rejected() {
        let spec = PhaseEnsembleSpec64::uniform(2).unwrap();
        let p = PhasePoint64::zero(3);
        assert!(matches!(
            phase_state(&spec, &p),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn phases_canonicalized() {
        let p = PhasePoint64::new(vec![-PI, 3.0 * PI, 2.0 * PI]);
        assert_abs_diff_eq!(p.phases()[0], PI, epsilon = 1e-12);
        assert_abs_diff_eq!(p.phases()[1], PI, epsilon = 1e-12);
        assert_abs_diff_eq!(p.phases()[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_point_roundtrip() {
        let spec = PhaseEnsembleSpec64::new(vec![0.6, 0.8]).unwrap();
        let p = PhasePoint64::new(vec![0.3, 5.1]);
        let s = phase_state(&spec, &p).unwrap();
        let q = phase_point_of(&spec, &s).unwrap();
        for (a, b) in p.phases().iter().zip(q.phases()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn off_profile_state_rejected() {
        let spec = PhaseEnsembleSpec64::uniform(2).unwrap();
        let s = crate::PureState64::basis_state(2, 0).unwrap();
        assert!(matches!(
            phase_point_of(&spec, &s),
            Err(Error::NotInEnsemble(_))
        ));
    }
}
