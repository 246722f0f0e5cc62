//! JSON file schemas and serialization helpers.
//!
//! Complex numbers are always written as `[re, im]` pairs; states as arrays
//! of pairs; operators as arrays of rows of pairs. Angles are radians.

use crate::ensemble::{PhaseEnsembleSpec, PhasePoint};
use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use crate::state::PureState;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Serializes a slice of complex numbers as `[re, im]` pairs.
pub fn complex_pairs<S, T>(
    values: &[Complex<T>],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error>
where
    S: serde::Serializer,
    T: RealScalar,
{
    let pairs: Vec<[T; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(serializer)
}

/// A file holding a list of raw states: `{"dim": d, "states": [[[re,im],...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct StateFile<T: RealScalar> {
    pub dim: usize,
    pub states: Vec<Vec<[T; 2]>>,
}

impl<T: RealScalar> StateFile<T> {
    pub fn from_states(states: &[PureState<T>]) -> Result<Self> {
        let dim = crate::state::common_dim(states)?;
        Ok(Self {
            dim,
            states: states
                .iter()
                .map(|s| s.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        })
    }

    /// Converts the raw vectors into states. With `normalize` set, vectors
    /// are rescaled; otherwise a norm off by more than the unit-norm
    /// tolerance is a config error.
    pub fn to_states(&self, normalize: bool) -> Result<Vec<PureState<T>>> {
        if self.states.is_empty() {
            return Err(Error::ConfigError("field `states` is empty".into()));
        }
        self.states
            .iter()
            .enumerate()
            .map(|(k, raw)| {
                if raw.len() != self.dim {
                    return Err(Error::ConfigError(format!(
                        "state {k} has {} amplitudes, field `dim` says {}",
                        raw.len(),
                        self.dim
                    )));
                }
                let amps: Vec<Complex<T>> =
                    raw.iter().map(|&[re, im]| Complex::new(re, im)).collect();
                if !normalize {
                    let norm_sq = amps
                        .iter()
                        .fold(T::zero(), |acc, z| acc + z.re * z.re + z.im * z.im);
                    if (norm_sq - T::one()).abs() > crate::scalar::real(1e-9) {
                        return Err(Error::ConfigError(format!(
                            "state {k} is not normalized (|ψ|² = {:?}); pass --normalize to rescale",
                            norm_sq.to_f64()
                        )));
                    }
                }
                PureState::new(amps)
                    .map_err(|e| Error::ConfigError(format!("state {k} in field `states`: {e}")))
            })
            .collect()
    }
}

/// A phase-ensemble system: `{"alpha": [...], "phase_matrix": [[...], ...]}`.
///
/// Used where both the rank test and the phase-determinant test apply.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnsembleFile<T: RealScalar> {
    pub alpha: Vec<T>,
    pub phase_matrix: Vec<Vec<T>>,
}

impl<T: RealScalar> EnsembleFile<T> {
    pub fn spec(&self) -> Result<PhaseEnsembleSpec<T>> {
        PhaseEnsembleSpec::new(self.alpha.clone())
            .map_err(|e| Error::ConfigError(format!("field `alpha`: {e}")))
    }

    pub fn phase_points(&self) -> Result<Vec<PhasePoint<T>>> {
        if self.phase_matrix.is_empty() {
            return Err(Error::ConfigError("field `phase_matrix` is empty".into()));
        }
        Ok(self
            .phase_matrix
            .iter()
            .map(|row| PhasePoint::new(row.clone()))
            .collect())
    }

    pub fn states(&self) -> Result<Vec<PureState<T>>> {
        let spec = self.spec()?;
        self.phase_points()?
            .iter()
            .map(|p| {
                crate::ensemble::phase_state(&spec, p)
                    .map_err(|e| Error::ConfigError(format!("field `phase_matrix`: {e}")))
            })
            .collect()
    }
}

/// Either input accepted by state-consuming commands.
#[derive(Debug, Clone, Deserialize)]
#[serde(bound = "", untagged)]
pub enum StateInput<T: RealScalar> {
    Ensemble(EnsembleFile<T>),
    Raw(StateFile<T>),
}
