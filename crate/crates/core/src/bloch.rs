//! Qubit Bloch-sphere geometry and the common-amplitude-basis decomposition.
//!
//! Any three distinct qubit rays lie on one circle of the Bloch sphere (a
//! line meets the sphere in at most two points, so three distinct points are
//! never collinear). The circle's axis defines an orthogonal basis in which
//! all three states share a single amplitude profile and differ only by
//! phases — the qubit instance of the fixed-amplitude ensemble form.

use crate::ensemble::{PhaseEnsembleSpec, PhasePoint};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{polar, real, RealScalar};
use crate::state::PureState;
use crate::CMat;
use nalgebra::{ComplexField, Vector3};
use serde::Serialize;

/// Bloch vector of a qubit state: expectation values of the three Pauli
/// observables. `|0⟩ ↦ (0,0,1)` and `(|0⟩+|1⟩)/√2 ↦ (1,0,0)`.
pub fn bloch_vector<T: RealScalar>(state: &PureState<T>) -> Result<Vector3<T>> {
    if state.dim() != 2 {
        return Err(Error::InvalidDimension(state.dim()));
    }
    let a = state.amplitude(0);
    let b = state.amplitude(1);
    let cross = a.conj() * b;
    let two = real::<T>(2.0);
    Ok(Vector3::new(
        two * cross.re,
        two * cross.im,
        a.modulus_squared() - b.modulus_squared(),
    ))
}

/// Reconstructs the qubit state (up to global phase) with the given Bloch
/// vector; the input is normalized first.
pub fn from_bloch<T: RealScalar>(v: &Vector3<T>) -> Result<PureState<T>> {
    let n = v.norm();
    if n <= T::norm_tol() {
        return Err(Error::InvalidArgument(
            "Bloch vector has (near-)zero length".into(),
        ));
    }
    let u = v / n;
    let theta = u.z.clamp(-T::one(), T::one()).acos();
    let phi = u.y.atan2(u.x);
    let half = theta / real(2.0);
    PureState::new(vec![
        num_complex::Complex::new(half.cos(), T::zero()),
        polar(half.sin(), phi),
    ])
}

/// A set of states expressed over a common amplitude profile: each input
/// state `k` equals `basis · Σ_j α_j e^{iφ_jk} |j⟩` up to global phase.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct AmplitudeDecomposition<T: RealScalar> {
    /// Unitary change of basis; column `j` is the basis state `|j'⟩`.
    pub basis: Operator<T>,
    /// The shared amplitude profile.
    pub spec: PhaseEnsembleSpec<T>,
    /// One phase tuple per input state.
    pub phase_matrix: Vec<PhasePoint<T>>,
    /// Set when some profile amplitude falls below the near-pole threshold.
    pub near_pole: bool,
}

impl<T: RealScalar> AmplitudeDecomposition<T> {
    /// Rebuilds input state `k` from the decomposition data.
    pub fn reconstruct(&self, k: usize) -> Result<PureState<T>> {
        let point = self
            .phase_matrix
            .get(k)
            .ok_or_else(|| Error::InvalidArgument(format!("no state {k} in decomposition")))?;
        let local = crate::ensemble::phase_state(&self.spec, point)?;
        self.basis.apply(&local)
    }

    /// Worst reconstruction fidelity over the recorded states.
    pub fn min_reconstruction_fidelity(&self, states: &[PureState<T>]) -> Result<T> {
        let mut worst = T::one();
        for (k, s) in states.iter().enumerate() {
            let f = self.reconstruct(k)?.fidelity(s)?;
            worst = worst.min(f);
        }
        Ok(worst)
    }
}

/// Decomposes three pairwise-distinct qubit states over the common amplitude
/// profile defined by the circle through their Bloch points.
///
/// The circle's plane has unit normal `n` and signed offset `h` from the
/// sphere center; the basis states are the qubits along `±n` and the profile
/// is `α_0² = (1+h)/2`, `α_1² = (1−h)/2`. The normal is oriented so `h ≥ 0`
/// (great circles fall back to a fixed sign rule), which makes the result
/// deterministic.
pub fn common_amplitude_basis<T: RealScalar>(
    s1: &PureState<T>,
    s2: &PureState<T>,
    s3: &PureState<T>,
) -> Result<AmplitudeDecomposition<T>> {
    let states = [s1, s2, s3];
    for s in states {
        if s.dim() != 2 {
            return Err(Error::InvalidDimension(s.dim()));
        }
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            if !states[i].is_distinct_from(states[j], None)? {
                return Err(Error::DegenerateTriple(i, j));
            }
        }
    }

    let r1 = bloch_vector(s1)?;
    let r2 = bloch_vector(s2)?;
    let r3 = bloch_vector(s3)?;

    let mut normal = (r2 - r1).cross(&(r3 - r1));
    let len = normal.norm();
    if len <= real(1e-14) {
        // Unreachable for distinct rays; guards against pathological input.
        return Err(Error::PreconditionFailed(
            "Bloch points are numerically collinear".into(),
        ));
    }
    normal /= len;

    let third = real::<T>(3.0);
    let mut h = (normal.dot(&r1) + normal.dot(&r2) + normal.dot(&r3)) / third;
    let orient_tol = real::<T>(1e-12);
    if h < -orient_tol {
        normal = -normal;
        h = -h;
    } else if h.abs() <= orient_tol {
        // Great circle: fix the axis sign by the first significant component.
        for c in [normal.x, normal.y, normal.z] {
            if c.abs() > orient_tol {
                if c < T::zero() {
                    normal = -normal;
                }
                break;
            }
        }
        h = h.abs();
    }
    let h = h.clamp(-T::one(), T::one());

    let half = real::<T>(0.5);
    let alpha0 = ((T::one() + h) * half).sqrt();
    let alpha1 = ((T::one() - h) * half).sqrt();
    let near_pole = alpha0 < T::near_pole_tol() || alpha1 < T::near_pole_tol();

    let basis0 = from_bloch(&normal)?;
    let basis1 = from_bloch(&(-normal))?;
    let mut u = CMat::zeros(2, 2);
    u.set_column(0, basis0.amplitudes());
    u.set_column(1, basis1.amplitudes());
    let basis = Operator::from_matrix(u)?;

    let mut phase_matrix = Vec::with_capacity(3);
    for s in states {
        let c0 = basis0.inner(s)?;
        let c1 = basis1.inner(s)?;
        phase_matrix.push(PhasePoint::new(vec![
            c0.im.atan2(c0.re),
            c1.im.atan2(c1.re),
        ]));
    }

    Ok(AmplitudeDecomposition {
        basis,
        spec: PhaseEnsembleSpec::new(vec![alpha0, alpha1])?,
        phase_matrix,
        near_pole,
    })
}
