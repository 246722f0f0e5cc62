//! Exact remote state preparation over a Schmidt-form shared state.
//!
//! Alice and Bob share `|ψ⟩_AB = Σ_i α_i |i⟩_A |i⟩_B`. To place the ensemble
//! element with phases `φ` at Bob's site, Alice measures her half in the
//! Fourier-conjugate basis `b_m = (1/√d) Σ_j e^{−iφ_j} ω^{−jm} |j⟩`
//! (`ω = e^{2πi/d}`); outcome `m` leaves Bob holding
//! `Σ_j α_j e^{iφ_j} ω^{jm} |j⟩`, and the phase correction `diag(ω^{−jm})`
//! finishes the job. One symbol out of `d` crosses the classical channel,
//! i.e. `log₂ d` bits. All outcomes succeed exactly, and every outcome is
//! equally likely, so nothing about `φ` leaks before the message arrives.
//!
//! For a qubit target with real amplitudes a 1-ebit/1-cbit variant applies:
//! Alice measures in `{target, target⊥}` and Bob either does nothing or
//! applies the fixed real-plane rotation mapping `target⊥` to `target`.

use crate::ensemble::{phase_state, PhaseEnsembleSpec, PhasePoint};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{polar, RealScalar};
use crate::state::PureState;
use crate::CVec;
use nalgebra::ComplexField;
use num_complex::Complex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Dimensions the library exposes for the shared resource.
pub const SUPPORTED_DIMS: [usize; 6] = [2, 3, 4, 5, 8, 16];

/// The Schmidt-form shared state `Σ_i α_i |i⟩_A |i⟩_B`; the reduced state on
/// either side is `diag(α²)`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct SharedEntangledState<T: RealScalar> {
    spec: PhaseEnsembleSpec<T>,
}

impl<T: RealScalar> SharedEntangledState<T> {
    pub fn new(spec: PhaseEnsembleSpec<T>) -> Result<Self> {
        if !SUPPORTED_DIMS.contains(&spec.dim()) {
            return Err(Error::UnsupportedDimension(
                spec.dim(),
                format!("supported dimensions are {SUPPORTED_DIMS:?}"),
            ));
        }
        Ok(Self { spec })
    }

    /// Maximally entangled pair of qubits (`α = (1/√2, 1/√2)`).
    pub fn ebit() -> Self {
        Self {
            spec: PhaseEnsembleSpec::uniform(2).expect("valid"),
        }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn spec(&self) -> &PhaseEnsembleSpec<T> {
        &self.spec
    }
}

/// Record of one preparation run: which outcome Alice announced, how many
/// classical bits that took, which correction Bob applied, and the fidelity
/// of his final state with the target.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct RspTranscript<T: RealScalar> {
    pub outcome: usize,
    /// `log₂ d` bits: one symbol from an alphabet of size `d`.
    pub cbits_sent: f64,
    pub correction_applied: Operator<T>,
    pub final_fidelity: T,
}

/// Alice's orthonormal measurement basis for the target phases; depends
/// only on the phases, not on the amplitude profile.
pub fn alice_measurement_basis<T: RealScalar>(
    spec: &PhaseEnsembleSpec<T>,
    target: &PhasePoint<T>,
) -> Result<Vec<PureState<T>>> {
    if spec.dim() != target.dim() {
        return Err(Error::DimensionMismatch(spec.dim(), target.dim()));
    }
    let d = spec.dim();
    let d_real = T::from_usize(d).unwrap();
    let inv_sqrt_d = T::one() / d_real.sqrt();
    let omega_step = T::two_pi() / d_real;
    (0..d)
        .map(|m| {
            let amps: Vec<Complex<T>> = target
                .phases()
                .iter()
                .enumerate()
                .map(|(j, &phi)| {
                    let angle = -phi - omega_step * T::from_usize(j * m).unwrap();
                    polar(inv_sqrt_d, angle)
                })
                .collect();
            PureState::new(amps)
        })
        .collect()
}

/// Bob's unnormalized conditional state after Alice observes `b_m`:
/// `(⟨b_m| ⊗ I) |ψ⟩_AB = Σ_i α_i conj(b_m[i]) |i⟩`.
fn bob_unnormalized<T: RealScalar>(
    shared: &SharedEntangledState<T>,
    basis_state: &PureState<T>,
) -> CVec<T> {
    let d = shared.dim();
    let mut v = CVec::zeros(d);
    for (i, &a) in shared.spec.alpha().iter().enumerate() {
        v[i] = basis_state.amplitude(i).conj().scale(a);
    }
    v
}

/// The phase correction for outcome `m`: `diag(ω^{−jm})`.
fn correction_for<T: RealScalar>(d: usize, m: usize) -> Operator<T> {
    let step = T::two_pi() / T::from_usize(d).unwrap();
    let diag: Vec<Complex<T>> = (0..d)
        .map(|j| polar(T::one(), -step * T::from_usize(j * m).unwrap()))
        .collect();
    Operator::diagonal(&diag)
}

fn run_outcome<T: RealScalar>(
    shared: &SharedEntangledState<T>,
    target: &PhasePoint<T>,
    basis: &[PureState<T>],
    m: usize,
) -> Result<(PureState<T>, RspTranscript<T>)> {
    let d = shared.dim();
    let cond = bob_unnormalized(shared, &basis[m]);
    let norm = cond.norm();
    let bob_state = PureState::new(cond.unscale(norm).iter().copied().collect())?;
    let correction = correction_for::<T>(d, m);
    let final_state = correction.apply(&bob_state)?;
    let target_state = phase_state(&shared.spec, target)?;
    let fidelity = final_state.fidelity(&target_state)?;
    Ok((
        final_state,
        RspTranscript {
            outcome: m,
            cbits_sent: (d as f64).log2(),
            correction_applied: correction,
            final_fidelity: fidelity,
        },
    ))
}

/// Simulates one full preparation: Born-samples Alice's outcome, applies
/// Bob's correction, and returns his final state with the transcript.
pub fn run_rsp<T: RealScalar>(
    shared: &SharedEntangledState<T>,
    target: &PhasePoint<T>,
    seed: u64,
) -> Result<(PureState<T>, RspTranscript<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_rsp_with_rng(shared, target, &mut rng)
}

/// As [`run_rsp`], drawing Alice's outcome from the caller's RNG stream.
pub fn run_rsp_with_rng<T: RealScalar, R: Rng + ?Sized>(
    shared: &SharedEntangledState<T>,
    target: &PhasePoint<T>,
    rng: &mut R,
) -> Result<(PureState<T>, RspTranscript<T>)> {
    if target.dim() != shared.dim() {
        return Err(Error::NotInEnsemble(format!(
            "target has {} phases, shared ensemble dimension is {}",
            target.dim(),
            shared.dim()
        )));
    }
    let basis = alice_measurement_basis(&shared.spec, target)?;
    let weights: Vec<T> = basis
        .iter()
        .map(|b| bob_unnormalized(shared, b).norm_squared())
        .collect();
    let m = crate::discrimination::sample_categorical(&weights, rng);
    run_outcome(shared, target, &basis, m)
}

/// Deterministically iterates every measurement outcome; used by the
/// exhaustive exactness tests and by the CLI's enumerate mode.
pub fn enumerate_rsp_outcomes<T: RealScalar>(
    shared: &SharedEntangledState<T>,
    target: &PhasePoint<T>,
) -> Result<Vec<(PureState<T>, RspTranscript<T>)>> {
    if target.dim() != shared.dim() {
        return Err(Error::NotInEnsemble(format!(
            "target has {} phases, shared ensemble dimension is {}",
            target.dim(),
            shared.dim()
        )));
    }
    let basis = alice_measurement_basis(&shared.spec, target)?;
    (0..shared.dim())
        .map(|m| run_outcome(shared, target, &basis, m))
        .collect()
}

/// Born probabilities of Alice's outcomes; `1/d` for every `m`.
pub fn outcome_distribution<T: RealScalar>(
    shared: &SharedEntangledState<T>,
    target: &PhasePoint<T>,
) -> Result<Vec<T>> {
    let basis = alice_measurement_basis(&shared.spec, target)?;
    Ok(basis
        .iter()
        .map(|b| bob_unnormalized(shared, b).norm_squared())
        .collect())
}

/// Bob's marginal state before Alice's message arrives:
/// `Σ_m p_m |cond_m⟩⟨cond_m|`. Equal to `diag(α²)` whatever basis Alice
/// picked — the no-signalling sanity check.
pub fn bob_premessage_marginal<T: RealScalar>(
    shared: &SharedEntangledState<T>,
    target: &PhasePoint<T>,
) -> Result<Operator<T>> {
    let basis = alice_measurement_basis(&shared.spec, target)?;
    let d = shared.dim();
    let mut rho = Operator::zeros(d);
    for b in &basis {
        let cond = bob_unnormalized(shared, b);
        rho = rho.add(&Operator::outer(&cond, &cond));
    }
    Ok(rho)
}

/// Exact 1-ebit / 1-cbit preparation of a real-amplitude qubit target.
///
/// Alice measures her half of a maximally entangled pair in
/// `{target, target⊥}`. On the wrong outcome Bob applies the fixed rotation
/// `[[0, 1], [−1, 0]]`, which maps `(−s, c) ↦ (c, s)` for every real target,
/// so no knowledge of the target is needed on his side.
pub fn run_rsp_real_qubit<T: RealScalar>(
    target: &PureState<T>,
    seed: u64,
) -> Result<(PureState<T>, RspTranscript<T>)> {
    if target.dim() != 2 {
        return Err(Error::UnsupportedDimension(
            target.dim(),
            "the real-amplitude protocol is implemented for qubits".into(),
        ));
    }
    let gauged = target.canonicalized();
    let max_im = gauged
        .amplitudes()
        .iter()
        .map(|z| z.im.abs())
        .fold(T::zero(), |a, b| a.max(b));
    if max_im > T::rsp_tol() {
        return Err(Error::NotRealAmplitude(max_im.to_f64().unwrap_or(f64::NAN)));
    }
    let c = gauged.amplitude(0).re;
    let s = gauged.amplitude(1).re;

    let shared = SharedEntangledState::<T>::ebit();
    // Alice's basis {target, target⊥} with target⊥ = (−s, c).
    let alice_basis = [
        gauged.clone(),
        PureState::from_real(&[-s, c])?,
    ];
    let weights: Vec<T> = alice_basis
        .iter()
        .map(|b| bob_unnormalized(&shared, b).norm_squared())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = crate::discrimination::sample_categorical(&weights, &mut rng);

    let cond = bob_unnormalized(&shared, &alice_basis[m]);
    let bob_state = PureState::new(cond.iter().copied().collect())?;
    let correction = if m == 0 {
        Operator::identity(2)
    } else {
        // The real-plane π rotation about the axis orthogonal to the real
        // amplitudes: sends target⊥ to target for every real target.
        let mut mtx = crate::CMat::zeros(2, 2);
        mtx[(0, 1)] = Complex::new(T::one(), T::zero());
        mtx[(1, 0)] = Complex::new(-T::one(), T::zero());
        Operator::from_matrix(mtx)?
    };
    let final_state = correction.apply(&bob_state)?;
    let fidelity = final_state.fidelity(&gauged)?;
    Ok((
        final_state,
        RspTranscript {
            outcome: m,
            cbits_sent: 1.0,
            correction_applied: correction,
            final_fidelity: fidelity,
        },
    ))
}
