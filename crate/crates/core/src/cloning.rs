//! Probabilistic exact 1→2 cloning machines.
//!
//! A machine with per-state success probabilities `γ_k` maps `|ψ_k⟩|blank⟩`
//! to `√γ_k |ψ_k⟩|ψ_k⟩|success⟩ + |Φ_k⟩|failure⟩`. Taking inner products of
//! these relations shows such an isometry exists iff
//! `X⁽¹⁾ − √Γ X⁽²⁾ √Γ ⪰ 0`, where `X⁽ⁿ⁾_{jk} = ⟨ψ_j|ψ_k⟩ⁿ` and
//! `Γ = diag(γ)`: the residue must be the Gram matrix of the failure
//! vectors. The constructor below materializes exactly that isometry; the
//! impossibility certificate quantifies why no machine covers a linearly
//! dependent set.

use crate::error::{Error, Result};
use crate::independence::{
    check_two_copy_preconditions, dependence_coefficients, express_in_span,
    is_linearly_independent_default, state_matrix, two_copy_independence, DependenceCertificate,
    IndependenceVerdict,
};
use crate::operator::Operator;
use crate::scalar::{real, RealScalar};
use crate::state::{common_dim, PureState};
use crate::{CMat, CVec};
use nalgebra::ComplexField;
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Feasibility verdict for a candidate success-probability vector.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct CloningFeasibility<T: RealScalar> {
    pub gammas: Vec<T>,
    pub feasible: bool,
    /// Min eigenvalue of `X⁽¹⁾ − √Γ X⁽²⁾ √Γ`; feasible iff ≥ −op_tol.
    pub psd_witness: T,
}

/// Split of the cloner output space into the heralded-success two-copy
/// sector (the first `success_dim` coordinates) and the failure sector.
#[derive(Debug, Clone, Serialize)]
pub struct FlagSubspace {
    pub success_dim: usize,
    pub failure_dim: usize,
}

/// An explicit isometry realizing a feasible cloning machine.
#[derive(Debug, Clone)]
pub struct ClonerRealization<T: RealScalar> {
    pub input_dim: usize,
    /// Dimensions appended beyond the two-copy sector.
    pub ancilla_dim: usize,
    /// `(success_dim + failure_dim) × input_dim` matrix with `V†V = I`.
    pub isometry: CMat<T>,
    pub flags: FlagSubspace,
    gammas: Vec<T>,
}

/// Outcome of one heralded cloning attempt.
#[derive(Debug, Clone)]
pub enum CloneOutcome<T: RealScalar> {
    /// The normalized two-copy output state (dimension `d²`).
    Success(PureState<T>),
    Failure,
}

/// Certificate that no linear machine can clone all `d+1` states of a
/// dependent tuple with nonzero success probability.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ImpossibilityCertificate<T: RealScalar> {
    /// Coefficients expressing the `(d+1)`-th state in the first `d`.
    pub dependence: DependenceCertificate<T>,
    /// Rank verdict on the two-copy lifts: independent.
    pub two_copy_verdict: IndependenceVerdict<T>,
    /// Largest success probability any of the states could have under a
    /// machine linear to within `linearity_tol`; must be ≈ 0.
    pub max_gamma_bound: T,
    /// Distance of each `ψ_k^{⊗2}` from the span of the other lifts.
    pub lift_residuals: Vec<T>,
}

/// Gram matrix `X⁽¹⁾_{jk} = ⟨ψ_j|ψ_k⟩` and its entrywise square `X⁽²⁾`.
fn gram_pair<T: RealScalar>(states: &[PureState<T>]) -> Result<(CMat<T>, CMat<T>)> {
    let a = state_matrix(states)?;
    let x1 = a.adjoint() * &a;
    let x2 = x1.map(|z| z * z);
    Ok((x1, x2))
}

/// `X⁽¹⁾ − √Γ X⁽²⁾ √Γ` for `Γ = diag(γ)`.
fn feasibility_matrix<T: RealScalar>(x1: &CMat<T>, x2: &CMat<T>, gammas: &[T]) -> CMat<T> {
    let n = gammas.len();
    let mut m = x1.clone();
    for j in 0..n {
        for k in 0..n {
            let scale = (gammas[j].max(T::zero()) * gammas[k].max(T::zero())).sqrt();
            m[(j, k)] -= x2[(j, k)].scale(scale);
        }
    }
    m
}

fn ensure_independent<T: RealScalar>(states: &[PureState<T>]) -> Result<()> {
    let verdict = is_linearly_independent_default(states)?;
    if !verdict.independent {
        return Err(Error::NotIndependent(
            (verdict.min_singular_value / verdict.max_singular_value.max(T::norm_tol()))
                .to_f64()
                .unwrap_or(0.0),
        ));
    }
    Ok(())
}

/// Evaluates the PSD feasibility condition for the given `γ` vector.
pub fn clone_feasibility<T: RealScalar>(
    states: &[PureState<T>],
    gammas: &[T],
) -> Result<CloningFeasibility<T>> {
    common_dim(states)?;
    if gammas.len() != states.len() {
        return Err(Error::InvalidArgument(format!(
            "{} success probabilities for {} states",
            gammas.len(),
            states.len()
        )));
    }
    if gammas
        .iter()
        .any(|&g| !(-T::op_tol()..=T::one() + T::op_tol()).contains(&g))
    {
        return Err(Error::InvalidArgument(
            "success probabilities must lie in [0, 1]".into(),
        ));
    }
    ensure_independent(states)?;
    let (x1, x2) = gram_pair(states)?;
    let witness = Operator::from_matrix(feasibility_matrix(&x1, &x2, gammas))?.min_eigenvalue();
    Ok(CloningFeasibility {
        gammas: gammas.to_vec(),
        feasible: witness >= -T::op_tol(),
        psd_witness: witness,
    })
}

/// Largest uniform `γ` that stays feasible, by bisection.
///
/// For uniform `γ` the feasibility matrix is `X⁽¹⁾ − γ X⁽²⁾`; `X⁽²⁾` is PSD
/// (Schur product of PSD matrices), so feasibility is monotone in `γ` and
/// bisection is sound. The endpoints are checked rather than assumed.
pub fn max_equal_gamma<T: RealScalar>(states: &[PureState<T>]) -> Result<T> {
    ensure_independent(states)?;
    let (x1, x2) = gram_pair(states)?;
    let n = states.len();
    let witness_at = |g: T| -> T {
        Operator::from_matrix(feasibility_matrix(&x1, &x2, &vec![g; n]))
            .expect("square")
            .min_eigenvalue()
    };
    let feasible = |g: T| witness_at(g) >= -T::op_tol();
    if !feasible(T::zero()) {
        // X⁽¹⁾ is a Gram matrix; this can only mean numeric breakage.
        return Err(Error::Infeasible {
            witness: witness_at(T::zero()).to_f64().unwrap_or(f64::NAN),
        });
    }
    if feasible(T::one()) {
        return Ok(T::one());
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    while hi - lo > T::bisect_tol() {
        let mid = (lo + hi) * real(0.5);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Semidefinite Cholesky in input order: returns `L` with `R ≈ L L†`,
/// zeroing columns whose pivot falls below tolerance. Deterministic
/// completion of the failure-sector Gram data.
fn semidefinite_cholesky<T: RealScalar>(r: &CMat<T>, pivot_tol: T) -> CMat<T> {
    let n = r.nrows();
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut diag = r[(j, j)].re;
        for m in 0..j {
            diag -= l[(j, m)].modulus_squared();
        }
        if diag <= pivot_tol {
            continue; // dependent direction: column stays zero
        }
        let pivot = diag.sqrt();
        l[(j, j)] = Complex::new(pivot, T::zero());
        for k in (j + 1)..n {
            let mut acc = r[(k, j)];
            for m in 0..j {
                acc -= l[(k, m)] * l[(j, m)].conj();
            }
            l[(k, j)] = acc.unscale(pivot);
        }
    }
    l
}

/// Builds the isometry of a feasible machine.
///
/// The output space is `C^{d²} ⊕ C^{failure_dim}`: coordinates below `d²`
/// carry the heralded two-copy output, the rest absorb failures. The
/// failure Gram data comes from the PSD residue via a Cholesky-style
/// completion in input order, and inputs orthogonal to all hypotheses are
/// routed to extra failure coordinates so `V` is a genuine isometry on the
/// whole input space.
pub fn build_cloner<T: RealScalar>(
    states: &[PureState<T>],
    gammas: &[T],
) -> Result<ClonerRealization<T>> {
    let feas = clone_feasibility(states, gammas)?;
    if !feas.feasible {
        return Err(Error::Infeasible {
            witness: feas.psd_witness.to_f64().unwrap_or(f64::NAN),
        });
    }
    let dim = common_dim(states)?;
    let n = states.len();
    let (x1, x2) = gram_pair(states)?;
    let residue = feasibility_matrix(&x1, &x2, gammas);
    let l = semidefinite_cholesky(&residue, real(1e-12));
    let used: Vec<usize> = (0..n)
        .filter(|&j| l.column(j).iter().any(|z| !z.is_zero()))
        .collect();
    let failure_rank = used.len();

    let success_dim = dim * dim;
    let extension_dim = dim - n; // orthocomplement of the hypothesis span
    let failure_dim = failure_rank + extension_dim;
    let out_dim = success_dim + failure_dim;

    // Target vectors for each hypothesis.
    let mut targets = CMat::zeros(out_dim, n);
    for (k, s) in states.iter().enumerate() {
        let two_copy = s.tensor_power(2)?;
        let root_gamma = gammas[k].max(T::zero()).sqrt();
        for j in 0..success_dim {
            targets[(j, k)] = two_copy.amplitude(j).scale(root_gamma);
        }
        // Failure vector of state k is the conjugated k-th row of L, so the
        // failure Gram comes out as L L† = residue (not its conjugate).
        for (slot, &col) in used.iter().enumerate() {
            targets[(success_dim + slot, k)] = l[(k, col)].conj();
        }
    }

    // Extend linearly from the hypothesis span to the whole input space.
    let a = state_matrix(states)?;
    let qr = a.clone().qr();
    let q = qr.q(); // dim × n, orthonormal span basis
    let span_coords = qr.r(); // n × n, invertible for independent states
    let inv = span_coords
        .try_inverse()
        .ok_or(Error::NotABasis)?;
    let v_on_q = &targets * inv; // action of V on the columns of q

    let mut isometry = &v_on_q * q.adjoint();
    if extension_dim > 0 {
        // Orthonormalize leftover basis directions (against the span and
        // against each other) and send them to reserved failure coordinates.
        let mut extras: Vec<CVec<T>> = Vec::with_capacity(extension_dim);
        for j in 0..dim {
            if extras.len() == extension_dim {
                break;
            }
            let mut cand = CVec::zeros(dim);
            cand[j] = Complex::one();
            for c in 0..n {
                let qc = q.column(c);
                let overlap = qc.dotc(&cand);
                cand -= CVec::from(qc) * overlap;
            }
            for prev in &extras {
                let overlap = prev.dotc(&cand);
                cand -= prev * overlap;
            }
            let norm = cand.norm();
            if norm < real(1e-8) {
                continue;
            }
            extras.push(cand.unscale(norm));
        }
        if extras.len() != extension_dim {
            return Err(Error::InvalidArgument(
                "failed to extend the isometry off the hypothesis span".into(),
            ));
        }
        for (slot, cand) in extras.iter().enumerate() {
            let row = success_dim + failure_rank + slot;
            for i in 0..dim {
                isometry[(row, i)] = cand[i].conj();
            }
        }
    }

    Ok(ClonerRealization {
        input_dim: dim,
        ancilla_dim: failure_dim,
        isometry,
        flags: FlagSubspace {
            success_dim,
            failure_dim,
        },
        gammas: gammas.to_vec(),
    })
}

impl<T: RealScalar> ClonerRealization<T> {
    /// Max entry modulus of `V†V − I`.
    pub fn isometry_defect(&self) -> T {
        let n = self.input_dim;
        let defect = self.isometry.adjoint() * &self.isometry - CMat::identity(n, n);
        defect
            .iter()
            .map(|z| z.modulus())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Success probability the machine assigns to an input state.
    pub fn success_probability(&self, state: &PureState<T>) -> Result<T> {
        if state.dim() != self.input_dim {
            return Err(Error::DimensionMismatch(self.input_dim, state.dim()));
        }
        let out = &self.isometry * state.amplitudes();
        Ok(out
            .rows(0, self.flags.success_dim)
            .iter()
            .fold(T::zero(), |acc, z| acc + z.modulus_squared()))
    }

    /// Normalized two-copy output conditioned on success, if the success
    /// branch has any weight.
    pub fn conditional_success_output(&self, state: &PureState<T>) -> Result<Option<PureState<T>>> {
        if state.dim() != self.input_dim {
            return Err(Error::DimensionMismatch(self.input_dim, state.dim()));
        }
        let out = &self.isometry * state.amplitudes();
        let branch = CVec::from_iterator(
            self.flags.success_dim,
            out.rows(0, self.flags.success_dim).iter().copied(),
        );
        let norm = branch.norm();
        if norm <= T::norm_tol() {
            return Ok(None);
        }
        Ok(Some(PureState::from_unit_vector(branch.unscale(norm))))
    }

    /// Applies the machine and measures the flag; reproducible per seed.
    pub fn apply(&self, state: &PureState<T>, seed: u64) -> Result<CloneOutcome<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.apply_with_rng(state, &mut rng)
    }

    /// Applies the machine using the caller's RNG stream.
    pub fn apply_with_rng<R: Rng + ?Sized>(
        &self,
        state: &PureState<T>,
        rng: &mut R,
    ) -> Result<CloneOutcome<T>> {
        let p = self
            .success_probability(state)?
            .to_f64()
            .unwrap_or(0.0)
            .clamp(0.0, 1.0);
        if rng.random_range(0.0..1.0) < p {
            match self.conditional_success_output(state)? {
                Some(out) => Ok(CloneOutcome::Success(out)),
                None => Ok(CloneOutcome::Failure),
            }
        } else {
            Ok(CloneOutcome::Failure)
        }
    }

    /// Success probabilities the machine was built for.
    pub fn gammas(&self) -> &[T] {
        &self.gammas
    }
}

/// Builds the impossibility certificate for a `(d+1)`-tuple in dimension `d`
/// with every `d`-subset independent.
///
/// A linear machine cloning every state with success flags satisfies, for
/// each `k`, `√γ_k ψ_k^{⊗2} ⊗ m_k = Σ_{j≠k} λ_j √γ_j ψ_j^{⊗2} ⊗ m_j` with
/// the `λ` of the single-copy dependence. Projecting on the common flag and
/// measuring distances: `√γ_k · dist(ψ_k^{⊗2}, span{ψ_j^{⊗2}}) ≤ slack`, so
/// two-copy independence forces `γ_k ≤ (slack / dist_k)²` for every state.
pub fn impossibility_certificate<T: RealScalar>(
    states: &[PureState<T>],
) -> Result<ImpossibilityCertificate<T>> {
    check_two_copy_preconditions(states)?;
    let dependence = dependence_coefficients(states)?;
    let two_copy_verdict = two_copy_independence(states)?;

    let lifted: Vec<PureState<T>> = states
        .iter()
        .map(|s| s.tensor_power(2))
        .collect::<Result<_>>()?;
    let slack = T::linearity_tol();
    let mut lift_residuals = Vec::with_capacity(states.len());
    let mut max_gamma_bound = T::zero();
    for k in 0..lifted.len() {
        let others: Vec<PureState<T>> = lifted
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, s)| s.clone())
            .collect();
        let (_, residual) = express_in_span(&others, &lifted[k])?;
        let bound = if residual <= slack {
            T::one()
        } else {
            let ratio = slack / residual;
            (ratio * ratio).min(T::one())
        };
        lift_residuals.push(residual);
        max_gamma_bound = max_gamma_bound.max(bound);
    }

    Ok(ImpossibilityCertificate {
        dependence,
        two_copy_verdict,
        max_gamma_bound,
        lift_residuals,
    })
}
