//! Linear-independence certification: singular-value rank tests, the phase
//! determinant for fixed-amplitude ensembles, dependence coefficients, and
//! the two-copy independence theorem.

use crate::ensemble::PhasePoint;
use crate::error::{Error, Result};
use crate::scalar::{polar, RealScalar};
use crate::state::{common_dim, PureState};
use crate::CMat;
use num_complex::Complex;

use serde::Serialize;

/// Outcome of a rank test. `independent` holds iff
/// `min_singular_value > tolerance_used · max_singular_value`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct IndependenceVerdict<T: RealScalar> {
    pub independent: bool,
    pub min_singular_value: T,
    pub max_singular_value: T,
    pub tolerance_used: T,
    /// All singular values (descending), kept for auditability.
    pub singular_values: Vec<T>,
}

/// A coefficient vector expressing one state in terms of the preceding ones:
/// `ψ_target = Σ_k coefficients[k] · ψ_k` with the given residual.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct DependenceCertificate<T: RealScalar> {
    #[serde(serialize_with = "crate::io::complex_pairs")]
    pub coefficients: Vec<Complex<T>>,
    pub target_index: usize,
    pub residual: T,
}

/// Stacks states as the columns of a `d × n` matrix.
pub(crate) fn state_matrix<T: RealScalar>(states: &[PureState<T>]) -> Result<CMat<T>> {
    let dim = common_dim(states)?;
    let mut m = CMat::zeros(dim, states.len());
    for (k, s) in states.iter().enumerate() {
        m.set_column(k, s.amplitudes());
    }
    Ok(m)
}

/// Rank test via the smallest singular value of the state matrix.
///
/// More states than dimensions is dependent without computation. `tol` is
/// relative: independence requires `σ_min > tol · σ_max`.
pub fn is_linearly_independent<T: RealScalar>(
    states: &[PureState<T>],
    tol: T,
) -> Result<IndependenceVerdict<T>> {
    let dim = common_dim(states)?;
    if states.len() > dim {
        return Ok(IndependenceVerdict {
            independent: false,
            min_singular_value: T::zero(),
            max_singular_value: T::zero(),
            tolerance_used: tol,
            singular_values: Vec::new(),
        });
    }
    let m = state_matrix(states)?;
    let svd = m.svd(false, false);
    let mut sv: Vec<T> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let max_sv = sv[0];
    let min_sv = sv[sv.len() - 1];
    Ok(IndependenceVerdict {
        independent: min_sv > tol * max_sv,
        min_singular_value: min_sv,
        max_singular_value: max_sv,
        tolerance_used: tol,
        singular_values: sv,
    })
}

/// Convenience wrapper using the default rank tolerance.
pub fn is_linearly_independent_default<T: RealScalar>(
    states: &[PureState<T>],
) -> Result<IndependenceVerdict<T>> {
    is_linearly_independent(states, T::rank_tol())
}

/// Determinant of the `d × d` matrix with entries `e^{iφ_jk}` (basis element
/// `j`, state `k`).
///
/// For states drawn from a fixed-amplitude ensemble with strictly positive
/// profile, the set is linearly independent iff this determinant is nonzero:
/// `Σ_k λ_k α_j e^{iφ_jk} = 0` for all `j` reduces to `Mλ = 0` once the
/// positive `α_j` are divided out.
pub fn phase_determinant<T: RealScalar>(phase_matrix: &[PhasePoint<T>]) -> Result<Complex<T>> {
    let n = phase_matrix.len();
    if n == 0 {
        return Err(Error::InvalidShape { states: 0, dim: 0 });
    }
    let dim = phase_matrix[0].dim();
    if dim != n || phase_matrix.iter().any(|p| p.dim() != dim) {
        return Err(Error::InvalidShape { states: n, dim });
    }
    let mut m = CMat::zeros(dim, n);
    for (k, point) in phase_matrix.iter().enumerate() {
        for (j, &phi) in point.phases().iter().enumerate() {
            m[(j, k)] = polar(T::one(), phi);
        }
    }
    Ok(m.determinant())
}

/// Least-squares coefficients expressing `target` in the span of `basis`
/// columns, with the residual norm. Internal building block shared by the
/// dependence certificate and the cloning impossibility bound.
pub(crate) fn express_in_span<T: RealScalar>(
    basis: &[PureState<T>],
    target: &PureState<T>,
) -> Result<(Vec<Complex<T>>, T)> {
    let dim = common_dim(basis)?;
    if target.dim() != dim {
        return Err(Error::DimensionMismatch(dim, target.dim()));
    }
    let a = state_matrix(basis)?;
    let svd = a.clone().svd(true, true);
    let coeffs = svd
        .solve(target.amplitudes(), T::from_f64(1e-14).unwrap())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&a * &coeffs - target.amplitudes()).norm();
    Ok((coeffs.iter().copied().collect(), residual))
}

/// Expresses the last of `d+1` states (dimension `d`) in the first `d`,
/// which must be linearly independent.
pub fn dependence_coefficients<T: RealScalar>(
    states: &[PureState<T>],
) -> Result<DependenceCertificate<T>> {
    let dim = common_dim(states)?;
    if states.len() != dim + 1 {
        return Err(Error::PreconditionFailed(format!(
            "need exactly {} states in dimension {dim}, got {}",
            dim + 1,
            states.len()
        )));
    }
    let (basis, target) = states.split_at(dim);
    if !is_linearly_independent_default(basis)?.independent {
        return Err(Error::NotABasis);
    }
    let (coefficients, residual) = express_in_span(basis, &target[0])?;
    Ok(DependenceCertificate {
        coefficients,
        target_index: dim,
        residual,
    })
}

/// Verifies the preconditions of the two-copy theorem: `d+1` states in
/// dimension `d`, pairwise distinct as rays, every leave-one-out `d`-subset
/// linearly independent.
pub(crate) fn check_two_copy_preconditions<T: RealScalar>(
    states: &[PureState<T>],
) -> Result<usize> {
    let dim = common_dim(states)?;
    if states.len() != dim + 1 {
        return Err(Error::PreconditionFailed(format!(
            "need exactly {} states in dimension {dim}, got {}",
            dim + 1,
            states.len()
        )));
    }
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            if !states[i].is_distinct_from(&states[j], None)? {
                return Err(Error::PreconditionFailed(format!(
                    "states {i} and {j} are not distinct as rays"
                )));
            }
        }
    }
    for skip in 0..states.len() {
        let subset: Vec<PureState<T>> = states
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != skip)
            .map(|(_, s)| s.clone())
            .collect();
        let verdict = is_linearly_independent_default(&subset)?;
        if !verdict.independent {
            return Err(Error::PreconditionFailed(format!(
                "the d-subset omitting state {skip} is linearly dependent \
                 (σ ratio {:.3e})",
                (verdict.min_singular_value / verdict.max_singular_value)
                    .to_f64()
                    .unwrap_or(0.0)
            )));
        }
    }
    Ok(dim)
}

/// Rank verdict on the two-copy lifts `ψ_k^{⊗2}` of a `(d+1)`-tuple meeting
/// the theorem's preconditions. For such tuples the lifted set is linearly
/// independent: a dependence `ψ^{⊗2} = Σ λ_k ψ_k^{⊗2}` would equate a
/// product state with a genuinely entangled combination.
pub fn two_copy_independence<T: RealScalar>(
    states: &[PureState<T>],
) -> Result<IndependenceVerdict<T>> {
    check_two_copy_preconditions(states)?;
    let lifted: Result<Vec<PureState<T>>> = states.iter().map(|s| s.tensor_power(2)).collect();
    is_linearly_independent_default(&lifted?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{phase_state, PhaseEnsembleSpec};
    use crate::{PhasePoint64, PureState64};
    use approx::assert_abs_diff_eq;
    use nalgebra::ComplexField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn fourier_phases(d: usize) -> Vec<PhasePoint64> {
        (0..d)
            .map(|k| PhasePoint64::new((0..d).map(|j| TAU * (j * k) as f64 / d as f64).collect()))
            .collect()
    }

    #[test]
    fn orthonormal_pair_independent() {
        let states = [
            PureState64::basis_state(2, 0).unwrap(),
            PureState64::basis_state(2, 1).unwrap(),
        ];
        let v = is_linearly_independent(&states, 1e-9).unwrap();
        assert!(v.independent);
        assert_abs_diff_eq!(v.min_singular_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn repeated_state_dependent() {
        let z = PureState64::basis_state(2, 0).unwrap();
        let v = is_linearly_independent(&[z.clone(), z], 1e-9).unwrap();
        assert!(!v.independent);
    }

    #[test]
    fn more_states_than_dim_dependent_without_svd() {
        let states = [
            PureState64::basis_state(2, 0).unwrap(),
            PureState64::basis_state(2, 1).unwrap(),
            PureState64::from_real(&[1.0, 1.0]).unwrap(),
        ];
        let v = is_linearly_independent(&states, 1e-9).unwrap();
        assert!(!v.independent);
        assert!(v.singular_values.is_empty());
    }

    // Oracle: the 3×3 Fourier determinant evaluated by cofactor expansion,
    // independent of the LU path used by `phase_determinant`.
    fn det3_cofactor(m: &[[num_complex::Complex64; 3]; 3]) -> num_complex::Complex64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    #[test]
    fn fourier_determinant_modulus() {
        let points = fourier_phases(3);
        let det = phase_determinant(&points).unwrap();

        let mut m = [[num_complex::Complex64::default(); 3]; 3];
        for (k, p) in points.iter().enumerate() {
            for (j, &phi) in p.phases().iter().enumerate() {
                m[j][k] = num_complex::Complex64::from_polar(1.0, phi);
            }
        }
        let oracle = det3_cofactor(&m);
        assert_abs_diff_eq!(det.modulus(), oracle.norm(), epsilon = 1e-12);
        // |det DFT_3| = 3^{3/2}.
        assert_abs_diff_eq!(det.modulus(), 3.0_f64.powf(1.5), epsilon = 1e-10);
    }

    #[test]
    fn zero_phases_determinant_vanishes() {
        let points = vec![PhasePoint64::zero(3); 3];
        let det = phase_determinant(&points).unwrap();
        assert_abs_diff_eq!(det.modulus(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn non_square_phase_system_rejected() {
        let points = vec![PhasePoint64::zero(3); 2];
        assert!(matches!(
            phase_determinant(&points),
            Err(Error::InvalidShape { states: 2, dim: 3 })
        ));
    }

    // Cross-validation of the determinant criterion against the rank oracle
    // on random phase systems.
    #[test]
    fn determinant_agrees_with_rank_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in 2..=4usize {
            for _ in 0..300 {
                let alpha: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
                let spec = PhaseEnsembleSpec::new(alpha).unwrap();
                let points: Vec<PhasePoint64> = (0..d)
                    .map(|_| {
                        PhasePoint64::new((0..d).map(|_| rng.random_range(0.0..TAU)).collect())
                    })
                    .collect();
                let det = phase_determinant(&points).unwrap();
                let states: Vec<PureState64> = points
                    .iter()
                    .map(|p| phase_state(&spec, p).unwrap())
                    .collect();
                let verdict = is_linearly_independent(&states, 1e-9).unwrap();
                assert_eq!(det.modulus() > 1e-9, verdict.independent);
            }
        }
    }

    #[test]
    fn dependence_coefficients_plus_state() {
        let states = [
            PureState64::basis_state(2, 0).unwrap(),
            PureState64::basis_state(2, 1).unwrap(),
            PureState64::from_real(&[1.0, 1.0]).unwrap(),
        ];
        let c = dependence_coefficients(&states).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(c.coefficients[0].re, inv, epsilon = 1e-12);
        assert_abs_diff_eq!(c.coefficients[1].re, inv, epsilon = 1e-12);
        assert!(c.residual <= 1e-12);
        assert_eq!(c.target_index, 2);
    }

    #[test]
    fn dependence_coefficients_repetition() {
        let states = [
            PureState64::basis_state(2, 0).unwrap(),
            PureState64::basis_state(2, 1).unwrap(),
            PureState64::basis_state(2, 0).unwrap(),
        ];
        let c = dependence_coefficients(&states).unwrap();
        assert_abs_diff_eq!(c.coefficients[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.coefficients[1].modulus(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dependence_requires_basis() {
        let z = PureState64::basis_state(2, 0).unwrap();
        let states = [z.clone(), z.clone(), z];
        assert!(matches!(
            dependence_coefficients(&states),
            Err(Error::NotABasis)
        ));
    }

    #[test]
    fn dependence_residual_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut done = 0;
        while done < 200 {
            let a = PureState64::random(2, &mut rng).unwrap();
            let b = PureState64::random(2, &mut rng).unwrap();
            let c = PureState64::random(2, &mut rng).unwrap();
            match dependence_coefficients(&[a, b, c]) {
                Ok(cert) => {
                    assert!(cert.residual <= 1e-10, "residual {}", cert.residual);
                    done += 1;
                }
                Err(_) => continue,
            }
        }
    }

    #[test]
    fn two_copy_qubit_triple_independent() {
        let states = [
            PureState64::basis_state(2, 0).unwrap(),
            PureState64::basis_state(2, 1).unwrap(),
            PureState64::from_real(&[1.0, 1.0]).unwrap(),
        ];
        // Single copies are dependent (3 > 2) ...
        assert!(!is_linearly_independent_default(&states).unwrap().independent);
        // ... but the two-copy lifts in dimension 4 are independent.
        let v = two_copy_independence(&states).unwrap();
        assert!(v.independent);
    }

    #[test]
    fn two_copy_fourier_quadruple_in_dim_3() {
        let spec = PhaseEnsembleSpec::uniform(3).unwrap();
        let mut points = fourier_phases(3);
        points.push(PhasePoint64::new(vec![0.7, 2.1, 4.4]));
        let states: Vec<PureState64> = points
            .iter()
            .map(|p| phase_state(&spec, p).unwrap())
            .collect();
        let v = two_copy_independence(&states).unwrap();
        assert!(v.independent);
        assert_eq!(v.singular_values.len(), 4);
    }

    #[test]
    fn two_copy_rejects_repeated_states() {
        let psi = PureState64::from_real(&[0.6, 0.8]).unwrap();
        let phi = PureState64::basis_state(2, 0).unwrap();
        assert!(matches!(
            two_copy_independence(&[psi.clone(), psi, phi]),
            Err(Error::PreconditionFailed(_))
        ));
    }

    // Scaling invariance: the verdict ignores unit-modulus scalar factors.
    #[test]
    fn verdict_invariant_under_global_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let a = PureState64::random(3, &mut rng).unwrap();
            let b = PureState64::random(3, &mut rng).unwrap();
            let c = PureState64::random(3, &mut rng).unwrap();
            let v0 = is_linearly_independent_default(&[a.clone(), b.clone(), c.clone()]).unwrap();
            let theta: f64 = rng.random_range(0.0..TAU);
            let v1 = is_linearly_independent_default(&[
                a.with_global_phase(theta),
                b,
                c.with_global_phase(theta / 3.0),
            ])
            .unwrap();
            assert_eq!(v0.independent, v1.independent);
            assert_abs_diff_eq!(
                v0.min_singular_value,
                v1.min_singular_value,
                epsilon = 1e-10
            );
        }
    }
}
