//! Scalar abstraction and the numeric tolerances used across the crate.

use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Real scalar the library is generic over: `f32` or `f64`.
///
/// The associated tolerance functions pin every numeric threshold in one
/// place. The `f64` values are the reference thresholds used by the test
/// suite; the `f32` values are loosened to what single precision can
/// actually deliver.
pub trait RealScalar:
    nalgebra::RealField + Copy + Default + FromPrimitive + ToPrimitive + Serialize + DeserializeOwned
{
    /// Unit-norm tolerance for state and ensemble constructors.
    fn norm_tol() -> Self;
    /// Tolerance for Hermiticity, unitarity, and PSD (min eigenvalue) checks.
    fn op_tol() -> Self;
    /// Relative rank tolerance: independent iff min σ > tol · max σ.
    fn rank_tol() -> Self;
    /// Two states are distinct as rays iff fidelity ≤ 1 − distinct_tol.
    fn distinct_tol() -> Self;
    /// Absolute threshold on |det| for the phase-determinant test.
    fn det_tol() -> Self;
    /// Bisection convergence tolerance for boundary searches.
    fn bisect_tol() -> Self;
    /// Residual bound certifying a dependence relation.
    fn residual_tol() -> Self;
    /// Reconstruction-fidelity slack for amplitude decompositions.
    fn reconstruct_tol() -> Self;
    /// Amplitude below which a decomposition carries a near-pole warning.
    fn near_pole_tol() -> Self;
    /// Residual below which the embedding search declares success.
    fn embed_tol() -> Self;
    /// Isometry and clone-fidelity tolerance for built machines.
    fn cloner_tol() -> Self;
    /// Exactness tolerance for remote state preparation outcomes.
    fn rsp_tol() -> Self;
    /// Slack allowed to a linear machine in impossibility certificates.
    fn linearity_tol() -> Self;
}

impl RealScalar for f64 {
    fn norm_tol() -> Self {
        1e-12
    }
    fn op_tol() -> Self {
        1e-10
    }
    fn rank_tol() -> Self {
        1e-9
    }
    fn distinct_tol() -> Self {
        1e-9
    }
    fn det_tol() -> Self {
        1e-9
    }
    fn bisect_tol() -> Self {
        1e-10
    }
    fn residual_tol() -> Self {
        1e-9
    }
    fn reconstruct_tol() -> Self {
        1e-10
    }
    fn near_pole_tol() -> Self {
        1e-8
    }
    fn embed_tol() -> Self {
        1e-8
    }
    fn cloner_tol() -> Self {
        1e-9
    }
    fn rsp_tol() -> Self {
        1e-12
    }
    fn linearity_tol() -> Self {
        1e-10
    }
}

impl RealScalar for f32 {
    fn norm_tol() -> Self {
        1e-5
    }
    fn op_tol() -> Self {
        1e-4
    }
    fn rank_tol() -> Self {
        1e-5
    }
    fn distinct_tol() -> Self {
        1e-5
    }
    fn det_tol() -> Self {
        1e-5
    }
    fn bisect_tol() -> Self {
        1e-6
    }
    fn residual_tol() -> Self {
        1e-4
    }
    fn reconstruct_tol() -> Self {
        1e-4
    }
    fn near_pole_tol() -> Self {
        1e-4
    }
    fn embed_tol() -> Self {
        1e-4
    }
    fn cloner_tol() -> Self {
        1e-4
    }
    fn rsp_tol() -> Self {
        1e-5
    }
    fn linearity_tol() -> Self {
        1e-5
    }
}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub fn real<T: RealScalar>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in the scalar type")
}

/// `r · e^{iθ}` without requiring `num_traits::Float` on `T`.
#[inline]
pub fn polar<T: RealScalar>(r: T, theta: T) -> Complex<T> {
    Complex::new(r * theta.cos(), r * theta.sin())
}

/// Canonicalizes an angle to `[0, 2π)`, identifying `2π` with `0`.
pub fn wrap_angle<T: RealScalar>(phi: T) -> T {
    let two_pi = T::two_pi();
    let mut w = phi - (phi / two_pi).floor() * two_pi;
    if w >= two_pi || w < T::zero() {
        w = T::zero();
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_canonical_range() {
        assert_eq!(wrap_angle(0.0_f64), 0.0);
        assert!((wrap_angle(7.0_f64) - (7.0 - std::f64::consts::TAU)).abs() < 1e-15);
        assert!((wrap_angle(-1.0_f64) - (std::f64::consts::TAU - 1.0)).abs() < 1e-15);
        // 2π is identified with 0.
        assert_eq!(wrap_angle(std::f64::consts::TAU), 0.0);
    }

    #[test]
    fn polar_matches_euler() {
        let z = polar(2.0_f64, std::f64::consts::FRAC_PI_2);
        assert!(z.re.abs() < 1e-15);
        assert!((z.im - 2.0).abs() < 1e-15);
    }
}
