//! Normalized pure states and the elementary operations on them.

use crate::error::{Error, Result};
use crate::scalar::{real, RealScalar};
use crate::CVec;
use nalgebra::ComplexField;
use num_complex::Complex;
use num_traits::One;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// A normalized pure state: a unit vector of complex amplitudes, dim ≥ 2.
///
/// States are compared as rays; all equality-style checks go through
/// [`PureState::fidelity`], never through componentwise comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: RealScalar> {
    amplitudes: CVec<T>,
}

impl<T: RealScalar> PureState<T> {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let v = CVec::from_vec(amplitudes);
        let norm = v.norm();
        if norm <= T::norm_tol() {
            return Err(Error::InvalidState);
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(amplitudes: &[T]) -> Result<Self> {
        Self::new(
            amplitudes
                .iter()
                .map(|&a| Complex::new(a, T::zero()))
                .collect(),
        )
    }

    /// The computational basis state `|j⟩` in dimension `dim`.
    pub fn basis_state(dim: usize, j: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if j >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {j} out of range for dimension {dim}"
            )));
        }
        let mut v = CVec::zeros(dim);
        v[j] = Complex::one();
        Ok(Self { amplitudes: v })
    }

    /// Wraps an already-normalized vector without renormalizing.
    pub(crate) fn from_unit_vector(v: CVec<T>) -> Self {
        debug_assert!((v.norm() - T::one()).abs() < real(1e-6));
        Self { amplitudes: v }
    }

    /// Haar-random pure state of the given dimension.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let normal = StandardNormal;
        let amps: Vec<Complex<T>> = (0..dim)
            .map(|_| {
                let re: f64 = normal.sample(rng);
                let im: f64 = normal.sample(rng);
                Complex::new(real(re), real(im))
            })
            .collect();
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, j: usize) -> Complex<T> {
        self.amplitudes[j]
    }

    /// Gauge-fixed representative of the ray: the first amplitude with
    /// modulus above `norm_tol` is made real and strictly positive.
    pub fn canonicalized(&self) -> Self {
        let pivot = self
            .amplitudes
            .iter()
            .find(|a| a.modulus() > T::norm_tol());
        match pivot {
            Some(a) => {
                let phase = a.unscale(a.modulus());
                Self {
                    amplitudes: self.amplitudes.map(|x| x * phase.conj()),
                }
            }
            None => self.clone(),
        }
    }

    /// `⟨self|other⟩`, conjugating the first argument.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|²`, the gauge-invariant overlap.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.modulus_squared())
    }

    /// Whether the two states are distinct as rays at the given tolerance
    /// (`None` uses the default distinctness threshold).
    pub fn is_distinct_from(&self, other: &Self, tol: Option<T>) -> Result<bool> {
        let tol = tol.unwrap_or_else(T::distinct_tol);
        Ok(self.fidelity(other)? <= T::one() - tol)
    }

    /// `n`-fold tensor power `|ψ⟩^{⊗n}`; the result lives in dimension `dⁿ`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "tensor power requires n ≥ 1".into(),
            ));
        }
        let mut out = self.amplitudes.clone();
        for _ in 1..n {
            out = out.kronecker(&self.amplitudes);
        }
        Ok(Self { amplitudes: out })
    }

    /// Tensor product with another state.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// Multiplies by a unit-modulus global phase `e^{iθ}`.
    pub fn with_global_phase(&self, theta: T) -> Self {
        let phase = crate::scalar::polar(T::one(), theta);
        Self {
            amplitudes: self.amplitudes.map(|x| x * phase),
        }
    }
}

/// States serialize as a JSON array of `[re, im]` pairs.
impl<T: RealScalar> Serialize for PureState<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for a in self.amplitudes.iter() {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// Checks that the states share one dimension and returns it.
pub fn common_dim<T: RealScalar>(states: &[PureState<T>]) -> Result<usize> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty state list".into()))?;
    for s in states {
        if s.dim() != first.dim() {
            return Err(Error::DimensionMismatch(first.dim(), s.dim()));
        }
    }
    Ok(first.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PureState64;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(re_im: &[(f64, f64)]) -> PureState64 {
        PureState::new(re_im.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn basis_vector_is_exact() {
        let s = ket(&[(1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(s.amplitude(0), Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitude(1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn normalization_is_forced() {
        let s = ket(&[(1.0, 0.0), (1.0, 0.0)]);
        assert_abs_diff_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(0).re, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn zero_vector_rejected() {
        let r = PureState64::new(vec![Complex64::new(0.0, 0.0); 2]);
        assert!(matches!(r, Err(Error::InvalidState)));
    }

    #[test]
    fn too_short_rejected() {
        let r = PureState64::new(vec![Complex64::new(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn inner_products() {
        let zero = PureState64::basis_state(2, 0).unwrap();
        let one = PureState64::basis_state(2, 1).unwrap();
        let plus = ket(&[(1.0, 0.0), (1.0, 0.0)]);
        assert_abs_diff_eq!(zero.inner(&one).unwrap().modulus(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.inner(&plus).unwrap().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            zero.inner(&plus).unwrap().re,
            1.0 / 2.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn inner_conjugates_first_argument() {
        let a = ket(&[(1.0, 0.0), (0.0, 1.0)]);
        let b = PureState64::basis_state(2, 1).unwrap();
        // ⟨a|b⟩ = conj(i/√2) = −i/√2
        let z = a.inner(&b).unwrap();
        assert_abs_diff_eq!(z.im, -1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn dim_mismatch_detected() {
        let a = PureState64::basis_state(2, 0).unwrap();
        let b = PureState64::basis_state(3, 0).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn tensor_power_basis_product() {
        let zero = PureState64::basis_state(2, 0).unwrap();
        let z2 = zero.tensor_power(2).unwrap();
        assert_eq!(z2.dim(), 4);
        assert_abs_diff_eq!(z2.amplitude(0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tensor_power_plus_state() {
        let plus = ket(&[(1.0, 0.0), (1.0, 0.0)]);
        let p2 = plus.tensor_power(2).unwrap();
        for j in 0..4 {
            assert_abs_diff_eq!(p2.amplitude(j).re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn tensor_power_zero_rejected() {
        let s = PureState64::basis_state(2, 0).unwrap();
        assert!(matches!(s.tensor_power(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn canonical_gauge_first_nonzero_positive() {
        let s = ket(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let c = s.canonicalized();
        assert_abs_diff_eq!(c.amplitude(1).im, 0.0, epsilon = 1e-15);
        assert!(c.amplitude(1).re > 0.0);
        // Canonicalization preserves the ray.
        assert_abs_diff_eq!(s.fidelity(&c).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = PureState64::random(4, &mut rng).unwrap();
            assert_abs_diff_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-12);
        }
    }

    // Oracle: ⟨a⊗a|b⊗b⟩ must equal ⟨a|b⟩² computed through `inner` alone.
    #[test]
    fn tensor_power_multiplicativity_against_inner_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let a = PureState64::random(3, &mut rng).unwrap();
            let b = PureState64::random(3, &mut rng).unwrap();
            let base = a.inner(&b).unwrap();
            for n in 2..=3usize {
                let lifted = a
                    .tensor_power(n)
                    .unwrap()
                    .inner(&b.tensor_power(n).unwrap())
                    .unwrap();
                let expected = base.powu(n as u32);
                assert!((lifted - expected).modulus() < 1e-10);
            }
        }
    }

    #[test]
    fn serializes_as_pairs() {
        let s = PureState64::basis_state(2, 1).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[0.0,0.0],[1.0,0.0]]");
    }

    proptest! {
        // Gauge invariance: fidelity is unchanged by a global phase.
        #[test]
        fn fidelity_gauge_invariant(seed in 0u64..500, theta in 0.0..std::f64::consts::TAU) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = PureState64::random(3, &mut rng).unwrap();
            let b = PureState64::random(3, &mut rng).unwrap();
            let f0 = a.fidelity(&b).unwrap();
            let f1 = a.with_global_phase(theta).fidelity(&b).unwrap();
            prop_assert!((f0 - f1).abs() < 1e-12);
        }

        #[test]
        fn constructor_always_unit_norm(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = PureState64::random(5, &mut rng).unwrap();
            prop_assert!((s.amplitudes().norm() - 1.0).abs() < 1e-12);
        }
    }
}
