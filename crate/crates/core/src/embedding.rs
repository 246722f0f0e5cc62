//! Heuristic search for a basis in which a set of states shares one
//! strictly positive amplitude-modulus profile.
//!
//! The search minimizes, over unitaries `U`, the spread of the moduli
//! `|(U†ψ_k)_j|` around their per-row means. It is multi-start (identity and
//! discrete-Fourier bases first, then seeded Haar-random starts) with
//! Nelder–Mead refinement over the Hermitian generator of a local unitary
//! perturbation. A sub-tolerance residual yields the decomposition;
//! "not found" reports the best residual reached and is NOT a proof that no
//! embedding exists.

use crate::bloch::AmplitudeDecomposition;
use crate::ensemble::{PhaseEnsembleSpec, PhasePoint};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{polar, real, RealScalar};
use crate::state::{common_dim, PureState};
use crate::CMat;
use nalgebra::{ComplexField, SymmetricEigen};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// Search configuration; the defaults match the library contract
/// (32 starts, deterministic given the seed).
#[derive(Debug, Clone)]
pub struct EmbeddingSearch {
    pub starts: usize,
    pub seed: u64,
    /// Nelder–Mead iteration budget per start.
    pub max_iters: usize,
    /// Residual below which the search declares success.
    pub residual_tol: f64,
    /// Smallest acceptable profile amplitude (the profile must be strictly
    /// positive to define an ensemble).
    pub min_amplitude: f64,
}

impl Default for EmbeddingSearch {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0x5eed,
            max_iters: 400,
            residual_tol: 1e-8,
            min_amplitude: 1e-6,
        }
    }
}

/// Search outcome: the decomposition when the residual dropped below
/// tolerance, and the best residual either way.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct EmbeddingOutcome<T: RealScalar> {
    pub decomposition: Option<AmplitudeDecomposition<T>>,
    pub best_residual: T,
}

impl<T: RealScalar> EmbeddingOutcome<T> {
    pub fn found(&self) -> bool {
        self.decomposition.is_some()
    }
}

/// Moduli matrix `B_{jk} = |(U†ψ_k)_j|`, its row means, and the residual
/// `√Σ (B_{jk} − mean_j)²`.
fn profile_residual<T: RealScalar>(
    u: &CMat<T>,
    states: &[PureState<T>],
) -> (Vec<T>, T) {
    let d = u.nrows();
    let n = states.len();
    let n_real = T::from_usize(n).unwrap();
    let mut rows = vec![T::zero(); d];
    let mut moduli = vec![vec![T::zero(); n]; d];
    for (k, s) in states.iter().enumerate() {
        let local = u.adjoint() * s.amplitudes();
        for j in 0..d {
            let m = local[j].modulus();
            moduli[j][k] = m;
            rows[j] += m;
        }
    }
    for r in rows.iter_mut() {
        *r /= n_real;
    }
    let mut sq = T::zero();
    for (row, &mean) in moduli.iter().zip(&rows) {
        for &m in row {
            let dev = m - mean;
            sq += dev * dev;
        }
    }
    (rows, sq.sqrt())
}

/// Hermitian generator from `d²` real parameters.
fn hermitian_from_params<T: RealScalar>(x: &[f64], d: usize) -> CMat<T> {
    let mut h = CMat::zeros(d, d);
    for j in 0..d {
        h[(j, j)] = Complex::new(real(x[j]), T::zero());
    }
    let mut t = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = Complex::new(real::<T>(x[t]), real::<T>(x[t + 1]));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            t += 2;
        }
    }
    h
}

/// `exp(iH)` for Hermitian `H`, via its eigendecomposition.
fn unitary_exp<T: RealScalar>(h: &CMat<T>) -> CMat<T> {
    let eig = SymmetricEigen::new(h.clone());
    let d = h.nrows();
    let mut phases = CMat::zeros(d, d);
    for j in 0..d {
        phases[(j, j)] = polar(T::one(), eig.eigenvalues[j]);
    }
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// The unitary DFT matrix `F_{jk} = ω^{jk}/√d`.
pub(crate) fn dft_matrix<T: RealScalar>(d: usize) -> CMat<T> {
    let step = T::two_pi() / T::from_usize(d).unwrap();
    let inv_sqrt_d = T::one() / T::from_usize(d).unwrap().sqrt();
    CMat::from_fn(d, d, |j, k| {
        polar(inv_sqrt_d, step * T::from_usize(j * k).unwrap())
    })
}

/// Haar-random unitary via QR of a complex Gaussian matrix.
fn random_unitary<T: RealScalar>(d: usize, rng: &mut ChaCha8Rng) -> CMat<T> {
    let normal = StandardNormal;
    let g = CMat::from_fn(d, d, |_, _| {
        let re: f64 = normal.sample(rng);
        let im: f64 = normal.sample(rng);
        Complex::new(real(re), real(im))
    });
    g.qr().q()
}

/// Plain Nelder–Mead minimization over `R^n`; returns the best point found.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    scale: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += scale;
        let v = f(&p);
        simplex.push((p, v));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if worst - best < 1e-15 || best < 1e-15 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = (0..n)
            .map(|i| centroid[i] + (centroid[i] - simplex[n].0[i]))
            .collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|i| centroid[i] + 2.0 * (centroid[i] - simplex[n].0[i]))
                .collect();
            let fe = f(&expand);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|i| centroid[i] + 0.5 * (simplex[n].0[i] - centroid[i]))
                .collect();
            let fc = f(&contract);
            if fc < simplex[n].1 {
                simplex[n] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (x, &a) in entry.0.iter_mut().zip(&anchor) {
                        *x = a + 0.5 * (*x - a);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    simplex.swap_remove(0)
}

/// Multi-start search for a common-amplitude-profile basis in dimension
/// `d > 2` (the qubit case has the exact circle construction).
pub fn amplitude_profile_embedding<T: RealScalar>(
    states: &[PureState<T>],
    search: &EmbeddingSearch,
) -> Result<EmbeddingOutcome<T>> {
    let dim = common_dim(states)?;
    if dim <= 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if states.len() < 2 {
        return Err(Error::PreconditionFailed(
            "embedding search needs at least two states".into(),
        ));
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

    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut starts: Vec<CMat<T>> = vec![CMat::identity(dim, dim), dft_matrix(dim)];
    while starts.len() < search.starts.max(2) {
        starts.push(random_unitary(dim, &mut rng));
    }

    let n_params = dim * dim;
    let mut best_u: Option<CMat<T>> = None;
    let mut best_residual = T::from_f64(f64::INFINITY).unwrap();

    // The structured starts (identity, Fourier) are often exact already;
    // take them as-is before spending any refinement budget.
    for start in &starts {
        let (_, r) = profile_residual(start, states);
        if r < best_residual {
            best_u = Some(start.clone());
            best_residual = r;
        }
    }

    if best_residual >= real(search.residual_tol) {
        for start in &starts {
            let objective = |x: &[f64]| -> f64 {
                let h = hermitian_from_params::<T>(x, dim);
                let u = start * unitary_exp(&h);
                let (_, r) = profile_residual(&u, states);
                r.to_f64().unwrap_or(f64::INFINITY)
            };
            let (x, r) = nelder_mead(objective, &vec![0.0; n_params], 0.35, search.max_iters);
            if real::<T>(r) < best_residual {
                let h = hermitian_from_params::<T>(&x, dim);
                best_u = Some(start * unitary_exp(&h));
                best_residual = real(r);
            }
            if best_residual < real(search.residual_tol) {
                break;
            }
        }
    }

    let u = best_u.expect("at least one start");
    let (row_means, _) = profile_residual(&u, states);
    let min_amp = row_means.iter().copied().fold(T::one(), |a, b| a.min(b));
    let found =
        best_residual < real(search.residual_tol) && min_amp > real(search.min_amplitude);

    let decomposition = if found {
        let spec = PhaseEnsembleSpec::new(row_means)?;
        let mut phase_matrix = Vec::with_capacity(states.len());
        for s in states {
            let local = u.adjoint() * s.amplitudes();
            phase_matrix.push(PhasePoint::new(
                (0..dim).map(|j| local[j].im.atan2(local[j].re)).collect(),
            ));
        }
        Some(AmplitudeDecomposition {
            basis: Operator::from_matrix(u)?,
            spec,
            phase_matrix,
            near_pole: min_amp < T::near_pole_tol(),
        })
    } else {
        None
    };

    Ok(EmbeddingOutcome {
        decomposition,
        best_residual,
    })
}
